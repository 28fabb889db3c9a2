use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::container::{save_signal, write_bytes};
use super::manifest::{RunManifest, MANIFEST_FILE};
use super::pgm::{encode_pgm, preview_8bit};
use crate::error::{Result, ScsError};
use crate::signal::MultiFrameSignal;
use crate::solvers::{write_trace_csv, IterationTrace, Metrics};

/// Scalar results of a recovery run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub final_residual: f64,
    pub final_error: Option<f64>,
    pub metrics: Option<Metrics>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputPaths {
    pub recon: PathBuf,
    pub trace: PathBuf,
    pub metrics: PathBuf,
    pub previews: Vec<PathBuf>,
    pub manifest: PathBuf,
}

impl OutputPaths {
    pub fn in_dir(dir: &Path, frames: usize) -> Self {
        OutputPaths {
            recon: dir.join("recon.scsx"),
            trace: dir.join("trace.csv"),
            metrics: dir.join("metrics.csv"),
            previews: (0..frames).map(|t| dir.join(format!("frame_{t:03}.pgm"))).collect(),
            manifest: dir.join(MANIFEST_FILE),
        }
    }
}

pub const METRICS_CSV_HEADER: &str = "metric,value";

pub fn write_metrics_csv<W: Write>(mut w: W, trace: &IterationTrace, report: &RunReport) -> std::io::Result<()> {
    writeln!(w, "{METRICS_CSV_HEADER}")?;
    writeln!(w, "iterations,{}", trace.len())?;
    writeln!(w, "clamped_pixels,{}", trace.clamped_pixels)?;
    writeln!(w, "final_residual,{}", report.final_residual)?;
    if let Some(e) = report.final_error {
        writeln!(w, "final_error,{e}")?;
    }
    if let Some(m) = &report.metrics {
        writeln!(w, "mse,{}", m.mse)?;
        writeln!(w, "psnr_db,{}", m.psnr_db)?;
        for (t, p) in m.per_frame_psnr.iter().enumerate() {
            writeln!(w, "psnr_db_frame_{t},{p}")?;
        }
    }
    Ok(())
}

/// Writes the reconstruction, trace CSV, metrics CSV and 8-bit previews
/// into `dir`, records their file names in `manifest` and writes it last.
pub fn save_outputs(
    dir: impl AsRef<Path>,
    manifest: &mut RunManifest,
    xhat: &MultiFrameSignal,
    trace: &IterationTrace,
    report: &RunReport,
) -> Result<OutputPaths> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| ScsError::io(dir, e))?;
    let paths = OutputPaths::in_dir(dir, xhat.frames());

    save_signal(&paths.recon, xhat)?;
    let mut buf = Vec::new();
    write_trace_csv(&mut buf, trace).map_err(|e| ScsError::io(&paths.trace, e))?;
    write_bytes(&paths.trace, &buf)?;
    buf.clear();
    write_metrics_csv(&mut buf, trace, report).map_err(|e| ScsError::io(&paths.metrics, e))?;
    write_bytes(&paths.metrics, &buf)?;
    for (t, p) in paths.previews.iter().enumerate() {
        let img = preview_8bit(xhat.nx(), xhat.ny(), &xhat.frame(t));
        write_bytes(p, &encode_pgm(&img)?)?;
    }

    manifest.set("output.recon", "recon.scsx")?;
    manifest.set("output.trace", "trace.csv")?;
    manifest.set("output.metrics", "metrics.csv")?;
    manifest.set("output.previews", xhat.frames())?;
    manifest.write(&paths.manifest)?;
    Ok(paths)
}
