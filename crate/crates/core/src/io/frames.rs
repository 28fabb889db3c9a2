use std::fs;
use std::path::{Path, PathBuf};

use super::container::{decode_signal, read_bytes, ContainerKind};
use super::pgm::decode_pgm;
use crate::error::{Result, ScsError};
use crate::signal::MultiFrameSignal;

/// Loads a video from `pattern`, which may be
/// - an SCSX container,
/// - a single PGM file (one frame),
/// - a directory, whose `*.pgm` files are the frames in name order,
/// - a glob such as `frames/f_*.pgm`, matched files in name order.
///
/// PGM samples are divided by their maxval (255 or 65535) and the result is
/// flagged normalized.
pub fn load_frames(pattern: &str) -> Result<MultiFrameSignal> {
    let path = Path::new(pattern);
    if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .map_err(|e| ScsError::io(path, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("pgm")))
            .collect();
        files.sort();
        return load_frame_files(&files);
    }
    if path.is_file() {
        let bytes = read_bytes(path)?;
        if bytes.len() >= 4 && ContainerKind::from_magic(&bytes[..4]) == Some(ContainerKind::Signal) {
            return decode_signal(&bytes);
        }
        return load_frame_files(&[path.to_path_buf()]);
    }
    let entries = glob::glob(pattern).map_err(|e| ScsError::InvalidArgument(format!("{pattern}: {e}")))?;
    let mut files = Vec::new();
    for e in entries {
        files.push(e.map_err(|e| ScsError::InvalidArgument(e.to_string()))?);
    }
    if files.is_empty() {
        return Err(ScsError::Ingest(format!("no frames match {pattern}")));
    }
    load_frame_files(&files)
}

/// One PGM per frame, all of the same size.
pub fn load_frame_files(files: &[PathBuf]) -> Result<MultiFrameSignal> {
    if files.is_empty() {
        return Err(ScsError::Ingest("no frame files given".into()));
    }
    let mut frames = Vec::with_capacity(files.len());
    let mut size = None;
    for f in files {
        let img = decode_pgm(&read_bytes(f)?).map_err(|e| match e {
            ScsError::Format(m) => ScsError::Format(format!("{}: {m}", f.display())),
            other => other,
        })?;
        match size {
            None => size = Some((img.width, img.height)),
            Some(s) if s != (img.width, img.height) => {
                return Err(ScsError::Ingest(format!(
                    "{} is {}x{}, earlier frames are {}x{}",
                    f.display(),
                    img.width,
                    img.height,
                    s.0,
                    s.1
                )))
            }
            Some(_) => {}
        }
        frames.push(img.scaled());
    }
    let (w, h) = size.expect("at least one frame");
    MultiFrameSignal::from_frames(w, h, &frames)?.into_normalized()
}
