use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;

use super::{
    CliError, CliResult, CodecName, Command, EvaluateArgs, ExperimentName, InitName, IterativeSolver, MaskName,
    PhantomName, RecoverArgs, ReplayArgs, SimulateArgs, SolverName, ToyArgs, VerifyArgs, EXIT_FAILURE, EXIT_OK,
};
use super::verify::{run_verify, VerifyRequest};
use crate::bounds::SolverKind;
use crate::codecs::{build_quantized_sparse_codec, Codec, Dct3dCodec, EnumerableCodebook, NlsCodec, NlsParams};
use crate::error::ScsError;
use crate::io::{
    creation_timestamp, load_frames, load_masks, load_measurement, load_signal, make_phantom, save_masks,
    save_measurement, save_nls_code, save_outputs, save_signal, PhantomKind, RunManifest, RunReport,
    MANIFEST_FILE,
};
use crate::rng::{streams, RngSpec};
use crate::sensing::{add_noise, forward, generate_masks, MaskDistribution};
use crate::signal::MultiFrameSignal;
use crate::solvers::{
    cbgap_recover, cbpgd_recover, compute_metrics, csp_recover, InitMode, IterationTrace, SolverConfig, StepMode,
};

pub(super) fn dispatch(cmd: &Command, recorded: &[String], threads: Option<usize>) -> CliResult<i32> {
    match cmd {
        Command::Simulate(a) => simulate(a, recorded),
        Command::Recover(a) => recover(a, recorded),
        Command::Evaluate(a) => evaluate(a, recorded),
        Command::Verify(a) => verify(a, recorded),
        Command::Replay(a) => replay(a, threads),
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Manifest with the common header and the command line.
fn base_manifest(command: &str, recorded: &[String]) -> CliResult<RunManifest> {
    let mut m = RunManifest::new();
    m.set("command", command)?;
    m.set("version", env!("CARGO_PKG_VERSION"))?;
    m.set("created", creation_timestamp())?;
    m.set_args(recorded)?;
    Ok(m)
}

fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| ScsError::io(dir, e).into())
}

/// Wall-clock timings make traces irreproducible, so they are skipped when
/// a reproducible build date is requested.
fn record_wall_time() -> bool {
    std::env::var_os("SOURCE_DATE_EPOCH").is_none()
}

fn toy_codebook(t: &ToyArgs, shape: (usize, usize, usize)) -> CliResult<EnumerableCodebook> {
    if t.toy_k == 0 || t.toy_bits == 0 || !(t.toy_rho > 0.0) {
        return Err(usage("--toy-k, --toy-bits and --toy-rho must be positive"));
    }
    Ok(build_quantized_sparse_codec(
        shape,
        t.toy_k,
        t.toy_bits,
        t.toy_rho,
        RngSpec::new(t.toy_seed, streams::CODEBOOK),
    )?)
}

fn record_toy(m: &mut RunManifest, t: &ToyArgs) -> CliResult<()> {
    m.set("toy.k", t.toy_k)?;
    m.set("toy.bits", t.toy_bits)?;
    m.set("toy.rho", t.toy_rho)?;
    m.set("toy.seed", t.toy_seed)?;
    Ok(())
}

/// The noise settings named in the experiments: low, medium and high.
pub(crate) fn noise_level_tag(sigma: f64) -> &'static str {
    match sigma {
        s if s == 0.0 => "none",
        s if s == 0.01 => "low",
        s if s == 0.1 => "medium",
        s if s == 0.5 => "high",
        _ => "custom",
    }
}

fn simulate(a: &SimulateArgs, recorded: &[String]) -> CliResult<i32> {
    if !(a.sigma >= 0.0 && a.sigma.is_finite()) {
        return Err(usage(format!("--sigma must be a finite non-negative number, got {}", a.sigma)));
    }
    if [a.width, a.height, a.frames].contains(&Some(0)) {
        return Err(usage("--width, --height and --frames must be positive"));
    }
    let dist = match a.mask {
        MaskName::Gaussian => MaskDistribution::Gaussian,
        MaskName::Bernoulli => MaskDistribution::Bernoulli01,
    };
    let mut m = base_manifest("simulate", recorded)?;
    m.set("mask", dist.name())?;
    m.set("sigma", a.sigma)?;
    m.set("noise_level", noise_level_tag(a.sigma))?;
    m.set("seed", a.seed)?;
    m.set("rng.masks", format!("{}:{}", a.seed, streams::MASKS))?;
    m.set("rng.noise", format!("{}:{}", a.seed, streams::NOISE))?;

    let x = match (&a.input, a.phantom) {
        (Some(input), _) => {
            m.set("input", input)?;
            let x = load_frames(input)?;
            for (flag, want, got) in [
                ("--width", a.width, x.nx()),
                ("--height", a.height, x.ny()),
                ("--frames", a.frames, x.frames()),
            ] {
                if want.is_some_and(|w| w != got) {
                    return Err(usage(format!("{flag} {} disagrees with the input ({got})", want.unwrap_or(0))));
                }
            }
            x
        }
        (None, Some(kind)) => {
            let shape = (a.width.unwrap_or(32), a.height.unwrap_or(32), a.frames.unwrap_or(8));
            m.set("phantom", kind.to_possible_value_name())?;
            m.set("rng.phantom", format!("{}:{}", a.seed, streams::PHANTOM))?;
            let rng = RngSpec::new(a.seed, streams::PHANTOM);
            let pk = match kind {
                PhantomName::MovingSquare => PhantomKind::MovingSquare {
                    size: a.square_size,
                    stride: a.stride,
                    value: a.value.unwrap_or(1.0),
                },
                PhantomName::ShiftingSparse => PhantomKind::ShiftingSparse { k: a.sparsity },
                PhantomName::Constant => PhantomKind::Constant {
                    value: a.value.unwrap_or(0.5),
                },
                PhantomName::Toy => {
                    record_toy(&mut m, &a.toy)?;
                    let cb = toy_codebook(&a.toy, shape)?;
                    let idx = rng.rng().random_range(0..cb.len());
                    m.set("phantom.index", idx)?;
                    create_dir(&a.out_dir)?;
                    m.write(a.out_dir.join(MANIFEST_FILE))?;
                    return finish_simulate(a, m, cb.codewords()[idx].clone(), dist);
                }
            };
            make_phantom(pk, shape, rng).map_err(|e| match e {
                ScsError::InvalidParameter(msg) => usage(msg),
                other => other.into(),
            })?
        }
        (None, None) => return Err(usage("one of --phantom or --input is required")),
    };
    create_dir(&a.out_dir)?;
    m.write(a.out_dir.join(MANIFEST_FILE))?;
    finish_simulate(a, m, x, dist)
}

fn finish_simulate(a: &SimulateArgs, mut m: RunManifest, x: MultiFrameSignal, dist: MaskDistribution) -> CliResult<i32> {
    m.set("nx", x.nx())?;
    m.set("ny", x.ny())?;
    m.set("frames", x.frames())?;
    let masks = generate_masks(x.shape(), dist, RngSpec::new(a.seed, streams::MASKS))?;
    let clean = forward(&masks, &x)?;
    let y = add_noise(&clean, a.sigma, RngSpec::new(a.seed, streams::NOISE))?;
    let files = [("masks", "masks.scsm"), ("measurement", "measurement.scsy"), ("truth", "truth.scsx")];
    save_masks(a.out_dir.join(files[0].1), &masks)?;
    save_measurement(a.out_dir.join(files[1].1), &y)?;
    save_signal(a.out_dir.join(files[2].1), &x)?;
    for (k, f) in files {
        m.set(&format!("output.{k}"), f)?;
    }
    m.write(a.out_dir.join(MANIFEST_FILE))?;
    println!("nx={} ny={} B={} sigma={}", x.nx(), x.ny(), x.frames(), a.sigma);
    Ok(EXIT_OK)
}

trait ValueName {
    fn to_possible_value_name(&self) -> String;
}

impl<T: clap::ValueEnum> ValueName for T {
    fn to_possible_value_name(&self) -> String {
        self.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
    }
}

fn recover(a: &RecoverArgs, recorded: &[String]) -> CliResult<i32> {
    if a.solver == SolverName::Csp && a.codec != CodecName::Toy {
        return Err(usage("--solver csp needs an enumerable code: use --codec toy"));
    }
    if a.mu.is_some_and(|mu| !(mu > 0.0 && mu.is_finite())) {
        return Err(usage("--mu must be positive"));
    }
    if a.iters == 0 {
        return Err(usage("--iters must be at least 1"));
    }
    if !(a.tol >= 0.0) {
        return Err(usage("--tol must be non-negative"));
    }
    let mut m = base_manifest("recover", recorded)?;
    m.set("input.masks", a.masks.display())?;
    m.set("input.measurement", a.measurement.display())?;
    if let Some(t) = &a.truth {
        m.set("input.truth", t.display())?;
    }
    m.set("codec", a.codec.to_possible_value_name())?;
    m.set("solver", a.solver.to_possible_value_name())?;

    let masks = load_masks(&a.masks)?;
    let y = load_measurement(&a.measurement)?;
    let truth = a.truth.as_ref().map(load_signal).transpose()?;
    let shape = masks.shape();

    let nls_params = NlsParams {
        block_w: a.nls_block,
        block_h: a.nls_block,
        stride: a.nls_stride,
        group_size: a.nls_group,
        search_window: a.nls_window,
        keep_per_group: a.nls_keep,
    };
    let codec: Box<dyn Codec> = match a.codec {
        CodecName::Toy => {
            record_toy(&mut m, &a.toy)?;
            Box::new(toy_codebook(&a.toy, shape)?)
        }
        CodecName::Dct3d => {
            m.set("dct3d.block", a.dct_block)?;
            m.set("dct3d.keep_fraction", a.keep_fraction)?;
            Box::new(Dct3dCodec {
                block: a.dct_block,
                keep_fraction: a.keep_fraction,
            })
        }
        CodecName::Nls => {
            nls_params.validate(shape.2).map_err(|e| usage(e.to_string()))?;
            m.set("nls.block", a.nls_block)?;
            m.set("nls.stride", a.nls_stride)?;
            m.set("nls.group", a.nls_group)?;
            m.set("nls.window", a.nls_window)?;
            m.set("nls.keep", nls_params.keep(shape.2))?;
            Box::new(NlsCodec::new(nls_params))
        }
    };

    let mut cfg = match a.solver {
        SolverName::Pgd => SolverConfig::pgd_default(shape.2),
        _ => SolverConfig::gap_default(),
    };
    if let Some(mu) = a.mu {
        cfg.step_mu = mu;
    }
    cfg.max_iters = a.iters;
    cfg.residual_tol = a.tol;
    cfg.step_mode = if a.adaptive { StepMode::Adaptive } else { StepMode::Fixed };
    cfg.init_mode = match a.init {
        InitName::Zero => InitMode::Zero,
        InitName::Backprojection => InitMode::Backprojection,
    };
    cfg.record_wall_time = record_wall_time();
    if a.solver != SolverName::Csp {
        cfg.validate().map_err(|e| usage(e.to_string()))?;
        m.set("mu", cfg.step_mu)?;
        m.set("step_mode", if a.adaptive { "adaptive" } else { "fixed" })?;
        m.set("iters", cfg.max_iters)?;
        m.set("tol", cfg.residual_tol)?;
        m.set("init", a.init.to_possible_value_name())?;
        m.set("clamp_eps", cfg.clamp_eps)?;
    }
    create_dir(&a.out_dir)?;
    m.write(a.out_dir.join(MANIFEST_FILE))?;

    let (xhat, trace, final_residual, final_error) = match a.solver {
        SolverName::Csp => {
            let cb = codec.codebook().ok_or_else(|| usage("codec is not enumerable"))?;
            let (x, r) = csp_recover(cb, &masks, &y)?;
            let err = truth.as_ref().map(|t| x.normalized_error(t));
            (x, IterationTrace::default(), r, err)
        }
        SolverName::Pgd | SolverName::Gap => {
            let run = if a.solver == SolverName::Pgd { cbpgd_recover } else { cbgap_recover };
            let out = run(codec.as_ref(), &masks, &y, &cfg, truth.as_ref())?;
            (out.xhat, out.trace, out.final_residual, out.final_error)
        }
    };
    let metrics = truth.as_ref().map(|t| compute_metrics(&xhat, t)).transpose()?;
    let report = RunReport {
        final_residual,
        final_error,
        metrics,
    };
    let psnr = report.metrics.as_ref().map(|m| format!(" psnr_db={:.2}", m.psnr_db)).unwrap_or_default();
    save_outputs(&a.out_dir, &mut m, &xhat, &trace, &report)?;
    if a.save_code && a.codec == CodecName::Nls {
        let code = NlsCodec::new(nls_params).encode(&xhat)?;
        save_nls_code(a.out_dir.join("recon.scsc"), &code)?;
        m.set("output.code", "recon.scsc")?;
        m.write(a.out_dir.join(MANIFEST_FILE))?;
    }
    println!(
        "solver={} codec={} iterations={} final_residual={:e}{psnr}",
        a.solver.to_possible_value_name(),
        a.codec.to_possible_value_name(),
        trace.len(),
        final_residual
    );
    Ok(EXIT_OK)
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    path.with_extension(suffix)
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    fs::write(path, text).map_err(|e| ScsError::io(path, e).into())
}

fn evaluate(a: &EvaluateArgs, recorded: &[String]) -> CliResult<i32> {
    let mut m = base_manifest("evaluate", recorded)?;
    m.set("input.recon", a.recon.display())?;
    m.set("input.truth", a.truth.display())?;
    let xhat = load_signal(&a.recon)?;
    let truth = load_signal(&a.truth)?;
    let metrics = compute_metrics(&xhat, &truth)?;
    let mut per_frame = String::from("frame,psnr_db\n");
    for (t, p) in metrics.per_frame_psnr.iter().enumerate() {
        per_frame.push_str(&format!("{t},{p}\n"));
    }
    let summary_path = sibling(&a.out, "summary.csv");
    write_text(&a.out, &per_frame)?;
    write_text(
        &summary_path,
        &format!("metric,value\nmse,{}\npsnr_db,{}\n", metrics.mse, metrics.psnr_db),
    )?;
    m.set("output.per_frame", a.out.display())?;
    m.set("output.summary", summary_path.display())?;
    m.write(sibling(&a.out, "manifest.txt"))?;
    println!("mse={:e} psnr_db={:.2}", metrics.mse, metrics.psnr_db);
    Ok(EXIT_OK)
}

fn verify(a: &VerifyArgs, recorded: &[String]) -> CliResult<i32> {
    if a.trials == Some(0) {
        return Err(usage("--trials must be at least 1"));
    }
    if a.sigma.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
        return Err(usage("--sigma values must be finite and non-negative"));
    }
    if a.experiment == ExperimentName::CspNoisy && a.sigma.contains(&0.0) {
        return Err(usage("csp-noisy needs positive --sigma values"));
    }
    let solver = match a.solver {
        IterativeSolver::Pgd => SolverKind::Pgd,
        IterativeSolver::Gap => SolverKind::Gap,
    };
    let mut m = base_manifest("verify", recorded)?;
    m.set("experiment", a.experiment.to_possible_value_name())?;
    m.set("seed", a.seed)?;
    if let Some(t) = a.trials {
        m.set("trials", t)?;
    }
    let manifest_path = sibling(&a.out, "manifest.txt");
    write_text(&manifest_path, &m.to_text())?;
    let req = VerifyRequest {
        experiment: a.experiment,
        trials: a.trials,
        seed: a.seed,
        solver,
        sigmas: a.sigma.clone(),
        n: a.n,
    };
    let out = run_verify(&req).map_err(|e| match e {
        ScsError::InvalidParameter(msg) | ScsError::InvalidArgument(msg) => usage(msg),
        other => other.into(),
    })?;
    let mut csv = Vec::new();
    out.report.write_csv(&mut csv).map_err(|e| ScsError::io(&a.out, e))?;
    write_text(&a.out, &String::from_utf8_lossy(&csv))?;
    m.set("output.report", a.out.display())?;
    m.set("pass", out.pass)?;
    m.write(&manifest_path)?;
    for line in &out.summary {
        println!("{line}");
    }
    let failed = out.report.records.iter().filter(|r| !r.pass).count();
    println!(
        "experiment={} grid_points={} failed={} pass={}",
        a.experiment.to_possible_value_name(),
        out.report.records.len(),
        failed,
        out.pass
    );
    Ok(if out.pass { EXIT_OK } else { EXIT_FAILURE })
}

/// Replaces the value of `flag` in `args`, in either `--flag v` or
/// `--flag=v` form. Returns the old value.
fn replace_flag(args: &mut [String], flag: &str, f: impl Fn(&str) -> String) -> Option<String> {
    let eq = format!("{flag}=");
    for i in 0..args.len() {
        if args[i] == flag && i + 1 < args.len() {
            let old = std::mem::take(&mut args[i + 1]);
            args[i + 1] = f(&old);
            return Some(old);
        }
        if let Some(old) = args[i].strip_prefix(&eq).map(str::to_string) {
            args[i] = format!("{eq}{}", f(&old));
            return Some(old);
        }
    }
    None
}

fn replay(a: &ReplayArgs, threads: Option<usize>) -> CliResult<i32> {
    let manifest = RunManifest::read(&a.manifest)?;
    let mut args = manifest.args();
    match args.first().map(String::as_str) {
        None => {
            return Err(CliError::Runtime(ScsError::Format(format!(
                "{}: no recorded command line",
                a.manifest.display()
            ))))
        }
        Some("replay") => return Err(usage("a replay manifest cannot be replayed")),
        Some(_) => {}
    }
    if let Some(dir) = &a.out_dir {
        let d = dir.display().to_string();
        replace_flag(&mut args, "--out-dir", |_| d.clone());
        replace_flag(&mut args, "--out", |old| {
            let name = Path::new(old).file_name().map(|n| n.to_os_string()).unwrap_or_default();
            dir.join(name).display().to_string()
        });
    }
    let mut argv = vec!["snapcs".to_string()];
    argv.extend(args.iter().cloned());
    let cli = <super::Cli as clap::Parser>::try_parse_from(&argv).map_err(|e| usage(format!("recorded command line: {e}")))?;
    dispatch(&cli.command, &args, threads)
}
