use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use balanced_jdm::chain::{RsoChain, Sampler};
use balanced_jdm::construct::construct_balanced;
use balanced_jdm::enumerate::{
    brute_force_realizations, enumerate_balanced, BRUTE_FORCE_MAX_VERTICES,
};
use balanced_jdm::io::{parse_jdm, parse_realization, write_realization, write_realizations};
use balanced_jdm::pipeline::{Options, Pipeline, Report};
use balanced_jdm::spectra::{tv_decay, tv_decay_empirical, TvCurve, DEFAULT_TV_CAP};
use balanced_jdm::{Error, JointDegreeMatrix, ThetaMode};

use crate::manifest::{sha256_hex, RunManifest};
use crate::{AnalyzeArgs, Cli, Command, Format, SampleArgs, Theta, EXIT_NOT_GRAPHICAL, EXIT_USAGE, EXIT_VIOLATION};

const EMPIRICAL_WALKERS: usize = 2000;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotGraphical(_) | Error::NonIntegralClassSize { .. } => EXIT_NOT_GRAPHICAL,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError {
        code: EXIT_USAGE,
        message: format!("{}: {e}", path.display()),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| io_error(path, e))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| io_error(path, e))
}

fn load_jdm(path: &Path) -> Result<(Vec<u8>, JointDegreeMatrix), CliError> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| CliError {
        code: EXIT_USAGE,
        message: format!("{}: not valid UTF-8", path.display()),
    })?;
    let jdm = parse_jdm(&text).map_err(|e| CliError {
        code: EXIT_USAGE,
        message: format!("{}: {e}", path.display()),
    })?;
    Ok((bytes, jdm))
}

fn emit(cli: &Cli, mut manifest: RunManifest, started: Instant) {
    if cli.timing {
        manifest.wall_clock_ms = Some(started.elapsed().as_millis() as u64);
    }
    match cli.format {
        Format::Json => print!("{}", manifest.to_json()),
        Format::Text => print!("{}", manifest.to_text()),
    }
}

pub fn run(cli: &Cli) -> Result<u8, CliError> {
    let started = Instant::now();
    match &cli.command {
        Command::Check { jdm, theta } => check(cli, jdm, *theta, started),
        Command::Construct { jdm, out } => construct(cli, jdm, out.as_deref(), started),
        Command::Sample(args) => sample(cli, args, started),
        Command::Enumerate {
            jdm,
            brute_force,
            cap,
            out,
        } => enumerate(cli, jdm, *brute_force, *cap, out.as_deref(), started),
        Command::Analyze(args) => analyze(cli, args, false, started),
        Command::Verify(args) => analyze(cli, args, true, started),
    }
}

fn check(cli: &Cli, path: &Path, theta: Theta, started: Instant) -> Result<u8, CliError> {
    let (bytes, jdm) = load_jdm(path)?;
    let report = jdm.is_graphical();
    let sizes = jdm.class_sizes().ok().map(|s| s.sizes().to_vec());
    let mode = match theta {
        Theta::Consistent => ThetaMode::Consistent,
        Theta::Literal => ThetaMode::Literal,
    };
    let table = jdm.theta(mode).ok().map(|t| {
        (0..t.num_classes())
            .map(|i| (0..t.num_classes()).map(|j| t.get(i, j).to_string()).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    });
    let result = json!({
        "graphical": report.graphical,
        "degrees": jdm.degrees(),
        "class_sizes": sizes,
        "vertex_count": sizes.as_ref().map(|s| s.iter().sum::<usize>()),
        "violations": report.violations,
        "theta": table,
    });
    let params = json!({ "theta": format!("{theta:?}").to_lowercase() });
    emit(cli, RunManifest::new("check", &bytes, params, result), started);
    Ok(if report.graphical { 0 } else { EXIT_NOT_GRAPHICAL })
}

fn construct(cli: &Cli, path: &Path, out: Option<&Path>, started: Instant) -> Result<u8, CliError> {
    let (bytes, jdm) = load_jdm(path)?;
    let g = construct_balanced(&jdm)?;
    let text = write_realization(&g);
    let Some(out) = out else {
        print!("{text}");
        return Ok(0);
    };
    write(out, &text)?;
    let result = json!({
        "vertex_count": g.num_vertices(),
        "edge_count": g.num_edges(),
        "balanced": g.is_balanced(&jdm)?,
        "realization_sha256": sha256_hex(text.as_bytes()),
        "out": out,
    });
    emit(cli, RunManifest::new("construct", &bytes, json!({}), result), started);
    Ok(0)
}

fn sample(cli: &Cli, args: &SampleArgs, started: Instant) -> Result<u8, CliError> {
    let (bytes, jdm) = load_jdm(&args.jdm)?;
    let chain = RsoChain::new(jdm.clone())?;
    let state = match &args.init {
        None => chain.initial_state()?,
        Some(p) => {
            let text = String::from_utf8_lossy(&read(p)?).into_owned();
            chain.state_from(parse_realization(&text, &jdm)?)?
        }
    };
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    let rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut sampler = Sampler::new(&chain, state, rng, args.burnin, args.steps, args.thin);
    let mut stream = Sha256::new();
    let mut retained = 0u64;
    for g in sampler.by_ref() {
        let text = write_realization(&g);
        stream.update(text.as_bytes());
        stream.update(b"\n");
        if let Some(dir) = &args.out {
            write(&dir.join(format!("sample-{retained:06}.txt")), &text)?;
        }
        retained += 1;
    }
    let counters = sampler.counters().clone();
    let result = json!({
        "retained": retained,
        "steps": counters.steps(),
        "counters": counters,
        "acceptance_rate": counters.acceptance_rate(),
        "stream_sha256": format!("{:x}", stream.finalize()),
        "final_state_sha256": sha256_hex(write_realization(sampler.state().realization()).as_bytes()),
    });
    let params = json!({
        "steps": args.steps,
        "burnin": args.burnin,
        "thin": args.thin.max(1),
        "init": args.init.as_ref().map(|p| p.display().to_string()),
    });
    let mut manifest = RunManifest::new("sample", &bytes, params, result);
    manifest.seed = Some(args.seed);
    if let Some(dir) = &args.out {
        write(&dir.join("manifest.json"), &manifest.to_json())?;
    }
    emit(cli, manifest, started);
    Ok(0)
}

fn enumerate(
    cli: &Cli,
    path: &Path,
    brute_force: bool,
    cap: usize,
    out: Option<&Path>,
    started: Instant,
) -> Result<u8, CliError> {
    let (bytes, jdm) = load_jdm(path)?;
    let states = if brute_force {
        jdm.require_graphical()?;
        brute_force_realizations(&jdm, true, BRUTE_FORCE_MAX_VERTICES)?
    } else {
        let chain = RsoChain::new(jdm.clone())?;
        enumerate_balanced(&chain, cap)?
            .states()
            .iter()
            .map(|s| s.realization().clone())
            .collect()
    };
    let listing = write_realizations(&states);
    if let Some(out) = out {
        write(out, &listing)?;
    }
    let result = json!({
        "count": states.len(),
        "method": if brute_force { "brute_force" } else { "bfs" },
        "listing_sha256": sha256_hex(listing.as_bytes()),
        "out": out,
    });
    let params = json!({ "brute_force": brute_force, "cap": cap });
    emit(cli, RunManifest::new("enumerate", &bytes, params, result), started);
    Ok(0)
}

fn tv_curve(pipeline: &Pipeline, start: usize, t_max: usize) -> Result<TvCurve, CliError> {
    if start >= pipeline.space.len() {
        return Err(CliError {
            code: EXIT_USAGE,
            message: format!("start index {start} out of range (0..{})", pipeline.space.len()),
        });
    }
    match tv_decay(&pipeline.analysis.matrix, start, t_max, DEFAULT_TV_CAP) {
        Err(Error::TooLarge(_)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            Ok(tv_decay_empirical(
                &pipeline.chain,
                &pipeline.space,
                start,
                t_max,
                EMPIRICAL_WALKERS,
                &mut rng,
            )?)
        }
        r => Ok(r?),
    }
}

fn tv_csv(curve: &TvCurve) -> String {
    let mut out = String::from("t,tv\n");
    for (t, v) in &curve.points {
        writeln!(out, "{t},{v}").unwrap();
    }
    out
}

fn summary(report: &Report) -> Value {
    json!({
        "state_count": report.state_count,
        "vertex_count": report.vertex_count,
        "lambda2": report.lambda2,
        "phi": report.phi.map(|p| p.to_string()),
        "phi_value": report.phi_value,
        "witness": report.witness,
        "relaxation": report.relaxation,
        "cheeger_ok": report.cheeger.holds,
        "cheeger_applicable": report.cheeger.applicable,
        "modified_cheeger_ok": report.modified_cheeger.as_ref().map(|r| r.holds),
        "dominance_ok": report.projection_dominance.holds,
        "r1": report.r1,
        "r2": report.r2,
        "bound": report.bound.value,
        "bound_clamped": report.bound.clamped,
        "bound_ok": report.bound_ok,
        "partition": report.partition,
    })
}

fn analyze(cli: &Cli, args: &AnalyzeArgs, full: bool, started: Instant) -> Result<u8, CliError> {
    let (bytes, jdm) = load_jdm(&args.jdm)?;
    let opts = Options {
        bfs_cap: args.cap,
        matrix_cap: args.matrix_cap,
        exact_cap: args.exact_cap,
        ..Options::default()
    };
    let pipeline = Pipeline::build(&jdm, &opts)?;
    let report = pipeline.report(&opts)?;
    let mut result = if full {
        let mut v = serde_json::to_value(&report).expect("report serializes");
        v["phi"] = json!(report.phi.map(|p| p.to_string()));
        v["all_hold"] = json!(report.all_hold());
        v
    } else {
        summary(&report)
    };
    if let Some(tv) = &args.tv {
        let curve = tv_curve(&pipeline, tv[0], tv[1])?;
        if let Some(out) = &args.out {
            write(out, &tv_csv(&curve))?;
        }
        result["tv"] = json!({
            "start": curve.start,
            "exact": curve.exact,
            "monotone": curve.monotone,
            "points": curve.points,
        });
    }
    let params = json!({
        "exact_cap": args.exact_cap,
        "cap": args.cap,
        "matrix_cap": args.matrix_cap,
        "tv": args.tv,
        "out": args.out.as_deref(),
    });
    let command = if full { "verify" } else { "analyze" };
    emit(cli, RunManifest::new(command, &bytes, params, result), started);
    Ok(if full && !report.all_hold() { EXIT_VIOLATION } else { 0 })
}
