//! `kfilter`: quantize motions into words, estimate their complexity, classify
//! them against a memory budget, and emit the geometric showcases.

mod commands;
mod config;
mod pipeline;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use commands::Context;
use config::{Settings, SharedOpts};
use report::{CliError, Meta, Outputs};

#[derive(Parser, Debug)]
#[command(name = "kfilter", version, about = "Complexity filters for motion words")]
struct Cli {
    #[command(flatten)]
    shared: SharedOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ingest, quantize, perturb, estimate, classify and fit a spline in one run.
    Pipeline(pipeline::PipelineArgs),
    /// Quantize a polyline into an SO(3) word.
    Quantize(commands::QuantizeArgs),
    /// Substitute tokens in words or jitter a polyline.
    Perturb(commands::PerturbArgs),
    /// Compression estimate of every word in a file.
    Estimate(commands::EstimateArgs),
    /// Causal/reversible (or spin) verdicts against `--memory-bits`.
    Classify(commands::ClassifyArgs),
    /// Fit a B-spline and audit its tube and complexity.
    Spline(commands::SplineArgs),
    /// Relation and density probes for two G2 generators.
    #[command(name = "probe-g2")]
    ProbeG2(commands::ProbeArgs),
    /// Shortest tiny-VM programs for every binary word of one length.
    Oracle(commands::OracleArgs),
    /// Spherical-harmonic meshes and the orthonormality check.
    Harmonics(commands::HarmonicsArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Pipeline(_) => "pipeline",
            Command::Quantize(_) => "quantize",
            Command::Perturb(_) => "perturb",
            Command::Estimate(_) => "estimate",
            Command::Classify(_) => "classify",
            Command::Spline(_) => "spline",
            Command::ProbeG2(_) => "probe-g2",
            Command::Oracle(_) => "oracle",
            Command::Harmonics(_) => "harmonics",
        }
    }

    fn args(&self) -> Value {
        fn v(a: &impl Serialize) -> Value {
            serde_json::to_value(a).unwrap_or(Value::Null)
        }
        match self {
            Command::Pipeline(a) => v(a),
            Command::Quantize(a) => v(a),
            Command::Perturb(a) => v(a),
            Command::Estimate(a) => v(a),
            Command::Classify(a) => v(a),
            Command::Spline(a) => v(a),
            Command::ProbeG2(a) => v(a),
            Command::Oracle(a) => v(a),
            Command::Harmonics(a) => v(a),
        }
    }

    fn run(&self, ctx: &mut Context) -> Result<Value, CliError> {
        match self {
            Command::Pipeline(a) => pipeline::run(a, ctx),
            Command::Quantize(a) => commands::quantize(a, ctx),
            Command::Perturb(a) => commands::perturb(a, ctx),
            Command::Estimate(a) => commands::estimate(a, ctx),
            Command::Classify(a) => commands::classify(a, ctx),
            Command::Spline(a) => commands::spline(a, ctx),
            Command::ProbeG2(a) => commands::probe_g2(a, ctx),
            Command::Oracle(a) => commands::oracle(a, ctx),
            Command::Harmonics(a) => commands::harmonics(a, ctx),
        }
    }
}

fn fail(err: &CliError, report: Option<Value>) -> ExitCode {
    let body = report.unwrap_or_else(|| json!({ "error": err }));
    eprintln!("{}", serde_json::to_string(&body).unwrap_or_else(|_| err.to_string()));
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let env_out = std::env::var_os("KFILTER_OUT").map(PathBuf::from);
    let settings = match Settings::resolve(&cli.shared, env_out) {
        Ok(s) => s,
        Err(e) => return fail(&e, None),
    };
    if let Some(n) = settings.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail(&CliError::new("config", e.to_string()), None);
        }
    }
    let name = cli.command.name();
    let meta = Meta::new(name, &settings, &cli.command.args());
    let outputs = match Outputs::new(&settings.out) {
        Ok(o) => o,
        Err(e) => return fail(&e, Some(meta.failure(&e))),
    };
    let mut ctx = Context { settings, meta, outputs };
    let report_name = format!("{name}.json");
    match cli.command.run(&mut ctx) {
        Ok(result) => {
            let files: Vec<String> = ctx
                .outputs
                .written
                .iter()
                .filter_map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()))
                .collect();
            let mut report = ctx.meta.success(result);
            report["files"] = json!(files);
            match ctx.outputs.write_json(&report_name, &report) {
                Ok(path) => {
                    println!("{}", path.display());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e, Some(ctx.meta.failure(&e))),
            }
        }
        Err(e) => {
            let report = ctx.meta.failure(&e);
            let _ = ctx.outputs.write_json(&report_name, &report);
            fail(&e, Some(report))
        }
    }
}
