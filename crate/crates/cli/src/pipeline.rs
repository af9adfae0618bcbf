use std::path::PathBuf;

use clap::Args;
use kfilter::complexity::{estimate_word, EstimateReport};
use kfilter::filters::{classify_loop, classify_path};
use kfilter::quantize::{loopword, perturb_path, perturb_word, so3_alphabet, so3_anchor};
use kfilter::{seed, spline, FilterConfig, FilterVerdict, NoiseSpec, Polyline64, Quantizer64, TubeReport};
use serde::Serialize;
use serde_json::Value;

use crate::commands::Context;
use crate::report::CliError;

pub const BUNDLED_STEPS: usize = 100;
pub const DEFAULT_SUBSTITUTION: f64 = 0.3;
pub const DEFAULT_JITTER: f64 = 0.05;

#[derive(Args, Clone, Debug, Serialize)]
pub struct PipelineArgs {
    /// Polyline CSV (`t,x0,x1,x2`); the bundled Rx^100 loop when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Quantization steps; one per input segment by default.
    #[arg(long)]
    pub n: Option<usize>,
    /// Coordinate jitter applied before the spline fit.
    #[arg(long, default_value_t = DEFAULT_JITTER)]
    pub jitter: f64,
}

#[derive(Serialize)]
struct Ingest {
    source: String,
    points: usize,
    dim: usize,
    closed: bool,
}

#[derive(Serialize)]
struct Quantized {
    n: usize,
    tokens: usize,
    word: String,
}

#[derive(Serialize)]
struct Perturbed {
    noise: NoiseSpec,
    substituted: usize,
    word: String,
}

#[derive(Serialize)]
struct Estimates {
    clean: EstimateReport,
    noisy: EstimateReport,
}

#[derive(Serialize)]
struct Verdicts {
    memory_bits: f64,
    /// `flag` or `geometric_mean` of the clean and noisy estimates.
    memory_source: &'static str,
    rho: f64,
    clean: FilterVerdict,
    noisy: FilterVerdict,
    clean_loop: Option<FilterVerdict>,
    noisy_loop: Option<FilterVerdict>,
}

#[derive(Serialize)]
struct SplineStage {
    jitter: NoiseSpec,
    degree: usize,
    n_ctrl: usize,
    tube: TubeReport,
}

#[derive(Serialize)]
struct PipelineReport {
    ingest: Ingest,
    quantize: Quantized,
    perturb: Perturbed,
    estimate: Estimates,
    classify: Verdicts,
    spline: SplineStage,
}

pub fn run(args: &PipelineArgs, ctx: &mut Context) -> Result<Value, CliError> {
    let s = ctx.settings.clone();
    let alphabet = so3_alphabet(s.theta).map_err(CliError::at("quantize"))?;
    let q = Quantizer64::new(alphabet.clone(), so3_anchor()).map_err(CliError::at("quantize"))?;

    let (path, source): (Polyline64, String) = match &args.input {
        Some(file) => (crate::commands::read_path(file)?, file.display().to_string()),
        None => {
            let lw = loopword(&alphabet, BUNDLED_STEPS).map_err(CliError::at("ingest"))?;
            (q.reconstruct(&lw).map_err(CliError::at("ingest"))?, format!("bundled Rx^{BUNDLED_STEPS} loop"))
        }
    };
    let ingest = Ingest {
        source,
        points: path.len(),
        dim: path.dim(),
        closed: path.is_closed(),
    };

    let n = args.n.unwrap_or(path.len().saturating_sub(1));
    let word = q.quantize(&path, n).map_err(CliError::at("quantize"))?;
    let quantize = Quantized {
        n,
        tokens: word.len(),
        word: alphabet.format_word(&word).map_err(CliError::at("quantize"))?,
    };

    let noise = NoiseSpec::substitution(s.sigma_or(DEFAULT_SUBSTITUTION), seed::derive(s.seed, "pipeline/perturb"))
        .map_err(CliError::at("perturb"))?;
    let noisy = perturb_word(&alphabet, &word, &noise).map_err(CliError::at("perturb"))?;
    let perturb = Perturbed {
        noise,
        substituted: word.tokens().iter().zip(noisy.tokens()).filter(|(a, b)| a != b).count(),
        word: alphabet.format_word(&noisy).map_err(CliError::at("perturb"))?,
    };

    let clean_est = estimate_word(&alphabet, &word, s.estimator).map_err(CliError::at("estimate"))?;
    let noisy_est = estimate_word(&alphabet, &noisy, s.estimator).map_err(CliError::at("estimate"))?;

    let (memory_bits, memory_source) = match s.memory_bits {
        Some(m) => (m, "flag"),
        None => ((clean_est.bits * noisy_est.bits).sqrt(), "geometric_mean"),
    };
    let cfg = FilterConfig::new(s.estimator, s.rho, memory_bits).map_err(CliError::at("classify"))?;
    let on_loop = |w| -> Result<Option<FilterVerdict>, CliError> {
        if !path.is_closed() {
            return Ok(None);
        }
        classify_loop(&q, &word, w, &cfg).map(Some).map_err(CliError::at("classify"))
    };
    let classify = Verdicts {
        memory_bits,
        memory_source,
        rho: s.rho,
        clean: classify_path(&alphabet, &word, &word, &cfg).map_err(CliError::at("classify"))?,
        noisy: classify_path(&alphabet, &word, &noisy, &cfg).map_err(CliError::at("classify"))?,
        clean_loop: on_loop(&word)?,
        noisy_loop: on_loop(&noisy)?,
    };

    let jitter = NoiseSpec::jitter(args.jitter, seed::derive(s.seed, "pipeline/jitter")).map_err(CliError::at("spline"))?;
    let jittered = perturb_path(&path, &jitter).map_err(CliError::at("spline"))?;
    let (_, tube) = spline::audit(&jittered, s.degree, s.ctrl, 4.0 * args.jitter, &q, s.estimator)
        .map_err(CliError::at("spline"))?;

    let report = PipelineReport {
        ingest,
        quantize,
        perturb,
        estimate: Estimates {
            clean: clean_est.report(),
            noisy: noisy_est.report(),
        },
        classify,
        spline: SplineStage {
            jitter,
            degree: s.degree,
            n_ctrl: s.ctrl,
            tube,
        },
    };
    serde_json::to_value(report).map_err(|e| CliError::new("output", e.to_string()))
}
