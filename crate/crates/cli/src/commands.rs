use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use kfilter::complexity::{estimate_word, EstimateReport};
use kfilter::filters::{classify_loop, classify_path};
use kfilter::g2::{default_x1, default_y1, g2_alphabet, probe_density, probe_freeness, random_automorphism, FreenessReport};
use kfilter::harmonics::{harmonic_csv, mesh_harmonic, nodal_counts, orthonormality_matrix, parse_obj, NodalCount, SHOWCASE};
use kfilter::io::{alphabet_from_json, format_words, parse_words, polyline_from_csv, polyline_to_csv, sidecar_path, PolylineSidecar};
use kfilter::quantize::{perturb_path, perturb_word, so3_alphabet, so3_anchor};
use kfilter::robot::{execute, shortest_program};
use kfilter::spline::{complexity_reduction, fit_bspline, jittered_loop, tube_check};
use kfilter::{seed, Alphabet64, FilterConfig, HarmonicSpec, Matrix64, NoiseSpec, Polyline64, Quantizer64, Token, TubeReport, Word};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Settings;
use crate::pipeline::{BUNDLED_STEPS, DEFAULT_JITTER, DEFAULT_SUBSTITUTION};
use crate::report::{CliError, Meta, Outputs};

pub struct Context {
    pub settings: Settings,
    pub meta: Meta,
    pub outputs: Outputs,
}

fn to_value(v: impl Serialize) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::new("output", e.to_string()))
}

fn read_text(file: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(file).map_err(|e| CliError::new("ingest", format!("{}: {e}", file.display())))
}

/// Polyline CSV plus its optional `.json` sidecar.
pub fn read_path(file: &Path) -> Result<Polyline64, CliError> {
    let text = read_text(file)?;
    let side = sidecar_path(file);
    let sidecar = if side.exists() {
        serde_json::from_str(&read_text(&side)?).map_err(|e| CliError::new("ingest", format!("{}: {e}", side.display())))?
    } else {
        PolylineSidecar { closed: false }
    };
    polyline_from_csv(&text, &sidecar).map_err(|e| CliError::new("ingest", format!("{}: {e}", file.display())))
}

fn so3(settings: &Settings) -> Result<Quantizer64, CliError> {
    let a = so3_alphabet(settings.theta).map_err(CliError::at("config"))?;
    Quantizer64::new(a, so3_anchor()).map_err(CliError::at("config"))
}

fn alphabet_for(file: Option<&Path>, settings: &Settings) -> Result<Alphabet64, CliError> {
    match file {
        Some(f) => alphabet_from_json(&read_text(f)?).map_err(CliError::at("ingest")),
        None => Ok(so3(settings)?.alphabet().clone()),
    }
}

fn read_words(file: &Path, a: &Alphabet64) -> Result<Vec<Word>, CliError> {
    parse_words(a, &read_text(file)?).map_err(|e| CliError::new("ingest", format!("{}: {e}", file.display())))
}

impl Context {
    fn write_words(&mut self, name: &str, a: &Alphabet64, words: &[Word]) -> Result<(), CliError> {
        let body = format_words(a, words).map_err(CliError::at("output"))?;
        self.outputs.write(name, &(self.meta.comment("#") + &body))?;
        Ok(())
    }

    /// Polyline CSV with a comment header and a sidecar carrying the closed flag.
    fn write_path(&mut self, name: &str, p: &Polyline64) -> Result<(), CliError> {
        let csv = self.meta.comment("#") + &polyline_to_csv(p);
        let path = self.outputs.write(name, &csv)?;
        let sidecar = json!({ "closed": p.is_closed(), "meta": self.meta });
        let side_name = sidecar_path(&path);
        let side_name = side_name.file_name().and_then(|s| s.to_str()).unwrap_or("sidecar.json").to_string();
        self.outputs.write_json(&side_name, &sidecar)?;
        Ok(())
    }
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct QuantizeArgs {
    /// Polyline CSV (`t,x0,x1,x2`).
    #[arg(long)]
    pub input: PathBuf,
    /// Quantization steps; one per input segment by default.
    #[arg(long)]
    pub n: Option<usize>,
}

pub fn quantize(args: &QuantizeArgs, ctx: &mut Context) -> Result<Value, CliError> {
    let q = so3(&ctx.settings)?;
    let path = read_path(&args.input)?;
    let n = args.n.unwrap_or(path.len().saturating_sub(1));
    let word = q.quantize(&path, n).map_err(CliError::at("quantize"))?;
    let back = q.reconstruct(&word).map_err(CliError::at("quantize"))?;
    ctx.write_words("quantize.words", q.alphabet(), std::slice::from_ref(&word))?;
    Ok(json!({
        "points": path.len(),
        "closed": path.is_closed(),
        "n": n,
        "tokens": word.len(),
        "reconstruction_gap": back.endpoint_gap(),
        "words_file": "quantize.words",
    }))
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct PerturbArgs {
    /// Word file; each line gets token substitution with probability `--sigma`.
    #[arg(long, required_unless_present = "path", conflicts_with = "path")]
    pub words: Option<PathBuf>,
    /// Polyline CSV; each coordinate gets Gaussian jitter with std `--sigma`.
    #[arg(long)]
    pub path: Option<PathBuf>,
    /// Alphabet JSON for `--words`; the SO(3) alphabet by default.
    #[arg(long)]
    pub alphabet: Option<PathBuf>,
}

pub fn perturb(args: &PerturbArgs, ctx: &mut Context) -> Result<Value, CliError> {
    let s = ctx.settings.clone();
    if let Some(file) = &args.words {
        let a = alphabet_for(args.alphabet.as_deref(), &s)?;
        let words = read_words(file, &a)?;
        let amplitude = s.sigma_or(DEFAULT_SUBSTITUTION);
        let noisy = words
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let noise = NoiseSpec::substitution(amplitude, seed::derive_indexed(s.seed, "perturb/word", i as u64))?;
                perturb_word(&a, w, &noise)
            })
            .collect::<kfilter::Result<Vec<_>>>()
            .map_err(CliError::at("perturb"))?;
        ctx.write_words("perturbed.words", &a, &noisy)?;
        return Ok(json!({
            "model": "token_substitution",
            "amplitude": amplitude,
            "words": noisy.len(),
            "words_file": "perturbed.words",
        }));
    }
    let file = args.path.as_ref().ok_or_else(|| CliError::new("config", "give --words or --path"))?;
    let path = read_path(file)?;
    let noise = NoiseSpec::jitter(s.sigma_or(DEFAULT_JITTER), seed::derive(s.seed, "perturb/path"))
        .map_err(CliError::at("perturb"))?;
    let noisy = perturb_path(&path, &noise).map_err(CliError::at("perturb"))?;
    ctx.write_path("perturbed.csv", &noisy)?;
    Ok(json!({
        "noise": noise,
        "points": noisy.len(),
        "path_file": "perturbed.csv",
    }))
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct EstimateArgs {
    #[arg(long)]
    pub words: PathBuf,
    /// Alphabet JSON; the SO(3) alphabet by default.
    #[arg(long)]
    pub alphabet: Option<PathBuf>,
}

#[derive(Serialize)]
struct WordEstimate {
    index: usize,
    tokens: usize,
    #[serde(flatten)]
    estimate: EstimateReport,
}

pub fn estimate(args: &EstimateArgs, ctx: &mut Context) -> Result<Value, CliError> {
    let s = &ctx.settings;
    let a = alphabet_for(args.alphabet.as_deref(), s)?;
    let words = read_words(&args.words, &a)?;
    let estimates = words
        .par_iter()
        .enumerate()
        .map(|(index, w)| {
            estimate_word(&a, w, s.estimator).map(|e| WordEstimate {
                index,
                tokens: w.len(),
                estimate: e.report(),
            })
        })
        .collect::<kfilter::Result<Vec<_>>>()
        .map_err(CliError::at("estimate"))?;
    let total: f64 = estimates.iter().map(|e| e.estimate.bits).sum();
    to_value(json!({ "words": estimates.len(), "total_bits": total, "estimates": estimates }))
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct ClassifyArgs {
    /// Word file; every line is classified as a fluctuated motion word.
    #[arg(long)]
    pub words: PathBuf,
    /// Alphabet JSON; the SO(3) alphabet by default.
    #[arg(long)]
    pub alphabet: Option<PathBuf>,
    /// Treat every word as a loop and report spin verdicts (SO(3) only).
    #[arg(long)]
    pub loops: bool,
}

pub fn classify(args: &ClassifyArgs, ctx: &mut Context) -> Result<Value, CliError> {
    let s = ctx.settings.clone();
    let memory = s.memory_bits.ok_or_else(|| CliError::new("config", "classify needs --memory-bits"))?;
    let cfg = FilterConfig::new(s.estimator, s.rho, memory).map_err(CliError::at("config"))?;
    let verdicts = if args.loops {
        if args.alphabet.is_some() {
            return Err(CliError::new("config", "--loops works on the SO(3) alphabet only"));
        }
        let q = so3(&s)?;
        let words = read_words(&args.words, q.alphabet())?;
        words
            .par_iter()
            .map(|w| classify_loop(&q, w, w, &cfg))
            .collect::<kfilter::Result<Vec<_>>>()
    } else {
        let a = alphabet_for(args.alphabet.as_deref(), &s)?;
        let words = read_words(&args.words, &a)?;
        words
            .par_iter()
            .map(|w| classify_path(&a, w, w, &cfg))
            .collect::<kfilter::Result<Vec<_>>>()
    }
    .map_err(CliError::at("classify"))?;

    let mut lines = serde_json::to_string(&json!({ "meta": ctx.meta })).map_err(|e| CliError::new("output", e.to_string()))?;
    lines.push('\n');
    for (i, v) in verdicts.iter().enumerate() {
        lines.push_str(&v.json_line(&format!("w{i}")).map_err(CliError::at("output"))?);
        lines.push('\n');
    }
    ctx.outputs.write("classify.jsonl", &lines)?;

    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for v in &verdicts {
        *counts.entry(to_value(v.kind)?.as_str().unwrap_or_default().to_string()).or_default() += 1;
    }
    Ok(json!({
        "config": cfg,
        "words": verdicts.len(),
        "counts": counts,
        "marginal": verdicts.iter().filter(|v| v.marginal).count(),
        "verdicts_file": "classify.jsonl",
    }))
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct SplineArgs {
    /// Polyline CSV to fit; the jittered Rx^100 loop (std `--sigma`) when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Tube radius; four times `--sigma` by default.
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Serialize)]
struct SplineResult {
    source: String,
    points: usize,
    degree: usize,
    n_ctrl: usize,
    tube: TubeReport,
    curve_file: &'static str,
    samples_file: &'static str,
}

pub fn spline(args: &SplineArgs, ctx: &mut Context) -> Result<Value, CliError> {
    let s = ctx.settings.clone();
    let q = so3(&s)?;
    let sigma = s.sigma_or(DEFAULT_JITTER);
    let (path, source) = match &args.input {
        Some(file) => (read_path(file)?, file.display().to_string()),
        None => {
            let p = jittered_loop(&q, BUNDLED_STEPS, sigma, seed::derive(s.seed, "spline/jitter"))
                .map_err(CliError::at("ingest"))?;
            (p, format!("jittered Rx^{BUNDLED_STEPS} loop"))
        }
    };
    let epsilon = args.epsilon.unwrap_or(4.0 * sigma);
    let curve = fit_bspline(&path, s.degree, s.ctrl).map_err(CliError::at("fit"))?;
    let mut tube = tube_check(&curve, &path, epsilon).map_err(CliError::at("tube"))?;
    if path.dim() == q.dim() {
        let reduction = complexity_reduction(&path, &curve, &q, s.estimator).map_err(CliError::at("estimate"))?;
        tube = tube.with_complexity(&reduction);
    }

    let mut curve_json = to_value(&curve)?;
    if let Value::Object(map) = &mut curve_json {
        map.insert("meta".into(), to_value(&ctx.meta)?);
    }
    ctx.outputs.write_json("spline_curve.json", &curve_json)?;
    let samples = curve.sample(path.len().max(2)).map_err(CliError::at("fit"))?;
    ctx.write_path("spline_samples.csv", &samples)?;

    to_value(SplineResult {
        source,
        points: path.len(),
        degree: s.degree,
        n_ctrl: s.ctrl,
        tube,
        curve_file: "spline_curve.json",
        samples_file: "spline_samples.csv",
    })
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct ProbeArgs {
    /// Angle of the first generator; an irrational multiple of π by default.
    #[arg(long, allow_hyphen_values = true)]
    pub x1: Option<f64>,
    /// Angle of the second generator.
    #[arg(long, allow_hyphen_values = true)]
    pub y1: Option<f64>,
    /// Longest reduced word checked for relations.
    #[arg(long, default_value_t = 8)]
    pub max_len: usize,
    /// Distance to the identity that counts as a relation.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Longest word used to approach the density targets.
    #[arg(long, default_value_t = 12)]
    pub density_len: usize,
    /// Random automorphisms to approach.
    #[arg(long, default_value_t = 10)]
    pub targets: usize,
}

#[derive(Serialize)]
struct ProbeResult {
    x1: f64,
    y1: f64,
    freeness: FreenessReport,
    relation_found: bool,
    /// Median over targets of the closest approach, by word length.
    density_medians: Vec<f64>,
    density_distances: Vec<Vec<f64>>,
}

pub fn probe_g2(args: &ProbeArgs, ctx: &mut Context) -> Result<Value, CliError> {
    let x1 = args.x1.unwrap_or_else(default_x1);
    let y1 = args.y1.unwrap_or_else(default_y1);
    let a = g2_alphabet(x1, y1).map_err(CliError::at("config"))?;
    let freeness = probe_freeness(&a, args.max_len, args.tol).map_err(CliError::at("freeness"))?;
    let mut rng = seed::rng(seed::derive(ctx.settings.seed, "probe-g2/targets"));
    let targets: Vec<_> = (0..args.targets).map(|_| random_automorphism::<f64>(&mut rng)).collect();
    let density = probe_density(&a, &targets, args.density_len).map_err(CliError::at("density"))?;
    let density_medians = if targets.is_empty() {
        Vec::new()
    } else {
        (1..=density.max_len).map(|l| density.median_at(l)).collect()
    };
    to_value(ProbeResult {
        x1,
        y1,
        relation_found: !freeness.no_relation_found(),
        freeness,
        density_medians,
        density_distances: density.distances,
    })
}

pub const MAX_ORACLE_LENGTH: usize = 12;

#[derive(Args, Clone, Debug, Serialize)]
pub struct OracleArgs {
    /// Length of the binary words to search, all 2^length of them.
    #[arg(long, default_value_t = 6)]
    pub length: usize,
    /// Longest program considered, in bits.
    #[arg(long, default_value_t = kfilter::robot::oracle::MAX_SEARCH_BITS)]
    pub max_bits: usize,
}

#[derive(Serialize)]
struct OracleRow {
    word: String,
    shortest_bits: Option<usize>,
    program: Option<String>,
    programs_searched: u64,
    rerun_ok: bool,
}

fn binary_alphabet() -> Alphabet64 {
    let tokens = ["0", "1"]
        .iter()
        .enumerate()
        .map(|(id, label)| Token {
            id: id as u16,
            inverse: None,
            label: label.to_string(),
        })
        .collect();
    Alphabet64::new("binary", tokens).expect("two distinct labels")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn oracle(args: &OracleArgs, ctx: &mut Context) -> Result<Value, CliError> {
    if args.length > MAX_ORACLE_LENGTH {
        return Err(CliError::new("config", format!("--length {} above {MAX_ORACLE_LENGTH}", args.length)));
    }
    let a = binary_alphabet();
    let len = args.length;
    let rows = (0..1u64 << len)
        .into_par_iter()
        .map(|k| {
            let tokens: Vec<u16> = (0..len).rev().map(|b| ((k >> b) & 1) as u16).collect();
            let w = a.word(tokens)?;
            let outcome = shortest_program(&a, &w, args.max_bits)?;
            let text: String = w.tokens().iter().map(|&t| a.label(t)).collect();
            Ok(match outcome.found() {
                Some(r) => OracleRow {
                    word: text,
                    shortest_bits: Some(r.shortest_bits),
                    program: Some(r.program.to_text(&a).split_whitespace().collect::<Vec<_>>().join(" ")),
                    programs_searched: r.programs_searched,
                    rerun_ok: execute(&r.program, len + 1) == w.tokens(),
                },
                None => OracleRow {
                    word: text,
                    shortest_bits: None,
                    program: None,
                    programs_searched: match outcome {
                        kfilter::OracleOutcome::NotFound { programs_searched, .. } => programs_searched,
                        kfilter::OracleOutcome::Found(_) => 0,
                    },
                    rerun_ok: false,
                },
            })
        })
        .collect::<kfilter::Result<Vec<_>>>()
        .map_err(CliError::at("oracle"))?;

    let mut csv = ctx.meta.comment("#");
    csv.push_str("word,shortest_bits,program,programs_searched,rerun_ok\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            r.word,
            r.shortest_bits.map(|b| b.to_string()).unwrap_or_default(),
            csv_field(r.program.as_deref().unwrap_or_default()),
            r.programs_searched,
            r.rerun_ok
        ));
    }
    ctx.outputs.write("oracle.csv", &csv)?;
    Ok(json!({
        "length": len,
        "rows": rows.len(),
        "all_rerun_ok": rows.iter().all(|r| r.rerun_ok),
        "max_shortest_bits": rows.iter().filter_map(|r| r.shortest_bits).max(),
        "programs_searched": rows.iter().map(|r| r.programs_searched).sum::<u64>(),
        "table_file": "oracle.csv",
        "table": rows,
    }))
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct HarmonicsArgs {
    /// Degree of a single harmonic to mesh; the five showcase pairs when absent.
    #[arg(long)]
    pub l: Option<usize>,
    /// Order for `--l`.
    #[arg(long, allow_hyphen_values = true, requires = "l", default_value_t = 0)]
    pub m: i64,
    #[arg(long, default_value_t = kfilter::harmonics::DEFAULT_RESOLUTION.0)]
    pub theta_steps: usize,
    #[arg(long, default_value_t = kfilter::harmonics::DEFAULT_RESOLUTION.1)]
    pub phi_steps: usize,
    /// Highest degree in the orthonormality check.
    #[arg(long, default_value_t = 7)]
    pub gram_degree: usize,
}

#[derive(Serialize)]
struct MeshResult {
    l: usize,
    m: i64,
    obj_file: String,
    csv_file: String,
    vertices: usize,
    triangles: usize,
    parse_ok: bool,
    nodal: NodalCount,
}

pub fn harmonics(args: &HarmonicsArgs, ctx: &mut Context) -> Result<Value, CliError> {
    let pairs: Vec<(usize, i64)> = match args.l {
        Some(l) => vec![(l, args.m)],
        None => SHOWCASE.to_vec(),
    };
    let mut meshes = Vec::new();
    for (l, m) in pairs {
        let spec = HarmonicSpec::new(l, m, args.theta_steps, args.phi_steps).map_err(CliError::at("config"))?;
        let mesh = mesh_harmonic::<f64>(&spec).map_err(CliError::at("mesh"))?;
        let obj = ctx.meta.comment("#") + &mesh.to_obj(&spec);
        let parse_ok = parse_obj(&obj)
            .map(|(v, f)| v.len() == mesh.vertices.len() && f.len() == mesh.triangles.len())
            .unwrap_or(false);
        let stem = spec.file_stem();
        let obj_file = format!("{stem}.obj");
        let csv_file = format!("{stem}.csv");
        ctx.outputs.write(&obj_file, &obj)?;
        let csv = harmonic_csv(&spec).map_err(CliError::at("mesh"))?;
        ctx.outputs.write(&csv_file, &(ctx.meta.comment("#") + &csv))?;
        meshes.push(MeshResult {
            l,
            m,
            obj_file,
            csv_file,
            vertices: mesh.vertices.len(),
            triangles: mesh.triangles.len(),
            parse_ok,
            nodal: nodal_counts(&spec, &mesh).map_err(CliError::at("mesh"))?,
        });
    }
    let gram: Matrix64 = orthonormality_matrix(args.gram_degree).map_err(CliError::at("gram"))?;
    let identity = Matrix64::identity(gram.rows());
    let deviation = gram.max_abs_diff(&identity);
    to_value(json!({
        "meshes": meshes,
        "gram": {
            "l_max": args.gram_degree,
            "size": gram.rows(),
            "max_deviation": deviation,
        },
    }))
}
