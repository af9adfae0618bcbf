//! Memory-versus-complexity classifiers and complexity band filters.
//!
//! A robot with `m` bits of memory can retrace a motion whose fluctuated word
//! costs at most `m` bits. When the word costs at least `ρ·m` the motion is
//! causal (spinning, for loops); the band in between stays reversible but is
//! flagged marginal.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::complexity::{estimate_word, EstimatorId};
use crate::error::{Error, Result};
use crate::linalg::distance;
use crate::quantize::Quantizer;
use crate::scalar::Real;
use crate::word::{Alphabet, Word};

pub const DEFAULT_RHO: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub estimator: EstimatorId,
    /// How many times the memory a word must cost to count as far beyond it.
    pub rho: f64,
    pub memory_bits: f64,
}

impl FilterConfig {
    pub fn new(estimator: EstimatorId, rho: f64, memory_bits: f64) -> Result<Self> {
        if !rho.is_finite() || rho <= 1.0 {
            return Err(Error::InvalidParameter(format!("rho = {rho} must be a finite value above 1")));
        }
        if memory_bits.is_nan() || memory_bits < 0.0 {
            return Err(Error::InvalidParameter(format!("memory = {memory_bits} bits")));
        }
        Ok(Self {
            estimator,
            rho,
            memory_bits,
        })
    }

    pub fn with_memory(memory_bits: f64) -> Result<Self> {
        Self::new(EstimatorId::DictCoder, DEFAULT_RHO, memory_bits)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    Causal,
    Reversible,
    Spin,
    NoSpin,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterVerdict {
    pub kind: VerdictKind,
    pub estimate_bits: f64,
    pub memory_bits: f64,
    /// `estimate / memory`; absent when memory is zero.
    pub ratio: Option<f64>,
    /// Above the memory but below `ρ·memory`.
    pub marginal: bool,
}

impl FilterVerdict {
    fn from_estimate(estimate_bits: f64, cfg: &FilterConfig, looped: bool) -> Self {
        let m = cfg.memory_bits;
        let causal = estimate_bits >= cfg.rho * m;
        let kind = match (causal, looped) {
            (true, false) => VerdictKind::Causal,
            (false, false) => VerdictKind::Reversible,
            (true, true) => VerdictKind::Spin,
            (false, true) => VerdictKind::NoSpin,
        };
        Self {
            kind,
            estimate_bits,
            memory_bits: m,
            ratio: (m > 0.0).then(|| estimate_bits / m),
            marginal: !causal && estimate_bits > m,
        }
    }

    /// One JSON object tagged with `word_id`, no trailing newline.
    pub fn json_line(&self, word_id: &str) -> Result<String> {
        #[derive(Serialize)]
        struct Line<'a> {
            word_id: &'a str,
            #[serde(flatten)]
            verdict: &'a FilterVerdict,
        }
        Ok(serde_json::to_string(&Line { word_id, verdict: self })?)
    }
}

/// Writes `(word_id, verdict)` pairs as JSON lines.
pub fn write_verdicts<'a, W: Write>(
    out: &mut W,
    verdicts: impl IntoIterator<Item = (&'a str, &'a FilterVerdict)>,
) -> Result<()> {
    for (id, v) in verdicts {
        writeln!(out, "{}", v.json_line(id)?)?;
    }
    Ok(())
}

fn same_alphabet<T: Real>(alphabet: &Alphabet<T>, words: &[&Word]) -> Result<()> {
    for w in words {
        if w.alphabet_name() != alphabet.name() {
            return Err(Error::AlphabetMismatch {
                left: w.alphabet_name().to_string(),
                right: alphabet.name().to_string(),
            });
        }
    }
    Ok(())
}

/// Causal when the fluctuated word costs at least `ρ·m`, reversible otherwise.
pub fn classify_path<T: Real>(
    alphabet: &Alphabet<T>,
    word: &Word,
    fluctuated: &Word,
    cfg: &FilterConfig,
) -> Result<FilterVerdict> {
    same_alphabet(alphabet, &[word, fluctuated])?;
    let est = estimate_word(alphabet, fluctuated, cfg.estimator)?.bits;
    Ok(FilterVerdict::from_estimate(est, cfg, false))
}

/// Twice the largest distance a single token moves the anchor.
pub fn loop_tolerance<T: Real>(q: &Quantizer<T>) -> Result<T> {
    let a = q.anchor();
    let mats = q
        .alphabet()
        .matrices()
        .ok_or_else(|| Error::NoRealization(q.alphabet().name().to_string()))?;
    let step = mats
        .iter()
        .map(|m| distance(&m.mul_vec(a), a))
        .fold(T::zero(), T::max);
    Ok(step + step)
}

/// The path rule applied to a loop: spin when it would be causal. `lw` must
/// reconstruct to a closed curve within [`loop_tolerance`].
pub fn classify_loop<T: Real>(
    q: &Quantizer<T>,
    lw: &Word,
    fluctuated: &Word,
    cfg: &FilterConfig,
) -> Result<FilterVerdict> {
    let gap = q.reconstruct(lw)?.endpoint_gap();
    let tolerance = loop_tolerance(q)?;
    if gap > tolerance {
        return Err(Error::NotALoop {
            gap: gap.as_f64(),
            tolerance: tolerance.as_f64(),
        });
    }
    let v = classify_path(q.alphabet(), lw, fluctuated, cfg)?;
    Ok(FilterVerdict::from_estimate(v.estimate_bits, cfg, true))
}

/// `(high, low)`: words estimated at or above `threshold_bits`, and the rest,
/// each in input order.
pub fn partition<T: Real>(
    alphabet: &Alphabet<T>,
    words: &[Word],
    threshold_bits: f64,
    e: EstimatorId,
) -> Result<(Vec<Word>, Vec<Word>)> {
    let mut high = Vec::new();
    let mut low = Vec::new();
    for w in words {
        if estimate_word(alphabet, w, e)?.bits >= threshold_bits {
            high.push(w.clone());
        } else {
            low.push(w.clone());
        }
    }
    Ok((high, low))
}

pub fn highpass<T: Real>(alphabet: &Alphabet<T>, words: &[Word], threshold_bits: f64, e: EstimatorId) -> Result<Vec<Word>> {
    Ok(partition(alphabet, words, threshold_bits, e)?.0)
}

pub fn lowpass<T: Real>(alphabet: &Alphabet<T>, words: &[Word], threshold_bits: f64, e: EstimatorId) -> Result<Vec<Word>> {
    Ok(partition(alphabet, words, threshold_bits, e)?.1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MirrorRegime {
    /// Both directions fit in memory.
    Symmetric,
    /// Either direction is causal, or the directions differ by more than the memory.
    Broken,
    Marginal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MirrorReport {
    pub forward_bits: f64,
    pub reversed_bits: f64,
    pub gap_bits: f64,
    pub memory_bits: f64,
    pub regime: MirrorRegime,
}

/// Compares a word with its reversed inverse under the same memory.
pub fn mirror_report<T: Real>(alphabet: &Alphabet<T>, w: &Word, cfg: &FilterConfig) -> Result<MirrorReport> {
    let back = alphabet.reverse_inverse(w)?;
    let forward_bits = estimate_word(alphabet, w, cfg.estimator)?.bits;
    let reversed_bits = estimate_word(alphabet, &back, cfg.estimator)?.bits;
    let m = cfg.memory_bits;
    let gap_bits = (forward_bits - reversed_bits).abs();
    let regime = if forward_bits <= m && reversed_bits <= m {
        MirrorRegime::Symmetric
    } else if forward_bits.max(reversed_bits) >= cfg.rho * m || gap_bits > m {
        MirrorRegime::Broken
    } else {
        MirrorRegime::Marginal
    };
    Ok(MirrorReport {
        forward_bits,
        reversed_bits,
        gap_bits,
        memory_bits: m,
        regime,
    })
}
