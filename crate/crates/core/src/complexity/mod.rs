//! Compression-based upper bounds on the description length of bit strings.
//!
//! Every estimator is a real compressor with a matching decoder, so the
//! reported size is the length of an actual lossless code.

pub mod dict;
pub mod lz78;
pub mod lzw;
pub mod separator;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::{delta_len, BitString};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::word::{Alphabet, Word};

pub use separator::SeparatedPair;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorId {
    Lz78,
    Lzw,
    DictCoder,
}

impl EstimatorId {
    pub const ALL: [EstimatorId; 3] = [EstimatorId::Lz78, EstimatorId::Lzw, EstimatorId::DictCoder];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorId::Lz78 => "lz78",
            EstimatorId::Lzw => "lzw",
            EstimatorId::DictCoder => "dict_coder",
        }
    }

    /// Bumped whenever the produced bit counts change.
    pub fn version(self) -> &'static str {
        match self {
            EstimatorId::Lz78 => "lz78/1",
            EstimatorId::Lzw => "lzw/1",
            EstimatorId::DictCoder => "dict_coder/1",
        }
    }

    /// Smallest `c` with `size(s) ≤ l + 2·log2 l + c` for every `l ≥ 16`,
    /// read off the stored fallback of each container.
    pub fn header_constant(self) -> f64 {
        match self {
            EstimatorId::Lz78 | EstimatorId::Lzw => 2.0,
            EstimatorId::DictCoder => 3.0,
        }
    }

    /// Lossless code for `input`.
    pub fn compress(self, input: &BitString) -> BitString {
        match self {
            EstimatorId::Lz78 => framed(input, lz78::encode),
            EstimatorId::Lzw => framed(input, lzw::encode),
            EstimatorId::DictCoder => {
                let mut out = BitString::new();
                dict::encode(input.as_slice(), &mut out);
                out
            }
        }
    }

    pub fn decompress(self, code: &BitString) -> Result<BitString> {
        let mut r = code.reader();
        let bits = match self {
            EstimatorId::Lz78 | EstimatorId::Lzw => {
                let compressed = r.read_bit()?;
                let len = r.read_delta()? as usize - 1;
                if !compressed {
                    r.take(len)?.to_vec()
                } else if self == EstimatorId::Lz78 {
                    lz78::decode(&mut r, len)?
                } else {
                    lzw::decode(&mut r, len)?
                }
            }
            EstimatorId::DictCoder => dict::decode(&mut r)?,
        };
        if r.remaining() != 0 {
            return Err(Error::MalformedCode(format!("{} trailing bits", r.remaining())));
        }
        Ok(BitString::from_bits(bits))
    }
}

/// `[mode][δ(len + 1)][payload]`, mode 1 for compressed and 0 for stored,
/// whichever is shorter.
fn framed(input: &BitString, encode: fn(&[bool], &mut BitString)) -> BitString {
    let mut packed = BitString::new();
    packed.push(true);
    packed.push_delta(input.len() as u64 + 1);
    encode(input.as_slice(), &mut packed);
    if packed.len() <= 1 + delta_len(input.len() as u64 + 1) + input.len() {
        return packed;
    }
    let mut stored = BitString::with_capacity(input.len() + 32);
    stored.push(false);
    stored.push_delta(input.len() as u64 + 1);
    stored.extend_from(input);
    stored
}

impl fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lz78" => Ok(EstimatorId::Lz78),
            "lzw" => Ok(EstimatorId::Lzw),
            "dict_coder" | "dict" => Ok(EstimatorId::DictCoder),
            other => Err(Error::UnknownEstimator(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexityEstimate {
    pub estimator: EstimatorId,
    pub bits: f64,
    pub input_len_bits: usize,
}

impl ComplexityEstimate {
    /// Compressed size over input size; 0 for empty input.
    pub fn ratio(&self) -> f64 {
        if self.input_len_bits == 0 {
            0.0
        } else {
            self.bits / self.input_len_bits as f64
        }
    }

    pub fn report(&self) -> EstimateReport {
        EstimateReport {
            estimator: self.estimator,
            estimator_version: self.estimator.version().to_string(),
            bits: self.bits,
            input_len_bits: self.input_len_bits,
            ratio: self.ratio(),
        }
    }
}

/// Serialized form of an estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimator: EstimatorId,
    pub estimator_version: String,
    pub bits: f64,
    pub input_len_bits: usize,
    pub ratio: f64,
}

pub fn estimate(s: &BitString, e: EstimatorId) -> ComplexityEstimate {
    ComplexityEstimate {
        estimator: e,
        bits: e.compress(s).len() as f64,
        input_len_bits: s.len(),
    }
}

/// Estimate of the self-delimiting code of `w`.
pub fn estimate_word<T: Real>(alphabet: &Alphabet<T>, w: &Word, e: EstimatorId) -> Result<ComplexityEstimate> {
    let code = alphabet.encode_self_delimiting(w)?;
    Ok(estimate(&code.bits, e))
}

pub fn joint(x: &BitString, y: &BitString, e: EstimatorId) -> f64 {
    estimate(&SeparatedPair::new(x.clone(), y.clone()).encoded, e).bits
}

/// `max(0, size(y ‖ sep ‖ x) − size(y))`: extra bits to describe `x` once
/// `y` is known.
pub fn conditional(x: &BitString, y: &BitString, e: EstimatorId) -> f64 {
    let pair = SeparatedPair::new(y.clone(), x.clone());
    (estimate(&pair.encoded, e).bits - estimate(y, e).bits).max(0.0)
}

/// `size(x) + size(y) − joint(x, y)`: shared information, near zero for
/// unrelated strings.
pub fn independence_defect(x: &BitString, y: &BitString, e: EstimatorId) -> f64 {
    estimate(x, e).bits + estimate(y, e).bits - joint(x, y, e)
}

/// `|size₁(x) − size₂(x)| / l(x)`; 0 for the empty string.
pub fn estimator_agreement(x: &BitString, first: EstimatorId, second: EstimatorId) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    (estimate(x, first).bits - estimate(x, second).bits).abs() / x.len() as f64
}
