//! Plain-text formats: word lists, alphabet JSON, and polyline CSV with a
//! JSON sidecar.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::quantize::Polyline;
use crate::scalar::Real;
use crate::word::{Alphabet, Token, TokenId, Word};

/// Alphabet on disk: labels in id order, inverse pairs by label, and one
/// row-major matrix per token when the alphabet has a realization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphabetFile {
    pub name: String,
    pub labels: Vec<String>,
    #[serde(default)]
    pub inverse_pairs: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Vec<Vec<f64>>>,
}

impl AlphabetFile {
    pub fn from_alphabet<T: Real>(a: &Alphabet<T>) -> Self {
        let inverse_pairs = a
            .tokens()
            .iter()
            .filter_map(|t| t.inverse.filter(|&i| i >= t.id).map(|i| (t.label.clone(), a.label(i).to_string())))
            .collect();
        let matrices = a
            .matrices()
            .map(|ms| ms.iter().map(|m| m.row_major().iter().map(|x| x.as_f64()).collect()).collect());
        Self {
            name: a.name().to_string(),
            labels: a.tokens().iter().map(|t| t.label.clone()).collect(),
            inverse_pairs,
            dim: a.has_realization().then(|| a.dim()),
            matrices,
        }
    }

    pub fn into_alphabet<T: Real>(self) -> Result<Alphabet<T>> {
        let index = |label: &str| {
            self.labels
                .iter()
                .position(|l| l == label)
                .map(|i| i as TokenId)
                .ok_or_else(|| Error::UnknownToken(label.to_string()))
        };
        let mut inverse: Vec<Option<TokenId>> = vec![None; self.labels.len()];
        for (a, b) in &self.inverse_pairs {
            let (i, j) = (index(a)?, index(b)?);
            for (x, y) in [(i, j), (j, i)] {
                if inverse[x as usize].is_some_and(|prev| prev != y) {
                    return Err(Error::InvalidParameter(format!("`{}` has two inverses", self.labels[x as usize])));
                }
                inverse[x as usize] = Some(y);
            }
        }
        let tokens = self
            .labels
            .iter()
            .zip(inverse)
            .enumerate()
            .map(|(i, (label, inverse))| Token {
                id: i as TokenId,
                inverse,
                label: label.clone(),
            })
            .collect();
        let alphabet = Alphabet::new(self.name.clone(), tokens)?;
        match (self.matrices, self.dim) {
            (None, _) => Ok(alphabet),
            (Some(_), None) => Err(Error::Parse("matrices given without `dim`".into())),
            (Some(ms), Some(dim)) => {
                let mats = ms
                    .into_iter()
                    .map(|entries| Matrix::from_row_major(dim, dim, entries.into_iter().map(T::lit).collect()))
                    .collect::<Result<Vec<_>>>()?;
                alphabet.with_realization(mats)
            }
        }
    }
}

pub fn alphabet_to_json<T: Real>(a: &Alphabet<T>) -> Result<String> {
    Ok(serde_json::to_string_pretty(&AlphabetFile::from_alphabet(a))?)
}

pub fn alphabet_from_json<T: Real>(text: &str) -> Result<Alphabet<T>> {
    serde_json::from_str::<AlphabetFile>(text)?.into_alphabet()
}

/// One word per line; an empty line is the empty word. Lines starting with
/// `#` are comments.
pub fn format_words<T: Real>(a: &Alphabet<T>, words: &[Word]) -> Result<String> {
    let mut out = String::new();
    for w in words {
        out.push_str(&a.format_word(w)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_words<T: Real>(a: &Alphabet<T>, text: &str) -> Result<Vec<Word>> {
    text.lines()
        .filter(|line| !line.starts_with('#'))
        .map(|line| a.parse_word(line))
        .collect()
}

/// CSV with header `t,x0,...`; `t` is the sample time, or the index when the
/// polyline carries no times.
pub fn polyline_to_csv<T: Real>(p: &Polyline<T>) -> String {
    let mut out = String::from("t");
    for i in 0..p.dim() {
        let _ = write!(out, ",x{i}");
    }
    out.push('\n');
    for (k, pt) in p.points().iter().enumerate() {
        match p.times() {
            Some(ts) => {
                let _ = write!(out, "{}", ts[k]);
            }
            None => {
                let _ = write!(out, "{k}");
            }
        }
        for x in pt {
            let _ = write!(out, ",{x}");
        }
        out.push('\n');
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolylineSidecar {
    pub closed: bool,
}

pub fn polyline_from_csv<T: Real>(csv: &str, sidecar: &PolylineSidecar) -> Result<Polyline<T>> {
    let mut lines = csv.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::Parse("empty polyline file".into()))?
        .split(',')
        .map(str::trim)
        .collect();
    let dim = header.len().saturating_sub(1);
    let coords_ok = header.iter().skip(1).enumerate().all(|(i, h)| *h == format!("x{i}"));
    if header.first() != Some(&"t") || dim == 0 || !coords_ok {
        return Err(Error::Parse(format!("bad polyline header `{}`", header.join(","))));
    }
    let mut times = Vec::new();
    let mut points = Vec::new();
    for (n, line) in lines.enumerate() {
        let values = line
            .split(',')
            .map(|s| s.trim().parse::<f64>().map(T::lit))
            .collect::<std::result::Result<Vec<T>, _>>()
            .map_err(|e| Error::Parse(format!("row {}: {e}", n + 1)))?;
        if values.len() != dim + 1 {
            return Err(Error::DimensionMismatch {
                expected: dim + 1,
                found: values.len(),
            });
        }
        times.push(values[0]);
        points.push(values[1..].to_vec());
    }
    if points.is_empty() {
        return Err(Error::InvalidParameter("polyline file has no samples".into()));
    }
    Polyline::new(points, sidecar.closed)?.with_times(times)
}

/// Sidecar path for a polyline CSV: same stem, `.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn write_polyline<T: Real>(csv: &Path, p: &Polyline<T>) -> Result<()> {
    fs::write(csv, polyline_to_csv(p))?;
    let sidecar = PolylineSidecar { closed: p.is_closed() };
    fs::write(sidecar_path(csv), serde_json::to_string_pretty(&sidecar)?)?;
    Ok(())
}

/// Reads a polyline; a missing sidecar means an open path.
pub fn read_polyline<T: Real>(csv: &Path) -> Result<Polyline<T>> {
    let text = fs::read_to_string(csv)?;
    let side = sidecar_path(csv);
    let sidecar = if side.exists() {
        serde_json::from_str(&fs::read_to_string(side)?)?
    } else {
        PolylineSidecar { closed: false }
    };
    polyline_from_csv(&text, &sidecar)
}
