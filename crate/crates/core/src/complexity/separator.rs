//! Unambiguous framing of two bit strings as one.
//!
//! Payloads are bit-stuffed (a `0` after every 15 consecutive `1`s), so a
//! run of 16 ones never occurs inside them. The separator is `0` followed by
//! sixteen `1`s.

use crate::bits::BitString;
use crate::error::{Error, Result};

pub const STUFF_RUN: usize = 15;
pub const SEPARATOR_LEN: usize = STUFF_RUN + 2;

pub fn escape(x: &BitString, out: &mut BitString) {
    let mut ones = 0;
    for b in x.iter() {
        out.push(b);
        if b {
            ones += 1;
            if ones == STUFF_RUN {
                out.push(false);
                ones = 0;
            }
        } else {
            ones = 0;
        }
    }
}

pub fn unescape(bits: &[bool]) -> Result<BitString> {
    let mut out = BitString::with_capacity(bits.len());
    let mut ones = 0;
    let mut it = bits.iter().copied();
    while let Some(b) = it.next() {
        out.push(b);
        if b {
            ones += 1;
            if ones == STUFF_RUN {
                match it.next() {
                    Some(false) => ones = 0,
                    Some(true) => return Err(Error::MalformedCode("unstuffed run of ones".into())),
                    None => return Err(Error::TruncatedCode),
                }
            }
        } else {
            ones = 0;
        }
    }
    Ok(out)
}

/// A framed pair together with the bits the framing added.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatedPair {
    pub x: BitString,
    pub y: BitString,
    pub encoded: BitString,
}

impl SeparatedPair {
    pub fn new(x: BitString, y: BitString) -> Self {
        let mut encoded = BitString::with_capacity(x.len() + y.len() + SEPARATOR_LEN + 8);
        escape(&x, &mut encoded);
        encoded.push(false);
        for _ in 0..=STUFF_RUN {
            encoded.push(true);
        }
        escape(&y, &mut encoded);
        Self { x, y, encoded }
    }

    /// Framing overhead: separator plus stuffing bits.
    pub fn sep_cost(&self) -> usize {
        self.encoded.len() - self.x.len() - self.y.len()
    }

    pub fn decode(encoded: &BitString) -> Result<Self> {
        let bits = encoded.as_slice();
        let run = STUFF_RUN + 1;
        let mut ones = 0;
        let mut start = None;
        for (i, &b) in bits.iter().enumerate() {
            ones = if b { ones + 1 } else { 0 };
            if ones == run {
                start = Some(i + 1 - run);
                break;
            }
        }
        let start = start.ok_or_else(|| Error::MalformedCode("separator not found".into()))?;
        if start == 0 || bits[start - 1] {
            return Err(Error::MalformedCode("separator lacks its leading zero".into()));
        }
        let x = unescape(&bits[..start - 1])?;
        let y = unescape(&bits[start + run..])?;
        Ok(Self {
            x,
            y,
            encoded: encoded.clone(),
        })
    }
}
