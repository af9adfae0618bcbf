//! Bit strings and the universal integer codes used by every encoder.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An owned binary string, one `bool` per bit.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn with_capacity(n: usize) -> Self {
        Self(Vec::with_capacity(n))
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// Unpacks bytes most-significant bit first.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        let mut out = Self::with_capacity(bytes.len() * 8);
        for &b in bytes {
            out.push_uint(b as u64, 8);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<bool> {
        self.0
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.0.get(i).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn extend_from_slice(&mut self, bits: &[bool]) {
        self.0.extend_from_slice(bits);
    }

    /// Appends the low `width` bits of `value`, most significant first.
    pub fn push_uint(&mut self, value: u64, width: u32) {
        debug_assert!(width == 64 || value < (1u64 << width), "{value} does not fit {width} bits");
        for k in (0..width).rev() {
            self.0.push((value >> k) & 1 == 1);
        }
    }

    pub fn push_gamma(&mut self, n: u64) {
        write_gamma(self, n);
    }

    pub fn push_delta(&mut self, n: u64) {
        write_delta(self, n);
    }

    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader::new(&self.0)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("`{other}` is not a bit"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString)
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Sequential reader over a bit slice.
#[derive(Clone, Debug)]
pub struct BitReader<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a [bool]) -> Self {
        Self { bits, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        let b = *self.bits.get(self.pos).ok_or(Error::TruncatedCode)?;
        self.pos += 1;
        Ok(b)
    }

    pub fn read_uint(&mut self, width: u32) -> Result<u64> {
        if self.remaining() < width as usize {
            return Err(Error::TruncatedCode);
        }
        let mut v = 0u64;
        for _ in 0..width {
            v = (v << 1) | self.read_bit()? as u64;
        }
        Ok(v)
    }

    pub fn read_gamma(&mut self) -> Result<u64> {
        let mut zeros = 0u32;
        while !self.read_bit()? {
            zeros += 1;
            if zeros > 63 {
                return Err(Error::MalformedCode("gamma prefix too long".into()));
            }
        }
        let rest = self.read_uint(zeros)?;
        Ok((1u64 << zeros) | rest)
    }

    pub fn read_delta(&mut self) -> Result<u64> {
        let len = self.read_gamma()?;
        if len > 64 {
            return Err(Error::MalformedCode("delta length too large".into()));
        }
        let width = (len - 1) as u32;
        let rest = self.read_uint(width)?;
        Ok(if width == 64 { rest } else { (1u64 << width) | rest })
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [bool]> {
        if self.remaining() < n {
            return Err(Error::TruncatedCode);
        }
        let s = &self.bits[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
}

/// `⌈log2 n⌉`, with `bits_for(0) = bits_for(1) = 0`: the fixed width needed
/// to address `n` distinct values.
pub fn bits_for(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

fn bit_length(n: u64) -> u32 {
    64 - n.leading_zeros()
}

/// Elias-gamma code of `n ≥ 1`.
pub fn write_gamma(out: &mut BitString, n: u64) {
    assert!(n >= 1, "gamma code needs n >= 1");
    let len = bit_length(n);
    for _ in 1..len {
        out.push(false);
    }
    out.push_uint(n, len);
}

pub fn gamma_len(n: u64) -> usize {
    assert!(n >= 1);
    2 * bit_length(n) as usize - 1
}

/// Elias-delta code of `n ≥ 1`.
pub fn write_delta(out: &mut BitString, n: u64) {
    assert!(n >= 1, "delta code needs n >= 1");
    let len = bit_length(n);
    write_gamma(out, len as u64);
    out.push_uint(n & !(1u64 << (len - 1)), len - 1);
}

pub fn delta_len(n: u64) -> usize {
    assert!(n >= 1);
    let len = bit_length(n) as u64;
    gamma_len(len) + len as usize - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gamma_known_codes() {
        let mut b = BitString::new();
        b.push_gamma(1);
        assert_eq!(b.to_string(), "1");
        let mut b = BitString::new();
        b.push_gamma(5);
        assert_eq!(b.to_string(), "00101");
        let mut b = BitString::new();
        b.push_gamma(101);
        assert_eq!(b.len(), 13);
    }

    #[test]
    fn delta_known_codes() {
        let mut b = BitString::new();
        b.push_delta(1);
        assert_eq!(b.to_string(), "1");
        let mut b = BitString::new();
        b.push_delta(10);
        // len(10) = 4 -> gamma(4) = 00100, then 010
        assert_eq!(b.to_string(), "00100010");
        assert_eq!(delta_len(65536), 25);
    }

    #[test]
    fn width_helper() {
        assert_eq!(bits_for(1), 0);
        assert_eq!(bits_for(2), 1);
        assert_eq!(bits_for(6), 3);
        assert_eq!(bits_for(8), 3);
        assert_eq!(bits_for(9), 4);
        assert_eq!(bits_for(65536), 16);
    }

    #[test]
    fn reader_reports_truncation() {
        let b: BitString = "0001".parse().unwrap();
        assert_eq!(b.reader().read_gamma(), Err(Error::TruncatedCode));
    }

    proptest! {
        #[test]
        fn gamma_delta_roundtrip(vals in prop::collection::vec(1u64..u64::MAX, 0..20)) {
            let mut b = BitString::new();
            for &v in &vals {
                b.push_gamma(v);
                b.push_delta(v);
            }
            let mut r = b.reader();
            for &v in &vals {
                prop_assert_eq!(r.read_gamma().unwrap(), v);
                prop_assert_eq!(r.read_delta().unwrap(), v);
            }
            prop_assert_eq!(r.remaining(), 0);
            let expected: usize = vals.iter().map(|&v| gamma_len(v) + delta_len(v)).sum();
            prop_assert_eq!(b.len(), expected);
        }
    }
}
