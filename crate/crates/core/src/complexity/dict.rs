//! Greedy sliding-dictionary coder over bits with an unbounded window.
//!
//! Ops are a literal run `δ(run) <raw bits>`, a copy
//! `<distance − 1 in ⌈log2 pos⌉ bits> δ(len)` that may overlap itself, or the
//! end of stream. Two literal runs never touch and nothing precedes the first
//! run, so the op tag depends on what came before:
//!
//! | after   | literal | copy | end  |
//! |---------|---------|------|------|
//! | start   | `0`     | n/a  | `1`  |
//! | literal | n/a     | `0`  | `1`  |
//! | copy    | `0`     | `10` | `11` |

use crate::bits::{bits_for, delta_len, BitReader, BitString};
use crate::error::{Error, Result};

const KEY_BITS: usize = 16;
const CHAIN_LIMIT: usize = 256;
const NEAR_WINDOW: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Op {
    Literal { start: usize, len: usize },
    Copy { distance: usize, len: usize },
}

/// Upper bound on a copy's size; one bit less right after a literal run.
fn copy_cost(pos: usize, len: usize) -> usize {
    2 + bits_for(pos as u64) as usize + delta_len(len as u64)
}

fn literal_cost(len: usize) -> usize {
    1 + delta_len(len as u64) + len
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Last {
    Start,
    Literal,
    Copy,
}

fn match_len(bits: &[bool], from: usize, pos: usize) -> usize {
    bits[pos..]
        .iter()
        .zip(&bits[from..])
        .take_while(|(a, b)| a == b)
        .count()
}

fn key(bits: &[bool], pos: usize) -> usize {
    bits[pos..pos + KEY_BITS]
        .iter()
        .fold(0usize, |k, &b| (k << 1) | b as usize)
}

struct Matcher {
    head: Vec<usize>,
    prev: Vec<usize>,
    inserted: usize,
}

const NONE: usize = usize::MAX;

impl Matcher {
    fn new(n: usize) -> Self {
        Self {
            head: vec![NONE; 1 << KEY_BITS],
            prev: vec![NONE; n],
            inserted: 0,
        }
    }

    fn advance(&mut self, bits: &[bool], upto: usize) {
        while self.inserted < upto {
            let p = self.inserted;
            if p + KEY_BITS <= bits.len() {
                let k = key(bits, p);
                self.prev[p] = self.head[k];
                self.head[k] = p;
            }
            self.inserted += 1;
        }
    }

    /// Longest earlier match at `pos`; ties keep the nearest source.
    fn longest(&self, bits: &[bool], pos: usize) -> (usize, usize) {
        let mut best = (0usize, 0usize);
        for d in 1..=NEAR_WINDOW.min(pos) {
            let l = match_len(bits, pos - d, pos);
            if l > best.1 {
                best = (d, l);
            }
        }
        if pos + KEY_BITS <= bits.len() && best.1 < bits.len() - pos {
            let mut cand = self.head[key(bits, pos)];
            let mut seen = 0;
            while cand != NONE && seen < CHAIN_LIMIT {
                let l = match_len(bits, cand, pos);
                if l > best.1 {
                    best = (pos - cand, l);
                }
                cand = self.prev[cand];
                seen += 1;
            }
        }
        best
    }
}

fn greedy_parse(bits: &[bool]) -> Vec<Op> {
    let n = bits.len();
    let mut ops = Vec::new();
    let mut matcher = Matcher::new(n);
    let mut pos = 0;
    let mut run_start = 0;
    while pos < n {
        matcher.advance(bits, pos);
        let (distance, len) = matcher.longest(bits, pos);
        let rest = n - pos - len;
        // a copy in mid-stream also pays for reopening a literal run after it
        let restart = if rest > 0 { 1 + delta_len(rest as u64) } else { 0 };
        if len > 0 && len > copy_cost(pos, len) + restart {
            if run_start < pos {
                ops.push(Op::Literal {
                    start: run_start,
                    len: pos - run_start,
                });
            }
            ops.push(Op::Copy { distance, len });
            pos += len;
            run_start = pos;
        } else {
            pos += 1;
        }
    }
    if run_start < n {
        ops.push(Op::Literal {
            start: run_start,
            len: n - run_start,
        });
    }
    ops
}

fn ops_cost(ops: &[Op]) -> usize {
    let mut pos = 0;
    let mut total = 0;
    let mut last = Last::Start;
    for op in ops {
        match *op {
            Op::Literal { len, .. } => {
                total += literal_cost(len);
                last = Last::Literal;
                pos += len;
            }
            Op::Copy { len, .. } => {
                total += copy_cost(pos, len) - (last == Last::Literal) as usize;
                last = Last::Copy;
                pos += len;
            }
        }
    }
    total + if last == Last::Copy { 2 } else { 1 }
}

/// Encodes `input`, keeping the greedy parse only when it beats one literal run.
pub fn encode(input: &[bool], out: &mut BitString) {
    let greedy = greedy_parse(input);
    let plain = if input.is_empty() {
        Vec::new()
    } else {
        vec![Op::Literal {
            start: 0,
            len: input.len(),
        }]
    };
    let ops = if ops_cost(&greedy) < ops_cost(&plain) {
        greedy
    } else {
        plain
    };
    let mut pos = 0;
    let mut last = Last::Start;
    for op in ops {
        match op {
            Op::Literal { start, len } => {
                out.push(false);
                out.push_delta(len as u64);
                out.extend_from_slice(&input[start..start + len]);
                last = Last::Literal;
                pos += len;
            }
            Op::Copy { distance, len } => {
                if last == Last::Copy {
                    out.push(true);
                }
                out.push(false);
                out.push_uint(distance as u64 - 1, bits_for(pos as u64));
                out.push_delta(len as u64);
                last = Last::Copy;
                pos += len;
            }
        }
    }
    if last == Last::Copy {
        out.push(true);
    }
    out.push(true);
}

fn read_op(r: &mut BitReader<'_>, last: Last) -> Result<Option<Last>> {
    Ok(match last {
        Last::Start => (!r.read_bit()?).then_some(Last::Literal),
        Last::Literal => (!r.read_bit()?).then_some(Last::Copy),
        Last::Copy => {
            if !r.read_bit()? {
                Some(Last::Literal)
            } else {
                (!r.read_bit()?).then_some(Last::Copy)
            }
        }
    })
}

pub fn decode(r: &mut BitReader<'_>) -> Result<Vec<bool>> {
    let mut out: Vec<bool> = Vec::new();
    let mut last = Last::Start;
    while let Some(op) = read_op(r, last)? {
        last = op;
        if op == Last::Literal {
            let len = r.read_delta()? as usize;
            out.extend_from_slice(r.take(len)?);
        } else {
            let pos = out.len();
            let distance = r.read_uint(bits_for(pos as u64))? as usize + 1;
            let len = r.read_delta()? as usize;
            if distance > pos {
                return Err(Error::MalformedCode(format!("copy distance {distance} before start")));
            }
            for i in 0..len {
                let b = out[pos - distance + i];
                out.push(b);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_is_end_marker_only() {
        let mut out = BitString::new();
        encode(&[], &mut out);
        assert_eq!(out.to_string(), "1");
        assert!(decode(&mut out.reader()).unwrap().is_empty());
    }

    #[test]
    fn long_run_becomes_overlapping_copy() {
        let bits = vec![true; 4000];
        let mut out = BitString::new();
        encode(&bits, &mut out);
        assert!(out.len() < 40, "{}", out.len());
        assert_eq!(decode(&mut out.reader()).unwrap(), bits);
    }

    #[test]
    fn far_repeat_found_through_chain() {
        let block: Vec<bool> = (0..700u32).map(|i| (i.wrapping_mul(2654435761) >> 13) & 1 == 1).collect();
        let mut bits = block.clone();
        bits.extend_from_slice(&block);
        let mut once = BitString::new();
        encode(&block, &mut once);
        let mut twice = BitString::new();
        encode(&bits, &mut twice);
        assert!(twice.len() < once.len() + 40);
        assert_eq!(decode(&mut twice.reader()).unwrap(), bits);
    }

    #[test]
    fn copy_pays_only_when_longer_than_its_cost() {
        assert_eq!(copy_cost(0, 1), 3);
        assert_eq!(copy_cost(1000, 100), 2 + 10 + delta_len(100));
        assert_eq!(literal_cost(16), 1 + 9 + 16);
    }
}
