//! Exact shortest-program search for the emit/repeat machine.
//!
//! Programs are enumerated by total bit length, and within a length in
//! lexicographic bit order, so the first hit is the minimal program with the
//! smallest encoding. Partial programs whose output stops being a prefix of
//! the target are cut off.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::program::{Instruction, TinyProgram, COUNT_BITS, MAX_DEPTH, MIN_COUNT, OPCODE_BITS};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::word::{Alphabet, TokenId, Word};

/// Largest accepted search bound.
pub const MAX_SEARCH_BITS: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub word: Word,
    pub shortest_bits: usize,
    pub program: TinyProgram,
    /// Partial programs visited, summed over every length tried.
    pub programs_searched: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OracleOutcome {
    Found(OracleResult),
    NotFound { max_bits: usize, programs_searched: u64 },
}

impl OracleOutcome {
    pub fn found(&self) -> Option<&OracleResult> {
        match self {
            OracleOutcome::Found(r) => Some(r),
            OracleOutcome::NotFound { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    Emit(TokenId),
    Open(u8),
    Close,
}

struct Search<'a> {
    target: &'a [TokenId],
    size: usize,
    emit_bits: usize,
    out: Vec<TokenId>,
    // (count, output position where the body starts)
    frames: Vec<(usize, usize)>,
    steps: Vec<Step>,
    nodes: u64,
}

impl<'a> Search<'a> {
    fn new(target: &'a [TokenId], size: usize) -> Self {
        Self {
            target,
            size,
            emit_bits: OPCODE_BITS + crate::bits::bits_for(size as u64) as usize,
            out: Vec::with_capacity(target.len()),
            frames: Vec::with_capacity(MAX_DEPTH),
            steps: Vec::new(),
            nodes: 0,
        }
    }

    /// Output length once every open body is closed with what it has now.
    fn projected(&self, len: usize) -> usize {
        self.frames
            .iter()
            .rev()
            .fold(len, |len, &(count, start)| start + count * (len - start))
    }

    fn closing_bits(&self) -> usize {
        OPCODE_BITS * (self.frames.len() + 1)
    }

    fn dfs(&mut self, rem: usize) -> bool {
        self.nodes += 1;
        for t in 0..self.size as TokenId {
            if self.apply(Step::Emit(t), rem) == Some(true) {
                return true;
            }
        }
        for count in MIN_COUNT..=u8::MAX {
            match self.apply(Step::Open(count), rem) {
                Some(true) => return true,
                Some(false) => {}
                // larger counts only lengthen the output
                None => break,
            }
        }
        self.apply(Step::Close, rem) == Some(true)
    }

    /// `Some(found)` after exploring `step`; `None` when `step` is not allowed here.
    fn apply(&mut self, step: Step, rem: usize) -> Option<bool> {
        match step {
            Step::Emit(t) => {
                let pos = self.out.len();
                if rem < self.emit_bits + self.closing_bits() || self.target.get(pos) != Some(&t) {
                    return None;
                }
                if self.projected(pos + 1) > self.target.len() {
                    return None;
                }
                self.out.push(t);
                self.steps.push(step);
                if self.dfs(rem - self.emit_bits) {
                    return Some(true);
                }
                self.out.pop();
                self.steps.pop();
                Some(false)
            }
            Step::Open(count) => {
                let cost = OPCODE_BITS + COUNT_BITS;
                if self.frames.len() >= MAX_DEPTH
                    || rem < cost + self.emit_bits + self.closing_bits() + OPCODE_BITS
                {
                    return None;
                }
                let start = self.out.len();
                self.frames.push((count as usize, start));
                if self.projected(start + 1) > self.target.len() {
                    self.frames.pop();
                    return None;
                }
                self.steps.push(step);
                if self.dfs(rem - cost) {
                    return Some(true);
                }
                self.frames.pop();
                self.steps.pop();
                Some(false)
            }
            Step::Close => match self.frames.last().copied() {
                None => {
                    if rem == OPCODE_BITS && self.out.len() == self.target.len() {
                        self.nodes += 1;
                        self.steps.push(step);
                        return Some(true);
                    }
                    None
                }
                Some((count, start)) => {
                    let body = self.out.len() - start;
                    let end = start + count * body;
                    if body == 0 || rem < self.closing_bits() || end > self.target.len() {
                        return None;
                    }
                    let repeats = (1..count).all(|i| {
                        self.target[start + i * body..start + (i + 1) * body] == self.target[start..start + body]
                    });
                    if !repeats {
                        return None;
                    }
                    self.out.extend_from_slice(&self.target[start + body..end]);
                    self.frames.pop();
                    self.steps.push(step);
                    if self.dfs(rem - OPCODE_BITS) {
                        return Some(true);
                    }
                    self.steps.pop();
                    self.frames.push((count, start));
                    self.out.truncate(start + body);
                    Some(false)
                }
            },
        }
    }

    fn program(&self) -> Vec<Instruction> {
        let mut stack: Vec<(u8, Vec<Instruction>)> = vec![(0, Vec::new())];
        for step in &self.steps {
            match *step {
                Step::Emit(t) => stack.last_mut().unwrap().1.push(Instruction::Emit(t)),
                Step::Open(count) => stack.push((count, Vec::new())),
                Step::Close if stack.len() > 1 => {
                    let (count, body) = stack.pop().unwrap();
                    stack.last_mut().unwrap().1.push(Instruction::Repeat { count, body });
                }
                Step::Close => {}
            }
        }
        stack.pop().unwrap().1
    }
}

/// Searches programs of exactly `bits` bits. Each first instruction is a
/// separate branch; branches run in parallel and are merged in bit order.
fn search_length(target: &[TokenId], size: usize, bits: usize) -> (Option<Vec<Instruction>>, u64) {
    let branches: Vec<Step> = (0..size as TokenId)
        .map(Step::Emit)
        .chain((MIN_COUNT..=u8::MAX).map(Step::Open))
        .chain(std::iter::once(Step::Close))
        .collect();
    let results: Vec<(Option<Vec<Instruction>>, u64)> = branches
        .par_iter()
        .map(|&step| {
            let mut s = Search::new(target, size);
            let hit = s.apply(step, bits) == Some(true);
            (hit.then(|| s.program()), s.nodes)
        })
        .collect();
    let mut visited = 1;
    for (program, nodes) in results {
        visited += nodes;
        if program.is_some() {
            return (program, visited);
        }
    }
    (None, visited)
}

/// Shortest token-level program: minimal over programs of at most
/// `max_bits` bits, ties broken by the smaller encoding.
pub fn shortest_tokens(target: &[TokenId], alphabet_size: usize, max_bits: usize) -> Result<(Option<TinyProgram>, u64)> {
    if alphabet_size == 0 {
        return Err(Error::InvalidParameter("empty alphabet".into()));
    }
    if max_bits > MAX_SEARCH_BITS {
        return Err(Error::InvalidParameter(format!(
            "search bound {max_bits} exceeds {MAX_SEARCH_BITS} bits"
        )));
    }
    if let Some(t) = target.iter().find(|&&t| t as usize >= alphabet_size) {
        return Err(Error::UnknownToken(t.to_string()));
    }
    let mut searched = 0;
    for bits in OPCODE_BITS..=max_bits {
        let (program, nodes) = search_length(target, alphabet_size, bits);
        searched += nodes;
        if let Some(ins) = program {
            let p = TinyProgram::new(ins, alphabet_size)?;
            debug_assert_eq!(p.bit_len(), bits);
            return Ok((Some(p), searched));
        }
    }
    Ok((None, searched))
}

pub fn shortest_program<T: Real>(alphabet: &Alphabet<T>, w: &Word, max_bits: usize) -> Result<OracleOutcome> {
    if w.alphabet_name() != alphabet.name() {
        return Err(Error::AlphabetMismatch {
            left: w.alphabet_name().to_string(),
            right: alphabet.name().to_string(),
        });
    }
    let (program, programs_searched) = shortest_tokens(w.tokens(), alphabet.len(), max_bits)?;
    Ok(match program {
        Some(program) => OracleOutcome::Found(OracleResult {
            word: w.clone(),
            shortest_bits: program.bit_len(),
            program,
            programs_searched,
        }),
        None => OracleOutcome::NotFound {
            max_bits,
            programs_searched,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitString;
    use crate::robot::machine::execute;
    use std::collections::HashMap;

    /// Every decodable bit string of up to `max` bits, in length-then-lexicographic
    /// order; the first program seen for an output is the expected answer.
    fn enumerate(size: usize, max: usize) -> HashMap<Vec<TokenId>, BitString> {
        let mut best = HashMap::new();
        for len in 1..=max {
            for n in 0u64..1 << len {
                let bits = BitString::from_bits((0..len).rev().map(|i| n >> i & 1 == 1).collect());
                if let Ok(p) = TinyProgram::decode(&bits, size) {
                    best.entry(execute(&p, usize::MAX)).or_insert(bits);
                }
            }
        }
        best
    }

    #[test]
    fn agrees_with_raw_enumeration() {
        for (size, max) in [(2, 18), (3, 18)] {
            let table = enumerate(size, max);
            assert!(table.len() > 100);
            for (word, bits) in &table {
                let (p, _) = shortest_tokens(word, size, max).unwrap();
                assert_eq!(p.unwrap().encode(), *bits, "{word:?}");
            }
        }
    }

    #[test]
    fn single_token_is_one_emit() {
        let (p, _) = shortest_tokens(&[1], 2, 24).unwrap();
        let p = p.unwrap();
        assert_eq!(p.instructions(), &[Instruction::Emit(1)]);
        assert_eq!(p.bit_len(), 5);
    }

    #[test]
    fn empty_word_is_halt() {
        let (p, _) = shortest_tokens(&[], 2, 24).unwrap();
        assert_eq!(p.unwrap().bit_len(), 2);
    }

    #[test]
    fn alternating_word_uses_a_loop() {
        let w: Vec<TokenId> = (0..16).map(|i| i % 2).collect();
        let (p, _) = shortest_tokens(&w, 2, 24).unwrap();
        let p = p.unwrap();
        assert!(p.bit_len() < 16 * 3 + 2);
        assert_eq!(
            p.instructions(),
            &[Instruction::Repeat { count: 8, body: vec![Instruction::Emit(0), Instruction::Emit(1)] }]
        );
    }

    #[test]
    fn bound_too_small_is_reported() {
        let w: Vec<TokenId> = vec![0, 1, 1, 0, 1, 0, 0, 1];
        let (p, searched) = shortest_tokens(&w, 2, 20).unwrap();
        assert!(p.is_none());
        assert!(searched > 0);
        assert!(shortest_tokens(&w, 2, MAX_SEARCH_BITS + 1).is_err());
        assert!(shortest_tokens(&[5], 2, 10).is_err());
    }

    #[test]
    fn thread_count_does_not_change_the_result() {
        let w: Vec<TokenId> = [0, 0, 1, 0, 0, 1, 0, 0, 1, 1].to_vec();
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| shortest_tokens(&w, 2, 40).unwrap());
        let parallel = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| shortest_tokens(&w, 2, 40).unwrap());
        assert_eq!(serial, parallel);
    }
}
