//! LZ78 incremental parsing and its bit-level code.
//!
//! Phrase `i` (1-based) is written as the index of its longest known prefix
//! in `⌈log2 i⌉` bits followed by one extension bit.

use std::collections::HashMap;
use std::hash::Hash;

use crate::bits::{bits_for, BitReader, BitString};
use crate::error::{Error, Result};

/// One parsed phrase: an earlier phrase (0 is the empty phrase) plus one
/// new symbol. Only the final phrase may lack the symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Phrase<S> {
    pub prefix: usize,
    pub symbol: Option<S>,
}

/// Incremental parse over any symbol type.
pub fn parse<S: Clone + Eq + Hash>(input: &[S]) -> Vec<Phrase<S>> {
    let mut trie: HashMap<(usize, S), usize> = HashMap::new();
    let mut phrases = Vec::new();
    let mut node = 0usize;
    for s in input {
        match trie.get(&(node, s.clone())) {
            Some(&next) => node = next,
            None => {
                phrases.push(Phrase {
                    prefix: node,
                    symbol: Some(s.clone()),
                });
                trie.insert((node, s.clone()), phrases.len());
                node = 0;
            }
        }
    }
    if node != 0 {
        phrases.push(Phrase {
            prefix: node,
            symbol: None,
        });
    }
    phrases
}

/// Exact size in bits of [`encode`] for a parse with `phrases` phrases.
pub fn code_len(phrases: usize) -> usize {
    (1..=phrases as u64).map(|i| bits_for(i) as usize + 1).sum()
}

pub fn encode(input: &[bool], out: &mut BitString) {
    for (i, p) in parse(input).into_iter().enumerate() {
        out.push_uint(p.prefix as u64, bits_for(i as u64 + 1));
        // a dangling final phrase gets a filler bit that the decoder trims
        out.push(p.symbol.unwrap_or(false));
    }
}

/// Rebuilds exactly `len` bits.
pub fn decode(r: &mut BitReader<'_>, len: usize) -> Result<Vec<bool>> {
    let mut phrases: Vec<(usize, bool)> = vec![(0, false)];
    let mut out = Vec::with_capacity(len);
    let mut scratch = Vec::new();
    while out.len() < len {
        let i = phrases.len() as u64;
        let prefix = r.read_uint(bits_for(i))? as usize;
        let bit = r.read_bit()?;
        if prefix >= phrases.len() {
            return Err(Error::MalformedCode(format!("phrase reference {prefix} out of range")));
        }
        scratch.clear();
        let mut k = prefix;
        while k != 0 {
            scratch.push(phrases[k].1);
            k = phrases[k].0;
        }
        out.extend(scratch.iter().rev());
        out.push(bit);
        phrases.push((prefix, bit));
    }
    out.truncate(len);
    Ok(out)
}
