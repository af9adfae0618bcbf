//! LZW over the binary alphabet with growing codes capped at 12 bits.
//!
//! The dictionary starts as `{0, 1}`. Code `k` (0-based) is written in
//! `bits_for(min(2 + k, 4096))` bits; once 4096 entries exist the dictionary
//! is frozen.

use std::collections::HashMap;

use crate::bits::{bits_for, BitReader, BitString};
use crate::error::{Error, Result};

pub const MAX_ENTRIES: usize = 4096;

fn width(k: usize) -> u32 {
    bits_for((2 + k).min(MAX_ENTRIES) as u64)
}

pub fn encode(input: &[bool], out: &mut BitString) {
    if input.is_empty() {
        return;
    }
    let mut dict: HashMap<(u32, bool), u32> = HashMap::new();
    let mut size = 2usize;
    let mut current = input[0] as u32;
    let mut emitted = 0usize;
    for &b in &input[1..] {
        if let Some(&next) = dict.get(&(current, b)) {
            current = next;
            continue;
        }
        out.push_uint(current as u64, width(emitted));
        emitted += 1;
        if size < MAX_ENTRIES {
            dict.insert((current, b), size as u32);
            size += 1;
        }
        current = b as u32;
    }
    out.push_uint(current as u64, width(emitted));
}

/// Rebuilds exactly `len` bits.
pub fn decode(r: &mut BitReader<'_>, len: usize) -> Result<Vec<bool>> {
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return Ok(out);
    }
    let mut entries: Vec<Vec<bool>> = vec![vec![false], vec![true]];
    let mut previous: Option<usize> = None;
    let mut k = 0usize;
    while out.len() < len {
        let code = r.read_uint(width(k))? as usize;
        k += 1;
        let entry = if code < entries.len() {
            entries[code].clone()
        } else if code == entries.len() && entries.len() < MAX_ENTRIES {
            let prev = previous.ok_or_else(|| Error::MalformedCode("lzw code before any entry".into()))?;
            let mut e = entries[prev].clone();
            e.push(entries[prev][0]);
            e
        } else {
            return Err(Error::MalformedCode(format!("lzw code {code} out of range")));
        };
        if let Some(prev) = previous {
            if entries.len() < MAX_ENTRIES {
                let mut e = entries[prev].clone();
                e.push(entry[0]);
                entries.push(e);
            }
        }
        out.extend_from_slice(&entry);
        previous = Some(code);
    }
    if out.len() != len {
        return Err(Error::MalformedCode("lzw output overruns declared length".into()));
    }
    Ok(out)
}
