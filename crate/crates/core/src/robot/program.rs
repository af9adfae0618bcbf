//! Programs for the emit/repeat machine and their binary and text forms.
//!
//! Binary layout, most significant bit first:
//! - `00 <token>`: emit one token, `⌈log2 |alphabet|⌉` bits
//! - `01 <count:8>` then the body: repeat the body `count` times (2..=255)
//! - `10`: close the innermost open body, or stop at top level
//!
//! `11` is not an instruction. Bodies are non-empty and nest at most two deep.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bits::{BitReader, BitString};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::word::{Alphabet, TokenId};

pub const OPCODE_BITS: usize = 2;
pub const COUNT_BITS: usize = 8;
pub const MIN_COUNT: u8 = 2;
pub const MAX_DEPTH: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Instruction {
    Emit(TokenId),
    Repeat { count: u8, body: Vec<Instruction> },
}

impl Instruction {
    /// Encoded size, including the body's closing mark.
    pub fn bit_len(&self, token_width: u32) -> usize {
        match self {
            Instruction::Emit(_) => OPCODE_BITS + token_width as usize,
            Instruction::Repeat { body, .. } => {
                OPCODE_BITS + COUNT_BITS + body.iter().map(|i| i.bit_len(token_width)).sum::<usize>() + OPCODE_BITS
            }
        }
    }

    fn depth(&self) -> usize {
        match self {
            Instruction::Emit(_) => 0,
            Instruction::Repeat { body, .. } => 1 + body.iter().map(Instruction::depth).max().unwrap_or(0),
        }
    }

    fn output_len(&self) -> usize {
        match self {
            Instruction::Emit(_) => 1,
            Instruction::Repeat { count, body } => {
                *count as usize * body.iter().map(Instruction::output_len).sum::<usize>()
            }
        }
    }
}

/// A validated instruction list over an alphabet of `alphabet_size` tokens.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TinyProgram {
    instructions: Vec<Instruction>,
    alphabet_size: usize,
}

impl TinyProgram {
    pub fn new(instructions: Vec<Instruction>, alphabet_size: usize) -> Result<Self> {
        if alphabet_size == 0 {
            return Err(Error::InvalidParameter("empty alphabet".into()));
        }
        fn check(ins: &[Instruction], size: usize) -> Result<()> {
            for i in ins {
                match i {
                    Instruction::Emit(t) if *t as usize >= size => {
                        return Err(Error::MalformedProgram(format!("token {t} outside the alphabet")));
                    }
                    Instruction::Emit(_) => {}
                    Instruction::Repeat { count, body } => {
                        if *count < MIN_COUNT {
                            return Err(Error::MalformedProgram(format!("repeat count {count} below {MIN_COUNT}")));
                        }
                        if body.is_empty() {
                            return Err(Error::MalformedProgram("empty repeat body".into()));
                        }
                        check(body, size)?;
                    }
                }
            }
            Ok(())
        }
        check(&instructions, alphabet_size)?;
        if let Some(d) = instructions.iter().map(Instruction::depth).max() {
            if d > MAX_DEPTH {
                return Err(Error::MalformedProgram(format!("nesting depth {d} exceeds {MAX_DEPTH}")));
            }
        }
        Ok(Self {
            instructions,
            alphabet_size,
        })
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn token_width(&self) -> u32 {
        crate::bits::bits_for(self.alphabet_size as u64)
    }

    /// Length of the binary form, final stop included.
    pub fn bit_len(&self) -> usize {
        let w = self.token_width();
        self.instructions.iter().map(|i| i.bit_len(w)).sum::<usize>() + OPCODE_BITS
    }

    /// Number of tokens a full run emits.
    pub fn output_len(&self) -> usize {
        self.instructions.iter().map(Instruction::output_len).sum()
    }

    pub fn encode(&self) -> BitString {
        fn put(ins: &[Instruction], width: u32, out: &mut BitString) {
            for i in ins {
                match i {
                    Instruction::Emit(t) => {
                        out.push_uint(0b00, 2);
                        out.push_uint(*t as u64, width);
                    }
                    Instruction::Repeat { count, body } => {
                        out.push_uint(0b01, 2);
                        out.push_uint(*count as u64, COUNT_BITS as u32);
                        put(body, width, out);
                        out.push_uint(0b10, 2);
                    }
                }
            }
        }
        let mut out = BitString::with_capacity(self.bit_len());
        put(&self.instructions, self.token_width(), &mut out);
        out.push_uint(0b10, 2);
        out
    }

    /// Decodes one program from the front of `bits`; trailing bits are an error.
    pub fn decode(bits: &BitString, alphabet_size: usize) -> Result<Self> {
        let mut r = bits.reader();
        let p = Self::decode_prefix(&mut r, alphabet_size)?;
        if r.remaining() != 0 {
            return Err(Error::MalformedProgram(format!("{} bits after the final stop", r.remaining())));
        }
        Ok(p)
    }

    pub fn decode_prefix(r: &mut BitReader<'_>, alphabet_size: usize) -> Result<Self> {
        let width = crate::bits::bits_for(alphabet_size as u64);
        fn body(r: &mut BitReader<'_>, width: u32, size: usize, depth: usize) -> Result<Vec<Instruction>> {
            let mut out = Vec::new();
            loop {
                match r.read_uint(2)? {
                    0b00 => {
                        let t = r.read_uint(width)?;
                        if t as usize >= size {
                            return Err(Error::MalformedProgram(format!("token {t} outside the alphabet")));
                        }
                        out.push(Instruction::Emit(t as TokenId));
                    }
                    0b01 => {
                        if depth >= MAX_DEPTH {
                            return Err(Error::MalformedProgram("repeat nested too deep".into()));
                        }
                        let count = r.read_uint(COUNT_BITS as u32)? as u8;
                        let inner = body(r, width, size, depth + 1)?;
                        out.push(Instruction::Repeat { count, body: inner });
                    }
                    0b10 => return Ok(out),
                    _ => return Err(Error::MalformedProgram("opcode 11".into())),
                }
            }
        }
        let instructions = body(r, width, alphabet_size, 0)?;
        Self::new(instructions, alphabet_size)
    }

    pub fn to_text<T: Real>(&self, alphabet: &Alphabet<T>) -> String {
        fn put<T: Real>(ins: &[Instruction], a: &Alphabet<T>, indent: usize, out: &mut String) {
            for i in ins {
                match i {
                    Instruction::Emit(t) => {
                        let _ = writeln!(out, "{:indent$}EMIT {}", "", a.label(*t));
                    }
                    Instruction::Repeat { count, body } => {
                        let _ = writeln!(out, "{:indent$}REPEAT {count} {{", "");
                        put(body, a, indent + 2, out);
                        let _ = writeln!(out, "{:indent$}}}", "");
                    }
                }
            }
        }
        let mut out = String::new();
        put(&self.instructions, alphabet, 0, &mut out);
        out.push_str("HALT\n");
        out
    }

    /// Parses the text form; line breaks are optional between words.
    pub fn parse_text<T: Real>(text: &str, alphabet: &Alphabet<T>) -> Result<Self> {
        let mut words = text.split_whitespace().peekable();
        fn body<'a, T: Real>(
            words: &mut std::iter::Peekable<impl Iterator<Item = &'a str>>,
            a: &Alphabet<T>,
            top: bool,
        ) -> Result<Vec<Instruction>> {
            let mut out = Vec::new();
            loop {
                match words.next() {
                    Some("EMIT") => {
                        let label = words
                            .next()
                            .ok_or_else(|| Error::Parse("EMIT without a token".into()))?;
                        out.push(Instruction::Emit(a.id_of(label)?));
                    }
                    Some("REPEAT") => {
                        let count: u8 = words
                            .next()
                            .and_then(|c| c.parse().ok())
                            .ok_or_else(|| Error::Parse("REPEAT needs a count in 2..=255".into()))?;
                        if words.next() != Some("{") {
                            return Err(Error::Parse("expected `{` after the repeat count".into()));
                        }
                        let inner = body(words, a, false)?;
                        out.push(Instruction::Repeat { count, body: inner });
                    }
                    Some("}") if !top => return Ok(out),
                    Some("HALT") if top => return Ok(out),
                    Some(other) => return Err(Error::Parse(format!("unexpected `{other}`"))),
                    None => return Err(Error::Parse("program ends without HALT".into())),
                }
            }
        }
        let instructions = body(&mut words, alphabet, true)?;
        if let Some(extra) = words.next() {
            return Err(Error::Parse(format!("`{extra}` after HALT")));
        }
        Self::new(instructions, alphabet.len())
    }
}
