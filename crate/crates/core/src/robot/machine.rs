//! Running programs, copying robots, and the memory-versus-complexity test.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::program::{Instruction, TinyProgram, COUNT_BITS, MAX_DEPTH, MIN_COUNT};
use crate::bits::{BitReader, BitString};
use crate::complexity::{estimate_word, EstimatorId};
use crate::error::{Error, Result};
use crate::quantize::{NoiseModel, NoiseSpec};
use crate::scalar::Real;
use crate::seed;
use crate::word::{Alphabet, TokenId, Word};

/// A program with its start condition and memory budget in bits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobotState<T> {
    program: TinyProgram,
    c0: Vec<T>,
    memory_bits: usize,
    generation: u64,
}

impl<T: Real> RobotState<T> {
    pub fn new(program: TinyProgram, c0: Vec<T>, memory_bits: usize) -> Result<Self> {
        if program.bit_len() > memory_bits {
            return Err(Error::InvalidParameter(format!(
                "program needs {} bits, memory holds {memory_bits}",
                program.bit_len()
            )));
        }
        Ok(Self {
            program,
            c0,
            memory_bits,
            generation: 0,
        })
    }

    pub fn program(&self) -> &TinyProgram {
        &self.program
    }

    pub fn c0(&self) -> &[T] {
        &self.c0
    }

    pub fn memory_bits(&self) -> usize {
        self.memory_bits
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }
}

struct Emitter<'a> {
    out: &'a mut Vec<TokenId>,
    fuel: usize,
}

impl Emitter<'_> {
    /// `false` once fuel is exhausted.
    fn run(&mut self, ins: &[Instruction]) -> bool {
        for i in ins {
            match i {
                Instruction::Emit(t) => {
                    if self.out.len() >= self.fuel {
                        return false;
                    }
                    self.out.push(*t);
                }
                Instruction::Repeat { count, body } => {
                    for _ in 0..*count {
                        if !self.run(body) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// Executes `program`, emitting at most `fuel` tokens.
pub fn execute(program: &TinyProgram, fuel: usize) -> Vec<TokenId> {
    let mut out = Vec::with_capacity(program.output_len().min(fuel));
    Emitter { out: &mut out, fuel }.run(program.instructions());
    out
}

/// The robot's output word, truncated at `fuel` tokens.
pub fn run<T: Real>(alphabet: &Alphabet<T>, robot: &RobotState<T>, fuel: usize) -> Result<Word> {
    if robot.program.alphabet_size() != alphabet.len() {
        return Err(Error::MalformedProgram(format!(
            "program written for {} tokens, alphabet has {}",
            robot.program.alphabet_size(),
            alphabet.len()
        )));
    }
    alphabet.word(execute(&robot.program, fuel))
}

/// Decodes the robot's stored bits and runs them.
pub fn run_encoded<T: Real>(alphabet: &Alphabet<T>, bits: &BitString, fuel: usize) -> Result<Word> {
    let program = TinyProgram::decode(bits, alphabet.len())?;
    alphabet.word(execute(&program, fuel))
}

/// Longest valid program readable from damaged bits: instructions are kept up
/// to the first one that fails to decode, open bodies are closed (empty ones
/// dropped), and trailing instructions are removed until the result fits
/// `memory_bits`.
pub fn repair(bits: &BitString, alphabet_size: usize, memory_bits: usize) -> TinyProgram {
    let width = crate::bits::bits_for(alphabet_size as u64);

    // the flag is set once reading must stop: a bad instruction or the final stop
    fn body(r: &mut BitReader<'_>, width: u32, size: usize, depth: usize) -> (Vec<Instruction>, bool) {
        let mut out = Vec::new();
        loop {
            let Ok(op) = r.read_uint(2) else { return (out, true) };
            match op {
                0b00 => match r.read_uint(width) {
                    Ok(t) if (t as usize) < size => out.push(Instruction::Emit(t as TokenId)),
                    _ => return (out, true),
                },
                0b01 if depth < MAX_DEPTH => {
                    let count = match r.read_uint(COUNT_BITS as u32) {
                        Ok(c) if c as u8 >= MIN_COUNT => c as u8,
                        _ => return (out, true),
                    };
                    let (inner, stopped) = body(r, width, size, depth + 1);
                    if !inner.is_empty() {
                        out.push(Instruction::Repeat { count, body: inner });
                    }
                    if stopped {
                        return (out, true);
                    }
                }
                0b10 => return (out, depth == 0),
                _ => return (out, true),
            }
        }
    }

    let (mut instructions, _) = body(&mut bits.reader(), width, alphabet_size, 0);
    let fixed = |ins: Vec<Instruction>| TinyProgram::new(ins, alphabet_size).expect("repair keeps programs valid");
    let mut program = fixed(instructions.clone());
    while program.bit_len() > memory_bits && instructions.pop().is_some() {
        program = fixed(instructions.clone());
    }
    program
}

/// A child robot and how many program bits were flipped to make it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Replica<T> {
    pub child: RobotState<T>,
    pub flipped_bits: usize,
}

/// Copies `parent`, flipping each program bit with probability
/// `mutation_rate` and repairing the result. `c0_noise`, if given, jitters
/// the start condition.
pub fn replicate<T: Real>(
    parent: &RobotState<T>,
    mutation_rate: f64,
    seed: u64,
    c0_noise: Option<f64>,
) -> Result<Replica<T>> {
    if !(0.0..=1.0).contains(&mutation_rate) {
        return Err(Error::InvalidParameter(format!(
            "mutation rate {mutation_rate} outside [0, 1]"
        )));
    }
    let mut rng = seed::rng(seed::derive(seed, "replicate/bits"));
    let bits = parent.program.encode();
    let mut flipped = 0;
    let mutated: BitString = bits
        .iter()
        .map(|b| {
            let flip = rng.random::<f64>() < mutation_rate;
            flipped += flip as usize;
            b ^ flip
        })
        .collect();
    let program = if flipped == 0 {
        parent.program.clone()
    } else {
        repair(&mutated, parent.program.alphabet_size(), parent.memory_bits)
    };
    let c0 = match c0_noise {
        Some(sigma) if sigma > 0.0 => {
            let noise = NoiseSpec {
                model: NoiseModel::CoordinateJitter,
                amplitude: sigma,
                seed: seed::derive(seed, "replicate/c0"),
            };
            let p = crate::quantize::Polyline::new(vec![parent.c0.clone()], false)
                .and_then(|p| crate::quantize::perturb_path(&p, &noise))?;
            p.points()[0].clone()
        }
        _ => parent.c0.clone(),
    };
    Ok(Replica {
        child: RobotState {
            program,
            c0,
            memory_bits: parent.memory_bits,
            generation: parent.generation + 1,
        },
        flipped_bits: flipped,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reversibility {
    Reversible,
    Irreversible,
}

/// Reversible when `memory_bits` covers the estimated size of `w`.
pub fn reversibility_test<T: Real>(
    memory_bits: f64,
    alphabet: &Alphabet<T>,
    w: &Word,
    e: EstimatorId,
) -> Result<Reversibility> {
    let est = estimate_word(alphabet, w, e)?;
    Ok(if memory_bits >= est.bits {
        Reversibility::Reversible
    } else {
        Reversibility::Irreversible
    })
}
