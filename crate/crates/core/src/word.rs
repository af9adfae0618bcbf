//! Tokens, alphabets and words over them.
//!
//! A [`Word`] only names its alphabet; anything needing inverses or matrices
//! goes through the owning [`Alphabet`].

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bits::{bits_for, BitReader, BitString};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

pub type TokenId = u16;

/// Largest alphabet the fixed-width token code supports.
pub const MAX_ALPHABET: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub id: TokenId,
    pub inverse: Option<TokenId>,
    pub label: String,
}

#[derive(Clone, Debug)]
pub struct Alphabet<T> {
    name: String,
    tokens: Vec<Token>,
    by_label: HashMap<String, TokenId>,
    realization: Option<Vec<Matrix<T>>>,
    dim: usize,
}

impl<T: Real> Alphabet<T> {
    /// Builds an abstract alphabet. Token ids must equal their position and
    /// the inverse map must be an involution.
    pub fn new(name: impl Into<String>, tokens: Vec<Token>) -> Result<Self> {
        let name = name.into();
        if tokens.is_empty() || tokens.len() > MAX_ALPHABET {
            return Err(Error::InvalidParameter(format!(
                "alphabet size {} outside 1..={MAX_ALPHABET}",
                tokens.len()
            )));
        }
        let mut by_label = HashMap::new();
        for (i, t) in tokens.iter().enumerate() {
            if t.id as usize != i {
                return Err(Error::InvalidParameter(format!(
                    "token `{}` has id {} at position {i}",
                    t.label, t.id
                )));
            }
            if t.label.is_empty() || t.label.chars().any(char::is_whitespace) {
                return Err(Error::InvalidParameter(format!("bad token label `{}`", t.label)));
            }
            if by_label.insert(t.label.clone(), t.id).is_some() {
                return Err(Error::InvalidParameter(format!("duplicate label `{}`", t.label)));
            }
        }
        for t in &tokens {
            if let Some(inv) = t.inverse {
                let back = tokens.get(inv as usize).and_then(|u| u.inverse);
                if back != Some(t.id) {
                    return Err(Error::InvalidParameter(format!(
                        "inverse of `{}` is not an involution",
                        t.label
                    )));
                }
            }
        }
        Ok(Self {
            name,
            tokens,
            by_label,
            realization: None,
            dim: 0,
        })
    }

    /// Attaches one square matrix per token, checking shapes and that
    /// inverse tokens are realized by inverse matrices.
    pub fn with_realization(mut self, matrices: Vec<Matrix<T>>) -> Result<Self> {
        if matrices.len() != self.tokens.len() {
            return Err(Error::DimensionMismatch {
                expected: self.tokens.len(),
                found: matrices.len(),
            });
        }
        let dim = matrices[0].rows();
        for m in &matrices {
            if !m.is_square() || m.rows() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.rows().max(m.cols()),
                });
            }
        }
        let id = Matrix::identity(dim);
        let tol = T::lit(T::IDENTITY_TOL);
        for t in &self.tokens {
            if let Some(inv) = t.inverse {
                let prod = &matrices[t.id as usize] * &matrices[inv as usize];
                if prod.max_abs_diff(&id) > tol {
                    return Err(Error::InvalidParameter(format!(
                        "realization of `{}` and its inverse do not multiply to identity",
                        t.label
                    )));
                }
            }
        }
        self.dim = dim;
        self.realization = Some(matrices);
        Ok(self)
    }

    /// Builds `{g, g⁻¹}` pairs: token `i` is `labels[i]`, token `i + k` its
    /// inverse, realized by the given matrices and their transposes.
    pub fn orthogonal_pairs(name: &str, pairs: Vec<(String, Matrix<T>)>) -> Result<Self> {
        let k = pairs.len();
        let mut tokens = Vec::with_capacity(2 * k);
        let mut mats = Vec::with_capacity(2 * k);
        for (i, (label, _)) in pairs.iter().enumerate() {
            tokens.push(Token {
                id: i as TokenId,
                inverse: Some((i + k) as TokenId),
                label: label.clone(),
            });
        }
        for (i, (label, _)) in pairs.iter().enumerate() {
            tokens.push(Token {
                id: (i + k) as TokenId,
                inverse: Some(i as TokenId),
                label: format!("{label}^-1"),
            });
        }
        for (_, m) in &pairs {
            mats.push(m.clone());
        }
        for (_, m) in &pairs {
            mats.push(m.transpose());
        }
        Self::new(name, tokens)?.with_realization(mats)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn token(&self, id: TokenId) -> Option<&Token> {
        self.tokens.get(id as usize)
    }

    pub fn id_of(&self, label: &str) -> Result<TokenId> {
        self.by_label
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownToken(label.to_string()))
    }

    pub fn label(&self, id: TokenId) -> &str {
        &self.tokens[id as usize].label
    }

    pub fn inverse_of(&self, id: TokenId) -> Option<TokenId> {
        self.tokens.get(id as usize).and_then(|t| t.inverse)
    }

    pub fn is_inverse_closed(&self) -> bool {
        self.tokens.iter().all(|t| t.inverse.is_some())
    }

    /// Matrix dimension; 0 for an abstract alphabet.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_realization(&self) -> bool {
        self.realization.is_some()
    }

    pub fn matrix(&self, id: TokenId) -> Option<&Matrix<T>> {
        self.realization.as_ref().map(|r| &r[id as usize])
    }

    pub fn matrices(&self) -> Option<&[Matrix<T>]> {
        self.realization.as_deref()
    }

    /// Fixed code width per token: `⌈log2 |alphabet|⌉`.
    pub fn token_width(&self) -> u32 {
        bits_for(self.tokens.len() as u64)
    }

    pub fn empty_word(&self) -> Word {
        Word {
            alphabet: self.name.clone(),
            tokens: Vec::new(),
        }
    }

    pub fn word(&self, tokens: Vec<TokenId>) -> Result<Word> {
        if let Some(&bad) = tokens.iter().find(|&&t| t as usize >= self.tokens.len()) {
            return Err(Error::UnknownToken(format!("#{bad}")));
        }
        Ok(Word {
            alphabet: self.name.clone(),
            tokens,
        })
    }

    pub fn word_from_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<Word> {
        let ids = labels
            .iter()
            .map(|l| self.id_of(l.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        self.word(ids)
    }

    /// Whitespace-separated labels.
    pub fn parse_word(&self, line: &str) -> Result<Word> {
        let labels: Vec<&str> = line.split_whitespace().collect();
        self.word_from_labels(&labels)
    }

    pub fn format_word(&self, w: &Word) -> Result<String> {
        self.check(w)?;
        Ok(w
            .tokens
            .iter()
            .map(|&t| self.label(t))
            .collect::<Vec<_>>()
            .join(" "))
    }

    fn check(&self, w: &Word) -> Result<()> {
        if w.alphabet != self.name {
            return Err(Error::AlphabetMismatch {
                left: w.alphabet.clone(),
                right: self.name.clone(),
            });
        }
        Ok(())
    }

    /// Reversed word with every token replaced by its inverse.
    pub fn reverse_inverse(&self, w: &Word) -> Result<Word> {
        self.check(w)?;
        let tokens = w
            .tokens
            .iter()
            .rev()
            .map(|&t| {
                self.inverse_of(t)
                    .ok_or_else(|| Error::MissingInverse(self.label(t).to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Word {
            alphabet: w.alphabet.clone(),
            tokens,
        })
    }

    /// Free reduction: cancels adjacent `t t⁻¹` pairs until none remain.
    /// Tokens without an inverse never cancel.
    pub fn reduce_free(&self, w: &Word) -> Result<Word> {
        self.check(w)?;
        let mut stack: Vec<TokenId> = Vec::with_capacity(w.len());
        for &t in &w.tokens {
            match stack.last() {
                Some(&top) if self.inverse_of(top) == Some(t) => {
                    stack.pop();
                }
                _ => stack.push(t),
            }
        }
        Ok(Word {
            alphabet: w.alphabet.clone(),
            tokens: stack,
        })
    }

    /// Ordered product of the token matrices; identity for the empty word.
    pub fn evaluate(&self, w: &Word) -> Result<Matrix<T>> {
        self.check(w)?;
        let mats = self
            .realization
            .as_ref()
            .ok_or_else(|| Error::NoRealization(self.name.clone()))?;
        let mut acc = Matrix::identity(self.dim);
        for &t in &w.tokens {
            acc = &acc * &mats[t as usize];
        }
        Ok(acc)
    }

    /// Elias-gamma(len + 1) followed by `token_width` bits per token.
    pub fn encode_self_delimiting(&self, w: &Word) -> Result<SelfDelimitedCode> {
        self.check(w)?;
        let width = self.token_width();
        let mut bits = BitString::with_capacity(w.len() * width as usize + 16);
        bits.push_gamma(w.len() as u64 + 1);
        for &t in &w.tokens {
            bits.push_uint(t as u64, width);
        }
        let declared_length = bits.len();
        Ok(SelfDelimitedCode {
            bits,
            declared_length,
        })
    }

    /// Decodes exactly one code; leftover bits are an error.
    pub fn decode_self_delimiting(&self, code: &SelfDelimitedCode) -> Result<Word> {
        if code.bits.len() != code.declared_length {
            return Err(Error::MalformedCode(format!(
                "declared {} bits, carries {}",
                code.declared_length,
                code.bits.len()
            )));
        }
        let mut r = code.bits.reader();
        let w = self.decode_prefix(&mut r)?;
        if r.remaining() != 0 {
            return Err(Error::MalformedCode(format!("{} trailing bits", r.remaining())));
        }
        Ok(w)
    }

    /// Decodes one self-delimited word from the front of a stream.
    pub fn decode_prefix(&self, r: &mut BitReader<'_>) -> Result<Word> {
        let n = r.read_gamma()? - 1;
        let width = self.token_width();
        if (r.remaining() as u64) < n.saturating_mul(width as u64) {
            return Err(Error::TruncatedCode);
        }
        let mut tokens = Vec::with_capacity(n as usize);
        for _ in 0..n {
            let t = r.read_uint(width)?;
            if t as usize >= self.tokens.len() {
                return Err(Error::MalformedCode(format!("token code {t} out of range")));
            }
            tokens.push(t as TokenId);
        }
        Ok(Word {
            alphabet: self.name.clone(),
            tokens,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word {
    alphabet: String,
    tokens: Vec<TokenId>,
}

impl Word {
    pub fn alphabet_name(&self) -> &str {
        &self.alphabet
    }

    pub fn tokens(&self) -> &[TokenId] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch {
                left: self.alphabet.clone(),
                right: other.alphabet.clone(),
            });
        }
        let mut tokens = Vec::with_capacity(self.len() + other.len());
        tokens.extend_from_slice(&self.tokens);
        tokens.extend_from_slice(&other.tokens);
        Ok(Word {
            alphabet: self.alphabet.clone(),
            tokens,
        })
    }

    pub fn repeat(&self, times: usize) -> Word {
        Word {
            alphabet: self.alphabet.clone(),
            tokens: self.tokens.repeat(times),
        }
    }

    /// Fraction of positions holding one of `ids`.
    pub fn fraction_of(&self, ids: &[TokenId]) -> f64 {
        if self.tokens.is_empty() {
            return 0.0;
        }
        let hits = self.tokens.iter().filter(|t| ids.contains(t)).count();
        hits as f64 / self.tokens.len() as f64
    }
}

/// A prefix-free binary form of a word that carries its own length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelfDelimitedCode {
    pub bits: BitString,
    pub declared_length: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abstract_free_group() -> Alphabet<f64> {
        let tokens = vec![
            Token { id: 0, inverse: Some(2), label: "g1".into() },
            Token { id: 1, inverse: Some(3), label: "g2".into() },
            Token { id: 2, inverse: Some(0), label: "g1^-1".into() },
            Token { id: 3, inverse: Some(1), label: "g2^-1".into() },
        ];
        Alphabet::new("free2", tokens).unwrap()
    }

    #[test]
    fn concat_identity_and_order() {
        let a = abstract_free_group();
        let w = a.parse_word("g1 g2 g1").unwrap();
        assert_eq!(a.empty_word().concat(&w).unwrap(), w);
        let ab = a.parse_word("g1").unwrap().concat(&a.parse_word("g2").unwrap()).unwrap();
        assert_eq!(ab, a.parse_word("g1 g2").unwrap());
    }

    #[test]
    fn concat_rejects_mismatched_alphabets() {
        let a = abstract_free_group();
        let other = Alphabet::<f64>::new(
            "other",
            vec![Token { id: 0, inverse: None, label: "x".into() }],
        )
        .unwrap();
        let err = a.empty_word().concat(&other.empty_word()).unwrap_err();
        assert!(matches!(err, Error::AlphabetMismatch { .. }));
    }

    #[test]
    fn reverse_inverse_examples() {
        let a = abstract_free_group();
        let w = a.parse_word("g1 g2").unwrap();
        assert_eq!(a.reverse_inverse(&w).unwrap(), a.parse_word("g2^-1 g1^-1").unwrap());
        assert_eq!(a.reverse_inverse(&a.empty_word()).unwrap(), a.empty_word());
    }

    #[test]
    fn reverse_inverse_requires_inverses() {
        let a = Alphabet::<f64>::new(
            "half",
            vec![
                Token { id: 0, inverse: None, label: "a".into() },
                Token { id: 1, inverse: None, label: "b".into() },
            ],
        )
        .unwrap();
        let w = a.parse_word("a b").unwrap();
        assert_eq!(a.reverse_inverse(&w), Err(Error::MissingInverse("b".into())));
    }

    #[test]
    fn free_reduction_examples() {
        let a = abstract_free_group();
        let w = a.parse_word("g1 g1^-1").unwrap();
        assert!(a.reduce_free(&w).unwrap().is_empty());
        let w = a.parse_word("g1 g2 g2^-1 g1").unwrap();
        assert_eq!(a.reduce_free(&w).unwrap(), a.parse_word("g1 g1").unwrap());
        let w = a.parse_word("g1 g2 g2^-1 g1^-1 g2").unwrap();
        assert_eq!(a.reduce_free(&w).unwrap(), a.parse_word("g2").unwrap());
    }

    #[test]
    fn alphabet_validation() {
        let bad_inverse = vec![
            Token { id: 0, inverse: Some(1), label: "a".into() },
            Token { id: 1, inverse: None, label: "b".into() },
        ];
        assert!(Alphabet::<f64>::new("x", bad_inverse).is_err());
        let dup = vec![
            Token { id: 0, inverse: None, label: "a".into() },
            Token { id: 1, inverse: None, label: "a".into() },
        ];
        assert!(Alphabet::<f64>::new("x", dup).is_err());
    }

    #[test]
    fn evaluate_without_realization_fails() {
        let a = abstract_free_group();
        assert_eq!(a.evaluate(&a.empty_word()), Err(Error::NoRealization("free2".into())));
    }

    #[test]
    fn empty_word_code_is_prefix_only() {
        let a = abstract_free_group();
        let c = a.encode_self_delimiting(&a.empty_word()).unwrap();
        assert_eq!(c.bits.to_string(), "1");
        assert_eq!(a.decode_self_delimiting(&c).unwrap(), a.empty_word());
    }

    #[test]
    fn truncated_and_trailing_codes_fail() {
        let a = abstract_free_group();
        let w = a.parse_word("g1 g2 g2").unwrap();
        let mut c = a.encode_self_delimiting(&w).unwrap();
        let mut bits = c.bits.clone().into_inner();
        bits.pop();
        let short = SelfDelimitedCode {
            declared_length: bits.len(),
            bits: BitString::from_bits(bits),
        };
        assert_eq!(a.decode_self_delimiting(&short), Err(Error::TruncatedCode));
        c.bits.push(true);
        c.declared_length += 1;
        assert!(matches!(a.decode_self_delimiting(&c), Err(Error::MalformedCode(_))));
    }
}
