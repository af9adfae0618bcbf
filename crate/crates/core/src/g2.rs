//! Octonion automorphisms: the two block-rotation samples, word evaluation,
//! loop quantization, and enumeration probes for relations and density.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::octonion::{cross, oct_mul, Octonion};
use crate::quantize::{Polyline, Quantizer};
use crate::scalar::Real;
use crate::word::{Alphabet, TokenId, Word};

pub const DIM: usize = 7;

/// `√2·π/4`.
pub fn default_x1<T: Real>() -> T {
    T::SQRT_2() * T::FRAC_PI_4()
}

/// `√3·π/4`.
pub fn default_y1<T: Real>() -> T {
    T::lit(3.0).sqrt() * T::FRAC_PI_4()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum G2Kind {
    /// Rotates `(e2, e3)` and `(e4, e5)` in opposite senses.
    A,
    /// Rotates `(e4, e7)` and `(e5, e6)`.
    B,
}

/// Block rotation acting on the imaginary coordinates `e1..e7`.
pub fn g2_generator<T: Real>(kind: G2Kind, angle: T) -> Matrix<T> {
    let (s, c) = angle.sin_cos();
    let mut m = Matrix::identity(DIM);
    let mut set = |i: usize, j: usize, v: T| m[(i - 1, j - 1)] = v;
    match kind {
        G2Kind::A => {
            set(2, 2, c);
            set(3, 3, c);
            set(2, 3, s);
            set(3, 2, -s);
            set(4, 4, c);
            set(5, 5, c);
            set(4, 5, -s);
            set(5, 4, s);
        }
        G2Kind::B => {
            set(4, 4, c);
            set(7, 7, c);
            set(4, 7, s);
            set(7, 4, -s);
            set(5, 5, c);
            set(6, 6, c);
            set(5, 6, s);
            set(6, 5, -s);
        }
    }
    m
}

/// Applies a 7×7 matrix to the imaginary part, fixing the real part.
pub fn act<T: Real>(m: &Matrix<T>, x: &Octonion<T>) -> Octonion<T> {
    let im = m.mul_vec(&x.0[1..]);
    let mut c = [T::zero(); 8];
    c[0] = x.0[0];
    c[1..].copy_from_slice(&im);
    Octonion(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AutomorphismCheck<T> {
    pub holds: bool,
    /// Largest `‖g(e_i e_j) − g(e_i) g(e_j)‖` over the 49 imaginary pairs.
    pub residual: T,
}

pub fn automorphism_residual<T: Real>(m: &Matrix<T>) -> Result<T> {
    if m.rows() != DIM || m.cols() != DIM {
        return Err(Error::DimensionMismatch { expected: DIM, found: m.rows() });
    }
    let images: Vec<Octonion<T>> = (1..=DIM).map(|i| act(m, &Octonion::basis(i))).collect();
    let mut worst = T::zero();
    for i in 1..=DIM {
        for j in 1..=DIM {
            let lhs = act(m, &oct_mul(&Octonion::basis(i), &Octonion::basis(j)));
            let rhs = oct_mul(&images[i - 1], &images[j - 1]);
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(worst)
}

pub fn is_automorphism<T: Real>(m: &Matrix<T>, tol: T) -> Result<AutomorphismCheck<T>> {
    let residual = automorphism_residual(m)?;
    Ok(AutomorphismCheck {
        holds: residual <= tol,
        residual,
    })
}

/// Largest `‖g(x × y) − g(x) × g(y)‖` over the given pairs.
pub fn cross_residual<T: Real>(m: &Matrix<T>, pairs: &[(Octonion<T>, Octonion<T>)]) -> T {
    pairs
        .iter()
        .map(|(x, y)| (act(m, &cross(x, y)) - cross(&act(m, x), &act(m, y))).norm())
        .fold(T::zero(), T::max)
}

/// An automorphism of the octonions, stored as its 7×7 action.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct G2Element<T> {
    matrix: Matrix<T>,
}

impl<T: Real> G2Element<T> {
    /// Accepts matrices within `tol` of an orthogonal automorphism.
    pub fn new(matrix: Matrix<T>, tol: T) -> Result<Self> {
        let check = is_automorphism(&matrix, tol)?;
        if !check.holds || matrix.orthogonality_residual() > tol {
            return Err(Error::InvalidParameter(format!(
                "not an automorphism: residual {}",
                check.residual
            )));
        }
        Ok(Self { matrix })
    }

    pub fn identity() -> Self {
        Self { matrix: Matrix::identity(DIM) }
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.matrix
    }

    pub fn apply(&self, x: &Octonion<T>) -> Octonion<T> {
        act(&self.matrix, x)
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self { matrix: &self.matrix * &other.matrix }
    }

    pub fn residual(&self) -> T {
        automorphism_residual(&self.matrix).expect("7×7 by construction")
    }
}

/// `g1 = A(x1)`, `g2 = B(y1)` and their inverses, ids `g1, g2, g1^-1, g2^-1`.
pub fn g2_alphabet<T: Real>(x1: T, y1: T) -> Result<Alphabet<T>> {
    Alphabet::orthogonal_pairs(
        "g2",
        vec![
            ("g1".into(), g2_generator(G2Kind::A, x1)),
            ("g2".into(), g2_generator(G2Kind::B, y1)),
        ],
    )
}

pub fn default_g2_alphabet<T: Real>() -> Alphabet<T> {
    g2_alphabet(default_x1(), default_y1()).expect("sample generators are orthogonal")
}

pub fn word_to_g2<T: Real>(alphabet: &Alphabet<T>, w: &Word) -> Result<G2Element<T>> {
    let matrix = alphabet.evaluate(w)?;
    if matrix.rows() != DIM {
        return Err(Error::DimensionMismatch { expected: DIM, found: matrix.rows() });
    }
    Ok(G2Element { matrix })
}

/// Unit vector along `e1 + … + e7`; both samples move it.
pub fn g2_anchor<T: Real>() -> Vec<T> {
    vec![T::one() / T::lit(DIM as f64).sqrt(); DIM]
}

/// Greedy quantization of a closed path in the imaginary octonions into `n`
/// steps over `alphabet`, steering `anchor`.
pub fn quantize_loop_to_g2<T: Real>(path: &Polyline<T>, alphabet: &Alphabet<T>, anchor: Vec<T>, n: usize) -> Result<Word> {
    let scale = T::one().max(crate::linalg::norm(&path.points()[0]));
    let gap = path.endpoint_gap();
    if !path.is_closed() && gap > T::lit(T::IDENTITY_TOL) * scale {
        return Err(Error::NotALoop {
            gap: gap.as_f64(),
            tolerance: T::IDENTITY_TOL * scale.as_f64(),
        });
    }
    Quantizer::new(alphabet.clone(), anchor)?.quantize(path, n)
}

fn frobenius_sq<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

fn mul_into<T: Real>(a: &[T], b: &[T], out: &mut [T]) {
    for i in 0..DIM {
        for j in 0..DIM {
            out[i * DIM + j] = (0..DIM).map(|k| a[i * DIM + k] * b[k * DIM + j]).sum();
        }
    }
}

/// Visits every freely reduced word starting with `first`, up to `max_len`
/// tokens, with its evaluated matrix.
fn walk_reduced<T: Real>(
    alphabet: &Alphabet<T>,
    first: TokenId,
    max_len: usize,
    visit: &mut impl FnMut(&[TokenId], &[T]),
) {
    let mats: Vec<&[T]> = alphabet
        .matrices()
        .expect("checked by caller")
        .iter()
        .map(Matrix::row_major)
        .collect();
    let mut stack: Vec<Vec<T>> = vec![vec![T::zero(); DIM * DIM]; max_len + 1];
    stack[1].copy_from_slice(mats[first as usize]);
    let mut word = vec![first];
    visit(&word, &stack[1]);

    fn rec<T: Real>(
        alphabet: &Alphabet<T>,
        mats: &[&[T]],
        stack: &mut [Vec<T>],
        word: &mut Vec<TokenId>,
        max_len: usize,
        visit: &mut impl FnMut(&[TokenId], &[T]),
    ) {
        let depth = word.len();
        if depth == max_len {
            return;
        }
        let last = *word.last().unwrap();
        for t in 0..alphabet.len() as TokenId {
            if alphabet.inverse_of(last) == Some(t) {
                continue;
            }
            let (head, tail) = stack.split_at_mut(depth + 1);
            mul_into(&head[depth], mats[t as usize], &mut tail[0]);
            word.push(t);
            visit(word, &stack[depth + 1]);
            rec(alphabet, mats, stack, word, max_len, visit);
            word.pop();
        }
    }
    rec(alphabet, &mats, &mut stack, &mut word, max_len, visit);
}

fn check_g2_alphabet<T: Real>(alphabet: &Alphabet<T>) -> Result<()> {
    if !alphabet.is_inverse_closed() {
        return Err(Error::MissingInverse(alphabet.name().to_string()));
    }
    if alphabet.matrices().is_none() {
        return Err(Error::NoRealization(alphabet.name().to_string()));
    }
    if alphabet.dim() != DIM {
        return Err(Error::DimensionMismatch { expected: DIM, found: alphabet.dim() });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LengthMinimum {
    pub length: usize,
    pub words: u64,
    pub min_distance: f64,
    pub closest_word: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreenessReport {
    pub max_len: usize,
    pub tol: f64,
    pub per_length: Vec<LengthMinimum>,
    pub min_distance: f64,
    /// The closest word to the identity when it lies within `tol`.
    pub relation: Option<String>,
}

impl FreenessReport {
    pub fn no_relation_found(&self) -> bool {
        self.relation.is_none()
    }
}

/// Distance to the identity of every freely reduced word of length
/// `1..=max_len`. Ties keep the word with the smallest token ids.
pub fn probe_freeness<T: Real>(alphabet: &Alphabet<T>, max_len: usize, tol: f64) -> Result<FreenessReport> {
    check_g2_alphabet(alphabet)?;
    if max_len == 0 || max_len > 12 {
        return Err(Error::InvalidParameter(format!("max_len {max_len} outside 1..=12")));
    }
    let id: Vec<T> = Matrix::<T>::identity(DIM).row_major().to_vec();
    // per length: (words, best squared distance, best word)
    type Best = Vec<(u64, f64, Vec<TokenId>)>;
    let branches: Vec<Best> = (0..alphabet.len() as TokenId)
        .into_par_iter()
        .map(|first| {
            let mut best: Best = vec![(0, f64::INFINITY, Vec::new()); max_len + 1];
            walk_reduced(alphabet, first, max_len, &mut |w, m| {
                let slot = &mut best[w.len()];
                slot.0 += 1;
                let d = frobenius_sq(m, &id).as_f64();
                if d < slot.1 {
                    slot.1 = d;
                    slot.2 = w.to_vec();
                }
            });
            best
        })
        .collect();
    let mut per_length = Vec::with_capacity(max_len);
    for length in 1..=max_len {
        let mut words = 0;
        let mut best: (f64, &[TokenId]) = (f64::INFINITY, &[]);
        for b in &branches {
            words += b[length].0;
            if b[length].1 < best.0 {
                best = (b[length].1, &b[length].2);
            }
        }
        let w = alphabet.word(best.1.to_vec())?;
        per_length.push(LengthMinimum {
            length,
            words,
            min_distance: best.0.sqrt(),
            closest_word: alphabet.format_word(&w)?,
        });
    }
    let closest = per_length
        .iter()
        .fold(&per_length[0], |a, b| if b.min_distance < a.min_distance { b } else { a });
    Ok(FreenessReport {
        max_len,
        tol,
        min_distance: closest.min_distance,
        relation: (closest.min_distance <= tol).then(|| closest.closest_word.clone()),
        per_length,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub max_len: usize,
    /// `distances[t][l - 1]`: closest approach to target `t` by words of
    /// length at most `l`.
    pub distances: Vec<Vec<f64>>,
}

impl DensityReport {
    /// Median over targets of the closest approach with words up to `len`.
    pub fn median_at(&self, len: usize) -> f64 {
        let mut v: Vec<f64> = self.distances.iter().map(|d| d[len - 1]).collect();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        }
    }
}

/// How closely words of growing length approach each target. The empty
/// product counts from length 2 on, where `g g^-1` reaches it.
pub fn probe_density<T: Real>(alphabet: &Alphabet<T>, targets: &[G2Element<T>], max_len: usize) -> Result<DensityReport> {
    check_g2_alphabet(alphabet)?;
    if max_len == 0 || max_len > 14 {
        return Err(Error::InvalidParameter(format!("max_len {max_len} outside 1..=14")));
    }
    let tol = T::lit(1e-8);
    for t in targets {
        let check = is_automorphism(t.matrix(), tol)?;
        if !check.holds {
            return Err(Error::InvalidParameter(format!(
                "target is not an automorphism: residual {}",
                check.residual
            )));
        }
    }
    let flat: Vec<&[T]> = targets.iter().map(|t| t.matrix().row_major()).collect();
    // exact length minima, squared, per branch then merged with min
    let exact: Vec<Vec<f64>> = (0..alphabet.len() as TokenId)
        .into_par_iter()
        .map(|first| {
            let mut best = vec![f64::INFINITY; targets.len() * (max_len + 1)];
            walk_reduced(alphabet, first, max_len, &mut |w, m| {
                let row = &mut best[..];
                for (t, target) in flat.iter().enumerate() {
                    let d = frobenius_sq(m, target).as_f64();
                    let slot = &mut row[t * (max_len + 1) + w.len()];
                    if d < *slot {
                        *slot = d;
                    }
                }
            });
            best
        })
        .collect();
    let id = Matrix::<T>::identity(DIM);
    let distances = flat
        .iter()
        .enumerate()
        .map(|(t, target)| {
            let to_identity = frobenius_sq(id.row_major(), target).as_f64();
            let mut running = f64::INFINITY;
            (1..=max_len)
                .map(|len| {
                    for b in &exact {
                        running = running.min(b[t * (max_len + 1) + len]);
                    }
                    if len >= 2 {
                        running = running.min(to_identity);
                    }
                    running.sqrt()
                })
                .collect()
        })
        .collect();
    Ok(DensityReport { max_len, distances })
}

/// Product of six generators with random kinds and uniform angles.
pub fn random_automorphism<T: Real>(rng: &mut impl Rng) -> G2Element<T> {
    let m = (0..6).fold(Matrix::identity(DIM), |acc, _| {
        let kind = if rng.random_bool(0.5) { G2Kind::A } else { G2Kind::B };
        &acc * &g2_generator(kind, T::lit(rng.random_range(0.0..std::f64::consts::TAU)))
    });
    G2Element { matrix: m }
}
