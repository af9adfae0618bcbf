//! Sampled motions, their quantization into words, and the reverse map.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{distance, Matrix};
use crate::scalar::Real;
use crate::seed;
use crate::word::{Alphabet, TokenId, Word};

/// Tokens the greedy quantizer may spend on a single sample step.
pub const MAX_BURST: usize = 8;

/// Time-ordered samples of a path in `R^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polyline<T> {
    points: Vec<Vec<T>>,
    times: Option<Vec<T>>,
    closed: bool,
}

impl<T: Real> Polyline<T> {
    pub fn new(points: Vec<Vec<T>>, closed: bool) -> Result<Self> {
        let dim = points
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidParameter("a polyline needs at least one point".into()))?;
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.len(),
            });
        }
        if points.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coordinate".into()));
        }
        Ok(Self {
            points,
            times: None,
            closed,
        })
    }

    pub fn with_times(mut self, times: Vec<T>) -> Result<Self> {
        if times.len() != self.points.len() {
            return Err(Error::DimensionMismatch {
                expected: self.points.len(),
                found: times.len(),
            });
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("times must be strictly increasing".into()));
        }
        self.times = Some(times);
        Ok(self)
    }

    pub fn points(&self) -> &[Vec<T>] {
        &self.points
    }

    pub fn times(&self) -> Option<&[T]> {
        self.times.as_deref()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn set_closed(&mut self, closed: bool) {
        self.closed = closed;
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    /// Distance between the first and last sample.
    pub fn endpoint_gap(&self) -> T {
        distance(&self.points[0], &self.points[self.points.len() - 1])
    }

    fn cumulative_length(&self) -> Vec<T> {
        let mut acc = Vec::with_capacity(self.points.len());
        let mut total = T::zero();
        acc.push(total);
        for w in self.points.windows(2) {
            total += distance(&w[0], &w[1]);
            acc.push(total);
        }
        acc
    }

    pub fn arc_length(&self) -> T {
        *self.cumulative_length().last().unwrap()
    }

    /// `count` points spaced uniformly by arc length, endpoints included.
    pub fn resample(&self, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidParameter("resampling needs at least two points".into()));
        }
        let cum = self.cumulative_length();
        let total = *cum.last().unwrap();
        if total <= T::zero() {
            return Err(Error::Degenerate("path has zero arc length".into()));
        }
        let mut out = Vec::with_capacity(count);
        let mut seg = 0;
        for k in 0..count {
            let s = total * T::lit(k as f64 / (count - 1) as f64);
            while seg + 2 < cum.len() && cum[seg + 1] < s {
                seg += 1;
            }
            let span = cum[seg + 1] - cum[seg];
            let u = if span > T::zero() {
                ((s - cum[seg]) / span).max(T::zero()).min(T::one())
            } else {
                T::zero()
            };
            let (a, b) = (&self.points[seg], &self.points[seg + 1]);
            out.push(a.iter().zip(b).map(|(&x, &y)| x + (y - x) * u).collect());
        }
        let mut p = Self::new(out, self.closed)?;
        if let Some(times) = &self.times {
            let (t0, t1) = (times[0], times[times.len() - 1]);
            p.times = Some(
                (0..count)
                    .map(|k| t0 + (t1 - t0) * T::lit(k as f64 / (count - 1) as f64))
                    .collect(),
            );
        }
        Ok(p)
    }

    /// Largest distance between corresponding samples.
    pub fn max_pointwise_distance(&self, other: &Self) -> Result<T> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(self
            .points
            .iter()
            .zip(&other.points)
            .map(|(a, b)| distance(a, b))
            .fold(T::zero(), T::max))
    }
}

/// Turns paths into words by steering an anchor point with token matrices.
#[derive(Clone, Debug)]
pub struct Quantizer<T> {
    alphabet: Alphabet<T>,
    seed_state: Matrix<T>,
    anchor: Vec<T>,
    max_burst: usize,
}

impl<T: Real> Quantizer<T> {
    /// Starts from the identity frame.
    pub fn new(alphabet: Alphabet<T>, anchor: Vec<T>) -> Result<Self> {
        let dim = alphabet.dim();
        Self::with_seed_state(alphabet, Matrix::identity(dim), anchor)
    }

    pub fn with_seed_state(alphabet: Alphabet<T>, seed_state: Matrix<T>, anchor: Vec<T>) -> Result<Self> {
        let mats = alphabet
            .matrices()
            .ok_or_else(|| Error::NoRealization(alphabet.name().to_string()))?;
        let dim = alphabet.dim();
        if seed_state.rows() != dim || !seed_state.is_square() {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: seed_state.rows(),
            });
        }
        if anchor.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: anchor.len(),
            });
        }
        let tol = T::lit(T::IDENTITY_TOL);
        let rotations = mats.iter().all(|m| m.orthogonality_residual() <= tol);
        if rotations && seed_state.orthogonality_residual() > tol {
            return Err(Error::InvalidParameter("seed frame is not orthogonal".into()));
        }
        Ok(Self {
            alphabet,
            seed_state,
            anchor,
            max_burst: MAX_BURST,
        })
    }

    pub fn with_max_burst(mut self, max_burst: usize) -> Self {
        self.max_burst = max_burst.max(1);
        self
    }

    pub fn alphabet(&self) -> &Alphabet<T> {
        &self.alphabet
    }

    pub fn anchor(&self) -> &[T] {
        &self.anchor
    }

    pub fn seed_state(&self) -> &Matrix<T> {
        &self.seed_state
    }

    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    fn matrices(&self) -> &[Matrix<T>] {
        self.alphabet.matrices().expect("checked at construction")
    }

    /// Greedy quantization into `n` steps. A path with exactly `n + 1`
    /// samples is used as is; anything else is resampled by arc length.
    pub fn quantize(&self, path: &Polyline<T>, n: usize) -> Result<Word> {
        if n == 0 {
            return Err(Error::InvalidParameter("quantization needs n >= 1".into()));
        }
        if path.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: path.dim(),
            });
        }
        if path.len() == 1 || path.arc_length() == T::zero() {
            return Ok(self.alphabet.empty_word());
        }
        let resampled;
        let samples = if path.len() == n + 1 {
            path.points()
        } else {
            match path.resample(n + 1) {
                Ok(p) => {
                    resampled = p;
                    resampled.points()
                }
                Err(Error::Degenerate(_)) => return Ok(self.alphabet.empty_word()),
                Err(e) => return Err(e),
            }
        };

        let moved: Vec<Vec<T>> = self.matrices().iter().map(|m| m.mul_vec(&self.anchor)).collect();
        let mats = self.matrices();
        let mut frame = self.seed_state.clone();
        let mut tokens: Vec<TokenId> = Vec::with_capacity(n);
        for target in &samples[1..] {
            let best = |frame: &Matrix<T>| -> (usize, T) {
                moved
                    .iter()
                    .enumerate()
                    .map(|(t, v)| (t, distance(&frame.mul_vec(v), target)))
                    .fold((0, T::infinity()), |acc, cur| if cur.1 < acc.1 { cur } else { acc })
            };
            let (t, mut current) = best(&frame);
            frame = &frame * &mats[t];
            tokens.push(t as TokenId);
            for _ in 1..self.max_burst {
                let (t, d) = best(&frame);
                if d >= current {
                    break;
                }
                current = d;
                frame = &frame * &mats[t];
                tokens.push(t as TokenId);
            }
        }
        self.alphabet.word(tokens)
    }

    /// Anchor images of every prefix of `w`: `|w| + 1` points.
    pub fn reconstruct(&self, w: &Word) -> Result<Polyline<T>> {
        if w.alphabet_name() != self.alphabet.name() {
            return Err(Error::AlphabetMismatch {
                left: w.alphabet_name().to_string(),
                right: self.alphabet.name().to_string(),
            });
        }
        let mats = self.matrices();
        let mut frame = self.seed_state.clone();
        let mut points = Vec::with_capacity(w.len() + 1);
        points.push(frame.mul_vec(&self.anchor));
        for &t in w.tokens() {
            frame = &frame * &mats[t as usize];
            points.push(frame.mul_vec(&self.anchor));
        }
        let scale = T::one().max(crate::linalg::norm(&self.anchor));
        let gap = distance(&points[0], &points[points.len() - 1]);
        let closed = !w.is_empty() && gap <= T::lit(T::IDENTITY_TOL) * scale;
        Polyline::new(points, closed)
    }
}

/// The six-token rotation alphabet `Rx, Ry, Rz` plus inverses, ids in that
/// order followed by `Rx^-1, Ry^-1, Rz^-1`.
pub fn so3_alphabet<T: Real>(theta: T) -> Result<Alphabet<T>> {
    if !(theta > T::zero() && theta < T::PI()) {
        return Err(Error::InvalidParameter(format!("theta = {theta} outside (0, pi)")));
    }
    let (s, c) = theta.sin_cos();
    let (o, z) = (T::one(), T::zero());
    let rx = Matrix::from_rows(&[vec![o, z, z], vec![z, c, -s], vec![z, s, c]])?;
    let ry = Matrix::from_rows(&[vec![c, z, s], vec![z, o, z], vec![-s, z, c]])?;
    let rz = Matrix::from_rows(&[vec![c, -s, z], vec![s, c, z], vec![z, z, o]])?;
    Alphabet::orthogonal_pairs(
        "so3",
        vec![("Rx".into(), rx), ("Ry".into(), ry), ("Rz".into(), rz)],
    )
}

/// Default anchor for rotation alphabets: `(0, 1, -1)/√2`, moved by every
/// axis rotation and orthogonal to the `(1, 1, 1)` axis that `Rx Ry Rz`
/// nearly turns about.
pub fn so3_anchor<T: Real>() -> Vec<T> {
    let v = T::one() / T::lit(2.0).sqrt();
    vec![T::zero(), v, -v]
}

/// `(Rx Ry Rz)^(2n)` repeated `n` times.
pub fn pathword<T: Real>(alphabet: &Alphabet<T>, n: usize) -> Result<Word> {
    let factor = alphabet.parse_word("Rx Ry Rz")?.repeat(2 * n);
    Ok(factor.repeat(n))
}

/// `Rx^n`.
pub fn loopword<T: Real>(alphabet: &Alphabet<T>, n: usize) -> Result<Word> {
    Ok(alphabet.parse_word("Rx")?.repeat(n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    TokenSubstitution,
    CoordinateJitter,
}

/// A seeded perturbation: substitution probability for words, or Gaussian
/// standard deviation for coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub model: NoiseModel,
    pub amplitude: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn substitution(probability: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&probability) {
            return Err(Error::InvalidParameter(format!(
                "substitution probability {probability} outside [0, 1]"
            )));
        }
        Ok(Self {
            model: NoiseModel::TokenSubstitution,
            amplitude: probability,
            seed,
        })
    }

    pub fn jitter(sigma: f64, seed: u64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("jitter sigma {sigma} must be >= 0")));
        }
        Ok(Self {
            model: NoiseModel::CoordinateJitter,
            amplitude: sigma,
            seed,
        })
    }
}

/// Replaces each token, independently with probability `amplitude`, by a
/// uniformly chosen different token.
///
/// The coin and the replacement are drawn for every position, so for a fixed
/// seed the substituted set only grows with the amplitude.
pub fn perturb_word<T: Real>(alphabet: &Alphabet<T>, w: &Word, noise: &NoiseSpec) -> Result<Word> {
    if noise.model != NoiseModel::TokenSubstitution {
        return Err(Error::InvalidParameter("word noise needs the token_substitution model".into()));
    }
    NoiseSpec::substitution(noise.amplitude, noise.seed)?;
    let size = alphabet.len();
    if size < 2 {
        return Ok(w.clone());
    }
    let mut rng = seed::rng(noise.seed);
    let tokens = w
        .tokens()
        .iter()
        .map(|&t| {
            let coin: f64 = rng.random();
            let pick = rng.random_range(0..size - 1) as TokenId;
            let other = if pick >= t { pick + 1 } else { pick };
            if coin < noise.amplitude {
                other
            } else {
                t
            }
        })
        .collect();
    alphabet.word(tokens)
}

/// Adds independent zero-mean Gaussian noise to every coordinate.
pub fn perturb_path<T: Real>(path: &Polyline<T>, noise: &NoiseSpec) -> Result<Polyline<T>> {
    if noise.model != NoiseModel::CoordinateJitter {
        return Err(Error::InvalidParameter("path noise needs the coordinate_jitter model".into()));
    }
    let sigma = NoiseSpec::jitter(noise.amplitude, noise.seed)?.amplitude;
    if sigma == 0.0 {
        return Ok(path.clone());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = seed::rng(noise.seed);
    let mut out = path.clone();
    for p in &mut out.points {
        for x in p.iter_mut() {
            *x += T::lit(normal.sample(&mut rng));
        }
    }
    Ok(out)
}

/// Discrete random walk from the origin: `steps + 1` points at times `k·dt`,
/// increments with standard deviation `sigma·√dt` per coordinate.
pub fn brownian_path<T: Real>(steps: usize, dt: T, sigma: T, dim: usize, seed: u64) -> Result<Polyline<T>> {
    if steps < 2 || dim == 0 || dt.is_nan() || dt <= T::zero() || sigma.is_nan() || sigma <= T::zero() {
        return Err(Error::InvalidParameter(
            "brownian path needs steps >= 2, dim >= 1, dt > 0, sigma > 0".into(),
        ));
    }
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let scale = sigma * dt.sqrt();
    let mut rng = seed::rng(seed);
    let mut current = vec![T::zero(); dim];
    let mut points = Vec::with_capacity(steps + 1);
    points.push(current.clone());
    for _ in 0..steps {
        for x in current.iter_mut() {
            *x += scale * T::lit(normal.sample(&mut rng));
        }
        points.push(current.clone());
    }
    let times = (0..=steps).map(|k| dt * T::lit(k as f64)).collect();
    Polyline::new(points, false)?.with_times(times)
}

/// Mean over start times of `‖(x(t + Δt) − x(t)) / Δt‖²`, pairing each
/// sample with the first one at least `window` later.
pub fn mean_square_velocity<T: Real>(path: &Polyline<T>, window: T) -> Result<T> {
    let times = path
        .times()
        .ok_or_else(|| Error::InvalidParameter("mean square velocity needs sample times".into()))?;
    let duration = times[times.len() - 1] - times[0];
    if window > duration {
        return Err(Error::InvalidParameter(format!(
            "window {window} exceeds path duration {duration}"
        )));
    }
    let min_gap = times
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(T::infinity(), T::min);
    let slack = min_gap * T::lit(1e-9);
    if window + slack < min_gap {
        return Err(Error::InvalidParameter(format!(
            "window {window} is shorter than the sample spacing {min_gap}"
        )));
    }
    let pts = path.points();
    let mut sum = T::zero();
    let mut count = 0usize;
    let mut j = 0;
    for i in 0..times.len() {
        let goal = times[i] + window - slack;
        j = j.max(i + 1);
        while j < times.len() && times[j] < goal {
            j += 1;
        }
        if j >= times.len() {
            break;
        }
        let dt = times[j] - times[i];
        sum += pts[i]
            .iter()
            .zip(&pts[j])
            .map(|(&a, &b)| {
                let v = (b - a) / dt;
                v * v
            })
            .sum::<T>();
        count += 1;
    }
    if count == 0 {
        return Err(Error::InvalidParameter("no sample pair spans the window".into()));
    }
    Ok(sum / T::lit(count as f64))
}
