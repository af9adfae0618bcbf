//! Least-squares B-spline approximation of sampled paths, tube audits, and
//! the complexity drop from replacing a noisy path with its smooth fit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexity::{estimate_word, EstimatorId};
use crate::error::{Error, Result};
use crate::linalg::{distance, Matrix};
use crate::quantize::{loopword, perturb_path, NoiseSpec, Polyline, Quantizer};
use crate::scalar::Real;

pub const MIN_DEGREE: usize = 4;

/// Dense samples per input sample when measuring deviation.
pub const OVERSAMPLING: usize = 16;

const REFINE_STEPS: usize = 60;

/// A clamped (open) or periodic (closed) B-spline on the parameter range
/// `[0, 1]`. A closed curve stores its first `degree` control points again
/// at the end, so the knot count is always `control count + degree + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveData<T>")]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>", serialize = "T: Serialize"))]
pub struct BSplineCurve<T> {
    degree: usize,
    knots: Vec<T>,
    control_points: Vec<Vec<T>>,
    closed: bool,
}

#[derive(Deserialize)]
struct CurveData<T> {
    degree: usize,
    knots: Vec<T>,
    control_points: Vec<Vec<T>>,
    closed: bool,
}

impl<T: Real> TryFrom<CurveData<T>> for BSplineCurve<T> {
    type Error = Error;

    fn try_from(d: CurveData<T>) -> Result<Self> {
        Self::new(d.degree, d.knots, d.control_points, d.closed)
    }
}

impl<T: Real> BSplineCurve<T> {
    pub fn new(degree: usize, knots: Vec<T>, control_points: Vec<Vec<T>>, closed: bool) -> Result<Self> {
        if degree == 0 || control_points.len() < degree + 1 {
            return Err(Error::InvalidParameter(format!(
                "degree {degree} needs at least {} control points, got {}",
                degree + 1,
                control_points.len()
            )));
        }
        if knots.len() != control_points.len() + degree + 1 {
            return Err(Error::DimensionMismatch {
                expected: control_points.len() + degree + 1,
                found: knots.len(),
            });
        }
        if knots.windows(2).any(|w| w[1] < w[0]) || knots.iter().any(|k| !k.is_finite()) {
            return Err(Error::InvalidParameter("knots must be finite and non-decreasing".into()));
        }
        let dim = control_points[0].len();
        if let Some(p) = control_points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.len(),
            });
        }
        let n = control_points.len();
        if knots[degree].partial_cmp(&knots[n]) != Some(std::cmp::Ordering::Less) {
            return Err(Error::InvalidParameter("empty parameter domain".into()));
        }
        if closed && (0..degree).any(|i| control_points[i] != control_points[n - degree + i]) {
            return Err(Error::InvalidParameter(
                "closed curve must repeat its first `degree` control points".into(),
            ));
        }
        Ok(Self {
            degree,
            knots,
            control_points,
            closed,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &[T] {
        &self.knots
    }

    pub fn control_points(&self) -> &[Vec<T>] {
        &self.control_points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn dim(&self) -> usize {
        self.control_points[0].len()
    }

    /// Control points a closed curve can move independently.
    pub fn free_control_count(&self) -> usize {
        free_count(self.control_points.len(), self.degree, self.closed)
    }

    fn domain(&self) -> (T, T) {
        (self.knots[self.degree], self.knots[self.control_points.len()])
    }

    /// Knot parameter for `s ∈ [0, 1]`; closed curves wrap `s` first.
    fn knot_param(&self, s: T) -> T {
        let (a, b) = self.domain();
        let s = if self.closed {
            s - s.floor()
        } else {
            s.max(T::zero()).min(T::one())
        };
        a + (b - a) * s
    }

    fn span(&self, u: T) -> usize {
        span_of(&self.knots, self.degree, self.control_points.len(), u)
    }

    /// Nonzero basis values at `s`, with the index of the first one.
    pub fn basis(&self, s: T) -> (usize, Vec<T>) {
        let u = self.knot_param(s);
        let span = self.span(u);
        (span - self.degree, basis_values(&self.knots, self.degree, span, u))
    }

    /// Point at `s ∈ [0, 1]` by de Boor's algorithm.
    pub fn eval(&self, s: T) -> Vec<T> {
        let p = self.degree;
        let u = self.knot_param(s);
        let k = self.span(u);
        let t = &self.knots;
        let mut d: Vec<Vec<T>> = (0..=p).map(|j| self.control_points[j + k - p].clone()).collect();
        for r in 1..=p {
            for j in (r..=p).rev() {
                let (lo, hi) = (t[j + k - p], t[j + 1 + k - r]);
                let alpha = if hi > lo { (u - lo) / (hi - lo) } else { T::zero() };
                let (left, right) = d.split_at_mut(j);
                for (x, &y) in right[0].iter_mut().zip(&left[j - 1]) {
                    *x = y * (T::one() - alpha) + *x * alpha;
                }
            }
        }
        d.swap_remove(p)
    }

    /// `count` points at uniform parameters; a closed curve ends where it starts.
    pub fn sample(&self, count: usize) -> Result<Polyline<T>> {
        if count < 2 {
            return Err(Error::InvalidParameter("sampling needs at least two points".into()));
        }
        let last = T::lit((count - 1) as f64);
        let mut points: Vec<Vec<T>> = (0..count).map(|i| self.eval(T::lit(i as f64) / last)).collect();
        if self.closed {
            points[count - 1] = points[0].clone();
        }
        Polyline::new(points, self.closed)
    }

    pub fn to_json(&self) -> Result<String>
    where
        T: Serialize,
    {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self>
    where
        T: for<'de> Deserialize<'de>,
    {
        Ok(serde_json::from_str(text)?)
    }
}

fn free_count(controls: usize, degree: usize, closed: bool) -> usize {
    if closed {
        controls - degree
    } else {
        controls
    }
}

/// Largest `k` in `[degree, n − 1]` with `knots[k] <= u`.
fn span_of<T: Real>(knots: &[T], degree: usize, n: usize, u: T) -> usize {
    if u >= knots[n] {
        return (degree..n).rev().find(|&k| knots[k] < knots[k + 1]).unwrap_or(n - 1);
    }
    let (mut lo, mut hi) = (degree, n);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if knots[mid] <= u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Cox–de Boor triangle: the `degree + 1` basis functions nonzero on `span`.
fn basis_values<T: Real>(knots: &[T], degree: usize, span: usize, u: T) -> Vec<T> {
    let mut n = vec![T::zero(); degree + 1];
    let mut left = vec![T::zero(); degree + 1];
    let mut right = vec![T::zero(); degree + 1];
    n[0] = T::one();
    for j in 1..=degree {
        left[j] = u - knots[span + 1 - j];
        right[j] = knots[span + j] - u;
        let mut saved = T::zero();
        for r in 0..j {
            let denom = right[r + 1] + left[j - r];
            let temp = if denom > T::zero() { n[r] / denom } else { T::zero() };
            n[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        n[j] = saved;
    }
    n
}

/// Uniform knots on `[0, 1]`: clamped for open curves, extended periodically
/// past both ends for closed ones.
fn uniform_knots<T: Real>(degree: usize, free: usize, closed: bool) -> Vec<T> {
    if closed {
        let total = free + 2 * degree + 1;
        return (0..total)
            .map(|i| T::lit((i as f64 - degree as f64) / free as f64))
            .collect();
    }
    let inner = free - degree;
    let mut knots = vec![T::zero(); degree + 1];
    knots.extend((1..inner).map(|i| T::lit(i as f64 / inner as f64)));
    knots.extend(std::iter::repeat_n(T::one(), degree + 1));
    knots
}

/// Cumulative chord length over total, in `[0, 1]`. A closed path counts
/// the segment back to its first point.
fn chord_params<T: Real>(points: &[Vec<T>], closed: bool) -> Vec<T> {
    let mut cum = Vec::with_capacity(points.len());
    let mut acc = T::zero();
    cum.push(acc);
    for w in points.windows(2) {
        acc += distance(&w[0], &w[1]);
        cum.push(acc);
    }
    let total = if closed {
        acc + distance(&points[points.len() - 1], &points[0])
    } else {
        acc
    };
    cum.into_iter().map(|c| c / total).collect()
}

/// Least-squares fit with `n_ctrl` free control points.
pub fn fit_bspline<T: Real>(path: &Polyline<T>, degree: usize, n_ctrl: usize) -> Result<BSplineCurve<T>> {
    if degree < MIN_DEGREE {
        return Err(Error::InvalidParameter(format!("degree {degree} below {MIN_DEGREE}")));
    }
    let points = path.points();
    if points.len() < n_ctrl || points.len() < degree + 1 {
        return Err(Error::Underdetermined {
            points: points.len(),
            unknowns: n_ctrl.max(degree + 1),
        });
    }
    if n_ctrl < degree + 1 {
        return Err(Error::InvalidParameter(format!(
            "{n_ctrl} control points cannot carry degree {degree}"
        )));
    }
    if points.iter().all(|p| distance(p, &points[0]) == T::zero()) {
        return Err(Error::Degenerate("all points coincide".into()));
    }
    let closed = path.is_closed();
    let knots = uniform_knots::<T>(degree, n_ctrl, closed);
    let controls = if closed { n_ctrl + degree } else { n_ctrl };
    let params = chord_params(points, closed);

    let (a, b) = (knots[degree], knots[controls]);
    let mut design = Matrix::zeros(points.len(), n_ctrl);
    for (row, &s) in params.iter().enumerate() {
        let s = if closed { s - s.floor() } else { s };
        let u = a + (b - a) * s;
        let span = span_of(&knots, degree, controls, u);
        for (j, v) in basis_values(&knots, degree, span, u).into_iter().enumerate() {
            design[(row, (span - degree + j) % n_ctrl)] += v;
        }
    }
    let rhs = Matrix::from_rows(points)?;
    let solved = design.least_squares(&rhs)?;
    let mut control_points: Vec<Vec<T>> = (0..n_ctrl).map(|i| solved.row(i).to_vec()).collect();
    if closed {
        let wrap: Vec<Vec<T>> = control_points[..degree].to_vec();
        control_points.extend(wrap);
    }
    BSplineCurve::new(degree, knots, control_points, closed)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TubeReport {
    pub epsilon: f64,
    pub max_deviation: f64,
    pub contained: bool,
    pub complexity_original_bits: Option<f64>,
    pub complexity_spline_bits: Option<f64>,
    pub ratio: Option<f64>,
}

impl TubeReport {
    pub fn with_complexity(mut self, c: &ComplexityReduction) -> Self {
        self.complexity_original_bits = Some(c.original_bits);
        self.complexity_spline_bits = Some(c.spline_bits);
        self.ratio = Some(c.ratio);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexityReduction {
    pub original_bits: f64,
    pub spline_bits: f64,
    pub ratio: f64,
}

/// Largest distance from a sample of `path` to the curve.
pub fn max_deviation<T: Real>(curve: &BSplineCurve<T>, path: &Polyline<T>) -> Result<T> {
    if curve.dim() != path.dim() {
        return Err(Error::DimensionMismatch {
            expected: curve.dim(),
            found: path.dim(),
        });
    }
    let dense = (OVERSAMPLING * path.len()).max(64);
    let step = T::one() / T::lit((dense - 1) as f64);
    let grid: Vec<(T, Vec<T>)> = (0..dense)
        .map(|i| {
            let s = T::lit(i as f64) * step;
            (s, curve.eval(s))
        })
        .collect();
    let worst = path
        .points()
        .par_iter()
        .map(|p| {
            let (s0, d0) = grid
                .iter()
                .map(|(s, q)| (*s, distance(p, q)))
                .fold((T::zero(), T::infinity()), |a, b| if b.1 < a.1 { b } else { a });
            d0.min(refine(curve, p, s0 - step, s0 + step))
        })
        .reduce(T::zero, T::max);
    Ok(worst)
}

/// Golden-section search for the closest curve point on `[lo, hi]`.
fn refine<T: Real>(curve: &BSplineCurve<T>, p: &[T], lo: T, hi: T) -> T {
    let (mut lo, mut hi) = if curve.is_closed() {
        (lo, hi)
    } else {
        (lo.max(T::zero()), hi.min(T::one()))
    };
    let g = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let dist = |s: T| distance(p, &curve.eval(s));
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (dist(x1), dist(x2));
    for _ in 0..REFINE_STEPS {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = dist(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = dist(x2);
        }
    }
    f1.min(f2)
}

/// Geometric audit: deviation of the samples from the curve against `epsilon`.
pub fn tube_check<T: Real>(curve: &BSplineCurve<T>, path: &Polyline<T>, epsilon: f64) -> Result<TubeReport> {
    let dev = max_deviation(curve, path)?.as_f64();
    Ok(TubeReport {
        epsilon,
        max_deviation: dev,
        contained: dev <= epsilon,
        complexity_original_bits: None,
        complexity_spline_bits: None,
        ratio: None,
    })
}

/// Estimates the quantized original against the quantized curve sampled at
/// the same count.
pub fn complexity_reduction<T: Real>(
    original: &Polyline<T>,
    curve: &BSplineCurve<T>,
    quantizer: &Quantizer<T>,
    estimator: EstimatorId,
) -> Result<ComplexityReduction> {
    let count = original.len().max(2);
    let smooth = curve.sample(count)?;
    let alphabet = quantizer.alphabet();
    let original_word = quantizer.quantize(original, count - 1)?;
    let smooth_word = quantizer.quantize(&smooth, count - 1)?;
    let original_bits = estimate_word(alphabet, &original_word, estimator)?.bits;
    let spline_bits = estimate_word(alphabet, &smooth_word, estimator)?.bits;
    Ok(ComplexityReduction {
        original_bits,
        spline_bits,
        ratio: spline_bits / original_bits,
    })
}

/// Fit, tube check and complexity comparison in one step.
pub fn audit<T: Real>(
    path: &Polyline<T>,
    degree: usize,
    n_ctrl: usize,
    epsilon: f64,
    quantizer: &Quantizer<T>,
    estimator: EstimatorId,
) -> Result<(BSplineCurve<T>, TubeReport)> {
    let curve = fit_bspline(path, degree, n_ctrl)?;
    let reduction = complexity_reduction(path, &curve, quantizer, estimator)?;
    let report = tube_check(&curve, path, epsilon)?.with_complexity(&reduction);
    Ok((curve, report))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitChoice {
    pub degree: usize,
    pub n_ctrl: usize,
    pub report: TubeReport,
}

/// Among the given fits, the contained one with the smallest complexity
/// ratio; ties go to the earlier candidate. `None` if no fit stays inside
/// the tube.
pub fn best_fit<T: Real>(
    path: &Polyline<T>,
    candidates: &[(usize, usize)],
    epsilon: f64,
    quantizer: &Quantizer<T>,
    estimator: EstimatorId,
) -> Result<Option<FitChoice>> {
    let mut best: Option<FitChoice> = None;
    for &(degree, n_ctrl) in candidates {
        let (_, report) = audit(path, degree, n_ctrl, epsilon, quantizer, estimator)?;
        if !report.contained {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) => report.ratio < b.report.ratio,
        };
        if better {
            best = Some(FitChoice { degree, n_ctrl, report });
        }
    }
    Ok(best)
}

/// Sampled `Rx^n` loop with Gaussian coordinate jitter; the quantizer must
/// be built on a rotation alphabet whose angle divides the full turn by `n`.
pub fn jittered_loop<T: Real>(quantizer: &Quantizer<T>, n: usize, sigma: f64, seed: u64) -> Result<Polyline<T>> {
    let clean = quantizer.reconstruct(&loopword(quantizer.alphabet(), n)?)?;
    perturb_path(&clean, &NoiseSpec::jitter(sigma, seed)?)
}
