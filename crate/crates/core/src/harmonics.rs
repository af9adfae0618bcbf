//! Real spherical harmonics and the lobed surfaces `r = |Y(θ, φ)|`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

pub const MIN_STEPS: usize = 8;
pub const DEFAULT_RESOLUTION: (usize, usize) = (64, 128);
pub const MAX_GRAM_DEGREE: usize = 10;

/// The `(l, m)` pairs drawn as surfaces by default.
pub const SHOWCASE: [(usize, i64); 5] = [(3, 2), (7, 1), (4, 2), (5, 4), (3, 0)];

fn check_lm(l: usize, m: i64) -> Result<()> {
    if m.unsigned_abs() as usize > l {
        return Err(Error::InvalidHarmonic { l, m });
    }
    Ok(())
}

/// Orthonormal associated Legendre values `N_k^|m| P_k^|m|(cos θ)` for
/// `k = |m|..=l`, Condon–Shortley phase included.
fn legendre_column<T: Real>(l: usize, m: usize, theta: T) -> Vec<T> {
    let (s, x) = theta.sin_cos();
    let mut pmm = T::one() / (T::lit(4.0) * T::PI()).sqrt();
    for k in 1..=m {
        let k = T::lit(k as f64);
        pmm *= -((T::lit(2.0) * k + T::one()) / (T::lit(2.0) * k)).sqrt() * s;
    }
    let mut col = Vec::with_capacity(l - m + 1);
    col.push(pmm);
    if l == m {
        return col;
    }
    col.push(x * T::lit((2 * m + 3) as f64).sqrt() * pmm);
    let a = |k: usize| {
        let (k, m) = (k as f64, m as f64);
        T::lit(((4.0 * k * k - 1.0) / (k * k - m * m)).sqrt())
    };
    for k in m + 2..=l {
        let n = col.len();
        let next = a(k) * (x * col[n - 1] - col[n - 2] / a(k - 1));
        col.push(next);
    }
    col
}

/// Real orthonormal `Y_l^m`: cosine in `φ` for `m > 0`, sine for `m < 0`.
pub fn eval_ylm<T: Real>(l: usize, m: i64, theta: T, phi: T) -> Result<T> {
    check_lm(l, m)?;
    if !(theta >= T::zero() && theta <= T::PI()) || !phi.is_finite() {
        return Err(Error::InvalidParameter(format!("angles ({theta}, {phi}) out of range")));
    }
    let am = m.unsigned_abs() as usize;
    let p = *legendre_column(l, am, theta).last().expect("non-empty column");
    let k = T::lit(am as f64);
    Ok(match m {
        0 => p,
        m if m > 0 => T::lit(2f64.sqrt()) * p * (k * phi).cos(),
        _ => T::lit(2f64.sqrt()) * p * (k * phi).sin(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarmonicSpec {
    pub l: usize,
    pub m: i64,
    pub theta_steps: usize,
    pub phi_steps: usize,
}

impl HarmonicSpec {
    pub fn new(l: usize, m: i64, theta_steps: usize, phi_steps: usize) -> Result<Self> {
        check_lm(l, m)?;
        if theta_steps < MIN_STEPS || phi_steps < MIN_STEPS {
            return Err(Error::InvalidParameter(format!(
                "resolution {theta_steps}x{phi_steps} below {MIN_STEPS}x{MIN_STEPS}"
            )));
        }
        Ok(Self {
            l,
            m,
            theta_steps,
            phi_steps,
        })
    }

    pub fn with_default_resolution(l: usize, m: i64) -> Result<Self> {
        Self::new(l, m, DEFAULT_RESOLUTION.0, DEFAULT_RESOLUTION.1)
    }

    /// `θ` of ring `i`; rings run pole to pole inclusive.
    pub fn theta(&self, i: usize) -> f64 {
        std::f64::consts::PI * i as f64 / (self.theta_steps - 1) as f64
    }

    pub fn phi(&self, j: usize) -> f64 {
        2.0 * std::f64::consts::PI * j as f64 / self.phi_steps as f64
    }

    /// `Y_l_m` at the default resolution, `Y_l_m_TxP` otherwise.
    pub fn file_stem(&self) -> String {
        if (self.theta_steps, self.phi_steps) == DEFAULT_RESOLUTION {
            format!("Y_{}_{}", self.l, self.m)
        } else {
            format!("Y_{}_{}_{}x{}", self.l, self.m, self.theta_steps, self.phi_steps)
        }
    }
}

/// Triangulated sphere-like surface. Each pole is a single vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceMesh<T> {
    pub vertices: Vec<[T; 3]>,
    pub triangles: Vec<[usize; 3]>,
    /// Signed harmonic value per vertex.
    pub scalar: Vec<T>,
}

impl<T: Real> SurfaceMesh<T> {
    pub fn edge_count(&self) -> usize {
        let mut edges: Vec<(usize, usize)> = self
            .triangles
            .iter()
            .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges.len()
    }

    pub fn to_obj(&self, spec: &HarmonicSpec) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# r = |Y_{}^{}(theta, phi)|", spec.l, spec.m);
        let _ = writeln!(out, "# l {} m {} resolution {}x{}", spec.l, spec.m, spec.theta_steps, spec.phi_steps);
        let _ = writeln!(out, "# radius abs");
        for v in &self.vertices {
            let _ = writeln!(out, "v {} {} {}", v[0], v[1], v[2]);
        }
        for t in &self.triangles {
            let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
        }
        out
    }
}

/// Vertex `(r sinθ cosφ, r sinθ sinφ, r cosθ)` with `r = |Y|`.
pub fn mesh_harmonic<T: Real>(spec: &HarmonicSpec) -> Result<SurfaceMesh<T>> {
    let spec = HarmonicSpec::new(spec.l, spec.m, spec.theta_steps, spec.phi_steps)?;
    let (nt, np) = (spec.theta_steps, spec.phi_steps);
    let vertex = |theta: T, phi: T| -> Result<([T; 3], T)> {
        let y = eval_ylm(spec.l, spec.m, theta, phi)?;
        let r = y.abs();
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Ok(([r * st * cp, r * st * sp, r * ct], y))
    };
    let rings: Vec<Vec<([T; 3], T)>> = (1..nt - 1)
        .into_par_iter()
        .map(|i| {
            let theta = T::lit(spec.theta(i));
            (0..np).map(|j| vertex(theta, T::lit(spec.phi(j)))).collect()
        })
        .collect::<Result<_>>()?;
    let north = vertex(T::zero(), T::zero())?;
    let south = vertex(T::PI(), T::zero())?;

    let mut vertices = Vec::with_capacity((nt - 2) * np + 2);
    let mut scalar = Vec::with_capacity(vertices.capacity());
    for (v, y) in std::iter::once(north).chain(rings.into_iter().flatten()).chain(std::iter::once(south)) {
        vertices.push(v);
        scalar.push(y);
    }
    let south_idx = vertices.len() - 1;
    let at = |ring: usize, j: usize| 1 + ring * np + j % np;
    let mut triangles = Vec::with_capacity(2 * np * (nt - 2));
    for j in 0..np {
        triangles.push([0, at(0, j), at(0, j + 1)]);
    }
    for ring in 0..nt - 3 {
        for j in 0..np {
            let (a, b, c, d) = (at(ring, j), at(ring, j + 1), at(ring + 1, j), at(ring + 1, j + 1));
            triangles.push([a, c, d]);
            triangles.push([a, d, b]);
        }
    }
    for j in 0..np {
        triangles.push([south_idx, at(nt - 3, j + 1), at(nt - 3, j)]);
    }
    Ok(SurfaceMesh {
        vertices,
        triangles,
        scalar,
    })
}

/// `theta,phi,y` over the full grid, poles included.
pub fn harmonic_csv(spec: &HarmonicSpec) -> Result<String> {
    let mut out = String::from("theta,phi,y\n");
    for i in 0..spec.theta_steps {
        for j in 0..spec.phi_steps {
            let (t, p) = (spec.theta(i), spec.phi(j));
            let _ = writeln!(out, "{t},{p},{}", eval_ylm(spec.l, spec.m, t, p)?);
        }
    }
    Ok(out)
}

/// Vertex positions and 0-based triangles.
pub type ObjData = (Vec<[f64; 3]>, Vec<[usize; 3]>);

/// Vertices and 0-based faces of an OBJ file; other records are skipped.
pub fn parse_obj(text: &str) -> Result<ObjData> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let mut parts = line.split_whitespace();
        let bad = |what: &str| Error::Parse(format!("line {}: {what}", n + 1));
        match parts.next() {
            Some("v") => {
                let c: Vec<f64> = parts
                    .map(|s| s.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad("bad coordinate"))?;
                let [x, y, z] = c[..] else {
                    return Err(bad("vertex needs three coordinates"));
                };
                vertices.push([x, y, z]);
            }
            Some("f") => {
                let idx: Vec<usize> = parts
                    .map(|s| s.split('/').next().unwrap_or("").parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad("bad face index"))?;
                let [a, b, c] = idx[..] else {
                    return Err(bad("only triangles are supported"));
                };
                faces.push([a, b, c]);
            }
            _ => {}
        }
    }
    let faces = faces
        .into_iter()
        .map(|f| {
            if f.iter().any(|&i| i == 0 || i > vertices.len()) {
                Err(Error::Parse(format!("face {f:?} references a missing vertex")))
            } else {
                Ok(f.map(|i| i - 1))
            }
        })
        .collect::<Result<_>>()?;
    Ok((vertices, faces))
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = T::lit(x);
        nodes[n - 1 - i] = T::lit(-x);
        weights[i] = T::lit(w);
        weights[n - 1 - i] = T::lit(w);
    }
    (nodes, weights)
}

/// Row/column index of `(l, m)` in the Gram matrix.
pub fn gram_index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

/// Inner products of every `Y_l^m` with `l <= l_max` under a 64-node
/// Gauss–Legendre rule in `cos θ` and a 128-point rule in `φ`.
pub fn orthonormality_matrix<T: Real>(l_max: usize) -> Result<Matrix<T>> {
    if l_max > MAX_GRAM_DEGREE {
        return Err(Error::InvalidParameter(format!("l_max {l_max} above {MAX_GRAM_DEGREE}")));
    }
    let (nodes, weights) = gauss_legendre::<T>(64);
    let nphi = 128;
    let size = (l_max + 1) * (l_max + 1);
    let dphi = T::lit(2.0 * std::f64::consts::PI / nphi as f64);
    let partials: Vec<Matrix<T>> = nodes
        .par_iter()
        .zip(&weights)
        .map(|(&x, &w)| {
            let theta = x.acos();
            let mut g = Matrix::zeros(size, size);
            for j in 0..nphi {
                let phi = T::lit(j as f64) * dphi;
                let values: Vec<T> = (0..=l_max)
                    .flat_map(|l| (-(l as i64)..=l as i64).map(move |m| (l, m)))
                    .map(|(l, m)| eval_ylm(l, m, theta, phi).expect("valid pair"))
                    .collect();
                for (a, &ya) in values.iter().enumerate() {
                    for (b, &yb) in values.iter().enumerate() {
                        g[(a, b)] += w * dphi * ya * yb;
                    }
                }
            }
            g
        })
        .collect();
    let mut gram = Matrix::zeros(size, size);
    for g in &partials {
        for a in 0..size {
            for b in 0..size {
                gram[(a, b)] += g[(a, b)];
            }
        }
    }
    Ok(gram)
}

/// Sign changes along a sequence, ignoring values within `tol` of zero;
/// `cyclic` also compares the last kept value with the first.
pub fn sign_changes<T: Real>(values: &[T], tol: T, cyclic: bool) -> usize {
    let signs: Vec<bool> = values.iter().filter(|v| v.abs() > tol).map(|v| *v > T::zero()).collect();
    let mut n = signs.windows(2).filter(|w| w[0] != w[1]).count();
    if cyclic && signs.len() > 1 && signs[0] != signs[signs.len() - 1] {
        n += 1;
    }
    n
}

/// Sign changes of a mesh's harmonic along its strongest meridian (pole to
/// pole) and its strongest latitude ring, next to the counts `l - |m|` and
/// `2|m|` that the nodal lines force.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodalCount {
    pub l: usize,
    pub m: i64,
    pub meridian: usize,
    pub meridian_expected: usize,
    pub ring: usize,
    pub ring_expected: usize,
}

impl NodalCount {
    pub fn exact(&self) -> bool {
        self.meridian == self.meridian_expected && self.ring == self.ring_expected
    }
}

pub fn nodal_counts<T: Real>(spec: &HarmonicSpec, mesh: &SurfaceMesh<T>) -> Result<NodalCount> {
    let (nt, np) = (spec.theta_steps, spec.phi_steps);
    let rings = nt - 2;
    if mesh.scalar.len() != rings * np + 2 {
        return Err(Error::DimensionMismatch {
            expected: rings * np + 2,
            found: mesh.scalar.len(),
        });
    }
    let at = |ring: usize, j: usize| mesh.scalar[1 + ring * np + j];
    let scale = mesh.scalar.iter().fold(T::zero(), |a, v| a.max(v.abs()));
    let tol = scale * T::lit(1e-9);
    let strongest = |n: usize, weight: &dyn Fn(usize) -> T| {
        (0..n).fold((0, T::zero()), |best, k| {
            let w = weight(k);
            if w > best.1 {
                (k, w)
            } else {
                best
            }
        })
        .0
    };
    let column = strongest(np, &|j| (0..rings).map(|r| at(r, j).abs()).fold(T::zero(), |a, b| a + b));
    let row = strongest(rings, &|r| (0..np).map(|j| at(r, j).abs()).fold(T::zero(), |a, b| a + b));
    let meridian: Vec<T> = std::iter::once(mesh.scalar[0])
        .chain((0..rings).map(|r| at(r, column)))
        .chain(std::iter::once(mesh.scalar[mesh.scalar.len() - 1]))
        .collect();
    let ring: Vec<T> = (0..np).map(|j| at(row, j)).collect();
    let am = spec.m.unsigned_abs() as usize;
    Ok(NodalCount {
        l: spec.l,
        m: spec.m,
        meridian: sign_changes(&meridian, tol, false),
        meridian_expected: spec.l - am,
        ring: sign_changes(&ring, tol, true),
        ring_expected: 2 * am,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use std::f64::consts::PI;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    /// `P_l^m(x)` from Rodrigues' formula by exact polynomial differentiation.
    fn rodrigues(l: usize, m: usize, x: f64) -> f64 {
        // coefficients of (x^2 - 1)^l, lowest degree first
        let mut c = vec![0.0; 2 * l + 1];
        for k in 0..=l {
            let binom = factorial(l) / (factorial(k) * factorial(l - k));
            c[2 * k] = binom * if (l - k).is_multiple_of(2) { 1.0 } else { -1.0 };
        }
        for _ in 0..l + m {
            c = c.iter().enumerate().skip(1).map(|(i, &a)| a * i as f64).collect();
        }
        let poly: f64 = c.iter().rev().fold(0.0, |acc, &a| acc * x + a);
        let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * (1.0 - x * x).powf(m as f64 / 2.0) * poly / (2f64.powi(l as i32) * factorial(l))
    }

    fn reference(l: usize, m: i64, theta: f64, phi: f64) -> f64 {
        let am = m.unsigned_abs() as usize;
        let n = ((2 * l + 1) as f64 / (4.0 * PI) * factorial(l - am) / factorial(l + am)).sqrt();
        let p = n * rodrigues(l, am, theta.cos());
        match m {
            0 => p,
            m if m > 0 => 2f64.sqrt() * p * (am as f64 * phi).cos(),
            _ => 2f64.sqrt() * p * (am as f64 * phi).sin(),
        }
    }

    #[test]
    fn constant_harmonic() {
        for (t, p) in [(0.0, 0.0), (1.0, 2.0), (PI, 6.0)] {
            assert!((eval_ylm(0, 0, t, p).unwrap() - 0.282_094_791_773_878_1).abs() < 1e-15);
        }
    }

    #[test]
    fn matches_rodrigues_at_degree_seven() {
        let mut rng = crate::seed::rng(7);
        for _ in 0..100 {
            let (t, p) = (rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI));
            for m in -7i64..=7 {
                let got = eval_ylm(7, m, t, p).unwrap();
                assert!((got - reference(7, m, t, p)).abs() < 1e-10, "m {m}");
            }
        }
    }

    #[test]
    fn low_degree_closed_forms() {
        let (t, p): (f64, f64) = (0.7, 1.3);
        let y10 = (3.0 / (4.0 * PI)).sqrt() * t.cos();
        assert!((eval_ylm(1, 0, t, p).unwrap() - y10).abs() < 1e-14);
        let y11 = -(3.0 / (4.0 * PI)).sqrt() * t.sin() * p.cos();
        assert!((eval_ylm(1, 1, t, p).unwrap() - y11).abs() < 1e-14);
        assert!(eval_ylm(3, 0, PI / 2.0, 0.4).unwrap().abs() < 1e-15);
    }

    #[test]
    fn parity() {
        let mut rng = crate::seed::rng(3);
        for _ in 0..200 {
            let (t, p) = (rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI));
            let l = rng.random_range(0..=9usize);
            let m = rng.random_range(-(l as i64)..=l as i64);
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            let a = eval_ylm(l, m, PI - t, p + PI).unwrap();
            assert!((a - sign * eval_ylm(l, m, t, p).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn invalid_pairs() {
        assert_eq!(eval_ylm(2, 3, 0.1, 0.1), Err(Error::InvalidHarmonic { l: 2, m: 3 }));
        assert!(eval_ylm(2, -3, 0.1, 0.1).is_err());
        assert!(eval_ylm(2, 0, -0.1, 0.1).is_err());
        assert!(HarmonicSpec::new(3, 1, 4, 16).is_err());
        assert!(HarmonicSpec::new(3, 4, 16, 16).is_err());
    }

    #[test]
    fn quadrature_orthogonality_of_a_pair() {
        let (nodes, weights) = gauss_legendre::<f64>(64);
        let mut sum = 0.0;
        for (x, w) in nodes.iter().zip(&weights) {
            for j in 0..128 {
                let phi = 2.0 * PI * j as f64 / 128.0;
                sum += w * 2.0 * PI / 128.0 * eval_ylm(3, 2, x.acos(), phi).unwrap() * eval_ylm(3, 0, x.acos(), phi).unwrap();
            }
        }
        assert!(sum.abs() < 1e-8);
        assert!((weights.iter().sum::<f64>() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn gram_matrix_is_identity() {
        let g = orthonormality_matrix::<f64>(7).unwrap();
        assert_eq!(g.rows(), 64);
        assert!(g.max_abs_diff(&Matrix::identity(64)) < 1e-6);
        let g0 = orthonormality_matrix::<f64>(0).unwrap();
        assert!((g0[(0, 0)] - 1.0).abs() < 1e-12);
        assert!(orthonormality_matrix::<f64>(11).is_err());
        assert_eq!(gram_index(2, -2), 4);
    }

    #[test]
    fn constant_mesh_is_a_sphere() {
        let spec = HarmonicSpec::new(0, 0, 16, 24).unwrap();
        let mesh = mesh_harmonic::<f64>(&spec).unwrap();
        let r = 0.5 / PI.sqrt();
        for v in &mesh.vertices {
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            assert!((n - r).abs() < 1e-9);
        }
    }

    #[test]
    fn mesh_is_closed() {
        let spec = HarmonicSpec::new(4, 2, 20, 32).unwrap();
        let mesh = mesh_harmonic::<f64>(&spec).unwrap();
        let v = mesh.vertices.len();
        assert_eq!(v, 20 * 32 - 2 * (32 - 1));
        assert!(mesh.triangles.iter().flatten().all(|&i| i < v));
        // Euler characteristic of a sphere
        assert_eq!(v as i64 - mesh.edge_count() as i64 + mesh.triangles.len() as i64, 2);
        assert!(mesh.vertices.iter().flatten().all(|x| x.is_finite()));
    }

    #[test]
    fn meridian_nodes_of_y30() {
        let spec = HarmonicSpec::new(3, 0, 64, 32).unwrap();
        let mesh = mesh_harmonic::<f64>(&spec).unwrap();
        let meridian: Vec<f64> = std::iter::once(mesh.scalar[0])
            .chain((0..62).map(|ring| mesh.scalar[1 + ring * 32]))
            .chain(std::iter::once(*mesh.scalar.last().unwrap()))
            .collect();
        assert_eq!(sign_changes(&meridian, 1e-12, false), 3);
    }

    #[test]
    fn nodal_counts_match_for_low_degrees() {
        for l in 0..=7usize {
            for m in -(l as i64)..=l as i64 {
                let spec = HarmonicSpec::with_default_resolution(l, m).unwrap();
                let mesh = mesh_harmonic::<f64>(&spec).unwrap();
                let c = nodal_counts(&spec, &mesh).unwrap();
                assert!(c.exact(), "{c:?}");
            }
        }
    }

    #[test]
    fn equatorial_nodes_of_y54() {
        // Y_5^4 vanishes on the equator itself, so read the ring just above it
        let spec = HarmonicSpec::new(5, 4, 64, 128).unwrap();
        let mesh = mesh_harmonic::<f64>(&spec).unwrap();
        let ring = 30;
        assert!(spec.theta(ring + 1) < PI / 2.0 && spec.theta(ring + 2) > PI / 2.0);
        let values = &mesh.scalar[1 + ring * 128..1 + (ring + 1) * 128];
        assert_eq!(sign_changes(values, 1e-12, true), 8);
    }

    #[test]
    fn obj_round_trip() {
        let spec = HarmonicSpec::new(3, 2, 12, 16).unwrap();
        let mesh = mesh_harmonic::<f64>(&spec).unwrap();
        let (v, f) = parse_obj(&mesh.to_obj(&spec)).unwrap();
        assert_eq!(f, mesh.triangles);
        for (a, b) in v.iter().zip(&mesh.vertices) {
            assert_eq!(a, b);
        }
        assert!(parse_obj("v 0 0 0\nf 1 2 3\n").is_err());
        assert!(parse_obj("v 0 0\n").is_err());
    }

    #[test]
    fn file_stems() {
        assert_eq!(HarmonicSpec::with_default_resolution(3, 2).unwrap().file_stem(), "Y_3_2");
        assert_eq!(HarmonicSpec::new(7, -1, 16, 32).unwrap().file_stem(), "Y_7_-1_16x32");
    }

    #[test]
    fn csv_has_every_grid_point() {
        let spec = HarmonicSpec::new(2, 1, 8, 8).unwrap();
        assert_eq!(harmonic_csv(&spec).unwrap().lines().count(), 65);
    }

    #[test]
    fn f32_evaluation() {
        let a = eval_ylm::<f32>(5, -3, 1.1, 0.4).unwrap();
        let b = eval_ylm::<f64>(5, -3, 1.1, 0.4).unwrap();
        assert!((a as f64 - b).abs() < 1e-5);
    }
}
