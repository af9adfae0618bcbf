use std::f64::consts::PI;

use kfilter::linalg::norm;
use kfilter::quantize::{
    brownian_path, loopword, mean_square_velocity, pathword, perturb_path, perturb_word, so3_alphabet, so3_anchor,
};
use kfilter::{NoiseSpec, Polyline64, Quantizer64, TokenId};
use proptest::prelude::*;

const THETA: f64 = 2.0 * PI / 100.0;

fn quantizer() -> Quantizer64 {
    Quantizer64::new(so3_alphabet(THETA).unwrap(), so3_anchor()).unwrap()
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

#[test]
fn loopword_reconstruction_closes() {
    let q = quantizer();
    let p = q.reconstruct(&loopword(q.alphabet(), 100).unwrap()).unwrap();
    assert_eq!(p.len(), 101);
    assert!(p.is_closed());
    assert!(p.endpoint_gap() < 1e-9);
}

#[test]
fn pathword_stays_on_the_unit_sphere() {
    let q = quantizer();
    let w = pathword(q.alphabet(), 15).unwrap();
    let p = q.reconstruct(&w).unwrap();
    assert_eq!(p.len(), 15 * 2 * 15 * 3 + 1);
    for pt in p.points() {
        assert!((norm(pt) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn loopword_survives_a_round_trip() {
    let q = quantizer();
    let clean = q.reconstruct(&loopword(q.alphabet(), 100).unwrap()).unwrap();
    let w = q.quantize(&clean, 100).unwrap();
    let again = q.reconstruct(&w).unwrap();
    assert!(again.endpoint_gap() < 2.0 * THETA);
}

#[test]
fn full_substitution_changes_almost_everything() {
    let a = so3_alphabet(THETA).unwrap();
    let w = loopword(&a, 10_000).unwrap();
    let noisy = perturb_word(&a, &w, &NoiseSpec::substitution(1.0, 4).unwrap()).unwrap();
    let changed = w.tokens().iter().zip(noisy.tokens()).filter(|(x, y)| x != y).count();
    assert!(changed as f64 >= 0.99 * 10_000.0);
    let twice = perturb_word(&a, &w, &NoiseSpec::substitution(1.0, 4).unwrap()).unwrap();
    assert_eq!(noisy, twice);
}

#[test]
fn jitter_offsets_average_out() {
    let n = 100_000 / 4;
    let zeros = Polyline64::new(vec![vec![0.0; 4]; n], false).unwrap();
    let sigma = 0.3;
    let noisy = perturb_path(&zeros, &NoiseSpec::jitter(sigma, 8).unwrap()).unwrap();
    let mean = noisy.points().iter().flatten().sum::<f64>() / 100_000.0;
    assert!(mean.abs() < 3.0 * sigma / 100_000f64.sqrt());
    assert_eq!(perturb_path(&zeros, &NoiseSpec::jitter(0.0, 8).unwrap()).unwrap(), zeros);
}

#[test]
fn jittered_loop_no_longer_closes() {
    let q = quantizer();
    let clean = q.reconstruct(&loopword(q.alphabet(), 100).unwrap()).unwrap();
    for seed in 0..20 {
        let noisy = perturb_path(&clean, &NoiseSpec::jitter(0.01, seed).unwrap()).unwrap();
        assert!(noisy.is_closed());
        assert!(noisy.endpoint_gap() > 0.0);
    }
}

#[test]
fn brownian_velocity_scales_inversely_with_the_window() {
    let windows: Vec<f64> = [1usize, 2, 4, 8, 16, 32, 64].iter().map(|&k| k as f64 * 0.01).collect();
    for seed in 0..20 {
        let p = brownian_path(100_000, 0.01, 1.0, 1, seed).unwrap();
        let v: Vec<f64> = windows.iter().map(|&w| mean_square_velocity(&p, w).unwrap()).collect();
        let s = slope(
            &windows.iter().map(|w| w.ln()).collect::<Vec<_>>(),
            &v.iter().map(|x| x.ln()).collect::<Vec<_>>(),
        );
        assert!((-1.1..=-0.9).contains(&s), "seed {seed}: slope {s}");
        let ratio = v[0] / v[1];
        assert!((ratio - 2.0).abs() < 0.4, "seed {seed}: ratio {ratio}");
    }
}

#[test]
fn brownian_increments_have_the_right_spread() {
    let (dt, sigma) = (0.01, 0.7);
    for seed in 0..20 {
        let p = brownian_path(100_000, dt, sigma, 2, seed).unwrap();
        let inc: Vec<f64> = p.points().windows(2).map(|w| w[1][0] - w[0][0]).collect();
        let n = inc.len() as f64;
        let mean = inc.iter().sum::<f64>() / n;
        let var = inc.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((var / (sigma * sigma * dt) - 1.0).abs() < 0.1);
        assert!(mean.abs() < 3.0 * sigma * dt.sqrt() / n.sqrt());
    }
    let tiny = brownian_path(100, dt, 1e-300, 3, 1).unwrap();
    assert!(tiny.points().iter().flatten().all(|x| x.abs() < 1e-290));
}

#[test]
fn perturbations_are_seed_deterministic() {
    let q = quantizer();
    let clean = q.reconstruct(&loopword(q.alphabet(), 50).unwrap()).unwrap();
    let spec = NoiseSpec::jitter(0.1, 77).unwrap();
    assert_eq!(perturb_path(&clean, &spec).unwrap(), perturb_path(&clean, &spec).unwrap());
    let other = NoiseSpec::jitter(0.1, 78).unwrap();
    assert_ne!(perturb_path(&clean, &spec).unwrap(), perturb_path(&clean, &other).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn quantize_then_reconstruct_stays_within_two_steps(tokens in prop::collection::vec(0..6 as TokenId, 1..60)) {
        let q = quantizer();
        let w = q.alphabet().word(tokens).unwrap();
        let p = q.reconstruct(&w).unwrap();
        let back = q.reconstruct(&q.quantize(&p, w.len()).unwrap()).unwrap();
        let dev = back.max_pointwise_distance(&p).unwrap();
        prop_assert!(dev <= 2.0 * THETA, "{}", dev);
    }

    #[test]
    fn rotations_preserve_the_anchor_norm(tokens in prop::collection::vec(0..6 as TokenId, 0..200)) {
        let q = quantizer();
        let p = q.reconstruct(&q.alphabet().word(tokens).unwrap()).unwrap();
        for pt in p.points() {
            prop_assert!((norm(pt) - 1.0).abs() < 1e-9);
        }
    }
}
