use kfilter::complexity::{estimate_word, EstimatorId};
use kfilter::filters::{classify_loop, classify_path, mirror_report, partition, FilterConfig, MirrorRegime, VerdictKind};
use kfilter::quantize::{loopword, perturb_word, so3_alphabet, so3_anchor};
use kfilter::{seed, Alphabet64, NoiseSpec, Quantizer, Word};
use rand::Rng;

const THETA: f64 = 2.0 * std::f64::consts::PI / 100.0;

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn random_word(a: &Alphabet64, len: usize, s: u64) -> Word {
    let mut rng = seed::rng(s);
    a.word((0..len).map(|_| rng.random_range(0..a.len() as u16)).collect()).unwrap()
}

fn periodic_word(a: &Alphabet64, len: usize, s: u64) -> Word {
    let mut rng = seed::rng(s);
    let period: Vec<u16> = (0..rng.random_range(1..=8)).map(|_| rng.random_range(0..6)).collect();
    a.word((0..len).map(|i| period[i % period.len()]).collect()).unwrap()
}

#[test]
fn median_threshold_separates_random_from_periodic() {
    let a = so3_alphabet(0.2f64).unwrap();
    let periodic: Vec<Word> = (0..50).map(|s| periodic_word(&a, 512, s)).collect();
    let random: Vec<Word> = (0..50).map(|s| random_word(&a, 512, 1000 + s)).collect();
    let batch: Vec<Word> = periodic.iter().chain(&random).cloned().collect();
    for e in EstimatorId::ALL {
        let threshold = median(batch.iter().map(|w| estimate_word(&a, w, e).unwrap().bits).collect());
        let (high, low) = partition(&a, &batch, threshold, e).unwrap();
        let random_high = random.iter().filter(|w| high.contains(w)).count();
        let periodic_low = periodic.iter().filter(|w| low.contains(w)).count();
        assert!(random_high >= 40, "{e}: {random_high}");
        assert!(periodic_low >= 40, "{e}: {periodic_low}");
    }
}

#[test]
fn reversal_keeps_the_compressibility_class() {
    let a = so3_alphabet(THETA).unwrap();
    let lw = loopword(&a, 100).unwrap();
    let mut words: Vec<Word> = (0..20).map(|s| random_word(&a, 512, 70 + s)).collect();
    words.extend((0..20).map(|s| perturb_word(&a, &lw, &NoiseSpec::substitution(0.3, s).unwrap()).unwrap()));
    words.push(lw);
    let cfg = FilterConfig::with_memory(100.0).unwrap();
    for w in &words {
        let r = mirror_report(&a, w, &cfg).unwrap();
        assert!(r.gap_bits <= 0.1 * r.forward_bits, "{} vs {}", r.forward_bits, r.reversed_bits);
    }
    // short periodic words: a few bits of distance field move the ratio
    for s in 0..20 {
        let r = mirror_report(&a, &periodic_word(&a, 512, 50 + s), &cfg).unwrap();
        assert!(r.gap_bits <= (0.1 * r.forward_bits).max(10.0), "{} vs {}", r.forward_bits, r.reversed_bits);
    }
}

#[test]
fn phrase_coders_see_token_relabelling() {
    // Rx^100 is a run of zero bits, its inverse a period-3 pattern
    let a = so3_alphabet(THETA).unwrap();
    let lw = loopword(&a, 100).unwrap();
    for e in [EstimatorId::Lz78, EstimatorId::Lzw] {
        let r = mirror_report(&a, &lw, &FilterConfig::new(e, 4.0, 100.0).unwrap()).unwrap();
        assert!(r.gap_bits > 0.3 * r.forward_bits, "{e}");
    }
}

#[test]
fn noisy_word_with_small_memory_breaks_symmetry() {
    let a = so3_alphabet(THETA).unwrap();
    let w = random_word(&a, 2000, 5);
    let r = mirror_report(&a, &w, &FilterConfig::with_memory(64.0).unwrap()).unwrap();
    assert_eq!(r.regime, MirrorRegime::Broken);
}

#[test]
fn more_noise_never_lowers_the_median_estimate() {
    let a = so3_alphabet(THETA).unwrap();
    let lw = loopword(&a, 100).unwrap();
    for e in EstimatorId::ALL {
        let mut previous = f64::MIN;
        for step in 0..=20 {
            let amp = step as f64 / 20.0;
            let m = median(
                (0..20)
                    .map(|s| {
                        let noisy = perturb_word(&a, &lw, &NoiseSpec::substitution(amp, s).unwrap()).unwrap();
                        estimate_word(&a, &noisy, e).unwrap().bits
                    })
                    .collect(),
            );
            assert!(m >= previous, "{e} at {amp}: {m} < {previous}");
            previous = m;
        }
    }
}

/// The loop word against its substituted images at amplitude 0.3, with the
/// memory at the geometric mean of the clean and noisy estimates.
#[test]
fn loop_word_separation_at_the_geometric_mean() {
    let a = so3_alphabet(THETA).unwrap();
    let q = Quantizer::new(a.clone(), so3_anchor()).unwrap();
    let lw = loopword(&a, 100).unwrap();
    let e = EstimatorId::DictCoder;
    let clean = estimate_word(&a, &lw, e).unwrap().bits;
    let noisy: Vec<Word> = (0..20)
        .map(|s| perturb_word(&a, &lw, &NoiseSpec::substitution(0.3, s).unwrap()).unwrap())
        .collect();
    let noisy_median = median(noisy.iter().map(|w| estimate_word(&a, w, e).unwrap().bits).collect());
    assert!(noisy_median > clean);
    let cfg = FilterConfig::with_memory((clean * noisy_median).sqrt()).unwrap();
    assert_eq!(classify_path(&a, &lw, &lw, &cfg).unwrap().kind, VerdictKind::Reversible);
    assert_eq!(classify_loop(&q, &lw, &lw, &cfg).unwrap().kind, VerdictKind::NoSpin);
    for w in &noisy {
        // the noisy estimate sits above m but short of 4·m
        let v = classify_path(&a, &lw, w, &cfg).unwrap();
        assert_eq!(v.kind, VerdictKind::Reversible);
        assert!(v.marginal);
        assert!(v.ratio.unwrap() > 1.0 && v.ratio.unwrap() < 4.0);
    }
}
