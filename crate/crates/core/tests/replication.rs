use kfilter::complexity::{estimate_word, EstimatorId};
use kfilter::quantize::{loopword, perturb_word, so3_alphabet};
use kfilter::robot::{replicate, reversibility_test, run, Reversibility};
use kfilter::{NoiseSpec, RobotState64, TinyProgram};
use proptest::prelude::*;

fn sixty_four_bit_robot() -> (kfilter::Alphabet64, RobotState64) {
    let a = so3_alphabet(0.3f64).unwrap();
    let text = "REPEAT 3 { EMIT Rx } EMIT Ry EMIT Rz EMIT Rx^-1 EMIT Ry^-1 EMIT Rz^-1 EMIT Rx EMIT Ry EMIT Rz EMIT Rx HALT";
    let p = TinyProgram::parse_text(text, &a).unwrap();
    assert_eq!(p.bit_len(), 64);
    let r = RobotState64::new(p, vec![1.0, 0.0, 0.0], 64).unwrap();
    (a, r)
}

#[test]
fn mean_flip_count_matches_the_rate() {
    let (_, parent) = sixty_four_bit_robot();
    let total: usize = (0..1000)
        .map(|s| replicate(&parent, 0.01, s, None).unwrap().flipped_bits)
        .sum();
    let mean = total as f64 / 1000.0;
    assert!((mean - 0.64).abs() <= 0.2 * 0.64, "{mean}");
}

#[test]
fn lineage_without_mutation_is_a_fixed_point() {
    let (a, parent) = sixty_four_bit_robot();
    let mut r = parent.clone();
    for g in 1..=5 {
        r = replicate(&r, 0.0, g, None).unwrap().child;
        assert_eq!(r.program().encode(), parent.program().encode());
        assert_eq!(run(&a, &r, 1000).unwrap(), run(&a, &parent, 1000).unwrap());
        assert_eq!(r.generation(), g);
    }
}

#[test]
fn mutants_are_valid_and_fit_memory() {
    let (a, parent) = sixty_four_bit_robot();
    for s in 0..500 {
        let child = replicate(&parent, 0.05, s, Some(0.01)).unwrap().child;
        assert!(child.program().bit_len() <= 64);
        run(&a, &child, 10_000).unwrap();
        assert_eq!(parent.generation(), 0);
    }
}

#[test]
fn out_of_range_rate_is_rejected() {
    let (_, parent) = sixty_four_bit_robot();
    assert!(replicate(&parent, 1.5, 0, None).is_err());
    assert!(replicate(&parent, -0.1, 0, None).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn reversibility_is_monotone_in_memory(seed in any::<u64>(), m in 0.0f64..400.0, extra in 0.0f64..400.0) {
        let a = so3_alphabet(2.0 * std::f64::consts::PI / 100.0).unwrap();
        let w = perturb_word(&a, &loopword(&a, 100).unwrap(), &NoiseSpec::substitution(0.3, seed).unwrap()).unwrap();
        let e = EstimatorId::DictCoder;
        if reversibility_test(m, &a, &w, e).unwrap() == Reversibility::Reversible {
            prop_assert_eq!(reversibility_test(m + extra, &a, &w, e).unwrap(), Reversibility::Reversible);
        }
        let est = estimate_word(&a, &w, e).unwrap().bits;
        prop_assert_eq!(reversibility_test(est, &a, &w, e).unwrap(), Reversibility::Reversible);
    }
}
