//! Step matching against a brute-force maximum-matching oracle, plus
//! randomized conservation checks.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use bugscribe_core::evaluation::{match_steps, steps_equivalent};
use bugscribe_core::report::AtomicStep;

fn step(ordinal: usize, token: u8, grounded: bool) -> AtomicStep {
    AtomicStep {
        ordinal,
        text: format!("tap 'Item {token}' button"),
        interaction_id: grounded.then(|| bugscribe_core::model::InteractionId::new(format!("i{token}"))),
        source_screen: None,
        target_screen: None,
    }
}

fn random_steps(rng: &mut StdRng, len: usize, alphabet: u8, grounded: bool) -> Vec<AtomicStep> {
    (0..len).map(|i| step(i + 1, rng.random_range(0..alphabet), grounded)).collect()
}

/// Brute-force maximum matching over all injective, order-preserving
/// pairings, by exhaustive recursion. Exponential, fine for lists of up to
/// six steps.
fn brute_force_max_pairs(generated: &[AtomicStep], gt: &[AtomicStep]) -> usize {
    fn best(generated: &[AtomicStep], gt: &[AtomicStep], gi: usize, ti: usize) -> usize {
        if gi == generated.len() || ti == gt.len() {
            return 0;
        }
        // either skip this generated step, skip this gt step, or pair them
        let mut best_count = best(generated, gt, gi + 1, ti).max(best(generated, gt, gi, ti + 1));
        if steps_equivalent(&generated[gi], &gt[ti]) {
            best_count = best_count.max(1 + best(generated, gt, gi + 1, ti + 1));
        }
        best_count
    }
    best(generated, gt, 0, 0)
}

#[test]
fn correct_step_count_equals_the_brute_force_maximum() {
    let mut rng = StdRng::seed_from_u64(11);
    for round in 0..300 {
        let grounded = rng.random_bool(0.5);
        let generated_len = rng.random_range(0..=6);
        let gt_len = rng.random_range(0..=6);
        let generated = random_steps(&mut rng, generated_len, 4, grounded);
        let gt = random_steps(&mut rng, gt_len, 4, grounded);
        let matched = match_steps(&generated, &gt);
        let oracle = brute_force_max_pairs(&generated, &gt);
        assert_eq!(matched.correct_steps(), oracle, "round {round}");
    }
}

#[test]
fn conservation_holds_on_random_instances() {
    let mut rng = StdRng::seed_from_u64(23);
    for _ in 0..1000 {
        let generated_len = rng.random_range(0..=12);
        let generated_grounded = rng.random_bool(0.5);
        let gt_len = rng.random_range(0..=12);
        let gt_grounded = rng.random_bool(0.5);
        let generated = random_steps(&mut rng, generated_len, 5, generated_grounded);
        let gt = random_steps(&mut rng, gt_len, 5, gt_grounded);
        let matched = match_steps(&generated, &gt);
        assert_eq!(matched.correct_steps() + matched.extra_steps(), generated.len());
        assert_eq!(matched.correct_steps() + matched.missing_steps(), gt.len());

        // pairs are injective both ways and non-crossing
        let mut last = (0usize, 0usize);
        for &(g, t) in &matched.pairs {
            assert!(g > last.0 && t > last.1, "pairs cross or repeat");
            last = (g, t);
        }
    }
}

#[test]
fn cs_is_symmetric_under_argument_swap() {
    let mut rng = StdRng::seed_from_u64(37);
    for _ in 0..300 {
        let a_len = rng.random_range(0..=8);
        let b_len = rng.random_range(0..=8);
        let a = random_steps(&mut rng, a_len, 4, false);
        let b = random_steps(&mut rng, b_len, 4, false);
        let forward = match_steps(&a, &b);
        let backward = match_steps(&b, &a);
        assert_eq!(forward.correct_steps(), backward.correct_steps());
        assert_eq!(forward.extra_steps(), backward.missing_steps());
        assert_eq!(forward.missing_steps(), backward.extra_steps());
    }
}
