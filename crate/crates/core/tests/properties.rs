//! Randomized and property-based invariants that tie the modules together:
//! entropy identities, no-signaling preservation, the classical-world
//! inequality checks, and the sound bracketing of the dual optimizer.

use icgw_core::boxes::BipartiteBox;
use icgw_core::explorer::derive_seed;
use icgw_core::game::{
    evaluate_ic, run_box_strategy, run_classical_strategy, BoxStrategy, ClassicalStrategy,
};
use icgw_core::gray_wyner::{
    achievable_point, dual_value, membership_test, product_region_membership, DualOptions,
    DualWeights, MembershipOptions,
};
use icgw_core::pmf::{Channel, JointPmf};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_pmf(rng: &mut ChaCha8Rng, arities: &[usize]) -> JointPmf {
    let cells: usize = arities.iter().product();
    let mut probs: Vec<f64> = (0..cells).map(|_| -(rng.random::<f64>().ln())).collect();
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    JointPmf::new(arities.to_vec(), probs).unwrap()
}

fn random_channel(rng: &mut ChaCha8Rng, inputs: usize, outputs: usize) -> Channel {
    let rows: Vec<Vec<f64>> = (0..inputs)
        .map(|_| {
            let mut row: Vec<f64> = (0..outputs).map(|_| -(rng.random::<f64>().ln())).collect();
            let total: f64 = row.iter().sum();
            for x in &mut row {
                *x /= total;
            }
            row
        })
        .collect();
    Channel::new(rows).unwrap()
}

#[test]
fn subadditivity_and_conditioning_reduce_entropy() {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(101, 0));
    for _ in 0..300 {
        let n = rng.random_range(2..=3usize);
        let arities: Vec<usize> = (0..n).map(|_| rng.random_range(2..=4usize)).collect();
        let p = random_pmf(&mut rng, &arities);
        let all: Vec<usize> = (0..n).collect();
        let h_joint = p.entropy(&all).unwrap();
        let h_sum: f64 = (0..n).map(|i| p.entropy(&[i]).unwrap()).sum();
        assert!(h_sum >= h_joint - 1e-9, "subadditivity: {h_sum} < {h_joint}");
        let h_cond = p.conditional_entropy(&[0], &all[1..]).unwrap();
        let h_plain = p.entropy(&[0]).unwrap();
        assert!(h_cond <= h_plain + 1e-9, "conditioning: {h_cond} > {h_plain}");
    }
}

#[test]
fn information_is_monotone_in_the_observed_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(101, 1));
    for _ in 0..100 {
        let n = rng.random_range(2..=3usize);
        let arities: Vec<usize> = (0..n).map(|_| rng.random_range(2..=3usize)).collect();
        let p = random_pmf(&mut rng, &arities);
        let all: Vec<usize> = (0..n).collect();
        let outs = rng.random_range(2..=4usize);
        let w = random_channel(&mut rng, p.num_cells(), outs);
        let joint = p.extend_with_channel(&w, &all).unwrap();
        let full_mi = joint.mutual_information(&all, &[n]).unwrap();
        for mask in 1..(1usize << n) {
            let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let sub_mi = joint.mutual_information(&subset, &[n]).unwrap();
            assert!(
                full_mi >= sub_mi - 1e-9,
                "I(a;W) = {full_mi} < I(a_S;W) = {sub_mi}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pmf_operations_preserve_unit_mass(raw in prop::collection::vec(1e-6..1.0f64, 4),
                                         raw2 in prop::collection::vec(1e-6..1.0f64, 6)) {
        let total: f64 = raw.iter().sum();
        let probs: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let p = JointPmf::new(vec![2, 2], probs).unwrap();
        let total2: f64 = raw2.iter().sum();
        let probs2: Vec<f64> = raw2.iter().map(|x| x / total2).collect();
        let q = JointPmf::new(vec![2, 3], probs2).unwrap();

        let marg = p.marginalize(&[1]).unwrap();
        prop_assert!((marg.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-9);

        let cond = p.condition_on_event(0, 0).unwrap();
        prop_assert!((cond.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-9);

        let prod = JointPmf::product_of(&[p, q]).unwrap();
        prop_assert!((prod.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn extend_with_channel_preserves_unit_mass(raw in prop::collection::vec(1e-6..1.0f64, 4),
                                               delta in 0.0..1.0f64) {
        let total: f64 = raw.iter().sum();
        let probs: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let p = JointPmf::new(vec![2, 2], probs).unwrap();
        let rows = vec![
            vec![1.0 - delta, delta],
            vec![delta, 1.0 - delta],
            vec![0.5, 0.5],
            vec![1.0, 0.0],
        ];
        let ch = Channel::new(rows).unwrap();
        let joint = p.extend_with_channel(&ch, &[0, 1]).unwrap();
        prop_assert!((joint.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn classical_strategies_always_satisfy_the_cutset_inequality() {
    // Exhaustive deterministic maps at N = 2 for message sizes 2 and 4,
    // on a correlated source; then randomized shared-randomness mixtures.
    let source = JointPmf::doubly_symmetric_binary(0.15).unwrap();
    for m in [1usize, 2, 3, 4] {
        let alice_count = (m as u64).pow(4);
        let bob_count = 1u64 << (m * 2);
        for ai in 0..alice_count {
            let alice_map: Vec<usize> = (0..4)
                .map(|pos| ((ai / (m as u64).pow(pos)) % m as u64) as usize)
                .collect();
            for bi in 0..bob_count {
                let bob_map: Vec<usize> = (0..m * 2).map(|pos| ((bi >> pos) & 1) as usize).collect();
                let s = ClassicalStrategy::deterministic(vec![2, 2], m, alice_map.clone(), bob_map)
                    .unwrap();
                let joint = run_classical_strategy(&source, &s).unwrap();
                let eval = evaluate_ic(&joint, &source).unwrap();
                assert!(
                    !eval.eq2_violated,
                    "cut-set inequality failed at m={m} ai={ai} bi={bi}: {} < {}",
                    eval.eq2_lhs, eval.eq2_rhs
                );
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(101, 2));
    for _ in 0..300 {
        let p = random_pmf(&mut rng, &[2, 2]);
        let m = rng.random_range(1..=4usize);
        let seed_arity = rng.random_range(1..=4usize);
        let mut weights: Vec<f64> = (0..seed_arity).map(|_| -(rng.random::<f64>().ln())).collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let randomness = JointPmf::new(vec![seed_arity], weights).unwrap();
        let alice_map: Vec<usize> = (0..4 * seed_arity).map(|_| rng.random_range(0..m)).collect();
        let bob_map: Vec<usize> = (0..m * 2 * seed_arity).map(|_| rng.random_range(0..2usize)).collect();
        let s = ClassicalStrategy::new(vec![2, 2], randomness, m, alice_map, bob_map).unwrap();
        let joint = run_classical_strategy(&p, &s).unwrap();
        let eval = evaluate_ic(&joint, &p).unwrap();
        assert!(!eval.eq2_violated, "randomized mixture violated the cut-set bound");
    }
}

#[test]
fn information_residual_identity_holds_for_both_strategy_kinds() {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(101, 3));
    for trial in 0..50 {
        let p = random_pmf(&mut rng, &[2, 2]);
        let joint = if trial % 2 == 0 {
            let eta = rng.random::<f64>();
            let s = BoxStrategy::homogeneous(1, BipartiteBox::isotropic(eta).unwrap()).unwrap();
            run_box_strategy(&p, &s).unwrap()
        } else {
            let m = rng.random_range(1..=4usize);
            let alice_map: Vec<usize> = (0..4).map(|_| rng.random_range(0..m)).collect();
            let bob_map: Vec<usize> = (0..m * 2).map(|_| rng.random_range(0..2usize)).collect();
            let s = ClassicalStrategy::deterministic(vec![2, 2], m, alice_map, bob_map).unwrap();
            run_classical_strategy(&p, &s).unwrap()
        };
        let eval = evaluate_ic(&joint, &p).unwrap();
        for i in 0..2 {
            let cond = joint.condition_on_event(2, i).unwrap();
            let h_ai = cond.entropy(&[i]).unwrap();
            let sum = eval.mi_per_index[i] + eval.residual_per_index[i];
            assert!(
                (sum - h_ai).abs() <= 1e-9,
                "identity broke at i={i}: {sum} vs {h_ai}"
            );
        }
    }
}

#[test]
fn all_classical_box_mixtures_respect_the_first_inequality() {
    let dets = BipartiteBox::all_local_deterministic();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(101, 4));
    for _ in 0..60 {
        let mut weights: Vec<f64> = (0..16).map(|_| -(rng.random::<f64>().ln())).collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let boxed = BipartiteBox::mix(&dets, &weights).unwrap();
        let p = random_pmf(&mut rng, &[2, 2]);
        let s = BoxStrategy::homogeneous(1, boxed).unwrap();
        let joint = run_box_strategy(&p, &s).unwrap();
        let eval = evaluate_ic(&joint, &p).unwrap();
        assert!(
            !eval.eq1_violated,
            "classical box mixture violated eq1: {} < {}",
            eval.eq1_lhs, eval.eq1_rhs
        );
        assert!(!eval.eq2_violated);
    }
}

#[test]
fn classical_noise_box_strategies_satisfy_cutset_on_arbitrary_sources() {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(101, 5));
    for _ in 0..60 {
        let eta = rng.random::<f64>() * 0.5;
        let p = random_pmf(&mut rng, &[2, 2]);
        let s = BoxStrategy::homogeneous(1, BipartiteBox::isotropic(eta).unwrap()).unwrap();
        let joint = run_box_strategy(&p, &s).unwrap();
        let eval = evaluate_ic(&joint, &p).unwrap();
        assert!(
            !eval.eq2_violated,
            "eta = {eta} violated the cut-set inequality on a random source"
        );
    }
}

#[test]
fn anchor_identity_holds_for_every_subset() {
    // min over W of I(a;W) + sum_{i in S} H(a_i|W) equals H(a_S), checked by
    // bracketing, plus the two one-sided inequalities on random channels.
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(101, 6));
    let opts = DualOptions {
        restarts: 6,
        iterations: 150,
        seed: 17,
        ..DualOptions::default()
    };
    for _ in 0..8 {
        let n = 2usize;
        let arities: Vec<usize> = (0..n).map(|_| rng.random_range(2..=3usize)).collect();
        let p = random_pmf(&mut rng, &arities);
        for mask in 0..(1usize << n) {
            let lam = DualWeights::indicator(n, mask);
            let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let h_s = if subset.is_empty() {
                0.0
            } else {
                p.entropy(&subset).unwrap()
            };
            let v = dual_value(&p, &lam, &opts).unwrap();
            assert!((v.upper - h_s).abs() <= 1e-6, "upper {} vs H_S {}", v.upper, h_s);
            assert!((v.certified_lower - h_s).abs() <= 1e-9);
        }

        // One-sided inequalities on random channels.
        let all: Vec<usize> = (0..n).collect();
        for _ in 0..10 {
            let outs = rng.random_range(2..=4usize);
            let w = random_channel(&mut rng, p.num_cells(), outs);
            let joint = p.extend_with_channel(&w, &all).unwrap();
            let wvar = n;
            for mask in 1..(1usize << n) {
                let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                let lhs = joint.mutual_information(&all, &[wvar]).unwrap();
                let rhs = joint.mutual_information(&subset, &[wvar]).unwrap();
                assert!(lhs >= rhs - 1e-9);
                let sum_h: f64 = subset
                    .iter()
                    .map(|&i| joint.conditional_entropy(&[i], &[wvar]).unwrap())
                    .sum();
                let h_joint_given = joint.conditional_entropy(&subset, &[wvar]).unwrap();
                assert!(sum_h >= h_joint_given - 1e-9);
            }
        }
    }
}

#[test]
fn dual_is_concave_and_monotone_within_brackets() {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(101, 7));
    let opts = DualOptions {
        restarts: 8,
        iterations: 200,
        seed: 23,
        ..DualOptions::default()
    };
    for _ in 0..6 {
        let p = random_pmf(&mut rng, &[2, 2]);
        let la = DualWeights::new(vec![rng.random::<f64>(), rng.random::<f64>()]).unwrap();
        let lb = DualWeights::new(vec![rng.random::<f64>(), rng.random::<f64>()]).unwrap();
        let alpha = rng.random::<f64>();
        let mixed = DualWeights::new(
            la.lambdas()
                .iter()
                .zip(lb.lambdas())
                .map(|(&a, &b)| alpha * a + (1.0 - alpha) * b)
                .collect(),
        )
        .unwrap();
        let va = dual_value(&p, &la, &opts).unwrap();
        let vb = dual_value(&p, &lb, &opts).unwrap();
        let vm = dual_value(&p, &mixed, &opts).unwrap();
        // Concavity through the sound bracket.
        assert!(
            vm.upper >= alpha * va.certified_lower + (1.0 - alpha) * vb.certified_lower - 1e-6,
            "concavity bracket failed"
        );
        // Componentwise monotonicity against the dominating weight vector.
        let upper_env = DualWeights::new(
            la.lambdas()
                .iter()
                .zip(lb.lambdas())
                .map(|(&a, &b)| a.max(b))
                .collect(),
        )
        .unwrap();
        let vu = dual_value(&p, &upper_env, &opts).unwrap();
        assert!(vu.upper >= va.certified_lower - 1e-6);
        assert!(vu.upper >= vb.certified_lower - 1e-6);
    }
}

#[test]
fn membership_never_contradicts_the_product_characterization() {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(101, 8));
    let opts = MembershipOptions {
        restarts: 4,
        iterations: 120,
        seed: 31,
        ..MembershipOptions::default()
    };
    for _ in 0..40 {
        let q1 = rng.random::<f64>();
        let q2 = rng.random::<f64>();
        let p = JointPmf::product_of(&[
            JointPmf::bernoulli(q1).unwrap(),
            JointPmf::bernoulli(q2).unwrap(),
        ])
        .unwrap();
        let h = p.entropy_all();
        let pt = icgw_core::RatePoint::new(
            rng.random::<f64>() * (h + 0.4),
            vec![rng.random::<f64>() * 1.1, rng.random::<f64>() * 1.1],
        )
        .unwrap();
        let exact = product_region_membership(&p, &pt).unwrap();
        let verdict = membership_test(&p, &pt, &opts).unwrap();
        if verdict.is_inside() {
            assert!(exact, "inside witness for a facet-outside point");
        }
        if verdict.is_outside() {
            assert!(!exact, "outside certificate for a facet-inside point");
        }
    }
}

#[test]
fn random_achievable_points_are_inside() {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(101, 9));
    for trial in 0..25 {
        let n = 2usize;
        let p = random_pmf(&mut rng, &[2, 2]);
        let outs = rng.random_range(1..=5usize);
        let w = random_channel(&mut rng, p.num_cells(), outs);
        let pt = achievable_point(&p, &w).unwrap();
        let opts = MembershipOptions {
            restarts: 4,
            iterations: 120,
            seed: derive_seed(500, trial),
            extra_witnesses: vec![w],
            ..MembershipOptions::default()
        };
        let verdict = membership_test(&p, &pt, &opts).unwrap();
        assert!(verdict.is_inside(), "achievable point not recognized inside");
        let _ = n;
    }
}
