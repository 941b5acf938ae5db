use adgreedy::theory::{
    c_coefficients, lemma2_bound, theorem1_constants, theorem1_error_bound, unroll_recurrence, RecurrenceSpec,
    TheoryInputs,
};
use adgreedy::Algorithm;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Runs `b(k+2) = c₁ b(k+1) + c₂ a(k+1) + c₃ a(k)` forward.
fn forward_recurrence(c1: f64, c2: f64, c3: f64, a: &[f64], b1: f64, k: usize) -> f64 {
    let mut b = vec![0.0; k + 2];
    b[1] = b1;
    for j in 0..k.saturating_sub(1) {
        b[j + 2] = c1 * b[j + 1] + c2 * a[j + 1] + c3 * a[j];
    }
    b[k]
}

/// The memory recursion taken with equality: returns `a(0..=k+1)`.
fn equality_chain(b: f64, b1: f64, b2: f64, b3: f64, b4: f64, a1: f64, a2: f64, k: usize) -> Vec<f64> {
    let mut a = vec![0.0, a1, a2];
    for kk in 2..=k {
        let mem: f64 = (1..kk).map(|i| b.powi((kk - i) as i32) * a[i]).sum();
        a.push(b1 * a[kk] + b2 * mem + b3 * b.powi(kk as i32) + b4);
    }
    a
}

#[test]
fn unrolled_recurrence_matches_forward_iteration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let c1 = rng.random_range(-0.9..0.9);
        let c2 = rng.random_range(-2.0..2.0);
        let c3 = rng.random_range(-2.0..2.0);
        let a: Vec<f64> = (0..25).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b1 = rng.random_range(-1.0..1.0);
        for k in 1..20 {
            // forward_recurrence(.., k + 1) yields b(k+1).
            let want = forward_recurrence(c1, c2, c3, &a, b1, k + 1);
            let got = unroll_recurrence(c1, c2, c3, &a, b1, k).unwrap();
            assert!((want - got).abs() <= 1e-12, "k={k}: {want} vs {got}");
        }
    }
}

#[test]
fn recurrence_bound_equals_equality_chain() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut checked = 0;
    while checked < 100 {
        let spec = RecurrenceSpec {
            b: rng.random_range(0.05..0.95),
            b1: rng.random_range(0.0..0.9),
            b2: rng.random_range(0.0..0.9),
            b3: rng.random_range(0.0..2.0),
            b4: rng.random_range(0.0..0.5),
            a1: rng.random_range(0.0..2.0),
            a2: rng.random_range(0.0..2.0),
        };
        if !spec.is_bounded() {
            continue;
        }
        checked += 1;
        let chain = equality_chain(spec.b, spec.b1, spec.b2, spec.b3, spec.b4, spec.a1, spec.a2, 30);
        for k in 2..30 {
            let bound = lemma2_bound(&spec, k).unwrap();
            let want = chain[k + 1];
            assert!(bound >= want - 1e-9, "k={k}: bound {bound} < {want}");
            assert!((bound - want).abs() <= 1e-9, "k={k}: {bound} vs {want}");
        }
    }
}

#[test]
fn error_bound_matches_worst_case_chain() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut checked = 0;
    while checked < 60 {
        let alg = [Algorithm::Iad, Algorithm::Niad, Algorithm::Adp][checked % 3];
        let delta = rng.random_range(0.0..0.25);
        let mu = rng.random_range(0.5..1.2);
        let gamma = rng.random_range(0.5..3.0);
        let Ok(t) = TheoryInputs::new(alg, delta, mu, gamma) else { continue };
        let Ok(c) = theorem1_constants(&t) else { continue };
        if !c.converges {
            continue;
        }
        checked += 1;
        let a0 = rng.random_range(0.1..3.0);
        let e = rng.random_range(0.0..0.5);
        let a1 = c.b8 * a0 + c.b9 * e;
        let b3 = c.b5 * a0 - c.b6 * e;
        let b4 = c.b7 * e;
        let a2 = c.b1 * a1 + b3 * c.b + b4;
        let chain = equality_chain(c.b, c.b1, c.b2, b3, b4, a1, a2, 25);
        for k in 2..25 {
            let bound = theorem1_error_bound(&c, k, a0, e).unwrap();
            let want = chain[k + 1];
            assert!((bound - want).abs() <= 1e-9 * want.abs().max(1.0), "{alg} k={k}: {bound} vs {want}");
        }
    }
}

#[test]
fn equal_root_branch_is_continuous() {
    // δ = 0, μ = 1, γ = 1 gives b₁ = b₂ = 0, so λ₁ = b exactly.
    let t = TheoryInputs::new(Algorithm::Iad, 0.0, 1.0, 1.0).unwrap();
    let c = theorem1_constants(&t).unwrap();
    assert!((c.lambda1 - c.b).abs() < 1e-12);
    for k in 2..10 {
        let cc = c_coefficients(&c, k).unwrap();
        assert_eq!(cc.theta12, 0.0);
        assert!((cc.theta11 - (k as f64 - 2.0) / c.lambda1).abs() < 1e-12);
        let bound = theorem1_error_bound(&c, k, 1.0, 0.0).unwrap();
        let chain = equality_chain(c.b, c.b1, c.b2, c.b5, 0.0, c.b8, c.b1 * c.b8 + c.b5 * c.b, k);
        assert!((bound - chain[k + 1]).abs() < 1e-12, "k={k}");
    }
}

proptest! {
    #[test]
    fn convergence_criteria_agree(
        alg in prop::sample::select(vec![Algorithm::Iad, Algorithm::Niad, Algorithm::Adp]),
        delta in 0.0f64..0.6,
        mu in 0.1f64..1.9,
        gamma in 0.05f64..5.0,
    ) {
        let t = TheoryInputs::new(alg, delta, mu, gamma).unwrap();
        if let Ok(c) = theorem1_constants(&t) {
            let margin = (c.rho - c.rho_threshold).abs();
            prop_assume!(margin > 1e-9);
            prop_assert_eq!(c.converges, c.converges_by_recurrence());
            prop_assert_eq!(c.converges, c.converges_by_spectrum());
        }
    }

    #[test]
    fn eigenvalues_solve_characteristic_polynomial(
        b in 0.01f64..0.99, b1 in 0.0f64..2.0, b2 in 0.0f64..2.0,
    ) {
        let sp = adgreedy::theory::Spectrum::new(b, b1, b2).unwrap();
        for l in [sp.lambda1, sp.lambda2] {
            let r = l * l - (b + b1) * l + b * b1 - b * b2;
            prop_assert!(r.abs() <= 1e-12);
        }
    }
}
