//! Property-based invariants over randomized inputs.

use delayfield::charpoly::{self, PolyData, SetMembership};
use delayfield::discretize::{self, DiscreteModel};
use delayfield::model::{KernelTerm, ModelParams, SpatialGrid};
use delayfield::resolvent;
use delayfield::spectrum;
use delayfield::C64;
use proptest::prelude::*;

fn arb_params() -> impl Strategy<Value = ModelParams> {
    // 1..=3 kernel terms with well-separated rates
    (1usize..=3, proptest::collection::vec((-2.0f64..2.0, -0.5f64..0.5), 3))
        .prop_filter_map("valid params", |(n, raw)| {
            let terms: Vec<KernelTerm> = raw
                .iter()
                .take(n)
                .enumerate()
                .map(|(i, &(c, ci))| KernelTerm {
                    c_hat: C64::new(if c.abs() < 0.1 { 0.5 } else { c }, ci),
                    mu: C64::new(0.3 + 1.1 * i as f64, 0.2 * ci),
                })
                .collect();
            ModelParams::new(1.0, 0.7, 4.0, terms).ok()
        })
}

fn arb_lambda() -> impl Strategy<Value = C64> {
    (-2.0f64..2.0, -4.0f64..4.0).prop_map(|(re, im)| C64::new(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn activation_is_odd_and_bounded(r in 0.5f64..10.0, v in -20.0f64..20.0) {
        let p = ModelParams::new(
            1.0, 1.0, r,
            vec![KernelTerm { c_hat: C64::new(1.0, 0.0), mu: C64::new(0.5, 0.0) }],
        ).unwrap();
        prop_assert!((p.activation(v) + p.activation(-v)).abs() < 1e-15);
        prop_assert!(p.activation(v).abs() <= 0.5);
    }

    #[test]
    fn connectivity_symmetric(p in arb_params(), x in -1.0f64..1.0, rr in -1.0f64..1.0) {
        prop_assert_eq!(p.connectivity(x, rr), p.connectivity(rr, x));
    }

    #[test]
    fn delay_within_bounds(p in arb_params(), x in -1.0f64..1.0, rr in -1.0f64..1.0) {
        let d = p.delay(x, rr);
        prop_assert!(d >= p.tau0() && d <= p.max_delay());
    }

    #[test]
    fn charpoly_routes_agree(p in arb_params(), lam in arb_lambda()) {
        prop_assume!(charpoly::degeneracy_check(lam, &p, 1e-6) == SetMembership::NotInS);
        prop_assume!((lam + p.alpha()).norm() > 1e-3);
        let closed = charpoly::monic(&charpoly::closed_form_poly(lam, &p).unwrap());
        let (_, beta) = charpoly::vandermonde_coeffs(lam, &p).unwrap();
        let vand = charpoly::monic(&beta);
        for (a, b) in closed.iter().zip(&vand) {
            prop_assert!((a - b).norm() <= 1e-10 * b.norm().max(1.0));
        }
    }

    #[test]
    fn polynomial_is_even_in_rho(p in arb_params(), lam in arb_lambda()) {
        prop_assume!(charpoly::degeneracy_check(lam, &p, 1e-6) == SetMembership::NotInS);
        prop_assume!((lam + p.alpha()).norm() > 1e-3);
        if let Ok(poly) = PolyData::build(lam, &p) {
            for &rho in &poly.rho {
                // only rho^2 enters, so the values coincide exactly
                prop_assert_eq!(
                    charpoly::eval_at_rho(&poly.coeffs_s, rho),
                    charpoly::eval_at_rho(&poly.coeffs_s, -rho)
                );
                let scale = poly.coeff_scale();
                prop_assert!(charpoly::eval_at_rho(&poly.coeffs_s, rho).norm() <= 1e-9 * scale);
            }
        }
    }

    #[test]
    fn delta_apply_is_linear(p in arb_params(), a_re in -2.0f64..2.0, a_im in -2.0f64..2.0) {
        let grid = SpatialGrid::equidistant(51).unwrap();
        let lam = C64::new(0.4, 1.2);
        let a = C64::new(a_re, a_im);
        let q1: Vec<C64> = grid.nodes().iter().map(|&x| C64::new(x, x * x)).collect();
        let qs: Vec<C64> = q1.iter().map(|v| a * v).collect();
        let o1 = spectrum::delta_apply(lam, &q1, &grid, &p);
        let os = spectrum::delta_apply(lam, &qs, &grid, &p);
        let scale = o1.iter().map(|v| v.norm()).fold(1.0_f64, f64::max);
        for (u, v) in o1.iter().zip(&os) {
            prop_assert!((a * u - v).norm() <= 1e-12 * scale * a.norm().max(1.0));
        }
    }
}

proptest! {
    // the heavier solves get fewer cases
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn resolvent_linearity_randomized(seed in 0u64..1000) {
        let p = ModelParams::new(
            1.0, 1.0, 4.220214885988226,
            vec![
                KernelTerm { c_hat: C64::new(3.0, 0.0), mu: C64::new(0.5, 0.0) },
                KernelTerm { c_hat: C64::new(-5.5, 0.0), mu: C64::new(1.0, 0.0) },
            ],
        ).unwrap();
        let grid = SpatialGrid::equidistant(201).unwrap();
        let z = C64::new(0.6, 1.7);
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let mut unit = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        let h1: Vec<C64> = (0..grid.len()).map(|_| C64::new(unit(), unit())).collect();
        let h2: Vec<C64> = (0..grid.len()).map(|_| C64::new(unit(), unit())).collect();
        let a = C64::new(unit() * 3.0, unit() * 3.0);
        let b = C64::new(unit() * 3.0, unit() * 3.0);
        let hc: Vec<C64> = h1.iter().zip(&h2).map(|(u, v)| a * u + b * v).collect();
        let s1 = resolvent::resolve(z, &h1, &p, &grid).unwrap();
        let s2 = resolvent::resolve(z, &h2, &p, &grid).unwrap();
        let sc = resolvent::resolve(z, &hc, &p, &grid).unwrap();
        let scale = sc.qsamples.iter().map(|v| v.norm()).fold(1.0_f64, f64::max);
        for ((u, v), w) in s1.qsamples.iter().zip(&s2.qsamples).zip(&sc.qsamples) {
            prop_assert!((a * u + b * v - w).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn zero_history_is_preserved_exactly(m_half in 1usize..6, r in 1.0f64..8.0) {
        let p = ModelParams::new(
            1.0, 1.0, r,
            vec![
                KernelTerm { c_hat: C64::new(3.0, 0.0), mu: C64::new(0.5, 0.0) },
                KernelTerm { c_hat: C64::new(-5.5, 0.0), mu: C64::new(1.0, 0.0) },
            ],
        ).unwrap();
        let dm = DiscreteModel::build(2 * m_half, &p).unwrap();
        let tr = discretize::simulate(&dm, &|_, _| 0.0, 3.0, dm.delta() / 2.0).unwrap();
        for s in &tr.states {
            prop_assert!(s.iter().all(|v| *v == 0.0));
        }
    }
}
