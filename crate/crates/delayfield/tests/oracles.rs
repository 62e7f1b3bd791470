//! Independent-route oracles: every load-bearing quantity of the analytic
//! pipeline is recomputed here by machinery that shares no code path with
//! the implementation it checks.


use delayfield::discretize::DiscreteModel;
use delayfield::model::{KernelTerm, ModelParams, SpatialGrid};
use delayfield::normalform::{self, Mode};
use delayfield::resolvent;
use delayfield::spectrum;
use delayfield::C64;
use nalgebra::{DMatrix, DVector};

const LAMBDA_HOPF: C64 = C64::new(0.0, 1.644003102046893);

fn hopf_params() -> ModelParams {
    ModelParams::new(
        1.0,
        1.0,
        4.220214885988226,
        vec![
            KernelTerm { c_hat: C64::new(3.0, 0.0), mu: C64::new(0.5, 0.0) },
            KernelTerm { c_hat: C64::new(-5.5, 0.0), mu: C64::new(1.0, 0.0) },
        ],
    )
    .unwrap()
}

fn reference_gamma() -> Vec<C64> {
    let g1 = C64::new(-0.191821747840362, -0.172140605861736);
    let g2 = C64::new(-0.080160108888561, 0.0);
    vec![g1, g2, g1, g2]
}

/// Dense quadrature discretization of the characteristic operator:
/// `D[a][b] = (lambda + alpha) 1{a=b} - w_b J0(x_a, x_b) e^{-lambda tau}`.
fn dense_delta(lambda: C64, grid: &SpatialGrid, p: &ModelParams) -> DMatrix<C64> {
    let n = grid.len();
    let c = p.effective_coefficients();
    let mut d = DMatrix::<C64>::zeros(n, n);
    for a in 0..n {
        let x = grid.nodes()[a];
        for b in 0..n {
            let rr = grid.nodes()[b];
            let dist = (x - rr).abs();
            let mut kernel = C64::new(0.0, 0.0);
            for (i, ci) in c.iter().enumerate() {
                kernel += ci * (-p.mu(i) * dist).exp();
            }
            d[(a, b)] = -grid.weights()[b] * kernel * (-lambda * (p.tau0() + dist)).exp();
        }
        d[(a, a)] += lambda + p.alpha();
    }
    d
}

/// Same, differentiated in `lambda`:
/// `D'[a][b] = 1{a=b} + w_b tau J0 e^{-lambda tau}`.
fn dense_delta_prime(lambda: C64, grid: &SpatialGrid, p: &ModelParams) -> DMatrix<C64> {
    let n = grid.len();
    let c = p.effective_coefficients();
    let mut d = DMatrix::<C64>::zeros(n, n);
    for a in 0..n {
        let x = grid.nodes()[a];
        for b in 0..n {
            let rr = grid.nodes()[b];
            let dist = (x - rr).abs();
            let tau = p.tau0() + dist;
            let mut kernel = C64::new(0.0, 0.0);
            for (i, ci) in c.iter().enumerate() {
                kernel += ci * (-p.mu(i) * dist).exp();
            }
            d[(a, b)] = grid.weights()[b] * tau * kernel * (-lambda * tau).exp();
        }
        d[(a, a)] += C64::new(1.0, 0.0);
    }
    d
}

/// The dual pairing via the residue formula of the dense operator:
/// `kappa = (p . y) / (p . Delta'(lambda) q)` with left/right null vectors
/// from an SVD. No characteristic-matrix or contour machinery involved.
#[test]
fn pairing_kappa_agrees_with_dense_residue_oracle() {
    let p = hopf_params();
    let grid = SpatialGrid::equidistant(601).unwrap();
    let crit = spectrum::eigen_data(LAMBDA_HOPF, &p, &grid)
        .unwrap()
        .with_gamma(reference_gamma(), &grid);

    let phi = Mode { z: crit.lambda, q: crit.qsamples.clone() };
    let y = normalform::multilinear_modes(3, &[&phi, &phi, &phi.conj()], &grid, &p).unwrap();

    // contour route
    let contour = normalform::default_contour(crit.lambda, &p, &[]).unwrap();
    let (kappa_contour, fit) = normalform::pairing_kappa(&crit, &y, &contour, &p, &grid).unwrap();
    assert!(fit < 1e-8, "fit residual {fit:.2e}");

    // dense residue route
    let d = dense_delta(crit.lambda, &grid, &p);
    let svd = d.clone().svd(true, true);
    let smin_idx = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let u = svd.u.as_ref().unwrap();
    let v_t = svd.v_t.as_ref().unwrap();
    let n = grid.len();
    let mut q_vec = DVector::<C64>::zeros(n);
    let mut p_vec = DVector::<C64>::zeros(n);
    for i in 0..n {
        q_vec[i] = v_t[(smin_idx, i)].conj();
        p_vec[i] = u[(i, smin_idx)].conj();
    }
    // scale the dense null vector onto the analytic eigenfunction samples
    let qc = DVector::from_vec(crit.qsamples.clone());
    let scale = q_vec.dotc(&qc) / q_vec.dotc(&q_vec);
    let q_vec = q_vec * scale;
    let dp = dense_delta_prime(crit.lambda, &grid, &p);
    let denom = p_vec.transpose() * (&dp * &q_vec);
    let num = p_vec
        .iter()
        .zip(&y)
        .map(|(pv, yv)| pv * yv)
        .sum::<C64>();
    let kappa_dense = num / denom[(0, 0)];

    let rel = (kappa_dense - kappa_contour).norm() / kappa_contour.norm();
    assert!(
        rel < 1e-3,
        "contour {kappa_contour} vs dense residue {kappa_dense} (rel {rel:.2e})"
    );
    // and the frozen cross-validated value of g21 = kappa / 2 under the
    // reference eigenvector normalization
    let want = C64::new(-0.798439, -0.271611);
    assert!(
        (kappa_contour / 2.0 - want).norm() < 2e-4,
        "g21 {} vs frozen {want}",
        kappa_contour / 2.0
    );
}

/// Classical normal form of the discretized DDE: right/left eigenvectors of
/// the discrete characteristic matrix, adjoint normalized through its
/// lambda-derivative, cubic coefficient from the discrete trilinear form.
/// Converges to the continuum contour value as the mesh refines.
#[test]
fn g21_agrees_with_discretized_system_normal_form() {
    let p = hopf_params();
    let s3 = p.activation_deriv(3).unwrap();

    let g21_dnf = |m: usize| -> C64 {
        let dm = DiscreteModel::build(m, &p).unwrap();
        let lam = dm.newton_solve(LAMBDA_HOPF, 1e-12, 60).unwrap();
        let a = dm.char_matrix(lam);
        let svd = a.clone().svd(true, true);
        let idx = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.partial_cmp(y.1).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let u = svd.u.as_ref().unwrap();
        let v_t = svd.v_t.as_ref().unwrap();
        let n = m + 1;
        let mut q = DVector::<C64>::zeros(n);
        let mut pl = DVector::<C64>::zeros(n);
        for i in 0..n {
            q[i] = v_t[(idx, i)].conj();
            pl[i] = u[(i, idx)].conj();
        }
        // scale q onto the reference eigenfunction at the mesh nodes
        let grid_vals: Vec<C64> = {
            let fine = SpatialGrid::equidistant(n).unwrap();
            let crit = spectrum::eigen_data(LAMBDA_HOPF, &p, &fine)
                .unwrap()
                .with_gamma(reference_gamma(), &fine);
            crit.qsamples
        };
        let qc = DVector::from_vec(grid_vals);
        let scale = q.dotc(&qc) / q.dotc(&q);
        let q = q * scale;
        // normalize the left vector: p . dA/dlambda . q = 1
        let s1 = p.r() / 4.0;
        let mut dchar = DMatrix::<C64>::identity(n, n);
        for j in 0..n {
            for i in 0..n {
                dchar[(j, i)] += s1
                    * dm.coupling()[(j, i)]
                    * dm.delays()[(j, i)]
                    * (-lam * dm.delays()[(j, i)]).exp();
            }
        }
        let denom = (pl.transpose() * (&dchar * &q))[(0, 0)];
        let pl = pl / denom;
        // discrete trilinear form: sum_i coupling[j][i] e^{-lam tau_ji} (q^2 qbar)_i
        let mut cvec = DVector::<C64>::zeros(n);
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..n {
                acc += dm.coupling()[(j, i)]
                    * (-lam * dm.delays()[(j, i)]).exp()
                    * q[i]
                    * q[i]
                    * q[i].conj();
            }
            cvec[j] = s3 * acc;
        }
        0.5 * pl
            .iter()
            .zip(cvec.iter())
            .map(|(a, b)| a * b)
            .sum::<C64>()
    };

    let want = C64::new(-0.798439, -0.271611);
    let g50 = g21_dnf(50);
    let g100 = g21_dnf(100);
    assert!(
        (g50 - want).norm() / want.norm() < 2e-3,
        "m=50 gives {g50}, frozen contour value {want}"
    );
    // mesh refinement moves the discrete value toward the continuum one
    assert!(
        (g100 - want).norm() < (g50 - want).norm(),
        "no convergence: m=50 {g50}, m=100 {g100}"
    );
}

/// `h_from_history` for a constant history has a closed form: the inner time
/// integral collapses to `(1 - e^{-z tau})/z` and the remaining kernel
/// integral is elementary per exponential term.
#[test]
fn h_from_history_matches_analytic_closed_form() {
    let p = hopf_params();
    let grid = SpatialGrid::equidistant(801).unwrap();
    let z = C64::new(1.0, 0.0);
    let analytic = |x: f64| -> C64 {
        // 1 + int J0(x, r) (1 - e^{-z (tau0 + |x-r|)})/z dr, split at the kink:
        // int_{-1}^{1} e^{-a |x-r|} dr = (2 - e^{-a(1+x)} - e^{-a(1-x)})/a
        let seg = |a: C64| -> C64 {
            (2.0 - (-a * (1.0 + x)).exp() - (-a * (1.0 - x)).exp()) / a
        };
        let mut acc = C64::new(1.0, 0.0);
        for (i, ci) in p.effective_coefficients().iter().enumerate() {
            let mu = p.mu(i);
            // J0 term: c e^{-mu d} (1 - e^{-z tau0} e^{-z d})/z
            acc += ci / z * (seg(mu) - (-z * p.tau0()).exp() * seg(mu + z));
        }
        acc
    };
    let h = resolvent::h_from_history(z, &|_, _| C64::new(1.0, 0.0), &grid, &p, 512);
    for (idx, &x) in grid.nodes().iter().enumerate().step_by(100) {
        let want = analytic(x);
        let rel = (h[idx] - want).norm() / want.norm();
        assert!(rel < 1e-5, "x = {x}: {} vs {want} (rel {rel:.2e})", h[idx]);
    }
    // convergence of the inner quadrature: doubling time nodes shrinks the
    // error at second order
    let h_coarse = resolvent::h_from_history(z, &|_, _| C64::new(1.0, 0.0), &grid, &p, 128);
    let h_fine = resolvent::h_from_history(z, &|_, _| C64::new(1.0, 0.0), &grid, &p, 256);
    let mid = grid.len() / 2;
    let want = analytic(grid.nodes()[mid]);
    let e_coarse = (h_coarse[mid] - want).norm();
    let e_fine = (h_fine[mid] - want).norm();
    let ratio = e_coarse / e_fine;
    assert!((ratio - 4.0).abs() < 1.0, "time-node refinement ratio {ratio:.2}");
}

/// The resolvent applied to a history-free right-hand side `y` solves
/// `Delta(z) q = y`: checked through the quadrature route only.
#[test]
fn resolvent_consistent_with_delta_apply() {
    let p = hopf_params();
    let grid = SpatialGrid::default_grid();
    let z = C64::new(0.3, 1.1);
    let y: Vec<C64> = grid
        .nodes()
        .iter()
        .map(|&x| C64::new((1.2 * x).cos(), 0.3 * x))
        .collect();
    let sol = resolvent::resolve(z, &y, &p, &grid).unwrap();
    let back = spectrum::delta_apply(z, &sol.qsamples, &grid, &p);
    let sup = back
        .iter()
        .zip(&y)
        .map(|(b, yv)| (b - yv).norm())
        .fold(0.0_f64, f64::max);
    assert!(sup < 1e-6, "Delta(z) q vs y sup deviation {sup:.3e}");
}
