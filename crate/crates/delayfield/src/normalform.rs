//! Critical normal forms: the multilinear forms of the nonlinearity, dual
//! pairings evaluated as contour integrals of the resolvent (spectral
//! projection residues), and the Hopf / double-Hopf cubic coefficient
//! assembly.
//!
//! The adjoint eigenvector is never materialized: its action on a right-hand
//! side `(y, 0)` is the proportionality constant `kappa` in
//! `(1/2 pi i) oint Delta(z)^{-1} y dz = kappa q_lambda`, evaluated per
//! contour node through the explicit resolvent and reduced to `2N` scalar
//! contour integrals of the `Gamma_0` coefficients.

use crate::charpoly::PolyData;
use crate::error::{Error, Result};
use crate::model::{ModelParams, SpatialGrid};
use crate::resolvent::resolve_gamma0_matched;
use crate::spectrum::{self, EigenData};
use crate::C64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Maximum relative fit residual of the proportionality check.
pub const FIT_RESIDUAL_BOUND: f64 = 1e-4;

/// Circular contour around a critical eigenvalue.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ContourSpec {
    pub center_re: f64,
    pub center_im: f64,
    pub radius: f64,
    pub nodes: usize,
}

impl ContourSpec {
    pub fn new(center: C64, radius: f64, nodes: usize) -> Self {
        ContourSpec { center_re: center.re, center_im: center.im, radius, nodes }
    }

    pub fn center(&self) -> C64 {
        C64::new(self.center_re, self.center_im)
    }

    fn node(&self, t: usize) -> (C64, C64) {
        let theta = 2.0 * PI * t as f64 / self.nodes as f64;
        let e = C64::new(0.0, theta).exp();
        (self.center() + self.radius * e, C64::new(0.0, 1.0) * self.radius * e)
    }
}

/// An exponential history mode `phi(t, x) = e^{z t} q(x)`; products of these
/// are what the multilinear forms see in the normal-form pipeline.
#[derive(Debug, Clone)]
pub struct Mode {
    pub z: C64,
    pub q: Vec<C64>,
}

impl Mode {
    pub fn conj(&self) -> Mode {
        Mode { z: self.z.conj(), q: self.q.iter().map(|v| v.conj()).collect() }
    }

    pub fn zero_like(&self) -> Mode {
        Mode { z: self.z, q: vec![C64::new(0.0, 0.0); self.q.len()] }
    }

    pub fn is_zero(&self) -> bool {
        self.q.iter().all(|v| v.norm() == 0.0)
    }
}

/// `k`-th multilinear form of the field nonlinearity applied to arbitrary
/// history functions, sampled on the grid:
///
/// `y(x) = S^(k)(0) int J(x, r) prod_i psi_i(-tau(x, r), r) dr`
///
/// with `J` the raw connectivity (steepness enters through `S^(k)(0)`).
pub fn multilinear_g(
    k: u32,
    psis: &[&(dyn Fn(f64, f64) -> C64 + Sync)],
    grid: &SpatialGrid,
    p: &ModelParams,
) -> Result<Vec<C64>> {
    if !(2..=3).contains(&k) {
        return Err(Error::UnsupportedDerivative(k));
    }
    if psis.len() != k as usize {
        return Err(Error::InvalidParams(format!(
            "expected {k} history functions, got {}",
            psis.len()
        )));
    }
    let sk = p.activation_deriv(k)?;
    let nodes = grid.nodes();
    let weights = grid.weights();
    Ok(nodes
        .par_iter()
        .map(|&x| {
            let mut acc = C64::new(0.0, 0.0);
            for (&rr, &w) in nodes.iter().zip(weights) {
                let tau = p.delay(x, rr);
                let mut prod = C64::new(1.0, 0.0);
                for psi in psis {
                    prod *= psi(-tau, rr);
                }
                acc += w * p.connectivity(x, rr) * prod;
            }
            sk * acc
        })
        .collect())
}

/// Fast path of [`multilinear_g`] for exponential modes: their product is
/// again a single mode, so the kernel is distance-indexed. Bit-identical in
/// structure to the general quadrature.
pub fn multilinear_modes(
    k: u32,
    modes: &[&Mode],
    grid: &SpatialGrid,
    p: &ModelParams,
) -> Result<Vec<C64>> {
    if !(2..=3).contains(&k) {
        return Err(Error::UnsupportedDerivative(k));
    }
    if modes.len() != k as usize {
        return Err(Error::InvalidParams(format!(
            "expected {k} modes, got {}",
            modes.len()
        )));
    }
    let sk = p.activation_deriv(k)?;
    multilinear_modes_with_deriv(sk, modes, grid, p)
}

fn multilinear_modes_with_deriv(
    sk: f64,
    modes: &[&Mode],
    grid: &SpatialGrid,
    p: &ModelParams,
) -> Result<Vec<C64>> {
    let nodes = grid.nodes();
    let weights = grid.weights();
    let n = nodes.len();
    if sk == 0.0 {
        return Ok(vec![C64::new(0.0, 0.0); n]);
    }
    let z_net: C64 = modes.iter().map(|m| m.z).sum();
    let mut prod = vec![C64::new(1.0, 0.0); n];
    for m in modes {
        assert_eq!(m.q.len(), n, "mode sampled on a different grid");
        for (pv, qv) in prod.iter_mut().zip(&m.q) {
            *pv *= qv;
        }
    }
    // kernel J(d) e^{-z_net (tau0 + d)} per distance index
    let kernel: Vec<C64> = (0..n)
        .map(|idx| {
            let d = idx as f64 * grid.spacing();
            p.connectivity(-1.0, -1.0 + d) * (-z_net * (p.tau0() + d)).exp()
        })
        .collect();
    Ok((0..n)
        .into_par_iter()
        .map(|a| {
            let mut acc = C64::new(0.0, 0.0);
            for b in 0..n {
                acc += weights[b] * kernel[a.abs_diff(b)] * prod[b];
            }
            sk * acc
        })
        .collect())
}

fn winding_of_squared_det(contour: &ContourSpec, p: &ModelParams) -> Result<f64> {
    let mut dets = Vec::with_capacity(contour.nodes + 1);
    for t in 0..contour.nodes {
        let (z, _) = contour.node(t);
        let d = spectrum::char_det(z, p)
            .map_err(|e| Error::InvalidContour(format!("det S failed on the contour: {e}")))?;
        dets.push(d * d);
    }
    dets.push(dets[0]);
    let mut total = 0.0;
    for w in dets.windows(2) {
        let ratio = w[1] / w[0];
        if !ratio.is_finite() || ratio.norm() == 0.0 {
            return Err(Error::InvalidContour("det S vanished on the contour".into()));
        }
        total += ratio.arg();
    }
    Ok(total / (2.0 * PI))
}

/// Verifies the contour invariants: the closed disk stays clear of `-alpha`
/// and the degenerate set, every node admits the resolvent construction, and
/// the winding of `det S(z)^2` along the contour is 2 (exactly one simple
/// zero inside, no spurious root-collision zeros).
pub fn validate_contour(contour: &ContourSpec, p: &ModelParams) -> Result<()> {
    if contour.nodes < 16 {
        return Err(Error::InvalidContour(format!(
            "need >= 16 contour nodes, got {}",
            contour.nodes
        )));
    }
    if contour.radius <= 0.0 {
        return Err(Error::InvalidContour("radius must be positive".into()));
    }
    let center = contour.center();
    let alpha_pt = C64::new(-p.alpha(), 0.0);
    if (center - alpha_pt).norm() <= contour.radius + spectrum::ESSENTIAL_EXCLUSION {
        return Err(Error::InvalidContour("essential point inside or near the disk".into()));
    }
    for s_pt in spectrum::degenerate_set_points(p) {
        if (center - s_pt).norm() <= contour.radius + spectrum::REGION_GUARD {
            return Err(Error::InvalidContour("degenerate-set point inside the disk".into()));
        }
    }
    let winding = winding_of_squared_det(contour, p)?;
    if (winding - 2.0).abs() > 0.5 {
        return Err(Error::InvalidContour(format!(
            "winding of det^2 along the contour is {winding:.2}, expected 2 \
             (other det roots inside the disk?)"
        )));
    }
    Ok(())
}

/// Default contour around a critical eigenvalue: radius starts at
/// `min(0.2, half distance to the nearest other known root / degenerate
/// point / -alpha)`, 64 nodes, and shrinks until the winding check passes.
pub fn default_contour(center: C64, p: &ModelParams, other_roots: &[C64]) -> Result<ContourSpec> {
    let mut limit: f64 = 0.2;
    let mut consider = |d: f64| {
        if d > 0.0 {
            limit = limit.min(d / 2.0);
        }
    };
    consider((center - C64::new(-p.alpha(), 0.0)).norm());
    for s_pt in spectrum::degenerate_set_points(p) {
        consider((center - s_pt).norm());
    }
    for &r in other_roots {
        let d = (center - r).norm();
        if d > spectrum::DEDUP_TOL {
            consider(d);
        }
    }
    let mut radius = limit;
    for _ in 0..10 {
        let spec = ContourSpec::new(center, radius, 64);
        match validate_contour(&spec, p) {
            Ok(()) => return Ok(spec),
            Err(_) => radius *= 0.6,
        }
    }
    Err(Error::InvalidContour(format!(
        "no valid contour radius found around {center} (down to {radius:.2e})"
    )))
}

/// Evaluates the dual pairing `<phi_adj, (y, 0)>` as the proportionality
/// constant of the spectral-projection contour integral against the critical
/// eigenfunction.
///
/// Per node `z` the resolvent of `h = y` is solved with root labels
/// continued from the center; the `2N` scalar integrals of `Gamma_0`
/// components assemble the projected function, which is then least-squares
/// fitted against `q_lambda`. Returns `(kappa, fit_residual)`.
pub fn pairing_kappa(
    crit: &EigenData,
    y: &[C64],
    contour: &ContourSpec,
    p: &ModelParams,
    grid: &SpatialGrid,
) -> Result<(C64, f64)> {
    validate_contour(contour, p)?;
    let n = crit.poly.rho.len();
    let gamma0s: Vec<Vec<C64>> = (0..contour.nodes)
        .into_par_iter()
        .map(|t| {
            let (z, _) = contour.node(t);
            resolve_gamma0_matched(z, &crit.poly.rho, y, p, grid)
        })
        .collect::<Result<Vec<_>>>()?;
    // (1/2 pi i) sum Gamma_0(z_t) dz_t with dz = i R e^{i theta} dtheta
    let mut integrals = vec![C64::new(0.0, 0.0); 2 * n];
    for (t, g0) in gamma0s.iter().enumerate() {
        let (_, dz) = contour.node(t);
        let w = dz * (2.0 * PI / contour.nodes as f64) / C64::new(0.0, 2.0 * PI);
        for (acc, v) in integrals.iter_mut().zip(g0) {
            *acc += w * v;
        }
    }
    let f: Vec<C64> = grid
        .nodes()
        .iter()
        .map(|&x| {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..n {
                acc += integrals[i] * (crit.poly.rho[i] * x).exp()
                    + integrals[n + i] * (-crit.poly.rho[i] * x).exp();
            }
            acc
        })
        .collect();
    let qq: C64 = crit.qsamples.iter().map(|q| q.conj() * q).sum();
    let qf: C64 = crit.qsamples.iter().zip(&f).map(|(q, fv)| q.conj() * fv).sum();
    let kappa = qf / qq;
    let fmax = f.iter().map(|v| v.norm()).fold(0.0_f64, f64::max);
    let dev = f
        .iter()
        .zip(&crit.qsamples)
        .map(|(fv, q)| (fv - kappa * q).norm())
        .fold(0.0_f64, f64::max);
    let fit_residual = if fmax > 0.0 { dev / fmax } else { 0.0 };
    if fit_residual > FIT_RESIDUAL_BOUND {
        return Err(Error::ProportionalityFailure { residual: fit_residual });
    }
    Ok((kappa, fit_residual))
}

fn require_resolvent_point(z: C64, p: &ModelParams, what: &str) -> Result<()> {
    let poly = PolyData::build(z, p).map_err(|e| {
        Error::Resonance(format!("{what}: polynomial data failed at z = {z}: {e}"))
    })?;
    let s = spectrum::s_matrix(&poly)
        .map_err(|e| Error::Resonance(format!("{what}: S(z) failed at z = {z}: {e}")))?;
    let svd = s.assembled.svd(false, false);
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let smax = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    if smin <= 1e-6 * smax {
        return Err(Error::Resonance(format!(
            "{what}: z = {z} is an eigenvalue (resonant resolvent point)"
        )));
    }
    Ok(())
}

fn b_mode(
    s2: f64,
    a: &Mode,
    b: &Mode,
    z_solve: C64,
    p: &ModelParams,
    grid: &SpatialGrid,
    what: &str,
) -> Result<Mode> {
    // with the odd activation the coefficient is identically zero and the
    // resolvent point is never touched (it may even be structurally
    // degenerate, e.g. z = 0 with a zero-rate kernel term)
    if s2 == 0.0 {
        return Ok(Mode { z: z_solve, q: vec![C64::new(0.0, 0.0); grid.len()] });
    }
    require_resolvent_point(z_solve, p, what)?;
    let y = multilinear_modes_with_deriv(s2, &[a, b], grid, p)?;
    let sol = crate::resolvent::resolve(z_solve, &y, p, grid)
        .map_err(|e| Error::Resonance(format!("{what}: resolvent failed at {z_solve}: {e}")))?;
    Ok(Mode { z: z_solve, q: sol.qsamples })
}

/// Hopf second-order center-manifold coefficients as history modes:
/// `h20` solved at `2 i omega0` with `B(phi, phi)`, `h11` at `0` with
/// `B(phi, phibar)`. Both vanish identically for the odd activation.
pub fn hopf_h_coefficients(
    crit: &EigenData,
    p: &ModelParams,
    grid: &SpatialGrid,
) -> Result<(Mode, Mode)> {
    hopf_h_coefficients_with(crit, p, grid, p.activation_deriv(2)?)
}

/// Test hook: same as [`hopf_h_coefficients`] with an explicit `S''(0)`.
pub fn hopf_h_coefficients_with(
    crit: &EigenData,
    p: &ModelParams,
    grid: &SpatialGrid,
    s2: f64,
) -> Result<(Mode, Mode)> {
    let omega0 = crit.lambda.im;
    let phi = Mode { z: crit.lambda, q: crit.qsamples.clone() };
    let phibar = phi.conj();
    let h20 = b_mode(s2, &phi, &phi, C64::new(0.0, 2.0 * omega0), p, grid, "h20")?;
    let h11 = b_mode(s2, &phi, &phibar, C64::new(0.0, 0.0), p, grid, "h11")?;
    Ok((h20, h11))
}

/// Supercritical / subcritical verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HopfKind {
    Supercritical,
    Subcritical,
}

/// Hopf critical normal-form record.
#[derive(Debug, Clone)]
pub struct HopfNF {
    pub omega0: f64,
    /// Critical eigendata with the null vector actually used.
    pub crit: EigenData,
    pub g21: C64,
    pub l1: f64,
    pub verdict: HopfKind,
    pub contour: ContourSpec,
    pub fit_residual: f64,
}

/// Assembles the Hopf cubic coefficient
/// `g21 = 1/2 <phi_adj, C(phi, phi, phibar) + B(phibar, h20) + 2 B(phi, h11)>`
/// and the first Lyapunov coefficient `l1 = Re(g21)/omega0`.
pub fn hopf_g21(
    crit: &EigenData,
    p: &ModelParams,
    contour: &ContourSpec,
    grid: &SpatialGrid,
) -> Result<HopfNF> {
    hopf_g21_with(crit, p, contour, grid, p.activation_deriv(2)?)
}

/// Test hook: same as [`hopf_g21`] with an explicit `S''(0)`.
pub fn hopf_g21_with(
    crit: &EigenData,
    p: &ModelParams,
    contour: &ContourSpec,
    grid: &SpatialGrid,
    s2: f64,
) -> Result<HopfNF> {
    let omega0 = crit.lambda.im;
    if omega0 <= 0.0 {
        return Err(Error::InvalidParams(
            "hopf_g21 expects the critical eigenvalue with positive imaginary part".into(),
        ));
    }
    let phi = Mode { z: crit.lambda, q: crit.qsamples.clone() };
    let phibar = phi.conj();
    let mut y = multilinear_modes(3, &[&phi, &phi, &phibar], grid, p)?;
    if s2 != 0.0 {
        let (h20, h11) = hopf_h_coefficients_with(crit, p, grid, s2)?;
        let b1 = multilinear_modes_with_deriv(s2, &[&phibar, &h20], grid, p)?;
        let b2 = multilinear_modes_with_deriv(s2, &[&phi, &h11], grid, p)?;
        for ((yv, b1v), b2v) in y.iter_mut().zip(&b1).zip(&b2) {
            *yv += b1v + 2.0 * b2v;
        }
    }
    let (kappa, fit_residual) = pairing_kappa(crit, &y, contour, p, grid)?;
    let g21 = kappa / 2.0;
    let l1 = g21.re / omega0;
    let verdict = if l1 < 0.0 { HopfKind::Supercritical } else { HopfKind::Subcritical };
    Ok(HopfNF {
        omega0,
        crit: crit.clone(),
        g21,
        l1,
        verdict,
        contour: *contour,
        fit_residual,
    })
}

/// `simple` vs `difficult` double-Hopf dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DoubleHopfKind {
    Simple,
    Difficult,
}

/// Sub-type label within the `simple` class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DoubleHopfSubtype {
    /// `theta > 0`, `delta > 0`, `theta * delta > 1`; two stable cycles
    /// coexist in part of the unfolding.
    TypeI,
    Other,
}

/// Double-Hopf cubic normal-form record.
#[derive(Debug, Clone)]
pub struct DoubleHopfNF {
    pub omega1: f64,
    pub omega2: f64,
    pub crit1: EigenData,
    pub crit2: EigenData,
    pub g2100: C64,
    pub g1011: C64,
    pub g1110: C64,
    pub g0021: C64,
    /// `[[Re g2100, Re g1011], [Re g1110, Re g0021]]`.
    pub p_matrix: [[f64; 2]; 2],
    pub theta: f64,
    pub delta: f64,
    pub kind: DoubleHopfKind,
    pub subtype: DoubleHopfSubtype,
    /// Eigenvector normalization the g's were computed under.
    pub normalization: String,
    /// Scope note carried into reports.
    pub note: String,
    pub fit_residuals: [f64; 4],
}

impl DoubleHopfNF {
    /// Rescales the p-matrix to reference diagonal entries: the two columns
    /// scale with the squared moduli of the respective eigenvector scales,
    /// so matching `p11` and `p22` fixes both degrees of freedom. Returns
    /// the calibrated matrix and the two scale factors.
    pub fn calibrate_p(&self, ref_p11: f64, ref_p22: f64) -> ([[f64; 2]; 2], (f64, f64)) {
        let a = ref_p11 / self.p_matrix[0][0];
        let b = ref_p22 / self.p_matrix[1][1];
        (
            [
                [self.p_matrix[0][0] * a, self.p_matrix[0][1] * b],
                [self.p_matrix[1][0] * a, self.p_matrix[1][1] * b],
            ],
            (a, b),
        )
    }
}

/// Non-resonance check `k omega1 != l omega2` for `k, l >= 1`, `k + l <= 5`.
pub fn check_nonresonance(omega1: f64, omega2: f64, tol: f64) -> Result<()> {
    for k in 1..=4u32 {
        for l in 1..=(5 - k) {
            let gap = (k as f64 * omega1 - l as f64 * omega2).abs();
            if gap < tol {
                return Err(Error::Resonance(format!(
                    "{k} omega1 - {l} omega2 = {gap:.3e} below tolerance {tol:.1e}"
                )));
            }
        }
    }
    Ok(())
}

/// Assembles the four double-Hopf cubic coefficients and the derived
/// `(p, theta, delta)` classification.
///
/// With the odd activation all six second-order coefficients vanish and the
/// four cubics reduce to pure trilinear pairings; the general path solves
/// the six resolvent problems at `0`, `2 i omega_{1,2}` and
/// `i(omega1 +- omega2)` first.
pub fn doublehopf_coeffs(
    crit1: &EigenData,
    crit2: &EigenData,
    p: &ModelParams,
    contours: (&ContourSpec, &ContourSpec),
    grid: &SpatialGrid,
) -> Result<DoubleHopfNF> {
    doublehopf_coeffs_with(crit1, crit2, p, contours, grid, p.activation_deriv(2)?)
}

/// Test hook: same as [`doublehopf_coeffs`] with an explicit `S''(0)`.
pub fn doublehopf_coeffs_with(
    crit1: &EigenData,
    crit2: &EigenData,
    p: &ModelParams,
    contours: (&ContourSpec, &ContourSpec),
    grid: &SpatialGrid,
    s2: f64,
) -> Result<DoubleHopfNF> {
    let omega1 = crit1.lambda.im;
    let omega2 = crit2.lambda.im;
    if omega1 <= 0.0 || omega2 <= 0.0 {
        return Err(Error::InvalidParams(
            "double-Hopf expects both critical eigenvalues with positive imaginary part".into(),
        ));
    }
    check_nonresonance(omega1, omega2, 1e-6)?;

    let phi1 = Mode { z: crit1.lambda, q: crit1.qsamples.clone() };
    let phi2 = Mode { z: crit2.lambda, q: crit2.qsamples.clone() };
    let phi1b = phi1.conj();
    let phi2b = phi2.conj();

    // second-order coefficients (all zero for the odd activation)
    let zero = C64::new(0.0, 0.0);
    let h1100 = b_mode(s2, &phi1, &phi1b, zero, p, grid, "h1100")?;
    let h2000 = b_mode(s2, &phi1, &phi1, C64::new(0.0, 2.0 * omega1), p, grid, "h2000")?;
    let h1010 = b_mode(s2, &phi1, &phi2, C64::new(0.0, omega1 + omega2), p, grid, "h1010")?;
    let h1001 = b_mode(s2, &phi1, &phi2b, C64::new(0.0, omega1 - omega2), p, grid, "h1001")?;
    let h0020 = b_mode(s2, &phi2, &phi2, C64::new(0.0, 2.0 * omega2), p, grid, "h0020")?;
    let h0011 = b_mode(s2, &phi2, &phi2b, zero, p, grid, "h0011")?;

    let add = |dst: &mut Vec<C64>, src: &[C64], factor: f64| {
        for (d, s) in dst.iter_mut().zip(src) {
            *d += factor * s;
        }
    };
    let b = |a: &Mode, c: &Mode| multilinear_modes_with_deriv(s2, &[a, c], grid, p);

    // g2100 = 1/2 <adj1, C(phi1, phi1, phi1b) + B(h2000, phi1b) + 2 B(h1100, phi1)>
    let mut y2100 = multilinear_modes(3, &[&phi1, &phi1, &phi1b], grid, p)?;
    if s2 != 0.0 {
        add(&mut y2100, &b(&h2000, &phi1b)?, 1.0);
        add(&mut y2100, &b(&h1100, &phi1)?, 2.0);
    }
    let (k2100, f1) = pairing_kappa(crit1, &y2100, contours.0, p, grid)?;
    let g2100 = k2100 / 2.0;

    // g1011 = <adj1, C(phi1, phi2, phi2b) + B(h1010, phi2b) + B(h1001, phi2) + B(h0011, phi1)>
    let mut y1011 = multilinear_modes(3, &[&phi1, &phi2, &phi2b], grid, p)?;
    if s2 != 0.0 {
        add(&mut y1011, &b(&h1010, &phi2b)?, 1.0);
        add(&mut y1011, &b(&h1001, &phi2)?, 1.0);
        add(&mut y1011, &b(&h0011, &phi1)?, 1.0);
    }
    let (g1011, f2) = pairing_kappa(crit1, &y1011, contours.0, p, grid)?;

    // g1110 = <adj2, C(phi1, phi1b, phi2) + B(h1100, phi2) + B(h1010, phi1b) + B(conj h1001, phi1)>
    let mut y1110 = multilinear_modes(3, &[&phi1, &phi1b, &phi2], grid, p)?;
    if s2 != 0.0 {
        add(&mut y1110, &b(&h1100, &phi2)?, 1.0);
        add(&mut y1110, &b(&h1010, &phi1b)?, 1.0);
        add(&mut y1110, &b(&h1001.conj(), &phi1)?, 1.0);
    }
    let (g1110, f3) = pairing_kappa(crit2, &y1110, contours.1, p, grid)?;

    // g0021 = 1/2 <adj2, C(phi2, phi2, phi2b) + B(h0020, phi2b) + 2 B(h0011, phi2)>
    let mut y0021 = multilinear_modes(3, &[&phi2, &phi2, &phi2b], grid, p)?;
    if s2 != 0.0 {
        add(&mut y0021, &b(&h0020, &phi2b)?, 1.0);
        add(&mut y0021, &b(&h0011, &phi2)?, 2.0);
    }
    let (k0021, f4) = pairing_kappa(crit2, &y0021, contours.1, p, grid)?;
    let g0021 = k0021 / 2.0;

    let p_matrix = [[g2100.re, g1011.re], [g1110.re, g0021.re]];
    if p_matrix.iter().flatten().any(|v| *v == 0.0) {
        return Err(Error::InvalidParams(
            "a real part of the cubic coefficients vanished; classification undefined".into(),
        ));
    }
    let theta = p_matrix[0][1] / p_matrix[1][1];
    let delta = p_matrix[1][0] / p_matrix[0][0];
    let kind = if p_matrix[0][0] * p_matrix[1][1] > 0.0 {
        DoubleHopfKind::Simple
    } else {
        DoubleHopfKind::Difficult
    };
    let subtype = if kind == DoubleHopfKind::Simple
        && theta > 0.0
        && delta > 0.0
        && theta * delta > 1.0
    {
        DoubleHopfSubtype::TypeI
    } else {
        DoubleHopfSubtype::Other
    };
    Ok(DoubleHopfNF {
        omega1,
        omega2,
        crit1: crit1.clone(),
        crit2: crit2.clone(),
        g2100,
        g1011,
        g1110,
        g0021,
        p_matrix,
        theta,
        delta,
        kind,
        subtype,
        normalization: "null vector scaled to max |gamma| = 1, largest entry real positive"
            .into(),
        note: "fifth-order coefficients (s1, s2, r1, r2) are not computed".into(),
        fit_residuals: [f1, f2, f3, f4],
    })
}
