//! The even characteristic polynomial `P(rho)` attached to a fixed `lambda`,
//! built by two independent routes, its roots `+-rho_i(lambda)` and the
//! admissibility conditions under which `det S(lambda) = 0` certifies an
//! eigenvalue.
//!
//! `P` depends on `rho` only through `s = rho^2`, so everything is phrased in
//! terms of the degree-`N` polynomial in `s` with coefficients `coeffs_s`
//! (low to high). Coefficients are defined up to a global nonzero factor; the
//! two assembly routes differ by exactly a factor 2 and comparisons use monic
//! normalization.

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::C64;
use nalgebra::{DMatrix, DVector};

/// Default relative tolerance separating genuine degeneracies from roundoff.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Verdict of [`degeneracy_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetMembership {
    /// `lambda` is (numerically) in the degenerate set: some `k_i^2 = k_j^2`.
    InS,
    NotInS,
}

/// Verdict of [`admissibility`]: either all hypotheses of the spectral
/// theorem hold, or the first failing condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admissibility {
    Accept,
    /// (a) fails: `lambda` in the degenerate set.
    InDegenerateSet,
    /// (b) fails: the `2N` values `+-rho_i` are not pairwise distinct.
    RepeatedRho,
    /// (c) fails: some `k_j = +-rho_i`.
    KRhoCollision,
}

impl Admissibility {
    pub fn is_accept(&self) -> bool {
        matches!(self, Admissibility::Accept)
    }

    pub fn reason(&self) -> &'static str {
        match self {
            Admissibility::Accept => "ok",
            Admissibility::InDegenerateSet => "lambda in degenerate set",
            Admissibility::RepeatedRho => "rho collision",
            Admissibility::KRhoCollision => "k equals +-rho",
        }
    }
}

/// Characteristic polynomial data at one `lambda`.
#[derive(Debug, Clone)]
pub struct PolyData {
    pub lambda: C64,
    /// Shifted rates `k_i = lambda + mu_i`.
    pub k: Vec<C64>,
    /// Coefficients of `P` in `s = rho^2`, low to high, length `N + 1`.
    pub coeffs_s: Vec<C64>,
    /// One representative per `+-` pair, `Re rho_i >= 0` (tie: `Im >= 0`),
    /// sorted by `|rho_i^2|` ascending.
    pub rho: Vec<C64>,
}

/// `k_i = lambda + mu_i`.
pub fn shifted_rates(lambda: C64, p: &ModelParams) -> Vec<C64> {
    (0..p.n_terms()).map(|i| lambda + p.mu(i)).collect()
}

/// Flags `lambda` within `tol` of the degenerate set
/// `{lambda : k_i^2 = k_j^2 for some i != j} = {-(mu_i + mu_j)/2}`.
pub fn degeneracy_check(lambda: C64, p: &ModelParams, tol: f64) -> SetMembership {
    let k = shifted_rates(lambda, p);
    let scale = k.iter().map(|ki| ki.norm_sqr()).fold(1.0_f64, f64::max);
    for i in 0..k.len() {
        for j in i + 1..k.len() {
            if (k[i] * k[i] - k[j] * k[j]).norm() < tol * scale {
                return SetMembership::InS;
            }
        }
    }
    SetMembership::NotInS
}

/// Multiplies polynomial `p` (low to high) by the monomial `(s - root)`.
fn mul_linear(poly: &mut Vec<C64>, root: C64) {
    let mut out = vec![C64::new(0.0, 0.0); poly.len() + 1];
    for (i, &c) in poly.iter().enumerate() {
        out[i] -= c * root;
        out[i + 1] += c;
    }
    *poly = out;
}

/// Closed-form coefficients of `P` in `s = rho^2` (route of record):
///
/// `P = e^{lambda tau0} (lambda + alpha)/2 * prod_j (s - k_j^2)
///    + sum_i c_i k_i prod_{j != i} (s - k_j^2)`
pub fn closed_form_poly(lambda: C64, p: &ModelParams) -> Result<Vec<C64>> {
    let n = p.n_terms();
    let k = shifted_rates(lambda, p);
    let c = p.effective_coefficients();
    let lead = (lambda * p.tau0()).exp() * (lambda + p.alpha()) / 2.0;
    if (lambda + p.alpha()).norm() < 1e-12 {
        return Err(Error::DegenerateLeading { lambda });
    }
    let mut coeffs = vec![lead];
    for kj in &k {
        mul_linear(&mut coeffs, kj * kj);
    }
    for i in 0..n {
        let mut part = vec![c[i] * k[i]];
        for (j, kj) in k.iter().enumerate() {
            if j != i {
                mul_linear(&mut part, kj * kj);
            }
        }
        for (dst, src) in coeffs.iter_mut().zip(part.iter()) {
            *dst += src;
        }
    }
    Ok(coeffs)
}

/// Vandermonde route (test oracle): solves `W zeta = -(k_i^{2N})` and maps
/// through `beta = M^T [zeta; 1]` with `M^T = e^{lambda tau0}(lambda+alpha) I
/// + 2 Xi`. Returns `(zeta, beta)`; `beta` equals twice the closed form.
pub fn vandermonde_coeffs(lambda: C64, p: &ModelParams) -> Result<(Vec<C64>, Vec<C64>)> {
    let n = p.n_terms();
    if degeneracy_check(lambda, p, DEGENERACY_TOL) == SetMembership::InS {
        return Err(Error::SingularVandermonde { lambda });
    }
    let k = shifted_rates(lambda, p);
    let c = p.effective_coefficients();

    // W[i][j] = k_i^{2j}, rhs_i = -k_i^{2N}
    let mut w = DMatrix::<C64>::zeros(n, n);
    let mut rhs = DVector::<C64>::zeros(n);
    for i in 0..n {
        let k2 = k[i] * k[i];
        let mut pow = C64::new(1.0, 0.0);
        for j in 0..n {
            w[(i, j)] = pow;
            pow *= k2;
        }
        rhs[i] = -pow;
    }
    let zeta = w
        .lu()
        .solve(&rhs)
        .ok_or(Error::SingularVandermonde { lambda })?;

    // M^T = a I + 2 Xi with Xi strictly upper, Xi = sum_i c_i k_i Xi_i and
    // [Xi_i]_{j,m} = k_i^{2(m - j - 1)} for m > j.
    let a = (lambda * p.tau0()).exp() * (lambda + p.alpha());
    let mut mt = DMatrix::<C64>::from_diagonal_element(n + 1, n + 1, a);
    for i in 0..n {
        let k2 = k[i] * k[i];
        let cik = c[i] * k[i];
        for j in 0..n + 1 {
            let mut pow = C64::new(1.0, 0.0);
            for m in j + 1..n + 1 {
                mt[(j, m)] += 2.0 * cik * pow;
                pow *= k2;
            }
        }
    }
    let mut z = DVector::<C64>::zeros(n + 1);
    for i in 0..n {
        z[i] = zeta[i];
    }
    z[n] = C64::new(1.0, 0.0);
    let beta = &mt * z;
    Ok((zeta.iter().copied().collect(), beta.iter().copied().collect()))
}

/// Monic normalization (divide by the leading coefficient).
pub fn monic(coeffs: &[C64]) -> Vec<C64> {
    let lead = *coeffs.last().expect("nonempty coefficients");
    coeffs.iter().map(|c| c / lead).collect()
}

/// Evaluates the polynomial in `s` (low-to-high coefficients) at `s`.
pub fn eval_in_s(coeffs: &[C64], s: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * s + c)
}

/// Evaluates `P(rho)` = polynomial in `s = rho^2`.
pub fn eval_at_rho(coeffs: &[C64], rho: C64) -> C64 {
    eval_in_s(coeffs, rho * rho)
}

fn principal_rho(s: C64) -> C64 {
    let mut rho = s.sqrt();
    if rho.re < 0.0 || (rho.re == 0.0 && rho.im < 0.0) {
        rho = -rho;
    }
    rho
}

/// Roots `s_1..s_N` of the degree-`N` polynomial in `s`; closed formulas for
/// `N <= 2`, companion-matrix eigenvalues beyond.
fn s_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0_f64, f64::max);
    if lead.norm() < 1e-13 * scale.max(1.0) {
        return Err(Error::DegenerateLeading { lambda: C64::new(f64::NAN, f64::NAN) });
    }
    match n {
        1 => Ok(vec![-coeffs[0] / coeffs[1]]),
        2 => {
            let (a, b, c) = (coeffs[2], coeffs[1], coeffs[0]);
            let disc = (b * b - 4.0 * a * c).sqrt();
            // pick the sign avoiding cancellation
            let q = if (b + disc).norm() >= (b - disc).norm() {
                -0.5 * (b + disc)
            } else {
                -0.5 * (b - disc)
            };
            Ok(vec![q / a, c / q])
        }
        _ => {
            let mut comp = DMatrix::<C64>::zeros(n, n);
            for i in 0..n {
                comp[(i, n - 1)] = -coeffs[i] / lead;
            }
            for i in 1..n {
                comp[(i, i - 1)] = C64::new(1.0, 0.0);
            }
            let schur = comp.schur();
            let t = schur.unpack().1;
            Ok((0..n).map(|i| t[(i, i)]).collect())
        }
    }
}

/// Representative roots `rho_i` of `P` from its `s`-coefficients.
///
/// Returns the principal square roots (`Re >= 0`, tie `Im >= 0`), sorted by
/// `|s|` ascending. Errors: vanishing leading coefficient, and repeated `s`
/// roots or `s = 0` (either makes the `+-rho` set collide).
pub fn rho_roots(coeffs_s: &[C64], tol: f64) -> Result<Vec<C64>> {
    let mut ss = s_roots(coeffs_s)?;
    ss.sort_by(|a, b| {
        a.norm()
            .partial_cmp(&b.norm())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.arg().partial_cmp(&b.arg()).unwrap_or(std::cmp::Ordering::Equal))
    });
    let scale = ss.iter().map(|s| s.norm()).fold(1.0_f64, f64::max);
    for i in 0..ss.len() {
        if ss[i].norm() < tol * scale {
            return Err(Error::RepeatedRoots { lambda: C64::new(f64::NAN, f64::NAN) });
        }
        for j in i + 1..ss.len() {
            if (ss[i] - ss[j]).norm() < tol * scale {
                return Err(Error::RepeatedRoots { lambda: C64::new(f64::NAN, f64::NAN) });
            }
        }
    }
    Ok(ss.into_iter().map(principal_rho).collect())
}

impl PolyData {
    /// Builds the full polynomial data at `lambda`: degeneracy check, closed
    /// form, representative roots.
    pub fn build(lambda: C64, p: &ModelParams) -> Result<Self> {
        if degeneracy_check(lambda, p, DEGENERACY_TOL) == SetMembership::InS {
            return Err(Error::SingularVandermonde { lambda });
        }
        let coeffs_s = closed_form_poly(lambda, p)?;
        let rho = rho_roots(&coeffs_s, DEGENERACY_TOL).map_err(|e| match e {
            Error::RepeatedRoots { .. } => Error::RepeatedRoots { lambda },
            Error::DegenerateLeading { .. } => Error::DegenerateLeading { lambda },
            other => other,
        })?;
        Ok(PolyData { lambda, k: shifted_rates(lambda, p), coeffs_s, rho })
    }

    /// Like [`PolyData::build`] but chooses, per slot, the `+-sqrt(s_j)`
    /// assignment closest to `reference[slot]`. Used along contours where the
    /// root labels must follow analytic continuation rather than the static
    /// ordering convention.
    pub fn build_matched(lambda: C64, p: &ModelParams, reference: &[C64]) -> Result<Self> {
        if degeneracy_check(lambda, p, DEGENERACY_TOL) == SetMembership::InS {
            return Err(Error::SingularVandermonde { lambda });
        }
        let coeffs_s = closed_form_poly(lambda, p)?;
        let ss = s_roots(&coeffs_s).map_err(|e| match e {
            Error::DegenerateLeading { .. } => Error::DegenerateLeading { lambda },
            other => other,
        })?;
        let n = ss.len();
        assert_eq!(reference.len(), n, "reference root count mismatch");
        let base: Vec<C64> = ss.iter().map(|s| s.sqrt()).collect();
        let mut used = vec![false; n];
        let mut rho = vec![C64::new(0.0, 0.0); n];
        for slot in 0..n {
            let mut best: Option<(f64, usize, C64)> = None;
            for (j, &r) in base.iter().enumerate() {
                if used[j] {
                    continue;
                }
                for cand in [r, -r] {
                    let d = (cand - reference[slot]).norm();
                    if best.map_or(true, |(bd, _, _)| d < bd) {
                        best = Some((d, j, cand));
                    }
                }
            }
            let (_, j, cand) = best.expect("nonempty candidates");
            used[j] = true;
            rho[slot] = cand;
        }
        Ok(PolyData { lambda, k: shifted_rates(lambda, p), coeffs_s, rho })
    }

    /// Magnitude scale of the coefficients (for residual normalization).
    pub fn coeff_scale(&self) -> f64 {
        self.coeffs_s.iter().map(|c| c.norm()).fold(0.0_f64, f64::max)
    }
}

/// Checks the hypotheses of the spectral theorem at `poly.lambda`:
/// (a) not in the degenerate set, (b) the `2N` values `+-rho_i` pairwise
/// distinct beyond `tol`, (c) `|k_j -+ rho_i| > tol`.
pub fn admissibility(poly: &PolyData, p: &ModelParams, tol: f64) -> Admissibility {
    if degeneracy_check(poly.lambda, p, tol) == SetMembership::InS {
        return Admissibility::InDegenerateSet;
    }
    let scale = poly.rho.iter().map(|r| r.norm()).fold(1.0_f64, f64::max);
    for i in 0..poly.rho.len() {
        if poly.rho[i].norm() < tol * scale {
            return Admissibility::RepeatedRho;
        }
        for j in i + 1..poly.rho.len() {
            let a = poly.rho[i];
            let b = poly.rho[j];
            if (a - b).norm() < tol * scale || (a + b).norm() < tol * scale {
                return Admissibility::RepeatedRho;
            }
        }
    }
    for kj in &poly.k {
        for ri in &poly.rho {
            if (kj - ri).norm() < tol * scale.max(kj.norm()) || (kj + ri).norm() < tol * scale.max(kj.norm()) {
                return Admissibility::KRhoCollision;
            }
        }
    }
    Admissibility::Accept
}
