//! Point spectrum of the linearized field: the characteristic matrix
//! `S(lambda)`, complex Newton iteration on its determinant over a seed grid,
//! admissibility-based classification of the roots, and eigenfunction
//! reconstruction with a quadrature residual oracle.

use crate::charpoly::{self, PolyData};
use crate::error::{Error, Result};
use crate::model::{ModelParams, SpatialGrid};
use crate::C64;
use nalgebra::DMatrix;
use rayon::prelude::*;

/// Absolute floor under which a characteristic-matrix denominator counts as
/// an exact collision (division blowup). Structural near-collisions are
/// rejected by the admissibility checks and condition guards instead; the
/// kernel-free limit legitimately produces huge but benign entries.
pub const ENTRY_TOL: f64 = 1e-290;

/// Radius of the excluded disk around the essential spectrum point `-alpha`.
pub const ESSENTIAL_EXCLUSION: f64 = 1e-3;

/// Forbidden-region radius for Newton steps (around `-alpha` and the
/// degenerate set).
pub const REGION_GUARD: f64 = 1e-6;

/// Deduplication distance for roots.
pub const DEDUP_TOL: f64 = 1e-6;

/// Acceptance bound on the eigenfunction quadrature residual.
pub const RESIDUAL_BOUND: f64 = 1e-6;

/// The characteristic matrix `S(lambda)` in block form.
///
/// `[S-]_{j,i} = e^{rho_i} / (lambda + mu_j - rho_i)`,
/// `[S+]_{j,i} = e^{-rho_i} / (lambda + mu_j + rho_i)`, assembled as
/// `[[S-, S+], [S+, S-]]`.
#[derive(Debug, Clone)]
pub struct CharMatrix {
    pub lambda: C64,
    pub s_minus: DMatrix<C64>,
    pub s_plus: DMatrix<C64>,
    pub assembled: DMatrix<C64>,
}

/// One element of the point spectrum with its eigenfunction data.
#[derive(Debug, Clone)]
pub struct EigenData {
    pub lambda: C64,
    pub poly: PolyData,
    /// Null vector `(gamma_1..gamma_N, gamma_{-1}..gamma_{-N})`,
    /// `max |gamma| = 1` with the largest entry real positive.
    pub gamma: Vec<C64>,
    /// Samples of `q_lambda` on the grid used for classification.
    pub qsamples: Vec<C64>,
    /// `max |Delta(lambda) q_lambda|` over the grid.
    pub residual: f64,
    /// Smallest singular value of `S(lambda)`.
    pub smin: f64,
}

/// A root of `det S` that failed classification.
#[derive(Debug, Clone)]
pub struct RejectedRoot {
    pub lambda: C64,
    pub reason: String,
    pub smin: f64,
    pub residual: Option<f64>,
}

/// Output of [`spectrum_scan`].
#[derive(Debug, Clone, Default)]
pub struct ScanOutcome {
    pub accepted: Vec<EigenData>,
    pub rejected: Vec<RejectedRoot>,
}

/// Rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Region {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Region { re_min, re_max, im_min, im_max }
    }

    pub fn contains(&self, z: C64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    fn contains_loose(&self, z: C64, slack: f64) -> bool {
        z.re >= self.re_min - slack
            && z.re <= self.re_max + slack
            && z.im >= self.im_min - slack
            && z.im <= self.im_max + slack
    }
}

/// Builds `S(lambda)` from polynomial data; errors when a denominator
/// `k_j -+ rho_i` falls under the entry tolerance.
pub fn s_matrix(poly: &PolyData) -> Result<CharMatrix> {
    let n = poly.rho.len();
    let mut s_minus = DMatrix::<C64>::zeros(n, n);
    let mut s_plus = DMatrix::<C64>::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let dm = poly.k[j] - poly.rho[i];
            let dp = poly.k[j] + poly.rho[i];
            if dm.norm() < ENTRY_TOL || dp.norm() < ENTRY_TOL {
                return Err(Error::NearSingularEntry { lambda: poly.lambda });
            }
            s_minus[(j, i)] = poly.rho[i].exp() / dm;
            s_plus[(j, i)] = (-poly.rho[i]).exp() / dp;
        }
    }
    let mut assembled = DMatrix::<C64>::zeros(2 * n, 2 * n);
    assembled.view_mut((0, 0), (n, n)).copy_from(&s_minus);
    assembled.view_mut((0, n), (n, n)).copy_from(&s_plus);
    assembled.view_mut((n, 0), (n, n)).copy_from(&s_plus);
    assembled.view_mut((n, n), (n, n)).copy_from(&s_minus);
    Ok(CharMatrix { lambda: poly.lambda, s_minus, s_plus, assembled })
}

/// `det S(lambda)` with all pre-checks (essential point, degenerate set,
/// distinct roots). LU with partial pivoting.
pub fn char_det(lambda: C64, p: &ModelParams) -> Result<C64> {
    if (lambda + p.alpha()).norm() < REGION_GUARD {
        return Err(Error::EssentialPoint);
    }
    let poly = PolyData::build(lambda, p)?;
    let s = s_matrix(&poly)?;
    Ok(s.assembled.lu().determinant())
}

/// Like [`char_det`] but with contour-continuous root labels (see
/// [`PolyData::build_matched`]); used for winding diagnostics.
pub fn char_det_matched(lambda: C64, p: &ModelParams, reference: &[C64]) -> Result<C64> {
    if (lambda + p.alpha()).norm() < REGION_GUARD {
        return Err(Error::EssentialPoint);
    }
    let poly = PolyData::build_matched(lambda, p, reference)?;
    let s = s_matrix(&poly)?;
    Ok(s.assembled.lu().determinant())
}

fn forbidden(lambda: C64, p: &ModelParams) -> bool {
    if (lambda + p.alpha()).norm() < REGION_GUARD {
        return true;
    }
    let n = p.n_terms();
    for i in 0..n {
        for j in i + 1..n {
            let s_point = -(p.mu(i) + p.mu(j)) / 2.0;
            if (lambda - s_point).norm() < REGION_GUARD {
                return true;
            }
        }
    }
    false
}

/// Complex Newton iteration on `lambda -> det S(lambda)`.
///
/// The derivative is a central complex finite difference with step
/// `1e-7 max(1, |lambda|)`. Steps entering the guard region around `-alpha`
/// or the degenerate set abort.
pub fn newton_solve(seed: C64, p: &ModelParams, tol: f64, maxit: usize) -> Result<C64> {
    if tol <= 0.0 {
        return Err(Error::InvalidParams("tol must be > 0".into()));
    }
    let mut lambda = seed;
    let mut last_step = f64::INFINITY;
    for _ in 0..maxit {
        if forbidden(lambda, p) {
            return Err(Error::RegionAbort { lambda });
        }
        let f = char_det(lambda, p)?;
        let h = 1e-7 * lambda.norm().max(1.0);
        let fp = char_det(lambda + h, p)?;
        let fm = char_det(lambda - h, p)?;
        let df = (fp - fm) / (2.0 * h);
        if df.norm() == 0.0 {
            return Err(Error::NoConvergence { maxit, last_step });
        }
        let step = f / df;
        lambda -= step;
        last_step = step.norm();
        if last_step < tol * lambda.norm().max(1.0) {
            if forbidden(lambda, p) {
                return Err(Error::RegionAbort { lambda });
            }
            return Ok(lambda);
        }
    }
    Err(Error::NoConvergence { maxit, last_step })
}

/// Right singular vector of the smallest singular value, normalized to
/// `max |gamma| = 1` with the largest-modulus entry real positive.
///
/// Errors with `NotAnEigenvalue` when the smallest singular value exceeds
/// `1e-6` times the largest.
pub fn null_vector(s: &CharMatrix) -> Result<Vec<C64>> {
    let svd = s.assembled.clone().svd(false, true);
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let smax = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    if smin > 1e-6 * smax {
        return Err(Error::NotAnEigenvalue { ratio: smin / smax });
    }
    let v_t = svd.v_t.expect("requested V^T");
    let row = v_t.nrows() - 1;
    let mut gamma: Vec<C64> = (0..v_t.ncols()).map(|c| v_t[(row, c)].conj()).collect();
    let (idx, _) = gamma
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.norm().partial_cmp(&b.norm()).unwrap())
        .expect("nonempty");
    let pivot = gamma[idx];
    let phase = pivot / pivot.norm();
    let scale = pivot.norm();
    for g in &mut gamma {
        *g = *g / phase / scale;
    }
    Ok(gamma)
}

/// Smallest singular value of `S(lambda)` (diagnostic).
pub fn smallest_singular_value(s: &CharMatrix) -> f64 {
    let svd = s.assembled.clone().svd(false, false);
    svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Evaluates the eigenfunction ansatz
/// `q(x) = sum_i gamma_i e^{rho_i x} + gamma_{-i} e^{-rho_i x}`.
pub fn eigenfunction_at(poly: &PolyData, gamma: &[C64], x: f64) -> C64 {
    let n = poly.rho.len();
    let mut q = C64::new(0.0, 0.0);
    for i in 0..n {
        q += gamma[i] * (poly.rho[i] * x).exp() + gamma[n + i] * (-poly.rho[i] * x).exp();
    }
    q
}

impl EigenData {
    /// The eigenfunction evaluated at arbitrary `x` via the ansatz.
    pub fn eigenfunction(&self, x: f64) -> C64 {
        eigenfunction_at(&self.poly, &self.gamma, x)
    }

    /// Full space-time eigenfunction `phi(t, x) = e^{lambda t} q(x)`.
    pub fn history(&self, t: f64, x: f64) -> C64 {
        (self.lambda * t).exp() * self.eigenfunction(x)
    }

    /// Copy with the null vector replaced by externally supplied
    /// coefficients (e.g. reference values); resamples the eigenfunction.
    pub fn with_gamma(&self, gamma: Vec<C64>, grid: &SpatialGrid) -> Self {
        let qsamples = grid
            .nodes()
            .iter()
            .map(|&x| eigenfunction_at(&self.poly, &gamma, x))
            .collect();
        EigenData { gamma, qsamples, ..self.clone() }
    }
}

/// Quadrature evaluation of `(Delta(lambda) q)(x)` at every grid node:
///
/// `(lambda + alpha) q(x) - int J0(x, r) e^{-lambda tau0 - lambda |x-r|} q(r) dr`
///
/// with `J0` the effective (linearized) kernel. This is the eigen-residual
/// oracle; it never touches the characteristic-matrix machinery. The kernel
/// depends on `x, r` only through `|x - r|`, so it is precomputed per
/// distance index.
pub fn delta_apply(lambda: C64, q: &[C64], grid: &SpatialGrid, p: &ModelParams) -> Vec<C64> {
    let c = p.effective_coefficients();
    let nodes = grid.nodes();
    let weights = grid.weights();
    let n = nodes.len();
    let e_tau0 = (-lambda * p.tau0()).exp();
    // kernel * delay factor per distance index: J0(d) e^{-lambda d}, d = idx*h
    let kernel: Vec<C64> = (0..n)
        .map(|idx| {
            let d = (nodes[idx] + 1.0).abs();
            let mut j0 = C64::new(0.0, 0.0);
            for (i, ci) in c.iter().enumerate() {
                j0 += ci * (-p.mu(i) * d).exp();
            }
            j0 * (-lambda * d).exp()
        })
        .collect();
    (0..n)
        .into_par_iter()
        .map(|a| {
            let mut integral = C64::new(0.0, 0.0);
            for b in 0..n {
                let idx = a.abs_diff(b);
                integral += weights[b] * kernel[idx] * q[b];
            }
            (lambda + p.alpha()) * q[a] - e_tau0 * integral
        })
        .collect()
}

/// Builds full eigen data at an (approximate) root `lambda`: polynomial,
/// characteristic matrix, null vector, sampled eigenfunction and residual.
pub fn eigen_data(lambda: C64, p: &ModelParams, grid: &SpatialGrid) -> Result<EigenData> {
    let poly = PolyData::build(lambda, p)?;
    let s = s_matrix(&poly)?;
    let smin = smallest_singular_value(&s);
    let gamma = null_vector(&s)?;
    let qsamples: Vec<C64> = grid
        .nodes()
        .iter()
        .map(|&x| eigenfunction_at(&poly, &gamma, x))
        .collect();
    let residual = delta_apply(lambda, &qsamples, grid, p)
        .iter()
        .map(|v| v.norm())
        .fold(0.0_f64, f64::max);
    Ok(EigenData { lambda, poly, gamma, qsamples, residual, smin })
}

/// Options for [`spectrum_scan`].
#[derive(Debug, Clone)]
pub struct ScanOptions {
    pub newton_tol: f64,
    pub newton_maxit: usize,
    pub admissibility_tol: f64,
    pub residual_bound: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            newton_tol: 1e-12,
            newton_maxit: 50,
            // looser than the raw degeneracy tolerance: at a rho-collision
            // point the root separation scales like sqrt(|lambda - lambda^|),
            // so a lambda resolved to 1e-12 still leaves |rho_1 - rho_2|
            // around 1e-7 .. 1e-6
            admissibility_tol: 1e-6,
            residual_bound: RESIDUAL_BOUND,
        }
    }
}

/// Newton from every node of an `nx x ny` seed grid over `region`; roots are
/// deduplicated, classified through the admissibility conditions plus the
/// eigen-residual bound, and (for real parameter sets) closed under complex
/// conjugation. Seeds whose iteration fails are dropped silently.
pub fn spectrum_scan(
    region: Region,
    seeds: (usize, usize),
    p: &ModelParams,
    grid: &SpatialGrid,
    opts: &ScanOptions,
) -> ScanOutcome {
    let (nx, ny) = seeds;
    let real_params = p.is_real();
    let im_lo = if real_params { region.im_min.max(0.0) } else { region.im_min };
    let mut seed_points = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        let re = region.re_min + (region.re_max - region.re_min) * (i as f64 + 0.5) / nx as f64;
        for j in 0..ny {
            let im = im_lo + (region.im_max - im_lo) * (j as f64 + 0.5) / ny as f64;
            seed_points.push(C64::new(re, im));
        }
    }

    let mut roots: Vec<C64> = seed_points
        .par_iter()
        .filter_map(|&seed| newton_solve(seed, p, opts.newton_tol, opts.newton_maxit).ok())
        .collect();

    // region filter (small slack for roots polished just over the edge) and
    // the excluded disk around the essential point
    roots.retain(|z| {
        region.contains_loose(*z, 10.0 * DEDUP_TOL)
            && (z + p.alpha()).norm() > ESSENTIAL_EXCLUSION
    });
    if real_params {
        // conjugate closure: scanning covered the upper half only
        let conj: Vec<C64> = roots
            .iter()
            .filter(|z| z.im > DEDUP_TOL)
            .map(|z| z.conj())
            .filter(|z| region.contains_loose(*z, 10.0 * DEDUP_TOL))
            .collect();
        roots.extend(conj);
    }
    roots.sort_by(|a, b| {
        (a.im, a.re)
            .partial_cmp(&(b.im, b.re))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut unique: Vec<C64> = Vec::new();
    for z in roots {
        if !unique.iter().any(|u| (u - z).norm() < DEDUP_TOL) {
            unique.push(z);
        }
    }

    let classified: Vec<std::result::Result<EigenData, RejectedRoot>> = unique
        .par_iter()
        .map(|&lambda| classify_root(lambda, p, grid, opts))
        .collect();

    let mut outcome = ScanOutcome::default();
    for c in classified {
        match c {
            Ok(e) => outcome.accepted.push(e),
            Err(r) => outcome.rejected.push(r),
        }
    }
    outcome
}

fn classify_root(
    lambda: C64,
    p: &ModelParams,
    grid: &SpatialGrid,
    opts: &ScanOptions,
) -> std::result::Result<EigenData, RejectedRoot> {
    let reject = |reason: String, smin: f64, residual: Option<f64>| RejectedRoot {
        lambda,
        reason,
        smin,
        residual,
    };
    let poly = match PolyData::build(lambda, p) {
        Ok(poly) => poly,
        Err(e) => return Err(reject(e.to_string(), f64::NAN, None)),
    };
    let adm = charpoly::admissibility(&poly, p, opts.admissibility_tol);
    if !adm.is_accept() {
        // smin is still informative for rejected roots when S is computable
        let smin = s_matrix(&poly)
            .map(|s| smallest_singular_value(&s))
            .unwrap_or(f64::NAN);
        return Err(reject(adm.reason().to_string(), smin, None));
    }
    match eigen_data(lambda, p, grid) {
        Ok(e) => {
            // the raw sup-residual scales with |lambda| and the eigenfunction
            // magnitude; gate on the normalized quantity
            let qmax = e.qsamples.iter().map(|v| v.norm()).fold(0.0_f64, f64::max);
            let scale = (lambda.norm() + p.alpha()) * qmax.max(1e-300);
            if e.residual <= opts.residual_bound * scale {
                Ok(e)
            } else {
                Err(reject(
                    format!(
                        "eigen-residual {:.3e} above bound ({:.3e} normalized)",
                        e.residual,
                        e.residual / scale
                    ),
                    e.smin,
                    Some(e.residual),
                ))
            }
        }
        Err(err) => Err(reject(err.to_string(), f64::NAN, None)),
    }
}

/// Points of the degenerate set `{-(mu_i + mu_j)/2, i < j}`.
pub fn degenerate_set_points(p: &ModelParams) -> Vec<C64> {
    let n = p.n_terms();
    let mut pts = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pts.push(-(p.mu(i) + p.mu(j)) / 2.0);
        }
    }
    pts
}
