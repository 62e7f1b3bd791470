//! Trapezoid discretization of the field as a classical DDE with `m + 1`
//! components and up to `m + 1` distinct delays, integrated by fixed-step
//! RK4 with the method of steps, plus a linearized spectrum and attractor
//! diagnostics — the independent validation path for the analytic machinery.

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::spectrum::{Region, DEDUP_TOL};
use crate::C64;
use nalgebra::DMatrix;

/// State-norm bound beyond which the integration aborts.
const BLOWUP_LIMIT: f64 = 1e6;

/// The discretized field: mesh, trapezoid end-corrections, coupling and
/// delay matrices.
///
/// `coupling[j][i] = (2/m) w_i J(delta |i - j|)` uses the raw connectivity
/// (the activation supplies the nonlinearity); `delays[j][i] = tau0 +
/// delta |i - j|`.
#[derive(Debug, Clone)]
pub struct DiscreteModel {
    m: usize,
    delta: f64,
    weights: Vec<f64>,
    coupling: DMatrix<f64>,
    delays: DMatrix<f64>,
    params: ModelParams,
}

/// Forward-time simulation output on the mesh.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// One `(m + 1)`-vector per time.
    pub states: Vec<Vec<f64>>,
    pub dt: f64,
    pub m: usize,
    /// Tag describing the initial condition (for run metadata).
    pub history_tag: String,
}

/// Output of [`attractor_diagnostics`].
#[derive(Debug, Clone)]
pub struct AttractorDiagnostics {
    pub period: f64,
    /// Half peak-to-peak amplitude per node over the trailing window.
    pub amplitude_profile: Vec<f64>,
    pub converged: bool,
    /// Node index the period was read from.
    pub node: usize,
}

impl DiscreteModel {
    /// Builds the mesh of `m` intervals (`m` even), nodes `x_j = -1 + j
    /// delta` with `delta = 2/m`, end-corrected weights and the coupling and
    /// delay matrices.
    pub fn build(m: usize, p: &ModelParams) -> Result<Self> {
        if m < 2 || m % 2 != 0 {
            return Err(Error::UnsupportedMesh { m });
        }
        if !p.is_real() {
            return Err(Error::InvalidParams(
                "the discretized simulation path requires real kernel parameters".into(),
            ));
        }
        let n = m + 1;
        let delta = 2.0 / m as f64;
        let mut weights = vec![1.0; n];
        weights[0] = 0.5;
        weights[m] = 0.5;
        let mut coupling = DMatrix::<f64>::zeros(n, n);
        let mut delays = DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                let d = delta * (i as f64 - j as f64).abs();
                coupling[(j, i)] = (2.0 / m as f64) * weights[i] * p.connectivity(0.0, d).re;
                delays[(j, i)] = p.tau0() + d;
            }
        }
        Ok(DiscreteModel { m, delta, weights, coupling, delays, params: p.clone() })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn coupling(&self) -> &DMatrix<f64> {
        &self.coupling
    }

    pub fn delays(&self) -> &DMatrix<f64> {
        &self.delays
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Mesh node positions `x_j = -1 + j delta`.
    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.m).map(|j| -1.0 + self.delta * j as f64).collect()
    }

    /// Characteristic matrix of the linearization at zero:
    /// `(lambda + alpha) I - coupling .* S'(0) .* exp(-lambda delays)`.
    pub fn char_matrix(&self, lambda: C64) -> DMatrix<C64> {
        let n = self.m + 1;
        let s1 = self.params.r() / 4.0;
        let mut a = DMatrix::<C64>::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                a[(j, i)] = -self.coupling[(j, i)] * s1 * (-lambda * self.delays[(j, i)]).exp();
            }
            a[(j, j)] += lambda + self.params.alpha();
        }
        a
    }

    /// `det` of [`DiscreteModel::char_matrix`] (LU).
    pub fn char_det(&self, lambda: C64) -> C64 {
        self.char_matrix(lambda).lu().determinant()
    }

    /// Newton iteration on the discrete characteristic determinant, same
    /// scheme as the analytic root finder.
    pub fn newton_solve(&self, seed: C64, tol: f64, maxit: usize) -> Result<C64> {
        if tol <= 0.0 {
            return Err(Error::InvalidParams("tol must be > 0".into()));
        }
        let mut lambda = seed;
        let mut last_step = f64::INFINITY;
        for _ in 0..maxit {
            let f = self.char_det(lambda);
            let h = 1e-7 * lambda.norm().max(1.0);
            let df = (self.char_det(lambda + h) - self.char_det(lambda - h)) / (2.0 * h);
            if df.norm() == 0.0 || !df.is_finite() {
                return Err(Error::NoConvergence { maxit, last_step });
            }
            let step = f / df;
            lambda -= step;
            last_step = step.norm();
            if last_step < tol * lambda.norm().max(1.0) {
                return Ok(lambda);
            }
        }
        Err(Error::NoConvergence { maxit, last_step })
    }

    /// Newton from every seed, deduplicated and filtered to `region`.
    pub fn spectrum_scan(&self, region: Region, seeds: &[C64], tol: f64) -> Vec<C64> {
        use rayon::prelude::*;
        let mut roots: Vec<C64> = seeds
            .par_iter()
            .filter_map(|&s| self.newton_solve(s, tol, 60).ok())
            .collect();
        roots.retain(|z| region.contains(*z));
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
        unique
    }
}

/// Integrates the discretized field forward by fixed-step RK4 with the
/// method of steps.
///
/// `dt` must divide both the mesh spacing `delta` and `tau0` so every delay
/// lands exactly on the step grid; the two half-step stages read linear
/// interpolants between stored steps. `history(t, x)` supplies the state for
/// `t` in `[-h, 0]`.
pub fn simulate(
    dm: &DiscreteModel,
    history: &dyn Fn(f64, f64) -> f64,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    simulate_tagged(dm, history, t_end, dt, "custom")
}

/// [`simulate`] with an explicit metadata tag for the initial condition.
pub fn simulate_tagged(
    dm: &DiscreteModel,
    history: &dyn Fn(f64, f64) -> f64,
    t_end: f64,
    dt: f64,
    history_tag: &str,
) -> Result<Trajectory> {
    if !(dt > 0.0) || !(t_end > 0.0) {
        return Err(Error::StepMismatch("dt and t_end must be positive".into()));
    }
    let ratio_delta = dm.delta / dt;
    if (ratio_delta - ratio_delta.round()).abs() > 1e-9 || ratio_delta < 1.0 - 1e-9 {
        return Err(Error::StepMismatch(format!(
            "dt = {dt} does not divide the mesh spacing delta = {}",
            dm.delta
        )));
    }
    let ratio_tau = dm.params.tau0() / dt;
    if (ratio_tau - ratio_tau.round()).abs() > 1e-9 {
        return Err(Error::StepMismatch(format!(
            "dt = {dt} does not divide tau0 = {}",
            dm.params.tau0()
        )));
    }
    let n = dm.m + 1;
    let lag_tau = ratio_tau.round() as usize;
    let lag_delta = ratio_delta.round() as usize;
    // lag per distance index: delays(d) = tau0 + d * delta
    let lags: Vec<usize> = (0..n).map(|d| lag_tau + d * lag_delta).collect();
    let max_lag = lags[n - 1].max(1);
    let steps = (t_end / dt).round() as usize;

    let nodes = dm.nodes();
    let off = max_lag;
    // states[off + k] = state at step k; prefix filled from the history
    let mut states = vec![vec![0.0f64; n]; off + steps + 1];
    // s_table[off + k][i] = S(V_i(k dt)), memoized per committed state
    let mut s_table = vec![vec![0.0f64; n]; off + steps + 1];
    let act = |v: f64| dm.params.activation(v);
    for k in 0..=max_lag {
        let t = (k as f64 - max_lag as f64) * dt;
        for i in 0..n {
            let v = history(t, nodes[i]);
            states[k][i] = v;
            s_table[k][i] = act(v);
        }
    }

    // delayed-S rows per distance for one step: exact grid reads for the
    // full-step stages, interpolated state for the two half-step stages
    let mut s_full0 = vec![vec![0.0f64; n]; n]; // stage at t    : index k - lag
    let mut s_half = vec![vec![0.0f64; n]; n]; // stages at t+dt/2
    let mut s_full1 = vec![vec![0.0f64; n]; n]; // stage at t+dt : index k+1 - lag
    let alpha = dm.params.alpha();

    let mut k1 = vec![0.0f64; n];
    let mut k2 = vec![0.0f64; n];
    let mut k3 = vec![0.0f64; n];
    let mut k4 = vec![0.0f64; n];
    let mut stage = vec![0.0f64; n];

    for k in 0..steps {
        let base = off + k;
        for (d, &lag) in lags.iter().enumerate() {
            if lag == 0 {
                continue; // handled from the live stage state below
            }
            let i0 = base - lag;
            for i in 0..n {
                s_full0[d][i] = s_table[i0][i];
                s_full1[d][i] = s_table[i0 + 1][i];
                s_half[d][i] = act(0.5 * (states[i0][i] + states[i0 + 1][i]));
            }
        }
        let rhs = |v: &[f64], delayed: &[Vec<f64>], out: &mut [f64], live: Option<&[f64]>| {
            for j in 0..n {
                let mut acc = 0.0;
                for i in 0..n {
                    let d = i.abs_diff(j);
                    let s = if lags[d] == 0 {
                        act(live.expect("live stage state for zero lag")[i])
                    } else {
                        delayed[d][i]
                    };
                    acc += dm.coupling[(j, i)] * s;
                }
                out[j] = -alpha * v[j] + acc;
            }
        };

        let v0 = states[base].clone();
        rhs(&v0, &s_full0, &mut k1, Some(&v0));
        for i in 0..n {
            stage[i] = v0[i] + 0.5 * dt * k1[i];
        }
        rhs(&stage.clone(), &s_half, &mut k2, Some(&stage));
        for i in 0..n {
            stage[i] = v0[i] + 0.5 * dt * k2[i];
        }
        rhs(&stage.clone(), &s_half, &mut k3, Some(&stage));
        for i in 0..n {
            stage[i] = v0[i] + dt * k3[i];
        }
        rhs(&stage.clone(), &s_full1, &mut k4, Some(&stage));

        let mut sup = 0.0f64;
        for i in 0..n {
            let v = v0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            states[base + 1][i] = v;
            s_table[base + 1][i] = act(v);
            sup = sup.max(v.abs());
        }
        if sup > BLOWUP_LIMIT {
            return Err(Error::Blowup { t: (k + 1) as f64 * dt });
        }
    }

    let times: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
    let states_out: Vec<Vec<f64>> = states[off..].to_vec();
    Ok(Trajectory {
        times,
        states: states_out,
        dt,
        m: dm.m,
        history_tag: history_tag.to_string(),
    })
}

impl Trajectory {
    pub fn t_end(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    /// Time series of one node.
    pub fn node_series(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[i]).collect()
    }
}

/// Quantifies the trailing attractor: period from upward mean crossings of
/// the largest-amplitude node, convergence from the relative period drift
/// between the last two windows.
pub fn attractor_diagnostics(tr: &Trajectory, window: f64) -> Result<AttractorDiagnostics> {
    let t_end = tr.t_end();
    if t_end < 3.0 * window {
        return Err(Error::InvalidParams(format!(
            "trajectory of length {t_end} is shorter than 3 windows ({window} each)"
        )));
    }
    let n = tr.states[0].len();
    let in_window = |t: f64, lo: f64, hi: f64| t >= lo && t <= hi;

    // amplitude per node over the trailing window
    let lo2 = t_end - window;
    let mut amp = vec![(f64::INFINITY, f64::NEG_INFINITY); n];
    for (t, s) in tr.times.iter().zip(&tr.states) {
        if in_window(*t, lo2, t_end) {
            for i in 0..n {
                amp[i].0 = amp[i].0.min(s[i]);
                amp[i].1 = amp[i].1.max(s[i]);
            }
        }
    }
    let amplitude_profile: Vec<f64> = amp.iter().map(|(lo, hi)| 0.5 * (hi - lo)).collect();
    let node = amplitude_profile
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0);
    if amplitude_profile[node] < 1e-12 {
        return Err(Error::NoCycle);
    }

    let series = tr.node_series(node);
    let period_in = |lo: f64, hi: f64| -> Option<f64> {
        let idx: Vec<usize> = tr
            .times
            .iter()
            .enumerate()
            .filter(|(_, t)| in_window(**t, lo, hi))
            .map(|(i, _)| i)
            .collect();
        if idx.len() < 3 {
            return None;
        }
        let mean =
            idx.iter().map(|&i| series[i]).sum::<f64>() / idx.len() as f64;
        let mut crossings = Vec::new();
        for w in idx.windows(2) {
            let (i0, i1) = (w[0], w[1]);
            let (a, b) = (series[i0] - mean, series[i1] - mean);
            if a < 0.0 && b >= 0.0 {
                // linear interpolation of the upward crossing time
                let frac = a / (a - b);
                crossings.push(tr.times[i0] + frac * (tr.times[i1] - tr.times[i0]));
            }
        }
        if crossings.len() < 3 {
            return None;
        }
        let total = crossings.last().unwrap() - crossings.first().unwrap();
        Some(total / (crossings.len() - 1) as f64)
    };

    let p_last = period_in(t_end - window, t_end).ok_or(Error::NoCycle)?;
    let p_prev = period_in(t_end - 2.0 * window, t_end - window).ok_or(Error::NoCycle)?;
    let drift = (p_last - p_prev).abs() / p_last;
    Ok(AttractorDiagnostics {
        period: p_last,
        amplitude_profile,
        converged: drift < 0.01,
        node,
    })
}
