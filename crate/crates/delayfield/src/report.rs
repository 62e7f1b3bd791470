//! Plot-ready serialization: CSV for bulk numeric data (17 significant
//! digits, so re-runs are byte-identical) and JSON reports for structured
//! results.

use crate::discretize::Trajectory;
use crate::normalform::{DoubleHopfNF, HopfNF};
use crate::spectrum::ScanOutcome;
use crate::C64;
use serde::Serialize;

/// Fixed float formatting: 17 significant digits, scientific.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{:.16e}", x)
    }
}

/// Spectrum scan as CSV with columns
/// `re_lambda,im_lambda,status,reason,smin,residual`.
pub fn spectrum_csv(outcome: &ScanOutcome) -> String {
    let mut rows: Vec<(C64, &str, String, f64, Option<f64>)> = Vec::new();
    for e in &outcome.accepted {
        rows.push((e.lambda, "ACCEPTED", "ok".into(), e.smin, Some(e.residual)));
    }
    for r in &outcome.rejected {
        rows.push((r.lambda, "REJECTED", r.reason.clone(), r.smin, r.residual));
    }
    rows.sort_by(|a, b| {
        (a.0.im, a.0.re)
            .partial_cmp(&(b.0.im, b.0.re))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut out = String::from("re_lambda,im_lambda,status,reason,smin,residual\n");
    for (lambda, status, reason, smin, residual) in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_g17(lambda.re),
            fmt_g17(lambda.im),
            status,
            reason.replace(',', ";"),
            fmt_g17(smin),
            residual.map(fmt_g17).unwrap_or_default(),
        ));
    }
    out
}

/// Residual profile as CSV `x,re_residual,im_residual`.
pub fn residual_csv(xs: &[f64], residual: &[C64]) -> String {
    let mut out = String::from("x,re_residual,im_residual\n");
    for (x, r) in xs.iter().zip(residual) {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_g17(*x),
            fmt_g17(r.re),
            fmt_g17(r.im)
        ));
    }
    out
}

/// Trajectory as CSV `t,V0,...,Vm`, subsampled by `stride`.
pub fn trajectory_csv(tr: &Trajectory, stride: usize) -> String {
    let stride = stride.max(1);
    let n = tr.states.first().map_or(0, |s| s.len());
    let mut out = String::from("t");
    for i in 0..n {
        out.push_str(&format!(",V{i}"));
    }
    out.push('\n');
    for (k, (t, s)) in tr.times.iter().zip(&tr.states).enumerate() {
        if k % stride != 0 && k != tr.times.len() - 1 {
            continue;
        }
        out.push_str(&fmt_g17(*t));
        for v in s {
            out.push(',');
            out.push_str(&fmt_g17(*v));
        }
        out.push('\n');
    }
    out
}

/// Sidecar metadata of a trajectory run.
#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryMeta {
    pub m: usize,
    pub dt: f64,
    pub t_end: f64,
    pub history: String,
    pub samples_written: usize,
    pub stride: usize,
}

impl TrajectoryMeta {
    pub fn of(tr: &Trajectory, stride: usize) -> Self {
        let stride = stride.max(1);
        let total = tr.times.len();
        let samples_written = tr
            .times
            .iter()
            .enumerate()
            .filter(|(k, _)| k % stride == 0 || *k == total - 1)
            .count();
        TrajectoryMeta {
            m: tr.m,
            dt: tr.dt,
            t_end: tr.t_end(),
            history: tr.history_tag.clone(),
            samples_written,
            stride,
        }
    }
}

fn c64_pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// JSON-ready Hopf report.
#[derive(Debug, Clone, Serialize)]
pub struct HopfReport {
    pub omega0: f64,
    pub lambda: [f64; 2],
    pub gamma: Vec<[f64; 2]>,
    pub g21: [f64; 2],
    pub g21_abs: f64,
    pub l1: f64,
    pub verdict: String,
    pub contour_radius: f64,
    pub contour_nodes: usize,
    pub fit_residual: f64,
}

impl HopfReport {
    pub fn of(nf: &HopfNF) -> Self {
        HopfReport {
            omega0: nf.omega0,
            lambda: c64_pair(nf.crit.lambda),
            gamma: nf.crit.gamma.iter().map(|g| c64_pair(*g)).collect(),
            g21: c64_pair(nf.g21),
            g21_abs: nf.g21.norm(),
            l1: nf.l1,
            verdict: format!("{:?}", nf.verdict).to_uppercase(),
            contour_radius: nf.contour.radius,
            contour_nodes: nf.contour.nodes,
            fit_residual: nf.fit_residual,
        }
    }
}

/// JSON-ready double-Hopf report.
#[derive(Debug, Clone, Serialize)]
pub struct DoubleHopfReport {
    pub omega1: f64,
    pub omega2: f64,
    pub lambda1: [f64; 2],
    pub lambda2: [f64; 2],
    pub gamma1: Vec<[f64; 2]>,
    pub gamma2: Vec<[f64; 2]>,
    pub g2100: [f64; 2],
    pub g1011: [f64; 2],
    pub g1110: [f64; 2],
    pub g0021: [f64; 2],
    pub p_matrix: [[f64; 2]; 2],
    pub theta: f64,
    pub delta: f64,
    pub kind: String,
    pub subtype: String,
    pub normalization: String,
    pub note: String,
    pub fit_residuals: [f64; 4],
}

impl DoubleHopfReport {
    pub fn of(nf: &DoubleHopfNF) -> Self {
        DoubleHopfReport {
            omega1: nf.omega1,
            omega2: nf.omega2,
            lambda1: c64_pair(nf.crit1.lambda),
            lambda2: c64_pair(nf.crit2.lambda),
            gamma1: nf.crit1.gamma.iter().map(|g| c64_pair(*g)).collect(),
            gamma2: nf.crit2.gamma.iter().map(|g| c64_pair(*g)).collect(),
            g2100: c64_pair(nf.g2100),
            g1011: c64_pair(nf.g1011),
            g1110: c64_pair(nf.g1110),
            g0021: c64_pair(nf.g0021),
            p_matrix: nf.p_matrix,
            theta: nf.theta,
            delta: nf.delta,
            kind: format!("{:?}", nf.kind).to_uppercase(),
            subtype: match nf.subtype {
                crate::normalform::DoubleHopfSubtype::TypeI => "I".to_string(),
                crate::normalform::DoubleHopfSubtype::Other => "other".to_string(),
            },
            normalization: nf.normalization.clone(),
            note: nf.note.clone(),
            fit_residuals: nf.fit_residuals,
        }
    }
}
