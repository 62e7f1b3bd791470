//! Command-line front-end: spectrum scans, eigenfunctions, resolvent checks,
//! Hopf / double-Hopf normal forms, forward simulation of the discretized
//! field and its spectrum — with reproducible config echoes and plot-ready
//! CSV/JSON outputs.

use clap::{Args, Parser, Subcommand};
use delayfield::discretize::{self, DiscreteModel};
use delayfield::model::DEFAULT_GRID_NODES;
use delayfield::normalform;
use delayfield::report;
use delayfield::resolvent;
use delayfield::spectrum::{self, EigenData, Region, ScanOptions, ScanOutcome};
use delayfield::{C64, Error, ModelParams, SpatialGrid};
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_PRECONDITION: u8 = 4;

#[derive(Parser)]
#[command(
    name = "delayfield",
    about = "Spectra, resolvents and critical normal forms of a delayed neural field",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Model configuration (JSON with keys alpha, tau0, r, terms)
    #[arg(long)]
    config: PathBuf,
    /// Output directory for reports and data files
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Newton tolerance
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Number of spatial grid nodes
    #[arg(long, default_value_t = DEFAULT_GRID_NODES)]
    grid: usize,
    /// Override the activation steepness r
    #[arg(long)]
    r: Option<f64>,
    /// Override alpha
    #[arg(long)]
    alpha: Option<f64>,
    /// Override tau0
    #[arg(long)]
    tau0: Option<f64>,
    /// Override mu of kernel term 1 (real part)
    #[arg(long)]
    mu1: Option<f64>,
    /// Override mu of kernel term 2 (real part)
    #[arg(long)]
    mu2: Option<f64>,
    /// Override c_hat of kernel term 1 (real part)
    #[arg(long)]
    c1: Option<f64>,
    /// Override c_hat of kernel term 2 (real part)
    #[arg(long)]
    c2: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Scan a region of the complex plane for point spectrum
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Region re_min,re_max,im_min,im_max
        #[arg(long, default_value = "-2.0,0.5,-8.0,8.0", allow_hyphen_values = true)]
        region: String,
        /// Seed grid nx,ny
        #[arg(long, default_value = "40,40")]
        seeds: String,
    },
    /// Reconstruct the eigenfunction at a given eigenvalue
    Eigfun {
        #[command(flatten)]
        common: Common,
        /// Eigenvalue as re,im
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// Solve the resolvent equation and emit the residual profile
    ResolventCheck {
        #[command(flatten)]
        common: Common,
        /// Resolvent point as re,im
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Right-hand side, currently const:<value>
        #[arg(long, default_value = "const:1.0")]
        h: String,
    },
    /// Hopf critical normal form at the imaginary-axis pair
    Hopf {
        #[command(flatten)]
        common: Common,
        /// Region to locate the critical pair in (upper half plane)
        #[arg(long, default_value = "-1.0,0.5,0.05,8.0", allow_hyphen_values = true)]
        region: String,
        /// Inject eigenvector coefficients "re,im;re,im" (N terms: symmetric
        /// mode; 2N terms: full vector) instead of the computed null vector
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<String>,
    },
    /// Double-Hopf critical normal form at two imaginary-axis pairs
    DoubleHopf {
        #[command(flatten)]
        common: Common,
        /// Region to locate the two critical pairs in (upper half plane)
        #[arg(long, default_value = "-1.0,0.5,0.05,8.0", allow_hyphen_values = true)]
        region: String,
        /// Calibrate the p matrix to reference diagonal entries "p11,p22"
        #[arg(long, allow_hyphen_values = true)]
        calibrate_p: Option<String>,
    },
    /// Integrate the discretized field forward in time
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Mesh intervals (even)
        #[arg(long, default_value_t = 50)]
        m: usize,
        /// Time step divisor: dt = delta / dt_div
        #[arg(long, default_value_t = 4)]
        dt_div: usize,
        /// Final time
        #[arg(long, default_value_t = 400.0)]
        t_end: f64,
        /// Initial history: const:<eps>, linear:<eps> or file:<path>
        #[arg(long, default_value = "const:0.01")]
        history: String,
        /// Attractor diagnostics window
        #[arg(long, default_value_t = 50.0)]
        window: f64,
        /// CSV subsampling stride
        #[arg(long, default_value_t = 10)]
        stride: usize,
    },
    /// Spectrum of the discretized system via Newton on its determinant
    DiscreteSpectrum {
        #[command(flatten)]
        common: Common,
        /// Mesh intervals (even)
        #[arg(long, default_value_t = 50)]
        m: usize,
        /// Region re_min,re_max,im_min,im_max
        #[arg(long, default_value = "-2.0,0.5,-8.0,8.0", allow_hyphen_values = true)]
        region: String,
        /// Seed grid nx,ny
        #[arg(long, default_value = "20,20")]
        seeds: String,
    },
}

enum CliError {
    Config(String),
    Numerical(String),
    Precondition(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(_) | Error::UnsupportedDerivative(_) => {
                CliError::Config(e.to_string())
            }
            ref err if err.is_precondition() => CliError::Precondition(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("io error: {e}"))
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Spectrum { common, region, seeds } => cmd_spectrum(common, region, seeds),
        Command::Eigfun { common, lambda } => cmd_eigfun(common, lambda),
        Command::ResolventCheck { common, z, h } => cmd_resolvent_check(common, z, h),
        Command::Hopf { common, region, gamma } => cmd_hopf(common, region, gamma),
        Command::DoubleHopf { common, region, calibrate_p } => {
            cmd_double_hopf(common, region, calibrate_p)
        }
        Command::Simulate { common, m, dt_div, t_end, history, window, stride } => {
            cmd_simulate(common, m, dt_div, t_end, history, window, stride)
        }
        Command::DiscreteSpectrum { common, m, region, seeds } => {
            cmd_discrete_spectrum(common, m, region, seeds)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(EXIT_NUMERICAL)
        }
        Err(CliError::Precondition(msg)) => {
            eprintln!("precondition rejected: {msg}");
            ExitCode::from(EXIT_PRECONDITION)
        }
    }
}

#[derive(Serialize)]
struct ConfigEcho {
    command: String,
    model: ModelParams,
    tol: f64,
    grid_nodes: usize,
    extra: serde_json::Value,
}

struct Setup {
    params: ModelParams,
    grid: SpatialGrid,
    out: PathBuf,
    tol: f64,
}

fn setup(common: &Common, command: &str, extra: serde_json::Value) -> CliResult<Setup> {
    let doc = fs::read_to_string(&common.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", common.config.display())))?;
    let mut params = ModelParams::from_json(&doc).map_err(|e| CliError::Config(e.to_string()))?;
    if let Some(r) = common.r {
        params = params.with_r(r)?;
    }
    if let Some(alpha) = common.alpha {
        params = params.with_alpha_tau0(alpha, params.tau0())?;
    }
    if let Some(tau0) = common.tau0 {
        params = params.with_alpha_tau0(params.alpha(), tau0)?;
    }
    if let Some(mu1) = common.mu1 {
        params = params.with_mu(0, C64::new(mu1, 0.0))?;
    }
    if let Some(mu2) = common.mu2 {
        params = params.with_mu(1, C64::new(mu2, 0.0))?;
    }
    if let Some(c1) = common.c1 {
        params = params.with_c_hat(0, C64::new(c1, 0.0))?;
    }
    if let Some(c2) = common.c2 {
        params = params.with_c_hat(1, C64::new(c2, 0.0))?;
    }
    if common.tol <= 0.0 {
        return Err(CliError::Config("tol must be positive".into()));
    }
    let grid = SpatialGrid::equidistant(common.grid).map_err(|e| CliError::Config(e.to_string()))?;
    fs::create_dir_all(&common.out)?;
    let echo = ConfigEcho {
        command: command.to_string(),
        model: params.clone(),
        tol: common.tol,
        grid_nodes: common.grid,
        extra,
    };
    write_json(&common.out.join("config_echo.json"), &echo)?;
    Ok(Setup { params, grid, out: common.out.clone(), tol: common.tol })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let body = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("serialization: {e}")))?;
    fs::write(path, body + "\n")?;
    Ok(())
}

fn parse_region(s: &str) -> CliResult<Region> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Config(format!("region parse: {e}")))?;
    if parts.len() != 4 || parts[0] >= parts[1] || parts[2] >= parts[3] {
        return Err(CliError::Config(
            "region must be re_min,re_max,im_min,im_max with min < max".into(),
        ));
    }
    Ok(Region::new(parts[0], parts[1], parts[2], parts[3]))
}

fn parse_pair(s: &str, what: &str) -> CliResult<(f64, f64)> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Config(format!("{what} parse: {e}")))?;
    if parts.len() != 2 {
        return Err(CliError::Config(format!("{what} must have two comma-separated values")));
    }
    Ok((parts[0], parts[1]))
}

fn parse_seeds(s: &str) -> CliResult<(usize, usize)> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Config(format!("seeds parse: {e}")))?;
    if parts.len() != 2 || parts[0] == 0 || parts[1] == 0 {
        return Err(CliError::Config("seeds must be nx,ny with both positive".into()));
    }
    Ok((parts[0], parts[1]))
}

fn parse_complex(s: &str, what: &str) -> CliResult<C64> {
    let (re, im) = parse_pair(s, what)?;
    Ok(C64::new(re, im))
}

#[derive(Serialize)]
struct SpectrumSummary {
    accepted: usize,
    rejected: usize,
    accepted_lambdas: Vec<[f64; 2]>,
}

fn run_scan(setup: &Setup, region: Region, seeds: (usize, usize)) -> ScanOutcome {
    let opts = ScanOptions { newton_tol: setup.tol, ..ScanOptions::default() };
    spectrum::spectrum_scan(region, seeds, &setup.params, &setup.grid, &opts)
}

fn cmd_spectrum(common: Common, region: String, seeds: String) -> CliResult<()> {
    let region = parse_region(&region)?;
    let seeds = parse_seeds(&seeds)?;
    let setup = setup(
        &common,
        "spectrum",
        serde_json::json!({"region": format!("{region:?}"), "seeds": seeds}),
    )?;
    let outcome = run_scan(&setup, region, seeds);
    fs::write(setup.out.join("spectrum.csv"), report::spectrum_csv(&outcome))?;
    let summary = SpectrumSummary {
        accepted: outcome.accepted.len(),
        rejected: outcome.rejected.len(),
        accepted_lambdas: outcome
            .accepted
            .iter()
            .map(|e| [e.lambda.re, e.lambda.im])
            .collect(),
    };
    write_json(&setup.out.join("spectrum_summary.json"), &summary)?;
    println!(
        "spectrum: {} accepted, {} rejected -> {}",
        summary.accepted,
        summary.rejected,
        setup.out.join("spectrum.csv").display()
    );
    Ok(())
}

fn cmd_eigfun(common: Common, lambda: String) -> CliResult<()> {
    let lambda = parse_complex(&lambda, "lambda")?;
    let setup = setup(
        &common,
        "eigfun",
        serde_json::json!({"lambda": [lambda.re, lambda.im]}),
    )?;
    let lam = spectrum::newton_solve(lambda, &setup.params, setup.tol, 50)?;
    let e = spectrum::eigen_data(lam, &setup.params, &setup.grid)?;
    let mut csv = String::from("x,re_q,im_q,abs_q,arg_q\n");
    for (x, q) in setup.grid.nodes().iter().zip(&e.qsamples) {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            report::fmt_g17(*x),
            report::fmt_g17(q.re),
            report::fmt_g17(q.im),
            report::fmt_g17(q.norm()),
            report::fmt_g17(q.arg()),
        ));
    }
    fs::write(setup.out.join("eigfun.csv"), csv)?;
    write_json(
        &setup.out.join("eigfun.json"),
        &serde_json::json!({
            "lambda": [e.lambda.re, e.lambda.im],
            "gamma": e.gamma.iter().map(|g| [g.re, g.im]).collect::<Vec<_>>(),
            "smin": e.smin,
            "residual": e.residual,
        }),
    )?;
    println!(
        "eigfun: lambda = {} + {}i, residual {:.3e}",
        e.lambda.re, e.lambda.im, e.residual
    );
    Ok(())
}

fn cmd_resolvent_check(common: Common, z: String, h: String) -> CliResult<()> {
    let z = parse_complex(&z, "z")?;
    let setup = setup(
        &common,
        "resolvent-check",
        serde_json::json!({"z": [z.re, z.im], "h": h}),
    )?;
    let h_vals: Vec<C64> = match h.split_once(':') {
        Some(("const", v)) => {
            let v: f64 = v
                .parse()
                .map_err(|e| CliError::Config(format!("h value parse: {e}")))?;
            vec![C64::new(v, 0.0); setup.grid.len()]
        }
        _ => return Err(CliError::Config("h must be const:<value>".into())),
    };
    let sol = resolvent::resolve(z, &h_vals, &setup.params, &setup.grid)?;
    let res = resolvent::residual_profile(z, &sol.qsamples, &h_vals, &setup.grid, &setup.params);
    fs::write(
        setup.out.join("resolvent_residual.csv"),
        report::residual_csv(setup.grid.nodes(), &res),
    )?;
    let sup = res.iter().map(|v| v.norm()).fold(0.0_f64, f64::max);
    write_json(
        &setup.out.join("resolvent_summary.json"),
        &serde_json::json!({
            "z": [z.re, z.im],
            "residual_sup": sup,
            "q_sup": sol.qsamples.iter().map(|v| v.norm()).fold(0.0_f64, f64::max),
        }),
    )?;
    println!("resolvent-check: sup residual {sup:.3e}");
    Ok(())
}

fn axis_pairs(outcome: &ScanOutcome) -> Vec<&EigenData> {
    let mut pairs: Vec<&EigenData> = outcome
        .accepted
        .iter()
        .filter(|e| e.lambda.re.abs() < 1e-6 && e.lambda.im > 0.0)
        .collect();
    pairs.sort_by(|a, b| b.lambda.im.partial_cmp(&a.lambda.im).unwrap());
    pairs
}

fn parse_gamma(s: &str, n: usize) -> CliResult<Vec<C64>> {
    let parts: Vec<C64> = s
        .split(';')
        .map(|p| parse_complex(p, "gamma entry"))
        .collect::<CliResult<_>>()?;
    if parts.len() == n {
        let mut full = parts.clone();
        full.extend(parts); // symmetric mode gamma_i = gamma_{-i}
        Ok(full)
    } else if parts.len() == 2 * n {
        Ok(parts)
    } else {
        Err(CliError::Config(format!(
            "gamma must list {n} (symmetric) or {} entries",
            2 * n
        )))
    }
}

fn cmd_hopf(common: Common, region: String, gamma: Option<String>) -> CliResult<()> {
    let region = parse_region(&region)?;
    let setup = setup(
        &common,
        "hopf",
        serde_json::json!({"region": format!("{region:?}"), "gamma": gamma}),
    )?;
    let outcome = run_scan(&setup, region, (30, 30));
    let pairs = axis_pairs(&outcome);
    if pairs.len() != 1 {
        return Err(CliError::Precondition(format!(
            "expected exactly one critical pair on the imaginary axis, found {}",
            pairs.len()
        )));
    }
    let mut crit = pairs[0].clone();
    if let Some(g) = &gamma {
        let gamma = parse_gamma(g, setup.params.n_terms())?;
        crit = crit.with_gamma(gamma, &setup.grid);
    }
    // every other det root (accepted or rejected) constrains the contour
    let others: Vec<C64> = outcome
        .accepted
        .iter()
        .map(|e| e.lambda)
        .chain(outcome.rejected.iter().map(|r| r.lambda))
        .filter(|l| (l - crit.lambda).norm() > 1e-6)
        .collect();
    let contour = normalform::default_contour(crit.lambda, &setup.params, &others)?;
    let nf = normalform::hopf_g21(&crit, &setup.params, &contour, &setup.grid)?;
    write_json(&setup.out.join("hopf.json"), &report::HopfReport::of(&nf))?;
    println!(
        "{}, l1 = {:.6}, g21 = {:.6} + {:.6}i (omega0 = {:.12})",
        match nf.verdict {
            normalform::HopfKind::Supercritical => "SUPERCRITICAL",
            normalform::HopfKind::Subcritical => "SUBCRITICAL",
        },
        nf.l1,
        nf.g21.re,
        nf.g21.im,
        nf.omega0
    );
    Ok(())
}

#[derive(Serialize)]
struct CalibratedP {
    reference_p11: f64,
    reference_p22: f64,
    scale_factors: (f64, f64),
    p_matrix: [[f64; 2]; 2],
}

fn cmd_double_hopf(common: Common, region: String, calibrate_p: Option<String>) -> CliResult<()> {
    let region = parse_region(&region)?;
    let setup = setup(
        &common,
        "double-hopf",
        serde_json::json!({"region": format!("{region:?}"), "calibrate_p": calibrate_p}),
    )?;
    let outcome = run_scan(&setup, region, (30, 30));
    let pairs = axis_pairs(&outcome);
    if pairs.len() != 2 {
        return Err(CliError::Precondition(format!(
            "expected exactly two critical pairs on the imaginary axis, found {}",
            pairs.len()
        )));
    }
    let (crit1, crit2) = (pairs[0], pairs[1]); // sorted by Im descending
    let others: Vec<C64> = outcome
        .accepted
        .iter()
        .map(|e| e.lambda)
        .chain(outcome.rejected.iter().map(|r| r.lambda))
        .collect();
    let not_self = |center: C64| -> Vec<C64> {
        others
            .iter()
            .copied()
            .filter(|l| (l - center).norm() > 1e-6)
            .collect()
    };
    let contour1 =
        normalform::default_contour(crit1.lambda, &setup.params, &not_self(crit1.lambda))?;
    let contour2 =
        normalform::default_contour(crit2.lambda, &setup.params, &not_self(crit2.lambda))?;
    let nf = normalform::doublehopf_coeffs(
        crit1,
        crit2,
        &setup.params,
        (&contour1, &contour2),
        &setup.grid,
    )?;
    let mut doc = serde_json::to_value(report::DoubleHopfReport::of(&nf))
        .map_err(|e| CliError::Config(format!("serialization: {e}")))?;
    if let Some(cal) = &calibrate_p {
        let (p11, p22) = parse_pair(cal, "calibrate-p")?;
        let (p_cal, scales) = nf.calibrate_p(p11, p22);
        doc["calibrated_p"] = serde_json::to_value(CalibratedP {
            reference_p11: p11,
            reference_p22: p22,
            scale_factors: scales,
            p_matrix: p_cal,
        })
        .map_err(|e| CliError::Config(format!("serialization: {e}")))?;
    }
    write_json(&setup.out.join("double_hopf.json"), &doc)?;
    println!(
        "{:?} double Hopf, sub-type {}: theta = {:.4}, delta = {:.4}, p11 = {:.4}, p22 = {:.4}",
        nf.kind,
        match nf.subtype {
            normalform::DoubleHopfSubtype::TypeI => "I",
            normalform::DoubleHopfSubtype::Other => "other",
        },
        nf.theta,
        nf.delta,
        nf.p_matrix[0][0],
        nf.p_matrix[1][1]
    );
    Ok(())
}

fn parse_history(
    s: &str,
    dm: &DiscreteModel,
) -> CliResult<(Box<dyn Fn(f64, f64) -> f64>, String)> {
    match s.split_once(':') {
        Some(("const", v)) => {
            let eps: f64 = v
                .parse()
                .map_err(|e| CliError::Config(format!("history eps parse: {e}")))?;
            Ok((Box::new(move |_, _| eps), format!("const:{eps}")))
        }
        Some(("linear", v)) => {
            let eps: f64 = v
                .parse()
                .map_err(|e| CliError::Config(format!("history eps parse: {e}")))?;
            Ok((Box::new(move |_, x| eps * x), format!("linear:{eps}")))
        }
        Some(("file", path)) => {
            let body = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read history {path}: {e}")))?;
            let vals: Vec<f64> = serde_json::from_str(&body)
                .map_err(|e| CliError::Config(format!("history file parse: {e}")))?;
            if vals.len() != dm.m() + 1 {
                return Err(CliError::Config(format!(
                    "history file must list {} node values",
                    dm.m() + 1
                )));
            }
            let delta = dm.delta();
            let tag = format!("file:{path}");
            Ok((
                Box::new(move |_, x| {
                    let idx = ((x + 1.0) / delta).round() as usize;
                    vals[idx.min(vals.len() - 1)]
                }),
                tag,
            ))
        }
        _ => Err(CliError::Config(
            "history must be const:<eps>, linear:<eps> or file:<path>".into(),
        )),
    }
}

fn cmd_simulate(
    common: Common,
    m: usize,
    dt_div: usize,
    t_end: f64,
    history: String,
    window: f64,
    stride: usize,
) -> CliResult<()> {
    let setup = setup(
        &common,
        "simulate",
        serde_json::json!({
            "m": m, "dt_div": dt_div, "t_end": t_end,
            "history": history, "window": window, "stride": stride
        }),
    )?;
    if dt_div == 0 {
        return Err(CliError::Config("dt-div must be positive".into()));
    }
    let dm = DiscreteModel::build(m, &setup.params)?;
    let (hist, tag) = parse_history(&history, &dm)?;
    let dt = dm.delta() / dt_div as f64;
    let tr = discretize::simulate_tagged(&dm, hist.as_ref(), t_end, dt, &tag)?;
    fs::write(setup.out.join("trajectory.csv"), report::trajectory_csv(&tr, stride))?;
    write_json(
        &setup.out.join("trajectory_meta.json"),
        &report::TrajectoryMeta::of(&tr, stride),
    )?;
    match discretize::attractor_diagnostics(&tr, window) {
        Ok(diag) => {
            write_json(
                &setup.out.join("sim_summary.json"),
                &serde_json::json!({
                    "period": diag.period,
                    "converged": diag.converged,
                    "node": diag.node,
                    "amplitude_max": diag.amplitude_profile.iter().cloned().fold(0.0_f64, f64::max),
                }),
            )?;
            println!(
                "simulate: converged = {}, period = {:.4} (node {})",
                diag.converged, diag.period, diag.node
            );
        }
        Err(Error::NoCycle) => {
            write_json(
                &setup.out.join("sim_summary.json"),
                &serde_json::json!({"period": null, "converged": false}),
            )?;
            println!("simulate: no sustained oscillation detected");
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn cmd_discrete_spectrum(common: Common, m: usize, region: String, seeds: String) -> CliResult<()> {
    let region = parse_region(&region)?;
    let (nx, ny) = parse_seeds(&seeds)?;
    let setup = setup(
        &common,
        "discrete-spectrum",
        serde_json::json!({"m": m, "region": format!("{region:?}"), "seeds": [nx, ny]}),
    )?;
    let dm = DiscreteModel::build(m, &setup.params)?;
    let mut seed_pts = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            seed_pts.push(C64::new(
                region.re_min + (region.re_max - region.re_min) * (i as f64 + 0.5) / nx as f64,
                region.im_min + (region.im_max - region.im_min) * (j as f64 + 0.5) / ny as f64,
            ));
        }
    }
    let roots = dm.spectrum_scan(region, &seed_pts, setup.tol);
    let mut csv = String::from("re_lambda,im_lambda\n");
    for r in &roots {
        csv.push_str(&format!(
            "{},{}\n",
            report::fmt_g17(r.re),
            report::fmt_g17(r.im)
        ));
    }
    fs::write(setup.out.join("discrete_spectrum.csv"), csv)?;
    println!("discrete-spectrum: {} roots (m = {m})", roots.len());
    Ok(())
}
