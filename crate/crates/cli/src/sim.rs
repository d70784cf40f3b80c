use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use clap::{Args, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;
use zerocurve::kdv::build_hierarchy;
use zerocurve::numlab::{
    bound_states, canonical_shift_residual, cocycle_residual, evolve_time, kdv_evolve_with,
    m_function_canonical, m_function_schrodinger, member_b_numeric, schrodinger_shift_residual,
    soliton, spectral_derivatives, suggested_steps, transfer_canonical, transfer_schrodinger,
    GridFunction, JetTrajectory, KdvRun, MFunctionSample, NumError, Scheme, TransferMatrix,
};

use crate::hierarchy::parse_constants;
use crate::inputs::{create, hamiltonian_params, parse_complex, potential_params, read_hamiltonian, read_potential};
use crate::report::{Report, RunConfig};
use crate::Settings;

#[derive(Subcommand, Debug)]
pub enum SimCommand {
    /// Evolve a potential under V_t = -1/4 V_xxx + 3/2 V V_x.
    Kdv(KdvArgs),
    /// Compare bound states before and after a KdV evolution.
    Isospec(IsospecArgs),
    /// Time cocycle of a hierarchy member's B.
    Cocycle(CocycleArgs),
    /// Weyl m-functions and their shift property.
    Mfun(MfunArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SchemeArg {
    IntegratingFactor,
    MethodOfLines,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::IntegratingFactor => Scheme::IntegratingFactor,
            SchemeArg::MethodOfLines => Scheme::MethodOfLines,
        }
    }
}

#[derive(Args, Debug)]
pub struct KdvArgs {
    /// Initial potential, CSV x,value; treated as one period.
    #[arg(long)]
    pub potential: PathBuf,
    #[arg(long)]
    pub t: f64,
    /// Time steps; defaults to half the stability limit.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, value_enum, default_value = "integrating-factor")]
    pub scheme: SchemeArg,
    /// Plot data as t,x,value rows.
    #[arg(long)]
    pub snapshots: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub snapshot_count: usize,
    /// Final state as x,value.
    #[arg(long)]
    pub final_out: Option<PathBuf>,
    /// Compare against the one-soliton -2b^2 sech^2(b(x - b^2 t)) with this b.
    #[arg(long)]
    pub soliton: Option<f64>,
}

#[derive(Args, Debug)]
pub struct IsospecArgs {
    #[arg(long)]
    pub potential: PathBuf,
    #[arg(long)]
    pub t: f64,
    /// Number of lowest bound states compared.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Args, Debug)]
pub struct CocycleArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub t1: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub t2: f64,
    /// Degree of the hierarchy member providing B.
    #[arg(long, default_value_t = 1)]
    pub member: usize,
    #[arg(long = "const", value_name = "NAME=VALUE")]
    pub constants: Vec<String>,
    /// Spectral parameter `re,im`.
    #[arg(long, default_value = "0.3,0.7", value_parser = parse_complex, allow_hyphen_values = true)]
    pub z: Complex64,
    /// Constant background value of V.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub v0: f64,
    /// Evaluate B along the KdV evolution of this potential instead (member 1 only).
    #[arg(long)]
    pub potential: Option<PathBuf>,
    /// Point at which B is sampled when --potential is given.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub max_step: f64,
}

#[derive(Args, Debug)]
pub struct MfunArgs {
    /// Schrödinger potential, CSV x,value.
    #[arg(long, conflicts_with = "hamiltonian", required_unless_present = "hamiltonian")]
    pub potential: Option<PathBuf>,
    /// Canonical-system Hamiltonian, CSV x,f,g,h.
    #[arg(long)]
    pub hamiltonian: Option<PathBuf>,
    /// Spectral parameter `re,im` with positive imaginary part.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub z: Complex64,
    /// Where the decaying solution is imposed; defaults to a quarter of the shorter half-window.
    #[arg(long)]
    pub cutoff: Option<f64>,
    /// Base point for the shift check.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub shift: f64,
}

fn write_snapshots(path: &Path, run: &KdvRun) -> Result<()> {
    let mut out = std::io::BufWriter::new(create(path)?);
    writeln!(out, "t,x,value")?;
    for (t, state) in &run.snapshots {
        for (i, v) in state.values.iter().enumerate() {
            writeln!(out, "{t},{},{v}", state.x(i))?;
        }
    }
    Ok(())
}

fn kdv(args: &KdvArgs, settings: &Settings) -> Result<Report> {
    let v0 = read_potential(&args.potential)?;
    let scheme: Scheme = args.scheme.into();
    let steps = args.steps.unwrap_or_else(|| suggested_steps(&v0, args.t, scheme));
    let mut config = RunConfig::new("sim kdv", settings.tolerances)
        .input("potential", args.potential.display())
        .param("t", args.t)
        .param("steps", steps)
        .param("scheme", scheme);
    if let Some(b) = args.soliton {
        config = config.param("soliton", b);
    }
    config.grid = Some(potential_params(&v0));
    config.output = settings.output.clone();
    let tol = settings.tolerances;
    let mut report = Report::new(config);

    let every = args.snapshots.as_ref().map(|_| (steps / args.snapshot_count.max(1)).max(1));
    let run = match kdv_evolve_with(&v0, args.t, steps, scheme, every) {
        Ok(run) => run,
        Err(e) => {
            report.fail(e);
            return Ok(report);
        }
    };
    if let Some(path) = &args.snapshots {
        write_snapshots(path, &run)?;
    }
    if let Some(path) = &args.final_out {
        run.final_state.write_csv(create(path)?)?;
    }
    report.result("dt", run.dt);
    report.result("mass_initial", run.mass_initial);
    report.result("mass_final", run.mass_final);
    report.result("max_change", run.final_state.sup_distance(&v0));
    let scale = run.mass_initial.abs().max(1.0);
    report.numeric("mass_drift", run.mass_drift() / scale, tol.mass);
    if let Some(b) = args.soliton {
        let exact = GridFunction::new(v0.x0, v0.dx, v0.xs().iter().map(|x| soliton(b, *x, args.t)).collect())?;
        report.numeric("soliton_profile", run.final_state.sup_distance(&exact), tol.soliton);
    }
    Ok(report)
}

fn isospec(args: &IsospecArgs, settings: &Settings) -> Result<Report> {
    let v0 = read_potential(&args.potential)?;
    let steps = args.steps.unwrap_or_else(|| suggested_steps(&v0, args.t, Scheme::IntegratingFactor));
    let mut config = RunConfig::new("sim isospec", settings.tolerances)
        .input("potential", args.potential.display())
        .param("t", args.t)
        .param("count", args.count)
        .param("steps", steps);
    config.grid = Some(potential_params(&v0));
    config.output = settings.output.clone();
    let mut report = Report::new(config);

    let outcome = (|| -> Result<_, NumError> {
        let before = bound_states(&v0, args.count)?;
        let evolved = kdv_evolve_with(&v0, args.t, steps, Scheme::IntegratingFactor, None)?;
        let after = bound_states(&evolved.final_state, args.count)?;
        Ok((before, after))
    })();
    let (before, after) = match outcome {
        Ok(pair) => pair,
        Err(e) => {
            report.fail(e);
            return Ok(report);
        }
    };
    report.result("before", &before);
    report.result("after", &after);
    if before.extrapolated.is_empty() {
        report.fail("the initial potential has no bound states below the continuum edge");
        return Ok(report);
    }
    if before.extrapolated.len() != after.extrapolated.len() {
        report.fail(format!(
            "bound-state count changed from {} to {}",
            before.extrapolated.len(),
            after.extrapolated.len()
        ));
        return Ok(report);
    }
    let drift = before
        .extrapolated
        .iter()
        .zip(&after.extrapolated)
        .map(|(a, b)| (a - b).abs() / a.abs().max(f64::MIN_POSITIVE))
        .fold(0.0_f64, f64::max);
    report.numeric("relative_drift", drift, settings.tolerances.isospectral);
    Ok(report)
}

fn matrix_json(t: &TransferMatrix) -> serde_json::Value {
    let c = |z: Complex64| json!([z.re, z.im]);
    json!([[c(t.m[0][0]), c(t.m[0][1])], [c(t.m[1][0]), c(t.m[1][1])]])
}

fn cocycle(args: &CocycleArgs, settings: &Settings) -> Result<Report> {
    let constants = parse_constants(&args.constants)?;
    if !(args.max_step > 0.0) {
        bail!("--max-step must be positive");
    }
    let member = build_hierarchy(args.member, &constants)?;
    let bm = member.b_matrix();
    let mut config = RunConfig::new("sim cocycle", settings.tolerances)
        .param("t1", args.t1)
        .param("t2", args.t2)
        .param("z", [args.z.re, args.z.im])
        .param("max_step", args.max_step);
    config.degree = Some(args.member);
    config.constants = constants.iter().map(|(k, v)| (k.clone(), v.to_string())).collect();
    config.output = settings.output.clone();
    let tol = settings.tolerances;
    let total = args.t1 + args.t2;

    let Some(path) = &args.potential else {
        let mut report = Report::new(config.param("v0", args.v0));
        // a constant background has all derivatives zero
        let mut jet = vec![0.0; 2 * args.member + 4];
        jet[0] = args.v0;
        let outcome = (|| -> Result<_, NumError> {
            let b = member_b_numeric(&bm, &jet, args.z)?;
            let residual = cocycle_residual(|_| Ok(b), args.t1, args.t2, args.max_step)?;
            let steps = zerocurve::numlab::ode::steps_for(total, args.max_step);
            let numeric = evolve_time(|_| Ok(b), total, steps)?;
            let exact = (b * total).exp_traceless();
            Ok((b, residual, numeric, exact))
        })();
        match outcome {
            Ok((b, residual, numeric, exact)) => {
                report.result("B", matrix_json(&b));
                report.result("T", matrix_json(&numeric));
                report.numeric("cocycle", residual, tol.cocycle);
                report.numeric("closed_form", numeric.distance(&exact), tol.closed_form);
                report.numeric("det", (numeric.det() - 1.0).norm(), tol.det);
            }
            Err(e) => report.fail(e),
        }
        return Ok(report);
    };

    if args.member != 1 || !constants.is_empty() {
        bail!("--potential drives B by the KdV equation, which is member 1 with default constants");
    }
    if args.t1 < 0.0 || args.t2 < 0.0 {
        bail!("--t1 and --t2 must be non-negative along a computed trajectory");
    }
    let v0 = read_potential(path)?;
    let index = v0
        .index_of(args.x)
        .ok_or_else(|| anyhow::anyhow!("x = {} is not a grid point of {}", args.x, path.display()))?;
    config = config.input("potential", path.display()).param("x", args.x);
    config.grid = Some(potential_params(&v0));
    let mut report = Report::new(config);

    let outcome = (|| -> Result<_, NumError> {
        let steps = suggested_steps(&v0, total, Scheme::IntegratingFactor);
        let run = kdv_evolve_with(&v0, total, steps, Scheme::IntegratingFactor, Some(1))?;
        let jets = run
            .snapshots
            .iter()
            .map(|(_, state)| {
                spectral_derivatives(&state.values, state.dx, 4)
                    .iter()
                    .map(|d| d[index])
                    .collect()
            })
            .collect();
        let trajectory = JetTrajectory { dt: run.dt, jets };
        let b = |s: f64| member_b_numeric(&bm, &trajectory.at(s)?, args.z);
        let residual = cocycle_residual(b, args.t1, args.t2, run.dt)?;
        let whole = evolve_time(b, total, steps)?;
        Ok((residual, whole, run.dt))
    })();
    match outcome {
        Ok((residual, whole, dt)) => {
            report.result("pde_dt", dt);
            report.result("T", matrix_json(&whole));
            report.numeric("cocycle", residual, tol.cocycle);
            report.numeric("det", (whole.det() - 1.0).norm(), tol.det);
        }
        Err(e) => report.fail(e),
    }
    Ok(report)
}

fn m_json(s: &MFunctionSample) -> serde_json::Value {
    json!({
        "m_plus": [s.m_plus.re, s.m_plus.im],
        "m_minus": [s.m_minus.re, s.m_minus.im],
        "cutoff": s.cutoff,
    })
}

fn mfun(args: &MfunArgs, settings: &Settings) -> Result<Report> {
    if args.z.im <= 0.0 {
        bail!("z must lie in the upper half plane");
    }
    let tol = settings.tolerances;
    let mut config = RunConfig::new("sim mfun", settings.tolerances)
        .param("z", [args.z.re, args.z.im])
        .param("shift", args.shift);
    config.output = settings.output.clone();

    let default_cutoff = |lo: f64, hi: f64| 0.25 * (-lo).min(hi);
    let outcome: Result<(MFunctionSample, f64, TransferMatrix), NumError>;
    let cutoff;
    if let Some(path) = &args.potential {
        let v = read_potential(path)?;
        cutoff = args.cutoff.unwrap_or_else(|| default_cutoff(v.x0, v.x_end()));
        config = config.input("potential", path.display());
        config.grid = Some(potential_params(&v));
        outcome = (|| {
            let sample = m_function_schrodinger(&v, args.z, cutoff, tol.m_shift)?;
            let shift = schrodinger_shift_residual(&v, args.z, args.shift, cutoff)?;
            Ok((sample, shift, transfer_schrodinger(&v, args.z, args.shift)?))
        })();
    } else {
        let path = args.hamiltonian.as_ref().expect("clap requires one input");
        let h = read_hamiltonian(path)?;
        cutoff = args.cutoff.unwrap_or_else(|| default_cutoff(h.x0, h.x_end()));
        config = config.input("hamiltonian", path.display());
        config.grid = Some(hamiltonian_params(&h));
        outcome = (|| {
            let sample = m_function_canonical(&h, args.z, cutoff, tol.m_shift)?;
            let shift = canonical_shift_residual(&h, args.z, args.shift, cutoff)?;
            Ok((sample, shift, transfer_canonical(&h, args.z, args.shift)?))
        })();
    }
    if !(cutoff > 0.0) {
        bail!("cutoff must be positive");
    }
    let mut report = Report::new(config.param("cutoff", cutoff));
    match outcome {
        Ok((sample, shift, t)) => {
            report.result("sample", m_json(&sample));
            let herglotz = sample.m_plus.im > 0.0 && sample.m_minus.im > 0.0;
            let signs: BTreeMap<&str, f64> =
                [("m_plus", sample.m_plus.im), ("m_minus", sample.m_minus.im)].into_iter().collect();
            report.exact("herglotz", signs, herglotz);
            report.numeric("cutoff_change", sample.cutoff_change, tol.m_shift);
            report.numeric("shift", shift, tol.m_shift);
            report.numeric("det", (t.det() - 1.0).norm(), tol.det);
        }
        Err(e) => report.fail(e),
    }
    Ok(report)
}

pub fn run(command: &SimCommand, settings: &Settings) -> Result<Report> {
    match command {
        SimCommand::Kdv(a) => kdv(a, settings),
        SimCommand::Isospec(a) => isospec(a, settings),
        SimCommand::Cocycle(a) => cocycle(a, settings),
        SimCommand::Mfun(a) => mfun(a, settings),
    }
}
