use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use serde::Deserialize;
use serde_json::json;
use zerocurve::canonical::{
    consistency_coefficient, consistency_residual, cs_three_residuals, det3, kernel_contraction,
    obstruction_check, row_times, schrodinger_to_hamiltonian, CanonicalError, CsBMatrix,
    SymbolicHamiltonian,
};
use zerocurve::diffpoly::{DiffPoly, FlowRule, Symbol, SymbolTable, ZDiffPoly};

use crate::inputs::{create, hamiltonian_params, potential_params, read_hamiltonian, read_potential};
use crate::report::{Report, RunConfig};
use crate::Settings;

#[derive(Subcommand, Debug)]
pub enum CsCommand {
    /// Symbolic three-equation and consistency residuals for a user-supplied B.
    Check(CheckArgs),
    /// Necessary condition K = Δ^(-1/2) on a sampled Hamiltonian.
    Obstruct(ObstructArgs),
    /// Hamiltonian of a Schrödinger potential from its zero-energy solutions.
    Convert(ConvertArgs),
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// JSON file with the entries of B (see the guide for the format).
    #[arg(long)]
    pub b: PathBuf,
    /// `zero`, `generic`, or a JSON file mapping field names to their time derivatives.
    #[arg(long, default_value = "zero")]
    pub flow: String,
}

#[derive(Args, Debug)]
pub struct ObstructArgs {
    /// CSV with columns x,f,g,h.
    #[arg(long)]
    pub grid: PathBuf,
    /// Degree of the hypothetical flow.
    #[arg(long)]
    pub n: usize,
    /// Overrides the configured obstruction tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug)]
pub struct ConvertArgs {
    /// CSV with columns x,value; x = 0 must be a grid point.
    #[arg(long)]
    pub potential: PathBuf,
    /// Writes the Hamiltonian as x,f,g,h.
    #[arg(long)]
    pub hamiltonian_out: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Coefficients {
    List(Vec<String>),
    Map(BTreeMap<usize, String>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HamiltonianSpec {
    f: String,
    g: String,
    h: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BSpec {
    #[serde(rename = "A", default)]
    a: Option<Coefficients>,
    #[serde(rename = "C", default)]
    c: Option<Coefficients>,
    #[serde(rename = "D", default)]
    d: Option<Coefficients>,
    #[serde(default)]
    hamiltonian: Option<HamiltonianSpec>,
    #[serde(default)]
    constants: Vec<String>,
}

fn parse_entry(entry: Option<&Coefficients>, table: &mut SymbolTable) -> Result<ZDiffPoly> {
    let pairs: Vec<(usize, &String)> = match entry {
        None => Vec::new(),
        Some(Coefficients::List(list)) => list.iter().enumerate().collect(),
        Some(Coefficients::Map(map)) => map.iter().map(|(k, v)| (*k, v)).collect(),
    };
    let degree = pairs.iter().map(|(k, _)| *k).max().unwrap_or(0);
    let mut coeffs = vec![DiffPoly::zero(); degree + 1];
    for (k, text) in pairs {
        coeffs[k] = DiffPoly::parse_with(text, table).with_context(|| format!("coefficient of z^{k}: `{text}`"))?;
    }
    Ok(ZDiffPoly::from_coeffs(coeffs))
}

fn parse_b(path: &Path) -> Result<(CsBMatrix, SymbolicHamiltonian, SymbolTable)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed: BSpec = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let mut table = SymbolTable::with_constants(parsed.constants.iter().map(String::as_str));
    let b = CsBMatrix::new(
        parse_entry(parsed.a.as_ref(), &mut table)?,
        parse_entry(parsed.c.as_ref(), &mut table)?,
        parse_entry(parsed.d.as_ref(), &mut table)?,
    );
    let ham = match parsed.hamiltonian {
        None => SymbolicHamiltonian::generic(),
        Some(h) => SymbolicHamiltonian::new(
            DiffPoly::parse_with(&h.f, &mut table).context("hamiltonian f")?,
            DiffPoly::parse_with(&h.g, &mut table).context("hamiltonian g")?,
            DiffPoly::parse_with(&h.h, &mut table).context("hamiltonian h")?,
        ),
    };
    Ok((b, ham, table))
}

fn parse_flow(arg: &str, ham: &SymbolicHamiltonian, table: &mut SymbolTable) -> Result<FlowRule> {
    let fields = || {
        let mut all = ham.f.field_symbols();
        all.extend(ham.g.field_symbols());
        all.extend(ham.h.field_symbols());
        all
    };
    match arg {
        "zero" => Ok(FlowRule::zero(fields().iter())),
        "generic" => {
            let mut flow = FlowRule::new();
            for s in fields() {
                flow = flow.assign(&s, DiffPoly::symbol(&Symbol::field(&format!("{}t", s.name()))));
            }
            Ok(flow)
        }
        path => {
            let text = fs::read_to_string(path).with_context(|| format!("reading flow file {path}"))?;
            let map: BTreeMap<String, String> =
                serde_json::from_str(&text).with_context(|| format!("parsing flow file {path}"))?;
            let mut flow = FlowRule::new();
            for (field, rhs) in map {
                let symbol = table.resolve(&field);
                if symbol.is_constant() {
                    bail!("`{field}` is declared constant and cannot evolve");
                }
                let rhs = DiffPoly::parse_with(&rhs, table).with_context(|| format!("time derivative of {field}"))?;
                flow = flow.assign(&symbol, rhs);
            }
            Ok(flow)
        }
    }
}

fn texts<const N: usize>(items: &[DiffPoly; N]) -> Vec<String> {
    items.iter().map(ToString::to_string).collect()
}

fn check(args: &CheckArgs, settings: &Settings) -> Result<Report> {
    let (b, ham, mut table) = parse_b(&args.b)?;
    let flow = parse_flow(&args.flow, &ham, &mut table)?;
    let config = RunConfig::new("cs check", settings.tolerances)
        .input("b", args.b.display())
        .input("flow", &args.flow);
    let mut report = Report::new(RunConfig { degree: b.degree(), output: settings.output.clone(), ..config });

    let residuals = cs_three_residuals(&b, &ham, &flow)?;
    let consistency = consistency_residual(&b, &ham, &flow)?;
    let contraction = kernel_contraction(&b, &ham, &flow)?;
    let matrix = ham.coefficient_matrix();
    let det = det3(&matrix);
    let annihilated = row_times(&ham.left_kernel(), &matrix);

    report.result("delta", ham.delta().to_string());
    report.result("coefficient_matrix", matrix.iter().map(texts).collect::<Vec<_>>());
    report.result("left_kernel", texts(&ham.left_kernel()));
    report.result("trace", b.trace().to_text_map());
    let per_coefficient: BTreeMap<usize, String> = (2..=b.degree().unwrap_or(0))
        .map(|k| (k, consistency_coefficient(&b, &ham, k).to_string()))
        .collect();
    report.result("consistency_coefficients", per_coefficient);

    report.exact(
        "three_equations",
        residuals.iter().map(ZDiffPoly::to_text_map).collect::<Vec<_>>(),
        residuals.iter().all(ZDiffPoly::is_zero),
    );
    report.exact("consistency", consistency.to_text_map(), consistency.is_zero());
    let gap = &contraction - &consistency;
    report.exact("kernel_contraction_identity", gap.to_text_map(), gap.is_zero());
    report.exact("coefficient_determinant", det.to_string(), det.is_zero());
    report.exact("left_kernel_product", texts(&annihilated), annihilated.iter().all(DiffPoly::is_zero));
    Ok(report)
}

fn obstruct(args: &ObstructArgs, settings: &Settings) -> Result<Report> {
    let grid = read_hamiltonian(&args.grid)?;
    let tol = args.tol.unwrap_or(settings.tolerances.obstruction);
    if !(tol.is_finite() && tol > 0.0) {
        bail!("--tol must be positive");
    }
    let mut config = RunConfig::new("cs obstruct", settings.tolerances).input("grid", args.grid.display());
    config.degree = Some(args.n);
    config.grid = Some(hamiltonian_params(&grid));
    config.output = settings.output.clone();
    config.tolerances.obstruction = tol;
    let mut report = Report::new(config);
    match obstruction_check(&grid, args.n, tol) {
        Ok(o) => {
            report.result("degree", o.degree);
            report.result("forced_top", o.forced_top);
            report.result("K_profile", &o.k_profile);
            report.result("max_residual", o.max_residual);
            report.result("degenerate_points", &o.degenerate_points);
            report.result("verdict", &o.verdict);
            report.result("consistent", o.consistent);
            report.exact("symbolic_forcing", if o.symbolic_ok { "0" } else { "nonzero" }, o.symbolic_ok);
            report.numeric("k_equation", o.max_residual, tol);
        }
        Err(CanonicalError::DegenerateDeterminant { indices }) => {
            report.result("degree", args.n);
            report.result("degenerate_points", &indices);
            report.result("verdict", "degenerate: f h - g^2 <= 0 at the listed grid points");
            report.result("consistent", false);
            report.fail(format!("determinant not positive at {} grid points", indices.len()));
        }
        Err(e @ CanonicalError::DegreeTooLow(_)) => bail!(e),
        Err(e) => report.fail(e),
    }
    Ok(report)
}

fn convert(args: &ConvertArgs, settings: &Settings) -> Result<Report> {
    let v = read_potential(&args.potential)?;
    let mut config = RunConfig::new("cs convert", settings.tolerances).input("potential", args.potential.display());
    if let Some(out) = &args.hamiltonian_out {
        config = config.input("hamiltonian_out", out.display());
    }
    config.grid = Some(potential_params(&v));
    config.output = settings.output.clone();
    let tol = settings.tolerances.convert;
    let mut report = Report::new(config);
    match schrodinger_to_hamiltonian(&v) {
        Ok(c) => {
            if let Some(out) = &args.hamiltonian_out {
                c.hamiltonian.write_csv(create(out)?)?;
            }
            report.result("fd_det_residual", c.fd_det_residual);
            report.result("det_xx_range", json!([
                c.det_xx.iter().copied().fold(f64::INFINITY, f64::min),
                c.det_xx.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            ]));
            report.numeric("det_minus_4v", c.det_residual, tol);
            report.numeric("wronskian", c.wronskian_error, tol);
        }
        Err(e @ CanonicalError::NotOnGrid(_)) => bail!(e),
        Err(e) => report.fail(e),
    }
    Ok(report)
}

pub fn run(command: &CsCommand, settings: &Settings) -> Result<Report> {
    match command {
        CsCommand::Check(a) => check(a, settings),
        CsCommand::Obstruct(a) => obstruct(a, settings),
        CsCommand::Convert(a) => convert(a, settings),
    }
}
