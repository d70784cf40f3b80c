use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use serde_json::json;
use zerocurve::diffpoly::{parse_rational, DiffPoly, ZDiffPoly, ZMatrix2};
use zerocurve::kdv::{
    build_hierarchy, hierarchy_rhs, kdv_prototype_residual, zero_curvature_residual, ConstantValue,
    HierarchyMember,
};

use crate::report::{Report, RunConfig};
use crate::Settings;

#[derive(Subcommand, Debug)]
pub enum HierarchyCommand {
    /// Build a hierarchy member and print C, A, D and the flow.
    Gen(MemberArgs),
    /// Build a member and re-check its zero-curvature identities.
    Verify(MemberArgs),
}

#[derive(Args, Debug)]
pub struct MemberArgs {
    /// Degree of the member in z.
    #[arg(long)]
    pub n: usize,
    /// Integration constant, `NAME=VALUE` with a rational value or `sym`.
    #[arg(long = "const", value_name = "NAME=VALUE")]
    pub constants: Vec<String>,
    /// Largest degree accepted.
    #[arg(long)]
    pub max_degree: Option<usize>,
}

pub fn parse_constants(items: &[String]) -> Result<BTreeMap<String, ConstantValue>> {
    let mut out = BTreeMap::new();
    for item in items {
        let (name, value) = item
            .split_once('=')
            .with_context(|| format!("constant `{item}` is not NAME=VALUE"))?;
        let value = match value.trim() {
            "sym" => ConstantValue::Symbolic,
            text => ConstantValue::Value(
                parse_rational(text).with_context(|| format!("value of constant `{name}`"))?,
            ),
        };
        if out.insert(name.trim().to_string(), value).is_some() {
            bail!("constant `{name}` given twice");
        }
    }
    Ok(out)
}

fn text_matrix(m: &ZMatrix2) -> serde_json::Value {
    let entry = |i, j| m.get(i, j).to_text_map();
    json!([[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]])
}

fn member_results(report: &mut Report, member: &HierarchyMember) {
    report.result("degree", member.degree);
    report.result("flow_rhs", member.flow_rhs.to_string());
    report.result("flow", format!("V_t = {}", member.flow_rhs));
    report.result("C", member.c.to_text_map());
    report.result("A", member.a.to_text_map());
    report.result("D", member.d.to_text_map());
    let constants: BTreeMap<&str, String> =
        member.constants.iter().map(|(n, v)| (n.as_str(), v.to_string())).collect();
    report.result("constants", constants);
}

pub fn run(command: &HierarchyCommand, settings: &Settings) -> Result<Report> {
    let (name, args, verify) = match command {
        HierarchyCommand::Gen(a) => ("hierarchy gen", a, false),
        HierarchyCommand::Verify(a) => ("hierarchy verify", a, true),
    };
    let cap = args.max_degree.or(settings.max_degree).unwrap_or(6);
    if args.n > cap {
        bail!("degree {} exceeds the cap {cap}; raise it with --max-degree", args.n);
    }
    let constants = parse_constants(&args.constants)?;
    let mut config = RunConfig::new(name, settings.tolerances);
    config.degree = Some(args.n);
    config.constants = constants.iter().map(|(k, v)| (k.clone(), v.to_string())).collect();
    config.output = settings.output.clone();
    let member = build_hierarchy(args.n, &constants)?;

    let mut report = Report::new(config);
    member_results(&mut report, &member);
    if verify {
        let b = member.b_matrix();
        let flow = member.flow();
        let zc = zero_curvature_residual(&b, &flow)?;
        report.exact("zero_curvature", text_matrix(&zc), zc.is_zero());
        let proto = kdv_prototype_residual(&b, &flow)?;
        report.exact("prototype", proto.to_text_map(), proto.is_zero());
        let rhs = hierarchy_rhs(&member.c);
        let higher = ZDiffPoly::from_coeffs(
            rhs.coeffs().iter().enumerate().map(|(k, c)| if k == 0 { DiffPoly::zero() } else { c.clone() }).collect(),
        );
        report.exact("higher_coefficients", higher.to_text_map(), higher.is_zero());
        let trace = b.trace();
        report.exact("trace", trace.to_text_map(), trace.is_zero());
    }
    Ok(report)
}
