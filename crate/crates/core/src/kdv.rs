//! KdV hierarchy from the polynomial recursion and the Schrödinger zero-curvature equation.
//!
//! With `M = [[0, 1], [V - z, 0]]` and a trace-free `B = [[A, C], [-D, -A]]`, the
//! zero-curvature equation `M_t - B_x + MB - BM = 0` is equivalent to
//!
//! ```text
//! 2A + C_x = 0
//! (V - z)C + D + A_x = 0
//! 2(V - z)A + D_x + V_t = 0
//! ```
//!
//! and eliminating `A` and `D` gives `V_t = -1/2 C_xxx + 2(V - z)C_x + V_x C`.
//! A degree-`n` member is obtained by choosing `C = c_n z^n + ... + c_0` so that every
//! positive power of `z` cancels; the `z^0` coefficient is then the flow.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::diffpoly::{
    integrate_x, q, DiffPoly, DiffPolyError, FlowRule, Rational, Symbol, Var, ZDiffPoly, ZMatrix2,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KdvError {
    #[error("constant `{name}` is not used by the degree-{degree} member (expected one of {expected:?})")]
    UnknownConstant {
        name: String,
        degree: usize,
        expected: Vec<String>,
    },
    #[error("recursion step for z^{level} failed: {source}")]
    Recursion { level: usize, source: DiffPolyError },
    #[error(transparent)]
    Algebra(#[from] DiffPolyError),
}

/// The potential `V`.
pub fn potential() -> Symbol {
    Symbol::field("V")
}

fn v() -> DiffPoly {
    DiffPoly::symbol(&potential())
}

/// `V - z`.
fn v_minus_z() -> ZDiffPoly {
    ZDiffPoly::from_coeffs(vec![v(), -DiffPoly::one()])
}

/// `M = [[0, 1], [V - z, 0]]`.
pub fn m_matrix() -> ZMatrix2 {
    ZMatrix2::new(
        ZDiffPoly::zero(),
        ZDiffPoly::constant(DiffPoly::one()),
        v_minus_z(),
        ZDiffPoly::zero(),
    )
}

/// Trace-free generator `[[A, C], [-D, -A]]` of the time evolution.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BMatrix {
    pub a: ZDiffPoly,
    pub c: ZDiffPoly,
    pub d: ZDiffPoly,
}

impl BMatrix {
    pub fn new(a: ZDiffPoly, c: ZDiffPoly, d: ZDiffPoly) -> Self {
        BMatrix { a, c, d }
    }

    /// `A` and `D` solved from the first two equations.
    pub fn from_c(c: ZDiffPoly) -> Self {
        let (a, d) = derive_ad(&c);
        BMatrix { a, c, d }
    }

    pub fn matrix(&self) -> ZMatrix2 {
        ZMatrix2::new(self.a.clone(), self.c.clone(), -&self.d, -&self.a)
    }

    pub fn trace(&self) -> ZDiffPoly {
        self.matrix().trace()
    }
}

/// `-1/2 C_xxx + 2(V - z) C_x + V_x C` as a full polynomial in `z`.
pub fn hierarchy_rhs(c: &ZDiffPoly) -> ZDiffPoly {
    let half = DiffPoly::constant(q(-1, 2));
    let two = ZDiffPoly::constant(DiffPoly::integer(2));
    let vx = ZDiffPoly::constant(v().dx());
    &(&c.zdx_n(3).scale(&half) + &(&(&two * &v_minus_z()) * &c.zdx())) + &(&vx * c)
}

/// `A = -1/2 C_x`, `D = -A_x - (V - z)C`.
pub fn derive_ad(c: &ZDiffPoly) -> (ZDiffPoly, ZDiffPoly) {
    let a = c.zdx().scale(&DiffPoly::constant(q(-1, 2)));
    let d = -&(&a.zdx() + &(&v_minus_z() * c));
    (a, d)
}

/// `M_t - B_x + MB - BM`; identically zero exactly when the zero-curvature equation holds.
pub fn zero_curvature_residual(b: &BMatrix, flow: &FlowRule) -> Result<ZMatrix2, DiffPolyError> {
    let m = m_matrix();
    let bm = b.matrix();
    Ok(m.zdt(flow)?.sub(&bm.zdx()).add(&m.commutator(&bm)))
}

/// `V_t + D_x - (V - z) C_x`, the reduced scalar form of the three equations.
pub fn kdv_prototype_residual(b: &BMatrix, flow: &FlowRule) -> Result<ZDiffPoly, DiffPolyError> {
    let vt = ZDiffPoly::constant(flow.dt(&v())?);
    Ok(&(&vt + &b.d.zdx()) - &(&v_minus_z() * &b.c.zdx()))
}

/// An integration constant: a fixed rational, or kept as a named constant symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstantValue {
    Value(Rational),
    Symbolic,
}

impl ConstantValue {
    pub fn int(n: i64) -> Self {
        ConstantValue::Value(q(n, 1))
    }

    fn to_poly(&self, name: &str) -> DiffPoly {
        match self {
            ConstantValue::Value(r) => DiffPoly::constant(r.clone()),
            ConstantValue::Symbolic => DiffPoly::symbol(&Symbol::constant(name)),
        }
    }
}

impl std::fmt::Display for ConstantValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConstantValue::Value(r) => write!(f, "{r}"),
            ConstantValue::Symbolic => f.write_str("sym"),
        }
    }
}

/// Names of the integration constants of the degree-`n` member, from `c_n` down to `c_0`.
///
/// The leading coefficient is `C{n}`; the constant entering `c_k` for `k < n` is
/// `Cstar{k}`, written plain `Cstar` for `k = 0`.
pub fn constant_names(n: usize) -> Vec<String> {
    let mut names = vec![format!("C{n}")];
    for k in (0..n).rev() {
        names.push(if k == 0 {
            "Cstar".to_string()
        } else {
            format!("Cstar{k}")
        });
    }
    names
}

fn default_constant(n: usize, name: &str) -> ConstantValue {
    if name == format!("C{n}") {
        ConstantValue::Value(Rational::one())
    } else {
        ConstantValue::Value(Rational::zero())
    }
}

/// One member of the hierarchy together with its B-matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HierarchyMember {
    pub degree: usize,
    pub c: ZDiffPoly,
    pub a: ZDiffPoly,
    pub d: ZDiffPoly,
    /// The value of `V_t`.
    pub flow_rhs: DiffPoly,
    /// Integration constants in the order of [`constant_names`].
    pub constants: Vec<(String, ConstantValue)>,
}

/// Outcome of re-checking a member against the three symbolic conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MemberCheck {
    pub higher_coefficients_vanish: bool,
    pub zero_curvature: bool,
    pub prototype: bool,
    pub trace_free: bool,
}

impl MemberCheck {
    pub fn passed(&self) -> bool {
        self.higher_coefficients_vanish && self.zero_curvature && self.prototype && self.trace_free
    }
}

impl HierarchyMember {
    pub fn b_matrix(&self) -> BMatrix {
        BMatrix::new(self.a.clone(), self.c.clone(), self.d.clone())
    }

    pub fn flow(&self) -> FlowRule {
        FlowRule::new().assign(&potential(), self.flow_rhs.clone())
    }

    pub fn check(&self) -> Result<MemberCheck, DiffPolyError> {
        let rhs = hierarchy_rhs(&self.c);
        let higher = rhs.coeffs().iter().skip(1).all(DiffPoly::is_zero);
        let b = self.b_matrix();
        let flow = self.flow();
        Ok(MemberCheck {
            higher_coefficients_vanish: higher,
            zero_curvature: zero_curvature_residual(&b, &flow)?.is_zero(),
            prototype: kdv_prototype_residual(&b, &flow)?.is_zero(),
            trace_free: b.trace().is_zero(),
        })
    }
}

/// Builds the degree-`n` member.
///
/// Missing constants default to 1 for the leading coefficient and 0 otherwise.
pub fn build_hierarchy(
    n: usize,
    constants: &BTreeMap<String, ConstantValue>,
) -> Result<HierarchyMember, KdvError> {
    let names = constant_names(n);
    if let Some(unknown) = constants.keys().find(|k| !names.contains(k)) {
        return Err(KdvError::UnknownConstant {
            name: unknown.clone(),
            degree: n,
            expected: names,
        });
    }
    let chosen: Vec<(String, ConstantValue)> = names
        .iter()
        .map(|name| {
            let value = constants
                .get(name)
                .cloned()
                .unwrap_or_else(|| default_constant(n, name));
            (name.clone(), value)
        })
        .collect();

    // coefficients from c_n down to c_0
    let mut coeffs: Vec<DiffPoly> = Vec::with_capacity(n + 1);
    coeffs.push(chosen[0].1.to_poly(&chosen[0].0));
    let v = v();
    let vx = v.dx();
    for (step, (name, value)) in chosen.iter().enumerate().skip(1) {
        let ck = coeffs.last().expect("leading coefficient present");
        let ckx = ck.dx();
        let integrand = ck.dx_n(3).scale(&q(-1, 4)) + &v * &ckx + (&vx * ck).scale(&q(1, 2));
        let level = n - step;
        let integral =
            integrate_x(&integrand).map_err(|source| KdvError::Recursion { level, source })?;
        coeffs.push(integral + value.to_poly(name));
    }
    coeffs.reverse();

    let c = ZDiffPoly::from_coeffs(coeffs);
    let (a, d) = derive_ad(&c);
    let flow_rhs = hierarchy_rhs(&c).zcoeff(0);
    Ok(HierarchyMember {
        degree: n,
        c,
        a,
        d,
        flow_rhs,
        constants: chosen,
    })
}

type MemberKey = (usize, Vec<(String, ConstantValue)>);

/// Memo table for hierarchy members keyed by degree and constants.
#[derive(Debug, Default)]
pub struct HierarchyCache {
    members: HashMap<MemberKey, Arc<HierarchyMember>>,
}

impl HierarchyCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_build(
        &mut self,
        n: usize,
        constants: &BTreeMap<String, ConstantValue>,
    ) -> Result<Arc<HierarchyMember>, KdvError> {
        let key = (
            n,
            constants
                .iter()
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect::<Vec<_>>(),
        );
        if let Some(m) = self.members.get(&key) {
            return Ok(Arc::clone(m));
        }
        let member = Arc::new(build_hierarchy(n, constants)?);
        self.members.insert(key, Arc::clone(&member));
        Ok(member)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// The profile symbol `S = sech^2(b x)` used in the travelling-wave reduction.
pub fn sech2_symbol() -> Symbol {
    Symbol::field("S")
}

/// Residual of the KdV equation `V_t = -1/4 V_xxx + 3/2 V V_x` under the ansatz
/// `V(x, t) = A S(x - c t)` with `S = sech^2(b x)`, once integrated in x.
///
/// `S` obeys `S_xx = 4 b^2 S - 6 b^2 S^2`, so the result is a polynomial in `S`
/// alone; it vanishes identically exactly for the soliton parameters.
/// Any of `amplitude`, `k2 = b^2` and `speed` may be symbolic constants.
pub fn traveling_wave_residual(
    amplitude: &DiffPoly,
    k2: &DiffPoly,
    speed: &DiffPoly,
) -> Result<DiffPoly, DiffPolyError> {
    let member = build_hierarchy(1, &BTreeMap::new()).map_err(|e| match e {
        KdvError::Algebra(e) | KdvError::Recursion { source: e, .. } => e,
        KdvError::UnknownConstant { name, .. } => DiffPolyError::MissingValue(name),
    })?;
    let v = v();
    // V_t = -c V_x for a wave moving right with speed c
    let equation = -(speed * &v.dx()) - member.flow_rhs;
    let first_integral = integrate_x(&equation)?;
    let s = sech2_symbol();
    let profile = amplitude * &DiffPoly::symbol(&s);
    let sxx = k2
        * &(DiffPoly::integer(4) * DiffPoly::symbol(&s)
            - DiffPoly::integer(6) * DiffPoly::symbol(&s).pow(2));
    first_integral
        .substitute(&potential(), &profile)
        .reduce_derivative(&s, 2, &sxx)
}

/// Solves `alpha * unknown + beta = 0` for rational `alpha != 0`, `beta`.
fn solve_linear(p: &DiffPoly, unknown: &Var) -> Option<Rational> {
    let alpha = p.coefficient_of_power(unknown, 1);
    let beta = p.coefficient_of_power(unknown, 0);
    if !alpha.vars().is_empty() || !beta.vars().is_empty() || alpha.is_zero() {
        return None;
    }
    if p.terms().any(|(m, _)| m.exponent(unknown) > 1) {
        return None;
    }
    Some(-beta.constant_term() / alpha.constant_term())
}

/// Amplitude and speed of the one-soliton `A sech^2(b(x - c t))` for a given `b^2`,
/// obtained by making [`traveling_wave_residual`] vanish.
pub fn soliton_parameters(k2: &Rational) -> Option<(Rational, Rational)> {
    let amp = Symbol::constant("A");
    let speed = Symbol::constant("c");
    let residual = traveling_wave_residual(
        &DiffPoly::symbol(&amp),
        &DiffPoly::constant(k2.clone()),
        &DiffPoly::symbol(&speed),
    )
    .ok()?;
    let s = Var::new(sech2_symbol(), 0);
    let amp_var = Var::new(amp, 0);
    let speed_var = Var::new(speed, 0);
    // the S and S^2 coefficients both carry a factor A (A = 0 is the trivial wave)
    let linear = residual
        .coefficient_of_power(&s, 1)
        .divide_by_var(&amp_var)?;
    let quadratic = residual
        .coefficient_of_power(&s, 2)
        .divide_by_var(&amp_var)?;
    let c = solve_linear(&linear, &speed_var)?;
    let a = solve_linear(&quadratic, &amp_var)?;
    Some((a, c))
}
