use std::collections::BTreeMap;

use super::poly::DiffPoly;
use super::symbol::Symbol;
use super::DiffPolyError;

/// Time derivatives of the base field symbols; defines `dt` on the whole algebra.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FlowRule {
    assignments: BTreeMap<Symbol, DiffPoly>,
}

impl FlowRule {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every listed field is static: `s_t = 0`.
    pub fn zero<'a>(fields: impl IntoIterator<Item = &'a Symbol>) -> Self {
        let mut rule = FlowRule::new();
        for s in fields {
            rule = rule.assign(s, DiffPoly::zero());
        }
        rule
    }

    pub fn assign(mut self, field: &Symbol, rhs: DiffPoly) -> Self {
        debug_assert!(field.is_field(), "constants have no flow");
        self.assignments.insert(field.clone(), rhs);
        self
    }

    pub fn get(&self, field: &Symbol) -> Option<&DiffPoly> {
        self.assignments.get(field)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &DiffPoly)> {
        self.assignments.iter()
    }

    /// `dt` of `p`: `dt(s^(k)) = dx^k(flow(s))`, extended by Leibniz and linearity.
    pub fn dt(&self, p: &DiffPoly) -> Result<DiffPoly, DiffPolyError> {
        p.derive_with(|var| {
            if var.symbol.is_constant() {
                return Ok(DiffPoly::zero());
            }
            self.assignments
                .get(&var.symbol)
                .map(|rhs| rhs.dx_n(var.order))
                .ok_or_else(|| DiffPolyError::MissingFlowAssignment(var.symbol.name().to_string()))
        })
    }
}

/// Free-function form of [`FlowRule::dt`].
pub fn dt(p: &DiffPoly, flow: &FlowRule) -> Result<DiffPoly, DiffPolyError> {
    flow.dt(p)
}
