//! Formal integration in x.
//!
//! A differential polynomial `q` is a total derivative of another differential
//! polynomial exactly when its field-free part vanishes and the Euler operator
//! `E_s(q) = sum_k (-D)^k dq/ds_k` is zero for every field `s`. Once that holds, the
//! antiderivative is assembled by peeling off the highest derivative: for the top
//! variable `s_N` the coefficient `a = dq/ds_N` is free of order-`N` variables, and
//! subtracting `D(integral of a in s_{N-1})` removes `s_N` from `q`.

use super::poly::DiffPoly;
use super::symbol::{Symbol, Var};
use super::DiffPolyError;

/// Variational derivative of `p` with respect to the field `symbol`.
pub fn variational_derivative(p: &DiffPoly, symbol: &Symbol) -> DiffPoly {
    let Some(top) = p.max_order_of(symbol) else {
        return DiffPoly::zero();
    };
    let mut out = DiffPoly::zero();
    for k in 0..=top {
        let partial = p.partial(&Var::new(symbol.clone(), k));
        if partial.is_zero() {
            continue;
        }
        let term = partial.dx_n(k);
        if k % 2 == 0 {
            out += term;
        } else {
            out -= term;
        }
    }
    out
}

/// Whether `q` is the total x-derivative of some differential polynomial.
pub fn is_exact_derivative(q: &DiffPoly) -> bool {
    q.constant_part().is_zero()
        && q.field_symbols()
            .iter()
            .all(|s| variational_derivative(q, s).is_zero())
}

/// Antiderivative `p` with `dx(p) = q` and zero field-free part.
pub fn integrate_x(q: &DiffPoly) -> Result<DiffPoly, DiffPolyError> {
    if q.is_zero() {
        return Ok(DiffPoly::zero());
    }
    if !is_exact_derivative(q) {
        return Err(DiffPolyError::NotExactDerivative(q.to_string()));
    }

    let mut antiderivative = DiffPoly::zero();
    let mut remainder = q.clone();
    // each pass removes one top-order variable; the bound only guards against bugs
    let mut budget = 64 * (1 + q.vars().len());
    while !remainder.is_zero() {
        if budget == 0 {
            return Err(DiffPolyError::NotExactDerivative(q.to_string()));
        }
        budget -= 1;

        let top = remainder
            .vars()
            .into_iter()
            .filter(|v| v.symbol.is_field())
            .max_by(|a, b| a.order.cmp(&b.order).then_with(|| b.cmp(a)))
            .ok_or_else(|| DiffPolyError::NotExactDerivative(q.to_string()))?;
        if top.order == 0 {
            return Err(DiffPolyError::NotExactDerivative(q.to_string()));
        }

        let coeff = remainder.partial(&top);
        if coeff
            .vars()
            .iter()
            .any(|v| v.symbol.is_field() && v.order >= top.order)
        {
            return Err(DiffPolyError::NotExactDerivative(q.to_string()));
        }
        let lower = Var::new(top.symbol.clone(), top.order - 1);
        let piece = coeff.antiderivative_in(&lower);
        remainder -= piece.dx();
        antiderivative += piece;
    }
    Ok(antiderivative)
}
