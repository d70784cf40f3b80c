use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use super::symbol::{Symbol, Var};
use super::{DiffPolyError, Rational};

/// Product of powers of variables, kept sorted by variable with no zero exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DMonomial {
    factors: Vec<(Var, u32)>,
}

impl DMonomial {
    pub fn one() -> Self {
        DMonomial {
            factors: Vec::new(),
        }
    }

    pub fn var(var: Var) -> Self {
        DMonomial {
            factors: vec![(var, 1)],
        }
    }

    /// Builds a monomial from arbitrary (var, exponent) pairs, merging repeats.
    pub fn from_factors(factors: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut merged: BTreeMap<Var, u32> = BTreeMap::new();
        for (var, exp) in factors {
            if exp > 0 {
                *merged.entry(var).or_insert(0) += exp;
            }
        }
        DMonomial {
            factors: merged.into_iter().collect(),
        }
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn exponent(&self, var: &Var) -> u32 {
        self.factors
            .binary_search_by(|(v, _)| v.cmp(var))
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    /// Whether the monomial involves any field symbol.
    pub fn has_field(&self) -> bool {
        self.factors.iter().any(|(v, _)| v.symbol.is_field())
    }

    /// Highest derivative order over field factors.
    pub fn max_field_order(&self) -> Option<u32> {
        self.factors
            .iter()
            .filter(|(v, _)| v.symbol.is_field())
            .map(|(v, _)| v.order)
            .max()
    }

    /// Total exponent of field factors.
    pub fn field_degree(&self) -> u32 {
        self.factors
            .iter()
            .filter(|(v, _)| v.symbol.is_field())
            .map(|(_, e)| *e)
            .sum()
    }

    pub fn mul(&self, other: &DMonomial) -> DMonomial {
        let mut out = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() && j < other.factors.len() {
            let (a, b) = (&self.factors[i], &other.factors[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a.clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b.clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a.0.clone(), a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.factors[i..]);
        out.extend_from_slice(&other.factors[j..]);
        DMonomial { factors: out }
    }

    /// Lowers the exponent of `var` by `by`. Caller guarantees it is present often enough.
    fn reduce(&self, var: &Var, by: u32) -> DMonomial {
        let mut factors = self.factors.clone();
        if let Ok(i) = factors.binary_search_by(|(v, _)| v.cmp(var)) {
            if factors[i].1 > by {
                factors[i].1 -= by;
            } else {
                factors.remove(i);
            }
        }
        DMonomial { factors }
    }

    fn raise(&self, var: &Var) -> DMonomial {
        self.mul(&DMonomial::var(var.clone()))
    }
}

/// Exact differential polynomial with rational coefficients.
///
/// Terms are stored in a sorted map and zero coefficients are never kept, so
/// structural equality is mathematical equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DiffPoly {
    terms: BTreeMap<DMonomial, Rational>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly::default()
    }

    pub fn one() -> Self {
        DiffPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        DiffPoly::term(DMonomial::one(), c)
    }

    pub fn integer(n: i64) -> Self {
        DiffPoly::constant(Rational::from_integer(BigInt::from(n)))
    }

    /// `num/den` as a constant polynomial.
    pub fn ratio(num: i64, den: i64) -> Self {
        DiffPoly::constant(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn term(monomial: DMonomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(monomial, c);
        }
        DiffPoly { terms }
    }

    /// The generator `symbol` differentiated `order` times.
    pub fn var(symbol: &Symbol, order: u32) -> Self {
        if symbol.is_constant() && order > 0 {
            return DiffPoly::zero();
        }
        DiffPoly::term(
            DMonomial::var(Var::new(symbol.clone(), order)),
            Rational::one(),
        )
    }

    pub fn symbol(symbol: &Symbol) -> Self {
        DiffPoly::var(symbol, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, monomial: &DMonomial) -> Rational {
        self.terms
            .get(monomial)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (DMonomial, Rational)>) -> Self {
        let mut p = DiffPoly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, monomial: DMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(monomial) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> DiffPoly {
        let mut out = DiffPoly::one();
        for _ in 0..exp {
            out = &out * self;
        }
        out
    }

    /// All variables occurring in the polynomial.
    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|(v, _)| v.clone()))
            .collect()
    }

    /// Field symbols occurring at any derivative order.
    pub fn field_symbols(&self) -> BTreeSet<Symbol> {
        self.vars()
            .into_iter()
            .filter(|v| v.symbol.is_field())
            .map(|v| v.symbol)
            .collect()
    }

    pub fn max_order_of(&self, symbol: &Symbol) -> Option<u32> {
        self.vars()
            .into_iter()
            .filter(|v| &v.symbol == symbol)
            .map(|v| v.order)
            .max()
    }

    /// Part of the polynomial free of field symbols (numbers and constant symbols).
    pub fn constant_part(&self) -> DiffPoly {
        DiffPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| !m.has_field())
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// The numeric coefficient of the empty monomial.
    pub fn constant_term(&self) -> Rational {
        self.coefficient(&DMonomial::one())
    }

    /// Applies a derivation determined by its values on variables.
    pub(crate) fn derive_with<E>(
        &self,
        mut on_var: impl FnMut(&Var) -> Result<DiffPoly, E>,
    ) -> Result<DiffPoly, E> {
        let mut images: BTreeMap<Var, DiffPoly> = BTreeMap::new();
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            for (var, exp) in m.factors() {
                if !images.contains_key(var) {
                    let image = on_var(var)?;
                    images.insert(var.clone(), image);
                }
                let image = &images[var];
                if image.is_zero() {
                    continue;
                }
                let rest = m.reduce(var, 1);
                let k = c * Rational::from_integer(BigInt::from(*exp));
                for (im, ic) in &image.terms {
                    out.add_term(rest.mul(im), &k * ic);
                }
            }
        }
        Ok(out)
    }

    /// Total x-derivative.
    pub fn dx(&self) -> DiffPoly {
        self.derive_with::<std::convert::Infallible>(|v| {
            Ok(if v.symbol.is_constant() {
                DiffPoly::zero()
            } else {
                DiffPoly::var(&v.symbol, v.order + 1)
            })
        })
        .unwrap_or_else(|e| match e {})
    }

    pub fn dx_n(&self, n: u32) -> DiffPoly {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.dx();
        }
        p
    }

    /// Partial derivative with respect to one variable, treating all others as independent.
    pub fn partial(&self, var: &Var) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            if e > 0 {
                out.add_term(
                    m.reduce(var, 1),
                    c * Rational::from_integer(BigInt::from(e)),
                );
            }
        }
        out
    }

    /// Polynomial antiderivative in one variable (no constant added).
    pub fn antiderivative_in(&self, var: &Var) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            out.add_term(
                m.raise(var),
                c / Rational::from_integer(BigInt::from(e + 1)),
            );
        }
        out
    }

    /// Coefficient of `var^exp`, as a polynomial free of `var`.
    pub fn coefficient_of_power(&self, var: &Var, exp: u32) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            if m.exponent(var) == exp {
                out.add_term(m.reduce(var, exp), c.clone());
            }
        }
        out
    }

    /// Divides by `var` when every term contains it.
    pub fn divide_by_var(&self, var: &Var) -> Option<DiffPoly> {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            if m.exponent(var) == 0 {
                return None;
            }
            out.add_term(m.reduce(var, 1), c.clone());
        }
        Some(out)
    }

    /// Replaces `symbol` (and each of its derivatives, by differentiating `expr`) with `expr`.
    pub fn substitute(&self, symbol: &Symbol, expr: &DiffPoly) -> DiffPoly {
        let mut derivs: Vec<DiffPoly> = vec![expr.clone()];
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let mut prod = DiffPoly::constant(c.clone());
            for (var, exp) in m.factors() {
                let base = if &var.symbol == symbol {
                    while derivs.len() <= var.order as usize {
                        let next = derivs.last().expect("non-empty").dx();
                        derivs.push(next);
                    }
                    derivs[var.order as usize].clone()
                } else {
                    DiffPoly::var(&var.symbol, var.order)
                };
                prod = &prod * &base.pow(*exp);
            }
            out += prod;
        }
        out
    }

    /// Rewrites every derivative of `symbol` of order at least `order` using
    /// `symbol^(order) = expr`, until none remain. `expr` must have lower order in `symbol`.
    pub fn reduce_derivative(
        &self,
        symbol: &Symbol,
        order: u32,
        expr: &DiffPoly,
    ) -> Result<DiffPoly, DiffPolyError> {
        if expr.max_order_of(symbol).is_some_and(|k| k >= order) {
            return Err(DiffPolyError::InvalidReduction(symbol.name().to_string()));
        }
        let mut current = self.clone();
        loop {
            let top = current.max_order_of(symbol);
            match top {
                Some(k) if k >= order => {
                    let replacement = expr.dx_n(k - order);
                    current = current.replace_var(&Var::new(symbol.clone(), k), &replacement);
                }
                _ => return Ok(current),
            }
        }
    }

    /// Replaces a single variable (not its derivatives) by `expr`.
    pub fn replace_var(&self, target: &Var, expr: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(target);
            if e == 0 {
                out.add_term(m.clone(), c.clone());
                continue;
            }
            let rest = DiffPoly::term(m.reduce(target, e), c.clone());
            out += &rest * &expr.pow(e);
        }
        out
    }

    /// Floating-point evaluation given values for every variable.
    pub fn eval(&self, mut value: impl FnMut(&Var) -> Option<f64>) -> Result<f64, DiffPolyError> {
        let mut total = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.to_f64().unwrap_or(f64::NAN);
            for (var, exp) in m.factors() {
                let x = value(var).ok_or_else(|| DiffPolyError::MissingValue(var.to_string()))?;
                t *= x.powi(*exp as i32);
            }
            total += t;
        }
        Ok(total)
    }
}

impl From<&Symbol> for DiffPoly {
    fn from(s: &Symbol) -> Self {
        DiffPoly::symbol(s)
    }
}

impl From<Rational> for DiffPoly {
    fn from(c: Rational) -> Self {
        DiffPoly::constant(c)
    }
}

impl AddAssign<&DiffPoly> for DiffPoly {
    fn add_assign(&mut self, rhs: &DiffPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl AddAssign<DiffPoly> for DiffPoly {
    fn add_assign(&mut self, rhs: DiffPoly) {
        if self.terms.is_empty() {
            *self = rhs;
            return;
        }
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl SubAssign<&DiffPoly> for DiffPoly {
    fn sub_assign(&mut self, rhs: &DiffPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl SubAssign<DiffPoly> for DiffPoly {
    fn sub_assign(&mut self, rhs: DiffPoly) {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
    }
}

impl Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        DiffPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl Neg for DiffPoly {
    type Output = DiffPoly;
    fn neg(mut self) -> DiffPoly {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Mul for &DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $assign:ident) => {
        impl $tr<&DiffPoly> for &DiffPoly {
            type Output = DiffPoly;
            fn $method(self, rhs: &DiffPoly) -> DiffPoly {
                let mut out = self.clone();
                out.$assign(rhs);
                out
            }
        }
        impl $tr<DiffPoly> for DiffPoly {
            type Output = DiffPoly;
            fn $method(mut self, rhs: DiffPoly) -> DiffPoly {
                self.$assign(rhs);
                self
            }
        }
        impl $tr<&DiffPoly> for DiffPoly {
            type Output = DiffPoly;
            fn $method(mut self, rhs: &DiffPoly) -> DiffPoly {
                self.$assign(rhs);
                self
            }
        }
        impl $tr<DiffPoly> for &DiffPoly {
            type Output = DiffPoly;
            fn $method(self, rhs: DiffPoly) -> DiffPoly {
                let mut out = self.clone();
                out.$assign(rhs);
                out
            }
        }
    };
}

forward_binop!(Add, add, add_assign);
forward_binop!(Sub, sub, sub_assign);

impl Mul<DiffPoly> for DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: DiffPoly) -> DiffPoly {
        &self * &rhs
    }
}

impl Mul<&DiffPoly> for DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        &self * rhs
    }
}

impl Mul<DiffPoly> for &DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: DiffPoly) -> DiffPoly {
        self * &rhs
    }
}

impl std::iter::Sum for DiffPoly {
    fn sum<I: Iterator<Item = DiffPoly>>(iter: I) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for p in iter {
            out += p;
        }
        out
    }
}
