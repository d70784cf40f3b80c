//! Exact differential-polynomial algebra.
//!
//! The free commutative algebra over the rationals generated by field symbols
//! and all of their x-derivatives, plus constant symbols whose derivatives vanish.
//! [`DiffPoly::dx`] is the total derivative, [`FlowRule::dt`] the time derivative
//! induced by a choice of `s_t` for every field `s`, and [`integrate_x`] the formal
//! inverse of `dx` on exact derivatives.

mod flow;
mod integrate;
mod poly;
mod symbol;
mod text;
mod zpoly;

pub use flow::{dt, FlowRule};
pub use integrate::{integrate_x, is_exact_derivative, variational_derivative};
pub use poly::{DMonomial, DiffPoly};
pub use symbol::{Symbol, SymbolKind, SymbolTable, Var};
pub use text::{format_rational, parse_rational};
pub use zpoly::{zadd, zcoeff, zdt, zdx, zmul, ZDiffPoly, ZMatrix2};

/// Arbitrary-precision rational coefficient.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiffPolyError {
    #[error("no time derivative assigned to field `{0}`")]
    MissingFlowAssignment(String),
    #[error("`{0}` is not a total x-derivative of a differential polynomial")]
    NotExactDerivative(String),
    #[error("symbol `{0}` declared both as field and constant")]
    SymbolConflict(String),
    #[error("no numeric value supplied for `{0}`")]
    MissingValue(String),
    #[error("reduction rule for `{0}` must have lower derivative order than the rule")]
    InvalidReduction(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Shorthand used throughout the tests and the book: the rational `num/den`.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v() -> Symbol {
        Symbol::field("V")
    }

    fn var(order: u32) -> DiffPoly {
        DiffPoly::var(&v(), order)
    }

    #[test]
    fn dx_generator() {
        assert_eq!(var(0).dx(), var(1));
    }

    #[test]
    fn dx_leibniz_example() {
        let p = &var(0) * &var(1);
        let expected = &var(1) * &var(1) + &var(0) * &var(2);
        assert_eq!(p.dx(), expected);
    }

    #[test]
    fn dx_constant_symbol_vanishes() {
        let c1 = Symbol::constant("C1");
        assert!(DiffPoly::symbol(&c1).dx().is_zero());
        assert!(DiffPoly::integer(7).dx().is_zero());
    }

    #[test]
    fn dt_shift_flow() {
        let flow = FlowRule::new().assign(&v(), var(1));
        assert_eq!(flow.dt(&var(0)).unwrap(), var(1));
        assert_eq!(flow.dt(&var(1)).unwrap(), var(2));
    }

    #[test]
    fn dt_kdv_square() {
        let rhs = DiffPoly::parse("-1/4*V_xxx + 3/2*V*V_x").unwrap();
        let flow = FlowRule::new().assign(&v(), rhs.clone());
        let got = flow.dt(&var(0).pow(2)).unwrap();
        assert_eq!(got, DiffPoly::integer(2) * var(0) * rhs);
    }

    #[test]
    fn dt_missing_assignment() {
        let flow = FlowRule::new();
        assert_eq!(
            flow.dt(&var(0)),
            Err(DiffPolyError::MissingFlowAssignment("V".into()))
        );
        // constants need no rule
        assert!(flow
            .dt(&DiffPoly::symbol(&Symbol::constant("k")))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn integrate_examples() {
        assert_eq!(integrate_x(&var(1)).unwrap(), var(0));
        let half_vx = var(1).scale(&q(1, 2));
        assert_eq!(integrate_x(&half_vx).unwrap(), var(0).scale(&q(1, 2)));
        assert!(matches!(
            integrate_x(&var(0)),
            Err(DiffPolyError::NotExactDerivative(_))
        ));
    }

    #[test]
    fn integrate_rejects_field_free_terms() {
        let c = Symbol::constant("C1");
        let p = &var(1) + &DiffPoly::symbol(&c);
        assert!(integrate_x(&p).is_err());
        assert!(integrate_x(&DiffPoly::integer(3)).is_err());
    }

    #[test]
    fn integrate_with_symbolic_constant_coefficient() {
        let c = DiffPoly::symbol(&Symbol::constant("C1"));
        let integrand = &c * &var(1).scale(&q(1, 2));
        assert_eq!(
            integrate_x(&integrand).unwrap(),
            &c * &var(0).scale(&q(1, 2))
        );
    }

    #[test]
    fn integrate_two_fields() {
        let mut t = SymbolTable::new();
        let p = DiffPoly::parse_with("f*g_x - f_x*g + f^2*g_xx", &mut t).unwrap();
        let q = p.dx();
        assert_eq!(integrate_x(&q).unwrap(), p);
    }

    #[test]
    fn integrate_nonlinear_top_is_not_exact() {
        let q = DiffPoly::parse("V_xx^2").unwrap();
        assert!(integrate_x(&q).is_err());
        assert!(!variational_derivative(&q, &v()).is_zero());
    }

    #[test]
    fn variational_derivative_of_exact_vanishes() {
        let p = DiffPoly::parse("V^3 + V*V_xx").unwrap();
        assert!(variational_derivative(&p.dx(), &v()).is_zero());
    }

    #[test]
    fn text_round_trip_and_order() {
        let p = DiffPoly::parse("3/2*V*V_x - 1/4*V_xxx").unwrap();
        assert_eq!(p.to_string(), "-1/4*V_xxx + 3/2*V*V_x");
        assert_eq!(DiffPoly::parse(&p.to_string()).unwrap(), p);
        assert_eq!(
            DiffPoly::parse("\u{2212}1/4*V_xxx").unwrap().to_string(),
            "-1/4*V_xxx"
        );
        assert_eq!(DiffPoly::zero().to_string(), "0");
        assert_eq!(
            DiffPoly::parse("(V + 1)^2").unwrap().to_string(),
            "V^2 + 2*V + 1"
        );
    }

    #[test]
    fn text_constants_from_table() {
        let mut t = SymbolTable::with_constants(["C1"]);
        let p = DiffPoly::parse_with("1/2*C1*V + C1_x", &mut t).unwrap();
        assert_eq!(p.to_string(), "1/2*C1*V");
    }

    #[test]
    fn symbol_table_conflict() {
        let mut t = SymbolTable::with_constants(["k"]);
        assert!(t.declare(Symbol::field("k")).is_err());
        assert!(t.declare(Symbol::constant("k")).is_ok());
    }

    #[test]
    fn parse_errors() {
        assert!(DiffPoly::parse("").is_err());
        assert!(DiffPoly::parse("V +").is_err());
        assert!(DiffPoly::parse("1/0").is_err());
        assert!(DiffPoly::parse("V_xy").is_err());
        assert!(DiffPoly::parse("V $").is_err());
    }

    #[test]
    fn parse_rational_values() {
        assert_eq!(parse_rational("-3/4").unwrap(), q(-3, 4));
        assert_eq!(parse_rational("0").unwrap(), q(0, 1));
        assert!(parse_rational("V").is_err());
    }

    #[test]
    fn zpoly_examples() {
        let half_v = var(0).scale(&q(1, 2));
        let p = &ZDiffPoly::monomial(DiffPoly::one(), 2) + &ZDiffPoly::monomial(half_v.clone(), 1);
        assert_eq!(zcoeff(&p, 1), half_v);
        assert!(zcoeff(&p, 5).is_zero());
        assert_eq!(
            zmul(&ZDiffPoly::z(), &ZDiffPoly::z()),
            ZDiffPoly::monomial(DiffPoly::one(), 2)
        );
        let vz = ZDiffPoly::monomial(var(0), 1);
        assert_eq!(zdx(&vz), ZDiffPoly::monomial(var(1), 1));
        assert_eq!(p.degree(), Some(2));
        assert_eq!(ZDiffPoly::zero().degree(), None);
        assert_eq!(zadd(&p, &(-&p)), ZDiffPoly::zero());
    }

    #[test]
    fn reduce_derivative_rewrites_higher_orders() {
        let s = Symbol::field("S");
        let rule = DiffPoly::parse("4*S - 6*S^2").unwrap();
        let p = DiffPoly::parse("S_xxx + S_xx").unwrap();
        let reduced = p.reduce_derivative(&s, 2, &rule).unwrap();
        assert_eq!(
            reduced,
            DiffPoly::parse("4*S_x - 12*S*S_x + 4*S - 6*S^2").unwrap()
        );
        assert!(p
            .reduce_derivative(&s, 1, &DiffPoly::parse("S_x").unwrap())
            .is_err());
    }

    #[test]
    fn substitute_follows_derivatives() {
        let s = Symbol::field("S");
        let p = DiffPoly::parse("V*V_x").unwrap();
        let e = DiffPoly::parse("2*S^2").unwrap();
        let got = p.substitute(&v(), &e);
        assert_eq!(got, DiffPoly::parse("8*S^3*S_x").unwrap());
        assert!(got.field_symbols().contains(&s));
    }

    #[test]
    fn eval_numeric() {
        let p = DiffPoly::parse("3/2*V*V_x - 1").unwrap();
        let x = p
            .eval(|var| match var.order {
                0 => Some(2.0),
                1 => Some(0.5),
                _ => None,
            })
            .unwrap();
        assert!((x - 0.5).abs() < 1e-15);
        assert!(DiffPoly::parse("V_xx").unwrap().eval(|_| None).is_err());
    }
}
