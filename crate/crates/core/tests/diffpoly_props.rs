use proptest::prelude::*;
use zerocurve::diffpoly::{
    integrate_x, is_exact_derivative, q, variational_derivative, DiffPoly, FlowRule, Symbol,
};

fn v() -> Symbol {
    Symbol::field("V")
}

/// Random polynomial in `V, V_x, V_xx` with small rational coefficients.
fn poly() -> impl Strategy<Value = DiffPoly> {
    let term = (-5i64..=5, 1i64..=3, 0u32..=2, 0u32..=2, 0u32..=1);
    prop::collection::vec(term, 0..5).prop_map(|terms| {
        terms
            .into_iter()
            .map(|(num, den, e0, e1, e2)| {
                let s = v();
                DiffPoly::constant(q(num, den))
                    * DiffPoly::var(&s, 0).pow(e0)
                    * DiffPoly::var(&s, 1).pow(e1)
                    * DiffPoly::var(&s, 2).pow(e2)
            })
            .sum()
    })
}

fn kdv_flow() -> FlowRule {
    FlowRule::new().assign(&v(), DiffPoly::parse("-1/4*V_xxx + 3/2*V*V_x").unwrap())
}

proptest! {
    #[test]
    fn leibniz(p in poly(), r in poly()) {
        prop_assert_eq!((&p * &r).dx(), &p.dx() * &r + &p * &r.dx());
    }

    #[test]
    fn dx_is_linear(p in poly(), r in poly(), a in -4i64..4) {
        let a = DiffPoly::integer(a);
        prop_assert_eq!((&a * &p + &r).dx(), &a * &p.dx() + r.dx());
    }

    #[test]
    fn dx_and_dt_commute(p in poly()) {
        let flow = kdv_flow();
        prop_assert_eq!(flow.dt(&p.dx()).unwrap(), flow.dt(&p).unwrap().dx());
    }

    #[test]
    fn integrate_inverts_dx(p in poly()) {
        let d = p.dx();
        prop_assert!(is_exact_derivative(&d));
        prop_assert_eq!(integrate_x(&d).unwrap(), &p - &p.constant_part());
    }

    #[test]
    fn euler_operator_kills_derivatives(p in poly()) {
        prop_assert!(variational_derivative(&p.dx(), &v()).is_zero());
    }

    #[test]
    fn text_round_trip(p in poly()) {
        prop_assert_eq!(DiffPoly::parse(&p.to_string()).unwrap(), p);
    }
}

#[test]
fn non_exact_is_rejected() {
    let p = DiffPoly::parse("V*V_xx").unwrap();
    assert!(!is_exact_derivative(&p));
    assert!(integrate_x(&p).is_err());
}
