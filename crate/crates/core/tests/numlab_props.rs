use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zerocurve::numlab::{
    bound_states, canonical_m_minus, canonical_m_plus, kdv_evolve_with, lft_apply,
    m_function_schrodinger, schrodinger_m_minus, schrodinger_m_plus, soliton, transfer_canonical,
    transfer_schrodinger, x_cocycle_residual, ExtComplex, GridFunction, HamiltonianGrid, Scheme,
    TransferMatrix,
};

/// Smooth localized potential `a sech^2(x - s) + c exp(-x^2)`.
fn potential() -> impl Strategy<Value = GridFunction> {
    (-3.0f64..3.0, -1.0f64..1.0, -2.0f64..2.0).prop_map(|(a, s, c)| {
        GridFunction::on_interval(-12.0, 12.0, 0.01, |x| {
            a / (x - s).cosh().powi(2) + c * (-x * x).exp()
        })
        .unwrap()
    })
}

fn upper_z() -> impl Strategy<Value = Complex64> {
    (-3.0f64..3.0, 0.2f64..3.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn sl2() -> impl Strategy<Value = TransferMatrix> {
    (0.3f64..2.0, any::<bool>(), -2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, flip, b, c)| {
        let a = if flip { -a } else { a };
        TransferMatrix::real(a, b, c, (1.0 + b * c) / a)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn schrodinger_transfer_is_unimodular(v in potential(), z in upper_z(), w in -5.0f64..5.0) {
        let w = (w * 100.0).round() / 100.0;
        let t = transfer_schrodinger(&v, z, w).unwrap();
        prop_assert!((t.det() - 1.0).norm() < 1e-8);
    }

    #[test]
    fn x_cocycle(v in potential(), z in upper_z(), w1 in 0.0f64..4.0, w2 in -4.0f64..4.0) {
        let (w1, w2) = ((w1 * 100.0).round() / 100.0, (w2 * 100.0).round() / 100.0);
        let scale = transfer_schrodinger(&v, z, w1 + w2).unwrap().max_norm().max(1.0);
        prop_assert!(x_cocycle_residual(&v, z, w1, w2).unwrap() / scale < 1e-9);
    }

    #[test]
    fn lft_is_an_action(s in sl2(), t in sl2(), w in upper_z()) {
        let w = ExtComplex::Finite(w);
        let composed = lft_apply(&(s * t), w);
        let stepwise = lft_apply(&s, lft_apply(&t, w));
        prop_assert!(composed.chordal_distance(stepwise) < 1e-12);
    }

    #[test]
    fn real_sl2_preserves_upper_half_plane(t in sl2(), w in upper_z()) {
        let image = lft_apply(&t, ExtComplex::Finite(w)).finite().unwrap();
        prop_assert!(image.im > 0.0);
    }

    #[test]
    fn schrodinger_m_is_herglotz(v in potential(), z in upper_z()) {
        prop_assert!(schrodinger_m_plus(&v, z, 0.0, 10.0).unwrap().im > 0.0);
        prop_assert!(schrodinger_m_minus(&v, z, 0.0, 10.0).unwrap().im > 0.0);
    }
}

#[test]
fn m_function_cutoff_is_stable_away_from_the_axis() {
    let v = GridFunction::on_interval(-12.0, 12.0, 0.01, |x| -2.0 / x.cosh().powi(2)).unwrap();
    let sample = m_function_schrodinger(&v, Complex64::new(-1.0, 1.5), 3.0, 1e-5).unwrap();
    assert!(sample.cutoff_change < 1e-5);
}

#[test]
fn canonical_m_is_herglotz_for_random_z() {
    let hgrid = HamiltonianGrid::on_interval(-12.0, 12.0, 0.01, |x| {
        let g = 0.3 * x.sin();
        [
            1.0 + 0.5 * (-x * x).exp(),
            g,
            (1.0 + g * g) / (1.0 + 0.5 * (-x * x).exp()),
        ]
    })
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let z = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.3..3.0));
        let (plus, minus) = (
            canonical_m_plus(&hgrid, z, 0.0, 10.0).unwrap(),
            canonical_m_minus(&hgrid, z, 0.0, 10.0).unwrap(),
        );
        assert!(plus.im > 0.0 && minus.im > 0.0, "z = {z}");
        let t = transfer_canonical(&hgrid, z, 2.0).unwrap();
        assert!((t.det() - 1.0).norm() < 1e-8);
    }
}

#[test]
fn kdv_time_stepping_is_fourth_order() {
    let b = 1.0;
    let t = 0.2;
    let v0 = GridFunction::from_fn(-16.0, 32.0 / 256.0, 256, |x| soliton(b, x, 0.0)).unwrap();
    let reference = kdv_evolve_with(&v0, t, 1600, Scheme::IntegratingFactor, None)
        .unwrap()
        .final_state;
    let error = |steps| {
        kdv_evolve_with(&v0, t, steps, Scheme::IntegratingFactor, None)
            .unwrap()
            .final_state
            .sup_distance(&reference)
    };
    let (e1, e2) = (error(100), error(200));
    let ratio = e1 / e2;
    assert!(
        (10.0..24.0).contains(&ratio),
        "errors {e1:e} {e2:e}, ratio {ratio}"
    );
}

#[test]
fn bound_state_converges_at_second_order() {
    // -2 sech^2 has the single bound state -1
    let error = |dx: f64| {
        let v = GridFunction::on_interval(-15.0, 15.0, dx, |x| -2.0 / x.cosh().powi(2)).unwrap();
        (bound_states(&v, 1).unwrap().eigenvalues[0] + 1.0).abs()
    };
    let ratio = error(0.04) / error(0.02);
    assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
}
