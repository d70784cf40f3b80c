//! Weyl m-functions from a finite cutoff.
//!
//! Beyond `±cutoff` the coefficients are frozen at their cutoff values, where the
//! decaying solution is known in closed form; that solution is integrated back to
//! the base point. Conventions (both Herglotz in the upper half plane):
//!
//! * Schrödinger: `m_+ = y_+'/y_+` and `m_- = -y_-'/y_-`; for `V = 0`, `m_± = i sqrt(z)`.
//! * Canonical system: `m_+ = -u_1/u_2` and `m_- = u_1/u_2`; for `H = I`, `m_± = i`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{GridFunction, HamiltonianGrid};
use super::lft::{lft_apply, ExtComplex};
use super::matrix::TransferMatrix;
use super::ode::{rk4_vector, steps_for};
use super::transfer::{
    canonical_generator, schrodinger_generator, transfer_canonical_between,
    transfer_schrodinger_between,
};
use super::NumError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MFunctionSample {
    pub z: Complex64,
    pub m_plus: Complex64,
    pub m_minus: Complex64,
    pub cutoff: f64,
    /// Largest change of `m_±` between the cutoff and the comparison cutoff.
    pub cutoff_change: f64,
}

fn check_upper(z: Complex64) -> Result<(), NumError> {
    if z.im > 0.0 {
        Ok(())
    } else {
        Err(NumError::InvalidGrid(format!(
            "spectral parameter {z} is not in the upper half plane"
        )))
    }
}

/// `(y, y')` at `base` of the solution decaying towards `edge`.
fn schrodinger_decaying(
    v: &GridFunction,
    z: Complex64,
    base: f64,
    edge: f64,
) -> Result<[Complex64; 2], NumError> {
    if !v.contains(edge) {
        return Err(NumError::OutOfWindow {
            x: edge,
            lo: v.x0,
            hi: v.x_end(),
        });
    }
    let k = (Complex64::new(v.at(edge)?, 0.0) - z).sqrt();
    let slope = if edge > base { -k } else { k };
    rk4_vector(
        |x| Ok(schrodinger_generator(v.at(x)?, z)),
        edge,
        base,
        steps_for(edge - base, v.dx),
        [Complex64::new(1.0, 0.0), slope],
    )
}

/// `m_+` of the operator restricted to `[base, ∞)`.
pub fn schrodinger_m_plus(
    v: &GridFunction,
    z: Complex64,
    base: f64,
    cutoff: f64,
) -> Result<Complex64, NumError> {
    let [y, dy] = schrodinger_decaying(v, z, base, cutoff)?;
    Ok(dy / y)
}

/// `m_-` of the operator restricted to `(-∞, base]`.
pub fn schrodinger_m_minus(
    v: &GridFunction,
    z: Complex64,
    base: f64,
    cutoff: f64,
) -> Result<Complex64, NumError> {
    let [y, dy] = schrodinger_decaying(v, z, base, -cutoff)?;
    Ok(-dy / y)
}

fn comparison_cutoff(contains: impl Fn(f64) -> bool, cutoff: f64) -> f64 {
    if contains(2.0 * cutoff) && contains(-2.0 * cutoff) {
        2.0 * cutoff
    } else {
        0.5 * cutoff
    }
}

/// `m_±(z)` at the origin, with the cutoff checked by doubling (or halving when
/// the window is too short to double).
pub fn m_function_schrodinger(
    v: &GridFunction,
    z: Complex64,
    cutoff: f64,
    tol: f64,
) -> Result<MFunctionSample, NumError> {
    check_upper(z)?;
    let m_plus = schrodinger_m_plus(v, z, 0.0, cutoff)?;
    let m_minus = schrodinger_m_minus(v, z, 0.0, cutoff)?;
    let other = comparison_cutoff(|x| v.contains(x), cutoff);
    let change = (schrodinger_m_plus(v, z, 0.0, other)? - m_plus)
        .norm()
        .max((schrodinger_m_minus(v, z, 0.0, other)? - m_minus).norm());
    if change > tol {
        return Err(NumError::CutoffTooSmall { change, tol });
    }
    Ok(MFunctionSample {
        z,
        m_plus,
        m_minus,
        cutoff,
        cutoff_change: change,
    })
}

fn ratio_to_m(r: ExtComplex, sign: f64) -> Option<Complex64> {
    r.finite().map(|r| r.inv() * sign)
}

/// Largest `|T(w) ⊙ m_±(0) - m_±(w)|`, acting on `y/y'` as the transfer matrix does.
pub fn schrodinger_shift_residual(
    v: &GridFunction,
    z: Complex64,
    w: f64,
    cutoff: f64,
) -> Result<f64, NumError> {
    let t = transfer_schrodinger_between(v, z, 0.0, w)?;
    let mut worst: f64 = 0.0;
    for (sign, m0, mw) in [
        (
            1.0,
            schrodinger_m_plus(v, z, 0.0, cutoff)?,
            schrodinger_m_plus(v, z, w, cutoff)?,
        ),
        (
            -1.0,
            schrodinger_m_minus(v, z, 0.0, cutoff)?,
            schrodinger_m_minus(v, z, w, cutoff)?,
        ),
    ] {
        // y / y' = sign / m
        let moved = lft_apply(&t, ExtComplex::Finite(m0.inv() * sign));
        let shifted = ratio_to_m(moved, sign).ok_or(NumError::NonFinite { at: w })?;
        worst = worst.max((shifted - mw).norm());
    }
    Ok(worst)
}

fn decaying_eigenvector([f, g, h]: [f64; 3], mu: Complex64) -> [Complex64; 2] {
    if h.abs() >= f.abs() {
        [Complex64::new(h, 0.0), mu - g]
    } else {
        [mu + g, Complex64::new(-f, 0.0)]
    }
}

/// `(u_1, u_2)` at `base` of the solution decaying towards `edge`.
fn canonical_decaying(
    hgrid: &HamiltonianGrid,
    z: Complex64,
    base: f64,
    edge: f64,
) -> Result<[Complex64; 2], NumError> {
    if !hgrid.contains(edge) {
        return Err(NumError::OutOfWindow {
            x: edge,
            lo: hgrid.x0,
            hi: hgrid.x_end(),
        });
    }
    let entries = hgrid.at(edge)?;
    let delta = entries[0] * entries[2] - entries[1] * entries[1];
    if !(delta > 0.0) {
        return Err(NumError::InvalidGrid(format!(
            "Hamiltonian is singular at the cutoff {edge}"
        )));
    }
    let root = Complex64::new(0.0, delta.sqrt());
    let mu = if edge > base { root } else { -root };
    rk4_vector(
        |x| Ok(canonical_generator(hgrid.at(x)?, z)),
        edge,
        base,
        steps_for(edge - base, hgrid.dx),
        decaying_eigenvector(entries, mu),
    )
}

pub fn canonical_m_plus(
    hgrid: &HamiltonianGrid,
    z: Complex64,
    base: f64,
    cutoff: f64,
) -> Result<Complex64, NumError> {
    let [u1, u2] = canonical_decaying(hgrid, z, base, cutoff)?;
    Ok(-u1 / u2)
}

pub fn canonical_m_minus(
    hgrid: &HamiltonianGrid,
    z: Complex64,
    base: f64,
    cutoff: f64,
) -> Result<Complex64, NumError> {
    let [u1, u2] = canonical_decaying(hgrid, z, base, -cutoff)?;
    Ok(u1 / u2)
}

pub fn m_function_canonical(
    hgrid: &HamiltonianGrid,
    z: Complex64,
    cutoff: f64,
    tol: f64,
) -> Result<MFunctionSample, NumError> {
    check_upper(z)?;
    let m_plus = canonical_m_plus(hgrid, z, 0.0, cutoff)?;
    let m_minus = canonical_m_minus(hgrid, z, 0.0, cutoff)?;
    let other = comparison_cutoff(|x| hgrid.contains(x), cutoff);
    let change = (canonical_m_plus(hgrid, z, 0.0, other)? - m_plus)
        .norm()
        .max((canonical_m_minus(hgrid, z, 0.0, other)? - m_minus).norm());
    if change > tol {
        return Err(NumError::CutoffTooSmall { change, tol });
    }
    Ok(MFunctionSample {
        z,
        m_plus,
        m_minus,
        cutoff,
        cutoff_change: change,
    })
}

/// Canonical counterpart of [`schrodinger_shift_residual`]; `u_1/u_2 = ∓m_±`.
pub fn canonical_shift_residual(
    hgrid: &HamiltonianGrid,
    z: Complex64,
    x: f64,
    cutoff: f64,
) -> Result<f64, NumError> {
    let t: TransferMatrix = transfer_canonical_between(hgrid, z, 0.0, x)?;
    let mut worst: f64 = 0.0;
    for (sign, m0, mx) in [
        (
            -1.0,
            canonical_m_plus(hgrid, z, 0.0, cutoff)?,
            canonical_m_plus(hgrid, z, x, cutoff)?,
        ),
        (
            1.0,
            canonical_m_minus(hgrid, z, 0.0, cutoff)?,
            canonical_m_minus(hgrid, z, x, cutoff)?,
        ),
    ] {
        let moved = lft_apply(&t, ExtComplex::Finite(m0 * sign));
        let shifted = moved.finite().ok_or(NumError::NonFinite { at: x })? * sign;
        worst = worst.max((shifted - mx).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i() -> Complex64 {
        Complex64::new(0.0, 1.0)
    }

    #[test]
    fn free_schrodinger() {
        let v = GridFunction::on_interval(-12.0, 12.0, 0.01, |_| 0.0).unwrap();
        for z in [i(), Complex64::new(2.0, 0.5), Complex64::new(-1.0, 0.3)] {
            let m = m_function_schrodinger(&v, z, 5.0, 1e-6).unwrap();
            let want = i() * z.sqrt();
            assert!((m.m_plus - want).norm() < 1e-8, "{z}: {}", m.m_plus);
            assert!((m.m_minus - want).norm() < 1e-8);
        }
    }

    #[test]
    fn reflectionless_well_m_function() {
        // for V = -2 sech^2 the decaying solution is (i k - tanh x) e^{ikx}, k = sqrt(z)
        let v = GridFunction::on_interval(-25.0, 25.0, 0.005, |x| -2.0 / x.cosh().powi(2)).unwrap();
        let z = Complex64::new(0.7, 0.4);
        let k = z.sqrt();
        let x = 0.3f64;
        let y = |x: f64| (i() * k - x.tanh()) * (i() * k * x).exp();
        let dy = |x: f64| {
            let sech2 = 1.0 / x.cosh().powi(2);
            (-sech2 + i() * k * (i() * k - x.tanh())) * (i() * k * x).exp()
        };
        let m = schrodinger_m_plus(&v, z, x, 12.0).unwrap();
        assert!((m - dy(x) / y(x)).norm() < 1e-7, "{m}");
    }

    #[test]
    fn shift_property() {
        let v = GridFunction::on_interval(-20.0, 20.0, 0.01, |x| {
            -2.0 / x.cosh().powi(2) + 0.3 * (-x * x).exp()
        })
        .unwrap();
        let r = schrodinger_shift_residual(&v, Complex64::new(0.4, 0.9), 1.3, 10.0).unwrap();
        assert!(r < 1e-8, "{r}");
    }

    #[test]
    fn identity_hamiltonian() {
        let h = HamiltonianGrid::on_interval(-10.0, 10.0, 0.01, |_| [1.0, 0.0, 1.0]).unwrap();
        let m = m_function_canonical(&h, Complex64::new(0.5, 1.0), 4.0, 1e-8).unwrap();
        assert!((m.m_plus - i()).norm() < 1e-9);
        assert!((m.m_minus - i()).norm() < 1e-9);
        let r = canonical_shift_residual(&h, Complex64::new(0.5, 1.0), 0.8, 4.0).unwrap();
        assert!(r < 1e-9);
    }

    #[test]
    fn cutoff_too_small() {
        let v = GridFunction::on_interval(-10.0, 10.0, 0.01, |x| -2.0 / x.cosh().powi(2)).unwrap();
        let err = m_function_schrodinger(&v, Complex64::new(0.0, 0.2), 1.0, 1e-8).unwrap_err();
        assert!(matches!(err, NumError::CutoffTooSmall { .. }));
    }

    #[test]
    fn rejects_lower_half_plane() {
        let v = GridFunction::on_interval(-10.0, 10.0, 0.01, |_| 0.0).unwrap();
        assert!(m_function_schrodinger(&v, Complex64::new(1.0, -1.0), 3.0, 1e-6).is_err());
    }
}
