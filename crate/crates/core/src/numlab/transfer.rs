//! x-transfer matrices of the Schrödinger equation and of canonical systems.
//!
//! `T(w)` solves `T' = M(x) T`, `T(0) = I`, with
//! `M = [[0, 1], [V - z, 0]]` for `-y'' + V y = z y` and
//! `M = z [[g, h], [-f, -g]]` for the canonical system with Hamiltonian `[[f, g], [g, h]]`.
//! Off-grid coefficients come from cubic interpolation, and the step is the grid spacing.
//! Steps are fourth-order Magnus steps, so `det T = 1` holds to rounding.

use num_complex::Complex64;

use super::grid::{GridFunction, HamiltonianGrid};
use super::matrix::TransferMatrix;
use super::ode::{magnus4, steps_for};
use super::NumError;

pub fn schrodinger_generator(v: f64, z: Complex64) -> TransferMatrix {
    TransferMatrix::new(
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(v, 0.0) - z,
        Complex64::new(0.0, 0.0),
    )
}

pub fn canonical_generator([f, g, h]: [f64; 3], z: Complex64) -> TransferMatrix {
    TransferMatrix::new(z * g, z * h, -z * f, -z * g)
}

fn check_window(contains: bool, x: f64, lo: f64, hi: f64) -> Result<(), NumError> {
    if contains {
        Ok(())
    } else {
        Err(NumError::OutOfWindow { x, lo, hi })
    }
}

/// Transfer matrix carrying `(y, y')` from `from` to `to`.
pub fn transfer_schrodinger_between(
    v: &GridFunction,
    z: Complex64,
    from: f64,
    to: f64,
) -> Result<TransferMatrix, NumError> {
    check_window(v.contains(from), from, v.x0, v.x_end())?;
    check_window(v.contains(to), to, v.x0, v.x_end())?;
    let steps = steps_for(to - from, v.dx);
    magnus4(
        |x| Ok(schrodinger_generator(v.at(x)?, z)),
        from,
        to,
        steps,
        TransferMatrix::identity(),
    )
}

/// `T(w, z)` based at the origin.
pub fn transfer_schrodinger(
    v: &GridFunction,
    z: Complex64,
    w: f64,
) -> Result<TransferMatrix, NumError> {
    transfer_schrodinger_between(v, z, 0.0, w)
}

pub fn transfer_canonical_between(
    hgrid: &HamiltonianGrid,
    z: Complex64,
    from: f64,
    to: f64,
) -> Result<TransferMatrix, NumError> {
    check_window(hgrid.contains(from), from, hgrid.x0, hgrid.x_end())?;
    check_window(hgrid.contains(to), to, hgrid.x0, hgrid.x_end())?;
    let steps = steps_for(to - from, hgrid.dx);
    magnus4(
        |x| Ok(canonical_generator(hgrid.at(x)?, z)),
        from,
        to,
        steps,
        TransferMatrix::identity(),
    )
}

pub fn transfer_canonical(
    hgrid: &HamiltonianGrid,
    z: Complex64,
    w: f64,
) -> Result<TransferMatrix, NumError> {
    transfer_canonical_between(hgrid, z, 0.0, w)
}

/// `T(w1 + w2) - T(w1; shifted by w2) T(w2)` in max-entry norm.
pub fn x_cocycle_residual(
    v: &GridFunction,
    z: Complex64,
    w1: f64,
    w2: f64,
) -> Result<f64, NumError> {
    let whole = transfer_schrodinger(v, z, w1 + w2)?;
    let first = transfer_schrodinger(v, z, w2)?;
    let second = transfer_schrodinger_between(v, z, w2, w1 + w2)?;
    Ok(whole.distance(&(second * first)))
}
