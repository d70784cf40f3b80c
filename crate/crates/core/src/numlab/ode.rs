//! Fourth-order integrators for linear 2x2 systems `Y' = G(s) Y`: classical
//! Runge-Kutta, and a Magnus scheme that keeps `det Y` fixed when `G` is trace-free.

use num_complex::Complex64;

use super::matrix::TransferMatrix;
use super::NumError;

/// Smallest step the integrators accept relative to the interval length.
const MIN_RELATIVE_STEP: f64 = 1e-13;

fn check_step(length: f64, steps: usize) -> Result<f64, NumError> {
    if steps == 0 {
        return if length == 0.0 {
            Ok(0.0)
        } else {
            Err(NumError::StepUnderflow { step: 0.0 })
        };
    }
    let h = length / steps as f64;
    if length != 0.0 && h.abs() < MIN_RELATIVE_STEP * length.abs().max(1.0) {
        return Err(NumError::StepUnderflow { step: h });
    }
    Ok(h)
}

/// Propagates `y0` from `s0` to `s1` in `steps` equal steps.
pub fn rk4<G>(
    mut generator: G,
    s0: f64,
    s1: f64,
    steps: usize,
    y0: TransferMatrix,
) -> Result<TransferMatrix, NumError>
where
    G: FnMut(f64) -> Result<TransferMatrix, NumError>,
{
    let h = check_step(s1 - s0, steps)?;
    let mut y = y0;
    for k in 0..steps {
        let s = s0 + h * k as f64;
        let g0 = generator(s)?;
        let gm = generator(s + 0.5 * h)?;
        let g1 = generator(s + h)?;
        let k1 = g0 * y;
        let k2 = gm * (y + k1 * (0.5 * h));
        let k3 = gm * (y + k2 * (0.5 * h));
        let k4 = g1 * (y + k3 * h);
        y = y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        if !y.is_finite() {
            return Err(NumError::NonFinite { at: s + h });
        }
    }
    Ok(y)
}

/// Two-point Gauss Magnus step `Y <- exp(Ω) Y` with
/// `Ω = h/2 (G_1 + G_2) + sqrt(3)/12 h^2 [G_2, G_1]`.
///
/// `Ω` is trace-free whenever `G` is, so each step has determinant one up to rounding.
pub fn magnus4<G>(
    mut generator: G,
    s0: f64,
    s1: f64,
    steps: usize,
    y0: TransferMatrix,
) -> Result<TransferMatrix, NumError>
where
    G: FnMut(f64) -> Result<TransferMatrix, NumError>,
{
    let h = check_step(s1 - s0, steps)?;
    let offset = 3f64.sqrt() / 6.0;
    let mut y = y0;
    for k in 0..steps {
        let s = s0 + h * k as f64;
        let g1 = generator(s + (0.5 - offset) * h)?;
        let g2 = generator(s + (0.5 + offset) * h)?;
        let omega = (g1 + g2) * (0.5 * h) + (g2 * g1 - g1 * g2) * (3f64.sqrt() / 12.0 * h * h);
        y = omega.exp_traceless() * y;
        if !y.is_finite() {
            return Err(NumError::NonFinite { at: s + h });
        }
    }
    Ok(y)
}

/// Same scheme for a single vector solution.
pub fn rk4_vector<G>(
    mut generator: G,
    s0: f64,
    s1: f64,
    steps: usize,
    y0: [Complex64; 2],
) -> Result<[Complex64; 2], NumError>
where
    G: FnMut(f64) -> Result<TransferMatrix, NumError>,
{
    let h = check_step(s1 - s0, steps)?;
    let axpy = |y: [Complex64; 2], k: [Complex64; 2], a: f64| [y[0] + k[0] * a, y[1] + k[1] * a];
    let mut y = y0;
    for k in 0..steps {
        let s = s0 + h * k as f64;
        let gm = generator(s + 0.5 * h)?;
        let k1 = generator(s)?.apply(y);
        let k2 = gm.apply(axpy(y, k1, 0.5 * h));
        let k3 = gm.apply(axpy(y, k2, 0.5 * h));
        let k4 = generator(s + h)?.apply(axpy(y, k3, h));
        for i in 0..2 {
            y[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
        // only the ratio matters to callers, so keep the magnitude in range
        let scale = y[0].norm().max(y[1].norm());
        if !scale.is_finite() {
            return Err(NumError::NonFinite { at: s + h });
        }
        if scale > 1e100 || (scale < 1e-100 && scale > 0.0) {
            y = [y[0] / scale, y[1] / scale];
        }
    }
    Ok(y)
}

/// Number of steps of size at most `max_step` covering `length`.
pub fn steps_for(length: f64, max_step: f64) -> usize {
    ((length.abs() / max_step) - 1e-9).ceil().max(0.0) as usize
}
