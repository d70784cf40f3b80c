//! Fourier pseudo-spectral solver for `V_t = -1/4 V_xxx + 3/2 V V_x` on a periodic window.
//!
//! The samples are taken as one period of length `n dx`. In Fourier space the equation
//! reads `v_t = L v + N(v)` with `L = i k^3 / 4` and `N(v) = 3/4 i k F(V^2)`.
//! Two RK4 variants are offered: plain method of lines, and an integrating-factor form
//! that treats `L` exactly and only has to resolve the nonlinear term.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::grid::GridFunction;
use super::NumError;

/// Stability radius of classical RK4 on the imaginary axis.
pub const RK4_IMAGINARY_LIMIT: f64 = 2.0 * std::f64::consts::SQRT_2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[default]
    IntegratingFactor,
    MethodOfLines,
}

struct Spectral {
    n: usize,
    k: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Spectral {
    fn new(n: usize, dx: f64) -> Self {
        let mut planner = FftPlanner::new();
        let length = n as f64 * dx;
        let k = (0..n)
            .map(|j| {
                if 2 * j == n {
                    0.0
                } else if 2 * j < n {
                    2.0 * std::f64::consts::PI * j as f64 / length
                } else {
                    -2.0 * std::f64::consts::PI * (n - j) as f64 / length
                }
            })
            .collect();
        Spectral {
            n,
            k,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    fn k_max(&self) -> f64 {
        self.k.iter().fold(0.0, |m, k| m.max(k.abs()))
    }

    fn to_fourier(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    fn to_physical(&self, hat: &[Complex64]) -> Vec<f64> {
        let mut buf = hat.to_vec();
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }

    /// `3/4 i k F(V^2)` from `F(V)`.
    fn nonlinear(&self, hat: &[Complex64]) -> Vec<Complex64> {
        let v = self.to_physical(hat);
        let squared: Vec<f64> = v.iter().map(|x| x * x).collect();
        let mut out = self.to_fourier(&squared);
        for (o, k) in out.iter_mut().zip(&self.k) {
            *o *= Complex64::new(0.0, 0.75 * k);
        }
        out
    }

    fn linear(&self) -> Vec<Complex64> {
        self.k
            .iter()
            .map(|k| Complex64::new(0.0, k * k * k / 4.0))
            .collect()
    }
}

/// Spectral x-derivatives of orders `0..=max_order` of periodic samples.
pub fn spectral_derivatives(values: &[f64], dx: f64, max_order: usize) -> Vec<Vec<f64>> {
    let sp = Spectral::new(values.len(), dx);
    let hat = sp.to_fourier(values);
    (0..=max_order)
        .map(|order| {
            if order == 0 {
                return values.to_vec();
            }
            let scaled: Vec<Complex64> = hat
                .iter()
                .zip(&sp.k)
                .map(|(h, k)| h * Complex64::new(0.0, *k).powu(order as u32))
                .collect();
            sp.to_physical(&scaled)
        })
        .collect()
}

/// Largest stable time step for `v0` under `scheme`.
pub fn max_stable_step(v0: &GridFunction, scheme: Scheme) -> f64 {
    let sp = Spectral::new(v0.len(), v0.dx);
    stable_step(&sp, v0.max_abs(), scheme)
}

fn stable_step(sp: &Spectral, vmax: f64, scheme: Scheme) -> f64 {
    let k = sp.k_max();
    let advective = 1.5 * vmax * k;
    let rate = match scheme {
        Scheme::IntegratingFactor => advective,
        Scheme::MethodOfLines => advective + k * k * k / 4.0,
    };
    if rate == 0.0 {
        f64::INFINITY
    } else {
        RK4_IMAGINARY_LIMIT / rate
    }
}

/// Step count giving half the stability limit.
pub fn suggested_steps(v0: &GridFunction, t_final: f64, scheme: Scheme) -> usize {
    let dt = 0.5 * max_stable_step(v0, scheme);
    ((t_final.abs() / dt).ceil() as usize).max(1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct KdvRun {
    pub final_state: GridFunction,
    /// `(t, V(t))`, including the initial and final states when snapshots were requested.
    pub snapshots: Vec<(f64, GridFunction)>,
    pub dt: f64,
    pub mass_initial: f64,
    pub mass_final: f64,
}

impl KdvRun {
    pub fn mass_drift(&self) -> f64 {
        (self.mass_final - self.mass_initial).abs()
    }
}

/// Evolves `v0` to `t_final` in `steps` integrating-factor RK4 steps.
pub fn kdv_evolve(v0: &GridFunction, t_final: f64, steps: usize) -> Result<GridFunction, NumError> {
    Ok(kdv_evolve_with(v0, t_final, steps, Scheme::IntegratingFactor, None)?.final_state)
}

/// Full control over scheme and snapshot cadence (every `snapshot_every` steps).
pub fn kdv_evolve_with(
    v0: &GridFunction,
    t_final: f64,
    steps: usize,
    scheme: Scheme,
    snapshot_every: Option<usize>,
) -> Result<KdvRun, NumError> {
    if steps == 0 {
        return Err(NumError::StepUnderflow { step: 0.0 });
    }
    let sp = Spectral::new(v0.len(), v0.dx);
    let dt = t_final / steps as f64;
    let limit = stable_step(&sp, v0.max_abs(), scheme);
    if dt.abs() > limit {
        return Err(NumError::CflViolation {
            dt: dt.abs(),
            limit,
        });
    }

    let lin = sp.linear();
    let e_full: Vec<Complex64> = lin.iter().map(|l| (l * dt).exp()).collect();
    let e_half: Vec<Complex64> = lin.iter().map(|l| (l * (dt / 2.0)).exp()).collect();
    let mut hat = sp.to_fourier(&v0.values);
    let mut snapshots = Vec::new();
    if snapshot_every.is_some() {
        snapshots.push((0.0, v0.clone()));
    }

    let n = hat.len();
    for step in 1..=steps {
        hat = match scheme {
            Scheme::IntegratingFactor => {
                let k1 = sp.nonlinear(&hat);
                let a: Vec<Complex64> = (0..n)
                    .map(|j| e_half[j] * (hat[j] + k1[j] * (dt / 2.0)))
                    .collect();
                let k2 = sp.nonlinear(&a);
                let b: Vec<Complex64> = (0..n)
                    .map(|j| e_half[j] * hat[j] + k2[j] * (dt / 2.0))
                    .collect();
                let k3 = sp.nonlinear(&b);
                let c: Vec<Complex64> = (0..n)
                    .map(|j| e_full[j] * hat[j] + e_half[j] * k3[j] * dt)
                    .collect();
                let k4 = sp.nonlinear(&c);
                (0..n)
                    .map(|j| {
                        e_full[j] * hat[j]
                            + (e_full[j] * k1[j] + e_half[j] * (k2[j] + k3[j]) * 2.0 + k4[j])
                                * (dt / 6.0)
                    })
                    .collect()
            }
            Scheme::MethodOfLines => {
                let rhs = |v: &[Complex64]| -> Vec<Complex64> {
                    let nl = sp.nonlinear(v);
                    (0..n).map(|j| lin[j] * v[j] + nl[j]).collect()
                };
                let axpy = |v: &[Complex64], k: &[Complex64], a: f64| -> Vec<Complex64> {
                    (0..n).map(|j| v[j] + k[j] * a).collect()
                };
                let k1 = rhs(&hat);
                let k2 = rhs(&axpy(&hat, &k1, dt / 2.0));
                let k3 = rhs(&axpy(&hat, &k2, dt / 2.0));
                let k4 = rhs(&axpy(&hat, &k3, dt));
                (0..n)
                    .map(|j| hat[j] + (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (dt / 6.0))
                    .collect()
            }
        };
        if hat.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(NumError::NonFinite {
                at: dt * step as f64,
            });
        }
        if let Some(every) = snapshot_every {
            if step % every.max(1) == 0 || step == steps {
                let state = GridFunction::new(v0.x0, v0.dx, sp.to_physical(&hat))?;
                snapshots.push((dt * step as f64, state));
            }
        }
    }

    let final_state = GridFunction::new(v0.x0, v0.dx, sp.to_physical(&hat))?;
    let mass = |g: &GridFunction| g.values.iter().sum::<f64>() * g.dx;
    Ok(KdvRun {
        mass_initial: mass(v0),
        mass_final: mass(&final_state),
        final_state,
        snapshots,
        dt,
    })
}

/// `V(x, t) = A sech^2(b (x - c t))` with `c = b^2`, `A = -2 b^2`.
pub fn soliton(b: f64, x: f64, t: f64) -> f64 {
    let s = 1.0 / (b * (x - b * b * t)).cosh();
    -2.0 * b * b * s * s
}
