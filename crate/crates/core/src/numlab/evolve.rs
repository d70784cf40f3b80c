//! Time transfer matrices `T' = B(t) T` and the cocycle checks built on them.

use num_complex::Complex64;

use super::matrix::TransferMatrix;
use super::ode::{magnus4, rk4, steps_for};
use super::transfer::canonical_generator;
use super::NumError;
use crate::diffpoly::Var;
use crate::kdv::BMatrix;

/// Largest accepted `|trace B|`.
pub const TRACE_TOLERANCE: f64 = 1e-12;

fn checked(b: TransferMatrix, t: f64) -> Result<TransferMatrix, NumError> {
    let trace = b.trace().norm();
    if trace > TRACE_TOLERANCE {
        return Err(NumError::NonZeroTrace { t, trace });
    }
    if !b.is_finite() {
        return Err(NumError::NonFinite { at: t });
    }
    Ok(b)
}

/// Solves `T' = B(s) T` from `t0` to `t0 + t` with `T(t0) = I`.
pub fn evolve_time_from<B>(
    mut b_eval: B,
    t0: f64,
    t: f64,
    steps: usize,
) -> Result<TransferMatrix, NumError>
where
    B: FnMut(f64) -> Result<TransferMatrix, NumError>,
{
    rk4(
        |s| checked(b_eval(s)?, s),
        t0,
        t0 + t,
        steps,
        TransferMatrix::identity(),
    )
}

/// Solves `T' = B(s) T` on `[0, t]` with `T(0) = I`.
pub fn evolve_time<B>(b_eval: B, t: f64, steps: usize) -> Result<TransferMatrix, NumError>
where
    B: FnMut(f64) -> Result<TransferMatrix, NumError>,
{
    evolve_time_from(b_eval, 0.0, t, steps)
}

/// `T(t1 + t2; L) - T(t1; t2·L) T(t2; L)` in max-entry norm, where `b(s)` is `B(s·L)`.
pub fn cocycle_residual<B>(mut b: B, t1: f64, t2: f64, max_step: f64) -> Result<f64, NumError>
where
    B: FnMut(f64) -> Result<TransferMatrix, NumError>,
{
    let whole = evolve_time(&mut b, t1 + t2, steps_for(t1 + t2, max_step))?;
    let first = evolve_time(&mut b, t2, steps_for(t2, max_step))?;
    let second = evolve_time_from(&mut b, t2, t1, steps_for(t1, max_step))?;
    Ok(whole.distance(&(second * first)))
}

/// Numeric `B` of a hierarchy member at a given jet `(V, V_x, V_xx, ...)` and spectral parameter.
pub fn member_b_numeric(
    b: &BMatrix,
    jet: &[f64],
    z: Complex64,
) -> Result<TransferMatrix, NumError> {
    let value = |var: &Var| jet.get(var.order as usize).copied();
    let eval = |p: &crate::diffpoly::ZDiffPoly| {
        p.eval(z, value)
            .map_err(|e| NumError::Symbolic(e.to_string()))
    };
    let a = eval(&b.a)?;
    let c = eval(&b.c)?;
    let d = eval(&b.d)?;
    Ok(TransferMatrix::new(a, c, -d, -a))
}

/// Jets of `V` at a fixed point sampled at equally spaced times; linear in between.
#[derive(Clone, Debug, PartialEq)]
pub struct JetTrajectory {
    pub dt: f64,
    pub jets: Vec<Vec<f64>>,
}

impl JetTrajectory {
    pub fn constant(jet: Vec<f64>) -> Self {
        JetTrajectory {
            dt: 1.0,
            jets: vec![jet],
        }
    }

    pub fn duration(&self) -> f64 {
        self.dt * (self.jets.len().saturating_sub(1)) as f64
    }

    pub fn at(&self, t: f64) -> Result<Vec<f64>, NumError> {
        if self.jets.len() == 1 {
            return Ok(self.jets[0].clone());
        }
        let end = self.duration();
        if t < -1e-9 * self.dt || t > end + 1e-9 * self.dt {
            return Err(NumError::OutOfWindow {
                x: t,
                lo: 0.0,
                hi: end,
            });
        }
        let s = (t / self.dt).clamp(0.0, (self.jets.len() - 1) as f64);
        let i = (s.floor() as usize).min(self.jets.len() - 2);
        let w = s - i as f64;
        Ok(self.jets[i]
            .iter()
            .zip(&self.jets[i + 1])
            .map(|(a, b)| a * (1.0 - w) + b * w)
            .collect())
    }
}

/// Space-time Hamiltonian together with a time generator, for the joint `(x, t)` cocycle.
///
/// The joint transfer matrix based at `(x0, t0)` is
/// `T((x, t)) = T_t(t; (x0 + x, t0)) T_x(x; (x0, t0))`.
pub struct JointFlow<H, B> {
    pub z: Complex64,
    pub hamiltonian: H,
    pub generator: B,
    pub max_step: f64,
}

impl<H, B> JointFlow<H, B>
where
    H: Fn(f64, f64) -> Result<[f64; 3], NumError>,
    B: Fn(f64, f64) -> Result<TransferMatrix, NumError>,
{
    pub fn new(z: Complex64, hamiltonian: H, generator: B, max_step: f64) -> Self {
        JointFlow {
            z,
            hamiltonian,
            generator,
            max_step,
        }
    }

    pub fn x_transfer(&self, x: f64, base: (f64, f64)) -> Result<TransferMatrix, NumError> {
        let (x0, t0) = base;
        magnus4(
            |s| Ok(canonical_generator((self.hamiltonian)(s, t0)?, self.z)),
            x0,
            x0 + x,
            steps_for(x, self.max_step),
            TransferMatrix::identity(),
        )
    }

    pub fn t_transfer(&self, t: f64, base: (f64, f64)) -> Result<TransferMatrix, NumError> {
        let (x0, t0) = base;
        evolve_time_from(
            |s| (self.generator)(x0, s),
            t0,
            t,
            steps_for(t, self.max_step),
        )
    }

    pub fn joint(&self, shift: (f64, f64), base: (f64, f64)) -> Result<TransferMatrix, NumError> {
        let tx = self.x_transfer(shift.0, base)?;
        let tt = self.t_transfer(shift.1, (base.0 + shift.0, base.1))?;
        Ok(tt * tx)
    }
}

/// `T(g + h; H) - T(g; h·H) T(h; H)` for group elements `g, h` of `R x R`.
pub fn joint_cocycle_residual<H, B>(
    flow: &JointFlow<H, B>,
    g: (f64, f64),
    h: (f64, f64),
) -> Result<f64, NumError>
where
    H: Fn(f64, f64) -> Result<[f64; 3], NumError>,
    B: Fn(f64, f64) -> Result<TransferMatrix, NumError>,
{
    let whole = flow.joint((g.0 + h.0, g.1 + h.1), (0.0, 0.0))?;
    let first = flow.joint(h, (0.0, 0.0))?;
    let second = flow.joint(g, h)?;
    Ok(whole.distance(&(second * first)))
}

/// `-J H = [[g, h], [-f, -g]]`.
pub fn minus_j_h([f, g, h]: [f64; 3]) -> TransferMatrix {
    TransferMatrix::real(g, h, -f, -g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    use crate::kdv::build_hierarchy;

    #[test]
    fn zero_and_nilpotent() {
        let zero = evolve_time(|_| Ok(TransferMatrix::zero()), 1.3, 10).unwrap();
        assert_eq!(zero, TransferMatrix::identity());
        let t = 0.8;
        let nil = evolve_time(|_| Ok(TransferMatrix::real(0.0, 1.0, 0.0, 0.0)), t, 8).unwrap();
        assert!(nil.distance(&TransferMatrix::real(1.0, t, 0.0, 1.0)) < 1e-14);
    }

    #[test]
    fn rejects_trace() {
        let err =
            evolve_time(|_| Ok(TransferMatrix::real(1.0, 0.0, 0.0, 0.0)), 1.0, 4).unwrap_err();
        assert!(matches!(err, NumError::NonZeroTrace { .. }));
        assert!(matches!(
            evolve_time(|_| Ok(TransferMatrix::zero()), 1.0, 0),
            Err(NumError::StepUnderflow { .. })
        ));
    }

    #[test]
    fn cocycle_of_constant_generator() {
        let b = TransferMatrix::new(
            Complex64::new(0.2, 0.1),
            Complex64::new(1.0, -0.3),
            Complex64::new(-0.5, 0.0),
            Complex64::new(-0.2, -0.1),
        );
        assert_eq!(cocycle_residual(|_| Ok(b), 0.0, 0.0, 0.01).unwrap(), 0.0);
        assert_eq!(cocycle_residual(|_| Ok(b), 0.4, 0.0, 0.01).unwrap(), 0.0);
        assert!(cocycle_residual(|_| Ok(b), 0.37, 0.81, 0.01).unwrap() < 1e-10);
        let exact = (b * 1.18).exp_traceless();
        let numeric = evolve_time(|_| Ok(b), 1.18, 118).unwrap();
        assert!(numeric.distance(&exact) < 1e-10);
    }

    #[test]
    fn member_generator_on_constant_background() {
        let member = build_hierarchy(1, &BTreeMap::new()).unwrap();
        let z = Complex64::new(0.5, 0.5);
        let b = member_b_numeric(&member.b_matrix(), &[1.0, 0.0, 0.0], z).unwrap();
        // C = z + V/2, A = 0, D = -(V - z)(z + V/2)
        let c = z + 0.5;
        let d = -(Complex64::new(1.0, 0.0) - z) * c;
        assert!(b.distance(&TransferMatrix::new(0.0.into(), c, -d, 0.0.into())) < 1e-15);
    }

    #[test]
    fn jet_trajectory_interpolates() {
        let traj = JetTrajectory {
            dt: 0.5,
            jets: vec![vec![0.0, 1.0], vec![1.0, 1.0], vec![4.0, 0.0]],
        };
        assert_eq!(traj.at(0.25).unwrap(), vec![0.5, 1.0]);
        assert_eq!(traj.at(1.0).unwrap(), vec![4.0, 0.0]);
        assert!(traj.at(1.5).is_err());
    }

    #[test]
    fn joint_cocycle_static_degree_one() {
        let hm = [2.0, 0.3, 0.7];
        let z = Complex64::new(0.8, 0.3);
        let flow = JointFlow::new(
            z,
            |_, _| Ok(hm),
            move |_, _| Ok(minus_j_h(hm).scale(Complex64::new(0.4, 0.0) + z * 1.5)),
            0.01,
        );
        assert_eq!(
            joint_cocycle_residual(&flow, (0.0, 0.0), (0.0, 0.0)).unwrap(),
            0.0
        );
        assert!(joint_cocycle_residual(&flow, (0.3, 0.5), (-0.2, 0.4)).unwrap() < 1e-10);
    }
}
