use num_complex::Complex64;

use super::CanonicalError;
use crate::numlab::{
    fd, ode::magnus4, schrodinger_generator, GridFunction, HamiltonianGrid, TransferMatrix,
};

/// Largest solution magnitude the zero-energy solver accepts.
pub const OVERFLOW_CAP: f64 = 1e100;

/// Hamiltonian `H^V = [[u^2, u v], [u v, v^2]]` built from zero-energy solutions of `-y'' + V y = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Conversion {
    pub hamiltonian: HamiltonianGrid,
    pub u: Vec<f64>,
    pub u_x: Vec<f64>,
    pub v: Vec<f64>,
    pub v_x: Vec<f64>,
    /// `max |u v' - u' v - 1|`.
    pub wronskian_error: f64,
    /// `det(H^V_xx)` from the solution data, i.e. `4 V (u v' - u' v)^2`.
    pub det_xx: Vec<f64>,
    /// `sup |det(H^V_xx) - 4V|` on the grid.
    pub det_residual: f64,
    /// The same quantity with `H^V_xx` from second differences, over interior points.
    pub fd_det_residual: f64,
}

/// Integrates `u'' = V u`, `v'' = V v` with `(u, u')(0) = (1, 0)`, `(v, v')(0) = (0, 1)`.
///
/// The origin must be a grid point. One Magnus step per grid cell, `V` interpolated at the Gauss nodes.
pub fn schrodinger_to_hamiltonian(v: &GridFunction) -> Result<Conversion, CanonicalError> {
    let origin = v.index_of(0.0).ok_or(CanonicalError::NotOnGrid(0.0))?;
    let n = v.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut states = vec![TransferMatrix::identity(); n];

    let advance =
        |from: usize, to: usize, states: &mut Vec<TransferMatrix>| -> Result<(), CanonicalError> {
            let next = magnus4(
                |x| Ok(schrodinger_generator(v.at(x)?, zero)),
                v.x(from),
                v.x(to),
                1,
                states[from],
            )?;
            if next.max_norm() > OVERFLOW_CAP {
                return Err(CanonicalError::SolverOverflow {
                    x: v.x(to),
                    cap: OVERFLOW_CAP,
                });
            }
            states[to] = next;
            Ok(())
        };
    for i in origin..n - 1 {
        advance(i, i + 1, &mut states)?;
    }
    for i in (1..=origin).rev() {
        advance(i, i - 1, &mut states)?;
    }

    // columns of the transfer matrix are (u, u') and (v, v')
    let u: Vec<f64> = states.iter().map(|t| t.m[0][0].re).collect();
    let u_x: Vec<f64> = states.iter().map(|t| t.m[1][0].re).collect();
    let w: Vec<f64> = states.iter().map(|t| t.m[0][1].re).collect();
    let w_x: Vec<f64> = states.iter().map(|t| t.m[1][1].re).collect();

    let wronskian: Vec<f64> = (0..n).map(|i| u[i] * w_x[i] - u_x[i] * w[i]).collect();
    let wronskian_error = wronskian
        .iter()
        .fold(0.0_f64, |m, x| m.max((x - 1.0).abs()));
    let det_xx: Vec<f64> = (0..n)
        .map(|i| 4.0 * v.values[i] * wronskian[i] * wronskian[i])
        .collect();
    let det_residual = (0..n).fold(0.0_f64, |m, i| m.max((det_xx[i] - 4.0 * v.values[i]).abs()));

    let f: Vec<f64> = u.iter().map(|a| a * a).collect();
    let g: Vec<f64> = u.iter().zip(&w).map(|(a, b)| a * b).collect();
    let h: Vec<f64> = w.iter().map(|b| b * b).collect();
    let fd_det_residual = if n >= 4 {
        let (fxx, gxx, hxx) = (
            fd::second_derivative(&f, v.dx),
            fd::second_derivative(&g, v.dx),
            fd::second_derivative(&h, v.dx),
        );
        (1..n - 1).fold(0.0_f64, |m, i| {
            m.max((fxx[i] * hxx[i] - gxx[i] * gxx[i] - 4.0 * v.values[i]).abs())
        })
    } else {
        0.0
    };

    Ok(Conversion {
        hamiltonian: HamiltonianGrid::new(v.x0, v.dx, f, g, h)?,
        u,
        u_x,
        v: w,
        v_x: w_x,
        wronskian_error,
        det_xx,
        det_residual,
        fd_det_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_potential() {
        let v = GridFunction::on_interval(-2.0, 2.0, 0.01, |_| 0.0).unwrap();
        let c = schrodinger_to_hamiltonian(&v).unwrap();
        for i in 0..v.len() {
            let x = v.x(i);
            assert!((c.u[i] - 1.0).abs() < 1e-14);
            assert!((c.v[i] - x).abs() < 1e-12);
            assert!((c.hamiltonian.h[i] - x * x).abs() < 1e-12);
        }
        assert_eq!(c.det_residual, 0.0);
        assert!(c.fd_det_residual < 1e-8);
        assert!(c.hamiltonian.determinant().iter().all(|d| d.abs() < 1e-12));
    }

    #[test]
    fn unit_potential() {
        let v = GridFunction::on_interval(-3.0, 3.0, 1e-3, |_| 1.0).unwrap();
        let c = schrodinger_to_hamiltonian(&v).unwrap();
        for i in (0..v.len()).step_by(500) {
            let x = v.x(i);
            assert!((c.u[i] - x.cosh()).abs() < 1e-10 * x.cosh());
            assert!((c.v[i] - x.sinh()).abs() < 1e-10 * x.cosh());
        }
        assert!(c.wronskian_error < 1e-10);
        assert!(c.det_residual < 1e-9);
        assert!(c.fd_det_residual < 1e-2, "{}", c.fd_det_residual);
    }

    #[test]
    fn origin_must_be_on_grid() {
        let v = GridFunction::new(0.05, 0.1, vec![0.0; 10]).unwrap();
        assert!(matches!(
            schrodinger_to_hamiltonian(&v),
            Err(CanonicalError::NotOnGrid(_))
        ));
    }

    #[test]
    fn overflow_reported() {
        let v = GridFunction::on_interval(-1.0, 400.0, 0.05, |_| 4.0).unwrap();
        assert!(matches!(
            schrodinger_to_hamiltonian(&v),
            Err(CanonicalError::SolverOverflow { .. })
        ));
    }
}
