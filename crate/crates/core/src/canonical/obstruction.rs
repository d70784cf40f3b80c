use serde::{Deserialize, Serialize};

use super::{top_coefficient_forcing, CanonicalError};
use crate::numlab::{fd, HamiltonianGrid, NumError};

/// Outcome of the degree-`n` obstruction check on a sampled Hamiltonian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub degree: usize,
    /// `A_n`, `C_n`, `D_n` in terms of `K`.
    pub forced_top: [String; 3],
    /// Symbolic replay: the forced coefficients solve the top identities and give the K equation.
    pub symbolic_ok: bool,
    #[serde(rename = "K_profile")]
    pub k_profile: Vec<f64>,
    /// Pointwise `Δ_x K + 2 Δ K_x` with finite-difference derivatives.
    pub residual_profile: Vec<f64>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub degenerate_points: Vec<usize>,
    pub verdict: String,
    pub consistent: bool,
}

/// Checks the necessary condition `K = Δ^{-1/2}` for a degree-`n` flow on `grid`.
///
/// Whether `Δ^{-1/2}` is a differential polynomial in `f, g, h` is left to the caller;
/// the verdict only states what a flow would force.
pub fn obstruction_check(
    grid: &HamiltonianGrid,
    n: usize,
    tol: f64,
) -> Result<ObstructionReport, CanonicalError> {
    let forcing = top_coefficient_forcing(n)?;
    if grid.len() < 3 {
        return Err(
            NumError::InvalidGrid("obstruction check needs at least 3 samples".into()).into(),
        );
    }
    let delta = grid.determinant();
    let degenerate: Vec<usize> = delta
        .iter()
        .enumerate()
        .filter(|(_, d)| **d <= 0.0)
        .map(|(i, _)| i)
        .collect();
    if !degenerate.is_empty() {
        return Err(CanonicalError::DegenerateDeterminant {
            indices: degenerate,
        });
    }

    let k: Vec<f64> = delta.iter().map(|d| 1.0 / d.sqrt()).collect();
    let delta_x = fd::derivative(&delta, grid.dx);
    let k_x = fd::derivative(&k, grid.dx);
    let residual_profile: Vec<f64> = (0..k.len())
        .map(|i| delta_x[i] * k[i] + 2.0 * delta[i] * k_x[i])
        .collect();
    let max_residual = residual_profile.iter().fold(0.0_f64, |m, r| m.max(r.abs()));

    let symbolic_ok = forcing.identities_hold() && forcing.k_equation_matches();
    let consistent = symbolic_ok && max_residual < tol;
    let verdict = if consistent {
        format!("flow of degree {n} forces K = kappa * Delta^(-1/2)")
    } else {
        format!(
            "inconsistent: K = Delta^(-1/2) leaves residual {max_residual:e} (tolerance {tol:e})"
        )
    };
    Ok(ObstructionReport {
        degree: n,
        forced_top: ["g*K".into(), "h*K".into(), "f*K".into()],
        symbolic_ok,
        k_profile: k,
        residual_profile,
        max_residual,
        tolerance: tol,
        degenerate_points: Vec::new(),
        verdict,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_identity() {
        let grid = HamiltonianGrid::on_interval(-1.0, 1.0, 0.01, |_| [0.5, 0.0, 0.5]).unwrap();
        let r = obstruction_check(&grid, 2, 1e-4).unwrap();
        assert!(r.k_profile.iter().all(|k| *k == 2.0));
        assert_eq!(r.max_residual, 0.0);
        assert!(r.consistent);
        assert_eq!(
            r.verdict,
            "flow of degree 2 forces K = kappa * Delta^(-1/2)"
        );
    }

    #[test]
    fn growing_entry() {
        let grid =
            HamiltonianGrid::on_interval(-2.0, 2.0, 1e-3, |x| [1.0 + x * x, 0.0, 1.0]).unwrap();
        let r = obstruction_check(&grid, 3, 1e-4).unwrap();
        for (i, k) in r.k_profile.iter().enumerate() {
            let x = grid.x(i);
            assert!((k - 1.0 / (1.0 + x * x).sqrt()).abs() < 1e-14);
        }
        assert!(r.max_residual < 1e-5, "{}", r.max_residual);
    }

    #[test]
    fn degenerate_points_listed() {
        let grid = HamiltonianGrid::on_interval(0.0, 1.0, 0.25, |x| {
            [1.0, 0.0, if x < 0.6 { 0.0 } else { 1.0 }]
        })
        .unwrap();
        match obstruction_check(&grid, 2, 1e-4) {
            Err(CanonicalError::DegenerateDeterminant { indices }) => {
                assert_eq!(indices, vec![0, 1, 2])
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degree_one_rejected() {
        let grid = HamiltonianGrid::on_interval(0.0, 1.0, 0.25, |_| [1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            obstruction_check(&grid, 1, 1e-4),
            Err(CanonicalError::DegreeTooLow(1))
        ));
    }
}
