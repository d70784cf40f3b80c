//! Bound states of `-y'' + V y = E y` with Dirichlet edges.
//!
//! The three-point discretisation gives a symmetric tridiagonal matrix. Eigenvalues
//! below the continuum edge `min(V(lo), V(hi))` are isolated by Sturm-sequence
//! bisection; eigenvectors come from inverse iteration and are used to check how
//! much mass sits near the edges of the window.

use serde::{Deserialize, Serialize};

use super::grid::GridFunction;
use super::NumError;

/// Fraction of the window on each side counted as "edge".
const EDGE_FRACTION: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundStates {
    /// Eigenvalues on the input grid, ascending.
    pub eigenvalues: Vec<f64>,
    /// Eigenvalues on the grid with twice the spacing.
    pub coarse: Vec<f64>,
    /// Richardson extrapolation of the two resolutions.
    pub extrapolated: Vec<f64>,
    /// `|E_h - E_2h| / 3` per eigenvalue.
    pub error_estimates: Vec<f64>,
    pub threshold: f64,
    /// Squared-norm fraction of each eigenvector in the edge strips.
    pub edge_mass: Vec<f64>,
}

struct Tridiagonal {
    diag: Vec<f64>,
    off: f64,
}

impl Tridiagonal {
    fn from_grid(values: &[f64], dx: f64) -> Self {
        let h2 = dx * dx;
        let interior = &values[1..values.len() - 1];
        Tridiagonal {
            diag: interior.iter().map(|v| 2.0 / h2 + v).collect(),
            off: -1.0 / h2,
        }
    }

    /// Number of eigenvalues strictly below `lambda`.
    fn count_below(&self, lambda: f64) -> usize {
        let e2 = self.off * self.off;
        let mut count = 0;
        let mut q = 1.0;
        for (i, d) in self.diag.iter().enumerate() {
            q = if i == 0 {
                d - lambda
            } else {
                d - lambda - e2 / q
            };
            if q == 0.0 {
                q = -f64::EPSILON * (d.abs() + self.off.abs());
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn eigenvalue(&self, index: usize, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-14 * lo.abs().max(hi.abs()).max(1.0) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    fn lower_bound(&self) -> f64 {
        self.diag.iter().fold(f64::INFINITY, |m, d| m.min(*d)) - 2.0 * self.off.abs()
    }

    /// Solves `(T - shift) x = b` by the Thomas algorithm.
    fn solve_shifted(&self, shift: f64, b: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let e = self.off;
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let guard = |p: f64| if p.abs() < 1e-300 { 1e-300 } else { p };
        let mut pivot = guard(self.diag[0] - shift);
        c[0] = e / pivot;
        d[0] = b[0] / pivot;
        for i in 1..n {
            pivot = guard(self.diag[i] - shift - e * c[i - 1]);
            c[i] = e / pivot;
            d[i] = (b[i] - e * d[i - 1]) / pivot;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = d[i] - c[i] * x[i + 1];
        }
        x
    }

    fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.diag.len();
        let mut x = vec![1.0 / (n as f64).sqrt(); n];
        let shift = lambda + 1e-10 * lambda.abs().max(1.0);
        for _ in 0..4 {
            x = self.solve_shifted(shift, &x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
        }
        x
    }
}

fn eigenvalues_below(t: &Tridiagonal, threshold: f64, count: usize) -> Vec<f64> {
    let available = t.count_below(threshold).min(count);
    let lo = t.lower_bound();
    (0..available)
        .map(|j| t.eigenvalue(j, lo, threshold))
        .collect()
}

fn edge_mass(vector: &[f64]) -> f64 {
    let n = vector.len();
    let strip = ((n as f64 * EDGE_FRACTION).ceil() as usize).max(1);
    let total: f64 = vector.iter().map(|v| v * v).sum();
    let edges: f64 = vector[..strip]
        .iter()
        .chain(&vector[n - strip..])
        .map(|v| v * v)
        .sum();
    edges / total
}

/// Lowest `count` bound states with default edge tolerance `1e-6`.
pub fn bound_states(v: &GridFunction, count: usize) -> Result<BoundStates, NumError> {
    bound_states_with(v, count, 1e-6)
}

pub fn bound_states_with(
    v: &GridFunction,
    count: usize,
    edge_tol: f64,
) -> Result<BoundStates, NumError> {
    if v.len() < 9 {
        return Err(NumError::InvalidGrid(
            "bound states need at least 9 samples".into(),
        ));
    }
    let values = &v.values;
    let threshold = values[0].min(values[values.len() - 1]);

    let fine = Tridiagonal::from_grid(values, v.dx);
    let eigenvalues = eigenvalues_below(&fine, threshold, count);

    let coarse_values: Vec<f64> = values.iter().step_by(2).copied().collect();
    let coarse = eigenvalues_below(
        &Tridiagonal::from_grid(&coarse_values, 2.0 * v.dx),
        threshold,
        count,
    );

    let mut masses = Vec::with_capacity(eigenvalues.len());
    for &e in &eigenvalues {
        let mass = edge_mass(&fine.eigenvector(e));
        if mass > edge_tol {
            return Err(NumError::WindowTooSmall {
                edge_mass: mass,
                tol: edge_tol,
            });
        }
        masses.push(mass);
    }

    let (extrapolated, error_estimates) = eigenvalues
        .iter()
        .enumerate()
        .map(|(j, &e)| match coarse.get(j) {
            Some(&c) => (e + (e - c) / 3.0, (e - c).abs() / 3.0),
            None => (e, f64::INFINITY),
        })
        .unzip();

    Ok(BoundStates {
        eigenvalues,
        coarse,
        extrapolated,
        error_estimates,
        threshold,
        edge_mass: masses,
    })
}
