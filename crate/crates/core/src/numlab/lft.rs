//! Möbius action of 2x2 matrices on the Riemann sphere.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::TransferMatrix;

/// A point of `C ∪ {∞}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ExtComplex {
    Finite(Complex64),
    Infinity,
}

impl ExtComplex {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            ExtComplex::Finite(z) => Some(z),
            ExtComplex::Infinity => None,
        }
    }

    /// Homogeneous coordinates `[w : 1]` or `[1 : 0]`.
    fn projective(self) -> [Complex64; 2] {
        match self {
            ExtComplex::Finite(z) => [z, Complex64::new(1.0, 0.0)],
            ExtComplex::Infinity => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        }
    }

    fn from_projective([num, den]: [Complex64; 2]) -> ExtComplex {
        if den == Complex64::new(0.0, 0.0) {
            ExtComplex::Infinity
        } else {
            ExtComplex::Finite(num / den)
        }
    }

    /// Chordal distance on the Riemann sphere, bounded by 1.
    pub fn chordal_distance(self, other: ExtComplex) -> f64 {
        let [a0, a1] = self.projective();
        let [b0, b1] = other.projective();
        let cross = (a0 * b1 - a1 * b0).norm();
        let na = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        let nb = (b0.norm_sqr() + b1.norm_sqr()).sqrt();
        cross / (na * nb)
    }
}

impl From<Complex64> for ExtComplex {
    fn from(z: Complex64) -> Self {
        ExtComplex::Finite(z)
    }
}

impl fmt::Display for ExtComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtComplex::Finite(z) => write!(f, "{z}"),
            ExtComplex::Infinity => f.write_str("inf"),
        }
    }
}

/// `(a z + b) / (c z + d)`, with `-d/c ↦ ∞` and `∞ ↦ a/c`.
pub fn lft_apply(t: &TransferMatrix, z: ExtComplex) -> ExtComplex {
    ExtComplex::from_projective(t.apply(z.projective()))
}
