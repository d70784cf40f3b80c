use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Complex 2x2 matrix. Transfer matrices have unit determinant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferMatrix {
    pub m: [[Complex64; 2]; 2],
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl TransferMatrix {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        TransferMatrix {
            m: [[a, b], [c, d]],
        }
    }

    pub fn real(a: f64, b: f64, cc: f64, d: f64) -> Self {
        TransferMatrix::new(c(a), c(b), c(cc), c(d))
    }

    pub fn identity() -> Self {
        TransferMatrix::real(1.0, 0.0, 0.0, 1.0)
    }

    pub fn zero() -> Self {
        TransferMatrix::real(0.0, 0.0, 0.0, 0.0)
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let m = &self.m;
        TransferMatrix::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    /// Inverse of a unit-determinant matrix, up to the determinant factor.
    pub fn adjugate(&self) -> Self {
        let m = &self.m;
        TransferMatrix::new(m[1][1], -m[0][1], -m[1][0], m[0][0])
    }

    pub fn inverse(&self) -> Self {
        self.adjugate().scale(self.det().inv())
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.m;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    /// Largest entrywise modulus.
    pub fn max_norm(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn distance(&self, other: &TransferMatrix) -> f64 {
        (*self - *other).max_norm()
    }

    pub fn is_finite(&self) -> bool {
        self.m
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `exp(B)` for trace-free `B`, via `B^2 = -det(B) I`.
    pub fn exp_traceless(&self) -> Self {
        let mu = (-self.det()).sqrt();
        let (cosh, sinhc) = if mu.norm() < 1e-6 {
            let mu2 = mu * mu;
            (
                c(1.0) + mu2 / 2.0 + mu2 * mu2 / 24.0,
                c(1.0) + mu2 / 6.0 + mu2 * mu2 / 120.0,
            )
        } else {
            (mu.cosh(), mu.sinh() / mu)
        };
        TransferMatrix::identity().scale(cosh) + self.scale(sinhc)
    }
}

impl Add for TransferMatrix {
    type Output = TransferMatrix;
    fn add(self, r: TransferMatrix) -> TransferMatrix {
        let (a, b) = (&self.m, &r.m);
        TransferMatrix::new(
            a[0][0] + b[0][0],
            a[0][1] + b[0][1],
            a[1][0] + b[1][0],
            a[1][1] + b[1][1],
        )
    }
}

impl Sub for TransferMatrix {
    type Output = TransferMatrix;
    fn sub(self, r: TransferMatrix) -> TransferMatrix {
        self + r.scale(c(-1.0))
    }
}

impl Mul for TransferMatrix {
    type Output = TransferMatrix;
    fn mul(self, r: TransferMatrix) -> TransferMatrix {
        let (a, b) = (&self.m, &r.m);
        TransferMatrix::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Mul<f64> for TransferMatrix {
    type Output = TransferMatrix;
    fn mul(self, s: f64) -> TransferMatrix {
        self.scale(c(s))
    }
}
