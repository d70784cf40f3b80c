use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use super::flow::FlowRule;
use super::poly::DiffPoly;
use super::DiffPolyError;

/// Polynomial in the spectral parameter `z` with differential-polynomial coefficients.
///
/// `coeffs[k]` multiplies `z^k`; trailing zero coefficients are trimmed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ZDiffPoly {
    coeffs: Vec<DiffPoly>,
}

impl ZDiffPoly {
    pub fn zero() -> Self {
        ZDiffPoly::default()
    }

    pub fn z() -> Self {
        ZDiffPoly::from_coeffs(vec![DiffPoly::zero(), DiffPoly::one()])
    }

    pub fn constant(c: DiffPoly) -> Self {
        ZDiffPoly::from_coeffs(vec![c])
    }

    pub fn from_coeffs(coeffs: Vec<DiffPoly>) -> Self {
        let mut p = ZDiffPoly { coeffs };
        p.trim();
        p
    }

    /// `c * z^k`.
    pub fn monomial(c: DiffPoly, k: usize) -> Self {
        let mut coeffs = vec![DiffPoly::zero(); k];
        coeffs.push(c);
        ZDiffPoly::from_coeffs(coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(DiffPoly::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest power with a nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[DiffPoly] {
        &self.coeffs
    }

    /// Coefficient of `z^k` (zero beyond the degree).
    pub fn zcoeff(&self, k: usize) -> DiffPoly {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn map(&self, f: impl Fn(&DiffPoly) -> DiffPoly) -> ZDiffPoly {
        ZDiffPoly::from_coeffs(self.coeffs.iter().map(f).collect())
    }

    pub fn try_map<E>(&self, f: impl Fn(&DiffPoly) -> Result<DiffPoly, E>) -> Result<ZDiffPoly, E> {
        Ok(ZDiffPoly::from_coeffs(
            self.coeffs.iter().map(f).collect::<Result<_, _>>()?,
        ))
    }

    pub fn zdx(&self) -> ZDiffPoly {
        self.map(DiffPoly::dx)
    }

    pub fn zdx_n(&self, n: u32) -> ZDiffPoly {
        self.map(|c| c.dx_n(n))
    }

    pub fn zdt(&self, flow: &FlowRule) -> Result<ZDiffPoly, DiffPolyError> {
        self.try_map(|c| flow.dt(c))
    }

    /// Multiplies every coefficient by a z-independent polynomial.
    pub fn scale(&self, c: &DiffPoly) -> ZDiffPoly {
        self.map(|k| k * c)
    }

    /// Coefficients rendered in the text format, keyed by power of z.
    pub fn to_text_map(&self) -> BTreeMap<usize, String> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k, c.to_string()))
            .collect()
    }

    /// Numeric value at a complex spectral parameter.
    pub fn eval(
        &self,
        z: num_complex::Complex64,
        mut value: impl FnMut(&super::Var) -> Option<f64>,
    ) -> Result<num_complex::Complex64, DiffPolyError> {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c.eval(&mut value)?;
        }
        Ok(acc)
    }
}

impl From<DiffPoly> for ZDiffPoly {
    fn from(c: DiffPoly) -> Self {
        ZDiffPoly::constant(c)
    }
}

impl Add for &ZDiffPoly {
    type Output = ZDiffPoly;
    fn add(self, rhs: &ZDiffPoly) -> ZDiffPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ZDiffPoly::from_coeffs(
            (0..n)
                .map(|k| match (self.coeffs.get(k), rhs.coeffs.get(k)) {
                    (Some(a), Some(b)) => a + b,
                    (Some(a), None) => a.clone(),
                    (None, Some(b)) => b.clone(),
                    (None, None) => DiffPoly::zero(),
                })
                .collect(),
        )
    }
}

impl Neg for &ZDiffPoly {
    type Output = ZDiffPoly;
    fn neg(self) -> ZDiffPoly {
        self.map(|c| -c)
    }
}

impl Sub for &ZDiffPoly {
    type Output = ZDiffPoly;
    fn sub(self, rhs: &ZDiffPoly) -> ZDiffPoly {
        self + &(-rhs)
    }
}

impl Mul for &ZDiffPoly {
    type Output = ZDiffPoly;
    fn mul(self, rhs: &ZDiffPoly) -> ZDiffPoly {
        if self.is_zero() || rhs.is_zero() {
            return ZDiffPoly::zero();
        }
        let mut coeffs = vec![DiffPoly::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        ZDiffPoly::from_coeffs(coeffs)
    }
}

macro_rules! owned_ops {
    ($tr:ident, $method:ident) => {
        impl $tr<ZDiffPoly> for ZDiffPoly {
            type Output = ZDiffPoly;
            fn $method(self, rhs: ZDiffPoly) -> ZDiffPoly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&ZDiffPoly> for ZDiffPoly {
            type Output = ZDiffPoly;
            fn $method(self, rhs: &ZDiffPoly) -> ZDiffPoly {
                (&self).$method(rhs)
            }
        }
        impl $tr<ZDiffPoly> for &ZDiffPoly {
            type Output = ZDiffPoly;
            fn $method(self, rhs: ZDiffPoly) -> ZDiffPoly {
                self.$method(&rhs)
            }
        }
    };
}

owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for ZDiffPoly {
    type Output = ZDiffPoly;
    fn neg(self) -> ZDiffPoly {
        -&self
    }
}

pub fn zadd(a: &ZDiffPoly, b: &ZDiffPoly) -> ZDiffPoly {
    a + b
}

pub fn zmul(a: &ZDiffPoly, b: &ZDiffPoly) -> ZDiffPoly {
    a * b
}

pub fn zdx(p: &ZDiffPoly) -> ZDiffPoly {
    p.zdx()
}

pub fn zdt(p: &ZDiffPoly, flow: &FlowRule) -> Result<ZDiffPoly, DiffPolyError> {
    p.zdt(flow)
}

pub fn zcoeff(p: &ZDiffPoly, k: usize) -> DiffPoly {
    p.zcoeff(k)
}

/// 2x2 matrix over `ZDiffPoly`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ZMatrix2 {
    pub entries: [[ZDiffPoly; 2]; 2],
}

impl ZMatrix2 {
    pub fn new(a: ZDiffPoly, b: ZDiffPoly, c: ZDiffPoly, d: ZDiffPoly) -> Self {
        ZMatrix2 {
            entries: [[a, b], [c, d]],
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn get(&self, i: usize, j: usize) -> &ZDiffPoly {
        &self.entries[i][j]
    }

    pub fn map(&self, f: impl Fn(&ZDiffPoly) -> ZDiffPoly) -> ZMatrix2 {
        let e = &self.entries;
        ZMatrix2::new(f(&e[0][0]), f(&e[0][1]), f(&e[1][0]), f(&e[1][1]))
    }

    pub fn try_map<E>(
        &self,
        f: impl Fn(&ZDiffPoly) -> Result<ZDiffPoly, E>,
    ) -> Result<ZMatrix2, E> {
        let e = &self.entries;
        Ok(ZMatrix2::new(
            f(&e[0][0])?,
            f(&e[0][1])?,
            f(&e[1][0])?,
            f(&e[1][1])?,
        ))
    }

    pub fn zdx(&self) -> ZMatrix2 {
        self.map(ZDiffPoly::zdx)
    }

    pub fn zdt(&self, flow: &FlowRule) -> Result<ZMatrix2, DiffPolyError> {
        self.try_map(|p| p.zdt(flow))
    }

    pub fn trace(&self) -> ZDiffPoly {
        &self.entries[0][0] + &self.entries[1][1]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(ZDiffPoly::is_zero)
    }

    pub fn add(&self, rhs: &ZMatrix2) -> ZMatrix2 {
        let (a, b) = (&self.entries, &rhs.entries);
        ZMatrix2::new(
            &a[0][0] + &b[0][0],
            &a[0][1] + &b[0][1],
            &a[1][0] + &b[1][0],
            &a[1][1] + &b[1][1],
        )
    }

    pub fn sub(&self, rhs: &ZMatrix2) -> ZMatrix2 {
        self.add(&rhs.map(|p| -p))
    }

    pub fn mul(&self, rhs: &ZMatrix2) -> ZMatrix2 {
        let (a, b) = (&self.entries, &rhs.entries);
        let entry = |i: usize, j: usize| &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j]);
        ZMatrix2::new(entry(0, 0), entry(0, 1), entry(1, 0), entry(1, 1))
    }

    /// `self * rhs - rhs * self`.
    pub fn commutator(&self, rhs: &ZMatrix2) -> ZMatrix2 {
        self.mul(rhs).sub(&rhs.mul(self))
    }
}
