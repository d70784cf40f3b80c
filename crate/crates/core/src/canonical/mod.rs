//! Zero-curvature equations of canonical systems `J u' = z H u`.
//!
//! With `M = z [[g, h], [-f, -g]]` and `B = [[A, C], [-D, -A]]`, the equation
//! `M_t - B_x = BM - MB` is equivalent to three scalar conditions, which can be
//! written as a singular linear system in `(A, C, D)`:
//!
//! ```text
//!   [[2h, -2g,   0],       [A]     [ z h_t - C_x]
//! z [[2f,   0, -2g],   *   [C]  =  [-z f_t + D_x]
//!   [[ 0,  -f,   h]]       [D]     [ z g_t - A_x]
//! ```
//!
//! Contracting with the left kernel vector `(f, -h, -2g)` leaves the consistency
//! condition `z Δ_t = f C_x + h D_x - 2g A_x` with `Δ = fh - g^2`. When the entries
//! of `B` have degree `n >= 2` in `z`, the top coefficients are forced to
//! `(A_n, C_n, D_n) = (g, h, f) K`, and then `Δ_x K + 2 Δ K_x = 0`, so `K = κ / sqrt(Δ)`.

mod convert;
mod obstruction;

pub use convert::{schrodinger_to_hamiltonian, Conversion};
pub use obstruction::{obstruction_check, ObstructionReport};

use crate::diffpoly::{DiffPoly, DiffPolyError, FlowRule, Symbol, ZDiffPoly, ZMatrix2};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CanonicalError {
    #[error("degree {0} is below 2; the top-coefficient argument needs n >= 2")]
    DegreeTooLow(usize),
    #[error("determinant f h - g^2 is not positive at grid indices {indices:?}")]
    DegenerateDeterminant { indices: Vec<usize> },
    #[error("zero-energy solution exceeded {cap:e} at x = {x}")]
    SolverOverflow { x: f64, cap: f64 },
    #[error("x = {0} is not a grid point")]
    NotOnGrid(f64),
    #[error(transparent)]
    Algebra(#[from] DiffPolyError),
    #[error(transparent)]
    Numeric(#[from] crate::numlab::NumError),
}

/// Hamiltonian `[[f, g], [g, h]]` with differential-polynomial entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicHamiltonian {
    pub f: DiffPoly,
    pub g: DiffPoly,
    pub h: DiffPoly,
}

pub fn field_f() -> Symbol {
    Symbol::field("f")
}

pub fn field_g() -> Symbol {
    Symbol::field("g")
}

pub fn field_h() -> Symbol {
    Symbol::field("h")
}

impl SymbolicHamiltonian {
    pub fn new(f: DiffPoly, g: DiffPoly, h: DiffPoly) -> Self {
        SymbolicHamiltonian { f, g, h }
    }

    /// The entries are the field symbols `f`, `g`, `h` themselves.
    pub fn generic() -> Self {
        SymbolicHamiltonian::new(
            DiffPoly::symbol(&field_f()),
            DiffPoly::symbol(&field_g()),
            DiffPoly::symbol(&field_h()),
        )
    }

    /// `Δ = f h - g^2`.
    pub fn delta(&self) -> DiffPoly {
        &self.f * &self.h - self.g.pow(2)
    }

    /// `z [[g, h], [-f, -g]]`.
    pub fn m_matrix(&self) -> ZMatrix2 {
        let zs = |p: &DiffPoly| ZDiffPoly::monomial(p.clone(), 1);
        ZMatrix2::new(zs(&self.g), zs(&self.h), zs(&-&self.f), zs(&-&self.g))
    }

    /// The matrix multiplying `z (A, C, D)`.
    pub fn coefficient_matrix(&self) -> [[DiffPoly; 3]; 3] {
        let two = DiffPoly::integer(2);
        let (f, g, h) = (&self.f, &self.g, &self.h);
        [
            [&two * h, -(&two * g), DiffPoly::zero()],
            [&two * f, DiffPoly::zero(), -(&two * g)],
            [DiffPoly::zero(), -f, h.clone()],
        ]
    }

    /// `(f, -h, -2g)`.
    pub fn left_kernel(&self) -> [DiffPoly; 3] {
        [self.f.clone(), -&self.h, -(DiffPoly::integer(2) * &self.g)]
    }
}

/// `det` of a 3x3 matrix by cofactor expansion.
pub fn det3(m: &[[DiffPoly; 3]; 3]) -> DiffPoly {
    let minor = |a: usize, b: usize| &m[1][a] * &m[2][b] - &m[1][b] * &m[2][a];
    &m[0][0] * &minor(1, 2) - &m[0][1] * &minor(0, 2) + &m[0][2] * &minor(0, 1)
}

/// Row vector times matrix.
pub fn row_times(v: &[DiffPoly; 3], m: &[[DiffPoly; 3]; 3]) -> [DiffPoly; 3] {
    std::array::from_fn(|j| (0..3).map(|i| &v[i] * &m[i][j]).sum())
}

/// Trace-free time generator `[[A, C], [-D, -A]]` of a canonical system.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CsBMatrix {
    pub a: ZDiffPoly,
    pub c: ZDiffPoly,
    pub d: ZDiffPoly,
}

impl CsBMatrix {
    pub fn new(a: ZDiffPoly, c: ZDiffPoly, d: ZDiffPoly) -> Self {
        CsBMatrix { a, c, d }
    }

    /// Entries with independent symbolic coefficients `A0..An`, `C0..Cn`, `D0..Dn`.
    pub fn generic(n: usize) -> Self {
        let entry = |name: &str| {
            ZDiffPoly::from_coeffs(
                (0..=n)
                    .map(|k| DiffPoly::symbol(&Symbol::field(&format!("{name}{k}"))))
                    .collect(),
            )
        };
        CsBMatrix::new(entry("A"), entry("C"), entry("D"))
    }

    pub fn matrix(&self) -> ZMatrix2 {
        ZMatrix2::new(self.a.clone(), self.c.clone(), -&self.d, -&self.a)
    }

    pub fn trace(&self) -> ZDiffPoly {
        self.matrix().trace()
    }

    pub fn degree(&self) -> Option<usize> {
        [self.a.degree(), self.c.degree(), self.d.degree()]
            .into_iter()
            .flatten()
            .max()
    }
}

/// Flow assigning `f_t`, `g_t`, `h_t` to fresh fields `ft`, `gt`, `ht`.
pub fn generic_flow() -> FlowRule {
    FlowRule::new()
        .assign(&field_f(), DiffPoly::symbol(&Symbol::field("ft")))
        .assign(&field_g(), DiffPoly::symbol(&Symbol::field("gt")))
        .assign(&field_h(), DiffPoly::symbol(&Symbol::field("ht")))
}

/// Flow with `f_t = g_t = h_t = 0`.
pub fn static_flow() -> FlowRule {
    FlowRule::zero([&field_f(), &field_g(), &field_h()])
}

fn z_times(p: DiffPoly) -> ZDiffPoly {
    ZDiffPoly::monomial(p, 1)
}

/// Right-hand side `(z h_t - C_x, -z f_t + D_x, z g_t - A_x)` of the matrix form.
pub fn matrix_rhs(
    b: &CsBMatrix,
    ham: &SymbolicHamiltonian,
    flow: &FlowRule,
) -> Result<[ZDiffPoly; 3], DiffPolyError> {
    let (ft, gt, ht) = (flow.dt(&ham.f)?, flow.dt(&ham.g)?, flow.dt(&ham.h)?);
    Ok([
        &z_times(ht) - &b.c.zdx(),
        &(-&z_times(ft)) + &b.d.zdx(),
        &z_times(gt) - &b.a.zdx(),
    ])
}

/// Left-hand side `z * coefficient_matrix * (A, C, D)`.
pub fn matrix_lhs(b: &CsBMatrix, ham: &SymbolicHamiltonian) -> [ZDiffPoly; 3] {
    let m = ham.coefficient_matrix();
    let unknowns = [&b.a, &b.c, &b.d];
    std::array::from_fn(|i| {
        let mut acc = ZDiffPoly::zero();
        for (j, u) in unknowns.iter().enumerate() {
            acc = &acc + &u.scale(&m[i][j]);
        }
        &ZDiffPoly::z() * &acc
    })
}

/// The three conditions as left-minus-right residuals:
///
/// ```text
/// z h_t - C_x - (2z h A - 2z g C)
/// -z f_t + D_x - (2z f A - 2z g D)
/// z g_t - A_x - (-z f C + z h D)
/// ```
pub fn cs_three_residuals(
    b: &CsBMatrix,
    ham: &SymbolicHamiltonian,
    flow: &FlowRule,
) -> Result<[ZDiffPoly; 3], DiffPolyError> {
    let rhs = matrix_rhs(b, ham, flow)?;
    let lhs = matrix_lhs(b, ham);
    Ok(std::array::from_fn(|i| &rhs[i] - &lhs[i]))
}

/// `M_t - B_x - (BM - MB)`.
pub fn cs_zero_curvature_residual(
    b: &CsBMatrix,
    ham: &SymbolicHamiltonian,
    flow: &FlowRule,
) -> Result<ZMatrix2, DiffPolyError> {
    let m = ham.m_matrix();
    let bm = b.matrix();
    Ok(m.zdt(flow)?.sub(&bm.zdx()).sub(&bm.commutator(&m)))
}

/// `z Δ_t - (f C_x + h D_x - 2g A_x)`.
pub fn consistency_residual(
    b: &CsBMatrix,
    ham: &SymbolicHamiltonian,
    flow: &FlowRule,
) -> Result<ZDiffPoly, DiffPolyError> {
    let delta_t = flow.dt(&ham.delta())?;
    let two_g = DiffPoly::integer(2) * &ham.g;
    let rhs = &(&b.c.zdx().scale(&ham.f) + &b.d.zdx().scale(&ham.h)) - &b.a.zdx().scale(&two_g);
    Ok(&z_times(delta_t) - &rhs)
}

/// Kernel vector dotted with the right-hand side of the matrix form.
pub fn kernel_contraction(
    b: &CsBMatrix,
    ham: &SymbolicHamiltonian,
    flow: &FlowRule,
) -> Result<ZDiffPoly, DiffPolyError> {
    let rhs = matrix_rhs(b, ham, flow)?;
    let kernel = ham.left_kernel();
    let mut acc = ZDiffPoly::zero();
    for (k, r) in kernel.iter().zip(&rhs) {
        acc = &acc + &r.scale(k);
    }
    Ok(acc)
}

/// `f C_{k,x} + h D_{k,x} - 2g A_{k,x}`, the negated `z^k` coefficient of the
/// consistency residual for `k >= 2`.
pub fn consistency_coefficient(b: &CsBMatrix, ham: &SymbolicHamiltonian, k: usize) -> DiffPoly {
    &ham.f * &b.c.zcoeff(k).dx() + &ham.h * &b.d.zcoeff(k).dx()
        - DiffPoly::integer(2) * &ham.g * b.a.zcoeff(k).dx()
}

/// `f (hK)_x + h (fK)_x - 2g (gK)_x`.
pub fn k_ode_residual(k: &DiffPoly, ham: &SymbolicHamiltonian) -> DiffPoly {
    &ham.f * &(&ham.h * k).dx() + &ham.h * &(&ham.f * k).dx()
        - DiffPoly::integer(2) * &ham.g * (&ham.g * k).dx()
}

/// `Δ_x K + 2 Δ K_x`.
pub fn k_ode_closed_form(k: &DiffPoly, ham: &SymbolicHamiltonian) -> DiffPoly {
    let delta = ham.delta();
    &delta.dx() * k + DiffPoly::integer(2) * &delta * k.dx()
}

/// The formal unknown `K`.
pub fn formal_k() -> Symbol {
    Symbol::field("K")
}

/// Symbolic replay of the top-coefficient argument for degree `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopForcing {
    pub degree: usize,
    /// `h A_n - g C_n`, `f A_n - g D_n`, `f C_n - h D_n` with `A_n, C_n, D_n` as symbols.
    pub identities: [DiffPoly; 3],
    /// The same identities after `A_n = gK`, `C_n = hK`, `D_n = fK`.
    pub substituted: [DiffPoly; 3],
    /// `z^{n+1}` coefficients of the three residuals for a generic degree-`n` B.
    pub top_residuals: [DiffPoly; 3],
    /// The `k = n` consistency coefficient with the forced top coefficients.
    pub k_equation: DiffPoly,
    /// `Δ_x K + 2 Δ K_x`.
    pub k_closed_form: DiffPoly,
}

impl TopForcing {
    pub fn identities_hold(&self) -> bool {
        self.substituted.iter().all(DiffPoly::is_zero)
    }

    pub fn k_equation_matches(&self) -> bool {
        self.k_equation == self.k_closed_form
    }
}

/// Forced top coefficients `(g K, h K, f K)`.
pub fn forced_top(ham: &SymbolicHamiltonian, k: &DiffPoly) -> [DiffPoly; 3] {
    [&ham.g * k, &ham.h * k, &ham.f * k]
}

pub fn top_coefficient_forcing(n: usize) -> Result<TopForcing, CanonicalError> {
    if n < 2 {
        return Err(CanonicalError::DegreeTooLow(n));
    }
    let ham = SymbolicHamiltonian::generic();
    let generic = CsBMatrix::generic(n);
    let (an, cn, dn) = (
        generic.a.zcoeff(n),
        generic.c.zcoeff(n),
        generic.d.zcoeff(n),
    );
    let identities_for = |a: &DiffPoly, c: &DiffPoly, d: &DiffPoly| {
        [
            &ham.h * a - &ham.g * c,
            &ham.f * a - &ham.g * d,
            &ham.f * c - &ham.h * d,
        ]
    };
    let identities = identities_for(&an, &cn, &dn);
    let k = DiffPoly::symbol(&formal_k());
    let [ak, ck, dk] = forced_top(&ham, &k);
    let substituted = identities_for(&ak, &ck, &dk);

    let residuals = cs_three_residuals(&generic, &ham, &generic_flow())?;
    let top_residuals = std::array::from_fn(|i| residuals[i].zcoeff(n + 1));

    let replace = |entry: &ZDiffPoly, top: &DiffPoly| {
        let mut coeffs = entry.coeffs().to_vec();
        coeffs[n] = top.clone();
        ZDiffPoly::from_coeffs(coeffs)
    };
    let forced = CsBMatrix::new(
        replace(&generic.a, &ak),
        replace(&generic.c, &ck),
        replace(&generic.d, &dk),
    );
    Ok(TopForcing {
        degree: n,
        identities,
        substituted,
        top_residuals,
        k_equation: consistency_coefficient(&forced, &ham, n),
        k_closed_form: k_ode_closed_form(&k, &ham),
    })
}
