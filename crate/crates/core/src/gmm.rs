//! Decaying two-level Hamiltonian and its pseudo-fermion representation.
//!
//! The GMM matrix
//!
//! ```text
//! H_GMM = | ε₁ - iΓ₁   ν₀       |
//!         | ν₀         ε₂ - iΓ₂ |
//! ```
//!
//! is rewritten as `ħω₀ C c + ρ 1` with a pseudo-fermion pair `{c, C} = 1`,
//! `C ≠ c†`. There are two such representations, labelled by the sign of
//! `ħω₀ = ±√((-Δε + iΔΓ)² + 4ν₀²)`. Inside a representation one gauge
//! parameter stays free; it is exposed as `beta12`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{mat_mul, principal_sqrt, CMatrix, CScalar, ONE};

/// Degeneracy threshold on `|disc|`, relative to `4|ν₀|²`.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmmParams {
    pub eps1: f64,
    pub eps2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub nu0: CScalar,
}

impl GmmParams {
    pub fn new(eps1: f64, eps2: f64, gamma1: f64, gamma2: f64, nu0: CScalar) -> Result<Self> {
        let p = Self {
            eps1,
            eps2,
            gamma1,
            gamma2,
            nu0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Decay rates must be nonnegative and every input finite.
    pub fn validate(&self) -> Result<()> {
        let finite = [self.eps1, self.eps2, self.gamma1, self.gamma2, self.nu0.re, self.nu0.im]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidArgument("GMM parameters must be finite".into()));
        }
        if self.gamma1 < 0.0 || self.gamma2 < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "decay rates must be nonnegative (gamma1 = {}, gamma2 = {})",
                self.gamma1, self.gamma2
            )));
        }
        Ok(())
    }

    /// Diagonal asymmetry `-Δε + iΔΓ = H₁₁ - H₂₂`.
    pub fn asymmetry(&self) -> CScalar {
        let d = derived_quantities(self);
        Complex64::new(-d.d_eps, d.d_gamma)
    }

    /// `(-Δε + iΔΓ)² + 4ν₀²`; its principal root is `|ħω₀|` up to sign.
    pub fn discriminant(&self) -> CScalar {
        let a = self.asymmetry();
        a * a + 4.0 * self.nu0 * self.nu0
    }
}

/// Sums and differences of the GMM inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmmDerived {
    /// `ε₂ - ε₁`
    pub d_eps: f64,
    /// `Γ₂ - Γ₁`
    pub d_gamma: f64,
    /// `ε₂ + ε₁`
    pub t_eps: f64,
    /// `Γ₂ + Γ₁`
    pub t_gamma: f64,
}

pub fn derived_quantities(p: &GmmParams) -> GmmDerived {
    GmmDerived {
        d_eps: p.eps2 - p.eps1,
        d_gamma: p.gamma2 - p.gamma1,
        t_eps: p.eps2 + p.eps1,
        t_gamma: p.gamma2 + p.gamma1,
    }
}

pub fn build_gmm(p: &GmmParams) -> CMatrix {
    CMatrix::from_2x2([
        [Complex64::new(p.eps1, -p.gamma1), p.nu0],
        [p.nu0, Complex64::new(p.eps2, -p.gamma2)],
    ])
}

/// True when the two GMM levels coalesce within the absolute tolerance `tol`.
pub fn gmm_is_degenerate(p: &GmmParams, tol: f64) -> bool {
    p.discriminant().norm() <= tol
}

/// Relative degeneracy test used before building a representation.
pub fn gmm_is_degenerate_rel(p: &GmmParams, rel_tol: f64) -> bool {
    gmm_is_degenerate(p, rel_tol * 4.0 * p.nu0.norm_sqr())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Plus, Branch::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Branch::Plus),
            "minus" | "-" => Ok(Branch::Minus),
            other => Err(Error::InvalidArgument(format!("unknown branch '{other}'"))),
        }
    }
}

/// One of the two pseudo-fermion representations of `H_GMM`.
///
/// `c` and `C` share the rank-one, trace-zero shape
///
/// ```text
/// c = | α₁₁          α₁₂  |      C = | β₁₁          β₁₂  |
///     | -α₁₁²/α₁₂   -α₁₁  |          | -β₁₁²/β₁₂   -β₁₁  |
/// ```
///
/// and `H_GMM = ħω₀ C c + ρ 1` holds exactly (up to rounding).
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoFermionRep {
    pub branch: Branch,
    pub alpha11: CScalar,
    pub alpha12: CScalar,
    pub beta11: CScalar,
    pub beta12: CScalar,
    /// `α₁₁ / α₁₂`
    pub alpha_ratio: CScalar,
    /// `β₁₁ / β₁₂`
    pub beta_ratio: CScalar,
    /// `α₁₂β₁₁ - α₁₁β₁₂`
    pub gamma_pm: CScalar,
    pub rho: CScalar,
    /// `ħω₀` with ħ = 1.
    pub omega0: CScalar,
    pub c_mat: CMatrix,
    pub big_c_mat: CMatrix,
}

impl PseudoFermionRep {
    /// Pseudo-fermion number operator `N_f = C c`.
    pub fn number_op(&self) -> CMatrix {
        mat_mul(&self.big_c_mat, &self.c_mat).expect("2x2 operands")
    }
}

/// `ħω₀` for the given branch: `±√disc`, principal root.
pub fn omega0_for_branch(p: &GmmParams, branch: Branch) -> CScalar {
    branch.sign() * principal_sqrt(p.discriminant())
}

fn pseudo_fermion_block(x11: CScalar, x12: CScalar) -> CMatrix {
    CMatrix::from_2x2([[x11, x12], [-x11 * x11 / x12, -x11]])
}

/// Builds the `branch` representation with gauge choice `β₁₂ = beta12_free`.
///
/// `ħω₀ = ±√disc` fixes the branch. The ratios then follow from requiring
/// `H_GMM = ħω₀ C c + ρ 1`: `α = (a ± s)/(2ν₀)`, `β = (a ∓ s)/(2ν₀)` and
/// `ρ = (ε̃ - iΓ ∓ s)/2` with `a = -Δε + iΔΓ`, `s` the principal root.
/// `α₁₂β₁₂ = -ν₀²/disc` enforces both `{c, C} = 1` and `-γ² = α₁₂β₁₂`.
pub fn pf_representation(
    p: &GmmParams,
    branch: Branch,
    beta12_free: CScalar,
) -> Result<PseudoFermionRep> {
    p.validate()?;
    if p.nu0 == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroGmmCoupling);
    }
    if beta12_free == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroGauge);
    }
    let disc = p.discriminant();
    if gmm_is_degenerate_rel(p, DEFAULT_DEGENERACY_TOL) {
        return Err(Error::GmmExceptionalPoint {
            discriminant: disc.norm(),
        });
    }

    let d = derived_quantities(p);
    let a = p.asymmetry();
    let s = principal_sqrt(disc);
    let sign = branch.sign();
    let two_nu0 = 2.0 * p.nu0;

    let omega0 = sign * s;
    let alpha_ratio = (a + sign * s) / two_nu0;
    let beta_ratio = (a - sign * s) / two_nu0;
    let rho = 0.5 * (Complex64::new(d.t_eps, -d.t_gamma) - sign * s);

    let beta12 = beta12_free;
    let alpha12 = (-p.nu0 * p.nu0 / disc) / beta12;
    let alpha11 = alpha_ratio * alpha12;
    let beta11 = beta_ratio * beta12;
    let gamma_pm = alpha12 * beta11 - alpha11 * beta12;

    Ok(PseudoFermionRep {
        branch,
        alpha11,
        alpha12,
        beta11,
        beta12,
        alpha_ratio,
        beta_ratio,
        gamma_pm,
        rho,
        omega0,
        c_mat: pseudo_fermion_block(alpha11, alpha12),
        big_c_mat: pseudo_fermion_block(beta11, beta12),
    })
}

/// Largest entrywise deviation in `H_GMM = ħω₀ C c + ρ 1` and `{c, C} = 1`.
pub fn verify_representation(p: &GmmParams, rep: &PseudoFermionRep) -> f64 {
    let h = build_gmm(p);
    let rebuilt = rep
        .number_op()
        .scale(rep.omega0)
        .add(&CMatrix::identity(2).scale(rep.rho))
        .expect("2x2 operands");
    let repr_err = h.sub(&rebuilt).expect("2x2 operands").max_abs();
    let anti_err = rep
        .c_mat
        .anticommutator(&rep.big_c_mat)
        .and_then(|m| m.sub(&CMatrix::identity(2)))
        .expect("2x2 operands")
        .max_abs();
    repr_err.max(anti_err)
}

/// Both eigenvalues of a 2x2 matrix from its trace and determinant.
pub fn eigenvalues_2x2(m: &CMatrix) -> Result<(CScalar, CScalar)> {
    if m.shape() != (2, 2) {
        return Err(Error::NotTwoByTwo(m.rows(), m.cols()));
    }
    let tr = m.trace();
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let root = principal_sqrt(tr * tr - 4.0 * det * ONE);
    Ok((0.5 * (tr + root), 0.5 * (tr - root)))
}
