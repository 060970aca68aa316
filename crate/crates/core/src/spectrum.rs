//! Closed-form spectrum of the full Hamiltonian
//! `H = H_GMM + ħω D d + ε d C + ε* D c` (ħ = 1).
//!
//! The total excitation number `N = D d + C c` commutes with `H`, so every
//! sector `n ≥ 1` is the two-dimensional span of `Φ_{n-1,1}` and `Φ_{n,0}`.
//! With detuning `δ = ω₀ - ω` and `S_n = √(δ² + 4|ε|²n)` (principal root):
//!
//! ```text
//! E_n^± = ω(n - ½) + ω₀/2 + ρ ± S_n/2
//! λ_n^± = (-δ ± S_n) / (2ε√n)          H (Φ_{n-1,1} + λ Φ_{n,0}) = E (…)
//! ξ_n^± = (-δ* ± S_n*) / (2ε√n)        H†(Ψ_{n-1,1} + ξ Ψ_{n,0}) = E*(…)
//! ```
//!
//! Off the branch cut `S_n* = √((δ*)² + 4|ε|²n)`. On the cut the conjugated
//! root is the one that keeps `ξ^±` attached to `E^±`, so it is used
//! everywhere.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gmm::{omega0_for_branch, Branch, GmmParams, PseudoFermionRep};
use crate::linalg::{principal_sqrt, CScalar, I, ONE};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Boson frequency ω; complex values are allowed.
    pub omega: CScalar,
    /// Two-level frequency ħω₀.
    pub omega0: CScalar,
    pub rho: CScalar,
    /// Boson-fermion coupling ε.
    pub coupling: CScalar,
}

impl ModelParams {
    pub fn new(omega: CScalar, omega0: CScalar, rho: CScalar, coupling: CScalar) -> Self {
        Self {
            omega,
            omega0,
            rho,
            coupling,
        }
    }

    /// Takes ω₀ and ρ from a pseudo-fermion representation.
    pub fn from_rep(omega: CScalar, coupling: CScalar, rep: &PseudoFermionRep) -> Self {
        Self::new(omega, rep.omega0, rep.rho, coupling)
    }

    /// Same model with `ω₀ = ω + iτ`, so that `δ = iτ`. `τ` may be complex.
    pub fn with_tau(&self, tau: CScalar) -> Self {
        Self {
            omega0: self.omega + I * tau,
            ..*self
        }
    }

    /// `|ε|²`, computed as `ε ε*`.
    pub fn coupling_sq(&self) -> f64 {
        self.coupling.norm_sqr()
    }

    pub fn is_finite(&self) -> bool {
        [self.omega, self.omega0, self.rho, self.coupling]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Closed-form eigendata of one branch in excitation sector `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorEigen {
    pub n: u64,
    pub branch: Branch,
    pub energy: CScalar,
    pub lambda: CScalar,
    pub xi: CScalar,
}

/// An exceptional point of sector `n` on the line `δ = iτ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpPoint {
    pub n: u64,
    pub tau: f64,
    pub sign: Branch,
    pub coalesced_energy: CScalar,
}

/// `δ = ħ(ω₀ - ω)`.
pub fn detuning(p: &ModelParams) -> CScalar {
    p.omega0 - p.omega
}

/// Radicand `δ² + 4|ε|²n` of sector `n`.
pub fn sector_radicand(p: &ModelParams, n: u64) -> CScalar {
    let d = detuning(p);
    d * d + 4.0 * p.coupling_sq() * n as f64
}

/// `S_n = √(δ² + 4|ε|²n)`, principal root.
pub fn sector_root(p: &ModelParams, n: u64) -> CScalar {
    principal_sqrt(sector_radicand(p, n))
}

/// True when the radicand of sector `n` sits on the negative real axis, where
/// `√((δ*)² + …)` and `(√(δ² + …))*` differ by a sign.
pub fn is_cut_sensitive(p: &ModelParams, n: u64) -> bool {
    let r = sector_radicand(p, n);
    r.im == 0.0 && r.re < 0.0
}

/// Energy of the level shared by sector `n` and the centre of its doublet,
/// `ω(n - ½) + ω₀/2 + ρ`. This is where the two levels meet at an EP.
pub fn sector_center(p: &ModelParams, n: u64) -> CScalar {
    p.omega * (n as f64 - 0.5) + 0.5 * p.omega0 + p.rho
}

/// `E_{n,k}` of the diagonal labelling.
///
/// For `n + k ≥ 1` this is `E_{n,0} = E_n^+` and `E_{n-1,1} = E_n^-`. The
/// ground level `n = k = 0` is the single state `Φ_{0,0}` with eigenvalue `ρ`;
/// the square root `√δ²` is taken on the branch `-δ` that reproduces it.
pub fn energy_nk(p: &ModelParams, n: u64, k: u8) -> Result<CScalar> {
    if k > 1 {
        return Err(Error::InvalidArgument(format!("k must be 0 or 1, got {k}")));
    }
    let excitations = n + k as u64;
    let root = if excitations == 0 {
        -detuning(p)
    } else {
        sector_root(p, excitations)
    };
    let half = k as f64 - 0.5;
    Ok(p.omega * n as f64 + 0.5 * p.omega0 + p.rho + (p.omega - root) * half)
}

pub fn sector_eigen(p: &ModelParams, n: u64, branch: Branch) -> Result<SectorEigen> {
    if n == 0 {
        return Err(Error::GroundSector);
    }
    if p.coupling == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroCoupling);
    }
    let delta = detuning(p);
    let root = sector_root(p, n);
    let sign = branch.sign();
    let denom = 2.0 * p.coupling * (n as f64).sqrt();
    Ok(SectorEigen {
        n,
        branch,
        energy: sector_center(p, n) + 0.5 * sign * root,
        lambda: (-delta + sign * root) / denom,
        xi: (-delta.conj() + sign * root.conj()) / denom,
    })
}

/// Both branches of sector `n`, plus first.
pub fn sector_pair(p: &ModelParams, n: u64) -> Result<(SectorEigen, SectorEigen)> {
    Ok((
        sector_eigen(p, n, Branch::Plus)?,
        sector_eigen(p, n, Branch::Minus)?,
    ))
}

/// `(τ⁻, τ⁺) = (-2|ε|√n, 2|ε|√n)`.
pub fn ep_tau(coupling: CScalar, n: u64) -> (f64, f64) {
    let t = 2.0 * coupling.norm() * (n as f64).sqrt();
    (-t, t)
}

/// EP of sector `n` on the `δ = iτ` line with `ω₀ = ω + iτ`.
pub fn ep_point(base: &ModelParams, n: u64, sign: Branch) -> EpPoint {
    let (lo, hi) = ep_tau(base.coupling, n);
    let tau = match sign {
        Branch::Plus => hi,
        Branch::Minus => lo,
    };
    let at = base.with_tau(Complex64::new(tau, 0.0));
    EpPoint {
        n,
        tau,
        sign,
        coalesced_energy: sector_center(&at, n),
    }
}

/// Unnormalized biorthogonal pairing `1 + λ* ξ` of the right and left
/// eigenvectors of one branch; it vanishes at an EP.
pub fn self_overlap(p: &ModelParams, n: u64, branch: Branch) -> Result<CScalar> {
    let se = sector_eigen(p, n, branch)?;
    Ok(ONE + se.lambda.conj() * se.xi)
}

/// Boson frequency `ħω = ħω₀ - iτ` that places the model at `δ = iτ`, with
/// `ħω₀ = ±√(4ν₀² + (-Δε + iΔΓ)²)`.
pub fn omega_for_ep(gmm: &GmmParams, tau: f64, sign: Branch) -> CScalar {
    omega0_for_branch(gmm, sign) - I * tau
}
