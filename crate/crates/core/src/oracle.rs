//! Truncated-matrix oracle for the closed-form spectrum.
//!
//! The pseudo-boson pair is realized by the standard Fock-space pair
//! `d = a`, `D = a†` on levels `0..=M`; the pseudo-fermion pair is the
//! explicit 2x2 `c`, `C` of a [`PseudoFermionRep`]. The full Hamiltonian is
//! assembled on `C^{M+1} ⊗ C²` (boson index major):
//!
//! ```text
//! H = 1_b ⊗ H_GMM + ω (D d) ⊗ 1_f + ε d ⊗ C + ε* D ⊗ c
//! ```
//!
//! Excitation sectors with `n ≤ M` are closed under `H`, so residuals on them
//! carry no truncation error.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gmm::{build_gmm, eigenvalues_2x2, verify_representation, Branch, GmmParams, PseudoFermionRep};
use crate::linalg::{inner, kron, kron_vec, mat_mul, mat_vec, nullspace_2x2, CMatrix, CScalar, CVector, ONE, ZERO};
use crate::spectrum::{sector_eigen, ModelParams, SectorEigen};

/// Cutoff used for sector work up to `n = 100`.
pub const DEFAULT_CUTOFF: usize = 128;

/// Agreement required between the model parameters and the representation.
const CONSISTENCY_TOL: f64 = 1e-12;

/// Vacuum pairings smaller than this are treated as zero.
const SELF_ORTHOGONAL_TOL: f64 = 1e-14;

/// Standard boson lowering and raising matrices on Fock levels `0..=cutoff`.
pub fn build_boson_ops(cutoff: usize) -> Result<(CMatrix, CMatrix)> {
    if cutoff < 2 {
        return Err(Error::CutoffTooSmall(cutoff));
    }
    let dim = cutoff + 1;
    let mut d = CMatrix::zeros(dim, dim);
    for m in 1..dim {
        d[(m - 1, m)] = Complex64::new((m as f64).sqrt(), 0.0);
    }
    let big_d = d.transpose();
    Ok((d, big_d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Right eigenvector family built from `D` and `C`.
    Phi,
    /// Left (adjoint) family built from `d†` and `c†`.
    Psi,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderState {
    pub n: usize,
    pub k: usize,
    pub family: Family,
    pub vec: CVector,
}

#[derive(Debug, Clone)]
struct Ladders {
    phi: Vec<CVector>,
    psi: Vec<CVector>,
    eta: [CVector; 2],
    mu: [CVector; 2],
}

/// Dense realization of `H` on a Fock cutoff together with its ladder bases.
#[derive(Debug, Clone)]
pub struct TruncatedModel {
    cutoff: usize,
    d_mat: CMatrix,
    big_d_mat: CMatrix,
    c_mat: CMatrix,
    big_c_mat: CMatrix,
    h_gmm: CMatrix,
    h_full: CMatrix,
    h_full_adj: CMatrix,
    params: ModelParams,
    rep: Option<PseudoFermionRep>,
    ladders: Ladders,
}

fn close(a: CScalar, b: CScalar) -> bool {
    (a - b).norm() <= CONSISTENCY_TOL * (1.0 + a.norm().max(b.norm()))
}

/// Assembles `H` from the literal GMM matrix and a representation built from it.
///
/// `p.omega0` and `p.rho` must match the representation; a mismatch is an
/// error rather than a silent override.
pub fn build_full_h(
    gmm: &GmmParams,
    p: &ModelParams,
    rep: &PseudoFermionRep,
    cutoff: usize,
) -> Result<TruncatedModel> {
    if !close(p.omega0, rep.omega0) || !close(p.rho, rep.rho) {
        return Err(Error::InconsistentParameters(format!(
            "model (omega0 = {}, rho = {}) vs representation (omega0 = {}, rho = {})",
            p.omega0, p.rho, rep.omega0, rep.rho
        )));
    }
    let repr_err = verify_representation(gmm, rep);
    if repr_err > 1e-10 {
        return Err(Error::InconsistentParameters(format!(
            "representation does not reproduce H_GMM (deviation {repr_err:e})"
        )));
    }
    let mut tm = TruncatedModel::from_parts(
        build_gmm(gmm),
        rep.c_mat.clone(),
        rep.big_c_mat.clone(),
        *p,
        cutoff,
    )?;
    tm.rep = Some(rep.clone());
    Ok(tm)
}

impl TruncatedModel {
    /// Assembles `H` from an explicit two-level block and fermionic pair.
    ///
    /// This skips every consistency check against a representation; it exists
    /// for limits (such as `ν₀ = 0`) where no pseudo-fermion representation is
    /// defined but a standard fermion pair still is.
    pub fn from_parts(
        h_gmm: CMatrix,
        c_mat: CMatrix,
        big_c_mat: CMatrix,
        params: ModelParams,
        cutoff: usize,
    ) -> Result<Self> {
        for m in [&h_gmm, &c_mat, &big_c_mat] {
            if m.shape() != (2, 2) {
                return Err(Error::NotTwoByTwo(m.rows(), m.cols()));
            }
        }
        let (d_mat, big_d_mat) = build_boson_ops(cutoff)?;
        let dim_b = cutoff + 1;

        let number_b = mat_mul(&big_d_mat, &d_mat)?;
        let h_full = kron(&CMatrix::identity(dim_b), &h_gmm)
            .add(&kron(&number_b, &CMatrix::identity(2)).scale(params.omega))?
            .add(&kron(&d_mat, &big_c_mat).scale(params.coupling))?
            .add(&kron(&big_d_mat, &c_mat).scale(params.coupling.conj()))?;
        let h_full_adj = h_full.adjoint();

        let ladders = build_ladders(&d_mat, &big_d_mat, &c_mat, &big_c_mat)?;
        Ok(Self {
            cutoff,
            d_mat,
            big_d_mat,
            c_mat,
            big_c_mat,
            h_gmm,
            h_full,
            h_full_adj,
            params,
            rep: None,
            ladders,
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        2 * (self.cutoff + 1)
    }

    pub fn h_full(&self) -> &CMatrix {
        &self.h_full
    }

    pub fn h_full_adjoint(&self) -> &CMatrix {
        &self.h_full_adj
    }

    pub fn h_gmm(&self) -> &CMatrix {
        &self.h_gmm
    }

    pub fn d_mat(&self) -> &CMatrix {
        &self.d_mat
    }

    pub fn big_d_mat(&self) -> &CMatrix {
        &self.big_d_mat
    }

    pub fn c_mat(&self) -> &CMatrix {
        &self.c_mat
    }

    pub fn big_c_mat(&self) -> &CMatrix {
        &self.big_c_mat
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn rep(&self) -> Option<&PseudoFermionRep> {
        self.rep.as_ref()
    }

    /// Fermionic vacua `(η₀, μ₀)` with `⟨η₀, μ₀⟩ = 1`.
    pub fn fermion_vacua(&self) -> (&CVector, &CVector) {
        (&self.ladders.eta[0], &self.ladders.mu[0])
    }

    /// Total excitation operator `N = (D d) ⊗ 1 + 1 ⊗ (C c)`.
    pub fn excitation_op(&self) -> CMatrix {
        let dim_b = self.cutoff + 1;
        let nb = mat_mul(&self.big_d_mat, &self.d_mat).expect("square boson ops");
        let nf = mat_mul(&self.big_c_mat, &self.c_mat).expect("2x2 fermion ops");
        kron(&nb, &CMatrix::identity(2))
            .add(&kron(&CMatrix::identity(dim_b), &nf))
            .expect("same dimension")
    }

    /// Largest entry of `[H, N]` away from the top Fock level.
    pub fn excitation_commutator_defect(&self) -> f64 {
        let comm = self
            .h_full
            .commutator(&self.excitation_op())
            .expect("square operands");
        let inner_dim = 2 * self.cutoff;
        let mut worst = 0.0f64;
        for i in 0..inner_dim {
            for j in 0..inner_dim {
                worst = worst.max(comm[(i, j)].norm());
            }
        }
        worst
    }

    /// Largest deviation of `{1⊗c, 1⊗C}` from the identity.
    pub fn embedded_anticommutator_defect(&self) -> f64 {
        let id_b = CMatrix::identity(self.cutoff + 1);
        let c = kron(&id_b, &self.c_mat);
        let big_c = kron(&id_b, &self.big_c_mat);
        c.anticommutator(&big_c)
            .and_then(|m| m.sub(&CMatrix::identity(self.dim())))
            .expect("square operands")
            .max_abs()
    }

    /// Largest deviation of `[d, D]` from the identity, excluding the top level.
    pub fn boson_commutator_defect(&self) -> f64 {
        let comm = self.d_mat.commutator(&self.big_d_mat).expect("square operands");
        let mut worst = 0.0f64;
        for i in 0..self.cutoff {
            for j in 0..self.cutoff {
                let expected = if i == j { ONE } else { ZERO };
                worst = worst.max((comm[(i, j)] - expected).norm());
            }
        }
        worst
    }
}

fn build_ladders(
    d_mat: &CMatrix,
    big_d_mat: &CMatrix,
    c_mat: &CMatrix,
    big_c_mat: &CMatrix,
) -> Result<Ladders> {
    let dim_b = d_mat.rows();
    let d_adj = d_mat.adjoint();

    // φ₀ = ψ₀ = |0⟩ for the standard boson pair.
    let mut phi = Vec::with_capacity(dim_b);
    let mut psi = Vec::with_capacity(dim_b);
    phi.push(CVector::basis(dim_b, 0));
    psi.push(CVector::basis(dim_b, 0));
    for n in 1..dim_b {
        let s = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        phi.push(mat_vec(big_d_mat, &phi[n - 1])?.scale(s));
        psi.push(mat_vec(&d_adj, &psi[n - 1])?.scale(s));
    }

    let eta0 = nullspace_2x2(c_mat)?;
    let mu0 = nullspace_2x2(&big_c_mat.adjoint())?;
    let pairing = inner(&eta0, &mu0)?;
    if pairing.norm() < SELF_ORTHOGONAL_TOL {
        return Err(Error::SelfOrthogonalVacua);
    }
    let mu0 = mu0.scale(ONE / pairing);
    let eta1 = mat_vec(big_c_mat, &eta0)?;
    let mu1 = mat_vec(&c_mat.adjoint(), &mu0)?;

    Ok(Ladders {
        phi,
        psi,
        eta: [eta0, eta1],
        mu: [mu0, mu1],
    })
}

/// `Φ_{n,k} = (Dⁿ φ₀/√n!) ⊗ Cᵏ η₀` or `Ψ_{n,k} = (d†ⁿ ψ₀/√n!) ⊗ c†ᵏ μ₀`.
pub fn build_ladder(tm: &TruncatedModel, n: usize, k: usize, family: Family) -> Result<LadderState> {
    if k > 1 {
        return Err(Error::InvalidArgument(format!("k must be 0 or 1, got {k}")));
    }
    if n + k > tm.cutoff {
        return Err(Error::CutoffExceeded {
            needed: n + k,
            cutoff: tm.cutoff,
        });
    }
    let l = &tm.ladders;
    let vec = match family {
        Family::Phi => kron_vec(&l.phi[n], &l.eta[k]),
        Family::Psi => kron_vec(&l.psi[n], &l.mu[k]),
    };
    Ok(LadderState { n, k, family, vec })
}

fn check_sector_cutoff(tm: &TruncatedModel, n: u64) -> Result<usize> {
    let n = n as usize;
    if n + 1 > tm.cutoff.saturating_sub(1) {
        return Err(Error::CutoffExceeded {
            needed: n + 1,
            cutoff: tm.cutoff,
        });
    }
    Ok(n)
}

/// Right eigenvector candidate `Φ_{n-1,1} + λ Φ_{n,0}`.
pub fn sector_vector(tm: &TruncatedModel, n: usize, lambda: CScalar, family: Family) -> Result<CVector> {
    let upper = build_ladder(tm, n - 1, 1, family)?;
    let lower = build_ladder(tm, n, 0, family)?;
    upper.vec.axpy(lambda, &lower.vec)
}

fn relative_residual(op: &CMatrix, v: &CVector, value: CScalar) -> Result<f64> {
    let hv = mat_vec(op, v)?;
    Ok(hv.axpy(-value, v)?.norm() / v.norm())
}

/// `‖H v - E v‖ / ‖v‖` with `v = Φ_{n-1,1} + λ Φ_{n,0}`.
pub fn residual_check(tm: &TruncatedModel, se: &SectorEigen) -> Result<f64> {
    let n = check_sector_cutoff(tm, se.n)?;
    if n == 0 {
        return Err(Error::GroundSector);
    }
    let v = sector_vector(tm, n, se.lambda, Family::Phi)?;
    relative_residual(&tm.h_full, &v, se.energy)
}

/// `‖H† w - E* w‖ / ‖w‖` with `w = Ψ_{n-1,1} + ξ Ψ_{n,0}`.
pub fn adjoint_residual_check(tm: &TruncatedModel, se: &SectorEigen) -> Result<f64> {
    let n = check_sector_cutoff(tm, se.n)?;
    if n == 0 {
        return Err(Error::GroundSector);
    }
    let w = sector_vector(tm, n, se.xi, Family::Psi)?;
    relative_residual(&tm.h_full_adj, &w, se.energy.conj())
}

/// Residual of the single ground level `Φ_{0,0}` against `energy`.
pub fn ground_residual(tm: &TruncatedModel, energy: CScalar) -> Result<f64> {
    let v = build_ladder(tm, 0, 0, Family::Phi)?;
    relative_residual(&tm.h_full, &v.vec, energy)
}

/// `max |⟨Φ_{n,k}, Ψ_{m,l}⟩ - δ_{nm} δ_{kl}|` over `n, m ≤ n_max`.
pub fn biorthogonality_check(tm: &TruncatedModel, n_max: usize) -> Result<f64> {
    if n_max + 1 > tm.cutoff {
        return Err(Error::CutoffExceeded {
            needed: n_max + 1,
            cutoff: tm.cutoff,
        });
    }
    let mut worst = 0.0f64;
    for n in 0..=n_max {
        for k in 0..2 {
            let phi = build_ladder(tm, n, k, Family::Phi)?;
            for m in 0..=n_max {
                for l in 0..2 {
                    let psi = build_ladder(tm, m, l, Family::Psi)?;
                    let expected = if n == m && k == l { ONE } else { ZERO };
                    worst = worst.max((inner(&phi.vec, &psi.vec)? - expected).norm());
                }
            }
        }
    }
    Ok(worst)
}

/// Matrix of `H` restricted to `span{Φ_{n-1,1}, Φ_{n,0}}` in that basis,
/// read off with the dual `Ψ` family.
pub fn sector_restriction(tm: &TruncatedModel, n: usize) -> Result<CMatrix> {
    if n == 0 {
        return Err(Error::GroundSector);
    }
    let basis = [
        build_ladder(tm, n - 1, 1, Family::Phi)?,
        build_ladder(tm, n, 0, Family::Phi)?,
    ];
    let dual = [
        build_ladder(tm, n - 1, 1, Family::Psi)?,
        build_ladder(tm, n, 0, Family::Psi)?,
    ];
    let mut m = CMatrix::zeros(2, 2);
    for (a, phi) in basis.iter().enumerate() {
        let h_phi = mat_vec(&tm.h_full, &phi.vec)?;
        for (b, psi) in dual.iter().enumerate() {
            m[(b, a)] = inner(&psi.vec, &h_phi)?;
        }
    }
    Ok(m)
}

/// How far `H` maps sector `n` outside itself: the largest norm of
/// `H Φ_a - Σ_b M_ba Φ_b` over the two basis vectors.
pub fn sector_closure_defect(tm: &TruncatedModel, n: usize) -> Result<f64> {
    let m = sector_restriction(tm, n)?;
    let basis = [
        build_ladder(tm, n - 1, 1, Family::Phi)?.vec,
        build_ladder(tm, n, 0, Family::Phi)?.vec,
    ];
    let mut worst = 0.0f64;
    for a in 0..2 {
        let projected = basis[0].scale(m[(0, a)]).axpy(m[(1, a)], &basis[1])?;
        let h_phi = mat_vec(&tm.h_full, &basis[a])?;
        worst = worst.max(h_phi.sub(&projected)?.norm());
    }
    Ok(worst)
}

/// Eigenvalues of the sector restriction, from trace and determinant.
pub fn oracle_sector_eigenvalues(tm: &TruncatedModel, n: usize) -> Result<(CScalar, CScalar)> {
    eigenvalues_2x2(&sector_restriction(tm, n)?)
}

/// Right and adjoint residuals of one sector branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorResidual {
    pub n: u64,
    pub branch: Branch,
    pub right: f64,
    pub adjoint: f64,
}

/// Residuals of both branches for every sector in `1..=n_max`, in order.
pub fn sector_residuals(tm: &TruncatedModel, n_max: u64) -> Result<Vec<SectorResidual>> {
    let eigen: Vec<SectorEigen> = (1..=n_max)
        .flat_map(|n| Branch::BOTH.into_iter().map(move |b| (n, b)))
        .map(|(n, b)| sector_eigen(&tm.params, n, b))
        .collect::<Result<_>>()?;
    residuals_of(tm, &eigen)
}

/// Residuals of caller-supplied eigendata, in input order.
///
/// Entries are evaluated in parallel; each value depends only on its own
/// entry, so the output is identical to a sequential run.
pub fn residuals_of(tm: &TruncatedModel, eigen: &[SectorEigen]) -> Result<Vec<SectorResidual>> {
    eigen
        .par_iter()
        .map(|se| {
            Ok(SectorResidual {
                n: se.n,
                branch: se.branch,
                right: residual_check(tm, se)?,
                adjoint: adjoint_residual_check(tm, se)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmm::pf_representation;
    use crate::linalg::I;
    use crate::spectrum::energy_nk;

    fn c(re: f64, im: f64) -> CScalar {
        Complex64::new(re, im)
    }

    fn sample() -> (GmmParams, ModelParams, PseudoFermionRep) {
        let gmm = GmmParams::new(0.4, 1.1, 0.2, 0.9, c(0.7, 0.25)).unwrap();
        let rep = pf_representation(&gmm, Branch::Plus, c(1.2, -0.4)).unwrap();
        let p = ModelParams::from_rep(c(1.7, -0.1), c(0.6, 0.3), &rep);
        (gmm, p, rep)
    }

    fn model(cutoff: usize) -> TruncatedModel {
        let (gmm, p, rep) = sample();
        build_full_h(&gmm, &p, &rep, cutoff).unwrap()
    }

    #[test]
    fn boson_ops_small_cutoff() {
        let (d, big_d) = build_boson_ops(2).unwrap();
        let ket1 = CVector::basis(3, 1);
        let ket2 = CVector::basis(3, 2);
        assert_eq!(mat_vec(&d, &ket1).unwrap(), CVector::basis(3, 0));
        let d2 = mat_vec(&d, &ket2).unwrap();
        assert!((d2[1] - c(2f64.sqrt(), 0.0)).norm() < 1e-15);
        assert_eq!(big_d, d.transpose());
        assert!(build_boson_ops(1).is_err());
    }

    #[test]
    fn boson_commutator_truncation() {
        let m = 6;
        let (d, big_d) = build_boson_ops(m).unwrap();
        let comm = d.commutator(&big_d).unwrap();
        let mut expected = CMatrix::identity(m + 1);
        expected[(m, m)] = c(-(m as f64), 0.0);
        assert!(comm.sub(&expected).unwrap().max_abs() < 1e-13);

        let number = mat_mul(&big_d, &d).unwrap();
        let diag: Vec<_> = (0..=m).map(|j| c(j as f64, 0.0)).collect();
        assert!(number.sub(&CMatrix::from_diag(&diag)).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn uncoupled_model_is_diagonal() {
        let h_gmm = CMatrix::from_diag(&[c(0.3, 0.0), c(1.9, 0.0)]);
        let lower = CMatrix::from_2x2([[ZERO, ONE], [ZERO, ZERO]]);
        let p = ModelParams::new(c(2.5, 0.0), ZERO, ZERO, ZERO);
        let tm = TruncatedModel::from_parts(h_gmm, lower.clone(), lower.adjoint(), p, 4).unwrap();
        let h = tm.h_full();
        for i in 0..h.rows() {
            for j in 0..h.cols() {
                let expected = if i == j {
                    let n = (i / 2) as f64;
                    c([0.3, 1.9][i % 2] + 2.5 * n, 0.0)
                } else {
                    ZERO
                };
                assert!((h[(i, j)] - expected).norm() < 1e-14, "({i},{j})");
            }
        }
    }

    #[test]
    fn dimension_for_default_cutoff() {
        assert_eq!(model(DEFAULT_CUTOFF).dim(), 258);
    }

    #[test]
    fn excitation_number_is_conserved() {
        let tm = model(12);
        assert!(tm.excitation_commutator_defect() < 1e-12);
        assert!(tm.embedded_anticommutator_defect() < 1e-12);
        assert!(tm.boson_commutator_defect() < 1e-12);
    }

    #[test]
    fn inconsistent_parameters_rejected() {
        let (gmm, mut p, rep) = sample();
        p.rho += 0.5;
        let err = build_full_h(&gmm, &p, &rep, 8).unwrap_err();
        assert!(matches!(err, Error::InconsistentParameters(_)));
    }

    #[test]
    fn vacua_are_annihilated() {
        let tm = model(10);
        let dim_b = tm.cutoff() + 1;
        let phi00 = build_ladder(&tm, 0, 0, Family::Phi).unwrap().vec;
        let psi00 = build_ladder(&tm, 0, 0, Family::Psi).unwrap().vec;
        let id_b = CMatrix::identity(dim_b);
        let id_f = CMatrix::identity(2);

        let checks = [
            (kron(tm.d_mat(), &id_f), &phi00),
            (kron(&id_b, tm.c_mat()), &phi00),
            (kron(&tm.big_d_mat().adjoint(), &id_f), &psi00),
            (kron(&id_b, &tm.big_c_mat().adjoint()), &psi00),
        ];
        for (op, v) in checks {
            assert!(mat_vec(&op, v).unwrap().norm() < 1e-12);
        }
        assert!((inner(&phi00, &psi00).unwrap() - ONE).norm() < 1e-14);
    }

    #[test]
    fn biorthogonality_small() {
        let tm = model(24);
        assert!(biorthogonality_check(&tm, 0).unwrap() < 1e-12);
        assert!(biorthogonality_check(&tm, 20).unwrap() < 1e-9);
        assert!(biorthogonality_check(&tm, 24).is_err());
    }

    #[test]
    fn ladder_cutoff_guard() {
        let tm = model(6);
        assert!(build_ladder(&tm, 6, 0, Family::Phi).is_ok());
        assert_eq!(
            build_ladder(&tm, 6, 1, Family::Phi).unwrap_err(),
            Error::CutoffExceeded { needed: 7, cutoff: 6 }
        );
    }

    #[test]
    fn ground_level_residual() {
        let tm = model(8);
        let e0 = energy_nk(tm.params(), 0, 0).unwrap();
        assert!(ground_residual(&tm, e0).unwrap() <= 1e-10);
    }

    #[test]
    fn sector_residuals_small_and_sensitive() {
        let tm = model(24);
        for n in 1..=20 {
            for branch in Branch::BOTH {
                let se = sector_eigen(tm.params(), n, branch).unwrap();
                assert!(residual_check(&tm, &se).unwrap() <= 1e-9);
                assert!(adjoint_residual_check(&tm, &se).unwrap() <= 1e-9);
            }
        }
        let mut se = sector_eigen(tm.params(), 5, Branch::Plus).unwrap();
        se.energy += 1e-3;
        assert!(residual_check(&tm, &se).unwrap() >= 1e-4);
        let se = sector_eigen(tm.params(), 23, Branch::Plus).unwrap();
        assert!(residual_check(&tm, &se).is_err());
    }

    #[test]
    fn corrupted_lambda_sign_fails() {
        let tm = model(16);
        let mut se = sector_eigen(tm.params(), 3, Branch::Plus).unwrap();
        se.lambda = -se.lambda;
        assert!(residual_check(&tm, &se).unwrap() > 1e-3);
    }

    #[test]
    fn restriction_matches_closed_form() {
        let tm = model(16);
        for n in 1..=14u64 {
            assert!(sector_closure_defect(&tm, n as usize).unwrap() < 1e-10);
            let (a, b) = oracle_sector_eigenvalues(&tm, n as usize).unwrap();
            let plus = sector_eigen(tm.params(), n, Branch::Plus).unwrap().energy;
            let minus = sector_eigen(tm.params(), n, Branch::Minus).unwrap().energy;
            let direct = (a - plus).norm().max((b - minus).norm());
            let swapped = (a - minus).norm().max((b - plus).norm());
            assert!(direct.min(swapped) < 1e-9, "n = {n}");
        }
    }

    #[test]
    fn parallel_residuals_keep_order() {
        let tm = model(12);
        let rows = sector_residuals(&tm, 10).unwrap();
        assert_eq!(rows.len(), 20);
        assert_eq!((rows[0].n, rows[0].branch), (1, Branch::Plus));
        assert_eq!((rows[19].n, rows[19].branch), (10, Branch::Minus));
        assert_eq!(rows, sector_residuals(&tm, 10).unwrap());
    }

    #[test]
    fn imaginary_coupling_is_supported() {
        let gmm = GmmParams::new(0.1, 0.9, 0.5, 0.0, c(1.0, 0.0)).unwrap();
        let rep = pf_representation(&gmm, Branch::Minus, ONE).unwrap();
        let p = ModelParams::from_rep(c(1.0, 0.0), I * 0.8, &rep);
        let tm = build_full_h(&gmm, &p, &rep, 12).unwrap();
        let se = sector_eigen(&p, 4, Branch::Minus).unwrap();
        assert!(residual_check(&tm, &se).unwrap() <= 1e-9);
        assert!(adjoint_residual_check(&tm, &se).unwrap() <= 1e-9);
    }
}
