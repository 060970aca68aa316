//! Non-Hermitian Jaynes-Cummings model with a decaying two-level system.
//!
//! The crate provides the pseudo-fermion representation of the two-level
//! block ([`gmm`]), the closed-form sector spectrum of the full Hamiltonian
//! ([`spectrum`]), an explicit truncated-matrix realization used to check every
//! closed form by residuals ([`oracle`]), and exceptional-point experiments
//! built on top of them ([`ep`]). Units have ħ = 1.

pub mod ep;
pub mod error;
pub mod gmm;
pub mod linalg;
pub mod oracle;
pub mod spectrum;

pub use ep::{
    encircle, encircle_loops, scan_plane, scan_plane_with, sweep_n, sweep_tau, DGammaReading,
    EncircleResult, PlaneScan, Regime, ScanKind, ScanPoint, ScanPreset, SweepNTable, TauChoice,
    TauSweep,
};
pub use error::{Error, Result};
pub use gmm::{
    build_gmm, derived_quantities, gmm_is_degenerate, pf_representation, verify_representation,
    Branch, GmmDerived, GmmParams, PseudoFermionRep,
};
pub use linalg::{CMatrix, CScalar, CVector};
pub use oracle::{
    adjoint_residual_check, biorthogonality_check, build_full_h, build_ladder, residual_check,
    residuals_of, sector_residuals, Family, SectorResidual, TruncatedModel,
};
pub use spectrum::{
    detuning, energy_nk, ep_tau, omega_for_ep, sector_eigen, self_overlap, EpPoint, ModelParams,
    SectorEigen,
};
