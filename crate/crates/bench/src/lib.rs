//! Shared fixtures for the criterion benches.

use nhjc_core::{pf_representation, Branch, GmmParams, ModelParams, PseudoFermionRep};
use num_complex::Complex64;

/// Boson frequency 3, coupling 1, ρ = 1, resonant (τ = 0).
pub fn tau_line_base() -> ModelParams {
    let one = Complex64::new(1.0, 0.0);
    ModelParams::new(Complex64::new(3.0, 0.0), Complex64::new(3.0, 0.0), one, one)
}

/// A generic non-degenerate GMM block with its plus representation.
pub fn generic_model() -> (GmmParams, ModelParams, PseudoFermionRep) {
    let gmm = GmmParams::new(0.4, 1.1, 0.2, 0.9, Complex64::new(0.7, 0.25)).expect("valid");
    let rep = pf_representation(&gmm, Branch::Plus, Complex64::new(1.0, 0.0)).expect("non-degenerate");
    let p = ModelParams::from_rep(Complex64::new(1.7, -0.1), Complex64::new(0.6, 0.3), &rep);
    (gmm, p, rep)
}
