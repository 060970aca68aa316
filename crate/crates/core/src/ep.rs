//! Exceptional-point experiments: τ and n sweeps, encircling loops with
//! continuous branch tracking, and complex-plane scans over GMM inputs.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gmm::{gmm_is_degenerate_rel, omega0_for_branch, Branch, GmmParams, DEFAULT_DEGENERACY_TOL};
use crate::linalg::{principal_sqrt, CScalar, I, ONE};
use crate::spectrum::{sector_eigen, sector_pair, sector_radicand, ModelParams};

/// Absolute gap below which two sector levels count as coalesced.
pub const EP_GAP_TOL: f64 = 1e-8;

/// Relative size of `δ² + 4|ε|²n` (against `|δ|² + 4|ε|²n`) treated as zero.
///
/// The gap is the square root of the radicand, so rounding at the 1e-16 level
/// in the radicand already produces gaps near 1e-7; this catches those.
pub const EP_RADICAND_REL_TOL: f64 = 1e-12;

/// Equality tolerance for the real or imaginary parts in regime classification.
pub const REGIME_EQ_TOL: f64 = 1e-10;

/// Smallest sub-step of the tracker, as a fraction of the nominal step.
const MAX_HALVINGS: u32 = 30;

/// Candidates closer than this cannot be told apart by the tracker.
const AMBIGUITY_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Same real part, split imaginary parts.
    EqualReal,
    /// Same imaginary part, split real parts.
    EqualImag,
    /// Coalesced levels.
    Ep,
    /// Neither part equal; only occurs off the real-parameter line.
    Mixed,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::EqualReal => "equal_real",
            Regime::EqualImag => "equal_imag",
            Regime::Ep => "ep",
            Regime::Mixed => "mixed",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Whether the two levels of sector `n` coalesce at `p`.
pub fn is_coalesced(p: &ModelParams, n: u64, e_plus: CScalar, e_minus: CScalar) -> bool {
    if (e_plus - e_minus).norm() <= EP_GAP_TOL {
        return true;
    }
    let delta = p.omega0 - p.omega;
    let scale = delta.norm_sqr() + 4.0 * p.coupling_sq() * n as f64;
    sector_radicand(p, n).norm() <= EP_RADICAND_REL_TOL * scale
}

pub fn classify(p: &ModelParams, n: u64, e_plus: CScalar, e_minus: CScalar) -> Regime {
    if is_coalesced(p, n, e_plus, e_minus) {
        Regime::Ep
    } else if (e_plus.re - e_minus.re).abs() <= REGIME_EQ_TOL {
        Regime::EqualReal
    } else if (e_plus.im - e_minus.im).abs() <= REGIME_EQ_TOL {
        Regime::EqualImag
    } else {
        Regime::Mixed
    }
}

/// Both sector levels along `ω₀ = ω + iτ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauSweep {
    pub n: u64,
    pub tau_values: Vec<f64>,
    pub e_plus: Vec<CScalar>,
    pub e_minus: Vec<CScalar>,
    pub regime: Vec<Regime>,
}

impl TauSweep {
    pub fn len(&self) -> usize {
        self.tau_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau_values.is_empty()
    }

    /// τ values classified as EPs.
    pub fn ep_taus(&self) -> Vec<f64> {
        self.tau_values
            .iter()
            .zip(&self.regime)
            .filter(|(_, r)| **r == Regime::Ep)
            .map(|(t, _)| *t)
            .collect()
    }
}

/// `steps` evenly spaced samples of `[lo, hi]`, endpoints included exactly.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    let last = (steps - 1) as f64;
    (0..steps)
        .map(|k| {
            if k + 1 == steps {
                hi
            } else {
                lo + (hi - lo) * k as f64 / last
            }
        })
        .collect()
}

pub fn sweep_tau(base: &ModelParams, n: u64, tau_min: f64, tau_max: f64, steps: usize) -> Result<TauSweep> {
    if steps < 2 {
        return Err(Error::InvalidArgument(format!("steps must be >= 2, got {steps}")));
    }
    if !(tau_min.is_finite() && tau_max.is_finite()) || tau_min >= tau_max {
        return Err(Error::InvalidArgument(format!(
            "invalid tau range [{tau_min}, {tau_max}]"
        )));
    }
    if base.omega.im != 0.0 {
        return Err(Error::InvalidArgument("tau sweep requires a real boson frequency".into()));
    }
    let tau_values = linspace(tau_min, tau_max, steps);
    let rows: Vec<(CScalar, CScalar, Regime)> = tau_values
        .par_iter()
        .map(|&tau| {
            let p = base.with_tau(Complex64::new(tau, 0.0));
            let (plus, minus) = sector_pair(&p, n)?;
            Ok((plus.energy, minus.energy, classify(&p, n, plus.energy, minus.energy)))
        })
        .collect::<Result<_>>()?;
    let mut sweep = TauSweep {
        n,
        tau_values,
        e_plus: Vec::with_capacity(steps),
        e_minus: Vec::with_capacity(steps),
        regime: Vec::with_capacity(steps),
    };
    for (ep, em, r) in rows {
        sweep.e_plus.push(ep);
        sweep.e_minus.push(em);
        sweep.regime.push(r);
    }
    Ok(sweep)
}

/// Which sign relates τ to the detuning in an `n` sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauChoice {
    /// `τ = i(ħω₀ - ħω)`, i.e. `δ = -iτ`.
    PlusI,
    /// `τ = -i(ħω₀ - ħω)`, i.e. `δ = iτ`.
    MinusI,
}

impl TauChoice {
    pub fn detuning(self, tau: f64) -> CScalar {
        match self {
            TauChoice::PlusI => -I * tau,
            TauChoice::MinusI => I * tau,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TauChoice::PlusI => "plus_i",
            TauChoice::MinusI => "minus_i",
        }
    }
}

impl std::str::FromStr for TauChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus_i" | "plus-i" => Ok(TauChoice::PlusI),
            "minus_i" | "minus-i" => Ok(TauChoice::MinusI),
            other => Err(Error::InvalidArgument(format!("unknown tau choice '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepNRow {
    pub n: u64,
    pub e_plus: CScalar,
    pub e_minus: CScalar,
    pub gap: f64,
    pub is_ep: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepNTable {
    pub tau: f64,
    pub choice: TauChoice,
    pub rows: Vec<SweepNRow>,
    /// Sector with the smallest `|E⁺ - E⁻|` (first one on ties).
    pub min_gap_n: u64,
    pub min_gap: f64,
}

/// Tabulates both levels against the sector index at fixed detuning.
pub fn sweep_n(base: &ModelParams, tau: f64, choice: TauChoice, n_min: u64, n_max: u64) -> Result<SweepNTable> {
    if n_min < 1 || n_max < n_min {
        return Err(Error::InvalidArgument(format!(
            "invalid sector range [{n_min}, {n_max}]"
        )));
    }
    let p = ModelParams {
        omega0: base.omega + choice.detuning(tau),
        ..*base
    };
    let rows: Vec<SweepNRow> = (n_min..=n_max)
        .into_par_iter()
        .map(|n| {
            let (plus, minus) = sector_pair(&p, n)?;
            Ok(SweepNRow {
                n,
                e_plus: plus.energy,
                e_minus: minus.energy,
                gap: (plus.energy - minus.energy).norm(),
                is_ep: is_coalesced(&p, n, plus.energy, minus.energy),
            })
        })
        .collect::<Result<_>>()?;
    let best = rows
        .iter()
        .fold(None::<&SweepNRow>, |acc, r| match acc {
            Some(a) if a.gap <= r.gap => Some(a),
            _ => Some(r),
        })
        .expect("non-empty range");
    Ok(SweepNTable {
        tau,
        choice,
        min_gap_n: best.n,
        min_gap: best.gap,
        rows,
    })
}

/// A tracked eigenvalue along `τ(θ) = center + r e^{iθ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EncircleResult {
    pub n: u64,
    pub center: f64,
    pub radius: f64,
    pub steps: usize,
    pub loops: u32,
    /// Nominal grid `θ_j = 2π j / steps`, `j = 0..=loops·steps`.
    pub theta: Vec<f64>,
    pub tau: Vec<CScalar>,
    pub branch_track: Vec<CScalar>,
    /// The level not being tracked at each grid point.
    pub other: Vec<CScalar>,
    /// `E⁺` and `E⁻` at `θ = 0`.
    pub start_plus: CScalar,
    pub start_minus: CScalar,
    pub swapped: bool,
    /// Total accepted sub-steps, including refinements.
    pub substeps: usize,
}

impl EncircleResult {
    pub fn final_value(&self) -> CScalar {
        *self.branch_track.last().expect("track has the start point")
    }
}

fn loop_tau(center: f64, radius: f64, theta: f64) -> CScalar {
    Complex64::new(center, 0.0) + radius * Complex64::from_polar(1.0, theta)
}

fn levels_at(base: &ModelParams, n: u64, tau: CScalar) -> Result<(CScalar, CScalar)> {
    let (plus, minus) = sector_pair(&base.with_tau(tau), n)?;
    Ok((plus.energy, minus.energy))
}

/// One loop around `center` in the complex τ plane, tracking `E⁺(θ = 0)`.
pub fn encircle(base: &ModelParams, n: u64, center: f64, radius: f64, steps: usize) -> Result<EncircleResult> {
    encircle_loops(base, n, center, radius, steps, 1)
}

/// `loops` consecutive loops with continuous nearest-neighbour tracking.
///
/// Each nominal step is split in half until the accepted jump is at most half
/// the local gap between the two levels; a loop that cannot be resolved that
/// way passes through (or numerically on top of) an EP.
pub fn encircle_loops(
    base: &ModelParams,
    n: u64,
    center: f64,
    radius: f64,
    steps: usize,
    loops: u32,
) -> Result<EncircleResult> {
    if steps < 8 {
        return Err(Error::InvalidArgument(format!("steps must be >= 8, got {steps}")));
    }
    if !(radius > 0.0 && radius.is_finite() && center.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "radius must be positive and finite, got {radius}"
        )));
    }
    if loops == 0 {
        return Err(Error::InvalidArgument("loops must be >= 1".into()));
    }
    sector_eigen(base, n, Branch::Plus)?;

    let h = 2.0 * PI / steps as f64;
    let total = steps * loops as usize;
    let tau0 = loop_tau(center, radius, 0.0);
    let (start_plus, start_minus) = levels_at(base, n, tau0)?;
    if (start_plus - start_minus).norm() < AMBIGUITY_TOL {
        return Err(Error::LoopThroughEp { theta: 0.0 });
    }

    let mut theta = Vec::with_capacity(total + 1);
    let mut taus = Vec::with_capacity(total + 1);
    let mut track = Vec::with_capacity(total + 1);
    let mut other = Vec::with_capacity(total + 1);
    theta.push(0.0);
    taus.push(tau0);
    track.push(start_plus);
    other.push(start_minus);

    let mut current = start_plus;
    let mut substeps = 0usize;
    for j in 0..total {
        let t_end = (j + 1) as f64 * h;
        let mut t = j as f64 * h;
        let mut dt = h;
        let mut last_other = other[j];
        while t < t_end {
            let t_next = (t + dt).min(t_end);
            let (a, b) = levels_at(base, n, loop_tau(center, radius, t_next))?;
            let gap = (a - b).norm();
            if gap < AMBIGUITY_TOL {
                return Err(Error::LoopThroughEp { theta: t_next });
            }
            let (near, far) = if (a - current).norm() <= (b - current).norm() {
                (a, b)
            } else {
                (b, a)
            };
            if (near - current).norm() > 0.5 * gap {
                if dt <= h / f64::from(1u32 << MAX_HALVINGS.min(31)) {
                    return Err(Error::LoopThroughEp { theta: t_next });
                }
                dt *= 0.5;
                continue;
            }
            current = near;
            last_other = far;
            t = t_next;
            substeps += 1;
            dt = (dt * 2.0).min(h);
        }
        theta.push(t_end);
        taus.push(loop_tau(center, radius, t_end));
        track.push(current);
        other.push(last_other);
    }

    let swapped = (current - start_minus).norm() < (current - start_plus).norm();
    Ok(EncircleResult {
        n,
        center,
        radius,
        steps,
        loops,
        theta,
        tau: taus,
        branch_track: track,
        other,
        start_plus,
        start_minus,
        swapped,
        substeps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanKind {
    /// `Δε = ε₂ - ε₁`, applied through `ε₂`.
    DEps,
    /// `ΔΓ = Γ₂ - Γ₁`, applied through `Γ₂`.
    DGamma,
    /// Real `ν₀`.
    Nu0,
}

impl ScanKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScanKind::DEps => "d_eps",
            ScanKind::DGamma => "d_gamma",
            ScanKind::Nu0 => "nu0",
        }
    }

    /// GMM inputs with the scanned quantity set to `value`.
    pub fn apply(self, base: &GmmParams, value: f64) -> GmmParams {
        let mut g = *base;
        match self {
            ScanKind::DEps => g.eps2 = g.eps1 + value,
            ScanKind::DGamma => g.gamma2 = g.gamma1 + value,
            ScanKind::Nu0 => g.nu0 = Complex64::new(value, 0.0),
        }
        g
    }
}

/// How the ambiguous `(iΔΓ²)` term of the ΔΓ-scan coupling is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DGammaReading {
    /// `(iΔΓ)²`
    #[default]
    SquaredProduct,
    /// `i·ΔΓ²`
    ImaginaryTimesSquare,
}

/// Parameter closures of the three plane scans.
///
/// All presets use `ε = 1` for the boson-fermion coupling and place `δ = 2i√ñ`
/// (or `-2i√ñ`) so that the EP sits in sector `ñ`:
///
/// * `DEps`: `ħω₀ = √(4ν₀² + (Δε + iΔΓ)²)`, `ρ = ½(ε̃ - iΓ + ħω₀)`,
///   `ω = ħω₀ - 2i√ñ`; the defaults are `ν₀ = 1, ε₁ = ½, Γ₁ = 0, Γ₂ = 1`.
/// * `DGamma`: `ν₀ = ½√((1 + i - 2i√ñ)² - X)` with `X` per [`DGammaReading`],
///   `ħω₀` from the plus representation of the GMM block, `ω = 1 + i`,
///   `ρ = ½(ε̃ - iΓ + ħω₀)`. This is a reconstruction: it is the reading under
///   which the coupling formula puts the EP in sector `ñ`.
/// * `Nu0`: the `DEps` closure with `ν₀` scanned at `Δε = 0`. Also a
///   reconstruction; the EP stays in sector `ñ` and moves with `ν₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPreset {
    pub kind: ScanKind,
    pub n_tilde: u64,
    pub reading: DGammaReading,
}

impl ScanPreset {
    pub fn new(kind: ScanKind, n_tilde: u64) -> Self {
        Self {
            kind,
            n_tilde,
            reading: DGammaReading::default(),
        }
    }

    /// Base GMM inputs of the preset.
    pub fn base_gmm(&self) -> GmmParams {
        match self.kind {
            ScanKind::DEps | ScanKind::Nu0 => GmmParams {
                eps1: 0.5,
                eps2: 0.5,
                gamma1: 0.0,
                gamma2: 1.0,
                nu0: ONE,
            },
            ScanKind::DGamma => GmmParams {
                eps1: 0.5,
                eps2: 0.5,
                gamma1: 0.0,
                gamma2: 0.0,
                nu0: ONE,
            },
        }
    }

    /// GMM inputs and model parameters at one scanned value.
    pub fn evaluate(&self, base: &GmmParams, value: f64) -> Result<(GmmParams, ModelParams)> {
        let mut g = self.kind.apply(base, value);
        let root_n = (self.n_tilde as f64).sqrt();
        let model = match self.kind {
            ScanKind::DEps | ScanKind::Nu0 => {
                let d_eps = g.eps2 - g.eps1;
                let d_gamma = g.gamma2 - g.gamma1;
                let shift = Complex64::new(d_eps, d_gamma);
                let omega0 = principal_sqrt(4.0 * g.nu0 * g.nu0 + shift * shift);
                let rho = 0.5 * (Complex64::new(g.eps1 + g.eps2, -(g.gamma1 + g.gamma2)) + omega0);
                ModelParams::new(omega0 - 2.0 * I * root_n, omega0, rho, ONE)
            }
            ScanKind::DGamma => {
                let d_gamma = g.gamma2 - g.gamma1;
                let lead = Complex64::new(1.0, 1.0 - 2.0 * root_n);
                let x = match self.reading {
                    DGammaReading::SquaredProduct => (I * d_gamma) * (I * d_gamma),
                    DGammaReading::ImaginaryTimesSquare => I * d_gamma * d_gamma,
                };
                g.nu0 = 0.5 * principal_sqrt(lead * lead - x);
                let omega0 = omega0_for_branch(&g, Branch::Plus);
                let rho = 0.5 * (Complex64::new(g.eps1 + g.eps2, -(g.gamma1 + g.gamma2)) + omega0);
                ModelParams::new(Complex64::new(1.0, 1.0), omega0, rho, ONE)
            }
        };
        Ok((g, model))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub value: f64,
    pub n: u64,
    /// `None` when the GMM block is degenerate at this value.
    pub e_plus: Option<CScalar>,
    pub e_minus: Option<CScalar>,
    pub is_ep: bool,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlaneScan {
    pub kind: ScanKind,
    pub grid: Vec<ScanPoint>,
    pub ep_markers: Vec<(f64, u64)>,
}

/// Sector levels over a grid of scanned values and sector indices.
///
/// `closure` maps a scanned value to GMM inputs and model parameters. Values
/// at which the GMM block is degenerate are flagged, not fatal.
pub fn scan_plane_with<F>(kind: ScanKind, gmm_base: &GmmParams, values: &[f64], n_values: &[u64], closure: F) -> Result<PlaneScan>
where
    F: Fn(&GmmParams, f64) -> Result<(GmmParams, ModelParams)> + Sync,
{
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("scan values must be finite".into()));
    }
    if n_values.contains(&0) {
        return Err(Error::GroundSector);
    }
    let per_value: Vec<Vec<ScanPoint>> = values
        .par_iter()
        .map(|&value| {
            let (g, model) = closure(gmm_base, value)?;
            let degenerate = g.nu0 == Complex64::new(0.0, 0.0)
                || gmm_is_degenerate_rel(&g, DEFAULT_DEGENERACY_TOL)
                || !model.is_finite();
            n_values
                .iter()
                .map(|&n| {
                    if degenerate {
                        return Ok(ScanPoint {
                            value,
                            n,
                            e_plus: None,
                            e_minus: None,
                            is_ep: false,
                            degenerate: true,
                        });
                    }
                    let (plus, minus) = sector_pair(&model, n)?;
                    Ok(ScanPoint {
                        value,
                        n,
                        e_plus: Some(plus.energy),
                        e_minus: Some(minus.energy),
                        is_ep: is_coalesced(&model, n, plus.energy, minus.energy),
                        degenerate: false,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let grid: Vec<ScanPoint> = per_value.into_iter().flatten().collect();
    let ep_markers = grid.iter().filter(|p| p.is_ep).map(|p| (p.value, p.n)).collect();
    Ok(PlaneScan { kind, grid, ep_markers })
}

pub fn scan_plane(preset: &ScanPreset, gmm_base: &GmmParams, values: &[f64], n_values: &[u64]) -> Result<PlaneScan> {
    scan_plane_with(preset.kind, gmm_base, values, n_values, |g, v| preset.evaluate(g, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> CScalar {
        Complex64::new(re, im)
    }

    fn tau_line_base() -> ModelParams {
        ModelParams::new(c(3.0, 0.0), c(3.0, 0.0), ONE, ONE)
    }

    #[test]
    fn linspace_hits_grid_points_exactly() {
        let t = linspace(-30.0, 30.0, 601);
        assert_eq!(t.len(), 601);
        assert_eq!((t[0], t[100], t[300], t[500], t[600]), (-30.0, -20.0, 0.0, 20.0, 30.0));
    }

    #[test]
    fn unit_sector_eps_at_two() {
        let s = sweep_tau(&tau_line_base(), 1, -4.0, 4.0, 81).unwrap();
        assert_eq!(s.ep_taus(), vec![-2.0, 2.0]);
    }

    #[test]
    fn resonance_splitting_is_real() {
        let s = sweep_tau(&tau_line_base(), 100, -30.0, 30.0, 601).unwrap();
        let (ep, em) = (s.e_plus[300], s.e_minus[300]);
        assert!((ep - em - c(20.0, 0.0)).norm() < 1e-12);
        assert_eq!(s.regime[300], Regime::EqualImag);
        assert_eq!(s.regime[0], Regime::EqualReal);
    }

    #[test]
    fn sweep_tau_rejects_bad_input() {
        assert!(sweep_tau(&tau_line_base(), 1, 0.0, 1.0, 1).is_err());
        assert!(sweep_tau(&tau_line_base(), 1, 1.0, 0.0, 10).is_err());
        let complex_omega = ModelParams::new(c(3.0, 1.0), ONE, ONE, ONE);
        assert!(sweep_tau(&complex_omega, 1, 0.0, 1.0, 10).is_err());
    }

    #[test]
    fn sweep_n_locates_sector() {
        for choice in [TauChoice::PlusI, TauChoice::MinusI] {
            let t = sweep_n(&tau_line_base(), 20.0, choice, 1, 200).unwrap();
            assert_eq!(t.min_gap_n, 100);
            assert!(t.min_gap <= 1e-9);
            let t = sweep_n(&tau_line_base(), 2.0, choice, 1, 50).unwrap();
            assert_eq!(t.min_gap_n, 1);
        }
    }

    #[test]
    fn sweep_n_without_square_sector() {
        // (21/2)² = 110.25 is not an integer.
        let t = sweep_n(&tau_line_base(), 21.0, TauChoice::MinusI, 1, 200).unwrap();
        assert_eq!(t.min_gap_n, 110);
        assert!(t.min_gap > 1e-3);
        assert!(t.rows.iter().all(|r| !r.is_ep));
    }

    #[test]
    fn encircle_swaps_around_ep() {
        let r = encircle(&tau_line_base(), 100, 20.0, 1.0, 720).unwrap();
        assert!(r.swapped);
        assert_eq!(r.theta.len(), 721);
        assert!((r.final_value() - r.start_minus).norm() < 1e-8);
    }

    #[test]
    fn encircle_without_ep_returns() {
        let r = encircle(&tau_line_base(), 100, 25.0, 1.0, 720).unwrap();
        assert!(!r.swapped);
        assert!((r.final_value() - r.start_plus).norm() < 1e-8);
    }

    #[test]
    fn double_loop_restores_branch() {
        let r = encircle_loops(&tau_line_base(), 100, 20.0, 1.0, 720, 2).unwrap();
        assert!(!r.swapped);
        assert!((r.final_value() - r.start_plus).norm() < 1e-8);
    }

    #[test]
    fn loop_through_ep_is_rejected() {
        // center 21, radius 1 passes exactly through τ = 20 at θ = π.
        let err = encircle(&tau_line_base(), 100, 21.0, 1.0, 8).unwrap_err();
        assert!(matches!(err, Error::LoopThroughEp { .. }), "{err:?}");
        assert!(encircle(&tau_line_base(), 100, 20.0, 0.0, 720).is_err());
        assert!(encircle(&tau_line_base(), 100, 20.0, 1.0, 4).is_err());
    }

    #[test]
    fn d_eps_marker_only_in_sector_n_tilde() {
        let preset = ScanPreset::new(ScanKind::DEps, 25);
        let scan = scan_plane(&preset, &preset.base_gmm(), &[0.0], &[24, 25, 26]).unwrap();
        assert_eq!(scan.ep_markers, vec![(0.0, 25)]);
        let at = scan.grid[1];
        assert!((at.e_plus.unwrap() - at.e_minus.unwrap()).norm() <= 1e-9);
        assert!(!scan.grid[0].is_ep && !scan.grid[2].is_ep);
    }

    #[test]
    fn d_eps_markers_for_every_detuning_asymmetry() {
        let preset = ScanPreset::new(ScanKind::DEps, 40);
        let values = linspace(-2.0, 2.0, 41);
        let scan = scan_plane(&preset, &preset.base_gmm(), &values, &[39, 40, 41]).unwrap();
        assert_eq!(scan.ep_markers.len(), values.len());
        assert!(scan.ep_markers.iter().all(|&(_, n)| n == 40));
    }

    #[test]
    fn d_gamma_reading_matters() {
        let mut preset = ScanPreset::new(ScanKind::DGamma, 25);
        let values = [0.5, 1.0, 2.0];
        let scan = scan_plane(&preset, &preset.base_gmm(), &values, &[25]).unwrap();
        assert_eq!(scan.ep_markers.len(), 3);
        preset.reading = DGammaReading::ImaginaryTimesSquare;
        let scan = scan_plane(&preset, &preset.base_gmm(), &values, &[25]).unwrap();
        assert!(scan.ep_markers.is_empty());
    }

    #[test]
    fn nu0_scan_flags_degenerate_point_and_moves_ep() {
        let preset = ScanPreset::new(ScanKind::Nu0, 25);
        let values = [0.5, 1.0, 1.001, 1.5];
        let scan = scan_plane(&preset, &preset.base_gmm(), &values, &[25]).unwrap();
        assert!(scan.grid[0].degenerate && scan.grid[0].e_plus.is_none());
        assert_eq!(scan.ep_markers, vec![(1.0, 25), (1.001, 25), (1.5, 25)]);
        let e = |i: usize| scan.grid[i].e_plus.unwrap();
        let small_step = (e(2) - e(1)).norm();
        // dE/dν₀ ≈ 25.5 · 4/√3 ≈ 59 at ν₀ = 1.
        assert!(small_step > 0.0 && small_step < 0.1);
        assert!((e(3) - e(1)).norm() > 10.0 * small_step);
    }
}
