//! The `verify` suite: every closed form checked against its oracle.

use nhjc_core::ep::{classify, linspace};
use nhjc_core::linalg::{CMatrix, ONE, ZERO};
use nhjc_core::spectrum::{ep_tau, sector_pair};
use nhjc_core::{
    biorthogonality_check, build_full_h, build_gmm, encircle, pf_representation, residuals_of, sector_eigen,
    self_overlap, Branch, Error, GmmParams, ModelParams, Regime, SectorEigen, TruncatedModel,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::commands::{effective_model, Outcome};
use crate::config::{ModelInput, VerifyBlock};
use crate::error::CliError;
use crate::output::{format_float, Cell, Table};

/// Deliberate corruptions used as negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Fault {
    /// Flip the sign of every λ before the right-eigenvector residuals.
    LambdaSign,
}

impl Fault {
    fn as_str(self) -> &'static str {
        match self {
            Fault::LambdaSign => "lambda-sign",
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Relation {
    AtMost,
    AtLeast,
}

struct Check {
    name: &'static str,
    value: f64,
    relation: Relation,
    threshold: f64,
}

impl Check {
    fn at_most(name: &'static str, value: f64, threshold: f64) -> Self {
        Self { name, value, relation: Relation::AtMost, threshold }
    }

    fn at_least(name: &'static str, value: f64, threshold: f64) -> Self {
        Self { name, value, relation: Relation::AtLeast, threshold }
    }

    fn pass(&self) -> bool {
        match self.relation {
            Relation::AtMost => self.value <= self.threshold,
            Relation::AtLeast => self.value >= self.threshold,
        }
    }

    fn relation_str(&self) -> &'static str {
        match self.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        }
    }
}

struct Settings {
    draws: usize,
    oracle_draws: usize,
    cutoff: usize,
    n_max: u64,
    bio_n_max: usize,
    n: u64,
    radius: f64,
    steps: usize,
}

impl Settings {
    fn from_block(b: VerifyBlock) -> Result<Self, CliError> {
        let s = Self {
            draws: b.draws.unwrap_or(100),
            oracle_draws: b.oracle_draws.unwrap_or(4),
            cutoff: b.cutoff.unwrap_or(nhjc_core::oracle::DEFAULT_CUTOFF),
            n_max: b.n_max.unwrap_or(100),
            bio_n_max: b.bio_n_max.unwrap_or(20),
            n: b.n.unwrap_or(100),
            radius: b.radius.unwrap_or(1.0),
            steps: b.steps.unwrap_or(720),
        };
        if s.n_max < 1 || s.n_max + 1 >= s.cutoff as u64 || s.bio_n_max + 1 > s.cutoff {
            return Err(CliError::Usage(format!(
                "verify needs 1 <= n_max < cutoff - 1 and bio_n_max < cutoff (n_max = {}, bio_n_max = {}, cutoff = {})",
                s.n_max, s.bio_n_max, s.cutoff
            )));
        }
        if s.n < 1 || !(s.radius > 0.0 && s.radius.is_finite()) {
            return Err(CliError::Usage("verify needs n >= 1 and a positive loop radius".into()));
        }
        Ok(s)
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A nondegenerate two-level block with |ν₀| ≥ 0.2.
fn random_gmm(rng: &mut ChaCha8Rng) -> GmmParams {
    loop {
        let nu0 = c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        if nu0.norm() < 0.2 {
            continue;
        }
        let p = GmmParams {
            eps1: rng.gen_range(-2.0..2.0),
            eps2: rng.gen_range(-2.0..2.0),
            gamma1: rng.gen_range(0.0..2.0),
            gamma2: rng.gen_range(0.0..2.0),
            nu0,
        };
        if p.discriminant().norm() > 1e-2 * 4.0 * nu0.norm_sqr() {
            return p;
        }
    }
}

fn random_gauge(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(rng.gen_range(0.3..2.0), rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Two-level inputs at which the pseudo-fermions cannot exist.
const FORCED_DEGENERACIES: [(f64, f64, f64, f64, f64, f64); 5] = [
    (0.0, 0.0, 0.0, 2.0, 1.0, 0.0),
    (0.0, 2.0, 0.0, 0.0, 0.0, 1.0),
    (0.0, 0.0, 1.0, 5.0, 2.0, 0.0),
    (2.0, 0.0, 0.0, 0.0, 0.0, -1.0),
    (0.0, 1.0, 0.0, 1.0, 0.5, 0.5),
];

fn representation_checks(rng: &mut ChaCha8Rng, s: &Settings, configured: Option<(GmmParams, Complex64)>) -> [Check; 3] {
    let mut models: Vec<(GmmParams, Complex64)> = configured.into_iter().collect();
    for _ in 0..s.draws {
        let g = random_gmm(rng);
        models.push((g, random_gauge(rng)));
    }
    let mut repr = 0.0f64;
    let mut anti = 0.0f64;
    for (g, gauge) in &models {
        for branch in Branch::BOTH {
            let Ok(rep) = pf_representation(g, branch, *gauge) else {
                repr = f64::NAN;
                continue;
            };
            let rebuilt = rep
                .number_op()
                .scale(rep.omega0)
                .add(&CMatrix::identity(2).scale(rep.rho))
                .expect("2x2");
            repr = repr.max(build_gmm(g).sub(&rebuilt).expect("2x2").max_abs());
            let ac = rep.c_mat.anticommutator(&rep.big_c_mat).expect("2x2");
            anti = anti.max(ac.sub(&CMatrix::identity(2)).expect("2x2").max_abs());
        }
    }
    let accepted = FORCED_DEGENERACIES
        .iter()
        .filter(|&&(e1, e2, g1, g2, re, im)| {
            let g = GmmParams { eps1: e1, eps2: e2, gamma1: g1, gamma2: g2, nu0: c(re, im) };
            Branch::BOTH
                .iter()
                .any(|&b| !matches!(pf_representation(&g, b, ONE), Err(Error::GmmExceptionalPoint { .. })))
        })
        .count();
    [
        Check::at_most("representation-residual", nan_max(repr), 1e-12),
        Check::at_most("anticommutator", anti, 1e-12),
        Check::at_most("degeneracy-guard", accepted as f64, 0.0),
    ]
}

fn nan_max(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x
    }
}

/// Truncated model for the configured parameters. Without a two-level block
/// the canonical pair `c = |0⟩⟨1|`, `C = c†` realizes `ħω₀ C c + ρ`.
fn configured_oracle(input: &ModelInput, p: &ModelParams, cutoff: usize) -> Result<TruncatedModel, CliError> {
    if let Some(g) = input.gmm {
        let rep = pf_representation(&g.params, g.branch, g.beta12)?;
        return Ok(build_full_h(&g.params, p, &rep, cutoff)?);
    }
    let c_mat = CMatrix::from_2x2([[ZERO, ONE], [ZERO, ZERO]]);
    let big_c_mat = c_mat.adjoint();
    let h_gmm = CMatrix::from_2x2([[p.rho, ZERO], [ZERO, p.rho + p.omega0]]);
    Ok(TruncatedModel::from_parts(h_gmm, c_mat, big_c_mat, *p, cutoff)?)
}

fn random_oracle(rng: &mut ChaCha8Rng, cutoff: usize) -> Result<TruncatedModel, CliError> {
    let g = random_gmm(rng);
    let branch = if rng.gen_bool(0.5) { Branch::Plus } else { Branch::Minus };
    let rep = pf_representation(&g, branch, random_gauge(rng))?;
    let omega = c(rng.gen_range(0.5..4.0), rng.gen_range(-1.0..1.0));
    let coupling = Complex64::from_polar(rng.gen_range(0.2..1.5), rng.gen_range(0.0..std::f64::consts::TAU));
    let p = ModelParams::from_rep(omega, coupling, &rep);
    Ok(build_full_h(&g, &p, &rep, cutoff)?)
}

fn residual_checks(models: &[TruncatedModel], s: &Settings, fault: Option<Fault>) -> Result<[Check; 2], CliError> {
    let mut right = 0.0f64;
    let mut adjoint = 0.0f64;
    for tm in models {
        let mut eigen: Vec<SectorEigen> = Vec::with_capacity(2 * s.n_max as usize);
        for n in 1..=s.n_max {
            for b in Branch::BOTH {
                let mut se = sector_eigen(tm.params(), n, b)?;
                if fault == Some(Fault::LambdaSign) {
                    se.lambda = -se.lambda;
                }
                eigen.push(se);
            }
        }
        for r in residuals_of(tm, &eigen)? {
            right = right.max(nan_max(r.right));
            adjoint = adjoint.max(nan_max(r.adjoint));
        }
    }
    Ok([
        Check::at_most("eigenpair-residual-right", right, 1e-9),
        Check::at_most("eigenpair-residual-adjoint", adjoint, 1e-9),
    ])
}

fn ep_checks(p: &ModelParams, s: &Settings) -> Result<[Check; 5], CliError> {
    let (_, tau_plus) = ep_tau(p.coupling, s.n);
    let at = |tau: f64| p.with_tau(c(tau, 0.0));

    let mut at_ep = 0.0f64;
    let mut off_ep = f64::INFINITY;
    for tau in [tau_plus, -tau_plus] {
        for b in Branch::BOTH {
            at_ep = at_ep.max(self_overlap(&at(tau), s.n, b)?.norm());
            off_ep = off_ep.min(self_overlap(&at(1.1 * tau), s.n, b)?.norm());
        }
    }

    let mut misclassified = 0usize;
    let grid = linspace(-1.5 * tau_plus, 1.5 * tau_plus, 601);
    for tau in grid.into_iter().chain([-tau_plus, tau_plus]) {
        let gap = tau.abs() - tau_plus;
        let expected = if tau.abs() == tau_plus {
            Regime::Ep
        } else if gap.abs() <= 1e-9 * tau_plus {
            continue;
        } else if gap < 0.0 {
            Regime::EqualImag
        } else {
            Regime::EqualReal
        };
        let q = at(tau);
        let (plus, minus) = sector_pair(&q, s.n)?;
        if classify(&q, s.n, plus.energy, minus.energy) != expected {
            misclassified += 1;
        }
    }

    let swap = |center: f64| match encircle(p, s.n, center, s.radius, s.steps) {
        Ok(r) => f64::from(u8::from(r.swapped)),
        Err(_) => f64::NAN,
    };
    let around = swap(tau_plus);
    let away = swap(tau_plus + 5.0 * s.radius);
    Ok([
        Check::at_most("self-overlap-at-ep", at_ep, 1e-12),
        Check::at_least("self-overlap-off-ep", off_ep, 1e-3),
        Check::at_most("regime-classification", misclassified as f64, 0.0),
        Check::at_least("encircle-swap", around, 1.0),
        Check::at_most("encircle-no-swap-away", nan_max(away), 0.0),
    ])
}

pub fn verify_cmd(input: &ModelInput, block: VerifyBlock, seed: u64, fault: Option<Fault>) -> Result<Outcome, CliError> {
    let s = Settings::from_block(block)?;
    let (p, _) = effective_model(input)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut checks: Vec<Check> = Vec::new();
    checks.extend(representation_checks(&mut rng, &s, input.gmm.map(|g| (g.params, g.beta12))));

    let mut models = vec![configured_oracle(input, &p, s.cutoff)?];
    for _ in 0..s.oracle_draws {
        models.push(random_oracle(&mut rng, s.cutoff)?);
    }
    let mut bio = 0.0f64;
    for tm in &models {
        bio = bio.max(nan_max(biorthogonality_check(tm, s.bio_n_max)?));
    }
    checks.push(Check::at_most("biorthogonality", bio, 1e-9));
    checks.extend(residual_checks(&models, &s, fault)?);
    checks.extend(ep_checks(&p, &s)?);

    let mut t = Table::new("verify", &["check", "value", "relation", "threshold", "status"]);
    t.param("hbar", 1.0)
        .param("omega", p.omega)
        .param("omega0", p.omega0)
        .param("rho", p.rho)
        .param("coupling", p.coupling);
    if let Some(g) = &input.gmm {
        t.param("eps1", g.params.eps1)
            .param("eps2", g.params.eps2)
            .param("gamma1", g.params.gamma1)
            .param("gamma2", g.params.gamma2)
            .param("nu0", g.params.nu0)
            .param("branch", g.branch.as_str())
            .param("beta12", g.beta12);
    }
    t.param("seed", seed)
        .param("fault", fault.map_or("none", Fault::as_str))
        .param("draws", s.draws)
        .param("oracle_draws", s.oracle_draws)
        .param("cutoff", s.cutoff)
        .param("n_max", s.n_max)
        .param("bio_n_max", s.bio_n_max)
        .param("n", s.n)
        .param("radius", s.radius)
        .param("steps", s.steps);
    for ch in &checks {
        t.push(vec![
            Cell::from(ch.name),
            Cell::from(ch.value),
            Cell::from(ch.relation_str()),
            Cell::from(ch.threshold),
            Cell::from(if ch.pass() { "PASS" } else { "FAIL" }),
        ]);
    }
    let failed: Vec<String> = checks
        .iter()
        .filter(|ch| !ch.pass())
        .map(|ch| format!("{} = {} (want {} {})", ch.name, format_float(ch.value), ch.relation_str(), format_float(ch.threshold)))
        .collect();
    t.footer("failed", failed.len());
    let summary = if failed.is_empty() {
        format!("verify: all {} checks passed", checks.len())
    } else {
        format!("verify: {} of {} checks failed: {}", failed.len(), checks.len(), failed.join("; "))
    };
    let failure = (!failed.is_empty()).then(|| CliError::Verify(failed.join("; ")));
    Ok(Outcome { table: t, summary, failure })
}
