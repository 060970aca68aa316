use nhjc_core::ep::{linspace, DGammaReading, ScanKind};
use nhjc_core::gmm::derived_quantities;
use nhjc_core::spectrum::{energy_nk, sector_pair};
use nhjc_core::{
    encircle_loops, pf_representation, scan_plane, sweep_n, sweep_tau, verify_representation, Branch,
    ModelParams, PseudoFermionRep, ScanPreset, TauChoice,
};
use num_complex::Complex64;

use crate::config::{
    EncircleBlock, GmmInput, ModelInput, ScanBlock, SpectrumBlock, SweepNBlock, SweepTauBlock,
};
use crate::error::CliError;
use crate::output::{split, split_opt, Cell, Table};

/// A finished command: the table to emit, a one-line summary and, when the run
/// must exit nonzero after writing, the reason.
pub struct Outcome {
    pub table: Table,
    pub summary: String,
    pub failure: Option<CliError>,
}

impl Outcome {
    fn ok(table: Table, summary: String) -> Self {
        Self { table, summary, failure: None }
    }
}

const CONFLICT_TOL: f64 = 1e-12;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Model parameters with ħω₀ and ρ taken from the two-level block when present.
pub fn effective_model(input: &ModelInput) -> Result<(ModelParams, Option<PseudoFermionRep>), CliError> {
    let Some(g) = input.gmm else {
        return Ok((input.base, None));
    };
    let rep = pf_representation(&g.params, g.branch, g.beta12)?;
    let conflicts = |manual: bool, given: Complex64, derived: Complex64| {
        manual && (given - derived).norm() > CONFLICT_TOL * derived.norm().max(1.0)
    };
    if conflicts(input.omega0_manual, input.base.omega0, rep.omega0) {
        return Err(usage(format!(
            "omega0 = {} conflicts with {} derived from the two-level block",
            input.base.omega0, rep.omega0
        )));
    }
    if conflicts(input.rho_manual, input.base.rho, rep.rho) {
        return Err(usage(format!(
            "rho = {} conflicts with {} derived from the two-level block",
            input.base.rho, rep.rho
        )));
    }
    Ok((ModelParams::from_rep(input.base.omega, input.base.coupling, &rep), Some(rep)))
}

fn gmm_params(t: &mut Table, g: &GmmInput) {
    t.param("eps1", g.params.eps1)
        .param("eps2", g.params.eps2)
        .param("gamma1", g.params.gamma1)
        .param("gamma2", g.params.gamma2)
        .param("nu0", g.params.nu0)
        .param("branch", g.branch.as_str())
        .param("beta12", g.beta12);
}

/// `omega0` is the literal value or, for swept commands, how it is set.
fn model_params(t: &mut Table, p: &ModelParams, omega0: Cell, gmm: Option<&GmmInput>) {
    t.param("hbar", 1.0)
        .param("omega", p.omega)
        .param("omega0", omega0)
        .param("rho", p.rho)
        .param("coupling", p.coupling);
    if let Some(g) = gmm {
        gmm_params(t, g);
    }
}

fn sector_range(n_min: u64, n_max: u64) -> Result<(), CliError> {
    if n_min < 1 || n_max < n_min {
        return Err(usage(format!("sector range must satisfy 1 <= n_min <= n_max, got [{n_min}, {n_max}]")));
    }
    Ok(())
}

fn short(x: f64) -> String {
    format!("{x}")
}

fn short_c(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{sign}{}i", z.re, z.im.abs())
}

pub fn gmm_check(input: &ModelInput) -> Result<Outcome, CliError> {
    let Some(g) = input.gmm else {
        return Err(usage("gmm-check needs a two-level block (config 'gmm' or --nu0 and friends)"));
    };
    let d = derived_quantities(&g.params);
    let disc = g.params.discriminant();
    let mut t = Table::new(
        "gmm-check",
        &[
            "branch", "omega0_re", "omega0_im", "rho_re", "rho_im", "alpha11_re", "alpha11_im",
            "alpha12_re", "alpha12_im", "beta11_re", "beta11_im", "beta12_re", "beta12_im", "residual",
        ],
    );
    gmm_params(&mut t, &g);
    t.param("d_eps", d.d_eps).param("d_gamma", d.d_gamma).param("discriminant", disc);

    let reps: Result<Vec<PseudoFermionRep>, _> =
        Branch::BOTH.iter().map(|&b| pf_representation(&g.params, b, g.beta12)).collect();
    let head = format!("gmm-check: d_eps = {}, d_gamma = {}", short(d.d_eps), short(d.d_gamma));
    let reps = match reps {
        Ok(r) => r,
        Err(e) => {
            t.param("degenerate", true);
            let summary = format!("{head}, no pseudo-fermion representation: {e}");
            return Ok(Outcome { table: t, summary, failure: Some(e.into()) });
        }
    };
    t.param("degenerate", false);
    let mut worst = 0.0f64;
    for rep in &reps {
        let residual = verify_representation(&g.params, rep);
        worst = worst.max(residual);
        let mut row = vec![Cell::from(rep.branch.as_str())];
        for z in [rep.omega0, rep.rho, rep.alpha11, rep.alpha12, rep.beta11, rep.beta12] {
            row.extend(split(z));
        }
        row.push(residual.into());
        t.push(row);
    }
    let summary = format!(
        "{head}, nondegenerate; omega0+ = {}, omega0- = {}, max residual = {:.3e}",
        short_c(reps[0].omega0),
        short_c(reps[1].omega0),
        worst
    );
    Ok(Outcome::ok(t, summary))
}

pub fn spectrum(input: &ModelInput, block: SpectrumBlock) -> Result<Outcome, CliError> {
    let (p, _) = effective_model(input)?;
    let (n_min, n_max) = (block.n_min.unwrap_or(1), block.n_max.unwrap_or(10));
    sector_range(n_min, n_max)?;
    let mut t = Table::new(
        "spectrum",
        &[
            "n", "E_plus_re", "E_plus_im", "E_minus_re", "E_minus_im", "lambda_plus_re", "lambda_plus_im",
            "lambda_minus_re", "lambda_minus_im", "xi_plus_re", "xi_plus_im", "xi_minus_re", "xi_minus_im",
        ],
    );
    model_params(&mut t, &p, p.omega0.into(), input.gmm.as_ref());
    let ground = energy_nk(&p, 0, 0)?;
    t.param("n_min", n_min).param("n_max", n_max).param("ground_energy", ground);
    for n in n_min..=n_max {
        let (plus, minus) = sector_pair(&p, n)?;
        let mut row = vec![Cell::from(n)];
        for z in [plus.energy, minus.energy, plus.lambda, minus.lambda, plus.xi, minus.xi] {
            row.extend(split(z));
        }
        t.push(row);
    }
    let summary = format!("spectrum: sectors {n_min}..={n_max}, ground level {}", short_c(ground));
    Ok(Outcome::ok(t, summary))
}

pub fn sweep_tau_cmd(input: &ModelInput, block: SweepTauBlock) -> Result<Outcome, CliError> {
    let (p, _) = effective_model(input)?;
    let n = block.n.unwrap_or(100);
    let (lo, hi) = (block.tau_min.unwrap_or(-30.0), block.tau_max.unwrap_or(30.0));
    let steps = block.steps.unwrap_or(601);
    if n < 1 {
        return Err(usage("sweep-tau needs n >= 1"));
    }
    let sweep = sweep_tau(&p, n, lo, hi, steps)?;
    let mut t = Table::new(
        "sweep-tau",
        &["tau", "E_plus_re", "E_plus_im", "E_minus_re", "E_minus_im", "regime"],
    );
    model_params(&mut t, &p, "omega + i tau".into(), input.gmm.as_ref());
    t.param("n", n).param("tau_min", lo).param("tau_max", hi).param("steps", steps);
    for i in 0..sweep.len() {
        let mut row = vec![Cell::from(sweep.tau_values[i])];
        row.extend(split(sweep.e_plus[i]));
        row.extend(split(sweep.e_minus[i]));
        row.push(sweep.regime[i].as_str().into());
        t.push(row);
    }
    let eps: Vec<String> = sweep.ep_taus().into_iter().map(short).collect();
    let summary = format!(
        "sweep-tau: {} rows, EPs at tau = [{}]",
        sweep.len(),
        eps.join(", ")
    );
    Ok(Outcome::ok(t, summary))
}

pub fn sweep_n_cmd(input: &ModelInput, block: SweepNBlock) -> Result<Outcome, CliError> {
    let (p, _) = effective_model(input)?;
    let tau = block.tau.unwrap_or(20.0);
    let choice: TauChoice = block
        .choice
        .as_deref()
        .unwrap_or("plus_i")
        .parse()
        .map_err(|e: nhjc_core::Error| usage(e.to_string()))?;
    let (n_min, n_max) = (block.n_min.unwrap_or(1), block.n_max.unwrap_or(200));
    sector_range(n_min, n_max)?;
    if !tau.is_finite() {
        return Err(usage("tau must be finite"));
    }
    let table = sweep_n(&p, tau, choice, n_min, n_max)?;
    let mut t = Table::new(
        "sweep-n",
        &["n", "E_plus_re", "E_plus_im", "E_minus_re", "E_minus_im", "gap_abs"],
    );
    let omega0 = match choice {
        TauChoice::PlusI => "omega - i tau",
        TauChoice::MinusI => "omega + i tau",
    };
    model_params(&mut t, &p, omega0.into(), input.gmm.as_ref());
    t.param("tau", tau)
        .param("choice", choice.as_str())
        .param("n_min", n_min)
        .param("n_max", n_max);
    for r in &table.rows {
        let mut row = vec![Cell::from(r.n)];
        row.extend(split(r.e_plus));
        row.extend(split(r.e_minus));
        row.push(r.gap.into());
        t.push(row);
    }
    let eps: Vec<String> = table.rows.iter().filter(|r| r.is_ep).map(|r| r.n.to_string()).collect();
    let summary = format!(
        "sweep-n: {} rows, minimum gap {:.3e} at n = {}, EPs at n = [{}]",
        table.rows.len(),
        table.min_gap,
        table.min_gap_n,
        eps.join(", ")
    );
    Ok(Outcome::ok(t, summary))
}

pub fn encircle_cmd(input: &ModelInput, block: EncircleBlock) -> Result<Outcome, CliError> {
    let (p, _) = effective_model(input)?;
    let n = block.n.unwrap_or(100);
    let center = block.center.unwrap_or(20.0);
    let radius = block.radius.unwrap_or(1.0);
    let steps = block.steps.unwrap_or(720);
    let loops = block.loops.unwrap_or(1);
    let r = encircle_loops(&p, n, center, radius, steps, loops)?;
    let mut t = Table::new(
        "encircle",
        &["theta", "tau_re", "tau_im", "track_re", "track_im", "other_re", "other_im"],
    );
    model_params(&mut t, &p, "omega + i tau".into(), input.gmm.as_ref());
    t.param("n", n)
        .param("center", center)
        .param("radius", radius)
        .param("steps", steps)
        .param("loops", loops);
    for i in 0..r.theta.len() {
        let mut row = vec![Cell::from(r.theta[i])];
        row.extend(split(r.tau[i]));
        row.extend(split(r.branch_track[i]));
        row.extend(split(r.other[i]));
        t.push(row);
    }
    t.footer("swapped", r.swapped);
    let summary = format!(
        "encircle: n = {n}, center = {}, radius = {}, loops = {loops}, swapped: {}",
        short(center),
        short(radius),
        r.swapped
    );
    Ok(Outcome::ok(t, summary))
}

pub fn parse_scan_kind(s: &str) -> Result<ScanKind, CliError> {
    match s {
        "d_eps" | "d-eps" => Ok(ScanKind::DEps),
        "d_gamma" | "d-gamma" => Ok(ScanKind::DGamma),
        "nu0" => Ok(ScanKind::Nu0),
        other => Err(usage(format!("unknown scan kind '{other}' (d_eps, d_gamma, nu0)"))),
    }
}

pub fn parse_reading(s: &str) -> Result<DGammaReading, CliError> {
    match s {
        "squared-product" => Ok(DGammaReading::SquaredProduct),
        "i-times-square" => Ok(DGammaReading::ImaginaryTimesSquare),
        other => Err(usage(format!("unknown d_gamma reading '{other}' (squared-product, i-times-square)"))),
    }
}

pub fn reading_str(r: DGammaReading) -> &'static str {
    match r {
        DGammaReading::SquaredProduct => "squared-product",
        DGammaReading::ImaginaryTimesSquare => "i-times-square",
    }
}

const MAX_LISTED_MARKERS: usize = 10;

pub fn scan_cmd(input: &ModelInput, block: ScanBlock) -> Result<Outcome, CliError> {
    if input.any_manual {
        return Err(usage("scan derives every model parameter from its closure; omit the model block and flags"));
    }
    let kind = parse_scan_kind(block.kind.as_deref().unwrap_or("d_eps"))?;
    let mut preset = ScanPreset::new(kind, block.n_tilde.unwrap_or(25));
    preset.reading = parse_reading(block.reading.as_deref().unwrap_or("squared-product"))?;
    if preset.n_tilde < 1 {
        return Err(usage("n_tilde must be >= 1"));
    }
    let default_range = match kind {
        ScanKind::DEps | ScanKind::DGamma => (-1.0, 1.0),
        ScanKind::Nu0 => (0.25, 1.75),
    };
    let lo = block.value_min.unwrap_or(default_range.0);
    let hi = block.value_max.unwrap_or(default_range.1);
    let steps = block.steps.unwrap_or(21);
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi || steps < 2 {
        return Err(usage(format!("invalid scan range [{lo}, {hi}] with {steps} steps")));
    }
    let (n_min, n_max) = (block.n_min.unwrap_or(1), block.n_max.unwrap_or(50));
    sector_range(n_min, n_max)?;
    let base = input.gmm.map_or_else(|| preset.base_gmm(), |g| g.params);

    let values = linspace(lo, hi, steps);
    let n_values: Vec<u64> = (n_min..=n_max).collect();
    let scan = scan_plane(&preset, &base, &values, &n_values)?;

    let mut t = Table::new(
        "scan",
        &["param_value", "n", "E_plus_re", "E_plus_im", "E_minus_re", "E_minus_im", "is_ep"],
    );
    t.param("hbar", 1.0)
        .param("kind", kind.as_str())
        .param("n_tilde", preset.n_tilde)
        .param("reading", reading_str(preset.reading))
        .param("eps1", base.eps1)
        .param("eps2", base.eps2)
        .param("gamma1", base.gamma1)
        .param("gamma2", base.gamma2)
        .param("nu0", base.nu0)
        .param("coupling", 1.0)
        .param("value_min", lo)
        .param("value_max", hi)
        .param("steps", steps)
        .param("n_min", n_min)
        .param("n_max", n_max);
    let mut degenerate = Vec::new();
    for pt in &scan.grid {
        if pt.degenerate && degenerate.last() != Some(&pt.value) {
            degenerate.push(pt.value);
        }
        let mut row = vec![Cell::from(pt.value), Cell::from(pt.n)];
        row.extend(split_opt(pt.e_plus));
        row.extend(split_opt(pt.e_minus));
        row.push(pt.is_ep.into());
        t.push(row);
    }
    let degenerate_list: Vec<String> = degenerate.iter().map(|v| short(*v)).collect();
    t.footer("ep_markers", scan.ep_markers.len())
        .footer("degenerate_values", format!("[{}]", degenerate_list.join(" ")));
    let mut markers: Vec<String> = scan
        .ep_markers
        .iter()
        .take(MAX_LISTED_MARKERS)
        .map(|(v, n)| format!("({}, {n})", short(*v)))
        .collect();
    if scan.ep_markers.len() > MAX_LISTED_MARKERS {
        markers.push("...".into());
    }
    let summary = format!(
        "scan: {} over {} values x {} sectors, {} EP markers [{}], {} degenerate values",
        kind.as_str(),
        values.len(),
        n_values.len(),
        scan.ep_markers.len(),
        markers.join(", "),
        degenerate.len()
    );
    Ok(Outcome::ok(t, summary))
}
