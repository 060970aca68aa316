//! Run configuration: a JSON document overlaid by command-line flags.
//!
//! Precedence is built-in defaults, then the `--config` file, then flags.

use std::path::{Path, PathBuf};

use clap::Args;
use nhjc_core::{Branch, GmmParams, ModelParams};
use num_complex::Complex64;
use serde::Deserialize;

use crate::error::CliError;

/// A complex number in a config file: `3`, `[3, 20]` or `"3+20i"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ComplexInput {
    Real(f64),
    Pair([f64; 2]),
    Text(String),
}

impl ComplexInput {
    fn value(&self, field: &str) -> Result<Complex64, CliError> {
        match self {
            ComplexInput::Real(x) => Ok(Complex64::new(*x, 0.0)),
            ComplexInput::Pair([re, im]) => Ok(Complex64::new(*re, *im)),
            ComplexInput::Text(s) => parse_complex(s).map_err(|e| CliError::Usage(format!("{field}: {e}"))),
        }
    }
}

/// Parses `a`, `bi`, `a+bi` or `a-bi` (`j` is accepted for `i`).
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse '{s}' as a complex number");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return t.parse::<f64>().map(|x| Complex64::new(x, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_s, im_s) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re_s.is_empty() { 0.0 } else { re_s.parse::<f64>().map_err(|_| bad())? };
    let im = match im_s {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

/// Lossless `a+bi` rendering; [`parse_complex`] reads it back.
pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:.16e}{sign}{:.16e}i", z.re, z.im.abs())
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub omega: Option<ComplexInput>,
    pub omega0: Option<ComplexInput>,
    pub rho: Option<ComplexInput>,
    pub coupling: Option<ComplexInput>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GmmBlock {
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    pub nu0: Option<ComplexInput>,
    pub branch: Option<String>,
    pub beta12: Option<ComplexInput>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub path: Option<PathBuf>,
    pub format: Option<String>,
}

/// Model and two-level-block flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct ModelFlags {
    /// Boson frequency ħω, e.g. `3` or `3-0.1i`.
    #[arg(long, global = true, value_parser = parse_complex)]
    pub omega: Option<Complex64>,
    /// Pseudo-fermion frequency ħω₀.
    #[arg(long, global = true, value_parser = parse_complex)]
    pub omega0: Option<Complex64>,
    /// Energy offset ρ.
    #[arg(long, global = true, value_parser = parse_complex)]
    pub rho: Option<Complex64>,
    /// Boson-fermion coupling ε.
    #[arg(long, global = true, value_parser = parse_complex)]
    pub coupling: Option<Complex64>,
    /// Two-level block: level energy ε₁.
    #[arg(long, global = true)]
    pub eps1: Option<f64>,
    #[arg(long, global = true)]
    pub eps2: Option<f64>,
    /// Two-level block: decay rate Γ₁ (≥ 0).
    #[arg(long, global = true)]
    pub gamma1: Option<f64>,
    #[arg(long, global = true)]
    pub gamma2: Option<f64>,
    /// Two-level block: off-diagonal coupling ν₀.
    #[arg(long, global = true, value_parser = parse_complex)]
    pub nu0: Option<Complex64>,
    /// Pseudo-fermion branch used to derive ħω₀ and ρ (plus|minus).
    #[arg(long, global = true)]
    pub branch: Option<String>,
    /// Free gauge entry β₁₂ of the representation.
    #[arg(long, global = true, value_parser = parse_complex)]
    pub beta12: Option<Complex64>,
}

macro_rules! command_block {
    ($name:ident { $($(#[$doc:meta])* $field:ident : $ty:ty),* $(,)? }) => {
        #[derive(Debug, Clone, Default, Deserialize, Args)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            $($(#[$doc])* #[arg(long)] pub $field: Option<$ty>,)*
        }

        impl $name {
            /// Fields set in `self` win over `base`.
            pub fn over(self, base: Option<Self>) -> Self {
                let base = base.unwrap_or_default();
                Self { $($field: self.$field.or(base.$field),)* }
            }
        }
    };
}

command_block!(SpectrumBlock {
    /// First sector (≥ 1).
    n_min: u64,
    /// Last sector.
    n_max: u64,
});

command_block!(SweepTauBlock {
    /// Sector index.
    n: u64,
    tau_min: f64,
    tau_max: f64,
    /// Number of τ samples, endpoints included.
    steps: usize,
});

command_block!(SweepNBlock {
    /// Fixed τ.
    tau: f64,
    /// plus_i (δ = -iτ) or minus_i (δ = iτ).
    choice: String,
    n_min: u64,
    n_max: u64,
});

command_block!(EncircleBlock {
    /// Sector index.
    n: u64,
    /// Real loop centre in the τ plane.
    center: f64,
    radius: f64,
    /// Grid points per loop.
    steps: usize,
    /// Number of times the loop is traversed.
    loops: u32,
});

command_block!(ScanBlock {
    /// d_eps, d_gamma or nu0.
    kind: String,
    /// Sector placed at the EP by the closure.
    n_tilde: u64,
    value_min: f64,
    value_max: f64,
    /// Number of scanned values, endpoints included.
    steps: usize,
    n_min: u64,
    n_max: u64,
    /// Reading of the ΔΓ term in the d_gamma closure: squared-product or i-times-square.
    reading: String,
});

command_block!(VerifyBlock {
    /// Random models drawn for the representation checks.
    draws: usize,
    /// Random full models pushed through the truncated-matrix residual check.
    oracle_draws: usize,
    /// Boson cutoff of the truncated matrices.
    cutoff: usize,
    /// Largest sector in the residual checks.
    n_max: u64,
    /// Largest sector in the biorthogonality check.
    bio_n_max: usize,
    /// Sector used by the EP checks.
    n: u64,
    /// Loop radius of the encircling check.
    radius: f64,
    /// Grid points of the encircling loop.
    steps: usize,
});

/// The JSON config document. At most one command block may be present and it
/// must belong to the subcommand being run.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<ModelBlock>,
    pub gmm: Option<GmmBlock>,
    pub seed: Option<u64>,
    pub hbar: Option<f64>,
    pub output: Option<OutputBlock>,
    pub spectrum: Option<SpectrumBlock>,
    pub sweep_tau: Option<SweepTauBlock>,
    pub sweep_n: Option<SweepNBlock>,
    pub encircle: Option<EncircleBlock>,
    pub scan: Option<ScanBlock>,
    pub verify: Option<VerifyBlock>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    /// Rejects command blocks that belong to another subcommand.
    pub fn check_blocks(&self, command: &str) -> Result<(), CliError> {
        let present = [
            ("spectrum", self.spectrum.is_some()),
            ("sweep_tau", self.sweep_tau.is_some()),
            ("sweep_n", self.sweep_n.is_some()),
            ("encircle", self.encircle.is_some()),
            ("scan", self.scan.is_some()),
            ("verify", self.verify.is_some()),
        ];
        let own = command.replace('-', "_");
        match present.iter().find(|(name, set)| *set && *name != own) {
            Some((name, _)) => Err(CliError::Usage(format!(
                "config block '{name}' does not belong to subcommand '{command}'"
            ))),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Two-level-block inputs after merging; no representation is built yet.
#[derive(Debug, Clone, Copy)]
pub struct GmmInput {
    pub params: GmmParams,
    pub branch: Branch,
    pub beta12: Complex64,
}

/// Model inputs after merging, before any two-level block is applied.
#[derive(Debug, Clone)]
pub struct ModelInput {
    pub base: ModelParams,
    pub omega0_manual: bool,
    pub rho_manual: bool,
    /// Any of the four model values came from the config or a flag.
    pub any_manual: bool,
    pub gmm: Option<GmmInput>,
}

fn pick(flag: Option<Complex64>, cfg: Option<&ComplexInput>, field: &str) -> Result<Option<Complex64>, CliError> {
    match (flag, cfg) {
        (Some(z), _) => Ok(Some(z)),
        (None, Some(c)) => c.value(field).map(Some),
        (None, None) => Ok(None),
    }
}

/// Defaults are ħω = ħω₀ = 3, ρ = 1, ε = 1.
pub fn merge_model(flags: &ModelFlags, cfg: &RunConfig) -> Result<ModelInput, CliError> {
    let m = cfg.model.clone().unwrap_or_default();
    let omega = pick(flags.omega, m.omega.as_ref(), "model.omega")?;
    let omega0 = pick(flags.omega0, m.omega0.as_ref(), "model.omega0")?;
    let rho = pick(flags.rho, m.rho.as_ref(), "model.rho")?;
    let coupling = pick(flags.coupling, m.coupling.as_ref(), "model.coupling")?;
    let base = ModelParams::new(
        omega.unwrap_or(Complex64::new(3.0, 0.0)),
        omega0.unwrap_or(Complex64::new(3.0, 0.0)),
        rho.unwrap_or(Complex64::new(1.0, 0.0)),
        coupling.unwrap_or(Complex64::new(1.0, 0.0)),
    );
    if !base.is_finite() {
        return Err(CliError::Usage("model parameters must be finite".into()));
    }
    Ok(ModelInput {
        base,
        omega0_manual: omega0.is_some(),
        rho_manual: rho.is_some(),
        any_manual: omega.is_some() || omega0.is_some() || rho.is_some() || coupling.is_some(),
        gmm: merge_gmm(flags, cfg)?,
    })
}

/// `None` when neither the config nor the flags mention the two-level block.
pub fn merge_gmm(flags: &ModelFlags, cfg: &RunConfig) -> Result<Option<GmmInput>, CliError> {
    let any_flag = flags.eps1.is_some()
        || flags.eps2.is_some()
        || flags.gamma1.is_some()
        || flags.gamma2.is_some()
        || flags.nu0.is_some()
        || flags.branch.is_some()
        || flags.beta12.is_some();
    if cfg.gmm.is_none() && !any_flag {
        return Ok(None);
    }
    let g = cfg.gmm.clone().unwrap_or_default();
    let nu0 = pick(flags.nu0, g.nu0.as_ref(), "gmm.nu0")?
        .ok_or_else(|| CliError::Usage("two-level block needs nu0".into()))?;
    let branch = match flags.branch.as_ref().or(g.branch.as_ref()) {
        Some(s) => s.parse().map_err(|e: nhjc_core::Error| CliError::Usage(e.to_string()))?,
        None => Branch::Plus,
    };
    let beta12 = pick(flags.beta12, g.beta12.as_ref(), "gmm.beta12")?.unwrap_or(Complex64::new(1.0, 0.0));
    let params = GmmParams::new(
        flags.eps1.or(g.eps1).unwrap_or(0.0),
        flags.eps2.or(g.eps2).unwrap_or(0.0),
        flags.gamma1.or(g.gamma1).unwrap_or(0.0),
        flags.gamma2.or(g.gamma2).unwrap_or(0.0),
        nu0,
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(Some(GmmInput { params, branch, beta12 }))
}

/// Output path and format: flags, then the config `output` block, then stdout/CSV.
pub fn merge_output(
    out: Option<PathBuf>,
    format: Option<Format>,
    cfg: &RunConfig,
) -> Result<(Option<PathBuf>, Format), CliError> {
    let o = cfg.output.clone().unwrap_or_default();
    let format = match (format, o.format.as_deref()) {
        (Some(f), _) => f,
        (None, Some("csv")) | (None, None) => Format::Csv,
        (None, Some("json")) => Format::Json,
        (None, Some(other)) => {
            return Err(CliError::Usage(format!("unknown output format '{other}'")));
        }
    };
    Ok((out.or(o.path), format))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_complex_forms() {
        let cases = [
            ("3", (3.0, 0.0)),
            ("3+20i", (3.0, 20.0)),
            ("3 - 20i", (3.0, -20.0)),
            ("-i", (0.0, -1.0)),
            ("i", (0.0, 1.0)),
            ("2.5e-3-1e-2i", (2.5e-3, -1e-2)),
            ("-1e+2j", (0.0, -100.0)),
            ("0.5+0.5i", (0.5, 0.5)),
        ];
        for (s, (re, im)) in cases {
            assert_eq!(parse_complex(s).unwrap(), Complex64::new(re, im), "{s}");
        }
        assert!(parse_complex("3+").is_err());
        assert!(parse_complex("").is_err());
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn format_round_trips() {
        for z in [
            Complex64::new(0.1, -0.2),
            Complex64::new(-3.0, 1e-300),
            Complex64::new(1.0 / 3.0, -0.0),
            Complex64::new(6.02e23, 7.0),
        ] {
            let back = parse_complex(&format_complex(z)).unwrap();
            assert_eq!(back.re.to_bits(), z.re.to_bits());
            assert_eq!(back.im.to_bits(), z.im.to_bits());
        }
    }

    #[test]
    fn foreign_command_block_is_rejected() {
        let cfg: RunConfig = serde_json::from_str(r#"{"encircle": {"n": 4}}"#).unwrap();
        assert!(cfg.check_blocks("encircle").is_ok());
        assert!(cfg.check_blocks("sweep-tau").is_err());
    }

    #[test]
    fn config_accepts_three_complex_spellings() {
        let cfg: RunConfig =
            serde_json::from_str(r#"{"model": {"omega": 3, "omega0": [3, 20], "rho": "1-0.5i"}}"#).unwrap();
        let m = merge_model(&ModelFlags::default(), &cfg).unwrap();
        assert_eq!(m.base.omega0, Complex64::new(3.0, 20.0));
        assert_eq!(m.base.rho, Complex64::new(1.0, -0.5));
        assert!(m.omega0_manual && m.rho_manual);
    }

    #[test]
    fn flags_override_config() {
        let cfg: RunConfig = serde_json::from_str(r#"{"model": {"omega": 5}}"#).unwrap();
        let flags = ModelFlags {
            omega: Some(Complex64::new(2.0, 0.0)),
            ..Default::default()
        };
        assert_eq!(merge_model(&flags, &cfg).unwrap().base.omega, Complex64::new(2.0, 0.0));
    }
}
