use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use infgroups::groups::GroupKind;

/// Default bounds on `m·K` and the polynomial degree.
pub const MAX_COORDS: usize = 2;
pub const MAX_DEGREE: usize = 4;

#[derive(Parser, Debug)]
#[command(name = "infgroups", version, about = "Certified numerical checks for infinite classical groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Override the tolerance of every certificate.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Truncation `m,K` (rank and number of columns of λ).
    #[arg(long, global = true)]
    pub trunc: Option<String>,
    /// Maximum total polynomial degree of the basis.
    #[arg(long, global = true)]
    pub degree: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub kind: Option<KindArg>,
    /// Number of random samples drawn by the check.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Report path; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Gl,
    Sp,
    O,
}

impl From<KindArg> for GroupKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Gl => GroupKind::GL,
            KindArg::Sp => GroupKind::Sp,
            KindArg::O => GroupKind::O,
        }
    }
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Exact generator relations of Sp(∞)/O(∞) windows.
    VerifyRelations {
        #[arg(long)]
        x: Option<PathBuf>,
        #[arg(long)]
        y: Option<PathBuf>,
        #[arg(long)]
        b: Option<PathBuf>,
        #[arg(long)]
        g: Option<PathBuf>,
    },
    /// Closed-form spherical function against the vacuum integral.
    Spherical {
        #[arg(long)]
        a: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        beta: f64,
    },
    /// Positive definiteness and bi-invariance of the spherical function.
    GramCheck {
        #[arg(long)]
        a: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        beta: f64,
    },
    /// Galerkin matrix of a motion-group element, with unitarity checks.
    RepMatrix {
        #[arg(long)]
        a: Option<PathBuf>,
        #[arg(long)]
        z: Option<PathBuf>,
        #[arg(long)]
        g: Option<PathBuf>,
        #[arg(long)]
        h: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        beta: f64,
    },
    /// Commutation of τ(u) with the representation.
    Commutant {
        #[arg(long)]
        a: Option<PathBuf>,
        #[arg(long)]
        z: Option<PathBuf>,
        #[arg(long)]
        u: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        beta: f64,
    },
    /// Fourier fixed point of the stabilizing vector.
    FourierFixedpoint {
        #[arg(long)]
        a: Option<PathBuf>,
    },
    /// Block canonical form of an admissible Hermitian matrix and its R.
    CanonicalForm {
        #[arg(long)]
        a: Option<PathBuf>,
    },
    /// Unitarity, commutation relations and R-dependence of the level-q system.
    GkCheck {
        #[arg(long)]
        a: Option<PathBuf>,
        #[arg(long)]
        z: Option<PathBuf>,
    },
    /// Stabilization of the vacuum functional along block shifts.
    Asf {
        #[arg(long)]
        a: Option<PathBuf>,
        #[arg(long)]
        g: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        beta: f64,
        /// Length of the shift sequence.
        #[arg(long, default_value_t = 6)]
        count: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyRelations { .. } => "verify-relations",
            Command::Spherical { .. } => "spherical",
            Command::GramCheck { .. } => "gram-check",
            Command::RepMatrix { .. } => "rep-matrix",
            Command::Commutant { .. } => "commutant",
            Command::FourierFixedpoint { .. } => "fourier-fixedpoint",
            Command::CanonicalForm { .. } => "canonical-form",
            Command::GkCheck { .. } => "gk-check",
            Command::Asf { .. } => "asf",
        }
    }

    fn inputs(&self) -> BTreeMap<&'static str, PathBuf> {
        let mut out = BTreeMap::new();
        let mut put = |k: &'static str, p: &Option<PathBuf>| {
            if let Some(p) = p {
                out.insert(k, p.clone());
            }
        };
        match self {
            Command::VerifyRelations { x, y, b, g } => {
                put("x", x);
                put("y", y);
                put("b", b);
                put("g", g);
            }
            Command::Spherical { a, .. }
            | Command::GramCheck { a, .. }
            | Command::FourierFixedpoint { a }
            | Command::CanonicalForm { a } => put("a", a),
            Command::RepMatrix { a, z, g, h, .. } => {
                put("a", a);
                put("z", z);
                put("g", g);
                put("h", h);
            }
            Command::Commutant { a, z, u, .. } => {
                put("a", a);
                put("z", z);
                put("u", u);
            }
            Command::GkCheck { a, z } => {
                put("a", a);
                put("z", z);
            }
            Command::Asf { a, g, .. } => {
                put("a", a);
                put("g", g);
            }
        }
        out
    }
}

/// Validated run configuration; recorded verbatim in the report.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub inputs: BTreeMap<&'static str, PathBuf>,
    pub kind: Option<&'static str>,
    pub tolerance: Option<f64>,
    pub seed: u64,
    pub truncation: Option<(usize, usize)>,
    pub degree: Option<usize>,
    pub samples: Option<usize>,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self> {
        let c = &cli.common;
        if let Some(t) = c.tol {
            if !(t >= 0.0 && t.is_finite()) {
                bail!("--tol must be a finite nonnegative number");
            }
        }
        let truncation = c.trunc.as_deref().map(parse_trunc).transpose()?;
        if let Some((m, k)) = truncation {
            if m == 0 || k == 0 {
                bail!("--trunc entries must be positive");
            }
            if m * k > MAX_COORDS {
                bail!("truncation guard: m*K = {} exceeds {MAX_COORDS}", m * k);
            }
        }
        if let Some(d) = c.degree {
            if d > MAX_DEGREE {
                bail!("truncation guard: degree {d} exceeds {MAX_DEGREE}");
            }
        }
        if c.samples == Some(0) {
            bail!("--samples must be positive");
        }
        let inputs = cli.command.inputs();
        for (name, path) in &inputs {
            if !path.exists() {
                bail!("input --{name} does not exist: {}", path.display());
            }
        }
        Ok(Self {
            command: cli.command.name(),
            inputs,
            kind: c.kind.map(|k| GroupKind::from(k).name()),
            tolerance: c.tol,
            seed: c.seed,
            truncation,
            degree: c.degree,
            samples: c.samples,
        })
    }
}

fn parse_trunc(s: &str) -> Result<(usize, usize)> {
    let (m, k) = s.split_once(',').context("--trunc expects `m,K`")?;
    let m = m.trim().parse().context("--trunc: m is not an integer")?;
    let k = k.trim().parse().context("--trunc: K is not an integer")?;
    Ok((m, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig> {
        RunConfig::from_cli(&Cli::try_parse_from(args)?)
    }

    #[test]
    fn guard_rejects_large_truncation() {
        assert!(parse(&["infgroups", "rep-matrix", "--trunc", "2,2"]).is_err());
        assert!(parse(&["infgroups", "rep-matrix", "--degree", "5"]).is_err());
        assert!(parse(&["infgroups", "rep-matrix", "--trunc", "1,2", "--degree", "3"]).is_ok());
    }

    #[test]
    fn missing_input_is_a_config_error() {
        assert!(parse(&["infgroups", "gram-check", "--a", "/nonexistent/a.json"]).is_err());
    }

    #[test]
    fn flags_after_subcommand() {
        let cfg = parse(&["infgroups", "spherical", "--seed", "7", "--kind", "gl", "--beta", "-0.5"]).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.kind, Some("GL"));
    }
}
