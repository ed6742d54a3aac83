//! Experiment configuration: a flat `key=value` file merged with flags.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentId {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Table1,
    Hadamard,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 8] =
        [Self::Fig1, Self::Fig2, Self::Fig3, Self::Fig4, Self::Fig5, Self::Fig6, Self::Table1, Self::Hadamard];

    pub fn name(self) -> &'static str {
        match self {
            Self::Fig1 => "fig1",
            Self::Fig2 => "fig2",
            Self::Fig3 => "fig3",
            Self::Fig4 => "fig4",
            Self::Fig5 => "fig5",
            Self::Fig6 => "fig6",
            Self::Table1 => "table1",
            Self::Hadamard => "hadamard",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Self::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| {
            let known: Vec<_> = Self::ALL.iter().map(|e| e.name()).collect();
            CliError::UnknownExperiment(format!("'{s}' (known: {})", known.join(", ")))
        })
    }
}

/// Settings that may come from a file or from flags. `None` means "use the
/// experiment's default".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub n: Option<usize>,
    pub nu: Option<f64>,
    pub eps: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    /// Parses `key=value` lines; `#` starts a comment, blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut o = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| CliError::Usage(format!("config line {}: {msg}", lineno + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| bad(format!("expected key=value, got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            let num_err = |e: &dyn fmt::Display| bad(format!("{key}: {e}"));
            match key {
                "n" => o.n = Some(value.parse().map_err(|e| num_err(&e))?),
                "nu" => o.nu = Some(value.parse().map_err(|e| num_err(&e))?),
                "eps" => o.eps = Some(value.parse().map_err(|e| num_err(&e))?),
                "seed" => o.seed = Some(value.parse().map_err(|e| num_err(&e))?),
                "out" => o.out = Some(PathBuf::from(value)),
                _ => return Err(bad(format!("unknown key '{key}'"))),
            }
        }
        Ok(o)
    }

    /// `self` with every field set in `flags` replaced.
    pub fn merged_with(self, flags: Overrides) -> Self {
        Self {
            n: flags.n.or(self.n),
            nu: flags.nu.or(self.nu),
            eps: flags.eps.or(self.eps),
            seed: flags.seed.or(self.seed),
            out: flags.out.or(self.out),
        }
    }
}

pub const DEFAULT_SEED: u64 = 1;

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub id: ExperimentId,
    pub n: Option<usize>,
    pub nu: Option<f64>,
    pub eps: Option<f64>,
    pub seed: u64,
    pub out: PathBuf,
}

impl ExperimentConfig {
    pub fn new(id: ExperimentId, o: Overrides) -> Result<Self, CliError> {
        if let Some(n) = o.n {
            if n < 4 {
                return Err(CliError::Usage(format!("n must be at least 4, got {n}")));
            }
        }
        for (name, v) in [("nu", o.nu), ("eps", o.eps)] {
            if let Some(v) = v {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(CliError::Usage(format!("{name} must be finite and >= 0, got {v}")));
                }
            }
        }
        Ok(Self {
            id,
            n: o.n,
            nu: o.nu,
            eps: o.eps,
            seed: o.seed.unwrap_or(DEFAULT_SEED),
            out: o.out.unwrap_or_else(|| PathBuf::from("out").join(id.name())),
        })
    }

    /// `key=value` lines for the manifest; unset values print as `default`.
    pub fn describe(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "default".into());
        format!(
            "experiment={}\nn={}\nnu={}\neps={}\nseed={}\n",
            self.id,
            opt(self.n.map(|v| v.to_string())),
            opt(self.nu.map(|v| v.to_string())),
            opt(self.eps.map(|v| v.to_string())),
            self.seed
        )
    }
}
