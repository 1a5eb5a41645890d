//! Verification run configuration, read from TOML.
//!
//! ```toml
//! suite = "random-bounds"
//! families = ["lap", "dk", "dbar", "mixed"]
//! k_min = 1
//! k_max_real = 4
//! k_max_complex = 3
//! alpha_min = 1.0
//! alpha_max = 3.0
//! c_min = -5.0
//! c_max = 5.0
//! band = 24
//! degree = 96
//! complex_band = 8
//! complex_degree = 16
//! trials = 200
//! complex_trials = 100
//! seed = 0
//! tol_bound = 1e-6
//! tol_residual = 1e-8
//! lambdas = [0.5, 2.0, 4.0]
//! mixed_exponent = 1
//! phi = [0.0, 0.0, 1.0, 0.0, 0.08333333333333333]
//! out = "report.json"
//! csv = "report.csv"
//! timing = false
//! ```
//!
//! Every key is optional; missing keys take the defaults of the suite.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gaussinv::operator::Family;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    EqualityPins,
    RandomBounds,
    Commutator,
    RightInverse,
    Scaled,
    Domain,
    Convex,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::EqualityPins,
        Suite::RandomBounds,
        Suite::Commutator,
        Suite::RightInverse,
        Suite::Scaled,
        Suite::Domain,
        Suite::Convex,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::EqualityPins => "equality-pins",
            Suite::RandomBounds => "random-bounds",
            Suite::Commutator => "commutator",
            Suite::RightInverse => "right-inverse",
            Suite::Scaled => "scaled",
            Suite::Domain => "domain",
            Suite::Convex => "convex",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown suite '{s}'")))
    }
}

/// Settings of one verification run. Field order is the order of the
/// config echo in the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialConfig {
    pub suite: Suite,
    pub families: Vec<String>,
    pub k_min: usize,
    pub k_max_real: usize,
    pub k_max_complex: usize,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub c_min: f64,
    pub c_max: f64,
    pub band: usize,
    pub degree: usize,
    pub complex_band: usize,
    pub complex_degree: usize,
    pub trials: usize,
    pub complex_trials: usize,
    pub seed: u64,
    pub tol_bound: f64,
    pub tol_residual: f64,
    pub lambdas: Vec<f64>,
    /// Weight `e^{-λ|z-z₀|²}` (1) or `e^{-λ²|z-z₀|²}` (2) for `∂^k∂̄^k`.
    pub mixed_exponent: u8,
    pub phi: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    pub timing: bool,
}

/// The same fields, all optional, as read from a file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialConfig {
    suite: Option<Suite>,
    families: Option<Vec<String>>,
    k_min: Option<usize>,
    k_max_real: Option<usize>,
    k_max_complex: Option<usize>,
    alpha_min: Option<f64>,
    alpha_max: Option<f64>,
    c_min: Option<f64>,
    c_max: Option<f64>,
    band: Option<usize>,
    degree: Option<usize>,
    complex_band: Option<usize>,
    complex_degree: Option<usize>,
    trials: Option<usize>,
    complex_trials: Option<usize>,
    seed: Option<u64>,
    tol_bound: Option<f64>,
    tol_residual: Option<f64>,
    lambdas: Option<Vec<f64>>,
    mixed_exponent: Option<u8>,
    phi: Option<Vec<f64>>,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
    timing: Option<bool>,
}

pub const ALL_FAMILIES: [&str; 4] = ["lap", "dk", "dbar", "mixed"];

impl TrialConfig {
    pub fn defaults(suite: Suite) -> Self {
        let mut c = TrialConfig {
            suite,
            families: ALL_FAMILIES.iter().map(|s| s.to_string()).collect(),
            k_min: 1,
            k_max_real: 4,
            k_max_complex: 3,
            alpha_min: 1.0,
            alpha_max: 3.0,
            c_min: -5.0,
            c_max: 5.0,
            band: 24,
            degree: 96,
            complex_band: 8,
            complex_degree: 16,
            trials: 200,
            complex_trials: 100,
            seed: 0,
            tol_bound: 1e-6,
            tol_residual: 1e-8,
            lambdas: vec![0.5, 2.0, 4.0],
            mixed_exponent: 1,
            phi: vec![0.0, 0.0, 1.0, 0.0, 1.0 / 12.0],
            out: None,
            csv: None,
            timing: false,
        };
        match suite {
            Suite::EqualityPins => {
                c.k_max_real = 6;
                c.k_max_complex = 4;
                c.alpha_max = 1.0;
                c.trials = 1;
                c.complex_trials = 1;
            }
            Suite::Commutator => {
                c.k_max_complex = 4;
                c.degree = 40;
                c.complex_degree = 10;
                c.complex_band = 4;
                c.band = 20;
                c.trials = 1;
                c.complex_trials = 1;
            }
            Suite::RightInverse => {
                c.trials = 20;
                c.complex_trials = 20;
            }
            Suite::Scaled => {
                c.degree = 64;
                c.band = 16;
                c.complex_degree = 24;
                c.complex_band = 6;
                c.trials = 10;
                c.complex_trials = 10;
            }
            Suite::Domain => {
                c.degree = 48;
                c.band = 12;
                c.complex_degree = 14;
                c.complex_band = 4;
                c.trials = 50;
                c.complex_trials = 50;
            }
            Suite::Convex => {
                c.families = vec!["dk".into()];
                c.k_max_real = 1;
                c.trials = 50;
                c.complex_trials = 0;
            }
            Suite::RandomBounds => {}
        }
        c
    }

    /// Reads a TOML file; the suite named in the file (or `fallback`) picks
    /// the defaults.
    pub fn from_toml_str(text: &str, fallback: Suite) -> Result<Self, CliError> {
        let p: PartialConfig = toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))?;
        let mut c = TrialConfig::defaults(p.suite.unwrap_or(fallback));
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = p.$f { c.$f = v; } )* };
        }
        take!(
            families, k_min, k_max_real, k_max_complex, alpha_min, alpha_max, c_min, c_max, band, degree,
            complex_band, complex_degree, trials, complex_trials, seed, tol_bound, tol_residual, lambdas,
            mixed_exponent, phi,
            timing
        );
        c.out = p.out.or(c.out);
        c.csv = p.csv.or(c.csv);
        Ok(c)
    }

    pub fn from_file(path: &Path, fallback: Suite) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml_str(&text, fallback)
    }

    /// The operator families selected, expanded over the `k` ranges.
    pub fn family_list(&self) -> Result<Vec<Family>, CliError> {
        let mut out = Vec::new();
        for name in &self.families {
            match name.as_str() {
                "lap" => out.push(Family::RealLaplacian),
                "dk" | "dbar" | "mixed" => {
                    let top = if name == "dk" { self.k_max_real } else { self.k_max_complex };
                    for k in self.k_min..=top {
                        out.push(Family::from_short_name(name, k)?);
                    }
                }
                other => return Err(CliError::Usage(format!("unknown family '{other}'"))),
            }
        }
        Ok(out)
    }

    pub fn sizes(&self, family: Family) -> (usize, usize) {
        if family.is_complex() {
            (self.complex_band, self.complex_degree)
        } else {
            (self.band, self.degree)
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        if !(self.alpha_min.is_finite() && self.alpha_max.is_finite()) || self.alpha_min > self.alpha_max {
            return bad(format!("alpha range [{}, {}] is empty", self.alpha_min, self.alpha_max));
        }
        if self.alpha_min < 1.0 {
            return bad(format!("alpha range must satisfy |alpha| >= 1, got {}", self.alpha_min));
        }
        if !(self.c_min.is_finite() && self.c_max.is_finite()) || self.c_min > self.c_max {
            return bad(format!("c range [{}, {}] is empty", self.c_min, self.c_max));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.k_min == 0 {
            return bad("k_min must be at least 1".into());
        }
        if !(self.tol_bound.is_finite() && self.tol_bound >= 0.0 && self.tol_residual.is_finite() && self.tol_residual >= 0.0) {
            return bad("tolerances must be finite and nonnegative".into());
        }
        if self.mixed_exponent != 1 && self.mixed_exponent != 2 {
            return bad(format!("mixed_exponent must be 1 or 2, got {}", self.mixed_exponent));
        }
        if self.lambdas.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return bad("lambdas must be positive".into());
        }
        let families = self.family_list()?;
        if families.is_empty() && self.suite != Suite::Convex {
            return bad("no operator families selected".into());
        }
        for f in families {
            let (b, n) = self.sizes(f);
            let k = f.order();
            // the complex truncation only needs the band on the equation rows
            let need = if f.is_complex() { b + k } else { b + 4 * k };
            if need > n {
                let rule = if f.is_complex() { "B + k" } else { "B + 4k" };
                return bad(format!("{f}: {rule} = {need} exceeds truncation degree {n}"));
            }
        }
        Ok(())
    }
}
