//! Run configuration. Each subcommand has a section whose fields double as
//! its command-line flags; values given on the command line override the
//! config file.

use crate::error::{CliError, CliResult};
use clap::{Args, ValueEnum};
use semiquant::SymbolSpec;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Two numbers written `a,b` on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pair(pub f64, pub f64);

fn parse_numbers(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect()
}

impl FromStr for Pair {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match parse_numbers(s)?.as_slice() {
            [a, b] => Ok(Pair(*a, *b)),
            _ => Err(format!("expected two comma-separated numbers, got `{s}`")),
        }
    }
}

impl From<Pair> for (f64, f64) {
    fn from(p: Pair) -> Self {
        (p.0, p.1)
    }
}

/// Comma-separated list of numbers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct List(pub Vec<f64>);

impl FromStr for List {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let v = parse_numbers(s)?;
        if v.is_empty() {
            return Err("empty list".into());
        }
        Ok(List(v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bs,
    Gram,
    #[default]
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum BaseArg {
    #[default]
    Right,
    Left,
}

/// Fills every `None` field of `$dst` from `$src`.
macro_rules! fill {
    ($dst:expr, $src:expr; $($field:ident),* $(,)?) => {
        $( if $dst.$field.is_none() { $dst.$field = $src.$field.clone(); } )*
    };
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymbolArgs {
    /// Built-in symbol: harmonic, schrodinger, tilted, quartic_kinetic, harper.
    #[arg(allow_hyphen_values = true, long = "symbol")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Potential V(x).
    #[arg(allow_hyphen_values = true, long = "V")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<String>,
    /// Drift f(x) of the tilted symbol.
    #[arg(allow_hyphen_values = true, long = "f")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drift: Option<String>,
    /// Sub-principal term p1(x).
    #[arg(allow_hyphen_values = true, long = "p1")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p1: Option<String>,
    /// Coefficient of xi in the sub-principal term.
    #[arg(allow_hyphen_values = true, long = "p1-drift")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p1_drift: Option<String>,
    /// Second-order term p2(x).
    #[arg(allow_hyphen_values = true, long = "p2")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p2: Option<String>,
    /// Well window `a,b` for orbit searches.
    #[arg(allow_hyphen_values = true, long = "window")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<Pair>,
}

impl SymbolArgs {
    pub fn merge(&mut self, other: &SymbolArgs) {
        fill!(self, other; name, potential, drift, p1, p1_drift, p2, window);
    }

    pub fn spec(&self) -> CliResult<SymbolSpec> {
        let name = self
            .name
            .clone()
            .ok_or_else(|| CliError::Config("no symbol given (use --symbol or [symbol] name)".into()))?;
        Ok(SymbolSpec {
            name,
            potential: self.potential.clone(),
            drift: self.drift.clone(),
            p1: self.p1.clone(),
            p1_drift: self.p1_drift.clone(),
            p2: self.p2.clone(),
            window: self.window.map(Into::into),
        })
    }
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSection {
    #[arg(allow_hyphen_values = true, long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    /// Energy interval `a,b`.
    #[arg(allow_hyphen_values = true, long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<Pair>,
    #[arg(allow_hyphen_values = true, long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    /// Pair the roots with reference eigenvalues.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<bool>,
    /// Number of grid points of the reference operator.
    #[arg(allow_hyphen_values = true, long = "N")]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Half length of the periodic box.
    #[arg(allow_hyphen_values = true, long = "L")]
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub half_length: Option<f64>,
}

impl SpectrumSection {
    pub fn merge(&mut self, o: &Self) {
        fill!(self, o; h, interval, method, reference, points, half_length);
    }
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ActionsSection {
    /// Energy.
    #[arg(allow_hyphen_values = true, long = "E")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    #[arg(allow_hyphen_values = true, long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
}

impl ActionsSection {
    pub fn merge(&mut self, o: &Self) {
        fill!(self, o; energy, h);
    }
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrbitSection {
    #[arg(allow_hyphen_values = true, long = "E")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    /// Number of samples over one period.
    #[arg(allow_hyphen_values = true, long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
}

impl OrbitSection {
    pub fn merge(&mut self, o: &Self) {
        fill!(self, o; energy, steps);
    }
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WkbSection {
    #[arg(allow_hyphen_values = true, long = "E")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    #[arg(allow_hyphen_values = true, long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[arg(allow_hyphen_values = true, long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<BaseArg>,
    /// Number of sample points between the focal points.
    #[arg(allow_hyphen_values = true, long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

impl WkbSection {
    pub fn merge(&mut self, o: &Self) {
        fill!(self, o; energy, h, base, samples);
    }
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GramSection {
    #[arg(allow_hyphen_values = true, long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[arg(allow_hyphen_values = true, long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<Pair>,
    /// Number of energies in the scan.
    #[arg(allow_hyphen_values = true, long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

impl GramSection {
    pub fn merge(&mut self, o: &Self) {
        fill!(self, o; h, interval, samples);
    }
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReferenceSection {
    #[arg(allow_hyphen_values = true, long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    /// Lower end of the reported eigenvalues.
    #[arg(allow_hyphen_values = true, long = "Emin")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub emin: Option<f64>,
    /// Upper end of the reported eigenvalues.
    #[arg(allow_hyphen_values = true, long = "Emax")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub emax: Option<f64>,
    /// Compare against N -> 2N and L -> 1.25 L.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certify: Option<bool>,
    /// Number of grid points of the reference operator.
    #[arg(allow_hyphen_values = true, long = "N")]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Half length of the periodic box.
    #[arg(allow_hyphen_values = true, long = "L")]
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub half_length: Option<f64>,
}

impl ReferenceSection {
    pub fn merge(&mut self, o: &Self) {
        fill!(self, o; h, emin, emax, certify, points, half_length);
    }
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceSection {
    /// Values of h, comma-separated.
    #[arg(allow_hyphen_values = true, long = "h-list")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_list: Option<List>,
    #[arg(allow_hyphen_values = true, long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<Pair>,
    /// Number of lowest paired levels entering the error.
    #[arg(allow_hyphen_values = true, long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    /// Number of grid points of the reference operator.
    #[arg(allow_hyphen_values = true, long = "N")]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Half length of the periodic box.
    #[arg(allow_hyphen_values = true, long = "L")]
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub half_length: Option<f64>,
}

impl ConvergenceSection {
    pub fn merge(&mut self, o: &Self) {
        fill!(self, o; h_list, interval, levels, points, half_length);
    }
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AirySection {
    /// Leading potential Q0 with Q0(0) = 0, Q0'(0) = 1.
    #[arg(allow_hyphen_values = true, long = "Q0")]
    #[serde(rename = "Q0", skip_serializing_if = "Option::is_none")]
    pub q0: Option<String>,
    #[arg(allow_hyphen_values = true, long = "Q1")]
    #[serde(rename = "Q1", skip_serializing_if = "Option::is_none")]
    pub q1: Option<String>,
    #[arg(allow_hyphen_values = true, long = "Q2")]
    #[serde(rename = "Q2", skip_serializing_if = "Option::is_none")]
    pub q2: Option<String>,
    #[arg(allow_hyphen_values = true, long = "Q3")]
    #[serde(rename = "Q3", skip_serializing_if = "Option::is_none")]
    pub q3: Option<String>,
    #[arg(allow_hyphen_values = true, long = "Q4")]
    #[serde(rename = "Q4", skip_serializing_if = "Option::is_none")]
    pub q4: Option<String>,
    #[arg(allow_hyphen_values = true, long = "h-list")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_list: Option<List>,
    /// Values of eta for the master-residual scan.
    #[arg(allow_hyphen_values = true, long = "eta-list")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_list: Option<List>,
    /// Fit window `a,b` on the oscillating side.
    #[arg(allow_hyphen_values = true, long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<Pair>,
    /// Number of fit points.
    #[arg(allow_hyphen_values = true, long = "fit-points")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_points: Option<usize>,
    /// Half width X of the transport interval [-X, X].
    #[arg(allow_hyphen_values = true, long = "half-width")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
}

impl AirySection {
    pub fn merge(&mut self, o: &Self) {
        fill!(self, o; q0, q1, q2, q3, q4, h_list, eta_list, window, fit_points, half_width);
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

/// Contents of a config file: one table per subcommand plus the symbol
/// and output settings.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub output: OutputSection,
    pub symbol: SymbolArgs,
    pub spectrum: SpectrumSection,
    pub actions: ActionsSection,
    pub orbit: OrbitSection,
    pub wkb: WkbSection,
    pub gram: GramSection,
    pub reference: ReferenceSection,
    pub convergence: ConvergenceSection,
    #[serde(rename = "airy-check")]
    pub airy: AirySection,
}

impl RunConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ConfigRead {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("config values are always representable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_lists() {
        assert_eq!("0.3, 2".parse::<Pair>().unwrap(), Pair(0.3, 2.0));
        assert!("1".parse::<Pair>().is_err());
        assert_eq!("0.1,0.05".parse::<List>().unwrap(), List(vec![0.1, 0.05]));
        assert!("0.1,x".parse::<List>().is_err());
    }

    #[test]
    fn reads_sections() {
        let cfg = RunConfig::parse(
            r#"
            [symbol]
            name = "schrodinger"
            potential = "x^4"

            [spectrum]
            h = 0.05
            interval = [0.3, 2.0]
            method = "bs"
            N = 512

            [airy-check]
            Q0 = "x + 0.3*x^2"
            h_list = [0.1, 0.05]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.symbol.potential.as_deref(), Some("x^4"));
        assert_eq!(cfg.spectrum.interval, Some(Pair(0.3, 2.0)));
        assert_eq!(cfg.spectrum.method, Some(Method::Bs));
        assert_eq!(cfg.spectrum.points, Some(512));
        assert_eq!(cfg.airy.h_list, Some(List(vec![0.1, 0.05])));
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(RunConfig::parse("[spectrum]\nhh = 1.0\n").is_err());
    }

    #[test]
    fn command_line_values_win() {
        let mut cli = SpectrumSection {
            h: Some(0.1),
            ..Default::default()
        };
        let file = SpectrumSection {
            h: Some(0.2),
            interval: Some(Pair(0.0, 1.0)),
            ..Default::default()
        };
        cli.merge(&file);
        assert_eq!(cli.h, Some(0.1));
        assert_eq!(cli.interval, Some(Pair(0.0, 1.0)));
    }
}
