//! Command-line configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};
use twophoton::dfamily::Precision;

#[derive(Debug, Parser)]
#[command(name = "twophoton", version, about = "Spectrum, crossings and exact states of the two-photon Rabi model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lowest levels of every parity sector over a κ grid.
    Spectrum(ScanArgs),
    /// Level crossings between sectors over a κ grid.
    Crossings(ScanArgs),
    /// Exact degenerate states of one family member.
    ExactState(StateArgs),
    /// Re-run the verification chain on an exact-state file.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Transcendental,
    Judd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionArg {
    Double,
    Extended,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Double => Precision::Double,
            PrecisionArg::Extended => Precision::Extended,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScanArgs {
    #[arg(long)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.02)]
    pub kappa_min: f64,
    #[arg(long, default_value_t = 0.7)]
    pub kappa_max: f64,
    #[arg(long, default_value_t = 400)]
    pub kappa_points: usize,
    #[arg(long, default_value_t = 12)]
    pub levels: usize,
    #[arg(long, default_value_t = 240)]
    pub truncation: usize,
    /// Crossing refinement tolerance in κ.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[serde(skip)]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct StateArgs {
    #[arg(long)]
    pub mu: f64,
    #[arg(long, value_enum, default_value_t = FamilyArg::Transcendental)]
    pub family: FamilyArg,
    /// Transcendental member, χ = (2ℓ+3)/4.
    #[arg(long)]
    pub ell: Option<u32>,
    /// Juddian member, χ = n/2.
    #[arg(long)]
    pub n: Option<u32>,
    /// Residual tolerance of the verification chain.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = PrecisionArg::Double)]
    pub precision: PrecisionArg,
    #[serde(skip)]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Residual tolerance; overrides the one stored in the input.
    #[arg(long)]
    pub tol: Option<f64>,
    #[serde(skip)]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

fn positive(name: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError(format!("--{name} must be positive, got {v}")))
    }
}

impl ScanArgs {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.kappa_min > 0.0 && self.kappa_max < 1.0 && self.kappa_min <= self.kappa_max) {
            return Err(ConfigError(format!("kappa window [{}, {}] must lie in (0,1)", self.kappa_min, self.kappa_max)));
        }
        if self.kappa_points == 0 || self.levels == 0 || self.truncation < 2 {
            return Err(ConfigError("--kappa-points and --levels must be positive, --truncation at least 2".into()));
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(ConfigError(format!("--mu must be non-negative, got {}", self.mu)));
        }
        positive("tol", self.tol)
    }
}

impl StateArgs {
    pub fn validate(&self) -> Result<u32, ConfigError> {
        positive("mu", self.mu)?;
        positive("tol", self.tol)?;
        match (self.family, self.ell, self.n) {
            (FamilyArg::Transcendental, Some(ell), None) if ell >= 1 => Ok(ell),
            (FamilyArg::Judd, None, Some(n)) if n >= 2 => Ok(n),
            (FamilyArg::Transcendental, _, _) => Err(ConfigError("--family transcendental needs --ell >= 1 and no --n".into())),
            (FamilyArg::Judd, _, _) => Err(ConfigError("--family judd needs --n >= 2 and no --ell".into())),
        }
    }
}

/// SHA-256 of the compact JSON form of a configuration, output path excluded.
pub fn config_hash<T: Serialize>(command: &str, cfg: &T) -> String {
    let body = serde_json::to_string(&(command, cfg)).expect("configuration serializes");
    Sha256::digest(body.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}
