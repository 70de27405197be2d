use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use popuc::cauchy::Region;
use popuc::opuc::{MeasureSpec, NamedMeasure};
use popuc::Complex64;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "popuc",
    version,
    about = "Paraorthogonal polynomials on the unit circle: equations and electrostatics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Zeros of Phi_n(z; beta).
    Zeros(MeasureArgs),
    /// The rational functions G_n, D_n, J_n.
    Gdj(MeasureArgs),
    /// Coefficients p, q of the second-order equation.
    Ode(MeasureArgs),
    /// The 2x2 first-order system linking Phi_n(z; beta) and Phi_n(z; tau).
    System {
        #[command(flatten)]
        common: MeasureArgs,
        /// Second parameter, `re,im`; must differ from beta.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        tau: Complex64,
    },
    /// Residual reports for the second-order equation and the derivative identity.
    Verify(PointsArgs),
    /// Fixed charges holding the zeros in equilibrium, with residuals.
    Equilibrium(PointsArgs),
    /// Reproduce a worked example and compare it with its closed forms.
    Example {
        #[arg(long, value_enum)]
        name: ExampleName,
        #[command(flatten)]
        common: MeasureArgs,
    },
    /// Points and charges for plotting, CSV by default.
    PlotData {
        /// Preset for one of the four reference plots (1-4).
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        figure: Option<u8>,
        #[command(flatten)]
        inner: PointsArgs,
    },
}

#[derive(Args, Debug, Clone)]
pub struct MeasureArgs {
    /// Measure name (lebesgue, bernstein_szego, sieved, single_moment),
    /// inline JSON, or a path to a JSON file.
    #[arg(long)]
    pub measure: Option<String>,
    /// Bernstein-Szego parameter `re,im` for the named measures.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub zeta: Option<Complex64>,
    /// Sieve order for the sieved measure.
    #[arg(long = "M")]
    pub sieve: Option<usize>,
    /// Degree of the paraorthogonal polynomial.
    #[arg(long)]
    pub n: Option<usize>,
    /// Unimodular parameter `re,im` (default -1,0).
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub beta: Option<Complex64>,
    #[arg(long, value_enum, default_value_t = RegionArg::Exterior)]
    pub region: RegionArg,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Seed for randomly drawn point sets.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct PointsArgs {
    #[command(flatten)]
    pub common: MeasureArgs,
    /// JSON file holding unimodular points: `[[re, im], ...]`, or an object
    /// with a `points` or `zeros` array such as `zeros` output.
    #[arg(long, conflicts_with = "measure")]
    pub points: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionArg {
    Exterior,
    Interior,
}

impl From<RegionArg> for Region {
    fn from(r: RegionArg) -> Self {
        match r {
            RegionArg::Exterior => Region::Exterior,
            RegionArg::Interior => Region::Interior,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
#[value(rename_all = "snake_case")]
pub enum ExampleName {
    Lebesgue,
    BernsteinSzego,
    Sieved,
    SingleMoment,
}

/// `re,im` or a bare real number.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    let z = match parts.as_slice() {
        [re] => Complex64::new(num(re)?, 0.0),
        [re, im] => Complex64::new(num(re)?, num(im)?),
        _ => return Err(format!("expected re,im, got {s:?}")),
    };
    if z.is_finite() {
        Ok(z)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

pub const DEFAULT_BETA: Complex64 = Complex64::new(-1.0, 0.0);

impl MeasureArgs {
    pub fn beta(&self) -> Complex64 {
        self.beta.unwrap_or(DEFAULT_BETA)
    }

    pub fn region(&self) -> Region {
        self.region.into()
    }

    pub fn require_n(&self) -> Result<usize, CliError> {
        self.n.ok_or_else(|| CliError::Usage("--n is required".into()))
    }

    /// The measure selected by `--measure`, `--zeta` and `--M`.
    pub fn measure(&self) -> Result<MeasureSpec, CliError> {
        let raw = self
            .measure
            .as_deref()
            .ok_or_else(|| CliError::Usage("--measure is required".into()))?;
        let trimmed = raw.trim_start();
        if trimmed.starts_with('{') {
            self.reject_named_flags()?;
            return Ok(serde_json::from_str(trimmed)?);
        }
        match raw.parse::<NamedMeasure>() {
            Ok(name) => self.named(name),
            Err(_) if Path::new(raw).is_file() => {
                self.reject_named_flags()?;
                let text = read(Path::new(raw))?;
                Ok(serde_json::from_str(&text)?)
            }
            Err(e) => Err(e.into()),
        }
    }

    fn named(&self, name: NamedMeasure) -> Result<MeasureSpec, CliError> {
        let takes_zeta = matches!(name, NamedMeasure::BernsteinSzego | NamedMeasure::SievedBs);
        if self.zeta.is_some() && !takes_zeta {
            return Err(CliError::Usage(format!("--zeta does not apply to {}", name.as_str())));
        }
        if self.sieve.is_some() && name != NamedMeasure::SievedBs {
            return Err(CliError::Usage(format!("--M does not apply to {}", name.as_str())));
        }
        let zeta = self.zeta.unwrap_or(Complex64::new(0.5, 0.0));
        Ok(MeasureSpec::named(name, zeta, self.sieve.unwrap_or(2))?)
    }

    fn reject_named_flags(&self) -> Result<(), CliError> {
        if self.zeta.is_some() || self.sieve.is_some() {
            return Err(CliError::Usage("--zeta and --M only modify a named measure".into()));
        }
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PointsFile {
    Bare(Vec<Complex64>),
    Wrapped {
        #[serde(alias = "zeros")]
        points: Vec<Complex64>,
    },
}

pub fn read_points(path: &Path) -> Result<Vec<Complex64>, CliError> {
    let text = read(path)?;
    Ok(match serde_json::from_str(&text)? {
        PointsFile::Bare(p) | PointsFile::Wrapped { points: p } => p,
    })
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}
