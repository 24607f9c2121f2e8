use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

const EXIT_CODES: &str = "\
EXIT STATUS:
  classify: 0 = safe, 3 = threat, 4 = pat-down
  validate: 0 = clean, 1 = violations found
  all:      1 = output could not be written, 2 = usage or input-loading error";

/// Classify body-worn objects from their complex permittivity at 30 GHz.
#[derive(Debug, Parser)]
#[command(name = "permscreen", version, after_help = EXIT_CODES)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the material table.
    List(ListArgs),
    /// Classify one object from a point, a real part, or a reflectivity ratio.
    #[command(after_help = EXIT_CODES)]
    Classify(ClassifyArgs),
    /// Draw materials and regions on a log-log permittivity plot (SVG).
    Plot(PlotArgs),
    /// Screen every material as a slab on skin and write a verdict CSV.
    Batch(BatchArgs),
    /// Check a material file and a region file for invariant violations.
    #[command(after_help = EXIT_CODES)]
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct DbArg {
    /// Material CSV (`name,eps_real,eps_imag,source,category`); built-in table if omitted.
    #[arg(long, value_name = "PATH")]
    pub db: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RegionsArg {
    /// Region set in TOML; built-in defaults if omitted.
    #[arg(long, value_name = "PATH")]
    pub regions: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ListArgs {
    #[command(flatten)]
    pub db: DbArg,
    /// Only list materials in this category.
    #[arg(long)]
    pub category: Option<String>,
    /// Also write the listed materials as CSV.
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("evidence").required(true).multiple(false).args(["point", "real", "ratio"])))]
pub struct ClassifyArgs {
    /// Exact permittivity as `EPS_REAL,EPS_LOSS`.
    #[arg(long, value_name = "RE,IM", value_parser = parse_pair, allow_hyphen_values = true)]
    pub point: Option<(f64, f64)>,
    /// Real part only; the loss is assumed to lie in the lossless band.
    #[arg(long, value_name = "RE", allow_hyphen_values = true)]
    pub real: Option<f64>,
    /// Front-surface reflectivity relative to bare skin (power ratio).
    #[arg(long, value_name = "R", allow_hyphen_values = true)]
    pub ratio: Option<f64>,
    /// Interpret `--ratio` as a field-amplitude ratio (squared before use).
    #[arg(long, requires = "ratio")]
    pub amplitude: bool,
    #[command(flatten)]
    pub regions: RegionsArg,
    /// Loss band assumed for `--real`, as `MIN,MAX`.
    #[arg(long, value_name = "MIN,MAX", value_parser = parse_pair)]
    pub band: Option<(f64, f64)>,
    /// Reference medium for `--ratio`, as `EPS_REAL,EPS_LOSS` (default dry skin 20,16).
    #[arg(long, value_name = "RE,IM", value_parser = parse_pair)]
    pub reference: Option<(f64, f64)>,
    /// Number of log intervals in the loss grid (1e-4 to 100).
    #[arg(long, value_name = "N", default_value_t = 200)]
    pub grid_intervals: usize,
    /// Write a JSON run report here.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Include wall-clock stage timings in the report.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub db: DbArg,
    #[command(flatten)]
    pub regions: RegionsArg,
    /// Overlay the locus from a `classify --ratio` report.
    #[arg(long, value_name = "REPORT")]
    pub locus: Option<PathBuf>,
    /// SVG output path.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    #[command(flatten)]
    pub db: DbArg,
    #[command(flatten)]
    pub regions: RegionsArg,
    /// Slab thickness in millimeters.
    #[arg(long, value_name = "MM", allow_hyphen_values = true)]
    pub thickness: f64,
    /// Back-surface visibility threshold in dB below the bare-skin return.
    #[arg(long, value_name = "DB", default_value_t = permscreen_core::em_model::DEFAULT_VISIBILITY_THRESHOLD_DB)]
    pub visibility_db: f64,
    /// Verdict CSV output path.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub db: DbArg,
    #[command(flatten)]
    pub regions: RegionsArg,
}

fn parse_pair(text: &str) -> Result<(f64, f64), String> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| format!("expected two comma-separated numbers, got {text:?}"))?;
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| format!("not a number: {:?}", s.trim()))
    };
    Ok((num(a)?, num(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn pairs() {
        assert_eq!(parse_pair("2.84,0.005"), Ok((2.84, 0.005)));
        assert_eq!(parse_pair(" 20 , 1.6e1"), Ok((20.0, 16.0)));
        assert!(parse_pair("2.84").is_err());
        assert!(parse_pair("a,b").is_err());
    }

    #[test]
    fn exactly_one_evidence_flag() {
        assert!(Cli::try_parse_from(["permscreen", "classify"]).is_err());
        assert!(Cli::try_parse_from(["permscreen", "classify", "--real", "3", "--ratio", "1"]).is_err());
        assert!(Cli::try_parse_from(["permscreen", "classify", "--ratio", "0.0"]).is_ok());
    }
}
