//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "hydromono",
    version,
    about = "Joint spectrum, critical values and quantum monodromy of hydrogen in prolate spheroidal coordinates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Joint spectrum `(m, g)` at fixed n.
    Spectrum(SpectrumArgs),
    /// Critical curves of the energy-momentum map and the isolated value.
    Critical(BasicArgs),
    /// Transport a lattice cell around a loop and report the monodromy matrix.
    Monodromy(MonodromyArgs),
    /// Section `rho3 = 0` of the reduced space with the critical G-lines.
    Reduced(ReducedArgs),
    /// Exact against EBK values of g, state by state.
    Actions(SpectrumArgs),
    /// Preset figure data as SVG.
    Figures(FiguresArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Args, Debug)]
pub struct Output {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct BasicArgs {
    /// Principal quantum number.
    #[arg(long)]
    pub n: i64,
    /// Focal half-distance, decimal or rational such as 144/5.
    #[arg(long, value_parser = parse_number)]
    pub a: Parsed,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub basic: BasicArgs,
    /// Restrict to one column.
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<i64>,
}

#[derive(Args, Debug)]
pub struct MonodromyArgs {
    /// Principal quantum number; taken from the input file when given.
    #[arg(long)]
    pub n: Option<i64>,
    #[arg(long, value_parser = parse_number)]
    pub a: Option<Parsed>,
    /// Loop center `l_z,g`; defaults to the isolated value `(0, 2a)`.
    #[arg(long, value_parser = parse_center, allow_hyphen_values = true)]
    pub center: Option<(f64, f64)>,
    /// Half-width of the loop in columns; widest feasible when absent.
    #[arg(long)]
    pub loop_width: Option<i64>,
    /// Spectrum JSON written by `spectrum --format json`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct ReducedArgs {
    #[arg(long)]
    pub n: i64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub m: i64,
    /// One or more comma-separated values of a.
    #[arg(long, value_parser = parse_number, value_delimiter = ',', required = true)]
    pub a: Vec<Parsed>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct FiguresArgs {
    /// Figure to produce: 1, 3, 4 or 5; all when absent.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(["1", "3", "4", "5"]))]
    pub which: Option<String>,
    /// Output directory.
    #[arg(long, default_value = "figures")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Svg)]
    pub format: Format,
}

/// A parsed number with the text it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Parsed {
    pub value: f64,
    pub text: String,
}

pub fn parse_number(s: &str) -> Result<Parsed, String> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
            let q: f64 = q.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
            if q == 0.0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            p / q
        }
        None => s.parse().map_err(|_| format!("not a number: {s:?}"))?,
    };
    if !value.is_finite() {
        return Err(format!("not finite: {s:?}"));
    }
    Ok(Parsed {
        value,
        text: s.to_string(),
    })
}

pub fn parse_center(s: &str) -> Result<(f64, f64), String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected l_z,g, got {s:?}"))?;
    Ok((parse_number(x)?.value, parse_number(y)?.value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(parse_number("144/5").unwrap().value, 28.8);
        assert_eq!(parse_number(" 3 ").unwrap().value, 3.0);
        assert_eq!(parse_number("1e-8").unwrap().value, 1e-8);
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("x").is_err());
        assert!(parse_number("inf").is_err());
    }

    #[test]
    fn centers() {
        assert_eq!(parse_center("0,400").unwrap(), (0.0, 400.0));
        assert_eq!(parse_center("-2,288/5").unwrap(), (-2.0, 57.6));
        assert!(parse_center("3").is_err());
    }
}
