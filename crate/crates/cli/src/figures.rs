//! Preset figure sets.

use std::fs;
use std::path::{Path, PathBuf};

use hydromono_core::joint_spectrum;

use crate::args::{FiguresArgs, Format, Parsed};
use crate::commands::{
    action_rows, action_series, critical_series, monodromy_series, params, reduced_series, run_monodromy,
    spectrum_points,
};
use crate::report::{emit, precondition, Failure, Outcome};
use crate::svg::{Plot, Series};

fn value(text: &str) -> Parsed {
    crate::args::parse_number(text).expect("preset value parses")
}

fn write(dir: &Path, name: &str, plot: Plot) -> Outcome<PathBuf> {
    let path = dir.join(name);
    emit(Some(&path), &plot.render())?;
    Ok(path)
}

/// Lattice with the cell transported around the isolated value.
fn figure1(dir: &Path) -> Outcome<Vec<PathBuf>> {
    let a = value("144/5");
    let spec = joint_spectrum(12, &params(&a)?)?;
    let run = run_monodromy(spec, a, None, None)?;
    let plot = Plot {
        title: format!("n = 12, a = 144/5: M = {}", run.transport.matrix),
        x_label: "l_z".into(),
        y_label: "g".into(),
        series: monodromy_series(&run),
    };
    Ok(vec![write(dir, "fig1.svg", plot)?])
}

/// Spectrum and critical values for three focal distances.
fn figure3(dir: &Path) -> Outcome<Vec<PathBuf>> {
    let mut out = Vec::new();
    for text in ["4", "36", "288"] {
        let a = value(text);
        let p = params(&a)?;
        let spec = joint_spectrum(12, &p)?;
        let mut series = vec![Series::dots("spectrum", "black", 2.0, spectrum_points(&spec))];
        series.extend(critical_series(12, &p)?);
        let plot = Plot {
            title: format!("n = 12, a = {text}"),
            x_label: "l_z".into(),
            y_label: "g".into(),
            series,
        };
        out.push(write(dir, &format!("fig3_a{text}.svg"), plot)?);
    }
    Ok(out)
}

/// Section of the reduced space with the lines through the singular point.
fn figure4(dir: &Path) -> Outcome<Vec<PathBuf>> {
    let values: Vec<Parsed> = ["4", "36", "288"].into_iter().map(value).collect();
    let plot = Plot {
        title: "reduced space, rho3 = 0, n = 12, m = 0".into(),
        x_label: "rho1".into(),
        y_label: "rho2".into(),
        series: reduced_series(12, 0, &values)?,
    };
    Ok(vec![write(dir, "fig4.svg", plot)?])
}

/// Exact against EBK spectra at `a = n^2/4`.
fn figure5(dir: &Path) -> Outcome<Vec<PathBuf>> {
    let mut out = Vec::new();
    for n in [6i64, 21, 41] {
        let a = value(&format!("{}/4", n * n));
        let rows = action_rows(n, &params(&a)?, None)?;
        let plot = Plot {
            title: format!("n = {n}, a = {}", a.text),
            x_label: "l_z".into(),
            y_label: "g".into(),
            series: action_series(&rows),
        };
        out.push(write(dir, &format!("fig5_n{n}.svg"), plot)?);
    }
    Ok(out)
}

pub fn figures(args: &FiguresArgs) -> Outcome {
    if args.format != Format::Svg {
        return precondition("figures are written as SVG only");
    }
    fs::create_dir_all(&args.out)
        .map_err(|e| Failure::Precondition(format!("cannot create {}: {e}", args.out.display())))?;
    let which: Vec<&str> = match &args.which {
        Some(w) => vec![w.as_str()],
        None => vec!["1", "3", "4", "5"],
    };
    let mut written = Vec::new();
    for w in which {
        written.extend(match w {
            "1" => figure1(&args.out)?,
            "3" => figure3(&args.out)?,
            "4" => figure4(&args.out)?,
            _ => figure5(&args.out)?,
        });
    }
    let listing: String = written.iter().map(|p| format!("{}\n", p.display())).collect();
    emit(None, &listing)
}
