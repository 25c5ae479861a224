//! One function per subcommand. Each validates its inputs, computes, and
//! renders CSV, JSON or SVG.

use std::collections::BTreeMap;
use std::fs;

use hydromono_core::actions::ebk_spectrum;
use hydromono_core::classical::{isolated_critical_value, sample_critical_curves, Branch, IsolatedValue};
use hydromono_core::monodromy::{
    build_lattice, default_loop, loop_with_width, transport, LoopSkeleton, MonodromyMatrix, Transport,
};
use hydromono_core::reduction::{classify_singular_point, level_line_slope, phase_space_slice, PhaseSpaceSlice};
use hydromono_core::{joint_spectrum, JointSpectrum, SystemParams};
use serde_json::{Map, Value};

use crate::args::{BasicArgs, Format, MonodromyArgs, Parsed, ReducedArgs, SpectrumArgs};
use crate::numfmt::{json, short};
use crate::object;
use crate::report::{csv, document, emit, precondition, Failure, Outcome};
use crate::svg::{Plot, Series};

/// Samples per critical-curve branch.
pub const CURVE_SAMPLES: usize = 240;
/// Samples of the reduced-space section.
pub const SLICE_SAMPLES: usize = 241;

pub fn params(a: &Parsed) -> Outcome<SystemParams> {
    Ok(SystemParams::new(a.value)?)
}

fn check_n(n: i64) -> Outcome {
    if n < 1 {
        return precondition(format!("--n must be >= 1, got {n}"));
    }
    Ok(())
}

fn check_m(n: i64, m: Option<i64>) -> Outcome {
    match m {
        Some(m) if m.abs() > n - 1 => precondition(format!("--m must satisfy |m| <= n - 1 = {}, got {m}", n - 1)),
        _ => Ok(()),
    }
}

fn base_params(n: i64, a: &Parsed, energy: f64) -> Map<String, Value> {
    object! {
        "n" => n,
        "a" => json(a.value),
        "a_text" => a.text.clone(),
        "E" => json(energy),
    }
}

fn pair(x: f64, y: f64) -> Value {
    Value::Array(vec![json(x), json(y)])
}

fn node_pair(m: i64, g: f64) -> Value {
    Value::Array(vec![Value::from(m), json(g)])
}

fn filtered(spec: &JointSpectrum, m: Option<i64>) -> impl Iterator<Item = (i64, &Vec<f64>)> {
    spec.columns
        .iter()
        .filter(move |(&k, _)| m.is_none_or(|m| m == k))
        .map(|(&k, v)| (k, v))
}

// ---------------------------------------------------------------- spectrum

pub fn spectrum_points(spec: &JointSpectrum) -> Vec<(f64, f64)> {
    spec.points().map(|p| (p.m as f64, p.g)).collect()
}

pub fn spectrum(args: &SpectrumArgs) -> Outcome {
    let b = &args.basic;
    check_n(b.n)?;
    check_m(b.n, args.m)?;
    let spec = joint_spectrum(b.n, &params(&b.a)?)?;
    let text = match b.output.format {
        Format::Csv => csv(
            "m,g",
            filtered(&spec, args.m).flat_map(|(m, col)| col.iter().map(move |&g| vec![m.to_string(), short(g)])),
        ),
        Format::Json => {
            let points: Vec<Value> = filtered(&spec, args.m)
                .flat_map(|(m, col)| {
                    col.iter()
                        .map(move |&g| Value::Object(object! { "m" => m, "g" => json(g) }))
                })
                .collect();
            let worst = filtered(&spec, args.m)
                .map(|(m, col)| {
                    let want = JointSpectrum::column_trace(b.n, m);
                    (col.iter().sum::<f64>() - want).abs() / want.max(1.0)
                })
                .fold(0.0, f64::max);
            let mut p = base_params(b.n, &b.a, spec.energy());
            p.insert("m".into(), args.m.map_or(Value::Null, Value::from));
            document(
                p,
                object! { "count" => points.len(), "points" => points },
                object! { "columns" => filtered(&spec, args.m).count(), "max_relative_trace_error" => json(worst) },
            )
        }
        Format::Svg => Plot {
            title: format!("joint spectrum, n = {}, a = {}", b.n, b.a.text),
            x_label: "l_z".into(),
            y_label: "g".into(),
            series: vec![Series::dots(
                "spectrum",
                "black",
                2.5,
                spectrum_points(&spec)
                    .into_iter()
                    .filter(|p| args.m.is_none_or(|m| m as f64 == p.0))
                    .collect(),
            )],
        }
        .render(),
    };
    emit(b.output.out.as_deref(), &text)
}

/// Reads a spectrum JSON document back into a joint spectrum.
pub fn read_spectrum(path: &std::path::Path) -> Outcome<(JointSpectrum, Parsed)> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Precondition(format!("cannot read {}: {e}", path.display())))?;
    let bad = |what: &str| Failure::Precondition(format!("{}: {what}", path.display()));
    let doc: Value = serde_json::from_str(&text).map_err(|e| bad(&format!("invalid JSON: {e}")))?;
    let n = doc["params"]["n"].as_i64().ok_or_else(|| bad("missing params.n"))?;
    let a_value = doc["params"]["a"].as_f64().ok_or_else(|| bad("missing params.a"))?;
    let a_text = doc["params"]["a_text"]
        .as_str()
        .map_or_else(|| short(a_value), str::to_string);
    let points = doc["result"]["points"]
        .as_array()
        .ok_or_else(|| bad("missing result.points"))?;
    let mut columns: BTreeMap<i64, Vec<f64>> = BTreeMap::new();
    for p in points {
        let m = p["m"].as_i64().ok_or_else(|| bad("point without integer m"))?;
        let g = p["g"].as_f64().ok_or_else(|| bad("point without numeric g"))?;
        columns.entry(m).or_default().push(g);
    }
    for col in columns.values_mut() {
        col.sort_by(f64::total_cmp);
    }
    let a = Parsed {
        value: a_value,
        text: a_text,
    };
    let spec = JointSpectrum {
        n,
        params: params(&a)?,
        columns,
    };
    Ok((spec, a))
}

// ---------------------------------------------------------------- critical

/// Critical-curve rows `(s0, l_z, g, branch)`, each branch followed by its
/// mirror image in `l_z`.
pub fn critical_rows(energy: f64, p: &SystemParams) -> Vec<(f64, f64, f64, &'static str)> {
    let samples = sample_critical_curves(energy, p, CURVE_SAMPLES);
    let mut rows = Vec::with_capacity(2 * samples.len());
    for branch in [Branch::Eta, Branch::Xi, Branch::EtaInner] {
        let part: Vec<_> = samples.iter().filter(|(b, _)| *b == branch).map(|(_, c)| c).collect();
        rows.extend(
            part.iter()
                .rev()
                .filter(|c| c.lz > 0.0)
                .map(|c| (c.s0, -c.lz, c.g, branch.name())),
        );
        rows.extend(part.iter().map(|c| (c.s0, c.lz, c.g, branch.name())));
    }
    rows
}

fn isolated_row(n: i64, p: &SystemParams) -> Outcome<Option<(f64, f64, f64, &'static str)>> {
    Ok(match isolated_critical_value(n as f64, p)? {
        IsolatedValue::Present { lz, g } => Some((1.0, lz, g, "isolated")),
        IsolatedValue::Degenerate { lz, g } => Some((1.0, lz, g, "degenerate")),
        IsolatedValue::Absent => None,
    })
}

pub fn critical_series(n: i64, p: &SystemParams) -> Outcome<Vec<Series>> {
    let energy = hydromono_core::energy_from_n(n)?;
    let rows = critical_rows(energy, p);
    let mut series = Vec::new();
    for (branch, color) in [("eta", "crimson"), ("xi", "crimson"), ("eta-inner", "darkorange")] {
        let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.3 == branch).map(|r| (r.1, r.2)).collect();
        if !pts.is_empty() {
            series.push(Series::lines(format!("{branch} branch"), color, 1.5, vec![pts]));
        }
    }
    if let Some((_, lz, g, kind)) = isolated_row(n, p)? {
        series.push(Series::dots(format!("{kind} value"), "red", 5.0, vec![(lz, g)]));
    }
    Ok(series)
}

pub fn critical(args: &BasicArgs) -> Outcome {
    check_n(args.n)?;
    let p = params(&args.a)?;
    let energy = hydromono_core::energy_from_n(args.n)?;
    let rows = critical_rows(energy, &p);
    let isolated = isolated_row(args.n, &p)?;
    let text = match args.output.format {
        Format::Csv => csv(
            "s0,l_z,g,branch",
            rows.iter()
                .chain(isolated.iter())
                .map(|&(s0, lz, g, b)| vec![short(s0), short(lz), short(g), b.to_string()]),
        ),
        Format::Json => {
            let mut curves = Vec::new();
            for branch in [Branch::Eta, Branch::Xi, Branch::EtaInner] {
                let pts: Vec<Value> = rows
                    .iter()
                    .filter(|r| r.3 == branch.name())
                    .map(|&(s0, lz, g, _)| Value::Array(vec![json(s0), json(lz), json(g)]))
                    .collect();
                if !pts.is_empty() {
                    curves.push(Value::Object(object! { "branch" => branch.name(), "points" => pts }));
                }
            }
            let iso = isolated.map_or(Value::Null, |(_, lz, g, kind)| {
                Value::Object(object! { "l_z" => json(lz), "g" => json(g), "kind" => kind })
            });
            let kind = classify_singular_point(args.n as f64, &p)?;
            document(
                base_params(args.n, &args.a, energy),
                object! { "curves" => curves, "isolated" => iso },
                object! {
                    "samples_per_branch" => CURVE_SAMPLES,
                    "rows" => rows.len(),
                    "singular_point" => kind.name(),
                    "level_line_slope" => json(level_line_slope(args.n as f64, &p)),
                },
            )
        }
        Format::Svg => {
            let spec = joint_spectrum(args.n, &p)?;
            let mut series = vec![Series::dots("spectrum", "black", 2.0, spectrum_points(&spec))];
            series.extend(critical_series(args.n, &p)?);
            Plot {
                title: format!("critical values, n = {}, a = {}", args.n, args.a.text),
                x_label: "l_z".into(),
                y_label: "g".into(),
                series,
            }
            .render()
        }
    };
    emit(args.output.out.as_deref(), &text)
}

// ---------------------------------------------------------------- monodromy

pub struct MonodromyRun {
    pub spec: JointSpectrum,
    pub a: Parsed,
    pub center: (f64, f64),
    pub skeleton: LoopSkeleton,
    pub transport: Transport,
    pub scaling: f64,
}

impl MonodromyRun {
    pub fn defect(&self) -> bool {
        !self.transport.matrix.is_identity()
    }
}

pub fn run_monodromy(
    spec: JointSpectrum,
    a: Parsed,
    center: Option<(f64, f64)>,
    width: Option<i64>,
) -> Outcome<MonodromyRun> {
    let center = center.unwrap_or((0.0, 2.0 * a.value));
    let lattice = build_lattice(&spec)?;
    let skeleton = match width {
        Some(w) => loop_with_width(&lattice, center, w)?,
        None => default_loop(&lattice, center)?,
    };
    let transport = transport(&lattice, &skeleton)?;
    let scaling = lattice.scaling;
    Ok(MonodromyRun {
        spec,
        a,
        center,
        skeleton,
        transport,
        scaling,
    })
}

/// Exact cell corners `(m, g)` along the path.
fn corners(run: &MonodromyRun) -> Vec<[(i64, f64); 3]> {
    let g = |node: hydromono_core::monodromy::Node| {
        let col = run.spec.column(node.m).expect("node column exists");
        (node.m, col[node.k])
    };
    run.transport
        .path
        .cells
        .iter()
        .map(|c| [g(c.anchor), g(c.u_end), g(c.v_end)])
        .collect()
}

fn matrix_value(m: &MonodromyMatrix) -> Value {
    Value::Array(
        m.entries
            .iter()
            .map(|row| Value::Array(row.iter().map(|&x| Value::from(x)).collect()))
            .collect(),
    )
}

pub fn monodromy_series(run: &MonodromyRun) -> Vec<Series> {
    let sk = &run.skeleton;
    let rect: Vec<(f64, f64)> = sk.waypoints.iter().map(|&(m, g)| (m as f64, g)).collect();
    let anchors: Vec<(f64, f64)> = corners(run).iter().map(|c| (c[0].0 as f64, c[0].1)).collect();
    let first = corners(run)[0];
    let cell = vec![
        (first[1].0 as f64, first[1].1),
        (first[0].0 as f64, first[0].1),
        (first[2].0 as f64, first[2].1),
    ];
    vec![
        Series::dots("spectrum", "black", 2.5, spectrum_points(&run.spec)),
        Series::lines("loop", "steelblue", 1.0, vec![rect]),
        Series::lines("anchor path", "seagreen", 1.5, vec![anchors]),
        Series::lines("initial cell", "darkorange", 2.5, vec![cell]),
        Series::dots("center", "red", 5.0, vec![run.center]),
    ]
}

pub fn monodromy(args: &MonodromyArgs) -> Outcome {
    let (spec, a) = match (&args.input, args.n, &args.a) {
        (Some(path), None, None) => read_spectrum(path)?,
        (Some(_), _, _) => return precondition("--input replaces --n and --a; give one or the other"),
        (None, Some(n), Some(a)) => {
            check_n(n)?;
            (joint_spectrum(n, &params(a)?)?, a.clone())
        }
        (None, _, _) => return precondition("monodromy needs --n and --a, or --input"),
    };
    if let Some(w) = args.loop_width {
        if w < 1 {
            return precondition(format!("--loop-width must be >= 1, got {w}"));
        }
    }
    let n = spec.n;
    let run = run_monodromy(spec, a, args.center, args.loop_width)?;
    let m = &run.transport.matrix;
    let verdict = if run.defect() { "defect" } else { "no-defect" };
    let text = match args.format {
        Format::Json => {
            let path = &run.transport.path;
            let trace: Vec<Value> = corners(&run)
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let mv = i
                        .checked_sub(1)
                        .map_or(Value::Null, |j| Value::from(path.moves[j].name()));
                    Value::Object(object! {
                        "move" => mv,
                        "anchor" => node_pair(c[0].0, c[0].1),
                        "u_end" => node_pair(c[1].0, c[1].1),
                        "v_end" => node_pair(c[2].0, c[2].1),
                    })
                })
                .collect();
            let sk = &run.skeleton;
            let waypoints: Vec<Value> = sk.waypoints.iter().map(|&(m, g)| node_pair(m, g)).collect();
            let rebasings: Vec<Value> = path
                .rebasings
                .iter()
                .map(|&(i, j)| Value::Array(vec![Value::from(i), Value::from(j)]))
                .collect();
            let mut p = base_params(n, &run.a, run.spec.energy());
            p.insert("center".into(), pair(run.center.0, run.center.1));
            p.insert("loop_width".into(), args.loop_width.map_or(Value::Null, Value::from));
            document(
                p,
                object! {
                    "matrix" => matrix_value(m),
                    "verdict" => verdict,
                    "loop" => Value::Object(object! {
                        "half_width" => sk.half_width,
                        "columns" => Value::Array(vec![Value::from(sk.left()), Value::from(sk.right())]),
                        "g_bottom" => json(sk.g_bottom),
                        "g_top" => json(sk.g_top),
                        "waypoints" => waypoints,
                    }),
                    "trace" => trace,
                },
                object! {
                    "det" => m.det(),
                    "trace" => m.trace(),
                    "parabolic_index" => m.parabolic_index().map_or(Value::Null, Value::from),
                    "unit_defect" => m.is_unit_defect(),
                    "cells" => path.cells.len(),
                    "rebasings" => rebasings,
                    "scaling" => json(run.scaling),
                },
            )
        }
        Format::Csv => csv(
            "step,move,anchor_m,anchor_g,u_m,u_g,v_m,v_g",
            corners(&run).iter().enumerate().map(|(i, c)| {
                let mv = i.checked_sub(1).map_or("", |j| run.transport.path.moves[j].name());
                vec![
                    i.to_string(),
                    mv.to_string(),
                    c[0].0.to_string(),
                    short(c[0].1),
                    c[1].0.to_string(),
                    short(c[1].1),
                    c[2].0.to_string(),
                    short(c[2].1),
                ]
            }),
        ),
        Format::Svg => Plot {
            title: format!("cell transport, n = {n}, a = {}: M = {m} ({verdict})", run.a.text),
            x_label: "l_z".into(),
            y_label: "g".into(),
            series: monodromy_series(&run),
        }
        .render(),
    };
    emit(args.out.as_deref(), &text)
}

// ---------------------------------------------------------------- reduced

pub fn slice_for(n: i64, m: i64, a: &Parsed) -> Outcome<PhaseSpaceSlice> {
    let p = params(a)?;
    Ok(phase_space_slice(
        n as f64,
        m as f64,
        &p,
        &[2.0 * a.value],
        SLICE_SAMPLES,
    ))
}

pub fn reduced_series(n: i64, m: i64, values: &[Parsed]) -> Outcome<Vec<Series>> {
    const COLORS: [&str; 6] = ["crimson", "steelblue", "seagreen", "darkorange", "purple", "gray"];
    let mut series = Vec::new();
    for (i, a) in values.iter().enumerate() {
        let slice = slice_for(n, m, a)?;
        if i == 0 {
            series.push(Series::lines(
                "section rho3 = 0",
                "black",
                1.5,
                vec![slice.section.clone()],
            ));
        }
        for (g, pts) in slice.lines {
            series.push(Series::lines(
                format!("G = {} (a = {})", short(g), a.text),
                COLORS[i % COLORS.len()],
                1.2,
                vec![pts],
            ));
        }
    }
    Ok(series)
}

pub fn reduced(args: &ReducedArgs) -> Outcome {
    check_n(args.n)?;
    check_m(args.n, Some(args.m))?;
    let slices = args
        .a
        .iter()
        .map(|a| slice_for(args.n, args.m, a))
        .collect::<Outcome<Vec<_>>>()?;
    let section = slices.first().map(|s| s.section.clone()).unwrap_or_default();
    let text = match args.output.format {
        Format::Csv => {
            let mut rows: Vec<Vec<String>> = section
                .iter()
                .map(|&(r1, r2)| vec!["section".into(), String::new(), String::new(), short(r1), short(r2)])
                .collect();
            for (a, slice) in args.a.iter().zip(&slices) {
                for (g, pts) in &slice.lines {
                    rows.extend(
                        pts.iter()
                            .map(|&(r1, r2)| vec!["line".into(), short(a.value), short(*g), short(r1), short(r2)]),
                    );
                }
            }
            csv("curve,a,g,rho1,rho2", rows)
        }
        Format::Json => {
            let mut lines = Vec::new();
            let mut kinds = Vec::new();
            for (a, slice) in args.a.iter().zip(&slices) {
                let p = params(a)?;
                for (g, pts) in &slice.lines {
                    lines.push(Value::Object(object! {
                        "a" => json(a.value),
                        "g" => json(*g),
                        "points" => pts.iter().map(|&(x, y)| pair(x, y)).collect::<Vec<_>>(),
                    }));
                }
                kinds.push(Value::Object(object! {
                    "a" => json(a.value),
                    "singular_point" => classify_singular_point(args.n as f64, &p)?.name(),
                    "level_line_slope" => json(level_line_slope(args.n as f64, &p)),
                }));
            }
            document(
                object! {
                    "n" => args.n,
                    "m" => args.m,
                    "a" => args.a.iter().map(|a| json(a.value)).collect::<Vec<_>>(),
                },
                object! {
                    "section" => section.iter().map(|&(x, y)| pair(x, y)).collect::<Vec<_>>(),
                    "lines" => lines,
                },
                object! { "samples" => SLICE_SAMPLES, "classification" => kinds },
            )
        }
        Format::Svg => Plot {
            title: format!("reduced space, rho3 = 0, n = {}, m = {}", args.n, args.m),
            x_label: "rho1".into(),
            y_label: "rho2".into(),
            series: reduced_series(args.n, args.m, &args.a)?,
        }
        .render(),
    };
    emit(args.output.out.as_deref(), &text)
}

// ---------------------------------------------------------------- actions

/// `(m, n_eta, g_exact, g_ebk)` per state, ordered by `m` then `n_eta`.
pub fn action_rows(n: i64, p: &SystemParams, m: Option<i64>) -> Outcome<Vec<(i64, usize, f64, f64)>> {
    let exact = joint_spectrum(n, p)?;
    let ebk = ebk_spectrum(n, p)?;
    let mut rows = Vec::new();
    for (mm, col) in filtered(&exact, m) {
        let semi = ebk
            .get(&mm)
            .ok_or_else(|| Failure::Numerical(format!("no EBK column {mm}")))?;
        rows.extend(col.iter().zip(semi).enumerate().map(|(k, (&g, &s))| (mm, k, g, s)));
    }
    Ok(rows)
}

pub fn actions(args: &SpectrumArgs) -> Outcome {
    let b = &args.basic;
    check_n(b.n)?;
    check_m(b.n, args.m)?;
    let p = params(&b.a)?;
    let rows = action_rows(b.n, &p, args.m)?;
    let text = match b.output.format {
        Format::Csv => csv(
            "m,n_eta,g_exact,g_ebk,abs_err",
            rows.iter()
                .map(|&(m, k, g, s)| vec![m.to_string(), k.to_string(), short(g), short(s), short((g - s).abs())]),
        ),
        Format::Json => {
            let states: Vec<Value> = rows
                .iter()
                .map(|&(m, k, g, s)| {
                    Value::Object(object! {
                        "m" => m,
                        "n_eta" => k,
                        "g_exact" => json(g),
                        "g_ebk" => json(s),
                        "abs_err" => json((g - s).abs()),
                    })
                })
                .collect();
            let worst = rows.iter().map(|r| (r.2 - r.3).abs()).fold(0.0, f64::max);
            let mut params = base_params(b.n, &b.a, hydromono_core::energy_from_n(b.n)?);
            params.insert("m".into(), args.m.map_or(Value::Null, Value::from));
            document(
                params,
                object! { "states" => states },
                object! { "count" => rows.len(), "max_abs_err" => json(worst) },
            )
        }
        Format::Svg => Plot {
            title: format!("exact and EBK spectrum, n = {}, a = {}", b.n, b.a.text),
            x_label: "l_z".into(),
            y_label: "g".into(),
            series: action_series(&rows),
        }
        .render(),
    };
    emit(b.output.out.as_deref(), &text)
}

pub fn action_series(rows: &[(i64, usize, f64, f64)]) -> Vec<Series> {
    vec![
        Series::dots("exact", "black", 3.0, rows.iter().map(|r| (r.0 as f64, r.2)).collect()),
        Series::dots("EBK", "crimson", 1.5, rows.iter().map(|r| (r.0 as f64, r.3)).collect()),
    ]
}
