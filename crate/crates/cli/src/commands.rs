//! Subcommand implementations.

use std::path::PathBuf;

use num_complex::Complex64;
use serde_json::{json, Value};
use vlab_core::bifurcation::{
    bifurcation_curves, bifurcation_sequence, default_b_grid, fit_scaling, DEFAULT_FIT_WINDOW, MAX_K,
};
use vlab_core::dynamics::{
    comoving_snapshot, conserved_quantities, dipole_clusters, integrate, saddle_splitting_report, DynamicsError,
    IntegrateOptions, Scheme, DEFAULT_TOL,
};
use vlab_core::equilibrium::{array_speed, convergence_table, verify_equilibrium};
use vlab_core::field::{array_velocity, sample_stream_grid, ArrayField, CoMoving, Resolution, Window};
use vlab_core::format::fmt_sig;
use vlab_core::lattice::{build_finite_array, FiniteArraySpec, StreetParams, VortexSet, ORIGIN_LABEL};
use vlab_core::topology::{
    central_window, default_arc_budget, find_stagnation_points, level_class, region_label, saddle_levels,
    topology_class, trace_separatrix, traced_class, StagnationKind, StagnationPoint, Termination, TopologyError,
};
use vlab_core::{FieldGrid64, SimState64, StreetParams64};

use crate::args::*;
use crate::error::CliError;
use crate::output::{check_writable, csv, num, write_file, Output};
use crate::render::{auto_levels, render_contours, render_figure, Highlight, Marker};
use crate::settings::Settings;

use Format::{Csv, Json, Svg};

fn point(z: Complex64) -> Value {
    json!([num(z.re), num(z.im)])
}

fn params_json(p: &StreetParams64) -> Value {
    json!({ "a": num(p.a), "b": num(p.b), "h": num(p.h), "gamma": num(p.gamma), "n": p.big_n })
}

struct GridSpec {
    window: Window<f64>,
    res: Resolution,
}

fn grid_spec(s: &Settings, w: &WindowArgs, default: (f64, f64, f64, f64)) -> Result<GridSpec, CliError> {
    let window = Window::new(
        s.or("x_min", w.x_min, default.0)?,
        s.or("x_max", w.x_max, default.1)?,
        s.or("y_min", w.y_min, default.2)?,
        s.or("y_max", w.y_max, default.3)?,
    )
    .ok_or_else(|| CliError::validation("window needs x_min < x_max and y_min < y_max"))?;
    let res = Resolution::new(s.or("nx", w.nx, 241)?, s.or("ny", w.ny, 241)?)
        .ok_or_else(|| CliError::validation("grid needs at least 2 nodes per axis"))?;
    Ok(GridSpec { window, res })
}

/// Vortices of the truncated array inside `w`.
fn lattice_markers(p: &StreetParams64, w: &Window<f64>) -> Vec<Marker> {
    let n_lo = (((w.y_min - p.b) / p.h).floor() as i64 - 1).max(-(p.big_n as i64));
    let n_hi = ((w.y_max / p.h).ceil() as i64 + 1).min(p.big_n as i64);
    let m_lo = (w.x_min / p.a).floor() as i64 - 1;
    let m_hi = (w.x_max / p.a).ceil() as i64 + 1;
    let mut out = Vec::new();
    for n in n_lo..=n_hi {
        for m in m_lo..=m_hi {
            for (z, g) in [(p.negative_site(m, n), -p.gamma), (p.positive_site(m, n), p.gamma)] {
                if w.contains(z) {
                    out.push(Marker { x: z.re, y: z.im, strength: g });
                }
            }
        }
    }
    out
}

fn set_markers(v: &VortexSet<f64>) -> Vec<Marker> {
    v.positions
        .iter()
        .zip(&v.strengths)
        .map(|(z, &g)| Marker { x: z.re, y: z.im, strength: g })
        .collect()
}

/// Levels of the two saddle families and their translates by whole
/// street separations, each anchored at its saddles inside the window.
fn separatrix_highlights(p: &StreetParams64, grid: &FieldGrid64) -> Vec<Highlight> {
    let Ok(levels) = saddle_levels(p) else { return Vec::new() };
    let w = &grid.window;
    let j_lo = ((w.y_min - p.b) / p.h).floor() as i64 - 1;
    let j_hi = (w.y_max / p.h).ceil() as i64 + 1;
    let m_lo = (w.x_min / p.a).floor() as i64 - 1;
    let m_hi = (w.x_max / p.a).ceil() as i64 + 1;
    let mut out = Vec::new();
    for j in j_lo..=j_hi {
        for (z, psi) in [(levels.upper, levels.psi_upper), (levels.lower, levels.psi_lower)] {
            let through: Vec<[f64; 2]> = (m_lo..=m_hi)
                .map(|m| [z.re + m as f64 * p.a, z.im + j as f64 * p.h])
                .filter(|q| w.contains(Complex64::new(q[0], q[1])))
                .collect();
            if !through.is_empty() {
                out.push(Highlight { level: psi + j as f64 * levels.period_flux, through });
            }
        }
    }
    out
}

pub fn field(args: &FieldArgs) -> Result<(), CliError> {
    let s = Settings::load(args.common.config.as_deref())?;
    let p = s.street_params(&args.street.flags(args.common.n), None)?;
    let out = Output::resolve(&s, &args.common, Csv, &[Csv, Json, Svg])?;
    let frame = s.or("frame", args.frame, FrameKind::Comoving)?;
    let half = 0.5 * p.b;
    let g = grid_spec(&s, &args.window, (-p.a, p.a, half - p.h, half + p.h))?;
    let velocity = s.flag("velocity", args.velocity)?;
    let u = match frame {
        FrameKind::Comoving => array_speed(&p).u,
        FrameKind::Lab => 0.0,
    };
    let field = ArrayField { params: p };
    let flow = CoMoving::along_x(&field, u);
    let grid = sample_stream_grid(g.window, g.res, &flow, velocity);
    match out.format {
        Csv => out.write(&grid.to_csv()),
        Json => {
            let mut doc = grid.to_json();
            doc["params"] = params_json(&p);
            doc["frame_speed"] = num(u);
            out.write_json(&doc)
        }
        Svg => {
            let levels = auto_levels(&grid, s.or("levels", args.levels, 40)?);
            let highlights = match frame {
                FrameKind::Comoving => separatrix_highlights(&p, &grid),
                FrameKind::Lab => Vec::new(),
            };
            out.write(&render_figure(&grid, &levels, &highlights, &lattice_markers(&p, &g.window)))
        }
    }
}

fn stagnation_json(s: &StagnationPoint<f64>) -> Value {
    let kind = match s.kind {
        StagnationKind::Saddle => "saddle",
        StagnationKind::Center => "center",
    };
    json!({
        "position": point(s.position),
        "kind": kind,
        "psi": num(s.psi),
        "residual": num(s.residual),
        "unstable": s.eigendirections.map(|d| point(d[0])),
        "stable": s.eigendirections.map(|d| point(d[1])),
    })
}

pub fn stagnation(args: &StagnationArgs) -> Result<(), CliError> {
    let s = Settings::load(args.common.config.as_deref())?;
    let p = s.street_params(&args.street.flags(args.common.n), None)?;
    let out = Output::resolve(&s, &args.common, Csv, &[Csv, Json])?;
    let (lo, hi) = central_window(&p);
    let y_min = s.or("y_min", args.y_min, lo)?;
    let y_max = s.or("y_max", args.y_max, hi)?;
    let points = find_stagnation_points(&p, y_min, y_max)?;
    match out.format {
        Csv => {
            let mut text = String::from("x,y,kind,psi,residual,unstable_x,unstable_y,stable_x,stable_y\n");
            for q in &points {
                let kind = if q.kind == StagnationKind::Saddle { "saddle" } else { "center" };
                let dirs = q
                    .eigendirections
                    .map(|d| [d[0].re, d[0].im, d[1].re, d[1].im].map(csv).join(","))
                    .unwrap_or_else(|| ",,,".into());
                text.push_str(&format!(
                    "{},{},{kind},{},{},{dirs}\n",
                    csv(q.position.re),
                    csv(q.position.im),
                    csv(q.psi),
                    csv(q.residual)
                ));
            }
            out.write(&text)
        }
        _ => out.write_json(&json!({
            "params": params_json(&p),
            "frame_speed": num(array_speed(&p).u),
            "y_window": [num(y_min), num(y_max)],
            "points": points.iter().map(stagnation_json).collect::<Vec<_>>(),
        })),
    }
}

fn termination_json(t: Termination) -> Value {
    match t {
        Termination::Closed { shift } => json!({ "kind": "closed", "shift": shift }),
        Termination::ArcBudget => json!({ "kind": "arc_budget" }),
        Termination::NearVortex => json!({ "kind": "near_vortex" }),
        Termination::Stalled => json!({ "kind": "stalled" }),
    }
}

pub fn separatrix(args: &SeparatrixArgs) -> Result<(), CliError> {
    let s = Settings::load(args.common.config.as_deref())?;
    let p = s.street_params(&args.street.flags(args.common.n), None)?;
    let out = Output::resolve(&s, &args.common, Json, &[Csv, Json])?;
    let budget = s.or("arc_budget", args.arc_budget, default_arc_budget(&p))?;
    if !(budget > 0.0) {
        return Err(CliError::validation("arc budget must be positive"));
    }
    let (lo, hi) = central_window(&p);
    let u = array_speed(&p).u;
    let paths = find_stagnation_points(&p, lo, hi)?
        .iter()
        .filter(|q| q.kind == StagnationKind::Saddle)
        .map(|q| trace_separatrix(q, &p, u, budget))
        .collect::<Result<Vec<_>, _>>()?;
    match out.format {
        Csv => {
            let mut text = String::from("path,branch,index,x,y\n");
            for (i, path) in paths.iter().enumerate() {
                for (j, br) in path.branches.iter().enumerate() {
                    for (k, z) in br.points.iter().enumerate() {
                        text.push_str(&format!("{i},{j},{k},{},{}\n", csv(z.re), csv(z.im)));
                    }
                }
            }
            out.write(&text)
        }
        _ => {
            let paths: Vec<Value> = paths
                .iter()
                .map(|path| {
                    json!({
                        "origin": stagnation_json(&path.origin),
                        "streets_visited": path.streets_visited.iter().collect::<Vec<_>>(),
                        "budget_exhausted": path.budget_exhausted,
                        "max_level_error": num(path.max_level_error()),
                        "branches": path.branches.iter().map(|b| json!({
                            "termination": termination_json(b.termination),
                            "arc_length": num(b.arc_length),
                            "points": b.points.iter().map(|z| point(*z)).collect::<Vec<_>>(),
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            out.write_json(&json!({
                "params": params_json(&p),
                "frame_speed": num(u),
                "arc_budget": num(budget),
                "paths": paths,
            }))
        }
    }
}

pub fn topology(args: &TopologyArgs) -> Result<(), CliError> {
    let s = Settings::load(args.common.config.as_deref())?;
    let p = s.street_params(&args.street.flags(args.common.n), None)?;
    let out = Output::resolve(&s, &args.common, Json, &[Json])?;
    let levels = saddle_levels(&p)?;
    let k = level_class(&p)?;
    let (traced, paths) = traced_class(&p)?;
    if traced != k {
        return Err(TopologyError::TierMismatch { traced, levels: k }.into());
    }
    out.write_json(&json!({
        "params": params_json(&p),
        "k": k,
        "region_label": region_label(k),
        "levels": {
            "upper_saddle": point(levels.upper),
            "lower_saddle": point(levels.lower),
            "psi_upper": num(levels.psi_upper),
            "psi_lower": num(levels.psi_lower),
            "period_flux": num(levels.period_flux),
            "ratio": num(levels.ratio()),
        },
        "frame_speed": num(levels.u),
        "separatrices": paths.iter().map(|path| json!({
            "origin": point(path.origin.position),
            "streets_visited": path.streets_visited.iter().collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    }))
}

pub fn equilibrium(args: &EquilibriumArgs) -> Result<(), CliError> {
    let s = Settings::load(args.common.config.as_deref())?;
    let out = Output::resolve(&s, &args.common, Csv, &[Csv, Json])?;
    let a = s.or("a", args.a, 1.0)?;
    let gamma = s.or("gamma", args.gamma, 1.0)?;
    let b = s.required("b", args.b)?;
    let hs: Vec<f64> = s
        .list("h", args.h.as_deref())?
        .ok_or_else(|| CliError::validation("missing required parameter --h"))?;
    if hs.is_empty() {
        return Err(CliError::validation("--h needs at least one value"));
    }
    let big_n = s.big_n(args.common.n)?;
    let truncations: Vec<usize> = (0..=big_n).collect();
    let mut text = String::from("h,two_n_plus_one,u_n\n");
    let mut tables = Vec::new();
    for &h in &hs {
        let p = StreetParams::new(a, b, h, gamma, big_n)?;
        let rows = convergence_table(&p, &truncations)?;
        let check = verify_equilibrium(&p)?;
        for (m, u) in &rows {
            text.push_str(&format!("{},{m},{}\n", csv(h), csv(*u)));
        }
        tables.push(json!({
            "h": num(h),
            "u": num(check.speed.u),
            "lattice_speed": num(check.speed.lattice_speed()),
            "residual": num(check.residual),
            "rows": rows.iter().map(|(m, u)| json!({ "two_n_plus_one": m, "u_n": num(*u) })).collect::<Vec<_>>(),
        }));
    }
    match out.format {
        Csv => out.write(&text),
        _ => out.write_json(&json!({ "a": num(a), "b": num(b), "gamma": num(gamma), "n": big_n, "tables": tables })),
    }
}

pub fn bifurcate(args: &BifurcateArgs) -> Result<(), CliError> {
    let s = Settings::load(args.common.config.as_deref())?;
    let p = s.street_params(&args.street.flags(args.common.n), Some(1.0))?;
    let out = Output::resolve(&s, &args.common, Json, &[Csv, Json])?;
    let kmax = s.or("kmax", args.kmax, 3)?;
    let tol = s.or("tol", args.tol, 1e-8)?;
    if !(tol > 0.0) {
        return Err(CliError::validation("--tol must be positive"));
    }
    let seq = bifurcation_sequence(&p, kmax)?;
    if let Some((k, t)) = seq.tolerances.iter().enumerate().find(|(_, &t)| !(t <= tol)) {
        return Err(CliError::numerical(format!(
            "h_{} is only determined to {t:e}, above the requested {tol:e}",
            k + 1
        )));
    }
    match out.format {
        Csv => {
            let mut text = String::from("k,h,tolerance\n");
            for (k, (h, t)) in seq.h_values.iter().zip(&seq.tolerances).enumerate() {
                text.push_str(&format!("{},{},{}\n", k + 1, csv(*h), csv(*t)));
            }
            out.write(&text)
        }
        _ => out.write_json(&json!({
            "b": num(p.b),
            "n": p.big_n,
            "kmax": kmax,
            "h": seq.h_values.iter().map(|&h| num(h)).collect::<Vec<_>>(),
            "tolerance": seq.tolerances.iter().map(|&t| num(t)).collect::<Vec<_>>(),
        })),
    }
}

pub fn curves(args: &CurvesArgs) -> Result<(), CliError> {
    let s = Settings::load(args.common.config.as_deref())?;
    let out = Output::resolve(&s, &args.common, Csv, &[Csv, Json])?;
    let kmax = s.or("kmax", args.kmax, 5)?;
    if kmax == 0 || kmax > MAX_K {
        return Err(CliError::validation(format!("--kmax must lie in 1..={MAX_K}")));
    }
    let grid: Vec<f64> = s.list("b_grid", args.b_grid.as_deref())?.unwrap_or_else(default_b_grid);
    if grid.is_empty() {
        return Err(CliError::validation("--b-grid needs at least one value"));
    }
    let target = s.or("extrapolate_to", args.extrapolate_to, 0.5)?;
    let n_last = s.or("extrapolate_points", args.extrapolate_points, 2)?;
    let base = StreetParams::unit(0.25, 1.0, s.big_n(args.common.n)?)?;
    let curves = bifurcation_curves(&base, &grid, kmax);
    if curves.points.iter().all(Result::is_err) {
        let first = curves.points.iter().find_map(|r| r.as_ref().err()).cloned().unwrap_or_default();
        return Err(CliError::numerical(format!("no grid point succeeded; first failure: {first}")));
    }
    match out.format {
        Csv => {
            let mut text = String::from("b,k,h\n");
            for (b, r) in curves.b.iter().zip(&curves.points) {
                if let Ok(hs) = r {
                    for (k, h) in hs.iter().enumerate() {
                        text.push_str(&format!("{},{},{}\n", csv(*b), k + 1, csv(*h)));
                    }
                }
            }
            out.write(&text)
        }
        _ => {
            let points: Vec<Value> = curves
                .b
                .iter()
                .zip(&curves.points)
                .map(|(b, r)| match r {
                    Ok(hs) => json!({ "b": num(*b), "h": hs.iter().map(|&h| num(h)).collect::<Vec<_>>() }),
                    Err(e) => json!({ "b": num(*b), "error": e }),
                })
                .collect();
            let extrapolated: Vec<Value> = (1..=kmax)
                .map(|k| json!({ "k": k, "h": curves.extrapolate(k, target, n_last).map(num) }))
                .collect();
            out.write_json(&json!({
                "kmax": kmax,
                "n": base.big_n,
                "points": points,
                "extrapolation": { "b": num(target), "points_used": n_last, "curves": extrapolated },
            }))
        }
    }
}

pub fn scaling(args: &ScalingArgs) -> Result<(), CliError> {
    let s = Settings::load(args.common.config.as_deref())?;
    let p = s.street_params(&args.street.flags(args.common.n), Some(1.0))?;
    let out = Output::resolve(&s, &args.common, Json, &[Csv, Json])?;
    let kmax = s.or("kmax", args.kmax, MAX_K)?;
    let lo = s.or("fit_lo", args.fit_lo, DEFAULT_FIT_WINDOW.0)?;
    let hi = s.or("fit_hi", args.fit_hi, DEFAULT_FIT_WINDOW.1)?;
    if lo == 0 || lo >= hi || hi >= kmax {
        return Err(CliError::validation(format!(
            "fit window [{lo}, {hi}] needs 1 <= fit_lo < fit_hi < kmax = {kmax}"
        )));
    }
    let seq = bifurcation_sequence(&p, kmax)?;
    let fit = fit_scaling(&seq, (lo, hi))?;
    match out.format {
        Csv => {
            let mut text = String::from("k,h,fitted\n");
            for (k, h) in seq.h_values.iter().enumerate() {
                let kk = (k + 1) as f64;
                let fitted = fit.h_inf_proxy + fit.c / fit.delta.powf(kk);
                text.push_str(&format!("{},{},{}\n", k + 1, csv(*h), csv(fitted)));
            }
            out.write(&text)
        }
        _ => out.write_json(&json!({
            "b": num(p.b),
            "n": p.big_n,
            "kmax": kmax,
            "h_inf_proxy": num(fit.h_inf_proxy),
            "c": num(fit.c),
            "delta": num(fit.delta),
            "fit_window": [lo, hi],
            "rms_residual": num(fit.rms_residual),
            "h": seq.h_values.iter().map(|&h| num(h)).collect::<Vec<_>>(),
        })),
    }
}

fn snapshot_csv(state: &SimState64) -> String {
    let v = &state.vortices;
    let mut text = String::from("p,n,gamma,x,y\n");
    for ((l, z), g) in v.labels.iter().zip(&v.positions).zip(&v.strengths) {
        text.push_str(&format!("{},{},{},{},{}\n", l.p, l.n, csv(*g), csv(z.re), csv(z.im)));
    }
    text
}

fn time_tag(t: f64) -> String {
    fmt_sig(t, 6)
}

pub fn evolve(args: &EvolveArgs) -> Result<(), CliError> {
    let s = Settings::load(args.common.config.as_deref())?;
    let p = s.street_params(&args.street.flags(args.common.n), None)?;
    let dir: PathBuf = s.or("out_dir", args.out_dir.clone(), PathBuf::from("."))?;
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::validation(format!("cannot create {}: {e}", dir.display())))?;
    check_writable(&dir.join("probe"))?;
    let out = Output::resolve(&s, &args.common, Json, &[Json])?;
    let spec = FiniteArraySpec::new(s.or("streets", args.streets, 11)?, s.or("per_row", args.per_row, 10)?)?;
    let t_end = s.or("t_end", args.t_end, 12.0)?;
    let times: Vec<f64> = s.list("snapshots", args.snapshots.as_deref())?.unwrap_or_else(|| vec![0.0, 4.0, 8.0, 12.0]);
    if !(t_end >= 0.0) || times.iter().any(|t| !(*t >= 0.0 && *t <= t_end)) {
        return Err(CliError::validation(format!("snapshot times must lie in [0, t_end = {t_end}]")));
    }
    let dt: Option<f64> = s.value("dt", args.dt)?;
    let scheme = match s.value::<String>("scheme", args.scheme.clone())? {
        Some(name) => name.parse::<Scheme>().map_err(CliError::Validation)?,
        None if dt.is_some() => Scheme::Rk4Fixed,
        None => Scheme::Rk45Adaptive,
    };
    let tol = s.or("tol", args.tol, DEFAULT_TOL)?;
    let time_unit = p.a * p.a / p.gamma.abs();
    let opts = IntegrateOptions {
        scheme,
        dt: dt.unwrap_or(1e-2) * time_unit,
        tol: tol * p.a,
        snapshots: times.iter().map(|t| t * time_unit).collect(),
        length: p.a,
    };
    let dump_grid = s.flag("grid", args.grid)?;
    let half = 0.5 * p.b;
    let g = grid_spec(&s, &args.window, (-2.0 * p.a, 2.0 * p.a, half - 1.5 * p.h, half + 1.5 * p.h))?;

    let state = SimState64::new(build_finite_array(&p, &spec)?);
    let traj = match integrate(&state, t_end * time_unit, &opts) {
        Ok(t) => t,
        Err(e) => {
            if let DynamicsError::NearCollision { last_valid, .. } | DynamicsError::StepUnderflow { last_valid, .. } = &e {
                write_file(&dir.join("last_valid.csv"), &snapshot_csv(last_valid))?;
            }
            return Err(e.into());
        }
    };
    let c0 = conserved_quantities(&state);
    let mut log = Vec::new();
    for (snap, c) in traj.snapshots.iter().zip(&traj.conserved) {
        let tag = time_tag(snap.time);
        let file = format!("snapshot_t{tag}.csv");
        write_file(&dir.join(&file), &snapshot_csv(snap))?;
        let mut grid_files = Vec::new();
        if dump_grid {
            let grid = comoving_snapshot(snap, ORIGIN_LABEL, g.window, g.res, p.a)?;
            let (gc, gs) = (format!("grid_t{tag}.csv"), format!("grid_t{tag}.svg"));
            write_file(&dir.join(&gc), &grid.to_csv())?;
            let svg = render_contours(&grid, &auto_levels(&grid, 40), &[], &set_markers(&snap.vortices));
            write_file(&dir.join(&gs), &svg)?;
            grid_files = vec![gc, gs];
        }
        let pairs = dipole_clusters(snap, p.a)?;
        log.push(json!({
            "time": num(snap.time),
            "file": file,
            "grids": grid_files,
            "hamiltonian": num(c.hamiltonian),
            "impulse": [num(c.impulse[0]), num(c.impulse[1])],
            "angular_impulse": num(c.angular_impulse),
            "total_circulation": num(c.total_circulation),
            "hamiltonian_relative_drift": num(((c.hamiltonian - c0.hamiltonian) / c0.hamiltonian).abs()),
            "impulse_drift": num((c.impulse[0] - c0.impulse[0]).hypot(c.impulse[1] - c0.impulse[1])),
            "dipole_pairs": pairs.len(),
            "min_separation": num(snap.vortices.min_separation()),
        }));
    }
    let scheme_name = match scheme {
        Scheme::Rk4Fixed => "rk4-fixed",
        Scheme::Rk45Adaptive => "rk45-adaptive",
    };
    out.write_json(&json!({
        "params": params_json(&p),
        "streets": spec.n_streets,
        "per_row": spec.vortices_per_row,
        "vortices": spec.total(),
        "scheme": scheme_name,
        "dt": num(opts.dt),
        "tol": num(opts.tol),
        "t_end": num(t_end),
        "steps": traj.steps,
        "infinite_array_speed": num(array_speed(&p).u),
        "snapshots": log,
    }))
}

/// Largest `y` above the central street up to which the `N` and `2N`
/// truncations agree to `tol` along the line `x = a/4`.
fn truncation_window(p: &StreetParams64, tol: f64) -> Result<f64, CliError> {
    let wide = p.with_big_n(2 * p.big_n.max(1));
    let mut agreed = 0.5 * p.b;
    for j in 0..=2 * p.big_n as i64 {
        let y = 0.5 * p.b + j as f64 * p.h;
        let z = Complex64::new(0.25 * p.a, y);
        let d = (array_velocity(z, p)? - array_velocity(z, &wide)?).norm();
        if d > tol * p.gamma.abs() / p.a {
            break;
        }
        agreed = y;
    }
    Ok(agreed)
}

pub fn report(args: &ReportArgs) -> Result<(), CliError> {
    let s = Settings::load(args.common.config.as_deref())?;
    let out = Output::resolve(&s, &args.common, Json, &[Json])?;
    let b = s.or("b", args.b, 0.2805)?;
    let p = StreetParams::unit(b, 1.2, s.big_n(args.common.n)?)?;
    let seq = bifurcation_sequence(&p, 3)?;
    let classes: Vec<Value> = [1.2, 0.9, 0.83]
        .iter()
        .map(|&h| match topology_class(&p.with_h(h)) {
            Ok(c) => json!({ "h": num(h), "k": c.k, "region_label": c.region_label }),
            Err(e) => json!({ "h": num(h), "error": e.to_string() }),
        })
        .collect();
    let check = verify_equilibrium(&p)?;
    let state = SimState64::new(build_finite_array(&p, &FiniteArraySpec::new(11, 10)?)?);
    let split = saddle_splitting_report(&state, &p, ORIGIN_LABEL, 2)?;
    out.write_json(&json!({
        "b": num(b),
        "n": p.big_n,
        "critical_separations": seq.h_values.iter().map(|&h| num(h)).collect::<Vec<_>>(),
        "classes": classes,
        "equilibrium": { "h": num(p.h), "u": num(check.speed.u), "residual": num(check.residual) },
        "truncation_agreement_y": num(truncation_window(&p, 1e-6)?),
        "finite_array_splitting": {
            "h": num(p.h),
            "saddles": split.saddles.len(),
            "gaps": split.gaps.len(),
            "min_gap": num(split.min_gap()),
            "max_gap": num(split.max_gap()),
        },
    }))
}
