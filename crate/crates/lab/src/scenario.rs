//! Scenario execution: trajectories, analyses, artifacts and the report.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use taylorlab_core::convergence::{
    estimate_radius, riccati_multistage_radius, riccati_radius, MULTISTAGE_MIN_TIME,
};
use taylorlab_core::exact::{
    lv_conserved, riccati_exact, sir_endpoints, sir_t_of_x, sir_y_of_x, sir_z_of_x,
};
use taylorlab_core::field::LvParams;
use taylorlab_core::integrate::{
    multistage_taylor, reference_integrate, riccati_exact_trajectory, sample_series, uniform_grid,
    Trajectory,
};
use taylorlab_core::series::generate_taylor_solution;
use taylorlab_core::{Model, ModelInstance, SeriesSolution};

use crate::config::{Analysis, ConfigError, ScenarioConfig};
use crate::geometry::self_intersections;
use crate::orbit::trace_orbit;
use crate::report::{ComparisonReport, ReportRow};
use crate::svg::{Curve, Plot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    Csv,
    Svg,
    #[default]
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn svg(self) -> bool {
        matches!(self, OutputFormat::Svg | OutputFormat::Both)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub format: OutputFormat,
}

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("invalid configuration:\n{}", join_lines(.0))]
    Config(Vec<ConfigError>),
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

fn join_lines(errors: &[ConfigError]) -> String {
    errors
        .iter()
        .map(|e| format!("  {e}"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub operation: String,
    pub message: String,
}

/// Named scalar results of a run, in computation order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Quantities {
    pub values: Vec<(String, f64)>,
    pub failures: Vec<Failure>,
}

impl Quantities {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn set(&mut self, name: impl Into<String>, value: f64) {
        self.values.push((name.into(), value));
    }

    pub fn fail(&mut self, operation: &str, message: impl Into<String>) {
        self.failures.push(Failure {
            operation: operation.into(),
            message: message.into(),
        });
    }

    /// Runs `f`, recording its error under `operation`.
    pub fn attempt<T>(
        &mut self,
        operation: &str,
        f: impl FnOnce() -> taylorlab_core::Result<T>,
    ) -> Option<T> {
        match f() {
            Ok(v) => Some(v),
            Err(e) => {
                self.fail(operation, e.to_string());
                None
            }
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        for f in &self.failures {
            writeln!(w, "# failed: {}: {}", f.operation, f.message)?;
        }
        writeln!(w, "quantity,value")?;
        for (name, value) in &self.values {
            writeln!(w, "{name},{value}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    pub report: ComparisonReport,
    pub quantities: Quantities,
    pub files: Vec<PathBuf>,
}

/// Writes artifact files into one directory, remembering their paths.
pub(crate) struct Artifacts {
    dir: PathBuf,
    format: OutputFormat,
    files: Vec<PathBuf>,
}

impl Artifacts {
    pub(crate) fn create(dir: &Path, format: OutputFormat) -> Result<Self, LabError> {
        fs::create_dir_all(dir).map_err(|source| LabError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            format,
            files: Vec::new(),
        })
    }

    pub(crate) fn write(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
    ) -> Result<(), LabError> {
        let path = self.dir.join(name);
        let io_err = |source| LabError::Io {
            path: path.clone(),
            source,
        };
        let file = fs::File::create(&path).map_err(io_err)?;
        let mut w = BufWriter::new(file);
        body(&mut w).map_err(io_err)?;
        w.flush().map_err(io_err)?;
        self.files.push(path);
        Ok(())
    }

    pub(crate) fn csv(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
    ) -> Result<(), LabError> {
        if self.format.csv() {
            self.write(name, body)?;
        }
        Ok(())
    }

    pub(crate) fn svg(&mut self, name: &str, plot: &Plot) -> Result<(), LabError> {
        if self.format.svg() {
            let text = plot.render();
            self.write(name, |w| w.write_all(text.as_bytes()))?;
        }
        Ok(())
    }

    pub(crate) fn into_files(self) -> Vec<PathBuf> {
        self.files
    }
}

pub(crate) fn write_series<W: Write + ?Sized>(
    series: &SeriesSolution,
    w: &mut W,
) -> io::Result<()> {
    let names = series.model().component_names();
    writeln!(w, "# model: {}", series.model().label())?;
    writeln!(w, "# order: {}", series.order())?;
    writeln!(w, "k,{}", names.join(","))?;
    for k in 0..=series.order() {
        let row: Vec<String> = series
            .components()
            .iter()
            .map(|c| c.coefficient(k).to_string())
            .collect();
        writeln!(w, "{k},{}", row.join(","))?;
    }
    Ok(())
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Range of the finite values, widened by `pad` of its span on each side.
pub(crate) fn padded_range(values: impl Iterator<Item = f64>, pad: f64) -> Option<(f64, f64)> {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if !lo.is_finite() {
        return None;
    }
    let span = (hi - lo).max(1e-9 * lo.abs().max(1.0));
    Some((lo - pad * span, hi + pad * span))
}

fn lv_params(model: &ModelInstance) -> Option<LvParams> {
    match model.model() {
        Model::LotkaVolterra(p) => Some(p),
        _ => None,
    }
}

fn lv_drift(traj: &Trajectory, p: &LvParams, h0: f64) -> taylorlab_core::Result<f64> {
    let mut worst: f64 = 0.0;
    for s in traj.states() {
        worst = worst.max((lv_conserved(s[0], s[1], p)? - h0).abs());
    }
    Ok(worst)
}

fn population_drift(traj: &Trajectory) -> f64 {
    let total0: f64 = traj.states()[0].iter().sum();
    traj.states()
        .iter()
        .map(|s| (s.iter().sum::<f64>() - total0).abs())
        .fold(0.0, f64::max)
}

fn component_min(traj: &Trajectory, i: usize) -> f64 {
    traj.states()
        .iter()
        .map(|s| s[i])
        .fold(f64::INFINITY, f64::min)
}

pub fn run_scenario(
    config: &ScenarioConfig,
    opts: &RunOptions,
) -> Result<ScenarioOutcome, LabError> {
    let model = config
        .model
        .instance()
        .map_err(|e| LabError::Config(vec![ConfigError::new("model", e.to_string())]))?
        .with_label(config.label.clone());
    let mut out = Artifacts::create(&opts.out_dir, opts.format)?;
    let mut q = Quantities::default();
    let grid = uniform_grid(config.grid.t_end, config.grid.samples);
    let t_end = config.grid.t_end;
    let names = model.component_names();
    let is_riccati = matches!(model.model(), Model::Riccati);

    let series = q.attempt("generate_taylor_solution", || {
        generate_taylor_solution(&model, config.series_order)
    });
    if let Some(s) = &series {
        out.csv("series.csv", |w| write_series(s, w))?;
    }
    let series_traj = match &series {
        Some(s) => q.attempt("sample_series", || sample_series(s, &grid)),
        None => None,
    };
    let reference = q.attempt("reference_integrate", || {
        reference_integrate(&model, &grid, config.reference_tol)
    });
    let multistage = match config.multistage {
        Some(m) => q.attempt("multistage_taylor", || {
            multistage_taylor(&model, m.order, m.step, t_end)
        }),
        None => None,
    };
    let exact = if is_riccati {
        q.attempt("riccati_exact", || {
            riccati_exact_trajectory(model.initial_state()[0], &grid)
        })
    } else {
        None
    };
    for (name, traj) in [
        ("traj_series.csv", &series_traj),
        ("traj_reference.csv", &reference),
        ("traj_multistage.csv", &multistage),
        ("traj_exact.csv", &exact),
    ] {
        if let Some(traj) = traj {
            out.csv(name, |w| traj.write_csv(w))?;
        }
    }

    // End-of-window comparisons against the best available truth.
    let truth = exact.as_ref().or(reference.as_ref());
    if let (Some(s), Some(truth)) = (&series_traj, truth) {
        q.set(
            "series_end_deviation",
            max_abs_diff(s.final_state(), truth.final_state()),
        );
    }
    if let Some(exact) = &exact {
        q.set("exact_end", exact.final_state()[0]);
        if let Some(r) = &reference {
            q.set(
                "reference_end_error",
                max_abs_diff(r.final_state(), exact.final_state()),
            );
        }
    }
    if let Some(ms) = &multistage {
        for (name, v) in names.iter().zip(ms.final_state()) {
            q.set(format!("multistage_end_{name}"), *v);
        }
        if exact.is_some() {
            let y0 = model.initial_state()[0];
            if let Some(e) = q.attempt("riccati_exact", || riccati_exact(y0, ms.final_time())) {
                q.set("multistage_end_error", (ms.final_state()[0] - e).abs());
            }
        } else if let Some(r) = &reference {
            q.set(
                "multistage_end_deviation",
                max_abs_diff(ms.final_state(), r.final_state()),
            );
        }
    }
    if let Model::Sir(_) = model.model() {
        if let Some(r) = &reference {
            q.set("population_drift_reference", population_drift(r));
        }
        if let Some(ms) = &multistage {
            q.set("population_drift_multistage", population_drift(ms));
        }
        if let Some(s) = &series {
            let worst = (1..=s.order())
                .map(|k| {
                    s.components()
                        .iter()
                        .map(|c| c.coefficient(k))
                        .sum::<f64>()
                        .abs()
                })
                .fold(0.0, f64::max);
            q.set("series_sum_identity", worst);
        }
    }

    if config.has(Analysis::Radius) {
        radius_analysis(config, &model, &grid, &mut q);
    }
    if config.has(Analysis::Endpoints) {
        endpoints_analysis(&model, series_traj.as_ref(), &mut q, &mut out)?;
    }
    if config.has(Analysis::Conserved) {
        conserved_analysis(
            &model,
            series_traj.as_ref(),
            reference.as_ref(),
            multistage.as_ref(),
            &mut q,
        );
    }
    if config.has(Analysis::PhasePlane) {
        phase_plane_analysis(config, &model, series_traj.as_ref(), &mut q, &mut out)?;
    }

    // Time plot of every component.
    let mut plot = Plot::new(&config.label, "t", &names.join(", "));
    let mut bounds = Vec::new();
    for (i, name) in names.iter().enumerate() {
        let pts = |traj: &Trajectory| -> Vec<(f64, f64)> {
            traj.times()
                .iter()
                .zip(traj.states())
                .map(|(t, s)| (*t, s[i]))
                .collect()
        };
        if let Some(e) = &exact {
            bounds.extend(e.component(i));
            plot.curves
                .push(Curve::solid(format!("{name} exact"), pts(e)));
        }
        if let Some(r) = &reference {
            bounds.extend(r.component(i));
            plot.curves
                .push(Curve::solid(format!("{name} reference"), pts(r)));
        }
        if let Some(m) = &multistage {
            plot.curves
                .push(Curve::dashed(format!("{name} multistage"), pts(m)));
        }
        if let Some(s) = &series_traj {
            plot.curves
                .push(Curve::dashed(format!("{name} series"), pts(s)));
        }
    }
    plot.x_range = Some((0.0, t_end));
    plot.y_range = padded_range(bounds.into_iter(), 0.15);
    out.svg("trajectories.svg", &plot)?;

    let report = build_report(config, &model, &q);
    out.csv("quantities.csv", |w| q.write_csv(w))?;
    out.write("report.txt", |w| report.write_text(w))?;
    out.write("report.csv", |w| report.write_csv(w))?;
    Ok(ScenarioOutcome {
        report,
        quantities: q,
        files: out.into_files(),
    })
}

fn radius_analysis(
    config: &ScenarioConfig,
    model: &ModelInstance,
    grid: &[f64],
    q: &mut Quantities,
) {
    if matches!(model.model(), Model::Riccati) {
        let y0 = model.initial_state()[0];
        if let Some(r) = q.attempt("riccati_radius", || riccati_radius(y0)) {
            q.set("radius_exact", r.radius.value());
        }
        // Radius of the re-expansion along the trajectory.
        let min = if y0 == 0.0 {
            let mut times = grid.to_vec();
            if MULTISTAGE_MIN_TIME <= config.grid.t_end {
                times.push(MULTISTAGE_MIN_TIME);
            }
            times
                .iter()
                .map(|&t| riccati_multistage_radius(t).map(|r| r.radius.value()))
                .collect::<taylorlab_core::Result<Vec<f64>>>()
        } else {
            grid.iter()
                .map(|&t| {
                    let y = riccati_exact(y0, t)?;
                    Ok(riccati_radius(y)?.radius.value())
                })
                .collect::<taylorlab_core::Result<Vec<f64>>>()
        };
        if let Some(values) = q.attempt("riccati_multistage_radius", || min) {
            q.set(
                "multistage_radius_min",
                values.into_iter().fold(f64::INFINITY, f64::min),
            );
        }
    }

    let Some(long) = q.attempt("generate_taylor_solution", || {
        generate_taylor_solution(model, config.radius.order)
    }) else {
        return;
    };
    let mut best = f64::INFINITY;
    let mut reasons = Vec::new();
    for (i, name) in model.component_names().iter().enumerate() {
        match estimate_radius(long.component(i), config.radius.window) {
            Ok(r) => {
                q.set(format!("radius_estimate_{name}"), r.radius.value());
                best = best.min(r.radius.value());
            }
            Err(e) => reasons.push(format!("{name}: {e}")),
        }
    }
    if best.is_finite() {
        q.set("radius_estimate", best);
    } else {
        q.fail("estimate_radius", reasons.join("; "));
    }
}

fn endpoints_analysis(
    model: &ModelInstance,
    series_traj: Option<&Trajectory>,
    q: &mut Quantities,
    out: &mut Artifacts,
) -> Result<(), LabError> {
    let Some(ends) = q.attempt("sir_endpoints", || sir_endpoints(model)) else {
        return Ok(());
    };
    q.set("x_limit", ends.x_limit);
    q.set(
        "epidemic_occurs",
        if ends.epidemic_occurs { 1.0 } else { 0.0 },
    );
    if let Some(x) = ends.x_over {
        q.set("x_over", x);
        if let Some(t) = q.attempt("sir_t_of_x", || sir_t_of_x(x, model)) {
            q.set("t_over", t);
        }
    }
    if let (Some(x), Some(y)) = (ends.x_peak, ends.y_peak) {
        q.set("x_peak", x);
        q.set("y_peak", y);
        if let Some(t) = q.attempt("sir_t_of_x", || sir_t_of_x(x, model)) {
            q.set("t_peak", t);
        }
    }

    let Some(s) = series_traj else {
        return Ok(());
    };
    // Closed-form y(x), z(x) at the susceptible counts the series visits.
    let rows: Vec<[f64; 6]> = s
        .times()
        .iter()
        .zip(s.states())
        .map(|(&t, st)| {
            let x = st[0];
            let y = sir_y_of_x(x, model).unwrap_or(f64::NAN);
            let z = sir_z_of_x(x, model).unwrap_or(f64::NAN);
            [t, x, y, z, st[1], st[2]]
        })
        .collect();
    let deviation = rows
        .iter()
        .filter(|r| r[2].is_finite())
        .map(|r| (r[4] - r[2]).abs().max((r[5] - r[3]).abs()))
        .fold(0.0, f64::max);
    q.set("series_curve_deviation", deviation);
    out.csv("sir_curves.csv", |w| write_sir_curves(&rows, w))?;
    out.svg(
        "sir_curves.svg",
        &sir_curve_plot(model, &rows, ends.x_limit, model.label()),
    )?;
    Ok(())
}

pub(crate) fn write_sir_curves<W: Write + ?Sized>(rows: &[[f64; 6]], w: &mut W) -> io::Result<()> {
    writeln!(w, "t,x,y_exact,z_exact,y_series,z_series")?;
    for r in rows {
        writeln!(w, "{},{},{},{},{},{}", r[0], r[1], r[2], r[3], r[4], r[5])?;
    }
    Ok(())
}

pub(crate) fn sir_curve_plot(
    model: &ModelInstance,
    rows: &[[f64; 6]],
    x_limit: f64,
    title: &str,
) -> Plot {
    let x0 = model.initial_state()[0];
    let n = 400;
    let exact_x: Vec<f64> = (0..=n)
        .map(|i| x_limit + (x0 - x_limit) * i as f64 / n as f64)
        .collect();
    let curve = |f: &dyn Fn(f64) -> f64| -> Vec<(f64, f64)> {
        exact_x.iter().map(|&x| (x, f(x))).collect()
    };
    let y_exact = curve(&|x| sir_y_of_x(x, model).unwrap_or(f64::NAN));
    let z_exact = curve(&|x| sir_z_of_x(x, model).unwrap_or(f64::NAN));
    let y_series: Vec<(f64, f64)> = rows.iter().map(|r| (r[1], r[4])).collect();
    let z_series: Vec<(f64, f64)> = rows.iter().map(|r| (r[1], r[5])).collect();
    let bounds = y_exact.iter().chain(&z_exact).map(|p| p.1);
    let mut plot = Plot::new(title, "x (susceptibles)", "y, z")
        .with_curve(Curve::solid("y exact", y_exact.clone()))
        .with_curve(Curve::solid("z exact", z_exact.clone()))
        .with_curve(Curve::dashed("y series", y_series))
        .with_curve(Curve::dashed("z series", z_series));
    plot.x_range = Some((0.0, x0 * 1.05));
    plot.y_range = padded_range(bounds, 0.1);
    plot
}

fn conserved_analysis(
    model: &ModelInstance,
    series_traj: Option<&Trajectory>,
    reference: Option<&Trajectory>,
    multistage: Option<&Trajectory>,
    q: &mut Quantities,
) {
    let Some(p) = lv_params(model) else {
        return;
    };
    let s0 = model.initial_state();
    let Some(h0) = q.attempt("lv_conserved", || lv_conserved(s0[0], s0[1], &p)) else {
        return;
    };
    q.set("conserved_initial", h0);
    if let Some(r) = reference {
        if let Some(d) = q.attempt("lv_conserved", || lv_drift(r, &p, h0)) {
            q.set("reference_conserved_drift", d);
        }
        q.set("reference_min_x", component_min(r, 0));
        q.set("reference_min_y", component_min(r, 1));
    }
    if let Some(m) = multistage {
        if let Some(d) = q.attempt("lv_conserved", || lv_drift(m, &p, h0)) {
            q.set("multistage_conserved_drift", d);
        }
    }
    if let Some(s) = series_traj {
        // Only points inside the positive quadrant have a conserved value.
        let violation = s
            .states()
            .iter()
            .filter_map(|st| lv_conserved(st[0], st[1], &p).ok())
            .map(|h| (h - h0).abs())
            .fold(0.0, f64::max);
        q.set("series_conserved_violation", violation);
        q.set("series_min_x", component_min(s, 0));
        q.set("series_min_y", component_min(s, 1));
        let leaves = s
            .times()
            .iter()
            .zip(s.states())
            .find(|(_, st)| st[0] <= 0.0 || st[1] <= 0.0)
            .map(|(t, _)| *t);
        if let Some(t) = leaves {
            q.set("series_leaves_quadrant_at", t);
        }
    }
}

fn phase_plane_analysis(
    config: &ScenarioConfig,
    model: &ModelInstance,
    series_traj: Option<&Trajectory>,
    q: &mut Quantities,
    out: &mut Artifacts,
) -> Result<(), LabError> {
    let orbit = q.attempt("trace_orbit", || trace_orbit(model, config.reference_tol));
    let series_pts: Vec<(f64, f64)> = series_traj
        .map(|s| s.states().iter().map(|st| (st[0], st[1])).collect())
        .unwrap_or_default();
    if series_traj.is_some() {
        q.set(
            "series_self_intersections",
            self_intersections(&series_pts).len() as f64,
        );
    }
    if let Some(o) = &orbit {
        q.set("orbit_period", o.period);
        q.set(
            "exact_orbit_self_intersections",
            self_intersections(&o.points).len() as f64,
        );
    }
    out.csv("phase_plane.csv", |w| {
        writeln!(w, "curve,t,x,y")?;
        if let Some(o) = &orbit {
            for (t, (x, y)) in o.times.iter().zip(&o.points) {
                writeln!(w, "exact,{t},{x},{y}")?;
            }
        }
        if let Some(s) = series_traj {
            for (t, (x, y)) in s.times().iter().zip(&series_pts) {
                writeln!(w, "series,{t},{x},{y}")?;
            }
        }
        Ok(())
    })?;
    out.svg(
        "phase_plane.svg",
        &phase_plot(
            &config.label,
            orbit.as_ref().map(|o| &o.points[..]),
            &series_pts,
        ),
    )?;
    Ok(())
}

pub(crate) fn phase_plot(title: &str, orbit: Option<&[(f64, f64)]>, series: &[(f64, f64)]) -> Plot {
    let mut plot = Plot::new(title, "x (prey)", "y (predators)");
    let mut closed = orbit.map(<[_]>::to_vec).unwrap_or_default();
    if let Some(&first) = closed.first() {
        closed.push(first);
    }
    let reach = closed
        .iter()
        .chain(series)
        .filter(|p| p.0.is_finite() && p.1.is_finite());
    let bound = |f: fn(&(f64, f64)) -> f64| padded_range(closed.iter().map(f), 0.6);
    let (xr, yr) = if closed.is_empty() {
        (
            padded_range(reach.clone().map(|p| p.0), 0.05),
            padded_range(reach.map(|p| p.1), 0.05),
        )
    } else {
        (bound(|p| p.0), bound(|p| p.1))
    };
    plot.x_range = xr;
    plot.y_range = yr;
    if !closed.is_empty() {
        plot.curves.push(Curve::solid("exact orbit", closed));
    }
    plot.curves.push(Curve::dashed("series", series.to_vec()));
    plot
}

fn build_report(
    config: &ScenarioConfig,
    model: &ModelInstance,
    q: &Quantities,
) -> ComparisonReport {
    let mut report = ComparisonReport::new(&config.label);
    let meta = &mut report.metadata;
    if let Some(d) = &config.description {
        meta.push(("description".into(), d.clone()));
    }
    meta.push(("model".into(), model.model().name().into()));
    let params: Vec<String> = model
        .model()
        .params()
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    if !params.is_empty() {
        meta.push(("params".into(), params.join(" ")));
    }
    let state: Vec<String> = model.initial_state().iter().map(f64::to_string).collect();
    meta.push(("initial_state".into(), state.join(" ")));
    meta.push(("series_order".into(), config.series_order.to_string()));
    if let Some(m) = config.multistage {
        meta.push((
            "multistage".into(),
            format!("order={} step={}", m.order, m.step),
        ));
    }
    meta.push((
        "grid".into(),
        format!(
            "t_end={} samples={}",
            config.grid.t_end, config.grid.samples
        ),
    ));
    meta.push((
        "reference_tol".into(),
        format!("{:e}", config.reference_tol),
    ));
    let analyses: Vec<&str> = config.analyses.iter().map(Analysis::as_str).collect();
    meta.push(("analysis".into(), analyses.join(" ")));

    for e in &config.expectations {
        let row = match q.get(&e.quantity) {
            Some(v) => ReportRow::checked(e, v),
            None => ReportRow::failed(
                &e.quantity,
                &e.check.describe(),
                &e.locus,
                "quantity was not computed",
            ),
        };
        report.rows.push(row);
    }
    for f in &q.failures {
        report.rows.push(ReportRow::failed(
            &f.operation,
            "no error",
            "numeric failure",
            f.message.clone(),
        ));
    }
    report
}
