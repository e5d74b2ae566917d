//! The four reference figures.
//!
//! - `fig1`: prey and predator populations against time for Lotka-Volterra
//!   Case I, reference solution against the order-5 series.
//! - `fig2`: Case V in the phase plane, the closed exact orbit against the
//!   self-crossing series curve.
//! - `fig3`, `fig4`: infectives and removed against susceptibles for the two
//!   SIR parameter sets, closed form against the series.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use taylorlab_core::exact::{lv_conserved, sir_endpoints, sir_y_of_x, sir_z_of_x};
use taylorlab_core::field::{LvParams, SirParams};
use taylorlab_core::integrate::{reference_integrate, sample_series, uniform_grid, Trajectory};
use taylorlab_core::series::generate_taylor_solution;
use taylorlab_core::ModelInstance;

use crate::config::Check;
use crate::geometry::self_intersections;
use crate::orbit::trace_orbit;
use crate::report::{ComparisonReport, ReportRow};
use crate::scenario::{
    padded_range, phase_plot, sir_curve_plot, write_sir_curves, Artifacts, LabError, OutputFormat,
};
use crate::svg::{Curve, Plot};

const SERIES_ORDER: usize = 5;
const TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
}

impl FigureId {
    pub const ALL: [FigureId; 4] = [
        FigureId::Fig1,
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
        }
    }

    /// End of the plotted time window.
    pub fn t_end(&self) -> f64 {
        match self {
            FigureId::Fig1 => 5.0,
            FigureId::Fig2 => 6.0,
            FigureId::Fig3 => 10.0,
            FigureId::Fig4 => 0.5,
        }
    }

    pub fn model(&self) -> ModelInstance {
        let built = match self {
            FigureId::Fig1 => LvParams::new(1.0, 1.0, 0.1, 1.0)
                .and_then(|p| ModelInstance::lotka_volterra(p, 14.0, 18.0)),
            FigureId::Fig2 => LvParams::new(1.0, 1.0, 1.0, 1.0)
                .and_then(|p| ModelInstance::lotka_volterra(p, 3.0, 2.0)),
            FigureId::Fig3 => {
                SirParams::new(0.01, 0.02).and_then(|p| ModelInstance::sir(p, 20.0, 15.0, 10.0))
            }
            FigureId::Fig4 => {
                SirParams::new(1.0, 1.0).and_then(|p| ModelInstance::sir(p, 20.0, 4.0, 10.0))
            }
        };
        built.expect("figure parameters are valid")
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| format!("unknown figure \"{s}\"; expected fig1, fig2, fig3 or fig4"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureOutcome {
    pub id: FigureId,
    pub report: ComparisonReport,
    pub files: Vec<PathBuf>,
}

/// Collects check rows; failed computations become failed rows.
struct Checks {
    prefix: &'static str,
    rows: Vec<ReportRow>,
}

impl Checks {
    fn check(&mut self, name: &str, value: f64, check: Check, locus: &str) {
        let quantity = format!("{}.{name}", self.prefix);
        self.rows
            .push(ReportRow::from_check(&quantity, value, check, locus));
    }

    fn attempt<T>(&mut self, operation: &str, r: taylorlab_core::Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                let quantity = format!("{}.{operation}", self.prefix);
                self.rows.push(ReportRow::failed(
                    &quantity,
                    "no error",
                    "numeric failure",
                    e.to_string(),
                ));
                None
            }
        }
    }
}

fn series_on(model: &ModelInstance, grid: &[f64]) -> taylorlab_core::Result<Trajectory> {
    sample_series(&generate_taylor_solution(model, SERIES_ORDER)?, grid)
}

pub fn reproduce_figure(
    id: FigureId,
    out_dir: &Path,
    format: OutputFormat,
) -> Result<FigureOutcome, LabError> {
    let mut out = Artifacts::create(out_dir, format)?;
    let mut checks = Checks {
        prefix: id.as_str(),
        rows: Vec::new(),
    };
    let model = id.model();
    match id {
        FigureId::Fig1 => fig1(&model, &mut checks, &mut out)?,
        FigureId::Fig2 => fig2(&model, &mut checks, &mut out)?,
        FigureId::Fig3 | FigureId::Fig4 => sir_figure(id, &model, &mut checks, &mut out)?,
    }
    let mut report = ComparisonReport::new(id.as_str());
    report
        .metadata
        .push(("model".into(), model.label().to_string()));
    report
        .metadata
        .push(("series_order".into(), SERIES_ORDER.to_string()));
    report
        .metadata
        .push(("t_end".into(), id.t_end().to_string()));
    report.rows = checks.rows;
    Ok(FigureOutcome {
        id,
        report,
        files: out.into_files(),
    })
}

fn fig1(model: &ModelInstance, checks: &mut Checks, out: &mut Artifacts) -> Result<(), LabError> {
    let grid = uniform_grid(FigureId::Fig1.t_end(), 501);
    let series = checks.attempt("sample_series", series_on(model, &grid));
    let exact = checks.attempt(
        "reference_integrate",
        reference_integrate(model, &grid, TOL),
    );
    if let Some(s) = &series {
        let min_x = s.component(0).into_iter().fold(f64::INFINITY, f64::min);
        checks.check(
            "series_min_x",
            min_x,
            Check::Below(0.0),
            "series prey count turns negative",
        );
    }
    if let Some(e) = &exact {
        let min_x = e.component(0).into_iter().fold(f64::INFINITY, f64::min);
        checks.check(
            "exact_min_x",
            min_x,
            Check::Above(0.0),
            "exact prey count stays positive",
        );
    }
    let column = |t: Option<&Trajectory>, i: usize| {
        t.map(|t| t.component(i))
            .unwrap_or_else(|| vec![f64::NAN; grid.len()])
    };
    let cols = [
        column(exact.as_ref(), 0),
        column(exact.as_ref(), 1),
        column(series.as_ref(), 0),
        column(series.as_ref(), 1),
    ];
    out.csv("fig1.csv", |w| {
        writeln!(w, "t,x_exact,y_exact,x_series,y_series")?;
        for (k, t) in grid.iter().enumerate() {
            writeln!(
                w,
                "{t},{},{},{},{}",
                cols[0][k], cols[1][k], cols[2][k], cols[3][k]
            )?;
        }
        Ok(())
    })?;
    let pts = |c: &[f64]| {
        grid.iter()
            .copied()
            .zip(c.iter().copied())
            .collect::<Vec<_>>()
    };
    let mut plot = Plot::new("Case I populations", "t", "x, y")
        .with_curve(Curve::solid("x exact", pts(&cols[0])))
        .with_curve(Curve::solid("y exact", pts(&cols[1])))
        .with_curve(Curve::dashed("x series", pts(&cols[2])))
        .with_curve(Curve::dashed("y series", pts(&cols[3])));
    plot.x_range = Some((0.0, FigureId::Fig1.t_end()));
    // Keep the exact curves in view and let the series run off the axes,
    // while leaving room below zero for negative series values.
    plot.y_range = padded_range(cols[0].iter().chain(&cols[1]).copied(), 0.25);
    out.svg("fig1.svg", &plot)
}

fn fig2(model: &ModelInstance, checks: &mut Checks, out: &mut Artifacts) -> Result<(), LabError> {
    let grid = uniform_grid(FigureId::Fig2.t_end(), 601);
    let series = checks.attempt("sample_series", series_on(model, &grid));
    let orbit = checks.attempt("trace_orbit", trace_orbit(model, TOL));
    let series_pts: Vec<(f64, f64)> = series
        .as_ref()
        .map(|s| s.states().iter().map(|st| (st[0], st[1])).collect())
        .unwrap_or_default();
    if series.is_some() {
        let n = self_intersections(&series_pts).len() as f64;
        checks.check(
            "series_self_intersections",
            n,
            Check::Above(0.5),
            "series curve crosses itself",
        );
    }
    if let Some(o) = &orbit {
        let n = self_intersections(&o.points).len() as f64;
        checks.check(
            "exact_self_intersections",
            n,
            Check::Equals(0.0),
            "exact orbit is a simple closed curve",
        );
        let p = LvParams::new(1.0, 1.0, 1.0, 1.0).expect("valid");
        let h0 = lv_conserved(3.0, 2.0, &p).expect("positive");
        let drift = o
            .points
            .iter()
            .map(|&(x, y)| {
                lv_conserved(x, y, &p)
                    .map(|h| (h - h0).abs())
                    .unwrap_or(f64::INFINITY)
            })
            .fold(0.0, f64::max);
        checks.check(
            "orbit_conserved_drift",
            drift,
            Check::Below(1e-6),
            "exact orbit is a level set of the conserved quantity",
        );
    }
    out.csv("fig2.csv", |w| {
        writeln!(w, "curve,t,x,y")?;
        if let Some(o) = &orbit {
            for (t, (x, y)) in o.times.iter().zip(&o.points) {
                writeln!(w, "exact,{t},{x},{y}")?;
            }
        }
        for (t, (x, y)) in grid.iter().zip(&series_pts) {
            writeln!(w, "series,{t},{x},{y}")?;
        }
        Ok(())
    })?;
    let plot = phase_plot(
        "Case V phase plane",
        orbit.as_ref().map(|o| &o.points[..]),
        &series_pts,
    );
    out.svg("fig2.svg", &plot)
}

fn sir_figure(
    id: FigureId,
    model: &ModelInstance,
    checks: &mut Checks,
    out: &mut Artifacts,
) -> Result<(), LabError> {
    let grid = uniform_grid(id.t_end(), 201);
    let series = checks.attempt("sample_series", series_on(model, &grid));
    let ends = checks.attempt("sir_endpoints", sir_endpoints(model));
    let rows: Vec<[f64; 6]> = series
        .as_ref()
        .map(|s| {
            s.times()
                .iter()
                .zip(s.states())
                .map(|(&t, st)| {
                    let y = sir_y_of_x(st[0], model).unwrap_or(f64::NAN);
                    let z = sir_z_of_x(st[0], model).unwrap_or(f64::NAN);
                    [t, st[0], y, z, st[1], st[2]]
                })
                .collect()
        })
        .unwrap_or_default();

    let x0 = model.initial_state()[0];
    let min_x = rows.iter().map(|r| r[1]).fold(f64::INFINITY, f64::min);
    let max_x = rows.iter().map(|r| r[1]).fold(f64::NEG_INFINITY, f64::max);
    let min_y = rows.iter().map(|r| r[4]).fold(f64::INFINITY, f64::min);
    // Largest relative gap between series y and the closed form y(x) over
    // the rows whose susceptible count satisfies `keep`.
    let deviation = |keep: &dyn Fn(f64) -> bool| {
        rows.iter()
            .filter(|r| keep(r[1]) && r[2].is_finite())
            .map(|r| ((r[4] - r[2]) / r[2]).abs())
            .fold(0.0, f64::max)
    };
    match (id, &ends) {
        (FigureId::Fig3, Some(ends)) => {
            let near = |value| Check::Near {
                value,
                tol: 1e-2,
                relative: true,
            };
            checks.check(
                "x_limit",
                ends.x_limit,
                near(5.02e-7),
                "final susceptibles x_L",
            );
            if let Some(x_over) = ends.x_over {
                checks.check(
                    "x_over",
                    x_over,
                    near(9.08e-4),
                    "susceptibles when infectives return to y0",
                );
            }
            let x_peak = ends.x_peak.unwrap_or(x0);
            checks.check(
                "series_rel_deviation_above_peak",
                deviation(&|x| x >= x_peak),
                Check::Below(0.1),
                "series follows the exact y(x) while x > x_m",
            );
            checks.check(
                "series_rel_deviation_below_peak",
                deviation(&|x| x > 0.0 && x < x_peak),
                Check::Above(0.1),
                "series departs from y(x) where x_over and x_L lie",
            );
            checks.check(
                "series_min_x",
                min_x,
                Check::Below(0.0),
                "series susceptibles cross zero instead of settling at x_L",
            );
        }
        (FigureId::Fig4, _) => {
            checks.check(
                "series_max_x_over_x0",
                max_x / x0,
                Check::Above(1.0),
                "series susceptibles grow although dx/dt < 0",
            );
            checks.check(
                "series_min_y",
                min_y,
                Check::Below(0.0),
                "series predicts negative infectives",
            );
        }
        _ => {}
    }

    out.csv(&format!("{id}.csv"), |w| write_sir_curves(&rows, w))?;
    let x_limit = ends.map(|e| e.x_limit).unwrap_or(0.0);
    let title = match id {
        FigureId::Fig3 => "y(x), z(x): beta = 0.01, gamma = 0.02",
        _ => "y(x), z(x): beta = gamma = 1",
    };
    out.svg(
        &format!("{id}.svg"),
        &sir_curve_plot(model, &rows, x_limit, title),
    )
}
