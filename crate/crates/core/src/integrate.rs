//! Time integration: multistage Taylor stepping and the reference integrator.
//!
//! [`multistage_taylor`] re-expands the solution about each node and takes a
//! fixed step with the truncated series, which turns the local power series
//! into a one-step method of order `N`. It is only as good as the step is
//! small compared with the local radius of convergence; the step is never
//! adapted so that choice stays visible.
//!
//! [`reference_integrate`] is a Dormand-Prince 5(4) pair with mixed
//! absolute/relative error control that lands exactly on every requested
//! sample time.

use std::fmt;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::exact::riccati_exact;
use crate::field::{Model, ModelInstance};
use crate::series::{generate_taylor_solution, SeriesSolution};

/// States larger than this in magnitude are treated as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Series,
    Multistage,
    Reference,
    Exact,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Series => "series",
            Provenance::Multistage => "multistage",
            Provenance::Reference => "reference",
            Provenance::Exact => "exact",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TrajectoryMeta {
    pub order: Option<usize>,
    pub step: Option<f64>,
    pub tolerance: Option<f64>,
}

/// Samples `(t_i, x(t_i))` of one solution curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<Vec<f64>>,
    component_names: Vec<String>,
    provenance: Provenance,
    meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn new(
        times: Vec<f64>,
        states: Vec<Vec<f64>>,
        component_names: Vec<String>,
        provenance: Provenance,
        meta: TrajectoryMeta,
    ) -> Result<Self> {
        if times.is_empty() || times.len() != states.len() {
            return Err(Error::InvalidArgument(format!(
                "{} times for {} states",
                times.len(),
                states.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(
                "times must be strictly increasing".into(),
            ));
        }
        let dim = component_names.len();
        if states.iter().any(|s| s.len() != dim) {
            return Err(Error::InvalidArgument(format!(
                "every state must have {dim} components"
            )));
        }
        Ok(Self {
            times,
            states,
            component_names,
            provenance,
            meta,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn component(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[i]).collect()
    }

    pub fn component_names(&self) -> &[String] {
        &self.component_names
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory is never empty")
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn meta(&self) -> &TrajectoryMeta {
        &self.meta
    }

    /// CSV with `#` metadata lines, a header `t,<components>` and one row per sample.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# provenance: {}", self.provenance)?;
        if let Some(order) = self.meta.order {
            writeln!(w, "# order: {order}")?;
        }
        if let Some(step) = self.meta.step {
            writeln!(w, "# step: {step}")?;
        }
        if let Some(tol) = self.meta.tolerance {
            writeln!(w, "# tolerance: {tol:e}")?;
        }
        writeln!(w, "t,{}", self.component_names.join(","))?;
        for (t, s) in self.times.iter().zip(&self.states) {
            write!(w, "{t}")?;
            for v in s {
                write!(w, ",{v}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// `samples` equally spaced times on `[0, t_end]`, both ends included.
pub fn uniform_grid(t_end: f64, samples: usize) -> Vec<f64> {
    let n = samples.max(2) - 1;
    (0..=n).map(|i| t_end * i as f64 / n as f64).collect()
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.first() != Some(&0.0) {
        return Err(Error::InvalidArgument("grid must start at t = 0".into()));
    }
    if grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument(
            "grid must be finite and strictly increasing".into(),
        ));
    }
    Ok(())
}

fn diverged(state: &[f64]) -> bool {
    state
        .iter()
        .any(|v| !v.is_finite() || v.abs() > DIVERGENCE_LIMIT)
}

/// Piecewise Taylor integration with a fixed step.
pub fn multistage_taylor(
    model: &ModelInstance,
    order: usize,
    step: f64,
    t_end: f64,
) -> Result<Trajectory> {
    if order < 2 {
        return Err(Error::InvalidArgument(format!(
            "order must be at least 2, got {order}"
        )));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step must be positive, got {step}"
        )));
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "t_end must be positive, got {t_end}"
        )));
    }
    let mut times = vec![0.0];
    let mut states = vec![model.initial_state().to_vec()];
    let mut current = model.clone();
    let mut t = 0.0;
    let mut k = 0usize;
    while t < t_end {
        let mut next = ((k + 1) as f64 * step).min(t_end);
        if t_end - next <= 1e-12 * t_end {
            next = t_end;
        }
        let h = next - t;
        let series = generate_taylor_solution(&current, order).map_err(|_| Error::Divergence {
            step: k + 1,
            time: next,
        })?;
        let state = series.eval(h);
        if diverged(&state) {
            return Err(Error::Divergence {
                step: k + 1,
                time: next,
            });
        }
        current = current.with_initial_state(state.clone())?;
        times.push(next);
        states.push(state);
        t = next;
        k += 1;
    }
    Trajectory::new(
        times,
        states,
        model.component_names(),
        Provenance::Multistage,
        TrajectoryMeta {
            order: Some(order),
            step: Some(step),
            tolerance: None,
        },
    )
}

/// Evaluates every component series on `grid`.
pub fn sample_series(solution: &SeriesSolution, grid: &[f64]) -> Result<Trajectory> {
    check_grid(grid)?;
    let states = grid.iter().map(|&t| solution.eval(t)).collect();
    Trajectory::new(
        grid.to_vec(),
        states,
        solution.model().component_names(),
        Provenance::Series,
        TrajectoryMeta {
            order: Some(solution.order()),
            ..Default::default()
        },
    )
}

/// Closed-form Riccati solution sampled on `grid`.
pub fn riccati_exact_trajectory(y0: f64, grid: &[f64]) -> Result<Trajectory> {
    check_grid(grid)?;
    let states = grid
        .iter()
        .map(|&t| riccati_exact(y0, t).map(|y| vec![y]))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(
        grid.to_vec(),
        states,
        vec!["Y".into()],
        Provenance::Exact,
        TrajectoryMeta::default(),
    )
}

pub const MIN_TOL: f64 = 1e-13;
pub const MAX_TOL: f64 = 1e-3;
const MAX_STEPS: usize = 10_000_000;

// Dormand-Prince 5(4) coefficients.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// How the local error estimate is weighed against the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorControl {
    /// `tol * (1 + |y|)` per component.
    Mixed,
    /// `tol * |y|` per component. Suited to populations that stay positive
    /// but may shrink by many orders of magnitude.
    Relative,
}

impl ErrorControl {
    /// Relative control for the population models, mixed otherwise.
    pub fn for_model(model: &ModelInstance) -> Self {
        match model.model() {
            Model::LotkaVolterra(_) | Model::Sir(_) => ErrorControl::Relative,
            Model::Riccati | Model::Custom => ErrorControl::Mixed,
        }
    }

    fn scale(self, tol: f64, magnitude: f64) -> f64 {
        match self {
            ErrorControl::Mixed => tol + tol * magnitude,
            ErrorControl::Relative => (tol * magnitude).max(f64::MIN_POSITIVE),
        }
    }
}

struct DormandPrince<'a> {
    model: &'a ModelInstance,
    tol: f64,
    control: ErrorControl,
    k: [Vec<f64>; 7],
    stage: Vec<f64>,
    y_new: Vec<f64>,
}

impl<'a> DormandPrince<'a> {
    fn new(model: &'a ModelInstance, tol: f64, control: ErrorControl) -> Self {
        let d = model.dimension();
        Self {
            model,
            tol,
            control,
            k: std::array::from_fn(|_| vec![0.0; d]),
            stage: vec![0.0; d],
            y_new: vec![0.0; d],
        }
    }

    fn rhs(&self, y: &[f64], out: &mut [f64]) {
        self.model
            .field()
            .evaluate_into(y, out)
            .expect("state dimension matches the field");
    }

    fn stage_eval(&mut self, y: &[f64], h: f64, coeffs: &[(usize, f64)], target: usize) {
        for (i, yi) in y.iter().enumerate() {
            self.stage[i] = yi + h * coeffs.iter().map(|&(j, a)| a * self.k[j][i]).sum::<f64>();
        }
        let mut out = std::mem::take(&mut self.k[target]);
        self.rhs(&self.stage, &mut out);
        self.k[target] = out;
    }

    /// One trial step from `y` (with `k[0] = f(y)`); returns the scaled error norm.
    fn trial(&mut self, y: &[f64], h: f64) -> f64 {
        self.stage_eval(y, h, &[(0, A21)], 1);
        self.stage_eval(y, h, &[(0, A31), (1, A32)], 2);
        self.stage_eval(y, h, &[(0, A41), (1, A42), (2, A43)], 3);
        self.stage_eval(y, h, &[(0, A51), (1, A52), (2, A53), (3, A54)], 4);
        self.stage_eval(y, h, &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)], 5);
        for i in 0..y.len() {
            let k = &self.k;
            self.y_new[i] = y[i]
                + h * (A71 * k[0][i]
                    + A73 * k[2][i]
                    + A74 * k[3][i]
                    + A75 * k[4][i]
                    + A76 * k[5][i]);
        }
        let mut k7 = std::mem::take(&mut self.k[6]);
        self.rhs(&self.y_new, &mut k7);
        self.k[6] = k7;

        let mut sum = 0.0;
        for i in 0..y.len() {
            let k = &self.k;
            let err = h
                * (E1 * k[0][i]
                    + E3 * k[2][i]
                    + E4 * k[3][i]
                    + E5 * k[4][i]
                    + E6 * k[5][i]
                    + E7 * k[6][i]);
            let scale = self
                .control
                .scale(self.tol, y[i].abs().max(self.y_new[i].abs()));
            sum += (err / scale).powi(2);
        }
        let norm = (sum / y.len() as f64).sqrt();
        if self.y_new.iter().all(|v| v.is_finite()) {
            norm
        } else {
            f64::INFINITY
        }
    }
}

/// Adaptive Dormand-Prince integration sampled exactly on `grid`.
///
/// `grid` must start at 0 and increase strictly; its last point is the end time.
/// The error control is chosen by [`ErrorControl::for_model`].
pub fn reference_integrate(model: &ModelInstance, grid: &[f64], tol: f64) -> Result<Trajectory> {
    reference_integrate_with(model, grid, tol, ErrorControl::for_model(model))
}

pub fn reference_integrate_with(
    model: &ModelInstance,
    grid: &[f64],
    tol: f64,
    control: ErrorControl,
) -> Result<Trajectory> {
    if !(MIN_TOL..=MAX_TOL).contains(&tol) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must lie in [{MIN_TOL:e}, {MAX_TOL:e}], got {tol:e}"
        )));
    }
    check_grid(grid)?;
    if grid.len() < 2 {
        return Err(Error::InvalidArgument(
            "grid needs an end time after 0".into(),
        ));
    }

    let mut y = model.initial_state().to_vec();
    let mut states = vec![y.clone()];
    let mut dp = DormandPrince::new(model, tol, control);
    let mut k0 = std::mem::take(&mut dp.k[0]);
    dp.rhs(&y, &mut k0);
    dp.k[0] = k0;

    let t_end = *grid.last().expect("grid has at least two points");
    let mut h = initial_step(&y, &dp.k[0], tol, control).min(t_end);
    let mut t = 0.0;
    let mut steps = 0usize;
    for &target in &grid[1..] {
        while t < target {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::StepUnderflow { time: t });
            }
            if h < 16.0 * f64::EPSILON * t.abs().max(1.0) {
                return Err(Error::StepUnderflow { time: t });
            }
            let clamped = t + h >= target - 1e-12 * target.abs().max(1.0);
            let h_try = if clamped { target - t } else { h };
            let err = dp.trial(&y, h_try);
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                if diverged(&dp.y_new) {
                    return Err(Error::StepUnderflow { time: t });
                }
                t = if clamped { target } else { t + h_try };
                std::mem::swap(&mut y, &mut dp.y_new);
                dp.k.swap(0, 6);
                // A clamped step says nothing about the proposed size; keep it.
                if !clamped {
                    h = h_try * factor;
                }
            } else {
                h = h_try * factor.min(1.0);
            }
        }
        states.push(y.clone());
    }
    Trajectory::new(
        grid.to_vec(),
        states,
        model.component_names(),
        Provenance::Reference,
        TrajectoryMeta {
            tolerance: Some(tol),
            ..Default::default()
        },
    )
}

fn initial_step(y: &[f64], f: &[f64], tol: f64, control: ErrorControl) -> f64 {
    let rms = |v: &[f64]| {
        let s: f64 = v
            .iter()
            .zip(y)
            .map(|(a, yi)| (a / control.scale(tol, yi.abs())).powi(2))
            .sum();
        (s / v.len() as f64).sqrt()
    };
    let d0 = rms(y);
    let d1 = rms(f);
    if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        (0.01 * d0 / d1).max(1e-6)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::lv_conserved;
    use crate::field::{LvParams, SirParams, RICCATI_STABLE};

    #[test]
    fn reference_matches_riccati_closed_form() {
        let m = ModelInstance::riccati(0.0).unwrap();
        let traj = reference_integrate(&m, &[0.0, 1.0], 1e-10).unwrap();
        let exact = riccati_exact(0.0, 1.0).unwrap();
        assert!((traj.final_state()[0] - exact).abs() < 1e-9);
        assert!((traj.final_state()[0] - 1.68949).abs() < 1e-5);
        assert_eq!(traj.provenance(), Provenance::Reference);
    }

    #[test]
    fn reference_conserves_lv_invariant() {
        let p = LvParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let m = ModelInstance::lotka_volterra(p, 3.0, 2.0).unwrap();
        let traj = reference_integrate(&m, &uniform_grid(20.0, 401), 1e-11).unwrap();
        let h0 = lv_conserved(3.0, 2.0, &p).unwrap();
        for s in traj.states() {
            assert!((lv_conserved(s[0], s[1], &p).unwrap() - h0).abs() < 1e-6);
        }
    }

    #[test]
    fn reference_rejects_bad_input() {
        let m = ModelInstance::riccati(0.0).unwrap();
        assert!(reference_integrate(&m, &[0.0, 1.0], 1e-2).is_err());
        assert!(reference_integrate(&m, &[0.0, 1.0], 1e-14).is_err());
        assert!(reference_integrate(&m, &[0.5, 1.0], 1e-8).is_err());
        assert!(reference_integrate(&m, &[0.0, 1.0, 1.0], 1e-8).is_err());
        assert!(reference_integrate(&m, &[0.0], 1e-8).is_err());
    }

    #[test]
    fn reference_reports_blow_up() {
        let m = ModelInstance::riccati(-1.0).unwrap();
        let pole = crate::exact::riccati_pole(-1.0).unwrap();
        let r = reference_integrate(&m, &[0.0, 2.0 * pole], 1e-8);
        match r {
            Err(Error::StepUnderflow { time }) => assert!(time <= pole + 1e-6 && time > 0.5 * pole),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn multistage_riccati_accuracy() {
        let m = ModelInstance::riccati(0.0).unwrap();
        let traj = multistage_taylor(&m, 5, 0.2, 5.0).unwrap();
        assert_eq!(traj.len(), 26);
        assert!((traj.final_time() - 5.0).abs() < 1e-15);
        let exact = riccati_exact(0.0, 5.0).unwrap();
        assert!((traj.final_state()[0] - exact).abs() < 1e-6);
        assert!((exact - RICCATI_STABLE).abs() < 1e-4);
    }

    #[test]
    fn multistage_single_stage_is_plain_series() {
        let m = ModelInstance::riccati(0.0).unwrap();
        let traj = multistage_taylor(&m, 5, 0.7, 0.7).unwrap();
        let series = generate_taylor_solution(&m, 5).unwrap();
        assert_eq!(traj.len(), 2);
        assert_eq!(traj.final_state()[0], series.eval(0.7)[0]);
        // step longer than the horizon: one partial stage
        let traj = multistage_taylor(&m, 5, 3.0, 0.7).unwrap();
        assert_eq!(traj.final_state()[0], series.eval(0.7)[0]);
    }

    #[test]
    fn multistage_large_step_fails() {
        let m = ModelInstance::riccati(0.0).unwrap();
        match multistage_taylor(&m, 5, 2.0, 10.0) {
            Err(Error::Divergence { .. }) => {}
            Ok(traj) => {
                let err = (traj.final_state()[0] - RICCATI_STABLE).abs();
                assert!(err > 0.1, "error {err}");
            }
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn multistage_rejects_bad_input() {
        let m = ModelInstance::riccati(0.0).unwrap();
        assert!(multistage_taylor(&m, 1, 0.1, 1.0).is_err());
        assert!(multistage_taylor(&m, 5, -0.1, 1.0).is_err());
        assert!(multistage_taylor(&m, 5, 0.1, 0.0).is_err());
    }

    #[test]
    fn multistage_partial_final_step() {
        let m = ModelInstance::riccati(0.0).unwrap();
        let traj = multistage_taylor(&m, 6, 0.15, 1.0).unwrap();
        assert_eq!(traj.times().len(), 8);
        assert_eq!(traj.final_time(), 1.0);
        let exact = riccati_exact(0.0, 1.0).unwrap();
        assert!((traj.final_state()[0] - exact).abs() < 1e-5);
    }

    #[test]
    fn sample_series_at_origin() {
        let p = SirParams::new(0.01, 0.02).unwrap();
        let m = ModelInstance::sir(p, 20.0, 15.0, 10.0).unwrap();
        let s = generate_taylor_solution(&m, 5).unwrap();
        let traj = sample_series(&s, &[0.0]).unwrap();
        assert_eq!(traj.final_state(), &[20.0, 15.0, 10.0]);
        assert_eq!(traj.provenance(), Provenance::Series);
        assert!(sample_series(&s, &[0.1, 0.2]).is_err());
    }

    #[test]
    fn csv_layout() {
        let m = ModelInstance::riccati(0.0).unwrap();
        let traj = riccati_exact_trajectory(0.0, &[0.0, 0.5]).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# provenance: exact");
        assert_eq!(lines[1], "t,Y");
        assert_eq!(lines[2], "0,0");
        assert_eq!(lines.len(), 4);
        let _ = m;
    }

    #[test]
    fn trajectory_validation() {
        let names = vec!["x".to_string()];
        let meta = TrajectoryMeta::default();
        assert!(Trajectory::new(
            vec![0.0, 0.0],
            vec![vec![1.0], vec![1.0]],
            names.clone(),
            Provenance::Exact,
            meta
        )
        .is_err());
        assert!(Trajectory::new(
            vec![0.0],
            vec![vec![1.0, 2.0]],
            names.clone(),
            Provenance::Exact,
            meta
        )
        .is_err());
        assert!(Trajectory::new(
            vec![0.0, 1.0],
            vec![vec![1.0]],
            names,
            Provenance::Exact,
            meta
        )
        .is_err());
    }
}
