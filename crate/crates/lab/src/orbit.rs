//! Closed Lotka-Volterra orbits traced with the reference integrator.

use std::f64::consts::PI;

use taylorlab_core::integrate::reference_integrate;
use taylorlab_core::{Error, Model, ModelInstance, Result};

const SAMPLES_PER_CHUNK: usize = 400;
const MAX_CHUNKS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    /// Times and points of one lap, stopping short of the starting angle.
    pub times: Vec<f64>,
    pub points: Vec<(f64, f64)>,
    /// Time at which the winding angle reaches a full turn.
    pub period: f64,
}

/// Follows the trajectory until it has wound once around the center
/// `(c/d, a/b)`.
pub fn trace_orbit(model: &ModelInstance, tol: f64) -> Result<Orbit> {
    let Model::LotkaVolterra(p) = model.model() else {
        return Err(Error::InvalidArgument(
            "orbits need a Lotka-Volterra model".into(),
        ));
    };
    let center = (p.c / p.d, p.a / p.b);
    let angle = |s: &[f64]| (s[1] - center.1).atan2(s[0] - center.0);
    let start = model.initial_state();
    if start[0] == center.0 && start[1] == center.1 {
        return Err(Error::InvalidArgument("initial state is the center".into()));
    }
    // period of the linearized oscillation
    let chunk = 2.0 * PI / (p.a * p.c).sqrt();
    let grid: Vec<f64> = (0..=SAMPLES_PER_CHUNK)
        .map(|i| chunk * i as f64 / SAMPLES_PER_CHUNK as f64)
        .collect();

    let mut times = vec![0.0];
    let mut points = vec![(start[0], start[1])];
    let mut winding = 0.0;
    let mut last_angle = angle(start);
    let mut current = model.clone();
    for n in 0..MAX_CHUNKS {
        let offset = n as f64 * chunk;
        let traj = reference_integrate(&current, &grid, tol)?;
        for (t, s) in traj.times().iter().zip(traj.states()).skip(1) {
            let a = angle(s);
            let mut delta = a - last_angle;
            if delta > PI {
                delta -= 2.0 * PI;
            } else if delta < -PI {
                delta += 2.0 * PI;
            }
            let next = winding + delta;
            if next.abs() >= 2.0 * PI {
                let frac = (2.0 * PI - winding.abs()) / delta.abs();
                let t_prev = *times.last().expect("at least the start");
                let period = t_prev + frac * (offset + t - t_prev);
                return Ok(Orbit {
                    times,
                    points,
                    period,
                });
            }
            winding = next;
            last_angle = a;
            times.push(offset + t);
            points.push((s[0], s[1]));
        }
        current = current.with_initial_state(traj.final_state().to_vec())?;
    }
    Err(Error::Analysis(format!(
        "orbit did not close within {:.3} time units",
        MAX_CHUNKS as f64 * chunk
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::self_intersections;
    use taylorlab_core::exact::lv_conserved;
    use taylorlab_core::field::LvParams;

    #[test]
    fn small_orbit_has_linear_period() {
        let p = LvParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let m = ModelInstance::lotka_volterra(p, 1.001, 1.0).unwrap();
        let orbit = trace_orbit(&m, 1e-12).unwrap();
        assert!((orbit.period - 2.0 * PI).abs() < 1e-3, "{}", orbit.period);
    }

    #[test]
    fn case_v_orbit_is_simple_and_conserved() {
        let p = LvParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let m = ModelInstance::lotka_volterra(p, 3.0, 2.0).unwrap();
        let orbit = trace_orbit(&m, 1e-12).unwrap();
        assert!(orbit.period > 2.0 * PI);
        assert!(self_intersections(&orbit.points).is_empty());
        let h0 = lv_conserved(3.0, 2.0, &p).unwrap();
        for &(x, y) in &orbit.points {
            assert!((lv_conserved(x, y, &p).unwrap() - h0).abs() < 1e-8);
        }
        let last = orbit.points.last().unwrap();
        assert!((last.0 - 3.0).hypot(last.1 - 2.0) < 0.2);
    }
}
