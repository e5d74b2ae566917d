//! Closed-form and implicit exact solutions of the three models.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::field::{LvParams, Model, ModelInstance, SirParams, RICCATI_STABLE, RICCATI_UNSTABLE};
use crate::quadrature;
use crate::roots::find_root_bracketed;

/// Growth rate `2√2` of the linearised Riccati flow.
const RICCATI_RATE: f64 = 2.0 * SQRT_2;

/// Time of the real pole of the Riccati solution started at `y0`, if any.
///
/// The pole sits where `(y0 + √2 - 1) e^{2√2 t} = y0 - √2 - 1`; it is at
/// positive time for `y0 < 1 - √2` and at negative time for `y0 > 1 + √2`.
pub fn riccati_pole(y0: f64) -> Option<f64> {
    let a = y0 - RICCATI_UNSTABLE;
    let b = y0 - RICCATI_STABLE;
    if a == 0.0 || b == 0.0 {
        return None;
    }
    let ratio = b / a;
    (ratio > 0.0).then(|| ratio.ln() / RICCATI_RATE)
}

/// Exact solution of `dY/dt = 2Y - Y^2 + 1` with `Y(0) = y0`.
pub fn riccati_exact(y0: f64, t: f64) -> Result<f64> {
    if !(y0.is_finite() && t.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "y0 and t must be finite, got {y0}, {t}"
        )));
    }
    if let Some(pole) = riccati_pole(y0) {
        let (lo, hi) = if t >= 0.0 { (0.0, t) } else { (t, 0.0) };
        if pole >= lo && pole <= hi {
            return Err(Error::BlowUp { pole });
        }
    }
    // Y = (Y_s A e - Y_u B) / (A e - B) with A = y0 - Y_u, B = y0 - Y_s and
    // e = exp(2√2 t); divided through by e for t > 0 so nothing overflows.
    let a = y0 - RICCATI_UNSTABLE;
    let b = y0 - RICCATI_STABLE;
    let value = if t >= 0.0 {
        let decay = (-RICCATI_RATE * t).exp();
        (RICCATI_STABLE * a - RICCATI_UNSTABLE * b * decay) / (a - b * decay)
    } else {
        let e = (RICCATI_RATE * t).exp();
        (RICCATI_STABLE * a * e - RICCATI_UNSTABLE * b) / (a * e - b)
    };
    Ok(value)
}

/// `c ln x + a ln y - d x - b y`, constant along prey-predator orbits.
pub fn lv_conserved(x: f64, y: f64, p: &LvParams) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::Domain(format!(
            "conserved quantity needs positive populations, got ({x}, {y})"
        )));
    }
    Ok(p.c * x.ln() + p.a * y.ln() - p.d * x - p.b * y)
}

struct Sir {
    params: SirParams,
    x0: f64,
    y0: f64,
    z0: f64,
}

impl Sir {
    fn from_model(model: &ModelInstance) -> Result<Self> {
        match model.model() {
            Model::Sir(params) => {
                let s = model.initial_state();
                Ok(Self {
                    params,
                    x0: s[0],
                    y0: s[1],
                    z0: s[2],
                })
            }
            other => Err(Error::InvalidArgument(format!(
                "expected an sir model, got {}",
                other.name()
            ))),
        }
    }

    fn ratio(&self) -> f64 {
        self.params.threshold()
    }

    fn y_of_x(&self, x: f64) -> f64 {
        self.y0 + self.x0 - x + self.ratio() * (x / self.x0).ln()
    }
}

fn require_positive_x(x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "susceptibles must be positive, got {x}"
        )))
    }
}

/// Infectives as a function of susceptibles along the SIR orbit.
pub fn sir_y_of_x(x: f64, model: &ModelInstance) -> Result<f64> {
    let sir = Sir::from_model(model)?;
    require_positive_x(x)?;
    if !(sir.x0 > 0.0) {
        return Err(Error::Domain("x0 must be positive".into()));
    }
    Ok(sir.y_of_x(x))
}

/// Removed as a function of susceptibles along the SIR orbit.
pub fn sir_z_of_x(x: f64, model: &ModelInstance) -> Result<f64> {
    let sir = Sir::from_model(model)?;
    require_positive_x(x)?;
    if !(sir.x0 > 0.0) {
        return Err(Error::Domain("x0 must be positive".into()));
    }
    Ok(sir.z0 - sir.ratio() * (x / sir.x0).ln())
}

/// Where and whether the epidemic peaks, and how it ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirEndpoints {
    /// Susceptibles left when infectives vanish (`t -> ∞`).
    pub x_limit: f64,
    /// Susceptibles when infectives fall back to their initial count.
    /// `None` without an epidemic, since infectives never rise above `y0`.
    pub x_over: Option<f64>,
    /// `γ/β`, reported only when the epidemic occurs.
    pub x_peak: Option<f64>,
    pub y_peak: Option<f64>,
    pub epidemic_occurs: bool,
}

/// Root tolerance in `ln x`, i.e. a relative tolerance on the susceptibles.
const LOG_ROOT_TOL: f64 = 1e-14;

pub fn sir_endpoints(model: &ModelInstance) -> Result<SirEndpoints> {
    let sir = Sir::from_model(model)?;
    if !(sir.x0 > 0.0 && sir.y0 > 0.0) {
        return Err(Error::Analysis(format!(
            "endpoints need x0 > 0 and y0 > 0, got x0 = {}, y0 = {}",
            sir.x0, sir.y0
        )));
    }
    let k = sir.ratio();
    let ln_x0 = sir.x0.ln();
    let epidemic_occurs = sir.x0 > k;

    // Both endpoint equations are solved in u = ln x, where they stay well
    // scaled even though x_limit can be many orders of magnitude below x0.
    let limit_residual = |u: f64| sir.y0 + sir.x0 - u.exp() + k * (u - ln_x0);
    let u_hi = sir.x0.min(k).ln();
    let u_lo = ln_x0 - (sir.y0 + sir.x0) / k - 1.0;
    let u_limit = find_root_bracketed(limit_residual, u_lo, u_hi, LOG_ROOT_TOL)
        .map_err(|e| Error::Analysis(format!("x_limit: {e}")))?;
    let x_limit = u_limit.exp();

    let (x_over, x_peak, y_peak) = if epidemic_occurs {
        // x0 - x + k ln(x/x0) rises on (0, k) and falls back to zero at x0,
        // so the nontrivial root lies between x_limit and the peak.
        let over_residual = |u: f64| sir.x0 - u.exp() + k * (u - ln_x0);
        let u_over = find_root_bracketed(over_residual, u_limit, k.ln(), LOG_ROOT_TOL)
            .map_err(|e| Error::Analysis(format!("x_over: {e}")))?;
        (Some(u_over.exp()), Some(k), Some(sir.y_of_x(k)))
    } else {
        (None, None, None)
    };

    Ok(SirEndpoints {
        x_limit,
        x_over,
        x_peak,
        y_peak,
        epidemic_occurs,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct TimeOfXOptions {
    /// Absolute quadrature tolerance on `t`.
    pub tol: f64,
    /// Relative distance above `x_limit` below which no time is reported.
    pub guard: f64,
}

impl Default for TimeOfXOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            guard: 1e-3,
        }
    }
}

/// Time at which the susceptibles have dropped to `x`.
pub fn sir_t_of_x(x: f64, model: &ModelInstance) -> Result<f64> {
    sir_t_of_x_with(x, model, TimeOfXOptions::default())
}

pub fn sir_t_of_x_with(x: f64, model: &ModelInstance, opts: TimeOfXOptions) -> Result<f64> {
    let sir = Sir::from_model(model)?;
    require_positive_x(x)?;
    if x > sir.x0 * (1.0 + 4.0 * f64::EPSILON) {
        return Err(Error::Domain(format!("x = {x} exceeds x0 = {}", sir.x0)));
    }
    if x >= sir.x0 {
        return Ok(0.0);
    }
    let endpoints = sir_endpoints(model)?;
    if x <= endpoints.x_limit * (1.0 + opts.guard) {
        return Err(Error::NearSingular {
            x,
            x_limit: endpoints.x_limit,
        });
    }
    // dt = -dx / (β x y(x)) = -du / (β y(e^u))
    let integrand = |u: f64| 1.0 / sir.y_of_x(u.exp());
    let beta = sir.params.beta;
    let est = quadrature::integrate(integrand, x.ln(), sir.x0.ln(), opts.tol * beta)?;
    Ok(est.value / beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn biazar() -> ModelInstance {
        ModelInstance::sir(SirParams::new(0.01, 0.02).unwrap(), 20.0, 15.0, 10.0).unwrap()
    }

    #[test]
    fn riccati_closed_form() {
        for &y0 in &[0.0, 5.0, -0.3, 2.0] {
            assert!((riccati_exact(y0, 0.0).unwrap() - y0).abs() < 1e-14);
        }
        let y20 = riccati_exact(0.0, 20.0).unwrap();
        assert!((y20 - RICCATI_STABLE).abs() < 1e-10);
        // closed form written out directly
        let e = (2.0 * SQRT_2).exp();
        let direct = (e - 1.0) / ((SQRT_2 - 1.0) * e + SQRT_2 + 1.0);
        let y1 = riccati_exact(0.0, 1.0).unwrap();
        assert!((y1 - direct).abs() < 1e-14);
        assert!((y1 - 1.68949).abs() < 1e-5, "{y1}");
        assert!((riccati_exact(RICCATI_UNSTABLE, 3.0).unwrap() - RICCATI_UNSTABLE).abs() < 1e-14);
    }

    #[test]
    fn riccati_satisfies_ode() {
        let h = 1e-5;
        for &y0 in &[0.0, -0.2, 1.0] {
            for i in 0..100 {
                let t = 0.05 + 0.05 * i as f64;
                let y = riccati_exact(y0, t).unwrap();
                let dy = (riccati_exact(y0, t + h).unwrap() - riccati_exact(y0, t - h).unwrap())
                    / (2.0 * h);
                assert!((dy - (2.0 * y - y * y + 1.0)).abs() < 1e-8, "y0={y0} t={t}");
            }
        }
    }

    #[test]
    fn riccati_blow_up() {
        let y0 = -1.0;
        let pole = riccati_pole(y0).unwrap();
        assert!(pole > 0.0);
        assert!(riccati_exact(y0, 0.9 * pole).is_ok());
        match riccati_exact(y0, 1.1 * pole) {
            Err(Error::BlowUp { pole: p }) => assert!((p - pole).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
        // y0 above the attractor: pole lies in the past
        let back = riccati_pole(5.0).unwrap();
        assert!(back < 0.0);
        assert!(riccati_exact(5.0, 2.0 * back).is_err());
        assert!(riccati_exact(5.0, 10.0).is_ok());
    }

    #[test]
    fn conserved_values() {
        let v = LvParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let q = lv_conserved(3.0, 2.0, &v).unwrap();
        assert!((q - (3f64.ln() + 2f64.ln() - 5.0)).abs() < 1e-14);
        assert!((q + 3.20824).abs() < 1e-5);
        let i = LvParams::new(1.0, 1.0, 0.1, 1.0).unwrap();
        let q1 = lv_conserved(14.0, 18.0, &i).unwrap();
        assert!((q1 - (0.1 * 14f64.ln() + 18f64.ln() - 32.0)).abs() < 1e-13);
        assert!((q1 + 28.8457).abs() < 1e-4, "{q1}");
        assert!(matches!(lv_conserved(-1.0, 2.0, &v), Err(Error::Domain(_))));
        assert!(lv_conserved(1.0, 0.0, &v).is_err());
    }

    #[test]
    fn sir_orbit_values() {
        let m = biazar();
        assert!((sir_y_of_x(20.0, &m).unwrap() - 15.0).abs() < 1e-14);
        assert!((sir_z_of_x(20.0, &m).unwrap() - 10.0).abs() < 1e-14);
        assert!((sir_y_of_x(2.0, &m).unwrap() - 28.3948).abs() < 1e-4);
        assert!((sir_z_of_x(2.0, &m).unwrap() - 14.605).abs() < 1e-3);
        assert!(sir_y_of_x(0.0, &m).is_err());
        assert!(sir_z_of_x(-1.0, &m).is_err());
        assert!(sir_y_of_x(1.0, &ModelInstance::riccati(0.0).unwrap()).is_err());
    }

    #[test]
    fn sir_population_constant_along_orbit() {
        let m = biazar();
        let e = sir_endpoints(&m).unwrap();
        for i in 0..=1000 {
            let u = e.x_limit.ln() + (20f64.ln() - e.x_limit.ln()) * i as f64 / 1000.0;
            let x = u.exp().min(20.0);
            let total = x + sir_y_of_x(x, &m).unwrap() + sir_z_of_x(x, &m).unwrap();
            assert!((total - 45.0).abs() < 1e-12, "x={x}: {total}");
        }
    }

    #[test]
    fn biazar_endpoints() {
        let e = sir_endpoints(&biazar()).unwrap();
        assert!(e.epidemic_occurs);
        assert!(
            (e.x_limit - 5.02e-7).abs() / 5.02e-7 < 1e-2,
            "{}",
            e.x_limit
        );
        let x_over = e.x_over.unwrap();
        assert!((x_over - 9.08e-4).abs() / 9.08e-4 < 1e-2, "{x_over}");
        assert_eq!(e.x_peak, Some(2.0));
        assert!((e.y_peak.unwrap() - 28.39).abs() < 0.01);
        assert!(sir_y_of_x(e.x_limit, &biazar()).unwrap().abs() < 1e-9);
        assert!(e.x_limit < x_over && x_over < 2.0 && 2.0 < 20.0);
    }

    #[test]
    fn no_epidemic_below_threshold() {
        let m = ModelInstance::sir(SirParams::new(0.01, 0.5).unwrap(), 20.0, 5.0, 0.0).unwrap();
        let e = sir_endpoints(&m).unwrap();
        assert!(!e.epidemic_occurs);
        assert_eq!(e.x_peak, None);
        assert_eq!(e.x_over, None);
        assert!(e.x_limit > 0.0 && e.x_limit < 20.0);
        let mut prev = f64::INFINITY;
        for i in 0..=200 {
            let x = 20.0 - (20.0 - e.x_limit) * i as f64 / 200.0;
            let x = x.max(e.x_limit * 1.0001);
            let y = sir_y_of_x(x, &m).unwrap();
            assert!(y < prev || i == 0);
            prev = y;
        }
    }

    #[test]
    fn peak_is_maximum_of_orbit() {
        let m = biazar();
        let e = sir_endpoints(&m).unwrap();
        let yp = e.y_peak.unwrap();
        for i in 1..=5000 {
            let x = e.x_limit + (20.0 - e.x_limit) * i as f64 / 5000.0;
            assert!(sir_y_of_x(x, &m).unwrap() <= yp + 1e-12);
        }
        let dydx = -1.0 + 0.02 / (0.01 * 2.0);
        assert_eq!(dydx, 0.0);
    }

    #[test]
    fn time_of_x() {
        let m = biazar();
        assert_eq!(sir_t_of_x(20.0, &m).unwrap(), 0.0);
        let mut prev = 0.0;
        for &x in &[19.0, 15.0, 10.0, 2.0, 0.1, 1e-3] {
            let t = sir_t_of_x(x, &m).unwrap();
            assert!(t > prev, "x={x}");
            prev = t;
        }
        let e = sir_endpoints(&m).unwrap();
        assert!(matches!(
            sir_t_of_x(e.x_limit * 1.0005, &m),
            Err(Error::NearSingular { .. })
        ));
        assert!(sir_t_of_x(21.0, &m).is_err());
    }
}
