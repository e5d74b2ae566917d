//! Radii of convergence of the time-power series.
//!
//! For the Riccati model the solution is a Möbius transform of
//! `exp(2√2 t)`, so its poles are known in closed form:
//! `exp(2√2 t_p) = (Y0 - √2 - 1) / (Y0 + √2 - 1)`. The nearest pole to the
//! origin is `Log(ratio) / (2√2)` with the principal logarithm, which gives
//! `|t_c| = (√2/4) |Log(ratio)|`.
//!
//! For the other models the radius is estimated from the trailing
//! coefficients of a generated series.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{RICCATI_STABLE, RICCATI_UNSTABLE};
use crate::series::TruncatedSeries;

/// `ln(1 + √2)`.
const LN_SILVER: f64 = 0.881_373_587_019_543;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Radius {
    Finite(f64),
    Infinite,
}

impl Radius {
    pub fn value(&self) -> f64 {
        match *self {
            Radius::Finite(r) => r,
            Radius::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Radius::Finite(_))
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radius::Finite(r) => write!(f, "{r}"),
            Radius::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiusMethod {
    ExactRiccati,
    ExactMultistage,
    RatioEstimate,
}

impl RadiusMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            RadiusMethod::ExactRiccati => "exact_riccati",
            RadiusMethod::ExactMultistage => "exact_multistage",
            RadiusMethod::RatioEstimate => "ratio_estimate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadiusReport {
    pub radius: Radius,
    pub method: RadiusMethod,
    pub detail: String,
}

/// Radius of the Taylor series of the Riccati solution with `Y(0) = y0`.
pub fn riccati_radius(y0: f64) -> Result<RadiusReport> {
    if !y0.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "y0 must be finite, got {y0}"
        )));
    }
    let scale = 4.0 * f64::EPSILON * y0.abs().max(1.0);
    let numerator = y0 - RICCATI_STABLE;
    let denominator = y0 - RICCATI_UNSTABLE;
    if numerator.abs() <= scale {
        return Ok(RadiusReport {
            radius: Radius::Infinite,
            method: RadiusMethod::ExactRiccati,
            detail: "stationary initial condition Y0 = 1 + sqrt(2); series is constant".into(),
        });
    }
    if denominator.abs() <= scale {
        return Ok(RadiusReport {
            radius: Radius::Infinite,
            method: RadiusMethod::ExactRiccati,
            detail: "unstable fixed point Y0 = 1 - sqrt(2); constant solution".into(),
        });
    }
    let ratio = numerator / denominator;
    let real = ratio.abs().ln();
    let imag = if ratio < 0.0 { PI } else { 0.0 };
    let radius = SQRT_2 / 4.0 * real.hypot(imag);
    let kind = if ratio < 0.0 {
        "complex-conjugate pole pair"
    } else if real > 0.0 {
        "real pole at positive t"
    } else {
        "real pole at negative t"
    };
    Ok(RadiusReport {
        radius: Radius::Finite(radius),
        method: RadiusMethod::ExactRiccati,
        detail: format!("nearest singularity: {kind}"),
    })
}

/// Radius of the re-expansion about time `t` along the `Y0 = 0` solution.
///
/// Only the `Y0 = 0` trajectory is covered; for other initial values use
/// [`riccati_radius`] with the state reached at `t`.
pub fn riccati_multistage_radius(t: f64) -> Result<RadiusReport> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "t must be finite and >= 0, got {t}"
        )));
    }
    let inner = 4.0 * LN_SILVER * LN_SILVER - 8.0 * SQRT_2 * LN_SILVER * t + 8.0 * t * t + PI * PI;
    Ok(RadiusReport {
        radius: Radius::Finite(SQRT_2 / 4.0 * inner.sqrt()),
        method: RadiusMethod::ExactMultistage,
        detail: format!("expansion point t = {t} on the Y0 = 0 trajectory"),
    })
}

/// Lower bound of [`riccati_multistage_radius`], `√2 π / 4`.
pub const MULTISTAGE_MIN_RADIUS: f64 = SQRT_2 * PI / 4.0;

/// Expansion time at which the multistage radius is smallest, `(√2/2) ln(1 + √2)`.
pub const MULTISTAGE_MIN_TIME: f64 = SQRT_2 / 2.0 * LN_SILVER;

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// `(max - min) / median`.
fn dispersion(values: &[f64], med: f64) -> f64 {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (hi - lo) / med
}

/// Radius estimate from the last `window` coefficient pairs of `s`.
///
/// Two estimators are computed and the one with the smaller relative
/// spread wins:
///
/// - the ratio test, `median |c_k / c_{k+1}|`, which converges when the
///   nearest singularity is a single real pole;
/// - the three-term estimate `sqrt(|D_k / D_{k+1}|)` with
///   `D_k = c_k^2 - c_{k-1} c_{k+1}`, which is exact for a conjugate pole
///   pair where the plain ratios oscillate.
pub fn estimate_radius(s: &TruncatedSeries, window: usize) -> Result<RadiusReport> {
    let n = s.order();
    if window < 4 {
        return Err(Error::InvalidArgument(format!(
            "window must be at least 4, got {window}"
        )));
    }
    if n < window {
        return Err(Error::InvalidArgument(format!(
            "series order {n} is smaller than window {window}"
        )));
    }
    let c = s.coefficients();
    let tail = &c[n - window..];
    if tail.contains(&0.0) {
        return Err(Error::NotEstimable(format!(
            "need {} trailing nonzero coefficients",
            window + 1
        )));
    }

    let ratios: Vec<f64> = (n - window..n).map(|k| (c[k] / c[k + 1]).abs()).collect();
    let ratio_median = median(&mut ratios.clone());
    let ratio_spread = dispersion(&ratios, ratio_median);

    let first = (n - window).max(1);
    let dets: Vec<f64> = (first..n)
        .map(|k| c[k] * c[k] - c[k - 1] * c[k + 1])
        .collect();
    let pair: Vec<f64> = dets
        .windows(2)
        .filter(|w| w[0] != 0.0 && w[1] != 0.0)
        .map(|w| (w[0] / w[1]).abs().sqrt())
        .collect();
    let pair_estimate = if pair.len() >= 2 {
        let med = median(&mut pair.clone());
        Some((med, dispersion(&pair, med)))
    } else {
        None
    };

    let (radius, detail) = match pair_estimate {
        Some((med, spread)) if spread < ratio_spread => (
            med,
            format!(
                "three-term conjugate-pair estimate over window {window}: spread {spread:.3e} \
                 (ratio test median {ratio_median:.6}, spread {ratio_spread:.3e})"
            ),
        ),
        _ => (
            ratio_median,
            format!("ratio test median over window {window}: spread {ratio_spread:.3e}"),
        ),
    };
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::NotEstimable(format!(
            "estimate {radius} is not a positive radius"
        )));
    }
    Ok(RadiusReport {
        radius: Radius::Finite(radius),
        method: RadiusMethod::RatioEstimate,
        detail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn riccati_origin() {
        let r = riccati_radius(0.0).unwrap();
        let expected = SQRT_2 / 4.0 * (4.0 * LN_SILVER.powi(2) + PI * PI).sqrt();
        assert!((r.radius.value() - expected).abs() < 1e-14);
        assert!((r.radius.value() - 1.274).abs() < 1e-3);
        assert_eq!(r.method, RadiusMethod::ExactRiccati);
    }

    #[test]
    fn riccati_y0_five() {
        let r = riccati_radius(5.0).unwrap().radius.value();
        assert!((r - 0.261).abs() < 1e-3, "{r}");
    }

    #[test]
    fn riccati_fixed_points_have_infinite_radius() {
        assert_eq!(
            riccati_radius(RICCATI_STABLE).unwrap().radius,
            Radius::Infinite
        );
        let r = riccati_radius(RICCATI_UNSTABLE).unwrap();
        assert_eq!(r.radius, Radius::Infinite);
        assert!(r.detail.contains("constant"));
        assert!(riccati_radius(f64::NAN).is_err());
    }

    #[test]
    fn riccati_radius_shrinks_above_attractor() {
        let mut prev = f64::INFINITY;
        for i in 1..200 {
            let y0 = RICCATI_STABLE + 0.05 * i as f64;
            let r = riccati_radius(y0).unwrap().radius.value();
            assert!(r.is_finite() && r < prev, "y0={y0}");
            prev = r;
        }
    }

    #[test]
    fn multistage_bound() {
        let r0 = riccati_multistage_radius(0.0).unwrap().radius.value();
        assert!((r0 - riccati_radius(0.0).unwrap().radius.value()).abs() < 1e-14);
        let at_min = riccati_multistage_radius(MULTISTAGE_MIN_TIME)
            .unwrap()
            .radius
            .value();
        assert!((at_min - MULTISTAGE_MIN_RADIUS).abs() < 1e-12);
        assert!((MULTISTAGE_MIN_RADIUS - 1.1107).abs() < 1e-4);
        for i in 0..=10_000 {
            let t = i as f64 * 0.01;
            let r = riccati_multistage_radius(t).unwrap().radius.value();
            assert!(r >= MULTISTAGE_MIN_RADIUS - 1e-14, "t={t}");
        }
        assert!(riccati_multistage_radius(-1.0).is_err());
    }

    #[test]
    fn geometric_series_is_exact() {
        let c: Vec<f64> = (0..=20).map(|k| 2f64.powi(-k)).collect();
        let s = TruncatedSeries::new(c).unwrap();
        let r = estimate_radius(&s, 8).unwrap();
        assert_eq!(r.radius.value(), 2.0);
        assert_eq!(r.method, RadiusMethod::RatioEstimate);
    }

    #[test]
    fn conjugate_pair_series() {
        // 1 / (1 - 2 cos θ t/R + t²/R²) has poles at R e^{±iθ}
        let (radius, theta) = (1.5_f64, 1.1_f64);
        let n = 30;
        let c: Vec<f64> = (0..=n)
            .map(|k| ((k + 1) as f64 * theta).sin() / theta.sin() / radius.powi(k))
            .collect();
        let s = TruncatedSeries::new(c).unwrap();
        let r = estimate_radius(&s, 8).unwrap().radius.value();
        assert!((r - radius).abs() < 1e-9, "{r}");
    }

    #[test]
    fn estimator_errors() {
        let s = TruncatedSeries::new(vec![1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            estimate_radius(&s, 4),
            Err(Error::NotEstimable(_))
        ));
        assert!(matches!(
            estimate_radius(&s, 3),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            estimate_radius(&s, 8),
            Err(Error::InvalidArgument(_))
        ));
    }
}
