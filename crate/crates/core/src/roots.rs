//! Bracketed scalar root finding (Brent's method: bisection with secant and
//! inverse quadratic interpolation steps).

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 200;

/// Default bracket tolerance.
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;

/// Finds a root of `f` in `[lo, hi]`, which must bracket a sign change.
///
/// Terminates once the bracket is narrower than `tol * max(1, |r|)` (plus a
/// few ulps of `r`), or when `f(r)` is exactly zero.
pub fn find_root_bracketed<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "need finite lo < hi, got [{lo}, {hi}]"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::Bracket {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }

    // b is the best estimate, c the contrapoint with f(c) of opposite sign.
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITERATIONS {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol * b.abs().max(1.0);
        let m = 0.5 * (c - b);
        if m.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(m) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::Domain(format!("function is not finite at {b}")));
        }
    }
    Err(Error::RootNotConverged {
        iterations: MAX_ITERATIONS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two() {
        let r = find_root_bracketed(|x| x * x - 2.0, 1.0, 2.0, 1e-12).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn root_at_origin() {
        let r = find_root_bracketed(|x| x, -1.0, 1.0, 1e-12).unwrap();
        assert!(r.abs() < 1e-12);
    }

    #[test]
    fn final_size_residual() {
        // y0 + x0 - x + (γ/β) ln(x/x0) with x0 = 20, y0 = 15, γ/β = 2
        let f = |x: f64| 15.0 + 20.0 - x + 2.0 * (x / 20.0).ln();
        let r = find_root_bracketed(f, 1e-12, 2.0, 1e-12).unwrap();
        assert!((r - 5.02e-7).abs() / 5.02e-7 < 1e-2, "{r}");
    }

    #[test]
    fn no_sign_change() {
        let err = find_root_bracketed(|x| x * x + 1.0, -1.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(err, Error::Bracket { .. }));
        assert!(find_root_bracketed(|x| x, 1.0, -1.0, 1e-12).is_err());
    }

    #[test]
    fn flat_tail_converges() {
        let r = find_root_bracketed(|x: f64| (x - 0.3).powi(5), 0.0, 1.0, 1e-12).unwrap();
        assert!((r - 0.3).abs() < 1e-2);
        let r = find_root_bracketed(|x: f64| x.exp() - 10.0, -50.0, 50.0, 1e-14).unwrap();
        assert!((r - 10f64.ln()).abs() < 1e-12);
    }
}
