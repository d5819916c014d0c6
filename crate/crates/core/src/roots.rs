//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Illinois-modified regula falsi on a sign-changing bracket `[a, b]`.
///
/// Stops once the bracket is narrower than `xtol` or `f` hits exactly zero;
/// the returned abscissa always lies inside the final bracket.
pub fn illinois<F>(mut f: F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::DomainError(format!(
            "no sign change on [{a}, {b}]: f = {fa}, {fb}"
        )));
    }
    let mut side = 0_i8;
    for _ in 0..200 {
        if (b - a).abs() <= xtol {
            return Ok(0.5 * (a + b));
        }
        let mut c = (a * fb - b * fa) / (fb - fa);
        // Fall back to bisection if the secant lands on (or outside) an end.
        let lo = a.min(b);
        let hi = a.max(b);
        if !(c > lo && c < hi) {
            c = 0.5 * (a + b);
        }
        let fc = f(c)?;
        if fc == 0.0 {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Err(Error::ConvergenceFailure {
        what: "bracketed root search".into(),
        iterations: 200,
    })
}

/// Plain bisection to a bracket width of `xtol`.
pub fn bisect<F>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut fa = f(a)?;
    let fb = f(b)?;
    if fa.signum() == fb.signum() && fa != 0.0 && fb != 0.0 {
        return Err(Error::DomainError(format!("no sign change on [{a}, {b}]")));
    }
    while (b - a).abs() > xtol {
        let c = 0.5 * (a + b);
        let fc = f(c)?;
        if fc == 0.0 {
            return Ok(c);
        }
        if fc.signum() == fa.signum() {
            a = c;
            fa = fc;
        } else {
            b = c;
        }
    }
    Ok(0.5 * (a + b))
}
