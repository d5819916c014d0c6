//! `verify`: a quick oracle and invariant battery at small heights.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use anyhow::Result;
use zeta_strips::contour::ContourTracer;
use zeta_strips::gram::gram_point;
use zeta_strips::roots::bisect;
use zeta_strips::strips::strips_from_boundaries;
use zeta_strips::zeta::{hardy_z, zeta, zeta_with_derivative, REDUCED_TARGET_MAX};
use zeta_strips::{ComplexPoint, EvalParams};

use crate::cache::{Cache, Kind, Lookup};
use crate::config::RunConfig;
use crate::exit::{coded, ExitKind};

/// Strict targets below this use the full evaluator.
const STRICT_TARGET_MAX: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }
}

fn check(name: &str, result: Result<(bool, String)>) -> Check {
    match result {
        Ok((passed, detail)) => Check {
            name: name.into(),
            passed,
            detail,
        },
        Err(e) => Check {
            name: name.into(),
            passed: false,
            detail: format!("error: {e:#}"),
        },
    }
}

/// Evaluator for the battery: the strict one for tight targets, the
/// reduced one otherwise.
pub fn verify_params(target: f64) -> Result<EvalParams> {
    if target <= STRICT_TARGET_MAX {
        Ok(EvalParams::with_target(target)?)
    } else if target <= REDUCED_TARGET_MAX {
        Ok(EvalParams::reduced(target)?)
    } else {
        Err(coded(
            ExitKind::Usage,
            format!("--precision must be at most {REDUCED_TARGET_MAX:e}, got {target:e}"),
        ))
    }
}

pub fn run(cfg: &RunConfig) -> Result<VerifyReport> {
    let start = Instant::now();
    let params = verify_params(cfg.eval.target_abs_error)?;
    let target = params.target_abs_error;
    // Tolerances widen in proportion to the error target.
    let scaled = |base: f64, k: f64| base.max(k * target);
    let mut checks = Vec::new();

    checks.push(check("zeta_two", (|| {
        let v = zeta(ComplexPoint::new(2.0, 0.0), &params)?.value;
        let err = (v - PI * PI / 6.0).norm();
        let tol = scaled(1e-10, 10.0);
        Ok((err <= tol, format!("|zeta(2) - pi^2/6| = {err:.3e} (tol {tol:.1e})")))
    })()));

    checks.push(check("conjugate_symmetry", (|| {
        let mut worst: f64 = 0.0;
        for &(s, t) in &[(0.5, 14.1), (0.3, 37.5), (1.7, 62.0), (-0.5, 88.8), (3.0, 99.0)] {
            let a = zeta(ComplexPoint::new(s, t), &params)?.value;
            let b = zeta(ComplexPoint::new(s, -t), &params)?.value;
            worst = worst.max((a - b.conj()).norm());
        }
        let tol = scaled(1e-10, 10.0);
        Ok((worst <= tol, format!("max |zeta(conj s) - conj zeta(s)| = {worst:.3e} (tol {tol:.1e})")))
    })()));

    checks.push(check("derivative", (|| {
        let mut worst: f64 = 0.0;
        let h = 1e-5;
        for &(s, t) in &[(0.5, 20.0), (0.8, 47.3), (2.5, 71.0), (-1.0, 95.0)] {
            let v = zeta_with_derivative(ComplexPoint::new(s, t), &params)?;
            let d = v.derivative.unwrap_or_default();
            let plus = zeta(ComplexPoint::new(s + h, t), &params)?.value;
            let minus = zeta(ComplexPoint::new(s - h, t), &params)?.value;
            let fd = (plus - minus) / (2.0 * h);
            worst = worst.max((fd - d).norm() / d.norm().max(1.0));
        }
        let tol = scaled(1e-6, 10.0);
        Ok((worst <= tol, format!("max relative |fd - zeta'| = {worst:.3e} (tol {tol:.1e})")))
    })()));

    checks.push(check("first_gram_point", (|| {
        let g = gram_point(-1)?.height;
        let err = (g - 9.6669080561).abs();
        Ok((err <= 1e-6, format!("g_-1 = {g:.10}")))
    })()));

    checks.push(check("first_zero", (|| {
        let t = bisect(|t| hardy_z(t, &params), 14.0, 14.3, 1e-10)?;
        let tol = scaled(1e-5, 100.0);
        Ok(((t - 14.134725).abs() <= tol, format!("first zero at t = {t:.8} (tol {tol:.1e})")))
    })()));

    checks.push(check("strip_one_identity", (|| {
        let tracer = ContourTracer::new(EvalParams::default(), cfg.trace)?;
        let b = [tracer.boundary(1)?, tracer.boundary(2)?];
        let strip = strips_from_boundaries(&b, &tracer)?.remove(0);
        strip.check_invariants()?;
        Ok((
            strip.n_zeros() == strip.gram_count && strip.gram_count == 1,
            format!(
                "strip 1 = [{:.6}, {:.6}) holds {} zero(s) and {} Gram point(s)",
                strip.bottom,
                strip.top,
                strip.n_zeros(),
                strip.gram_count
            ),
        ))
    })()));

    let cache = Cache::new(&cfg.cache_dir);
    for kind in Kind::ALL {
        match cache.check(kind) {
            Lookup::Absent => {}
            Lookup::Hit(_) => checks.push(Check {
                name: format!("cache_{}", kind.name()),
                passed: true,
                detail: "checksum ok".into(),
            }),
            Lookup::Stale(why) | Lookup::Corrupt(why) => checks.push(Check {
                name: format!("cache_{}", kind.name()),
                passed: false,
                detail: why,
            }),
        }
    }

    Ok(VerifyReport {
        checks,
        elapsed: start.elapsed(),
    })
}
