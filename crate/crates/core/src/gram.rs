//! Gram points `g_n` (solutions of `θ(g_n) = nπ`) and the smooth gap model
//! `F(t) = 2π / ln(t/2π)`.
//!
//! Indexing starts at `n = -1`, the first Gram point above the minimum of
//! theta (`g_{-1} ≈ 9.6669`).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::zeta::{rs_theta, theta_derivative_series, theta_series, THETA_T_MIN};

/// Lowest Gram index handled.
pub const FIRST_INDEX: i64 = -1;

const MAX_ITERATIONS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramPoint {
    pub n: i64,
    pub height: f64,
}

/// `2π / ln(t / 2π)`: the asymptotic distance between neighbouring Gram
/// points at height `t`.
pub fn gap_model(t: f64) -> Result<f64> {
    if !(t > 2.0 * PI) {
        return Err(Error::DomainError(format!("gap_model needs t > 2π, got {t}")));
    }
    Ok(2.0 * PI / (t / (2.0 * PI)).ln())
}

/// Solves `θ(t) = nπ` by Newton's method from `seed`, falling back to
/// bisection whenever an iterate leaves the current bracket.
fn solve_theta(n: i64, seed: f64) -> Result<f64> {
    let target = n as f64 * PI;
    let f = |t: f64| theta_series(t) - target;

    // Bracket by expanding in steps of half the local gap.
    let mut lo = seed.max(THETA_T_MIN);
    let mut hi = lo;
    let step = |t: f64| 0.5 * gap_model(t.max(2.0 * PI * 1.5)).unwrap_or(1.0);
    while f(lo) > 0.0 {
        hi = lo;
        lo = (lo - step(lo)).max(THETA_T_MIN);
        if lo == THETA_T_MIN && f(lo) > 0.0 {
            return Err(Error::DomainError(format!(
                "Gram index {n} lies below t = {THETA_T_MIN}"
            )));
        }
    }
    if hi <= lo {
        hi = lo;
        while f(hi) < 0.0 {
            lo = hi;
            hi += step(hi);
        }
    }

    let mut t = seed.clamp(lo, hi);
    for _ in 0..MAX_ITERATIONS {
        let ft = f(t);
        if ft == 0.0 {
            return Ok(t);
        }
        if ft < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let mut next = t - ft / theta_derivative_series(t);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - t).abs() <= 1e-14 * t {
            return Ok(next);
        }
        t = next;
    }
    Err(Error::ConvergenceFailure {
        what: format!("Gram point {n}"),
        iterations: MAX_ITERATIONS,
    })
}

/// Seed for `g_n` from the leading-order inversion `n ≈ (t/2π)(ln(t/2π) − 1)`.
fn asymptotic_seed(n: i64) -> f64 {
    let x = (n as f64 + 1.125).max(0.1) / std::f64::consts::E;
    // Solve w e^w = x by a few Newton steps.
    let mut w = x.ln_1p();
    for _ in 0..20 {
        let ew = w.exp();
        w -= (w * ew - x) / (ew * (1.0 + w));
    }
    (2.0 * PI * std::f64::consts::E * w.exp()).max(THETA_T_MIN)
}

pub fn gram_point(n: i64) -> Result<GramPoint> {
    if n < FIRST_INDEX {
        return Err(Error::DomainError(format!(
            "Gram index must be >= {FIRST_INDEX}, got {n}"
        )));
    }
    let height = solve_theta(n, asymptotic_seed(n))?;
    Ok(GramPoint { n, height })
}

/// Consecutive Gram points `g_{-1}, …, g_{n_max}`, each seeded from its
/// predecessor plus the gap model.
pub fn gram_table(n_max: i64) -> Result<Vec<GramPoint>> {
    let mut out = Vec::with_capacity((n_max - FIRST_INDEX + 1).max(0) as usize);
    if n_max < FIRST_INDEX {
        return Ok(out);
    }
    let mut prev = gram_point(FIRST_INDEX)?;
    out.push(prev);
    for n in FIRST_INDEX + 1..=n_max {
        let seed = prev.height + gap_model(prev.height)?;
        let height = solve_theta(n, seed)?;
        prev = GramPoint { n, height };
        out.push(prev);
    }
    Ok(out)
}

/// All Gram points with height `<= t_max`.
pub fn gram_points_below(t_max: f64) -> Result<Vec<GramPoint>> {
    let last = last_index_below(t_max)?;
    gram_table(last)
}

/// Largest `n` with `g_n <= t`, or `FIRST_INDEX - 1` when `t < g_{-1}`.
pub fn last_index_below(t: f64) -> Result<i64> {
    if t < THETA_T_MIN {
        return Ok(FIRST_INDEX - 1);
    }
    let n = (rs_theta(t)? / PI).floor() as i64;
    Ok(n.max(FIRST_INDEX - 1))
}

/// Nearest Gram index to `t` and the distance `|θ(t)/π − n|`.
pub fn nearest_index(t: f64) -> Result<(i64, f64)> {
    let x = rs_theta(t)? / PI;
    let n = x.round();
    Ok((n as i64, (x - n).abs()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapRatio {
    pub n: i64,
    pub height: f64,
    pub gap: f64,
    /// `1 − (g_n − g_{n−1}) / F(g_{n−1})`
    pub ratio: f64,
    /// `1 − (g_n − g_{n−1}) / F(√(g_n g_{n−1}))`
    pub ratio_geo: f64,
}

/// Convergence of actual Gram gaps to the gap model for `n = 0..=n_max`.
pub fn gap_ratio_series(n_max: i64) -> Result<Vec<GapRatio>> {
    if n_max < 1 {
        return Err(Error::DomainError(format!("n_max must be >= 1, got {n_max}")));
    }
    let table = gram_table(n_max)?;
    gap_ratios(&table)
}

/// Gap ratios for a contiguous table starting at any index.
pub fn gap_ratios(table: &[GramPoint]) -> Result<Vec<GapRatio>> {
    table
        .windows(2)
        .map(|w| {
            let (prev, cur) = (w[0], w[1]);
            let gap = cur.height - prev.height;
            Ok(GapRatio {
                n: cur.n,
                height: cur.height,
                gap,
                ratio: 1.0 - gap / gap_model(prev.height)?,
                ratio_geo: 1.0 - gap / gap_model((cur.height * prev.height).sqrt())?,
            })
        })
        .collect()
}
