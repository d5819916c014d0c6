//! Strips between consecutive special Gram points, their critical zeros and
//! the position of each strip's primary zero.
//!
//! A strip owns its bottom boundary and not its top one. Both boundaries are
//! Gram points, so the number of Gram points in a strip is the difference of
//! the boundary Gram indices, and under the usual hypotheses that is also the
//! number of zeros in it.

use rayon::prelude::*;

use crate::contour::{check_in_strip, BoundaryCrossing, ContourTracer};
use crate::error::{Error, Result};
use crate::gram::gap_model;
use crate::roots::illinois;
use crate::zeta::{hardy_z, EvalParams, THETA_T_MIN};

/// Sign changes are bracketed on a grid of `gap_model(t_hi) / GRID_DIVISOR`.
pub const GRID_DIVISOR: f64 = 8.0;
/// Grid halvings tried before a count mismatch is reported.
pub const MAX_REFINEMENTS: usize = 4;
/// Zero heights are located to this bracket width.
pub const ZERO_TOL: f64 = 1e-9;

/// Upper end of the height range handled here.
pub const T_LIMIT: f64 = 1.1e4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroRecord {
    /// 1-based global index by height.
    pub j: usize,
    pub t: f64,
    pub strip_m: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Strip {
    pub m: usize,
    pub bottom: f64,
    pub top: f64,
    pub width: f64,
    /// Gram index of the special Gram point at the bottom.
    pub bottom_gram_index: i64,
    pub gram_count: usize,
    pub zeros: Vec<ZeroRecord>,
    /// 1-based position of the primary zero, counted from the bottom.
    pub primary_index: usize,
    pub primary_height: f64,
    /// `(primary_index − 0.5) / zeros.len()`
    pub primary_stat: f64,
}

impl Strip {
    pub fn n_zeros(&self) -> usize {
        self.zeros.len()
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.bottom + self.top)
    }

    /// Checks every structural invariant of a finished strip.
    pub fn check_invariants(&self) -> Result<()> {
        let fail = |what: &str| {
            Err(Error::DomainError(format!("strip {} violates {what}", self.m)))
        };
        if !(self.bottom < self.top) {
            return fail("bottom < top");
        }
        if (self.width - (self.top - self.bottom)).abs() > 1e-12 * self.top.max(1.0) {
            return fail("width = top - bottom");
        }
        if self.zeros.len() != self.gram_count {
            return fail("zero count = Gram count");
        }
        if self.zeros.is_empty() {
            return fail("at least one zero");
        }
        if !(1..=self.zeros.len()).contains(&self.primary_index) {
            return fail("1 <= primary_index <= zero count");
        }
        if !self.zeros.windows(2).all(|w| w[1].t > w[0].t)
            || !self.zeros.iter().all(|z| z.t >= self.bottom && z.t < self.top)
        {
            return fail("ordered zeros inside [bottom, top)");
        }
        let stat = (self.primary_index as f64 - 0.5) / self.zeros.len() as f64;
        if (stat - self.primary_stat).abs() > 1e-15 || !(stat > 0.0 && stat < 1.0) {
            return fail("primary_stat definition");
        }
        Ok(())
    }
}

/// Zero heights per unit height on the critical line.
pub fn zeros_per_width(strip: &Strip) -> f64 {
    strip.zeros.len() as f64 / strip.width
}

fn check_interval(t_lo: f64, t_hi: f64) -> Result<()> {
    if !(t_lo >= THETA_T_MIN && t_lo < t_hi && t_hi <= T_LIMIT) {
        return Err(Error::DomainError(format!(
            "zero search needs {THETA_T_MIN} <= t_lo < t_hi <= {T_LIMIT}, got [{t_lo}, {t_hi}]"
        )));
    }
    Ok(())
}

fn scan(t_lo: f64, t_hi: f64, spacing: f64, params: &EvalParams) -> Result<Vec<f64>> {
    let cells = ((t_hi - t_lo) / spacing).ceil().max(1.0) as usize;
    let h = (t_hi - t_lo) / cells as f64;
    let z = |t: f64| hardy_z(t, params);
    let mut zeros = Vec::new();
    let mut a = t_lo;
    let mut fa = z(a)?;
    for i in 1..=cells {
        let b = if i == cells { t_hi } else { t_lo + i as f64 * h };
        let fb = z(b)?;
        if fa == 0.0 {
            zeros.push(a);
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            zeros.push(illinois(z, a, b, fa, fb, ZERO_TOL)?);
        }
        a = b;
        fa = fb;
    }
    Ok(zeros)
}

/// Critical zeros in `[t_lo, t_hi)` from sign changes of `Z(t)` on a grid of
/// spacing `gap_model(t_hi) / 8`.
pub fn find_zeros(t_lo: f64, t_hi: f64, params: &EvalParams) -> Result<Vec<f64>> {
    check_interval(t_lo, t_hi)?;
    let spacing = gap_model(t_hi.max(2.0 * std::f64::consts::PI * 1.5))? / GRID_DIVISOR;
    scan(t_lo, t_hi, spacing, params)
}

/// Like [`find_zeros`], but the grid is halved up to four times until
/// exactly `expected` zeros are found.
pub fn find_zeros_expected(
    t_lo: f64,
    t_hi: f64,
    expected: usize,
    params: &EvalParams,
) -> Result<Vec<f64>> {
    check_interval(t_lo, t_hi)?;
    let mut spacing = gap_model(t_hi.max(2.0 * std::f64::consts::PI * 1.5))? / GRID_DIVISOR;
    let mut found = 0;
    for _ in 0..=MAX_REFINEMENTS {
        let zeros = scan(t_lo, t_hi, spacing, params)?;
        if zeros.len() == expected {
            return Ok(zeros);
        }
        found = zeros.len();
        spacing *= 0.5;
    }
    Err(Error::CountMismatch {
        t_lo,
        t_hi,
        expected,
        found,
    })
}

/// Builds strip `m` from its two boundary crossings.
pub fn assemble_strip(
    bottom: &BoundaryCrossing,
    top: &BoundaryCrossing,
    tracer: &ContourTracer,
) -> Result<Strip> {
    let m = bottom.m;
    let inner = || -> Result<Strip> {
        if top.crossing_t <= bottom.crossing_t {
            return Err(Error::BoundaryOrder {
                m: top.m,
                t: top.crossing_t,
                previous: bottom.crossing_t,
            });
        }
        let gram_count = top.gram_index - bottom.gram_index;
        if gram_count <= 0 {
            return Err(Error::EmptyStrip { m });
        }
        let gram_count = gram_count as usize;
        let heights = find_zeros_expected(bottom.crossing_t, top.crossing_t, gram_count, &tracer.eval)?;

        let primary = tracer.primary_zero(m)?;
        check_in_strip(m, primary.zero, bottom.crossing_t, top.crossing_t)?;
        let (pos, dist) = heights
            .iter()
            .enumerate()
            .map(|(i, &t)| (i, (t - primary.zero.t).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or(Error::EmptyStrip { m })?;
        if dist > 1e-6 {
            return Err(Error::PrimaryUnmatched {
                m,
                t: primary.zero.t,
            });
        }
        let primary_index = pos + 1;
        let n = heights.len();
        Ok(Strip {
            m,
            bottom: bottom.crossing_t,
            top: top.crossing_t,
            width: top.crossing_t - bottom.crossing_t,
            bottom_gram_index: bottom.gram_index,
            gram_count,
            zeros: heights
                .into_iter()
                .map(|t| ZeroRecord { j: 0, t, strip_m: m })
                .collect(),
            primary_index,
            primary_height: primary.zero.t,
            primary_stat: (primary_index as f64 - 0.5) / n as f64,
        })
    };
    inner().map_err(|e| e.in_strip(m))
}

/// Assigns global 1-based zero indices in strip order.
pub fn number_zeros(strips: &mut [Strip]) {
    let mut j = 0;
    for strip in strips {
        for z in &mut strip.zeros {
            j += 1;
            z.j = j;
        }
    }
}

/// Boundary crossings for strips `1..=m_max + 1`, traced in parallel.
pub fn trace_boundaries(tracer: &ContourTracer, count: usize) -> Result<Vec<BoundaryCrossing>> {
    let crossings = (1..=count)
        .into_par_iter()
        .map(|m| tracer.boundary(m).map_err(|e| e.in_strip(m)))
        .collect::<Result<Vec<_>>>()?;
    for w in crossings.windows(2) {
        if w[1].crossing_t <= w[0].crossing_t {
            return Err(Error::BoundaryOrder {
                m: w[1].m,
                t: w[1].crossing_t,
                previous: w[0].crossing_t,
            });
        }
    }
    Ok(crossings)
}

/// Strips `1..=m_max` built from already traced boundaries.
pub fn strips_from_boundaries(boundaries: &[BoundaryCrossing], tracer: &ContourTracer) -> Result<Vec<Strip>> {
    let mut strips = boundaries
        .par_windows(2)
        .map(|w| assemble_strip(&w[0], &w[1], tracer))
        .collect::<Result<Vec<_>>>()?;
    number_zeros(&mut strips);
    Ok(strips)
}

/// Traces boundaries `1..=m_max + 1` and assembles strips `1..=m_max`.
pub fn build_strips(tracer: &ContourTracer, m_max: usize) -> Result<Vec<Strip>> {
    if m_max < 1 {
        return Err(Error::DomainError("m_max must be >= 1".into()));
    }
    let boundaries = trace_boundaries(tracer, m_max + 1)?;
    strips_from_boundaries(&boundaries, tracer)
}
