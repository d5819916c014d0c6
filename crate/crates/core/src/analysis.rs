//! Regressions, deviation series, arch predictions and primary-zero
//! statistics over a list of strips.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::gram::gap_model;
use crate::strips::{zeros_per_width, Strip};
use crate::STRIP_PERIOD;

/// Strip count below which fits are still computed but should be read as
/// small-sample results.
pub const RECOMMENDED_MIN_STRIPS: usize = 100;

/// Ordinary least squares `y = intercept + slope·x` with homoskedastic
/// standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub intercept_se: f64,
    pub n: usize,
}

impl LinearFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::DomainError("x and y differ in length".into()));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::DomainError(format!("a fit needs at least 3 points, got {n}")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::DomainError("x has no spread".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    let s2 = ssr / (nf - 2.0);
    Ok(LinearFit {
        slope,
        intercept,
        slope_se: (s2 / sxx).sqrt(),
        intercept_se: (s2 * (1.0 / nf + mx * mx / sxx)).sqrt(),
        n,
    })
}

fn strip_numbers(strips: &[Strip]) -> Vec<f64> {
    strips.iter().map(|s| s.m as f64).collect()
}

/// Bottom height of each strip against its strip number.
pub fn fit_bottoms(strips: &[Strip]) -> Result<LinearFit> {
    let y: Vec<f64> = strips.iter().map(|s| s.bottom).collect();
    linear_fit(&strip_numbers(strips), &y)
}

/// Top height of each strip against its strip number.
pub fn fit_tops(strips: &[Strip]) -> Result<LinearFit> {
    let y: Vec<f64> = strips.iter().map(|s| s.top).collect();
    linear_fit(&strip_numbers(strips), &y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviationKind {
    BottomDev,
    DensityDev,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationSeries {
    pub kind: DeviationKind,
    pub records: Vec<(usize, f64)>,
}

impl DeviationSeries {
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.1)
    }

    pub fn max_abs(&self) -> f64 {
        self.values().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Mean `|value|` over records with `lo <= m <= hi`.
    pub fn mean_abs_between(&self, lo: usize, hi: usize) -> Option<f64> {
        let sel: Vec<f64> = self
            .records
            .iter()
            .filter(|r| r.0 >= lo && r.0 <= hi)
            .map(|r| r.1.abs())
            .collect();
        (!sel.is_empty()).then(|| sel.iter().sum::<f64>() / sel.len() as f64)
    }

    /// Population variance of consecutive blocks of `width` records; a short
    /// trailing block is dropped.
    pub fn windowed_variance(&self, width: usize) -> Vec<f64> {
        self.records
            .chunks_exact(width.max(1))
            .map(|c| variance(c.iter().map(|r| r.1)))
            .collect()
    }
}

/// `bottom(m) − 2mπ / ln 2`.
pub fn bottom_deviation_series(strips: &[Strip]) -> Result<DeviationSeries> {
    if strips.is_empty() {
        return Err(Error::DomainError("no strips".into()));
    }
    Ok(DeviationSeries {
        kind: DeviationKind::BottomDev,
        records: strips
            .iter()
            .map(|s| (s.m, s.bottom - s.m as f64 * STRIP_PERIOD))
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityFit {
    /// Zeros per unit height against `ln m`.
    pub vs_ln_m: LinearFit,
    /// Zeros per unit height against `m`, for comparison.
    pub vs_m: LinearFit,
    /// Residuals of the `ln m` fit.
    pub residuals: DeviationSeries,
}

pub fn fit_density(strips: &[Strip]) -> Result<DensityFit> {
    let density: Vec<f64> = strips.iter().map(zeros_per_width).collect();
    let m = strip_numbers(strips);
    let ln_m: Vec<f64> = m.iter().map(|v| v.ln()).collect();
    let vs_ln_m = linear_fit(&ln_m, &density)?;
    let vs_m = linear_fit(&m, &density)?;
    let residuals = DeviationSeries {
        kind: DeviationKind::DensityDev,
        records: strips
            .iter()
            .zip(&ln_m)
            .zip(&density)
            .map(|((s, &x), &d)| (s.m, d - vs_ln_m.predict(x)))
            .collect(),
    };
    Ok(DensityFit {
        vs_ln_m,
        vs_m,
        residuals,
    })
}

/// Predicted arch centre for the exponent `p/q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArchPrediction {
    pub p: u32,
    pub q: u32,
    /// `2^{p/q} ln 2`
    pub m_center: f64,
    /// `2^{1+p/q} π`
    pub t_center: f64,
}

impl ArchPrediction {
    pub fn new(p: u32, q: u32) -> Self {
        let e = p as f64 / q as f64;
        Self {
            p,
            q,
            m_center: e.exp2() * LN_2,
            t_center: (1.0 + e).exp2() * PI,
        }
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// All coprime `(p, q)` with `q <= q_max`, exponent `p/q <= p_max` and
/// `1 <= m_center <= m_limit`, sorted by `m_center` (then by `q`).
pub fn arch_centers(p_max: u32, q_max: u32, m_limit: f64) -> Result<Vec<ArchPrediction>> {
    if p_max < 4 || q_max < 1 {
        return Err(Error::DomainError(format!(
            "arch_centers needs p_max >= 4 and q_max >= 1, got {p_max}, {q_max}"
        )));
    }
    let mut out = Vec::new();
    for q in 1..=q_max {
        for p in 1..=p_max * q {
            if gcd(p, q) != 1 {
                continue;
            }
            let a = ArchPrediction::new(p, q);
            if a.m_center >= 1.0 && a.m_center <= m_limit {
                out.push(a);
            }
        }
    }
    out.sort_by(|a, b| a.m_center.total_cmp(&b.m_center).then(a.q.cmp(&b.q)));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    pub p: u32,
    /// Height where `(2π / ln 2) / gap_model(t) = p`.
    pub t: f64,
    /// False when `t` lies below the first strip or above the height limit.
    pub in_range: bool,
}

/// Height at which `p` Gram gaps fit in one mean strip height.
pub fn resonance_check(p: u32) -> Result<Resonance> {
    if p < 1 {
        return Err(Error::DomainError("p must be >= 1".into()));
    }
    let t = 2.0 * PI * (p as f64).exp2();
    let first = crate::gram::gram_point(crate::gram::FIRST_INDEX)?.height;
    Ok(Resonance {
        p,
        t,
        in_range: t >= first && t <= crate::strips::T_LIMIT,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimaryStats {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    /// Variance over each quarter of the strips, in index order.
    pub quartile_variances: [f64; 4],
}

fn variance(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = values.clone().count();
    if n == 0 {
        return f64::NAN;
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64
}

pub fn primary_stats(strips: &[Strip]) -> Result<PrimaryStats> {
    let n = strips.len();
    if n < 4 {
        return Err(Error::DomainError(format!(
            "primary statistics need at least 4 strips, got {n}"
        )));
    }
    let stats = || strips.iter().map(|s| s.primary_stat);
    let mean = stats().sum::<f64>() / n as f64;
    let mut quartile_variances = [0.0; 4];
    for (i, q) in quartile_variances.iter_mut().enumerate() {
        let chunk = &strips[i * n / 4..(i + 1) * n / 4];
        *q = variance(chunk.iter().map(|s| s.primary_stat));
    }
    Ok(PrimaryStats {
        n,
        mean,
        variance: variance(stats()),
        quartile_variances,
    })
}

/// Deviation branches near one arch centre.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchSpacing {
    pub center: ArchPrediction,
    /// `(zero surplus over the local modal count, mean deviation, strips)`
    pub branches: Vec<(i64, f64, usize)>,
    /// Mean vertical distance between adjacent branches.
    pub mean_gap: Option<f64>,
}

/// Groups the deviations of strips within `half_width` of an arch centre
/// by their zero surplus and measures the spacing between the groups.
pub fn branch_spacing(
    strips: &[Strip],
    deviations: &DeviationSeries,
    center: ArchPrediction,
    half_width: f64,
) -> BranchSpacing {
    let dev: BTreeMap<usize, f64> = deviations.records.iter().copied().collect();
    let local: Vec<&Strip> = strips
        .iter()
        .filter(|s| (s.m as f64 - center.m_center).abs() <= half_width && dev.contains_key(&s.m))
        .collect();
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for s in &local {
        *counts.entry(s.n_zeros()).or_default() += 1;
    }
    let modal = counts
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(&z, _)| z);
    let mut groups: BTreeMap<i64, (f64, usize)> = BTreeMap::new();
    if let Some(modal) = modal {
        for s in &local {
            let label = s.n_zeros() as i64 - modal as i64;
            let e = groups.entry(label).or_default();
            e.0 += dev[&s.m];
            e.1 += 1;
        }
    }
    let branches: Vec<(i64, f64, usize)> = groups
        .into_iter()
        .map(|(label, (sum, n))| (label, sum / n as f64, n))
        .collect();
    let gaps: Vec<f64> = branches
        .windows(2)
        .filter(|w| w[1].0 == w[0].0 + 1)
        .map(|w| (w[1].1 - w[0].1).abs())
        .collect();
    let mean_gap = (!gaps.is_empty()).then(|| gaps.iter().sum::<f64>() / gaps.len() as f64);
    BranchSpacing {
        center,
        branches,
        mean_gap,
    }
}

/// Ratio of branch spacing near the `q = 2` centres to that near the `q = 1`
/// centres, averaged over the centres that produced a measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedArchReport {
    pub q1: Vec<BranchSpacing>,
    pub q2: Vec<BranchSpacing>,
    pub mean_gap_q1: Option<f64>,
    pub mean_gap_q2: Option<f64>,
    pub ratio: Option<f64>,
}

pub fn nested_arch_report(strips: &[Strip], deviations: &DeviationSeries, half_width_frac: f64) -> Result<NestedArchReport> {
    let m_limit = strips.last().map_or(0.0, |s| s.m as f64);
    let centers = arch_centers(10, 2, m_limit)?;
    let measure = |q: u32| -> Vec<BranchSpacing> {
        centers
            .iter()
            .filter(|c| c.q == q && c.m_center >= 4.0)
            .map(|c| branch_spacing(strips, deviations, *c, (half_width_frac * c.m_center).max(2.0)))
            .collect()
    };
    let q1 = measure(1);
    let q2 = measure(2);
    let mean = |v: &[BranchSpacing]| {
        let gaps: Vec<f64> = v.iter().filter_map(|b| b.mean_gap).collect();
        (!gaps.is_empty()).then(|| gaps.iter().sum::<f64>() / gaps.len() as f64)
    };
    let mean_gap_q1 = mean(&q1);
    let mean_gap_q2 = mean(&q2);
    let ratio = match (mean_gap_q1, mean_gap_q2) {
        (Some(a), Some(b)) if a > 0.0 => Some(b / a),
        _ => None,
    };
    Ok(NestedArchReport {
        q1,
        q2,
        mean_gap_q1,
        mean_gap_q2,
        ratio,
    })
}

/// The density predicted by the gap model at the mean height of strip `m`.
pub fn model_density(m: f64) -> Result<f64> {
    Ok(1.0 / gap_model(m * STRIP_PERIOD)?)
}
