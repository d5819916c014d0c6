//! Predictor–corrector tracing of the level curves `Im ζ(s) = 0`.
//!
//! Far to the right `ζ(s) ≈ 1 + 2^{-s}`, so the curves leave `σ = +∞` at
//! heights `kπ / ln 2`. Even `k` gives the strip boundaries, which run left
//! across the critical line through a special Gram point; odd `k` gives the
//! primary contours, which end at the primary zero of their strip.
//!
//! Along a branch of `Im ζ = 0` the tangent is parallel to `conj(ζ')` and
//! `dζ/ds = |ζ'|` there, so `Re ζ` is strictly monotone between critical
//! points of `ζ`. The tracer fixes an orientation sign once at the start
//! (tangent `= orientation · conj(ζ')/|ζ'|`) and never flips it; boundaries
//! walk up in `Re ζ`, primary contours walk down towards `Re ζ = 0`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gram;
use crate::zeta::{zeta_with_derivative, ComplexPoint, EvalParams};

const LN_2: f64 = std::f64::consts::LN_2;

/// Steps shorter than this abort the trace.
pub const MIN_STEP: f64 = 1e-6;

/// Largest turning angle accepted between consecutive tangents.
const MAX_TURN_COS: f64 = 0.94;

const MAX_CORRECTIONS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceParams {
    pub sigma_start: f64,
    pub sigma_min: f64,
    /// Nominal arc-length step; also the cap for step growth.
    pub step: f64,
    pub newton_tol: f64,
    pub zero_radius: f64,
    pub max_steps: usize,
}

impl Default for TraceParams {
    fn default() -> Self {
        Self {
            sigma_start: 5.0,
            sigma_min: 0.0,
            step: 0.02,
            newton_tol: 1e-10,
            zero_radius: 1e-4,
            max_steps: 1_000_000,
        }
    }
}

impl TraceParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_start >= 4.0) {
            return Err(Error::InvalidParams(format!(
                "sigma_start must be >= 4, got {}",
                self.sigma_start
            )));
        }
        if !(self.step > 0.0 && self.step <= 0.1) {
            return Err(Error::InvalidParams(format!(
                "step must lie in (0, 0.1], got {}",
                self.step
            )));
        }
        if !(self.zero_radius > 0.0 && self.zero_radius <= 1e-2) {
            return Err(Error::InvalidParams(format!(
                "zero_radius must lie in (0, 1e-2], got {}",
                self.zero_radius
            )));
        }
        if !(self.newton_tol > 0.0) || self.max_steps == 0 || !(self.sigma_min < self.sigma_start) {
            return Err(Error::InvalidParams(
                "newton_tol, max_steps and sigma_min are inconsistent".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Leftward,
    Rightward,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Leftward => -1.0,
            Direction::Rightward => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Terminal {
    ReachedSigmaMin,
    /// Rightward traces stop half a unit inside the evaluator window.
    ReachedSigmaMax,
    TerminatedAtZero(ComplexPoint),
    Aborted(Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContourPath {
    /// Launch index when the path started from [`ContourTracer::launch_point`].
    pub k: Option<i64>,
    pub points: Vec<ComplexPoint>,
    /// `ζ` at each recorded point.
    pub values: Vec<Complex64>,
    pub terminal: Terminal,
    /// First crossing of `σ = 1/2`.
    pub crossing_t: Option<f64>,
    /// Every crossing of `σ = 1/2`, in path order.
    pub crossings: Vec<f64>,
    pub min_abs_zeta: f64,
    pub rejected_steps: usize,
}

impl ContourPath {
    /// Turns an aborted path into its error.
    pub fn completed(self) -> Result<Self> {
        match self.terminal {
            Terminal::Aborted(e) => Err(e),
            _ => Ok(self),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSample {
    pub point: ComplexPoint,
    /// Continuously unwrapped `arg ζ`.
    pub theta: f64,
}

/// A strip boundary where it meets the critical line.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCrossing {
    pub m: usize,
    pub k: i64,
    pub launch_t: f64,
    pub crossing_t: f64,
    /// Gram index of the special Gram point.
    pub gram_index: i64,
    pub crossing_count: usize,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimaryZero {
    pub m: usize,
    pub k: i64,
    pub zero: ComplexPoint,
    pub steps: usize,
}

/// Evaluator + tracing controls.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ContourTracer {
    pub eval: EvalParams,
    pub params: TraceParams,
}

/// Gradient of `Im ζ` as a complex number `(∂σ, ∂t) = (Im ζ', Re ζ')`.
#[inline]
fn im_gradient(dz: Complex64) -> Complex64 {
    Complex64::new(dz.im, dz.re)
}

impl ContourTracer {
    pub fn new(eval: EvalParams, params: TraceParams) -> Result<Self> {
        eval.validate()?;
        params.validate()?;
        Ok(Self { eval, params })
    }

    fn eval(&self, s: Complex64) -> Result<(Complex64, Complex64)> {
        let v = zeta_with_derivative(s.into(), &self.eval)?;
        Ok((v.value, v.derivative.unwrap_or_default()))
    }

    fn on_contour(&self, z: Complex64) -> bool {
        z.im.abs() < self.params.newton_tol * z.norm().max(1.0)
    }

    /// Where contour `k` enters from the right: the root of
    /// `Im ζ(σ_start + it)` nearest `kπ / ln 2`.
    pub fn launch_point(&self, k: i64) -> Result<ComplexPoint> {
        if k < 2 {
            return Err(Error::DomainError(format!("launch index must be >= 2, got {k}")));
        }
        let sigma = self.params.sigma_start;
        let seed = k as f64 * PI / LN_2;
        let mut t = seed;
        let mut converged = false;
        for _ in 0..50 {
            let (z, dz) = self.eval(Complex64::new(sigma, t))?;
            // ∂t Im ζ = Re ζ'
            let dt = z.im / dz.re;
            t -= dt;
            if dt.abs() < 1e-14 * t.abs().max(1.0) || z.im == 0.0 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::ConvergenceFailure {
                what: format!("launch point k = {k}"),
                iterations: 50,
            });
        }
        if (t - seed).abs() > 0.5 * PI / LN_2 {
            return Err(Error::SeedDrift { k, t, seed });
        }
        let (z, _) = self.eval(Complex64::new(sigma, t))?;
        if !(z.re > 0.0) || !self.on_contour(z) {
            return Err(Error::SeedDrift { k, t, seed });
        }
        Ok(ComplexPoint::new(sigma, t))
    }

    /// Complex Newton on `ζ(s) = 0` from `start`.
    fn newton_zero(&self, start: Complex64, max_move: f64) -> Result<Option<Complex64>> {
        let mut s = start;
        for _ in 0..40 {
            let (z, dz) = self.eval(s)?;
            if dz.norm() == 0.0 {
                return Ok(None);
            }
            let delta = z / dz;
            s -= delta;
            if (s - start).norm() > max_move {
                return Ok(None);
            }
            if delta.norm() <= 1e-14 * s.norm().max(1.0) || z.norm() == 0.0 {
                return Ok(Some(s));
            }
        }
        Ok(None)
    }

    /// Refines a crossing of `σ = 1/2` by Newton in `t` on `Im ζ(1/2 + it)`.
    fn refine_crossing(&self, a: Complex64, b: Complex64) -> Result<f64> {
        let frac = (0.5 - a.re) / (b.re - a.re);
        let seed = a.im + frac * (b.im - a.im);
        let reach = (b - a).norm().max(1e-9) * 2.0;
        let mut t = seed;
        for _ in 0..40 {
            let (z, dz) = self.eval(Complex64::new(0.5, t))?;
            let dt = z.im / dz.re;
            t -= dt;
            if !t.is_finite() || (t - seed).abs() > reach {
                break;
            }
            if dt.abs() <= 1e-14 * t.abs() || z.im == 0.0 {
                return Ok(t);
            }
        }
        Err(Error::ConvergenceFailure {
            what: format!("critical-line crossing near t = {seed}"),
            iterations: 40,
        })
    }

    /// Follows the `Im ζ = 0` branch through `start` in `direction`.
    ///
    /// Evaluator failures are returned as errors; numerical trouble on the
    /// path itself (step collapse, step budget) ends the path with
    /// [`Terminal::Aborted`].
    pub fn trace(&self, start: ComplexPoint, direction: Direction) -> Result<ContourPath> {
        self.trace_inner(start, direction, None)
    }

    fn trace_inner(&self, start: ComplexPoint, direction: Direction, k: Option<i64>) -> Result<ContourPath> {
        let p = &self.params;
        let mut s: Complex64 = start.into();
        let (mut z, mut dz) = self.eval(s)?;
        if !self.on_contour(z) {
            return Err(Error::DomainError(format!(
                "trace start {start} is not on Im ζ = 0 (Im ζ = {:e})",
                z.im
            )));
        }
        if dz.norm() == 0.0 {
            return Err(Error::DomainError(format!("ζ' vanishes at trace start {start}")));
        }
        let dir = direction.sign();
        let orientation = if dz.re * dir >= 0.0 { 1.0 } else { -1.0 };
        let sigma_stop = self.eval.window.sigma_hi - 0.5;

        let mut path = ContourPath {
            k,
            points: vec![start],
            values: vec![z],
            terminal: Terminal::Aborted(Error::MaxSteps(p.max_steps)),
            crossing_t: None,
            crossings: Vec::new(),
            min_abs_zeta: z.norm(),
            rejected_steps: 0,
        };

        let mut h = p.step;
        let mut easy = 0usize;
        let mut accepted = 0usize;
        while accepted < p.max_steps {
            if h < MIN_STEP {
                path.terminal = Terminal::Aborted(Error::StepCollapse {
                    at: s.into(),
                    min_step: MIN_STEP,
                });
                return Ok(path);
            }
            let tangent = orientation * dz.conj() / dz.norm();
            let mut q = s + h * tangent;
            let mut corrections = 0usize;
            let (mut zq, mut dzq) = self.eval(q)?;
            while !self.on_contour(zq) && corrections < MAX_CORRECTIONS + 1 {
                let grad = im_gradient(dzq);
                let g2 = grad.norm_sqr();
                if g2 == 0.0 {
                    break;
                }
                q -= zq.im * grad / g2;
                corrections += 1;
                (zq, dzq) = self.eval(q)?;
            }

            let mut ok = self.on_contour(zq) && corrections <= MAX_CORRECTIONS && dzq.norm() > 0.0;
            if ok {
                let new_tangent = orientation * dzq.conj() / dzq.norm();
                let turn = tangent.re * new_tangent.re + tangent.im * new_tangent.im;
                ok = (q - s).norm() < 2.0 * h && turn > MAX_TURN_COS;
            }
            if !ok {
                h *= 0.5;
                easy = 0;
                path.rejected_steps += 1;
                continue;
            }

            // Re ζ changed sign on Im ζ = 0: the step jumped over a zero.
            if zq.re.signum() != z.re.signum() {
                match self.newton_zero(s, 2.0 * h)? {
                    Some(root) => {
                        path.terminal = Terminal::TerminatedAtZero(root.into());
                        return Ok(path);
                    }
                    None => {
                        h *= 0.5;
                        path.rejected_steps += 1;
                        continue;
                    }
                }
            }

            if (s.re - 0.5) * (q.re - 0.5) < 0.0 || q.re == 0.5 {
                let t = self.refine_crossing(s, q)?;
                if path.crossing_t.is_none() {
                    path.crossing_t = Some(t);
                }
                path.crossings.push(t);
            }

            s = q;
            z = zq;
            dz = dzq;
            accepted += 1;
            path.points.push(s.into());
            path.values.push(z);
            path.min_abs_zeta = path.min_abs_zeta.min(z.norm());

            // Heading down in |Re ζ| towards a zero that is within reach.
            let approaching = orientation * z.re < 0.0;
            if approaching && (z.norm() < p.zero_radius || z.norm() < h * dz.norm()) {
                if let Some(root) = self.newton_zero(s, 2.0 * h.max(z.norm() / dz.norm()))? {
                    path.terminal = Terminal::TerminatedAtZero(root.into());
                    return Ok(path);
                }
            }

            if direction == Direction::Leftward && s.re <= p.sigma_min {
                path.terminal = Terminal::ReachedSigmaMin;
                return Ok(path);
            }
            if direction == Direction::Rightward && s.re >= sigma_stop {
                path.terminal = Terminal::ReachedSigmaMax;
                return Ok(path);
            }

            if approaching && z.norm() < 10.0 * p.zero_radius {
                h = (0.5 * h).max(2.0 * MIN_STEP);
                easy = 0;
            } else if corrections <= 1 {
                easy += 1;
                if easy >= 5 && h < p.step {
                    h = (2.0 * h).min(p.step);
                    easy = 0;
                }
            } else {
                easy = 0;
            }
        }
        path.terminal = Terminal::Aborted(Error::MaxSteps(p.max_steps));
        Ok(path)
    }

    /// Traces boundary contour `k = 2m` from the right across the critical
    /// line and validates it as a strip boundary.
    pub fn boundary(&self, m: usize) -> Result<BoundaryCrossing> {
        if m < 1 {
            return Err(Error::DomainError("strip number must be >= 1".into()));
        }
        let k = 2 * m as i64;
        let start = self.launch_point(k)?;
        let path = self.trace_inner(start, Direction::Leftward, Some(k))?.completed()?;
        if let Terminal::TerminatedAtZero(at) = path.terminal {
            return Err(Error::NotSpecial {
                k,
                reason: format!("contour ends at a zero near {at}"),
            });
        }
        let crossing_t = path.crossing_t.ok_or_else(|| Error::NotSpecial {
            k,
            reason: "contour never crosses the critical line".into(),
        })?;

        // Closest approach to a zero between the launch and the crossing.
        let mut min_abs = f64::INFINITY;
        for (pt, v) in path.points.iter().zip(&path.values) {
            min_abs = min_abs.min(v.norm());
            if pt.sigma < 0.5 {
                break;
            }
        }
        if min_abs <= self.params.zero_radius {
            return Err(Error::NotSpecial {
                k,
                reason: format!("|ζ| drops to {min_abs:e} before the critical line"),
            });
        }

        let (gram_index, offset) = gram::nearest_index(crossing_t)?;
        if offset >= 1e-6 {
            return Err(Error::NotSpecial {
                k,
                reason: format!("crossing t = {crossing_t} is not a Gram point (θ/π off by {offset:e})"),
            });
        }
        let (z, _) = self.eval(Complex64::new(0.5, crossing_t))?;
        if !(z.re > 0.0) {
            return Err(Error::NotSpecial {
                k,
                reason: format!("Re ζ = {} at the crossing", z.re),
            });
        }
        Ok(BoundaryCrossing {
            m,
            k,
            launch_t: start.t,
            crossing_t,
            gram_index,
            crossing_count: path.crossings.len(),
            steps: path.points.len() - 1,
        })
    }

    /// Height of the `m`-th special Gram point (bottom of strip `m`).
    pub fn special_gram_point(&self, m: usize) -> Result<f64> {
        Ok(self.boundary(m)?.crossing_t)
    }

    /// Traces primary contour `k = 2m + 1` to its zero, without checking
    /// that the zero lies inside strip `m`.
    pub fn primary_zero(&self, m: usize) -> Result<PrimaryZero> {
        if m < 1 {
            return Err(Error::DomainError("strip number must be >= 1".into()));
        }
        let k = 2 * m as i64 + 1;
        let start = self.launch_point(k)?;
        let path = self.trace_inner(start, Direction::Leftward, Some(k))?.completed()?;
        let zero = match path.terminal {
            Terminal::TerminatedAtZero(at) => at,
            _ => return Err(Error::NoTerminalZero { k }),
        };
        if (zero.sigma - 0.5).abs() >= 1e-6 {
            return Err(Error::OffCriticalLine { at: zero });
        }
        Ok(PrimaryZero {
            m,
            k,
            zero,
            steps: path.points.len() - 1,
        })
    }

    /// Primary zero of strip `m`, checked to lie between the strip's two
    /// boundaries on the critical line.
    pub fn primary_zero_of_strip(&self, m: usize) -> Result<ComplexPoint> {
        let bottom = self.special_gram_point(m)?;
        let top = self.special_gram_point(m + 1)?;
        let primary = self.primary_zero(m)?;
        check_in_strip(m, primary.zero, bottom, top)?;
        Ok(primary.zero)
    }
}

pub(crate) fn check_in_strip(m: usize, zero: ComplexPoint, bottom: f64, top: f64) -> Result<()> {
    if !(zero.t > bottom && zero.t < top) {
        return Err(Error::EscapedStrip {
            m,
            t: zero.t,
            bottom,
            top,
        });
    }
    Ok(())
}

/// Continuous `arg ζ` along a traced path, anchored at the launch end.
pub fn unwrap_phase(path: &ContourPath, zero_radius: f64) -> Result<Vec<PhaseSample>> {
    if path.is_empty() {
        return Err(Error::DomainError("cannot unwrap an empty path".into()));
    }
    if let Some(i) = path.values.iter().position(|v| v.norm() < zero_radius) {
        return Err(Error::DomainError(format!(
            "path point {i} is within the zero radius"
        )));
    }
    let mut out = Vec::with_capacity(path.len());
    let mut theta = path.values[0].arg();
    let mut prev_arg = theta;
    out.push(PhaseSample {
        point: path.points[0],
        theta,
    });
    for (i, (pt, v)) in path.points.iter().zip(&path.values).enumerate().skip(1) {
        let arg = v.arg();
        let raw = arg - prev_arg;
        let jump = raw - 2.0 * PI * (raw / (2.0 * PI)).round();
        // Steps are short enough that the true change is far below π/2.
        if jump.abs() >= 0.5 * PI {
            return Err(Error::PhaseJump { index: i, jump });
        }
        theta += jump;
        prev_arg = arg;
        out.push(PhaseSample { point: *pt, theta });
    }
    Ok(out)
}
