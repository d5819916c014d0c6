//! Euler–Maclaurin evaluation of `ζ(s)` and `ζ'(s)`, the Riemann–Siegel theta
//! function and Hardy's `Z(t)`.
//!
//! For a cutoff `N` and `K` Bernoulli corrections,
//!
//! ```text
//! ζ(s) = Σ_{n<N} n^{-s} + N^{1-s}/(s-1) + N^{-s}/2
//!        + Σ_{k=1..K} B_{2k}/(2k)! · s(s+1)…(s+2k-2) · N^{1-s-2k} + R
//! ```
//!
//! with `|R| ≤ |T_{K+1}| · |s+2K+1| / (σ+2K+1)`. That bound is what
//! [`ZetaValue::est_error`] reports; the cutoff is raised above the nominal
//! `em_terms_factor · |t|/2π` whenever that is needed to meet the target.

use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A point `s = σ + it`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexPoint {
    pub sigma: f64,
    pub t: f64,
}

impl ComplexPoint {
    pub const fn new(sigma: f64, t: f64) -> Self {
        Self { sigma, t }
    }

    pub fn on_critical_line(t: f64) -> Self {
        Self { sigma: 0.5, t }
    }

    pub fn conj(self) -> Self {
        Self {
            sigma: self.sigma,
            t: -self.t,
        }
    }

    pub fn is_finite(self) -> bool {
        self.sigma.is_finite() && self.t.is_finite()
    }

    pub fn distance(self, other: Self) -> f64 {
        (self.sigma - other.sigma).hypot(self.t - other.t)
    }
}

impl From<ComplexPoint> for Complex64 {
    fn from(p: ComplexPoint) -> Self {
        Complex64::new(p.sigma, p.t)
    }
}

impl From<Complex64> for ComplexPoint {
    fn from(z: Complex64) -> Self {
        Self {
            sigma: z.re,
            t: z.im,
        }
    }
}

impl fmt::Display for ComplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.t < 0.0 {
            write!(f, "{} - {}i", self.sigma, -self.t)
        } else {
            write!(f, "{} + {}i", self.sigma, self.t)
        }
    }
}

/// Rectangle of the s-plane the evaluator accepts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    pub t_abs_max: f64,
}

impl Default for Window {
    fn default() -> Self {
        Self {
            sigma_lo: -2.0,
            sigma_hi: 8.0,
            t_abs_max: 1.1e4,
        }
    }
}

impl Window {
    pub fn contains(&self, s: ComplexPoint) -> bool {
        s.is_finite()
            && s.sigma >= self.sigma_lo
            && s.sigma <= self.sigma_hi
            && s.t.abs() <= self.t_abs_max
    }
}

/// Controls for the Euler–Maclaurin evaluator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalParams {
    /// Nominal cutoff is `ceil(em_terms_factor · |t| / 2π) + 10`.
    pub em_terms_factor: f64,
    /// Number of Bernoulli correction terms `K`.
    pub bernoulli_order: usize,
    pub target_abs_error: f64,
    pub window: Window,
}

impl Default for EvalParams {
    fn default() -> Self {
        Self {
            em_terms_factor: 1.3,
            bernoulli_order: 12,
            target_abs_error: 1e-11,
            window: Window::default(),
        }
    }
}

/// Loosest target accepted by [`EvalParams::reduced`].
pub const REDUCED_TARGET_MAX: f64 = 1e-2;

impl EvalParams {
    pub fn new(em_terms_factor: f64, bernoulli_order: usize, target_abs_error: f64) -> Result<Self> {
        let params = Self {
            em_terms_factor,
            bernoulli_order,
            target_abs_error,
            window: Window::default(),
        };
        params.validate()?;
        Ok(params)
    }

    /// Default parameters with a different error target.
    pub fn with_target(target_abs_error: f64) -> Result<Self> {
        let d = Self::default();
        Self::new(d.em_terms_factor, d.bernoulli_order, target_abs_error)
    }

    /// Low-precision parameters for diagnostics; targets up to
    /// [`REDUCED_TARGET_MAX`] are allowed.
    pub fn reduced(target_abs_error: f64) -> Result<Self> {
        if !(target_abs_error > 0.0 && target_abs_error <= REDUCED_TARGET_MAX) {
            return Err(Error::InvalidParams(format!(
                "reduced target_abs_error must lie in (0, {REDUCED_TARGET_MAX:e}], got {target_abs_error:e}"
            )));
        }
        Ok(Self {
            target_abs_error,
            ..Self::default()
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.em_terms_factor >= 1.2) {
            return Err(Error::InvalidParams(format!(
                "em_terms_factor must be >= 1.2, got {}",
                self.em_terms_factor
            )));
        }
        if !(4..=20).contains(&self.bernoulli_order) {
            return Err(Error::InvalidParams(format!(
                "bernoulli_order must lie in [4, 20], got {}",
                self.bernoulli_order
            )));
        }
        if !(self.target_abs_error > 0.0 && self.target_abs_error <= 1e-6) {
            return Err(Error::InvalidParams(format!(
                "target_abs_error must lie in (0, 1e-6], got {:e}",
                self.target_abs_error
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaValue {
    pub value: Complex64,
    pub derivative: Option<Complex64>,
    /// Bound on the truncated Bernoulli tail.
    pub est_error: f64,
}

/// Hard ceiling on the Dirichlet cutoff.
const MAX_TERMS: f64 = 2.0e6;

const LN_TABLE_LEN: usize = 1 << 16;

fn ln_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| (0..LN_TABLE_LEN).map(|n| (n.max(1) as f64).ln()).collect())
}

#[inline]
fn ln_n(n: usize, table: &[f64]) -> f64 {
    match table.get(n) {
        Some(&v) => v,
        None => (n as f64).ln(),
    }
}

/// `B_{2k}` for `k = 1..=21` as (numerator, denominator).
const BERNOULLI: [(f64, f64); 21] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
    (8615841276005.0, 14322.0),
    (-7709321041217.0, 510.0),
    (2577687858367.0, 6.0),
    (-26315271553053477373.0, 1919190.0),
    (2929993913841559.0, 6.0),
    (-261082718496449122051.0, 13530.0),
    (1520097643918070802691.0, 1806.0),
];

/// `B_{2k} / (2k)!` for `k = 1..=21`, stored at index `k - 1`.
pub fn bernoulli_factorial_coeffs() -> &'static [f64; 21] {
    static COEFFS: OnceLock<[f64; 21]> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut out = [0.0; 21];
        let mut fact = 1.0_f64;
        for (k, &(num, den)) in BERNOULLI.iter().enumerate() {
            let two_k = 2 * (k + 1);
            fact *= (two_k - 1) as f64 * two_k as f64;
            out[k] = num / den / fact;
        }
        out
    })
}

/// Chooses the Dirichlet cutoff and returns it with the tail bound.
fn cutoff(s: Complex64, params: &EvalParams) -> Result<(usize, f64)> {
    let k = params.bernoulli_order;
    let coeffs = bernoulli_factorial_coeffs();
    let decay = s.re + 2.0 * k as f64 + 1.0;
    let mut ln_a = coeffs[k].abs().ln();
    for j in 0..=2 * k {
        ln_a += (s + j as f64).norm().ln();
    }
    ln_a += (s + (2 * k + 1) as f64).norm().ln() - decay.ln();

    let nominal = (params.em_terms_factor * s.im.abs() / (2.0 * PI)).ceil() + 10.0;
    let needed = ((ln_a - params.target_abs_error.ln()) / decay).exp().ceil();
    let n = nominal.max(needed);
    if !(n <= MAX_TERMS) {
        return Err(Error::PrecisionLoss {
            point: s.into(),
            target: params.target_abs_error,
            needed: n,
        });
    }
    let bound = (ln_a - decay * n.ln()).exp();
    Ok((n as usize, bound))
}

fn check_domain(s: ComplexPoint, params: &EvalParams) -> Result<()> {
    let w = &params.window;
    if !w.contains(s) {
        return Err(Error::WindowExceeded {
            point: s,
            sigma_lo: w.sigma_lo,
            sigma_hi: w.sigma_hi,
            t_abs_max: w.t_abs_max,
        });
    }
    if (s.sigma - 1.0).hypot(s.t) < 1e-6 {
        return Err(Error::PoleProximity(s));
    }
    Ok(())
}

fn euler_maclaurin(s: ComplexPoint, params: &EvalParams, with_derivative: bool) -> Result<ZetaValue> {
    check_domain(s, params)?;
    let z: Complex64 = s.into();
    let (n_cut, bound) = cutoff(z, params)?;
    let table = ln_table();

    let (mut re, mut im) = (0.0_f64, 0.0_f64);
    let (mut dre, mut dim) = (0.0_f64, 0.0_f64);
    // n = 1 contributes exactly 1 and nothing to the derivative.
    re += 1.0;
    if with_derivative {
        for n in 2..n_cut {
            let l = ln_n(n, table);
            let mag = (-s.sigma * l).exp();
            let (sin, cos) = (s.t * l).sin_cos();
            let tr = mag * cos;
            let ti = -mag * sin;
            re += tr;
            im += ti;
            dre -= l * tr;
            dim -= l * ti;
        }
    } else {
        for n in 2..n_cut {
            let l = ln_n(n, table);
            let mag = (-s.sigma * l).exp();
            let (sin, cos) = (s.t * l).sin_cos();
            re += mag * cos;
            im -= mag * sin;
        }
    }
    let mut value = Complex64::new(re, im);
    let mut deriv = Complex64::new(dre, dim);

    let big_n = n_cut as f64;
    let ln_big_n = ln_n(n_cut, table);
    // N^{-s}
    let n_pow = (-z * ln_big_n).exp();
    let sm1 = z - 1.0;
    let head = n_pow * big_n / sm1;
    value += head + 0.5 * n_pow;
    if with_derivative {
        deriv += -ln_big_n * head - head / sm1 - 0.5 * ln_big_n * n_pow;
    }

    // T_k = c_k · P_k(s) · N^{1-s-2k},  P_k = s(s+1)…(s+2k-2).
    let coeffs = bernoulli_factorial_coeffs();
    let inv_n2 = 1.0 / (big_n * big_n);
    let mut poly = z;
    let mut dpoly = Complex64::new(1.0, 0.0);
    let mut scale = n_pow / big_n;
    for k in 1..=params.bernoulli_order {
        let term = coeffs[k - 1] * scale;
        value += term * poly;
        if with_derivative {
            deriv += term * (dpoly - ln_big_n * poly);
        }
        let a = z + (2 * k - 1) as f64;
        let b = z + (2 * k) as f64;
        dpoly = dpoly * a * b + poly * (a + b);
        poly = poly * a * b;
        scale *= inv_n2;
    }

    Ok(ZetaValue {
        value,
        derivative: with_derivative.then_some(deriv),
        est_error: bound,
    })
}

/// `ζ(s)` with its truncation bound.
pub fn zeta(s: ComplexPoint, params: &EvalParams) -> Result<ZetaValue> {
    euler_maclaurin(s, params, false)
}

/// `ζ(s)` and `ζ'(s)`; every Euler–Maclaurin term is differentiated exactly.
pub fn zeta_with_derivative(s: ComplexPoint, params: &EvalParams) -> Result<ZetaValue> {
    euler_maclaurin(s, params, true)
}

/// Smallest height where [`rs_theta`] is accepted.
pub const THETA_T_MIN: f64 = 7.0;

/// Riemann–Siegel theta by its asymptotic expansion.
pub fn rs_theta(t: f64) -> Result<f64> {
    if !(t >= THETA_T_MIN) || !t.is_finite() {
        return Err(Error::DomainError(format!(
            "rs_theta needs t >= {THETA_T_MIN}, got {t}"
        )));
    }
    Ok(theta_series(t))
}

#[inline]
pub(crate) fn theta_series(t: f64) -> f64 {
    let r = 1.0 / t;
    let r2 = r * r;
    let tail = r
        * (1.0 / 48.0
            + r2 * (7.0 / 5760.0
                + r2 * (31.0 / 80640.0 + r2 * (127.0 / 430080.0 + r2 * (511.0 / 1216512.0)))));
    0.5 * t * (t / (2.0 * PI)).ln() - 0.5 * t - PI / 8.0 + tail
}

/// `dθ/dt` for the same expansion.
pub fn rs_theta_derivative(t: f64) -> Result<f64> {
    if !(t >= THETA_T_MIN) || !t.is_finite() {
        return Err(Error::DomainError(format!(
            "rs_theta needs t >= {THETA_T_MIN}, got {t}"
        )));
    }
    Ok(theta_derivative_series(t))
}

#[inline]
pub(crate) fn theta_derivative_series(t: f64) -> f64 {
    let r2 = 1.0 / (t * t);
    let tail = r2
        * (1.0 / 48.0
            + r2 * (21.0 / 5760.0
                + r2 * (155.0 / 80640.0 + r2 * (889.0 / 430080.0 + r2 * (4599.0 / 1216512.0)))));
    0.5 * (t / (2.0 * PI)).ln() - tail
}

/// Hardy's `Z(t) = e^{iθ(t)} ζ(1/2 + it)`.
///
/// The rotated value must be real to `1e-8 · max(1, |ζ|)`; with a looser
/// error target the bound widens to `10 · target_abs_error` in place of
/// `1e-8`.
pub fn hardy_z(t: f64, params: &EvalParams) -> Result<f64> {
    let theta = rs_theta(t)?;
    let z = zeta(ComplexPoint::on_critical_line(t), params)?.value;
    let rotated = Complex64::from_polar(1.0, theta) * z;
    let residual = rotated.im.abs();
    if residual > (1e-8_f64).max(10.0 * params.target_abs_error) * z.norm().max(1.0) {
        return Err(Error::ImaginaryResidual { t, residual });
    }
    Ok(rotated.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(sigma: f64, t: f64) -> ComplexPoint {
        ComplexPoint::new(sigma, t)
    }

    #[test]
    fn zeta_two_is_basel() {
        let v = zeta(p(2.0, 0.0), &EvalParams::default()).unwrap();
        assert!((v.value.re - PI * PI / 6.0).abs() < 1e-12);
        assert!(v.value.im.abs() < 1e-15);
    }

    #[test]
    fn zeta_zero_is_minus_half() {
        let v = zeta(p(0.0, 0.0), &EvalParams::default()).unwrap();
        assert!((v.value.re + 0.5).abs() < 1e-12, "{}", v.value);
    }

    #[test]
    fn zeta_at_negative_odd_integer() {
        // ζ(-1) = -1/12
        let v = zeta(p(-1.0, 0.0), &EvalParams::default()).unwrap();
        assert!((v.value.re + 1.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn pole_and_window_errors() {
        let params = EvalParams::default();
        assert!(matches!(
            zeta(p(1.0, 5e-7), &params),
            Err(Error::PoleProximity(_))
        ));
        assert!(matches!(
            zeta(p(9.0, 1.0), &params),
            Err(Error::WindowExceeded { .. })
        ));
        assert!(matches!(
            zeta(p(0.5, 2e4), &params),
            Err(Error::WindowExceeded { .. })
        ));
        // Just off the pole is fine.
        assert!(zeta(p(1.0, 1e-3), &params).is_ok());
    }

    #[test]
    fn params_validation() {
        assert!(EvalParams::new(1.1, 12, 1e-10).is_err());
        assert!(EvalParams::new(1.3, 3, 1e-10).is_err());
        assert!(EvalParams::new(1.3, 21, 1e-10).is_err());
        assert!(EvalParams::new(1.3, 12, 1e-5).is_err());
        assert!(EvalParams::new(1.3, 12, 0.0).is_err());
        assert!(EvalParams::new(1.2, 4, 1e-6).is_ok());
        assert!(EvalParams::reduced(1e-3).is_ok());
        assert!(EvalParams::reduced(0.5).is_err());
    }

    #[test]
    fn est_error_meets_target_across_window() {
        let params = EvalParams::default();
        for &(sigma, t) in &[(0.5, 14.0), (0.0, 1e4), (-2.0, 1.1e4), (5.0, 9000.0), (0.5, 0.0)] {
            let v = zeta(p(sigma, t), &params).unwrap();
            assert!(v.est_error <= params.target_abs_error, "{sigma} {t} {}", v.est_error);
        }
    }

    #[test]
    fn bernoulli_coefficients_match_even_zeta_values() {
        // B_{2k}/(2k)! = (-1)^{k+1} 2 ζ(2k) / (2π)^{2k}
        let coeffs = bernoulli_factorial_coeffs();
        for k in 1..=21 {
            let zeta_2k: f64 = if k == 1 {
                PI * PI / 6.0
            } else {
                (1..200_000).rev().map(|n| (n as f64).powi(-2 * k as i32)).sum()
            };
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            let expected = sign * 2.0 * zeta_2k / (2.0 * PI).powi(2 * k as i32);
            assert_relative_eq!(coeffs[k - 1], expected, max_relative = 1e-13);
        }
    }

    #[test]
    fn theta_domain() {
        assert!(rs_theta(6.9).is_err());
        assert!(rs_theta(f64::NAN).is_err());
        assert!(rs_theta(7.0).is_ok());
    }

    #[test]
    fn theta_negative_and_rising_at_two_pi_e() {
        let t = 2.0 * PI * std::f64::consts::E;
        let th = rs_theta(t).unwrap();
        assert!(th < 0.0);
        assert!(rs_theta_derivative(t).unwrap() > 0.0);
        // ½ t ln(t/2π) − t/2 vanishes here, leaving −π/8 plus small corrections.
        assert!((th + PI / 8.0 - 1.0 / (48.0 * t)).abs() < 1e-4);
    }

    #[test]
    fn theta_at_first_gram_heights() {
        assert!((rs_theta(9.6669080561).unwrap() + PI).abs() < 1e-6);
        assert!(rs_theta(17.8455995).unwrap().abs() < 1e-6);
    }

    #[test]
    fn theta_derivative_matches_central_difference() {
        for &t in &[7.5_f64, 14.0, 100.0, 5000.0] {
            let h = 1e-5 * t.max(1.0);
            let fd = (theta_series(t + h) - theta_series(t - h)) / (2.0 * h);
            assert_relative_eq!(rs_theta_derivative(t).unwrap(), fd, max_relative = 1e-7);
        }
    }

    #[test]
    fn hardy_z_at_first_zero_and_gram_point() {
        let params = EvalParams::default();
        assert!(hardy_z(14.134725, &params).unwrap().abs() < 1e-5);
        let g0 = 17.8455995;
        let z = hardy_z(g0, &params).unwrap();
        assert!(z > 0.0);
        let re = zeta(ComplexPoint::on_critical_line(g0), &params).unwrap().value.re;
        assert!((re - z).abs() < 1e-6);
    }

    #[test]
    fn hardy_z_sign_matches_rotation_at_twenty() {
        let params = EvalParams::default();
        let z = hardy_z(20.0, &params).unwrap();
        let zeta20 = zeta(ComplexPoint::on_critical_line(20.0), &params).unwrap().value;
        let theta = rs_theta(20.0).unwrap();
        // ζ(1/2+it) = Z(t) e^{-iθ}
        let back = Complex64::from_polar(z, -theta);
        assert!((back - zeta20).norm() < 1e-9);
        assert!((z.abs() - zeta20.norm()).abs() < 1e-9);
    }
}
