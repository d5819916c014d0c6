//! Number formatting shared by every emitted file.

/// Significant digits of every float written to an output file.
pub const SIG_DIGITS: usize = 12;

/// Plain decimal with [`SIG_DIGITS`] significant digits, no exponent and no
/// grouping separators. Non-finite values are written as `nan`, `inf`, `-inf`.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // Scientific formatting rounds first, so the exponent already accounts
    // for carries such as 9.9999999999996 -> 1.00000000000e1.
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    if s.starts_with("-") && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Lossless decimal form used inside the cache.
pub fn fmt_exact(x: f64) -> String {
    format!("{x:?}")
}
