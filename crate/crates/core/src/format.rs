//! Number formatting shared by the text outputs.

/// Significant digits kept in reports.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// `x` rounded to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// Shortest text for `round_sig(x)`; exponent form for very small or
/// large magnitudes, no trailing `.0` on integers.
pub fn sig(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        return "0".to_string();
    }
    let text = format!("{r:?}");
    match text.strip_suffix(".0") {
        Some(int) => int.to_string(),
        None => text,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(sig(0.30000000000000004), "0.3");
        assert_eq!(sig(0.25999999999999995), "0.26");
        assert_eq!(sig(1.0), "1");
        assert_eq!(sig(-0.0), "0");
        assert_eq!(sig(1.234567890123456e-20), "1.23456789012e-20");
        assert_eq!(round_sig(2.0 / 3.0), 0.666666666667);
    }
}
