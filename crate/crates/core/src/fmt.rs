//! Numeric formatting shared by the CSV writers.

/// Formats `v` like C's `%.16e` (`1.0000000000000000e+00`).
pub fn sci16(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".to_string()
        } else if v > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let s = format!("{v:.16e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", exp.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_c_printf() {
        assert_eq!(sci16(1.0), "1.0000000000000000e+00");
        assert_eq!(sci16(-2.5e-7), "-2.4999999999999999e-07");
        assert_eq!(sci16(-0.375), "-3.7500000000000000e-01");
        assert_eq!(sci16(0.0), "0.0000000000000000e+00");
        assert_eq!(sci16(1.5e123), "1.5000000000000000e+123");
    }
}
