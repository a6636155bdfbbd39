//! Deterministic number formatting for CSV and JSON output.

/// Rounds `x` to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

/// Formats `x` with at most `digits` significant digits, trailing zeros
/// trimmed. Non-finite values print as `NaN`, `inf`, `-inf`.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round_sig(x, digits);
    if r == 0.0 {
        return "0".into();
    }
    let exp = r.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let s = format!("{:.*}", decimals, r);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{:.*e}", digits.saturating_sub(1), r);
        let (mant, e) = s.split_once('e').unwrap_or((&s, "0"));
        let mant = if mant.contains('.') {
            mant.trim_end_matches('0').trim_end_matches('.')
        } else {
            mant
        };
        format!("{mant}e{e}")
    }
}

/// JSON number rounded to 12 significant digits; non-finite becomes `null`.
pub fn json_number(x: f64) -> serde_json::Value {
    if x.is_finite() {
        serde_json::Value::from(round_sig(x, 12))
    } else {
        serde_json::Value::Null
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_to_twelve_digits() {
        assert_eq!(fmt_sig(0.959_831_510_012_345_7, 12), "0.959831510012");
        assert_eq!(fmt_sig(1.0, 12), "1");
        assert_eq!(fmt_sig(-2.5e-9, 12), "-2.5e-9");
        assert_eq!(fmt_sig(123_456_789.123_456_79, 12), "123456789.123");
        assert_eq!(fmt_sig(f64::NAN, 12), "NaN");
        assert_eq!(fmt_sig(0.0, 12), "0");
    }

    #[test]
    fn rounding_is_idempotent() {
        for &x in &[0.1, 1.0 / 3.0, std::f64::consts::PI * 1e-7, 6.02214076e23] {
            let r = round_sig(x, 12);
            assert_eq!(round_sig(r, 12), r);
            assert!(((r - x) / x).abs() < 1e-11);
        }
    }
}
