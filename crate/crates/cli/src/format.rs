//! Number formatting shared by the CSV and JSON writers.

/// `x` rounded to `digits` significant digits.
pub fn round_significant(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

/// Shortest string that reads back as `x` rounded to `digits` significant
/// digits. Plain notation for magnitudes in [10⁻⁴, 10¹⁵), exponent otherwise.
pub fn format_number(x: f64, digits: usize) -> String {
    let r = round_significant(x, digits);
    if r.is_nan() {
        return "nan".to_string();
    }
    if r.is_infinite() {
        return if r > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if r == 0.0 {
        return "0".to_string();
    }
    if (1e-4..1e15).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}
