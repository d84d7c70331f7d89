//! Central finite differences.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeOrder {
    First,
    Second,
}

/// Central difference of `h` at `x`. Without an explicit `step` the step is
/// `|x|·10⁻⁴`, or `10⁻⁶` at `x = 0`.
pub fn finite_difference<H: FnMut(f64) -> f64>(mut h: H, x: f64, order: DerivativeOrder, step: Option<f64>) -> f64 {
    let dx = step.unwrap_or(if x == 0.0 { 1e-6 } else { x.abs() * 1e-4 });
    match order {
        DerivativeOrder::First => (h(x + dx) - h(x - dx)) / (2.0 * dx),
        DerivativeOrder::Second => (h(x + dx) - 2.0 * h(x) + h(x - dx)) / (dx * dx),
    }
}
