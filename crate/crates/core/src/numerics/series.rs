//! Summation of slowly convergent positive-index series.

use super::{NumericsError, Result, SeriesTruncation};

const BLOCK: usize = 16;

fn partial<T: FnMut(usize) -> f64>(term: &mut T, trunc: SeriesTruncation) -> Result<(f64, usize)> {
    trunc_valid(trunc)?;
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    let mut n = 0;
    while n < trunc.max_terms {
        let mut block = 0.0;
        for _ in 0..BLOCK.min(trunc.max_terms - n) {
            n += 1;
            let t = term(n);
            if !t.is_finite() {
                return Err(NumericsError::NonFinite { at: n as f64 });
            }
            block += t;
            // Neumaier compensation keeps long sums independent of block size.
            let s = sum + t;
            comp += if sum.abs() >= t.abs() { (sum - s) + t } else { (t - s) + sum };
            sum = s;
        }
        if block.abs() < trunc.tail_tol {
            return Ok((sum + comp, n));
        }
    }
    Err(NumericsError::SeriesNotConverged { partial: sum + comp, terms: n })
}

fn trunc_valid(trunc: SeriesTruncation) -> Result<()> {
    SeriesTruncation::new(trunc.max_terms, trunc.tail_tol).map(|_| ())
}

/// Σ_{n≥1} term(n), stopping once a block of 16 consecutive terms adds less
/// than `tail_tol`.
pub fn sum_series<T: FnMut(usize) -> f64>(mut term: T, trunc: SeriesTruncation) -> Result<f64> {
    partial(&mut term, trunc).map(|(s, _)| s)
}

/// As [`sum_series`], adding `tail(n)`, an estimate of Σ_{k>n} term(k),
/// for the number of terms `n` actually summed.
pub fn sum_series_with_tail<T, R>(mut term: T, tail: R, trunc: SeriesTruncation) -> Result<f64>
where
    T: FnMut(usize) -> f64,
    R: Fn(usize) -> f64,
{
    let (s, n) = partial(&mut term, trunc)?;
    Ok(s + tail(n))
}
