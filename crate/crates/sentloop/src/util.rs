//! Small shared helpers: numeric rendering and quantile statistics.

/// Render a float with 17 significant digits in scientific notation.
///
/// 17 significant decimal digits are enough to round-trip any `f64`
/// exactly, so files written with this function are loss-free and
/// byte-stable across runs.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    format!("{:.16e}", x)
}

/// Median of a sample (mean of the two central order statistics for even
/// lengths). Panics on empty input.
pub fn median(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}

/// Linear-interpolation quantile (the `x[(n-1)p]` convention).
///
/// `p` must be in `[0, 1]`. Panics on empty input.
pub fn quantile(values: &[f64], p: f64) -> f64 {
    assert!(!values.is_empty(), "quantile of empty sample");
    assert!((0.0..=1.0).contains(&p), "quantile level out of range");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-finite sample value"));
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

/// Interquartile range `q(0.75) - q(0.25)` under the same convention as
/// [`quantile`].
pub fn iqr(values: &[f64]) -> f64 {
    quantile(values, 0.75) - quantile(values, 0.25)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_round_trips_exactly() {
        for &x in &[
            0.1,
            -1.0 / 3.0,
            1.4191234567890123e-1,
            f64::MIN_POSITIVE,
            1e300,
            -0.0,
            2.0_f64.powi(-40) + 1.0,
        ] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s} did not round-trip");
        }
    }

    #[test]
    fn median_odd_and_even() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn iqr_of_equally_spaced_sample() {
        // 1..=5: q1 = 2, q3 = 4 under linear interpolation.
        assert_eq!(iqr(&[1.0, 2.0, 3.0, 4.0, 5.0]), 2.0);
    }
}
