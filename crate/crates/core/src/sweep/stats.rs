use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

/// Fixed-width histogram of `(value, weight)` pairs. Bins start at the
/// smallest multiple of `width` not above the minimum; non-finite values are
/// skipped.
pub fn weighted_histogram(values: &[(f64, usize)], width: f64) -> Vec<HistogramBin> {
    assert!(width > 0.0, "bin width must be positive");
    let finite = || values.iter().filter(|(v, _)| v.is_finite());
    let Some(min) = finite().map(|&(v, _)| v).min_by(f64::total_cmp) else {
        return Vec::new();
    };
    let max = finite().map(|&(v, _)| v).max_by(f64::total_cmp).unwrap();
    let start = (min / width).floor() * width;
    let bins = ((max - start) / width).floor() as usize + 1;
    let mut out: Vec<HistogramBin> = (0..bins)
        .map(|i| HistogramBin {
            lower: start + i as f64 * width,
            upper: start + (i + 1) as f64 * width,
            count: 0,
        })
        .collect();
    for &(v, w) in finite() {
        let i = (((v - start) / width).floor() as usize).min(bins - 1);
        out[i].count += w;
    }
    out
}

/// Weighted mean and population standard deviation.
pub(crate) fn mean_std(values: impl Iterator<Item = (f64, f64)> + Clone) -> (f64, f64) {
    let total: f64 = values.clone().map(|(_, w)| w).sum();
    if total == 0.0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.clone().map(|(v, w)| v * w).sum::<f64>() / total;
    let var = values.map(|(v, w)| w * (v - mean).powi(2)).sum::<f64>() / total;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_counts_weights() {
        let h = weighted_histogram(&[(1.0, 2), (4.9, 1), (5.0, 3), (f64::INFINITY, 9)], 5.0);
        assert_eq!(h.len(), 2);
        assert_eq!((h[0].lower, h[0].count), (0.0, 3));
        assert_eq!((h[1].lower, h[1].count), (5.0, 3));
        assert!(weighted_histogram(&[], 1.0).is_empty());
    }

    #[test]
    fn mean_and_std() {
        let (m, s) = mean_std([(1.0, 1.0), (3.0, 1.0)].into_iter());
        assert_eq!((m, s), (2.0, 1.0));
        let (m, s) = mean_std([(5.0, 4.0)].into_iter());
        assert_eq!((m, s), (5.0, 0.0));
        assert!(mean_std(std::iter::empty()).0.is_nan());
    }
}
