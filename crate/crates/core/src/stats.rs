//! Small statistical toolbox shared by the experiments and their tests:
//! compensated summation, weighted least squares on transformed scales,
//! Kolmogorov-Smirnov statistics, and a chi-square goodness-of-fit statistic.

/// Neumaier-compensated sum; order-sensitive by design, callers fix the order.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn mean(xs: &[f64]) -> f64 {
    neumaier_sum(xs.iter().copied()) / xs.len() as f64
}

/// Unbiased sample variance (denominator n - 1).
pub fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    neumaier_sum(xs.iter().map(|x| (x - m) * (x - m))) / (xs.len() as f64 - 1.0)
}

/// Binomial standard error of a hit fraction.
pub fn binomial_stderr(hits: u64, trials: u64) -> f64 {
    let p = hits as f64 / trials as f64;
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// A fitted line `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope under the known-variance convention
    /// (weights interpreted as 1 / Var(y_i)).
    pub slope_stderr: f64,
}

/// Weighted least squares. Weights are inverse variances; returns `None`
/// for fewer than two points or degenerate abscissas.
pub fn weighted_linfit(x: &[f64], y: &[f64], w: &[f64]) -> Option<LinearFit> {
    assert_eq!(x.len(), y.len());
    assert_eq!(x.len(), w.len());
    if x.len() < 2 {
        return None;
    }
    let sw = neumaier_sum(w.iter().copied());
    if !(sw > 0.0) {
        return None;
    }
    let xbar = neumaier_sum(x.iter().zip(w).map(|(x, w)| x * w)) / sw;
    let ybar = neumaier_sum(y.iter().zip(w).map(|(y, w)| y * w)) / sw;
    let sxx = neumaier_sum(x.iter().zip(w).map(|(x, w)| w * (x - xbar) * (x - xbar)));
    if !(sxx > 0.0) {
        return None;
    }
    let sxy = neumaier_sum(
        x.iter()
            .zip(y)
            .zip(w)
            .map(|((x, y), w)| w * (x - xbar) * (y - ybar)),
    );
    let slope = sxy / sxx;
    Some(LinearFit {
        slope,
        intercept: ybar - slope * xbar,
        slope_stderr: (1.0 / sxx).sqrt(),
    })
}

/// Ordinary least squares (unit weights).
pub fn ols_linfit(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    weighted_linfit(x, y, &vec![1.0; x.len()])
}

/// Two-sided one-sample Kolmogorov-Smirnov statistic of a sorted sample
/// against a continuous CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    let mut sup: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        sup = sup.max(((i + 1) as f64 / n - f).abs());
        sup = sup.max((f - i as f64 / n).abs());
    }
    sup
}

/// Two-sample Kolmogorov-Smirnov statistic of two sorted samples. Ties
/// (within and across samples) are consumed together before the gap is
/// evaluated.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut i = 0;
    let mut j = 0;
    let mut sup: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        sup = sup.max((i as f64 / na - j as f64 / nb).abs());
    }
    sup
}

/// Pearson chi-square statistic of observed counts against expected counts.
pub fn chi_square_statistic(observed: &[u64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum()
}

/// Critical value of the chi-square distribution with 63 degrees of freedom
/// at the 0.999 level (for the 4x4x4 sampler uniformity partition).
pub const CHI2_63_P999: f64 = 103.44237731987324;
