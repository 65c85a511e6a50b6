//! Small statistics helpers for the Monte Carlo harnesses: running moments,
//! standard errors, a two-sample Kolmogorov-Smirnov test, and log-log fits.

/// Running mean/variance accumulator (Welford).
#[derive(Clone, Copy, Debug, Default)]
pub struct Running {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Running {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn stderr_mean(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }

    /// Standard error of the sample variance under approximate normality,
    /// `var * sqrt(2 / (n - 1))`.
    pub fn stderr_variance_normal(&self) -> f64 {
        self.variance() * (2.0 / (self.n.saturating_sub(1)) as f64).sqrt()
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Sample covariance of paired observations.
pub fn sample_covariance(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let (mx, my) = (mean(xs), mean(ys));
    xs.iter()
        .zip(ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / (xs.len() - 1) as f64
}

/// Sample skewness and excess kurtosis with their asymptotic standard errors
/// `sqrt(6/n)` and `sqrt(24/n)`.
pub fn skewness_kurtosis(xs: &[f64]) -> (f64, f64, f64, f64) {
    let n = xs.len() as f64;
    let m = mean(xs);
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for &x in xs {
        let d = x - m;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let skew = m3 / m2.powf(1.5);
    let kurt = m4 / (m2 * m2) - 3.0;
    ((6.0 / n).sqrt(), skew, (24.0 / n).sqrt(), kurt)
}

/// Two-sample Kolmogorov-Smirnov statistic and the rejection threshold at the
/// given significance level (`alpha` in {0.05, 0.01, 0.001}).
pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> (f64, f64) {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len(), ys.len());
    let mut d: f64 = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    while i < n && j < m {
        let x = xs[i];
        let y = ys[j];
        if x <= y {
            i += 1;
        }
        if y <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let c = if alpha <= 0.001 {
        1.949
    } else if alpha <= 0.01 {
        1.628
    } else {
        1.358
    };
    let crit = c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt();
    (d, crit)
}

/// Least-squares slope and intercept of `y = a + b x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    (intercept, slope)
}

/// Slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly).1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welford_matches_direct() {
        let xs = [1.0, 2.0, 4.0, 8.0, 16.5];
        let mut r = Running::default();
        for &x in &xs {
            r.push(x);
        }
        assert!((r.mean() - mean(&xs)).abs() < 1e-14);
        assert!((r.variance() - sample_variance(&xs)).abs() < 1e-12);
    }

    #[test]
    fn ks_identical_samples_accept() {
        let a: Vec<f64> = (0..500).map(|i| (i as f64 * 0.7133).sin()).collect();
        let (d, crit) = ks_two_sample(&a, &a, 0.01);
        assert!(d <= crit);
    }

    #[test]
    fn ks_shifted_samples_reject() {
        let a: Vec<f64> = (0..2000).map(|i| (i as f64 * 0.137).fract()).collect();
        let b: Vec<f64> = a.iter().map(|x| x + 0.5).collect();
        let (d, crit) = ks_two_sample(&a, &b, 0.01);
        assert!(d > crit);
    }

    #[test]
    fn loglog_slope_recovers_power() {
        let x = [2.0, 4.0, 8.0, 16.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-1.7)).collect();
        assert!((loglog_slope(&x, &y) + 1.7).abs() < 1e-12);
    }
}
