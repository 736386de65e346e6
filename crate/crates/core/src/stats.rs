//! Small statistics toolkit for the experiments: sample means with standard
//! errors, ordinary least squares with t-intervals, Wilson intervals and
//! empirical quantiles.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// A sample statistic with its size and standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub std_err: f64,
    pub n: usize,
}

impl Stat {
    pub fn from_samples(xs: &[f64]) -> Stat {
        let n = xs.len();
        if n == 0 {
            return Stat { mean: f64::NAN, std_err: f64::NAN, n };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let std_err = if n > 1 {
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            f64::NAN
        };
        Stat { mean, std_err, n }
    }

    /// A proportion `k / n` with binomial standard error.
    pub fn proportion(k: usize, n: usize) -> Stat {
        let p = k as f64 / n as f64;
        Stat {
            mean: p,
            std_err: (p * (1.0 - p) / n as f64).sqrt(),
            n,
        }
    }

    /// Half-width of the two-sided 95% t-interval for the mean.
    pub fn ci95_half_width(&self) -> f64 {
        if self.n < 2 {
            return f64::INFINITY;
        }
        t_quantile_975(self.n - 1) * self.std_err
    }
}

/// 0.975 quantile of Student's t with `df` degrees of freedom.
pub fn t_quantile_975(df: usize) -> f64 {
    StudentsT::new(0.0, 1.0, df as f64)
        .map(|t| t.inverse_cdf(0.975))
        .unwrap_or(f64::INFINITY)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_std_err: f64,
    /// 95% t-interval for the slope.
    pub slope_ci: [f64; 2],
    pub r_squared: f64,
    pub n: usize,
}

impl LinearFit {
    pub fn ci_excludes_zero(&self) -> bool {
        self.slope_ci[0] > 0.0 || self.slope_ci[1] < 0.0
    }
}

/// Ordinary least squares of `y` on `x`; `None` with fewer than three points
/// or no spread in `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    let n = x.len();
    if n != y.len() || n < 3 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let slope_std_err = (sse / (n - 2) as f64 / sxx).sqrt();
    let half = t_quantile_975(n - 2) * slope_std_err;
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Some(LinearFit {
        slope,
        intercept,
        slope_std_err,
        slope_ci: [slope - half, slope + half],
        r_squared,
        n,
    })
}

/// Wilson score interval for `k` successes in `n` trials at normal quantile `z`.
pub fn wilson_interval(k: usize, n: usize, z: f64) -> [f64; 2] {
    if n == 0 {
        return [0.0, 1.0];
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    [(center - half).max(0.0), (center + half).min(1.0)]
}

/// Empirical quantile with linear interpolation between order statistics.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [3.0, 5.0, 7.0, 9.0];
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.intercept - 1.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert!(f.ci_excludes_zero());
        assert!(linear_fit(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_none());
    }

    #[test]
    fn noisy_line_interval() {
        let x = [0.0, 1.0, 2.0, 3.0, 4.0];
        let y = [0.1, 0.9, 2.2, 2.8, 4.1];
        let f = linear_fit(&x, &y).unwrap();
        // df = 3, t = 3.182446...
        let half = f.slope_ci[1] - f.slope;
        assert!((half / f.slope_std_err - 3.182_446_305_284_263).abs() < 1e-6);
    }

    #[test]
    fn wilson_bounds() {
        let [lo, hi] = wilson_interval(0, 10, Z95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.2 && hi < 0.35);
        let [lo, hi] = wilson_interval(50, 100, Z95);
        assert!((lo + hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quantiles_and_means() {
        let v = [4.0, 1.0, 3.0, 2.0, 5.0];
        assert_eq!(quantile(&v, 0.5), 3.0);
        assert_eq!(quantile(&v, 0.9), 4.6);
        let s = Stat::from_samples(&[1.0, 2.0, 3.0]);
        assert_eq!(s.mean, 2.0);
        assert!((s.std_err - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }
}
