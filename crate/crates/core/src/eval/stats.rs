use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two-sided normal quantile for 95% coverage.
pub const Z_95: f64 = 1.96;

/// Interval for the relative reduction `(mu2 - mu1) / mu2`, expressed as
/// fractions of `mean2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CIResult {
    pub n1: usize,
    pub n2: usize,
    pub mean1: f64,
    pub mean2: f64,
    /// Sample variances (n - 1 denominator).
    pub var1: f64,
    pub var2: f64,
    pub z_value: f64,
    pub interval_low: f64,
    pub interval_high: f64,
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// `[(d - z se) / mean2, (d + z se) / mean2]` with `d = mean2 - mean1` and
/// `se = sqrt(var1 / n1 + var2 / n2)`.
pub fn confidence_interval(group1: &[f64], group2: &[f64], z: f64) -> Result<CIResult> {
    for (name, g) in [("group1", group1), ("group2", group2)] {
        if g.len() < 2 {
            return Err(Error::DegenerateGroup(format!("{name} needs at least 2 values, has {}", g.len())));
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateGroup(format!("{name} contains a non-finite value")));
        }
    }
    let (m1, v1) = mean_var(group1);
    let (m2, v2) = mean_var(group2);
    confidence_interval_from_stats(group1.len(), m1, v1, group2.len(), m2, v2, z)
}

/// Same interval from summary statistics.
pub fn confidence_interval_from_stats(
    n1: usize,
    mean1: f64,
    var1: f64,
    n2: usize,
    mean2: f64,
    var2: f64,
    z: f64,
) -> Result<CIResult> {
    if n1 < 2 || n2 < 2 {
        return Err(Error::DegenerateGroup(format!("group sizes must be >= 2, got {n1} and {n2}")));
    }
    if !(mean2 != 0.0 && mean2.is_finite()) {
        return Err(Error::DegenerateGroup(format!("group2 mean must be finite and nonzero, got {mean2}")));
    }
    if !(var1 >= 0.0 && var2 >= 0.0) {
        return Err(Error::DegenerateGroup("variances must be >= 0".into()));
    }
    if !(z >= 0.0 && z.is_finite()) {
        return Err(Error::InvalidInput(format!("z must be finite and >= 0, got {z}")));
    }
    let delta = mean2 - mean1;
    let se = (var1 / n1 as f64 + var2 / n2 as f64).sqrt();
    let (a, b) = ((delta - z * se) / mean2, (delta + z * se) / mean2);
    Ok(CIResult {
        n1,
        n2,
        mean1,
        mean2,
        var1,
        var2,
        z_value: z,
        interval_low: a.min(b),
        interval_high: a.max(b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn published_summary_statistics() {
        // Long-form: d = 14247, se = sqrt(15946.57 + 48590.67) = 254.0418,
        // z se = 497.922; (14247 -+ 497.922) / 32831.
        let ci = confidence_interval_from_stats(100, 18584.0, 1594657.0, 100, 32831.0, 4859067.0, Z_95).unwrap();
        assert!((ci.interval_low - 13749.078 / 32831.0).abs() < 1e-6);
        assert!((ci.interval_high - 14744.922 / 32831.0).abs() < 1e-6);
        assert_eq!(format!("{:.4}", ci.interval_low), "0.4188");
        assert_eq!(format!("{:.4}", ci.interval_high), "0.4491");
    }

    #[test]
    fn identical_groups_and_zero_z() {
        let g = [3.0, 5.0, 7.0, 9.0];
        let ci = confidence_interval(&g, &g, 1.96).unwrap();
        assert!((ci.interval_low + ci.interval_high).abs() < 1e-15);
        assert_eq!(ci.var1, 20.0 / 3.0);
        let g1 = [1.0, 2.0, 3.0];
        let g2 = [4.0, 5.0, 6.0];
        let ci = confidence_interval(&g1, &g2, 0.0).unwrap();
        assert_eq!(ci.interval_low, ci.interval_high);
        assert_eq!(ci.interval_low, 3.0 / 5.0);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(confidence_interval(&[1.0], &[1.0, 2.0], 1.96), Err(Error::DegenerateGroup(_))));
        assert!(matches!(confidence_interval(&[1.0, 2.0], &[-1.0, 1.0], 1.96), Err(Error::DegenerateGroup(_))));
        assert!(confidence_interval(&[1.0, 2.0], &[1.0, 2.0], -1.0).is_err());
    }

    #[test]
    fn width_shrinks_with_root_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let a = Normal::new(18.0, 1.2).unwrap();
        let b = Normal::new(33.0, 2.2).unwrap();
        let mut width = |n: usize| {
            let g1: Vec<f64> = (0..n).map(|_| a.sample(&mut rng)).collect();
            let g2: Vec<f64> = (0..n).map(|_| b.sample(&mut rng)).collect();
            let ci = confidence_interval(&g1, &g2, Z_95).unwrap();
            ci.interval_high - ci.interval_low
        };
        let (w25, w100, w400) = (width(25), width(100), width(400));
        for (ratio, expected) in [(w25 / w100, 2.0), (w100 / w400, 2.0)] {
            assert!((ratio / expected - 1.0).abs() < 0.2, "{ratio}");
        }
    }
}
