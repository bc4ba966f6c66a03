use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{Alternative, PairedSample, TestReport};
use crate::{Error, Result};

/// Paired Student t-test on `a − b`.
pub fn paired_t_test(s: &PairedSample, alternative: Alternative) -> Result<TestReport> {
    let d = s.differences();
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    if !(var > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let t = mean / (var / n).sqrt();
    let dist = StudentsT::new(0.0, 1.0, n - 1.0).expect("df >= 1");
    let p_value = match alternative {
        Alternative::Less => dist.cdf(t),
        Alternative::Greater => dist.sf(t),
        Alternative::TwoSided => (2.0 * dist.cdf(t).min(dist.sf(t))).min(1.0),
    };
    Ok(TestReport { statistic: t, p_value, alternative: Some(alternative), n_effective: d.len() })
}
