//! Shapiro-Wilk W test with Royston's approximations (algorithm AS R94).

use statrs::distribution::{ContinuousCDF, Normal};

use super::TestReport;
use crate::{Error, Result};

const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056];
const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
const C3: [f64; 4] = [0.544, -0.39978, 0.025054, -6.714e-4];
const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];
const G: [f64; 2] = [-2.273, 0.459];

const MIN_N: usize = 3;
const MAX_N: usize = 5000;

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

/// Antisymmetric coefficient vector for a sorted sample of size `n`, with
/// unit Euclidean norm.
fn coefficients(n: usize) -> Vec<f64> {
    let std = Normal::new(0.0, 1.0).expect("standard normal");
    let half = n / 2;
    let mut upper = vec![0.0; half];
    if n == 3 {
        upper[0] = std::f64::consts::FRAC_1_SQRT_2;
    } else {
        let an25 = n as f64 + 0.25;
        let m: Vec<f64> = (1..=half).map(|i| std.inverse_cdf((i as f64 - 0.375) / an25)).collect();
        let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
        let ssumm2 = summ2.sqrt();
        let rsn = 1.0 / (n as f64).sqrt();
        let a1 = poly(&C1, rsn) - m[0] / ssumm2;
        let (first_free, fac) = if n > 5 {
            let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
            upper[1] = a2;
            let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2)).sqrt();
            (2, fac)
        } else {
            let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
            (1, fac)
        };
        upper[0] = a1;
        for i in first_free..half {
            upper[i] = -m[i] / fac;
        }
    }
    let mut full = vec![0.0; n];
    for (i, &a) in upper.iter().enumerate() {
        full[i] = -a;
        full[n - 1 - i] = a;
    }
    full
}

pub fn shapiro_wilk(x: &[f64]) -> Result<TestReport> {
    let n = x.len();
    if !(MIN_N..=MAX_N).contains(&n) {
        return Err(Error::SampleSize { n, min: MIN_N, max: MAX_N });
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let range = sorted[n - 1] - sorted[0];
    if !(range > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let scaled: Vec<f64> = sorted.iter().map(|v| v / range).collect();
    let a = coefficients(n);

    // W is the squared correlation between the coefficients and the ordered
    // sample; 1 − W is formed directly to keep precision near W = 1.
    let mean_a = a.iter().sum::<f64>() / n as f64;
    let mean_x = scaled.iter().sum::<f64>() / n as f64;
    let (mut ssa, mut ssx, mut sax) = (0.0, 0.0, 0.0);
    for (ai, xi) in a.iter().zip(&scaled) {
        let da = ai - mean_a;
        let dx = xi - mean_x;
        ssa += da * da;
        ssx += dx * dx;
        sax += da * dx;
    }
    let ssassx = (ssa * ssx).sqrt();
    let one_minus_w = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
    let w = 1.0 - one_minus_w;

    let p_value = if n == 3 {
        let pi6 = 6.0 / std::f64::consts::PI;
        let stqr = std::f64::consts::FRAC_PI_3;
        (pi6 * (w.sqrt().asin() - stqr)).max(0.0)
    } else {
        let mut y = one_minus_w.ln();
        let an = n as f64;
        let (mean, sd) = if n <= 11 {
            let gamma = poly(&G, an);
            if y >= gamma {
                return Ok(report(w, 1e-99, n));
            }
            y = -(gamma - y).ln();
            (poly(&C3, an), poly(&C4, an).exp())
        } else {
            let ln_n = an.ln();
            (poly(&C5, ln_n), poly(&C6, ln_n).exp())
        };
        let z = Normal::new(mean, sd).expect("positive sd");
        z.sf(y)
    };
    Ok(report(w, p_value.clamp(0.0, 1.0), n))
}

fn report(w: f64, p_value: f64, n: usize) -> TestReport {
    TestReport { statistic: w, p_value, alternative: None, n_effective: n }
}
