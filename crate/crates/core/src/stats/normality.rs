//! Shapiro-Wilk W test, Royston's AS R94 approximation for 3 <= n <= 5000.

use super::{check_finite, clamp_unit, Df, Method, StatsError, TestResult};
use crate::scalar::Real;
use crate::special::{normal_quantile, normal_sf};

const C1: [f64; 6] = [0.0, 0.221_157, -0.147_981, -2.071_19, 4.434_685, -2.706_056];
const C2: [f64; 6] = [0.0, 0.042_981, -0.293_762, -1.752_461, 5.682_633, -3.582_633];
const C3: [f64; 4] = [0.544, -0.399_78, 0.025_054, -6.714e-4];
const C4: [f64; 4] = [1.3822, -0.778_57, 0.062_767, -0.002_032_2];
const C5: [f64; 4] = [-1.5861, -0.310_82, -0.083_751, 0.003_891_5];
const C6: [f64; 3] = [-0.4803, -0.082_676, 0.003_030_2];
const G: [f64; 2] = [-2.273, 0.459];

fn poly<T: Real>(coef: &[f64], x: T) -> T {
    coef.iter().rev().fold(T::zero(), |acc, &c| acc * x + T::of(c))
}

/// Half-vector of Shapiro-Wilk coefficients for sample size `n`
/// (largest first, all positive).
fn coefficients<T: Real>(n: usize) -> Vec<T> {
    let half = n / 2;
    if n == 3 {
        return vec![T::of(0.5).sqrt()];
    }
    let an = T::of_usize(n);
    let an25 = an + T::of(0.25);
    let m: Vec<T> = (1..=half)
        .map(|i| normal_quantile((T::of_usize(i) - T::of(0.375)) / an25))
        .collect();
    let two = T::of(2.0);
    let summ2 = two * m.iter().map(|&v| v * v).sum::<T>();
    let ssumm2 = summ2.sqrt();
    let rsn = T::one() / an.sqrt();
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;

    let mut a = vec![T::zero(); half];
    a[0] = a1;
    let (start, fac) = if n > 5 {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        a[1] = a2;
        let fac = ((summ2 - two * m[0] * m[0] - two * m[1] * m[1]) / (T::one() - two * a1 * a1 - two * a2 * a2)).sqrt();
        (2, fac)
    } else {
        let fac = ((summ2 - two * m[0] * m[0]) / (T::one() - two * a1 * a1)).sqrt();
        (1, fac)
    };
    for i in start..half {
        a[i] = -m[i] / fac;
    }
    a
}

/// Shapiro-Wilk test of normality.
pub fn shapiro_wilk<T: Real>(sample: &[T]) -> Result<TestResult<T>, StatsError> {
    let n = sample.len();
    if !(3..=5000).contains(&n) {
        return Err(StatsError::SampleSize {
            given: n,
            min: 3,
            max: 5000,
        });
    }
    check_finite(sample)?;
    let mut x = sample.to_vec();
    x.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    if x[n - 1] - x[0] <= T::zero() {
        return Err(StatsError::ZeroVariance);
    }
    let a = coefficients::<T>(n);
    let nf = T::of_usize(n);
    let mean = x.iter().copied().sum::<T>() / nf;
    let ssq: T = x.iter().map(|&v| (v - mean) * (v - mean)).sum();
    let lin: T = a.iter().enumerate().map(|(i, &ai)| ai * (x[n - 1 - i] - x[i])).sum();
    let w = (lin * lin / ssq).min(T::one());

    let p = if n == 3 {
        let pi6 = T::of(6.0) / T::PI();
        let stqr = T::PI() / T::of(3.0);
        (pi6 * (w.sqrt().asin() - stqr)).max(T::zero())
    } else {
        let y = (T::one() - w).ln();
        let (y, m, s) = if n <= 11 {
            let gamma = poly(&G, nf);
            if y >= gamma {
                return Ok(result(w, T::zero()));
            }
            (-(gamma - y).ln(), poly(&C3, nf), poly(&C4, nf).exp())
        } else {
            let ln_n = nf.ln();
            (y, poly(&C5, ln_n), poly(&C6, ln_n).exp())
        };
        normal_sf((y - m) / s)
    };
    Ok(result(w, clamp_unit(p)))
}

fn result<T: Real>(w: T, p: T) -> TestResult<T> {
    TestResult {
        method: Method::ShapiroWilk,
        statistic: w,
        df: Df::None,
        p_value: p,
        effect: None,
    }
}
