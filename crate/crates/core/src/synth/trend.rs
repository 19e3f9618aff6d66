use serde::{Deserialize, Serialize};

use super::SynthError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum TrendShape {
    Linear,
    /// `end - (end - start) * exp(-(w - first) / tau)`.
    ExponentialPlateau {
        tau_weeks: f64,
    },
}

/// Planned weekly trajectory of one feature plus its noise model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrendSpec {
    pub start: f64,
    pub end: f64,
    #[serde(flatten)]
    pub shape: TrendShape,
    /// Per-observation noise (per clip, image or reading).
    pub noise_sd: f64,
    /// Week-level latent deviation; the coupling scale for coupled targets.
    #[serde(default)]
    pub weekly_sd: f64,
}

impl TrendSpec {
    pub fn linear(start: f64, end: f64, noise_sd: f64) -> Self {
        Self {
            start,
            end,
            shape: TrendShape::Linear,
            noise_sd,
            weekly_sd: 0.0,
        }
    }

    pub fn plateau(start: f64, end: f64, tau_weeks: f64, noise_sd: f64) -> Self {
        Self {
            start,
            end,
            shape: TrendShape::ExponentialPlateau { tau_weeks },
            noise_sd,
            weekly_sd: 0.0,
        }
    }

    pub fn flat(value: f64, noise_sd: f64) -> Self {
        Self::linear(value, value, noise_sd)
    }

    pub fn with_weekly_sd(mut self, sd: f64) -> Self {
        self.weekly_sd = sd;
        self
    }

    /// Noiseless value at `week` for a schedule spanning `first..=last`.
    pub fn value(&self, week: u32, first: u32, last: u32) -> f64 {
        let dw = f64::from(week) - f64::from(first);
        match self.shape {
            TrendShape::Linear => {
                if last == first {
                    self.start
                } else {
                    self.start + (self.end - self.start) * dw / (f64::from(last) - f64::from(first))
                }
            }
            TrendShape::ExponentialPlateau { tau_weeks } => {
                self.end - (self.end - self.start) * (-dw / tau_weeks).exp()
            }
        }
    }

    pub(crate) fn validate(&self, name: &str) -> Result<(), SynthError> {
        let finite = [self.start, self.end, self.noise_sd, self.weekly_sd]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.noise_sd < 0.0 || self.weekly_sd < 0.0 {
            return Err(SynthError::InvalidConfig(format!(
                "trend {name}: values must be finite and noise sds non-negative"
            )));
        }
        if let TrendShape::ExponentialPlateau { tau_weeks } = self.shape {
            if !(tau_weeks > 0.0 && tau_weeks.is_finite()) {
                return Err(SynthError::InvalidConfig(format!(
                    "trend {name}: tau_weeks must be positive"
                )));
            }
        }
        Ok(())
    }
}

/// Standardizes to zero mean and unit sample variance; `None` if constant.
pub(crate) fn standardize(x: &[f64]) -> Option<Vec<f64>> {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
    if !(var > 0.0) {
        return None;
    }
    let sd = var.sqrt();
    Some(x.iter().map(|v| (v - m) / sd).collect())
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
pub(crate) fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Removes the mean and the projection on each (standardized) source, then
/// rescales to unit sample variance.
pub(crate) fn orthogonal_residual(noise: &[f64], sources: &[Vec<f64>]) -> Option<Vec<f64>> {
    let n = noise.len();
    let m = noise.iter().sum::<f64>() / n as f64;
    let mut e: Vec<f64> = noise.iter().map(|v| v - m).collect();
    if !sources.is_empty() {
        let k = sources.len();
        let gram: Vec<Vec<f64>> = (0..k)
            .map(|i| (0..k).map(|j| dot(&sources[i], &sources[j])).collect())
            .collect();
        let rhs: Vec<f64> = sources.iter().map(|s| dot(s, &e)).collect();
        let coef = solve(gram, rhs)?;
        for (c, s) in coef.iter().zip(sources) {
            for (ei, si) in e.iter_mut().zip(s) {
                *ei -= c * si;
            }
        }
    }
    standardize(&e)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Mixing weights `beta = R^-1 r` and residual variance `1 - r . beta` for a
/// target correlated with standardized sources; errors when the implied
/// latent covariance is not positive semi-definite.
pub(crate) fn coupling_weights(
    sources: &[Vec<f64>],
    targets: &[f64],
    name: &str,
) -> Result<(Vec<f64>, f64), SynthError> {
    let n = sources[0].len() as f64;
    let k = sources.len();
    let corr: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| dot(&sources[i], &sources[j]) / (n - 1.0)).collect())
        .collect();
    let infeasible = || SynthError::InfeasibleCoupling(name.to_string());
    let beta = solve(corr, targets.to_vec()).ok_or_else(infeasible)?;
    let resid = 1.0 - dot(targets, &beta);
    if resid < -1e-12 {
        return Err(infeasible());
    }
    Ok((beta, resid.max(0.0)))
}
