use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::stft::{complex_frames, frame_count, hann_window, validate_frame_params};
use super::AcousticError;
use crate::ingest::AudioSignal;
use crate::scalar::Real;

/// Noise-reduction and normalization settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PreprocessParams {
    pub window_len: usize,
    pub hop_len: usize,
    /// Multiplier on the per-bin noise floor; 0 disables gating.
    pub gate_strength: f64,
    /// Percentile of per-bin frame magnitudes taken as the noise floor.
    pub noise_percentile: f64,
    /// Width of the moving average applied to per-bin gains.
    pub gain_smoothing_bins: usize,
    pub target_rms: f64,
    pub normalize_rms: bool,
}

impl Default for PreprocessParams {
    fn default() -> Self {
        Self {
            window_len: 2048,
            hop_len: 512,
            gate_strength: 1.5,
            noise_percentile: 20.0,
            gain_smoothing_bins: 3,
            target_rms: 0.1,
            normalize_rms: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preprocessed<T> {
    pub signal: AudioSignal<T>,
    /// Fraction of output samples that hit the [-1, 1] rails.
    pub clipped_fraction: f64,
    /// Linear gain applied for normalization (1 when disabled).
    pub gain: T,
}

/// Channel-mean downmix.
pub fn downmix<T: Real>(signal: &AudioSignal<T>) -> Vec<T> {
    let c = usize::from(signal.channels.max(1));
    if c == 1 {
        return signal.samples.clone();
    }
    let cf = T::of_usize(c);
    signal
        .samples
        .chunks_exact(c)
        .map(|fr| fr.iter().copied().sum::<T>() / cf)
        .collect()
}

fn rms<T: Real>(x: &[T]) -> T {
    if x.is_empty() {
        return T::zero();
    }
    (x.iter().map(|&v| v * v).sum::<T>() / T::of_usize(x.len())).sqrt()
}

/// Linear-interpolated percentile (`p` in 0..=100) of unsorted values.
pub fn percentile<T: Real>(values: &mut [T], p: f64) -> T {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = values.len();
    if n == 1 {
        return values[0];
    }
    let pos = p.clamp(0.0, 100.0) / 100.0 * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = T::of(pos - lo as f64);
    values[lo] + (values[hi] - values[lo]) * frac
}

/// Stationary spectral gate with weighted overlap-add resynthesis.
///
/// The per-bin noise floor is a percentile of frame magnitudes over
/// frames lying fully inside the signal. Output has the input length.
pub fn spectral_gate<T: Real>(samples: &[T], params: &PreprocessParams) -> Result<Vec<T>, AcousticError> {
    let (w, hop) = (params.window_len, params.hop_len);
    validate_frame_params(w, hop)?;
    let n = samples.len();
    // pad one window on the left and enough on the right to land on a frame boundary
    let mut padded_len = n + 2 * w;
    let rem = (padded_len - w) % hop;
    if rem != 0 {
        padded_len += hop - rem;
    }
    let mut padded = vec![T::zero(); padded_len];
    padded[w..w + n].copy_from_slice(samples);

    let spectra = complex_frames(&padded, w, hop);
    let n_frames = spectra.len();
    let n_bins = w / 2 + 1;
    let interior: Vec<usize> = (0..n_frames)
        .filter(|&f| f * hop >= w && f * hop + w <= w + n)
        .collect();
    let profile_frames: Vec<usize> = if interior.is_empty() {
        (0..n_frames).collect()
    } else {
        interior
    };
    let strength = T::of(params.gate_strength);
    let noise: Vec<T> = (0..n_bins)
        .map(|k| {
            let mut mags: Vec<T> = profile_frames.iter().map(|&f| spectra[f][k].norm()).collect();
            percentile(&mut mags, params.noise_percentile)
        })
        .collect();

    let window = hann_window::<T>(w);
    let ifft = FftPlanner::<T>::new().plan_fft_inverse(w);
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); ifft.get_inplace_scratch_len()];
    let mut out = vec![T::zero(); padded_len];
    let mut norm = vec![T::zero(); padded_len];
    let half = params.gain_smoothing_bins / 2;
    let inv_n = T::one() / T::of_usize(w);
    let mut raw = vec![T::zero(); n_bins];
    let mut full = vec![Complex::new(T::zero(), T::zero()); w];
    for (f, spec) in spectra.iter().enumerate() {
        for k in 0..n_bins {
            let mag = spec[k].norm();
            raw[k] = if mag > T::zero() {
                (T::one() - noise[k] * strength / mag).max(T::zero())
            } else {
                T::zero()
            };
        }
        for k in 0..n_bins {
            let lo = k.saturating_sub(half);
            let hi = (k + half).min(n_bins - 1);
            let g = raw[lo..=hi].iter().copied().sum::<T>() / T::of_usize(hi - lo + 1);
            full[k] = spec[k] * g;
            if k > 0 && k < w / 2 {
                full[w - k] = full[k].conj();
            }
        }
        ifft.process_with_scratch(&mut full, &mut scratch);
        let start = f * hop;
        for i in 0..w {
            out[start + i] = out[start + i] + full[i].re * inv_n * window[i];
            norm[start + i] = norm[start + i] + window[i] * window[i];
        }
    }
    let floor = T::of(1e-8);
    Ok((w..w + n)
        .map(|i| if norm[i] > floor { out[i] / norm[i] } else { T::zero() })
        .collect())
}

/// Mono downmix, spectral gating, then global RMS normalization and clipping.
pub fn preprocess<T: Real>(
    signal: &AudioSignal<T>,
    params: &PreprocessParams,
) -> Result<Preprocessed<T>, AcousticError> {
    if signal.samples.is_empty() {
        return Err(AcousticError::Empty);
    }
    let mono = downmix(signal);
    if mono.iter().all(|&x| x == T::zero()) {
        return Err(AcousticError::ZeroEnergy);
    }
    let gated = if params.gate_strength > 0.0 {
        if mono.len() < params.window_len || frame_count(mono.len(), params.window_len, params.hop_len) == 0 {
            return Err(AcousticError::TooShort {
                len: mono.len(),
                needed: params.window_len,
            });
        }
        spectral_gate(&mono, params)?
    } else {
        mono
    };
    let level = rms(&gated);
    if !(level > T::zero()) {
        return Err(AcousticError::ZeroEnergy);
    }
    let gain = if params.normalize_rms {
        T::of(params.target_rms) / level
    } else {
        T::one()
    };
    let mut clipped = 0usize;
    let samples: Vec<T> = gated
        .into_iter()
        .map(|x| {
            let y = x * gain;
            if y > T::one() {
                clipped += 1;
                T::one()
            } else if y < -T::one() {
                clipped += 1;
                -T::one()
            } else {
                y
            }
        })
        .collect();
    let clipped_fraction = clipped as f64 / samples.len() as f64;
    Ok(Preprocessed {
        signal: AudioSignal::new(samples, signal.sample_rate, 1),
        clipped_fraction,
        gain,
    })
}
