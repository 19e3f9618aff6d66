use serde::{Deserialize, Serialize};

use super::stft::{stft, Spectrogram};
use super::AcousticError;
use crate::ingest::AudioSignal;
use crate::scalar::Real;

/// Frame and analysis parameters for clip-level descriptors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeatureParams {
    pub window_len: usize,
    pub hop_len: usize,
    pub rolloff_fraction: f64,
    /// Temporal (ZCR / RMS / STE) frame length, milliseconds.
    pub frame_ms: f64,
    pub frame_hop_ms: f64,
}

impl Default for FeatureParams {
    fn default() -> Self {
        Self {
            window_len: 2048,
            hop_len: 512,
            rolloff_fraction: 0.85,
            frame_ms: 20.0,
            frame_hop_ms: 10.0,
        }
    }
}

impl FeatureParams {
    /// Temporal frame and hop lengths in samples at `sample_rate`.
    pub fn temporal_frame(&self, sample_rate: u32) -> (usize, usize) {
        let sr = f64::from(sample_rate);
        let frame = (self.frame_ms * sr / 1000.0).round() as usize;
        let hop = ((self.frame_hop_ms * sr / 1000.0).round() as usize).max(1);
        (frame, hop)
    }
}

/// Per-frame spectral shape descriptors.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFrames<T> {
    pub centroid_hz: Vec<T>,
    pub bandwidth_hz: Vec<T>,
    pub rolloff_hz: Vec<T>,
    /// Frames with zero total magnitude, excluded above.
    pub skipped: usize,
}

/// Per-frame time-domain descriptors.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalFrames<T> {
    pub zcr: Vec<T>,
    pub rms: Vec<T>,
    pub ste: Vec<T>,
}

/// Magnitude-weighted centroid, bandwidth and rolloff of every frame.
pub fn spectral_features<T: Real>(
    spec: &Spectrogram<T>,
    rolloff_fraction: T,
) -> Result<SpectralFrames<T>, AcousticError> {
    if !(rolloff_fraction > T::zero() && rolloff_fraction <= T::one()) {
        return Err(AcousticError::InvalidRolloff(rolloff_fraction.as_f64()));
    }
    let mut out = SpectralFrames {
        centroid_hz: Vec::with_capacity(spec.n_frames),
        bandwidth_hz: Vec::with_capacity(spec.n_frames),
        rolloff_hz: Vec::with_capacity(spec.n_frames),
        skipped: 0,
    };
    let freqs = &spec.bin_freqs;
    for mags in spec.frames() {
        let total: T = mags.iter().copied().sum();
        if !(total > T::zero()) {
            out.skipped += 1;
            continue;
        }
        let centroid = mags.iter().zip(freqs).map(|(&m, &f)| m * f).sum::<T>() / total;
        let spread = mags
            .iter()
            .zip(freqs)
            .map(|(&m, &f)| m * (f - centroid) * (f - centroid))
            .sum::<T>()
            / total;
        // a few ulps of slack so exact fractions of equal bins are not missed
        let target = rolloff_fraction * total - T::of_usize(4 * mags.len()) * T::epsilon() * total;
        let mut cum = T::zero();
        let mut rolloff = freqs[freqs.len() - 1];
        for (&m, &f) in mags.iter().zip(freqs) {
            cum = cum + m;
            if cum >= target {
                rolloff = f;
                break;
            }
        }
        out.centroid_hz.push(centroid);
        out.bandwidth_hz.push(spread.max(T::zero()).sqrt());
        out.rolloff_hz.push(rolloff);
    }
    if out.centroid_hz.is_empty() {
        return Err(AcousticError::NoSpectralMass);
    }
    Ok(out)
}

/// Zero-crossing rate, RMS and short-term energy of every full frame.
///
/// Zero counts as positive when detecting sign changes.
pub fn temporal_features<T: Real>(
    samples: &[T],
    frame_len: usize,
    hop_len: usize,
) -> Result<TemporalFrames<T>, AcousticError> {
    if frame_len < 2 {
        return Err(AcousticError::FrameTooShort(frame_len));
    }
    if hop_len == 0 {
        return Err(AcousticError::InvalidHop {
            hop_len,
            window_len: frame_len,
        });
    }
    if samples.len() < frame_len {
        return Err(AcousticError::TooShort {
            len: samples.len(),
            needed: frame_len,
        });
    }
    let n = 1 + (samples.len() - frame_len) / hop_len;
    let mut out = TemporalFrames {
        zcr: Vec::with_capacity(n),
        rms: Vec::with_capacity(n),
        ste: Vec::with_capacity(n),
    };
    let denom = T::of_usize(frame_len - 1);
    let len = T::of_usize(frame_len);
    for f in 0..n {
        let frame = &samples[f * hop_len..f * hop_len + frame_len];
        let crossings = frame
            .windows(2)
            .filter(|w| (w[0] >= T::zero()) != (w[1] >= T::zero()))
            .count();
        let ste: T = frame.iter().map(|&x| x * x).sum();
        out.zcr.push(T::of_usize(crossings) / denom);
        out.rms.push((ste / len).sqrt());
        out.ste.push(ste);
    }
    Ok(out)
}

/// Clip-level means of the six descriptors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClipFeatures<T> {
    pub centroid_hz: T,
    pub bandwidth_hz: T,
    pub rolloff_hz: T,
    pub zcr: T,
    pub rms: T,
    pub ste: T,
}

/// Clip features plus the number of silent STFT frames left out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClipSummary<T> {
    pub features: ClipFeatures<T>,
    pub skipped_frames: usize,
}

fn frame_mean<T: Real>(xs: &[T]) -> T {
    xs.iter().copied().sum::<T>() / T::of_usize(xs.len())
}

/// Unweighted frame means of all six descriptors over a mono clip.
pub fn summarize_clip<T: Real>(
    signal: &AudioSignal<T>,
    params: &FeatureParams,
) -> Result<ClipSummary<T>, AcousticError> {
    if signal.channels != 1 {
        return Err(AcousticError::NotMono(signal.channels));
    }
    let spec = stft(&signal.samples, signal.sample_rate, params.window_len, params.hop_len)?;
    let spectral = spectral_features(&spec, T::of(params.rolloff_fraction))?;
    let (frame_len, hop) = params.temporal_frame(signal.sample_rate);
    let temporal = temporal_features(&signal.samples, frame_len, hop)?;
    Ok(ClipSummary {
        features: ClipFeatures {
            centroid_hz: frame_mean(&spectral.centroid_hz),
            bandwidth_hz: frame_mean(&spectral.bandwidth_hz),
            rolloff_hz: frame_mean(&spectral.rolloff_hz),
            zcr: frame_mean(&temporal.zcr),
            rms: frame_mean(&temporal.rms),
            ste: frame_mean(&temporal.ste),
        },
        skipped_frames: spectral.skipped,
    })
}
