use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::AcousticError;
use crate::scalar::Real;

/// Periodic Hann window of length `n`.
pub fn hann_window<T: Real>(n: usize) -> Vec<T> {
    let two_pi = T::PI() + T::PI();
    let nf = T::of_usize(n);
    (0..n)
        .map(|i| T::of(0.5) - T::of(0.5) * (two_pi * T::of_usize(i) / nf).cos())
        .collect()
}

/// Short-time magnitude spectrum, frames x bins, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram<T> {
    magnitudes: Vec<T>,
    pub n_frames: usize,
    pub n_bins: usize,
    pub bin_freqs: Vec<T>,
    /// Centre time of each frame, seconds.
    pub frame_times: Vec<T>,
    pub window_len: usize,
    pub hop_len: usize,
    pub sample_rate: u32,
}

impl<T: Real> Spectrogram<T> {
    pub fn frame(&self, i: usize) -> &[T] {
        &self.magnitudes[i * self.n_bins..(i + 1) * self.n_bins]
    }

    pub fn frames(&self) -> impl Iterator<Item = &[T]> {
        self.magnitudes.chunks_exact(self.n_bins)
    }

    pub fn nyquist(&self) -> T {
        T::of(f64::from(self.sample_rate) / 2.0)
    }

    /// Builds a spectrogram from externally computed magnitudes.
    pub fn from_magnitudes(
        frames: Vec<Vec<T>>,
        sample_rate: u32,
        window_len: usize,
        hop_len: usize,
    ) -> Result<Self, AcousticError> {
        let n_bins = window_len / 2 + 1;
        if frames.iter().any(|f| f.len() != n_bins) {
            return Err(AcousticError::InvalidWindow(window_len));
        }
        let n_frames = frames.len();
        Ok(Self {
            magnitudes: frames.into_iter().flatten().collect(),
            n_frames,
            n_bins,
            bin_freqs: bin_frequencies(sample_rate, window_len),
            frame_times: frame_times(n_frames, sample_rate, window_len, hop_len),
            window_len,
            hop_len,
            sample_rate,
        })
    }
}

fn bin_frequencies<T: Real>(sample_rate: u32, window_len: usize) -> Vec<T> {
    let sr = T::of(f64::from(sample_rate));
    let n = T::of_usize(window_len);
    (0..=window_len / 2).map(|k| T::of_usize(k) * sr / n).collect()
}

fn frame_times<T: Real>(n_frames: usize, sample_rate: u32, window_len: usize, hop_len: usize) -> Vec<T> {
    let sr = T::of(f64::from(sample_rate));
    (0..n_frames)
        .map(|i| T::of_usize(i * hop_len + window_len / 2) / sr)
        .collect()
}

pub(crate) fn validate_frame_params(window_len: usize, hop_len: usize) -> Result<(), AcousticError> {
    if window_len < 256 || !window_len.is_power_of_two() {
        return Err(AcousticError::InvalidWindow(window_len));
    }
    if hop_len == 0 || hop_len > window_len {
        return Err(AcousticError::InvalidHop { hop_len, window_len });
    }
    Ok(())
}

/// Number of full frames: `1 + floor((n - window) / hop)`.
pub fn frame_count(n: usize, window_len: usize, hop_len: usize) -> usize {
    if n < window_len {
        0
    } else {
        1 + (n - window_len) / hop_len
    }
}

/// Complex spectra (bins `0..=window/2`) of Hann-windowed frames.
pub(crate) fn complex_frames<T: Real>(samples: &[T], window_len: usize, hop_len: usize) -> Vec<Vec<Complex<T>>> {
    let window = hann_window::<T>(window_len);
    let fft = FftPlanner::<T>::new().plan_fft_forward(window_len);
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); fft.get_inplace_scratch_len()];
    let n_bins = window_len / 2 + 1;
    (0..frame_count(samples.len(), window_len, hop_len))
        .map(|f| {
            let start = f * hop_len;
            let mut buf: Vec<Complex<T>> = samples[start..start + window_len]
                .iter()
                .zip(&window)
                .map(|(&x, &w)| Complex::new(x * w, T::zero()))
                .collect();
            fft.process_with_scratch(&mut buf, &mut scratch);
            buf.truncate(n_bins);
            buf
        })
        .collect()
}

/// Hann-windowed short-time Fourier magnitude spectrum (no centring or padding).
pub fn stft<T: Real>(
    samples: &[T],
    sample_rate: u32,
    window_len: usize,
    hop_len: usize,
) -> Result<Spectrogram<T>, AcousticError> {
    validate_frame_params(window_len, hop_len)?;
    if samples.len() < window_len {
        return Err(AcousticError::TooShort {
            len: samples.len(),
            needed: window_len,
        });
    }
    let frames: Vec<Vec<T>> = complex_frames(samples, window_len, hop_len)
        .into_iter()
        .map(|f| f.into_iter().map(|c| c.norm()).collect())
        .collect();
    Spectrogram::from_magnitudes(frames, sample_rate, window_len, hop_len)
}
