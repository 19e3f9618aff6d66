use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AudioSynthParams {
    pub sample_rate: u32,
    pub clip_s: f64,
    /// Peak deviation of the tone's slow frequency modulation.
    pub fm_depth_hz: f64,
    pub fm_rate_hz: f64,
    /// Noise RMS relative to tone RMS.
    pub noise_rel: f64,
    /// Width of the noise band centred on the tone frequency.
    pub noise_band_hz: f64,
}

impl Default for AudioSynthParams {
    fn default() -> Self {
        Self {
            sample_rate: 44_100,
            clip_s: 10.0,
            fm_depth_hz: 300.0,
            fm_rate_hz: 1.5,
            noise_rel: 0.05,
            noise_band_hz: 2000.0,
        }
    }
}

/// A slowly frequency-modulated tone centred on `f0` with RMS `rms`, plus
/// Gaussian noise band-limited around `f0`.
///
/// The modulation keeps each bin's energy non-stationary so a stationary
/// noise gate leaves the tone intact.
pub fn tone_clip<R: Rng>(f0: f64, rms: f64, p: &AudioSynthParams, rng: &mut R) -> Vec<f64> {
    let sr = f64::from(p.sample_rate);
    let n = (p.clip_s * sr).round() as usize;
    let amp = rms * std::f64::consts::SQRT_2;
    let phase0 = rng.random::<f64>() * std::f64::consts::TAU;
    let fm_phase = rng.random::<f64>() * std::f64::consts::TAU;
    let beta = if p.fm_rate_hz > 0.0 {
        p.fm_depth_hz / p.fm_rate_hz
    } else {
        0.0
    };
    let mut x: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / sr;
            let fm = beta * ((std::f64::consts::TAU * p.fm_rate_hz * t + fm_phase).sin() - fm_phase.sin());
            amp * (phase0 + std::f64::consts::TAU * f0 * t + fm).sin()
        })
        .collect();
    if p.noise_rel > 0.0 && n > 0 {
        let noise = band_noise(n, sr, f0 - p.noise_band_hz / 2.0, f0 + p.noise_band_hz / 2.0, rng);
        let target = p.noise_rel * rms;
        for (xi, ni) in x.iter_mut().zip(noise) {
            *xi += ni * target;
        }
    }
    for v in &mut x {
        *v = v.clamp(-1.0, 1.0);
    }
    x
}

/// Unit-RMS Gaussian noise restricted to `[lo, hi]` Hz.
fn band_noise<R: Rng>(n: usize, sr: f64, lo: f64, hi: f64, rng: &mut R) -> Vec<f64> {
    let mut buf: Vec<Complex<f64>> = (0..n)
        .map(|_| Complex::new(rng.sample::<f64, _>(StandardNormal), 0.0))
        .collect();
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(n).process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        let kk = if k <= n / 2 { k } else { n - k };
        let f = kk as f64 * sr / n as f64;
        if f < lo || f > hi {
            *c = Complex::new(0.0, 0.0);
        }
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let re: Vec<f64> = buf.iter().map(|c| c.re).collect();
    let rms = (re.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    if rms > 0.0 {
        re.iter().map(|v| v / rms).collect()
    } else {
        re
    }
}
