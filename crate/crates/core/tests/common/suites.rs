//! Signal-processing and optical-flow checks, shared by the acceptance
//! runner and the per-module integration tests.

use std::f64::consts::PI;

use aviary_sense::acoustic::{hann_window, spectral_features, stft, summarize_clip, temporal_features, FeatureParams};
use aviary_sense::flow::{dense_flow, motion_magnitude, DisParams, FlowField, Image};
use aviary_sense::ingest::AudioSignal;
use aviary_sense::synth::shift_wrap;
use rand::Rng;

use super::checks::{Check, Tally};
use super::{angle_deg, interior_mean, rel_err, texture};

pub const SR: u32 = 44_100;

pub fn sine(freq: f64, amp: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| amp * (2.0 * PI * freq * i as f64 / SR as f64).sin())
        .collect()
}

pub fn clip(samples: Vec<f64>) -> AudioSignal<f64> {
    AudioSignal::mono(samples, SR)
}

/// Windowed time-domain energy against the one-sided spectrum.
pub fn parseval(frames: usize, seed: u64) -> Check {
    let mut rng = super::rng(seed);
    let mut t = Tally::default();
    let n = 2048;
    let w: Vec<f64> = hann_window(n);
    for i in 0..frames {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let spec = stft(&x, SR, n, n).map_err(|e| e.to_string())?;
        let mag = spec.frame(0);
        let time: f64 = x.iter().zip(&w).map(|(a, b)| (a * b).powi(2)).sum();
        let inner: f64 = mag[1..n / 2].iter().map(|m| m * m).sum();
        let freq = (mag[0].powi(2) + 2.0 * inner + mag[n / 2].powi(2)) / n as f64;
        t.close(&format!("parseval frame {i}"), rel_err(freq, time), 0.0, 1e-9);
    }
    t.finish("Parseval")
}

/// 1 kHz centroid within a bin, sine RMS within 1%, 100 Hz ZCR within 2%.
pub fn sine_descriptors() -> Check {
    let mut t = Tally::default();
    let p = FeatureParams::default();
    let amp = 0.3;
    let s = summarize_clip(&clip(sine(1000.0, amp, SR as usize)), &p)
        .map_err(|e| e.to_string())?
        .features;
    let bin = SR as f64 / p.window_len as f64;
    t.close("1 kHz centroid", s.centroid_hz, 1000.0, bin);
    t.close("sine rms rel. error", rel_err(s.rms, amp / 2f64.sqrt()), 0.0, 0.01);

    let x = sine(100.0, 0.5, SR as usize);
    let tf = temporal_features(&x, x.len(), x.len()).map_err(|e| e.to_string())?;
    // direct sign-change count over the same frame is the oracle
    let crossings = x.windows(2).filter(|w| (w[0] >= 0.0) != (w[1] >= 0.0)).count();
    t.close(
        "zcr vs direct count",
        tf.zcr[0],
        crossings as f64 / (x.len() - 1) as f64,
        0.0,
    );
    t.close("100 Hz zcr rel. error", rel_err(tf.zcr[0], 200.0 / 44_099.0), 0.0, 0.02);
    t.finish("sine")
}

/// Scaling by powers of two leaves every rounding step unchanged, so the
/// spectral shape descriptors and ZCR must be bit-identical and the
/// level descriptors must scale exactly.
pub fn scale_invariance(seed: u64) -> Check {
    let mut rng = super::rng(seed);
    let mut t = Tally::default();
    let x: Vec<f64> = (0..8192).map(|_| rng.random_range(-0.5..0.5)).collect();
    let base = spectral_features(&stft(&x, SR, 2048, 512).unwrap(), 0.85).map_err(|e| e.to_string())?;
    let tb = temporal_features(&x, 882, 441).map_err(|e| e.to_string())?;
    for c in [0.25, 0.5, 2.0, 4.0] {
        let y: Vec<f64> = x.iter().map(|v| v * c).collect();
        let s = spectral_features(&stft(&y, SR, 2048, 512).unwrap(), 0.85).map_err(|e| e.to_string())?;
        t.holds(&format!("centroid x{c}"), s.centroid_hz == base.centroid_hz);
        t.holds(&format!("bandwidth x{c}"), s.bandwidth_hz == base.bandwidth_hz);
        t.holds(&format!("rolloff x{c}"), s.rolloff_hz == base.rolloff_hz);
        let tf = temporal_features(&y, 882, 441).map_err(|e| e.to_string())?;
        t.holds(&format!("zcr x{c}"), tf.zcr == tb.zcr);
        t.holds(
            &format!("rms x{c}"),
            tf.rms.iter().zip(&tb.rms).all(|(a, b)| *a == c * b),
        );
        t.holds(
            &format!("ste x{c}"),
            tf.ste.iter().zip(&tb.ste).all(|(a, b)| *a == c * c * b),
        );
    }
    t.finish("scale")
}

/// Reversal invariance of the temporal descriptors, exact on dyadic data.
pub fn reversal_invariance(cases: usize, seed: u64) -> Check {
    let mut rng = super::rng(seed);
    let mut t = Tally::default();
    for i in 0..cases {
        // multiples of 1/256: squares and their sums are exact, so order cannot matter
        let x: Vec<f64> = (0..4000)
            .map(|_| f64::from(rng.random_range(-256i32..=256)) / 256.0)
            .collect();
        let r: Vec<f64> = x.iter().rev().copied().collect();
        let a = temporal_features(&x, x.len(), x.len()).map_err(|e| e.to_string())?;
        let b = temporal_features(&r, r.len(), r.len()).map_err(|e| e.to_string())?;
        t.holds(
            &format!("reversal #{i}"),
            a.zcr == b.zcr && a.rms == b.rms && a.ste == b.ste,
        );
    }
    t.finish("reversal")
}

/// Identical frames, textured and noisy, must give mean motion below 0.01 px.
pub fn zero_motion(frames: u64, seed: u64) -> Check {
    let p = DisParams::default();
    let mut rng = super::rng(seed);
    let mut t = Tally::default();
    for i in 0..frames {
        let img = if i % 2 == 0 {
            texture(160, 90, i)
        } else {
            let amp = rng.random_range(0.0..1.0);
            Image::new(96, 64, (0..96 * 64).map(|_| amp * rng.random::<f64>()).collect())
        };
        let f = dense_flow(&img, &img, &p).map_err(|e| e.to_string())?;
        t.close(&format!("identical frame {i}"), motion_magnitude(&f), 0.0, 0.01);
    }
    t.finish("zero-motion")
}

/// Integer translations on a periodic texture, checked away from the border.
pub fn translations(width: usize, height: usize, shifts: &[(isize, isize)], seed: u64) -> Check {
    let p = DisParams::default();
    let tex = texture(width, height, seed);
    let mut t = Tally::default();
    for &(dx, dy) in shifts {
        let f = dense_flow(&tex, &shift_wrap(&tex, dx, dy), &p).map_err(|e| e.to_string())?;
        let (u, v, m) = interior_mean(&f, p.patch_size);
        let truth = ((dx * dx + dy * dy) as f64).sqrt();
        t.close(
            &format!("({dx},{dy}) magnitude rel. error"),
            rel_err(m, truth),
            0.0,
            0.10,
        );
        t.close(
            &format!("({dx},{dy}) direction deg"),
            angle_deg((u, v), (dx as f64, dy as f64)),
            0.0,
            15.0,
        );
    }
    t.finish("translation")
}

/// Exact 1-homogeneity of motion magnitude under power-of-two scaling.
pub fn homogeneity(cases: usize, seed: u64) -> Check {
    let mut rng = super::rng(seed);
    let mut t = Tally::default();
    for i in 0..cases {
        let (w, h) = (rng.random_range(1..20), rng.random_range(1..20));
        let dx: Vec<f64> = (0..w * h).map(|_| rng.random_range(-4.0..4.0)).collect();
        let dy: Vec<f64> = (0..w * h).map(|_| rng.random_range(-4.0..4.0)).collect();
        let scaled = |c: f64| FlowField {
            width: w,
            height: h,
            dx: dx.iter().map(|v| v * c).collect(),
            dy: dy.iter().map(|v| v * c).collect(),
        };
        let m = motion_magnitude(&scaled(1.0));
        for c in [0.0, 0.25, 0.5, 2.0, 8.0] {
            t.holds(&format!("field {i} x{c}"), motion_magnitude(&scaled(c)) == c * m);
        }
        let c = rng.random_range(0.0..10.0);
        t.close(
            &format!("field {i} x{c:.3}"),
            rel_err(motion_magnitude(&scaled(c)), c * m),
            0.0,
            1e-13,
        );
    }
    t.finish("homogeneity")
}

/// Runs each named check, joining details on success and failures otherwise.
pub fn all(parts: Vec<(&str, Check)>) -> Check {
    let (mut ok, mut bad) = (Vec::new(), Vec::new());
    for (name, c) in parts {
        match c {
            Ok(d) => ok.push(format!("{name}: {d}")),
            Err(e) => bad.push(format!("{name}: {e}")),
        }
    }
    if bad.is_empty() {
        Ok(ok.join("; "))
    } else {
        Err(bad.join("; "))
    }
}
