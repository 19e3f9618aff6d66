#![allow(dead_code)]

pub mod checks;
pub mod oracle;
pub mod suites;

use aviary_sense::flow::{FlowField, Image};
use aviary_sense::synth::fourier_texture;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Periodic random texture, so integer shifts with wrap-around are exact.
pub fn texture(width: usize, height: usize, seed: u64) -> Image<f64> {
    fourier_texture(width, height, 6.0, 24.0, &mut rng(seed))
}

/// Mean (dx, dy) and mean magnitude away from a `border`-pixel frame.
pub fn interior_mean(f: &FlowField<f64>, border: usize) -> (f64, f64, f64) {
    let (mut su, mut sv, mut sm, mut n) = (0.0, 0.0, 0.0, 0.0);
    for y in border..f.height - border {
        for x in border..f.width - border {
            let i = y * f.width + x;
            su += f.dx[i];
            sv += f.dy[i];
            sm += f.dx[i].hypot(f.dy[i]);
            n += 1.0;
        }
    }
    (su / n, sv / n, sm / n)
}

/// Angle in degrees between two nonzero vectors.
pub fn angle_deg(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dot = a.0 * b.0 + a.1 * b.1;
    let c = dot / (a.0.hypot(a.1) * b.0.hypot(b.1));
    c.clamp(-1.0, 1.0).acos().to_degrees()
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}
