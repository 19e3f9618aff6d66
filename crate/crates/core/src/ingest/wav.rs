//! RIFF/WAVE reader and writer for 16-bit integer PCM.

use super::IngestError;
use crate::scalar::Real;

/// Decoded PCM audio. Multi-channel data stays interleaved.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioSignal<T = f64> {
    pub samples: Vec<T>,
    pub sample_rate: u32,
    pub channels: u16,
}

impl<T: Real> AudioSignal<T> {
    pub fn new(samples: Vec<T>, sample_rate: u32, channels: u16) -> Self {
        Self {
            samples,
            sample_rate,
            channels,
        }
    }

    pub fn mono(samples: Vec<T>, sample_rate: u32) -> Self {
        Self {
            samples,
            sample_rate,
            channels: 1,
        }
    }

    /// Samples per channel.
    pub fn frames(&self) -> usize {
        self.samples.len() / usize::from(self.channels.max(1))
    }

    pub fn duration_s(&self) -> f64 {
        self.frames() as f64 / f64::from(self.sample_rate)
    }

    /// Samples of one channel, de-interleaved.
    pub fn channel(&self, index: usize) -> Vec<T> {
        let c = usize::from(self.channels);
        self.samples.iter().skip(index).step_by(c).copied().collect()
    }
}

const PCM_FORMAT: u16 = 1;

fn read_u16(bytes: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([bytes[at], bytes[at + 1]])
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]])
}

/// Parses a RIFF/WAVE file holding 16-bit PCM. Samples are scaled by 1/32768.
pub fn parse_wav(bytes: &[u8]) -> Result<AudioSignal<f64>, IngestError> {
    let malformed = |offset: usize, reason: &str| IngestError::Wav {
        offset,
        reason: reason.to_owned(),
    };
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" {
        return Err(malformed(0, "malformed RIFF header"));
    }
    if &bytes[8..12] != b"WAVE" {
        return Err(malformed(8, "malformed RIFF header: missing WAVE form type"));
    }

    let mut pos = 12;
    let mut format: Option<(u16, u32)> = None;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = read_u32(bytes, pos + 4) as usize;
        let body = pos + 8;
        match id {
            b"fmt " => {
                if size < 16 || body + 16 > bytes.len() {
                    return Err(malformed(pos, "truncated fmt chunk"));
                }
                let tag = read_u16(bytes, body);
                if tag != PCM_FORMAT {
                    return Err(malformed(body, &format!("non-PCM format tag {tag}")));
                }
                let channels = read_u16(bytes, body + 2);
                let rate = read_u32(bytes, body + 4);
                let bits = read_u16(bytes, body + 14);
                if bits != 16 {
                    return Err(malformed(body + 14, &format!("bit depth {bits} != 16")));
                }
                if channels == 0 {
                    return Err(malformed(body + 2, "zero channels"));
                }
                if rate == 0 {
                    return Err(malformed(body + 4, "zero sample rate"));
                }
                format = Some((channels, rate));
            }
            b"data" => {
                let (channels, sample_rate) = format.ok_or_else(|| malformed(pos, "data chunk before fmt chunk"))?;
                if body + size > bytes.len() {
                    return Err(malformed(
                        bytes.len(),
                        &format!("truncated data chunk: declared {size} bytes"),
                    ));
                }
                let block = 2 * usize::from(channels);
                if !size.is_multiple_of(block) {
                    return Err(malformed(body + size, "truncated data chunk: partial frame"));
                }
                let samples: Vec<f64> = bytes[body..body + size]
                    .chunks_exact(2)
                    .map(|b| f64::from(i16::from_le_bytes([b[0], b[1]])) / 32768.0)
                    .collect();
                if samples.is_empty() {
                    return Err(malformed(body, "empty data chunk"));
                }
                return Ok(AudioSignal::<f64> {
                    samples,
                    sample_rate,
                    channels,
                });
            }
            _ => {}
        }
        // chunks are word aligned
        pos = body + size + (size & 1);
    }
    Err(malformed(pos.min(bytes.len()), "missing data chunk"))
}

/// Encodes 16-bit PCM. Samples are quantised as `round(x * 32768)` and
/// clamped to the `i16` range.
pub fn write_wav<T: Real>(signal: &AudioSignal<T>) -> Vec<u8> {
    let data_len = signal.samples.len() * 2;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&PCM_FORMAT.to_le_bytes());
    out.extend_from_slice(&signal.channels.to_le_bytes());
    out.extend_from_slice(&signal.sample_rate.to_le_bytes());
    let block = 2 * u32::from(signal.channels);
    out.extend_from_slice(&(signal.sample_rate * block).to_le_bytes());
    out.extend_from_slice(&(block as u16).to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &s in &signal.samples {
        let q = (s.as_f64() * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        out.extend_from_slice(&q.to_le_bytes());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_format_tag(tag: u16) -> Vec<u8> {
        let mut b = write_wav(&AudioSignal::mono(vec![0.0_f64, 0.5], 44_100));
        b[20..22].copy_from_slice(&tag.to_le_bytes());
        b
    }

    #[test]
    fn two_mono_samples() {
        let mut bytes = write_wav(&AudioSignal::mono(vec![0.0_f64, 0.5], 44_100));
        assert_eq!(&bytes[44..48], &[0, 0, 0, 0x40]);
        let s = parse_wav(&bytes).unwrap();
        assert_eq!(s.samples, vec![0.0, 0.5]);
        assert_eq!((s.sample_rate, s.channels), (44_100, 1));
        bytes.truncate(46);
        match parse_wav(&bytes) {
            Err(IngestError::Wav { reason, .. }) => assert!(reason.contains("truncated data chunk")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn stereo_interleaving() {
        let sig = AudioSignal {
            samples: vec![0.25_f64, -0.25, 0.5, -0.5],
            sample_rate: 8000,
            channels: 2,
        };
        let s = parse_wav(&write_wav(&sig)).unwrap();
        assert_eq!(s.channels, 2);
        assert_eq!(s.frames(), 2);
        assert_eq!(s.channel(1), vec![-0.25, -0.5]);
    }

    #[test]
    fn rejects_float_format() {
        match parse_wav(&with_format_tag(3)) {
            Err(IngestError::Wav { offset, reason }) => {
                assert_eq!(offset, 20);
                assert!(reason.contains("non-PCM format tag"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_header_and_depth() {
        assert!(matches!(
            parse_wav(b"RIFX0000WAVE"),
            Err(IngestError::Wav { offset: 0, .. })
        ));
        let mut b = write_wav(&AudioSignal::mono(vec![0.0_f64], 8000));
        b[34..36].copy_from_slice(&24u16.to_le_bytes());
        match parse_wav(&b) {
            Err(IngestError::Wav { reason, .. }) => assert!(reason.contains("bit depth")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn skips_unknown_chunks() {
        let plain = write_wav(&AudioSignal::mono(vec![0.125_f64, -1.0], 22_050));
        let mut b = plain[..36].to_vec();
        b.extend_from_slice(b"LIST");
        b.extend_from_slice(&3u32.to_le_bytes());
        b.extend_from_slice(&[1, 2, 3, 0]);
        b.extend_from_slice(&plain[36..]);
        let s = parse_wav(&b).unwrap();
        assert_eq!(s.samples, vec![0.125, -1.0]);
    }
}
