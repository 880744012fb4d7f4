//! Mono 16-bit PCM WAV input and output.

use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, Signal};

const FULL_SCALE: f64 = 32768.0;

/// Audio samples plus their rate, before any rescaling onto a retrieval grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Audio {
    pub sample_rate: u32,
    pub samples: Vec<f64>,
}

impl Audio {
    /// Signal on the physical grid: `dt = 1 / rate`, `T = L dt / 2`.
    ///
    /// An odd trailing sample is dropped so `L` stays even.
    pub fn to_signal(&self) -> Result<Signal> {
        let len = self.samples.len() & !1;
        if len == 0 {
            return Err(Error::Malformed("audio clip has fewer than two samples".into()));
        }
        let dt = 1.0 / self.sample_rate as f64;
        let grid = Grid::new(len as f64 * dt / 2.0, len, 1, len)?;
        Signal::from_real(grid, &self.samples[..len])
    }

    /// `len` samples starting at `offset`.
    pub fn crop(&self, offset: usize, len: usize) -> Result<Audio> {
        let end = offset.checked_add(len).filter(|&e| e <= self.samples.len()).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "crop {offset}..{} exceeds clip of {} samples",
                offset.saturating_add(len),
                self.samples.len()
            ))
        })?;
        Ok(Audio { sample_rate: self.sample_rate, samples: self.samples[offset..end].to_vec() })
    }
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<Audio> {
    let mut reader = WavReader::open(path)?;
    let spec = reader.spec();
    if spec.channels != 1 || spec.bits_per_sample != 16 || spec.sample_format != SampleFormat::Int {
        return Err(Error::UnsupportedFormat(format!(
            "expected mono 16-bit PCM, got {} channel(s), {} bits, {:?}",
            spec.channels, spec.bits_per_sample, spec.sample_format
        )));
    }
    let samples = reader
        .samples::<i16>()
        .map(|s| s.map(|v| v as f64 / FULL_SCALE))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(Audio { sample_rate: spec.sample_rate, samples })
}

/// Loads a mono PCM16 file as a signal on its physical grid.
pub fn load_wav(path: impl AsRef<Path>) -> Result<Signal> {
    read_wav(path)?.to_signal()
}

/// Writes the real part, clipped to `[-1, 1)`, at the given rate.
pub fn write_wav(samples: &[Complex64], sample_rate: u32, path: impl AsRef<Path>) -> Result<()> {
    let spec = WavSpec { channels: 1, sample_rate, bits_per_sample: 16, sample_format: SampleFormat::Int };
    let mut writer = WavWriter::create(path, spec)?;
    for v in samples {
        let q = (v.re * FULL_SCALE).round().clamp(i16::MIN as f64, i16::MAX as f64) as i16;
        writer.write_sample(q)?;
    }
    writer.finalize()?;
    Ok(())
}

/// Writes a signal whose grid step is `1 / rate`.
pub fn save_wav(signal: &Signal, path: impl AsRef<Path>) -> Result<()> {
    let rate = (1.0 / signal.grid().dt()).round();
    if !(rate >= 1.0 && rate <= u32::MAX as f64) {
        return Err(Error::InvalidParameter(format!("grid step {} is not a sample period", signal.grid().dt())));
    }
    write_wav(signal.values(), rate as u32, path)
}
