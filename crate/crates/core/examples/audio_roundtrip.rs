//! Recovers a crop of the bundled plucked-string clip from five Hermite
//! spectrograms and writes both the crop and the recovery as WAV files.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use stft_phase::audio::{read_wav, write_wav};
use stft_phase::prelude::*;

fn main() -> stft_phase::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("audio_roundtrip"));
    std::fs::create_dir_all(&out)?;
    let clip = read_wav(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/plucks.wav"))?;
    let crop = clip.crop(1888, 1024)?;

    // T = sqrt(L) / 2 gives equal time and frequency steps.
    let len = crop.samples.len();
    let grid = Grid::square((len as f64).sqrt() / 2.0, len)?;
    let f = Signal::from_real(grid, &crop.samples)?;
    let family = build_hermite_family(&[0, 5, 10, 15, 20], &grid)?;
    let rec = run_alg2(&family.measure(&f)?, &family, &RetrievalConfig::new(1e-3, Algorithm::Alg2))?;
    let (d, theta) = misfit(&f, &rec.signal)?;
    println!("{} Hz crop of {} samples: d = {d:.4}", crop.sample_rate, crop.samples.len());

    let aligned = rec.signal.scaled(Complex64::from_polar(1.0, theta));
    write_wav(f.values(), crop.sample_rate, out.join("crop.wav"))?;
    write_wav(aligned.values(), crop.sample_rate, out.join("recovered.wav"))?;
    println!("wrote {}", out.display());
    Ok(())
}
