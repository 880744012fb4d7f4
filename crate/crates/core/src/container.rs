//! Binary lattice container, CSV and PGM export.
//!
//! Container layout, all little-endian:
//!
//! | field | type |
//! |---|---|
//! | magic `STFP` | 4 bytes |
//! | version | u16 |
//! | kind (1 power, 2 complex lattice, 3 signal) | u8 |
//! | flags (bit 0: mask present) | u8 |
//! | M, K | u64, u64 |
//! | dt, T | f64, f64 |
//! | hop | u64 |
//! | descriptor length, UTF-8 descriptor | u32, bytes |
//! | payload, row-major | `M*K` f64, or `M*K` (re, im) pairs |
//! | mask run count, run lengths starting with `false` | u64, u64 each |

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;

use crate::ambiguity::AmbiguityGrid;
use crate::error::{Error, Result};
use crate::grid::{Grid, Signal};
use crate::stft::Measurement;

pub const MAGIC: &[u8; 4] = b"STFP";
pub const VERSION: u16 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Kind {
    Power = 1,
    Lattice = 2,
    Signal = 3,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Real(Array2<f64>),
    Complex(Array2<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Container {
    pub kind: Kind,
    pub grid: Grid,
    pub descriptor: String,
    pub payload: Payload,
    pub mask: Option<Array2<bool>>,
}

impl Container {
    pub fn from_measurement(m: &Measurement) -> Self {
        Container {
            kind: Kind::Power,
            grid: m.grid,
            descriptor: m.window_id.clone(),
            payload: Payload::Real(m.power.clone()),
            mask: None,
        }
    }

    pub fn from_ambiguity(a: &AmbiguityGrid, descriptor: &str) -> Self {
        Container {
            kind: Kind::Lattice,
            grid: a.grid,
            descriptor: descriptor.to_string(),
            payload: Payload::Complex(a.values.clone()),
            mask: a.mask.clone(),
        }
    }

    pub fn from_signal(s: &Signal, descriptor: &str) -> Self {
        let values = Array2::from_shape_vec((1, s.values().len()), s.values().to_vec()).expect("one row");
        Container {
            kind: Kind::Signal,
            grid: *s.grid(),
            descriptor: descriptor.to_string(),
            payload: Payload::Complex(values),
            mask: None,
        }
    }

    pub fn into_measurement(self) -> Result<Measurement> {
        match (self.kind, self.payload) {
            (Kind::Power, Payload::Real(power)) => {
                Ok(Measurement { grid: self.grid, window_id: self.descriptor, power, noise: None })
            }
            _ => Err(Error::Malformed("container does not hold a power matrix".into())),
        }
    }

    pub fn into_ambiguity(self) -> Result<AmbiguityGrid> {
        match (self.kind, self.payload) {
            (Kind::Lattice, Payload::Complex(values)) => {
                let mut a = AmbiguityGrid::new(self.grid, values)?;
                a.mask = self.mask;
                Ok(a)
            }
            _ => Err(Error::Malformed("container does not hold a complex lattice".into())),
        }
    }

    pub fn into_signal(self) -> Result<Signal> {
        match (self.kind, self.payload) {
            (Kind::Signal, Payload::Complex(values)) => Signal::new(self.grid, values.into_iter().collect()),
            _ => Err(Error::Malformed("container does not hold a signal".into())),
        }
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        let (rows, cols) = match &self.payload {
            Payload::Real(a) => a.dim(),
            Payload::Complex(a) => a.dim(),
        };
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&[self.kind as u8, u8::from(self.mask.is_some())])?;
        for v in [rows as u64, cols as u64] {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&self.grid.dt().to_le_bytes())?;
        w.write_all(&self.grid.half_width().to_le_bytes())?;
        w.write_all(&(self.grid.hop() as u64).to_le_bytes())?;
        let desc = self.descriptor.as_bytes();
        let desc_len = u32::try_from(desc.len()).map_err(|_| Error::InvalidParameter("descriptor too long".into()))?;
        w.write_all(&desc_len.to_le_bytes())?;
        w.write_all(desc)?;
        match &self.payload {
            Payload::Real(a) => {
                for v in a.iter() {
                    w.write_all(&v.to_le_bytes())?;
                }
            }
            Payload::Complex(a) => {
                for v in a.iter() {
                    w.write_all(&v.re.to_le_bytes())?;
                    w.write_all(&v.im.to_le_bytes())?;
                }
            }
        }
        if let Some(mask) = &self.mask {
            let runs = run_lengths(mask.iter().copied());
            w.write_all(&(runs.len() as u64).to_le_bytes())?;
            for r in runs {
                w.write_all(&r.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(truncated)?;
        if &magic != MAGIC {
            return Err(Error::UnsupportedFormat("not a lattice container".into()));
        }
        let version = u16::from_le_bytes(read_array(r)?);
        if version != VERSION {
            return Err(Error::UnsupportedFormat(format!("container version {version}")));
        }
        let [kind, flags] = read_array::<2>(r)?;
        let kind = match kind {
            1 => Kind::Power,
            2 => Kind::Lattice,
            3 => Kind::Signal,
            other => return Err(Error::Malformed(format!("unknown container kind {other}"))),
        };
        let rows = read_u64(r)? as usize;
        let cols = read_u64(r)? as usize;
        let dt = f64::from_le_bytes(read_array(r)?);
        let half_width = f64::from_le_bytes(read_array(r)?);
        let hop = read_u64(r)? as usize;
        let len = (2.0 * half_width / dt).round() as usize;
        let bins = if kind == Kind::Signal { len } else { rows };
        let grid = Grid::new(half_width, len, hop, bins)?;
        let desc_len = u32::from_le_bytes(read_array(r)?) as usize;
        let mut desc = vec![0u8; desc_len];
        r.read_exact(&mut desc).map_err(truncated)?;
        let descriptor = String::from_utf8(desc).map_err(|_| Error::Malformed("descriptor is not UTF-8".into()))?;
        let count = rows.checked_mul(cols).ok_or_else(|| Error::Malformed("payload size overflows".into()))?;
        let payload = if kind == Kind::Power {
            let values = (0..count).map(|_| Ok(f64::from_le_bytes(read_array(r)?))).collect::<Result<Vec<_>>>()?;
            Payload::Real(Array2::from_shape_vec((rows, cols), values).expect("sized"))
        } else {
            let values = (0..count)
                .map(|_| Ok(Complex64::new(f64::from_le_bytes(read_array(r)?), f64::from_le_bytes(read_array(r)?))))
                .collect::<Result<Vec<_>>>()?;
            Payload::Complex(Array2::from_shape_vec((rows, cols), values).expect("sized"))
        };
        let mask = if flags & 1 == 1 {
            let runs = (0..read_u64(r)?).map(|_| read_u64(r)).collect::<Result<Vec<_>>>()?;
            let bits = expand_runs(&runs, count)?;
            Some(Array2::from_shape_vec((rows, cols), bits).expect("sized"))
        } else {
            None
        };
        Ok(Container { kind, grid, descriptor, payload, mask })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let mut r = std::io::BufReader::new(File::open(path)?);
        Self::read_from(&mut r)
    }
}

fn truncated(e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        Error::Malformed("container is truncated".into())
    } else {
        Error::Io(e)
    }
}

fn read_array<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf).map_err(truncated)?;
    Ok(buf)
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    Ok(u64::from_le_bytes(read_array(r)?))
}

/// Alternating run lengths, the first counting `false` values (possibly zero).
pub fn run_lengths(bits: impl Iterator<Item = bool>) -> Vec<u64> {
    let mut runs = vec![0u64];
    let mut current = false;
    for b in bits {
        if b != current {
            runs.push(0);
            current = b;
        }
        *runs.last_mut().expect("non-empty") += 1;
    }
    runs
}

pub fn expand_runs(runs: &[u64], count: usize) -> Result<Vec<bool>> {
    let mut bits = Vec::with_capacity(count);
    for (i, &r) in runs.iter().enumerate() {
        if bits.len() as u64 + r > count as u64 {
            return Err(Error::Malformed("mask runs exceed the lattice size".into()));
        }
        bits.extend(std::iter::repeat(i % 2 == 1).take(r as usize));
    }
    if bits.len() != count {
        return Err(Error::Malformed("mask runs do not cover the lattice".into()));
    }
    Ok(bits)
}

fn csv_writer(path: impl AsRef<Path>) -> Result<csv::Writer<File>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_path(path)
        .map_err(csv_error)
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Malformed(format!("{other:?}")),
    }
}

/// `index,t,re,im` per sample.
pub fn write_signal_csv(signal: &Signal, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["index", "t", "re", "im"]).map_err(csv_error)?;
    for (l, v) in signal.values().iter().enumerate() {
        let t = signal.grid().time(l);
        w.write_record([l.to_string(), t.to_string(), v.re.to_string(), v.im.to_string()]).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Matrix with a header row of shift positions and a leading frequency column.
pub fn write_matrix_csv(grid: &Grid, values: &Array2<f64>, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv_writer(path)?;
    let header = std::iter::once("y\\x".to_string()).chain((0..values.ncols()).map(|k| grid.shift(k).to_string()));
    w.write_record(header).map_err(csv_error)?;
    for (m, row) in values.outer_iter().enumerate() {
        let record = std::iter::once(grid.freq(m).to_string()).chain(row.iter().map(|v| v.to_string()));
        w.write_record(record).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Arbitrary table of string fields; quoting follows RFC 4180.
pub fn write_table_csv<S: AsRef<str>>(header: &[&str], rows: &[Vec<S>], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(row.iter().map(|s| s.as_ref())).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn write_pgm(width: usize, height: usize, pixels: &[u8], path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{width} {height}\n255\n")?;
    w.write_all(pixels)?;
    w.flush()?;
    Ok(())
}

/// Rows are emitted top to bottom in decreasing `y`.
fn flipped<T: Copy>(values: &Array2<T>, f: impl Fn(T) -> u8) -> Vec<u8> {
    values.outer_iter().rev().flat_map(|row| row.iter().map(|&v| f(v)).collect::<Vec<_>>()).collect()
}

/// 8-bit log-magnitude heatmap normalized to the image maximum, floored at 1e-12.
pub fn write_log_pgm(magnitudes: &Array2<f64>, path: impl AsRef<Path>) -> Result<()> {
    const FLOOR: f64 = 1e-12;
    let peak = magnitudes.iter().copied().fold(0.0, f64::max);
    let span = -FLOOR.log10();
    let pixels = flipped(magnitudes, |v| {
        if peak <= 0.0 {
            return 0;
        }
        let level = (v.abs() / peak).max(FLOOR).log10();
        (255.0 * (level + span) / span).round().clamp(0.0, 255.0) as u8
    });
    write_pgm(magnitudes.ncols(), magnitudes.nrows(), &pixels, path)
}

pub fn write_mask_pgm(mask: &Array2<bool>, path: impl AsRef<Path>) -> Result<()> {
    let pixels = flipped(mask, |b| if b { 255 } else { 0 });
    write_pgm(mask.ncols(), mask.nrows(), &pixels, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    #[test]
    fn runs_round_trip() {
        let bits = vec![true, true, false, true, false, false, false];
        let runs = run_lengths(bits.iter().copied());
        assert_eq!(runs, vec![0, 2, 1, 1, 3]);
        assert_eq!(expand_runs(&runs, bits.len()).unwrap(), bits);
        assert!(expand_runs(&runs, 5).is_err());
        assert_eq!(run_lengths(std::iter::empty()), vec![0]);
    }

    #[test]
    fn lattice_round_trip_with_mask() {
        let grid = Grid::square(2.0, 8).unwrap();
        let values = Array2::from_shape_fn((8, 8), |(m, k)| Complex64::new(m as f64, -(k as f64)));
        let mask = Array2::from_shape_fn((8, 8), |(m, k)| (m + k) % 3 == 0);
        let a = AmbiguityGrid::new(grid, values).unwrap().masked(mask).unwrap();
        let mut buf = Vec::new();
        Container::from_ambiguity(&a, "test").write_to(&mut buf).unwrap();
        let back = Container::read_from(&mut Cursor::new(buf)).unwrap();
        assert_eq!(back.descriptor, "test");
        assert_eq!(back.into_ambiguity().unwrap(), a);
    }

    #[test]
    fn non_square_measurement_round_trip() {
        let grid = Grid::new(1.0, 8, 2, 6).unwrap();
        let m = Measurement {
            grid,
            window_id: "w".into(),
            power: Array2::from_shape_fn((6, 4), |(m, k)| (m * 4 + k) as f64),
            noise: None,
        };
        let mut buf = Vec::new();
        Container::from_measurement(&m).write_to(&mut buf).unwrap();
        let back = Container::read_from(&mut Cursor::new(buf)).unwrap().into_measurement().unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn truncated_container_is_malformed() {
        let grid = Grid::square(2.0, 8).unwrap();
        let s = Signal::zeros(grid);
        let mut buf = Vec::new();
        Container::from_signal(&s, "s").write_to(&mut buf).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(matches!(Container::read_from(&mut Cursor::new(buf)), Err(Error::Malformed(_))));
        assert!(matches!(
            Container::read_from(&mut Cursor::new(b"NOPE".to_vec())),
            Err(Error::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn pgm_header_and_size() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.pgm");
        write_mask_pgm(&Array2::from_elem((3, 5), true), &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert!(bytes.starts_with(b"P5\n5 3\n255\n"));
        assert_eq!(bytes.len(), 11 + 15);
    }
}
