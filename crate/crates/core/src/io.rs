//! Binary sample files (`TWF1`) and basis caches (`TWL1`).
//!
//! Both formats are little endian. Scalars are written as `f64`, so `f64`
//! data round-trips bit for bit.
//!
//! `TWF1`: magic, `n: u64`, `R: f64`, `h: f64`, `points_per_axis: u64`,
//! `count: u64`, then `count` interleaved `(re, im)` pairs in grid order.
//!
//! `TWL1`: magic, `n`, `mu_max`, `nu_max` (`u64`), `R`, `h` (`f64`),
//! `quad_order`, `time_samples`, `rows`, `points` (`u64`), then
//! `rows * points` pairs, row by row in truncation order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special_hermite::{BasisTable, QuadratureGrid, Truncation};

pub const SAMPLE_MAGIC: &[u8; 4] = b"TWF1";
pub const BASIS_MAGIC: &[u8; 4] = b"TWL1";

/// Contents of a `TWF1` file.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleFile<T> {
    pub n: usize,
    pub radius: T,
    pub spacing: T,
    pub points_per_axis: usize,
    pub samples: Vec<Complex<T>>,
}

impl<T: Real> SampleFile<T> {
    pub fn for_grid(grid: &QuadratureGrid<T>, samples: Vec<Complex<T>>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::InvalidInput(format!("{} samples for a grid of {}", samples.len(), grid.len())));
        }
        Ok(SampleFile {
            n: grid.n(),
            radius: grid.radius(),
            spacing: grid.spacing(),
            points_per_axis: grid.points_per_axis(),
            samples,
        })
    }

    /// Errors unless the file was written on the same spatial grid.
    pub fn check_grid(&self, grid: &QuadratureGrid<T>) -> Result<()> {
        let close = |a: T, b: T| (a - b).abs() <= T::lit(1e-12) * a.abs().max(T::one());
        if self.n != grid.n()
            || self.points_per_axis != grid.points_per_axis()
            || self.samples.len() != grid.len()
            || !close(self.radius, grid.radius())
            || !close(self.spacing, grid.spacing())
        {
            return Err(Error::InvalidInput(format!(
                "sample file grid (n={}, R={}, h={}, {} points/axis) does not match configured grid \
                 (n={}, R={}, h={}, {} points/axis)",
                self.n,
                self.radius,
                self.spacing,
                self.points_per_axis,
                grid.n(),
                grid.radius(),
                grid.spacing(),
                grid.points_per_axis()
            )));
        }
        Ok(())
    }
}

struct Writer<W: Write>(W);

impl<W: Write> Writer<W> {
    fn u64(&mut self, v: u64) -> Result<()> {
        Ok(self.0.write_all(&v.to_le_bytes())?)
    }

    fn f64<T: Real>(&mut self, v: T) -> Result<()> {
        Ok(self.0.write_all(&v.to_f64_lossy().to_le_bytes())?)
    }

    fn complex<T: Real>(&mut self, values: &[Complex<T>]) -> Result<()> {
        for v in values {
            self.f64(v.re)?;
            self.f64(v.im)?;
        }
        Ok(())
    }
}

struct Reader<R: Read>(R);

impl<R: Read> Reader<R> {
    fn bytes8(&mut self, what: &str) -> Result<[u8; 8]> {
        let mut b = [0u8; 8];
        self.0.read_exact(&mut b).map_err(|e| Error::Format(format!("truncated file reading {what}: {e}")))?;
        Ok(b)
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes8(what)?))
    }

    fn usize(&mut self, what: &str) -> Result<usize> {
        usize::try_from(self.u64(what)?).map_err(|_| Error::Format(format!("{what} does not fit in usize")))
    }

    fn f64<T: Real>(&mut self, what: &str) -> Result<T> {
        let v = f64::from_le_bytes(self.bytes8(what)?);
        T::from_f64(v).ok_or_else(|| Error::Format(format!("{what} = {v} not representable")))
    }

    fn magic(&mut self, expected: &[u8; 4]) -> Result<()> {
        let mut m = [0u8; 4];
        self.0.read_exact(&mut m).map_err(|e| Error::Format(format!("missing magic: {e}")))?;
        if &m != expected {
            return Err(Error::Format(format!(
                "bad magic {:?}, expected {:?}",
                String::from_utf8_lossy(&m),
                String::from_utf8_lossy(expected)
            )));
        }
        Ok(())
    }

    fn complex<T: Real>(&mut self, count: usize) -> Result<Vec<Complex<T>>> {
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let re = self.f64("sample")?;
            let im = self.f64("sample")?;
            out.push(Complex::new(re, im));
        }
        Ok(out)
    }

    fn finish(mut self) -> Result<()> {
        let mut extra = [0u8; 1];
        match self.0.read(&mut extra)? {
            0 => Ok(()),
            _ => Err(Error::Format("trailing bytes after data".into())),
        }
    }
}

pub fn write_samples<T: Real>(path: &Path, file: &SampleFile<T>) -> Result<()> {
    let mut w = Writer(BufWriter::new(File::create(path)?));
    w.0.write_all(SAMPLE_MAGIC)?;
    w.u64(file.n as u64)?;
    w.f64(file.radius)?;
    w.f64(file.spacing)?;
    w.u64(file.points_per_axis as u64)?;
    w.u64(file.samples.len() as u64)?;
    w.complex(&file.samples)?;
    w.0.flush()?;
    Ok(())
}

pub fn read_samples<T: Real>(path: &Path) -> Result<SampleFile<T>> {
    let mut r = Reader(BufReader::new(File::open(path)?));
    r.magic(SAMPLE_MAGIC)?;
    let n = r.usize("n")?;
    let radius = r.f64("R")?;
    let spacing = r.f64("h")?;
    let points_per_axis = r.usize("points_per_axis")?;
    let count = r.usize("count")?;
    let expected = points_per_axis.checked_pow(2 * n as u32);
    if expected != Some(count) {
        return Err(Error::Format(format!(
            "count {count} does not match {points_per_axis}^{} grid points",
            2 * n
        )));
    }
    let samples = r.complex(count)?;
    r.finish()?;
    Ok(SampleFile { n, radius, spacing, points_per_axis, samples })
}

pub fn write_basis_cache<T: Real>(path: &Path, basis: &BasisTable<T>) -> Result<()> {
    let mut w = Writer(BufWriter::new(File::create(path)?));
    let grid = basis.grid();
    let t = basis.truncation();
    w.0.write_all(BASIS_MAGIC)?;
    w.u64(basis.n() as u64)?;
    w.u64(t.mu_max as u64)?;
    w.u64(t.nu_max as u64)?;
    w.f64(grid.radius())?;
    w.f64(grid.spacing())?;
    w.u64(basis.quad_order() as u64)?;
    w.u64(grid.time_samples() as u64)?;
    w.u64(basis.len() as u64)?;
    w.u64(grid.len() as u64)?;
    w.complex(basis.values())?;
    w.0.flush()?;
    Ok(())
}

/// Reads a cache written by [`write_basis_cache`]. The grid is rebuilt from
/// `(n, R, h, M)` and must reproduce the stored point count.
pub fn read_basis_cache<T: Real>(path: &Path) -> Result<BasisTable<T>> {
    let mut r = Reader(BufReader::new(File::open(path)?));
    r.magic(BASIS_MAGIC)?;
    let n = r.usize("n")?;
    let truncation = Truncation::new(r.usize("mu_max")?, r.usize("nu_max")?);
    let radius: T = r.f64("R")?;
    let spacing: T = r.f64("h")?;
    let quad_order = r.usize("quad_order")?;
    let time_samples = r.usize("time_samples")?;
    let rows = r.usize("rows")?;
    let points = r.usize("points")?;
    let grid = QuadratureGrid::new(n, radius, spacing, time_samples)?;
    if rows != truncation.count(n) || points != grid.len() {
        return Err(Error::Format(format!(
            "cache shape {rows} x {points} does not match truncation ({}, {}) on a grid of {} points",
            truncation.mu_max,
            truncation.nu_max,
            grid.len()
        )));
    }
    let values = r.complex(rows * points)?;
    r.finish()?;
    BasisTable::from_parts(n, truncation, grid, quad_order, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_hermite::build_basis;

    fn grid() -> QuadratureGrid<f64> {
        QuadratureGrid::new(1, 6.0, 0.25, 7).unwrap()
    }

    #[test]
    fn samples_round_trip() {
        let g = grid();
        let samples: Vec<Complex<f64>> = (0..g.len()).map(|k| Complex::new(k as f64 * 0.1, -(k as f64).sqrt())).collect();
        let file = SampleFile::for_grid(&g, samples).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.twf");
        write_samples(&path, &file).unwrap();
        let back: SampleFile<f64> = read_samples(&path).unwrap();
        assert_eq!(back, file);
        back.check_grid(&g).unwrap();
        assert!(back.check_grid(&QuadratureGrid::new(1, 6.0, 0.5, 7).unwrap()).is_err());
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..4], b"TWF1");
        assert_eq!(bytes.len(), 4 + 5 * 8 + 16 * g.len());
    }

    #[test]
    fn bad_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad");
        std::fs::write(&path, b"NOPE0000").unwrap();
        assert!(matches!(read_samples::<f64>(&path), Err(Error::Format(_))));
        std::fs::write(&path, b"TWF1\x01").unwrap();
        assert!(matches!(read_samples::<f64>(&path), Err(Error::Format(_))));
        assert!(matches!(read_samples::<f64>(&dir.path().join("missing")), Err(Error::Io(_))));
    }

    #[test]
    fn basis_cache_round_trip() {
        let b = build_basis(1, Truncation::new(3, 3), &grid(), 40).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.twl");
        write_basis_cache(&path, &b).unwrap();
        let back: BasisTable<f64> = read_basis_cache(&path).unwrap();
        assert_eq!(back.values(), b.values());
        assert_eq!(back.index(), b.index());
        assert_eq!(back.quad_order(), 40);
        assert_eq!(back.grid(), b.grid());
        assert_eq!(back.gram_max_deviation(), b.gram_max_deviation());
    }
}
