//! Flat little-endian binary formats for grid operators and phase-space
//! fields.
//!
//! Both formats share the header `u64 M, f64 L, f64 ℏ, u64 d` (points per
//! axis, half-width, effective Planck constant, dimension). A field follows
//! with M·M real values row-major; an operator with M·M complex kernel
//! entries row-major as (re, im) pairs. Fields written here round-trip with
//! [`PhaseField::write_binary`].

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use num_complex::Complex64 as C64;
use opspace::grid::{Grid, GridOperator};
use opspace::linalg::CMat;
use opspace::phasespace::PhaseField;
use opspace::SemiclassicalParam;

struct Header {
    points_per_axis: usize,
    half_width: f64,
    param: SemiclassicalParam,
}

const HEADER_LEN: usize = 4 * 8;

fn read_header(bytes: &[u8], path: &Path) -> Result<Header> {
    if bytes.len() < HEADER_LEN {
        bail!("{}: truncated header ({} bytes)", path.display(), bytes.len());
    }
    let word = |i: usize| -> [u8; 8] { bytes[8 * i..8 * (i + 1)].try_into().unwrap() };
    let m = u64::from_le_bytes(word(0));
    let half_width = f64::from_le_bytes(word(1));
    let hbar = f64::from_le_bytes(word(2));
    let dim = u64::from_le_bytes(word(3));
    if dim != 1 {
        bail!("{}: only d = 1 files are supported, got d = {dim}", path.display());
    }
    let param = SemiclassicalParam::new(hbar)
        .with_context(|| format!("{}: bad hbar in header", path.display()))?;
    Ok(Header {
        points_per_axis: m as usize,
        half_width,
        param,
    })
}

fn write_header(w: &mut impl Write, grid: &Grid, param: SemiclassicalParam) -> Result<()> {
    w.write_all(&(grid.points_per_axis() as u64).to_le_bytes())?;
    w.write_all(&grid.half_width().to_le_bytes())?;
    w.write_all(&param.hbar().to_le_bytes())?;
    w.write_all(&(grid.dim() as u64).to_le_bytes())?;
    Ok(())
}

fn payload_f64(bytes: &[u8], count: usize, path: &Path) -> Result<Vec<f64>> {
    let want = HEADER_LEN + 8 * count;
    if bytes.len() != want {
        bail!(
            "{}: expected {} bytes for this header, found {}",
            path.display(),
            want,
            bytes.len()
        );
    }
    Ok(bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

/// Read a phase-space field written by [`PhaseField::write_binary`].
pub fn read_field(path: &Path) -> Result<PhaseField> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let header = read_header(&bytes, path)?;
    let m = header.points_per_axis;
    let data = payload_f64(&bytes, m * m, path)?;
    let grid = Grid::new(header.half_width, m, 1)?;
    let values = opspace::linalg::RMat::from_fn(m, m, |j, c| data[j * m + c]);
    Ok(PhaseField::new(values, grid, header.param)?)
}

/// Read a grid operator (complex kernel) in the paired-real format.
pub fn read_operator(path: &Path) -> Result<GridOperator> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let header = read_header(&bytes, path)?;
    let m = header.points_per_axis;
    let data = payload_f64(&bytes, 2 * m * m, path)?;
    let grid = Grid::new(header.half_width, m, 1)?;
    let kernel = CMat::from_fn(m, m, |a, b| {
        let at = 2 * (a * m + b);
        C64::new(data[at], data[at + 1])
    });
    Ok(GridOperator::new(kernel, grid, header.param)?)
}

/// Write a grid operator in the paired-real format read by [`read_operator`].
pub fn write_operator(op: &GridOperator, path: &Path) -> Result<()> {
    let mut w = std::io::BufWriter::new(
        fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
    );
    write_header(&mut w, &op.grid, op.param)?;
    let m = op.grid.points_per_axis();
    for a in 0..m {
        for b in 0..m {
            let v = op.kernel[(a, b)];
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
    }
    Ok(())
}
