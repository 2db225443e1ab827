//! Binary field snapshots.
//!
//! Layout (all integers and floats little-endian):
//!
//! | offset | size | content                                   |
//! |--------|------|-------------------------------------------|
//! | 0      | 4    | magic `NLSF`                              |
//! | 4      | 4    | format version, `u32` (currently 1)       |
//! | 8      | 4    | `dim`, `u32`                              |
//! | 12     | 4    | `points_per_axis`, `u32`                  |
//! | 16     | 8    | `box_length`, `f64`                       |
//! | 24     | 1    | space tag: 0 physical, 1 spectral         |
//! | 25     | 7    | zero padding                              |
//! | 32     | 16 n | `n = points_per_axis^dim` pairs `(re, im)` of `f64` |
//!
//! Values are stored row-major with axis order `(x1, ..., x_dim)`, last axis
//! fastest; spectral values use the same storage order as the FFT
//! (nonnegative frequencies first).

use std::io::{Read, Write};

use num_complex::Complex64;

use super::field::{Field, Space};
use super::grid::Grid;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"NLSF";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 32;

pub fn write_snapshot<W: Write>(field: &Field, mut w: W) -> Result<()> {
    let g = field.grid();
    let mut header = [0u8; HEADER_LEN];
    header[0..4].copy_from_slice(MAGIC);
    header[4..8].copy_from_slice(&VERSION.to_le_bytes());
    header[8..12].copy_from_slice(&(g.dim() as u32).to_le_bytes());
    header[12..16].copy_from_slice(&(g.points_per_axis() as u32).to_le_bytes());
    header[16..24].copy_from_slice(&g.box_length().to_le_bytes());
    header[24] = match field.space() {
        Space::Physical => 0,
        Space::Spectral => 1,
    };
    w.write_all(&header)?;
    let mut buf = Vec::with_capacity(field.values().len() * 16);
    for z in field.values() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_snapshot<R: Read>(mut r: R) -> Result<Field> {
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header)?;
    if &header[0..4] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(header[o..o + 4].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let grid = Grid::new(
        u32_at(8) as usize,
        u32_at(12) as usize,
        f64::from_le_bytes(header[16..24].try_into().unwrap()),
    )?;
    let space = match header[24] {
        0 => Space::Physical,
        1 => Space::Spectral,
        t => return Err(Error::Format(format!("unknown space tag {t}"))),
    };
    let mut buf = vec![0u8; grid.len() * 16];
    r.read_exact(&mut buf)?;
    let values = buf
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[0..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..16].try_into().unwrap()),
            )
        })
        .collect();
    Field::new(grid, values, space)
}

pub fn save_snapshot(field: &Field, path: &std::path::Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    write_snapshot(field, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_snapshot(path: &std::path::Path) -> Result<Field> {
    let file = std::fs::File::open(path)?;
    read_snapshot(std::io::BufReader::new(file))
}
