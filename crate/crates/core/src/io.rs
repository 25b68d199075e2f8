//! Flat binary field files.
//!
//! Layout, all little-endian: magic `TFWF`, `u32` format version, `u32` d,
//! `u64` n, nine `f64` cell-matrix entries (row-major), then `n^d` `f64`
//! values in row-major grid order.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::grid::{Cell, Grid, GridSpec, ScalarField};

const MAGIC: &[u8; 4] = b"TFWF";
const VERSION: u32 = 1;

fn io_err(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_field(out: &mut impl Write, f: &ScalarField) -> Result<()> {
    let spec = f.grid.spec();
    let mut buf = Vec::with_capacity(92 + 8 * f.values.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(spec.d() as u32).to_le_bytes());
    buf.extend_from_slice(&(spec.n as u64).to_le_bytes());
    for row in &spec.cell.matrix {
        for v in row {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    for v in &f.values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf).map_err(io_err)
}

pub fn read_field(input: &mut impl Read) -> Result<ScalarField> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes).map_err(io_err)?;
    let mut pos = 0;
    let mut take = |k: usize| -> Result<&[u8]> {
        let s = bytes.get(pos..pos + k).ok_or_else(|| Error::Io("truncated field file".into()))?;
        pos += k;
        Ok(s)
    };
    if take(4)? != MAGIC {
        return Err(Error::Io("not a field file".into()));
    }
    let version = u32::from_le_bytes(take(4)?.try_into().unwrap());
    if version != VERSION {
        return Err(Error::Io(format!("unsupported field format version {version}")));
    }
    let d = u32::from_le_bytes(take(4)?.try_into().unwrap()) as usize;
    let n = u64::from_le_bytes(take(8)?.try_into().unwrap()) as usize;
    let mut matrix = [[0.0; 3]; 3];
    for row in &mut matrix {
        for v in row.iter_mut() {
            *v = f64::from_le_bytes(take(8)?.try_into().unwrap());
        }
    }
    let grid = Grid::new(GridSpec::new(Cell::new(d, matrix)?, n)?);
    let values = (0..grid.len()).map(|_| Ok(f64::from_le_bytes(take(8)?.try_into().unwrap()))).collect::<Result<Vec<f64>>>()?;
    if pos != bytes.len() {
        return Err(Error::Io(format!("{} trailing bytes in field file", bytes.len() - pos)));
    }
    grid.field(values)
}

/// Points of the line along `axis` through grid index `through`, as
/// `(coordinate along the axis, value)`.
pub fn line_slice(f: &ScalarField, axis: usize, through: [usize; 3]) -> Result<Vec<(f64, f64)>> {
    let spec = f.grid.spec();
    if axis >= spec.d() {
        return Err(Error::InvalidGrid(format!("axis {axis} outside dimension {}", spec.d())));
    }
    let len = f.grid.cell().edge_length(axis);
    Ok((0..spec.n)
        .map(|k| {
            let mut mi = through;
            for (a, m) in mi.iter_mut().enumerate() {
                *m = if a < spec.d() { *m % spec.n } else { 0 };
            }
            mi[axis] = k;
            (k as f64 * len / spec.n as f64, f.values[spec.flat_index(mi)])
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let cell = Cell::new(2, [[2.0, 0.3, 0.0], [0.0, 1.5, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        let grid = Grid::new(GridSpec::new(cell, 8).unwrap());
        let f = grid.sample(|x| (x[0] * 3.1).sin() + x[1] * 1e-300);
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        assert_eq!(buf.len(), 92 + 8 * 64);
        assert_eq!(read_field(&mut buf.as_slice()).unwrap(), f);
        assert!(read_field(&mut &buf[..buf.len() - 1]).is_err());
    }

    #[test]
    fn slice_follows_axis() {
        let grid = Grid::new(GridSpec::new(Cell::cubic(2, 4.0).unwrap(), 8).unwrap());
        let f = grid.sample(|x| x[1]);
        let s = line_slice(&f, 1, [3, 0, 0]).unwrap();
        assert!(s.iter().all(|(c, v)| (c - v).abs() < 1e-12));
    }
}
