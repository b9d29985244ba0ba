//! Binary container for amplitude tensors.
//!
//! Layout, all little-endian:
//!
//! | field            | type            |
//! |------------------|-----------------|
//! | magic            | 8 bytes `WGAJSA\0\0` |
//! | version          | u32 (= 1)       |
//! | flags            | u32, bit 0 = normalised |
//! | axis lengths     | 4 × u64: ωs, ωi, ks, ki |
//! | axis values      | f64 per axis entry, axes in the same order |
//! | data             | (re, im) f64 pairs, row-major over (ωs, ωi, ks, ki) |
//!
//! Slabs that are not stored are written as zeros.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::jsa::{JsaTensor, SlabTensor};

pub const MAGIC: [u8; 8] = *b"WGAJSA\0\0";
pub const VERSION: u32 = 1;

pub fn write_tensor<W: Write>(jsa: &JsaTensor, mut out: W) -> Result<()> {
    let grid = jsa.grid();
    let [ms, mi, n, _] = jsa.values().dims();
    out.write_all(&MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&u32::from(jsa.is_normalized()).to_le_bytes())?;
    for len in [ms, mi, n, n] {
        out.write_all(&(len as u64).to_le_bytes())?;
    }
    for axis in [grid.omega_s(), grid.omega_i(), grid.k(), grid.k()] {
        for v in axis {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    let zeros = vec![0u8; 16 * n * n];
    let mut buf = Vec::with_capacity(16 * n * n);
    for is in 0..ms {
        for ii in 0..mi {
            match jsa.values().slab(is, ii) {
                Some(slab) => {
                    buf.clear();
                    for v in slab {
                        buf.extend_from_slice(&v.re.to_le_bytes());
                        buf.extend_from_slice(&v.im.to_le_bytes());
                    }
                    out.write_all(&buf)?;
                }
                None => out.write_all(&zeros)?,
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn read_array<const K: usize, R: Read>(input: &mut R) -> Result<[u8; K]> {
    let mut b = [0u8; K];
    input
        .read_exact(&mut b)
        .map_err(|e| Error::Format(format!("truncated header: {e}")))?;
    Ok(b)
}

fn read_f64s<R: Read>(input: &mut R, count: usize) -> Result<Vec<f64>> {
    (0..count)
        .map(|_| read_array::<8, R>(input).map(f64::from_le_bytes))
        .collect()
}

/// Reads a container; slabs that are entirely zero are not stored.
pub fn read_tensor<R: Read>(mut input: R) -> Result<JsaTensor> {
    if read_array::<8, R>(&mut input)? != MAGIC {
        return Err(Error::Format("not an amplitude tensor container (bad magic)".into()));
    }
    let version = u32::from_le_bytes(read_array::<4, R>(&mut input)?);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported container version {version}")));
    }
    let flags = u32::from_le_bytes(read_array::<4, R>(&mut input)?);
    let mut dims = [0usize; 4];
    for d in &mut dims {
        let v = u64::from_le_bytes(read_array::<8, R>(&mut input)?);
        *d = usize::try_from(v).map_err(|_| Error::Format(format!("axis length {v} too large")))?;
    }
    let [ms, mi, nk, nk2] = dims;
    if nk != nk2 {
        return Err(Error::Format(format!("momentum axes differ in length ({nk} vs {nk2})")));
    }
    if ms.checked_mul(mi).and_then(|s| s.checked_mul(nk * nk)).is_none() || ms * mi * nk * nk > 1 << 34 {
        return Err(Error::Format("tensor dimensions are implausibly large".into()));
    }
    let omega_s = read_f64s(&mut input, ms)?;
    let omega_i = read_f64s(&mut input, mi)?;
    let ks = read_f64s(&mut input, nk)?;
    let ki = read_f64s(&mut input, nk)?;
    let grid = Grid::new(omega_s, omega_i, nk).map_err(|e| Error::Format(format!("invalid axes: {e}")))?;
    if ks != grid.k() || ki != grid.k() {
        return Err(Error::Format("momentum axes do not match the channel count".into()));
    }
    let block = nk * nk;
    let mut raw = vec![0u8; 16 * block];
    let mut slabs = Vec::with_capacity(ms * mi);
    for _ in 0..ms * mi {
        input
            .read_exact(&mut raw)
            .map_err(|e| Error::Format(format!("truncated data: {e}")))?;
        if raw.iter().all(|&b| b == 0) {
            slabs.push(None);
            continue;
        }
        let slab: Vec<Complex64> = raw
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
                let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
                Complex64::new(re, im)
            })
            .collect();
        slabs.push(Some(slab.into_boxed_slice()));
    }
    let values = SlabTensor::from_slabs(grid, slabs)?;
    Ok(JsaTensor::new(values).with_normalized_flag(flags & 1 == 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let grid = Grid::new(vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0], 3).unwrap();
        let mut values = vec![Complex64::new(0.0, 0.0); 81];
        for (j, v) in values.iter_mut().enumerate().skip(9) {
            *v = Complex64::new(j as f64 * 0.5, -(j as f64));
        }
        let jsa = JsaTensor::from_dense(grid, &values).unwrap();
        let mut bytes = Vec::new();
        write_tensor(&jsa, &mut bytes).unwrap();
        assert_eq!(bytes.len(), 8 + 4 + 4 + 32 + 8 * 12 + 16 * 81);
        let back = read_tensor(bytes.as_slice()).unwrap();
        assert_eq!(back.to_dense(), values);
        assert_eq!(back.values().stored_slabs(), 8);
        assert!(!back.is_normalized());
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(read_tensor(&b"nonsense"[..]), Err(Error::Format(_))));
        let mut bytes = MAGIC.to_vec();
        bytes.extend_from_slice(&7u32.to_le_bytes());
        assert!(matches!(read_tensor(bytes.as_slice()), Err(Error::Format(_))));
    }
}
