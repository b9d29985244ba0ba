//! 8-bit portable pixmaps (PGM/PPM) of 2D maps with a text sidecar that
//! records the axis ranges and the intensity scale.

use std::io::{self, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Palette {
    Gray,
    /// Fixed black–purple–red–yellow–white ramp.
    Heat,
}

const HEAT_STOPS: [(f64, [f64; 3]); 5] = [
    (0.0, [0.0, 0.0, 0.0]),
    (0.25, [87.0, 16.0, 110.0]),
    (0.5, [188.0, 55.0, 84.0]),
    (0.75, [249.0, 142.0, 9.0]),
    (1.0, [252.0, 255.0, 164.0]),
];

fn heat(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0);
    let j = HEAT_STOPS.iter().position(|s| s.0 >= t).unwrap_or(4).max(1);
    let (t0, c0) = HEAT_STOPS[j - 1];
    let (t1, c1) = HEAT_STOPS[j];
    let u = (t - t0) / (t1 - t0);
    let mut out = [0u8; 3];
    for c in 0..3 {
        out[c] = (c0[c] + u * (c1[c] - c0[c])).round() as u8;
    }
    out
}

/// Encodes a row-major map (first row at the top), scaled linearly so that
/// zero maps to black and `max` to full intensity. Returns the scale used.
pub fn write_pixmap<W: Write>(
    out: &mut W,
    width: usize,
    height: usize,
    values: &[f64],
    palette: Palette,
) -> io::Result<f64> {
    assert_eq!(values.len(), width * height, "image shape");
    let max = values.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
    let level = |v: f64| if max > 0.0 { (v / max).clamp(0.0, 1.0) } else { 0.0 };
    match palette {
        Palette::Gray => {
            write!(out, "P5\n{width} {height}\n255\n")?;
            let bytes: Vec<u8> = values.iter().map(|&v| (level(v) * 255.0).round() as u8).collect();
            out.write_all(&bytes)?;
        }
        Palette::Heat => {
            write!(out, "P6\n{width} {height}\n255\n")?;
            let bytes: Vec<u8> = values.iter().flat_map(|&v| heat(level(v))).collect();
            out.write_all(&bytes)?;
        }
    }
    Ok(max)
}

/// Sidecar description of an image.
pub fn write_sidecar<W: Write>(
    out: &mut W,
    image: &str,
    rows: (&str, f64, f64),
    cols: (&str, f64, f64),
    max: f64,
) -> io::Result<()> {
    writeln!(out, "image: {image}")?;
    writeln!(out, "rows (top to bottom): {} from {} to {}", rows.0, rows.1, rows.2)?;
    writeln!(out, "columns (left to right): {} from {} to {}", cols.0, cols.1, cols.2)?;
    writeln!(out, "scale: linear, 0 -> 0, 255 -> {max:.12e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_size() {
        let mut out = Vec::new();
        let max = write_pixmap(&mut out, 3, 2, &[0.0, 1.0, 2.0, 3.0, 4.0, 4.0], Palette::Heat).unwrap();
        assert_eq!(max, 4.0);
        assert!(out.starts_with(b"P6\n3 2\n255\n"));
        assert_eq!(out.len(), 11 + 18);
        assert_eq!(&out[11..14], &[0, 0, 0]);
        assert_eq!(&out[out.len() - 3..], &[252, 255, 164]);
    }
}
