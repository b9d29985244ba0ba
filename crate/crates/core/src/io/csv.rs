//! Plain CSV output. Comment lines start with `#`; numbers are written in
//! fixed scientific notation so repeated runs give identical bytes.

use std::io::{self, Write};

/// Labelled axis of a 2D grid.
#[derive(Debug, Clone)]
pub struct Axis {
    pub name: String,
    pub unit: String,
    pub labels: Vec<String>,
}

impl Axis {
    pub fn new(name: &str, unit: &str, labels: Vec<String>) -> Self {
        Self {
            name: name.into(),
            unit: unit.into(),
            labels,
        }
    }

    pub fn channels(name: &str, channels: &[i64]) -> Self {
        Self::new(name, "channel", channels.iter().map(|c| c.to_string()).collect())
    }

    pub fn real(name: &str, unit: &str, values: &[f64]) -> Self {
        Self::new(name, unit, values.iter().map(|&v| number(v)).collect())
    }
}

pub fn number(v: f64) -> String {
    format!("{v:.12e}")
}

/// Writes a row-major `rows × cols` grid with two header comment lines and
/// a column-label row.
pub fn write_grid<W: Write>(
    out: &mut W,
    quantity: &str,
    unit: &str,
    rows: &Axis,
    cols: &Axis,
    values: &[f64],
) -> io::Result<()> {
    assert_eq!(values.len(), rows.labels.len() * cols.labels.len(), "grid shape");
    writeln!(out, "# {quantity} [{unit}]")?;
    writeln!(
        out,
        "# rows: {} [{}]; columns: {} [{}]",
        rows.name, rows.unit, cols.name, cols.unit
    )?;
    write!(out, "{}\\{}", rows.name, cols.name)?;
    for c in &cols.labels {
        write!(out, ",{c}")?;
    }
    writeln!(out)?;
    let width = cols.labels.len();
    for (r, label) in rows.labels.iter().enumerate() {
        write!(out, "{label}")?;
        for v in &values[r * width..(r + 1) * width] {
            write!(out, ",{}", number(*v))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Writes a table with a header row; `header` entries should carry units,
/// e.g. `wavelength_nm`.
pub fn write_table<W: Write>(out: &mut W, comment: &str, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    writeln!(out, "# {comment}")?;
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
