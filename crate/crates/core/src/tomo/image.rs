use std::io::{self, Write};

use crate::Real;

/// Writes an ASCII PGM (P2, maxval 255), row-major, scaled linearly so the
/// minimum maps to 0 and the maximum to 255. A constant image is all zeros.
pub fn write_pgm<T: Real, W: Write>(mut out: W, values: &[T], width: usize, height: usize) -> io::Result<()> {
    if values.len() != width * height {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            format!("image has {} values, expected {width}x{height}", values.len()),
        ));
    }
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        let v = v.to_f64_lossy();
        (lo.min(v), hi.max(v))
    });
    let range = hi - lo;
    writeln!(out, "P2")?;
    writeln!(out, "{width} {height}")?;
    writeln!(out, "255")?;
    for row in values.chunks(width.max(1)) {
        let line: Vec<String> = row
            .iter()
            .map(|v| {
                let level = if range > 0.0 {
                    ((v.to_f64_lossy() - lo) / range * 255.0).round()
                } else {
                    0.0
                };
                (level.clamp(0.0, 255.0) as u8).to_string()
            })
            .collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

/// One value per line, row-major.
pub fn write_csv<T: Real, W: Write>(mut out: W, values: &[T]) -> io::Result<()> {
    for v in values {
        writeln!(out, "{v}")?;
    }
    Ok(())
}
