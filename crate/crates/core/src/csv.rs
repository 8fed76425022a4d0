//! Minimal CSV writing shared by the path dumps and the experiment reports.
//!
//! Floats are written with 17 significant digits so every value round-trips
//! exactly; lines end in LF.

use std::io::Write;

/// Formats a float with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        // Avoid "-0" noise in dumps.
        return "0".to_string();
    }
    format!("{:.16e}", x)
}

pub(crate) fn write_line<W: Write>(w: &mut W, fields: &[String]) -> std::io::Result<()> {
    let mut first = true;
    for f in fields {
        if !first {
            w.write_all(b",")?;
        }
        first = false;
        w.write_all(f.as_bytes())?;
    }
    w.write_all(b"\n")
}
