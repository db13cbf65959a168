//! JSON and CSV number formatting.
//!
//! Floats are written with exactly 17 significant digits in scientific
//! notation (`7.0710678118654757e-1`), which round-trips every `f64` and makes
//! output byte-identical across runs.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;

/// Formats `v` with 17 significant digits.
pub fn fmt_sig17(v: f64) -> String {
    // Adding zero maps -0.0 to 0.0.
    format!("{:.16e}", v + 0.0)
}

// Structural tokens come from the trait defaults, which are compact.
struct Sig17Formatter;

impl Formatter for Sig17Formatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_sig17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serializes `value` to compact JSON with 17-significant-digit floats.
pub fn to_string<T: Serialize + ?Sized>(value: &T) -> crate::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17Formatter);
    value.serialize(&mut ser)?;
    String::from_utf8(out).map_err(|e| crate::Error::Malformed(e.to_string()))
}
