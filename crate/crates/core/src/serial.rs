//! Output formatting shared by every result file.
//!
//! Floats are written with 17 significant digits (`{:.16e}`) so that values
//! round-trip exactly; non-finite values become `null` in JSON and `nan`/`inf`
//! in CSV.

use std::io;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::ser::Formatter;

/// Formats a float for CSV and text output.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// `[re, im]` pairs, the JSON representation of complex vectors.
pub fn complex_pairs(values: impl IntoIterator<Item = Complex64>) -> Vec<[f64; 2]> {
    values.into_iter().map(|z| [z.re, z.im]).collect()
}

struct FixedDigits;

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `value` as compact JSON with 17-significant-digit floats and a
/// trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits);
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}
