//! CSV output: header row, `,` separator, `\n` line endings, floats with 17
//! significant digits in scientific notation.

use std::io::{self, Write};

use num_complex::Complex64;

/// `{:.16e}`, which round-trips every finite `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct CsvWriter<W: Write> {
    out: W,
    columns: usize,
}

impl<W: Write> CsvWriter<W> {
    pub fn new(mut out: W, header: &[&str]) -> io::Result<Self> {
        writeln!(out, "{}", header.join(","))?;
        Ok(Self { out, columns: header.len() })
    }

    /// Writes preformatted fields.
    pub fn fields(&mut self, fields: &[String]) -> io::Result<()> {
        debug_assert_eq!(fields.len(), self.columns);
        writeln!(self.out, "{}", fields.join(","))
    }

    pub fn floats(&mut self, values: &[f64]) -> io::Result<()> {
        let f: Vec<String> = values.iter().map(|v| fmt_f64(*v)).collect();
        self.fields(&f)
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.out.flush()
    }
}

/// `re`, `im` pair.
pub fn complex_fields(z: Complex64) -> [String; 2] {
    [fmt_f64(z.re), fmt_f64(z.im)]
}
