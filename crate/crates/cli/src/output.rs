//! Deterministic number formatting and table output.

use std::io::Write;

use clap::ValueEnum;
use serde::Deserialize;

/// Significant digits of every emitted number.
pub const SIG_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Text,
}

/// Plain decimal with [`SIG_DIGITS`] significant digits. Negative zero
/// prints as zero and non-finite values as `nan`, `inf` or `-inf`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return format!("{:.*}", SIG_DIGITS - 1, 0.0);
    }
    // exponent after rounding, so 9.9999999999999 counts as 1e1
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    let prec = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
    let s = format!("{x:.prec$}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// A header plus rows of preformatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Text => self.write_text(out),
        }
    }

    pub fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()
    }

    /// Right-aligned columns separated by two spaces.
    pub fn write_text(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| -> String {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{}{c}", " ".repeat(w - c.chars().count())))
                .collect();
            padded.join("  ")
        };
        writeln!(out, "{}", line(&self.header))?;
        for row in &self.rows {
            writeln!(out, "{}", line(row))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(0.991397849462366), "0.991397849462");
        assert_eq!(fmt_num(-5.0), "-5.00000000000");
        assert_eq!(fmt_num(123.456), "123.456000000");
        assert_eq!(fmt_num(0.0086021505376344), "0.00860215053763");
        assert_eq!(fmt_num(9.99999999999999), "10.0000000000");
        assert_eq!(fmt_num(1e13), "10000000000000");
    }

    #[test]
    fn zero_and_specials() {
        assert_eq!(fmt_num(0.0), "0.00000000000");
        assert_eq!(fmt_num(-0.0), "0.00000000000");
        assert_eq!(fmt_num(1e-5), "0.0000100000000000");
        assert_eq!(fmt_num(f64::NAN), "nan");
        assert_eq!(fmt_num(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn csv_and_text() {
        let mut t = Table::new(&["a", "bb"]);
        t.rows.push(vec!["1".into(), "-0.5".into()]);
        let mut csv = Vec::new();
        t.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap(), "a,bb\n1,-0.5\n");
        let mut txt = Vec::new();
        t.write_text(&mut txt).unwrap();
        assert_eq!(String::from_utf8(txt).unwrap(), "a    bb\n1  -0.5\n");
    }
}
