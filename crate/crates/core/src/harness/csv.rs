use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::MetricsCell;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "m,p,pct_support_recovered,prob_exact_support,non_converged,trials";

/// Fixed-point rendering with six significant digits (`60.0000`,
/// `0.410000`, `100.000`).
pub fn format_sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0.00000".into() } else { v.to_string() };
    }
    let mut exp = v.abs().log10().floor() as i32;
    let render = |exp: i32| {
        let decimals = (5 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    };
    let mut out = render(exp);
    // rounding may carry into the next decade (9.999999 -> 10.00000)
    let rounded: f64 = out.parse().unwrap_or(v);
    if rounded.abs() >= 10f64.powi(exp + 1) {
        exp += 1;
        out = render(exp);
    }
    out
}

/// Writes the header and one row per cell, sorted by (m, p).
pub fn write_csv<W: Write>(cells: &[MetricsCell], mut w: W) -> std::io::Result<()> {
    let mut sorted: Vec<&MetricsCell> = cells.iter().collect();
    sorted.sort_by_key(|c| (c.m, c.p));
    writeln!(w, "{CSV_HEADER}")?;
    for c in sorted {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            c.m,
            c.p,
            format_sig6(c.pct_support_recovered),
            format_sig6(c.prob_exact_support),
            c.non_converged,
            c.trials
        )?;
    }
    w.flush()
}

/// [`write_csv`] into a file.
pub fn emit_csv(cells: &[MetricsCell], path: &Path) -> Result<()> {
    let io_err = |source| Error::Io { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(io_err)?;
    write_csv(cells, BufWriter::new(file)).map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(m: usize, p: usize, pct: f64, prob: f64) -> MetricsCell {
        MetricsCell { m, p, pct_support_recovered: pct, prob_exact_support: prob, non_converged: 0, trials: 100, failed: 0 }
    }

    #[test]
    fn six_significant_digits() {
        assert_eq!(format_sig6(60.0), "60.0000");
        assert_eq!(format_sig6(0.41), "0.410000");
        assert_eq!(format_sig6(100.0), "100.000");
        assert_eq!(format_sig6(1.0), "1.00000");
        assert_eq!(format_sig6(0.0), "0.00000");
        assert_eq!(format_sig6(0.05), "0.0500000");
        assert_eq!(format_sig6(9.9999999), "10.0000");
        assert_eq!(format_sig6(99.99996), "100.000");
        assert_eq!(format_sig6(33.333333333), "33.3333");
    }

    #[test]
    fn single_row_format() {
        let mut buf = Vec::new();
        write_csv(&[cell(50, 3, 60.0, 0.41)], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n50,3,60.0000,0.410000,0,100\n"));
    }

    #[test]
    fn empty_is_header_only_and_rows_sorted() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));

        let mut buf = Vec::new();
        write_csv(&[cell(20, 1, 1.0, 0.0), cell(10, 5, 1.0, 0.0), cell(10, 2, 1.0, 0.0)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let keys: Vec<&str> = text.lines().skip(1).map(|l| &l[..l.match_indices(',').nth(1).unwrap().0]).collect();
        assert_eq!(keys, ["10,2", "10,5", "20,1"]);
    }

    #[test]
    fn io_error_carries_path() {
        let err = emit_csv(&[], Path::new("/nonexistent-dir/out.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/out.csv"));
    }
}
