//! CSV writers.
//!
//! Numbers are written in scientific notation with 17 significant digits so
//! that every `f64` round-trips exactly; lines end with `\n`.

use std::io::{self, Write};

use crate::scenario::CoherenceSeries;

pub const SERIES_HEADER: &str =
    "t,xi,rho11,rho22,rho33,re_rho12,im_rho12,re_rho13,im_rho13,re_rho23,im_rho23";

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_series_csv<W: Write>(series: &CoherenceSeries, mut out: W) -> io::Result<()> {
    writeln!(out, "{SERIES_HEADER}")?;
    for point in &series.points {
        let r = &point.rho;
        let fields = [
            point.t,
            point.xi,
            r.get(1, 1).re,
            r.get(2, 2).re,
            r.get(3, 3).re,
            r.get(1, 2).re,
            r.get(1, 2).im,
            r.get(1, 3).re,
            r.get(1, 3).im,
            r.get(2, 3).re,
            r.get(2, 3).im,
        ];
        let line: Vec<String> = fields.iter().map(|&x| fmt_f64(x)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn series_csv_string(series: &CoherenceSeries) -> String {
    let mut buf = Vec::new();
    write_series_csv(series, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}
