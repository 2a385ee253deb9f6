//! CSV rendering: a `# fracheat v1` line, the column header, then rows.

use std::io::Write;

use crate::CliError;

pub const HEADER_LINE: &str = "# fracheat v1";

/// Nine significant digits, shortest of fixed and scientific notation,
/// trailing zeros removed. Independent of locale.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub struct CsvOut<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> CsvOut<W> {
    pub fn new(mut w: W, columns: &[&str]) -> Result<Self, CliError> {
        writeln!(w, "{HEADER_LINE}")?;
        let mut inner = csv::Writer::from_writer(w);
        inner.write_record(columns).map_err(csv_error)?;
        Ok(CsvOut { inner })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.inner.write_record(fields).map_err(csv_error)
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.inner.flush()?;
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::Io(io),
        other => CliError::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_num(0.439_391_289_467_722_4), "0.439391289");
        assert_eq!(fmt_num(-27.081_081_081_081_08), "-27.0810811");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(-0.5), "-0.5");
        assert_eq!(fmt_num(123_456_789.4), "123456789");
        assert_eq!(fmt_num(1.234_567_891e9), "1.23456789e9");
        assert_eq!(fmt_num(6.378_682_484_716_774e-54), "6.37868248e-54");
        assert_eq!(fmt_num(1.0e-5), "0.00001");
        assert_eq!(fmt_num(9.999_999_999e-6), "0.00001");
        assert_eq!(fmt_num(9.999_999_99e-6), "9.99999999e-6");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(f64::NAN), "NaN");
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        let mut w = CsvOut::new(&mut buf, &["x", "value"]).unwrap();
        w.row(["1", "a,b"]).unwrap();
        w.finish().unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "# fracheat v1\nx,value\n1,\"a,b\"\n"
        );
    }
}
