//! CSV tables of points: header `re,im` plus an optional third column
//! (`residual` or `weight`). Numbers are written with 17 significant digits.

use std::io::{Read, Write};

use num_complex::Complex64;
use thiserror::Error;

use crate::measures::Atom;
use crate::metrics::{DiscreteMeasure, MetricsError};
use crate::polyroots::CriticalPointSet;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Format { line: u64, message: String },
    #[error(transparent)]
    Measure(#[from] MetricsError),
}

/// Shortest text that keeps 17 significant digits.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write a header and rows of numbers.
pub fn write_table<W: Write>(out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|x| format_number(*x)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_points<W: Write>(out: W, points: &[Complex64]) -> Result<(), CsvError> {
    write_table(out, &["re", "im"], points.iter().map(|z| vec![z.re, z.im]))
}

pub fn write_critical_points<W: Write>(out: W, cps: &CriticalPointSet) -> Result<(), CsvError> {
    write_table(
        out,
        &["re", "im", "residual"],
        cps.points.iter().zip(&cps.residuals).map(|(z, r)| vec![z.re, z.im, *r]),
    )
}

pub fn write_measure<W: Write>(out: W, m: &DiscreteMeasure) -> Result<(), CsvError> {
    write_table(out, &["re", "im", "weight"], m.atoms().iter().map(|a| vec![a.at.re, a.at.im, a.weight]))
}

/// A parsed points table.
#[derive(Debug, Clone, PartialEq)]
pub struct PointTable {
    /// Name of the third column, if any.
    pub extra_column: Option<String>,
    pub points: Vec<Complex64>,
    pub extra: Vec<f64>,
}

pub fn read_table<R: Read>(input: R) -> Result<PointTable, CsvError> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = r.headers()?.clone();
    let names: Vec<&str> = header.iter().collect();
    let extra_column = match names.as_slice() {
        ["re", "im"] => None,
        ["re", "im", extra] => Some(extra.to_string()),
        _ => {
            return Err(CsvError::Format { line: 1, message: format!("expected header re,im[,extra], got {}", names.join(",")) });
        }
    };
    let mut table = PointTable { extra_column, points: Vec::new(), extra: Vec::new() };
    for record in r.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let parse = |i: usize| -> Result<f64, CsvError> {
            let field = record.get(i).unwrap_or("");
            field.parse().map_err(|_| CsvError::Format { line, message: format!("not a number: {field:?}") })
        };
        table.points.push(Complex64::new(parse(0)?, parse(1)?));
        if table.extra_column.is_some() {
            table.extra.push(parse(2)?);
        }
    }
    Ok(table)
}

/// Points from a table, ignoring any third column.
pub fn read_points<R: Read>(input: R) -> Result<Vec<Complex64>, CsvError> {
    Ok(read_table(input)?.points)
}

/// A measure from a table: weighted by a `weight` column, else uniform.
pub fn read_measure<R: Read>(input: R) -> Result<DiscreteMeasure, CsvError> {
    let t = read_table(input)?;
    match t.extra_column.as_deref() {
        Some("weight") => {
            let atoms = t.points.iter().zip(&t.extra).map(|(&at, &weight)| Atom { at, weight }).collect();
            Ok(DiscreteMeasure::new(atoms)?)
        }
        _ => Ok(DiscreteMeasure::uniform(&t.points)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_round_trip_exactly() {
        let pts = vec![Complex64::new(0.1, -1.0 / 3.0), Complex64::new(1e-300, 6.02e23), Complex64::new(-0.0, 0.0)];
        let mut buf = Vec::new();
        write_points(&mut buf, &pts).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("re,im\n1.0000000000000001e-1,-3.3333333333333331e-1\n"));
        assert_eq!(read_points(buf.as_slice()).unwrap(), pts);
    }

    #[test]
    fn measure_round_trip_and_uniform_default() {
        let m = DiscreteMeasure::new(vec![
            Atom { at: Complex64::new(0.0, 0.0), weight: 0.25 },
            Atom { at: Complex64::new(1.0, 2.0), weight: 0.75 },
        ])
        .unwrap();
        let mut buf = Vec::new();
        write_measure(&mut buf, &m).unwrap();
        assert_eq!(read_measure(buf.as_slice()).unwrap(), m);
        let u = read_measure("re,im\n0,0\n1,1\n".as_bytes()).unwrap();
        assert_eq!(u.atoms()[0].weight, 0.5);
    }

    #[test]
    fn malformed_tables() {
        assert!(matches!(read_table("x,y\n1,2\n".as_bytes()), Err(CsvError::Format { line: 1, .. })));
        assert!(matches!(read_table("re,im\n1,abc\n".as_bytes()), Err(CsvError::Format { line: 2, .. })));
        assert!(read_table("re,im\n1,2,3\n".as_bytes()).is_err());
        assert!(read_measure("re,im,weight\n0,0,0.2\n".as_bytes()).is_err());
    }

    #[test]
    fn critical_point_columns() {
        let cps = crate::polyroots::critical_points(
            &crate::polyroots::RootPolynomial::new(&[Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)], 53).unwrap(),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_critical_points(&mut buf, &cps).unwrap();
        let t = read_table(buf.as_slice()).unwrap();
        assert_eq!(t.extra_column.as_deref(), Some("residual"));
        assert_eq!(t.points, cps.points);
    }
}
