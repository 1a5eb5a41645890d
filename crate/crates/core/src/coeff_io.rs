//! Coefficient files.
//!
//! Real: header `# real-coeffs degree=N`, then lines `n,value`.
//! Complex: header `# complex-coeffs degree=N`, then lines `m,n,re,im`.
//! The header is optional on input; without it the degree is the largest
//! index present. Blank lines and other `#` lines are ignored.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermite_complex::ComplexCoeffs;
use crate::hermite_real::RealCoeffs;
use crate::operator::Coeffs;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn header_degree(line: &str, tag: &str) -> Option<Option<usize>> {
    let rest = line.trim_start_matches('#').trim();
    let rest = rest.strip_prefix(tag)?;
    Some(
        rest.trim()
            .strip_prefix("degree=")
            .and_then(|d| d.trim().parse().ok()),
    )
}

struct Parsed {
    header: Option<(bool, Option<usize>)>,
    rows: Vec<(usize, Vec<String>)>,
}

fn scan(reader: impl BufRead) -> Result<Parsed> {
    let mut header = None;
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if t.starts_with('#') {
            if header.is_none() && rows.is_empty() {
                if let Some(d) = header_degree(t, "real-coeffs") {
                    header = Some((false, d));
                } else if let Some(d) = header_degree(t, "complex-coeffs") {
                    header = Some((true, d));
                }
            }
            continue;
        }
        rows.push((i + 1, t.split(',').map(|f| f.trim().to_string()).collect()));
    }
    if rows.is_empty() {
        return Err(parse_err(0, "coefficient file holds no entries"));
    }
    Ok(Parsed { header, rows })
}

fn index(line: usize, s: &str) -> Result<usize> {
    s.parse().map_err(|_| parse_err(line, format!("invalid index '{s}'")))
}

fn number(line: usize, s: &str) -> Result<f64> {
    let v: f64 = s.parse().map_err(|_| parse_err(line, format!("invalid number '{s}'")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite value '{s}'")));
    }
    Ok(v)
}

/// Reads either format; a header decides, otherwise the field count does.
pub fn read_coeffs(reader: impl BufRead) -> Result<Coeffs> {
    let parsed = scan(reader)?;
    let complex = match parsed.header {
        Some((c, _)) => c,
        None => parsed.rows[0].1.len() == 4,
    };
    let degree_hint = parsed.header.and_then(|(_, d)| d);
    if complex {
        let mut entries = Vec::with_capacity(parsed.rows.len());
        for (line, f) in &parsed.rows {
            if f.len() != 4 {
                return Err(parse_err(*line, "expected m,n,re,im"));
            }
            let z = Complex64::new(number(*line, &f[2])?, number(*line, &f[3])?);
            entries.push((*line, index(*line, &f[0])?, index(*line, &f[1])?, z));
        }
        let max = entries.iter().map(|e| e.1.max(e.2)).max().unwrap_or(0);
        let degree = degree_hint.unwrap_or(max);
        let mut c = ComplexCoeffs::zeros(degree);
        for (line, m, n, z) in entries {
            if m > degree || n > degree {
                return Err(parse_err(line, format!("index ({m},{n}) exceeds degree {degree}")));
            }
            c.set(m, n, z);
        }
        Ok(Coeffs::Complex(c))
    } else {
        let mut entries = Vec::with_capacity(parsed.rows.len());
        for (line, f) in &parsed.rows {
            if f.len() != 2 {
                return Err(parse_err(*line, "expected n,value"));
            }
            entries.push((*line, index(*line, &f[0])?, number(*line, &f[1])?));
        }
        let max = entries.iter().map(|e| e.1).max().unwrap_or(0);
        let degree = degree_hint.unwrap_or(max);
        let mut v = vec![0.0; degree + 1];
        for (line, n, x) in entries {
            if n > degree {
                return Err(parse_err(line, format!("index {n} exceeds degree {degree}")));
            }
            v[n] = x;
        }
        Ok(Coeffs::Real(RealCoeffs::from_vec(v)?))
    }
}

/// Writes every coefficient (zeros included) with a header.
pub fn write_coeffs(mut w: impl Write, c: &Coeffs) -> Result<()> {
    match c {
        Coeffs::Real(r) => {
            writeln!(w, "# real-coeffs degree={}", r.degree())?;
            for (n, v) in r.as_slice().iter().enumerate() {
                writeln!(w, "{n},{v}")?;
            }
        }
        Coeffs::Complex(z) => {
            writeln!(w, "# complex-coeffs degree={}", z.degree())?;
            let (mm, nn) = z.shape();
            for m in 0..=mm {
                for n in 0..=nn {
                    let v = z.get(m, n);
                    writeln!(w, "{m},{n},{},{}", v.re, v.im)?;
                }
            }
        }
    }
    Ok(())
}
