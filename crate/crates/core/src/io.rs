//! File formats: JSON fields and estimates, CSV sample sets and curves.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::ambiguity::ValueCdf;
use crate::error::{Error, Result};
use crate::sampling::SampleSet;

/// Formats `x` with 17 significant digits, `%.17g` style.
///
/// Fixed notation for decimal exponents in `[-5, 17)`, scientific otherwise;
/// trailing zeros are dropped. Parsing the result gives back `x` exactly.
pub fn fmt_sig17(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim_fraction(mantissa))
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn write_string(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_string(path, &s)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let s = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&s)?)
}

/// JSON sidecar written next to a sample CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSidecar {
    pub n: usize,
    pub b_source: Option<usize>,
    pub seed: Option<String>,
}

pub fn sample_set_csv(s: &SampleSet) -> String {
    let mut out = String::from("value_re,value_im\n");
    for v in s.values() {
        out.push_str(&fmt_sig17(v.re));
        out.push(',');
        out.push_str(&fmt_sig17(v.im));
        out.push('\n');
    }
    out
}

/// Writes the CSV and its sidecar.
pub fn write_sample_set(csv_path: &Path, sidecar_path: &Path, s: &SampleSet) -> Result<()> {
    write_string(csv_path, &sample_set_csv(s))?;
    write_json(
        sidecar_path,
        &SampleSidecar {
            n: s.len(),
            b_source: s.source_bandwidth(),
            seed: s.seed().map(|x| x.to_string()),
        },
    )
}

#[derive(Deserialize)]
struct SampleRow {
    value_re: f64,
    value_im: f64,
}

pub fn parse_sample_set(data: &str) -> Result<SampleSet> {
    let mut reader = csv::Reader::from_reader(data.as_bytes());
    let headers = reader.headers().map_err(|e| Error::Parse(e.to_string()))?;
    if headers != vec!["value_re", "value_im"] {
        return Err(Error::Parse(format!("unexpected sample header {headers:?}")));
    }
    let mut values = Vec::new();
    for row in reader.deserialize::<SampleRow>() {
        let row = row.map_err(|e| Error::Parse(e.to_string()))?;
        values.push(Complex64::new(row.value_re, row.value_im));
    }
    SampleSet::from_ordered_values(values)
}

/// Reads a sample CSV; the sidecar, if present alongside as `<stem>.json`,
/// supplies metadata.
pub fn read_sample_set(csv_path: &Path) -> Result<SampleSet> {
    let data = fs::read_to_string(csv_path).map_err(|e| Error::io(csv_path, e))?;
    let set = parse_sample_set(&data)?;
    let sidecar_path = csv_path.with_extension("json");
    if sidecar_path.exists() {
        let meta: SampleSidecar = read_json(&sidecar_path)?;
        if meta.n != set.len() {
            return Err(Error::LengthMismatch {
                expected: meta.n,
                actual: set.len(),
            });
        }
        let seed = meta.seed.and_then(|s| s.parse().ok());
        return Ok(set.with_metadata(meta.b_source, seed));
    }
    Ok(set)
}

/// Two-column `x,cdf` CSV.
pub fn cdf_csv(curve: &ValueCdf) -> String {
    let mut out = String::from("x,cdf\n");
    for (x, f) in curve.grid.iter().zip(&curve.cdf) {
        out.push_str(&fmt_sig17(*x));
        out.push(',');
        out.push_str(&fmt_sig17(*f));
        out.push('\n');
    }
    out
}

/// Appends formatted fields as one CSV line.
pub(crate) fn push_row(out: &mut String, fields: &[String]) {
    let mut first = true;
    for f in fields {
        if !first {
            out.push(',');
        }
        out.push_str(f);
        first = false;
    }
    out.push('\n');
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sig17_format() {
        assert_eq!(fmt_sig17(0.0), "0");
        assert_eq!(fmt_sig17(1.0), "1");
        assert_eq!(fmt_sig17(0.5), "0.5");
        assert_eq!(fmt_sig17(-2.25), "-2.25");
        assert_eq!(fmt_sig17(100000.0), "100000");
        assert_eq!(fmt_sig17(0.1), "0.10000000000000001");
        assert_eq!(fmt_sig17(29.608813203268074), "29.608813203268074");
        assert_eq!(fmt_sig17(1e-7), "9.9999999999999995e-8");
        assert_eq!(fmt_sig17(1e20), "1e20");
        assert!(!fmt_sig17(1234567.0).contains(['_', ' ']));
    }

    proptest! {
        #[test]
        fn sig17_roundtrips(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
            prop_assert_eq!(fmt_sig17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn sample_csv_roundtrip() {
        let set = SampleSet::from_ordered_values(vec![
            Complex64::new(0.1, 0.0),
            Complex64::new(-0.75, 1e-17),
        ])
        .unwrap();
        let csv = sample_set_csv(&set);
        assert!(csv.starts_with("value_re,value_im\n"));
        assert_eq!(parse_sample_set(&csv).unwrap(), set);
        assert!(parse_sample_set("a,b\n1,2\n").is_err());
    }

    #[test]
    fn sample_files_with_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let set = SampleSet::from_ordered_values(vec![Complex64::new(0.3, 0.0); 4])
            .unwrap()
            .with_metadata(Some(2), Some(u64::MAX));
        let csv = dir.path().join("samples.csv");
        let side = dir.path().join("samples.json");
        write_sample_set(&csv, &side, &set).unwrap();
        let meta: SampleSidecar = read_json(&side).unwrap();
        assert_eq!(meta.seed.as_deref(), Some("18446744073709551615"));
        assert_eq!(read_sample_set(&csv).unwrap(), set);
    }
}
