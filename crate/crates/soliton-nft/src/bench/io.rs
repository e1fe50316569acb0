//! File formats: pulse CSV (`t,re,im`), spectrum JSON, long-format result
//! CSV (`experiment,trial,eigenvalue_index,quantity,value`).

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bench::ResultRow;
use crate::error::{Error, Result};
use crate::pulse::SampledPulse;
use crate::spectrum::DiscreteSpectrum;
use crate::Complex64;

#[derive(Serialize, Deserialize)]
struct ComplexParts {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct SpectrumFile {
    eigenvalues: Vec<ComplexParts>,
    b: Vec<ComplexParts>,
}

pub fn write_spectrum_json(path: &Path, spectrum: &DiscreteSpectrum) -> Result<()> {
    let file = SpectrumFile {
        eigenvalues: spectrum
            .iter()
            .map(|e| ComplexParts {
                re: e.lambda.re,
                im: e.lambda.im,
            })
            .collect(),
        b: spectrum
            .iter()
            .map(|e| ComplexParts {
                re: e.b.re,
                im: e.b.im,
            })
            .collect(),
    };
    fs::write(path, serde_json::to_string_pretty(&file)? + "\n")?;
    Ok(())
}

pub fn read_spectrum_json(path: &Path) -> Result<DiscreteSpectrum> {
    let file: SpectrumFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    if file.eigenvalues.len() != file.b.len() {
        return Err(Error::Format(format!(
            "{} eigenvalues but {} b values",
            file.eigenvalues.len(),
            file.b.len()
        )));
    }
    DiscreteSpectrum::new(
        file.eigenvalues
            .iter()
            .zip(&file.b)
            .map(|(l, b)| (Complex64::new(l.re, l.im), Complex64::new(b.re, b.im)))
            .collect(),
    )
}

pub fn write_pulse_csv(path: &Path, pulse: &SampledPulse) -> Result<()> {
    let mut out = String::with_capacity(pulse.len() * 24 + 16);
    out.push_str("t,re,im\n");
    for (m, q) in pulse.samples().iter().enumerate() {
        out.push_str(&format!("{},{},{}\n", pulse.time(m), q.re, q.im));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_pulse_csv(path: &Path) -> Result<SampledPulse> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header.trim() == "t,re,im" => {}
        other => {
            return Err(Error::Format(format!(
                "expected header 't,re,im', got {other:?}"
            )))
        }
    }
    let mut times = Vec::new();
    let mut samples = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Format(format!(
                "line {}: expected 3 fields, got {}",
                idx + 2,
                fields.len()
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.trim()
                .parse()
                .map_err(|e| Error::Format(format!("line {}: {e}", idx + 2)))
        };
        times.push(parse(fields[0])?);
        samples.push(Complex64::new(parse(fields[1])?, parse(fields[2])?));
    }
    if times.len() < 2 {
        return Err(Error::Format("pulse file needs at least 2 samples".into()));
    }
    let step = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    if !(step > 0.0) {
        return Err(Error::Format("time must be strictly increasing".into()));
    }
    for (i, pair) in times.windows(2).enumerate() {
        let d = pair[1] - pair[0];
        if d <= 0.0 || (d - step).abs() > 1e-6 * step.max(1e-300) {
            return Err(Error::Format(format!(
                "non-uniform time step at line {}: {d} vs {step}",
                i + 3
            )));
        }
    }
    SampledPulse::new(times[0], step, samples)
}

pub const RESULTS_HEADER: &str = "experiment,trial,eigenvalue_index,quantity,value";

pub fn write_results_csv(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let mut out = String::new();
    out.push_str(RESULTS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.experiment, r.trial, r.eigenvalue_index, r.quantity, r.value
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_results_json(path: &Path, rows: &[ResultRow]) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(rows)? + "\n")?;
    Ok(())
}

/// Serialize any report-shaped value as pretty JSON.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

/// Write rows as CSV or JSON to `path`, or CSV to stdout when `path` is
/// `None`.
pub fn emit_results(path: Option<&Path>, format: super::OutputFormat, rows: &[ResultRow]) -> Result<()> {
    match (path, format) {
        (Some(p), super::OutputFormat::Csv) => write_results_csv(p, rows),
        (Some(p), super::OutputFormat::Json) => write_results_json(p, rows),
        (None, super::OutputFormat::Csv) => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            writeln!(lock, "{RESULTS_HEADER}")?;
            for r in rows {
                writeln!(
                    lock,
                    "{},{},{},{},{}",
                    r.experiment, r.trial, r.eigenvalue_index, r.quantity, r.value
                )?;
            }
            Ok(())
        }
        (None, super::OutputFormat::Json) => {
            println!("{}", serde_json::to_string_pretty(rows)?);
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::TimeGrid;

    #[test]
    fn pulse_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pulse.csv");
        let grid = TimeGrid::new(-1.5, 0.03, 101).unwrap();
        let pulse = SampledPulse::from_fn(&grid, |t| Complex64::new((-t * t).exp(), 0.3 * t)).unwrap();
        write_pulse_csv(&path, &pulse).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("t,re,im\n"));
        let back = read_pulse_csv(&path).unwrap();
        assert_eq!(back.len(), pulse.len());
        assert!((back.t_start() - pulse.t_start()).abs() < 1e-12);
        for (a, b) in back.samples().iter().zip(pulse.samples()) {
            assert_eq!(a, b); // shortest round-trip float formatting
        }
    }

    #[test]
    fn spectrum_json_round_trip_and_shape() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("spec.json");
        let spec = DiscreteSpectrum::new(vec![
            (Complex64::new(0.0, 0.5), Complex64::new(1.0, 0.0)),
            (Complex64::new(0.2, 1.5), Complex64::new(-0.09, 0.4)),
        ])
        .unwrap();
        write_spectrum_json(&path, &spec).unwrap();
        let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        assert!(v.get("eigenvalues").is_some() && v.get("b").is_some());
        assert_eq!(v["eigenvalues"][0]["im"], 0.5);
        let back = read_spectrum_json(&path).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn malformed_pulse_csv_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        fs::write(&path, "t,re,im\n0.0,1.0,0.0\n0.1,1.0,0.0\n0.3,1.0,0.0\n").unwrap();
        assert!(matches!(read_pulse_csv(&path), Err(Error::Format(_))));
        fs::write(&path, "time,re,im\n0.0,1.0,0.0\n").unwrap();
        assert!(matches!(read_pulse_csv(&path), Err(Error::Format(_))));
    }
}
