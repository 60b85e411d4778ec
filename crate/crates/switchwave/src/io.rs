//! Flat-file formats: energy series as CSV, run summaries as JSON.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use switchwave_core::analysis::SeriesMeta;
use switchwave_core::EnergySeries;

/// Exponent form with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `# key=value` header lines followed by `t,E` rows.
pub fn write_series_csv<W: Write>(mut w: W, series: &EnergySeries) -> std::io::Result<()> {
    writeln!(w, "# system={}", series.meta.system)?;
    for (name, value) in &series.meta.params {
        writeln!(w, "# {name}={}", fmt_f64(*value))?;
    }
    writeln!(w, "t,E")?;
    for (t, e) in series.iter() {
        writeln!(w, "{},{}", fmt_f64(t), fmt_f64(e))?;
    }
    w.flush()
}

/// A series read back from CSV together with its header entries.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvSeries {
    pub header: Vec<(String, String)>,
    pub series: EnergySeries,
}

impl CsvSeries {
    pub fn param(&self, name: &str) -> Option<&str> {
        self.header
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }
}

pub fn read_series_csv<R: BufRead>(r: R) -> anyhow::Result<CsvSeries> {
    let mut header = Vec::new();
    let mut seen_columns = false;
    let (mut times, mut energies) = (Vec::new(), Vec::new());
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let (k, v) = rest
                .trim()
                .split_once('=')
                .with_context(|| format!("line {}: malformed header", lineno + 1))?;
            header.push((k.trim().to_string(), v.trim().to_string()));
            continue;
        }
        if !seen_columns {
            if line != "t,E" {
                bail!("line {}: expected column header `t,E`", lineno + 1);
            }
            seen_columns = true;
            continue;
        }
        let (t, e) = line
            .split_once(',')
            .with_context(|| format!("line {}: expected two columns", lineno + 1))?;
        times.push(
            t.trim()
                .parse::<f64>()
                .with_context(|| format!("line {}", lineno + 1))?,
        );
        energies.push(
            e.trim()
                .parse::<f64>()
                .with_context(|| format!("line {}", lineno + 1))?,
        );
    }
    if !seen_columns {
        bail!("missing column header `t,E`");
    }
    let series = EnergySeries::new(times, energies, SeriesMeta::default())?;
    Ok(CsvSeries { header, series })
}

/// One-line machine-readable outcome of a run. Non-finite numbers are
/// written as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub system: String,
    pub params: BTreeMap<String, f64>,
    pub spectral_radius: Option<f64>,
    pub predicted_slope: Option<f64>,
    pub fitted_slope: Option<f64>,
    pub r_squared: Option<f64>,
    pub stable_predicted: Option<bool>,
    pub stable_observed: Option<bool>,
}

impl Summary {
    pub fn new(system: &str, params: &[(&str, f64)]) -> Self {
        Self {
            system: system.to_string(),
            params: params
                .iter()
                .filter(|(_, v)| v.is_finite())
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
            spectral_radius: None,
            predicted_slope: None,
            fitted_slope: None,
            r_squared: None,
            stable_predicted: None,
            stable_observed: None,
        }
    }
}

pub fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn write_summary_json<W: Write>(mut w: W, summary: &Summary) -> anyhow::Result<()> {
    serde_json::to_writer_pretty(&mut w, summary)?;
    writeln!(w)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> EnergySeries {
        let times: Vec<f64> = (0..50).map(|i| i as f64 / 7.0).collect();
        let energies = times.iter().map(|t| (-t / 3.0).exp() * 0.1).collect();
        EnergySeries::new(
            times,
            energies,
            SeriesMeta {
                system: "pointwise",
                params: vec![("a", 1.0 / 3.0), ("ell", 1.0)],
            },
        )
        .unwrap()
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let s = sample();
        let mut buf = Vec::new();
        write_series_csv(&mut buf, &s).unwrap();
        let back = read_series_csv(buf.as_slice()).unwrap();
        assert_eq!(back.series.times(), s.times());
        assert_eq!(back.series.energies(), s.energies());
        assert_eq!(back.param("system"), Some("pointwise"));
        assert_eq!(back.param("a").unwrap().parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_series_csv(&mut buf, &sample()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# system=pointwise"));
        assert_eq!(lines.next(), Some("# a=3.3333333333333331e-1"));
        assert_eq!(lines.nth(1), Some("t,E"));
        assert_eq!(
            lines.next(),
            Some("0.0000000000000000e0,1.0000000000000001e-1")
        );
    }

    #[test]
    fn malformed_csv_is_rejected() {
        assert!(read_series_csv("0,1\n".as_bytes()).is_err());
        assert!(read_series_csv("t,E\n0,x\n".as_bytes()).is_err());
        assert!(read_series_csv("t,E\n1,1\n0,1\n".as_bytes()).is_err());
    }

    #[test]
    fn json_keys_and_nulls() {
        let mut s = Summary::new("boundary", &[("mu1", 3.0), ("mu2", 2.0)]);
        s.spectral_radius = Some(0.0);
        s.predicted_slope = finite(f64::NEG_INFINITY);
        s.stable_predicted = Some(true);
        let mut buf = Vec::new();
        write_summary_json(&mut buf, &s).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        for key in [
            "system",
            "params",
            "spectral_radius",
            "predicted_slope",
            "fitted_slope",
            "r_squared",
            "stable_predicted",
            "stable_observed",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!(v["predicted_slope"].is_null());
        assert_eq!(v["params"]["mu1"], 3.0);
    }
}
