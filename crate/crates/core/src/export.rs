//! Plot-ready CSV output.
//!
//! Each file starts with a single `#` comment line carrying the tool version,
//! the seeds and the resolved config as JSON, followed by a CSV header and
//! rows. Floats are written with nine significant digits.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::ScenarioConfig;
use crate::experiments::{MultiLevelRun, SweepParam, SweepRow, SweepSummaryRow};
use crate::metrics::MetricSeries;

pub const TOOL_VERSION: &str = concat!("wsnsim ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Error)]
#[error("cannot write {}: {source}", path.display())]
pub struct ExportError {
    pub path: PathBuf,
    #[source]
    pub source: io::Error,
}

/// `%.9g`-style rendering: nine significant digits, trailing zeros dropped,
/// scientific notation outside `[1e-5, 1e9)`.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..9).contains(&exp) {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{m}e{exp}");
    }
    let decimals = (8 - exp).max(0) as usize;
    let fixed = format!("{x:.decimals$}");
    if fixed.contains('.') {
        fixed.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        fixed
    }
}

/// The comment line that heads every output file.
pub fn header_line(config: &ScenarioConfig, seeds: &[u64]) -> String {
    let seeds = match seeds {
        [] => String::new(),
        [one] => one.to_string(),
        [first, .., last] if (*last - *first) as usize == seeds.len() - 1 => {
            format!("{first}..={last}")
        }
        _ => seeds
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(","),
    };
    format!(
        "# {TOOL_VERSION} seeds={seeds} config={}",
        config.to_json_line()
    )
}

fn csv_writer<W: Write>(mut out: W, header: &str) -> io::Result<csv::Writer<W>> {
    writeln!(out, "{header}")?;
    Ok(csv::Writer::from_writer(out))
}

fn csv_io(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    }
}

pub fn write_sweep<W: Write>(
    out: W,
    header: &str,
    param: SweepParam,
    rows: &[SweepRow],
) -> io::Result<()> {
    let mut w = csv_writer(out, header)?;
    w.write_record(["protocol", param.column(), "seed", "stability_period"])
        .map_err(csv_io)?;
    for r in rows {
        w.write_record([
            r.protocol.name().to_string(),
            format_float(r.value),
            r.seed.to_string(),
            r.stability_period.to_string(),
        ])
        .map_err(csv_io)?;
    }
    w.flush()
}

pub fn write_sweep_summary<W: Write>(
    out: W,
    header: &str,
    param: SweepParam,
    rows: &[SweepSummaryRow],
) -> io::Result<()> {
    let mut w = csv_writer(out, header)?;
    w.write_record([
        "protocol",
        param.column(),
        "replicates",
        "mean_stability",
        "median_stability",
    ])
    .map_err(csv_io)?;
    for r in rows {
        w.write_record([
            r.protocol.name().to_string(),
            format_float(r.value),
            r.replicates.to_string(),
            format_float(r.mean_stability),
            format_float(r.median_stability),
        ])
        .map_err(csv_io)?;
    }
    w.flush()
}

pub fn write_series<W: Write>(out: W, header: &str, series: &[MetricSeries]) -> io::Result<()> {
    let mut w = csv_writer(out, header)?;
    w.write_record(["protocol", "round", "alive", "stddev_j", "sink_msgs_cum"])
        .map_err(csv_io)?;
    for s in series {
        for round in 0..s.rounds() {
            w.write_record([
                s.protocol.name().to_string(),
                round.to_string(),
                s.alive[round].to_string(),
                format_float(s.stddev_j[round]),
                s.sink_msgs_cum[round].to_string(),
            ])
            .map_err(csv_io)?;
        }
    }
    w.flush()
}

/// One row per (protocol, seed): stability period, final sink count and run
/// length.
pub fn write_multilevel_summary<W: Write>(
    out: W,
    header: &str,
    runs: &[MultiLevelRun],
) -> io::Result<()> {
    let mut w = csv_writer(out, header)?;
    w.write_record(["protocol", "seed", "stability_period", "sink_msgs_total", "rounds"])
        .map_err(csv_io)?;
    for run in runs {
        for s in &run.series {
            w.write_record([
                s.protocol.name().to_string(),
                run.seed.to_string(),
                s.stability_period.to_string(),
                s.final_sink_messages().to_string(),
                s.rounds().to_string(),
            ])
            .map_err(csv_io)?;
        }
    }
    w.flush()
}

/// Creates `path` and hands a buffered writer to `write`, naming the path in
/// any error.
pub fn export_to<F>(path: &Path, write: F) -> Result<(), ExportError>
where
    F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
{
    let wrap = |source| ExportError {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(wrap)?;
    let mut out = BufWriter::new(file);
    write(&mut out).map_err(wrap)?;
    out.flush().map_err(wrap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::Protocol;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_float(0.1), "0.1");
        assert_eq!(format_float(4.5), "4.5");
        assert_eq!(format_float(1.0 / 3.0), "0.333333333");
        assert_eq!(format_float(2.0 / 3.0 * 1000.0), "666.666667");
        assert_eq!(format_float(123456789.4), "123456789");
        assert_eq!(format_float(1.5e10), "1.5e10");
        assert_eq!(format_float(3.0e-4), "0.0003");
        assert_eq!(format_float(7.123456789e-7), "7.12345679e-7");
        assert_eq!(format_float(-2.25), "-2.25");
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(9.9999999999), "10");
    }

    #[test]
    fn sweep_csv_schema() {
        let rows = vec![SweepRow {
            protocol: Protocol::LeachE,
            value: 0.2,
            seed: 4,
            stability_period: 812,
        }];
        let mut buf = Vec::new();
        write_sweep(&mut buf, "# h", SweepParam::Lambda, &rows).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "# h\nprotocol,lambda,seed,stability_period\nLEACH-E,0.2,4,812\n"
        );
    }

    #[test]
    fn series_csv_schema() {
        let s = MetricSeries {
            protocol: Protocol::Becc,
            seed: 1,
            alive: vec![3, 2],
            stddev_j: vec![0.5, 0.25],
            sink_msgs_cum: vec![1, 3],
            stability_period: 1,
            initial_total: 3.0,
        };
        let mut buf = Vec::new();
        write_series(&mut buf, "# h", &[s]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "# h\nprotocol,round,alive,stddev_j,sink_msgs_cum\nBECC,0,3,0.5,1\nBECC,1,2,0.25,3\n"
        );
    }

    #[test]
    fn header_carries_version_seeds_and_config() {
        let cfg = ScenarioConfig::default();
        let h = header_line(&cfg, &[1, 2, 3]);
        assert!(h.starts_with("# wsnsim "));
        assert!(h.contains("seeds=1..=3"));
        assert!(h.contains("\"p_opt\":0.05"));
        assert!(!h.contains('\n'));
        assert!(header_line(&cfg, &[5, 9]).contains("seeds=5,9"));
    }

    #[test]
    fn unwritable_path_is_named() {
        let path = Path::new("/nonexistent-dir/for/sure/out.csv");
        let err = export_to(path, |_| Ok(())).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/for/sure/out.csv"));
    }
}
