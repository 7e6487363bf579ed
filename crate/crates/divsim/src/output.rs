//! File formats: outage CSV, JSON reports and the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use divsim_core::outage::{wilson_interval, OutageCurve};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::CliError;

/// Confidence level of the Wilson interval columns.
pub const WILSON_CONFIDENCE: f64 = 0.95;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn outage_csv_header(l: usize) -> String {
    let mut cols = vec![
        "rho0_db".to_string(),
        "rho0_linear".into(),
        "gamma".into(),
        "trials".into(),
        "count_all_out".into(),
        "count_any_out".into(),
    ];
    cols.extend((1..=l).map(|k| format!("count_stream_{k}")));
    cols.push("singular_events".into());
    cols.push("phat_all_out".into());
    cols.push("phat_any_out".into());
    cols.extend((1..=l).map(|k| format!("phat_stream_{k}")));
    cols.push("wilson_lo_all".into());
    cols.push("wilson_hi_all".into());
    cols.join(",")
}

/// Outage curve as CSV, preceded by a `# config_fingerprint:` comment line.
pub fn outage_csv(curve: &OutageCurve, fingerprint: &str) -> String {
    let l = curve.config.l;
    let mut out = format!("# config_fingerprint: {fingerprint}\n{}\n", outage_csv_header(l));
    for pt in &curve.points {
        let (lo, hi) = wilson_interval(pt.count_all_out, pt.trials, WILSON_CONFIDENCE)
            .expect("every grid point has at least one trial");
        let mut row: Vec<String> = vec![
            fmt_f64(pt.rho0_db),
            fmt_f64(pt.rho0_linear),
            fmt_f64(curve.config.gamma),
            pt.trials.to_string(),
            pt.count_all_out.to_string(),
            pt.count_any_out.to_string(),
        ];
        row.extend(pt.count_stream_out.iter().map(u64::to_string));
        row.push(pt.singular_events.to_string());
        row.push(fmt_f64(pt.phat_all_out()));
        row.push(fmt_f64(pt.phat_any_out()));
        row.extend((0..l).map(|k| fmt_f64(pt.phat_stream(k))));
        row.push(fmt_f64(lo));
        row.push(fmt_f64(hi));
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub timestamp: String,
    pub config_fingerprint: String,
    pub config: &'a RunConfig,
    pub files: Vec<FileEntry>,
}

/// Collects output files for one run; writes them and then the manifest.
#[derive(Debug, Default)]
pub struct OutputSet {
    files: Vec<(String, String)>,
}

impl OutputSet {
    pub fn add(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    /// Writes every file into `dir` and a `manifest.json` listing them with
    /// their SHA-256 checksums. Returns the manifest entries.
    pub fn write(self, dir: &Path, config: &RunConfig, command: &'static str) -> Result<Vec<FileEntry>, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("creating {}: {e}", dir.display())))?;
        let mut entries = Vec::new();
        for (name, contents) in &self.files {
            let path = dir.join(name);
            fs::write(&path, contents).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
            entries.push(FileEntry {
                name: name.clone(),
                bytes: contents.len() as u64,
                sha256: hex::encode(Sha256::digest(contents.as_bytes())),
            });
        }
        let manifest = RunManifest {
            tool: "divsim",
            version: env!("CARGO_PKG_VERSION"),
            command,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            config_fingerprint: config.fingerprint(),
            config,
            files: entries.clone(),
        };
        let path = dir.join("manifest.json");
        fs::write(&path, to_json(&manifest)).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
        Ok(entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use divsim_core::channel::Receiver;
    use divsim_core::outage::{OutageConfig, OutagePoint};
    use divsim_core::policy::PolicyId;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 12345.678901234567, 0.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn csv_layout() {
        assert_eq!(
            outage_csv_header(2),
            "rho0_db,rho0_linear,gamma,trials,count_all_out,count_any_out,count_stream_1,count_stream_2,\
             singular_events,phat_all_out,phat_any_out,phat_stream_1,phat_stream_2,wilson_lo_all,wilson_hi_all"
        );
        let mut pt = OutagePoint::empty(10.0, 2);
        pt.trials = 100;
        pt.count_all_out = 5;
        pt.count_any_out = 20;
        pt.count_stream_out = vec![10, 12];
        let curve = OutageCurve {
            config: OutageConfig {
                n_tx: 3,
                n_rx: 2,
                l: 2,
                receiver: Receiver::Zf,
                policy: PolicyId::MaxMinSnr,
                snr_grid_db: vec![10.0],
                gamma: 1.0,
                trials_per_point: 100,
            },
            seed: 0,
            points: vec![pt],
        };
        let csv = outage_csv(&curve, "abc");
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# config_fingerprint: abc");
        let fields: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(fields.len(), 15);
        assert_eq!(fields[3], "100");
        assert_eq!(fields[6], "10");
        assert_eq!(fields[9].parse::<f64>().unwrap(), 0.05);
        let lo: f64 = fields[13].parse().unwrap();
        let hi: f64 = fields[14].parse().unwrap();
        assert!(lo < 0.05 && 0.05 < hi);
    }
}
