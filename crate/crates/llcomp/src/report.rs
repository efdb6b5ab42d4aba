//! JSON report documents and CSV witness tables.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use llcomp_core::certify::{CrossCheck, Direction, KScanRow, Region, SampleConfig, Verdict, Witness};
use llcomp_core::spaces::{EventPoint, SpaceConfig};

use crate::error::CliError;

pub const TOOL: &str = "llcomp";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Number of sampled triangles echoed in a report.
pub const ECHOED_TRIANGLES: usize = 16;

/// Wall-clock data; the only field allowed to differ between identical runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
    pub threads: usize,
}

/// Output of `certify`. Together with the echoed space configuration it is
/// enough to replay every witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub space: SpaceConfig,
    pub k: f64,
    pub direction: Direction,
    pub region: Region,
    pub config: SampleConfig,
    pub verdict: Verdict,
    /// Vertices of the first sampled triangles, for rendering.
    pub triangles: Vec<[EventPoint; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

/// Output of `scan`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanDocument {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub space: SpaceConfig,
    pub region: Region,
    pub config: SampleConfig,
    pub rows: Vec<KScanRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

/// Output of `crosscheck`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheckDocument {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub space: SpaceConfig,
    pub region: Region,
    pub config: SampleConfig,
    pub angle_triangles: usize,
    pub result: CrossCheck,
    pub all_agree: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

pub fn to_json<T: Serialize>(doc: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(doc)?;
    s.push('\n');
    Ok(s)
}

/// Writes `text` to `path`, or to standard output when `path` is `None`.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn read_report(path: &Path) -> Result<ReportDocument, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read report {}: {e}", path.display())))?;
    parse_report(&text)
}

pub fn parse_report(text: &str) -> Result<ReportDocument, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed report: {e}")))
}

/// Removes every `timing` member, for byte-level comparison of runs.
pub fn strip_timing(json: &str) -> Result<String, CliError> {
    let mut v: serde_json::Value = serde_json::from_str(json)?;
    if let Some(obj) = v.as_object_mut() {
        obj.remove("timing");
    }
    Ok(serde_json::to_string_pretty(&v)?)
}

pub const CSV_HEADER: [&str; 14] = [
    "triangle_id",
    "x_x",
    "x_t",
    "y_x",
    "y_t",
    "z_x",
    "z_t",
    "p_side",
    "p_offset",
    "q_side",
    "q_offset",
    "tau",
    "tau_bar",
    "defect",
];

/// Witness table, one row per witness.
pub fn write_witness_csv<W: Write>(out: W, witnesses: &[Witness]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for wit in witnesses {
        let [x, y, z] = wit.vertices;
        let mut rec: Vec<String> = vec![wit.triangle_id.to_string()];
        for v in [x.x, x.t, y.x, y.t, z.x, z.t] {
            rec.push(v.to_string());
        }
        rec.push(wit.p.side.name().into());
        rec.push(wit.p.offset.to_string());
        rec.push(wit.q.side.name().into());
        rec.push(wit.q.offset.to_string());
        for v in [wit.tau, wit.tau_bar, wit.defect] {
            rec.push(v.to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use llcomp_core::certify::{certify_bound, InjectedTriangle};
    use llcomp_core::models::ModelParams;
    use llcomp_core::spaces::SpaceInstance;

    fn taxicab_report() -> ReportDocument {
        let region = Region::new(-1.0, 1.0, 0.0, 2.0).unwrap();
        let config = SampleConfig {
            seed: 1,
            triangles: 3,
            injected: vec![InjectedTriangle::taxicab_counterexample(1.0)],
            ..SampleConfig::default()
        };
        let verdict = certify_bound(&SpaceInstance::Taxicab, &region, &ModelParams::flat(), Direction::Below, &config).unwrap();
        ReportDocument {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: "certify".into(),
            space: SpaceConfig::Taxicab,
            k: 0.0,
            direction: Direction::Below,
            region,
            config,
            verdict,
            triangles: vec![],
            timing: Some(Timing { elapsed_ms: 1.5, threads: 2 }),
        }
    }

    #[test]
    fn report_round_trips_exactly() {
        let doc = taxicab_report();
        let text = to_json(&doc).unwrap();
        assert_eq!(parse_report(&text).unwrap(), doc);
        assert!(!strip_timing(&text).unwrap().contains("elapsed_ms"));
        assert!(parse_report(&text[..text.len() / 2]).is_err());
    }

    #[test]
    fn csv_has_the_documented_header() {
        let doc = taxicab_report();
        let mut buf = Vec::new();
        write_witness_csv(&mut buf, &doc.verdict.witnesses).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "triangle_id,x_x,x_t,y_x,y_t,z_x,z_t,p_side,p_offset,q_side,q_offset,tau,tau_bar,defect"
        );
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first[0], "0");
        assert_eq!(first[11], "5.875");
    }
}
