//! CSV and JSON emission.
//!
//! Floats are written with 17 significant digits so that equal results give
//! equal bytes and CSV values parse back to the same `f64`.

use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::sim::RunManifest;
use crate::sweep::{Fig2Row, Fig3Row};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub const FIG2_HEADER: [&str; 5] = ["aod_deg", "rho", "rate_sim_bps_hz", "rate_bound_bps_hz", "snr_db"];
pub const FIG3_HEADER: [&str; 2] = ["aod_deg", "rho"];
pub const RUN_HEADER: [&str; 6] = [
    "user_n",
    "user_m",
    "rate_mean",
    "rate_bound_mean",
    "intra_mean",
    "inter_mean",
];

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn table<const K: usize>(header: [&str; K], rows: impl IntoIterator<Item = [String; K]>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn fig2_csv(rows: &[Fig2Row]) -> Vec<u8> {
    table(
        FIG2_HEADER,
        rows.iter().map(|r| {
            [
                float(r.aod_deg),
                float(r.rho),
                float(r.rate_sim_bps_hz),
                float(r.rate_bound_bps_hz),
                float(r.snr_db),
            ]
        }),
    )
}

pub fn fig3_csv(rows: &[Fig3Row]) -> Vec<u8> {
    table(FIG3_HEADER, rows.iter().map(|r| [float(r.aod_deg), float(r.rho)]))
}

/// One row per user and SNR point, points in config order.
pub fn run_csv(manifest: &RunManifest) -> Vec<u8> {
    table(
        RUN_HEADER,
        manifest.points.iter().flat_map(|p| {
            p.users.iter().map(|u| {
                [
                    u.user_n.to_string(),
                    u.user_m.to_string(),
                    float(u.rate_mean),
                    float(u.rate_bound_mean),
                    float(u.intra_mean),
                    float(u.inter_mean),
                ]
            })
        }),
    )
}

pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("manifests serialise");
    bytes.push(b'\n');
    bytes
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn write_output(bytes: &[u8], path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| HarnessError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| HarnessError::io("<stdout>", e))
        }
    }
}
