//! Report envelopes and writers.
//!
//! JSON reports share one envelope:
//! `{schema_version, command, instance_kind, instance_hash, config, report}`
//! plus `timing` when `--timing` is given. Everything except `timing` is a
//! pure function of the instance, the configuration and the seed.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use clap::ValueEnum;
use qapprox::instance::{instance_to_json, Instance};
use qapprox::oracle::OracleReport;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::OutputArgs;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    NotConverged,
}

/// SHA-256 of the canonical instance JSON.
pub fn instance_hash(inst: &Instance) -> String {
    hex::encode(Sha256::digest(instance_to_json(inst).as_bytes()))
}

pub struct Envelope {
    command: &'static str,
    kind: &'static str,
    hash: String,
    config: Value,
    timing: BTreeMap<String, f64>,
}

impl Envelope {
    pub fn new(command: &'static str, inst: &Instance, config: Value) -> Self {
        Self { command, kind: inst.kind(), hash: instance_hash(inst), config, timing: BTreeMap::new() }
    }

    pub fn timing(&mut self, key: &str, seconds: f64) {
        self.timing.insert(key.to_string(), seconds);
    }

    pub fn write_json(&self, body: Value, out: &OutputArgs) -> anyhow::Result<()> {
        let mut doc = json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "instance_kind": self.kind,
            "instance_hash": self.hash,
            "config": self.config,
            "report": body,
        });
        if out.timing {
            doc["timing"] = json!(self.timing);
        }
        emit(&(serde_json::to_string_pretty(&doc)? + "\n"), out.output.as_deref())
    }
}

/// Oracle report without its wall-clock field.
pub fn oracle_body(r: &OracleReport) -> Value {
    json!({ "quantity": r.quantity, "value": r.value, "method": r.method, "certified": r.certified })
}

pub fn emit(text: &str, path: Option<&Path>) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

pub fn write_csv<T: Serialize>(rows: &[T], out: &OutputArgs) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("csv: {e}"))?;
    emit(&String::from_utf8(bytes)?, out.output.as_deref())
}

#[derive(Serialize)]
pub struct TrialRow {
    pub seed: u64,
    pub trial: usize,
    pub energy: f64,
    pub ratio_sdp: f64,
    pub ratio_lambda_max: Option<f64>,
}

#[derive(Serialize)]
pub struct FermionRow {
    pub target: String,
    pub seed: u64,
    pub n_modes: usize,
    pub theta_star: f64,
    pub theta_upper_bound: f64,
    pub rounded_f: f64,
    pub rounded_energy: f64,
    pub extracted_energy: f64,
    pub lambda_max: Option<f64>,
    pub ratio_extracted_lambda_max: Option<f64>,
    pub sdp_status: String,
}

#[derive(Serialize)]
pub struct OracleRow {
    pub quantity: String,
    pub value: f64,
    pub method: String,
    pub certified: String,
}

impl From<&OracleReport> for OracleRow {
    fn from(r: &OracleReport) -> Self {
        Self {
            quantity: r.quantity.clone(),
            value: r.value,
            method: r.method.clone(),
            certified: serde_json::to_value(r.certified).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default(),
        }
    }
}
