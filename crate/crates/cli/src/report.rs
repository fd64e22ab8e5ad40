use std::io::Write;

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    ConditionalPass,
    Skipped,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Header<'a> {
    pub schema_version: u32,
    pub record: &'static str,
    pub algebra: String,
    pub identity: &'a str,
    pub degree: u32,
    pub mode: String,
    pub seed: u64,
    pub sample: Option<usize>,
    pub instances: usize,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Record {
    pub identity_id: String,
    pub algebra: String,
    pub parameters: String,
    pub mode: String,
    /// Height to which a series residual was certified; absent for
    /// identities between rational functions.
    pub degree_checked: Option<u32>,
    pub status: Status,
    pub witness: Option<String>,
    pub note: Option<String>,
    pub wall_time_ms: u64,
}

pub fn write_report(
    out: &mut dyn Write,
    header: &Header,
    records: &[Record],
) -> anyhow::Result<()> {
    serde_json::to_writer(&mut *out, header)?;
    writeln!(out)?;
    for r in records {
        serde_json::to_writer(&mut *out, r)?;
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}
