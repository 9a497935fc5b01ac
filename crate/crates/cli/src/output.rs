use std::io::Write;
use std::path::PathBuf;

use maasslab::Error;

/// Version of the JSON reports.
pub const SCHEMA: u32 = maasslab::verify::SCHEMA_VERSION;

/// Sends output to a file or standard output.
pub struct Emitter {
    path: Option<PathBuf>,
}

impl Emitter {
    pub fn new(path: Option<PathBuf>) -> Self {
        Self { path }
    }

    pub fn emit(&self, text: &str) -> maasslab::Result<()> {
        let io = |e: std::io::Error| Error::Invalid(format!("cannot write output: {e}"));
        match &self.path {
            Some(p) => std::fs::write(p, text).map_err(io),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(io)
            }
        }
    }
}

pub fn json_string(v: &serde_json::Value) -> maasslab::Result<String> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| Error::Invalid(format!("cannot serialise report: {e}")))
}

/// Rows for CSV output, with a header.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row(&mut self, r: &[String]) {
        self.rows.push(r.to_vec());
    }

    pub fn to_csv(&self) -> maasslab::Result<String> {
        let err = |e: csv::Error| Error::Invalid(format!("cannot write csv: {e}"));
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(err)?;
        for r in &self.rows {
            w.write_record(r).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Invalid(format!("cannot write csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::Invalid(e.to_string()))
    }
}
