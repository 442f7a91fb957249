//! Serialization helpers: numbers as decimal strings, atomic file output.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use skewrh::numerics::{Complex, Real};
use skewrh::PrecisionContext;

use crate::CliError;

pub fn num(ctx: &PrecisionContext, x: &Real) -> Value {
    Value::String(ctx.format_real(x))
}

pub fn cnum(ctx: &PrecisionContext, z: &Complex) -> Value {
    json!({ "re": ctx.format_real(&z.re), "im": ctx.format_real(&z.im) })
}

pub fn nums<'a>(ctx: &PrecisionContext, xs: impl IntoIterator<Item = &'a Real>) -> Value {
    Value::Array(xs.into_iter().map(|x| num(ctx, x)).collect())
}

pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// CSV text from rows of string fields (rows may differ in length).
pub fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new()
        .flexible(true)
        .from_writer(Vec::new());
    w.write_record(header).map_err(io_err)?;
    for r in rows {
        w.write_record(r).map_err(io_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

fn io_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// Pending outputs: each is written to a temporary sibling and renamed into
/// place only once every payload is ready, so a failure leaves nothing
/// behind.
#[derive(Default)]
pub struct Outputs {
    files: Vec<(PathBuf, String)>,
    stdout: Vec<String>,
}

impl Outputs {
    pub fn add(&mut self, path: Option<&Path>, text: String) {
        match path {
            Some(p) => self.files.push((p.to_path_buf(), text)),
            None => self.stdout.push(text),
        }
    }

    pub fn commit(self) -> Result<(), CliError> {
        let mut staged: Vec<(PathBuf, PathBuf)> = Vec::new();
        let cleanup = |staged: &[(PathBuf, PathBuf)]| {
            for (tmp, _) in staged {
                let _ = fs::remove_file(tmp);
            }
        };
        for (path, text) in &self.files {
            let mut tmp = path.clone().into_os_string();
            tmp.push(".partial");
            let tmp = PathBuf::from(tmp);
            if let Err(e) = fs::write(&tmp, text) {
                let _ = fs::remove_file(&tmp);
                cleanup(&staged);
                return Err(CliError::Io(format!("{}: {e}", path.display())));
            }
            staged.push((tmp, path.clone()));
        }
        for (i, (tmp, path)) in staged.iter().enumerate() {
            if let Err(e) = fs::rename(tmp, path) {
                cleanup(&staged[i..]);
                for (_, done) in &staged[..i] {
                    let _ = fs::remove_file(done);
                }
                return Err(CliError::Io(format!("{}: {e}", path.display())));
            }
        }
        let mut out = io::stdout().lock();
        for s in &self.stdout {
            out.write_all(s.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))?;
        }
        Ok(())
    }
}
