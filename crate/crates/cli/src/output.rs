use std::io::Write;
use std::path::Path;

use crate::error::CliResult;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Accumulates CSV text with LF line endings.
#[derive(Debug, Default)]
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn with_header(columns: &[&str]) -> Self {
        let mut csv = Self::default();
        csv.row(columns.iter().map(|c| c.to_string()));
        csv
    }

    pub fn comment(&mut self, text: &str) {
        self.buf.push_str("# ");
        self.buf.push_str(text);
        self.buf.push('\n');
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, fields: I) {
        let line: Vec<String> = fields.into_iter().collect();
        self.buf.push_str(&line.join(","));
        self.buf.push('\n');
    }

    pub fn into_string(self) -> String {
        self.buf
    }
}

pub fn emit(body: &str, path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, body)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(body.as_bytes())?;
            lock.flush()?;
        }
    }
    Ok(())
}
