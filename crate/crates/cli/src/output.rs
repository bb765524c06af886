use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use serde::Serialize;

use crate::args::Format;
use crate::error::{CliError, CliResult};

pub struct Sink {
    path: Option<PathBuf>,
    format: Option<Format>,
}

impl Sink {
    pub fn new(path: Option<PathBuf>, format: Option<Format>) -> Self {
        Self { path, format }
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn context(&self) -> String {
        match &self.path {
            Some(p) => format!("writing {}", p.display()),
            None => "writing stdout".into(),
        }
    }

    fn open(&self) -> CliResult<Box<dyn Write>> {
        Ok(match &self.path {
            Some(p) => {
                Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(self.context(), e))?))
            }
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    pub fn text(&self, body: &str) -> CliResult {
        let mut w = self.open()?;
        w.write_all(body.as_bytes()).and_then(|_| w.flush()).map_err(|e| CliError::io(self.context(), e))
    }

    pub fn json<T: Serialize + ?Sized>(&self, value: &T) -> CliResult {
        let mut body =
            serde_json::to_string_pretty(value).map_err(|e| CliError::Input(format!("json: {e}")))?;
        body.push('\n');
        self.text(&body)
    }

    pub fn csv<T: Serialize>(&self, rows: &[T]) -> CliResult {
        let mut w = csv::Writer::from_writer(self.open()?);
        for r in rows {
            w.serialize(r)?;
        }
        w.flush().map_err(|e| CliError::io(self.context(), e))
    }

    /// Tables: csv or json, with text treated as csv.
    pub fn table<T: Serialize>(&self, rows: &[T]) -> CliResult {
        match self.format_or(Format::Csv) {
            Format::Json => self.json(rows),
            Format::Csv | Format::Text => self.csv(rows),
        }
    }
}
