//! Line-delimited JSON and CSV output.

use std::io::Write;

use serde::{Serialize, Serializer};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// `p_t` as a number, `"inf"` when infinite, `null` when undefined
/// (small-t regime).
pub fn ser_p_t<S: Serializer>(p_t: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match p_t {
        None => s.serialize_none(),
        Some(v) if v.is_infinite() => s.serialize_str("inf"),
        Some(v) => s.serialize_f64(*v),
    }
}

/// Collects records in memory; written out once the command finishes.
pub struct Sink {
    format: Format,
    json: Vec<u8>,
    csv: Option<csv::Writer<Vec<u8>>>,
}

impl Sink {
    pub fn new(format: Format) -> Self {
        Self {
            format,
            json: Vec::new(),
            csv: (format == Format::Csv).then(|| csv::Writer::from_writer(Vec::new())),
        }
    }

    pub fn format(&self) -> Format {
        self.format
    }

    /// Emits one record. `csv_row` must be flat (scalars only).
    pub fn emit<J: Serialize, C: Serialize>(&mut self, json: &J, csv_row: &C) -> Result<()> {
        match self.format {
            Format::Json => {
                serde_json::to_writer(&mut self.json, json)?;
                self.json.push(b'\n');
            }
            Format::Csv => self
                .csv
                .as_mut()
                .expect("csv writer present in csv mode")
                .serialize(csv_row)?,
        }
        Ok(())
    }

    /// Emits a record whose JSON and CSV shapes coincide.
    pub fn emit_flat<T: Serialize>(&mut self, row: &T) -> Result<()> {
        self.emit(row, row)
    }

    pub fn into_bytes(self) -> Result<Vec<u8>> {
        match self.csv {
            Some(w) => w
                .into_inner()
                .map_err(|e| CliError::Io(std::io::Error::other(e.to_string()))),
            None => Ok(self.json),
        }
    }

    pub fn finish(self, out: Option<&std::path::Path>, stdout: &mut dyn Write) -> Result<()> {
        let bytes = self.into_bytes()?;
        match out {
            Some(path) => std::fs::write(path, bytes)?,
            None => stdout.write_all(&bytes)?,
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        #[serde(serialize_with = "ser_p_t")]
        p_t: Option<f64>,
        x: f64,
    }

    #[test]
    fn p_t_encodings() {
        let mut sink = Sink::new(Format::Json);
        for p_t in [None, Some(f64::INFINITY), Some(2.5)] {
            sink.emit_flat(&Row { p_t, x: 1.0 }).unwrap();
        }
        let text = String::from_utf8(sink.into_bytes().unwrap()).unwrap();
        assert_eq!(
            text,
            "{\"p_t\":null,\"x\":1.0}\n{\"p_t\":\"inf\",\"x\":1.0}\n{\"p_t\":2.5,\"x\":1.0}\n"
        );
    }

    #[test]
    fn csv_has_header() {
        let mut sink = Sink::new(Format::Csv);
        sink.emit_flat(&Row {
            p_t: Some(f64::INFINITY),
            x: 0.5,
        })
        .unwrap();
        sink.emit_flat(&Row { p_t: None, x: 2.0 }).unwrap();
        let text = String::from_utf8(sink.into_bytes().unwrap()).unwrap();
        assert_eq!(text, "p_t,x\ninf,0.5\n,2.0\n");
    }
}
