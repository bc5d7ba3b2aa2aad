//! Row-oriented CSV / JSON-lines output.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    F(f64),
    U(usize),
    I(i64),
    B(bool),
    S(String),
    Empty,
}

impl Cell {
    pub fn opt_f(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::F)
    }

    pub fn opt_u(v: Option<usize>) -> Self {
        v.map_or(Cell::Empty, Cell::U)
    }

    /// Text form; floats use the shortest representation that round-trips.
    fn text(&self) -> String {
        match self {
            Cell::F(v) => format!("{v:?}"),
            Cell::U(v) => v.to_string(),
            Cell::I(v) => v.to_string(),
            Cell::B(v) => v.to_string(),
            Cell::S(v) => v.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(v) => Value::from(*v),
            Cell::U(v) => Value::from(*v),
            Cell::I(v) => Value::from(*v),
            Cell::B(v) => Value::from(*v),
            Cell::S(v) => Value::from(v.as_str()),
            Cell::Empty => Value::Null,
        }
    }
}

enum Sink {
    Csv(Box<csv::Writer<Box<dyn Write>>>),
    Jsonl(BufWriter<Box<dyn Write>>),
}

/// A dataset with a fixed column list.
pub struct Table {
    sink: Sink,
    columns: Vec<&'static str>,
    rows: usize,
}

impl Table {
    /// Writes to `path`, or standard output when `None`.
    pub fn create(path: Option<&Path>, format: Format, columns: Vec<&'static str>) -> Result<Self, CliError> {
        let out: Box<dyn Write> = match path {
            Some(p) => {
                Box::new(File::create(p).map_err(|e| CliError::Io(format!("cannot create {}: {e}", p.display())))?)
            }
            None => Box::new(io::stdout()),
        };
        let sink = match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&columns)?;
                Sink::Csv(Box::new(w))
            }
            Format::Jsonl => Sink::Jsonl(BufWriter::new(out)),
        };
        Ok(Self { sink, columns, rows: 0 })
    }

    pub fn write_row(&mut self, cells: &[Cell]) -> Result<(), CliError> {
        assert_eq!(cells.len(), self.columns.len(), "row does not match the column list");
        match &mut self.sink {
            Sink::Csv(w) => w.write_record(cells.iter().map(Cell::text))?,
            Sink::Jsonl(w) => {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(cells)
                    .map(|(k, c)| (k.to_string(), c.json()))
                    .collect();
                serde_json::to_writer(&mut *w, &obj)?;
                w.write_all(b"\n")?;
            }
        }
        self.rows += 1;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<(), CliError> {
        match &mut self.sink {
            Sink::Csv(w) => w.flush()?,
            Sink::Jsonl(w) => w.flush()?,
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1e-10, 2.0, -3.25e17, 0.30000000000000004] {
            let t = Cell::F(v).text();
            assert_eq!(t.parse::<f64>().unwrap(), v);
        }
        assert_eq!(Cell::Empty.text(), "");
        assert_eq!(Cell::F(f64::NAN).json(), Value::Null);
    }
}
