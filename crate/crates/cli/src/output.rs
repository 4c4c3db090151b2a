use std::fs::File;
use std::io::{self, BufWriter, Write};

use fpp_core::lab::ExperimentReport;
use serde_json::{json, Map, Value};

use crate::params::Params;
use crate::Failure;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    U(u64),
    Name(&'static str),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::F(x) => (x + 0.0).to_string(),
            Cell::I(x) => x.to_string(),
            Cell::U(x) => x.to_string(),
            Cell::Name(x) => x.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(x) if x.is_finite() => json!(x),
            Cell::F(x) => json!(x.to_string()),
            Cell::I(x) => json!(x),
            Cell::U(x) => json!(x),
            Cell::Name(x) => json!(x),
        }
    }
}

pub enum Output {
    Table { columns: Vec<&'static str>, rows: Vec<Vec<Cell>> },
    Report(ExperimentReport),
}

impl Output {
    pub fn table(columns: &[&'static str]) -> Self {
        Output::Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        if let Output::Table { rows, .. } = self {
            rows.push(cells);
        }
    }

    pub fn passed(&self) -> bool {
        match self {
            Output::Table { .. } => true,
            Output::Report(r) => r.passed(),
        }
    }
}

pub fn emit(command: &str, params: &Params, out: Output) -> Result<(), Failure> {
    let format = params.raw("format").unwrap_or("csv");
    let sink: Box<dyn Write> = match params.raw("out") {
        None | Some("-") => Box::new(io::stdout().lock()),
        Some(path) => Box::new(File::create(path).map_err(|e| Failure::Runtime(format!("cannot create {path}: {e}")))?),
    };
    let mut w = BufWriter::new(sink);
    match format {
        "csv" => write_csv(&mut w, command, params, &out)?,
        "json" => write_json(&mut w, command, params, &out)?,
        other => return Err(Failure::Usage(format!("unknown format {other:?} (csv or json)"))),
    }
    w.flush()?;
    Ok(())
}

fn write_csv<W: Write>(w: &mut W, command: &str, params: &Params, out: &Output) -> io::Result<()> {
    writeln!(w, "# fpp {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(w, "# command: {command}")?;
    for (k, v) in params.echoed() {
        writeln!(w, "# {k}={v}")?;
    }
    match out {
        Output::Table { columns, rows } => {
            writeln!(w, "{}", columns.join(","))?;
            for row in rows {
                let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                writeln!(w, "{}", cells.join(","))?;
            }
        }
        Output::Report(r) => {
            writeln!(w, "# experiment: {}", r.name)?;
            writeln!(w, "# verdict: {}", if r.passed() { "pass" } else { "fail" })?;
            writeln!(w, "# replications_used: {}", r.replications_used)?;
            writeln!(w, "# replications_discarded: {}", r.replications_discarded)?;
            r.write_csv(w)?;
        }
    }
    Ok(())
}

fn write_json<W: Write>(w: &mut W, command: &str, params: &Params, out: &Output) -> io::Result<()> {
    let config: Map<String, Value> = params.echoed().map(|(k, v)| (k.to_string(), json!(v))).collect();
    let meta = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
    });
    let doc = match out {
        Output::Table { columns, rows } => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                .collect();
            json!({ "meta": meta, "columns": columns, "rows": rows })
        }
        Output::Report(r) => json!({
            "meta": meta,
            "verdict": if r.passed() { "pass" } else { "fail" },
            "report": r,
        }),
    };
    serde_json::to_writer_pretty(&mut *w, &doc)?;
    writeln!(w)
}
