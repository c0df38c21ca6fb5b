//! Trace files: a `# key=value` comment block, a column header, then rows.
//! Floats use Rust's shortest round-trip `{:e}` form, so output is
//! locale-free and byte-for-byte reproducible.

use std::fmt::Write as _;
use std::path::Path;

use crate::diagnostics::Report;
use crate::error::{Error, Result};
use crate::flows::FlowTrace;
use crate::solvers::{IterateTrace, TraceRow};

pub const TRACE_COLUMNS: &str = "k,f,gap,disc_err,gamma,beta,atom_id";
pub const FLOW_COLUMNS: &str = "t,f,gap,disc_err,h";

pub fn trace_csv(header: &Report, trace: &IterateTrace) -> String {
    let mut out = header.as_comment_block();
    out.push_str(TRACE_COLUMNS);
    out.push('\n');
    for r in &trace.rows {
        let id = r.atom_id.map(|i| i.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{:e},{:e},{:e},{:e},{:e},{id}",
            r.k, r.f_value, r.gap, r.disc_err, r.gamma, r.beta
        );
    }
    out
}

pub fn flow_csv(header: &Report, trace: &FlowTrace) -> String {
    let mut out = header.as_comment_block();
    out.push_str(FLOW_COLUMNS);
    out.push('\n');
    for s in &trace.samples {
        let _ = writeln!(
            out,
            "{:e},{:e},{:e},{:e},{:e}",
            s.t, s.f_value, s.gap, s.disc_err, s.h
        );
    }
    out
}

/// A trace file read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceFile {
    pub header: Report,
    pub rows: Vec<TraceRow>,
}

pub fn parse_trace_csv(text: &str) -> Result<TraceFile> {
    let mut comments = String::new();
    let mut rows = Vec::new();
    let mut seen_header = false;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let parse_err = |msg: String| Error::Parse { line: line_no, msg };
        if line.starts_with('#') {
            comments.push_str(line);
            comments.push('\n');
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        if !seen_header {
            if line.trim() != TRACE_COLUMNS {
                return Err(parse_err(format!(
                    "expected column header {TRACE_COLUMNS:?}"
                )));
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(parse_err(format!(
                "expected 7 fields, found {}",
                fields.len()
            )));
        }
        let num = |j: usize| -> Result<f64> {
            fields[j]
                .trim()
                .parse::<f64>()
                .map_err(|_| parse_err(format!("bad number {:?}", fields[j])))
        };
        let k = fields[0]
            .trim()
            .parse::<u64>()
            .map_err(|_| parse_err(format!("bad iteration {:?}", fields[0])))?;
        let atom_id = match fields[6].trim() {
            "" => None,
            s => Some(
                s.parse::<i64>()
                    .map_err(|_| parse_err(format!("bad atom id {s:?}")))?,
            ),
        };
        rows.push(TraceRow {
            k,
            f_value: num(1)?,
            gap: num(2)?,
            disc_err: num(3)?,
            gamma: num(4)?,
            beta: num(5)?,
            atom_id,
        });
    }
    if !seen_header {
        return Err(Error::Parse {
            line: text.lines().count(),
            msg: "no column header found".into(),
        });
    }
    Ok(TraceFile {
        header: Report::parse(&comments),
        rows,
    })
}

pub fn read_trace_csv(path: &Path) -> Result<TraceFile> {
    parse_trace_csv(&std::fs::read_to_string(path)?)
}
