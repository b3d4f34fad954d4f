//! Plain-text node files.
//!
//! ```text
//! # d=2 n=99
//! 0.10 0.20
//! 0.105 0.20
//! ```
//!
//! The header line is required; further lines starting with `#` and blank
//! lines are ignored.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::NodeSet;

pub fn parse_nodes(text: &str) -> Result<NodeSet> {
    let mut header: Option<(usize, usize)> = None;
    let mut coords = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if header.is_none() {
                header = parse_header(rest).map_err(|message| Error::Parse { line: line_no, message })?;
            }
            continue;
        }
        let (d, _) = header.ok_or_else(|| Error::Parse {
            line: line_no,
            message: "missing '# d=<d> n=<n>' header before first node".into(),
        })?;
        let mut count = 0;
        for tok in line.split_whitespace() {
            let x: f64 = tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("not a number: {tok:?}"),
            })?;
            coords.push(x);
            count += 1;
        }
        if count != d {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {d} coordinates, found {count}"),
            });
        }
    }
    let (d, n) = header.ok_or_else(|| Error::Parse {
        line: 0,
        message: "missing '# d=<d> n=<n>' header".into(),
    })?;
    NodeSet::from_flat(d, n, coords)
}

// Returns Ok(None) for ordinary comment lines.
fn parse_header(rest: &str) -> std::result::Result<Option<(usize, usize)>, String> {
    let mut d = None;
    let mut n = None;
    for tok in rest.split_whitespace() {
        if let Some(v) = tok.strip_prefix("d=") {
            d = Some(v.parse::<usize>().map_err(|e| format!("bad d: {e}"))?);
        } else if let Some(v) = tok.strip_prefix("n=") {
            n = Some(v.parse::<usize>().map_err(|e| format!("bad n: {e}"))?);
        }
    }
    match (d, n) {
        (Some(d), Some(n)) => Ok(Some((d, n))),
        (None, None) => Ok(None),
        _ => Err("header needs both d=<d> and n=<n>".into()),
    }
}

pub fn read_nodes(path: impl AsRef<Path>) -> Result<NodeSet> {
    parse_nodes(&std::fs::read_to_string(path)?)
}

pub fn format_nodes(ns: &NodeSet) -> String {
    let mut out = format!("# d={} n={}\n", ns.dim(), ns.degree());
    for node in ns.nodes() {
        let line: Vec<String> = node.iter().map(|x| format!("{x:.17e}")).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

pub fn write_nodes(path: impl AsRef<Path>, ns: &NodeSet) -> Result<()> {
    std::fs::write(path, format_nodes(ns))?;
    Ok(())
}
