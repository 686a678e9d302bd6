//! Edge-list text format.
//!
//! ```text
//! n m root
//! u v
//! ...
//! ```
//!
//! One header line, then `m` lines with 0-based endpoints, whitespace
//! separated. Lines are numbered from 1 in parse errors.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::graph::RootedGraph;
use crate::error::{Error, Result};

pub fn write_edge_list(g: &RootedGraph) -> String {
    let mut out = String::with_capacity(16 * (g.m() + 1));
    let _ = writeln!(out, "{} {} {}", g.n(), g.m(), g.root());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

fn parse_fields<const K: usize>(line: &str, lineno: usize) -> Result<[u64; K]> {
    let mut out = [0u64; K];
    let mut it = line.split_whitespace();
    for (i, slot) in out.iter_mut().enumerate() {
        let tok = it.next().ok_or_else(|| Error::Parse {
            line: lineno,
            msg: format!("expected {K} fields, found {i}"),
        })?;
        *slot = tok.parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("not a nonnegative integer: {tok:?}"),
        })?;
    }
    if let Some(extra) = it.next() {
        return Err(Error::Parse {
            line: lineno,
            msg: format!("unexpected trailing field {extra:?}"),
        });
    }
    Ok(out)
}

pub fn read_edge_list(text: &str) -> Result<RootedGraph> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (hl, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing header".into(),
    })?;
    let [n, m, root] = parse_fields::<3>(header, hl)?;
    let mut edges = Vec::with_capacity(m as usize);
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        if edges.len() as u64 == m {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("more than the declared {m} edges"),
            });
        }
        let [u, v] = parse_fields::<2>(line, lineno)?;
        if u >= n || v >= n {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("endpoint outside 0..{n}"),
            });
        }
        edges.push((u as u32, v as u32));
    }
    if edges.len() as u64 != m {
        return Err(Error::Parse {
            line: text.lines().count() + 1,
            msg: format!("expected {m} edges, found {}", edges.len()),
        });
    }
    RootedGraph::new(n as usize, edges, root as usize)
}

pub fn write_edge_list_file(g: &RootedGraph, path: &Path) -> Result<()> {
    fs::write(path, write_edge_list(g)).map_err(|e| Error::io(path, e))
}

pub fn read_edge_list_file(path: &Path) -> Result<RootedGraph> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    read_edge_list(&text)
}
