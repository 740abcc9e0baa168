//! Plain-text formats.
//!
//! JDM: `#` starts a comment line; the first remaining line lists the degree
//! values, the next `k` lines the matrix rows.
//!
//! Realization: `v <id> <class>` lines, then `e <u> <v>` lines with `u < v`.
//! Ids are 0-based and contiguous.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::jdm::{JointDegreeMatrix, Realization};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_ints<T: std::str::FromStr>(line: usize, s: &str) -> Result<Vec<T>> {
    s.split_whitespace()
        .map(|t| {
            t.parse().map_err(|_| Error::Parse {
                line,
                message: format!("expected a non-negative integer, found {t:?}"),
            })
        })
        .collect()
}

pub fn parse_jdm(text: &str) -> Result<JointDegreeMatrix> {
    let mut lines = content_lines(text);
    let (first, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing degree line".into(),
    })?;
    let degrees: Vec<u32> = parse_ints(first, header)?;
    let mut rows = Vec::with_capacity(degrees.len());
    for _ in 0..degrees.len() {
        let (line, row) = lines.next().ok_or(Error::Parse {
            line: first,
            message: format!("expected {} matrix rows", degrees.len()),
        })?;
        let row: Vec<u64> = parse_ints(line, row)?;
        if row.len() != degrees.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} entries, found {}", degrees.len(), row.len()),
            });
        }
        rows.push(row);
    }
    if let Some((line, _)) = lines.next() {
        return Err(Error::Parse {
            line,
            message: "trailing content after the matrix".into(),
        });
    }
    JointDegreeMatrix::new(degrees, rows)
}

pub fn write_jdm(jdm: &JointDegreeMatrix) -> String {
    jdm.to_string()
}

pub fn write_realization(g: &Realization) -> String {
    let mut out = String::new();
    for v in 0..g.num_vertices() {
        writeln!(out, "v {v} {}", g.class_of(v)).unwrap();
    }
    for (u, v) in g.edges() {
        writeln!(out, "e {u} {v}").unwrap();
    }
    out
}

/// Parses a realization whose class degrees come from `jdm`.
pub fn parse_realization(text: &str, jdm: &JointDegreeMatrix) -> Result<Realization> {
    let mut class_of = Vec::new();
    let mut edges = Vec::new();
    for (line, l) in content_lines(text) {
        let mut parts = l.split_whitespace();
        let tag = parts.next().unwrap_or_default();
        let nums: Vec<usize> = parse_ints(line, &parts.collect::<Vec<_>>().join(" "))?;
        let bad = |message: &str| Error::Parse {
            line,
            message: message.into(),
        };
        match (tag, nums.as_slice()) {
            ("v", &[id, class]) => {
                if !edges.is_empty() {
                    return Err(bad("vertex line after edge lines"));
                }
                if id != class_of.len() {
                    return Err(bad("vertex ids must be contiguous from 0"));
                }
                if class >= jdm.num_classes() {
                    return Err(bad("unknown class index"));
                }
                class_of.push(class);
            }
            ("e", &[u, v]) => {
                if u >= v {
                    return Err(bad("edge endpoints must satisfy u < v"));
                }
                edges.push((u, v));
            }
            _ => return Err(bad("expected `v <id> <class>` or `e <u> <v>`")),
        }
    }
    Realization::new(jdm.degrees().to_vec(), class_of, edges)
}

/// Several realizations, separated by blank lines.
pub fn write_realizations<'a>(gs: impl IntoIterator<Item = &'a Realization>) -> String {
    gs.into_iter()
        .map(write_realization)
        .collect::<Vec<_>>()
        .join("\n")
}
