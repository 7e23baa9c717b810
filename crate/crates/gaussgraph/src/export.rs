//! DOT and JSON renderings of a complex graph `Z = V + iU`.

use std::fmt::Write;
use std::str::FromStr;

use gaussgraph_core::prelude::*;
use serde::Serialize;
use std::result::Result;

use crate::io::row_major;

/// Entries with magnitude at or below this are not drawn.
pub const DEFAULT_EDGE_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Dot,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dot" => Ok(Format::Dot),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected dot or json)")),
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "UPPERCASE")]
struct GraphJson {
    #[serde(rename = "n")]
    n: usize,
    v: Vec<f64>,
    u: Vec<f64>,
}

/// Real edges `|V_jk| > threshold` in ascending order, `j < k`, 1-based.
pub fn real_edges(g: &ComplexGraph, threshold: f64) -> Vec<(usize, usize)> {
    let n = g.modes();
    let mut out = Vec::new();
    for j in 0..n {
        for k in (j + 1)..n {
            if g.v[(j, k)].abs() > threshold {
                out.push((j + 1, k + 1));
            }
        }
    }
    out
}

/// Connected components of the real graph, each sorted, ordered by smallest vertex (1-based).
pub fn real_components(g: &ComplexGraph, threshold: f64) -> Vec<Vec<usize>> {
    let n = g.modes();
    let mut label: Vec<Option<usize>> = vec![None; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if label[start].is_some() {
            continue;
        }
        let id = comps.len();
        let mut stack = vec![start];
        let mut members = Vec::new();
        label[start] = Some(id);
        while let Some(j) = stack.pop() {
            members.push(j + 1);
            for (k, l) in label.iter_mut().enumerate() {
                if k != j && l.is_none() && g.v[(j, k)].abs() > threshold {
                    *l = Some(id);
                    stack.push(k);
                }
            }
        }
        members.sort_unstable();
        comps.push(members);
    }
    comps
}

pub fn export_graph(g: &ComplexGraph, format: Format, threshold: f64) -> String {
    match format {
        Format::Json => {
            let json = GraphJson {
                n: g.modes(),
                v: row_major(&g.v),
                u: row_major(&g.u),
            };
            let mut s = serde_json::to_string_pretty(&json).expect("serialisable graph");
            s.push('\n');
            s
        }
        Format::Dot => to_dot(g, threshold),
    }
}

fn to_dot(g: &ComplexGraph, threshold: f64) -> String {
    let n = g.modes();
    let mut s = String::from("graph Z {\n  node [shape=circle];\n");
    for j in 1..=n {
        let _ = writeln!(s, "  {j};");
    }
    for j in 0..n {
        for k in j..n {
            let w = g.v[(j, k)];
            if w.abs() > threshold {
                let _ = writeln!(
                    s,
                    "  {} -- {} [style=solid, label=\"{w:.6}\"];",
                    j + 1,
                    k + 1
                );
            }
        }
    }
    for j in 0..n {
        for k in j..n {
            let w = g.u[(j, k)];
            if w.abs() > threshold {
                let _ = writeln!(
                    s,
                    "  {} -- {} [style=dashed, label=\"i{w:.6}\"];",
                    j + 1,
                    k + 1
                );
            }
        }
    }
    s.push_str("}\n");
    s
}
