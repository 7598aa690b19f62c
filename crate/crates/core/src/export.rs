//! Artifact writers: incidence matrix as CSV, bipartite node/symbol graph as DOT.

use std::fmt::Write as _;

use crate::code::FrCode;
use crate::error::{Error, Result};

/// Rows are nodes, columns symbols; a header row names the columns.
pub fn incidence_csv(code: &FrCode) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = std::iter::once("node".to_string())
        .chain((0..code.theta()).map(|s| format!("s{s}")))
        .collect();
    w.write_record(&header).map_err(csv_err)?;
    for (i, row) in code.incidence_matrix().iter().enumerate() {
        let record: Vec<String> = std::iter::once(format!("v{i}"))
            .chain(row.iter().map(u8::to_string))
            .collect();
        w.write_record(&record).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Node-symbol incidence as an undirected bipartite DOT graph. Local codes,
/// when known, become clusters.
pub fn incidence_dot(code: &FrCode) -> String {
    let mut out = format!("graph \"{}\" {{\n  rankdir=LR;\n", code.name().replace('"', "'"));
    let groups = code
        .local_partition()
        .unwrap_or_else(|| vec![(0..code.n()).collect()]);
    let clustered = groups.len() > 1;
    for (g, group) in groups.iter().enumerate() {
        if clustered {
            let _ = writeln!(out, "  subgraph cluster_{g} {{\n    label=\"local {g}\";");
        }
        for &v in group {
            let _ = writeln!(out, "    v{v} [shape=box];");
        }
        if clustered {
            out.push_str("  }\n");
        }
    }
    for s in 0..code.theta() {
        let _ = writeln!(out, "  s{s} [shape=circle];");
    }
    for (i, node) in code.nodes().iter().enumerate() {
        for s in node {
            let _ = writeln!(out, "  v{i} -- s{s};");
        }
    }
    out.push_str("}\n");
    out
}
