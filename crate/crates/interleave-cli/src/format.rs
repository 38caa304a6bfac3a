//! File formats: the mapper-graph JSON interchange format, loss and search
//! reports as JSON, and the CSV artifacts for distance and confusion
//! matrices.
//!
//! The graph format is a stable contract: an object with `delta`,
//! `half_range`, `vertices` (array of `{id, level}`), and `edges` (array of
//! `{id, lower, upper}` referring to vertex ids).

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use interleave_core::{Grid, MapperGraph, SearchTrace, Solved, Value};
use interleave_core::loss::LossReport;
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VertexRec {
    pub id: String,
    pub level: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeRec {
    pub id: String,
    pub lower: String,
    pub upper: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphFile {
    pub delta: f64,
    pub half_range: i64,
    pub vertices: Vec<VertexRec>,
    pub edges: Vec<EdgeRec>,
}

impl GraphFile {
    pub fn from_graph(g: &MapperGraph) -> GraphFile {
        GraphFile {
            delta: g.grid().delta(),
            half_range: g.grid().half_range(),
            vertices: (0..g.vertex_count())
                .map(|v| VertexRec { id: g.vertex_name(v).to_string(), level: g.vertex_level(v) })
                .collect(),
            edges: (0..g.edge_count())
                .map(|e| {
                    let (lo, up) = g.edge(e);
                    EdgeRec {
                        id: g.edge_name(e).to_string(),
                        lower: g.vertex_name(lo).to_string(),
                        upper: g.vertex_name(up).to_string(),
                    }
                })
                .collect(),
        }
    }

    pub fn into_graph(self) -> Result<MapperGraph> {
        let grid = Grid::new(self.delta, self.half_range)
            .map_err(|e| anyhow::anyhow!("bad grid: {e}"))?;
        let vertices = self.vertices.into_iter().map(|v| (v.id, v.level)).collect();
        let edges = self.edges.into_iter().map(|e| (e.id, e.lower, e.upper)).collect();
        MapperGraph::build(grid, vertices, edges).map_err(|e| anyhow::anyhow!("bad graph: {e}"))
    }
}

pub fn read_graph(path: &Path) -> Result<MapperGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: GraphFile =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    file.into_graph().with_context(|| format!("validating {}", path.display()))
}

pub fn write_graph(path: &Path, g: &MapperGraph) -> Result<()> {
    let text = serde_json::to_string_pretty(&GraphFile::from_graph(g))?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// `Fin(x)` as a JSON number, `Unbounded` as the string `"inf"`.
pub fn value_json(v: Value) -> serde_json::Value {
    match v {
        Value::Fin(x) => json!(x),
        Value::Unbounded => json!("inf"),
    }
}

pub fn parse_value(s: &str) -> Result<Value> {
    if s == "inf" {
        return Ok(Value::Unbounded);
    }
    Ok(Value::Fin(s.parse::<i64>().with_context(|| format!("bad value {s:?}"))?))
}

pub fn report_json(r: &LossReport) -> serde_json::Value {
    json!({
        "n": r.n,
        "loss": value_json(r.loss),
        "bound": value_json(r.bound()),
        "is_interleaving": r.is_interleaving(),
        "terms": r.terms.iter().map(|t| json!({
            "term": t.term.name(),
            "value": value_json(t.value),
            "witness": t.witness,
        })).collect::<Vec<_>>(),
    })
}

pub fn solved_json(s: &Solved) -> serde_json::Value {
    json!({
        "report": report_json(&s.report),
        "lower_bound": value_json(s.lower_bound),
        "nodes": s.nodes,
        "proven_optimal": s.proven_optimal,
    })
}

pub fn trace_json(t: &SearchTrace) -> serde_json::Value {
    json!({
        "bound": value_json(t.bound),
        "best_n": t.best_n,
        "proven": t.proven,
        "steps": t.steps.iter().map(|s| json!({
            "n": s.n,
            "loss": value_json(s.loss),
            "lower": value_json(s.lower),
            "bound": value_json(s.bound),
            "nodes": s.nodes,
        })).collect::<Vec<_>>(),
        "best": t.best.as_ref().map(solved_json),
    })
}

/// Labeled square matrix of bounds, the pairwise-distance artifact.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    pub labels: Vec<String>,
    pub values: Vec<Vec<Value>>,
}

impl DistanceMatrix {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("name");
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for (i, row) in self.values.iter().enumerate() {
            out.push_str(&self.labels[i]);
            for v in row {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<DistanceMatrix> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().context("empty matrix file")?;
        let labels: Vec<String> = header.split(',').skip(1).map(str::to_string).collect();
        let mut values = Vec::new();
        for (i, line) in lines.enumerate() {
            let mut cells = line.split(',');
            let name = cells.next().context("missing row label")?;
            if i >= labels.len() || name != labels[i] {
                bail!("row label {name:?} does not match header");
            }
            let row: Vec<Value> = cells.map(parse_value).collect::<Result<_>>()?;
            if row.len() != labels.len() {
                bail!("row {name:?} has {} cells, expected {}", row.len(), labels.len());
            }
            values.push(row);
        }
        if values.len() != labels.len() {
            bail!("matrix has {} rows, expected {}", values.len(), labels.len());
        }
        Ok(DistanceMatrix { labels, values })
    }
}

/// `name,label` per line, with a header row.
pub fn write_labels(path: &Path, pairs: &[(String, String)]) -> Result<()> {
    let mut out = String::from("name,label\n");
    for (name, label) in pairs {
        out.push_str(&format!("{name},{label}\n"));
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn read_labels(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || (i == 0 && line.starts_with("name,")) {
            continue;
        }
        let (name, label) = line.split_once(',').with_context(|| format!("bad label line {line:?}"))?;
        pairs.push((name.to_string(), label.to_string()));
    }
    Ok(pairs)
}

/// Point cloud CSV: `x,y` per line, optional header.
pub fn read_cloud_csv(path: &Path) -> Result<interleave_core::cloud::PointCloud2D> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (x, y) = line.split_once(',').with_context(|| format!("bad cloud line {line:?}"))?;
        match (x.trim().parse::<f64>(), y.trim().parse::<f64>()) {
            (Ok(x), Ok(y)) => points.push([x, y]),
            _ if i == 0 => continue, // header
            _ => bail!("bad cloud line {line:?}"),
        }
    }
    Ok(interleave_core::cloud::PointCloud2D::new(points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use interleave_core::gen::torus_mapper;

    #[test]
    fn graph_roundtrip_is_exact() {
        let g = torus_mapper(-4, 4, -2, 2);
        let file = GraphFile::from_graph(&g);
        let text = serde_json::to_string_pretty(&file).unwrap();
        let back: GraphFile = serde_json::from_str(&text).unwrap();
        let h = back.into_graph().unwrap();
        assert_eq!(GraphFile::from_graph(&h).vertices.len(), file.vertices.len());
        let text2 = serde_json::to_string_pretty(&GraphFile::from_graph(&h)).unwrap();
        assert_eq!(text, text2);
    }

    #[test]
    fn matrix_csv_roundtrip() {
        let m = DistanceMatrix {
            labels: vec!["a".into(), "b".into()],
            values: vec![
                vec![Value::Fin(0), Value::Unbounded],
                vec![Value::Unbounded, Value::Fin(0)],
            ],
        };
        let back = DistanceMatrix::from_csv(&m.to_csv()).unwrap();
        assert_eq!(back, m);
    }
}
