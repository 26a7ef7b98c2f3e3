//! Edge-list and JSON graph files with arbitrary vertex labels.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Input file format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Edgelist,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edgelist" => Ok(Format::Edgelist),
            "json" => Ok(Format::Json),
            _ => Err(Error::Input(format!("unknown format '{s}' (expected edgelist or json)"))),
        }
    }
}

/// A graph with the original label of every vertex.
#[derive(Clone, Debug)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub labels: Vec<String>,
}

impl LabeledGraph {
    /// Labels are the decimal vertex ids.
    pub fn unlabeled(graph: Graph) -> Self {
        let labels = (0..graph.n()).map(|v| v.to_string()).collect();
        LabeledGraph { graph, labels }
    }

    /// Vertex id of `label`.
    pub fn index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Input(format!("unknown vertex label '{label}'")))
    }

    pub fn relabel(&self, set: &[usize]) -> Vec<String> {
        set.iter().map(|&v| self.labels[v].clone()).collect()
    }
}

struct Interner {
    ids: HashMap<String, usize>,
    labels: Vec<String>,
}

impl Interner {
    fn new() -> Self {
        Interner { ids: HashMap::new(), labels: Vec::new() }
    }

    fn id(&mut self, label: &str) -> usize {
        if let Some(&i) = self.ids.get(label) {
            return i;
        }
        self.labels.push(label.to_string());
        self.ids.insert(label.to_string(), self.labels.len() - 1);
        self.labels.len() - 1
    }
}

/// Parses `u v [w]` lines. A line with a single token declares an isolated
/// vertex; `#` and `%` start comments. Labels are numbered by first
/// appearance.
pub fn parse_edgelist(text: &str) -> Result<LabeledGraph> {
    let mut names = Interner::new();
    let mut edges = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split(['#', '%']).next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        match tok.len() {
            1 => {
                names.id(tok[0]);
            }
            2 | 3 => {
                let w = match tok.get(2) {
                    Some(t) => t
                        .parse::<f64>()
                        .map_err(|_| Error::Input(format!("line {}: bad weight '{t}'", no + 1)))?,
                    None => 1.0,
                };
                let (u, v) = (names.id(tok[0]), names.id(tok[1]));
                edges.push((u, v, w));
            }
            _ => return Err(Error::Input(format!("line {}: expected 'u v [w]'", no + 1))),
        }
    }
    let n = names.labels.len();
    let graph = Graph::new(n, edges).map_err(|e| Error::Input(format!("edge list: {e}")))?;
    Ok(LabeledGraph { graph, labels: names.labels })
}

/// JSON graph document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphDoc {
    /// Vertex count; defaults to the number of distinct labels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Optional labels for `0..n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    /// `[u, v]` or `[u, v, w]`, with integer ids or string labels.
    pub edges: Vec<Vec<serde_json::Value>>,
}

fn label_of(v: &serde_json::Value) -> Result<String> {
    match v {
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Number(x) if x.is_u64() => Ok(x.to_string()),
        _ => Err(Error::Input(format!("vertex must be a label or a non-negative integer, got {v}"))),
    }
}

/// Integer endpoints are vertex ids (with `n` defaulting to the largest id
/// plus one); if any endpoint is a string, every endpoint is a label.
pub fn parse_json(text: &str) -> Result<LabeledGraph> {
    let doc: GraphDoc = serde_json::from_str(text)?;
    let mut raw = Vec::with_capacity(doc.edges.len());
    for (i, e) in doc.edges.iter().enumerate() {
        if !(2..=3).contains(&e.len()) {
            return Err(Error::Input(format!("edge {i} must have 2 or 3 entries")));
        }
        let w = match e.get(2) {
            Some(x) => x.as_f64().ok_or_else(|| Error::Input(format!("edge {i} has a non-numeric weight")))?,
            None => 1.0,
        };
        raw.push((label_of(&e[0])?, label_of(&e[1])?, w));
    }
    let by_label = doc.edges.iter().any(|e| e[0].is_string() || e[1].is_string());
    let (n, labels, edges) = if by_label {
        let mut names = Interner::new();
        for l in doc.labels.iter().flatten() {
            if names.ids.contains_key(l) {
                return Err(Error::Input(format!("duplicate label '{l}'")));
            }
            names.id(l);
        }
        let edges: Vec<_> = raw.iter().map(|(a, b, w)| (names.id(a), names.id(b), *w)).collect();
        (names.labels.len(), names.labels, edges)
    } else {
        let ids: Vec<(usize, usize, f64)> =
            raw.iter().map(|(a, b, w)| (a.parse().unwrap(), b.parse().unwrap(), *w)).collect();
        let top = ids.iter().map(|e| e.0.max(e.1) + 1).max().unwrap_or(0);
        let n = doc.n.or(doc.labels.as_ref().map(Vec::len)).unwrap_or(top);
        if top > n {
            return Err(Error::Input(format!("edge names vertex {} but n={n}", top - 1)));
        }
        let labels = doc.labels.clone().unwrap_or_else(|| (0..n).map(|v| v.to_string()).collect());
        if labels.len() != n {
            return Err(Error::Input(format!("{} labels for n={n}", labels.len())));
        }
        (n, labels, ids)
    };
    let graph = Graph::new(n, edges)?;
    Ok(LabeledGraph { graph, labels })
}

pub fn parse(text: &str, format: Format) -> Result<LabeledGraph> {
    match format {
        Format::Edgelist => parse_edgelist(text),
        Format::Json => parse_json(text),
    }
}

pub fn load(path: &Path, format: Format) -> Result<LabeledGraph> {
    parse(&std::fs::read_to_string(path)?, format)
}

/// Writes `u v w` lines, declaring isolated vertices on their own lines.
pub fn to_edgelist(g: &LabeledGraph) -> String {
    let mut out = String::new();
    let mut seen = vec![false; g.graph.n()];
    for &(u, v, _) in g.graph.edges() {
        seen[u] = true;
        seen[v] = true;
    }
    for (v, l) in g.labels.iter().enumerate() {
        if !seen[v] {
            let _ = writeln!(out, "{l}");
        }
    }
    for &(u, v, w) in g.graph.edges() {
        let _ = writeln!(out, "{} {} {}", g.labels[u], g.labels[v], w);
    }
    out
}

pub fn to_json(g: &LabeledGraph) -> Result<String> {
    let doc = GraphDoc {
        n: Some(g.graph.n()),
        labels: Some(g.labels.clone()),
        edges: g
            .graph
            .edges()
            .iter()
            .map(|&(u, v, w)| vec![u.into(), v.into(), serde_json::json!(w)])
            .collect(),
    };
    Ok(serde_json::to_string(&doc)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edgelist_remaps_labels_in_order() {
        let g = parse_edgelist("# demo\nb a 2\na c\nlonely\n").unwrap();
        assert_eq!(g.labels, vec!["b", "a", "c", "lonely"]);
        assert_eq!(g.graph.n(), 4);
        assert_eq!(g.graph.weight(0, 1), 2.0);
        assert_eq!(g.index("c").unwrap(), 2);
    }

    #[test]
    fn json_round_trip() {
        let g = parse_json(r#"{"edges": [["x", "y", 1.5], ["y", "z"]]}"#).unwrap();
        let back = parse_json(&to_json(&g).unwrap()).unwrap();
        assert_eq!(back.graph.edges(), g.graph.edges());
        assert_eq!(back.labels, g.labels);
        let again = parse_edgelist(&to_edgelist(&g)).unwrap();
        assert_eq!(again.graph.edges(), g.graph.edges());
    }

    #[test]
    fn malformed_lines_are_input_errors() {
        assert!(matches!(parse_edgelist("a b c d"), Err(Error::Input(_))));
        assert!(matches!(parse_edgelist("a a"), Err(Error::Input(_))));
        assert!(matches!(parse_json(r#"{"n": 2, "edges": [[0, 5]]}"#), Err(Error::Input(_))));
    }
}
