use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Simple undirected graph. Edges are stored as `(min, max)` pairs sorted
/// lexicographically; an edge's position in the list is its symbol label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop at vertex {u}")));
            }
            for x in [u, v] {
                if x >= vertex_count {
                    return Err(Error::IndexOutOfRange {
                        index: x,
                        len: vertex_count,
                    });
                }
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidParameter(format!("duplicate edge {u}-{v}")));
            }
        }
        Ok(Graph {
            vertex_count,
            edges: set.into_iter().collect(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    /// The common degree, or the first vertex that breaks regularity.
    pub fn regular_degree(&self) -> Result<usize> {
        let adj = self.adjacency();
        let s = adj.first().map_or(0, Vec::len);
        match adj.iter().position(|a| a.len() != s) {
            None => Ok(s),
            Some(v) => Err(Error::NonRegularGraph {
                vertex: v,
                degree: adj[v].len(),
                expected: s,
            }),
        }
    }

    /// Length of the shortest cycle, `None` for forests.
    pub fn girth(&self) -> Option<usize> {
        let adj = self.adjacency();
        let mut best = usize::MAX;
        for root in 0..self.vertex_count {
            let mut dist = vec![usize::MAX; self.vertex_count];
            let mut parent = vec![usize::MAX; self.vertex_count];
            dist[root] = 0;
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                if 2 * dist[u] >= best {
                    break;
                }
                for &w in &adj[u] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        parent[w] = u;
                        queue.push_back(w);
                    } else if parent[u] != w {
                        best = best.min(dist[u] + dist[w] + 1);
                    }
                }
            }
        }
        (best != usize::MAX).then_some(best)
    }

    /// Parses "u v" lines (0-indexed); `#` starts a comment.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        let mut max = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("line {}: bad vertex {s:?}", lineno + 1)))
            };
            if parts.len() != 2 {
                return Err(Error::Parse(format!(
                    "line {}: expected two vertices",
                    lineno + 1
                )));
            }
            let (u, v) = (parse(parts[0])?, parse(parts[1])?);
            max = max.max(Some(u.max(v)));
            edges.push((u, v));
        }
        Graph::new(max.map_or(0, |m| m + 1), edges)
    }

    pub fn to_edge_list(&self) -> String {
        self.edges.iter().map(|(a, b)| format!("{a} {b}\n")).collect()
    }

    /// DOT rendering with each edge labelled by its symbol index.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("graph \"{name}\" {{\n");
        for v in 0..self.vertex_count {
            let _ = writeln!(out, "  {v};");
        }
        for (i, (a, b)) in self.edges.iter().enumerate() {
            let _ = writeln!(out, "  {a} -- {b} [label=\"{i}\"];");
        }
        out.push_str("}\n");
        out
    }

    pub fn petersen() -> Self {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        Graph::new(10, outer.chain(spokes).chain(inner)).expect("petersen")
    }

    /// Heawood graph, LCF notation [5, -5]^7.
    pub fn heawood() -> Self {
        let ring = (0..14).map(|i| (i, (i + 1) % 14));
        let chords = (0..14).step_by(2).map(|i| (i, (i + 5) % 14));
        Graph::new(14, ring.chain(chords)).expect("heawood")
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
        Graph::new(n, edges).expect("complete")
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let edges = (0..a).flat_map(|x| (0..b).map(move |y| (x, a + y)));
        Graph::new(a + b, edges).expect("complete bipartite")
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("cycle needs n >= 3, got {n}")));
        }
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }
}

/// Named graphs used as inputs to the edge-to-node construction.
pub fn graph_catalog(name: &str, params: &[usize]) -> Result<Graph> {
    let want = |count: usize| -> Result<()> {
        if params.len() != count {
            return Err(Error::InvalidParameter(format!(
                "{name} takes {count} parameter(s), got {}",
                params.len()
            )));
        }
        Ok(())
    };
    match name {
        "petersen" => {
            want(0)?;
            Ok(Graph::petersen())
        }
        "heawood" => {
            want(0)?;
            Ok(Graph::heawood())
        }
        "complete" => {
            want(1)?;
            if params[0] < 2 {
                return Err(Error::InvalidParameter("complete graph needs n >= 2".into()));
            }
            Ok(Graph::complete(params[0]))
        }
        "complete_bipartite" | "complete-bipartite" => {
            want(2)?;
            if params[0] == 0 || params[1] == 0 {
                return Err(Error::InvalidParameter("both sides must be nonempty".into()));
            }
            Ok(Graph::complete_bipartite(params[0], params[1]))
        }
        "cycle" => {
            want(1)?;
            Graph::cycle(params[0])
        }
        other => Err(Error::InvalidParameter(format!("unknown graph {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_shapes() {
        let p = graph_catalog("petersen", &[]).unwrap();
        assert_eq!((p.vertex_count(), p.edges().len()), (10, 15));
        assert_eq!(p.regular_degree().unwrap(), 3);
        let k4 = graph_catalog("complete", &[4]).unwrap();
        assert_eq!(k4.edges(), &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let c7 = graph_catalog("cycle", &[7]).unwrap();
        assert_eq!(c7.girth(), Some(7));
        assert!(graph_catalog("dodecahedron", &[]).is_err());
        assert!(graph_catalog("complete", &[]).is_err());
    }

    #[test]
    fn girths() {
        assert_eq!(Graph::petersen().girth(), Some(5));
        assert_eq!(Graph::complete(4).girth(), Some(3));
        assert_eq!(Graph::heawood().girth(), Some(6));
        assert_eq!(Graph::heawood().regular_degree().unwrap(), 3);
        assert_eq!(Graph::complete_bipartite(3, 3).girth(), Some(4));
        let path = Graph::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(path.girth(), None);
    }

    #[test]
    fn rejects_non_simple() {
        assert!(Graph::new(3, [(0, 0)]).is_err());
        assert!(Graph::new(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(2, [(0, 2)]).is_err());
    }

    #[test]
    fn edge_list_round_trip() {
        let text = "# petersen-ish\n0 1\n1 2 # inline\n\n2 0\n";
        let g = Graph::from_edge_list(text).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 2)]);
        assert_eq!(Graph::from_edge_list(&g.to_edge_list()).unwrap(), g);
        assert!(Graph::from_edge_list("0 1 2").is_err());
        assert!(Graph::from_edge_list("0 x").is_err());
    }

    #[test]
    fn dot_lists_every_edge() {
        let dot = Graph::complete(3).to_dot("k3");
        assert!(dot.contains("0 -- 1 [label=\"0\"]"));
        assert!(dot.contains("1 -- 2 [label=\"2\"]"));
    }
}
