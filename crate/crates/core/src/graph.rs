//! Edge-list ingestion and the preprocessed CSR graph.
//!
//! Inputs are undirected edge lists with arbitrary string node labels.
//! [`preprocess`] canonicalizes them: self-loops and duplicate edges are
//! dropped, only the largest connected component is kept (ties broken by the
//! component holding the smallest label), and nodes are relabeled to dense
//! ids `0..N-1` with the original labels retained.

use crate::error::{Error, Result};
use crate::partition::Partition;
use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeListFormat {
    /// Whitespace-separated `src dst [weight ...]`, `#` or `%` comments.
    Plain,
    /// KONECT-style TSV; same token rules, `%` header lines.
    KonectTsv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawEdge {
    pub src: String,
    pub dst: String,
    pub weight: Option<f64>,
}

/// Parsed but not yet canonicalized edge list.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawEdgeList {
    pub edges: Vec<RawEdge>,
}

/// Parses an edge list. Both formats accept the same token grammar; the
/// distinction exists so callers can state intent. Weights are parsed when a
/// third numeric column is present and ignored by everything downstream.
pub fn load_edge_list(reader: impl BufRead, _format: EdgeListFormat) -> Result<RawEdgeList> {
    let mut edges = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (src, dst) = match (tokens.next(), tokens.next()) {
            (Some(s), Some(d)) => (s.to_owned(), d.to_owned()),
            _ => {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("expected at least two tokens, got {trimmed:?}"),
                })
            }
        };
        let weight = match tokens.next() {
            None => None,
            Some(w) => Some(w.parse::<f64>().map_err(|_| Error::Parse {
                line: idx + 1,
                msg: format!("weight token {w:?} is not a number"),
            })?),
        };
        edges.push(RawEdge { src, dst, weight });
    }
    Ok(RawEdgeList { edges })
}

pub fn load_edge_list_path(path: &Path, format: EdgeListFormat) -> Result<RawEdgeList> {
    let file = std::fs::File::open(path)?;
    load_edge_list(std::io::BufReader::new(file), format)
}

/// Sort key giving a total order over labels: integer-valued labels first in
/// numeric order (byte order breaking `"07"` vs `"7"` ties), then the rest
/// in byte order.
fn label_key(label: &str) -> (u8, u64, &str) {
    match label.parse::<u64>() {
        Ok(v) => (0, v, label),
        Err(_) => (1, 0, label),
    }
}

/// Undirected simple graph over dense node ids, CSR adjacency, sorted
/// neighbor lists.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    labels: Vec<String>,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    edge_count: usize,
}

impl Graph {
    /// Builds directly from dense-id edges (generators and tests). Self-loops
    /// and duplicates are dropped; no component filtering or relabeling.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let labels = (0..n).map(|v| v.to_string()).collect();
        let mut dedup: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::Invalid(format!(
                    "edge ({u},{v}) out of range for {n} nodes"
                )));
            }
            if u != v {
                dedup.push((u.min(v), u.max(v)));
            }
        }
        dedup.sort_unstable();
        dedup.dedup();
        Ok(Self::from_sorted_unique(labels, &dedup))
    }

    fn from_sorted_unique(labels: Vec<String>, edges: &[(u32, u32)]) -> Self {
        let n = labels.len();
        let mut deg = vec![0usize; n];
        for &(u, v) in edges {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0usize;
        offsets.push(0);
        for d in &deg {
            acc += d;
            offsets.push(acc);
        }
        let mut cursor = offsets.clone();
        let mut neighbors = vec![0u32; acc];
        for &(u, v) in edges {
            neighbors[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            neighbors[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        for v in 0..n {
            neighbors[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Graph {
            labels,
            offsets,
            neighbors,
            edge_count: edges.len(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, v: usize) -> Result<usize> {
        if v >= self.node_count() {
            return Err(Error::Invalid(format!(
                "node id {v} out of range (N = {})",
                self.node_count()
            )));
        }
        Ok(self.offsets[v + 1] - self.offsets[v])
    }

    /// Sorted neighbor ids of `v`. Panics on out-of-range ids; use
    /// [`Graph::degree`] for checked access.
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_of(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn mean_degree(&self) -> f64 {
        2.0 * self.edge_count as f64 / self.node_count() as f64
    }

    /// Edges as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| (v as usize) > u)
                .map(move |&v| (u, v as usize))
        })
    }

    /// Exports edges under original labels, e.g. to re-run [`preprocess`].
    pub fn raw_edges(&self) -> RawEdgeList {
        RawEdgeList {
            edges: self
                .edges()
                .map(|(u, v)| RawEdge {
                    src: self.labels[u].clone(),
                    dst: self.labels[v].clone(),
                    weight: None,
                })
                .collect(),
        }
    }
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = x;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (big, small) = if self.size[ra as usize] >= self.size[rb as usize] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small as usize] = big;
        self.size[big as usize] += self.size[small as usize];
    }
}

/// Canonicalizes a raw edge list into a [`Graph`].
///
/// Drops self-loops and duplicate edges, keeps the largest connected
/// component (isolated nodes form singleton components; size ties go to the
/// component containing the smallest label under the numeric-then-lexical
/// order), and assigns dense ids in that same label order.
pub fn preprocess(raw: &RawEdgeList) -> Result<Graph> {
    fn intern(index: &mut HashMap<String, u32>, labels: &mut Vec<String>, s: &str) -> u32 {
        if let Some(&id) = index.get(s) {
            return id;
        }
        let id = labels.len() as u32;
        index.insert(s.to_owned(), id);
        labels.push(s.to_owned());
        id
    }

    let mut index: HashMap<String, u32> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(raw.edges.len());
    for e in &raw.edges {
        let u = intern(&mut index, &mut labels, &e.src);
        let v = intern(&mut index, &mut labels, &e.dst);
        if u != v {
            edges.push((u.min(v), u.max(v)));
        }
    }
    edges.sort_unstable();
    edges.dedup();

    let n_all = labels.len();
    if n_all == 0 {
        return Err(Error::invalid("edge list contains no nodes"));
    }
    let mut uf = UnionFind::new(n_all);
    for &(u, v) in &edges {
        uf.union(u, v);
    }

    let roots: Vec<u32> = (0..n_all as u32).map(|v| uf.find(v)).collect();
    let mut comp_size: HashMap<u32, u32> = HashMap::new();
    for &r in &roots {
        *comp_size.entry(r).or_insert(0) += 1;
    }
    let max_size = *comp_size.values().max().unwrap();
    let winner = (0..n_all)
        .filter(|&v| comp_size[&roots[v]] == max_size)
        .min_by_key(|&v| label_key(&labels[v]))
        .map(|v| roots[v])
        .unwrap();

    let mut kept: Vec<u32> = (0..n_all as u32).filter(|&v| roots[v as usize] == winner).collect();
    kept.sort_by_key(|&v| label_key(&labels[v as usize]));
    let mut new_id = vec![u32::MAX; n_all];
    for (i, &v) in kept.iter().enumerate() {
        new_id[v as usize] = i as u32;
    }

    let mut final_edges: Vec<(u32, u32)> = edges
        .iter()
        .filter(|&&(u, v)| new_id[u as usize] != u32::MAX && new_id[v as usize] != u32::MAX)
        .map(|&(u, v)| {
            let (a, b) = (new_id[u as usize], new_id[v as usize]);
            (a.min(b), a.max(b))
        })
        .collect();
    final_edges.sort_unstable();

    let final_labels: Vec<String> = kept.iter().map(|&v| labels[v as usize].to_owned()).collect();
    Ok(Graph::from_sorted_unique(final_labels, &final_edges))
}

/// Reads a two-column (label, 1-based block) CSV produced by the CLI and
/// aligns it to `g`'s node order. Every graph label must appear exactly once.
pub fn read_partition_csv(path: &Path, g: &Graph) -> Result<Partition> {
    let text = std::fs::read_to_string(path)?;
    let mut by_label: HashMap<&str, usize> = HashMap::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if idx == 0 && trimmed.split(',').nth(1).is_some_and(|t| t.parse::<usize>().is_err()) {
            continue; // header row
        }
        let mut cols = trimmed.split(',');
        let (label, block) = match (cols.next(), cols.next()) {
            (Some(l), Some(b)) => (l.trim(), b.trim()),
            _ => {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: "expected `node,block`".into(),
                })
            }
        };
        let block: usize = block.parse().map_err(|_| Error::Parse {
            line: idx + 1,
            msg: format!("block index {block:?} is not a positive integer"),
        })?;
        if by_label.insert(label, block).is_some() {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("duplicate node label {label:?}"),
            });
        }
    }
    let mut one_based = Vec::with_capacity(g.node_count());
    for v in 0..g.node_count() {
        match by_label.get(g.label_of(v)) {
            Some(&b) => one_based.push(b),
            None => {
                return Err(Error::Invalid(format!(
                    "partition file is missing node {:?}",
                    g.label_of(v)
                )))
            }
        }
    }
    if by_label.len() != g.node_count() {
        return Err(Error::Invalid(format!(
            "partition file has {} nodes, graph has {}",
            by_label.len(),
            g.node_count()
        )));
    }
    Partition::from_one_based(&one_based)
}
