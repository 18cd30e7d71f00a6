//! Weighted undirected graphs, their matrices and structural queries.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;

/// An undirected edge `{u, v}` with `u <= v`. `u == v` is a loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    pub fn touches(&self, x: usize) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint opposite to `x`. Panics if `x` is not an endpoint.
    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            assert_eq!(self.v, x, "vertex is not an endpoint of the edge");
            self.u
        }
    }
}

/// Undirected graph on vertices `0..n` with non-zero real edge weights.
/// Loops are kept so that a Coates graph carries every non-zero entry.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut seen = BTreeSet::new();
        let mut list = Vec::new();
        for (a, b, w) in edges {
            for x in [a, b] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            let (u, v) = if a <= b { (a, b) } else { (b, a) };
            if !w.is_finite() {
                return Err(Error::NonFinite {
                    value: w,
                    context: format!("weight of edge {{{u}, {v}}}"),
                });
            }
            if w == 0.0 {
                return Err(Error::ZeroWeight { u, v });
            }
            if !seen.insert((u, v)) {
                return Err(Error::DuplicateEdge { u, v });
            }
            list.push(Edge { u, v, weight: w });
        }
        Ok(WeightedGraph { n, edges: list })
    }

    pub fn empty(n: usize) -> Self {
        WeightedGraph { n, edges: Vec::new() }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> &Edge {
        &self.edges[index]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Indices of all non-loop edges.
    pub fn proper_edge_indices(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&i| !self.edges[i].is_loop()).collect()
    }

    pub fn find_edge(&self, a: usize, b: usize) -> Option<usize> {
        let (u, v) = if a <= b { (a, b) } else { (b, a) };
        self.edges.iter().position(|e| e.u == u && e.v == v)
    }

    /// Number of non-loop edges at `x`.
    pub fn degree(&self, x: usize) -> usize {
        self.edges.iter().filter(|e| !e.is_loop() && e.touches(x)).count()
    }

    /// Indices of the non-loop edges at `x`.
    pub fn incident_edges(&self, x: usize) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&i| !self.edges[i].is_loop() && self.edges[i].touches(x))
            .collect()
    }

    /// Weighted adjacency matrix; loops sit on the diagonal.
    pub fn adjacency(&self) -> SymmetricMatrix {
        let mut data = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            data[(e.u, e.v)] = e.weight;
            data[(e.v, e.u)] = e.weight;
        }
        SymmetricMatrix::from_upper_fn(self.n, |i, j| data[(i, j)])
    }

    /// `D - A` with loops dropped. Row sums vanish by construction.
    pub fn laplacian(&self) -> SymmetricMatrix {
        let mut data = DMatrix::zeros(self.n, self.n);
        for e in self.edges.iter().filter(|e| !e.is_loop()) {
            data[(e.u, e.v)] = -e.weight;
            data[(e.v, e.u)] = -e.weight;
        }
        for i in 0..self.n {
            let mut s = 0.0;
            for j in 0..self.n {
                if j != i {
                    s -= data[(i, j)];
                }
            }
            data[(i, i)] = s;
        }
        SymmetricMatrix::from_upper_fn(self.n, |i, j| data[(i, j)])
    }

    pub fn incidence(&self) -> OrientedIncidence {
        OrientedIncidence::new(self)
    }

    pub fn all_edges(&self) -> EdgeSubset<'_> {
        EdgeSubset {
            host: self,
            members: (0..self.edges.len()).collect(),
        }
    }

    pub fn subset<I: IntoIterator<Item = usize>>(&self, indices: I) -> Result<EdgeSubset<'_>> {
        let mut members: Vec<usize> = indices.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if let Some(&bad) = members.iter().find(|&&i| i >= self.edges.len()) {
            return Err(Error::EdgeOutOfRange { index: bad, count: self.edges.len() });
        }
        Ok(EdgeSubset { host: self, members })
    }

    pub(crate) fn subset_unchecked(&self, members: Vec<usize>) -> EdgeSubset<'_> {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        EdgeSubset { host: self, members }
    }

    /// The subgraph on the same vertex set keeping edges that satisfy `keep`.
    /// Returned together with the original index of every kept edge.
    pub fn filter_edges(&self, mut keep: impl FnMut(&Edge) -> bool) -> (WeightedGraph, Vec<usize>) {
        let mut edges = Vec::new();
        let mut origin = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if keep(e) {
                edges.push(*e);
                origin.push(i);
            }
        }
        (WeightedGraph { n: self.n, edges }, origin)
    }

    /// Connected components over all vertices, including isolated ones,
    /// each sorted, listed by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut dsu = DisjointSets::new(self.n);
        for e in &self.edges {
            dsu.union(e.u, e.v);
        }
        dsu.groups((0..self.n).collect())
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.connected_components().len() == 1
    }

    /// Edges with exactly one endpoint in `side`.
    pub fn cut_edges(&self, side: &[usize]) -> Result<EdgeSubset<'_>> {
        let mask = self.partition_mask(side)?;
        let members = (0..self.edges.len())
            .filter(|&i| {
                let e = &self.edges[i];
                mask[e.u] != mask[e.v]
            })
            .collect();
        Ok(EdgeSubset { host: self, members })
    }

    /// Validates a proper non-empty vertex subset and returns its indicator.
    pub(crate) fn partition_mask(&self, side: &[usize]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.n];
        for &x in side {
            if x >= self.n {
                return Err(Error::VertexOutOfRange { vertex: x, n: self.n });
            }
            mask[x] = true;
        }
        let count = mask.iter().filter(|&&b| b).count();
        if count == 0 {
            return Err(Error::InvalidPartition("first side is empty".into()));
        }
        if count == self.n {
            return Err(Error::InvalidPartition("second side is empty".into()));
        }
        Ok(mask)
    }

    /// All maximal induced lines with at least two edges.
    ///
    /// A line is a chordless path whose interior vertices have degree exactly
    /// two in the whole graph (loops ignored); its endpoints are the only
    /// vertices allowed a different degree. Maximal means no other line
    /// contains it. Lines are returned sorted by edge indices.
    pub fn induced_lines(&self) -> Vec<EdgeSubset<'_>> {
        let mut candidates: BTreeSet<Vec<usize>> = BTreeSet::new();
        for start in self.proper_edge_indices() {
            let e = self.edges[start];
            for (a, b) in [(e.u, e.v), (e.v, e.u)] {
                // Walk a -> b -> ... through degree-two vertices.
                let mut path = vec![a, b];
                let mut edge_ids = vec![start];
                loop {
                    let tail = *path.last().unwrap();
                    if self.degree(tail) != 2 {
                        break;
                    }
                    let prev_edge = *edge_ids.last().unwrap();
                    let next_edge = self
                        .incident_edges(tail)
                        .into_iter()
                        .find(|&i| i != prev_edge)
                        .expect("degree-two vertex has a second edge");
                    let next = self.edges[next_edge].other(tail);
                    if path.contains(&next) {
                        break;
                    }
                    path.push(next);
                    edge_ids.push(next_edge);
                    if self.find_edge(path[0], next).is_none() {
                        let mut ids = edge_ids.clone();
                        ids.sort_unstable();
                        candidates.insert(ids);
                    }
                }
            }
        }
        let all: Vec<Vec<usize>> = candidates.into_iter().collect();
        let maximal = all.iter().filter(|line| {
            !all.iter().any(|other| {
                other.len() > line.len() && line.iter().all(|i| other.binary_search(i).is_ok())
            })
        });
        maximal.map(|ids| self.subset_unchecked(ids.clone())).collect()
    }

    /// Checks that `line` is an induced line with at least two edges and
    /// returns its vertices in path order (starting at the smaller endpoint).
    pub fn line_path(&self, line: &EdgeSubset<'_>) -> Result<Vec<usize>> {
        if line.len() < 2 {
            return Err(Error::NotALine("fewer than two edges".into()));
        }
        if line.edges().any(|e| e.is_loop()) {
            return Err(Error::NotALine("contains a loop".into()));
        }
        let vertices = line.vertices();
        if vertices.len() != line.len() + 1 || !line.is_forest() {
            return Err(Error::NotALine("edges do not form a path".into()));
        }
        let mut line_degree = vec![0usize; self.n];
        for e in line.edges() {
            line_degree[e.u] += 1;
            line_degree[e.v] += 1;
        }
        let ends: Vec<usize> = vertices.iter().copied().filter(|&x| line_degree[x] == 1).collect();
        if ends.len() != 2 || vertices.iter().any(|&x| line_degree[x] > 2) {
            return Err(Error::NotALine("edges do not form a path".into()));
        }
        for &x in &vertices {
            if line_degree[x] == 2 && self.degree(x) != 2 {
                return Err(Error::NotALine(format!(
                    "interior vertex {x} has degree {} in the graph",
                    self.degree(x)
                )));
            }
        }
        if self.find_edge(ends[0], ends[1]).is_some() {
            return Err(Error::NotALine("endpoints are adjacent".into()));
        }
        let mut order = vec![ends[0]];
        let mut used = vec![false; line.len()];
        while order.len() < vertices.len() {
            let tail = *order.last().unwrap();
            let (k, e) = line
                .members()
                .iter()
                .enumerate()
                .find(|(k, &i)| !used[*k] && self.edges[i].touches(tail))
                .map(|(k, &i)| (k, self.edges[i]))
                .expect("path is connected");
            used[k] = true;
            order.push(e.other(tail));
        }
        Ok(order)
    }
}

/// A set of edges of a host graph, kept as sorted edge indices.
/// Identified with the subgraph it induces: the touched vertices and
/// these edges.
#[derive(Clone)]
pub struct EdgeSubset<'g> {
    host: &'g WeightedGraph,
    members: Vec<usize>,
}

impl<'g> EdgeSubset<'g> {
    pub fn empty(host: &'g WeightedGraph) -> Self {
        EdgeSubset { host, members: Vec::new() }
    }

    pub fn host(&self) -> &'g WeightedGraph {
        self.host
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.binary_search(&index).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = &'g Edge> + '_ {
        let host = self.host;
        self.members.iter().map(move |&i| &host.edges[i])
    }

    /// Product of the edge weights; 1 for the empty set.
    pub fn weight(&self) -> f64 {
        self.edges().map(|e| e.weight).product()
    }

    /// Sorted vertices touched by the edges.
    pub fn vertices(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.edges().flat_map(|e| [e.u, e.v]).collect();
        set.into_iter().collect()
    }

    pub fn union(&self, other: &EdgeSubset<'g>) -> EdgeSubset<'g> {
        let set: BTreeSet<usize> = self.members.iter().chain(&other.members).copied().collect();
        EdgeSubset { host: self.host, members: set.into_iter().collect() }
    }

    /// Maximal connected vertex sets of the induced subgraph. Vertices not
    /// touched by the subset are omitted.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut dsu = DisjointSets::new(self.host.n);
        for e in self.edges() {
            dsu.union(e.u, e.v);
        }
        dsu.groups(self.vertices())
    }

    /// Acyclicity via `|K| = |V(K)| - components(K)`.
    pub fn is_forest(&self) -> bool {
        self.len() + self.connected_components().len() == self.vertices().len()
    }
}

impl PartialEq for EdgeSubset<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members
    }
}

impl Eq for EdgeSubset<'_> {}

impl Hash for EdgeSubset<'_> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.members.hash(state);
    }
}

impl PartialOrd for EdgeSubset<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EdgeSubset<'_> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.members.cmp(&other.members)
    }
}

impl fmt::Debug for EdgeSubset<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.edges().map(|e| (e.u, e.v, e.weight)))
            .finish()
    }
}

/// Oriented incidence matrix `M` (vertices by non-loop edges) with the
/// diagonal weight matrix `W`. Edge `{i, j}`, `i < j`, has `+1` at `i` and
/// `-1` at `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientedIncidence {
    matrix: DMatrix<i64>,
    weights: Vec<f64>,
    edge_ids: Vec<usize>,
}

impl OrientedIncidence {
    pub fn new(g: &WeightedGraph) -> Self {
        let edge_ids = g.proper_edge_indices();
        let mut matrix = DMatrix::<i64>::zeros(g.n, edge_ids.len());
        let mut weights = Vec::with_capacity(edge_ids.len());
        for (col, &id) in edge_ids.iter().enumerate() {
            let e = g.edges[id];
            matrix[(e.u, col)] = 1;
            matrix[(e.v, col)] = -1;
            weights.push(e.weight);
        }
        OrientedIncidence { matrix, weights, edge_ids }
    }

    pub fn matrix(&self) -> &DMatrix<i64> {
        &self.matrix
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Host-graph edge index of every column.
    pub fn edge_ids(&self) -> &[usize] {
        &self.edge_ids
    }

    pub fn column_of(&self, edge_index: usize) -> Option<usize> {
        self.edge_ids.iter().position(|&i| i == edge_index)
    }

    pub fn as_f64(&self) -> DMatrix<f64> {
        self.matrix.map(|x| x as f64)
    }

    pub fn weight_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.weights.clone()))
    }

    /// `M W M^T`.
    pub fn product(&self) -> DMatrix<f64> {
        let m = self.as_f64();
        &m * self.weight_matrix() * m.transpose()
    }
}

/// Coates graph of `a`: an edge `{i, j}` (loops on the diagonal) for every
/// exactly non-zero entry, weighted by the entry.
pub fn coates_graph(a: &SymmetricMatrix) -> WeightedGraph {
    coates_graph_with_cutoff(a, 0.0)
}

/// Coates graph treating entries with `|a_ij| <= cutoff` as zero. Intended
/// for matrices produced by floating-point arithmetic.
pub fn coates_graph_with_cutoff(a: &SymmetricMatrix, cutoff: f64) -> WeightedGraph {
    let n = a.dim();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i..n {
            let w = a.get(i, j);
            if w != 0.0 && w.abs() > cutoff {
                edges.push(Edge { u: i, v: j, weight: w });
            }
        }
    }
    WeightedGraph { n, edges }
}

pub fn laplacian(g: &WeightedGraph) -> SymmetricMatrix {
    g.laplacian()
}

/// True iff `a` has zero row sums, in which case `L(G(a)) = -a`.
pub fn negated_adjacency_check(a: &SymmetricMatrix) -> bool {
    a.has_zero_row_sums()
}

pub fn incidence_factorization(g: &WeightedGraph) -> OrientedIncidence {
    g.incidence()
}

pub(crate) struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Returns false if `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }

    /// Groups the given vertices by root, ordered by smallest member.
    pub(crate) fn groups(&mut self, vertices: Vec<usize>) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut root_slot = std::collections::HashMap::new();
        let mut sorted = vertices;
        sorted.sort_unstable();
        for x in sorted {
            let r = self.find(x);
            let slot = *root_slot.entry(r).or_insert_with(|| {
                out.push(Vec::new());
                out.len() - 1
            });
            out[slot].push(x);
        }
        out
    }
}
