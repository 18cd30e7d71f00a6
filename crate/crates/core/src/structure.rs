//! Meso-scale obstructions to semi-definiteness in a Coates graph.
//!
//! If `L(G)` is positive semi-definite then every connected component of `G`
//! has a spanning tree of positive edges, equivalently no cut whose
//! crossing edges are all negative. On an induced line at most one edge may
//! be negative, and its magnitude is bounded by the harmonic sum of the
//! other weights on the line.

use crate::error::{Error, Result};
use crate::graph::{DisjointSets, EdgeSubset, WeightedGraph};
use crate::matrix::{mask_members, NeumaierSum, Tolerances};
use crate::minors::{normalize_subset, principal_minor_or_one, rooted_forests, SUBSET_LIMIT};

/// A spanning forest of `g` made of positive edges whose trees span the
/// connected components of `g`; for connected `g` this is a positive
/// spanning tree. `None` if some component lacks one.
pub fn positive_spanning_tree(g: &WeightedGraph) -> Option<EdgeSubset<'_>> {
    let mut dsu = DisjointSets::new(g.vertex_count());
    let mut chosen = Vec::new();
    for (i, e) in g.edges().iter().enumerate() {
        if !e.is_loop() && e.weight > 0.0 && dsu.union(e.u, e.v) {
            chosen.push(i);
        }
    }
    let positive_components = dsu.groups((0..g.vertex_count()).collect()).len();
    (positive_components == g.connected_components().len()).then(|| g.subset_unchecked(chosen))
}

/// A vertex set `V1` whose crossing edges are all negative (and not all
/// absent), if any exists.
///
/// Found from the positive-edge subgraph: inside the first component of `g`
/// that splits into several positive components, `V1` is that component
/// minus the positive component of its smallest vertex.
pub fn find_negative_cut(g: &WeightedGraph) -> Option<Vec<usize>> {
    let (positive, _) = g.filter_edges(|e| !e.is_loop() && e.weight > 0.0);
    let mut dsu = DisjointSets::new(g.vertex_count());
    for e in positive.edges() {
        dsu.union(e.u, e.v);
    }
    for component in g.connected_components() {
        let root = dsu.find(component[0]);
        let side: Vec<usize> = component.iter().copied().filter(|&x| dsu.find(x) != root).collect();
        if !side.is_empty() {
            return Some(side);
        }
    }
    None
}

/// One term of the forest-cutting decomposition: the families `Σ_B` and
/// `T_{C ∪ B}` for a fixed `B ⊆ V1 \ C`.
#[derive(Debug, Clone)]
pub struct CutPiece<'g> {
    pub b: Vec<usize>,
    pub sigma: Vec<EdgeSubset<'g>>,
    pub tee: Vec<EdgeSubset<'g>>,
}

/// Decomposition of `F_{V1 \ C}` along the cut `(V1, V \ V1)`: every member
/// splits into a forest `A ∈ Σ_B` of crossing edges and a forest
/// `A' ∈ T_{C ∪ B}` inside `V1`.
#[derive(Debug, Clone)]
pub struct CutFamily<'g> {
    host: &'g WeightedGraph,
    v1: Vec<usize>,
    c: Vec<usize>,
    pieces: Vec<CutPiece<'g>>,
}

impl<'g> CutFamily<'g> {
    pub fn v1(&self) -> &[usize] {
        &self.v1
    }

    pub fn c(&self) -> &[usize] {
        &self.c
    }

    /// Pieces with both families non-empty, ordered by the bitmask of `B`.
    pub fn pieces(&self) -> &[CutPiece<'g>] {
        &self.pieces
    }

    /// `{A ∪ A' : A ∈ Σ_B, A' ∈ T_{C ∪ B}}` over all pieces, sorted.
    pub fn union(&self) -> Vec<EdgeSubset<'g>> {
        let mut out: Vec<EdgeSubset<'g>> = self
            .pieces
            .iter()
            .flat_map(|p| p.sigma.iter().flat_map(move |a| p.tee.iter().map(move |t| a.union(t))))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// The forest family `F_{V1 \ C}` computed directly; `{∅}` when `C = V1`.
    pub fn forest_family(&self) -> Vec<EdgeSubset<'g>> {
        let s: Vec<usize> = self.v1.iter().copied().filter(|x| !self.c.contains(x)).collect();
        let mut in_s = vec![false; self.host.vertex_count()];
        for &x in &s {
            in_s[x] = true;
        }
        rooted_forests(self.host, &self.host.proper_edge_indices(), &in_s, s.len())
            .into_iter()
            .map(|ids| self.host.subset_unchecked(ids))
            .collect()
    }

    pub fn matches_forest_family(&self) -> bool {
        self.union() == self.forest_family()
    }
}

/// `Σ_B`: sets of crossing edges with exactly one edge at each vertex of `B`
/// and none at the other vertices of `V1`. Such sets are always forests.
pub fn sigma_family<'g>(g: &'g WeightedGraph, v1: &[usize], b: &[usize]) -> Result<Vec<EdgeSubset<'g>>> {
    let mask = g.partition_mask(v1)?;
    let b = normalize_subset(b, g.vertex_count())?;
    if let Some(&x) = b.iter().find(|&&x| !mask[x]) {
        return Err(Error::InvalidPartition(format!("vertex {x} of B is not in V1")));
    }
    let choices: Vec<Vec<usize>> = b
        .iter()
        .map(|&i| {
            g.incident_edges(i)
                .into_iter()
                .filter(|&id| !mask[g.edge(id).other(i)])
                .collect()
        })
        .collect();
    let mut out = vec![Vec::new()];
    for options in &choices {
        out = out
            .into_iter()
            .flat_map(|partial: Vec<usize>| {
                options.iter().map(move |&id| {
                    let mut next = partial.clone();
                    next.push(id);
                    next
                })
            })
            .collect();
    }
    let mut subsets: Vec<EdgeSubset<'g>> = out
        .into_iter()
        .map(|mut ids| {
            ids.sort_unstable();
            g.subset_unchecked(ids)
        })
        .collect();
    subsets.sort();
    Ok(subsets)
}

/// `ω(Σ_B) = prod_{i ∈ B} (sum of crossing weights at i)`; 1 for `B = ∅`.
pub fn sigma_weight(g: &WeightedGraph, v1_mask: &[bool], b: &[usize]) -> f64 {
    b.iter()
        .map(|&i| {
            g.incident_edges(i)
                .into_iter()
                .filter(|&id| !v1_mask[g.edge(id).other(i)])
                .map(|id| g.edge(id).weight)
                .collect::<NeumaierSum>()
                .total()
        })
        .product()
}

/// `T_B`: forests inside `V1` with `|V1| - |B|` edges whose trees each
/// contain exactly one vertex of `B`.
pub fn tee_family<'g>(g: &'g WeightedGraph, v1: &[usize], b: &[usize]) -> Result<Vec<EdgeSubset<'g>>> {
    let mask = g.partition_mask(v1)?;
    let b = normalize_subset(b, g.vertex_count())?;
    if let Some(&x) = b.iter().find(|&&x| !mask[x]) {
        return Err(Error::InvalidPartition(format!("vertex {x} of B is not in V1")));
    }
    Ok(tee_family_masked(g, &mask, &b))
}

fn tee_family_masked<'g>(g: &'g WeightedGraph, v1_mask: &[bool], b: &[usize]) -> Vec<EdgeSubset<'g>> {
    let inside: Vec<usize> = g
        .proper_edge_indices()
        .into_iter()
        .filter(|&id| v1_mask[g.edge(id).u] && v1_mask[g.edge(id).v])
        .collect();
    let mut in_s = v1_mask.to_vec();
    for &x in b {
        in_s[x] = false;
    }
    let size = v1_mask.iter().filter(|&&m| m).count() - b.len();
    rooted_forests(g, &inside, &in_s, size)
        .into_iter()
        .map(|ids| g.subset_unchecked(ids))
        .collect()
}

pub fn cut_decomposition<'g>(g: &'g WeightedGraph, v1: &[usize], c: &[usize]) -> Result<CutFamily<'g>> {
    let mask = g.partition_mask(v1)?;
    let v1 = normalize_subset(v1, g.vertex_count())?;
    let c = normalize_subset(c, g.vertex_count())?;
    if let Some(&x) = c.iter().find(|&&x| !mask[x]) {
        return Err(Error::InvalidPartition(format!("vertex {x} of C is not in V1")));
    }
    let free: Vec<usize> = v1.iter().copied().filter(|x| !c.contains(x)).collect();
    if free.len() > SUBSET_LIMIT {
        return Err(Error::GuardExceeded { n: free.len(), nmax: SUBSET_LIMIT });
    }
    let mut pieces = Vec::new();
    for bits in 0u64..(1u64 << free.len()) {
        let b: Vec<usize> = mask_members(bits).map(|k| free[k]).collect();
        let sigma = sigma_family(g, &v1, &b)?;
        if sigma.is_empty() {
            continue;
        }
        let mut cb: Vec<usize> = c.iter().chain(&b).copied().collect();
        cb.sort_unstable();
        let tee = tee_family_masked(g, &mask, &cb);
        if tee.is_empty() {
            continue;
        }
        pieces.push(CutPiece { b, sigma, tee });
    }
    Ok(CutFamily { host: g, v1, c, pieces })
}

/// Evaluated alternating sum
/// `sum_{C ⊆ V1} (-1)^|C| ω(Σ_C) det L[V1 \ C, V1 \ C]`, which vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct CutIdentity {
    pub residual: f64,
    /// Sum of the absolute values of all terms.
    pub magnitude: f64,
    pub terms: usize,
}

impl CutIdentity {
    pub fn holds(&self, tol: &Tolerances) -> bool {
        self.residual.abs() <= tol.relative * self.magnitude
    }
}

pub fn verify_cut_identity(g: &WeightedGraph, v1: &[usize]) -> Result<CutIdentity> {
    let mask = g.partition_mask(v1)?;
    let v1 = normalize_subset(v1, g.vertex_count())?;
    if v1.len() > SUBSET_LIMIT {
        return Err(Error::GuardExceeded { n: v1.len(), nmax: SUBSET_LIMIT });
    }
    let l = g.laplacian();
    let mut sum = NeumaierSum::default();
    let mut magnitude = NeumaierSum::default();
    let count = 1u64 << v1.len();
    for bits in 0..count {
        let c: Vec<usize> = mask_members(bits).map(|k| v1[k]).collect();
        let sigma = sigma_weight(g, &mask, &c);
        if sigma == 0.0 {
            continue;
        }
        let rest: Vec<usize> = v1.iter().copied().filter(|x| !c.contains(x)).collect();
        let sign = if c.len() % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign * sigma * principal_minor_or_one(&l, &rest);
        sum.add(term);
        magnitude.add(term.abs());
    }
    Ok(CutIdentity { residual: sum.total(), magnitude: magnitude.total(), terms: count as usize })
}

/// Harmonic bound `1 / sum_{a ∈ H, a ≠ e} 1/ω(a)` on `|ω(e)|` for the single
/// negative edge `e` of an induced line `H`.
pub fn line_weight_bound(g: &WeightedGraph, line: &EdgeSubset<'_>, e: usize) -> Result<f64> {
    g.line_path(line)?;
    if !line.contains(e) {
        return Err(Error::EdgeNotInLine { index: e });
    }
    let negatives = line.members().iter().filter(|&&i| g.edge(i).weight < 0.0).count();
    if negatives > 1 {
        return Err(Error::MultipleNegativeEdges { count: negatives });
    }
    if g.edge(e).weight > 0.0 {
        return Err(Error::EdgeNotNegative { index: e });
    }
    let reciprocal: NeumaierSum = line
        .members()
        .iter()
        .filter(|&&i| i != e)
        .map(|&i| 1.0 / g.edge(i).weight)
        .collect();
    Ok(1.0 / reciprocal.total())
}

/// Result of checking one maximal induced line.
#[derive(Debug, Clone, PartialEq)]
pub struct LineBoundReport {
    /// Edge indices of the line, sorted.
    pub edges: Vec<usize>,
    /// Vertices in path order.
    pub path: Vec<usize>,
    pub negative_edges: Vec<usize>,
    /// Bound on the magnitude of the single negative edge, if exactly one.
    pub bound: Option<f64>,
    pub violated: bool,
}

impl LineBoundReport {
    pub fn line<'g>(&self, g: &'g WeightedGraph) -> EdgeSubset<'g> {
        g.subset_unchecked(self.edges.clone())
    }
}

pub fn line_obstruction_scan(g: &WeightedGraph) -> Vec<LineBoundReport> {
    line_obstruction_scan_with(g, &Tolerances::default())
}

/// Scans every maximal induced line: two or more negative edges violate
/// unconditionally; a single one violates when its magnitude exceeds the
/// bound by more than the relative tolerance.
pub fn line_obstruction_scan_with(g: &WeightedGraph, tol: &Tolerances) -> Vec<LineBoundReport> {
    g.induced_lines()
        .into_iter()
        .map(|line| {
            let path = g.line_path(&line).expect("induced_lines yields lines");
            let negative_edges: Vec<usize> =
                line.members().iter().copied().filter(|&i| g.edge(i).weight < 0.0).collect();
            let (bound, violated) = match negative_edges.as_slice() {
                [] => (None, false),
                [e] => {
                    let bound = line_weight_bound(g, &line, *e).expect("single negative edge");
                    (Some(bound), g.edge(*e).weight.abs() > bound * (1.0 + tol.relative))
                }
                _ => (None, true),
            };
            LineBoundReport { edges: line.members().to_vec(), path, negative_edges, bound, violated }
        })
        .collect()
}
