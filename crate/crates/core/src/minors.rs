//! Principal minors of Laplacians, by elimination and as weighted sums over
//! rooted spanning forests.
//!
//! For a vertex set `S`, the forest family `F_S` collects the edge sets `K`
//! with `|K| = |S|` in which every connected component reaches a vertex
//! outside `S`. Each such `K` is a forest whose trees hold exactly one
//! vertex outside `S`, and
//!
//! ```text
//! det L(G)[S, S] = sum over K in F_S of prod_{e in K} w(e)
//! ```
//!
//! which reduces to Kirchhoff's spanning-tree count when `|S| = n - 1`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{EdgeSubset, OrientedIncidence, WeightedGraph};
use crate::matrix::{determinant, NeumaierSum, SymmetricMatrix};

/// Exhaustive subset sweeps are refused beyond this many elements.
pub const SUBSET_LIMIT: usize = 32;

/// The family `F_S` of a graph, in lexicographic order of edge indices.
#[derive(Debug, Clone)]
pub struct ForestFamily<'g> {
    subset: Vec<usize>,
    members: Vec<EdgeSubset<'g>>,
}

impl<'g> ForestFamily<'g> {
    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    pub fn members(&self) -> &[EdgeSubset<'g>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Sum of member weights (compensated); 0 for the empty family.
    pub fn weight(&self) -> f64 {
        self.members.iter().map(EdgeSubset::weight).collect::<NeumaierSum>().total()
    }

    pub fn into_members(self) -> Vec<EdgeSubset<'g>> {
        self.members
    }
}

/// Sorted, deduplicated, range-checked copy of a vertex subset.
pub(crate) fn normalize_subset(subset: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut s = subset.to_vec();
    s.sort_unstable();
    s.dedup();
    if let Some(&bad) = s.iter().find(|&&x| x >= n) {
        return Err(Error::VertexOutOfRange { vertex: bad, n });
    }
    Ok(s)
}

/// `det(L[S, S])` by partial-pivoting elimination.
pub fn principal_minor_direct(l: &SymmetricMatrix, subset: &[usize]) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let s = normalize_subset(subset, l.dim())?;
    Ok(determinant(&l.principal_submatrix(&s)))
}

/// Principal minor with the empty-set convention `det L[{}, {}] = 1`.
pub(crate) fn principal_minor_or_one(l: &SymmetricMatrix, subset: &[usize]) -> f64 {
    if subset.is_empty() {
        1.0
    } else {
        determinant(&l.principal_submatrix(subset))
    }
}

/// Enumerates `F_S`. Loops never take part; an `S` larger than the number
/// of edges simply yields an empty family.
pub fn enumerate_forest_family<'g>(g: &'g WeightedGraph, subset: &[usize]) -> Result<ForestFamily<'g>> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let s = normalize_subset(subset, g.vertex_count())?;
    let mut in_s = vec![false; g.vertex_count()];
    for &x in &s {
        in_s[x] = true;
    }
    let candidates = g.proper_edge_indices();
    let members = rooted_forests(g, &candidates, &in_s, s.len())
        .into_iter()
        .map(|ids| g.subset_unchecked(ids))
        .collect::<Vec<_>>();
    debug_assert!(members.iter().all(|k| is_rooted_forest(k, &in_s)));
    Ok(ForestFamily { subset: s, members })
}

/// `sum_{K in F_S} w(K)`.
pub fn principal_minor_combinatorial(g: &WeightedGraph, subset: &[usize]) -> Result<f64> {
    Ok(enumerate_forest_family(g, subset)?.weight())
}

/// True if `k` is a forest whose every tree contains exactly one vertex
/// outside `S` (`in_s` marks `S`).
pub fn is_rooted_forest(k: &EdgeSubset<'_>, in_s: &[bool]) -> bool {
    k.is_forest()
        && k.connected_components()
            .iter()
            .all(|c| c.iter().filter(|&&x| !in_s[x]).count() == 1)
}

/// Edge-index sets `K` drawn from `candidates` (sorted, loop-free) with
/// `|K| = size` such that every component of `K` reaches a vertex with
/// `in_s[x] == false`. Output is in lexicographic order.
///
/// Partial sets are pruned as soon as they close a cycle or join two
/// components that both already contain an outside vertex, and when too few
/// candidates remain to reach `size`. With those invariants, reaching `size`
/// edges forces every component to contain an outside vertex.
pub(crate) fn rooted_forests(
    g: &WeightedGraph,
    candidates: &[usize],
    in_s: &[bool],
    size: usize,
) -> Vec<Vec<usize>> {
    let mut search = ForestSearch {
        g,
        candidates,
        size,
        dsu: RollbackDsu::new(in_s),
        chosen: Vec::with_capacity(size),
        out: Vec::new(),
    };
    search.run(0);
    search.out
}

struct ForestSearch<'a> {
    g: &'a WeightedGraph,
    candidates: &'a [usize],
    size: usize,
    dsu: RollbackDsu,
    chosen: Vec<usize>,
    out: Vec<Vec<usize>>,
}

impl ForestSearch<'_> {
    fn run(&mut self, pos: usize) {
        if self.chosen.len() == self.size {
            self.out.push(self.chosen.clone());
            return;
        }
        let needed = self.size - self.chosen.len();
        if self.candidates.len() - pos < needed {
            return;
        }
        let id = self.candidates[pos];
        let e = *self.g.edge(id);
        if self.dsu.try_union(e.u, e.v) {
            self.chosen.push(id);
            self.run(pos + 1);
            self.chosen.pop();
            self.dsu.rollback();
        }
        self.run(pos + 1);
    }
}

/// Union-find without path compression so merges can be undone.
struct RollbackDsu {
    parent: Vec<usize>,
    rank: Vec<u32>,
    rooted: Vec<bool>,
    history: Vec<(usize, usize, bool, bool)>,
}

impl RollbackDsu {
    fn new(in_s: &[bool]) -> Self {
        RollbackDsu {
            parent: (0..in_s.len()).collect(),
            rank: vec![0; in_s.len()],
            rooted: in_s.iter().map(|&s| !s).collect(),
            history: Vec::new(),
        }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    /// Merges the components of `a` and `b` unless that closes a cycle or
    /// puts two outside vertices into one component.
    fn try_union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb || (self.rooted[ra] && self.rooted[rb]) {
            return false;
        }
        if self.rank[ra] < self.rank[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        let bumped = self.rank[ra] == self.rank[rb];
        self.history.push((rb, ra, self.rooted[ra], bumped));
        self.parent[rb] = ra;
        self.rooted[ra] |= self.rooted[rb];
        if bumped {
            self.rank[ra] += 1;
        }
        true
    }

    fn rollback(&mut self) {
        let (child, root, rooted, bumped) = self.history.pop().expect("rollback without union");
        self.parent[child] = child;
        self.rooted[root] = rooted;
        if bumped {
            self.rank[root] -= 1;
        }
    }
}

/// `|det M[S, K]|` computed by exact integer elimination; always 0 or 1.
pub fn incidence_minor_magnitude(
    m: &OrientedIncidence,
    subset: &[usize],
    k: &EdgeSubset<'_>,
) -> Result<u64> {
    let s = normalize_subset(subset, m.matrix().nrows())?;
    if s.len() != k.len() {
        return Err(Error::SizeMismatch(format!(
            "{} vertices but {} edges",
            s.len(),
            k.len()
        )));
    }
    let cols = k
        .members()
        .iter()
        .map(|&id| {
            m.column_of(id)
                .ok_or_else(|| Error::SizeMismatch(format!("edge {id} is not an incidence column")))
        })
        .collect::<Result<Vec<_>>>()?;
    let sub: Vec<Vec<i128>> = s
        .iter()
        .map(|&r| cols.iter().map(|&c| m.matrix()[(r, c)] as i128).collect())
        .collect();
    Ok(bareiss_determinant(sub).unsigned_abs() as u64)
}

/// Fraction-free Gaussian elimination; exact for integer input.
fn bareiss_determinant(mut a: Vec<Vec<i128>>) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Cauchy-Binet expansion `[DE]_{I,J} = sum_K [D]_{I,K} [E]_{K,J}` over all
/// `K` of size `|I|`; the sum is empty (zero) when `|I|` exceeds the inner
/// dimension. Exponential in the inner dimension; meant as an oracle.
pub fn cauchy_binet_expand(
    d: &DMatrix<f64>,
    e: &DMatrix<f64>,
    rows: &[usize],
    cols: &[usize],
) -> Result<f64> {
    let inner = d.ncols();
    if e.nrows() != inner {
        return Err(Error::SizeMismatch(format!(
            "D has {inner} columns but E has {} rows",
            e.nrows()
        )));
    }
    if rows.len() != cols.len() {
        return Err(Error::SizeMismatch(format!(
            "|I| = {} differs from |J| = {}",
            rows.len(),
            cols.len()
        )));
    }
    let rows = normalize_subset(rows, d.nrows())?;
    let cols = normalize_subset(cols, e.ncols())?;
    if rows.len() != cols.len() {
        return Err(Error::SizeMismatch("repeated indices".into()));
    }
    let p = rows.len();
    let mut acc = NeumaierSum::default();
    for k in Combinations::new(inner, p) {
        let dk = DMatrix::from_fn(p, p, |a, b| d[(rows[a], k[b])]);
        let ek = DMatrix::from_fn(p, p, |a, b| e[(k[a], cols[b])]);
        acc.add(determinant(&dk) * determinant(&ek));
    }
    Ok(acc.total())
}

/// Coefficients of `det(x I - L)` from the leading power down, via
/// `c_k = (-1)^k * (sum of k-by-k principal minors)`.
pub fn characteristic_polynomial(l: &SymmetricMatrix) -> Result<Vec<f64>> {
    let n = l.dim();
    if n > SUBSET_LIMIT {
        return Err(Error::GuardExceeded { n, nmax: SUBSET_LIMIT });
    }
    let mut sums = vec![NeumaierSum::default(); n + 1];
    sums[0].add(1.0);
    for mask in 1u64..(1u64 << n) {
        let s: Vec<usize> = crate::matrix::mask_members(mask).collect();
        sums[s.len()].add(determinant(&l.principal_submatrix(&s)));
    }
    Ok(sums
        .iter()
        .enumerate()
        .map(|(k, s)| if k % 2 == 0 { s.total() } else { -s.total() })
        .collect())
}

/// Lexicographic k-combinations of `0..n`.
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in (i + 1)..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}
