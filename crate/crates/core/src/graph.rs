//! Undirected graphs and the chordal machinery used by the samplers:
//! Erdős–Rényi generation, maximum cardinality search, triangulation by the
//! elimination game, and orientation along a perfect ordering.
//!
//! Vertices are `0..p` in the API. The edge-list file format in [`crate::io`]
//! is 1-based.

use std::collections::BTreeSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{stream_rng, GRAPH_STREAM};

/// Simple undirected graph on vertices `0..p`, stored as sorted adjacency sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UndirectedGraph {
    adj: Vec<BTreeSet<usize>>,
}

impl UndirectedGraph {
    /// Edgeless graph on `p` vertices.
    pub fn empty(p: usize) -> Self {
        Self {
            adj: vec![BTreeSet::new(); p],
        }
    }

    pub fn complete(p: usize) -> Self {
        let mut g = Self::empty(p);
        for i in 0..p {
            for j in (i + 1)..p {
                g.insert_unchecked(i, j);
            }
        }
        g
    }

    /// Path `0 - 1 - ... - (p-1)`.
    pub fn chain(p: usize) -> Self {
        let mut g = Self::empty(p);
        for i in 1..p {
            g.insert_unchecked(i - 1, i);
        }
        g
    }

    /// Cycle `0 - 1 - ... - (p-1) - 0`. Requires `p >= 3`.
    pub fn cycle(p: usize) -> Result<Self> {
        if p < 3 {
            return Err(Error::InvalidParameter(format!("cycle needs at least 3 vertices, got {p}")));
        }
        let mut g = Self::chain(p);
        g.insert_unchecked(0, p - 1);
        Ok(g)
    }

    /// Builds a graph from 0-based edges. Self-loops, out-of-range vertices and
    /// repeated edges are rejected.
    pub fn from_edges<I>(p: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(p);
        for (i, j) in edges {
            if !g.add_edge(i, j)? {
                return Err(Error::InvalidParameter(format!("duplicate edge {{{i}, {j}}}")));
            }
        }
        Ok(g)
    }

    /// Adds `{i, j}`. Returns `false` if the edge was already present.
    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<bool> {
        let p = self.p();
        if i >= p || j >= p {
            return Err(Error::InvalidParameter(format!(
                "edge {{{i}, {j}}} out of range for {p} vertices"
            )));
        }
        if i == j {
            return Err(Error::InvalidParameter(format!("self-loop at vertex {i}")));
        }
        Ok(self.insert_unchecked(i, j))
    }

    fn insert_unchecked(&mut self, i: usize, j: usize) -> bool {
        let fresh = self.adj[i].insert(j);
        self.adj[j].insert(i);
        fresh
    }

    /// Number of vertices.
    pub fn p(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj.get(i).is_some_and(|n| n.contains(&j))
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[i].iter().copied()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(i, n)| n.range((i + 1)..).map(move |&j| (i, j)))
    }

    /// True if every pair of distinct vertices in `vertices` is adjacent.
    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(k, &a)| vertices[k + 1..].iter().all(|&b| self.has_edge(a, b)))
    }

    pub fn is_subgraph_of(&self, other: &UndirectedGraph) -> bool {
        self.p() == other.p() && self.edges().all(|(i, j)| other.has_edge(i, j))
    }
}

/// A permutation of `0..p`; position `k` holds the `k`-th vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ordering {
    perm: Vec<usize>,
    position: Vec<usize>,
}

impl Ordering {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let p = perm.len();
        let mut position = vec![usize::MAX; p];
        for (k, &v) in perm.iter().enumerate() {
            if v >= p || position[v] != usize::MAX {
                return Err(Error::InvalidParameter(format!("{perm:?} is not a permutation of 0..{p}")));
            }
            position[v] = k;
        }
        Ok(Self { perm, position })
    }

    pub fn identity(p: usize) -> Self {
        Self {
            perm: (0..p).collect(),
            position: (0..p).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// Vertex at position `k`.
    pub fn vertex(&self, k: usize) -> usize {
        self.perm[k]
    }

    /// Position of vertex `v`.
    pub fn position(&self, v: usize) -> usize {
        self.position[v]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.position[a] < self.position[b]
    }
}

/// Acyclic orientation of an undirected graph along an ordering: every edge
/// points from the earlier to the later vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcyclicOrientation {
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    order: Ordering,
}

impl AcyclicOrientation {
    /// Parents of `v`, sorted by position in the ordering.
    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    /// Children of `v`, sorted by position in the ordering.
    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn order(&self) -> &Ordering {
        &self.order
    }

    pub fn p(&self) -> usize {
        self.parents.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }
}

/// Erdős–Rényi graph: each of the `p(p-1)/2` pairs is an edge independently
/// with probability `d`. Uses the graph stream of `seed`.
pub fn erdos_renyi(p: usize, d: f64, seed: u64) -> Result<UndirectedGraph> {
    let mut rng = stream_rng(seed, GRAPH_STREAM);
    erdos_renyi_with_rng(p, d, &mut rng)
}

pub fn erdos_renyi_with_rng<R: Rng + ?Sized>(p: usize, d: f64, rng: &mut R) -> Result<UndirectedGraph> {
    if p == 0 {
        return Err(Error::InvalidParameter("graph needs at least one vertex".into()));
    }
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::InvalidParameter(format!("edge probability {d} outside [0, 1]")));
    }
    let mut g = UndirectedGraph::empty(p);
    for i in 0..p {
        for j in (i + 1)..p {
            // `random_bool` panics outside [0, 1]; checked above.
            if rng.random_bool(d) {
                g.insert_unchecked(i, j);
            }
        }
    }
    Ok(g)
}

/// Maximum cardinality search. Repeatedly visits the unvisited vertex with the
/// most visited neighbours, breaking ties by smallest label. Returns the visit
/// order and whether it is a perfect ordering (which holds iff `g` is chordal).
pub fn max_cardinality_search(g: &UndirectedGraph) -> (Ordering, bool) {
    let p = g.p();
    let mut weight = vec![0usize; p];
    let mut visited = vec![false; p];
    let mut perm = Vec::with_capacity(p);
    for _ in 0..p {
        let v = (0..p)
            .filter(|&v| !visited[v])
            .max_by(|&a, &b| weight[a].cmp(&weight[b]).then(b.cmp(&a)))
            .expect("an unvisited vertex remains");
        visited[v] = true;
        perm.push(v);
        for w in g.neighbors(v) {
            if !visited[w] {
                weight[w] += 1;
            }
        }
    }
    let order = Ordering { position: invert(&perm), perm };
    let perfect = is_perfect_ordering(g, &order);
    (order, perfect)
}

fn invert(perm: &[usize]) -> Vec<usize> {
    let mut position = vec![0; perm.len()];
    for (k, &v) in perm.iter().enumerate() {
        position[v] = k;
    }
    position
}

/// Checks that the earlier neighbours of every vertex form a clique.
///
/// For each vertex only the latest earlier neighbour `f` is inspected: the
/// remaining earlier neighbours must be adjacent to `f`. Applied to every
/// vertex this is equivalent to the full clique condition.
pub fn is_perfect_ordering(g: &UndirectedGraph, order: &Ordering) -> bool {
    if order.len() != g.p() {
        return false;
    }
    (0..g.p()).all(|v| {
        let earlier: Vec<usize> = g.neighbors(v).filter(|&w| order.precedes(w, v)).collect();
        let Some(&follow) = earlier.iter().max_by_key(|&&w| order.position(w)) else {
            return true;
        };
        earlier.iter().all(|&w| w == follow || g.has_edge(w, follow))
    })
}

/// Chordal supergraph together with a perfect ordering for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangulation {
    pub graph: UndirectedGraph,
    pub order: Ordering,
    /// Added edges `(i, j)` with `i < j`, sorted.
    pub fill: Vec<(usize, usize)>,
}

/// Triangulates `g` by the elimination game on its MCS order: vertices are
/// eliminated from last to first, and the earlier neighbours of each
/// eliminated vertex are made pairwise adjacent. The MCS order is then perfect
/// for the filled graph. Chordal input comes back unchanged.
pub fn triangulate(g: &UndirectedGraph) -> Triangulation {
    let (order, perfect) = max_cardinality_search(g);
    let mut filled = g.clone();
    let mut fill = BTreeSet::new();
    if !perfect {
        for k in (0..order.len()).rev() {
            let v = order.vertex(k);
            let earlier: Vec<usize> = filled.neighbors(v).filter(|&w| order.position(w) < k).collect();
            for (a_idx, &a) in earlier.iter().enumerate() {
                for &b in &earlier[a_idx + 1..] {
                    if filled.insert_unchecked(a, b) {
                        fill.insert((a.min(b), a.max(b)));
                    }
                }
            }
        }
    }
    debug_assert!(is_perfect_ordering(&filled, &order));
    Triangulation {
        graph: filled,
        order,
        fill: fill.into_iter().collect(),
    }
}

/// Orients `g` along `order`. Fails unless `order` is perfect for `g`, which
/// guarantees every parent set is a clique (no v-structures).
pub fn orient_chordal(g: &UndirectedGraph, order: &Ordering) -> Result<AcyclicOrientation> {
    if order.len() != g.p() {
        return Err(Error::DimensionMismatch {
            expected: g.p(),
            found: order.len(),
        });
    }
    if !is_perfect_ordering(g, order) {
        return Err(Error::NotPerfectOrdering);
    }
    let p = g.p();
    let mut parents = vec![Vec::new(); p];
    let mut children = vec![Vec::new(); p];
    for k in 0..p {
        let v = order.vertex(k);
        for w in g.neighbors(v) {
            if order.position(w) < k {
                parents[v].push(w);
            } else {
                children[v].push(w);
            }
        }
        parents[v].sort_by_key(|&w| order.position(w));
        children[v].sort_by_key(|&w| order.position(w));
    }
    Ok(AcyclicOrientation {
        parents,
        children,
        order: order.clone(),
    })
}
