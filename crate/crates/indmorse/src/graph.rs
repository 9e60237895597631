//! Dense small-graph representation: vertices are integers below 64, vertex
//! subsets are single machine words, adjacency is one word per vertex.
//!
//! Deleting vertices keeps the identities of the survivors stable (the support
//! mask shrinks, labels do not shift). That makes recursive constructions and
//! derivation traces line up across reduction steps without translation tables.

use crate::error::{Error, Result};
use std::fmt;

/// Hard cap imposed by the word-sized subset representation.
pub const MAX_VERTICES: usize = 64;

/// A set of vertices, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct VertexSet(u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn singleton(v: usize) -> VertexSet {
        debug_assert!(v < MAX_VERTICES);
        VertexSet(1 << v)
    }

    pub fn full(n: usize) -> VertexSet {
        debug_assert!(n <= MAX_VERTICES);
        if n == MAX_VERTICES {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    pub fn from_bits(bits: u64) -> VertexSet {
        VertexSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, v: usize) -> bool {
        v < MAX_VERTICES && self.0 >> v & 1 == 1
    }

    pub fn insert(&mut self, v: usize) {
        debug_assert!(v < MAX_VERTICES);
        self.0 |= 1 << v;
    }

    pub fn remove(&mut self, v: usize) {
        debug_assert!(v < MAX_VERTICES);
        self.0 &= !(1 << v);
    }

    pub fn with(self, v: usize) -> VertexSet {
        VertexSet(self.0 | 1 << v)
    }

    pub fn without(self, v: usize) -> VertexSet {
        VertexSet(self.0 & !(1 << v))
    }

    pub fn union(self, other: VertexSet) -> VertexSet {
        VertexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: VertexSet) -> VertexSet {
        VertexSet(self.0 & other.0)
    }

    pub fn difference(self, other: VertexSet) -> VertexSet {
        VertexSet(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: VertexSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Smallest member, if any.
    pub fn min(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    pub fn iter(self) -> BitIter {
        BitIter(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> VertexSet {
        let mut s = VertexSet::EMPTY;
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl serde::Serialize for VertexSet {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_seq(self.iter())
    }
}

/// Iterator over set bits, ascending.
pub struct BitIter(u64);

impl Iterator for BitIter {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(v)
    }
}

/// An undirected simple graph on a subset of the labels 0..64.
///
/// Invariants: adjacency is symmetric, loop-free, and confined to the support
/// mask; rows of absent vertices are empty.
#[derive(Clone)]
pub struct Graph {
    verts: VertexSet,
    adj: Vec<VertexSet>,
}

/// Result of iterated degree-two contraction.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub graph: Graph,
    /// True when a contraction produced an edge that already existed, i.e. the
    /// true multigraph result had parallel edges that were merged away.
    pub merged_parallel: bool,
}

impl Graph {
    /// Edgeless graph on vertices 0..n.
    pub fn empty(n: usize) -> Result<Graph> {
        if n > MAX_VERTICES {
            return Err(Error::TooManyVertices { n, max: MAX_VERTICES });
        }
        Ok(Graph { verts: VertexSet::full(n), adj: vec![VertexSet::EMPTY; n] })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut g = Graph::empty(n)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Rebuild from dense adjacency rows (row i = neighbour mask of vertex i).
    pub fn from_adj_rows(rows: &[u64]) -> Graph {
        let n = rows.len();
        debug_assert!(n <= MAX_VERTICES);
        Graph {
            verts: VertexSet::full(n),
            adj: rows.iter().map(|&r| VertexSet::from_bits(r)).collect(),
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        if !self.verts.contains(u) {
            return Err(Error::UnknownVertex(u));
        }
        if !self.verts.contains(v) {
            return Err(Error::UnknownVertex(v));
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        Ok(())
    }

    pub fn vertices(&self) -> VertexSet {
        self.verts
    }

    pub fn vertex_count(&self) -> usize {
        self.verts.len()
    }

    pub fn capacity(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.verts.iter().map(|v| self.adj[v].len()).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in self.verts.iter() {
            for v in self.adj[u].iter() {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.verts.contains(u) && self.adj[u].contains(v)
    }

    /// Open neighbourhood of a present vertex.
    pub fn neighbourhood(&self, v: usize) -> Result<VertexSet> {
        if !self.verts.contains(v) {
            return Err(Error::UnknownVertex(v));
        }
        Ok(self.adj[v])
    }

    /// Unchecked adjacency row; callers must pass a present vertex.
    pub(crate) fn adj(&self, v: usize) -> VertexSet {
        self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.verts.iter().map(|v| self.degree(v)).min()
    }

    /// Induced subgraph on `verts \ s`. Labels of survivors are unchanged.
    pub fn delete_vertices(&self, s: VertexSet) -> Graph {
        let keep = self.verts.difference(s);
        self.induced(keep)
    }

    /// Induced subgraph on `keep` (intersected with the support).
    pub fn induced(&self, keep: VertexSet) -> Graph {
        let keep = keep.intersection(self.verts);
        let adj = (0..self.adj.len())
            .map(|v| if keep.contains(v) { self.adj[v].intersection(keep) } else { VertexSet::EMPTY })
            .collect();
        Graph { verts: keep, adj }
    }

    /// Copy with vertices packed down to 0..n. Returns the packed graph and
    /// the support map (new label -> old label, ascending).
    pub fn to_dense(&self) -> (Graph, Vec<usize>) {
        let support: Vec<usize> = self.verts.iter().collect();
        let mut pos = vec![usize::MAX; self.adj.len()];
        for (i, &v) in support.iter().enumerate() {
            pos[v] = i;
        }
        let rows: Vec<u64> = support
            .iter()
            .map(|&v| {
                let mut r = 0u64;
                for w in self.adj[v].iter() {
                    r |= 1 << pos[w];
                }
                r
            })
            .collect();
        (Graph::from_adj_rows(&rows), support)
    }

    /// Disjoint union. Both operands are packed; the left part keeps positions
    /// 0..|G|, the right is shifted. Returns (union, left map, right map) where
    /// each map sends an operand vertex to its label in the union.
    pub fn disjoint_union(&self, other: &Graph) -> Result<(Graph, Vec<usize>, Vec<usize>)> {
        let total = self.vertex_count() + other.vertex_count();
        if total > MAX_VERTICES {
            return Err(Error::TooManyVertices { n: total, max: MAX_VERTICES });
        }
        let (ga, map_a) = self.to_dense();
        let (gb, map_b) = other.to_dense();
        let na = ga.vertex_count();
        let mut g = Graph::empty(total)?;
        for (u, v) in ga.edges() {
            g.add_edge(u, v)?;
        }
        for (u, v) in gb.edges() {
            g.add_edge(u + na, v + na)?;
        }
        let mut left = vec![usize::MAX; self.adj.len()];
        for (new, &old) in map_a.iter().enumerate() {
            left[old] = new;
        }
        let mut right = vec![usize::MAX; other.adj.len()];
        for (new, &old) in map_b.iter().enumerate() {
            right[old] = new + na;
        }
        Ok((g, left, right))
    }

    /// First pair (u, v) such that N(v) is contained in N(u), scanning (v, u)
    /// lexicographically. `u` is the vertex a fold deletes, `v` the witness.
    pub fn find_fold(&self) -> Option<(usize, usize)> {
        for v in self.verts.iter() {
            for u in self.verts.iter() {
                if u != v && self.adj[v].is_subset_of(self.adj[u]) {
                    return Some((u, v));
                }
            }
        }
        None
    }

    /// Repeatedly replace a degree-two vertex by an edge between its
    /// neighbours, merging parallel edges, until no degree-two vertex remains.
    ///
    /// Bare cycle components are rejected up front: contracting one to the end
    /// would need a loop, which the simple representation cannot express.
    pub fn contract_degree_two(&self) -> Result<Contraction> {
        if let Some(d) = self.min_degree() {
            if d < 2 {
                return Err(Error::Precondition(format!(
                    "contract_degree_two needs minimum degree 2, found degree {d}"
                )));
            }
        }
        for comp in self.components() {
            if comp.iter().all(|v| self.degree(v) == 2) {
                return Err(Error::CycleComponent(comp.to_vec()));
            }
        }
        let mut g = self.clone();
        let mut merged = false;
        loop {
            let Some(w) = g.verts.iter().find(|&w| g.degree(w) == 2) else {
                break;
            };
            let mut nb = g.adj[w].iter();
            let a = nb.next().expect("degree two");
            let b = nb.next().expect("degree two");
            g = g.delete_vertices(VertexSet::singleton(w));
            if g.adj[a].contains(b) {
                merged = true;
            } else {
                g.add_edge(a, b)?;
            }
        }
        Ok(Contraction { graph: g, merged_parallel: merged })
    }

    /// Some(t) iff the graph is a complete bipartite graph with parts of sizes
    /// 3 and t, t >= 3.
    pub fn is_complete_bipartite_3t(&self) -> Option<usize> {
        if self.vertex_count() < 6 || !self.is_connected() {
            return None;
        }
        let start = self.verts.min()?;
        let mut side = [VertexSet::EMPTY, VertexSet::EMPTY];
        let mut colour = vec![usize::MAX; self.adj.len()];
        let mut queue = vec![start];
        colour[start] = 0;
        side[0].insert(start);
        while let Some(v) = queue.pop() {
            for w in self.adj[v].iter() {
                if colour[w] == usize::MAX {
                    colour[w] = 1 - colour[v];
                    side[colour[w]].insert(w);
                    queue.push(w);
                } else if colour[w] == colour[v] {
                    return None;
                }
            }
        }
        let (a, b) = (side[0].len(), side[1].len());
        // complete across the parts?
        for v in side[0].iter() {
            if self.adj[v] != side[1] {
                return None;
            }
        }
        match (a, b) {
            (3, t) if t >= 3 => Some(t),
            (t, 3) if t >= 3 => Some(t),
            _ => None,
        }
    }

    /// Connected components as vertex sets, ordered by smallest member.
    pub fn components(&self) -> Vec<VertexSet> {
        let mut seen = VertexSet::EMPTY;
        let mut out = Vec::new();
        for v in self.verts.iter() {
            if seen.contains(v) {
                continue;
            }
            let mut comp = VertexSet::singleton(v);
            let mut stack = vec![v];
            while let Some(x) = stack.pop() {
                for y in self.adj[x].iter() {
                    if !comp.contains(y) {
                        comp.insert(y);
                        stack.push(y);
                    }
                }
            }
            seen = seen.union(comp);
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// True when the graph has no cycles.
    pub fn is_forest(&self) -> bool {
        let comps = self.components().len();
        self.edge_count() + comps == self.vertex_count()
    }

    pub fn isolated_vertex(&self) -> Option<usize> {
        self.verts.iter().find(|&v| self.adj[v].is_empty())
    }

    /// Smallest edge whose endpoints both have degree one.
    pub fn isolated_edge(&self) -> Option<(usize, usize)> {
        for u in self.verts.iter() {
            if self.degree(u) == 1 {
                let v = self.adj[u].min().expect("degree one");
                if self.degree(v) == 1 && u < v {
                    return Some((u, v));
                }
            }
        }
        None
    }

    /// Highest-degree vertex, ties broken by smallest label.
    pub fn max_degree_vertex(&self) -> Option<usize> {
        self.verts.iter().max_by_key(|&v| (self.degree(v), std::cmp::Reverse(v)))
    }

    /// Union of open neighbourhoods of `s`.
    pub fn neighbourhood_of_set(&self, s: VertexSet) -> VertexSet {
        s.iter().fold(VertexSet::EMPTY, |acc, v| acc.union(self.adj[v]))
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Graph) -> bool {
        self.verts == other.verts && self.verts.iter().all(|v| self.adj[v] == other.adj[v])
    }
}

impl Eq for Graph {}

impl std::hash::Hash for Graph {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.verts.hash(state);
        for v in self.verts.iter() {
            self.adj[v].hash(state);
        }
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(V={:?}, E={:?})", self.verts, self.edges())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family;

    #[test]
    fn neighbourhood_complete_graph() {
        let g = family::complete(5).unwrap();
        let n = g.neighbourhood(2).unwrap();
        assert_eq!(n.to_vec(), vec![0, 1, 3, 4]);
        assert!(g.neighbourhood(7).is_err());
    }

    #[test]
    fn delete_then_delete_composes() {
        let g = family::cycle(6).unwrap();
        let s = VertexSet::from_iter([0]);
        let t = VertexSet::from_iter([3, 4]);
        let once = g.delete_vertices(s.union(t));
        let twice = g.delete_vertices(s).delete_vertices(t);
        assert_eq!(once, twice);
    }

    #[test]
    fn fold_on_star_picks_lexicographic_pair() {
        // star with centre 0: any two leaves satisfy the containment;
        // scanning (v, u) lexicographically lands on v=1, u=2.
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let (u, v) = g.find_fold().unwrap();
        assert_eq!((u, v), (2, 1));
        assert!(g.neighbourhood(v).unwrap().is_subset_of(g.neighbourhood(u).unwrap()));
    }

    #[test]
    fn fold_prefers_isolated_vertex_witness() {
        let mut g = Graph::empty(3).unwrap();
        g.add_edge(1, 2).unwrap();
        // N(0) = {} is contained in every neighbourhood
        let (u, v) = g.find_fold().unwrap();
        assert_eq!((u, v), (1, 0));
    }

    #[test]
    fn no_fold_on_five_cycle() {
        // oracle: exhaustive scan over ordered pairs
        let g = family::cycle(5).unwrap();
        for v in 0..5 {
            for u in 0..5 {
                if u != v {
                    let nv = g.neighbourhood(v).unwrap();
                    let nu = g.neighbourhood(u).unwrap();
                    assert!(!nv.is_subset_of(nu), "unexpected fold ({v},{u})");
                }
            }
        }
        assert_eq!(g.find_fold(), None);
    }

    #[test]
    fn disjoint_union_keeps_both_sides() {
        let a = family::complete(3).unwrap();
        let b = family::path(2).unwrap();
        let (u, left, right) = a.disjoint_union(&b).unwrap();
        assert_eq!(u.vertex_count(), 5);
        assert_eq!(u.edge_count(), 4);
        assert!(u.has_edge(left[0], left[1]));
        assert!(u.has_edge(right[0], right[1]));
        assert!(!u.has_edge(left[0], right[0]));
    }

    #[test]
    fn contraction_of_theta_collapses_with_flag() {
        // two hubs 0,1 joined by three length-two paths through 2,3,4
        let g = Graph::from_edges(5, &[(0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 1)]).unwrap();
        let c = g.contract_degree_two().unwrap();
        assert!(c.merged_parallel);
        assert_eq!(c.graph.vertex_count(), 2);
        assert_eq!(c.graph.edge_count(), 1);
    }

    #[test]
    fn contraction_rejects_bare_cycle_component() {
        let g = family::cycle(5).unwrap();
        match g.contract_degree_two() {
            Err(Error::CycleComponent(vs)) => assert_eq!(vs.len(), 5),
            other => panic!("expected cycle-component error, got {other:?}"),
        }
    }

    #[test]
    fn contraction_is_identity_above_degree_two() {
        let g = family::complete_bipartite(3, 4).unwrap();
        let c = g.contract_degree_two().unwrap();
        assert!(!c.merged_parallel);
        assert_eq!(c.graph, g);
    }

    #[test]
    fn contraction_smooths_subdivided_edges() {
        // K4 with one edge subdivided twice: degree-two chain contracts back
        let g = Graph::from_edges(6, &[(0, 1), (0, 2), (1, 2), (3, 0), (3, 1), (3, 4), (4, 5), (5, 2)]).unwrap();
        let c = g.contract_degree_two().unwrap();
        assert_eq!(c.graph.vertex_count(), 4);
        assert_eq!(c.graph.edge_count(), 6);
        assert!(c.graph.min_degree().unwrap() >= 3);
    }

    #[test]
    fn complete_bipartite_recognition() {
        assert_eq!(family::complete_bipartite(3, 4).unwrap().is_complete_bipartite_3t(), Some(4));
        assert_eq!(family::complete_bipartite(3, 3).unwrap().is_complete_bipartite_3t(), Some(3));
        assert_eq!(family::complete_bipartite(4, 3).unwrap().is_complete_bipartite_3t(), Some(4));
        assert_eq!(family::complete_bipartite(3, 2).unwrap().is_complete_bipartite_3t(), None);
        assert_eq!(family::complete(6).unwrap().is_complete_bipartite_3t(), None);
        // Petersen has odd cycles, so it is not bipartite at all
        assert_eq!(family::petersen().is_complete_bipartite_3t(), None);
    }

    #[test]
    fn forest_and_component_bookkeeping() {
        let g = family::random_forest(12, 7).unwrap();
        assert!(g.is_forest());
        let c = family::cycle(4).unwrap();
        assert!(!c.is_forest());
        let (u, _, _) = g.disjoint_union(&c).unwrap();
        assert!(!u.is_forest());
        assert_eq!(u.components().len(), g.components().len() + 1);
    }

    #[test]
    fn isolated_edge_detection() {
        let g = Graph::from_edges(5, &[(0, 1), (2, 3), (3, 4)]).unwrap();
        assert_eq!(g.isolated_edge(), Some((0, 1)));
        let h = family::path(3).unwrap();
        assert_eq!(h.isolated_edge(), None);
    }
}
