//! Canonical forms for graphs on at most 64 vertices.
//!
//! Equitable refinement (splitting colour classes by neighbour counts until
//! stable) followed by individualization backtracking. The canonical key is
//! the lexicographically least adjacency-row vector over all labelings the
//! search admits, which is a complete isomorphism invariant. Automorphisms
//! discovered as ties during the search prune sibling branches; a generator is
//! only applied at nodes whose individualized prefix it fixes pointwise, which
//! keeps the pruning sound.

use crate::graph::Graph;

#[derive(Clone, Debug)]
pub struct Canonical {
    /// Adjacency rows of the canonical representative, the memo/dedup key.
    pub key: Vec<u64>,
    /// The canonical representative itself, dense on 0..n.
    pub graph: Graph,
    /// Original label -> canonical position; usize::MAX for absent vertices.
    pub to_canonical: Vec<usize>,
    /// Canonical position -> original label.
    pub from_canonical: Vec<usize>,
}

pub fn canonical_form(g: &Graph) -> Canonical {
    let (dense, support) = g.to_dense();
    let n = dense.vertex_count();
    let capacity = g.capacity().max(1);
    if n == 0 {
        return Canonical {
            key: vec![],
            graph: dense,
            to_canonical: vec![usize::MAX; capacity],
            from_canonical: vec![],
        };
    }
    let mut search = Search { g: &dense, n, best: None, gens: Vec::new() };
    let root: Vec<Vec<usize>> = vec![(0..n).collect()];
    search.explore(root, &mut Vec::new());
    let (key, labeling) = search.best.expect("at least one labeling is always found");

    let mut to_canonical = vec![usize::MAX; capacity];
    let mut from_canonical = vec![usize::MAX; n];
    for (dv, &user) in support.iter().enumerate() {
        to_canonical[user] = labeling[dv];
        from_canonical[labeling[dv]] = user;
    }
    Canonical { graph: Graph::from_adj_rows(&key), key, to_canonical, from_canonical }
}

/// Just the key, for memo tables.
pub fn canonical_key(g: &Graph) -> Vec<u64> {
    canonical_form(g).key
}

pub fn are_isomorphic(a: &Graph, b: &Graph) -> bool {
    a.vertex_count() == b.vertex_count() && canonical_key(a) == canonical_key(b)
}

struct Search<'a> {
    g: &'a Graph,
    n: usize,
    best: Option<(Vec<u64>, Vec<usize>)>,
    gens: Vec<Vec<usize>>,
}

const MAX_GENERATORS: usize = 256;

impl Search<'_> {
    fn cell_mask(cell: &[usize]) -> u64 {
        cell.iter().fold(0u64, |m, &v| m | 1 << v)
    }

    /// Split cells by neighbour counts against every cell until stable.
    /// Deterministic: splitters run in cell order, fragments sort by count.
    fn refine(&self, mut cells: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
        loop {
            let mut changed = false;
            let splitters: Vec<u64> = cells.iter().map(|c| Self::cell_mask(c)).collect();
            for s in &splitters {
                let mut next: Vec<Vec<usize>> = Vec::with_capacity(cells.len());
                for cell in &cells {
                    if cell.len() == 1 {
                        next.push(cell.clone());
                        continue;
                    }
                    let mut buckets: std::collections::BTreeMap<u32, Vec<usize>> =
                        std::collections::BTreeMap::new();
                    for &v in cell {
                        let count = (self.g.adj(v).bits() & s).count_ones();
                        buckets.entry(count).or_default().push(v);
                    }
                    if buckets.len() > 1 {
                        changed = true;
                    }
                    next.extend(buckets.into_values());
                }
                cells = next;
            }
            if !changed {
                return cells;
            }
        }
    }

    fn key_for(&self, labeling: &[usize]) -> Vec<u64> {
        let mut rows = vec![0u64; self.n];
        for v in 0..self.n {
            let mut bits = 0u64;
            for w in self.g.adj(v).iter() {
                bits |= 1 << labeling[w];
            }
            rows[labeling[v]] = bits;
        }
        rows
    }

    /// Union-find orbits under the stored generators that fix `prefix`.
    fn orbits_fixing(&self, prefix: &[usize]) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for gen in &self.gens {
            if prefix.iter().any(|&p| gen[p] != p) {
                continue;
            }
            for v in 0..self.n {
                let (a, b) = (find(&mut parent, v), find(&mut parent, gen[v]));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        (0..self.n).map(|v| find(&mut parent, v)).collect()
    }

    fn explore(&mut self, cells: Vec<Vec<usize>>, prefix: &mut Vec<usize>) {
        let cells = self.refine(cells);
        if cells.iter().all(|c| c.len() == 1) {
            let mut labeling = vec![0usize; self.n];
            for (pos, cell) in cells.iter().enumerate() {
                labeling[cell[0]] = pos;
            }
            let key = self.key_for(&labeling);
            match &self.best {
                None => self.best = Some((key, labeling)),
                Some((best_key, best_lab)) => {
                    if key < *best_key {
                        self.best = Some((key, labeling));
                    } else if key == *best_key && self.gens.len() < MAX_GENERATORS {
                        let mut inv = vec![0usize; self.n];
                        for v in 0..self.n {
                            inv[best_lab[v]] = v;
                        }
                        let tau: Vec<usize> = (0..self.n).map(|v| inv[labeling[v]]).collect();
                        if tau.iter().enumerate().any(|(a, &b)| a != b) {
                            self.gens.push(tau);
                        }
                    }
                }
            }
            return;
        }

        let ci = cells.iter().position(|c| c.len() > 1).expect("non-discrete partition");
        let branch_cell = cells[ci].clone();
        let mut explored: Vec<usize> = Vec::new();
        for &v in &branch_cell {
            if !explored.is_empty() {
                let orbit = self.orbits_fixing(prefix);
                if explored.iter().any(|&u| orbit[u] == orbit[v]) {
                    continue;
                }
            }
            explored.push(v);
            let mut next: Vec<Vec<usize>> = Vec::with_capacity(cells.len() + 1);
            for (i, c) in cells.iter().enumerate() {
                if i == ci {
                    next.push(vec![v]);
                    next.push(c.iter().copied().filter(|&w| w != v).collect());
                } else {
                    next.push(c.clone());
                }
            }
            prefix.push(v);
            self.explore(next, prefix);
            prefix.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family;
    use crate::graph::VertexSet;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn relabel(g: &Graph, perm: &[usize]) -> Graph {
        let mut h = Graph::empty(perm.len()).unwrap();
        for (u, v) in g.edges() {
            h.add_edge(perm[u], perm[v]).unwrap();
        }
        h
    }

    #[test]
    fn key_is_relabel_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for seed in 0..40 {
            let g = family::gnp(9, 0.4, seed).unwrap();
            let mut perm: Vec<usize> = (0..9).collect();
            perm.shuffle(&mut rng);
            let h = relabel(&g, &perm);
            assert_eq!(canonical_key(&g), canonical_key(&h), "seed {seed}");
        }
    }

    #[test]
    fn canonical_graph_is_isomorphic_copy() {
        let g = family::gnp(10, 0.35, 3).unwrap();
        let c = canonical_form(&g);
        assert_eq!(c.graph.edge_count(), g.edge_count());
        for (u, v) in g.edges() {
            assert!(c.graph.has_edge(c.to_canonical[u], c.to_canonical[v]));
        }
        for p in 0..10 {
            assert_eq!(c.to_canonical[c.from_canonical[p]], p);
        }
    }

    #[test]
    fn distinguishes_equal_degree_sequences() {
        // C6 and two disjoint triangles are both 2-regular on 6 vertices
        let c6 = family::cycle(6).unwrap();
        let tt = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert_ne!(canonical_key(&c6), canonical_key(&tt));
        assert!(!are_isomorphic(&c6, &tt));
    }

    #[test]
    fn symmetric_graphs_terminate_quickly() {
        // highly symmetric inputs exercise the orbit pruning
        for g in [
            family::complete(9).unwrap(),
            family::k5_copies(2).unwrap(),
            family::petersen(),
            family::cycle(12).unwrap(),
            family::complete_bipartite(4, 4).unwrap(),
        ] {
            let c = canonical_form(&g);
            assert_eq!(c.graph.edge_count(), g.edge_count());
        }
    }

    #[test]
    fn sparse_support_canonicalizes_like_dense() {
        let g = family::cycle(7).unwrap();
        let h = g.delete_vertices(VertexSet::from_iter([2]));
        // P6 with labels {0,1,3,4,5,6} vs a fresh dense P6
        assert!(are_isomorphic(&h, &family::path(6).unwrap()));
        let c = canonical_form(&h);
        assert_eq!(c.to_canonical[2], usize::MAX);
        assert_eq!(c.from_canonical.len(), 6);
    }

    #[test]
    fn empty_and_singleton() {
        let e = Graph::empty(0).unwrap();
        assert_eq!(canonical_form(&e).key, Vec::<u64>::new());
        let s = Graph::empty(1).unwrap();
        assert_eq!(canonical_form(&s).key, vec![0]);
        assert!(!are_isomorphic(&e, &s));
    }
}
