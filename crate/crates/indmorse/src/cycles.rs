//! Cycle structure of a graph: girth, effective girth, vertex-disjoint cycle
//! packing, feedback vertex sets, and the table g(k) bounding how few
//! branch vertices some cycle must carry.

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use itertools::Itertools;
use std::collections::HashMap;

/// Exhaustive induced-cycle enumeration works on at most this many vertices.
pub const EXACT_CYCLE_CAP: usize = 16;
/// Exact minimum feedback sets are searched up to this many vertices.
pub const EXACT_FEEDBACK_CAP: usize = 20;

/// Length of a shortest cycle; None when the graph is a forest.
///
/// For every edge uv, a shortest cycle through uv is uv plus a shortest
/// u-v path avoiding the edge; minimising over edges is exact.
pub fn girth(g: &Graph) -> Option<usize> {
    find_short_cycle(g).map(|c| c.len())
}

/// A shortest cycle as a closed walk (each vertex once), or None.
pub fn find_short_cycle(g: &Graph) -> Option<Vec<usize>> {
    let mut best: Option<Vec<usize>> = None;
    for (u, v) in g.edges() {
        if let Some(path) = bfs_path_avoiding(g, u, v, (u, v)) {
            if best.as_ref().is_none_or(|b| path.len() < b.len()) {
                best = Some(path);
            }
        }
    }
    best
}

/// Shortest u..v path that does not use the edge `skip`, as a vertex walk.
fn bfs_path_avoiding(g: &Graph, from: usize, to: usize, skip: (usize, usize)) -> Option<Vec<usize>> {
    let mut parent = vec![usize::MAX; 64];
    let mut seen = VertexSet::singleton(from);
    let mut frontier = vec![from];
    while !frontier.is_empty() && !seen.contains(to) {
        let mut next = Vec::new();
        for &x in &frontier {
            for y in g.adj(x).iter() {
                if (x, y) == skip || (y, x) == skip || seen.contains(y) {
                    continue;
                }
                seen.insert(y);
                parent[y] = x;
                next.push(y);
            }
        }
        frontier = next;
    }
    if !seen.contains(to) {
        return None;
    }
    let mut walk = vec![to];
    let mut cur = to;
    while cur != from {
        cur = parent[cur];
        walk.push(cur);
    }
    walk.reverse();
    Some(walk)
}

/// Vertex sets of all induced (chordless) cycles, sorted by size then bits.
pub fn induced_cycles(g: &Graph) -> Result<Vec<VertexSet>> {
    let n = g.vertex_count();
    if n > EXACT_CYCLE_CAP {
        return Err(Error::Resource(format!(
            "induced-cycle enumeration capped at {EXACT_CYCLE_CAP} vertices, asked for {n}"
        )));
    }
    let support: Vec<usize> = g.vertices().to_vec();
    let mut out = Vec::new();
    for mask in 1u32..1 << n {
        if mask.count_ones() < 3 {
            continue;
        }
        let set: VertexSet =
            (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| support[i]).collect();
        if is_induced_cycle(g, set) {
            out.push(set);
        }
    }
    out.sort_by_key(|s| (s.len(), s.bits()));
    Ok(out)
}

pub fn is_induced_cycle(g: &Graph, set: VertexSet) -> bool {
    if set.len() < 3 {
        return false;
    }
    for v in set.iter() {
        if g.adj(v).intersection(set).len() != 2 {
            return false;
        }
    }
    // 2-regular and connected means a single cycle
    let start = set.min().expect("nonempty");
    let mut seen = VertexSet::singleton(start);
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for y in g.adj(x).intersection(set).iter() {
            if !seen.contains(y) {
                seen.insert(y);
                stack.push(y);
            }
        }
    }
    seen == set
}

/// Walk order of an induced cycle: start at the least vertex, step first to
/// its smaller neighbour. Deterministic over rotations and reflections.
pub fn cycle_walk(g: &Graph, set: VertexSet) -> Vec<usize> {
    let start = set.min().expect("cycle is nonempty");
    let mut walk = vec![start];
    let mut prev = start;
    let mut cur = g.adj(start).intersection(set).min().expect("degree two");
    while cur != start {
        walk.push(cur);
        let next = g
            .adj(cur)
            .intersection(set)
            .iter()
            .find(|&w| w != prev)
            .expect("cycle continues");
        prev = cur;
        cur = next;
    }
    walk
}

/// Vertices of `cycle` with a neighbour outside it.
pub fn attachments(g: &Graph, cycle: VertexSet) -> VertexSet {
    cycle.iter().filter(|&v| !g.adj(v).is_subset_of(cycle)).collect()
}

/// Minimum over all cycles of the number of degree->=3 vertices on the cycle;
/// None for forests. The minimum is always attained on an induced cycle,
/// since splitting a cycle along a chord keeps a cycle on a vertex subset.
pub fn effective_girth(g: &Graph) -> Result<Option<usize>> {
    let high: VertexSet = g.vertices().iter().filter(|&v| g.degree(v) >= 3).collect();
    Ok(induced_cycles(g)?
        .iter()
        .map(|c| c.intersection(high).len())
        .min())
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct CyclePacking {
    pub lower: usize,
    pub upper: usize,
    /// Pairwise disjoint cycles realizing `lower`.
    pub witness: Vec<Vec<usize>>,
    pub exact: bool,
}

/// Maximum number of vertex-disjoint cycles: exact (branch and bound over
/// induced cycles) within the enumeration cap, otherwise a greedy lower
/// bound paired with feedback-set and girth upper bounds.
pub fn cycle_packing(g: &Graph) -> Result<CyclePacking> {
    if g.vertex_count() <= EXACT_CYCLE_CAP {
        let cycles: Vec<u64> = induced_cycles(g)?.iter().map(|c| c.bits()).collect();
        let mut memo = HashMap::new();
        let avail = g.vertices().bits();
        let best = pack(&cycles, avail, &mut memo);
        // walk the memo to extract one optimal selection
        let mut witness = Vec::new();
        let mut cur = avail;
        while pack(&cycles, cur, &mut memo) > 0 {
            let covered = cycles.iter().filter(|&&c| c & !cur == 0).fold(0u64, |a, &c| a | c);
            let v = covered.trailing_zeros();
            let score = pack(&cycles, cur, &mut memo);
            if pack(&cycles, cur & !(1 << v), &mut memo) == score {
                cur &= !(1 << v);
                continue;
            }
            let c = *cycles
                .iter()
                .find(|&&c| {
                    c & !cur == 0 && c >> v & 1 == 1 && 1 + pack(&cycles, cur & !c, &mut memo) == score
                })
                .expect("some cycle achieves the packing score");
            witness.push(cycle_walk(g, VertexSet::from_bits(c)));
            cur &= !c;
        }
        debug_assert_eq!(witness.len(), best);
        return Ok(CyclePacking { lower: best, upper: best, witness, exact: true });
    }

    // greedy extraction of short cycles for the lower bound
    let mut work = g.clone();
    let mut witness = Vec::new();
    while let Some(cyc) = find_short_cycle(&work) {
        work = work.delete_vertices(cyc.iter().copied().collect());
        witness.push(cyc);
    }
    let lower = witness.len();
    let feedback = feedback_set_any_size(g)?;
    let by_girth = girth(g).map_or(0, |gi| g.vertex_count() / gi);
    let upper = feedback.len().min(by_girth).max(lower);
    Ok(CyclePacking { lower, upper, witness, exact: lower == upper })
}

fn pack(cycles: &[u64], avail: u64, memo: &mut HashMap<u64, usize>) -> usize {
    if let Some(&v) = memo.get(&avail) {
        return v;
    }
    let covered = cycles.iter().filter(|&&c| c & !avail == 0).fold(0u64, |a, &c| a | c);
    if covered == 0 {
        memo.insert(avail, 0);
        return 0;
    }
    let v = covered.trailing_zeros();
    let mut best = pack(cycles, avail & !(1 << v), memo);
    for &c in cycles.iter().filter(|&&c| c & !avail == 0 && c >> v & 1 == 1) {
        best = best.max(1 + pack(cycles, avail & !c, memo));
    }
    memo.insert(avail, best);
    best
}

/// Smallest vertex set whose deletion leaves a forest, searched by size then
/// lexicographic order; exact up to EXACT_FEEDBACK_CAP vertices.
pub fn min_feedback_set(g: &Graph) -> Result<VertexSet> {
    let n = g.vertex_count();
    if n > EXACT_FEEDBACK_CAP {
        return Err(Error::Resource(format!(
            "exact feedback search capped at {EXACT_FEEDBACK_CAP} vertices, asked for {n}"
        )));
    }
    let support = g.vertices().to_vec();
    for size in 0..=n {
        for subset in support.iter().combinations(size) {
            let s: VertexSet = subset.into_iter().copied().collect();
            if g.delete_vertices(s).is_forest() {
                return Ok(s);
            }
        }
    }
    unreachable!("deleting every vertex leaves a forest")
}

/// Feedback set without a size guarantee: exact under the cap, greedy above.
pub fn feedback_set_any_size(g: &Graph) -> Result<VertexSet> {
    if g.vertex_count() <= EXACT_FEEDBACK_CAP {
        return min_feedback_set(g);
    }
    Ok(greedy_feedback_set(g))
}

/// Remove the busiest vertex of some shortest cycle until no cycle remains.
pub fn greedy_feedback_set(g: &Graph) -> VertexSet {
    let mut work = g.clone();
    let mut out = VertexSet::EMPTY;
    while let Some(cyc) = find_short_cycle(&work) {
        let v = cyc
            .iter()
            .copied()
            .max_by_key(|&v| (work.degree(v), std::cmp::Reverse(v)))
            .expect("cycle is nonempty");
        out.insert(v);
        work = work.delete_vertices(VertexSet::singleton(v));
    }
    out
}

/// Upper bounds g(k) on the least number of branch vertices some cycle must
/// carry in a min-degree-2 graph with at most k disjoint cycles.
#[derive(Clone, Debug, serde::Serialize)]
pub struct VossTable {
    /// values[i] = g(i+1)
    pub values: Vec<u64>,
}

impl VossTable {
    pub fn get(&self, k: usize) -> u64 {
        self.values[k - 1]
    }
}

/// Base values g(1)=4, g(2)=6, g(3)=8; beyond that, the largest integer g
/// with g <= 2 + 2 log2(1 + sum of earlier values + g), resolved exactly as
/// 2^(g-2) <= (1 + sum + g)^2.
pub fn voss_table(k_max: usize) -> Result<VossTable> {
    if k_max == 0 {
        return Err(Error::Precondition("the table starts at k = 1".into()));
    }
    if k_max > 1000 {
        return Err(Error::Resource("table capped at k = 1000".into()));
    }
    let mut values: Vec<u64> = Vec::with_capacity(k_max);
    let mut sum: u64 = 0;
    for k in 1..=k_max {
        let next = if k <= 3 {
            [4, 6, 8][k - 1]
        } else {
            let mut best = 3u64;
            let mut g = 3u64;
            loop {
                let rhs = 1 + sum + g;
                if 1u128 << (g - 2) <= (rhs as u128).pow(2) {
                    best = g;
                    g += 1;
                } else {
                    break;
                }
            }
            best
        };
        values.push(next);
        sum += next;
    }
    Ok(VossTable { values })
}

#[derive(Clone, Debug)]
pub struct LowCycle {
    pub cycle: Vec<usize>,
    pub attachments: VertexSet,
    /// Chosen without exhaustive enumeration; minimality not certified.
    pub heuristic: bool,
}

/// An induced cycle with the fewest attachment vertices: minimal attachment
/// count first, then shortest, then lexicographically least vertex set.
/// Beyond the enumeration cap, falls back to a shortest cycle (which is
/// always induced) and flags the result.
pub fn best_induced_cycle(g: &Graph) -> Result<Option<LowCycle>> {
    if g.vertex_count() <= EXACT_CYCLE_CAP {
        let cycles = induced_cycles(g)?;
        let best = cycles
            .into_iter()
            .map(|c| (attachments(g, c).len(), c.len(), c.bits(), c))
            .min();
        return Ok(best.map(|(_, _, _, c)| LowCycle {
            cycle: cycle_walk(g, c),
            attachments: attachments(g, c),
            heuristic: false,
        }));
    }
    Ok(find_short_cycle(g).map(|walk| {
        let set: VertexSet = walk.iter().copied().collect();
        LowCycle { cycle: walk, attachments: attachments(g, set), heuristic: true }
    }))
}

/// An induced cycle with at most `limit` attachments, if one exists within
/// the enumeration cap; requires minimum degree >= 2.
pub fn find_low_attachment_cycle(g: &Graph, limit: usize) -> Result<Option<LowCycle>> {
    if g.min_degree().is_none_or(|d| d < 2) {
        return Err(Error::Precondition("attachment search needs minimum degree >= 2".into()));
    }
    Ok(best_induced_cycle(g)?.filter(|c| c.attachments.len() <= limit))
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct CycleAnalysis {
    pub girth: Option<usize>,
    pub effective_girth: Option<usize>,
    pub packing_lower: usize,
    pub packing_upper: usize,
    pub min_feedback: Vec<usize>,
    /// All of the above certified exact (small enough for the exact modes).
    pub exact: bool,
}

pub fn analyze(g: &Graph) -> Result<CycleAnalysis> {
    let gi = girth(g);
    let mut exact = true;
    let effective = if g.vertex_count() <= EXACT_CYCLE_CAP {
        effective_girth(g)?
    } else {
        exact = false;
        // degree->=3 count on one short cycle is an upper bound witness
        find_short_cycle(g).map(|c| c.iter().filter(|&&v| g.degree(v) >= 3).count())
    };
    let packing = cycle_packing(g)?;
    let feedback = feedback_set_any_size(g)?;
    exact = exact && packing.exact && g.vertex_count() <= EXACT_FEEDBACK_CAP;
    Ok(CycleAnalysis {
        girth: gi,
        effective_girth: effective,
        packing_lower: packing.lower,
        packing_upper: packing.upper.min(feedback.len().max(packing.lower)),
        min_feedback: feedback.to_vec(),
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family;

    #[test]
    fn girth_basics() {
        assert_eq!(girth(&family::cycle(7).unwrap()), Some(7));
        assert_eq!(girth(&family::random_forest(10, 3).unwrap()), None);
        assert_eq!(girth(&family::petersen()), Some(5));
        assert_eq!(girth(&family::complete(4).unwrap()), Some(3));
    }

    #[test]
    fn induced_cycle_enumeration() {
        assert_eq!(induced_cycles(&family::cycle(5).unwrap()).unwrap().len(), 1);
        // K4: four triangles, nothing longer is chordless
        assert_eq!(induced_cycles(&family::complete(4).unwrap()).unwrap().len(), 4);
        // C6 plus one long chord: two squares, the hexagon has a chord
        let mut g = family::cycle(6).unwrap();
        g.add_edge(0, 3).unwrap();
        let cycles = induced_cycles(&g).unwrap();
        assert_eq!(cycles.len(), 2);
        assert!(cycles.iter().all(|c| c.len() == 4));
    }

    #[test]
    fn effective_girth_examples() {
        assert_eq!(effective_girth(&family::cycle(8).unwrap()).unwrap(), Some(0));
        assert_eq!(effective_girth(&family::complete(4).unwrap()).unwrap(), Some(3));
        assert_eq!(effective_girth(&family::petersen()).unwrap(), Some(5));
        assert_eq!(effective_girth(&family::random_forest(8, 1).unwrap()).unwrap(), None);

        // K4 with every edge subdivided once: triangles become 6-cycles
        // carrying the 3 original branch vertices
        let g = Graph::from_edges(
            10,
            &[(0, 4), (4, 1), (0, 5), (5, 2), (0, 6), (6, 3), (1, 7), (7, 2), (1, 8), (8, 3), (2, 9), (9, 3)],
        )
        .unwrap();
        assert_eq!(effective_girth(&g).unwrap(), Some(3));
    }

    #[test]
    fn packing_examples() {
        let forest = family::random_forest(9, 5).unwrap();
        let p = cycle_packing(&forest).unwrap();
        assert_eq!((p.lower, p.upper), (0, 0));
        assert!(p.witness.is_empty());

        let p = cycle_packing(&family::complete(5).unwrap()).unwrap();
        assert_eq!((p.lower, p.upper), (1, 1));
        assert_eq!(p.witness.len(), 1);

        let p = cycle_packing(&family::k5_copies(2).unwrap()).unwrap();
        assert_eq!((p.lower, p.upper), (2, 2));

        // outer pentagon and inner pentagram are disjoint
        let p = cycle_packing(&family::petersen()).unwrap();
        assert_eq!((p.lower, p.upper), (2, 2));
        assert!(p.exact);
    }

    #[test]
    fn feedback_sets() {
        assert_eq!(min_feedback_set(&family::cycle(6).unwrap()).unwrap().to_vec(), vec![0]);
        assert_eq!(min_feedback_set(&family::complete(5).unwrap()).unwrap().len(), 3);
        assert!(min_feedback_set(&family::random_forest(7, 2).unwrap()).unwrap().is_empty());
        // deletion really leaves a forest, and packing never exceeds it
        for seed in 0..20 {
            let g = family::gnp(9, 0.35, seed).unwrap();
            let f = min_feedback_set(&g).unwrap();
            assert!(g.delete_vertices(f).is_forest(), "seed {seed}");
            let p = cycle_packing(&g).unwrap();
            assert!(p.upper <= f.len().max(p.lower), "seed {seed}");
            assert!(p.lower <= f.len().max(p.lower));
        }
    }

    #[test]
    fn voss_values() {
        let t = voss_table(10).unwrap();
        assert_eq!(t.values, vec![4, 6, 8, 11, 12, 13, 14, 14, 15, 15]);
        assert_eq!(t.get(1), 4);
        assert_eq!(t.get(4), 11);
        assert!(voss_table(0).is_err());
    }

    #[test]
    fn low_attachment_selection() {
        let c6 = family::cycle(6).unwrap();
        let c = find_low_attachment_cycle(&c6, 4).unwrap().unwrap();
        assert_eq!(c.cycle.len(), 6);
        assert!(c.attachments.is_empty());

        let k4 = family::complete(4).unwrap();
        let c = find_low_attachment_cycle(&k4, 4).unwrap().unwrap();
        assert_eq!(c.cycle, vec![0, 1, 2]);
        assert_eq!(c.attachments.len(), 3);

        // two triangles bridged through vertex 6: each triangle has a single
        // attachment; the lexicographically first wins
        let g = Graph::from_edges(7, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 6), (6, 3)])
            .unwrap();
        let c = best_induced_cycle(&g).unwrap().unwrap();
        assert_eq!(c.cycle, vec![0, 1, 2]);
        assert_eq!(c.attachments.to_vec(), vec![2]);

        assert!(find_low_attachment_cycle(&family::path(4).unwrap(), 4).is_err());
    }

    #[test]
    fn analysis_bundle() {
        let a = analyze(&family::petersen()).unwrap();
        assert_eq!(a.girth, Some(5));
        assert_eq!(a.effective_girth, Some(5));
        assert_eq!((a.packing_lower, a.packing_upper), (2, 2));
        assert!(a.exact);
        assert!(a.min_feedback.len() >= 2);
    }

    use crate::graph::Graph;
}
