//! Explicit independence complexes: every independent set of the source
//! graph, including the empty set, grouped by cardinality.
//!
//! Faces are bitmasks over the graph's own vertex labels, so faces of a
//! subgraph's complex are literally faces of the parent's complex. Recursive
//! constructions rely on that.

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

pub const DEFAULT_FACE_CAP: usize = 1 << 24;

/// A face: bitmask of an independent vertex set.
pub type Face = u64;

#[derive(Clone, Debug)]
pub struct IndComplex {
    source: Graph,
    /// layers[k] lists the faces of cardinality k, sorted ascending.
    layers: Vec<Vec<Face>>,
}

impl IndComplex {
    pub fn source(&self) -> &Graph {
        &self.source
    }

    pub fn layers(&self) -> &[Vec<Face>] {
        &self.layers
    }

    /// Largest face cardinality present.
    pub fn top_cardinality(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn face_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn contains(&self, face: Face) -> bool {
        let k = face.count_ones() as usize;
        k < self.layers.len() && self.layers[k].binary_search(&face).is_ok()
    }

    pub fn faces(&self) -> impl Iterator<Item = Face> + '_ {
        self.layers.iter().flatten().copied()
    }
}

pub fn build_complex(g: &Graph) -> Result<IndComplex> {
    build_complex_capped(g, DEFAULT_FACE_CAP)
}

/// Enumerate all independent sets layer by layer. Each face is extended only
/// by vertices above its maximum, so every face is produced exactly once.
pub fn build_complex_capped(g: &Graph, cap: usize) -> Result<IndComplex> {
    let mut layers: Vec<Vec<Face>> = vec![vec![0]];
    let mut count = 1usize;
    loop {
        let last = layers.last().expect("at least the empty layer");
        let mut next: Vec<Face> = Vec::new();
        for &f in last {
            let floor = if f == 0 { 0 } else { 64 - f.leading_zeros() as usize };
            for v in g.vertices().iter() {
                if v < floor {
                    continue;
                }
                if g.adj(v).bits() & f == 0 {
                    count += 1;
                    if count > cap {
                        return Err(Error::FaceCapExceeded {
                            cap: cap as u64,
                            reached: count as u64,
                        });
                    }
                    next.push(f | 1 << v);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort_unstable();
        layers.push(next);
    }
    Ok(IndComplex { source: g.clone(), layers })
}

/// The members of a face, as a vertex set.
pub fn face_vertices(f: Face) -> VertexSet {
    VertexSet::from_bits(f)
}
