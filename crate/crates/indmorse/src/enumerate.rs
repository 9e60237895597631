//! Exhaustive generation of small graphs up to isomorphism, by vertex
//! augmentation: every graph on n vertices arises from one on n-1 vertices
//! plus a new vertex with some neighbour set, so extending each canonical
//! representative by all 2^(n-1) attachments and deduplicating by canonical
//! key reaches every isomorphism class.

use crate::canon::canonical_form;
use crate::error::{Error, Result};
use crate::graph::Graph;
use std::collections::BTreeMap;

const ENUMERATION_CAP: usize = 10;

/// All isomorphism classes on exactly n vertices, as canonical
/// representatives sorted by key.
pub fn all_graphs(n: usize) -> Result<Vec<Graph>> {
    if n > ENUMERATION_CAP {
        return Err(Error::Resource(format!(
            "exhaustive generation capped at {ENUMERATION_CAP} vertices, asked for {n}"
        )));
    }
    let mut layer: BTreeMap<Vec<u64>, Graph> = BTreeMap::new();
    layer.insert(Vec::new(), Graph::empty(0)?);
    for size in 1..=n {
        let mut next: BTreeMap<Vec<u64>, Graph> = BTreeMap::new();
        for g in layer.values() {
            for attach in 0u64..1 << (size - 1) {
                let mut h = Graph::empty(size)?;
                for (u, v) in g.edges() {
                    h.add_edge(u, v)?;
                }
                for u in 0..size - 1 {
                    if attach >> u & 1 == 1 {
                        h.add_edge(u, size - 1)?;
                    }
                }
                let c = canonical_form(&h);
                next.entry(c.key).or_insert(c.graph);
            }
        }
        layer = next;
    }
    Ok(layer.into_values().collect())
}

pub fn connected_graphs(n: usize) -> Result<Vec<Graph>> {
    Ok(all_graphs(n)?.into_iter().filter(|g| g.is_connected()).collect())
}
