//! Named graph constructors and a tiny "name:args" spec language used by the
//! CLI and the test corpus.
//!
//! Recognised specs:
//!   path:N            cycle:N          complete:N      star:N (N leaves)
//!   biclique:A,B      petersen         k5-copies:K
//!   random-gnp:N,P,SEED   forest-random:N,SEED

use crate::error::{Error, Result};
use crate::graph::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn path(n: usize) -> Result<Graph> {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_edges(n, &edges)
}

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::Precondition(format!("cycle needs at least 3 vertices, got {n}")));
    }
    let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    edges.push((n - 1, 0));
    Graph::from_edges(n, &edges)
}

pub fn complete(n: usize) -> Result<Graph> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    Graph::from_edges(n, &edges)
}

/// Star with centre 0 and `leaves` leaves.
pub fn star(leaves: usize) -> Result<Graph> {
    let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
    Graph::from_edges(leaves + 1, &edges)
}

pub fn complete_bipartite(a: usize, b: usize) -> Result<Graph> {
    let mut edges = Vec::new();
    for u in 0..a {
        for v in 0..b {
            edges.push((u, a + v));
        }
    }
    Graph::from_edges(a + b, &edges)
}

pub fn petersen() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5)); // outer pentagon
        edges.push((i, i + 5)); // spokes
        edges.push((i + 5, (i + 2) % 5 + 5)); // inner pentagram
    }
    Graph::from_edges(10, &edges).expect("petersen is fixed and valid")
}

/// Disjoint union of k copies of the complete graph on five vertices.
pub fn k5_copies(k: usize) -> Result<Graph> {
    let mut edges = Vec::new();
    for c in 0..k {
        let base = 5 * c;
        for u in 0..5 {
            for v in u + 1..5 {
                edges.push((base + u, base + v));
            }
        }
    }
    Graph::from_edges(5 * k, &edges)
}

/// Erdos-Renyi G(n, p) with a deterministic seed.
pub fn gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// Uniform random forest: each vertex past the first either starts a new tree
/// or attaches to a uniformly chosen earlier vertex.
pub fn random_forest(n: usize, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for v in 1..n {
        if rng.gen::<f64>() < 0.8 {
            edges.push((rng.gen_range(0..v), v));
        }
    }
    Graph::from_edges(n, &edges)
}

/// Parse a "name:args" family spec.
pub fn from_spec(spec: &str) -> Result<Graph> {
    let (name, args) = match spec.split_once(':') {
        Some((n, a)) => (n, a),
        None => (spec, ""),
    };
    let nums: Vec<&str> = if args.is_empty() { vec![] } else { args.split(',').collect() };
    let want = |k: usize| -> Result<()> {
        if nums.len() == k {
            Ok(())
        } else {
            Err(Error::Parse {
                line: 0,
                msg: format!("family {name} expects {k} argument(s), got {}", nums.len()),
            })
        }
    };
    let int = |s: &str| -> Result<usize> {
        s.trim().parse().map_err(|_| Error::Parse { line: 0, msg: format!("bad integer {s:?}") })
    };
    let float = |s: &str| -> Result<f64> {
        s.trim().parse().map_err(|_| Error::Parse { line: 0, msg: format!("bad number {s:?}") })
    };
    let long = |s: &str| -> Result<u64> {
        s.trim().parse().map_err(|_| Error::Parse { line: 0, msg: format!("bad seed {s:?}") })
    };
    match name {
        "path" => {
            want(1)?;
            path(int(nums[0])?)
        }
        "cycle" => {
            want(1)?;
            cycle(int(nums[0])?)
        }
        "complete" => {
            want(1)?;
            complete(int(nums[0])?)
        }
        "star" => {
            want(1)?;
            star(int(nums[0])?)
        }
        "biclique" => {
            want(2)?;
            complete_bipartite(int(nums[0])?, int(nums[1])?)
        }
        "petersen" => {
            want(0)?;
            Ok(petersen())
        }
        "k5-copies" => {
            want(1)?;
            k5_copies(int(nums[0])?)
        }
        "random-gnp" => {
            want(3)?;
            gnp(int(nums[0])?, float(nums[1])?, long(nums[2])?)
        }
        "forest-random" => {
            want(2)?;
            random_forest(int(nums[0])?, long(nums[1])?)
        }
        _ => Err(Error::Parse { line: 0, msg: format!("unknown family {name:?}") }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_counts() {
        assert_eq!(path(5).unwrap().edge_count(), 4);
        assert_eq!(cycle(5).unwrap().edge_count(), 5);
        assert_eq!(complete(5).unwrap().edge_count(), 10);
        assert_eq!(star(4).unwrap().edge_count(), 4);
        assert_eq!(complete_bipartite(3, 4).unwrap().edge_count(), 12);
        let p = petersen();
        assert_eq!((p.vertex_count(), p.edge_count()), (10, 15));
        assert!(p.vertices().iter().all(|v| p.degree(v) == 3));
    }

    #[test]
    fn gnp_is_deterministic() {
        let a = gnp(10, 0.4, 7).unwrap();
        let b = gnp(10, 0.4, 7).unwrap();
        assert_eq!(a, b);
        let c = gnp(10, 0.4, 8).unwrap();
        assert!(a != c || a.edge_count() == c.edge_count());
    }

    #[test]
    fn forests_are_forests() {
        for seed in 0..50 {
            assert!(random_forest(12, seed).unwrap().is_forest());
        }
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(from_spec("cycle:6").unwrap(), cycle(6).unwrap());
        assert_eq!(from_spec("biclique:3,4").unwrap(), complete_bipartite(3, 4).unwrap());
        assert_eq!(from_spec("petersen").unwrap(), petersen());
        assert_eq!(from_spec("k5-copies:2").unwrap(), k5_copies(2).unwrap());
        assert_eq!(from_spec("random-gnp:8,0.5,3").unwrap(), gnp(8, 0.5, 3).unwrap());
        assert!(from_spec("cycle").is_err());
        assert!(from_spec("frobnicate:3").is_err());
        assert!(from_spec("cycle:2").is_err());
    }
}
