//! Exact reduced homology of independence complexes.
//!
//! Boundary ranks are computed per adjacent cardinality pair; the dimension
//! in degree k-1 is then f_k - rank(d_k) - rank(d_(k+1)). The default field
//! is GF(2) (bitset elimination); the rational mode runs fraction-free
//! Bareiss elimination, in i128 while it fits and in big integers after.

use crate::complex::{build_complex, Face, IndComplex};
use crate::error::Result;
use crate::graph::Graph;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Gf2,
    Rational,
}

impl std::fmt::Display for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Field::Gf2 => write!(f, "gf2"),
            Field::Rational => write!(f, "rational"),
        }
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct BettiReport {
    /// Degree -> dimension, zero entries omitted. Degree -1 appears exactly
    /// when the complex is the single empty face.
    pub betti: BTreeMap<i32, usize>,
    pub total: usize,
    pub field: Field,
    pub faces: usize,
    /// Reduced Euler characteristic agreed with the alternating face count.
    pub euler_consistent: bool,
}

pub fn betti_numbers(c: &IndComplex, field: Field) -> BettiReport {
    let layers = c.layers();
    let top = c.top_cardinality();
    // ranks[k] = rank of the boundary map from cardinality k to k-1
    let mut ranks = vec![0usize; top + 2];
    for k in 1..=top {
        ranks[k] = boundary_rank(&layers[k - 1], &layers[k], field);
    }

    let mut betti = BTreeMap::new();
    let mut total = 0usize;
    for k in 0..=top {
        let dim = layers[k].len() - ranks[k] - ranks[k + 1];
        if dim > 0 {
            betti.insert(k as i32 - 1, dim);
            total += dim;
        }
    }

    let alternating_faces: i64 = layers
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, l)| if k % 2 == 1 { l.len() as i64 } else { -(l.len() as i64) })
        .sum();
    let alternating_betti: i64 = betti
        .iter()
        .map(|(&d, &b)| if d.rem_euclid(2) == 0 { b as i64 } else { -(b as i64) })
        .sum();
    let euler_consistent = alternating_faces - 1 == alternating_betti;

    BettiReport { betti, total, field, faces: c.face_count(), euler_consistent }
}

/// Total Betti number over GF(2).
pub fn total_betti(g: &Graph) -> Result<usize> {
    total_betti_in(g, Field::Gf2)
}

pub fn total_betti_in(g: &Graph, field: Field) -> Result<usize> {
    let c = build_complex(g)?;
    Ok(betti_numbers(&c, field).total)
}

fn boundary_rank(small: &[Face], large: &[Face], field: Field) -> usize {
    let index: HashMap<Face, usize> = small.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    match field {
        Field::Gf2 => {
            let words = small.len().div_ceil(64);
            let cols = large.iter().map(|&f| {
                let mut col = vec![0u64; words];
                let mut rest = f;
                while rest != 0 {
                    let v = rest.trailing_zeros();
                    rest &= rest - 1;
                    let row = index[&(f & !(1 << v))];
                    col[row / 64] ^= 1 << (row % 64);
                }
                col
            });
            rank_gf2(cols)
        }
        Field::Rational => {
            // dense column-major signed boundary matrix
            let mut m = vec![vec![0i128; large.len()]; small.len()];
            for (j, &f) in large.iter().enumerate() {
                let mut rest = f;
                let mut sign = 1i128;
                while rest != 0 {
                    let v = rest.trailing_zeros();
                    rest &= rest - 1;
                    m[index[&(f & !(1 << v))]][j] = sign;
                    sign = -sign;
                }
            }
            rank_rational(m)
        }
    }
}

/// GF(2) rank by column reduction against accumulated pivots.
fn rank_gf2(cols: impl Iterator<Item = Vec<u64>>) -> usize {
    let mut pivots: Vec<(usize, Vec<u64>)> = Vec::new();
    for mut col in cols {
        loop {
            let Some(low) = col
                .iter()
                .enumerate()
                .find(|(_, &w)| w != 0)
                .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
            else {
                break;
            };
            match pivots.iter().find(|(p, _)| *p == low) {
                Some((_, pcol)) => {
                    for (c, p) in col.iter_mut().zip(pcol) {
                        *c ^= p;
                    }
                }
                None => {
                    pivots.push((low, col));
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// Fraction-free Bareiss elimination; division by the previous pivot is
/// exact. Falls back to big integers if any intermediate leaves i128.
fn rank_rational(m: Vec<Vec<i128>>) -> usize {
    match rank_bareiss_i128(m.clone()) {
        Some(r) => r,
        None => {
            let big: Vec<Vec<BigInt>> =
                m.into_iter().map(|row| row.into_iter().map(BigInt::from).collect()).collect();
            rank_bareiss_big(big)
        }
    }
}

fn rank_bareiss_i128(mut m: Vec<Vec<i128>>) -> Option<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut rank = 0usize;
    let mut prev = 1i128;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| m[r][col] != 0) else { continue };
        m.swap(rank, p);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let a = m[rank][col].checked_mul(m[i][j])?;
                let b = m[i][col].checked_mul(m[rank][j])?;
                m[i][j] = a.checked_sub(b)? / prev;
            }
            m[i][col] = 0;
        }
        prev = m[rank][col];
        rank += 1;
        if rank == rows {
            break;
        }
    }
    Some(rank)
}

fn rank_bareiss_big(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut rank = 0usize;
    let mut prev = BigInt::one();
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(rank, p);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                m[i][j] = (&m[rank][col] * &m[i][j] - &m[i][col] * &m[rank][j]) / &prev;
            }
            m[i][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}
