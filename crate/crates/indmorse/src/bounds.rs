//! Closed-form bound evaluators: the product bound over the attachment
//! table, a planar lower bound, and the large-girth comparison threshold.

use crate::cycles::voss_table;
use crate::error::{Error, Result};
use crate::lucas::lucas_big;
use num_bigint::BigInt;
use num_traits::One;

/// The golden ratio, base of the asymptotic comparator.
pub const PHI: f64 = 1.618033988749895;

/// Caveat attached to every product-bound report: the asymptotic form hides
/// an o(1) term with no computable value, so the comparator column is
/// indicative only.
pub const COMPARATOR_NOTE: &str =
    "comparator drops an o(1) term in the exponent; indicative only";

#[derive(Clone, Debug)]
pub struct CorollaryBound {
    pub k: usize,
    /// Exact product of Lucas numbers at the table values g(1)..g(k).
    pub exact: BigInt,
    /// phi^(2k log2 k), the asymptotic shape without its o(1) correction.
    pub comparator: f64,
}

/// Exact product prod_{i=1..k} l(g(i)); defined for every k >= 0
/// (empty product 1 for an acyclic graph).
pub fn product_bound(k: usize) -> Result<BigInt> {
    if k == 0 {
        return Ok(BigInt::one());
    }
    let table = voss_table(k)?;
    let mut acc = BigInt::one();
    for &g in &table.values {
        acc *= lucas_big(g as i64);
    }
    Ok(acc)
}

/// Exact bound on graphs with at most k disjoint cycles, with the
/// asymptotic comparator alongside.
pub fn corollary_bound(k: usize) -> Result<CorollaryBound> {
    if k < 2 {
        return Err(Error::Precondition("the corollary starts at k = 2".into()));
    }
    if k > 64 {
        return Err(Error::Resource("corollary evaluation capped at k = 64".into()));
    }
    let kf = k as f64;
    Ok(CorollaryBound {
        k,
        exact: product_bound(k)?,
        comparator: PHI.powf(2.0 * kf * kf.log2()),
    })
}

#[derive(Clone, Debug)]
pub struct PlanarBound {
    pub m: u64,
    /// (m - 40 sqrt(m)) / 36
    pub exponent: f64,
    pub value: f64,
    /// True when the bound is at most 1 and says nothing (m <= 1600).
    pub vacuous: bool,
}

/// Lower bound 2^((m - 40 sqrt(m)) / 36) for planar graphs with m edges.
pub fn planar_lower_bound(m: u64) -> Result<PlanarBound> {
    if m == 0 {
        return Err(Error::Precondition("edge count must be at least 1".into()));
    }
    let mf = m as f64;
    let exponent = (mf - 40.0 * mf.sqrt()) / 36.0;
    let value = exponent.exp2();
    Ok(PlanarBound { m, exponent, value, vacuous: exponent <= 0.0 })
}

/// (log2 n / (3 log2 chi)) * n^(0.003 / log2 chi): the size threshold in the
/// comparison against chromatic-number lower bounds.
pub fn ramanujan_threshold(n: u64, chi: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Precondition("n must be at least 2".into()));
    }
    if chi < 2 {
        return Err(Error::Precondition("chi must be at least 2".into()));
    }
    let nf = n as f64;
    let log_chi = (chi as f64).log2();
    Ok(nf.log2() / (3.0 * log_chi) * nf.powf(0.003 / log_chi))
}

#[derive(Clone, Debug)]
pub struct ComparisonRow {
    pub k: usize,
    pub exact: BigInt,
    /// 4^k, what k disjoint copies of K5 already force.
    pub reference: BigInt,
}

/// Exact product bound against the 4^k lower reference, k = 0..=k_max.
pub fn comparison_table(k_max: usize) -> Result<Vec<ComparisonRow>> {
    if k_max > 20 {
        return Err(Error::Resource("comparison table capped at k = 20".into()));
    }
    (0..=k_max)
        .map(|k| {
            Ok(ComparisonRow {
                k,
                exact: product_bound(k)?,
                reference: BigInt::from(4u32).pow(k as u32),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corollary_values() {
        assert_eq!(corollary_bound(2).unwrap().exact, BigInt::from(126));
        assert_eq!(corollary_bound(3).unwrap().exact, BigInt::from(5922));
        assert_eq!(corollary_bound(4).unwrap().exact, BigInt::from(1_178_478u64));
        assert!(corollary_bound(1).is_err());
        assert!(corollary_bound(65).is_err());
        let c = corollary_bound(16).unwrap();
        assert!(c.comparator.is_finite() && c.comparator > 1.0);
    }

    #[test]
    fn planar_values() {
        let p = planar_lower_bound(1600).unwrap();
        assert_eq!(p.exponent, 0.0);
        assert_eq!(p.value, 1.0);
        assert!(p.vacuous);

        let p = planar_lower_bound(2500).unwrap();
        assert!((p.exponent - 500.0 / 36.0).abs() < 1e-12);
        assert!(!p.vacuous);

        assert!(planar_lower_bound(100).unwrap().vacuous);
        assert!(planar_lower_bound(0).is_err());

        // monotone once sqrt(m) > 20
        let mut last = planar_lower_bound(401).unwrap().value;
        for m in [500, 900, 1600, 2500, 10_000] {
            let next = planar_lower_bound(m).unwrap().value;
            assert!(next > last, "m = {m}");
            last = next;
        }
    }

    #[test]
    fn threshold_values() {
        let t = ramanujan_threshold(1 << 30, 4).unwrap();
        assert!((t - 5.0 * 2f64.powf(0.045)).abs() < 1e-12);
        assert!((t - 5.158).abs() < 1e-3);

        let t = ramanujan_threshold(2, 2).unwrap();
        assert!((t - 2f64.powf(0.003) / 3.0).abs() < 1e-12);
        assert!((t - 0.334).abs() < 1e-3);

        assert!(ramanujan_threshold(1, 2).is_err());
        assert!(ramanujan_threshold(4, 1).is_err());
    }

    #[test]
    fn comparison_rows() {
        let rows = comparison_table(3).unwrap();
        let flat: Vec<(usize, i64, i64)> = rows
            .iter()
            .map(|r| {
                (r.k, i64::try_from(&r.exact).unwrap(), i64::try_from(&r.reference).unwrap())
            })
            .collect();
        assert_eq!(flat, vec![(0, 1, 1), (1, 7, 4), (2, 126, 16), (3, 5922, 64)]);
        assert!(comparison_table(21).is_err());
    }

    #[test]
    fn product_dominates_reference() {
        for row in comparison_table(20).unwrap() {
            assert!(row.exact >= row.reference, "k = {}", row.k);
        }
    }
}
