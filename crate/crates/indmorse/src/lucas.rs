//! Fibonacci and Lucas numbers over all integers, the cyclic constraint
//! counting problem, its transfer-matrix trace formula, and the Lucas
//! triangle.
//!
//! The counting problem: given s in {0,1,2}^n read cyclically, count the
//! assignments x in {0,1}^n with x_i + x_{i+1} != s_i for every i (indices
//! mod n). Entries equal to 1 force x_i = x_{i+1} and project away; what
//! remains is a trace of a product of two 2x2 matrices, and every such trace
//! is at most the Lucas number l(n).

use crate::error::{Error, Result};
use num_bigint::BigInt;

/// phi(n) fits in i64 exactly for |n| <= 92.
pub const FIB_WORD_LIMIT: i64 = 92;
/// l(n) fits in i64 exactly for |n| <= 90.
pub const LUCAS_WORD_LIMIT: i64 = 90;
/// Brute-force enumeration cap for count_valid_assignments.
pub const BRUTE_FORCE_CAP: usize = 24;

/// phi(n) for any integer n, with phi(-n) = (-1)^(n+1) phi(n).
pub fn fibonacci(n: i64) -> Result<i64> {
    if n.abs() > FIB_WORD_LIMIT {
        return Err(Error::Overflow("fibonacci exceeds i64 beyond |n| = 92; use fibonacci_big"));
    }
    let (mut a, mut b) = (0i64, 1i64);
    for _ in 1..n.unsigned_abs() {
        (a, b) = (b, a + b);
    }
    let mut val = if n == 0 { a } else { b };
    if n < 0 && n % 2 == 0 {
        val = -val;
    }
    Ok(val)
}

/// l(n) = phi(n-1) + phi(n+1) for any integer n.
pub fn lucas(n: i64) -> Result<i64> {
    if n.abs() > LUCAS_WORD_LIMIT {
        return Err(Error::Overflow("lucas exceeds i64 beyond |n| = 90; use lucas_big"));
    }
    Ok(fibonacci(n - 1)? + fibonacci(n + 1)?)
}

pub fn fibonacci_big(n: i64) -> BigInt {
    let (mut a, mut b) = (BigInt::from(0), BigInt::from(1));
    for _ in 0..n.unsigned_abs() {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    if n < 0 && n % 2 == 0 {
        a = -a;
    }
    a
}

pub fn lucas_big(n: i64) -> BigInt {
    fibonacci_big(n - 1) + fibonacci_big(n + 1)
}

/// 2x2 integer matrix with overflow-checked arithmetic.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Mat2(pub [[i64; 2]; 2]);

/// Transfer matrix for a constraint entry 0 (both variables zero forbidden),
/// written in the basis (x=1, x=0).
pub const F_MAT: Mat2 = Mat2([[1, 1], [1, 0]]);
/// Transfer matrix for a constraint entry 2 (both variables one forbidden).
pub const G_MAT: Mat2 = Mat2([[0, 1], [1, 1]]);
pub const I_MAT: Mat2 = Mat2([[1, 0], [0, 1]]);

impl Mat2 {
    pub fn mul(self, o: Mat2) -> Result<Mat2> {
        let mut out = [[0i64; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let p0 = self.0[i][0]
                    .checked_mul(o.0[0][j])
                    .ok_or(Error::Overflow("matrix product entry"))?;
                let p1 = self.0[i][1]
                    .checked_mul(o.0[1][j])
                    .ok_or(Error::Overflow("matrix product entry"))?;
                *cell = p0.checked_add(p1).ok_or(Error::Overflow("matrix product entry"))?;
            }
        }
        Ok(Mat2(out))
    }

    pub fn pow(self, e: u32) -> Result<Mat2> {
        let mut acc = I_MAT;
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn trace(self) -> Result<i64> {
        self.0[0][0].checked_add(self.0[1][1]).ok_or(Error::Overflow("matrix trace"))
    }

    pub fn sub(self, o: Mat2) -> Result<Mat2> {
        let mut out = [[0i64; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.0[i][j]
                    .checked_sub(o.0[i][j])
                    .ok_or(Error::Overflow("matrix difference"))?;
            }
        }
        Ok(Mat2(out))
    }

    pub fn scale(self, c: i64) -> Result<Mat2> {
        let mut out = [[0i64; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.0[i][j].checked_mul(c).ok_or(Error::Overflow("matrix scale"))?;
            }
        }
        Ok(Mat2(out))
    }

    pub fn is_entrywise_nonnegative(self) -> bool {
        self.0.iter().flatten().all(|&e| e >= 0)
    }
}

fn transfer_matrix(s: u8) -> Result<Mat2> {
    match s {
        0 => Ok(F_MAT),
        2 => Ok(G_MAT),
        1 => Err(Error::Precondition("trace formula needs entries in {0,2}; project ones first".into())),
        other => Err(Error::Precondition(format!("constraint entries must lie in {{0,1,2}}, got {other}"))),
    }
}

/// Trace of the transfer product over a {0,2} remnant of any length.
/// Length 0 is the fully collapsed case: both constant assignments survive.
fn trace_of_remnant(s: &[u8]) -> Result<i64> {
    let mut acc = I_MAT;
    for &e in s {
        acc = acc.mul(transfer_matrix(e)?)?;
    }
    acc.trace()
}

/// Tr(A_1 A_2 ... A_n) for a sequence over {0,2}; equals the assignment count.
pub fn trace_count(s: &[u8]) -> Result<i64> {
    if s.is_empty() {
        return Err(Error::Precondition("trace_count needs a nonempty sequence".into()));
    }
    trace_of_remnant(s)
}

fn validate_sequence(s: &[u8]) -> Result<()> {
    if s.len() < 2 {
        return Err(Error::Precondition(format!(
            "constraint sequences need length >= 2, got {}",
            s.len()
        )));
    }
    if let Some(&bad) = s.iter().find(|&&e| e > 2) {
        return Err(Error::Precondition(format!("constraint entries must lie in {{0,1,2}}, got {bad}")));
    }
    Ok(())
}

/// Exhaustive count of x in {0,1}^n with x_i + x_{i+1} != s_i cyclically.
pub fn count_valid_assignments(s: &[u8]) -> Result<i64> {
    validate_sequence(s)?;
    let n = s.len();
    if n > BRUTE_FORCE_CAP {
        return Err(Error::Resource(format!(
            "brute-force enumeration capped at {BRUTE_FORCE_CAP} variables, asked for {n}"
        )));
    }
    let mut count = 0i64;
    'outer: for x in 0u32..1 << n {
        for i in 0..n {
            let xi = x >> i & 1;
            let xj = x >> ((i + 1) % n) & 1;
            if (xi + xj) as u8 == s[i] {
                continue 'outer;
            }
        }
        count += 1;
    }
    Ok(count)
}

/// Result of eliminating the entries equal to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    /// The surviving constraints over {0,2}, in cyclic order.
    pub reduced: Vec<u8>,
    /// True when the remnant fell below length 2 (heavily constrained input).
    pub degenerate: bool,
}

/// Eliminate every s_i = 1 by identifying x_i with x_{i+1}. Each elimination
/// preserves the assignment count; the survivors again form a cyclic sequence
/// on the merged variables.
pub fn project_ones(s: &[u8]) -> Result<Projection> {
    validate_sequence(s)?;
    let reduced: Vec<u8> = s.iter().copied().filter(|&e| e != 1).collect();
    let degenerate = reduced.len() < 2;
    Ok(Projection { reduced, degenerate })
}

/// Assignment count via projection and the trace formula; no enumeration, so
/// any length works. A fully collapsed remnant leaves the two constant
/// assignments; a single surviving constraint pins the merged variable.
pub fn projected_count(s: &[u8]) -> Result<i64> {
    let p = project_ones(s)?;
    trace_of_remnant(&p.reduced)
}

/// A constraint sequence with its exact count and trace-formula value.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ConstraintSequence {
    pub s: Vec<u8>,
    pub count: i64,
    pub trace_value: i64,
    pub lucas_bound: i64,
}

pub fn analyze_sequence(s: &[u8]) -> Result<ConstraintSequence> {
    validate_sequence(s)?;
    let trace_value = projected_count(s)?;
    let count = if s.len() <= BRUTE_FORCE_CAP { count_valid_assignments(s)? } else { trace_value };
    Ok(ConstraintSequence {
        s: s.to_vec(),
        count,
        trace_value,
        lucas_bound: lucas(s.len() as i64)?,
    })
}

/// Row n of the Lucas triangle: T(n, m) = Tr(F^m G^(n-m)) for m = 0..n.
/// The row maximum sits at both ends, where it equals l(n).
pub fn lucas_triangle_row(n: usize) -> Result<Vec<i64>> {
    if n < 2 {
        return Err(Error::Precondition(format!("triangle rows start at n = 2, got {n}")));
    }
    if n > 60 {
        return Err(Error::Overflow("triangle rows beyond n = 60 exceed word arithmetic"));
    }
    (0..=n)
        .map(|m| F_MAT.pow(m as u32)?.mul(G_MAT.pow((n - m) as u32)?)?.trace())
        .collect()
}

#[derive(Clone, Copy, Debug)]
pub struct BundlingCheck {
    pub identity_holds: bool,
    pub entrywise_nonnegative: bool,
    pub difference: Mat2,
}

impl BundlingCheck {
    pub fn ok(&self) -> bool {
        self.identity_holds && self.entrywise_nonnegative
    }
}

/// Verify that grouping like transfer matrices never lowers a product:
///
///   F^(i+k) G^(j+l) - F^i G^j F^k G^l
///     = 2 phi(j) phi(k) F^(i-1) [[phi(l-2), phi(l-1)], [phi(l), phi(l+1)]]
///
/// and that the difference is entrywise nonnegative (phi(n) >= 0 for
/// n >= -1 makes every factor nonnegative when i,j,k,l >= 1).
pub fn bundling_inequality_check(i: u32, j: u32, k: u32, l: u32) -> Result<BundlingCheck> {
    if i < 1 || j < 1 || k < 1 || l < 1 {
        return Err(Error::Precondition("bundling check needs all four exponents >= 1".into()));
    }
    let grouped = F_MAT.pow(i + k)?.mul(G_MAT.pow(j + l)?)?;
    let interleaved = F_MAT.pow(i)?.mul(G_MAT.pow(j)?)?.mul(F_MAT.pow(k)?)?.mul(G_MAT.pow(l)?)?;
    let difference = grouped.sub(interleaved)?;

    let li = l as i64;
    let tail = Mat2([
        [fibonacci(li - 2)?, fibonacci(li - 1)?],
        [fibonacci(li)?, fibonacci(li + 1)?],
    ]);
    let fj = fibonacci(j as i64)?;
    let fk = fibonacci(k as i64)?;
    let coeff = 2i64
        .checked_mul(fj)
        .and_then(|c| c.checked_mul(fk))
        .ok_or(Error::Overflow("bundling coefficient"))?;
    let closed_form = F_MAT.pow(i - 1)?.mul(tail)?.scale(coeff)?;

    Ok(BundlingCheck {
        identity_holds: difference == closed_form,
        entrywise_nonnegative: difference.is_entrywise_nonnegative(),
        difference,
    })
}
