use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::{int, RatVector, Rational};
use super::AlgebraError;

/// Principal-minor enumeration visits `2^n - 1` subsets; refuse beyond this.
pub const DEFAULT_MINOR_LIMIT: usize = 15;

/// Dense square matrix of exact rationals, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    n: usize,
    entries: Vec<Rational>,
}

impl RatMatrix {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            entries: vec![Rational::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, AlgebraError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(AlgebraError::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(Self { n, entries })
    }

    /// Convenience constructor from integer rows. Panics if not square.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| int(x)).collect())
            .collect();
        Self::from_rows(rows).expect("square integer matrix")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Rational]> {
        (0..self.n).map(move |i| self.row(i))
    }

    /// First `(i, j)` with `m[i][j] != m[j][i]`, if any.
    pub fn asymmetry(&self) -> Option<(usize, usize)> {
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.get(i, j) != self.get(j, i) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetry().is_none()
    }

    pub fn neg(&self) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|x| -x).collect(),
        }
    }

    /// Principal submatrix on `idx`, in the given order.
    pub fn principal(&self, idx: &[usize]) -> Self {
        let mut entries = Vec::with_capacity(idx.len() * idx.len());
        for &i in idx {
            for &j in idx {
                entries.push(self.get(i, j).clone());
            }
        }
        Self {
            n: idx.len(),
            entries,
        }
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Result<RatVector, AlgebraError> {
        if x.len() != self.n {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        Ok(self.rows().map(|r| super::rational::dot(r, x)).collect())
    }

    /// `x^T M x`.
    pub fn quadratic_form(&self, x: &[Rational]) -> Result<Rational, AlgebraError> {
        let mx = self.mul_vec(x)?;
        Ok(super::rational::dot(x, &mx))
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = self
            .rows()
            .map(|r| r.iter().map(super::rational::format_rational).collect())
            .collect();
        write!(f, "RatMatrix{rows:?}")
    }
}

/// Exact determinant. Rows are scaled to integers, then eliminated with
/// Bareiss' fraction-free scheme (in `i128` while it fits, `BigInt` after).
pub fn determinant(m: &RatMatrix) -> Rational {
    let n = m.dim();
    if n == 0 {
        return Rational::one();
    }
    if n == 1 {
        return m.get(0, 0).clone();
    }
    let mut scale = BigInt::one();
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for r in m.rows() {
        let l = r.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        rows.push(r.iter().map(|q| q.numer() * (&l / q.denom())).collect());
        scale *= l;
    }
    let det = match small_rows(&rows).and_then(|mut a| bareiss_i128(&mut a)) {
        Some(d) => BigInt::from(d),
        None => bareiss_big(&mut rows),
    };
    Rational::new(det, scale)
}

fn small_rows(rows: &[Vec<BigInt>]) -> Option<Vec<Vec<i128>>> {
    rows.iter()
        .map(|r| r.iter().map(|x| x.to_i64().map(i128::from)).collect())
        .collect()
}

fn bareiss_i128(a: &mut [Vec<i128>]) -> Option<i128> {
    let n = a.len();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return Some(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = a[i][j]
                    .checked_mul(a[k][k])?
                    .checked_sub(a[i][k].checked_mul(a[k][j])?)?;
                a[i][j] = t / prev;
            }
        }
        prev = a[k][k];
    }
    a[n - 1][n - 1].checked_mul(sign)
}

fn bareiss_big(a: &mut [Vec<BigInt>]) -> BigInt {
    let n = a.len();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = t / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// `det(M_1), ..., det(M_n)` for the top-left `k x k` blocks.
pub fn leading_principal_minors(m: &RatMatrix) -> Vec<Rational> {
    (1..=m.dim())
        .map(|k| determinant(&m.principal(&(0..k).collect::<Vec<_>>())))
        .collect()
}

/// Result of the Sylvester test on `-M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SylvesterTest {
    pub minors: Vec<Rational>,
    /// 1-based order of the first leading minor with the wrong sign.
    pub first_failure: Option<usize>,
}

impl SylvesterTest {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Leading minors of a symmetric `M` and the first `k` where
/// `(-1)^k det(M_k) > 0` fails.
pub fn sylvester_negative_definite(m: &RatMatrix) -> Result<SylvesterTest, AlgebraError> {
    if let Some((row, col)) = m.asymmetry() {
        return Err(AlgebraError::NonSymmetric { row, col });
    }
    let minors = leading_principal_minors(m);
    let first_failure = minors.iter().enumerate().find_map(|(i, d)| {
        let ok = if i % 2 == 0 {
            d.is_negative()
        } else {
            d.is_positive()
        };
        (!ok).then_some(i + 1)
    });
    Ok(SylvesterTest {
        minors,
        first_failure,
    })
}

pub fn is_negative_definite(m: &RatMatrix) -> Result<bool, AlgebraError> {
    Ok(sylvester_negative_definite(m)?.passed())
}

/// Every principal minor (all `2^n - 1` index subsets) is `>= 0`.
pub fn all_principal_minors_nonneg(m: &RatMatrix) -> Result<bool, AlgebraError> {
    all_principal_minors_nonneg_with_limit(m, DEFAULT_MINOR_LIMIT)
}

pub fn all_principal_minors_nonneg_with_limit(
    m: &RatMatrix,
    limit: usize,
) -> Result<bool, AlgebraError> {
    principal_minors_satisfy(m, limit, |d| !d.is_negative())
}

/// Every principal minor is `> 0`.
pub fn all_principal_minors_positive(m: &RatMatrix) -> Result<bool, AlgebraError> {
    principal_minors_satisfy(m, DEFAULT_MINOR_LIMIT, |d| d.is_positive())
}

// Subsets are visited by increasing size so that the cheap 1x1 minors
// reject most inputs first.
fn principal_minors_satisfy(
    m: &RatMatrix,
    limit: usize,
    pred: impl Fn(&Rational) -> bool,
) -> Result<bool, AlgebraError> {
    let n = m.dim();
    if n > limit {
        return Err(AlgebraError::DimensionTooLarge { dim: n, limit });
    }
    let mut masks: Vec<u32> = (1..(1u32 << n)).collect();
    masks.sort_by_key(|s| (s.count_ones(), *s));
    for mask in masks {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let d = if idx.len() == 1 {
            m.get(idx[0], idx[0]).clone()
        } else {
            determinant(&m.principal(&idx))
        };
        if !pred(&d) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Unique solution of `M x = b` by exact Gaussian elimination.
pub fn solve_linear(m: &RatMatrix, b: &[Rational]) -> Result<RatVector, AlgebraError> {
    let n = m.dim();
    if b.len() != n {
        return Err(AlgebraError::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let mut a: Vec<Vec<Rational>> = m
        .rows()
        .zip(b)
        .map(|(r, bi)| {
            let mut row = r.to_vec();
            row.push(bi.clone());
            row
        })
        .collect();
    for k in 0..n {
        let p = (k..n)
            .find(|&i| !a[i][k].is_zero())
            .ok_or(AlgebraError::Singular)?;
        a.swap(k, p);
        let pivot = a[k][k].clone();
        for v in &mut a[k][k..] {
            *v /= &pivot;
        }
        let pivot_row = a[k].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == k || row[k].is_zero() {
                continue;
            }
            let f = row[k].clone();
            for (v, p) in row[k..].iter_mut().zip(&pivot_row[k..]) {
                *v -= &f * p;
            }
        }
    }
    Ok(a.into_iter()
        .map(|mut r| r.pop().expect("augmented column"))
        .collect())
}
