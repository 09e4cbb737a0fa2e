//! Exact rational linear algebra.
//!
//! Everything degreewise in this crate bottoms out here: dense matrices for
//! small differentials and maps, and an incremental sparse echelon basis
//! ([`RowSpace`]) for the larger spans that show up in tensor-algebra
//! computations.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

/// Arbitrary-precision rational number, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// Sparse vector: column index to nonzero coefficient.
pub type SparseVec = BTreeMap<usize, Rational>;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Formats a rational as `n` or `n/d`.
pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("inconsistent linear system: no solution")]
    NoSolution,
}

/// Dense row-major matrix over the rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(fmt_rational).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, LinAlgError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut entries = Vec::with_capacity(nrows * ncols);
        for row in rows {
            if row.len() != ncols {
                return Err(LinAlgError::DimensionMismatch {
                    expected: ncols,
                    found: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(RationalMatrix {
            rows: nrows,
            cols: ncols,
            entries,
        })
    }

    /// Convenience constructor from small integers. Panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| rat(x)).collect())
            .collect();
        Self::from_rows(rows).expect("ragged integer matrix")
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(nrows: usize, columns: &[Vec<Rational>]) -> Self {
        let mut m = Self::zeros(nrows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), nrows, "column length mismatch");
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Rational) {
        self.entries[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix, LinAlgError> {
        if self.cols != other.rows {
            return Err(LinAlgError::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.entries[idx] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, LinAlgError> {
        if v.len() != self.cols {
            return Err(LinAlgError::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    /// Stacks `self` to the left of `other`.
    pub fn hconcat(&self, other: &RationalMatrix) -> Result<RationalMatrix, LinAlgError> {
        if self.rows != other.rows {
            return Err(LinAlgError::DimensionMismatch {
                expected: self.rows,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c).clone());
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c).clone());
            }
        }
        Ok(out)
    }

    /// Reduced row-echelon form together with the strictly increasing list of
    /// pivot columns.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..m.cols {
            if pivot_row == m.rows {
                break;
            }
            let Some(found) = (pivot_row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(found, pivot_row);
            let inv = m.get(pivot_row, col).recip();
            for c in col..m.cols {
                let idx = pivot_row * m.cols + c;
                if !m.entries[idx].is_zero() {
                    m.entries[idx] *= &inv;
                }
            }
            for r in 0..m.rows {
                if r == pivot_row {
                    continue;
                }
                let factor = m.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for c in col..m.cols {
                    let p = m.get(pivot_row, c).clone();
                    if !p.is_zero() {
                        let idx = r * m.cols + c;
                        m.entries[idx] -= &factor * p;
                    }
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space, one vector per free column, ordered by free
    /// column index.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(row, f).clone();
                }
                v
            })
            .collect()
    }

    /// One solution of `self * x = b`.
    pub fn solve(&self, b: &[Rational]) -> Result<Vec<Rational>, LinAlgError> {
        if b.len() != self.rows {
            return Err(LinAlgError::DimensionMismatch {
                expected: self.rows,
                found: b.len(),
            });
        }
        let aug = self.hconcat(&Self::from_columns(self.rows, &[b.to_vec()]))?;
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Err(LinAlgError::NoSolution);
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r.get(row, self.cols).clone();
        }
        Ok(x)
    }
}

/// Converts a dense vector to sparse form.
pub fn to_sparse(v: &[Rational]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn to_dense(v: &SparseVec, len: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); len];
    for (&i, x) in v {
        out[i] = x.clone();
    }
    out
}

/// `acc += factor * v`, dropping cancelled entries.
pub fn axpy(acc: &mut SparseVec, factor: &Rational, v: &SparseVec) {
    if factor.is_zero() {
        return;
    }
    for (&i, x) in v {
        let entry = acc.entry(i).or_insert_with(Rational::zero);
        *entry += factor * x;
        if entry.is_zero() {
            acc.remove(&i);
        }
    }
}

#[derive(Clone, Debug)]
struct EchelonRow {
    vector: SparseVec,
    combination: SparseVec,
}

/// Incrementally maintained echelon basis of a span of sparse vectors.
///
/// Each stored row has leading coefficient 1 at its pivot column and only
/// entries at columns `>= pivot`. Reduction scans pivots in increasing column
/// order, so the remainder of a vector is canonical: it vanishes on every
/// pivot column, and two vectors agree modulo the span iff their remainders
/// are equal.
///
/// Rows also remember which inserted vectors they were built from, so a
/// vector in the span can be written as a combination of the inputs.
#[derive(Clone, Debug, Default)]
pub struct RowSpace {
    rows: BTreeMap<usize, EchelonRow>,
    inserted: usize,
}

impl RowSpace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Number of vectors offered to [`RowSpace::insert`] so far.
    pub fn inserted(&self) -> usize {
        self.inserted
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Echelon rows, in pivot order. They span the same space as the inserted
    /// vectors.
    pub fn basis(&self) -> impl Iterator<Item = &SparseVec> + '_ {
        self.rows.values().map(|r| &r.vector)
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.rows.contains_key(&col)
    }

    fn reduce_tracked(&self, mut v: SparseVec, mut comb: SparseVec) -> (SparseVec, SparseVec) {
        let mut cursor = 0usize;
        loop {
            let next = v
                .range(cursor..)
                .map(|(&c, _)| c)
                .find(|c| self.rows.contains_key(c));
            let Some(col) = next else { break };
            let factor = -v[&col].clone();
            let row = &self.rows[&col];
            axpy(&mut v, &factor, &row.vector);
            axpy(&mut comb, &factor, &row.combination);
            cursor = col + 1;
        }
        (v, comb)
    }

    /// Canonical remainder of `v` modulo the span.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut v = v.clone();
        let mut cursor = 0usize;
        loop {
            let next = v
                .range(cursor..)
                .map(|(&c, _)| c)
                .find(|c| self.rows.contains_key(c));
            let Some(col) = next else { break };
            let factor = -v[&col].clone();
            axpy(&mut v, &factor, &self.rows[&col].vector);
            cursor = col + 1;
        }
        v
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v` to the span. Returns `true` if it was independent of the
    /// current rows. Every call counts as an input for
    /// [`RowSpace::express`], whether or not the vector was independent.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let id = self.inserted;
        self.inserted += 1;
        let mut comb = SparseVec::new();
        comb.insert(id, Rational::one());
        let (mut rem, mut comb) = self.reduce_tracked(v, comb);
        let Some((&pivot, lead)) = rem.iter().next() else {
            return false;
        };
        let inv = lead.recip();
        for x in rem.values_mut() {
            *x *= &inv;
        }
        for x in comb.values_mut() {
            *x *= &inv;
        }
        self.rows.insert(
            pivot,
            EchelonRow {
                vector: rem,
                combination: comb,
            },
        );
        true
    }

    /// Writes `v` as a combination of previously inserted vectors (keyed by
    /// insertion order). Returns `None` if `v` is not in the span.
    pub fn express(&self, v: &SparseVec) -> Option<SparseVec> {
        let (rem, comb) = self.reduce_tracked(v.clone(), SparseVec::new());
        if rem.is_empty() {
            // reduce_tracked subtracted the combination; negate it back.
            Some(comb.into_iter().map(|(k, x)| (k, -x)).collect())
        } else {
            None
        }
    }
}

/// Quotient of a coordinate space by a subspace, with the non-pivot
/// columns of the subspace's echelon basis as the quotient basis.
#[derive(Clone, Debug)]
pub struct Quotient {
    relations: RowSpace,
    basis_columns: Vec<usize>,
    position: BTreeMap<usize, usize>,
}

impl Quotient {
    /// Quotient of the `ambient_dim`-dimensional coordinate space by `relations`.
    pub fn new(ambient_dim: usize, relations: RowSpace) -> Self {
        let basis_columns: Vec<usize> = (0..ambient_dim).filter(|c| !relations.is_pivot(*c)).collect();
        let position = basis_columns.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        Quotient {
            relations,
            basis_columns,
            position,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis_columns.len()
    }

    /// Ambient column represented by the `i`-th quotient basis vector.
    pub fn basis_column(&self, i: usize) -> usize {
        self.basis_columns[i]
    }

    /// Coordinates of the class of `v` in the quotient basis.
    pub fn project(&self, v: &SparseVec) -> SparseVec {
        self.relations
            .reduce(v)
            .into_iter()
            .map(|(c, x)| (self.position[&c], x))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = RationalMatrix> {
        proptest::collection::vec(-3i64..=3, rows * cols).prop_map(move |v| {
            let rows_v = v
                .chunks(cols)
                .map(|c| c.iter().map(|&x| rat(x)).collect())
                .collect();
            RationalMatrix::from_rows(rows_v).unwrap()
        })
    }

    #[test]
    fn rref_identity() {
        let id = RationalMatrix::identity(2);
        let (r, p) = id.rref();
        assert_eq!(r, id);
        assert_eq!(p, vec![0, 1]);
    }

    #[test]
    fn rref_rank_one() {
        let m = RationalMatrix::from_i64(&[&[2, 4], &[1, 2]]);
        let (r, p) = m.rref();
        assert_eq!(r, RationalMatrix::from_i64(&[&[1, 2], &[0, 0]]));
        assert_eq!(p, vec![0]);
    }

    #[test]
    fn kernel_examples() {
        assert!(RationalMatrix::identity(4).kernel_basis().is_empty());
        assert_eq!(RationalMatrix::zeros(3, 3).kernel_basis().len(), 3);
        let row = RationalMatrix::from_i64(&[&[1, 1, 0]]);
        let k = row.kernel_basis();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(row.mul_vec(v).unwrap().iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn solve_identity_and_inconsistent() {
        let b = vec![rat(3), ratio(-1, 2), rat(0)];
        assert_eq!(RationalMatrix::identity(3).solve(&b).unwrap(), b);
        assert_eq!(RationalMatrix::identity(5).rank(), 5);
        let m = RationalMatrix::from_i64(&[&[1, 1], &[2, 2]]);
        assert_eq!(m.solve(&[rat(1), rat(3)]), Err(LinAlgError::NoSolution));
    }

    #[test]
    fn rowspace_express_and_quotient() {
        let mut rs = RowSpace::new();
        let a: SparseVec = [(0, rat(1)), (2, rat(1))].into_iter().collect();
        let b: SparseVec = [(1, rat(2)), (2, rat(-1))].into_iter().collect();
        assert!(rs.insert(a.clone()));
        assert!(rs.insert(b.clone()));
        let mut target = a.clone();
        axpy(&mut target, &rat(3), &b);
        assert!(!rs.insert(target.clone()));
        let comb = rs.express(&target).unwrap();
        assert_eq!(comb.get(&0), Some(&rat(1)));
        assert_eq!(comb.get(&1), Some(&rat(3)));
        let q = Quotient::new(3, rs);
        assert_eq!(q.dim(), 1);
        assert_eq!(q.basis_column(0), 2);
        assert!(q.project(&a).is_empty());
    }

    proptest! {
        #[test]
        fn rref_is_idempotent(m in small_matrix(5, 7)) {
            let (r, p) = m.rref();
            let (r2, p2) = r.rref();
            prop_assert_eq!(&r, &r2);
            prop_assert_eq!(p, p2);
        }

        #[test]
        fn rank_nullity(m in small_matrix(4, 6)) {
            let k = m.kernel_basis();
            prop_assert_eq!(m.rank() + k.len(), m.cols());
            for v in &k {
                prop_assert!(m.mul_vec(v).unwrap().iter().all(Zero::is_zero));
            }
        }

        #[test]
        fn rowspace_rank_matches_dense(m in small_matrix(5, 6)) {
            let mut rs = RowSpace::new();
            for r in 0..m.rows() {
                rs.insert(to_sparse(m.row(r)));
            }
            prop_assert_eq!(rs.rank(), m.rank());
        }

        #[test]
        fn solve_finds_solution_when_consistent(m in small_matrix(4, 5), x in proptest::collection::vec(-4i64..=4, 5)) {
            let x: Vec<Rational> = x.into_iter().map(rat).collect();
            let b = m.mul_vec(&x).unwrap();
            let sol = m.solve(&b).unwrap();
            prop_assert_eq!(m.mul_vec(&sol).unwrap(), b);
        }
    }
}
