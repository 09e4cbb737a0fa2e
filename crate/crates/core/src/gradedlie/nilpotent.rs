//! Nilpotency of a family of linear operators acting on one space.

use crate::exactla::{to_dense, to_sparse, LinAlgError, RationalMatrix, RowSpace};

/// Least `k <= bound` such that every product `(g_1 - id)...(g_k - id)` with
/// factors drawn from `endomorphisms` vanishes, i.e. the joint kernel `U_k`
/// is the whole space. `None` if no such `k` exists up to `bound`.
pub fn nilpotency_index(endomorphisms: &[RationalMatrix], bound: usize) -> Result<Option<usize>, LinAlgError> {
    let Some(first) = endomorphisms.first() else {
        return Ok(Some(1));
    };
    let n = first.rows();
    for g in endomorphisms {
        if g.rows() != n || g.cols() != n {
            return Err(LinAlgError::DimensionMismatch {
                expected: n,
                found: if g.rows() != n { g.rows() } else { g.cols() },
            });
        }
    }
    let shifted: Vec<RationalMatrix> = endomorphisms
        .iter()
        .map(|g| {
            let mut h = g.clone();
            for i in 0..n {
                let v = h.get(i, i) - crate::exactla::rat(1);
                h.set(i, i, v);
            }
            h
        })
        .collect();

    // Span of all length-k products, kept as an echelon basis of flattened
    // matrices.
    let flatten = |m: &RationalMatrix| to_sparse(&(0..n).flat_map(|r| m.row(r).to_vec()).collect::<Vec<_>>());
    let unflatten = |v: &crate::exactla::SparseVec| {
        let dense = to_dense(v, n * n);
        RationalMatrix::from_rows(dense.chunks(n.max(1)).map(<[_]>::to_vec).collect()).expect("square")
    };

    let mut span = RowSpace::new();
    for h in &shifted {
        span.insert(flatten(h));
    }
    for k in 1..=bound {
        if span.rank() == 0 {
            return Ok(Some(k));
        }
        let current: Vec<RationalMatrix> = span.basis().map(unflatten).collect();
        let mut next = RowSpace::new();
        for h in &shifted {
            for s in &current {
                next.insert(flatten(&h.mul(s)?));
            }
        }
        span = next;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unipotent_jordan_block() {
        let g = RationalMatrix::from_i64(&[&[1, 1, 0], &[0, 1, 1], &[0, 0, 1]]);
        assert_eq!(nilpotency_index(&[g], 10).unwrap(), Some(3));
    }

    #[test]
    fn identity_and_reflection() {
        assert_eq!(nilpotency_index(&[RationalMatrix::identity(3)], 5).unwrap(), Some(1));
        let r = RationalMatrix::from_i64(&[&[-1]]);
        assert_eq!(nilpotency_index(&[r], 20).unwrap(), None);
    }

    #[test]
    fn joint_action_needs_mixed_products() {
        // Each generator alone has index 2, but together they reach length 3.
        let a = RationalMatrix::from_i64(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]);
        let b = RationalMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 1], &[0, 0, 1]]);
        assert_eq!(nilpotency_index(&[a.clone()], 5).unwrap(), Some(2));
        assert_eq!(nilpotency_index(&[a, b], 5).unwrap(), Some(3));
    }

    #[test]
    fn size_mismatch() {
        let a = RationalMatrix::identity(2);
        let b = RationalMatrix::identity(3);
        assert!(nilpotency_index(&[a, b], 3).is_err());
    }
}
