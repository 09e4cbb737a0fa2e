//! Lower-central-series ranks of `π_1 C_n^G(S)` from the tower of
//! fibrations, and the LCS formula against a Poincaré polynomial.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::{check_points, sphere_threshold, CatalogError, SurfaceSpec};
use crate::gradedlie::{free_lie_dims, mobius, LcsTable};
use crate::poly::TruncatedPoly;

/// Largest truncation degree accepted by [`lcs_rank_table`].
pub const MAX_LCS_CAP: usize = 8;

/// `φ_i` split into the Lie algebra of the base of the tower and the free
/// Lie algebras of the successive fibers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LcsDecomposition {
    /// `φ_i` of the base, `i = 1..=cap`.
    pub base: Vec<u64>,
    /// Rank of the free Lie algebra added at each extension.
    pub free_ranks: Vec<u64>,
    pub table: LcsTable,
}

/// `φ_i(C_n^G(S))` for `i = 1..=cap`.
///
/// Ranks add across each extension `0 -> L_F -> L_{C_{j+1}} -> L_{C_j} -> 0`,
/// where the fiber `F` is a surface with punctures and `L_F` is free on
/// `dim H¹(F)` generators. The tower starts at `C_1 = S` away from the
/// sphere; over the sphere it starts at the threshold stage, whose Lie
/// algebra vanishes (as do all earlier ones).
pub fn lcs_rank_table(spec: &SurfaceSpec, n: u32, cap: usize) -> Result<LcsDecomposition, CatalogError> {
    spec.validate()?;
    check_points(n)?;
    if cap > MAX_LCS_CAP {
        return Err(CatalogError::CapTooLarge { cap, max: MAX_LCS_CAP });
    }
    let (base, first_extension) = if spec.is_sphere() {
        (vec![0; cap], sphere_threshold(spec))
    } else if spec.punctures > 0 {
        (free_lie_dims(spec.h1_rank(), cap as u32), 1)
    } else {
        (closed_surface_ranks(spec.genus, cap), 1)
    };
    let free_ranks: Vec<u64> = (first_extension..n).map(|j| spec.fiber_surface(j).h1_rank()).collect();
    let mut ranks = base.clone();
    for &r in &free_ranks {
        for (phi, w) in ranks.iter_mut().zip(free_lie_dims(r, cap as u32)) {
            *phi += w;
        }
    }
    Ok(LcsDecomposition {
        base,
        free_ranks,
        table: LcsTable { ranks },
    })
}

/// `φ_i` of a closed orientable surface group. Its graded Lie algebra is
/// one-relator quadratic with `U(L)` of Hilbert series `1/(1 - 2g t + t²)`.
/// Writing `1 - 2g t + t² = (1 - αt)(1 - βt)` gives
/// `φ_n = (1/n) Σ_{d|n} μ(n/d) (α^d + β^d)`, and the power sums obey
/// `s_d = 2g s_{d-1} - s_{d-2}`.
fn closed_surface_ranks(genus: u32, cap: usize) -> Vec<u64> {
    let two_g = 2 * genus as i128;
    let mut s: Vec<i128> = vec![2, two_g];
    while s.len() <= cap {
        let d = s.len();
        s.push(two_g * s[d - 1] - s[d - 2]);
    }
    (1..=cap as u64)
        .map(|n| {
            let total: i128 = (1..=n)
                .filter(|d| n % d == 0)
                .map(|d| mobius(n / d) as i128 * s[d as usize])
                .sum();
            (total / n as i128) as u64
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LcsFormulaReport {
    /// `P(-t)`.
    pub lhs: TruncatedPoly,
    /// `∏ (1 - t^i)^{φ_i}`.
    pub rhs: TruncatedPoly,
    pub first_mismatch: Option<usize>,
    /// The formula is only asserted for punctured genus-0 surfaces with an
    /// orientation-preserving action.
    pub within_guarantee: bool,
}

impl LcsFormulaReport {
    pub fn holds(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

/// Compares `P(-t)` with `∏_i (1 - t^i)^{φ_i}` modulo `t^{cap+1}`.
pub fn lcs_formula_check(
    spec: &SurfaceSpec,
    n: u32,
    poincare: &[BigInt],
    cap: usize,
) -> Result<LcsFormulaReport, CatalogError> {
    if poincare.first().map_or(true, |c| !c.is_one()) {
        return Err(CatalogError::MalformedPolynomial("constant term must be 1".into()));
    }
    if poincare.iter().any(|c| c.is_negative()) {
        return Err(CatalogError::MalformedPolynomial("Betti numbers cannot be negative".into()));
    }
    let decomposition = lcs_rank_table(spec, n, cap)?;
    let lhs = TruncatedPoly::from_coeffs(poincare.iter().cloned(), cap).negate_variable();
    let rhs = TruncatedPoly::lcs_product(&decomposition.table.ranks, cap);
    Ok(LcsFormulaReport {
        first_mismatch: lhs.first_difference(&rhs),
        lhs,
        rhs,
        within_guarantee: spec.genus == 0 && spec.punctures > 0 && spec.orientation_preserving,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gradedlie::witt_number;

    fn big(cs: &[i64]) -> Vec<BigInt> {
        cs.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn plane_three_points() {
        let d = lcs_rank_table(&SurfaceSpec::new(0, 1, 1), 3, 6).unwrap();
        assert_eq!(d.free_ranks, [1, 2]);
        let oracle: Vec<u64> = (1..=6).map(|i| witt_number(1, i) + witt_number(2, i)).collect();
        assert_eq!(d.table.ranks, oracle);
        assert_eq!(&d.table.ranks[..4], [3, 1, 2, 3]);
    }

    #[test]
    fn antipodal_sphere_three_points() {
        let d = lcs_rank_table(&SurfaceSpec::new(0, 0, 2), 3, 5).unwrap();
        assert_eq!(d.free_ranks, [3]);
        assert_eq!(d.table.ranks, [3, 3, 8, 18, 48]);
        for n in 1..=2 {
            assert!(lcs_rank_table(&SurfaceSpec::new(0, 0, 2), n, 5).unwrap().table.ranks.iter().all(|&r| r == 0));
        }
        for n in 1..=3 {
            assert!(lcs_rank_table(&SurfaceSpec::new(0, 0, 1), n, 5).unwrap().table.ranks.iter().all(|&r| r == 0));
        }
    }

    #[test]
    fn torus_point() {
        let d = lcs_rank_table(&SurfaceSpec::new(1, 0, 1), 1, 4).unwrap();
        assert_eq!(d.table.ranks, [2, 0, 0, 0]);
    }

    #[test]
    fn closed_surface_ranks_match_presented_lie() {
        use crate::gradedlie::{presented_lie, LiePresentation};
        for (genus, cap) in [(1, 5), (2, 5), (3, 4)] {
            let lie = presented_lie(&LiePresentation::surface(genus as usize), cap as u32).unwrap();
            assert_eq!(closed_surface_ranks(genus, cap), lie.lcs_ranks().unwrap().ranks, "genus {genus}");
        }
        assert_eq!(closed_surface_ranks(2, 6), [4, 5, 16, 45, 144, 440]);
    }

    #[test]
    fn telescoping() {
        let specs = [
            SurfaceSpec::new(0, 0, 1),
            SurfaceSpec::new(0, 0, 2),
            SurfaceSpec::new(0, 1, 1),
            SurfaceSpec::new(0, 2, 2),
            SurfaceSpec::new(1, 0, 1),
            SurfaceSpec::new(1, 1, 1),
            SurfaceSpec::new(2, 0, 1),
        ];
        for spec in specs {
            for n in 1..=5 {
                let d = lcs_rank_table(&spec, n, 6).unwrap();
                let mut expected = TruncatedPoly::lcs_product(&d.base, 6);
                for &r in &d.free_ranks {
                    expected = expected.mul(&TruncatedPoly::from_coeffs([BigInt::one(), -BigInt::from(r)], 6));
                }
                assert_eq!(TruncatedPoly::lcs_product(&d.table.ranks, 6), expected, "{spec} n={n}");
            }
        }
    }

    #[test]
    fn formula_examples() {
        let sphere = SurfaceSpec::new(0, 0, 2);
        let r = lcs_formula_check(&sphere, 2, &big(&[1, 0, 0, 1]), 6).unwrap();
        assert_eq!(r.first_mismatch, Some(3));
        assert!(!r.within_guarantee);

        let plane = SurfaceSpec::new(0, 1, 1);
        let r = lcs_formula_check(&plane, 3, &big(&[1, 3, 2]), 6).unwrap();
        assert!(r.holds() && r.within_guarantee);

        let r = lcs_formula_check(&SurfaceSpec::new(0, 3, 1), 1, &big(&[1, 2]), 6).unwrap();
        assert!(r.holds());

        assert!(lcs_formula_check(&plane, 3, &big(&[2, 3]), 6).is_err());
        assert!(lcs_formula_check(&plane, 3, &big(&[1, -3]), 6).is_err());
        assert!(lcs_formula_check(&plane, 3, &big(&[]), 6).is_err());
        assert!(matches!(
            lcs_rank_table(&plane, 3, 9),
            Err(CatalogError::CapTooLarge { cap: 9, max: 8 })
        ));
    }
}
