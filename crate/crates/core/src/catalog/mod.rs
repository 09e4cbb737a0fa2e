//! Orbit configuration spaces `C_n^G(S)` of a surface `S` with a free action
//! of a finite group `G`: descriptors and the tables derived from them.
//!
//! `S` is a closed orientable surface of genus `g` with `l` punctures and
//! `|G| = m`. The fiber of `C_n^G(S) -> C_k^G(S)` is `C_{n-k}^G` of `S` with
//! `k` orbits removed.

mod groebner;
mod koszul;
mod lcs;

use std::fmt;

use thiserror::Error;

use crate::gradedlie::LieError;
use crate::sullivan::{build_minimal_model, CohomologyTable, PsiSpace, SullivanError};

pub use koszul::{koszul_numeric_test, KoszulReport, QuadraticPresentation, MAX_KOSZUL_CAP};
pub use lcs::{lcs_formula_check, lcs_rank_table, LcsDecomposition, LcsFormulaReport, MAX_LCS_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("invalid surface: {0}")]
    InvalidSpec(String),
    #[error("invalid query: {0}")]
    Query(String),
    #[error("not determined: {0}")]
    Undetermined(String),
    #[error("cap {cap} exceeds the supported maximum {max}")]
    CapTooLarge { cap: usize, max: usize },
    #[error("malformed polynomial: {0}")]
    MalformedPolynomial(String),
    #[error("invalid quadratic presentation: {0}")]
    InvalidPresentation(String),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Sullivan(#[from] SullivanError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SurfaceSpec {
    pub genus: u32,
    pub punctures: u32,
    pub group_order: u32,
    pub orientation_preserving: bool,
}

impl SurfaceSpec {
    /// The only free action of `Z/2` on the sphere is antipodal, which
    /// reverses orientation; every other spec defaults to preserving it.
    pub fn new(genus: u32, punctures: u32, group_order: u32) -> Self {
        SurfaceSpec {
            genus,
            punctures,
            group_order,
            orientation_preserving: !(genus == 0 && punctures == 0 && group_order == 2),
        }
    }

    pub fn with_orientation(self, preserving: bool) -> Self {
        SurfaceSpec {
            orientation_preserving: preserving,
            ..self
        }
    }

    pub fn is_sphere(&self) -> bool {
        self.genus == 0 && self.punctures == 0
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.punctures as i64
    }

    pub fn validate(&self) -> Result<(), CatalogError> {
        let m = self.group_order;
        let fail = |msg: String| Err(CatalogError::InvalidSpec(msg));
        if m == 0 {
            return fail("group order must be at least 1".into());
        }
        if self.is_sphere() && m > 2 {
            return fail("free sphere action forces m ≤ 2".into());
        }
        if self.euler_characteristic() % m as i64 != 0 {
            return fail(format!(
                "a free action of a group of order {m} needs m to divide the Euler characteristic {}",
                self.euler_characteristic()
            ));
        }
        if m == 1 && !self.orientation_preserving {
            return fail("the trivial group preserves orientation".into());
        }
        if self.is_sphere() && m == 2 && self.orientation_preserving {
            return fail("a free orientation-preserving action on the sphere is trivial".into());
        }
        Ok(())
    }

    /// `S` with `k` orbits (`k·m` points) removed.
    pub fn fiber_surface(&self, k: u32) -> SurfaceSpec {
        SurfaceSpec {
            punctures: self.punctures + k * self.group_order,
            ..*self
        }
    }

    /// `dim H¹(S; ℚ)`.
    pub fn h1_rank(&self) -> u64 {
        let two_g = 2 * self.genus as u64;
        if self.punctures == 0 {
            two_g
        } else {
            two_g + self.punctures as u64 - 1
        }
    }
}

impl fmt::Display for SurfaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(g={}, l={}, m={}, {})",
            self.genus,
            self.punctures,
            self.group_order,
            if self.orientation_preserving { "preserving" } else { "reversing" }
        )
    }
}

fn check_points(n: u32) -> Result<(), CatalogError> {
    if n == 0 {
        return Err(CatalogError::Query("need at least one point".into()));
    }
    Ok(())
}

fn check_projection(n: u32, k: u32) -> Result<(), CatalogError> {
    if n < 2 || k == 0 || k >= n {
        return Err(CatalogError::Query(format!("need 1 ≤ k < n, got n={n}, k={k}")));
    }
    Ok(())
}

/// First stage of the tower over the sphere from which every later
/// projection has a cross-section: 3 points for the trivial group, 2 for
/// the antipodal action.
fn sphere_threshold(spec: &SurfaceSpec) -> u32 {
    if spec.group_order == 1 {
        3
    } else {
        2
    }
}

fn psi_of_table(table: &CohomologyTable) -> Result<PsiSpace, CatalogError> {
    let model = build_minimal_model(table, 7)?;
    debug_assert!(model.converged);
    Ok(model.model.psi_space().from_degree(2))
}

/// ψ-homotopy in degrees ≥ 2.
///
/// Away from the sphere every `C_n^G(S)` is an iterated fibration of
/// aspherical surfaces, so this is empty. Over the sphere the space splits
/// rationally as a base with known cohomology and a fiber over a punctured
/// sphere: the base is `S²` itself for one point (and for two points with
/// the trivial group, since `C_2(S²) ≃ S²`), and a rational `ℝP³` from the
/// threshold stage on. The base ψ-space is read off its minimal model.
pub fn psi_table(spec: &SurfaceSpec, n: u32) -> Result<PsiSpace, CatalogError> {
    spec.validate()?;
    check_points(n)?;
    if !spec.is_sphere() {
        return Ok(PsiSpace::default());
    }
    let threshold = sphere_threshold(spec);
    let (base, base_points) = if n == 1 || (spec.group_order == 1 && n == 2) {
        (CohomologyTable::single_class("x", 2), n)
    } else {
        (CohomologyTable::single_class("z", 3), threshold)
    };
    let mut psi = psi_of_table(&base)?;
    if n > base_points {
        let fiber = psi_table(&spec.fiber_surface(base_points), n - base_points)?;
        for (k, d) in fiber.0 {
            *psi.0.entry(k).or_default() += d;
        }
    }
    Ok(psi)
}

/// Whether the model `ΛV_{C_k} ⊗ ΛV_F` of `C_n^G(S)` built from the
/// projection onto `k` points is minimal.
///
/// Its generators are the ψ-spaces of base and fiber; it is minimal exactly
/// when they add up to the ψ-space of `C_n`. Fiber generators sit in degree
/// 1, so a linear part of the differential always pairs a fiber generator
/// with a degree-2 base generator, and comparing degree 2 decides.
pub fn model_minimality(spec: &SurfaceSpec, n: u32, k: u32) -> Result<bool, CatalogError> {
    spec.validate()?;
    check_projection(n, k)?;
    let total = psi_table(spec, n)?;
    let base = psi_table(spec, k)?;
    let fiber = psi_table(&spec.fiber_surface(k), n - k)?;
    Ok(total.dim(2) == base.dim(2) + fiber.dim(2))
}

/// Whether `C_{n+1}^G(S) -> C_n^G(S)` has a cross-section.
pub fn cross_section_table(spec: &SurfaceSpec, n: u32) -> Result<bool, CatalogError> {
    spec.validate()?;
    check_points(n)?;
    if spec.punctures > 0 {
        return Ok(true);
    }
    if !spec.is_sphere() {
        return Err(CatalogError::Undetermined(format!(
            "cross-sections over the closed genus-{} surface are not covered",
            spec.genus
        )));
    }
    Ok(if spec.group_order == 1 { n != 2 } else { n >= 2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(m: u32) -> SurfaceSpec {
        SurfaceSpec::new(0, 0, m)
    }

    #[test]
    fn validation() {
        assert!(sphere(2).validate().is_ok());
        assert!(!sphere(2).orientation_preserving);
        let err = sphere(3).validate().unwrap_err();
        assert_eq!(err.to_string(), "invalid surface: free sphere action forces m ≤ 2");
        assert!(SurfaceSpec::new(1, 0, 2).validate().is_ok());
        assert!(SurfaceSpec::new(0, 1, 2).validate().is_err());
        assert!(SurfaceSpec::new(0, 2, 5).validate().is_ok());
        assert!(SurfaceSpec::new(2, 0, 1).with_orientation(false).validate().is_err());
        assert!(sphere(2).with_orientation(true).validate().is_err());
        assert!(SurfaceSpec::new(0, 0, 0).validate().is_err());
    }

    #[test]
    fn fibers_and_h1() {
        assert_eq!(sphere(2).fiber_surface(1), SurfaceSpec::new(0, 2, 2).with_orientation(false));
        assert_eq!(SurfaceSpec::new(1, 0, 1).fiber_surface(3), SurfaceSpec::new(1, 3, 1));
        assert_eq!(SurfaceSpec::new(1, 0, 1).fiber_surface(0), SurfaceSpec::new(1, 0, 1));
        assert_eq!(SurfaceSpec::new(0, 3, 1).h1_rank(), 2);
        assert_eq!(SurfaceSpec::new(2, 0, 1).h1_rank(), 4);
        assert_eq!(sphere(1).h1_rank(), 0);
        for spec in [sphere(1), sphere(2), SurfaceSpec::new(1, 2, 2), SurfaceSpec::new(2, 0, 1)] {
            for a in 0..4 {
                for b in 0..4 {
                    assert_eq!(spec.fiber_surface(a).fiber_surface(b), spec.fiber_surface(a + b));
                }
                if a >= 1 {
                    assert!(spec.fiber_surface(a + 1).h1_rank() > spec.fiber_surface(a).h1_rank());
                }
            }
        }
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi_table(&sphere(1), 2).unwrap(), PsiSpace::from_pairs(&[(2, 1), (3, 1)]));
        assert_eq!(psi_table(&sphere(2), 5).unwrap(), PsiSpace::from_pairs(&[(3, 1)]));
        assert_eq!(psi_table(&sphere(2), 1).unwrap(), PsiSpace::from_pairs(&[(2, 1), (3, 1)]));
        for n in 1..5 {
            assert!(psi_table(&SurfaceSpec::new(1, 2, 1), n).unwrap().is_empty());
        }
        assert!(psi_table(&sphere(1), 0).is_err());
    }

    #[test]
    fn minimality_examples() {
        assert!(!model_minimality(&sphere(1), 5, 2).unwrap());
        assert!(model_minimality(&sphere(2), 4, 2).unwrap());
        assert!(model_minimality(&sphere(1), 2, 1).unwrap());
        for (n, k) in [(2, 1), (5, 3), (6, 1)] {
            assert!(model_minimality(&SurfaceSpec::new(0, 1, 1), n, k).unwrap());
        }
        assert!(model_minimality(&sphere(1), 3, 3).is_err());
    }

    #[test]
    fn cross_sections() {
        assert!(!cross_section_table(&sphere(1), 2).unwrap());
        assert!(cross_section_table(&sphere(1), 1).unwrap());
        assert!(!cross_section_table(&sphere(2), 1).unwrap());
        assert!(cross_section_table(&sphere(2), 2).unwrap());
        assert!(cross_section_table(&SurfaceSpec::new(0, 3, 1), 4).unwrap());
        assert!(matches!(
            cross_section_table(&SurfaceSpec::new(2, 0, 1), 1),
            Err(CatalogError::Undetermined(_))
        ));
    }

    #[test]
    fn minimality_matches_sections_over_the_sphere() {
        // The model over C_k is minimal exactly when every projection from
        // stage k onward has a section.
        for m in [1, 2] {
            for n in 2..=6 {
                for k in 1..n {
                    let sections = (k..n).all(|j| cross_section_table(&sphere(m), j).unwrap());
                    assert_eq!(model_minimality(&sphere(m), n, k).unwrap(), sections, "m={m} n={n} k={k}");
                }
            }
        }
    }
}
