//! Chevalley–Eilenberg cdgas of positively graded Lie algebras and the
//! tower of nilpotent quotients of a presented Lie algebra.
//!
//! Sign convention: for the dual basis `ξ_k` of a Lie basis `e_k`,
//! `dξ_k = -Σ_{i<j} b^k_ij ξ_i ξ_j` where `[e_i, e_j] = Σ_k b^k_ij e_k`.
//! Every generator sits in cohomological degree 1 and carries the Lie
//! degree of its dual as a weight.

use std::fmt;

use thiserror::Error;

use crate::gca::{GcaElement, GcaError, GcaPresentation, Generator};
use crate::gradedlie::{presented_lie, LieError, LieGradedData, LiePresentation};
use crate::sullivan::{CdgaMorphism, SullivanAlgebra, SullivanError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CceError {
    #[error("Jacobi identity fails on ({0}, {1}, {2})")]
    Jacobi(String, String, String),
    #[error("d² ≠ 0: d²({0}) = {1}")]
    DSquared(String, String),
    #[error("tower stage must be at least 2, got {0}")]
    StageTooLow(usize),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Gca(#[from] GcaError),
    #[error(transparent)]
    Sullivan(#[from] SullivanError),
}

/// `Λ(L^∨)` with the Chevalley–Eilenberg differential.
#[derive(Debug, Clone)]
pub struct CceAlgebra {
    pub sullivan: SullivanAlgebra,
    /// Weight of each generator, indexed like the presentation's generators.
    pub weights: Vec<u32>,
    /// Lie basis label dual to each generator.
    pub duals: Vec<String>,
}

impl CceAlgebra {
    pub fn algebra(&self) -> &GcaPresentation {
        self.sullivan.algebra()
    }
}

impl fmt::Display for CceAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.algebra();
        for (i, g) in p.generators().iter().enumerate() {
            writeln!(
                f,
                "{} (weight {}, dual to {}): d = {}",
                g.name,
                self.weights[i],
                self.duals[i],
                p.format_element(p.d_of(i))
            )?;
        }
        Ok(())
    }
}

/// A failure of `d² = 0` on a generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DSquaredWitness {
    pub generator: String,
    /// `d²` of the generator, a degree-3 element.
    pub value: String,
}

fn generator_name(i: usize, width: usize) -> String {
    format!("u{:0width$}", i + 1)
}

/// Builds `Λ(L^∨)` without checking `d² = 0`. Generator `k` of the result is
/// dual to basis element `k` of `l`.
fn raw_cce(l: &LieGradedData, truncation: u32, width: usize) -> Result<GcaPresentation, GcaError> {
    let names: Vec<String> = (0..l.dim()).map(|i| generator_name(i, width)).collect();
    let gens = names.iter().map(|n| Generator::new(n.clone(), 1)).collect();
    let mut p = GcaPresentation::new(gens, truncation.max(3))?;
    let mut images = vec![GcaElement::zero(); l.dim()];
    for (&(i, j), v) in l.brackets() {
        let (xi, xj) = (p.named(&names[i])?, p.named(&names[j])?);
        let product = p.multiply(&xi, &xj);
        for (&k, c) in v {
            images[k].add_scaled(&-c, &product);
        }
    }
    for (k, image) in images.into_iter().enumerate() {
        p.set_differential(&names[k], image)?;
    }
    Ok(p)
}

fn cce_with_width(l: &LieGradedData, truncation: u32, width: usize) -> Result<CceAlgebra, CceError> {
    l.check_jacobi().map_err(|e| match e {
        LieError::JacobiFailure(a, b, c) => CceError::Jacobi(a, b, c),
        other => other.into(),
    })?;
    let p = raw_cce(l, truncation, width)?;
    if let Some(w) = d_squared_witness(&p) {
        return Err(CceError::DSquared(w.generator, w.value));
    }
    let top = l.degrees().iter().copied().max().unwrap_or(0);
    let filtration: Vec<Vec<String>> = (1..=top)
        .map(|w| {
            (0..l.dim())
                .filter(|&i| l.degree(i) <= w)
                .map(|i| generator_name(i, width))
                .collect()
        })
        .collect();
    // Generator names are zero-padded, so the presentation keeps the Lie order.
    let sullivan = SullivanAlgebra::with_filtration(p, &filtration)?;
    Ok(CceAlgebra {
        sullivan,
        weights: l.degrees().to_vec(),
        duals: l.labels().to_vec(),
    })
}

fn width_for(n: usize) -> usize {
    n.to_string().len().max(2)
}

/// Chevalley–Eilenberg cdga of `l`, with the presentation truncated above
/// cohomological degree `truncation` (at least 3, so that `d²` on
/// generators is visible). The Jacobi identity is checked directly and
/// `d² = 0` is then checked independently.
pub fn cce_cdga(l: &LieGradedData, truncation: u32) -> Result<CceAlgebra, CceError> {
    cce_with_width(l, truncation, width_for(l.dim()))
}

fn d_squared_witness(p: &GcaPresentation) -> Option<DSquaredWitness> {
    (0..p.num_generators()).find_map(|i| {
        let dd = p.apply_differential(p.d_of(i));
        (!dd.is_zero()).then(|| DSquaredWitness {
            generator: p.generator(i).name.clone(),
            value: p.format_element(&dd),
        })
    })
}

/// Extends a candidate bracket table to a derivation of `Λ(L^∨)` and checks
/// `d² = 0` on generators. Returns the first generator where it fails.
/// The Jacobi identity is not consulted.
pub fn check_jacobi_via_d2(candidate: &LieGradedData) -> Result<Option<DSquaredWitness>, CceError> {
    let p = raw_cce(candidate, 3, width_for(candidate.dim()))?;
    Ok(d_squared_witness(&p))
}

/// Stages `C*(L/Γ_2), ..., C*(L/Γ_i)` for the Lie algebra presented by `p`,
/// with the inclusion of each stage into the next.
#[derive(Debug, Clone)]
pub struct OneMinimalTower {
    /// `stages[s]` is the cdga of `L/Γ_{s+2}`.
    pub stages: Vec<CceAlgebra>,
    pub inclusions: Vec<CdgaMorphism>,
}

impl OneMinimalTower {
    pub fn top(&self) -> &CceAlgebra {
        self.stages.last().expect("at least one stage")
    }
}

/// Builds the tower up to `L/Γ_stage`, which is the presented Lie algebra
/// truncated above degree `stage - 1`. Inclusions are checked to commute
/// with the differentials.
pub fn one_minimal_tower(p: &LiePresentation, stage: usize, truncation: u32) -> Result<OneMinimalTower, CceError> {
    if stage < 2 {
        return Err(CceError::StageTooLow(stage));
    }
    let top = presented_lie(p, stage as u32 - 1)?;
    top.check_generated_in_degree_one()?;
    let width = width_for(top.dim());
    let mut stages: Vec<CceAlgebra> = Vec::new();
    let mut inclusions = Vec::new();
    for s in 2..=stage {
        let quotient = top.truncate(s as u32 - 1);
        let algebra = cce_with_width(&quotient, truncation, width)?;
        if let Some(prev) = stages.last() {
            let map = CdgaMorphism::inclusion(prev.algebra().clone(), algebra.algebra().clone())?;
            map.check()?;
            inclusions.push(map);
        }
        stages.push(algebra);
    }
    Ok(OneMinimalTower { stages, inclusions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{rat, SparseVec};
    use crate::sullivan::{fundamental_lie, PsiSpace};

    fn unit(i: usize) -> SparseVec {
        [(i, rat(1))].into_iter().collect()
    }

    fn heisenberg() -> LieGradedData {
        LieGradedData::new(
            vec!["x".into(), "y".into(), "z".into()],
            vec![1, 1, 2],
            2,
            [((0, 1), unit(2))],
        )
        .unwrap()
    }

    fn coh_dims(p: &GcaPresentation, top: u32) -> Vec<usize> {
        (0..=top).map(|k| p.cohomology(k).unwrap().dim()).collect()
    }

    #[test]
    fn abelian() {
        let l = LieGradedData::abelian(vec!["a".into(), "b".into()], 1);
        let c = cce_cdga(&l, 4).unwrap();
        assert!(c.algebra().d_of(0).is_zero() && c.algebra().d_of(1).is_zero());
        assert_eq!(coh_dims(c.algebra(), 3), [1, 2, 1, 0]);
    }

    #[test]
    fn heisenberg_differential_and_h1() {
        let c = cce_cdga(&heisenberg(), 4).unwrap();
        let p = c.algebra();
        assert_eq!(p.format_element(p.d_of(2)), "-u01*u02");
        assert_eq!(c.weights, [1, 1, 2]);
        // H¹ is the kernel of d on degree 1: only u01, u02.
        let d1 = p.differential_matrix(1).unwrap();
        assert_eq!(d1.kernel_basis().len(), 2);
        assert_eq!(coh_dims(p, 3), [1, 2, 2, 1]);
        assert!(c.sullivan.check_minimal());
        assert_eq!(c.sullivan.filtration().len(), 2);
    }

    #[test]
    fn jacobi_failure_detected_both_ways() {
        // [x,y]=a, [y,u]=b, [u,x]=c, [x,b]=p: the Jacobi sum on (x,y,u) is
        // [x,b] = p ≠ 0.
        let l = LieGradedData::new(
            ["x", "y", "u", "a", "b", "c", "p"].map(String::from).to_vec(),
            vec![1, 1, 1, 2, 2, 2, 3],
            3,
            [((0, 1), unit(3)), ((1, 2), unit(4)), ((2, 0), unit(5)), ((0, 4), unit(6))],
        )
        .unwrap();
        assert_eq!(
            cce_cdga(&l, 4).unwrap_err(),
            CceError::Jacobi("x".into(), "y".into(), "u".into())
        );
        let w = check_jacobi_via_d2(&l).unwrap().expect("d² fails");
        assert_eq!(w.generator, "u07");
        assert_eq!(w.value, "-u01*u02*u03");
    }

    #[test]
    fn d2_agrees_with_jacobi_on_valid_tables() {
        assert_eq!(check_jacobi_via_d2(&heisenberg()).unwrap(), None);
        let free = presented_lie(&LiePresentation::free(2), 4).unwrap();
        assert_eq!(check_jacobi_via_d2(&free).unwrap(), None);
        let abelian = LieGradedData::abelian(vec!["a".into(), "b".into(), "c".into()], 1);
        assert_eq!(check_jacobi_via_d2(&abelian).unwrap(), None);
    }

    #[test]
    fn round_trip_through_fundamental_lie() {
        let fixtures = [
            heisenberg(),
            presented_lie(&LiePresentation::free(2), 4).unwrap(),
            presented_lie(&LiePresentation::surface(2), 3).unwrap(),
            LieGradedData::abelian(vec!["a".into(), "b".into()], 1),
        ];
        for l in fixtures {
            let c = cce_cdga(&l, 3).unwrap();
            let back = fundamental_lie(&c.sullivan, l.cap()).unwrap();
            assert!(back.same_structure(&l), "{l}");
        }
    }

    #[test]
    fn free_tower() {
        let free = LiePresentation::free(2);
        let t2 = one_minimal_tower(&free, 2, 4).unwrap();
        assert_eq!(t2.top().algebra().num_generators(), 2);
        assert_eq!(coh_dims(t2.top().algebra(), 2), [1, 2, 1]);

        let t3 = one_minimal_tower(&free, 3, 4).unwrap();
        let p = t3.top().algebra();
        assert_eq!(p.num_generators(), 3);
        assert_eq!(p.format_element(p.d_of(2)), "-u01*u02");
        // The Heisenberg algebra: H² is 2-dimensional, but the new
        // generator kills the class of αβ coming from the previous stage.
        assert_eq!(coh_dims(p, 2), [1, 2, 2]);
        let induced = t3.inclusions[0].induced_on_cohomology(2).unwrap();
        assert!(induced.is_zero());
        assert_eq!(t3.inclusions.len(), 1);
    }

    #[test]
    fn torus_tower_stabilizes() {
        let t = one_minimal_tower(&LiePresentation::surface(1), 5, 3).unwrap();
        for stage in &t.stages {
            assert_eq!(stage.algebra().num_generators(), 2);
            assert!(stage.algebra().d_of(0).is_zero() && stage.algebra().d_of(1).is_zero());
        }
    }

    #[test]
    fn tower_h1_and_psi_monotone() {
        for p in [LiePresentation::free(2), LiePresentation::surface(2), LiePresentation::free(3)] {
            let t = one_minimal_tower(&p, 4, 2).unwrap();
            let mut previous = 0;
            for stage in &t.stages {
                assert_eq!(stage.algebra().cohomology(1).unwrap().dim(), p.generators().len());
                let psi: PsiSpace = stage.sullivan.psi_space();
                assert!(psi.dim(1) >= previous);
                previous = psi.dim(1);
            }
        }
    }

    #[test]
    fn stage_must_be_at_least_two() {
        assert_eq!(
            one_minimal_tower(&LiePresentation::free(2), 1, 3).unwrap_err(),
            CceError::StageTooLow(1)
        );
    }
}
