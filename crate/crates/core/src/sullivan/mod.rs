//! Sullivan algebras: filtrations, minimality, indecomposables and their
//! cohomology, relative models over a base, and minimal models of formal
//! cohomology algebras.

mod build;
mod fundamental;
mod morphism;
mod relative;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::gca::{GcaElement, GcaError, GcaPresentation, Generator};

pub use build::{build_minimal_model, CohomologyTable, MinimalModel};
pub use fundamental::fundamental_lie;
pub use morphism::CdgaMorphism;
pub use relative::{MinimalityCriterion, PsiExactSequence, RelativeModel};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SullivanError {
    #[error(transparent)]
    Gca(#[from] GcaError),
    #[error("no Sullivan filtration exists: the differentials of {0} depend on each other cyclically")]
    NotSullivan(String),
    #[error("filtration violated at generator `{0}`")]
    FiltrationViolated(String),
    #[error("filtration does not list generator `{0}`")]
    IncompleteFiltration(String),
    #[error("not minimal: d({0}) has a linear term")]
    NotMinimal(String),
    #[error("base generator `{0}` has a differential involving fiber generators")]
    BaseNotClosed(String),
    #[error("{0} part is not minimal: d({1}) has a linear term")]
    NonMinimalPart(&'static str, String),
    #[error("degree-1 generators do not close under d: d({0}) involves higher generators")]
    DegreeOneNotClosed(String),
    #[error("d({0}) is not homogeneous for the weight grading")]
    InhomogeneousWeight(String),
    #[error("cohomology table: {0}")]
    InvalidTable(String),
    #[error("cap must be at least 2, got {0}")]
    CapTooSmall(u32),
    #[error("morphism: {0}")]
    InvalidMorphism(String),
    #[error(transparent)]
    Lie(#[from] crate::gradedlie::LieError),
}

/// `dim H^k(Q(A))` for each `k >= 1`; zero entries are omitted.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PsiSpace(pub BTreeMap<u32, usize>);

impl PsiSpace {
    pub fn from_pairs(pairs: &[(u32, usize)]) -> Self {
        PsiSpace(pairs.iter().copied().filter(|&(_, d)| d > 0).collect())
    }

    pub fn dim(&self, degree: u32) -> usize {
        self.0.get(&degree).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Entries in degrees `>= degree`.
    pub fn from_degree(&self, degree: u32) -> PsiSpace {
        PsiSpace(self.0.range(degree..).map(|(&k, &v)| (k, v)).collect())
    }
}

impl fmt::Display for PsiSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}:{v}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// A free cdga with a Sullivan filtration, stored as the stage at which
/// each generator enters: `d V(0) = 0` and `d V(k) ⊂ ΛV(k-1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SullivanAlgebra {
    algebra: GcaPresentation,
    stages: Vec<usize>,
}

impl SullivanAlgebra {
    /// Uses the shortest filtration: a generator enters one stage after the
    /// latest generator appearing in its differential.
    pub fn new(algebra: GcaPresentation) -> Result<Self, SullivanError> {
        algebra.validate()?;
        let stages = canonical_stages(&algebra, &(0..algebra.num_generators()).collect::<Vec<_>>())?;
        Ok(SullivanAlgebra { algebra, stages })
    }

    /// Uses an explicit filtration `V(0) ⊂ V(1) ⊂ ...`, given as the
    /// generator names in each stage.
    pub fn with_filtration(algebra: GcaPresentation, filtration: &[Vec<String>]) -> Result<Self, SullivanError> {
        algebra.validate()?;
        let n = algebra.num_generators();
        let mut stages = vec![usize::MAX; n];
        for (k, names) in filtration.iter().enumerate() {
            for name in names {
                let i = algebra
                    .index_of(name)
                    .ok_or_else(|| GcaError::UnknownGenerator(name.clone()))?;
                stages[i] = stages[i].min(k);
            }
        }
        if let Some(i) = stages.iter().position(|&s| s == usize::MAX) {
            return Err(SullivanError::IncompleteFiltration(algebra.generator(i).name.clone()));
        }
        for i in 0..n {
            let ok = algebra.d_of(i).terms().keys().all(|m| {
                stages[i] > 0 && m.exponents().iter().enumerate().all(|(j, &e)| e == 0 || stages[j] < stages[i])
            }) || algebra.d_of(i).is_zero();
            if !ok {
                return Err(SullivanError::FiltrationViolated(algebra.generator(i).name.clone()));
            }
        }
        Ok(SullivanAlgebra { algebra, stages })
    }

    pub fn algebra(&self) -> &GcaPresentation {
        &self.algebra
    }

    pub fn into_algebra(self) -> GcaPresentation {
        self.algebra
    }

    /// Stage at which each generator enters the filtration.
    pub fn stages(&self) -> &[usize] {
        &self.stages
    }

    /// `V(0) ⊂ V(1) ⊂ ...` as generator names.
    pub fn filtration(&self) -> Vec<Vec<String>> {
        let top = self.stages.iter().copied().max().map_or(0, |s| s + 1);
        (0..top)
            .map(|k| {
                (0..self.stages.len())
                    .filter(|&i| self.stages[i] <= k)
                    .map(|i| self.algebra.generator(i).name.clone())
                    .collect()
            })
            .collect()
    }

    /// First generator whose differential has a linear term.
    pub fn minimality_witness(&self) -> Option<String> {
        (0..self.algebra.num_generators())
            .find(|&i| !self.algebra.linear_part(self.algebra.d_of(i)).is_empty())
            .map(|i| self.algebra.generator(i).name.clone())
    }

    /// Minimal iff the linear part of the differential vanishes.
    pub fn check_minimal(&self) -> bool {
        self.minimality_witness().is_none()
    }

    /// Dimensions of the cohomology of the indecomposables.
    pub fn psi_space(&self) -> PsiSpace {
        let q = self.algebra.indecomposables();
        let top = self.algebra.max_generator_degree();
        PsiSpace((1..=top).map(|k| (k, q.cohomology_dim(k))).filter(|&(_, d)| d > 0).collect())
    }

    /// Sub-algebra on the degree-1 generators.
    pub fn one_minimal_part(&self) -> Result<SullivanAlgebra, SullivanError> {
        let ones = self.algebra.generators_of_degree(1);
        for &i in &ones {
            if self.algebra.d_of(i).terms().keys().any(|m| {
                m.exponents()
                    .iter()
                    .enumerate()
                    .any(|(j, &e)| e > 0 && self.algebra.generator(j).degree != 1)
            }) {
                return Err(SullivanError::DegreeOneNotClosed(self.algebra.generator(i).name.clone()));
            }
        }
        let sub = restrict(&self.algebra, &ones, self.algebra.truncation())?;
        SullivanAlgebra::new(sub)
    }
}

impl fmt::Display for SullivanAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.algebra;
        for (i, g) in p.generators().iter().enumerate() {
            writeln!(f, "{} (degree {}): d = {}", g.name, g.degree, p.format_element(p.d_of(i)))?;
        }
        Ok(())
    }
}

/// Shortest filtration stages for `subset`, treating generators outside the
/// subset as coefficients.
pub(crate) fn canonical_stages(p: &GcaPresentation, subset: &[usize]) -> Result<Vec<usize>, SullivanError> {
    let n = p.num_generators();
    let mut stages: Vec<Option<usize>> = vec![None; n];
    let in_subset: Vec<bool> = (0..n).map(|i| subset.contains(&i)).collect();
    let mut remaining: Vec<usize> = subset.to_vec();
    while !remaining.is_empty() {
        let mut progressed = false;
        remaining.retain(|&i| {
            let mut stage = 0usize;
            for m in p.d_of(i).terms().keys() {
                for (j, &e) in m.exponents().iter().enumerate() {
                    if e == 0 || !in_subset[j] {
                        continue;
                    }
                    match stages[j] {
                        Some(s) => stage = stage.max(s + 1),
                        None => return true,
                    }
                }
            }
            stages[i] = Some(stage);
            progressed = true;
            false
        });
        if !progressed {
            let names: Vec<&str> = remaining.iter().map(|&i| p.generator(i).name.as_str()).collect();
            return Err(SullivanError::NotSullivan(names.join(", ")));
        }
    }
    Ok(stages.into_iter().map(|s| s.unwrap_or(0)).collect())
}

/// The presentation on `keep` obtained by sending every other generator to
/// zero. Canonical order is inherited, so no signs change.
pub(crate) fn restrict(p: &GcaPresentation, keep: &[usize], truncation: u32) -> Result<GcaPresentation, SullivanError> {
    let gens: Vec<Generator> = keep.iter().map(|&i| p.generator(i).clone()).collect();
    let mut sub = GcaPresentation::new(gens, truncation)?;
    for &i in keep {
        let image = project(p, &sub, p.d_of(i));
        sub.set_differential(&p.generator(i).name, image)?;
    }
    Ok(sub)
}

/// Re-expresses `e` in `dst` by generator name, dropping monomials that
/// involve generators absent from `dst`.
pub(crate) fn project(src: &GcaPresentation, dst: &GcaPresentation, e: &GcaElement) -> GcaElement {
    let map: Vec<Option<usize>> = src
        .generators()
        .iter()
        .map(|g| dst.index_of(&g.name))
        .collect();
    let mut out = GcaElement::zero();
    'terms: for (m, c) in e.terms() {
        let mut target = dst.one();
        for (j, &exp) in m.exponents().iter().enumerate() {
            if exp == 0 {
                continue;
            }
            let Some(k) = map[j] else { continue 'terms };
            target = dst.multiply(&target, &dst.power(&dst.generator_element(k), exp));
        }
        out.add_scaled(c, &target);
    }
    out
}
