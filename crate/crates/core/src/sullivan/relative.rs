//! Relative Sullivan algebras `(ΛV ⊗ ΛW, d)` over a base `(ΛV, d)`.

use std::collections::BTreeMap;

use super::{canonical_stages, restrict, PsiSpace, SullivanAlgebra, SullivanError};
use crate::exactla::{RationalMatrix, RowSpace};
use crate::gca::GcaPresentation;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelativeModel {
    algebra: GcaPresentation,
    base: Vec<usize>,
    fiber: Vec<usize>,
    fiber_stages: Vec<usize>,
}

impl RelativeModel {
    /// Splits `algebra` into the named base generators and the remaining
    /// fiber generators. The base must be a Sullivan sub-cdga and the fiber
    /// must carry a Sullivan filtration relative to it.
    pub fn new(algebra: GcaPresentation, base_names: &[&str]) -> Result<Self, SullivanError> {
        algebra.validate()?;
        let mut base = Vec::new();
        for name in base_names {
            let i = algebra
                .index_of(name)
                .ok_or_else(|| crate::gca::GcaError::UnknownGenerator(name.to_string()))?;
            base.push(i);
        }
        base.sort_unstable();
        base.dedup();
        let fiber: Vec<usize> = (0..algebra.num_generators()).filter(|i| !base.contains(i)).collect();
        for &i in &base {
            if algebra.d_of(i).terms().keys().any(|m| m.involves_any(&fiber)) {
                return Err(SullivanError::BaseNotClosed(algebra.generator(i).name.clone()));
            }
        }
        canonical_stages(&algebra, &base)?;
        let fiber_stages = canonical_stages(&algebra, &fiber)?;
        Ok(RelativeModel {
            algebra,
            base,
            fiber,
            fiber_stages,
        })
    }

    pub fn algebra(&self) -> &GcaPresentation {
        &self.algebra
    }

    pub fn base_generators(&self) -> Vec<String> {
        self.base.iter().map(|&i| self.algebra.generator(i).name.clone()).collect()
    }

    pub fn fiber_generators(&self) -> Vec<String> {
        self.fiber.iter().map(|&i| self.algebra.generator(i).name.clone()).collect()
    }

    /// `W(0) ⊂ W(1) ⊂ ...` as generator names.
    pub fn fiber_filtration(&self) -> Vec<Vec<String>> {
        let top = self.fiber.iter().map(|&i| self.fiber_stages[i] + 1).max().unwrap_or(0);
        (0..top)
            .map(|k| {
                self.fiber
                    .iter()
                    .filter(|&&i| self.fiber_stages[i] <= k)
                    .map(|&i| self.algebra.generator(i).name.clone())
                    .collect()
            })
            .collect()
    }

    pub fn total(&self) -> Result<SullivanAlgebra, SullivanError> {
        SullivanAlgebra::new(self.algebra.clone())
    }

    pub fn base_algebra(&self) -> Result<SullivanAlgebra, SullivanError> {
        SullivanAlgebra::new(restrict(&self.algebra, &self.base, self.algebra.truncation())?)
    }

    /// First fiber generator whose differential contains a lone fiber
    /// generator with constant coefficient.
    pub fn relative_minimality_witness(&self) -> Option<String> {
        self.fiber
            .iter()
            .copied()
            .find(|&i| {
                self.algebra
                    .d_of(i)
                    .terms()
                    .keys()
                    .any(|m| m.as_generator().is_some_and(|g| self.fiber.contains(&g)))
            })
            .map(|i| self.algebra.generator(i).name.clone())
    }

    /// Minimal as a relative algebra: `Im d ⊂ B⁺ ⊗ ΛW + B ⊗ Λ⁺W·Λ⁺W`.
    pub fn check_relative_minimal(&self) -> bool {
        self.relative_minimality_witness().is_none()
    }

    /// `(ΛW, d̄)` with `d̄ = (ε ⊗ id) ∘ d`: every monomial containing a base
    /// generator is dropped.
    pub fn fiber_restriction(&self) -> Result<SullivanAlgebra, SullivanError> {
        SullivanAlgebra::new(restrict(&self.algebra, &self.fiber, self.algebra.truncation())?)
    }

    /// The long exact sequence in cohomology of indecomposables for
    /// `0 -> Q(ΛV) -> Q(ΛV ⊗ ΛW) -> Q(ΛW) -> 0`, with base and fiber minimal.
    pub fn psi_exact_sequence(&self) -> Result<PsiExactSequence, SullivanError> {
        let base = self.base_algebra()?;
        if let Some(g) = base.minimality_witness() {
            return Err(SullivanError::NonMinimalPart("base", g));
        }
        let fiber = self.fiber_restriction()?;
        if let Some(g) = fiber.minimality_witness() {
            return Err(SullivanError::NonMinimalPart("fiber", g));
        }

        let p = &self.algebra;
        let top = p.max_generator_degree() + 1;
        let of_degree = |set: &[usize], k: u32| -> Vec<usize> {
            set.iter().copied().filter(|&i| p.generator(i).degree == k).collect()
        };
        let names = |set: &[usize]| -> Vec<String> { set.iter().map(|&i| p.generator(i).name.clone()).collect() };
        let q = p.indecomposables();
        let total_gens = |k: u32| q.generators_by_degree.get(&k).cloned().unwrap_or_default();
        let qd = |k: u32| -> RationalMatrix {
            q.maps
                .get(&k)
                .cloned()
                .unwrap_or_else(|| RationalMatrix::zeros(total_gens(k + 1).len(), total_gens(k).len()))
        };

        let mut seq = PsiExactSequence::default();
        for k in 1..=top {
            let v_k = of_degree(&self.base, k);
            let w_k = of_degree(&self.fiber, k);
            let t_k = total_gens(k);
            let v_next = of_degree(&self.base, k + 1);
            let t_next = total_gens(k + 1);
            seq.base_labels.insert(k, names(&v_k));
            seq.fiber_labels.insert(k, names(&w_k));

            // Connecting map by the zig-zag: lift w to the total complex,
            // apply Q(d), and pull the result back along the inclusion of
            // Q(ΛV). Its fiber component is Q(d̄)(w) = 0 by minimality.
            let out = qd(k);
            let mut connecting = RationalMatrix::zeros(v_next.len(), w_k.len());
            for (col, &w) in w_k.iter().enumerate() {
                let src = t_k.iter().position(|&g| g == w).expect("fiber generator in total");
                for (row, &g) in t_next.iter().enumerate() {
                    let c = out.get(row, src);
                    if num_traits::Zero::is_zero(c) {
                        continue;
                    }
                    let Some(pos) = v_next.iter().position(|&v| v == g) else {
                        panic!("linear part of d̄ on a minimal fiber must vanish");
                    };
                    connecting.set(pos, col, c.clone());
                }
            }

            // rank of i#: classes of V_k modulo boundaries in the total complex.
            let incoming = if k > 1 { qd(k - 1) } else { RationalMatrix::zeros(t_k.len(), 0) };
            let incoming_rank = incoming.rank();
            let mut span = RowSpace::new();
            for j in 0..incoming.cols() {
                span.insert(crate::exactla::to_sparse(&incoming.column(j)));
            }
            for &v in &v_k {
                let pos = t_k.iter().position(|&g| g == v).expect("base generator in total");
                span.insert([(pos, crate::exactla::rat(1))].into_iter().collect());
            }
            let inclusion_rank = span.rank() - incoming_rank;

            // rank of ε#: cocycles of the total complex projected to W_k.
            let kernel = out.kernel_basis();
            let mut projected = RowSpace::new();
            for z in &kernel {
                let proj = w_k
                    .iter()
                    .enumerate()
                    .map(|(col, &w)| (col, z[t_k.iter().position(|&g| g == w).expect("in total")].clone()))
                    .filter(|(_, c)| !num_traits::Zero::is_zero(c))
                    .collect();
                projected.insert(proj);
            }
            let projection_rank = projected.rank();
            let total_dim = kernel.len() - incoming_rank;

            seq.base.0.insert(k, v_k.len());
            seq.fiber.0.insert(k, w_k.len());
            seq.total.0.insert(k, total_dim);
            seq.inclusion_rank.insert(k, inclusion_rank);
            seq.projection_rank.insert(k, projection_rank);
            seq.connecting.insert(k, connecting);
        }
        for space in [&mut seq.base, &mut seq.fiber, &mut seq.total] {
            space.0.retain(|_, d| *d > 0);
        }
        seq.exact = seq.dimensions_are_exact();
        Ok(seq)
    }

    /// The three equivalent minimality conditions, together with the direct
    /// minimality test on the total algebra.
    pub fn minimality_criterion(&self) -> Result<MinimalityCriterion, SullivanError> {
        let seq = self.psi_exact_sequence()?;
        Ok(MinimalityCriterion {
            c1: seq.connecting_is_zero(),
            c2: seq.inclusion_is_injective(),
            c3: seq.projection_is_surjective(),
            total_minimal: self.total()?.check_minimal(),
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PsiExactSequence {
    pub base: PsiSpace,
    pub total: PsiSpace,
    pub fiber: PsiSpace,
    /// `connecting[k]`: `H^k(Q(ΛW)) -> H^{k+1}(Q(ΛV))`, columns indexed by
    /// fiber generators of degree `k`, rows by base generators of degree `k+1`.
    pub connecting: BTreeMap<u32, RationalMatrix>,
    pub inclusion_rank: BTreeMap<u32, usize>,
    pub projection_rank: BTreeMap<u32, usize>,
    pub base_labels: BTreeMap<u32, Vec<String>>,
    pub fiber_labels: BTreeMap<u32, Vec<String>>,
    /// Whether ranks and dimensions satisfy exactness at every position.
    pub exact: bool,
}

impl PsiExactSequence {
    fn connecting_rank(&self, k: u32) -> usize {
        self.connecting.get(&k).map_or(0, RationalMatrix::rank)
    }

    fn dimensions_are_exact(&self) -> bool {
        self.inclusion_rank.keys().all(|&k| {
            let i = self.inclusion_rank[&k];
            let e = self.projection_rank[&k];
            let before = if k > 1 { self.connecting_rank(k - 1) } else { 0 };
            self.base.dim(k) == before + i
                && self.total.dim(k) == i + e
                && self.fiber.dim(k) == e + self.connecting_rank(k)
        })
    }

    pub fn connecting_is_zero(&self) -> bool {
        self.connecting.values().all(RationalMatrix::is_zero)
    }

    pub fn inclusion_is_injective(&self) -> bool {
        self.inclusion_rank.iter().all(|(&k, &r)| r == self.base.dim(k))
    }

    pub fn projection_is_surjective(&self) -> bool {
        self.projection_rank.iter().all(|(&k, &r)| r == self.fiber.dim(k))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinimalityCriterion {
    pub c1: bool,
    pub c2: bool,
    pub c3: bool,
    pub total_minimal: bool,
}

impl MinimalityCriterion {
    pub fn consistent(&self) -> bool {
        self.c1 == self.c2 && self.c2 == self.c3 && self.c3 == self.total_minimal
    }
}
