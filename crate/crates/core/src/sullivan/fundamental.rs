//! The graded Lie algebra dual to the quadratic part of a minimal Sullivan
//! algebra on its degree-1 generators.

use std::collections::BTreeMap;

use super::{canonical_stages, SullivanAlgebra, SullivanError};
use crate::exactla::{axpy, rat, SparseVec};
use crate::gradedlie::LieGradedData;

/// Dualizes `d: V_1 -> Λ²V_1`. Writing `dξ_k = -Σ_{i<j} b^k_ij ξ_i ξ_j`, the
/// dual basis gets `[ξ_i*, ξ_j*] = Σ_k b^k_ij ξ_k*`. Weights come from the
/// shortest Sullivan filtration of the degree-1 part (weight = stage + 1);
/// basis elements of weight above `cap` are dropped.
pub fn fundamental_lie(s: &SullivanAlgebra, cap: u32) -> Result<LieGradedData, SullivanError> {
    if let Some(g) = s.minimality_witness() {
        return Err(SullivanError::NotMinimal(g));
    }
    let p = s.algebra();
    let ones = p.generators_of_degree(1);
    let stages = canonical_stages(p, &ones)?;
    let weight = |i: usize| stages[i] as u32 + 1;

    let mut order: Vec<usize> = ones.iter().copied().filter(|&i| weight(i) <= cap).collect();
    order.sort_by_key(|&i| (weight(i), i));
    let position: BTreeMap<usize, usize> = order.iter().enumerate().map(|(pos, &i)| (i, pos)).collect();

    let mut table: BTreeMap<(usize, usize), SparseVec> = BTreeMap::new();
    for &k in &order {
        for (m, c) in p.d_of(k).terms() {
            let factors: Vec<usize> = m
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(j, _)| j)
                .collect();
            let &[i, j] = factors.as_slice() else {
                return Err(SullivanError::DegreeOneNotClosed(p.generator(k).name.clone()));
            };
            if weight(i) + weight(j) != weight(k) {
                return Err(SullivanError::InhomogeneousWeight(p.generator(k).name.clone()));
            }
            let (a, b) = (position[&i], position[&j]);
            let (key, sign) = if a < b { ((a, b), rat(-1)) } else { ((b, a), rat(1)) };
            let entry = table.entry(key).or_default();
            axpy(entry, &(c * sign), &[(position[&k], rat(1))].into_iter().collect());
        }
    }
    let labels = order.iter().map(|&i| format!("{}*", p.generator(i).name)).collect();
    let degrees = order.iter().map(|&i| weight(i)).collect();
    let lie = LieGradedData::new(labels, degrees, cap.max(1), table)?;
    lie.check_jacobi()?;
    Ok(lie)
}
