//! Quadratic graded-commutative algebras `Λ(V)/(R)` with `R ⊂ Λ²V`, and the
//! numeric Koszul test `h_A(t) · h_{A^!}(-t) = 1`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use super::CatalogError;
use crate::exactla::{rat, Rational, RationalMatrix, RowSpace, SparseVec};
use crate::gca::{GcaElement, GcaPresentation, Generator};
use super::groebner::{quotient_dims, NcPoly};
use crate::gradedlie::{LieExpr, LiePresentation, LieRelator};
use crate::poly::TruncatedPoly;

/// Degree-1 generators with relations in `Λ²V`, stored as an echelon basis
/// in the coordinates `x_i x_j` (`i < j`, ordered lexicographically).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticPresentation {
    generators: Vec<String>,
    relations: Vec<SparseVec>,
}

fn pair_index(i: usize, j: usize, m: usize) -> usize {
    debug_assert!(i < j && j < m);
    i * m - i * (i + 1) / 2 + (j - i - 1)
}

fn pairs(m: usize) -> Vec<(usize, usize)> {
    (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect()
}

impl QuadraticPresentation {
    /// Each relation lists `((i, j), c)` for terms `c·x_i x_j`. Terms with
    /// `i > j` are reordered with a sign and squares vanish. Dependent
    /// relations are dropped.
    pub fn new(generators: Vec<String>, relations: Vec<Vec<((usize, usize), Rational)>>) -> Result<Self, CatalogError> {
        let m = generators.len();
        for (k, g) in generators.iter().enumerate() {
            if generators[..k].contains(g) {
                return Err(CatalogError::InvalidPresentation(format!("duplicate generator `{g}`")));
            }
        }
        let mut space = RowSpace::new();
        for relation in relations {
            let mut v = SparseVec::new();
            for ((i, j), c) in relation {
                if i >= m || j >= m {
                    return Err(CatalogError::InvalidPresentation("generator index out of range".into()));
                }
                let (key, c) = match i.cmp(&j) {
                    std::cmp::Ordering::Less => (pair_index(i, j, m), c),
                    std::cmp::Ordering::Greater => (pair_index(j, i, m), -c),
                    std::cmp::Ordering::Equal => continue,
                };
                crate::exactla::axpy(&mut v, &rat(1), &[(key, c)].into_iter().collect());
            }
            space.insert(v);
        }
        Ok(QuadraticPresentation {
            generators,
            relations: space.basis().cloned().collect(),
        })
    }

    /// The exterior algebra on `m` generators.
    pub fn exterior(m: usize) -> Self {
        QuadraticPresentation::new((1..=m).map(|i| format!("e{i}")).collect(), Vec::new()).expect("no relations")
    }

    /// Quadratic part of the Orlik–Solomon algebra of the central
    /// arrangement with the given linear forms: one relation
    /// `e_b e_c - e_a e_c + e_a e_b` for each dependent triple.
    pub fn arrangement(names: Vec<String>, forms: &[Vec<i64>]) -> Result<Self, CatalogError> {
        if names.len() != forms.len() {
            return Err(CatalogError::InvalidPresentation("one name per hyperplane".into()));
        }
        let rank = |rows: &[&Vec<i64>]| {
            let rows: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
            RationalMatrix::from_i64(&rows).rank()
        };
        let n = forms.len();
        let mut relations = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rank(&[&forms[a], &forms[b]]) < 2 {
                    return Err(CatalogError::InvalidPresentation(format!(
                        "hyperplanes {} and {} coincide",
                        names[a], names[b]
                    )));
                }
                for c in b + 1..n {
                    if rank(&[&forms[a], &forms[b], &forms[c]]) == 2 {
                        relations.push(vec![((b, c), rat(1)), ((a, c), rat(-1)), ((a, b), rat(1))]);
                    }
                }
            }
        }
        QuadraticPresentation::new(names, relations)
    }

    /// `C_n(ℂ)`: hyperplanes `z_i = z_j`.
    pub fn braid(n: usize) -> Self {
        let mut names = Vec::new();
        let mut forms = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                names.push(format!("w{}{}", i + 1, j + 1));
                forms.push(difference(n, i, j, -1));
            }
        }
        QuadraticPresentation::arrangement(names, &forms).expect("braid arrangement")
    }

    /// `C_n^G(ℂ*)` for `G` of order 1 or 2 acting by `z ↦ ±z`: hyperplanes
    /// `z_i = 0` and `z_i = g·z_j`.
    pub fn punctured_plane(n: usize, group_order: u32) -> Self {
        assert!(group_order == 1 || group_order == 2, "real arrangements only");
        let mut names = Vec::new();
        let mut forms = Vec::new();
        for i in 0..n {
            names.push(format!("u{}", i + 1));
            let mut f = vec![0; n];
            f[i] = 1;
            forms.push(f);
        }
        for i in 0..n {
            for j in i + 1..n {
                names.push(format!("w{}{}", i + 1, j + 1));
                forms.push(difference(n, i, j, -1));
                if group_order == 2 {
                    names.push(format!("v{}{}", i + 1, j + 1));
                    forms.push(difference(n, i, j, 1));
                }
            }
        }
        QuadraticPresentation::arrangement(names, &forms).expect("real arrangement")
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relations(&self) -> &[SparseVec] {
        &self.relations
    }

    /// Relations as `(i, j, c)` triples with `i < j`.
    pub fn relation_terms(&self) -> Vec<Vec<(usize, usize, Rational)>> {
        let all = pairs(self.generators.len());
        self.relations
            .iter()
            .map(|v| v.iter().map(|(&k, c)| (all[k].0, all[k].1, c.clone())).collect())
            .collect()
    }

    fn algebra(&self, cap: usize) -> GcaPresentation {
        let gens = self.generators.iter().map(|g| Generator::new(g.clone(), 1)).collect();
        GcaPresentation::new(gens, cap as u32 + 1).expect("validated generators")
    }

    /// Hilbert series of `Λ(V)/(R)` up to `t^cap`.
    pub fn hilbert_series(&self, cap: usize) -> TruncatedPoly {
        let p = self.algebra(cap);
        let x: Vec<GcaElement> = self
            .generators
            .iter()
            .map(|g| p.named(g).expect("generator"))
            .collect();
        let all = pairs(self.generators.len());
        let relations: Vec<GcaElement> = self
            .relations
            .iter()
            .map(|v| {
                let mut e = GcaElement::zero();
                for (&k, c) in v {
                    let (i, j) = all[k];
                    e.add_scaled(c, &p.multiply(&x[i], &x[j]));
                }
                e
            })
            .collect();
        let mut dims = vec![BigInt::from(1)];
        for degree in 1..=cap {
            let basis = p.monomial_basis(degree as u32).expect("within truncation");
            if basis.is_empty() {
                break;
            }
            let mut ideal = RowSpace::new();
            if degree >= 2 && !relations.is_empty() {
                let index = GcaPresentation::basis_index(&basis);
                let lower = p.monomial_basis(degree as u32 - 2).expect("within truncation");
                for r in &relations {
                    for mono in &lower {
                        let e = p.multiply(r, &GcaElement::from_term(mono.clone(), rat(1)));
                        ideal.insert(p.coordinates(&e, &index));
                    }
                }
            }
            let dim = basis.len() - ideal.rank();
            dims.push(BigInt::from(dim));
            if dim == 0 {
                break;
            }
        }
        TruncatedPoly::from_coeffs(dims, cap)
    }

    /// Spanning set of the annihilator of `R` in `Λ²V*`, as `(i, j, c)`
    /// terms over pairs `i < j`; all of `Λ²V*` when there are no relations.
    fn dual_relations(&self) -> Vec<Vec<(usize, usize, Rational)>> {
        let m = self.generators.len();
        let all = pairs(m);
        if self.relations.is_empty() {
            return all.into_iter().map(|(i, j)| vec![(i, j, rat(1))]).collect();
        }
        let mut mat = RationalMatrix::zeros(self.relations.len(), all.len());
        for (row, v) in self.relations.iter().enumerate() {
            for (&k, c) in v {
                mat.set(row, k, c.clone());
            }
        }
        mat.kernel_basis()
            .into_iter()
            .map(|a| {
                a.into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| (all[k].0, all[k].1, c))
                    .collect()
            })
            .collect()
    }

    /// The holonomy Lie algebra: free on the dual generators modulo the
    /// annihilator of `R` in `Λ²V*`, read as brackets.
    pub fn holonomy(&self) -> LiePresentation {
        let relators = self.dual_relations().iter().map(|t| bracket_relator(t)).collect();
        LiePresentation::new(self.generators.clone(), relators).expect("degree-2 relators")
    }

    /// Hilbert series of the quadratic dual `A^! = T(V*)/(R^⊥)`, where
    /// `R^⊥` is spanned by the commutators `ξ_iξ_j - ξ_jξ_i` paired to zero
    /// against `R`. Counted from normal words of a truncated Gröbner basis.
    pub fn dual_hilbert_series(&self, cap: usize) -> Result<TruncatedPoly, CatalogError> {
        let generators: Vec<NcPoly> = self
            .dual_relations()
            .into_iter()
            .map(|terms| {
                let mut p = NcPoly::new();
                for (i, j, c) in terms {
                    p.insert(vec![i as u16, j as u16], c.clone());
                    p.insert(vec![j as u16, i as u16], -c);
                }
                p
            })
            .collect();
        let dims = quotient_dims(self.generators.len(), &generators, cap);
        Ok(TruncatedPoly::from_coeffs(dims.into_iter().map(BigInt::from), cap))
    }
}

fn difference(n: usize, i: usize, j: usize, sign: i64) -> Vec<i64> {
    let mut f = vec![0; n];
    f[i] = 1;
    f[j] = sign;
    f
}

fn bracket_relator(terms: &[(usize, usize, Rational)]) -> LieRelator {
    LieRelator {
        terms: terms
            .iter()
            .map(|(i, j, c)| (c.clone(), LieExpr::bracket(LieExpr::Generator(*i), LieExpr::Generator(*j))))
            .collect(),
    }
}

impl fmt::Display for QuadraticPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "generators: {}", self.generators.join(", "))?;
        for terms in self.relation_terms() {
            let parts: Vec<String> = terms
                .iter()
                .map(|(i, j, c)| format!("{}*{}*{}", crate::exactla::fmt_rational(c), self.generators[*i], self.generators[*j]))
                .collect();
            writeln!(f, "relation: {}", parts.join(" + "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KoszulReport {
    pub hilbert: TruncatedPoly,
    pub dual_hilbert: TruncatedPoly,
    /// `h_A(t) · h_{A^!}(-t)`.
    pub product: TruncatedPoly,
}

impl KoszulReport {
    /// Necessary for Koszulity, not sufficient.
    pub fn holds(&self) -> bool {
        self.product == TruncatedPoly::one(self.product.cap())
    }
}

pub const MAX_KOSZUL_CAP: usize = 8;

pub fn koszul_numeric_test(q: &QuadraticPresentation, cap: usize) -> Result<KoszulReport, CatalogError> {
    if cap > MAX_KOSZUL_CAP {
        return Err(CatalogError::CapTooLarge { cap, max: MAX_KOSZUL_CAP });
    }
    let hilbert = q.hilbert_series(cap);
    let dual_hilbert = q.dual_hilbert_series(cap)?;
    let product = hilbert.mul(&dual_hilbert.negate_variable());
    Ok(KoszulReport {
        hilbert,
        dual_hilbert,
        product,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(cs: &[i64], cap: usize) -> TruncatedPoly {
        TruncatedPoly::from_coeffs(cs.iter().map(|&c| BigInt::from(c)), cap)
    }

    /// `∏ (1 + e t)` over the exponents.
    fn factored(exponents: &[i64], cap: usize) -> TruncatedPoly {
        exponents.iter().fold(TruncatedPoly::one(cap), |acc, &e| acc.mul(&poly(&[1, e], cap)))
    }

    #[test]
    fn pair_indexing() {
        let m = 5;
        for (k, (i, j)) in pairs(m).into_iter().enumerate() {
            assert_eq!(pair_index(i, j, m), k);
        }
    }

    #[test]
    fn exterior_algebras() {
        let r = koszul_numeric_test(&QuadraticPresentation::exterior(2), 5).unwrap();
        assert_eq!(r.hilbert, poly(&[1, 2, 1], 5));
        assert_eq!(r.dual_hilbert, poly(&[1, 2, 3, 4, 5, 6], 5));
        assert!(r.holds());
        let r = koszul_numeric_test(&QuadraticPresentation::exterior(1), 5).unwrap();
        assert_eq!(r.hilbert, poly(&[1, 1], 5));
        assert_eq!(r.dual_hilbert, poly(&[1, 1, 1, 1, 1, 1], 5));
        assert!(r.holds());
    }

    #[test]
    fn braid_arrangements() {
        let c3 = QuadraticPresentation::braid(3);
        assert_eq!(c3.relations().len(), 1);
        let r = koszul_numeric_test(&c3, 5).unwrap();
        assert_eq!(r.hilbert, factored(&[1, 2], 5));
        assert!(r.holds());
        let c4 = QuadraticPresentation::braid(4);
        assert_eq!(c4.relations().len(), 4);
        assert_eq!(c4.hilbert_series(6), factored(&[1, 2, 3], 6));
    }

    #[test]
    fn punctured_planes() {
        assert_eq!(QuadraticPresentation::punctured_plane(3, 1).hilbert_series(6), factored(&[1, 2, 3], 6));
        assert_eq!(QuadraticPresentation::punctured_plane(3, 2).hilbert_series(6), factored(&[1, 3, 5], 6));
    }

    #[test]
    fn normalizes_relations() {
        let names = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let q = QuadraticPresentation::new(
            names.clone(),
            vec![
                vec![((1, 0), rat(1)), ((2, 2), rat(5))],
                vec![((0, 1), rat(-2))],
                vec![((0, 2), rat(1))],
            ],
        )
        .unwrap();
        assert_eq!(q.relations().len(), 2);
        assert!(QuadraticPresentation::new(vec!["a".into(), "a".into()], Vec::new()).is_err());
        assert!(QuadraticPresentation::new(names, vec![vec![((0, 3), rat(1))]]).is_err());
    }

    /// `U(h)` by PBW over the holonomy Lie algebra `h`.
    fn dual_via_holonomy(q: &QuadraticPresentation, cap: usize) -> TruncatedPoly {
        let lie = crate::gradedlie::presented_lie(&q.holonomy(), cap as u32).unwrap();
        let ranks: Vec<u64> = lie.dims().into_iter().map(|d| d as u64).collect();
        TruncatedPoly::lcs_product(&ranks, cap).inverse().unwrap()
    }

    #[test]
    fn dual_series_agree_with_enveloping_algebra() {
        let non_koszul = QuadraticPresentation::new(
            ["a", "b", "c", "d"].map(String::from).to_vec(),
            vec![vec![((0, 1), rat(1)), ((2, 3), rat(1))]],
        )
        .unwrap();
        let cases = [
            (QuadraticPresentation::exterior(3), 5),
            (QuadraticPresentation::new(["a", "b", "c"].map(String::from).to_vec(), Vec::new()).unwrap(), 5),
            (QuadraticPresentation::braid(3), 5),
            (QuadraticPresentation::braid(4), 3),
            (QuadraticPresentation::punctured_plane(2, 2), 4),
            (non_koszul, 4),
        ];
        for (q, cap) in cases {
            assert_eq!(q.dual_hilbert_series(cap).unwrap(), dual_via_holonomy(&q, cap), "{q}");
        }
    }

    #[test]
    fn braid4_is_numerically_koszul() {
        let r = koszul_numeric_test(&QuadraticPresentation::braid(4), 6).unwrap();
        assert_eq!(r.dual_hilbert, factored(&[1, 2, 3], 6).negate_variable().inverse().unwrap());
        assert!(r.holds());
    }

    #[test]
    fn non_koszul_numerics_are_detected() {
        // Λ(a,b,c,d)/(ab + cd): h_A = 1 + 4t + 5t², while 1/h_A(-t) has
        // t⁴-coefficient 41 (a_k = 4a_{k-1} - 5a_{k-2}); the holonomy
        // algebra is larger.
        let q = QuadraticPresentation::new(
            ["a", "b", "c", "d"].map(String::from).to_vec(),
            vec![vec![((0, 1), rat(1)), ((2, 3), rat(1))]],
        )
        .unwrap();
        let r = koszul_numeric_test(&q, 5).unwrap();
        assert_eq!(r.hilbert, poly(&[1, 4, 5], 5));
        assert_eq!(&r.dual_hilbert.coeffs()[..4], &poly(&[1, 4, 11, 24], 3).coeffs()[..]);
        assert!(!r.holds());
        assert_eq!(r.product.first_difference(&TruncatedPoly::one(5)), Some(4));
        assert!(koszul_numeric_test(&q, 9).is_err());
    }
}
