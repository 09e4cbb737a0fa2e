//! Minimal models of formal cdgas, built degree by degree.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use super::{project, SullivanAlgebra, SullivanError};
use crate::exactla::{axpy, fmt_rational, rat, RationalMatrix, RowSpace, SparseVec};
use crate::gca::{GcaElement, GcaPresentation, Generator};

/// A connected, finite-dimensional graded-commutative algebra given by a
/// basis of its positive-degree part and a multiplication table.
///
/// Degree 0 is `ℚ·1` and is not listed. Products not given are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyTable {
    labels: Vec<String>,
    degrees: Vec<u32>,
    products: BTreeMap<(usize, usize), SparseVec>,
}

impl CohomologyTable {
    /// `basis` lists `(label, degree)`; `products` gives `e_i * e_j` for
    /// basis indices. The opposite order is filled in by graded
    /// commutativity, and the whole table is checked for associativity.
    pub fn new(
        basis: Vec<(String, u32)>,
        products: Vec<((usize, usize), SparseVec)>,
    ) -> Result<Self, SullivanError> {
        let n = basis.len();
        let (labels, degrees): (Vec<String>, Vec<u32>) = basis.into_iter().unzip();
        if let Some(i) = degrees.iter().position(|&d| d == 0) {
            return Err(SullivanError::InvalidTable(format!(
                "`{}` has degree 0; degree 0 is spanned by the unit",
                labels[i]
            )));
        }
        let mut table: BTreeMap<(usize, usize), SparseVec> = BTreeMap::new();
        for ((i, j), v) in products {
            if i >= n || j >= n || v.keys().any(|&k| k >= n) {
                return Err(SullivanError::InvalidTable("basis index out of range".into()));
            }
            let v: SparseVec = v.into_iter().filter(|(_, c)| !c.is_zero()).collect();
            let target = degrees[i] + degrees[j];
            if let Some(&k) = v.keys().find(|&&k| degrees[k] != target) {
                return Err(SullivanError::InvalidTable(format!(
                    "{} * {} must lie in degree {}, but involves {}",
                    labels[i], labels[j], target, labels[k]
                )));
            }
            let sign = if degrees[i] * degrees[j] % 2 == 1 { rat(-1) } else { rat(1) };
            let swapped: SparseVec = v.iter().map(|(&k, c)| (k, c * &sign)).collect();
            for (key, value) in [((i, j), v), ((j, i), swapped)] {
                match table.get(&key) {
                    Some(existing) if *existing != value => {
                        return Err(SullivanError::InvalidTable(format!(
                            "{} * {} is given inconsistently with graded commutativity",
                            labels[key.0], labels[key.1]
                        )))
                    }
                    _ => {
                        if !value.is_empty() {
                            table.insert(key, value);
                        }
                    }
                }
            }
        }
        let t = CohomologyTable {
            labels,
            degrees,
            products: table,
        };
        t.check_associative()?;
        Ok(t)
    }

    /// Cohomology of a point.
    pub fn point() -> Self {
        CohomologyTable::new(Vec::new(), Vec::new()).expect("empty table")
    }

    /// `ℚ ⊕ ℚ·a` with `a` in the given degree and `a² = 0`.
    pub fn single_class(label: &str, degree: u32) -> Self {
        CohomologyTable::new(vec![(label.to_string(), degree)], Vec::new()).expect("one class")
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn products(&self) -> &BTreeMap<(usize, usize), SparseVec> {
        &self.products
    }

    pub fn basis_of_degree(&self, degree: u32) -> Vec<usize> {
        (0..self.labels.len()).filter(|&i| self.degrees[i] == degree).collect()
    }

    pub fn dim(&self, degree: u32) -> usize {
        if degree == 0 {
            1
        } else {
            self.basis_of_degree(degree).len()
        }
    }

    pub fn top_degree(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    fn multiply_basis(&self, i: usize, j: usize) -> SparseVec {
        self.products.get(&(i, j)).cloned().unwrap_or_default()
    }

    /// Product of two positive-degree vectors.
    pub fn multiply(&self, u: &SparseVec, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (&i, a) in u {
            for (&j, b) in v {
                axpy(&mut out, &(a * b), &self.multiply_basis(i, j));
            }
        }
        out
    }

    fn check_associative(&self) -> Result<(), SullivanError> {
        let n = self.labels.len();
        let unit = |i: usize| -> SparseVec { [(i, rat(1))].into_iter().collect() };
        for i in 0..n {
            for j in 0..n {
                let ij = self.multiply_basis(i, j);
                for k in 0..n {
                    let left = self.multiply(&ij, &unit(k));
                    let right = self.multiply(&unit(i), &self.multiply_basis(j, k));
                    if left != right {
                        return Err(SullivanError::InvalidTable(format!(
                            "product is not associative on ({}, {}, {})",
                            self.labels[i], self.labels[j], self.labels[k]
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A minimal Sullivan algebra with a map to a cohomology table, built so
/// that the map is an isomorphism in cohomology through degree `cap - 1`
/// and injective in degree `cap`.
#[derive(Debug, Clone)]
pub struct MinimalModel {
    pub model: SullivanAlgebra,
    pub table: CohomologyTable,
    /// Image of each model generator in the table.
    pub images: Vec<SparseVec>,
    pub cap: u32,
    /// `false` if some degree needed more rounds of kernel-killing than the
    /// builder allows. Only degree-1 towers can fail to stabilize.
    pub converged: bool,
}

impl MinimalModel {
    /// Image of an element of the model in the table; the constant term is
    /// dropped.
    pub fn map_element(&self, e: &GcaElement) -> SparseVec {
        map_into_table(&self.table, &self.images, e)
    }

    /// Matrix of `H^degree(model) -> H^degree(table)`, columns indexed by
    /// the cohomology representatives of the model.
    pub fn induced_map(&self, degree: u32) -> Result<RationalMatrix, SullivanError> {
        let coh = self.model.algebra().cohomology(degree)?;
        let targets = self.table.basis_of_degree(degree);
        let mut mat = RationalMatrix::zeros(targets.len(), coh.dim());
        for (j, r) in coh.representatives.iter().enumerate() {
            for (k, c) in self.map_element(r) {
                let row = targets.iter().position(|&t| t == k).expect("homogeneous image");
                mat.set(row, j, c);
            }
        }
        Ok(mat)
    }

    /// Re-checks the defining property with fresh cohomology computations.
    pub fn verify(&self) -> Result<bool, SullivanError> {
        if !self.model.check_minimal() {
            return Ok(false);
        }
        for k in 1..=self.cap {
            let m = self.induced_map(k)?;
            let injective = m.rank() == m.cols();
            let surjective = m.rank() == m.rows();
            if !injective || (k < self.cap && !surjective) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for MinimalModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.model.algebra();
        for (i, g) in p.generators().iter().enumerate() {
            let image: Vec<String> = self.images[i]
                .iter()
                .map(|(&k, c)| format!("{}*{}", fmt_rational(c), self.table.labels[k]))
                .collect();
            let image = if image.is_empty() { "0".to_string() } else { image.join(" + ") };
            writeln!(
                f,
                "{} (degree {}): d = {}, maps to {}",
                g.name,
                g.degree,
                p.format_element(p.d_of(i)),
                image
            )?;
        }
        Ok(())
    }
}

fn map_into_table(table: &CohomologyTable, images: &[SparseVec], e: &GcaElement) -> SparseVec {
    let mut out = SparseVec::new();
    for (m, c) in e.terms() {
        if m.is_one() {
            continue;
        }
        let mut value: Option<SparseVec> = None;
        for (i, &exp) in m.exponents().iter().enumerate() {
            for _ in 0..exp {
                value = Some(match value {
                    None => images[i].clone(),
                    Some(v) => table.multiply(&v, &images[i]),
                });
            }
        }
        axpy(&mut out, c, &value.unwrap_or_default());
    }
    out
}

/// Generators added so far, with their differentials and images, keyed by
/// name so the presentation can be rebuilt in canonical order.
struct Builder {
    truncation: u32,
    generators: Vec<Generator>,
    differentials: Vec<(String, GcaElement, GcaPresentation)>,
    images: BTreeMap<String, SparseVec>,
    current: GcaPresentation,
}

impl Builder {
    fn add(&mut self, new: Vec<(Generator, GcaElement, SparseVec)>) -> Result<(), SullivanError> {
        for (g, d, image) in new {
            self.images.insert(g.name.clone(), image);
            self.differentials.push((g.name.clone(), d, self.current.clone()));
            self.generators.push(g);
        }
        let mut p = GcaPresentation::new(self.generators.clone(), self.truncation)?;
        for (name, d, home) in &self.differentials {
            let image = project(home, &p, d);
            p.set_differential(name, image)?;
        }
        self.current = p;
        Ok(())
    }

    fn images(&self) -> Vec<SparseVec> {
        self.current
            .generators()
            .iter()
            .map(|g| self.images[&g.name].clone())
            .collect()
    }
}

/// Minimal model of a formal cdga `(H, 0)`.
///
/// For `k = 1, ..., cap-1`: closed degree-`k` generators are added for a
/// complement of the image of `H^k`, then degree-`k` generators are added to
/// kill the kernel of `H^{k+1}`, repeating while new kernel appears.
pub fn build_minimal_model(table: &CohomologyTable, cap: u32) -> Result<MinimalModel, SullivanError> {
    if cap < 2 {
        return Err(SullivanError::CapTooSmall(cap));
    }
    let truncation = cap + 1;
    let max_rounds = cap as usize;
    let mut b = Builder {
        truncation,
        generators: Vec::new(),
        differentials: Vec::new(),
        images: BTreeMap::new(),
        current: GcaPresentation::new(Vec::new(), truncation)?,
    };
    let mut converged = true;

    for k in 1..cap {
        let targets = table.basis_of_degree(k);
        let coh = b.current.cohomology(k)?;
        let images = b.images();
        let mut span = RowSpace::new();
        for r in &coh.representatives {
            span.insert(map_into_table(table, &images, r));
        }
        let mut closed = Vec::new();
        for &t in &targets {
            let e: SparseVec = [(t, rat(1))].into_iter().collect();
            if span.insert(e.clone()) {
                let name = format!("x{}_{}", k, closed.len() + 1 + b.count_named('x', k));
                closed.push((Generator::new(name, k), GcaElement::zero(), e));
            }
        }
        b.add(closed)?;

        let mut round = 0;
        loop {
            let coh = b.current.cohomology(k + 1)?;
            let images = b.images();
            let rows = table.basis_of_degree(k + 1);
            let mut mat = RationalMatrix::zeros(rows.len(), coh.dim());
            for (j, r) in coh.representatives.iter().enumerate() {
                for (t, c) in map_into_table(table, &images, r) {
                    let row = rows.iter().position(|&x| x == t).expect("homogeneous image");
                    mat.set(row, j, c);
                }
            }
            let kernel = mat.kernel_basis();
            if kernel.is_empty() {
                break;
            }
            if round == max_rounds {
                converged = false;
                break;
            }
            let start = b.count_named('y', k);
            let killers = kernel
                .iter()
                .enumerate()
                .map(|(n, v)| {
                    let mut z = GcaElement::zero();
                    for (j, c) in v.iter().enumerate() {
                        z.add_scaled(c, &coh.representatives[j]);
                    }
                    (Generator::new(format!("y{}_{}", k, start + n + 1), k), z, SparseVec::new())
                })
                .collect();
            b.add(killers)?;
            round += 1;
        }
    }

    let images = b.images();
    let model = SullivanAlgebra::new(b.current)?;
    Ok(MinimalModel {
        model,
        table: table.clone(),
        images,
        cap,
        converged,
    })
}

impl Builder {
    fn count_named(&self, prefix: char, degree: u32) -> usize {
        self.generators
            .iter()
            .filter(|g| g.degree == degree && g.name.starts_with(prefix))
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sullivan::PsiSpace;

    fn unit_vector(i: usize) -> SparseVec {
        [(i, rat(1))].into_iter().collect()
    }

    #[test]
    fn sphere_model() {
        let m = build_minimal_model(&CohomologyTable::single_class("a", 2), 7).unwrap();
        let p = m.model.algebra();
        let degrees: Vec<u32> = p.generators().iter().map(|g| g.degree).collect();
        assert_eq!(degrees, vec![2, 3]);
        let x2 = p.power(&p.generator_element(0), 2);
        let dy = p.d_of(1);
        let c = dy.coefficient(x2.terms().keys().next().unwrap());
        assert!(!c.is_zero());
        assert_eq!(*dy, x2.scale(&c));
        assert!(m.model.check_minimal());
        assert_eq!(m.model.psi_space(), PsiSpace::from_pairs(&[(2, 1), (3, 1)]));
        assert!(m.converged);
        assert!(m.verify().unwrap());
    }

    #[test]
    fn point_and_odd_class() {
        let m = build_minimal_model(&CohomologyTable::point(), 5).unwrap();
        assert_eq!(m.model.algebra().num_generators(), 0);
        let z = build_minimal_model(&CohomologyTable::single_class("b", 3), 7).unwrap();
        assert_eq!(z.model.algebra().num_generators(), 1);
        assert_eq!(z.model.algebra().generator(0).degree, 3);
        assert!(z.model.algebra().d_of(0).is_zero());
        assert!(z.verify().unwrap());
    }

    #[test]
    fn torus_and_product_of_spheres() {
        let torus = CohomologyTable::new(
            vec![("a".into(), 1), ("b".into(), 1), ("ab".into(), 2)],
            vec![((0, 1), unit_vector(2))],
        )
        .unwrap();
        let m = build_minimal_model(&torus, 5).unwrap();
        assert_eq!(m.model.algebra().num_generators(), 2);
        assert!(m.verify().unwrap());

        let s2s2 = CohomologyTable::new(
            vec![("a".into(), 2), ("b".into(), 2), ("ab".into(), 4)],
            vec![((0, 1), unit_vector(2))],
        )
        .unwrap();
        let m = build_minimal_model(&s2s2, 6).unwrap();
        let psi = m.model.psi_space();
        assert_eq!(psi, PsiSpace::from_pairs(&[(2, 2), (3, 2)]));
        assert!(m.verify().unwrap());
    }

    #[test]
    fn wedge_of_circles_tower_is_cut_off() {
        let wedge = CohomologyTable::new(vec![("a".into(), 1), ("b".into(), 1)], Vec::new()).unwrap();
        let m = build_minimal_model(&wedge, 3).unwrap();
        assert!(!m.converged);
        assert!(m.model.check_minimal());
    }

    #[test]
    fn rejects_bad_tables() {
        assert_eq!(
            build_minimal_model(&CohomologyTable::point(), 1).unwrap_err(),
            SullivanError::CapTooSmall(1)
        );
        // a*b = c with a, b odd forces b*a = -c.
        let bad = CohomologyTable::new(
            vec![("a".into(), 1), ("b".into(), 1), ("c".into(), 2)],
            vec![((0, 1), unit_vector(2)), ((1, 0), unit_vector(2))],
        );
        assert!(matches!(bad, Err(SullivanError::InvalidTable(_))));
        let wrong_degree = CohomologyTable::new(
            vec![("a".into(), 2), ("c".into(), 3)],
            vec![((0, 0), unit_vector(1))],
        );
        assert!(matches!(wrong_degree, Err(SullivanError::InvalidTable(_))));
        // (x*y)*z = u*z = w but x*(y*z) = 0.
        let nonassoc = CohomologyTable::new(
            vec![("x".into(), 2), ("y".into(), 2), ("z".into(), 2), ("u".into(), 4), ("w".into(), 6)],
            vec![((0, 1), unit_vector(3)), ((3, 2), unit_vector(4))],
        );
        assert!(matches!(nonassoc, Err(SullivanError::InvalidTable(m)) if m.contains("associative")));
    }
}
