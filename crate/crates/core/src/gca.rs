//! Free graded-commutative algebras on named generators, truncated above a
//! fixed degree, with derivations of degree +1.
//!
//! Generators are stored in canonical `(degree, name)` order. A monomial is an
//! exponent vector over that order; odd generators have exponent at most 1.
//! Reordering factors into canonical order produces the Koszul sign, which is
//! absorbed into the coefficient.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactla::{fmt_rational, Rational, RationalMatrix, RowSpace, SparseVec};

pub const DEFAULT_TRUNCATION: u32 = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GcaError {
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("generator `{0}` must have degree at least 1")]
    ZeroDegree(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("generator `{name}` of degree {degree} does not fit below truncation degree {truncation}")]
    GeneratorAboveTruncation { name: String, degree: u32, truncation: u32 },
    #[error("degree {degree} is outside the range 0..={limit}")]
    DegreeOutOfRange { degree: u32, limit: u32 },
    #[error("d({generator}) must be homogeneous of degree {expected}, found a term of degree {found}")]
    InhomogeneousImage { generator: String, expected: u32, found: u32 },
    #[error("d(d({0})) is nonzero: {1}")]
    DSquaredNonzero(String, String),
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: u32) -> Self {
        Generator {
            name: name.into(),
            degree,
        }
    }
}

/// Exponent vector indexed by the canonical generator order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(num_generators: usize) -> Self {
        Monomial(vec![0; num_generators])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, index: usize) -> u32 {
        self.0[index]
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Number of generator factors counted with multiplicity.
    pub fn length(&self) -> u32 {
        self.0.iter().sum()
    }

    /// The single generator this monomial equals, if it is linear.
    pub fn as_generator(&self) -> Option<usize> {
        if self.length() != 1 {
            return None;
        }
        self.0.iter().position(|&e| e == 1)
    }

    pub fn involves_any(&self, indices: &[usize]) -> bool {
        indices.iter().any(|&i| self.0[i] > 0)
    }
}

/// Linear combination of monomials with nonzero rational coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GcaElement {
    terms: BTreeMap<Monomial, Rational>,
}

impl GcaElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_term(m: Monomial, c: Rational) -> Self {
        let mut e = Self::zero();
        e.add_term(m, c);
        e
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, c: &Rational, other: &GcaElement) {
        if c.is_zero() {
            return;
        }
        for (m, x) in &other.terms {
            self.add_term(m.clone(), c * x);
        }
    }

    pub fn add(&self, other: &GcaElement) -> GcaElement {
        let mut out = self.clone();
        out.add_scaled(&Rational::one(), other);
        out
    }

    pub fn sub(&self, other: &GcaElement) -> GcaElement {
        let mut out = self.clone();
        out.add_scaled(&-Rational::one(), other);
        out
    }

    pub fn scale(&self, c: &Rational) -> GcaElement {
        let mut out = GcaElement::zero();
        out.add_scaled(c, self);
        out
    }

    pub fn retain(&self, mut keep: impl FnMut(&Monomial) -> bool) -> GcaElement {
        GcaElement {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }
}

/// A free graded-commutative algebra with a degree +1 derivation, truncated
/// above `truncation` degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GcaPresentation {
    generators: Vec<Generator>,
    differential: Vec<GcaElement>,
    truncation: u32,
    index: HashMap<String, usize>,
}

impl GcaPresentation {
    /// Free algebra with zero differential. Generators are sorted into
    /// canonical order; each must satisfy `degree + 1 <= truncation` so its
    /// differential lies inside the truncation window.
    pub fn new(mut generators: Vec<Generator>, truncation: u32) -> Result<Self, GcaError> {
        generators.sort_by(|a, b| (a.degree, &a.name).cmp(&(b.degree, &b.name)));
        let mut index = HashMap::new();
        for (i, g) in generators.iter().enumerate() {
            if g.degree == 0 {
                return Err(GcaError::ZeroDegree(g.name.clone()));
            }
            if g.degree + 1 > truncation {
                return Err(GcaError::GeneratorAboveTruncation {
                    name: g.name.clone(),
                    degree: g.degree,
                    truncation,
                });
            }
            if index.insert(g.name.clone(), i).is_some() {
                return Err(GcaError::DuplicateGenerator(g.name.clone()));
            }
        }
        let n = generators.len();
        Ok(GcaPresentation {
            generators,
            differential: vec![GcaElement::zero(); n],
            truncation,
            index,
        })
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn generator(&self, index: usize) -> &Generator {
        &self.generators[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    fn require_index(&self, name: &str) -> Result<usize, GcaError> {
        self.index_of(name)
            .ok_or_else(|| GcaError::UnknownGenerator(name.to_string()))
    }

    pub fn is_odd(&self, index: usize) -> bool {
        self.generators[index].degree % 2 == 1
    }

    pub fn generators_of_degree(&self, degree: u32) -> Vec<usize> {
        (0..self.generators.len())
            .filter(|&i| self.generators[i].degree == degree)
            .collect()
    }

    pub fn max_generator_degree(&self) -> u32 {
        self.generators.iter().map(|g| g.degree).max().unwrap_or(0)
    }

    /// Image of the generator under the differential.
    pub fn d_of(&self, index: usize) -> &GcaElement {
        &self.differential[index]
    }

    /// Sets `d(name) = image`, checking that the image is homogeneous of
    /// degree `deg(name) + 1`.
    pub fn set_differential(&mut self, name: &str, image: GcaElement) -> Result<(), GcaError> {
        let i = self.require_index(name)?;
        let expected = self.generators[i].degree + 1;
        for m in image.terms().keys() {
            let found = self.monomial_degree(m);
            if found != expected {
                return Err(GcaError::InhomogeneousImage {
                    generator: name.to_string(),
                    expected,
                    found,
                });
            }
        }
        self.differential[i] = image;
        Ok(())
    }

    /// Checks `d(d(g)) = 0` for every generator whose second differential
    /// lands inside the truncation window. Since `d²` is a derivation this
    /// covers every monomial in that range.
    pub fn validate(&self) -> Result<(), GcaError> {
        for (i, g) in self.generators.iter().enumerate() {
            if g.degree + 2 > self.truncation {
                continue;
            }
            let dd = self.apply_differential(&self.differential[i]);
            if !dd.is_zero() {
                return Err(GcaError::DSquaredNonzero(g.name.clone(), self.format_element(&dd)));
            }
        }
        Ok(())
    }

    /// Copy of this presentation with the differential set to zero.
    pub fn with_zero_differential(&self) -> GcaPresentation {
        let mut p = self.clone();
        p.differential = vec![GcaElement::zero(); p.generators.len()];
        p
    }

    pub fn monomial_degree(&self, m: &Monomial) -> u32 {
        m.0.iter()
            .zip(&self.generators)
            .map(|(e, g)| e * g.degree)
            .sum()
    }

    /// Degree of a homogeneous element; `None` for zero or inhomogeneous.
    pub fn element_degree(&self, e: &GcaElement) -> Option<u32> {
        let mut degrees = e.terms().keys().map(|m| self.monomial_degree(m));
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn one(&self) -> GcaElement {
        GcaElement::from_term(Monomial::one(self.generators.len()), Rational::one())
    }

    pub fn generator_monomial(&self, index: usize) -> Monomial {
        let mut m = Monomial::one(self.generators.len());
        m.0[index] = 1;
        m
    }

    pub fn generator_element(&self, index: usize) -> GcaElement {
        GcaElement::from_term(self.generator_monomial(index), Rational::one())
    }

    pub fn named(&self, name: &str) -> Result<GcaElement, GcaError> {
        Ok(self.generator_element(self.require_index(name)?))
    }

    /// Canonical monomials of the given degree, in a fixed deterministic
    /// order (lexicographic on exponent vectors, descending from the first
    /// generator).
    pub fn monomial_basis(&self, degree: u32) -> Result<Vec<Monomial>, GcaError> {
        if degree > self.truncation {
            return Err(GcaError::DegreeOutOfRange {
                degree,
                limit: self.truncation,
            });
        }
        Ok(self.basis_unchecked(degree))
    }

    fn basis_unchecked(&self, degree: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut current = vec![0u32; self.generators.len()];
        self.enumerate(0, degree, &mut current, &mut out);
        out
    }

    fn enumerate(&self, i: usize, remaining: u32, current: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if remaining == 0 {
            out.push(Monomial(current.clone()));
            return;
        }
        if i == self.generators.len() {
            return;
        }
        let deg = self.generators[i].degree;
        let max_exp = if self.is_odd(i) { 1 } else { remaining / deg };
        for e in (0..=max_exp.min(remaining / deg)).rev() {
            current[i] = e;
            self.enumerate(i + 1, remaining - e * deg, current, out);
        }
        current[i] = 0;
    }

    /// Product of two monomials with its Koszul sign, or `None` if an odd
    /// generator would be squared.
    pub fn multiply_monomials(&self, a: &Monomial, b: &Monomial) -> Option<(Monomial, bool)> {
        let mut negative = false;
        let mut odd_in_a_after = 0u32;
        // Walk from the last generator down, counting odd factors of `a` that
        // each odd factor of `b` has to move past.
        for i in (0..self.generators.len()).rev() {
            if self.is_odd(i) {
                if a.0[i] > 0 && b.0[i] > 0 {
                    return None;
                }
                if b.0[i] > 0 && odd_in_a_after % 2 == 1 {
                    negative = !negative;
                }
                if a.0[i] > 0 {
                    odd_in_a_after += 1;
                }
            }
        }
        let exps = a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect();
        Some((Monomial(exps), negative))
    }

    /// Product together with a flag reporting whether terms above the
    /// truncation degree were dropped.
    pub fn multiply_flagged(&self, a: &GcaElement, b: &GcaElement) -> (GcaElement, bool) {
        let mut out = GcaElement::zero();
        let mut overflow = false;
        for (ma, ca) in a.terms() {
            let da = self.monomial_degree(ma);
            for (mb, cb) in b.terms() {
                if da + self.monomial_degree(mb) > self.truncation {
                    overflow = true;
                    continue;
                }
                if let Some((m, neg)) = self.multiply_monomials(ma, mb) {
                    let c = ca * cb;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        (out, overflow)
    }

    pub fn multiply(&self, a: &GcaElement, b: &GcaElement) -> GcaElement {
        self.multiply_flagged(a, b).0
    }

    pub fn power(&self, a: &GcaElement, k: u32) -> GcaElement {
        (0..k).fold(self.one(), |acc, _| self.multiply(&acc, a))
    }

    /// Extends the generator images to the whole algebra by the signed
    /// Leibniz rule.
    pub fn apply_differential(&self, e: &GcaElement) -> GcaElement {
        let mut out = GcaElement::zero();
        for (m, c) in e.terms() {
            out.add_scaled(c, &self.d_monomial(m));
        }
        out
    }

    fn d_monomial(&self, m: &Monomial) -> GcaElement {
        let n = self.generators.len();
        let mut out = GcaElement::zero();
        let mut prefix = Monomial::one(n);
        let mut prefix_degree = 0u32;
        for i in 0..n {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            if !self.differential[i].is_zero() {
                let mut rest = m.clone();
                for j in 0..=i {
                    rest.0[j] = 0;
                }
                rest.0[i] = e - 1;
                let left = GcaElement::from_term(prefix.clone(), Rational::one());
                let right = GcaElement::from_term(rest, Rational::one());
                let term = self.multiply(&self.multiply(&left, &self.differential[i]), &right);
                let mut coeff = Rational::from_integer(e.into());
                if prefix_degree % 2 == 1 {
                    coeff = -coeff;
                }
                out.add_scaled(&coeff, &term);
            }
            prefix.0[i] = e;
            prefix_degree += e * self.generators[i].degree;
        }
        out
    }

    /// Coordinates of a homogeneous element in the monomial basis of `degree`.
    pub fn coordinates(&self, e: &GcaElement, basis_index: &HashMap<Monomial, usize>) -> SparseVec {
        e.terms()
            .iter()
            .map(|(m, c)| (basis_index[m], c.clone()))
            .collect()
    }

    pub fn basis_index(basis: &[Monomial]) -> HashMap<Monomial, usize> {
        basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect()
    }

    /// Matrix of `d: A^degree -> A^{degree+1}` in the monomial bases.
    pub fn differential_matrix(&self, degree: u32) -> Result<RationalMatrix, GcaError> {
        if degree + 1 > self.truncation {
            return Err(GcaError::DegreeOutOfRange {
                degree,
                limit: self.truncation.saturating_sub(1),
            });
        }
        let source = self.basis_unchecked(degree);
        let target = self.basis_unchecked(degree + 1);
        let target_index = Self::basis_index(&target);
        let mut mat = RationalMatrix::zeros(target.len(), source.len());
        for (j, m) in source.iter().enumerate() {
            let image = self.d_monomial(m);
            for (tm, c) in image.terms() {
                mat.set(target_index[tm], j, c.clone());
            }
        }
        Ok(mat)
    }

    /// Images of the degree-`degree` basis monomials under `d`, as sparse
    /// coordinate vectors in the degree-`degree+1` basis.
    pub fn differential_columns(&self, degree: u32) -> Result<(Vec<Monomial>, Vec<SparseVec>), GcaError> {
        if degree + 1 > self.truncation {
            return Err(GcaError::DegreeOutOfRange {
                degree,
                limit: self.truncation.saturating_sub(1),
            });
        }
        let source = self.basis_unchecked(degree);
        let target_index = Self::basis_index(&self.basis_unchecked(degree + 1));
        let columns = source
            .iter()
            .map(|m| self.coordinates(&self.d_monomial(m), &target_index))
            .collect();
        Ok((source, columns))
    }

    /// Degree-`degree` cohomology: its dimension and a basis of representing
    /// cocycles. Requires `degree + 1 <= truncation`.
    pub fn cohomology(&self, degree: u32) -> Result<Cohomology, GcaError> {
        let (basis, columns) = self.differential_columns(degree)?;

        // Kernel of d: each column dependent on earlier ones yields one
        // kernel vector.
        let mut image = RowSpace::new();
        let mut inserted_columns = Vec::new();
        let mut kernel: Vec<SparseVec> = Vec::new();
        for (j, col) in columns.into_iter().enumerate() {
            match image.express(&col) {
                Some(comb) => {
                    let mut v: SparseVec = comb
                        .into_iter()
                        .map(|(id, c)| (inserted_columns[id], -c))
                        .collect();
                    v.insert(j, Rational::one());
                    kernel.push(v);
                }
                None => {
                    image.insert(col);
                    inserted_columns.push(j);
                }
            }
        }

        let mut space = RowSpace::new();
        if degree > 0 {
            for col in self.differential_columns(degree - 1)?.1 {
                space.insert(col);
            }
        }
        let boundary_rank = space.rank();
        let mut representatives = Vec::new();
        for v in kernel {
            if space.insert(v.clone()) {
                let mut e = GcaElement::zero();
                for (i, c) in v {
                    e.add_term(basis[i].clone(), c);
                }
                representatives.push(e);
            }
        }
        Ok(Cohomology {
            degree,
            cocycle_dim: boundary_rank + representatives.len(),
            boundary_rank,
            representatives,
        })
    }

    /// `dim H^degree` alone. Unlike [`Self::cohomology`] it never enumerates
    /// the degree-`degree+1` basis: images are indexed as they appear, which
    /// matters when there are hundreds of degree-1 generators.
    pub fn cohomology_dim(&self, degree: u32) -> Result<usize, GcaError> {
        if degree + 1 > self.truncation {
            return Err(GcaError::DegreeOutOfRange {
                degree,
                limit: self.truncation.saturating_sub(1),
            });
        }
        let rank = |d: u32| -> usize {
            let mut index: HashMap<Monomial, usize> = HashMap::new();
            let mut image = RowSpace::new();
            for m in self.basis_unchecked(d) {
                let v: SparseVec = self
                    .d_monomial(&m)
                    .terms()
                    .iter()
                    .map(|(t, c)| {
                        let next = index.len();
                        (*index.entry(t.clone()).or_insert(next), c.clone())
                    })
                    .collect();
                image.insert(v);
            }
            image.rank()
        };
        let dim = self.basis_unchecked(degree).len();
        let boundaries = if degree > 0 { rank(degree - 1) } else { 0 };
        Ok(dim - rank(degree) - boundaries)
    }

    /// Linear part of a homogeneous element, as coordinates over generator
    /// indices.
    pub fn linear_part(&self, e: &GcaElement) -> SparseVec {
        e.terms()
            .iter()
            .filter_map(|(m, c)| m.as_generator().map(|i| (i, c.clone())))
            .collect()
    }

    /// The complex of indecomposables: generators of each degree, and the
    /// linear part of `d` between consecutive degrees.
    pub fn indecomposables(&self) -> Indecomposables {
        let mut generators_by_degree = BTreeMap::new();
        for d in 1..=self.max_generator_degree() + 1 {
            generators_by_degree.insert(d, self.generators_of_degree(d));
        }
        let mut maps = BTreeMap::new();
        for d in 1..=self.max_generator_degree() {
            let source = &generators_by_degree[&d];
            let target = &generators_by_degree[&(d + 1)];
            let position: HashMap<usize, usize> =
                target.iter().enumerate().map(|(k, &g)| (g, k)).collect();
            let mut mat = RationalMatrix::zeros(target.len(), source.len());
            for (j, &g) in source.iter().enumerate() {
                for (i, c) in self.linear_part(&self.differential[g]) {
                    mat.set(position[&i], j, c);
                }
            }
            maps.insert(d, mat);
        }
        Indecomposables {
            generators_by_degree,
            maps,
        }
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        let mut parts = Vec::new();
        for (i, &e) in m.0.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(self.generators[i].name.clone()),
                _ => parts.push(format!("{}^{}", self.generators[i].name, e)),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    /// Renders an element as `c*m + ...` with terms in descending monomial
    /// order, matching the grammar accepted by [`GcaPresentation::parse_element`].
    pub fn format_element(&self, e: &GcaElement) -> String {
        if e.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in e.terms().iter().rev().enumerate() {
            let negative = c.is_negative();
            if k == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let a = c.abs();
            let mono = self.format_monomial(m);
            if m.is_one() {
                out.push_str(&fmt_rational(&a));
            } else if a.is_one() {
                out.push_str(&mono);
            } else {
                let _ = write!(out, "{}*{}", fmt_rational(&a), mono);
            }
        }
        out
    }

    /// Parses a polynomial expression such as `x^2 - 1/2*a*b + 3 c`.
    ///
    /// Factors are multiplied in the order written, so `b*a` with both odd
    /// equals `-a*b`. Juxtaposition and `*` both denote multiplication.
    pub fn parse_element(&self, text: &str) -> Result<GcaElement, GcaError> {
        ExprParser {
            p: self,
            src: text.as_bytes(),
            pos: 0,
        }
        .parse()
    }
}

#[derive(Debug, Clone)]
pub struct Cohomology {
    pub degree: u32,
    pub cocycle_dim: usize,
    pub boundary_rank: usize,
    pub representatives: Vec<GcaElement>,
}

impl Cohomology {
    pub fn dim(&self) -> usize {
        self.representatives.len()
    }
}

/// The complex `(Q(A), Q(d))` of a free presentation.
#[derive(Debug, Clone)]
pub struct Indecomposables {
    pub generators_by_degree: BTreeMap<u32, Vec<usize>>,
    /// `maps[k]` is the matrix of `Q(d)` from degree `k` to degree `k+1`.
    pub maps: BTreeMap<u32, RationalMatrix>,
}

impl Indecomposables {
    pub fn is_zero(&self) -> bool {
        self.maps.values().all(RationalMatrix::is_zero)
    }

    /// Dimension of `H^k(Q(A))`.
    pub fn cohomology_dim(&self, degree: u32) -> usize {
        let dim = self.generators_by_degree.get(&degree).map_or(0, Vec::len);
        let out_rank = self.maps.get(&degree).map_or(0, RationalMatrix::rank);
        let in_rank = if degree > 1 {
            self.maps.get(&(degree - 1)).map_or(0, RationalMatrix::rank)
        } else {
            0
        };
        dim - out_rank - in_rank
    }
}

struct ExprParser<'a> {
    p: &'a GcaPresentation,
    src: &'a [u8],
    pos: usize,
}

impl ExprParser<'_> {
    fn error(&self, message: impl Into<String>) -> GcaError {
        GcaError::Parse {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<GcaElement, GcaError> {
        let mut total = GcaElement::zero();
        let mut first = true;
        loop {
            let sign = match self.peek() {
                None if first => return Err(self.error("empty expression")),
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    Rational::one()
                }
                Some(b'-') => {
                    self.pos += 1;
                    -Rational::one()
                }
                Some(_) if first => Rational::one(),
                Some(c) => return Err(self.error(format!("expected `+` or `-`, found `{}`", c as char))),
            };
            first = false;
            let term = self.term()?;
            total.add_scaled(&sign, &term);
        }
        Ok(total)
    }

    fn term(&mut self) -> Result<GcaElement, GcaError> {
        let mut acc = self.p.one();
        let mut factors = 0;
        loop {
            match self.peek() {
                Some(b'*') if factors > 0 => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = self.p.multiply(&acc, &f);
                }
                Some(c) if c.is_ascii_alphanumeric() || c == b'_' => {
                    let f = self.factor()?;
                    acc = self.p.multiply(&acc, &f);
                }
                _ => break,
            }
            factors += 1;
        }
        if factors == 0 {
            return Err(self.error("expected a term"));
        }
        Ok(acc)
    }

    fn number(&mut self) -> Result<u64, GcaError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| GcaError::Parse {
                offset: start,
                message: "invalid number".into(),
            })
    }

    fn factor(&mut self) -> Result<GcaElement, GcaError> {
        let c = self.peek().ok_or_else(|| self.error("expected a factor"))?;
        if c.is_ascii_digit() {
            let n = self.number()?;
            let mut q = Rational::from_integer(n.into());
            if self.src.get(self.pos) == Some(&b'/') {
                self.pos += 1;
                let den = self.number()?;
                if den == 0 {
                    return Err(self.error("zero denominator"));
                }
                q /= Rational::from_integer(den.into());
            }
            return Ok(self.p.one().scale(&q));
        }
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || matches!(self.src[self.pos], b'_' | b'\''))
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error(format!("unexpected character `{}`", c as char)));
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let index = self.p.index_of(name).ok_or_else(|| GcaError::Parse {
            offset: start,
            message: format!("unknown generator `{name}`"),
        })?;
        let g = self.p.generator_element(index);
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.number()?;
            return Ok(self.p.power(&g, e as u32));
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::rat;
    use proptest::prelude::*;

    fn sphere() -> GcaPresentation {
        let mut p = GcaPresentation::new(vec![Generator::new("x", 2), Generator::new("y", 3)], 8).unwrap();
        let x2 = p.parse_element("x^2").unwrap();
        p.set_differential("y", x2).unwrap();
        p.validate().unwrap();
        p
    }

    fn free(gens: &[(&str, u32)], truncation: u32) -> GcaPresentation {
        GcaPresentation::new(gens.iter().map(|&(n, d)| Generator::new(n, d)).collect(), truncation).unwrap()
    }

    #[test]
    fn monomial_basis_examples() {
        let p = sphere();
        assert_eq!(p.monomial_basis(0).unwrap().len(), 1);
        let deg6 = p.monomial_basis(6).unwrap();
        assert_eq!(deg6.len(), 1);
        assert_eq!(p.format_monomial(&deg6[0]), "x^3");
        let q = free(&[("a", 1), ("b", 1)], 4);
        let deg2 = q.monomial_basis(2).unwrap();
        assert_eq!(deg2.len(), 1);
        assert_eq!(q.format_monomial(&deg2[0]), "a*b");
        assert!(p.monomial_basis(9).is_err());
    }

    #[test]
    fn koszul_signs() {
        let q = free(&[("a", 1), ("b", 1), ("x", 2), ("y", 3)], 8);
        let a = q.named("a").unwrap();
        let b = q.named("b").unwrap();
        assert_eq!(q.multiply(&a, &b), q.multiply(&b, &a).scale(&rat(-1)));
        assert!(q.multiply(&a, &a).is_zero());
        let x = q.named("x").unwrap();
        let y = q.named("y").unwrap();
        assert_eq!(q.multiply(&x, &y), q.multiply(&y, &x));
        assert_eq!(q.parse_element("b*a").unwrap(), q.parse_element("-a b").unwrap());
    }

    #[test]
    fn differential_examples() {
        let p = sphere();
        assert_eq!(p.format_element(p.d_of(p.index_of("y").unwrap())), "x^2");
        let xy = p.parse_element("x*y").unwrap();
        assert_eq!(p.apply_differential(&xy), p.parse_element("x^3").unwrap());
        assert!(p.apply_differential(&p.one()).is_zero());
    }

    #[test]
    fn cohomology_examples() {
        let p = sphere();
        let dims: Vec<usize> = (0..=4).map(|k| p.cohomology(k).unwrap().dim()).collect();
        assert_eq!(dims, vec![1, 0, 1, 0, 0]);
        assert!(p.cohomology(8).is_err());

        let z = free(&[("z", 3)], 8);
        assert_eq!(z.cohomology(3).unwrap().dim(), 1);

        let torus = free(&[("a", 1), ("b", 1)], 4);
        assert_eq!(torus.cohomology(1).unwrap().dim(), 2);
        assert_eq!(torus.cohomology(2).unwrap().dim(), 1);
    }

    #[test]
    fn cohomology_representatives_are_cocycles() {
        let p = sphere();
        for k in 0..7 {
            for r in p.cohomology(k).unwrap().representatives {
                assert!(p.apply_differential(&r).is_zero());
            }
        }
    }

    #[test]
    fn indecomposables_examples() {
        assert!(sphere().indecomposables().is_zero());

        let mut p = free(&[("x", 2), ("z", 1)], 6);
        let x = p.parse_element("x").unwrap();
        p.set_differential("z", x).unwrap();
        let q = p.indecomposables();
        assert!(!q.is_zero());
        assert_eq!(q.maps[&1].get(0, 0), &rat(1));

        let mut h = free(&[("a", 1), ("b", 1), ("c", 1)], 4);
        let ab = h.parse_element("a b").unwrap();
        h.set_differential("c", ab).unwrap();
        assert!(h.indecomposables().is_zero());
    }

    #[test]
    fn rejects_bad_presentations() {
        let mut p = free(&[("x", 2), ("y", 3)], 8);
        let x = p.parse_element("x").unwrap();
        assert!(matches!(
            p.set_differential("y", x),
            Err(GcaError::InhomogeneousImage { .. })
        ));
        assert!(GcaPresentation::new(vec![Generator::new("x", 2), Generator::new("x", 3)], 8).is_err());
        assert!(GcaPresentation::new(vec![Generator::new("x", 8)], 8).is_err());
        let mut q = free(&[("a", 1), ("b", 2), ("c", 3)], 8);
        let c = q.parse_element("c").unwrap();
        q.set_differential("b", c).unwrap();
        assert!(q.validate().is_ok());
        let b = q.parse_element("b").unwrap();
        q.set_differential("a", b).unwrap();
        assert!(matches!(q.validate(), Err(GcaError::DSquaredNonzero(..))));
    }

    #[test]
    fn format_parse_round_trip() {
        let p = free(&[("a", 1), ("b", 1), ("x", 2)], 8);
        let e = p.parse_element("1/2*a*b - 3 x^2 + x").unwrap();
        let again = p.parse_element(&p.format_element(&e)).unwrap();
        assert_eq!(e, again);
        assert!(matches!(p.parse_element("a + q"), Err(GcaError::Parse { offset: 4, .. })));
    }

    fn mixed() -> GcaPresentation {
        free(&[("a", 1), ("b", 1), ("c", 1), ("x", 2), ("y", 2), ("z", 3)], 9)
    }

    fn any_monomial() -> impl Strategy<Value = Monomial> {
        (0u32..2, 0u32..2, 0u32..2, 0u32..3, 0u32..2, 0u32..2)
            .prop_map(|(a, b, c, x, y, z)| Monomial(vec![a, b, c, x, y, z]))
    }

    proptest! {
        #[test]
        fn multiplication_is_associative_and_graded_commutative(
            m1 in any_monomial(), m2 in any_monomial(), m3 in any_monomial()
        ) {
            let p = mixed();
            let e = |m: &Monomial| GcaElement::from_term(m.clone(), rat(1));
            let (a, b, c) = (e(&m1), e(&m2), e(&m3));
            let left = p.multiply(&p.multiply(&a, &b), &c);
            let right = p.multiply(&a, &p.multiply(&b, &c));
            prop_assert_eq!(left, right);
            let sign = if p.monomial_degree(&m1) * p.monomial_degree(&m2) % 2 == 1 { -1 } else { 1 };
            prop_assert_eq!(p.multiply(&a, &b), p.multiply(&b, &a).scale(&rat(sign)));
        }

        #[test]
        fn cohomology_dim_matches_cohomology(degree in 0u32..7) {
            let mut p = mixed();
            for (name, d) in [("c", "a*b"), ("x", "a*b*c"), ("y", "a*x"), ("z", "a*b*x")] {
                let e = p.parse_element(d).unwrap();
                p.set_differential(name, e).unwrap();
            }
            p.validate().unwrap();
            prop_assert_eq!(p.cohomology_dim(degree).unwrap(), p.cohomology(degree).unwrap().dim());
            let s = sphere();
            prop_assert_eq!(s.cohomology_dim(degree).unwrap(), s.cohomology(degree).unwrap().dim());
        }

        #[test]
        fn euler_characteristic_matches(top in 2u32..7) {
            let p = sphere();
            let mut chain = 0i64;
            let mut homology = 0i64;
            for k in 0..top {
                let sign = if k % 2 == 0 { 1 } else { -1 };
                chain += sign * p.monomial_basis(k).unwrap().len() as i64;
                homology += sign * p.cohomology(k).unwrap().dim() as i64;
            }
            // Cutting the complex after degree top-1 leaves the image of the
            // last differential unaccounted for.
            let last = p.differential_matrix(top - 1).unwrap().rank() as i64;
            let sign = if top % 2 == 0 { 1 } else { -1 };
            prop_assert_eq!(chain, homology - sign * last);
        }
    }
}
