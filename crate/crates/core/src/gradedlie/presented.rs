//! Finitely presented graded Lie algebras, computed degree by degree inside
//! the free associative algebra.

use std::collections::{BTreeMap, HashSet};

use num_traits::{One, Signed, Zero};

use super::tensor::Tensor;
use super::{LieError, LieExpr, LieGradedData};
use crate::exactla::{fmt_rational, Rational, RowSpace, SparseVec};

/// Homogeneous linear combination of bracket expressions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieRelator {
    pub terms: Vec<(Rational, LieExpr)>,
}

impl LieRelator {
    pub fn degree(&self) -> Option<u32> {
        let mut degrees = self.terms.iter().map(|(_, e)| e.degree());
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn to_tensor(&self, m: usize) -> Tensor {
        let mut out = Tensor {
            degree: self.degree().unwrap_or(0),
            coeffs: SparseVec::new(),
        };
        for (c, e) in &self.terms {
            out.add_scaled(c, &Tensor::from_expr(e, m));
        }
        out
    }

    pub fn format(&self, names: &[String]) -> String {
        let mut out = String::new();
        for (k, (c, e)) in self.terms.iter().enumerate() {
            let body = e.format(names);
            let a = c.abs();
            let coeff = if a.is_one() { String::new() } else { format!("{}*", fmt_rational(&a)) };
            match (k, c.is_negative()) {
                (0, false) => out.push_str(&format!("{coeff}{body}")),
                (0, true) => out.push_str(&format!("-{coeff}{body}")),
                (_, false) => out.push_str(&format!(" + {coeff}{body}")),
                (_, true) => out.push_str(&format!(" - {coeff}{body}")),
            }
        }
        out
    }
}

/// Degree-1 generators and homogeneous relators of degree at least 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiePresentation {
    generators: Vec<String>,
    relators: Vec<LieRelator>,
}

impl LiePresentation {
    pub fn new(generators: Vec<String>, relators: Vec<LieRelator>) -> Result<Self, LieError> {
        let mut seen = HashSet::new();
        for g in &generators {
            if !seen.insert(g.as_str()) {
                return Err(LieError::DuplicateGenerator(g.clone()));
            }
        }
        for (index, r) in relators.iter().enumerate() {
            if r.terms.iter().any(|(_, e)| e.max_generator() >= generators.len()) {
                return Err(LieError::InvalidTable(format!("relator {index} uses an unknown generator")));
            }
            let degree = r.degree().ok_or(LieError::InhomogeneousRelator { index })?;
            if degree < 2 {
                return Err(LieError::RelatorDegreeTooLow { index, degree });
            }
        }
        Ok(LiePresentation { generators, relators })
    }

    /// Free Lie algebra on generators `x1..xm`.
    pub fn free(m: usize) -> Self {
        let generators = (1..=m).map(|i| format!("x{i}")).collect();
        LiePresentation::new(generators, Vec::new()).expect("free presentation is valid")
    }

    /// `a1, b1, ..., ag, bg` with the single relator `sum [ai, bi]`.
    pub fn surface(genus: usize) -> Self {
        let mut generators = Vec::new();
        for i in 1..=genus {
            generators.push(format!("a{i}"));
            generators.push(format!("b{i}"));
        }
        let terms: Vec<(Rational, LieExpr)> = (0..genus)
            .map(|i| {
                (
                    Rational::one(),
                    LieExpr::bracket(LieExpr::Generator(2 * i), LieExpr::Generator(2 * i + 1)),
                )
            })
            .collect();
        let relators = if terms.is_empty() { Vec::new() } else { vec![LieRelator { terms }] };
        LiePresentation::new(generators, relators).expect("surface presentation is valid")
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relators(&self) -> &[LieRelator] {
        &self.relators
    }

    pub fn with_relator(&self, relator: LieRelator) -> Result<Self, LieError> {
        let mut relators = self.relators.clone();
        relators.push(relator);
        LiePresentation::new(self.generators.clone(), relators)
    }

    /// Parses a relator such as `[a1,b1] + [a2,b2]` or `2*[a,[a,b]] - 1/2 [b,[a,b]]`.
    pub fn parse_relator(&self, text: &str) -> Result<LieRelator, LieError> {
        RelatorParser {
            names: &self.generators,
            src: text.as_bytes(),
            pos: 0,
        }
        .parse()
    }
}

struct RelatorParser<'a> {
    names: &'a [String],
    src: &'a [u8],
    pos: usize,
}

impl RelatorParser<'_> {
    fn error(&self, message: impl Into<String>) -> LieError {
        LieError::Parse {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn peek(&mut self) -> Option<u8> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), LieError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", c as char)))
        }
    }

    fn parse(mut self) -> Result<LieRelator, LieError> {
        let mut terms = Vec::new();
        loop {
            let sign = match self.peek() {
                None if terms.is_empty() => return Err(self.error("empty relator")),
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    Rational::one()
                }
                Some(b'-') => {
                    self.pos += 1;
                    -Rational::one()
                }
                Some(_) if terms.is_empty() => Rational::one(),
                Some(c) => return Err(self.error(format!("expected `+` or `-`, found `{}`", c as char))),
            };
            let mut coeff = sign;
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                coeff *= self.rational()?;
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                }
            }
            let expr = self.expr()?;
            terms.push((coeff, expr));
        }
        Ok(LieRelator { terms })
    }

    fn integer(&mut self) -> Result<u64, LieError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.error("invalid number"))
    }

    fn rational(&mut self) -> Result<Rational, LieError> {
        let n = self.integer()?;
        let mut q = Rational::from_integer(n.into());
        if self.src.get(self.pos) == Some(&b'/') {
            self.pos += 1;
            let d = self.integer()?;
            if d == 0 {
                return Err(self.error("zero denominator"));
            }
            q /= Rational::from_integer(d.into());
        }
        Ok(q)
    }

    fn expr(&mut self) -> Result<LieExpr, LieError> {
        match self.peek() {
            Some(b'[') => {
                self.pos += 1;
                let a = self.expr()?;
                self.expect(b',')?;
                let b = self.expr()?;
                self.expect(b']')?;
                Ok(LieExpr::bracket(a, b))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                self.names
                    .iter()
                    .position(|n| n == name)
                    .map(LieExpr::Generator)
                    .ok_or_else(|| LieError::Parse {
                        offset: start,
                        message: format!("unknown generator `{name}`"),
                    })
            }
            Some(c) => Err(self.error(format!("unexpected `{}` in bracket expression", c as char))),
            None => Err(self.error("unexpected end of bracket expression")),
        }
    }
}

/// Degree-`i` data of the quotient: a basis of the ideal slice, tensor
/// representatives of a complementary basis, and their reductions.
struct Slice {
    ideal: RowSpace,
    reps: Vec<Tensor>,
    labels: Vec<String>,
    /// Reduced representatives, inserted in basis order so that `express`
    /// returns coordinates in the quotient basis.
    quotient: RowSpace,
}

impl Slice {
    fn coordinates(&self, t: &Tensor) -> SparseVec {
        let reduced = self.ideal.reduce(&t.coeffs);
        self.quotient
            .express(&reduced)
            .expect("degree is spanned by brackets of lower degrees")
    }
}

/// The presented Lie algebra truncated above degree `cap`.
///
/// `I_i` is spanned by `[x_j, I_{i-1}]` together with the degree-`i`
/// relators; `L_i` gets a basis from brackets `[x_j, b]` with `b` running over
/// the basis of `L_{i-1}`, chosen greedily modulo `I_i`.
pub fn presented_lie(p: &LiePresentation, cap: u32) -> Result<LieGradedData, LieError> {
    let m = p.generators.len();
    let base = m.max(1);
    let mut relators_by_degree: BTreeMap<u32, Vec<Tensor>> = BTreeMap::new();
    for r in &p.relators {
        let degree = r.degree().expect("validated");
        relators_by_degree.entry(degree).or_default().push(r.to_tensor(base));
    }

    let mut slices: Vec<Slice> = Vec::new();
    for degree in 1..=cap {
        let mut ideal = RowSpace::new();
        if let Some(prev) = slices.last() {
            for v in prev.ideal.basis() {
                let t = Tensor {
                    degree: degree - 1,
                    coeffs: v.clone(),
                };
                for j in 0..m {
                    ideal.insert(Tensor::letter(j).bracket(&t, base).coeffs);
                }
            }
        }
        for r in relators_by_degree.get(&degree).into_iter().flatten() {
            ideal.insert(r.coeffs.clone());
        }

        let mut reps = Vec::new();
        let mut labels = Vec::new();
        let mut quotient = RowSpace::new();
        let candidates: Vec<(Tensor, String)> = match slices.last() {
            None => (0..m).map(|j| (Tensor::letter(j), p.generators[j].clone())).collect(),
            Some(prev) => (0..m)
                .flat_map(|j| {
                    prev.reps
                        .iter()
                        .zip(&prev.labels)
                        .map(move |(b, label)| (j, b, label))
                })
                .map(|(j, b, label)| {
                    (
                        Tensor::letter(j).bracket(b, base),
                        format!("[{},{}]", p.generators[j], label),
                    )
                })
                .collect(),
        };
        for (t, label) in candidates {
            let reduced = ideal.reduce(&t.coeffs);
            if reduced.is_empty() || quotient.contains(&reduced) {
                continue;
            }
            quotient.insert(reduced);
            reps.push(t);
            labels.push(label);
        }
        slices.push(Slice {
            ideal,
            reps,
            labels,
            quotient,
        });
    }

    let mut all_labels = Vec::new();
    let mut degrees = Vec::new();
    let mut offsets = Vec::new();
    for (d, slice) in slices.iter().enumerate() {
        offsets.push(all_labels.len());
        all_labels.extend(slice.labels.iter().cloned());
        degrees.extend(std::iter::repeat(d as u32 + 1).take(slice.labels.len()));
    }

    let mut table = Vec::new();
    for (di, si) in slices.iter().enumerate() {
        for (dj, sj) in slices.iter().enumerate().skip(di) {
            let target = di + dj + 1;
            if target >= slices.len() {
                continue;
            }
            for (a, ta) in si.reps.iter().enumerate() {
                let b_start = if di == dj { a + 1 } else { 0 };
                for (b, tb) in sj.reps.iter().enumerate().skip(b_start) {
                    let coords = slices[target].coordinates(&ta.bracket(tb, base));
                    if coords.values().all(Zero::is_zero) {
                        continue;
                    }
                    let shifted = coords.into_iter().map(|(k, c)| (offsets[target] + k, c)).collect();
                    table.push(((offsets[di] + a, offsets[dj] + b), shifted));
                }
            }
        }
    }
    LieGradedData::new(all_labels, degrees, cap.max(1), table)
}
