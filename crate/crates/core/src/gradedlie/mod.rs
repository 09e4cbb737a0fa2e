//! Graded Lie algebras generated in degree 1: free Lie algebras, finitely
//! presented quotients, structure constants, lower central series ranks, and
//! nilpotency of linear actions.

mod lyndon;
mod nilpotent;
mod presented;
pub mod tensor;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::exactla::{axpy, Rational, RowSpace, SparseVec};

pub use lyndon::{free_lie_dims, is_lyndon, lyndon_basis, mobius, standard_bracketing, standard_factorization, witt_number};
pub use nilpotent::nilpotency_index;
pub use presented::{presented_lie, LiePresentation, LieRelator};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("relator {index} is not homogeneous")]
    InhomogeneousRelator { index: usize },
    #[error("relator {index} has degree {degree}; relators must have degree at least 2")]
    RelatorDegreeTooLow { index: usize, degree: u32 },
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("invalid bracket table: {0}")]
    InvalidTable(String),
    #[error("degree {degree} is not spanned by brackets with degree-1 elements")]
    NotGeneratedInDegreeOne { degree: u32 },
    #[error("Jacobi identity fails on basis triple ({0}, {1}, {2})")]
    JacobiFailure(String, String, String),
}

/// Bracket expression over numbered generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LieExpr {
    Generator(usize),
    Bracket(Box<LieExpr>, Box<LieExpr>),
}

impl LieExpr {
    pub fn bracket(a: LieExpr, b: LieExpr) -> LieExpr {
        LieExpr::Bracket(Box::new(a), Box::new(b))
    }

    pub fn degree(&self) -> u32 {
        match self {
            LieExpr::Generator(_) => 1,
            LieExpr::Bracket(a, b) => a.degree() + b.degree(),
        }
    }

    pub fn max_generator(&self) -> usize {
        match self {
            LieExpr::Generator(i) => *i,
            LieExpr::Bracket(a, b) => a.max_generator().max(b.max_generator()),
        }
    }

    pub fn format(&self, names: &[String]) -> String {
        match self {
            LieExpr::Generator(i) => names[*i].clone(),
            LieExpr::Bracket(a, b) => format!("[{},{}]", a.format(names), b.format(names)),
        }
    }
}

/// A graded Lie algebra truncated above degree `cap`, given by a basis
/// ordered by degree and structure constants `[e_i, e_j]` for `i < j`.
///
/// Brackets landing above `cap` are zero by convention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieGradedData {
    labels: Vec<String>,
    degrees: Vec<u32>,
    cap: u32,
    brackets: BTreeMap<(usize, usize), SparseVec>,
}

impl LieGradedData {
    /// Checks degree bookkeeping and antisymmetry of the supplied table.
    /// Entries may be given for `i > j`; they are folded into `(j, i)` with a
    /// sign and must agree with any entry already given there. The Jacobi
    /// identity is not checked here; see [`LieGradedData::check_jacobi`].
    pub fn new(
        labels: Vec<String>,
        degrees: Vec<u32>,
        cap: u32,
        table: impl IntoIterator<Item = ((usize, usize), SparseVec)>,
    ) -> Result<Self, LieError> {
        if labels.len() != degrees.len() {
            return Err(LieError::InvalidTable("label and degree counts differ".into()));
        }
        if degrees.windows(2).any(|w| w[0] > w[1]) {
            return Err(LieError::InvalidTable("basis must be ordered by degree".into()));
        }
        if let Some(&d) = degrees.iter().find(|&&d| d == 0 || d > cap) {
            return Err(LieError::InvalidTable(format!("basis degree {d} outside 1..={cap}")));
        }
        let n = labels.len();
        let mut brackets: BTreeMap<(usize, usize), SparseVec> = BTreeMap::new();
        for ((i, j), v) in table {
            if i >= n || j >= n || v.keys().any(|&k| k >= n) {
                return Err(LieError::InvalidTable("index out of range".into()));
            }
            let v: SparseVec = v.into_iter().filter(|(_, c)| !c.is_zero()).collect();
            if v.is_empty() {
                continue;
            }
            if i == j {
                return Err(LieError::InvalidTable(format!("[{0},{0}] must vanish", labels[i])));
            }
            let target = degrees[i] + degrees[j];
            if target > cap || v.keys().any(|&k| degrees[k] != target) {
                return Err(LieError::InvalidTable(format!(
                    "[{},{}] must lie in degree {}",
                    labels[i], labels[j], target
                )));
            }
            let (key, value) = if i < j {
                ((i, j), v)
            } else {
                ((j, i), v.into_iter().map(|(k, c)| (k, -c)).collect())
            };
            match brackets.get(&key) {
                Some(existing) if *existing != value => {
                    return Err(LieError::InvalidTable(format!(
                        "[{},{}] is not antisymmetric",
                        labels[key.0], labels[key.1]
                    )))
                }
                _ => {
                    brackets.insert(key, value);
                }
            }
        }
        Ok(LieGradedData {
            labels,
            degrees,
            cap,
            brackets,
        })
    }

    pub fn abelian(labels: Vec<String>, cap: u32) -> Self {
        let degrees = vec![1; labels.len()];
        LieGradedData::new(labels, degrees, cap.max(1), []).expect("abelian table is valid")
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.degrees[i]
    }

    /// Nonzero structure constants, keyed by `(i, j)` with `i < j`.
    pub fn brackets(&self) -> &BTreeMap<(usize, usize), SparseVec> {
        &self.brackets
    }

    /// Dimension of each degree `1..=cap`.
    pub fn dims(&self) -> Vec<usize> {
        (1..=self.cap)
            .map(|d| self.degrees.iter().filter(|&&x| x == d).count())
            .collect()
    }

    pub fn basis_of_degree(&self, degree: u32) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degrees[i] == degree).collect()
    }

    pub fn bracket(&self, i: usize, j: usize) -> SparseVec {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => SparseVec::new(),
            Less => self.brackets.get(&(i, j)).cloned().unwrap_or_default(),
            Greater => self
                .brackets
                .get(&(j, i))
                .map(|v| v.iter().map(|(&k, c)| (k, -c.clone())).collect())
                .unwrap_or_default(),
        }
    }

    pub fn bracket_vec(&self, u: &SparseVec, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (&i, a) in u {
            for (&j, b) in v {
                let e = self.bracket(i, j);
                if !e.is_empty() {
                    axpy(&mut out, &(a * b), &e);
                }
            }
        }
        out
    }

    fn unit(i: usize) -> SparseVec {
        [(i, Rational::from_integer(1.into()))].into_iter().collect()
    }

    /// First basis triple `(a, b, c)` with `a < b < c` violating the Jacobi
    /// identity, if any.
    pub fn jacobi_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.dim();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if self.degrees[a] + self.degrees[b] + self.degrees[c] > self.cap {
                        continue;
                    }
                    let (ea, eb, ec) = (Self::unit(a), Self::unit(b), Self::unit(c));
                    let mut sum = self.bracket_vec(&ea, &self.bracket(b, c));
                    axpy(&mut sum, &Rational::from_integer(1.into()), &self.bracket_vec(&eb, &self.bracket(c, a)));
                    axpy(&mut sum, &Rational::from_integer(1.into()), &self.bracket_vec(&ec, &self.bracket(a, b)));
                    if !sum.is_empty() {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    pub fn check_jacobi(&self) -> Result<(), LieError> {
        match self.jacobi_violation() {
            None => Ok(()),
            Some((a, b, c)) => Err(LieError::JacobiFailure(
                self.labels[a].clone(),
                self.labels[b].clone(),
                self.labels[c].clone(),
            )),
        }
    }

    /// Checks `L_{i+1} = [L_1, L_i]` for every `i < cap`.
    pub fn check_generated_in_degree_one(&self) -> Result<(), LieError> {
        let ones = self.basis_of_degree(1);
        for d in 1..self.cap {
            let mut span = RowSpace::new();
            for &a in &ones {
                for b in self.basis_of_degree(d) {
                    span.insert(self.bracket(a, b));
                }
            }
            if span.rank() != self.basis_of_degree(d + 1).len() {
                return Err(LieError::NotGeneratedInDegreeOne { degree: d + 1 });
            }
        }
        Ok(())
    }

    /// Ranks `phi_i` of the lower central series quotients. For an algebra
    /// generated in degree 1, `Gamma_i` is the part of degree `>= i`, so
    /// `phi_i = dim L_i`.
    pub fn lcs_ranks(&self) -> Result<LcsTable, LieError> {
        self.check_generated_in_degree_one()?;
        Ok(LcsTable {
            ranks: self.dims().into_iter().map(|d| d as u64).collect(),
        })
    }

    /// The quotient by everything of degree `> cap`.
    pub fn truncate(&self, cap: u32) -> LieGradedData {
        let keep = self.degrees.iter().take_while(|&&d| d <= cap).count();
        let table = self
            .brackets
            .iter()
            .filter(|((i, j), _)| *i < keep && *j < keep && self.degrees[*i] + self.degrees[*j] <= cap)
            .map(|(&k, v)| (k, v.clone()));
        LieGradedData::new(self.labels[..keep].to_vec(), self.degrees[..keep].to_vec(), cap, table)
            .expect("truncation of a valid table is valid")
    }

    /// Whether the structure constants and degrees agree with another table,
    /// ignoring labels.
    pub fn same_structure(&self, other: &LieGradedData) -> bool {
        self.degrees == other.degrees && self.brackets == other.brackets
    }
}

impl fmt::Display for LieGradedData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((i, j), v) in &self.brackets {
            let terms: Vec<String> = v
                .iter()
                .map(|(&k, c)| format!("{}*{}", crate::exactla::fmt_rational(c), self.labels[k]))
                .collect();
            writeln!(f, "[{}, {}] = {}", self.labels[*i], self.labels[*j], terms.join(" + "))?;
        }
        Ok(())
    }
}

/// Ranks `phi_i`, stored from degree 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LcsTable {
    pub ranks: Vec<u64>,
}

impl LcsTable {
    pub fn phi(&self, i: usize) -> u64 {
        self.ranks.get(i.wrapping_sub(1)).copied().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::rat;

    fn heisenberg() -> LieGradedData {
        let labels = ["x", "y", "z"].map(String::from).to_vec();
        LieGradedData::new(labels, vec![1, 1, 2], 2, [((0, 1), [(2, rat(1))].into_iter().collect())]).unwrap()
    }

    #[test]
    fn heisenberg_table() {
        let h = heisenberg();
        assert_eq!(h.dims(), vec![2, 1]);
        assert_eq!(h.bracket(1, 0), [(2, rat(-1))].into_iter().collect());
        assert!(h.check_jacobi().is_ok());
        assert_eq!(h.lcs_ranks().unwrap().ranks, vec![2, 1]);
    }

    #[test]
    fn rejects_degree_violations() {
        let labels = ["x", "y", "z"].map(String::from).to_vec();
        let bad = LieGradedData::new(labels, vec![1, 1, 2], 2, [((0, 2), [(2, rat(1))].into_iter().collect())]);
        assert!(bad.is_err());
    }

    #[test]
    fn abelian_degree_two_piece_is_not_generated() {
        let labels = ["x", "z"].map(String::from).to_vec();
        let l = LieGradedData::new(labels, vec![1, 2], 2, []).unwrap();
        assert_eq!(l.lcs_ranks(), Err(LieError::NotGeneratedInDegreeOne { degree: 2 }));
    }

    #[test]
    fn detects_jacobi_failure() {
        // x, y, u in degree 1; a, b, c in degree 2; p in degree 3.
        let labels = ["x", "y", "u", "a", "b", "c", "p"].map(String::from).to_vec();
        let one = |k| -> SparseVec { [(k, rat(1))].into_iter().collect() };
        let table = [((0, 1), one(3)), ((1, 2), one(4)), ((2, 0), one(5)), ((0, 4), one(6))];
        let l = LieGradedData::new(labels, vec![1, 1, 1, 2, 2, 2, 3], 3, table).unwrap();
        assert_eq!(l.jacobi_violation(), Some((0, 1, 2)));
    }
}
