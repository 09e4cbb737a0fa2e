//! Truncated non-commutative power series, the Magnus expansion of a free
//! group, and its group-like and primitive elements.
//!
//! Series live in `ℚ⟨⟨x_1, ..., x_m⟩⟩ / (words of length > N)`. The
//! coproduct makes every letter primitive.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactla::{fmt_rational, rat, ratio, Rational, RowSpace, SparseVec};

pub type Word = Vec<u16>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("expected constant term {expected}, found {found}")]
    ConstantTerm { expected: i64, found: String },
    #[error("series over different alphabets or truncations")]
    Mismatch,
    #[error("letter {letter} out of range for {arity} letters")]
    LetterOutOfRange { letter: u16, arity: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    arity: usize,
    cap: usize,
    coeffs: BTreeMap<Word, Rational>,
}

impl TruncatedSeries {
    pub fn zero(arity: usize, cap: usize) -> Self {
        TruncatedSeries {
            arity,
            cap,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(arity: usize, cap: usize) -> Self {
        Self::monomial(arity, cap, Vec::new(), rat(1))
    }

    pub fn letter(arity: usize, cap: usize, letter: u16) -> Self {
        Self::monomial(arity, cap, vec![letter], rat(1))
    }

    /// `c·w`, or zero if `w` is longer than the cap.
    pub fn monomial(arity: usize, cap: usize, word: Word, c: Rational) -> Self {
        let mut s = Self::zero(arity, cap);
        s.add_term(word, c);
        s
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn terms(&self) -> &BTreeMap<Word, Rational> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficient(&self, word: &[u16]) -> Rational {
        self.coeffs.get(word).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant(&self) -> Rational {
        self.coefficient(&[])
    }

    fn add_term(&mut self, word: Word, c: Rational) {
        if word.len() > self.cap || c.is_zero() {
            return;
        }
        match self.coeffs.entry(word) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_compatible(&self, other: &Self) {
        assert!(
            self.arity == other.arity && self.cap == other.cap,
            "series over different alphabets or truncations"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut out = self.clone();
        for (w, c) in &other.coeffs {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&rat(-1)))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.arity, self.cap);
        for (w, v) in &self.coeffs {
            out.add_term(w.clone(), v * c);
        }
        out
    }

    /// Concatenation product, truncated.
    pub fn mul(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut out = Self::zero(self.arity, self.cap);
        let mut by_length: Vec<Vec<(&Word, &Rational)>> = vec![Vec::new(); self.cap + 1];
        for (w, c) in &other.coeffs {
            by_length[w.len()].push((w, c));
        }
        for (u, a) in &self.coeffs {
            for bucket in &by_length[..=self.cap - u.len()] {
                for &(v, b) in bucket {
                    let mut w = u.clone();
                    w.extend_from_slice(v);
                    out.add_term(w, a * b);
                }
            }
        }
        out
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::one(self.arity, self.cap), |acc, _| acc.mul(self))
    }

    /// Homogeneous part of the given length.
    pub fn degree_part(&self, degree: usize) -> Self {
        TruncatedSeries {
            arity: self.arity,
            cap: self.cap,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(w, _)| w.len() == degree)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Length of the shortest word with a nonzero coefficient.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.keys().map(Vec::len).min()
    }

    fn expect_constant(&self, expected: i64) -> Result<(), SeriesError> {
        let c = self.constant();
        if c != rat(expected) {
            return Err(SeriesError::ConstantTerm {
                expected,
                found: fmt_rational(&c),
            });
        }
        Ok(())
    }

    /// Inverse of a series with constant term 1, by the geometric series.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        self.expect_constant(1)?;
        let a = self.sub(&Self::one(self.arity, self.cap));
        let minus_a = a.scale(&rat(-1));
        let mut out = Self::one(self.arity, self.cap);
        let mut power = Self::one(self.arity, self.cap);
        for _ in 0..self.cap {
            power = power.mul(&minus_a);
            out = out.add(&power);
        }
        Ok(out)
    }

    /// Coproduct `Δ`, as a map from `(left word, right word)` to
    /// coefficients. Each word splits over all ways of distributing its
    /// letters, keeping their order, between the two factors.
    pub fn coproduct(&self) -> BTreeMap<(Word, Word), Rational> {
        let mut out: BTreeMap<(Word, Word), Rational> = BTreeMap::new();
        for (w, c) in &self.coeffs {
            let n = w.len();
            for mask in 0u32..(1 << n) {
                let (mut left, mut right) = (Vec::new(), Vec::new());
                for (k, &letter) in w.iter().enumerate() {
                    if mask & (1 << k) != 0 {
                        left.push(letter);
                    } else {
                        right.push(letter);
                    }
                }
                *out.entry((left, right)).or_insert_with(Rational::zero) += c;
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// `s ⊗ t`, truncated at total length `cap`.
    fn tensor(&self, other: &Self) -> BTreeMap<(Word, Word), Rational> {
        let mut out = BTreeMap::new();
        for (u, a) in &self.coeffs {
            for (v, b) in &other.coeffs {
                if u.len() + v.len() <= self.cap {
                    out.insert((u.clone(), v.clone()), a * b);
                }
            }
        }
        out
    }

    /// `Δs = s ⊗ s` with constant term 1.
    pub fn is_grouplike(&self) -> bool {
        self.constant().is_one() && self.coproduct() == self.tensor(self)
    }

    /// `Δs = s ⊗ 1 + 1 ⊗ s`.
    pub fn is_primitive(&self) -> bool {
        let one = Self::one(self.arity, self.cap);
        let mut expected = self.tensor(&one);
        for (key, c) in one.tensor(self) {
            *expected.entry(key).or_insert_with(Rational::zero) += c;
        }
        expected.retain(|_, c| !c.is_zero());
        self.coproduct() == expected
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0 + O({})", self.cap + 1);
        }
        // Shorter words first.
        let mut terms: Vec<(&Word, &Rational)> = self.coeffs.iter().collect();
        terms.sort_by(|a, b| (a.0.len(), a.0).cmp(&(b.0.len(), b.0)));
        for (k, (w, c)) in terms.into_iter().enumerate() {
            let word: String = w.iter().map(|l| format!("x{}", l + 1)).collect();
            let coeff = fmt_rational(c);
            let body = match (word.is_empty(), coeff.as_str()) {
                (true, _) => coeff.clone(),
                (false, "1") => word,
                (false, "-1") => format!("-{word}"),
                (false, _) => format!("{coeff}{word}"),
            };
            if k == 0 {
                write!(f, "{body}")?;
            } else if let Some(rest) = body.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        write!(f, " + O({})", self.cap + 1)
    }
}

/// `log s = Σ_{k≥1} (-1)^{k+1} (s-1)^k / k`, for constant term 1.
pub fn log_series(s: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
    s.expect_constant(1)?;
    let a = s.sub(&TruncatedSeries::one(s.arity, s.cap));
    let mut out = TruncatedSeries::zero(s.arity, s.cap);
    let mut power = TruncatedSeries::one(s.arity, s.cap);
    for k in 1..=s.cap as i64 {
        power = power.mul(&a);
        let sign = if k % 2 == 1 { 1 } else { -1 };
        out = out.add(&power.scale(&ratio(sign, k)));
    }
    Ok(out)
}

/// `exp s = Σ_k s^k / k!`, for constant term 0.
pub fn exp_series(s: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
    s.expect_constant(0)?;
    let mut out = TruncatedSeries::one(s.arity, s.cap);
    let mut term = TruncatedSeries::one(s.arity, s.cap);
    for k in 1..=s.cap as i64 {
        term = term.mul(s).scale(&ratio(1, k));
        out = out.add(&term);
    }
    Ok(out)
}

/// A reduced word in a free group: letters with exponents ±1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GroupWord(Vec<(u16, i8)>);

impl GroupWord {
    /// Freely reduces the given sequence. Exponents must be ±1.
    pub fn new(letters: impl IntoIterator<Item = (u16, i8)>) -> Self {
        let mut out: Vec<(u16, i8)> = Vec::new();
        for (l, e) in letters {
            assert!(e == 1 || e == -1, "exponent must be ±1");
            match out.last() {
                Some(&(l2, e2)) if l2 == l && e2 == -e => {
                    out.pop();
                }
                _ => out.push((l, e)),
            }
        }
        GroupWord(out)
    }

    pub fn identity() -> Self {
        GroupWord(Vec::new())
    }

    pub fn letter(l: u16) -> Self {
        GroupWord(vec![(l, 1)])
    }

    pub fn letters(&self) -> &[(u16, i8)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        GroupWord(self.0.iter().rev().map(|&(l, e)| (l, -e)).collect())
    }

    pub fn concat(&self, other: &Self) -> Self {
        GroupWord::new(self.0.iter().chain(&other.0).copied())
    }

    /// `a b a⁻¹ b⁻¹`.
    pub fn commutator(a: &Self, b: &Self) -> Self {
        a.concat(b).concat(&a.inverse()).concat(&b.inverse())
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(l, e)| if e == 1 { format!("x{}", l + 1) } else { format!("x{}^-1", l + 1) })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

fn expand_word(
    w: &GroupWord,
    arity: usize,
    cap: usize,
    letter_image: impl Fn(u16, i8) -> Result<TruncatedSeries, SeriesError>,
) -> Result<TruncatedSeries, SeriesError> {
    let mut out = TruncatedSeries::one(arity, cap);
    for &(l, e) in w.letters() {
        if l as usize >= arity {
            return Err(SeriesError::LetterOutOfRange { letter: l, arity });
        }
        out = out.mul(&letter_image(l, e)?);
    }
    Ok(out)
}

/// Magnus expansion: `x ↦ 1 + x`, `x⁻¹ ↦ 1 - x + x² - ...`.
///
/// Letters are primitive for [`TruncatedSeries::coproduct`], so `1 + x` is
/// not group-like; see [`exp_magnus`] for the group-like embedding.
pub fn magnus(w: &GroupWord, arity: usize, cap: usize) -> Result<TruncatedSeries, SeriesError> {
    expand_word(w, arity, cap, |l, e| {
        let factor = TruncatedSeries::one(arity, cap).add(&TruncatedSeries::letter(arity, cap, l));
        if e == 1 {
            Ok(factor)
        } else {
            factor.inverse()
        }
    })
}

/// The embedding `x ↦ exp(x)` of the free group into the group-like
/// elements of the completed free associative algebra.
pub fn exp_magnus(w: &GroupWord, arity: usize, cap: usize) -> Result<TruncatedSeries, SeriesError> {
    expand_word(w, arity, cap, |l, e| {
        exp_series(&TruncatedSeries::monomial(arity, cap, vec![l], rat(e as i64)))
    })
}

/// Substitutes `images[l]` for each letter `x_l`. Images must have constant
/// term 0 so the result is well defined after truncation.
pub fn substitute(s: &TruncatedSeries, images: &[TruncatedSeries]) -> Result<TruncatedSeries, SeriesError> {
    if images.len() != s.arity {
        return Err(SeriesError::Mismatch);
    }
    for image in images {
        image.expect_constant(0)?;
        if image.cap != s.cap {
            return Err(SeriesError::Mismatch);
        }
    }
    let arity = images.first().map_or(s.arity, |i| i.arity);
    let mut out = TruncatedSeries::zero(arity, s.cap);
    for (w, c) in &s.coeffs {
        let term = w
            .iter()
            .fold(TruncatedSeries::one(arity, s.cap), |acc, &l| acc.mul(&images[l as usize]));
        out = out.add(&term.scale(c));
    }
    Ok(out)
}

fn all_words(arity: usize, length: usize) -> Vec<Word> {
    let mut words = vec![Vec::new()];
    for _ in 0..length {
        words = words
            .into_iter()
            .flat_map(|w| {
                (0..arity as u16).map(move |l| {
                    let mut w = w.clone();
                    w.push(l);
                    w
                })
            })
            .collect();
    }
    words
}

/// Dimension of the primitive elements of each homogeneous degree
/// `1..=cap`, from the kernel of `s ↦ Δs - s⊗1 - 1⊗s`.
pub fn primitive_dims(arity: usize, cap: usize) -> Vec<usize> {
    (1..=cap)
        .map(|degree| {
            let words = all_words(arity, degree);
            let mut pair_index: HashMap<(Word, Word), usize> = HashMap::new();
            let mut image = RowSpace::new();
            for w in &words {
                let s = TruncatedSeries::monomial(arity, cap, w.clone(), rat(1));
                let mut column = SparseVec::new();
                for ((u, v), c) in s.coproduct() {
                    if u.is_empty() || v.is_empty() {
                        continue;
                    }
                    let next = pair_index.len();
                    let row = *pair_index.entry((u, v)).or_insert(next);
                    column.insert(row, c);
                }
                image.insert(column);
            }
            words.len() - image.rank()
        })
        .collect()
}

/// Ranks of `Γ_i / Γ_{i+1}` seen through the Magnus expansion, for
/// `i = 1..=cap`.
///
/// `Γ_i` is generated modulo `Γ_{i+1}` by the left-normed commutators
/// `[x_{j_1}, [x_{j_2}, ..., x_{j_i}]]`. Each is pushed through `expansion`
/// (either [`magnus`] or [`exp_magnus`]); its image minus 1 is checked to
/// start in length `i`, and the rank of the span of the length-`i` parts is
/// recorded.
pub fn commutator_filtration_ranks(
    arity: usize,
    cap: usize,
    expansion: fn(&GroupWord, usize, usize) -> Result<TruncatedSeries, SeriesError>,
) -> Result<Vec<usize>, SeriesError> {
    let one = TruncatedSeries::one(arity, cap);
    let mut previous: Vec<(GroupWord, TruncatedSeries)> = Vec::new();
    let mut ranks = Vec::new();
    for degree in 1..=cap {
        let mut current = Vec::new();
        if degree == 1 {
            for l in 0..arity as u16 {
                let g = GroupWord::letter(l);
                let s = expansion(&g, arity, cap)?;
                current.push((g, s));
            }
        } else {
            let letters: Vec<(GroupWord, TruncatedSeries)> = (0..arity as u16)
                .map(|l| {
                    let g = GroupWord::letter(l);
                    expansion(&g, arity, cap).map(|s| (g, s))
                })
                .collect::<Result<_, _>>()?;
            for (x, mx) in &letters {
                let mx_inv = mx.inverse()?;
                for (c, mc) in &previous {
                    let g = GroupWord::commutator(x, c);
                    let s = mx.mul(mc).mul(&mx_inv).mul(&mc.inverse()?);
                    current.push((g, s));
                }
            }
        }
        let mut span = RowSpace::new();
        let mut index: HashMap<Word, usize> = HashMap::new();
        for (g, s) in &current {
            let reduced = s.sub(&one);
            if let Some(order) = reduced.order() {
                assert!(order >= degree, "magnus({g}) - 1 has a term of length {order} < {degree}");
            }
            let leading: SparseVec = reduced
                .degree_part(degree)
                .terms()
                .iter()
                .map(|(w, c)| {
                    let next = index.len();
                    (*index.entry(w.clone()).or_insert(next), c.clone())
                })
                .collect();
            span.insert(leading);
        }
        ranks.push(span.rank());
        previous = current;
    }
    Ok(ranks)
}

/// Ranks of `gr F_i` for the filtration `F_i = (1 + I^i) ∩ group-likes`,
/// restricted to the image of the free group under [`exp_magnus`].
pub fn grouplike_filtration_ranks(arity: usize, cap: usize) -> Result<Vec<usize>, SeriesError> {
    commutator_filtration_ranks(arity, cap, exp_magnus)
}
