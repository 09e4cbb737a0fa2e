//! Degree-truncated Gröbner bases for homogeneous two-sided ideals in the
//! free associative algebra, and the Hilbert series of the quotient by
//! counting normal words.
//!
//! Words are compared by length, then lexicographically; the leading word of
//! a homogeneous polynomial is its lexicographically largest word.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_traits::{One, Zero};

use crate::exactla::Rational;

pub(super) type Word = Vec<u16>;
pub(super) type NcPoly = BTreeMap<Word, Rational>;

fn add_scaled(p: &mut NcPoly, c: &Rational, q: &NcPoly, left: &[u16], right: &[u16]) {
    for (w, d) in q {
        let mut word = Vec::with_capacity(left.len() + w.len() + right.len());
        word.extend_from_slice(left);
        word.extend_from_slice(w);
        word.extend_from_slice(right);
        let entry = p.entry(word).or_insert_with(Rational::zero);
        *entry += c * d;
        if entry.is_zero() {
            let key: Word = [left, w.as_slice(), right].concat();
            p.remove(&key);
        }
    }
}

struct Basis {
    /// Monic elements, keyed by leading word.
    elements: Vec<(Word, NcPoly)>,
    leads: HashMap<Word, usize>,
    lengths: Vec<usize>,
}

impl Basis {
    fn new() -> Self {
        Basis {
            elements: Vec::new(),
            leads: HashMap::new(),
            lengths: Vec::new(),
        }
    }

    /// A factorization `w = u · lead(g) · v`.
    fn divisor(&self, w: &[u16]) -> Option<(usize, usize)> {
        for &len in &self.lengths {
            if len > w.len() {
                continue;
            }
            for start in 0..=w.len() - len {
                if let Some(&g) = self.leads.get(&w[start..start + len]) {
                    return Some((g, start));
                }
            }
        }
        None
    }

    fn reduce(&self, mut p: NcPoly) -> NcPoly {
        let mut done = NcPoly::new();
        while let Some((w, c)) = p.pop_last() {
            match self.divisor(&w) {
                Some((g, start)) => {
                    let (lead, poly) = &self.elements[g];
                    let (left, right) = (&w[..start], &w[start + lead.len()..]);
                    // Cancel c·w using c·(left · g · right); the leading term
                    // has already been removed from p.
                    let mut rest = poly.clone();
                    rest.remove(lead);
                    add_scaled(&mut p, &-c, &rest, left, right);
                }
                None => {
                    done.insert(w, c);
                }
            }
        }
        done
    }

    fn insert(&mut self, p: NcPoly) -> bool {
        let p = self.reduce(p);
        let Some((lead, c)) = p.last_key_value().map(|(w, c)| (w.clone(), c.clone())) else {
            return false;
        };
        let inv = Rational::one() / c;
        let monic: NcPoly = p.into_iter().map(|(w, d)| (w, d * &inv)).collect();
        if !self.lengths.contains(&lead.len()) {
            self.lengths.push(lead.len());
        }
        self.leads.insert(lead.clone(), self.elements.len());
        self.elements.push((lead, monic));
        true
    }
}

/// `dim (T(V)/J)_d` for `d = 0..=cap`, where `V` has `m` letters and `J` is
/// generated by the given homogeneous polynomials of degree at least 1.
pub(super) fn quotient_dims(m: usize, generators: &[NcPoly], cap: usize) -> Vec<u128> {
    let mut by_degree: BTreeMap<usize, Vec<&NcPoly>> = BTreeMap::new();
    for g in generators {
        if let Some(w) = g.keys().next() {
            debug_assert!(g.keys().all(|u| u.len() == w.len()), "homogeneous generators");
            by_degree.entry(w.len()).or_default().push(g);
        }
    }
    let mut basis = Basis::new();
    for degree in 1..=cap {
        // Overlaps `lead(g) = u·s`, `lead(h) = s·v` with `|u·s·v| = degree`;
        // every element present has degree < `degree` at this point.
        let mut candidates: Vec<NcPoly> = Vec::new();
        for (lg, g) in &basis.elements {
            for (lh, h) in &basis.elements {
                let (p, q) = (lg.len(), lh.len());
                if p + q <= degree {
                    continue;
                }
                let k = p + q - degree;
                if k == 0 || k >= p.min(q) || lg[p - k..] != lh[..k] {
                    continue;
                }
                let mut s = NcPoly::new();
                add_scaled(&mut s, &Rational::one(), g, &[], &lh[k..]);
                add_scaled(&mut s, &-Rational::one(), h, &lg[..p - k], &[]);
                candidates.push(s);
            }
        }
        for g in by_degree.get(&degree).into_iter().flatten() {
            candidates.push((*g).clone());
        }
        for s in candidates {
            basis.insert(s);
        }
    }
    count_normal_words(m, &basis, cap)
}

/// Normal words are those with no leading word as a factor. Any forbidden
/// factor ending at the last letter fits in the last `L` letters, `L` the
/// longest leading word, so words are tracked by that suffix only.
fn count_normal_words(m: usize, basis: &Basis, cap: usize) -> Vec<u128> {
    let longest = basis.lengths.iter().copied().max().unwrap_or(1);
    let leads: HashSet<&Word> = basis.leads.keys().collect();
    let mut states: HashMap<Word, u128> = HashMap::from([(Vec::new(), 1)]);
    let mut dims = vec![1];
    for _ in 1..=cap {
        let mut next: HashMap<Word, u128> = HashMap::new();
        for (s, count) in &states {
            for a in 0..m as u16 {
                let mut w = s.clone();
                w.push(a);
                if (1..=w.len()).any(|len| leads.contains(&w[w.len() - len..].to_vec())) {
                    continue;
                }
                let keep = w.len().min(longest.saturating_sub(1));
                *next.entry(w[w.len() - keep..].to_vec()).or_insert(0) += count;
            }
        }
        dims.push(next.values().sum());
        states = next;
    }
    dims
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::rat;

    fn poly(terms: &[(&[u16], i64)]) -> NcPoly {
        terms.iter().map(|(w, c)| (w.to_vec(), rat(*c))).collect()
    }

    fn binomial(n: u128, k: u128) -> u128 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn free_algebra() {
        assert_eq!(quotient_dims(3, &[], 4), [1, 3, 9, 27, 81]);
    }

    #[test]
    fn polynomial_ring() {
        let commutators: Vec<NcPoly> = (0..3u16)
            .flat_map(|a| (a + 1..3).map(move |b| poly(&[(&[a, b], 1), (&[b, a], -1)])))
            .collect();
        let dims = quotient_dims(3, &commutators, 6);
        for (d, &n) in dims.iter().enumerate() {
            assert_eq!(n, binomial(d as u128 + 2, 2));
        }
    }

    #[test]
    fn needs_a_cubic_element() {
        // Leading word yy overlaps itself, so the basis is not quadratic.
        let r = poly(&[(&[0, 1], 1), (&[1, 1], -1)]);
        let dims = quotient_dims(2, &[r.clone()], 6);
        let direct = direct_dims(2, &r, 6);
        assert_eq!(dims, direct);
    }

    /// `dim T_d / J_d` by spanning `J_d` with all `u·r·v`.
    fn direct_dims(m: usize, r: &NcPoly, cap: usize) -> Vec<u128> {
        use crate::exactla::{RowSpace, SparseVec};
        let words = |d: usize| -> Vec<Word> {
            (0..d).fold(vec![Vec::new()], |acc, _| {
                acc.into_iter()
                    .flat_map(|w| {
                        (0..m as u16).map(move |a| {
                            let mut w = w.clone();
                            w.push(a);
                            w
                        })
                    })
                    .collect()
            })
        };
        let rlen = r.keys().next().unwrap().len();
        let mut dims = vec![1];
        for d in 1..=cap {
            let all = words(d);
            let index: HashMap<&Word, usize> = all.iter().enumerate().map(|(i, w)| (w, i)).collect();
            let mut span = RowSpace::new();
            if d >= rlen {
                for left in 0..=d - rlen {
                    for u in words(left) {
                        for v in words(d - rlen - left) {
                            let mut p = NcPoly::new();
                            add_scaled(&mut p, &rat(1), r, &u, &v);
                            let row: SparseVec = p.iter().map(|(w, c)| (index[w], c.clone())).collect();
                            span.insert(row);
                        }
                    }
                }
            }
            dims.push((all.len() - span.rank()) as u128);
        }
        dims
    }
}
