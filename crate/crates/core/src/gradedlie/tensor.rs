//! Homogeneous elements of the free associative algebra on `m` letters.
//!
//! A word of length `n` is encoded as its base-`m` numeral, so a homogeneous
//! element of degree `n` is a sparse vector indexed by `0..m^n`.

use crate::exactla::{axpy, Rational, SparseVec};
use num_traits::One;

use super::LieExpr;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tensor {
    pub degree: u32,
    pub coeffs: SparseVec,
}

impl Tensor {
    pub fn letter(index: usize) -> Tensor {
        Tensor {
            degree: 1,
            coeffs: [(index, Rational::one())].into_iter().collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn product(&self, other: &Tensor, m: usize) -> Tensor {
        let shift = m.pow(other.degree);
        let mut coeffs = SparseVec::new();
        for (&u, a) in &self.coeffs {
            for (&v, b) in &other.coeffs {
                let entry = coeffs.entry(u * shift + v).or_insert_with(Rational::default);
                *entry += a * b;
            }
        }
        coeffs.retain(|_, c| *c != Rational::default());
        Tensor {
            degree: self.degree + other.degree,
            coeffs,
        }
    }

    /// Commutator `uv - vu`.
    pub fn bracket(&self, other: &Tensor, m: usize) -> Tensor {
        let mut out = self.product(other, m);
        let back = other.product(self, m);
        axpy(&mut out.coeffs, &-Rational::one(), &back.coeffs);
        out
    }

    pub fn add_scaled(&mut self, c: &Rational, other: &Tensor) {
        debug_assert!(self.is_zero() || other.is_zero() || self.degree == other.degree);
        if self.is_zero() {
            self.degree = other.degree;
        }
        axpy(&mut self.coeffs, c, &other.coeffs);
    }

    pub fn from_expr(expr: &LieExpr, m: usize) -> Tensor {
        match expr {
            LieExpr::Generator(i) => Tensor::letter(*i),
            LieExpr::Bracket(a, b) => Tensor::from_expr(a, m).bracket(&Tensor::from_expr(b, m), m),
        }
    }
}

/// Letters of the word with the given code.
pub fn decode_word(mut code: usize, length: u32, m: usize) -> Vec<u16> {
    let mut w = vec![0u16; length as usize];
    for slot in w.iter_mut().rev() {
        *slot = (code % m) as u16;
        code /= m;
    }
    w
}

pub fn encode_word(word: &[u16], m: usize) -> usize {
    word.iter().fold(0, |acc, &l| acc * m + l as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::rat;

    #[test]
    fn commutator_expansion() {
        let x = Tensor::letter(0);
        let y = Tensor::letter(1);
        let xy = x.bracket(&y, 2);
        assert_eq!(xy.coeffs.get(&encode_word(&[0, 1], 2)), Some(&rat(1)));
        assert_eq!(xy.coeffs.get(&encode_word(&[1, 0], 2)), Some(&rat(-1)));
        assert_eq!(decode_word(encode_word(&[1, 0, 1], 3), 3, 3), vec![1, 0, 1]);
    }
}
