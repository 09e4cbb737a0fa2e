//! Integer power series truncated above a fixed degree.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Power series in `t` with integer coefficients, modulo `t^(cap+1)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncatedPoly {
    coeffs: Vec<BigInt>,
}

impl TruncatedPoly {
    pub fn zero(cap: usize) -> Self {
        TruncatedPoly {
            coeffs: vec![BigInt::zero(); cap + 1],
        }
    }

    pub fn one(cap: usize) -> Self {
        let mut p = Self::zero(cap);
        p.coeffs[0] = BigInt::one();
        p
    }

    /// Truncates (or zero-pads) the given coefficients, constant term first.
    pub fn from_coeffs<I: Into<BigInt>>(coeffs: impl IntoIterator<Item = I>, cap: usize) -> Self {
        let mut p = Self::zero(cap);
        for (i, c) in coeffs.into_iter().enumerate() {
            if i > cap {
                break;
            }
            p.coeffs[i] = c.into();
        }
        p
    }

    pub fn cap(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &BigInt {
        &self.coeffs[i]
    }

    pub fn mul(&self, other: &TruncatedPoly) -> TruncatedPoly {
        let cap = self.cap().min(other.cap());
        let mut out = Self::zero(cap);
        for (i, a) in self.coeffs.iter().enumerate().take(cap + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(cap + 1 - i) {
                out.coeffs[i + j] += a * b;
            }
        }
        out
    }

    /// Substitutes `t -> -t`.
    pub fn negate_variable(&self) -> TruncatedPoly {
        TruncatedPoly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        }
    }

    /// `(1 - t^degree)^exponent`, expanded binomially.
    pub fn one_minus_power(degree: usize, exponent: u64, cap: usize) -> TruncatedPoly {
        let mut out = Self::zero(cap);
        let mut binom = BigInt::one();
        let mut k: u64 = 0;
        while k <= exponent && (k as usize) * degree <= cap {
            let c = if k % 2 == 0 { binom.clone() } else { -binom.clone() };
            out.coeffs[k as usize * degree] += c;
            binom = binom * BigInt::from(exponent - k) / BigInt::from(k + 1);
            k += 1;
            if degree == 0 {
                break;
            }
        }
        out
    }

    /// `prod_i (1 - t^i)^ranks[i-1]` modulo `t^(cap+1)`.
    pub fn lcs_product(ranks: &[u64], cap: usize) -> TruncatedPoly {
        ranks
            .iter()
            .enumerate()
            .filter(|(i, _)| i + 1 <= cap)
            .fold(Self::one(cap), |acc, (i, &r)| acc.mul(&Self::one_minus_power(i + 1, r, cap)))
    }

    /// Multiplicative inverse, defined when the constant term is `±1`.
    pub fn inverse(&self) -> Option<TruncatedPoly> {
        let c0 = &self.coeffs[0];
        if !c0.abs().is_one() {
            return None;
        }
        let mut out = Self::zero(self.cap());
        for i in 0..=self.cap() {
            let mut acc = if i == 0 { BigInt::one() } else { BigInt::zero() };
            for j in 1..=i {
                acc -= &self.coeffs[j] * &out.coeffs[i - j];
            }
            out.coeffs[i] = acc * c0;
        }
        Some(out)
    }

    /// Lowest degree where the two series differ.
    pub fn first_difference(&self, other: &TruncatedPoly) -> Option<usize> {
        let cap = self.cap().min(other.cap());
        (0..=cap).find(|&i| self.coeffs[i] != other.coeffs[i])
    }
}

impl fmt::Display for TruncatedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{a}t")?,
                (_, true) => write!(f, "t^{i}")?,
                (_, false) => write!(f, "{a}t^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.cap() + 1)
    }
}
