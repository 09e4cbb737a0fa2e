//! Lyndon words, their standard bracketing, and Witt numbers.

use super::LieExpr;

/// All Lyndon words over `0..m` of length exactly `length`, in lexicographic
/// order (Duval's generation algorithm).
pub fn lyndon_basis(m: usize, length: usize) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    if m == 0 || length == 0 {
        return out;
    }
    let mut w: Vec<i32> = vec![-1];
    while !w.is_empty() {
        *w.last_mut().expect("nonempty") += 1;
        if w.len() == length {
            out.push(w.iter().map(|&x| x as u16).collect());
        }
        let k = w.len();
        while w.len() < length {
            w.push(w[w.len() - k]);
        }
        while w.last() == Some(&(m as i32 - 1)) {
            w.pop();
        }
    }
    out
}

/// Standard factorization `w = uv` with `v` the longest proper Lyndon suffix.
pub fn standard_factorization(w: &[u16]) -> Option<(&[u16], &[u16])> {
    (1..w.len())
        .find(|&i| is_lyndon(&w[i..]))
        .map(|i| (&w[..i], &w[i..]))
}

/// A word is Lyndon iff it is strictly smaller than each of its proper suffixes.
pub fn is_lyndon(w: &[u16]) -> bool {
    !w.is_empty() && (1..w.len()).all(|i| w < &w[i..])
}

/// The bracket tree attached to a Lyndon word by standard factorization.
pub fn standard_bracketing(w: &[u16]) -> LieExpr {
    match standard_factorization(w) {
        None => LieExpr::Generator(w[0] as usize),
        Some((u, v)) => LieExpr::bracket(standard_bracketing(u), standard_bracketing(v)),
    }
}

pub fn mobius(n: u64) -> i64 {
    let mut n = n;
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// `W_m(i) = (1/i) * sum_{d | i} mu(d) m^(i/d)`.
pub fn witt_number(m: u64, i: u64) -> u64 {
    assert!(i >= 1, "Witt numbers start in degree 1");
    let total: i128 = (1..=i)
        .filter(|d| i % d == 0)
        .map(|d| mobius(d) as i128 * (m as i128).pow((i / d) as u32))
        .sum();
    (total / i as i128) as u64
}

/// Dimensions of the free Lie algebra on `m` generators in degrees `1..=cap`.
pub fn free_lie_dims(m: u64, cap: u32) -> Vec<u64> {
    (1..=cap as u64).map(|i| witt_number(m, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_lyndon_count(m: usize, length: usize) -> usize {
        let total = m.pow(length as u32);
        (0..total)
            .filter(|&code| {
                let mut w = vec![0u16; length];
                let mut c = code;
                for slot in w.iter_mut().rev() {
                    *slot = (c % m) as u16;
                    c /= m;
                }
                // strictly smaller than every proper rotation
                (1..length).all(|i| {
                    let mut r = w[i..].to_vec();
                    r.extend_from_slice(&w[..i]);
                    w < r
                })
            })
            .count()
    }

    #[test]
    fn lyndon_counts_two_letters() {
        let counts: Vec<usize> = (1..=5).map(|i| lyndon_basis(2, i).len()).collect();
        assert_eq!(counts, vec![2, 1, 2, 3, 6]);
        for i in 1..=7 {
            assert_eq!(lyndon_basis(2, i).len(), brute_force_lyndon_count(2, i));
        }
    }

    #[test]
    fn lyndon_small_cases() {
        assert!(lyndon_basis(1, 2).is_empty());
        assert_eq!(lyndon_basis(1, 1), vec![vec![0]]);
        assert_eq!(lyndon_basis(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(lyndon_basis(3, 4).len(), brute_force_lyndon_count(3, 4));
    }

    #[test]
    fn witt_matches_lyndon_counts() {
        for m in 1..=4u64 {
            for i in 1..=8u64 {
                assert_eq!(witt_number(m, i) as usize, lyndon_basis(m as usize, i as usize).len());
            }
        }
        assert_eq!(free_lie_dims(0, 3), vec![0, 0, 0]);
    }

    #[test]
    fn standard_factorization_examples() {
        assert_eq!(standard_factorization(&[0, 0, 1]), Some((&[0u16][..], &[0u16, 1][..])));
        assert_eq!(standard_factorization(&[0, 1, 1]), Some((&[0u16, 1][..], &[1u16][..])));
        assert_eq!(standard_factorization(&[1]), None);
    }
}
