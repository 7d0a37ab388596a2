//! Rank over prime fields.
//!
//! Odd primes below 2^63 go through Montgomery multiplication. Entries are
//! loaded without converting into Montgomery form: the matrix is then read as
//! `A * R^-1`, which has the same rank as `A`.

use crate::error::{Error, Result};
use crate::matrix::{IntMatrix, SymMatrix};

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        r
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The `count` largest primes below 2^62.
pub fn primes_below_2_62(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut c = (1u64 << 62) - 1;
    while out.len() < count {
        if is_prime(c) {
            out.push(c);
        }
        c -= 2;
    }
    out
}

/// Default modular evidence: the two largest primes below 2^62.
pub fn default_primes() -> Vec<u64> {
    vec![4_611_686_018_427_387_847, 4_611_686_018_427_387_817]
}

trait Field {
    fn p(&self) -> u64;
    fn mul(&self, a: u64, b: u64) -> u64;
    fn inv(&self, a: u64) -> u64;

    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + (self.p() - b)
        }
    }
}

struct Montgomery {
    p: u64,
    neg_inv: u64,
    one: u64,
}

impl Montgomery {
    fn new(p: u64) -> Self {
        debug_assert!(p % 2 == 1 && p < 1 << 63);
        // Newton iteration for p^-1 mod 2^64.
        let mut inv = p;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let one = ((1u128 << 64) % p as u128) as u64;
        Self {
            p,
            neg_inv: inv.wrapping_neg(),
            one,
        }
    }
}

impl Field for Montgomery {
    fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        let t = a as u128 * b as u128;
        let m = (t as u64).wrapping_mul(self.neg_inv);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    fn inv(&self, a: u64) -> u64 {
        let mut e = self.p - 2;
        let mut b = a;
        let mut r = self.one;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }
}

struct Plain {
    p: u64,
}

impl Field for Plain {
    fn p(&self) -> u64 {
        self.p
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    fn inv(&self, a: u64) -> u64 {
        let mut e = self.p - 2;
        let mut b = a;
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }
}

fn eliminate<F: Field>(f: &F, m: &mut [u64], rows: usize, cols: usize) -> usize {
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| m[r * cols + c] != 0) else {
            continue;
        };
        if piv != rank {
            for j in c..cols {
                m.swap(piv * cols + j, rank * cols + j);
            }
        }
        let inv = f.inv(m[rank * cols + c]);
        let (head, tail) = m.split_at_mut((rank + 1) * cols);
        let prow = &head[rank * cols..];
        for row in tail.chunks_exact_mut(cols) {
            let lead = row[c];
            if lead == 0 {
                continue;
            }
            let factor = f.mul(lead, inv);
            row[c] = 0;
            for j in c + 1..cols {
                let pj = prow[j];
                if pj != 0 {
                    row[j] = f.sub(row[j], f.mul(factor, pj));
                }
            }
        }
        rank += 1;
    }
    rank
}

fn rank_of_data(data: &[i64], rows: usize, cols: usize, p: u64) -> Result<usize> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let pp = p as i128;
    let mut m: Vec<u64> = data
        .iter()
        .map(|&v| (v as i128).rem_euclid(pp) as u64)
        .collect();
    Ok(if p % 2 == 1 && p < 1 << 63 {
        eliminate(&Montgomery::new(p), &mut m, rows, cols)
    } else {
        eliminate(&Plain { p }, &mut m, rows, cols)
    })
}

/// Rank of `a` over the field with `p` elements.
pub fn rank_mod_p(a: &SymMatrix, p: u64) -> Result<usize> {
    rank_of_data(a.entries(), a.n(), a.n(), p)
}

/// [`rank_mod_p`] for a matrix of any shape.
pub fn rank_mod_p_general(a: &IntMatrix, p: u64) -> Result<usize> {
    rank_of_data(a.data(), a.rows(), a.cols(), p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
        assert!(is_prime(18_446_744_073_709_551_557)); // largest 64-bit prime
    }

    #[test]
    fn default_primes_are_the_largest_below_2_62() {
        assert_eq!(default_primes(), primes_below_2_62(2));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_mod_p(&SymMatrix::identity(3), 2).unwrap(), 3);
        for p in [2, 3, 4_611_686_018_427_387_847] {
            assert_eq!(rank_mod_p(&SymMatrix::zeros(4), p).unwrap(), 0);
        }
        let two = SymMatrix::from_rows(&[vec![2, 0], vec![0, 2]]).unwrap();
        assert_eq!(rank_mod_p(&two, 2).unwrap(), 0);
        assert_eq!(rank_mod_p(&two, 3).unwrap(), 2);
        assert!(matches!(rank_mod_p(&two, 4), Err(Error::NotPrime(4))));
    }

    #[test]
    fn montgomery_matches_plain() {
        let p = 4_611_686_018_427_387_847u64;
        let mont = Montgomery::new(p);
        let plain = Plain { p };
        let r = ((1u128 << 64) % p as u128) as u64;
        let r_inv = plain.inv(r);
        for (a, b) in [(3u64, 5u64), (p - 1, p - 1), (123_456_789_012, 987_654_321_098)] {
            // mont.mul(a, b) = a * b * R^-1
            assert_eq!(mont.mul(a, b), plain.mul(plain.mul(a, b), r_inv));
            let ia = mont.inv(a);
            assert_eq!(mont.mul(a, ia), mont.one);
        }
    }

    #[test]
    fn negative_entries() {
        let m = SymMatrix::from_rows(&[vec![-1, 1], vec![1, -1]]).unwrap();
        assert_eq!(rank_mod_p(&m, 4_611_686_018_427_387_847).unwrap(), 1);
    }
}
