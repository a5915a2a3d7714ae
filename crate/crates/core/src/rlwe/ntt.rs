//! Negacyclic number-theoretic transform over `Z_p[X]/(X^N + 1)`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::modarith::{inv_mod, is_prime, mul_mod, pow_mod};

#[inline]
fn shoup(w: u64, p: u64) -> u64 {
    (((w as u128) << 64) / p as u128) as u64
}

/// `a * w mod p` using the precomputed `shoup(w, p)`; requires `p < 2^63`.
#[inline]
fn mul_shoup(a: u64, w: u64, w_shoup: u64, p: u64) -> u64 {
    let hi = ((a as u128 * w_shoup as u128) >> 64) as u64;
    let r = a.wrapping_mul(w).wrapping_sub(hi.wrapping_mul(p));
    if r >= p {
        r - p
    } else {
        r
    }
}

fn bit_reverse(mut x: usize, bits: u32) -> usize {
    let mut r = 0;
    for _ in 0..bits {
        r = (r << 1) | (x & 1);
        x >>= 1;
    }
    r
}

/// Primitive `2n`-th root of unity mod prime `p`, if one exists.
pub fn primitive_root_2n(n: usize, p: u64) -> Option<u64> {
    let two_n = 2 * n as u64;
    if !(p - 1).is_multiple_of(two_n) {
        return None;
    }
    (2..p).map(|x| pow_mod(x, (p - 1) / two_n, p)).find(|&g| pow_mod(g, n as u64, p) == p - 1)
}

/// Precomputed twiddles for one `(N, p)` pair.
///
/// The transform output at position `i` is the input polynomial evaluated at
/// `psi^exponent(i)`; the exponent map is recovered by transforming `X`.
#[derive(Debug, Clone)]
pub struct NttTable {
    n: usize,
    p: u64,
    psi_rev: Vec<u64>,
    psi_rev_shoup: Vec<u64>,
    psi_inv_rev: Vec<u64>,
    psi_inv_rev_shoup: Vec<u64>,
    n_inv: u64,
    n_inv_shoup: u64,
    exp_of_pos: Vec<usize>,
    pos_of_exp: Vec<Option<usize>>,
}

impl NttTable {
    pub fn new(n: usize, p: u64) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidParams(format!("NTT size {n} is not a power of two >= 2")));
        }
        if p >= 1 << 62 || !is_prime(p) {
            return Err(Error::BadModulus(format!("{p} is not a prime below 2^62")));
        }
        let psi = primitive_root_2n(n, p)
            .ok_or_else(|| Error::BadModulus(format!("{p} is not 1 mod {}", 2 * n)))?;
        let psi_inv = inv_mod(psi, p);
        let bits = n.trailing_zeros();
        let mut psi_rev = vec![0; n];
        let mut psi_inv_rev = vec![0; n];
        let (mut pw, mut pw_inv) = (1u64, 1u64);
        for i in 0..n {
            let r = bit_reverse(i, bits);
            psi_rev[r] = pw;
            psi_inv_rev[r] = pw_inv;
            pw = mul_mod(pw, psi, p);
            pw_inv = mul_mod(pw_inv, psi_inv, p);
        }
        let n_inv = inv_mod(n as u64, p);
        let mut table = Self {
            n,
            p,
            psi_rev_shoup: psi_rev.iter().map(|&w| shoup(w, p)).collect(),
            psi_inv_rev_shoup: psi_inv_rev.iter().map(|&w| shoup(w, p)).collect(),
            psi_rev,
            psi_inv_rev,
            n_inv,
            n_inv_shoup: shoup(n_inv, p),
            exp_of_pos: Vec::new(),
            pos_of_exp: Vec::new(),
        };
        let mut log = HashMap::with_capacity(2 * n);
        let mut pw = 1u64;
        for e in 0..2 * n {
            log.insert(pw, e);
            pw = mul_mod(pw, psi, p);
        }
        let mut x = vec![0u64; n];
        x[1] = 1;
        table.forward(&mut x);
        let exp_of_pos: Vec<usize> = x.iter().map(|v| log[v]).collect();
        let mut pos_of_exp = vec![None; 2 * n];
        for (i, &e) in exp_of_pos.iter().enumerate() {
            pos_of_exp[e] = Some(i);
        }
        table.exp_of_pos = exp_of_pos;
        table.pos_of_exp = pos_of_exp;
        Ok(table)
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Odd exponent `e` such that output position `i` holds `a(psi^e)`.
    pub fn exponent(&self, pos: usize) -> usize {
        self.exp_of_pos[pos]
    }

    /// Output position holding the evaluation at `psi^e`, for odd `e < 2N`.
    pub fn position(&self, e: usize) -> usize {
        self.pos_of_exp[e % (2 * self.n)].expect("odd exponent")
    }

    /// Permutation realizing `a(X) -> a(X^g)` on transformed vectors:
    /// `out[i] = in[perm[i]]`.
    pub fn automorphism_perm(&self, g: usize) -> Vec<usize> {
        let two_n = 2 * self.n;
        (0..self.n).map(|i| self.position(self.exp_of_pos[i] * g % two_n)).collect()
    }

    pub fn forward(&self, a: &mut [u64]) {
        let (n, p) = (self.n, self.p);
        debug_assert_eq!(a.len(), n);
        let mut t = n;
        let mut m = 1;
        while m < n {
            t >>= 1;
            for i in 0..m {
                let j1 = 2 * i * t;
                let (w, ws) = (self.psi_rev[m + i], self.psi_rev_shoup[m + i]);
                for j in j1..j1 + t {
                    let u = a[j];
                    let v = mul_shoup(a[j + t], w, ws, p);
                    let s = u + v;
                    a[j] = if s >= p { s - p } else { s };
                    a[j + t] = if u >= v { u - v } else { u + p - v };
                }
            }
            m <<= 1;
        }
    }

    pub fn inverse(&self, a: &mut [u64]) {
        let (n, p) = (self.n, self.p);
        debug_assert_eq!(a.len(), n);
        let mut t = 1;
        let mut m = n;
        while m > 1 {
            let h = m >> 1;
            let mut j1 = 0;
            for i in 0..h {
                let (w, ws) = (self.psi_inv_rev[h + i], self.psi_inv_rev_shoup[h + i]);
                for j in j1..j1 + t {
                    let u = a[j];
                    let v = a[j + t];
                    let s = u + v;
                    a[j] = if s >= p { s - p } else { s };
                    let d = if u >= v { u - v } else { u + p - v };
                    a[j + t] = mul_shoup(d, w, ws, p);
                }
                j1 += 2 * t;
            }
            t <<= 1;
            m = h;
        }
        for x in a.iter_mut() {
            *x = mul_shoup(*x, self.n_inv, self.n_inv_shoup, p);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_evaluation_points() {
        let t = NttTable::new(16, 97).unwrap();
        let poly: Vec<u64> = (0..16).map(|i| (i * 7 + 3) % 97).collect();
        let mut a = poly.clone();
        t.forward(&mut a);
        let psi = primitive_root_2n(16, 97).unwrap();
        for (i, &v) in a.iter().enumerate() {
            let x = pow_mod(psi, t.exponent(i) as u64, 97);
            let eval = poly.iter().rev().fold(0, |acc, &c| (acc * x + c) % 97);
            assert_eq!(v, eval);
        }
        t.inverse(&mut a);
        assert_eq!(a, poly);
    }

    #[test]
    fn rejects_non_batching_modulus() {
        assert!(matches!(NttTable::new(16, 23), Err(Error::BadModulus(_))));
        assert!(matches!(NttTable::new(16, 91), Err(Error::BadModulus(_))));
    }
}
