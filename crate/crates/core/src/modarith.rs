//! Scalar arithmetic modulo a word-sized modulus.

#[inline]
pub fn add_mod(a: u64, b: u64, q: u64) -> u64 {
    let s = a as u128 + b as u128;
    (if s >= q as u128 { s - q as u128 } else { s }) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, q: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        (a as u128 + q as u128 - b as u128) as u64
    }
}

#[inline]
pub fn neg_mod(a: u64, q: u64) -> u64 {
    if a == 0 {
        0
    } else {
        q - a
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, q: u64) -> u64 {
    let mut acc = 1 % q;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, q);
        }
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    acc
}

/// Inverse modulo a prime.
pub fn inv_mod(a: u64, q: u64) -> u64 {
    pow_mod(a, q - 2, q)
}

/// Centered representative in `(-q/2, q/2]`.
#[inline]
pub fn centered(a: u64, q: u64) -> i128 {
    if a > q / 2 {
        a as i128 - q as i128
    } else {
        a as i128
    }
}

#[inline]
pub fn reduce_i128(v: i128, q: u64) -> u64 {
    v.rem_euclid(q as i128) as u64
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
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
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Largest prime `p < 2^bits` with `p ≡ 1 (mod step)`.
pub fn prime_below(bits: u32, step: u64) -> Option<u64> {
    let top = if bits >= 64 { u64::MAX } else { (1u64 << bits) - 1 };
    let mut k = (top - 1) / step;
    while k > 0 {
        let p = k * step + 1;
        if is_prime(p) {
            return Some(p);
        }
        k -= 1;
    }
    None
}
