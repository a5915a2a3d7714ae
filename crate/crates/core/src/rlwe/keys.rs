//! Key generation: secret, public and Galois (rotation) keys.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::modarith::{add_mod, is_prime, mul_mod, pow_mod};
use crate::rlwe::encoder::rotation_galois_element;
use crate::rlwe::ntt::NttTable;
use crate::rlwe::params::RlweParams;
use crate::rlwe::poly::{PolyDomain, PolyRingElement};

pub fn sample_ternary<R: Rng + ?Sized>(n: usize, q: u64, rng: &mut R) -> PolyRingElement {
    let c: Vec<i64> = (0..n).map(|_| rng.random_range(-1i64..=1)).collect();
    PolyRingElement::from_signed(&c, q)
}

pub fn sample_error<R: Rng + ?Sized>(n: usize, q: u64, sigma: f64, rng: &mut R) -> PolyRingElement {
    let normal = Normal::new(0.0, sigma).expect("positive sigma");
    let c: Vec<i64> = (0..n).map(|_| normal.sample(rng).round() as i64).collect();
    PolyRingElement::from_signed(&c, q)
}

pub fn sample_uniform<R: Rng + ?Sized>(n: usize, q: u64, rng: &mut R) -> PolyRingElement {
    PolyRingElement { coeffs: (0..n).map(|_| rng.random_range(0..q)).collect(), modulus: q, domain: PolyDomain::Ntt }
}

/// Key-switching key from `s(X^g)` to `s(X)` over the modulus `q·P`.
///
/// Digit `j` holds `(-a·s + e + P·B^j·s(X^g), a)`, split into its residues
/// mod `q` and mod `P`, all in transform form.
#[derive(Debug, Clone)]
pub struct GaloisKey {
    pub galois_element: usize,
    /// Transform-domain permutations realizing the automorphism mod `q` and mod `P`.
    pub perm_q: Vec<usize>,
    pub perm_p: Vec<usize>,
    pub b_q: Vec<PolyRingElement>,
    pub a_q: Vec<PolyRingElement>,
    pub b_p: Vec<PolyRingElement>,
    pub a_p: Vec<PolyRingElement>,
}

#[derive(Debug, Clone)]
pub struct KeyMaterial {
    /// Secret key in NTT form mod `q`.
    pub secret: PolyRingElement,
    /// Secret key in NTT form mod `P`.
    pub secret_p: PolyRingElement,
    /// Secret key coefficients mod q (for LWE decryption).
    pub secret_coeffs: Vec<u64>,
    /// `(b, a)` with `b = -a·s + e`, NTT form.
    pub public: (PolyRingElement, PolyRingElement),
    /// Left-rotation offset to key.
    pub galois_keys: BTreeMap<usize, GaloisKey>,
}

/// Generates keys supporting left rotations by each offset in `rot_offsets`.
///
/// Offset 0 needs no key. Offsets must be below `N′`.
pub fn keygen<R: Rng + ?Sized>(
    params: &RlweParams,
    table: &NttTable,
    table_p: &NttTable,
    rot_offsets: &[usize],
    rng: &mut R,
) -> Result<KeyMaterial> {
    let n = params.degree();
    let q = params.q;
    let sp = params.special_prime;
    let t = params.plain_modulus();
    if !is_prime(t) || t % (2 * n as u64) != 1 {
        return Err(Error::BadModulus(format!("plain modulus {t} must be a prime congruent to 1 mod {}", 2 * n)));
    }
    let s_signed: Vec<i64> = (0..n).map(|_| rng.random_range(-1i64..=1)).collect();
    let s = PolyRingElement::from_signed(&s_signed, q);
    let secret_coeffs = s.coeffs.clone();
    let s_ntt = s.to_ntt(table);
    let s_p = PolyRingElement::from_signed(&s_signed, sp).to_ntt(table_p);
    let a = sample_uniform(n, q, rng);
    let e = sample_error(n, q, params.sigma, rng).to_ntt(table);
    let b = e.sub(&a.mul_pointwise(&s_ntt)?)?;

    let slots = params.scheme.slot_count;
    let normal = Normal::new(0.0, params.sigma).expect("positive sigma");
    let mut galois_keys = BTreeMap::new();
    for &k in rot_offsets {
        if k >= slots {
            return Err(Error::OffsetOutOfRange { offset: k, slots });
        }
        if k == 0 || galois_keys.contains_key(&k) {
            continue;
        }
        let g = rotation_galois_element(k, n);
        let perm_q = table.automorphism_perm(g);
        let perm_p = table_p.automorphism_perm(g);
        let s_g = s_ntt.permuted(&perm_q);
        let p_mod_q = sp % q;
        let mut key = GaloisKey {
            galois_element: g,
            perm_q,
            perm_p,
            b_q: Vec::new(),
            a_q: Vec::new(),
            b_p: Vec::new(),
            a_p: Vec::new(),
        };
        for j in 0..params.digits() {
            let factor = mul_mod(p_mod_q, pow_mod(2, u64::from(params.digit_bits) * j as u64, q), q);
            let err: Vec<i64> = (0..n).map(|_| normal.sample(rng).round() as i64).collect();
            let aq = sample_uniform(n, q, rng);
            let ap = sample_uniform(n, sp, rng);
            let eq = PolyRingElement::from_signed(&err, q).to_ntt(table);
            let ep = PolyRingElement::from_signed(&err, sp).to_ntt(table_p);
            let mut bq = eq.sub(&aq.mul_pointwise(&s_ntt)?)?;
            for (x, &sg) in bq.coeffs.iter_mut().zip(&s_g.coeffs) {
                *x = add_mod(*x, mul_mod(factor, sg, q), q);
            }
            let bp = ep.sub(&ap.mul_pointwise(&s_p)?)?;
            key.b_q.push(bq);
            key.a_q.push(aq);
            key.b_p.push(bp);
            key.a_p.push(ap);
        }
        galois_keys.insert(k, key);
    }
    Ok(KeyMaterial { secret: s_ntt, secret_p: s_p, secret_coeffs, public: (b, a), galois_keys })
}
