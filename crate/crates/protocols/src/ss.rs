//! Two-party additive secret sharing mod t with dealer-supplied correlated
//! randomness. Share 1 lives at party A, share 2 at party B.

use hesimd_core::modarith::{add_mod, centered, mul_mod, neg_mod, reduce_i128, sub_mod};
use hesimd_core::simd::{Party, SimdBackend};
use rand::Rng;
use rand_chacha::ChaCha20Rng;

use crate::error::{ProtocolError, Result};
use crate::netsim::{Network, Payload};

/// `s1 + s2 ≡ v (mod t)` element-wise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shares {
    pub s1: Vec<u64>,
    pub s2: Vec<u64>,
    pub t: u64,
}

pub fn random_residues<R: Rng + ?Sized>(len: usize, t: u64, rng: &mut R) -> Vec<u64> {
    (0..len).map(|_| rng.random_range(0..t)).collect()
}

/// Share 1 uniform, share 2 = v − share 1.
pub fn secret_share<R: Rng + ?Sized>(v: &[u64], t: u64, rng: &mut R) -> Shares {
    let s1 = random_residues(v.len(), t, rng);
    let s2 = v.iter().zip(&s1).map(|(&x, &r)| sub_mod(x % t, r, t)).collect();
    Shares { s1, s2, t }
}

pub fn reconstruct(s: &Shares) -> Vec<u64> {
    s.s1.iter().zip(&s.s2).map(|(&a, &b)| add_mod(a, b, s.t)).collect()
}

fn zip_map(a: &[u64], b: &[u64], f: impl Fn(u64, u64) -> u64) -> Vec<u64> {
    a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
}

impl Shares {
    /// Shares of a value known to party A (B holds zeros).
    pub fn from_a(v: Vec<u64>, t: u64) -> Self {
        let n = v.len();
        Self { s1: v, s2: vec![0; n], t }
    }

    /// Shares of a value known to party B.
    pub fn from_b(v: Vec<u64>, t: u64) -> Self {
        let n = v.len();
        Self { s1: vec![0; n], s2: v, t }
    }

    pub fn len(&self) -> usize {
        self.s1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s1.is_empty()
    }

    fn check(&self, o: &Shares) -> Result<()> {
        if self.len() != o.len() || self.t != o.t {
            return Err(ProtocolError::ShapeMismatch(format!("share lengths {} and {}", self.len(), o.len())));
        }
        Ok(())
    }

    pub fn add(&self, o: &Shares) -> Result<Shares> {
        self.check(o)?;
        let t = self.t;
        Ok(Shares { s1: zip_map(&self.s1, &o.s1, |a, b| add_mod(a, b, t)), s2: zip_map(&self.s2, &o.s2, |a, b| add_mod(a, b, t)), t })
    }

    pub fn sub(&self, o: &Shares) -> Result<Shares> {
        self.check(o)?;
        let t = self.t;
        Ok(Shares { s1: zip_map(&self.s1, &o.s1, |a, b| sub_mod(a, b, t)), s2: zip_map(&self.s2, &o.s2, |a, b| sub_mod(a, b, t)), t })
    }

    /// Multiplies both shares by a public residue.
    pub fn scale(&self, c: u64) -> Shares {
        let t = self.t;
        Shares {
            s1: self.s1.iter().map(|&a| mul_mod(a, c, t)).collect(),
            s2: self.s2.iter().map(|&a| mul_mod(a, c, t)).collect(),
            t,
        }
    }

    /// Multiplies element-wise by a public vector.
    pub fn scale_each(&self, c: &[u64]) -> Shares {
        let t = self.t;
        Shares { s1: zip_map(&self.s1, c, |a, b| mul_mod(a, b, t)), s2: zip_map(&self.s2, c, |a, b| mul_mod(a, b, t)), t }
    }

    /// Adds a public vector (party A adds it to its share).
    pub fn add_public(&self, v: &[u64]) -> Result<Shares> {
        self.check(&Shares::from_a(v.to_vec(), self.t))?;
        let t = self.t;
        Ok(Shares { s1: zip_map(&self.s1, v, |a, b| add_mod(a, b, t)), s2: self.s2.clone(), t })
    }
}

/// A trusted dealer handing out correlated randomness ahead of time.
pub struct Dealer {
    rng: ChaCha20Rng,
    t: u64,
}

/// `c = a·b`, all secret-shared.
pub struct BeaverTriple {
    pub a: Shares,
    pub b: Shares,
    pub c: Shares,
}

/// `r` and `⌊r / Δ⌋`, secret-shared, with `r` uniform in `[0, t − 2^bound_bits)`.
pub struct TruncationPair {
    pub r: Shares,
    pub r_hi: Shares,
}

/// Magnitudes below `2^(TRUNCATION_BOUND_BITS − 1)` truncate correctly.
pub const TRUNCATION_BOUND_BITS: u32 = 50;

impl Dealer {
    pub fn new(rng: ChaCha20Rng, t: u64) -> Self {
        Self { rng, t }
    }

    pub fn beaver(&mut self, len: usize) -> BeaverTriple {
        let t = self.t;
        let a = random_residues(len, t, &mut self.rng);
        let b = random_residues(len, t, &mut self.rng);
        let c: Vec<u64> = zip_map(&a, &b, |x, y| mul_mod(x, y, t));
        BeaverTriple {
            a: secret_share(&a, t, &mut self.rng),
            b: secret_share(&b, t, &mut self.rng),
            c: secret_share(&c, t, &mut self.rng),
        }
    }

    pub fn truncation_pair(&mut self, len: usize, delta: u64) -> TruncationPair {
        let t = self.t;
        let hi = t - (1u64 << TRUNCATION_BOUND_BITS);
        let r: Vec<u64> = (0..len).map(|_| self.rng.random_range(0..hi)).collect();
        let r_hi: Vec<u64> = r.iter().map(|&x| x / delta).collect();
        TruncationPair { r: secret_share(&r, t, &mut self.rng), r_hi: secret_share(&r_hi, t, &mut self.rng) }
    }
}

/// Hands both parties their halves of a share vector through the network.
fn deal<B: SimdBackend>(net: &mut Network<B>, s: &Shares) -> Result<()> {
    net.send_labeled(Party::Dealer, Party::A, Payload::Values(s.s1.clone()), "offline")?;
    net.send_labeled(Party::Dealer, Party::B, Payload::Values(s.s2.clone()), "offline")?;
    net.recv_values(Party::A, Party::Dealer)?;
    net.recv_values(Party::B, Party::Dealer)?;
    Ok(())
}

/// Both parties reveal their shares of `s` to each other; returns the opened value.
fn open<B: SimdBackend>(net: &mut Network<B>, s: &Shares) -> Result<Vec<u64>> {
    net.send(Party::A, Party::B, Payload::Values(s.s1.clone()))?;
    net.send(Party::B, Party::A, Payload::Values(s.s2.clone()))?;
    let from_a = net.recv_values(Party::B, Party::A)?;
    let from_b = net.recv_values(Party::A, Party::B)?;
    Ok(zip_map(&from_a, &from_b, |a, b| add_mod(a, b, s.t)))
}

/// Element-wise product of two shared vectors with one Beaver triple each.
pub fn mul_shares<B: SimdBackend>(net: &mut Network<B>, dealer: &mut Dealer, x: &Shares, y: &Shares) -> Result<Shares> {
    x.check(y)?;
    let t = x.t;
    let triple = dealer.beaver(x.len());
    for s in [&triple.a, &triple.b, &triple.c] {
        deal(net, s)?;
    }
    let d = open(net, &x.sub(&triple.a)?)?;
    let e = open(net, &y.sub(&triple.b)?)?;
    let db = triple.b.scale_each(&d);
    let ea = triple.a.scale_each(&e);
    let de: Vec<u64> = zip_map(&d, &e, |a, b| mul_mod(a, b, t));
    triple.c.add(&db)?.add(&ea)?.add_public(&de)
}

/// Divides a shared fixed-point vector by `delta`, rounding down with an
/// error of at most one unit in the last place.
pub fn truncate<B: SimdBackend>(net: &mut Network<B>, dealer: &mut Dealer, x: &Shares, delta: u64) -> Result<Shares> {
    let t = x.t;
    let pair = dealer.truncation_pair(x.len(), delta);
    deal(net, &pair.r)?;
    deal(net, &pair.r_hi)?;
    // shift into [0, 2^bound) so the opened sum never wraps mod t
    let offset = (1u64 << (TRUNCATION_BOUND_BITS - 1)).div_ceil(delta) * delta;
    let shifted = x.add(&pair.r)?.add_public(&vec![offset; x.len()])?;
    let c = open(net, &shifted)?;
    let s1 = c
        .iter()
        .zip(&pair.r_hi.s1)
        .map(|(&c, &r)| sub_mod(sub_mod(c / delta, offset / delta, t), r, t))
        .collect();
    let s2 = pair.r_hi.s2.iter().map(|&r| neg_mod(r, t)).collect();
    Ok(Shares { s1, s2, t })
}

/// Centered integer behind a residue, for checks.
pub fn signed(v: u64, t: u64) -> i128 {
    centered(v, t)
}

/// Residue of a signed integer.
pub fn residue(v: i128, t: u64) -> u64 {
    reduce_i128(v, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hesimd_core::simd::{CostModel, SemanticBackend, WIDE_PLAIN_MODULUS};
    use rand::SeedableRng;

    const T: u64 = WIDE_PLAIN_MODULUS;

    fn setup() -> (Network<SemanticBackend>, Dealer, ChaCha20Rng) {
        let net = Network::new(Default::default(), CostModel::default());
        (net, Dealer::new(ChaCha20Rng::seed_from_u64(1), T), ChaCha20Rng::seed_from_u64(2))
    }

    #[test]
    fn round_trips() {
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        assert_eq!(reconstruct(&secret_share(&[0, 0, 0], T, &mut rng)), vec![0, 0, 0]);
        for _ in 0..1000 {
            let v = random_residues(rng.random_range(1..20), T, &mut rng);
            assert_eq!(reconstruct(&secret_share(&v, T, &mut rng)), v);
        }
    }

    #[test]
    fn beaver_product() {
        let (mut net, mut dealer, mut rng) = setup();
        let x: Vec<u64> = [-3i128, 5, 0, 1 << 30].iter().map(|&v| residue(v, T)).collect();
        let y: Vec<u64> = [7i128, -2, 9, 1 << 25].iter().map(|&v| residue(v, T)).collect();
        let z = mul_shares(&mut net, &mut dealer, &secret_share(&x, T, &mut rng), &secret_share(&y, T, &mut rng)).unwrap();
        let got: Vec<i128> = reconstruct(&z).iter().map(|&v| signed(v, T)).collect();
        assert_eq!(got, vec![-21, -10, 0, 1 << 55]);
        assert_eq!(net.pending(), 0);
    }

    #[test]
    fn truncation_is_within_one_unit() {
        let (mut net, mut dealer, mut rng) = setup();
        let delta = 1u64 << 20;
        let vals: Vec<i128> = vec![0, 1, -1, 5 << 40, -(7 << 40) - 12345, (1 << 48) + 999, -(1 << 48)];
        for _ in 0..50 {
            let x: Vec<u64> = vals.iter().map(|&v| residue(v, T)).collect();
            let tr = truncate(&mut net, &mut dealer, &secret_share(&x, T, &mut rng), delta).unwrap();
            for (g, &v) in reconstruct(&tr).iter().zip(&vals) {
                let want = v.div_euclid(delta as i128);
                let got = signed(*g, T);
                assert!(got == want || got == want + 1, "{v}: {got} vs {want}");
            }
        }
    }
}
