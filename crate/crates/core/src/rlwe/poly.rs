//! Ring elements of `Z_q[X]/(X^N + 1)`.

use crate::error::{Error, Result};
use crate::modarith::{add_mod, mul_mod, neg_mod, sub_mod};
use crate::rlwe::ntt::NttTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyDomain {
    Coeff,
    Ntt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyRingElement {
    pub coeffs: Vec<u64>,
    pub modulus: u64,
    pub domain: PolyDomain,
}

impl PolyRingElement {
    pub fn zero(n: usize, modulus: u64, domain: PolyDomain) -> Self {
        Self { coeffs: vec![0; n], modulus, domain }
    }

    /// Coefficient-domain element; inputs are reduced mod `modulus`.
    pub fn from_coeffs(coeffs: Vec<u64>, modulus: u64) -> Self {
        let coeffs = coeffs.into_iter().map(|c| c % modulus).collect();
        Self { coeffs, modulus, domain: PolyDomain::Coeff }
    }

    /// Coefficient-domain element from signed integers.
    pub fn from_signed(coeffs: &[i64], modulus: u64) -> Self {
        let coeffs = coeffs
            .iter()
            .map(|&c| {
                let r = c.unsigned_abs() % modulus;
                if c < 0 {
                    neg_mod(r, modulus)
                } else {
                    r
                }
            })
            .collect();
        Self { coeffs, modulus, domain: PolyDomain::Coeff }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn to_ntt(mut self, table: &NttTable) -> Self {
        if self.domain == PolyDomain::Coeff {
            table.forward(&mut self.coeffs);
            self.domain = PolyDomain::Ntt;
        }
        self
    }

    pub fn to_coeff(mut self, table: &NttTable) -> Self {
        if self.domain == PolyDomain::Ntt {
            table.inverse(&mut self.coeffs);
            self.domain = PolyDomain::Coeff;
        }
        self
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.modulus != other.modulus || self.degree() != other.degree() {
            return Err(Error::ModulusMismatch);
        }
        if self.domain != other.domain {
            return Err(Error::DomainMismatch);
        }
        Ok(())
    }

    fn zip(&self, other: &Self, f: impl Fn(u64, u64, u64) -> u64) -> Result<Self> {
        self.check(other)?;
        let q = self.modulus;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f(a, b, q)).collect();
        Ok(Self { coeffs, modulus: q, domain: self.domain })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, add_mod)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, sub_mod)
    }

    /// Pointwise product; both operands must be in the NTT domain.
    pub fn mul_pointwise(&self, other: &Self) -> Result<Self> {
        if self.domain != PolyDomain::Ntt {
            return Err(Error::DomainMismatch);
        }
        self.zip(other, mul_mod)
    }

    pub fn add_assign_product(&mut self, a: &Self, b: &Self) {
        let q = self.modulus;
        for ((acc, &x), &y) in self.coeffs.iter_mut().zip(&a.coeffs).zip(&b.coeffs) {
            *acc = add_mod(*acc, mul_mod(x, y, q), q);
        }
    }

    /// `out[i] = self[perm[i]]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let coeffs = perm.iter().map(|&i| self.coeffs[i]).collect();
        Self { coeffs, modulus: self.modulus, domain: self.domain }
    }
}

/// Product of two coefficient-domain elements via the NTT.
pub fn ntt_poly_mult(a: &PolyRingElement, b: &PolyRingElement, table: &NttTable) -> Result<PolyRingElement> {
    a.check(b)?;
    if a.modulus != table.modulus() || a.degree() != table.degree() {
        return Err(Error::ModulusMismatch);
    }
    let fa = a.clone().to_ntt(table);
    let fb = b.clone().to_ntt(table);
    let prod = fa.mul_pointwise(&fb)?;
    Ok(if a.domain == PolyDomain::Coeff { prod.to_coeff(table) } else { prod })
}
