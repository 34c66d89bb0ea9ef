//! Arithmetic in R_q = Z_q[x]/(x^n + 1).
//!
//! Coefficients are always stored canonically in `[0, q)`. Centered
//! representatives live in `(-q/2, q/2]` (for odd `q` that is the symmetric
//! interval `[-(q-1)/2, (q-1)/2]`) and are only materialised for norms,
//! decoding and hashing-independent comparisons.
//!
//! Multiplication is a schoolbook negacyclic convolution. For power-of-two
//! moduli the accumulation runs in wrapping `u32` arithmetic and reduces with
//! a mask; other (toy) moduli accumulate in `u128`.

use std::ops::{Add, Mul, Neg, Sub};

use crate::bits::{BitReader, BitWriter};
use crate::error::{Error, Result};

/// Number of bits needed for a canonical coefficient, `ceil(log2 q)`.
pub fn coeff_bits(q: u32) -> usize {
    debug_assert!(q >= 2);
    (32 - (q - 1).leading_zeros()) as usize
}

/// Maps an integer to its canonical residue in `[0, q)`.
pub fn reduce(value: i64, q: u32) -> u32 {
    value.rem_euclid(q as i64) as u32
}

/// Centered representative of a canonical residue.
pub fn center(value: u32, q: u32) -> i64 {
    if value > q / 2 {
        value as i64 - q as i64
    } else {
        value as i64
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElement {
    q: u32,
    coeffs: Vec<u32>,
}

impl RingElement {
    fn check_shape(n: usize, q: u32) -> Result<()> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "ring degree {n} is not a power of two"
            )));
        }
        if q < 2 {
            return Err(Error::InvalidParameter(format!("modulus {q} < 2")));
        }
        Ok(())
    }

    pub fn zero(n: usize, q: u32) -> Self {
        Self::check_shape(n, q).expect("invalid ring shape");
        Self {
            q,
            coeffs: vec![0; n],
        }
    }

    pub fn one(n: usize, q: u32) -> Self {
        Self::constant(n, q, 1)
    }

    pub fn constant(n: usize, q: u32, c: i64) -> Self {
        let mut r = Self::zero(n, q);
        r.coeffs[0] = reduce(c, q);
        r
    }

    /// `c * x^degree`, with `degree < n`.
    pub fn monomial(n: usize, q: u32, degree: usize, c: i64) -> Self {
        assert!(degree < n, "monomial degree out of range");
        let mut r = Self::zero(n, q);
        r.coeffs[degree] = reduce(c, q);
        r
    }

    /// Builds an element from canonical coefficients, rejecting values `>= q`.
    pub fn from_coeffs(q: u32, coeffs: Vec<u32>) -> Result<Self> {
        Self::check_shape(coeffs.len(), q)?;
        if let Some(c) = coeffs.iter().find(|&&c| c >= q) {
            return Err(Error::CoefficientOutOfRange(format!(
                "coefficient {c} >= q = {q}"
            )));
        }
        Ok(Self { q, coeffs })
    }

    /// Canonicalises arbitrary signed integers.
    pub fn from_signed(q: u32, coeffs: &[i64]) -> Result<Self> {
        Self::check_shape(coeffs.len(), q)?;
        Ok(Self {
            q,
            coeffs: coeffs.iter().map(|&c| reduce(c, q)).collect(),
        })
    }

    pub(crate) fn from_raw(q: u32, coeffs: Vec<u32>) -> Self {
        debug_assert!(coeffs.iter().all(|&c| c < q));
        Self { q, coeffs }
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn centered(&self) -> Vec<i64> {
        self.coeffs.iter().map(|&c| center(c, self.q)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.q != other.q || self.n() != other.n() {
            return Err(Error::ShapeMismatch {
                left_n: self.n(),
                left_q: self.q,
                right_n: other.n(),
                right_q: other.q,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let q = self.q as u64;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| ((a as u64 + b as u64) % q) as u32)
            .collect();
        Ok(Self::from_raw(self.q, coeffs))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let q = self.q as u64;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| ((a as u64 + q - b as u64) % q) as u32)
            .collect();
        Ok(Self::from_raw(self.q, coeffs))
    }

    /// Negacyclic product: polynomial multiplication reduced by `x^n = -1`.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self::from_raw(
            self.q,
            negacyclic_mul(&self.coeffs, &other.coeffs, self.q),
        ))
    }

    /// Multiplies every coefficient by the integer `c`.
    pub fn scale(&self, c: i64) -> Self {
        let q = self.q as i128;
        let c = (c as i128).rem_euclid(q);
        let coeffs = self
            .coeffs
            .iter()
            .map(|&a| ((a as i128 * c) % q) as u32)
            .collect();
        Self::from_raw(self.q, coeffs)
    }

    /// `a(x^{-1})`; its multiplication matrix is the transpose of `a`'s.
    pub fn conjugate(&self) -> Self {
        let n = self.n();
        let mut coeffs = vec![0u32; n];
        coeffs[0] = self.coeffs[0];
        for i in 1..n {
            coeffs[n - i] = (self.q - self.coeffs[i]) % self.q;
        }
        Self::from_raw(self.q, coeffs)
    }

    pub fn norm_squared(&self) -> u128 {
        self.centered()
            .iter()
            .map(|&c| (c as i128 * c as i128) as u128)
            .sum()
    }

    pub fn inf_norm(&self) -> u64 {
        self.centered()
            .iter()
            .map(|c| c.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// Packs the canonical coefficients in `ceil(log2 q)` bits each.
    pub fn write_bits(&self, w: &mut BitWriter) {
        let width = coeff_bits(self.q);
        for &c in &self.coeffs {
            w.write(c as u64, width);
        }
    }

    pub fn read_bits(r: &mut BitReader<'_>, n: usize, q: u32) -> Result<Self> {
        let width = coeff_bits(q);
        let coeffs = (0..n)
            .map(|_| r.read(width).map(|v| v as u32))
            .collect::<Result<Vec<_>>>()?;
        Self::from_coeffs(q, coeffs)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = BitWriter::new();
        self.write_bits(&mut w);
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8], n: usize, q: u32) -> Result<Self> {
        let mut r = BitReader::new(bytes);
        let e = Self::read_bits(&mut r, n, q)?;
        r.finish()?;
        Ok(e)
    }
}

fn negacyclic_mul(a: &[u32], b: &[u32], q: u32) -> Vec<u32> {
    let n = a.len();
    if q.is_power_of_two() {
        // Everything is computed mod 2^32, which 2^k divides.
        let mut acc = vec![0u32; n];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            let (lo, hi) = b.split_at(n - i);
            for (dst, &bj) in acc[i..].iter_mut().zip(lo) {
                *dst = dst.wrapping_add(ai.wrapping_mul(bj));
            }
            for (dst, &bj) in acc[..i].iter_mut().zip(hi) {
                *dst = dst.wrapping_sub(ai.wrapping_mul(bj));
            }
        }
        let mask = q.wrapping_sub(1);
        acc.into_iter().map(|c| c & mask).collect()
    } else {
        let mut pos = vec![0u128; n];
        let mut neg = vec![0u128; n];
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                let p = ai as u128 * bj as u128;
                if i + j < n {
                    pos[i + j] += p;
                } else {
                    neg[i + j - n] += p;
                }
            }
        }
        let q = q as u128;
        pos.iter()
            .zip(&neg)
            .map(|(&p, &m)| ((p % q + q - m % q) % q) as u32)
            .collect()
    }
}

impl Add for &RingElement {
    type Output = RingElement;
    fn add(self, rhs: Self) -> RingElement {
        self.checked_add(rhs).expect("ring shape mismatch in +")
    }
}

impl Sub for &RingElement {
    type Output = RingElement;
    fn sub(self, rhs: Self) -> RingElement {
        self.checked_sub(rhs).expect("ring shape mismatch in -")
    }
}

impl Mul for &RingElement {
    type Output = RingElement;
    fn mul(self, rhs: Self) -> RingElement {
        self.checked_mul(rhs).expect("ring shape mismatch in *")
    }
}

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        let q = self.q;
        RingElement::from_raw(q, self.coeffs.iter().map(|&c| (q - c) % q).collect())
    }
}

/// A non-empty sequence of ring elements sharing `(n, q)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingVector {
    entries: Vec<RingElement>,
}

impl RingVector {
    pub fn new(entries: Vec<RingElement>) -> Result<Self> {
        let first = entries.first().ok_or(Error::LengthMismatch {
            expected: 1,
            actual: 0,
        })?;
        for e in &entries[1..] {
            first.same_shape(e)?;
        }
        Ok(Self { entries })
    }

    pub fn zeros(len: usize, n: usize, q: u32) -> Self {
        assert!(len > 0, "empty ring vector");
        Self {
            entries: vec![RingElement::zero(n, q); len],
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn n(&self) -> usize {
        self.entries[0].n()
    }

    pub fn q(&self) -> u32 {
        self.entries[0].q()
    }

    pub fn entries(&self) -> &[RingElement] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<RingElement> {
        self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, RingElement> {
        self.entries.iter()
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        self.entries[0].same_shape(&other.entries[0])
    }

    /// `sum_i u_i * v_i`.
    pub fn inner_product(&self, other: &Self) -> Result<RingElement> {
        self.same_shape(other)?;
        let mut acc = RingElement::zero(self.n(), self.q());
        for (u, v) in self.entries.iter().zip(&other.entries) {
            acc = acc.checked_add(&u.checked_mul(v)?)?;
        }
        Ok(acc)
    }

    pub fn scalar_mul(&self, c: &RingElement) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|v| v.checked_mul(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { entries })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.checked_add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { entries })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.checked_sub(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { entries })
    }

    /// All `n * len` centered coefficients, entry after entry.
    pub fn centered_coeffs(&self) -> Vec<i64> {
        self.entries.iter().flat_map(|e| e.centered()).collect()
    }

    /// Exact squared norm of the coefficient embedding.
    pub fn norm_squared(&self) -> u128 {
        self.entries.iter().map(RingElement::norm_squared).sum()
    }

    pub fn euclid_norm(&self) -> f64 {
        (self.norm_squared() as f64).sqrt()
    }

    pub fn inf_norm(&self) -> u64 {
        self.entries
            .iter()
            .map(RingElement::inf_norm)
            .max()
            .unwrap_or(0)
    }

    pub fn split_at(&self, mid: usize) -> (Self, Self) {
        let (a, b) = self.entries.split_at(mid);
        (
            Self {
                entries: a.to_vec(),
            },
            Self {
                entries: b.to_vec(),
            },
        )
    }

    pub fn concat(&self, other: &Self) -> Result<Self> {
        self.entries[0].same_shape(&other.entries[0])?;
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(Self { entries })
    }

    pub fn write_bits(&self, w: &mut BitWriter) {
        for e in &self.entries {
            e.write_bits(w);
        }
    }

    pub fn read_bits(r: &mut BitReader<'_>, len: usize, n: usize, q: u32) -> Result<Self> {
        let entries = (0..len)
            .map(|_| RingElement::read_bits(r, n, q))
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = BitWriter::new();
        self.write_bits(&mut w);
        w.finish()
    }
}

impl std::ops::Index<usize> for RingVector {
    type Output = RingElement;
    fn index(&self, i: usize) -> &RingElement {
        &self.entries[i]
    }
}

impl<'a> IntoIterator for &'a RingVector {
    type Item = &'a RingElement;
    type IntoIter = std::slice::Iter<'a, RingElement>;
    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}
