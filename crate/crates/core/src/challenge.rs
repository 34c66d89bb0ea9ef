//! The challenge oracle `H`: framed hash input, SHAKE128 stream, and expansion
//! into a ring element with exactly `kappa` coefficients in `{-1, +1}`.

use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake128;

use crate::error::{Error, Result};
use crate::ring::{RingElement, RingVector};

/// Domain-separation label; also the first bytes of every encoded hash input.
pub const HASH_LABEL: &[u8] = b"LaSDVS-v1-H";

/// A ring element with exactly `kappa` nonzero coefficients, each `+1` or `-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChallengeElement {
    element: RingElement,
    kappa: usize,
}

impl ChallengeElement {
    /// Validates weight and coefficient range.
    pub fn new(element: RingElement, kappa: usize) -> Result<Self> {
        let q = element.q();
        let mut weight = 0;
        for &c in element.coeffs() {
            match c {
                0 => {}
                1 => weight += 1,
                c if c == q - 1 => weight += 1,
                other => {
                    return Err(Error::CoefficientOutOfRange(format!(
                        "challenge coefficient {other} not in {{-1, 0, 1}}"
                    )))
                }
            }
        }
        if weight != kappa {
            return Err(Error::CoefficientOutOfRange(format!(
                "challenge weight {weight}, expected {kappa}"
            )));
        }
        Ok(Self { element, kappa })
    }

    /// Builds a challenge from `(position, negative)` pairs.
    pub fn from_positions(n: usize, q: u32, positions: &[(usize, bool)]) -> Result<Self> {
        let mut coeffs = vec![0u32; n];
        for &(pos, negative) in positions {
            if pos >= n || coeffs[pos] != 0 {
                return Err(Error::CoefficientOutOfRange(format!(
                    "challenge position {pos} invalid or repeated"
                )));
            }
            coeffs[pos] = if negative { q - 1 } else { 1 };
        }
        Self::new(RingElement::from_coeffs(q, coeffs)?, positions.len())
    }

    pub fn element(&self) -> &RingElement {
        &self.element
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    /// Nonzero positions in increasing order with their signs (`true` = -1).
    pub fn positions(&self) -> Vec<(usize, bool)> {
        let q = self.element.q();
        self.element
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i, c == q - 1))
            .collect()
    }

    /// `v * c` for a vector `v`, exploiting sparsity: each entry becomes a
    /// signed sum of `kappa` negacyclic rotations.
    pub fn mul_vector(&self, v: &RingVector) -> Result<RingVector> {
        let positions = self.positions();
        let entries = v
            .iter()
            .map(|e| sparse_mul(e, &positions, &self.element))
            .collect::<Result<Vec<_>>>()?;
        RingVector::new(entries)
    }

    /// `e * c` for a single ring element.
    pub fn mul_element(&self, e: &RingElement) -> Result<RingElement> {
        sparse_mul(e, &self.positions(), &self.element)
    }
}

fn sparse_mul(
    e: &RingElement,
    positions: &[(usize, bool)],
    c: &RingElement,
) -> Result<RingElement> {
    if e.n() != c.n() || e.q() != c.q() {
        return Err(Error::ShapeMismatch {
            left_n: e.n(),
            left_q: e.q(),
            right_n: c.n(),
            right_q: c.q(),
        });
    }
    let (n, q) = (e.n(), e.q() as u64);
    let mut acc = vec![0u64; n];
    for &(pos, negative) in positions {
        for (i, &x) in e.coeffs().iter().enumerate() {
            let (idx, wrapped) = if i + pos < n {
                (i + pos, false)
            } else {
                (i + pos - n, true)
            };
            let x = x as u64;
            // x^{i+pos} = -x^{i+pos-n} past the wrap.
            if negative ^ wrapped {
                acc[idx] += q - x;
            } else {
                acc[idx] += x;
            }
        }
    }
    RingElement::from_coeffs(e.q(), acc.into_iter().map(|v| (v % q) as u32).collect())
}

fn push_framed(out: &mut Vec<u8>, bytes: &[u8]) {
    out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
    out.extend_from_slice(bytes);
}

/// `label || len(w) || w || len(t) || t || len(s) || s || len(mu) || mu`, with
/// ring elements in canonical packed form and lengths as 4-byte big-endian.
pub fn hash_input_encode(
    w: &RingElement,
    t: &RingElement,
    s: &RingElement,
    mu: &[u8],
) -> Result<Vec<u8>> {
    for other in [t, s] {
        if other.n() != w.n() || other.q() != w.q() {
            return Err(Error::ShapeMismatch {
                left_n: w.n(),
                left_q: w.q(),
                right_n: other.n(),
                right_q: other.q(),
            });
        }
    }
    let mut out = HASH_LABEL.to_vec();
    for e in [w, t, s] {
        push_framed(&mut out, &e.to_bytes());
    }
    push_framed(&mut out, mu);
    Ok(out)
}

/// Draws `kappa` distinct positions in `[0, n)` by a partial Fisher-Yates
/// shuffle on 32-bit big-endian lanes (biased lanes are skipped), then one
/// sign bit per position from the following bytes.
pub fn expand_challenge(
    stream: &mut impl XofReader,
    n: usize,
    q: u32,
    kappa: usize,
) -> Result<ChallengeElement> {
    if kappa == 0 || kappa > n || n > u32::MAX as usize {
        return Err(Error::InvalidParameter(format!(
            "challenge weight {kappa} invalid for n = {n}"
        )));
    }
    let mut slots: Vec<usize> = (0..n).collect();
    let mut lane = [0u8; 4];
    for i in 0..kappa {
        let range = (n - i) as u64;
        let limit = (1u64 << 32) / range * range;
        let j = loop {
            stream.read(&mut lane);
            let v = u32::from_be_bytes(lane) as u64;
            if v < limit {
                break i + (v % range) as usize;
            }
        };
        slots.swap(i, j);
    }
    let mut signs = vec![0u8; kappa.div_ceil(8)];
    stream.read(&mut signs);
    let positions: Vec<(usize, bool)> = slots[..kappa]
        .iter()
        .enumerate()
        .map(|(i, &pos)| (pos, (signs[i / 8] >> (i % 8)) & 1 == 1))
        .collect();
    ChallengeElement::from_positions(n, q, &positions)
}

/// `H(w || t || s || mu)`.
pub fn hash_challenge(
    w: &RingElement,
    t: &RingElement,
    s: &RingElement,
    mu: &[u8],
    kappa: usize,
) -> Result<ChallengeElement> {
    let input = hash_input_encode(w, t, s, mu)?;
    let mut h = Shake128::default();
    h.update(&input);
    expand_challenge(&mut h.finalize_xof(), w.n(), w.q(), kappa)
}
