//! Gadget trapdoors over R_q for power-of-two moduli.
//!
//! With `g = (1, 2, ..., 2^{k-1})` and a short `l x k` matrix `R`, the public
//! vector `a = (a0, h*g - a0^T R)` satisfies `a^T [R; I] = h g^T`. The
//! trapdoor turns LWE inversion on `a` into bitwise gadget decoding, and
//! syndrome sampling on `a` into coset sampling on `g` plus a perturbation
//! that makes the output spherical.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::bits::{BitReader, BitWriter};
use crate::error::{Error, Result};
use crate::ring::{center, coeff_bits, reduce, RingElement, RingVector};
use crate::sampler::{
    sample_uniform_vector, sample_z_rejection, std_dev, CdtTable, GaussParams, RandomSource,
};

const POWER_ITERATIONS: usize = 20;
const POWER_TOLERANCE: f64 = 1e-6;

fn gadget_len(q: u32) -> Result<usize> {
    if !q.is_power_of_two() || q < 4 {
        return Err(Error::InvalidParameter(format!(
            "gadget operations need q = 2^k >= 4, got {q}"
        )));
    }
    Ok(q.trailing_zeros() as usize)
}

/// The powers-of-two vector `(1, 2, ..., 2^{k-1})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GadgetVector {
    k: usize,
}

impl GadgetVector {
    pub fn for_modulus(q: u32) -> Result<Self> {
        Ok(Self { k: gadget_len(q)? })
    }

    pub fn len(&self) -> usize {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        self.k == 0
    }

    pub fn entry(&self, i: usize) -> u64 {
        1u64 << i
    }

    pub fn as_ring_vector(&self, n: usize, q: u32) -> RingVector {
        RingVector::new(
            (0..self.k)
                .map(|i| RingElement::constant(n, q, self.entry(i) as i64))
                .collect(),
        )
        .expect("k >= 1")
    }
}

/// The `l x k` block `R` together with its tag `h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrapdoorMatrix {
    rows: Vec<Vec<RingElement>>,
    tag: RingElement,
}

impl TrapdoorMatrix {
    pub fn new(rows: Vec<Vec<RingElement>>, tag: RingElement) -> Result<Self> {
        let k = rows.first().map(Vec::len).unwrap_or(0);
        if rows.is_empty() || k == 0 || rows.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidParameter("ragged or empty trapdoor".into()));
        }
        for e in rows.iter().flatten() {
            if e.n() != tag.n() || e.q() != tag.q() {
                return Err(Error::ShapeMismatch {
                    left_n: e.n(),
                    left_q: e.q(),
                    right_n: tag.n(),
                    right_q: tag.q(),
                });
            }
        }
        Ok(Self { rows, tag })
    }

    pub fn l(&self) -> usize {
        self.rows.len()
    }

    pub fn k(&self) -> usize {
        self.rows[0].len()
    }

    pub fn n(&self) -> usize {
        self.tag.n()
    }

    pub fn q(&self) -> u32 {
        self.tag.q()
    }

    pub fn entry(&self, i: usize, j: usize) -> &RingElement {
        &self.rows[i][j]
    }

    pub fn tag(&self) -> &RingElement {
        &self.tag
    }

    /// Column `j` of `[R; I]` as an `(l + k)`-vector.
    pub fn stacked_column(&self, j: usize) -> RingVector {
        let (n, q) = (self.n(), self.q());
        let mut col: Vec<RingElement> = self.rows.iter().map(|r| r[j].clone()).collect();
        col.extend((0..self.k()).map(|i| {
            if i == j {
                RingElement::one(n, q)
            } else {
                RingElement::zero(n, q)
            }
        }));
        RingVector::new(col).expect("non-empty column")
    }

    /// `R^T x` for an `l`-vector `x`.
    pub fn transpose_mul(&self, x: &RingVector) -> Result<RingVector> {
        if x.len() != self.l() {
            return Err(Error::LengthMismatch {
                expected: self.l(),
                actual: x.len(),
            });
        }
        let out = (0..self.k())
            .map(|j| {
                let col = RingVector::new(self.rows.iter().map(|r| r[j].clone()).collect())?;
                col.inner_product(x)
            })
            .collect::<Result<Vec<_>>>()?;
        RingVector::new(out)
    }

    /// `R z` for a `k`-vector `z`.
    pub fn mul(&self, z: &RingVector) -> Result<RingVector> {
        if z.len() != self.k() {
            return Err(Error::LengthMismatch {
                expected: self.k(),
                actual: z.len(),
            });
        }
        let out = self
            .rows
            .iter()
            .map(|row| RingVector::new(row.clone())?.inner_product(z))
            .collect::<Result<Vec<_>>>()?;
        RingVector::new(out)
    }

    /// Header `(l, k, n, q)` as big-endian `u32`s, then `R` row-major, then `h`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for v in [self.l() as u32, self.k() as u32, self.n() as u32, self.q()] {
            out.extend_from_slice(&v.to_be_bytes());
        }
        let mut w = BitWriter::new();
        self.write_body(&mut w);
        self.tag.write_bits(&mut w);
        out.extend(w.finish());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 16 {
            return Err(Error::MalformedHeader("trapdoor header truncated".into()));
        }
        let word = |i: usize| u32::from_be_bytes(bytes[4 * i..4 * i + 4].try_into().unwrap());
        let (l, k, n, q) = (
            word(0) as usize,
            word(1) as usize,
            word(2) as usize,
            word(3),
        );
        if l == 0 || k == 0 || n == 0 || !n.is_power_of_two() || q < 2 || l * k * n > 1 << 24 {
            return Err(Error::MalformedHeader(format!(
                "bad trapdoor shape l={l} k={k} n={n} q={q}"
            )));
        }
        let mut r = BitReader::new(&bytes[16..]);
        let rows = Self::read_body(&mut r, l, k, n, q)?;
        let tag = RingElement::read_bits(&mut r, n, q)?;
        r.finish()?;
        Self::new(rows, tag)
    }

    /// The `l * k * n` packed coefficients of `R`, without tag or header.
    pub(crate) fn write_body(&self, w: &mut BitWriter) {
        for e in self.rows.iter().flatten() {
            e.write_bits(w);
        }
    }

    pub(crate) fn read_body(
        r: &mut BitReader<'_>,
        l: usize,
        k: usize,
        n: usize,
        q: u32,
    ) -> Result<Vec<Vec<RingElement>>> {
        (0..l)
            .map(|_| {
                (0..k)
                    .map(|_| RingElement::read_bits(r, n, q))
                    .collect::<Result<Vec<_>>>()
            })
            .collect()
    }
}

/// `a = (a0, a1)` with `a0` of length `l` and `a1` of length `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaggedPublicVector {
    a: RingVector,
    l: usize,
}

impl TaggedPublicVector {
    pub fn new(a: RingVector, l: usize) -> Result<Self> {
        if l == 0 || l >= a.len() {
            return Err(Error::InvalidParameter(format!(
                "split point {l} invalid for a vector of length {}",
                a.len()
            )));
        }
        Ok(Self { a, l })
    }

    pub fn vector(&self) -> &RingVector {
        &self.a
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn k(&self) -> usize {
        self.a.len() - self.l
    }

    pub fn a0(&self) -> RingVector {
        self.a.split_at(self.l).0
    }

    pub fn a1(&self) -> RingVector {
        self.a.split_at(self.l).1
    }
}

/// An element of R_q (q = 2^k) is a unit iff the sum of its coefficients is odd.
pub fn is_invertible(h: &RingElement) -> bool {
    h.q().is_power_of_two() && h.coeffs().iter().fold(0u32, |acc, &c| acc ^ (c & 1)) == 1
}

/// Inverse in R_q for q = 2^k, by Newton iteration `x <- x (2 - h x)` from 1.
pub fn invert(h: &RingElement) -> Result<RingElement> {
    if !is_invertible(h) {
        return Err(Error::NonInvertibleTag);
    }
    let (n, q) = (h.n(), h.q());
    let one = RingElement::one(n, q);
    let two = RingElement::constant(n, q, 2);
    let mut x = one.clone();
    // The error 1 - h x squares each step and is nilpotent of index <= n k.
    for _ in 0..64 {
        if h * &x == one {
            return Ok(x);
        }
        x = &x * &(&two - &(h * &x));
    }
    Err(Error::NonInvertibleTag)
}

/// Samples `R` from `D_{sigma_e}` and completes `a0` into a tagged vector.
pub fn ring_gen_trap(
    rng: &mut RandomSource,
    a0: &RingVector,
    h: &RingElement,
    sigma_e: f64,
) -> Result<(TaggedPublicVector, TrapdoorMatrix)> {
    let (n, q, l) = (a0.n(), a0.q(), a0.len());
    let k = gadget_len(q)?;
    if h.n() != n || h.q() != q {
        return Err(Error::ShapeMismatch {
            left_n: n,
            left_q: q,
            right_n: h.n(),
            right_q: h.q(),
        });
    }
    if !is_invertible(h) {
        return Err(Error::NonInvertibleTag);
    }
    let table = CdtTable::cached(&GaussParams::centered(sigma_e)?);
    let rows: Vec<Vec<RingElement>> = (0..l)
        .map(|_| {
            (0..k)
                .map(|_| {
                    let c: Vec<i64> = (0..n).map(|_| table.sample(rng)).collect();
                    RingElement::from_signed(q, &c).expect("shape checked")
                })
                .collect()
        })
        .collect();
    let trapdoor = TrapdoorMatrix::new(rows, h.clone())?;
    let gadget = GadgetVector::for_modulus(q)?;
    let correction = trapdoor.transpose_mul(a0)?;
    let a1: Vec<RingElement> = (0..k)
        .map(|j| &h.scale(gadget.entry(j) as i64) - &correction[j])
        .collect();
    let a = a0.concat(&RingVector::new(a1)?)?;
    Ok((TaggedPublicVector::new(a, l)?, trapdoor))
}

/// Same as [`ring_gen_trap`] with `a0` drawn uniformly.
pub fn ring_gen_trap_fresh(
    rng: &mut RandomSource,
    n: usize,
    q: u32,
    l: usize,
    h: &RingElement,
    sigma_e: f64,
) -> Result<(TaggedPublicVector, TrapdoorMatrix)> {
    let a0 = sample_uniform_vector(rng, l, n, q);
    ring_gen_trap(rng, &a0, h, sigma_e)
}

/// Checks `a^T [R; I] = h g^T` by direct computation.
pub fn trapdoor_identity_holds(a: &TaggedPublicVector, r: &TrapdoorMatrix) -> bool {
    if a.l() != r.l() || a.k() != r.k() {
        return false;
    }
    (0..r.k()).all(|j| {
        a.vector()
            .inner_product(&r.stacked_column(j))
            .map(|lhs| lhs == r.tag().scale(1i64 << j))
            .unwrap_or(false)
    })
}

/// Recovers `(s, e)` from `b = g s + e` with every `|e_i| < q/4`.
///
/// Bit `j` of each coefficient of `s` is read from entry `k-1-j` once the
/// contribution of the lower bits has been removed.
pub fn gadget_decode(b: &RingVector) -> Result<(RingElement, RingVector)> {
    let (n, q) = (b.n(), b.q());
    let k = gadget_len(q)?;
    if b.len() != k {
        return Err(Error::LengthMismatch {
            expected: k,
            actual: b.len(),
        });
    }
    let mask = (q - 1) as u64;
    let mut s = vec![0u32; n];
    for (c, out) in s.iter_mut().enumerate() {
        let mut bits = 0u64;
        for j in 0..k {
            let idx = k - 1 - j;
            let residue = (b[idx].coeffs()[c] as u64).wrapping_sub(bits << idx) & mask;
            let dist = center(residue as u32, q).unsigned_abs() * 4;
            let bit = match dist.cmp(&(q as u64)) {
                std::cmp::Ordering::Less => 0,
                std::cmp::Ordering::Greater => 1,
                std::cmp::Ordering::Equal => return Err(Error::DecodeFailure),
            };
            bits |= bit << j;
        }
        *out = bits as u32;
    }
    let s = RingElement::from_coeffs(q, s)?;
    let e = b.checked_sub(
        &GadgetVector::for_modulus(q)?
            .as_ring_vector(n, q)
            .scalar_mul(&s)?,
    )?;
    Ok((s, e))
}

/// LWE inversion with the trapdoor: from `b = a s + e` recover `(s, e)`.
///
/// `e` is recomputed as `b - a s`; an error that is not short (some centered
/// coefficient `>= q/4`) is reported instead of returned.
pub fn ring_invert(
    r: &TrapdoorMatrix,
    a: &TaggedPublicVector,
    b: &RingVector,
) -> Result<(RingElement, RingVector)> {
    if b.len() != a.vector().len() {
        return Err(Error::LengthMismatch {
            expected: a.vector().len(),
            actual: b.len(),
        });
    }
    let (low, high) = b.split_at(r.l());
    let bg = r.transpose_mul(&low)?.checked_add(&high)?;
    let (hs, _) = gadget_decode(&bg)?;
    let s = if r.tag() == &RingElement::one(r.n(), r.q()) {
        hs
    } else {
        &invert(r.tag())? * &hs
    };
    let e = b.checked_sub(&a.vector().scalar_mul(&s)?)?;
    if e.inf_norm() * 4 >= b.q() as u64 {
        return Err(Error::InversionFailure);
    }
    Ok((s, e))
}

/// Samples `z` with `g^T z = v` coefficient-wise: `z_j <- D_{2Z + v_j, sigma}`,
/// then `v_{j+1} = (v_j - z_j) / 2`.
pub fn gadget_coset_sample(
    rng: &mut RandomSource,
    v: &RingElement,
    sigma_g: f64,
) -> Result<RingVector> {
    let (n, q) = (v.n(), v.q());
    let k = gadget_len(q)?;
    let even = CdtTable::cached(&GaussParams::new(sigma_g / 2.0, 0.0)?);
    let odd = CdtTable::cached(&GaussParams::new(sigma_g / 2.0, -0.5)?);
    let mut z = vec![vec![0i64; n]; k];
    for c in 0..n {
        let mut residue = v.coeffs()[c] as i64;
        for zj in z.iter_mut() {
            let parity = residue.rem_euclid(2);
            let w = if parity == 0 {
                even.sample(rng)
            } else {
                odd.sample(rng)
            };
            let x = 2 * w + parity;
            zj[c] = x;
            residue = (residue - x) / 2;
        }
    }
    RingVector::new(
        z.iter()
            .map(|c| RingElement::from_signed(q, c))
            .collect::<Result<Vec<_>>>()?,
    )
}

/// Negacyclic product of integer and real coefficient vectors.
fn negacyclic_mul_f64(a: &[i64], x: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut out = vec![0f64; n];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        let ai = ai as f64;
        for (j, &xj) in x.iter().enumerate() {
            if i + j < n {
                out[i + j] += ai * xj;
            } else {
                out[i + j - n] -= ai * xj;
            }
        }
    }
    out
}

fn negacyclic_mul_i64(a: &[i64], b: &[i64]) -> Vec<i64> {
    let n = a.len();
    let mut out = vec![0i64; n];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            if i + j < n {
                out[i + j] += ai * bj;
            } else {
                out[i + j - n] -= ai * bj;
            }
        }
    }
    out
}

fn conjugate_i64(a: &[i64]) -> Vec<i64> {
    let n = a.len();
    let mut out = vec![0i64; n];
    out[0] = a[0];
    for i in 1..n {
        out[n - i] = -a[i];
    }
    out
}

/// Dense `(l n) x (l n)` integer matrix `R R^T` of the coefficient embedding.
fn gram_matrix(r: &TrapdoorMatrix) -> DMatrix<f64> {
    let (l, k, n) = (r.l(), r.k(), r.n());
    let centered: Vec<Vec<Vec<i64>>> = (0..l)
        .map(|i| (0..k).map(|j| r.entry(i, j).centered()).collect())
        .collect();
    let mut gram = DMatrix::<f64>::zeros(l * n, l * n);
    for i in 0..l {
        for i2 in 0..l {
            let mut block = vec![0i64; n];
            for j in 0..k {
                let prod = negacyclic_mul_i64(&centered[i][j], &conjugate_i64(&centered[i2][j]));
                for (acc, p) in block.iter_mut().zip(prod) {
                    *acc += p;
                }
            }
            // rot(c)[row][col] is the coefficient of x^row in c * x^col.
            for row in 0..n {
                for col in 0..n {
                    let v = if row >= col {
                        block[row - col]
                    } else {
                        -block[row + n - col]
                    };
                    gram[(i * n + row, i2 * n + col)] = v as f64;
                }
            }
        }
    }
    gram
}

/// Largest singular value of `R` (as an integer matrix) by power iteration on `R R^T`.
pub fn largest_singular_value(r: &TrapdoorMatrix) -> f64 {
    let gram = gram_matrix(r);
    power_iteration(&gram).sqrt()
}

fn power_iteration(m: &DMatrix<f64>) -> f64 {
    let dim = m.nrows();
    let mut v = DVector::from_fn(dim, |i, _| 1.0 + (i % 7) as f64 / 7.0);
    v /= v.norm();
    let mut lambda = 0.0;
    for _ in 0..POWER_ITERATIONS {
        let w = m * &v;
        let next = w.norm();
        if next == 0.0 {
            return 0.0;
        }
        v = w / next;
        let converged = (next - lambda).abs() <= POWER_TOLERANCE * next;
        lambda = next;
        if converged {
            break;
        }
    }
    lambda
}

/// Gaussian widths used by the perturbation and preimage samplers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PreimageWidths {
    /// Width of the spherical output.
    pub sigma_p: f64,
    /// Width of the gadget coset sampler.
    pub sigma_g: f64,
    /// Width of the randomized rounding of the continuous perturbation.
    pub sigma_round: f64,
}

/// Samples integer perturbations with covariance
/// `(sigma_p^2 I - sigma_g^2 E E^T) / 2 pi`, `E = [R; I]`.
///
/// The bottom `k` block has scalar covariance, so it is sampled first and the
/// top `l` block is drawn from its conditional distribution, whose covariance
/// is factored once with a dense Cholesky decomposition. The continuous
/// sample is then rounded coordinate-wise with `D_{Z, c, sigma_round}`.
#[derive(Clone, Debug)]
pub struct PerturbationSampler {
    trapdoor: TrapdoorMatrix,
    r_centered: Vec<Vec<Vec<i64>>>,
    widths: PreimageWidths,
    bottom_std: f64,
    coupling: f64,
    top_factor: DMatrix<f64>,
    s1: f64,
}

impl PerturbationSampler {
    pub fn new(trapdoor: &TrapdoorMatrix, widths: PreimageWidths) -> Result<Self> {
        let PreimageWidths {
            sigma_p,
            sigma_g,
            sigma_round,
        } = widths;
        for (name, v) in [
            ("sigma_p", sigma_p),
            ("sigma_g", sigma_g),
            ("sigma_round", sigma_round),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} = {v}")));
            }
        }
        let gram = gram_matrix(trapdoor);
        let s1 = power_iteration(&gram).sqrt();
        let required = sigma_round.powi(2) + sigma_g.powi(2) * (1.0 + s1 * s1);
        if sigma_p.powi(2) <= required {
            return Err(Error::CovarianceNotPositiveDefinite(format!(
                "sigma_p = {sigma_p} needs sigma_p^2 > {required:.1} (s1(R) ~ {s1:.2})"
            )));
        }
        let (sp2, sg2, sr2) = (
            std_dev(sigma_p).powi(2),
            std_dev(sigma_g).powi(2),
            std_dev(sigma_round).powi(2),
        );
        let continuous = sp2 - sr2;
        let bottom = continuous - sg2;
        let mut cov = gram * (-sg2 * continuous / bottom);
        for i in 0..cov.nrows() {
            cov[(i, i)] += continuous;
        }
        let top_factor = Cholesky::new(cov)
            .ok_or_else(|| {
                Error::CovarianceNotPositiveDefinite("Cholesky factorization failed".into())
            })?
            .l();
        let r_centered = (0..trapdoor.l())
            .map(|i| {
                (0..trapdoor.k())
                    .map(|j| trapdoor.entry(i, j).centered())
                    .collect()
            })
            .collect();
        Ok(Self {
            trapdoor: trapdoor.clone(),
            r_centered,
            widths,
            bottom_std: bottom.sqrt(),
            coupling: sg2 / bottom,
            top_factor,
            s1,
        })
    }

    pub fn widths(&self) -> PreimageWidths {
        self.widths
    }

    /// Power-iteration estimate of `s1(R)`.
    pub fn s1(&self) -> f64 {
        self.s1
    }

    /// Integer perturbation as `n (l + k)` signed coefficients.
    pub fn sample_integers(&self, rng: &mut RandomSource) -> Vec<i64> {
        let (l, k, n) = (self.trapdoor.l(), self.trapdoor.k(), self.trapdoor.n());
        let bottom: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                (0..n)
                    .map(|_| self.bottom_std * rng.standard_normal())
                    .collect()
            })
            .collect();
        let noise = DVector::from_fn(l * n, |_, _| rng.standard_normal());
        let correlated = &self.top_factor * noise;
        let mut continuous = Vec::with_capacity(n * (l + k));
        for i in 0..l {
            let mut mean = vec![0f64; n];
            for (j, b) in bottom.iter().enumerate() {
                for (m, v) in mean
                    .iter_mut()
                    .zip(negacyclic_mul_f64(&self.r_centered[i][j], b))
                {
                    *m += v;
                }
            }
            continuous.extend(
                mean.iter()
                    .enumerate()
                    .map(|(c, m)| -self.coupling * m + correlated[i * n + c]),
            );
        }
        continuous.extend(bottom.into_iter().flatten());
        continuous
            .into_iter()
            .map(|c| {
                let g = GaussParams::new(self.widths.sigma_round, c).expect("validated widths");
                sample_z_rejection(rng, &g)
            })
            .collect()
    }

    pub fn sample(&self, rng: &mut RandomSource) -> RingVector {
        to_ring_vector(
            &self.sample_integers(rng),
            self.trapdoor.n(),
            self.trapdoor.q(),
        )
    }
}

fn to_ring_vector(coeffs: &[i64], n: usize, q: u32) -> RingVector {
    RingVector::new(
        coeffs
            .chunks(n)
            .map(|c| RingElement::from_raw(q, c.iter().map(|&x| reduce(x, q)).collect()))
            .collect(),
    )
    .expect("non-empty")
}

/// One-shot perturbation sample; see [`PerturbationSampler`].
pub fn perturbation_sample(
    rng: &mut RandomSource,
    trapdoor: &TrapdoorMatrix,
    widths: PreimageWidths,
) -> Result<RingVector> {
    Ok(PerturbationSampler::new(trapdoor, widths)?.sample(rng))
}

/// Gaussian preimage sampler for `x -> a x mod q` using the trapdoor.
#[derive(Clone, Debug)]
pub struct PreimageSampler {
    perturbation: PerturbationSampler,
    public: TaggedPublicVector,
    tag_inverse: RingElement,
}

impl PreimageSampler {
    pub fn new(
        trapdoor: &TrapdoorMatrix,
        public: &TaggedPublicVector,
        widths: PreimageWidths,
    ) -> Result<Self> {
        if public.l() != trapdoor.l() || public.k() != trapdoor.k() {
            return Err(Error::InvalidParameter(
                "trapdoor does not match public vector".into(),
            ));
        }
        let tag_inverse = invert(trapdoor.tag())?;
        Ok(Self {
            perturbation: PerturbationSampler::new(trapdoor, widths)?,
            public: public.clone(),
            tag_inverse,
        })
    }

    pub fn perturbation(&self) -> &PerturbationSampler {
        &self.perturbation
    }

    /// Short `x` with `a x = u (mod q)`.
    pub fn sample(&self, rng: &mut RandomSource, u: &RingElement) -> Result<RingVector> {
        let trapdoor = &self.perturbation.trapdoor;
        let p = self.perturbation.sample(rng);
        let residual = u.checked_sub(&self.public.vector().inner_product(&p)?)?;
        let v = &self.tag_inverse * &residual;
        let z = gadget_coset_sample(rng, &v, self.perturbation.widths.sigma_g)?;
        let (p_top, p_bottom) = p.split_at(trapdoor.l());
        let top = p_top.checked_add(&trapdoor.mul(&z)?)?;
        let bottom = p_bottom.checked_add(&z)?;
        let x = top.concat(&bottom)?;
        debug_assert_eq!(&self.public.vector().inner_product(&x)?, u);
        Ok(x)
    }
}

/// One-shot preimage sample; see [`PreimageSampler`].
pub fn ring_sample(
    rng: &mut RandomSource,
    trapdoor: &TrapdoorMatrix,
    public: &TaggedPublicVector,
    u: &RingElement,
    widths: PreimageWidths,
) -> Result<RingVector> {
    PreimageSampler::new(trapdoor, public, widths)?.sample(rng, u)
}

/// Minimum output width `sigma_p` for which a trapdoor with singular value
/// `s1` admits a perturbation: `sqrt(sigma_round^2 + sigma_g^2 (1 + s1^2))`.
pub fn minimum_sigma_p(s1: f64, sigma_g: f64, sigma_round: f64) -> f64 {
    (sigma_round.powi(2) + sigma_g.powi(2) * (1.0 + s1 * s1)).sqrt()
}

/// Convenience used by tests and tooling: bit width of trapdoor coefficients.
pub fn trapdoor_body_bits(l: usize, k: usize, n: usize, q: u32) -> usize {
    l * k * n * coeff_bits(q)
}
