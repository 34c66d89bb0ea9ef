//! Randomness: the seeded stream, uniform and bounded ring sampling, discrete
//! Gaussians over Z and over ring vectors, and the rejection-sampling test.
//!
//! Gaussian widths follow the `rho_sigma(x) = exp(-pi |x - c|^2 / sigma^2)`
//! convention, so a width `sigma` has standard deviation `sigma / sqrt(2 pi)`.
//! Supports are truncated at `tail_cut` standard deviations around the center.
//!
//! Every floating-point transcendental goes through `libm` so that a fixed
//! seed produces the same bits on every platform.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rand_chacha::ChaCha20Rng;
use rand_core::{OsRng, RngCore, SeedableRng};
use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake128;

use crate::error::{Error, Result};
use crate::ring::{reduce, RingElement, RingVector};

pub const DEFAULT_TAIL_CUT: f64 = 13.0;
const FORK_LABEL: &[u8] = b"LaSDVS-v1-rng";

/// Converts a width in the `rho` convention to a standard deviation.
pub fn std_dev(sigma: f64) -> f64 {
    sigma / (2.0 * PI).sqrt()
}

/// Deterministic ChaCha20 stream keyed by a 32-byte seed.
///
/// Child streams for individual call sites are derived with [`fork`]:
/// `seed' = SHAKE128("LaSDVS-v1-rng" || seed || fork_counter_be64 || label)[..32]`.
///
/// [`fork`]: RandomSource::fork
#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: [u8; 32],
    rng: ChaCha20Rng,
    forks: u64,
}

impl RandomSource {
    pub fn from_seed(seed: [u8; 32]) -> Self {
        Self {
            seed,
            rng: ChaCha20Rng::from_seed(seed),
            forks: 0,
        }
    }

    /// Parses exactly 64 hex characters.
    pub fn from_hex(hex: &str) -> Result<Self> {
        let hex = hex.trim();
        if hex.len() != 64 {
            return Err(Error::InvalidSeed(format!(
                "expected 64 hex characters, got {}",
                hex.len()
            )));
        }
        let mut seed = [0u8; 32];
        for (i, byte) in seed.iter_mut().enumerate() {
            *byte = u8::from_str_radix(&hex[2 * i..2 * i + 2], 16)
                .map_err(|e| Error::InvalidSeed(e.to_string()))?;
        }
        Ok(Self::from_seed(seed))
    }

    pub fn from_entropy() -> Result<Self> {
        let mut seed = [0u8; 32];
        OsRng
            .try_fill_bytes(&mut seed)
            .map_err(|e| Error::Entropy(e.to_string()))?;
        Ok(Self::from_seed(seed))
    }

    pub fn seed(&self) -> [u8; 32] {
        self.seed
    }

    /// Position in the ChaCha keystream, in 32-bit words.
    pub fn position(&self) -> u128 {
        self.rng.get_word_pos()
    }

    /// Derives an independent child stream for the call site `label`.
    pub fn fork(&mut self, label: &str) -> RandomSource {
        let mut h = Shake128::default();
        h.update(FORK_LABEL);
        h.update(&self.seed);
        h.update(&self.forks.to_be_bytes());
        h.update(label.as_bytes());
        self.forks += 1;
        let mut seed = [0u8; 32];
        h.finalize_xof().read(&mut seed);
        RandomSource::from_seed(seed)
    }

    /// Uniform on `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[0, bound)` by rejection of the biased top range.
    pub fn uniform_below(&mut self, bound: u32) -> u32 {
        assert!(bound > 0);
        let zone = u32::MAX - (u32::MAX - bound + 1) % bound;
        loop {
            let v = self.rng.next_u32();
            if v <= zone {
                return v % bound;
            }
        }
    }

    /// Standard normal via Box-Muller.
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * PI * u2)
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }
    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand_core::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussParams {
    pub sigma: f64,
    pub center: f64,
    pub tail_cut: f64,
}

impl GaussParams {
    pub fn new(sigma: f64, center: f64) -> Result<Self> {
        Self::with_tail_cut(sigma, center, DEFAULT_TAIL_CUT)
    }

    pub fn centered(sigma: f64) -> Result<Self> {
        Self::new(sigma, 0.0)
    }

    pub fn with_tail_cut(sigma: f64, center: f64, tail_cut: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("gaussian width {sigma}")));
        }
        if !(tail_cut >= 6.0 && tail_cut.is_finite()) {
            return Err(Error::InvalidParameter(format!("tail cut {tail_cut} < 6")));
        }
        if !center.is_finite() {
            return Err(Error::InvalidParameter("non-finite center".into()));
        }
        Ok(Self {
            sigma,
            center,
            tail_cut,
        })
    }

    /// Inclusive integer support `[lo, hi]`; never empty.
    pub fn support(&self) -> (i64, i64) {
        let reach = self.tail_cut * std_dev(self.sigma);
        let nearest = self.center.round() as i64;
        let lo = ((self.center - reach).ceil() as i64).min(nearest);
        let hi = ((self.center + reach).floor() as i64).max(nearest);
        (lo, hi)
    }

    pub fn rho(&self, x: i64) -> f64 {
        let d = x as f64 - self.center;
        libm::exp(-PI * d * d / (self.sigma * self.sigma))
    }

    /// Exact probabilities of the truncated distribution over `support()`.
    pub fn probabilities(&self) -> (i64, Vec<f64>) {
        let (lo, hi) = self.support();
        let weights: Vec<f64> = (lo..=hi).map(|x| self.rho(x)).collect();
        let total: f64 = weights.iter().sum();
        (lo, weights.into_iter().map(|w| w / total).collect())
    }

    fn key(&self) -> (u64, u64, u64) {
        (
            self.sigma.to_bits(),
            self.center.to_bits(),
            self.tail_cut.to_bits(),
        )
    }
}

/// Inverse-CDF table with 64-bit fixed-point cumulative probabilities.
#[derive(Debug)]
pub struct CdtTable {
    lo: i64,
    /// `cum[i]` is `2^64 * P(X <= lo + i)`; the final entry (`2^64`) is implicit.
    cum: Vec<u64>,
}

impl CdtTable {
    pub fn new(g: &GaussParams) -> Self {
        let (lo, probs) = g.probabilities();
        let scale = 2f64.powi(64);
        let mut running: u128 = 0;
        let mut cum = Vec::with_capacity(probs.len().saturating_sub(1));
        for p in &probs[..probs.len() - 1] {
            running += (p * scale).round() as u128;
            cum.push(running.min(u64::MAX as u128) as u64);
        }
        Self { lo, cum }
    }

    /// Shared table for `g`, built on first use.
    pub fn cached(g: &GaussParams) -> Arc<CdtTable> {
        static CACHE: OnceLock<Mutex<HashMap<(u64, u64, u64), Arc<CdtTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(t) = cache.lock().expect("cdt cache poisoned").get(&g.key()) {
            return t.clone();
        }
        let table = Arc::new(CdtTable::new(g));
        cache
            .lock()
            .expect("cdt cache poisoned")
            .entry(g.key())
            .or_insert(table)
            .clone()
    }

    pub fn sample(&self, rng: &mut RandomSource) -> i64 {
        let u = rng.next_u64();
        self.lo + self.cum.partition_point(|&c| c <= u) as i64
    }
}

/// Integer `x` with probability proportional to `rho_{sigma,c}(x)` on the
/// truncated support, drawn from a cached inverse-CDF table.
pub fn sample_z_gaussian(rng: &mut RandomSource, g: &GaussParams) -> i64 {
    CdtTable::cached(g).sample(rng)
}

/// Same distribution as [`sample_z_gaussian`], by rejection from the uniform
/// distribution on the support. Used where the center changes on every call
/// and a table per center would be wasteful.
pub fn sample_z_rejection(rng: &mut RandomSource, g: &GaussParams) -> i64 {
    let (lo, hi) = g.support();
    let width = (hi - lo + 1) as u32;
    loop {
        let x = lo + rng.uniform_below(width) as i64;
        if rng.next_f64() < g.rho(x) {
            return x;
        }
    }
}

pub fn sample_uniform_ring(rng: &mut RandomSource, n: usize, q: u32) -> RingElement {
    let coeffs = if q.is_power_of_two() {
        let mask = q - 1;
        (0..n).map(|_| rng.next_u32() & mask).collect()
    } else {
        (0..n).map(|_| rng.uniform_below(q)).collect()
    };
    RingElement::from_coeffs(q, coeffs).expect("uniform coefficients are canonical")
}

pub fn sample_uniform_vector(rng: &mut RandomSource, len: usize, n: usize, q: u32) -> RingVector {
    RingVector::new((0..len).map(|_| sample_uniform_ring(rng, n, q)).collect())
        .expect("non-empty uniform vector")
}

/// `len` integers drawn uniformly from `{-d, ..., d}`, each embedded as a
/// constant ring element.
pub fn sample_bounded(
    rng: &mut RandomSource,
    d: u32,
    len: usize,
    n: usize,
    q: u32,
) -> Result<RingVector> {
    if d == 0 {
        return Err(Error::InvalidParameter("bound d must be at least 1".into()));
    }
    if len == 0 {
        return Err(Error::InvalidParameter("empty secret vector".into()));
    }
    let span = 2 * d + 1;
    let entries = (0..len)
        .map(|_| {
            let v = rng.uniform_below(span) as i64 - d as i64;
            RingElement::constant(n, q, v)
        })
        .collect();
    RingVector::new(entries)
}

/// Every one of the `n * len` coefficients drawn from `D_{Z, sigma}`.
pub fn sample_ring_gaussian(
    rng: &mut RandomSource,
    n: usize,
    q: u32,
    sigma: f64,
    len: usize,
) -> Result<RingVector> {
    if len == 0 {
        return Err(Error::InvalidParameter("empty gaussian vector".into()));
    }
    let table = CdtTable::cached(&GaussParams::centered(sigma)?);
    let entries = (0..len)
        .map(|_| {
            let coeffs = (0..n).map(|_| reduce(table.sample(rng), q)).collect();
            RingElement::from_raw(q, coeffs)
        })
        .collect();
    RingVector::new(entries)
}

/// `min(1, rho_sigma(z) / (M * rho_{sigma, shift}(z)))` over centered embeddings.
pub fn acceptance_probability(z: &RingVector, shift: &RingVector, sigma: f64, m: f64) -> f64 {
    let zc = z.centered_coeffs();
    let vc = shift.centered_coeffs();
    assert_eq!(zc.len(), vc.len(), "embedding dimension mismatch");
    let inner: i128 = zc
        .iter()
        .zip(&vc)
        .map(|(&a, &b)| a as i128 * b as i128)
        .sum();
    let shift_sq: i128 = vc.iter().map(|&b| b as i128 * b as i128).sum();
    let s2 = std_dev(sigma).powi(2);
    let exponent = (-2.0 * inner as f64 + shift_sq as f64) / (2.0 * s2);
    (libm::exp(exponent) / m).min(1.0)
}

pub fn rejection_accept(
    rng: &mut RandomSource,
    z: &RingVector,
    shift: &RingVector,
    sigma: f64,
    m: f64,
) -> bool {
    let p = acceptance_probability(z, shift, sigma, m);
    rng.next_f64() < p
}
