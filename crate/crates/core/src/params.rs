//! Parameter profiles and the public parameter bundle.

use std::fmt;

use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake128;

use crate::error::{Error, Result};
use crate::ring::RingVector;
use crate::sampler::{sample_uniform_vector, RandomSource};

/// Identifier of the challenge hash instance recorded in every parameter set.
pub const HASH_ID: &str = "shake128/LaSDVS-v1-H";
/// Security floor on `log2(2^kappa * C(n, kappa))` for non-toy profiles.
pub const DEFAULT_ENTROPY_BITS: u32 = 100;

const STANDARD_PARAMS_LABEL: &[u8] = b"LaSDVS-v1-params";

/// The tunable inputs of a parameter set; everything else is derived.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileSpec {
    pub name: String,
    pub n: usize,
    /// `q = 2^log_q`.
    pub log_q: u32,
    pub l: usize,
    pub gamma: f64,
    pub kappa: usize,
    pub sigma_e: f64,
    pub sigma_g: f64,
    pub sigma_p: f64,
    pub alpha: f64,
    pub eta: f64,
    /// Lower bound on challenge entropy in bits; 0 disables the check.
    pub min_entropy_bits: u32,
}

impl ProfileSpec {
    /// Insecure toy ring for fast end-to-end checks.
    pub fn toy() -> Self {
        Self {
            name: "toy".into(),
            n: 16,
            log_q: 10,
            l: 2,
            gamma: 10.0,
            kappa: 8,
            sigma_e: 1.0,
            sigma_g: 4.0,
            sigma_p: 40.0,
            alpha: 12.0,
            eta: 1.3,
            min_entropy_bits: 0,
        }
    }

    pub fn desk() -> Self {
        Self {
            name: "desk".into(),
            n: 128,
            log_q: 24,
            l: 2,
            gamma: 8.0,
            kappa: 21,
            sigma_e: 3.2,
            sigma_g: 6.0,
            sigma_p: 1000.0,
            alpha: 12.0,
            eta: 1.3,
            min_entropy_bits: DEFAULT_ENTROPY_BITS,
        }
    }

    /// The desk profile with `n` doubled, used for size scaling.
    pub fn wide() -> Self {
        Self {
            name: "wide".into(),
            n: 256,
            sigma_p: 1400.0,
            ..Self::desk()
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "toy" => Ok(Self::toy()),
            "desk" => Ok(Self::desk()),
            "wide" => Ok(Self::wide()),
            other => Err(Error::UnknownProfile(other.into())),
        }
    }

    /// Parses `key = value` lines; `#` starts a comment. A `base` key picks
    /// the starting profile (default desk). Custom profiles always enforce
    /// the 100-bit challenge entropy floor.
    pub fn parse_custom(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!("line {}: expected key = value", lineno + 1))
            })?;
            pairs.push((key.trim().to_string(), value.trim().to_string()));
        }
        let base = pairs
            .iter()
            .find(|(k, _)| k == "base")
            .map(|(_, v)| v.as_str())
            .unwrap_or("desk");
        let mut spec = Self::by_name(base)?;
        spec.name = "custom".into();
        spec.min_entropy_bits = DEFAULT_ENTROPY_BITS;
        for (key, value) in &pairs {
            let bad = || Error::InvalidParameter(format!("bad value for {key}: {value}"));
            let float = || value.parse::<f64>().map_err(|_| bad());
            let int = || value.parse::<usize>().map_err(|_| bad());
            match key.as_str() {
                "base" => {}
                "name" => spec.name = value.clone(),
                "n" => spec.n = int()?,
                "log_q" => spec.log_q = value.parse().map_err(|_| bad())?,
                "l" => spec.l = int()?,
                "gamma" => spec.gamma = float()?,
                "kappa" => spec.kappa = int()?,
                "sigma_e" => spec.sigma_e = float()?,
                "sigma_g" => spec.sigma_g = float()?,
                "sigma_p" => spec.sigma_p = float()?,
                "alpha" => spec.alpha = float()?,
                "eta" => spec.eta = float()?,
                other => return Err(Error::InvalidParameter(format!("unknown key {other}"))),
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn q(&self) -> u32 {
        1u32 << self.log_q
    }

    /// Gadget length `k = ceil(log2 q)`.
    pub fn k(&self) -> usize {
        self.log_q as usize
    }

    /// `d = floor(q^{1/gamma})`.
    pub fn d(&self) -> u32 {
        let root = libm::pow(self.q() as f64, 1.0 / self.gamma);
        let nearest = libm::round(root);
        if (root - nearest).abs() < 1e-9 {
            nearest as u32
        } else {
            libm::floor(root) as u32
        }
    }

    /// `log2(2^kappa * C(n, kappa))`.
    pub fn challenge_entropy_bits(&self) -> f64 {
        challenge_entropy_bits(self.n, self.kappa)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParameter(msg));
        if !self.n.is_power_of_two() || !(2..=4096).contains(&self.n) {
            return fail(format!(
                "n = {} must be a power of two in [2, 4096]",
                self.n
            ));
        }
        if !(2..=30).contains(&self.log_q) {
            return fail(format!("log_q = {} must lie in [2, 30]", self.log_q));
        }
        if self.l == 0 || self.l > 64 {
            return fail(format!("l = {} must lie in [1, 64]", self.l));
        }
        if !(self.gamma > 1.0 && self.gamma.is_finite()) {
            return fail(format!("gamma = {} must exceed 1", self.gamma));
        }
        let d = self.d();
        if d < 1 || d > self.q() / 4 {
            return fail(format!("d = {d} must lie in [1, q/4]"));
        }
        if self.kappa == 0 || self.kappa > self.n {
            return fail(format!("kappa = {} must lie in [1, n]", self.kappa));
        }
        for (name, v) in [
            ("sigma_e", self.sigma_e),
            ("sigma_g", self.sigma_g),
            ("sigma_p", self.sigma_p),
            ("alpha", self.alpha),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return fail(format!("{name} = {v} must be positive"));
            }
        }
        if !(self.eta > 1.0 && self.eta < 2.0) {
            return fail(format!("eta = {} must lie in (1, 2)", self.eta));
        }
        let bits = self.challenge_entropy_bits();
        if bits < self.min_entropy_bits as f64 {
            return Err(Error::InsufficientChallengeEntropy {
                bits,
                required: self.min_entropy_bits,
            });
        }
        Ok(())
    }

    /// Canonical byte encoding of the spec (big-endian integers, IEEE-754 bit
    /// patterns for reals, length-prefixed name).
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&(self.name.len() as u32).to_be_bytes());
        out.extend_from_slice(self.name.as_bytes());
        for v in [self.n as u32, self.log_q, self.l as u32, self.kappa as u32] {
            out.extend_from_slice(&v.to_be_bytes());
        }
        for v in [
            self.gamma,
            self.sigma_e,
            self.sigma_g,
            self.sigma_p,
            self.alpha,
            self.eta,
        ] {
            out.extend_from_slice(&v.to_bits().to_be_bytes());
        }
        out.extend_from_slice(&self.min_entropy_bits.to_be_bytes());
        out
    }

    /// Inverse of [`to_bytes`](Self::to_bytes); returns the spec and the
    /// number of bytes consumed.
    pub fn from_bytes(bytes: &[u8]) -> Result<(Self, usize)> {
        let mut cur = Cursor { bytes, pos: 0 };
        let name_len = cur.u32()? as usize;
        if name_len > 64 {
            return Err(Error::MalformedHeader("profile name too long".into()));
        }
        let name = String::from_utf8(cur.take(name_len)?.to_vec())
            .map_err(|_| Error::MalformedHeader("profile name is not UTF-8".into()))?;
        let n = cur.u32()? as usize;
        let log_q = cur.u32()?;
        let l = cur.u32()? as usize;
        let kappa = cur.u32()? as usize;
        let mut reals = [0f64; 6];
        for r in reals.iter_mut() {
            *r = f64::from_bits(cur.u64()?);
        }
        let min_entropy_bits = cur.u32()?;
        let [gamma, sigma_e, sigma_g, sigma_p, alpha, eta] = reals;
        let spec = Self {
            name,
            n,
            log_q,
            l,
            gamma,
            kappa,
            sigma_e,
            sigma_g,
            sigma_p,
            alpha,
            eta,
            min_entropy_bits,
        };
        spec.validate()
            .map_err(|e| Error::MalformedHeader(format!("invalid parameters: {e}")))?;
        Ok((spec, cur.pos))
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        if self.pos + len > self.bytes.len() {
            return Err(Error::EncodedLengthMismatch {
                expected: self.pos + len,
                actual: self.bytes.len(),
            });
        }
        let out = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// `log2(2^kappa * C(n, kappa))`, summed term by term.
pub fn challenge_entropy_bits(n: usize, kappa: usize) -> f64 {
    if kappa > n {
        return f64::NEG_INFINITY;
    }
    let binom: f64 = (0..kappa)
        .map(|i| libm::log2((n - i) as f64) - libm::log2((i + 1) as f64))
        .sum();
    kappa as f64 + binom
}

/// The public parameters `pp`: a validated profile, its derived constants and
/// the public vector `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    pub spec: ProfileSpec,
    pub n: usize,
    pub q: u32,
    pub k: usize,
    pub l: usize,
    pub d: u32,
    pub kappa: usize,
    pub sigma_e: f64,
    pub sigma_g: f64,
    pub sigma_p: f64,
    /// Width of the randomized rounding inside the perturbation sampler.
    pub sigma_round: f64,
    /// `T = d * kappa * sqrt(n (l + k))`.
    pub t_bound: f64,
    /// `sigma_z = alpha * T`.
    pub sigma_z: f64,
    /// `M = exp(12 / alpha + 1 / (2 alpha^2))`.
    pub m: f64,
    /// Verification bound `B_z = eta * sigma_z * sqrt(n (l + k))`.
    pub b_z: f64,
    pub a: RingVector,
    pub hash_id: &'static str,
}

impl Params {
    /// Builds the bundle from a spec and an explicit public vector.
    pub fn new(spec: ProfileSpec, a: RingVector) -> Result<Self> {
        spec.validate()?;
        let (n, q, k, l) = (spec.n, spec.q(), spec.k(), spec.l);
        if a.len() != l + k || a.n() != n || a.q() != q {
            return Err(Error::InvalidParameter(format!(
                "public vector shape ({}, n={}, q={}) does not match profile",
                a.len(),
                a.n(),
                a.q()
            )));
        }
        let d = spec.d();
        let dim = (n * (l + k)) as f64;
        let t_bound = d as f64 * spec.kappa as f64 * dim.sqrt();
        let sigma_z = spec.alpha * t_bound;
        let m = libm::exp(12.0 / spec.alpha + 1.0 / (2.0 * spec.alpha * spec.alpha));
        Ok(Self {
            n,
            q,
            k,
            l,
            d,
            kappa: spec.kappa,
            sigma_e: spec.sigma_e,
            sigma_g: spec.sigma_g,
            sigma_p: spec.sigma_p,
            sigma_round: spec.sigma_g,
            t_bound,
            sigma_z,
            m,
            b_z: spec.eta * sigma_z * dim.sqrt(),
            a,
            hash_id: HASH_ID,
            spec,
        })
    }

    /// Samples a fresh uniform `a`.
    pub fn setup(spec: ProfileSpec, rng: &mut RandomSource) -> Result<Self> {
        spec.validate()?;
        let a = sample_uniform_vector(rng, spec.l + spec.k(), spec.n, spec.q());
        Self::new(spec, a)
    }

    /// Deterministic parameters for a profile: `a` is expanded from a
    /// hash of the spec encoding, so everyone using the same profile shares it.
    pub fn standard(spec: ProfileSpec) -> Result<Self> {
        let mut h = Shake128::default();
        h.update(STANDARD_PARAMS_LABEL);
        h.update(&spec.to_bytes());
        let mut seed = [0u8; 32];
        h.finalize_xof().read(&mut seed);
        Self::setup(spec, &mut RandomSource::from_seed(seed))
    }

    /// Length `l + k` of every public and secret vector.
    pub fn width(&self) -> usize {
        self.l + self.k
    }

    /// Dimension `n (l + k)` of the coefficient embedding.
    pub fn dim(&self) -> usize {
        self.n * self.width()
    }

    pub fn challenge_entropy_bits(&self) -> f64 {
        self.spec.challenge_entropy_bits()
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "profile {}: n={} q=2^{} k={} l={} d={} kappa={} sigma_e={} sigma_g={} sigma_p={} \
             sigma_z={:.1} M={:.4} B_z={:.1} entropy={:.2} bits",
            self.spec.name,
            self.n,
            self.spec.log_q,
            self.k,
            self.l,
            self.d,
            self.kappa,
            self.sigma_e,
            self.sigma_g,
            self.sigma_p,
            self.sigma_z,
            self.m,
            self.b_z,
            self.challenge_entropy_bits()
        )
    }
}
