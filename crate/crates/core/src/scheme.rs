//! The designated-verifier signature scheme: key generation for both roles,
//! signing with rejection sampling, verification through the trapdoor, and
//! the verifier's simulation of signatures.

use crate::challenge::{hash_challenge, ChallengeElement};
use crate::error::{Error, Result};
use crate::gadget::{
    ring_gen_trap_fresh, ring_invert, trapdoor_identity_holds, PerturbationSampler,
    PreimageSampler, PreimageWidths, TaggedPublicVector, TrapdoorMatrix,
};
use crate::params::Params;
use crate::ring::{RingElement, RingVector};
use crate::sampler::{
    rejection_accept, sample_bounded, sample_ring_gaussian, sample_uniform_ring, RandomSource,
};

/// How many fresh trapdoors verifier key generation tries before giving up on
/// one whose perturbation covariance is positive definite.
const VER_KEYGEN_ATTEMPTS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignerPublicKey {
    pub t: RingElement,
}

/// `l + k` integers in `[-d, d]`, stored as constant ring elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignerSecretKey {
    pub s: RingVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignerKeyPair {
    pub public: SignerPublicKey,
    pub secret: SignerSecretKey,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifierPublicKey {
    pub b0: TaggedPublicVector,
    pub b1: TaggedPublicVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifierSecretKey {
    pub r0: TrapdoorMatrix,
    pub r1: TrapdoorMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifierKeyPair {
    pub public: VerifierPublicKey,
    pub secret: VerifierSecretKey,
}

impl VerifierKeyPair {
    pub fn identities_hold(&self) -> bool {
        trapdoor_identity_holds(&self.public.b0, &self.secret.r0)
            && trapdoor_identity_holds(&self.public.b1, &self.secret.r1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub c0: RingVector,
    pub c1: ChallengeElement,
    pub z: RingVector,
}

/// Bookkeeping from one call to [`sign_detailed`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SignStats {
    /// Loop iterations, including the successful one.
    pub attempts: usize,
    /// Iterations dropped by the rejection-sampling test.
    pub rejected: usize,
    /// Iterations that passed rejection sampling but missed the norm bound.
    pub norm_restarts: usize,
}

/// Why a signature was rejected.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rejection {
    /// Components have the wrong length, ring, or challenge weight.
    Malformed,
    /// `||z||` is zero or not below `B_z`.
    NormOutOfRange,
    /// The trapdoor could not open `c0`.
    InversionFailed,
    /// The recomputed challenge differs from `c1`.
    ChallengeMismatch,
}

impl Params {
    pub fn preimage_widths(&self) -> PreimageWidths {
        PreimageWidths {
            sigma_p: self.sigma_p,
            sigma_g: self.sigma_g,
            sigma_round: self.sigma_round,
        }
    }

    /// `0 < ||z|| < B_z`.
    pub fn norm_bound_holds(&self, z: &RingVector) -> bool {
        let norm = z.euclid_norm();
        norm > 0.0 && norm < self.b_z
    }

    fn attempt_cap(&self) -> usize {
        (100.0 * self.m).ceil() as usize
    }

    fn check_vector(&self, v: &RingVector) -> bool {
        v.len() == self.width() && v.n() == self.n && v.q() == self.q
    }
}

pub fn sign_keygen(rng: &mut RandomSource, pp: &Params) -> Result<SignerKeyPair> {
    let s = sample_bounded(rng, pp.d, pp.width(), pp.n, pp.q)?;
    let t = pp.a.inner_product(&s)?;
    Ok(SignerKeyPair {
        public: SignerPublicKey { t },
        secret: SignerSecretKey { s },
    })
}

/// Two independent trapdoors with tag 1. A trapdoor for `b1` whose singular
/// value is too large for `sigma_p` is discarded and regenerated.
pub fn ver_keygen(rng: &mut RandomSource, pp: &Params) -> Result<VerifierKeyPair> {
    let one = RingElement::one(pp.n, pp.q);
    let widths = pp.preimage_widths();
    let mut last = None;
    for _ in 0..VER_KEYGEN_ATTEMPTS {
        let (b0, r0) = ring_gen_trap_fresh(rng, pp.n, pp.q, pp.l, &one, pp.sigma_e)?;
        let (b1, r1) = ring_gen_trap_fresh(rng, pp.n, pp.q, pp.l, &one, pp.sigma_e)?;
        match PerturbationSampler::new(&r1, widths) {
            Ok(_) => {
                return Ok(VerifierKeyPair {
                    public: VerifierPublicKey { b0, b1 },
                    secret: VerifierSecretKey { r0, r1 },
                })
            }
            Err(e @ Error::CovarianceNotPositiveDefinite(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

fn check_signer(pp: &Params, signer: &SignerKeyPair) -> Result<()> {
    let s = &signer.secret.s;
    let t = &signer.public.t;
    if !pp.check_vector(s) || t.n() != pp.n || t.q() != pp.q {
        return Err(Error::InvalidParameter(
            "signer key does not match parameters".into(),
        ));
    }
    Ok(())
}

fn check_verifier_public(pp: &Params, pk: &VerifierPublicKey) -> Result<()> {
    for b in [&pk.b0, &pk.b1] {
        if !pp.check_vector(b.vector()) || b.l() != pp.l {
            return Err(Error::InvalidParameter(
                "verifier key does not match parameters".into(),
            ));
        }
    }
    Ok(())
}

pub fn sign(
    rng: &mut RandomSource,
    pp: &Params,
    signer: &SignerKeyPair,
    pk_v: &VerifierPublicKey,
    mu: &[u8],
) -> Result<Signature> {
    sign_detailed(rng, pp, signer, pk_v, mu, pp.sigma_p).map(|(sig, _)| sig)
}

/// Signing with an explicit width `sigma_sim` for the commitment noise `e`.
/// The scheme uses `sigma_sim = sigma_p`; other values exist for the
/// statistical negative control.
pub fn sign_detailed(
    rng: &mut RandomSource,
    pp: &Params,
    signer: &SignerKeyPair,
    pk_v: &VerifierPublicKey,
    mu: &[u8],
    sigma_sim: f64,
) -> Result<(Signature, SignStats)> {
    check_signer(pp, signer)?;
    check_verifier_public(pp, pk_v)?;
    let mut stats = SignStats::default();
    let cap = pp.attempt_cap();
    while stats.attempts < cap {
        stats.attempts += 1;
        let s = sample_uniform_ring(rng, pp.n, pp.q);
        let e = sample_ring_gaussian(rng, pp.n, pp.q, sigma_sim, pp.width())?;
        let y = sample_ring_gaussian(rng, pp.n, pp.q, pp.sigma_z, pp.width())?;
        let c0 = pk_v.b0.vector().scalar_mul(&s)?.checked_add(&e)?;
        let w =
            pp.a.inner_product(&y)?
                .checked_add(&pk_v.b1.vector().inner_product(&e)?)?;
        let c1 = hash_challenge(&w, &signer.public.t, &s, mu, pp.kappa)?;
        let shift = c1.mul_vector(&signer.secret.s)?;
        let z = shift.checked_add(&y)?;
        if !rejection_accept(rng, &z, &shift, pp.sigma_z, pp.m) {
            stats.rejected += 1;
            continue;
        }
        if !pp.norm_bound_holds(&z) {
            stats.norm_restarts += 1;
            continue;
        }
        return Ok((Signature { c0, c1, z }, stats));
    }
    Err(Error::SigningAttemptsExceeded(cap))
}

/// Opens a commitment `c0 = b0 s + e` with the trapdoor of `b0`.
pub fn open_commitment(
    pp: &Params,
    sk_v: &VerifierSecretKey,
    pk_v: &VerifierPublicKey,
    c0: &RingVector,
) -> Result<(RingElement, RingVector)> {
    if !pp.check_vector(c0) {
        return Err(Error::LengthMismatch {
            expected: pp.width(),
            actual: c0.len(),
        });
    }
    ring_invert(&sk_v.r0, &pk_v.b0, c0)
}

pub fn verify_detailed(
    pp: &Params,
    sk_v: &VerifierSecretKey,
    pk_s: &SignerPublicKey,
    pk_v: &VerifierPublicKey,
    sig: &Signature,
    mu: &[u8],
) -> std::result::Result<(), Rejection> {
    let c1 = sig.c1.element();
    if !pp.check_vector(&sig.c0)
        || !pp.check_vector(&sig.z)
        || c1.n() != pp.n
        || c1.q() != pp.q
        || sig.c1.kappa() != pp.kappa
        || pk_s.t.n() != pp.n
        || pk_s.t.q() != pp.q
        || check_verifier_public(pp, pk_v).is_err()
    {
        return Err(Rejection::Malformed);
    }
    if !pp.norm_bound_holds(&sig.z) {
        return Err(Rejection::NormOutOfRange);
    }
    let (s, e) =
        open_commitment(pp, sk_v, pk_v, &sig.c0).map_err(|_| Rejection::InversionFailed)?;
    let recompute = || -> Result<ChallengeElement> {
        let w =
            pp.a.inner_product(&sig.z)?
                .checked_sub(&sig.c1.mul_element(&pk_s.t)?)?
                .checked_add(&pk_v.b1.vector().inner_product(&e)?)?;
        hash_challenge(&w, &pk_s.t, &s, mu, pp.kappa)
    };
    match recompute() {
        Ok(c) if c == sig.c1 => Ok(()),
        Ok(_) => Err(Rejection::ChallengeMismatch),
        Err(_) => Err(Rejection::Malformed),
    }
}

pub fn verify(
    pp: &Params,
    sk_v: &VerifierSecretKey,
    pk_s: &SignerPublicKey,
    pk_v: &VerifierPublicKey,
    sig: &Signature,
    mu: &[u8],
) -> bool {
    verify_detailed(pp, sk_v, pk_s, pk_v, sig, mu).is_ok()
}

/// The verifier's signature simulator, holding a ready preimage sampler for `b1`.
#[derive(Clone, Debug)]
pub struct Simulator {
    pp: Params,
    pk_v: VerifierPublicKey,
    sampler: PreimageSampler,
}

impl Simulator {
    pub fn new(pp: &Params, sk_v: &VerifierSecretKey, pk_v: &VerifierPublicKey) -> Result<Self> {
        check_verifier_public(pp, pk_v)?;
        let sampler = PreimageSampler::new(&sk_v.r1, &pk_v.b1, pp.preimage_widths())?;
        Ok(Self {
            pp: pp.clone(),
            pk_v: pk_v.clone(),
            sampler,
        })
    }

    pub fn simulate(
        &self,
        rng: &mut RandomSource,
        pk_s: &SignerPublicKey,
        mu: &[u8],
    ) -> Result<Signature> {
        let pp = &self.pp;
        if pk_s.t.n() != pp.n || pk_s.t.q() != pp.q {
            return Err(Error::InvalidParameter(
                "signer key does not match parameters".into(),
            ));
        }
        let cap = pp.attempt_cap();
        let mut z = None;
        for _ in 0..cap {
            let candidate = sample_ring_gaussian(rng, pp.n, pp.q, pp.sigma_z, pp.width())?;
            if pp.norm_bound_holds(&candidate) {
                z = Some(candidate);
                break;
            }
        }
        let z = z.ok_or(Error::SigningAttemptsExceeded(cap))?;
        let s = sample_uniform_ring(rng, pp.n, pp.q);
        let u = sample_uniform_ring(rng, pp.n, pp.q);
        let c1 = hash_challenge(&u, &pk_s.t, &s, mu, pp.kappa)?;
        let target = u
            .checked_sub(&pp.a.inner_product(&z)?)?
            .checked_add(&c1.mul_element(&pk_s.t)?)?;
        let e = self.sampler.sample(rng, &target)?;
        let c0 = self.pk_v.b0.vector().scalar_mul(&s)?.checked_add(&e)?;
        Ok(Signature { c0, c1, z })
    }
}

/// One-shot simulation; building a [`Simulator`] once is cheaper for batches.
pub fn simulate(
    rng: &mut RandomSource,
    pp: &Params,
    sk_v: &VerifierSecretKey,
    pk_s: &SignerPublicKey,
    pk_v: &VerifierPublicKey,
    mu: &[u8],
) -> Result<Signature> {
    Simulator::new(pp, sk_v, pk_v)?.simulate(rng, pk_s, mu)
}
