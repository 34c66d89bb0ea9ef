//! Wire format for parameters, keys and signatures, and the size report.
//!
//! Every artifact is `"LSDV" || version || type tag || params fingerprint (16
//! bytes) || body`. Bodies are LSB-first bit streams zero-padded to a byte;
//! ring elements use `ceil(log2 q)` bits per canonical coefficient.

use std::fmt::Write as _;

use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake128;

use crate::bits::{BitReader, BitWriter};
use crate::challenge::ChallengeElement;
use crate::error::{Error, Result};
use crate::gadget::{TaggedPublicVector, TrapdoorMatrix};
use crate::params::{Params, ProfileSpec, HASH_ID};
use crate::ring::{coeff_bits, RingElement, RingVector};
use crate::sampler::RandomSource;
use crate::scheme::{
    sign, sign_keygen, ver_keygen, Signature, SignerPublicKey, SignerSecretKey, VerifierPublicKey,
    VerifierSecretKey,
};

pub const MAGIC: &[u8; 4] = b"LSDV";
pub const VERSION: u8 = 1;
pub const FINGERPRINT_LEN: usize = 16;
pub const HEADER_LEN: usize = 4 + 1 + 1 + FINGERPRINT_LEN;

const FINGERPRINT_LABEL: &[u8] = b"LaSDVS-v1-fp";

/// Type tag carried in the header.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Params = 1,
    SignerPublic = 2,
    SignerSecret = 3,
    VerifierPublic = 4,
    VerifierSecret = 5,
    SignatureDense = 6,
    SignatureSparse = 7,
}

impl Kind {
    fn from_tag(tag: u8) -> Result<Self> {
        Ok(match tag {
            1 => Kind::Params,
            2 => Kind::SignerPublic,
            3 => Kind::SignerSecret,
            4 => Kind::VerifierPublic,
            5 => Kind::VerifierSecret,
            6 => Kind::SignatureDense,
            7 => Kind::SignatureSparse,
            other => return Err(Error::MalformedHeader(format!("unknown type tag {other}"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::Params => "params",
            Kind::SignerPublic => "signer public key",
            Kind::SignerSecret => "signer secret key",
            Kind::VerifierPublic => "verifier public key",
            Kind::VerifierSecret => "verifier secret key",
            Kind::SignatureDense => "signature (dense)",
            Kind::SignatureSparse => "signature (sparse)",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Header {
    pub kind: Kind,
    pub fingerprint: [u8; FINGERPRINT_LEN],
}

/// Reads and checks magic and version; the rest of the header is returned.
pub fn parse_header(bytes: &[u8]) -> Result<(Header, &[u8])> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::MalformedHeader(format!(
            "{} bytes is shorter than the {HEADER_LEN}-byte header",
            bytes.len()
        )));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::MalformedHeader("bad magic".into()));
    }
    if bytes[4] != VERSION {
        return Err(Error::UnsupportedVersion {
            found: bytes[4],
            expected: VERSION,
        });
    }
    let kind = Kind::from_tag(bytes[5])?;
    let mut fingerprint = [0u8; FINGERPRINT_LEN];
    fingerprint.copy_from_slice(&bytes[6..HEADER_LEN]);
    Ok((Header { kind, fingerprint }, &bytes[HEADER_LEN..]))
}

fn write_header(kind: Kind, fingerprint: &[u8; FINGERPRINT_LEN]) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN);
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(kind as u8);
    out.extend_from_slice(fingerprint);
    out
}

/// Checks header kind and fingerprint against `pp`, returning the body.
fn open<'a>(pp: &Params, bytes: &'a [u8], expected: &[Kind]) -> Result<(Kind, &'a [u8])> {
    let (header, body) = parse_header(bytes)?;
    if !expected.contains(&header.kind) {
        return Err(Error::MalformedHeader(format!(
            "expected {}, found {}",
            expected[0].name(),
            header.kind.name()
        )));
    }
    if header.fingerprint != fingerprint(pp) {
        return Err(Error::ParamsMismatch);
    }
    Ok((header.kind, body))
}

fn seal(pp: &Params, kind: Kind, body: BitWriter) -> Vec<u8> {
    let mut out = write_header(kind, &fingerprint(pp));
    out.extend(body.finish());
    out
}

fn params_body(pp: &Params) -> Vec<u8> {
    let mut out = pp.spec.to_bytes();
    out.extend_from_slice(&(HASH_ID.len() as u32).to_be_bytes());
    out.extend_from_slice(HASH_ID.as_bytes());
    let mut w = BitWriter::new();
    pp.a.write_bits(&mut w);
    out.extend(w.finish());
    out
}

/// First 16 bytes of `SHAKE128(label || params body)`.
pub fn fingerprint(pp: &Params) -> [u8; FINGERPRINT_LEN] {
    let mut h = Shake128::default();
    h.update(FINGERPRINT_LABEL);
    h.update(&params_body(pp));
    let mut out = [0u8; FINGERPRINT_LEN];
    h.finalize_xof().read(&mut out);
    out
}

/// First 8 bytes of `SHAKE128(bytes)`, for display.
pub fn short_fingerprint(bytes: &[u8]) -> [u8; 8] {
    let mut h = Shake128::default();
    h.update(bytes);
    let mut out = [0u8; 8];
    h.finalize_xof().read(&mut out);
    out
}

pub fn encode_params(pp: &Params) -> Vec<u8> {
    let mut out = write_header(Kind::Params, &fingerprint(pp));
    out.extend(params_body(pp));
    out
}

pub fn decode_params(bytes: &[u8]) -> Result<Params> {
    let (header, body) = parse_header(bytes)?;
    if header.kind != Kind::Params {
        return Err(Error::MalformedHeader(format!(
            "expected params, found {}",
            header.kind.name()
        )));
    }
    let (spec, used) = ProfileSpec::from_bytes(body)?;
    let rest = &body[used..];
    if rest.len() < 4 {
        return Err(Error::EncodedLengthMismatch {
            expected: used + 4,
            actual: body.len(),
        });
    }
    let id_len = u32::from_be_bytes(rest[..4].try_into().unwrap()) as usize;
    if rest.len() < 4 + id_len {
        return Err(Error::EncodedLengthMismatch {
            expected: used + 4 + id_len,
            actual: body.len(),
        });
    }
    if &rest[4..4 + id_len] != HASH_ID.as_bytes() {
        return Err(Error::MalformedHeader("unknown hash instance".into()));
    }
    let mut r = BitReader::new(&rest[4 + id_len..]);
    let a = RingVector::read_bits(&mut r, spec.l + spec.k(), spec.n, spec.q())?;
    r.finish()?;
    let pp = Params::new(spec, a)?;
    if fingerprint(&pp) != header.fingerprint {
        return Err(Error::ParamsMismatch);
    }
    Ok(pp)
}

/// Bits per secret-key integer: `ceil(log2(2d + 1))`.
pub fn secret_width(d: u32) -> usize {
    ceil_log2(2 * d as u64 + 1)
}

fn ceil_log2(x: u64) -> usize {
    if x <= 1 {
        0
    } else {
        (64 - (x - 1).leading_zeros()) as usize
    }
}

fn signer_public_body(key: &SignerPublicKey) -> BitWriter {
    let mut w = BitWriter::new();
    key.t.write_bits(&mut w);
    w
}

pub fn encode_signer_public(pp: &Params, key: &SignerPublicKey) -> Vec<u8> {
    seal(pp, Kind::SignerPublic, signer_public_body(key))
}

pub fn decode_signer_public(pp: &Params, bytes: &[u8]) -> Result<SignerPublicKey> {
    let (_, body) = open(pp, bytes, &[Kind::SignerPublic])?;
    let mut r = BitReader::new(body);
    let t = RingElement::read_bits(&mut r, pp.n, pp.q)?;
    r.finish()?;
    Ok(SignerPublicKey { t })
}

fn signer_secret_body(pp: &Params, key: &SignerSecretKey) -> Result<BitWriter> {
    let width = secret_width(pp.d);
    let d = pp.d as i64;
    let mut w = BitWriter::new();
    if !(key.s.len() == pp.width() && key.s.n() == pp.n && key.s.q() == pp.q) {
        return Err(Error::InvalidParameter("secret key shape".into()));
    }
    for e in key.s.iter() {
        let c = e.centered();
        if c[1..].iter().any(|&x| x != 0) || c[0].abs() > d {
            return Err(Error::CoefficientOutOfRange(
                "signer secret is not a constant in [-d, d]".into(),
            ));
        }
        w.write((c[0] + d) as u64, width);
    }
    Ok(w)
}

pub fn encode_signer_secret(pp: &Params, key: &SignerSecretKey) -> Result<Vec<u8>> {
    Ok(seal(pp, Kind::SignerSecret, signer_secret_body(pp, key)?))
}

pub fn decode_signer_secret(pp: &Params, bytes: &[u8]) -> Result<SignerSecretKey> {
    let (_, body) = open(pp, bytes, &[Kind::SignerSecret])?;
    let width = secret_width(pp.d);
    let d = pp.d as u64;
    let mut r = BitReader::new(body);
    let mut entries = Vec::with_capacity(pp.width());
    for _ in 0..pp.width() {
        let v = r.read(width)?;
        if v > 2 * d {
            return Err(Error::CoefficientOutOfRange(format!(
                "secret value {v} exceeds 2d = {}",
                2 * d
            )));
        }
        entries.push(RingElement::constant(pp.n, pp.q, v as i64 - d as i64));
    }
    r.finish()?;
    Ok(SignerSecretKey {
        s: RingVector::new(entries)?,
    })
}

fn verifier_public_body(key: &VerifierPublicKey) -> BitWriter {
    let mut w = BitWriter::new();
    key.b0.vector().write_bits(&mut w);
    key.b1.vector().write_bits(&mut w);
    w
}

pub fn encode_verifier_public(pp: &Params, key: &VerifierPublicKey) -> Vec<u8> {
    seal(pp, Kind::VerifierPublic, verifier_public_body(key))
}

pub fn decode_verifier_public(pp: &Params, bytes: &[u8]) -> Result<VerifierPublicKey> {
    let (_, body) = open(pp, bytes, &[Kind::VerifierPublic])?;
    let mut r = BitReader::new(body);
    let b0 = RingVector::read_bits(&mut r, pp.width(), pp.n, pp.q)?;
    let b1 = RingVector::read_bits(&mut r, pp.width(), pp.n, pp.q)?;
    r.finish()?;
    Ok(VerifierPublicKey {
        b0: TaggedPublicVector::new(b0, pp.l)?,
        b1: TaggedPublicVector::new(b1, pp.l)?,
    })
}

/// Only the two `R` matrices are stored; both tags are 1.
fn verifier_secret_body(key: &VerifierSecretKey) -> BitWriter {
    let mut w = BitWriter::new();
    key.r0.write_body(&mut w);
    key.r1.write_body(&mut w);
    w
}

pub fn encode_verifier_secret(pp: &Params, key: &VerifierSecretKey) -> Result<Vec<u8>> {
    let one = RingElement::one(pp.n, pp.q);
    if key.r0.tag() != &one || key.r1.tag() != &one {
        return Err(Error::InvalidParameter(
            "only tag-1 trapdoors have a wire encoding".into(),
        ));
    }
    Ok(seal(pp, Kind::VerifierSecret, verifier_secret_body(key)))
}

pub fn decode_verifier_secret(pp: &Params, bytes: &[u8]) -> Result<VerifierSecretKey> {
    let (_, body) = open(pp, bytes, &[Kind::VerifierSecret])?;
    let mut r = BitReader::new(body);
    let one = RingElement::one(pp.n, pp.q);
    let r0 = TrapdoorMatrix::read_body(&mut r, pp.l, pp.k, pp.n, pp.q)?;
    let r1 = TrapdoorMatrix::read_body(&mut r, pp.l, pp.k, pp.n, pp.q)?;
    r.finish()?;
    Ok(VerifierSecretKey {
        r0: TrapdoorMatrix::new(r0, one.clone())?,
        r1: TrapdoorMatrix::new(r1, one)?,
    })
}

/// How the challenge `c1` is laid out inside a signature.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChallengeLayout {
    /// A full ring element, `n ceil(log2 q)` bits.
    Dense,
    /// `kappa` pairs of `ceil(log2 n)` position bits and one sign bit,
    /// positions strictly increasing.
    Sparse,
}

fn signature_body(pp: &Params, sig: &Signature, layout: ChallengeLayout) -> BitWriter {
    let mut w = BitWriter::new();
    sig.c0.write_bits(&mut w);
    match layout {
        ChallengeLayout::Dense => sig.c1.element().write_bits(&mut w),
        ChallengeLayout::Sparse => {
            let pos_bits = ceil_log2(pp.n as u64);
            for (pos, negative) in sig.c1.positions() {
                w.write(pos as u64, pos_bits);
                w.write(negative as u64, 1);
            }
        }
    }
    sig.z.write_bits(&mut w);
    w
}

pub fn encode_signature(pp: &Params, sig: &Signature, layout: ChallengeLayout) -> Vec<u8> {
    let kind = match layout {
        ChallengeLayout::Dense => Kind::SignatureDense,
        ChallengeLayout::Sparse => Kind::SignatureSparse,
    };
    seal(pp, kind, signature_body(pp, sig, layout))
}

/// Accepts either layout; the header says which.
pub fn decode_signature(pp: &Params, bytes: &[u8]) -> Result<Signature> {
    let (kind, body) = open(pp, bytes, &[Kind::SignatureSparse, Kind::SignatureDense])?;
    let mut r = BitReader::new(body);
    let c0 = RingVector::read_bits(&mut r, pp.width(), pp.n, pp.q)?;
    let c1 = if kind == Kind::SignatureDense {
        ChallengeElement::new(RingElement::read_bits(&mut r, pp.n, pp.q)?, pp.kappa)?
    } else {
        let pos_bits = ceil_log2(pp.n as u64);
        let mut positions = Vec::with_capacity(pp.kappa);
        for _ in 0..pp.kappa {
            let pos = r.read(pos_bits)? as usize;
            let negative = r.read(1)? == 1;
            if positions.last().is_some_and(|&(prev, _)| prev >= pos) {
                return Err(Error::CoefficientOutOfRange(
                    "challenge positions not strictly increasing".into(),
                ));
            }
            positions.push((pos, negative));
        }
        ChallengeElement::from_positions(pp.n, pp.q, &positions)?
    };
    let z = RingVector::read_bits(&mut r, pp.width(), pp.n, pp.q)?;
    r.finish()?;
    Ok(Signature { c0, c1, z })
}

/// Measured body sizes next to the closed-form sizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeReport {
    pub profile: String,
    pub n: usize,
    pub header_bytes: usize,
    pub sk_s_bits: usize,
    pub formula_sk_s: usize,
    pub sk_v_bits: usize,
    pub formula_sk_v: usize,
    pub sig_dense_bits: usize,
    pub formula_sig_dense: usize,
    pub sig_sparse_bits: usize,
    pub formula_sig_sparse: usize,
    /// Every encoded file is exactly header plus the padded body.
    pub files_consistent: bool,
}

impl SizeReport {
    /// Closed forms: `(l+k) ceil(log2(2d+1))`, `2 l k n ceil(log2 q)`,
    /// `2 (l+k) n ceil(log2 q) + n ceil(log2 q)`, and the sparse variant with
    /// `kappa (ceil(log2 n) + 1)` bits for `c1`.
    pub fn formulas(pp: &Params) -> (usize, usize, usize, usize) {
        let (n, l, k, w) = (pp.n, pp.l, pp.k, pp.width());
        let logq = coeff_bits(pp.q);
        (
            w * secret_width(pp.d),
            2 * l * k * n * logq,
            2 * w * n * logq + n * logq,
            2 * w * n * logq + pp.kappa * (ceil_log2(n as u64) + 1),
        )
    }

    /// Generates keys and one signature and measures their encodings.
    pub fn measure(pp: &Params, rng: &mut RandomSource) -> Result<Self> {
        let signer = sign_keygen(&mut rng.fork("size/signer"), pp)?;
        let verifier = ver_keygen(&mut rng.fork("size/verifier"), pp)?;
        let sig = sign(
            &mut rng.fork("size/sign"),
            pp,
            &signer,
            &verifier.public,
            b"size report",
        )?;
        let sk_s = signer_secret_body(pp, &signer.secret)?;
        let sk_v = verifier_secret_body(&verifier.secret);
        let dense = signature_body(pp, &sig, ChallengeLayout::Dense);
        let sparse = signature_body(pp, &sig, ChallengeLayout::Sparse);
        let sizes = [
            (
                sk_s.bit_len(),
                encode_signer_secret(pp, &signer.secret)?.len(),
            ),
            (
                sk_v.bit_len(),
                encode_verifier_secret(pp, &verifier.secret)?.len(),
            ),
            (
                dense.bit_len(),
                encode_signature(pp, &sig, ChallengeLayout::Dense).len(),
            ),
            (
                sparse.bit_len(),
                encode_signature(pp, &sig, ChallengeLayout::Sparse).len(),
            ),
        ];
        let files_consistent = sizes
            .iter()
            .all(|&(bits, bytes)| bytes == HEADER_LEN + bits.div_ceil(8));
        let (f_sk_s, f_sk_v, f_dense, f_sparse) = Self::formulas(pp);
        Ok(Self {
            profile: pp.spec.name.clone(),
            n: pp.n,
            header_bytes: HEADER_LEN,
            sk_s_bits: sizes[0].0,
            formula_sk_s: f_sk_s,
            sk_v_bits: sizes[1].0,
            formula_sk_v: f_sk_v,
            sig_dense_bits: sizes[2].0,
            formula_sig_dense: f_dense,
            sig_sparse_bits: sizes[3].0,
            formula_sig_sparse: f_sparse,
            files_consistent,
        })
    }

    fn rows(&self) -> [(&'static str, usize, usize); 4] {
        [
            ("sk_S", self.sk_s_bits, self.formula_sk_s),
            ("sk_V", self.sk_v_bits, self.formula_sk_v),
            ("sig_dense", self.sig_dense_bits, self.formula_sig_dense),
            ("sig_sparse", self.sig_sparse_bits, self.formula_sig_sparse),
        ]
    }

    pub fn passes(&self) -> bool {
        self.files_consistent && self.rows().iter().all(|&(_, m, f)| m == f)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "size report (profile {}, n={}, header {} bytes excluded)\n",
            self.profile, self.n, self.header_bytes
        );
        let _ = writeln!(
            out,
            "{:<12} {:>12} {:>12}  result",
            "artifact", "measured", "formula"
        );
        for (name, m, f) in self.rows() {
            let verdict = if m == f { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{name:<12} {m:>12} {f:>12}  {verdict}");
        }
        let _ = writeln!(
            out,
            "files consistent with header + padded body: {}",
            if self.files_consistent { "yes" } else { "no" }
        );
        out
    }

    pub fn to_kv(&self) -> String {
        let mut out = format!(
            "size.profile={}\nsize.n={}\nsize.header_bytes={}\n",
            self.profile, self.n, self.header_bytes
        );
        for (name, m, f) in self.rows() {
            let _ = writeln!(out, "size.{name}.measured_bits={m}");
            let _ = writeln!(out, "size.{name}.formula_bits={f}");
            let _ = writeln!(
                out,
                "size.{name}.result={}",
                if m == f { "PASS" } else { "FAIL" }
            );
        }
        let _ = writeln!(out, "size.files_consistent={}", self.files_consistent);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::simulate;

    fn toy() -> Params {
        Params::standard(ProfileSpec::toy()).unwrap()
    }

    #[test]
    fn secret_widths() {
        assert_eq!(secret_width(8), 5);
        assert_eq!(secret_width(2), 3);
        assert_eq!(secret_width(1), 2);
        assert_eq!(ceil_log2(128), 7);
        assert_eq!(ceil_log2(129), 8);
    }

    #[test]
    fn formulas_match_hand_evaluation() {
        let desk = Params::standard(ProfileSpec::desk()).unwrap();
        let (sk_s, sk_v, dense, sparse) = SizeReport::formulas(&desk);
        assert_eq!(sk_s, 26 * 5);
        assert_eq!(sk_v, 2 * 2 * 24 * 128 * 24);
        assert_eq!(dense, 2 * 26 * 128 * 24 + 128 * 24);
        assert_eq!(sparse, 2 * 26 * 128 * 24 + 21 * 8);
        assert_eq!(SizeReport::formulas(&toy()).0, 36);
    }

    #[test]
    fn round_trips_and_canonical_bytes() {
        let pp = toy();
        let mut rng = RandomSource::from_seed([1; 32]);
        let bytes = encode_params(&pp);
        assert_eq!(decode_params(&bytes).unwrap(), pp);
        for i in 0..1000u32 {
            let signer = sign_keygen(&mut rng, &pp).unwrap();
            let pk = encode_signer_public(&pp, &signer.public);
            assert_eq!(decode_signer_public(&pp, &pk).unwrap(), signer.public);
            let sk = encode_signer_secret(&pp, &signer.secret).unwrap();
            assert_eq!(decode_signer_secret(&pp, &sk).unwrap(), signer.secret);
            if i % 10 != 0 {
                continue;
            }
            let verifier = ver_keygen(&mut rng, &pp).unwrap();
            let vpk = encode_verifier_public(&pp, &verifier.public);
            assert_eq!(decode_verifier_public(&pp, &vpk).unwrap(), verifier.public);
            let vsk = encode_verifier_secret(&pp, &verifier.secret).unwrap();
            assert_eq!(decode_verifier_secret(&pp, &vsk).unwrap(), verifier.secret);
            let sig = sign(&mut rng, &pp, &signer, &verifier.public, b"m").unwrap();
            let fake = simulate(
                &mut rng,
                &pp,
                &verifier.secret,
                &signer.public,
                &verifier.public,
                b"m",
            )
            .unwrap();
            for s in [&sig, &fake] {
                for layout in [ChallengeLayout::Dense, ChallengeLayout::Sparse] {
                    let bytes = encode_signature(&pp, s, layout);
                    let back = decode_signature(&pp, &bytes).unwrap();
                    assert_eq!(&back, s);
                    assert_eq!(encode_signature(&pp, &back, layout), bytes);
                }
            }
        }
    }

    #[test]
    fn truncation_and_extension_rejected() {
        let pp = toy();
        let mut rng = RandomSource::from_seed([2; 32]);
        let signer = sign_keygen(&mut rng, &pp).unwrap();
        let verifier = ver_keygen(&mut rng, &pp).unwrap();
        let sig = sign(&mut rng, &pp, &signer, &verifier.public, b"m").unwrap();
        let bytes = encode_signature(&pp, &sig, ChallengeLayout::Sparse);
        assert!(matches!(
            decode_signature(&pp, &bytes[..bytes.len() - 1]),
            Err(Error::EncodedLengthMismatch { .. })
        ));
        let mut longer = bytes.clone();
        longer.push(0);
        assert!(matches!(
            decode_signature(&pp, &longer),
            Err(Error::EncodedLengthMismatch { .. })
        ));
        assert!(matches!(
            decode_signature(&pp, &bytes[..10]),
            Err(Error::MalformedHeader(_))
        ));
        let p = encode_params(&pp);
        assert!(decode_params(&p[..p.len() - 1]).is_err());
    }

    #[test]
    fn header_errors_are_distinct() {
        let pp = toy();
        let t = SignerPublicKey {
            t: RingElement::one(pp.n, pp.q),
        };
        let good = encode_signer_public(&pp, &t);
        let mut bad_magic = good.clone();
        bad_magic[0] = b'X';
        assert!(matches!(
            decode_signer_public(&pp, &bad_magic),
            Err(Error::MalformedHeader(_))
        ));
        let mut bumped = good.clone();
        bumped[4] = VERSION + 1;
        assert_eq!(
            decode_signer_public(&pp, &bumped),
            Err(Error::UnsupportedVersion {
                found: VERSION + 1,
                expected: VERSION
            })
        );
        let other = Params::standard(ProfileSpec::desk()).unwrap();
        assert_eq!(
            decode_signer_public(&other, &good),
            Err(Error::ParamsMismatch)
        );
        assert!(matches!(
            decode_signer_secret(&pp, &good),
            Err(Error::MalformedHeader(_))
        ));
    }

    #[test]
    fn out_of_range_values_rejected() {
        let pp = toy();
        // d = 2: a 3-bit value of 7 is beyond 2d = 4.
        let mut w = BitWriter::new();
        w.write(7, 3);
        for _ in 1..pp.width() {
            w.write(0, 3);
        }
        let bytes = seal(&pp, Kind::SignerSecret, w);
        assert!(matches!(
            decode_signer_secret(&pp, &bytes),
            Err(Error::CoefficientOutOfRange(_))
        ));

        let mut rng = RandomSource::from_seed([3; 32]);
        let signer = sign_keygen(&mut rng, &pp).unwrap();
        let verifier = ver_keygen(&mut rng, &pp).unwrap();
        let sig = sign(&mut rng, &pp, &signer, &verifier.public, b"m").unwrap();
        // Dense c1 with a coefficient of 2.
        let mut forged = sig.clone();
        let mut coeffs = forged.c1.element().coeffs().to_vec();
        let idx = coeffs.iter().position(|&c| c != 0).unwrap();
        coeffs[idx] = 2;
        let mut w = BitWriter::new();
        forged.c0.write_bits(&mut w);
        RingElement::from_coeffs(pp.q, coeffs)
            .unwrap()
            .write_bits(&mut w);
        forged.z.write_bits(&mut w);
        assert!(matches!(
            decode_signature(&pp, &seal(&pp, Kind::SignatureDense, w)),
            Err(Error::CoefficientOutOfRange(_))
        ));
        // Sparse c1 with a repeated position.
        let mut w = BitWriter::new();
        sig.c0.write_bits(&mut w);
        for _ in 0..pp.kappa {
            w.write(3, 4);
            w.write(0, 1);
        }
        sig.z.write_bits(&mut w);
        assert!(matches!(
            decode_signature(&pp, &seal(&pp, Kind::SignatureSparse, w)),
            Err(Error::CoefficientOutOfRange(_))
        ));
        forged.c1 = sig.c1;
        assert!(decode_signature(
            &pp,
            &encode_signature(&pp, &forged, ChallengeLayout::Sparse)
        )
        .is_ok());
    }

    #[test]
    fn toy_size_report() {
        let report = SizeReport::measure(&toy(), &mut RandomSource::from_seed([4; 32])).unwrap();
        assert!(report.passes(), "{}", report.to_text());
        assert_eq!(report.sk_s_bits, 36);
        assert!(report.to_kv().contains("size.sk_S.measured_bits=36"));
    }

    #[test]
    fn standalone_trapdoor_encoding_matches_body() {
        let pp = toy();
        let verifier = ver_keygen(&mut RandomSource::from_seed([5; 32]), &pp).unwrap();
        let bytes = verifier.secret.r0.to_bytes();
        assert_eq!(
            TrapdoorMatrix::from_bytes(&bytes).unwrap(),
            verifier.secret.r0
        );
    }
}
