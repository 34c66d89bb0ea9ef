//! Lattice-based strong designated-verifier signatures over R_q = Z_q[x]/(x^n + 1).

pub mod battery;
pub mod bits;
pub mod challenge;
pub mod codec;
pub mod error;
pub mod gadget;
pub mod params;
pub mod ring;
pub mod sampler;
pub mod scheme;
pub mod stats;

pub use error::{Error, Result};
pub use params::{Params, ProfileSpec};
pub use scheme::{
    open_commitment, sign, sign_detailed, sign_keygen, simulate, ver_keygen, verify,
    verify_detailed, Rejection, SignStats, Signature, SignerKeyPair, SignerPublicKey,
    SignerSecretKey, Simulator, VerifierKeyPair, VerifierPublicKey, VerifierSecretKey,
};
