//! Hash-and-sign schemes over the compact gadget.
//!
//! Both schemes share the same signing core: a public matrix
//! `A = [I | M(c_1) | ... ]` over `R_Q`, a trapdoor `T` of ring blocks with
//! `A T = p I`, and the acceptance test `||(z0 + e, gamma z_1, ...)|| <= beta`.
//! [`Robin`] (NTRU, `x^n - 1`) and [`Eagle`] (Ring-LWE, `x^n + 1`) only
//! differ in key generation and key encoding, and are selected by name
//! through [`instantiate`] / [`by_name`].

mod core;
mod eagle;
mod robin;

use std::fmt;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::gadget::Presample;
use crate::params::{ParamSet, Registry, SchemeKind};
use crate::perturb::PerturbMode;

pub use self::core::{search_trapdoor, PublicCore, SignerCore, TrapdoorCandidate};
pub use eagle::{Eagle, EaglePublicKey, EagleSecretKey};
pub use robin::{Robin, RobinPublicKey, RobinSecretKey};

/// Consecutive rejected attempts after which signing gives up.
pub const SIGN_ATTEMPT_GUARD: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub salt: Vec<u8>,
    /// `z_1` (and `z_2` for Eagle).
    pub z: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
}

impl Verdict {
    pub fn is_accept(self) -> bool {
        self == Verdict::Accept
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accept => "accept",
            Verdict::Reject => "reject",
        })
    }
}

/// One presampling round of the signer, accepted or not.
#[derive(Debug, Clone)]
pub struct SignAttempt {
    pub salt: Vec<u8>,
    pub target: Vec<i64>,
    pub presample: Presample,
    /// `z0 + e`, centered mod `Q`.
    pub z_prime: Vec<i64>,
    pub norm_sq: f64,
    pub accepted: bool,
}

impl SignAttempt {
    pub fn signature(&self, n: usize) -> Signature {
        Signature { salt: self.salt.clone(), z: self.presample.x[n..].chunks(n).map(<[i64]>::to_vec).collect() }
    }
}

#[derive(Debug, Clone)]
pub struct SignOutput {
    pub signature: Signature,
    pub restarts: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeygenReport {
    /// Full candidate redraws before a pair qualified.
    pub restarts: usize,
    pub quality: f64,
    pub galois_index: usize,
    pub pair: (usize, usize),
}

pub trait PublicKey: Send + Sync + fmt::Debug {
    fn params(&self) -> &ParamSet;
    fn verify(&self, msg: &[u8], sig: &Signature) -> Verdict;
    /// `u - A_1 z` centered, or `None` when the signature is structurally invalid.
    fn residual(&self, msg: &[u8], sig: &Signature) -> Option<Vec<i64>>;
    /// Encoded payload, without file header.
    fn to_bytes(&self) -> Vec<u8>;
}

pub trait SecretKey: Send + Sync + fmt::Debug {
    fn params(&self) -> &ParamSet;
    fn public_key(&self) -> &dyn PublicKey;
    fn quality(&self) -> f64;
    fn attempt(&self, msg: &[u8], rng: &mut dyn RngCore) -> Result<SignAttempt>;
    /// Encoded payload, without file header.
    fn to_bytes(&self) -> Vec<u8>;

    fn sign(&self, msg: &[u8], rng: &mut dyn RngCore) -> Result<SignOutput> {
        let n = self.params().n;
        for restarts in 0..SIGN_ATTEMPT_GUARD {
            let a = self.attempt(msg, rng)?;
            if a.accepted {
                return Ok(SignOutput { signature: a.signature(n), restarts });
            }
        }
        Err(Error::SigningExhausted { attempts: SIGN_ATTEMPT_GUARD })
    }
}

pub trait Scheme: Send + Sync {
    fn kind(&self) -> SchemeKind;
    fn params(&self) -> &ParamSet;
    fn keygen(&self, rng: &mut dyn RngCore) -> Result<(Box<dyn SecretKey>, KeygenReport)>;
    fn public_key_from_bytes(&self, payload: &[u8]) -> Result<Box<dyn PublicKey>>;
    fn secret_key_from_bytes(&self, payload: &[u8]) -> Result<Box<dyn SecretKey>>;

    fn encode_signature(&self, sig: &Signature) -> Result<Vec<u8>> {
        crate::codec::encode_signature(self.params(), &sig.salt, &sig.z)
    }

    fn decode_signature(&self, payload: &[u8]) -> Result<Signature> {
        let (salt, z) = crate::codec::decode_signature(self.params(), payload)?;
        Ok(Signature { salt, z })
    }
}

type Constructor = fn(ParamSet, PerturbMode) -> Result<Box<dyn Scheme>>;

const CONSTRUCTORS: &[(SchemeKind, Constructor)] = &[
    (SchemeKind::Robin, |p, m| Ok(Box::new(Robin::new(p, m)?))),
    (SchemeKind::Eagle, |p, m| Ok(Box::new(Eagle::new(p, m)?))),
];

/// Build the scheme implementation registered for `params.scheme`.
pub fn instantiate(params: &ParamSet, mode: PerturbMode) -> Result<Box<dyn Scheme>> {
    let (_, ctor) = CONSTRUCTORS
        .iter()
        .find(|(k, _)| *k == params.scheme)
        .ok_or_else(|| Error::InvalidParameter(format!("no implementation for {}", params.scheme)))?;
    ctor(params.clone(), mode)
}

/// Look up a parameter set by name and build its scheme.
pub fn by_name(registry: &Registry, name: &str, mode: PerturbMode) -> Result<Box<dyn Scheme>> {
    instantiate(registry.get(name)?, mode)
}
