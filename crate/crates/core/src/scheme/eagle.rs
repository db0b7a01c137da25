//! Ring-LWE instantiation over `Z[x]/(x^n + 1)`.
//!
//! Public key `(seed_a, b)` with `a = expand(seed_a)` and
//! `b = p - (a f + g) mod Q`, so `A = [I | M(a) | M(b)]` and
//! `T = [M(g); M(f); I]`. Signatures carry `(salt, z_1, z_2)`.

use rand::RngCore;

use super::core::{search_trapdoor, PublicCore, SignerCore};
use super::{KeygenReport, PublicKey, Scheme, SecretKey, SignAttempt, Signature, Verdict};
use crate::codec;
use crate::error::{Error, Result};
use crate::params::{ParamSet, SchemeKind};
use crate::perturb::PerturbMode;
use crate::ring::{center, quality, ring_mul, Poly};
use crate::xof::expand_seed;

#[derive(Debug, Clone)]
pub struct Eagle {
    params: ParamSet,
    mode: PerturbMode,
}

impl Eagle {
    pub fn new(params: ParamSet, mode: PerturbMode) -> Result<Self> {
        if params.scheme != SchemeKind::Eagle {
            return Err(Error::InvalidParameter(format!("{} is not an Eagle parameter set", params.name)));
        }
        params.validate()?;
        Ok(Self { params, mode })
    }

    pub fn keygen_typed(&self, rng: &mut dyn RngCore) -> Result<(EagleSecretKey, KeygenReport)> {
        let mut seed = [0u8; 32];
        rng.fill_bytes(&mut seed);
        let (sk, cand) = search_trapdoor(&self.params, rng, |c| {
            EagleSecretKey::from_parts(&self.params, seed, c.f.clone(), c.g.clone(), self.mode)
        })?;
        Ok((sk, cand.report))
    }
}

#[derive(Debug, Clone)]
pub struct EaglePublicKey {
    seed: [u8; 32],
    core: PublicCore,
}

impl EaglePublicKey {
    pub fn new(params: &ParamSet, seed: [u8; 32], b: Poly) -> Result<Self> {
        let a = Poly::new(expand_seed(&seed, params.n, params.modulus));
        Ok(Self { seed, core: PublicCore::new(params.clone(), vec![a, b])? })
    }

    pub fn seed(&self) -> &[u8; 32] {
        &self.seed
    }

    pub fn a(&self) -> &Poly {
        &self.core.cols()[0]
    }

    pub fn b(&self) -> &Poly {
        &self.core.cols()[1]
    }
}

impl PublicKey for EaglePublicKey {
    fn params(&self) -> &ParamSet {
        self.core.params()
    }

    fn verify(&self, msg: &[u8], sig: &Signature) -> Verdict {
        self.core.verify(msg, sig)
    }

    fn residual(&self, msg: &[u8], sig: &Signature) -> Option<Vec<i64>> {
        self.core.residual(msg, sig)
    }

    fn to_bytes(&self) -> Vec<u8> {
        codec::encode_public_key(self.params(), Some(&self.seed), self.b().coeffs()).expect("public key has ring length")
    }
}

#[derive(Debug)]
pub struct EagleSecretKey {
    f: Poly,
    g: Poly,
    quality: f64,
    public: EaglePublicKey,
    signer: SignerCore,
}

impl EagleSecretKey {
    pub fn from_parts(params: &ParamSet, seed: [u8; 32], f: Poly, g: Poly, mode: PerturbMode) -> Result<Self> {
        let ctx = params.ring()?;
        let a = Poly::new(expand_seed(&seed, params.n, params.modulus));
        let af = ring_mul(&a, &f, &ctx)?;
        let b = Poly::new(
            af.coeffs()
                .iter()
                .zip(g.coeffs())
                .enumerate()
                .map(|(i, (x, y))| center(if i == 0 { params.p } else { 0 } - x - y, params.modulus))
                .collect(),
        );
        let public = EaglePublicKey::new(params, seed, b)?;
        let one = Poly::constant(params.n, 1);
        let signer = SignerCore::new(
            PublicCore::new(params.clone(), vec![public.a().clone(), public.b().clone()])?,
            vec![g.clone(), f.clone(), one],
            mode,
        )?;
        let quality = quality(&f, &g, 1, &ctx)?;
        Ok(Self { f, g, quality, public, signer })
    }

    pub fn f(&self) -> &Poly {
        &self.f
    }

    pub fn g(&self) -> &Poly {
        &self.g
    }

    pub fn signer(&self) -> &SignerCore {
        &self.signer
    }

    pub fn public(&self) -> &EaglePublicKey {
        &self.public
    }
}

impl SecretKey for EagleSecretKey {
    fn params(&self) -> &ParamSet {
        self.public.params()
    }

    fn public_key(&self) -> &dyn PublicKey {
        &self.public
    }

    fn quality(&self) -> f64 {
        self.quality
    }

    fn attempt(&self, msg: &[u8], rng: &mut dyn RngCore) -> Result<SignAttempt> {
        self.signer.attempt(msg, rng)
    }

    fn to_bytes(&self) -> Vec<u8> {
        codec::encode_secret_key(self.params(), Some(&self.public.seed), self.f.coeffs(), self.g.coeffs())
            .expect("ternary key")
    }
}

impl Scheme for Eagle {
    fn kind(&self) -> SchemeKind {
        SchemeKind::Eagle
    }

    fn params(&self) -> &ParamSet {
        &self.params
    }

    fn keygen(&self, rng: &mut dyn RngCore) -> Result<(Box<dyn SecretKey>, KeygenReport)> {
        let (sk, report) = self.keygen_typed(rng)?;
        Ok((Box::new(sk), report))
    }

    fn public_key_from_bytes(&self, payload: &[u8]) -> Result<Box<dyn PublicKey>> {
        let (seed, b) = codec::decode_public_key(&self.params, payload)?;
        let seed = seed.ok_or_else(|| Error::MalformedEncoding("missing seed".into()))?;
        Ok(Box::new(EaglePublicKey::new(&self.params, seed, Poly::new(b))?))
    }

    fn secret_key_from_bytes(&self, payload: &[u8]) -> Result<Box<dyn SecretKey>> {
        let (seed, f, g) = codec::decode_secret_key(&self.params, payload)?;
        let seed = seed.ok_or_else(|| Error::MalformedEncoding("missing seed".into()))?;
        let sk = EagleSecretKey::from_parts(&self.params, seed, Poly::new(f), Poly::new(g), self.mode)
            .map_err(|e| Error::MalformedEncoding(format!("secret key: {e}")))?;
        Ok(Box::new(sk))
    }
}
