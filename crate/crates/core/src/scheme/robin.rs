//! NTRU-based instantiation over `Z[x]/(x^n - 1)`.
//!
//! Keys: ternary `f, g` with `h = (p - g) / f mod Q`, so `A = [I | M(h)]`
//! and `T = [M(g); M(f)]`. Signatures carry `(salt, z_1)`.

use rand::RngCore;

use super::core::{search_trapdoor, PublicCore, SignerCore};
use super::{KeygenReport, PublicKey, Scheme, SecretKey, SignAttempt, Signature, Verdict};
use crate::codec;
use crate::error::{Error, Result};
use crate::params::{ParamSet, SchemeKind};
use crate::perturb::PerturbMode;
use crate::ring::{invert_mod_2k, quality, ring_mul, Poly};

#[derive(Debug, Clone)]
pub struct Robin {
    params: ParamSet,
    mode: PerturbMode,
}

impl Robin {
    pub fn new(params: ParamSet, mode: PerturbMode) -> Result<Self> {
        if params.scheme != SchemeKind::Robin {
            return Err(Error::InvalidParameter(format!("{} is not a Robin parameter set", params.name)));
        }
        params.validate()?;
        Ok(Self { params, mode })
    }

    pub fn keygen_typed(&self, rng: &mut dyn RngCore) -> Result<(RobinSecretKey, KeygenReport)> {
        let (sk, cand) =
            search_trapdoor(&self.params, rng, |c| RobinSecretKey::from_parts(&self.params, c.f.clone(), c.g.clone(), self.mode))?;
        Ok((sk, cand.report))
    }
}

#[derive(Debug, Clone)]
pub struct RobinPublicKey {
    core: PublicCore,
}

impl RobinPublicKey {
    pub fn new(params: &ParamSet, h: Poly) -> Result<Self> {
        Ok(Self { core: PublicCore::new(params.clone(), vec![h])? })
    }

    pub fn h(&self) -> &Poly {
        &self.core.cols()[0]
    }
}

impl PublicKey for RobinPublicKey {
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
        codec::encode_public_key(self.params(), None, self.h().coeffs()).expect("public key has ring length")
    }
}

#[derive(Debug)]
pub struct RobinSecretKey {
    f: Poly,
    g: Poly,
    quality: f64,
    public: RobinPublicKey,
    signer: SignerCore,
}

impl RobinSecretKey {
    /// Derive `h` and the signer state from `(f, g)`.
    pub fn from_parts(params: &ParamSet, f: Poly, g: Poly, mode: PerturbMode) -> Result<Self> {
        let ctx = params.ring()?;
        let f_inv = invert_mod_2k(&f, &ctx)?;
        let p_minus_g = Poly::new(g.coeffs().iter().enumerate().map(|(i, &c)| if i == 0 { params.p - c } else { -c }).collect());
        let h = ring_mul(&p_minus_g, &f_inv, &ctx)?;
        let public = RobinPublicKey::new(params, h)?;
        let signer = SignerCore::new(PublicCore::new(params.clone(), vec![public.h().clone()])?, vec![g.clone(), f.clone()], mode)?;
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
}

impl SecretKey for RobinSecretKey {
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
        codec::encode_secret_key(self.params(), None, self.f.coeffs(), self.g.coeffs()).expect("ternary key")
    }
}

impl Scheme for Robin {
    fn kind(&self) -> SchemeKind {
        SchemeKind::Robin
    }

    fn params(&self) -> &ParamSet {
        &self.params
    }

    fn keygen(&self, rng: &mut dyn RngCore) -> Result<(Box<dyn SecretKey>, KeygenReport)> {
        let (sk, report) = self.keygen_typed(rng)?;
        Ok((Box::new(sk), report))
    }

    fn public_key_from_bytes(&self, payload: &[u8]) -> Result<Box<dyn PublicKey>> {
        let (_, h) = codec::decode_public_key(&self.params, payload)?;
        Ok(Box::new(RobinPublicKey::new(&self.params, Poly::new(h))?))
    }

    fn secret_key_from_bytes(&self, payload: &[u8]) -> Result<Box<dyn SecretKey>> {
        let (_, f, g) = codec::decode_secret_key(&self.params, payload)?;
        let sk = RobinSecretKey::from_parts(&self.params, Poly::new(f), Poly::new(g), self.mode)
            .map_err(|e| Error::MalformedEncoding(format!("secret key: {e}")))?;
        Ok(Box::new(sk))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Registry;
    use crate::ring::{ring_add, RingCtx};
    use crate::xof::ShakeRng;
    use rand::SeedableRng;

    fn setup() -> (Robin, RobinSecretKey, KeygenReport) {
        let params = Registry::builtin().get("robin-701").unwrap().clone();
        let robin = Robin::new(params, PerturbMode::Spectral).unwrap();
        let (sk, rep) = robin.keygen_typed(&mut ShakeRng::from_seed([1; 32])).unwrap();
        (robin, sk, rep)
    }

    #[test]
    fn key_identity_and_quality() {
        let (robin, sk, rep) = setup();
        let ctx: RingCtx = robin.params().ring().unwrap();
        let hf = ring_mul(sk.public.h(), sk.f(), &ctx).unwrap();
        let lhs = ring_add(&hf, sk.g(), &ctx).unwrap();
        assert_eq!(lhs, Poly::constant(701, 2048).centered(16384));
        assert!(rep.quality <= robin.params().quality_threshold());
        assert!((sk.quality() - rep.quality).abs() < 1e-9);
    }

    #[test]
    fn sign_verify_and_tamper() {
        let (robin, sk, _) = setup();
        let mut rng = ShakeRng::from_seed([2; 32]);
        let pk = sk.public_key();
        for i in 0..20u32 {
            let msg = i.to_be_bytes();
            let out = sk.sign(&msg, &mut rng).unwrap();
            assert_eq!(pk.verify(&msg, &out.signature), Verdict::Accept);
            let mut other = msg;
            other[0] ^= 1;
            assert_eq!(pk.verify(&other, &out.signature), Verdict::Reject);
            let doubled = Signature { salt: out.signature.salt.clone(), z: vec![out.signature.z[0].iter().map(|c| 2 * c).collect()] };
            assert_eq!(pk.verify(&msg, &doubled), Verdict::Reject);
            let bytes = robin.encode_signature(&out.signature).unwrap();
            assert_eq!(robin.decode_signature(&bytes).unwrap(), out.signature);
        }
    }

    #[test]
    fn residual_equals_z0_plus_e() {
        let (_, sk, _) = setup();
        let mut rng = ShakeRng::from_seed([3; 32]);
        for _ in 0..10 {
            let a = sk.attempt(b"m", &mut rng).unwrap();
            let sig = a.signature(701);
            assert_eq!(sk.public_key().residual(b"m", &sig).unwrap(), a.z_prime);
        }
    }

    #[test]
    fn key_bytes_round_trip() {
        let (robin, sk, _) = setup();
        let sk2 = robin.secret_key_from_bytes(&sk.to_bytes()).unwrap();
        assert_eq!(sk2.public_key().to_bytes(), sk.public_key().to_bytes());
        let pk2 = robin.public_key_from_bytes(&sk.public_key().to_bytes()).unwrap();
        assert_eq!(pk2.to_bytes().len(), 1227);
        let sig = sk2.sign(b"hello", &mut ShakeRng::from_seed([4; 32])).unwrap().signature;
        assert!(pk2.verify(b"hello", &sig).is_accept());
    }

    #[test]
    fn rejects_malformed_signatures() {
        let (_, sk, _) = setup();
        let pk = sk.public_key();
        let zero = Signature { salt: vec![0; 40], z: vec![vec![0; 701]] };
        assert_eq!(pk.verify(b"x", &zero), Verdict::Reject);
        let short = Signature { salt: vec![0; 39], z: vec![vec![0; 701]] };
        assert!(pk.residual(b"x", &short).is_none());
        let huge = Signature { salt: vec![0; 40], z: vec![vec![5000; 701]] };
        assert!(pk.residual(b"x", &huge).is_none());
    }
}
