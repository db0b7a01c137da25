use rand::RngCore;

use super::{KeygenReport, SignAttempt, Signature, Verdict};
use crate::error::{Error, Result};
use crate::gadget::{presamp, GadgetSampler, TrapdoorMap};
use crate::gaussian::{sample_ternary, TernaryShape};
use crate::params::ParamSet;
use crate::perturb::{build_context, PerturbMode, PerturbationSampler, TrapdoorShape};
use crate::ring::{best_galois, center, galois, mul_exact, spectrum, Poly, RingCtx};
use crate::xof::hash_to_point;

/// Verification side: `A = [I | M(c_1) | ... | M(c_k)]` over `R_Q`.
#[derive(Debug, Clone)]
pub struct PublicCore {
    params: ParamSet,
    ctx: RingCtx,
    cols: Vec<Poly>,
}

impl PublicCore {
    pub fn new(params: ParamSet, cols: Vec<Poly>) -> Result<Self> {
        let ctx = params.ring()?;
        if cols.len() != params.scheme.signature_blocks() {
            return Err(Error::LengthMismatch { expected: params.scheme.signature_blocks(), got: cols.len() });
        }
        let q = params.modulus;
        let cols = cols
            .into_iter()
            .map(|c| {
                if c.len() != params.n {
                    return Err(Error::LengthMismatch { expected: params.n, got: c.len() });
                }
                Ok(c.centered(q))
            })
            .collect::<Result<_>>()?;
        Ok(Self { params, ctx, cols })
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    pub fn ring(&self) -> &RingCtx {
        &self.ctx
    }

    pub fn cols(&self) -> &[Poly] {
        &self.cols
    }

    /// `x_0 + sum_i c_i x_i` centered mod `Q`, for `x` of length `(k+1) n`.
    pub fn apply_a(&self, x: &[i64]) -> Vec<i64> {
        let n = self.params.n;
        let mut acc = x[..n].to_vec();
        for (c, xi) in self.cols.iter().zip(x[n..].chunks(n)) {
            for (a, v) in acc.iter_mut().zip(mul_exact(c.coeffs(), xi, self.ctx.kind())) {
                *a += v;
            }
        }
        acc.into_iter().map(|v| center(v, self.params.modulus)).collect()
    }

    fn structurally_valid(&self, sig: &Signature) -> bool {
        let bound = self.params.coeff_bound();
        sig.salt.len() == self.params.salt_bytes
            && sig.z.len() == self.cols.len()
            && sig.z.iter().all(|z| z.len() == self.params.n && z.iter().all(|c| c.abs() <= bound))
    }

    /// `u - sum_i c_i z_i` centered mod `Q`.
    pub fn residual(&self, msg: &[u8], sig: &Signature) -> Option<Vec<i64>> {
        if !self.structurally_valid(sig) {
            return None;
        }
        let n = self.params.n;
        let u = hash_to_point(msg, &sig.salt, n, self.params.modulus);
        let mut x = vec![0i64; n];
        x.extend(sig.z.iter().flatten());
        let az = self.apply_a(&x);
        Some(u.iter().zip(az).map(|(a, b)| center(a - b, self.params.modulus)).collect())
    }

    pub fn twisted_norm_sq(&self, z_prime: &[i64], z: &[i64]) -> f64 {
        let g = self.params.gamma();
        let a: i64 = z_prime.iter().map(|v| v * v).sum();
        let b: i64 = z.iter().map(|v| v * v).sum();
        a as f64 + g * g * b as f64
    }

    pub fn verify(&self, msg: &[u8], sig: &Signature) -> Verdict {
        match self.residual(msg, sig) {
            Some(zp) => {
                let z: Vec<i64> = sig.z.iter().flatten().copied().collect();
                if self.twisted_norm_sq(&zp, &z) <= self.params.beta_sq() {
                    Verdict::Accept
                } else {
                    Verdict::Reject
                }
            }
            None => Verdict::Reject,
        }
    }
}

/// Signing side: public data, trapdoor blocks and the prepared samplers.
#[derive(Debug)]
pub struct SignerCore {
    public: PublicCore,
    blocks: Vec<Poly>,
    gadget: GadgetSampler,
    perturb: Box<dyn PerturbationSampler>,
}

impl SignerCore {
    /// `blocks` are the ring blocks of `T`, top to bottom; checks `A T == p`.
    pub fn new(public: PublicCore, blocks: Vec<Poly>, mode: PerturbMode) -> Result<Self> {
        let params = public.params().clone();
        let n = params.n;
        if blocks.len() != params.scheme.preimage_blocks() {
            return Err(Error::LengthMismatch { expected: params.scheme.preimage_blocks(), got: blocks.len() });
        }
        let mut stacked = Vec::with_capacity(blocks.len() * n);
        for b in &blocks {
            stacked.extend_from_slice(b.coeffs());
        }
        let at = public.apply_a(&stacked);
        if at[0] != center(params.p, params.modulus) || at[1..].iter().any(|&c| c != 0) {
            return Err(Error::InvalidParameter("trapdoor does not satisfy A T = p".into()));
        }
        let shape = TrapdoorShape::Ring { ctx: *public.ring(), blocks: blocks.clone() };
        let perturb = build_context(&shape, params.s_width(), params.r_width(), params.rbar_width(), mode)?;
        let gadget = GadgetSampler::new(params.gadget()?)?;
        Ok(Self { public, blocks, gadget, perturb })
    }

    pub fn public(&self) -> &PublicCore {
        &self.public
    }

    pub fn blocks(&self) -> &[Poly] {
        &self.blocks
    }

    pub fn perturbation(&self) -> &dyn PerturbationSampler {
        self.perturb.as_ref()
    }

    pub fn attempt(&self, msg: &[u8], rng: &mut dyn RngCore) -> Result<SignAttempt> {
        let params = self.public.params();
        let n = params.n;
        let mut salt = vec![0u8; params.salt_bytes];
        rng.fill_bytes(&mut salt);
        let target = hash_to_point(msg, &salt, n, params.modulus);
        let presample = presamp(self, &self.gadget, &target, self.perturb.as_ref(), rng)?;
        let z_prime: Vec<i64> =
            presample.x[..n].iter().zip(&presample.e).map(|(z, e)| center(z + e, params.modulus)).collect();
        let norm_sq = self.public.twisted_norm_sq(&z_prime, &presample.x[n..]);
        let bound = params.coeff_bound();
        let accepted = norm_sq <= params.beta_sq() && presample.x[n..].iter().all(|c| c.abs() <= bound);
        Ok(SignAttempt { salt, target, presample, z_prime, norm_sq, accepted })
    }
}

impl TrapdoorMap for SignerCore {
    fn n(&self) -> usize {
        self.public.params().n
    }

    fn m(&self) -> usize {
        self.blocks.len() * self.n()
    }

    fn modulus(&self) -> i64 {
        self.public.params().modulus
    }

    fn apply_a(&self, x: &[i64]) -> Vec<i64> {
        self.public.apply_a(x)
    }

    fn apply_t(&self, v: &[i64]) -> Vec<i64> {
        let kind = self.public.ring().kind();
        self.blocks.iter().flat_map(|b| mul_exact(b.coeffs(), v, kind)).collect()
    }
}

/// A trapdoor pair that passed the quality search.
#[derive(Debug, Clone)]
pub struct TrapdoorCandidate {
    pub f: Poly,
    /// Already twisted by the chosen Galois index.
    pub g: Poly,
    pub report: KeygenReport,
}

/// Draw `K` ternary candidates for `f` and for `g`, scan pairs `(i, j)` in
/// order, twist `g_j` by the Galois index minimizing the quality, and hand
/// the first pair below the threshold to `finish`. A `NotInvertible` from
/// `finish` skips the pair; exhausting the candidates redraws all of them.
pub fn search_trapdoor<T>(
    params: &ParamSet,
    rng: &mut dyn RngCore,
    mut finish: impl FnMut(&TrapdoorCandidate) -> Result<T>,
) -> Result<(T, TrapdoorCandidate)> {
    let ctx = params.ring()?;
    let shape = TernaryShape::new(params.n, params.a, params.b)?;
    let threshold = params.quality_threshold();
    for restarts in 0..params.restart_guard {
        let fs = (0..params.candidates)
            .map(|_| sample_ternary(&shape, rng).map(Poly::new))
            .collect::<Result<Vec<_>>>()?;
        let gs = (0..params.candidates)
            .map(|_| sample_ternary(&shape, rng).map(Poly::new))
            .collect::<Result<Vec<_>>>()?;
        let f_spec = fs.iter().map(|f| spectrum(f, &ctx)).collect::<Result<Vec<_>>>()?;
        let g_spec = gs.iter().map(|g| spectrum(g, &ctx)).collect::<Result<Vec<_>>>()?;
        for i in 0..fs.len() {
            for j in 0..gs.len() {
                let (k, quality) = best_galois(&f_spec[i], &g_spec[j], &ctx);
                if quality > threshold {
                    continue;
                }
                let cand = TrapdoorCandidate {
                    f: fs[i].clone(),
                    g: galois(&gs[j], k as i64, &ctx)?,
                    report: KeygenReport { restarts, quality, galois_index: k, pair: (i, j) },
                };
                match finish(&cand) {
                    Ok(t) => return Ok((t, cand)),
                    Err(Error::NotInvertible) => continue,
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Err(Error::KeygenExhausted { restarts: params.restart_guard })
}
