use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::{Rng, RngCore};
use rand_distr::StandardNormal;

use super::{PerturbMode, PerturbationSampler};
use crate::error::{Error, Result};
use crate::gaussian::IntegerSampler;
use crate::ring::{Embedding, Poly, RingCtx};

/// Fast sampler for `T = [M(t_0); ...; M(t_{K-1})]`.
///
/// In the evaluation basis `Sigma_p - rbar^2 I` is block diagonal with one
/// `K x K` block `(s^2 - rbar^2) I - r^2 t_j t_j^*` per frequency `j`, where
/// `t_j` collects the evaluations of the `t_k` at the `j`-th root.
#[derive(Debug, Clone)]
pub struct SpectralSampler {
    n: usize,
    k: usize,
    rbar: f64,
    emb: Embedding,
    /// `n` lower-triangular `K x K` factors, row-major.
    factors: Vec<Complex64>,
    /// The blocks that were factored, kept for reconstruction checks.
    blocks: Vec<Complex64>,
    round: IntegerSampler,
}

fn complex_cholesky(a: &[Complex64], k: usize) -> Result<Vec<Complex64>> {
    let mut l = vec![Complex64::new(0.0, 0.0); k * k];
    for j in 0..k {
        let d = a[j * k + j].re - (0..j).map(|t| l[j * k + t].norm_sqr()).sum::<f64>();
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        let d = d.sqrt();
        l[j * k + j] = Complex64::new(d, 0.0);
        for i in j + 1..k {
            let mut v = a[i * k + j];
            for t in 0..j {
                v -= l[i * k + t] * l[j * k + t].conj();
            }
            l[i * k + j] = v / d;
        }
    }
    Ok(l)
}

impl SpectralSampler {
    pub fn new(ctx: &RingCtx, blocks: &[Poly], s: f64, r: f64, rbar: f64) -> Result<Self> {
        let n = ctx.n();
        let k = blocks.len();
        if k == 0 {
            return Err(Error::InvalidParameter("no trapdoor blocks".into()));
        }
        if let Some(b) = blocks.iter().find(|b| b.len() != n) {
            return Err(Error::LengthMismatch { expected: n, got: b.len() });
        }
        let emb = Embedding::new(ctx);
        let evals: Vec<Vec<Complex64>> = blocks.iter().map(|b| emb.evaluate(b.coeffs())).collect();
        let diag = s * s - rbar * rbar;
        let mut all_blocks = Vec::with_capacity(n * k * k);
        let mut factors = Vec::with_capacity(n * k * k);
        for j in 0..n {
            let mut sj = vec![Complex64::new(0.0, 0.0); k * k];
            for a in 0..k {
                for b in 0..k {
                    let mut v = -(evals[a][j] * evals[b][j].conj()) * (r * r);
                    if a == b {
                        v += diag;
                    }
                    sj[a * k + b] = v;
                }
            }
            factors.extend(complex_cholesky(&sj, k)?);
            all_blocks.extend(sj);
        }
        Ok(Self { n, k, rbar, emb, factors, blocks: all_blocks, round: IntegerSampler::new(rbar)? })
    }

    /// Largest relative error of `L_j L_j^*` against the factored block, over all frequencies.
    pub fn reconstruction_error(&self) -> f64 {
        let k = self.k;
        let mut worst: f64 = 0.0;
        for j in 0..self.n {
            let l = &self.factors[j * k * k..(j + 1) * k * k];
            let a = &self.blocks[j * k * k..(j + 1) * k * k];
            let (mut num, mut den) = (0.0, 0.0);
            for x in 0..k {
                for y in 0..k {
                    let v: Complex64 = (0..k).map(|t| l[x * k + t] * l[y * k + t].conj()).sum();
                    num += (v - a[x * k + y]).norm_sqr();
                    den += a[x * k + y].norm_sqr();
                }
            }
            worst = worst.max((num / den).sqrt());
        }
        worst
    }
}

impl PerturbationSampler for SpectralSampler {
    fn mode(&self) -> PerturbMode {
        PerturbMode::Spectral
    }

    fn dim(&self) -> usize {
        self.n * self.k
    }

    fn rbar(&self) -> f64 {
        self.rbar
    }

    fn rounding(&self) -> &IntegerSampler {
        &self.round
    }

    fn sample_center(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let (n, k) = (self.n, self.k);
        let mut ys = vec![vec![Complex64::new(0.0, 0.0); n]; k];
        let mut w = vec![Complex64::new(0.0, 0.0); k];
        for j in 0..n {
            for wi in w.iter_mut() {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                *wi = Complex64::new(re, im) * FRAC_1_SQRT_2;
            }
            let l = &self.factors[j * k * k..(j + 1) * k * k];
            for a in 0..k {
                ys[a][j] = (0..=a).map(|b| l[a * k + b] * w[b]).sum();
            }
        }
        // x = sqrt(n) * interpolate(y) has covariance Sigma; sqrt(2) Re(x) keeps it real
        let scale = (n as f64 / PI).sqrt();
        let mut out = Vec::with_capacity(n * k);
        for mut y in ys {
            self.emb.interpolate_in_place(&mut y);
            out.extend(y.iter().map(|v| v.re * scale));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perturb::{build_context, TrapdoorShape};
    use crate::ring::RingKind;
    use crate::xof::ShakeRng;
    use rand::SeedableRng;

    fn toy(kind: RingKind, n: usize) -> (RingCtx, Vec<Poly>) {
        let ctx = RingCtx::new(n, kind, 1 << 12).unwrap();
        let g = Poly::new((0..n).map(|i| [1, 0, -1, 0, 1][i % 5]).collect());
        let f = Poly::new((0..n).map(|i| [0, -1, 1, 1][i % 4]).collect());
        (ctx, vec![g, f])
    }

    #[test]
    fn factors_reconstruct() {
        for kind in [RingKind::Convolution, RingKind::Cyclotomic] {
            let n = if kind == RingKind::Convolution { 17 } else { 16 };
            let (ctx, blocks) = toy(kind, n);
            let sp = SpectralSampler::new(&ctx, &blocks, 200.0, 10.0, 1.5).unwrap();
            assert!(sp.reconstruction_error() < 1e-12);
        }
    }

    #[test]
    fn positivity_agrees_with_dense() {
        let (ctx, blocks) = toy(RingKind::Convolution, 17);
        let shape = TrapdoorShape::Ring { ctx, blocks: blocks.clone() };
        for s in [20.0, 40.0, 60.0, 80.0, 120.0] {
            let d = build_context(&shape, s, 10.0, 1.5, PerturbMode::Dense).is_ok();
            let sp = build_context(&shape, s, 10.0, 1.5, PerturbMode::Spectral).is_ok();
            assert_eq!(d, sp, "s = {s}");
        }
        assert!(build_context(&shape, 20.0, 10.0, 1.5, PerturbMode::Spectral).is_err());
    }

    #[test]
    fn center_covariance_matches_target() {
        // compare empirical covariance of continuous centers with (Sigma_p - rbar^2 I)/(2 pi)
        let (ctx, blocks) = toy(RingKind::Cyclotomic, 8);
        let shape = TrapdoorShape::Ring { ctx, blocks: blocks.clone() };
        let (s, r, rbar) = (80.0, 10.0, 1.5);
        let sp = SpectralSampler::new(&ctx, &blocks, s, r, rbar).unwrap();
        let m = 16;
        let mut target = shape.sigma_p(s, r);
        for i in 0..m {
            target[i * m + i] -= rbar * rbar;
        }
        let mut rng = ShakeRng::from_seed([21; 32]);
        let trials = 100_000;
        let mut acc = vec![0.0; m * m];
        for _ in 0..trials {
            let c = sp.sample_center(&mut rng);
            for i in 0..m {
                for j in 0..m {
                    acc[i * m + j] += c[i] * c[j];
                }
            }
        }
        for i in 0..m {
            for j in 0..m {
                let emp = acc[i * m + j] / trials as f64;
                let exact = target[i * m + j] / (2.0 * PI);
                let se = ((target[i * m + i] * target[j * m + j] + target[i * m + j].powi(2)) / (2.0 * PI).powi(2)
                    / trials as f64)
                    .sqrt();
                assert!((emp - exact).abs() < 5.0 * se, "({i},{j}): {emp} vs {exact}");
            }
        }
    }
}
