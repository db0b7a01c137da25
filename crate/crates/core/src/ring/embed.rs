//! Complex embeddings of ring elements.
//!
//! Evaluation points are indexed as follows:
//! - convolution ring: `omega_j = exp(2*pi*i*j/n)`, `j = 0..n`;
//! - cyclotomic ring: `omega_j = exp(i*pi*(2j+1)/n)`, `j = 0..n`.
//!
//! In both cases `M(a)` is unitarily similar to `diag(a(omega_j))`, which is
//! what the spectral perturbation sampler and the key-quality search rely on.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::{galois_units, normalize_unit, Poly, RingCtx, RingKind};
use crate::error::{Error, Result};

/// Forward (evaluation) and inverse (interpolation) transforms for one ring.
#[derive(Clone)]
pub struct Embedding {
    n: usize,
    kind: RingKind,
    eval: Arc<dyn Fft<f64>>,
    interp: Arc<dyn Fft<f64>>,
    twist: Vec<Complex64>,
}

impl std::fmt::Debug for Embedding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Embedding").field("n", &self.n).field("kind", &self.kind).finish()
    }
}

impl Embedding {
    pub fn new(ctx: &RingCtx) -> Self {
        let n = ctx.n();
        let mut planner = FftPlanner::new();
        // rustfft's "inverse" direction uses exp(+2*pi*i*jk/n), i.e. evaluation at omega_j.
        let eval = planner.plan_fft(n, FftDirection::Inverse);
        let interp = planner.plan_fft(n, FftDirection::Forward);
        let twist = match ctx.kind() {
            RingKind::Convolution => Vec::new(),
            RingKind::Cyclotomic => {
                (0..n).map(|i| Complex64::from_polar(1.0, PI * i as f64 / n as f64)).collect()
            }
        };
        Self { n, kind: ctx.kind(), eval, interp, twist }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Coefficients (possibly complex) to evaluations, in place.
    pub fn evaluate_in_place(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.n);
        if self.kind == RingKind::Cyclotomic {
            for (b, t) in buf.iter_mut().zip(&self.twist) {
                *b *= t;
            }
        }
        self.eval.process(buf);
    }

    /// Evaluations to coefficients, in place.
    pub fn interpolate_in_place(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.n);
        self.interp.process(buf);
        let scale = 1.0 / self.n as f64;
        match self.kind {
            RingKind::Convolution => buf.iter_mut().for_each(|b| *b *= scale),
            RingKind::Cyclotomic => {
                for (b, t) in buf.iter_mut().zip(&self.twist) {
                    *b *= t.conj() * scale;
                }
            }
        }
    }

    pub fn evaluate(&self, coeffs: &[i64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = coeffs.iter().map(|&c| Complex64::new(c as f64, 0.0)).collect();
        self.evaluate_in_place(&mut buf);
        buf
    }
}

/// Squared magnitudes `|a(omega_j)|^2` at the ring's evaluation points.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub mags2: Vec<f64>,
}

impl Spectrum {
    pub fn max(&self) -> f64 {
        self.mags2.iter().cloned().fold(0.0, f64::max)
    }
}

pub fn spectrum(a: &Poly, ctx: &RingCtx) -> Result<Spectrum> {
    if a.len() != ctx.n() {
        return Err(Error::LengthMismatch { expected: ctx.n(), got: a.len() });
    }
    Ok(spectrum_with(&Embedding::new(ctx), a))
}

pub(crate) fn spectrum_with(emb: &Embedding, a: &Poly) -> Spectrum {
    Spectrum { mags2: emb.evaluate(a.coeffs()).iter().map(|z| z.norm_sqr()).collect() }
}

/// Index map `pi_k` with `sigma_k(a)(omega_j) = a(omega_{pi_k(j)})`.
pub fn galois_permutation(ctx: &RingCtx, k: i64) -> Result<Vec<usize>> {
    let k = normalize_unit(k, ctx)?;
    Ok(permutation_unchecked(ctx, k))
}

fn permutation_unchecked(ctx: &RingCtx, k: usize) -> Vec<usize> {
    let n = ctx.n();
    match ctx.kind() {
        RingKind::Convolution => (0..n).map(|j| (j * k) % n).collect(),
        RingKind::Cyclotomic => (0..n).map(|j| (((2 * j + 1) * k) % (2 * n) - 1) / 2).collect(),
    }
}

/// `s_1([M(f); M(sigma_k(g))]) = sqrt(s_1(M(f fbar + sigma_k(g) bar(sigma_k(g)))))`.
pub fn quality(f: &Poly, g: &Poly, k: i64, ctx: &RingCtx) -> Result<f64> {
    let perm = galois_permutation(ctx, k)?;
    let fs = spectrum(f, ctx)?;
    let gs = spectrum(g, ctx)?;
    let worst = fs
        .mags2
        .iter()
        .zip(&perm)
        .map(|(fj, &pj)| fj + gs.mags2[pj])
        .fold(0.0, f64::max);
    Ok(worst.sqrt())
}

/// The Galois index minimizing the quality of `(f, sigma_k(g))`, smallest on ties.
///
/// Returns `(k, quality)`.
pub fn best_galois(f: &Spectrum, g: &Spectrum, ctx: &RingCtx) -> (usize, f64) {
    let n = ctx.n();
    let mut best = (1usize, f64::INFINITY);
    for k in galois_units(ctx) {
        // A later k must win by more than rounding noise to replace an earlier one.
        let bar = best.1 * (1.0 - 1e-12);
        let mut worst = 0.0f64;
        let mut beaten = false;
        for j in 0..n {
            let pj = match ctx.kind() {
                RingKind::Convolution => (j * k) % n,
                RingKind::Cyclotomic => (((2 * j + 1) * k) % (2 * n) - 1) / 2,
            };
            worst = worst.max(f.mags2[j] + g.mags2[pj]);
            if worst >= bar {
                beaten = true;
                break;
            }
        }
        if !beaten {
            best = (k, worst);
        }
    }
    (best.0, best.1.sqrt())
}
