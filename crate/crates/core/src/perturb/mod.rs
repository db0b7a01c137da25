//! Perturbation sampling for `D_{Z^m, sqrt(Sigma_p)}` with `Sigma_p = s^2 I - r^2 T T^t`.
//!
//! Both samplers draw a continuous Gaussian with covariance
//! `(Sigma_p - rbar^2 I) / (2 pi)` and round each coordinate with an integer
//! Gaussian of width `rbar`. They differ in how the continuous part is
//! factored: [`DenseSampler`] uses a Cholesky factor of the assembled matrix,
//! [`SpectralSampler`] diagonalizes the block-circulant structure of ring
//! trapdoors and factors one small Hermitian matrix per frequency.

mod dense;
mod spectral;

use std::fmt;
use std::str::FromStr;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::gaussian::IntegerSampler;
use crate::ring::{Poly, RingCtx, RingKind};

pub use dense::DenseSampler;
pub use spectral::SpectralSampler;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PerturbMode {
    Dense,
    Spectral,
}

impl PerturbMode {
    pub const ALL: [PerturbMode; 2] = [PerturbMode::Dense, PerturbMode::Spectral];

    pub fn name(self) -> &'static str {
        match self {
            PerturbMode::Dense => "dense",
            PerturbMode::Spectral => "spectral",
        }
    }
}

impl fmt::Display for PerturbMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PerturbMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown perturbation mode {s:?}")))
    }
}

/// The trapdoor `T` as seen by the perturbation sampler.
#[derive(Debug, Clone)]
pub enum TrapdoorShape {
    /// Explicit `m x n` real matrix.
    Dense { rows: Vec<Vec<f64>> },
    /// `T = [M(b_0); ...; M(b_{K-1})]` with `M(b)` the multiplication matrix of `b`.
    Ring { ctx: RingCtx, blocks: Vec<Poly> },
}

impl TrapdoorShape {
    pub fn m(&self) -> usize {
        match self {
            TrapdoorShape::Dense { rows } => rows.len(),
            TrapdoorShape::Ring { ctx, blocks } => ctx.n() * blocks.len(),
        }
    }

    /// Row-major `m x n` form of `T`.
    pub fn dense_rows(&self) -> Vec<Vec<f64>> {
        match self {
            TrapdoorShape::Dense { rows } => rows.clone(),
            TrapdoorShape::Ring { ctx, blocks } => {
                let mut rows = Vec::with_capacity(self.m());
                for b in blocks {
                    let mm = multiplication_matrix(b.coeffs(), ctx.kind());
                    rows.extend(mm.into_iter().map(|r| r.into_iter().map(|v| v as f64).collect()));
                }
                rows
            }
        }
    }

    /// `Sigma_p = s^2 I - r^2 T T^t`, row-major `m x m`.
    pub fn sigma_p(&self, s: f64, r: f64) -> Vec<f64> {
        let t = self.dense_rows();
        let m = t.len();
        let mut out = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..=i {
                let dot: f64 = t[i].iter().zip(&t[j]).map(|(a, b)| a * b).sum();
                let v = if i == j { s * s } else { 0.0 } - r * r * dot;
                out[i * m + j] = v;
                out[j * m + i] = v;
            }
        }
        out
    }
}

/// `M(b)` with `(b * v)_i = sum_j M[i][j] v_j`.
pub fn multiplication_matrix(b: &[i64], kind: RingKind) -> Vec<Vec<i64>> {
    let n = b.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i >= j {
                        b[i - j]
                    } else {
                        match kind {
                            RingKind::Convolution => b[n + i - j],
                            RingKind::Cyclotomic => -b[n + i - j],
                        }
                    }
                })
                .collect()
        })
        .collect()
}

/// A prepared perturbation sampler for a fixed `(T, s, r, rbar)`.
pub trait PerturbationSampler: Send + Sync + fmt::Debug {
    fn mode(&self) -> PerturbMode;
    fn dim(&self) -> usize;
    fn rbar(&self) -> f64;
    /// Continuous center with covariance `(Sigma_p - rbar^2 I) / (2 pi)`.
    fn sample_center(&self, rng: &mut dyn RngCore) -> Vec<f64>;
    fn rounding(&self) -> &IntegerSampler;

    fn sample(&self, rng: &mut dyn RngCore) -> Vec<i64> {
        let c = self.sample_center(rng);
        let round = self.rounding();
        c.into_iter().map(|ci| round.sample(ci, rng)).collect()
    }
}

/// Factor `Sigma_p - rbar^2 I` in the requested mode.
pub fn build_context(
    shape: &TrapdoorShape,
    s: f64,
    r: f64,
    rbar: f64,
    mode: PerturbMode,
) -> Result<Box<dyn PerturbationSampler>> {
    if !(s > 0.0 && r >= 0.0 && rbar > 0.0) {
        return Err(Error::InvalidParameter(format!("perturbation widths s={s} r={r} rbar={rbar}")));
    }
    Ok(match mode {
        PerturbMode::Dense => Box::new(DenseSampler::new(shape, s, r, rbar)?),
        PerturbMode::Spectral => match shape {
            TrapdoorShape::Ring { ctx, blocks } => Box::new(SpectralSampler::new(ctx, blocks, s, r, rbar)?),
            TrapdoorShape::Dense { .. } => {
                return Err(Error::InvalidParameter("spectral mode needs a ring trapdoor".into()))
            }
        },
    })
}
