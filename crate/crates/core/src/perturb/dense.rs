use std::f64::consts::PI;

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;

use super::{PerturbMode, PerturbationSampler, TrapdoorShape};
use crate::error::{Error, Result};
use crate::gaussian::IntegerSampler;

/// Reference sampler: Cholesky factor of the assembled `Sigma_p - rbar^2 I`.
#[derive(Debug, Clone)]
pub struct DenseSampler {
    m: usize,
    rbar: f64,
    /// Row-major lower-triangular factor.
    factor: Vec<f64>,
    round: IntegerSampler,
}

/// In-place Cholesky of a row-major symmetric matrix; returns the lower factor.
pub(crate) fn cholesky(mut a: Vec<f64>, m: usize) -> Result<Vec<f64>> {
    for j in 0..m {
        let (done, rest) = a.split_at_mut((j + 1) * m);
        let row_j = &mut done[j * m..];
        let d = row_j[j] - row_j[..j].iter().map(|v| v * v).sum::<f64>();
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        let d = d.sqrt();
        row_j[j] = d;
        row_j[j + 1..].fill(0.0);
        let row_j = &done[j * m..j * m + j];
        for row_i in rest.chunks_exact_mut(m) {
            let v = row_i[j] - row_i[..j].iter().zip(row_j).map(|(x, y)| x * y).sum::<f64>();
            row_i[j] = v / d;
        }
    }
    Ok(a)
}

impl DenseSampler {
    pub fn new(shape: &TrapdoorShape, s: f64, r: f64, rbar: f64) -> Result<Self> {
        let m = shape.m();
        let mut sigma = shape.sigma_p(s, r);
        for i in 0..m {
            sigma[i * m + i] -= rbar * rbar;
        }
        let factor = cholesky(sigma, m)?;
        Ok(Self { m, rbar, factor, round: IntegerSampler::new(rbar)? })
    }

    pub fn factor(&self) -> &[f64] {
        &self.factor
    }

    /// Relative Frobenius error of `C C^t + rbar^2 I` against `target`.
    pub fn reconstruction_error(&self, target: &[f64]) -> f64 {
        let m = self.m;
        let c = &self.factor;
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..m {
            for j in 0..m {
                let k_max = i.min(j);
                let mut v: f64 = (0..=k_max).map(|k| c[i * m + k] * c[j * m + k]).sum();
                if i == j {
                    v += self.rbar * self.rbar;
                }
                num += (v - target[i * m + j]).powi(2);
                den += target[i * m + j].powi(2);
            }
        }
        (num / den).sqrt()
    }
}

impl PerturbationSampler for DenseSampler {
    fn mode(&self) -> PerturbMode {
        PerturbMode::Dense
    }

    fn dim(&self) -> usize {
        self.m
    }

    fn rbar(&self) -> f64 {
        self.rbar
    }

    fn rounding(&self) -> &IntegerSampler {
        &self.round
    }

    fn sample_center(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let y: Vec<f64> = (0..self.m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let scale = 1.0 / (2.0 * PI).sqrt();
        self.factor
            .chunks_exact(self.m)
            .enumerate()
            .map(|(i, row)| row[..=i].iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() * scale)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perturb::{build_context, PerturbMode};
    use crate::xof::ShakeRng;
    use nalgebra::DMatrix;
    use rand::SeedableRng;

    #[test]
    fn zero_trapdoor_gives_scaled_identity() {
        let shape = TrapdoorShape::Dense { rows: vec![vec![0.0; 2]; 3] };
        let d = DenseSampler::new(&shape, 2.0, 1.0, 1.0).unwrap();
        let r3 = 3f64.sqrt();
        let expected = [r3, 0.0, 0.0, 0.0, r3, 0.0, 0.0, 0.0, r3];
        for (a, b) in d.factor().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn too_small_s_is_rejected() {
        let shape = TrapdoorShape::Dense { rows: vec![vec![3.0], vec![4.0]] };
        // s1(T) = 5, r = 1: need s^2 > 25 + rbar^2
        assert_eq!(DenseSampler::new(&shape, 5.0, 1.0, 1.0).unwrap_err(), Error::NotPositiveDefinite);
        assert!(DenseSampler::new(&shape, 5.2, 1.0, 1.0).is_ok());
    }

    #[test]
    fn factor_reconstructs_and_matches_nalgebra() {
        let rows: Vec<Vec<f64>> = (0..6).map(|i| (0..3).map(|j| ((i * 7 + j * 3) % 5) as f64 - 2.0).collect()).collect();
        let shape = TrapdoorShape::Dense { rows };
        let target = shape.sigma_p(30.0, 2.0);
        let d = DenseSampler::new(&shape, 30.0, 2.0, 1.5).unwrap();
        assert!(d.reconstruction_error(&target) < 1e-12);
        let mut shifted = target.clone();
        for i in 0..6 {
            shifted[i * 6 + i] -= 2.25;
        }
        let na = DMatrix::from_row_slice(6, 6, &shifted).cholesky().unwrap();
        let l = na.l();
        for i in 0..6 {
            for j in 0..6 {
                assert!((l[(i, j)] - d.factor()[i * 6 + j]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn failure_iff_nonpositive_eigenvalue() {
        let mut rng = ShakeRng::from_seed([11; 32]);
        for trial in 0..40 {
            let rows: Vec<Vec<f64>> =
                (0..8).map(|_| (0..4).map(|_| (rng.next_u32() % 5) as f64 - 2.0).collect()).collect();
            let shape = TrapdoorShape::Dense { rows };
            let s = 2.0 + trial as f64 * 0.5;
            let (r, rbar) = (1.0, 1.0);
            let mut shifted = shape.sigma_p(s, r);
            for i in 0..8 {
                shifted[i * 8 + i] -= rbar * rbar;
            }
            let min_eig = DMatrix::from_row_slice(8, 8, &shifted).symmetric_eigenvalues().min();
            if min_eig.abs() < 1e-6 {
                continue;
            }
            let built = build_context(&shape, s, r, rbar, PerturbMode::Dense);
            assert_eq!(built.is_ok(), min_eig > 0.0, "trial {trial}: min eig {min_eig}");
        }
    }

    #[test]
    fn zero_trapdoor_variance() {
        let shape = TrapdoorShape::Dense { rows: vec![vec![0.0]; 4] };
        let s = 40.0;
        let d = DenseSampler::new(&shape, s, 1.0, 8.0).unwrap();
        let mut rng = ShakeRng::from_seed([12; 32]);
        let n = 100_000;
        let mut sum = [0.0f64; 4];
        let mut sq = [0.0f64; 4];
        for _ in 0..n {
            for (i, v) in d.sample(&mut rng).into_iter().enumerate() {
                sum[i] += v as f64;
                sq[i] += (v * v) as f64;
            }
        }
        let expected = s * s / (2.0 * PI);
        for i in 0..4 {
            let mean = sum[i] / n as f64;
            let var = sq[i] / n as f64 - mean * mean;
            assert!((var / expected - 1.0).abs() < 0.03, "coord {i}: {var} vs {expected}");
            assert!(mean.abs() < 4.0 * (var / n as f64).sqrt());
        }
    }
}
