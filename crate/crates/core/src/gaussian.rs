//! Integer discrete Gaussian samplers.
//!
//! Widths follow the `rho_s(x) = exp(-pi x^2 / s^2)` convention, so the
//! standard deviation of `D_{Z,s}` is close to `s / sqrt(2 pi)`.
//!
//! The base sampler draws a half-Gaussian value `z0 >= 0` from a cumulative
//! table built for the target deviation, picks a side with a random bit
//! (`z = b + (2b - 1) z0`) and accepts with probability
//! `exp((z0^2 - (z - c)^2) / (2 sigma^2))`, which yields `D_{Z,s,c}` exactly
//! up to floating-point precision for any fractional center `c` in `[0, 1)`.
//! Outputs further than `tailcut * sigma` from the center are rejected.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

pub const DEFAULT_TAILCUT: f64 = 10.0;

/// Parameters of a one-dimensional discrete Gaussian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussParams {
    pub width: f64,
    pub center: f64,
    /// In multiples of the standard deviation.
    pub tailcut: f64,
}

impl GaussParams {
    pub fn new(width: f64, center: f64) -> Result<Self> {
        Self::with_tailcut(width, center, DEFAULT_TAILCUT)
    }

    pub fn with_tailcut(width: f64, center: f64, tailcut: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidParameter(format!("gaussian width {width}")));
        }
        if !(tailcut >= 6.0) {
            return Err(Error::InvalidParameter(format!("tailcut {tailcut} < 6")));
        }
        if !center.is_finite() {
            return Err(Error::InvalidParameter("non-finite center".into()));
        }
        Ok(Self { width, center, tailcut })
    }

    pub fn std_dev(&self) -> f64 {
        width_to_std(self.width)
    }
}

pub fn width_to_std(width: f64) -> f64 {
    width / (2.0 * PI).sqrt()
}

pub fn std_to_width(std: f64) -> f64 {
    std * (2.0 * PI).sqrt()
}

/// Reusable sampler for `D_{Z,s,c}` at a fixed width and arbitrary centers.
#[derive(Debug, Clone)]
pub struct IntegerSampler {
    sigma: f64,
    inv_2sigma2: f64,
    cut: f64,
    cdt: Vec<f64>,
}

impl IntegerSampler {
    pub fn new(width: f64) -> Result<Self> {
        Self::with_tailcut(width, DEFAULT_TAILCUT)
    }

    pub fn with_tailcut(width: f64, tailcut: f64) -> Result<Self> {
        GaussParams::with_tailcut(width, 0.0, tailcut)?;
        let sigma = width_to_std(width);
        let inv_2sigma2 = 1.0 / (2.0 * sigma * sigma);
        let zmax = (tailcut * sigma).ceil() as usize + 1;
        let mut cdt = Vec::with_capacity(zmax + 1);
        let mut acc = 0.0;
        for z in 0..=zmax {
            acc += (-((z * z) as f64) * inv_2sigma2).exp();
            cdt.push(acc);
        }
        for c in cdt.iter_mut() {
            *c /= acc;
        }
        *cdt.last_mut().unwrap() = 1.0;
        Ok(Self { sigma, inv_2sigma2, cut: tailcut * sigma, cdt })
    }

    pub fn std_dev(&self) -> f64 {
        self.sigma
    }

    pub fn width(&self) -> f64 {
        std_to_width(self.sigma)
    }

    /// Largest distance from the center an output can have.
    pub fn tail_bound(&self) -> f64 {
        self.cut
    }

    #[inline]
    fn half_gaussian<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let u: f64 = rng.gen();
        self.cdt.partition_point(|&c| c <= u) as i64
    }

    pub fn sample<R: Rng + ?Sized>(&self, center: f64, rng: &mut R) -> i64 {
        let base = center.floor();
        let frac = center - base;
        loop {
            let bits = rng.next_u64();
            let z0 = self.half_gaussian(rng);
            let b = (bits & 1) as i64;
            let z = b + (2 * b - 1) * z0;
            let d = z as f64 - frac;
            if d.abs() > self.cut {
                continue;
            }
            let log_accept = ((z0 * z0) as f64 - d * d) * self.inv_2sigma2;
            // 53-bit uniform from the unused high bits
            let u = (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            if u < log_accept.exp() {
                return base as i64 + z;
            }
        }
    }
}

/// One draw from `D_{Z, width, center}`.
pub fn sample_z<R: Rng + ?Sized>(params: &GaussParams, rng: &mut R) -> Result<i64> {
    let s = IntegerSampler::with_tailcut(params.width, params.tailcut)?;
    Ok(s.sample(params.center, rng))
}

/// Sampler for the cosets `qZ + c` at width `r`, centered at 0.
#[derive(Debug, Clone)]
pub struct CosetSampler {
    q: i64,
    base: IntegerSampler,
}

impl CosetSampler {
    pub fn new(q: i64, r: f64) -> Result<Self> {
        if q < 1 {
            return Err(Error::InvalidParameter(format!("coset modulus {q}")));
        }
        Ok(Self { q, base: IntegerSampler::new(r / q as f64)? })
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    /// `x ~ D_{qZ + c, r}`; always `x == c (mod q)`.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, c: i64, rng: &mut R) -> i64 {
        let c = c.rem_euclid(self.q);
        let y = self.base.sample(-(c as f64) / self.q as f64, rng);
        self.q * y + c
    }
}

pub fn sample_coset<R: Rng + ?Sized>(q: i64, c: i64, r: f64, rng: &mut R) -> Result<i64> {
    Ok(CosetSampler::new(q, r)?.sample(c, rng))
}

/// Shape of `T(n, a, b)`: exactly `a` ones and `b` minus ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TernaryShape {
    pub n: usize,
    pub a: usize,
    pub b: usize,
}

impl TernaryShape {
    pub fn new(n: usize, a: usize, b: usize) -> Result<Self> {
        if a + b > n {
            return Err(Error::InvalidParameter(format!("a + b = {} exceeds n = {n}", a + b)));
        }
        Ok(Self { n, a, b })
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        v.len() == self.n
            && v.iter().all(|c| (-1..=1).contains(c))
            && v.iter().filter(|&&c| c == 1).count() == self.a
            && v.iter().filter(|&&c| c == -1).count() == self.b
    }
}

/// Uniform element of `T(n, a, b)`.
pub fn sample_ternary<R: Rng + ?Sized>(shape: &TernaryShape, rng: &mut R) -> Result<Vec<i64>> {
    let shape = TernaryShape::new(shape.n, shape.a, shape.b)?;
    let mut v = vec![0i64; shape.n];
    v[..shape.a].fill(1);
    v[shape.a..shape.a + shape.b].fill(-1);
    v.shuffle(rng);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xof::ShakeRng;
    use rand::SeedableRng;
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    use std::collections::HashMap;

    fn rng(tag: u8) -> ShakeRng {
        ShakeRng::from_seed([tag; 32])
    }

    /// Exact `D_{Z,width,center}` over the tailcut support, by direct summation.
    fn exact_pmf(width: f64, center: f64) -> Vec<(i64, f64)> {
        let sigma = width_to_std(width);
        let lo = (center - 10.0 * sigma).ceil() as i64;
        let hi = (center + 10.0 * sigma).floor() as i64;
        let w: Vec<(i64, f64)> = (lo..=hi)
            .map(|x| (x, (-PI * (x as f64 - center).powi(2) / (width * width)).exp()))
            .collect();
        let total: f64 = w.iter().map(|p| p.1).sum();
        w.into_iter().map(|(x, p)| (x, p / total)).collect()
    }

    /// Chi-square p-value after merging adjacent cells until each expects >= 20.
    fn chi_square_p(pmf: &[(i64, f64)], counts: &HashMap<i64, u64>, n: u64) -> f64 {
        let mut stat = 0.0;
        let mut cells = 0usize;
        let (mut e_acc, mut o_acc) = (0.0, 0.0);
        for (i, &(x, p)) in pmf.iter().enumerate() {
            e_acc += p * n as f64;
            o_acc += *counts.get(&x).unwrap_or(&0) as f64;
            let tail_left: f64 = if i + 1 < pmf.len() { pmf[i + 1..].iter().map(|q| q.1).sum::<f64>() * n as f64 } else { 0.0 };
            if e_acc >= 20.0 && tail_left >= 20.0 || i + 1 == pmf.len() {
                stat += (o_acc - e_acc).powi(2) / e_acc;
                cells += 1;
                e_acc = 0.0;
                o_acc = 0.0;
            }
        }
        let dist = ChiSquared::new((cells - 1) as f64).unwrap();
        1.0 - dist.cdf(stat)
    }

    #[test]
    fn rejects_bad_params() {
        assert!(GaussParams::new(0.0, 0.0).is_err());
        assert!(GaussParams::with_tailcut(1.0, 0.0, 5.0).is_err());
        assert!(CosetSampler::new(0, 10.0).is_err());
        assert!(TernaryShape::new(4, 3, 2).is_err());
    }

    #[test]
    fn degenerate_width_returns_center() {
        let mut r = rng(1);
        let p = GaussParams::new(1e-3, 7.0).unwrap();
        for _ in 0..1000 {
            assert_eq!(sample_z(&p, &mut r).unwrap(), 7);
        }
    }

    #[test]
    fn respects_tailcut() {
        let mut r = rng(2);
        let s = IntegerSampler::new(10.22).unwrap();
        let bound = 10.0 * s.std_dev();
        for i in 0..100_000 {
            let c = (i % 97) as f64 * 0.173 - 8.0;
            let x = s.sample(c, &mut r);
            assert!((x as f64 - c).abs() <= bound);
        }
    }

    #[test]
    fn variance_at_large_width() {
        let mut r = rng(3);
        let s = IntegerSampler::new(449.8).unwrap();
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| s.sample(0.0, &mut r) as f64).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let expected = 449.8f64.powi(2) / (2.0 * PI);
        assert!((expected / 32198.0 - 1.0).abs() < 1e-3);
        assert!((var / expected - 1.0).abs() < 0.03, "var {var} vs {expected}");
    }

    #[test]
    fn chi_square_against_exact_pmf() {
        let mut r = rng(4);
        for &width in &[1.28, 10.22, 449.8] {
            let s = IntegerSampler::new(width).unwrap();
            for &center in &[0.0, 0.37] {
                let n = 100_000u64;
                let mut counts = HashMap::new();
                for _ in 0..n {
                    *counts.entry(s.sample(center, &mut r)).or_insert(0u64) += 1;
                }
                let p = chi_square_p(&exact_pmf(width, center), &counts, n);
                assert!(p > 1e-3, "width {width} center {center}: p = {p}");
            }
        }
    }

    #[test]
    fn coset_congruence() {
        let mut r = rng(5);
        for c in [0i64, 5, -3, 13] {
            for _ in 0..2000 {
                let x = sample_coset(8, c, 10.22, &mut r).unwrap();
                assert_eq!(x.rem_euclid(8), c.rem_euclid(8));
            }
        }
    }

    #[test]
    fn coset_mean_matches_exact() {
        // exact mean of D_{8Z+5, 10.22} by summation over +-10 sigma
        let width = 10.22f64;
        let sigma = width_to_std(width);
        let (mut num, mut den) = (0.0, 0.0);
        let k_max = ((10.0 * sigma) / 8.0).ceil() as i64 + 1;
        for k in -k_max..=k_max {
            let x = (8 * k + 5) as f64;
            if x.abs() > 10.0 * sigma {
                continue;
            }
            let w = (-PI * x * x / (width * width)).exp();
            num += x * w;
            den += w;
        }
        let exact_mean = num / den;
        let mut r = rng(6);
        let s = CosetSampler::new(8, width).unwrap();
        let n = 100_000;
        let mean = (0..n).map(|_| s.sample(5, &mut r) as f64).sum::<f64>() / n as f64;
        assert!((mean - exact_mean).abs() < 0.06, "mean {mean} vs exact {exact_mean}");
    }

    #[test]
    fn ternary_forced_and_counts() {
        let mut r = rng(7);
        let v = sample_ternary(&TernaryShape::new(4, 4, 0).unwrap(), &mut r).unwrap();
        assert_eq!(v, vec![1, 1, 1, 1]);
        let shape = TernaryShape::new(701, 176, 175).unwrap();
        for _ in 0..20 {
            let v = sample_ternary(&shape, &mut r).unwrap();
            assert_eq!(v.iter().sum::<i64>(), 1);
            assert_eq!(v.iter().filter(|&&c| c != 0).count(), 351);
            assert!(shape.contains(&v));
        }
        assert!(sample_ternary(&TernaryShape { n: 3, a: 2, b: 2 }, &mut r).is_err());
    }

    #[test]
    fn ternary_is_uniform_over_arrangements() {
        // enumerate all arrangements of one +1 and one -1 among 4 slots
        let mut arrangements = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    let mut v = vec![0i64; 4];
                    v[i] = 1;
                    v[j] = -1;
                    arrangements.push(v);
                }
            }
        }
        assert_eq!(arrangements.len(), 12);
        let mut r = rng(8);
        let shape = TernaryShape::new(4, 1, 1).unwrap();
        let mut counts: HashMap<Vec<i64>, u64> = HashMap::new();
        let n = 100_000;
        for _ in 0..n {
            *counts.entry(sample_ternary(&shape, &mut r).unwrap()).or_default() += 1;
        }
        assert_eq!(counts.len(), 12);
        for a in &arrangements {
            let f = counts[a] as f64 / n as f64;
            assert!((f - 1.0 / 12.0).abs() < 0.01, "{a:?}: {f}");
        }
    }
}
