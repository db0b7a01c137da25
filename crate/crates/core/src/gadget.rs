//! The scalar gadget `(P, Q) = (pI, qI)` with `pq = Q`.
//!
//! Decoding is deterministic: a target coordinate `u` splits as `p*c + e`
//! with `e` the centered residue mod `p`. Only the preimage is randomized,
//! each coordinate being drawn from the coset `qZ + c` at width `r`.

use rand::RngCore;

use crate::error::{Error, Result};
use crate::gaussian::CosetSampler;
use crate::perturb::PerturbationSampler;
use crate::ring::center;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GadgetParams {
    pub p: i64,
    pub q: i64,
    pub modulus: i64,
    /// Width of the coset Gaussian.
    pub r: f64,
}

impl GadgetParams {
    pub fn new(p: i64, q: i64, modulus: i64, r: f64) -> Result<Self> {
        let g = Self { p, q, modulus, r };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 2 || self.q < 1 {
            return Err(Error::InvalidParameter(format!("gadget p={} q={}", self.p, self.q)));
        }
        if self.p.checked_mul(self.q) != Some(self.modulus) {
            return Err(Error::InvalidParameter(format!(
                "p*q = {}*{} differs from modulus {}",
                self.p, self.q, self.modulus
            )));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::InvalidParameter(format!("gadget width {}", self.r)));
        }
        Ok(())
    }
}

/// Split each `u_i` into `p*c_i + e_i` with `e_i` centered mod `p`.
pub fn decode_mod_p(u: &[i64], p: i64) -> Result<(Vec<i64>, Vec<i64>)> {
    if p < 2 {
        return Err(Error::InvalidParameter(format!("decode modulus {p}")));
    }
    let mut c = Vec::with_capacity(u.len());
    let mut e = Vec::with_capacity(u.len());
    for &ui in u {
        let ei = center(ui, p);
        c.push((ui - ei) / p);
        e.push(ei);
    }
    Ok((c, e))
}

/// Gadget sampler with its coset table prepared once.
#[derive(Debug, Clone)]
pub struct GadgetSampler {
    params: GadgetParams,
    coset: CosetSampler,
}

impl GadgetSampler {
    pub fn new(params: GadgetParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, coset: CosetSampler::new(params.q, params.r)? })
    }

    pub fn params(&self) -> &GadgetParams {
        &self.params
    }

    /// Returns `(x, e)` with `p*x + e == u (mod Q)`.
    pub fn sample(&self, u: &[i64], rng: &mut dyn RngCore) -> (Vec<i64>, Vec<i64>) {
        let p = self.params.p;
        let mut x = Vec::with_capacity(u.len());
        let mut e = Vec::with_capacity(u.len());
        for &ui in u {
            let ui = center(ui, self.params.modulus);
            let ei = center(ui, p);
            x.push(self.coset.sample((ui - ei) / p, rng));
            e.push(ei);
        }
        (x, e)
    }
}

/// One-shot form of [`GadgetSampler::sample`], returning only `x`.
pub fn gadget_sample(u: &[i64], g: &GadgetParams, rng: &mut dyn RngCore) -> Result<Vec<i64>> {
    Ok(GadgetSampler::new(*g)?.sample(u, rng).0)
}

/// A pair `(A, T)` with `A T == p I (mod Q)`, given only through its action.
pub trait TrapdoorMap: Send + Sync {
    /// Rows of `A` (length of targets).
    fn n(&self) -> usize;
    /// Columns of `A` (length of preimages).
    fn m(&self) -> usize;
    fn modulus(&self) -> i64;
    /// `A x`, centered mod `Q`.
    fn apply_a(&self, x: &[i64]) -> Vec<i64>;
    /// `T v` over the integers.
    fn apply_t(&self, v: &[i64]) -> Vec<i64>;
}

/// Explicit integer matrices, for toy dimensions.
#[derive(Debug, Clone)]
pub struct DenseTrapdoor {
    a: Vec<Vec<i64>>,
    t: Vec<Vec<i64>>,
    modulus: i64,
}

impl DenseTrapdoor {
    /// `a` is `n x m`, `t` is `m x n`.
    pub fn new(a: Vec<Vec<i64>>, t: Vec<Vec<i64>>, modulus: i64) -> Result<Self> {
        let n = a.len();
        let m = t.len();
        if n == 0 || m == 0 {
            return Err(Error::InvalidParameter("empty trapdoor".into()));
        }
        if let Some(row) = a.iter().find(|r| r.len() != m) {
            return Err(Error::LengthMismatch { expected: m, got: row.len() });
        }
        if let Some(row) = t.iter().find(|r| r.len() != n) {
            return Err(Error::LengthMismatch { expected: n, got: row.len() });
        }
        Ok(Self { a, t, modulus })
    }

    pub fn t_rows(&self) -> &[Vec<i64>] {
        &self.t
    }

    /// Checks `A T == p I (mod Q)`.
    pub fn satisfies(&self, p: i64) -> bool {
        let n = self.n();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let s: i64 = (0..self.m()).map(|k| self.a[i][k] * self.t[k][j]).sum();
                (s - if i == j { p } else { 0 }).rem_euclid(self.modulus) == 0
            })
        })
    }
}

impl TrapdoorMap for DenseTrapdoor {
    fn n(&self) -> usize {
        self.a.len()
    }
    fn m(&self) -> usize {
        self.t.len()
    }
    fn modulus(&self) -> i64 {
        self.modulus
    }
    fn apply_a(&self, x: &[i64]) -> Vec<i64> {
        self.a
            .iter()
            .map(|row| center(row.iter().zip(x).map(|(a, b)| a * b).sum(), self.modulus))
            .collect()
    }
    fn apply_t(&self, v: &[i64]) -> Vec<i64> {
        self.t.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }
}

/// Output of approximate preimage sampling: `A x == u - e (mod Q)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presample {
    pub x: Vec<i64>,
    pub e: Vec<i64>,
}

/// Approximate preimage of `u`: perturb, then gadget-sample the shifted target through `T`.
pub fn presamp(
    td: &dyn TrapdoorMap,
    gadget: &GadgetSampler,
    u: &[i64],
    perturb: &dyn PerturbationSampler,
    rng: &mut dyn RngCore,
) -> Result<Presample> {
    if u.len() != td.n() {
        return Err(Error::LengthMismatch { expected: td.n(), got: u.len() });
    }
    if perturb.dim() != td.m() {
        return Err(Error::LengthMismatch { expected: td.m(), got: perturb.dim() });
    }
    let q = td.modulus();
    let mut x = perturb.sample(rng);
    let ap = td.apply_a(&x);
    let shifted: Vec<i64> = u.iter().zip(&ap).map(|(a, b)| center(a - b, q)).collect();
    let (xg, e) = gadget.sample(&shifted, rng);
    for (xi, ti) in x.iter_mut().zip(td.apply_t(&xg)) {
        *xi += ti;
    }
    Ok(Presample { x, e })
}
