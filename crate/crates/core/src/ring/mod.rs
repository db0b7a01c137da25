//! Arithmetic in `Z[x]/(x^n - 1)` (n prime) and `Z[x]/(x^n + 1)` (n a power of two).
//!
//! Coefficients are plain `i64`. Reductions modulo `Q` always return the
//! centered representative in `{-floor(Q/2), ..., Q - floor(Q/2) - 1}`.

mod embed;
mod inverse;

pub use embed::{best_galois, galois_permutation, quality, spectrum, Embedding, Spectrum};
pub use inverse::invert_mod_2k;

use crate::error::{Error, Result};

/// Which quotient polynomial defines the ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RingKind {
    /// `x^n - 1`, n prime.
    Convolution,
    /// `x^n + 1`, n a power of two.
    Cyclotomic,
}

/// Ring descriptor: degree, quotient polynomial and coefficient modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RingCtx {
    n: usize,
    kind: RingKind,
    modulus: i64,
}

impl RingCtx {
    pub fn new(n: usize, kind: RingKind, modulus: i64) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidRing(format!("modulus {modulus} < 2")));
        }
        match kind {
            RingKind::Convolution if !is_prime(n) => {
                return Err(Error::InvalidRing(format!("convolution ring needs prime n, got {n}")))
            }
            RingKind::Cyclotomic if !n.is_power_of_two() => {
                return Err(Error::InvalidRing(format!(
                    "cyclotomic ring needs a power-of-two n, got {n}"
                )))
            }
            _ => {}
        }
        Ok(Self { n, kind, modulus })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> RingKind {
        self.kind
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    /// Same ring, different coefficient modulus.
    pub fn with_modulus(&self, modulus: i64) -> Result<Self> {
        Self::new(self.n, self.kind, modulus)
    }

    fn check(&self, a: &Poly) -> Result<()> {
        if a.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: a.len() });
        }
        Ok(())
    }
}

/// Ring element, stored as its coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<i64>,
}

impl Poly {
    pub fn new(coeffs: Vec<i64>) -> Self {
        Self { coeffs }
    }

    pub fn zero(n: usize) -> Self {
        Self { coeffs: vec![0; n] }
    }

    /// The constant polynomial `c`.
    pub fn constant(n: usize, c: i64) -> Self {
        let mut coeffs = vec![0; n];
        coeffs[0] = c;
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<i64> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn norm_sq(&self) -> i64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Coefficients centered modulo `q`.
    pub fn centered(&self, q: i64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| center(c, q)).collect())
    }
}

impl From<Vec<i64>> for Poly {
    fn from(coeffs: Vec<i64>) -> Self {
        Self::new(coeffs)
    }
}

/// Centered representative of `x` modulo `q`.
#[inline]
pub fn center(x: i64, q: i64) -> i64 {
    let r = x.rem_euclid(q);
    if r >= q - q / 2 {
        r - q
    } else {
        r
    }
}

/// Integer product in `Z[x]/(x^n -+ 1)` without any coefficient reduction.
///
/// Callers keep `n * max|a| * max|b|` below `2^63`.
pub fn mul_exact(a: &[i64], b: &[i64], kind: RingKind) -> Vec<i64> {
    let n = a.len();
    debug_assert_eq!(n, b.len());
    let mut acc = vec![0i64; n];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        let (lo, hi) = acc.split_at_mut(i);
        for (c, &bj) in hi.iter_mut().zip(&b[..n - i]) {
            *c += ai * bj;
        }
        let wrap = match kind {
            RingKind::Convolution => ai,
            RingKind::Cyclotomic => -ai,
        };
        for (c, &bj) in lo.iter_mut().zip(&b[n - i..]) {
            *c += wrap * bj;
        }
    }
    acc
}

/// `a * b` in the ring, coefficients centered mod `Q`.
pub fn ring_mul(a: &Poly, b: &Poly, ctx: &RingCtx) -> Result<Poly> {
    ctx.check(a)?;
    ctx.check(b)?;
    let q = ctx.modulus;
    let ar: Vec<i64> = a.coeffs.iter().map(|&c| center(c, q)).collect();
    let br: Vec<i64> = b.coeffs.iter().map(|&c| center(c, q)).collect();
    let prod = mul_exact(&ar, &br, ctx.kind);
    Ok(Poly::new(prod.into_iter().map(|c| center(c, q)).collect()))
}

/// `a + b` centered mod `Q`.
pub fn ring_add(a: &Poly, b: &Poly, ctx: &RingCtx) -> Result<Poly> {
    ctx.check(a)?;
    ctx.check(b)?;
    let q = ctx.modulus;
    Ok(Poly::new(a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| center(x + y, q)).collect()))
}

/// `a - b` centered mod `Q`.
pub fn ring_sub(a: &Poly, b: &Poly, ctx: &RingCtx) -> Result<Poly> {
    ctx.check(a)?;
    ctx.check(b)?;
    let q = ctx.modulus;
    Ok(Poly::new(a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| center(x - y, q)).collect()))
}

/// `a(x^{-1})`; its matrix form is the transpose of `M(a)`.
pub fn adjoint(a: &Poly, ctx: &RingCtx) -> Result<Poly> {
    ctx.check(a)?;
    let n = ctx.n;
    let mut out = vec![0i64; n];
    out[0] = a.coeffs[0];
    for i in 1..n {
        out[i] = match ctx.kind {
            RingKind::Convolution => a.coeffs[n - i],
            RingKind::Cyclotomic => -a.coeffs[n - i],
        };
    }
    Ok(Poly::new(out))
}

/// Reduce a Galois index into its canonical range, or fail if it is not a unit.
pub(crate) fn normalize_unit(k: i64, ctx: &RingCtx) -> Result<usize> {
    let n = ctx.n as i64;
    match ctx.kind {
        RingKind::Convolution => {
            let k = k.rem_euclid(n);
            if gcd(k as u64, n as u64) != 1 {
                return Err(Error::NotAUnit(k));
            }
            Ok(k as usize)
        }
        RingKind::Cyclotomic => {
            let k = k.rem_euclid(2 * n);
            if k % 2 == 0 {
                return Err(Error::NotAUnit(k));
            }
            Ok(k as usize)
        }
    }
}

/// Units of the Galois group in increasing order.
pub fn galois_units(ctx: &RingCtx) -> Vec<usize> {
    match ctx.kind {
        RingKind::Convolution => (1..ctx.n).filter(|&k| gcd(k as u64, ctx.n as u64) == 1).collect(),
        RingKind::Cyclotomic => (1..2 * ctx.n).step_by(2).collect(),
    }
}

/// `sigma_k(a) = a(x^k)`.
pub fn galois(a: &Poly, k: i64, ctx: &RingCtx) -> Result<Poly> {
    ctx.check(a)?;
    let k = normalize_unit(k, ctx)?;
    let n = ctx.n;
    let mut out = vec![0i64; n];
    match ctx.kind {
        RingKind::Convolution => {
            for (i, &c) in a.coeffs.iter().enumerate() {
                out[(i * k) % n] = c;
            }
        }
        RingKind::Cyclotomic => {
            for (i, &c) in a.coeffs.iter().enumerate() {
                let e = (i * k) % (2 * n);
                if e < n {
                    out[e] = c;
                } else {
                    out[e - n] = -c;
                }
            }
        }
    }
    Ok(Poly::new(out))
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}
