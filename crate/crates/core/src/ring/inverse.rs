//! Inversion modulo a power of two: GF(2) extended GCD, then Newton/Hensel lifting.

use super::{center, ring_mul, Poly, RingCtx};
use crate::error::{Error, Result};

/// Degree of a GF(2) polynomial stored one bit per byte; `None` for zero.
fn degree(p: &[u8]) -> Option<usize> {
    p.iter().rposition(|&b| b != 0)
}

/// Inverse of `f` modulo 2 and modulo `x^n -+ 1` (the two coincide over GF(2)).
fn invert_mod_2(f: &[i64]) -> Option<Vec<i64>> {
    let n = f.len();
    let mut r0 = vec![0u8; n + 1];
    r0[0] = 1;
    r0[n] = 1;
    let mut r1: Vec<u8> = f.iter().map(|&c| (c & 1) as u8).chain(std::iter::once(0)).collect();
    // t_i * f == r_i modulo (2, x^n + 1)
    let mut t0 = vec![0u8; 2 * n + 2];
    let mut t1 = vec![0u8; 2 * n + 2];
    t1[0] = 1;

    degree(&r1)?;
    loop {
        let d1 = match degree(&r1) {
            Some(d) => d,
            None => break,
        };
        while let Some(d0) = degree(&r0) {
            if d0 < d1 {
                break;
            }
            let shift = d0 - d1;
            for i in 0..=d1 {
                r0[i + shift] ^= r1[i];
            }
            for i in 0..t1.len() - shift {
                t0[i + shift] ^= t1[i];
            }
        }
        std::mem::swap(&mut r0, &mut r1);
        std::mem::swap(&mut t0, &mut t1);
    }
    // gcd is now in r0
    if degree(&r0) != Some(0) {
        return None;
    }
    let mut inv = vec![0i64; n];
    for (i, &b) in t0.iter().enumerate() {
        inv[i % n] ^= b as i64;
    }
    Some(inv)
}

/// `f^{-1}` modulo `Q = 2^e` in the ring described by `ctx`.
pub fn invert_mod_2k(f: &Poly, ctx: &RingCtx) -> Result<Poly> {
    let q = ctx.modulus();
    if q < 2 || q & (q - 1) != 0 {
        return Err(Error::InvalidParameter(format!("modulus {q} is not a power of two")));
    }
    if f.len() != ctx.n() {
        return Err(Error::LengthMismatch { expected: ctx.n(), got: f.len() });
    }
    let mut inv = Poly::new(invert_mod_2(f.coeffs()).ok_or(Error::NotInvertible)?);
    let bits = q.trailing_zeros();
    let two = Poly::constant(ctx.n(), 2);
    let mut precision = 1;
    while precision < bits {
        // inv <- inv * (2 - f * inv)
        let fi = ring_mul(f, &inv, ctx)?;
        let corr = Poly::new(two.coeffs().iter().zip(fi.coeffs()).map(|(a, b)| center(a - b, q)).collect());
        inv = ring_mul(&inv, &corr, ctx)?;
        precision *= 2;
    }
    let inv = inv.centered(q);
    let check = ring_mul(f, &inv, ctx)?;
    if check != Poly::constant(ctx.n(), 1) {
        return Err(Error::NotInvertible);
    }
    Ok(inv)
}
