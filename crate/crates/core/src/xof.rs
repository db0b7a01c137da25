//! SHAKE256 as the single extendable-output function.
//!
//! Used for hashing messages to points, expanding public seeds and as a
//! deterministic random stream. The stream produced by [`ShakeRng`] is
//! `SHAKE256("gadgetforge-rng" || seed)` read sequentially; `next_u64` consumes
//! eight bytes little-endian.

use rand_core::{CryptoRng, RngCore, SeedableRng};
use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;

use crate::ring::center;

const RNG_DOMAIN: &[u8] = b"gadgetforge-rng";
const BUF_LEN: usize = 136 * 8;

/// Absorb the concatenation of `parts` and return the squeezing reader.
pub fn shake256(parts: &[&[u8]]) -> impl XofReader {
    let mut h = Shake256::default();
    for p in parts {
        h.update(p);
    }
    h.finalize_xof()
}

/// Deterministic random stream seeded by 32 bytes.
pub struct ShakeRng {
    reader: Box<dyn XofReader + Send + Sync>,
    buf: [u8; BUF_LEN],
    pos: usize,
}

impl ShakeRng {
    pub fn from_seed_bytes(seed: &[u8]) -> Self {
        let mut h = Shake256::default();
        h.update(RNG_DOMAIN);
        h.update(seed);
        Self { reader: Box::new(h.finalize_xof()), buf: [0; BUF_LEN], pos: BUF_LEN }
    }

    /// Independent child stream, e.g. one per worker or per trial index.
    pub fn derive(seed: &[u8; 32], index: u64) -> Self {
        let mut material = seed.to_vec();
        material.extend_from_slice(&index.to_be_bytes());
        Self::from_seed_bytes(&material)
    }

    fn refill(&mut self) {
        self.reader.read(&mut self.buf);
        self.pos = 0;
    }
}

impl std::fmt::Debug for ShakeRng {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("ShakeRng")
    }
}

impl RngCore for ShakeRng {
    fn next_u32(&mut self) -> u32 {
        let mut b = [0u8; 4];
        self.fill_bytes(&mut b);
        u32::from_le_bytes(b)
    }

    fn next_u64(&mut self) -> u64 {
        if self.pos + 8 > BUF_LEN {
            self.refill();
        }
        let v = u64::from_le_bytes(self.buf[self.pos..self.pos + 8].try_into().unwrap());
        self.pos += 8;
        v
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        let mut off = 0;
        while off < dest.len() {
            if self.pos == BUF_LEN {
                self.refill();
            }
            let take = (dest.len() - off).min(BUF_LEN - self.pos);
            dest[off..off + take].copy_from_slice(&self.buf[self.pos..self.pos + take]);
            self.pos += take;
            off += take;
        }
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand_core::Error> {
        self.fill_bytes(dest);
        Ok(())
    }
}

impl CryptoRng for ShakeRng {}

impl SeedableRng for ShakeRng {
    type Seed = [u8; 32];

    fn from_seed(seed: [u8; 32]) -> Self {
        Self::from_seed_bytes(&seed)
    }
}

/// Read `n` coefficients uniform over the centered `Z_Q` from an XOF stream.
///
/// Each candidate is a 16-bit big-endian chunk `t`; chunks with
/// `t >= floor(2^16 / Q) * Q` are discarded and accepted ones map to
/// `center(t mod Q)`.
pub fn sample_uniform_mod(reader: &mut impl XofReader, n: usize, modulus: i64) -> Vec<i64> {
    assert!((2..=1 << 16).contains(&modulus));
    let bound = acceptance_bound(modulus);
    let mut out = Vec::with_capacity(n);
    let mut chunk = [0u8; 2 * 64];
    while out.len() < n {
        reader.read(&mut chunk);
        for pair in chunk.chunks_exact(2) {
            let t = u16::from_be_bytes([pair[0], pair[1]]) as i64;
            if t < bound {
                out.push(center(t % modulus, modulus));
                if out.len() == n {
                    break;
                }
            }
        }
    }
    out
}

/// `floor(2^16 / Q) * Q`.
pub fn acceptance_bound(modulus: i64) -> i64 {
    (65536 / modulus) * modulus
}

/// `u = H(msg, salt)`: SHAKE256(salt || msg) squeezed into `n` centered residues.
pub fn hash_to_point(msg: &[u8], salt: &[u8], n: usize, modulus: i64) -> Vec<i64> {
    let mut reader = shake256(&[salt, msg]);
    sample_uniform_mod(&mut reader, n, modulus)
}

/// Public ring element derived from a 32-byte seed: SHAKE256(seed).
pub fn expand_seed(seed: &[u8; 32], n: usize, modulus: i64) -> Vec<i64> {
    let mut reader = shake256(&[seed]);
    sample_uniform_mod(&mut reader, n, modulus)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn acceptance_bounds() {
        assert_eq!(acceptance_bound(16384), 65536);
        assert_eq!(acceptance_bound(16000), 64000);
        assert_eq!(acceptance_bound(32400), 64800);
    }

    #[test]
    fn rng_is_deterministic() {
        let mut a = ShakeRng::from_seed([3; 32]);
        let mut b = ShakeRng::from_seed([3; 32]);
        let mut c = ShakeRng::from_seed([4; 32]);
        let va: Vec<u64> = (0..300).map(|_| a.next_u64()).collect();
        let vb: Vec<u64> = (0..300).map(|_| b.next_u64()).collect();
        let vc: Vec<u64> = (0..300).map(|_| c.next_u64()).collect();
        assert_eq!(va, vb);
        assert_ne!(va, vc);
    }

    #[test]
    fn mixed_reads_follow_one_stream() {
        let mut a = ShakeRng::from_seed([9; 32]);
        let mut b = ShakeRng::from_seed([9; 32]);
        let mut bytes = [0u8; 2000];
        a.fill_bytes(&mut bytes);
        let mut other = [0u8; 2000];
        for chunk in other.chunks_mut(7) {
            b.fill_bytes(chunk);
        }
        assert_eq!(bytes, other);
    }

    #[test]
    fn hash_is_deterministic_and_centered() {
        let u1 = hash_to_point(b"msg", &[1u8; 40], 701, 16384);
        let u2 = hash_to_point(b"msg", &[1u8; 40], 701, 16384);
        assert_eq!(u1, u2);
        assert_eq!(u1.len(), 701);
        assert!(u1.iter().all(|&c| (-8192..8192).contains(&c)));
        let u3 = hash_to_point(b"msh", &[1u8; 40], 701, 16384);
        assert_ne!(u1, u3);
    }

    #[test]
    fn expand_respects_rejection() {
        let a = expand_seed(&[5; 32], 512, 16000);
        assert!(a.iter().all(|&c| (-8000..8000).contains(&c)));
    }
}
