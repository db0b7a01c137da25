//! Byte formats for keys and signatures, plus size accounting.
//!
//! Files start with a 4-byte magic, a version byte and the parameter-set id.
//! Public keys pack coefficients in `[0, Q)` at `ceil(log2 Q)` bits each
//! (Eagle prepends the 32-byte seed of `a`). Secret keys pack `f` then `g`
//! as 2-bit trits (`00` = 0, `01` = +1, `10` = -1); Eagle prepends the seed.
//! Signatures are the salt followed by a Golomb-Rice stream of the
//! signature blocks.

pub mod bits;
pub mod rice;

use bits::{BitReader, BitWriter};

use crate::error::{Error, Result};
use crate::params::{ParamSet, Registry, SchemeKind};

pub const FORMAT_VERSION: u8 = 1;
pub const HEADER_LEN: usize = 6;

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedEncoding(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FileKind {
    PublicKey,
    SecretKey,
    Signature,
}

impl FileKind {
    pub fn extension(self, scheme: SchemeKind) -> &'static str {
        match (scheme, self) {
            (SchemeKind::Robin, FileKind::PublicKey) => "rpk",
            (SchemeKind::Robin, FileKind::SecretKey) => "rsk",
            (SchemeKind::Robin, FileKind::Signature) => "rsig",
            (SchemeKind::Eagle, FileKind::PublicKey) => "epk",
            (SchemeKind::Eagle, FileKind::SecretKey) => "esk",
            (SchemeKind::Eagle, FileKind::Signature) => "esig",
        }
    }
}

pub fn magic(scheme: SchemeKind, kind: FileKind) -> [u8; 4] {
    let prefix: &[u8; 2] = match scheme {
        SchemeKind::Robin => b"RB",
        SchemeKind::Eagle => b"EG",
    };
    let suffix: &[u8; 2] = match kind {
        FileKind::PublicKey => b"PK",
        FileKind::SecretKey => b"SK",
        FileKind::Signature => b"SG",
    };
    [prefix[0], prefix[1], suffix[0], suffix[1]]
}

pub fn wrap_file(params: &ParamSet, kind: FileKind, payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.extend_from_slice(&magic(params.scheme, kind));
    out.push(FORMAT_VERSION);
    out.push(params.id);
    out.extend_from_slice(payload);
    out
}

/// Parse a file header; returns the parameter set and the payload.
pub fn unwrap_file<'a, 'r>(data: &'a [u8], kind: FileKind, registry: &'r Registry) -> Result<(&'r ParamSet, &'a [u8])> {
    if data.len() < HEADER_LEN {
        return Err(malformed("file shorter than header"));
    }
    let scheme = SchemeKind::ALL
        .into_iter()
        .find(|&s| data[..4] == magic(s, kind))
        .ok_or_else(|| malformed("bad magic"))?;
    if data[4] != FORMAT_VERSION {
        return Err(malformed(format!("unsupported version {}", data[4])));
    }
    let params = registry.by_id(data[5]).map_err(|_| malformed(format!("unknown parameter set id {}", data[5])))?;
    if params.scheme != scheme {
        return Err(malformed("parameter set does not match file scheme"));
    }
    Ok((params, &data[HEADER_LEN..]))
}

fn pack_mod(w: &mut BitWriter, coeffs: &[i64], modulus: i64, bits: u32) {
    for &c in coeffs {
        w.push_bits(c.rem_euclid(modulus) as u64, bits);
    }
}

fn unpack_mod(r: &mut BitReader<'_>, n: usize, modulus: i64, bits: u32) -> Result<Vec<i64>> {
    (0..n)
        .map(|_| {
            let v = r.read_bits(bits).ok_or_else(|| malformed("truncated public key"))? as i64;
            if v >= modulus {
                return Err(malformed(format!("coefficient {v} not below modulus")));
            }
            Ok(crate::ring::center(v, modulus))
        })
        .collect()
}

fn check_len(what: &str, got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(malformed(format!("{what}: {got} bytes, expected {expected}")));
    }
    Ok(())
}

/// Public key payload (no file header).
pub fn encode_public_key(params: &ParamSet, seed: Option<&[u8; 32]>, poly: &[i64]) -> Result<Vec<u8>> {
    if poly.len() != params.n {
        return Err(Error::LengthMismatch { expected: params.n, got: poly.len() });
    }
    let mut out = Vec::with_capacity(params.public_key_bytes());
    match (params.scheme, seed) {
        (SchemeKind::Eagle, Some(s)) => out.extend_from_slice(s),
        (SchemeKind::Robin, None) => {}
        _ => return Err(Error::InvalidParameter("seed present iff the scheme is Eagle".into())),
    }
    let mut w = BitWriter::new();
    pack_mod(&mut w, poly, params.modulus, params.modulus_bits());
    out.extend(w.finish());
    Ok(out)
}

pub fn decode_public_key(params: &ParamSet, data: &[u8]) -> Result<(Option<[u8; 32]>, Vec<i64>)> {
    check_len("public key", data.len(), params.public_key_bytes())?;
    let (seed, rest) = match params.scheme {
        SchemeKind::Eagle => (Some(data[..32].try_into().unwrap()), &data[32..]),
        SchemeKind::Robin => (None, data),
    };
    let mut r = BitReader::new(rest);
    let poly = unpack_mod(&mut r, params.n, params.modulus, params.modulus_bits())?;
    if !r.at_clean_end() {
        return Err(malformed("nonzero public key padding"));
    }
    Ok((seed, poly))
}

pub fn secret_key_bytes(params: &ParamSet) -> usize {
    let seed = if params.scheme == SchemeKind::Eagle { params.seed_bytes } else { 0 };
    seed + (4 * params.n).div_ceil(8)
}

pub fn encode_secret_key(params: &ParamSet, seed: Option<&[u8; 32]>, f: &[i64], g: &[i64]) -> Result<Vec<u8>> {
    for v in [f, g] {
        if v.len() != params.n {
            return Err(Error::LengthMismatch { expected: params.n, got: v.len() });
        }
    }
    let mut out = Vec::with_capacity(secret_key_bytes(params));
    match (params.scheme, seed) {
        (SchemeKind::Eagle, Some(s)) => out.extend_from_slice(s),
        (SchemeKind::Robin, None) => {}
        _ => return Err(Error::InvalidParameter("seed present iff the scheme is Eagle".into())),
    }
    let mut w = BitWriter::new();
    for &c in f.iter().chain(g) {
        let t = match c {
            0 => 0b00,
            1 => 0b01,
            -1 => 0b10,
            _ => return Err(Error::InvalidParameter(format!("secret coefficient {c} is not ternary"))),
        };
        w.push_bits(t, 2);
    }
    out.extend(w.finish());
    Ok(out)
}

pub fn decode_secret_key(params: &ParamSet, data: &[u8]) -> Result<(Option<[u8; 32]>, Vec<i64>, Vec<i64>)> {
    check_len("secret key", data.len(), secret_key_bytes(params))?;
    let (seed, rest) = match params.scheme {
        SchemeKind::Eagle => (Some(data[..32].try_into().unwrap()), &data[32..]),
        SchemeKind::Robin => (None, data),
    };
    let mut r = BitReader::new(rest);
    let mut trits = Vec::with_capacity(2 * params.n);
    for _ in 0..2 * params.n {
        trits.push(match r.read_bits(2).ok_or_else(|| malformed("truncated secret key"))? {
            0b00 => 0,
            0b01 => 1,
            0b10 => -1,
            _ => return Err(malformed("invalid trit 11")),
        });
    }
    if !r.at_clean_end() {
        return Err(malformed("nonzero secret key padding"));
    }
    let g = trits.split_off(params.n);
    Ok((seed, trits, g))
}

/// Golomb-Rice parameter of a parameter set.
pub fn rice_parameter(params: &ParamSet) -> u32 {
    rice::parameter_for(params.s)
}

/// Signature payload: salt followed by the coded blocks.
pub fn encode_signature(params: &ParamSet, salt: &[u8], blocks: &[Vec<i64>]) -> Result<Vec<u8>> {
    if salt.len() != params.salt_bytes {
        return Err(Error::LengthMismatch { expected: params.salt_bytes, got: salt.len() });
    }
    if blocks.len() != params.scheme.signature_blocks() {
        return Err(Error::LengthMismatch { expected: params.scheme.signature_blocks(), got: blocks.len() });
    }
    let k = rice_parameter(params);
    let mut w = BitWriter::new();
    for b in blocks {
        if b.len() != params.n {
            return Err(Error::LengthMismatch { expected: params.n, got: b.len() });
        }
        rice::encode_into(&mut w, b, k, params.coeff_bound())?;
    }
    let mut out = salt.to_vec();
    out.extend(w.finish());
    Ok(out)
}

pub fn decode_signature(params: &ParamSet, data: &[u8]) -> Result<(Vec<u8>, Vec<Vec<i64>>)> {
    if data.len() < params.salt_bytes {
        return Err(malformed("signature shorter than salt"));
    }
    let (salt, body) = data.split_at(params.salt_bytes);
    let k = rice_parameter(params);
    let mut r = BitReader::new(body);
    let mut blocks = Vec::with_capacity(params.scheme.signature_blocks());
    for _ in 0..params.scheme.signature_blocks() {
        blocks.push(rice::decode_from(&mut r, params.n, k, params.coeff_bound())?);
    }
    if !r.at_clean_end() {
        return Err(malformed("trailing signature data"));
    }
    Ok((salt.to_vec(), blocks))
}

/// Entropic signature size in bytes, salt included.
pub fn entropy_estimate(params: &ParamSet) -> usize {
    params.entropy_estimate()
}
