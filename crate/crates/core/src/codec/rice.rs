//! Golomb-Rice coding of signed coefficients.
//!
//! Each coefficient is written as a sign bit (1 = negative), the low `k` bits
//! of its magnitude MSB-first, then the high part `|x| >> k` in unary as that
//! many zeros terminated by a one.

use super::bits::{BitReader, BitWriter};
use crate::error::{Error, Result};

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedEncoding(msg.into())
}

pub fn encode(coeffs: &[i64], k: u32, bound: i64) -> Result<Vec<u8>> {
    let mut w = BitWriter::new();
    encode_into(&mut w, coeffs, k, bound)?;
    Ok(w.finish())
}

pub fn encode_into(w: &mut BitWriter, coeffs: &[i64], k: u32, bound: i64) -> Result<()> {
    for &x in coeffs {
        if x.abs() > bound {
            return Err(Error::InvalidParameter(format!("coefficient {x} exceeds bound {bound}")));
        }
        let mag = x.unsigned_abs();
        w.push_bit(x < 0);
        w.push_bits(mag, k);
        for _ in 0..(mag >> k) {
            w.push_bit(false);
        }
        w.push_bit(true);
    }
    Ok(())
}

/// Decode exactly `count` coefficients and require that nothing but zero padding follows.
pub fn decode(data: &[u8], count: usize, k: u32, bound: i64) -> Result<Vec<i64>> {
    let mut r = BitReader::new(data);
    let out = decode_from(&mut r, count, k, bound)?;
    if !r.at_clean_end() {
        return Err(malformed("trailing data after coefficients"));
    }
    Ok(out)
}

pub fn decode_from(r: &mut BitReader<'_>, count: usize, k: u32, bound: i64) -> Result<Vec<i64>> {
    let max_high = (bound as u64) >> k;
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let neg = r.read_bit().ok_or_else(|| malformed("truncated coefficient stream"))?;
        let low = r.read_bits(k).ok_or_else(|| malformed("truncated coefficient stream"))?;
        let mut high = 0u64;
        loop {
            match r.read_bit() {
                Some(true) => break,
                Some(false) => {
                    high += 1;
                    if high > max_high {
                        return Err(malformed(format!("coefficient {i} exceeds bound")));
                    }
                }
                None => return Err(malformed("truncated coefficient stream")),
            }
        }
        let mag = (high << k) | low;
        if mag as i64 > bound {
            return Err(malformed(format!("coefficient {i} exceeds bound")));
        }
        if neg && mag == 0 {
            return Err(malformed("negative zero"));
        }
        out.push(if neg { -(mag as i64) } else { mag as i64 });
    }
    Ok(out)
}

/// Expected code length in bits for a centered discrete Gaussian of deviation `std`.
pub fn expected_bits(std: f64, k: u32) -> f64 {
    let cut = (10.0 * std).ceil() as i64;
    let (mut num, mut den) = (0.0, 0.0);
    for x in -cut..=cut {
        let w = (-(x * x) as f64 / (2.0 * std * std)).exp();
        num += w * (k as f64 + 2.0 + (x.unsigned_abs() >> k) as f64);
        den += w;
    }
    num / den
}

/// Rice parameter for deviation `std`: start from `round(log2 std) - 1`, refine within +-2.
pub fn parameter_for(std: f64) -> u32 {
    let start = (std.log2().round() as i64 - 1).max(0);
    ((start - 2).max(0)..=start + 2)
        .map(|k| k as u32)
        .min_by(|&a, &b| expected_bits(std, a).total_cmp(&expected_bits(std, b)))
        .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_costs_k_plus_two() {
        let out = encode(&[0; 8], 6, 100).unwrap();
        assert_eq!(out.len(), 8);
        assert!(out.iter().all(|&b| b == 0b0000_0001));
        assert_eq!(decode(&out, 8, 6, 100).unwrap(), vec![0; 8]);
    }

    #[test]
    fn hand_encoded() {
        // k = 2: -5 -> 1 01 0 1 ; 3 -> 0 11 1
        let out = encode(&[-5, 3], 2, 100).unwrap();
        assert_eq!(out, vec![0b1010_1011, 0b1000_0000]);
    }

    #[test]
    fn rejects_malformed() {
        // negative zero
        assert!(decode(&[0b1001_0000], 1, 2, 100).is_err());
        // nonzero padding
        assert!(decode(&[0b0001_0001], 1, 2, 100).is_err());
        // extra byte
        assert!(decode(&[0b0001_0000, 0], 1, 2, 100).is_err());
        // truncated
        assert!(decode(&[0b0000_0000], 1, 2, 100).is_err());
        // over the bound
        let big = encode(&[40], 2, 100).unwrap();
        assert!(decode(&big, 1, 2, 39).is_err());
        assert!(encode(&[101], 2, 100).is_err());
    }

    #[test]
    fn parameter_choice() {
        for std in [3.0, 449.8, 841.5] {
            let k = parameter_for(std);
            for other in 0..16 {
                let start = (std.log2().round() as i64 - 1).max(0) as u32;
                if other + 2 >= start && other <= start + 2 {
                    assert!(expected_bits(std, k) <= expected_bits(std, other) + 1e-12);
                }
            }
        }
        assert_eq!(parameter_for(449.8), 8);
    }

    proptest! {
        #[test]
        fn round_trip(v in proptest::collection::vec(-5000i64..=5000, 0..200), k in 0u32..12) {
            let bytes = encode(&v, k, 5000).unwrap();
            prop_assert_eq!(decode(&bytes, v.len(), k, 5000).unwrap(), v);
        }

        #[test]
        fn never_panics(data in proptest::collection::vec(any::<u8>(), 0..64), count in 0usize..40, k in 0u32..10) {
            let _ = decode(&data, count, k, 3000);
        }
    }
}
