//! Stable 64-bit hashing for anything that must not drift between builds.
//!
//! The hash is FNV-1a over the input bytes followed by the SplitMix64
//! finalizer. FNV alone has weak low bits, which matters when the result is
//! reduced modulo a small bucket count; the finalizer fixes that. Both steps
//! are fully specified here so label files can be regenerated bit-for-bit
//! from any implementation.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hash of `seed` (little-endian bytes) followed by each part, with a 0xff
/// separator between parts so ("ab","c") and ("a","bc") differ.
pub fn stable_hash(seed: u64, parts: &[&str]) -> u64 {
    let mut buf = Vec::with_capacity(8 + parts.iter().map(|p| p.len() + 1).sum::<usize>());
    buf.extend_from_slice(&seed.to_le_bytes());
    for (i, part) in parts.iter().enumerate() {
        if i > 0 {
            buf.push(0xff);
        }
        buf.extend_from_slice(part.as_bytes());
    }
    splitmix64(fnv1a64(&buf))
}
