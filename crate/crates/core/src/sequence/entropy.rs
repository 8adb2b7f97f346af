//! Compression-based entropy rate estimates.
//!
//! With `s(n)` the compressed size in bits of the first `n` token streams
//! concatenated, `(s(n2) - s(n1)) / (n2 - n1)` approximates the information
//! content of one more sketch once the compressor has warmed up.

use std::io::Write;

use xz2::stream::{Check, Stream};
use xz2::write::XzEncoder;

use super::SequenceError;

/// A deterministic lossless byte compressor.
pub trait Codec {
    fn name(&self) -> &str;
    fn compress(&self, data: &[u8]) -> Result<Vec<u8>, SequenceError>;
}

/// xz container, LZMA2 at maximum preset with the extreme flag.
#[derive(Clone, Copy, Debug, Default)]
pub struct Lzma;

const LZMA_PRESET_EXTREME: u32 = 0x8000_0000;

impl Codec for Lzma {
    fn name(&self) -> &str {
        "lzma"
    }

    fn compress(&self, data: &[u8]) -> Result<Vec<u8>, SequenceError> {
        let err = |e: std::io::Error| SequenceError::Codec(e.to_string());
        let stream = Stream::new_easy_encoder(9 | LZMA_PRESET_EXTREME, Check::Crc64)
            .map_err(|e| SequenceError::Codec(e.to_string()))?;
        let mut enc = XzEncoder::new_stream(Vec::new(), stream);
        enc.write_all(data).map_err(err)?;
        enc.finish().map_err(err)
    }
}

/// Bytes per token for a vocabulary of `size` ids: 1, 2 or 4.
pub fn token_width(size: u32) -> usize {
    match size {
        0..=0x100 => 1,
        0x101..=0x1_0000 => 2,
        _ => 4,
    }
}

/// Little-endian fixed-width encoding of a token stream.
pub fn encode_tokens(tokens: &[u32], width: usize, out: &mut Vec<u8>) {
    for &t in tokens {
        out.extend_from_slice(&t.to_le_bytes()[..width]);
    }
}

/// Bits per sketch between prefixes of `n1` and `n2` sketches.
pub fn entropy_rate_estimate(
    corpus: &[Vec<u32>],
    n1: usize,
    n2: usize,
    width: usize,
    codec: &dyn Codec,
) -> Result<f64, SequenceError> {
    if n1 >= n2 || n2 > corpus.len() {
        return Err(SequenceError::InsufficientCorpus {
            n1,
            n2,
            available: corpus.len(),
        });
    }
    let mut bytes = Vec::new();
    let size_at = |n: usize, bytes: &mut Vec<u8>| -> Result<f64, SequenceError> {
        bytes.clear();
        for s in &corpus[..n] {
            encode_tokens(s, width, bytes);
        }
        Ok(codec.compress(bytes)?.len() as f64 * 8.0)
    };
    let s1 = size_at(n1, &mut bytes)?;
    let s2 = size_at(n2, &mut bytes)?;
    Ok((s2 - s1) / (n2 - n1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widths() {
        assert_eq!(token_width(200), 1);
        assert_eq!(token_width(256), 1);
        assert_eq!(token_width(257), 2);
        assert_eq!(token_width(70_000), 4);
        let mut out = Vec::new();
        encode_tokens(&[1, 258], 2, &mut out);
        assert_eq!(out, vec![1, 0, 2, 1]);
    }

    #[test]
    fn lzma_is_deterministic_and_shrinks_repeats() {
        let data = vec![7u8; 10_000];
        let a = Lzma.compress(&data).unwrap();
        assert_eq!(a, Lzma.compress(&data).unwrap());
        assert!(a.len() < 200);
    }

    #[test]
    fn bad_prefixes() {
        let corpus = vec![vec![0u32]; 3];
        for (n1, n2) in [(2, 2), (3, 2), (1, 4)] {
            assert!(matches!(
                entropy_rate_estimate(&corpus, n1, n2, 1, &Lzma),
                Err(SequenceError::InsufficientCorpus { .. })
            ));
        }
    }
}
