//! Run-length coding of 16-bit activation streams.
//!
//! Each pair is a 5-bit count of zeros followed by a 16-bit value, 21 bits in
//! total, packed MSB-first with no gaps. The last byte is zero-padded.
//! A zero arriving after 31 pending zeros is emitted as the pair `(31, 0)`,
//! and trailing zeros close with `(run - 1, 0)`.

use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};

pub const RUN_BITS: u32 = 5;
pub const VALUE_BITS: u32 = 16;
pub const PAIR_BITS: u32 = RUN_BITS + VALUE_BITS;
pub const MAX_RUN: u8 = (1 << RUN_BITS) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RlePair {
    pub run: u8,
    pub value: u16,
}

impl RlePair {
    fn bits(self) -> u32 {
        (u32::from(self.run) << VALUE_BITS) | u32::from(self.value)
    }

    fn from_bits(bits: u32) -> Self {
        Self {
            run: (bits >> VALUE_BITS) as u8,
            value: bits as u16,
        }
    }
}

/// MSB-first bit packer that hands complete bytes to `out` as they form.
struct BitWriter<W: Write> {
    out: W,
    acc: u64,
    len: u32,
}

impl<W: Write> BitWriter<W> {
    fn push(&mut self, bits: u32, width: u32) -> io::Result<()> {
        self.acc = (self.acc << width) | u64::from(bits);
        self.len += width;
        while self.len >= 8 {
            self.len -= 8;
            self.out.write_all(&[(self.acc >> self.len) as u8])?;
        }
        self.acc &= (1 << self.len) - 1;
        Ok(())
    }

    fn flush(mut self) -> io::Result<W> {
        if self.len > 0 {
            self.out.write_all(&[(self.acc << (8 - self.len)) as u8])?;
        }
        Ok(self.out)
    }
}

/// Single-pass encoder. Memory use does not depend on the stream length.
pub struct RleEncoder<W: Write> {
    bits: BitWriter<W>,
    run: u8,
    pairs: u64,
}

impl<W: Write> RleEncoder<W> {
    pub fn new(out: W) -> Self {
        Self {
            bits: BitWriter { out, acc: 0, len: 0 },
            run: 0,
            pairs: 0,
        }
    }

    fn emit(&mut self, pair: RlePair) -> io::Result<()> {
        self.pairs += 1;
        self.bits.push(pair.bits(), PAIR_BITS)
    }

    pub fn push(&mut self, word: u16) -> io::Result<()> {
        if word != 0 {
            let run = std::mem::take(&mut self.run);
            return self.emit(RlePair { run, value: word });
        }
        if self.run == MAX_RUN {
            self.run = 0;
            return self.emit(RlePair { run: MAX_RUN, value: 0 });
        }
        self.run += 1;
        Ok(())
    }

    /// Pairs emitted so far.
    pub fn pairs(&self) -> u64 {
        self.pairs
    }

    /// Emits any pending zeros and the final partial byte.
    pub fn finish(mut self) -> io::Result<W> {
        if self.run > 0 {
            let run = self.run - 1;
            self.emit(RlePair { run, value: 0 })?;
        }
        self.bits.flush()
    }
}

pub fn rle_encode(stream: &[u16]) -> Vec<u8> {
    let mut enc = RleEncoder::new(Vec::with_capacity(stream.len() * 3));
    for &w in stream {
        enc.push(w).expect("writing to a Vec cannot fail");
    }
    enc.finish().expect("writing to a Vec cannot fail")
}

/// Unpacks the pairs of an encoded buffer.
pub fn rle_pairs(bytes: &[u8]) -> Result<Vec<RlePair>> {
    let total = bytes.len() * 8;
    let count = total / PAIR_BITS as usize;
    let dangling = total - count * PAIR_BITS as usize;
    let truncated = || Error::TruncatedStream { pairs: count, dangling };
    if dangling >= 8 {
        return Err(truncated());
    }
    let mut pairs = Vec::with_capacity(count);
    let mut acc: u64 = 0;
    let mut len = 0u32;
    for &b in bytes {
        acc = (acc << 8) | u64::from(b);
        len += 8;
        if len >= PAIR_BITS && pairs.len() < count {
            len -= PAIR_BITS;
            pairs.push(RlePair::from_bits((acc >> len) as u32 & ((1 << PAIR_BITS) - 1)));
            acc &= (1 << len) - 1;
        }
    }
    if acc != 0 {
        return Err(truncated());
    }
    Ok(pairs)
}

pub fn rle_decode(bytes: &[u8]) -> Result<Vec<u16>> {
    let mut out = Vec::new();
    for pair in rle_pairs(bytes)? {
        out.extend(std::iter::repeat_n(0, usize::from(pair.run)));
        out.push(pair.value);
    }
    Ok(out)
}

/// `16·n / (21·pairs)`, ignoring the final byte's padding.
pub fn compression_ratio(stream: &[u16]) -> Result<f64> {
    if stream.is_empty() {
        return Err(Error::InvalidArgument("compression ratio of an empty stream".into()));
    }
    let mut enc = RleEncoder::new(io::sink());
    for &w in stream {
        enc.push(w).expect("sink cannot fail");
    }
    let pending = u64::from(enc.run > 0);
    let pairs = enc.pairs() + pending;
    Ok((u64::from(VALUE_BITS) * stream.len() as u64) as f64 / (u64::from(PAIR_BITS) * pairs) as f64)
}
