//! Netpbm graymap (PGM) decoding and encoding.
//!
//! Both the binary `P5` and ASCII `P2` variants are read, with `#` comments
//! allowed anywhere in the header. Samples with a maxval above 255 are scaled
//! to 8 bits as `v * 255 / maxval`. Output is always `P5` with maxval 255.

use super::RasterImage;
use crate::error::{Error, Result};

fn decode_err(msg: impl Into<String>) -> Error {
    Error::Decode(msg.into())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn next_uint(&mut self, what: &str) -> Result<usize> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(if self.pos >= self.bytes.len() {
                decode_err(format!("truncated: missing {what}"))
            } else {
                decode_err(format!("malformed header: expected {what}"))
            });
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| decode_err(format!("{what} out of range")))
    }
}

pub fn read_pgm(bytes: &[u8]) -> Result<RasterImage> {
    if bytes.len() < 2 {
        return Err(decode_err("truncated: missing magic number"));
    }
    let binary = match &bytes[..2] {
        b"P5" => true,
        b"P2" => false,
        other => {
            return Err(decode_err(format!(
                "unsupported magic {:?}",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let mut cur = Cursor { bytes, pos: 2 };
    if cur.pos < bytes.len() && !bytes[cur.pos].is_ascii_whitespace() && bytes[cur.pos] != b'#' {
        return Err(decode_err("malformed header after magic"));
    }
    let width = cur.next_uint("width")?;
    let height = cur.next_uint("height")?;
    let maxval = cur.next_uint("maxval")?;
    if width == 0 || height == 0 {
        return Err(decode_err(format!("invalid dimensions {width}x{height}")));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(decode_err(format!("invalid maxval {maxval}")));
    }
    let n = width
        .checked_mul(height)
        .ok_or_else(|| decode_err("dimensions overflow"))?;

    let mut raw = Vec::with_capacity(n);
    if binary {
        // exactly one whitespace byte separates the header from the raster
        match bytes.get(cur.pos) {
            Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
            Some(_) => return Err(decode_err("malformed header: no separator before raster")),
            None => return Err(decode_err("truncated payload: 0 bytes")),
        }
        let sample_bytes = if maxval > 255 { 2 } else { 1 };
        let need = n * sample_bytes;
        let payload = &bytes[cur.pos..];
        if payload.len() < need {
            return Err(decode_err(format!(
                "truncated payload: {} of {need} bytes",
                payload.len()
            )));
        }
        if sample_bytes == 1 {
            raw.extend(payload[..n].iter().map(|&b| b as usize));
        } else {
            raw.extend(
                payload[..need]
                    .chunks_exact(2)
                    .map(|c| u16::from_be_bytes([c[0], c[1]]) as usize),
            );
        }
    } else {
        for i in 0..n {
            let v = cur.next_uint("sample").map_err(|e| match e {
                Error::Decode(m) if m.starts_with("truncated") => {
                    decode_err(format!("truncated payload: {i} of {n} samples"))
                }
                other => other,
            })?;
            raw.push(v);
        }
    }

    let mut luminance = Vec::with_capacity(n);
    for v in raw {
        if v > maxval {
            return Err(decode_err(format!("sample {v} exceeds maxval {maxval}")));
        }
        let v = if maxval > 255 { v * 255 / maxval } else { v };
        luminance.push(v as u8);
    }
    RasterImage::new(width, height, luminance)
}

pub fn write_pgm(img: &RasterImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}
