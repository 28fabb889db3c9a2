//! Binary (P5) grayscale PGM.

use std::path::Path;

use super::container::{read_bytes, write_bytes};
use crate::error::{Result, ScsError};

#[derive(Debug, Clone, PartialEq)]
pub struct PgmImage {
    pub width: usize,
    pub height: usize,
    /// 255 or 65535.
    pub maxval: u16,
    /// Raw samples in raster order.
    pub samples: Vec<u16>,
}

impl PgmImage {
    /// Samples divided by `maxval`.
    pub fn scaled(&self) -> Vec<f64> {
        let m = self.maxval as f64;
        self.samples.iter().map(|&v| v as f64 / m).collect()
    }
}

/// `v` clipped to `[0, 1]`, scaled by `maxval` and rounded half up.
pub fn quantize(v: f64, maxval: u16) -> u16 {
    let c = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
    (c * maxval as f64 + 0.5).floor() as u16
}

fn skip_space_and_comments(bytes: &[u8], mut pos: usize) -> usize {
    loop {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
        } else {
            return pos;
        }
    }
}

fn header_number(bytes: &[u8], pos: &mut usize, what: &str) -> Result<usize> {
    *pos = skip_space_and_comments(bytes, *pos);
    let start = *pos;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        *pos += 1;
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| ScsError::Format(format!("PGM header: bad {what}")))
}

pub fn decode_pgm(bytes: &[u8]) -> Result<PgmImage> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(ScsError::Format("not a binary PGM (P5) file".into()));
    }
    let mut pos = 2;
    let width = header_number(bytes, &mut pos, "width")?;
    let height = header_number(bytes, &mut pos, "height")?;
    let maxval = header_number(bytes, &mut pos, "maxval")?;
    if width == 0 || height == 0 {
        return Err(ScsError::Format(format!("PGM has empty size {width}x{height}")));
    }
    let wide = match maxval {
        255 => false,
        65535 => true,
        m => {
            return Err(ScsError::Format(format!(
                "PGM maxval {m} unsupported (need 255 or 65535)"
            )))
        }
    };
    // Exactly one whitespace byte separates the header from the raster.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(ScsError::Format("PGM header not terminated".into()));
    }
    let raster = &bytes[pos + 1..];
    let count = width * height;
    let need = if wide { 2 * count } else { count };
    if raster.len() < need {
        return Err(ScsError::Format(format!(
            "PGM raster has {} bytes, needs {need}",
            raster.len()
        )));
    }
    let samples = if wide {
        raster[..need]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect()
    } else {
        raster[..need].iter().map(|&b| b as u16).collect()
    };
    Ok(PgmImage {
        width,
        height,
        maxval: maxval as u16,
        samples,
    })
}

pub fn encode_pgm(img: &PgmImage) -> Result<Vec<u8>> {
    if img.samples.len() != img.width * img.height {
        return Err(ScsError::InvalidShape(format!(
            "{} samples for a {}x{} image",
            img.samples.len(),
            img.width,
            img.height
        )));
    }
    let mut out = format!("P5\n{} {}\n{}\n", img.width, img.height, img.maxval).into_bytes();
    match img.maxval {
        255 => out.extend(img.samples.iter().map(|&v| v.min(255) as u8)),
        65535 => img.samples.iter().for_each(|v| out.extend_from_slice(&v.to_be_bytes())),
        m => return Err(ScsError::Format(format!("PGM maxval {m} unsupported"))),
    }
    Ok(out)
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<PgmImage> {
    let path = path.as_ref();
    decode_pgm(&read_bytes(path)?).map_err(|e| match e {
        ScsError::Format(m) => ScsError::Format(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn write_pgm(path: impl AsRef<Path>, img: &PgmImage) -> Result<()> {
    write_bytes(path.as_ref(), &encode_pgm(img)?)
}

/// An 8-bit preview of `values` (raster order), clipped to `[0, 1]`.
pub fn preview_8bit(width: usize, height: usize, values: &[f64]) -> PgmImage {
    PgmImage {
        width,
        height,
        maxval: 255,
        samples: values.iter().map(|&v| quantize(v, 255)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_rounds_up() {
        assert_eq!(quantize(0.5, 255), 128);
        assert_eq!(quantize(-0.2, 255), 0);
        assert_eq!(quantize(1.7, 255), 255);
        assert_eq!(quantize(f64::NAN, 255), 0);
        assert_eq!(quantize(1.0, 65535), 65535);
    }

    #[test]
    fn eight_bit_integer_round_trip_is_lossless() {
        let img = PgmImage {
            width: 16,
            height: 16,
            maxval: 255,
            samples: (0..256).collect(),
        };
        let back = decode_pgm(&encode_pgm(&img).unwrap()).unwrap();
        assert_eq!(back, img);
        let requantized = preview_8bit(16, 16, &back.scaled());
        assert_eq!(requantized, img);
    }

    #[test]
    fn sixteen_bit_is_big_endian() {
        let img = PgmImage {
            width: 2,
            height: 1,
            maxval: 65535,
            samples: vec![0x0102, 65535],
        };
        let bytes = encode_pgm(&img).unwrap();
        assert_eq!(&bytes[bytes.len() - 4..], &[1, 2, 255, 255]);
        let back = decode_pgm(&bytes).unwrap();
        assert_eq!(back.scaled(), vec![258.0 / 65535.0, 1.0]);
    }

    #[test]
    fn header_comments_are_skipped() {
        let mut bytes = b"P5 # made by hand\n2 # w\n1\n255\n".to_vec();
        bytes.extend_from_slice(&[0, 255]);
        let img = decode_pgm(&bytes).unwrap();
        assert_eq!((img.width, img.height), (2, 1));
        assert_eq!(img.scaled(), vec![0.0, 1.0]);
    }

    #[test]
    fn rejects_other_formats() {
        assert!(matches!(decode_pgm(b"P2\n1 1\n255\n0"), Err(ScsError::Format(_))));
        assert!(matches!(decode_pgm(b"P5\n1 1\n100\n\x00"), Err(ScsError::Format(_))));
        assert!(matches!(decode_pgm(b"P5\n2 2\n255\n\x00"), Err(ScsError::Format(_))));
    }
}
