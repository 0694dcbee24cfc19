//! Portable float map images.
//!
//! Header `Pf` (grayscale) or `PF` (RGB), then `width height`, then the
//! scale `-1.0` marking little-endian data. Rows are stored bottom to top.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Writes a grayscale PFM. `values` are row-major, top row first.
pub fn write_pfm_gray<T: Real, W: Write>(
    width: usize,
    height: usize,
    values: &[T],
    out: W,
) -> io::Result<()> {
    write_pfm(width, height, 1, values, out)
}

/// Writes a PFM with 1 or 3 interleaved channels.
pub fn write_pfm<T: Real, W: Write>(
    width: usize,
    height: usize,
    channels: usize,
    values: &[T],
    mut out: W,
) -> io::Result<()> {
    assert!(
        channels == 1 || channels == 3,
        "PFM supports 1 or 3 channels"
    );
    assert_eq!(values.len(), width * height * channels);
    let tag = if channels == 1 { "Pf" } else { "PF" };
    write!(out, "{tag}\n{width} {height}\n-1.0\n")?;
    let row = width * channels;
    let mut buf = Vec::with_capacity(4 * values.len());
    for y in (0..height).rev() {
        for &v in &values[y * row..(y + 1) * row] {
            buf.extend_from_slice(&v.to_f32().unwrap_or(f32::NAN).to_le_bytes());
        }
    }
    out.write_all(&buf)
}

/// Decoded PFM, row-major and top row first.
#[derive(Clone, Debug, PartialEq)]
pub struct PfmImage {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub data: Vec<f32>,
}

/// Reads a PFM of either endianness.
pub fn read_pfm(bytes: &[u8]) -> Result<PfmImage> {
    const FMT: &str = "PFM";
    let mut pos = 0;
    let mut token = || -> Result<(String, usize)> {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::format(FMT, start, "truncated header"));
        }
        let t = std::str::from_utf8(&bytes[start..pos])
            .map_err(|_| Error::format(FMT, start, "header is not ASCII"))?;
        Ok((t.to_string(), start))
    };
    let (tag, at) = token()?;
    let channels = match tag.as_str() {
        "Pf" => 1,
        "PF" => 3,
        _ => return Err(Error::format(FMT, at, format!("bad tag `{tag}`"))),
    };
    let mut number = |what: &str| -> Result<(f64, usize)> {
        let (t, at) = token()?;
        t.parse::<f64>()
            .map(|v| (v, at))
            .map_err(|_| Error::format(FMT, at, format!("bad {what} `{t}`")))
    };
    let (w, at_w) = number("width")?;
    let (h, at_h) = number("height")?;
    let (scale, at_s) = number("scale")?;
    if w < 1.0 || w.fract() != 0.0 {
        return Err(Error::format(FMT, at_w, "width must be a positive integer"));
    }
    if h < 1.0 || h.fract() != 0.0 {
        return Err(Error::format(
            FMT,
            at_h,
            "height must be a positive integer",
        ));
    }
    if scale == 0.0 {
        return Err(Error::format(FMT, at_s, "scale must be nonzero"));
    }
    let (width, height) = (w as usize, h as usize);
    // Exactly one whitespace byte separates the header from the raster.
    let start = pos + 1;
    let expected = width * height * channels * 4;
    if bytes.len() < start || bytes.len() - start != expected {
        return Err(Error::format(
            FMT,
            start.min(bytes.len()),
            format!("expected {expected} raster bytes"),
        ));
    }
    let little = scale < 0.0;
    let floats: Vec<f32> = bytes[start..]
        .chunks_exact(4)
        .map(|c| {
            let b: [u8; 4] = c.try_into().unwrap();
            if little {
                f32::from_le_bytes(b)
            } else {
                f32::from_be_bytes(b)
            }
        })
        .collect();
    let row = width * channels;
    let mut data = Vec::with_capacity(floats.len());
    for y in (0..height).rev() {
        data.extend_from_slice(&floats[y * row..(y + 1) * row]);
    }
    Ok(PfmImage {
        width,
        height,
        channels,
        data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_round_trip_and_header() {
        let values: Vec<f64> = (0..6).map(f64::from).collect();
        let mut buf = Vec::new();
        write_pfm_gray(3, 2, &values, &mut buf).unwrap();
        assert!(buf.starts_with(b"Pf\n3 2\n-1.0\n"));
        // Bottom row is stored first.
        assert_eq!(&buf[12..16], &3.0f32.to_le_bytes());
        let img = read_pfm(&buf).unwrap();
        assert_eq!((img.width, img.height, img.channels), (3, 2, 1));
        assert_eq!(img.data, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn big_endian_input() {
        let mut buf = b"PF\n1 1\n1.0\n".to_vec();
        for v in [0.5f32, 0.25, 1.0] {
            buf.extend_from_slice(&v.to_be_bytes());
        }
        let img = read_pfm(&buf).unwrap();
        assert_eq!(img.data, vec![0.5, 0.25, 1.0]);
    }

    #[test]
    fn truncated_raster() {
        let mut buf = Vec::new();
        write_pfm_gray(2, 2, &[0.0f32; 4], &mut buf).unwrap();
        buf.pop();
        assert!(matches!(read_pfm(&buf), Err(Error::Format { .. })));
        assert!(read_pfm(b"P6\n1 1\n255\n").is_err());
    }
}
