//! PGM rasters and the `PWP1` polar matrix format.
//!
//! `PWP1` layout:
//!
//! ```text
//! PWP1\n
//! <n1> <n2> <num>/<den> <r_max>\n
//! <n1 * n2 little-endian f64, row-major>
//! ```
//!
//! `num/den` is `1/2` (uniform area) or `1/1` (uniform radial); `r_max` uses
//! the shortest decimal that parses back to the same `f64`.

use std::fs;
use std::path::Path;

use crate::convert::{CartesianImage, PolarImage};
use crate::error::{Error, Result};
use crate::geometry::{MeasureKind, PolarGrid};
use crate::matrix::Matrix;

pub const POLAR_MAGIC: &str = "PWP1";
const MAX_LINE: usize = 70;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PgmMode {
    /// ASCII.
    P2,
    /// Binary.
    #[default]
    P5,
}

/// Round half up, then clamp to `[0, 255]`.
pub fn quantize(v: f64) -> u8 {
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

pub fn encode_pgm(img: &CartesianImage, mode: PgmMode) -> Result<Vec<u8>> {
    img.pixels().check_finite()?;
    let (rows, cols) = (img.rows(), img.cols());
    let magic = match mode {
        PgmMode::P2 => "P2",
        PgmMode::P5 => "P5",
    };
    let mut out = format!("{magic}\n{cols} {rows}\n255\n").into_bytes();
    match mode {
        PgmMode::P5 => out.extend(img.pixels().as_slice().iter().map(|&v| quantize(v))),
        PgmMode::P2 => {
            for i in 0..rows {
                let mut line = String::new();
                for j in 0..cols {
                    let token = quantize(img.get(i, j)).to_string();
                    if !line.is_empty() && line.len() + 1 + token.len() > MAX_LINE {
                        out.extend_from_slice(line.as_bytes());
                        out.push(b'\n');
                        line.clear();
                    }
                    if !line.is_empty() {
                        line.push(' ');
                    }
                    line.push_str(&token);
                }
                out.extend_from_slice(line.as_bytes());
                out.push(b'\n');
            }
        }
    }
    Ok(out)
}

/// Splits header tokens off `bytes`, skipping whitespace and `#` comments.
struct HeaderScanner<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderScanner<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn token(&mut self) -> Option<&'a str> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).ok()
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.token()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Format(format!("missing or invalid {what}")))
    }
}

pub fn decode_pgm(bytes: &[u8]) -> Result<CartesianImage> {
    let mut scan = HeaderScanner { bytes, pos: 0 };
    let mode = match scan.token() {
        Some("P2") => PgmMode::P2,
        Some("P5") => PgmMode::P5,
        other => {
            return Err(Error::Format(format!(
                "expected P2 or P5 magic, found {other:?}"
            )))
        }
    };
    let cols = scan.number("width")?;
    let rows = scan.number("height")?;
    let maxval = scan.number("maxval")?;
    if maxval != 255 {
        return Err(Error::Format(format!("maxval {maxval} is not 255")));
    }
    if rows == 0 || cols == 0 {
        return Err(Error::Format("zero image dimension".into()));
    }
    let n = rows * cols;
    let data: Vec<f64> = match mode {
        PgmMode::P5 => {
            // Exactly one whitespace byte separates maxval from the raster.
            if scan.pos >= bytes.len() || !bytes[scan.pos].is_ascii_whitespace() {
                return Err(Error::Format("missing separator after maxval".into()));
            }
            let payload = &bytes[scan.pos + 1..];
            if payload.len() < n {
                return Err(Error::PayloadLength {
                    expected: n,
                    found: payload.len(),
                });
            }
            payload[..n].iter().map(|&b| f64::from(b)).collect()
        }
        PgmMode::P2 => {
            let mut values = Vec::with_capacity(n);
            for _ in 0..n {
                let t = scan.token().ok_or(Error::PayloadLength {
                    expected: n,
                    found: values.len(),
                })?;
                let v: u16 = t
                    .parse()
                    .map_err(|_| Error::Format(format!("invalid sample {t:?}")))?;
                if v > 255 {
                    return Err(Error::Format(format!("sample {v} exceeds maxval")));
                }
                values.push(f64::from(v));
            }
            values
        }
    };
    Ok(CartesianImage::from_matrix(Matrix::from_vec(
        rows, cols, data,
    )?))
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<CartesianImage> {
    decode_pgm(&fs::read(path)?)
}

pub fn write_pgm(img: &CartesianImage, path: impl AsRef<Path>, mode: PgmMode) -> Result<()> {
    fs::write(path, encode_pgm(img, mode)?)?;
    Ok(())
}

pub fn encode_polar(pimg: &PolarImage) -> Vec<u8> {
    let grid = pimg.grid();
    let (num, den) = grid.measure().ratio();
    let mut out = format!(
        "{POLAR_MAGIC}\n{} {} {num}/{den} {}\n",
        grid.n1(),
        grid.n2(),
        grid.r_max()
    )
    .into_bytes();
    for v in pimg.values().as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_polar(bytes: &[u8]) -> Result<PolarImage> {
    let bad = |msg: &str| Error::Format(msg.to_string());
    let mut lines = bytes.splitn(3, |&b| b == b'\n');
    let magic = lines.next().ok_or_else(|| bad("empty file"))?;
    if magic != POLAR_MAGIC.as_bytes() {
        return Err(bad("bad magic, expected PWP1"));
    }
    let header = lines.next().ok_or_else(|| bad("missing header line"))?;
    let payload = lines.next().ok_or_else(|| bad("missing payload"))?;
    let header = std::str::from_utf8(header).map_err(|_| bad("header is not UTF-8"))?;
    let fields: Vec<&str> = header.split(' ').collect();
    let [n1, n2, ratio, r_max] = fields[..] else {
        return Err(bad("header must have four fields"));
    };
    let n1: usize = n1.parse().map_err(|_| bad("invalid N1"))?;
    let n2: usize = n2.parse().map_err(|_| bad("invalid N2"))?;
    let measure = ratio
        .split_once('/')
        .and_then(|(a, b)| MeasureKind::from_ratio(a.parse().ok()?, b.parse().ok()?))
        .ok_or_else(|| bad("measure exponent must be 1/2 or 1/1"))?;
    let r_max: f64 = r_max.parse().map_err(|_| bad("invalid r_max"))?;
    let grid = PolarGrid::new(n1, n2, r_max, measure)?;

    let expected = 8 * n1 * n2;
    if payload.len() != expected {
        return Err(Error::PayloadLength {
            expected,
            found: payload.len(),
        });
    }
    let values = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    PolarImage::new(grid, Matrix::from_vec(n1, n2, values)?)
}

pub fn read_polar(path: impl AsRef<Path>) -> Result<PolarImage> {
    decode_polar(&fs::read(path)?)
}

pub fn write_polar(pimg: &PolarImage, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_polar(pimg))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn p5_single_pixel_bytes() {
        let img = CartesianImage::filled(1, 1, 128.0);
        assert_eq!(
            encode_pgm(&img, PgmMode::P5).unwrap(),
            b"P5\n1 1\n255\n\x80"
        );
    }

    #[test]
    fn quantization_rounds_half_up_and_clamps() {
        assert_eq!(quantize(127.5), 128);
        assert_eq!(quantize(127.49), 127);
        assert_eq!(quantize(-3.0), 0);
        assert_eq!(quantize(300.0), 255);
    }

    #[test]
    fn p2_layout() {
        let img = CartesianImage::from_fn(2, 3, |i, j| (i * 3 + j) as f64 * 50.0);
        let text = String::from_utf8(encode_pgm(&img, PgmMode::P2).unwrap()).unwrap();
        assert_eq!(text, "P2\n3 2\n255\n0 50 100\n150 200 250\n");
        assert_eq!(decode_pgm(text.as_bytes()).unwrap(), img);
    }

    #[test]
    fn p2_lines_stay_short() {
        let img = CartesianImage::filled(2, 100, 255.0);
        let bytes = encode_pgm(&img, PgmMode::P2).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.lines().all(|l| l.len() <= 70));
        assert_eq!(decode_pgm(&bytes).unwrap(), img);
    }

    #[test]
    fn header_comments_accepted() {
        let bytes = b"P5\n# made by hand\n2 1\n# max\n255\n\x01\x02";
        let img = decode_pgm(bytes).unwrap();
        assert_eq!((img.get(0, 0), img.get(0, 1)), (1.0, 2.0));
    }

    #[test]
    fn pgm_errors() {
        assert!(matches!(
            decode_pgm(b"P6\n1 1\n255\n\x00"),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            decode_pgm(b"P5\n1 1\n65535\n\x00\x00"),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            decode_pgm(b"P5\n2 2\n255\n\x00"),
            Err(Error::PayloadLength { .. })
        ));
        assert!(matches!(
            decode_pgm(b"P2\n2 2\n255\n1 2 3"),
            Err(Error::PayloadLength { .. })
        ));
        assert!(matches!(
            decode_pgm(b"P5\nx 2\n255\n"),
            Err(Error::Format(_))
        ));
        let nan = CartesianImage::filled(1, 1, f64::NAN);
        assert!(encode_pgm(&nan, PgmMode::P5).is_err());
    }

    #[test]
    fn polar_round_trip_is_bit_exact() {
        let grid = PolarGrid::new(2, 2, 255.5, MeasureKind::UniformArea).unwrap();
        let values = Matrix::from_rows(&[vec![0.1, -2.5e-300], vec![1.0 / 3.0, 1e300]]).unwrap();
        let pimg = PolarImage::new(grid, values).unwrap();
        let bytes = encode_polar(&pimg);
        assert!(bytes.starts_with(b"PWP1\n2 2 1/2 255.5\n"));
        let back = decode_polar(&bytes).unwrap();
        assert_eq!(back, pimg);
        assert_eq!(encode_polar(&back), bytes);
    }

    #[test]
    fn polar_header_parses_measure() {
        let mut bytes = b"PWP1\n2 2 1/1 4\n".to_vec();
        bytes.extend(std::iter::repeat_n(0u8, 32));
        assert_eq!(
            decode_polar(&bytes).unwrap().grid().measure(),
            MeasureKind::UniformRadial
        );
        let mut bytes = b"PWP1\n2 2 1/2 4\n".to_vec();
        bytes.extend(std::iter::repeat_n(0u8, 32));
        assert_eq!(
            decode_polar(&bytes).unwrap().grid().measure(),
            MeasureKind::UniformArea
        );
    }

    #[test]
    fn polar_errors() {
        let grid = PolarGrid::new(2, 2, 4.0, MeasureKind::UniformArea).unwrap();
        let bytes = encode_polar(&PolarImage::new(grid, Matrix::zeros(2, 2)).unwrap());
        assert!(matches!(
            decode_polar(&bytes[..bytes.len() - 3]),
            Err(Error::PayloadLength {
                expected: 32,
                found: 29
            })
        ));
        let mut wrong = bytes.clone();
        wrong[3] = b'2';
        assert!(matches!(decode_polar(&wrong), Err(Error::Format(_))));
        let mut bytes = b"PWP1\n2 2 2/3 4\n".to_vec();
        bytes.extend(std::iter::repeat_n(0u8, 32));
        assert!(decode_polar(&bytes).is_err());
        let mut bytes = b"PWP1\n3 2 1/2 4\n".to_vec();
        bytes.extend(std::iter::repeat_n(0u8, 48));
        assert!(decode_polar(&bytes).is_err());
    }

    proptest! {
        #[test]
        fn pgm_write_read_reproduces_quantized(
            data in prop::collection::vec(-20.0f64..280.0, 16 * 16),
            ascii in any::<bool>(),
        ) {
            let mode = if ascii { PgmMode::P2 } else { PgmMode::P5 };
            let img = CartesianImage::from_matrix(Matrix::from_vec(16, 16, data).unwrap());
            let bytes = encode_pgm(&img, mode).unwrap();
            let back = decode_pgm(&bytes).unwrap();
            let quantized = img.pixels().map(|v| f64::from(quantize(v)));
            prop_assert_eq!(back.pixels(), &quantized);
            prop_assert_eq!(encode_pgm(&back, mode).unwrap(), bytes);
        }
    }
}
