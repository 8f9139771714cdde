//! Grayscale images, angle encodings and the probability-to-pixel decoders.
//!
//! Pixels are stored row-major, so pixel `i` sits at `row * side + col` and is
//! addressed by the position-register basis state `|i⟩`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Slack allowed when checking that an angle lies in `[0, π/2]`.
const ANGLE_SLACK: f64 = 1e-12;

/// Keeps `x.5` values that land a hair below the midpoint on the upper side.
const ROUNDING_SLACK: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("not a PGM file: {0}")]
    NotPgm(String),
    #[error("image is not square ({width}x{height})")]
    NonSquare { width: usize, height: usize },
    #[error("image side {0} is not a power of two")]
    SideNotPowerOfTwo(usize),
    #[error("image side {0} cannot be encoded (need side >= 2)")]
    NonEncodable(usize),
    #[error("maxval {0} is not supported (only 255)")]
    MaxvalNot255(u32),
    #[error("truncated pixel data: expected {expected} values, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("pixel value {0} out of range [0, 255]")]
    PixelOutOfRange(i64),
    #[error("pixel buffer has {found} entries, side {side} needs {expected}")]
    LengthMismatch { side: usize, expected: usize, found: usize },
    #[error("cannot downscale side {from} to {to}")]
    IncompatibleSides { from: usize, to: usize },
    #[error("image sides differ ({0} vs {1})")]
    SideMismatch(usize, usize),
    #[error("angle {0} outside [0, pi/2]")]
    AngleOutOfRange(f64),
    #[error("distribution has {found} entries, expected {expected}")]
    DistributionSize { expected: usize, found: usize },
    #[error("negative probability {0}")]
    NegativeProbability(f64),
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
}

/// Square 8-bit grayscale raster with side `2^n`, `n >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Image {
    side: usize,
    pixels: Vec<u8>,
}

impl Image {
    pub fn new(side: usize, pixels: Vec<u8>) -> Result<Self, ImageError> {
        check_side(side)?;
        if pixels.len() != side * side {
            return Err(ImageError::LengthMismatch {
                side,
                expected: side * side,
                found: pixels.len(),
            });
        }
        Ok(Self { side, pixels })
    }

    pub fn filled(side: usize, value: u8) -> Result<Self, ImageError> {
        Self::new(side, vec![value; side * side])
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// Image exponent `n` with `side == 2^n`.
    pub fn exponent(&self) -> u32 {
        self.side.trailing_zeros()
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixel(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.side + col]
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }
}

fn check_side(side: usize) -> Result<(), ImageError> {
    if !side.is_power_of_two() {
        return Err(ImageError::SideNotPowerOfTwo(side));
    }
    if side < 2 {
        return Err(ImageError::NonEncodable(side));
    }
    Ok(())
}

/// How gray values map onto rotation angles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingMode {
    /// `θ = v / 255 · π/2`
    #[default]
    Linear,
    /// `θ = arcsin(v / 255)`
    Arcsin,
}

/// Which estimator turns measured probabilities back into gray values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecodeVariant {
    /// Per-pixel ratio of the gray-qubit outcomes; immune to uneven pixel weights.
    #[default]
    Ratio,
    /// Uses only the `c = 1` outcomes, rescaled by `2^n`.
    Scaled,
}

impl fmt::Display for EncodingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Linear => "linear",
            Self::Arcsin => "arcsin",
        })
    }
}

impl FromStr for EncodingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(Self::Linear),
            "arcsin" => Ok(Self::Arcsin),
            other => Err(format!("unknown encoding mode '{other}'")),
        }
    }
}

impl fmt::Display for DecodeVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ratio => "ratio",
            Self::Scaled => "scaled",
        })
    }
}

impl FromStr for DecodeVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ratio" => Ok(Self::Ratio),
            "scaled" => Ok(Self::Scaled),
            other => Err(format!("unknown decode variant '{other}'")),
        }
    }
}

/// Per-pixel rotation angles, one per pixel of a `2^n × 2^n` image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleVector {
    n: u32,
    thetas: Vec<f64>,
}

impl AngleVector {
    pub fn new(n: u32, thetas: Vec<f64>) -> Result<Self, ImageError> {
        if n == 0 {
            return Err(ImageError::NonEncodable(1));
        }
        let expected = 1usize << (2 * n);
        if thetas.len() != expected {
            return Err(ImageError::LengthMismatch {
                side: 1 << n,
                expected,
                found: thetas.len(),
            });
        }
        if let Some(&bad) = thetas
            .iter()
            .find(|t| !t.is_finite() || **t < -ANGLE_SLACK || **t > FRAC_PI_2 + ANGLE_SLACK)
        {
            return Err(ImageError::AngleOutOfRange(bad));
        }
        Ok(Self { n, thetas })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }
}

pub fn gray_to_angles(image: &Image, mode: EncodingMode) -> AngleVector {
    let thetas = image.pixels.iter().map(|&v| gray_to_angle(v, mode)).collect();
    AngleVector {
        n: image.exponent(),
        thetas,
    }
}

pub fn gray_to_angle(value: u8, mode: EncodingMode) -> f64 {
    let x = f64::from(value) / 255.0;
    match mode {
        EncodingMode::Linear => x * FRAC_PI_2,
        EncodingMode::Arcsin => x.asin(),
    }
}

/// Decoded image plus the pixels whose measured mass was zero.
///
/// Those pixels carry no information; they decode to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub image: Image,
    pub zero_mass_pixels: Vec<usize>,
}

/// Turns a distribution over `2n + 1` data qubits back into an image.
///
/// `probs[j + c · 2^{2n}]` is the probability of position state `j` with gray
/// qubit `c`; ancilla bits must already be marginalized out.
pub fn probs_to_image(probs: &[f64], n: u32, mode: EncodingMode, decode: DecodeVariant) -> Result<Decoded, ImageError> {
    if n == 0 {
        return Err(ImageError::NonEncodable(1));
    }
    let pixels = 1usize << (2 * n);
    if probs.len() != 2 * pixels {
        return Err(ImageError::DistributionSize {
            expected: 2 * pixels,
            found: probs.len(),
        });
    }
    if let Some(&p) = probs.iter().find(|p| **p < 0.0 || !p.is_finite()) {
        return Err(ImageError::NegativeProbability(p));
    }
    let (off, on) = probs.split_at(pixels);
    let weight = f64::from(1u32 << n);
    let mut zero_mass_pixels = Vec::new();
    let mut out = Vec::with_capacity(pixels);
    for (j, (&p0, &p1)) in off.iter().zip(on).enumerate() {
        let value = match decode {
            DecodeVariant::Ratio => {
                let total = p0 + p1;
                if total <= 0.0 {
                    zero_mass_pixels.push(j);
                    0.0
                } else {
                    match mode {
                        EncodingMode::Linear => (p0 / total).sqrt().min(1.0).acos() * 255.0 / FRAC_PI_2,
                        EncodingMode::Arcsin => (p1 / total).sqrt() * 255.0,
                    }
                }
            }
            DecodeVariant::Scaled => {
                let amp = weight * p1.sqrt();
                match mode {
                    EncodingMode::Arcsin => amp * 255.0,
                    EncodingMode::Linear => amp.min(1.0).asin() * 255.0 / FRAC_PI_2,
                }
            }
        };
        out.push(quantize(value));
    }
    Ok(Decoded {
        image: Image {
            side: 1 << n,
            pixels: out,
        },
        zero_mass_pixels,
    })
}

/// Round half-up and clamp to the 8-bit range.
fn quantize(value: f64) -> u8 {
    (value + 0.5 + ROUNDING_SLACK).floor().clamp(0.0, 255.0) as u8
}

/// Mean absolute pixel error as a percentage of the full gray range.
pub fn relative_difference(a: &Image, b: &Image) -> Result<f64, ImageError> {
    if a.side != b.side {
        return Err(ImageError::SideMismatch(a.side, b.side));
    }
    let total: u64 = a
        .pixels
        .iter()
        .zip(&b.pixels)
        .map(|(&x, &y)| u64::from(x.abs_diff(y)))
        .sum();
    Ok(total as f64 / a.pixels.len() as f64 * 100.0 / 255.0)
}

/// Box-average pooling down to `target_side`.
pub fn downscale(image: &Image, target_side: usize) -> Result<Image, ImageError> {
    let incompatible = ImageError::IncompatibleSides {
        from: image.side,
        to: target_side,
    };
    if target_side < 2 || !target_side.is_power_of_two() || target_side > image.side {
        return Err(incompatible);
    }
    let block = image.side / target_side;
    let area = (block * block) as u64;
    let mut pixels = Vec::with_capacity(target_side * target_side);
    for row in 0..target_side {
        for col in 0..target_side {
            let mut sum = 0u64;
            for r in row * block..(row + 1) * block {
                let start = r * image.side + col * block;
                sum += image.pixels[start..start + block]
                    .iter()
                    .map(|&v| u64::from(v))
                    .sum::<u64>();
            }
            pixels.push(((2 * sum + area) / (2 * area)) as u8);
        }
    }
    Image::new(target_side, pixels)
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<Image, ImageError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| ImageError::Io {
        path: path.into(),
        source,
    })?;
    parse_pgm(&bytes)
}

pub fn save_pgm(image: &Image, path: impl AsRef<Path>) -> Result<(), ImageError> {
    let path = path.as_ref();
    fs::write(path, encode_pgm(image)).map_err(|source| ImageError::Io {
        path: path.into(),
        source,
    })
}

/// Binary (P5) encoding: `"P5\n<w> <h>\n255\n"` followed by the raw bytes.
pub fn encode_pgm(image: &Image) -> Vec<u8> {
    let header = format!("P5\n{0} {0}\n255\n", image.side);
    let mut out = Vec::with_capacity(header.len() + image.pixels.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(&image.pixels);
    out
}

/// Parses binary (P5) or ASCII (P2) graymaps.
pub fn parse_pgm(bytes: &[u8]) -> Result<Image, ImageError> {
    let magic = bytes.get(..2).ok_or_else(|| ImageError::NotPgm("empty file".into()))?;
    let binary = match magic {
        b"P5" => true,
        b"P2" => false,
        _ => return Err(ImageError::NotPgm("missing P5/P2 magic".into())),
    };
    let mut cursor = HeaderCursor { bytes, pos: 2 };
    let width = cursor.next_number()?;
    let height = cursor.next_number()?;
    let maxval = cursor.next_number()?;
    if maxval != 255 {
        return Err(ImageError::MaxvalNot255(maxval.min(u32::MAX as usize) as u32));
    }
    if width != height {
        return Err(ImageError::NonSquare { width, height });
    }
    check_side(width)?;
    let expected = width * height;
    let pixels = if binary {
        // exactly one whitespace byte separates the header from the raster
        let start = cursor.pos + 1;
        let data = bytes.get(start..).unwrap_or(&[]);
        if data.len() < expected {
            return Err(ImageError::Truncated {
                expected,
                found: data.len(),
            });
        }
        data[..expected].to_vec()
    } else {
        let mut values = Vec::with_capacity(expected);
        while values.len() < expected {
            match cursor.try_next_number()? {
                Some(v) if v <= 255 => values.push(v as u8),
                Some(v) => return Err(ImageError::PixelOutOfRange(v as i64)),
                None => {
                    return Err(ImageError::Truncated {
                        expected,
                        found: values.len(),
                    })
                }
            }
        }
        values
    };
    Image::new(width, pixels)
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_separators(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn try_next_number(&mut self) -> Result<Option<usize>, ImageError> {
        self.skip_separators();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return match self.bytes.get(self.pos) {
                None => Ok(None),
                Some(&b) => Err(ImageError::NotPgm(format!("unexpected byte 0x{b:02x} in header"))),
            };
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        text.parse()
            .map(Some)
            .map_err(|_| ImageError::NotPgm(format!("number '{text}' too large")))
    }

    fn next_number(&mut self) -> Result<usize, ImageError> {
        self.try_next_number()?
            .ok_or_else(|| ImageError::NotPgm("incomplete header".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sample() -> Image {
        Image::new(2, vec![10, 85, 170, 255]).unwrap()
    }

    #[test]
    fn linear_angles_of_sample_image() {
        let angles = gray_to_angles(&sample(), EncodingMode::Linear);
        let expected = [PI / 51.0, PI / 6.0, PI / 3.0, PI / 2.0];
        for (a, e) in angles.thetas().iter().zip(expected) {
            assert!((a - e).abs() < 1e-15, "{a} vs {e}");
        }
    }

    #[test]
    fn arcsin_endpoints() {
        assert_eq!(gray_to_angle(0, EncodingMode::Arcsin), 0.0);
        assert!((gray_to_angle(255, EncodingMode::Arcsin) - FRAC_PI_2).abs() < 1e-15);
        let zeros = gray_to_angles(&Image::filled(2, 0).unwrap(), EncodingMode::Linear);
        assert!(zeros.thetas().iter().all(|&t| t == 0.0));
    }

    #[test]
    fn angle_vector_rejects_out_of_range() {
        assert!(matches!(
            AngleVector::new(1, vec![0.0, 0.1, 2.0, 0.0]),
            Err(ImageError::AngleOutOfRange(_))
        ));
        assert!(AngleVector::new(1, vec![0.0; 3]).is_err());
    }

    #[test]
    fn relative_difference_examples() {
        let b = Image::filled(2, 125).unwrap();
        let d = relative_difference(&sample(), &b).unwrap();
        // Σ|Δ| = 115 + 40 + 45 + 130 = 330
        assert!((d - 330.0 / 4.0 * 100.0 / 255.0).abs() < 1e-12);
        assert!((d - 32.353).abs() < 1e-3);
        assert_eq!(relative_difference(&sample(), &sample()).unwrap(), 0.0);
        let black = Image::filled(4, 0).unwrap();
        let white = Image::filled(4, 255).unwrap();
        assert_eq!(relative_difference(&black, &white).unwrap(), 100.0);
        assert!(matches!(
            relative_difference(&black, &sample()),
            Err(ImageError::SideMismatch(4, 2))
        ));
    }

    #[test]
    fn downscale_examples() {
        let flat = Image::filled(4, 100).unwrap();
        assert_eq!(downscale(&flat, 2).unwrap(), Image::filled(2, 100).unwrap());

        let mut px = vec![0u8; 16];
        // top-left 2x2 block holds [0, 0, 255, 255]
        px[4] = 255;
        px[5] = 255;
        let img = Image::new(4, px).unwrap();
        assert_eq!(downscale(&img, 2).unwrap().pixels(), &[128, 0, 0, 0]);

        assert!(matches!(
            downscale(&sample(), 1),
            Err(ImageError::IncompatibleSides { .. })
        ));
        assert!(downscale(&sample(), 4).is_err());
    }

    #[test]
    fn ratio_decode_extremes() {
        // all mass on c = 0
        let mut probs = vec![0.0; 8];
        probs[..4].fill(0.25);
        let d = probs_to_image(&probs, 1, EncodingMode::Linear, DecodeVariant::Ratio).unwrap();
        assert_eq!(d.image.pixels(), &[0, 0, 0, 0]);

        // equal split decodes to round(127.5) = 128
        let probs = vec![0.125; 8];
        let d = probs_to_image(&probs, 1, EncodingMode::Linear, DecodeVariant::Ratio).unwrap();
        assert_eq!(d.image.pixels(), &[128; 4]);
    }

    #[test]
    fn zero_mass_pixels_are_flagged() {
        let mut probs = vec![0.0; 8];
        probs[0] = 0.5;
        probs[5] = 0.5;
        let d = probs_to_image(&probs, 1, EncodingMode::Linear, DecodeVariant::Ratio).unwrap();
        assert_eq!(d.zero_mass_pixels, vec![2, 3]);
        assert_eq!(d.image.pixels(), &[0, 255, 0, 0]);
    }

    fn frqi_probs(image: &Image, mode: EncodingMode) -> Vec<f64> {
        let angles = gray_to_angles(image, mode);
        let w = angles.len() as f64;
        let mut probs: Vec<f64> = angles.thetas().iter().map(|t| t.cos().powi(2) / w).collect();
        probs.extend(angles.thetas().iter().map(|t| t.sin().powi(2) / w));
        probs
    }

    #[test]
    fn sample_image_survives_exact_roundtrip() {
        for mode in [EncodingMode::Linear, EncodingMode::Arcsin] {
            for decode in [DecodeVariant::Ratio, DecodeVariant::Scaled] {
                let probs = frqi_probs(&sample(), mode);
                let d = probs_to_image(&probs, 1, mode, decode).unwrap();
                assert_eq!(d.image, sample(), "{mode} {decode}");
            }
        }
    }

    #[test]
    fn pgm_binary_and_ascii() {
        let mut p5 = b"P5\n2 2\n255\n".to_vec();
        p5.extend_from_slice(&[10, 85, 170, 255]);
        assert_eq!(parse_pgm(&p5).unwrap(), sample());

        let p2 = b"P2\n# comment\n2 2\n255\n10 85\n170 255\n";
        assert_eq!(parse_pgm(p2).unwrap(), sample());

        let enc = encode_pgm(&Image::new(4, (0..16).collect()).unwrap());
        assert!(enc.starts_with(b"P5\n4 4\n255\n"));
        assert_eq!(enc.len(), 11 + 16);
    }

    #[test]
    fn pgm_errors() {
        assert!(matches!(parse_pgm(b"P6\n2 2\n255\n"), Err(ImageError::NotPgm(_))));
        assert!(matches!(
            parse_pgm(b"P5\n1 1\n255\n\0"),
            Err(ImageError::NonEncodable(1))
        ));
        assert!(matches!(
            parse_pgm(b"P2\n3 3\n255\n0 0 0 0 0 0 0 0 0"),
            Err(ImageError::SideNotPowerOfTwo(3))
        ));
        assert!(matches!(
            parse_pgm(b"P2\n2 4\n255\n"),
            Err(ImageError::NonSquare { .. })
        ));
        assert!(matches!(
            parse_pgm(b"P5\n2 2\n15\n\0\0\0\0"),
            Err(ImageError::MaxvalNot255(15))
        ));
        assert!(matches!(
            parse_pgm(b"P5\n2 2\n255\n\0\0"),
            Err(ImageError::Truncated { expected: 4, found: 2 })
        ));
    }
}
