//! Raster and mask primitives for the extraction pipeline.
//!
//! The pipeline works on three value types: [`Raster`] (8-bit RGB
//! image), [`BinaryMask`] (one bit per pixel), and [`GrayRaster`]
//! (8-bit single channel). Polygons are scan-converted with the
//! pixel-centre even-odd rule: a pixel belongs to the polygon exactly
//! when its centre `(x + 0.5, y + 0.5)` lies inside under even-odd
//! winding. That convention makes rasterization independent of vertex
//! order and orientation.

use std::io::Cursor;
use std::path::Path;

use thiserror::Error;

/// One 8-bit RGB pixel.
pub type Rgb = [u8; 3];

#[derive(Debug, Error)]
pub enum MaskError {
    #[error("raster dimensions must be positive, got {0}x{1}")]
    EmptyDims(u32, u32),
    #[error("buffer holds {len} entries, expected {expected} for {width}x{height}")]
    BadBufferLen {
        len: usize,
        expected: usize,
        width: u32,
        height: u32,
    },
    #[error("polygon has {0} vertices, need at least 3")]
    DegeneratePolygon(usize),
    #[error("polygon vertex ({x}, {y}) is not finite")]
    NonFiniteVertex { x: f64, y: f64 },
    #[error("size mismatch: {left_w}x{left_h} vs {right_w}x{right_h}")]
    SizeMismatch {
        left_w: u32,
        left_h: u32,
        right_w: u32,
        right_h: u32,
    },
    #[error("image codec error: {0}")]
    Codec(#[from] image::ImageError),
    #[error("failed to read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
}

fn check_dims(width: u32, height: u32) -> Result<(), MaskError> {
    if width == 0 || height == 0 {
        return Err(MaskError::EmptyDims(width, height));
    }
    Ok(())
}

fn check_len(len: usize, width: u32, height: u32) -> Result<(), MaskError> {
    let expected = width as usize * height as usize;
    if len != expected {
        return Err(MaskError::BadBufferLen {
            len,
            expected,
            width,
            height,
        });
    }
    Ok(())
}

/// Row-major 8-bit RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    width: u32,
    height: u32,
    pixels: Vec<Rgb>,
}

impl Raster {
    pub fn new(width: u32, height: u32, pixels: Vec<Rgb>) -> Result<Self, MaskError> {
        check_dims(width, height)?;
        check_len(pixels.len(), width, height)?;
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Uniform-colour raster.
    pub fn filled(width: u32, height: u32, colour: Rgb) -> Result<Self, MaskError> {
        check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            pixels: vec![colour; width as usize * height as usize],
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn pixel(&self, x: u32, y: u32) -> Rgb {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    pub fn set_pixel(&mut self, x: u32, y: u32, colour: Rgb) {
        self.pixels[y as usize * self.width as usize + x as usize] = colour;
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }

    /// Decodes a PNG or JPEG byte stream into an RGB raster. Alpha is
    /// discarded; greyscale is promoted to three equal channels.
    pub fn decode(bytes: &[u8]) -> Result<Self, MaskError> {
        let img = image::load_from_memory(bytes)?.to_rgb8();
        let (width, height) = img.dimensions();
        check_dims(width, height)?;
        let pixels = img.pixels().map(|p| p.0).collect();
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn load(path: &Path) -> Result<Self, MaskError> {
        let bytes = std::fs::read(path).map_err(|source| MaskError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::decode(&bytes)
    }

    pub fn to_png_bytes(&self) -> Result<Vec<u8>, MaskError> {
        let mut flat = Vec::with_capacity(self.pixels.len() * 3);
        for p in &self.pixels {
            flat.extend_from_slice(p);
        }
        let img = image::RgbImage::from_raw(self.width, self.height, flat)
            .expect("pixel buffer length is validated at construction");
        let mut out = Cursor::new(Vec::new());
        img.write_to(&mut out, image::ImageFormat::Png)?;
        Ok(out.into_inner())
    }

    pub fn save_png(&self, path: &Path) -> Result<(), MaskError> {
        let bytes = self.to_png_bytes()?;
        std::fs::write(path, bytes).map_err(|source| MaskError::Read {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Row-major single-bit mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn empty(width: u32, height: u32) -> Result<Self, MaskError> {
        check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
        })
    }

    pub fn from_bits(width: u32, height: u32, bits: Vec<bool>) -> Result<Self, MaskError> {
        check_dims(width, height)?;
        check_len(bits.len(), width, height)?;
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        self.bits[y as usize * self.width as usize + x as usize] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Number of set pixels.
    pub fn popcount(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// In-place union with a same-sized mask.
    pub fn union_with(&mut self, other: &BinaryMask) -> Result<(), MaskError> {
        if self.dims() != other.dims() {
            return Err(MaskError::SizeMismatch {
                left_w: self.width,
                left_h: self.height,
                right_w: other.width,
                right_h: other.height,
            });
        }
        for (b, o) in self.bits.iter_mut().zip(&other.bits) {
            *b |= *o;
        }
        Ok(())
    }
}

/// Row-major 8-bit single-channel raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayRaster {
    width: u32,
    height: u32,
    values: Vec<u8>,
}

impl GrayRaster {
    pub fn new(width: u32, height: u32, values: Vec<u8>) -> Result<Self, MaskError> {
        check_dims(width, height)?;
        check_len(values.len(), width, height)?;
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn value(&self, x: u32, y: u32) -> u8 {
        self.values[y as usize * self.width as usize + x as usize]
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }
}

/// Threshold used by the extraction pipeline when none is configured.
pub const DEFAULT_THRESHOLD: u8 = 127;

/// Scan-converts a closed polygon into a binary mask of the given size.
///
/// Vertices are in pixel coordinates with the origin at the top-left
/// image corner; the polygon closes implicitly from the last vertex
/// back to the first. A pixel is set exactly when its centre lies
/// inside the polygon under the even-odd rule, so vertex order and
/// winding direction are irrelevant. Parts of the polygon outside the
/// raster are clipped.
pub fn rasterize_polygon(
    polygon: &[(f64, f64)],
    dims: (u32, u32),
) -> Result<BinaryMask, MaskError> {
    if polygon.len() < 3 {
        return Err(MaskError::DegeneratePolygon(polygon.len()));
    }
    for &(x, y) in polygon {
        if !x.is_finite() || !y.is_finite() {
            return Err(MaskError::NonFiniteVertex { x, y });
        }
    }
    let (width, height) = dims;
    let mut mask = BinaryMask::empty(width, height)?;
    let mut crossings: Vec<f64> = Vec::new();
    for row in 0..height {
        let yc = row as f64 + 0.5;
        crossings.clear();
        for i in 0..polygon.len() {
            let (x1, y1) = polygon[i];
            let (x2, y2) = polygon[(i + 1) % polygon.len()];
            // Half-open rule in y: the edge spans the scanline when
            // exactly one endpoint is strictly below it. This counts
            // each crossing once and yields an even total per row.
            if (y1 > yc) != (y2 > yc) {
                crossings.push(x1 + (yc - y1) * (x2 - x1) / (y2 - y1));
            }
        }
        crossings.sort_by(|a, b| a.total_cmp(b));
        for pair in crossings.chunks_exact(2) {
            // Pixel centres x+0.5 in [pair[0], pair[1]).
            let start = (pair[0] - 0.5).ceil().max(0.0);
            let end = (pair[1] - 0.5).ceil().min(width as f64);
            let mut x = start as i64;
            while (x as f64) < end {
                mask.set(x as u32, row, true);
                x += 1;
            }
        }
    }
    Ok(mask)
}

/// Nearest-neighbour mask resize. Source pixel for target column `x`
/// is `floor(x * src_w / dst_w)`, and likewise for rows, so resizing to
/// the same size is the identity.
pub fn resize_mask(mask: &BinaryMask, target: (u32, u32)) -> Result<BinaryMask, MaskError> {
    let (tw, th) = target;
    check_dims(tw, th)?;
    if (tw, th) == mask.dims() {
        return Ok(mask.clone());
    }
    let (sw, sh) = mask.dims();
    let mut out = BinaryMask::empty(tw, th)?;
    for y in 0..th {
        let sy = (y as u64 * sh as u64 / th as u64) as u32;
        for x in 0..tw {
            let sx = (x as u64 * sw as u64 / tw as u64) as u32;
            if mask.get(sx, sy) {
                out.set(x, y, true);
            }
        }
    }
    Ok(out)
}

/// Maps set pixels to 255 and unset pixels to 0.
pub fn to_grayscale(mask: &BinaryMask) -> GrayRaster {
    let values = mask.bits().iter().map(|&b| if b { 255 } else { 0 }).collect();
    GrayRaster {
        width: mask.width(),
        height: mask.height(),
        values,
    }
}

/// Binarizes a grey raster: set where the value is strictly greater
/// than `t`.
pub fn threshold(gray: &GrayRaster, t: u8) -> BinaryMask {
    let bits = gray.values().iter().map(|&v| v > t).collect();
    BinaryMask {
        width: gray.width(),
        height: gray.height(),
        bits,
    }
}

/// Collects the image pixels under set mask positions, row-major.
/// The output length always equals the mask popcount; unset positions
/// contribute nothing.
pub fn apply_mask(image: &Raster, mask: &BinaryMask) -> Result<Vec<Rgb>, MaskError> {
    if image.dims() != mask.dims() {
        return Err(MaskError::SizeMismatch {
            left_w: image.width,
            left_h: image.height,
            right_w: mask.width,
            right_h: mask.height,
        });
    }
    let out = image
        .pixels
        .iter()
        .zip(&mask.bits)
        .filter(|(_, &b)| b)
        .map(|(&p, _)| p)
        .collect();
    Ok(out)
}
