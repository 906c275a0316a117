//! Label rasters and their conversion to polygon annotations.
//!
//! A [`LabelRaster`] stores one label per pixel: 0 background, 1–4 the
//! body parts (class id + 1). [`raster_to_annotations`] splits each
//! label into 4-connected components and traces every component's
//! outer boundary along pixel edges, so a component without holes
//! rasterizes back to exactly its own pixels.

use std::path::Path;

use super::{AnnotError, AnnotationSet, BodyPart, PartAnnotation};
use crate::maskops::MaskError;

/// Row-major per-pixel label grid with values in `0..=4`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelRaster {
    width: u32,
    height: u32,
    labels: Vec<u8>,
}

impl LabelRaster {
    pub fn new(width: u32, height: u32, labels: Vec<u8>) -> Result<Self, AnnotError> {
        if width == 0 || height == 0 {
            return Err(AnnotError::EmptyDims(width, height));
        }
        let expected = width as usize * height as usize;
        if labels.len() != expected {
            return Err(AnnotError::Mask(MaskError::BadBufferLen {
                len: labels.len(),
                expected,
                width,
                height,
            }));
        }
        for (i, &value) in labels.iter().enumerate() {
            if value > 4 {
                return Err(AnnotError::BadLabel {
                    value,
                    x: (i % width as usize) as u32,
                    y: (i / width as usize) as u32,
                });
            }
        }
        Ok(Self {
            width,
            height,
            labels,
        })
    }

    /// Decodes an 8-bit single-channel image (PNG or JPEG bytes) as a
    /// label raster. Values above 4 are rejected.
    pub fn decode(bytes: &[u8]) -> Result<Self, AnnotError> {
        let img = image::load_from_memory(bytes)
            .map_err(MaskError::Codec)?
            .to_luma8();
        let (width, height) = img.dimensions();
        Self::new(width, height, img.into_raw())
    }

    pub fn load(path: &Path) -> Result<Self, AnnotError> {
        let bytes = std::fs::read(path).map_err(|source| {
            AnnotError::Mask(MaskError::Read {
                path: path.display().to_string(),
                source,
            })
        })?;
        Self::decode(&bytes)
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

    pub fn label(&self, x: u32, y: u32) -> u8 {
        self.labels[y as usize * self.width as usize + x as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dir {
    North,
    East,
    South,
    West,
}

impl Dir {
    fn delta(self) -> (i64, i64) {
        match self {
            Dir::North => (0, -1),
            Dir::East => (1, 0),
            Dir::South => (0, 1),
            Dir::West => (-1, 0),
        }
    }

    fn right(self) -> Dir {
        match self {
            Dir::North => Dir::East,
            Dir::East => Dir::South,
            Dir::South => Dir::West,
            Dir::West => Dir::North,
        }
    }

    fn left(self) -> Dir {
        match self {
            Dir::North => Dir::West,
            Dir::West => Dir::South,
            Dir::South => Dir::East,
            Dir::East => Dir::North,
        }
    }
}

/// Walks the outer boundary of a component clockwise (image
/// coordinates, y down) along pixel edges, keeping the component on
/// the right-hand side. Returns the polygon corners where the walk
/// turns; consecutive vertices therefore never lie on one line.
fn trace_boundary<F>(inside: F, start_pixel: (u32, u32)) -> Vec<(f64, f64)>
where
    F: Fn(i64, i64) -> bool,
{
    // At a lattice corner the outgoing edge direction is valid when
    // the pixel on its right is inside and the pixel on its left is
    // not. Preferring the right turn first keeps diagonally touching
    // components separate, matching 4-connectivity.
    let outgoing = |corner: (i64, i64), incoming: Dir| -> Dir {
        let (x, y) = corner;
        let ul = inside(x - 1, y - 1);
        let ur = inside(x, y - 1);
        let ll = inside(x - 1, y);
        let lr = inside(x, y);
        let valid = |d: Dir| match d {
            Dir::North => ur && !ul,
            Dir::East => lr && !ur,
            Dir::South => ll && !lr,
            Dir::West => ul && !ll,
        };
        for cand in [incoming.right(), incoming, incoming.left()] {
            if valid(cand) {
                return cand;
            }
        }
        unreachable!("boundary walk left the component edge");
    };

    // The start pixel is the component's topmost-then-leftmost pixel,
    // so its top-left corner has only East as a valid outgoing edge.
    let start = (start_pixel.0 as i64, start_pixel.1 as i64);
    let start_dir = Dir::East;
    let mut vertices = vec![(start.0 as f64, start.1 as f64)];
    let mut pos = start;
    let mut dir = start_dir;
    loop {
        let (dx, dy) = dir.delta();
        let next = (pos.0 + dx, pos.1 + dy);
        let next_dir = outgoing(next, dir);
        if next == start && next_dir == start_dir {
            break;
        }
        if next_dir != dir {
            vertices.push((next.0 as f64, next.1 as f64));
        }
        pos = next;
        dir = next_dir;
    }
    vertices
}

/// Converts a label raster into polygon annotations: one annotation
/// per 4-connected component of each non-background label, ordered by
/// class id and then scan order. Polygons follow component boundaries
/// along pixel edges; interior holes are not represented, so a
/// polygon covers at least its component's pixels.
pub fn raster_to_annotations(
    raster: &LabelRaster,
    image_id: impl Into<String>,
) -> Result<AnnotationSet, AnnotError> {
    let (width, height) = raster.dims();
    let w = width as usize;
    let mut component = vec![0u32; w * height as usize];
    // (component id, label, topmost-leftmost pixel)
    let mut found: Vec<(u32, u8, (u32, u32))> = Vec::new();
    let mut next_id = 1u32;
    let mut queue: Vec<(u32, u32)> = Vec::new();

    for y in 0..height {
        for x in 0..width {
            let idx = y as usize * w + x as usize;
            let label = raster.labels[idx];
            if label == 0 || component[idx] != 0 {
                continue;
            }
            let id = next_id;
            next_id += 1;
            component[idx] = id;
            // Row-major discovery makes this pixel the component's
            // topmost-then-leftmost one.
            found.push((id, label, (x, y)));
            queue.clear();
            queue.push((x, y));
            while let Some((cx, cy)) = queue.pop() {
                let neighbours = [
                    (cx.wrapping_sub(1), cy),
                    (cx + 1, cy),
                    (cx, cy.wrapping_sub(1)),
                    (cx, cy + 1),
                ];
                for (nx, ny) in neighbours {
                    if nx >= width || ny >= height {
                        continue;
                    }
                    let nidx = ny as usize * w + nx as usize;
                    if component[nidx] == 0 && raster.labels[nidx] == label {
                        component[nidx] = id;
                        queue.push((nx, ny));
                    }
                }
            }
        }
    }

    found.sort_by_key(|&(id, label, _)| (label, id));
    let mut annotations = Vec::with_capacity(found.len());
    for (id, label, start) in found {
        let polygon = trace_boundary(
            |x, y| {
                x >= 0
                    && y >= 0
                    && x < width as i64
                    && y < height as i64
                    && component[y as usize * w + x as usize] == id
            },
            start,
        );
        let part = BodyPart::from_class_id(label as i64 - 1)?;
        annotations.push(PartAnnotation::new(part, polygon, 1.0)?);
    }
    AnnotationSet::new(image_id, (width, height), annotations)
}
