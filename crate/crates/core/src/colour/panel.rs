//! Visual palette panel: the original image stacked above one section
//! per part, each section showing the masked part pixels and a
//! horizontal bar of its palette colours.

use super::palette::Palette;
use super::ColourError;
use crate::maskops::{BinaryMask, MaskError, Raster, Rgb};

const BAR_HEIGHT: u32 = 24;
const SEPARATOR_HEIGHT: u32 = 2;
const BACKGROUND: Rgb = [0, 0, 0];

/// Renders the panel. With no parts the output is the original image
/// unchanged. Each part section is separated by a thin black rule and
/// contains the image with non-part pixels blacked out, then a bar
/// whose segment widths are the palette frequencies: segment `i` ends
/// at column `round(width * cumulative_frequency_i)`, so the bar always
/// spans the full width with no gaps.
pub fn render_palette_panel(
    image: &Raster,
    parts: &[(BinaryMask, Palette)],
) -> Result<Raster, ColourError> {
    let (width, height) = image.dims();
    for (mask, _) in parts {
        if mask.dims() != image.dims() {
            return Err(ColourError::Mask(MaskError::SizeMismatch {
                left_w: width,
                left_h: height,
                right_w: mask.width(),
                right_h: mask.height(),
            }));
        }
    }
    let section = SEPARATOR_HEIGHT + height + BAR_HEIGHT;
    let total_height = height + parts.len() as u32 * section;
    let mut out = Raster::filled(width, total_height, BACKGROUND)?;

    for y in 0..height {
        for x in 0..width {
            out.set_pixel(x, y, image.pixel(x, y));
        }
    }

    for (i, (mask, palette)) in parts.iter().enumerate() {
        let top = height + i as u32 * section + SEPARATOR_HEIGHT;
        for y in 0..height {
            for x in 0..width {
                if mask.get(x, y) {
                    out.set_pixel(x, top + y, image.pixel(x, y));
                }
            }
        }
        let bar_top = top + height;
        let mut cumulative = 0.0;
        let mut start = 0u32;
        for entry in palette.entries() {
            cumulative += entry.frequency;
            let end = ((width as f64 * cumulative).round() as u32).min(width);
            for x in start..end {
                for y in bar_top..bar_top + BAR_HEIGHT {
                    out.set_pixel(x, y, entry.rgb);
                }
            }
            start = end;
        }
    }
    Ok(out)
}
