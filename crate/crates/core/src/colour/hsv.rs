//! Hexcone RGB/HSV conversion. Hue is in degrees `[0, 360)`,
//! saturation and value are fractions in `[0, 1]`.

use crate::maskops::Rgb;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsvTriple {
    pub h: f64,
    pub s: f64,
    pub v: f64,
}

impl HsvTriple {
    /// The 8-bit-friendly scale used by common imaging tooling:
    /// hue halved to `[0, 180)`, saturation and value stretched to
    /// `[0, 255]`.
    pub fn to_byte_scale(&self) -> [f64; 3] {
        [self.h / 2.0, self.s * 255.0, self.v * 255.0]
    }

    pub fn from_byte_scale(scaled: [f64; 3]) -> Self {
        HsvTriple {
            h: scaled[0] * 2.0,
            s: scaled[1] / 255.0,
            v: scaled[2] / 255.0,
        }
    }
}

/// Hexcone conversion. Achromatic pixels (including black) get hue 0
/// by convention; black additionally gets saturation 0.
pub fn rgb_to_hsv(rgb: Rgb) -> HsvTriple {
    let r = rgb[0] as f64 / 255.0;
    let g = rgb[1] as f64 / 255.0;
    let b = rgb[2] as f64 / 255.0;
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let range = max - min;
    let v = max;
    if max == 0.0 {
        return HsvTriple { h: 0.0, s: 0.0, v: 0.0 };
    }
    let s = range / max;
    if range == 0.0 {
        return HsvTriple { h: 0.0, s: 0.0, v };
    }
    let mut h = if max == r {
        (g - b) / range
    } else if max == g {
        (b - r) / range + 2.0
    } else {
        (r - g) / range + 4.0
    } * 60.0;
    if h < 0.0 {
        h += 360.0;
    }
    if h >= 360.0 {
        h -= 360.0;
    }
    HsvTriple { h, s, v }
}

/// Inverse hexcone conversion. Hue is wrapped into `[0, 360)`;
/// saturation and value are clamped to `[0, 1]`; channels round to the
/// nearest 8-bit value.
pub fn hsv_to_rgb(hsv: HsvTriple) -> Rgb {
    let mut h = hsv.h % 360.0;
    if h < 0.0 {
        h += 360.0;
    }
    let s = hsv.s.clamp(0.0, 1.0);
    let v = hsv.v.clamp(0.0, 1.0);
    let sector = (h / 60.0).floor();
    let f = h / 60.0 - sector;
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    let (r, g, b) = match sector as u32 {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    [
        (r * 255.0).round() as u8,
        (g * 255.0).round() as u8,
        (b * 255.0).round() as u8,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_hsv(rgb: Rgb, h: f64, s: f64, v: f64) {
        let got = rgb_to_hsv(rgb);
        assert_eq!((got.h, got.s, got.v), (h, s, v), "for {rgb:?}");
    }

    #[test]
    fn primary_and_achromatic_corners_are_exact() {
        assert_hsv([255, 0, 0], 0.0, 1.0, 1.0);
        assert_hsv([0, 255, 0], 120.0, 1.0, 1.0);
        assert_hsv([0, 0, 255], 240.0, 1.0, 1.0);
        assert_hsv([255, 255, 0], 60.0, 1.0, 1.0);
        assert_hsv([0, 255, 255], 180.0, 1.0, 1.0);
        assert_hsv([255, 0, 255], 300.0, 1.0, 1.0);
        assert_hsv([0, 0, 0], 0.0, 0.0, 0.0);
        assert_hsv([255, 255, 255], 0.0, 0.0, 1.0);
        let grey = rgb_to_hsv([128, 128, 128]);
        assert_eq!((grey.h, grey.s), (0.0, 0.0));
        assert!((grey.v - 128.0 / 255.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_maps_corners_back() {
        for rgb in [
            [255, 0, 0],
            [0, 255, 0],
            [0, 0, 255],
            [255, 255, 0],
            [0, 255, 255],
            [255, 0, 255],
            [0, 0, 0],
            [255, 255, 255],
        ] {
            assert_eq!(hsv_to_rgb(rgb_to_hsv(rgb)), rgb);
        }
    }

    #[test]
    fn hue_wraps_and_clamps() {
        assert_eq!(
            hsv_to_rgb(HsvTriple { h: 360.0, s: 1.0, v: 1.0 }),
            [255, 0, 0]
        );
        assert_eq!(
            hsv_to_rgb(HsvTriple { h: -60.0, s: 1.0, v: 1.0 }),
            [255, 0, 255]
        );
        assert_eq!(
            hsv_to_rgb(HsvTriple { h: 0.0, s: 2.0, v: -1.0 }),
            [0, 0, 0]
        );
    }

    #[test]
    fn byte_scale_round_trips() {
        let hsv = HsvTriple { h: 210.0, s: 0.5, v: 0.25 };
        let scaled = hsv.to_byte_scale();
        assert_eq!(scaled, [105.0, 127.5, 63.75]);
        let back = HsvTriple::from_byte_scale(scaled);
        assert!((back.h - hsv.h).abs() < 1e-12);
        assert!((back.s - hsv.s).abs() < 1e-12);
        assert!((back.v - hsv.v).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn ranges_and_round_trip(r in any::<u8>(), g in any::<u8>(), b in any::<u8>()) {
            let hsv = rgb_to_hsv([r, g, b]);
            prop_assert!((0.0..360.0).contains(&hsv.h));
            prop_assert!((0.0..=1.0).contains(&hsv.s));
            prop_assert!((0.0..=1.0).contains(&hsv.v));
            let back = hsv_to_rgb(hsv);
            // Within one 8-bit step per channel.
            prop_assert!(back[0].abs_diff(r) <= 1);
            prop_assert!(back[1].abs_diff(g) <= 1);
            prop_assert!(back[2].abs_diff(b) <= 1);
        }
    }
}
