//! Dominant-colour palettes and per-part colour statistics, plus
//! their CSV encodings.

use super::hsv::{rgb_to_hsv, HsvTriple};
use super::kmeans::{kmeans, KMeansParams};
use super::ColourError;
use crate::annot::BodyPart;
use crate::maskops::Rgb;

/// One palette colour with its share of the clustered pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaletteEntry {
    pub rgb: Rgb,
    pub frequency: f64,
}

/// Colours ordered by descending frequency; ties order by packed RGB
/// ascending. Frequencies are positive and sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Palette {
    entries: Vec<PaletteEntry>,
}

fn packed(rgb: Rgb) -> u32 {
    (rgb[0] as u32) << 16 | (rgb[1] as u32) << 8 | rgb[2] as u32
}

impl Palette {
    /// Builds a palette from raw entries, sorting them into canonical
    /// order and validating the frequency law.
    pub fn from_entries(mut entries: Vec<PaletteEntry>) -> Result<Self, ColourError> {
        let mut sum = 0.0;
        for e in &entries {
            if !e.frequency.is_finite() || e.frequency <= 0.0 || e.frequency > 1.0 {
                return Err(ColourError::BadFrequency(e.frequency));
            }
            sum += e.frequency;
        }
        if !entries.is_empty() && (sum - 1.0).abs() > 1e-9 {
            return Err(ColourError::BadFrequencySum(sum));
        }
        entries.sort_by(|a, b| {
            b.frequency
                .total_cmp(&a.frequency)
                .then(packed(a.rgb).cmp(&packed(b.rgb)))
        });
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[PaletteEntry] {
        &self.entries
    }
}

/// Clusters pixels with seeded k-means and reports one palette entry
/// per non-empty cluster: the rounded centroid colour and the share of
/// pixels assigned to it. At most `params.k` entries come back.
pub fn build_palette(pixels: &[Rgb], params: &KMeansParams) -> Result<Palette, ColourError> {
    if pixels.is_empty() {
        return Err(ColourError::EmptyPixels);
    }
    let points: Vec<[f64; 3]> = pixels
        .iter()
        .map(|p| [p[0] as f64, p[1] as f64, p[2] as f64])
        .collect();
    let result = kmeans(&points, params)?;
    let mut counts = vec![0usize; params.k];
    for &a in &result.assignment {
        counts[a] += 1;
    }
    let total = points.len() as f64;
    let entries = (0..params.k)
        .filter(|&c| counts[c] > 0)
        .map(|c| PaletteEntry {
            rgb: result.centroids[c].map(|v| v.round().clamp(0.0, 255.0) as u8),
            frequency: counts[c] as f64 / total,
        })
        .collect();
    Palette::from_entries(entries)
}

/// Mean colour of one body part's pixels, in RGB and HSV.
#[derive(Debug, Clone, PartialEq)]
pub struct PartColourStats {
    pub part: BodyPart,
    pub pixel_count: usize,
    pub mean_rgb: [f64; 3],
    /// `h` is the saturation-weighted circular mean of per-pixel hues
    /// (0 when every pixel is achromatic); `s` and `v` are arithmetic
    /// means of per-pixel saturation and value.
    pub mean_hsv: HsvTriple,
}

pub fn mean_part_colour(part: BodyPart, pixels: &[Rgb]) -> Result<PartColourStats, ColourError> {
    if pixels.is_empty() {
        return Err(ColourError::EmptyPixels);
    }
    let n = pixels.len() as f64;
    let mut sum_rgb = [0.0f64; 3];
    let mut sum_sin = 0.0f64;
    let mut sum_cos = 0.0f64;
    let mut sum_s = 0.0f64;
    let mut sum_v = 0.0f64;
    for &p in pixels {
        for d in 0..3 {
            sum_rgb[d] += p[d] as f64;
        }
        let hsv = rgb_to_hsv(p);
        let rad = hsv.h.to_radians();
        sum_sin += hsv.s * rad.sin();
        sum_cos += hsv.s * rad.cos();
        sum_s += hsv.s;
        sum_v += hsv.v;
    }
    let mean_h = if sum_sin.hypot(sum_cos) < 1e-9 {
        0.0
    } else {
        let mut h = sum_sin.atan2(sum_cos).to_degrees();
        if h < 0.0 {
            h += 360.0;
        }
        if h >= 360.0 {
            h -= 360.0;
        }
        h
    };
    Ok(PartColourStats {
        part,
        pixel_count: pixels.len(),
        mean_rgb: sum_rgb.map(|s| s / n),
        mean_hsv: HsvTriple {
            h: mean_h,
            s: sum_s / n,
            v: sum_v / n,
        },
    })
}

pub const PALETTE_CSV_HEADER: &str = "record_id,part,rank,r,g,b,frequency";
pub const STATS_CSV_HEADER: &str =
    "record_id,part,pixel_count,mean_r,mean_g,mean_b,mean_h,mean_s,mean_v";

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new())
}

fn finish(writer: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(writer.into_inner().expect("in-memory writer"))
        .expect("CSV output is UTF-8")
}

/// Serializes palettes as CSV with one row per palette entry. `rank`
/// is 1-based in palette order (most frequent first).
pub fn palettes_to_csv(rows: &[(String, BodyPart, Palette)]) -> String {
    let mut writer = csv_writer();
    writer
        .write_record(PALETTE_CSV_HEADER.split(','))
        .expect("header");
    for (record_id, part, palette) in rows {
        for (rank, entry) in palette.entries().iter().enumerate() {
            writer
                .write_record([
                    record_id.as_str(),
                    part.name(),
                    &(rank + 1).to_string(),
                    &entry.rgb[0].to_string(),
                    &entry.rgb[1].to_string(),
                    &entry.rgb[2].to_string(),
                    &entry.frequency.to_string(),
                ])
                .expect("palette row");
        }
    }
    finish(writer)
}

/// Serializes per-part colour statistics as CSV. With `byte_scale`
/// the HSV columns use the 8-bit-friendly scale (`h/2`, `s*255`,
/// `v*255`); otherwise hue is in degrees and s/v are fractions.
pub fn stats_to_csv(rows: &[(String, PartColourStats)], byte_scale: bool) -> String {
    let mut writer = csv_writer();
    writer
        .write_record(STATS_CSV_HEADER.split(','))
        .expect("header");
    for (record_id, stats) in rows {
        let hsv = if byte_scale {
            stats.mean_hsv.to_byte_scale()
        } else {
            [stats.mean_hsv.h, stats.mean_hsv.s, stats.mean_hsv.v]
        };
        writer
            .write_record([
                record_id.as_str(),
                stats.part.name(),
                &stats.pixel_count.to_string(),
                &stats.mean_rgb[0].to_string(),
                &stats.mean_rgb[1].to_string(),
                &stats.mean_rgb[2].to_string(),
                &hsv[0].to_string(),
                &hsv[1].to_string(),
                &hsv[2].to_string(),
            ])
            .expect("stats row");
    }
    finish(writer)
}

/// Parses a stats CSV back into rows. `byte_scale` must match the
/// flag the file was written with.
pub fn read_stats_csv(
    text: &str,
    byte_scale: bool,
) -> Result<Vec<(String, PartColourStats)>, ColourError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|_| ColourError::StatsCsvMissingHeader)?
        .clone();
    let got = headers.iter().collect::<Vec<_>>().join(",");
    if got != STATS_CSV_HEADER {
        return Err(ColourError::StatsCsvHeader {
            expected: STATS_CSV_HEADER.to_string(),
            got,
        });
    }
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let number = i as u64 + 1;
        let field = |idx: usize| -> Result<&str, ColourError> {
            record.get(idx).ok_or(ColourError::StatsCsvRecord {
                record: number,
                message: format!("missing field {idx}"),
            })
        };
        let parse_f64 = |idx: usize| -> Result<f64, ColourError> {
            let raw = field(idx)?;
            raw.parse().map_err(|_| ColourError::StatsCsvRecord {
                record: number,
                message: format!("'{raw}' is not a number"),
            })
        };
        let record_id = field(0)?.to_string();
        if record_id.is_empty() {
            return Err(ColourError::StatsCsvRecord {
                record: number,
                message: "empty record_id".to_string(),
            });
        }
        let part = BodyPart::from_name(field(1)?).map_err(|e| ColourError::StatsCsvRecord {
            record: number,
            message: e.to_string(),
        })?;
        let pixel_count: usize =
            field(2)?
                .parse()
                .map_err(|_| ColourError::StatsCsvRecord {
                    record: number,
                    message: format!("'{}' is not a count", record.get(2).unwrap_or("")),
                })?;
        let mean_rgb = [parse_f64(3)?, parse_f64(4)?, parse_f64(5)?];
        let raw_hsv = [parse_f64(6)?, parse_f64(7)?, parse_f64(8)?];
        let mean_hsv = if byte_scale {
            HsvTriple::from_byte_scale(raw_hsv)
        } else {
            HsvTriple {
                h: raw_hsv[0],
                s: raw_hsv[1],
                v: raw_hsv[2],
            }
        };
        out.push((
            record_id,
            PartColourStats {
                part,
                pixel_count,
                mean_rgb,
                mean_hsv,
            },
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn uniform(colour: Rgb, n: usize) -> Vec<Rgb> {
        vec![colour; n]
    }

    #[test]
    fn build_palette_rejects_empty_pixels() {
        assert!(matches!(
            build_palette(&[], &KMeansParams::default()),
            Err(ColourError::EmptyPixels)
        ));
        assert!(matches!(
            mean_part_colour(BodyPart::Head, &[]),
            Err(ColourError::EmptyPixels)
        ));
    }

    #[test]
    fn two_colour_palette_orders_by_frequency() {
        let mut pixels = uniform([200, 10, 10], 60);
        pixels.extend(uniform([10, 10, 200], 40));
        let palette = build_palette(&pixels, &KMeansParams { k: 2, seed: 1, ..Default::default() })
            .unwrap();
        let entries = palette.entries();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].rgb, [200, 10, 10]);
        assert_eq!(entries[0].frequency, 0.6);
        assert_eq!(entries[1].rgb, [10, 10, 200]);
        assert_eq!(entries[1].frequency, 0.4);
    }

    #[test]
    fn uniform_pixels_collapse_to_single_entry() {
        let palette = build_palette(
            &uniform([42, 99, 7], 500),
            &KMeansParams { k: 5, seed: 0, ..Default::default() },
        )
        .unwrap();
        assert_eq!(palette.entries().len(), 1);
        assert_eq!(palette.entries()[0].rgb, [42, 99, 7]);
        assert_eq!(palette.entries()[0].frequency, 1.0);
    }

    #[test]
    fn equal_frequencies_tie_break_by_packed_rgb() {
        let entries = vec![
            PaletteEntry { rgb: [10, 0, 0], frequency: 0.5 },
            PaletteEntry { rgb: [0, 10, 0], frequency: 0.5 },
        ];
        let palette = Palette::from_entries(entries).unwrap();
        assert_eq!(palette.entries()[0].rgb, [0, 10, 0]);
        assert_eq!(palette.entries()[1].rgb, [10, 0, 0]);
    }

    #[test]
    fn from_entries_validates_frequency_law() {
        assert!(matches!(
            Palette::from_entries(vec![PaletteEntry { rgb: [0, 0, 0], frequency: 0.0 }]),
            Err(ColourError::BadFrequency(_))
        ));
        assert!(matches!(
            Palette::from_entries(vec![PaletteEntry { rgb: [0, 0, 0], frequency: 0.7 }]),
            Err(ColourError::BadFrequencySum(_))
        ));
    }

    #[test]
    fn mean_part_colour_weights_hue_by_saturation() {
        // Grey pixels are achromatic: they must not drag the mean hue.
        let pixels = vec![[255, 0, 0], [128, 128, 128]];
        let stats = mean_part_colour(BodyPart::Thorax, &pixels).unwrap();
        assert_eq!(stats.mean_hsv.h, 0.0);
        assert!((stats.mean_hsv.s - 0.5).abs() < 1e-12);
        let expected_v = (1.0 + 128.0 / 255.0) / 2.0;
        assert!((stats.mean_hsv.v - expected_v).abs() < 1e-12);
        assert_eq!(stats.mean_rgb, [191.5, 64.0, 64.0]);
        assert_eq!(stats.pixel_count, 2);
    }

    #[test]
    fn mean_hue_wraps_across_zero() {
        // Hues symmetric around 0 average to 0, not 180.
        let a = crate::colour::hsv_to_rgb(HsvTriple { h: 20.0, s: 1.0, v: 1.0 });
        let b = crate::colour::hsv_to_rgb(HsvTriple { h: 340.0, s: 1.0, v: 1.0 });
        let stats = mean_part_colour(BodyPart::Head, &[a, b]).unwrap();
        let h = stats.mean_hsv.h;
        assert!(h < 1.0 || h > 359.0, "mean hue {h} should sit near 0");
    }

    #[test]
    fn all_achromatic_pixels_give_zero_hue() {
        let stats =
            mean_part_colour(BodyPart::Head, &[[0, 0, 0], [255, 255, 255], [77, 77, 77]])
                .unwrap();
        assert_eq!(stats.mean_hsv.h, 0.0);
        assert_eq!(stats.mean_hsv.s, 0.0);
    }

    #[test]
    fn palette_csv_layout() {
        let palette = Palette::from_entries(vec![
            PaletteEntry { rgb: [1, 2, 3], frequency: 0.75 },
            PaletteEntry { rgb: [9, 8, 7], frequency: 0.25 },
        ])
        .unwrap();
        let csv = palettes_to_csv(&[("rec-1".to_string(), BodyPart::Abdomen, palette)]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], PALETTE_CSV_HEADER);
        assert_eq!(lines[1], "rec-1,abdomen,1,1,2,3,0.75");
        assert_eq!(lines[2], "rec-1,abdomen,2,9,8,7,0.25");
    }

    #[test]
    fn stats_csv_round_trips_both_scales() {
        let stats = PartColourStats {
            part: BodyPart::Wings,
            pixel_count: 123,
            mean_rgb: [12.5, 200.0, 31.25],
            mean_hsv: HsvTriple { h: 245.5, s: 0.5, v: 0.625 },
        };
        for byte_scale in [false, true] {
            let csv = stats_to_csv(&[("r0".to_string(), stats.clone())], byte_scale);
            assert!(csv.starts_with(STATS_CSV_HEADER));
            let back = read_stats_csv(&csv, byte_scale).unwrap();
            assert_eq!(back.len(), 1);
            assert_eq!(back[0].0, "r0");
            let got = &back[0].1;
            assert_eq!(got.part, stats.part);
            assert_eq!(got.pixel_count, stats.pixel_count);
            assert!((got.mean_hsv.h - stats.mean_hsv.h).abs() < 1e-9);
            assert!((got.mean_hsv.s - stats.mean_hsv.s).abs() < 1e-12);
            assert!((got.mean_hsv.v - stats.mean_hsv.v).abs() < 1e-12);
        }
    }

    #[test]
    fn read_stats_csv_rejects_wrong_header_and_bad_rows() {
        assert!(matches!(
            read_stats_csv("a,b,c\n1,2,3\n", false),
            Err(ColourError::StatsCsvHeader { .. })
        ));
        let bad = format!("{STATS_CSV_HEADER}\nr0,antenna,1,0,0,0,0,0,0\n");
        assert!(matches!(
            read_stats_csv(&bad, false),
            Err(ColourError::StatsCsvRecord { record: 1, .. })
        ));
        let bad = format!("{STATS_CSV_HEADER}\nr0,head,1,0,0,x,0,0,0\n");
        assert!(matches!(
            read_stats_csv(&bad, false),
            Err(ColourError::StatsCsvRecord { record: 1, .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn palette_law_holds(
            raw in proptest::collection::vec((any::<u8>(), any::<u8>(), any::<u8>()), 1..120),
            k in 1usize..7,
            seed in any::<u64>(),
        ) {
            let pixels: Vec<Rgb> = raw.iter().map(|&(r, g, b)| [r, g, b]).collect();
            let params = KMeansParams { k, seed, ..Default::default() };
            let palette = build_palette(&pixels, &params).unwrap();
            let entries = palette.entries();
            prop_assert!(!entries.is_empty());
            prop_assert!(entries.len() <= k);
            let sum: f64 = entries.iter().map(|e| e.frequency).sum();
            prop_assert!((sum - 1.0).abs() <= 1e-9);
            for e in entries {
                prop_assert!(e.frequency > 0.0);
            }
            for w in entries.windows(2) {
                prop_assert!(
                    w[0].frequency > w[1].frequency
                        || (w[0].frequency == w[1].frequency
                            && packed(w[0].rgb) <= packed(w[1].rgb))
                );
            }
        }
    }
}
