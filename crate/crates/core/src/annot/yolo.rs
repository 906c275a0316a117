//! YOLO segmentation text format: one annotation per line,
//! `class x1 y1 x2 y2 ...` with coordinates normalized to `[0, 1]`.

use super::{AnnotError, BodyPart, PartAnnotation};

/// Parses one YOLO segmentation file. Blank lines are skipped; any
/// malformed line aborts with its 1-based line number. Coordinates are
/// denormalized against `dims`.
pub fn parse_yolo_seg(
    text: &str,
    dims: (u32, u32),
) -> Result<Vec<PartAnnotation>, AnnotError> {
    let (width, height) = dims;
    if width == 0 || height == 0 {
        return Err(AnnotError::EmptyDims(width, height));
    }
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let class_token = tokens.next().expect("non-empty line has a first token");
        let class: i64 = class_token
            .parse()
            .map_err(|_| AnnotError::YoloBadClass {
                line,
                token: class_token.to_string(),
            })?;
        if !(0..=3).contains(&class) {
            return Err(AnnotError::YoloUnknownClass { line, id: class });
        }
        let mut coords = Vec::new();
        for token in tokens {
            let value: f64 = token
                .parse()
                .map_err(|_| AnnotError::YoloBadCoordinate {
                    line,
                    token: token.to_string(),
                })?;
            coords.push(value);
        }
        if coords.len() % 2 != 0 {
            return Err(AnnotError::YoloOddCoordinates {
                line,
                count: coords.len(),
            });
        }
        if coords.len() < 6 {
            return Err(AnnotError::YoloTooFewVertices {
                line,
                count: coords.len() / 2,
            });
        }
        for &value in &coords {
            if !(0.0..=1.0).contains(&value) {
                return Err(AnnotError::YoloCoordinateOutOfRange { line, value });
            }
        }
        let polygon = coords
            .chunks_exact(2)
            .map(|pair| (pair[0] * width as f64, pair[1] * height as f64))
            .collect();
        out.push(PartAnnotation::new(
            BodyPart::from_class_id(class)?,
            polygon,
            1.0,
        )?);
    }
    Ok(out)
}

/// Writes annotations as YOLO segmentation lines, normalizing against
/// `dims` with six decimal places. Every vertex must lie within the
/// image bounds.
pub fn write_yolo_seg(
    annotations: &[PartAnnotation],
    dims: (u32, u32),
) -> Result<String, AnnotError> {
    let (width, height) = dims;
    if width == 0 || height == 0 {
        return Err(AnnotError::EmptyDims(width, height));
    }
    let mut out = String::new();
    for ann in annotations {
        out.push_str(&ann.part.class_id().to_string());
        for &(x, y) in ann.polygon() {
            if x < 0.0 || y < 0.0 || x > width as f64 || y > height as f64 {
                return Err(AnnotError::VertexOutOfBounds {
                    x,
                    y,
                    width,
                    height,
                });
            }
            out.push_str(&format!(
                " {:.6} {:.6}",
                x / width as f64,
                y / height as f64
            ));
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_denormalizes() {
        let anns = parse_yolo_seg("2 0.5 0.5 0.6 0.5 0.6 0.6\n", (100, 100)).unwrap();
        assert_eq!(anns.len(), 1);
        assert_eq!(anns[0].part, BodyPart::Abdomen);
        assert_eq!(
            anns[0].polygon(),
            &[(50.0, 50.0), (60.0, 50.0), (60.0, 60.0)]
        );
        let bbox = anns[0].bbox();
        assert_eq!((bbox.x, bbox.y, bbox.w, bbox.h), (50.0, 50.0, 10.0, 10.0));
    }

    #[test]
    fn skips_blank_lines_and_tracks_line_numbers() {
        let text = "0 0.1 0.1 0.2 0.1 0.2 0.2\n\n   \n1 0.3 0.3 0.4 0.3 0.4 0.4\n";
        let anns = parse_yolo_seg(text, (10, 10)).unwrap();
        assert_eq!(anns.len(), 2);
        assert_eq!(anns[1].part, BodyPart::Thorax);

        let bad = "0 0.1 0.1 0.2 0.1 0.2 0.2\n\nx 0.1 0.1 0.2 0.1 0.2 0.2\n";
        let err = parse_yolo_seg(bad, (10, 10)).unwrap_err();
        assert!(matches!(err, AnnotError::YoloBadClass { line: 3, .. }));
    }

    #[test]
    fn rejects_malformed_lines() {
        let cases: &[(&str, fn(&AnnotError) -> bool)] = &[
            ("7 0.1 0.1 0.2 0.1 0.2 0.2", |e| {
                matches!(e, AnnotError::YoloUnknownClass { line: 1, id: 7 })
            }),
            ("-1 0.1 0.1 0.2 0.1 0.2 0.2", |e| {
                matches!(e, AnnotError::YoloUnknownClass { line: 1, id: -1 })
            }),
            ("0 0.1 0.1 0.2 0.1 0.2", |e| {
                matches!(e, AnnotError::YoloOddCoordinates { line: 1, count: 5 })
            }),
            ("0 0.1 0.1 0.2 0.1", |e| {
                matches!(e, AnnotError::YoloTooFewVertices { line: 1, count: 2 })
            }),
            ("0 0.1 0.1 1.2 0.1 0.2 0.2", |e| {
                matches!(e, AnnotError::YoloCoordinateOutOfRange { line: 1, .. })
            }),
            ("0 0.1 0.1 -0.2 0.1 0.2 0.2", |e| {
                matches!(e, AnnotError::YoloCoordinateOutOfRange { line: 1, .. })
            }),
            ("0 0.1 0.1 abc 0.1 0.2 0.2", |e| {
                matches!(e, AnnotError::YoloBadCoordinate { line: 1, .. })
            }),
        ];
        for (text, check) in cases {
            let err = parse_yolo_seg(text, (10, 10)).unwrap_err();
            assert!(check(&err), "unexpected error {err:?} for {text:?}");
        }
    }

    #[test]
    fn write_then_parse_round_trips_within_half_pixel() {
        let anns = vec![
            PartAnnotation::new(
                BodyPart::Head,
                vec![(3.25, 4.5), (97.125, 5.0), (55.0, 88.875)],
                1.0,
            )
            .unwrap(),
            PartAnnotation::new(
                BodyPart::Wings,
                vec![(0.0, 0.0), (100.0, 0.0), (100.0, 100.0), (0.0, 100.0)],
                1.0,
            )
            .unwrap(),
        ];
        let text = write_yolo_seg(&anns, (100, 100)).unwrap();
        for line in text.lines() {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            for token in &tokens[1..] {
                let decimals = token.split('.').nth(1).unwrap();
                assert!(decimals.len() >= 6, "token {token} has too few decimals");
            }
        }
        let back = parse_yolo_seg(&text, (100, 100)).unwrap();
        assert_eq!(back.len(), anns.len());
        for (a, b) in anns.iter().zip(&back) {
            assert_eq!(a.part, b.part);
            for (&(ax, ay), &(bx, by)) in a.polygon().iter().zip(b.polygon()) {
                assert!((ax - bx).abs() <= 0.5 && (ay - by).abs() <= 0.5);
            }
        }
    }

    #[test]
    fn write_rejects_out_of_bounds_vertices() {
        let ann = PartAnnotation::new(
            BodyPart::Head,
            vec![(0.0, 0.0), (150.0, 0.0), (150.0, 50.0)],
            1.0,
        )
        .unwrap();
        assert!(matches!(
            write_yolo_seg(&[ann], (100, 100)),
            Err(AnnotError::VertexOutOfBounds { .. })
        ));
    }
}
