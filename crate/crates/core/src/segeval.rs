//! Segmentation evaluation with the COCO protocol: greedy score-first
//! matching, 101-point interpolated average precision on a 0-100
//! scale, and mAP averaged over IoU thresholds 0.50:0.05:0.95 for
//! both bounding boxes and masks.

use std::collections::BTreeMap;
use std::collections::HashMap;

use thiserror::Error;

use crate::annot::{AnnotError, AnnotationSet, BBox, BodyPart};
use crate::maskops::{rasterize_polygon, BinaryMask, MaskError};
use crate::par;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("IoU threshold {0} outside (0, 1)")]
    BadThreshold(f64),
    #[error("mask evaluation requested but an instance has no mask")]
    MissingMask,
    #[error("image '{image_id}': prediction dims {pred_w}x{pred_h} differ from ground truth {gt_w}x{gt_h}")]
    DimsMismatch {
        image_id: String,
        pred_w: u32,
        pred_h: u32,
        gt_w: u32,
        gt_h: u32,
    },
    #[error(transparent)]
    Mask(#[from] MaskError),
    #[error(transparent)]
    Annot(#[from] AnnotError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Bbox,
    Mask,
}

/// One scored predicted instance.
#[derive(Debug, Clone)]
pub struct Detection {
    pub image_id: String,
    pub part: BodyPart,
    pub score: f64,
    pub bbox: BBox,
    pub mask: Option<BinaryMask>,
}

/// One ground-truth instance.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub image_id: String,
    pub part: BodyPart,
    pub bbox: BBox,
    pub mask: Option<BinaryMask>,
}

/// Intersection over union of two boxes; degenerate unions give 0.
pub fn iou_bbox(a: &BBox, b: &BBox) -> f64 {
    let ix = (a.x + a.w).min(b.x + b.w) - a.x.max(b.x);
    let iy = (a.y + a.h).min(b.y + b.h) - a.y.max(b.y);
    if ix <= 0.0 || iy <= 0.0 {
        return 0.0;
    }
    let inter = ix * iy;
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}

/// Intersection over union of two same-sized masks; two empty masks
/// give 0.
pub fn iou_mask(a: &BinaryMask, b: &BinaryMask) -> Result<f64, EvalError> {
    if a.dims() != b.dims() {
        return Err(EvalError::Mask(MaskError::SizeMismatch {
            left_w: a.width(),
            left_h: a.height(),
            right_w: b.width(),
            right_h: b.height(),
        }));
    }
    let mut inter = 0usize;
    let mut union = 0usize;
    for (&x, &y) in a.bits().iter().zip(b.bits()) {
        if x && y {
            inter += 1;
        }
        if x || y {
            union += 1;
        }
    }
    if union == 0 {
        Ok(0.0)
    } else {
        Ok(inter as f64 / union as f64)
    }
}

fn instance_iou(det: &Detection, gt: &GroundTruth, mode: EvalMode) -> Result<f64, EvalError> {
    match mode {
        EvalMode::Bbox => Ok(iou_bbox(&det.bbox, &gt.bbox)),
        EvalMode::Mask => {
            let (Some(dm), Some(gm)) = (&det.mask, &gt.mask) else {
                return Err(EvalError::MissingMask);
            };
            iou_mask(dm, gm)
        }
    }
}

/// 101-point interpolated AP on a 0-100 scale: mean over recall
/// samples 0.00, 0.01, ..., 1.00 of the maximum precision at any
/// recall at or above the sample.
fn ap_101(tp_flags: &[bool], total_gt: usize) -> f64 {
    let mut recalls = Vec::with_capacity(tp_flags.len());
    let mut precisions = Vec::with_capacity(tp_flags.len());
    let mut tp = 0usize;
    for (i, &hit) in tp_flags.iter().enumerate() {
        if hit {
            tp += 1;
        }
        recalls.push(tp as f64 / total_gt as f64);
        precisions.push(tp as f64 / (i + 1) as f64);
    }
    let mut sum = 0.0;
    let mut idx = precisions.len();
    let mut running_max = 0.0f64;
    for sample in (0..=100u32).rev() {
        let r = sample as f64 / 100.0;
        while idx > 0 && recalls[idx - 1] >= r {
            idx -= 1;
            running_max = running_max.max(precisions[idx]);
        }
        sum += running_max;
    }
    sum / 101.0 * 100.0
}

/// Average precision for one part at one IoU threshold, or `None`
/// when that part has no ground truth. Detections are matched in
/// descending score order (ties keep input order) to the unmatched
/// same-image ground truth with the highest IoU at or above the
/// threshold.
pub fn average_precision(
    detections: &[Detection],
    ground_truths: &[GroundTruth],
    part: BodyPart,
    iou_threshold: f64,
    mode: EvalMode,
) -> Result<Option<f64>, EvalError> {
    if !(iou_threshold > 0.0 && iou_threshold < 1.0) {
        return Err(EvalError::BadThreshold(iou_threshold));
    }
    let mut gt_by_image: HashMap<&str, Vec<usize>> = HashMap::new();
    let mut total_gt = 0usize;
    for (i, gt) in ground_truths.iter().enumerate() {
        if gt.part == part {
            gt_by_image.entry(gt.image_id.as_str()).or_default().push(i);
            total_gt += 1;
        }
    }
    if total_gt == 0 {
        return Ok(None);
    }

    let mut dets: Vec<&Detection> =
        detections.iter().filter(|d| d.part == part).collect();
    dets.sort_by(|a, b| b.score.total_cmp(&a.score)); // stable: ties keep order

    let mut gt_matched = vec![false; ground_truths.len()];
    let mut tp_flags = Vec::with_capacity(dets.len());
    for det in dets {
        let mut best: Option<(usize, f64)> = None;
        if let Some(candidates) = gt_by_image.get(det.image_id.as_str()) {
            for &gi in candidates {
                if gt_matched[gi] {
                    continue;
                }
                let iou = instance_iou(det, &ground_truths[gi], mode)?;
                if iou >= iou_threshold && best.map_or(true, |(_, b)| iou > b) {
                    best = Some((gi, iou));
                }
            }
        }
        match best {
            Some((gi, _)) => {
                gt_matched[gi] = true;
                tp_flags.push(true);
            }
            None => tp_flags.push(false),
        }
    }
    Ok(Some(ap_101(&tp_flags, total_gt)))
}

/// Per-mode metrics, all on a 0-100 scale. `None` per-class entries
/// mean the class had no ground truth and was excluded from means.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeReport {
    /// Mean AP over classes and IoU thresholds 0.50:0.05:0.95.
    pub map: f64,
    /// Mean AP over classes at IoU 0.50.
    pub map50: f64,
    /// Mean AP over classes at IoU 0.75.
    pub map75: f64,
    /// Per-class AP averaged over the ten thresholds.
    pub ap_per_class: BTreeMap<BodyPart, Option<f64>>,
    /// Per-class AP at IoU 0.50.
    pub ap50_per_class: BTreeMap<BodyPart, Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub bbox: ModeReport,
    pub mask: ModeReport,
}

const THRESHOLDS: [f64; 10] = [0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95];

fn flatten(
    sets: &[AnnotationSet],
    scores: bool,
) -> Result<(Vec<Detection>, Vec<GroundTruth>), EvalError> {
    let mut dets = Vec::new();
    let mut gts = Vec::new();
    for set in sets {
        for ann in set.annotations() {
            let mask = rasterize_polygon(ann.polygon(), set.dims())?;
            if scores {
                dets.push(Detection {
                    image_id: set.image_id().to_string(),
                    part: ann.part,
                    score: ann.score(),
                    bbox: ann.bbox(),
                    mask: Some(mask),
                });
            } else {
                gts.push(GroundTruth {
                    image_id: set.image_id().to_string(),
                    part: ann.part,
                    bbox: ann.bbox(),
                    mask: Some(mask),
                });
            }
        }
    }
    Ok((dets, gts))
}

fn mean_of_present(values: impl Iterator<Item = Option<f64>>) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for v in values.flatten() {
        sum += v;
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

fn mode_report(
    detections: &[Detection],
    ground_truths: &[GroundTruth],
    mode: EvalMode,
) -> Result<ModeReport, EvalError> {
    // One AP task per (class, threshold); these are independent.
    let tasks: Vec<(BodyPart, f64)> = BodyPart::ALL
        .iter()
        .flat_map(|&p| THRESHOLDS.iter().map(move |&t| (p, t)))
        .collect();
    let results = par::map_items(&tasks, |&(part, threshold)| {
        average_precision(detections, ground_truths, part, threshold, mode)
    });
    let mut by_task: HashMap<(BodyPart, u32), Option<f64>> = HashMap::new();
    for ((part, threshold), result) in tasks.iter().zip(results) {
        by_task.insert((*part, (threshold * 100.0).round() as u32), result?);
    }

    let mut ap_per_class = BTreeMap::new();
    let mut ap50_per_class = BTreeMap::new();
    for part in BodyPart::ALL {
        let over_thresholds: Vec<Option<f64>> = THRESHOLDS
            .iter()
            .map(|&t| by_task[&(part, (t * 100.0).round() as u32)])
            .collect();
        let averaged = if over_thresholds.iter().all(|v| v.is_none()) {
            None
        } else {
            Some(mean_of_present(over_thresholds.iter().copied()))
        };
        ap_per_class.insert(part, averaged);
        ap50_per_class.insert(part, by_task[&(part, 50)]);
    }
    let map75: f64 = mean_of_present(
        BodyPart::ALL
            .iter()
            .map(|&p| by_task[&(p, 75)]),
    );
    Ok(ModeReport {
        map: mean_of_present(ap_per_class.values().copied()),
        map50: mean_of_present(ap50_per_class.values().copied()),
        map75,
        ap_per_class,
        ap50_per_class,
    })
}

/// Evaluates predictions against ground truth in both bbox and mask
/// modes. Sets are paired by image id; prediction sets for unknown
/// images are ignored (standard COCO behaviour), and a paired set
/// whose dimensions disagree with the ground truth is an error.
pub fn evaluate(
    predictions: &[AnnotationSet],
    ground_truth: &[AnnotationSet],
) -> Result<EvalReport, EvalError> {
    let gt_dims: HashMap<&str, (u32, u32)> = ground_truth
        .iter()
        .map(|s| (s.image_id(), s.dims()))
        .collect();
    let mut paired_predictions: Vec<&AnnotationSet> = Vec::new();
    for pred in predictions {
        match gt_dims.get(pred.image_id()) {
            None => continue,
            Some(&dims) if dims != pred.dims() => {
                return Err(EvalError::DimsMismatch {
                    image_id: pred.image_id().to_string(),
                    pred_w: pred.dims().0,
                    pred_h: pred.dims().1,
                    gt_w: dims.0,
                    gt_h: dims.1,
                });
            }
            Some(_) => paired_predictions.push(pred),
        }
    }
    let owned: Vec<AnnotationSet> = paired_predictions.into_iter().cloned().collect();
    let (dets, _) = flatten(&owned, true)?;
    let (_, gts) = flatten(ground_truth, false)?;
    Ok(EvalReport {
        bbox: mode_report(&dets, &gts, EvalMode::Bbox)?,
        mask: mode_report(&dets, &gts, EvalMode::Mask)?,
    })
}

fn fmt_ap(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:.2}"),
        None => "-".to_string(),
    }
}

impl EvalReport {
    /// Long-form CSV: one row per mode with overall and per-class
    /// columns (threshold-averaged AP and AP at IoU 0.50).
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "mode,map,map50,map75,ap_head,ap_thorax,ap_abdomen,ap_wings,\
             ap50_head,ap50_thorax,ap50_abdomen,ap50_wings\n",
        );
        for (name, report) in [("bbox", &self.bbox), ("mask", &self.mask)] {
            let ap = |part: BodyPart| fmt_ap(report.ap_per_class[&part]);
            let ap50 = |part: BodyPart| fmt_ap(report.ap50_per_class[&part]);
            out.push_str(&format!(
                "{name},{:.2},{:.2},{:.2},{},{},{},{},{},{},{},{}\n",
                report.map,
                report.map50,
                report.map75,
                ap(BodyPart::Head),
                ap(BodyPart::Thorax),
                ap(BodyPart::Abdomen),
                ap(BodyPart::Wings),
                ap50(BodyPart::Head),
                ap50(BodyPart::Thorax),
                ap50(BodyPart::Abdomen),
                ap50(BodyPart::Wings),
            ));
        }
        out
    }

    /// Aligned plain-text table, metrics as rows and modes as columns.
    pub fn to_table(&self) -> String {
        let mut rows: Vec<(String, String, String)> = vec![
            (
                "mAP".to_string(),
                format!("{:.2}", self.bbox.map),
                format!("{:.2}", self.mask.map),
            ),
            (
                "mAP50".to_string(),
                format!("{:.2}", self.bbox.map50),
                format!("{:.2}", self.mask.map50),
            ),
            (
                "mAP75".to_string(),
                format!("{:.2}", self.bbox.map75),
                format!("{:.2}", self.mask.map75),
            ),
        ];
        for part in BodyPart::ALL {
            rows.push((
                format!("AP-{part}"),
                fmt_ap(self.bbox.ap_per_class[&part]),
                fmt_ap(self.mask.ap_per_class[&part]),
            ));
        }
        for part in BodyPart::ALL {
            rows.push((
                format!("AP50-{part}"),
                fmt_ap(self.bbox.ap50_per_class[&part]),
                fmt_ap(self.mask.ap50_per_class[&part]),
            ));
        }
        let metric_width = rows.iter().map(|r| r.0.len()).max().unwrap_or(6).max(6);
        let col_width = rows
            .iter()
            .flat_map(|r| [r.1.len(), r.2.len()])
            .max()
            .unwrap_or(6)
            .max(6);
        let mut out = format!(
            "{:<metric_width$}  {:>col_width$}  {:>col_width$}\n",
            "metric", "bbox", "mask"
        );
        for (metric, bbox, mask) in rows {
            out.push_str(&format!(
                "{metric:<metric_width$}  {bbox:>col_width$}  {mask:>col_width$}\n"
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annot::PartAnnotation;

    fn det(image: &str, part: BodyPart, score: f64, bbox: (f64, f64, f64, f64)) -> Detection {
        Detection {
            image_id: image.to_string(),
            part,
            score,
            bbox: BBox { x: bbox.0, y: bbox.1, w: bbox.2, h: bbox.3 },
            mask: None,
        }
    }

    fn gt(image: &str, part: BodyPart, bbox: (f64, f64, f64, f64)) -> GroundTruth {
        GroundTruth {
            image_id: image.to_string(),
            part,
            bbox: BBox { x: bbox.0, y: bbox.1, w: bbox.2, h: bbox.3 },
            mask: None,
        }
    }

    #[test]
    fn iou_bbox_known_values() {
        let a = BBox { x: 0.0, y: 0.0, w: 10.0, h: 10.0 };
        assert_eq!(iou_bbox(&a, &a), 1.0);
        let b = BBox { x: 10.0, y: 0.0, w: 10.0, h: 10.0 };
        assert_eq!(iou_bbox(&a, &b), 0.0);
        let c = BBox { x: 5.0, y: 0.0, w: 10.0, h: 10.0 };
        // Intersection 50, union 150.
        assert!((iou_bbox(&a, &c) - 1.0 / 3.0).abs() < 1e-12);
        let degenerate = BBox { x: 0.0, y: 0.0, w: 0.0, h: 0.0 };
        assert_eq!(iou_bbox(&degenerate, &degenerate), 0.0);
    }

    #[test]
    fn iou_mask_counts_bits() {
        let mut a = BinaryMask::empty(4, 1).unwrap();
        a.set(0, 0, true);
        a.set(1, 0, true);
        let mut b = BinaryMask::empty(4, 1).unwrap();
        b.set(1, 0, true);
        b.set(2, 0, true);
        assert!((iou_mask(&a, &b).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        let empty = BinaryMask::empty(4, 1).unwrap();
        assert_eq!(iou_mask(&empty, &empty).unwrap(), 0.0);
        let other = BinaryMask::empty(3, 1).unwrap();
        assert!(iou_mask(&a, &other).is_err());
    }

    #[test]
    fn perfect_predictions_score_one_hundred() {
        let gts = vec![
            gt("a", BodyPart::Head, (0.0, 0.0, 10.0, 10.0)),
            gt("a", BodyPart::Thorax, (20.0, 0.0, 10.0, 10.0)),
            gt("b", BodyPart::Head, (5.0, 5.0, 8.0, 8.0)),
        ];
        let dets = vec![
            det("a", BodyPart::Head, 0.9, (0.0, 0.0, 10.0, 10.0)),
            det("a", BodyPart::Thorax, 0.8, (20.0, 0.0, 10.0, 10.0)),
            det("b", BodyPart::Head, 0.95, (5.0, 5.0, 8.0, 8.0)),
        ];
        for threshold in [0.5, 0.75, 0.95] {
            let ap = average_precision(&dets, &gts, BodyPart::Head, threshold, EvalMode::Bbox)
                .unwrap()
                .unwrap();
            assert_eq!(ap, 100.0);
        }
    }

    #[test]
    fn textbook_half_precision_case() {
        // One GT; a non-matching detection outranks a matching one:
        // precision 1/2 at recall 1 gives AP 50.
        let gts = vec![gt("a", BodyPart::Head, (0.0, 0.0, 10.0, 10.0))];
        let dets = vec![
            det("a", BodyPart::Head, 0.9, (50.0, 50.0, 10.0, 10.0)),
            det("a", BodyPart::Head, 0.8, (0.0, 0.0, 10.0, 10.0)),
        ];
        let ap = average_precision(&dets, &gts, BodyPart::Head, 0.5, EvalMode::Bbox)
            .unwrap()
            .unwrap();
        assert_eq!(ap, 50.0);
    }

    #[test]
    fn no_ground_truth_returns_none_and_no_detections_zero() {
        let gts = vec![gt("a", BodyPart::Head, (0.0, 0.0, 10.0, 10.0))];
        assert_eq!(
            average_precision(&[], &gts, BodyPart::Wings, 0.5, EvalMode::Bbox).unwrap(),
            None
        );
        assert_eq!(
            average_precision(&[], &gts, BodyPart::Head, 0.5, EvalMode::Bbox)
                .unwrap()
                .unwrap(),
            0.0
        );
    }

    #[test]
    fn detection_cannot_match_across_images_or_twice() {
        let gts = vec![gt("a", BodyPart::Head, (0.0, 0.0, 10.0, 10.0))];
        // Same box but wrong image: false positive.
        let dets = vec![det("b", BodyPart::Head, 0.9, (0.0, 0.0, 10.0, 10.0))];
        let ap = average_precision(&dets, &gts, BodyPart::Head, 0.5, EvalMode::Bbox)
            .unwrap()
            .unwrap();
        assert_eq!(ap, 0.0);

        // Two detections on one GT: only the higher-scored one is TP.
        let dets = vec![
            det("a", BodyPart::Head, 0.9, (0.0, 0.0, 10.0, 10.0)),
            det("a", BodyPart::Head, 0.8, (0.0, 0.0, 10.0, 10.0)),
        ];
        let ap = average_precision(&dets, &gts, BodyPart::Head, 0.5, EvalMode::Bbox)
            .unwrap()
            .unwrap();
        // recall 1 precision 1 at rank 1; rank 2 is FP, so max
        // precision at recall >= r stays 1.0 for every sample.
        assert_eq!(ap, 100.0);
    }

    #[test]
    fn ap_monotone_in_threshold() {
        let gts = vec![
            gt("a", BodyPart::Head, (0.0, 0.0, 10.0, 10.0)),
            gt("a", BodyPart::Head, (20.0, 20.0, 10.0, 10.0)),
        ];
        let dets = vec![
            det("a", BodyPart::Head, 0.9, (1.0, 1.0, 10.0, 10.0)),
            det("a", BodyPart::Head, 0.8, (24.0, 24.0, 10.0, 10.0)),
        ];
        let mut prev = f64::INFINITY;
        for i in 0..10 {
            let threshold = 0.5 + 0.05 * i as f64;
            let ap = average_precision(&dets, &gts, BodyPart::Head, threshold, EvalMode::Bbox)
                .unwrap()
                .unwrap();
            assert!(ap <= prev + 1e-9, "threshold {threshold}");
            prev = ap;
        }
    }

    #[test]
    fn rejects_bad_threshold_and_missing_mask() {
        let gts = vec![gt("a", BodyPart::Head, (0.0, 0.0, 1.0, 1.0))];
        assert!(matches!(
            average_precision(&[], &gts, BodyPart::Head, 0.0, EvalMode::Bbox),
            Err(EvalError::BadThreshold(_))
        ));
        let dets = vec![det("a", BodyPart::Head, 0.9, (0.0, 0.0, 1.0, 1.0))];
        assert!(matches!(
            average_precision(&dets, &gts, BodyPart::Head, 0.5, EvalMode::Mask),
            Err(EvalError::MissingMask)
        ));
    }

    fn square_set(image_id: &str, parts: &[(BodyPart, f64, f64)]) -> AnnotationSet {
        // Each entry: (part, offset, score); a 10x10 square at the offset.
        let annotations = parts
            .iter()
            .map(|&(part, offset, score)| {
                PartAnnotation::new(
                    part,
                    vec![
                        (offset, offset),
                        (offset + 10.0, offset),
                        (offset + 10.0, offset + 10.0),
                        (offset, offset + 10.0),
                    ],
                    score,
                )
                .unwrap()
            })
            .collect();
        AnnotationSet::new(image_id, (64, 64), annotations).unwrap()
    }

    #[test]
    fn evaluate_wings_never_predicted() {
        // GT has head/thorax/abdomen/wings; predictions nail the
        // first three and never predict wings: per-class APs are
        // 100, 100, 100, 0 and every mAP is 75.
        let gt_sets = vec![square_set(
            "img",
            &[
                (BodyPart::Head, 0.0, 1.0),
                (BodyPart::Thorax, 15.0, 1.0),
                (BodyPart::Abdomen, 30.0, 1.0),
                (BodyPart::Wings, 45.0, 1.0),
            ],
        )];
        let pred_sets = vec![square_set(
            "img",
            &[
                (BodyPart::Head, 0.0, 0.9),
                (BodyPart::Thorax, 15.0, 0.85),
                (BodyPart::Abdomen, 30.0, 0.8),
            ],
        )];
        let report = evaluate(&pred_sets, &gt_sets).unwrap();
        for mode in [&report.bbox, &report.mask] {
            assert_eq!(mode.ap_per_class[&BodyPart::Head], Some(100.0));
            assert_eq!(mode.ap_per_class[&BodyPart::Wings], Some(0.0));
            assert_eq!(mode.map, 75.0);
            assert_eq!(mode.map50, 75.0);
            assert_eq!(mode.map75, 75.0);
            assert!(mode.map <= mode.map50);
        }
        let csv = report.to_csv();
        assert!(csv.starts_with("mode,map,map50,map75,"));
        assert!(csv.contains("bbox,75.00,75.00,75.00,100.00,100.00,100.00,0.00"));
        let table = report.to_table();
        assert!(table.contains("mAP"));
        assert!(table.contains("AP-wings"));
    }

    #[test]
    fn evaluate_empty_predictions_zeroes() {
        let gt_sets = vec![square_set("img", &[(BodyPart::Head, 0.0, 1.0)])];
        let report = evaluate(&[], &gt_sets).unwrap();
        assert_eq!(report.bbox.map, 0.0);
        assert_eq!(report.bbox.ap_per_class[&BodyPart::Head], Some(0.0));
        // Parts absent from GT are reported as absent.
        assert_eq!(report.bbox.ap_per_class[&BodyPart::Wings], None);
    }

    #[test]
    fn evaluate_rejects_dims_mismatch_and_ignores_unknown_images() {
        let gt_sets = vec![square_set("img", &[(BodyPart::Head, 0.0, 1.0)])];
        let mut other = square_set("img", &[(BodyPart::Head, 0.0, 0.9)]);
        other = AnnotationSet::new(
            other.image_id(),
            (32, 32),
            other.annotations().to_vec(),
        )
        .unwrap();
        assert!(matches!(
            evaluate(&[other], &gt_sets),
            Err(EvalError::DimsMismatch { .. })
        ));

        let stray = square_set("unknown", &[(BodyPart::Head, 0.0, 0.9)]);
        let report = evaluate(&[stray], &gt_sets).unwrap();
        assert_eq!(report.bbox.ap_per_class[&BodyPart::Head], Some(0.0));
    }

    #[test]
    fn mask_and_bbox_modes_can_differ() {
        // An L-shaped GT polygon against a full-square prediction:
        // identical bboxes (IoU 1) but mask IoU well under 1.
        let gt_poly = vec![
            (0.0, 0.0),
            (4.0, 0.0),
            (4.0, 8.0),
            (8.0, 8.0),
            (8.0, 12.0),
            (0.0, 12.0),
        ];
        let pred_poly = vec![(0.0, 0.0), (8.0, 0.0), (8.0, 12.0), (0.0, 12.0)];
        let gt_set = AnnotationSet::new(
            "img",
            (16, 16),
            vec![PartAnnotation::new(BodyPart::Head, gt_poly, 1.0).unwrap()],
        )
        .unwrap();
        let pred_set = AnnotationSet::new(
            "img",
            (16, 16),
            vec![PartAnnotation::new(BodyPart::Head, pred_poly, 0.9).unwrap()],
        )
        .unwrap();
        let report = evaluate(&[pred_set], &[gt_set]).unwrap();
        assert_eq!(report.bbox.map50, 100.0);
        // Mask IoU = 64/96 = 2/3: passes at 0.50 but not 0.75.
        assert_eq!(report.mask.map50, 100.0);
        assert_eq!(report.mask.map75, 0.0);
        assert!(report.mask.map < report.bbox.map);
    }
}
