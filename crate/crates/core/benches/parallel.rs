//! Sequential vs rayon execution of the two embarrassingly parallel
//! workloads: batch palette extraction and per-(class, threshold)
//! average-precision evaluation. The library picks the parallel path
//! when built with the default `parallel` feature; these benches
//! drive both paths explicitly so the speedup is measurable.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use odopal_core::annot::{AnnotationSet, BBox, BodyPart, PartAnnotation};
use odopal_core::colour::KMeansParams;
use odopal_core::maskops::Raster;
use odopal_core::pipeline::{extract_image, ExtractParams};
use odopal_core::segeval::{average_precision, Detection, EvalMode, GroundTruth};

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<(f64, f64)> {
    vec![(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
}

fn synth_images(n: usize) -> Vec<(Raster, AnnotationSet)> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    (0..n)
        .map(|i| {
            let mut image = Raster::filled(96, 96, [0, 0, 0]).unwrap();
            for y in 0..96 {
                for x in 0..96 {
                    image.set_pixel(x, y, [rng.random(), rng.random(), rng.random()]);
                }
            }
            let set = AnnotationSet::new(
                format!("bench-{i}"),
                (96, 96),
                vec![
                    PartAnnotation::new(BodyPart::Head, rect(0.0, 0.0, 32.0, 32.0), 1.0)
                        .unwrap(),
                    PartAnnotation::new(BodyPart::Thorax, rect(32.0, 32.0, 64.0, 64.0), 1.0)
                        .unwrap(),
                    PartAnnotation::new(BodyPart::Abdomen, rect(64.0, 64.0, 96.0, 96.0), 1.0)
                        .unwrap(),
                ],
            )
            .unwrap();
            (image, set)
        })
        .collect()
}

fn bench_extraction(c: &mut Criterion) {
    let items = synth_images(12);
    let params = ExtractParams {
        kmeans: KMeansParams { restarts: 2, ..Default::default() },
        ..Default::default()
    };
    let mut group = c.benchmark_group("palette_extraction");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| {
            let out: Vec<_> = items
                .iter()
                .map(|(image, set)| extract_image(image, set, &params))
                .collect();
            black_box(out)
        })
    });
    group.bench_function("parallel", |b| {
        b.iter(|| {
            let out: Vec<_> = items
                .par_iter()
                .map(|(image, set)| extract_image(image, set, &params))
                .collect();
            black_box(out)
        })
    });
    group.finish();
}

fn synth_instances(images: usize, per_image: usize) -> (Vec<Detection>, Vec<GroundTruth>) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut dets = Vec::new();
    let mut gts = Vec::new();
    for img in 0..images {
        let image_id = format!("img-{img}");
        for _ in 0..per_image {
            let part = BodyPart::ALL[rng.random_range(0..4)];
            let x: f64 = rng.random_range(0.0..400.0);
            let y: f64 = rng.random_range(0.0..400.0);
            let w: f64 = rng.random_range(5.0..80.0);
            let h: f64 = rng.random_range(5.0..80.0);
            gts.push(GroundTruth {
                image_id: image_id.clone(),
                part,
                bbox: BBox { x, y, w, h },
                mask: None,
            });
            // A jittered detection for the same instance plus noise.
            dets.push(Detection {
                image_id: image_id.clone(),
                part,
                score: rng.random(),
                bbox: BBox {
                    x: x + rng.random_range(-4.0..4.0),
                    y: y + rng.random_range(-4.0..4.0),
                    w,
                    h,
                },
                mask: None,
            });
            if rng.random_range(0..3) == 0 {
                dets.push(Detection {
                    image_id: image_id.clone(),
                    part: BodyPart::ALL[rng.random_range(0..4)],
                    score: rng.random(),
                    bbox: BBox { x: rng.random_range(0.0..400.0), y, w, h },
                    mask: None,
                });
            }
        }
    }
    (dets, gts)
}

fn bench_evaluation(c: &mut Criterion) {
    let (dets, gts) = synth_instances(40, 24);
    let tasks: Vec<(BodyPart, f64)> = BodyPart::ALL
        .iter()
        .flat_map(|&p| (0..10).map(move |i| (p, 0.5 + 0.05 * i as f64)))
        .collect();
    let mut group = c.benchmark_group("ap_evaluation");
    group.bench_function("sequential", |b| {
        b.iter(|| {
            let out: Vec<_> = tasks
                .iter()
                .map(|&(part, t)| average_precision(&dets, &gts, part, t, EvalMode::Bbox))
                .collect();
            black_box(out)
        })
    });
    group.bench_function("parallel", |b| {
        b.iter(|| {
            let out: Vec<_> = tasks
                .par_iter()
                .map(|&(part, t)| average_precision(&dets, &gts, part, t, EvalMode::Bbox))
                .collect();
            black_box(out)
        })
    });
    group.finish();
}

criterion_group!(benches, bench_extraction, bench_evaluation);
criterion_main!(benches);
