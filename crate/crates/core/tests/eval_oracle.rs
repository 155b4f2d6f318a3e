mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::seq::SliceRandom;

use common::{random_scene, reference, rng, Scene};
use pcbcrm::eval::{evaluate, match_detections, EvalParams, EvalReport};

fn run(scene: &Scene) -> EvalReport {
    evaluate(&scene.ground_truth(), &scene.detections(), &EvalParams::default()).unwrap()
}

#[test]
fn matches_reference_on_seeded_scenes() {
    let mut r = rng(7);
    for i in 0..500 {
        let scene = random_scene(&mut r);
        let expected = reference::evaluate(&scene);
        if let Err(e) = reference::compare(&run(&scene), &expected, 1e-9) {
            panic!("scene {i}: {e}\n{scene:#?}");
        }
    }
}

#[test]
fn greedy_never_beats_exhaustive_matching() {
    let mut r = rng(11);
    let mut agree = 0;
    for _ in 0..400 {
        let scene = random_scene(&mut r);
        let gt = scene.ground_truth();
        let det = scene.detections();
        for image in &scene.images {
            for &pct in &reference::THRESHOLDS {
                let m = match_detections(&gt[&image.0], &det[&image.0], pct as f64 / 100.0);
                let best = reference::max_matching(image, pct);
                assert!(m.true_positives() <= best);
                assert_eq!(m.true_positives(), m.gt_match.iter().filter(|g| g.is_some()).count());
                if m.true_positives() == best {
                    agree += 1;
                }
            }
        }
    }
    assert!(agree > 0);
}

fn seed() -> impl Strategy<Value = u64> {
    any::<u64>()
}

proptest! {
    #[test]
    fn counts_and_ranges(s in seed()) {
        let scene = random_scene(&mut rng(s));
        let report = run(&scene);
        let dets = scene.detections();
        for c in &report.classes {
            prop_assert_eq!(c.counts.tp + c.counts.fn_, c.num_gt);
            prop_assert_eq!(c.counts.tp + c.counts.fp, c.num_detections);
            prop_assert_eq!(c.num_detections as usize, dets.values().flatten().filter(|d| d.class == c.class).count());
            for ap in c.ap_by_threshold.iter().chain([&c.ap50, &c.ap50_95]) {
                prop_assert!((0.0..=1.0).contains(ap));
            }
            let mut last = 0.0;
            for p in &c.pr_curve {
                prop_assert!(p.recall >= last);
                last = p.recall;
            }
        }
        for v in [report.precision, report.recall, report.map50, report.map50_95] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn ap_does_not_increase_with_threshold(s in seed()) {
        let report = run(&random_scene(&mut rng(s)));
        for c in &report.classes {
            for w in c.ap_by_threshold.windows(2) {
                prop_assert!(w[1] <= w[0], "{:?}", c.ap_by_threshold);
            }
        }
    }

    #[test]
    fn invariant_under_monotone_confidence_rescaling(s in seed()) {
        let scene = random_scene(&mut rng(s));
        let gt = scene.ground_truth();
        let det = scene.detections();
        let rescaled: BTreeMap<_, Vec<_>> = det
            .iter()
            .map(|(k, v)| {
                let v = v.iter().map(|d| {
                    let mut d = *d;
                    d.confidence = 0.05 + 0.9 * d.confidence.powi(3);
                    d
                }).collect();
                (k.clone(), v)
            })
            .collect();
        let a = evaluate(&gt, &det, &EvalParams::default()).unwrap();
        let b = evaluate(&gt, &rescaled, &EvalParams::default()).unwrap();
        prop_assert_eq!(a.map50, b.map50);
        prop_assert_eq!(a.map50_95, b.map50_95);
        prop_assert_eq!(a.precision, b.precision);
        prop_assert_eq!(a.recall, b.recall);
        prop_assert_eq!(a.totals, b.totals);
    }

    #[test]
    fn invariant_under_image_relabelling(s in seed()) {
        // With distinct confidences no tie-break depends on image order.
        let mut r = rng(s);
        let mut scene = random_scene(&mut r);
        let mut confs: Vec<u32> = (1..=10).collect();
        confs.shuffle(&mut r);
        for d in scene.images.iter_mut().flat_map(|i| i.2.iter_mut()) {
            d.conf_tenths = confs.pop().unwrap();
        }
        let mut renamed = scene.clone();
        let mut ids: Vec<String> = renamed.images.iter().map(|i| i.0.clone()).collect();
        ids.shuffle(&mut r);
        for (image, id) in renamed.images.iter_mut().zip(ids) {
            image.0 = id;
        }
        let a = run(&scene);
        let b = run(&renamed);
        prop_assert_eq!(a.classes, b.classes);
        prop_assert_eq!(a.map50, b.map50);
        prop_assert_eq!(a.operating_point, b.operating_point);
    }
}

#[test]
fn report_is_identical_across_thread_counts() {
    let mut r = rng(3);
    let mut scene = Scene::default();
    for k in 0..40 {
        let mut part = random_scene(&mut r);
        for image in &mut part.images {
            image.0 = format!("s{k:02}_{}", image.0);
        }
        scene.images.extend(part.images);
    }
    let json_with = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| run(&scene).to_json())
    };
    let one = json_with(1);
    assert_eq!(one, json_with(8));
    assert_eq!(one, json_with(3));
}
