//! Straight-line reference evaluator for lattice scenes.
//!
//! IoU comparisons are exact integer cross-multiplications and AP is the
//! textbook envelope sum, so this shares no arithmetic with the library.

use std::collections::BTreeMap;

use pcbcrm::ClassLabel;

use super::Scene;

/// IoU thresholds in hundredths.
pub const THRESHOLDS: [i64; 10] = [50, 55, 60, 65, 70, 75, 80, 85, 90, 95];

#[derive(Debug, Clone, PartialEq)]
pub struct RefClass {
    pub num_gt: usize,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    /// (recall, precision, cumulative tp, cumulative fp) at IoU 0.5.
    pub points: Vec<(f64, f64, usize, usize)>,
    pub ap: [f64; 10],
}

impl RefClass {
    pub fn ap50_95(&self) -> f64 {
        self.ap.iter().sum::<f64>() / 10.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefReport {
    pub classes: BTreeMap<ClassLabel, RefClass>,
    pub map50: f64,
    pub map50_95: f64,
}

/// Per-image greedy matching at IoU >= pct/100. Returns a TP flag per
/// detection in input order.
pub fn greedy_flags(scene_image: &(String, Vec<super::SceneGt>, Vec<super::SceneDet>), pct: i64) -> Vec<bool> {
    let (_, gts, dets) = scene_image;
    let mut order: Vec<usize> = (0..dets.len()).collect();
    // highest confidence first, then input order
    order.sort_by_key(|&i| (std::cmp::Reverse(dets[i].conf_tenths), i));
    let mut taken = vec![false; gts.len()];
    let mut flags = vec![false; dets.len()];
    for i in order {
        let d = &dets[i];
        let mut best: Option<(usize, i64, i64)> = None;
        for (j, g) in gts.iter().enumerate() {
            if taken[j] || g.class != d.class {
                continue;
            }
            let (inter, union) = g.grid.overlap(d.grid);
            if 100 * inter < pct * union {
                continue;
            }
            let better = match best {
                None => true,
                Some((_, bi, bu)) => inter * bu > bi * union,
            };
            if better {
                best = Some((j, inter, union));
            }
        }
        if let Some((j, _, _)) = best {
            taken[j] = true;
            flags[i] = true;
        }
    }
    flags
}

fn envelope_ap(flags: &[bool], num_gt: usize) -> f64 {
    let mut precisions = Vec::new();
    let mut tp = 0;
    for (k, &f) in flags.iter().enumerate() {
        if f {
            tp += 1;
        }
        precisions.push(tp as f64 / (k + 1) as f64);
    }
    let mut ap = 0.0;
    for (k, &f) in flags.iter().enumerate() {
        if f {
            let best = precisions[k..].iter().cloned().fold(0.0, f64::max);
            ap += best / num_gt as f64;
        }
    }
    ap
}

pub fn evaluate(scene: &Scene) -> RefReport {
    let mut num_gt: BTreeMap<ClassLabel, usize> = BTreeMap::new();
    for (_, gts, _) in &scene.images {
        for g in gts {
            *num_gt.entry(g.class).or_default() += 1;
        }
    }
    let mut images = scene.images.clone();
    images.sort_by(|a, b| a.0.cmp(&b.0));

    let mut classes = BTreeMap::new();
    for (&class, &n) in &num_gt {
        let mut rc = RefClass {
            num_gt: n,
            tp: 0,
            fp: 0,
            fn_: 0,
            points: Vec::new(),
            ap: [0.0; 10],
        };
        for (ti, &pct) in THRESHOLDS.iter().enumerate() {
            // (conf, image position, det index, tp)
            let mut ranked = Vec::new();
            for (pos, image) in images.iter().enumerate() {
                let flags = greedy_flags(image, pct);
                for (i, d) in image.2.iter().enumerate() {
                    if d.class == class {
                        ranked.push((d.conf_tenths, pos, i, flags[i]));
                    }
                }
            }
            ranked.sort_by_key(|r| (std::cmp::Reverse(r.0), r.1, r.2));
            let flags: Vec<bool> = ranked.iter().map(|r| r.3).collect();
            rc.ap[ti] = envelope_ap(&flags, n);
            if pct == 50 {
                let mut tp = 0;
                let mut fp = 0;
                for &f in &flags {
                    if f {
                        tp += 1;
                    } else {
                        fp += 1;
                    }
                    rc.points
                        .push((tp as f64 / n as f64, tp as f64 / (tp + fp) as f64, tp, fp));
                }
                rc.tp = tp;
                rc.fp = fp;
                rc.fn_ = n - tp;
            }
        }
        classes.insert(class, rc);
    }
    let k = classes.len().max(1) as f64;
    let map50 = classes.values().map(|c| c.ap[0]).sum::<f64>() / k;
    let map50_95 = classes.values().map(|c| c.ap50_95()).sum::<f64>() / k;
    RefReport {
        classes,
        map50,
        map50_95,
    }
}

/// Largest number of same-class (GT, detection) pairs with IoU >= pct/100
/// that can be matched one-to-one, by trying every assignment.
pub fn max_matching(scene_image: &(String, Vec<super::SceneGt>, Vec<super::SceneDet>), pct: i64) -> usize {
    let (_, gts, dets) = scene_image;
    fn go(d: usize, gts: &[super::SceneGt], dets: &[super::SceneDet], used: &mut Vec<bool>, pct: i64) -> usize {
        if d == dets.len() {
            return 0;
        }
        let mut best = go(d + 1, gts, dets, used, pct);
        for j in 0..gts.len() {
            if used[j] || gts[j].class != dets[d].class {
                continue;
            }
            let (inter, union) = gts[j].grid.overlap(dets[d].grid);
            if 100 * inter >= pct * union {
                used[j] = true;
                best = best.max(1 + go(d + 1, gts, dets, used, pct));
                used[j] = false;
            }
        }
        best
    }
    go(0, gts, dets, &mut vec![false; gts.len()], pct)
}

fn close(what: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{what}: library {got} vs reference {want}"))
    }
}

/// Check a library report against the reference for the same scene.
pub fn compare(report: &pcbcrm::eval::EvalReport, reference: &RefReport, tol: f64) -> Result<(), String> {
    if report.classes.len() != reference.classes.len() {
        return Err(format!(
            "evaluated {} classes, reference {}",
            report.classes.len(),
            reference.classes.len()
        ));
    }
    for c in &report.classes {
        let r = reference
            .classes
            .get(&c.class)
            .ok_or_else(|| format!("class {} not in reference", c.class))?;
        let name = c.class.name();
        if (c.counts.tp, c.counts.fp, c.counts.fn_) != (r.tp as u64, r.fp as u64, r.fn_ as u64) {
            return Err(format!(
                "{name}: counts {:?} vs reference tp={} fp={} fn={}",
                c.counts, r.tp, r.fp, r.fn_
            ));
        }
        if c.pr_curve.len() != r.points.len() {
            return Err(format!("{name}: {} PR points vs {}", c.pr_curve.len(), r.points.len()));
        }
        for (i, (p, q)) in c.pr_curve.iter().zip(&r.points).enumerate() {
            close(&format!("{name} point {i} recall"), p.recall, q.0, tol)?;
            close(&format!("{name} point {i} precision"), p.precision, q.1, tol)?;
            if (p.tp, p.fp) != (q.2 as u64, q.3 as u64) {
                return Err(format!("{name} point {i}: cumulative counts differ"));
            }
        }
        for (ti, &pct) in THRESHOLDS.iter().enumerate() {
            let pos = report
                .iou_thresholds
                .iter()
                .position(|&t| (t * 100.0).round() as i64 == pct)
                .ok_or_else(|| format!("threshold {pct} missing from report"))?;
            close(&format!("{name} AP@{pct}"), c.ap_by_threshold[pos], r.ap[ti], tol)?;
        }
        close(&format!("{name} AP50"), c.ap50, r.ap[0], tol)?;
        close(&format!("{name} AP50-95"), c.ap50_95, r.ap50_95(), tol)?;
    }
    close("mAP@0.5", report.map50, reference.map50, tol)?;
    close("mAP@[.5:.95]", report.map50_95, reference.map50_95, tol)?;
    Ok(())
}
