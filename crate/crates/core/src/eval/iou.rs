use crate::dataset_io::BoundingBox;

/// Intersection over union in normalized coordinates; 0 for disjoint boxes.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let ix = (a.x_max().min(b.x_max()) - a.x_min().max(b.x_min())).max(0.0);
    let iy = (a.y_max().min(b.y_max()) - a.y_min().max(b.y_min())).max(0.0);
    let inter = ix * iy;
    if inter <= 0.0 {
        return 0.0;
    }
    // Areas from the same edges as the intersection, so identical boxes give exactly 1.
    let area = |b: &BoundingBox| (b.x_max() - b.x_min()) * (b.y_max() - b.y_min());
    let union = area(a) + area(b) - inter;
    (inter / union).clamp(0.0, 1.0)
}
