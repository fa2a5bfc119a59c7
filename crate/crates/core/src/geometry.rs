//! Planar geometry helpers: point–segment distance and supercover
//! rasterization on a unit grid.

/// A point in the plane.
pub type Point2 = [f64; 2];

/// Euclidean distance from `c` to the closed segment `[a, b]`. A degenerate
/// segment (`a == b`) is treated as the point `a`.
pub fn point_segment_distance_2d(c: Point2, a: Point2, b: Point2) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((c[0] - a[0]) * dx + (c[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    };
    let (px, py) = (a[0] + t * dx, a[1] + t * dy);
    (c[0] - px).hypot(c[1] - py)
}

/// Lowest and highest cell index whose closed extent `[k - 0.5, k + 0.5]`
/// contains `v`. Two cells when `v` sits on a shared boundary.
fn cell_span(v: f64) -> (i64, i64) {
    ((v - 0.5).ceil() as i64, (v + 0.5).floor() as i64)
}

/// Every cell touched by the closed segment `[p, q]`, including cells met
/// only at an edge or a corner.
///
/// Cells are unit squares centred on integer coordinates: cell `(i, j)`
/// covers `[i - 0.5, i + 0.5] x [j - 0.5, j + 0.5]`. The result is sorted and
/// free of duplicates.
pub fn supercover_cells(p: Point2, q: Point2) -> Vec<(i64, i64)> {
    let (x_lo, x_hi) = if p[0] <= q[0] { (p[0], q[0]) } else { (q[0], p[0]) };
    let mut cells = Vec::new();

    if p[0] == q[0] {
        let (y_lo, y_hi) = if p[1] <= q[1] { (p[1], q[1]) } else { (q[1], p[1]) };
        let (c0, c1) = cell_span(p[0]);
        let (r0, r1) = (cell_span(y_lo).0, cell_span(y_hi).1);
        for i in c0..=c1 {
            for j in r0..=r1 {
                cells.push((i, j));
            }
        }
        return cells;
    }

    let slope = (q[1] - p[1]) / (q[0] - p[0]);
    let y_at = |x: f64| {
        // Evaluate from the nearer endpoint so the endpoints are exact.
        if (x - p[0]).abs() <= (x - q[0]).abs() {
            p[1] + (x - p[0]) * slope
        } else {
            q[1] + (x - q[0]) * slope
        }
    };
    let (first_col, last_col) = (cell_span(x_lo).0, cell_span(x_hi).1);
    for i in first_col..=last_col {
        let a = x_lo.max(i as f64 - 0.5);
        let b = x_hi.min(i as f64 + 0.5);
        if a > b {
            continue;
        }
        let (ya, yb) = (y_at(a), y_at(b));
        let (y_lo, y_hi) = if ya <= yb { (ya, yb) } else { (yb, ya) };
        for j in cell_span(y_lo).0..=cell_span(y_hi).1 {
            cells.push((i, j));
        }
    }
    cells.sort_unstable();
    cells.dedup();
    cells
}
