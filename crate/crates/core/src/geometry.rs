//! Planar convex hulls and distances.

use num_complex::Complex64;

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Convex hull in counter-clockwise order, without collinear vertices.
///
/// Degenerate inputs give one vertex (all points equal) or two (all points
/// on a line: the extreme pair).
pub fn convex_hull(points: &[Complex64]) -> Vec<Complex64> {
    let mut pts: Vec<Complex64> = points.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    // Andrew's monotone chain.
    let mut hull: Vec<Complex64> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    if hull.len() == 1 {
        // Every point collinear with the two extremes collapsed the chain.
        hull.push(*pts.last().unwrap());
    }
    hull
}

/// Euclidean distance from `z` to the segment `[a, b]`.
pub fn segment_distance(a: Complex64, b: Complex64, z: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + d * t)).norm()
}

/// Signed distance from `z` to the polygon `hull` (as returned by
/// [`convex_hull`]): negative inside, positive outside.
///
/// For one- and two-vertex hulls the distance to the point or segment is
/// returned, so points on a degenerate hull score zero.
pub fn hull_signed_distance(hull: &[Complex64], z: Complex64) -> f64 {
    match hull.len() {
        0 => f64::INFINITY,
        1 => (z - hull[0]).norm(),
        2 => segment_distance(hull[0], hull[1], z),
        h => {
            let mut inside = true;
            let mut dist = f64::INFINITY;
            for i in 0..h {
                let (a, b) = (hull[i], hull[(i + 1) % h]);
                if cross(a, b, z) < 0.0 {
                    inside = false;
                }
                dist = dist.min(segment_distance(a, b, z));
            }
            if inside {
                -dist
            } else {
                dist
            }
        }
    }
}

/// Largest distance between two of the points.
pub fn diameter(points: &[Complex64]) -> f64 {
    let hull = convex_hull(points);
    let mut best: f64 = 0.0;
    for (i, a) in hull.iter().enumerate() {
        for b in &hull[i + 1..] {
            best = best.max((a - b).norm());
        }
    }
    best
}
