//! Area of a disk (centred at the origin) intersected with a simple polygon.
//!
//! The polygon is fanned from the disk centre; each signed triangle
//! `(O, p, q)` is split at its crossings with the circle, and every piece
//! contributes either a straight triangle or a circular sector.

use crate::linalg::Point2;

fn cross(a: Point2<f64>, b: Point2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Parameters `s ∈ (0, 1)` where the segment `a → b` meets the circle.
fn circle_crossings(a: Point2<f64>, b: Point2<f64>, r: f64) -> Vec<f64> {
    let d = b - a;
    let qa = d.dot(&d);
    let qb = 2.0 * a.dot(&d);
    let qc = a.dot(&a) - r * r;
    let disc = qb * qb - 4.0 * qa * qc;
    if qa == 0.0 || disc <= 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    // numerically stable pair of roots
    let q = -0.5 * (qb + qb.signum() * sq);
    let mut roots = vec![q / qa, qc / q];
    roots.retain(|s| *s > 0.0 && *s < 1.0);
    roots.sort_by(f64::total_cmp);
    roots
}

/// Signed area of `disk(r) ∩ triangle(O, a, b)`.
fn wedge_area(a: Point2<f64>, b: Point2<f64>, r: f64) -> f64 {
    let mut cuts = vec![0.0];
    cuts.extend(circle_crossings(a, b, r));
    cuts.push(1.0);
    let at = |s: f64| a + (b - a).scale(&s);
    cuts.windows(2)
        .map(|w| {
            let (p, q) = (at(w[0]), at(w[1]));
            let mid = at(0.5 * (w[0] + w[1]));
            if mid.dot(&mid) <= r * r {
                0.5 * cross(p, q)
            } else {
                0.5 * r * r * cross(p, q).atan2(p.dot(&q))
            }
        })
        .sum()
}

/// Area of `disk(0, r) ∩ polygon`, for a simple polygon in either orientation.
pub fn disk_polygon_area(poly: &[Point2<f64>], r: f64) -> f64 {
    let n = poly.len();
    (0..n).map(|i| wedge_area(poly[i], poly[(i + 1) % n], r)).sum::<f64>().abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn p(x: f64, y: f64) -> Point2<f64> {
        Point2::new(x, y)
    }

    #[test]
    fn polygon_inside_disk() {
        let sq = [p(-0.5, -0.5), p(0.5, -0.5), p(0.5, 0.5), p(-0.5, 0.5)];
        assert!((disk_polygon_area(&sq, 10.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn disk_inside_polygon() {
        let sq = [p(-3.0, -3.0), p(3.0, -3.0), p(3.0, 3.0), p(-3.0, 3.0)];
        assert!((disk_polygon_area(&sq, 1.0) - PI).abs() < 1e-14);
    }

    #[test]
    fn half_plane_and_quadrant() {
        let upper = [p(-5.0, 0.0), p(5.0, 0.0), p(5.0, 5.0), p(-5.0, 5.0)];
        assert!((disk_polygon_area(&upper, 2.0) - 2.0 * PI).abs() < 1e-13);
        let quad = [p(0.0, 0.0), p(5.0, 0.0), p(5.0, 5.0), p(0.0, 5.0)];
        assert!((disk_polygon_area(&quad, 1.0) - PI / 4.0).abs() < 1e-14);
    }

    #[test]
    fn circular_segment() {
        // chord at height h cuts a segment of area r²acos(h/r) − h√(r² − h²)
        let (r, h) = (1.3_f64, 0.4_f64);
        let cap = [p(-5.0, h), p(5.0, h), p(5.0, 5.0), p(-5.0, 5.0)];
        let expect = r * r * (h / r).acos() - h * (r * r - h * h).sqrt();
        assert!((disk_polygon_area(&cap, r) - expect).abs() < 1e-14);
    }
}
