//! Planar polygon primitives: rings, polygons with holes, multipolygons,
//! areas, point-in-polygon, convex clipping, and intersection areas.
//!
//! All geometry here is planar. Zone and cell coordinates arrive in lon/lat
//! degrees and are treated via a local equirectangular projection per basin;
//! at basin scale the projection error is far below the thresholds that
//! consume these areas.
//!
//! Intersection areas are computed by triangulating one operand (ear
//! clipping) and clipping the other against each triangle with
//! Sutherland-Hodgman. S-H requires a convex clip polygon; triangles and
//! grid-cell quadrilaterals are. The S-H output of a non-convex subject may
//! contain degenerate bridge edges along the clip boundary, which enclose
//! zero area, so the shoelace area of the output is still exact.

/// A 2-D point. Units depend on context (degrees or metres).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pt {
    pub x: f64,
    pub y: f64,
}

impl Pt {
    pub fn new(x: f64, y: f64) -> Self {
        Pt { x, y }
    }
}

fn cross(o: Pt, a: Pt, b: Pt) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// A closed ring of vertices. The closing edge from last back to first is
/// implicit; the first vertex is not repeated.
#[derive(Debug, Clone, PartialEq)]
pub struct Ring(pub Vec<Pt>);

impl Ring {
    pub fn new(pts: Vec<Pt>) -> Self {
        Ring(pts)
    }

    /// Signed area: positive for counter-clockwise winding.
    pub fn signed_area(&self) -> f64 {
        shoelace(&self.0)
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    /// Reverses the winding in place so the ring is counter-clockwise.
    pub fn make_ccw(&mut self) {
        if self.signed_area() < 0.0 {
            self.0.reverse();
        }
    }

    pub fn bbox(&self) -> Aabb {
        Aabb::of_points(&self.0)
    }

    /// Even-odd point containment. Points exactly on the boundary are
    /// classified arbitrarily; callers that care use area-based tests.
    pub fn contains(&self, p: Pt) -> bool {
        let pts = &self.0;
        let n = pts.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let (a, b) = (pts[i], pts[j]);
            if (a.y > p.y) != (b.y > p.y) {
                let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x_cross {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }
}

fn shoelace(pts: &[Pt]) -> f64 {
    let n = pts.len();
    if n < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    let mut j = n - 1;
    for i in 0..n {
        s += (pts[j].x + pts[i].x) * (pts[i].y - pts[j].y);
        j = i;
    }
    0.5 * s
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Pt,
    pub max: Pt,
}

impl Aabb {
    pub fn of_points(pts: &[Pt]) -> Self {
        let mut min = Pt::new(f64::INFINITY, f64::INFINITY);
        let mut max = Pt::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in pts {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        Aabb { min, max }
    }

    pub fn intersects(&self, other: &Aabb) -> bool {
        self.min.x <= other.max.x
            && other.min.x <= self.max.x
            && self.min.y <= other.max.y
            && other.min.y <= self.max.y
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        Aabb {
            min: Pt::new(self.min.x.min(other.min.x), self.min.y.min(other.min.y)),
            max: Pt::new(self.max.x.max(other.max.x), self.max.y.max(other.max.y)),
        }
    }

    pub fn center(&self) -> Pt {
        Pt::new(0.5 * (self.min.x + self.max.x), 0.5 * (self.min.y + self.max.y))
    }
}

/// A polygon: one outer ring plus zero or more hole rings. Holes must lie
/// inside the outer ring and not overlap each other.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    pub outer: Ring,
    pub holes: Vec<Ring>,
}

impl Polygon {
    pub fn new(outer: Ring, holes: Vec<Ring>) -> Self {
        Polygon { outer, holes }
    }

    pub fn from_ring(outer: Ring) -> Self {
        Polygon { outer, holes: Vec::new() }
    }

    pub fn area(&self) -> f64 {
        self.outer.area() - self.holes.iter().map(Ring::area).sum::<f64>()
    }

    pub fn bbox(&self) -> Aabb {
        self.outer.bbox()
    }

    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Polygon::from_ring(Ring::new(vec![
            Pt::new(x0, y0),
            Pt::new(x1, y0),
            Pt::new(x1, y1),
            Pt::new(x0, y1),
        ]))
    }
}

/// Disjoint polygon parts forming one geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPolygon(pub Vec<Polygon>);

impl MultiPolygon {
    pub fn area(&self) -> f64 {
        self.0.iter().map(Polygon::area).sum()
    }

    pub fn bbox(&self) -> Aabb {
        let mut it = self.0.iter().map(Polygon::bbox);
        let first = it.next().unwrap_or(Aabb {
            min: Pt::new(0.0, 0.0),
            max: Pt::new(0.0, 0.0),
        });
        it.fold(first, |a, b| a.union(&b))
    }
}

/// Clips `subject` against a convex counter-clockwise `clip` ring
/// (Sutherland-Hodgman) and returns the vertices of the result.
pub fn clip_by_convex(subject: &[Pt], clip: &[Pt]) -> Vec<Pt> {
    let mut out: Vec<Pt> = subject.to_vec();
    let nc = clip.len();
    for e in 0..nc {
        if out.is_empty() {
            break;
        }
        let a = clip[e];
        let b = clip[(e + 1) % nc];
        let input = std::mem::take(&mut out);
        let n = input.len();
        for i in 0..n {
            let p = input[(i + n - 1) % n];
            let q = input[i];
            let p_in = cross(a, b, p) >= 0.0;
            let q_in = cross(a, b, q) >= 0.0;
            if q_in {
                if !p_in {
                    out.push(seg_line_intersection(p, q, a, b));
                }
                out.push(q);
            } else if p_in {
                out.push(seg_line_intersection(p, q, a, b));
            }
        }
    }
    out
}

/// Intersection of segment pq with the infinite line ab. Caller guarantees
/// that p and q straddle the line.
fn seg_line_intersection(p: Pt, q: Pt, a: Pt, b: Pt) -> Pt {
    let d1 = cross(a, b, p);
    let d2 = cross(a, b, q);
    let t = d1 / (d1 - d2);
    Pt::new(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y))
}

/// Unsigned area of `subject ∩ clip` where `clip` is convex CCW. The
/// subject ring may wind either way.
pub fn clipped_area(subject: &Ring, clip: &[Pt]) -> f64 {
    shoelace(&clip_by_convex(&subject.0, clip)).abs()
}

/// Area of `poly ∩ clip` for a convex CCW clip ring, holes subtracted.
pub fn polygon_clipped_area(poly: &Polygon, clip: &[Pt]) -> f64 {
    let mut a = clipped_area(&poly.outer, clip);
    for h in &poly.holes {
        a -= clipped_area(h, clip);
    }
    a
}

/// Ear-clipping triangulation of a simple ring. Returns CCW triangles.
pub fn triangulate(ring: &Ring) -> Vec<[Pt; 3]> {
    let mut pts = ring.0.clone();
    if shoelace(&pts) < 0.0 {
        pts.reverse();
    }
    let mut tris = Vec::with_capacity(pts.len().saturating_sub(2));
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    let mut guard = 0usize;
    while idx.len() > 3 {
        let n = idx.len();
        let mut clipped_one = false;
        for k in 0..n {
            let a = pts[idx[(k + n - 1) % n]];
            let b = pts[idx[k]];
            let c = pts[idx[(k + 1) % n]];
            if cross(a, b, c) <= 0.0 {
                continue; // reflex or collinear corner
            }
            let mut ear = true;
            for &m in &idx {
                let p = pts[m];
                if p == a || p == b || p == c {
                    continue;
                }
                if point_in_triangle(p, a, b, c) {
                    ear = false;
                    break;
                }
            }
            if ear {
                tris.push([a, b, c]);
                idx.remove(k);
                clipped_one = true;
                break;
            }
        }
        if !clipped_one {
            // Degenerate input (self-touching or collinear run). Drop the
            // sharpest collinear vertex and keep going rather than spin.
            guard += 1;
            if guard > pts.len() * 2 || idx.len() < 3 {
                break;
            }
            let n = idx.len();
            let mut best = 0;
            let mut best_abs = f64::INFINITY;
            for k in 0..n {
                let a = pts[idx[(k + n - 1) % n]];
                let b = pts[idx[k]];
                let c = pts[idx[(k + 1) % n]];
                let ca = cross(a, b, c).abs();
                if ca < best_abs {
                    best_abs = ca;
                    best = k;
                }
            }
            idx.remove(best);
        }
    }
    if idx.len() == 3 {
        let (a, b, c) = (pts[idx[0]], pts[idx[1]], pts[idx[2]]);
        if cross(a, b, c) > 0.0 {
            tris.push([a, b, c]);
        }
    }
    tris
}

fn point_in_triangle(p: Pt, a: Pt, b: Pt, c: Pt) -> bool {
    let d1 = cross(a, b, p);
    let d2 = cross(b, c, p);
    let d3 = cross(c, a, p);
    d1 > 0.0 && d2 > 0.0 && d3 > 0.0
}

/// Area of `a ∩ b` for arbitrary (possibly holed, multi-part) operands.
///
/// `b` is decomposed into signed triangles (outer rings +, holes −) and `a`
/// is clipped against each. Parts of each operand must not overlap one
/// another or the result double-counts.
pub fn intersection_area(a: &MultiPolygon, b: &MultiPolygon) -> f64 {
    let mut total = 0.0;
    for poly_b in &b.0 {
        for (ring, sign) in std::iter::once((&poly_b.outer, 1.0))
            .chain(poly_b.holes.iter().map(|h| (h, -1.0)))
        {
            for tri in triangulate(ring) {
                for poly_a in &a.0 {
                    if !poly_a.bbox().intersects(&Aabb::of_points(&tri)) {
                        continue;
                    }
                    total += sign * polygon_clipped_area(poly_a, &tri);
                }
            }
        }
    }
    total.max(0.0)
}

/// Whether the interiors of `a` and `b` overlap (shared area above noise).
pub fn interiors_overlap(a: &MultiPolygon, b: &MultiPolygon) -> bool {
    if !a.bbox().intersects(&b.bbox()) {
        return false;
    }
    let scale = a.area().min(b.area());
    intersection_area(a, b) > 1e-9 * scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_square() -> Polygon {
        Polygon::rect(0.0, 0.0, 1.0, 1.0)
    }

    #[test]
    fn shoelace_square() {
        assert_relative_eq!(unit_square().area(), 1.0);
        let mut r = unit_square().outer;
        r.0.reverse();
        assert_relative_eq!(r.signed_area(), -1.0);
    }

    #[test]
    fn hole_subtracts() {
        let p = Polygon::new(
            Polygon::rect(0.0, 0.0, 4.0, 4.0).outer,
            vec![Polygon::rect(1.0, 1.0, 2.0, 2.0).outer],
        );
        assert_relative_eq!(p.area(), 15.0);
    }

    #[test]
    fn clip_rect_overlap() {
        let a = unit_square();
        let clip = Polygon::rect(0.5, 0.5, 2.0, 2.0).outer.0;
        assert_relative_eq!(polygon_clipped_area(&a, &clip), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn clip_disjoint_is_zero() {
        let a = unit_square();
        let clip = Polygon::rect(2.0, 2.0, 3.0, 3.0).outer.0;
        assert_relative_eq!(polygon_clipped_area(&a, &clip), 0.0);
    }

    #[test]
    fn triangulation_preserves_area() {
        // Non-convex (L-shape) ring.
        let l = Ring::new(vec![
            Pt::new(0.0, 0.0),
            Pt::new(3.0, 0.0),
            Pt::new(3.0, 1.0),
            Pt::new(1.0, 1.0),
            Pt::new(1.0, 3.0),
            Pt::new(0.0, 3.0),
        ]);
        let tris = triangulate(&l);
        let sum: f64 = tris.iter().map(|t| shoelace(t).abs()).sum();
        assert_relative_eq!(sum, l.area(), epsilon = 1e-12);
    }

    #[test]
    fn intersection_area_u_shape_split() {
        // A U-shaped subject whose intersection with a band is two pieces:
        // exercises the degenerate-bridge property of S-H.
        let u = Ring::new(vec![
            Pt::new(0.0, 0.0),
            Pt::new(5.0, 0.0),
            Pt::new(5.0, 4.0),
            Pt::new(4.0, 4.0),
            Pt::new(4.0, 1.0),
            Pt::new(1.0, 1.0),
            Pt::new(1.0, 4.0),
            Pt::new(0.0, 4.0),
        ]);
        let a = MultiPolygon(vec![Polygon::from_ring(u)]);
        let band = MultiPolygon(vec![Polygon::rect(-1.0, 2.0, 6.0, 5.0)]);
        // Intersection: two 1x2 strips (x in [0,1] and [4,5], y in [2,4]).
        assert_relative_eq!(intersection_area(&a, &band), 4.0, epsilon = 1e-10);
        assert_relative_eq!(intersection_area(&band, &a), 4.0, epsilon = 1e-10);
    }

    #[test]
    fn intersection_with_hole() {
        let holed = MultiPolygon(vec![Polygon::new(
            Polygon::rect(0.0, 0.0, 4.0, 4.0).outer,
            vec![Polygon::rect(1.0, 1.0, 3.0, 3.0).outer],
        )]);
        let probe = MultiPolygon(vec![Polygon::rect(0.0, 0.0, 2.0, 2.0)]);
        // probe is 4; hole removes the [1,3]^2 ∩ [0,2]^2 = 1 square.
        assert_relative_eq!(intersection_area(&holed, &probe), 3.0, epsilon = 1e-10);
    }

    #[test]
    fn overlap_predicate() {
        let a = MultiPolygon(vec![unit_square()]);
        let b = MultiPolygon(vec![Polygon::rect(0.9, 0.9, 2.0, 2.0)]);
        let c = MultiPolygon(vec![Polygon::rect(1.0, 0.0, 2.0, 1.0)]); // edge touch
        assert!(interiors_overlap(&a, &b));
        assert!(!interiors_overlap(&a, &c));
    }

    #[test]
    fn contains_basic() {
        let r = unit_square().outer;
        assert!(r.contains(Pt::new(0.5, 0.5)));
        assert!(!r.contains(Pt::new(1.5, 0.5)));
    }
}
