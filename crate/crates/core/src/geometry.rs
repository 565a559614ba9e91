//! Planar geometry for mission spaces: polygons, the feasible region, and
//! line-of-sight tests that respect obstacles.
//!
//! Boundary conventions:
//! - a polygon contains its boundary;
//! - the feasible region is the mission polygon minus obstacle *interiors*, so
//!   obstacle edges are feasible;
//! - a sight line is blocked only when it runs through an obstacle interior (or
//!   leaves the mission polygon) over a stretch of positive length. Grazing a
//!   vertex or sliding along an edge does not block.
//!
//! All predicates use the absolute tolerance [`EPS_GEO`].

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Absolute length tolerance for every geometric predicate.
pub const EPS_GEO: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(
            self.x + t * (other.x - self.x),
            self.y + t * (other.y - self.y),
        )
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    fn overlaps_segment(&self, a: Point, b: Point) -> bool {
        a.x.max(b.x) >= self.min.x - EPS_GEO
            && a.x.min(b.x) <= self.max.x + EPS_GEO
            && a.y.max(b.y) >= self.min.y - EPS_GEO
            && a.y.min(b.y) <= self.max.y + EPS_GEO
    }
}

/// Closest point to `p` on the closed segment `a`-`b`.
pub fn project_onto_segment(p: Point, a: Point, b: Point) -> Point {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return a;
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    a.lerp(b, t)
}

pub fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    p.dist(project_onto_segment(p, a, b))
}

/// Do the closed segments `a`-`b` and `c`-`d` share any point (within tolerance)?
pub fn segments_touch(a: Point, b: Point, c: Point, d: Point) -> bool {
    let mut ts = SmallVec::<[f64; 4]>::new();
    push_contacts(a, b, c, d, &mut ts);
    !ts.is_empty() || (a.dist(b) <= EPS_GEO && segment_distance(a, c, d) <= EPS_GEO)
}

/// Do the segments cross at a single point interior to both?
fn segments_cross_properly(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = (b - a).cross(c - a);
    let o2 = (b - a).cross(d - a);
    let o3 = (d - c).cross(a - c);
    let o4 = (d - c).cross(b - c);
    let tol_ab = EPS_GEO * a.dist(b);
    let tol_cd = EPS_GEO * c.dist(d);
    ((o1 > tol_ab && o2 < -tol_ab) || (o1 < -tol_ab && o2 > tol_ab))
        && ((o3 > tol_cd && o4 < -tol_cd) || (o3 < -tol_cd && o4 > tol_cd))
}

/// Appends the parameters `t` in `[0, 1]` at which segment `a + t (b - a)`
/// meets the closed segment `c`-`d`. Collinear overlaps contribute the
/// parameters of the overlap endpoints.
fn push_contacts<A: smallvec::Array<Item = f64>>(
    a: Point,
    b: Point,
    c: Point,
    d: Point,
    out: &mut SmallVec<A>,
) {
    let r = b - a;
    let s = d - c;
    let len_r = r.norm();
    let len_s = s.norm();
    if len_r == 0.0 || len_s == 0.0 {
        return;
    }
    let denom = r.cross(s);
    let qp = c - a;
    let tol_t = EPS_GEO / len_r;
    if denom.abs() > 1e-12 * len_r * len_s {
        let t = qp.cross(s) / denom;
        let u = qp.cross(r) / denom;
        let tol_u = EPS_GEO / len_s;
        if (-tol_t..=1.0 + tol_t).contains(&t) && (-tol_u..=1.0 + tol_u).contains(&u) {
            out.push(t.clamp(0.0, 1.0));
        }
        return;
    }
    // Parallel: only collinear edges can touch.
    if (qp.cross(r) / len_r).abs() > EPS_GEO {
        return;
    }
    let len2 = len_r * len_r;
    let tc = qp.dot(r) / len2;
    let td = (d - a).dot(r) / len2;
    let (lo, hi) = if tc <= td { (tc, td) } else { (td, tc) };
    if hi < -tol_t || lo > 1.0 + tol_t {
        return;
    }
    out.push(lo.clamp(0.0, 1.0));
    out.push(hi.clamp(0.0, 1.0));
}

/// Simple polygon with an implicit closing edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
    bbox: BBox,
}

impl Polygon {
    /// Validates and builds a polygon: at least three finite vertices, nonzero
    /// area, and no two non-adjacent edges touching.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Geometry(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(p) = vertices.iter().find(|p| !p.is_finite()) {
            return Err(Error::Geometry(format!(
                "non-finite vertex ({}, {})",
                p.x, p.y
            )));
        }
        let mut min = vertices[0];
        let mut max = vertices[0];
        for v in &vertices {
            min.x = min.x.min(v.x);
            min.y = min.y.min(v.y);
            max.x = max.x.max(v.x);
            max.y = max.y.max(v.y);
        }
        let poly = Polygon {
            vertices,
            bbox: BBox { min, max },
        };
        if poly.area() <= EPS_GEO * EPS_GEO {
            return Err(Error::Geometry("polygon has zero area".into()));
        }
        let n = poly.vertices.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                let (a, b) = poly.edge(i);
                let (c, d) = poly.edge(j);
                if segments_touch(a, b, c, d) {
                    return Err(Error::Geometry(format!(
                        "polygon is self-intersecting: edges {i} and {j} meet"
                    )));
                }
            }
        }
        Ok(poly)
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        Polygon::new(vec![
            Point::new(x0, y0),
            Point::new(x1, y0),
            Point::new(x1, y1),
            Point::new(x0, y1),
        ])
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn bbox(&self) -> BBox {
        self.bbox
    }

    pub fn edge(&self, i: usize) -> (Point, Point) {
        let n = self.vertices.len();
        (self.vertices[i], self.vertices[(i + 1) % n])
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        (0..self.vertices.len()).map(move |i| self.edge(i))
    }

    pub fn signed_area(&self) -> f64 {
        0.5 * self.edges().map(|(a, b)| a.cross(b)).sum::<f64>()
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    pub fn on_boundary(&self, p: Point) -> bool {
        let b = self.bbox;
        if p.x < b.min.x - EPS_GEO
            || p.x > b.max.x + EPS_GEO
            || p.y < b.min.y - EPS_GEO
            || p.y > b.max.y + EPS_GEO
        {
            return false;
        }
        self.edges()
            .any(|(a, b)| segment_distance(p, a, b) <= EPS_GEO)
    }

    /// Even-odd crossing test; says nothing reliable about boundary points.
    fn crossing_inside(&self, p: Point) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Closed containment: boundary points count as inside.
    pub fn contains(&self, p: Point) -> bool {
        let b = self.bbox;
        if p.x < b.min.x - EPS_GEO
            || p.x > b.max.x + EPS_GEO
            || p.y < b.min.y - EPS_GEO
            || p.y > b.max.y + EPS_GEO
        {
            return false;
        }
        self.on_boundary(p) || self.crossing_inside(p)
    }

    /// Open containment: inside and not on the boundary.
    pub fn contains_strictly(&self, p: Point) -> bool {
        let b = self.bbox;
        if p.x <= b.min.x || p.x >= b.max.x || p.y <= b.min.y || p.y >= b.max.y {
            return false;
        }
        !self.on_boundary(p) && self.crossing_inside(p)
    }

    /// A few points just inside the polygon, one per edge (offset from the
    /// edge midpoint along the inward normal).
    fn interior_samples(&self) -> Vec<Point> {
        let orient = self.signed_area().signum();
        let scale = (self.bbox.width().min(self.bbox.height()) * 1e-4).max(1e3 * EPS_GEO);
        self.edges()
            .filter_map(|(a, b)| {
                let e = b - a;
                let len = e.norm();
                if len == 0.0 {
                    return None;
                }
                // Left normal points inward for counter-clockwise polygons.
                let n = Point::new(-e.y, e.x) * (orient / len);
                let p = a.lerp(b, 0.5) + n * scale;
                self.contains_strictly(p).then_some(p)
            })
            .collect()
    }
}

pub fn point_in_polygon(p: Point, poly: &Polygon) -> bool {
    poly.contains(p)
}

/// Mission polygon plus obstacles.
#[derive(Debug, Clone, PartialEq)]
pub struct MissionSpace {
    boundary: Polygon,
    obstacles: Vec<Polygon>,
}

impl MissionSpace {
    pub fn new(boundary: Polygon, obstacles: Vec<Polygon>) -> Result<Self> {
        for (k, obs) in obstacles.iter().enumerate() {
            if let Some(v) = obs.vertices().iter().find(|v| !boundary.contains(**v)) {
                return Err(Error::Geometry(format!(
                    "obstacle {k}: vertex ({}, {}) lies outside the boundary",
                    v.x, v.y
                )));
            }
        }
        for i in 0..obstacles.len() {
            for j in (i + 1)..obstacles.len() {
                if interiors_overlap(&obstacles[i], &obstacles[j]) {
                    return Err(Error::Geometry(format!("obstacles {i} and {j} overlap")));
                }
            }
        }
        Ok(MissionSpace {
            boundary,
            obstacles,
        })
    }

    pub fn boundary(&self) -> &Polygon {
        &self.boundary
    }

    pub fn obstacles(&self) -> &[Polygon] {
        &self.obstacles
    }

    pub fn bbox(&self) -> BBox {
        self.boundary.bbox()
    }

    /// Largest distance between two boundary vertices.
    pub fn diameter(&self) -> f64 {
        let v = self.boundary.vertices();
        let mut best = 0.0_f64;
        for (i, a) in v.iter().enumerate() {
            for b in &v[i + 1..] {
                best = best.max(a.dist(*b));
            }
        }
        best
    }

    pub fn is_feasible(&self, p: Point) -> bool {
        self.boundary.contains(p) && !self.obstacles.iter().any(|o| o.contains_strictly(p))
    }

    /// Line of sight between two feasible points within sensing radius `delta`.
    pub fn is_visible(&self, a: Point, b: Point, delta: f64) -> bool {
        let len = a.dist(b);
        if len > delta + EPS_GEO {
            return false;
        }
        if len <= EPS_GEO {
            return true;
        }
        if !segment_stays_inside(a, b, &self.boundary) {
            return false;
        }
        !self
            .obstacles
            .iter()
            .any(|o| segment_enters_interior(a, b, o))
    }

    /// Nearest feasible point: `p` itself when feasible, otherwise the closest
    /// projection onto a boundary or obstacle edge that is feasible.
    pub fn project_feasible(&self, p: Point) -> Point {
        if self.is_feasible(p) {
            return p;
        }
        let mut best: Option<(f64, Point)> = None;
        let polys = std::iter::once(&self.boundary).chain(self.obstacles.iter());
        for poly in polys {
            for (a, b) in poly.edges() {
                let q = project_onto_segment(p, a, b);
                let d = p.dist(q);
                if best.is_some_and(|(bd, _)| bd <= d) {
                    continue;
                }
                if self.is_feasible(q) {
                    best = Some((d, q));
                }
            }
        }
        // Some edge point is always feasible for a valid mission space.
        best.map(|(_, q)| q).unwrap_or(self.boundary.vertices()[0])
    }
}

pub fn is_feasible(p: Point, ms: &MissionSpace) -> bool {
    ms.is_feasible(p)
}

pub fn is_visible(a: Point, b: Point, ms: &MissionSpace, delta: f64) -> bool {
    ms.is_visible(a, b, delta)
}

pub fn project_feasible(p: Point, ms: &MissionSpace) -> Point {
    ms.project_feasible(p)
}

fn interiors_overlap(p: &Polygon, q: &Polygon) -> bool {
    let bp = p.bbox();
    let bq = q.bbox();
    if bp.max.x <= bq.min.x || bq.max.x <= bp.min.x || bp.max.y <= bq.min.y || bq.max.y <= bp.min.y
    {
        return false;
    }
    for (a, b) in p.edges() {
        for (c, d) in q.edges() {
            if segments_cross_properly(a, b, c, d) {
                return true;
            }
        }
    }
    p.vertices().iter().any(|v| q.contains_strictly(*v))
        || q.vertices().iter().any(|v| p.contains_strictly(*v))
        || p.interior_samples().iter().any(|s| q.contains_strictly(*s))
        || q.interior_samples().iter().any(|s| p.contains_strictly(*s))
}

/// Sorted contact parameters of segment `a`-`b` with the polygon boundary,
/// always including both endpoints.
fn contact_params(a: Point, b: Point, poly: &Polygon) -> SmallVec<[f64; 16]> {
    let mut ts = SmallVec::<[f64; 16]>::new();
    ts.push(0.0);
    ts.push(1.0);
    for (c, d) in poly.edges() {
        push_contacts(a, b, c, d, &mut ts);
    }
    ts.sort_unstable_by(f64::total_cmp);
    ts
}

/// Does the segment run through the open interior of `poly` over some
/// stretch of positive length?
fn segment_enters_interior(a: Point, b: Point, poly: &Polygon) -> bool {
    if !poly.bbox().overlaps_segment(a, b) {
        return false;
    }
    let ts = contact_params(a, b, poly);
    if ts.len() == 2 {
        // No boundary contact: the whole segment is on one side.
        return poly.contains_strictly(a.lerp(b, 0.5));
    }
    let min_gap = 2.0 * EPS_GEO / a.dist(b);
    ts.windows(2)
        .any(|w| w[1] - w[0] > min_gap && poly.contains_strictly(a.lerp(b, 0.5 * (w[0] + w[1]))))
}

/// Does the whole segment stay in the closed polygon?
fn segment_stays_inside(a: Point, b: Point, poly: &Polygon) -> bool {
    let ts = contact_params(a, b, poly);
    if ts.len() == 2 {
        return poly.contains(a.lerp(b, 0.5));
    }
    let min_gap = 2.0 * EPS_GEO / a.dist(b);
    ts.windows(2)
        .all(|w| w[1] - w[0] <= min_gap || poly.contains(a.lerp(b, 0.5 * (w[0] + w[1]))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_square() -> Polygon {
        Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap()
    }

    fn l_shape() -> Polygon {
        Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(10.0, 0.0),
            Point::new(10.0, 4.0),
            Point::new(4.0, 4.0),
            Point::new(4.0, 10.0),
            Point::new(0.0, 10.0),
        ])
        .unwrap()
    }

    fn star() -> Polygon {
        let mut v = Vec::new();
        for k in 0..10 {
            let ang = std::f64::consts::PI * k as f64 / 5.0 + 0.1;
            let r = if k % 2 == 0 { 5.0 } else { 2.0 };
            v.push(Point::new(r * ang.cos(), r * ang.sin()));
        }
        Polygon::new(v).unwrap()
    }

    fn room_with_block() -> MissionSpace {
        MissionSpace::new(
            Polygon::rectangle(0.0, 0.0, 10.0, 10.0).unwrap(),
            vec![Polygon::rectangle(4.0, 4.0, 6.0, 6.0).unwrap()],
        )
        .unwrap()
    }

    /// Winding number by summing signed angles; independent of the crossing test.
    fn winding_number(p: Point, poly: &Polygon) -> i32 {
        let total: f64 = poly
            .edges()
            .map(|(a, b)| {
                let u = a - p;
                let v = b - p;
                u.cross(v).atan2(u.dot(v))
            })
            .sum();
        (total / (2.0 * std::f64::consts::PI)).round() as i32
    }

    #[test]
    fn point_in_polygon_basic_cases() {
        let sq = unit_square();
        assert!(point_in_polygon(Point::new(0.5, 0.5), &sq));
        assert!(!point_in_polygon(Point::new(2.0, 2.0), &sq));
        assert!(point_in_polygon(Point::new(0.5, 0.0), &sq));
        assert!(point_in_polygon(Point::new(1.0, 1.0), &sq));
        assert!(!sq.contains_strictly(Point::new(0.5, 0.0)));
    }

    #[test]
    fn point_in_polygon_matches_winding_number() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for poly in [unit_square(), l_shape(), star()] {
            let b = poly.bbox();
            for _ in 0..10_000 {
                let p = Point::new(
                    rng.gen_range(b.min.x - 1.0..b.max.x + 1.0),
                    rng.gen_range(b.min.y - 1.0..b.max.y + 1.0),
                );
                if poly.on_boundary(p) {
                    continue;
                }
                assert_eq!(
                    point_in_polygon(p, &poly),
                    winding_number(p, &poly) != 0,
                    "disagreement at {p:?}"
                );
            }
        }
    }

    #[test]
    fn rejects_degenerate_polygons() {
        assert!(Polygon::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)]).is_err());
        let collinear = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(2.0, 0.0),
        ];
        assert!(Polygon::new(collinear).is_err());
        let bowtie = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        ];
        assert!(Polygon::new(bowtie).is_err());
        assert!(Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(f64::NAN, 0.0),
            Point::new(0.0, 1.0),
        ])
        .is_err());
    }

    #[test]
    fn mission_space_validation() {
        let outer = Polygon::rectangle(0.0, 0.0, 10.0, 10.0).unwrap();
        let outside = Polygon::rectangle(8.0, 8.0, 12.0, 9.0).unwrap();
        let err = MissionSpace::new(outer.clone(), vec![outside]).unwrap_err();
        assert!(err.to_string().contains("obstacle 0"));

        let a = Polygon::rectangle(1.0, 1.0, 4.0, 4.0).unwrap();
        let b = Polygon::rectangle(3.0, 3.0, 6.0, 6.0).unwrap();
        assert!(MissionSpace::new(outer.clone(), vec![a.clone(), b]).is_err());
        // Identical obstacles overlap although no edges cross properly.
        assert!(MissionSpace::new(outer.clone(), vec![a.clone(), a.clone()]).is_err());
        // Touching obstacles are fine.
        let c = Polygon::rectangle(4.0, 1.0, 6.0, 4.0).unwrap();
        assert!(MissionSpace::new(outer.clone(), vec![a, c]).is_ok());
        // Obstacles may rest on the boundary.
        let wall = Polygon::rectangle(0.0, 4.0, 5.0, 5.0).unwrap();
        assert!(MissionSpace::new(outer, vec![wall]).is_ok());
    }

    #[test]
    fn feasibility_follows_obstacle_interiors() {
        let ms = room_with_block();
        assert!(ms.is_feasible(Point::new(1.0, 1.0)));
        assert!(!ms.is_feasible(Point::new(5.0, 5.0)));
        assert!(ms.is_feasible(Point::new(4.0, 5.0)));
        assert!(ms.is_feasible(Point::new(6.0, 6.0)));
        assert!(!ms.is_feasible(Point::new(11.0, 5.0)));
    }

    #[test]
    fn visibility_cases() {
        let ms = room_with_block();
        let a = Point::new(1.0, 5.0);
        assert!(ms.is_visible(a, a, 0.0));
        assert!(!ms.is_visible(a, Point::new(9.0, 5.0), 100.0));
        assert!(!ms.is_visible(Point::new(2.0, 2.0), Point::new(8.0, 8.0), 100.0));
        // Enters at the corner (4, 6) and crosses the interior.
        assert!(!ms.is_visible(Point::new(2.0, 8.0), Point::new(6.0, 4.0), 100.0));
        // Sliding along an obstacle edge.
        assert!(ms.is_visible(Point::new(1.0, 4.0), Point::new(9.0, 4.0), 100.0));
        // Grazing the corner (4, 4) from outside.
        assert!(ms.is_visible(Point::new(3.0, 5.0), Point::new(5.0, 3.0), 100.0));
        assert!(ms.is_visible(Point::new(2.0, 6.0), Point::new(6.0, 2.0), 100.0));
        // Ending on a corner.
        assert!(ms.is_visible(Point::new(2.0, 8.0), Point::new(4.0, 6.0), 100.0));
        assert!(ms.is_visible(Point::new(0.0, 2.0), Point::new(6.0, 4.0), 100.0));
        assert!(ms.is_visible(Point::new(3.0, 7.0), Point::new(5.0, 7.0), 100.0));
        // Exact sensing radius (3-4-5 triangle).
        let b = Point::new(4.0, 9.0);
        assert!(ms.is_visible(a, b, 5.0));
        assert!(!ms.is_visible(a, b, 4.999));
        // Endpoint on the obstacle boundary looking away, then through it.
        assert!(ms.is_visible(Point::new(4.0, 5.0), Point::new(1.0, 5.0), 100.0));
        assert!(!ms.is_visible(Point::new(4.0, 5.0), Point::new(7.0, 5.0), 100.0));
    }

    #[test]
    fn visibility_respects_concave_boundary() {
        let ms = MissionSpace::new(l_shape(), vec![]).unwrap();
        assert!(!ms.is_visible(Point::new(9.0, 2.0), Point::new(2.0, 9.0), 100.0));
        assert!(ms.is_visible(Point::new(9.0, 2.0), Point::new(2.0, 2.0), 100.0));
        // Along the reflex corner's edges.
        assert!(ms.is_visible(Point::new(10.0, 4.0), Point::new(4.0, 4.0), 100.0));
        assert!(!ms.is_visible(Point::new(8.0, 4.0), Point::new(4.0, 8.0), 100.0));
        assert!(!ms.is_visible(Point::new(6.0, 4.0), Point::new(4.0, 6.0), 100.0));
        assert!(ms.is_visible(Point::new(6.0, 2.0), Point::new(2.0, 6.0), 100.0));
    }

    #[test]
    fn project_feasible_cases() {
        let ms = room_with_block();
        let p = Point::new(1.5, 2.5);
        assert_eq!(ms.project_feasible(p), p);
        // Inside the block: nearest edge is x = 4.
        let q = ms.project_feasible(Point::new(4.4, 5.2));
        assert!((q.x - 4.0).abs() < 1e-12 && (q.y - 5.2).abs() < 1e-12);
        // Outside the boundary's bounding box: nearest boundary corner.
        let q = ms.project_feasible(Point::new(12.0, -3.0));
        assert!(q.dist(Point::new(10.0, 0.0)) < 1e-12);
        let q = ms.project_feasible(Point::new(5.0, 13.0));
        assert!(q.dist(Point::new(5.0, 10.0)) < 1e-12);
    }

    #[test]
    fn project_feasible_matches_per_edge_oracle() {
        let ms = room_with_block();
        let block = &ms.obstacles()[0];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let p = Point::new(rng.gen_range(4.01..5.99), rng.gen_range(4.01..5.99));
            let oracle = block
                .edges()
                .map(|(a, b)| project_onto_segment(p, a, b))
                .min_by(|u, v| p.dist(*u).total_cmp(&p.dist(*v)))
                .unwrap();
            let q = ms.project_feasible(p);
            assert!((p.dist(q) - p.dist(oracle)).abs() < 1e-12);
            assert!(ms.is_feasible(q));
        }
    }

    proptest! {
        #[test]
        fn visibility_is_symmetric(ax in 0.0..10.0f64, ay in 0.0..10.0f64,
                                   bx in 0.0..10.0f64, by in 0.0..10.0f64,
                                   delta in 0.0..15.0f64) {
            let ms = room_with_block();
            let a = Point::new(ax, ay);
            let b = Point::new(bx, by);
            prop_assume!(ms.is_feasible(a) && ms.is_feasible(b));
            prop_assert_eq!(ms.is_visible(a, b, delta), ms.is_visible(b, a, delta));
        }

        #[test]
        fn visibility_is_monotone_in_radius(ax in 0.0..10.0f64, ay in 0.0..3.9f64,
                                            bx in 0.0..10.0f64, by in 0.0..10.0f64,
                                            d1 in 0.0..15.0f64, extra in 0.0..5.0f64) {
            let ms = room_with_block();
            let a = Point::new(ax, ay);
            let b = Point::new(bx, by);
            prop_assume!(ms.is_feasible(b));
            if ms.is_visible(a, b, d1) {
                prop_assert!(ms.is_visible(a, b, d1 + extra));
            }
        }

        #[test]
        fn empty_convex_space_sees_everything(ax in 0.0..10.0f64, ay in 0.0..10.0f64,
                                              bx in 0.0..10.0f64, by in 0.0..10.0f64) {
            let ms = MissionSpace::new(Polygon::rectangle(0.0, 0.0, 10.0, 10.0).unwrap(), vec![]).unwrap();
            prop_assert!(ms.is_visible(Point::new(ax, ay), Point::new(bx, by), ms.diameter()));
        }
    }
}
