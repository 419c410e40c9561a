//! Polygon through the signature maxima and the circle built around it.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signature::{polar_to_cartesian, Centroid, SignatureExtrema};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Closed polygon; the edge from the last vertex back to the first is implied.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    /// At least three vertices, no two consecutive ones (cyclically) equal.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::TooFewExtrema { needed: 3, got: vertices.len() });
        }
        let n = vertices.len();
        if (0..n).any(|i| vertices[i] == vertices[(i + 1) % n]) {
            return Err(Error::DegeneratePolygon("consecutive vertices coincide".into()));
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Self { vertices }
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Self { vertices: self.vertices.iter().map(|p| Point::new(p.x + dx, p.y + dy)).collect() }
    }

    fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite() && center.x.is_finite() && center.y.is_finite()) {
            return Err(Error::DegeneratePolygon(format!("invalid circle radius {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.center.distance(p) <= self.radius
    }
}

/// Vertices are the maxima converted to image coordinates, in ascending angle.
pub fn polygon_from_extrema(extrema: &SignatureExtrema, centroid: &Centroid) -> Result<Polygon> {
    if extrema.len() < 3 {
        return Err(Error::TooFewExtrema { needed: 3, got: extrema.len() });
    }
    let mut pts = extrema.points.clone();
    pts.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    let poly = Polygon::new(pts.iter().map(|e| polar_to_cartesian(e.radius, e.theta, centroid)).collect())?;
    if !is_simple(&poly) {
        return Err(Error::DegeneratePolygon("polygon sides intersect".into()));
    }
    Ok(poly)
}

/// Signed shoelace area; positive when the vertices run counterclockwise in
/// a y-up frame. Polygons in image coordinates (y down) built in ascending
/// polar angle therefore come out negative.
pub fn shoelace_area(poly: &Polygon) -> f64 {
    0.5 * poly.edges().map(|(a, b)| a.x * b.y - b.x * a.y).sum::<f64>()
}

/// Area centroid from the signed shoelace sums.
pub fn polygon_centroid(poly: &Polygon) -> Result<Point> {
    let area = shoelace_area(poly);
    if area == 0.0 || !area.is_finite() {
        return Err(Error::DegeneratePolygon("zero area".into()));
    }
    let (mut cx, mut cy) = (0.0, 0.0);
    for (a, b) in poly.edges() {
        let cross = a.x * b.y - b.x * a.y;
        cx += (a.x + b.x) * cross;
        cy += (a.y + b.y) * cross;
    }
    Ok(Point::new(cx / (6.0 * area), cy / (6.0 * area)))
}

/// Circle centered on the polygon centroid with the mean centroid-to-vertex
/// distance as radius. Vertices farther than the mean lie outside it.
pub fn enclosing_circle(poly: &Polygon) -> Result<Circle> {
    let center = polygon_centroid(poly)?;
    let radius = poly.vertices().iter().map(|v| v.distance(&center)).sum::<f64>() / poly.len() as f64;
    Circle::new(center, radius)
}

/// Largest centroid-to-vertex distance, the circumscribing alternative to
/// [`enclosing_circle`]'s mean.
pub fn max_vertex_radius(poly: &Polygon) -> Result<f64> {
    let center = polygon_centroid(poly)?;
    Ok(poly.vertices().iter().map(|v| v.distance(&center)).fold(0.0, f64::max))
}

fn orient(a: Point, b: Point, c: Point) -> i8 {
    let v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test.
pub fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let (o1, o2) = (orient(p1, p2, q1), orient(p1, p2, q2));
    let (o3, o4) = (orient(q1, q2, p1), orient(q1, q2, p2));
    if o1 != o2 && o3 != o4 {
        return true;
    }
    (o1 == 0 && on_segment(p1, p2, q1))
        || (o2 == 0 && on_segment(p1, p2, q2))
        || (o3 == 0 && on_segment(q1, q2, p1))
        || (o4 == 0 && on_segment(q1, q2, p2))
}

/// True iff no two non-adjacent sides touch and adjacent sides share only
/// their common vertex.
pub fn is_simple(poly: &Polygon) -> bool {
    let v = poly.vertices();
    let n = v.len();
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        // adjacent side (b, c): must not fold back over (a, b)
        let c = v[(i + 2) % n];
        if orient(a, b, c) == 0 && (on_segment(a, b, c) || on_segment(b, c, a)) {
            return false;
        }
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_intersect(a, b, v[j], v[(j + 1) % n]) {
                return false;
            }
        }
    }
    // a repeated vertex anywhere pinches the boundary
    for i in 0..n {
        for j in i + 1..n {
            if v[i] == v[j] {
                return false;
            }
        }
    }
    true
}

/// Smallest circle containing every point (Welzl's algorithm on a seeded
/// shuffle, so the result is reproducible).
pub fn min_enclosing_circle(points: &[Point]) -> Result<Circle> {
    if points.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let mut pts = points.to_vec();
    pts.shuffle(&mut ChaCha8Rng::seed_from_u64(0x5eed));
    let eps = 1e-9;
    let mut c = (pts[0], 0.0);
    for i in 1..pts.len() {
        if pts[i].distance(&c.0) <= c.1 + eps {
            continue;
        }
        c = (pts[i], 0.0);
        for j in 0..i {
            if pts[j].distance(&c.0) <= c.1 + eps {
                continue;
            }
            let mid = Point::new((pts[i].x + pts[j].x) / 2.0, (pts[i].y + pts[j].y) / 2.0);
            c = (mid, mid.distance(&pts[i]));
            for k in 0..j {
                if pts[k].distance(&c.0) <= c.1 + eps {
                    continue;
                }
                c = circumcircle(pts[i], pts[j], pts[k]).unwrap_or(c);
            }
        }
    }
    // a single distinct point still needs a positive radius
    Circle::new(c.0, c.1.max(0.5))
}

fn circumcircle(a: Point, b: Point, c: Point) -> Option<(Point, f64)> {
    let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    if d == 0.0 {
        // collinear: the circle on the farthest pair
        let pairs = [(a, b), (b, c), (a, c)];
        let (p, q) = pairs
            .into_iter()
            .max_by(|x, y| x.0.distance(&x.1).total_cmp(&y.0.distance(&y.1)))?;
        let m = Point::new((p.x + q.x) / 2.0, (p.y + q.y) / 2.0);
        return Some((m, m.distance(&p)));
    }
    let (a2, b2, c2) = (a.x * a.x + a.y * a.y, b.x * b.x + b.y * b.y, c.x * c.x + c.y * c.y);
    let ux = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
    let uy = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
    let center = Point::new(ux, uy);
    Some((center, center.distance(&a)))
}

/// Overlay record for rendering: `{vertices: [[x, y], ...], center: [x, y], radius}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlayGeometry {
    pub vertices: Vec<[f64; 2]>,
    pub center: [f64; 2],
    pub radius: f64,
}

impl OverlayGeometry {
    pub fn new(poly: Option<&Polygon>, circle: &Circle) -> Self {
        Self {
            vertices: poly
                .map(|p| p.vertices().iter().map(|v| [v.x, v.y]).collect())
                .unwrap_or_default(),
            center: [circle.center.x, circle.center.y],
            radius: circle.radius,
        }
    }
}
