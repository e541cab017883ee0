use crate::drive::{wrap_angle_diff, ExternalState};

pub type Point = [f64; 2];

const BOUNDARY_EPS: f64 = 1e-12;

/// Closed polygonal arena. Points on the boundary count as outside.
#[derive(Debug, Clone, PartialEq)]
pub struct Arena {
    vertices: Vec<Point>,
}

impl Arena {
    pub fn new(vertices: Vec<Point>) -> Self {
        Self { vertices }
    }

    /// The eighteen-vertex maze with four alcoves.
    pub fn default_maze() -> Self {
        Self::new(vec![
            [1.0, 1.0],
            [1.0, 5.0],
            [2.0, 5.0],
            [2.0, 3.0],
            [3.0, 3.0],
            [3.0, 4.0],
            [4.0, 4.0],
            [4.0, 6.0],
            [9.0, 6.0],
            [9.0, 5.0],
            [6.0, 5.0],
            [6.0, 3.0],
            [7.0, 3.0],
            [7.0, 0.0],
            [6.0, 0.0],
            [6.0, 2.0],
            [5.0, 2.0],
            [5.0, 1.0],
        ])
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// `(min, max)` corners of the bounding box.
    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    /// Even-odd ray casting; boundary points are outside.
    pub fn contains(&self, p: Point) -> bool {
        if self.vertices.len() < 3 {
            return false;
        }
        if self.edges().any(|(a, b)| on_segment(p, a, b)) {
            return false;
        }
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x_cross = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                if p[0] < x_cross {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Checks vertex count, finiteness and that no two non-adjacent edges meet.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.vertices.len();
        if n < 3 {
            return Err(format!("polygon needs at least 3 vertices, got {n}"));
        }
        if self.vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err("vertex coordinates must be finite".into());
        }
        let edges: Vec<_> = self.edges().collect();
        for i in 0..n {
            if edges[i].0 == edges[i].1 {
                return Err(format!("edge {i} has zero length"));
            }
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                if segments_intersect(edges[i].0, edges[i].1, edges[j].0, edges[j].1) {
                    return Err(format!("edges {i} and {j} intersect"));
                }
            }
        }
        Ok(())
    }
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn on_segment(p: Point, a: Point, b: Point) -> bool {
    let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
    if cross(a, b, p).abs() > BOUNDARY_EPS * len.max(1.0) {
        return false;
    }
    let within = |k: usize| p[k] >= a[k].min(b[k]) - BOUNDARY_EPS && p[k] <= a[k].max(b[k]) + BOUNDARY_EPS;
    within(0) && within(1)
}

fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    on_segment(p1, q1, q2) || on_segment(p2, q1, q2) || on_segment(q1, p1, p2) || on_segment(q2, p1, p2)
}

/// A fixed, inexhaustible consumption site for one resource.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceSite {
    /// 1-based resource index.
    pub resource_index: usize,
    pub center: Point,
    pub radius: f64,
}

impl ResourceSite {
    pub fn new(resource_index: usize, center: Point, radius: f64) -> Self {
        Self {
            resource_index,
            center,
            radius,
        }
    }

    pub fn defaults() -> Vec<Self> {
        vec![
            Self::new(1, [1.5, 4.25], 0.3),
            Self::new(2, [4.5, 1.5], 0.3),
            Self::new(3, [8.0, 5.5], 0.3),
            Self::new(4, [6.5, 0.75], 0.3),
        ]
    }

    pub fn reaches(&self, p: Point) -> bool {
        distance(p, self.center) <= self.radius
    }
}

pub fn distance(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// `true` iff `p` lies within `range` of the agent and within `half_angle`
/// of its heading.
pub fn in_view(pose: &ExternalState, p: Point, range: f64, half_angle: f64) -> bool {
    let dx = p[0] - pose.x;
    let dy = p[1] - pose.y;
    let dist = dx.hypot(dy);
    if dist == 0.0 {
        return true;
    }
    if dist > range {
        return false;
    }
    wrap_angle_diff(dy.atan2(dx) - pose.heading).abs() <= half_angle
}
