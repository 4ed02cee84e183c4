//! Small geometric toolbox: segment/shape distances and convex face sets.
//!
//! Everything here is plain Euclidean geometry on `f64`, written so that the
//! higher-level predicates (finger contact, insertion corridors, capture
//! margins) stay readable. Units are metres throughout.

use nalgebra::{Point3, UnitQuaternion, Vector2, Vector3};
use serde::{Deserialize, Serialize};

/// Clamped parameter of the point on segment `ab` closest to `p`.
pub fn segment_closest_param(a: Point3<f64>, b: Point3<f64>, p: Point3<f64>) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 <= f64::EPSILON {
        return 0.0;
    }
    ((p - a).dot(&ab) / len2).clamp(0.0, 1.0)
}

/// Distance from point `p` to segment `ab`.
pub fn segment_point_distance(a: Point3<f64>, b: Point3<f64>, p: Point3<f64>) -> f64 {
    let t = segment_closest_param(a, b, p);
    (a + (b - a) * t - p).norm()
}

/// A solid placed in the world. Items and fixtures reduce to these shapes
/// for all contact queries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Solid {
    Sphere {
        center: Point3<f64>,
        radius: f64,
    },
    /// Axis-aligned in its own frame; `orientation` poses it in the world.
    Ellipsoid {
        center: Point3<f64>,
        orientation: UnitQuaternion<f64>,
        semi_axes: Vector3<f64>,
    },
    /// The half-space `z <= height` (used for the crate floor).
    Floor {
        height: f64,
    },
}

impl Solid {
    /// Signed distance from `p` to the surface: positive outside, negative
    /// inside. Exact for spheres and the floor; for ellipsoids the outside
    /// distance is solved numerically (see [`ellipsoid_point_distance`]) and
    /// the inside is reported with a scaled-space approximation, which is
    /// fine for the overlap *tests* this crate performs.
    pub fn signed_distance(&self, p: Point3<f64>) -> f64 {
        match *self {
            Solid::Sphere { center, radius } => (p - center).norm() - radius,
            Solid::Ellipsoid {
                center,
                orientation,
                semi_axes,
            } => {
                let local = orientation.inverse_transform_vector(&(p - center));
                ellipsoid_point_distance(local, semi_axes)
            }
            Solid::Floor { height } => p.z - height,
        }
    }

    /// Minimum signed distance from segment `ab` to the surface, evaluated
    /// by sampling the segment densely. `step` bounds the sample spacing;
    /// the answer errs by at most about `step` which is acceptable against
    /// the millimetre-scale clearances used by the predicates.
    pub fn segment_distance(&self, a: Point3<f64>, b: Point3<f64>, step: f64) -> f64 {
        match *self {
            // Exact closed forms where they are cheap.
            Solid::Sphere { center, radius } => {
                segment_point_distance(a, b, center) - radius
            }
            Solid::Floor { height } => a.z.min(b.z) - height,
            Solid::Ellipsoid { .. } => {
                let len = (b - a).norm();
                let n = (len / step).ceil().max(1.0) as usize;
                let mut best = f64::INFINITY;
                for i in 0..=n {
                    let t = i as f64 / n as f64;
                    best = best.min(self.signed_distance(a + (b - a) * t));
                }
                best
            }
        }
    }

    /// Lowest point of the solid along `-z` (used for resting heights).
    /// Unbounded solids return `None`.
    pub fn lowest_z(&self) -> Option<f64> {
        match *self {
            Solid::Sphere { center, radius } => Some(center.z - radius),
            Solid::Ellipsoid {
                center,
                orientation,
                semi_axes,
            } => {
                // Support point in direction -z: |S Rᵀ d| with S = diag(a).
                let d = orientation.inverse_transform_vector(&-Vector3::z());
                let extent = (semi_axes.component_mul(&d)).norm();
                Some(center.z - extent)
            }
            Solid::Floor { .. } => None,
        }
    }

    /// Highest point of the solid along `+z`.
    pub fn highest_z(&self) -> Option<f64> {
        match *self {
            Solid::Sphere { center, radius } => Some(center.z + radius),
            Solid::Ellipsoid {
                center,
                orientation,
                semi_axes,
            } => {
                let d = orientation.inverse_transform_vector(&Vector3::z());
                let extent = (semi_axes.component_mul(&d)).norm();
                Some(center.z + extent)
            }
            Solid::Floor { .. } => None,
        }
    }
}

/// Signed distance from a point (in the ellipsoid frame) to the surface of
/// the axis-aligned ellipsoid with the given semi-axes.
///
/// Outside, the exact distance is found by solving the KKT condition
/// `sum((a_i q_i / (t + a_i^2))^2) = 1` for `t >= 0` with bisection; inside,
/// a scaled-space estimate is returned (negative, monotone in depth), which
/// is all the penetration tests need.
pub fn ellipsoid_point_distance(q: Vector3<f64>, semi_axes: Vector3<f64>) -> f64 {
    let a = semi_axes;
    let level =
        (q.x / a.x).powi(2) + (q.y / a.y).powi(2) + (q.z / a.z).powi(2);
    if level <= 1.0 {
        // Inside: estimate via the scaled radial gap along the ray from the
        // centre. Exact at the axes, conservative elsewhere.
        let r = level.sqrt();
        if r <= f64::EPSILON {
            return -a.min();
        }
        let surface = q.norm() / r;
        return q.norm() - surface;
    }
    let f = |t: f64| -> f64 {
        (a.x * q.x / (t + a.x * a.x)).powi(2)
            + (a.y * q.y / (t + a.y * a.y)).powi(2)
            + (a.z * q.z / (t + a.z * a.z)).powi(2)
    };
    // Bracket the root: f is decreasing for t >= 0, f(0) = level > 1.
    let mut lo = 0.0_f64;
    let mut hi = a.max() * q.norm().max(a.max());
    while f(hi) > 1.0 {
        hi *= 2.0;
    }
    for _ in 0..90 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let closest = Vector3::new(
        a.x * a.x * q.x / (t + a.x * a.x),
        a.y * a.y * q.y / (t + a.y * a.y),
        a.z * a.z * q.z / (t + a.z * a.z),
    );
    (q - closest).norm()
}

/// Convex region in the grasp plane described by inward-facing edges.
///
/// Each face is the half-plane `p · direction <= offset`; the region is the
/// intersection of all of them. The fingertip polygon is represented this
/// way: one face per finger, normal along the finger's outward azimuth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceSet {
    /// Unit outward directions, one per face.
    pub directions: Vec<Vector2<f64>>,
    /// Face offsets along the matching direction (metres).
    pub offsets: Vec<f64>,
}

impl FaceSet {
    pub fn new(directions: Vec<Vector2<f64>>, offsets: Vec<f64>) -> Self {
        assert_eq!(directions.len(), offsets.len());
        Self { directions, offsets }
    }

    /// Signed clearance of `p` to the region boundary: positive inside
    /// (distance to the nearest face), negative outside.
    pub fn margin(&self, p: Vector2<f64>) -> f64 {
        self.directions
            .iter()
            .zip(&self.offsets)
            .map(|(d, o)| o - p.dot(d))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: Vector2<f64>) -> bool {
        self.margin(p) >= 0.0
    }

    /// Radius of the largest circle centred at the origin that fits in the
    /// region; zero when the origin itself is outside.
    pub fn inscribed_radius_at_origin(&self) -> f64 {
        self.margin(Vector2::zeros()).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn segment_distance_degenerate_and_interior() {
        let a = Point3::new(0.0, 0.0, 0.0);
        let b = Point3::new(1.0, 0.0, 0.0);
        assert_relative_eq!(
            segment_point_distance(a, b, Point3::new(0.5, 2.0, 0.0)),
            2.0
        );
        assert_relative_eq!(
            segment_point_distance(a, b, Point3::new(-3.0, 4.0, 0.0)),
            5.0
        );
        // Zero-length segment degrades to point distance.
        assert_relative_eq!(
            segment_point_distance(a, a, Point3::new(0.0, 1.0, 0.0)),
            1.0
        );
    }

    #[test]
    fn sphere_signed_distance() {
        let s = Solid::Sphere {
            center: Point3::new(0.0, 0.0, 1.0),
            radius: 0.5,
        };
        assert_relative_eq!(s.signed_distance(Point3::new(0.0, 0.0, 2.0)), 0.5);
        assert!(s.signed_distance(Point3::new(0.0, 0.0, 1.1)) < 0.0);
    }

    /// Brute-force oracle: distance to an ellipsoid by dense surface
    /// sampling. Slow but independent of the KKT solver.
    fn ellipsoid_distance_oracle(q: Vector3<f64>, a: Vector3<f64>) -> f64 {
        let mut best = f64::INFINITY;
        let n = 400;
        for i in 0..=n {
            let theta = std::f64::consts::PI * i as f64 / n as f64;
            for j in 0..(2 * n) {
                let phi = std::f64::consts::PI * j as f64 / n as f64;
                let s = Vector3::new(
                    a.x * theta.sin() * phi.cos(),
                    a.y * theta.sin() * phi.sin(),
                    a.z * theta.cos(),
                );
                best = best.min((q - s).norm());
            }
        }
        best
    }

    #[test]
    fn ellipsoid_distance_matches_sampling_oracle() {
        let a = Vector3::new(0.025, 0.015, 0.015);
        for q in [
            Vector3::new(0.04, 0.0, 0.0),
            Vector3::new(0.0, 0.03, 0.01),
            Vector3::new(0.02, 0.02, 0.02),
            Vector3::new(-0.05, 0.01, -0.02),
        ] {
            let exact = ellipsoid_point_distance(q, a);
            let oracle = ellipsoid_distance_oracle(q, a);
            assert!(
                (exact - oracle).abs() < 2e-4,
                "q={q:?} exact={exact} oracle={oracle}"
            );
        }
    }

    #[test]
    fn ellipsoid_inside_is_negative() {
        let a = Vector3::new(0.025, 0.015, 0.015);
        assert!(ellipsoid_point_distance(Vector3::new(0.01, 0.0, 0.0), a) < 0.0);
        assert_relative_eq!(
            ellipsoid_point_distance(Vector3::zeros(), a),
            -0.015,
            epsilon = 1e-12
        );
        // On an axis tip the inside estimate is exact.
        assert_relative_eq!(
            ellipsoid_point_distance(Vector3::new(0.02, 0.0, 0.0), a),
            -0.005,
            epsilon = 1e-9
        );
    }

    #[test]
    fn face_set_margin_square() {
        // Unit square via four faces at distance 1.
        let faces = FaceSet::new(
            vec![
                Vector2::new(1.0, 0.0),
                Vector2::new(-1.0, 0.0),
                Vector2::new(0.0, 1.0),
                Vector2::new(0.0, -1.0),
            ],
            vec![1.0; 4],
        );
        assert_relative_eq!(faces.margin(Vector2::zeros()), 1.0);
        assert_relative_eq!(faces.margin(Vector2::new(0.5, 0.0)), 0.5);
        assert!(!faces.contains(Vector2::new(1.5, 0.0)));
        assert_relative_eq!(faces.inscribed_radius_at_origin(), 1.0);
    }
}
