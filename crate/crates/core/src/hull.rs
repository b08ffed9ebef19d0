//! Exact rational convex hulls, possibly degenerate.
//!
//! All orientation tests run in `Rat` arithmetic; there is no floating point
//! in this module. The canonical form of a hull is: pairwise-distinct
//! vertices, counterclockwise, no three collinear vertices retained, starting
//! at the lexicographic minimum. Degenerate hulls (a single point or a
//! segment) are first-class values with their own tag.

use std::collections::BTreeSet;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{orient, Mat2, Rat, Rational2};

/// Degeneracy class of a rational polygon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolygonTag {
    Point,
    Segment,
    Polygon,
}

/// A convex rational polygon in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalPolygon {
    pub tag: PolygonTag,
    pub vertices: Vec<Rational2>,
}

impl RationalPolygon {
    /// Exact convex hull of a finite point set. Errs only on an empty input.
    pub fn hull(points: impl IntoIterator<Item = Rational2>) -> Result<RationalPolygon> {
        let pts: Vec<Rational2> = {
            let set: BTreeSet<Rational2> = points.into_iter().collect();
            set.into_iter().collect()
        };
        if pts.is_empty() {
            return Err(Error::InvalidArgument("hull of an empty point set".into()));
        }
        if pts.len() == 1 {
            return Ok(RationalPolygon { tag: PolygonTag::Point, vertices: pts });
        }

        // Monotone chain with strict turns: collinear interior points drop out.
        let chain = |iter: &mut dyn Iterator<Item = &Rational2>| -> Vec<Rational2> {
            let mut out: Vec<Rational2> = Vec::new();
            for &p in iter {
                while out.len() >= 2
                    && orient(&out[out.len() - 2], &out[out.len() - 1], &p) <= Rat::zero()
                {
                    out.pop();
                }
                out.push(p);
            }
            out
        };
        let mut lower = chain(&mut pts.iter());
        let mut upper = chain(&mut pts.iter().rev());
        lower.pop();
        upper.pop();
        lower.append(&mut upper);

        let vertices = lower;
        debug_assert!(vertices.len() >= 2);
        let tag = if vertices.len() == 2 { PolygonTag::Segment } else { PolygonTag::Polygon };
        // The chain starts at the sorted minimum, which is the lexicographic
        // minimum of the hull.
        debug_assert_eq!(vertices[0], pts[0]);
        Ok(RationalPolygon { tag, vertices })
    }

    pub fn point(p: Rational2) -> RationalPolygon {
        RationalPolygon { tag: PolygonTag::Point, vertices: vec![p] }
    }

    pub fn vertices(&self) -> &[Rational2] {
        &self.vertices
    }

    /// Exact membership test (boundary counts as inside).
    pub fn contains(&self, p: &Rational2) -> bool {
        match self.tag {
            PolygonTag::Point => self.vertices[0] == *p,
            PolygonTag::Segment => {
                let (a, b) = (self.vertices[0], self.vertices[1]);
                if !orient(&a, &b, p).is_zero() {
                    return false;
                }
                let d = b - a;
                let t = (*p - a).dot(&d);
                t >= Rat::zero() && t <= d.dot(&d)
            }
            PolygonTag::Polygon => {
                let n = self.vertices.len();
                (0..n).all(|i| {
                    orient(&self.vertices[i], &self.vertices[(i + 1) % n], p) >= Rat::zero()
                })
            }
        }
    }

    /// Exact squared Euclidean distance from a point to the polygon.
    pub fn dist_sq(&self, p: &Rational2) -> Rat {
        if self.contains(p) {
            return Rat::zero();
        }
        let seg_dist_sq = |a: Rational2, b: Rational2| -> Rat {
            let d = b - a;
            let dd = d.dot(&d);
            if dd.is_zero() {
                let v = *p - a;
                return v.dot(&v);
            }
            let mut t = (*p - a).dot(&d) / dd;
            if t < Rat::zero() {
                t = Rat::zero();
            }
            if t > Rat::from_integer(1) {
                t = Rat::from_integer(1);
            }
            let q = a + d.scale(t);
            let v = *p - q;
            v.dot(&v)
        };
        match self.tag {
            PolygonTag::Point => {
                let v = *p - self.vertices[0];
                v.dot(&v)
            }
            PolygonTag::Segment => seg_dist_sq(self.vertices[0], self.vertices[1]),
            PolygonTag::Polygon => {
                let n = self.vertices.len();
                (0..n)
                    .map(|i| seg_dist_sq(self.vertices[i], self.vertices[(i + 1) % n]))
                    .min()
                    .unwrap()
            }
        }
    }

    /// Maximum of `<w, v>` over the vertices, with the attaining vertex.
    pub fn support(&self, w: &Rational2) -> (Rat, Rational2) {
        let mut best = (w.dot(&self.vertices[0]), self.vertices[0]);
        for v in &self.vertices[1..] {
            let val = w.dot(v);
            if val > best.0 {
                best = (val, *v);
            }
        }
        best
    }

    /// The polygon scaled by a positive integer.
    pub fn scale_int(&self, k: u32) -> RationalPolygon {
        let k = Rat::from_integer(k as i128);
        let verts = self.vertices.iter().map(|v| v.scale(k));
        RationalPolygon::hull(verts).expect("non-empty")
    }

    /// The image under an integer matrix, re-canonicalized (a singular matrix
    /// collapses the polygon to a segment or a point).
    pub fn transform(&self, m: &Mat2) -> RationalPolygon {
        RationalPolygon::hull(self.vertices.iter().map(|v| m.apply_point(v))).expect("non-empty")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: i64, y: i64) -> Rational2 {
        Rational2::from_ints(x, y)
    }

    fn rp(xn: i64, xd: i64, yn: i64, yd: i64) -> Rational2 {
        Rational2::new(Rat::new(xn as i128, xd as i128), Rat::new(yn as i128, yd as i128))
    }

    #[test]
    fn hull_of_identical_points_is_a_point() {
        let h = RationalPolygon::hull(vec![pt(1, 2), pt(1, 2), pt(1, 2)]).unwrap();
        assert_eq!(h.tag, PolygonTag::Point);
        assert_eq!(h.vertices, vec![pt(1, 2)]);
    }

    #[test]
    fn hull_of_collinear_points_is_a_segment() {
        let h = RationalPolygon::hull(vec![pt(2, 2), pt(0, 0), pt(1, 1), pt(3, 3)]).unwrap();
        assert_eq!(h.tag, PolygonTag::Segment);
        assert_eq!(h.vertices, vec![pt(0, 0), pt(3, 3)]);
    }

    #[test]
    fn hull_is_ccw_from_lexicographic_minimum() {
        let h = RationalPolygon::hull(vec![pt(1, 1), pt(0, 0), pt(1, 0), pt(0, 1), rp(1, 2, 1, 2)])
            .unwrap();
        assert_eq!(h.tag, PolygonTag::Polygon);
        assert_eq!(h.vertices, vec![pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)]);
    }

    #[test]
    fn hull_drops_collinear_boundary_points() {
        let h = RationalPolygon::hull(vec![pt(0, 0), pt(2, 0), pt(1, 0), pt(0, 2), pt(0, 1)])
            .unwrap();
        assert_eq!(h.vertices, vec![pt(0, 0), pt(2, 0), pt(0, 2)]);
    }

    #[test]
    fn containment_and_distance() {
        let tri = RationalPolygon::hull(vec![pt(0, 0), pt(1, 0), pt(0, 1)]).unwrap();
        assert!(tri.contains(&rp(1, 4, 1, 4)));
        assert!(tri.contains(&rp(1, 2, 1, 2))); // boundary
        assert!(!tri.contains(&pt(1, 1)));
        assert_eq!(tri.dist_sq(&rp(1, 4, 1, 4)), Rat::zero());
        // (1,1) is at distance 1/sqrt(2) from the hypotenuse.
        assert_eq!(tri.dist_sq(&pt(1, 1)), Rat::new(1, 2));
        // Distance from a vertex region.
        assert_eq!(tri.dist_sq(&pt(-1, -1)), Rat::from_integer(2));

        let seg = RationalPolygon::hull(vec![pt(0, 0), pt(2, 0)]).unwrap();
        assert!(seg.contains(&pt(1, 0)));
        assert!(!seg.contains(&pt(3, 0)));
        assert!(!seg.contains(&pt(1, 1)));
        assert_eq!(seg.dist_sq(&pt(1, 1)), Rat::from_integer(1));
        assert_eq!(seg.dist_sq(&pt(3, 0)), Rat::from_integer(1));

        let point = RationalPolygon::point(rp(1, 2, 1, 2));
        assert!(point.contains(&rp(1, 2, 1, 2)));
        assert_eq!(point.dist_sq(&pt(1, 0)), Rat::new(1, 2));
    }

    #[test]
    fn support_over_vertices() {
        let tri = RationalPolygon::hull(vec![pt(0, 0), pt(1, 0), pt(0, 1)]).unwrap();
        let (val, at) = tri.support(&pt(1, 1));
        assert_eq!(val, Rat::from_integer(1));
        assert!(at == pt(1, 0) || at == pt(0, 1));
        let (val, at) = tri.support(&pt(-1, -1));
        assert_eq!(val, Rat::zero());
        assert_eq!(at, pt(0, 0));
    }

    #[test]
    fn scale_and_transform() {
        let tri = RationalPolygon::hull(vec![pt(0, 0), pt(1, 0), pt(0, 1)]).unwrap();
        let double = tri.scale_int(2);
        assert_eq!(double.vertices, vec![pt(0, 0), pt(2, 0), pt(0, 2)]);
        // A singular matrix collapses the triangle onto a segment.
        let proj = Mat2([[1, 0], [0, 0]]);
        let flat = tri.transform(&proj);
        assert_eq!(flat.tag, PolygonTag::Segment);
        assert_eq!(flat.vertices, vec![pt(0, 0), pt(1, 0)]);
    }

    #[test]
    fn polygon_json_shape() {
        let seg = RationalPolygon::hull(vec![pt(0, 0), pt(1, 0)]).unwrap();
        let json = serde_json::to_string(&seg).unwrap();
        assert_eq!(
            json,
            r#"{"tag":"segment","vertices":[["0/1","0/1"],["1/1","0/1"]]}"#
        );
        let back: RationalPolygon = serde_json::from_str(&json).unwrap();
        assert_eq!(back, seg);
    }
}
