//! Exact arithmetic kernel: integer lattice vectors, 2x2 integer matrices,
//! and rational plane points kept in lowest terms.
//!
//! Everything downstream of the symbolic layer (cycle means, convex hulls,
//! support values) is computed here with no floating point. `Rat` is a
//! reduced `i128` ratio; the magnitudes produced by cycle means and support
//! queries are tiny compared to the i128 range.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Reduced rational with positive denominator (normalized by `num_rational`).
pub type Rat = Ratio<i128>;

/// Render as `p/q` (always with the denominator, matching the wire format).
pub fn format_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse `p/q` or a bare integer `p`.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i128 = p.trim().parse().map_err(|e| format!("bad numerator {p:?}: {e}"))?;
        let q: i128 = q.trim().parse().map_err(|e| format!("bad denominator {q:?}: {e}"))?;
        if q == 0 {
            return Err(format!("zero denominator in {s:?}"));
        }
        Ok(Rat::new(p, q))
    } else {
        let p: i128 = s.parse().map_err(|e| format!("bad rational {s:?}: {e}"))?;
        Ok(Rat::from_integer(p))
    }
}

/// Serde adapter: `Rat` as a `"p/q"` string.
pub mod rat_string {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rat, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&format_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(de)?;
        parse_rat(&s).map_err(D::Error::custom)
    }
}

/// Serde adapter: `Option<Rat>` as an optional `"p/q"` string.
pub mod opt_rat_string {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<Rat>, ser: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => ser.serialize_some(&format_rat(r)),
            None => ser.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Option<Rat>, D::Error> {
        let s = Option::<String>::deserialize(de)?;
        s.map(|s| parse_rat(&s).map_err(D::Error::custom)).transpose()
    }
}

/// An integer lattice vector (a displacement in Z^2).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntVec2(pub i64, pub i64);

impl IntVec2 {
    pub const ZERO: IntVec2 = IntVec2(0, 0);

    pub fn norm_sq(&self) -> i128 {
        (self.0 as i128) * (self.0 as i128) + (self.1 as i128) * (self.1 as i128)
    }
}

impl Add for IntVec2 {
    type Output = IntVec2;
    fn add(self, o: IntVec2) -> IntVec2 {
        IntVec2(self.0 + o.0, self.1 + o.1)
    }
}

impl Sub for IntVec2 {
    type Output = IntVec2;
    fn sub(self, o: IntVec2) -> IntVec2 {
        IntVec2(self.0 - o.0, self.1 - o.1)
    }
}

impl Neg for IntVec2 {
    type Output = IntVec2;
    fn neg(self) -> IntVec2 {
        IntVec2(-self.0, -self.1)
    }
}

impl Mul<i64> for IntVec2 {
    type Output = IntVec2;
    fn mul(self, k: i64) -> IntVec2 {
        IntVec2(self.0 * k, self.1 * k)
    }
}

impl fmt::Display for IntVec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0, self.1)
    }
}

/// A 2x2 integer matrix, row major. Invertibility is not required: the
/// displacement pushforward is well defined for any integer matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mat2(pub [[i64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Mat2 {
        Mat2([[1, 0], [0, 1]])
    }

    pub fn apply(&self, v: IntVec2) -> IntVec2 {
        IntVec2(
            self.0[0][0] * v.0 + self.0[0][1] * v.1,
            self.0[1][0] * v.0 + self.0[1][1] * v.1,
        )
    }

    pub fn apply_point(&self, p: &Rational2) -> Rational2 {
        let m = |k: i64| Rat::from_integer(k as i128);
        Rational2 {
            x: m(self.0[0][0]) * p.x + m(self.0[0][1]) * p.y,
            y: m(self.0[1][0]) * p.x + m(self.0[1][1]) * p.y,
        }
    }
}

/// An exact rational plane point. Ordering is lexicographic (x, then y),
/// which is also the canonical hull starting vertex order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational2 {
    pub x: Rat,
    pub y: Rat,
}

impl Rational2 {
    pub fn new(x: Rat, y: Rat) -> Rational2 {
        Rational2 { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Rational2 {
        Rational2 {
            x: Rat::from_integer(x as i128),
            y: Rat::from_integer(y as i128),
        }
    }

    /// The reduced mean `v / n` of an integer displacement over `n` steps.
    pub fn mean_of(v: IntVec2, n: u64) -> Rational2 {
        debug_assert!(n > 0);
        Rational2 {
            x: Rat::new(v.0 as i128, n as i128),
            y: Rat::new(v.1 as i128, n as i128),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn to_f64(&self) -> (f64, f64) {
        let f = |r: &Rat| *r.numer() as f64 / *r.denom() as f64;
        (f(&self.x), f(&self.y))
    }

    pub fn dot(&self, o: &Rational2) -> Rat {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product `self x o`.
    pub fn cross(&self, o: &Rational2) -> Rat {
        self.x * o.y - self.y * o.x
    }

    pub fn scale(&self, k: Rat) -> Rational2 {
        Rational2 { x: self.x * k, y: self.y * k }
    }

    pub fn norm_sq(&self) -> Rat {
        self.x * self.x + self.y * self.y
    }
}

impl Add for Rational2 {
    type Output = Rational2;
    fn add(self, o: Rational2) -> Rational2 {
        Rational2 { x: self.x + o.x, y: self.y + o.y }
    }
}

impl Sub for Rational2 {
    type Output = Rational2;
    fn sub(self, o: Rational2) -> Rational2 {
        Rational2 { x: self.x - o.x, y: self.y - o.y }
    }
}

impl From<IntVec2> for Rational2 {
    fn from(v: IntVec2) -> Rational2 {
        Rational2::from_ints(v.0, v.1)
    }
}

impl fmt::Debug for Rational2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", format_rat(&self.x), format_rat(&self.y))
    }
}

impl fmt::Display for Rational2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", format_rat(&self.x), format_rat(&self.y))
    }
}

impl Serialize for Rational2 {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        (format_rat(&self.x), format_rat(&self.y)).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Rational2 {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Rational2, D::Error> {
        let (x, y) = <(String, String)>::deserialize(de)?;
        Ok(Rational2 {
            x: parse_rat(&x).map_err(D::Error::custom)?,
            y: parse_rat(&y).map_err(D::Error::custom)?,
        })
    }
}

/// Orientation of the triple (o, a, b): positive for a counterclockwise turn,
/// zero for collinear. Exact.
pub fn orient(o: &Rational2, a: &Rational2, b: &Rational2) -> Rat {
    (*a - *o).cross(&(*b - *o))
}
