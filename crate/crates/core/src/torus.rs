//! Numerical torus lifts: orbit averaging, the Cauchy displacement bound,
//! rectangle charts, and the symbolic shadowing bound.
//!
//! A lift is evaluated as `F(x) = x + P(frac(x))` with `P` doubly periodic,
//! so periodicity is structural and orbits are tracked in unwrapped
//! coordinates. All outputs here are floating-point estimates with stated
//! tolerances; nothing from this module feeds the exact polygon layer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::IntVec2;
use crate::sft::{Symbol, Word};

/// A point in the plane (or a vector).
pub type Vec2 = (f64, f64);

fn frac(x: f64) -> f64 {
    x - x.floor()
}

fn norm(v: Vec2) -> f64 {
    v.0.hypot(v.1)
}

/// Smoothstep ramp on [0, 1].
fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

/// Quartic bump on [0, 1], peaking at 1 in the middle, zero slope at ends.
fn bump(u: f64) -> f64 {
    if !(0.0..=1.0).contains(&u) {
        return 0.0;
    }
    16.0 * u * u * (1.0 - u) * (1.0 - u)
}

/// The lift families the simulator evaluates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum LiftFamily {
    /// `F(x) = x + v`.
    Translation { v: Vec2 },
    /// `F(x, y) = (x + a sin(2 pi y), y + b sin(2 pi x))`.
    Standard { a: f64, b: f64 },
    /// A horizontal shear by a periodic profile `g` followed by a vertical
    /// shear by a bump `h`: `F(x, y) = (x + g(y), y + h(x + g(y)))`.
    /// `g` is 0 below `g_rise`, ramps to 1 across it, stays 1 up to
    /// `g_fall`, and ramps back down; `h` is `h_amp` times a bump supported
    /// on `h_support`.
    ShearPair {
        g_rise: [f64; 2],
        g_fall: [f64; 2],
        h_amp: f64,
        h_support: [f64; 2],
    },
}

/// A torus lift with metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusLift {
    #[serde(default)]
    pub name: String,
    #[serde(flatten)]
    pub family: LiftFamily,
    /// Optional analytic bound `D >= sup ||F - id||`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_bound: Option<f64>,
}

impl LiftFamily {
    /// The doubly periodic displacement `P(x) = F(x) - x`, evaluated on the
    /// fundamental domain representative of `p`.
    fn displacement(&self, p: Vec2) -> Vec2 {
        let (x, y) = (frac(p.0), frac(p.1));
        match *self {
            LiftFamily::Translation { v } => v,
            LiftFamily::Standard { a, b } => {
                let tau = std::f64::consts::TAU;
                (a * (tau * y).sin(), b * (tau * x).sin())
            }
            LiftFamily::ShearPair { g_rise, g_fall, h_amp, h_support } => {
                let g = shear_profile(y, g_rise, g_fall);
                let xh = frac(x + g);
                let h = if h_support[1] > h_support[0] {
                    h_amp * bump((xh - h_support[0]) / (h_support[1] - h_support[0]))
                } else {
                    0.0
                };
                (g, h)
            }
        }
    }

    /// Analytic `sup ||F - id||` for the built-in families.
    fn analytic_d(&self) -> f64 {
        match *self {
            LiftFamily::Translation { v } => norm(v),
            LiftFamily::Standard { a, b } => a.hypot(b),
            LiftFamily::ShearPair { h_amp, .. } => 1f64.hypot(h_amp),
        }
    }
}

/// `g(y)`: 1-periodic plateau profile used by the shear pair.
fn shear_profile(y: f64, rise: [f64; 2], fall: [f64; 2]) -> f64 {
    let y = frac(y);
    // Evaluate with the fall interval possibly wrapping past 1.
    let in_ramp = |y: f64, a: f64, b: f64| y >= a && y < b;
    if in_ramp(y, rise[0], rise[1]) {
        return smoothstep((y - rise[0]) / (rise[1] - rise[0]));
    }
    if in_ramp(y, fall[0], fall[1]) || in_ramp(y + 1.0, fall[0], fall[1]) {
        let yy = if y >= fall[0] { y } else { y + 1.0 };
        return 1.0 - smoothstep((yy - fall[0]) / (fall[1] - fall[0]));
    }
    if y >= rise[1] && y < fall[0] {
        1.0
    } else {
        0.0
    }
}

impl TorusLift {
    pub fn translation(v: Vec2) -> TorusLift {
        TorusLift {
            name: format!("translation({}, {})", v.0, v.1),
            family: LiftFamily::Translation { v },
            d_bound: None,
        }
    }

    pub fn standard(a: f64, b: f64) -> TorusLift {
        TorusLift {
            name: format!("standard(a={a}, b={b})"),
            family: LiftFamily::Standard { a, b },
            d_bound: None,
        }
    }

    pub fn eval(&self, p: Vec2) -> Vec2 {
        let d = self.family.displacement(p);
        (p.0 + d.0, p.1 + d.1)
    }

    pub fn displacement(&self, p: Vec2) -> Vec2 {
        self.family.displacement(p)
    }

    /// `D >= sup ||F - id||`: the stored bound, else the analytic one for a
    /// built-in family, else a 128x128 grid estimate plus a 10% margin.
    pub fn d_bound(&self) -> f64 {
        if let Some(d) = self.d_bound {
            return d;
        }
        let analytic = self.family.analytic_d();
        if analytic.is_finite() {
            return analytic;
        }
        self.grid_estimate_d()
    }

    fn grid_estimate_d(&self) -> f64 {
        let g = 128;
        let mut max = 0f64;
        for i in 0..g {
            for j in 0..g {
                let p = (i as f64 / g as f64, j as f64 / g as f64);
                max = max.max(norm(self.family.displacement(p)));
            }
        }
        max * 1.1
    }

    /// Max periodicity residual `||F(x+m) - F(x) - m||` over sampled pairs
    /// with `||m||_inf <= 2`. Structurally zero up to floating-point noise.
    pub fn periodicity_residual(&self, samples: usize) -> f64 {
        let mut worst = 0f64;
        for k in 0..samples {
            // Low-discrepancy-ish deterministic sample points.
            let x = frac(0.5 + k as f64 * 0.754877666);
            let y = frac(0.25 + k as f64 * 0.569840296);
            let fx = self.eval((x, y));
            for mx in -2i32..=2 {
                for my in -2i32..=2 {
                    let q = self.eval((x + mx as f64, y + my as f64));
                    let r = norm((q.0 - fx.0 - mx as f64, q.1 - fx.1 - my as f64));
                    worst = worst.max(r);
                }
            }
        }
        worst
    }
}

/// Orbit of a lift in unwrapped coordinates with per-step means.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub start: Vec2,
    /// `F^k(x)` for `k = 0..=n`.
    pub iterates: Vec<Vec2>,
    /// `phi_k = (F^k(x) - x) / k` for `k = 1..=n`.
    pub means: Vec<Vec2>,
}

/// Iterates the lift, keeping unwrapped coordinates.
pub fn orbit(lift: &TorusLift, x: Vec2, n: u32) -> Result<OrbitRecord> {
    let mut iterates = Vec::with_capacity(n as usize + 1);
    let mut means = Vec::with_capacity(n as usize);
    let mut z = x;
    iterates.push(z);
    for k in 1..=n {
        z = lift.eval(z);
        if !z.0.is_finite() || !z.1.is_finite() {
            return Err(Error::NonFinite);
        }
        iterates.push(z);
        means.push(((z.0 - x.0) / k as f64, (z.1 - x.1) / k as f64));
    }
    Ok(OrbitRecord { start: x, iterates, means })
}

/// `phi_n(x) = (F^n(x) - x) / n`.
pub fn phi_n(lift: &TorusLift, x: Vec2, n: u32) -> Result<Vec2> {
    if n == 0 {
        return Err(Error::InvalidArgument("phi_n needs n >= 1".into()));
    }
    Ok(*orbit(lift, x, n)?.means.last().unwrap())
}

/// Outcome of the Cauchy displacement check `||phi_{n+1} - phi_n|| <= K/n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CauchyReport {
    pub k_const: f64,
    pub n_max: u32,
    pub samples: usize,
    /// Max over samples and n of `||phi_{n+1} - phi_n|| * n / K`.
    pub max_ratio: f64,
    pub pass: bool,
}

/// Verifies the Cauchy bound with `K = 2 D` on every sample to `n_max`.
pub fn cauchy_check(lift: &TorusLift, samples: &[Vec2], n_max: u32) -> Result<CauchyReport> {
    let k_const = 2.0 * lift.d_bound();
    let mut max_ratio = 0f64;
    for &x in samples {
        let record = orbit(lift, x, n_max + 1)?;
        for n in 1..=n_max as usize {
            let a = record.means[n - 1];
            let b = record.means[n];
            let diff = norm((b.0 - a.0, b.1 - a.1));
            if k_const > 0.0 {
                max_ratio = max_ratio.max(diff * n as f64 / k_const);
            } else if diff > 0.0 {
                max_ratio = f64::INFINITY;
            }
        }
    }
    Ok(CauchyReport {
        k_const,
        n_max,
        samples: samples.len(),
        max_ratio,
        pass: max_ratio <= 1.0,
    })
}

/// One displacement-average sample of the rotation-set estimate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CloudPoint {
    pub start: Vec2,
    pub phi: Vec2,
}

/// A floating-point rotation-set estimate: never asserted to equal the
/// rotation set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RotationEstimate {
    pub tag: String,
    pub n: u32,
    pub grid: (usize, usize),
    pub points: Vec<CloudPoint>,
    /// Approximate convex hull of the cloud (floating point).
    pub hull: Vec<Vec2>,
}

/// Samples `phi_n` over a grid of the fundamental domain.
pub fn estimate_rotation_set(
    lift: &TorusLift,
    grid: (usize, usize),
    n: u32,
) -> Result<RotationEstimate> {
    if grid.0 < 2 || grid.1 < 2 {
        return Err(Error::InvalidArgument("grid must be at least 2x2".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("need n >= 1".into()));
    }
    let mut points = Vec::with_capacity(grid.0 * grid.1);
    for i in 0..grid.0 {
        for j in 0..grid.1 {
            let x = (i as f64 / grid.0 as f64, j as f64 / grid.1 as f64);
            points.push(CloudPoint { start: x, phi: phi_n(lift, x, n)? });
        }
    }
    let hull = f64_hull(points.iter().map(|p| p.phi).collect());
    Ok(RotationEstimate { tag: "estimate".into(), n, grid, points, hull })
}

/// Monotone chain on floats, for presentation only.
fn f64_hull(mut pts: Vec<Vec2>) -> Vec<Vec2> {
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    fn cross(o: Vec2, a: Vec2, b: Vec2) -> f64 {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    }
    fn build(points: impl Iterator<Item = Vec2>) -> Vec<Vec2> {
        let mut out: Vec<Vec2> = Vec::new();
        for p in points {
            while out.len() >= 2 && cross(out[out.len() - 2], out[out.len() - 1], p) <= 0.0 {
                out.pop();
            }
            out.push(p);
        }
        out.pop();
        out
    }
    let mut lower = build(pts.iter().copied());
    let mut upper = build(pts.iter().rev().copied());
    lower.append(&mut upper);
    lower
}

/// An axis-aligned rectangle `[x0, x1] x [y0, y1]`, serialized as a corner
/// pair `[[x0, y0], [x1, y1]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub min: Vec2,
    pub max: Vec2,
}

impl Serialize for Rect {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        (self.min, self.max).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Rect {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Rect, D::Error> {
        let (min, max) = <(Vec2, Vec2)>::deserialize(de)?;
        Ok(Rect { min, max })
    }
}

impl Rect {
    pub fn new(min: Vec2, max: Vec2) -> Rect {
        Rect { min, max }
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.0 >= self.min.0 && p.0 <= self.max.0 && p.1 >= self.min.1 && p.1 <= self.max.1
    }

    pub fn diameter(&self) -> f64 {
        (self.max.0 - self.min.0).hypot(self.max.1 - self.min.1)
    }

    pub fn widths(&self) -> Vec2 {
        (self.max.0 - self.min.0, self.max.1 - self.min.1)
    }

    fn overlaps(&self, o: &Rect) -> bool {
        self.min.0 <= o.max.0 && o.min.0 <= self.max.0 && self.min.1 <= o.max.1 && o.min.1 <= self.max.1
    }
}

/// One chart rectangle with its assigned integer displacement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartRectangle {
    pub rect: Rect,
    pub s: IntVec2,
}

/// A family of disjoint rectangles inside one trivial domain, with one
/// integer displacement per rectangle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectangleChart {
    pub domain: Rect,
    pub rectangles: Vec<ChartRectangle>,
}

impl RectangleChart {
    /// Max rectangle diameter `d_S`.
    pub fn d_s(&self) -> f64 {
        self.rectangles.iter().map(|r| r.rect.diameter()).fold(0.0, f64::max)
    }

    /// Structural invariants: domain spans under 1 per coordinate, all
    /// rectangles inside the domain and pairwise disjoint.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let w = self.domain.widths();
        if !(w.0 > 0.0 && w.0 < 1.0 && w.1 > 0.0 && w.1 < 1.0) {
            return Err("domain must span less than 1 in each coordinate".into());
        }
        for (i, r) in self.rectangles.iter().enumerate() {
            if !(self.domain.contains(r.rect.min) && self.domain.contains(r.rect.max)) {
                return Err(format!("rectangle {i} is not inside the domain"));
            }
            if !(r.rect.max.0 > r.rect.min.0 && r.rect.max.1 > r.rect.min.1) {
                return Err(format!("rectangle {i} is empty"));
            }
            for (j, o) in self.rectangles.iter().enumerate().skip(i + 1) {
                if r.rect.overlaps(&o.rect) {
                    return Err(format!("rectangles {i} and {j} overlap"));
                }
            }
        }
        Ok(())
    }

    /// The rectangle whose integer translate contains `p`, if any. The
    /// domain is trivial, so the translate is unique per rectangle.
    pub fn locate(&self, p: Vec2) -> Option<(Symbol, Vec2)> {
        for (i, r) in self.rectangles.iter().enumerate() {
            let mx = (r.rect.min.0 - p.0).ceil();
            let my = (r.rect.min.1 - p.1).ceil();
            let q = (p.0 + mx, p.1 + my);
            if mx <= r.rect.max.0 - p.0 && my <= r.rect.max.1 - p.1 && r.rect.contains(q) {
                return Some((i as Symbol, q));
            }
        }
        None
    }
}

/// A single chart-inclusion violation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChartViolation {
    pub rectangle: usize,
    pub point: Vec2,
    pub image: Vec2,
}

/// Outcome of sampling `F(S_i) subset D + s_i` over every rectangle.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChartReport {
    pub samples_per_rect: usize,
    pub checked: usize,
    pub violations: Vec<ChartViolation>,
    pub d_s: f64,
    pub pass: bool,
}

/// Samples boundary and interior points of each rectangle and checks that
/// the image lands in `domain + s_i`.
pub fn verify_rotational_chart(
    lift: &TorusLift,
    chart: &RectangleChart,
    samples_per_rect: usize,
) -> Result<ChartReport> {
    chart.validate().map_err(Error::InvalidArgument)?;
    let g = samples_per_rect.max(2);
    let mut violations = Vec::new();
    let mut checked = 0;
    for (i, r) in chart.rectangles.iter().enumerate() {
        for a in 0..g {
            for b in 0..g {
                // Includes all four edges at a = 0, g-1 etc.
                let p = (
                    r.rect.min.0 + (r.rect.max.0 - r.rect.min.0) * a as f64 / (g - 1) as f64,
                    r.rect.min.1 + (r.rect.max.1 - r.rect.min.1) * b as f64 / (g - 1) as f64,
                );
                let q = lift.eval(p);
                let shifted = (q.0 - r.s.0 as f64, q.1 - r.s.1 as f64);
                checked += 1;
                if !chart.domain.contains(shifted) {
                    violations.push(ChartViolation { rectangle: i, point: p, image: q });
                }
            }
        }
    }
    Ok(ChartReport {
        samples_per_rect: g,
        checked,
        d_s: chart.d_s(),
        pass: violations.is_empty(),
        violations,
    })
}

/// Symbol sequence of visited rectangles until first exit or `n` symbols.
/// Returns the word and the number of in-chart steps (= word length).
pub fn itinerary(
    lift: &TorusLift,
    chart: &RectangleChart,
    x: Vec2,
    n: u32,
) -> Result<(Word, usize)> {
    let mut symbols: Vec<Symbol> = Vec::new();
    let mut z = x;
    if chart.locate(z).is_none() {
        return Err(Error::NotInChart);
    }
    for _ in 0..n {
        match chart.locate(z) {
            Some((sym, _)) => symbols.push(sym),
            None => break,
        }
        z = lift.eval(z);
        if !z.0.is_finite() || !z.1.is_finite() {
            return Err(Error::NonFinite);
        }
    }
    let steps_valid = symbols.len();
    Ok((Word(symbols), steps_valid))
}

/// Outcome of the shadowing residual check along one orbit segment.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DisplacementReport {
    pub steps: u32,
    pub bound: f64,
    pub max_residual: f64,
    pub itinerary: Word,
    pub pass: bool,
}

/// Checks `||F^k(x) - x - sum_{j<k} s_{i_j}|| < 2 d_S` for `k = 1..=n` along
/// an orbit that stays in the chart for `n + 1` symbols.
pub fn check_displacement_bound(
    lift: &TorusLift,
    chart: &RectangleChart,
    x: Vec2,
    n: u32,
) -> Result<DisplacementReport> {
    let (word, steps_valid) = itinerary(lift, chart, x, n + 1)?;
    if steps_valid < n as usize + 1 {
        return Err(Error::ItineraryTooShort { valid: steps_valid, need: n as usize + 1 });
    }
    let record = orbit(lift, x, n)?;
    let bound = 2.0 * chart.d_s();
    let mut max_residual = 0f64;
    let mut acc = IntVec2::ZERO;
    for k in 1..=n as usize {
        acc = acc + chart.rectangles[word.0[k - 1] as usize].s;
        let z = record.iterates[k];
        let r = norm((z.0 - x.0 - acc.0 as f64, z.1 - x.1 - acc.1 as f64));
        max_residual = max_residual.max(r);
    }
    Ok(DisplacementReport {
        steps: n,
        bound,
        max_residual,
        itinerary: word,
        pass: max_residual < bound,
    })
}

/// The shipped demo lift: a plateau shear moving one horizontal band by
/// (1, 0) and fixing another, composed with a vertical bump shear that
/// vanishes on both chart rectangles.
pub fn demo_lift() -> TorusLift {
    TorusLift {
        name: "demo_shear_pair".into(),
        family: LiftFamily::ShearPair {
            g_rise: [0.35, 0.55],
            g_fall: [0.85, 1.05],
            h_amp: 0.25,
            h_support: [0.45, 0.90],
        },
        d_bound: None,
    }
}

/// The chart shipped with the demo lift: the lower rectangle is fixed
/// pointwise (s = 0), the upper one is translated by exactly (1, 0).
pub fn demo_chart() -> RectangleChart {
    RectangleChart {
        domain: Rect::new((0.02, 0.02), (0.98, 0.98)),
        rectangles: vec![
            ChartRectangle {
                rect: Rect::new((0.10, 0.10), (0.30, 0.30)),
                s: IntVec2(0, 0),
            },
            ChartRectangle {
                rect: Rect::new((0.10, 0.60), (0.30, 0.80)),
                s: IntVec2(1, 0),
            },
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-12;

    #[test]
    fn translation_phi_is_exact() {
        let lift = TorusLift::translation((1.0 / 3.0, 0.5));
        for n in [1, 7, 100] {
            let phi = phi_n(&lift, (0.21, 0.77), n).unwrap();
            assert!((phi.0 - 1.0 / 3.0).abs() < EPS && (phi.1 - 0.5).abs() < EPS);
        }
    }

    #[test]
    fn identity_lift_phi_is_zero() {
        let lift = TorusLift::translation((0.0, 0.0));
        let phi = phi_n(&lift, (0.4, 0.6), 50).unwrap();
        assert_eq!(phi, (0.0, 0.0));
    }

    #[test]
    fn standard_family_fixes_origin() {
        let lift = TorusLift::standard(0.25, 0.25);
        let phi = phi_n(&lift, (0.0, 0.0), 1).unwrap();
        assert!(norm(phi) < EPS);
    }

    #[test]
    fn periodicity_is_structural() {
        for lift in [
            TorusLift::translation((0.3, -0.7)),
            TorusLift::standard(0.25, 0.25),
            demo_lift(),
        ] {
            assert!(lift.periodicity_residual(64) <= EPS);
        }
    }

    #[test]
    fn unwrapped_phi_matches_step_sums() {
        // Accumulating per-step displacements must agree with the endpoints.
        let lift = TorusLift::standard(0.25, 0.25);
        let x = (0.123, 0.456);
        let record = orbit(&lift, x, 300).unwrap();
        let mut acc = (0.0, 0.0);
        let mut z = x;
        for k in 1..=300usize {
            let d = lift.displacement(z);
            acc = (acc.0 + d.0, acc.1 + d.1);
            z = lift.eval(z);
            let phi = record.means[k - 1];
            let direct = (acc.0 / k as f64, acc.1 / k as f64);
            assert!(norm((phi.0 - direct.0, phi.1 - direct.1)) < 1e-9);
        }
    }

    #[test]
    fn cauchy_bound_holds_on_shipped_lifts() {
        let grid: Vec<Vec2> = (0..8)
            .flat_map(|i| (0..8).map(move |j| (i as f64 / 8.0, j as f64 / 8.0)))
            .collect();
        for lift in [
            TorusLift::translation((0.3, 0.1)),
            TorusLift::standard(0.25, 0.25),
            demo_lift(),
        ] {
            let report = cauchy_check(&lift, &grid, 200).unwrap();
            assert!(report.pass, "{}: max ratio {}", lift.name, report.max_ratio);
        }
    }

    #[test]
    fn translation_cauchy_differences_vanish() {
        // Exactly zero in real arithmetic; rounding leaves ~1e-15.
        let lift = TorusLift::translation((0.3, 0.1));
        let report = cauchy_check(&lift, &[(0.5, 0.5)], 50).unwrap();
        assert!(report.max_ratio < 1e-12);
    }

    #[test]
    fn rotation_estimate_of_translation_is_a_point() {
        let lift = TorusLift::translation((1.0 / 3.0, 0.5));
        let est = estimate_rotation_set(&lift, (8, 8), 100).unwrap();
        for p in &est.points {
            assert!((p.phi.0 - 1.0 / 3.0).abs() < EPS && (p.phi.1 - 0.5).abs() < EPS);
        }
        // The hull collapses to the rotation vector up to rounding noise.
        for h in &est.hull {
            assert!((h.0 - 1.0 / 3.0).abs() < EPS && (h.1 - 0.5).abs() < EPS);
        }
        assert_eq!(est.tag, "estimate");
    }

    #[test]
    fn standard_family_cloud_regression() {
        // Deterministic regression fixture: the a = b = 1/4 sine shears
        // spread displacement averages over a small but genuinely
        // two-dimensional cloud at n = 1000.
        let lift = TorusLift::standard(0.25, 0.25);
        let est = estimate_rotation_set(&lift, (8, 8), 1000).unwrap();
        let pts: Vec<Vec2> = est.points.iter().map(|p| p.phi).collect();
        let mut diameter = 0f64;
        for a in &pts {
            for b in &pts {
                diameter = diameter.max(norm((a.0 - b.0, a.1 - b.1)));
            }
        }
        assert!(diameter > 0.0);
        assert!((diameter - 0.02206573).abs() < 1e-6, "diameter {diameter}");
        assert!(est.hull.len() >= 3);
    }

    #[test]
    fn identity_cauchy_is_degenerate_but_passes() {
        // D = 0 forces K = 0; the differences are exactly zero.
        let lift = TorusLift::translation((0.0, 0.0));
        let report = cauchy_check(&lift, &[(0.3, 0.9)], 20).unwrap();
        assert_eq!(report.k_const, 0.0);
        assert_eq!(report.max_ratio, 0.0);
        assert!(report.pass);
    }

    #[test]
    fn itinerary_of_immediately_exiting_point() {
        // In the chart at step 0, outside from step 1 on.
        let lift = TorusLift::translation((0.5, 0.0));
        let chart = demo_chart();
        let (w, valid) = itinerary(&lift, &chart, (0.2, 0.2), 10).unwrap();
        assert_eq!(valid, 1);
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn grid_preconditions() {
        let lift = TorusLift::translation((0.0, 0.0));
        assert!(estimate_rotation_set(&lift, (1, 8), 5).is_err());
        assert!(matches!(
            phi_n(&lift, (0.0, 0.0), 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn demo_chart_is_rotational_for_demo_lift() {
        let report = verify_rotational_chart(&demo_lift(), &demo_chart(), 9).unwrap();
        assert!(report.pass, "violations: {:?}", report.violations);
        assert!((report.d_s - (0.2f64).hypot(0.2)).abs() < EPS);
    }

    #[test]
    fn integer_translation_chart_passes_and_wrong_s_fails() {
        let chart = demo_chart();
        let lift = TorusLift::translation((1.0, 0.0));
        // Chart displacements (0,0)/(1,0) do not match a global (1,0) shift
        // for rectangle 0.
        let report = verify_rotational_chart(&lift, &chart, 5).unwrap();
        assert!(!report.pass);
        // With both displacements set to (1,0) the chart passes.
        let mut ok = chart.clone();
        ok.rectangles[0].s = IntVec2(1, 0);
        let report = verify_rotational_chart(&lift, &ok, 5).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn chart_with_offside_image_fails() {
        // Fractional shift (1/2, 0) with s = 0 pushes a right-edge rectangle
        // out of the domain.
        let chart = RectangleChart {
            domain: Rect::new((0.02, 0.02), (0.98, 0.98)),
            rectangles: vec![ChartRectangle {
                rect: Rect::new((0.70, 0.10), (0.90, 0.30)),
                s: IntVec2(0, 0),
            }],
        };
        let lift = TorusLift::translation((0.5, 0.0));
        let report = verify_rotational_chart(&lift, &chart, 5).unwrap();
        assert!(!report.pass);
    }

    #[test]
    fn chart_invariants_are_checked() {
        let mut chart = demo_chart();
        chart.rectangles[1].rect = chart.rectangles[0].rect;
        assert!(matches!(
            verify_rotational_chart(&demo_lift(), &chart, 3),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn demo_itineraries_are_constant() {
        let lift = demo_lift();
        let chart = demo_chart();
        let (w, valid) = itinerary(&lift, &chart, (0.2, 0.2), 40).unwrap();
        assert_eq!(valid, 40);
        assert!(w.0.iter().all(|&s| s == 0));
        let (w, valid) = itinerary(&lift, &chart, (0.2, 0.7), 40).unwrap();
        assert_eq!(valid, 40);
        assert!(w.0.iter().all(|&s| s == 1));
        assert!(matches!(
            itinerary(&lift, &chart, (0.5, 0.5), 10),
            Err(Error::NotInChart)
        ));
    }

    #[test]
    fn itinerary_locates_modulo_integers() {
        let lift = TorusLift::translation((1.0, 0.0));
        let chart = RectangleChart {
            domain: Rect::new((0.02, 0.02), (0.98, 0.98)),
            rectangles: vec![ChartRectangle {
                rect: Rect::new((0.10, 0.10), (0.30, 0.30)),
                s: IntVec2(1, 0),
            }],
        };
        // The orbit runs off to the right but projects back into the
        // rectangle at every step.
        let (w, valid) = itinerary(&lift, &chart, (5.2, 0.2), 25).unwrap();
        assert_eq!(valid, 25);
        assert!(w.0.iter().all(|&s| s == 0));
    }

    #[test]
    fn displacement_bound_on_demo_orbits() {
        let lift = demo_lift();
        let chart = demo_chart();
        for x in [(0.2, 0.2), (0.15, 0.75), (0.29, 0.61)] {
            let report = check_displacement_bound(&lift, &chart, x, 50).unwrap();
            assert!(report.pass);
            // The demo orbits track their symbolic displacement exactly.
            assert!(report.max_residual < 1e-9, "residual {}", report.max_residual);
        }
    }

    #[test]
    fn displacement_bound_needs_full_itinerary() {
        let lift = TorusLift::translation((0.5, 0.0));
        let chart = demo_chart();
        // (0.2, 0.2) exits the chart after one step under a (1/2, 0) shift.
        assert!(matches!(
            check_displacement_bound(&lift, &chart, (0.2, 0.2), 10),
            Err(Error::ItineraryTooShort { .. })
        ));
    }

    #[test]
    fn lift_json_round_trip() {
        let lift = demo_lift();
        let json = serde_json::to_string(&lift).unwrap();
        assert!(json.contains("\"family\":\"shear_pair\""));
        let back: TorusLift = serde_json::from_str(&json).unwrap();
        assert_eq!(back, lift);

        let t = TorusLift::translation((1.0 / 3.0, 0.5));
        let json = serde_json::to_string(&t).unwrap();
        let back: TorusLift = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn chart_json_round_trip() {
        let chart = demo_chart();
        let json = serde_json::to_string(&chart).unwrap();
        let back: RectangleChart = serde_json::from_str(&json).unwrap();
        assert_eq!(back, chart);
    }
}
