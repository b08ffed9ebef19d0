//! The hierarchical parity sequence and its finite-horizon statistics.
//!
//! Given `delta`, let `t` be the least positive integer with `2^-t < delta`
//! and let the schedule be `a_0 = 1`, `a_{n+1} = 2^(t+n) a_n`. Every integer
//! `i` gets a level: `level(i)` is the least `n` with `|i| <= a_0` (n = 0)
//! or `|i| mod a_{n+1} <= a_n` (n >= 1), and `xi(i)` is the level parity.
//! Partial means `S_n = (sum_{i<n} xi(i)) / n` are computed exactly; the
//! checkpoint comparisons, the pattern-recurrence window scan, and the
//! two-symbol rotation-point statistics all report exact rationals.
//!
//! The checkpoint inequalities hold at n = 2 and 3 but provably fail from
//! n = 4 on (the level-1 pattern recurs with positive density), and the
//! window constant `a_n0 + a_{n0+1}` is far too small for the observed
//! pattern gaps; the reports state the exact values either way.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{format_rat, Rat, Rational2};
use crate::sft::SftSystem;

/// Default cap on direct summation length.
pub const DEFAULT_SUM_CAP: u64 = 10_000_000;

/// Serde adapter: `BigUint` as a decimal string.
mod biguint_string {
    use num_bigint::BigUint;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> std::result::Result<BigUint, D::Error> {
        let s = String::deserialize(de)?;
        s.parse::<BigUint>().map_err(D::Error::custom)
    }
}

/// Parameters of the sequence: `delta`, the exponent `t`, and the schedule
/// materialized up to a configured depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApParams {
    delta: Rat,
    t: u32,
    /// `a_0 ..= a_depth`, strictly increasing, `a_{n+1}/a_n = 2^(t+n)`.
    schedule: Vec<BigUint>,
    /// Same values where they fit in a machine word (always a prefix).
    schedule_u64: Vec<Option<u64>>,
}

/// Builds parameters: `t` is the least positive integer with `2^-t < delta`.
pub fn ap_params(delta: Rat, depth: usize) -> Result<ApParams> {
    if delta <= Rat::zero() || delta > Rat::one() {
        return Err(Error::BadDelta(format_rat(&delta)));
    }
    if depth < 2 {
        return Err(Error::InvalidArgument("schedule depth must be >= 2".into()));
    }
    let mut t = 1u32;
    while !(Rat::new(1, 1 << t) < delta) {
        t += 1;
        if t > 100 {
            return Err(Error::BadDelta(format_rat(&delta)));
        }
    }
    let mut schedule = vec![BigUint::one()];
    for n in 0..depth {
        let next = &schedule[n] << (t as usize + n);
        schedule.push(next);
    }
    let schedule_u64 = schedule.iter().map(BigUint::to_u64).collect();
    Ok(ApParams { delta, t, schedule, schedule_u64 })
}

impl ApParams {
    pub fn delta(&self) -> Rat {
        self.delta
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn depth(&self) -> usize {
        self.schedule.len() - 1
    }

    pub fn schedule(&self) -> &[BigUint] {
        &self.schedule
    }

    /// `a_n` as a machine word, when it fits.
    pub fn a_u64(&self, n: usize) -> Option<u64> {
        self.schedule_u64.get(n).copied().flatten()
    }

    fn check_depth_u64(&self, i: u64) -> Result<()> {
        if BigUint::from(i) > *self.schedule.last().unwrap() {
            return Err(Error::DepthExceeded { index: i.to_string(), depth: self.depth() });
        }
        Ok(())
    }

    /// Level of `|i|` for machine-word magnitudes: the least `n` whose
    /// membership predicate holds. Total on `|i| <= a_depth`.
    pub fn level(&self, i: i64) -> Result<u32> {
        let m = i.unsigned_abs();
        self.check_depth_u64(m)?;
        Ok(self.level_u64_unchecked(m))
    }

    fn level_u64_unchecked(&self, m: u64) -> u32 {
        if m <= 1 {
            return 0;
        }
        let depth = self.depth();
        for n in 1..depth {
            match self.schedule_u64[n + 1] {
                Some(a_next) => {
                    let r = m % a_next;
                    let below = match self.schedule_u64[n] {
                        Some(a_n) => r <= a_n,
                        None => true, // a_n exceeds u64, so r <= a_n trivially
                    };
                    if below {
                        return n as u32;
                    }
                }
                None => {
                    // a_{n+1} > u64::MAX >= m, so m mod a_{n+1} = m.
                    let below = self.schedule_u64[n].is_none_or(|a_n| m <= a_n);
                    if below {
                        return n as u32;
                    }
                }
            }
        }
        // m <= a_depth and a_{depth+1} > a_depth, so the predicate holds here.
        depth as u32
    }

    /// Level for arbitrary-precision magnitudes.
    pub fn level_magnitude(&self, m: &BigUint) -> Result<u32> {
        if m > self.schedule.last().unwrap() {
            return Err(Error::DepthExceeded { index: m.to_string(), depth: self.depth() });
        }
        if let Some(m64) = m.to_u64() {
            return Ok(self.level_u64_unchecked(m64));
        }
        if *m <= self.schedule[0] {
            return Ok(0);
        }
        let depth = self.depth();
        for n in 1..depth {
            if m.mod_floor(&self.schedule[n + 1]) <= self.schedule[n] {
                return Ok(n as u32);
            }
        }
        Ok(depth as u32)
    }

    /// The sequence bit at `i`: the parity of the level. Symmetric in `i`.
    pub fn xi(&self, i: i64) -> Result<u8> {
        Ok((self.level(i)? & 1) as u8)
    }

    fn xi_u64_unchecked(&self, m: u64) -> u8 {
        (self.level_u64_unchecked(m) & 1) as u8
    }

    /// Exact mean of `xi(0..n-1)` by direct summation.
    pub fn partial_mean(&self, n: u64, cap: u64) -> Result<Rat> {
        if n == 0 {
            return Err(Error::InvalidArgument("partial mean needs n >= 1".into()));
        }
        if n > cap {
            return Err(Error::CapExceeded { need: n as u128, cap });
        }
        self.check_depth_u64(n - 1)?;
        let mut ones: u64 = 0;
        for i in 0..n {
            ones += self.xi_u64_unchecked(i) as u64;
        }
        Ok(Rat::new(ones as i128, n as i128))
    }

    /// One summation pass that records `S_{a_n}` for all `n <= n_max`.
    fn checkpoint_means(&self, n_max: usize, cap: u64) -> Result<Vec<Rat>> {
        let targets: Vec<u64> = (0..=n_max)
            .map(|n| {
                self.a_u64(n).ok_or(Error::CapExceeded {
                    need: u128::MAX,
                    cap,
                })
            })
            .collect::<Result<_>>()?;
        let last = *targets.last().unwrap();
        if last > cap {
            return Err(Error::CapExceeded { need: last as u128, cap });
        }
        let mut means = Vec::with_capacity(targets.len());
        let mut ones: u64 = 0;
        let mut next = 0usize;
        for i in 0..last {
            while next < targets.len() && targets[next] == i {
                means.push(Rat::new(ones as i128, i as i128));
                next += 1;
            }
            ones += self.xi_u64_unchecked(i) as u64;
        }
        while next < targets.len() {
            means.push(Rat::new(ones as i128, last as i128));
            next += 1;
        }
        Ok(means)
    }

    /// Exact checkpoint comparisons: even `n >= 2` checks
    /// `S_{a_n} < a_{n-1}/a_n < delta`; odd `n` checks
    /// `S_{a_n} > 1 - a_{n-1}/a_n > 1 - delta`; `n = 0` checks only
    /// `S_{a_0} < delta`.
    pub fn checkpoint_bounds(&self, n_max: usize, cap: u64) -> Result<Vec<CheckpointRow>> {
        if n_max > self.depth() {
            return Err(Error::DepthExceeded {
                index: format!("a_{n_max}"),
                depth: self.depth(),
            });
        }
        let means = self.checkpoint_means(n_max, cap)?;
        let mut rows = Vec::with_capacity(n_max + 1);
        for (n, &s) in means.iter().enumerate() {
            let row = if n == 0 {
                let s_ok = s < self.delta;
                CheckpointRow {
                    n,
                    a_n: self.schedule[0].clone(),
                    s,
                    bound: None,
                    s_ok,
                    delta_ok: true,
                    pass: s_ok,
                }
            } else {
                let bound = Rat::new(
                    self.a_u64(n - 1).unwrap() as i128,
                    self.a_u64(n).unwrap() as i128,
                );
                let delta_ok = bound < self.delta;
                let s_ok = if n % 2 == 0 { s < bound } else { s > Rat::one() - bound };
                CheckpointRow {
                    n,
                    a_n: self.schedule[n].clone(),
                    s,
                    bound: Some(bound),
                    s_ok,
                    delta_ok,
                    pass: s_ok && delta_ok,
                }
            };
            rows.push(row);
        }
        Ok(rows)
    }

    /// Scans `[0, scan_len)` and checks that every window of length
    /// `a_n0 + a_{n0+1}` contains the pattern `xi[0 ..= a_n0]`.
    pub fn recurrence_window_check(
        &self,
        n0: usize,
        scan_len: u64,
        cap: u64,
    ) -> Result<WindowReport> {
        if n0 + 1 > self.depth() {
            return Err(Error::DepthExceeded {
                index: format!("a_{}", n0 + 1),
                depth: self.depth(),
            });
        }
        let a_n0 = self
            .a_u64(n0)
            .ok_or(Error::CapExceeded { need: u128::MAX, cap })?;
        let a_next = self
            .a_u64(n0 + 1)
            .ok_or(Error::CapExceeded { need: u128::MAX, cap })?;
        let window = a_n0 + a_next;
        if scan_len < 2 * window {
            return Err(Error::BadWindow(format!(
                "scan length {scan_len} is below twice the window {window}"
            )));
        }
        if scan_len > cap {
            return Err(Error::CapExceeded { need: scan_len as u128, cap });
        }
        self.check_depth_u64(scan_len - 1)?;

        let bits: Vec<u8> = (0..scan_len).map(|i| self.xi_u64_unchecked(i)).collect();
        let pattern = bits[..=(a_n0 as usize)].to_vec();
        let occurrences = occurrence_positions(&bits, &pattern);
        let first_failing_window =
            first_window_missing_pattern(&bits, &pattern, window as usize);
        let max_gap = occurrences
            .windows(2)
            .map(|p| (p[1] - p[0]) as u64)
            .max();
        Ok(WindowReport {
            n0,
            pattern_len: pattern.len() as u64,
            window_len: window,
            scan_len,
            windows_checked: scan_len - window + 1,
            occurrences: occurrences.len() as u64,
            max_gap,
            first_failing_window: first_failing_window.map(|p| p as u64),
            pass: first_failing_window.is_none(),
        })
    }
}

/// Start positions of `pattern` inside `bits`.
pub fn occurrence_positions(bits: &[u8], pattern: &[u8]) -> Vec<usize> {
    if pattern.is_empty() || pattern.len() > bits.len() {
        return Vec::new();
    }
    (0..=bits.len() - pattern.len())
        .filter(|&p| &bits[p..p + pattern.len()] == pattern)
        .collect()
}

/// First start of a window of length `window` (fully inside `bits`) that
/// does not contain `pattern` as a contiguous sub-word; `None` if all do.
pub fn first_window_missing_pattern(
    bits: &[u8],
    pattern: &[u8],
    window: usize,
) -> Option<usize> {
    if window > bits.len() || pattern.len() > window {
        return Some(0);
    }
    let occ = occurrence_positions(bits, pattern);
    let mut oi = 0usize;
    for p in 0..=bits.len() - window {
        while oi < occ.len() && occ[oi] < p {
            oi += 1;
        }
        let covered = oi < occ.len() && occ[oi] <= p + window - pattern.len();
        if !covered {
            return Some(p);
        }
    }
    None
}

/// One row of the checkpoint report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckpointRow {
    pub n: usize,
    #[serde(with = "biguint_string")]
    pub a_n: BigUint,
    #[serde(rename = "S", with = "crate::exact::rat_string")]
    pub s: Rat,
    #[serde(with = "crate::exact::opt_rat_string")]
    pub bound: Option<Rat>,
    pub s_ok: bool,
    pub delta_ok: bool,
    pub pass: bool,
}

/// Outcome of the pattern-recurrence window scan.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WindowReport {
    pub n0: usize,
    pub pattern_len: u64,
    pub window_len: u64,
    pub scan_len: u64,
    pub windows_checked: u64,
    pub occurrences: u64,
    pub max_gap: Option<u64>,
    pub first_failing_window: Option<u64>,
    pub pass: bool,
}

/// Rotation statistics of the sequence pushed through a two-symbol full
/// shift: the emitted points are `p_n = (1 - S_n) s_0 + S_n s_1`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RotationPointsReport {
    pub horizon: u64,
    pub stride: u64,
    pub samples: u64,
    #[serde(rename = "min", with = "crate::exact::rat_string")]
    pub min_s: Rat,
    #[serde(rename = "max", with = "crate::exact::rat_string")]
    pub max_s: Rat,
    pub p_min: Rational2,
    pub p_max: Rational2,
    /// Rational lower bound of `2 / sqrt(horizon)`; density certified at
    /// this epsilon implies density at `2 / sqrt(horizon)`.
    #[serde(with = "crate::exact::rat_string")]
    pub epsilon: Rat,
    #[serde(with = "crate::exact::rat_string")]
    pub max_gap: Rat,
    pub dense: bool,
    /// The sampled `(n, S_n)` values, not serialized.
    #[serde(skip)]
    pub s_values: Vec<(u64, Rat)>,
}

/// Largest `p/10^6` with `(p/10^6)^2 <= 4/horizon`, as an exact rational.
fn epsilon_lower_bound(horizon: u64) -> Rat {
    const SCALE: u128 = 1_000_000;
    let target = 4 * SCALE * SCALE; // p^2 * horizon <= 4 * 10^12
    let mut p = ((target / horizon as u128) as f64).sqrt() as u128;
    while (p + 1) * (p + 1) * horizon as u128 <= target {
        p += 1;
    }
    while p > 0 && p * p * horizon as u128 > target {
        p -= 1;
    }
    Rat::new(p as i128, SCALE as i128)
}

/// Tracks the rotation points of the sequence through a two-symbol full
/// shift (`tau(0) = tau(1) = {0, 1}`) and checks epsilon-density of the
/// sampled means in `[min, max]`.
pub fn symbolic_rotation_points(
    params: &ApParams,
    sys: &SftSystem,
    horizon: u64,
    stride: u64,
    cap: u64,
) -> Result<RotationPointsReport> {
    let full2 = sys.alphabet_size == 2 && {
        let norm = |s: &[u16]| {
            let mut v = s.to_vec();
            v.sort_unstable();
            v.dedup();
            v
        };
        sys.transitions.len() == 2
            && norm(&sys.transitions[0]) == vec![0, 1]
            && norm(&sys.transitions[1]) == vec![0, 1]
            && sys.displacements.len() == 2
    };
    if !full2 {
        return Err(Error::BadSystem);
    }
    if horizon == 0 || stride == 0 {
        return Err(Error::InvalidArgument("horizon and stride must be >= 1".into()));
    }
    if horizon > cap {
        return Err(Error::CapExceeded { need: horizon as u128, cap });
    }
    params.check_depth_u64(horizon - 1)?;

    let s0: Rational2 = sys.displacement(0).into();
    let s1: Rational2 = sys.displacement(1).into();
    let mut ones: u64 = 0;
    let mut s_values: Vec<(u64, Rat)> = Vec::new();
    for i in 0..horizon {
        ones += params.xi_u64_unchecked(i) as u64;
        let n = i + 1;
        if n % stride == 0 {
            s_values.push((n, Rat::new(ones as i128, n as i128)));
        }
    }
    if s_values.is_empty() {
        return Err(Error::InvalidArgument("stride larger than horizon".into()));
    }

    let min_s = s_values.iter().map(|&(_, s)| s).min().unwrap();
    let max_s = s_values.iter().map(|&(_, s)| s).max().unwrap();
    let blend = |s: Rat| s0.scale(Rat::one() - s) + s1.scale(s);

    let mut sorted: Vec<Rat> = s_values.iter().map(|&(_, s)| s).collect();
    sorted.sort_unstable();
    sorted.dedup();
    let max_gap = sorted
        .windows(2)
        .map(|p| p[1] - p[0])
        .max()
        .unwrap_or_else(Rat::zero);
    let epsilon = epsilon_lower_bound(horizon);
    let dense = max_gap <= Rat::from_integer(2) * epsilon;

    Ok(RotationPointsReport {
        horizon,
        stride,
        samples: s_values.len() as u64,
        min_s,
        max_s,
        p_min: blend(min_s),
        p_max: blend(max_s),
        epsilon,
        max_gap,
        dense,
        s_values,
    })
}
