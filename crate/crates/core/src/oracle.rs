//! Brute-force enumeration oracles for cross-validating the rotation
//! polygon.
//!
//! [`oracle_means`] enumerates the displacement means of every periodic word
//! (closed walk) of length exactly `n`; [`oracle_hull`] is the exact hull of
//! their union over `n <= n_max`. These share nothing with the simple-cycle
//! route in [`crate::polygon`] and converge to the same polygon.
//! [`word_means`] enumerates plain admissible words instead; their means may
//! leave the polygon by up to `2 A s_max / n`.
//!
//! Enumeration is layered exact reachability over `(symbol, psi)` states, so
//! shared prefixes are walked once; the result set is identical to per-word
//! recursion (the unit tests check this against a naive enumerator). Calls
//! are capped by the word count `A^n`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::exact::Rational2;
use crate::hull::RationalPolygon;
use crate::sft::SftSystem;

/// Default per-call word cap.
pub const DEFAULT_WORD_CAP: u64 = 20_000_000;

/// `A^n`, saturating.
pub fn word_count(alphabet: usize, n: u32) -> u128 {
    (alphabet as u128).saturating_pow(n)
}

fn check_cap(sys: &SftSystem, n: u32, cap: u64) -> Result<()> {
    let need = word_count(sys.alphabet_size, n);
    if need > cap as u128 {
        return Err(Error::CapExceeded { need, cap });
    }
    Ok(())
}

/// Dense layer of reachable `(symbol, psi)` states.
struct Layer {
    a: usize,
    min: (i64, i64),
    width: usize,
    height: usize,
    cells: Vec<bool>,
}

impl Layer {
    fn new(sys: &SftSystem, n: u32) -> Layer {
        let n = n as i64;
        let xs: Vec<i64> = sys.displacements.iter().map(|s| s.0).collect();
        let ys: Vec<i64> = sys.displacements.iter().map(|s| s.1).collect();
        let min = (
            n * xs.iter().copied().min().unwrap_or(0).min(0),
            n * ys.iter().copied().min().unwrap_or(0).min(0),
        );
        let max = (
            n * xs.iter().copied().max().unwrap_or(0).max(0),
            n * ys.iter().copied().max().unwrap_or(0).max(0),
        );
        let width = (max.0 - min.0 + 1) as usize;
        let height = (max.1 - min.1 + 1) as usize;
        Layer {
            a: sys.alphabet_size,
            min,
            width,
            height,
            cells: vec![false; sys.alphabet_size * width * height],
        }
    }

    fn blank(&self) -> Layer {
        Layer {
            a: self.a,
            min: self.min,
            width: self.width,
            height: self.height,
            cells: vec![false; self.cells.len()],
        }
    }

    fn idx(&self, sym: usize, x: i64, y: i64) -> usize {
        let ix = (x - self.min.0) as usize;
        let iy = (y - self.min.1) as usize;
        (sym * self.height + iy) * self.width + ix
    }

    fn set(&mut self, sym: usize, x: i64, y: i64) {
        let i = self.idx(sym, x, y);
        self.cells[i] = true;
    }

    fn iter_set(&self) -> impl Iterator<Item = (usize, i64, i64)> + '_ {
        self.cells.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| {
            let sym = i / (self.width * self.height);
            let rem = i % (self.width * self.height);
            let iy = rem / self.width;
            let ix = rem % self.width;
            (sym, ix as i64 + self.min.0, iy as i64 + self.min.1)
        })
    }
}

fn advance(sys: &SftSystem, cur: &Layer) -> Layer {
    let mut next = cur.blank();
    for (sym, x, y) in cur.iter_set() {
        for &j in sys.successors(sym as u16) {
            let s = sys.displacement(j);
            next.set(j as usize, x + s.0, y + s.1);
        }
    }
    next
}

/// The set `{psi(w)/n : w periodic word of length n}`, exact and deduplicated.
/// May be empty (for example at odd `n` in a two-cycle system).
pub fn oracle_means(sys: &SftSystem, n: u32, cap: u64) -> Result<BTreeSet<Rational2>> {
    if n == 0 {
        return Err(Error::InvalidArgument("word length must be >= 1".into()));
    }
    sys.require_valid()?;
    check_cap(sys, n, cap)?;

    let mut out = BTreeSet::new();
    for start in 0..sys.alphabet_size {
        let mut layer = Layer::new(sys, n);
        let s = sys.displacement(start as u16);
        layer.set(start, s.0, s.1);
        for _ in 1..n {
            layer = advance(sys, &layer);
        }
        for (sym, x, y) in layer.iter_set() {
            if sys.can_follow(sym as u16, start as u16) {
                out.insert(Rational2::mean_of(crate::exact::IntVec2(x, y), n as u64));
            }
        }
    }
    Ok(out)
}

/// The set `{psi(w)/n : w admissible word of length n}`, exact.
pub fn word_means(sys: &SftSystem, n: u32, cap: u64) -> Result<BTreeSet<Rational2>> {
    if n == 0 {
        return Err(Error::InvalidArgument("word length must be >= 1".into()));
    }
    sys.require_valid()?;
    check_cap(sys, n, cap)?;

    let mut layer = Layer::new(sys, n);
    for start in 0..sys.alphabet_size {
        let s = sys.displacement(start as u16);
        layer.set(start, s.0, s.1);
    }
    for _ in 1..n {
        layer = advance(sys, &layer);
    }
    let mut out = BTreeSet::new();
    for (_, x, y) in layer.iter_set() {
        out.insert(Rational2::mean_of(crate::exact::IntVec2(x, y), n as u64));
    }
    Ok(out)
}

/// Exact hull of all periodic-word means with length up to `n_max`.
pub fn oracle_hull(sys: &SftSystem, n_max: u32, cap: u64) -> Result<RationalPolygon> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be >= 1".into()));
    }
    let mut points: BTreeSet<Rational2> = BTreeSet::new();
    for n in 1..=n_max {
        points.extend(oracle_means(sys, n, cap)?);
    }
    if points.is_empty() {
        return Err(Error::NoCycles);
    }
    RationalPolygon::hull(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{IntVec2, Rat};
    use crate::hull::PolygonTag;
    use crate::sft::{SftSystem, Symbol};

    fn full2() -> SftSystem {
        SftSystem::full_shift(vec![IntVec2(0, 0), IntVec2(1, 0)])
    }

    fn two_cycle() -> SftSystem {
        SftSystem::new(2, vec![vec![1], vec![0]], vec![IntVec2(1, 0), IntVec2(0, 1)])
    }

    fn triangle() -> SftSystem {
        SftSystem::full_shift(vec![IntVec2(0, 0), IntVec2(1, 0), IntVec2(0, 1)])
    }

    /// Naive per-word enumeration used to cross-check the layered oracle.
    fn naive_means(sys: &SftSystem, n: u32, periodic: bool) -> BTreeSet<Rational2> {
        let mut out = BTreeSet::new();
        let mut word: Vec<Symbol> = Vec::new();
        fn rec(
            sys: &SftSystem,
            n: usize,
            periodic: bool,
            word: &mut Vec<Symbol>,
            out: &mut BTreeSet<Rational2>,
        ) {
            if word.len() == n {
                if !periodic || sys.can_follow(*word.last().unwrap(), word[0]) {
                    out.insert(Rational2::mean_of(sys.psi_unchecked(word), n as u64));
                }
                return;
            }
            let choices: Vec<Symbol> = match word.last() {
                None => (0..sys.alphabet_size as Symbol).collect(),
                Some(&last) => sys.successors(last).to_vec(),
            };
            for c in choices {
                word.push(c);
                rec(sys, n, periodic, word, out);
                word.pop();
            }
        }
        rec(sys, n as usize, periodic, &mut word, &mut out);
        out
    }

    fn r2(xn: i128, xd: i128, yn: i128, yd: i128) -> Rational2 {
        Rational2::new(Rat::new(xn, xd), Rat::new(yn, yd))
    }

    #[test]
    fn full2_means_small_lengths() {
        let sys = full2();
        let m1 = oracle_means(&sys, 1, 1000).unwrap();
        assert_eq!(
            m1.into_iter().collect::<Vec<_>>(),
            vec![r2(0, 1, 0, 1), r2(1, 1, 0, 1)]
        );
        let m2 = oracle_means(&sys, 2, 1000).unwrap();
        assert_eq!(
            m2.into_iter().collect::<Vec<_>>(),
            vec![r2(0, 1, 0, 1), r2(1, 2, 0, 1), r2(1, 1, 0, 1)]
        );
    }

    #[test]
    fn two_cycle_means() {
        let sys = two_cycle();
        // No closed walk of odd length exists.
        assert!(oracle_means(&sys, 1, 1000).unwrap().is_empty());
        assert!(oracle_means(&sys, 3, 1000).unwrap().is_empty());
        let m2 = oracle_means(&sys, 2, 1000).unwrap();
        assert_eq!(m2.into_iter().collect::<Vec<_>>(), vec![r2(1, 2, 1, 2)]);
        // Plain words of length 2 have the same single mean.
        let w2 = word_means(&sys, 2, 1000).unwrap();
        assert_eq!(w2.into_iter().collect::<Vec<_>>(), vec![r2(1, 2, 1, 2)]);
        // Plain words of length 1 do not: their means sit at the displacements.
        let w1 = word_means(&sys, 1, 1000).unwrap();
        assert_eq!(
            w1.into_iter().collect::<Vec<_>>(),
            vec![r2(0, 1, 1, 1), r2(1, 1, 0, 1)]
        );
    }

    #[test]
    fn hull_examples() {
        let h = oracle_hull(&full2(), 3, 10_000).unwrap();
        assert_eq!(h.tag, PolygonTag::Segment);
        assert_eq!(h.vertices, vec![r2(0, 1, 0, 1), r2(1, 1, 0, 1)]);

        let h = oracle_hull(&two_cycle(), 4, 10_000).unwrap();
        assert_eq!(h.tag, PolygonTag::Point);
        assert_eq!(h.vertices, vec![r2(1, 2, 1, 2)]);

        let h = oracle_hull(&triangle(), 6, 10_000_000).unwrap();
        assert_eq!(h.tag, PolygonTag::Polygon);
        assert_eq!(h.vertices, vec![r2(0, 1, 0, 1), r2(1, 1, 0, 1), r2(0, 1, 1, 1)]);
    }

    #[test]
    fn cap_is_enforced() {
        let sys = triangle();
        // 3^9 = 19683 > 10000
        assert!(matches!(
            oracle_means(&sys, 9, 10_000),
            Err(Error::CapExceeded { need: 19683, cap: 10_000 })
        ));
        assert!(oracle_means(&sys, 8, 10_000).is_ok());
    }

    #[test]
    fn layered_oracle_matches_naive_enumeration() {
        let systems = vec![
            full2(),
            two_cycle(),
            triangle(),
            SftSystem::new(
                3,
                vec![vec![1, 2], vec![0], vec![2, 0]],
                vec![IntVec2(-2, 1), IntVec2(3, 0), IntVec2(0, -1)],
            ),
        ];
        for sys in &systems {
            for n in 1..=6 {
                assert_eq!(
                    oracle_means(sys, n, 1_000_000).unwrap(),
                    naive_means(sys, n, true),
                    "periodic means mismatch at n={n}"
                );
                assert_eq!(
                    word_means(sys, n, 1_000_000).unwrap(),
                    naive_means(sys, n, false),
                    "word means mismatch at n={n}"
                );
            }
        }
    }
}
