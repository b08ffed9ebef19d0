//! The rational rotation polygon and the cycle algebra behind it.
//!
//! The polygon is the exact convex hull of the means `psi(c)/len(c)` over
//! simple cycles. Two exact routes compute it: direct enumeration of simple
//! cycles (used for small alphabets) and support-function refinement driven
//! by the max-mean-cycle oracle (used for large alphabets such as block
//! power systems, where the number of simple cycles explodes). Both agree;
//! the tests cross-check them.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Rat, Rational2};
use crate::hull::{PolygonTag, RationalPolygon};
use crate::sft::{Cycle, SftSystem, Symbol, Word};
use crate::support::support_max;

/// Alphabets up to this size enumerate simple cycles directly; larger ones
/// use support refinement. A full shift on 10 symbols has ~9.9M simple
/// paths, which is still fine; 12 symbols would not be.
const CYCLE_ENUMERATION_LIMIT: usize = 10;

/// All simple cycles (pairwise-distinct symbols), one per rotation class,
/// in canonical form: the rotation starting at the minimal symbol, which is
/// the lexicographically smallest rotation. Sorted by (length, word).
pub fn simple_cycles(sys: &SftSystem) -> Vec<Cycle> {
    let a = sys.alphabet_size;
    let mut out: Vec<Vec<Symbol>> = Vec::new();

    // DFS from each start over symbols strictly larger than the start, so
    // every simple cycle is produced exactly once, rooted at its minimum.
    fn dfs(
        sys: &SftSystem,
        start: Symbol,
        path: &mut Vec<Symbol>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<Symbol>>,
    ) {
        let last = *path.last().unwrap();
        let mut succ: Vec<Symbol> = sys.successors(last).to_vec();
        succ.sort_unstable();
        succ.dedup();
        for next in succ {
            if next == start {
                out.push(path.clone());
            } else if next > start && !used[next as usize] {
                used[next as usize] = true;
                path.push(next);
                dfs(sys, start, path, used, out);
                path.pop();
                used[next as usize] = false;
            }
        }
    }

    for start in 0..a as Symbol {
        let mut used = vec![false; a];
        used[start as usize] = true;
        let mut path = vec![start];
        dfs(sys, start, &mut path, &mut used, &mut out);
    }

    out.sort_by(|x, y| (x.len(), x.as_slice()).cmp(&(y.len(), y.as_slice())));
    out.into_iter()
        .map(|w| Cycle::new(sys, Word(w)).expect("enumerated cycles are admissible"))
        .collect()
}

/// Exact rotation polygon: hull of the simple-cycle means, canonical.
pub fn rotation_polygon(sys: &SftSystem) -> Result<RationalPolygon> {
    sys.require_valid()?;
    if sys.alphabet_size <= CYCLE_ENUMERATION_LIMIT {
        rotation_polygon_by_cycles(sys)
    } else {
        rotation_polygon_by_support(sys)
    }
}

/// The enumeration route: hull of `{mean(c) : c simple cycle}`.
pub fn rotation_polygon_by_cycles(sys: &SftSystem) -> Result<RationalPolygon> {
    sys.require_valid()?;
    let cycles = simple_cycles(sys);
    if cycles.is_empty() {
        return Err(Error::NoCycles);
    }
    let means: BTreeSet<Rational2> = cycles.iter().map(|c| sys.mean(c)).collect();
    RationalPolygon::hull(means)
}

/// The refinement route: grow a vertex set from support queries until every
/// hull edge is certified by its outward normal. Each query returns a
/// simple-cycle mean, so the candidate set is finite and the loop terminates
/// with exactly the rotation polygon.
pub fn rotation_polygon_by_support(sys: &SftSystem) -> Result<RationalPolygon> {
    sys.require_valid()?;
    let one = Rat::from_integer(1);
    let zero = Rat::zero();

    let query = |dir: (Rat, Rat)| -> Result<Rational2> {
        let r = support_max(sys, dir)?;
        Ok(sys.mean(&r.witness))
    };

    let mut points: BTreeSet<Rational2> = BTreeSet::new();
    for dir in [(one, zero), (zero, one), (-one, zero), (zero, -one)] {
        points.insert(query(dir)?);
    }

    loop {
        let hull = RationalPolygon::hull(points.iter().copied())?;
        let sides: Vec<(Rational2, Rational2)> = match hull.tag {
            PolygonTag::Point => {
                // Supports in the four axis directions are all attained at
                // the single known point, so the polygon is that point.
                return Ok(hull);
            }
            PolygonTag::Segment => {
                let (a, b) = (hull.vertices[0], hull.vertices[1]);
                vec![(a, b), (b, a)]
            }
            PolygonTag::Polygon => {
                let n = hull.vertices.len();
                (0..n).map(|i| (hull.vertices[i], hull.vertices[(i + 1) % n])).collect()
            }
        };

        let mut grew = false;
        for (a, b) in sides {
            // Outward normal of the CCW edge a -> b, cleared to integers.
            let d = b - a;
            let lcm = d.x.denom().lcm(d.y.denom());
            let nx = d.y.numer() * (lcm / d.y.denom());
            let ny = -(d.x.numer() * (lcm / d.x.denom()));
            let g = nx.gcd(&ny); // non-zero: the edge is non-degenerate
            let dir = (Rat::from_integer(nx / g), Rat::from_integer(ny / g));
            let r = support_max(sys, dir)?;
            let level = dir.0 * a.x + dir.1 * a.y;
            debug_assert!(r.value >= level, "support below a known vertex");
            if r.value > level {
                let w = sys.mean(&r.witness);
                debug_assert!(!points.contains(&w));
                points.insert(w);
                grew = true;
            }
        }
        if !grew {
            return RationalPolygon::hull(points);
        }
    }
}

/// A word split into simple cycles plus a short remainder.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Decomposition {
    pub cycles: Vec<Word>,
    pub remainder: Word,
    pub source_len: usize,
}

impl Decomposition {
    pub fn total_cycle_len(&self) -> usize {
        self.cycles.iter().map(Word::len).sum()
    }
}

/// Splits an admissible word into cycles and a remainder of length < A.
///
/// Repeatedly, while the current word is longer than `A - 1`: find the first
/// repeated symbol pair (earliest second occurrence `j2`, then its earliest
/// first occurrence `j1`), cut out the cycle `w[j1..j2]`, and splice the
/// rest; the splice junction is admissible because `w[j2] = w[j1]`. A word
/// of length exactly `A` may have no repeated pair (all symbols distinct);
/// then the whole alphabet is present, so the smallest successor of the
/// last symbol occurs at some position `k` and the suffix `w[k..]` is a
/// cycle whose removal needs no junction. Length and displacement are
/// conserved exactly.
pub fn decompose(sys: &SftSystem, w: &Word) -> Result<Decomposition> {
    sys.check_admissible(w)?;
    let a = sys.alphabet_size;
    let source_len = w.len();
    let mut cur: Vec<Symbol> = w.0.clone();
    let mut cycles: Vec<Word> = Vec::new();

    while cur.len() > a.saturating_sub(1) {
        let mut first_seen: Vec<Option<usize>> = vec![None; a];
        let mut cut: Option<(usize, usize)> = None;
        for (j, &s) in cur.iter().enumerate() {
            match first_seen[s as usize] {
                Some(j1) => {
                    cut = Some((j1, j));
                    break;
                }
                None => first_seen[s as usize] = Some(j),
            }
        }
        let (j1, j2) = match cut {
            Some(pair) => pair,
            None => {
                // All symbols distinct, hence the word is length A and
                // contains every symbol, in particular a successor of its
                // last symbol: the suffix from there wraps around.
                debug_assert_eq!(cur.len(), a);
                let last = *cur.last().unwrap();
                let target = sys.successors(last).iter().copied().min().unwrap();
                let k = cur.iter().position(|&s| s == target).unwrap();
                (k, cur.len())
            }
        };
        let cycle: Vec<Symbol> = cur[j1..j2].to_vec();
        debug_assert!(sys.is_cycle(&Word(cycle.clone())));
        cycles.push(Word(cycle));
        cur.splice(j1..j2, std::iter::empty());
    }

    Ok(Decomposition { cycles, remainder: Word(cur), source_len })
}

/// The largest squared displacement norm times `4 A^2 / n^2`: the exact
/// square of the word-mean distance bound `2 A s_max / n`.
pub fn word_mean_bound_sq(sys: &SftSystem, n: u64) -> Rat {
    let a = sys.alphabet_size as i128;
    Rat::new(4 * a * a * sys.max_disp_norm_sq(), (n as i128) * (n as i128))
}
