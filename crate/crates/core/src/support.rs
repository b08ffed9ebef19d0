//! Support functionals of the rotation polygon by maximum-mean-cycle
//! dynamic programming.
//!
//! For a direction `w`, the support value is `max <w, psi(c)> / len(c)` over
//! all cycles. We clear the denominators of `w`, run Karp's algorithm on the
//! integer weights `<W, s_i>` per strongly connected component, and read the
//! witness off the tight subgraph of reduced weights, where every cycle is
//! critical. Everything is exact; no floating point.

use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::Rat;
use crate::sft::{Cycle, SftSystem, Symbol, Word};

/// Result of a support query.
#[derive(Clone, Debug)]
pub struct SupportResult {
    /// `max <w, psi(c)> / len(c)` over all cycles, exact.
    pub value: Rat,
    /// A simple cycle attaining the value (length <= alphabet size).
    pub witness: Cycle,
}

/// Kosaraju strongly connected components; returns one component id per
/// vertex. Ids are assigned deterministically.
fn scc(n: usize, succ: &[Vec<usize>]) -> Vec<usize> {
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        // Iterative DFS recording finish order.
        let mut stack = vec![(start, 0usize)];
        seen[start] = true;
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if *i < succ[v].len() {
                let w = succ[v][*i];
                *i += 1;
                if !seen[w] {
                    seen[w] = true;
                    stack.push((w, 0));
                }
            } else {
                order.push(v);
                stack.pop();
            }
        }
    }

    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, ss) in succ.iter().enumerate() {
        for &w in ss {
            pred[w].push(v);
        }
    }

    let mut comp = vec![usize::MAX; n];
    let mut next_id = 0;
    for &start in order.iter().rev() {
        if comp[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        comp[start] = next_id;
        while let Some(v) = stack.pop() {
            for &u in &pred[v] {
                if comp[u] == usize::MAX {
                    comp[u] = next_id;
                    stack.push(u);
                }
            }
        }
        next_id += 1;
    }
    comp
}

/// Maximum cycle mean within one SCC by Karp's theorem:
/// `mu = max_v min_k (D_m(v) - D_k(v)) / (m - k)` with walk lengths exactly
/// `k` from a fixed source. Returns `None` if the component has no cycle
/// (a single vertex without a self-loop).
fn karp_max_mean(vs: &[usize], succ: &[Vec<usize>], weight: &[i128]) -> Option<Rat> {
    let m = vs.len();
    let index_of = |v: usize| vs.binary_search(&v).expect("vertex in scc");
    let edges: Vec<(usize, usize)> = vs
        .iter()
        .enumerate()
        .flat_map(|(iu, &u)| {
            succ[u]
                .iter()
                .filter(|w| vs.binary_search(w).is_ok())
                .map(move |&w| (iu, index_of(w)))
                .collect::<Vec<_>>()
        })
        .collect();
    if edges.is_empty() {
        return None;
    }

    // d[k][v] = best walk of exactly k edges from vs[0] to v.
    let mut d: Vec<Vec<Option<i128>>> = vec![vec![None; m]; m + 1];
    d[0][0] = Some(0);
    for k in 1..=m {
        for &(iu, iw) in &edges {
            if let Some(base) = d[k - 1][iu] {
                let cand = base + weight[vs[iw]];
                if d[k][iw].is_none_or(|cur| cand > cur) {
                    d[k][iw] = Some(cand);
                }
            }
        }
    }

    let mut best: Option<Rat> = None;
    #[allow(clippy::needless_range_loop)]
    for v in 0..m {
        let Some(dm) = d[m][v] else { continue };
        let mut inner: Option<Rat> = None;
        for k in 0..m {
            let Some(dk) = d[k][v] else { continue };
            let ratio = Rat::new(dm - dk, (m - k) as i128);
            if inner.is_none_or(|cur| ratio < cur) {
                inner = Some(ratio);
            }
        }
        if let Some(inner) = inner {
            if best.is_none_or(|cur| inner > cur) {
                best = Some(inner);
            }
        }
    }
    best
}

/// Finds a simple cycle of mean exactly `mu` inside one SCC.
///
/// Reduced weights `w'(u->v) = q*c_v - p` (with `mu = p/q`) make the maximum
/// cycle sum zero; converged longest-walk potentials make every critical
/// cycle tight (`d[v] = d[u] + w'`), and any cycle of the tight subgraph has
/// reduced sum zero, hence mean `mu`.
fn critical_cycle(vs: &[usize], succ: &[Vec<usize>], weight: &[i128], mu: Rat) -> Vec<usize> {
    let m = vs.len();
    let in_scc = |v: usize| vs.binary_search(&v).is_ok();
    let (p, q) = (*mu.numer(), *mu.denom());
    let reduced = |head: usize| q * weight[head] - p;

    let mut d = vec![0i128; m];
    let index_of = |v: usize| vs.binary_search(&v).expect("vertex in scc");
    for round in 0..=m {
        let mut changed = false;
        for (iu, &u) in vs.iter().enumerate() {
            for &w in &succ[u] {
                if !in_scc(w) {
                    continue;
                }
                let iw = index_of(w);
                let cand = d[iu] + reduced(w);
                if cand > d[iw] {
                    d[iw] = cand;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
        assert!(round < m, "positive reduced cycle: max-mean value is wrong");
    }

    // DFS over tight edges only; the first back edge closes a critical cycle.
    let mut state = vec![0u8; m]; // 0 = new, 1 = on stack, 2 = done
    for start in 0..m {
        if state[start] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
        let mut path: Vec<usize> = vec![start];
        state[start] = 1;
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            let tight: Vec<usize> = succ[vs[v]]
                .iter()
                .filter(|w| in_scc(**w))
                .map(|&w| index_of(w))
                .filter(|&iw| d[iw] == d[v] + reduced(vs[iw]))
                .collect();
            if *i < tight.len() {
                let w = tight[*i];
                *i += 1;
                match state[w] {
                    0 => {
                        state[w] = 1;
                        stack.push((w, 0));
                        path.push(w);
                    }
                    1 => {
                        let pos = path.iter().position(|&x| x == w).unwrap();
                        return path[pos..].iter().map(|&x| vs[x]).collect();
                    }
                    _ => {}
                }
            } else {
                state[v] = 2;
                stack.pop();
                path.pop();
            }
        }
    }
    unreachable!("tight subgraph of a critical SCC always contains a cycle")
}

/// Maximizes `<w, psi(c)> / len(c)` over all cycles of a valid system.
///
/// The value comes from Karp's dynamic program on scalar weights; the
/// witness is read off the tight subgraph and is always simple.
pub fn support_max(sys: &SftSystem, w: (Rat, Rat)) -> Result<SupportResult> {
    if w.0.is_zero() && w.1.is_zero() {
        return Err(Error::ZeroDirection);
    }
    sys.require_valid()?;

    // Clear denominators: w = W / scale with W integral.
    let scale = w.0.denom().lcm(w.1.denom());
    let wx = w.0.numer() * (scale / w.0.denom());
    let wy = w.1.numer() * (scale / w.1.denom());

    let n = sys.alphabet_size;
    let weight: Vec<i128> = sys
        .displacements
        .iter()
        .map(|s| wx * (s.0 as i128) + wy * (s.1 as i128))
        .collect();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut s: Vec<usize> = sys.transitions[i].iter().map(|&j| j as usize).collect();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();

    let comp = scc(n, &succ);
    let ncomp = comp.iter().copied().max().map_or(0, |c| c + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); ncomp];
    for (v, &c) in comp.iter().enumerate() {
        members[c].push(v);
    }

    let mut best: Option<(Rat, usize)> = None;
    for (cid, vs) in members.iter().enumerate() {
        if let Some(mu) = karp_max_mean(vs, &succ, &weight) {
            if best.is_none_or(|(cur, _)| mu > cur) {
                best = Some((mu, cid));
            }
        }
    }
    let Some((mu, cid)) = best else {
        return Err(Error::NoCycles);
    };

    let cyc = critical_cycle(&members[cid], &succ, &weight, mu);
    let word = Word(cyc.iter().map(|&v| v as Symbol).collect());
    let witness = Cycle::new(sys, word)?.canonical();
    debug_assert!(witness.is_simple());

    // The witness certifies the value.
    let psi = sys.psi(witness.word())?;
    let attained = Rat::new(
        wx * (psi.0 as i128) + wy * (psi.1 as i128),
        (witness.len() as i128) * scale,
    );
    let value = mu / Rat::from_integer(scale);
    assert_eq!(attained, value, "tight-cycle witness must attain the Karp value");

    Ok(SupportResult { value, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::IntVec2;

    fn rat(p: i128, q: i128) -> Rat {
        Rat::new(p, q)
    }

    fn full2() -> SftSystem {
        SftSystem::full_shift(vec![IntVec2(0, 0), IntVec2(1, 0)])
    }

    #[test]
    fn full_two_shift_east() {
        let r = support_max(&full2(), (rat(1, 1), rat(0, 1))).unwrap();
        assert_eq!(r.value, rat(1, 1));
        assert_eq!(r.witness.word(), &Word::from_symbols(vec![1]));
    }

    #[test]
    fn single_self_loop_any_direction() {
        let sys = SftSystem::new(1, vec![vec![0]], vec![IntVec2(2, -3)]);
        let r = support_max(&sys, (rat(1, 3), rat(5, 7))).unwrap();
        assert_eq!(r.value, rat(1, 3) * rat(2, 1) + rat(5, 7) * rat(-3, 1));
        assert_eq!(r.witness.len(), 1);
    }

    #[test]
    fn triangle_diagonal_direction() {
        let tri = SftSystem::full_shift(vec![IntVec2(0, 0), IntVec2(1, 0), IntVec2(0, 1)]);
        let r = support_max(&tri, (rat(1, 1), rat(1, 1))).unwrap();
        assert_eq!(r.value, rat(1, 1));
        let m = tri.mean(&r.witness);
        assert_eq!(m.x + m.y, rat(1, 1));
    }

    #[test]
    fn two_cycle_needs_the_two_cycle() {
        let sys = SftSystem::new(2, vec![vec![1], vec![0]], vec![IntVec2(1, 0), IntVec2(0, 1)]);
        let r = support_max(&sys, (rat(1, 1), rat(0, 1))).unwrap();
        assert_eq!(r.value, rat(1, 2));
        assert_eq!(r.witness.word(), &Word::from_symbols(vec![0, 1]));
    }

    #[test]
    fn rejects_zero_direction() {
        assert!(matches!(
            support_max(&full2(), (rat(0, 1), rat(0, 1))),
            Err(Error::ZeroDirection)
        ));
    }

    #[test]
    fn multi_scc_takes_global_max() {
        // 0 -> {0,1}, 1 -> {1}: two singleton SCCs with self-loops.
        let sys = SftSystem::new(2, vec![vec![0, 1], vec![1]], vec![IntVec2(3, 0), IntVec2(5, 0)]);
        let r = support_max(&sys, (rat(1, 1), rat(0, 1))).unwrap();
        assert_eq!(r.value, rat(5, 1));
        assert_eq!(r.witness.word(), &Word::from_symbols(vec![1]));
        // Opposite direction prefers the other loop.
        let r = support_max(&sys, (rat(-1, 1), rat(0, 1))).unwrap();
        assert_eq!(r.value, rat(-3, 1));
        assert_eq!(r.witness.word(), &Word::from_symbols(vec![0]));
    }

    #[test]
    fn negative_weights_and_fractional_direction() {
        let sys = SftSystem::new(
            3,
            vec![vec![1], vec![2], vec![0, 1]],
            vec![IntVec2(-1, 2), IntVec2(3, -1), IntVec2(0, 0)],
        );
        let r = support_max(&sys, (rat(2, 3), rat(-1, 5))).unwrap();
        let m = sys.mean(&r.witness);
        assert_eq!(r.value, rat(2, 3) * m.x + rat(-1, 5) * m.y);
    }
}
