//! Displacement-weighted subshifts of finite type and their word algebra.
//!
//! A system is a finite alphabet `0..A-1`, a set-valued transition law
//! (every symbol has at least one successor), and one integer displacement
//! vector per symbol. Finite admissible words, their displacement sums, and
//! cycles (words whose wrap-around step is admissible) are the raw material
//! for everything in [`crate::polygon`].

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{IntVec2, Mat2, Rational2};

/// Symbol index into the alphabet.
pub type Symbol = u16;

/// A subshift of finite type with a displacement cocycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SftSystem {
    /// Number of symbols `A`; symbols are `0..A-1`.
    #[serde(rename = "alphabet")]
    pub alphabet_size: usize,
    /// Successor sets: `transitions[i]` lists the symbols that may follow `i`.
    pub transitions: Vec<Vec<Symbol>>,
    /// One integer displacement vector per symbol.
    pub displacements: Vec<IntVec2>,
}

/// A single invariant violation found by [`SftSystem::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Violation {
    EmptyAlphabet,
    TransitionCountMismatch { expected: usize, found: usize },
    DisplacementCountMismatch { expected: usize, found: usize },
    EmptySuccessorSet { symbol: Symbol },
    SymbolOutOfRange { symbol: Symbol, successor: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyAlphabet => write!(f, "alphabet is empty"),
            Violation::TransitionCountMismatch { expected, found } => {
                write!(f, "expected {expected} successor sets, found {found}")
            }
            Violation::DisplacementCountMismatch { expected, found } => {
                write!(f, "expected {expected} displacements, found {found}")
            }
            Violation::EmptySuccessorSet { symbol } => {
                write!(f, "empty successor set at {symbol}")
            }
            Violation::SymbolOutOfRange { symbol, successor } => {
                write!(f, "symbol {successor} out of range in successors of {symbol}")
            }
        }
    }
}

/// Outcome of validating a system; empty iff all invariants hold.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let msgs: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", msgs.join("; "))
    }
}

/// A finite word over the alphabet. The empty word is the trivial word and
/// is the identity for concatenation. Admissibility is relative to a system
/// and checked by the operations that require it.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<Symbol>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn from_symbols(symbols: impl Into<Vec<Symbol>>) -> Word {
        Word(symbols.into())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "θ");
        }
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// A periodic word: non-empty, admissible, and with admissible wrap-around.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cycle {
    word: Word,
    simple: bool,
}

impl Cycle {
    /// Validates admissibility (including the wrap-around step) and records
    /// whether the cycle is simple (no repeated symbol, hence length <= A).
    pub fn new(sys: &SftSystem, word: Word) -> Result<Cycle> {
        if word.is_empty() {
            return Err(Error::InvalidArgument("a cycle must have length >= 1".into()));
        }
        sys.check_admissible(&word)?;
        if !sys.is_cycle(&word) {
            let last = *word.0.last().unwrap();
            return Err(Error::JunctionInadmissible { prev: last, next: word.0[0] });
        }
        let simple = {
            let set: BTreeSet<Symbol> = word.0.iter().copied().collect();
            set.len() == word.len()
        };
        Ok(Cycle { word, simple })
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_simple(&self) -> bool {
        self.simple
    }

    /// The lexicographically smallest rotation (for a simple cycle this is
    /// the rotation starting at the minimal symbol).
    pub fn canonical(&self) -> Cycle {
        let n = self.word.len();
        let best = (0..n)
            .map(|r| {
                let mut w = Vec::with_capacity(n);
                w.extend_from_slice(&self.word.0[r..]);
                w.extend_from_slice(&self.word.0[..r]);
                w
            })
            .min()
            .unwrap();
        Cycle { word: Word(best), simple: self.simple }
    }
}

/// Map from old symbols to their indices in a trimmed system.
pub type SymbolMap = Vec<Option<Symbol>>;

impl SftSystem {
    pub fn new(
        alphabet_size: usize,
        transitions: Vec<Vec<Symbol>>,
        displacements: Vec<IntVec2>,
    ) -> SftSystem {
        SftSystem { alphabet_size, transitions, displacements }
    }

    /// The full shift on `a` symbols with the given displacements.
    pub fn full_shift(displacements: Vec<IntVec2>) -> SftSystem {
        let a = displacements.len();
        let all: Vec<Symbol> = (0..a as Symbol).collect();
        SftSystem {
            alphabet_size: a,
            transitions: vec![all; a],
            displacements,
        }
    }

    pub fn successors(&self, symbol: Symbol) -> &[Symbol] {
        &self.transitions[symbol as usize]
    }

    pub fn displacement(&self, symbol: Symbol) -> IntVec2 {
        self.displacements[symbol as usize]
    }

    pub fn can_follow(&self, prev: Symbol, next: Symbol) -> bool {
        self.transitions[prev as usize].contains(&next)
    }

    /// Largest squared Euclidean displacement norm over the alphabet.
    pub fn max_disp_norm_sq(&self) -> i128 {
        self.displacements.iter().map(|s| s.norm_sq()).max().unwrap_or(0)
    }

    /// Checks every `SftSystem` invariant and reports all violations.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.alphabet_size == 0 {
            violations.push(Violation::EmptyAlphabet);
        }
        if self.transitions.len() != self.alphabet_size {
            violations.push(Violation::TransitionCountMismatch {
                expected: self.alphabet_size,
                found: self.transitions.len(),
            });
        }
        if self.displacements.len() != self.alphabet_size {
            violations.push(Violation::DisplacementCountMismatch {
                expected: self.alphabet_size,
                found: self.displacements.len(),
            });
        }
        for (i, succ) in self.transitions.iter().enumerate().take(self.alphabet_size) {
            if succ.is_empty() {
                violations.push(Violation::EmptySuccessorSet { symbol: i as Symbol });
            }
            for &s in succ {
                if (s as usize) >= self.alphabet_size {
                    violations.push(Violation::SymbolOutOfRange {
                        symbol: i as Symbol,
                        successor: s as u64,
                    });
                }
            }
        }
        ValidationReport { violations }
    }

    /// Errs with `InvalidSystem` unless [`validate`](Self::validate) is clean.
    pub fn require_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidSystem(report.to_string()))
        }
    }

    /// Checks range and consecutive admissibility of a word.
    pub fn check_admissible(&self, w: &Word) -> Result<()> {
        for (k, &s) in w.0.iter().enumerate() {
            if (s as usize) >= self.alphabet_size {
                return Err(Error::Inadmissible { at: k });
            }
            if k > 0 && !self.can_follow(w.0[k - 1], s) {
                return Err(Error::Inadmissible { at: k });
            }
        }
        Ok(())
    }

    pub fn is_admissible(&self, w: &Word) -> bool {
        self.check_admissible(w).is_ok()
    }

    /// Displacement sum of an admissible word; the trivial word sums to zero.
    pub fn psi(&self, w: &Word) -> Result<IntVec2> {
        self.check_admissible(w)?;
        Ok(self.psi_unchecked(&w.0))
    }

    pub(crate) fn psi_unchecked(&self, symbols: &[Symbol]) -> IntVec2 {
        let mut acc = IntVec2::ZERO;
        for &s in symbols {
            acc = acc + self.displacements[s as usize];
        }
        acc
    }

    /// Concatenation `w1 w2`. Either factor may be trivial; the junction step
    /// is checked before the second factor so a bad junction is reported as
    /// such even when `w2` is itself inadmissible.
    pub fn concat(&self, w1: &Word, w2: &Word) -> Result<Word> {
        self.check_admissible(w1)?;
        if let (Some(&last), Some(&first)) = (w1.0.last(), w2.0.first()) {
            if !self.can_follow(last, first) {
                return Err(Error::JunctionInadmissible { prev: last, next: first });
            }
        }
        self.check_admissible(w2)?;
        let mut out = Vec::with_capacity(w1.len() + w2.len());
        out.extend_from_slice(&w1.0);
        out.extend_from_slice(&w2.0);
        Ok(Word(out))
    }

    /// True iff the wrap-around step of an admissible non-empty word is
    /// admissible. The trivial word is not a cycle.
    pub fn is_cycle(&self, w: &Word) -> bool {
        match (w.0.last(), w.0.first()) {
            (Some(&last), Some(&first)) => self.can_follow(last, first),
            _ => false,
        }
    }

    /// Exact mean displacement `psi(c) / len(c)` of a cycle.
    pub fn mean(&self, c: &Cycle) -> Rational2 {
        let psi = self.psi_unchecked(&c.word().0);
        Rational2::mean_of(psi, c.len() as u64)
    }

    /// Removes symbols with no predecessor or no successor until a fixpoint.
    /// Every cycle survives, so the rotation polygon is unchanged. Returns
    /// the reduced system and the old-to-new symbol map.
    pub fn trim_to_biextendable(&self) -> Result<(SftSystem, SymbolMap)> {
        let a = self.alphabet_size;
        let mut alive = vec![true; a];
        loop {
            let mut in_deg = vec![0usize; a];
            let mut out_deg = vec![0usize; a];
            for i in 0..a {
                if !alive[i] {
                    continue;
                }
                for &j in &self.transitions[i] {
                    let j = j as usize;
                    if j < a && alive[j] {
                        out_deg[i] += 1;
                        in_deg[j] += 1;
                    }
                }
            }
            let mut changed = false;
            for i in 0..a {
                if alive[i] && (in_deg[i] == 0 || out_deg[i] == 0) {
                    alive[i] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        let mut map: SymbolMap = vec![None; a];
        let mut next: Symbol = 0;
        for i in 0..a {
            if alive[i] {
                map[i] = Some(next);
                next += 1;
            }
        }
        if next == 0 {
            return Err(Error::EmptySystem);
        }

        let mut transitions = Vec::with_capacity(next as usize);
        let mut displacements = Vec::with_capacity(next as usize);
        #[allow(clippy::needless_range_loop)]
        for i in 0..a {
            if !alive[i] {
                continue;
            }
            let succ: Vec<Symbol> = self.transitions[i]
                .iter()
                .filter_map(|&j| map.get(j as usize).copied().flatten())
                .collect();
            transitions.push(succ);
            displacements.push(self.displacements[i]);
        }
        Ok((
            SftSystem { alphabet_size: next as usize, transitions, displacements },
            map,
        ))
    }

    /// The n-block power system: symbols are admissible words of length `n`,
    /// block `u` may be followed by `v` iff `v[0]` follows `u[n-1]`, and the
    /// displacement of a block is its psi. The rotation polygon of the output
    /// is `n` times the rotation polygon of the input.
    pub fn power_system(&self, n: u32, cap: u64) -> Result<SftSystem> {
        if n == 0 {
            return Err(Error::InvalidArgument("power exponent must be >= 1".into()));
        }
        self.require_valid()?;
        if n == 1 {
            return Ok(self.clone());
        }

        // Enumerate admissible n-blocks in lexicographic order.
        let mut blocks: Vec<Vec<Symbol>> = Vec::new();
        let mut stack: Vec<Symbol> = Vec::new();
        fn rec(
            sys: &SftSystem,
            n: usize,
            stack: &mut Vec<Symbol>,
            blocks: &mut Vec<Vec<Symbol>>,
            cap: u64,
        ) -> Result<()> {
            if stack.len() == n {
                if blocks.len() as u64 >= cap {
                    return Err(Error::CapExceeded { need: blocks.len() as u128 + 1, cap });
                }
                blocks.push(stack.clone());
                return Ok(());
            }
            let choices: Vec<Symbol> = match stack.last() {
                None => (0..sys.alphabet_size as Symbol).collect(),
                Some(&last) => {
                    let mut c = sys.transitions[last as usize].clone();
                    c.sort_unstable();
                    c.dedup();
                    c
                }
            };
            for s in choices {
                stack.push(s);
                rec(sys, n, stack, blocks, cap)?;
                stack.pop();
            }
            Ok(())
        }
        rec(self, n as usize, &mut stack, &mut blocks, cap)?;

        let mut transitions = Vec::with_capacity(blocks.len());
        let mut displacements = Vec::with_capacity(blocks.len());
        for u in &blocks {
            let last = *u.last().unwrap();
            let succ: Vec<Symbol> = blocks
                .iter()
                .enumerate()
                .filter(|(_, v)| self.can_follow(last, v[0]))
                .map(|(j, _)| j as Symbol)
                .collect();
            transitions.push(succ);
            displacements.push(self.psi_unchecked(u));
        }
        Ok(SftSystem {
            alphabet_size: blocks.len(),
            transitions,
            displacements,
        })
    }

    /// Pushes the displacement cocycle forward by an integer matrix: the
    /// transition law is unchanged and `s'_i = L s_i`. The rotation polygon
    /// of the output is the image of the input polygon under `L`.
    pub fn apply_integer_linear(&self, l: &Mat2) -> SftSystem {
        SftSystem {
            alphabet_size: self.alphabet_size,
            transitions: self.transitions.clone(),
            displacements: self.displacements.iter().map(|&s| l.apply(s)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn full2() -> SftSystem {
        SftSystem::full_shift(vec![IntVec2(0, 0), IntVec2(1, 0)])
    }

    fn two_cycle() -> SftSystem {
        SftSystem::new(2, vec![vec![1], vec![0]], vec![IntVec2(1, 0), IntVec2(0, 1)])
    }

    #[test]
    fn validate_minimal_legal_system() {
        let sys = SftSystem::new(1, vec![vec![0]], vec![IntVec2(0, 0)]);
        assert!(sys.validate().is_valid());
    }

    #[test]
    fn validate_reports_empty_successor_set() {
        let sys = SftSystem::new(2, vec![vec![], vec![0]], vec![IntVec2::ZERO; 2]);
        let report = sys.validate();
        assert_eq!(report.violations, vec![Violation::EmptySuccessorSet { symbol: 0 }]);
        assert!(report.to_string().contains("empty successor set at 0"));
    }

    #[test]
    fn validate_reports_out_of_range() {
        let sys = SftSystem::new(2, vec![vec![0, 2], vec![0]], vec![IntVec2::ZERO; 2]);
        let report = sys.validate();
        assert_eq!(
            report.violations,
            vec![Violation::SymbolOutOfRange { symbol: 0, successor: 2 }]
        );
        assert!(report.to_string().contains("symbol 2 out of range"));
    }

    #[test]
    fn validate_reports_count_mismatches() {
        let sys = SftSystem::new(2, vec![vec![0]], vec![IntVec2::ZERO]);
        let report = sys.validate();
        assert!(report
            .violations
            .contains(&Violation::TransitionCountMismatch { expected: 2, found: 1 }));
        assert!(report
            .violations
            .contains(&Violation::DisplacementCountMismatch { expected: 2, found: 1 }));
    }

    #[test]
    fn psi_of_trivial_word_is_zero() {
        assert_eq!(full2().psi(&Word::empty()).unwrap(), IntVec2::ZERO);
    }

    #[test]
    fn psi_direct_sum() {
        let w = Word::from_symbols(vec![0, 1, 1]);
        assert_eq!(full2().psi(&w).unwrap(), IntVec2(2, 0));
    }

    #[test]
    fn psi_rejects_inadmissible() {
        let sys = two_cycle();
        let w = Word::from_symbols(vec![0, 0]);
        assert_eq!(sys.psi(&w), Err(Error::Inadmissible { at: 1 }));
        let w = Word::from_symbols(vec![5]);
        assert_eq!(sys.psi(&w), Err(Error::Inadmissible { at: 0 }));
    }

    #[test]
    fn concat_with_trivial_word_is_identity() {
        let sys = full2();
        let w = Word::from_symbols(vec![0, 1]);
        assert_eq!(sys.concat(&Word::empty(), &w).unwrap(), w);
        assert_eq!(sys.concat(&w, &Word::empty()).unwrap(), w);
    }

    #[test]
    fn concat_on_full_shift() {
        let sys = full2();
        let w1 = Word::from_symbols(vec![0, 1]);
        let w2 = Word::from_symbols(vec![1, 0]);
        assert_eq!(sys.concat(&w1, &w2).unwrap(), Word::from_symbols(vec![0, 1, 1, 0]));
    }

    #[test]
    fn concat_reports_bad_junction_first() {
        // "11" is itself inadmissible, but the junction failure is reported.
        let sys = two_cycle();
        let w1 = Word::from_symbols(vec![0, 1]);
        let w2 = Word::from_symbols(vec![1, 1]);
        assert_eq!(
            sys.concat(&w1, &w2),
            Err(Error::JunctionInadmissible { prev: 1, next: 1 })
        );
    }

    #[test]
    fn cycle_detection() {
        let sys = full2();
        assert!(sys.is_cycle(&Word::from_symbols(vec![0, 1])));
        let two = two_cycle();
        assert!(!two.is_cycle(&Word::from_symbols(vec![0])));
        let loop1 = SftSystem::new(1, vec![vec![0]], vec![IntVec2::ZERO]);
        assert!(loop1.is_cycle(&Word::from_symbols(vec![0])));
        assert!(!loop1.is_cycle(&Word::empty()));
    }

    #[test]
    fn cycle_means() {
        let sys = full2();
        let c = Cycle::new(&sys, Word::from_symbols(vec![1])).unwrap();
        assert_eq!(sys.mean(&c), Rational2::from_ints(1, 0));
        let c = Cycle::new(&sys, Word::from_symbols(vec![0, 1])).unwrap();
        assert_eq!(sys.mean(&c).to_f64(), (0.5, 0.0));
        let tri = SftSystem::full_shift(vec![IntVec2(0, 0), IntVec2(1, 0), IntVec2(0, 1)]);
        let c = Cycle::new(&tri, Word::from_symbols(vec![0, 1, 2])).unwrap();
        assert_eq!(format!("{}", tri.mean(&c)), "(1/3, 1/3)");
    }

    #[test]
    fn trim_removes_transient_symbol() {
        // 0 has no predecessor.
        let sys = SftSystem::new(2, vec![vec![1], vec![1]], vec![IntVec2(5, 5), IntVec2(1, 2)]);
        let (t, map) = sys.trim_to_biextendable().unwrap();
        assert_eq!(t.alphabet_size, 1);
        assert_eq!(map, vec![None, Some(0)]);
        assert_eq!(t.displacements, vec![IntVec2(1, 2)]);
        assert_eq!(t.transitions, vec![vec![0]]);
    }

    #[test]
    fn trim_keeps_full_shift() {
        let sys = full2();
        let (t, map) = sys.trim_to_biextendable().unwrap();
        assert_eq!(t, sys);
        assert_eq!(map, vec![Some(0), Some(1)]);
    }

    #[test]
    fn trim_iterates_chain_to_terminal_loop() {
        let sys = SftSystem::new(
            3,
            vec![vec![1], vec![2], vec![2]],
            vec![IntVec2(1, 0), IntVec2(0, 1), IntVec2(0, 0)],
        );
        let (t, map) = sys.trim_to_biextendable().unwrap();
        assert_eq!(t.alphabet_size, 1);
        assert_eq!(map, vec![None, None, Some(0)]);
        assert_eq!(t.displacements, vec![IntVec2(0, 0)]);
    }

    #[test]
    fn trim_errors_when_nothing_is_biextendable() {
        // Invalid system (empty successor set) that trims to nothing.
        let sys = SftSystem::new(2, vec![vec![], vec![0]], vec![IntVec2::ZERO; 2]);
        assert_eq!(sys.trim_to_biextendable(), Err(Error::EmptySystem));
    }

    #[test]
    fn power_identity_case() {
        let sys = full2();
        assert_eq!(sys.power_system(1, 1000).unwrap(), sys);
    }

    #[test]
    fn power_two_blocks_of_full_two_shift() {
        let sys = full2();
        let p = sys.power_system(2, 1000).unwrap();
        assert_eq!(p.alphabet_size, 4);
        assert_eq!(
            p.displacements,
            vec![IntVec2(0, 0), IntVec2(1, 0), IntVec2(1, 0), IntVec2(2, 0)]
        );
        // Block 1 = "01" may be followed by blocks starting with any symbol.
        assert_eq!(p.transitions[1], vec![0, 1, 2, 3]);
    }

    #[test]
    fn power_respects_cap() {
        let sys = full2();
        assert!(matches!(
            sys.power_system(4, 10),
            Err(Error::CapExceeded { cap: 10, .. })
        ));
    }

    #[test]
    fn affine_identity_and_rotation() {
        let sys = full2();
        assert_eq!(sys.apply_integer_linear(&Mat2::identity()), sys);
        let rot = Mat2([[0, -1], [1, 0]]);
        let r = sys.apply_integer_linear(&rot);
        assert_eq!(r.displacements, vec![IntVec2(0, 0), IntVec2(0, 1)]);
        assert_eq!(r.transitions, sys.transitions);
    }

    #[test]
    fn cycle_canonical_rotation() {
        let sys = SftSystem::full_shift(vec![IntVec2::ZERO; 3]);
        let c = Cycle::new(&sys, Word::from_symbols(vec![2, 0, 1])).unwrap();
        assert_eq!(c.canonical().word(), &Word::from_symbols(vec![0, 1, 2]));
        assert!(c.is_simple());
        let c = Cycle::new(&sys, Word::from_symbols(vec![1, 0, 1, 0])).unwrap();
        assert!(!c.is_simple());
        assert_eq!(c.canonical().word(), &Word::from_symbols(vec![0, 1, 0, 1]));
    }

    #[test]
    fn system_json_round_trip() {
        let sys = two_cycle();
        let json = serde_json::to_string(&sys).unwrap();
        assert!(json.contains("\"alphabet\":2"));
        let back: SftSystem = serde_json::from_str(&json).unwrap();
        assert_eq!(back, sys);
    }
}
