//! Seeded random instances for property sweeps: systems, admissible words,
//! rational directions, and integer matrices.

use rand::Rng;

use crate::exact::{IntVec2, Mat2, Rat};
use crate::sft::{SftSystem, Symbol, Word};

/// A random valid system: alphabet size in `1..=max_alphabet`, non-empty
/// successor sets, displacement entries in `[-max_disp, max_disp]`.
pub fn random_system(rng: &mut impl Rng, max_alphabet: usize, max_disp: i64) -> SftSystem {
    let a = rng.gen_range(1..=max_alphabet);
    let mut transitions = Vec::with_capacity(a);
    for _ in 0..a {
        let mut succ: Vec<Symbol> =
            (0..a as Symbol).filter(|_| rng.gen_bool(0.5)).collect();
        if succ.is_empty() {
            succ.push(rng.gen_range(0..a as Symbol));
        }
        transitions.push(succ);
    }
    let displacements = (0..a)
        .map(|_| IntVec2(rng.gen_range(-max_disp..=max_disp), rng.gen_range(-max_disp..=max_disp)))
        .collect();
    SftSystem::new(a, transitions, displacements)
}

/// A random admissible word of the given length (a random walk).
pub fn random_word(rng: &mut impl Rng, sys: &SftSystem, len: usize) -> Word {
    let mut symbols = Vec::with_capacity(len);
    if len == 0 {
        return Word(symbols);
    }
    let mut cur = rng.gen_range(0..sys.alphabet_size as Symbol);
    symbols.push(cur);
    for _ in 1..len {
        let succ = sys.successors(cur);
        cur = succ[rng.gen_range(0..succ.len())];
        symbols.push(cur);
    }
    Word(symbols)
}

/// A non-zero rational direction with entries `p/q`, `|p| <= max_num`,
/// `1 <= q <= max_den`.
pub fn random_direction(rng: &mut impl Rng, max_num: i64, max_den: i64) -> (Rat, Rat) {
    loop {
        let part = |rng: &mut dyn rand::RngCore| {
            Rat::new(
                rng.gen_range(-max_num..=max_num) as i128,
                rng.gen_range(1..=max_den) as i128,
            )
        };
        let w = (part(rng), part(rng));
        if !(w.0.numer() == &0 && w.1.numer() == &0) {
            return w;
        }
    }
}

/// A random integer matrix with entries in `[-max, max]` (may be singular).
pub fn random_matrix(rng: &mut impl Rng, max: i64) -> Mat2 {
    let mut e = || rng.gen_range(-max..=max);
    Mat2([[e(), e()], [e(), e()]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_systems_are_valid_and_words_admissible() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let sys = random_system(&mut rng, 5, 3);
            assert!(sys.validate().is_valid());
            let w = random_word(&mut rng, &sys, 20);
            assert!(sys.is_admissible(&w));
        }
    }

    #[test]
    fn directions_are_nonzero() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..500 {
            let (x, y) = random_direction(&mut rng, 3, 7);
            assert!(!(x.numer() == &0 && y.numer() == &0));
        }
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        let a = random_system(&mut ChaCha8Rng::seed_from_u64(42), 4, 3);
        let b = random_system(&mut ChaCha8Rng::seed_from_u64(42), 4, 3);
        assert_eq!(a, b);
    }
}
