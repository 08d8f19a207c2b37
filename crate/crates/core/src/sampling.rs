//! Seeded random instances for oracles, benches and the CLI.
//!
//! Every generator takes the RNG explicitly, so a run is reproduced by its
//! seed alone.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{ratio, Rational};
use crate::family::{FamilySpec, Point, Space};
use crate::ordinal::Ordinal;
use crate::vector::SparseVector;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A non-zero rational `±p/q` with `p ≤ 9`, `q ≤ 4`.
pub fn coefficient<R: Rng>(rng: &mut R, signed: bool) -> Rational {
    let p = rng.gen_range(1..=9i64);
    let q = rng.gen_range(1..=4i64);
    if signed && rng.gen_bool(0.5) {
        ratio(-p, q)
    } else {
        ratio(p, q)
    }
}

/// `size` distinct naturals from `1..=max`, sorted.
pub fn nat_points<R: Rng>(rng: &mut R, max: u64, size: usize) -> Vec<Point> {
    let mut pool: Vec<u64> = (1..=max).collect();
    pool.shuffle(rng);
    let mut out: Vec<Point> = pool.into_iter().take(size).map(Point::Nat).collect();
    out.sort();
    out
}

/// `size` distinct branches of length `depth` over `1..=alphabet`, sorted.
pub fn tuple_points<R: Rng>(rng: &mut R, depth: usize, alphabet: u32, size: usize) -> Vec<Point> {
    let capacity = (alphabet as f64).powi(depth as i32);
    assert!(size as f64 <= capacity, "not enough branches");
    let mut seen = BTreeSet::new();
    while seen.len() < size {
        let p: Vec<u32> = (0..depth).map(|_| rng.gen_range(1..=alphabet)).collect();
        seen.insert(Point::Tuple(p));
    }
    seen.into_iter().collect()
}

pub fn vector_on<R: Rng>(rng: &mut R, space: Space, points: &[Point], signed: bool) -> SparseVector {
    SparseVector::from_pairs(space, points.iter().map(|p| (p.clone(), coefficient(rng, signed))))
        .expect("points live in space")
}

pub fn nat_vector<R: Rng>(rng: &mut R, max: u64, size: usize, signed: bool) -> SparseVector {
    let points = nat_points(rng, max, size);
    vector_on(rng, Space::Nat, &points, signed)
}

pub fn tuple_vector<R: Rng>(rng: &mut R, depth: usize, alphabet: u32, size: usize, signed: bool) -> SparseVector {
    let points = tuple_points(rng, depth, alphabet, size);
    vector_on(rng, Space::Tuple { depth }, &points, signed)
}

/// Two vectors with disjoint supports drawn from a common pool of `size_a + size_b` points.
pub fn disjoint_pair<R: Rng>(
    rng: &mut R,
    space: Space,
    pool: Vec<Point>,
    size_a: usize,
    signed: bool,
) -> (SparseVector, SparseVector) {
    let mut pool = pool;
    pool.shuffle(rng);
    let (a, b) = pool.split_at(size_a.min(pool.len()));
    (vector_on(rng, space, a, signed), vector_on(rng, space, b, signed))
}

/// The down-closure of a few random generator sets over `ground`.
pub fn hereditary_family<R: Rng>(rng: &mut R, ground: &[Point], generators: usize, max_size: usize) -> FamilySpec {
    let mut sets: BTreeSet<Vec<Point>> = ground.iter().map(|p| vec![p.clone()]).collect();
    sets.insert(Vec::new());
    for _ in 0..generators {
        let size = rng.gen_range(2..=max_size.max(2).min(ground.len().max(2)));
        let mut g: Vec<Point> = ground.choose_multiple(rng, size.min(ground.len())).cloned().collect();
        g.sort();
        let n = g.len();
        for mask in 1usize..(1 << n) {
            sets.insert((0..n).filter(|i| mask >> i & 1 == 1).map(|i| g[i].clone()).collect());
        }
    }
    FamilySpec::explicit(sets.into_iter().collect(), Some(ground.to_vec())).expect("down-closed by construction")
}

/// One of `0, 1, 2, ω, ω+1`.
pub fn small_ordinal<R: Rng>(rng: &mut R) -> Ordinal {
    ["0", "1", "2", "w", "w+1"]
        .choose(rng)
        .expect("non-empty")
        .parse()
        .expect("valid literal")
}
