//! The generalized Baernstein norm
//! `‖x‖² = sup Σᵢ (Σ_{γ∈Fᵢ} |x_γ|)²` over disjoint admissible `F₁,…,F_n`.
//!
//! Evaluation works on the trace of the family on `supp x`: if `A ∈ F` then
//! `A ∩ supp x ∈ F` by heredity and carries the same block sum, so no block
//! ever needs to leave the support.

use std::collections::HashMap;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{lcm_of_denominators, rational_serde, Rational};
use crate::family::{self, table, FamilySpec, Point};
use crate::par;
use crate::vector::SparseVector;

pub const DEFAULT_NORM_GUARD: usize = 14;
pub const BRUTEFORCE_GUARD: usize = 9;

/// Exact squared norm together with an optimal disjoint family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormResult {
    #[serde(with = "rational_serde")]
    pub norm_sq: Rational,
    pub certificate: Vec<Vec<Point>>,
}

/// `Σᵢ (Σ_{γ∈Fᵢ} x_γ)²` with signed sums; sets must be pairwise disjoint.
pub fn block_functional_sq(x: &SparseVector, blocks: &[Vec<Point>]) -> Result<Rational> {
    let mut seen = std::collections::HashSet::new();
    let mut total = Rational::zero();
    for block in blocks {
        let mut sum = Rational::zero();
        for p in block {
            if !seen.insert(p) {
                return Err(Error::Overlap(p.to_string()));
            }
            if let Some(a) = x.get(p) {
                sum += a;
            }
        }
        total += &sum * &sum;
    }
    Ok(total)
}

/// Numbers the subset DP can run on.
pub trait Weight: Clone + Zero + PartialOrd + Add<Output = Self> + Mul<Output = Self> + Send + Sync {}

impl<T> Weight for T where T: Clone + Zero + PartialOrd + Add<Output = T> + Mul<Output = T> + Send + Sync {}

/// The admissible subsets of a fixed support, as a bitmask table over the
/// support sorted ascending.
#[derive(Debug, Clone)]
pub struct Trace {
    points: Vec<Point>,
    admissible: Vec<bool>,
    ordered: bool,
}

impl Trace {
    pub fn new(spec: &FamilySpec, support: &[Point]) -> Result<Self> {
        let points = table::prepare_ground(spec, support)?;
        let admissible = table::admissible_table(spec, &points)?;
        Ok(Trace {
            points,
            admissible,
            ordered: spec.ordered(),
        })
    }

    /// Wraps a precomputed membership table over sorted, distinct `points`.
    pub fn from_table(points: Vec<Point>, admissible: Vec<bool>, ordered: bool) -> Self {
        assert_eq!(admissible.len(), 1usize << points.len(), "table size must match the ground set");
        Trace {
            points,
            admissible,
            ordered,
        }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ordered(&self) -> bool {
        self.ordered
    }

    pub fn is_admissible(&self, mask: usize) -> bool {
        self.admissible[mask]
    }

    pub fn mask_points(&self, mask: usize) -> Vec<Point> {
        table::subset_points(&self.points, mask)
    }

    /// Maximizes `Σ (Σ_{i∈B} w_i)²` over allowed disjoint families of
    /// admissible blocks, for non-negative weights aligned with `points()`.
    /// Returns the value and the optimal blocks as masks, sorted ascending.
    ///
    /// Blocks come back ordered by their least point. Among optimal families
    /// the lexicographically least one is returned, comparing blocks as
    /// sorted point lists, so every schedule yields the same certificate.
    pub fn best_family<T: Weight>(&self, weights: &[T]) -> (T, Vec<usize>) {
        assert_eq!(weights.len(), self.points.len(), "weights must match the support");
        let n = self.points.len();
        let size = 1usize << n;
        let mut block_sq: Vec<Option<T>> = vec![None; size];
        let mut sums: Vec<T> = vec![T::zero(); size];
        for s in 1..size {
            let low = s.trailing_zeros() as usize;
            sums[s] = sums[s & (s - 1)].clone() + weights[low].clone();
            if self.admissible[s] {
                block_sq[s] = Some(sums[s].clone() * sums[s].clone());
            }
        }
        drop(sums);
        let mut blocks = if self.ordered {
            self.best_ordered(&block_sq)
        } else {
            self.best_partition(&block_sq)
        };
        blocks.1.sort_unstable_by_key(|b| b.trailing_zeros());
        blocks
    }

    fn best_partition<T: Weight>(&self, block_sq: &[Option<T>]) -> (T, Vec<usize>) {
        let n = self.points.len();
        let table = par::fill_subset_table(n, (T::zero(), 0usize), |s, t| {
            let low = s & s.wrapping_neg();
            let rest = s ^ low;
            let mut best: Option<(T, usize)> = None;
            let mut sub = rest;
            loop {
                let block = sub | low;
                if let Some(sq) = &block_sq[block] {
                    let cand = sq.clone() + t[s ^ block].0.clone();
                    let better = match &best {
                        None => true,
                        Some((b, prev)) => cand > *b || (cand == *b && lex_less(block, *prev)),
                    };
                    if better {
                        best = Some((cand, block));
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
            best.expect("singletons are always admissible")
        });
        let full = (1usize << n) - 1;
        let mut blocks = Vec::new();
        let mut s = full;
        while s != 0 {
            let b = table[s].1;
            blocks.push(b);
            s ^= b;
        }
        (table[full].0.clone(), blocks)
    }

    /// Blocks must satisfy `max Fᵢ < min F_{i+1}`; points may stay uncovered.
    fn best_ordered<T: Weight>(&self, block_sq: &[Option<T>]) -> (T, Vec<usize>) {
        let n = self.points.len();
        // suffix[i] = best value using only points i..n
        let mut suffix: Vec<(T, Option<usize>)> = vec![(T::zero(), None); n + 1];
        for i in (0..n).rev() {
            let mut best = (suffix[i + 1].0.clone(), None);
            let above = !((1usize << (i + 1)) - 1) & ((1usize << n) - 1);
            let mut sub = above;
            loop {
                let block = sub | (1 << i);
                if let Some(sq) = &block_sq[block] {
                    let top = usize::BITS as usize - 1 - block.leading_zeros() as usize;
                    let cand = sq.clone() + suffix[top + 1].0.clone();
                    // a block starting at i always precedes skipping i
                    let better = match best.1 {
                        None => cand >= best.0,
                        Some(prev) => cand > best.0 || (cand == best.0 && lex_less(block, prev)),
                    };
                    if better {
                        best = (cand, Some(block));
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & above;
            }
            suffix[i] = best;
        }
        let mut blocks = Vec::new();
        let mut i = 0;
        while i < n {
            match suffix[i].1 {
                Some(b) => {
                    blocks.push(b);
                    i = usize::BITS as usize - b.leading_zeros() as usize;
                }
                None => i += 1,
            }
        }
        (suffix[0].0.clone(), blocks)
    }
}

/// Compares two masks as ascending lists of bit positions.
fn lex_less(a: usize, b: usize) -> bool {
    let diff = a ^ b;
    if diff == 0 {
        return false;
    }
    let p = diff.trailing_zeros();
    let above = |m: usize| m.checked_shr(p + 1).unwrap_or(0) != 0;
    if a >> p & 1 == 1 {
        above(b)
    } else {
        !above(a)
    }
}

/// `|x|` scaled by the lcm of denominators: integer weights and the scale.
pub(crate) fn integer_weights(values: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let l = lcm_of_denominators(values);
    let weights = values
        .iter()
        .map(|v| (v.abs() * Rational::from_integer(l.clone())).to_integer())
        .collect();
    (weights, l)
}

/// Runs the DP on exact integer weights, in `i128` when the square of the
/// total fits and in `BigInt` otherwise.
pub(crate) fn best_family_exact(trace: &Trace, values: &[Rational]) -> (Rational, Vec<usize>) {
    let (weights, scale) = integer_weights(values);
    let total: BigInt = weights.iter().sum();
    let fits = total.bits() <= 62;
    let (value, blocks) = if fits {
        let small: Vec<i128> = weights.iter().map(|w| w.to_i128().expect("fits")).collect();
        let (v, b) = trace.best_family(&small);
        (BigInt::from(v), b)
    } else {
        trace.best_family(&weights)
    };
    let denom = &scale * &scale;
    (Rational::new(value, denom), blocks)
}

pub fn norm_sq(spec: &FamilySpec, x: &SparseVector) -> Result<NormResult> {
    norm_sq_with_guard(spec, x, DEFAULT_NORM_GUARD)
}

pub fn norm_sq_with_guard(spec: &FamilySpec, x: &SparseVector, guard: usize) -> Result<NormResult> {
    x.check_against(spec)?;
    if x.len() > guard {
        return Err(Error::GuardExceeded {
            what: "vector support",
            size: x.len(),
            guard,
        });
    }
    let trace = Trace::new(spec, &x.support())?;
    Ok(norm_on_trace(&trace, x))
}

/// Norm of `x` on a precomputed trace whose points cover `supp x`.
pub fn norm_on_trace(trace: &Trace, x: &SparseVector) -> NormResult {
    let values: Vec<Rational> = trace
        .points()
        .iter()
        .map(|p| x.get(p).cloned().unwrap_or_else(Rational::zero))
        .collect();
    let (norm_sq, masks) = best_family_exact(trace, &values);
    let certificate = masks
        .into_iter()
        .map(|m| trace.mask_points(m))
        .filter(|b| b.iter().any(|p| x.get(p).is_some()))
        .collect();
    NormResult {
        norm_sq,
        certificate,
    }
}

/// Exhaustive enumeration of every disjoint family of admissible subsets of
/// `supp x`. Independent of the subset DP; membership is asked per block.
pub fn norm_sq_bruteforce(spec: &FamilySpec, x: &SparseVector) -> Result<NormResult> {
    x.check_against(spec)?;
    if x.len() > BRUTEFORCE_GUARD {
        return Err(Error::GuardExceeded {
            what: "brute-force support",
            size: x.len(),
            guard: BRUTEFORCE_GUARD,
        });
    }
    let support = x.support();
    let abs: Vec<Rational> = support.iter().map(|p| x.get(p).expect("in support").abs()).collect();
    let mut search = BruteForce {
        spec,
        support: &support,
        abs: &abs,
        memo: HashMap::new(),
        blocks: Vec::new(),
        best: None,
        error: None,
    };
    search.visit(0);
    if let Some(e) = search.error {
        return Err(e);
    }
    let (norm_sq, blocks) = search.best.unwrap_or_else(|| (Rational::zero(), Vec::new()));
    let certificate = blocks
        .into_iter()
        .map(|b| b.into_iter().map(|i| support[i].clone()).collect())
        .collect();
    Ok(NormResult {
        norm_sq,
        certificate,
    })
}

struct BruteForce<'a> {
    spec: &'a FamilySpec,
    support: &'a [Point],
    abs: &'a [Rational],
    memo: HashMap<Vec<usize>, bool>,
    blocks: Vec<Vec<usize>>,
    best: Option<(Rational, Vec<Vec<usize>>)>,
    error: Option<Error>,
}

impl BruteForce<'_> {
    fn admissible(&mut self, block: &[usize]) -> bool {
        if let Some(&m) = self.memo.get(block) {
            return m;
        }
        let pts: Vec<Point> = block.iter().map(|&i| self.support[i].clone()).collect();
        let m = match family::member_with_guard(self.spec, &pts, BRUTEFORCE_GUARD) {
            Ok(m) => m,
            Err(e) => {
                self.error.get_or_insert(e);
                false
            }
        };
        self.memo.insert(block.to_vec(), m);
        m
    }

    fn visit(&mut self, i: usize) {
        if i == self.support.len() {
            self.score();
            return;
        }
        // leave point i uncovered
        self.visit(i + 1);
        for j in 0..self.blocks.len() {
            self.blocks[j].push(i);
            let candidate = self.blocks[j].clone();
            if self.admissible(&candidate) {
                self.visit(i + 1);
            }
            self.blocks[j].pop();
        }
        self.blocks.push(vec![i]);
        self.visit(i + 1);
        self.blocks.pop();
    }

    fn score(&mut self) {
        if self.spec.ordered() {
            let mut spans: Vec<(usize, usize)> = self
                .blocks
                .iter()
                .map(|b| (*b.iter().min().unwrap(), *b.iter().max().unwrap()))
                .collect();
            spans.sort_unstable();
            if spans.windows(2).any(|w| w[0].1 >= w[1].0) {
                return;
            }
        }
        let value: Rational = self
            .blocks
            .iter()
            .map(|b| {
                let s: Rational = b.iter().map(|&i| self.abs[i].clone()).sum();
                &s * &s
            })
            .sum();
        // blocks are built in order of least point, each sorted, so Vec order is lexicographic
        let better = match &self.best {
            None => true,
            Some((v, b)) => value > *v || (value == *v && self.blocks < *b),
        };
        if better {
            self.best = Some((value, self.blocks.clone()));
        }
    }
}
