//! Membership tables over all subsets of a small ground set.
//!
//! A table is a `Vec<bool>` indexed by bitmask over the sorted ground
//! points. Because every family here is decided by looking only at the
//! points of the candidate set, a table over `ground` answers membership for
//! every subset of `ground` exactly.

use std::collections::HashMap;

use super::point::{distance, Point};
use super::spec::{FamilyKind, FamilySpec};
use crate::error::{Error, Result};
use crate::ordinal::{Kind, Ordinal};
use crate::par;

/// Largest ground set for which subset tables are built.
pub const HARD_TABLE_LIMIT: usize = 20;

pub(crate) fn subset_points(points: &[Point], mask: usize) -> Vec<Point> {
    bits(mask).map(|i| points[i].clone()).collect()
}

pub(crate) fn bits(mask: usize) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

/// Tables for the tree families `F_α` over one set of branches, memoized per ordinal.
#[derive(Debug)]
pub struct TreeTables {
    n: usize,
    sharp: Vec<u32>,
    max_distance: u32,
    cache: HashMap<Ordinal, Vec<bool>>,
}

impl TreeTables {
    /// `points` must be distinct tuples of one depth.
    pub fn new(points: &[Point]) -> Result<Self> {
        let n = points.len();
        if n > HARD_TABLE_LIMIT {
            return Err(Error::GuardExceeded {
                what: "tree-family ground set",
                size: n,
                guard: HARD_TABLE_LIMIT,
            });
        }
        let mut dist = vec![vec![0u32; n]; n];
        let mut max_distance = 0;
        for i in 0..n {
            for j in i + 1..n {
                let d = distance(&points[i], &points[j])?;
                dist[i][j] = d;
                dist[j][i] = d;
                max_distance = max_distance.max(d);
            }
        }
        let size = 1usize << n;
        let mut sharp = vec![0u32; size];
        for s in 1..size {
            if s.count_ones() < 2 {
                continue;
            }
            let low = s.trailing_zeros() as usize;
            let rest = s & (s - 1);
            let mut best = if rest.count_ones() >= 2 {
                sharp[rest]
            } else {
                u32::MAX
            };
            for j in bits(rest) {
                best = best.min(dist[low][j]);
            }
            sharp[s] = best;
        }
        Ok(TreeTables {
            n,
            sharp,
            max_distance,
            cache: HashMap::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Sharp of the subset, or 0 when it has fewer than two points.
    pub fn sharp(&self, mask: usize) -> u32 {
        self.sharp[mask]
    }

    /// Largest pairwise distance on the ground set (0 below two points).
    pub fn max_distance(&self) -> u32 {
        self.max_distance
    }

    /// Membership table of `F_α` (no superscript).
    pub fn base(&mut self, alpha: &Ordinal) -> &[bool] {
        self.ensure(alpha);
        &self.cache[alpha]
    }

    /// Membership table of `F_α^(k)`.
    pub fn with_superscript(&mut self, alpha: &Ordinal, k: u32) -> Vec<bool> {
        self.ensure(alpha);
        let base = &self.cache[alpha];
        base.iter()
            .enumerate()
            .map(|(s, &m)| s.count_ones() <= 1 || (m && self.sharp[s] >= k))
            .collect()
    }

    fn ensure(&mut self, alpha: &Ordinal) {
        if self.cache.contains_key(alpha) {
            return;
        }
        let size = 1usize << self.n;
        let table = match alpha.kind() {
            Kind::Zero => (0..size).map(|s| s.count_ones() <= 1).collect(),
            Kind::Successor => {
                let beta = alpha.predecessor().expect("successor has a predecessor");
                self.ensure(&beta);
                successor_table(&self.cache[&beta], &self.sharp, self.n)
            }
            Kind::Limit => {
                let seq: Vec<Ordinal> = (1..=self.max_distance as u64)
                    .map(|r| alpha.fundamental_sequence(r).expect("limit ordinal"))
                    .collect();
                for a in &seq {
                    self.ensure(a);
                }
                (0..size)
                    .map(|s| {
                        s.count_ones() <= 1
                            || (1..=self.sharp[s] as usize).any(|r| self.cache[&seq[r - 1]][s])
                    })
                    .collect()
            }
        };
        self.cache.insert(alpha.clone(), table);
    }
}

/// Canonical maximal successor: `S` belongs when it splits into at most
/// `sharp(S)` disjoint members of the predecessor family.
fn successor_table(beta: &[bool], sharp: &[u32], n: usize) -> Vec<bool> {
    let min_parts = par::fill_subset_table(n, 0u8, |s, t| {
        if beta[s] {
            return 1;
        }
        let low = s & s.wrapping_neg();
        let rest = s ^ low;
        let mut best = u8::MAX;
        let mut sub = rest;
        loop {
            let block = sub | low;
            if beta[block] {
                best = best.min(t[s ^ block].saturating_add(1));
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        best
    });
    min_parts
        .iter()
        .enumerate()
        .map(|(s, &m)| s.count_ones() <= 1 || (m as u32) <= sharp[s])
        .collect()
}

/// Sorts and deduplicates `points` and checks each against the spec.
pub fn prepare_ground(spec: &FamilySpec, points: &[Point]) -> Result<Vec<Point>> {
    let mut ground = points.to_vec();
    ground.sort();
    ground.dedup();
    for p in &ground {
        spec.check_point(p)?;
    }
    Ok(ground)
}

/// Membership table of `spec` over every subset of the sorted, distinct `ground`.
pub fn admissible_table(spec: &FamilySpec, ground: &[Point]) -> Result<Vec<bool>> {
    let n = ground.len();
    if n > HARD_TABLE_LIMIT {
        return Err(Error::GuardExceeded {
            what: "ground set",
            size: n,
            guard: HARD_TABLE_LIMIT,
        });
    }
    let size = 1usize << n;
    match spec.kind() {
        FamilyKind::Schreier1 => Ok((0..size)
            .map(|s| {
                let count = s.count_ones() as u64;
                count <= 1 || count <= ground[s.trailing_zeros() as usize].as_nat().unwrap_or(0)
            })
            .collect()),
        FamilyKind::Explicit(e) => {
            let k = spec.k();
            let sharp_ok = |s: usize| -> Result<bool> {
                if k <= 1 || s.count_ones() < 2 {
                    Ok(true)
                } else {
                    Ok(super::point::sharp(&subset_points(ground, s))? >= k)
                }
            };
            (0..size)
                .map(|s| Ok(e.contains(&subset_points(ground, s)) && sharp_ok(s)?))
                .collect()
        }
        FamilyKind::Transfinite(t) => {
            let mut tables = TreeTables::new(ground)?;
            let mut table = tables.with_superscript(&t.alpha, spec.k());
            if t.kt {
                let valid: Vec<bool> = ground.iter().map(Point::is_branch_valid).collect();
                for (s, m) in table.iter_mut().enumerate() {
                    if s.count_ones() >= 2 {
                        *m = *m && bits(s).all(|i| valid[i]) && tables.sharp(s) >= 3;
                    }
                }
            }
            Ok(table)
        }
    }
}
