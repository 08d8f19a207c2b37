//! Equivalent renormings `|||·|||_{α,k}` of the tree spaces, the renorm on
//! the branch-constrained space and the direct-sum norm built from it.
//!
//! With `C_r = λ_{α_r}` the squared norms are
//!
//! * `α = 0`: `Σ x_γ²`
//! * `α = β+1`: `‖x‖²_{α,k} + |||x|||²_{β,k}`
//! * `α` limit: `‖x‖²_{α,k} + Σ_{r≥1} 2^{-r} λ_{α_r}^{-2} |||x|||²_{α_r, r∨k}`
//!
//! For `r` beyond the largest pairwise distance `D` on `supp x`, the family
//! `F_{α_r}^{(r∨k)}` traces to singletons, `|||x|||²_{α_r,r∨k} = λ_{α_r}² Σ x_γ²`
//! and the r-th term is `2^{-r} Σ x_γ²`. The series therefore closes to
//! explicit terms up to `R = max(1, D)` plus `2^{-R} Σ x_γ²`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::dual::{dual_triple_norm_sq, DualOptions};
use crate::error::{Error, Result};
use crate::exact::{Interval, Rational};
use crate::family::{FamilySpec, Space, TreeTables};
use crate::ordinal::{Kind, Ordinal};
use crate::primal::{self, best_family_exact, Trace, DEFAULT_NORM_GUARD};
use crate::vector::SparseVector;

/// `λ_α²`, the squared equivalence constant of `|||·|||_{α,k}` against `‖·‖_{α,k}`.
pub fn lambda_sq(alpha: &Ordinal) -> Rational {
    match alpha.kind() {
        Kind::Zero => Rational::one(),
        Kind::Successor => {
            Rational::one() + lambda_sq(&alpha.predecessor().expect("successor"))
        }
        Kind::Limit => Rational::from_integer(BigInt::from(2)),
    }
}

/// `|||x|||²_{α,k}` with the tail in closed form.
pub fn triple_norm_sq(alpha: &Ordinal, k: u32, x: &SparseVector) -> Result<Rational> {
    triple_norm_sq_extended(alpha, k, x, 0)
}

/// As [`triple_norm_sq`], but every limit level sums `extra` more explicit
/// terms before closing the tail. The result does not depend on `extra`.
pub fn triple_norm_sq_extended(alpha: &Ordinal, k: u32, x: &SparseVector, extra: u32) -> Result<Rational> {
    let mut eval = Evaluator::new(alpha, k, x, extra)?;
    Ok(eval.triple(alpha, k))
}

/// Squared base norm `‖x‖²_{α,k}` on the tree space of `x`.
pub fn tree_norm_sq(alpha: &Ordinal, k: u32, x: &SparseVector) -> Result<Rational> {
    let mut eval = Evaluator::new(alpha, k, x, 0)?;
    Ok(eval.base(alpha, k))
}

fn tree_depth(x: &SparseVector) -> Result<usize> {
    match x.space() {
        Space::Tuple { depth } => Ok(depth),
        Space::Nat => Err(Error::PointMismatch(
            "renormings live on tuple spaces".into(),
        )),
    }
}

struct Evaluator {
    points: Vec<crate::family::Point>,
    values: Vec<Rational>,
    tables: TreeTables,
    l2_sq: Rational,
    extra: u32,
    memo: HashMap<(Ordinal, u32), Rational>,
}

impl Evaluator {
    fn new(alpha: &Ordinal, k: u32, x: &SparseVector, extra: u32) -> Result<Self> {
        let depth = tree_depth(x)?;
        let spec = FamilySpec::transfinite(alpha.clone(), k, depth)?;
        x.check_against(&spec)?;
        if x.len() > DEFAULT_NORM_GUARD {
            return Err(Error::GuardExceeded {
                what: "vector support",
                size: x.len(),
                guard: DEFAULT_NORM_GUARD,
            });
        }
        let points = x.support();
        Ok(Evaluator {
            tables: TreeTables::new(&points)?,
            values: x.values(),
            points,
            l2_sq: x.l2_sq(),
            extra,
            memo: HashMap::new(),
        })
    }

    fn base(&mut self, alpha: &Ordinal, k: u32) -> Rational {
        let table = self.tables.with_superscript(alpha, k);
        let trace = Trace::from_table(self.points.clone(), table, false);
        best_family_exact(&trace, &self.values).0
    }

    fn triple(&mut self, alpha: &Ordinal, k: u32) -> Rational {
        let key = (alpha.clone(), k);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let value = match alpha.kind() {
            Kind::Zero => self.l2_sq.clone(),
            Kind::Successor => {
                let beta = alpha.predecessor().expect("successor");
                self.base(alpha, k) + self.triple(&beta, k)
            }
            Kind::Limit => {
                let horizon = self.tables.max_distance().max(1) + self.extra;
                let mut total = self.base(alpha, k);
                let mut weight = Rational::one();
                for r in 1..=horizon {
                    weight /= Rational::from_integer(BigInt::from(2));
                    let a_r = alpha.fundamental_sequence(r as u64).expect("limit");
                    let term = self.triple(&a_r, r.max(k)) / lambda_sq(&a_r);
                    total += &weight * term;
                }
                total + weight * &self.l2_sq
            }
        };
        self.memo.insert(key, value.clone());
        value
    }
}

fn kt_checked(x: &SparseVector) -> Result<FamilySpec> {
    let spec = FamilySpec::kt(tree_depth(x)?)?;
    x.check_against(&spec)?;
    if let Some(p) = x.support().into_iter().find(|p| !p.is_branch_valid()) {
        return Err(Error::BranchInvalid {
            point: p.to_string(),
        });
    }
    Ok(spec)
}

/// `‖x‖²` over the branch-constrained family plus `Σ x_γ²`.
pub fn kt_renorm_sq(x: &SparseVector) -> Result<Rational> {
    let spec = kt_checked(x)?;
    Ok(primal::norm_sq(&spec, x)?.norm_sq + x.l2_sq())
}

/// `|||x|||² + |||x*|||′²` on the direct sum, with the dual part taken over
/// the branch-constrained family and bracketed by the dual solver.
pub fn y_norm_sq(x: &SparseVector, ystar: &SparseVector, options: &DualOptions) -> Result<Interval> {
    let primal_part = if x.is_empty() {
        Rational::zero()
    } else {
        kt_renorm_sq(x)?
    };
    if ystar.is_empty() {
        return Ok(Interval::point(primal_part));
    }
    let depth = tree_depth(ystar)?;
    if !x.is_empty() && x.space() != ystar.space() {
        return Err(Error::PointMismatch(format!(
            "x lives in {}, x* in {}",
            x.space(),
            ystar.space()
        )));
    }
    let spec = FamilySpec::kt(depth)?;
    let dual = dual_triple_norm_sq(&spec, ystar, options)?;
    debug_assert!(!dual.lower.is_negative());
    Ok(Interval::point(primal_part).add(&dual))
}
