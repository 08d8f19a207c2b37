//! Dual norms: Day's norm, the dual Baernstein norm bracketed by exact
//! certificates, the dual renorm, and norming functionals.

mod norming;
pub mod solver;

pub use norming::{apply_functional, discretize_norming, extract_norming, Applied, NormingBlock, NormingFunctional};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{rational_serde, Interval, Rational};
use crate::family::{table, FamilySpec, Point};
use crate::primal::{self, Trace};
use crate::vector::SparseVector;

pub const DEFAULT_DUAL_GUARD: usize = 10;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITERATIONS: usize = 100_000;
/// Largest support for the Day brute force.
pub const DAY_BRUTEFORCE_GUARD: usize = 8;

/// `Σ_{i≥1} 4^{-i} (a_i*)²` for the decreasing rearrangement `a*` of `|y|`.
pub fn day_norm_sq(y: &SparseVector) -> Rational {
    let mut a: Vec<Rational> = y.iter().map(|(_, v)| v.abs()).collect();
    a.sort_unstable_by(|p, q| q.cmp(p));
    let mut weight = Rational::one();
    let quarter = Rational::new(1.into(), 4.into());
    a.iter()
        .map(|v| {
            weight *= &quarter;
            &weight * v * v
        })
        .sum()
}

/// Sup of `Σ 4^{-i} y_{γ_i}²` over every sequence of distinct support points.
pub fn day_norm_sq_bruteforce(y: &SparseVector) -> Result<Rational> {
    if y.len() > DAY_BRUTEFORCE_GUARD {
        return Err(Error::GuardExceeded {
            what: "Day brute-force support",
            size: y.len(),
            guard: DAY_BRUTEFORCE_GUARD,
        });
    }
    fn walk(sq: &[Rational], used: &mut [bool], weight: &Rational, acc: &Rational, best: &mut Rational) {
        if acc > best {
            *best = acc.clone();
        }
        let next = weight / Rational::from_integer(4.into());
        for i in 0..sq.len() {
            if !used[i] {
                used[i] = true;
                walk(sq, used, &next, &(acc + &next * &sq[i]), best);
                used[i] = false;
            }
        }
    }
    let sq: Vec<Rational> = y.iter().map(|(_, v)| v * v).collect();
    let mut best = Rational::zero();
    walk(&sq, &mut vec![false; sq.len()], &Rational::one(), &Rational::zero(), &mut best);
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualOptions {
    /// Target for `upper - lower`.
    pub tol: f64,
    pub guard: usize,
    /// Budget of Newton steps across all cutting-plane rounds.
    pub max_iterations: usize,
}

impl Default for DualOptions {
    fn default() -> Self {
        DualOptions {
            tol: DEFAULT_TOL,
            guard: DEFAULT_DUAL_GUARD,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

impl DualOptions {
    pub fn with_tol(tol: f64) -> Self {
        DualOptions {
            tol,
            ..Self::default()
        }
    }

    fn tol_rational(&self) -> Result<Rational> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", self.tol)));
        }
        Ok(BigRational::from_float(self.tol).expect("finite"))
    }
}

/// One summand `y_P` of the upper certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionPart {
    pub blocks: Vec<Vec<Point>>,
    pub values: SparseVector,
    /// Rational bound on `(Σ_F max_{γ∈F} |y_P(γ)|²)^{1/2}`.
    #[serde(with = "rational_serde")]
    pub bound: Rational,
}

/// A certified bracket `lower ≤ ‖y‖_* ≤ upper`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualResult {
    #[serde(with = "rational_serde")]
    pub lower: Rational,
    #[serde(with = "rational_serde")]
    pub upper: Rational,
    #[serde(with = "rational_serde")]
    pub value: Rational,
    #[serde(with = "rational_serde")]
    pub gap: Rational,
    pub converged: bool,
    /// Points where `y` was negative; the solver works with `|y|`.
    pub reflected: Vec<Point>,
    /// `x̂` with `‖x̂‖ ≤ 1` and `⟨x̂, y⟩ = lower`.
    pub witness: SparseVector,
    /// `y = Σ_P y_P` with `upper = Σ_P bound_P`.
    pub decomposition: Vec<DecompositionPart>,
    pub rounds: usize,
    pub newton_steps: usize,
}

impl DualResult {
    fn exact(y: &SparseVector, value: Rational) -> Self {
        DualResult {
            lower: value.clone(),
            upper: value.clone(),
            value,
            gap: Rational::zero(),
            converged: true,
            reflected: Vec::new(),
            witness: SparseVector::zero(y.space()),
            decomposition: Vec::new(),
            rounds: 0,
            newton_steps: 0,
        }
    }

    pub fn interval(&self) -> Interval {
        Interval {
            lower: self.lower.clone(),
            upper: self.upper.clone(),
        }
    }

    /// Re-checks both certificates against `spec` and `y` in exact arithmetic.
    pub fn verify(&self, spec: &FamilySpec, y: &SparseVector) -> Result<bool> {
        if y.is_empty() {
            return Ok(self.lower.is_zero() && self.upper.is_zero());
        }
        let witness_ok = primal::norm_sq_with_guard(spec, &self.witness, 20)?.norm_sq <= Rational::one()
            && self.witness.dot(y) == self.lower;
        let mut sum = SparseVector::zero(y.space());
        let mut total = Rational::zero();
        for part in &self.decomposition {
            let mut covered = std::collections::HashSet::new();
            let mut sq = Rational::zero();
            for block in &part.blocks {
                if !crate::family::member_with_guard(spec, block, 20)? {
                    return Ok(false);
                }
                let mut m = Rational::zero();
                for p in block {
                    if !covered.insert(p.clone()) {
                        return Ok(false);
                    }
                    if let Some(v) = part.values.get(p) {
                        m = m.max(v.abs());
                    }
                }
                sq += &m * &m;
            }
            if part.values.iter().any(|(p, _)| !covered.contains(p)) || &part.bound * &part.bound < sq {
                return Ok(false);
            }
            if spec.ordered() {
                let mut spans: Vec<(&Point, &Point)> = part
                    .blocks
                    .iter()
                    .filter(|b| !b.is_empty())
                    .map(|b| (b.iter().min().unwrap(), b.iter().max().unwrap()))
                    .collect();
                spans.sort();
                if spans.windows(2).any(|w| w[0].1 >= w[1].0) {
                    return Ok(false);
                }
            }
            sum = sum.add(&part.values)?;
            total += &part.bound;
        }
        Ok(witness_ok && sum == *y && total == self.upper)
    }
}

/// Brackets `‖y‖_* = sup{⟨x,y⟩ : ‖x‖ ≤ 1}` to within `options.tol`.
pub fn dual_norm(spec: &FamilySpec, y: &SparseVector, options: &DualOptions) -> Result<DualResult> {
    let tol = options.tol_rational()?;
    y.check_against(spec)?;
    if y.len() > options.guard {
        return Err(Error::GuardExceeded {
            what: "dual-norm support",
            size: y.len(),
            guard: options.guard,
        });
    }
    if y.is_empty() {
        return Ok(DualResult::exact(y, Rational::zero()));
    }
    let trace = Trace::new(spec, &y.support())?;
    let points = trace.points().to_vec();
    let abs: Vec<Rational> = points.iter().map(|p| y.get(p).expect("support").abs()).collect();
    let settings = solver::Settings {
        tol,
        max_newton: options.max_iterations,
    };
    let b = solver::bracket(&trace, &abs, &settings)?;

    let signed = |values: &[Rational]| -> Result<SparseVector> {
        SparseVector::from_pairs(
            y.space(),
            points.iter().zip(values).map(|(p, v)| {
                let v = if y.get(p).expect("support").is_negative() { -v.clone() } else { v.clone() };
                (p.clone(), v)
            }),
        )
    };
    let witness = signed(&b.witness)?;
    let decomposition = b
        .parts
        .iter()
        .map(|(blocks, values, bound)| {
            Ok(DecompositionPart {
                blocks: blocks.iter().map(|&m| table::subset_points(&points, m)).collect(),
                values: signed(values)?,
                bound: bound.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let reflected = y.iter().filter(|(_, v)| v.is_negative()).map(|(p, _)| p.clone()).collect();
    let gap = &b.upper - &b.lower;
    Ok(DualResult {
        value: (&b.lower + &b.upper) / Rational::from_integer(2.into()),
        lower: b.lower,
        upper: b.upper,
        gap,
        converged: b.converged,
        reflected,
        witness,
        decomposition,
        rounds: b.rounds,
        newton_steps: b.newton_steps,
    })
}

/// `‖y‖_*² + ‖y‖²_Day` as a rational interval.
pub fn dual_triple_norm_sq(spec: &FamilySpec, y: &SparseVector, options: &DualOptions) -> Result<Interval> {
    let dual = dual_norm(spec, y, options)?;
    Ok(dual.interval().square().add(&Interval::point(day_norm_sq(y))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};
    use crate::family::{nat_set, Space};
    use crate::ordinal::Ordinal;
    use crate::vector::nat_vector;
    use proptest::prelude::*;

    fn tol() -> Rational {
        ratio(1, 1_000_000)
    }

    #[test]
    fn day_examples() {
        assert_eq!(day_norm_sq(&nat_vector(&[(3, 1)])), ratio(1, 4));
        assert_eq!(day_norm_sq(&nat_vector(&[(3, 1), (9, 1)])), ratio(5, 16));
        assert_eq!(day_norm_sq(&nat_vector(&[(3, 2), (9, 1)])), ratio(17, 16));
        assert_eq!(day_norm_sq(&nat_vector(&[(3, 1), (9, 2)])), ratio(17, 16));
        assert_eq!(day_norm_sq(&SparseVector::zero(Space::Nat)), int(0));
    }

    #[test]
    fn schreier_dual_values() {
        let s = FamilySpec::schreier1();
        let opts = DualOptions::default();
        let r = dual_norm(&s, &nat_vector(&[(3, 1), (5, 1)]), &opts).unwrap();
        assert!(r.lower <= int(1) && int(1) <= r.upper && r.gap <= tol());
        let y = nat_vector(&[(3, 2), (4, 1), (5, 1)]);
        let r = dual_norm(&s, &y, &opts).unwrap();
        assert!(r.lower <= int(2) && int(2) <= r.upper && r.gap <= tol());
        assert!(r.verify(&s, &y).unwrap());
    }

    #[test]
    fn dual_of_inadmissible_pair_is_the_l2_norm() {
        // {1,2} is not in S1, so the unit ball is l2 on these coordinates
        let s = FamilySpec::schreier1();
        let y = nat_vector(&[(1, 1), (2, 1)]);
        let r = dual_norm(&s, &y, &DualOptions::default()).unwrap();
        assert!(r.converged, "{r:?}");
        assert!(&r.lower * &r.lower <= int(2) && int(2) <= &r.upper * &r.upper);
        assert!(r.verify(&s, &y).unwrap());
    }

    #[test]
    fn single_block_is_exact() {
        let s = FamilySpec::schreier1();
        let y = nat_vector(&[(4, 3), (5, -1), (7, 2), (9, -3)]);
        let r = dual_norm(&s, &y, &DualOptions::default()).unwrap();
        assert_eq!(r.gap, int(0));
        assert_eq!(r.lower, int(3));
        assert!(r.verify(&s, &y).unwrap());
        assert_eq!(r.reflected, nat_set(&[5, 9]));
    }

    #[test]
    fn mixed_support_converges_and_verifies() {
        let s = FamilySpec::schreier1();
        let y = nat_vector(&[(1, 2), (2, 1), (3, 1), (4, 3), (6, -1), (7, 2)]);
        let r = dual_norm(&s, &y, &DualOptions::default()).unwrap();
        assert!(r.converged, "gap {}", r.gap);
        assert!(r.gap <= tol());
        assert!(r.verify(&s, &y).unwrap());
    }

    #[test]
    fn tree_family_converges() {
        let f = FamilySpec::transfinite(Ordinal::finite(1), 1, 3).unwrap();
        let y = SparseVector::from_pairs(
            Space::Tuple { depth: 3 },
            [
                (Point::tuple(&[1, 1, 1]), int(1)),
                (Point::tuple(&[1, 1, 2]), int(2)),
                (Point::tuple(&[1, 2, 1]), int(1)),
                (Point::tuple(&[2, 1, 1]), ratio(1, 2)),
            ],
        )
        .unwrap();
        let r = dual_norm(&f, &y, &DualOptions::default()).unwrap();
        assert!(r.converged && r.gap <= tol(), "{r:?}");
        assert!(r.verify(&f, &y).unwrap());
    }

    #[test]
    fn guards_and_bad_tolerance() {
        let s = FamilySpec::schreier1();
        let y = nat_vector(&(1..=11).map(|i| (i, 1)).collect::<Vec<_>>());
        assert!(matches!(
            dual_norm(&s, &y, &DualOptions::default()),
            Err(Error::GuardExceeded { .. })
        ));
        assert!(dual_norm(&s, &nat_vector(&[(3, 1)]), &DualOptions::with_tol(0.0)).is_err());
    }

    #[test]
    fn dual_triple_examples() {
        let s = FamilySpec::schreier1();
        let opts = DualOptions::default();
        let iv = dual_triple_norm_sq(&s, &nat_vector(&[(6, 1)]), &opts).unwrap();
        assert_eq!(iv, Interval::point(ratio(5, 4)));
        let iv = dual_triple_norm_sq(&s, &SparseVector::zero(Space::Nat), &opts).unwrap();
        assert_eq!(iv, Interval::point(int(0)));
        let iv = dual_triple_norm_sq(&s, &nat_vector(&[(3, 1), (5, 1)]), &opts).unwrap();
        assert!(iv.contains(&ratio(21, 16)));
    }

    fn arb_y(max_len: usize) -> impl Strategy<Value = SparseVector> {
        proptest::collection::btree_map(1u64..10, -3i64..=3, 1..=max_len)
            .prop_map(|m| nat_vector(&m.into_iter().collect::<Vec<_>>()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn day_matches_bruteforce(y in arb_y(7)) {
            prop_assert_eq!(day_norm_sq(&y), day_norm_sq_bruteforce(&y).unwrap());
            prop_assert!(day_norm_sq(&y) <= y.l2_sq());
        }

        #[test]
        fn bracket_is_sound(y in arb_y(7)) {
            prop_assume!(!y.is_empty());
            let s = FamilySpec::schreier1();
            let r = dual_norm(&s, &y, &DualOptions::default()).unwrap();
            prop_assert!(r.lower <= r.upper);
            prop_assert!(r.gap <= tol(), "gap {}", r.gap);
            prop_assert!(r.verify(&s, &y).unwrap());
            // sandwich between l_inf and l2
            prop_assert!(r.upper >= y.max_abs());
            prop_assert!(&r.lower * &r.lower <= y.l2_sq());
        }

        #[test]
        fn upper_two_estimate(y in arb_y(4), z in arb_y(4)) {
            let keep: Vec<Point> = z.support().into_iter().filter(|p| y.get(p).is_none()).collect();
            let z = z.restrict(&keep);
            prop_assume!(!z.is_empty());
            let s = FamilySpec::schreier1();
            let o = DualOptions::default();
            let sum = dual_norm(&s, &y.add(&z).unwrap(), &o).unwrap();
            let a = dual_norm(&s, &y, &o).unwrap();
            let b = dual_norm(&s, &z, &o).unwrap();
            prop_assert!(&sum.lower * &sum.lower <= &a.upper * &a.upper + &b.upper * &b.upper);
        }
    }
}
