//! Finite-scale probes of 2-rotundity: the statistic
//! `Δ(m,n) = ‖x_m+x_n‖² − 2(‖x_m‖²+‖x_n‖²)` over short sequences, and the
//! approach of `‖y + δy_n‖_*` to `(1+δ²)^{1/2}` for flattening `y_n`.
//!
//! A 2R norm forces convergence of any sequence with `Δ → 0`; the probes only
//! exhibit computable witnesses and never claim the asymptotic property.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::dual::{day_norm_sq, dual_norm, DualOptions};
use crate::error::{Error, Result};
use crate::exact::{decimal, int, ratio, sqrt_bounds, Interval, Rational};
use crate::family::{FamilySpec, Point, Space};
use crate::ordinal::Ordinal;
use crate::par;
use crate::primal;
use crate::renorm::triple_norm_sq;
use crate::vector::{nat_vector, SparseVector};

/// Which squared norm a probe measures.
#[derive(Debug, Clone)]
pub enum NormHandle {
    Base(FamilySpec),
    Triple { alpha: Ordinal, k: u32 },
    Dual { spec: FamilySpec, options: DualOptions },
    /// `‖·‖_*² + ‖·‖²_Day`.
    DualTriple { spec: FamilySpec, options: DualOptions },
}

impl NormHandle {
    pub fn name(&self) -> &'static str {
        match self {
            NormHandle::Base(_) => "base",
            NormHandle::Triple { .. } => "triple",
            NormHandle::Dual { .. } => "dual",
            NormHandle::DualTriple { .. } => "dual-triple",
        }
    }

    pub fn norm_sq(&self, x: &SparseVector) -> Result<Interval> {
        match self {
            NormHandle::Base(spec) => Ok(Interval::point(primal::norm_sq(spec, x)?.norm_sq)),
            NormHandle::Triple { alpha, k } => Ok(Interval::point(triple_norm_sq(alpha, *k, x)?)),
            NormHandle::Dual { spec, options } => Ok(dual_norm(spec, x, options)?.interval().square()),
            NormHandle::DualTriple { spec, options } => Ok(dual_norm(spec, x, options)?
                .interval()
                .square()
                .add(&Interval::point(day_norm_sq(x)))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingleNorm {
    pub index: u64,
    pub norm_sq: Interval,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaEntry {
    pub m: u64,
    pub n: u64,
    pub norm_sq_sum: Interval,
    pub delta: Interval,
}

/// A claim the scenario checks against its own output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub claim: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub label: String,
    pub norm: String,
    pub singles: Vec<SingleNorm>,
    /// Pairs `m < n` in sequence order.
    pub entries: Vec<DeltaEntry>,
    pub checks: Vec<Check>,
}

impl DeltaReport {
    /// `Δ ≤ 0` is consistent with every bracket.
    pub fn nonpositive(&self) -> bool {
        self.entries.iter().all(|e| !e.delta.lower.is_positive())
    }

    pub fn all_checks_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    /// Rows `m,n,norm_sq_sum,delta_lower,delta_upper`; bracketed sums are
    /// shown at their midpoint.
    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = String::from("m,n,norm_sq_sum,delta_lower,delta_upper\n");
        for e in &self.entries {
            let mid = (&e.norm_sq_sum.lower + &e.norm_sq_sum.upper) / int(2);
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                e.m,
                e.n,
                decimal(&mid, digits),
                decimal(&e.delta.lower, digits),
                decimal(&e.delta.upper, digits)
            ));
        }
        out
    }

    fn check(&mut self, claim: impl Into<String>, holds: bool) {
        self.checks.push(Check {
            claim: claim.into(),
            holds,
        });
    }
}

/// `Δ(m,n)` for every pair of the labelled sequence `xs`.
pub fn delta_matrix(label: &str, handle: &NormHandle, xs: &[(u64, SparseVector)]) -> Result<DeltaReport> {
    let singles: Vec<Interval> = par::map(xs, |(_, x)| handle.norm_sq(x))
        .into_iter()
        .collect::<Result<_>>()?;
    let pairs: Vec<(usize, usize)> = (0..xs.len())
        .flat_map(|a| (a + 1..xs.len()).map(move |b| (a, b)))
        .collect();
    let sums: Vec<Interval> = par::map(&pairs, |&(a, b)| handle.norm_sq(&xs[a].1.add(&xs[b].1)?))
        .into_iter()
        .collect::<Result<_>>()?;
    let two = int(2);
    let entries = pairs
        .iter()
        .zip(sums)
        .map(|(&(a, b), s)| {
            let delta = Interval {
                lower: &s.lower - &two * (&singles[a].upper + &singles[b].upper),
                upper: &s.upper - &two * (&singles[a].lower + &singles[b].lower),
            };
            DeltaEntry {
                m: xs[a].0,
                n: xs[b].0,
                norm_sq_sum: s,
                delta,
            }
        })
        .collect();
    let mut report = DeltaReport {
        label: label.to_string(),
        norm: handle.name().to_string(),
        singles: xs
            .iter()
            .zip(singles)
            .map(|((index, _), norm_sq)| SingleNorm {
                index: *index,
                norm_sq,
            })
            .collect(),
        entries,
        checks: Vec::new(),
    };
    let ok = report.nonpositive();
    report.check("delta <= 0 for every pair", ok);
    Ok(report)
}

fn unit_nat(n: u64) -> SparseVector {
    nat_vector(&[(n, 1)])
}

/// `e_n`, `n = 4..=9`, under the Schreier norm: every pair sums to norm 2.
pub fn scenario_schreier_flat() -> Result<DeltaReport> {
    let xs: Vec<(u64, SparseVector)> = (4..=9).map(|n| (n, unit_nat(n))).collect();
    let mut report = delta_matrix("schreier-flat", &NormHandle::Base(FamilySpec::schreier1()), &xs)?;
    let flat = report.entries.iter().all(|e| e.norm_sq_sum == Interval::point(int(4)) && e.delta.upper.is_zero());
    report.check("||e_m + e_n||^2 = 4 and delta = 0", flat);
    Ok(report)
}

/// Unit vectors on the branches `(1, n)` of depth 2, at pairwise distance 2.
pub fn separation_sequence(count: u64) -> Vec<(u64, SparseVector)> {
    (1..=count)
        .map(|n| {
            let p = Point::tuple(&[1, n as u32]);
            let x = SparseVector::from_pairs(Space::Tuple { depth: 2 }, [(p, int(1))]).expect("tuple point");
            (n, x)
        })
        .collect()
}

/// The distance-2 sequence for `α = 1, k = 1` under the base norm (`Δ = 0`)
/// and under the renorm (`Δ = −2`).
pub fn scenario_separation(count: u64) -> Result<Vec<DeltaReport>> {
    let xs = separation_sequence(count);
    let one = Ordinal::finite(1);
    let base = NormHandle::Base(FamilySpec::transfinite(one.clone(), 1, 2)?);
    let triple = NormHandle::Triple { alpha: one, k: 1 };
    let mut reports = Vec::new();
    for (handle, expected) in [(base, int(0)), (triple, int(-2))] {
        let mut r = delta_matrix("separation", &handle, &xs)?;
        let holds = r.entries.iter().all(|e| e.delta == Interval::point(expected.clone()));
        r.check(format!("delta = {expected} for every pair"), holds);
        reports.push(r);
    }
    Ok(reports)
}

/// `y_n = e₃* + e_n*`, `n = 4..=9`, under the Schreier dual norm, or with
/// `day` set, under the dual norm plus the Day norm.
pub fn scenario_dual_non2r(day: bool, options: &DualOptions) -> Result<DeltaReport> {
    let xs: Vec<(u64, SparseVector)> = (4..=9).map(|n| (n, nat_vector(&[(3, 1), (n, 1)]))).collect();
    let spec = FamilySpec::schreier1();
    let options = options.clone();
    if !day {
        let mut r = delta_matrix("dual-non2r", &NormHandle::Dual { spec, options }, &xs)?;
        let singles = r.singles.iter().all(|s| s.norm_sq.contains(&int(1)));
        let sums = r.entries.iter().all(|e| e.norm_sq_sum.contains(&int(4)));
        let zero = r.entries.iter().all(|e| e.delta.contains(&int(0)));
        r.check("||y_n||_* = 1", singles);
        r.check("||y_m + y_n||_* = 2", sums);
        r.check("delta brackets contain 0", zero);
        return Ok(r);
    }
    let mut r = delta_matrix("dual-non2r", &NormHandle::DualTriple { spec, options }, &xs)?;
    // the dual parts cancel, leaving the Day defect 69/64 - 2 (5/16 + 5/16)
    let defect = ratio(-11, 64);
    let holds = r.entries.iter().all(|e| e.delta.contains(&defect) && e.delta.upper.is_negative());
    r.check("delta = -11/64, bounded away from 0", holds);
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma42Row {
    pub n: u64,
    /// Rational stand-in for `n^{-1/2}`, exact when `n` is a square.
    #[serde(with = "crate::exact::rational_serde")]
    pub scale: Rational,
    /// Bracket of `‖y + δ y_n‖_*`.
    pub value: Interval,
    /// Bracket of `|‖y + δ y_n‖_* − (1+δ²)^{1/2}|`.
    pub distance: Interval,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma42Report {
    #[serde(with = "crate::exact::rational_serde")]
    pub delta: Rational,
    /// Bracket of `(1+δ²)^{1/2}`.
    pub limit: Interval,
    /// The blocks `F_i = {2i+2, 2i+3}` carrying `y_n`.
    pub sets: Vec<Vec<u64>>,
    pub rows: Vec<Lemma42Row>,
    /// Each distance is at most the previous one, up to bracket widths.
    pub non_increasing: bool,
}

impl Lemma42Report {
    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = String::from("n,value_lower,value_upper,distance_lower,distance_upper\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n,
                decimal(&r.value.lower, digits),
                decimal(&r.value.upper, digits),
                decimal(&r.distance.lower, digits),
                decimal(&r.distance.upper, digits)
            ));
        }
        out
    }
}

pub const LEMMA42_MAX_N: u64 = 8;

/// `y = e₃*` against `y_n = r_n Σ_{i≤n} 1_{F_i}` with `r_n ≈ n^{-1/2}`, over
/// the Schreier dual norm, for `n = 1..=n_max`.
pub fn scenario_lemma42(delta: &Rational, n_max: u64, options: &DualOptions) -> Result<Lemma42Report> {
    if !delta.is_positive() || delta > &int(4) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0, 4], got {delta}")));
    }
    if n_max == 0 || n_max > LEMMA42_MAX_N {
        return Err(Error::InvalidArgument(format!(
            "n_max must lie in 1..={LEMMA42_MAX_N}, got {n_max}"
        )));
    }
    let spec = FamilySpec::schreier1();
    let options = DualOptions {
        guard: options.guard.max(1 + 2 * n_max as usize),
        ..options.clone()
    };
    let limit_sq = Rational::one() + delta * delta;
    let (lim_lo, lim_hi) = sqrt_bounds(&limit_sq, 64);
    let sets: Vec<Vec<u64>> = (1..=n_max).map(|i| vec![2 * i + 2, 2 * i + 3]).collect();
    let ns: Vec<u64> = (1..=n_max).collect();
    let rows: Vec<Lemma42Row> = par::map(&ns, |&n| -> Result<Lemma42Row> {
        let scale = sqrt_bounds(&ratio(1, n as i64), 20).0;
        let coeff = delta * &scale;
        let mut pairs: Vec<(Point, Rational)> = vec![(Point::Nat(3), int(1))];
        for set in &sets[..n as usize] {
            pairs.extend(set.iter().map(|&p| (Point::Nat(p), coeff.clone())));
        }
        let y = SparseVector::from_pairs(Space::Nat, pairs)?;
        let value = dual_norm(&spec, &y, &options)?.interval();
        let zero = Rational::zero();
        let lower = (&value.lower - &lim_hi).max(&lim_lo - &value.upper).max(zero);
        let upper = (&value.upper - &lim_lo).max(&lim_hi - &value.lower);
        Ok(Lemma42Row {
            n,
            scale,
            value,
            distance: Interval { lower, upper },
        })
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let non_increasing = rows.windows(2).all(|w| w[1].distance.lower <= w[0].distance.upper);
    Ok(Lemma42Report {
        delta: delta.clone(),
        limit: Interval {
            lower: lim_lo,
            upper: lim_hi,
        },
        sets,
        rows,
        non_increasing,
    })
}
