//! Norming functionals `Σ ε_i a_i 1_{F_i}` over disjoint admissible sets.
//!
//! Coefficients extracted from a norm certificate are `b_i / ‖x‖`, which is
//! irrational in general, so a functional stores rational `coeff_i` and a
//! shared `scale_sq` with `a_i = coeff_i / sqrt(scale_sq)`. Dyadic
//! functionals have `scale_sq = 1`.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{exact_sqrt, is_power_of_two, rational_serde, Rational};
use crate::family::{self, FamilySpec, Point};
use crate::primal;
use crate::vector::SparseVector;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormingBlock {
    pub sign: i8,
    #[serde(with = "rational_serde")]
    pub coeff: Rational,
    pub set: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFunctional")]
pub struct NormingFunctional {
    pub blocks: Vec<NormingBlock>,
    pub dyadic: bool,
    #[serde(with = "rational_serde")]
    pub scale_sq: Rational,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFunctional {
    blocks: Vec<NormingBlock>,
    #[serde(default)]
    dyadic: bool,
    #[serde(default, with = "optional_rational")]
    scale_sq: Option<Rational>,
}

mod optional_rational {
    use super::*;
    use serde::Deserializer;

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "rational_serde")] Rational);
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

impl TryFrom<RawFunctional> for NormingFunctional {
    type Error = Error;

    fn try_from(raw: RawFunctional) -> Result<Self> {
        NormingFunctional::new(raw.blocks, raw.scale_sq.unwrap_or_else(Rational::one), raw.dyadic)
    }
}

fn is_dyadic_coeff(c: &Rational) -> bool {
    c.numer().is_one() && is_power_of_two(c.denom())
}

impl NormingFunctional {
    /// Validates signs, positivity, disjointness, `Σ a² ≤ 1` and the dyadic flag.
    pub fn new(mut blocks: Vec<NormingBlock>, scale_sq: Rational, dyadic: bool) -> Result<Self> {
        if !scale_sq.is_positive() {
            return Err(Error::MalformedFunctional("scale_sq must be positive".into()));
        }
        let mut seen = HashSet::new();
        for b in &mut blocks {
            if b.sign != 1 && b.sign != -1 {
                return Err(Error::MalformedFunctional(format!("sign {} is not ±1", b.sign)));
            }
            if !b.coeff.is_positive() {
                return Err(Error::MalformedFunctional("coefficients must be positive".into()));
            }
            if b.set.is_empty() {
                return Err(Error::MalformedFunctional("empty block".into()));
            }
            b.set.sort();
            b.set.dedup();
            for p in &b.set {
                if !seen.insert(p.clone()) {
                    return Err(Error::MalformedFunctional(format!("blocks overlap at {p}")));
                }
            }
        }
        let f = NormingFunctional {
            blocks,
            dyadic,
            scale_sq,
        };
        if f.coeff_sq_sum() > Rational::one() {
            return Err(Error::MalformedFunctional("sum of squared coefficients exceeds 1".into()));
        }
        if dyadic && !(f.scale_sq.is_one() && f.blocks.iter().all(|b| is_dyadic_coeff(&b.coeff))) {
            return Err(Error::MalformedFunctional(
                "dyadic functionals need power-of-two coefficients and scale 1".into(),
            ));
        }
        Ok(f)
    }

    /// `Σ a_i²`.
    pub fn coeff_sq_sum(&self) -> Rational {
        self.blocks.iter().map(|b| &b.coeff * &b.coeff).sum::<Rational>() / &self.scale_sq
    }

    /// Checks every block against the family.
    pub fn validate_in(&self, spec: &FamilySpec) -> Result<()> {
        for b in &self.blocks {
            if !family::member(spec, &b.set)? {
                let listed: Vec<String> = b.set.iter().map(ToString::to_string).collect();
                return Err(Error::MalformedFunctional(format!(
                    "set {{{}}} is not in the family",
                    listed.join(",")
                )));
            }
        }
        Ok(())
    }
}

/// `f(x) = numerator / sqrt(scale_sq)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Applied {
    #[serde(with = "rational_serde")]
    pub numerator: Rational,
    #[serde(with = "rational_serde")]
    pub scale_sq: Rational,
}

impl Applied {
    /// `f(x)²`.
    pub fn value_sq(&self) -> Rational {
        &self.numerator * &self.numerator / &self.scale_sq
    }

    /// The value itself when `scale_sq` is a rational square.
    pub fn exact(&self) -> Option<Rational> {
        exact_sqrt(&self.scale_sq).map(|s| &self.numerator / s)
    }

    pub fn is_negative(&self) -> bool {
        self.numerator.is_negative()
    }
}

pub fn apply_functional(f: &NormingFunctional, x: &SparseVector) -> Applied {
    let numerator = f
        .blocks
        .iter()
        .map(|b| {
            let s: Rational = b.set.iter().filter_map(|p| x.get(p)).sum();
            let signed = if b.sign < 0 { -s } else { s };
            &b.coeff * signed
        })
        .sum();
    Applied {
        numerator,
        scale_sq: f.scale_sq.clone(),
    }
}

/// Builds a 2-norming functional for `x` from its norm certificate: on each
/// certificate block the larger of the positive and negative parts, weighted
/// by the block's `ℓ1` mass. Ties pick the positive part.
pub fn extract_norming(spec: &FamilySpec, x: &SparseVector) -> Result<NormingFunctional> {
    if x.is_empty() {
        return Err(Error::ZeroVector);
    }
    let norm = primal::norm_sq(spec, x)?;
    let mut blocks = Vec::new();
    for g in &norm.certificate {
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        let (mut pos_sum, mut neg_sum) = (Rational::zero(), Rational::zero());
        for p in g {
            match x.get(p) {
                Some(v) if v.is_positive() => {
                    pos_sum += v;
                    pos.push(p.clone());
                }
                Some(v) => {
                    neg_sum -= v;
                    neg.push(p.clone());
                }
                None => {}
            }
        }
        let mass = &pos_sum + &neg_sum;
        if mass.is_zero() {
            continue;
        }
        let (sign, set) = if pos_sum >= neg_sum { (1, pos) } else { (-1, neg) };
        blocks.push(NormingBlock {
            sign,
            coeff: mass,
            set,
        });
    }
    NormingFunctional::new(blocks, norm.norm_sq, false)
}

/// Replaces each `a_i` by the largest power `2^{-s} ≤ a_i`, so `2^{-s} ∈ (a_i/2, a_i]`.
pub fn discretize_norming(f: &NormingFunctional) -> NormingFunctional {
    let blocks = f
        .blocks
        .iter()
        .map(|b| {
            let a_sq = &b.coeff * &b.coeff / &f.scale_sq;
            let mut c = Rational::one();
            while &c * &c > a_sq {
                c /= Rational::from_integer(BigInt::from(2));
            }
            NormingBlock {
                sign: b.sign,
                coeff: c,
                set: b.set.clone(),
            }
        })
        .collect();
    NormingFunctional::new(blocks, Rational::one(), true).expect("discretization keeps Σa² ≤ 1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};
    use crate::family::nat_set;
    use crate::vector::nat_vector;
    use proptest::prelude::*;

    fn block(sign: i8, coeff: Rational, set: &[u64]) -> NormingBlock {
        NormingBlock {
            sign,
            coeff,
            set: nat_set(set),
        }
    }

    #[test]
    fn apply_examples() {
        let f = NormingFunctional::new(vec![block(1, int(1), &[4, 5])], int(1), true).unwrap();
        assert_eq!(apply_functional(&f, &nat_vector(&[(4, 1), (5, 1)])).exact(), Some(int(2)));
        assert_eq!(apply_functional(&f, &nat_vector(&[])).exact(), Some(int(0)));
        let g = NormingFunctional::new(
            vec![block(1, ratio(1, 2), &[4]), block(-1, ratio(1, 2), &[5])],
            int(1),
            true,
        )
        .unwrap();
        assert_eq!(apply_functional(&g, &nat_vector(&[(4, 1), (5, -1)])).exact(), Some(int(1)));
    }

    #[test]
    fn malformed_functionals() {
        assert!(NormingFunctional::new(vec![block(2, int(1), &[4])], int(1), false).is_err());
        assert!(NormingFunctional::new(vec![block(1, int(0), &[4])], int(1), false).is_err());
        assert!(NormingFunctional::new(
            vec![block(1, int(1), &[4, 5]), block(1, ratio(1, 4), &[5])],
            int(1),
            false
        )
        .is_err());
        assert!(NormingFunctional::new(
            vec![block(1, int(1), &[4]), block(1, ratio(1, 2), &[5])],
            int(1),
            false
        )
        .is_err());
        assert!(NormingFunctional::new(vec![block(1, ratio(3, 5), &[4])], int(1), true).is_err());
        let text = r#"{"blocks":[{"sign":1,"coeff":"1/2","set":[4,5]}],"dyadic":true}"#;
        let f: NormingFunctional = serde_json::from_str(text).unwrap();
        assert_eq!(f.scale_sq, int(1));
        let bad = r#"{"blocks":[{"sign":1,"coeff":"2","set":[4]}],"dyadic":false}"#;
        assert!(serde_json::from_str::<NormingFunctional>(bad).is_err());
    }

    #[test]
    fn validate_against_family() {
        let s = FamilySpec::schreier1();
        let ok = NormingFunctional::new(vec![block(1, int(1), &[4, 5])], int(1), true).unwrap();
        assert!(ok.validate_in(&s).is_ok());
        let bad = NormingFunctional::new(vec![block(1, int(1), &[1, 2])], int(1), true).unwrap();
        assert!(bad.validate_in(&s).is_err());
    }

    #[test]
    fn extract_examples() {
        let s = FamilySpec::schreier1();
        let f = extract_norming(&s, &nat_vector(&[(4, 1), (5, 1)])).unwrap();
        assert_eq!(f.blocks, vec![block(1, int(2), &[4, 5])]);
        assert_eq!(apply_functional(&f, &nat_vector(&[(4, 1), (5, 1)])).exact(), Some(int(2)));

        let x = nat_vector(&[(4, 1), (5, -1)]);
        let f = extract_norming(&s, &x).unwrap();
        assert_eq!(f.blocks, vec![block(1, int(2), &[4])]);
        assert!(apply_functional(&f, &x).value_sq() >= int(1));

        let x = nat_vector(&[(1, 1), (2, 1)]);
        let f = extract_norming(&s, &x).unwrap();
        assert_eq!(f.blocks.len(), 2);
        assert_eq!(apply_functional(&f, &x).value_sq(), int(2));

        assert_eq!(extract_norming(&s, &nat_vector(&[])), Err(Error::ZeroVector));
    }

    #[test]
    fn discretize_examples() {
        let one = NormingFunctional::new(vec![block(1, int(1), &[4])], int(1), false).unwrap();
        assert_eq!(discretize_norming(&one).blocks[0].coeff, int(1));
        // a = 1/sqrt(2)
        let root = NormingFunctional::new(vec![block(1, int(1), &[4])], int(2), false).unwrap();
        assert_eq!(discretize_norming(&root).blocks[0].coeff, ratio(1, 2));
        let three_fifths = NormingFunctional::new(vec![block(1, ratio(3, 5), &[4])], int(1), false).unwrap();
        let d = discretize_norming(&three_fifths);
        assert_eq!(d.blocks[0].coeff, ratio(1, 2));
        assert!(d.dyadic);
    }

    fn arb_x() -> impl Strategy<Value = SparseVector> {
        proptest::collection::btree_map(1u64..12, -4i64..=4, 1..8)
            .prop_map(|m| nat_vector(&m.into_iter().collect::<Vec<_>>()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn norming_guarantees(x in arb_x()) {
            prop_assume!(!x.is_empty());
            let s = FamilySpec::schreier1();
            let n = primal::norm_sq(&s, &x).unwrap().norm_sq;
            let f = extract_norming(&s, &x).unwrap();
            prop_assert!(f.validate_in(&s).is_ok());
            let a = apply_functional(&f, &x);
            prop_assert!(!a.is_negative());
            prop_assert!(a.value_sq() * int(4) >= n.clone());
            let d = discretize_norming(&f);
            prop_assert!(d.coeff_sq_sum() <= int(1));
            let b = apply_functional(&d, &x);
            prop_assert!(b.value_sq() * int(16) >= n);
        }

        #[test]
        fn pairing_bound(x in arb_x(), z in arb_x()) {
            // a functional extracted from z, applied to x
            prop_assume!(!z.is_empty());
            let s = FamilySpec::schreier1();
            let f = extract_norming(&s, &z).unwrap();
            let a = apply_functional(&f, &x);
            let n = primal::norm_sq(&s, &x).unwrap().norm_sq;
            prop_assert!(a.value_sq() <= n * f.coeff_sq_sum());
        }
    }
}
