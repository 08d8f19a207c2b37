//! Compact hereditary families: Schreier `S₁`, explicit listings, and the
//! transfinite tree families `F_α^(k)` on truncated branches.

mod point;
mod spec;
pub mod table;
mod validate;

pub use point::{distance, sharp, Point, Space};
pub use spec::{nat_set, Explicit, FamilyKind, FamilySpec, Transfinite};
pub use table::TreeTables;
pub use validate::{validate_explicit, ValidationReport, Violation};

use crate::error::{Error, Result};

/// Default cap on set sizes for membership and trace enumeration.
pub const DEFAULT_MEMBER_GUARD: usize = 12;

/// Decides `A ∈ F^(k)` for the family described by `spec`.
pub fn member(spec: &FamilySpec, set: &[Point]) -> Result<bool> {
    member_with_guard(spec, set, DEFAULT_MEMBER_GUARD)
}

pub fn member_with_guard(spec: &FamilySpec, set: &[Point], guard: usize) -> Result<bool> {
    let ground = table::prepare_ground(spec, set)?;
    if ground.len() <= 1 {
        return Ok(true);
    }
    match spec.kind() {
        FamilyKind::Schreier1 => {
            let min = ground[0].as_nat().expect("checked nat point");
            return Ok(ground.len() as u64 <= min);
        }
        FamilyKind::Explicit(e) => {
            let listed = e.contains(&ground);
            return Ok(listed && (spec.k() <= 1 || sharp(&ground)? >= spec.k()));
        }
        FamilyKind::Transfinite(_) => {}
    }
    if ground.len() > guard {
        return Err(Error::GuardExceeded {
            what: "membership query",
            size: ground.len(),
            guard,
        });
    }
    let table = table::admissible_table(spec, &ground)?;
    Ok(table[table.len() - 1])
}

/// All admissible subsets of `ground`, ordered by size then lexicographically.
pub fn family_trace(spec: &FamilySpec, ground: &[Point], guard: usize) -> Result<Vec<Vec<Point>>> {
    let ground = table::prepare_ground(spec, ground)?;
    if ground.len() > guard {
        return Err(Error::GuardExceeded {
            what: "trace ground set",
            size: ground.len(),
            guard,
        });
    }
    let table = table::admissible_table(spec, &ground)?;
    let mut sets: Vec<Vec<Point>> = table
        .iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(s, _)| table::subset_points(&ground, s))
        .collect();
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(sets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::Ordinal;
    use proptest::prelude::*;

    fn t(v: &[u32]) -> Point {
        Point::tuple(v)
    }

    fn tf(alpha: &str, k: u32, depth: usize) -> FamilySpec {
        FamilySpec::transfinite(alpha.parse().unwrap(), k, depth).unwrap()
    }

    #[test]
    fn schreier_membership() {
        let s = FamilySpec::schreier1();
        assert!(member(&s, &nat_set(&[4, 5])).unwrap());
        assert!(!member(&s, &nat_set(&[1, 2])).unwrap());
        assert!(member(&s, &nat_set(&[3, 7, 9])).unwrap());
        assert!(!member(&s, &nat_set(&[3, 7, 9, 10])).unwrap());
        assert!(member(&s, &nat_set(&[])).unwrap());
        assert!(member(&s, &nat_set(&[1])).unwrap());
    }

    #[test]
    fn successor_membership_examples() {
        let f1 = tf("1", 1, 3);
        assert!(member(&f1, &[t(&[1, 1, 2]), t(&[1, 1, 3])]).unwrap());
        assert!(!member(&f1, &[t(&[1, 2, 2]), t(&[2, 2, 2])]).unwrap());
    }

    #[test]
    fn point_mismatch_is_an_error() {
        let f1 = tf("1", 1, 3);
        assert!(member(&f1, &[Point::Nat(3), t(&[1, 1, 1])]).is_err());
        assert!(member(&FamilySpec::schreier1(), &[t(&[1])]).is_err());
    }

    #[test]
    fn guard_applies_to_tree_families() {
        let f = tf("w", 1, 2);
        let big: Vec<Point> = (1..=13).map(|i| t(&[1, i])).collect();
        assert!(matches!(
            member(&f, &big),
            Err(Error::GuardExceeded { .. })
        ));
        assert!(member_with_guard(&f, &big, 13).is_ok());
    }

    #[test]
    fn trace_examples() {
        let trace = family_trace(&FamilySpec::schreier1(), &nat_set(&[1, 2, 3]), 12).unwrap();
        assert_eq!(
            trace,
            vec![
                nat_set(&[]),
                nat_set(&[1]),
                nat_set(&[2]),
                nat_set(&[3]),
                nat_set(&[2, 3])
            ]
        );
        let ground = [t(&[1, 1]), t(&[1, 2]), t(&[2, 1])];
        let trace = family_trace(&tf("0", 1, 2), &ground, 12).unwrap();
        assert_eq!(trace.len(), 4);
        let pq = [t(&[1, 1]), t(&[2, 1])];
        let trace = family_trace(&tf("1", 2, 2), &pq, 12).unwrap();
        assert_eq!(trace.len(), 3);
    }

    #[test]
    fn schreier_trace_on_six_points_is_a_valid_family() {
        let ground = nat_set(&[1, 2, 3, 4, 5, 6]);
        let trace = family_trace(&FamilySpec::schreier1(), &ground, 12).unwrap();
        let report = validate_explicit(&trace, &ground);
        assert!(report.is_valid(), "{report:?}");
    }

    #[test]
    fn explicit_membership_and_superscript() {
        let spec = FamilySpec::explicit(
            vec![nat_set(&[]), nat_set(&[1]), nat_set(&[2]), nat_set(&[3]), nat_set(&[1, 3])],
            None,
        )
        .unwrap();
        assert!(member(&spec, &nat_set(&[1, 3])).unwrap());
        assert!(!member(&spec, &nat_set(&[1, 2])).unwrap());
        assert!(member(&spec, &nat_set(&[9])).unwrap());

        let tuples = FamilySpec::explicit(
            vec![vec![], vec![t(&[1, 1])], vec![t(&[1, 2])], vec![t(&[1, 1]), t(&[1, 2])]],
            None,
        )
        .unwrap();
        assert!(member(&tuples, &[t(&[1, 1]), t(&[1, 2])]).unwrap());
        assert!(!member(&tuples.with_k(3).unwrap(), &[t(&[1, 1]), t(&[1, 2])]).unwrap());
    }

    #[test]
    fn kt_family_requires_valid_branches() {
        let kt = FamilySpec::kt(4).unwrap();
        // both valid, first disagreement at index 3
        assert!(member(&kt, &[t(&[1, 1, 1, 1]), t(&[1, 1, 2, 1])]).unwrap());
        // three points, sharp 3: allowed (|A| <= sharp)
        assert!(member(&kt, &[t(&[1, 1, 1, 1]), t(&[1, 1, 2, 1]), t(&[1, 1, 2, 2])]).unwrap());
        // four points with sharp 3
        assert!(!member(
            &kt,
            &[t(&[1, 1, 1, 1]), t(&[1, 1, 1, 2]), t(&[1, 1, 2, 1]), t(&[1, 1, 2, 2])]
        )
        .unwrap());
        // invalid branch point
        assert!(!member(&kt, &[t(&[1, 2, 1, 1]), t(&[1, 1, 1, 1])]).unwrap());
        // singletons of invalid points still belong
        assert!(member(&kt, &[t(&[2, 2, 2, 2])]).unwrap());
    }

    // depth-3 branches over alphabet {1,2,3}
    fn arb_set(max: usize) -> impl Strategy<Value = Vec<Point>> {
        proptest::collection::btree_set(proptest::collection::vec(1u32..4, 3), 0..=max)
            .prop_map(|s| s.into_iter().map(Point::Tuple).collect())
    }

    fn arb_alpha() -> impl Strategy<Value = Ordinal> {
        prop::sample::select(vec!["0", "1", "2", "3", "w", "w+1", "w*2", "w^2"])
            .prop_map(|s| s.parse().unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn heredity(set in arb_set(7), alpha in arb_alpha(), k in 1u32..4, drop in any::<u64>()) {
            let spec = FamilySpec::transfinite(alpha, k, 3).unwrap();
            if member(&spec, &set).unwrap() && !set.is_empty() {
                let mut sub = set.clone();
                sub.remove((drop % set.len() as u64) as usize);
                prop_assert!(member(&spec, &sub).unwrap());
            }
        }

        #[test]
        fn monotone_in_superscript(set in arb_set(7), alpha in arb_alpha(), k in 1u32..4) {
            let hi = FamilySpec::transfinite(alpha.clone(), k + 1, 3).unwrap();
            let lo = FamilySpec::transfinite(alpha, k, 3).unwrap();
            if member(&hi, &set).unwrap() {
                prop_assert!(member(&lo, &set).unwrap());
            }
        }

        #[test]
        fn successor_chain_inclusion(set in arb_set(7), alpha in arb_alpha(), k in 1u32..3) {
            let lo = FamilySpec::transfinite(alpha.clone(), k, 3).unwrap();
            let hi = FamilySpec::transfinite(alpha.successor(), k, 3).unwrap();
            if member(&lo, &set).unwrap() {
                prop_assert!(member(&hi, &set).unwrap());
            }
        }

        #[test]
        fn first_successor_closed_form(set in arb_set(8)) {
            prop_assume!(set.len() >= 2);
            let spec = FamilySpec::transfinite(Ordinal::finite(1), 1, 3).unwrap();
            let closed = set.len() as u32 <= sharp(&set).unwrap();
            prop_assert_eq!(member(&spec, &set).unwrap(), closed);
        }

        #[test]
        fn sharp_is_anti_monotone(set in arb_set(8), drop in any::<u64>()) {
            prop_assume!(set.len() >= 3);
            let mut sub = set.clone();
            sub.remove((drop % set.len() as u64) as usize);
            prop_assert!(sharp(&sub).unwrap() >= sharp(&set).unwrap());
        }

        #[test]
        fn schreier_heredity(set in proptest::collection::btree_set(1u64..12, 0..8), drop in any::<u64>()) {
            let set: Vec<Point> = set.into_iter().map(Point::Nat).collect();
            let spec = FamilySpec::schreier1();
            if member(&spec, &set).unwrap() && !set.is_empty() {
                let mut sub = set.clone();
                sub.remove((drop % set.len() as u64) as usize);
                prop_assert!(member(&spec, &sub).unwrap());
            }
        }
    }
}
