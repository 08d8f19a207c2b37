use std::collections::HashSet;

use serde::Serialize;

use super::point::Point;
use super::spec::normalize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    MissingEmpty,
    MissingSingleton { point: Point },
    MissingSubset { set: Vec<Point>, subset: Vec<Point> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub hereditary: bool,
    pub singletons: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.hereditary && self.singletons
    }

    pub fn summary(&self) -> String {
        let shown: Vec<String> = self
            .violations
            .iter()
            .take(3)
            .map(|v| match v {
                Violation::MissingEmpty => "empty set missing".to_string(),
                Violation::MissingSingleton { point } => format!("{{{point}}} missing"),
                Violation::MissingSubset { set, subset } => {
                    format!("{} missing below {}", show(subset), show(set))
                }
            })
            .collect();
        shown.join("; ")
    }
}

fn show(set: &[Point]) -> String {
    let inner: Vec<String> = set.iter().map(|p| p.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

/// Checks closure under subsets and the presence of `∅` and every singleton
/// of `ground`. Heredity is checked one removed element at a time, which
/// suffices by induction on set size.
pub fn validate_explicit(sets: &[Vec<Point>], ground: &[Point]) -> ValidationReport {
    let listed: HashSet<Vec<Point>> = sets.iter().cloned().map(normalize).collect();
    let mut violations = Vec::new();
    let mut singletons = true;
    let mut hereditary = true;

    let mut ground = ground.to_vec();
    ground.sort();
    ground.dedup();
    for p in &ground {
        if !listed.contains(std::slice::from_ref(p)) {
            singletons = false;
            violations.push(Violation::MissingSingleton { point: p.clone() });
        }
    }

    let mut ordered: Vec<&Vec<Point>> = listed.iter().collect();
    ordered.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    if !listed.contains(&Vec::new()) {
        hereditary = false;
        violations.push(Violation::MissingEmpty);
    }
    for set in ordered {
        if set.len() < 2 {
            continue;
        }
        for i in 0..set.len() {
            let mut subset = set.clone();
            subset.remove(i);
            if !listed.contains(&subset) {
                hereditary = false;
                violations.push(Violation::MissingSubset {
                    set: set.clone(),
                    subset,
                });
            }
        }
    }
    ValidationReport {
        hereditary,
        singletons,
        violations,
    }
}
