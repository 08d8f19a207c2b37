use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::point::{Point, Space};
use super::validate::validate_explicit;
use crate::error::{Error, Result};
use crate::ordinal::Ordinal;

/// Parameters of a transfinite tree family `F_α` on depth-`depth` branches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transfinite {
    pub alpha: Ordinal,
    pub depth: usize,
    /// Coordinates range over `1..=alphabet`; `None` is unbounded.
    pub alphabet: Option<u32>,
    /// Restrict sets of two or more points to branch-valid points with sharp at least 3.
    pub kt: bool,
}

/// A finite, validated listing of point sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Explicit {
    ground: Vec<Point>,
    sets: HashSet<Vec<Point>>,
}

impl Explicit {
    /// Validates heredity and singleton coverage of `ground`.
    pub fn new(sets: Vec<Vec<Point>>, ground: Option<Vec<Point>>) -> Result<Self> {
        let sets: Vec<Vec<Point>> = sets.into_iter().map(normalize).collect();
        let ground = match ground {
            Some(g) => normalize(g),
            None => normalize(sets.iter().flatten().cloned().collect()),
        };
        if let Some(first) = ground.first() {
            let space = first.space();
            if let Some(bad) = ground.iter().find(|p| p.space() != space) {
                return Err(Error::PointMismatch(format!(
                    "{bad} does not live in {space}"
                )));
            }
        }
        let report = validate_explicit(&sets, &ground);
        if !report.is_valid() {
            return Err(Error::InvalidSpec(format!(
                "explicit listing is not a valid family: {}",
                report.summary()
            )));
        }
        Ok(Explicit {
            ground,
            sets: sets.into_iter().collect(),
        })
    }

    pub fn ground(&self) -> &[Point] {
        &self.ground
    }

    pub fn contains(&self, normalized: &[Point]) -> bool {
        normalized.len() <= 1 || self.sets.contains(normalized)
    }

    /// Listed sets in a canonical order (size, then lexicographic).
    pub fn sets(&self) -> Vec<Vec<Point>> {
        let mut v: Vec<Vec<Point>> = self.sets.iter().cloned().collect();
        v.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        v
    }

    fn space(&self) -> Space {
        self.ground.first().map_or(Space::Nat, Point::space)
    }
}

pub(crate) fn normalize(mut set: Vec<Point>) -> Vec<Point> {
    set.sort();
    set.dedup();
    set
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyKind {
    Explicit(Explicit),
    Schreier1,
    Transfinite(Transfinite),
}

/// Declarative description of a compact hereditary family `F^(k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct FamilySpec {
    kind: FamilyKind,
    k: u32,
    ordered: bool,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, k: u32, ordered: bool) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidSpec("superscript k must be at least 1".into()));
        }
        let space = kind_space(&kind);
        if space == Space::Nat && k != 1 {
            return Err(Error::InvalidSpec(
                "superscript k > 1 needs tuple points (sharp is undefined on naturals)".into(),
            ));
        }
        if ordered && space != Space::Nat {
            return Err(Error::InvalidSpec(
                "ordered blocks are only defined on natural ground sets".into(),
            ));
        }
        if let FamilyKind::Transfinite(t) = &kind {
            if t.depth == 0 {
                return Err(Error::InvalidSpec("depth must be at least 1".into()));
            }
            if t.alphabet == Some(0) {
                return Err(Error::InvalidSpec("alphabet must be at least 1".into()));
            }
        }
        Ok(FamilySpec { kind, k, ordered })
    }

    pub fn schreier1() -> Self {
        FamilySpec {
            kind: FamilyKind::Schreier1,
            k: 1,
            ordered: false,
        }
    }

    /// Schreier family with Baernstein's ordered-blocks constraint.
    pub fn schreier1_ordered() -> Self {
        FamilySpec {
            kind: FamilyKind::Schreier1,
            k: 1,
            ordered: true,
        }
    }

    pub fn transfinite(alpha: Ordinal, k: u32, depth: usize) -> Result<Self> {
        Self::new(
            FamilyKind::Transfinite(Transfinite {
                alpha,
                depth,
                alphabet: None,
                kt: false,
            }),
            k,
            false,
        )
    }

    /// The branch-constrained family `F_1` used for the Kutzarova–Troyanski space.
    pub fn kt(depth: usize) -> Result<Self> {
        Self::new(
            FamilyKind::Transfinite(Transfinite {
                alpha: Ordinal::finite(1),
                depth,
                alphabet: None,
                kt: true,
            }),
            1,
            false,
        )
    }

    pub fn explicit(sets: Vec<Vec<Point>>, ground: Option<Vec<Point>>) -> Result<Self> {
        Self::new(FamilyKind::Explicit(Explicit::new(sets, ground)?), 1, false)
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn ordered(&self) -> bool {
        self.ordered
    }

    pub fn with_k(&self, k: u32) -> Result<Self> {
        Self::new(self.kind.clone(), k, self.ordered)
    }

    pub fn with_ordered(&self, ordered: bool) -> Result<Self> {
        Self::new(self.kind.clone(), self.k, ordered)
    }

    pub fn space(&self) -> Space {
        kind_space(&self.kind)
    }

    pub fn transfinite_params(&self) -> Option<&Transfinite> {
        match &self.kind {
            FamilyKind::Transfinite(t) => Some(t),
            _ => None,
        }
    }

    /// Checks that `p` is a legal point of this family's ground set.
    pub fn check_point(&self, p: &Point) -> Result<()> {
        match (&self.kind, p) {
            (FamilyKind::Schreier1, Point::Nat(n)) => {
                if *n == 0 {
                    Err(Error::PointMismatch("naturals start at 1".into()))
                } else {
                    Ok(())
                }
            }
            (FamilyKind::Transfinite(t), Point::Tuple(v)) => {
                if v.len() != t.depth {
                    return Err(Error::PointMismatch(format!(
                        "{p} has depth {}, family depth is {}",
                        v.len(),
                        t.depth
                    )));
                }
                if let Some(c) = v
                    .iter()
                    .find(|&&c| c == 0 || t.alphabet.is_some_and(|a| c > a))
                {
                    return Err(Error::PointMismatch(format!(
                        "coordinate {c} of {p} is outside the alphabet"
                    )));
                }
                Ok(())
            }
            (FamilyKind::Explicit(e), _) => {
                if p.space() == e.space() || e.ground.is_empty() {
                    Ok(())
                } else {
                    Err(Error::PointMismatch(format!(
                        "{p} does not live in {}",
                        e.space()
                    )))
                }
            }
            _ => Err(Error::PointMismatch(format!(
                "{p} does not live in {}",
                self.space()
            ))),
        }
    }
}

fn kind_space(kind: &FamilyKind) -> Space {
    match kind {
        FamilyKind::Schreier1 => Space::Nat,
        FamilyKind::Transfinite(t) => Space::Tuple { depth: t.depth },
        FamilyKind::Explicit(e) => e.space(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum Alphabet {
    Size(u32),
    Named(String),
}

/// JSON shape of a family spec.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<Ordinal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alphabet: Option<Alphabet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kt: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ordered: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sets: Option<Vec<Vec<Point>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ground: Option<Vec<Point>>,
}

impl TryFrom<RawSpec> for FamilySpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let k = raw.k.unwrap_or(1);
        let ordered = raw.ordered.unwrap_or(false);
        let kind = match raw.kind.as_str() {
            "schreier1" => FamilyKind::Schreier1,
            "explicit" => {
                let sets = raw
                    .sets
                    .ok_or_else(|| Error::InvalidSpec("explicit family needs \"sets\"".into()))?;
                FamilyKind::Explicit(Explicit::new(sets, raw.ground)?)
            }
            "transfinite" => {
                let alphabet = match raw.alphabet {
                    None => None,
                    Some(Alphabet::Size(a)) => Some(a),
                    Some(Alphabet::Named(s)) if s == "unbounded" => None,
                    Some(Alphabet::Named(s)) => {
                        return Err(Error::InvalidSpec(format!("unknown alphabet {s:?}")))
                    }
                };
                FamilyKind::Transfinite(Transfinite {
                    alpha: raw.alpha.unwrap_or_else(|| Ordinal::finite(1)),
                    depth: raw
                        .depth
                        .ok_or_else(|| Error::InvalidSpec("transfinite family needs \"depth\"".into()))?,
                    alphabet,
                    kt: raw.kt.unwrap_or(false),
                })
            }
            other => return Err(Error::InvalidSpec(format!("unknown family kind {other:?}"))),
        };
        FamilySpec::new(kind, k, ordered)
    }
}

impl From<FamilySpec> for RawSpec {
    fn from(spec: FamilySpec) -> Self {
        let mut raw = RawSpec {
            kind: String::new(),
            alpha: None,
            k: Some(spec.k),
            depth: None,
            alphabet: None,
            kt: None,
            ordered: Some(spec.ordered),
            sets: None,
            ground: None,
        };
        match spec.kind {
            FamilyKind::Schreier1 => raw.kind = "schreier1".into(),
            FamilyKind::Explicit(e) => {
                raw.kind = "explicit".into();
                raw.sets = Some(e.sets());
                raw.ground = Some(e.ground);
            }
            FamilyKind::Transfinite(t) => {
                raw.kind = "transfinite".into();
                raw.alpha = Some(t.alpha);
                raw.depth = Some(t.depth);
                raw.alphabet = Some(match t.alphabet {
                    Some(a) => Alphabet::Size(a),
                    None => Alphabet::Named("unbounded".into()),
                });
                raw.kt = Some(t.kt);
            }
        }
        raw
    }
}

/// Convenience for building point sets in tests and examples.
pub fn nat_set(values: &[u64]) -> Vec<Point> {
    values.iter().map(|&n| Point::Nat(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip_for_every_kind() {
        let specs = [
            r#"{"kind":"schreier1"}"#,
            r#"{"kind":"schreier1","ordered":true}"#,
            r#"{"kind":"transfinite","alpha":"w*1+2","k":2,"depth":4,"alphabet":3,"kt":false}"#,
            r#"{"kind":"transfinite","alpha":"w","depth":3,"alphabet":"unbounded","kt":true}"#,
            r#"{"kind":"explicit","sets":[[],[1],[2],[1,2]]}"#,
        ];
        for text in specs {
            let spec: FamilySpec = serde_json::from_str(text).unwrap();
            let back: FamilySpec =
                serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
            assert_eq!(spec, back, "{text}");
        }
    }

    #[test]
    fn rejects_invalid_specs() {
        let bad = [
            r#"{"kind":"schreier1","k":2}"#,
            r#"{"kind":"schreier1","k":0}"#,
            r#"{"kind":"transfinite","alpha":"w"}"#,
            r#"{"kind":"transfinite","depth":3,"ordered":true}"#,
            r#"{"kind":"explicit","sets":[[1],[1,2]]}"#,
            r#"{"kind":"bogus"}"#,
            r#"{"kind":"transfinite","depth":3,"alphabet":"lots"}"#,
        ];
        for text in bad {
            assert!(serde_json::from_str::<FamilySpec>(text).is_err(), "{text}");
        }
    }

    #[test]
    fn point_checks() {
        let spec: FamilySpec =
            serde_json::from_str(r#"{"kind":"transfinite","depth":3,"alphabet":2}"#).unwrap();
        assert!(spec.check_point(&Point::tuple(&[1, 2, 1])).is_ok());
        assert!(spec.check_point(&Point::tuple(&[1, 3, 1])).is_err());
        assert!(spec.check_point(&Point::tuple(&[1, 2])).is_err());
        assert!(spec.check_point(&Point::Nat(2)).is_err());
        assert!(FamilySpec::schreier1().check_point(&Point::Nat(0)).is_err());
    }
}
