//! Finitely supported vectors with exact rational coordinates.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{rational_serde, Rational};
use crate::family::{FamilySpec, Point, Space};

/// Coordinates are kept sorted by point and never store an explicit zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawVector", into = "RawVector")]
pub struct SparseVector {
    space: Space,
    coords: BTreeMap<Point, Rational>,
}

impl SparseVector {
    pub fn zero(space: Space) -> Self {
        SparseVector {
            space,
            coords: BTreeMap::new(),
        }
    }

    /// Builds from `(point, value)` pairs; repeated points are summed.
    pub fn from_pairs(space: Space, pairs: impl IntoIterator<Item = (Point, Rational)>) -> Result<Self> {
        let mut v = Self::zero(space);
        for (p, a) in pairs {
            if p.space() != space {
                return Err(Error::PointMismatch(format!("{p} does not live in {space}")));
            }
            let sum = v.coords.remove(&p).unwrap_or_else(Rational::zero) + a;
            if !sum.is_zero() {
                v.coords.insert(p, sum);
            }
        }
        Ok(v)
    }

    /// Unit vector `c·e_p`.
    pub fn unit(p: Point, c: Rational) -> Self {
        let space = p.space();
        Self::from_pairs(space, [(p, c)]).expect("point matches its own space")
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn get(&self, p: &Point) -> Option<&Rational> {
        self.coords.get(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, &Rational)> {
        self.coords.iter()
    }

    /// Support points in ascending order.
    pub fn support(&self) -> Vec<Point> {
        self.coords.keys().cloned().collect()
    }

    /// Coordinate values aligned with [`support`](Self::support).
    pub fn values(&self) -> Vec<Rational> {
        self.coords.values().cloned().collect()
    }

    pub fn abs(&self) -> Self {
        self.map_values(|a| a.abs())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.space);
        }
        self.map_values(|a| a * c)
    }

    fn map_values(&self, f: impl Fn(&Rational) -> Rational) -> Self {
        SparseVector {
            space: self.space,
            coords: self.coords.iter().map(|(p, a)| (p.clone(), f(a))).collect(),
        }
    }

    pub fn add(&self, other: &SparseVector) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::PointMismatch(format!(
                "cannot add vectors on {} and {}",
                self.space, other.space
            )));
        }
        Self::from_pairs(
            self.space,
            self.coords
                .iter()
                .chain(other.coords.iter())
                .map(|(p, a)| (p.clone(), a.clone())),
        )
    }

    /// Restriction to the given points.
    pub fn restrict(&self, points: &[Point]) -> Self {
        SparseVector {
            space: self.space,
            coords: points
                .iter()
                .filter_map(|p| self.coords.get(p).map(|a| (p.clone(), a.clone())))
                .collect(),
        }
    }

    pub fn is_disjoint(&self, other: &SparseVector) -> bool {
        self.coords.keys().all(|p| !other.coords.contains_key(p))
    }

    /// `Σ x_γ²`.
    pub fn l2_sq(&self) -> Rational {
        self.coords.values().map(|a| a * a).sum()
    }

    /// `Σ |x_γ|`.
    pub fn l1(&self) -> Rational {
        self.coords.values().map(|a| a.abs()).sum()
    }

    pub fn max_abs(&self) -> Rational {
        self.coords
            .values()
            .map(|a| a.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// `Σ x_γ y_γ`.
    pub fn dot(&self, other: &SparseVector) -> Rational {
        self.coords
            .iter()
            .filter_map(|(p, a)| other.coords.get(p).map(|b| a * b))
            .sum()
    }

    /// Checks every support point against the family's ground set.
    pub fn check_against(&self, spec: &FamilySpec) -> Result<()> {
        if self.space != spec.space() && !self.is_empty() {
            return Err(Error::PointMismatch(format!(
                "vector lives in {}, family in {}",
                self.space,
                spec.space()
            )));
        }
        self.coords.keys().try_for_each(|p| spec.check_point(p))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawCoord {
    point: Point,
    #[serde(with = "rational_serde")]
    value: Rational,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawVector {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    space: Option<Space>,
    coords: Vec<RawCoord>,
}

impl TryFrom<RawVector> for SparseVector {
    type Error = Error;

    fn try_from(raw: RawVector) -> Result<Self> {
        let space = match (raw.space, raw.coords.first()) {
            (Some(s), _) => s,
            (None, Some(c)) => c.point.space(),
            (None, None) => Space::Nat,
        };
        let mut seen = std::collections::BTreeSet::new();
        for c in &raw.coords {
            if !seen.insert(c.point.clone()) {
                return Err(Error::InvalidArgument(format!("point {} listed twice", c.point)));
            }
        }
        Self::from_pairs(space, raw.coords.into_iter().map(|c| (c.point, c.value)))
    }
}

impl From<SparseVector> for RawVector {
    fn from(v: SparseVector) -> Self {
        RawVector {
            space: Some(v.space),
            coords: v
                .coords
                .into_iter()
                .map(|(point, value)| RawCoord { point, value })
                .collect(),
        }
    }
}

/// `Σ c_i e_{n_i}` on the naturals, for tests and scenarios.
pub fn nat_vector(entries: &[(u64, i64)]) -> SparseVector {
    SparseVector::from_pairs(
        Space::Nat,
        entries
            .iter()
            .map(|&(n, c)| (Point::Nat(n), Rational::from_integer(c.into()))),
    )
    .expect("nat points")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};

    #[test]
    fn zeros_are_dropped_and_duplicates_summed() {
        let v = nat_vector(&[(4, 1), (5, 0), (4, 2)]);
        assert_eq!(v.len(), 1);
        assert_eq!(v.get(&Point::Nat(4)), Some(&int(3)));
        let w = nat_vector(&[(4, 1), (4, -1)]);
        assert!(w.is_empty());
    }

    #[test]
    fn json_roundtrip() {
        let text = r#"{"space":{"kind":"nat"},"coords":[{"point":4,"value":"3/2"},{"point":5,"value":"-1"}]}"#;
        let v: SparseVector = serde_json::from_str(text).unwrap();
        assert_eq!(v.get(&Point::Nat(4)), Some(&ratio(3, 2)));
        let back: SparseVector = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(v, back);

        let tuples = r#"{"coords":[{"point":[1,1,2],"value":"1"}]}"#;
        let t: SparseVector = serde_json::from_str(tuples).unwrap();
        assert_eq!(t.space(), Space::Tuple { depth: 3 });
    }

    #[test]
    fn json_rejects_mixed_or_repeated_points() {
        let mixed = r#"{"coords":[{"point":4,"value":"1"},{"point":[1,2],"value":"1"}]}"#;
        assert!(serde_json::from_str::<SparseVector>(mixed).is_err());
        let twice = r#"{"coords":[{"point":4,"value":"1"},{"point":4,"value":"2"}]}"#;
        assert!(serde_json::from_str::<SparseVector>(twice).is_err());
    }

    #[test]
    fn arithmetic() {
        let x = nat_vector(&[(1, 2), (2, -3)]);
        let y = nat_vector(&[(2, 3), (7, 1)]);
        let s = x.add(&y).unwrap();
        assert_eq!(s, nat_vector(&[(1, 2), (7, 1)]));
        assert_eq!(x.l2_sq(), int(13));
        assert_eq!(x.l1(), int(5));
        assert_eq!(x.dot(&y), int(-9));
        assert!(!x.is_disjoint(&y));
        assert_eq!(x.max_abs(), int(3));
    }
}
