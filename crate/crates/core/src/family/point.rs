use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A ground-set element: a positive natural, or a branch of `S^ℕ`
/// truncated to a fixed depth.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Nat(u64),
    Tuple(Vec<u32>),
}

/// Which kind of points a vector or family lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Space {
    Nat,
    Tuple { depth: usize },
}

impl Point {
    pub fn tuple(values: &[u32]) -> Self {
        Point::Tuple(values.to_vec())
    }

    pub fn space(&self) -> Space {
        match self {
            Point::Nat(_) => Space::Nat,
            Point::Tuple(v) => Space::Tuple { depth: v.len() },
        }
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self {
            Point::Nat(n) => Some(*n),
            Point::Tuple(_) => None,
        }
    }

    pub fn as_tuple(&self) -> Option<&[u32]> {
        match self {
            Point::Tuple(v) => Some(v),
            Point::Nat(_) => None,
        }
    }

    /// `p(1) = 1` and `p(i) ∈ {1, …, i-1}` for `i ≥ 2`.
    pub fn is_branch_valid(&self) -> bool {
        match self {
            Point::Nat(_) => false,
            Point::Tuple(v) => v.iter().enumerate().all(|(i, &c)| {
                if i == 0 {
                    c == 1
                } else {
                    c >= 1 && c as usize <= i
                }
            }),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Nat(n) => write!(f, "{n}"),
            Point::Tuple(v) => {
                f.write_str("(")?;
                for (i, c) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Nat => f.write_str("nat"),
            Space::Tuple { depth } => write!(f, "tuple(depth {depth})"),
        }
    }
}

/// First index (1-based) where two branches disagree.
pub fn distance(p: &Point, q: &Point) -> Result<u32> {
    match (p, q) {
        (Point::Tuple(a), Point::Tuple(b)) => {
            if a.len() != b.len() {
                return Err(Error::PointMismatch(format!(
                    "depths {} and {} differ",
                    a.len(),
                    b.len()
                )));
            }
            a.iter()
                .zip(b)
                .position(|(x, y)| x != y)
                .map(|i| i as u32 + 1)
                .ok_or(Error::IdenticalPoints)
        }
        (Point::Nat(_), Point::Nat(_)) => Err(Error::PointMismatch(
            "distance is only defined for tuple points".to_string(),
        )),
        _ => Err(Error::PointMismatch(format!("{p} and {q} are of different kinds"))),
    }
}

/// Minimum pairwise distance of a set of at least two branches.
pub fn sharp(points: &[Point]) -> Result<u32> {
    let mut distinct = points.to_vec();
    distinct.sort();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::SharpUndefined);
    }
    let mut best = u32::MAX;
    for (i, p) in distinct.iter().enumerate() {
        for q in &distinct[i + 1..] {
            best = best.min(distance(p, q)?);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: &[u32]) -> Point {
        Point::tuple(v)
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(&t(&[1, 1, 2]), &t(&[1, 1, 3])).unwrap(), 3);
        assert_eq!(distance(&t(&[1, 2, 2]), &t(&[2, 2, 2])).unwrap(), 1);
        assert_eq!(distance(&t(&[1, 1, 1]), &t(&[1, 2, 1])).unwrap(), 2);
    }

    #[test]
    fn distance_errors() {
        assert_eq!(
            distance(&t(&[1, 1]), &t(&[1, 1])),
            Err(Error::IdenticalPoints)
        );
        assert!(matches!(
            distance(&Point::Nat(1), &Point::Nat(2)),
            Err(Error::PointMismatch(_))
        ));
        assert!(matches!(
            distance(&Point::Nat(1), &t(&[1])),
            Err(Error::PointMismatch(_))
        ));
        assert!(distance(&t(&[1, 1]), &t(&[1, 1, 1])).is_err());
    }

    #[test]
    fn sharp_examples() {
        assert_eq!(sharp(&[t(&[1, 1, 2]), t(&[1, 1, 3])]).unwrap(), 3);
        // pairs: (112,113)=3, (112,121)=2, (113,121)=2
        assert_eq!(
            sharp(&[t(&[1, 1, 2]), t(&[1, 1, 3]), t(&[1, 2, 1])]).unwrap(),
            2
        );
        assert_eq!(sharp(&[t(&[1, 1, 1]), t(&[2, 1, 1])]).unwrap(), 1);
        assert_eq!(sharp(&[t(&[1, 1, 1])]), Err(Error::SharpUndefined));
        assert_eq!(
            sharp(&[t(&[1, 1, 1]), t(&[1, 1, 1])]),
            Err(Error::SharpUndefined)
        );
    }

    #[test]
    fn branch_validity() {
        assert!(t(&[1, 1, 2, 3]).is_branch_valid());
        assert!(t(&[1, 1, 1]).is_branch_valid());
        assert!(!t(&[1, 2, 1]).is_branch_valid());
        assert!(!t(&[2, 1, 1]).is_branch_valid());
        assert!(!t(&[1, 1, 3]).is_branch_valid());
        assert!(!Point::Nat(3).is_branch_valid());
    }

    #[test]
    fn json_shape() {
        assert_eq!(serde_json::to_string(&Point::Nat(4)).unwrap(), "4");
        assert_eq!(serde_json::to_string(&t(&[1, 2])).unwrap(), "[1,2]");
        let p: Point = serde_json::from_str("[3,1]").unwrap();
        assert_eq!(p, t(&[3, 1]));
    }
}
