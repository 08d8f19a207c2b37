//! Ordinals below ω^ω in Cantor normal form.
//!
//! Literal grammar: `0` or `term (+ term)*` where a term is `w^E*C`, `w*C`
//! or `C`. Bare `w` and `w^E` are accepted as coefficient one.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// `ω^exponent · coefficient`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Term {
    pub exponent: u32,
    pub coefficient: u64,
}

/// Terms are kept with strictly decreasing exponents and positive
/// coefficients, so equal ordinals have identical term lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Ordinal {
    terms: Vec<Term>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Zero,
    Successor,
    Limit,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn finite(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            Ordinal {
                terms: vec![Term {
                    exponent: 0,
                    coefficient: n,
                }],
            }
        }
    }

    /// ω^exponent · coefficient.
    pub fn omega_power(exponent: u32, coefficient: u64) -> Self {
        Self::from_terms(vec![Term {
            exponent,
            coefficient,
        }])
        .expect("single term is canonical when the coefficient is positive")
    }

    /// Builds from `(exponent, coefficient)` terms, rejecting non-canonical input.
    pub fn from_terms(terms: Vec<Term>) -> Result<Self> {
        if terms.iter().any(|t| t.coefficient == 0) {
            return Err(Error::ZeroCoefficient);
        }
        if terms.windows(2).any(|w| w[0].exponent <= w[1].exponent) {
            return Err(Error::NonDecreasingExponents);
        }
        Ok(Ordinal { terms })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn kind(&self) -> Kind {
        match self.terms.last() {
            None => Kind::Zero,
            Some(t) if t.exponent == 0 => Kind::Successor,
            Some(_) => Kind::Limit,
        }
    }

    pub fn successor(&self) -> Ordinal {
        let mut terms = self.terms.clone();
        match terms.last_mut() {
            Some(t) if t.exponent == 0 => t.coefficient += 1,
            _ => terms.push(Term {
                exponent: 0,
                coefficient: 1,
            }),
        }
        Ordinal { terms }
    }

    pub fn predecessor(&self) -> Result<Ordinal> {
        if self.kind() != Kind::Successor {
            return Err(Error::NotSuccessor(self.to_string()));
        }
        let mut terms = self.terms.clone();
        let last = terms.last_mut().expect("successor has a trailing term");
        last.coefficient -= 1;
        if last.coefficient == 0 {
            terms.pop();
        }
        Ok(Ordinal { terms })
    }

    /// The canonical r-th element of the fundamental sequence of a limit
    /// ordinal: `prefix + ω^e·c` maps to `prefix + ω^e·(c-1) + ω^(e-1)·r`.
    pub fn fundamental_sequence(&self, r: u64) -> Result<Ordinal> {
        if self.kind() != Kind::Limit {
            return Err(Error::NotLimit(self.to_string()));
        }
        if r == 0 {
            return Err(Error::ZeroIndex);
        }
        let mut terms = self.terms.clone();
        let last = terms.pop().expect("limit has a trailing term");
        if last.coefficient > 1 {
            terms.push(Term {
                exponent: last.exponent,
                coefficient: last.coefficient - 1,
            });
        }
        terms.push(Term {
            exponent: last.exponent - 1,
            coefficient: r,
        });
        Ok(Ordinal { terms })
    }

    /// Finite value, when the ordinal is below ω.
    pub fn as_finite(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [t] if t.exponent == 0 => Some(t.coefficient),
            _ => None,
        }
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let ord = a
                .exponent
                .cmp(&b.exponent)
                .then(a.coefficient.cmp(&b.coefficient));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            match t.exponent {
                0 => write!(f, "{}", t.coefficient)?,
                1 => write!(f, "w*{}", t.coefficient)?,
                e => write!(f, "w^{}*{}", e, t.coefficient)?,
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, message: &str) -> Error {
        Error::OrdinalSyntax {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn number<T: FromStr>(&mut self) -> Result<T> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a decimal number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("digits are ascii")
            .parse()
            .map_err(|_| Error::OrdinalSyntax {
                position: start,
                message: "number out of range".to_string(),
            })
    }

    fn term(&mut self) -> Result<Term> {
        if matches!(self.peek(), Some(b'w') | Some(b'W')) {
            self.pos += 1;
            let exponent = if self.peek() == Some(b'^') {
                self.pos += 1;
                self.number::<u32>()?
            } else {
                1
            };
            let coefficient = if self.peek() == Some(b'*') {
                self.pos += 1;
                self.number::<u64>()?
            } else {
                1
            };
            Ok(Term {
                exponent,
                coefficient,
            })
        } else {
            Ok(Term {
                exponent: 0,
                coefficient: self.number()?,
            })
        }
    }
}

impl FromStr for Ordinal {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact == "0" {
            return Ok(Ordinal::zero());
        }
        let mut p = Parser {
            src: compact.as_bytes(),
            pos: 0,
        };
        let mut terms = vec![p.term()?];
        while p.peek() == Some(b'+') {
            p.pos += 1;
            terms.push(p.term()?);
        }
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ordinal::from_terms(terms)
    }
}

pub fn parse_ordinal(text: &str) -> Result<Ordinal> {
    text.parse()
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Lit {
            Text(String),
            Int(u64),
        }
        match Lit::deserialize(d)? {
            Lit::Text(t) => t.parse().map_err(serde::de::Error::custom),
            Lit::Int(n) => Ok(Ordinal::finite(n)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ord(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn parses_grammar_examples() {
        assert!(ord("0").is_zero());
        assert_eq!(
            ord("w*2+3").terms(),
            &[
                Term {
                    exponent: 1,
                    coefficient: 2
                },
                Term {
                    exponent: 0,
                    coefficient: 3
                }
            ]
        );
        assert_eq!(ord("w^2*1+w*1+4").to_string(), "w^2*1+w*1+4");
        assert_eq!(ord("w"), ord("w*1"));
        assert_eq!(ord("w^3"), Ordinal::omega_power(3, 1));
    }

    #[test]
    fn rejects_bad_literals() {
        assert_eq!(ord_err("w+w^2"), Error::NonDecreasingExponents);
        assert_eq!(ord_err("w*1+w*2"), Error::NonDecreasingExponents);
        assert_eq!(ord_err("w*0"), Error::ZeroCoefficient);
        assert!(matches!(ord_err("w*"), Error::OrdinalSyntax { .. }));
        assert!(matches!(ord_err("3+"), Error::OrdinalSyntax { .. }));
        assert!(matches!(ord_err("x"), Error::OrdinalSyntax { .. }));
        assert!(matches!(ord_err(""), Error::OrdinalSyntax { .. }));
    }

    fn ord_err(s: &str) -> Error {
        s.parse::<Ordinal>().unwrap_err()
    }

    #[test]
    fn classification() {
        assert_eq!(ord("w*2+3").kind(), Kind::Successor);
        assert_eq!(ord("w*2+3").predecessor().unwrap(), ord("w*2+2"));
        assert_eq!(ord("w+1").predecessor().unwrap(), ord("w"));
        assert_eq!(ord("w^2").kind(), Kind::Limit);
        assert_eq!(ord("0").kind(), Kind::Zero);
        assert!(ord("w").predecessor().is_err());
        assert!(ord("0").predecessor().is_err());
    }

    #[test]
    fn fundamental_sequences() {
        assert_eq!(ord("w").fundamental_sequence(5).unwrap(), ord("5"));
        assert_eq!(ord("w*2").fundamental_sequence(3).unwrap(), ord("w+3"));
        assert_eq!(ord("w^2").fundamental_sequence(4).unwrap(), ord("w*4"));
        assert_eq!(
            ord("w^3*2+w^2").fundamental_sequence(2).unwrap(),
            ord("w^3*2+w*2")
        );
        assert!(ord("w+1").fundamental_sequence(1).is_err());
        assert!(ord("w").fundamental_sequence(0).is_err());
    }

    #[test]
    fn ordering_is_lexicographic_on_terms() {
        assert!(ord("w") > ord("100"));
        assert!(ord("w+1") > ord("w"));
        assert!(ord("w^2") > ord("w*9+9"));
        assert!(ord("w*2") > ord("w+5"));
        assert!(ord("0") < ord("1"));
    }

    fn arb_ordinal() -> impl Strategy<Value = Ordinal> {
        proptest::collection::btree_map(0u32..5, 1u64..6, 0..4).prop_map(|m| {
            let terms = m
                .into_iter()
                .rev()
                .map(|(exponent, coefficient)| Term {
                    exponent,
                    coefficient,
                })
                .collect();
            Ordinal::from_terms(terms).unwrap()
        })
    }

    proptest! {
        #[test]
        fn format_parse_roundtrip(a in arb_ordinal()) {
            prop_assert_eq!(a.to_string().parse::<Ordinal>().unwrap(), a);
        }

        #[test]
        fn fundamental_sequence_increases_below_limit(a in arb_ordinal(), r in 1u64..20) {
            prop_assume!(a.kind() == Kind::Limit);
            let ar = a.fundamental_sequence(r).unwrap();
            let next = a.fundamental_sequence(r + 1).unwrap();
            prop_assert!(ar < next);
            prop_assert!(next < a);
        }

        #[test]
        fn successor_predecessor_inverse(a in arb_ordinal()) {
            prop_assert_eq!(a.successor().predecessor().unwrap(), a);
        }
    }
}
