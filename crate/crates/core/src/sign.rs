//! Edge and vertex signs.

use std::fmt;
use std::ops::{Mul, Neg};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// The sign carried by an edge (or assigned to a vertex).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(i8)]
pub enum Sign {
    Negative = -1,
    Positive = 1,
}

impl Sign {
    /// Maps a raw weight to a sign. Zero and non-finite weights carry no sign.
    pub fn from_weight(weight: f64) -> Option<Sign> {
        if !weight.is_finite() || weight == 0.0 {
            None
        } else if weight > 0.0 {
            Some(Sign::Positive)
        } else {
            Some(Sign::Negative)
        }
    }

    pub fn from_i8(value: i8) -> Option<Sign> {
        match value {
            1 => Some(Sign::Positive),
            -1 => Some(Sign::Negative),
            _ => None,
        }
    }

    #[inline]
    pub fn as_i8(self) -> i8 {
        self as i8
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self as i8 as f64
    }

    #[inline]
    pub fn is_negative(self) -> bool {
        self == Sign::Negative
    }

    #[inline]
    pub fn flipped(self) -> Sign {
        -self
    }
}

impl Mul for Sign {
    type Output = Sign;

    #[inline]
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    #[inline]
    fn neg(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_i8())
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_i8(self.as_i8())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Sign, D::Error> {
        let value = i8::deserialize(deserializer)?;
        Sign::from_i8(value)
            .ok_or_else(|| serde::de::Error::custom(format!("invalid sign {value}")))
    }
}

/// One discrete sign per vertex: the side of a Harary bipartition each vertex sits on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexAssignment(pub Vec<Sign>);

impl VertexAssignment {
    pub fn all_positive(n: usize) -> VertexAssignment {
        VertexAssignment(vec![Sign::Positive; n])
    }

    /// Decodes a bit pattern: bit `i - 1` set means vertex `i` is negative.
    /// Vertex 0 is always positive.
    pub fn from_encoding(n: usize, encoding: u64) -> VertexAssignment {
        let mut signs = vec![Sign::Positive; n];
        for (v, s) in signs.iter_mut().enumerate().skip(1) {
            if (encoding >> (v - 1)) & 1 == 1 {
                *s = Sign::Negative;
            }
        }
        VertexAssignment(signs)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn negated(&self) -> VertexAssignment {
        VertexAssignment(self.0.iter().map(|&s| -s).collect())
    }

    #[inline]
    pub fn get(&self, v: usize) -> Sign {
        self.0[v]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_mapping() {
        assert_eq!(Sign::from_weight(3.0), Some(Sign::Positive));
        assert_eq!(Sign::from_weight(-0.5), Some(Sign::Negative));
        assert_eq!(Sign::from_weight(0.0), None);
        assert_eq!(Sign::from_weight(-0.0), None);
        assert_eq!(Sign::from_weight(f64::NAN), None);
    }

    #[test]
    fn products() {
        assert_eq!(Sign::Negative * Sign::Negative, Sign::Positive);
        assert_eq!(Sign::Negative * Sign::Positive, Sign::Negative);
        assert_eq!(-Sign::Positive, Sign::Negative);
        assert_eq!(Sign::Negative.to_string(), "-1");
    }

    #[test]
    fn encoding_keeps_vertex_zero_positive() {
        let a = VertexAssignment::from_encoding(3, 0b10);
        assert_eq!(a.0, vec![Sign::Positive, Sign::Positive, Sign::Negative]);
    }
}
