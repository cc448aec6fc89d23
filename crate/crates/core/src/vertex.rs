//! Vertex identifiers and degree values.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A vertex of a finitely-presented graph: a sort name plus an integer
/// index tuple whose length is the sort's arity.
///
/// Ordering is by sort name, then lexicographically by index; every listing
/// in the crate uses this order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId {
    pub sort: String,
    pub index: Vec<i64>,
}

impl VertexId {
    pub fn new(sort: impl Into<String>, index: impl Into<Vec<i64>>) -> Self {
        VertexId {
            sort: sort.into(),
            index: index.into(),
        }
    }

    pub fn arity(&self) -> usize {
        self.index.len()
    }

    /// Largest absolute index component, 0 for arity-0 vertices.
    pub fn max_abs(&self) -> i64 {
        self.index.iter().map(|c| c.abs()).max().unwrap_or(0)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index.as_slice() {
            [] => write!(f, "{}", self.sort),
            [i] => write!(f, "{}_{}", self.sort, i),
            idx => {
                write!(f, "{}_(", self.sort)?;
                for (k, i) in idx.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{i}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl FromStr for VertexId {
    type Err = String;

    /// Inverse of `Display`: `apex`, `b_1`, `v_(0,-3)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err("empty vertex name".into());
        }
        if let Some((sort, rest)) = s.rsplit_once('_') {
            if let Some(inner) = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
                let index = inner
                    .split(',')
                    .map(|p| p.trim().parse::<i64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| format!("bad index in `{s}`: {e}"))?;
                if sort.is_empty() {
                    return Err(format!("missing sort in `{s}`"));
                }
                return Ok(VertexId::new(sort, index));
            }
            if let Ok(i) = rest.parse::<i64>() {
                if sort.is_empty() {
                    return Err(format!("missing sort in `{s}`"));
                }
                return Ok(VertexId::new(sort, vec![i]));
            }
        }
        Ok(VertexId::new(s, Vec::new()))
    }
}

impl Serialize for VertexId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for VertexId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Degree of a vertex in the host graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DegreeValue {
    Finite(u64),
    Infinite,
}

impl DegreeValue {
    pub fn is_finite(self) -> bool {
        matches!(self, DegreeValue::Finite(_))
    }
}

impl Add for DegreeValue {
    type Output = DegreeValue;

    fn add(self, rhs: DegreeValue) -> DegreeValue {
        match (self, rhs) {
            (DegreeValue::Finite(a), DegreeValue::Finite(b)) => DegreeValue::Finite(a + b),
            _ => DegreeValue::Infinite,
        }
    }
}

impl fmt::Display for DegreeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegreeValue::Finite(d) => write!(f, "{d}"),
            DegreeValue::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for DegreeValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            DegreeValue::Finite(d) => serializer.serialize_u64(*d),
            DegreeValue::Infinite => serializer.serialize_str("inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_parse() {
        for (v, s) in [
            (VertexId::new("apex", vec![]), "apex"),
            (VertexId::new("b", vec![1]), "b_1"),
            (VertexId::new("c", vec![-3]), "c_-3"),
            (VertexId::new("u0_z", vec![4, -2]), "u0_z_(4,-2)"),
        ] {
            assert_eq!(v.to_string(), s);
            assert_eq!(s.parse::<VertexId>().unwrap(), v);
        }
    }

    #[test]
    fn order_is_sort_then_index() {
        let mut vs = [
            VertexId::new("b", vec![1]),
            VertexId::new("a", vec![10]),
            VertexId::new("a", vec![2]),
        ];
        vs.sort();
        assert_eq!(vs[0], VertexId::new("a", vec![2]));
        assert_eq!(vs[2], VertexId::new("b", vec![1]));
    }

    #[test]
    fn infinite_absorbs() {
        assert_eq!(DegreeValue::Finite(2) + DegreeValue::Finite(3), DegreeValue::Finite(5));
        assert_eq!(DegreeValue::Finite(2) + DegreeValue::Infinite, DegreeValue::Infinite);
    }
}
