use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `k + 1` equally spaced values `a + i (b - a) / k`, `i = 0..=k`.
pub fn split<Q: Scalar>(a: &Q, b: &Q, k: usize) -> Result<Vec<Q>> {
    if a >= b {
        return Err(Error::InvalidParameter(format!("split needs a < b, got {a} and {b}")));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("split needs k >= 1".into()));
    }
    let step = (b.clone() - a.clone()) / Q::from_usize(k);
    let mut out = Vec::with_capacity(k + 1);
    out.push(a.clone());
    for i in 1..k {
        out.push(a.clone() + step.clone() * Q::from_usize(i));
    }
    out.push(b.clone());
    Ok(out)
}

/// Where a parameter falls among the breakpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    /// Strictly inside interval `i` (0-based), between `t_i` and `t_{i+1}`.
    Interior(usize),
    /// Exactly on breakpoint `i`.
    Break(usize),
}

/// Strictly increasing parameters `0 = t_0 < … < t_m = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamBreaks<Q: Scalar> {
    ts: Vec<Q>,
}

impl<Q: Scalar> ParamBreaks<Q> {
    pub fn new(ts: Vec<Q>) -> Result<Self> {
        if ts.len() < 2 {
            return Err(Error::InvalidParameter("need at least two breakpoints".into()));
        }
        if !ts[0].is_zero() || !ts[ts.len() - 1].is_one() {
            return Err(Error::InvalidParameter("breakpoints must run from 0 to 1".into()));
        }
        if ts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("breakpoints must increase strictly".into()));
        }
        Ok(ParamBreaks { ts })
    }

    /// `m` equal intervals of `[0, 1]`.
    pub fn uniform(m: usize) -> Result<Self> {
        Ok(ParamBreaks { ts: split(&Q::zero(), &Q::one(), m)? })
    }

    /// Splits interval `i` uniformly into `blocks[i]` parts.
    pub fn refine(&self, blocks: &[usize]) -> Result<Self> {
        if blocks.len() != self.intervals() {
            return Err(Error::InvalidParameter(format!(
                "{} block lengths for {} intervals",
                blocks.len(),
                self.intervals()
            )));
        }
        let mut ts = Vec::with_capacity(blocks.iter().sum::<usize>() + 1);
        ts.push(Q::zero());
        for (i, &k) in blocks.iter().enumerate() {
            let part = split(&self.ts[i], &self.ts[i + 1], k)?;
            ts.extend(part.into_iter().skip(1));
        }
        Ok(ParamBreaks { ts })
    }

    pub fn values(&self) -> &[Q] {
        &self.ts
    }

    pub fn get(&self, i: usize) -> &Q {
        &self.ts[i]
    }

    /// Number of intervals `m`.
    pub fn intervals(&self) -> usize {
        self.ts.len() - 1
    }

    pub fn locate(&self, t: &Q) -> Location {
        match self.ts.binary_search(t) {
            Ok(i) => Location::Break(i),
            Err(i) => Location::Interior(i - 1),
        }
    }

    /// Midpoint of interval `i`.
    pub fn midpoint(&self, i: usize) -> Q {
        (self.ts[i].clone() + self.ts[i + 1].clone()).half()
    }

    /// Breakpoints and interval midpoints in increasing order, `2m + 1` values.
    pub fn grid(&self) -> Vec<Q> {
        let mut out = Vec::with_capacity(2 * self.ts.len());
        for i in 0..self.intervals() {
            out.push(self.ts[i].clone());
            out.push(self.midpoint(i));
        }
        out.push(Q::one());
        out
    }

    /// Length of the shortest interval.
    pub fn min_gap(&self) -> Q {
        self.ts
            .windows(2)
            .map(|w| w[1].clone() - w[0].clone())
            .min()
            .expect("at least one interval")
    }
}

impl<Q: Scalar> Serialize for ParamBreaks<Q> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.ts.iter().map(|t| t.to_string()))
    }
}

impl<'de, Q: Scalar> Deserialize<'de> for ParamBreaks<Q> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(deserializer)?;
        let ts = raw
            .iter()
            .map(|s| s.parse::<Q>().map_err(|_| serde::de::Error::custom(format!("bad parameter {s:?}"))))
            .collect::<std::result::Result<Vec<Q>, D::Error>>()?;
        ParamBreaks::new(ts).map_err(serde::de::Error::custom)
    }
}
