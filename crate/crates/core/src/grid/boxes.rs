//! Axis-aligned boxes of named variables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub var: String,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridBox {
    pub intervals: Vec<Interval>,
}

impl GridBox {
    pub fn new(intervals: &[(&str, f64, f64)]) -> Result<Self> {
        let mut out = Vec::with_capacity(intervals.len());
        for &(v, lo, hi) in intervals {
            if !(lo < hi) {
                return Err(Error::DegenerateInput(format!("empty interval for {v}: [{lo}, {hi}]")));
            }
            out.push(Interval {
                var: v.to_string(),
                lo,
                hi,
            });
        }
        Ok(GridBox { intervals: out })
    }

    pub fn get(&self, var: &str) -> Option<&Interval> {
        self.intervals.iter().find(|i| i.var == var)
    }

    pub fn contains(&self, var: &str, v: f64) -> bool {
        self.get(var).map_or(true, |i| v >= i.lo && v <= i.hi)
    }
}

/// The plateau interval [4/5, 5/4].
pub const PLATEAU: (f64, f64) = (0.8, 1.25);
/// The support interval [3/4, 4/3].
pub const SUPPORT: (f64, f64) = (0.75, 4.0 / 3.0);

/// I_ν = [1, 1 + 1/|ν|].
pub fn i_nu(t: f64) -> (f64, f64) {
    (1.0, 1.0 + 1.0 / t.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty() {
        assert!(GridBox::new(&[("x", 1.0, 1.0)]).is_err());
        let b = GridBox::new(&[("x", 0.0, 1.0)]).unwrap();
        assert!(b.contains("x", 0.5));
        assert!(!b.contains("x", 1.5));
    }
}
