use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Interval;

/// Tolerance on the total mass of a design.
pub const MASS_TOL: f64 = 1e-12;

/// An approximate design: finitely many support points with positive weights
/// summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDesign", into = "RawDesign")]
pub struct Design {
    support: Vec<f64>,
    weights: Vec<f64>,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDesign {
    support: Vec<f64>,
    weights: Vec<f64>,
}

impl TryFrom<RawDesign> for Design {
    type Error = Error;
    fn try_from(raw: RawDesign) -> Result<Self> {
        Design::new(raw.support, raw.weights)
    }
}

impl From<Design> for RawDesign {
    fn from(d: Design) -> Self {
        RawDesign {
            support: d.support,
            weights: d.weights,
        }
    }
}

impl Design {
    /// Validate and wrap a design. The support must be strictly increasing,
    /// every weight positive and the weights must sum to one within `1e-12`.
    pub fn new(support: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::Design("empty support".into()));
        }
        if support.len() != weights.len() {
            return Err(Error::Design(format!(
                "{} support points but {} weights",
                support.len(),
                weights.len()
            )));
        }
        if support.iter().chain(&weights).any(|v| !v.is_finite()) {
            return Err(Error::Design("non-finite entry".into()));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Design("support must be strictly increasing".into()));
        }
        if let Some((i, &w)) = weights.iter().enumerate().find(|(_, &w)| w <= 0.0) {
            return Err(Error::Design(format!("weight {w} at index {i} is not positive")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::Design(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { support, weights })
    }

    /// Sort the points, merge repeated ones, drop zero weights and rescale
    /// the weights to sum to one.
    pub fn normalized(points: &[f64], weights: &[f64]) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::Design("points and weights differ in length".into()));
        }
        if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::Design("weights must be finite and non-negative".into()));
        }
        let mut pairs: Vec<(f64, f64)> = points
            .iter()
            .copied()
            .zip(weights.iter().copied())
            .filter(|&(_, w)| w > 0.0)
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut support: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut mass: Vec<f64> = Vec::with_capacity(pairs.len());
        for (t, w) in pairs {
            if support.last() == Some(&t) {
                *mass.last_mut().unwrap() += w;
            } else {
                support.push(t);
                mass.push(w);
            }
        }
        let total: f64 = mass.iter().sum();
        if total <= 0.0 {
            return Err(Error::Design("all weights are zero".into()));
        }
        let weights = mass.iter().map(|w| w / total).collect();
        Self::new(support, weights)
    }

    pub fn one_point(t: f64) -> Result<Self> {
        Self::new(vec![t], vec![1.0])
    }

    /// Equal weights on the given points.
    pub fn uniform(points: &[f64]) -> Result<Self> {
        Self::normalized(points, &vec![1.0; points.len()])
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.support.iter().copied().zip(self.weights.iter().copied())
    }

    /// `alpha * self + (1 - alpha) * other`
    pub fn mixture(&self, other: &Design, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Parameter(format!("mixing weight {alpha} outside [0, 1]")));
        }
        let points: Vec<f64> = self.support.iter().chain(&other.support).copied().collect();
        let weights: Vec<f64> = self
            .weights
            .iter()
            .map(|w| alpha * w)
            .chain(other.weights.iter().map(|w| (1.0 - alpha) * w))
            .collect();
        Self::normalized(&points, &weights)
    }

    /// Fail with a domain error unless every support point lies in `interval`.
    pub fn check_interval(&self, interval: &Interval) -> Result<()> {
        match self.support.iter().find(|&&t| !interval.contains(t)) {
            Some(&t) => Err(Error::Domain { t }),
            None => Ok(()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("designs always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Design(e.to_string()))
    }

    /// Two-column CSV with header `t,weight`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,weight\n");
        for (t, w) in self.iter() {
            writeln!(out, "{t:?},{w:?}").unwrap();
        }
        out
    }

    pub fn from_csv(s: &str) -> Result<Self> {
        let mut lines = s.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim() == "t,weight" => {}
            _ => return Err(Error::Design("CSV header must be `t,weight`".into())),
        }
        let mut support = Vec::new();
        let mut weights = Vec::new();
        for (n, line) in lines.enumerate() {
            let mut cols = line.split(',');
            let parse = |c: Option<&str>| -> Result<f64> {
                c.map(str::trim)
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| Error::Design(format!("malformed CSV row {}", n + 2)))
            };
            support.push(parse(cols.next())?);
            weights.push(parse(cols.next())?);
            if cols.next().is_some() {
                return Err(Error::Design(format!("extra column in CSV row {}", n + 2)));
            }
        }
        Self::new(support, weights)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Design::new(vec![], vec![]).is_err());
        assert!(Design::new(vec![0.0, 0.0], vec![0.5, 0.5]).is_err());
        assert!(Design::new(vec![1.0, 0.0], vec![0.5, 0.5]).is_err());
        assert!(Design::new(vec![0.0, 1.0], vec![0.0, 1.0]).is_err());
        assert!(Design::new(vec![0.0, 1.0], vec![0.5, 0.6]).is_err());
        assert!(Design::new(vec![0.0, 1.0], vec![0.25, 0.75]).is_ok());
    }

    #[test]
    fn normalized_sorts_and_merges() {
        let d = Design::normalized(&[2.0, 1.0, 2.0, 3.0], &[1.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(d.support(), &[1.0, 2.0]);
        assert!((d.weights()[1] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn json_and_csv_round_trip_exactly() {
        let d = Design::normalized(&[0.0, 0.1, std::f64::consts::PI], &[0.1, 0.2, 0.7]).unwrap();
        assert_eq!(Design::from_json(&d.to_json()).unwrap(), d);
        assert_eq!(Design::from_csv(&d.to_csv()).unwrap(), d);
    }

    #[test]
    fn json_rejects_invalid_designs() {
        assert!(Design::from_json(r#"{"support":[0,1],"weights":[0.2,0.2]}"#).is_err());
        assert!(Design::from_json(r#"{"support":[0],"weights":[1],"extra":1}"#).is_err());
    }

    #[test]
    fn mixture_of_one_point_designs() {
        let a = Design::one_point(0.0).unwrap();
        let b = Design::one_point(1.0).unwrap();
        let m = a.mixture(&b, 0.25).unwrap();
        assert_eq!(m.support(), &[0.0, 1.0]);
        assert_eq!(m.weights(), &[0.25, 0.75]);
    }
}
