//! Parameter grids: `start:stop:step` ranges, comma lists or single values.

use std::fmt;
use std::str::FromStr;

use serde::Deserialize;

/// Upper bound on the number of points in one axis.
pub const MAX_POINTS: usize = 1_000_000;

/// An ordered, nonempty list of finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(Vec<f64>);

impl Grid {
    pub fn single(x: f64) -> Self {
        Grid(vec![x])
    }

    pub fn from_values(values: Vec<f64>) -> Result<Self, String> {
        if values.is_empty() {
            return Err("grid is empty".into());
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(format!("grid value {v} is not finite"));
        }
        if values.len() > MAX_POINTS {
            return Err(format!("grid has more than {MAX_POINTS} points"));
        }
        Ok(Grid(values))
    }

    /// `n = round((stop−start)/step) + 1` points at `start + i·step`.
    pub fn range(start: f64, stop: f64, step: f64) -> Result<Self, String> {
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
            return Err("range bounds must be finite".into());
        }
        if step <= 0.0 {
            return Err(format!("range step must be positive, got {step}"));
        }
        if stop < start {
            return Err(format!("range stop {stop} is below start {start}"));
        }
        let span = ((stop - start) / step).round();
        if span >= MAX_POINTS as f64 {
            return Err(format!("range has more than {MAX_POINTS} points"));
        }
        let n = span as usize + 1;
        Grid::from_values((0..n).map(|i| start + i as f64 * step).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| -> Result<f64, String> {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("`{}` is not a number", t.trim()))
        };
        let s = s.trim();
        if s.is_empty() {
            return Err("grid is empty".into());
        }
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            if parts.len() != 3 {
                return Err(format!("range `{s}` must be start:stop:step"));
            }
            return Grid::range(num(parts[0])?, num(parts[1])?, num(parts[2])?);
        }
        Grid::from_values(s.split(',').map(num).collect::<Result<_, _>>()?)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(f64::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// A grid as written in a config file: a number, an array or a grid string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GridValue {
    Number(f64),
    List(Vec<f64>),
    Text(String),
}

impl TryFrom<GridValue> for Grid {
    type Error = String;

    fn try_from(v: GridValue) -> Result<Self, String> {
        match v {
            GridValue::Number(x) => Grid::from_values(vec![x]),
            GridValue::List(xs) => Grid::from_values(xs),
            GridValue::Text(s) => s.parse(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_counts() {
        let g: Grid = "-5:5:0.1".parse().unwrap();
        assert_eq!(g.len(), 101);
        assert_eq!(g.values()[0], -5.0);
        assert!(g.values()[50].abs() < 1e-12);
        assert!((g.values()[100] - 5.0).abs() < 1e-12);
        assert_eq!("0:3:0.05".parse::<Grid>().unwrap().len(), 61);
    }

    #[test]
    fn lists_and_singles() {
        assert_eq!("0, 0.2".parse::<Grid>().unwrap().values(), &[0.0, 0.2]);
        assert_eq!("2.4".parse::<Grid>().unwrap().values(), &[2.4]);
    }

    #[test]
    fn rejects_bad_input() {
        for bad in ["", "1:2", "1:0:0.1", "0:1:0", "0:1:-1", "a,b", "nan", "0:1e12:1e-6"] {
            assert!(bad.parse::<Grid>().is_err(), "{bad}");
        }
    }
}
