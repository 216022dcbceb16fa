use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SpacetimePoint;
use crate::scalar::Real;

/// Finite, deduplicated set of space-time points kept in lexicographic
/// `(x, t)` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePointSet<T> {
    dim: usize,
    points: Vec<SpacetimePoint<T>>,
}

/// Axis-aligned bounds of a point set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox<T> {
    pub lo: Vec<T>,
    pub hi: Vec<T>,
    pub t_min: T,
    pub t_max: T,
}

pub(crate) fn lex_cmp<T: Real>(a: &SpacetimePoint<T>, b: &SpacetimePoint<T>) -> Ordering {
    a.x.iter()
        .zip(&b.x)
        .map(|(p, q)| p.partial_cmp(q).unwrap_or(Ordering::Equal))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.t.partial_cmp(&b.t).unwrap_or(Ordering::Equal))
}

impl<T: Real> SpacetimePointSet<T> {
    pub fn new(dim: usize, mut points: Vec<SpacetimePoint<T>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("point sets need spatial dimension ≥ 1"));
        }
        for p in &points {
            if p.dim() != dim {
                return Err(Error::invalid(format!(
                    "point of dimension {} in a {dim}-dimensional set",
                    p.dim()
                )));
            }
            if !(p.t.is_finite() && p.x.iter().all(|v| v.is_finite())) {
                return Err(Error::invalid("point coordinates must be finite"));
            }
        }
        points.sort_by(lex_cmp);
        points.dedup();
        Ok(Self { dim, points })
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            points: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[SpacetimePoint<T>] {
        &self.points
    }

    pub fn bounding_box(&self) -> Option<BoundingBox<T>> {
        let first = self.points.first()?;
        let mut bb = BoundingBox {
            lo: first.x.clone(),
            hi: first.x.clone(),
            t_min: first.t,
            t_max: first.t,
        };
        for p in &self.points[1..] {
            for (a, &v) in p.x.iter().enumerate() {
                bb.lo[a] = bb.lo[a].min(v);
                bb.hi[a] = bb.hi[a].max(v);
            }
            bb.t_min = bb.t_min.min(p.t);
            bb.t_max = bb.t_max.max(p.t);
        }
        Some(bb)
    }

    /// CSV with header `x0,…,x{N−1},t`, one row per point.
    pub fn to_csv(&self) -> String {
        let mut out = header(self.dim, &["t"]);
        for p in &self.points {
            push_row(&mut out, p.x.iter().copied().chain([p.t]));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let head = lines.next().ok_or_else(|| Error::Format("empty point CSV".into()))?;
        let cols = head.split(',').count();
        if cols < 2 || head.split(',').next_back().map(str::trim) != Some("t") {
            return Err(Error::Format(format!("unexpected point CSV header {head:?}")));
        }
        let dim = cols - 1;
        let mut points = Vec::new();
        for (n, line) in lines.enumerate() {
            let vals = line
                .split(',')
                .map(|s| s.trim().parse::<f64>().map(T::lit))
                .collect::<std::result::Result<Vec<T>, _>>()
                .map_err(|e| Error::Format(format!("row {}: {e}", n + 2)))?;
            if vals.len() != cols {
                return Err(Error::Format(format!(
                    "row {} has {} fields, expected {cols}",
                    n + 2,
                    vals.len()
                )));
            }
            points.push(SpacetimePoint::new(vals[..dim].to_vec(), vals[dim]));
        }
        Self::new(dim, points)
    }
}

pub(crate) fn header(dim: usize, tail: &[&str]) -> String {
    let mut cols: Vec<String> = (0..dim).map(|a| format!("x{a}")).collect();
    cols.extend(tail.iter().map(|s| s.to_string()));
    let mut s = cols.join(",");
    s.push('\n');
    s
}

pub(crate) fn push_row<T: Real>(out: &mut String, vals: impl Iterator<Item = T>) {
    let row: Vec<String> = vals.map(|v| format!("{v}")).collect();
    out.push_str(&row.join(","));
    out.push('\n');
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedup_sort_and_csv_round_trip() {
        let pts = vec![
            SpacetimePoint::new(vec![0.5, 0.1], -0.25),
            SpacetimePoint::new(vec![-1.0, 0.3], 0.0),
            SpacetimePoint::new(vec![0.5, 0.1], -0.25),
            SpacetimePoint::new(vec![0.1 + 0.2, 1.0 / 3.0], -1e-17),
        ];
        let s = SpacetimePointSet::<f64>::new(2, pts).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.points()[0].x[0], -1.0);
        let bb = s.bounding_box().unwrap();
        assert_eq!(bb.lo, vec![-1.0, 0.1]);
        assert_eq!(bb.t_min, -0.25);
        let csv = s.to_csv();
        assert!(csv.starts_with("x0,x1,t\n"));
        assert_eq!(SpacetimePointSet::from_csv(&csv).unwrap(), s);
        assert!(SpacetimePointSet::<f64>::from_csv("a,b\n1,2\n").is_err());
        assert!(SpacetimePointSet::<f64>::new(1, vec![SpacetimePoint::new(vec![f64::NAN], 0.0)]).is_err());
    }
}
