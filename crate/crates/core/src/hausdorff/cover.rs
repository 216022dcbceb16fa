use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::points::{header, push_row, SpacetimePointSet};
use crate::diagnostics::{powerlaw_fit, IndicatorCurve};
use crate::error::{Error, Result};
use crate::geometry::SpacetimePoint;
use crate::scalar::Real;

/// `(y, s) + Q_r = K_r(y) × (s − r², s]`, with `K_r(y)` the closed cube of
/// side `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverCylinder<T> {
    pub vertex: SpacetimePoint<T>,
    pub r: T,
}

impl<T: Real> CoverCylinder<T> {
    pub fn contains(&self, p: &SpacetimePoint<T>) -> bool {
        let half = self.r / T::lit(2.0);
        p.t <= self.vertex.t
            && p.t > self.vertex.t - self.r * self.r
            && p.x.iter().zip(&self.vertex.x).all(|(&a, &b)| (a - b).abs() <= half)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverStrategy {
    /// Tile the bounding box with cylinders of radius `δ/2`; keep occupied tiles.
    Grid,
    /// Repeatedly take the candidate cylinder covering the most uncovered
    /// points; candidates are centred on the input points.
    Greedy,
}

/// An explicit cover and its value `Σ r_i^k`, an upper bound for `P_k^δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverEstimate<T> {
    pub k: T,
    pub delta: T,
    pub strategy: CoverStrategy,
    pub cover: Vec<CoverCylinder<T>>,
    pub value: T,
}

impl<T: Real> CoverEstimate<T> {
    pub fn count(&self) -> usize {
        self.cover.len()
    }

    /// Every point lies in at least one cylinder of the cover.
    pub fn covers(&self, set: &SpacetimePointSet<T>) -> bool {
        set.points().iter().all(|p| self.cover.iter().any(|c| c.contains(p)))
    }

    /// CSV with header `x0,…,x{N−1},t,r`, one row per cylinder (vertex, radius).
    pub fn to_csv(&self, dim: usize) -> String {
        let mut out = header(dim, &["t", "r"]);
        for c in &self.cover {
            push_row(&mut out, c.vertex.x.iter().copied().chain([c.vertex.t, c.r]));
        }
        out
    }
}

/// Upper bound for the parabolic premeasure `P_k^δ` of `set`.
pub fn premeasure<T: Real>(
    set: &SpacetimePointSet<T>,
    k: T,
    delta: T,
    strategy: CoverStrategy,
) -> Result<CoverEstimate<T>> {
    if !(k >= T::zero() && k.is_finite()) {
        return Err(Error::invalid(format!("k must be non-negative, got {k}")));
    }
    if !(delta > T::zero() && delta.is_finite()) {
        return Err(Error::invalid(format!("δ must be positive, got {delta}")));
    }
    let r = delta / T::lit(2.0);
    let cover = match strategy {
        CoverStrategy::Grid => grid_cover(set, r),
        CoverStrategy::Greedy => greedy_cover(set, r),
    };
    let value = T::from_count(cover.len()) * r.powf(k);
    Ok(CoverEstimate {
        k,
        delta,
        strategy,
        cover,
        value,
    })
}

/// [`premeasure`] at every `δ` of a ladder, computed in parallel.
pub fn premeasure_ladder<T: Real>(
    set: &SpacetimePointSet<T>,
    k: T,
    deltas: &[T],
    strategy: CoverStrategy,
) -> Result<Vec<CoverEstimate<T>>> {
    deltas.par_iter().map(|&d| premeasure(set, k, d, strategy)).collect()
}

fn grid_cover<T: Real>(set: &SpacetimePointSet<T>, r: T) -> Vec<CoverCylinder<T>> {
    let Some(bb) = set.bounding_box() else {
        return Vec::new();
    };
    let r2 = r * r;
    // tiles are centred on the lattice lo + i·r, so a coordinate that is
    // constant across the set sits at a tile centre rather than on a face
    let mut tiles: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut extra = Vec::new();
    let tile_of = |idx: &[i64]| {
        let dim = idx.len() - 1;
        let x = (0..dim).map(|a| bb.lo[a] + T::lit(idx[a] as f64) * r).collect();
        CoverCylinder {
            vertex: SpacetimePoint::new(x, bb.t_min + T::lit(idx[dim] as f64) * r2),
            r,
        }
    };
    for p in set.points() {
        let mut idx: Vec<i64> =
            p.x.iter()
                .zip(&bb.lo)
                .map(|(&v, &lo)| ((v - lo) / r + T::lit(0.5)).floor().to_i64().unwrap_or(0))
                .collect();
        idx.push(((p.t - bb.t_min) / r2).ceil().to_i64().unwrap_or(0));
        // rounding can put a point just outside its computed tile; try the
        // neighbouring tiles before giving it a cylinder of its own
        match neighbour_offsets(idx.len())
            .map(|off| idx.iter().zip(&off).map(|(a, o)| a + o).collect::<Vec<_>>())
            .find(|cand| tile_of(cand).contains(p))
        {
            Some(found) => {
                tiles.insert(found);
            }
            None => extra.push(CoverCylinder { vertex: p.clone(), r }),
        }
    }
    tiles.iter().map(|i| tile_of(i)).chain(extra).collect()
}

/// Offsets in `{0, −1, 1}^n`, the zero offset first.
fn neighbour_offsets(n: usize) -> impl Iterator<Item = Vec<i64>> {
    let total = 3usize.pow(n as u32);
    (0..total).map(move |mut code| {
        (0..n)
            .map(|_| {
                let d = [0, -1, 1][code % 3];
                code /= 3;
                d
            })
            .collect()
    })
}

fn greedy_cover<T: Real>(set: &SpacetimePointSet<T>, r: T) -> Vec<CoverCylinder<T>> {
    let pts = set.points();
    if pts.is_empty() {
        return Vec::new();
    }
    let r2 = r * r;
    let shift = r2 / T::lit(2.0);
    // candidate i is centred on point i: vertex raised by r²/2
    let cands: Vec<CoverCylinder<T>> = pts
        .iter()
        .map(|p| CoverCylinder {
            vertex: SpacetimePoint::new(p.x.clone(), p.t + shift),
            r,
        })
        .collect();

    // bucket points on an (r, r²) lattice so each candidate only scans neighbours
    let key = |p: &SpacetimePoint<T>| -> Vec<i64> {
        p.x.iter()
            .map(|&v| (v / r).floor().to_i64().unwrap_or(0))
            .chain([(p.t / r2).floor().to_i64().unwrap_or(0)])
            .collect()
    };
    let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, p) in pts.iter().enumerate() {
        buckets.entry(key(p)).or_default().push(i);
    }
    let members: Vec<Vec<usize>> = cands
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let base = key(&pts[i]);
            let mut found = Vec::new();
            for off in neighbour_offsets(base.len()) {
                let b: Vec<i64> = base.iter().zip(&off).map(|(a, o)| a + o).collect();
                if let Some(list) = buckets.get(&b) {
                    found.extend(list.iter().copied().filter(|&j| c.contains(&pts[j])));
                }
            }
            found.sort_unstable();
            found
        })
        .collect();

    let mut covered = vec![false; pts.len()];
    let mut left = pts.len();
    let mut heap: BinaryHeap<(usize, Reverse<usize>)> =
        members.iter().enumerate().map(|(i, m)| (m.len(), Reverse(i))).collect();
    let mut cover = Vec::new();
    while left > 0 {
        let Some((stale, Reverse(i))) = heap.pop() else { break };
        let fresh = members[i].iter().filter(|&&j| !covered[j]).count();
        if fresh == 0 {
            continue;
        }
        if fresh < stale {
            heap.push((fresh, Reverse(i)));
            continue;
        }
        for &j in &members[i] {
            if !covered[j] {
                covered[j] = true;
                left -= 1;
            }
        }
        cover.push(cands[i].clone());
    }
    cover
}

/// Covering-dimension estimate from a `δ` ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate<T> {
    /// Slope of `ln(count)` against `ln(1/r)`.
    pub dimension: T,
    pub r_squared: T,
    /// `(r, cover count)` per ladder level.
    pub counts: Vec<(T, usize)>,
}

/// Estimates the exponent at which `P_k` switches from diverging to
/// vanishing, from grid-cover counts along `deltas`.
pub fn parabolic_dimension<T: Real>(set: &SpacetimePointSet<T>, deltas: &[T]) -> Result<DimensionEstimate<T>> {
    if deltas.len() < 3 {
        return Err(Error::invalid(format!(
            "dimension fit needs ≥ 3 ladder levels, got {}",
            deltas.len()
        )));
    }
    if set.is_empty() {
        return Err(Error::invalid("dimension of the empty set is undefined"));
    }
    let mut sorted = deltas.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sorted.dedup();
    if sorted.len() < 3 {
        return Err(Error::invalid("dimension fit needs ≥ 3 distinct ladder levels"));
    }
    let covers = premeasure_ladder(set, T::zero(), &sorted, CoverStrategy::Grid)?;
    let counts: Vec<(T, usize)> = covers.iter().map(|c| (c.delta / T::lit(2.0), c.count())).collect();
    let pts: Vec<(T, T)> = counts.iter().map(|&(r, n)| (r.recip(), T::from_count(n))).collect();
    let fit = powerlaw_fit(&pts)?;
    Ok(DimensionEstimate {
        dimension: fit.slope,
        r_squared: fit.r_squared,
        counts,
    })
}

/// `Θ = I^p` at the smallest sampled radius that is at least `rho_min`;
/// `None` when the curve was not sampled down to `rho_min`.
pub fn theta_at<T: Real>(curve: &IndicatorCurve<T>, rho_min: T) -> Option<T> {
    let tol = T::one() + T::index_tol();
    if !curve.radii.iter().any(|&r| r <= rho_min * tol) {
        return None;
    }
    curve
        .radii
        .iter()
        .zip(&curve.values)
        .filter(|(&r, _)| r >= rho_min * (T::one() - T::index_tol()))
        .last()
        .map(|(_, &v)| v.powf(curve.p))
}

/// Vertices whose `Θ` at the smallest resolvable radius exceeds `eta`:
/// the discrete stand-in for points where the normalised energy does not
/// vanish. Curves not sampled down to `rho_min` are skipped.
pub fn extract_so<T: Real>(curves: &[IndicatorCurve<T>], eta: T, rho_min: T) -> Result<SpacetimePointSet<T>> {
    if !(eta > T::zero()) {
        return Err(Error::invalid(format!("threshold η must be positive, got {eta}")));
    }
    if !(rho_min > T::zero()) {
        return Err(Error::invalid(format!("ρ_min must be positive, got {rho_min}")));
    }
    let Some(first) = curves.first() else {
        return Ok(SpacetimePointSet::empty(1));
    };
    let pts = curves
        .iter()
        .filter(|c| theta_at(c, rho_min).is_some_and(|th| th > eta))
        .map(|c| c.vertex.clone())
        .collect();
    SpacetimePointSet::new(first.vertex.dim(), pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: &[f64], t: f64) -> SpacetimePoint<f64> {
        SpacetimePoint::new(x.to_vec(), t)
    }

    fn time_segment(n: usize) -> SpacetimePointSet<f64> {
        let pts = (0..=n).map(|i| pt(&[0.0], -(i as f64) / n as f64)).collect();
        SpacetimePointSet::new(1, pts).unwrap()
    }

    #[test]
    fn empty_and_single_point() {
        let e = SpacetimePointSet::<f64>::empty(2);
        let c = premeasure(&e, 1.0, 0.1, CoverStrategy::Grid).unwrap();
        assert_eq!(c.value, 0.0);
        assert!(c.cover.is_empty());

        let s = SpacetimePointSet::new(2, vec![pt(&[0.3, -0.2], 0.7)]).unwrap();
        for strat in [CoverStrategy::Grid, CoverStrategy::Greedy] {
            for d in [0.5, 0.05, 0.005] {
                let c = premeasure(&s, 1.5, d, strat).unwrap();
                assert_eq!(c.count(), 1);
                assert!(c.covers(&s));
                assert!((c.value - (d / 2.0f64).powf(1.5)).abs() < 1e-15);
                assert!(c.cover.iter().all(|cyl| cyl.r < d));
            }
        }
    }

    #[test]
    fn time_segment_premeasure() {
        let s = time_segment(20000);
        for d in [0.2, 0.1, 0.05] {
            let c2 = premeasure(&s, 2.0, d, CoverStrategy::Grid).unwrap();
            assert!(c2.covers(&s));
            let r: f64 = d / 2.0;
            assert!((c2.value - 1.0).abs() <= 2.0 * r * r + 1e-12, "δ={d}: {}", c2.value);
            let c3 = premeasure(&s, 3.0, d, CoverStrategy::Grid).unwrap();
            assert!((c3.value / r - 1.0).abs() <= 2.0 * r * r + 1e-12);
        }
    }

    #[test]
    fn constant_coordinate_uses_shared_tiles() {
        // x = 0.25 on every point: the coordinate must not land on a tile face
        let pts = (0..=2000).map(|i| pt(&[0.25], i as f64 / 2000.0)).collect();
        let s = SpacetimePointSet::new(1, pts).unwrap();
        let c = premeasure(&s, 2.0, 0.05, CoverStrategy::Grid).unwrap();
        assert!(c.covers(&s));
        assert_eq!(c.count(), 1601);
    }

    #[test]
    fn dimensions() {
        let deltas = [0.4, 0.2, 0.1, 0.05];
        let d = parabolic_dimension(&time_segment(20000), &deltas).unwrap();
        assert!((d.dimension - 2.0).abs() < 0.2, "{d:?}");
        let space: Vec<_> = (0..=4000).map(|i| pt(&[i as f64 / 4000.0, 0.0], 0.0)).collect();
        let d = parabolic_dimension(&SpacetimePointSet::new(2, space).unwrap(), &deltas).unwrap();
        assert!((d.dimension - 1.0).abs() < 0.2, "{d:?}");
        let one = SpacetimePointSet::new(3, vec![pt(&[0.1, 0.2, 0.3], 1.0)]).unwrap();
        let d = parabolic_dimension(&one, &deltas).unwrap();
        assert!(d.dimension.abs() < 0.1);
        assert!(parabolic_dimension(&one, &[0.1, 0.1, 0.2]).is_err());
    }

    #[test]
    fn greedy_beats_or_matches_grid_on_clusters() {
        let mut pts = Vec::new();
        for c in [[0.0, 0.0], [3.0, 1.0], [-2.0, 5.0]] {
            for i in 0..5 {
                for j in 0..5 {
                    pts.push(pt(
                        &[c[0] + 0.01 * i as f64, c[1] + 0.01 * j as f64],
                        0.001 * (i + j) as f64,
                    ));
                }
            }
        }
        let s = SpacetimePointSet::new(2, pts).unwrap();
        let g = premeasure(&s, 0.0, 0.4, CoverStrategy::Greedy).unwrap();
        let t = premeasure(&s, 0.0, 0.4, CoverStrategy::Grid).unwrap();
        assert!(g.covers(&s) && t.covers(&s));
        assert_eq!(g.count(), 3);
        assert!(g.count() <= t.count());
        assert_eq!(g.value, 3.0);
        // deterministic
        assert_eq!(premeasure(&s, 0.0, 0.4, CoverStrategy::Greedy).unwrap(), g);
    }

    #[test]
    fn extraction() {
        let v = |x: f64| pt(&[x], 1.0);
        let curves = vec![
            IndicatorCurve::from_samples(v(0.0), 2.0, vec![(0.4, 1.0), (0.2, 0.9), (0.1, 0.8)]),
            IndicatorCurve::from_samples(v(0.5), 2.0, vec![(0.4, 0.1), (0.2, 0.05), (0.1, 0.01)]),
            IndicatorCurve::from_samples(v(0.7), 2.0, vec![(0.4, 5.0)]),
        ];
        let s = extract_so(&curves, 0.5, 0.1).unwrap();
        assert_eq!(s.points(), &[v(0.0)]);
        let s = extract_so(&curves, 0.5, 0.3).unwrap();
        assert_eq!(s.points(), &[v(0.0)]);
        let s = extract_so(&curves, 0.5, 0.4).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(theta_at(&curves[2], 0.1), None);
        assert!(extract_so(&curves, 0.0, 0.1).is_err());
        assert!((theta_at(&curves[0], 0.1).unwrap() - 0.64).abs() < 1e-15);
    }
}
