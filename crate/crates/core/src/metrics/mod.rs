//! Distances between point sets and measures, and the root/critical-point
//! pairing diagnostics.

mod flow;
mod prohorov;

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measures::{Atom, RootSample};
use crate::polyroots::{log_derivative_c64, CriticalPointSet, SolverError};
use crate::summation::NeumaierSum;

pub use flow::FlowNetwork;
pub use prohorov::{prohorov_distance, prohorov_feasible, CAPACITY_SCALE};

/// How far the weights of a [`DiscreteMeasure`] may sum from 1.
pub const WEIGHT_TOL: f64 = 1e-12;

/// Default number of boundary points in [`lower_modulus`].
pub const DEFAULT_GRID: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("point coincides with sample point {index}")]
    Pole { index: usize },
}

/// A finitely supported probability measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Atom>", into = "Vec<Atom>")]
pub struct DiscreteMeasure {
    atoms: Vec<Atom>,
}

impl DiscreteMeasure {
    /// Validates the weights and merges atoms at the same location.
    pub fn new(atoms: Vec<Atom>) -> Result<Self, MetricsError> {
        if atoms.is_empty() {
            return Err(MetricsError::InvalidMeasure("no atoms".into()));
        }
        for a in &atoms {
            if !(a.weight > 0.0 && a.weight.is_finite()) {
                return Err(MetricsError::InvalidMeasure(format!("weight {} at {}", a.weight, a.at)));
            }
            if !(a.at.re.is_finite() && a.at.im.is_finite()) {
                return Err(MetricsError::InvalidMeasure(format!("location {}", a.at)));
            }
        }
        let total: NeumaierSum = atoms.iter().map(|a| a.weight).collect();
        if (total.value() - 1.0).abs() > WEIGHT_TOL {
            return Err(MetricsError::InvalidMeasure(format!("weights sum to {}", total.value())));
        }
        Ok(Self { atoms: merge(atoms) })
    }

    /// Like [`new`](Self::new) but rescales positive weights to sum to 1.
    pub fn normalized(mut atoms: Vec<Atom>) -> Result<Self, MetricsError> {
        let total: NeumaierSum = atoms.iter().map(|a| a.weight).collect();
        let total = total.value();
        if !(total > 0.0 && total.is_finite()) {
            return Err(MetricsError::InvalidMeasure(format!("weights sum to {total}")));
        }
        for a in &mut atoms {
            a.weight /= total;
        }
        Self::new(atoms)
    }

    /// The empirical measure of `points`.
    pub fn uniform(points: &[Complex64]) -> Result<Self, MetricsError> {
        if points.is_empty() {
            return Err(MetricsError::InvalidMeasure("no points".into()));
        }
        let w = 1.0 / points.len() as f64;
        Self::normalized(points.iter().map(|&at| Atom { at, weight: w }).collect())
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

impl TryFrom<Vec<Atom>> for DiscreteMeasure {
    type Error = MetricsError;

    fn try_from(atoms: Vec<Atom>) -> Result<Self, MetricsError> {
        Self::new(atoms)
    }
}

impl From<DiscreteMeasure> for Vec<Atom> {
    fn from(m: DiscreteMeasure) -> Self {
        m.atoms
    }
}

/// Merge atoms at identical locations, keeping first-seen order.
fn merge(atoms: Vec<Atom>) -> Vec<Atom> {
    let mut index: HashMap<(u64, u64), usize> = HashMap::new();
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        // -0.0 and 0.0 are the same location.
        let key = ((a.at.re + 0.0).to_bits(), (a.at.im + 0.0).to_bits());
        match index.get(&key) {
            Some(&i) => out[i].weight += a.weight,
            None => {
                index.insert(key, out.len());
                out.push(a);
            }
        }
    }
    out
}

/// Kolmogorov–Smirnov distance between the empirical law of `sample` and
/// the distribution function `cdf`: the supremum is taken at the jumps,
/// on both sides of each.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64, MetricsError> {
    if sample.is_empty() {
        return Err(MetricsError::InvalidArgument("empty sample".into()));
    }
    if sample.iter().any(|x| x.is_nan()) {
        return Err(MetricsError::InvalidArgument("NaN in sample".into()));
    }
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let mut j = i;
        while j + 1 < xs.len() && xs[j + 1] == xs[i] {
            j += 1;
        }
        let f = cdf(xs[i]);
        let below = i as f64 / n;
        let above = (j + 1) as f64 / n;
        d = d.max((above - f).abs()).max((f - below).abs());
        i = j + 1;
    }
    Ok(d)
}

/// `V(z) = (1/n) sum_j 1/(z - X_j)`, the Cauchy transform of the empirical
/// measure.
pub fn empirical_potential(sample: &RootSample, z: Complex64) -> Result<Complex64, MetricsError> {
    empirical_potential_of(&sample.roots, z)
}

fn empirical_potential_of(roots: &[Complex64], z: Complex64) -> Result<Complex64, MetricsError> {
    if roots.is_empty() {
        return Err(MetricsError::InvalidArgument("empty sample".into()));
    }
    let g = log_derivative_c64(roots, z).map_err(|e| match e {
        SolverError::Pole { index } => MetricsError::Pole { index },
        other => MetricsError::InvalidArgument(other.to_string()),
    })?;
    Ok(g / roots.len() as f64)
}

/// Grid estimate of `inf |V|` over a closed ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerModulus {
    pub value: f64,
    pub center: Complex64,
    pub radius: f64,
}

/// Smallest `|V|` found on `B_{C/n}(center)`: the centre, `grid` points on
/// the boundary, and one Newton step for `V = 0` from the best of those
/// (kept only if it stays in the ball and improves). Zero when a sample
/// point lies in the closed ball.
///
/// The true infimum can only be smaller, so this is an upper estimate.
pub fn lower_modulus(sample: &RootSample, center: Complex64, c: f64, grid: usize) -> Result<LowerModulus, MetricsError> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(MetricsError::InvalidArgument(format!("C = {c}")));
    }
    if grid < 8 {
        return Err(MetricsError::InvalidArgument(format!("grid = {grid} < 8")));
    }
    let roots = &sample.roots;
    if roots.is_empty() {
        return Err(MetricsError::InvalidArgument("empty sample".into()));
    }
    let radius = c / roots.len() as f64;
    let done = |value| Ok(LowerModulus { value, center, radius });
    if roots.iter().any(|x| (x - center).norm() <= radius) {
        return done(0.0);
    }
    let v = |z: Complex64| empirical_potential_of(roots, z);
    let mut best = center;
    let mut best_v = v(center)?.norm();
    for k in 0..grid {
        let z = center + Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / grid as f64);
        let m = v(z)?.norm();
        if m < best_v {
            best = z;
            best_v = m;
        }
    }
    // V' = -(1/n) sum 1/(z - X)^2.
    let vb = v(best)?;
    let dv: Complex64 = -roots.iter().map(|x| (best - x).powi(-2)).sum::<Complex64>() / roots.len() as f64;
    if dv.norm() > 0.0 {
        let step = best - vb / dv;
        if (step - center).norm() <= radius {
            best_v = best_v.min(v(step)?.norm());
        }
    }
    done(best_v)
}

/// Classification of roots by whether they own a nearby critical point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairingReport {
    pub n: usize,
    #[serde(rename = "C")]
    pub c: f64,
    pub matched: usize,
    pub crowded: usize,
    pub unmatched: usize,
    /// Largest distance from a matched root to its nearest critical point.
    pub max_match_dist: f64,
}

impl PairingReport {
    pub fn matched_fraction(&self) -> f64 {
        self.matched as f64 / self.n as f64
    }
}

/// Classify each root `X` with `r = C/n`:
///
/// * `crowded` if a root at a different location is within `2r`;
/// * `matched` if `B_r(X)` holds exactly `max(m - 1, 1)` critical points,
///   where `m` counts the roots at exactly `X`;
/// * `unmatched` otherwise.
///
/// A root of multiplicity `m` is always a critical point of multiplicity
/// `m - 1`; counting those as its match is what makes an atom's roots pair
/// up.
pub fn pairing_report(roots: &[Complex64], cps: &CriticalPointSet, c: f64) -> Result<PairingReport, MetricsError> {
    let n = roots.len();
    if n == 0 {
        return Err(MetricsError::InvalidArgument("no roots".into()));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(MetricsError::InvalidArgument(format!("C = {c}")));
    }
    let r = c / n as f64;
    let root_grid = PointGrid::new(roots, 2.0 * r);
    let cp_grid = PointGrid::new(&cps.points, r);
    let mut report = PairingReport { n, c, matched: 0, crowded: 0, unmatched: 0, max_match_dist: 0.0 };
    for x in roots {
        let mut mult = 0;
        let mut crowded = false;
        root_grid.for_each_near(*x, |y| {
            if y == *x {
                mult += 1;
            } else if (y - x).norm() <= 2.0 * r {
                crowded = true;
            }
        });
        if crowded {
            report.crowded += 1;
            continue;
        }
        let mut inside = 0;
        let mut nearest = f64::INFINITY;
        cp_grid.for_each_near(*x, |p| {
            let d = (p - x).norm();
            if d < r {
                inside += 1;
                nearest = nearest.min(d);
            }
        });
        if inside == mult.max(2) - 1 {
            report.matched += 1;
            report.max_match_dist = report.max_match_dist.max(nearest);
        } else {
            report.unmatched += 1;
        }
    }
    Ok(report)
}

/// Bucket grid for fixed-radius neighbour queries.
struct PointGrid<'a> {
    cell: f64,
    points: &'a [Complex64],
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl<'a> PointGrid<'a> {
    fn new(points: &'a [Complex64], radius: f64) -> Self {
        let cell = radius.max(f64::MIN_POSITIVE);
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            buckets.entry(Self::key(cell, *p)).or_default().push(i);
        }
        Self { cell, points, buckets }
    }

    fn key(cell: f64, p: Complex64) -> (i64, i64) {
        ((p.re / cell).floor() as i64, (p.im / cell).floor() as i64)
    }

    /// Visit every point within one cell of `z` (a superset of the ball).
    fn for_each_near(&self, z: Complex64, mut f: impl FnMut(Complex64)) {
        let (kx, ky) = Self::key(self.cell, z);
        for dx in -1..=1i64 {
            for dy in -1..=1i64 {
                if let Some(b) = self.buckets.get(&(kx.saturating_add(dx), ky.saturating_add(dy))) {
                    for &i in b {
                        f(self.points[i]);
                    }
                }
            }
        }
    }
}

/// `min_{j < n} |X_j - X_n|`: the distance from the last point to the rest.
pub fn min_gap_statistic(sample: &[Complex64]) -> Result<f64, MetricsError> {
    let Some((last, rest)) = sample.split_last() else {
        return Err(MetricsError::InvalidArgument("empty sample".into()));
    };
    if rest.is_empty() {
        return Err(MetricsError::InvalidArgument("need at least two points".into()));
    }
    Ok(rest.iter().map(|x| (x - last).norm()).fold(f64::INFINITY, f64::min))
}

/// Distribution function of `|X|` for the rotation-invariant measures
/// centred at the origin; `None` for the others.
pub fn radial_cdf(spec: &crate::measures::MeasureSpec) -> Option<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
    use crate::measures::MeasureSpec::*;
    match *spec {
        UniformCircle { radius } => Some(Box::new(move |r| if r >= radius { 1.0 } else { 0.0 })),
        UniformDisk { radius } => Some(Box::new(move |r| (r / radius).clamp(0.0, 1.0).powi(2))),
        UniformAnnulus { r_inner, r_outer } => Some(Box::new(move |r| {
            let r = r.clamp(r_inner, r_outer);
            (r * r - r_inner * r_inner) / (r_outer * r_outer - r_inner * r_inner)
        })),
        ComplexGaussian { mean, scale } if mean == Complex64::new(0.0, 0.0) => {
            Some(Box::new(move |r| if r <= 0.0 { 0.0 } else { -(-(r / scale).powi(2)).exp_m1() }))
        }
        _ => None,
    }
}

/// Distribution function of `arg X` on `(-pi, pi]` when it is uniform.
pub fn angle_cdf(spec: &crate::measures::MeasureSpec) -> Option<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
    let _ = radial_cdf(spec)?;
    Some(Box::new(|t| ((t + std::f64::consts::PI) / std::f64::consts::TAU).clamp(0.0, 1.0)))
}
