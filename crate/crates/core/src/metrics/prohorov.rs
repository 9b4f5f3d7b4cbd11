//! Prohorov distance between finitely supported measures.
//!
//! `d_P(mu, nu) <= eps` exactly when some coupling moves all but `eps` of the
//! mass by at most `eps`. For fixed `eps` that is a transportation problem on
//! the bipartite graph joining atoms at distance `<= eps`, decided by one
//! maximum flow; the distance itself is found by bisection on `eps`.

use std::collections::HashMap;

use num_complex::Complex64;

use super::flow::FlowNetwork;
use super::{DiscreteMeasure, MetricsError};

/// Total integer capacity each measure is rounded to.
pub const CAPACITY_SCALE: u64 = 1_000_000_000_000;

/// Largest-remainder rounding of the weights to integers summing to
/// [`CAPACITY_SCALE`].
pub(super) fn integer_weights(m: &DiscreteMeasure) -> Vec<u64> {
    let scale = CAPACITY_SCALE as f64;
    let total: f64 = m.atoms().iter().map(|a| a.weight).sum();
    let exact: Vec<f64> = m.atoms().iter().map(|a| a.weight / total * scale).collect();
    let mut units: Vec<u64> = exact.iter().map(|x| x.floor() as u64).collect();
    let assigned: u64 = units.iter().sum();
    let mut order: Vec<usize> = (0..units.len()).collect();
    order.sort_by(|&i, &j| (exact[j] - exact[j].floor()).total_cmp(&(exact[i] - exact[i].floor())).then(i.cmp(&j)));
    if assigned <= CAPACITY_SCALE {
        let short = (CAPACITY_SCALE - assigned) as usize;
        for &i in order.iter().cycle().take(short) {
            units[i] += 1;
        }
    } else {
        let over = (assigned - CAPACITY_SCALE) as usize;
        for &i in order.iter().rev().cycle().take(over) {
            units[i] -= 1;
        }
    }
    units
}

struct Prepared {
    mu: Vec<Complex64>,
    nu: Vec<Complex64>,
    mu_units: Vec<u64>,
    nu_units: Vec<u64>,
}

impl Prepared {
    fn new(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Self {
        Self {
            mu: mu.atoms().iter().map(|a| a.at).collect(),
            nu: nu.atoms().iter().map(|a| a.at).collect(),
            mu_units: integer_weights(mu),
            nu_units: integer_weights(nu),
        }
    }

    /// Mass that can be moved by at most `eps`.
    fn coupled_mass(&self, eps: f64) -> u64 {
        let (m, k) = (self.mu.len(), self.nu.len());
        let source = m + k;
        let sink = source + 1;
        let mut g = FlowNetwork::new(m + k + 2);
        for (i, &u) in self.mu_units.iter().enumerate() {
            g.add_edge(source, i, u);
        }
        for (j, &u) in self.nu_units.iter().enumerate() {
            g.add_edge(m + j, sink, u);
        }
        let cell = eps.max(f64::MIN_POSITIVE);
        let key = |p: Complex64| ((p.re / cell).floor() as i64, (p.im / cell).floor() as i64);
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (j, p) in self.nu.iter().enumerate() {
            buckets.entry(key(*p)).or_default().push(j);
        }
        for (i, p) in self.mu.iter().enumerate() {
            let (kx, ky) = key(*p);
            for dx in -1..=1i64 {
                for dy in -1..=1i64 {
                    let Some(b) = buckets.get(&(kx.saturating_add(dx), ky.saturating_add(dy))) else {
                        continue;
                    };
                    for &j in b {
                        if (p - self.nu[j]).norm() <= eps {
                            g.add_edge(i, m + j, CAPACITY_SCALE);
                        }
                    }
                }
            }
        }
        g.max_flow(source, sink)
    }

    fn feasible(&self, eps: f64) -> bool {
        if eps >= 1.0 {
            return true;
        }
        let need = CAPACITY_SCALE - (eps * CAPACITY_SCALE as f64).floor() as u64;
        self.coupled_mass(eps) >= need
    }
}

/// Whether `d_P(mu, nu) <= eps`.
pub fn prohorov_feasible(mu: &DiscreteMeasure, nu: &DiscreteMeasure, eps: f64) -> bool {
    Prepared::new(mu, nu).feasible(eps)
}

/// Prohorov distance, to within `tol`.
///
/// The returned value is the upper end of the final bracket, so it is itself
/// feasible and at most `tol` above the true distance. Never exceeds 1.
pub fn prohorov_distance(mu: &DiscreteMeasure, nu: &DiscreteMeasure, tol: f64) -> Result<f64, MetricsError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(MetricsError::InvalidArgument(format!("tol = {tol}")));
    }
    let p = Prepared::new(mu, nu);
    if p.feasible(0.0) {
        return Ok(0.0);
    }
    // Gallop up from a small radius: small radii give sparse graphs.
    let mut lo = 0.0;
    let mut hi = tol.max(1.0 / 1024.0).min(1.0);
    while !p.feasible(hi) {
        lo = hi;
        hi = (2.0 * hi).min(1.0);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if p.feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

