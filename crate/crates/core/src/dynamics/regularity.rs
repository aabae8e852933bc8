//! Pairwise comparison of positions and directions of the paths of a
//! dynamical coupling at interior times.

use alloc::vec::Vec;

use super::DynamicalCoupling;
use crate::geometry::{Direction, Event, SAMPLES_PER_GEODESIC};
use crate::math;

/// Position gaps below this count as coincident.
pub const CROSSING_POSITION_TOL: f64 = 1e-9;
/// Direction gaps above this make a coincidence a crossing.
pub const CROSSING_DIRECTION_TOL: f64 = 1e-6;
/// Direction gaps below this are left out of the exponent fit.
const FIT_DIRECTION_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    /// `max dir² / pos` over pairs with `pos > 1e-9`.
    pub max_ratio: f64,
    /// Slope of `ln dir` against `ln pos` on the smallest tenth of the
    /// position gaps; `0.0` when `degenerate`.
    pub fitted_exponent: f64,
    pub fit_intercept: f64,
    /// Coincident positions with distinct directions.
    pub crossings: usize,
    pub eps_time: f64,
    pub pairs_tested: usize,
    pub fit_points: usize,
    /// Set when fewer than two paths exist or the fit is ill-posed.
    pub degenerate: bool,
    /// Whether the endpoint supports were disjoint.
    pub disjoint_supports: bool,
}

/// Times of the geodesic sample grid inside `[eps_time, 1 − eps_time]`.
fn interior_grid(eps_time: f64) -> Vec<f64> {
    (0..SAMPLES_PER_GEODESIC)
        .map(|k| k as f64 / (SAMPLES_PER_GEODESIC - 1) as f64)
        .filter(|s| *s >= eps_time - 1e-15 && *s <= 1.0 - eps_time + 1e-15)
        .collect()
}

/// Report over the sample grid inside `[eps_time, 1 − eps_time]`.
pub fn regularity_report(dc: &DynamicalCoupling, eps_time: f64) -> RegularityReport {
    let mut r = regularity_report_at(dc, &interior_grid(eps_time));
    r.eps_time = eps_time;
    r
}

fn state_at(dc: &DynamicalCoupling, path: usize, s: f64) -> (Event, Option<Direction>) {
    let g = &dc.paths()[path].geodesic;
    let k = s * (SAMPLES_PER_GEODESIC - 1) as f64;
    // grid times read the stored samples
    if libm::round(k) == k {
        let sample = &g.samples()[k as usize];
        return (sample.point.clone(), sample.tangent.direction());
    }
    (g.point_at(s), g.tangent_at(s).direction())
}

/// Report at the given curve parameters.
pub fn regularity_report_at(dc: &DynamicalCoupling, times: &[f64]) -> RegularityReport {
    let n = dc.len();
    let disjoint_supports = dc.paths().iter().all(|p| {
        dc.paths().iter().all(|q| *p.geodesic.start() != *q.geodesic.end())
    });
    let mut report = RegularityReport {
        max_ratio: 0.0,
        fitted_exponent: 0.0,
        fit_intercept: 0.0,
        crossings: 0,
        eps_time: times.iter().copied().fold(f64::INFINITY, f64::min).min(0.5),
        pairs_tested: 0,
        fit_points: 0,
        degenerate: true,
        disjoint_supports,
    };
    if n < 2 {
        return report;
    }
    let mut gaps: Vec<(f64, f64)> = Vec::new();
    for &s in times {
        let states: Vec<(Event, Option<Direction>)> = (0..n).map(|k| state_at(dc, k, s)).collect();
        for a in 0..n {
            for b in (a + 1)..n {
                let (pa, da) = &states[a];
                let (pb, db) = &states[b];
                let (Some(da), Some(db)) = (da, db) else { continue };
                let pos = pa.distance(pb);
                let dir = da.angle_to(db);
                report.pairs_tested += 1;
                if pos < CROSSING_POSITION_TOL {
                    if dir > CROSSING_DIRECTION_TOL {
                        report.crossings += 1;
                    }
                    continue;
                }
                report.max_ratio = report.max_ratio.max(dir * dir / pos);
                if dir > FIT_DIRECTION_FLOOR {
                    gaps.push((pos, dir));
                }
            }
        }
    }
    gaps.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    let take = gaps.len().div_ceil(10).max(2).min(gaps.len());
    let (xs, ys): (Vec<f64>, Vec<f64>) = gaps[..take].iter().map(|(p, d)| (math::ln(*p), math::ln(*d))).unzip();
    if let Some((slope, intercept)) = math::fit_line(&xs, &ys) {
        report.fitted_exponent = slope;
        report.fit_intercept = intercept;
        report.fit_points = take;
        report.degenerate = false;
    }
    report
}
