//! Weighted covering quantities and the pressure estimates built on them.
//!
//! Every estimate is `(1/n) ln W` where `W` is the total weight
//! `sum_i exp(S_n^q phi(x_i))` of a family of orbit-metric balls: covering
//! more than `1 - eps` of an empirical measure (measure-theoretic variant),
//! or every point of a dense grid (topological variants). Centers are always
//! drawn from the sample or grid itself.

mod balls;
mod cover;
mod grid;
mod symbolic;
mod table;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

pub use balls::{BallGraph, PreparedPoints};
pub use cover::EXACT_CAP;
pub use grid::{Grid, GridLayout, GRID_CAP};
pub use symbolic::{
    cylinder_drift, exact_shift_pressure, log_word_count, potential_table, reference_measure_pressure,
    reference_topological_pressure,
};
pub use table::{convergence_table, Cell, CellResult, Experiment, FinalRow, PreparedExperiment, SummaryRow, Table};

use crate::error::{Error, Result};
use crate::measures::{neumaier_sum, EmpiricalMeasure, Provenance};
use crate::orbit_metrics::{orbit_distance, Family, MetricKind};
use crate::systems::{DynSystem, Point, Potential};
use cover::{RawCover, Stop};
use grid::check_eps;

/// Default truncation of the infimum over `q`.
pub const DEFAULT_Q_MAX: usize = 8;

/// Relative tolerance for re-derived cover weights.
const WEIGHT_RTOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoverMethod {
    Greedy,
    ExactExhaustive,
}

impl CoverMethod {
    pub fn name(self) -> &'static str {
        match self {
            CoverMethod::Greedy => "greedy",
            CoverMethod::ExactExhaustive => "exact",
        }
    }
}

impl fmt::Display for CoverMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CoverMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(CoverMethod::Greedy),
            "exact" | "exhaustive" => Ok(CoverMethod::ExactExhaustive),
            _ => Err(Error::invalid(format!("unknown cover method '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    MeasureTheoretic,
    TopologicalCover,
    TopologicalSpanning,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::MeasureTheoretic => "measure",
            Variant::TopologicalCover => "cover",
            Variant::TopologicalSpanning => "spanning",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "measure" => Ok(Variant::MeasureTheoretic),
            "cover" => Ok(Variant::TopologicalCover),
            "spanning" => Ok(Variant::TopologicalSpanning),
            _ => Err(Error::invalid(format!("unknown variant '{s}'"))),
        }
    }
}

/// A family of ball centers and what it achieves.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverSolution {
    pub centers: Vec<Point>,
    /// Positions of the centers in the candidate list, increasing.
    pub center_indices: Vec<usize>,
    /// `sum_i exp(S_n^q phi(x_i))`, summed in increasing index order.
    pub total_weight: f64,
    /// Measure (or grid fraction) covered by the union of the balls.
    pub covered_mass: f64,
    pub method: CoverMethod,
}

impl CoverSolution {
    fn from_raw(raw: RawCover, candidates: &[Point], method: CoverMethod) -> Self {
        let mut idx = raw.centers;
        idx.sort_unstable();
        CoverSolution {
            centers: idx.iter().map(|&i| candidates[i].clone()).collect(),
            center_indices: idx,
            total_weight: raw.total_weight,
            covered_mass: raw.covered_mass,
            method,
        }
    }
}

/// `(1/n) ln W` with everything needed to reproduce it.
#[derive(Clone, Debug, PartialEq)]
pub struct PressureEstimate {
    pub value: f64,
    pub n: usize,
    pub eps: f64,
    pub kind: MetricKind,
    pub variant: Variant,
    pub system: String,
    pub potential: String,
    /// Measure id (measure-theoretic) or grid description (topological).
    pub target: String,
    /// Number of candidate points.
    pub sample_size: usize,
    pub seed: Option<u64>,
    pub method: CoverMethod,
    pub centers: usize,
    pub covered_mass: f64,
    pub total_weight: f64,
}

fn weights(system: &DynSystem, phi: &Potential, points: &[Point], n: usize, q: usize) -> Result<Vec<f64>> {
    points
        .iter()
        .map(|p| system.birkhoff_sum(phi, p, n, q).map(libm::exp))
        .collect()
}

fn solve(
    graph: &BallGraph,
    weights: &[f64],
    masses: &[f64],
    stop: Stop,
    method: CoverMethod,
) -> Result<RawCover> {
    match method {
        CoverMethod::Greedy => cover::greedy(graph, weights, masses, stop),
        CoverMethod::ExactExhaustive => cover::exhaustive(graph, weights, masses, stop),
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::invalid("n must be >= 1"))
    } else {
        Ok(())
    }
}

/// Cheapest found family of `eps`-balls, centered at sample points, whose
/// union carries `mu`-mass strictly above `1 - eps`.
pub fn covering_weight(
    system: &DynSystem,
    phi: &Potential,
    mu: &EmpiricalMeasure,
    n: usize,
    eps: f64,
    kind: MetricKind,
    method: CoverMethod,
) -> Result<CoverSolution> {
    check_eps(eps)?;
    check_n(n)?;
    let points = mu.points();
    if method == CoverMethod::ExactExhaustive && points.len() > EXACT_CAP {
        return Err(Error::ExactTooLarge { size: points.len(), cap: EXACT_CAP });
    }
    let w = weights(system, phi, points, n, kind.q)?;
    let prepared = PreparedPoints::new(system, points, n, kind, eps)?;
    let graph = BallGraph::build(&prepared);
    let raw = solve(&graph, &w, mu.weights(), Stop::MassAbove(1.0 - eps), method)?;
    Ok(CoverSolution::from_raw(raw, points, method))
}

/// Cheapest found family of `eps`-balls centered at grid points that covers
/// every grid point.
pub fn topological_cover_weight(
    system: &DynSystem,
    phi: &Potential,
    n: usize,
    eps: f64,
    kind: MetricKind,
    grid: &Grid,
    method: CoverMethod,
) -> Result<CoverSolution> {
    check_eps(eps)?;
    check_n(n)?;
    grid.check_dense(system, n, kind.q, eps)?;
    let points = grid.points();
    if points.is_empty() {
        return Err(Error::invalid("grid is empty"));
    }
    if method == CoverMethod::ExactExhaustive && points.len() > EXACT_CAP {
        return Err(Error::ExactTooLarge { size: points.len(), cap: EXACT_CAP });
    }
    let w = weights(system, phi, points, n, kind.q)?;
    let prepared = PreparedPoints::new(system, points, n, kind, eps)?;
    let graph = BallGraph::build(&prepared);
    let masses = alloc::vec![1.0; points.len()];
    let mut raw = solve(&graph, &w, &masses, Stop::All, method)?;
    raw.covered_mass = 1.0;
    Ok(CoverSolution::from_raw(raw, points, method))
}

fn seed_of(mu: &EmpiricalMeasure) -> Option<u64> {
    match mu.provenance() {
        Provenance::IidSampler { seed, .. } => Some(*seed),
        _ => None,
    }
}

fn grid_id(grid: &Grid) -> String {
    match grid.layout() {
        GridLayout::Cylinders { cylinder_len } => format!("cylinders:{cylinder_len}"),
        GridLayout::CircleUniform { size } => format!("circle_grid:{size}"),
        GridLayout::Custom => format!("custom:{}", grid.len()),
    }
}

fn log_over_n(total_weight: f64, n: usize) -> Result<f64> {
    let v = libm::log(total_weight) / n as f64;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invalid(format!("cover weight {total_weight} has no finite logarithm")))
    }
}

/// `(1/n) ln` of [`covering_weight`].
pub fn measure_pressure_estimate(
    system: &DynSystem,
    phi: &Potential,
    mu: &EmpiricalMeasure,
    n: usize,
    eps: f64,
    kind: MetricKind,
    method: CoverMethod,
) -> Result<PressureEstimate> {
    let sol = covering_weight(system, phi, mu, n, eps, kind, method)?;
    Ok(PressureEstimate {
        value: log_over_n(sol.total_weight, n)?,
        n,
        eps,
        kind,
        variant: Variant::MeasureTheoretic,
        system: system.id(),
        potential: phi.id(),
        target: mu.id(),
        sample_size: mu.len(),
        seed: seed_of(mu),
        method,
        centers: sol.centers.len(),
        covered_mass: sol.covered_mass,
        total_weight: sol.total_weight,
    })
}

/// `(1/n) ln` of [`topological_cover_weight`].
pub fn topological_pressure_estimate(
    system: &DynSystem,
    phi: &Potential,
    n: usize,
    eps: f64,
    kind: MetricKind,
    grid: &Grid,
    method: CoverMethod,
) -> Result<PressureEstimate> {
    let sol = topological_cover_weight(system, phi, n, eps, kind, grid, method)?;
    Ok(PressureEstimate {
        value: log_over_n(sol.total_weight, n)?,
        n,
        eps,
        kind,
        variant: Variant::TopologicalCover,
        system: system.id(),
        potential: phi.id(),
        target: grid_id(grid),
        sample_size: grid.len(),
        seed: None,
        method,
        centers: sol.centers.len(),
        covered_mass: sol.covered_mass,
        total_weight: sol.total_weight,
    })
}

/// Greedy `(n, eps)`-spanning set for the Bowen metric, found within `grid`.
pub fn spanning_pressure(
    system: &DynSystem,
    phi: &Potential,
    n: usize,
    eps: f64,
    grid: &Grid,
) -> Result<PressureEstimate> {
    let mut est = topological_pressure_estimate(system, phi, n, eps, MetricKind::bowen(1), grid, CoverMethod::Greedy)?;
    est.variant = Variant::TopologicalSpanning;
    Ok(est)
}

/// What a sweep over `q` covers.
#[derive(Clone, Copy, Debug)]
pub enum Target<'a> {
    Measure(&'a EmpiricalMeasure),
    /// A grid per `q`; `None` builds the coarsest built-in grid for each `q`.
    Grid(Option<&'a Grid>),
}

/// Per-`q` estimates and their minimum.
#[derive(Clone, Debug, PartialEq)]
pub struct QSweep {
    pub per_q: Vec<PressureEstimate>,
    pub argmin_q: usize,
}

impl QSweep {
    pub fn best(&self) -> &PressureEstimate {
        &self.per_q[self.argmin_q - 1]
    }

    pub fn value(&self) -> f64 {
        self.best().value
    }

    /// Largest minus smallest per-`q` value.
    pub fn spread(&self) -> f64 {
        let (lo, hi) = self
            .per_q
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| (lo.min(e.value), hi.max(e.value)));
        hi - lo
    }
}

/// Estimates for `q = 1..=q_max` and the minimizing `q` (the smallest on ties).
#[allow(clippy::too_many_arguments)]
pub fn inf_over_q(
    system: &DynSystem,
    phi: &Potential,
    target: Target<'_>,
    n: usize,
    eps: f64,
    family: Family,
    q_max: usize,
    method: CoverMethod,
) -> Result<QSweep> {
    if q_max == 0 {
        return Err(Error::invalid("q_max must be >= 1"));
    }
    let mut per_q = Vec::with_capacity(q_max);
    for q in 1..=q_max {
        let kind = MetricKind::new(family, q)?;
        let est = match target {
            Target::Measure(mu) => measure_pressure_estimate(system, phi, mu, n, eps, kind, method)?,
            Target::Grid(Some(g)) => topological_pressure_estimate(system, phi, n, eps, kind, g, method)?,
            Target::Grid(None) => {
                let g = Grid::builtin(system, n, q, eps)?;
                topological_pressure_estimate(system, phi, n, eps, kind, &g, method)?
            }
        };
        per_q.push(est);
    }
    let mut argmin_q = 1;
    for (i, e) in per_q.iter().enumerate() {
        if e.value < per_q[argmin_q - 1].value {
            argmin_q = i + 1;
        }
    }
    Ok(QSweep { per_q, argmin_q })
}

/// Outcome of re-checking a cover by direct distance evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverCheck {
    pub covered_mass: f64,
    pub recomputed_weight: f64,
    pub constraint_met: bool,
    pub weight_matches: bool,
}

impl CoverCheck {
    pub fn valid(&self) -> bool {
        self.constraint_met && self.weight_matches
    }
}

fn check_cover(
    system: &DynSystem,
    phi: &Potential,
    points: &[Point],
    masses: &[f64],
    n: usize,
    eps: f64,
    kind: MetricKind,
    sol: &CoverSolution,
) -> Result<(f64, f64, bool)> {
    let mut covered = Vec::with_capacity(points.len());
    let mut all = true;
    for (p, &m) in points.iter().zip(masses) {
        let mut hit = false;
        for c in &sol.centers {
            if orbit_distance(system, c, p, n, kind)? < eps {
                hit = true;
                break;
            }
        }
        all &= hit;
        if hit {
            covered.push(m);
        }
    }
    let weights: Vec<f64> = sol
        .centers
        .iter()
        .map(|c| system.birkhoff_sum(phi, c, n, kind.q).map(libm::exp))
        .collect::<Result<_>>()?;
    Ok((neumaier_sum(covered.into_iter()), neumaier_sum(weights.into_iter()), all))
}

fn weight_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= WEIGHT_RTOL * a.abs().max(b.abs())
}

/// Re-derives the covered mass and weight of a measure cover from full
/// distance evaluations, independently of the ball graph.
#[allow(clippy::too_many_arguments)]
pub fn verify_measure_cover(
    system: &DynSystem,
    phi: &Potential,
    mu: &EmpiricalMeasure,
    n: usize,
    eps: f64,
    kind: MetricKind,
    sol: &CoverSolution,
) -> Result<CoverCheck> {
    let (mass, weight, _) = check_cover(system, phi, mu.points(), mu.weights(), n, eps, kind, sol)?;
    Ok(CoverCheck {
        covered_mass: mass,
        recomputed_weight: weight,
        constraint_met: mass > 1.0 - eps,
        weight_matches: weight_close(weight, sol.total_weight),
    })
}

/// Grid counterpart of [`verify_measure_cover`]: every grid point must be covered.
pub fn verify_grid_cover(
    system: &DynSystem,
    phi: &Potential,
    grid: &Grid,
    n: usize,
    eps: f64,
    kind: MetricKind,
    sol: &CoverSolution,
) -> Result<CoverCheck> {
    let ones = alloc::vec![1.0 / grid.len() as f64; grid.len()];
    let (mass, weight, all) = check_cover(system, phi, grid.points(), &ones, n, eps, kind, sol)?;
    Ok(CoverCheck {
        covered_mass: if all { 1.0 } else { mass },
        recomputed_weight: weight,
        constraint_met: all,
        weight_matches: weight_close(weight, sol.total_weight),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{sample_measure, MeasureSpec};
    use crate::systems::TransitionMatrix;
    use alloc::vec;

    fn shift() -> DynSystem {
        DynSystem::full_shift(2, 40).unwrap()
    }

    #[test]
    fn point_mass_cover() {
        let t = shift();
        let x = Point::symbolic(vec![1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 1, 0], 2).unwrap();
        let mu = EmpiricalMeasure::point_mass(x.clone());
        let sol = covering_weight(&t, &Potential::Zero, &mu, 4, 0.1, MetricKind::fk(1), CoverMethod::Greedy).unwrap();
        assert_eq!(sol.centers, vec![x.clone()]);
        assert_eq!(sol.total_weight, 1.0);
        let est = measure_pressure_estimate(&t, &Potential::Zero, &mu, 4, 0.1, MetricKind::bowen(1), CoverMethod::Greedy)
            .unwrap();
        assert_eq!(est.value, 0.0);
        let phi = Potential::FirstSymbol(vec![0.3, -0.2]);
        let sol = covering_weight(&t, &phi, &mu, 4, 0.1, MetricKind::mean(2), CoverMethod::ExactExhaustive).unwrap();
        let s = t.birkhoff_sum(&phi, &x, 4, 2).unwrap();
        assert_eq!(sol.total_weight, libm::exp(s));
    }

    #[test]
    fn greedy_within_log_factor_of_exact() {
        let t = shift();
        let mu = sample_measure(&MeasureSpec::uniform_bernoulli(2), &t, 12, 3).unwrap();
        let g = covering_weight(&t, &Potential::Zero, &mu, 3, 0.2, MetricKind::bowen(1), CoverMethod::Greedy).unwrap();
        let e = covering_weight(&t, &Potential::Zero, &mu, 3, 0.2, MetricKind::bowen(1), CoverMethod::ExactExhaustive)
            .unwrap();
        assert!(e.total_weight <= g.total_weight);
        assert!(g.total_weight <= (1.0 + libm::log(12.0)) * e.total_weight);
        for sol in [&g, &e] {
            let check = verify_measure_cover(&t, &Potential::Zero, &mu, 3, 0.2, MetricKind::bowen(1), sol).unwrap();
            assert!(check.valid());
            // with phi = 0 the weight is the number of centers
            assert_eq!(sol.total_weight, sol.centers.len() as f64);
        }
    }

    #[test]
    fn exact_too_large() {
        let t = shift();
        let mu = sample_measure(&MeasureSpec::uniform_bernoulli(2), &t, 21, 3).unwrap();
        let err = covering_weight(&t, &Potential::Zero, &mu, 3, 0.2, MetricKind::bowen(1), CoverMethod::ExactExhaustive);
        assert_eq!(err.err().map(|e| e.code()), Some("EXACT_TOO_LARGE"));
    }

    #[test]
    fn spanning_counts_cylinders() {
        let t = DynSystem::full_shift(2, 64).unwrap();
        let grid = Grid::builtin(&t, 8, 1, 0.0625).unwrap();
        let est = spanning_pressure(&t, &Potential::Zero, 8, 0.0625, &grid).unwrap();
        assert_eq!(est.centers, 1 << 12);
        assert!((est.value - 12.0 / 8.0 * core::f64::consts::LN_2).abs() < 1e-12);
        let sol = topological_cover_weight(&t, &Potential::Zero, 8, 0.0625, MetricKind::bowen(1), &grid, CoverMethod::Greedy)
            .unwrap();
        assert!(verify_grid_cover(&t, &Potential::Zero, &grid, 8, 0.0625, MetricKind::bowen(1), &sol).unwrap().valid());
        let coarse = Grid::builtin(&t, 6, 1, 0.0625).unwrap();
        let err = spanning_pressure(&t, &Potential::Zero, 8, 0.0625, &coarse);
        assert_eq!(err.err().map(|e| e.code()), Some("GRID_TOO_COARSE"));
    }

    #[test]
    fn fk_cover_is_cheaper_than_bowen() {
        let t = DynSystem::full_shift(2, 64).unwrap();
        let grid = Grid::builtin(&t, 6, 1, 0.25).unwrap();
        let b = topological_cover_weight(&t, &Potential::Zero, 6, 0.25, MetricKind::bowen(1), &grid, CoverMethod::Greedy)
            .unwrap();
        let f = topological_cover_weight(&t, &Potential::Zero, 6, 0.25, MetricKind::fk(1), &grid, CoverMethod::Greedy)
            .unwrap();
        assert!(f.total_weight <= b.total_weight);
    }

    #[test]
    fn single_word_space() {
        let t = DynSystem::sft(TransitionMatrix::from_rows(&[vec![1]]).unwrap(), 32).unwrap();
        let phi = Potential::Constant(0.4);
        let grid = Grid::builtin(&t, 5, 1, 0.1).unwrap();
        let sol = topological_cover_weight(&t, &phi, 5, 0.1, MetricKind::fk(1), &grid, CoverMethod::Greedy).unwrap();
        assert_eq!(sol.centers.len(), 1);
        assert!((sol.total_weight - libm::exp(2.0)).abs() < 1e-12);
    }

    #[test]
    fn inf_over_q_basics() {
        let t = shift();
        let mu = sample_measure(&MeasureSpec::uniform_bernoulli(2), &t, 200, 9).unwrap();
        let one = inf_over_q(&t, &Potential::Zero, Target::Measure(&mu), 4, 0.2, Family::Mean, 1, CoverMethod::Greedy)
            .unwrap();
        let direct =
            measure_pressure_estimate(&t, &Potential::Zero, &mu, 4, 0.2, MetricKind::mean(1), CoverMethod::Greedy).unwrap();
        assert_eq!(one.best(), &direct);
        let all = inf_over_q(&t, &Potential::Zero, Target::Measure(&mu), 4, 0.2, Family::Mean, 4, CoverMethod::Greedy)
            .unwrap();
        assert_eq!(all.per_q.len(), 4);
        assert!(all.value() <= direct.value);
        assert_eq!(all.best().kind.q, all.argmin_q);
    }
}
