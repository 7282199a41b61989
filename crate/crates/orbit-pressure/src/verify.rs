//! Property suites run by the `verify` command.
//!
//! Each suite draws deterministic random instances from the core samplers and
//! compares the library against an independent brute-force evaluation.

use orbit_pressure_core::estimators::{
    covering_weight, topological_cover_weight, verify_grid_cover, verify_measure_cover, CoverMethod, Grid,
    EXACT_CAP,
};
use orbit_pressure_core::measures::{sample_measure, MeasureSpec};
use orbit_pressure_core::orbit_metrics::{match_value, MatchParams};
use orbit_pressure_core::systems::GOLDEN_CONJUGATE;
use orbit_pressure_core::{
    bowen_distance, fk_distance, maxmean_distance, mean_distance, measure_pressure_estimate, orbit_distance,
    CircleFn, DynSystem, Family, MetricKind, Point, Potential, TransitionMatrix,
};

use crate::error::CliResult;

/// Outcome of one property over all of its cases.
#[derive(Clone, Debug, PartialEq)]
pub struct PropertyResult {
    pub suite: &'static str,
    pub property: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Largest violation magnitude seen; 0 when none.
    pub worst: f64,
    pub detail: String,
}

impl PropertyResult {
    fn new(suite: &'static str, property: &'static str) -> Self {
        PropertyResult { suite, property, cases: 0, failures: 0, worst: 0.0, detail: String::new() }
    }

    /// Records one case whose violation is `excess` (a case fails iff `excess > tol`).
    fn record(&mut self, excess: f64, tol: f64) {
        self.cases += 1;
        let excess = if excess.is_nan() { f64::INFINITY } else { excess };
        if excess > tol {
            self.failures += 1;
        }
        self.worst = self.worst.max(excess.max(0.0));
    }

    fn check(&mut self, ok: bool) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            self.worst = self.worst.max(1.0);
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

/// Knobs for a verify run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub n_max: usize,
    pub seed: u64,
    /// Makes the matching oracle accept pairs at distance exactly `delta`.
    pub inject_fault: bool,
}

pub fn run_suite(name: &str, opts: &VerifyOptions) -> CliResult<Vec<PropertyResult>> {
    let n_max = opts.n_max.max(1);
    Ok(match name {
        "chain" => chain(n_max, opts.seed)?,
        "pseudometric" => pseudometric(n_max, opts.seed)?,
        "fk-oracle" => fk_oracle(n_max, opts.seed, opts.inject_fault)?,
        "fk-infimum" => fk_infimum(n_max, opts.seed)?,
        "cover-sandwich" => cover_sandwich(opts.seed)?,
        "cover-validity" => cover_validity(opts.seed)?,
        "potential-shift" => potential_shift(opts.seed)?,
        other => return Err(crate::error::CliError::usage(format!("unknown suite {other:?}"))),
    })
}

fn mix(seed: u64, a: u64, b: u64) -> u64 {
    // splitmix64 finalizer over the combined inputs
    let mut z = seed ^ a.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ b.wrapping_mul(0xc2b2_ae3d_27d4_eb4f);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn systems(word_length: usize) -> CliResult<Vec<(DynSystem, MeasureSpec)>> {
    Ok(vec![
        (DynSystem::full_shift(2, word_length)?, MeasureSpec::uniform_bernoulli(2)),
        (DynSystem::golden_mean(word_length)?, MeasureSpec::parry(&TransitionMatrix::golden_mean())?),
        (DynSystem::doubling(), MeasureSpec::LebesgueCircle),
        (DynSystem::rotation(GOLDEN_CONJUGATE)?, MeasureSpec::LebesgueCircle),
    ])
}

fn draw(system: &DynSystem, spec: &MeasureSpec, count: usize, seed: u64) -> CliResult<Vec<Point>> {
    Ok(sample_measure(spec, system, count, seed)?.points().to_vec())
}

const CHAIN_PAIRS: usize = 1000;
const TRIPLES: usize = 1000;
const ORACLE_CASES: usize = 200;

fn chain(n_max: usize, seed: u64) -> CliResult<Vec<PropertyResult>> {
    let mut mm = PropertyResult::new("chain", "mean <= maxmean");
    let mut mb = PropertyResult::new("chain", "maxmean <= bowen");
    let mut fb = PropertyResult::new("chain", "fk <= bowen");
    let horizon = 2 * n_max;
    for (s, (t, spec)) in systems(horizon * 4 + 8)?.iter().enumerate() {
        for q in [1usize, 2, 4] {
            let pts = draw(t, spec, 2 * CHAIN_PAIRS, mix(seed, s as u64, q as u64))?;
            for (i, pair) in pts.chunks(2).enumerate() {
                let n = 1 + i % horizon;
                let (x, y) = (&pair[0], &pair[1]);
                let mean = mean_distance(t, x, y, n, q)?;
                let maxmean = maxmean_distance(t, x, y, n, q)?;
                let bowen = bowen_distance(t, x, y, n, q)?;
                let fk = fk_distance(t, x, y, n, q)?;
                mm.record(mean - maxmean, 1e-12);
                mb.record(maxmean - bowen, 1e-12);
                fb.record(fk - bowen, 1e-12);
            }
        }
    }
    Ok(vec![mm, mb, fb])
}

fn pseudometric(n_max: usize, seed: u64) -> CliResult<Vec<PropertyResult>> {
    let mut sym = PropertyResult::new("pseudometric", "symmetry");
    let mut zero = PropertyResult::new("pseudometric", "d(x,x) = 0");
    let mut tri = PropertyResult::new("pseudometric", "triangle inequality");
    let horizon = 2 * n_max;
    for (s, (t, spec)) in systems(horizon * 2 + 8)?.iter().enumerate() {
        let pts = draw(t, spec, 3 * TRIPLES, mix(seed, 100 + s as u64, 0))?;
        for (i, p) in pts.chunks(3).enumerate() {
            let n = 1 + i % horizon;
            let q = 1 + i % 2;
            for family in Family::ALL {
                let kind = MetricKind::new(family, q)?;
                let d = |a: &Point, b: &Point| orbit_distance(t, a, b, n, kind);
                let (xy, yx) = (d(&p[0], &p[1])?, d(&p[1], &p[0])?);
                sym.record((xy - yx).abs(), 0.0);
                zero.record(d(&p[0], &p[0])?, 0.0);
                tri.record(d(&p[0], &p[2])? - (xy + d(&p[1], &p[2])?), 1e-9);
            }
        }
    }
    Ok(vec![sym, zero, tri])
}

/// `grid[i * n + j] = d(T^{iq} x, T^{jq} y)` from the map and base metric alone.
fn brute_grid(t: &DynSystem, x: &Point, y: &Point, n: usize, q: usize) -> CliResult<Vec<f64>> {
    let xs = t.orbit_segment(x, n, q)?;
    let ys = t.orbit_segment(y, n, q)?;
    let mut grid = Vec::with_capacity(n * n);
    for a in &xs {
        for b in &ys {
            grid.push(t.base_distance(a, b)?);
        }
    }
    Ok(grid)
}

/// Largest order-preserving partial matching, enumerating every increasing
/// sequence of admissible pairs.
fn exhaustive_match(grid: &[f64], n: usize, admissible: &dyn Fn(f64) -> bool) -> usize {
    fn go(grid: &[f64], n: usize, ok: &dyn Fn(f64) -> bool, i0: usize, j0: usize) -> usize {
        let mut best = 0;
        for i in i0..n {
            for j in j0..n {
                if ok(grid[i * n + j]) {
                    best = best.max(1 + go(grid, n, ok, i + 1, j + 1));
                }
            }
        }
        best
    }
    go(grid, n, admissible, 0, 0)
}

/// Pair of words whose second half-block copies a shifted block of the first.
fn correlated(t: &DynSystem, spec: &MeasureSpec, seed: u64, len: usize) -> CliResult<(Point, Point)> {
    let pts = draw(t, spec, 2, seed)?;
    let a = pts[0].as_word().unwrap_or_default().to_vec();
    let mut b = pts[1].as_word().unwrap_or_default().to_vec();
    let shift = (seed % 3) as usize;
    for i in 0..(len / 2).min(a.len().saturating_sub(shift)) {
        if i + shift < b.len() {
            b[i + shift] = a[i];
        }
    }
    // copying may create forbidden transitions on a subshift; keep the sampled word then
    let b = if t.is_admissible(&b) { b } else { pts[1].as_word().unwrap_or_default().to_vec() };
    Ok((Point::Symbolic(a), Point::Symbolic(b)))
}

fn fk_oracle(n_max: usize, seed: u64, inject_fault: bool) -> CliResult<Vec<PropertyResult>> {
    let mut size = PropertyResult::new("fk-oracle", "match size equals exhaustive enumeration");
    let mut valid = PropertyResult::new("fk-oracle", "witness is an order-preserving delta-matching");
    let word_len = 2 * n_max + 8;
    let shifts = [
        (DynSystem::full_shift(2, word_len)?, MeasureSpec::uniform_bernoulli(2)),
        (DynSystem::golden_mean(word_len)?, MeasureSpec::parry(&TransitionMatrix::golden_mean())?),
    ];
    let deltas = [0.01, 0.1, 0.125, 0.25, 0.3, 0.5, 0.6, 1.0];
    let mut exact = 0;
    for case in 0..ORACLE_CASES {
        let n = 1 + case % n_max;
        let q = 1 + (case / n_max) % 2;
        let (t, spec) = &shifts[case % 2];
        let (x, y) = correlated(t, spec, mix(seed, 200, case as u64), n * q + 4)?;
        let delta = deltas[(case / 3) % deltas.len()];
        let grid = brute_grid(t, &x, &y, n, q)?;
        let oracle = if inject_fault {
            exhaustive_match(&grid, n, &|d| d <= delta)
        } else {
            exhaustive_match(&grid, n, &|d| d < delta)
        };
        let (f, witness) = match_value(t, &x, &y, MatchParams::new(n, q, delta)?)?;
        let ok = witness.size == oracle && f == (n - oracle) as f64 / n as f64;
        exact += usize::from(ok);
        size.record((witness.size as f64 - oracle as f64).abs(), 0.0);
        let increasing = witness.pairs.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1);
        let close = witness.pairs.iter().all(|&(i, j)| grid[i * n + j] < delta);
        valid.check(increasing && close && witness.pairs.len() == witness.size);
    }
    size.detail = format!("exact-match count {exact}/{ORACLE_CASES}");
    Ok(vec![size, valid])
}

/// Textbook LCS with an arbitrary pairing predicate.
fn lcs(grid: &[f64], n: usize, ok: impl Fn(f64) -> bool) -> usize {
    let mut t = vec![vec![0usize; n + 1]; n + 1];
    for i in 1..=n {
        for j in 1..=n {
            t[i][j] = if ok(grid[(i - 1) * n + j - 1]) { t[i - 1][j - 1] + 1 } else { t[i - 1][j].max(t[i][j - 1]) };
        }
    }
    t[n][n]
}

/// `inf { delta > 0 : unmatched fraction under strict delta-matching < delta }`.
/// The fraction is constant on `(lo, hi]` between consecutive realized
/// distances, so each interval contributes `max(lo, f)` when `f < hi`.
fn definition_fk(grid: &[f64], n: usize) -> f64 {
    let mut levels: Vec<f64> = grid.iter().copied().filter(|&d| d > 0.0).collect();
    levels.push(0.0);
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mut best = f64::INFINITY;
    for (k, &lo) in levels.iter().enumerate() {
        let hi = levels.get(k + 1).copied().unwrap_or(f64::INFINITY);
        let f = (n - lcs(grid, n, |d| d <= lo)) as f64 / n as f64;
        if f < hi {
            best = best.min(lo.max(f));
        }
    }
    best
}

fn fk_infimum(n_max: usize, seed: u64) -> CliResult<Vec<PropertyResult>> {
    let mut eq = PropertyResult::new("fk-infimum", "min-max formula equals the infimum definition");
    let horizon = 2 * n_max;
    let all = systems(2 * horizon + 8)?;
    for case in 0..ORACLE_CASES {
        let (t, spec) = &all[case % all.len()];
        let n = 1 + case % horizon;
        let q = 1 + (case / horizon) % 2;
        let (x, y) = if t.is_symbolic() && case % 3 == 0 {
            correlated(t, spec, mix(seed, 300, case as u64), n * q)?
        } else {
            let p = draw(t, spec, 2, mix(seed, 301, case as u64))?;
            (p[0].clone(), p[1].clone())
        };
        let grid = brute_grid(t, &x, &y, n, q)?;
        eq.record((fk_distance(t, &x, &y, n, q)? - definition_fk(&grid, n)).abs(), 0.0);
    }
    Ok(vec![eq])
}

struct Instance {
    system: DynSystem,
    spec: MeasureSpec,
    phi: Potential,
    n: usize,
    eps: f64,
    kind: MetricKind,
}

fn instance(case: usize, seed: u64) -> CliResult<Instance> {
    let all = systems(48)?;
    let (system, spec) = all[case % all.len()].clone();
    let r = mix(seed, 400, case as u64);
    let a = (r % 1000) as f64 / 1000.0 - 0.5;
    let phi = if system.is_symbolic() {
        Potential::FirstSymbol(vec![a, 0.4 - a])
    } else {
        Potential::Circle { func: CircleFn::Cosine { amplitude: a }, offset: 0.1 }
    };
    let eps = [0.1, 0.15, 0.25, 0.4][(r >> 12) as usize % 4];
    let family = Family::ALL[(r >> 16) as usize % 4];
    let kind = MetricKind::new(family, 1 + (r >> 20) as usize % 2)?;
    Ok(Instance { system, spec, phi, n: 2 + (r >> 24) as usize % 5, eps, kind })
}

fn cover_sandwich(seed: u64) -> CliResult<Vec<PropertyResult>> {
    let mut lower = PropertyResult::new("cover-sandwich", "exact <= greedy");
    let mut upper = PropertyResult::new("cover-sandwich", "greedy <= (1 + ln 20) exact");
    let factor = 1.0 + (EXACT_CAP as f64).ln();
    for case in 0..50 {
        let inst = instance(case, seed)?;
        let m = 5 + case % (EXACT_CAP - 4);
        let mu = sample_measure(&inst.spec, &inst.system, m, mix(seed, 401, case as u64))?;
        let cover = |method| covering_weight(&inst.system, &inst.phi, &mu, inst.n, inst.eps, inst.kind, method);
        let exact = cover(CoverMethod::ExactExhaustive)?.total_weight;
        let greedy = cover(CoverMethod::Greedy)?.total_weight;
        lower.record(exact - greedy, 0.0);
        upper.record(greedy - factor * exact, 0.0);
    }
    Ok(vec![lower, upper])
}

fn cover_validity(seed: u64) -> CliResult<Vec<PropertyResult>> {
    let mut measure = PropertyResult::new("cover-validity", "measure covers exceed 1 - eps with the reported weight");
    let mut grid = PropertyResult::new("cover-validity", "grid covers reach every grid point");
    for case in 0..40 {
        let inst = instance(case, seed)?;
        let mu = sample_measure(&inst.spec, &inst.system, 150, mix(seed, 402, case as u64))?;
        let sol = covering_weight(&inst.system, &inst.phi, &mu, inst.n, inst.eps, inst.kind, CoverMethod::Greedy)?;
        let check = verify_measure_cover(&inst.system, &inst.phi, &mu, inst.n, inst.eps, inst.kind, &sol)?;
        measure.record(if check.valid() { 0.0 } else { (1.0 - inst.eps - check.covered_mass).max(1e-300) }, 0.0);
        let n = 2 + case % 3;
        let eps = [0.25, 0.3][case % 2];
        let g = Grid::builtin(&inst.system, n, inst.kind.q, eps)?;
        let sol = topological_cover_weight(&inst.system, &inst.phi, n, eps, inst.kind, &g, CoverMethod::Greedy)?;
        grid.check(verify_grid_cover(&inst.system, &inst.phi, &g, n, eps, inst.kind, &sol)?.valid());
    }
    Ok(vec![measure, grid])
}

fn potential_shift(seed: u64) -> CliResult<Vec<PropertyResult>> {
    let mut shift = PropertyResult::new("potential-shift", "phi + c shifts exact estimates by c");
    for case in 0..20 {
        let inst = instance(case, seed)?;
        let mu = sample_measure(&inst.spec, &inst.system, 6 + case % 12, mix(seed, 403, case as u64))?;
        let c = ((mix(seed, 404, case as u64) % 2001) as f64 / 1000.0) - 1.0;
        let est = |phi: &Potential| {
            measure_pressure_estimate(&inst.system, phi, &mu, inst.n, inst.eps, inst.kind, CoverMethod::ExactExhaustive)
        };
        let base = est(&inst.phi)?.value;
        let moved = est(&inst.phi.shifted(c))?.value;
        shift.record((moved - base - c).abs(), 1e-9);
    }
    Ok(vec![shift])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn definition_oracle_on_a_hand_example() {
        // x = 0000.., y = 1000..: only the first pair differs
        let grid = [1.0, 1.0, 0.5, 0.0];
        // lo = 0: lcs 1 of 2, f = 0.5 < 0.5 fails; lo = 0.5: f = 0 -> 0.5
        assert_eq!(definition_fk(&grid, 2), 0.5);
        assert_eq!(exhaustive_match(&grid, 2, &|d| d < 0.75), 1);
        assert_eq!(exhaustive_match(&grid, 2, &|d| d < 1.5), 2);
    }

    #[test]
    fn default_suites_pass_at_small_scale() {
        let opts = VerifyOptions { n_max: 4, seed: 3, inject_fault: false };
        for name in crate::config::SUITES {
            for r in run_suite(name, &opts).unwrap() {
                assert!(r.passed(), "{r:?}");
            }
        }
    }

    #[test]
    fn injected_fault_is_detected() {
        let opts = VerifyOptions { n_max: 8, seed: 1, inject_fault: true };
        let res = run_suite("fk-oracle", &opts).unwrap();
        assert!(!res[0].passed());
    }
}
