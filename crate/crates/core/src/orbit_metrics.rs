//! Orbit (pseudo)metrics built on a base metric `d`:
//!
//! | family   | value                                                        |
//! |----------|--------------------------------------------------------------|
//! | Bowen    | `max_{i<n} d(T^{qi}x, T^{qi}y)`                              |
//! | Mean     | `(1/n) sum_{i<n} d(T^{qi}x, T^{qi}y)`                        |
//! | MaxMean  | `max_{1<=k<=n}` of the mean metric at horizon `k`            |
//! | FK       | `inf { delta > 0 : F^q_{n,delta}(x, y) < delta }`            |
//!
//! `F^q_{n,delta}` is one minus the normalized size of the largest
//! order-preserving partial matching of orbit indices whose matched points are
//! strictly closer than `delta`. Its maximum is a longest-common-subsequence
//! problem over the `n x n` grid of cross distances.
//!
//! The FK infimum is evaluated exactly through the bottleneck profile
//! `tau_m` (smallest achievable maximum matched distance over size-`m`
//! matchings): `M(delta) >= m` iff `delta > tau_m`, hence
//! `d_FK = min_m max(tau_m, (n - m)/n)`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::systems::{check_counts, symbolic_distance, CirclePoint, DynSystem, Point};

/// Borrowed view of the `n`-point, step-`q` orbit of a point.
#[derive(Clone, Copy, Debug)]
pub(crate) enum OrbitRef<'a> {
    Symbolic { word: &'a [u8], step: usize },
    Circle(&'a [CirclePoint]),
}

impl OrbitRef<'_> {
    /// `d(T^{qi} self, T^{qj} other)`.
    #[inline]
    pub(crate) fn dist(&self, i: usize, other: &OrbitRef<'_>, j: usize) -> f64 {
        match (self, other) {
            (OrbitRef::Symbolic { word: a, step }, OrbitRef::Symbolic { word: b, .. }) => {
                symbolic_distance(&a[step * i..], &b[step * j..])
            }
            (OrbitRef::Circle(a), OrbitRef::Circle(b)) => a[i].distance(b[j]),
            _ => f64::NAN,
        }
    }
}

/// Owned orbit: symbolic orbits borrow the word, circle orbits hold iterates.
#[derive(Clone, Debug)]
pub(crate) enum Orbit<'a> {
    Symbolic { word: &'a [u8], step: usize },
    Circle(Vec<CirclePoint>),
}

impl<'a> Orbit<'a> {
    pub(crate) fn new(system: &DynSystem, x: &'a Point, n: usize, q: usize) -> Result<Self> {
        system.check_horizon(x, n, q)?;
        Ok(match x {
            Point::Symbolic(w) => Orbit::Symbolic { word: w, step: q },
            Point::Circle(c) => {
                let mut out = Vec::with_capacity(n);
                let mut cur = *c;
                for _ in 0..n {
                    out.push(cur);
                    cur = system.circle_iterate(cur, q);
                }
                Orbit::Circle(out)
            }
        })
    }

    pub(crate) fn view(&self) -> OrbitRef<'_> {
        match self {
            Orbit::Symbolic { word, step } => OrbitRef::Symbolic { word, step: *step },
            Orbit::Circle(v) => OrbitRef::Circle(v),
        }
    }
}

/// The four orbit metric families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Bowen,
    Mean,
    MaxMean,
    FeldmanKatok,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Bowen, Family::Mean, Family::MaxMean, Family::FeldmanKatok];

    pub fn name(self) -> &'static str {
        match self {
            Family::Bowen => "bowen",
            Family::Mean => "mean",
            Family::MaxMean => "maxmean",
            Family::FeldmanKatok => "fk",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bowen" => Ok(Family::Bowen),
            "mean" => Ok(Family::Mean),
            "maxmean" | "max-mean" | "max_mean" => Ok(Family::MaxMean),
            "fk" | "feldman-katok" | "feldman_katok" => Ok(Family::FeldmanKatok),
            other => Err(Error::invalid(alloc::format!("unknown metric family {other:?}"))),
        }
    }
}

/// A metric family together with its step `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MetricKind {
    pub family: Family,
    pub q: usize,
}

impl MetricKind {
    pub fn new(family: Family, q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::invalid("q must be >= 1"));
        }
        Ok(MetricKind { family, q })
    }

    pub fn bowen(q: usize) -> Self {
        MetricKind { family: Family::Bowen, q: q.max(1) }
    }

    pub fn mean(q: usize) -> Self {
        MetricKind { family: Family::Mean, q: q.max(1) }
    }

    pub fn max_mean(q: usize) -> Self {
        MetricKind { family: Family::MaxMean, q: q.max(1) }
    }

    pub fn fk(q: usize) -> Self {
        MetricKind { family: Family::FeldmanKatok, q: q.max(1) }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)
    }
}

/// `(q, n, delta)` of a match problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatchParams {
    pub n: usize,
    pub q: usize,
    pub delta: f64,
}

impl MatchParams {
    pub fn new(n: usize, q: usize, delta: f64) -> Result<Self> {
        check_counts(n, q)?;
        if !(delta > 0.0) {
            return Err(Error::invalid("delta must be > 0"));
        }
        Ok(MatchParams { n, q, delta })
    }
}

/// A maximum order-preserving match and its `(i, pi(i))` pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchResult {
    pub size: usize,
    pub pairs: Vec<(usize, usize)>,
}

// ---------------------------------------------------------------------------
// kernels over orbit views

#[inline]
pub(crate) fn bowen_kernel(x: &OrbitRef<'_>, y: &OrbitRef<'_>, n: usize) -> f64 {
    (0..n).map(|i| x.dist(i, y, i)).fold(0.0, f64::max)
}

// Averages are clamped by the running maximum: the true mean never exceeds
// it, and the clamp keeps `mean <= maxmean <= bowen` exact in floating point.

#[inline]
pub(crate) fn mean_kernel(x: &OrbitRef<'_>, y: &OrbitRef<'_>, n: usize) -> f64 {
    let mut sum = 0.0;
    let mut top = 0.0f64;
    for i in 0..n {
        let d = x.dist(i, y, i);
        sum += d;
        top = top.max(d);
    }
    (sum / n as f64).min(top)
}

#[inline]
pub(crate) fn maxmean_kernel(x: &OrbitRef<'_>, y: &OrbitRef<'_>, n: usize) -> f64 {
    let mut sum = 0.0;
    let mut top = 0.0f64;
    let mut best = 0.0f64;
    for i in 0..n {
        let d = x.dist(i, y, i);
        sum += d;
        top = top.max(d);
        best = best.max((sum / (i + 1) as f64).min(top));
    }
    best
}

/// Row-major `n x n` grid of `d(T^{qi}x, T^{qj}y)`.
pub(crate) fn cross_grid(x: &OrbitRef<'_>, y: &OrbitRef<'_>, n: usize) -> Vec<f64> {
    let mut grid = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            grid.push(x.dist(i, y, j));
        }
    }
    grid
}

/// Longest common subsequence size where `(i, j)` may be paired iff `matched(grid[i][j])`.
pub(crate) fn lcs_on_grid(grid: &[f64], n: usize, matched: impl Fn(f64) -> bool) -> usize {
    let mut prev = vec![0usize; n + 1];
    let mut cur = vec![0usize; n + 1];
    for i in 0..n {
        for j in 0..n {
            cur[j + 1] = if matched(grid[i * n + j]) {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[n]
}

/// `tau_0..=tau_n`: minimal bottleneck distance of an order-preserving match of each size.
pub(crate) fn bottleneck_profile_on_grid(grid: &[f64], n: usize) -> Vec<f64> {
    let mut levels: Vec<f64> = grid.to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mut tau = Vec::with_capacity(n + 1);
    tau.push(0.0);
    let mut lo = 0usize;
    for m in 1..=n {
        // smallest level t with LCS[d <= t] >= m; the top level always admits the identity
        let mut hi = levels.len() - 1;
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            let t = levels[mid];
            if lcs_on_grid(grid, n, |d| d <= t) >= m {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        tau.push(levels[lo]);
    }
    tau
}

/// `(n - m) / n`, computed identically everywhere it is compared.
#[inline]
pub(crate) fn unmatched_fraction(n: usize, m: usize) -> f64 {
    (n - m) as f64 / n as f64
}

pub(crate) fn fk_from_profile(tau: &[f64], n: usize) -> f64 {
    (0..=n)
        .map(|m| tau[m].max(unmatched_fraction(n, m)))
        .fold(f64::INFINITY, f64::min)
}

/// Smallest match size whose unmatched fraction is below `radius`.
#[inline]
pub(crate) fn required_match(n: usize, radius: f64) -> usize {
    (0..=n).find(|&m| unmatched_fraction(n, m) < radius).unwrap_or(n)
}

/// `d_FK(x, y) < radius` without computing the distance.
pub(crate) fn fk_within_kernel(x: &OrbitRef<'_>, y: &OrbitRef<'_>, n: usize, radius: f64) -> bool {
    if !(radius > 0.0) {
        return false;
    }
    let need = required_match(n, radius);
    if need == 0 {
        return true;
    }
    let slack = n - need;
    if slack == 0 {
        return (0..n).all(|i| x.dist(i, y, i) < radius);
    }
    // constant-offset matches are cheap witnesses
    for offset in 0..=slack {
        for sign in [1isize, -1] {
            if offset == 0 && sign < 0 {
                continue;
            }
            let len = n - offset;
            if len < need {
                continue;
            }
            let mut misses_left = len - need;
            let mut ok = true;
            for t in 0..len {
                let (i, j) = if sign > 0 { (t, t + offset) } else { (t + offset, t) };
                if x.dist(i, y, j) >= radius {
                    if misses_left == 0 {
                        ok = false;
                        break;
                    }
                    misses_left -= 1;
                }
            }
            if ok {
                return true;
            }
        }
    }
    // a match of size >= need only pairs indices with |i - j| <= slack, so the
    // LCS table is only evaluated on that band; outside it, entries copy their
    // nearest in-band neighbour
    let mut prev = vec![0usize; n + 1];
    let mut cur = vec![0usize; n + 1];
    for i in 0..n {
        let lo = i.saturating_sub(slack);
        let hi = (i + slack).min(n - 1);
        cur[lo] = prev[lo];
        for j in lo..=hi {
            cur[j + 1] = if x.dist(i, y, j) < radius {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        if hi + 2 <= n {
            cur[hi + 2] = cur[hi + 1];
        }
        // rows can no longer reach `need`
        if cur[hi + 1] + (n - 1 - i) < need {
            return false;
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[n] >= need
}

#[inline]
pub(crate) fn distance_kernel(x: &OrbitRef<'_>, y: &OrbitRef<'_>, n: usize, family: Family) -> f64 {
    match family {
        Family::Bowen => bowen_kernel(x, y, n),
        Family::Mean => mean_kernel(x, y, n),
        Family::MaxMean => maxmean_kernel(x, y, n),
        Family::FeldmanKatok => {
            let grid = cross_grid(x, y, n);
            fk_from_profile(&bottleneck_profile_on_grid(&grid, n), n)
        }
    }
}

/// `distance_kernel(..) < radius`, with early exits. Agrees exactly with the
/// full evaluation because partial sums and maxima are monotone.
#[inline]
pub(crate) fn within_kernel(x: &OrbitRef<'_>, y: &OrbitRef<'_>, n: usize, family: Family, radius: f64) -> bool {
    match family {
        Family::Bowen => (0..n).all(|i| x.dist(i, y, i) < radius),
        Family::Mean => {
            let nf = n as f64;
            let mut sum = 0.0;
            let mut top = 0.0f64;
            for i in 0..n {
                let d = x.dist(i, y, i);
                sum += d;
                top = top.max(d);
                if (sum / nf).min(top) >= radius {
                    return false;
                }
            }
            true
        }
        Family::MaxMean => {
            let mut sum = 0.0;
            let mut top = 0.0f64;
            for i in 0..n {
                let d = x.dist(i, y, i);
                sum += d;
                top = top.max(d);
                if (sum / (i + 1) as f64).min(top) >= radius {
                    return false;
                }
            }
            true
        }
        Family::FeldmanKatok => fk_within_kernel(x, y, n, radius),
    }
}

// ---------------------------------------------------------------------------
// public operations

fn orbit_pair<'a>(
    system: &DynSystem,
    x: &'a Point,
    y: &'a Point,
    n: usize,
    q: usize,
) -> Result<(Orbit<'a>, Orbit<'a>)> {
    Ok((Orbit::new(system, x, n, q)?, Orbit::new(system, y, n, q)?))
}

/// Bowen metric `d_n^q`.
pub fn bowen_distance(system: &DynSystem, x: &Point, y: &Point, n: usize, q: usize) -> Result<f64> {
    let (a, b) = orbit_pair(system, x, y, n, q)?;
    Ok(bowen_kernel(&a.view(), &b.view(), n))
}

/// Mean metric: the average of the `n` paired base distances.
pub fn mean_distance(system: &DynSystem, x: &Point, y: &Point, n: usize, q: usize) -> Result<f64> {
    let (a, b) = orbit_pair(system, x, y, n, q)?;
    Ok(mean_kernel(&a.view(), &b.view(), n))
}

/// Max-mean metric, one pass over running prefix sums.
pub fn maxmean_distance(system: &DynSystem, x: &Point, y: &Point, n: usize, q: usize) -> Result<f64> {
    let (a, b) = orbit_pair(system, x, y, n, q)?;
    Ok(maxmean_kernel(&a.view(), &b.view(), n))
}

/// The `n x n` grid of cross distances `d(T^{qi}x, T^{qj}y)`, row-major.
pub fn distance_grid(system: &DynSystem, x: &Point, y: &Point, n: usize, q: usize) -> Result<Vec<f64>> {
    let (a, b) = orbit_pair(system, x, y, n, q)?;
    Ok(cross_grid(&a.view(), &b.view(), n))
}

/// `F^q_{n,delta}(x, y)` with a maximum match as witness.
pub fn match_value(system: &DynSystem, x: &Point, y: &Point, params: MatchParams) -> Result<(f64, MatchResult)> {
    let MatchParams { n, q, delta } = MatchParams::new(params.n, params.q, params.delta)?;
    let grid = distance_grid(system, x, y, n, q)?;
    let witness = max_match_on_grid(&grid, n, |d| d < delta);
    Ok((unmatched_fraction(n, witness.size), witness))
}

/// Maximum order-preserving match with backtracking, diagonal moves preferred.
pub(crate) fn max_match_on_grid(grid: &[f64], n: usize, matched: impl Fn(f64) -> bool) -> MatchResult {
    let w = n + 1;
    let mut dp = vec![0usize; w * w];
    for i in 1..=n {
        for j in 1..=n {
            dp[i * w + j] = if matched(grid[(i - 1) * n + (j - 1)]) {
                dp[(i - 1) * w + (j - 1)] + 1
            } else {
                dp[(i - 1) * w + j].max(dp[i * w + j - 1])
            };
        }
    }
    let mut pairs = Vec::with_capacity(dp[n * w + n]);
    let (mut i, mut j) = (n, n);
    while i > 0 && j > 0 {
        if matched(grid[(i - 1) * n + (j - 1)]) && dp[i * w + j] == dp[(i - 1) * w + (j - 1)] + 1 {
            pairs.push((i - 1, j - 1));
            i -= 1;
            j -= 1;
        } else if dp[(i - 1) * w + j] > dp[i * w + j - 1] {
            i -= 1;
        } else {
            j -= 1;
        }
    }
    pairs.reverse();
    MatchResult { size: pairs.len(), pairs }
}

/// Bottleneck profile `tau_0..=tau_n` (`tau_0 = 0`).
pub fn bottleneck_profile(system: &DynSystem, x: &Point, y: &Point, n: usize, q: usize) -> Result<Vec<f64>> {
    let grid = distance_grid(system, x, y, n, q)?;
    Ok(bottleneck_profile_on_grid(&grid, n))
}

/// Feldman-Katok metric `d_{FK_n^q}` via `min_m max(tau_m, (n - m)/n)`.
pub fn fk_distance(system: &DynSystem, x: &Point, y: &Point, n: usize, q: usize) -> Result<f64> {
    let grid = distance_grid(system, x, y, n, q)?;
    Ok(fk_from_profile(&bottleneck_profile_on_grid(&grid, n), n))
}

/// Longest common subsequence length.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { prev[j + 1].max(cur[j]) };
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Edit distance `1 - LCS(w1[..n], w2[..n]) / n`.
pub fn edit_distance(w1: &[u8], w2: &[u8], n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n must be >= 1"));
    }
    for w in [w1, w2] {
        if w.len() < n {
            return Err(Error::LengthTooShort { needed: n, available: w.len() });
        }
    }
    Ok(unmatched_fraction(n, lcs_len(&w1[..n], &w2[..n])))
}

/// Dispatches to the metric selected by `kind`.
pub fn orbit_distance(system: &DynSystem, x: &Point, y: &Point, n: usize, kind: MetricKind) -> Result<f64> {
    let (a, b) = orbit_pair(system, x, y, n, kind.q)?;
    Ok(distance_kernel(&a.view(), &b.view(), n, kind.family))
}

/// `orbit_distance(..) < radius`, evaluated with early exits.
pub fn within(system: &DynSystem, x: &Point, y: &Point, n: usize, kind: MetricKind, radius: f64) -> Result<bool> {
    let (a, b) = orbit_pair(system, x, y, n, kind.q)?;
    Ok(within_kernel(&a.view(), &b.view(), n, kind.family, radius))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::DynSystem;
    use alloc::vec;

    fn periodic(a: u8, b: u8, len: usize) -> Point {
        Point::Symbolic((0..len).map(|i| if i % 2 == 0 { a } else { b }).collect())
    }

    #[test]
    fn doubling_examples() {
        let t = DynSystem::doubling();
        let x = Point::circle(0.0).unwrap();
        let y = Point::circle(0.001).unwrap();
        assert!((bowen_distance(&t, &x, &y, 3, 1).unwrap() - 0.004).abs() < 1e-12);
        assert!((mean_distance(&t, &x, &y, 3, 1).unwrap() - 0.007 / 3.0).abs() < 1e-12);
        assert!((maxmean_distance(&t, &x, &y, 3, 1).unwrap() - 0.007 / 3.0).abs() < 1e-12);
        assert!(maxmean_distance(&t, &x, &y, 2, 1).unwrap() <= maxmean_distance(&t, &x, &y, 3, 1).unwrap());
    }

    #[test]
    fn single_step_is_base_distance() {
        let t = DynSystem::rotation(0.3).unwrap();
        let x = Point::circle(0.1).unwrap();
        let y = Point::circle(0.35).unwrap();
        let d = t.base_distance(&x, &y).unwrap();
        for kind in [MetricKind::bowen(1), MetricKind::mean(1), MetricKind::max_mean(1)] {
            assert_eq!(orbit_distance(&t, &x, &y, 1, kind).unwrap(), d);
        }
        // isometry: every term equals d
        assert_eq!(bowen_distance(&t, &x, &y, 17, 3).unwrap(), d);
    }

    #[test]
    fn periodic_pair_match_and_fk() {
        let t = DynSystem::full_shift(2, 64).unwrap();
        let x = periodic(0, 1, 64);
        let y = periodic(1, 0, 64);
        let (f, witness) = match_value(&t, &x, &y, MatchParams::new(4, 1, 0.1).unwrap()).unwrap();
        assert_eq!(f, 0.25);
        assert_eq!(witness.pairs, vec![(1, 0), (2, 1), (3, 2)]);
        assert_eq!(fk_distance(&t, &x, &y, 4, 1).unwrap(), 0.25);
        assert_eq!(bottleneck_profile(&t, &x, &y, 4, 1).unwrap(), vec![0.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn identical_points() {
        let t = DynSystem::full_shift(3, 32).unwrap();
        let x = Point::Symbolic(vec![0, 2, 1, 1, 0, 2, 2, 1, 0, 0, 1, 2, 0, 1, 2, 0, 2, 1, 1, 0, 2, 2, 1, 0, 0, 1, 2, 0, 1, 2, 0, 1]);
        let (f, w) = match_value(&t, &x, &x, MatchParams::new(6, 2, 1e-9).unwrap()).unwrap();
        assert_eq!(f, 0.0);
        assert_eq!(w.pairs, (0..6).map(|i| (i, i)).collect::<Vec<_>>());
        for family in Family::ALL {
            assert_eq!(orbit_distance(&t, &x, &x, 8, MetricKind::new(family, 2).unwrap()).unwrap(), 0.0);
        }
    }

    #[test]
    fn large_delta_matches_everything() {
        let t = DynSystem::doubling();
        let x = Point::circle(0.123).unwrap();
        let y = Point::circle(0.77).unwrap();
        let (f, w) = match_value(&t, &x, &y, MatchParams::new(7, 1, 0.6).unwrap()).unwrap();
        assert_eq!(f, 0.0);
        assert_eq!(w.size, 7);
    }

    #[test]
    fn edit_distance_examples() {
        assert_eq!(edit_distance(&[0, 1, 0, 1], &[0, 1, 0, 1], 4).unwrap(), 0.0);
        assert_eq!(edit_distance(&[0, 1, 0, 1], &[1, 0, 1, 0], 4).unwrap(), 0.25);
        assert_eq!(edit_distance(&[0, 0, 1], &[2, 3, 3], 3).unwrap(), 1.0);
        assert_eq!(
            edit_distance(&[0, 1], &[0, 1, 1], 3).unwrap_err(),
            Error::LengthTooShort { needed: 3, available: 2 }
        );
    }

    #[test]
    fn dispatch_matches_direct() {
        let t = DynSystem::doubling();
        let x = Point::circle(0.31).unwrap();
        let y = Point::circle(0.3101).unwrap();
        assert_eq!(orbit_distance(&t, &x, &y, 6, MetricKind::bowen(1)).unwrap(), bowen_distance(&t, &x, &y, 6, 1).unwrap());
        assert_eq!(orbit_distance(&t, &x, &y, 6, MetricKind::fk(2)).unwrap(), fk_distance(&t, &x, &y, 6, 2).unwrap());
    }

    #[test]
    fn horizon_is_enforced() {
        let t = DynSystem::full_shift(2, 8).unwrap();
        let x = Point::Symbolic(vec![0; 8]);
        assert_eq!(bowen_distance(&t, &x, &x, 5, 2).unwrap_err().code(), "HORIZON_EXHAUSTED");
    }

    #[test]
    fn required_match_sizes() {
        assert_eq!(required_match(12, 0.05), 12);
        assert_eq!(required_match(16, 0.0625), 16);
        assert_eq!(required_match(32, 0.1), 29);
        assert_eq!(required_match(4, 1.5), 0);
    }
}
