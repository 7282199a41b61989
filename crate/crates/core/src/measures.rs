//! Finite weighted samples standing in for ergodic measures.
//!
//! Samplers are seeded with ChaCha8 so a `(spec, M, seed)` triple always
//! reproduces the same sample. Circle coordinates are drawn with 53 random
//! bits, so every sampled coordinate survives an `f64` round trip.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::orbit_metrics::{within_kernel, MetricKind, Orbit};
use crate::systems::{CirclePoint, DynSystem, Point, SystemKind, TransitionMatrix};

const PROB_TOL: f64 = 1e-12;
const STATIONARY_TOL: f64 = 1e-9;

/// A concrete invariant measure.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasureSpec {
    /// Product measure with one-symbol marginal `p`.
    Bernoulli(Vec<f64>),
    /// Markov measure: row-stochastic `k x k` matrix (row-major) and its stationary vector.
    Markov { k: usize, matrix: Vec<f64>, stationary: Vec<f64> },
    LebesgueCircle,
}

fn check_probability(p: &[f64], what: &str) -> Result<()> {
    if p.is_empty() || p.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(Error::invalid(format!("{what} must be a nonnegative finite vector")));
    }
    let s = neumaier_sum(p.iter().copied());
    if (s - 1.0).abs() > PROB_TOL {
        return Err(Error::invalid(format!("{what} sums to {s}, expected 1")));
    }
    Ok(())
}

impl MeasureSpec {
    pub fn bernoulli(p: Vec<f64>) -> Result<Self> {
        check_probability(&p, "Bernoulli vector")?;
        Ok(MeasureSpec::Bernoulli(p))
    }

    pub fn uniform_bernoulli(k: usize) -> Self {
        MeasureSpec::Bernoulli(vec![1.0 / k as f64; k])
    }

    /// Markov measure started from its stationary vector (found by power
    /// iteration on the lazy chain).
    pub fn markov(rows: &[Vec<f64>]) -> Result<Self> {
        let (k, matrix) = flatten_stochastic(rows)?;
        let mut lazy = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                lazy[i * k + j] = 0.5 * matrix[i * k + j] + if i == j { 0.5 } else { 0.0 };
            }
        }
        let (_, v) = linalg::perron_left(&lazy, k, 1e-14, 1_000_000)
            .ok_or_else(|| Error::invalid("stationary vector did not converge"))?;
        let total: f64 = v.iter().sum();
        let stationary: Vec<f64> = v.iter().map(|x| x / total).collect();
        Self::markov_with_stationary(rows, stationary)
    }

    pub fn markov_with_stationary(rows: &[Vec<f64>], stationary: Vec<f64>) -> Result<Self> {
        let (k, matrix) = flatten_stochastic(rows)?;
        if stationary.len() != k {
            return Err(Error::invalid("stationary vector length differs from matrix size"));
        }
        check_probability(&stationary, "stationary vector")?;
        for j in 0..k {
            let pj: f64 = (0..k).map(|i| stationary[i] * matrix[i * k + j]).sum();
            if (pj - stationary[j]).abs() > STATIONARY_TOL {
                return Err(Error::invalid("stationary vector is not invariant under the matrix"));
            }
        }
        Ok(MeasureSpec::Markov { k, matrix, stationary })
    }

    /// Measure of maximal entropy of an irreducible subshift of finite type.
    pub fn parry(a: &TransitionMatrix) -> Result<Self> {
        let k = a.k();
        let mut shifted = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                shifted[i * k + j] = if a.allowed(i, j) { 1.0 } else { 0.0 } + if i == j { 1.0 } else { 0.0 };
            }
        }
        let (l1, right) = linalg::perron_right(&shifted, k, 1e-14, 1_000_000).ok_or(Error::NotPrimitive)?;
        let (_, left) = linalg::perron_left(&shifted, k, 1e-14, 1_000_000).ok_or(Error::NotPrimitive)?;
        let lambda = l1 - 1.0;
        if right.iter().chain(&left).any(|&v| !(v > 0.0)) {
            return Err(Error::NotPrimitive);
        }
        let rows: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| if a.allowed(i, j) { right[j] / (lambda * right[i]) } else { 0.0 })
                    .collect()
            })
            .collect();
        let rows: Vec<Vec<f64>> = rows
            .into_iter()
            .map(|r| {
                let s: f64 = r.iter().sum();
                r.into_iter().map(|v| v / s).collect()
            })
            .collect();
        let z: f64 = (0..k).map(|i| left[i] * right[i]).sum();
        let stationary = (0..k).map(|i| left[i] * right[i] / z).collect();
        Self::markov_with_stationary(&rows, stationary)
    }

    /// Short stable identifier used in result records.
    pub fn id(&self) -> String {
        let join = |v: &[f64]| {
            let mut s = String::new();
            for (i, x) in v.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                let _ = write!(s, "{x}");
            }
            s
        };
        match self {
            MeasureSpec::Bernoulli(p) => format!("bernoulli:{}", join(p)),
            MeasureSpec::Markov { k, matrix, .. } => {
                let rows: Vec<String> = (0..*k).map(|i| join(&matrix[i * k..(i + 1) * k])).collect();
                format!("markov:{}", rows.join(";"))
            }
            MeasureSpec::LebesgueCircle => String::from("lebesgue"),
        }
    }

    /// Kolmogorov-Sinai entropy of the shift under a symbolic measure.
    pub fn shift_entropy(&self) -> Option<f64> {
        let h = |p: f64| if p > 0.0 { -p * libm::log(p) } else { 0.0 };
        match self {
            MeasureSpec::Bernoulli(p) => Some(p.iter().map(|&v| h(v)).sum()),
            MeasureSpec::Markov { k, matrix, stationary } => Some(
                (0..*k)
                    .map(|i| stationary[i] * (0..*k).map(|j| h(matrix[i * k + j])).sum::<f64>())
                    .sum(),
            ),
            MeasureSpec::LebesgueCircle => None,
        }
    }

    /// Distribution of the first symbol.
    pub fn first_symbol_marginal(&self) -> Option<&[f64]> {
        match self {
            MeasureSpec::Bernoulli(p) => Some(p),
            MeasureSpec::Markov { stationary, .. } => Some(stationary),
            MeasureSpec::LebesgueCircle => None,
        }
    }

    fn check_compatible(&self, system: &DynSystem) -> Result<()> {
        let mismatch = |msg: &str| Err(Error::SpecMismatch(format!("{} on {}: {msg}", self.id(), system.id())));
        match (self, system.kind()) {
            (MeasureSpec::Bernoulli(p), SystemKind::FullShift { k }) => {
                if p.len() != *k {
                    return mismatch("probability vector length differs from alphabet size");
                }
                Ok(())
            }
            (MeasureSpec::Bernoulli(_), SystemKind::Sft(_)) => {
                mismatch("Bernoulli measures are only supported on full shifts")
            }
            (MeasureSpec::Markov { k, matrix, .. }, kind @ (SystemKind::FullShift { .. } | SystemKind::Sft(_))) => {
                let alphabet = system.alphabet_size().unwrap_or(0);
                if *k != alphabet {
                    return mismatch("matrix size differs from alphabet size");
                }
                if let SystemKind::Sft(a) = kind {
                    for i in 0..*k {
                        for j in 0..*k {
                            if matrix[i * k + j] > 0.0 && !a.allowed(i, j) {
                                return mismatch("chain uses a forbidden transition");
                            }
                        }
                    }
                }
                Ok(())
            }
            (MeasureSpec::LebesgueCircle, SystemKind::Doubling | SystemKind::Rotation { .. }) => Ok(()),
            _ => mismatch("state spaces differ"),
        }
    }
}

fn flatten_stochastic(rows: &[Vec<f64>]) -> Result<(usize, Vec<f64>)> {
    let k = rows.len();
    if k == 0 || k > 256 {
        return Err(Error::invalid("Markov matrix must have 1..=256 rows"));
    }
    let mut flat = Vec::with_capacity(k * k);
    for row in rows {
        if row.len() != k {
            return Err(Error::invalid("Markov matrix must be square"));
        }
        check_probability(row, "Markov row")?;
        flat.extend_from_slice(row);
    }
    Ok((k, flat))
}

/// Compensated summation.
pub(crate) fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Where an empirical measure came from.
#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    IidSampler { spec: MeasureSpec, seed: u64 },
    OrbitAverage { x0: Point, length: usize },
    Explicit,
}

/// Weighted point sample.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalMeasure {
    points: Vec<Point>,
    weights: Vec<f64>,
    provenance: Provenance,
}

impl EmpiricalMeasure {
    pub fn new(points: Vec<Point>, weights: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("empirical measure needs at least one point"));
        }
        if points.len() != weights.len() {
            return Err(Error::invalid("points and weights differ in length"));
        }
        check_probability(&weights, "weights")?;
        let circle = matches!(points[0], Point::Circle(_));
        if points.iter().any(|p| matches!(p, Point::Circle(_)) != circle) {
            return Err(Error::KindMismatch);
        }
        Ok(EmpiricalMeasure { points, weights, provenance })
    }

    pub fn uniform(points: Vec<Point>, provenance: Provenance) -> Result<Self> {
        let m = points.len();
        Self::new(points, vec![1.0 / m.max(1) as f64; m], provenance)
    }

    pub fn point_mass(x: Point) -> Self {
        EmpiricalMeasure { points: vec![x], weights: vec![1.0], provenance: Provenance::Explicit }
    }

    /// Uniform measure on `x0, T x0, .., T^{length-1} x0`.
    pub fn orbit_average(system: &DynSystem, x0: &Point, length: usize) -> Result<Self> {
        let points = system.orbit_segment(x0, length, 1)?;
        Self::uniform(points, Provenance::OrbitAverage { x0: x0.clone(), length })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn id(&self) -> String {
        match &self.provenance {
            Provenance::IidSampler { spec, .. } => spec.id(),
            Provenance::OrbitAverage { length, .. } => format!("orbit_average:{length}"),
            Provenance::Explicit => format!("explicit:{}", self.points.len()),
        }
    }
}

fn draw(rng: &mut ChaCha8Rng, p: &[f64]) -> u8 {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        acc += pi;
        if u < acc {
            return i as u8;
        }
    }
    p.iter().rposition(|&v| v > 0.0).unwrap_or(0) as u8
}

/// `m` i.i.d. draws from `spec`; symbolic draws have the system's word length.
pub fn sample_measure(spec: &MeasureSpec, system: &DynSystem, m: usize, seed: u64) -> Result<EmpiricalMeasure> {
    if m == 0 {
        return Err(Error::invalid("sample size must be >= 1"));
    }
    spec.check_compatible(system)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = system.word_length();
    let points: Vec<Point> = match spec {
        MeasureSpec::Bernoulli(p) => (0..m)
            .map(|_| Point::Symbolic((0..len).map(|_| draw(&mut rng, p)).collect()))
            .collect(),
        MeasureSpec::Markov { k, matrix, stationary } => (0..m)
            .map(|_| {
                let mut w = Vec::with_capacity(len);
                let mut s = draw(&mut rng, stationary);
                w.push(s);
                for _ in 1..len {
                    let row = s as usize * k;
                    s = draw(&mut rng, &matrix[row..row + k]);
                    w.push(s);
                }
                Point::Symbolic(w)
            })
            .collect(),
        MeasureSpec::LebesgueCircle => (0..m)
            .map(|_| Point::Circle(CirclePoint::from_bits(rng.next_u64() & !0x7ff)))
            .collect(),
    };
    EmpiricalMeasure::uniform(points, Provenance::IidSampler { spec: spec.clone(), seed })
}

/// Mass of the open orbit-metric ball `{ y : d(center, y) < radius }`.
pub fn ball_mass(
    mu: &EmpiricalMeasure,
    system: &DynSystem,
    center: &Point,
    radius: f64,
    n: usize,
    kind: MetricKind,
) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(Error::invalid("radius must be > 0"));
    }
    let c = Orbit::new(system, center, n, kind.q)?;
    let c = c.view();
    let mut mass = 0.0;
    for (p, &w) in mu.points.iter().zip(&mu.weights) {
        let o = Orbit::new(system, p, n, kind.q)?;
        if within_kernel(&c, &o.view(), n, kind.family, radius) {
            mass += w;
        }
    }
    Ok(mass)
}

/// `-log(mu(B(x, delta))) / n`.
pub fn brin_katok_estimate(
    mu: &EmpiricalMeasure,
    system: &DynSystem,
    x: &Point,
    n: usize,
    delta: f64,
    kind: MetricKind,
) -> Result<f64> {
    let mass = ball_mass(mu, system, x, delta, n, kind)?;
    if mass <= 0.0 {
        return Err(Error::EmptyBall);
    }
    Ok(-libm::log(mass) / n as f64)
}

/// Robust summary of local entropy estimates over several centers.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalEntropySummary {
    pub estimates: Vec<Result<f64>>,
    pub median: Option<f64>,
    pub q1: Option<f64>,
    pub q3: Option<f64>,
}

impl LocalEntropySummary {
    pub fn iqr(&self) -> Option<f64> {
        Some(self.q3? - self.q1?)
    }

    pub fn failures(&self) -> usize {
        self.estimates.iter().filter(|e| e.is_err()).count()
    }
}

/// Brin-Katok estimates at each center, with median and quartiles of the successes.
pub fn brin_katok_summary(
    mu: &EmpiricalMeasure,
    system: &DynSystem,
    centers: &[Point],
    n: usize,
    delta: f64,
    kind: MetricKind,
) -> LocalEntropySummary {
    let estimates: Vec<Result<f64>> = centers
        .iter()
        .map(|c| brin_katok_estimate(mu, system, c, n, delta, kind))
        .collect();
    let mut ok: Vec<f64> = estimates.iter().filter_map(|e| e.as_ref().ok().copied()).collect();
    ok.sort_by(f64::total_cmp);
    LocalEntropySummary {
        median: quantile(&ok, 0.5),
        q1: quantile(&ok, 0.25),
        q3: quantile(&ok, 0.75),
        estimates,
    }
}

/// Linearly interpolated quantile of sorted data.
pub fn quantile(sorted: &[f64], p: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let h = (sorted.len() - 1) as f64 * p;
    let lo = libm::floor(h) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    Some(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}
