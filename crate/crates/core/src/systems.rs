//! State spaces, maps and potentials.
//!
//! Two families of state space are supported:
//!
//! * one-sided symbolic words over `{0, .., k-1}` truncated at a horizon `L`,
//!   acted on by the left shift (full shift or a subshift of finite type);
//! * the circle `R/Z`, acted on by the doubling map or an irrational rotation.
//!
//! Symbolic words use the ultrametric `d(x, y) = 2^-j` where `j` is the first
//! index at which the words differ, so Bowen balls are exactly cylinders.
//! Circle points are stored as 64-bit binary fractions of a turn, which makes
//! both maps exact integer operations and rotations exact isometries.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::error::{Error, Result};

/// Default truncation horizon for symbolic words.
pub const DEFAULT_WORD_LENGTH: usize = 256;

/// Conjugate of the golden ratio, `(sqrt(5) - 1) / 2`.
pub const GOLDEN_CONJUGATE: f64 = 0.618_033_988_749_894_9;

const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;
const TWO_POW_NEG_53: f64 = 1.0 / 9_007_199_254_740_992.0;

/// `2^-j` as an `f64`.
#[inline]
pub(crate) fn pow2_neg(j: usize) -> f64 {
    if j <= 1022 {
        f64::from_bits(((1023 - j) as u64) << 52)
    } else {
        libm::ldexp(1.0, -(j.min(i32::MAX as usize) as i32))
    }
}

/// Number of symbols of lookahead that resolve symbolic distances below `eps`,
/// `ceil(log2(1/eps))`.
pub fn depth_needed(eps: f64) -> usize {
    if !(eps > 0.0) || eps >= 1.0 {
        return 0;
    }
    let mut depth = 0;
    while pow2_neg(depth) > eps {
        depth += 1;
    }
    depth
}

/// Smallest `j` with `2^-j < radius`: a symbolic pair is strictly closer than
/// `radius` iff the words agree on their first `j` symbols (or on the whole
/// compared length).
pub(crate) fn agreement_length(radius: f64) -> usize {
    let mut j = 0;
    while pow2_neg(j) >= radius {
        j += 1;
        if j > 2000 {
            break;
        }
    }
    j
}

/// A point of `R/Z`, stored as a binary fraction of a full turn in units of `2^-64`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CirclePoint(u64);

impl CirclePoint {
    pub const fn from_bits(bits: u64) -> Self {
        CirclePoint(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// Reduces `x` modulo 1. Non-finite input maps to 0.
    pub fn from_f64(x: f64) -> Self {
        if !x.is_finite() {
            return CirclePoint(0);
        }
        let frac = x - libm::floor(x);
        let scaled = frac * TWO_POW_64;
        if !(0.0..TWO_POW_64).contains(&scaled) {
            CirclePoint(0)
        } else {
            CirclePoint(scaled as u64)
        }
    }

    /// Coordinate in `[0, 1)`, truncated to 53 bits.
    pub fn to_f64(self) -> f64 {
        (self.0 >> 11) as f64 * TWO_POW_NEG_53
    }

    /// Arc-length distance `min(|x - y|, 1 - |x - y|)`.
    #[inline]
    pub fn distance(self, other: CirclePoint) -> f64 {
        let d = self.0.wrapping_sub(other.0);
        let d = d.min(d.wrapping_neg());
        d as f64 / TWO_POW_64
    }

    #[inline]
    pub(crate) fn doubled(self) -> Self {
        CirclePoint(self.0 << 1)
    }

    #[inline]
    pub(crate) fn rotated(self, alpha: CirclePoint) -> Self {
        CirclePoint(self.0.wrapping_add(alpha.0))
    }
}

/// A state: a finite symbolic word or a circle coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Point {
    Symbolic(Vec<u8>),
    Circle(CirclePoint),
}

impl Point {
    /// Symbolic point over an alphabet of size `k`.
    pub fn symbolic(word: Vec<u8>, k: usize) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::invalid("symbolic word must have length >= 1"));
        }
        if let Some(&s) = word.iter().find(|&&s| s as usize >= k) {
            return Err(Error::invalid(format!("symbol {s} outside alphabet of size {k}")));
        }
        Ok(Point::Symbolic(word))
    }

    /// Circle point, reduced modulo 1.
    pub fn circle(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::invalid("circle coordinate must be finite"));
        }
        Ok(Point::Circle(CirclePoint::from_f64(x)))
    }

    pub fn as_word(&self) -> Option<&[u8]> {
        match self {
            Point::Symbolic(w) => Some(w),
            Point::Circle(_) => None,
        }
    }

    pub fn as_circle(&self) -> Option<CirclePoint> {
        match self {
            Point::Circle(c) => Some(*c),
            Point::Symbolic(_) => None,
        }
    }
}

/// Parses a word written as symbol characters `0-9` then `a-z` (so `a` is 10).
pub fn parse_word(text: &str) -> Result<Vec<u8>> {
    text.trim()
        .chars()
        .map(|c| match c {
            '0'..='9' => Ok(c as u8 - b'0'),
            'a'..='z' => Ok(c as u8 - b'a' + 10),
            _ => Err(Error::invalid(format!("invalid symbol character {c:?}"))),
        })
        .collect()
}

/// Inverse of [`parse_word`].
pub fn format_word(word: &[u8]) -> String {
    word.iter()
        .map(|&s| match s {
            0..=9 => (b'0' + s) as char,
            10..=35 => (b'a' + s - 10) as char,
            _ => '?',
        })
        .collect()
}

/// Square 0/1 transition matrix of a subshift of finite type.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TransitionMatrix {
    k: usize,
    allowed: Vec<bool>,
}

impl TransitionMatrix {
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let k = rows.len();
        if k == 0 || k > 256 {
            return Err(Error::invalid("transition matrix must have 1..=256 rows"));
        }
        let mut allowed = Vec::with_capacity(k * k);
        for (a, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::invalid(format!("row {a} has {} entries, expected {k}", row.len())));
            }
            if row.iter().any(|&e| e > 1) {
                return Err(Error::invalid("transition entries must be 0 or 1"));
            }
            if row.iter().all(|&e| e == 0) {
                return Err(Error::invalid(format!("row {a} has no allowed successor")));
            }
            allowed.extend(row.iter().map(|&e| e == 1));
        }
        Ok(TransitionMatrix { k, allowed })
    }

    pub fn full(k: usize) -> Self {
        TransitionMatrix { k, allowed: alloc::vec![true; k * k] }
    }

    /// `[[1,1],[1,0]]`: no two consecutive 1s.
    pub fn golden_mean() -> Self {
        TransitionMatrix { k: 2, allowed: alloc::vec![true, true, true, false] }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn allowed(&self, from: usize, to: usize) -> bool {
        self.allowed[from * self.k + to]
    }

    /// Allowed successors of `from`, in increasing order.
    pub fn successors(&self, from: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.k).filter(move |&to| self.allowed(from, to))
    }

    /// Rows as `11,10` style text.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for a in 0..self.k {
            if a > 0 {
                out.push(',');
            }
            for b in 0..self.k {
                out.push(if self.allowed(a, b) { '1' } else { '0' });
            }
        }
        out
    }

    /// True when some power of the matrix is strictly positive (Wielandt bound).
    pub fn is_primitive(&self) -> bool {
        let k = self.k;
        let mut power = self.allowed.clone();
        let steps = (k - 1) * (k - 1) + 1;
        for _ in 1..steps {
            if power.iter().all(|&e| e) {
                return true;
            }
            let mut next = alloc::vec![false; k * k];
            for i in 0..k {
                for j in 0..k {
                    next[i * k + j] = (0..k).any(|m| power[i * k + m] && self.allowed(m, j));
                }
            }
            power = next;
        }
        power.iter().all(|&e| e)
    }
}

/// Which map acts on which state space.
#[derive(Clone, Debug, PartialEq)]
pub enum SystemKind {
    FullShift { k: usize },
    Sft(TransitionMatrix),
    Doubling,
    Rotation { alpha: CirclePoint },
}

/// A map `T` with its base metric.
#[derive(Clone, Debug, PartialEq)]
pub struct DynSystem {
    kind: SystemKind,
    word_length: usize,
}

impl DynSystem {
    pub fn full_shift(k: usize, word_length: usize) -> Result<Self> {
        if k == 0 || k > 256 {
            return Err(Error::invalid("alphabet size must be in 1..=256"));
        }
        if word_length < 1 {
            return Err(Error::invalid("word length must be >= 1"));
        }
        Ok(DynSystem { kind: SystemKind::FullShift { k }, word_length })
    }

    pub fn sft(matrix: TransitionMatrix, word_length: usize) -> Result<Self> {
        if word_length < 1 {
            return Err(Error::invalid("word length must be >= 1"));
        }
        Ok(DynSystem { kind: SystemKind::Sft(matrix), word_length })
    }

    pub fn golden_mean(word_length: usize) -> Result<Self> {
        Self::sft(TransitionMatrix::golden_mean(), word_length)
    }

    pub fn doubling() -> Self {
        DynSystem { kind: SystemKind::Doubling, word_length: 0 }
    }

    pub fn rotation(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid("rotation angle must lie in (0, 1)"));
        }
        Ok(DynSystem {
            kind: SystemKind::Rotation { alpha: CirclePoint::from_f64(alpha) },
            word_length: 0,
        })
    }

    pub fn kind(&self) -> &SystemKind {
        &self.kind
    }

    /// Truncation horizon `L` (0 for circle maps).
    pub fn word_length(&self) -> usize {
        self.word_length
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self.kind, SystemKind::FullShift { .. } | SystemKind::Sft(_))
    }

    pub fn alphabet_size(&self) -> Option<usize> {
        match &self.kind {
            SystemKind::FullShift { k } => Some(*k),
            SystemKind::Sft(m) => Some(m.k()),
            _ => None,
        }
    }

    /// Transition matrix of a symbolic system (all ones for the full shift).
    pub fn transitions(&self) -> Option<TransitionMatrix> {
        match &self.kind {
            SystemKind::FullShift { k } => Some(TransitionMatrix::full(*k)),
            SystemKind::Sft(m) => Some(m.clone()),
            _ => None,
        }
    }

    /// Short stable identifier used in result records.
    pub fn id(&self) -> String {
        match &self.kind {
            SystemKind::FullShift { k } => format!("fullshift(k={k},L={})", self.word_length),
            SystemKind::Sft(m) => format!("sft(k={},A={},L={})", m.k(), m.to_text(), self.word_length),
            SystemKind::Doubling => String::from("doubling"),
            SystemKind::Rotation { alpha } => format!("rotation(alpha={})", alpha.to_f64()),
        }
    }

    /// Checks that `x` lives in this system's state space.
    pub fn check_point(&self, x: &Point) -> Result<()> {
        match (x, self.alphabet_size()) {
            (Point::Symbolic(w), Some(k)) => {
                if w.is_empty() || w.iter().any(|&s| s as usize >= k) {
                    Err(Error::invalid("word is empty or uses symbols outside the alphabet"))
                } else {
                    Ok(())
                }
            }
            (Point::Circle(_), None) => Ok(()),
            _ => Err(Error::KindMismatch),
        }
    }

    /// True when every consecutive pair of symbols is an allowed transition.
    pub fn is_admissible(&self, word: &[u8]) -> bool {
        match &self.kind {
            SystemKind::FullShift { k } => word.iter().all(|&s| (s as usize) < *k),
            SystemKind::Sft(m) => {
                word.iter().all(|&s| (s as usize) < m.k())
                    && word.windows(2).all(|p| m.allowed(p[0] as usize, p[1] as usize))
            }
            _ => false,
        }
    }

    fn same_kind(&self, x: &Point) -> Result<()> {
        match (x, self.is_symbolic()) {
            (Point::Symbolic(_), true) | (Point::Circle(_), false) => Ok(()),
            _ => Err(Error::KindMismatch),
        }
    }

    /// `T(x)`.
    pub fn apply_map(&self, x: &Point) -> Result<Point> {
        self.same_kind(x)?;
        match (x, &self.kind) {
            (Point::Symbolic(w), _) => {
                if w.len() < 2 {
                    return Err(Error::HorizonExhausted { needed: 2, available: w.len() });
                }
                Ok(Point::Symbolic(w[1..].to_vec()))
            }
            (Point::Circle(c), SystemKind::Doubling) => Ok(Point::Circle(c.doubled())),
            (Point::Circle(c), SystemKind::Rotation { alpha }) => Ok(Point::Circle(c.rotated(*alpha))),
            _ => Err(Error::KindMismatch),
        }
    }

    /// `T^steps` on a circle coordinate.
    #[inline]
    pub(crate) fn circle_iterate(&self, c: CirclePoint, steps: usize) -> CirclePoint {
        match &self.kind {
            SystemKind::Doubling => {
                if steps >= 64 {
                    CirclePoint(0)
                } else {
                    CirclePoint(c.0 << steps)
                }
            }
            SystemKind::Rotation { alpha } => CirclePoint(c.0.wrapping_add(alpha.0.wrapping_mul(steps as u64))),
            _ => c,
        }
    }

    /// Fails unless the `n`-point orbit with step `q` fits in `x`.
    pub(crate) fn check_horizon(&self, x: &Point, n: usize, q: usize) -> Result<()> {
        check_counts(n, q)?;
        self.same_kind(x)?;
        if let Point::Symbolic(w) = x {
            let needed = (n - 1) * q + 1;
            if w.len() < needed {
                return Err(Error::HorizonExhausted { needed, available: w.len() });
            }
        }
        Ok(())
    }

    /// `(x, T^q x, .., T^{q(n-1)} x)`.
    pub fn orbit_segment(&self, x: &Point, n: usize, q: usize) -> Result<Vec<Point>> {
        self.check_horizon(x, n, q)?;
        Ok(match x {
            Point::Symbolic(w) => (0..n).map(|i| Point::Symbolic(w[q * i..].to_vec())).collect(),
            Point::Circle(c) => {
                let mut out = Vec::with_capacity(n);
                let mut cur = *c;
                for _ in 0..n {
                    out.push(Point::Circle(cur));
                    cur = self.circle_iterate(cur, q);
                }
                out
            }
        })
    }

    /// Base metric `d(x, y)`.
    pub fn base_distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.same_kind(x)?;
        self.same_kind(y)?;
        match (x, y) {
            (Point::Symbolic(a), Point::Symbolic(b)) => Ok(symbolic_distance(a, b)),
            (Point::Circle(a), Point::Circle(b)) => Ok(a.distance(*b)),
            _ => Err(Error::KindMismatch),
        }
    }

    /// `S_n^q phi(x) = sum_{i<n} phi(T^{qi} x)`.
    pub fn birkhoff_sum(&self, phi: &Potential, x: &Point, n: usize, q: usize) -> Result<f64> {
        self.check_horizon(x, n, q)?;
        let mut sum = 0.0;
        match x {
            Point::Symbolic(w) => {
                for i in 0..n {
                    sum += phi.eval_word(&w[q * i..])?;
                }
            }
            Point::Circle(c) => {
                let mut cur = *c;
                for _ in 0..n {
                    sum += phi.eval_circle(cur)?;
                    cur = self.circle_iterate(cur, q);
                }
            }
        }
        Ok(sum)
    }
}

pub(crate) fn check_counts(n: usize, q: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n must be >= 1"));
    }
    if q == 0 {
        return Err(Error::invalid("q must be >= 1"));
    }
    Ok(())
}

/// `2^-j` for the first differing index `j`, or 0 when the words agree on
/// the shorter length.
#[inline]
pub(crate) fn symbolic_distance(a: &[u8], b: &[u8]) -> f64 {
    match a.iter().zip(b).position(|(x, y)| x != y) {
        Some(j) => pow2_neg(j),
        None => 0.0,
    }
}

/// Real-valued functions on the circle with a known Lipschitz constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CircleFn {
    /// The coordinate in `[0, 1)`.
    Identity,
    /// `amplitude * cos(2 pi x)`.
    Cosine { amplitude: f64 },
}

impl CircleFn {
    pub fn lipschitz(&self) -> f64 {
        match self {
            CircleFn::Identity => 1.0,
            CircleFn::Cosine { amplitude } => 2.0 * core::f64::consts::PI * amplitude.abs(),
        }
    }

    fn eval(&self, x: CirclePoint) -> f64 {
        match self {
            CircleFn::Identity => x.to_f64(),
            CircleFn::Cosine { amplitude } => amplitude * libm::cos(2.0 * core::f64::consts::PI * x.to_f64()),
        }
    }

    fn sup(&self) -> f64 {
        match self {
            CircleFn::Identity => 1.0,
            CircleFn::Cosine { amplitude } => amplitude.abs(),
        }
    }
}

/// A continuous observable `phi`.
#[derive(Clone, Debug, PartialEq)]
pub enum Potential {
    Zero,
    Constant(f64),
    /// `phi(x) = table[x_0]` on symbolic spaces.
    FirstSymbol(Vec<f64>),
    /// `phi(x) = func(x) + offset` on the circle.
    Circle { func: CircleFn, offset: f64 },
}

impl Potential {
    pub fn circle(func: CircleFn) -> Self {
        Potential::Circle { func, offset: 0.0 }
    }

    /// An upper bound for `sup |phi|`.
    pub fn sup_norm(&self) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Constant(c) => c.abs(),
            Potential::FirstSymbol(t) => t.iter().fold(0.0f64, |m, v| m.max(v.abs())),
            Potential::Circle { func, offset } => func.sup() + offset.abs(),
        }
    }

    /// `phi + c`.
    pub fn shifted(&self, c: f64) -> Potential {
        match self {
            Potential::Zero => Potential::Constant(c),
            Potential::Constant(a) => Potential::Constant(a + c),
            Potential::FirstSymbol(t) => Potential::FirstSymbol(t.iter().map(|v| v + c).collect()),
            Potential::Circle { func, offset } => Potential::Circle { func: *func, offset: offset + c },
        }
    }

    pub fn eval(&self, x: &Point) -> Result<f64> {
        match x {
            Point::Symbolic(w) => self.eval_word(w),
            Point::Circle(c) => self.eval_circle(*c),
        }
    }

    #[inline]
    pub(crate) fn eval_word(&self, w: &[u8]) -> Result<f64> {
        match self {
            Potential::Zero => Ok(0.0),
            Potential::Constant(c) => Ok(*c),
            Potential::FirstSymbol(t) => {
                let s = *w.first().ok_or(Error::LengthTooShort { needed: 1, available: 0 })? as usize;
                t.get(s)
                    .copied()
                    .ok_or_else(|| Error::invalid(format!("potential table has no entry for symbol {s}")))
            }
            Potential::Circle { .. } => Err(Error::KindMismatch),
        }
    }

    #[inline]
    pub(crate) fn eval_circle(&self, x: CirclePoint) -> Result<f64> {
        match self {
            Potential::Zero => Ok(0.0),
            Potential::Constant(c) => Ok(*c),
            Potential::FirstSymbol(_) => Err(Error::KindMismatch),
            Potential::Circle { func, offset } => Ok(func.eval(x) + offset),
        }
    }

    /// Short stable identifier used in result records.
    pub fn id(&self) -> String {
        match self {
            Potential::Zero => String::from("zero"),
            Potential::Constant(c) => format!("const:{c}"),
            Potential::FirstSymbol(t) => {
                let mut s = String::from("first_symbol:");
                for (i, v) in t.iter().enumerate() {
                    if i > 0 {
                        s.push(',');
                    }
                    let _ = write!(s, "{v}");
                }
                s
            }
            Potential::Circle { func, offset } => {
                let base = match func {
                    CircleFn::Identity => String::from("identity"),
                    CircleFn::Cosine { amplitude } => format!("cos:{amplitude}"),
                };
                if *offset == 0.0 {
                    base
                } else {
                    format!("{base}+{offset}")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    fn coord(p: &Point) -> f64 {
        p.as_circle().unwrap().to_f64()
    }

    #[test]
    fn doubling_quarter() {
        let t = DynSystem::doubling();
        let y = t.apply_map(&Point::circle(0.25).unwrap()).unwrap();
        assert_eq!(coord(&y), 0.5);
    }

    #[test]
    fn rotation_wraps() {
        let t = DynSystem::rotation(0.3).unwrap();
        let y = t.apply_map(&Point::circle(0.9).unwrap()).unwrap();
        assert!(close(coord(&y), 0.2));
    }

    #[test]
    fn shift_drops_first_symbol() {
        let t = DynSystem::full_shift(2, 4).unwrap();
        let y = t.apply_map(&Point::Symbolic(vec![0, 1, 1, 0])).unwrap();
        assert_eq!(y, Point::Symbolic(vec![1, 1, 0]));
        let err = t.apply_map(&Point::Symbolic(vec![1])).unwrap_err();
        assert_eq!(err.code(), "HORIZON_EXHAUSTED");
    }

    #[test]
    fn kind_mismatch() {
        let t = DynSystem::doubling();
        assert_eq!(t.apply_map(&Point::Symbolic(vec![0, 1])), Err(Error::KindMismatch));
        let s = DynSystem::full_shift(2, 8).unwrap();
        assert_eq!(s.base_distance(&Point::Symbolic(vec![0]), &Point::circle(0.1).unwrap()), Err(Error::KindMismatch));
    }

    #[test]
    fn doubling_orbits() {
        let t = DynSystem::doubling();
        let x = Point::circle(0.001).unwrap();
        let orbit: Vec<f64> = t.orbit_segment(&x, 3, 1).unwrap().iter().map(coord).collect();
        for (a, b) in orbit.iter().zip([0.001, 0.002, 0.004]) {
            assert!(close(*a, b));
        }
        let orbit: Vec<f64> = t.orbit_segment(&x, 2, 2).unwrap().iter().map(coord).collect();
        assert!(close(orbit[0], 0.001) && close(orbit[1], 0.004));
        assert_eq!(t.orbit_segment(&x, 1, 3).unwrap(), vec![x]);
    }

    #[test]
    fn orbit_segment_horizon() {
        let t = DynSystem::full_shift(2, 8).unwrap();
        let x = Point::Symbolic(vec![0; 8]);
        assert!(t.orbit_segment(&x, 8, 1).is_ok());
        assert_eq!(t.orbit_segment(&x, 9, 1).unwrap_err().code(), "HORIZON_EXHAUSTED");
        assert_eq!(t.orbit_segment(&x, 5, 2).unwrap_err().code(), "HORIZON_EXHAUSTED");
    }

    #[test]
    fn base_distances() {
        let c = DynSystem::doubling();
        let d = c.base_distance(&Point::circle(0.1).unwrap(), &Point::circle(0.9).unwrap()).unwrap();
        assert!(close(d, 0.2));
        let s = DynSystem::full_shift(2, 4).unwrap();
        let d = s.base_distance(&Point::Symbolic(vec![0, 1, 1, 0]), &Point::Symbolic(vec![0, 1, 1, 1])).unwrap();
        assert_eq!(d, 0.125);
        let x = Point::Symbolic(vec![1, 0, 1]);
        assert_eq!(s.base_distance(&x, &x).unwrap(), 0.0);
        // compared on the shorter word only
        assert_eq!(s.base_distance(&x, &Point::Symbolic(vec![1, 0])).unwrap(), 0.0);
    }

    #[test]
    fn birkhoff_examples() {
        let t = DynSystem::doubling();
        let x = Point::circle(0.001).unwrap();
        assert_eq!(t.birkhoff_sum(&Potential::Zero, &x, 10, 1).unwrap(), 0.0);
        assert!(close(t.birkhoff_sum(&Potential::Constant(0.3), &x, 10, 2).unwrap(), 3.0));
        let id = Potential::circle(CircleFn::Identity);
        assert!(close(t.birkhoff_sum(&id, &x, 3, 1).unwrap(), 0.007));
    }

    #[test]
    fn sup_norms() {
        assert_eq!(Potential::Zero.sup_norm(), 0.0);
        assert_eq!(Potential::Constant(-2.5).sup_norm(), 2.5);
        assert_eq!(Potential::FirstSymbol(vec![0.1, -0.7]).sup_norm(), 0.7);
        assert!(close(CircleFn::Cosine { amplitude: 0.5 }.lipschitz(), core::f64::consts::PI));
    }

    #[test]
    fn depth_and_agreement() {
        assert_eq!(depth_needed(0.0625), 4);
        assert_eq!(depth_needed(0.05), 5);
        assert_eq!(depth_needed(0.1), 4);
        // d < 2^-4 requires agreement on 5 symbols
        assert_eq!(agreement_length(0.0625), 5);
        assert_eq!(agreement_length(0.05), 5);
        assert_eq!(agreement_length(2.0), 0);
    }

    #[test]
    fn transition_validation() {
        assert!(TransitionMatrix::from_rows(&[vec![1, 1], vec![0, 0]]).is_err());
        assert!(TransitionMatrix::from_rows(&[vec![1, 1], vec![1]]).is_err());
        assert!(TransitionMatrix::golden_mean().is_primitive());
        let periodic = TransitionMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert!(!periodic.is_primitive());
        assert_eq!(TransitionMatrix::golden_mean().to_text(), "11,10");
    }

    #[test]
    fn words_roundtrip_text() {
        assert_eq!(parse_word("01a").unwrap(), vec![0, 1, 10]);
        assert_eq!(format_word(&[0, 1, 10]), "01a");
        assert!(parse_word("0-1").is_err());
    }

    #[test]
    fn circle_bits_are_reduced() {
        assert_eq!(CirclePoint::from_f64(1.25), CirclePoint::from_f64(0.25));
        assert_eq!(CirclePoint::from_f64(-0.75), CirclePoint::from_f64(0.25));
        assert!(CirclePoint::from_bits(u64::MAX).to_f64() < 1.0);
    }
}
