//! Finite stand-ins for the whole state space in topological estimates.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::systems::{depth_needed, pow2_neg, CirclePoint, DynSystem, Point, SystemKind};

/// Largest grid the built-in constructors will enumerate.
pub const GRID_CAP: usize = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridLayout {
    /// One admissible word per cylinder of this length.
    Cylinders { cylinder_len: usize },
    /// `size` equally spaced circle points `k / size`.
    CircleUniform { size: usize },
    /// Caller-provided points; density is not checked.
    Custom,
}

/// A finite point set with the layout that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    points: Vec<Point>,
    layout: GridLayout,
}

impl Grid {
    /// One representative per admissible cylinder of length `cylinder_len`,
    /// each extended to `word_len` symbols by the smallest allowed successors.
    pub fn cylinders(system: &DynSystem, cylinder_len: usize, word_len: usize) -> Result<Grid> {
        let k = system
            .alphabet_size()
            .ok_or_else(|| Error::invalid("cylinder grids need a symbolic system"))?;
        let a = system.transitions().unwrap_or_else(|| crate::systems::TransitionMatrix::full(k));
        if cylinder_len == 0 || word_len < cylinder_len {
            return Err(Error::invalid("need 1 <= cylinder_len <= word_len"));
        }
        let count = super::symbolic::word_count(&a, cylinder_len);
        if count > GRID_CAP as f64 {
            return Err(Error::invalid(format!(
                "cylinder grid would hold {count} points (cap {GRID_CAP})"
            )));
        }
        let mut points = Vec::with_capacity(count as usize);
        let mut word: Vec<u8> = Vec::with_capacity(word_len);
        // depth-first enumeration in lexicographic order
        fn visit(a: &crate::systems::TransitionMatrix, word: &mut Vec<u8>, cyl: usize, len: usize, out: &mut Vec<Point>) {
            if word.len() == cyl {
                let mut w = word.clone();
                while w.len() < len {
                    let last = *w.last().unwrap_or(&0) as usize;
                    match a.successors(last).next() {
                        Some(s) => w.push(s as u8),
                        None => return,
                    }
                }
                out.push(Point::Symbolic(w));
                return;
            }
            let choices: Vec<usize> = match word.last() {
                None => (0..a.k()).collect(),
                Some(&l) => a.successors(l as usize).collect(),
            };
            for s in choices {
                word.push(s as u8);
                visit(a, word, cyl, len, out);
                word.pop();
            }
        }
        visit(&a, &mut word, cylinder_len, word_len, &mut points);
        if points.is_empty() {
            return Err(Error::invalid("no admissible words of the requested length"));
        }
        Ok(Grid { points, layout: GridLayout::Cylinders { cylinder_len } })
    }

    pub fn circle_uniform(size: usize) -> Result<Grid> {
        if size == 0 || size > GRID_CAP {
            return Err(Error::invalid(format!("circle grid size must be in 1..={GRID_CAP}")));
        }
        let points = (0..size)
            .map(|i| Point::Circle(CirclePoint::from_bits((((i as u128) << 64) / size as u128) as u64)))
            .collect();
        Ok(Grid { points, layout: GridLayout::CircleUniform { size } })
    }

    pub fn custom(points: Vec<Point>) -> Grid {
        Grid { points, layout: GridLayout::Custom }
    }

    /// The coarsest built-in grid that is `eps/2`-dense for the q-step Bowen
    /// metric at horizon `n`.
    pub fn builtin(system: &DynSystem, n: usize, q: usize, eps: f64) -> Result<Grid> {
        check_eps(eps)?;
        if n == 0 || q == 0 {
            return Err(Error::invalid("n and q must be >= 1"));
        }
        if system.is_symbolic() {
            let cyl = (n - 1) * q + 1 + depth_needed(eps);
            Grid::cylinders(system, cyl, cyl)
        } else {
            let expansion = expansion(system, n, q);
            let size = libm::ceil(expansion / eps);
            if !(size <= GRID_CAP as f64) {
                return Err(Error::invalid(format!("circle grid would need {size} points (cap {GRID_CAP})")));
            }
            Grid::circle_uniform(size as usize)
        }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn layout(&self) -> GridLayout {
        self.layout
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `GRID_TOO_COARSE` unless every point of the space is within `eps/2` of
    /// the grid in the q-step Bowen metric at horizon `n`. Custom grids pass.
    pub fn check_dense(&self, system: &DynSystem, n: usize, q: usize, eps: f64) -> Result<()> {
        let radius = match self.layout {
            GridLayout::Custom => return Ok(()),
            GridLayout::Cylinders { cylinder_len } => {
                if !system.is_symbolic() {
                    return Err(Error::KindMismatch);
                }
                let window = (n.max(1) - 1) * q + 1;
                if cylinder_len < window {
                    return Err(Error::GridTooCoarse(format!(
                        "cylinders of length {cylinder_len} do not span the {window}-symbol orbit window"
                    )));
                }
                pow2_neg(cylinder_len - window + 1)
            }
            GridLayout::CircleUniform { size } => {
                if system.is_symbolic() {
                    return Err(Error::KindMismatch);
                }
                expansion(system, n, q) / (2.0 * size as f64)
            }
        };
        if radius <= eps / 2.0 {
            Ok(())
        } else {
            Err(Error::GridTooCoarse(format!("covering radius {radius} exceeds eps/2 = {}", eps / 2.0)))
        }
    }
}

/// Bound on how much `T^{iq}` stretches small arcs, over `i < n`.
fn expansion(system: &DynSystem, n: usize, q: usize) -> f64 {
    match system.kind() {
        SystemKind::Doubling => libm::exp2(((n.max(1) - 1) * q) as f64),
        _ => 1.0,
    }
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("eps must lie in (0, 1), got {eps}")))
    }
}
