//! Closed-form pressures and word counts used as ground truth.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::perron_right;
use crate::measures::MeasureSpec;
use crate::systems::{CircleFn, DynSystem, Potential, SystemKind, TransitionMatrix};

const POWER_TOL: f64 = 1e-12;
const POWER_MAX_ITER: usize = 1_000_000;

/// Number of admissible words of length `len`, as a float.
pub(crate) fn word_count(a: &TransitionMatrix, len: usize) -> f64 {
    libm::exp(log_word_count(a, len))
}

/// `ln` of the number of admissible words of length `len` (`-inf` if none).
pub fn log_word_count(a: &TransitionMatrix, len: usize) -> f64 {
    let k = a.k();
    if len == 0 {
        return 0.0;
    }
    // v[s] = number of admissible words of the current length ending in s, divided by e^log_scale
    let mut v = vec![1.0f64; k];
    let mut log_scale = 0.0;
    for _ in 1..len {
        let mut next = vec![0.0f64; k];
        for (s, &count) in v.iter().enumerate() {
            for t in a.successors(s) {
                next[t] += count;
            }
        }
        let m = next.iter().fold(0.0f64, |m, &x| m.max(x));
        if m == 0.0 {
            return f64::NEG_INFINITY;
        }
        for x in next.iter_mut() {
            *x /= m;
        }
        log_scale += libm::log(m);
        v = next;
    }
    log_scale + libm::log(v.iter().sum::<f64>())
}

/// `(1/n) ln(#words(n + depth) / #words(n))`: the excess that cylinder grids of
/// length `n + depth` add to a spanning estimate at horizon `n`.
pub fn cylinder_drift(system: &DynSystem, n: usize, depth: usize) -> Option<f64> {
    let a = system.transitions()?;
    Some((log_word_count(&a, n + depth) - log_word_count(&a, n)) / n as f64)
}

/// Topological pressure of a potential depending on the first symbol only.
///
/// Full shift: `ln sum_a e^{phi(a)}`. Subshift: `ln` of the Perron root of
/// `diag(e^phi) A`, which requires a primitive `A`.
pub fn exact_shift_pressure(k: usize, a: Option<&TransitionMatrix>, table: &[f64]) -> Result<f64> {
    if table.len() != k || k == 0 {
        return Err(Error::invalid("potential table length must equal the alphabet size"));
    }
    match a {
        None => {
            let m = table.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
            let s: f64 = table.iter().map(|&v| libm::exp(v - m)).sum();
            Ok(m + libm::log(s))
        }
        Some(a) => {
            if a.k() != k {
                return Err(Error::invalid("transition matrix size differs from alphabet size"));
            }
            if !a.is_primitive() {
                return Err(Error::NotPrimitive);
            }
            let shift = table.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
            let mut m = vec![0.0; k * k];
            for i in 0..k {
                for j in 0..k {
                    if a.allowed(i, j) {
                        m[i * k + j] = libm::exp(table[i] - shift);
                    }
                }
            }
            let (lambda, _) = perron_right(&m, k, POWER_TOL, POWER_MAX_ITER).ok_or(Error::NotPrimitive)?;
            Ok(shift + libm::log(lambda))
        }
    }
}

/// The first-symbol table of `phi` over a `k`-letter alphabet, if it has one.
pub fn potential_table(phi: &Potential, k: usize) -> Option<Vec<f64>> {
    match phi {
        Potential::Zero => Some(vec![0.0; k]),
        Potential::Constant(c) => Some(vec![*c; k]),
        Potential::FirstSymbol(t) if t.len() == k => Some(t.clone()),
        _ => None,
    }
}

/// `int phi d(Lebesgue)` for circle potentials.
fn lebesgue_integral(phi: &Potential) -> Option<f64> {
    match phi {
        Potential::Zero => Some(0.0),
        Potential::Constant(c) => Some(*c),
        Potential::Circle { func: CircleFn::Identity, offset } => Some(0.5 + offset),
        Potential::Circle { func: CircleFn::Cosine { .. }, offset } => Some(*offset),
        Potential::FirstSymbol(_) => None,
    }
}

/// Topological pressure where a closed form is known.
pub fn reference_topological_pressure(system: &DynSystem, phi: &Potential) -> Option<f64> {
    match system.kind() {
        SystemKind::FullShift { k } => exact_shift_pressure(*k, None, &potential_table(phi, *k)?).ok(),
        SystemKind::Sft(a) => exact_shift_pressure(a.k(), Some(a), &potential_table(phi, a.k())?).ok(),
        SystemKind::Doubling => match phi {
            Potential::Zero => Some(core::f64::consts::LN_2),
            Potential::Constant(c) => Some(core::f64::consts::LN_2 + c),
            _ => None,
        },
        // every invariant measure of an irrational rotation is Lebesgue
        SystemKind::Rotation { .. } => lebesgue_integral(phi),
    }
}

/// `h_mu(T) + int phi d(mu)` where a closed form is known.
pub fn reference_measure_pressure(system: &DynSystem, phi: &Potential, spec: &MeasureSpec) -> Option<f64> {
    match (system.kind(), spec) {
        (SystemKind::FullShift { .. } | SystemKind::Sft(_), _) => {
            let k = system.alphabet_size()?;
            let table = potential_table(phi, k)?;
            let marginal = spec.first_symbol_marginal()?;
            Some(spec.shift_entropy()? + marginal.iter().zip(&table).map(|(p, t)| p * t).sum::<f64>())
        }
        (SystemKind::Doubling, MeasureSpec::LebesgueCircle) => {
            Some(core::f64::consts::LN_2 + lebesgue_integral(phi)?)
        }
        (SystemKind::Rotation { .. }, MeasureSpec::LebesgueCircle) => lebesgue_integral(phi),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn shift_pressure_examples() {
        let ln2 = core::f64::consts::LN_2;
        assert!(close(exact_shift_pressure(2, None, &[0.0, 0.0]).unwrap(), ln2, 1e-15));
        let beta = exact_shift_pressure(2, None, &[0.0, 0.7]).unwrap();
        assert!(close(beta, libm::log(1.0 + libm::exp(0.7)), 1e-15));
        assert!(close(beta, 1.10319, 1e-5));
        let golden = TransitionMatrix::golden_mean();
        let h = exact_shift_pressure(2, Some(&golden), &[0.0, 0.0]).unwrap();
        assert!(close(h, libm::log((1.0 + libm::sqrt(5.0)) / 2.0), 1e-10));
        // full matrix as an SFT agrees with the direct formula
        let full = TransitionMatrix::full(3);
        let t = [0.1, -0.4, 0.9];
        assert!(close(
            exact_shift_pressure(3, Some(&full), &t).unwrap(),
            exact_shift_pressure(3, None, &t).unwrap(),
            1e-10
        ));
    }

    #[test]
    fn not_primitive() {
        let swap = TransitionMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(exact_shift_pressure(2, Some(&swap), &[0.0, 0.0]), Err(Error::NotPrimitive));
    }

    #[test]
    fn word_counts() {
        let full = TransitionMatrix::full(2);
        assert!(close(word_count(&full, 20), 1_048_576.0, 1e-6));
        let golden = TransitionMatrix::golden_mean();
        // Fibonacci: words of length n number F(n+2)
        for (n, f) in [(1, 2.0), (2, 3.0), (3, 5.0), (4, 8.0), (5, 13.0), (6, 21.0)] {
            assert!(close(word_count(&golden, n), f, 1e-9));
        }
        let drift = cylinder_drift(&DynSystem::full_shift(2, 64).unwrap(), 16, 4).unwrap();
        assert!(close(drift, 4.0 * core::f64::consts::LN_2 / 16.0, 1e-12));
    }

    #[test]
    fn measure_references() {
        let full = DynSystem::full_shift(2, 64).unwrap();
        let spec = MeasureSpec::uniform_bernoulli(2);
        let v = reference_measure_pressure(&full, &Potential::FirstSymbol(vec![0.0, 0.7]), &spec).unwrap();
        assert!(close(v, core::f64::consts::LN_2 + 0.35, 1e-12));
        let rot = DynSystem::rotation(crate::systems::GOLDEN_CONJUGATE).unwrap();
        assert_eq!(reference_measure_pressure(&rot, &Potential::Zero, &MeasureSpec::LebesgueCircle), Some(0.0));
    }
}
