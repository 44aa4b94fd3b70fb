//! Gauge-fixing decoder.
//!
//! The ancilla protocol (modular CX copy, computational-basis measurement of
//! the ancillas, feedback shifts) is simulated as a direct basis measurement
//! of the output modes: copying basis information is classical, so the
//! outcome statistics are identical. [`gauge_fix_permutation`] gives the same
//! map as one explicit unitary basis relabeling.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::crosstalk::{CrosstalkParams, Mode, AMP_TOL, MAX_STATE_SIZE};
use crate::error::{Error, Result};
use crate::state::DiscreteState;

/// Norm deviation tolerated on decoder inputs.
pub const INPUT_NORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub x: usize,
    pub y: usize,
    /// Input projected onto the measured gauge sector and renormalized.
    pub collapsed: DiscreteState,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodeOutcome {
    pub mu1: i64,
    pub mu2: i64,
    pub gauge_j: i64,
    pub consistent: bool,
    pub x: usize,
    pub y: usize,
    pub corrected_state: DiscreteState,
}

fn check_output_state(state: &DiscreteState, params: &CrosstalkParams) -> Result<()> {
    let (m1, m2) = params.output_dims();
    if state.dims() != [m1, m2] {
        return Err(Error::InvalidArgument(format!(
            "decoder expects dims ({m1}, {m2}), got {:?}",
            state.dims()
        )));
    }
    let norm = state.norm_sqr();
    if (norm - 1.0).abs() > INPUT_NORM_TOL {
        return Err(Error::InvalidState(format!("squared norm {norm} is not 1")));
    }
    Ok(())
}

/// Samples a basis outcome `(x, y)` with probability `|amp|²` and collapses the
/// state onto the gauge sector the outcome belongs to.
///
/// The sector is the relative gauge offset `j2 − j1 mod n`. Every code state
/// lies in sector 0, so for noiseless inputs the collapse is the identity and
/// logical superpositions survive it.
pub fn simulate_ancilla_measurement<R: Rng + ?Sized>(
    state: &DiscreteState,
    params: &CrosstalkParams,
    rng: &mut R,
) -> Result<Measurement> {
    check_output_state(state, params)?;
    let total = state.norm_sqr();
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut chosen = None;
    let mut last_nonzero = None;
    for (flat, a) in state.amps().iter().enumerate() {
        let w = a.norm_sqr();
        if w == 0.0 {
            continue;
        }
        last_nonzero = Some(flat);
        acc += w;
        if target < acc {
            chosen = Some(flat);
            break;
        }
    }
    // rounding can leave target just above the final partial sum
    let flat = chosen
        .or(last_nonzero)
        .ok_or_else(|| Error::InvalidState("state has no support".into()))?;
    let idx = state.multi_index(flat);
    let (x, y) = (idx[0], idx[1]);

    let n = params.n();
    let (_, jx) = params.relabel(x, Mode::One)?;
    let (_, jy) = params.relabel(y, Mode::Two)?;
    let sector = (jy - jx).rem_euclid(n);
    let mut amps = state.amps().to_vec();
    for (flat, a) in amps.iter_mut().enumerate() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        let idx = state.multi_index(flat);
        let (_, j1) = params.relabel(idx[0], Mode::One)?;
        let (_, j2) = params.relabel(idx[1], Mode::Two)?;
        if (j2 - j1).rem_euclid(n) != sector {
            *a = Complex64::new(0.0, 0.0);
        }
    }
    let collapsed = DiscreteState::normalized(state.dims().to_vec(), amps)?;
    Ok(Measurement { x, y, collapsed })
}

/// `j = x·r1⁻¹ mod n`, consistent iff `y·r2⁻¹ mod n` agrees.
pub fn gauge_index_from_outcome(x: usize, y: usize, params: &CrosstalkParams) -> Result<(i64, bool)> {
    let (_, j1) = params.relabel(x, Mode::One)?;
    let (_, j2) = params.relabel(y, Mode::Two)?;
    Ok((j1, j1 == j2))
}

/// Splits amplitudes keyed by `(μ1, μ2, g1, g2)` into a logical state over
/// `(d1, d2)`, provided the gauge part is a product factor.
fn split_logical(
    entries: &BTreeMap<(i64, i64, i64, i64), Complex64>,
    params: &CrosstalkParams,
) -> Result<DiscreteState> {
    let (d1, d2) = (params.d1() as usize, params.d2() as usize);
    let mut by_gauge: BTreeMap<(i64, i64), f64> = BTreeMap::new();
    for (&(_, _, g1, g2), a) in entries {
        *by_gauge.entry((g1, g2)).or_default() += a.norm_sqr();
    }
    let (&pivot, _) = by_gauge
        .iter()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::InvalidState("empty support".into()))?;
    let mut logical = vec![Complex64::new(0.0, 0.0); d1 * d2];
    for (&(l1, l2, g1, g2), &a) in entries {
        if (g1, g2) == pivot {
            logical[l1 as usize * d2 + l2 as usize] = a;
        }
    }
    let logical = DiscreteState::normalized(vec![d1, d2], logical)?;

    // Rank-one check: every amplitude must equal ψ_L(l) · φ(g).
    let mut gauge: BTreeMap<(i64, i64), Complex64> = BTreeMap::new();
    for (&(l1, l2, g1, g2), &a) in entries {
        let psi = logical.amps()[l1 as usize * d2 + l2 as usize];
        if psi.norm() > AMP_TOL {
            gauge.entry((g1, g2)).or_insert(a / psi);
        }
    }
    for (&(l1, l2, g1, g2), &a) in entries {
        let psi = logical.amps()[l1 as usize * d2 + l2 as usize];
        let phi = gauge.get(&(g1, g2)).copied().unwrap_or_default();
        if (psi * phi - a).norm() > AMP_TOL {
            return Err(Error::ResidualGauge(format!(
                "amplitude at logical ({l1}, {l2}), gauge ({g1}, {g2}) does not factor"
            )));
        }
    }
    Ok(logical)
}

fn correct_and_reduce(
    collapsed: &DiscreteState,
    j1: i64,
    j2: i64,
    params: &CrosstalkParams,
) -> Result<DiscreteState> {
    let n = params.n();
    for j in [j1, j2] {
        if !(0..n).contains(&j) {
            return Err(Error::InvalidArgument(format!("gauge index {j} out of range [0, {n})")));
        }
    }
    let (m1, m2) = params.output_dims();
    let shift1 = (j1 * params.r1()).rem_euclid(m1 as i64) as usize;
    let shift2 = (j2 * params.r2()).rem_euclid(m2 as i64) as usize;
    let mut entries = BTreeMap::new();
    for (idx, a) in collapsed.support(0.0) {
        let x = (idx[0] + m1 - shift1) % m1;
        let y = (idx[1] + m2 - shift2) % m2;
        let (l1, g1) = params.relabel(x, Mode::One)?;
        let (l2, g2) = params.relabel(y, Mode::Two)?;
        debug_assert!(g1 != 0 || x == params.logical_offset(l1, Mode::One));
        entries.insert((l1, l2, g1, g2), a);
    }
    split_logical(&entries, params)
}

/// Shifts mode `i` by `−j·r_i mod n·d_i` and reads each corrected index as its
/// logical label `μ_i = index mod d_i`, returning a state over `(d1, d2)`.
///
/// Corrected support outside the `j = 0` orbit is accepted only when it
/// factors off the logical labels (then it is traced away); otherwise the
/// result is [`Error::ResidualGauge`].
pub fn apply_correction_and_reduce(
    collapsed: &DiscreteState,
    j: i64,
    params: &CrosstalkParams,
) -> Result<DiscreteState> {
    check_output_state(collapsed, params)?;
    correct_and_reduce(collapsed, j, j, params)
}

/// Measure, infer the gauge index, correct, and read out the logical pair.
///
/// Inconsistent outcomes are reported with `consistent = false`; the labels
/// then come from the raw outcome and each mode is corrected with its own
/// inferred index.
pub fn decode<R: Rng + ?Sized>(
    state: &DiscreteState,
    params: &CrosstalkParams,
    rng: &mut R,
) -> Result<DecodeOutcome> {
    let Measurement { x, y, collapsed } = simulate_ancilla_measurement(state, params, rng)?;
    let (j, consistent) = gauge_index_from_outcome(x, y, params)?;
    let (_, j2) = params.relabel(y, Mode::Two)?;
    let corrected_state = correct_and_reduce(&collapsed, j, if consistent { j } else { j2 }, params)?;
    Ok(DecodeOutcome {
        mu1: x as i64 % params.d1(),
        mu2: y as i64 % params.d2(),
        gauge_j: j,
        consistent,
        x,
        y,
        corrected_state,
    })
}

/// Register layout produced by [`gauge_fix_permutation`]:
/// `(μ1, μ2, j2 − j1 mod n, j1)`.
pub fn gauge_fix_dims(params: &CrosstalkParams) -> Vec<usize> {
    let n = params.n() as usize;
    vec![params.d1() as usize, params.d2() as usize, n, n]
}

/// Basis permutation realizing the gauge-fixing unitary.
///
/// Source index `x·(n·d2) + y` is sent to the flat index of
/// `(μ1, μ2, j2 − j1 mod n, j1)` in [`gauge_fix_dims`], where
/// `(μ_i, j_i)` come from modular inverse multiplication by `r_i⁻¹` and the
/// third register is the controlled modular subtraction. A code state maps
/// to `|μ1⟩|μ2⟩ ⊗ |0⟩ ⊗ (1/√n) Σ_j |j⟩`.
pub fn gauge_fix_permutation(params: &CrosstalkParams) -> Result<Vec<usize>> {
    let (m1, m2) = params.output_dims();
    let size = m1.saturating_mul(m2);
    if size > MAX_STATE_SIZE {
        return Err(Error::TooLarge {
            size,
            limit: MAX_STATE_SIZE,
        });
    }
    let n = params.n();
    let d2 = params.d2();
    let mut table = Vec::with_capacity(size);
    for x in 0..m1 {
        let (mu1, j1) = params.relabel(x, Mode::One)?;
        for y in 0..m2 {
            let (mu2, j2) = params.relabel(y, Mode::Two)?;
            let diff = (j2 - j1).rem_euclid(n);
            let flat = ((mu1 * d2 + mu2) * n + diff) * n + j1;
            table.push(flat as usize);
        }
    }
    Ok(table)
}

pub fn invert_permutation(perm: &[usize]) -> Result<Vec<usize>> {
    let mut inv = vec![usize::MAX; perm.len()];
    for (i, &t) in perm.iter().enumerate() {
        if t >= perm.len() || inv[t] != usize::MAX {
            return Err(Error::InvalidArgument("table is not a permutation".into()));
        }
        inv[t] = i;
    }
    Ok(inv)
}

/// Applies [`gauge_fix_permutation`] to an output state.
pub fn apply_gauge_fix(state: &DiscreteState, params: &CrosstalkParams) -> Result<DiscreteState> {
    check_output_state(state, params)?;
    state.permuted(&gauge_fix_permutation(params)?, gauge_fix_dims(params))
}

/// Traces the gauge registers of a gauge-fixed state, requiring them to be
/// in a product with the logical registers.
pub fn extract_logical(fixed: &DiscreteState, params: &CrosstalkParams) -> Result<DiscreteState> {
    if fixed.dims() != gauge_fix_dims(params).as_slice() {
        return Err(Error::InvalidArgument(format!(
            "expected gauge-fixed dims {:?}, got {:?}",
            gauge_fix_dims(params),
            fixed.dims()
        )));
    }
    let entries = fixed
        .support(0.0)
        .into_iter()
        .map(|(i, a)| ((i[0] as i64, i[1] as i64, i[2] as i64, i[3] as i64), a))
        .collect();
    split_logical(&entries, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crosstalk::{build_output_state, perfect_transmission_check, verify_gauge_factorization};
    use crate::modular::Rational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fifth() -> CrosstalkParams {
        perfect_transmission_check(Rational::new(1, 5).unwrap(), 2, 2).unwrap()
    }

    #[test]
    fn measurement_stays_on_support() {
        let p = fifth();
        let s = build_output_state(1, 0, &p).unwrap();
        let allowed = [(5, 0), (9, 2), (3, 4), (7, 6), (1, 8)];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let m = simulate_ancilla_measurement(&s, &p, &mut rng).unwrap();
            assert!(allowed.contains(&(m.x, m.y)));
            // one gauge orbit only, so the collapse leaves the state unchanged
            assert!((m.collapsed.inner(&s).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn measurement_is_seeded() {
        let p = fifth();
        let s = build_output_state(0, 1, &p).unwrap();
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20)
                .map(|_| {
                    let m = simulate_ancilla_measurement(&s, &p, &mut rng).unwrap();
                    (m.x, m.y)
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(run(3), run(3));
        assert_ne!(run(3), run(4));
    }

    #[test]
    fn gauge_index_examples() {
        let p = fifth();
        assert_eq!(gauge_index_from_outcome(9, 2, &p).unwrap(), (1, true));
        assert_eq!(gauge_index_from_outcome(0, 0, &p).unwrap(), (0, true));
        assert_eq!(gauge_index_from_outcome(5, 2, &p).unwrap(), (0, false));
        assert!(gauge_index_from_outcome(10, 0, &p).is_err());
    }

    #[test]
    fn correction_examples() {
        let p = fifth();
        let point = DiscreteState::basis(vec![10, 10], &[9, 2]).unwrap();
        let out = apply_correction_and_reduce(&point, 1, &p).unwrap();
        assert_eq!(out, DiscreteState::basis(vec![2, 2], &[1, 0]).unwrap());

        let origin = DiscreteState::basis(vec![10, 10], &[0, 0]).unwrap();
        let out = apply_correction_and_reduce(&origin, 0, &p).unwrap();
        assert_eq!(out, DiscreteState::basis(vec![2, 2], &[0, 0]).unwrap());

        for (mu1, mu2) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let s = build_output_state(mu1, mu2, &p).unwrap();
            let out = apply_correction_and_reduce(&s, 0, &p).unwrap();
            let want = DiscreteState::basis(vec![2, 2], &[mu1 as usize, mu2 as usize]).unwrap();
            assert!((out.inner(&want).unwrap().norm() - 1.0).abs() < 1e-12);
        }
        assert!(apply_correction_and_reduce(&origin, 5, &p).is_err());
    }

    #[test]
    fn residual_gauge_detected() {
        let p = fifth();
        // logical label entangled with the gauge index
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let s = DiscreteState::from_sparse(vec![10, 10], [(vec![0, 0], h), (vec![9, 2], h)]).unwrap();
        assert!(matches!(
            apply_correction_and_reduce(&s, 0, &p),
            Err(Error::ResidualGauge(_))
        ));
    }

    #[test]
    fn decode_roundtrip_worked_example() {
        let p = fifth();
        for seed in 0..10 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for (mu1, mu2) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let s = build_output_state(mu1, mu2, &p).unwrap();
                let out = decode(&s, &p, &mut rng).unwrap();
                assert_eq!((out.mu1, out.mu2, out.consistent), (mu1, mu2, true));
                let want = DiscreteState::basis(vec![2, 2], &[mu1 as usize, mu2 as usize]).unwrap();
                assert!((out.corrected_state.inner(&want).unwrap().norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn decode_after_logical_shift() {
        let p = fifth();
        let s = build_output_state(1, 1, &p).unwrap();
        let (m1, m2) = p.output_dims();
        let shift = (p.alpha1() * p.n()).rem_euclid(m1 as i64) as usize;
        let perm: Vec<usize> = (0..m1 * m2)
            .map(|f| ((f / m2 + shift) % m1) * m2 + f % m2)
            .collect();
        let shifted = s.permuted(&perm, vec![m1, m2]).unwrap();
        let out = decode(&shifted, &p, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!((out.mu1, out.mu2, out.consistent), (0, 1, true));
    }

    #[test]
    fn decode_flags_inconsistent_outcome() {
        let p = fifth();
        // unit displacement on mode 2 only moves it off the shared orbit
        let s = DiscreteState::basis(vec![10, 10], &[9, 3]).unwrap();
        let out = decode(&s, &p, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!(!out.consistent);
        assert_eq!(out.mu1, 1);
        assert_eq!(out.gauge_j, 1);
    }

    #[test]
    fn decode_rejects_wrong_shape() {
        let p = fifth();
        let s = DiscreteState::basis(vec![2, 2], &[0, 0]).unwrap();
        assert!(decode(&s, &p, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn permutation_properties() {
        let p = fifth();
        let perm = gauge_fix_permutation(&p).unwrap();
        let mut sorted = perm.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..100).collect::<Vec<_>>());
        let inv = invert_permutation(&perm).unwrap();
        assert!(perm.iter().enumerate().all(|(i, &t)| inv[t] == i));
        assert!(perm.iter().enumerate().any(|(i, &t)| i != t));
    }

    #[test]
    fn permutation_on_code_state() {
        let p = fifth();
        let n = p.n() as usize;
        let amp = 1.0 / (n as f64).sqrt();
        for (mu1, mu2) in [(0usize, 0usize), (0, 1), (1, 0), (1, 1)] {
            let s = build_output_state(mu1 as i64, mu2 as i64, &p).unwrap();
            assert!(verify_gauge_factorization(&s, mu1 as i64, mu2 as i64, &p));
            let fixed = apply_gauge_fix(&s, &p).unwrap();
            for j in 0..n {
                assert!((fixed.amp(&[mu1, mu2, 0, j]).unwrap().re - amp).abs() < 1e-12);
            }
            assert_eq!(fixed.support(1e-12).len(), n);
            let logical = extract_logical(&fixed, &p).unwrap();
            assert_eq!(logical, DiscreteState::basis(vec![2, 2], &[mu1, mu2]).unwrap());
        }
    }
}
