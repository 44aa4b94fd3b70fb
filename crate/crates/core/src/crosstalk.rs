//! Beam-splitter crosstalk between two GKP-encoded modes.
//!
//! Two pictures are provided. In phase space, [`transform_displacement`]
//! applies the splitter to a pair of displacements. In the discrete coset
//! basis of the enlarged output codes `C_{n·d1} ⊗ C_{n·d2}`, the output of
//! logical input `|μ1⟩|μ2⟩` is
//!
//! ```text
//! (1/√n) Σ_j |μ1·α1·n + j·r1 mod n·d1⟩ ⊗ |μ2·α2·n + j·r2 mod n·d2⟩
//! ```
//!
//! with `n = q + p·d1·d2`, gauge steps `r1 = p·d1·d2`, `r2 = q·d2` and
//! Bézout coefficients `α·q + β·p·d1·d2 = 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modular::{classify_eta, gcd, mod_inverse, BezoutPair, Rational};
use crate::phase_space::PhaseVector;
use crate::state::DiscreteState;

/// Upper bound on the amplitude count of constructed multi-register states.
pub const MAX_STATE_SIZE: usize = 1_000_000;

/// Per-amplitude tolerance for state comparisons.
pub const AMP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    One,
    Two,
}

/// Applies the splitter to displacement `alpha` on mode 1 and `beta` on mode 2.
pub fn transform_displacement(
    alpha: PhaseVector,
    beta: PhaseVector,
    eta: f64,
) -> Result<(PhaseVector, PhaseVector)> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "transmissivity must lie in (0, 1), got {eta}"
        )));
    }
    let t = eta.sqrt();
    let r = (1.0 - eta).sqrt();
    Ok((t * alpha + r * beta, t * beta - r * alpha))
}

/// Parameters of an admissible crosstalk channel, validated at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrosstalkParams {
    q: i64,
    p: i64,
    d1: i64,
    d2: i64,
    n: i64,
    alpha1: i64,
    beta1: i64,
    alpha2: i64,
    beta2: i64,
    r1: i64,
    r2: i64,
    r1_inv: i64,
    r2_inv: i64,
}

impl CrosstalkParams {
    pub fn new(q: i64, p: i64, d1: i64, d2: i64) -> Result<Self> {
        if q < 1 || p < 1 || d1 < 1 || d2 < 1 {
            return Err(Error::InvalidArgument(format!(
                "q, p, d1, d2 must all be >= 1, got ({q}, {p}, {d1}, {d2})"
            )));
        }
        let pdd = p
            .checked_mul(d1)
            .and_then(|x| x.checked_mul(d2))
            .ok_or(Error::Overflow("p·d1·d2"))?;
        let n = q.checked_add(pdd).ok_or(Error::Overflow("n"))?;
        // both identities share the same moduli, so one solve serves both modes
        let bezout = BezoutPair::solve(q, pdd)?;
        let r1 = pdd;
        let r2 = q.checked_mul(d2).ok_or(Error::Overflow("q·d2"))?;
        n.checked_mul(d1.max(d2)).ok_or(Error::Overflow("n·d"))?;
        let r1_inv = mod_inverse(r1, n).map_err(|_| {
            Error::Inadmissible(format!("gauge step r1 = {r1} is not invertible modulo n = {n}"))
        })?;
        let r2_inv = mod_inverse(r2, n).map_err(|_| {
            Error::Inadmissible(format!("gauge step r2 = {r2} is not invertible modulo n = {n}"))
        })?;
        let params = CrosstalkParams {
            q,
            p,
            d1,
            d2,
            n,
            alpha1: bezout.alpha,
            beta1: bezout.beta,
            alpha2: bezout.alpha,
            beta2: bezout.beta,
            r1,
            r2,
            r1_inv,
            r2_inv,
        };
        params.check_invariants()?;
        Ok(params)
    }

    fn check_invariants(&self) -> Result<()> {
        let pdd = self.p as i128 * self.d1 as i128 * self.d2 as i128;
        for (alpha, beta) in [(self.alpha1, self.beta1), (self.alpha2, self.beta2)] {
            if alpha as i128 * self.q as i128 + beta as i128 * pdd != 1 {
                return Err(Error::Invariant(format!(
                    "Bézout identity fails for alpha = {alpha}, beta = {beta}"
                )));
            }
        }
        if gcd(self.r1, self.n) != 1 || gcd(self.r2, self.n) != 1 {
            return Err(Error::Invariant("gauge steps must be units modulo n".into()));
        }
        for mode in [Mode::One, Mode::Two] {
            let modulus = self.modulus(mode) as usize;
            let mut seen = vec![false; modulus];
            for j in 0..self.n {
                let idx = self.raw_index(0, j, mode);
                if std::mem::replace(&mut seen[idx], true) {
                    return Err(Error::Invariant(format!(
                        "gauge orbit indices collide in mode {mode:?} at j = {j}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn q(&self) -> i64 {
        self.q
    }
    pub fn p(&self) -> i64 {
        self.p
    }
    pub fn d1(&self) -> i64 {
        self.d1
    }
    pub fn d2(&self) -> i64 {
        self.d2
    }
    pub fn n(&self) -> i64 {
        self.n
    }
    pub fn alpha1(&self) -> i64 {
        self.alpha1
    }
    pub fn alpha2(&self) -> i64 {
        self.alpha2
    }
    pub fn beta1(&self) -> i64 {
        self.beta1
    }
    pub fn beta2(&self) -> i64 {
        self.beta2
    }
    pub fn r1(&self) -> i64 {
        self.r1
    }
    pub fn r2(&self) -> i64 {
        self.r2
    }

    /// `r_i⁻¹ mod n`.
    pub fn r_inv(&self, mode: Mode) -> i64 {
        match mode {
            Mode::One => self.r1_inv,
            Mode::Two => self.r2_inv,
        }
    }

    pub fn eta(&self) -> Rational {
        Rational::new(self.q, self.n).expect("n > 0")
    }

    pub fn dim(&self, mode: Mode) -> i64 {
        match mode {
            Mode::One => self.d1,
            Mode::Two => self.d2,
        }
    }

    pub fn alpha(&self, mode: Mode) -> i64 {
        match mode {
            Mode::One => self.alpha1,
            Mode::Two => self.alpha2,
        }
    }

    pub fn step(&self, mode: Mode) -> i64 {
        match mode {
            Mode::One => self.r1,
            Mode::Two => self.r2,
        }
    }

    /// Output code dimension `n·d_i`.
    pub fn modulus(&self, mode: Mode) -> i64 {
        self.n * self.dim(mode)
    }

    pub fn output_dims(&self) -> (usize, usize) {
        (self.modulus(Mode::One) as usize, self.modulus(Mode::Two) as usize)
    }

    /// Index of the logical offset `μ·α_i·n mod n·d_i`.
    pub fn logical_offset(&self, mu: i64, mode: Mode) -> usize {
        let m = self.modulus(mode) as i128;
        ((mu as i128 * self.alpha(mode) as i128 * self.n as i128).rem_euclid(m)) as usize
    }

    fn raw_index(&self, mu: i64, j: i64, mode: Mode) -> usize {
        let m = self.modulus(mode) as i128;
        let shift = (j as i128 * self.step(mode) as i128).rem_euclid(m) as usize;
        (self.logical_offset(mu, mode) + shift) % m as usize
    }

    /// Inverse of the coset relabeling: output index `x` ↦ `(μ, j)`.
    ///
    /// `μ = x mod d_i` because `α_i·n ≡ 1` and `r_i ≡ 0 (mod d_i)`; `j = x·r_i⁻¹ mod n`
    /// because `μ·α_i·n ≡ 0 (mod n)`.
    pub fn relabel(&self, x: usize, mode: Mode) -> Result<(i64, i64)> {
        let m = self.modulus(mode);
        if x as i64 >= m {
            return Err(Error::InvalidArgument(format!(
                "index {x} out of range for modulus {m}"
            )));
        }
        let x = x as i64;
        let mu = x % self.dim(mode);
        let j = ((x % self.n) as i128 * self.r_inv(mode) as i128 % self.n as i128) as i64;
        Ok((mu, j))
    }
}

/// Parameters for `eta` if it admits perfect transmission for dimensions `(d1, d2)`.
pub fn perfect_transmission_check(eta: Rational, d1: i64, d2: i64) -> Result<CrosstalkParams> {
    let class = classify_eta(eta, d1, d2)?;
    CrosstalkParams::new(class.q, class.p, d1, d2)
}

/// `(μ·α_i·n + j·r_i) mod (n·d_i)`.
pub fn output_basis_index(mu: i64, j: i64, mode: Mode, params: &CrosstalkParams) -> Result<usize> {
    let d = params.dim(mode);
    if !(0..d).contains(&mu) {
        return Err(Error::InvalidArgument(format!(
            "logical label {mu} out of range [0, {d})"
        )));
    }
    if !(0..params.n()).contains(&j) {
        return Err(Error::InvalidArgument(format!(
            "gauge index {j} out of range [0, {})",
            params.n()
        )));
    }
    Ok(params.raw_index(mu, j, mode))
}

/// Crosstalk output of `|μ1⟩|μ2⟩` over dims `(n·d1, n·d2)`.
pub fn build_output_state(mu1: i64, mu2: i64, params: &CrosstalkParams) -> Result<DiscreteState> {
    let (m1, m2) = params.output_dims();
    let amp = Complex64::new(1.0 / (params.n() as f64).sqrt(), 0.0);
    let mut entries = Vec::with_capacity(params.n() as usize);
    for j in 0..params.n() {
        let x = output_basis_index(mu1, j, Mode::One, params)?;
        let y = output_basis_index(mu2, j, Mode::Two, params)?;
        entries.push((vec![x, y], amp));
    }
    DiscreteState::from_sparse(vec![m1, m2], entries)
}

fn is_symmetric(params: &CrosstalkParams) -> bool {
    params.d1() == params.d2() && params.q() == 1 && params.p() == 1
}

/// Output state for `d1 = d2 = d`, `q = p = 1`, using `|μ1·n + j·d²⟩ ⊗ |μ2·n + j·d⟩` directly.
pub fn build_symmetric_output(
    mu1: i64,
    mu2: i64,
    d: i64,
    params: &CrosstalkParams,
) -> Result<DiscreteState> {
    if !is_symmetric(params) || params.d1() != d {
        return Err(Error::InvalidArgument(format!(
            "symmetric construction needs d1 = d2 = {d} and q = p = 1, got {params:?}"
        )));
    }
    if !(0..d).contains(&mu1) || !(0..d).contains(&mu2) {
        return Err(Error::InvalidArgument(format!(
            "logical labels ({mu1}, {mu2}) out of range for d = {d}"
        )));
    }
    let n = params.n();
    let m = n * d;
    let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    let entries = (0..n).map(|j| {
        let x = (mu1 * n + j * d * d).rem_euclid(m) as usize;
        let y = (mu2 * n + j * d).rem_euclid(m) as usize;
        (vec![x, y], amp)
    });
    DiscreteState::from_sparse(vec![m as usize, m as usize], entries)
}

/// Two EPR pairs with the primed halves sent through the crosstalk channel,
/// over dims `(d1, n·d1, d2, n·d2)` for registers `A, A′, B, B′`.
pub fn build_multiplexed_epr_state(params: &CrosstalkParams) -> Result<DiscreteState> {
    let (d1, d2) = (params.d1() as usize, params.d2() as usize);
    let (m1, m2) = params.output_dims();
    let size = [d1, m1, d2, m2]
        .iter()
        .try_fold(1usize, |acc, &x| acc.checked_mul(x))
        .unwrap_or(usize::MAX);
    if size > MAX_STATE_SIZE {
        return Err(Error::TooLarge {
            size,
            limit: MAX_STATE_SIZE,
        });
    }
    let amp = Complex64::new(
        1.0 / ((d1 * d2) as f64 * params.n() as f64).sqrt(),
        0.0,
    );
    let mut entries = Vec::new();
    for mu in 0..params.d1() {
        for nu in 0..params.d2() {
            for j in 0..params.n() {
                let x = output_basis_index(mu, j, Mode::One, params)?;
                let y = output_basis_index(nu, j, Mode::Two, params)?;
                entries.push((vec![mu as usize, x, nu as usize, y], amp));
            }
        }
    }
    DiscreteState::from_sparse(vec![d1, m1, d2, m2], entries)
}

/// Checks that `state` equals `|μ1⟩_L|μ2⟩_L ⊗ (1/√n) Σ_j |j⟩|j⟩` after relabeling
/// each output index to its `(μ, j)` coset coordinates.
pub fn check_gauge_factorization(
    state: &DiscreteState,
    mu1: i64,
    mu2: i64,
    params: &CrosstalkParams,
) -> Result<()> {
    let (m1, m2) = params.output_dims();
    if state.dims() != [m1, m2] {
        return Err(Error::InvalidArgument(format!(
            "state dims {:?} differ from output dims ({m1}, {m2})",
            state.dims()
        )));
    }
    let expected = 1.0 / (params.n() as f64).sqrt();
    for (flat, &a) in state.amps().iter().enumerate() {
        let idx = state.multi_index(flat);
        let (l1, j1) = params.relabel(idx[0], Mode::One)?;
        let (l2, j2) = params.relabel(idx[1], Mode::Two)?;
        if params.raw_index(l1, j1, Mode::One) != idx[0] || params.raw_index(l2, j2, Mode::Two) != idx[1] {
            return Err(Error::FactorizationViolated(format!(
                "index ({}, {}) is outside the image of the coset relabeling",
                idx[0], idx[1]
            )));
        }
        let target = if l1 == mu1 && l2 == mu2 && j1 == j2 { expected } else { 0.0 };
        if (a - Complex64::new(target, 0.0)).norm() > AMP_TOL {
            return Err(Error::FactorizationViolated(format!(
                "amplitude {a} at (μ1={l1}, j={j1}; μ2={l2}, j={j2}) should be {target}"
            )));
        }
    }
    Ok(())
}

/// Boolean form of [`check_gauge_factorization`].
pub fn verify_gauge_factorization(
    state: &DiscreteState,
    mu1: i64,
    mu2: i64,
    params: &CrosstalkParams,
) -> bool {
    check_gauge_factorization(state, mu1, mu2, params).is_ok()
}

/// Order of the residual gauge symmetry group, which is `n`.
pub fn gauge_group_order(params: &CrosstalkParams) -> i64 {
    params.n()
}
