//! Noise models and fidelity estimates.
//!
//! Covers Gaussian displacement noise on the transmitted modes, log-normal
//! fluctuations of the transmissivity, the closed-form decoding fidelities,
//! the mismatch-penalized landscape bound, a seeded Monte Carlo estimator,
//! and an uncoded two-qubit-pair baseline with an XX crosstalk coupling.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::crosstalk::CrosstalkParams;
use crate::error::{Error, Result};
use crate::modular::EtaClass;
use crate::phase_space::PhaseVector;
use crate::special::erf;

/// Shots per independently seeded Monte Carlo block.
pub const MC_BLOCK: u64 = 4096;

/// Rejection attempts before a log-normal draw is declared hopeless.
pub const MAX_ETA_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// Displacement standard deviation per quadrature.
    pub sigma: f64,
    /// Mean of ln η.
    pub lognormal_mu: f64,
    /// Standard deviation of ln η.
    pub sigma_c: f64,
    /// Depolarizing probability for the uncoded baseline.
    pub depol_p: f64,
}

impl NoiseParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!("sigma must be > 0, got {}", self.sigma)));
        }
        if !(self.sigma_c > 0.0 && self.sigma_c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "sigma_c must be > 0, got {}",
                self.sigma_c
            )));
        }
        if !self.lognormal_mu.is_finite() {
            return Err(Error::InvalidArgument("lognormal_mu must be finite".into()));
        }
        if !(0.0..=1.0).contains(&self.depol_p) {
            return Err(Error::InvalidArgument(format!(
                "depol_p must lie in [0, 1], got {}",
                self.depol_p
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityBoundParams {
    pub lattice_scale_l: f64,
    pub rational_points: Vec<EtaClass>,
}

impl FidelityBoundParams {
    pub fn new(lattice_scale_l: f64, rational_points: Vec<EtaClass>) -> Result<Self> {
        if !(lattice_scale_l > 0.0 && lattice_scale_l.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "lattice scale must be > 0, got {lattice_scale_l}"
            )));
        }
        if rational_points.is_empty() {
            return Err(Error::InvalidArgument("no rational alignment points".into()));
        }
        if rational_points.windows(2).any(|w| w[0].eta > w[1].eta) {
            return Err(Error::InvalidArgument("rational points must be sorted by eta".into()));
        }
        Ok(FidelityBoundParams {
            lattice_scale_l,
            rational_points,
        })
    }
}

/// Draws η from the log-normal law, rejecting draws outside `(0, 1)`.
pub fn sample_eta_lognormal<R: Rng + ?Sized>(params: &NoiseParams, rng: &mut R) -> Result<f64> {
    let dist = LogNormal::new(params.lognormal_mu, params.sigma_c)
        .map_err(|e| Error::InvalidArgument(format!("log-normal parameters: {e}")))?;
    for _ in 0..MAX_ETA_ATTEMPTS {
        let eta: f64 = dist.sample(rng);
        if eta > 0.0 && eta < 1.0 {
            return Ok(eta);
        }
    }
    Err(Error::DegenerateDistribution(format!(
        "{MAX_ETA_ATTEMPTS} consecutive draws of exp(N({}, {}²)) fell outside (0, 1)",
        params.lognormal_mu, params.sigma_c
    )))
}

/// Isotropic Gaussian displacement with per-quadrature standard deviation `sigma`.
pub fn sample_displacement<R: Rng + ?Sized>(sigma: f64, rng: &mut R) -> Result<PhaseVector> {
    let dist = Normal::new(0.0, sigma)
        .ok()
        .filter(|_| sigma > 0.0)
        .ok_or_else(|| Error::InvalidArgument(format!("sigma must be > 0, got {sigma}")))?;
    Ok(PhaseVector::new(dist.sample(rng), dist.sample(rng)))
}

/// `erf(√(π / (2dσ²)))²`: single-mode decoding success under displacement noise.
pub fn f_single(sigma: f64, d: u64) -> f64 {
    debug_assert!(sigma > 0.0 && d >= 1);
    let e = erf((PI / (2.0 * d as f64 * sigma * sigma)).sqrt());
    e * e
}

/// `[erf(√(π/(2d1σ²))) · erf(√(π/(2d2σ²)))]²`.
pub fn f_ideal(sigma: f64, d1: u64, d2: u64) -> f64 {
    debug_assert!(sigma > 0.0 && d1 >= 1 && d2 >= 1);
    let e1 = erf((PI / (2.0 * d1 as f64 * sigma * sigma)).sqrt());
    let e2 = erf((PI / (2.0 * d2 as f64 * sigma * sigma)).sqrt());
    let prod = e1 * e2;
    prod * prod
}

/// `max_i exp(−(|η − η_i|·L)² / 2σ²) · f_ideal(σ)`.
pub fn fidelity_upper_bound(
    eta: f64,
    sigma: f64,
    d1: u64,
    d2: u64,
    bound: &FidelityBoundParams,
) -> Result<f64> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidArgument(format!("eta must lie in (0, 1), got {eta}")));
    }
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::InvalidArgument(format!("sigma must be > 0, got {sigma}")));
    }
    if bound.rational_points.is_empty() {
        return Err(Error::InvalidArgument("no rational alignment points".into()));
    }
    let nearest = bound
        .rational_points
        .iter()
        .map(|c| (eta - c.eta.to_f64()).abs())
        .fold(f64::INFINITY, f64::min);
    let delta = nearest * bound.lattice_scale_l;
    Ok((-(delta * delta) / (2.0 * sigma * sigma)).exp() * f_ideal(sigma, d1, d2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub successes: u64,
    pub shots: u64,
}

fn mode_survives<R: Rng + ?Sized>(half_width: f64, sigma: f64, rng: &mut R) -> bool {
    let eq: f64 = rng.sample::<f64, _>(StandardNormal) * sigma;
    let ep: f64 = rng.sample::<f64, _>(StandardNormal) * sigma;
    eq.abs() < half_width && ep.abs() < half_width
}

/// Monte Carlo estimate of joint decoding success under displacement noise.
///
/// A mode succeeds when both quadrature errors stay below `√(π/d_i)`.
/// Shots are split into blocks of [`MC_BLOCK`]; block `b` draws from a
/// ChaCha8 stream `b` keyed by one seed taken from `rng`, so the result does
/// not depend on how many worker threads run the blocks.
pub fn mc_fidelity_estimate<R: Rng + ?Sized>(
    params: &CrosstalkParams,
    noise: &NoiseParams,
    shots: u64,
    rng: &mut R,
) -> Result<McEstimate> {
    if shots < 100 {
        return Err(Error::InvalidArgument(format!("need at least 100 shots, got {shots}")));
    }
    if !(noise.sigma > 0.0 && noise.sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("sigma must be > 0, got {}", noise.sigma)));
    }
    let sigma = noise.sigma;
    let w1 = (PI / params.d1() as f64).sqrt();
    let w2 = (PI / params.d2() as f64).sqrt();
    let master: u64 = rng.random();
    let blocks = shots.div_ceil(MC_BLOCK);
    let successes: u64 = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut block_rng = ChaCha8Rng::seed_from_u64(master);
            block_rng.set_stream(b);
            let count = MC_BLOCK.min(shots - b * MC_BLOCK);
            (0..count)
                .filter(|_| {
                    // evaluate both modes so the stream layout is fixed per shot
                    let ok1 = mode_survives(w1, sigma, &mut block_rng);
                    let ok2 = mode_survives(w2, sigma, &mut block_rng);
                    ok1 && ok2
                })
                .count() as u64
        })
        .sum();
    let estimate = successes as f64 / shots as f64;
    let std_error = (estimate * (1.0 - estimate) / shots as f64).sqrt();
    Ok(McEstimate {
        estimate,
        std_error,
        successes,
        shots,
    })
}

/// Coupling angle of the uncoded baseline, `π·√(η(1−η))`.
pub fn dv_coupling_angle(eta: f64) -> f64 {
    PI * (eta * (1.0 - eta)).sqrt()
}

type Rho16 = [[Complex64; 16]; 16];

// qubit order A, A', B, B' from most to least significant bit
const BIT_A_PRIME: usize = 2;
const BIT_B_PRIME: usize = 0;

#[derive(Clone, Copy)]
enum Pauli {
    X,
    Y,
    Z,
}

/// `P ρ P†` for a single-qubit Pauli on `bit`.
fn conjugate(rho: &Rho16, pauli: Pauli, bit: usize) -> Rho16 {
    let mask = 1usize << bit;
    let (flip, phase): (usize, fn(bool) -> Complex64) = match pauli {
        Pauli::X => (mask, |_| Complex64::new(1.0, 0.0)),
        Pauli::Y => (mask, |one| {
            if one {
                Complex64::new(0.0, 1.0)
            } else {
                Complex64::new(0.0, -1.0)
            }
        }),
        Pauli::Z => (0, |one| Complex64::new(if one { -1.0 } else { 1.0 }, 0.0)),
    };
    let mut out = [[Complex64::new(0.0, 0.0); 16]; 16];
    for i in 0..16 {
        let ci = phase(i & mask != 0);
        for j in 0..16 {
            let cj = phase(j & mask != 0).conj();
            out[i][j] = ci * cj * rho[i ^ flip][j ^ flip];
        }
    }
    out
}

fn depolarize(rho: &Rho16, p: f64, bit: usize) -> Rho16 {
    if p == 0.0 {
        return *rho;
    }
    let conj = [Pauli::X, Pauli::Y, Pauli::Z].map(|pl| conjugate(rho, pl, bit));
    let mut out = [[Complex64::new(0.0, 0.0); 16]; 16];
    for i in 0..16 {
        for j in 0..16 {
            out[i][j] = rho[i][j] * (1.0 - p)
                + (conj[0][i][j] + conj[1][i][j] + conj[2][i][j]) * (p / 3.0);
        }
    }
    out
}

/// Joint Bell-pair fidelity of two uncoded qubit EPR pairs whose transmitted
/// halves couple through `exp(−iθ X⊗X)` and then depolarize with probability
/// `depol_p` each.
pub fn dv_baseline_fidelity(eta: f64, depol_p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidArgument(format!("eta must lie in [0, 1], got {eta}")));
    }
    if !(0.0..=1.0).contains(&depol_p) {
        return Err(Error::InvalidArgument(format!(
            "depol_p must lie in [0, 1], got {depol_p}"
        )));
    }
    // |Φ+⟩_{AA'} ⊗ |Φ+⟩_{BB'}: basis states with a = a', b = b'
    let mut ideal = [Complex64::new(0.0, 0.0); 16];
    for a in 0..2 {
        for b in 0..2 {
            ideal[(a << 3) | (a << BIT_A_PRIME) | (b << 1) | (b << BIT_B_PRIME)] = Complex64::new(0.5, 0.0);
        }
    }
    let theta = dv_coupling_angle(eta);
    let xx = (1 << BIT_A_PRIME) | (1 << BIT_B_PRIME);
    let mut psi = [Complex64::new(0.0, 0.0); 16];
    for (i, slot) in psi.iter_mut().enumerate() {
        *slot = ideal[i] * theta.cos() + ideal[i ^ xx] * Complex64::new(0.0, -theta.sin());
    }
    let mut rho = [[Complex64::new(0.0, 0.0); 16]; 16];
    for i in 0..16 {
        for j in 0..16 {
            rho[i][j] = psi[i] * psi[j].conj();
        }
    }
    let rho = depolarize(&rho, depol_p, BIT_A_PRIME);
    let rho = depolarize(&rho, depol_p, BIT_B_PRIME);
    let mut fid = Complex64::new(0.0, 0.0);
    for i in 0..16 {
        for j in 0..16 {
            fid += ideal[i].conj() * rho[i][j] * ideal[j];
        }
    }
    Ok(fid.re.clamp(0.0, 1.0))
}
