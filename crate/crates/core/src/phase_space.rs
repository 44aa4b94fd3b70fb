//! Phase-space vectors and GKP stabilizer lattices.
//!
//! Conventions: ℏ = 1, displacements are `(q, p)` pairs and the symplectic
//! form is the oriented area `u_q v_p - u_p v_q`. A GKP code of logical
//! dimension `d` has a stabilizer cell of area `2πd`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modular::Rational;

/// Default infinity-norm tolerance for lattice membership.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Tolerance used when validating code invariants.
pub const CODE_TOL: f64 = 1e-9;

/// Generators spanning less than this area are treated as degenerate.
pub const DEGENERATE_AREA: f64 = 1e-12;

/// Row-major 2×2 real matrix.
pub type Mat2 = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseVector {
    pub q: f64,
    pub p: f64,
}

impl PhaseVector {
    pub const ZERO: PhaseVector = PhaseVector { q: 0.0, p: 0.0 };

    pub const fn new(q: f64, p: f64) -> Self {
        PhaseVector { q, p }
    }

    /// Checked constructor rejecting NaN and infinite components.
    pub fn try_new(q: f64, p: f64) -> Result<Self> {
        if q.is_finite() && p.is_finite() {
            Ok(PhaseVector { q, p })
        } else {
            Err(Error::InvalidArgument(format!(
                "phase vector components must be finite, got ({q}, {p})"
            )))
        }
    }

    pub fn is_finite(&self) -> bool {
        self.q.is_finite() && self.p.is_finite()
    }

    pub fn norm_inf(&self) -> f64 {
        self.q.abs().max(self.p.abs())
    }
}

impl fmt::Display for PhaseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.q, self.p)
    }
}

impl Add for PhaseVector {
    type Output = PhaseVector;
    fn add(self, rhs: PhaseVector) -> PhaseVector {
        PhaseVector::new(self.q + rhs.q, self.p + rhs.p)
    }
}

impl Sub for PhaseVector {
    type Output = PhaseVector;
    fn sub(self, rhs: PhaseVector) -> PhaseVector {
        PhaseVector::new(self.q - rhs.q, self.p - rhs.p)
    }
}

impl Neg for PhaseVector {
    type Output = PhaseVector;
    fn neg(self) -> PhaseVector {
        PhaseVector::new(-self.q, -self.p)
    }
}

impl Mul<PhaseVector> for f64 {
    type Output = PhaseVector;
    fn mul(self, rhs: PhaseVector) -> PhaseVector {
        PhaseVector::new(self * rhs.q, self * rhs.p)
    }
}

impl Mul<f64> for PhaseVector {
    type Output = PhaseVector;
    fn mul(self, rhs: f64) -> PhaseVector {
        rhs * self
    }
}

/// Oriented area of the parallelogram spanned by `u` and `v`.
pub fn symplectic_form(u: PhaseVector, v: PhaseVector) -> f64 {
    u.q * v.p - u.p * v.q
}

/// Integer span of two phase-space generators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GkpLattice {
    gen_a: PhaseVector,
    gen_b: PhaseVector,
}

impl GkpLattice {
    pub fn new(gen_a: PhaseVector, gen_b: PhaseVector) -> Result<Self> {
        if !gen_a.is_finite() || !gen_b.is_finite() {
            return Err(Error::InvalidArgument(
                "lattice generators must be finite".into(),
            ));
        }
        let area = symplectic_form(gen_a, gen_b);
        if area.abs() < DEGENERATE_AREA {
            return Err(Error::DegenerateLattice {
                area,
                threshold: DEGENERATE_AREA,
            });
        }
        Ok(GkpLattice { gen_a, gen_b })
    }

    pub fn gen_a(&self) -> PhaseVector {
        self.gen_a
    }

    pub fn gen_b(&self) -> PhaseVector {
        self.gen_b
    }

    pub fn area(&self) -> f64 {
        symplectic_form(self.gen_a, self.gen_b)
    }

    /// The lattice point `s·gen_a + t·gen_b`.
    pub fn point(&self, s: i64, t: i64) -> PhaseVector {
        s as f64 * self.gen_a + t as f64 * self.gen_b
    }

    /// Lattice with both generators multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        GkpLattice::new(factor * self.gen_a, factor * self.gen_b)
    }

    /// Real coordinates `(s, t)` with `x = s·gen_a + t·gen_b`.
    pub fn coordinates(&self, x: PhaseVector) -> (f64, f64) {
        let area = self.area();
        (
            symplectic_form(x, self.gen_b) / area,
            symplectic_form(self.gen_a, x) / area,
        )
    }
}

/// A GKP code: stabilizer lattice of area `2π·dim` plus its normalized basis matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GkpCode {
    lattice: GkpLattice,
    dim: u64,
    basis_matrix: Mat2,
}

impl GkpCode {
    /// Builds a code, cross-validating the stored basis matrix against the generators.
    pub fn new(lattice: GkpLattice, dim: u64, basis_matrix: Mat2) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("code dimension must be >= 1".into()));
        }
        let target = 2.0 * PI * dim as f64;
        let area = lattice.area();
        if (area - target).abs() > CODE_TOL * target.max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "stabilizer area {area} differs from 2π·{dim} = {target}"
            )));
        }
        let det = basis_matrix[0][0] * basis_matrix[1][1] - basis_matrix[0][1] * basis_matrix[1][0];
        if (det - 1.0).abs() > CODE_TOL {
            return Err(Error::InvalidArgument(format!(
                "basis matrix determinant is {det}, expected 1"
            )));
        }
        let norm = (2.0 * PI * dim as f64).sqrt();
        let rows = [lattice.gen_a, lattice.gen_b];
        for (row, gen) in basis_matrix.iter().zip(rows) {
            let scaled = PhaseVector::new(norm * row[0], norm * row[1]);
            if (scaled - gen).norm_inf() > CODE_TOL * norm.max(1.0) {
                return Err(Error::InvalidArgument(format!(
                    "basis matrix row {scaled} does not match generator {gen}"
                )));
            }
        }
        Ok(GkpCode {
            lattice,
            dim,
            basis_matrix,
        })
    }

    /// Derives the basis matrix from the generators.
    pub fn from_lattice(lattice: GkpLattice, dim: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("code dimension must be >= 1".into()));
        }
        let norm = (2.0 * PI * dim as f64).sqrt();
        let (a, b) = (lattice.gen_a, lattice.gen_b);
        let basis = [[a.q / norm, a.p / norm], [b.q / norm, b.p / norm]];
        GkpCode::new(lattice, dim, basis)
    }

    pub fn lattice(&self) -> &GkpLattice {
        &self.lattice
    }

    pub fn dim(&self) -> u64 {
        self.dim
    }

    pub fn basis_matrix(&self) -> Mat2 {
        self.basis_matrix
    }

    /// Logical X shift `gen_a / d`.
    pub fn logical_x(&self) -> PhaseVector {
        self.lattice.gen_a * (1.0 / self.dim as f64)
    }

    /// Logical Z shift `gen_b / d`.
    pub fn logical_z(&self) -> PhaseVector {
        self.lattice.gen_b * (1.0 / self.dim as f64)
    }
}

/// Square-lattice code with basis matrix `diag(scale, 1/scale)`.
///
/// `d = 1` gives the qunaught code.
pub fn make_square_code(d: u64, scale: f64) -> Result<GkpCode> {
    if d == 0 {
        return Err(Error::InvalidArgument("code dimension must be >= 1".into()));
    }
    if !scale.is_finite() || scale <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "scale must be positive and finite, got {scale}"
        )));
    }
    let side = (2.0 * PI * d as f64).sqrt();
    let lattice = GkpLattice::new(
        PhaseVector::new(scale * side, 0.0),
        PhaseVector::new(0.0, side / scale),
    )?;
    GkpCode::new(lattice, d, [[scale, 0.0], [0.0, 1.0 / scale]])
}

/// True iff some integer combination of the generators lies within `tol` of `x`
/// in the infinity norm.
pub fn lattice_contains(lat: &GkpLattice, x: PhaseVector, tol: f64) -> Result<bool> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be > 0, got {tol}")));
    }
    let area = lat.area();
    if area.abs() < DEGENERATE_AREA {
        return Err(Error::DegenerateLattice {
            area,
            threshold: DEGENERATE_AREA,
        });
    }
    let (s, t) = lat.coordinates(x);
    if !s.is_finite() || !t.is_finite() || s.abs() > 9.0e15 || t.abs() > 9.0e15 {
        return Ok(false);
    }
    let nearest = lat.point(s.round() as i64, t.round() as i64);
    Ok((nearest - x).norm_inf() <= tol)
}

/// True iff both generators of `inner` are points of `outer`.
pub fn is_sublattice(inner: &GkpLattice, outer: &GkpLattice, tol: f64) -> Result<bool> {
    Ok(lattice_contains(outer, inner.gen_a, tol)? && lattice_contains(outer, inner.gen_b, tol)?)
}

/// Lattice induced on the partner mode: generators scaled by `√(η/(1−η))`.
pub fn induced_partner_lattice(source: &GkpLattice, eta: Rational) -> Result<GkpLattice> {
    if !eta.in_open_unit_interval() {
        return Err(Error::InvalidArgument(format!(
            "transmissivity must lie in (0, 1), got {eta}"
        )));
    }
    let ratio = eta.to_f64() / eta.complement()?.to_f64();
    source.scaled(ratio.sqrt())
}

/// Area-preserving rescaling `diag(s, 1/s)` with `s = √(p2 q1 / (p1 q2))`.
pub fn matching_scaling_matrix(q1: i64, q2: i64, p1: i64, p2: i64) -> Result<Mat2> {
    if q1 <= 0 || q2 <= 0 || p1 <= 0 || p2 <= 0 {
        return Err(Error::InvalidArgument(format!(
            "matching parameters must be positive, got q1={q1} q2={q2} p1={p1} p2={p2}"
        )));
    }
    let s = ((p2 as f64 * q1 as f64) / (p1 as f64 * q2 as f64)).sqrt();
    Ok([[s, 0.0], [0.0, 1.0 / s]])
}

pub fn mat2_det(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}
