//! Pure states over a finite product index set.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalization tolerance enforced at construction.
pub const NORM_TOL: f64 = 1e-9;

/// Complex amplitudes over `ℤ_{dims[0]} × ℤ_{dims[1]} × …`, row-major.
///
/// Serializes as `{"dims": [...], "amps": [[re, im], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawState")]
pub struct DiscreteState {
    dims: Vec<usize>,
    amps: Vec<Complex64>,
}

#[derive(Deserialize)]
struct RawState {
    dims: Vec<usize>,
    amps: Vec<Complex64>,
}

impl TryFrom<RawState> for DiscreteState {
    type Error = Error;
    fn try_from(raw: RawState) -> Result<Self> {
        DiscreteState::new(raw.dims, raw.amps)
    }
}

fn total_size(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidArgument(format!(
            "subsystem dimensions must be nonempty and positive, got {dims:?}"
        )));
    }
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or(Error::Overflow("state size"))
}

impl DiscreteState {
    pub fn new(dims: Vec<usize>, amps: Vec<Complex64>) -> Result<Self> {
        let size = total_size(&dims)?;
        if amps.len() != size {
            return Err(Error::InvalidState(format!(
                "{} amplitudes for dims {dims:?} (expected {size})",
                amps.len()
            )));
        }
        let state = DiscreteState { dims, amps };
        let norm = state.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("squared norm is {norm}, expected 1")));
        }
        Ok(state)
    }

    /// Builds a state from `(multi-index, amplitude)` pairs, summing repeats,
    /// then normalizes.
    pub fn from_sparse<I>(dims: Vec<usize>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, Complex64)>,
    {
        let size = total_size(&dims)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); size];
        for (idx, amp) in entries {
            let flat = flat_index(&dims, &idx)?;
            amps[flat] += amp;
        }
        Self::normalized(dims, amps)
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(dims: Vec<usize>, mut amps: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        let scale = 1.0 / norm.sqrt();
        amps.iter_mut().for_each(|a| *a *= scale);
        Self::new(dims, amps)
    }

    pub fn basis(dims: Vec<usize>, idx: &[usize]) -> Result<Self> {
        Self::from_sparse(dims, [(idx.to_vec(), Complex64::new(1.0, 0.0))])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn amp(&self, idx: &[usize]) -> Result<Complex64> {
        Ok(self.amps[flat_index(&self.dims, idx)?])
    }

    pub fn flat_index(&self, idx: &[usize]) -> Result<usize> {
        flat_index(&self.dims, idx)
    }

    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dims.len()];
        let mut rest = flat;
        for (slot, &d) in idx.iter_mut().zip(&self.dims).rev() {
            *slot = rest % d;
            rest /= d;
        }
        idx
    }

    /// Entries with `|amp| > tol`, in row-major order.
    pub fn support(&self, tol: f64) -> Vec<(Vec<usize>, Complex64)> {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > tol)
            .map(|(i, &a)| (self.multi_index(i), a))
            .collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &DiscreteState) -> Result<Complex64> {
        if self.dims != other.dims {
            return Err(Error::InvalidArgument(format!(
                "dimension mismatch: {:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Moves amplitude `i` to position `perm[i]` of a state with `new_dims`.
    pub fn permuted(&self, perm: &[usize], new_dims: Vec<usize>) -> Result<Self> {
        let size = total_size(&new_dims)?;
        if perm.len() != self.amps.len() || size != self.amps.len() {
            return Err(Error::InvalidArgument(format!(
                "permutation of length {} cannot map {} amplitudes onto dims {new_dims:?}",
                perm.len(),
                self.amps.len()
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); size];
        let mut hit = vec![false; size];
        for (&a, &target) in self.amps.iter().zip(perm) {
            if target >= size || hit[target] {
                return Err(Error::InvalidArgument("table is not a permutation".into()));
            }
            hit[target] = true;
            amps[target] = a;
        }
        Self::new(new_dims, amps)
    }

    /// Reduced density matrix on the subsystems listed in `keep` (in that order).
    pub fn reduced_density_matrix(&self, keep: &[usize]) -> Result<Vec<Vec<Complex64>>> {
        if keep.iter().any(|&k| k >= self.dims.len()) {
            return Err(Error::InvalidArgument(format!(
                "subsystem list {keep:?} out of range for {} subsystems",
                self.dims.len()
            )));
        }
        let kept_dims: Vec<usize> = keep.iter().map(|&k| self.dims[k]).collect();
        let traced: Vec<usize> = (0..self.dims.len()).filter(|k| !keep.contains(k)).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&k| self.dims[k]).collect();
        let kept_size: usize = kept_dims.iter().product();
        let traced_size: usize = traced_dims.iter().product();

        // amps arranged as a kept × traced matrix
        let mut mat = vec![vec![Complex64::new(0.0, 0.0); traced_size]; kept_size];
        for (flat, &a) in self.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let idx = self.multi_index(flat);
            let ki: Vec<usize> = keep.iter().map(|&k| idx[k]).collect();
            let ti: Vec<usize> = traced.iter().map(|&k| idx[k]).collect();
            let row = if ki.is_empty() { 0 } else { flat_index(&kept_dims, &ki)? };
            let col = if ti.is_empty() { 0 } else { flat_index(&traced_dims, &ti)? };
            mat[row][col] = a;
        }
        let mut rho = vec![vec![Complex64::new(0.0, 0.0); kept_size]; kept_size];
        for (r, row_r) in mat.iter().enumerate() {
            for (c, row_c) in mat.iter().enumerate() {
                rho[r][c] = row_r.iter().zip(row_c).map(|(x, y)| x * y.conj()).sum();
            }
        }
        Ok(rho)
    }
}

pub fn flat_index(dims: &[usize], idx: &[usize]) -> Result<usize> {
    if idx.len() != dims.len() {
        return Err(Error::InvalidArgument(format!(
            "index {idx:?} has wrong rank for dims {dims:?}"
        )));
    }
    let mut flat = 0usize;
    for (&i, &d) in idx.iter().zip(dims) {
        if i >= d {
            return Err(Error::InvalidArgument(format!(
                "index {idx:?} out of range for dims {dims:?}"
            )));
        }
        flat = flat * d + i;
    }
    Ok(flat)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(DiscreteState::new(vec![2], vec![c(1.0), c(1.0)]).is_err());
        assert!(DiscreteState::new(vec![2], vec![c(1.0)]).is_err());
        assert!(DiscreteState::new(vec![0], vec![]).is_err());
    }

    #[test]
    fn index_roundtrip() {
        let s = DiscreteState::basis(vec![2, 3, 4], &[1, 2, 3]).unwrap();
        assert_eq!(s.flat_index(&[1, 2, 3]).unwrap(), 23);
        assert_eq!(s.multi_index(23), vec![1, 2, 3]);
        assert_eq!(s.amp(&[1, 2, 3]).unwrap(), c(1.0));
        assert!(s.amp(&[2, 0, 0]).is_err());
    }

    #[test]
    fn reduced_density_of_bell_pair_is_mixed() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = DiscreteState::from_sparse(vec![2, 2], [(vec![0, 0], c(h)), (vec![1, 1], c(h))]).unwrap();
        let rho = bell.reduced_density_matrix(&[0]).unwrap();
        assert!((rho[0][0].re - 0.5).abs() < 1e-15);
        assert!((rho[1][1].re - 0.5).abs() < 1e-15);
        assert!(rho[0][1].norm() < 1e-15);
        let full = bell.reduced_density_matrix(&[0, 1]).unwrap();
        assert!((full[0][3].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn json_shape() {
        let s = DiscreteState::basis(vec![1, 2], &[0, 1]).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"dims":[1,2],"amps":[[0.0,0.0],[1.0,0.0]]}"#);
        let back: DiscreteState = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<DiscreteState>(r#"{"dims":[2],"amps":[[1.0,0.0],[1.0,0.0]]}"#).is_err());
    }
}
