//! Exact complex linear algebra on 2-, 4-, and 8-dimensional Hilbert spaces.
//!
//! Dense storage, hard-capped at three qubits. Qubit ordering for multi-qubit
//! operators is (Alice, Bob, Referee): qubit 0 occupies the most significant
//! bit of a basis index, so `tensor(A, B)` puts `A` on the high bits.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::policy::NumericPolicy;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A real 3-vector on (or inside) the Bloch ball.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const ZERO: BlochVector = BlochVector { x: 0.0, y: 0.0, z: 0.0 };
    pub const X: BlochVector = BlochVector { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: BlochVector = BlochVector { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: BlochVector = BlochVector { x: 0.0, y: 0.0, z: 1.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        BlochVector { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn scale(&self, f: f64) -> BlochVector {
        BlochVector::new(self.x * f, self.y * f, self.z * f)
    }

    /// True when `|norm − 1| ≤ tol`.
    pub fn is_unit(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    /// Rescale to unit norm. Errors on the zero vector.
    pub fn normalized(&self) -> Result<BlochVector> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::Config("cannot normalize the zero vector".into()));
        }
        Ok(self.scale(1.0 / n))
    }
}

impl std::ops::Add for BlochVector {
    type Output = BlochVector;
    fn add(self, o: BlochVector) -> BlochVector {
        BlochVector::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl std::ops::Sub for BlochVector {
    type Output = BlochVector;
    fn sub(self, o: BlochVector) -> BlochVector {
        BlochVector::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl std::ops::Neg for BlochVector {
    type Output = BlochVector;
    fn neg(self) -> BlochVector {
        self.scale(-1.0)
    }
}

fn check_dim(dim: usize) -> Result<()> {
    match dim {
        2 | 4 | 8 => Ok(()),
        other => Err(Error::UnsupportedDimension(other)),
    }
}

/// Dense complex Hermitian matrix on a 2-, 4-, or 8-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOp {
    dim: usize,
    data: Vec<Complex64>, // row-major, len = dim * dim
}

impl HermitianOp {
    /// Build from row-major entries, validating Hermiticity elementwise.
    pub fn from_entries(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        Self::from_entries_with_policy(dim, data, &NumericPolicy::DEFAULT)
    }

    pub fn from_entries_with_policy(
        dim: usize,
        data: Vec<Complex64>,
        policy: &NumericPolicy,
    ) -> Result<Self> {
        check_dim(dim)?;
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(data.len(), dim * dim));
        }
        let op = HermitianOp { dim, data };
        let dev = op.hermiticity_deviation();
        if dev > policy.hermitian_tol {
            return Err(Error::NotHermitian(dev));
        }
        Ok(op)
    }

    /// Internal constructor for results that are Hermitian by construction.
    pub(crate) fn from_raw(dim: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        HermitianOp { dim, data }
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(HermitianOp::from_raw(dim, vec![c(0.0, 0.0); dim * dim]))
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut op = Self::zeros(dim)?;
        for i in 0..dim {
            op.data[i * dim + i] = c(1.0, 0.0);
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    /// Largest elementwise deviation from the conjugate transpose.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    /// Trace, returned as a real number (exactly real for Hermitian input).
    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i).re).sum()
    }

    pub fn add(&self, other: &HermitianOp) -> Result<HermitianOp> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(HermitianOp::from_raw(self.dim, data))
    }

    pub fn sub(&self, other: &HermitianOp) -> Result<HermitianOp> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(HermitianOp::from_raw(self.dim, data))
    }

    /// Scale by a real factor (preserves Hermiticity).
    pub fn scale(&self, f: f64) -> HermitianOp {
        HermitianOp::from_raw(self.dim, self.data.iter().map(|a| a * f).collect())
    }

    /// Transpose. For Hermitian `H` this equals the complex conjugate,
    /// so the result is again Hermitian.
    pub fn transpose(&self) -> HermitianOp {
        let mut out = vec![c(0.0, 0.0); self.dim * self.dim];
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[j * self.dim + i] = self.get(i, j);
            }
        }
        HermitianOp::from_raw(self.dim, out)
    }

    /// `Tr[A B]` without materializing the (generally non-Hermitian) product.
    pub fn trace_product(&self, other: &HermitianOp) -> Result<Complex64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let mut acc = c(0.0, 0.0);
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += self.get(i, j) * other.get(j, i);
            }
        }
        Ok(acc)
    }

    /// Kronecker product; `self` lands on the high bits of the index.
    pub fn tensor(&self, other: &HermitianOp) -> Result<HermitianOp> {
        let dim = self.dim * other.dim;
        check_dim(dim)?;
        let mut data = vec![c(0.0, 0.0); dim * dim];
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self.get(i, j);
                for k in 0..other.dim {
                    for l in 0..other.dim {
                        data[(i * other.dim + k) * dim + (j * other.dim + l)] =
                            a * other.get(k, l);
                    }
                }
            }
        }
        Ok(HermitianOp::from_raw(dim, data))
    }

    fn qubit_count(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    /// Partial trace keeping the qubits flagged `true` in `keep`.
    ///
    /// `keep[0]` refers to the most significant qubit. At least one qubit
    /// must be kept and at least one traced out.
    pub fn partial_trace(&self, keep: &[bool]) -> Result<HermitianOp> {
        let q = self.qubit_count();
        if keep.len() != q {
            return Err(Error::InvalidMask(format!(
                "mask length {} does not match {} qubits",
                keep.len(),
                q
            )));
        }
        let kept: Vec<usize> = (0..q).filter(|&i| keep[i]).collect();
        let traced: Vec<usize> = (0..q).filter(|&i| !keep[i]).collect();
        if kept.is_empty() || traced.is_empty() {
            return Err(Error::InvalidMask(
                "mask must keep at least one qubit and trace at least one".into(),
            ));
        }
        let out_dim = 1usize << kept.len();
        let tr_dim = 1usize << traced.len();
        // Bit position of qubit i within a dim-index: qubit 0 is the MSB.
        let bit = |qubit: usize| q - 1 - qubit;
        let compose = |kept_bits: usize, traced_bits: usize| -> usize {
            let mut idx = 0usize;
            for (pos, &qb) in kept.iter().enumerate() {
                if kept_bits >> (kept.len() - 1 - pos) & 1 == 1 {
                    idx |= 1 << bit(qb);
                }
            }
            for (pos, &qb) in traced.iter().enumerate() {
                if traced_bits >> (traced.len() - 1 - pos) & 1 == 1 {
                    idx |= 1 << bit(qb);
                }
            }
            idx
        };
        let mut data = vec![c(0.0, 0.0); out_dim * out_dim];
        for i in 0..out_dim {
            for j in 0..out_dim {
                let mut acc = c(0.0, 0.0);
                for t in 0..tr_dim {
                    acc += self.get(compose(i, t), compose(j, t));
                }
                data[i * out_dim + j] = acc;
            }
        }
        Ok(HermitianOp::from_raw(out_dim, data))
    }

    /// All eigenvalues, ascending. Closed form for dim 2, Jacobi otherwise.
    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.dim == 2 {
            let a = self.get(0, 0).re;
            let d = self.get(1, 1).re;
            let b2 = self.get(0, 1).norm_sqr();
            let m = 0.5 * (a + d);
            let disc = (0.25 * (a - d) * (a - d) + b2).sqrt();
            vec![m - disc, m + disc]
        } else {
            let (vals, _) = self.embedded_jacobi();
            // Real-embedded spectrum duplicates each eigenvalue; average pairs.
            let mut vals = vals;
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            (0..self.dim)
                .map(|i| 0.5 * (vals[2 * i] + vals[2 * i + 1]))
                .collect()
        }
    }

    /// Largest eigenvalue.
    pub fn lambda_max(&self) -> f64 {
        *self
            .eigenvalues()
            .last()
            .expect("spectrum of a nonempty matrix")
    }

    /// Smallest eigenvalue.
    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Eigenpairs `(λ, v)` with `‖Hv − λv‖ ≤ 1e-10`, ascending in λ.
    pub fn eigenpairs(&self) -> Vec<(f64, Vec<Complex64>)> {
        let d = self.dim;
        let (vals, vecs) = self.embedded_jacobi();
        let n = 2 * d;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap());
        // One representative per duplicated pair.
        order
            .iter()
            .step_by(2)
            .map(|&col| {
                let mut v: Vec<Complex64> =
                    (0..d).map(|i| c(vecs[i * n + col], vecs[(i + d) * n + col])).collect();
                let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                for z in &mut v {
                    *z /= norm;
                }
                (vals[col], v)
            })
            .collect()
    }

    /// Jacobi diagonalization of the real symmetric embedding
    /// `[[Re H, −Im H], [Im H, Re H]]`. Returns (eigenvalues, eigenvector
    /// matrix in row-major with eigenvectors as columns).
    fn embedded_jacobi(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.dim;
        let n = 2 * d;
        let mut a = vec![0.0f64; n * n];
        for i in 0..d {
            for j in 0..d {
                let h = self.get(i, j);
                a[i * n + j] = h.re;
                a[i * n + (j + d)] = -h.im;
                a[(i + d) * n + j] = h.im;
                a[(i + d) * n + (j + d)] = h.re;
            }
        }
        let mut v = vec![0.0f64; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().max(1e-300);
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i * n + j] * a[i * n + j])
                .sum();
            if off <= 1e-30 * scale {
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let apq = a[p * n + q];
                    if apq.abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let cos = 1.0 / (t * t + 1.0).sqrt();
                    let sin = t * cos;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = cos * akp - sin * akq;
                        a[k * n + q] = sin * akp + cos * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = cos * apk - sin * aqk;
                        a[q * n + k] = sin * apk + cos * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = cos * vkp - sin * vkq;
                        v[k * n + q] = sin * vkp + cos * vkq;
                    }
                }
            }
        }
        ((0..n).map(|i| a[i * n + i]).collect(), v)
    }
}

/// A validated quantum state: unit trace and positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: HermitianOp,
}

impl DensityMatrix {
    pub fn new(op: HermitianOp) -> Result<Self> {
        Self::with_policy(op, &NumericPolicy::DEFAULT)
    }

    pub fn with_policy(op: HermitianOp, policy: &NumericPolicy) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > policy.trace_tol {
            return Err(Error::InvalidState(format!("trace = {tr}, expected 1")));
        }
        let min = op.lambda_min();
        if min < -policy.psd_slack {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(DensityMatrix { op })
    }

    pub fn op(&self) -> &HermitianOp {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }
}

/// `v · σ = v_x σ_x + v_y σ_y + v_z σ_z` as a 2×2 Hermitian operator.
pub fn pauli_dot(v: &BlochVector) -> HermitianOp {
    HermitianOp::from_raw(
        2,
        vec![
            c(v.z, 0.0),
            c(v.x, -v.y),
            c(v.x, v.y),
            c(-v.z, 0.0),
        ],
    )
}

/// The qubit state `(I + v·σ)/2`. Errors outside the Bloch ball.
pub fn state_from_bloch(v: &BlochVector) -> Result<DensityMatrix> {
    state_from_bloch_with_policy(v, &NumericPolicy::DEFAULT)
}

pub fn state_from_bloch_with_policy(
    v: &BlochVector,
    policy: &NumericPolicy,
) -> Result<DensityMatrix> {
    let norm = v.norm();
    if norm > 1.0 + policy.bloch_ball_slack {
        return Err(Error::OutsideBlochBall(norm));
    }
    let op = HermitianOp::identity(2)?.add(&pauli_dot(v))?.scale(0.5);
    DensityMatrix::with_policy(op, policy)
}

/// Free-function form of [`HermitianOp::lambda_max`].
pub fn lambda_max(h: &HermitianOp) -> f64 {
    h.lambda_max()
}

/// Free-function form of [`HermitianOp::tensor`].
pub fn tensor(a: &HermitianOp, b: &HermitianOp) -> Result<HermitianOp> {
    a.tensor(b)
}

/// Free-function form of [`HermitianOp::partial_trace`].
pub fn partial_trace(h: &HermitianOp, keep: &[bool]) -> Result<HermitianOp> {
    h.partial_trace(keep)
}
