//! Bell-diagonal two-qubit states.
//!
//! A Bell-diagonal state is `(I + c1 σx⊗σx + c2 σy⊗σy + c3 σz⊗σz)/4`, labelled by its
//! correlation vector `(c1, c2, c3)`. Its eigenvectors are the four Bell states
//! `|β_ab⟩ = (|0,b⟩ + (-1)^a |1,1⊕b⟩)/√2` and its eigenvalues are affine in `c`.
//! Physical states fill a tetrahedron with the Bell states at its vertices; the
//! separable ones fill the octahedron `|c1| + |c2| + |c3| ≤ 1`, and the classical
//! ones lie on the coordinate axes.

use std::fmt;

use nalgebra::{Matrix2, Matrix3, Matrix4, SymmetricEigen, Vector3};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance on negative eigenvalues when testing physicality.
pub const PHYSICAL_TOL: f64 = 1e-12;
/// Default tolerance for "on a coordinate axis".
pub const CLASSICAL_TOL: f64 = 1e-9;
/// Slack on the octahedron face `|c1| + |c2| + |c3| = 1`.
pub const SEPARABLE_TOL: f64 = 1e-12;

/// Label `(a, b)` of the Bell state `|β_ab⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BellLabel {
    pub a: u8,
    pub b: u8,
}

impl BellLabel {
    /// Canonical eigenvalue order used throughout: (0,0), (0,1), (1,0), (1,1).
    pub const ALL: [BellLabel; 4] = [
        BellLabel { a: 0, b: 0 },
        BellLabel { a: 0, b: 1 },
        BellLabel { a: 1, b: 0 },
        BellLabel { a: 1, b: 1 },
    ];

    pub fn index(self) -> usize {
        usize::from(2 * self.a + self.b)
    }

    /// Correlation vector of the Bell state itself (a vertex of the tetrahedron).
    pub fn vertex(self) -> CorrelationVector {
        let sa = sign(self.a);
        let sb = sign(self.b);
        CorrelationVector::new(sa, -sa * sb, sb)
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.a, self.b)
    }
}

fn sign(bit: u8) -> f64 {
    if bit == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The triple `(c1, c2, c3)` labelling a Bell-diagonal state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CorrelationVector {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl CorrelationVector {
    pub const fn new(c1: f64, c2: f64, c3: f64) -> Self {
        Self { c1, c2, c3 }
    }

    pub fn from_array(c: [f64; 3]) -> Self {
        Self::new(c[0], c[1], c[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }

    /// `max |c_j|`
    pub fn c_max(self) -> f64 {
        self.c1.abs().max(self.c2.abs()).max(self.c3.abs())
    }

    pub fn l1_norm(self) -> f64 {
        self.c1.abs() + self.c2.abs() + self.c3.abs()
    }

    pub fn midpoint(self, other: Self) -> Self {
        Self::new(
            0.5 * (self.c1 + other.c1),
            0.5 * (self.c2 + other.c2),
            0.5 * (self.c3 + other.c3),
        )
    }

    /// Returns the state unchanged if physical, otherwise the most negative eigenvalue as an error.
    pub fn ensure_physical(self) -> Result<Self> {
        let s = spectrum(self);
        let (label, value) = s.min();
        if value < -PHYSICAL_TOL {
            Err(Error::Unphysical { label, value })
        } else {
            Ok(self)
        }
    }
}

impl From<[f64; 3]> for CorrelationVector {
    fn from(c: [f64; 3]) -> Self {
        Self::from_array(c)
    }
}

/// The four Bell eigenvalues `λ_ab`, stored in [`BellLabel::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellSpectrum {
    pub lambda: [f64; 4],
}

impl BellSpectrum {
    pub fn get(&self, label: BellLabel) -> f64 {
        self.lambda[label.index()]
    }

    pub fn sum(&self) -> f64 {
        self.lambda.iter().sum()
    }

    /// Largest eigenvalue; ties go to the lexicographically smallest label.
    pub fn max(&self) -> (BellLabel, f64) {
        let mut best = (BellLabel::ALL[0], self.lambda[0]);
        for label in &BellLabel::ALL[1..] {
            let v = self.get(*label);
            if v > best.1 {
                best = (*label, v);
            }
        }
        best
    }

    pub fn min(&self) -> (BellLabel, f64) {
        let mut best = (BellLabel::ALL[0], self.lambda[0]);
        for label in &BellLabel::ALL[1..] {
            let v = self.get(*label);
            if v < best.1 {
                best = (*label, v);
            }
        }
        best
    }
}

/// Eigenvalues `λ_ab = (1 + (-1)^a c1 - (-1)^(a+b) c2 + (-1)^b c3)/4`.
///
/// Unphysical inputs are accepted and yield negative entries.
pub fn spectrum(c: CorrelationVector) -> BellSpectrum {
    let lambda = BellLabel::ALL.map(|l| {
        let sa = sign(l.a);
        let sb = sign(l.b);
        (1.0 + sa * c.c1 - sa * sb * c.c2 + sb * c.c3) / 4.0
    });
    BellSpectrum { lambda }
}

/// Inverse of [`spectrum`].
pub fn correlation_from_spectrum(s: &BellSpectrum) -> Result<CorrelationVector> {
    let total = s.sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::SpectrumNotNormalized(total));
    }
    let [l00, l01, l10, l11] = s.lambda;
    Ok(CorrelationVector::new(
        l00 + l01 - l10 - l11,
        -(l00 - l01 - l10 + l11),
        l00 - l01 + l10 - l11,
    ))
}

pub fn is_physical(c: CorrelationVector, tol: f64) -> bool {
    spectrum(c).min().1 >= -tol
}

/// Octahedron test. Errors on unphysical input.
pub fn is_separable(c: CorrelationVector) -> Result<bool> {
    c.ensure_physical()?;
    Ok(c.l1_norm() <= 1.0 + SEPARABLE_TOL)
}

/// Geometric classification of a point of correlation space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateClass {
    pub physical: bool,
    pub separable: bool,
    pub classical: bool,
    pub dominant_vertex: BellLabel,
}

/// Classifies `c`; `tol` is the classicality tolerance (at most one `|c_j| > tol`).
///
/// The flags are nested: classical implies separable implies physical.
pub fn classify(c: CorrelationVector, tol: f64) -> StateClass {
    let s = spectrum(c);
    let physical = s.min().1 >= -PHYSICAL_TOL;
    let separable = physical && c.l1_norm() <= 1.0 + SEPARABLE_TOL;
    let off_axis = c.to_array().iter().filter(|x| x.abs() > tol).count();
    StateClass {
        physical,
        separable,
        classical: separable && off_axis <= 1,
        dominant_vertex: s.max().0,
    }
}

/// A 4×4 two-qubit density matrix in the basis |00⟩, |01⟩, |10⟩, |11⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix4(pub Matrix4<Complex64>);

impl DensityMatrix4 {
    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Largest entrywise deviation from hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.0 - self.0.adjoint();
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let eig = SymmetricEigen::new(self.0);
        let mut out = [0.0; 4];
        for (o, v) in out.iter_mut().zip(eig.eigenvalues.iter()) {
            *o = *v;
        }
        out.sort_by(f64::total_cmp);
        out
    }

    /// Von Neumann entropy in bits, from a numerical eigendecomposition.
    pub fn entropy(&self) -> f64 {
        self.eigenvalues()
            .iter()
            .filter(|&&x| x > 0.0)
            .map(|&x| -x * x.log2())
            .sum()
    }

    /// Transpose on qubit B.
    pub fn partial_transpose(&self) -> Self {
        let mut out = Matrix4::zeros();
        for a in 0..2 {
            for b in 0..2 {
                for a2 in 0..2 {
                    for b2 in 0..2 {
                        out[(2 * a + b, 2 * a2 + b2)] = self.0[(2 * a + b2, 2 * a2 + b)];
                    }
                }
            }
        }
        Self(out)
    }

    /// Reduced state of qubit A.
    pub fn reduced_a(&self) -> Matrix2<Complex64> {
        Matrix2::from_fn(|i, j| self.0[(2 * i, 2 * j)] + self.0[(2 * i + 1, 2 * j + 1)])
    }

    /// Correlation matrix `T_jk = tr(ρ σ_j⊗σ_k)`.
    pub fn correlation_matrix(&self) -> CorrelationMatrix3 {
        let t = Matrix3::from_fn(|j, k| {
            let op = pauli(j + 1).kronecker(&pauli(k + 1));
            (self.0 * op).trace().re
        });
        CorrelationMatrix3(t)
    }
}

/// Pauli matrix `σ_j`, with `σ_0 = I`.
pub fn pauli(j: usize) -> Matrix2<Complex64> {
    let o = Complex64::new(0.0, 0.0);
    let r = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match j {
        0 => Matrix2::new(r, o, o, r),
        1 => Matrix2::new(o, r, r, o),
        2 => Matrix2::new(o, -i, i, o),
        3 => Matrix2::new(r, o, o, -r),
        _ => panic!("Pauli index {j} out of range"),
    }
}

/// `(I + Σ_j c_j σ_j⊗σ_j)/4`. Errors on unphysical input.
pub fn density_matrix(c: CorrelationVector) -> Result<DensityMatrix4> {
    c.ensure_physical()?;
    let mut m: Matrix4<Complex64> = Matrix4::identity();
    for (j, cj) in c.to_array().into_iter().enumerate() {
        let s = pauli(j + 1);
        m += s.kronecker(&s) * Complex64::new(cj, 0.0);
    }
    Ok(DensityMatrix4(m / Complex64::new(4.0, 0.0)))
}

/// Real 3×3 correlation matrix `T_jk = ⟨σ_j⊗σ_k⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationMatrix3(pub Matrix3<f64>);

/// Local frames bringing a correlation matrix to diagonal form:
/// `T = rot_a · diag(c) · rot_bᵀ`, both rotations proper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellFrame {
    pub c: CorrelationVector,
    pub rot_a: Matrix3<f64>,
    pub rot_b: Matrix3<f64>,
}

impl BellFrame {
    pub fn reconstruct(&self) -> Matrix3<f64> {
        self.rot_a * Matrix3::from_diagonal(&Vector3::from(self.c.to_array())) * self.rot_b.transpose()
    }
}

/// Diagonalizes a correlation matrix by local rotations.
///
/// Singular values are sorted by decreasing magnitude. A reflection in either factor is
/// turned into a rotation by negating its last column, with the sign moved onto `c3`.
pub fn bell_diagonalize(t: &CorrelationMatrix3) -> Result<BellFrame> {
    if let Some(x) = t.0.iter().find(|x| x.is_nan() || x.abs() > 1.0) {
        return Err(Error::Domain {
            name: "correlation matrix entry",
            value: *x,
            domain: "[-1, 1]",
        });
    }
    let svd = t.0.svd(true, true);
    let (u, v_t) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));

    let mut rot_a = Matrix3::zeros();
    let mut rot_b = Matrix3::zeros();
    let mut c = [0.0; 3];
    for (dst, &src) in order.iter().enumerate() {
        rot_a.set_column(dst, &u.column(src));
        rot_b.set_column(dst, &v_t.row(src).transpose());
        c[dst] = svd.singular_values[src];
    }
    for rot in [&mut rot_a, &mut rot_b] {
        if rot.determinant() < 0.0 {
            let col = -rot.column(2);
            rot.set_column(2, &col);
            c[2] = -c[2];
        }
    }
    Ok(BellFrame {
        c: CorrelationVector::from_array(c),
        rot_a,
        rot_b,
    })
}

/// Draws a state uniformly (in volume) from the tetrahedron of physical states.
pub fn sample_physical<R: Rng + ?Sized>(rng: &mut R) -> CorrelationVector {
    // Flat Dirichlet on the four eigenvalues.
    let mut w = [0.0f64; 4];
    for x in &mut w {
        *x = -(1.0 - rng.gen::<f64>()).ln();
    }
    let total: f64 = w.iter().sum();
    let lambda = w.map(|x| x / total);
    let [l00, l01, l10, l11] = lambda;
    CorrelationVector::new(l00 + l01 - l10 - l11, -(l00 - l01 - l10 + l11), l00 - l01 + l10 - l11)
}
