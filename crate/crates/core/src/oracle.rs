//! Numerical minimization of the measured conditional entropy `Σ_k p_k S(ρ_B|k)` over
//! measurements on qubit A.
//!
//! Everything here is computed from the explicit 4×4 density matrix, so it serves as an
//! independent check on the closed-form classical correlations in [`crate::measures`].

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{density_matrix, pauli, CorrelationVector, DensityMatrix4};

pub const DEFAULT_GRID: usize = 512;
const MAX_REFINE_ITERATIONS: usize = 200;
const REFINE_STOP: f64 = 1e-12;
const GOLDEN_ANGLE_TOL: f64 = 1e-10;
const REDRAWS_PER_TRIAL: usize = 200;

/// Unit Bloch vector of a projective measurement on qubit A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementDirection([f64; 3]);

impl std::ops::Neg for MeasurementDirection {
    type Output = Self;

    fn neg(self) -> Self {
        Self(self.0.map(|x| -x))
    }
}

impl MeasurementDirection {
    pub fn new(n: [f64; 3]) -> Result<Self> {
        let norm = Vector3::from(n).norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NonUnitDirection(norm));
        }
        Ok(Self(n))
    }

    /// Normalizes `v`; fails on the zero vector.
    pub fn normalized(v: [f64; 3]) -> Result<Self> {
        let v = Vector3::from(v);
        let norm = v.norm();
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::NonUnitDirection(norm));
        }
        Ok(Self((v / norm).into()))
    }

    fn from_angles(theta: f64, phi: f64) -> Self {
        Self([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()])
    }

    pub fn as_array(self) -> [f64; 3] {
        self.0
    }

    /// `(I + n·σ)/2`
    fn projector(self) -> Matrix2<Complex64> {
        let mut p = pauli(0);
        for (j, nj) in self.0.iter().enumerate() {
            p += pauli(j + 1) * Complex64::new(*nj, 0.0);
        }
        p * Complex64::new(0.5, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub min_entropy: f64,
    pub argmin: MeasurementDirection,
    pub evaluations: usize,
    pub refined: bool,
}

/// Outcome of applying the effect `E ⊗ I` to `ρ`: probability and unnormalized state of B.
fn apply_effect(rho: &Matrix4<Complex64>, effect: &Matrix2<Complex64>) -> (f64, Matrix2<Complex64>) {
    let mut sigma_b = Matrix2::zeros();
    for b in 0..2 {
        for b2 in 0..2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..2 {
                for a2 in 0..2 {
                    acc += effect[(a, a2)] * rho[(2 * a2 + b, 2 * a + b2)];
                }
            }
            sigma_b[(b, b2)] = acc;
        }
    }
    (sigma_b.trace().re, sigma_b)
}

fn entropy2(rho: &Matrix2<Complex64>) -> f64 {
    SymmetricEigen::new(*rho)
        .eigenvalues
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum()
}

/// Average entropy of B over the outcomes of the given effects on A.
fn average_conditional_entropy(rho: &DensityMatrix4, effects: &[Matrix2<Complex64>]) -> f64 {
    effects
        .iter()
        .map(|e| {
            let (p, sigma) = apply_effect(rho.matrix(), e);
            if p > 0.0 {
                p * entropy2(&(sigma / Complex64::new(p, 0.0)))
            } else {
                0.0
            }
        })
        .sum()
}

/// Outcome probabilities of the projective measurement along `n`.
pub fn outcome_probabilities(c: CorrelationVector, n: MeasurementDirection) -> Result<[f64; 2]> {
    let rho = density_matrix(c)?;
    Ok([n, -n].map(|d| apply_effect(rho.matrix(), &d.projector()).0))
}

fn projective_entropy(rho: &DensityMatrix4, n: MeasurementDirection) -> f64 {
    average_conditional_entropy(rho, &[n.projector(), (-n).projector()])
}

/// `Σ_± p_± S(ρ_B|±)` for the measurement `(I ± n·σ)/2` on qubit A.
pub fn conditional_entropy_for_direction(c: CorrelationVector, n: MeasurementDirection) -> Result<f64> {
    let n = MeasurementDirection::new(n.0)?;
    Ok(projective_entropy(&density_matrix(c)?, n))
}

/// `count` nearly uniform directions on the unit sphere.
pub fn fibonacci_sphere(count: usize) -> Vec<MeasurementDirection> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            MeasurementDirection([r * phi.cos(), r * phi.sin(), z])
        })
        .collect()
}

fn lexicographic(a: &[f64; 3], b: &[f64; 3]) -> std::cmp::Ordering {
    a[0].total_cmp(&b[0])
        .then(a[1].total_cmp(&b[1]))
        .then(a[2].total_cmp(&b[2]))
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64, evals: &mut usize) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    *evals += 2;
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
        *evals += 1;
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}

/// Minimizes the projective conditional entropy over directions: a Fibonacci-sphere grid,
/// then (if `refine`) coordinate-wise golden-section search on the spherical angles.
pub fn minimize_conditional_entropy(
    c: CorrelationVector,
    grid_resolution: usize,
    refine: bool,
) -> Result<OracleResult> {
    if grid_resolution < 8 {
        return Err(Error::InvalidArgument(format!("grid resolution {grid_resolution} < 8")));
    }
    let rho = density_matrix(c)?;
    let (best_value, best_dir) = fibonacci_sphere(grid_resolution)
        .into_par_iter()
        .map(|n| (projective_entropy(&rho, n), n))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(lexicographic(&a.1 .0, &b.1 .0)))
        .expect("grid is non-empty");
    let mut evaluations = grid_resolution;
    if !refine {
        return Ok(OracleResult {
            min_entropy: best_value,
            argmin: best_dir,
            evaluations,
            refined: false,
        });
    }

    let [x, y, z] = best_dir.0;
    let mut theta = z.clamp(-1.0, 1.0).acos();
    let mut phi = y.atan2(x);
    let mut value = best_value;
    let half_width = 2.0 * (4.0 * PI / grid_resolution as f64).sqrt();
    let objective = |t: f64, p: f64| projective_entropy(&rho, MeasurementDirection::from_angles(t, p));

    for _ in 0..MAX_REFINE_ITERATIONS {
        let start = value;
        let t = golden_section(
            |t| objective(t, phi),
            theta - half_width,
            theta + half_width,
            GOLDEN_ANGLE_TOL,
            &mut evaluations,
        );
        let ft = objective(t, phi);
        evaluations += 1;
        if ft < value {
            theta = t;
            value = ft;
        }
        let p = golden_section(
            |p| objective(theta, p),
            phi - half_width,
            phi + half_width,
            GOLDEN_ANGLE_TOL,
            &mut evaluations,
        );
        let fp = objective(theta, p);
        evaluations += 1;
        if fp < value {
            phi = p;
            value = fp;
        }
        if start - value < REFINE_STOP {
            break;
        }
    }

    let argmin = if value < best_value {
        MeasurementDirection::from_angles(theta, phi)
    } else {
        best_dir
    };
    Ok(OracleResult {
        min_entropy: value.min(best_value),
        argmin,
        evaluations,
        refined: true,
    })
}

fn random_direction<R: Rng>(rng: &mut R) -> Vector3<f64> {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..2.0 * PI);
    let r = (1.0 - z * z).max(0.0).sqrt();
    Vector3::new(r * phi.cos(), r * phi.sin(), z)
}

/// Draws Bloch directions and solves `Σ q_k = 1`, `Σ q_k n_k = 0` for the weights.
/// Returns `None` when no valid nonnegative solution exists.
fn draw_povm<R: Rng>(rng: &mut R, outcomes: usize) -> Option<Vec<(f64, Vector3<f64>)>> {
    let dirs: Vec<Vector3<f64>> = match outcomes {
        3 => {
            // Three rank-one effects must have coplanar Bloch vectors.
            let n1 = random_direction(rng);
            let n2 = random_direction(rng);
            let mix = rng.gen_range(-1.0..1.0) * n1 + rng.gen_range(-1.0..1.0) * n2;
            let norm = mix.norm();
            if norm < 1e-6 {
                return None;
            }
            vec![n1, n2, mix / norm]
        }
        4 => (0..4).map(|_| random_direction(rng)).collect(),
        _ => unreachable!("outcome count checked by caller"),
    };
    let a = nalgebra::DMatrix::from_fn(4, outcomes, |r, k| if r < 3 { dirs[k][r] } else { 1.0 });
    let b = nalgebra::DVector::from_vec(vec![0.0, 0.0, 0.0, 1.0]);
    let q = a.clone().svd(true, true).solve(&b, 1e-12).ok()?;
    if (&a * &q - &b).amax() > 1e-12 || q.iter().any(|&w| w < 0.0) {
        return None;
    }
    Some(q.iter().copied().zip(dirs).collect())
}

/// Smallest average conditional entropy found among `trials` random rank-one POVMs with
/// `outcomes` elements `E_k = 2 q_k |n_k⟩⟨n_k|`.
pub fn povm_sanity_scan(c: CorrelationVector, trials: usize, outcomes: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if !(3..=4).contains(&outcomes) {
        return Err(Error::InvalidArgument(format!(
            "outcome count {outcomes} not in {{3, 4}}"
        )));
    }
    let rho = density_matrix(c)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut accepted, mut drawn) = (0usize, 0usize);
    let mut best = f64::INFINITY;
    while accepted < trials {
        if drawn >= trials * REDRAWS_PER_TRIAL {
            return Err(Error::PovmRejected { accepted, drawn });
        }
        drawn += 1;
        let Some(povm) = draw_povm(&mut rng, outcomes) else {
            continue;
        };
        accepted += 1;
        let effects: Vec<Matrix2<Complex64>> = povm
            .iter()
            .map(|(q, n)| {
                let dir = MeasurementDirection([n.x, n.y, n.z]);
                dir.projector() * Complex64::new(2.0 * q, 0.0)
            })
            .collect();
        best = best.min(average_conditional_entropy(&rho, &effects));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // H2(0.75), arbitrary-precision reference.
    const H2_075: f64 = 0.811278124459132863909695792039;

    fn cv(c1: f64, c2: f64, c3: f64) -> CorrelationVector {
        CorrelationVector::new(c1, c2, c3)
    }

    fn dir(n: [f64; 3]) -> MeasurementDirection {
        MeasurementDirection::new(n).unwrap()
    }

    #[test]
    fn direction_entropy_examples() {
        let e = conditional_entropy_for_direction(cv(0.0, 0.0, 0.0), dir([0.6, 0.0, 0.8])).unwrap();
        assert_abs_diff_eq!(e, 1.0, epsilon = 1e-14);
        let e = conditional_entropy_for_direction(cv(0.0, 0.0, 1.0), dir([0.0, 0.0, 1.0])).unwrap();
        assert_abs_diff_eq!(e, 0.0, epsilon = 1e-14);
        let e = conditional_entropy_for_direction(cv(0.5, -0.2, 0.1), dir([1.0, 0.0, 0.0])).unwrap();
        assert_abs_diff_eq!(e, H2_075, epsilon = 1e-12);
    }

    #[test]
    fn direction_errors() {
        assert!(matches!(
            MeasurementDirection::new([1.0, 1.0, 0.0]),
            Err(Error::NonUnitDirection(_))
        ));
        assert!(MeasurementDirection::normalized([0.0; 3]).is_err());
        assert!(conditional_entropy_for_direction(cv(1.0, 1.0, 1.0), dir([1.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn outcomes_are_unbiased() {
        let p = outcome_probabilities(
            cv(0.7, -0.2, 0.4),
            MeasurementDirection::normalized([0.3, -1.0, 2.0]).unwrap(),
        )
        .unwrap();
        assert_abs_diff_eq!(p[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn fibonacci_points_are_unit() {
        for n in fibonacci_sphere(64) {
            assert_abs_diff_eq!(Vector3::from(n.0).norm(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn minimize_examples() {
        let r = minimize_conditional_entropy(cv(0.0, 0.0, 0.0), 64, true).unwrap();
        assert_abs_diff_eq!(r.min_entropy, 1.0, epsilon = 1e-12);

        let r = minimize_conditional_entropy(cv(0.0, 0.0, 1.0), 64, true).unwrap();
        assert_abs_diff_eq!(r.min_entropy, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.argmin.0[2].abs(), 1.0, epsilon = 1e-6);

        assert!(minimize_conditional_entropy(cv(0.0, 0.0, 0.0), 7, true).is_err());
        assert!(minimize_conditional_entropy(cv(2.0, 0.0, 0.0), 64, true).is_err());
    }

    #[test]
    fn refined_minimum_beats_grid() {
        let c = cv(0.8, -0.4, 0.3);
        let coarse = minimize_conditional_entropy(c, 64, false).unwrap();
        let fine = minimize_conditional_entropy(c, 64, true).unwrap();
        assert!(!coarse.refined && fine.refined);
        assert!(fine.min_entropy <= coarse.min_entropy);
        assert!(fine.evaluations > coarse.evaluations);
    }

    #[test]
    fn povm_scan_examples() {
        assert_abs_diff_eq!(
            povm_sanity_scan(cv(0.0, 0.0, 0.0), 50, 3, 0).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert!(povm_sanity_scan(cv(0.0, 0.0, 1.0), 1000, 3, 0).unwrap() >= -1e-9);

        let c = cv(0.8, -0.4, 0.3);
        let opt = minimize_conditional_entropy(c, DEFAULT_GRID, true).unwrap().min_entropy;
        let scan = povm_sanity_scan(c, 1000, 4, 0).unwrap();
        assert!(scan >= opt - 1e-9, "scan {scan} < projective {opt}");

        assert!(povm_sanity_scan(c, 0, 3, 0).is_err());
        assert!(povm_sanity_scan(c, 10, 5, 0).is_err());
    }

    #[test]
    fn povm_scan_is_seeded() {
        let c = cv(0.3, 0.1, -0.5);
        assert_eq!(
            povm_sanity_scan(c, 40, 4, 7).unwrap(),
            povm_sanity_scan(c, 40, 4, 7).unwrap()
        );
    }
}
