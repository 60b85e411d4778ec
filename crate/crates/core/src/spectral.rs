//! Transfer matrices of the two characteristic recurrences and their spectra.
//!
//! The interior-point system advances the state
//! `(a'_-(y), a'_+(y), a'_+(y - l), a'_+(y - 2l))` by one length `l` with a
//! 4x4 matrix whose characteristic polynomial is
//! `p_a(z) = z^4 + (1 - a/2) z^2 + a/2`. The boundary system advances
//! `(a'(y), a'(y - 2l))` by `4l` with a rank-one 2x2 matrix.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Matrix4 = [[f64; 4]; 4];
pub type Matrix2 = [[f64; 2]; 2];

/// Which of the two 1-D systems a result refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemTag {
    Pointwise,
    Boundary,
}

impl SystemTag {
    pub fn name(&self) -> &'static str {
        match self {
            SystemTag::Pointwise => "pointwise",
            SystemTag::Boundary => "boundary",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StabilityMatrix {
    Pointwise(Matrix4),
    Boundary(Matrix2),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub system: SystemTag,
    pub matrix: StabilityMatrix,
    pub eigenvalues: Vec<Complex64>,
    pub spectral_radius: f64,
    pub stable: bool,
    /// Predicted `d(log E)/dt`; `-inf` for a nilpotent transfer matrix.
    pub predicted_energy_slope: f64,
    /// Frobenius condition number of the eigenvector matrix (pointwise only).
    pub conditioning: Option<f64>,
}

pub fn pointwise_matrix(a: f64) -> Matrix4 {
    let h = a / 2.0;
    [
        [0.0, 1.0, h, h],
        [-1.0, 0.0, h, h],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
    ]
}

/// `p_a(z)`.
pub fn pointwise_char_poly(a: f64, z: Complex64) -> Complex64 {
    let z2 = z * z;
    z2 * z2 + z2 * (1.0 - a / 2.0) + a / 2.0
}

/// `sqrt(a^2 - 12a + 4)`, with a discriminant below its own rounding error
/// treated as an exact double root.
fn pointwise_disc_root(a: f64) -> Complex64 {
    let disc = a * a - 12.0 * a + 4.0;
    let noise = 8.0 * f64::EPSILON * (a * a + 12.0 * a.abs() + 4.0);
    if disc.abs() <= noise {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::new(disc, 0.0).sqrt()
}

/// The two values `(a - 2 +- sqrt(a^2 - 12a + 4)) / 4` taken by `z^2` at the roots.
pub fn pointwise_lambda_squared(a: f64) -> [Complex64; 2] {
    let root = pointwise_disc_root(a);
    let base = Complex64::new(a - 2.0, 0.0);
    [(base + root) / 4.0, (base - root) / 4.0]
}

/// All four eigenvalues, `+-sqrt` of each squared value (principal branch).
pub fn pointwise_eigs(a: f64) -> [Complex64; 4] {
    let [s1, s2] = pointwise_lambda_squared(a);
    let (r1, r2) = (s1.sqrt(), s2.sqrt());
    [r1, -r1, r2, -r2]
}

/// Spectral radius computed from `|z^2|`, so that `rho < 1` and the
/// stability test below agree bit for bit.
pub fn pointwise_spectral_radius(a: f64) -> f64 {
    let [s1, s2] = pointwise_lambda_squared(a);
    libm::sqrt(libm::fmax(s1.norm(), s2.norm()))
}

/// `|a - 2 +- sqrt(a^2 - 12a + 4)| < 4` with complex modulus.
pub fn pointwise_stable(a: f64) -> bool {
    let root = pointwise_disc_root(a);
    let base = Complex64::new(a - 2.0, 0.0);
    (base + root).norm() < 4.0 && (base - root).norm() < 4.0
}

/// Predicted slope of `log E(t)`: `2 ln(rho_a) / ell`.
pub fn pointwise_rate(a: f64, ell: f64) -> Result<f64> {
    if !(ell.is_finite() && ell > 0.0) {
        return Err(Error::InvalidParameter {
            name: "ell",
            reason: "must be a positive finite length",
        });
    }
    if !pointwise_stable(a) {
        return Err(Error::NotStable);
    }
    Ok(2.0 * libm::log(pointwise_spectral_radius(a)) / ell)
}

/// Right eigenvector of the pointwise matrix for eigenvalue `z`, normalised
/// with last component 1.
fn pointwise_eigenvector(a: f64, z: Complex64) -> [Complex64; 4] {
    let one = Complex64::new(1.0, 0.0);
    let first = (z + one) * (a / 2.0) - z * z * z;
    [first, z * z, z, one]
}

/// `||V||_F * ||V^{-1}||_F` for the eigenvector matrix `V` of the pointwise
/// matrix. Infinite when the matrix is not diagonalisable.
pub fn pointwise_conditioning(a: f64) -> f64 {
    let eigs = pointwise_eigs(a);
    let mut v = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (col, &z) in eigs.iter().enumerate() {
        for (row, entry) in pointwise_eigenvector(a, z).into_iter().enumerate() {
            v[row][col] = entry;
        }
    }
    match invert4(v) {
        Some(inv) => frobenius(&v) * frobenius(&inv),
        None => f64::INFINITY,
    }
}

fn frobenius(m: &[[Complex64; 4]; 4]) -> f64 {
    libm::sqrt(m.iter().flatten().map(|z| z.norm_sqr()).sum())
}

/// Gauss-Jordan with partial pivoting.
fn invert4(mut m: [[Complex64; 4]; 4]) -> Option<[[Complex64; 4]; 4]> {
    let zero = Complex64::new(0.0, 0.0);
    let mut inv = [[zero; 4]; 4];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    let scale = m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    for col in 0..4 {
        let pivot = (col..4).max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))?;
        if m[pivot][col].norm() <= 1e-13 * scale {
            return None;
        }
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let p = m[col][col];
        for k in 0..4 {
            m[col][k] /= p;
            inv[col][k] /= p;
        }
        for row in 0..4 {
            if row != col {
                let f = m[row][col];
                for k in 0..4 {
                    let (mc, ic) = (m[col][k], inv[col][k]);
                    m[row][k] -= f * mc;
                    inv[row][k] -= f * ic;
                }
            }
        }
    }
    Some(inv)
}

/// Smallest distance between two of the four eigenvalues.
pub fn pointwise_eig_separation(a: f64) -> f64 {
    let e = pointwise_eigs(a);
    let mut best = f64::INFINITY;
    for i in 0..4 {
        for j in i + 1..4 {
            best = best.min((e[i] - e[j]).norm());
        }
    }
    best
}

/// True iff all four eigenvalues are pairwise separated by more than `1e-8`.
pub fn eig_simplicity_check(a: f64) -> bool {
    pointwise_eig_separation(a) > 1e-8
}

pub fn pointwise_report(a: f64, ell: f64) -> SpectralReport {
    let rho = pointwise_spectral_radius(a);
    SpectralReport {
        system: SystemTag::Pointwise,
        matrix: StabilityMatrix::Pointwise(pointwise_matrix(a)),
        eigenvalues: pointwise_eigs(a).to_vec(),
        spectral_radius: rho,
        stable: pointwise_stable(a),
        predicted_energy_slope: 2.0 * libm::log(rho) / ell,
        conditioning: Some(pointwise_conditioning(a)),
    }
}

/// `kappa = (1 + mu1) / (mu1 - 1)`.
pub fn boundary_kappa(mu1: f64) -> Result<f64> {
    if mu1 == 1.0 {
        return Err(Error::KappaUndefined);
    }
    Ok((1.0 + mu1) / (mu1 - 1.0))
}

/// Transfer matrix over one `4l` period and its non-zero eigenvalue
/// `lambda_2 = kappa (mu2 - 1) - mu2`.
pub fn boundary_matrix(mu1: f64, mu2: f64) -> Result<(Matrix2, f64)> {
    let kappa = boundary_kappa(mu1)?;
    let m = [[kappa * (mu2 - 1.0), -kappa * mu2], [mu2 - 1.0, -mu2]];
    Ok((m, kappa * (mu2 - 1.0) - mu2))
}

/// `|kappa (mu2 - 1) - mu2| < 1`.
pub fn boundary_stable(mu1: f64, mu2: f64) -> Result<bool> {
    Ok(boundary_matrix(mu1, mu2)?.1.abs() < 1.0)
}

/// `1 < mu2 < mu1` or `mu1 < mu2 < 1`.
pub fn boundary_ordering_predicate(mu1: f64, mu2: f64) -> bool {
    (1.0 < mu2 && mu2 < mu1) || (mu1 < mu2 && mu2 < 1.0)
}

/// Predicted slope of `log E_b(t)`: energy scales like `|lambda_2|^2` per `4l`.
pub fn boundary_rate(mu1: f64, mu2: f64, ell: f64) -> Result<f64> {
    let (_, lambda2) = boundary_matrix(mu1, mu2)?;
    Ok(libm::log(lambda2.abs()) / (2.0 * ell))
}

pub fn boundary_report(mu1: f64, mu2: f64, ell: f64) -> Result<SpectralReport> {
    let (m, lambda2) = boundary_matrix(mu1, mu2)?;
    Ok(SpectralReport {
        system: SystemTag::Boundary,
        matrix: StabilityMatrix::Boundary(m),
        eigenvalues: alloc::vec![Complex64::new(0.0, 0.0), Complex64::new(lambda2, 0.0)],
        spectral_radius: lambda2.abs(),
        stable: lambda2.abs() < 1.0,
        predicted_energy_slope: libm::log(lambda2.abs()) / (2.0 * ell),
        conditioning: None,
    })
}

/// Outcome of comparing two stability predicates over a sample set.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RegionReport {
    pub checked: usize,
    pub excluded: usize,
    /// Coordinates where the predicates disagree.
    pub disagreements: Vec<(f64, f64)>,
}

impl RegionReport {
    pub fn agrees(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Compares the spectral test, `rho < 1`, and the interval `0 < a < 2`.
/// Samples within `eps` of 0 or 2 are skipped.
pub fn pointwise_region_check(samples: &[f64], eps: f64) -> RegionReport {
    let mut report = RegionReport::default();
    for &a in samples {
        if a.abs() < eps || (a - 2.0).abs() < eps {
            report.excluded += 1;
            continue;
        }
        report.checked += 1;
        let interval = 0.0 < a && a < 2.0;
        let by_cases = if a * a - 12.0 * a + 4.0 >= 0.0 {
            0.0 < a && a <= 6.0 - 4.0 * core::f64::consts::SQRT_2
        } else {
            6.0 - 4.0 * core::f64::consts::SQRT_2 <= a && a < 2.0
        };
        let spectral = pointwise_stable(a);
        let radius = pointwise_spectral_radius(a) < 1.0;
        if !(interval == spectral && spectral == radius && radius == by_cases) {
            report.disagreements.push((a, 0.0));
        }
    }
    report
}

/// Compares `|lambda_2| < 1` with the ordering predicate on the product grid.
/// Points within `eps` of `mu1 = 1`, `mu2 = 1` or `mu2 = mu1` are skipped.
pub fn boundary_region_check(mu1s: &[f64], mu2s: &[f64], eps: f64) -> RegionReport {
    let mut report = RegionReport::default();
    for &mu1 in mu1s {
        for &mu2 in mu2s {
            if (mu1 - 1.0).abs() < eps || (mu2 - 1.0).abs() < eps || (mu2 - mu1).abs() < eps {
                report.excluded += 1;
                continue;
            }
            report.checked += 1;
            match boundary_stable(mu1, mu2) {
                Ok(s) if s == boundary_ordering_predicate(mu1, mu2) => {}
                _ => report.disagreements.push((mu1, mu2)),
            }
        }
    }
    report
}
