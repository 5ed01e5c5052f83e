//! Linearization of the critical-case system at a constant solution.
//!
//! Writing the order-five recurrence as a map on `(x[n-4], …, x[n])` and
//! differentiating at `(w, …, w)` on the surface `A = 0` gives a companion
//! matrix whose last row is `(p, 0, -p, 1, 0)` with `p = bd/(c+d)²`. It does
//! not depend on `w`. Its characteristic polynomial factors as
//! `(λ² - 1)(λ³ + p)`, so the spectrum is known in closed form.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DIM: usize = 5;

/// Default band around 1 inside which the spectral radius is inconclusive.
pub const DEFAULT_VERDICT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianMatrix {
    p: f64,
    entries: [[f64; DIM]; DIM],
}

impl JacobianMatrix {
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn entries(&self) -> &[[f64; DIM]; DIM] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> [f64; DIM] {
        self.entries[i]
    }

    /// `M·v` over the complex numbers.
    pub fn apply(&self, v: &[Complex64; DIM]) -> [Complex64; DIM] {
        let mut out = [Complex64::new(0.0, 0.0); DIM];
        for (i, row) in self.entries.iter().enumerate() {
            out[i] = row.iter().zip(v).map(|(m, x)| x * *m).sum();
        }
        out
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive {
            name: "p",
            value: p.to_string(),
        })
    }
}

pub fn jacobian(p: f64) -> Result<JacobianMatrix> {
    check_p(p)?;
    let mut entries = [[0.0; DIM]; DIM];
    for (i, row) in entries.iter_mut().take(DIM - 1).enumerate() {
        row[i + 1] = 1.0;
    }
    entries[DIM - 1] = [p, 0.0, -p, 1.0, 0.0];
    Ok(JacobianMatrix { p, entries })
}

/// Coefficients of `(λ² - 1)(λ³ + p)`, constant term first.
pub fn characteristic_polynomial(p: f64) -> [f64; DIM + 1] {
    poly_mul(&[-1.0, 0.0, 1.0], &[p, 0.0, 0.0, 1.0])
        .try_into()
        .expect("degree five")
}

fn poly_mul(lhs: &[f64], rhs: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; lhs.len() + rhs.len() - 1];
    for (i, x) in lhs.iter().enumerate() {
        for (j, y) in rhs.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    Unstable,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Stable => "Stable",
            Verdict::Unstable => "Unstable",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}

/// Radius below 1 means locally stable, above 1 unstable; at 1 the
/// linearization says nothing.
pub fn stability_verdict(radius: f64, tol: f64) -> Verdict {
    if radius < 1.0 - tol {
        Verdict::Stable
    } else if radius > 1.0 + tol {
        Verdict::Unstable
    } else {
        Verdict::Inconclusive
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumReport {
    /// `1, -1, -p^(1/3), p^(1/3)(1 + i√3)/2, p^(1/3)(1 - i√3)/2`.
    pub eigenvalues: [Complex64; DIM],
    pub moduli: [f64; DIM],
    pub spectral_radius: f64,
    pub verdict: Verdict,
}

/// Closed-form roots of `(λ² - 1)(λ³ + p)` with the default verdict band.
pub fn characteristic_roots(p: f64) -> Result<SpectrumReport> {
    characteristic_roots_with_tol(p, DEFAULT_VERDICT_TOL)
}

pub fn characteristic_roots_with_tol(p: f64, tol: f64) -> Result<SpectrumReport> {
    check_p(p)?;
    let r = p.cbrt();
    let half_sqrt3 = 3f64.sqrt() / 2.0;
    // The real cube root of -p is -p^(1/3); the other two are its rotations by ±2π/3.
    let eigenvalues = [
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(-r, 0.0),
        Complex64::new(0.5 * r, half_sqrt3 * r),
        Complex64::new(0.5 * r, -half_sqrt3 * r),
    ];
    let moduli = eigenvalues.map(|z| z.norm());
    let spectral_radius = moduli.iter().cloned().fold(0.0, f64::max);
    Ok(SpectrumReport {
        eigenvalues,
        moduli,
        spectral_radius,
        verdict: stability_verdict(spectral_radius, tol),
    })
}

/// Check every closed-form eigenvalue `λ` of `m` against the matrix itself:
/// with `v = (1, λ, λ², λ³, λ⁴)`, require `‖(m - λI)v‖ ≤ tol·‖v‖`.
pub fn numeric_eigen_check(m: &JacobianMatrix, tol: f64) -> bool {
    let Ok(spectrum) = characteristic_roots(m.p()) else {
        return false;
    };
    spectrum
        .eigenvalues
        .iter()
        .all(|&lambda| eigen_residual(m, lambda) <= tol)
}

/// `‖(m - λI)v‖ / ‖v‖` for the companion eigenvector `v = (1, λ, …, λ⁴)`.
pub fn eigen_residual(m: &JacobianMatrix, lambda: Complex64) -> f64 {
    let mut v = [Complex64::new(1.0, 0.0); DIM];
    for i in 1..DIM {
        v[i] = v[i - 1] * lambda;
    }
    let mv = m.apply(&v);
    let residual: f64 = mv
        .iter()
        .zip(&v)
        .map(|(a, b)| (a - lambda * b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    residual / norm
}
