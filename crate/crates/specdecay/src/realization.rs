//! Pointwise realization of torus spectra on a spatial grid.
//!
//! A coefficient vector is abstract until a basis gives it point values.
//! For the 1-d torus Laplacian the eigenbasis is explicit: the constant
//! 1/sqrt(2 pi), then cos(k x)/sqrt(pi) and sin(k x)/sqrt(pi) for each
//! frequency k, which are exactly orthonormal under the uniform quadrature
//! weight 2 pi / M on M equispaced points as long as M >= 2N + 1 (discrete
//! orthogonality of trigonometric polynomials). The slot order matches
//! `Spectrum::torus_1d`: eigenvalue k^2 owns two consecutive slots, cosine
//! first.
//!
//! Transforms are direct O(N M) matrix products; spectra here are small and
//! the explicit basis keeps the slot layout auditable. Pointwise powers of
//! band-limited functions spread to higher frequencies; exactness of the
//! round trip through a degree-p nonlinearity needs M >= p N + 1 (the
//! product is a trig polynomial of degree p N). With the default M >= 2N + 1
//! the truncation acts as a spectral cutoff, which is the usual Galerkin
//! treatment.

use crate::error::{Error, Result};
use crate::evolution::CoefficientVector;
use crate::spectrum::{SharedSpectrum, Spectrum};
use std::f64::consts::PI;
use std::sync::Arc;

/// Orthonormal basis sampled on a uniform spatial grid.
#[derive(Debug, Clone)]
pub struct GridRealization {
    spectrum: SharedSpectrum,
    /// Sample positions x_j = 2 pi j / M.
    points: Vec<f64>,
    /// Row `slot` holds the basis function of that slot at every point.
    basis: Vec<Vec<f64>>,
    /// Quadrature weight 2 pi / M.
    weight: f64,
    /// Highest resolved frequency.
    n_max: u32,
}

/// Build the torus realization for frequencies |k| <= n on m grid points.
///
/// Requires m >= 2n + 1; with fewer points distinct basis functions alias
/// onto each other and the discrete inner products are wrong.
pub fn torus_realization(n: u32, m: usize) -> Result<GridRealization> {
    if m < 2 * n as usize + 1 {
        return Err(Error::domain(format!(
            "aliasing error: {m} grid points cannot resolve frequencies up to {n} \
             (need m >= {})",
            2 * n as usize + 1
        )));
    }
    let spectrum = Arc::new(Spectrum::torus_1d(n));
    let points: Vec<f64> = (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).collect();
    let mut basis = Vec::with_capacity(spectrum.total_multiplicity());
    // Slot 0: constant mode.
    basis.push(vec![1.0 / (2.0 * PI).sqrt(); m]);
    for k in 1..=n {
        let c: Vec<f64> = points.iter().map(|&x| (k as f64 * x).cos() / PI.sqrt()).collect();
        let s: Vec<f64> = points.iter().map(|&x| (k as f64 * x).sin() / PI.sqrt()).collect();
        basis.push(c);
        basis.push(s);
    }
    Ok(GridRealization {
        spectrum,
        points,
        basis,
        weight: 2.0 * PI / m as f64,
        n_max: n,
    })
}

impl GridRealization {
    pub fn spectrum(&self) -> &SharedSpectrum {
        &self.spectrum
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn matches_spectrum(&self, other: &SharedSpectrum) -> bool {
        Arc::ptr_eq(&self.spectrum, other) || *self.spectrum == **other
    }

    /// Project point values onto the basis: u_hat_i = w * sum_j f(x_j) B_i(x_j).
    pub fn forward_transform(&self, values: &[f64]) -> Result<CoefficientVector> {
        if values.len() != self.points.len() {
            return Err(Error::domain(format!(
                "expected {} point values, got {}",
                self.points.len(),
                values.len()
            )));
        }
        let coeffs: Vec<f64> = self
            .basis
            .iter()
            .map(|row| self.weight * row.iter().zip(values).map(|(b, v)| b * v).sum::<f64>())
            .collect();
        CoefficientVector::new(self.spectrum.clone(), coeffs)
    }

    /// Evaluate a coefficient vector at the grid points:
    /// f(x_j) = sum_i u_hat_i B_i(x_j).
    pub fn inverse_transform(&self, coeffs: &CoefficientVector) -> Result<Vec<f64>> {
        if !self.matches_spectrum(coeffs.spectrum()) {
            return Err(Error::domain(
                "coefficient vector was built for a different spectrum",
            ));
        }
        let mut out = vec![0.0; self.points.len()];
        for (row, &c) in self.basis.iter().zip(coeffs.values()) {
            if c != 0.0 {
                for (o, b) in out.iter_mut().zip(row) {
                    *o += c * b;
                }
            }
        }
        Ok(out)
    }

    /// Quadrature L2 norm of point values: (w * sum f^2)^(1/2). Equals the
    /// coefficient norm exactly for band-limited functions (Plancherel).
    pub fn quadrature_norm(&self, values: &[f64]) -> f64 {
        (self.weight * values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }
}

/// mu * |u|^{p-1} u applied at each point; p > 1 keeps it differentiable at 0.
pub fn apply_pointwise_power(values: &[f64], p: f64, mu: f64) -> Result<Vec<f64>> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::domain(format!(
            "pointwise power requires p > 1, got {p}"
        )));
    }
    if !mu.is_finite() {
        return Err(Error::domain(format!(
            "nonlinearity strength must be finite, got {mu}"
        )));
    }
    Ok(values.iter().map(|&v| mu * v.abs().powf(p - 1.0) * v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        let scale = a.abs().max(b.abs()).max(1e-300);
        (a - b).abs() <= tol * scale
    }

    #[test]
    fn layout_worked_examples() {
        // n=0, m=4: single constant row.
        let r = torus_realization(0, 4).unwrap();
        assert_eq!(r.basis.len(), 1);
        assert_eq!(r.points().len(), 4);
        // n=2, m=8: 5 rows (1 + 2 + 2).
        let r = torus_realization(2, 8).unwrap();
        assert_eq!(r.basis.len(), 5);
        // n=2, m=4: aliasing.
        let err = torus_realization(2, 4).unwrap_err();
        assert!(err.to_string().contains("aliasing"), "{err}");
    }

    #[test]
    fn discrete_orthonormality() {
        let r = torus_realization(2, 8).unwrap();
        for i in 0..r.basis.len() {
            for j in 0..r.basis.len() {
                let dot: f64 = r.weight
                    * r.basis[i]
                        .iter()
                        .zip(&r.basis[j])
                        .map(|(a, b)| a * b)
                        .sum::<f64>();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (dot - expected).abs() <= 1e-12,
                    "gram[{i}][{j}] = {dot}"
                );
            }
        }
    }

    #[test]
    fn constant_function_forward_transform() {
        // f(x) = c everywhere projects to c*sqrt(2 pi) on the constant slot.
        let r = torus_realization(2, 16).unwrap();
        let c = 1.7;
        let coeffs = r.forward_transform(&vec![c; 16]).unwrap();
        assert!(rel_close(coeffs.values()[0], c * (2.0 * PI).sqrt(), 1e-13));
        for &v in &coeffs.values()[1..] {
            assert!(v.abs() <= 1e-13, "{v}");
        }
    }

    #[test]
    fn round_trip_band_limited() {
        let r = torus_realization(3, 16).unwrap();
        let coeffs = CoefficientVector::new(
            r.spectrum().clone(),
            vec![0.5, -1.0, 0.25, 0.0, 2.0, 1.0, -0.5],
        )
        .unwrap();
        let values = r.inverse_transform(&coeffs).unwrap();
        let back = r.forward_transform(&values).unwrap();
        for (a, b) in coeffs.values().iter().zip(back.values()) {
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
        // Plancherel: quadrature norm equals coefficient norm.
        assert!(rel_close(r.quadrature_norm(&values), coeffs.norm_h(), 1e-12));
    }

    #[test]
    fn eigenfunction_relation() {
        // -d2/dx2 cos(kx) = k^2 cos(kx): finite differences on the grid
        // should recover the eigenvalue for resolved frequencies.
        let r = torus_realization(2, 64).unwrap();
        let k = 2.0f64;
        let vals: Vec<f64> = r.points().iter().map(|&x| (k * x).cos()).collect();
        let m = vals.len();
        let h = 2.0 * PI / m as f64;
        // Central second difference at a few interior points.
        for j in [5usize, 20, 40] {
            let lap = (vals[(j + 1) % m] - 2.0 * vals[j] + vals[(j + m - 1) % m]) / (h * h);
            assert!(
                rel_close(-lap, k * k * vals[j], 2e-2) || vals[j].abs() < 0.1,
                "j={j}"
            );
        }
    }

    #[test]
    fn pointwise_power_examples() {
        // p=3, mu=1, u=2 -> 8; p=2, mu=-1, u=-3 -> 9.
        assert_eq!(apply_pointwise_power(&[2.0], 3.0, 1.0).unwrap()[0], 8.0);
        assert_eq!(apply_pointwise_power(&[-3.0], 2.0, -1.0).unwrap()[0], 9.0);
        assert!(apply_pointwise_power(&[1.0], 1.0, 1.0).is_err());
        assert!(apply_pointwise_power(&[1.0], 0.5, 1.0).is_err());
    }

    #[test]
    fn pointwise_power_preserves_oddness() {
        let vals = [-2.0, -0.5, 0.0, 0.5, 2.0];
        let out = apply_pointwise_power(&vals, 3.0, 1.0).unwrap();
        assert_eq!(out, vec![-8.0, -0.125, 0.0, 0.125, 8.0]);
    }
}
