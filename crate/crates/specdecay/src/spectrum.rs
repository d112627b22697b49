//! Operator spectra, damping regimes, and mode partitions.
//!
//! The equation under study is u_tt + L^theta u_t + L^sigma u = f on a
//! Hilbert space where L is self-adjoint, nonnegative, with discrete spectrum
//! 0 <= lambda_0 < lambda_1 < ... and finite multiplicities. Everything
//! downstream (propagators, traces, rate tables) is diagonal in the
//! eigenbasis, so a spectrum here is just the sorted distinct eigenvalues
//! with multiplicities, plus a record of where it came from.
//!
//! The exponent pair (theta, sigma) fixes the damping regime:
//!
//! * theta = 0                  -> Undamped (frictional damping L^0 = I)
//! * 0 < 2*theta < sigma        -> Effective
//! * 2*theta = sigma, theta > 0 -> Critical
//! * sigma < 2*theta <= 2*sigma -> NonEffective
//!
//! Within a regime, each eigenvalue falls into one of four regions R1..R4
//! according to where the characteristic polynomial's discriminant sits;
//! the comparisons below are regime-specific rescalings of the same
//! discriminant sign test, kept in the form that is numerically stable for
//! extreme eigenvalues.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Default relative tolerance for deciding a mode sits exactly on a
/// partition boundary (region R3).
pub const DEFAULT_PARTITION_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Damping parameters and regimes
// ---------------------------------------------------------------------------

/// Validated exponent pair (theta, sigma).
///
/// Invariants: theta >= 0, sigma > 0, 2*theta <= 2*sigma, both finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DampingParams {
    theta: f64,
    sigma: f64,
}

impl DampingParams {
    pub fn new(theta: f64, sigma: f64) -> Result<Self> {
        if !theta.is_finite() || !sigma.is_finite() {
            return Err(Error::domain(format!(
                "damping exponents must be finite, got theta={theta}, sigma={sigma}"
            )));
        }
        if theta < 0.0 {
            return Err(Error::domain(format!(
                "damping exponent theta must be >= 0, got {theta}"
            )));
        }
        if sigma <= 0.0 {
            return Err(Error::domain(format!(
                "stiffness exponent sigma must be > 0, got {sigma}"
            )));
        }
        if 2.0 * theta > 2.0 * sigma {
            return Err(Error::domain(format!(
                "admissible exponents require 2*theta <= 2*sigma, got theta={theta}, sigma={sigma}"
            )));
        }
        Ok(DampingParams { theta, sigma })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Damping regime determined by (theta, sigma). Total and mutually exclusive
/// on admissible parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Undamped,
    Effective,
    Critical,
    NonEffective,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::Undamped => "Undamped",
            Regime::Effective => "Effective",
            Regime::Critical => "Critical",
            Regime::NonEffective => "NonEffective",
        };
        f.write_str(s)
    }
}

/// Classify admissible parameters into their regime.
pub fn classify_regime(params: &DampingParams) -> Regime {
    let two_theta = 2.0 * params.theta;
    if params.theta == 0.0 {
        Regime::Undamped
    } else if two_theta < params.sigma {
        Regime::Effective
    } else if two_theta == params.sigma {
        Regime::Critical
    } else {
        // sigma < 2*theta <= 2*sigma, guaranteed by DampingParams::new.
        Regime::NonEffective
    }
}

// ---------------------------------------------------------------------------
// Spectrum
// ---------------------------------------------------------------------------

/// Where a spectrum came from; kept for reporting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SpectrumSource {
    Torus1d { n: u32 },
    Harmonic { n: u32 },
    Landau { field: f64, n: u32, multiplicity: u32 },
    List,
    File { path: String },
}

impl fmt::Display for SpectrumSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectrumSource::Torus1d { n } => write!(f, "torus_1d({n})"),
            SpectrumSource::Harmonic { n } => write!(f, "harmonic({n})"),
            SpectrumSource::Landau {
                field,
                n,
                multiplicity,
            } => write!(f, "landau(b={field}, n={n}, mult={multiplicity})"),
            SpectrumSource::List => write!(f, "list"),
            SpectrumSource::File { path } => write!(f, "file({path})"),
        }
    }
}

/// Sorted distinct eigenvalues with multiplicities.
///
/// Invariants: eigenvalues strictly increasing, all >= 0 and finite;
/// multiplicities all >= 1; the two vectors have equal length >= 1.
///
/// "Slots" index the eigenvalues *with* multiplicity: a spectrum with
/// eigenvalues [0, 1] and multiplicities [1, 2] has three slots, mapping to
/// eigenvalues 0, 1, 1 in order. Coefficient vectors live on slots.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    multiplicities: Vec<u32>,
    source: SpectrumSource,
}

impl Spectrum {
    fn validated(
        eigenvalues: Vec<f64>,
        multiplicities: Vec<u32>,
        source: SpectrumSource,
    ) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::domain("spectrum must contain at least one eigenvalue"));
        }
        debug_assert_eq!(eigenvalues.len(), multiplicities.len());
        for (i, &lam) in eigenvalues.iter().enumerate() {
            if !lam.is_finite() || lam < 0.0 {
                return Err(Error::domain(format!(
                    "eigenvalues must be finite and >= 0, got {lam} at index {i}"
                )));
            }
            if i > 0 && lam <= eigenvalues[i - 1] {
                return Err(Error::domain(format!(
                    "eigenvalues must be strictly increasing after deduplication \
                     ({} then {lam})",
                    eigenvalues[i - 1]
                )));
            }
        }
        if multiplicities.iter().any(|&m| m == 0) {
            return Err(Error::domain("multiplicities must be >= 1"));
        }
        Ok(Spectrum {
            eigenvalues,
            multiplicities,
            source,
        })
    }

    /// Laplacian on the 1-d torus, modes |k| <= n: eigenvalues k^2, so 0 with
    /// multiplicity 1 and k^2 with multiplicity 2 (cos and sin) for k >= 1.
    pub fn torus_1d(n: u32) -> Self {
        let mut eigenvalues = vec![0.0];
        let mut multiplicities = vec![1];
        for k in 1..=n {
            eigenvalues.push((k as f64) * (k as f64));
            multiplicities.push(2);
        }
        Spectrum {
            eigenvalues,
            multiplicities,
            source: SpectrumSource::Torus1d { n },
        }
    }

    /// Harmonic oscillator in 1-d: eigenvalues 2j + 1 for j = 0..=n, each
    /// simple.
    pub fn harmonic(n: u32) -> Self {
        let eigenvalues = (0..=n).map(|j| 2.0 * j as f64 + 1.0).collect();
        let multiplicities = vec![1; n as usize + 1];
        Spectrum {
            eigenvalues,
            multiplicities,
            source: SpectrumSource::Harmonic { n },
        }
    }

    /// Landau levels: eigenvalues b*(2j + 1) for j = 0..=n with a uniform
    /// (finite, truncated) multiplicity. Field strength b must be positive.
    pub fn landau(field: f64, n: u32, multiplicity: u32) -> Result<Self> {
        if !field.is_finite() || field <= 0.0 {
            return Err(Error::domain(format!(
                "landau field strength must be > 0, got {field}"
            )));
        }
        if multiplicity == 0 {
            return Err(Error::domain("landau multiplicity must be >= 1"));
        }
        let eigenvalues = (0..=n).map(|j| field * (2.0 * j as f64 + 1.0)).collect();
        let multiplicities = vec![multiplicity; n as usize + 1];
        Spectrum::validated(
            eigenvalues,
            multiplicities,
            SpectrumSource::Landau {
                field,
                n,
                multiplicity,
            },
        )
    }

    /// Explicit eigenvalue list. Values are sorted; exact duplicates merge
    /// into multiplicity. Rejects empty input, negatives, non-finite values.
    pub fn from_list(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("eigenvalue list must not be empty"));
        }
        for &v in values {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::domain(format!(
                    "eigenvalues must be finite and >= 0, got {v}"
                )));
            }
        }
        let mut sorted: Vec<f64> = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values compare"));
        let mut eigenvalues: Vec<f64> = Vec::new();
        let mut multiplicities: Vec<u32> = Vec::new();
        for v in sorted {
            match eigenvalues.last() {
                Some(&last) if last == v => *multiplicities.last_mut().expect("nonempty") += 1,
                _ => {
                    eigenvalues.push(v);
                    multiplicities.push(1);
                }
            }
        }
        Spectrum::validated(eigenvalues, multiplicities, SpectrumSource::List)
    }

    /// Read one eigenvalue per line from a text file. Blank lines and lines
    /// starting with '#' are skipped; duplicates merge as in `from_list`.
    pub fn from_file(path: &str) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let v: f64 = trimmed.parse().map_err(|_| {
                Error::domain(format!(
                    "{path}:{}: cannot parse eigenvalue from {trimmed:?}",
                    lineno + 1
                ))
            })?;
            values.push(v);
        }
        let mut spec = Spectrum::from_list(&values)?;
        spec.source = SpectrumSource::File {
            path: path.to_string(),
        };
        Ok(spec)
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicities
    }

    pub fn source(&self) -> &SpectrumSource {
        &self.source
    }

    /// Number of distinct eigenvalues.
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        false // validated spectra are never empty
    }

    /// Number of slots (eigenvalues counted with multiplicity).
    pub fn total_multiplicity(&self) -> usize {
        self.multiplicities.iter().map(|&m| m as usize).sum()
    }

    /// Eigenvalue of slot `i` (0-based, slots ordered by eigenvalue).
    pub fn slot_eigenvalue(&self, slot: usize) -> f64 {
        let mut rem = slot;
        for (lam, &m) in self.eigenvalues.iter().zip(&self.multiplicities) {
            if rem < m as usize {
                return *lam;
            }
            rem -= m as usize;
        }
        panic!(
            "slot {slot} out of range for spectrum with {} slots",
            self.total_multiplicity()
        );
    }

    /// Index of the distinct eigenvalue owning slot `i`.
    pub fn slot_eigen_index(&self, slot: usize) -> usize {
        let mut rem = slot;
        for (idx, &m) in self.multiplicities.iter().enumerate() {
            if rem < m as usize {
                return idx;
            }
            rem -= m as usize;
        }
        panic!(
            "slot {slot} out of range for spectrum with {} slots",
            self.total_multiplicity()
        );
    }

    /// Slot range (half-open) of the distinct eigenvalue at `index`.
    pub fn eigen_slot_range(&self, index: usize) -> std::ops::Range<usize> {
        let start: usize = self.multiplicities[..index]
            .iter()
            .map(|&m| m as usize)
            .sum();
        start..start + self.multiplicities[index] as usize
    }

    pub fn has_zero_mode(&self) -> bool {
        self.eigenvalues[0] == 0.0
    }

    /// Smallest strictly positive eigenvalue, if any.
    pub fn min_positive(&self) -> Option<f64> {
        self.eigenvalues.iter().copied().find(|&l| l > 0.0)
    }
}

/// Declarative recipe for building a spectrum; the deserialization target
/// for config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectrumSpec {
    #[serde(rename = "torus_1d")]
    Torus1d { n: i64 },
    Harmonic { n: i64 },
    Landau { field: f64, n: i64, multiplicity: i64 },
    List { values: Vec<f64> },
    File { path: String },
}

/// Build a spectrum from its recipe, validating counts (negative n is a
/// domain error, not a panic, because it can arrive from config files).
pub fn build_spectrum(spec: &SpectrumSpec) -> Result<Spectrum> {
    fn checked_n(n: i64, what: &str) -> Result<u32> {
        if n < 0 {
            return Err(Error::domain(format!("{what} requires n >= 0, got {n}")));
        }
        u32::try_from(n).map_err(|_| Error::domain(format!("{what}: n = {n} too large")))
    }
    match spec {
        SpectrumSpec::Torus1d { n } => Ok(Spectrum::torus_1d(checked_n(*n, "torus_1d")?)),
        SpectrumSpec::Harmonic { n } => Ok(Spectrum::harmonic(checked_n(*n, "harmonic")?)),
        SpectrumSpec::Landau {
            field,
            n,
            multiplicity,
        } => {
            let n = checked_n(*n, "landau")?;
            if *multiplicity < 1 {
                return Err(Error::domain(format!(
                    "landau multiplicity must be >= 1, got {multiplicity}"
                )));
            }
            let m = u32::try_from(*multiplicity)
                .map_err(|_| Error::domain("landau multiplicity too large"))?;
            Spectrum::landau(*field, n, m)
        }
        SpectrumSpec::List { values } => Spectrum::from_list(values),
        SpectrumSpec::File { path } => Spectrum::from_file(path),
    }
}

// ---------------------------------------------------------------------------
// Mode partition
// ---------------------------------------------------------------------------

/// Discriminant region of a single mode.
///
/// R1: lambda = 0. R2/R4: the two open discriminant-sign regions, oriented
/// per regime so that R2 is always the region adjacent to lambda -> 0+ and
/// R4 the region reached as lambda -> infinity. R3: the boundary (double
/// root), detected within a relative tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    R1,
    R2,
    R3,
    R4,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Region::R1 => "R1",
            Region::R2 => "R2",
            Region::R3 => "R3",
            Region::R4 => "R4",
        };
        f.write_str(s)
    }
}

/// Partition of a spectrum's distinct eigenvalues into regions.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionPartition {
    pub regime: Regime,
    /// One label per distinct eigenvalue, same order as the spectrum.
    pub labels: Vec<Region>,
    /// Relative tolerance used for the R3 boundary test.
    pub boundary_tol: f64,
}

impl RegionPartition {
    /// Slot counts per region (multiplicity-weighted), in order R1..R4.
    pub fn slot_counts(&self, spectrum: &Spectrum) -> [usize; 4] {
        let mut counts = [0usize; 4];
        for (label, &m) in self.labels.iter().zip(spectrum.multiplicities()) {
            let idx = match label {
                Region::R1 => 0,
                Region::R2 => 1,
                Region::R3 => 2,
                Region::R4 => 3,
            };
            counts[idx] += m as usize;
        }
        counts
    }

    /// Distinct-eigenvalue counts per region, in order R1..R4.
    pub fn eigen_counts(&self) -> [usize; 4] {
        let mut counts = [0usize; 4];
        for label in &self.labels {
            let idx = match label {
                Region::R1 => 0,
                Region::R2 => 1,
                Region::R3 => 2,
                Region::R4 => 3,
            };
            counts[idx] += 1;
        }
        counts
    }
}

/// Partition every distinct eigenvalue into its region.
///
/// `boundary_tol` is the relative tolerance for the R3 equality test and must
/// lie in (0, 1e-6]. The comparisons are:
///
/// * Undamped:      lambda^sigma             vs 1/4 (R2 below, R4 above)
/// * Effective:     lambda^(sigma - 2 theta) vs 1/4 (R2 below, R4 above)
/// * Critical:      lambda > 0 is always R2 (discriminant strictly negative)
/// * NonEffective:  lambda^(2 theta - sigma) vs 4   (R2 below, R4 above)
///
/// In the first two regimes R2 modes have real distinct roots and R4 modes
/// oscillate; in the non-effective regime the orientation flips (small
/// eigenvalues oscillate, large ones overdamp). lambda = 0 is always R1.
pub fn partition_modes(
    spectrum: &Spectrum,
    params: &DampingParams,
    boundary_tol: f64,
) -> Result<RegionPartition> {
    if !(boundary_tol > 0.0 && boundary_tol <= 1e-6) {
        return Err(Error::domain(format!(
            "partition boundary tolerance must lie in (0, 1e-6], got {boundary_tol}"
        )));
    }
    let regime = classify_regime(params);
    let labels = spectrum
        .eigenvalues()
        .iter()
        .map(|&lam| label_mode(lam, params, regime, boundary_tol))
        .collect();
    Ok(RegionPartition {
        regime,
        labels,
        boundary_tol,
    })
}

fn label_mode(lambda: f64, params: &DampingParams, regime: Regime, tol: f64) -> Region {
    if lambda == 0.0 {
        return Region::R1;
    }
    let (value, threshold) = match regime {
        Regime::Undamped => (lambda.powf(params.sigma()), 0.25),
        Regime::Effective => (lambda.powf(params.sigma() - 2.0 * params.theta()), 0.25),
        Regime::Critical => return Region::R2,
        Regime::NonEffective => (lambda.powf(2.0 * params.theta() - params.sigma()), 4.0),
    };
    if (value - threshold).abs() <= tol * threshold {
        Region::R3
    } else if value < threshold {
        Region::R2
    } else {
        Region::R4
    }
}

// ---------------------------------------------------------------------------
// Spectral gap
// ---------------------------------------------------------------------------

/// (smallest positive eigenvalue if any, minimum separation between distinct
/// eigenvalues; +infinity when fewer than two distinct eigenvalues).
pub fn spectral_gap(spectrum: &Spectrum) -> (Option<f64>, f64) {
    let eigs = spectrum.eigenvalues();
    let min_positive = spectrum.min_positive();
    let min_separation = eigs
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    (min_positive, min_separation)
}

/// Shared handle used by coefficient vectors; spectra are immutable once
/// built, so cloning the Arc is cheap and identity comparisons are by value.
pub type SharedSpectrum = Arc<Spectrum>;

#[cfg(test)]
mod tests {
    use super::*;

    fn params(theta: f64, sigma: f64) -> DampingParams {
        DampingParams::new(theta, sigma).unwrap()
    }

    #[test]
    fn regime_worked_examples() {
        assert_eq!(classify_regime(&params(0.0, 2.0)), Regime::Undamped);
        assert_eq!(classify_regime(&params(1.0, 2.0)), Regime::Critical);
        assert_eq!(classify_regime(&params(2.0, 3.0)), Regime::NonEffective);
        assert_eq!(classify_regime(&params(1.0, 4.0)), Regime::Effective);
        assert_eq!(classify_regime(&params(3.0, 3.0)), Regime::NonEffective);
    }

    #[test]
    fn inadmissible_exponents_rejected() {
        assert!(DampingParams::new(2.0, 1.0).is_err()); // 2*theta > 2*sigma
        assert!(DampingParams::new(-0.5, 1.0).is_err());
        assert!(DampingParams::new(0.0, 0.0).is_err());
        assert!(DampingParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn torus_spectrum_layout() {
        let s = Spectrum::torus_1d(2);
        assert_eq!(s.eigenvalues(), &[0.0, 1.0, 4.0]);
        assert_eq!(s.multiplicities(), &[1, 2, 2]);
        assert_eq!(s.total_multiplicity(), 5);
        assert_eq!(s.slot_eigenvalue(0), 0.0);
        assert_eq!(s.slot_eigenvalue(1), 1.0);
        assert_eq!(s.slot_eigenvalue(2), 1.0);
        assert_eq!(s.slot_eigenvalue(3), 4.0);
        assert_eq!(s.slot_eigenvalue(4), 4.0);
        assert_eq!(s.slot_eigen_index(4), 2);
        assert_eq!(s.eigen_slot_range(1), 1..3);
    }

    #[test]
    fn harmonic_spectrum_layout() {
        let s = Spectrum::harmonic(3);
        assert_eq!(s.eigenvalues(), &[1.0, 3.0, 5.0, 7.0]);
        assert_eq!(s.multiplicities(), &[1, 1, 1, 1]);
        assert!(!s.has_zero_mode());
    }

    #[test]
    fn list_spectrum_merges_duplicates() {
        let s = Spectrum::from_list(&[2.0, 2.0, 5.0]).unwrap();
        assert_eq!(s.eigenvalues(), &[2.0, 5.0]);
        assert_eq!(s.multiplicities(), &[2, 1]);
    }

    #[test]
    fn list_spectrum_rejects_bad_input() {
        assert!(Spectrum::from_list(&[]).is_err());
        assert!(Spectrum::from_list(&[-1.0]).is_err());
        assert!(Spectrum::from_list(&[f64::INFINITY]).is_err());
    }

    #[test]
    fn build_spectrum_rejects_negative_n() {
        assert!(build_spectrum(&SpectrumSpec::Torus1d { n: -1 }).is_err());
        assert!(build_spectrum(&SpectrumSpec::Harmonic { n: -3 }).is_err());
    }

    #[test]
    fn landau_scaling() {
        let s = Spectrum::landau(0.5, 2, 3).unwrap();
        assert_eq!(s.eigenvalues(), &[0.5, 1.5, 2.5]);
        assert_eq!(s.multiplicities(), &[3, 3, 3]);
        assert!(Spectrum::landau(0.0, 2, 3).is_err());
        assert!(Spectrum::landau(1.0, 2, 0).is_err());
    }

    #[test]
    fn partition_effective_example() {
        // theta = 1, sigma = 4: boundary at lambda^2 = 1/4, i.e. lambda = 1/2.
        let p = params(1.0, 4.0);
        let s = Spectrum::from_list(&[0.0, 0.25, 0.5, 1.0]).unwrap();
        let part = partition_modes(&s, &p, DEFAULT_PARTITION_TOL).unwrap();
        assert_eq!(
            part.labels,
            vec![Region::R1, Region::R2, Region::R3, Region::R4]
        );
    }

    #[test]
    fn partition_noneffective_orientation() {
        // theta = 2, sigma = 3: comparison lambda^(4-3) = lambda vs 4.
        // Small positive eigenvalues oscillate (R2); above 4 overdamped (R4).
        let p = params(2.0, 3.0);
        let s = Spectrum::from_list(&[1.0, 4.0, 9.0]).unwrap();
        let part = partition_modes(&s, &p, DEFAULT_PARTITION_TOL).unwrap();
        assert_eq!(part.labels, vec![Region::R2, Region::R3, Region::R4]);
    }

    #[test]
    fn partition_critical_all_r2() {
        let p = params(1.0, 2.0);
        let s = Spectrum::torus_1d(3);
        let part = partition_modes(&s, &p, DEFAULT_PARTITION_TOL).unwrap();
        assert_eq!(part.labels[0], Region::R1);
        assert!(part.labels[1..].iter().all(|&r| r == Region::R2));
    }

    #[test]
    fn partition_tolerance_validation() {
        let p = params(1.0, 2.0);
        let s = Spectrum::torus_1d(1);
        assert!(partition_modes(&s, &p, 0.0).is_err());
        assert!(partition_modes(&s, &p, 1e-5).is_err());
        assert!(partition_modes(&s, &p, 1e-7).is_ok());
    }

    #[test]
    fn gap_worked_examples() {
        let s = Spectrum::from_list(&[0.0, 1.0, 4.0]).unwrap();
        assert_eq!(spectral_gap(&s), (Some(1.0), 1.0));
        let s = Spectrum::from_list(&[0.0]).unwrap();
        assert_eq!(spectral_gap(&s), (None, f64::INFINITY));
        let s = Spectrum::from_list(&[2.0, 5.0]).unwrap();
        assert_eq!(spectral_gap(&s), (Some(2.0), 3.0));
    }
}
