//! Scale-invariant spectral functionals and the experiments built on them.
//!
//! A functional is `E_k(μ, Ω) = |Ω|^α |Γ|^β σ_k(μ / (|Ω|^γ |Γ|^δ), Ω)` with
//! `2α + β = 1` and `2γ + δ = 1`, which makes it invariant under dilations
//! of `Ω`. Two instances get names: `F_k` (area-scaled wavenumber,
//! perimeter-scaled eigenvalue) and `G_k` (both scaled by perimeter).

use std::f64::consts::{PI, SQRT_2};
use std::path::Path;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discretization::DiscParams;
use crate::eigensolver::{solve_biomod, SolverOptions, Spectrum};
use crate::error::{Error, Result};
use crate::geometry::{make_named_shape, BoundaryCurve, NamedShape};
use crate::io::fmt17;
use crate::special_fn::bessel_zero;

const CONSTRAINT_TOL: f64 = 1e-12;

/// Exponents and eigenvalue index of a scale-invariant functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct FunctionalSpec {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    k: usize,
}

#[derive(Deserialize)]
struct RawSpec {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    k: usize,
}

impl TryFrom<RawSpec> for FunctionalSpec {
    type Error = Error;
    fn try_from(r: RawSpec) -> Result<Self> {
        FunctionalSpec::new(r.alpha, r.beta, r.gamma, r.delta, r.k)
    }
}

impl FunctionalSpec {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("eigenvalue index k is 1-based".into()));
        }
        if ![alpha, beta, gamma, delta].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("functional exponents must be finite".into()));
        }
        if (2.0 * alpha + beta - 1.0).abs() > CONSTRAINT_TOL {
            return Err(Error::InvalidParameter(format!(
                "2α + β must equal 1, got α = {alpha}, β = {beta}"
            )));
        }
        if (2.0 * gamma + delta - 1.0).abs() > CONSTRAINT_TOL {
            return Err(Error::InvalidParameter(format!(
                "2γ + δ must equal 1, got γ = {gamma}, δ = {delta}"
            )));
        }
        Ok(FunctionalSpec { alpha, beta, gamma, delta, k })
    }

    /// `F_k(μ, Ω) = |Γ| σ_k(μ / √|Ω|, Ω)`.
    pub fn f(k: usize) -> Result<Self> {
        Self::new(0.0, 1.0, 0.5, 0.0, k)
    }

    /// `G_k(μ, Ω) = |Γ| σ_k(μ / |Γ|, Ω)`.
    pub fn g(k: usize) -> Result<Self> {
        Self::new(0.0, 1.0, 0.0, 1.0, k)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn k(&self) -> usize {
        self.k
    }

    /// Same exponents, different index.
    pub fn with_k(&self, k: usize) -> Result<Self> {
        Self::new(self.alpha, self.beta, self.gamma, self.delta, k)
    }

    fn is_f(&self) -> bool {
        self.alpha == 0.0 && self.beta == 1.0 && self.gamma == 0.5 && self.delta == 0.0
    }

    /// Wavenumber below which the scaled wavenumber stays under the first
    /// Dirichlet eigenvalue of every shape, when such a bound is known.
    ///
    /// For `F_k` the scaled problem has unit area, and by Faber–Krahn the
    /// unit-area disk has the smallest first Dirichlet eigenvalue, so the
    /// window is `μ < j₀,₁ √π ≈ 4.2624`.
    pub fn admissible_mu_limit(&self) -> Option<f64> {
        self.is_f().then(|| bessel_zero(0, 1) * PI.sqrt())
    }

    /// Scaled wavenumber `μ / (|Ω|^γ |Γ|^δ)`.
    pub fn scaled_mu(&self, mu: f64, area: f64, perimeter: f64) -> f64 {
        mu / (area.powf(self.gamma) * perimeter.powf(self.delta))
    }

    /// Eigenvalue prefactor `|Ω|^α |Γ|^β`.
    pub fn prefactor(&self, area: f64, perimeter: f64) -> f64 {
        area.powf(self.alpha) * perimeter.powf(self.beta)
    }
}

/// Resolution and solver options for every solve a functional needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct SolverSetup {
    pub disc: DiscParams,
    pub opts: SolverOptions,
}

impl SolverSetup {
    pub fn new(n: usize, p: u32) -> Self {
        SolverSetup { disc: DiscParams::new(n, p), opts: SolverOptions::default() }
    }
}

/// Functional value together with the solve behind it.
#[derive(Debug, Clone)]
pub struct FunctionalValue {
    pub value: f64,
    pub scaled_mu: f64,
    pub spectrum: Spectrum,
}

/// Evaluates `E_k(μ, Ω)` with a BIO-MOD solve at the scaled wavenumber.
pub fn evaluate_functional(spec: &FunctionalSpec, curve: &BoundaryCurve, mu: f64, setup: &SolverSetup) -> Result<f64> {
    evaluate_functional_full(spec, curve, mu, setup).map(|v| v.value)
}

/// [`evaluate_functional`] keeping the spectrum.
pub fn evaluate_functional_full(
    spec: &FunctionalSpec,
    curve: &BoundaryCurve,
    mu: f64,
    setup: &SolverSetup,
) -> Result<FunctionalValue> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::InvalidParameter(format!("wavenumber must be finite and ≥ 0, got {mu}")));
    }
    if let Some(limit) = spec.admissible_mu_limit() {
        if mu >= limit {
            warn!("μ = {mu} lies outside the admissible window (0, {limit:.4}) for this functional");
        }
    }
    let area = curve.area();
    let perimeter = curve.perimeter();
    let scaled_mu = spec.scaled_mu(mu, area, perimeter);
    let spectrum = solve_biomod(curve, &setup.disc, scaled_mu, &setup.opts)?;
    let k = spec.k;
    let sigma = *spectrum.eigenvalues.get(k - 1).ok_or_else(|| Error::Eigenpair {
        index: k - 1,
        reason: format!("only {} eigenvalues computed", spectrum.eigenvalues.len()),
    })?;
    if sigma == f64::NEG_INFINITY {
        return Err(Error::Sentinel { k, mu: scaled_mu });
    }
    Ok(FunctionalValue { value: spec.prefactor(area, perimeter) * sigma, scaled_mu, spectrum })
}

/// Upper bound `−μ² |Ω|^{α−2γ+1} |Γ|^{β−2δ−1}` on `E_1`, valid while the
/// scaled wavenumber stays below the first Dirichlet eigenvalue.
pub fn f1_upper_bound(spec: &FunctionalSpec, curve: &BoundaryCurve, mu: f64) -> f64 {
    let area = curve.area();
    let perimeter = curve.perimeter();
    -mu * mu
        * area.powf(spec.alpha - 2.0 * spec.gamma + 1.0)
        * perimeter.powf(spec.beta - 2.0 * spec.delta - 1.0)
}

/// Shapes with known Steklov–Laplace quasimodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuasimodeShape {
    /// Unit square.
    Square,
    /// Right isosceles triangle with legs 1.
    IsoscelesTriangle,
}

impl QuasimodeShape {
    pub fn curve(&self) -> Result<BoundaryCurve> {
        make_named_shape(&match self {
            QuasimodeShape::Square => NamedShape::Square { side: 1.0 },
            QuasimodeShape::IsoscelesTriangle => NamedShape::IsoscelesTriangle,
        })
    }
}

/// First `count` quasimodes in ascending order, multiplicities expanded.
pub fn quasimodes(shape: QuasimodeShape, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count + 4);
    match shape {
        QuasimodeShape::Square => {
            let mut k = 1;
            while out.len() < count {
                out.extend([(k as f64 - 0.5) * PI; 4]);
                k += 1;
            }
        }
        QuasimodeShape::IsoscelesTriangle => {
            // the (k−½)π/√2 branch alone supplies `count` values, so every
            // value beyond k = count lies above the count-th smallest
            for k in 1..=count {
                out.extend([PI * k as f64; 2]);
                out.push(PI / SQRT_2 * (k as f64 - 0.5));
            }
            out.sort_by(f64::total_cmp);
        }
    }
    out.truncate(count);
    out
}

/// `|σ_k(μ, Ω) − QM_k| / QM_k` for `k = 1..=k_max`.
pub fn quasimode_deviation(shape: QuasimodeShape, mu: f64, k_max: usize, setup: &SolverSetup) -> Result<Vec<f64>> {
    let curve = shape.curve()?;
    let spectrum = solve_biomod(&curve, &setup.disc, mu, &setup.opts)?;
    if spectrum.rank_deficiency > 0 {
        warn!("μ = {mu} is exceptional for this shape; sentinels are compared as −∞");
    }
    if spectrum.eigenvalues.len() < k_max {
        return Err(Error::Eigenpair {
            index: k_max - 1,
            reason: format!("only {} eigenvalues computed", spectrum.eigenvalues.len()),
        });
    }
    let qm = quasimodes(shape, k_max);
    Ok(spectrum.eigenvalues[..k_max]
        .iter()
        .zip(&qm)
        .map(|(s, q)| (s - q).abs() / q)
        .collect())
}

/// Eigenvalues within this distance of zero count as zero.
pub const ZERO_BAND: f64 = 1e-9;

/// Number of eigenvalues below `−ZERO_BAND`, sentinels included. The band
/// keeps the `σ = 0` Laplace mode at `μ = 0` from being counted.
pub fn negative_count(curve: &BoundaryCurve, mu: f64, setup: &SolverSetup) -> Result<usize> {
    let s = solve_biomod(curve, &setup.disc, mu, &setup.opts)?;
    Ok(s.eigenvalues.iter().filter(|&&v| v < -ZERO_BAND).count())
}

/// One row of a negative-count sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegativeCountRow {
    pub mu: f64,
    pub count: Option<usize>,
    /// `|Γ| μ / 2π`.
    pub prediction: f64,
}

/// Negative counts over a wavenumber grid; failed solves are recorded as
/// missing.
pub fn negative_count_sweep(curve: &BoundaryCurve, mus: &[f64], setup: &SolverSetup) -> Vec<NegativeCountRow> {
    let perimeter = curve.perimeter();
    mus.par_iter()
        .map(|&mu| {
            let count = negative_count(curve, mu, setup)
                .map_err(|e| warn!("negative count at μ = {mu} failed: {e}"))
                .ok();
            NegativeCountRow { mu, count, prediction: perimeter * mu / (2.0 * PI) }
        })
        .collect()
}

/// Shapes used when comparing negative counts across geometries.
pub fn representative_shapes() -> Vec<NamedShape> {
    vec![
        NamedShape::Disk { radius: 1.0 },
        NamedShape::EllipseEccentricity { e: 0.8 },
        NamedShape::Kite { kappa: 0.65 },
        NamedShape::Square { side: 1.0 },
    ]
}

/// `F_k(μ, A_ε)` on annuli of outer radius 1, next to the disk values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusTable {
    pub k: usize,
    pub eps: Vec<f64>,
    pub mu: Vec<f64>,
    /// `values[i][j]` at `eps[i]`, `mu[j]`; `None` marks a failed cell.
    #[serde(with = "opt_grid")]
    pub values: Vec<Vec<Option<f64>>>,
    #[serde(with = "crate::io::ext_real_vec")]
    pub disk: Vec<f64>,
}

mod opt_grid {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Cell(#[serde(with = "crate::io::ext_real_opt")] Option<f64>);

    pub fn serialize<S: Serializer>(v: &[Vec<Option<f64>>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|row| row.iter().map(|&c| Cell(c)).collect::<Vec<_>>()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Option<f64>>>, D::Error> {
        let raw = Vec::<Vec<Cell>>::deserialize(d)?;
        Ok(raw.into_iter().map(|r| r.into_iter().map(|c| c.0).collect()).collect())
    }
}

/// Differences within this band count as ties in the sign table.
pub const SIGN_TIE: f64 = 1e-8;

impl AnnulusTable {
    /// Sign of `F_k(μ, A_ε) − F_k(μ, D)` per cell: 1, 0 or −1.
    pub fn signs(&self) -> Vec<Vec<Option<i8>>> {
        self.values
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&self.disk)
                    .map(|(v, d)| {
                        v.map(|v| {
                            let diff = v - d;
                            if v == *d || diff.abs() <= SIGN_TIE {
                                0
                            } else if diff > 0.0 {
                                1
                            } else {
                                -1
                            }
                        })
                    })
                    .collect()
            })
            .collect()
    }

    /// `eps` followed by the μ values.
    pub fn header(&self) -> Vec<String> {
        std::iter::once("eps".to_string()).chain(self.mu.iter().map(|m| fmt17(*m))).collect()
    }

    /// One CSV row per ε, failed cells empty.
    pub fn value_rows(&self) -> Vec<Vec<String>> {
        self.eps
            .iter()
            .zip(&self.values)
            .map(|(e, row)| {
                std::iter::once(fmt17(*e))
                    .chain(row.iter().map(|c| c.map(fmt17).unwrap_or_default()))
                    .collect()
            })
            .collect()
    }

    /// Sign-table rows in the layout of [`AnnulusTable::value_rows`].
    pub fn sign_rows(&self) -> Vec<Vec<String>> {
        self.eps
            .iter()
            .zip(self.signs())
            .map(|(e, row)| {
                std::iter::once(fmt17(*e))
                    .chain(row.iter().map(|c| c.map(|s| s.to_string()).unwrap_or_default()))
                    .collect()
            })
            .collect()
    }

    /// Values as CSV: a header of μ values, then one row per ε.
    pub fn write_values_csv(&self, path: &Path) -> Result<()> {
        crate::io::write_csv(path, &self.header(), &self.value_rows())
    }

    pub fn write_signs_csv(&self, path: &Path) -> Result<()> {
        crate::io::write_csv(path, &self.header(), &self.sign_rows())
    }
}

fn functional_or_sentinel(spec: &FunctionalSpec, curve: &BoundaryCurve, mu: f64, setup: &SolverSetup) -> Result<f64> {
    match evaluate_functional(spec, curve, mu, setup) {
        Err(Error::Sentinel { .. }) => Ok(f64::NEG_INFINITY),
        other => other,
    }
}

/// Evaluates `F_k` over an `ε × μ` grid of annuli plus the unit disk.
/// Cells run in parallel; a failed cell is logged and left empty.
pub fn annulus_sweep(eps_grid: &[f64], mu_grid: &[f64], k: usize, setup: &SolverSetup) -> Result<AnnulusTable> {
    if !(1..=2).contains(&k) {
        return Err(Error::InvalidParameter(format!("annulus sweeps support k = 1 or 2, got {k}")));
    }
    if let Some(e) = eps_grid.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
        return Err(Error::InvalidParameter(format!("inner radius must lie in (0, 1), got {e}")));
    }
    let spec = FunctionalSpec::f(k)?;
    let disk = make_named_shape(&NamedShape::Disk { radius: 1.0 })?;
    let disk_values = mu_grid
        .par_iter()
        .map(|&mu| functional_or_sentinel(&spec, &disk, mu, setup))
        .collect::<Result<Vec<f64>>>()?;
    let cells: Vec<(usize, usize)> =
        (0..eps_grid.len()).flat_map(|i| (0..mu_grid.len()).map(move |j| (i, j))).collect();
    let results: Vec<Option<f64>> = cells
        .par_iter()
        .map(|&(i, j)| {
            let (eps, mu) = (eps_grid[i], mu_grid[j]);
            make_named_shape(&NamedShape::Annulus { outer: 1.0, inner: eps })
                .and_then(|c| functional_or_sentinel(&spec, &c, mu, setup))
                .map_err(|e| warn!("annulus cell ε = {eps}, μ = {mu} failed: {e}"))
                .ok()
        })
        .collect();
    let values = results.chunks(mu_grid.len().max(1)).map(|c| c.to_vec()).collect();
    Ok(AnnulusTable {
        k,
        eps: eps_grid.to_vec(),
        mu: mu_grid.to_vec(),
        values: if mu_grid.is_empty() { vec![Vec::new(); eps_grid.len()] } else { values },
        disk: disk_values,
    })
}
