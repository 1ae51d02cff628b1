//! Steklov–Helmholtz eigenvalues from the pencil `(K'_μ + ½I) p = σ S_μ p`.
//!
//! [`solve_bio`] reduces the pencil to `S⁻¹(K' + ½I)`. [`solve_biomod`]
//! first probes the singular values of `S`; when some of them vanish (μ² is
//! a Dirichlet eigenvalue) it restricts the pencil to the numerical range of
//! `S`, solves `Û*(K' + ½I) V̂ P = σ Σ̂ P`, and reports one `−∞` per
//! discarded direction. The reduced pencil is solved in shift-invert form,
//! for `1/(σ − s)`, so that small singular values in `Σ̂` do not amplify
//! rounding into the low eigenvalues.
//!
//! Arcs with a Neumann condition contribute the homogeneous equations
//! `(K' + ½I) p = 0` at their nodes. These are eliminated by restricting `p`
//! to their null space before either solver runs; the restricted pencil is
//! always solved in shift-invert form.

use std::f64::consts::PI;

use faer::{c64, Mat};
use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::discretization::{DiscParams, Discretization};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryCurve, Point};
use crate::linalg;
use crate::operators::{assemble, condition_rows, LayerOperators, MODIFIED_SINGLE_LAYER_C};
use crate::special_fn::hankel01;

/// Relative imaginary-part threshold for discarding spurious eigenvalues.
/// On coarse graded meshes genuine low eigenvalues carry imaginary parts up
/// to about 1e-3 of their size; dropping them would shift every later index.
pub const DEFAULT_IMAG_TOL: f64 = 1e-2;

/// Default truncation tolerance for the singular values of `S`.
pub const DEFAULT_TOL: f64 = 1e-14;

/// Node count above which the probe runs on a coarser grid.
pub const PROBE_COARSEN_ABOVE: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "BIO")]
    Bio,
    #[serde(rename = "BIO-MOD")]
    BioMod,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Bio => "BIO",
            Method::BioMod => "BIO-MOD",
        })
    }
}

/// Solver knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Singular-value truncation tolerance.
    pub tol: f64,
    pub imag_tol: f64,
    /// Run the rank probe at the full node count.
    pub full_probe: bool,
    /// Compute and keep eigenvector densities.
    pub densities: bool,
    /// When set, [`solve_bio`] refuses singular `S` (same criterion as the
    /// rank probe with this tolerance).
    pub bio_guard: Option<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: DEFAULT_TOL,
            imag_tol: DEFAULT_IMAG_TOL,
            full_probe: false,
            densities: false,
            bio_guard: None,
        }
    }
}

impl SolverOptions {
    pub fn with_densities(mut self) -> Self {
        self.densities = true;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// Computed spectrum. `−∞` sentinels come first, the finite eigenvalues
/// follow in ascending order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Spectrum {
    pub mu: f64,
    pub method: Method,
    pub tol: f64,
    /// Requested resolution `N`. Graded grids have one unknown fewer per
    /// corner, so `eigenvalues` may be shorter.
    #[serde(rename = "N")]
    pub n: usize,
    pub p: Option<u32>,
    pub rank_deficiency: usize,
    pub imag_tol: f64,
    /// Eigenvalues dropped for having a large imaginary part.
    pub discarded_complex: usize,
    #[serde(with = "crate::io::ext_real_vec")]
    pub eigenvalues: Vec<f64>,
    /// One density per finite eigenvalue, in the same order.
    #[serde(skip)]
    pub densities: Option<Vec<Vec<c64>>>,
    #[serde(skip)]
    pub disc: Option<Discretization>,
}

impl PartialEq for Spectrum {
    /// Compares the serialized fields.
    fn eq(&self, other: &Self) -> bool {
        self.mu == other.mu
            && self.method == other.method
            && self.tol == other.tol
            && self.n == other.n
            && self.p == other.p
            && self.rank_deficiency == other.rank_deficiency
            && self.imag_tol == other.imag_tol
            && self.discarded_complex == other.discarded_complex
            && self.eigenvalues == other.eigenvalues
    }
}

impl Spectrum {
    /// Eigenvalues after the sentinels.
    pub fn finite(&self) -> &[f64] {
        &self.eigenvalues[self.rank_deficiency..]
    }

    /// Density of eigenvalue `k` (index into `eigenvalues`).
    pub fn density(&self, k: usize) -> Result<&[c64]> {
        if k >= self.eigenvalues.len() {
            return Err(Error::Eigenpair { index: k, reason: "index out of range".into() });
        }
        if k < self.rank_deficiency {
            return Err(Error::Eigenpair { index: k, reason: "sentinel eigenvalue has no density".into() });
        }
        let d = self.densities.as_ref().ok_or_else(|| Error::Eigenpair {
            index: k,
            reason: "densities were not computed (enable SolverOptions::densities)".into(),
        })?;
        Ok(&d[k - self.rank_deficiency])
    }

    /// Number of eigenvalues below zero, sentinels included.
    pub fn negative_count(&self) -> usize {
        self.eigenvalues.iter().filter(|&&v| v < 0.0).count()
    }

    pub fn to_json(&self) -> Result<String> {
        crate::io::to_json(self)
    }
}

/// The square pencil `(A, B)` actually solved. Its unknowns map back to node
/// densities through `basis` (present when Neumann rows were eliminated)
/// followed by multiplication by `scale`.
///
/// Rows are weighted by `D = diag(√(w_j |dz/dσ|_j))`. The discrete single
/// layer is `G·D²` with `G` symmetric, so the left null vectors of `D S` are
/// the right null vectors of `S` up to the column scaling; the Euclidean
/// inner product used by the SVD truncation then matches `L²(Γ)` and the
/// discarded directions decouple from the rest. Columns get the inverse
/// weight, which keeps the scaled single layer symmetric.
struct Pencil {
    a: Mat<c64>,
    b: Mat<c64>,
    basis: Option<Mat<c64>>,
    scale: Vec<f64>,
}

fn build_pencil(ops: &LayerOperators) -> Result<Pencil> {
    let disc = &ops.disc;
    let n = ops.n();
    let rows: Vec<f64> = (0..n).map(|i| (disc.weight(i) * disc.nodes()[i].jacobian).sqrt()).collect();
    let scale: Vec<f64> = rows.iter().map(|r| 1.0 / r).collect();
    let pick = |m: &Mat<c64>, idx: &[usize]| {
        Mat::from_fn(idx.len(), n, |i, j| m[(idx[i], j)] * (rows[idx[i]] * scale[j]))
    };
    let (st, ne) = condition_rows(disc);
    if ne.is_empty() {
        return Ok(Pencil { a: pick(&ops.k_half, &st), b: pick(&ops.s, &st), basis: None, scale });
    }
    let k_ne = pick(&ops.k_half, &ne);
    let svd = linalg::full_svd(k_ne.as_ref())?;
    let z = svd.v.subcols(ne.len(), n - ne.len()).to_owned();
    let a = pick(&ops.k_half, &st) * &z;
    let b = pick(&ops.s, &st) * &z;
    Ok(Pencil { a, b, basis: Some(z), scale })
}

/// Count of singular values with `⌊log₁₀ s⌋ ≤ log₁₀ tol`.
fn probe_count(sv: &[f64], tol: f64) -> usize {
    let lt = tol.log10();
    sv.iter().filter(|&&s| s == 0.0 || s.log10().floor() <= lt).count()
}

fn normalize(mut v: Vec<c64>) -> Vec<c64> {
    let mut best = 0;
    let mut big = 0.0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > big {
            big = z.norm();
            best = i;
        }
    }
    if big > 0.0 {
        let phase = v[best].conj() / (big * big);
        for z in &mut v {
            *z *= phase;
        }
        v[best] = c64::new(1.0, 0.0);
    }
    v
}

/// Filters, sorts and packages eigenpairs of the reduced standard problem.
#[allow(clippy::too_many_arguments)]
fn package(
    ops: &LayerOperators,
    evd: linalg::EigenDecomposition,
    back: Option<&Mat<c64>>,
    scale: &[f64],
    ell: usize,
    method: Method,
    opts: &SolverOptions,
) -> Spectrum {
    let mut keep: Vec<usize> = (0..evd.values.len())
        .filter(|&i| {
            let z = evd.values[i];
            z.re.is_finite() && z.im.abs() <= opts.imag_tol * z.re.abs().max(1.0)
        })
        .collect();
    let discarded = evd.values.len() - keep.len();
    if discarded > 0 {
        debug!("discarded {discarded} eigenvalues with large imaginary parts");
    }
    keep.sort_by(|&i, &j| evd.values[i].re.total_cmp(&evd.values[j].re));
    let mut eigenvalues = vec![f64::NEG_INFINITY; ell];
    eigenvalues.extend(keep.iter().map(|&i| evd.values[i].re));
    let densities = evd.vectors.map(|vecs| {
        keep.iter()
            .map(|&k| {
                let q = vecs.col(k);
                let p: Vec<c64> = match back {
                    Some(m) => {
                        let col = m * q;
                        (0..col.nrows()).map(|i| col[i] * scale[i]).collect()
                    }
                    None => (0..q.nrows()).map(|i| q[i] * scale[i]).collect(),
                };
                normalize(p)
            })
            .collect()
    });
    Spectrum {
        mu: ops.mu,
        method,
        tol: opts.tol,
        n: ops.disc.grid_len(),
        p: ops.disc.grading_degree(),
        rank_deficiency: ell,
        imag_tol: opts.imag_tol,
        discarded_complex: discarded,
        eigenvalues,
        densities: if opts.densities { densities } else { None },
        disc: if opts.densities { Some(ops.disc.clone()) } else { None },
    }
}

/// Shifts tried by [`shift_invert`], in order.
const SHIFTS: [f64; 3] = [-std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_PI, -1.618033988749895];

/// Eigenpairs of `A p = σ B p` from `(A − sB)⁻¹B`, `σ = s + 1/λ`.
///
/// The reduced single layer carries singular values down to the truncation
/// level, so inverting it amplifies rounding in `σ` by up to `1/s_min`.
/// `A − sB` stays well conditioned away from the spectrum; a singular shift
/// surfaces as a failed solve and the next shift is tried.
fn shift_invert(a: Mat<c64>, b: &Mat<c64>, vectors: bool) -> Result<linalg::EigenDecomposition> {
    let mut last = None;
    for shift in SHIFTS {
        let m = Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] - b[(i, j)] * shift);
        match linalg::lu_solve(m.as_ref(), b.as_ref()) {
            Ok(x) => {
                let mut evd = linalg::eig(x, vectors)?;
                for z in &mut evd.values {
                    *z = z.inv() + shift;
                }
                return Ok(evd);
            }
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one shift"))
}

fn bio_from_pencil(ops: &LayerOperators, pencil: Pencil, method: Method, opts: &SolverOptions) -> Result<Spectrum> {
    // Mixed conditions always go through the shift: after the Neumann
    // elimination the restricted single layer is badly conditioned on graded
    // grids. Plain BIO on pure Steklov boundaries keeps the direct S⁻¹ form.
    let Pencil { a, b, basis, scale } = pencil;
    let evd = if basis.is_some() || method == Method::BioMod {
        shift_invert(a, &b, opts.densities)?
    } else {
        linalg::eig(linalg::lu_solve(b.as_ref(), a.as_ref())?, opts.densities)?
    };
    Ok(package(ops, evd, basis.as_ref(), &scale, 0, method, opts))
}

/// Solves the pencil through `S⁻¹(K' + ½I)`.
///
/// With [`SolverOptions::bio_guard`] set, a numerically singular `S` is
/// reported as [`Error::SingularSingleLayer`] instead of being solved.
pub fn solve_bio(ops: &LayerOperators, opts: &SolverOptions) -> Result<Spectrum> {
    let pencil = build_pencil(ops)?;
    if let Some(guard) = opts.bio_guard {
        let sv = linalg::singular_values(pencil.b.as_ref())?;
        let count = probe_count(&sv, guard);
        if count > 0 {
            return Err(Error::SingularSingleLayer { count, tol: guard });
        }
    }
    bio_from_pencil(ops, pencil, Method::Bio, opts)
}

/// Node count for the coarse rank probe: `N/3` for `N > 300`, rounded down
/// to an even number.
pub fn probe_size(n: usize) -> usize {
    if n > PROBE_COARSEN_ABOVE {
        (n / 3) & !1
    } else {
        n
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(1e-16..=1e-6).contains(&tol) {
        return Err(Error::InvalidParameter(format!(
            "truncation tolerance must lie in [1e-16, 1e-6], got {tol}"
        )));
    }
    Ok(())
}

/// Estimated null-space dimension of the single layer: the number of
/// singular values at or below `opts.tol` on the probe grid.
pub fn rank_probe(curve: &BoundaryCurve, params: &DiscParams, mu: f64, opts: &SolverOptions) -> Result<usize> {
    check_tol(opts.tol)?;
    let n1 = if opts.full_probe { params.n } else { probe_size(params.n) };
    let coarse = assemble(&params.with_n(n1).build(curve)?, mu)?;
    let p = build_pencil(&coarse)?;
    Ok(probe_count(&linalg::singular_values(p.b.as_ref())?, opts.tol))
}

/// Wavenumber-robust solve.
pub fn solve_biomod(curve: &BoundaryCurve, params: &DiscParams, mu: f64, opts: &SolverOptions) -> Result<Spectrum> {
    check_tol(opts.tol)?;
    let disc = params.build(curve)?;
    let n1 = if opts.full_probe { params.n } else { probe_size(params.n) };
    let (ops, pencil) = if n1 == params.n {
        let ops = assemble(&disc, mu)?;
        let pencil = build_pencil(&ops)?;
        (Some(ops), Some(pencil))
    } else {
        (None, None)
    };
    let probe_ell = match &pencil {
        Some(p) => probe_count(&linalg::singular_values(p.b.as_ref())?, opts.tol),
        None => rank_probe(curve, params, mu, opts)?,
    };
    debug!("rank probe at N1 = {n1}: ℓ = {probe_ell}");
    let ops = match ops {
        Some(o) => o,
        None => assemble(&disc, mu)?,
    };
    let pencil = match pencil {
        Some(p) => p,
        None => build_pencil(&ops)?,
    };
    if probe_ell == 0 {
        return bio_from_pencil(&ops, pencil, Method::BioMod, opts);
    }
    let svd = linalg::thin_svd(pencil.b.as_ref())?;
    // the probe fixes ℓ: on graded grids the full-N matrix also has tiny
    // singular values from near-corner columns that carry no null space
    let ell = probe_ell.min(svd.s.len());
    let r = svd.s.len() - ell;
    let below = svd.s.iter().filter(|&&s| s < opts.tol).count();
    if below != ell {
        warn!(
            "rank probe found {probe_ell} small singular values at N1 = {n1} but {below} fall below tol at N = {}; truncating {ell}",
            params.n
        );
    }
    let uh = svd.u.subcols(0, r);
    let vh = svd.v.subcols(0, r);
    let x = uh.adjoint() * &pencil.a * vh;
    let sigma = Mat::from_fn(r, r, |i, j| if i == j { c64::new(svd.s[i], 0.0) } else { c64::new(0.0, 0.0) });
    let evd = shift_invert(x, &sigma, opts.densities)?;
    let back = match &pencil.basis {
        Some(z) => z * vh,
        None => vh.to_owned(),
    };
    Ok(package(&ops, evd, Some(&back), &pencil.scale, ell, Method::BioMod, opts))
}

/// Assembles and solves with either method.
pub fn solve(curve: &BoundaryCurve, params: &DiscParams, mu: f64, method: Method, opts: &SolverOptions) -> Result<Spectrum> {
    match method {
        Method::BioMod => solve_biomod(curve, params, mu, opts),
        Method::Bio => {
            let disc = params.build(curve)?;
            solve_bio(&assemble(&disc, mu)?, opts)
        }
    }
}

/// Multiple of the largest node spacing that evaluation points must keep
/// from the boundary nodes.
pub const EVAL_CLEARANCE: f64 = 5.0;

/// Evaluates `u = S̃_μ φ_k` at interior points.
pub fn eigenfunction_at(spectrum: &Spectrum, k: usize, points: &[Point]) -> Result<Vec<c64>> {
    eigenfunction_at_with_clearance(spectrum, k, points, EVAL_CLEARANCE)
}

/// As [`eigenfunction_at`] with an explicit clearance factor. Smaller
/// factors allow points nearer the boundary at reduced accuracy.
pub fn eigenfunction_at_with_clearance(spectrum: &Spectrum, k: usize, points: &[Point], clearance: f64) -> Result<Vec<c64>> {
    let density = spectrum.density(k)?;
    let disc = spectrum.disc.as_ref().ok_or_else(|| Error::Eigenpair {
        index: k,
        reason: "spectrum carries no discretization".into(),
    })?;
    let h = disc.max_spacing();
    let nodes = disc.nodes();
    let mu = spectrum.mu;
    points
        .iter()
        .map(|x| {
            let mut acc = c64::new(0.0, 0.0);
            let mut dmin = f64::INFINITY;
            for (j, node) in nodes.iter().enumerate() {
                let y = node.position();
                let r = (x[0] - y[0]).hypot(x[1] - y[1]);
                dmin = dmin.min(r);
                let kernel = if mu > 0.0 {
                    c64::new(0.0, 0.25) * hankel01(mu * r).0
                } else {
                    c64::new(-r.ln() / (2.0 * PI) + MODIFIED_SINGLE_LAYER_C, 0.0)
                };
                acc += kernel * (disc.weight(j) * node.jacobian) * density[j];
            }
            if dmin <= clearance * h {
                return Err(Error::InvalidParameter(format!(
                    "point ({}, {}) lies within {clearance}·h = {:.3e} of the boundary",
                    x[0],
                    x[1],
                    clearance * h
                )));
            }
            Ok(acc)
        })
        .collect()
}

/// Mean relative error of the first `q` values; entries with a zero
/// reference use the absolute error.
pub fn mre(computed: &[f64], reference: &[f64], q: usize) -> Result<f64> {
    if q == 0 || computed.len() < q || reference.len() < q {
        return Err(Error::InvalidParameter(format!(
            "MRE over {q} values needs that many entries (computed {}, reference {})",
            computed.len(),
            reference.len()
        )));
    }
    if computed[..q].iter().chain(&reference[..q]).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("MRE requires finite eigenvalues".into()));
    }
    Ok(computed[..q]
        .iter()
        .zip(&reference[..q])
        .map(|(c, r)| if *r == 0.0 { (c - r).abs() } else { ((c - r) / r).abs() })
        .sum::<f64>()
        / q as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_named_shape, NamedShape};
    use crate::special_fn::{bessel_j, bessel_j_prime, bessel_zero};

    fn disk() -> BoundaryCurve {
        make_named_shape(&NamedShape::Disk { radius: 1.0 }).unwrap()
    }

    /// Bessel quotients for orders 0..max, order n ≥ 1 counted twice.
    fn disk_values(mu: f64, max: u32, skip: Option<u32>) -> Vec<f64> {
        let mut v = Vec::new();
        for n in 0..=max {
            if Some(n) == skip {
                continue;
            }
            let s = mu * bessel_j_prime(n, mu) / bessel_j(n, mu);
            v.push(s);
            if n > 0 {
                v.push(s);
            }
        }
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn mre_examples() {
        assert_eq!(mre(&[1.0, 2.0], &[1.0, 2.0], 2).unwrap(), 0.0);
        assert!((mre(&[1.1, 2.0], &[1.0, 2.0], 2).unwrap() - 0.05).abs() < 1e-15);
        assert!((mre(&[0.01, 3.0], &[0.0, 3.0], 2).unwrap() - 0.005).abs() < 1e-15);
        assert!(mre(&[1.0], &[1.0, 2.0], 2).is_err());
    }

    #[test]
    fn disk_matches_bessel_quotients() {
        let mu = 2.0;
        let params = DiscParams::new(128, 6);
        let s = solve(&disk(), &params, mu, Method::Bio, &SolverOptions::default()).unwrap();
        let r = disk_values(mu, 60, None);
        for (a, b) in s.finite()[..30].iter().zip(&r) {
            assert!(((a - b) / b).abs() < 1e-11, "{a} vs {b}");
        }
        assert_eq!(s.discarded_complex, 0);
        assert_eq!(s.eigenvalues.len(), 128);
    }

    #[test]
    fn biomod_equals_bio_off_resonance() {
        let c = make_named_shape(&NamedShape::Kite { kappa: 0.65 }).unwrap();
        let params = DiscParams::new(96, 6);
        let a = solve(&c, &params, 1.3, Method::Bio, &SolverOptions::default()).unwrap();
        let b = solve(&c, &params, 1.3, Method::BioMod, &SolverOptions::default()).unwrap();
        assert_eq!(a.eigenvalues.len(), b.eigenvalues.len());
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0), "{x} vs {y}");
        }
        assert_eq!(b.rank_deficiency, 0);
    }

    #[test]
    fn exceptional_disk_sentinels() {
        let mu = bessel_zero(1, 2);
        let params = DiscParams::new(128, 6);
        let s = solve_biomod(&disk(), &params, mu, &SolverOptions::default().with_tol(1e-10)).unwrap();
        assert_eq!(s.rank_deficiency, 2);
        assert!(s.eigenvalues[..2].iter().all(|v| *v == f64::NEG_INFINITY));
        let r = disk_values(mu, 60, Some(1));
        for (a, b) in s.finite()[..20].iter().zip(&r) {
            assert!((a - b).abs() < 1e-10 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn guarded_bio_refuses_exceptional_wavenumber() {
        let mu = bessel_zero(0, 1);
        let disc = DiscParams::new(64, 6).build(&disk()).unwrap();
        let ops = assemble(&disc, mu).unwrap();
        let opts = SolverOptions { bio_guard: Some(1e-10), ..SolverOptions::default() };
        let err = solve_bio(&ops, &opts).unwrap_err();
        assert!(matches!(err, Error::SingularSingleLayer { count: 1, .. }));
        assert!(err.to_string().contains("solve_biomod"));
    }

    #[test]
    fn densities_are_normalized_eigenvectors() {
        let disc = DiscParams::new(64, 6).build(&disk()).unwrap();
        let ops = assemble(&disc, 2.0).unwrap();
        let s = solve_bio(&ops, &SolverOptions::default().with_densities()).unwrap();
        for k in 0..5 {
            let p = s.density(k).unwrap();
            let max = p.iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!((max - 1.0).abs() < 1e-14);
            assert!(p.iter().any(|z| *z == c64::new(1.0, 0.0)));
            // residual of the pencil
            let sig = s.eigenvalues[k];
            for i in 0..64 {
                let mut r = c64::new(0.0, 0.0);
                for j in 0..64 {
                    r += (ops.k_half[(i, j)] - sig * ops.s[(i, j)]) * p[j];
                }
                assert!(r.norm() < 1e-10 * sig.abs().max(1.0));
            }
        }
    }

    #[test]
    fn sentinel_has_no_density() {
        let mu = bessel_zero(0, 1);
        let opts = SolverOptions::default().with_tol(1e-10).with_densities();
        let s = solve_biomod(&disk(), &DiscParams::new(64, 6), mu, &opts).unwrap();
        assert_eq!(s.rank_deficiency, 1);
        assert!(s.density(0).is_err());
        assert!(s.density(1).is_ok());
        assert!(eigenfunction_at(&s, 0, &[[0.0, 0.0]]).is_err());
    }

    #[test]
    fn radial_eigenfunction_is_rotation_invariant() {
        let opts = SolverOptions::default().with_densities();
        let s = solve(&disk(), &DiscParams::new(64, 6), 2.0, Method::Bio, &opts).unwrap();
        // the lowest eigenvalue belongs to order 0 at μ = 2
        let pts: Vec<Point> = (0..32)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / 32.0;
                [0.5 * t.cos(), 0.5 * t.sin()]
            })
            .collect();
        let u = eigenfunction_at_with_clearance(&s, 0, &pts, 1.0).unwrap();
        for z in &u {
            assert!((z - u[0]).norm() < 1e-8 * u[0].norm());
        }
        assert!(eigenfunction_at(&s, 0, &[[0.99, 0.0]]).is_err());
    }

    #[test]
    fn eigenfunction_solves_helmholtz() {
        let mu = 2.0;
        let opts = SolverOptions::default().with_densities();
        let c = make_named_shape(&NamedShape::Kite { kappa: 0.65 }).unwrap();
        let s = solve(&c, &DiscParams::new(128, 6), mu, Method::Bio, &opts).unwrap();
        let h = 1e-3;
        let x = [-0.1, 0.3];
        for k in 0..4 {
            let pts = [x, [x[0] + h, x[1]], [x[0] - h, x[1]], [x[0], x[1] + h], [x[0], x[1] - h]];
            let u = eigenfunction_at_with_clearance(&s, k, &pts, 1.0).unwrap();
            let lap = (u[1] + u[2] + u[3] + u[4] - 4.0 * u[0]) / (h * h);
            let res = (lap + mu * mu * u[0]).norm();
            assert!(res < 1e-4 * u[0].norm().max(1e-3), "k={k} res={res}");
        }
    }

    #[test]
    fn eigenfunction_satisfies_steklov_condition() {
        let mu = 2.0;
        let opts = SolverOptions::default().with_densities();
        let s = solve(&disk(), &DiscParams::new(1024, 6), mu, Method::Bio, &opts).unwrap();
        let sigma = s.eigenvalues[0];
        let d = 1e-2;
        let u: Vec<c64> = eigenfunction_at_with_clearance(
            &s,
            0,
            &[[1.0 - d, 0.0], [1.0 - 2.0 * d, 0.0], [1.0 - 3.0 * d, 0.0]],
            1.0,
        )
        .unwrap();
        // quadratic extrapolation to the boundary, then a one-sided stencil
        let u0 = 3.0 * u[0] - 3.0 * u[1] + u[2];
        let du = (3.0 * u0 - 4.0 * u[0] + u[1]) / (2.0 * d);
        assert!((du - sigma * u0).norm() < 1e-2 * (sigma * u0).norm());
    }

    #[test]
    fn spectrum_json_round_trip() {
        let mu = bessel_zero(0, 1);
        let s = solve_biomod(&disk(), &DiscParams::new(32, 6), mu, &SolverOptions::default().with_tol(1e-10)).unwrap();
        let text = s.to_json().unwrap();
        assert!(text.contains("\"-inf\""));
        assert!(text.contains("\"BIO-MOD\""));
        let back: Spectrum = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn tolerance_bounds_enforced() {
        let o = SolverOptions::default().with_tol(1e-3);
        assert!(solve_biomod(&disk(), &DiscParams::new(32, 6), 1.0, &o).is_err());
    }

    #[test]
    fn probe_size_rule() {
        assert_eq!(probe_size(256), 256);
        assert_eq!(probe_size(300), 300);
        assert_eq!(probe_size(2048), 682);
        assert_eq!(probe_size(600), 200);
    }
}
