//! Reference spectra with closed or semi-closed forms: the disk (Bessel
//! quotients) and the square (separation of variables). See
//! `docs/square_oracle.md` for the derivation of the square equations.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use crate::error::{Error, Result};
use crate::special_fn::{bessel_j, bessel_j_prime, bessel_zero};

/// Disk spectrum request. `max_order` caps the Bessel orders used; the
/// result is rejected unless it is unchanged with ten more orders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskSpectrumQuery {
    pub mu: f64,
    pub radius: f64,
    pub count: usize,
    pub max_order: u32,
}

impl DiskSpectrumQuery {
    /// Query with a `max_order` large enough for `count` values.
    pub fn new(mu: f64, radius: f64, count: usize) -> Self {
        let max_order = (count as f64 / 2.0 + mu * radius).ceil() as u32 + 10;
        DiskSpectrumQuery { mu, radius, count, max_order }
    }

    fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::Oracle("count must be at least 1".into()));
        }
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(Error::Oracle(format!("radius must be positive, got {}", self.radius)));
        }
        if !(self.mu >= 0.0) || !self.mu.is_finite() {
            return Err(Error::Oracle(format!("wavenumber must be non-negative, got {}", self.mu)));
        }
        Ok(())
    }
}

/// `J_{n+1}(x)/J_n(x)` by backward recurrence of the continued fraction,
/// used where `J_n` underflows.
fn bessel_ratio(n: u32, x: f64) -> f64 {
    let top = n as usize + 60 + 2 * x.ceil() as usize;
    let mut r = 0.0;
    for m in (n as usize + 1..=top).rev() {
        r = 1.0 / (2.0 * m as f64 / x - r);
    }
    r
}

/// `μ J'_n(μR) / J_n(μR)`, or `None` when `μR` is within `1e−12` of a zero
/// of `J_n`.
fn disk_value(n: u32, mu: f64, radius: f64) -> Option<f64> {
    let x = mu * radius;
    if x == 0.0 {
        return Some(n as f64 / radius);
    }
    if n as f64 > 2.0 * x + 20.0 {
        // x J'_n/J_n = n − x J_{n+1}/J_n
        return Some((n as f64 - x * bessel_ratio(n, x)) / radius);
    }
    let j = bessel_j(n, x);
    let jp = bessel_j_prime(n, x);
    if j.abs() <= 1e-12 * jp.abs() * x.max(1.0) {
        return None;
    }
    Some(mu * jp / j)
}

fn collect_disk(q: &DiskSpectrumQuery, max_order: u32, skip: Option<u32>) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for n in 0..=max_order {
        if Some(n) == skip {
            continue;
        }
        let v = disk_value(n, q.mu, q.radius).ok_or_else(|| {
            Error::Oracle(format!(
                "μR = {} is a zero of J_{n}; use disk_spectrum_exceptional",
                q.mu * q.radius
            ))
        })?;
        values.push(v);
        if n > 0 {
            values.push(v);
        }
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

fn stable_prefix(q: &DiskSpectrumQuery, skip: Option<u32>) -> Result<Vec<f64>> {
    q.validate()?;
    let mut values = collect_disk(q, q.max_order, skip)?;
    if values.len() < q.count {
        return Err(Error::Oracle(format!(
            "max_order {} yields only {} values",
            q.max_order,
            values.len()
        )));
    }
    let more = collect_disk(q, q.max_order + 10, skip)?;
    if more[..q.count] != values[..q.count] {
        return Err(Error::Oracle(format!(
            "max_order {} is too small for {} values",
            q.max_order, q.count
        )));
    }
    values.truncate(q.count);
    Ok(values)
}

/// Smallest `count` Steklov–Helmholtz eigenvalues of the disk, with
/// multiplicity (order 0 simple, higher orders double).
pub fn disk_spectrum(q: &DiskSpectrumQuery) -> Result<Vec<f64>> {
    stable_prefix(q, None)
}

/// Sentinel count and finite eigenvalues of the disk at a wavenumber where
/// `μR` is a zero of some `J_n`.
pub fn disk_spectrum_exceptional(q: &DiskSpectrumQuery) -> Result<(usize, Vec<f64>)> {
    q.validate()?;
    let x = q.mu * q.radius;
    let mut resonant = None;
    for n in 0..=(x as u32) {
        let mut k = 1;
        loop {
            let z = bessel_zero(n, k);
            if (z - x).abs() <= 1e-12 * x.max(1.0) {
                resonant = Some(n);
            }
            if z > x + 1.0 {
                break;
            }
            k += 1;
        }
        if resonant.is_some() {
            break;
        }
    }
    let n = resonant.ok_or_else(|| Error::Oracle(format!("μR = {x} is not a Bessel zero")))?;
    let ell = if n == 0 { 1 } else { 2 };
    Ok((ell, stable_prefix(q, Some(n))?))
}

/// Parity of a one-dimensional factor on `[−h, h]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Parity {
    Even,
    Odd,
}

/// Robin quotient `X'(h)/X(h)` of the factor with `X'' = −αX` and the given
/// parity. Decreasing in `α` between poles.
fn robin(parity: Parity, alpha: f64, h: f64) -> f64 {
    match parity {
        Parity::Even if alpha > 0.0 => {
            let k = alpha.sqrt();
            -k * (k * h).tan()
        }
        Parity::Even if alpha < 0.0 => {
            let k = (-alpha).sqrt();
            k * (k * h).tanh()
        }
        Parity::Even => 0.0,
        Parity::Odd if alpha > 0.0 => {
            let k = alpha.sqrt();
            k / (k * h).tan()
        }
        Parity::Odd if alpha < 0.0 => {
            let k = (-alpha).sqrt();
            k / (k * h).tanh()
        }
        Parity::Odd => 1.0 / h,
    }
}

/// Poles of [`robin`] in `α`, inside `(lo, hi)`: `X(h) = 0`.
fn robin_poles(parity: Parity, h: f64, lo: f64, hi: f64) -> Vec<f64> {
    let offset = match parity {
        Parity::Even => FRAC_PI_2,
        Parity::Odd => PI,
    };
    let mut out = Vec::new();
    let mut m = 0;
    loop {
        let k = (offset + PI * m as f64) / h;
        let a = k * k;
        if a >= hi {
            break;
        }
        if a > lo {
            out.push(a);
        }
        m += 1;
    }
    out
}

/// Result of [`square_spectrum`].
#[derive(Debug, Clone, PartialEq)]
pub struct SquareSpectrum {
    /// Number of Dirichlet eigenvalues equal to `μ²` (sentinels `−∞`).
    pub sentinels: usize,
    /// Smallest finite eigenvalues, ascending.
    pub values: Vec<f64>,
}

/// Roots closer to zero than this are exact zeros.
const ZERO_SNAP: f64 = 1e-12;
/// Poles closer than this (relative) are treated as coincident.
const POLE_MERGE: f64 = 1e-9;

/// Roots `α ∈ (lo, hi)` of `robin(p, α) = robin(q, μ² − α)`, returned as
/// eigenvalues, plus the number of coincident pole pairs. Coincident poles
/// are kept once: `g` tends to `−∞` from the left and `+∞` from the right
/// of a shared pole just as at a simple one.
fn branch_roots(p: Parity, q: Parity, mu2: f64, h: f64, lo: f64, hi: f64) -> (Vec<f64>, usize) {
    let g = |a: f64| robin(p, a, h) - robin(q, mu2 - a, h);
    let mut poles: Vec<(f64, bool)> = robin_poles(p, h, lo, hi).into_iter().map(|a| (a, true)).collect();
    poles.extend(robin_poles(q, h, mu2 - hi, mu2 - lo).into_iter().map(|b| (mu2 - b, false)));
    poles.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<f64> = Vec::new();
    let mut sentinels = 0;
    let mut last: Option<(f64, bool)> = None;
    for &(a, own) in &poles {
        if let Some((b, other)) = last {
            // a shared pole is a Dirichlet mode; g still changes sign there
            if own != other && (a - b).abs() <= POLE_MERGE * a.abs().max(1.0) {
                sentinels += 1;
                last = None;
                continue;
            }
        }
        merged.push(a);
        last = Some((a, own));
    }
    // g runs from +∞ to −∞ between consecutive poles
    let mut edges = vec![lo];
    edges.extend(&merged);
    edges.push(hi);
    let mut roots = Vec::new();
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let open_left = a != lo;
        let open_right = b != hi;
        if !open_left && g(a) <= 0.0 {
            continue;
        }
        if !open_right && g(b) >= 0.0 {
            continue;
        }
        let root = descend(&g, a, b);
        roots.push(robin(p, root, h));
    }
    (roots, sentinels)
}

/// Root of a decreasing function on `(a, b)` with `f(a+) > 0 > f(b−)`,
/// never evaluating at the endpoints.
fn descend(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    loop {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            return m;
        }
        let v = f(m);
        if v == 0.0 {
            return m;
        } else if v > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
}

/// Smallest `count` Steklov–Helmholtz eigenvalues of a square by separation
/// of variables, plus the number of `−∞` sentinels when `μ²` is a Dirichlet
/// eigenvalue. Every eigenfunction is `X(x)Y(y)` with factors of definite
/// parity sharing one Robin quotient.
pub fn square_spectrum(side: f64, mu: f64, count: usize) -> Result<SquareSpectrum> {
    if !(side > 0.0) || !side.is_finite() {
        return Err(Error::Oracle(format!("side must be positive, got {side}")));
    }
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(Error::Oracle(format!("wavenumber must be non-negative, got {mu}")));
    }
    if count == 0 {
        return Err(Error::Oracle("count must be at least 1".into()));
    }
    let h = 0.5 * side;
    let mu2 = mu * mu;
    let mut kmax = 4.0 / h + mu;
    for _ in 0..40 {
        // every root with σ below `cap` has α inside (−kmax², μ² + kmax²)
        let cap = kmax * (kmax * h).tanh();
        let (lo, hi) = (-kmax * kmax, mu2 + kmax * kmax);
        let mut values = Vec::new();
        let mut sentinels = 0;
        for p in [Parity::Even, Parity::Odd] {
            for q in [Parity::Even, Parity::Odd] {
                let (r, s) = branch_roots(p, q, mu2, h, lo, hi);
                values.extend(r);
                sentinels += s;
            }
        }
        values.retain(|&v| v <= cap);
        // exact zeros come back as bisection noise
        for v in &mut values {
            if v.abs() < ZERO_SNAP {
                *v = 0.0;
            }
        }
        if values.len() >= count {
            values.sort_by(f64::total_cmp);
            values.truncate(count);
            return Ok(SquareSpectrum { sentinels, values });
        }
        kmax *= 2.0;
    }
    Err(Error::Oracle(format!("bracket scan exhausted before {count} roots")))
}

/// Shapes with a known Dirichlet spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleShape {
    Disk { radius: f64 },
    Square { side: f64 },
}

/// Exceptional wavenumbers `μ_D ≤ limit` (where `μ_D²` is a Dirichlet
/// eigenvalue) with their multiplicities, ascending.
pub fn exceptional_wavenumbers(shape: OracleShape, limit: f64) -> Result<Vec<(f64, usize)>> {
    if !(limit <= 100.0) {
        return Err(Error::Oracle(format!("limit must be at most 100, got {limit}")));
    }
    let mut out = Vec::new();
    match shape {
        OracleShape::Disk { radius } => {
            let x = limit * radius;
            let mut n = 0;
            while (n as f64) < x {
                let mut k = 1;
                loop {
                    let z = bessel_zero(n, k);
                    if z > x {
                        break;
                    }
                    out.push((z / radius, if n == 0 { 1 } else { 2 }));
                    k += 1;
                }
                n += 1;
            }
        }
        OracleShape::Square { side } => {
            let r = limit * side / PI;
            let top = (r * r).floor() as u64;
            for s in 2..=top {
                let mult = (1..)
                    .take_while(|m| m * m < s)
                    .filter(|m| {
                        let rest = s - m * m;
                        let q = (rest as f64).sqrt().round() as u64;
                        q * q == rest
                    })
                    .count();
                if mult > 0 {
                    out.push((PI * (s as f64).sqrt() / side, mult));
                }
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// Writes `index,value` rows (1-based index) with 17-digit values.
pub fn write_csv(path: &Path, values: &[f64]) -> Result<()> {
    let rows: Vec<Vec<String>> = values
        .iter()
        .enumerate()
        .map(|(i, v)| vec![(i + 1).to_string(), crate::io::fmt17(*v)])
        .collect();
    crate::io::write_csv(path, &["index", "value"], &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_small_wavenumber_limit() {
        let v = disk_spectrum(&DiskSpectrumQuery::new(1e-9, 1.0, 7)).unwrap();
        let expect = [0.0, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0];
        for (a, b) in v.iter().zip(expect) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        let z = disk_spectrum(&DiskSpectrumQuery::new(0.0, 2.0, 3)).unwrap();
        assert_eq!(z, vec![0.0, 0.5, 0.5]);
    }

    #[test]
    fn disk_near_resonance_values() {
        let v = disk_spectrum(&DiskSpectrumQuery::new(7.1, 1.0, 3)).unwrap();
        assert!((v[1] + 14.2232).abs() < 5e-4, "{}", v[1]);
        let v = disk_spectrum(&DiskSpectrumQuery::new(7.015, 1.0, 3)).unwrap();
        assert!((v[1] + 11957.8208).abs() < 0.5, "{}", v[1]);
    }

    #[test]
    fn disk_radius_scaling() {
        // σ(μ, R) = σ(μR, 1)/R
        let a = disk_spectrum(&DiskSpectrumQuery::new(3.0, 2.0, 20)).unwrap();
        let b = disk_spectrum(&DiskSpectrumQuery::new(6.0, 1.0, 20)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y / 2.0).abs() < 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn continued_fraction_matches_recurrence() {
        for (n, x) in [(5u32, 1.0), (30, 4.0), (12, 0.3)] {
            let r = bessel_ratio(n, x);
            let direct = bessel_j(n + 1, x) / bessel_j(n, x);
            assert!((r - direct).abs() < 1e-13 * direct.abs(), "n={n} x={x}");
        }
    }

    #[test]
    fn disk_rejects_resonance_and_small_cap() {
        let j12 = bessel_zero(1, 2);
        assert!(disk_spectrum(&DiskSpectrumQuery::new(j12, 1.0, 5)).is_err());
        let q = DiskSpectrumQuery { max_order: 2, ..DiskSpectrumQuery::new(10.0, 1.0, 5) };
        assert!(disk_spectrum(&q).is_err());
        assert!(disk_spectrum(&DiskSpectrumQuery::new(1.0, 1.0, 0)).is_err());
    }

    #[test]
    fn disk_exceptional_variant() {
        let (ell, v) = disk_spectrum_exceptional(&DiskSpectrumQuery::new(bessel_zero(0, 1), 1.0, 10)).unwrap();
        assert_eq!(ell, 1);
        assert_eq!(v.len(), 10);
        let j12 = bessel_zero(1, 2);
        let (ell, v) = disk_spectrum_exceptional(&DiskSpectrumQuery::new(j12, 1.0, 10)).unwrap();
        assert_eq!(ell, 2);
        for n in [0u32, 2, 3] {
            assert!(bessel_j(n, j12).abs() > 1e-8);
        }
        assert!(v.iter().all(|x| x.is_finite()));
        assert!(disk_spectrum_exceptional(&DiskSpectrumQuery::new(7.1, 1.0, 4)).is_err());
    }

    #[test]
    fn exceptional_catalogs() {
        let d = exceptional_wavenumbers(OracleShape::Disk { radius: 1.0 }, 4.0).unwrap();
        assert_eq!(d.len(), 2);
        assert!((d[0].0 - 2.404825557695773).abs() < 1e-12 && d[0].1 == 1);
        assert!((d[1].0 - 3.831705970207512).abs() < 1e-12 && d[1].1 == 2);
        let s = exceptional_wavenumbers(OracleShape::Square { side: PI }, 1.5).unwrap();
        assert_eq!(s, vec![(2f64.sqrt(), 1)]);
        let s = exceptional_wavenumbers(OracleShape::Square { side: PI }, 5.1).unwrap();
        assert!(s.contains(&(5.0, 2)));
        assert!(exceptional_wavenumbers(OracleShape::Square { side: PI }, 101.0).is_err());
    }

    #[test]
    fn robin_quotient_is_continuous_at_zero() {
        let h = 0.7;
        for p in [Parity::Even, Parity::Odd] {
            let z = robin(p, 0.0, h);
            assert!((robin(p, 1e-10, h) - z).abs() < 1e-9);
            assert!((robin(p, -1e-10, h) - z).abs() < 1e-9);
        }
    }

    #[test]
    fn square_laplace_limit() {
        // harmonic Steklov spectrum of [-1, 1]²: the constant, a cosh/sinh pair,
        // then u = xy with ∂u/∂n = u on every side
        let s = square_spectrum(2.0, 0.0, 7).unwrap();
        assert_eq!(s.sentinels, 0);
        let expect = [0.0, 0.688252742336, 0.688252742336, 1.0, 2.32363775343, 2.32363775343, 2.39038920511];
        for (v, e) in s.values.iter().zip(expect) {
            assert!((v - e).abs() < 1e-10, "{v} vs {e}");
        }
    }

    #[test]
    fn square_exceptional_sentinels() {
        assert_eq!(square_spectrum(PI, 5.0, 10).unwrap().sentinels, 2);
        assert_eq!(square_spectrum(PI, 2f64.sqrt(), 10).unwrap().sentinels, 1);
        assert_eq!(square_spectrum(PI, 7.0, 10).unwrap().sentinels, 0);
    }

    #[test]
    fn square_side_scaling() {
        let (side, mu) = (PI, 3.3);
        let t = side / 2.0;
        let a = square_spectrum(side, mu, 12).unwrap().values;
        let b = square_spectrum(2.0, mu * t, 12).unwrap().values;
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y / t).abs() <= 1e-12 * x.abs().max(1.0), "{x} vs {}", y / t);
        }
    }

    #[test]
    fn square_count_is_monotone_in_request() {
        // doubling the request never reveals roots below the old maximum
        for mu in [0.5, 3.3, 7.0] {
            let a = square_spectrum(PI, mu, 40).unwrap().values;
            let b = square_spectrum(PI, mu, 80).unwrap().values;
            assert_eq!(&b[..40], &a[..]);
        }
    }

    #[test]
    fn csv_export() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("o.csv");
        write_csv(&path, &[1.5, -0.25]).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert_eq!(text, "index,value\n1,1.5000000000000000e0\n2,-2.5000000000000000e-1\n");
    }
}
