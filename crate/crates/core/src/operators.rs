//! Nyström discretization of the single-layer operator `S_μ` and the adjoint
//! double-layer operator `K'_μ`.
//!
//! Within a component both kernels are split as
//! `k(t, τ) = k₁(t, τ) ln(4 sin²((t − τ)/2)) + k₂(t, τ)` in the periodic
//! quadrature variable. The logarithmic part is integrated with the weights
//!
//! `R_j = −(2π/n) Σ_{m=1}^{n−1} cos(m(t − τ_j))/m − (π/n²) cos(n(t − τ_j))`
//!
//! on `2n` nodes, the smooth part with the trapezoidal rule. Kernels between
//! different components are smooth and use the trapezoidal rule directly.
//! Columns carry `|dz/dσ|`, so the matrices act on node values of the density.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;

use faer::{c64, Mat};
use rayon::prelude::*;

use crate::discretization::{ComponentRange, Discretization};
use crate::error::{Error, Result};
use crate::geometry::BoundaryCondition;
use crate::linalg;
use crate::special_fn::{hankel01, EULER_GAMMA};

/// Coefficient of the rank-one completion `c ∫φ ds` added to the
/// logarithmic kernel at `μ = 0`.
pub const MODIFIED_SINGLE_LAYER_C: f64 = 1.0 / (2.0 * PI);

/// Assembled layer matrices.
#[derive(Debug, Clone)]
pub struct LayerOperators {
    /// Discrete single layer (modified at `μ = 0`).
    pub s: Mat<c64>,
    /// Discrete `K'_μ + ½I`.
    pub k_half: Mat<c64>,
    pub mu: f64,
    pub disc: Discretization,
}

impl LayerOperators {
    pub fn n(&self) -> usize {
        self.s.nrows()
    }

    /// Singular values of `S`, descending.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        linalg::singular_values(self.s.as_ref())
    }

    /// Writes both matrices as `"SBIO" | u32 N | f64 μ | S | K'+½I`, each
    /// matrix row-major complex128, all little-endian.
    pub fn write_dump(&self, path: &Path) -> Result<()> {
        let n = self.n();
        let mut buf = Vec::with_capacity(16 + 32 * n * n);
        buf.extend_from_slice(b"SBIO");
        buf.extend_from_slice(&(n as u32).to_le_bytes());
        buf.extend_from_slice(&self.mu.to_le_bytes());
        for m in [&self.s, &self.k_half] {
            for i in 0..n {
                for j in 0..n {
                    let z = m[(i, j)];
                    buf.extend_from_slice(&z.re.to_le_bytes());
                    buf.extend_from_slice(&z.im.to_le_bytes());
                }
            }
        }
        std::fs::File::create(path)?.write_all(&buf)?;
        Ok(())
    }
}

/// Matrices read back from a dump: `(μ, S, K'+½I)`.
pub fn read_dump(path: &Path) -> Result<(f64, Mat<c64>, Mat<c64>)> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let bad = |msg: &str| Error::Io(std::io::Error::new(std::io::ErrorKind::InvalidData, msg.to_string()));
    if bytes.len() < 16 || &bytes[..4] != b"SBIO" {
        return Err(bad("not an SBIO dump"));
    }
    let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let mu = f64::from_le_bytes(bytes[8..16].try_into().unwrap());
    if bytes.len() != 16 + 32 * n * n {
        return Err(bad("truncated SBIO dump"));
    }
    let f = |k: usize| f64::from_le_bytes(bytes[16 + 8 * k..24 + 8 * k].try_into().unwrap());
    let read = |offset: usize| {
        Mat::from_fn(n, n, |i, j| {
            let k = offset + 2 * (i * n + j);
            c64::new(f(k), f(k + 1))
        })
    };
    Ok((mu, read(0), read(2 * n * n)))
}

/// Weights `R_d` for index offsets `d = 0..n_c` on a grid of `n_c = 2n`
/// points.
pub fn log_weights(nc: usize) -> Vec<f64> {
    let n = nc / 2;
    let nf = n as f64;
    (0..nc)
        .map(|d| {
            let x = PI * d as f64 / nf;
            let mut acc = 0.0;
            for m in 1..n {
                acc += (m as f64 * x).cos() / m as f64;
            }
            let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
            -2.0 * PI / nf * acc - PI / (nf * nf) * sign
        })
        .collect()
}

/// `ln(4 sin²(πd/n_c))` for `d = 1..n_c` (entry 0 unused).
fn log_factors(nc: usize) -> Vec<f64> {
    (0..nc)
        .map(|d| {
            if d == 0 {
                0.0
            } else {
                (4.0 * (PI * d as f64 / nc as f64).sin().powi(2)).ln()
            }
        })
        .collect()
}

struct ComponentTables {
    range: ComponentRange,
    r: Vec<f64>,
    lg: Vec<f64>,
}

/// Assembles `S_μ` and `K'_μ + ½I` on `disc`.
pub fn assemble(disc: &Discretization, mu: f64) -> Result<LayerOperators> {
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "wavenumber must be finite and non-negative, got {mu}"
        )));
    }
    let n = disc.len();
    let nodes = disc.nodes();
    let tables: Vec<ComponentTables> = disc
        .components()
        .iter()
        .map(|&range| ComponentTables {
            range,
            r: log_weights(range.grid),
            lg: log_factors(range.grid),
        })
        .collect();
    let i_unit = c64::new(0.0, 1.0);
    let inv4pi = 1.0 / (4.0 * PI);
    let inv2pi = 1.0 / (2.0 * PI);

    let rows: Vec<(Vec<c64>, Vec<c64>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let ni = &nodes[i];
            let ti = &tables[ni.component];
            let normal = ni.normal();
            let mut srow = vec![c64::new(0.0, 0.0); n];
            let mut krow = vec![c64::new(0.0, 0.0); n];
            for (j, nj) in nodes.iter().enumerate() {
                let tj = &tables[nj.component];
                let wj = tj.range.weight();
                let jac = nj.jacobian;
                if i == j {
                    let m1 = -inv4pi * jac;
                    let m2 = if mu > 0.0 {
                        (0.25 * i_unit - EULER_GAMMA * inv2pi - inv2pi * (0.5 * mu * jac).ln()) * jac
                    } else {
                        c64::new(-inv2pi * jac.ln() * jac, 0.0)
                    };
                    srow[j] = ti.r[0] * m1 + wj * m2;
                    krow[j] = c64::new(0.5 - wj * ni.curvature * jac * inv4pi, 0.0);
                    continue;
                }
                let d = ni.diff(nj);
                let r = d[0].hypot(d[1]);
                let nd = (normal[0] * d[0] + normal[1] * d[1]) / r;
                let (s_full, k_full, m1, l1) = if mu > 0.0 {
                    let (h0, h1) = hankel01(mu * r);
                    (
                        0.25 * i_unit * h0 * jac,
                        -0.25 * i_unit * mu * h1 * nd * jac,
                        -inv4pi * h0.re * jac,
                        inv4pi * mu * h1.re * nd * jac,
                    )
                } else {
                    (
                        c64::new(-inv2pi * r.ln() * jac, 0.0),
                        c64::new(-inv2pi * nd / r * jac, 0.0),
                        -inv4pi * jac,
                        0.0,
                    )
                };
                if nj.component == ni.component {
                    let dd = (ni.slot + tj.range.grid - nj.slot) % tj.range.grid;
                    let (rw, lg) = (ti.r[dd], ti.lg[dd]);
                    srow[j] = rw * m1 + wj * (s_full - m1 * lg);
                    krow[j] = rw * l1 + wj * (k_full - l1 * lg);
                } else {
                    srow[j] = wj * s_full;
                    krow[j] = wj * k_full;
                }
            }
            if mu == 0.0 {
                for (j, nj) in nodes.iter().enumerate() {
                    srow[j] += MODIFIED_SINGLE_LAYER_C * tables[nj.component].range.weight() * nj.jacobian;
                }
            }
            (srow, krow)
        })
        .collect();

    for (i, (srow, krow)) in rows.iter().enumerate() {
        for j in 0..n {
            let (a, b) = (srow[j], krow[j]);
            if !(a.re.is_finite() && a.im.is_finite() && b.re.is_finite() && b.im.is_finite()) {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    let s = Mat::from_fn(n, n, |i, j| rows[i].0[j]);
    let k_half = Mat::from_fn(n, n, |i, j| rows[i].1[j]);
    Ok(LayerOperators { s, k_half, mu, disc: disc.clone() })
}

/// Indices of nodes carrying each boundary condition: `(steklov, neumann)`.
pub fn condition_rows(disc: &Discretization) -> (Vec<usize>, Vec<usize>) {
    let mut st = Vec::new();
    let mut ne = Vec::new();
    for (i, node) in disc.nodes().iter().enumerate() {
        match node.condition {
            BoundaryCondition::Steklov => st.push(i),
            BoundaryCondition::Neumann => ne.push(i),
        }
    }
    (st, ne)
}
