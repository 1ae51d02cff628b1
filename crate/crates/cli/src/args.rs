use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use steklov::discretization::DiscParams;
use steklov::eigensolver::{Method, SolverOptions, DEFAULT_IMAG_TOL, DEFAULT_TOL};
use steklov::geometry::{BoundaryCurve, ShapeConfig, ShapeParams};
use steklov::spectral_geometry::SolverSetup;
use steklov::{Error, Result};

/// Shape selection: a name with optional parameters, or a JSON config file.
#[derive(Debug, Clone, Args, Serialize)]
pub struct ShapeArgs {
    /// Named shape (disk, ellipse, kite, omega_a, omega_b, square, l_shape,
    /// isoceles_triangle, semicircle_mixed, annulus).
    #[arg(long, conflicts_with = "shape_config")]
    pub shape: Option<String>,
    /// JSON shape file: {"name": ..., "params": {...}}, {"fourier": {...}}
    /// or {"polygon": [[x, y], ...]}.
    #[arg(long)]
    pub shape_config: Option<PathBuf>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub side: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Ellipse eccentricity.
    #[arg(long)]
    pub eccentricity: Option<f64>,
    /// Annulus inner radius.
    #[arg(long)]
    pub inner: Option<f64>,
    /// Annulus outer radius.
    #[arg(long)]
    pub outer: Option<f64>,
    /// Extra shape parameters as key=value.
    #[arg(long = "param", value_parser = parse_key_value)]
    pub params: Vec<(String, f64)>,
}

fn parse_key_value(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
    Ok((k.trim().to_string(), v))
}

impl ShapeArgs {
    pub fn config(&self) -> Result<ShapeConfig> {
        if let Some(path) = &self.shape_config {
            return ShapeConfig::from_json(&std::fs::read_to_string(path)?);
        }
        let name = self
            .shape
            .clone()
            .ok_or_else(|| Error::InvalidParameter("give --shape or --shape-config".into()))?;
        let mut params = ShapeParams::new();
        let named = [
            ("radius", self.radius),
            ("side", self.side),
            ("kappa", self.kappa),
            ("e", self.eccentricity),
            ("inner", self.inner),
            ("outer", self.outer),
        ];
        for (k, v) in named {
            if let Some(v) = v {
                params.insert(k.to_string(), v);
            }
        }
        params.extend(self.params.iter().cloned());
        Ok(ShapeConfig::Named { name, params })
    }

    pub fn build(&self) -> Result<BoundaryCurve> {
        self.config()?.build()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum MethodArg {
    Bio,
    Biomod,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Bio => Method::Bio,
            MethodArg::Biomod => Method::BioMod,
        }
    }
}

/// Resolution and solver flags shared by every solving command.
#[derive(Debug, Clone, Args, Serialize)]
pub struct SolverArgs {
    /// Node count.
    #[arg(long = "N", short = 'N', default_value_t = 256)]
    pub n: usize,
    /// Grading degree on curves with corners.
    #[arg(long, short = 'p', default_value_t = 6)]
    pub p: u32,
    /// Singular-value truncation tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Relative imaginary-part threshold for discarding eigenvalues.
    #[arg(long, default_value_t = DEFAULT_IMAG_TOL)]
    pub imag_tol: f64,
    /// Run the rank probe at full resolution.
    #[arg(long)]
    pub full_probe: bool,
}

impl SolverArgs {
    pub fn options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.tol,
            imag_tol: self.imag_tol,
            full_probe: self.full_probe,
            ..SolverOptions::default()
        }
    }

    pub fn disc(&self) -> DiscParams {
        DiscParams::new(self.n, self.p)
    }

    pub fn setup(&self) -> SolverSetup {
        SolverSetup { disc: self.disc(), opts: self.options() }
    }
}

/// Parses `start:stop:count` (inclusive, evenly spaced), a comma list, or a
/// single number.
pub fn parse_grid(s: &str) -> std::result::Result<Vec<f64>, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, n] => {
            let (a, b) = (num(a)?, num(b)?);
            let n: usize = n.trim().parse().map_err(|_| format!("`{n}` is not a count"))?;
            match n {
                0 => Err("grid needs at least one point".into()),
                1 => Ok(vec![a]),
                _ => Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
            }
        }
        [_] => s.split(',').map(num).collect(),
        _ => Err(format!("expected start:stop:count or a comma list, got `{s}`")),
    }
}

pub fn parse_list(s: &str) -> std::result::Result<Vec<usize>, String> {
    s.split(',').map(|t| t.trim().parse().map_err(|_| format!("`{t}` is not a count"))).collect()
}
