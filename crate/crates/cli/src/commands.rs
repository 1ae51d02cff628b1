use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use steklov::eigensolver::{mre, rank_probe, solve, Method};
use steklov::geometry::NamedShape;
use steklov::io::{fmt17, to_json, write_csv, write_csv_to, write_json};
use steklov::optimize::{optimize_shape, parse_objective, Direction, SwarmConfig};
use steklov::oracle::{disk_spectrum, square_spectrum, DiskSpectrumQuery};
use steklov::spectral_geometry::{
    annulus_sweep, evaluate_functional_full, negative_count_sweep, quasimode_deviation, quasimodes,
    FunctionalSpec, QuasimodeShape, SolverSetup,
};
use steklov::{Error, Result};

use crate::args::{parse_grid, parse_list, MethodArg, ShapeArgs, SolverArgs};
use crate::manifest::{ManifestBuilder, SolverMeta};

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    match out {
        Some(p) => write_json(p, value),
        None => {
            println!("{}", to_json(value)?);
            Ok(())
        }
    }
}

fn emit_csv(out: Option<&Path>, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    match out {
        Some(p) => write_csv(p, header, rows),
        None => write_csv_to(std::io::stdout().lock(), header, rows),
    }
}

fn finish(m: ManifestBuilder, meta: SolverMeta, outputs: &[Option<&Path>]) -> Result<()> {
    let files: Vec<&Path> = outputs.iter().flatten().copied().collect();
    if files.is_empty() {
        return Ok(());
    }
    m.finish(meta, &files)
}

fn setup_meta(setup: &SolverSetup) -> SolverMeta {
    SolverMeta { n: Some(setup.disc.n), p: Some(setup.disc.p), tol: Some(setup.opts.tol), rank_deficiency: None }
}

#[derive(Debug, Args, Serialize)]
pub struct SpectrumCmd {
    #[command(flatten)]
    shape: ShapeArgs,
    #[arg(long)]
    mu: f64,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Biomod)]
    method: MethodArg,
    /// Output JSON file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SpectrumCmd {
    pub fn run(&self) -> Result<()> {
        let m = ManifestBuilder::new("spectrum", self);
        let curve = self.shape.build()?;
        let opts = self.solver.options();
        let method = Method::from(self.method);
        if method == Method::Bio {
            let count = rank_probe(&curve, &self.solver.disc(), self.mu, &opts)?;
            if count > 0 {
                return Err(Error::SingularSingleLayer { count, tol: opts.tol });
            }
        }
        let s = solve(&curve, &self.solver.disc(), self.mu, method, &opts)?;
        emit_json(self.out.as_deref(), &s)?;
        finish(m, SolverMeta::from_spectrum(&s), &[self.out.as_deref()])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum ReferenceKind {
    Oracle,
    Finegrid,
}

#[derive(Debug, Args, Serialize)]
pub struct ConvergenceCmd {
    #[command(flatten)]
    shape: ShapeArgs,
    #[arg(long)]
    mu: f64,
    /// Comma-separated node counts.
    #[arg(long = "N-list", value_parser = parse_list)]
    n_list: std::vec::Vec<usize>,
    /// Number of eigenvalues in the mean relative error.
    #[arg(long = "Q", short = 'Q', default_value_t = 16)]
    q: usize,
    #[arg(long, value_enum, default_value_t = ReferenceKind::Oracle)]
    reference: ReferenceKind,
    /// Resolution of the self-reference.
    #[arg(long = "finegrid-N", default_value_t = 2048)]
    finegrid_n: usize,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Biomod)]
    method: MethodArg,
    /// Output CSV file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ConvergenceCmd {
    fn reference(&self) -> Result<Vec<f64>> {
        let opts = self.solver.options();
        match self.reference {
            ReferenceKind::Finegrid => {
                let curve = self.shape.build()?;
                let s = solve(&curve, &self.solver.disc().with_n(self.finegrid_n), self.mu, self.method.into(), &opts)?;
                Ok(s.finite().to_vec())
            }
            ReferenceKind::Oracle => match self.shape.config()?.to_shape()? {
                NamedShape::Disk { radius } => disk_spectrum(&DiskSpectrumQuery::new(self.mu, radius, self.q)),
                NamedShape::Square { side } => Ok(square_spectrum(side, self.mu, self.q)?.values),
                _ => Err(Error::InvalidParameter(
                    "analytic references exist for disk and square only; use --reference finegrid".into(),
                )),
            },
        }
    }

    pub fn run(&self) -> Result<()> {
        let m = ManifestBuilder::new("convergence", self);
        if self.n_list.is_empty() {
            return Err(Error::InvalidParameter("--N-list is empty".into()));
        }
        let reference = self.reference()?;
        if reference.len() < self.q {
            return Err(Error::InvalidParameter(format!(
                "Q = {} exceeds the {} reference eigenvalues",
                self.q,
                reference.len()
            )));
        }
        let curve = self.shape.build()?;
        let opts = self.solver.options();
        let mut rows = Vec::new();
        for &n in &self.n_list {
            let s = solve(&curve, &self.solver.disc().with_n(n), self.mu, self.method.into(), &opts)?;
            let e = mre(s.finite(), &reference, self.q)?;
            rows.push(vec![n.to_string(), fmt17(e)]);
        }
        let header = ["N", &format!("MRE_{}", self.q)];
        emit_csv(self.out.as_deref(), &header, &rows)?;
        finish(
            m,
            SolverMeta { n: None, p: Some(self.solver.p), tol: Some(self.solver.tol), rank_deficiency: None },
            &[self.out.as_deref()],
        )
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SweepCmd {
    #[command(flatten)]
    shape: ShapeArgs,
    /// Wavenumbers as start:stop:count or a comma list.
    #[arg(long, value_parser = parse_grid)]
    mu: std::vec::Vec<f64>,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SweepCmd {
    pub fn run(&self) -> Result<()> {
        let m = ManifestBuilder::new("sweep", self);
        let curve = self.shape.build()?;
        let setup = self.solver.setup();
        let rows: Vec<Vec<String>> = negative_count_sweep(&curve, &self.mu, &setup)
            .iter()
            .map(|r| vec![fmt17(r.mu), r.count.map(|c| c.to_string()).unwrap_or_default(), fmt17(r.prediction)])
            .collect();
        emit_csv(self.out.as_deref(), &["mu", "negative_count", "perimeter_mu_over_2pi"], &rows)?;
        finish(m, setup_meta(&setup), &[self.out.as_deref()])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum QuasimodeShapeArg {
    Square,
    IsocelesTriangle,
}

#[derive(Debug, Args, Serialize)]
pub struct QuasimodeCmd {
    #[arg(long, value_enum)]
    shape: QuasimodeShapeArg,
    #[arg(long)]
    mu: f64,
    #[arg(long, default_value_t = 100)]
    k_max: usize,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl QuasimodeCmd {
    pub fn run(&self) -> Result<()> {
        let m = ManifestBuilder::new("quasimode", self);
        let shape = match self.shape {
            QuasimodeShapeArg::Square => QuasimodeShape::Square,
            QuasimodeShapeArg::IsocelesTriangle => QuasimodeShape::IsoscelesTriangle,
        };
        let setup = self.solver.setup();
        let dev = quasimode_deviation(shape, self.mu, self.k_max, &setup)?;
        let qm = quasimodes(shape, self.k_max);
        let rows: Vec<Vec<String>> = dev
            .iter()
            .zip(&qm)
            .enumerate()
            .map(|(i, (d, q))| vec![(i + 1).to_string(), fmt17(*q), fmt17(*d)])
            .collect();
        emit_csv(self.out.as_deref(), &["k", "quasimode", "relative_deviation"], &rows)?;
        finish(m, setup_meta(&setup), &[self.out.as_deref()])
    }
}

/// JSON written by `functional --out`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalOutput {
    pub spec: FunctionalSpec,
    pub mu: f64,
    pub scaled_mu: f64,
    pub value: f64,
    pub rank_deficiency: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct FunctionalCmd {
    /// F_k: perimeter-scaled eigenvalue at the area-scaled wavenumber.
    #[arg(long = "F", group = "family")]
    f: bool,
    /// G_k: perimeter scaling for both.
    #[arg(long = "G", group = "family")]
    g: bool,
    /// Custom exponents alpha,beta,gamma,delta.
    #[arg(long, group = "family", value_parser = parse_grid)]
    exponents: Option<std::vec::Vec<f64>>,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long)]
    mu: f64,
    #[command(flatten)]
    shape: ShapeArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl FunctionalCmd {
    fn spec(&self) -> Result<FunctionalSpec> {
        match (&self.exponents, self.g) {
            (Some(e), _) => match e.as_slice() {
                &[a, b, g, d] => FunctionalSpec::new(a, b, g, d, self.k),
                _ => Err(Error::InvalidParameter("--exponents takes alpha,beta,gamma,delta".into())),
            },
            (None, true) => FunctionalSpec::g(self.k),
            (None, false) => FunctionalSpec::f(self.k),
        }
    }

    pub fn run(&self) -> Result<()> {
        let m = ManifestBuilder::new("functional", self);
        let spec = self.spec()?;
        let curve = self.shape.build()?;
        let v = evaluate_functional_full(&spec, &curve, self.mu, &self.solver.setup())?;
        println!("{}", fmt17(v.value));
        if let Some(out) = &self.out {
            let o = FunctionalOutput {
                spec,
                mu: self.mu,
                scaled_mu: v.scaled_mu,
                value: v.value,
                rank_deficiency: v.spectrum.rank_deficiency,
            };
            write_json(out, &o)?;
        }
        finish(m, SolverMeta::from_spectrum(&v.spectrum), &[self.out.as_deref()])
    }
}

#[derive(Debug, Args, Serialize)]
pub struct AnnulusCmd {
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Wavenumbers as start:stop:count or a comma list.
    #[arg(long, value_parser = parse_grid)]
    mu: std::vec::Vec<f64>,
    /// Inner radii as start:stop:count or a comma list.
    #[arg(long, value_parser = parse_grid)]
    eps: std::vec::Vec<f64>,
    #[command(flatten)]
    solver: SolverArgs,
    /// Values CSV (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sign table CSV; defaults to `<out>` with a `.sign.csv` suffix.
    #[arg(long)]
    sign_out: Option<PathBuf>,
}

impl AnnulusCmd {
    pub fn run(&self) -> Result<()> {
        let m = ManifestBuilder::new("annulus", self);
        let setup = self.solver.setup();
        let table = annulus_sweep(&self.eps, &self.mu, self.k, &setup)?;
        let header = table.header();
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        emit_csv(self.out.as_deref(), &header, &table.value_rows())?;
        let sign = self.sign_out.clone().or_else(|| self.out.as_ref().map(|o| o.with_extension("sign.csv")));
        match &sign {
            Some(p) => table.write_signs_csv(p)?,
            None => {
                println!();
                write_csv_to(std::io::stdout().lock(), &header, &table.sign_rows())?;
            }
        }
        std::io::stdout().flush()?;
        finish(m, setup_meta(&setup), &[self.out.as_deref(), sign.as_deref()])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum DirectionArg {
    Max,
    Min,
}

#[derive(Debug, Args, Serialize)]
pub struct OptimizeCmd {
    /// F<k> or G<k>.
    #[arg(long, default_value = "F2")]
    objective: String,
    #[arg(long, value_enum, default_value_t = DirectionArg::Max)]
    direction: DirectionArg,
    #[arg(long)]
    mu: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 40)]
    particles: usize,
    #[arg(long, default_value_t = 100)]
    iterations: usize,
    #[arg(long, default_value_t = 4)]
    n_modes: usize,
    #[arg(long, default_value_t = 0.9)]
    inertia_start: f64,
    #[arg(long, default_value_t = 0.4)]
    inertia_end: f64,
    #[arg(long, default_value_t = 1.5)]
    cognitive: f64,
    #[arg(long, default_value_t = 1.5)]
    social: f64,
    #[arg(long, default_value_t = 0.05)]
    max_velocity: f64,
    #[arg(long = "search-N", default_value_t = steklov::optimize::SEARCH_N)]
    search_n: usize,
    /// Resolution of the final re-evaluation; 0 skips it.
    #[arg(long = "refine-N", default_value_t = steklov::optimize::REFINE_N)]
    refine_n: usize,
    #[arg(long, default_value_t = steklov::eigensolver::DEFAULT_TOL)]
    tol: f64,
    /// Result JSON (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-iteration best values as CSV.
    #[arg(long)]
    history: Option<PathBuf>,
}

impl OptimizeCmd {
    fn config(&self) -> Result<SwarmConfig> {
        let direction = match self.direction {
            DirectionArg::Max => Direction::Max,
            DirectionArg::Min => Direction::Min,
        };
        let setup = |n: usize| SolverSetup {
            opts: steklov::eigensolver::SolverOptions::default().with_tol(self.tol),
            ..SolverSetup::new(n, 6)
        };
        Ok(SwarmConfig {
            particles: self.particles,
            iterations: self.iterations,
            inertia: (self.inertia_start, self.inertia_end),
            cognitive: self.cognitive,
            social: self.social,
            n_modes: self.n_modes,
            seed: self.seed,
            objective: parse_objective(&self.objective, direction)?,
            mu: self.mu,
            max_velocity: self.max_velocity,
            search: setup(self.search_n),
            refine: (self.refine_n > 0).then(|| setup(self.refine_n)),
        })
    }

    pub fn run(&self) -> Result<()> {
        let m = ManifestBuilder::new("optimize", self);
        let config = self.config()?;
        let result = optimize_shape(&config)?;
        emit_json(self.out.as_deref(), &result)?;
        if let Some(h) = &self.history {
            result.write_history_csv(h)?;
        }
        finish(m, setup_meta(&config.search), &[self.out.as_deref(), self.history.as_deref()])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum OracleShapeArg {
    Disk,
    Square,
}

#[derive(Debug, Args, Serialize)]
pub struct OracleCmd {
    #[arg(long, value_enum)]
    shape: OracleShapeArg,
    /// Disk radius or square side.
    #[arg(long, default_value_t = 1.0)]
    size: f64,
    #[arg(long)]
    mu: f64,
    #[arg(long, default_value_t = 50)]
    count: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OracleCmd {
    pub fn run(&self) -> Result<()> {
        let m = ManifestBuilder::new("oracle", self);
        let values = match self.shape {
            OracleShapeArg::Disk => disk_spectrum(&DiskSpectrumQuery::new(self.mu, self.size, self.count))?,
            OracleShapeArg::Square => {
                let s = square_spectrum(self.size, self.mu, self.count)?;
                let mut v = vec![f64::NEG_INFINITY; s.sentinels];
                v.extend(s.values);
                v.truncate(self.count);
                v
            }
        };
        let rows: Vec<Vec<String>> =
            values.iter().enumerate().map(|(i, v)| vec![(i + 1).to_string(), fmt17(*v)]).collect();
        emit_csv(self.out.as_deref(), &["index", "value"], &rows)?;
        finish(m, SolverMeta::default(), &[self.out.as_deref()])
    }
}
