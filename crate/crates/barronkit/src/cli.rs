//! Batch front end. Every subcommand prints one JSON report (17 significant
//! digits, config hash, toolkit version) and optionally a CSV table.
//! Exit codes: 0 success, 2 configuration error, 3 numeric failure.

use crate::bounds::{
    big_c_v, c_alpha_beta, coercivity_rho, ellipticity, frak_c_v, inverse_power_index, mu_tilde, nu_t_n, BoundContext,
};
use crate::error::Error;
use crate::grid::{make_radial_grid, FreqFunction, FreqGrid, RadialProfile, RadialScheme};
use crate::operators::{probe_estimate, Estimate};
use crate::potentials::{c_t_n, decompose_low_high, fourier_transform, HamiltonianSpec, PotentialTerm, TermKind};
use crate::solver_verify::{sharpness_experiment, solve_neumann, ResidualGrid};
use crate::spaces::{counterexample_norm, embedding_constant, fl_norm, split_norm, SpaceIndex, SplitIndex, SplitInput};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Parser, Debug)]
#[command(name = "barronkit", version, about = "Barron and Fourier-Lebesgue regularity toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// FL^p_s norms of a sampled function, or sum-space norms of each term
    Norm(Common),
    /// Low/high split of each potential term at --radius
    Decompose(Common),
    /// Every bound constant for a spec
    Constants(Common),
    /// Neumann solve of (H + rho) u = f with a dense cross-check
    Solve(Common),
    /// Decay, tail amplitude, blow-up and residual for exp(-|x|^delta)
    VerifyEigen(Common),
    /// Randomized operator-norm probes against the certified bounds
    Probe(Common),
    /// Embedding constants and the divergence demonstrations
    DemoEmbeddings(Common),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// JSON HamiltonianSpec
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// sampled function (FreqFunction JSON) for norm and solve
    #[arg(long)]
    pub function: Option<PathBuf>,
    /// "kind:radial,count:N,rmax:R" or "kind:tensor,extent:X,count:N"
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub probes: Option<usize>,
    /// high-frequency radius for probes; split radius for decompose
    #[arg(long, allow_hyphen_values = true)]
    pub radius: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    /// comma-separated gamma values for the blow-up fit
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub gammas: Option<Vec<f64>>,
    #[serde(skip)]
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// Parsed --grid value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridSpec {
    Radial { count: usize, rmax: f64 },
    Tensor { extent: f64, count: usize },
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut kind = None;
        let (mut count, mut rmax, mut extent) = (None, None, None);
        for part in s.split(',') {
            let (k, v) = part.split_once(':').ok_or_else(|| format!("expected key:value, got {part:?}"))?;
            let num = || v.trim().parse::<f64>().map_err(|e| format!("{k}: {e}"));
            match k.trim() {
                "kind" => kind = Some(v.trim().to_string()),
                "count" => count = Some(v.trim().parse::<usize>().map_err(|e| format!("count: {e}"))?),
                "rmax" => rmax = Some(num()?),
                "extent" => extent = Some(num()?),
                other => return Err(format!("unknown grid key {other:?}")),
            }
        }
        let count = count.ok_or("grid needs count")?;
        match kind.as_deref() {
            Some("radial") => Ok(GridSpec::Radial { count, rmax: rmax.ok_or("radial grid needs rmax")? }),
            Some("tensor") => Ok(GridSpec::Tensor { count, extent: extent.ok_or("tensor grid needs extent")? }),
            _ => Err("grid kind must be radial or tensor".into()),
        }
    }
}

impl GridSpec {
    fn build(&self, d: usize) -> crate::Result<FreqGrid> {
        match *self {
            GridSpec::Radial { count, rmax } => make_radial_grid(d, rmax, count, RadialScheme::Uniform),
            GridSpec::Tensor { extent, count } => FreqGrid::tensor(d, extent, count),
        }
    }
}

/// Failure of a run, mapped to the exit code.
#[derive(Debug)]
pub enum RunError {
    Config(String),
    Numeric(Error),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Numeric(e)
    }
}

impl RunError {
    pub fn code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numeric(_) => 3,
        }
    }

    fn payload(&self) -> Value {
        match self {
            RunError::Config(m) => json!({ "error": "config_error", "message": m }),
            RunError::Numeric(e) => json!({ "error": e.name(), "message": e.to_string() }),
        }
    }
}

type RunResult<T> = std::result::Result<T, RunError>;

fn config<T>(msg: impl Into<String>) -> RunResult<T> {
    Err(RunError::Config(msg.into()))
}

/// Writes f64 with 17 significant digits.
struct Fixed17;

impl serde_json::ser::Formatter for Fixed17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> std::io::Result<()> {
        write!(w, "{v:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> std::io::Result<()> {
        write!(w, "{:.16e}", v as f64)
    }
}

/// Serialize with every float at 17 significant digits; non-finite values
/// become null.
pub fn to_json_17<T: Serialize>(v: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Fixed17);
    v.serialize(&mut ser).expect("reports serialize");
    String::from_utf8(buf).expect("utf8")
}

/// Inputs that determine a run: the command, its parameters and the contents
/// of every referenced file. Output paths are excluded.
#[derive(Serialize)]
struct ResolvedConfig<'a> {
    command: &'a str,
    params: &'a Common,
    spec: Option<Value>,
    function: Option<Value>,
}

fn read_json(path: &PathBuf) -> RunResult<(String, Value)> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
    Ok((text, v))
}

struct Inputs {
    spec: Option<HamiltonianSpec>,
    function: Option<FreqFunction>,
    grid: Option<GridSpec>,
    hash: String,
}

fn resolve(name: &str, c: &Common) -> RunResult<Inputs> {
    let (spec, spec_v) = match &c.spec {
        Some(p) => {
            let (text, v) = read_json(p)?;
            let s = HamiltonianSpec::from_json(&text).map_err(|e| RunError::Config(format!("spec: {e}")))?;
            (Some(s), Some(v))
        }
        None => (None, None),
    };
    let (function, function_v) = match &c.function {
        Some(p) => {
            let (text, v) = read_json(p)?;
            let f = FreqFunction::from_json(&text).map_err(|e| RunError::Config(format!("function: {e}")))?;
            (Some(f), Some(v))
        }
        None => (None, None),
    };
    let grid = match &c.grid {
        Some(g) => Some(g.parse::<GridSpec>().map_err(RunError::Config)?),
        None => None,
    };
    let resolved = ResolvedConfig { command: name, params: c, spec: spec_v, function: function_v };
    let canon = serde_json::to_string(&resolved).expect("config serializes");
    let hash = Sha256::digest(canon.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    Ok(Inputs { spec, function, grid, hash })
}

fn need_spec(i: &Inputs) -> RunResult<&HamiltonianSpec> {
    i.spec.as_ref().ok_or_else(|| RunError::Config("--spec is required".into()))
}

/// (s, alpha) defaults: the inverse-power index of the most singular power
/// term at gamma, else (0, infinity).
fn default_index(spec: &HamiltonianSpec, gamma: f64) -> (f64, f64) {
    let n = spec.potential.n;
    let t = spec
        .potential
        .one_particle
        .iter()
        .map(|t| &t.term)
        .chain(spec.potential.pairwise.iter().map(|t| &t.term))
        .filter_map(|t| power_of(t))
        .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.max(t))));
    match t.and_then(|t| inverse_power_index(t, n, gamma).ok()) {
        Some((s, a, _)) => (s, a),
        None => (0.0, f64::INFINITY),
    }
}

fn power_of(t: &PotentialTerm) -> Option<f64> {
    match t.kind {
        TermKind::Coulomb => Some(1.0),
        TermKind::InversePower { t } => Some(t),
        _ => None,
    }
}

fn all_terms(spec: &HamiltonianSpec) -> Vec<(String, &PotentialTerm, usize)> {
    let p = &spec.potential;
    let mut v: Vec<(String, &PotentialTerm, usize)> = Vec::new();
    for t in &p.one_particle {
        v.push((format!("one_particle[{}] {}", t.i, t.term.label()), &t.term, p.n));
    }
    for t in &p.pairwise {
        v.push((format!("pairwise[{},{}] {}", t.i, t.j, t.term.label()), &t.term, p.n));
    }
    if let Some(t) = &p.additive {
        v.push((format!("additive {}", t.label()), t, p.total_dim()));
    }
    v
}

fn index_for(c: &Common, spec: Option<&HamiltonianSpec>) -> (f64, f64, f64) {
    let gamma = c.gamma.unwrap_or(0.5);
    let (s0, a0) = spec.map(|s| default_index(s, gamma)).unwrap_or((0.0, f64::INFINITY));
    (c.s.unwrap_or(s0), c.alpha.unwrap_or(a0), gamma)
}

fn beta_for(c: &Common, s: f64, gamma: f64) -> f64 {
    c.beta.unwrap_or(1.0 + (s - gamma) / 2.0)
}

fn csv_write(path: &Option<PathBuf>, header: &str, rows: &[Vec<f64>]) -> RunResult<()> {
    if let Some(p) = path {
        let mut s = String::from(header);
        s.push('\n');
        for r in rows {
            let cells: Vec<String> = r.iter().map(|v| format!("{v:.16e}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        std::fs::write(p, s).map_err(|e| RunError::Config(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn cmd_norm(c: &Common, i: &Inputs) -> RunResult<Value> {
    if let Some(f) = &i.function {
        let s = c.s.unwrap_or(0.0);
        let p = c.p.unwrap_or(1.0);
        let report = fl_norm(f, SpaceIndex::new(s, p)?);
        let split = match c.alpha {
            Some(alpha) => {
                let beta = c.beta.unwrap_or(1.0);
                let n = c.n.unwrap_or(f.grid.dim());
                let idx = SplitIndex::new(s, alpha, beta, n)?;
                Some(split_norm(SplitInput::Sampled(f), &idx, n)?.0)
            }
            None => None,
        };
        return Ok(json!({ "fl_norm": report, "split_norm": split }));
    }
    let spec = need_spec(i)?;
    let (s, alpha, gamma) = index_for(c, Some(spec));
    let beta = beta_for(c, s, gamma);
    let mut out = Vec::new();
    for (label, term, d) in all_terms(spec) {
        let a = if label.starts_with("additive") { f64::INFINITY } else { alpha };
        let idx = SplitIndex::new(s, a, beta, d)?;
        let prof = fourier_transform(term, d)?;
        let (rep, _) = split_norm(SplitInput::Profile(&prof), &idx, d)?;
        out.push(json!({ "term": label, "index": idx, "report": rep }));
    }
    Ok(json!({ "terms": out }))
}

fn cmd_decompose(c: &Common, i: &Inputs) -> RunResult<Value> {
    let spec = need_spec(i)?;
    let (s, alpha, gamma) = index_for(c, Some(spec));
    let beta = beta_for(c, s, gamma);
    let r = c.radius.unwrap_or(1.0);
    let mut out = Vec::new();
    for (label, term, d) in all_terms(spec) {
        let a = if label.starts_with("additive") { f64::INFINITY } else { alpha };
        let idx = SplitIndex::new(s, a, beta, d)?;
        let sp = decompose_low_high(term, d, r, &idx)?;
        out.push(json!({
            "term": label,
            "index": idx,
            "radius": r,
            "method": sp.method.label(),
            "norm_fl1": sp.norm1,
            "norm_fl_alpha_prime": sp.norm2,
        }));
    }
    Ok(json!({ "terms": out }))
}

fn cmd_constants(c: &Common, i: &Inputs) -> RunResult<Value> {
    let spec = need_spec(i)?;
    let n = spec.potential.n;
    let (s, alpha, gamma) = index_for(c, Some(spec));
    let beta = beta_for(c, s, gamma);
    let opt = |r: crate::Result<f64>| -> Value {
        match r {
            Ok(v) => json!(v),
            Err(e) => json!({ "error": e.name(), "message": e.to_string() }),
        }
    };
    let mut powers: Vec<f64> = all_terms(spec).iter().filter_map(|(_, t, _)| power_of(t)).collect();
    powers.sort_by(f64::total_cmp);
    powers.dedup();
    let per_power: Vec<Value> = powers
        .iter()
        .map(|&t| json!({ "t": t, "nu_t_n": opt(nu_t_n(t, n)), "c_t_n": opt(c_t_n(t, n)) }))
        .collect();
    let cv = big_c_v(&spec.potential, s, alpha, beta)?;
    let frak = frak_c_v(&spec.potential, s, alpha, gamma);
    let lam = c.lambda.unwrap_or(0.0);
    let rho = c.rho.unwrap_or(1.0);
    let ctx_l = BoundContext::new(spec.clone(), s, alpha, gamma, lam);
    let ctx_r = BoundContext::new(spec.clone(), s, alpha, gamma, rho);
    let radius = |r: crate::Result<BoundContext>, eigen: bool| match r {
        Ok(ctx) => opt(if eigen { ctx.eigen_radius() } else { ctx.solver_radius() }),
        Err(e) => json!({ "error": e.name(), "message": e.to_string() }),
    };
    let t_bound = match &ctx_l {
        Ok(ctx) => opt(ctx.t_lambda_bound()),
        Err(e) => json!({ "error": e.name(), "message": e.to_string() }),
    };
    let r_bound = match &ctx_r {
        Ok(ctx) => opt(ctx.r_bound()),
        Err(e) => json!({ "error": e.name(), "message": e.to_string() }),
    };
    Ok(json!({
        "index": { "s": s, "alpha": alpha, "beta": beta, "gamma": gamma },
        "c_alpha_beta": opt(c_alpha_beta(alpha, beta, n)),
        "powers": per_power,
        "nu_t_n": per_power.first().map(|v| v["nu_t_n"].clone()),
        "big_c_v": cv,
        "frak_c_v": match frak { Ok(f) => json!(f), Err(e) => json!({ "error": e.name(), "message": e.to_string() }) },
        "mu_tilde_1": opt(mu_tilde(&spec.masses, 1.0)),
        "mu_tilde_rho": opt(mu_tilde(&spec.masses, rho)),
        "ellipticity": ellipticity(&spec.masses),
        "coercivity_rho": opt(coercivity_rho(spec, s, alpha, gamma)),
        "lambda": lam,
        "rho": rho,
        "t_lambda_bound": t_bound,
        "r_bound": r_bound,
        "eigen_radius": radius(ctx_l, true),
        "solver_radius": radius(ctx_r, false),
    }))
}

fn cmd_solve(c: &Common, i: &Inputs) -> RunResult<Value> {
    let spec = need_spec(i)?;
    let (s, alpha, gamma) = index_for(c, Some(spec));
    let rho = c.rho.unwrap_or(1.0);
    let ctx = BoundContext::new(spec.clone(), s, alpha, gamma, rho)?;
    let d = spec.potential.total_dim();
    let f = match &i.function {
        Some(f) => f.clone(),
        None => {
            let g = i.grid.unwrap_or(GridSpec::Tensor { extent: 4.0, count: 33 }).build(d)?;
            FreqFunction::from_profile(&g, &RadialProfile::Gaussian { c: 1.0, w: 1.0 })
        }
    };
    let tol = c.tol.unwrap_or(1e-10);
    let (rep, _) = solve_neumann(&ctx, &f, tol, c.max_iter.unwrap_or(500))?;
    let rows: Vec<Vec<f64>> = rep.residual_history.iter().enumerate().map(|(k, r)| vec![(k + 1) as f64, *r]).collect();
    csv_write(&c.csv, "iteration,residual", &rows)?;
    Ok(json!({ "index": { "s": s, "alpha": alpha, "gamma": gamma, "rho": rho, "tol": tol }, "report": rep, "iteration_bound": rep.iteration_bound(tol) }))
}

fn cmd_verify_eigen(c: &Common, i: &Inputs) -> RunResult<Value> {
    let delta = c.delta.unwrap_or(1.0);
    let n = c.n.unwrap_or(3);
    let gammas = c.gammas.clone().unwrap_or_else(|| vec![delta - 0.1, delta - 0.05, delta - 0.01]);
    let rg = match i.grid {
        Some(GridSpec::Radial { count, rmax }) => ResidualGrid { r_max: rmax, count, window: c.radius.unwrap_or(rmax / 2.0) },
        Some(GridSpec::Tensor { .. }) => return config("verify-eigen needs a radial grid"),
        None => ResidualGrid::default(),
    };
    let rep = sharpness_experiment(delta, n, &gammas, Some(rg))?;
    if let Some(b) = &rep.barron_blowup_fit {
        let rows: Vec<Vec<f64>> = b.norms.iter().map(|(g, v)| vec![*g, *v]).collect();
        csv_write(&c.csv, "gamma,norm", &rows)?;
    }
    Ok(json!({ "report": rep }))
}

fn cmd_probe(c: &Common, i: &Inputs) -> RunResult<Value> {
    let spec = need_spec(i)?;
    let (s, alpha, gamma) = index_for(c, Some(spec));
    let d = spec.potential.total_dim();
    let g = i.grid.unwrap_or(GridSpec::Tensor { extent: 4.0, count: 41 }).build(d)?;
    let probes = c.probes.unwrap_or(200);
    let k = c.radius.unwrap_or(1.0);
    let p = c.p.unwrap_or(1.0);
    let lam = c.lambda.unwrap_or(0.0);
    let rho = c.rho.unwrap_or(1.0);
    let mut out = Vec::new();
    let mut rows = Vec::new();
    for (e, est) in Estimate::ALL.iter().enumerate() {
        let resolvent = matches!(est, Estimate::Resolvent | Estimate::HighResolventBarron | Estimate::HighResolventSobolev);
        let ctx = BoundContext::new(spec.clone(), s, alpha, gamma, if resolvent { rho } else { lam })?.with_p(p)?;
        let r = probe_estimate(*est, &ctx, &g, k, probes, c.seed)?;
        rows.push(vec![e as f64, r.empirical, r.certified.unwrap_or(f64::NAN)]);
        out.push(json!({ "estimate": est, "holds": r.holds(), "report": r }));
    }
    csv_write(&c.csv, "estimate,empirical,certified", &rows)?;
    Ok(json!({ "index": { "s": s, "alpha": alpha, "gamma": gamma, "p": p, "k": k }, "probes": out }))
}

/// Counterexample growth, embedding constants, and the Coulomb B^-1 partial
/// integrals against the sum-space norm under extent doubling.
fn cmd_demo_embeddings(c: &Common, _i: &Inputs) -> RunResult<Value> {
    let n = c.n.unwrap_or(1);
    let mut family = Vec::new();
    let mut rows = Vec::new();
    let nf = n as f64;
    // critical line s2 - n/alpha2 = s1 - n/alpha1 with (s1, alpha1) = (0, 1)
    let s2 = -nf + nf / 2.0;
    for j in 0..=6 {
        let k = 10f64.powi(j);
        let ce = counterexample_norm(k, 0.0, 1.0, s2, 2.0, n)?;
        rows.push(vec![k, ce.upper_src, ce.lower_dst]);
        family.push(ce);
    }
    csv_write(&c.csv, "k,upper_src,lower_dst", &rows)?;
    let consts: Vec<Value> = [((1.0, 1.0), (0.0, 2.0)), ((2.0, 2.0), (0.0, 4.0)), ((1.0, 2.0), (0.0, 4.0)), ((0.0, 1.0), (s2, 2.0))]
        .iter()
        .map(|(src, dst)| match embedding_constant(*src, *dst, n) {
            Ok(v) => json!({ "src": src, "dst": dst, "constant": v }),
            Err(e) => json!({ "src": src, "dst": dst, "error": e.name() }),
        })
        .collect();
    let coulomb = coulomb_doubling(&[25.0, 50.0, 100.0, 200.0, 400.0])?;
    Ok(json!({ "critical_s2": s2, "counterexample": family, "embedding_constants": consts, "coulomb_doubling": coulomb }))
}

/// One extent of the Coulomb doubling demonstration.
#[derive(Clone, Debug, Serialize)]
pub struct DoublingRow {
    pub extent: f64,
    /// int_{|xi| <= extent} <xi>^-1 |V_hat|
    pub partial_b_minus_1: f64,
    /// split norm at (s, alpha, beta) = (0, 2, 1) of the samples on the grid
    pub split_norm: f64,
}

/// Coulomb potential in R^3 sampled on radial grids of growing extent.
pub fn coulomb_doubling(extents: &[f64]) -> crate::Result<Vec<DoublingRow>> {
    let term = PotentialTerm::new(TermKind::Coulomb);
    let prof = fourier_transform(&term, 3)?;
    let idx = SplitIndex::new(0.0, 2.0, 1.0, 3)?;
    extents
        .iter()
        .map(|&r| {
            let g = make_radial_grid(3, r, (400.0 * r) as usize, RadialScheme::LogUniform)?;
            let f = FreqFunction::from_profile(&g, &prof);
            let partial = fl_norm(&f, SpaceIndex::barron(-1.0)).value;
            let (rep, _) = split_norm(SplitInput::Sampled(&f), &idx, 3)?;
            Ok(DoublingRow { extent: r, partial_b_minus_1: partial, split_norm: rep.value })
        })
        .collect()
}

/// Execute one parsed command; returns the report JSON.
pub fn execute(cmd: &Command) -> RunResult<String> {
    let (name, c) = match cmd {
        Command::Norm(c) => ("norm", c),
        Command::Decompose(c) => ("decompose", c),
        Command::Constants(c) => ("constants", c),
        Command::Solve(c) => ("solve", c),
        Command::VerifyEigen(c) => ("verify-eigen", c),
        Command::Probe(c) => ("probe", c),
        Command::DemoEmbeddings(c) => ("demo-embeddings", c),
    };
    let inputs = resolve(name, c)?;
    let result = match cmd {
        Command::Norm(c) => cmd_norm(c, &inputs)?,
        Command::Decompose(c) => cmd_decompose(c, &inputs)?,
        Command::Constants(c) => cmd_constants(c, &inputs)?,
        Command::Solve(c) => cmd_solve(c, &inputs)?,
        Command::VerifyEigen(c) => cmd_verify_eigen(c, &inputs)?,
        Command::Probe(c) => cmd_probe(c, &inputs)?,
        Command::DemoEmbeddings(c) => cmd_demo_embeddings(c, &inputs)?,
    };
    let report = json!({
        "tool": "barronkit",
        "version": env!("CARGO_PKG_VERSION"),
        "command": name,
        "config_hash": inputs.hash,
        "config": c,
        "result": result,
    });
    let text = to_json_17(&report);
    if let Some(p) = &c.out {
        std::fs::write(p, &text).map_err(|e| RunError::Config(format!("{}: {e}", p.display())))?;
    }
    Ok(text)
}

/// Parse arguments, run, print, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(text) => {
            println!("{text}");
            0
        }
        Err(e) => {
            eprintln!("{}", to_json_17(&e.payload()));
            e.code()
        }
    }
}
