//! Neumann and dense solvers for (H + rho) u = f, the high/low frequency
//! bootstrap, eigen residuals and the decay/blow-up experiments for the
//! exp(-|x|^delta) family.

use crate::bounds::{solve_certificate, BoundContext, SolveCertificate};
use crate::error::{invalid, Error, Result};
use crate::grid::{convolution_matrix, make_radial_grid, FreqFunction, FreqGrid, Kernel, RadialScheme, Structure};
use crate::operators::{apply_h0_inverse, apply_multiply_v, apply_t_lambda, project_high, symbol_h0, term_kernel};
use crate::potentials::{sharp_example_potential, sharp_wavefunction_hat, HamiltonianSpec, PotentialSpec};
use crate::spaces::{fl_norm, SpaceIndex};
use crate::special::{bracket, gamma, linear_fit, sphere_area};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest grid the dense solver accepts.
pub const MAX_DENSE: usize = 4096;

fn b_norm(u: &FreqFunction, s: f64) -> f64 {
    fl_norm(u, SpaceIndex::barron(s)).value
}

/// Dense matrix of u -> F(V u) on `grid`.
pub fn potential_matrix(spec: &PotentialSpec, grid: &FreqGrid) -> Result<DMatrix<f64>> {
    let len = grid.len();
    let d = spec.total_dim();
    if grid.dim() != d {
        return Err(Error::DimensionMismatch(format!("grid dimension {} differs from nN = {d}", grid.dim())));
    }
    let mut m = vec![0.0; len * len];
    let mut add = |k: Vec<f64>| {
        for (a, b) in m.iter_mut().zip(k) {
            *a += b;
        }
    };
    for t in &spec.one_particle {
        let p = term_kernel(&t.term, spec.n)?;
        add(convolution_matrix(Kernel::Profile(&p), grid, Structure::OneParticle(t.i), spec.n)?);
    }
    for t in &spec.pairwise {
        let p = term_kernel(&t.term, spec.n)?;
        add(convolution_matrix(Kernel::Profile(&p), grid, Structure::Pairwise(t.i, t.j), spec.n)?);
    }
    if let Some(t) = &spec.additive {
        let p = term_kernel(t, d)?;
        add(convolution_matrix(Kernel::Profile(&p), grid, Structure::Additive, spec.n)?);
    }
    Ok(DMatrix::from_row_slice(len, len, &m))
}

/// Solve a real matrix against a complex right-hand side.
fn lu_solve(a: DMatrix<f64>, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    let len = rhs.len();
    let lu = a.clone().lu();
    let u = lu.u();
    let diag: Vec<f64> = (0..len).map(|i| u[(i, i)].abs()).collect();
    let big = diag.iter().cloned().fold(0.0, f64::max);
    let small = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(small > 1e-13 * big) {
        return Err(Error::SingularSystem(format!("pivot ratio {:.3e}", small / big)));
    }
    let mut b = DMatrix::<f64>::zeros(len, 2);
    for (i, v) in rhs.iter().enumerate() {
        b[(i, 0)] = v.re;
        b[(i, 1)] = v.im;
    }
    let x = lu.solve(&b).ok_or_else(|| Error::SingularSystem("zero pivot".into()))?;
    let res = &a * &x - &b;
    let scale = b.norm().max(f64::MIN_POSITIVE);
    if res.norm() > 1e-10 * scale.max(1.0) {
        return Err(Error::SingularSystem(format!("linear residual {:.3e}", res.norm() / scale)));
    }
    Ok((0..len).map(|i| Complex64::new(x[(i, 0)], x[(i, 1)])).collect())
}

/// Dense solve of the discretized u + R u = (H0 + rho)^-1 f.
pub fn solve_direct(spec: &HamiltonianSpec, rho: f64, f: &FreqFunction) -> Result<FreqFunction> {
    let len = f.len();
    if len > MAX_DENSE {
        return Err(Error::UnsupportedScale(format!("{len} samples exceed the dense limit {MAX_DENSE}")));
    }
    let rhs = apply_h0_inverse(f, spec, rho)?;
    if spec.potential.is_empty() {
        return Ok(rhs);
    }
    let h = symbol_h0(&f.grid, spec)?;
    let mut a = potential_matrix(&spec.potential, &f.grid)?;
    for i in 0..len {
        let den = h[i] - 1.0 + rho;
        for j in 0..len {
            a[(i, j)] /= den;
        }
        a[(i, i)] += 1.0;
    }
    let x = lu_solve(a, &rhs.values)?;
    FreqFunction::new(f.grid.clone(), x, f.radial)
}

/// ||T_lambda psi - psi||_{B^0} on the grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub absolute: f64,
    pub relative: f64,
    /// psi vanishes on the grid
    pub degenerate: bool,
}

pub fn eigen_residual(spec: &HamiltonianSpec, psi: &FreqFunction, lambda: f64) -> Result<Residual> {
    if spec.potential.total_dim() > 3 {
        return Err(Error::UnsupportedScale("nN exceeds 3".into()));
    }
    let norm = b_norm(psi, 0.0);
    if norm == 0.0 {
        return Ok(Residual { absolute: 0.0, relative: 0.0, degenerate: true });
    }
    let r = apply_t_lambda(psi, lambda, spec)?.sub(psi)?;
    let absolute = b_norm(&r, 0.0);
    Ok(Residual { absolute, relative: absolute / norm, degenerate: false })
}

/// Samples of the transform of exp(-|x|^delta) on a uniform radial grid in R^3.
pub fn sharp_wavefunction(delta: f64, r_max: f64, count: usize) -> Result<FreqFunction> {
    let g = make_radial_grid(3, r_max, count, RadialScheme::Uniform)?;
    let FreqGrid::Radial(rg) = &g else { unreachable!() };
    let values: Result<Vec<Complex64>> =
        rg.nodes.par_iter().map(|r| sharp_wavefunction_hat(delta, 3, *r).map(|v| Complex64::new(v, 0.0))).collect();
    Ok(FreqFunction::new(g, values?, true)?.with_decay(Some(3.0 + delta)))
}

/// Contraction data behind a solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// mu~_rho C(V), or 1/2 for the split series
    pub q: f64,
    pub mu_tilde: f64,
    pub c_v: f64,
    /// high-frequency radius of the split series
    pub k: Option<f64>,
    /// q/(1-q) times the last increment
    pub a_posteriori: f64,
    /// ||g||_gamma + q ||g||_|s| /(1-q) with g = (H0 + rho)^-1 f
    pub neumann_bound: f64,
    /// the high/low frequency bound on ||u||_{B^gamma}, when rho clears the
    /// coercivity threshold
    pub split_bound: Option<SolveCertificate>,
    pub split_bound_note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinalNorms {
    pub barron_abs_s: f64,
    pub barron_gamma: f64,
    pub barron_s_plus_2: f64,
    pub h1: f64,
}

impl FinalNorms {
    fn of(u: &FreqFunction, s: f64, g: f64) -> Self {
        FinalNorms {
            barron_abs_s: b_norm(u, s.abs()),
            barron_gamma: b_norm(u, g),
            barron_s_plus_2: b_norm(u, s + 2.0),
            h1: fl_norm(u, SpaceIndex::sobolev(1.0)).value,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    /// ||u_{k+1} - u_k|| in B^{|s|}
    pub residual_history: Vec<f64>,
    pub certificate: Certificate,
    pub final_norms: FinalNorms,
    /// relative B^0 distance to the dense solve
    pub oracle_error: Option<f64>,
}

impl SolveReport {
    /// ceil(log(tol/||u_1 - u_0||)/log q) + 1, the iteration count the
    /// contraction guarantees.
    pub fn iteration_bound(&self, tol: f64) -> usize {
        let first = self.residual_history.first().copied().unwrap_or(0.0);
        if first <= tol {
            return 1;
        }
        ((tol / first).ln() / self.certificate.q.ln()).ceil() as usize + 1
    }
}

/// u_{k+1} = (H0 + rho)^-1 (f - V u_k) from u_0 = (H0 + rho)^-1 f, with
/// rho = ctx.lambda_or_rho and increments measured in B^{|s|}.
pub fn solve_neumann(ctx: &BoundContext, f: &FreqFunction, tol: f64, max_iter: usize) -> Result<(SolveReport, FreqFunction)> {
    if !(tol > 0.0) {
        return invalid(format!("tol must be positive, got {tol}"));
    }
    let spec = &ctx.spec;
    if spec.potential.total_dim() > 3 {
        return Err(Error::UnsupportedScale("nN exceeds 3".into()));
    }
    let rho = ctx.lambda_or_rho;
    let mu = ctx.mu_tilde(rho)?;
    let q = mu * ctx.c();
    if !(q < 1.0) {
        return Err(Error::NoContraction(q));
    }
    let sa = ctx.s.abs();
    let g = apply_h0_inverse(f, spec, rho)?;
    let mut u = g.clone();
    let mut history = Vec::new();
    let mut converged = false;
    while history.len() < max_iter {
        let next = g.sub(&apply_h0_inverse(&apply_multiply_v(&u, &spec.potential)?, spec, rho)?)?;
        let step = b_norm(&next.sub(&u)?, sa);
        u = next;
        history.push(step);
        if step <= tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NotConverged(max_iter));
    }
    let last = *history.last().unwrap_or(&0.0);
    let (split_bound, note) = match solve_certificate(ctx, b_norm(f, ctx.gamma - 2.0), fl_norm(f, SpaceIndex::sobolev(-1.0)).value) {
        Ok(c) => (Some(c), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let certificate = Certificate {
        q,
        mu_tilde: mu,
        c_v: ctx.c(),
        k: None,
        a_posteriori: q / (1.0 - q) * last,
        neumann_bound: b_norm(&g, ctx.gamma) + q * b_norm(&g, sa) / (1.0 - q),
        split_bound,
        split_bound_note: note,
    };
    let oracle_error = if f.len() <= MAX_DENSE {
        let d = solve_direct(spec, rho, f)?;
        let den = b_norm(&d, 0.0);
        Some(if den > 0.0 { b_norm(&u.sub(&d)?, 0.0) / den } else { b_norm(&u, 0.0) })
    } else {
        None
    };
    let report = SolveReport {
        converged,
        iterations: history.len(),
        residual_history: history,
        certificate,
        final_norms: FinalNorms::of(&u, ctx.s, ctx.gamma),
        oracle_error,
    };
    Ok((report, u))
}

/// Which fixed-point equation the bootstrap series inverts.
#[derive(Clone, Debug, PartialEq)]
pub enum BootstrapData<'a> {
    /// psi = T_lambda psi with lambda = ctx.lambda_or_rho
    Eigen { psi: &'a FreqFunction },
    /// u + R u = (H0 + rho)^-1 f with rho = ctx.lambda_or_rho; `u` supplies
    /// the low frequencies
    Solve { f: &'a FreqFunction, u: &'a FreqFunction },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapReport {
    pub k: f64,
    /// certified bound on the high-frequency operator in B^{|s|}
    pub certified_ratio: f64,
    /// ||term_m||_{B^{|s|}}
    pub term_norms: Vec<f64>,
    /// ||v - S_m||_{B^{|s|}} against the dense solution v
    pub partial_errors: Vec<f64>,
    pub max_error_ratio: f64,
    /// ||v||_{B^{|s|}}, the reconstructed high part
    pub high_norm: f64,
    /// ||data - P_K data||_{B^{|s|}}
    pub low_norm: f64,
    /// relative B^{|s|} distance between the series limit and the dense solve
    pub reconstruction_error: f64,
    /// relative B^{|s|} distance between P_K v and P_K of the supplied data
    pub data_error: f64,
    pub low_frequency_bound: f64,
    pub low_part_l2_weighted: f64,
}

/// Reconstruct the high frequencies from the low ones through
/// v = sum_k A^k b with A = P_K T_lambda or -P_K R. K defaults to the
/// certified radius; the series is summed until a term drops below `tol`.
pub fn bootstrap_series(ctx: &BoundContext, data: BootstrapData<'_>, k: Option<f64>, tol: f64, max_terms: usize) -> Result<BootstrapReport> {
    let spec = &ctx.spec;
    let sa = ctx.s.abs();
    let (k, certified_ratio) = match k {
        Some(k) => (k, f64::NAN),
        None => match data {
            BootstrapData::Eigen { .. } => (ctx.eigen_radius()?, 0.5),
            BootstrapData::Solve { .. } => (ctx.solver_radius()?, 0.5),
        },
    };
    let lr = ctx.lambda_or_rho;
    // drop known tails so that the dense matrix and the series see one operator
    let strip = |x: &FreqFunction| x.clone().with_decay(None);
    let (grid, b, reference, low_data) = match data {
        BootstrapData::Eigen { psi } => {
            let psi = strip(psi);
            let low = psi.sub(&project_high(&psi, k)?)?;
            (psi.grid.clone(), low.clone(), project_high(&psi, k)?, low)
        }
        BootstrapData::Solve { f, u } => {
            let u = strip(u);
            let low = u.sub(&project_high(&u, k)?)?;
            let g = apply_h0_inverse(&strip(f), spec, lr)?;
            let ru = apply_h0_inverse(&apply_multiply_v(&low, &spec.potential)?, spec, lr)?;
            (u.grid.clone(), project_high(&g.sub(&ru)?, k)?, project_high(&u, k)?, low)
        }
    };
    let eigen = matches!(data, BootstrapData::Eigen { .. });
    let op = |x: &FreqFunction| -> Result<FreqFunction> {
        if eigen {
            project_high(&apply_t_lambda(x, lr, spec)?, k)
        } else {
            Ok(project_high(&apply_h0_inverse(&apply_multiply_v(x, &spec.potential)?, spec, lr)?, k)?.scale(Complex64::new(-1.0, 0.0)))
        }
    };
    // dense solve of (I - A) v = b
    let len = grid.len();
    if len > MAX_DENSE {
        return Err(Error::UnsupportedScale(format!("{len} samples exceed the dense limit {MAX_DENSE}")));
    }
    let h = symbol_h0(&grid, spec)?;
    let mut a = potential_matrix(&spec.potential, &grid)?;
    let norms = grid.norms();
    let shift = if eigen { 1.0 } else { lr };
    for i in 0..len {
        let den = h[i] - 1.0 + shift;
        for j in 0..len {
            // entry of A: P_K T_lambda or -P_K R
            let mut v = -a[(i, j)] / den;
            if eigen && i == j {
                v += (lr + 1.0) / den;
            }
            a[(i, j)] = if norms[i] <= k { 0.0 } else { -v };
        }
        a[(i, i)] += 1.0;
    }
    let v = FreqFunction::new(grid.clone(), lu_solve(a, &b.values)?, b.radial)?;
    let vn = b_norm(&v, sa);
    let mut term = b.clone();
    let mut sum = b.clone();
    let mut term_norms = vec![b_norm(&term, sa)];
    let mut partial_errors = vec![b_norm(&v.sub(&sum)?, sa)];
    while term_norms.len() < max_terms && *term_norms.last().unwrap() > tol * vn.max(f64::MIN_POSITIVE) {
        term = op(&term)?;
        sum = sum.add(&term)?;
        term_norms.push(b_norm(&term, sa));
        partial_errors.push(b_norm(&v.sub(&sum)?, sa));
    }
    let floor = 1e-12 * vn;
    let max_error_ratio = partial_errors
        .windows(2)
        .filter(|w| w[0] > floor && w[1] > floor)
        .map(|w| w[1] / w[0])
        .fold(0.0, f64::max);
    if certified_ratio == 0.5 && max_error_ratio > 0.5 + 0.02 {
        return Err(Error::ContractionViolation(format!("measured ratio {max_error_ratio} at K = {k}")));
    }
    let sum_high = if eigen { project_high(&sum, k)? } else { sum.clone() };
    let rel = |x: &FreqFunction, y: &FreqFunction| -> Result<f64> {
        let den = b_norm(y, sa);
        let num = b_norm(&x.sub(y)?, sa);
        Ok(if den > 0.0 { num / den } else { num })
    };
    let v_high = if eigen { project_high(&v, k)? } else { v.clone() };
    let weight = |x: &FreqFunction| -> f64 {
        let r = x.grid.norms();
        x.values.iter().zip(&r).zip(x.grid.measures()).map(|((z, q), m)| bracket(*q).powf(2.0 * sa) * z.norm_sqr() * m).sum::<f64>().sqrt()
    };
    let low_ind = FreqFunction::from_fn(&grid, |_| Complex64::new(1.0, 0.0));
    let low_ind = low_ind.sub(&project_high(&low_ind, k)?)?;
    Ok(BootstrapReport {
        k,
        certified_ratio,
        term_norms,
        max_error_ratio,
        partial_errors,
        high_norm: b_norm(&v_high, sa),
        low_norm: b_norm(&low_data, sa),
        reconstruction_error: rel(&sum_high, &v_high)?,
        data_error: rel(&sum_high, &reference)?,
        low_frequency_bound: crate::bounds::low_frequency_bound(ctx.s, ctx.d(), k),
        low_part_l2_weighted: weight(&low_ind),
    })
}

/// Residual on a coarse and a refined grid, measured on a fixed ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementStudy {
    pub lambda: f64,
    pub window: f64,
    /// (r_max, count, residual on the ball, residual on the whole grid)
    pub levels: Vec<(f64, usize, f64, f64)>,
    /// coarse over fine residual on the ball
    pub ratio: f64,
}

/// ||T_lambda psi - psi||_{B^0} restricted to |xi| <= window.
pub fn eigen_residual_within(spec: &HamiltonianSpec, psi: &FreqFunction, lambda: f64, window: f64) -> Result<Residual> {
    let norm = b_norm(psi, 0.0);
    if norm == 0.0 {
        return Ok(Residual { absolute: 0.0, relative: 0.0, degenerate: true });
    }
    let r = apply_t_lambda(psi, lambda, spec)?.sub(psi)?;
    let inner = r.sub(&project_high(&r, window)?)?;
    let absolute = b_norm(&inner, 0.0);
    Ok(Residual { absolute, relative: absolute / norm, degenerate: false })
}

/// Residual of the exp(-|x|^delta) example under the refinement
/// (r_max, count) -> (2 r_max, 4 count), which halves the spacing.
pub fn refinement_study(delta: f64, lambda: f64, r_max: f64, count: usize, window: f64) -> Result<RefinementStudy> {
    if !(window <= r_max) {
        return invalid("the residual window must lie inside the grid");
    }
    let ex = sharp_example_potential(delta, 3)?;
    let spec = HamiltonianSpec::new(ex.spec, vec![1.0])?;
    let mut levels = Vec::new();
    for (r, m) in [(r_max, count), (2.0 * r_max, 4 * count)] {
        let psi = sharp_wavefunction(delta, r, m)?;
        let inner = eigen_residual_within(&spec, &psi, lambda, window)?;
        let whole = eigen_residual(&spec, &psi, lambda)?;
        levels.push((r, m, inner.absolute, whole.absolute));
    }
    let ratio = levels[0].2 / levels[1].2;
    Ok(RefinementStudy { lambda, window, levels, ratio })
}

/// Signed tail constant -delta Gamma((delta+n)/2) / (2 pi^{n/2+delta} Gamma(1-delta/2)).
pub fn tail_constant(n: usize, delta: f64) -> Result<f64> {
    let nf = n as f64;
    Ok(-delta * gamma((delta + nf) / 2.0)? / (2.0 * PI.powf(nf / 2.0 + delta) * gamma(1.0 - delta / 2.0)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub value: f64,
    pub se: f64,
    /// 95% confidence half-width
    pub ci95: f64,
}

impl Fit {
    fn from_points(x: &[f64], y: &[f64]) -> Result<(Fit, f64)> {
        let (slope, icpt, se) = linear_fit(x, y)?;
        let df = x.len().saturating_sub(2);
        let t = if df > 0 {
            use statrs::distribution::{ContinuousCDF, StudentsT};
            StudentsT::new(0.0, 1.0, df as f64).map(|d| d.inverse_cdf(0.975)).unwrap_or(f64::NAN)
        } else {
            f64::NAN
        };
        Ok((Fit { value: slope, se, ci95: t * se }, icpt))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub exponent: Fit,
    pub window: (f64, f64),
    /// |xi|^{delta+n} psi_hat at the top of the window
    pub amplitude: f64,
    pub expected_amplitude: f64,
    /// the signed constant from the tail formula; its sign is not asserted
    pub formula_constant: f64,
    pub measured_sign: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupFit {
    /// (gamma, ||psi||_{B^gamma})
    pub norms: Vec<(f64, f64)>,
    /// slope of the norm against 1/(delta - gamma) over omega_n |C1|
    pub normalized_slope: Fit,
    pub raw_slope: Fit,
    /// slope of log norm against -log(delta - gamma)
    pub log_slope: Fit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenReport {
    pub delta: f64,
    pub n: usize,
    pub lambda: f64,
    pub residual: Option<RefinementStudy>,
    pub decay_fit: DecayFit,
    pub barron_blowup_fit: Option<BlowupFit>,
}

/// Grid of the residual refinement inside the sharpness experiment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualGrid {
    pub r_max: f64,
    pub count: usize,
    pub window: f64,
}

impl Default for ResidualGrid {
    fn default() -> Self {
        ResidualGrid { r_max: 10.0, count: 1000, window: 5.0 }
    }
}

/// 4 pi int r^2 <r>^gamma psi_hat(r) dr for the n = 3 example: panels on
/// [0, r0] and the asymptotic expansion integrated term by term beyond.
pub fn sharp_barron_norms(delta: f64, gammas: &[f64]) -> Result<Vec<f64>> {
    let r0 = 60.0;
    let (gx, gw) = crate::special::gauss_legendre(16);
    let mut edges = vec![0.0];
    let mut e = 1e-3;
    while e < r0 {
        edges.push(e);
        e *= 1.5;
    }
    edges.push(r0);
    let mut nodes = Vec::new();
    for w in edges.windows(2) {
        let (c, hw) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
        for (x, wt) in gx.iter().zip(&gw) {
            nodes.push((c + hw * x, hw * wt));
        }
    }
    let vals: Result<Vec<f64>> = nodes.par_iter().map(|(r, _)| sharp_wavefunction_hat(delta, 3, *r)).collect();
    let vals = vals?;
    let terms = sharp_asymptotic_terms_3d(delta);
    gammas
        .iter()
        .map(|&g| {
            let head: f64 = nodes.iter().zip(&vals).map(|((r, w), v)| w * r * r * bracket(*r).powf(g) * v.abs()).sum();
            // <r>^g = r^g sum_j binom(g/2, j) r^-2j
            let mut tail = 0.0;
            let mut binom = 1.0;
            for j in 0..4 {
                if j > 0 {
                    binom *= (g / 2.0 - (j - 1) as f64) / j as f64;
                }
                for (ex, b) in &terms {
                    let p = ex - 2.0 - g + 2.0 * j as f64;
                    tail += binom * b * r0.powf(-(p - 1.0)) / (p - 1.0);
                }
            }
            Ok(sphere_area(3) * (head + tail))
        })
        .collect()
}

fn sharp_asymptotic_terms_3d(delta: f64) -> Vec<(f64, f64)> {
    crate::potentials::sharp_asymptotic_terms(delta, 8)
}

/// Decay exponent, tail amplitude and Barron blow-up of exp(-|x|^delta) in
/// R^3, with an optional residual refinement study.
pub fn sharpness_experiment(delta: f64, n: usize, gammas: &[f64], residual: Option<ResidualGrid>) -> Result<EigenReport> {
    if n == 2 {
        return Err(Error::UnsupportedScale("the radial transform is implemented for n = 3".into()));
    }
    if n != 3 {
        return invalid(format!("the experiment needs n >= 2 with a radial transform; got n = {n}"));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return invalid(format!("delta must lie in (0, 1], got {delta}"));
    }
    if let Some(g) = gammas.iter().find(|g| !(**g < delta)) {
        return invalid(format!("gamma = {g} must lie below delta = {delta}"));
    }
    let ex = sharp_example_potential(delta, n)?;
    let terms = sharp_asymptotic_terms_3d(delta);
    let (lead_e, lead) = terms[0];
    // window start: the remaining expansion terms fall below 1% of the lead
    let correction = |x: f64| terms[1..].iter().map(|(e, b)| b * x.powf(lead_e - e)).sum::<f64>().abs() / lead.abs();
    let mut lo = 0.5;
    while correction(lo) >= 0.01 {
        lo *= 10f64.powf(0.05);
        if lo > 1e4 {
            return Err(Error::FitDegenerate("no decade with a sub-percent correction".into()));
        }
    }
    let hi = 10.0 * lo;
    let pts = 41;
    let xs: Vec<f64> = (0..pts).map(|i| lo * 10f64.powf(i as f64 / (pts - 1) as f64)).collect();
    let ys: Result<Vec<f64>> = xs.par_iter().map(|x| crate::potentials::sharp_transform_quadrature(delta, n, *x)).collect();
    let ys = ys?;
    if ys.iter().any(|y| *y == 0.0 || !y.is_finite()) {
        return Err(Error::FitDegenerate("transform vanishes inside the fit window".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    let (exponent, _) = Fit::from_points(&lx, &ly)?;
    let top = *ys.last().unwrap() * hi.powf(delta + n as f64);
    let c1 = tail_constant(n, delta)?;
    let decay_fit = DecayFit {
        exponent,
        window: (lo, hi),
        amplitude: top.abs(),
        expected_amplitude: c1.abs(),
        formula_constant: c1,
        measured_sign: top.signum(),
    };
    let barron_blowup_fit = if gammas.len() >= 2 {
        let norms = sharp_barron_norms(delta, gammas)?;
        let x: Vec<f64> = gammas.iter().map(|g| 1.0 / (delta - g)).collect();
        let (raw, _) = Fit::from_points(&x, &norms)?;
        let scale = sphere_area(n) * c1.abs();
        let normalized = Fit { value: raw.value / scale, se: raw.se / scale, ci95: raw.ci95 / scale };
        let lx: Vec<f64> = gammas.iter().map(|g| -(delta - g).ln()).collect();
        let ly: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
        let (log_slope, _) = Fit::from_points(&lx, &ly)?;
        Some(BlowupFit { norms: gammas.iter().cloned().zip(norms).collect(), normalized_slope: normalized, raw_slope: raw, log_slope })
    } else {
        None
    };
    let residual = match residual {
        Some(g) => Some(refinement_study(delta, ex.lambda, g.r_max, g.count, g.window)?),
        None => None,
    };
    Ok(EigenReport { delta, n, lambda: ex.lambda, residual, decay_fit, barron_blowup_fit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::inverse_power_index;
    use crate::grid::RadialProfile;
    use crate::potentials::{hydrogen_like_hat, OneParticleTerm, PotentialTerm, TermKind};

    fn gaussian_1d(kappa: f64) -> HamiltonianSpec {
        let mut p = PotentialSpec::empty(1, 1);
        p.one_particle.push(OneParticleTerm { i: 1, term: PotentialTerm::new(TermKind::Gaussian { kappa, width: 1.0 }) });
        HamiltonianSpec::new(p, vec![1.0]).unwrap()
    }

    fn source(g: &FreqGrid) -> FreqFunction {
        FreqFunction::from_profile(g, &RadialProfile::Gaussian { c: 1.0, w: 1.0 })
    }

    #[test]
    fn free_solve_is_one_division() {
        let spec = HamiltonianSpec::new(PotentialSpec::empty(1, 1), vec![1.0]).unwrap();
        let g = FreqGrid::tensor(1, 4.0, 81).unwrap();
        let f = source(&g);
        let ctx = BoundContext::new(spec.clone(), 0.0, f64::INFINITY, 1.5, 1.0).unwrap();
        let (rep, u) = solve_neumann(&ctx, &f, 1e-12, 10).unwrap();
        assert_eq!(rep.iterations, 1);
        assert_eq!(u.values, apply_h0_inverse(&f, &spec, 1.0).unwrap().values);
        assert!(rep.oracle_error.unwrap() <= 1e-12);
        assert_eq!(solve_direct(&spec, 1.0, &f).unwrap().values, u.values);
    }

    #[test]
    fn weak_gaussian_contracts_and_matches_direct() {
        let spec = gaussian_1d(0.05);
        let g = FreqGrid::tensor(1, 6.0, 241).unwrap();
        let f = source(&g);
        let ctx = BoundContext::new(spec, 0.0, f64::INFINITY, 1.5, 1.0).unwrap();
        let tol = 1e-12;
        let (rep, u) = solve_neumann(&ctx, &f, tol, 100).unwrap();
        assert!((rep.certificate.q - 0.05).abs() < 1e-12, "{}", rep.certificate.q);
        assert_eq!(rep.certificate.q, rep.certificate.mu_tilde * rep.certificate.c_v);
        assert!(rep.iterations <= rep.iteration_bound(tol));
        assert!(rep.oracle_error.unwrap() <= 1e-8);
        assert!(rep.residual_history.windows(2).all(|w| w[1] < w[0]));
        // one more sweep moves u by at most tol
        let spec = &ctx.spec;
        let g0 = apply_h0_inverse(&f, spec, 1.0).unwrap();
        let next = g0.sub(&apply_h0_inverse(&apply_multiply_v(&u, &spec.potential).unwrap(), spec, 1.0).unwrap()).unwrap();
        assert!(b_norm(&next.sub(&u).unwrap(), 0.0) <= tol);
        assert!(rep.final_norms.barron_gamma <= rep.certificate.neumann_bound);
    }

    #[test]
    fn strong_coupling_refuses_plain_mode() {
        let g = FreqGrid::tensor(1, 4.0, 41).unwrap();
        let ctx = BoundContext::new(gaussian_1d(-3.0), 0.0, f64::INFINITY, 1.5, 1.0).unwrap();
        assert!(matches!(solve_neumann(&ctx, &source(&g), 1e-10, 50), Err(Error::NoContraction(_))));
        let ctx = BoundContext::new(gaussian_1d(0.5), 0.0, f64::INFINITY, 1.5, 1.0).unwrap();
        assert!(matches!(solve_neumann(&ctx, &source(&g), 1e-15, 3), Err(Error::NotConverged(3))));
    }

    #[test]
    fn singular_coupling_is_reported() {
        // I + R loses invertibility when -rho is an eigenvalue; bisect the
        // coupling on the sign of det(I + R)
        let g = FreqGrid::tensor(1, 4.0, 41).unwrap();
        let rho = 0.3;
        let det = |kappa: f64| {
            let spec = gaussian_1d(kappa);
            let h = symbol_h0(&g, &spec).unwrap();
            let mut a = potential_matrix(&spec.potential, &g).unwrap();
            for i in 0..g.len() {
                for j in 0..g.len() {
                    a[(i, j)] /= h[i] - 1.0 + rho;
                }
                a[(i, i)] += 1.0;
            }
            a.determinant()
        };
        let (mut lo, mut hi) = (-0.01, -5.0);
        assert!(det(lo) > 0.0 && det(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if det(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let r = solve_direct(&gaussian_1d(lo), rho, &source(&g));
        assert!(matches!(r, Err(Error::SingularSystem(_))), "{r:?}");
        assert!(solve_direct(&gaussian_1d(0.5 * lo), rho, &source(&g)).is_ok());
    }

    #[test]
    fn dense_limit() {
        let g = FreqGrid::tensor(3, 1.0, 17).unwrap();
        let mut p = PotentialSpec::empty(1, 3);
        p.pairwise.push(crate::potentials::PairTerm { i: 1, j: 2, term: PotentialTerm::new(TermKind::Gaussian { kappa: 0.1, width: 1.0 }) });
        let spec = HamiltonianSpec::new(p, vec![1.0; 3]).unwrap();
        assert!(matches!(solve_direct(&spec, 1.0, &source(&g)), Err(Error::UnsupportedScale(_))));
    }

    #[test]
    fn hydrogen_residual_refines() {
        let st = refinement_study(1.0, -0.5, 10.0, 1000, 5.0).unwrap();
        assert!(st.ratio >= 4.0, "{st:?}");
        let wrong = [refinement_study(1.0, 0.0, 10.0, 1000, 5.0).unwrap()];
        for w in wrong {
            assert!(w.levels[1].2 > 0.5 * w.levels[0].2 && w.levels[1].2 > 1e-2, "{w:?}");
        }
        let zero = FreqFunction::zeros(&make_radial_grid(3, 5.0, 100, RadialScheme::Uniform).unwrap());
        let spec = HamiltonianSpec::new(sharp_example_potential(1.0, 3).unwrap().spec, vec![1.0]).unwrap();
        let r = eigen_residual(&spec, &zero, -0.5).unwrap();
        assert!(r.degenerate && r.absolute == 0.0);
    }

    #[test]
    fn hydrogen_sharpness() {
        let rep = sharpness_experiment(1.0, 3, &[0.9, 0.95, 0.99], None).unwrap();
        let d = &rep.decay_fit;
        assert!((d.exponent.value + 4.0).abs() < 0.05);
        assert!((d.amplitude / (1.0 / (2.0 * PI.powi(3))) - 1.0).abs() < 0.02);
        assert_eq!(d.measured_sign, 1.0);
        assert!(d.formula_constant < 0.0);
        let b = rep.barron_blowup_fit.unwrap();
        assert!((b.normalized_slope.value - 1.0).abs() < 0.05);
        // the window starts where the next expansion term is below 1%
        assert!(d.window.0 > 2.0 && d.window.0 < 3.0);
        assert!(matches!(sharpness_experiment(1.0, 2, &[0.5], None), Err(Error::UnsupportedScale(_))));
        assert!(sharpness_experiment(0.5, 3, &[0.6], None).is_err());
    }

    #[test]
    fn quadrature_transform_matches_closed_form() {
        for k in [0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
            let q = crate::potentials::sharp_transform_quadrature(1.0, 3, k).unwrap();
            let e = hydrogen_like_hat(3, k);
            assert!(((q - e) / e).abs() < 1e-6, "{k}: {q} {e}");
        }
    }

    #[test]
    fn barron_norm_of_hydrogen() {
        // ||psi||_{B^0} = psi(0) = 1
        let v = sharp_barron_norms(1.0, &[0.0]).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-8, "{v:?}");
        let v = sharp_barron_norms(0.5, &[0.0]).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-6, "{v:?}");
    }

    #[test]
    fn bootstrap_trivial_and_geometric() {
        let g = FreqGrid::tensor(1, 4.0, 81).unwrap();
        // free operator, data inside the ball: nothing to reconstruct
        let free = HamiltonianSpec::new(PotentialSpec::empty(1, 1), vec![1.0]).unwrap();
        let ctx = BoundContext::new(free, 0.0, f64::INFINITY, 1.5, -0.2).unwrap();
        let psi = FreqFunction::from_fn(&g, |x| Complex64::new(if x[0].abs() < 0.5 { 1.0 } else { 0.0 }, 0.0));
        let r = bootstrap_series(&ctx, BootstrapData::Eigen { psi: &psi }, Some(1.0), 1e-14, 60).unwrap();
        assert_eq!(r.high_norm, 0.0);
        assert_eq!(r.term_norms.len(), 2);
        let ctx = BoundContext::new(gaussian_1d(-0.3), 0.0, f64::INFINITY, 1.5, -0.2).unwrap();
        // certified radius: errors shrink at least geometrically
        let psi = source(&g);
        let r = bootstrap_series(&ctx, BootstrapData::Eigen { psi: &psi }, Some(0.5), 1e-13, 200).unwrap();
        let ratio = r.max_error_ratio;
        assert!(ratio < 1.0);
        let e0 = r.partial_errors[0];
        for (m, e) in r.partial_errors.iter().enumerate() {
            assert!(*e <= e0 * ratio.powi(m as i32) * (1.0 + 1e-9) + 1e-13);
        }
        assert!(r.reconstruction_error < 1e-10, "{r:?}");
    }

    #[test]
    fn bootstrap_hydrogen_certified_radius() {
        let ex = sharp_example_potential(1.0, 3).unwrap();
        let spec = HamiltonianSpec::new(ex.spec, vec![1.0]).unwrap();
        let gam = 0.9;
        let (s, a, _) = inverse_power_index(1.0, 3, gam).unwrap();
        let ctx = BoundContext::new(spec, s, a, gam, -0.5).unwrap();
        let k = ctx.eigen_radius().unwrap();
        let psi = sharp_wavefunction(1.0, 2.5 * k, 3000).unwrap();
        let r = bootstrap_series(&ctx, BootstrapData::Eigen { psi: &psi }, None, 1e-12, 100).unwrap();
        assert!(r.max_error_ratio <= 0.52, "{r:?}");
        assert!(r.reconstruction_error <= 1e-6, "{r:?}");
        assert!(r.high_norm <= r.low_norm);
        assert!(r.low_part_l2_weighted <= r.low_frequency_bound);
    }
}
