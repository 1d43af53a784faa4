//! Frequency-space operators: the free resolvent, multiplication by V, T_lambda,
//! R, the high-frequency projection, and randomized operator-norm probes.

use crate::bounds::BoundContext;
use crate::error::{invalid, Error, Result};
use crate::grid::{convolve, FreqFunction, FreqGrid, Kernel, Structure};
use crate::potentials::{fourier_transform, HamiltonianSpec, PotentialSpec, PotentialTerm, TermKind};
use crate::spaces::{fl_norm, SpaceIndex};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// h(xi) = 2 pi^2 sum_i |xi_i|^2 / mu_i + 1 at every node of u's grid.
pub fn symbol_h0(grid: &FreqGrid, spec: &HamiltonianSpec) -> Result<Vec<f64>> {
    let n = spec.potential.n;
    let masses = &spec.masses;
    match grid {
        FreqGrid::Radial(g) => {
            if masses.len() != 1 || g.dim != n {
                return Err(Error::DimensionMismatch("radial grids carry one particle in dimension n".into()));
            }
            Ok(g.nodes.iter().map(|r| 2.0 * PI * PI * r * r / masses[0] + 1.0).collect())
        }
        FreqGrid::Tensor(g) => {
            if g.dim() != n * masses.len() {
                return Err(Error::DimensionMismatch(format!(
                    "grid dimension {} differs from nN = {}",
                    g.dim(),
                    n * masses.len()
                )));
            }
            Ok((0..g.len())
                .map(|flat| {
                    let x = g.point(flat);
                    let mut acc = 0.0;
                    for (i, m) in masses.iter().enumerate() {
                        let q: f64 = x[i * n..(i + 1) * n].iter().map(|v| v * v).sum();
                        acc += q / m;
                    }
                    2.0 * PI * PI * acc + 1.0
                })
                .collect())
        }
    }
}

/// u / (h - 1 + rho).
pub fn apply_h0_inverse(u: &FreqFunction, spec: &HamiltonianSpec, rho: f64) -> Result<FreqFunction> {
    if !(rho > 0.0) {
        return invalid(format!("rho must be positive, got {rho}"));
    }
    let h = symbol_h0(&u.grid, spec)?;
    let mut out = u.clone();
    for (v, hv) in out.values.iter_mut().zip(&h) {
        *v /= hv - 1.0 + rho;
    }
    out.decay = u.decay.map(|q| q + 2.0);
    Ok(out)
}

pub(crate) fn term_kernel(term: &PotentialTerm, d: usize) -> Result<crate::grid::RadialProfile> {
    if term.shift.iter().any(|a| *a != 0.0) {
        return Err(Error::UnsupportedKind(format!("{} has a shift; operators need centred terms", term.label())));
    }
    if let TermKind::SharpExample { .. } = term.kind {
        return Err(Error::InadmissibleTerm(format!("{} is not a potential", term.label())));
    }
    fourier_transform(term, d)
}

/// Samples of F(V u): one structured convolution per term.
pub fn apply_multiply_v(u: &FreqFunction, spec: &PotentialSpec) -> Result<FreqFunction> {
    let d = spec.total_dim();
    if u.grid.dim() != d {
        return Err(Error::DimensionMismatch(format!("grid dimension {} differs from nN = {d}", u.grid.dim())));
    }
    if d > 3 {
        return Err(Error::UnsupportedScale(format!("nN = {d} exceeds 3")));
    }
    let mut out = FreqFunction::zeros(&u.grid);
    out.radial = u.radial;
    let mut add = |w: FreqFunction| -> Result<()> {
        for (o, v) in out.values.iter_mut().zip(&w.values) {
            *o += v;
        }
        Ok(())
    };
    for t in &spec.one_particle {
        let p = term_kernel(&t.term, spec.n)?;
        add(convolve(Kernel::Profile(&p), u, Structure::OneParticle(t.i), spec.n)?)?;
    }
    for t in &spec.pairwise {
        let p = term_kernel(&t.term, spec.n)?;
        add(convolve(Kernel::Profile(&p), u, Structure::Pairwise(t.i, t.j), spec.n)?)?;
    }
    if let Some(t) = &spec.additive {
        let p = term_kernel(t, d)?;
        add(convolve(Kernel::Profile(&p), u, Structure::Additive, spec.n)?)?;
    }
    out.decay = None;
    Ok(out)
}

/// T_lambda u = (lambda + 1)(H0 + I)^-1 u - (H0 + I)^-1 V u.
pub fn apply_t_lambda(u: &FreqFunction, lambda: f64, spec: &HamiltonianSpec) -> Result<FreqFunction> {
    let a = apply_h0_inverse(u, spec, 1.0)?.scale(Complex64::new(lambda + 1.0, 0.0));
    let b = apply_h0_inverse(&apply_multiply_v(u, &spec.potential)?, spec, 1.0)?;
    let mut out = a.sub(&b)?;
    out.decay = None;
    Ok(out)
}

/// R u = (H0 + rho)^-1 V u.
pub fn apply_r(u: &FreqFunction, rho: f64, spec: &HamiltonianSpec) -> Result<FreqFunction> {
    apply_h0_inverse(&apply_multiply_v(u, &spec.potential)?, spec, rho)
}

/// Zero every sample with |xi| <= k.
pub fn project_high(u: &FreqFunction, k: f64) -> Result<FreqFunction> {
    if !(k >= 0.0) {
        return invalid(format!("K must be non-negative, got {k}"));
    }
    let norms = u.grid.norms();
    let mut out = u.clone();
    for (v, r) in out.values.iter_mut().zip(norms) {
        if r <= k {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum OperatorId {
    Identity,
    H0Inverse { rho: f64 },
    MultiplyV,
    TLambda { lambda: f64 },
    R { rho: f64 },
    ProjectHigh { k: f64 },
    HighTLambda { lambda: f64, k: f64 },
    HighR { rho: f64, k: f64 },
}

pub fn apply(op: OperatorId, u: &FreqFunction, spec: &HamiltonianSpec) -> Result<FreqFunction> {
    match op {
        OperatorId::Identity => Ok(u.clone()),
        OperatorId::H0Inverse { rho } => apply_h0_inverse(u, spec, rho),
        OperatorId::MultiplyV => apply_multiply_v(u, &spec.potential),
        OperatorId::TLambda { lambda } => apply_t_lambda(u, lambda, spec),
        OperatorId::R { rho } => apply_r(u, rho, spec),
        OperatorId::ProjectHigh { k } => project_high(u, k),
        OperatorId::HighTLambda { lambda, k } => project_high(&apply_t_lambda(u, lambda, spec)?, k),
        OperatorId::HighR { rho, k } => project_high(&apply_r(u, rho, spec)?, k),
    }
}

/// Identifies one random probe so that it can be regenerated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub seed: u64,
    pub index: u64,
    pub band: f64,
    pub real: bool,
}

/// Random band-limited samples: uniform amplitudes and phases on |xi| <= band.
/// With `real` the samples are Hermitian, so the function is real-valued.
pub fn random_probe(grid: &FreqGrid, rec: ProbeRecord) -> FreqFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(rec.seed);
    rng.set_stream(rec.index);
    let norms = grid.norms();
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    match grid {
        FreqGrid::Radial(_) => {
            for (v, r) in values.iter_mut().zip(&norms) {
                let a: f64 = rng.random_range(-1.0..1.0);
                if *r <= rec.band {
                    *v = Complex64::new(a, 0.0);
                }
            }
            let mut f = FreqFunction::new(grid.clone(), values, true).expect("lengths match");
            f.decay = Some(f64::INFINITY);
            f
        }
        FreqGrid::Tensor(g) => {
            for (i, r) in norms.iter().enumerate() {
                let a: f64 = rng.random_range(0.0..1.0);
                let th: f64 = rng.random_range(0.0..2.0 * PI);
                if *r <= rec.band {
                    values[i] = Complex64::from_polar(a, th);
                }
            }
            if rec.real {
                for i in 0..values.len() {
                    let m = g.mirror(i);
                    if m == i {
                        values[i] = Complex64::new(values[i].re, 0.0);
                    } else if m > i {
                        values[m] = values[i].conj();
                    }
                }
            }
            let mut f = FreqFunction::new(grid.clone(), values, false).expect("lengths match");
            f.decay = Some(f64::INFINITY);
            f
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorProbeReport {
    pub operator: OperatorId,
    pub src: SpaceIndex,
    pub dst: SpaceIndex,
    pub empirical: f64,
    pub certified: Option<f64>,
    pub probes: usize,
    pub worst: ProbeRecord,
}

impl OperatorProbeReport {
    pub fn holds(&self) -> bool {
        self.certified.is_none_or(|c| self.empirical <= c)
    }
}

/// ||op u||_dst / ||u||_src for the probe `rec`; replays a serialized probe.
pub fn probe_ratio(op: OperatorId, spec: &HamiltonianSpec, grid: &FreqGrid, src: SpaceIndex, dst: SpaceIndex, rec: ProbeRecord) -> Result<f64> {
    let u = random_probe(grid, rec);
    let out = apply(op, &u, spec)?;
    let num = fl_norm(&out, dst).value;
    let den = fl_norm(&u, src).value;
    Ok(if den > 0.0 { num / den } else { 0.0 })
}

/// max over random probes of ||op u||_dst / ||u||_src.
pub fn empirical_operator_norm(
    op: OperatorId,
    spec: &HamiltonianSpec,
    grid: &FreqGrid,
    src: SpaceIndex,
    dst: SpaceIndex,
    probes: usize,
    seed: u64,
) -> Result<OperatorProbeReport> {
    if probes == 0 {
        return invalid("need at least one probe");
    }
    let band = 0.8 * grid.extent();
    let ratios: Vec<Result<(f64, ProbeRecord)>> = (0..probes as u64)
        .into_par_iter()
        .map(|index| {
            let rec = ProbeRecord { seed, index, band, real: false };
            Ok((probe_ratio(op, spec, grid, src, dst, rec)?, rec))
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, ProbeRecord { seed, index: 0, band, real: false });
    for r in ratios {
        let (v, rec) = r?;
        if v > best.0 {
            best = (v, rec);
        }
    }
    Ok(OperatorProbeReport { operator: op, src, dst, empirical: best.0, certified: None, probes, worst: best.1 })
}

/// The operator estimates that can be probed, with their certified bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimate {
    /// V: FL^p_{|s|+2 sigma beta} -> FL^p_{s-2(1-sigma)beta}, bound C(V)
    Multiplier,
    /// T_lambda into two more derivatives, bound mu~_1 [|lambda+1| + C]
    TLambda,
    /// P_K T_lambda on B^{|s|}
    HighTLambdaBarron,
    /// P_K T_lambda on H^{s1 + 2 sigma beta}
    HighTLambdaSobolev,
    /// R into two more derivatives, bound mu~_rho C
    Resolvent,
    HighResolventBarron,
    HighResolventSobolev,
}

impl Estimate {
    pub const ALL: [Estimate; 7] = [
        Estimate::Multiplier,
        Estimate::TLambda,
        Estimate::HighTLambdaBarron,
        Estimate::HighTLambdaSobolev,
        Estimate::Resolvent,
        Estimate::HighResolventBarron,
        Estimate::HighResolventSobolev,
    ];
}

/// (operator, src, dst, certified bound) for an estimate under `ctx`; the
/// probe integrability and sigma come from the context.
pub fn estimate_setup(est: Estimate, ctx: &BoundContext, k: f64) -> Result<(OperatorId, SpaceIndex, SpaceIndex, f64)> {
    let lam = ctx.lambda_or_rho;
    let p = ctx.p;
    let src = SpaceIndex::new(ctx.multiplier_src(), p)?;
    let dst0 = ctx.multiplier_dst();
    let gain = (1.0 + k * k).sqrt().powf(ctx.gain_exponent());
    let a = ctx.s.abs();
    let h_ctx = ctx.clone().with_p(2.0)?;
    let s1 = (a - ctx.s) / 2.0;
    let h_idx = SpaceIndex::sobolev(s1 + 2.0 * h_ctx.sigma * ctx.beta);
    Ok(match est {
        Estimate::Multiplier => (OperatorId::MultiplyV, src, SpaceIndex::new(dst0, p)?, ctx.c()),
        Estimate::TLambda => (OperatorId::TLambda { lambda: lam }, src, SpaceIndex::new(dst0 + 2.0, p)?, ctx.t_lambda_bound()?),
        Estimate::HighTLambdaBarron => {
            let b = SpaceIndex::barron(a);
            (OperatorId::HighTLambda { lambda: lam, k }, b, b, ctx.t_lambda_bound()? * gain)
        }
        Estimate::HighTLambdaSobolev => (OperatorId::HighTLambda { lambda: lam, k }, h_idx, h_idx, ctx.t_lambda_bound()? * gain),
        Estimate::Resolvent => (OperatorId::R { rho: lam }, src, SpaceIndex::new(dst0 + 2.0, p)?, ctx.r_bound()?),
        Estimate::HighResolventBarron => {
            let b = SpaceIndex::barron(a);
            (OperatorId::HighR { rho: lam, k }, b, b, ctx.r_bound()? * gain)
        }
        Estimate::HighResolventSobolev => (OperatorId::HighR { rho: lam, k }, h_idx, h_idx, ctx.r_bound()? * gain),
    })
}

/// Probe one estimate and attach its certified bound.
pub fn probe_estimate(est: Estimate, ctx: &BoundContext, grid: &FreqGrid, k: f64, probes: usize, seed: u64) -> Result<OperatorProbeReport> {
    let (op, src, dst, bound) = estimate_setup(est, ctx, k)?;
    let mut rep = empirical_operator_norm(op, &ctx.spec, grid, src, dst, probes, seed)?;
    rep.certified = Some(bound);
    Ok(rep)
}

/// Integral of V u conj(v) over R^d by Parseval: sum of F(Vu) conj(v-hat).
pub fn quadratic_form(spec: &PotentialSpec, u: &FreqFunction, v: &FreqFunction) -> Result<Complex64> {
    if u.grid != v.grid {
        return Err(Error::DimensionMismatch("u and v must share a grid".into()));
    }
    let vu = apply_multiply_v(u, spec)?;
    Ok(vu.values.iter().zip(&v.values).zip(u.grid.measures()).map(|((a, b), m)| a * b.conj() * m).sum())
}

/// ||grad u||_{L^2}^2 = 4 pi^2 int |xi|^2 |u-hat|^2.
pub fn gradient_norm_sq(u: &FreqFunction) -> f64 {
    u.grid
        .norms()
        .iter()
        .zip(&u.values)
        .zip(u.grid.measures())
        .map(|((r, v), m)| 4.0 * PI * PI * r * r * v.norm_sqr() * m)
        .sum()
}

pub fn l2_norm_sq(u: &FreqFunction) -> f64 {
    u.values.iter().zip(u.grid.measures()).map(|(v, m)| v.norm_sqr() * m).sum()
}
