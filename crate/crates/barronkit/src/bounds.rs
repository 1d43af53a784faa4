//! Gamma-function constants and the certified bounds assembled from them.

use crate::error::{invalid, Error, Result};
use crate::potentials::{fourier_transform, HamiltonianSpec, PotentialSpec, PotentialTerm, TermKind};
use crate::spaces::{split_norm, SplitIndex, SplitInput};
use crate::special::{gamma, sphere_area};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub use crate::potentials::c_t_n;

/// c_{alpha beta} = pi^{n/2} Gamma(alpha beta - n/2) / Gamma(alpha beta); 1 for alpha = inf.
pub fn c_alpha_beta(alpha: f64, beta: f64, n: usize) -> Result<f64> {
    if alpha.is_infinite() {
        if !(beta >= 0.0) {
            return invalid(format!("beta must be >= 0, got {beta}"));
        }
        return Ok(1.0);
    }
    let ab = alpha * beta;
    let h = n as f64 / 2.0;
    if !(ab > h) {
        return invalid(format!("alpha beta = {ab} must exceed n/2 = {h}"));
    }
    Ok(PI.powf(h) * gamma(ab - h)? / gamma(ab)?)
}

/// ||<.>^{-1}||_{L^{2 gamma}}^{2 gamma} over R^n.
pub fn bracket_lp_norm(g: f64, n: usize) -> Result<f64> {
    let h = n as f64 / 2.0;
    if !(g > h) {
        return invalid(format!("gamma = {g} must exceed n/2 = {h}"));
    }
    Ok(PI.powf(h) * gamma(g - h)? / gamma(g)?)
}

/// nu_{t,n} = 2 pi^t |Gamma((n-t)/2)| / (Gamma(t/2) Gamma(n/2)).
pub fn nu_t_n(t: f64, n: usize) -> Result<f64> {
    if !(t > 0.0) {
        return invalid(format!("t must be positive, got {t}"));
    }
    let nf = n as f64;
    Ok(2.0 * PI.powf(t) * gamma((nf - t) / 2.0)?.abs() / (gamma(t / 2.0)? * gamma(nf / 2.0)?))
}

/// max(max_i mu_i / (2 pi^2), 1/rho).
pub fn mu_tilde(masses: &[f64], rho: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return invalid(format!("rho must be positive, got {rho}"));
    }
    let m = masses.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok((m / (2.0 * PI * PI)).max(1.0 / rho))
}

/// min_i 2 pi^2 / mu_i, the ellipticity constant of the free symbol.
pub fn ellipticity(masses: &[f64]) -> f64 {
    masses.iter().map(|m| 2.0 * PI * PI / m).fold(f64::INFINITY, f64::min)
}

/// Value of a potential constant plus whether any term norm was truncated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub value: f64,
    pub truncated: bool,
    /// (label, weighted contribution) per term
    pub terms: Vec<(String, f64)>,
}

impl CvReport {
    pub fn certified(&self) -> bool {
        !self.truncated
    }
}

fn term_norm(term: &PotentialTerm, d: usize, idx: &SplitIndex, where_: &str) -> Result<(f64, bool)> {
    let inadmissible = |why: String| Error::InadmissibleTerm(format!("{where_} {}: {why}", term.label()));
    if let TermKind::SharpExample { .. } = term.kind {
        return Err(inadmissible("denotes an eigenfunction, not a potential".into()));
    }
    let p = fourier_transform(term, d).map_err(|e| inadmissible(e.to_string()))?;
    let (rep, _) = split_norm(SplitInput::Profile(&p), idx, d).map_err(|e| inadmissible(e.to_string()))?;
    Ok((rep.value, rep.truncated))
}

/// C(V; s, alpha, beta): weighted sum of the term norms.
pub fn big_c_v(spec: &PotentialSpec, s: f64, alpha: f64, beta: f64) -> Result<CvReport> {
    let n = spec.n;
    let w1 = 2f64.powf(s.abs() / 2.0);
    let w2 = 2f64.powf(s.abs());
    let mut value = 0.0;
    let mut truncated = false;
    let mut terms = Vec::new();
    if !spec.one_particle.is_empty() || !spec.pairwise.is_empty() {
        let idx = SplitIndex::new(s, alpha, beta, n)?;
        for t in &spec.one_particle {
            let (v, tr) = term_norm(&t.term, n, &idx, &format!("(i={})", t.i))?;
            value += w1 * v;
            truncated |= tr;
            terms.push((format!("V_{} {}", t.i, t.term.label()), w1 * v));
        }
        for t in &spec.pairwise {
            let (v, tr) = term_norm(&t.term, n, &idx, &format!("(i={}, j={})", t.i, t.j))?;
            value += w2 * v;
            truncated |= tr;
            terms.push((format!("V_{}{} {}", t.i, t.j, t.term.label()), w2 * v));
        }
    }
    if let Some(t) = &spec.additive {
        let d = spec.total_dim();
        let idx = SplitIndex::new(s, f64::INFINITY, 0.0, d)?;
        let (v, tr) = term_norm(t, d, &idx, "(additive)")?;
        value += w1 * v;
        truncated |= tr;
        terms.push((format!("V_ad {}", t.label()), w1 * v));
    }
    Ok(CvReport { value, truncated, terms })
}

/// Form-bound exponent t = (|s| - gamma)/2 + 1.
pub fn form_exponent(s: f64, g: f64) -> f64 {
    (s.abs() - g) / 2.0 + 1.0
}

/// C(V; (s - |s|)/2, alpha, 1 + (s - gamma)/2), the form-bound constant.
pub fn frak_c_v(spec: &PotentialSpec, s: f64, alpha: f64, g: f64) -> Result<CvReport> {
    let n = spec.n as f64;
    let t = form_exponent(s, g);
    let inv = if alpha.is_infinite() { 0.0 } else { 1.0 / alpha };
    if !(2.0 * t + s - s.abs() - n * inv > 0.0) {
        return invalid(format!("form exponent t = {t} violates 2t + s - |s| - n/alpha > 0"));
    }
    big_c_v(spec, (s - s.abs()) / 2.0, alpha, 1.0 + (s - g) / 2.0)
}

/// Threshold rho* beyond which the shifted form is coercive.
pub fn rho_star(frak: f64, a: f64, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return invalid(format!("form exponent must lie in (0, 1), got {t}"));
    }
    if a > t * frak {
        Ok(frak)
    } else {
        Ok(a + (1.0 / t - 1.0) * a * (t * frak / a).powf(1.0 / (1.0 - t)))
    }
}

pub fn coercivity_rho(h: &HamiltonianSpec, s: f64, alpha: f64, g: f64) -> Result<f64> {
    let k = frak_c_v(&h.potential, s, alpha, g)?;
    rho_star(k.value, ellipticity(&h.masses), form_exponent(s, g))
}

/// inf over x >= 0 of (A x + rho - frak (1+x)^t) / (1+x): the H^1 coercivity
/// constant of the shifted form. Positive iff the form is coercive.
pub fn coercivity_constant(frak: f64, a: f64, t: f64, rho: f64) -> f64 {
    // phi(y) = A + (rho - A)/y - frak y^(t-1), y = 1 + x >= 1, phi(inf) = A
    let phi = |y: f64| a + (rho - a) / y - frak * y.powf(t - 1.0);
    let mut best = a.min(phi(1.0));
    if rho > a && frak > 0.0 {
        let y = ((rho - a) / (frak * (1.0 - t))).powf(1.0 / t);
        if y > 1.0 && y.is_finite() {
            best = best.min(phi(y));
        }
    }
    best
}

/// K solving mu (energy + C) <K>^e = 1/2 with e = |s| - s - 2 + 2 beta.
pub fn contraction_radius(mu: f64, energy: f64, c: f64, s: f64, beta: f64) -> Result<f64> {
    let e = s.abs() - s - 2.0 + 2.0 * beta;
    if !(e < 0.0) {
        return invalid(format!("exponent |s| - s - 2 + 2 beta = {e} must be negative"));
    }
    let b = 2.0 * mu * (energy + c);
    if b <= 1.0 {
        return Ok(0.0);
    }
    Ok((b.powf(2.0 / -e) - 1.0).sqrt())
}

/// ||<.>^{|s|} 1{|.| <= K}||_{L^2(R^d)} upper bound.
pub fn low_frequency_bound(s: f64, d: usize, k: f64) -> f64 {
    let df = d as f64;
    let a = s.abs();
    2f64.powf(a / 2.0 + df / 4.0) * (sphere_area(d) / (2.0 * a + df)).sqrt() * (1.0 + k * k).sqrt().powf(a + df / 2.0)
}

/// Parameters shared by the eigenfunction and solver bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundContext {
    pub spec: HamiltonianSpec,
    pub s: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// lambda in eigen mode, rho in solver mode
    pub lambda_or_rho: f64,
    /// integrability of the operator probes
    pub p: f64,
    /// (1 - alpha/p)_+
    pub sigma: f64,
    pub cv: CvReport,
}

impl BoundContext {
    pub fn new(spec: HamiltonianSpec, s: f64, alpha: f64, g: f64, lambda_or_rho: f64) -> Result<Self> {
        spec.validate()?;
        let n = spec.potential.n as f64;
        if !(g > s.abs()) {
            return invalid(format!("gamma = {g} must exceed |s| = {}", s.abs()));
        }
        if alpha.is_finite() {
            if !(g < s - n / alpha + 2.0) {
                return invalid(format!("gamma = {g} must be below s - n/alpha + 2 = {}", s - n / alpha + 2.0));
            }
        } else if !(g <= s + 2.0) {
            return invalid(format!("gamma = {g} must not exceed s + 2"));
        }
        let inv = if alpha.is_infinite() { 0.0 } else { 1.0 / alpha };
        if !(s > -1.0 && 2.0 + s - s.abs() - n * inv > 0.0) {
            return invalid(format!("(s, alpha) = ({s}, {alpha}) outside the admissible region"));
        }
        let beta = 1.0 + (s - g) / 2.0;
        let cv = big_c_v(&spec.potential, s, alpha, beta)?;
        Ok(BoundContext { spec, s, alpha, beta, gamma: g, lambda_or_rho, p: 1.0, sigma: 0.0, cv })
    }

    /// Same context probed in FL^p.
    pub fn with_p(mut self, p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return invalid(format!("p must be >= 1, got {p}"));
        }
        self.p = p;
        self.sigma = if self.alpha.is_infinite() { 1.0 } else { (1.0 - self.alpha / p).max(0.0) };
        Ok(self)
    }

    pub fn c(&self) -> f64 {
        self.cv.value
    }

    pub fn d(&self) -> usize {
        self.spec.potential.total_dim()
    }

    pub fn mu_tilde(&self, rho: f64) -> Result<f64> {
        mu_tilde(&self.spec.masses, rho)
    }

    /// |s| - s - 2 + 2 beta, the high-frequency gain exponent.
    pub fn gain_exponent(&self) -> f64 {
        self.s.abs() - self.s - 2.0 + 2.0 * self.beta
    }

    /// Source smoothness |s| + 2 sigma beta of the multiplier bound.
    pub fn multiplier_src(&self) -> f64 {
        self.s.abs() + 2.0 * self.sigma * self.beta
    }

    /// Target smoothness s - 2(1 - sigma) beta of the multiplier bound.
    pub fn multiplier_dst(&self) -> f64 {
        self.s - 2.0 * (1.0 - self.sigma) * self.beta
    }

    /// mu~_1 [|lambda + 1| + C].
    pub fn t_lambda_bound(&self) -> Result<f64> {
        Ok(self.mu_tilde(1.0)? * ((self.lambda_or_rho + 1.0).abs() + self.c()))
    }

    /// mu~_rho C.
    pub fn r_bound(&self) -> Result<f64> {
        Ok(self.mu_tilde(self.lambda_or_rho)? * self.c())
    }

    pub fn eigen_radius(&self) -> Result<f64> {
        contraction_radius(self.mu_tilde(1.0)?, (self.lambda_or_rho + 1.0).abs(), self.c(), self.s, self.beta)
    }

    pub fn solver_radius(&self) -> Result<f64> {
        contraction_radius(self.mu_tilde(self.lambda_or_rho)?, 0.0, self.c(), self.s, self.beta)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// input is ||psi||_{B^{|s|}}
    Barron,
    /// input is ||psi||_{L^2}
    L2,
}

/// Upper bound on ||psi||_{B^gamma} for an eigenfunction with eigenvalue
/// ctx.lambda_or_rho.
pub fn eigen_certificate(ctx: &BoundContext, input_norm: f64, which: CertificateKind) -> Result<f64> {
    if !(input_norm >= 0.0) {
        return invalid("input norm must be non-negative");
    }
    let m = ctx.t_lambda_bound()?;
    match which {
        CertificateKind::Barron => Ok(m * input_norm),
        CertificateKind::L2 => {
            let d = ctx.d() as f64;
            let a = ctx.s.abs();
            let pre = 2f64.powf((2.0 * a + d) / 4.0) * (sphere_area(ctx.d()) / (2.0 * a + d)).sqrt();
            Ok(pre * (2.0 * m).powf((ctx.gamma + d / 2.0) / (ctx.gamma - a)) * input_norm)
        }
    }
}

/// Upper bound on ||u*||_{B^gamma} for (H + rho) u* = f, from the high/low
/// frequency split: 2 mu~ ||f||_{B^{gamma-2}} + 2 mu~ C LF(K) ||f||_{H^-1} / eps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveCertificate {
    pub value: f64,
    pub k: f64,
    pub coercivity: f64,
    pub rho_star: f64,
    pub frak: f64,
    pub certified: bool,
}

pub fn solve_certificate(ctx: &BoundContext, f_b: f64, f_hm1: f64) -> Result<SolveCertificate> {
    let rho = ctx.lambda_or_rho;
    let mu = ctx.mu_tilde(rho)?;
    let frak = frak_c_v(&ctx.spec.potential, ctx.s, ctx.alpha, ctx.gamma)?;
    let t = form_exponent(ctx.s, ctx.gamma);
    let a = ellipticity(&ctx.spec.masses);
    let rs = rho_star(frak.value, a, t)?;
    let eps = coercivity_constant(frak.value, a, t, rho);
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("rho = {rho} does not exceed the coercivity threshold {rs}")));
    }
    let k = ctx.solver_radius()?;
    let lf = low_frequency_bound(ctx.s, ctx.d(), k);
    let value = 2.0 * mu * f_b + 2.0 * mu * ctx.c() * lf * f_hm1 / eps;
    Ok(SolveCertificate { value, k, coercivity: eps, rho_star: rs, frak: frak.value, certified: ctx.cv.certified() && frak.certified() })
}

/// Which regime of the inverse power estimate applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerRegime {
    Below,
    Above,
    Critical,
}

/// Closed-form eigenfunction estimate for |x|^-t interactions: returns
/// (prefactor, input smoothness, regime) so that
/// ||psi||_{B^gamma} <= prefactor ||psi||_{B^{input}}.
pub fn inverse_power_certificate(t: f64, n: usize, g: f64, m: f64, lambda: f64, mu1: f64) -> Result<(f64, f64, PowerRegime)> {
    let nf = n as f64;
    if !(g < 2.0 - t) {
        return invalid(format!("gamma = {g} must be below 2 - t = {}", 2.0 - t));
    }
    let dl = 2.0 - t - g;
    let e = (lambda + 1.0).abs();
    if t < nf {
        let extra = if n == 1 { PI - 2.0 } else { 0.0 };
        let v = nu_t_n(t, n)? * m * (1.0 / t + (2.0 + extra) / dl) + e;
        Ok((mu1 * v, 0.0, PowerRegime::Below))
    } else if t > nf {
        if n != 1 {
            return invalid("t > n is only covered for n = 1");
        }
        if !(g > t - 1.0) {
            return invalid(format!("gamma = {g} must exceed t - 1 = {}", t - 1.0));
        }
        let v = PI * nu_t_n(t, 1)? * m / (2.0 * dl) + e;
        Ok((mu1 * v, t - 1.0, PowerRegime::Above))
    } else {
        if n != 1 {
            return invalid("t = n is only covered for n = 1");
        }
        if !(g > 1.0 / 3.0) {
            return invalid(format!("gamma = {g} must exceed 1/3"));
        }
        let u = 1.0 - g;
        let v = m * (3.0 + 6.0 / u + 8.0 / (u * u)) + e;
        Ok((mu1 * v, u / 2.0, PowerRegime::Critical))
    }
}

/// (s, alpha, beta) at which the inverse power estimate measures |x|^-t.
pub fn inverse_power_index(t: f64, n: usize, g: f64) -> Result<(f64, f64, f64)> {
    let nf = n as f64;
    let dl = 2.0 - t - g;
    if !(dl > 0.0) {
        return invalid(format!("gamma = {g} must be below 2 - t"));
    }
    let (s, alpha) = if t < nf {
        let a = 2.0 * nf / (2.0 * t + dl);
        (0.0, if n == 1 { a.max(1.0) } else { a })
    } else if t > nf {
        (1.0 - t, 1.0)
    } else {
        ((g - 1.0) / 2.0, 1.0)
    };
    Ok((s, alpha, 1.0 + (s - g) / 2.0))
}

/// Closed-form upper bound on the sum-space norm of |x|^-t at the index the
/// estimate uses, with delta = 2 - t - gamma.
pub fn inverse_power_norm_bound(t: f64, n: usize, g: f64) -> Result<f64> {
    let nf = n as f64;
    let dl = 2.0 - t - g;
    if !(dl > 0.0) {
        return invalid(format!("gamma = {g} must be below 2 - t"));
    }
    if t < nf {
        let c = c_t_n(t, n)? * sphere_area(n);
        if n >= 2 {
            Ok(c * (1.0 / t + 2.0 / dl))
        } else {
            Ok(c * (1.0 / t + PI / dl))
        }
    } else if t > nf {
        Ok(PI * c_t_n(t, 1)?.abs() * 2.0 / (2.0 * dl))
    } else {
        Ok(3.0 + 7.15 / (dl * dl) + 5.61 / dl)
    }
}

/// Whether Gamma(x + a)/Gamma(x) is nondecreasing (a >= 0) or nonincreasing
/// (a <= 0) on the sorted sample points.
pub fn gamma_ratio_monotone(a: f64, xs: &[f64]) -> Result<bool> {
    let lo = (-a).max(0.0);
    let mut vals = Vec::with_capacity(xs.len());
    for &x in xs {
        if !(x > lo) {
            return Err(Error::Domain(format!("x = {x} must exceed {lo}")));
        }
        vals.push(gamma(x + a)? / gamma(x)?);
    }
    let ok = vals.windows(2).all(|w| {
        let tol = 1e-12 * w[0].abs().max(1.0);
        if a >= 0.0 {
            w[1] >= w[0] - tol
        } else {
            w[1] <= w[0] + tol
        }
    });
    Ok(ok)
}

/// 2^{|s|/2} <y>^s <x - y>^{|s|} - <x>^s, non-negative by Peetre's inequality.
pub fn peetre_gap(x: &[f64], y: &[f64], s: f64) -> f64 {
    let nx: f64 = x.iter().map(|v| v * v).sum::<f64>();
    let ny: f64 = y.iter().map(|v| v * v).sum::<f64>();
    let nd: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    let bx = (1.0 + nx).sqrt();
    let by = (1.0 + ny).sqrt();
    let bd = (1.0 + nd).sqrt();
    2f64.powf(s.abs() / 2.0) * by.powf(s) * bd.powf(s.abs()) - bx.powf(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{OneParticleTerm, PairTerm};
    use crate::special::{integrate_tail, tanh_sinh};

    fn bracket_quadrature(g: f64, n: usize) -> f64 {
        let f = |r: f64| (1.0 + r * r).powf(-g) * r.powi(n as i32 - 1);
        sphere_area(n) * (tanh_sinh(f, 0.0, 1.0, 1e-14) + integrate_tail(f, 1.0, 1e-14))
    }

    #[test]
    fn gamma_constants() {
        assert_eq!(c_alpha_beta(f64::INFINITY, 0.3, 2).unwrap(), 1.0);
        assert!((c_alpha_beta(2.0, 1.0, 1).unwrap() - PI / 2.0).abs() < 1e-14);
        assert!(c_alpha_beta(1.0, 1.0, 3).is_err());
        assert!((bracket_lp_norm(1.0, 1).unwrap() - PI).abs() < 1e-13);
        assert!((bracket_lp_norm(2.0, 3).unwrap() - PI * PI).abs() < 1e-12);
        assert!(bracket_lp_norm(0.5, 1).is_err());
        for n in 1..=3 {
            for ab in [1.0, 1.5, 2.0] {
                if ab <= n as f64 / 2.0 {
                    continue;
                }
                let q = bracket_quadrature(ab, n);
                let c = c_alpha_beta(ab, 1.0, n).unwrap();
                assert!((q - c).abs() < 1e-8 * c, "n={n} ab={ab}");
            }
        }
    }

    #[test]
    fn nu_and_c_tn() {
        assert!((nu_t_n(1.0, 3).unwrap() - 4.0).abs() < 1e-13);
        assert!((nu_t_n(1.0, 2).unwrap() - 2.0 * PI).abs() < 1e-13);
        assert!(matches!(nu_t_n(3.0, 3), Err(Error::Pole(_))));
        assert!((c_t_n(1.0, 3).unwrap() - 1.0 / PI).abs() < 1e-15);
        for (t, n) in [(0.5, 1), (1.0, 2), (1.3, 3)] {
            let v = c_t_n(t, n).unwrap() * sphere_area(n);
            assert!((v - nu_t_n(t, n).unwrap()).abs() < 1e-12 * v);
        }
    }

    #[test]
    fn coercivity_branches() {
        let a = 2.0 * PI * PI;
        assert_eq!(rho_star(1.0, a, 0.5).unwrap(), 1.0);
        assert_eq!(rho_star(0.0, a, 0.5).unwrap(), 0.0);
        assert!((rho_star(4.0 * a, a, 0.5).unwrap() - 5.0 * a).abs() < 1e-12 * a);
        for t in [0.2, 0.5, 0.8] {
            let k = a / t;
            let lo = rho_star(k * (1.0 - 1e-13), a, t).unwrap();
            let hi = rho_star(k * (1.0 + 1e-13), a, t).unwrap();
            assert!((lo - hi).abs() < 1e-10 * k);
        }
        // just above the threshold the form is coercive, well below it is not
        for (k, t) in [(1.0, 0.5), (4.0 * a, 0.5), (3.0 * a, 0.75)] {
            let rs = rho_star(k, a, t).unwrap();
            assert!(coercivity_constant(k, a, t, rs * (1.0 + 1e-9) + 1e-12) > 0.0);
            assert!(coercivity_constant(k, a, t, rs * 0.9 - 1e-3) < 0.0);
        }
    }

    #[test]
    fn contraction_radius_examples() {
        let k = contraction_radius(1.0, 8.0, 0.0, 0.0, 0.5).unwrap();
        assert!((k - 255f64.sqrt()).abs() < 1e-12);
        assert_eq!(contraction_radius(0.1, 1.0, 1.0, 0.0, 0.5).unwrap(), 0.0);
        assert!(contraction_radius(1.0, 1.0, 1.0, -0.5, 0.5).is_err());
        let (mu, en, c, s, b) = (0.7, 1.3, 5.0, -0.3, 0.4);
        let k = contraction_radius(mu, en, c, s, b).unwrap();
        let e = s.abs() - s - 2.0 + 2.0 * b;
        assert!((mu * (en + c) * (1.0 + k * k).sqrt().powf(e) - 0.5).abs() < 1e-12);
    }

    fn coulomb_pair() -> HamiltonianSpec {
        let mut p = PotentialSpec::empty(3, 2);
        p.pairwise.push(PairTerm { i: 1, j: 2, term: PotentialTerm::new(TermKind::Coulomb) });
        HamiltonianSpec::new(p, vec![1.0, 1.0]).unwrap()
    }

    #[test]
    fn potential_constants() {
        let empty = PotentialSpec::empty(1, 1);
        assert_eq!(big_c_v(&empty, 0.0, 2.0, 1.0).unwrap().value, 0.0);
        assert_eq!(frak_c_v(&empty, 0.0, 2.0, 0.5).unwrap().value, 0.0);
        let mut g = PotentialSpec::empty(1, 1);
        g.additive = Some(PotentialTerm::new(TermKind::Gaussian { kappa: 2.0, width: 1.0 }));
        assert!((big_c_v(&g, 0.0, 2.0, 1.0).unwrap().value - 2.0).abs() < 1e-12);
        // Coulomb pair: the radius-1 split already meets the closed-form bound
        let h = coulomb_pair();
        for gm in [0.1, 0.5, 0.9] {
            let (s, alpha, beta) = inverse_power_index(1.0, 3, gm).unwrap();
            let c = big_c_v(&h.potential, s, alpha, beta).unwrap();
            let bound = inverse_power_norm_bound(1.0, 3, gm).unwrap();
            assert!(c.value <= bound * 1.01, "gamma={gm} C={} bound={bound}", c.value);
        }
        let f = frak_c_v(&h.potential, 0.0, 2.5, 0.5).unwrap();
        assert!(frak_c_v(&h.potential, 0.0, 2.0, 0.5).is_err());
        assert!(f.value.is_finite() && f.value > 0.0);
    }

    #[test]
    fn homogeneity() {
        let mut p = PotentialSpec::empty(3, 1);
        p.one_particle.push(OneParticleTerm { i: 1, term: PotentialTerm::new(TermKind::Yukawa { mu: 1.0 }) });
        let a = big_c_v(&p, 0.0, 2.0, 1.0).unwrap().value;
        p.one_particle[0].term.coeff = -3.0;
        let b = big_c_v(&p, 0.0, 2.0, 1.0).unwrap().value;
        assert!((b - 3.0 * a).abs() < 1e-12 * b);
    }

    #[test]
    fn eigen_certificates() {
        let h = HamiltonianSpec::new(PotentialSpec::empty(3, 1), vec![2.0 * PI * PI]).unwrap();
        let ctx = BoundContext::new(h, 0.0, f64::INFINITY, 0.5, 0.0).unwrap();
        assert!((eigen_certificate(&ctx, 1.0, CertificateKind::Barron).unwrap() - 1.0).abs() < 1e-15);
        let l2 = eigen_certificate(&ctx, 1.0, CertificateKind::L2).unwrap();
        let pre = 2f64.powf(0.75) * (4.0 * PI / 3.0).sqrt();
        assert!((l2 - pre * 2f64.powf(4.0)).abs() < 1e-12 * l2);
        // Coulomb closed form
        let (pf, src, reg) = inverse_power_certificate(1.0, 3, 0.5, 1.0, -0.5, 1.0).unwrap();
        assert_eq!((src, reg), (0.0, PowerRegime::Below));
        assert!((pf - (4.0 * (1.0 + 2.0 / 0.5) + 0.5)).abs() < 1e-12);
        assert!(inverse_power_certificate(1.0, 1, 0.2, 1.0, 0.0, 1.0).is_err());
        assert!(inverse_power_certificate(1.2, 1, 0.1, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn critical_norm_bound_dominates_exact_expression() {
        let eg = crate::special::EULER_GAMMA;
        for dl in [0.05, 0.2, 0.5, 0.66] {
            let exact = 3.0
                + 8.0 * PI.sqrt() * gamma(dl / 4.0 + 1.0).unwrap() / (dl * gamma(dl / 4.0 + 0.5).unwrap()) * (2.0 / (dl * std::f64::consts::E) + eg);
            assert!(exact <= inverse_power_norm_bound(1.0, 1, 1.0 - dl).unwrap() + 1e-9);
        }
    }

    #[test]
    fn gamma_ratio() {
        assert!(gamma_ratio_monotone(1.0, &[1.0, 2.0, 3.0]).unwrap());
        assert!(gamma_ratio_monotone(-0.5, &[1.0, 2.0, 4.0]).unwrap());
        assert!(matches!(gamma_ratio_monotone(1.0, &[0.0]), Err(Error::Domain(_))));
    }
}
