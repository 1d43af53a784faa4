//! Catalog of potentials with closed-form Fourier transforms, the many-body
//! specification V = sum V_i + sum V_ij + V_ad, and the sharp example family.

use crate::error::{invalid, Error, Result};
use crate::grid::RadialProfile;
use crate::spaces::{radius_split, Split, SplitIndex};
use crate::special::{exp_sinh, gamma, gl_composite, sphere_area, tanh_sinh};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Term kinds with their parameters; serialized as {"kind": .., "params": {..}}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum TermKind {
    /// |x|^-t
    InversePower { t: f64 },
    /// |x|^-1; the logarithmic transform in one dimension
    Coulomb,
    /// e^{-mu |x|} / |x| in three dimensions
    Yukawa { mu: f64 },
    /// |x|^-1 on the line, transform -2(ln|xi| + euler gamma)
    Log1d,
    /// kappa exp(-pi |x|^2 / width^2)
    Gaussian { kappa: f64, width: f64 },
    /// eigenfunction exp(-|x|^delta) of the sharp example
    SharpExample { delta: f64 },
    Custom { profile: Option<RadialProfile> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialTerm {
    #[serde(flatten)]
    pub kind: TermKind,
    #[serde(default)]
    pub shift: Vec<f64>,
    #[serde(default = "one")]
    pub coeff: f64,
}

fn one() -> f64 {
    1.0
}

impl PotentialTerm {
    pub fn new(kind: TermKind) -> Self {
        PotentialTerm { kind, shift: Vec::new(), coeff: 1.0 }
    }

    pub fn with_coeff(mut self, c: f64) -> Self {
        self.coeff = c;
        self
    }

    pub fn with_shift(mut self, a: Vec<f64>) -> Self {
        self.shift = a;
        self
    }

    /// Check the kind's parameter range in dimension `d`.
    pub fn validate(&self, d: usize) -> Result<()> {
        if !self.shift.is_empty() && self.shift.len() != d {
            return Err(Error::DimensionMismatch(format!("shift has length {}, expected {d}", self.shift.len())));
        }
        if !self.coeff.is_finite() {
            return invalid("coefficient must be finite");
        }
        let df = d as f64;
        match &self.kind {
            TermKind::InversePower { t } => {
                let ok = (*t > 0.0 && *t < df) || (d == 1 && *t > 1.0 && *t < 2.0) || (d == 1 && *t == 1.0);
                if !ok {
                    return invalid(format!("inverse power t = {t} not supported in dimension {d}"));
                }
            }
            TermKind::Coulomb => {}
            TermKind::Yukawa { mu } => {
                if !(*mu > 0.0) {
                    return invalid(format!("yukawa needs mu > 0, got {mu}"));
                }
                if d != 3 {
                    return Err(Error::UnsupportedScale(format!("yukawa is implemented in dimension 3, got {d}")));
                }
            }
            TermKind::Log1d => {
                if d != 1 {
                    return Err(Error::DimensionMismatch(format!("log_1d lives in dimension 1, got {d}")));
                }
            }
            TermKind::Gaussian { width, kappa } => {
                if !(*width > 0.0) || !kappa.is_finite() {
                    return invalid(format!("gaussian needs width > 0, got {width}"));
                }
            }
            TermKind::SharpExample { delta } => {
                if !(*delta > 0.0 && *delta <= 1.0) {
                    return invalid(format!("sharp example needs 0 < delta <= 1, got {delta}"));
                }
            }
            TermKind::Custom { profile } => {
                if profile.is_none() {
                    return Err(Error::UnsupportedKind("custom term without profile".into()));
                }
            }
        }
        Ok(())
    }

    /// Short label used in error messages.
    pub fn label(&self) -> String {
        match &self.kind {
            TermKind::InversePower { t } => format!("inverse_power(t={t})"),
            TermKind::Coulomb => "coulomb".into(),
            TermKind::Yukawa { mu } => format!("yukawa(mu={mu})"),
            TermKind::Log1d => "log_1d".into(),
            TermKind::Gaussian { kappa, width } => format!("gaussian(kappa={kappa},width={width})"),
            TermKind::SharpExample { delta } => format!("sharp_example(delta={delta})"),
            TermKind::Custom { .. } => "custom".into(),
        }
    }
}

/// c_{t,n} = pi^{t-n/2} Gamma((n-t)/2) / Gamma(t/2), the transform constant of |x|^-t.
pub fn c_t_n(t: f64, n: usize) -> Result<f64> {
    let nf = n as f64;
    Ok(PI.powf(t - nf / 2.0) * gamma((nf - t) / 2.0)? / gamma(t / 2.0)?)
}

/// Closed-form transform of a term, including its coefficient. Shifts only
/// add a phase and are dropped. A sharp example term transforms to its
/// eigenfunction exp(-|x|^delta).
pub fn fourier_transform(term: &PotentialTerm, n: usize) -> Result<RadialProfile> {
    term.validate(n)?;
    let b = term.coeff;
    let nf = n as f64;
    let p = match &term.kind {
        TermKind::InversePower { t } if n == 1 && *t == 1.0 => RadialProfile::Log { c: 1.0 },
        TermKind::InversePower { t } => RadialProfile::Power { c: c_t_n(*t, n)?, a: t - nf },
        TermKind::Coulomb if n == 1 => RadialProfile::Log { c: 1.0 },
        TermKind::Coulomb => RadialProfile::Power { c: c_t_n(1.0, n)?, a: 1.0 - nf },
        TermKind::Yukawa { mu } => RadialProfile::YukawaKernel { c: 4.0 * PI, mu: *mu, m: 1.0 },
        TermKind::Log1d => RadialProfile::Log { c: 1.0 },
        TermKind::Gaussian { kappa, width } => RadialProfile::Gaussian { c: kappa * width.powi(n as i32), w: *width },
        TermKind::SharpExample { delta } => sharp_wavefunction_profile(*delta, n)?,
        TermKind::Custom { profile } => profile.clone().ok_or_else(|| Error::UnsupportedKind("custom term without profile".into()))?,
    };
    Ok(p.scaled(b))
}

/// Indicator split of a term's transform at radius r, both part norms evaluated.
pub fn decompose_low_high(term: &PotentialTerm, n: usize, r: f64, idx: &SplitIndex) -> Result<Split> {
    let p = fourier_transform(term, n)?;
    radius_split(&p, idx, n, r)
}

/// Open set of (s, alpha) for which a term lies in FL^1_s + FL^{alpha'}_s and
/// the structural constraint 2 + s - |s| - n/alpha > 0 holds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleRegion {
    pub n: usize,
    /// decay exponent of the transform
    pub q: f64,
}

impl AdmissibleRegion {
    pub fn contains(&self, s: f64, alpha: f64) -> bool {
        if !(alpha >= 1.0) {
            return false;
        }
        let nf = self.n as f64;
        let inv = if alpha.is_infinite() { 0.0 } else { 1.0 / alpha };
        let decay_ok = self.q.is_infinite() || s < self.q - nf + nf * inv;
        let structural = if s >= 0.0 {
            alpha > nf / 2.0
        } else {
            s > -1.0 && alpha > nf / (2.0 * (1.0 + s))
        };
        decay_ok && structural
    }

    pub fn describe(&self) -> String {
        let bound = if self.q.is_infinite() {
            "no decay constraint".to_string()
        } else {
            format!("s < {} + {}/alpha", self.q - self.n as f64, self.n)
        };
        format!("{bound}; s >= 0 with alpha > {0}/2, or -1 < s < 0 with alpha > {0}/(2(1+s))", self.n)
    }
}

pub fn admissible_region(term: &PotentialTerm, n: usize) -> Result<AdmissibleRegion> {
    let p = fourier_transform(term, n)?;
    let q = p.decay_exponent().ok_or_else(|| Error::UnsupportedKind(format!("{} has no decay exponent", term.label())))?;
    Ok(AdmissibleRegion { n, q })
}

/// A one-particle term attached to particle i (1-based).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneParticleTerm {
    pub i: usize,
    #[serde(flatten)]
    pub term: PotentialTerm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairTerm {
    pub i: usize,
    pub j: usize,
    #[serde(flatten)]
    pub term: PotentialTerm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub n: usize,
    #[serde(rename = "N")]
    pub particles: usize,
    #[serde(default)]
    pub one_particle: Vec<OneParticleTerm>,
    #[serde(default)]
    pub pairwise: Vec<PairTerm>,
    #[serde(default)]
    pub additive: Option<PotentialTerm>,
}

impl PotentialSpec {
    pub fn empty(n: usize, particles: usize) -> Self {
        PotentialSpec { n, particles, one_particle: Vec::new(), pairwise: Vec::new(), additive: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.particles == 0 {
            return invalid("n and N must be positive");
        }
        for t in &self.one_particle {
            if t.i == 0 || t.i > self.particles {
                return invalid(format!("particle index {} outside 1..{}", t.i, self.particles));
            }
            t.term.validate(self.n)?;
        }
        for t in &self.pairwise {
            if t.i == 0 || t.j > self.particles || t.i >= t.j {
                return invalid(format!("pair ({}, {}) must satisfy 1 <= i < j <= {}", t.i, t.j, self.particles));
            }
            t.term.validate(self.n)?;
        }
        if let Some(t) = &self.additive {
            t.validate(self.n * self.particles)?;
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.one_particle.is_empty() && self.pairwise.is_empty() && self.additive.is_none()
    }

    /// Total configuration dimension nN.
    pub fn total_dim(&self) -> usize {
        self.n * self.particles
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    #[serde(flatten)]
    pub potential: PotentialSpec,
    pub masses: Vec<f64>,
}

impl HamiltonianSpec {
    pub fn new(potential: PotentialSpec, masses: Vec<f64>) -> Result<Self> {
        let h = HamiltonianSpec { potential, masses };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        self.potential.validate()?;
        if self.masses.len() != self.potential.particles {
            return Err(Error::DimensionMismatch(format!(
                "{} masses for {} particles",
                self.masses.len(),
                self.potential.particles
            )));
        }
        if self.masses.iter().any(|m| !(*m > 0.0 && m.is_finite())) {
            return invalid("masses must be positive");
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let h: HamiltonianSpec = serde_json::from_str(s).map_err(|e| Error::InvalidArgument(format!("config: {e}")))?;
        h.validate()?;
        Ok(h)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }
}

/// Example family with eigenfunction exp(-|x|^delta).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpExample {
    pub delta: f64,
    pub lambda: f64,
    pub spec: PotentialSpec,
}

/// V = delta^2 |x|^{2 delta - 2}/2 - delta (n + delta - 2) |x|^{delta - 2}/2 with
/// lambda = 0 for delta < 1; V = -(n-1)/(2|x|) with lambda = -1/2 at delta = 1.
pub fn sharp_example_potential(delta: f64, n: usize) -> Result<SharpExample> {
    if !(delta > 0.0 && delta <= 1.0) {
        return invalid(format!("delta must lie in (0, 1], got {delta}"));
    }
    if n < 2 {
        return invalid("the sharp example needs n >= 2");
    }
    let nf = n as f64;
    let mut spec = PotentialSpec::empty(n, 1);
    let lambda = if delta == 1.0 {
        spec.one_particle.push(OneParticleTerm {
            i: 1,
            term: PotentialTerm::new(TermKind::Coulomb).with_coeff(-(nf - 1.0) / 2.0),
        });
        -0.5
    } else {
        spec.one_particle.push(OneParticleTerm {
            i: 1,
            term: PotentialTerm::new(TermKind::InversePower { t: 2.0 - 2.0 * delta }).with_coeff(delta * delta / 2.0),
        });
        spec.one_particle.push(OneParticleTerm {
            i: 1,
            term: PotentialTerm::new(TermKind::InversePower { t: 2.0 - delta }).with_coeff(-delta * (nf + delta - 2.0) / 2.0),
        });
        0.0
    };
    Ok(SharpExample { delta, lambda, spec })
}

/// Transform of exp(-|x|^delta) at |xi| = k, for n = 1 or 3.
pub fn sharp_wavefunction_hat(delta: f64, n: usize, k: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return invalid(format!("delta must lie in (0, 1], got {delta}"));
    }
    if delta == 1.0 {
        return Ok(hydrogen_like_hat(n, k));
    }
    sharp_transform_quadrature(delta, n, k)
}

/// The quadrature behind `sharp_wavefunction_hat`, usable at delta = 1 too.
pub fn sharp_transform_quadrature(delta: f64, n: usize, k: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return invalid(format!("delta must lie in (0, 1], got {delta}"));
    }
    if n != 1 && n != 3 {
        return Err(Error::UnsupportedScale(format!("radial transform implemented for n = 1, 3; got {n}")));
    }
    let k = k.abs();
    let w = 2.0 * PI * k;
    if n == 3 && k < 1e-9 {
        return Ok(4.0 * PI * gamma(3.0 / delta)? / delta);
    }
    if n == 1 && k == 0.0 {
        return Ok(2.0 * gamma(1.0 / delta)? / delta);
    }
    let c = (PI * delta / 2.0).cos();
    let s = (PI * delta / 2.0).sin();
    let tol = 1e-13;
    if w >= 1.0 {
        // rotate onto the imaginary axis: r = i z / w
        let damp = |z: f64| {
            let y = (z / w).powf(delta);
            (-c * y).exp() * (s * y).sin()
        };
        if n == 3 {
            let i = exp_sinh(|z| z * (-z).exp() * damp(z), 0.0, tol) / (w * w);
            Ok(2.0 / k * i)
        } else {
            Ok(2.0 / w * exp_sinh(|z| (-z).exp() * damp(z), 0.0, tol))
        }
    } else {
        let r_end = 40f64.powf(1.0 / delta);
        let f = |r: f64| {
            let e = (-r.powf(delta)).exp();
            if n == 3 {
                r * e * (w * r).sin()
            } else {
                e * (w * r).cos()
            }
        };
        let head = tanh_sinh(f, 0.0, 1.0, tol);
        let panels = (r_end - 1.0).ceil().max(1.0) as usize;
        let body = gl_composite(f, 1.0, r_end, panels, 16);
        if n == 3 {
            Ok(2.0 / k * (head + body))
        } else {
            Ok(2.0 * (head + body))
        }
    }
}

/// Transform of exp(-|x|) in dimension n.
pub fn hydrogen_like_hat(n: usize, k: f64) -> f64 {
    let nf = n as f64;
    let c = 2f64.powi(n as i32) * PI.powf((nf - 1.0) / 2.0) * statrs::function::gamma::gamma((nf + 1.0) / 2.0);
    c * (1.0 + 4.0 * PI * PI * k * k).powf(-(nf + 1.0) / 2.0)
}

/// Large-|xi| expansion of the three-dimensional transform of exp(-|x|^delta)
/// as (exponent, coefficient) pairs: psi_hat ~ sum b_m |xi|^-(3 + m delta).
pub fn sharp_asymptotic_terms(delta: f64, terms: usize) -> Vec<(f64, f64)> {
    let mut fact = 1.0;
    (1..=terms)
        .map(|m| {
            let mf = m as f64;
            fact *= mf;
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            let g = statrs::function::gamma::gamma(2.0 + mf * delta);
            let b = 2.0 * sign * g * (mf * PI * delta / 2.0).sin() / (fact * (2.0 * PI).powf(2.0 + mf * delta));
            (3.0 + mf * delta, b)
        })
        .collect()
}

/// The expansion summed over the first `terms` orders at |xi| = k.
pub fn sharp_wavefunction_asymptotic(delta: f64, k: f64, terms: usize) -> f64 {
    sharp_asymptotic_terms(delta, terms).iter().map(|(e, b)| b * k.powf(-e)).sum()
}

/// Leading coefficient C1 of the transform, psi_hat ~ C1 |xi|^{-(3+delta)}.
pub fn sharp_leading_coefficient(delta: f64) -> f64 {
    2.0 * statrs::function::gamma::gamma(2.0 + delta) * (PI * delta / 2.0).sin() / (2.0 * PI).powf(2.0 + delta)
}

fn sharp_wavefunction_profile(delta: f64, n: usize) -> Result<RadialProfile> {
    let nf = n as f64;
    if delta == 1.0 {
        let c = 2f64.powi(n as i32) * PI.powf((nf - 1.0) / 2.0) * gamma((nf + 1.0) / 2.0)?;
        return Ok(RadialProfile::YukawaKernel { c, mu: 1.0, m: (nf + 1.0) / 2.0 });
    }
    let m = 4000;
    let (lo, hi) = (1e-4f64, 1e4f64);
    let mut nodes = Vec::with_capacity(m + 1);
    let mut values = Vec::with_capacity(m + 1);
    nodes.push(0.0);
    values.push(sharp_wavefunction_hat(delta, n, 0.0)?);
    for j in 0..m {
        let r = lo * (hi / lo).powf(j as f64 / (m - 1) as f64);
        nodes.push(r);
        values.push(sharp_wavefunction_hat(delta, n, r)?);
    }
    Ok(RadialProfile::Tabulated { nodes, values, decay: Some(nf + delta) })
}

/// ||f||_{L^1} of e^{-|x|^delta} in dimension n, used as a consistency check.
pub fn sharp_wavefunction_mass(delta: f64, n: usize) -> Result<f64> {
    Ok(sphere_area(n) * gamma(n as f64 / delta)? / delta)
}
