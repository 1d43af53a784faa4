//! Fourier-Lebesgue norms, the rescaled sum-space norm with explicit splits,
//! embedding constants and the divergent counterexample family.

use crate::bounds::c_alpha_beta;
use crate::error::{invalid, Error, Result};
use crate::grid::{FreqFunction, FreqGrid, RadialProfile};
use crate::special::{bracket, integrate_tail, sphere_area, tanh_sinh};
use serde::{Deserialize, Serialize};

const QUAD_TOL: f64 = 1e-12;

/// (s, p) of FL^p_s. `p` may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceIndex {
    pub s: f64,
    pub p: f64,
}

impl SpaceIndex {
    pub fn new(s: f64, p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return invalid(format!("p must be >= 1, got {p}"));
        }
        Ok(SpaceIndex { s, p })
    }

    pub fn barron(s: f64) -> Self {
        SpaceIndex { s, p: 1.0 }
    }

    pub fn sobolev(s: f64) -> Self {
        SpaceIndex { s, p: 2.0 }
    }
}

/// (s, alpha, beta) of the rescaled norm on FL^1_s + FL^{alpha'}_s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitIndex {
    pub s: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl SplitIndex {
    pub fn new(s: f64, alpha: f64, beta: f64, n: usize) -> Result<Self> {
        if !(alpha >= 1.0) {
            return invalid(format!("alpha must be >= 1, got {alpha}"));
        }
        if alpha.is_finite() {
            if !(beta > n as f64 / (2.0 * alpha)) {
                return invalid(format!("beta = {beta} must exceed n/(2 alpha) = {}", n as f64 / (2.0 * alpha)));
            }
        } else if !(beta >= 0.0) {
            return invalid(format!("beta must be >= 0 when alpha is infinite, got {beta}"));
        }
        Ok(SplitIndex { s, alpha, beta })
    }

    pub fn alpha_prime(&self) -> f64 {
        conjugate(self.alpha)
    }
}

/// Hoelder conjugate exponent.
pub fn conjugate(a: f64) -> f64 {
    if a == 1.0 {
        f64::INFINITY
    } else if a.is_infinite() {
        1.0
    } else {
        a / (a - 1.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum SplitMethod {
    Trivial,
    Analytic,
    Radius { r: f64 },
    Threshold { kappa: f64 },
}

impl SplitMethod {
    pub fn label(&self) -> String {
        match self {
            SplitMethod::Trivial => "trivial".into(),
            SplitMethod::Analytic => "analytic".into(),
            SplitMethod::Radius { r } => format!("radius({r})"),
            SplitMethod::Threshold { .. } => "threshold".into(),
        }
    }
}

/// One piece of a split.
#[derive(Clone, Debug, PartialEq)]
pub enum Part {
    Profile(RadialProfile),
    Sampled(FreqFunction),
    Zero,
}

/// f = f1 + f2 with f1 in FL^1_s and f2 in FL^{alpha'}_s.
#[derive(Clone, Debug, PartialEq)]
pub struct Split {
    pub f1: Part,
    pub f2: Part,
    pub method: SplitMethod,
    /// ||f1||_{FL^1_s}
    pub norm1: f64,
    /// ||f2||_{FL^{alpha'}_s}, before rescaling
    pub norm2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceLabel {
    Fl { s: f64, p: f64 },
    Sum { s: f64, alpha: f64, beta: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub space: SpaceLabel,
    pub value: f64,
    /// Estimated increase of the norm from outside the grid; None when unknown.
    pub tail_bound: Option<f64>,
    pub truncated: bool,
    pub split_method: Option<String>,
}

impl NormReport {
    /// Value plus the tail estimate (value itself when no estimate exists).
    pub fn with_tail(&self) -> f64 {
        self.value + self.tail_bound.unwrap_or(0.0)
    }
}

fn weighted_abs(f: &FreqFunction, s: f64) -> Vec<f64> {
    f.grid.norms().iter().zip(&f.values).map(|(r, v)| bracket(*r).powf(s) * v.norm()).collect()
}

/// ||<.>^s f||_{L^p} by grid quadrature, with a power-law tail estimate.
pub fn fl_norm(f: &FreqFunction, idx: SpaceIndex) -> NormReport {
    let g = weighted_abs(f, idx.s);
    let meas = f.grid.measures();
    let value = if idx.p.is_infinite() {
        g.iter().cloned().fold(0.0, f64::max)
    } else {
        g.iter().zip(&meas).map(|(x, m)| m * x.powf(idx.p)).sum::<f64>().powf(1.0 / idx.p)
    };
    let (tail_bound, truncated) = tail_estimate(f, idx, value);
    NormReport {
        space: SpaceLabel::Fl { s: idx.s, p: idx.p },
        value,
        tail_bound,
        truncated,
        split_method: None,
    }
}

/// Extends |f| ~ A r^-q past the grid edge R, A matched on the outer shell.
fn tail_estimate(f: &FreqFunction, idx: SpaceIndex, value: f64) -> (Option<f64>, bool) {
    let Some(q) = f.decay else {
        return (None, true);
    };
    if q.is_infinite() {
        return (Some(0.0), false);
    }
    let norms = f.grid.norms();
    let r_edge = f.grid.extent();
    let shell = match &f.grid {
        FreqGrid::Radial(_) => norms[norms.len() - 1] * 0.999,
        FreqGrid::Tensor(_) => 0.9 * r_edge,
    };
    let amp = norms
        .iter()
        .zip(&f.values)
        .filter(|(r, _)| **r >= shell && **r <= r_edge * (1.0 + 1e-12))
        .map(|(r, v)| v.norm() * r.powf(q))
        .fold(0.0, f64::max);
    let d = f.grid.dim() as f64;
    let s = idx.s;
    if idx.p.is_infinite() {
        // sup of <r>^s A r^-q over r > R; monotone unless s > q
        if s > q {
            return (None, true);
        }
        let at_edge = bracket(r_edge).powf(s) * amp * r_edge.powf(-q);
        return (Some((at_edge - value).max(0.0)), false);
    }
    let p = idx.p;
    if (s - q) * p + d >= 0.0 {
        return (None, true);
    }
    let om = sphere_area(f.grid.dim());
    let t = om * integrate_tail(|r| (bracket(r).powf(s) * amp * r.powf(-q)).powf(p) * r.powf(d - 1.0), r_edge, 1e-12);
    let total = (value.powf(p) + t).powf(1.0 / p);
    (Some(total - value), false)
}

/// Split-norm input: a closed form in dimension n, or samples.
#[derive(Clone, Copy, Debug)]
pub enum SplitInput<'a> {
    Profile(&'a RadialProfile),
    Sampled(&'a FreqFunction),
}

/// Default candidate radii: 10^-3 .. 10^3 on a log lattice plus 1.
pub fn default_radii() -> Vec<f64> {
    let mut r: Vec<f64> = (0..=72).map(|k| 10f64.powf(-3.0 + k as f64 / 12.0)).collect();
    r.push(1.0);
    r.sort_by(|a, b| a.partial_cmp(b).unwrap());
    r.dedup();
    r
}

/// Certified upper bound on the rescaled sum norm, with the achieving split.
pub fn split_norm(f: SplitInput<'_>, idx: &SplitIndex, n: usize) -> Result<(NormReport, Split)> {
    split_norm_with_radii(f, idx, n, &default_radii())
}

/// Same as [`split_norm`] with an explicit radius candidate family; on
/// sampled input the radii are snapped to node radii.
pub fn split_norm_with_radii(f: SplitInput<'_>, idx: &SplitIndex, n: usize, radii: &[f64]) -> Result<(NormReport, Split)> {
    let label = SpaceLabel::Sum { s: idx.s, alpha: idx.alpha, beta: idx.beta };
    let scale = if idx.alpha.is_infinite() { 1.0 } else { c_alpha_beta(idx.alpha, idx.beta, n)?.powf(1.0 / idx.alpha) };
    match f {
        SplitInput::Profile(p) => profile_split(p, idx, n, radii, scale, label),
        SplitInput::Sampled(u) => sampled_split(u, idx, radii, scale, label),
    }
}

fn is_zero_profile(p: &RadialProfile) -> bool {
    match p {
        RadialProfile::Power { c, .. }
        | RadialProfile::BracketPower { c, .. }
        | RadialProfile::YukawaKernel { c, .. }
        | RadialProfile::Gaussian { c, .. }
        | RadialProfile::Log { c } => *c == 0.0,
        RadialProfile::Windowed { inner, lo, hi } => hi <= lo || is_zero_profile(inner),
        RadialProfile::Tabulated { values, .. } => values.iter().all(|v| *v == 0.0),
    }
}

/// Radial integrals of g(r) = <r>^s |f(r)| in dimension n.
struct RadialNorms<'a> {
    p: &'a RadialProfile,
    s: f64,
    n: usize,
}

impl RadialNorms<'_> {
    fn g(&self, r: f64) -> f64 {
        bracket(r).powf(self.s) * self.p.eval(r).abs()
    }

    /// omega_n int_a^b g^e r^(n-1) dr, infinite b allowed.
    fn integral(&self, a: f64, b: f64, e: f64) -> f64 {
        let om = sphere_area(self.n);
        let nn = self.n as i32;
        let h = |r: f64| self.g(r).powf(e) * r.powi(nn - 1);
        if b.is_infinite() {
            if !self.tail_finite(e) {
                return f64::INFINITY;
            }
            let a0 = if a > 0.0 { a } else { 1.0 };
            let head = if a > 0.0 { 0.0 } else { self.integral(0.0, 1.0, e) / om };
            return om * (head + integrate_tail(h, a0, QUAD_TOL));
        }
        if a == 0.0 && !self.head_finite(e) {
            return f64::INFINITY;
        }
        om * tanh_sinh(h, a, b, QUAD_TOL)
    }

    fn tail_finite(&self, e: f64) -> bool {
        match self.p.decay_exponent() {
            Some(q) if q.is_infinite() => true,
            Some(q) => (self.s - q) * e + (self.n as f64) < 0.0,
            None => false,
        }
    }

    fn head_finite(&self, e: f64) -> bool {
        match self.p {
            RadialProfile::Power { a, .. } => a * e + (self.n as f64) > 0.0,
            RadialProfile::Windowed { inner, lo, .. } if *lo <= 0.0 => {
                RadialNorms { p: inner, s: self.s, n: self.n }.head_finite(e)
            }
            _ => true,
        }
    }

    /// sup of g over (a, b).
    fn sup(&self, a: f64, b: f64) -> f64 {
        if a == 0.0 && self.p.singular_at_origin() {
            return f64::INFINITY;
        }
        if b.is_infinite() && !self.tail_finite(1e6) {
            // grows or stays flat at infinity
            if let Some(q) = self.p.decay_exponent() {
                if self.s > q {
                    return f64::INFINITY;
                }
            } else {
                return f64::INFINITY;
            }
        }
        let lo = a.max(1e-9);
        let hi = if b.is_infinite() { lo.max(1.0) * 1e8 } else { b };
        let m = 4000;
        let ratio = (hi / lo).ln();
        let mut best = 0.0f64;
        for k in 0..=m {
            let r = lo * (ratio * k as f64 / m as f64).exp();
            best = best.max(self.g(r));
        }
        best
    }

    fn lp(&self, a: f64, b: f64, e: f64) -> f64 {
        if e.is_infinite() {
            self.sup(a, b)
        } else {
            self.integral(a, b, e).powf(1.0 / e)
        }
    }
}

fn profile_split(
    p: &RadialProfile,
    idx: &SplitIndex,
    n: usize,
    radii: &[f64],
    scale: f64,
    label: SpaceLabel,
) -> Result<(NormReport, Split)> {
    let truncated = p.decay_exponent().is_none();
    if is_zero_profile(p) {
        let report = NormReport { space: label, value: 0.0, tail_bound: Some(0.0), truncated: false, split_method: Some("trivial".into()) };
        return Ok((report, Split { f1: Part::Zero, f2: Part::Zero, method: SplitMethod::Trivial, norm1: 0.0, norm2: 0.0 }));
    }
    let rn = RadialNorms { p, s: idx.s, n };
    let ap = idx.alpha_prime();
    if idx.alpha.is_infinite() {
        let v = rn.integral(0.0, f64::INFINITY, 1.0);
        if !v.is_finite() {
            return Err(Error::NotInSpace(format!("profile not in B^{}", idx.s)));
        }
        let report = NormReport { space: label, value: v, tail_bound: Some(0.0), truncated, split_method: Some("analytic".into()) };
        return Ok((report, Split { f1: Part::Profile(p.clone()), f2: Part::Zero, method: SplitMethod::Analytic, norm1: v, norm2: 0.0 }));
    }
    let mut best: Option<(f64, f64, f64, SplitMethod)> = None;
    let mut consider = |n1: f64, n2: f64, m: SplitMethod| {
        let v = n1 + scale * n2;
        if v.is_finite() && best.as_ref().is_none_or(|b| v < b.0) {
            best = Some((v, n1, n2, m));
        }
    };
    // radius family; closed forms for pure powers at s = 0
    let mut rs: Vec<f64> = radii.iter().cloned().filter(|r| *r > 0.0 && r.is_finite()).collect();
    rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    rs.dedup();
    if let (RadialProfile::Power { c, a }, true) = (p, idx.s == 0.0) {
        let om = sphere_area(n);
        let nf = n as f64;
        for &r in &rs {
            let n1 = if a + nf > 0.0 { c.abs() * om * r.powf(a + nf) / (a + nf) } else { f64::INFINITY };
            let n2 = if ap.is_infinite() {
                if *a <= 0.0 { c.abs() * r.powf(*a) } else { f64::INFINITY }
            } else if a * ap + nf < 0.0 {
                c.abs() * (om * r.powf(a * ap + nf) / (-(a * ap) - nf)).powf(1.0 / ap)
            } else {
                f64::INFINITY
            };
            consider(n1, n2, SplitMethod::Radius { r });
        }
    } else if !rs.is_empty() {
        // cumulative pieces between consecutive radii
        let mut low = vec![0.0; rs.len()];
        let mut acc = rn.integral(0.0, rs[0], 1.0);
        low[0] = acc;
        for k in 1..rs.len() {
            acc += rn.integral(rs[k - 1], rs[k], 1.0);
            low[k] = acc;
        }
        let mut high = vec![0.0; rs.len()];
        if ap.is_infinite() {
            for k in 0..rs.len() {
                high[k] = rn.sup(rs[k], f64::INFINITY);
            }
        } else {
            let last = rs.len() - 1;
            let mut acc = rn.integral(rs[last], f64::INFINITY, ap);
            high[last] = acc;
            for k in (0..last).rev() {
                acc += rn.integral(rs[k], rs[k + 1], ap);
                high[k] = acc;
            }
            for h in high.iter_mut() {
                *h = h.powf(1.0 / ap);
            }
        }
        for k in 0..rs.len() {
            consider(low[k], high[k], SplitMethod::Radius { r: rs[k] });
        }
    }
    // threshold split at kappa = ||g||_{L^alpha'}
    let kappa = rn.lp(0.0, f64::INFINITY, ap);
    if kappa.is_finite() && kappa > 0.0 {
        let (n1, n2) = profile_threshold_norms(&rn, kappa, ap);
        consider(n1, n2, SplitMethod::Threshold { kappa });
    }
    let Some((value, n1, n2, method)) = best else {
        return Err(Error::NotInSpace(format!(
            "no finite split in FL^1_{s} + FL^{ap}_{s}",
            s = idx.s
        )));
    };
    let (f1, f2) = match &method {
        SplitMethod::Radius { r } => (
            Part::Profile(RadialProfile::Windowed { inner: Box::new(p.clone()), lo: -1.0, hi: *r }),
            Part::Profile(RadialProfile::Windowed { inner: Box::new(p.clone()), lo: *r, hi: f64::INFINITY }),
        ),
        _ => (Part::Profile(p.clone()), Part::Zero),
    };
    let report = NormReport {
        space: label,
        value,
        tail_bound: Some(0.0),
        truncated,
        split_method: Some(method.label()),
    };
    Ok((report, Split { f1, f2, method, norm1: n1, norm2: n2 }))
}

/// Indicator split of a profile at radius `r`: f 1{|xi| <= r} + f 1{|xi| > r}.
pub fn radius_split(p: &RadialProfile, idx: &SplitIndex, n: usize, r: f64) -> Result<Split> {
    if !(r > 0.0) {
        return invalid(format!("split radius must be positive, got {r}"));
    }
    let ap = idx.alpha_prime();
    let rn = RadialNorms { p, s: idx.s, n };
    let (norm1, norm2) = match (p, idx.s == 0.0) {
        (RadialProfile::Power { c, a }, true) => {
            let om = sphere_area(n);
            let nf = n as f64;
            let n1 = if a + nf > 0.0 { c.abs() * om * r.powf(a + nf) / (a + nf) } else { f64::INFINITY };
            let n2 = if ap.is_infinite() {
                if *a <= 0.0 { c.abs() * r.powf(*a) } else { f64::INFINITY }
            } else if a * ap + nf < 0.0 {
                c.abs() * (om * r.powf(a * ap + nf) / (-(a * ap) - nf)).powf(1.0 / ap)
            } else {
                f64::INFINITY
            };
            (n1, n2)
        }
        _ => (rn.integral(0.0, r, 1.0), rn.lp(r, f64::INFINITY, ap)),
    };
    if !norm1.is_finite() {
        return Err(Error::DivergentPart(format!("low part not in FL^1_{} below radius {r}", idx.s)));
    }
    if !norm2.is_finite() {
        return Err(Error::DivergentPart(format!("high part not in FL^{ap}_{} above radius {r}", idx.s)));
    }
    Ok(Split {
        f1: Part::Profile(RadialProfile::Windowed { inner: Box::new(p.clone()), lo: -1.0, hi: r }),
        f2: Part::Profile(RadialProfile::Windowed { inner: Box::new(p.clone()), lo: r, hi: f64::INFINITY }),
        method: SplitMethod::Radius { r },
        norm1,
        norm2,
    })
}

/// Level-set split S = {g > kappa}, located on a log lattice with bisection
/// of every crossing.
fn profile_threshold_norms(rn: &RadialNorms<'_>, kappa: f64, ap: f64) -> (f64, f64) {
    let lo = 1e-9f64;
    let hi = 1e9f64;
    let m = 3000;
    let lr = (hi / lo).ln();
    let pts: Vec<f64> = (0..=m).map(|k| lo * (lr * k as f64 / m as f64).exp()).collect();
    let above = |r: f64| rn.g(r) > kappa;
    let mut edges = vec![0.0];
    let mut state = above(pts[0]);
    let start_state = state;
    for w in pts.windows(2) {
        let next = above(w[1]);
        if next != state {
            let (mut a, mut b) = (w[0], w[1]);
            for _ in 0..80 {
                let mid = 0.5 * (a + b);
                if above(mid) == state {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            edges.push(0.5 * (a + b));
            state = next;
        }
    }
    edges.push(f64::INFINITY);
    let mut n1 = 0.0;
    let mut n2p = 0.0;
    let mut n2sup = 0.0f64;
    let mut inside = start_state;
    for w in edges.windows(2) {
        if inside {
            n1 += rn.integral(w[0], w[1], 1.0);
        } else if ap.is_infinite() {
            n2sup = n2sup.max(rn.sup(w[0], w[1]));
        } else {
            n2p += rn.integral(w[0], w[1], ap);
        }
        inside = !inside;
    }
    let n2 = if ap.is_infinite() { n2sup } else { n2p.powf(1.0 / ap) };
    (n1, n2)
}

fn sampled_split(u: &FreqFunction, idx: &SplitIndex, radii: &[f64], scale: f64, label: SpaceLabel) -> Result<(NormReport, Split)> {
    let g = weighted_abs(u, idx.s);
    let meas = u.grid.measures();
    let norms = u.grid.norms();
    let truncated = u.decay.is_none();
    if g.iter().all(|x| *x == 0.0) {
        let report = NormReport { space: label, value: 0.0, tail_bound: Some(0.0), truncated: false, split_method: Some("trivial".into()) };
        return Ok((report, Split { f1: Part::Zero, f2: Part::Zero, method: SplitMethod::Trivial, norm1: 0.0, norm2: 0.0 }));
    }
    let ap = idx.alpha_prime();
    let part = |keep: &dyn Fn(usize) -> bool| -> FreqFunction {
        let mut out = u.clone();
        for (i, v) in out.values.iter_mut().enumerate() {
            if !keep(i) {
                *v = num_complex::Complex64::new(0.0, 0.0);
            }
        }
        out.decay = None;
        out
    };
    if idx.alpha.is_infinite() {
        let v: f64 = g.iter().zip(&meas).map(|(a, m)| a * m).sum();
        let report = NormReport { space: label, value: v, tail_bound: None, truncated, split_method: Some("analytic".into()) };
        return Ok((report, Split { f1: Part::Sampled(u.clone()), f2: Part::Zero, method: SplitMethod::Analytic, norm1: v, norm2: 0.0 }));
    }
    let mut order: Vec<usize> = (0..g.len()).collect();
    order.sort_by(|a, b| norms[*a].partial_cmp(&norms[*b]).unwrap());
    // prefix of L^1 mass and suffix of L^alpha' mass over the radial order
    let m = order.len();
    let mut pre = vec![0.0; m + 1];
    for k in 0..m {
        pre[k + 1] = pre[k] + g[order[k]] * meas[order[k]];
    }
    let mut suf = vec![0.0f64; m + 1];
    for k in (0..m).rev() {
        let i = order[k];
        suf[k] = if ap.is_infinite() { suf[k + 1].max(g[i]) } else { suf[k + 1] + meas[i] * g[i].powf(ap) };
    }
    let high = |k: usize| if ap.is_infinite() { suf[k] } else { suf[k].powf(1.0 / ap) };
    let mut best: (f64, f64, f64, SplitMethod) = (f64::INFINITY, 0.0, 0.0, SplitMethod::Trivial);
    for &r in radii {
        // cut after the last node with |xi| <= r
        let k = order.partition_point(|i| norms[*i] <= r);
        let v = pre[k] + scale * high(k);
        if v < best.0 {
            best = (v, pre[k], high(k), SplitMethod::Radius { r });
        }
    }
    let kappa = high(0);
    let n1: f64 = g.iter().zip(&meas).filter(|(x, _)| **x > kappa).map(|(x, w)| x * w).sum();
    let n2 = if ap.is_infinite() {
        g.iter().cloned().filter(|x| *x <= kappa).fold(0.0, f64::max)
    } else {
        g.iter().zip(&meas).filter(|(x, _)| **x <= kappa).map(|(x, w)| w * x.powf(ap)).sum::<f64>().powf(1.0 / ap)
    };
    if n1 + scale * n2 < best.0 {
        best = (n1 + scale * n2, n1, n2, SplitMethod::Threshold { kappa });
    }
    let (value, n1, n2, method) = best;
    let (f1, f2) = match &method {
        SplitMethod::Radius { r } => {
            let r = *r;
            (Part::Sampled(part(&|i| norms[i] <= r)), Part::Sampled(part(&|i| norms[i] > r)))
        }
        SplitMethod::Threshold { kappa } => {
            let kp = *kappa;
            (Part::Sampled(part(&|i| g[i] > kp)), Part::Sampled(part(&|i| g[i] <= kp)))
        }
        _ => unreachable!(),
    };
    let report = NormReport { space: label, value, tail_bound: None, truncated, split_method: Some(method.label()) };
    Ok((report, Split { f1, f2, method, norm1: n1, norm2: n2 }))
}

/// Threshold split of g = <.>^s |f| at kappa = ||g||_{L^p}:
/// returns (kappa, ||g 1_S||_{L^1}, ||g 1_{S^c}||_{L^r}).
pub fn threshold_split(f: &FreqFunction, s: f64, p: f64, r: f64) -> Result<(f64, f64, f64)> {
    if r < p {
        return invalid(format!("need r >= p, got r = {r}, p = {p}"));
    }
    let g = weighted_abs(f, s);
    let meas = f.grid.measures();
    let kappa = if p.is_infinite() {
        g.iter().cloned().fold(0.0, f64::max)
    } else {
        g.iter().zip(&meas).map(|(x, m)| m * x.powf(p)).sum::<f64>().powf(1.0 / p)
    };
    let l1: f64 = g.iter().zip(&meas).filter(|(x, _)| **x > kappa).map(|(x, m)| x * m).sum();
    let lr = if r.is_infinite() {
        g.iter().cloned().filter(|x| *x <= kappa).fold(0.0, f64::max)
    } else {
        g.iter().zip(&meas).filter(|(x, _)| **x <= kappa).map(|(x, m)| m * x.powf(r)).sum::<f64>().powf(1.0 / r)
    };
    Ok((kappa, l1, lr))
}

/// Hoelder constant ||<.>^{s2-s1}||_{L^{1/tau}}, tau = 1/alpha2' - 1/alpha1'.
pub fn embedding_constant(src: (f64, f64), dst: (f64, f64), n: usize) -> Result<f64> {
    let (s1, a1) = src;
    let (s2, a2) = dst;
    let nf = n as f64;
    let lhs = s2 - nf / a2;
    let rhs = s1 - nf / a1;
    if lhs >= rhs - 1e-14 && !(s1 == s2 && a2 >= a1) {
        return Err(Error::NoEmbedding(format!(
            "s2 - n/alpha2 = {lhs} is not below s1 - n/alpha1 = {rhs}"
        )));
    }
    if a2 < a1 {
        return invalid(format!("embedding direction needs alpha1 <= alpha2, got {a1} > {a2}"));
    }
    if s2 == s1 {
        return Ok(1.0);
    }
    let tau = 1.0 / conjugate(a2) - 1.0 / conjugate(a1);
    if tau <= 0.0 {
        return invalid("tau must be positive");
    }
    let e = (s2 - s1) / tau;
    // int <r>^e over R^n, finite since e < -n
    let om = sphere_area(n);
    let val = om * (tanh_sinh(|r| bracket(r).powf(e) * r.powi(n as i32 - 1), 0.0, 1.0, QUAD_TOL)
        + integrate_tail(|r| bracket(r).powf(e) * r.powi(n as i32 - 1), 1.0, QUAD_TOL));
    Ok(val.powf(tau))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub k: f64,
    pub eps_k: f64,
    /// ||<.>^{s1} f_k||_{L^{alpha1'}}, equal to 1 up to quadrature
    pub upper_src: f64,
    /// eps_k^{1/alpha2' - 1/alpha1'} - 1
    pub lower_dst: f64,
}

/// eps_k = int_{|xi| <= k} <xi>^-n.
pub fn eps_k(k: f64, n: usize) -> f64 {
    if n == 1 {
        return 2.0 * k.asinh();
    }
    sphere_area(n) * tanh_sinh(|r| bracket(r).powf(-(n as f64)) * r.powi(n as i32 - 1), 0.0, k, QUAD_TOL)
}

pub fn counterexample_norm(k: f64, s1: f64, a1: f64, s2: f64, a2: f64, n: usize) -> Result<Counterexample> {
    if !(k >= 1.0) {
        return invalid(format!("k must be >= 1, got {k}"));
    }
    if !(a1 < a2) {
        return invalid(format!("need alpha1 < alpha2, got {a1}, {a2}"));
    }
    let nf = n as f64;
    if ((s2 - nf / a2) - (s1 - nf / a1)).abs() > 1e-12 {
        return invalid("the construction needs s2 - n/alpha2 = s1 - n/alpha1");
    }
    let e = eps_k(k, n);
    let a1p = conjugate(a1);
    let a2p = conjugate(a2);
    // f_k = eps^{-1/a1'} <xi>^{-s1 - n/a1'} on |xi| <= k
    let upper_src = if a1p.is_infinite() {
        1.0
    } else {
        let inner = sphere_area(n)
            * tanh_sinh(
                |r| (e.powf(-1.0 / a1p) * bracket(r).powf(-nf / a1p)).powf(a1p) * r.powi(n as i32 - 1),
                0.0,
                k,
                QUAD_TOL,
            );
        inner.powf(1.0 / a1p)
    };
    let expo = 1.0 / a2p - if a1p.is_infinite() { 0.0 } else { 1.0 / a1p };
    Ok(Counterexample { k, eps_k: e, upper_src, lower_dst: e.powf(expo) - 1.0 })
}
