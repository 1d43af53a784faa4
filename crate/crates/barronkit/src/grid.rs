//! Frequency grids, sampled functions, closed-form radial profiles and the
//! structured convolutions used to apply potentials in frequency space.

use crate::error::{invalid, Error, Result};
use crate::special::{gauss_legendre, integrate_tail, sphere_area, tanh_sinh, EULER_GAMMA};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest ambient dimension for which dense tensor grids are built.
pub const MAX_TENSOR_DIM: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialScheme {
    Uniform,
    LogUniform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub dim: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub r_max: f64,
    pub scheme: RadialScheme,
}

/// One symmetric axis: `count` (odd) equispaced nodes on [-extent, extent].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub extent: f64,
    pub count: usize,
}

impl Axis {
    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / (self.count - 1) as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        // centred formula keeps the grid exactly symmetric
        let half = (self.count / 2) as f64;
        (k as f64 - half) * self.spacing()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorGrid {
    pub axes: Vec<Axis>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FreqGrid {
    Radial(RadialGrid),
    Tensor(TensorGrid),
}

pub fn make_radial_grid(d: usize, r_max: f64, count: usize, scheme: RadialScheme) -> Result<FreqGrid> {
    if d == 0 {
        return invalid("dimension must be >= 1");
    }
    if !(r_max > 0.0) || !r_max.is_finite() {
        return invalid(format!("r_max must be positive, got {r_max}"));
    }
    if count < 8 {
        return invalid(format!("count must be >= 8, got {count}"));
    }
    let nodes: Vec<f64> = match scheme {
        RadialScheme::Uniform => {
            let h = r_max / count as f64;
            (0..count).map(|j| (j as f64 + 0.5) * h).collect()
        }
        RadialScheme::LogUniform => {
            // midpoints of a uniform grid in u = ln(1 + r/a): near-uniform
            // close to 0, geometric for r >> a, neighbour gap ratio <= 1.3
            let m = count as f64;
            let kappa = (m * 1.3f64.ln()).min(14.0);
            let scale = r_max / kappa.exp_m1();
            (0..count).map(|j| scale * (kappa * (j as f64 + 0.5) / m).exp_m1()).collect()
        }
    };
    let weights = cubic_weights(&nodes, r_max);
    Ok(FreqGrid::Radial(RadialGrid { dim: d, nodes, weights, r_max, scheme }))
}

/// Weights of the rule that integrates the piecewise-cubic interpolant of the
/// samples over [0, r_max]; exact for cubics.
fn cubic_weights(nodes: &[f64], r_max: f64) -> Vec<f64> {
    let m = nodes.len();
    let mut w = vec![0.0; m];
    let (gx, gw) = gauss_legendre(3);
    let mut segs: Vec<(f64, f64, usize)> = Vec::with_capacity(m + 1);
    segs.push((0.0, nodes[0], 0));
    for j in 0..m - 1 {
        let start = j.saturating_sub(1).min(m - 4);
        segs.push((nodes[j], nodes[j + 1], start));
    }
    if r_max > nodes[m - 1] {
        segs.push((nodes[m - 1], r_max, m - 4));
    }
    for (a, b, st) in segs {
        let st = st.min(m - 4);
        let sten = &nodes[st..st + 4];
        for (x, gwk) in gx.iter().zip(&gw) {
            let r = 0.5 * (a + b) + 0.5 * (b - a) * x;
            let scale = 0.5 * (b - a) * gwk;
            for l in 0..4 {
                let mut basis = 1.0;
                for k in 0..4 {
                    if k != l {
                        basis *= (r - sten[k]) / (sten[l] - sten[k]);
                    }
                }
                w[st + l] += scale * basis;
            }
        }
    }
    w
}

impl TensorGrid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() {
            return invalid("tensor grid needs at least one axis");
        }
        if axes.len() > MAX_TENSOR_DIM {
            return Err(Error::UnsupportedScale(format!(
                "tensor grids are capped at {MAX_TENSOR_DIM} dimensions, got {}",
                axes.len()
            )));
        }
        for a in &axes {
            if a.count < 3 || a.count % 2 == 0 {
                return invalid(format!("axis count must be odd and >= 3, got {}", a.count));
            }
            if !(a.extent > 0.0) {
                return invalid(format!("axis extent must be positive, got {}", a.extent));
            }
        }
        Ok(TensorGrid { axes })
    }

    pub fn cube(d: usize, extent: f64, count: usize) -> Result<Self> {
        TensorGrid::new(vec![Axis { extent, count }; d])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major strides, last axis fastest.
    pub fn strides(&self) -> Vec<usize> {
        let d = self.dim();
        let mut s = vec![1; d];
        for a in (0..d.saturating_sub(1)).rev() {
            s[a] = s[a + 1] * self.axes[a + 1].count;
        }
        s
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let d = self.dim();
        let mut idx = vec![0; d];
        for a in (0..d).rev() {
            let c = self.axes[a].count;
            idx[a] = flat % c;
            flat /= c;
        }
        idx
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .zip(&self.axes)
            .map(|(&k, a)| a.node(k))
            .collect()
    }

    pub fn origin(&self) -> usize {
        let s = self.strides();
        self.axes.iter().zip(&s).map(|(a, st)| (a.count / 2) * st).sum()
    }

    /// Flat index of the mirrored node -xi.
    pub fn mirror(&self, flat: usize) -> usize {
        let s = self.strides();
        self.multi_index(flat)
            .iter()
            .zip(&self.axes)
            .zip(&s)
            .map(|((&k, a), st)| (a.count - 1 - k) * st)
            .sum()
    }

    fn trapezoid_weight(&self, flat: usize) -> f64 {
        self.multi_index(flat)
            .iter()
            .zip(&self.axes)
            .map(|(&k, a)| {
                let h = a.spacing();
                if k == 0 || k == a.count - 1 {
                    0.5 * h
                } else {
                    h
                }
            })
            .product()
    }

    fn uniform_spacing(&self) -> Option<f64> {
        let h = self.axes[0].spacing();
        let c = self.axes[0].count;
        if self.axes.iter().all(|a| a.count == c && (a.spacing() - h).abs() <= 1e-14 * h) {
            Some(h)
        } else {
            None
        }
    }
}

impl FreqGrid {
    pub fn tensor(d: usize, extent: f64, count: usize) -> Result<Self> {
        Ok(FreqGrid::Tensor(TensorGrid::cube(d, extent, count)?))
    }

    pub fn dim(&self) -> usize {
        match self {
            FreqGrid::Radial(g) => g.dim,
            FreqGrid::Tensor(g) => g.dim(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            FreqGrid::Radial(g) => g.nodes.len(),
            FreqGrid::Tensor(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_radial(&self) -> bool {
        matches!(self, FreqGrid::Radial(_))
    }

    /// |xi| at every node.
    pub fn norms(&self) -> Vec<f64> {
        match self {
            FreqGrid::Radial(g) => g.nodes.clone(),
            FreqGrid::Tensor(g) => (0..g.len())
                .map(|i| g.point(i).iter().map(|x| x * x).sum::<f64>().sqrt())
                .collect(),
        }
    }

    /// Quadrature weights for integrals over R^d (sphere factor included on
    /// radial grids).
    pub fn measures(&self) -> Vec<f64> {
        match self {
            FreqGrid::Radial(g) => {
                let om = sphere_area(g.dim);
                g.nodes
                    .iter()
                    .zip(&g.weights)
                    .map(|(r, w)| om * w * r.powi(g.dim as i32 - 1))
                    .collect()
            }
            FreqGrid::Tensor(g) => (0..g.len()).map(|i| g.trapezoid_weight(i)).collect(),
        }
    }

    /// Radius of the largest ball fully covered by the grid.
    pub fn extent(&self) -> f64 {
        match self {
            FreqGrid::Radial(g) => g.r_max,
            FreqGrid::Tensor(g) => g.axes.iter().map(|a| a.extent).fold(f64::INFINITY, f64::min),
        }
    }

    /// Halve the spacing, keeping the extent.
    pub fn refined(&self) -> Result<FreqGrid> {
        match self {
            FreqGrid::Radial(g) => make_radial_grid(g.dim, g.r_max, 2 * g.nodes.len(), g.scheme),
            FreqGrid::Tensor(g) => Ok(FreqGrid::Tensor(TensorGrid::new(
                g.axes
                    .iter()
                    .map(|a| Axis { extent: a.extent, count: 2 * a.count - 1 })
                    .collect(),
            )?)),
        }
    }
}

/// Closed-form radial profiles f(r), r = |xi|.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialProfile {
    /// c r^a
    Power { c: f64, a: f64 },
    /// c <r>^a
    BracketPower { c: f64, a: f64 },
    /// c (mu^2 + 4 pi^2 r^2)^(-m)
    YukawaKernel { c: f64, mu: f64, m: f64 },
    /// c exp(-pi w^2 r^2)
    Gaussian { c: f64, w: f64 },
    /// -2 c (ln r + euler gamma)
    Log { c: f64 },
    /// inner * 1{lo < r <= hi}
    Windowed { inner: Box<RadialProfile>, lo: f64, hi: f64 },
    /// piecewise-linear table with an optional power-law decay beyond the last node
    Tabulated { nodes: Vec<f64>, values: Vec<f64>, decay: Option<f64> },
}

impl RadialProfile {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            RadialProfile::Power { c, a } => {
                if *a == 0.0 {
                    *c
                } else {
                    c * r.powf(*a)
                }
            }
            RadialProfile::BracketPower { c, a } => c * (1.0 + r * r).powf(a / 2.0),
            RadialProfile::YukawaKernel { c, mu, m } => c * (mu * mu + 4.0 * PI * PI * r * r).powf(-m),
            RadialProfile::Gaussian { c, w } => c * (-PI * w * w * r * r).exp(),
            RadialProfile::Log { c } => -2.0 * c * (r.ln() + EULER_GAMMA),
            RadialProfile::Windowed { inner, lo, hi } => {
                if r > *lo && r <= *hi {
                    inner.eval(r)
                } else {
                    0.0
                }
            }
            RadialProfile::Tabulated { nodes, values, decay } => {
                let m = nodes.len();
                if m == 0 {
                    return 0.0;
                }
                if r <= nodes[0] {
                    return values[0];
                }
                if r >= nodes[m - 1] {
                    return match decay {
                        Some(p) => values[m - 1] * (nodes[m - 1] / r).powf(*p),
                        None => 0.0,
                    };
                }
                let k = nodes.partition_point(|x| *x <= r) - 1;
                let t = (r - nodes[k]) / (nodes[k + 1] - nodes[k]);
                values[k] * (1.0 - t) + values[k + 1] * t
            }
        }
    }

    /// Exponent q with |f(r)| ~ r^(-q) as r -> inf; +inf for compact or
    /// super-polynomial decay; None when unknown.
    pub fn decay_exponent(&self) -> Option<f64> {
        match self {
            RadialProfile::Power { a, .. } | RadialProfile::BracketPower { a, .. } => Some(-a),
            RadialProfile::YukawaKernel { m, .. } => Some(2.0 * m),
            RadialProfile::Gaussian { .. } => Some(f64::INFINITY),
            RadialProfile::Windowed { inner, hi, .. } => {
                if hi.is_finite() {
                    Some(f64::INFINITY)
                } else {
                    inner.decay_exponent()
                }
            }
            // logarithmic growth: slower than any negative power
            RadialProfile::Log { .. } => Some(0.0),
            RadialProfile::Tabulated { decay, .. } => *decay,
        }
    }

    /// True when the profile blows up at r = 0.
    pub fn singular_at_origin(&self) -> bool {
        match self {
            RadialProfile::Power { a, .. } => *a < 0.0,
            RadialProfile::Log { .. } => true,
            RadialProfile::Windowed { inner, lo, .. } => *lo <= 0.0 && inner.singular_at_origin(),
            _ => false,
        }
    }

    pub fn scaled(&self, k: f64) -> RadialProfile {
        match self {
            RadialProfile::Power { c, a } => RadialProfile::Power { c: c * k, a: *a },
            RadialProfile::BracketPower { c, a } => RadialProfile::BracketPower { c: c * k, a: *a },
            RadialProfile::YukawaKernel { c, mu, m } => RadialProfile::YukawaKernel { c: c * k, mu: *mu, m: *m },
            RadialProfile::Gaussian { c, w } => RadialProfile::Gaussian { c: c * k, w: *w },
            RadialProfile::Log { c } => RadialProfile::Log { c: c * k },
            RadialProfile::Windowed { inner, lo, hi } => RadialProfile::Windowed {
                inner: Box::new(inner.scaled(k)),
                lo: *lo,
                hi: *hi,
            },
            RadialProfile::Tabulated { nodes, values, decay } => RadialProfile::Tabulated {
                nodes: nodes.clone(),
                values: values.iter().map(|v| v * k).collect(),
                decay: *decay,
            },
        }
    }

    /// int_lo^hi f(r) r^(d-1) dr.
    pub fn radial_moment(&self, lo: f64, hi: f64, d: usize) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        if let RadialProfile::Power { c, a } = self {
            let e = a + d as f64;
            if e.abs() > 1e-14 {
                let lo_term = if lo == 0.0 { 0.0 } else { lo.powf(e) };
                return c * (hi.powf(e) - lo_term) / e;
            }
        }
        let g = |r: f64| self.eval(r) * r.powi(d as i32 - 1);
        if lo == 0.0 && self.singular_at_origin() {
            tanh_sinh(g, lo, hi, 1e-12)
        } else {
            let (xs, ws) = gauss_legendre(8);
            let c = 0.5 * (lo + hi);
            let h = 0.5 * (hi - lo);
            xs.iter().zip(&ws).map(|(x, w)| w * h * g(c + h * x)).sum()
        }
    }

    /// int_lo^hi f(r) r^{d-1} (r - c)^k dr, c the cell midpoint.
    pub fn centered_moment(&self, lo: f64, hi: f64, d: usize, k: i32) -> f64 {
        if k == 0 {
            return self.radial_moment(lo, hi, d);
        }
        let c = 0.5 * (lo + hi);
        let g = |r: f64| self.eval(r) * r.powi(d as i32 - 1) * (r - c).powi(k);
        if lo == 0.0 && self.singular_at_origin() {
            tanh_sinh(g, lo, hi, 1e-13)
        } else {
            let (xs, ws) = gauss_legendre(8);
            let hw = 0.5 * (hi - lo);
            xs.iter().zip(&ws).map(|(x, w)| w * hw * g(c + hw * x)).sum()
        }
    }

    /// Integral over the cube [-h/2, h/2]^d, split into 2d pyramids with apex
    /// at the origin so that singular profiles are handled by a 1-D rule.
    pub fn origin_cell_integral(&self, d: usize, h: f64) -> f64 {
        let half = 0.5 * h;
        if d == 1 {
            return 2.0 * tanh_sinh(|x| self.eval(x), 0.0, half, 1e-13);
        }
        let (gx, gw) = gauss_legendre(16);
        let mut total = 0.0;
        let inner = |scale: f64| -> f64 {
            tanh_sinh(|x| self.eval(x * scale) * x.powi(d as i32 - 1), 0.0, half, 1e-12)
        };
        if d == 2 {
            for (u, wu) in gx.iter().zip(&gw) {
                total += wu * inner((1.0 + u * u).sqrt());
            }
        } else {
            for (u, wu) in gx.iter().zip(&gw) {
                for (v, wv) in gx.iter().zip(&gw) {
                    total += wu * wv * inner((1.0 + u * u + v * v).sqrt());
                }
            }
        }
        2.0 * d as f64 * total
    }

    /// Integral over an off-origin cube cell centred at `center`.
    fn cell_integral(&self, center: &[f64], h: f64) -> f64 {
        let (gx, gw) = gauss_legendre(6);
        let d = center.len();
        let mut total = 0.0;
        let mut idx = vec![0usize; d];
        loop {
            let mut r2 = 0.0;
            let mut w = 1.0;
            for a in 0..d {
                let x = center[a] + 0.5 * h * gx[idx[a]];
                r2 += x * x;
                w *= 0.5 * h * gw[idx[a]];
            }
            total += w * self.eval(r2.sqrt());
            let mut a = 0;
            loop {
                if a == d {
                    return total;
                }
                idx[a] += 1;
                if idx[a] < gx.len() {
                    break;
                }
                idx[a] = 0;
                a += 1;
            }
        }
    }
}

/// Sampled function of frequency.
#[derive(Clone, Debug, PartialEq)]
pub struct FreqFunction {
    pub grid: FreqGrid,
    pub values: Vec<Complex64>,
    pub radial: bool,
    /// Known decay exponent of |values| beyond the grid, used for tail bounds.
    pub decay: Option<f64>,
}

impl FreqFunction {
    pub fn new(grid: FreqGrid, values: Vec<Complex64>, radial: bool) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(FreqFunction { grid, values, radial, decay: None })
    }

    pub fn zeros(grid: &FreqGrid) -> Self {
        FreqFunction {
            grid: grid.clone(),
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            radial: grid.is_radial(),
            decay: None,
        }
    }

    /// Samples a profile. On tensor grids a node sitting on a singularity
    /// receives the cell average instead of the point value.
    pub fn from_profile(grid: &FreqGrid, p: &RadialProfile) -> Self {
        let norms = grid.norms();
        let mut values: Vec<Complex64> = norms.iter().map(|&r| Complex64::new(p.eval(r), 0.0)).collect();
        if let FreqGrid::Tensor(t) = grid {
            if p.singular_at_origin() {
                if let Some(h) = t.uniform_spacing() {
                    let o = t.origin();
                    values[o] = Complex64::new(p.origin_cell_integral(t.dim(), h) / h.powi(t.dim() as i32), 0.0);
                }
            }
        }
        FreqFunction { grid: grid.clone(), values, radial: true, decay: p.decay_exponent() }
    }

    pub fn from_fn<F: Fn(&[f64]) -> Complex64>(grid: &FreqGrid, f: F) -> Self {
        let values = match grid {
            FreqGrid::Radial(g) => g.nodes.iter().map(|r| f(&[*r])).collect(),
            FreqGrid::Tensor(g) => (0..g.len()).map(|i| f(&g.point(i))).collect(),
        };
        FreqFunction { grid: grid.clone(), values, radial: grid.is_radial(), decay: None }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn with_decay(mut self, decay: Option<f64>) -> Self {
        self.decay = decay;
        self
    }

    fn same_grid(&self, other: &FreqFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::DimensionMismatch("functions live on different grids".into()));
        }
        Ok(())
    }

    pub fn axpy(&self, a: Complex64, other: &FreqFunction) -> Result<FreqFunction> {
        self.same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| x + a * y).collect();
        Ok(FreqFunction {
            grid: self.grid.clone(),
            values,
            radial: self.radial && other.radial,
            decay: None,
        })
    }

    pub fn sub(&self, other: &FreqFunction) -> Result<FreqFunction> {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    pub fn add(&self, other: &FreqFunction) -> Result<FreqFunction> {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    pub fn scale(&self, a: Complex64) -> FreqFunction {
        FreqFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * a).collect(),
            radial: self.radial,
            decay: self.decay,
        }
    }

    pub fn map_pointwise<F: Fn(f64, Complex64) -> Complex64>(&self, f: F) -> FreqFunction {
        let norms = self.grid.norms();
        FreqFunction {
            grid: self.grid.clone(),
            values: norms.iter().zip(&self.values).map(|(r, v)| f(*r, *v)).collect(),
            radial: self.radial,
            decay: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&FreqFunctionJson::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: FreqFunctionJson =
            serde_json::from_str(s).map_err(|e| Error::InvalidArgument(format!("bad FreqFunction JSON: {e}")))?;
        j.try_into()
    }
}

#[derive(Serialize, Deserialize)]
struct FreqFunctionJson {
    dim: usize,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nodes: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scheme: Option<RadialScheme>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    axes: Option<Vec<Axis>>,
    values: Vec<[f64; 2]>,
    radial_flag: bool,
    #[serde(default)]
    decay: Option<f64>,
}

impl From<&FreqFunction> for FreqFunctionJson {
    fn from(f: &FreqFunction) -> Self {
        let values = f.values.iter().map(|v| [v.re, v.im]).collect();
        match &f.grid {
            FreqGrid::Radial(g) => FreqFunctionJson {
                dim: g.dim,
                kind: "radial".into(),
                nodes: Some(g.nodes.clone()),
                weights: Some(g.weights.clone()),
                r_max: Some(g.r_max),
                scheme: Some(g.scheme),
                axes: None,
                values,
                radial_flag: f.radial,
                decay: f.decay,
            },
            FreqGrid::Tensor(g) => FreqFunctionJson {
                dim: g.dim(),
                kind: "tensor".into(),
                nodes: None,
                weights: None,
                r_max: None,
                scheme: None,
                axes: Some(g.axes.clone()),
                values,
                radial_flag: f.radial,
                decay: f.decay,
            },
        }
    }
}

impl TryFrom<FreqFunctionJson> for FreqFunction {
    type Error = Error;

    fn try_from(j: FreqFunctionJson) -> Result<Self> {
        let grid = match j.kind.as_str() {
            "radial" => {
                let nodes = j.nodes.ok_or_else(|| Error::InvalidArgument("radial grid needs nodes".into()))?;
                let weights = j.weights.ok_or_else(|| Error::InvalidArgument("radial grid needs weights".into()))?;
                if nodes.len() != weights.len() || nodes.windows(2).any(|w| w[1] <= w[0]) {
                    return invalid("radial nodes must be strictly increasing with one weight each");
                }
                FreqGrid::Radial(RadialGrid {
                    dim: j.dim,
                    r_max: j.r_max.unwrap_or_else(|| *nodes.last().unwrap_or(&0.0)),
                    scheme: j.scheme.unwrap_or(RadialScheme::Uniform),
                    nodes,
                    weights,
                })
            }
            "tensor" => {
                let g = TensorGrid::new(j.axes.ok_or_else(|| Error::InvalidArgument("tensor grid needs axes".into()))?)?;
                if g.dim() != j.dim {
                    return Err(Error::DimensionMismatch(format!("dim {} vs {} axes", j.dim, g.dim())));
                }
                FreqGrid::Tensor(g)
            }
            other => return invalid(format!("unknown grid kind {other}")),
        };
        let values = j.values.iter().map(|v| Complex64::new(v[0], v[1])).collect();
        let mut f = FreqFunction::new(grid, values, j.radial_flag)?;
        f.decay = j.decay;
        Ok(f)
    }
}

/// omega_d * sum_j w_j f(r_j) r_j^(d-1).
pub fn radial_integral(f: &FreqFunction) -> Result<f64> {
    if !f.radial || !f.grid.is_radial() {
        return Err(Error::DimensionMismatch("radial_integral needs a radial function on a radial grid".into()));
    }
    Ok(f.grid.measures().iter().zip(&f.values).map(|(m, v)| m * v.re).sum())
}

/// Which variables a potential term acts on. Particle indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    OneParticle(usize),
    Pairwise(usize, usize),
    Additive,
}

/// Convolution kernel: a closed form or samples on a grid of matching spacing.
#[derive(Clone, Copy, Debug)]
pub enum Kernel<'a> {
    Profile(&'a RadialProfile),
    Sampled(&'a FreqFunction),
}

/// Sampled F(V u) from V-hat and u-hat; `n` is the one-particle dimension.
pub fn convolve(kernel: Kernel<'_>, u: &FreqFunction, structure: Structure, n: usize) -> Result<FreqFunction> {
    match &u.grid {
        FreqGrid::Tensor(g) => convolve_tensor(kernel, u, g, structure, n),
        FreqGrid::Radial(g) => convolve_radial(kernel, u, g, structure, n),
    }
}

fn check_structure(structure: Structure, n_particles: usize) -> Result<()> {
    match structure {
        Structure::OneParticle(i) if i == 0 || i > n_particles => {
            invalid(format!("particle {i} outside 1..={n_particles}"))
        }
        Structure::Pairwise(i, j) if i == 0 || j == 0 || i > n_particles || j > n_particles || i == j => {
            invalid(format!("bad pair ({i},{j}) for {n_particles} particles"))
        }
        _ => Ok(()),
    }
}

/// Cell weights W_m = integral of V-hat over the cell at offset m, for m in
/// [-(c-1), c-1]^k.
fn kernel_weights(kernel: Kernel<'_>, k: usize, c: usize, h: f64) -> Result<Vec<f64>> {
    let side = 2 * c - 1;
    let total = side.pow(k as u32);
    let off = (c - 1) as i64;
    let offsets = |flat: usize| -> Vec<i64> {
        let mut m = vec![0i64; k];
        let mut f = flat;
        for a in (0..k).rev() {
            m[a] = (f % side) as i64 - off;
            f /= side;
        }
        m
    };
    match kernel {
        Kernel::Profile(p) => {
            let hk = h.powi(k as i32);
            let singular = p.singular_at_origin();
            let origin = if singular { p.origin_cell_integral(k, h) } else { hk * p.eval(0.0) };
            Ok((0..total)
                .into_par_iter()
                .map(|flat| {
                    let m = offsets(flat);
                    if m.iter().all(|x| *x == 0) {
                        return origin;
                    }
                    let center: Vec<f64> = m.iter().map(|x| *x as f64 * h).collect();
                    // singular kernels get exact cell averages next to the origin
                    if singular && m.iter().map(|x| x.abs()).max().unwrap_or(0) <= 2 {
                        p.cell_integral(&center, h)
                    } else {
                        let r = center.iter().map(|x| x * x).sum::<f64>().sqrt();
                        hk * p.eval(r)
                    }
                })
                .collect())
        }
        Kernel::Sampled(f) => {
            let FreqGrid::Tensor(kg) = &f.grid else {
                return Err(Error::DimensionMismatch("sampled kernel must live on a tensor grid here".into()));
            };
            if kg.dim() != k {
                return Err(Error::DimensionMismatch(format!("kernel dim {} vs {k}", kg.dim())));
            }
            let kh = kg
                .uniform_spacing()
                .ok_or_else(|| Error::DimensionMismatch("kernel grid spacing must be uniform".into()))?;
            if (kh - h).abs() > 1e-12 * h {
                return Err(Error::DimensionMismatch("kernel spacing differs from the function grid".into()));
            }
            let strides = kg.strides();
            let hk = h.powi(k as i32);
            Ok((0..total)
                .map(|flat| {
                    let m = offsets(flat);
                    let mut idx = 0usize;
                    for a in 0..k {
                        let half = (kg.axes[a].count / 2) as i64;
                        let pos = m[a] + half;
                        if pos < 0 || pos >= kg.axes[a].count as i64 {
                            return 0.0;
                        }
                        idx += pos as usize * strides[a];
                    }
                    // real part only: potentials are even and real
                    hk * f.values[idx].re
                })
                .collect())
        }
    }
}

/// Offsets and weights of a structured convolution on a tensor grid.
struct TensorStencil {
    w: Vec<f64>,
    nz: Vec<(usize, Vec<i64>)>,
    shifts: Vec<Vec<(usize, i64)>>,
    strides: Vec<usize>,
    count: i64,
}

impl TensorStencil {
    fn new(kernel: Kernel<'_>, g: &TensorGrid, structure: Structure, n: usize) -> Result<Self> {
        let d = g.dim();
        if n == 0 || d % n != 0 {
            return Err(Error::DimensionMismatch(format!("grid dim {d} is not a multiple of n = {n}")));
        }
        if d > MAX_TENSOR_DIM {
            return Err(Error::UnsupportedScale(format!("nN = {d} exceeds {MAX_TENSOR_DIM}")));
        }
        check_structure(structure, d / n)?;
        let h = g
            .uniform_spacing()
            .ok_or_else(|| Error::DimensionMismatch("convolution needs identical axes".into()))?;
        let c = g.axes[0].count;
        // per kernel axis, the grid axes it shifts and the direction
        let mut shifts: Vec<Vec<(usize, i64)>> = Vec::new();
        match structure {
            Structure::OneParticle(i) => {
                for a in 0..n {
                    shifts.push(vec![((i - 1) * n + a, -1)]);
                }
            }
            Structure::Pairwise(i, j) => {
                for a in 0..n {
                    shifts.push(vec![((i - 1) * n + a, -1), ((j - 1) * n + a, 1)]);
                }
            }
            Structure::Additive => {
                for a in 0..d {
                    shifts.push(vec![(a, -1)]);
                }
            }
        }
        let k = shifts.len();
        let w = kernel_weights(kernel, k, c, h)?;
        let side = 2 * c - 1;
        let off = (c - 1) as i64;
        let nz = w
            .iter()
            .enumerate()
            .filter(|(_, x)| **x != 0.0)
            .map(|(flat, _)| {
                let mut m = vec![0i64; k];
                let mut f = flat;
                for a in (0..k).rev() {
                    m[a] = (f % side) as i64 - off;
                    f /= side;
                }
                (flat, m)
            })
            .collect();
        Ok(TensorStencil { w, nz, shifts, strides: g.strides(), count: c as i64 })
    }

    /// Calls f(source, weight) for every grid sample feeding `flat`.
    fn visit<F: FnMut(usize, f64)>(&self, g: &TensorGrid, flat: usize, mut f: F) {
        let idx: Vec<i64> = g.multi_index(flat).iter().map(|x| *x as i64).collect();
        let d = idx.len();
        'm: for (wf, m) in &self.nz {
            let mut target = idx.clone();
            for (ka, list) in self.shifts.iter().enumerate() {
                for (axis, dir) in list {
                    target[*axis] += dir * m[ka];
                }
            }
            let mut t = 0usize;
            for a in 0..d {
                if target[a] < 0 || target[a] >= self.count {
                    continue 'm;
                }
                t += target[a] as usize * self.strides[a];
            }
            f(t, self.w[*wf]);
        }
    }
}

fn convolve_tensor(
    kernel: Kernel<'_>,
    u: &FreqFunction,
    g: &TensorGrid,
    structure: Structure,
    n: usize,
) -> Result<FreqFunction> {
    let st = TensorStencil::new(kernel, g, structure, n)?;
    let values: Vec<Complex64> = (0..g.len())
        .into_par_iter()
        .map(|flat| {
            let mut acc = Complex64::new(0.0, 0.0);
            st.visit(g, flat, |t, w| acc += w * u.values[t]);
            acc
        })
        .collect();
    Ok(FreqFunction { grid: u.grid.clone(), values, radial: false, decay: None })
}

/// Dense row-major matrix of u -> convolve(kernel, u, structure, n) on `grid`.
/// Radial grids take the same restrictions as `convolve`.
pub fn convolution_matrix(kernel: Kernel<'_>, grid: &FreqGrid, structure: Structure, n: usize) -> Result<Vec<f64>> {
    let len = grid.len();
    match grid {
        FreqGrid::Tensor(g) => {
            let st = TensorStencil::new(kernel, g, structure, n)?;
            let mut m = vec![0.0; len * len];
            m.par_chunks_mut(len).enumerate().for_each(|(i, row)| st.visit(g, i, |t, w| row[t] += w));
            Ok(m)
        }
        FreqGrid::Radial(g) => {
            let st = RadialStencil::new(kernel, grid, g, structure, n, len)?;
            let mut m = vec![0.0; len * len];
            m.par_chunks_mut(len).enumerate().for_each(|(i, row)| st.matrix_row(i, row));
            Ok(m)
        }
    }
}

/// Radial convolution in R^3 on a uniform midpoint grid:
/// (f*g)(k) = (2 pi / k) int_0^inf f(r) r [G(k+r) - G(|k-r|)] dr, G(x) = int_0^x g(t) t dt.
/// Per kernel cell, Phi(r) = [G(k+r) - G(|k-r|)]/r is expanded to second order
/// about the midpoint against the exact moments of f r^2; G uses the
/// corrected midpoint rule. Phi is even in r and G is even.
struct RadialStencil {
    m: usize,
    cells: usize,
    h: f64,
    w: [Vec<f64>; 3],
}

impl RadialStencil {
    fn new(kernel: Kernel<'_>, grid: &FreqGrid, g: &RadialGrid, structure: Structure, n: usize, cells: usize) -> Result<Self> {
        if g.dim != 3 || n != 3 {
            return Err(Error::UnsupportedScale(format!(
                "radial convolution is implemented for d = 3 only, got d = {}",
                g.dim
            )));
        }
        match structure {
            Structure::OneParticle(1) | Structure::Additive => {}
            _ => return invalid("radial grids carry a single particle"),
        }
        if g.scheme != RadialScheme::Uniform {
            return invalid("radial convolution needs a uniform radial grid");
        }
        let m = g.nodes.len();
        let h = g.r_max / m as f64;
        let w = match kernel {
            Kernel::Profile(p) => {
                let mom = |k: i32| -> Vec<f64> {
                    (0..cells).into_par_iter().map(|j| p.centered_moment(j as f64 * h, (j + 1) as f64 * h, 3, k)).collect()
                };
                [mom(0), mom(1), mom(2)]
            }
            Kernel::Sampled(f) => {
                if &f.grid != grid {
                    return Err(Error::DimensionMismatch("sampled kernel must share the radial grid".into()));
                }
                let w0 = (0..m).map(|j| h * g.nodes[j].powi(2) * f.values[j].re).collect();
                [w0, vec![0.0; m], vec![0.0; m]]
            }
        };
        let cells = w[0].len();
        Ok(RadialStencil { m, cells, h, w })
    }

    fn mid(&self, l: usize) -> f64 {
        (l as f64 + 0.5) * self.h
    }

    /// Coefficients of Phi_0..=Phi_cells in the sum for one target.
    fn phi_coefficients(&self) -> Vec<f64> {
        let (h, n) = (self.h, self.cells);
        let mut c = vec![0.0; n + 1];
        for j in 0..n {
            let d1 = self.w[1][j] / (2.0 * h);
            let d2 = self.w[2][j] / (2.0 * h * h);
            let lo = j.saturating_sub(1);
            c[j] += self.w[0][j] - 2.0 * d2;
            c[j + 1] += d1 + d2;
            c[lo] += d2 - d1;
        }
        c
    }

    /// Integrals of g(t) = u(t) t over the cells; `next` is g just past the
    /// last cell when known.
    fn cell_integrals(&self, gv: &[Complex64], next: Option<Complex64>) -> Vec<Complex64> {
        let k = gv.len();
        (0..k)
            .map(|t| {
                let prev = if t == 0 { -gv[0] } else { gv[t - 1] };
                let d2 = match (t + 1 < k, next) {
                    (true, _) => gv[t + 1] - 2.0 * gv[t] + prev,
                    (false, Some(x)) => x - 2.0 * gv[t] + prev,
                    (false, None) => gv[t] - 2.0 * gv[t - 1] + gv[t - 2],
                };
                (gv[t] + d2 / 24.0) * self.h
            })
            .collect()
    }

    fn apply(&self, u: &[Complex64], tail: Option<f64>, far: Complex64) -> Vec<Complex64> {
        let (m, cells, h) = (self.m, self.cells, self.h);
        let amp = tail.map(|q| u[m - 1] * self.mid(m - 1).powf(q));
        let gv: Vec<Complex64> = (0..m).map(|l| u[l] * self.mid(l)).collect();
        let next = match (tail, amp) {
            (Some(q), Some(a)) => Some(a * self.mid(m).powf(1.0 - q)),
            _ => None,
        };
        let mut c = self.cell_integrals(&gv, next);
        if let (Some(q), Some(a)) = (tail, amp) {
            for l in m..cells {
                let (lo, hi) = (l as f64 * h, (l + 1) as f64 * h);
                c.push(a * ((lo.powf(2.0 - q) - hi.powf(2.0 - q)) / (q - 2.0)));
            }
        }
        let mut big_g = vec![Complex64::new(0.0, 0.0); m + cells + 2];
        for l in 0..c.len() {
            big_g[l + 1] = big_g[l] + c[l];
        }
        let end = c.len() as f64 * h;
        for l in c.len() + 1..big_g.len() {
            big_g[l] = match (tail, amp) {
                (Some(q), Some(a)) => big_g[c.len()] + a * ((end.powf(2.0 - q) - (l as f64 * h).powf(2.0 - q)) / (q - 2.0)),
                _ => big_g[c.len()],
            };
        }
        let coef = self.phi_coefficients();
        (0..m)
            .into_par_iter()
            .map(|i| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, cj) in coef.iter().enumerate() {
                    acc += (big_g[i + j + 1] - big_g[i.abs_diff(j)]) * (cj / self.mid(j));
                }
                acc * (2.0 * PI / self.mid(i)) + far
            })
            .collect()
    }

    /// Row i of the matrix of `apply` without a tail.
    fn matrix_row(&self, i: usize, row: &mut [f64]) {
        let m = self.m;
        let coef = self.phi_coefficients();
        let pre = 2.0 * PI / self.mid(i);
        // coefficient of each G[l]
        let mut cg = vec![0.0; m + self.cells + 2];
        for (j, cj) in coef.iter().enumerate() {
            let v = pre * cj / self.mid(j);
            cg[i + j + 1] += v;
            cg[i.abs_diff(j)] -= v;
        }
        // G[l] sums cells t < l; G beyond the grid stays at G[m]
        let mut cc = vec![0.0; m];
        let mut acc: f64 = cg[m..].iter().sum();
        for t in (0..m).rev() {
            cc[t] = acc;
            acc += cg[t];
        }
        // cell t = h (g_t + (g_{t+1} - 2 g_t + g_{t-1})/24), g_{-1} = -g_0
        let mut cgv = vec![0.0; m];
        for t in 0..m {
            let a = cc[t] * self.h;
            cgv[t] += a;
            if t + 1 < m {
                cgv[t + 1] += a / 24.0;
                cgv[t] -= a / 12.0;
                if t == 0 {
                    cgv[0] -= a / 24.0;
                } else {
                    cgv[t - 1] += a / 24.0;
                }
            } else {
                cgv[t] += a / 24.0;
                cgv[t - 1] -= a / 12.0;
                cgv[t - 2] += a / 24.0;
            }
        }
        for t in 0..m {
            row[t] = cgv[t] * self.mid(t);
        }
    }
}

fn convolve_radial(
    kernel: Kernel<'_>,
    u: &FreqFunction,
    g: &RadialGrid,
    structure: Structure,
    n: usize,
) -> Result<FreqFunction> {
    let m = g.nodes.len();
    // a known power decay q of u continues it as A r^-q past the grid: out to
    // 2 r_max on extra cells, analytically beyond
    let tail = match (kernel, u.decay) {
        (Kernel::Profile(_), Some(q)) if q.is_finite() && q > 2.0 => Some(q),
        _ => None,
    };
    let cells = if tail.is_some() { 2 * m } else { m };
    let st = RadialStencil::new(kernel, &u.grid, g, structure, n, cells)?;
    if !u.radial {
        return Err(Error::DimensionMismatch("radial convolution needs a radial function".into()));
    }
    // kernel beyond the extra cells against the tail: 4 pi A int f r^{2-q}
    let far = match (kernel, tail) {
        (Kernel::Profile(p), Some(q)) => {
            let a = u.values[m - 1] * st.mid(m - 1).powf(q);
            let end = cells as f64 * st.h;
            a * (4.0 * PI * integrate_tail(|r| p.eval(r) * r.powf(2.0 - q), end, 1e-12))
        }
        _ => Complex64::new(0.0, 0.0),
    };
    let values = st.apply(&u.values, tail, far);
    Ok(FreqFunction { grid: u.grid.clone(), values, radial: true, decay: None })
}
