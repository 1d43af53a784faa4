//! Gamma helpers, sphere areas and the quadrature rules shared by every module.

use crate::error::{Error, Result};
use std::f64::consts::{FRAC_PI_2, PI};

pub const EULER_GAMMA: f64 = 0.5772156649015329;

/// Gamma function with an explicit pole check at the non-positive integers.
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("gamma of {x}")));
    }
    if x <= 0.0 && (x - x.round()).abs() < 1e-12 {
        return Err(Error::Pole(x));
    }
    Ok(statrs::function::gamma::gamma(x))
}

pub fn ln_gamma(x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Err(Error::Domain(format!("ln_gamma needs x > 0, got {x}")));
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

/// Surface area of the unit sphere in R^d.
pub fn sphere_area(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    2.0 * PI.powf(h) / statrs::function::gamma::gamma(h)
}

#[inline]
pub fn bracket(r: f64) -> f64 {
    (1.0 + r * r).sqrt()
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = -x;
        xs[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

/// Composite Gauss-Legendre over `panels` equal panels of [a, b].
pub fn gl_composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (xs, ws) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let c = lo + 0.5 * h;
        let mut acc = 0.0;
        for (x, w) in xs.iter().zip(&ws) {
            acc += w * f(c + 0.5 * h * x);
        }
        total += 0.5 * h * acc;
    }
    total
}

/// Tanh-sinh quadrature on a finite interval. Copes with integrable
/// algebraic or logarithmic endpoint singularities.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let d = 0.5 * (b - a);
    let t_max = 6.0;
    let term = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let cu = u.cosh();
        let w = FRAC_PI_2 * t.cosh() / (cu * cu);
        if w == 0.0 || !w.is_finite() {
            return 0.0;
        }
        let comp = 2.0 / (1.0 + (2.0 * u.abs()).exp());
        let x = if u < 0.0 { a + d * comp } else { b - d * comp };
        if x <= a || x >= b {
            return 0.0;
        }
        let v = f(x) * w * d;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let mut h = 1.0;
    let mut sum = term(0.0);
    let mut k = 1;
    while k as f64 * h <= t_max {
        let t = k as f64 * h;
        sum += term(t) + term(-t);
        k += 1;
    }
    let mut prev = sum * h;
    for level in 1..=12 {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= t_max {
            let t = k as f64 * h;
            sum += term(t) + term(-t);
            k += 2;
        }
        let cur = sum * h;
        if level >= 3 && (cur - prev).abs() <= tol * cur.abs().max(1e-300) {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// Exp-sinh quadrature on [a, inf) for integrands with exponential or fast
/// algebraic decay; handles an algebraic singularity at `a`.
pub fn exp_sinh<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> f64 {
    let t_lo: f64 = -5.0;
    let t_hi: f64 = 4.0;
    let term = |t: f64| -> f64 {
        let e = (FRAC_PI_2 * t.sinh()).exp();
        let x = a + e;
        if x <= a || !x.is_finite() {
            return 0.0;
        }
        let w = FRAC_PI_2 * t.cosh() * e;
        let v = f(x) * w;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let mut h: f64 = 0.5;
    let n_lo = (t_lo / h).ceil() as i64;
    let n_hi = (t_hi / h).floor() as i64;
    let mut sum: f64 = (n_lo..=n_hi).map(|k| term(k as f64 * h)).sum();
    let mut prev = sum * h;
    for level in 1..=10 {
        h *= 0.5;
        let n_lo = (t_lo / h).ceil() as i64;
        let n_hi = (t_hi / h).floor() as i64;
        let mut k = if n_lo % 2 == 0 { n_lo + 1 } else { n_lo };
        while k <= n_hi {
            sum += term(k as f64 * h);
            k += 2;
        }
        let cur = sum * h;
        if level >= 3 && (cur - prev).abs() <= tol * cur.abs().max(1e-300) {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// Integral over [a, inf) with a > 0 through the map r = a/u, which turns
/// algebraic decay into an endpoint singularity that tanh-sinh absorbs.
pub fn integrate_tail<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> f64 {
    debug_assert!(a > 0.0);
    tanh_sinh(|u| f(a / u) * a / (u * u), 0.0, 1.0, tol)
}

/// Ordinary least squares of y on x: (slope, intercept, slope standard error).
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return Err(Error::FitDegenerate(format!("need >= 2 paired points, got {n}")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx <= 0.0 {
        return Err(Error::FitDegenerate("abscissae coincide".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let se = if n > 2 {
        let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum();
        (rss / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok((slope, icpt, se))
}
