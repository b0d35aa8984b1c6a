//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `log ∫ prod_i N(r_i | mu, sigma^2) N(mu | 0, sigma_mu^2) dmu` by quadrature.
pub fn quadrature_leaf_log_marginal(r: &[f64], sigma: f64, sigma_mu: f64) -> f64 {
    let n = r.len() as f64;
    let sum: f64 = r.iter().sum();
    let post_var = 1.0 / (n / (sigma * sigma) + 1.0 / (sigma_mu * sigma_mu));
    let center = post_var * sum / (sigma * sigma);
    let log_integrand = |mu: f64| {
        let lik: f64 = r
            .iter()
            .map(|x| -0.5 * ((x - mu) / sigma).powi(2) - 0.5 * (2.0 * PI * sigma * sigma).ln())
            .sum();
        lik - 0.5 * (mu / sigma_mu).powi(2) - 0.5 * (2.0 * PI * sigma_mu * sigma_mu).ln()
    };
    let peak = log_integrand(center);
    let half = 14.0 * post_var.sqrt();
    let integral = adaptive_simpson(&|mu| (log_integrand(mu) - peak).exp(), center - half, center + half, 1e-14 * half);
    peak + integral.ln()
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        for &k in &idx[i..=j] {
            r[k] = 0.5 * (i + j) as f64;
        }
        i = j + 1;
    }
    r
}

pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    correlation(&ranks(a), &ranks(b))
}

/// Standard normal CDF by quadrature of the density (for oracles only).
pub fn phi_cdf_quadrature(x: f64) -> f64 {
    let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * PI).sqrt();
    if x >= 0.0 {
        0.5 + adaptive_simpson(&pdf, 0.0, x, 1e-15)
    } else {
        0.5 - adaptive_simpson(&pdf, x, 0.0, 1e-15)
    }
}
