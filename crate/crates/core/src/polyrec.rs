//! Polynomial families generated by three-term recurrences, and the
//! logarithmic grids `x_k(alpha)` on which the operator acts.

use crate::error::{domain, Result};
use crate::qcore::{check_q, phi, HypergeometricSpec, QParams, C64};

/// A point `x_k(alpha) = (1/(alpha q^k) - alpha q^k)/2` of the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub k: i64,
    pub x: f64,
    pub alpha: f64,
    pub q: f64,
}

pub fn grid_point(alpha: f64, q: f64, k: i64) -> Result<GridPoint> {
    check_q(q)?;
    if !alpha.is_finite() || alpha == 0.0 {
        return domain(format!("grid parameter alpha = {alpha} must be finite and nonzero"));
    }
    Ok(GridPoint {
        k,
        x: grid_x(alpha, q, k),
        alpha,
        q,
    })
}

/// Unchecked grid value; `alpha q^k` is formed as a single power.
pub(crate) fn grid_x(alpha: f64, q: f64, k: i64) -> f64 {
    let s = alpha * q.powi(k as i32);
    (1.0 / s - s) / 2.0
}

/// Members of the Al-Salam–Chihara family used here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolynomialFamily {
    /// General parameters `(a, b)`, argument `u` with `x = (u + 1/u)/2`.
    AscGeneral { a: C64, b: C64, q: f64 },
    /// Symmetric case `h_n^{(beta)}(x|q)`.
    SymAsc { beta: f64, q: f64 },
    /// Continuous `q^{-1}`-Hermite polynomials `h_n(x|q)`.
    QinvHermite { q: f64 },
}

impl PolynomialFamily {
    /// Values of the members `0..=n_max` at `x`; for the general family the
    /// argument is `u`.
    pub fn values(&self, n_max: usize, x: C64) -> Result<Vec<C64>> {
        match *self {
            PolynomialFamily::AscGeneral { a, b, q } => asc_poly_all(n_max, x, a, b, q),
            PolynomialFamily::SymAsc { beta, q } => {
                check_beta(beta)?;
                check_q(q)?;
                Ok(sym_values(n_max, x, beta, q))
            }
            PolynomialFamily::QinvHermite { q } => {
                check_q(q)?;
                Ok(sym_values(n_max, x, 0.0, q))
            }
        }
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta >= 0.0 {
        Ok(())
    } else {
        domain(format!("beta = {beta} must be finite and >= 0"))
    }
}

fn check_degree(n: i64) -> Result<usize> {
    if n < 0 {
        domain(format!("degree n = {n} must be >= 0"))
    } else {
        Ok(n as usize)
    }
}

fn asc_poly_all(n_max: usize, u: C64, a: C64, b: C64, q: f64) -> Result<Vec<C64>> {
    check_q(q)?;
    if u.norm() == 0.0 {
        return domain("asc_poly needs u != 0");
    }
    let lead = u + 1.0 / u;
    let mut out = Vec::with_capacity(n_max + 1);
    let mut prev = C64::new(0.0, 0.0);
    let mut cur = C64::new(1.0, 0.0);
    out.push(cur);
    let inv = 1.0 / q;
    let mut qn = 1.0; // q^{-n}
    for _ in 0..n_max {
        let next = (lead - (a + b) * qn) * cur - (1.0 - qn) * (1.0 - a * b * q * qn) * prev;
        prev = cur;
        cur = next;
        out.push(cur);
        qn *= inv;
    }
    Ok(out)
}

/// `P_n(u; a, b | q^{-1})` by the recurrence
/// `(u + 1/u) P_n = P_{n+1} + (a+b) q^{-n} P_n + (1 - q^{-n})(1 - ab q^{1-n}) P_{n-1}`.
pub fn asc_poly(n: i64, u: C64, a: C64, b: C64, q: f64) -> Result<C64> {
    let n = check_degree(n)?;
    Ok(asc_poly_all(n, u, a, b, q)?[n])
}

/// The same polynomial from its terminating `2 phi 1` representation; used to
/// cross-check the recurrence.
pub fn asc_poly_phi21(n: i64, u: C64, a: C64, b: C64, q: f64) -> Result<C64> {
    let n = check_degree(n)?;
    check_q(q)?;
    if u.norm() == 0.0 || a.norm() == 0.0 || b.norm() == 0.0 {
        return domain("the 2phi1 form needs nonzero u, a, b");
    }
    let ni = n as i64;
    let spec = HypergeometricSpec::phi21(
        C64::new(q.powi(-(n as i32)), 0.0),
        1.0 / (a * u),
        b * q.powi(1 - n as i32) / u,
        q,
    )?;
    let series = phi(&spec, a * q / u)?;
    let pre = (-b).powi(n as i32) * crate::qcore::qpoch_finite(u / b, q, ni)?
        / q.powf((ni * (ni - 1)) as f64 / 2.0);
    Ok(pre * series)
}

fn sym_values(n_max: usize, x: C64, beta: f64, q: f64) -> Vec<C64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut prev = C64::new(0.0, 0.0);
    let mut cur = C64::new(1.0, 0.0);
    out.push(cur);
    let inv = 1.0 / q;
    let mut qn = 1.0; // q^{-n}
    for _ in 0..n_max {
        let c = (qn - 1.0) * (1.0 + beta * q * qn);
        let next = 2.0 * x * cur - c * prev;
        prev = cur;
        cur = next;
        out.push(cur);
        qn *= inv;
    }
    out
}

/// Real values `h_0 .. h_{n_max}` of the symmetric family at `x`.
pub fn sym_asc_all(n_max: usize, x: f64, beta: f64, q: f64) -> Result<Vec<f64>> {
    check_q(q)?;
    check_beta(beta)?;
    let mut out = Vec::with_capacity(n_max + 1);
    let mut prev = 0.0;
    let mut cur = 1.0;
    out.push(cur);
    let inv = 1.0 / q;
    let mut qn = 1.0;
    for _ in 0..n_max {
        let c = (qn - 1.0) * (1.0 + beta * q * qn);
        let next = 2.0 * x * cur - c * prev;
        prev = cur;
        cur = next;
        out.push(cur);
        qn *= inv;
    }
    Ok(out)
}

/// `h_n^{(beta)}(x|q)` from `2x h_n = h_{n+1} + q^{-n}(1 - q^n)(1 + beta q^{1-n}) h_{n-1}`.
pub fn sym_asc(n: i64, x: f64, beta: f64, q: f64) -> Result<f64> {
    let n = check_degree(n)?;
    Ok(sym_asc_all(n, x, beta, q)?[n])
}

/// Continuous `q^{-1}`-Hermite polynomial `h_n(x|q)`.
pub fn qinv_hermite(n: i64, x: f64, q: f64) -> Result<f64> {
    sym_asc(n, x, 0.0, q)
}

/// Residuals of the difference equation
/// `q^n Q(y) = A (Q(y + log q) - Q(y)) + Q(y) + B (Q(y - log q) - Q(y))`
/// for `Q(y) = h_n^{(beta)}(sinh y)` at the grid points `e^{-y} = alpha q^l`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffeqReport {
    pub n: i64,
    pub window: i64,
    pub max_abs_residual: f64,
    /// Residual divided by the sum of the moduli of the terms on the right.
    pub max_scaled_residual: f64,
}

pub fn verify_diffeq(n: i64, params: &QParams, window: i64) -> Result<DiffeqReport> {
    let n_us = check_degree(n)?;
    if window < 1 {
        return domain(format!("window = {window} must be >= 1"));
    }
    let (q, alpha, beta) = (params.q(), params.alpha(), params.beta());
    let h = |k: i64| -> Result<f64> { Ok(sym_asc_all(n_us, grid_x(alpha, q, k), beta, q)?[n_us]) };
    let qn = q.powi(n as i32);
    let mut max_abs = 0.0f64;
    let mut max_scaled = 0.0f64;
    for l in -window..=window {
        let e = alpha * alpha * q.powi(2 * l as i32); // e^{-2y}
        let big_a = (1.0 + beta * e) / ((1.0 + e) * (1.0 + e / q));
        let big_b = (1.0 + beta / e) / ((1.0 + 1.0 / e) * (1.0 + 1.0 / (e * q)));
        let (down, mid, up) = (h(l - 1)?, h(l)?, h(l + 1)?);
        let t1 = big_a * (down - mid);
        let t2 = big_b * (up - mid);
        let res = (qn * mid - (t1 + mid + t2)).abs();
        let scale = t1.abs() + mid.abs() + t2.abs() + (qn * mid).abs();
        max_abs = max_abs.max(res);
        if scale > 0.0 {
            max_scaled = max_scaled.max(res / scale);
        }
    }
    Ok(DiffeqReport {
        n,
        window,
        max_abs_residual: max_abs,
        max_scaled_residual: max_scaled,
    })
}
