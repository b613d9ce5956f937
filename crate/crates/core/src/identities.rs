//! Numerical verification of contiguous relations, the generating
//! function and the bilateral summation formulas.
//!
//! Every check takes the series tolerance explicitly so that a report can
//! be recomputed at `tol / 2` and compared, see [`stable_under_halving`].

use std::collections::BTreeMap;

use crate::error::{domain, Result};
use crate::measures::ln_weight;
use crate::qcore::{
    bilateral_psi, phi_series, qpoch_inf, theta_tol, HypergeometricSpec, QParams,
    C64, DEFAULT_MAX_TERMS,
};

/// Both sides of an identity at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub identity_id: String,
    pub parameter_point: BTreeMap<String, C64>,
    pub lhs: C64,
    pub rhs: C64,
    pub abs_residual: f64,
    /// `|lhs - rhs| / max(|lhs|, |rhs|, 1)`.
    pub rel_residual: f64,
    /// `|lhs - rhs| / max(|lhs|, |rhs|, scale)` where `scale` is the natural
    /// size of the computation (the sum of term moduli for zero identities).
    pub scaled_residual: f64,
}

impl IdentityReport {
    pub fn new(
        identity_id: &str,
        parameter_point: &[(&str, C64)],
        lhs: C64,
        rhs: C64,
        scale: f64,
    ) -> Self {
        let abs = (lhs - rhs).norm();
        let m = lhs.norm().max(rhs.norm());
        let denom = m.max(scale).max(f64::MIN_POSITIVE);
        IdentityReport {
            identity_id: identity_id.to_string(),
            parameter_point: parameter_point
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
            lhs,
            rhs,
            abs_residual: abs,
            rel_residual: abs / m.max(1.0),
            scaled_residual: abs / denom,
        }
    }

    pub fn passes(&self, threshold: f64) -> bool {
        self.scaled_residual < threshold
    }
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn pinf(a: C64, q: f64, tol: f64) -> Result<C64> {
    qpoch_inf(a, q, tol)?.into_value()
}

fn pinf_prod(args: &[C64], q: f64, tol: f64) -> Result<C64> {
    args.iter().try_fold(re(1.0), |acc, a| Ok(acc * pinf(*a, q, tol)?))
}

fn phi21(a: C64, b: C64, c: C64, q: f64, z: C64, tol: f64) -> Result<C64> {
    let spec = HypergeometricSpec::phi21(a, b, c, q)?;
    phi_series(&spec, z, tol, DEFAULT_MAX_TERMS)?.into_value()
}

/// `Psi^- - (...) Psi + (...) z^2 Psi^+ = 0` for
/// `Psi = 2phi1(a, b; c; q, z)`, `Psi^{+-} = 2phi1(a q^{+-1}, b q^{+-1}; c q^{+-2}; q, z)`.
pub fn contiguous_3term(a: C64, b: C64, c: C64, z: C64, q: f64, tol: f64) -> Result<IdentityReport> {
    for (name, d) in [
        ("1 - c", 1.0 - c),
        ("q - c", q - c),
        ("q^2 - c", q * q - c),
        ("1 - q c", 1.0 - q * c),
    ] {
        if d.norm() == 0.0 {
            return domain(format!("coefficient denominator {name} vanishes"));
        }
    }
    let psi = phi21(a, b, c, q, z, tol)?;
    let psi_m = phi21(a / q, b / q, c / (q * q), q, z, tol)?;
    let psi_p = phi21(a * q, b * q, c * q * q, q, z, tol)?;
    let c1 = (c - a) * (c - b) / ((1.0 - c) * (q - c)) * z
        + (q - a) * (q - b) / ((q * q - c) * (q - c)) * z * q
        + (1.0 - z);
    let c2 = (c - a) * (c - b) * (1.0 - a) * (1.0 - b)
        / ((1.0 - c) * (1.0 - c) * (1.0 - q * c) * (q - c))
        * z
        * z;
    let t = [psi_m, c2 * psi_p, c1 * psi];
    Ok(IdentityReport::new(
        "contiguous_3term",
        &[("a", a), ("b", b), ("c", c), ("z", z), ("q", re(q))],
        t[0] + t[1],
        t[2],
        t.iter().map(|x| x.norm()).sum(),
    ))
}

/// Relation between `2phi1(a, b; -q; q, z)` and its neighbours with
/// `(a, b)` replaced by `(a q, b/q)` and `(a/q, b q)`.
pub fn contiguous_shift(a: C64, b: C64, z: C64, q: f64, tol: f64) -> Result<IdentityReport> {
    let eps = 1e-12 * (a.norm() + b.norm());
    for (name, d) in [("a - b", a - b), ("a q - b", a * q - b), ("a - b q", a - b * q)] {
        if d.norm() <= eps {
            return domain(format!("excluded parameter line {name} = 0"));
        }
    }
    let mq = re(-q);
    let f = phi21(a, b, mq, q, z, tol)?;
    let fp = phi21(a * q, b / q, mq, q, z, tol)?;
    let fm = phi21(a / q, b * q, mq, q, z, tol)?;
    let lhs = (q * (1.0 + q) * (a * b - q) / ((a * q - b) * (a - b * q)) + z) * f;
    let t1 = q * (1.0 - a) * (b + q) / ((a - b) * (b - a * q)) * fp;
    let t2 = q * (1.0 - b) * (a + q) / ((b - a) * (a - b * q)) * fm;
    Ok(IdentityReport::new(
        "contiguous_shift",
        &[("a", a), ("b", b), ("z", z), ("q", re(q))],
        lhs,
        t1 + t2,
        lhs.norm() + t1.norm() + t2.norm(),
    ))
}

/// Generating function of the symmetric Al-Salam–Chihara polynomials,
/// `sum_n h_n(sinh y) q^{n(n-1)/2} t^n / (q;q)_n = (t e^{-y}, -t e^{y}; q)_inf / (-t^2 beta; q^2)_inf`,
/// truncated after `n_max`.
pub fn generating_function(t: C64, y: f64, beta: f64, q: f64, n_max: usize, tol: f64) -> Result<IdentityReport> {
    if beta < 0.0 {
        return domain(format!("beta = {beta} must be >= 0"));
    }
    if beta > 0.0 && t.norm() * beta.sqrt() >= 1.0 {
        return domain(format!("|t| = {} must be below 1/sqrt(beta)", t.norm()));
    }
    // g_n = h_n q^{n(n-1)/2} t^n / (q;q)_n obeys
    // (1 - q^{n+1}) g_{n+1} = 2 x t q^n g_n - t^2 (q^{n-1} + beta) g_{n-1},
    // which avoids the q^{-n^2/2} growth of h_n
    let x = y.sinh();
    let mut prev = re(0.0);
    let mut cur = re(1.0);
    let mut lhs = cur;
    for n in 0..n_max {
        let qn = q.powi(n as i32);
        let next = (2.0 * x * t * qn * cur - t * t * (qn / q + beta) * prev) / (1.0 - qn * q);
        prev = cur;
        cur = next;
        lhs += cur;
    }
    let rhs = pinf(t * (-y).exp(), q, tol)? * pinf(-t * y.exp(), q, tol)? / pinf(-t * t * beta, q * q, tol)?;
    Ok(IdentityReport::new(
        "generating_function",
        &[
            ("t", t),
            ("y", re(y)),
            ("beta", re(beta)),
            ("q", re(q)),
            ("n_max", re(n_max as f64)),
        ],
        lhs,
        rhs,
        1.0,
    ))
}

fn i_unit() -> C64 {
    C64::new(0.0, 1.0)
}

fn bailey_spec(alpha: f64, beta: f64, t1: C64, t2: C64, q: f64) -> Result<(HypergeometricSpec, C64)> {
    let i = i_unit();
    let sb = beta.sqrt();
    let a = re(alpha);
    let mut upper = vec![i * a * q, -i * a * q, i * a / sb, -i * a / sb];
    let mut lower = vec![i * a, -i * a, i * a * sb * q, -i * a * sb * q];
    let z;
    if t1.norm() == 0.0 || t2.norm() == 0.0 {
        // an upper parameter -alpha q/t runs off to infinity while the
        // argument goes to 0; the limit carries one power of
        // (-1)^k q^{k(k-1)/2} and a zero lower parameter
        let t = if t1.norm() == 0.0 { t2 } else { t1 };
        upper.push(-a * q / t);
        lower.push(t * a);
        lower.push(re(0.0));
        z = -a * t * beta;
    } else {
        upper.push(-a * q / t1);
        upper.push(-a * q / t2);
        lower.push(t1 * a);
        lower.push(t2 * a);
        z = t1 * t2 * beta / q;
    }
    Ok((HypergeometricSpec::new(upper, lower, q)?, z))
}

/// Product side of the five-parameter special case of Bailey's 6psi6 sum.
pub fn bailey_product(alpha: f64, beta: f64, t1: C64, t2: C64, q: f64, tol: f64) -> Result<C64> {
    let i = i_unit();
    let sb = beta.sqrt();
    let a = re(alpha);
    let num = pinf_prod(
        &[
            i * t1 * sb,
            -i * t1 * sb,
            i * t2 * sb,
            -i * t2 * sb,
            -t1 * t2 / q,
            re(-alpha * alpha * q),
            re(-q / (alpha * alpha)),
            re(-beta * q),
            re(q),
        ],
        q,
        tol,
    )?;
    let den = pinf_prod(
        &[
            t1 * a,
            t2 * a,
            -t1 / a,
            -t2 / a,
            t1 * t2 * beta / q,
            i * a * sb * q,
            -i * a * sb * q,
            i * sb * q / a,
            -i * sb * q / a,
        ],
        q,
        tol,
    )?;
    Ok(num / den)
}

/// The 6psi6 with upper parameters `i alpha q, -i alpha q, i alpha/sqrt(beta),
/// -i alpha/sqrt(beta), -alpha q/t1, -alpha q/t2`, lower parameters
/// `i alpha, -i alpha, i alpha sqrt(beta) q, -i alpha sqrt(beta) q, t1 alpha, t2 alpha`
/// and argument `t1 t2 beta/q`, against [`bailey_product`].
pub fn bailey_special(alpha: f64, beta: f64, t1: C64, t2: C64, q: f64, tol: f64) -> Result<IdentityReport> {
    if beta <= 0.0 {
        return domain("the 6psi6 special case needs beta > 0");
    }
    let (spec, z) = bailey_spec(alpha, beta, t1, t2, q)?;
    let s = bilateral_psi(&spec, z, tol, DEFAULT_MAX_TERMS)?;
    let scale = s.abs_sum;
    let lhs = s.into_value()?;
    Ok(IdentityReport::new(
        "bailey_6psi6",
        &[
            ("alpha", re(alpha)),
            ("beta", re(beta)),
            ("t1", t1),
            ("t2", t2),
            ("q", re(q)),
        ],
        lhs,
        bailey_product(alpha, beta, t1, t2, q, tol)?,
        scale,
    ))
}

/// The 4psi4 with upper parameters `i alpha q, -i alpha q, -alpha q/t1, -alpha q/t2`,
/// lower parameters `i alpha, -i alpha, alpha t1, alpha t2` and argument
/// `-t1 t2/q^2`, which vanishes.
pub fn psi4_special(alpha: f64, t1: C64, t2: C64, q: f64, tol: f64) -> Result<IdentityReport> {
    let i = i_unit();
    let a = re(alpha);
    let spec = HypergeometricSpec::new(
        vec![i * a * q, -i * a * q, -a * q / t1, -a * q / t2],
        vec![i * a, -i * a, a * t1, a * t2],
        q,
    )?;
    let s = bilateral_psi(&spec, -t1 * t2 / (q * q), tol, DEFAULT_MAX_TERMS)?;
    let scale = s.abs_sum;
    Ok(IdentityReport::new(
        "psi4_special",
        &[("alpha", re(alpha)), ("t1", t1), ("t2", t2), ("q", re(q))],
        s.into_value()?,
        re(0.0),
        scale,
    ))
}

/// `ln (a; q)_inf` as a sum of principal logarithms; only its exponential
/// is meaningful.
fn ln_pinf(a: C64, q: f64, tol: f64) -> C64 {
    let mut s = re(0.0);
    let mut x = a;
    while x.norm() / (1.0 - q) > tol * 1e-3 {
        s += (1.0 - x).ln();
        x *= q;
    }
    s
}

/// `ln (t alpha q^l, -t q^{-l}/alpha; q)_inf`, the generating function on the
/// grid without its `l`-independent denominator.
fn ln_grid_generating(t: C64, l: i64, alpha: f64, q: f64, tol: f64) -> C64 {
    let s = alpha * q.powi(l as i32);
    ln_pinf(t * s, q, tol) + ln_pinf(-t / s, q, tol)
}

/// The 6psi6 special case rebuilt from the orthogonality relation: the
/// generating function is summed against the measure in both variables, the
/// sum over the grid collapses by orthogonality to a single series, and
/// dividing by the `l = 0` term of the grid sum gives the 6psi6.
pub fn summation_from_orthogonality(p: &QParams, t1: C64, t2: C64, n_max: usize, tol: f64) -> Result<IdentityReport> {
    let (q, a, b) = (p.q(), p.alpha(), p.beta());
    if b <= 0.0 {
        return domain("the summation route needs beta > 0");
    }
    let a2 = a * a;
    let mass = pinf_prod(&[re(-a2), re(-q / a2), re(-b * q), re(q)], q, tol)?
        / pinf_prod(&[re(-a2 * b * q * q), re(-b * q * q / a2)], q * q, tol)?;
    // sum_n (t1 t2)^n q^{n(n-1)} beta^n (-1/beta; q)_n / (q^{n^2} (q;q)_n)
    let mut series = re(0.0);
    let mut term = re(1.0);
    for n in 0..=n_max {
        series += term;
        let qn = q.powi(n as i32);
        term *= t1 * t2 * (b + qn) / (q * (1.0 - qn * q));
    }
    let g0 = (ln_grid_generating(t1, 0, a, q, tol) + ln_grid_generating(t2, 0, a, q, tol)).exp()
        / (pinf(-t1 * t1 * b, q * q, tol)? * pinf(-t2 * t2 * b, q * q, tol)?);
    let lhs = mass * series / (ln_weight(0, p).exp() * g0);
    Ok(IdentityReport::new(
        "summation_from_orthogonality",
        &[
            ("alpha", re(a)),
            ("beta", re(b)),
            ("t1", t1),
            ("t2", t2),
            ("q", re(q)),
            ("n_max", re(n_max as f64)),
        ],
        lhs,
        bailey_product(a, b, t1, t2, q, tol)?,
        1.0,
    ))
}

/// Grid side of [`summation_from_orthogonality`] before the collapse,
/// `sum_l weight_l G(t1, x_l) G(t2, x_l)`, against the collapsed series.
pub fn summation_grid_route(p: &QParams, t1: C64, t2: C64, half_width: i64, n_max: usize, tol: f64) -> Result<IdentityReport> {
    let (q, a, b) = (p.q(), p.alpha(), p.beta());
    if b <= 0.0 {
        return domain("the summation route needs beta > 0");
    }
    let a2 = a * a;
    let mut grid = re(0.0);
    for l in -half_width..=half_width {
        let ln = ln_weight(l, p) + ln_grid_generating(t1, l, a, q, tol) + ln_grid_generating(t2, l, a, q, tol);
        grid += ln.exp();
    }
    let den = pinf(-t1 * t1 * b, q * q, tol)? * pinf(-t2 * t2 * b, q * q, tol)?;
    grid /= den;
    let mass = pinf_prod(&[re(-a2), re(-q / a2), re(-b * q), re(q)], q, tol)?
        / pinf_prod(&[re(-a2 * b * q * q), re(-b * q * q / a2)], q * q, tol)?;
    let mut series = re(0.0);
    let mut term = re(1.0);
    for n in 0..=n_max {
        series += term;
        let qn = q.powi(n as i32);
        term *= t1 * t2 * (b + qn) / (q * (1.0 - qn * q));
    }
    Ok(IdentityReport::new(
        "summation_grid_route",
        &[("alpha", re(a)), ("beta", re(b)), ("t1", t1), ("t2", t2), ("q", re(q))],
        grid,
        mass * series,
        1.0,
    ))
}

/// Mixed route: the generating functions in `beta` and `1/(beta q^2)`
/// summed against the alternating weight give zero, the 4psi4 special case.
pub fn mixed_summation(p: &QParams, t1: C64, t2: C64, half_width: i64, tol: f64) -> Result<IdentityReport> {
    let (q, a) = (p.q(), p.alpha());
    let a2 = a * a;
    let mut s = re(0.0);
    let mut abs = 0.0;
    for l in -half_width..=half_width {
        let lf = l as f64;
        let sign = if l.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let ln_w = lf * a2.ln() + (a2 * q.powi(2 * l as i32)).ln_1p() + lf * (lf - 1.0) * q.ln();
        let t = sign * (ln_w + ln_grid_generating(t1, l, a, q, tol) + ln_grid_generating(t2, l, a, q, tol)).exp();
        s += t;
        abs += t.norm();
    }
    Ok(IdentityReport::new(
        "mixed_summation",
        &[("alpha", re(a)), ("t1", t1), ("t2", t2), ("q", re(q))],
        s,
        re(0.0),
        abs,
    ))
}

/// Heine's transformation
/// `2phi1(a, b; c; q, z) = (b, a z; q)_inf / (c, z; q)_inf 2phi1(c/b, z; a z; q, b)`.
pub fn heine_check(a: C64, b: C64, c: C64, z: C64, q: f64, tol: f64) -> Result<IdentityReport> {
    if z.norm() >= 1.0 || b.norm() >= 1.0 {
        return domain("Heine's transformation is checked for |z| < 1 and |b| < 1");
    }
    let lhs = phi21(a, b, c, q, z, tol)?;
    let pre = pinf(b, q, tol)? * pinf(a * z, q, tol)? / (pinf(c, q, tol)? * pinf(z, q, tol)?);
    let rhs = pre * phi21(c / b, z, a * z, q, b, tol)?;
    Ok(IdentityReport::new(
        "heine",
        &[("a", a), ("b", b), ("c", c), ("z", z), ("q", re(q))],
        lhs,
        rhs,
        1.0,
    ))
}

/// `theta(z q^l) = (-z)^{-l} q^{-l(l-1)/2} theta(z)`.
pub fn theta_quasi_periodicity(z: C64, l: i64, q: f64, tol: f64) -> Result<IdentityReport> {
    let lhs = theta_tol(z * q.powi(l as i32), q, tol)?;
    let lf = l as f64;
    let rhs = (-z).powf(-lf) * q.powf(-lf * (lf - 1.0) / 2.0) * theta_tol(z, q, tol)?;
    Ok(IdentityReport::new(
        "theta_quasi_periodicity",
        &[("z", z), ("l", re(lf)), ("q", re(q))],
        lhs,
        rhs,
        1.0,
    ))
}

/// Residuals of a check at `tol` and `tol / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub at_tol: IdentityReport,
    pub at_half_tol: IdentityReport,
    /// The scaled residual moved by at most `1e-2 max(r(tol), threshold)`.
    pub stable: bool,
}

/// Recomputes a check at half the tolerance. A residual far below the
/// pass threshold only has to stay there; larger residuals must agree to
/// one percent.
pub fn stable_under_halving<F>(f: F, tol: f64, threshold: f64) -> Result<StabilityReport>
where
    F: Fn(f64) -> Result<IdentityReport>,
{
    let a = f(tol)?;
    let b = f(tol / 2.0)?;
    let ra = a.scaled_residual;
    let stable = (ra - b.scaled_residual).abs() <= 1e-2 * ra.max(threshold);
    Ok(StabilityReport {
        at_tol: a,
        at_half_tol: b,
        stable,
    })
}

/// Identities that ship a default parameter box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdentityKind {
    Contiguous3Term,
    ContiguousShift,
    GeneratingFunction,
    Bailey,
    Psi4,
    Heine,
    Theta,
}

impl IdentityKind {
    pub const ALL: [IdentityKind; 7] = [
        IdentityKind::Contiguous3Term,
        IdentityKind::ContiguousShift,
        IdentityKind::GeneratingFunction,
        IdentityKind::Bailey,
        IdentityKind::Psi4,
        IdentityKind::Heine,
        IdentityKind::Theta,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            IdentityKind::Contiguous3Term => "contiguous_3term",
            IdentityKind::ContiguousShift => "contiguous_shift",
            IdentityKind::GeneratingFunction => "generating_function",
            IdentityKind::Bailey => "bailey_6psi6",
            IdentityKind::Psi4 => "psi4_special",
            IdentityKind::Heine => "heine",
            IdentityKind::Theta => "theta_quasi_periodicity",
        }
    }

    /// Coordinates and their ranges. The boxes keep every series inside its
    /// disc of convergence and away from the poles of the coefficients.
    pub fn default_box(&self) -> &'static [(&'static str, f64, f64)] {
        match self {
            // c < q^2 keeps c q^{-2} below 1
            IdentityKind::Contiguous3Term => &[
                ("a", 0.1, 0.4),
                ("b", 0.1, 0.4),
                ("c", 0.05, 0.15),
                ("z", 0.1, 0.6),
                ("q", 0.4, 0.7),
            ],
            // a < b q keeps a - b q away from 0
            IdentityKind::ContiguousShift => &[
                ("a", 0.05, 0.12),
                ("b", 0.5, 0.8),
                ("z", 0.1, 0.5),
                ("q", 0.3, 0.6),
            ],
            // t sqrt(beta) < 1/2 makes 40 terms enough
            IdentityKind::GeneratingFunction => &[
                ("t", 0.1, 0.4),
                ("y", -1.0, 1.0),
                ("beta", 0.1, 1.5),
                ("q", 0.3, 0.7),
            ],
            // t1 t2 beta/q < 1 on both sides of the bilateral sum
            IdentityKind::Bailey => &[
                ("alpha", 0.5, 1.2),
                ("beta", 0.2, 1.2),
                ("t1", 0.1, 0.4),
                ("t2", 0.1, 0.4),
                ("q", 0.4, 0.7),
            ],
            // t1 t2 < q^2
            IdentityKind::Psi4 => &[
                ("alpha", 0.5, 1.2),
                ("t1", 0.1, 0.4),
                ("t2", 0.1, 0.4),
                ("q", 0.5, 0.8),
            ],
            IdentityKind::Heine => &[
                ("a", 0.1, 0.6),
                ("b", 0.1, 0.6),
                ("c", 0.2, 0.9),
                ("z", -0.6, 0.6),
                ("q", 0.3, 0.8),
            ],
            IdentityKind::Theta => &[
                ("r", 0.3, 2.0),
                ("arg", 0.0, std::f64::consts::TAU),
                ("l", -4.0, 4.0),
                ("q", 0.3, 0.8),
            ],
        }
    }

    /// Point of the box at unit-cube coordinates `u`.
    pub fn point(&self, u: &[f64]) -> Result<Vec<f64>> {
        let b = self.default_box();
        if u.len() != b.len() {
            return domain(format!("{} needs {} coordinates, got {}", self.name(), b.len(), u.len()));
        }
        Ok(b.iter()
            .zip(u)
            .map(|((_, lo, hi), t)| lo + (hi - lo) * t)
            .collect())
    }

    /// Evaluates the identity at a point of its box.
    pub fn evaluate(&self, x: &[f64], tol: f64) -> Result<IdentityReport> {
        if x.len() != self.default_box().len() {
            return domain(format!("{} needs {} parameters", self.name(), self.default_box().len()));
        }
        match self {
            IdentityKind::Contiguous3Term => {
                contiguous_3term(re(x[0]), re(x[1]), re(x[2]), re(x[3]), x[4], tol)
            }
            IdentityKind::ContiguousShift => contiguous_shift(re(x[0]), re(x[1]), re(x[2]), x[3], tol),
            IdentityKind::GeneratingFunction => generating_function(re(x[0]), x[1], x[2], x[3], 40, tol),
            IdentityKind::Bailey => bailey_special(x[0], x[1], re(x[2]), re(x[3]), x[4], tol),
            IdentityKind::Psi4 => psi4_special(x[0], re(x[1]), re(x[2]), x[3], tol),
            IdentityKind::Heine => heine_check(re(x[0]), re(x[1]), re(x[2]), re(x[3]), x[4], tol),
            IdentityKind::Theta => {
                theta_quasi_periodicity(C64::from_polar(x[0], x[1]), x[2].round() as i64, x[3], tol)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use qspec_oracle::{Fixed, FixedC};

    const TOL: f64 = 1e-15;

    #[test]
    fn report_residuals() {
        let r = IdentityReport::new("x", &[("a", re(1.0))], re(2.0), re(2.0 + 1e-10), 0.0);
        assert!((r.rel_residual - 1e-10 / (2.0 + 1e-10)).abs() < 1e-16);
        let z = IdentityReport::new("x", &[], re(1e-12), re(0.0), 10.0);
        assert!((z.scaled_residual - 1e-13).abs() < 1e-25);
        assert!(z.passes(1e-12));
    }

    #[test]
    fn contiguous_examples() {
        let r = contiguous_3term(re(0.2), re(0.3), re(0.7), re(0.4), 0.5, TOL).unwrap();
        assert!(r.rel_residual < 1e-11, "{r:?}");
        // terminating: a = q^{-2}
        let r = contiguous_3term(re(4.0), re(0.3), re(0.7), re(0.4), 0.5, TOL).unwrap();
        assert!(r.rel_residual < 1e-13, "{r:?}");
        let r = contiguous_3term(re(0.2), re(0.3), re(0.7), re(0.0), 0.5, TOL).unwrap();
        assert_eq!(r.lhs, r.rhs);
        assert!(contiguous_3term(re(0.2), re(0.3), re(0.25), re(0.4), 0.5, TOL).is_err());
    }

    #[test]
    fn contiguous_shift_examples() {
        let r = contiguous_shift(re(0.2), re(0.5), re(0.3), 0.5, TOL).unwrap();
        assert!(r.rel_residual < 1e-11, "{r:?}");
        let r = contiguous_shift(C64::new(0.0, 0.4), re(0.7), re(0.2), 0.6, TOL).unwrap();
        assert!(r.rel_residual < 1e-11, "{r:?}");
        // at z = 0 the three coefficients sum to zero
        let r = contiguous_shift(re(0.2), re(0.5), re(0.0), 0.5, TOL).unwrap();
        assert!(r.abs_residual < 1e-14);
        assert!(contiguous_shift(re(0.5), re(0.5), re(0.2), 0.5, TOL).is_err());
        assert!(contiguous_shift(re(0.25), re(0.5), re(0.2), 0.5, TOL).is_err());
    }

    #[test]
    fn generating_function_examples() {
        let r = generating_function(re(0.0), 0.2, 0.5, 0.5, 40, TOL).unwrap();
        assert_eq!(r.lhs, re(1.0));
        assert!((r.rhs - 1.0).norm() < 1e-15);
        let r = generating_function(re(0.3), 0.2, 0.5, 0.5, 40, TOL).unwrap();
        assert!(r.rel_residual < 1e-10, "{r:?}");
        let r = generating_function(re(0.3), 0.2, 0.0, 0.5, 40, TOL).unwrap();
        assert!(r.rel_residual < 1e-10, "{r:?}");
        let r = generating_function(C64::new(0.4, 0.6), -0.7, 0.0, 0.5, 60, TOL).unwrap();
        assert!(r.rel_residual < 1e-10, "{r:?}");
        assert!(generating_function(re(1.5), 0.2, 0.5, 0.5, 40, TOL).is_err());
    }

    #[test]
    fn generating_function_oracle() {
        // (t e^{-y}, -t e^{y}; q)_inf / (-t^2 beta; q^2)_inf at y = ln 2
        let (t, beta, q) = (0.25, 0.5, 0.5);
        let y = 2f64.ln();
        let ft = Fixed::from_f64(t);
        let fq = Fixed::from_f64(q);
        let half = Fixed::ratio(1, 2);
        let a = FixedC::real(ft.mul(&half));
        let b = FixedC::real(-ft.mul(&Fixed::int(2)));
        let c = FixedC::real(-ft.mul(&ft).mul(&Fixed::from_f64(beta)));
        let num = FixedC::qpoch(&a, &fq, 200).mul(&FixedC::qpoch(&b, &fq, 200));
        let den = FixedC::qpoch(&c, &fq.mul(&fq), 200);
        let (expect, _) = num.div(&den).to_f64();
        let r = generating_function(re(t), y, beta, q, 60, TOL).unwrap();
        assert!((r.rhs.re - expect).abs() < 1e-14 * expect.abs());
        assert!((r.lhs.re - expect).abs() < 1e-12 * expect.abs());
    }

    #[test]
    fn bailey_examples() {
        let r = bailey_special(1.0, 0.5, re(0.3), re(0.4), 0.5, TOL).unwrap();
        assert!(r.rel_residual < 1e-9, "{r:?}");
        assert!((r.rhs.re - 6.380057086348775).abs() < 1e-12);
        let r = bailey_special(0.9, 1.0, re(0.2), re(0.25), 0.6, TOL).unwrap();
        assert!(r.rel_residual < 1e-9, "{r:?}");
        assert!((r.rhs.re - 4.167189112414626).abs() < 1e-12);
    }

    #[test]
    fn bailey_at_vanishing_t() {
        let r0 = bailey_special(0.8, 0.6, re(0.0), re(0.3), 0.5, TOL).unwrap();
        assert!(r0.rel_residual < 1e-10, "{r0:?}");
        let small = bailey_special(0.8, 0.6, re(1e-7), re(0.3), 0.5, TOL).unwrap();
        assert!((small.lhs - r0.lhs).norm() < 1e-6 * r0.lhs.norm());
    }

    #[test]
    fn psi4_examples() {
        let r = psi4_special(1.0, re(0.3), re(0.4), 0.5, TOL).unwrap();
        assert!(r.scaled_residual < 1e-10, "{r:?}");
        let r = psi4_special(0.8, re(0.2), re(0.5), 0.7, TOL).unwrap();
        assert!(r.scaled_residual < 1e-10, "{r:?}");
        for t2 in [1e-2, 1e-3, 1e-4] {
            let r = psi4_special(0.8, re(0.2), re(t2), 0.7, TOL).unwrap();
            assert!(r.scaled_residual < 1e-10, "{t2}: {r:?}");
        }
    }

    #[test]
    fn summation_routes() {
        let p = QParams::new(0.5, 1.0, 0.5).unwrap();
        let r = summation_from_orthogonality(&p, re(0.3), re(0.4), 80, TOL).unwrap();
        assert!(r.rel_residual < 1e-8, "{r:?}");
        let b = bailey_special(1.0, 0.5, re(0.3), re(0.4), 0.5, TOL).unwrap();
        assert!((r.lhs - b.lhs).norm() < 1e-8 * b.lhs.norm());
        let g = summation_grid_route(&p, re(0.3), re(0.4), 40, 80, TOL).unwrap();
        assert!(g.rel_residual < 1e-10, "{g:?}");
        let r = summation_from_orthogonality(&p, re(0.0), re(0.0), 10, TOL).unwrap();
        assert!(r.rel_residual < 1e-13, "{r:?}");
        let m = mixed_summation(&p, re(0.3), re(0.4), 80, TOL).unwrap();
        assert!(m.scaled_residual < 1e-12, "{m:?}");
    }

    #[test]
    fn heine_and_theta() {
        let r = heine_check(re(0.3), re(0.4), re(0.6), re(0.5), 0.5, TOL).unwrap();
        assert!(r.rel_residual < 1e-13, "{r:?}");
        for l in -4..=4 {
            let r = theta_quasi_periodicity(C64::new(0.7, 0.4), l, 0.6, TOL).unwrap();
            assert!(r.rel_residual < 1e-12, "{l}: {r:?}");
        }
    }

    #[test]
    fn boxes_evaluate_at_corners_and_centre() {
        for kind in IdentityKind::ALL {
            let d = kind.default_box().len();
            for u in [vec![0.5; d], vec![0.0; d], vec![0.999; d]] {
                let x = kind.point(&u).unwrap();
                let r = kind.evaluate(&x, 1e-14).unwrap();
                assert!(r.scaled_residual < 1e-9, "{} {x:?}: {r:?}", kind.name());
            }
        }
    }

    #[test]
    fn halving_is_stable() {
        for kind in IdentityKind::ALL {
            let x = kind.point(&vec![0.3; kind.default_box().len()]).unwrap();
            let s = stable_under_halving(|t| kind.evaluate(&x, t), 1e-13, 1e-9).unwrap();
            assert!(s.stable, "{}: {s:?}", kind.name());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn random_box_points(kind in 0usize..7, u in proptest::collection::vec(0.0f64..1.0, 5)) {
            let kind = IdentityKind::ALL[kind];
            let d = kind.default_box().len();
            let x = kind.point(&u[..d]).unwrap();
            let r = kind.evaluate(&x, 1e-14).unwrap();
            prop_assert!(r.scaled_residual < 1e-9, "{} {:?}: {:?}", kind.name(), x, r);
        }

        #[test]
        fn heine_random(a in -0.8f64..0.8, b in -0.7f64..0.7, c in -0.9f64..0.9, z in -0.7f64..0.7, q in 0.2f64..0.8) {
            prop_assume!(b.abs() > 0.05);
            let r = heine_check(re(a), re(b), re(c), re(z), q, 1e-15).unwrap();
            prop_assert!(r.scaled_residual < 1e-10, "{:?}", r);
        }
    }
}
