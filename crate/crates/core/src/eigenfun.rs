//! Closed-form solutions of the eigenvalue equation
//! `z X_l = a_l X_{l+1} + b_l X_l + a_{l-1} X_{l-1}`.
//!
//! * `psi_l(z)` is square summable at `l -> +inf`, `Psi_l(z)` at `l -> -inf`.
//! * `phi_l(z)` is the solution regular at `z = 0`, defined for `|z| < 1/q`.
//!
//! `psi_l` is evaluated by one of several representations depending on `z`,
//! `beta` and `l`; [`Branch`] records which one produced a value.

use crate::error::{domain, Error, Result};
use crate::identities::IdentityReport;
use crate::operator::{coeff_a, coeff_b};
use crate::polyrec::{grid_x, sym_asc_all};
use crate::qcore::{
    ln_qpoch_neg, ln_qpoch_neg_inf, ln_shifted_poch, phi, phi_series, qpinf, qpinf_prod,
    qpoch_finite, theta, HypergeometricSpec, QParams, C64, DEFAULT_MAX_TERMS, DEFAULT_TOL,
};

const I: C64 = C64::new(0.0, 1.0);

/// Beyond this amount of cancellation the connection formula is abandoned in
/// favour of the Heine representation.
const CONNECTION_CONDITION_LIMIT: f64 = 1e2;

/// Below this `beta` the `1/sqrt(beta)` parameters make the connection
/// formula useless.
const CONNECTION_MIN_BETA: f64 = 1e-6;

/// Radius outside which `psi_l` is summed from its defining series. Kept
/// below `1/q` so the inner representations, which need `|z| < 1/q`, always
/// cover the rest of the plane.
pub fn branch_radius(q: f64) -> f64 {
    1.05f64.min(0.5 * (1.0 + 1.0 / q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// Defining `2 phi 1` series in `1/z`.
    SeriesOutside,
    /// Combination of the two solutions regular at the origin.
    Connection,
    /// Heine-transformed series, followed by downward recursion in `l` when
    /// `l` is below the range where that series converges.
    Heine,
    /// `0 phi 1` representation valid when `beta = 0`.
    Beta0,
}

impl Branch {
    pub fn name(&self) -> &'static str {
        match self {
            Branch::SeriesOutside => "series_outside",
            Branch::Connection => "connection",
            Branch::Heine => "heine",
            Branch::Beta0 => "beta0",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenfunctionValue {
    pub l: i64,
    pub z: C64,
    pub value: C64,
    pub branch: Branch,
}

/// Normalizing constants of `psi_l` and `phi_l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationConstants {
    pub c_l: f64,
    /// Phase of `phi_l`, `|b_l| = 1`.
    pub b_l: C64,
    /// `(i alpha / sqrt(beta), -i alpha sqrt(beta) q; q)_l`.
    pub w_l: C64,
}

fn ln1p_exp(ln_y: f64) -> f64 {
    if ln_y > 0.0 {
        ln_y + (-ln_y).exp().ln_1p()
    } else {
        ln_y.exp().ln_1p()
    }
}

fn parity(l: i64) -> f64 {
    if l.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn alpha_sign_pow(alpha: f64, l: i64) -> f64 {
    if alpha < 0.0 {
        parity(l)
    } else {
        1.0
    }
}

/// `ln sqrt(1 + alpha^2 q^{2l})`.
fn ln_sqrt_grid(a2: f64, q: f64, l: i64) -> f64 {
    0.5 * ln1p_exp(a2.ln() + 2.0 * l as f64 * q.ln())
}

/// `ln |C_l alpha^l beta^{l/2} q^{l^2/2}|`, finite also at `beta = 0`.
fn ln_prefactor(l: i64, p: &QParams) -> f64 {
    let (q, a, b) = (p.q(), p.alpha(), p.beta());
    let a2 = a * a;
    let lf = l as f64;
    ln_sqrt_grid(a2, q, l) + 0.5 * ln_shifted_poch(a2, b, q, l)
        + 0.5 * ln_qpoch_neg(a2 * b * q * q, q * q, l)
        - ln_qpoch_neg(a2 * q, q, 2 * l)
        + lf * a.abs().ln()
        + 0.5 * lf * lf * q.ln()
}

/// `C_l alpha^l beta^{l/2} q^{l^2/2} z^{-l}`.
fn scaled_prefactor(l: i64, z: C64, p: &QParams) -> C64 {
    let ln = C64::new(ln_prefactor(l, p), 0.0) - (l as f64) * z.ln();
    alpha_sign_pow(p.alpha(), l) * ln.exp()
}

pub fn normalization(l: i64, p: &QParams) -> Result<NormalizationConstants> {
    let (q, a, b) = (p.q(), p.alpha(), p.beta());
    if b == 0.0 {
        return domain("the normalizations C_l and B_l need beta > 0");
    }
    let a2 = a * a;
    let ln_c = ln_sqrt_grid(a2, q, l)
        + 0.5 * (ln_qpoch_neg(a2 / b, q * q, l) + ln_qpoch_neg(a2 * b * q * q, q * q, l))
        - ln_qpoch_neg(a2 * q, q, 2 * l);
    let sb = b.sqrt();
    let u = I * a / sb;
    let v = -I * a * sb * q;
    let w_l = qpoch_finite(u, q, l)? * qpoch_finite(v, q, l)?;
    // accumulate the argument factor by factor
    let mut arg = 0.0;
    if l >= 0 {
        for k in 0..l {
            let qk = q.powi(k as i32);
            arg += (1.0 - u * qk).arg() + (1.0 - v * qk).arg();
        }
    } else {
        for k in 1..=-l {
            let qk = q.powi(-(k as i32));
            arg -= (1.0 - u * qk).arg() + (1.0 - v * qk).arg();
        }
    }
    let b_l = (-I).powi(l as i32) * C64::from_polar(1.0, arg);
    Ok(NormalizationConstants {
        c_l: ln_c.exp(),
        b_l,
        w_l,
    })
}

fn check_z(z: C64) -> Result<()> {
    if z.norm() == 0.0 || !z.is_finite() {
        return domain(format!("eigenfunctions are evaluated at finite z != 0, got {z}"));
    }
    Ok(())
}

fn psi_series(l: i64, z: C64, p: &QParams) -> Result<C64> {
    let (q, a, b) = (p.q(), p.alpha(), p.beta());
    let s = a * b.sqrt() * q.powi(l as i32 + 1);
    let c = -a * a * q.powi(2 * l as i32 + 1);
    let spec = HypergeometricSpec::phi21(I * s, -I * s, C64::new(c, 0.0), q)?;
    let f = phi(&spec, 1.0 / z)?;
    Ok(scaled_prefactor(l, z, p) * qpinf(1.0 / z, q)? * f)
}

fn psi_beta0(l: i64, z: C64, p: &QParams) -> Result<C64> {
    let (q, a) = (p.q(), p.alpha());
    let c = C64::new(-a * a * q.powi(2 * l as i32 + 1), 0.0);
    let spec = HypergeometricSpec::new(vec![], vec![c], q)?;
    Ok(scaled_prefactor(l, z, p) * phi(&spec, c / z)?)
}

/// Smallest `l` with `|alpha| sqrt(beta) q^{l+1} <= 1/2`.
pub fn heine_threshold(p: &QParams) -> i64 {
    let s = p.alpha().abs() * p.beta().sqrt();
    ((0.5 / s).ln() / p.q().ln()).ceil() as i64 - 1
}

fn psi_heine_direct(l: i64, z: C64, p: &QParams) -> Result<C64> {
    let (q, a, b) = (p.q(), p.alpha(), p.beta());
    let sb = b.sqrt();
    let s = I * a * sb * q.powi(l as i32 + 1);
    let pre = qpinf(-s, q)? * qpinf(s / z, q)? / qpinf(C64::new(-a * a * q.powi(2 * l as i32 + 1), 0.0), q)?;
    let spec = HypergeometricSpec::phi21(1.0 / z, -I * a * q.powi(l as i32) / sb, s / z, q)?;
    Ok(scaled_prefactor(l, z, p) * pre * phi(&spec, -s)?)
}

/// Continues a solution from `(x_l, x_{l+1})` down to index `target`.
fn recurse_down(
    p: &QParams,
    z: C64,
    mut l: i64,
    mut cur: C64,
    mut next: C64,
    target: i64,
) -> C64 {
    while l > target {
        let prev = ((z - coeff_b(l, p)) * cur - coeff_a(l, p) * next) / coeff_a(l - 1, p);
        next = cur;
        cur = prev;
        l -= 1;
    }
    cur
}

fn psi_heine(l: i64, z: C64, p: &QParams) -> Result<C64> {
    if p.beta() == 0.0 {
        return domain("the Heine representation needs beta > 0");
    }
    let top = heine_threshold(p);
    if l >= top {
        return psi_heine_direct(l, z, p);
    }
    let cur = psi_heine_direct(top, z, p)?;
    let next = psi_heine_direct(top + 1, z, p)?;
    Ok(recurse_down(p, z, top, cur, next, l))
}

/// Value and cancellation factor of `phi_l(z)`.
fn phi_inner(l: i64, z: C64, p: &QParams) -> Result<(C64, f64)> {
    let (q, a, b) = (p.q(), p.alpha(), p.beta());
    if b == 0.0 {
        return domain("phi_l needs beta > 0");
    }
    if z.norm() >= 1.0 / q {
        return domain(format!("phi_l needs |z| < 1/q, got |z| = {}", z.norm()));
    }
    let sb = b.sqrt();
    let nc = normalization(l, p)?;
    let spec = HypergeometricSpec::phi21(
        I * a * q.powi(l as i32) / sb,
        -I * q.powi(-(l as i32)) / (a * sb),
        C64::new(-q, 0.0),
        q,
    )?;
    let r = phi_series(&spec, q * z, DEFAULT_TOL, DEFAULT_MAX_TERMS)?;
    let cancel = r.cancellation();
    let v = r.into_value()?;
    let ln_mag = -0.5 * l as f64 * q.ln() + ln_sqrt_grid(a * a, q, l);
    Ok((nc.b_l * ln_mag.exp() * v, cancel))
}

/// The solution regular at the origin, for `|z| < 1/q` and `beta > 0`.
pub fn phi_sol(l: i64, z: C64, p: &QParams) -> Result<EigenfunctionValue> {
    let (value, _) = phi_inner(l, z, p)?;
    Ok(EigenfunctionValue {
        l,
        z,
        value,
        branch: Branch::Connection,
    })
}

/// Connection coefficient `K(z; sign*alpha, beta)`.
pub fn connection_k(z: C64, p: &QParams, sign: i32) -> Result<C64> {
    check_z(z)?;
    let (q, b) = (p.q(), p.beta());
    if b == 0.0 {
        return domain("the connection coefficient needs beta > 0");
    }
    let a = if sign < 0 { -p.alpha() } else { p.alpha() };
    let sb = b.sqrt();
    // simple poles at z = -beta q^{-k}
    let mut qk = 1.0;
    while b / qk <= 2.0 * z.norm() {
        let f = 1.0 + z * qk / b;
        if f.norm() < 1e-12 {
            return Err(Error::Pole(format!("K(z) has a pole at z = {z}")));
        }
        qk *= q;
    }
    let num = qpinf_prod(&[-I * a / sb, I * a * sb * q], q)?;
    let den = 2.0 * qpinf_prod(&[C64::new(-q, 0.0), C64::new(-a * a * q, 0.0)], q)?;
    let th = theta(I * z / (a * sb), q)?;
    Ok(num / den * th / qpinf(-z / b, q)?)
}

fn psi_connection(l: i64, z: C64, p: &QParams) -> Result<(C64, f64)> {
    let kp = connection_k(z, p, 1)?;
    let km = connection_k(z, p, -1)?;
    let (fp, cp) = phi_inner(l, z, p)?;
    let (fm, cm) = phi_inner(l, z, &p.with_alpha(-p.alpha())?)?;
    let t1 = kp * fp;
    let t2 = km * parity(l) * fm;
    let v = t1 + t2;
    let cond = (t1.norm() + t2.norm()) / v.norm();
    Ok((v, cond.max(cp).max(cm)))
}

/// `psi_l(z)` by the representation appropriate for `z`.
pub fn psi(l: i64, z: C64, p: &QParams) -> Result<EigenfunctionValue> {
    check_z(z)?;
    let wrap = |value, branch| {
        Ok(EigenfunctionValue {
            l,
            z,
            value,
            branch,
        })
    };
    if p.beta() == 0.0 {
        return wrap(psi_beta0(l, z, p)?, Branch::Beta0);
    }
    if z.norm() > branch_radius(p.q()) {
        return wrap(psi_series(l, z, p)?, Branch::SeriesOutside);
    }
    let conn = if p.beta() >= CONNECTION_MIN_BETA {
        psi_connection(l, z, p).ok()
    } else {
        None
    };
    if let Some((v, cond)) = conn {
        if cond <= CONNECTION_CONDITION_LIMIT && v.is_finite() {
            return wrap(v, Branch::Connection);
        }
    }
    match psi_heine(l, z, p) {
        Ok(v) => wrap(v, Branch::Heine),
        Err(e) => match conn {
            Some((v, _)) if v.is_finite() => wrap(v, Branch::Connection),
            _ => Err(e),
        },
    }
}

/// `psi_l(z)` from a forced representation, for cross-checks.
pub fn psi_with_branch(l: i64, z: C64, p: &QParams, branch: Branch) -> Result<EigenfunctionValue> {
    check_z(z)?;
    let value = match branch {
        Branch::SeriesOutside => psi_series(l, z, p)?,
        Branch::Connection => {
            if p.beta() == 0.0 {
                return domain("the connection formula needs beta > 0");
            }
            psi_connection(l, z, p)?.0
        }
        Branch::Heine => psi_heine(l, z, p)?,
        Branch::Beta0 => {
            if p.beta() != 0.0 {
                return domain("the 0phi1 representation is only valid at beta = 0");
            }
            psi_beta0(l, z, p)?
        }
    };
    Ok(EigenfunctionValue {
        l,
        z,
        value,
        branch,
    })
}

fn mirror(p: &QParams) -> Result<QParams> {
    p.with_alpha(1.0 / p.alpha())
}

/// Factor between `Psi_l(z; alpha)` and `psi_{-l}(z; 1/alpha)`.
fn mirror_factor(alpha: f64) -> f64 {
    alpha.abs() / (1.0 + alpha * alpha)
}

fn psi_big_beta0(l: i64, z: C64, p: &QParams) -> Result<C64> {
    let (q, a) = (p.q(), p.alpha());
    let c = C64::new(-q.powi(1 - 2 * l as i32) / (a * a), 0.0);
    let spec = HypergeometricSpec::new(vec![], vec![c], q)?;
    let ln = C64::new(-ln_prefactor(l, p), 0.0) + (l as f64) * z.ln();
    Ok(alpha_sign_pow(a, l) * ln.exp() * phi(&spec, c / z)?)
}

/// `Psi_l(z)`, the solution square summable at `l -> -inf`.
///
/// For `beta > 0` it is the mirror image `|alpha|/(1+alpha^2) psi_{-l}(z; 1/alpha)`,
/// which equals the explicit series normalized by `1/C_l`.
pub fn psi_big(l: i64, z: C64, p: &QParams) -> Result<EigenfunctionValue> {
    check_z(z)?;
    if p.beta() == 0.0 {
        return Ok(EigenfunctionValue {
            l,
            z,
            value: psi_big_beta0(l, z, p)?,
            branch: Branch::Beta0,
        });
    }
    let m = psi(-l, z, &mirror(p)?)?;
    Ok(EigenfunctionValue {
        l,
        z,
        value: mirror_factor(p.alpha()) * m.value,
        branch: m.branch,
    })
}

pub fn psi_big_with_branch(l: i64, z: C64, p: &QParams, branch: Branch) -> Result<EigenfunctionValue> {
    if branch == Branch::Beta0 {
        if p.beta() != 0.0 {
            return domain("the 0phi1 representation is only valid at beta = 0");
        }
        check_z(z)?;
        return Ok(EigenfunctionValue {
            l,
            z,
            value: psi_big_beta0(l, z, p)?,
            branch,
        });
    }
    let m = psi_with_branch(-l, z, &mirror(p)?, branch)?;
    Ok(EigenfunctionValue {
        l,
        z,
        value: mirror_factor(p.alpha()) * m.value,
        branch,
    })
}

/// The explicit series for `Psi_l(z)`, convergent for `|z| > 1`.
pub fn psi_big_series(l: i64, z: C64, p: &QParams) -> Result<C64> {
    check_z(z)?;
    let (q, a, b) = (p.q(), p.alpha(), p.beta());
    let s = b.sqrt() * q.powi(1 - l as i32) / a;
    let c = C64::new(-q.powi(1 - 2 * l as i32) / (a * a), 0.0);
    let spec = HypergeometricSpec::phi21(I * s, -I * s, c, q)?;
    let ln = C64::new(-ln_prefactor(l, p), 0.0) + (l as f64) * z.ln();
    Ok(alpha_sign_pow(a, l) * ln.exp() * qpinf(1.0 / z, q)? * phi(&spec, 1.0 / z)?)
}

/// `a_l (psi_{l+1} Psi_l - psi_l Psi_{l+1})`.
pub fn wronskian_numeric(l: i64, z: C64, p: &QParams) -> Result<C64> {
    let s0 = psi(l, z, p)?.value;
    let s1 = psi(l + 1, z, p)?.value;
    let b0 = psi_big(l, z, p)?.value;
    let b1 = psi_big(l + 1, z, p)?.value;
    Ok(coeff_a(l, p) * (s1 * b0 - s0 * b1))
}

/// `-z (-q beta / z, 1/z; q)_inf`.
pub fn wronskian_closed(z: C64, q: f64, beta: f64) -> Result<C64> {
    check_z(z)?;
    Ok(-z * qpinf(-q * beta / z, q)? * qpinf(1.0 / z, q)?)
}

/// Relation between `psi_l`, `Psi_l` and `phi_l` for `|z| < 1/q`, `beta > 0`.
pub fn three_term_relation(l: i64, z: C64, p: &QParams) -> Result<IdentityReport> {
    let (q, a, b) = (p.q(), p.alpha(), p.beta());
    if b == 0.0 {
        return domain("the three-term relation needs beta > 0");
    }
    let sb = b.sqrt();
    let c = |x: f64| C64::new(x, 0.0);
    let t1 = theta(I * a * z * q / sb, q)?
        * qpinf_prod(&[c(-a * a * q), -I / (a * sb), I * sb * q / a], q)?
        * psi(l, z, p)?.value;
    let t2 = theta(I * a * sb / z, q)?
        * qpinf_prod(&[c(-1.0 / (a * a)), I * a / sb, -I * a * sb * q], q)?
        * psi_big(l, z, p)?.value;
    let rhs = theta(1.0 / z, q)?
        * theta(c(-1.0 / (a * a)), q)?
        * qpinf_prod(&[c(-q), -b * q / z], q)?
        * phi_sol(l, z, p)?.value;
    Ok(IdentityReport::new(
        "psi_Psi_phi_relation",
        &[("l", c(l as f64)), ("z", z), ("q", c(q)), ("alpha", c(a)), ("beta", c(b))],
        t1 + t2,
        rhs,
        t1.norm() + t2.norm() + rhs.norm(),
    ))
}

/// The two eigenvalue sequences `q^n` and `-beta q^{n+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EigenBranch {
    Positive,
    Negative,
}

impl EigenBranch {
    pub fn from_sign(sign: i32) -> Self {
        if sign < 0 {
            EigenBranch::Negative
        } else {
            EigenBranch::Positive
        }
    }

    pub fn eigenvalue(&self, n: i64, p: &QParams) -> f64 {
        match self {
            EigenBranch::Positive => p.q().powi(n as i32),
            EigenBranch::Negative => -p.beta() * p.q().powi(n as i32 + 1),
        }
    }
}

fn check_branch(n: i64, branch: EigenBranch, p: &QParams) -> Result<()> {
    if n < 0 {
        return domain(format!("eigenvalue index n = {n} must be >= 0"));
    }
    if branch == EigenBranch::Negative && p.beta() == 0.0 {
        return domain("there are no negative eigenvalues at beta = 0");
    }
    Ok(())
}

/// Constant `c` with `Psi_l(lambda) = c psi_l(lambda)` at the eigenvalue
/// `lambda = q^n` or `-beta q^{n+1}`.
pub fn proportionality(n: i64, branch: EigenBranch, p: &QParams) -> Result<f64> {
    check_branch(n, branch, p)?;
    let (q, a, b) = (p.q(), p.alpha(), p.beta());
    let a2 = a * a;
    let q2 = q * q;
    let base = ln_qpoch_neg_inf(a2 * q, q) - ln_qpoch_neg_inf(1.0 / a2, q);
    let extra = match branch {
        EigenBranch::Positive => ln_qpoch_neg_inf(b * q2 / a2, q2) - ln_qpoch_neg_inf(a2 * b * q2, q2),
        EigenBranch::Negative => ln_qpoch_neg_inf(1.0 / (a2 * b), q2) - ln_qpoch_neg_inf(a2 / b, q2),
    };
    let ln = base + extra - (2 * n + 2) as f64 * a.abs().ln();
    Ok(parity(n) * ln.exp())
}

/// `psi_l` at an eigenvalue, through its polynomial representation; stable for
/// all `l` where the series representations lose accuracy.
pub fn psi_at_eigenvalue(l: i64, n: i64, branch: EigenBranch, p: &QParams) -> Result<f64> {
    check_branch(n, branch, p)?;
    let (q, a, b) = (p.q(), p.alpha(), p.beta());
    let a2 = a * a;
    let q2 = q * q;
    let lf = l as f64;
    let x = grid_x(a, q, l);
    let common = ln_sqrt_grid(a2, q, l) + lf * a.abs().ln() + 0.5 * lf * lf * q.ln()
        - ln_qpoch_neg_inf(a2 * q, q)
        + n as f64 * a.abs().ln();
    let sign = alpha_sign_pow(a, l) * alpha_sign_pow(a, n);
    let (ln, sign, h) = match branch {
        EigenBranch::Positive => {
            let h = sym_asc_all(n as usize, x, b, q)?[n as usize];
            let ln = common + ln_qpoch_neg_inf(a2 * b * q2, q2) + 0.5 * ln_shifted_poch(a2, b, q, l)
                - 0.5 * ln_qpoch_neg(a2 * b * q2, q2, l);
            (ln, sign, h)
        }
        EigenBranch::Negative => {
            let h = sym_asc_all(n as usize, x, 1.0 / (b * q2), q)?[n as usize];
            let ln = common + ln_qpoch_neg_inf(a2 / b, q2) + 0.5 * ln_qpoch_neg(a2 * b * q2, q2, l)
                - 0.5 * ln_shifted_poch(a2, b, q, l)
                - lf * q.ln();
            (ln, sign * parity(l), h)
        }
    };
    Ok(sign * h * ln.exp())
}

/// Scaled residual of the eigenvalue equation for a finite stretch of a
/// solution, `values[i]` at `l = lo + i`; interior points only.
pub fn eigen_equation_residual(p: &QParams, lo: i64, values: &[C64], z: C64) -> f64 {
    let mut worst = 0.0f64;
    for i in 1..values.len().saturating_sub(1) {
        let l = lo + i as i64;
        let up = coeff_a(l, p) * values[i + 1];
        let mid = coeff_b(l, p) * values[i];
        let down = coeff_a(l - 1, p) * values[i - 1];
        let zl = z * values[i];
        let r = (up + mid + down - zl).norm();
        let s = up.norm() + mid.norm() + down.norm() + zl.norm();
        if s > 0.0 {
            worst = worst.max(r / s);
        }
    }
    worst
}

/// The two explicit solutions at `z = 0`, `beta = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroEnergySolutions {
    pub lo: i64,
    /// `q^{-l/2}`.
    pub phi: Vec<f64>,
    /// `(1 + alpha^2 q^l)(1 - q^l) q^{-3l/2}`.
    pub phi_tilde: Vec<f64>,
    /// `(-1)^l sqrt(1 + alpha^2 q^{2l}) phi_l`, a solution of the operator recursion.
    pub psi: Vec<f64>,
    pub psi_tilde: Vec<f64>,
}

pub fn zero_energy_solutions(p: &QParams, lo: i64, hi: i64) -> Result<ZeroEnergySolutions> {
    if p.beta() != 0.0 {
        return domain("the explicit zero-energy solutions are for beta = 0");
    }
    if hi < lo {
        return domain("empty index range");
    }
    let (q, a) = (p.q(), p.alpha());
    let a2 = a * a;
    let mut out = ZeroEnergySolutions {
        lo,
        phi: vec![],
        phi_tilde: vec![],
        psi: vec![],
        psi_tilde: vec![],
    };
    for l in lo..=hi {
        let ql = q.powi(l as i32);
        let f = ql.powf(-0.5);
        let g = (1.0 + a2 * ql) * (1.0 - ql) * ql.powf(-1.5);
        let w = parity(l) * (1.0 + a2 * ql * ql).sqrt();
        out.phi.push(f);
        out.phi_tilde.push(g);
        out.psi.push(w * f);
        out.psi_tilde.push(w * g);
    }
    Ok(out)
}

/// `[f, g]_l = a_l (f_{l+1} g_l - f_l g_{l+1})` for the two solutions at
/// `z = 0` obtained from `phi_l(0; alpha)` and `(-1)^l phi_l(0; -alpha)`.
pub fn zero_energy_wronskian(l: i64, p: &QParams) -> Result<C64> {
    let f = |k: i64| phi_sol(k, C64::new(0.0, 0.0), p).map(|v| v.value);
    let neg = p.with_alpha(-p.alpha())?;
    let g = |k: i64| phi_sol(k, C64::new(0.0, 0.0), &neg).map(|v| parity(k) * v.value);
    Ok(coeff_a(l, p) * (f(l + 1)? * g(l)? - f(l)? * g(l + 1)?))
}
