//! q-series primitives: finite and infinite q-Pochhammer symbols, the
//! rescaled theta function, unilateral `r phi s` and bilateral `r psi r`
//! series.
//!
//! Everything is evaluated in double-precision complex arithmetic. Infinite
//! objects are truncated by an explicit tail rule and report their
//! truncation diagnostics through [`SeriesResult`].

use num_complex::Complex64;

use crate::error::{domain, Error, Result};

pub type C64 = Complex64;

/// Default relative tolerance for infinite products and series.
pub const DEFAULT_TOL: f64 = 1e-13;

/// Default term budget for a single side of a series.
pub const DEFAULT_MAX_TERMS: usize = 20_000;

/// Relative size below which a factor `1 - a q^k` is treated as an exact zero.
const ZERO_FACTOR: f64 = 1e-12;

const MAX_PRODUCT_FACTORS: usize = 200_000;

pub(crate) fn check_q(q: f64) -> Result<()> {
    if q.is_finite() && q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        domain(format!("base q = {q} must lie in (0, 1)"))
    }
}

/// The parameter triple `(q, alpha, beta)` that fixes the operator, its
/// eigenfunctions and the orthogonality measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QParams {
    q: f64,
    alpha: f64,
    beta: f64,
}

impl QParams {
    pub fn new(q: f64, alpha: f64, beta: f64) -> Result<Self> {
        check_q(q)?;
        if !alpha.is_finite() || alpha == 0.0 {
            return domain(format!("alpha = {alpha} must be finite and nonzero"));
        }
        if !beta.is_finite() || beta < 0.0 {
            return domain(format!("beta = {beta} must be finite and >= 0"));
        }
        Ok(QParams { q, alpha, beta })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        QParams::new(self.q, alpha, self.beta)
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        QParams::new(self.q, self.alpha, beta)
    }

    /// The partner parameter `1/(beta q^2)` under the `U` symmetry.
    pub fn dual_beta(&self) -> Result<Self> {
        if self.beta == 0.0 {
            return domain("beta -> 1/(beta q^2) is undefined for beta = 0");
        }
        self.with_beta(1.0 / (self.beta * self.q * self.q))
    }

    /// Representative `alpha` in `(q, 1]` describing the same grid.
    ///
    /// Grids coincide when `alpha/gamma` or `-alpha*gamma` is an integer power
    /// of `q`, so a negative `alpha` is first replaced by `1/|alpha|`.
    pub fn canonicalize(&self) -> QParams {
        let mut a = if self.alpha < 0.0 {
            1.0 / self.alpha.abs()
        } else {
            self.alpha
        };
        let k = (a.ln() / self.q.ln()).floor();
        a *= self.q.powf(-k);
        // powf rounding can leave `a` one step outside the window
        while a > 1.0 + 4.0 * f64::EPSILON {
            a *= self.q;
        }
        while a <= self.q * (1.0 + 4.0 * f64::EPSILON) {
            a /= self.q;
        }
        if (a - 1.0).abs() <= 4.0 * f64::EPSILON {
            a = 1.0;
        }
        QParams { alpha: a, ..*self }
    }
}

/// A series or product value with its truncation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    pub value: C64,
    pub terms_used: usize,
    pub tail_estimate: f64,
    pub converged: bool,
    /// Sum of the moduli of the terms actually added; `abs_sum / |value|`
    /// bounds the cancellation inside the sum.
    pub abs_sum: f64,
}

impl SeriesResult {
    fn exact(value: C64, terms_used: usize, abs_sum: f64) -> Self {
        SeriesResult {
            value,
            terms_used,
            tail_estimate: 0.0,
            converged: true,
            abs_sum,
        }
    }

    /// Ratio between the largest partial information and the result, i.e. how
    /// many digits were lost to cancellation (1 means none).
    pub fn cancellation(&self) -> f64 {
        let v = self.value.norm();
        if v == 0.0 {
            f64::INFINITY
        } else {
            (self.abs_sum / v).max(1.0)
        }
    }

    /// Value, or `NoConvergence` when the truncation rule was not satisfied.
    pub fn into_value(self) -> Result<C64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::NoConvergence {
                terms: self.terms_used,
                ratio: f64::NAN,
            })
        }
    }
}

/// `(a; q)_n` for any integer `n`, with `(a; q)_{-n} = 1 / prod_{k=1}^{n} (1 - a q^{-k})`.
pub fn qpoch_finite(a: C64, q: f64, n: i64) -> Result<C64> {
    check_q(q)?;
    if n >= 0 {
        let mut p = C64::new(1.0, 0.0);
        let mut qk = 1.0;
        for _ in 0..n {
            p *= 1.0 - a * qk;
            qk *= q;
        }
        Ok(p)
    } else {
        let mut p = C64::new(1.0, 0.0);
        let inv = 1.0 / q;
        let mut qk = 1.0;
        for k in 1..=(-n) {
            qk *= inv;
            let f = 1.0 - a * qk;
            if f.norm() <= ZERO_FACTOR * (a * qk).norm().max(1.0) {
                return Err(Error::Pole(format!(
                    "(a;q)_{n} with a = {a} has a vanishing factor at k = {k}"
                )));
            }
            p *= f;
        }
        Ok(1.0 / p)
    }
}

/// `(a; q)_inf` truncated once the neglected factors change the product by
/// less than `tol` relatively.
pub fn qpoch_inf(a: C64, q: f64, tol: f64) -> Result<SeriesResult> {
    check_q(q)?;
    if !(tol > 0.0) {
        return domain(format!("tolerance {tol} must be positive"));
    }
    let r = a.norm();
    if r == 0.0 {
        return Ok(SeriesResult::exact(C64::new(1.0, 0.0), 0, 1.0));
    }
    let mut p = C64::new(1.0, 0.0);
    let mut qk = 1.0;
    for k in 0..MAX_PRODUCT_FACTORS {
        let f = 1.0 - a * qk;
        if f == C64::new(0.0, 0.0) {
            return Ok(SeriesResult::exact(f, k + 1, 0.0));
        }
        p *= f;
        qk *= q;
        // |prod_{j>k} (1 - a q^j) - 1| <= exp(b) - 1 <= b / (1 - b)
        let b = r * qk / (1.0 - q);
        if b < 1.0 {
            let rel = b / (1.0 - b);
            if rel < tol {
                return Ok(SeriesResult {
                    value: p,
                    terms_used: k + 1,
                    tail_estimate: p.norm() * rel,
                    converged: true,
                    abs_sum: p.norm(),
                });
            }
        }
    }
    Ok(SeriesResult {
        value: p,
        terms_used: MAX_PRODUCT_FACTORS,
        tail_estimate: f64::INFINITY,
        converged: false,
        abs_sum: p.norm(),
    })
}

/// `(a; q)_inf` at the default tolerance.
pub fn qpinf(a: C64, q: f64) -> Result<C64> {
    qpoch_inf(a, q, DEFAULT_TOL)?.into_value()
}

/// Real-argument shorthand for `(a; q)_inf`.
pub fn qpinf_re(a: f64, q: f64) -> Result<f64> {
    Ok(qpinf(C64::new(a, 0.0), q)?.re)
}

/// `(a_1, ..., a_k; q)_inf`.
pub fn qpinf_prod(args: &[C64], q: f64) -> Result<C64> {
    args.iter()
        .try_fold(C64::new(1.0, 0.0), |acc, &a| Ok(acc * qpinf(a, q)?))
}

/// `ln (-x; q)_n` for `x >= 0` and any integer `n`; every factor is positive.
pub fn ln_qpoch_neg(x: f64, q: f64, n: i64) -> f64 {
    let ln1p = |y: f64| if y > 1.0 { y.ln() + (1.0 / y).ln_1p() } else { y.ln_1p() };
    if n >= 0 {
        (0..n).map(|k| ln1p(x * q.powi(k as i32))).sum()
    } else {
        -(1..=-n).map(|k| ln1p(x * q.powi(-(k as i32)))).sum::<f64>()
    }
}

/// `ln (-x; q)_inf` for `x >= 0`, summed in the log domain so that very
/// large products stay representable.
pub fn ln_qpoch_neg_inf(x: f64, q: f64) -> f64 {
    let mut s = 0.0;
    let mut t = x;
    while t / (1.0 - q) > 1e-17 {
        s += if t > 1.0 { t.ln() + (1.0 / t).ln_1p() } else { t.ln_1p() };
        t *= q;
    }
    s
}

/// `ln prod_{j<l} (beta + a2 q^{2j})`, extended to negative `l` by
/// `-sum_{k=1}^{-l} ln(beta + a2 q^{-2k})`; equals `ln beta^l (-a2/beta; q^2)_l`
/// for `beta > 0` and stays finite at `beta = 0`.
pub fn ln_shifted_poch(a2: f64, beta: f64, q: f64, l: i64) -> f64 {
    if l >= 0 {
        (0..l).map(|j| (beta + a2 * q.powi(2 * j as i32)).ln()).sum()
    } else {
        -(1..=-l)
            .map(|k| (beta + a2 * q.powi(-2 * k as i32)).ln())
            .sum::<f64>()
    }
}

/// Rescaled Jacobi theta function `theta(z) = (z, q/z; q)_inf`.
pub fn theta(z: C64, q: f64) -> Result<C64> {
    theta_tol(z, q, DEFAULT_TOL)
}

pub fn theta_tol(z: C64, q: f64, tol: f64) -> Result<C64> {
    if z.norm() == 0.0 {
        return domain("theta(z) is undefined at z = 0");
    }
    let a = qpoch_inf(z, q, tol)?.into_value()?;
    let b = qpoch_inf(q / z, q, tol)?.into_value()?;
    Ok(a * b)
}

/// Parameters of a basic hypergeometric series. `gr_factor_power` is the
/// exponent of `(-1)^k q^{k(k-1)/2}` in the `phi` term, `s + 1 - r`.
#[derive(Debug, Clone, PartialEq)]
pub struct HypergeometricSpec {
    pub upper: Vec<C64>,
    pub lower: Vec<C64>,
    pub q: f64,
    pub gr_factor_power: i32,
}

impl HypergeometricSpec {
    pub fn new(upper: Vec<C64>, lower: Vec<C64>, q: f64) -> Result<Self> {
        check_q(q)?;
        let gr_factor_power = lower.len() as i32 + 1 - upper.len() as i32;
        Ok(HypergeometricSpec {
            upper,
            lower,
            q,
            gr_factor_power,
        })
    }

    /// `2 phi 1 (a, b; c; q, z)`.
    pub fn phi21(a: C64, b: C64, c: C64, q: f64) -> Result<Self> {
        Self::new(vec![a, b], vec![c], q)
    }

    /// Exponent used by the bilateral sum, which carries no `(q;q)_k`.
    fn bilateral_power(&self) -> i32 {
        self.gr_factor_power - 1
    }
}

enum Step {
    Next(C64),
    Terminated,
    Pole(String),
}

fn vanishes(f: C64, x: C64) -> bool {
    f.norm() <= ZERO_FACTOR * x.norm().max(1.0)
}

/// Running state of one direction of a series.
struct Side<F: FnMut(usize) -> Step> {
    ratio: F,
    rho_inf: f64,
    settled_from: usize,
    k: usize,
    term: C64,
    sum: C64,
    abs_sum: f64,
    tail: f64,
    last_ratio: f64,
    finished: bool,
}

impl<F: FnMut(usize) -> Step> Side<F> {
    fn new(ratio: F, rho_inf: f64, settled_from: usize, include_first: bool) -> Self {
        let one = C64::new(1.0, 0.0);
        Side {
            ratio,
            rho_inf,
            settled_from,
            k: 0,
            term: one,
            sum: if include_first { one } else { C64::new(0.0, 0.0) },
            abs_sum: if include_first { 1.0 } else { 0.0 },
            tail: f64::INFINITY,
            last_ratio: f64::NAN,
            finished: false,
        }
    }

    fn step(&mut self) -> Result<()> {
        match (self.ratio)(self.k) {
            Step::Terminated => {
                self.finished = true;
                self.tail = 0.0;
            }
            Step::Pole(msg) => return Err(Error::Pole(msg)),
            Step::Next(r) => {
                let next = self.term * r;
                self.last_ratio = r.norm();
                self.k += 1;
                self.term = next;
                self.sum += next;
                self.abs_sum += next.norm();
                if next.norm() == 0.0 {
                    self.finished = true;
                    self.tail = 0.0;
                } else if self.k >= self.settled_from {
                    let rho = self.last_ratio.max(self.rho_inf);
                    self.tail = if rho < 1.0 {
                        next.norm() * rho / (1.0 - rho)
                    } else {
                        f64::INFINITY
                    };
                }
            }
        }
        Ok(())
    }

    fn run_until(&mut self, target: f64, max_terms: usize) -> Result<bool> {
        while !self.finished && !(self.tail <= target) {
            if self.k >= max_terms {
                if self.last_ratio >= 1.0 {
                    return Err(Error::NoConvergence {
                        terms: self.k,
                        ratio: self.last_ratio,
                    });
                }
                return Ok(false);
            }
            self.step()?;
        }
        Ok(true)
    }
}

/// First index `k` from which all nonzero `|p| q^k <= 1/2`.
fn settle_forward(params: &[C64], q: f64) -> usize {
    params
        .iter()
        .map(|p| p.norm())
        .filter(|&r| r > 0.5)
        .map(|r| ((0.5 / r).ln() / q.ln()).ceil().max(0.0) as usize)
        .max()
        .unwrap_or(0)
}

/// First index `m` from which all nonzero `|p| q^{-m} >= 2`.
fn settle_backward(params: &[C64], q: f64) -> usize {
    params
        .iter()
        .map(|p| p.norm())
        .filter(|&r| r > 0.0 && r < 2.0)
        .map(|r| ((r / 2.0).ln() / q.ln()).ceil().max(0.0) as usize + 1)
        .max()
        .unwrap_or(0)
}

fn forward_ratio<'a>(
    upper: &'a [C64],
    lower: &'a [C64],
    q: f64,
    z: C64,
    power: i32,
    with_qq: bool,
) -> impl FnMut(usize) -> Step + 'a {
    let mut qk = 1.0;
    let mut last_k = 0;
    move |k| {
        debug_assert_eq!(k, last_k);
        last_k += 1;
        let cur = qk;
        qk *= q;
        let mut num = z;
        for &a in upper {
            let x = a * cur;
            let f = 1.0 - x;
            if vanishes(f, x) {
                return Step::Terminated;
            }
            num *= f;
        }
        let mut den = if with_qq {
            C64::new(1.0 - cur * q, 0.0)
        } else {
            C64::new(1.0, 0.0)
        };
        for &b in lower {
            let x = b * cur;
            let f = 1.0 - x;
            if vanishes(f, x) {
                return Step::Pole(format!("lower parameter {b} hits q^-{k}"));
            }
            den *= f;
        }
        if power != 0 {
            num *= (-cur).powi(power);
        }
        Step::Next(num / den)
    }
}

/// Unilateral series `sum_k (a;q)_k / ((q;q)_k (b;q)_k) [(-1)^k q^{k(k-1)/2}]^p z^k`.
pub fn phi_series(
    spec: &HypergeometricSpec,
    z: C64,
    tol: f64,
    max_terms: usize,
) -> Result<SeriesResult> {
    check_q(spec.q)?;
    if !(tol > 0.0) {
        return domain(format!("tolerance {tol} must be positive"));
    }
    let q = spec.q;
    let p = spec.gr_factor_power;
    let rho_inf = match p {
        p if p > 0 => 0.0,
        0 => z.norm(),
        _ => f64::INFINITY,
    };
    let mut all = spec.upper.clone();
    all.extend_from_slice(&spec.lower);
    let settled = settle_forward(&all, q);
    let mut side = Side::new(
        forward_ratio(&spec.upper, &spec.lower, q, z, p, true),
        rho_inf,
        settled,
        true,
    );
    let mut ok = true;
    loop {
        let target = tol * side.sum.norm().max(1e-280);
        if side.finished || side.tail <= target {
            break;
        }
        if !side.run_until(target, max_terms)? {
            ok = false;
            break;
        }
    }
    let value = side.sum;
    let converged = ok && side.tail <= tol * value.norm().max(1.0);
    Ok(SeriesResult {
        value,
        terms_used: side.k + 1,
        tail_estimate: side.tail,
        converged,
        abs_sum: side.abs_sum,
    })
}

/// `phi_series` at the default tolerance and budget, failing unless converged.
pub fn phi(spec: &HypergeometricSpec, z: C64) -> Result<C64> {
    phi_series(spec, z, DEFAULT_TOL, DEFAULT_MAX_TERMS)?.into_value()
}

/// Bilateral series `sum_{k in Z} (a;q)_k / (b;q)_k [(-1)^k q^{k(k-1)/2}]^{s-r} z^k`.
///
/// Each direction is truncated independently by the tail rule; negative
/// indices use `(a;q)_{-n}` as defined in [`qpoch_finite`].
pub fn bilateral_psi(
    spec: &HypergeometricSpec,
    z: C64,
    tol: f64,
    max_terms: usize,
) -> Result<SeriesResult> {
    check_q(spec.q)?;
    if !(tol > 0.0) {
        return domain(format!("tolerance {tol} must be positive"));
    }
    if z.norm() == 0.0 {
        return domain("bilateral series needs a nonzero argument");
    }
    let q = spec.q;
    let p = spec.bilateral_power();
    let mut all = spec.upper.clone();
    all.extend_from_slice(&spec.lower);

    let fwd_rho = match p {
        p if p > 0 => 0.0,
        0 => z.norm(),
        _ => f64::INFINITY,
    };
    let mut pos = Side::new(
        forward_ratio(&spec.upper, &spec.lower, q, z, p, false),
        fwd_rho,
        settle_forward(&all, q),
        true,
    );

    let nz = |v: &[C64]| v.iter().filter(|x| x.norm() > 0.0).count() as i32;
    let prod_abs = |v: &[C64]| {
        v.iter()
            .filter(|x| x.norm() > 0.0)
            .map(|x| x.norm())
            .product::<f64>()
    };
    let exponent = p - (nz(&spec.lower) - nz(&spec.upper));
    let bwd_rho = match exponent {
        e if e > 0 => 0.0,
        0 => prod_abs(&spec.lower) / prod_abs(&spec.upper) / z.norm(),
        _ => f64::INFINITY,
    };
    let upper = &spec.upper;
    let lower = &spec.lower;
    let inv_q = 1.0 / q;
    let mut qm = 1.0;
    let backward = move |m: usize| {
        qm *= inv_q;
        let mut num = 1.0 / z;
        for &b in lower {
            num *= 1.0 - b * qm;
        }
        let mut den = C64::new(1.0, 0.0);
        for &a in upper {
            let x = a * qm;
            let f = 1.0 - x;
            if vanishes(f, x) {
                return Step::Pole(format!("upper parameter {a} hits q^{}", m + 1));
            }
            den *= f;
        }
        if num.norm() == 0.0 {
            return Step::Terminated;
        }
        if p != 0 {
            num *= (-q.powi(m as i32 + 1)).powi(p);
        }
        Step::Next(num / den)
    };
    let mut neg = Side::new(backward, bwd_rho, settle_backward(&all, q), false);

    let mut ok = true;
    loop {
        let total = pos.sum + neg.sum;
        let target = 0.5
            * tol
            * total
                .norm()
                .max(f64::EPSILON * (pos.abs_sum + neg.abs_sum))
                .max(1e-280);
        let pos_ok = pos.finished || pos.tail <= target;
        let neg_ok = neg.finished || neg.tail <= target;
        if pos_ok && neg_ok {
            break;
        }
        let a = pos.run_until(target, max_terms)?;
        let b = neg.run_until(target, max_terms)?;
        if !(a && b) {
            ok = false;
            break;
        }
    }
    let value = pos.sum + neg.sum;
    let tail = pos.tail + neg.tail;
    Ok(SeriesResult {
        value,
        terms_used: pos.k + 1 + neg.k,
        tail_estimate: tail,
        converged: ok && tail <= tol * value.norm().max(1.0),
        abs_sum: pos.abs_sum + neg.abs_sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use qspec_oracle::Fixed;
    use proptest::prelude::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn finite_pochhammer_examples() {
        assert!((qpoch_finite(c(0.5), 0.5, 2).unwrap() - c(0.375)).norm() < 1e-15);
        assert_eq!(qpoch_finite(c(7.3), 0.5, 0).unwrap(), c(1.0));
        assert!((qpoch_finite(c(0.25), 0.5, -1).unwrap() - c(2.0)).norm() < 1e-15);
    }

    #[test]
    fn finite_pochhammer_pole_and_domain() {
        // a q^{-1} = 1
        assert!(matches!(
            qpoch_finite(c(0.5), 0.5, -1),
            Err(Error::Pole(_))
        ));
        assert!(matches!(qpoch_finite(c(0.5), 1.5, 2), Err(Error::Domain(_))));
        assert!(matches!(qpoch_inf(c(0.5), 0.0, 1e-13), Err(Error::Domain(_))));
    }

    #[test]
    fn infinite_pochhammer_trivial_values() {
        let r = qpoch_inf(c(0.0), 0.5, 1e-13).unwrap();
        assert_eq!(r.value, c(1.0));
        let r = qpoch_inf(c(1.0), 0.5, 1e-13).unwrap();
        assert_eq!(r.value, c(0.0));
        assert!(r.converged);
    }

    #[test]
    fn infinite_pochhammer_against_extended_precision() {
        // 200 factors of (1 - 2^{-k-1}) in 256-bit fixed point
        let half = Fixed::ratio(1, 2);
        let expect = Fixed::qpoch(&half, &half, 200).to_f64();
        let r = qpoch_inf(c(0.5), 0.5, 1e-15).unwrap();
        assert!(r.converged);
        assert!((r.value.re - expect).abs() < 1e-15 * expect);
        assert!(r.tail_estimate <= 1e-15 * r.value.norm());
    }

    #[test]
    fn theta_examples() {
        assert!(theta(c(0.5), 0.5).unwrap().norm() < 1e-300);
        assert!(matches!(theta(c(0.0), 0.5), Err(Error::Domain(_))));
        // theta(-1) = (-1;q)_inf (-q;q)_inf
        let half = Fixed::ratio(1, 2);
        let m1 = Fixed::ratio(-1, 1);
        let mh = Fixed::ratio(-1, 2);
        let expect = Fixed::qpoch(&m1, &half, 300).mul(&Fixed::qpoch(&mh, &half, 300));
        let got = theta_tol(c(-1.0), 0.5, 1e-16).unwrap();
        assert!((got.re - expect.to_f64()).abs() < 1e-14 * expect.to_f64(), "{got} {}", expect.to_f64());
        assert!(got.im.abs() < 1e-15);
    }

    #[test]
    fn theta_single_shift() {
        let q = 0.5;
        let z = C64::new(0.3, 0.7);
        let lhs = theta(z * q, q).unwrap();
        let rhs = -theta(z, q).unwrap() / z;
        assert!((lhs - rhs).norm() < 1e-13 * rhs.norm());
    }

    #[test]
    fn phi_at_zero_argument() {
        let spec = HypergeometricSpec::phi21(c(0.3), c(0.2), c(0.7), 0.5).unwrap();
        let r = phi_series(&spec, c(0.0), 1e-13, 100).unwrap();
        assert_eq!(r.value, c(1.0));
    }

    #[test]
    fn terminating_two_term_phi() {
        let q = 0.5;
        let (b, cc, z) = (C64::new(0.3, 0.1), c(0.7), C64::new(0.4, -0.2));
        let spec = HypergeometricSpec::phi21(c(1.0 / q), b, cc, q).unwrap();
        let r = phi_series(&spec, z, 1e-13, 100).unwrap();
        let expect = 1.0 + (1.0 - 1.0 / q) * (1.0 - b) * z / ((1.0 - cc) * (1.0 - q));
        assert!((r.value - expect).norm() < 1e-15);
        assert_eq!(r.tail_estimate, 0.0);
        // independent of the tolerance
        let r2 = phi_series(&spec, z, 1e-3, 100).unwrap();
        assert_eq!(r.value, r2.value);
    }

    #[test]
    fn q_binomial_against_product_oracle() {
        // 1 phi 0 (a; -; q, z) = (az;q)_inf / (z;q)_inf
        let spec = HypergeometricSpec::new(vec![c(0.3)], vec![], 0.5).unwrap();
        let got = phi_series(&spec, c(0.4), 1e-15, 1000).unwrap();
        assert!(got.converged);
        let q = Fixed::ratio(1, 2);
        let az = Fixed::ratio(12, 100);
        let zz = Fixed::ratio(4, 10);
        let expect = Fixed::qpoch(&az, &q, 300)
            .div(&Fixed::qpoch(&zz, &q, 300))
            .to_f64();
        assert!((got.value.re - expect).abs() < 1e-14 * expect);
    }

    #[test]
    fn lower_parameter_pole() {
        // c = q^{-1}: (c;q)_2 vanishes before termination
        let spec = HypergeometricSpec::phi21(c(0.3), c(0.2), c(2.0), 0.5).unwrap();
        assert!(matches!(
            phi_series(&spec, c(0.1), 1e-13, 100),
            Err(Error::Pole(_))
        ));
    }

    #[test]
    fn divergent_series_reports_no_convergence() {
        let spec = HypergeometricSpec::phi21(c(0.3), c(0.2), c(0.1), 0.5).unwrap();
        assert!(matches!(
            phi_series(&spec, c(3.0), 1e-13, 200),
            Err(Error::NoConvergence { .. })
        ));
        // 3 phi 1 has a q^{-k(k-1)/2} factor and only terminates
        let spec = HypergeometricSpec::new(vec![c(0.3), c(0.2), c(0.1)], vec![c(0.4)], 0.5).unwrap();
        assert_eq!(spec.gr_factor_power, -1);
        assert!(phi_series(&spec, c(0.5), 1e-13, 200).is_err());
    }

    #[test]
    fn zero_phi_one_uses_positive_power() {
        let spec = HypergeometricSpec::new(vec![], vec![c(-0.25)], 0.5).unwrap();
        assert_eq!(spec.gr_factor_power, 2);
        // brute force: sum q^{k(k-1)} z^k / ((q;q)_k (c;q)_k)
        let (q, cc, z) = (0.5f64, c(-0.25), c(-3.0));
        let mut s = C64::new(0.0, 0.0);
        for k in 0..60i64 {
            let t = q.powi((k * (k - 1)) as i32) * z.powi(k as i32)
                / (qpoch_finite(c(q), q, k).unwrap() * qpoch_finite(cc, q, k).unwrap());
            s += t;
        }
        let got = phi(&spec, z).unwrap();
        assert!((got - s).norm() < 1e-13 * s.norm());
    }

    #[test]
    fn bilateral_reduces_to_unilateral() {
        // 2 psi 2 (a, c; q, c; z) = 1 psi 1 (a; q; z) = 1 phi 0 (a; -; z)
        let q = 0.5;
        let (a, cc, z) = (c(0.3), C64::new(0.2, 0.6), c(0.4));
        let spec = HypergeometricSpec::new(vec![a, cc], vec![c(q), cc], q).unwrap();
        let bil = bilateral_psi(&spec, z, 1e-14, 1000).unwrap();
        let uni = phi(&HypergeometricSpec::new(vec![a], vec![], q).unwrap(), z).unwrap();
        assert!((bil.value - uni).norm() < 1e-13);
    }

    #[test]
    fn ramanujan_one_psi_one() {
        // 1 psi 1 (a; b; q, z) = (q, b/a, az, q/(az); q)_inf / (b, q/a, z, b/(az); q)_inf
        let q = 0.5;
        let (a, b, z) = (c(3.0), c(0.4), c(0.5));
        let spec = HypergeometricSpec::new(vec![a], vec![b], q).unwrap();
        let got = bilateral_psi(&spec, z, 1e-14, 2000).unwrap();
        assert!(got.converged);
        let num = qpinf_prod(&[c(q), b / a, a * z, q / (a * z)], q).unwrap();
        let den = qpinf_prod(&[b, q / a, z, b / (a * z)], q).unwrap();
        assert!((got.value - num / den).norm() < 1e-12 * got.value.norm());
    }

    #[test]
    fn canonical_alpha() {
        let p = QParams::new(0.5, 3.0, 0.2).unwrap().canonicalize();
        assert!((p.alpha() - 0.75).abs() < 1e-15);
        let p = QParams::new(0.5, 0.1, 0.2).unwrap().canonicalize();
        assert!((p.alpha() - 0.8).abs() < 1e-14);
        // -alpha * gamma in q^Z
        let p = QParams::new(0.5, -0.4, 0.2).unwrap().canonicalize();
        assert!((p.alpha() - 0.625).abs() < 1e-14);
        let p = QParams::new(0.5, 1.0, 0.2).unwrap().canonicalize();
        assert_eq!(p.alpha(), 1.0);
        assert!(QParams::new(0.5, 0.0, 0.2).is_err());
        assert!(QParams::new(0.5, 1.0, -0.2).is_err());
    }

    fn cplx() -> impl Strategy<Value = C64> {
        (-1.5f64..1.5, -1.5f64..1.5).prop_map(|(a, b)| C64::new(a, b))
    }

    proptest! {
        #[test]
        fn pochhammer_splits(a in cplx(), q in 0.1f64..0.9, n in 0i64..12, m in 0i64..12) {
            let lhs = qpoch_finite(a, q, n + m).unwrap();
            let rhs = qpoch_finite(a, q, n).unwrap() * qpoch_finite(a * q.powi(n as i32), q, m).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
        }

        #[test]
        fn pochhammer_splits_negative(a in cplx(), q in 0.2f64..0.9, n in -8i64..8, m in -8i64..8) {
            // poles excluded by staying off the real axis
            let a = a + C64::new(0.0, 0.05);
            let lhs = qpoch_finite(a, q, n + m).unwrap();
            let rhs = qpoch_finite(a, q, n).unwrap() * qpoch_finite(a * q.powi(n as i32), q, m).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(1.0));
        }

        #[test]
        fn pochhammer_plus_minus(a in cplx(), q in 0.1f64..0.9, n in 0i64..15) {
            let lhs = qpoch_finite(a, q, n).unwrap() * qpoch_finite(-a, q, n).unwrap();
            let rhs = qpoch_finite(a * a, q * q, n).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
        }

        #[test]
        fn theta_quasi_periodic(re in -2.0f64..2.0, im in 0.1f64..2.0, q in 0.2f64..0.8, l in -3i32..=3) {
            let z = C64::new(re, im);
            let lhs = theta(z * q.powi(l), q).unwrap();
            let rhs = (-z).powi(-l) * q.powf(-(l * (l - 1)) as f64 / 2.0) * theta(z, q).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-11 * rhs.norm().max(1e-300));
        }

        #[test]
        fn tightening_tolerance_stays_within_tail(a in cplx(), q in 0.2f64..0.9) {
            let loose = qpoch_inf(a, q, 1e-6).unwrap();
            let tight = qpoch_inf(a, q, 1e-14).unwrap();
            prop_assert!((loose.value - tight.value).norm() <= loose.tail_estimate * (1.0 + 1e-6) + 1e-15);
        }

        #[test]
        fn converged_results_respect_tolerance(a in cplx(), b in cplx(), z in 0.05f64..0.8, q in 0.2f64..0.8) {
            let spec = HypergeometricSpec::phi21(a, b, C64::new(-0.5, 0.3), q).unwrap();
            let r = phi_series(&spec, C64::new(z, 0.1), 1e-12, 5000).unwrap();
            if r.converged {
                prop_assert!(r.tail_estimate <= 1e-12 * r.value.norm().max(1.0));
            }
        }
    }
}
