//! Discrete orthogonality measures on the grids `x_l(alpha)`, the norms of
//! the eigenvectors, the complement of the polynomials in `L^2` of the
//! measure, and the special cases `beta = 0` and `beta = 1/q`.
//!
//! Measures are kept unnormalized together with their closed-form total
//! mass; [`DiscreteMeasure::masses`] gives the probability normalization.

use crate::eigenfun::{psi_at_eigenvalue, EigenBranch};
use crate::error::{domain, Result};
use crate::operator::{coeff_a, coeff_b, eig, truncate};
use crate::polyrec::{grid_point, grid_x, sym_asc_all, GridPoint};
use crate::qcore::{ln_qpoch_neg, ln_qpoch_neg_inf, ln_shifted_poch, QParams, C64};

/// Half-width of the window `|l| <= L` for bilateral sums whose terms carry
/// `q^{l^2}`, widened for polynomial degree and for parameters that move
/// the peak of the weights away from `l = 0`.
pub fn window_half_width(p: &QParams, tol: f64, degree: usize) -> i64 {
    let lq = -p.q().ln();
    let base = ((-tol.ln()) / lq).sqrt().ceil() as i64 + 10;
    let mut shift = p.alpha().abs().ln().abs() / lq;
    if p.beta() > 0.0 {
        shift += 0.5 * p.beta().ln().abs() / lq;
    }
    base + 2 * degree as i64 + shift.ceil() as i64
}

fn ln_q_poch(q: f64, n: usize) -> f64 {
    let mut s = 0.0;
    let mut qk = q;
    for _ in 0..n {
        s += (-qk).ln_1p();
        qk *= q;
    }
    s
}

/// `ln (beta^n (-1/beta; q)_n)`, finite at `beta = 0`.
fn ln_beta_poch(beta: f64, q: f64, n: usize) -> f64 {
    (0..n).map(|k| (beta + q.powi(k as i32)).ln()).sum()
}

/// `ln` of the weight at `x_l(alpha)`.
pub(crate) fn ln_weight(l: i64, p: &QParams) -> f64 {
    let (q, a, b) = (p.q(), p.alpha(), p.beta());
    let a2 = a * a;
    let lf = l as f64;
    ln_shifted_poch(a2, b, q, l) - ln_qpoch_neg(a2 * b * q * q, q * q, l)
        + lf * a2.ln()
        + ln_qpoch_neg(a2 * q.powi(2 * l as i32), q, 1)
        + lf * lf * q.ln()
}

/// `ln (-alpha^2, -q/alpha^2, -beta q, q; q)_inf / (-alpha^2 beta q^2, -beta q^2/alpha^2; q^2)_inf`.
fn ln_total_mass(p: &QParams) -> f64 {
    let (q, a, b) = (p.q(), p.alpha(), p.beta());
    let a2 = a * a;
    let q2 = q * q;
    ln_qpoch_neg_inf(a2, q) + ln_qpoch_neg_inf(q / a2, q) + ln_qpoch_neg_inf(b * q, q)
        + ln_q_poch_inf(q)
        - ln_qpoch_neg_inf(a2 * b * q2, q2)
        - ln_qpoch_neg_inf(b * q2 / a2, q2)
}

fn ln_q_poch_inf(q: f64) -> f64 {
    let mut s = 0.0;
    let mut qk = q;
    while qk / (1.0 - q) > 1e-17 {
        s += (-qk).ln_1p();
        qk *= q;
    }
    s
}

/// `ln` of the squared norm of `h_n^{(beta)}` under the unnormalized measure.
fn ln_poly_norm(n: usize, p: &QParams) -> f64 {
    let q = p.q();
    ln_beta_poch(p.beta(), q, n) + ln_q_poch(q, n) - (n * n) as f64 * q.ln() + ln_total_mass(p)
}

/// Squared norm of `h_n^{(beta)}(x|q)`, `beta^n (-1/beta, q; q)_n q^{-n^2}` times the total mass.
pub fn poly_norm_sq(n: usize, p: &QParams) -> f64 {
    ln_poly_norm(n, p).exp()
}

/// Discrete measure supported on `x_l(alpha)`, `|l| <= L`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    pub params: QParams,
    pub support: Vec<GridPoint>,
    /// Unnormalized weights.
    pub weights: Vec<f64>,
    /// Closed-form sum of the weights over the whole grid.
    pub total_mass: f64,
}

impl DiscreteMeasure {
    /// Probability masses `weight_l / total_mass`.
    pub fn masses(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w / self.total_mass).collect()
    }

    pub fn window_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn half_width(&self) -> i64 {
        (self.support.len() as i64 - 1) / 2
    }

    /// `sum_l weight_l f(x_l) g(x_l)`.
    pub fn inner<F: Fn(usize) -> f64, G: Fn(usize) -> f64>(&self, f: F, g: G) -> f64 {
        (0..self.weights.len())
            .map(|i| self.weights[i] * f(i) * g(i))
            .sum()
    }
}

/// The measure restricted to `|l| <= half`.
pub fn measure_on_window(p: &QParams, half: i64) -> Result<DiscreteMeasure> {
    if half < 0 {
        return domain(format!("half-width {half} must be >= 0"));
    }
    let mut support = Vec::with_capacity(2 * half as usize + 1);
    let mut weights = Vec::with_capacity(support.capacity());
    for l in -half..=half {
        support.push(grid_point(p.alpha(), p.q(), l)?);
        weights.push(ln_weight(l, p).exp());
    }
    Ok(DiscreteMeasure {
        params: *p,
        support,
        weights,
        total_mass: ln_total_mass(p).exp(),
    })
}

pub fn build_measure(p: &QParams, tol: f64) -> Result<DiscreteMeasure> {
    check_tol(tol)?;
    measure_on_window(p, window_half_width(p, tol, 0))
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol < 1.0) {
        return domain(format!("tolerance {tol} must lie in (0, 1)"));
    }
    Ok(())
}

/// The `beta = 0` measure of the continuous `q^{-1}`-Hermite polynomials.
pub fn nextremal_hermite(alpha: f64, q: f64, tol: f64) -> Result<DiscreteMeasure> {
    build_measure(&QParams::new(q, alpha, 0.0)?, tol)
}

/// Squared norm of `h_n(x|q)` under [`nextremal_hermite`],
/// `(q;q)_n q^{-n(n+1)/2} (-alpha^2, -q/alpha^2, q; q)_inf`.
pub fn hermite_norm_sq(n: usize, alpha: f64, q: f64) -> Result<f64> {
    Ok(poly_norm_sq(n, &QParams::new(q, alpha, 0.0)?))
}

/// Squared `l^2` norm of `{psi_l(lambda)}` at `lambda = q^n` or `-beta q^{n+1}`.
pub fn norm_psi_sq(n: usize, branch: EigenBranch, p: &QParams) -> Result<f64> {
    let p = match branch {
        EigenBranch::Positive => *p,
        EigenBranch::Negative => p.dual_beta()?,
    };
    let (q, a, b) = (p.q(), p.alpha(), p.beta());
    let a2 = a * a;
    let q2 = q * q;
    let ln = (n + 1) as f64 * a2.ln() + ln_beta_poch(b, q, n) + ln_q_poch(q, n)
        - (n * n) as f64 * q.ln()
        + ln_qpoch_neg_inf(1.0 / a2, q)
        + ln_qpoch_neg_inf(b * q, q)
        + ln_q_poch_inf(q)
        + ln_qpoch_neg_inf(a2 * b * q2, q2)
        - ln_qpoch_neg_inf(a2 * q, q)
        - ln_qpoch_neg_inf(b * q2 / a2, q2);
    Ok(ln.exp())
}

/// A windowed sum compared with its closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumCheck {
    pub sum: f64,
    pub expected: f64,
    /// `|sum - expected|` over the natural scale of the check.
    pub residual: f64,
}

fn poly_table(p: &QParams, beta: f64, lo: i64, hi: i64, degree: usize) -> Result<Vec<Vec<f64>>> {
    (lo..=hi)
        .map(|l| sym_asc_all(degree, grid_x(p.alpha(), p.q(), l), beta, p.q()))
        .collect()
}

/// `sum_l weight_l h_n(x_l) h_m(x_l)` against `delta_{n,m}` times the squared
/// norm, scaled by `sqrt(norm_n norm_m)`.
pub fn check_orthogonality(n: usize, m: usize, p: &QParams, tol: f64) -> Result<SumCheck> {
    check_tol(tol)?;
    let half = window_half_width(p, tol, n.max(m));
    let deg = n.max(m);
    let h = poly_table(p, p.beta(), -half, half, deg)?;
    let sum: f64 = (-half..=half)
        .zip(&h)
        .map(|(l, hv)| ln_weight(l, p).exp() * hv[n] * hv[m])
        .sum();
    let expected = if n == m { poly_norm_sq(n, p) } else { 0.0 };
    let scale = (ln_poly_norm(n, p) + ln_poly_norm(m, p)).mul_add(0.5, 0.0).exp();
    Ok(SumCheck {
        sum,
        expected,
        residual: (sum - expected).abs() / scale,
    })
}

/// Orthogonality of `h_n^{(beta)}` with respect to the dual weight, the
/// relation of the negative eigenvalues.
pub fn check_dual_beta_orthogonality(n: usize, m: usize, p: &QParams, tol: f64) -> Result<SumCheck> {
    check_orthogonality(n, m, &p.dual_beta()?, tol)
}

/// `ln |(-1)^l alpha^{2l} (1 + alpha^2 q^{2l}) q^{l(l-1)}|`.
fn ln_mixed_weight(l: i64, p: &QParams) -> f64 {
    let (q, a) = (p.q(), p.alpha());
    let lf = l as f64;
    lf * (a * a).ln() + ln_qpoch_neg(a * a * q.powi(2 * l as i32), q, 1) + lf * (lf - 1.0) * q.ln()
}

fn sign(l: i64) -> f64 {
    if l.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Windowed value of `sum_l (-1)^l alpha^{2l} (1 + alpha^2 q^{2l}) q^{l(l-1)} f(l)`
/// and the sum of the absolute terms.
fn mixed_sum<F: Fn(i64, usize) -> f64>(p: &QParams, half: i64, f: F) -> (f64, f64) {
    let mut s = 0.0;
    let mut abs = 0.0;
    for (i, l) in (-half..=half).enumerate() {
        let t = sign(l) * ln_mixed_weight(l, p).exp() * f(l, i);
        s += t;
        abs += t.abs();
    }
    (s, abs)
}

/// `sum_l (-1)^l alpha^{2l} (1 + alpha^2 q^{2l}) q^{l(l-1)} h_n^{(beta)} h_m^{(1/(beta q^2))}`,
/// which vanishes; the residual is relative to the sum of absolute terms.
pub fn check_mixed_orthogonality(n: usize, m: usize, p: &QParams, tol: f64) -> Result<SumCheck> {
    check_tol(tol)?;
    let dual = p.dual_beta()?;
    let half = window_half_width(p, tol, n.max(m)).max(window_half_width(&dual, tol, n.max(m)));
    let hn = poly_table(p, p.beta(), -half, half, n)?;
    let hm = poly_table(p, dual.beta(), -half, half, m)?;
    let (sum, abs) = mixed_sum(p, half, |_, i| hn[i][n] * hm[i][m]);
    Ok(SumCheck {
        sum,
        expected: 0.0,
        residual: sum.abs() / abs,
    })
}

/// Moment `sum_l (-1)^l alpha^{2l} (1 + alpha^2 q^{2l}) q^{l(l-1)} x_l^k`, which vanishes.
pub fn mixed_moment(k: u32, p: &QParams, tol: f64) -> Result<SumCheck> {
    check_tol(tol)?;
    let half = window_half_width(p, tol, k as usize);
    let (sum, abs) = mixed_sum(p, half, |l, _| grid_x(p.alpha(), p.q(), l).powi(k as i32));
    Ok(SumCheck {
        sum,
        expected: 0.0,
        residual: sum.abs() / abs,
    })
}

fn require_beta(p: &QParams) -> Result<()> {
    if p.beta() == 0.0 {
        return domain("the complement of the polynomials exists only for beta > 0");
    }
    Ok(())
}

/// `ln |(-1)^l beta^{-l} q^{-l} (-alpha^2 beta q^2; q^2)_l / (-alpha^2/beta; q^2)_l|`.
fn ln_complement_factor(l: i64, p: &QParams) -> f64 {
    let (q, a, b) = (p.q(), p.alpha(), p.beta());
    let a2 = a * a;
    let lf = l as f64;
    -lf * (b * q).ln() + ln_qpoch_neg(a2 * b * q * q, q * q, l) - ln_qpoch_neg(a2 / b, q * q, l)
}

/// Grid form of the `m`-th complement function,
/// `(-1)^l beta^{-l} q^{-l} (-alpha^2 beta q^2; q^2)_l / (-alpha^2/beta; q^2)_l h_m^{(1/(beta q^2))}(x_l)`.
pub fn complement_grid(m: usize, l: i64, p: &QParams) -> Result<f64> {
    require_beta(p)?;
    let h = sym_asc_all(m, grid_x(p.alpha(), p.q(), l), 1.0 / (p.beta() * p.q() * p.q()), p.q())?;
    Ok(sign(l) * ln_complement_factor(l, p).exp() * h[m])
}

pub fn complement_basis_value(m: usize, l: i64, p: &QParams) -> Result<C64> {
    Ok(C64::new(complement_grid(m, l, p)?, 0.0))
}

/// Exponent `(i pi - log beta)/log q - 1` of the continuous complement function.
pub fn complement_exponent(beta: f64, q: f64) -> C64 {
    C64::new(-beta.ln(), std::f64::consts::PI) / q.ln() - 1.0
}

/// Continuous form
/// `Phi(sinh y) = (-e^{-2y}/beta; q^2)_inf / (-e^{-2y} beta q^2; q^2)_inf e^{-y E}`
/// with `E` from [`complement_exponent`].
pub fn complement_continuous(y: f64, beta: f64, q: f64) -> Result<C64> {
    if beta <= 0.0 {
        return domain("the complement function needs beta > 0");
    }
    let e = (-2.0 * y).exp();
    let ln = ln_qpoch_neg_inf(e / beta, q * q) - ln_qpoch_neg_inf(e * beta * q * q, q * q);
    Ok((C64::new(ln, 0.0) - y * complement_exponent(beta, q)).exp())
}

/// Gram matrix of `h_0..h_d` followed by the complements `0..d` under the
/// measure, normalized to unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct GramReport {
    pub degree: usize,
    pub matrix: Vec<Vec<f64>>,
    pub max_off_diagonal: f64,
}

pub fn gram_matrix(degree: usize, p: &QParams, tol: f64) -> Result<GramReport> {
    require_beta(p)?;
    check_tol(tol)?;
    let dual = p.dual_beta()?;
    let half = window_half_width(p, tol, degree).max(window_half_width(&dual, tol, degree));
    let h = poly_table(p, p.beta(), -half, half, degree)?;
    let hd = poly_table(p, dual.beta(), -half, half, degree)?;
    let k = 2 * (degree + 1);
    let mut g = vec![vec![0.0; k]; k];
    for (i, l) in (-half..=half).enumerate() {
        let lw = ln_weight(l, p);
        let lc = ln_complement_factor(l, p);
        // weight times the complement factor is the mixed weight; build each
        // product from logarithms so no intermediate overflows
        let f: Vec<(f64, f64)> = (0..k)
            .map(|j| {
                if j <= degree {
                    (0.0, h[i][j])
                } else {
                    (lc, sign(l) * hd[i][j - degree - 1])
                }
            })
            .collect();
        for a in 0..k {
            for b in a..k {
                let v = (lw + f[a].0 + f[b].0).exp() * f[a].1 * f[b].1;
                g[a][b] += v;
            }
        }
    }
    for a in 0..k {
        for b in 0..a {
            g[a][b] = g[b][a];
        }
    }
    let d: Vec<f64> = (0..k).map(|a| g[a][a].sqrt()).collect();
    let mut worst = 0.0f64;
    for a in 0..k {
        for b in 0..k {
            g[a][b] /= d[a] * d[b];
            if a != b {
                worst = worst.max(g[a][b].abs());
            }
        }
    }
    Ok(GramReport {
        degree,
        matrix: g,
        max_off_diagonal: worst,
    })
}

/// Squared norm of the `m`-th complement and the relative size of its
/// projection onto `span{h_0..h_degree}`.
pub fn complement_projection(m: usize, degree: usize, p: &QParams, tol: f64) -> Result<(f64, f64)> {
    require_beta(p)?;
    check_tol(tol)?;
    let dual = p.dual_beta()?;
    let half = window_half_width(p, tol, degree.max(m)).max(window_half_width(&dual, tol, degree.max(m)));
    let h = poly_table(p, p.beta(), -half, half, degree)?;
    let hd = poly_table(p, dual.beta(), -half, half, m)?;
    let mut norm = 0.0;
    let mut proj = vec![0.0; degree + 1];
    for (i, l) in (-half..=half).enumerate() {
        let lw = ln_weight(l, p);
        let lc = ln_complement_factor(l, p);
        let c = sign(l) * hd[i][m];
        norm += (lw + 2.0 * lc).exp() * c * c;
        for (n, pr) in proj.iter_mut().enumerate() {
            *pr += (lw + lc).exp() * c * h[i][n];
        }
    }
    let along: f64 = proj
        .iter()
        .enumerate()
        .map(|(n, v)| v * v / poly_norm_sq(n, p))
        .sum();
    Ok((norm, along / norm))
}

/// Dual orthogonality of the eigenvectors, summed over both eigenvalue
/// sequences up to `n_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualCheck {
    pub k: i64,
    pub l: i64,
    /// Sum of the kept terms.
    pub sum: f64,
    pub expected: f64,
    /// `|sum + tail_estimate - expected|`.
    pub residual: f64,
    /// Geometric extrapolation of the omitted terms.
    pub tail_estimate: f64,
}

/// Tail of a sequence that decays geometrically along even and odd indices
/// separately, extrapolated from the last two terms of each class.
fn parity_tail(terms: &[f64]) -> f64 {
    let n = terms.len();
    let mut tail = 0.0;
    for last in [n.wrapping_sub(1), n.wrapping_sub(2)] {
        if last >= 2 && last < n {
            let (a, b) = (terms[last - 2], terms[last]);
            let r = b / a;
            if a != 0.0 && r > 0.0 && r < 1.0 {
                tail += b * r / (1.0 - r);
            }
        }
    }
    tail
}

pub fn dual_orthogonality(k: i64, l: i64, p: &QParams, n_max: usize) -> Result<DualCheck> {
    let mut branches = vec![EigenBranch::Positive];
    if p.beta() > 0.0 {
        branches.push(EigenBranch::Negative);
    }
    let mut sum = 0.0;
    let mut tail = 0.0;
    for &b in &branches {
        let mut terms = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let t = psi_at_eigenvalue(k, n as i64, b, p)? * psi_at_eigenvalue(l, n as i64, b, p)?
                / norm_psi_sq(n, b, p)?;
            terms.push(t);
        }
        sum += terms.iter().sum::<f64>();
        tail += parity_tail(&terms);
    }
    let expected = if k == l { 1.0 } else { 0.0 };
    Ok(DualCheck {
        k,
        l,
        sum,
        expected,
        residual: (sum + tail - expected).abs(),
        tail_estimate: tail,
    })
}

/// Constancy of `mass_l / (w(x_l) sqrt(x_l^2 + 1))` for the weight function
/// `w(x) = 1/(-e^{2y}/beta, -e^{-2y}/beta; q^2)_inf`, `x = sinh y`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunctionReport {
    pub ls: Vec<i64>,
    pub constants: Vec<f64>,
    pub max_rel_deviation: f64,
    /// Largest relative difference between `w(x_l)` and its product form on the grid.
    pub grid_form_residual: f64,
}

/// `ln w(x_l)` computed from `e^{-y} = alpha q^l`.
fn ln_weight_function(l: i64, p: &QParams) -> f64 {
    let (q, a, b) = (p.q(), p.alpha(), p.beta());
    let e = a * a * q.powi(2 * l as i32);
    -ln_qpoch_neg_inf(1.0 / (e * b), q * q) - ln_qpoch_neg_inf(e / b, q * q)
}

/// `ln w(x_l)` from the product form on the grid.
fn ln_weight_function_grid(l: i64, p: &QParams) -> f64 {
    let (q, a, b) = (p.q(), p.alpha(), p.beta());
    let a2 = a * a;
    let q2 = q * q;
    let lf = l as f64;
    ln_shifted_poch(a2, b, q, l) - ln_qpoch_neg(a2 * b * q2, q2, l) + lf * a2.ln()
        + lf * (lf + 1.0) * q.ln()
        - ln_qpoch_neg_inf(1.0 / (a2 * b), q2)
        - ln_qpoch_neg_inf(a2 / b, q2)
}

pub fn weight_function_check(p: &QParams, lo: i64, hi: i64) -> Result<WeightFunctionReport> {
    require_beta(p)?;
    if hi < lo {
        return domain("empty index range");
    }
    let ls: Vec<i64> = (lo..=hi).collect();
    let mut constants = Vec::with_capacity(ls.len());
    let mut grid = 0.0f64;
    for &l in &ls {
        let lw = ln_weight_function(l, p);
        let x = grid_x(p.alpha(), p.q(), l);
        constants.push((ln_weight(l, p) - lw).exp() / x.hypot(1.0));
        grid = grid.max((lw - ln_weight_function_grid(l, p)).exp_m1().abs());
    }
    let c0 = constants[0];
    let dev = constants
        .iter()
        .map(|c| (c / c0 - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(WeightFunctionReport {
        ls,
        constants,
        max_rel_deviation: dev,
        grid_form_residual: grid,
    })
}

/// Checks of the case `beta = 1/q`, where the operator squares to a direct
/// sum of two `beta = 0` operators in base `q^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitReport {
    pub alpha: f64,
    pub q: f64,
    /// `max |b_l(alpha, 1/q)|` over the window.
    pub max_diagonal: f64,
    /// `psi_l(q^n) = (-1)^l psi_l(-q^n)`, relative.
    pub sign_flip_residual: f64,
    /// Even part of the orthogonality relation against base `q^2` at `alpha`.
    pub even_relation_residual: f64,
    /// Odd part against base `q^2` at `alpha q`.
    pub odd_relation_residual: f64,
    /// Entries of `L^2` on even indices against `L(alpha, 0 | q^2)`.
    pub even_block_residual: f64,
    /// Entries of `L^2` on odd indices against `L(alpha q, 0 | q^2)`.
    pub odd_block_residual: f64,
    /// Largest gap between the two eigenvalues of `L^2` near each `q^{2n}`.
    pub pairing_residual: f64,
}

const SPLIT_DEGREE: usize = 6;
const SPLIT_HALF_WIDTH: i64 = 20;
const SPLIT_LEVELS: i64 = 6;

pub fn beta_1q_split(alpha: f64, q: f64) -> Result<SplitReport> {
    let p = QParams::new(q, alpha, 1.0 / q)?;
    let q2 = q * q;
    let even = QParams::new(q2, alpha, 0.0)?;
    let odd = QParams::new(q2, alpha * q, 0.0)?;

    let max_diagonal = (-2 * SPLIT_HALF_WIDTH..=2 * SPLIT_HALF_WIDTH)
        .map(|l| coeff_b(l, &p).abs())
        .fold(0.0, f64::max);

    let mut sign_flip = 0.0f64;
    for n in 0..SPLIT_LEVELS {
        for l in -10..=10 {
            let a = psi_at_eigenvalue(l, n, EigenBranch::Positive, &p)?;
            let b = psi_at_eigenvalue(l, n, EigenBranch::Negative, &p)?;
            sign_flip = sign_flip.max((a - sign(l) * b).abs() / a.abs().max(f64::MIN_POSITIVE));
        }
    }

    // halves of the base-q relation; the base-q^2 relation at alpha q picks
    // up alpha^2 from the shift of the grid
    let tol = 1e-17;
    let half = window_half_width(&p, tol, SPLIT_DEGREE) + 1;
    let h = poly_table(&p, p.beta(), -half, half, SPLIT_DEGREE)?;
    let mut even_res = 0.0f64;
    let mut odd_res = 0.0f64;
    for n in 0..=SPLIT_DEGREE {
        for m in 0..=SPLIT_DEGREE {
            let (mut se, mut so) = (0.0, 0.0);
            for (i, l) in (-half..=half).enumerate() {
                let t = ln_weight(l, &p).exp() * h[i][n] * h[i][m];
                if l.rem_euclid(2) == 0 {
                    se += t;
                } else {
                    so += t;
                }
            }
            let scale_e = (poly_norm_sq(n, &even) * poly_norm_sq(m, &even)).sqrt();
            let scale_o = alpha * alpha * (poly_norm_sq(n, &odd) * poly_norm_sq(m, &odd)).sqrt();
            let (ee, eo) = if n == m {
                (poly_norm_sq(n, &even), alpha * alpha * poly_norm_sq(n, &odd))
            } else {
                (0.0, 0.0)
            };
            even_res = even_res.max((se - ee).abs() / scale_e);
            odd_res = odd_res.max((so - eo).abs() / scale_o);
        }
    }

    let (even_block, odd_block) = square_blocks(&p, &even, &odd, SPLIT_HALF_WIDTH);
    let pairing = eigen_pairing(&p)?;

    Ok(SplitReport {
        alpha,
        q,
        max_diagonal,
        sign_flip_residual: sign_flip,
        even_relation_residual: even_res,
        odd_relation_residual: odd_res,
        even_block_residual: even_block,
        odd_block_residual: odd_block,
        pairing_residual: pairing,
    })
}

/// Entrywise comparison of `L^2` restricted to even and odd indices with the
/// base-`q^2` operators, for `k = -half..=half`.
fn square_blocks(p: &QParams, even: &QParams, odd: &QParams, half: i64) -> (f64, f64) {
    // with b_l = 0, (L^2)_{l,l} = a_l^2 + a_{l-1}^2 and (L^2)_{l,l+2} = a_l a_{l+1}
    let diag = |l: i64| coeff_a(l, p).powi(2) + coeff_a(l - 1, p).powi(2) + coeff_b(l, p).powi(2);
    let off = |l: i64| coeff_a(l, p) * coeff_a(l + 1, p);
    let mut e = 0.0f64;
    let mut o = 0.0f64;
    for k in -half..=half {
        e = e.max((diag(2 * k) - coeff_b(k, even)).abs());
        e = e.max((off(2 * k) - coeff_a(k, even)).abs());
        o = o.max((diag(2 * k + 1) - coeff_b(k, odd)).abs());
        o = o.max((off(2 * k + 1) - coeff_a(k, odd)).abs());
    }
    (e, o)
}

fn eigen_pairing(p: &QParams) -> Result<f64> {
    let t = truncate(p, 60)?;
    let dec = eig(&t)?;
    let mut worst = 0.0f64;
    for n in 0..SPLIT_LEVELS {
        let lam = p.q().powi(n as i32);
        let i = dec.nearest(lam).unwrap_or(0);
        let j = dec.nearest(-lam).unwrap_or(0);
        let (a, b) = (dec.eigenvalues[i].powi(2), dec.eigenvalues[j].powi(2));
        worst = worst.max((a - b).abs()).max((a - lam * lam).abs());
    }
    Ok(worst)
}
