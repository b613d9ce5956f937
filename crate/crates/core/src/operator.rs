//! The doubly-infinite Jacobi operator `L(alpha, beta)` on `l^2(Z)`:
//! coefficients, symmetries, finite sections and their eigen-decomposition.
//!
//! In the orthonormal basis `e_l` the operator acts by
//! `L e_l = a_l e_{l+1} + b_l e_l + a_{l-1} e_{l-1}`.

use crate::error::{domain, Error, Result};
use crate::qcore::{QParams, DEFAULT_TOL};

/// Largest half-width the automatic truncation rule will return.
pub const MAX_HALF_WIDTH: usize = 5000;

/// Off-diagonal coefficient `a_l`.
///
/// For `l < 0` the value is taken from `a_l(alpha) = a_{-l-1}(1/alpha)`, which
/// keeps every intermediate quantity bounded.
pub fn coeff_a(l: i64, params: &QParams) -> f64 {
    if l < 0 {
        return a_nonneg(-l - 1, 1.0 / params.alpha(), params.beta(), params.q());
    }
    a_nonneg(l, params.alpha(), params.beta(), params.q())
}

fn a_nonneg(l: i64, alpha: f64, beta: f64, q: f64) -> f64 {
    let a2 = alpha * alpha;
    let e = a2 * q.powi(2 * l as i32); // alpha^2 q^{2l}
    let pre = alpha * q.powf(l as f64 + 0.5) / (1.0 + e * q);
    let rad = (beta + e) * (1.0 + beta * e * q * q) / ((1.0 + e) * (1.0 + e * q * q));
    pre * rad.sqrt()
}

/// Diagonal coefficient `b_l`, from the factored form
/// `alpha^2 (1+q)(1-beta q) q^{2l-1} / ((1 + alpha^2 q^{2l+1})(1 + alpha^2 q^{2l-1}))`.
pub fn coeff_b(l: i64, params: &QParams) -> f64 {
    let v = if l < 0 {
        b_nonneg(-l, 1.0 / params.alpha(), params.beta(), params.q())
    } else {
        b_nonneg(l, params.alpha(), params.beta(), params.q())
    };
    debug_assert!({
        let u = coeff_b_unsimplified(l, params);
        !u.is_finite() || (u - v).abs() <= 1e-13 * (1.0 + u.abs() + v.abs())
    });
    v
}

fn b_nonneg(l: i64, alpha: f64, beta: f64, q: f64) -> f64 {
    let e = alpha * alpha * q.powi(2 * l as i32);
    e * (1.0 + q) * (1.0 - beta * q) / q / ((1.0 + e * q) * (1.0 + e / q))
}

/// `b_l = 1 - A_l - B_l` with the two hopping rates of the difference
/// equation; loses relative accuracy when `b_l` is small.
pub fn coeff_b_unsimplified(l: i64, params: &QParams) -> f64 {
    let (up, down) = hopping(l, params);
    1.0 - up - down
}

/// Rates `(A_l, B_l)` of the non-symmetric difference operator: `A_l` couples
/// `x_l` to `x_{l-1}` and `B_l` couples it to `x_{l+1}`.
pub fn hopping(l: i64, params: &QParams) -> (f64, f64) {
    let (q, beta) = (params.q(), params.beta());
    let e = params.alpha().powi(2) * q.powi(2 * l as i32);
    let up = (1.0 + beta * e) / ((1.0 + e) * (1.0 + e / q));
    let down = (1.0 + beta / e) / ((1.0 + 1.0 / e) * (1.0 + 1.0 / (e * q)));
    (up, down)
}

/// Weights `h_l > 0`, `l in [lo, hi]`, with `h_0 = 1`, turning the grid
/// difference operator into the symmetric form: `a_l = B_l h_l / h_{l+1}`.
pub fn rescaling_weights(params: &QParams, lo: i64, hi: i64) -> Result<Vec<f64>> {
    if lo > 0 || hi < 0 {
        return domain("the weight range must contain l = 0");
    }
    let (q, beta) = (params.q(), params.beta());
    let a2 = params.alpha().powi(2);
    // ratio h_{l+1}^2 / h_l^2
    let ratio = |l: i64| {
        let e = a2 * q.powi(2 * l as i32);
        a2 * q.powi(2 * l as i32 + 1) * (beta + e) * (1.0 + e * q * q)
            / ((1.0 + e) * (1.0 + beta * e * q * q))
    };
    let mut out = vec![0.0; (hi - lo + 1) as usize];
    let zero = (-lo) as usize;
    out[zero] = 1.0;
    for l in 0..hi {
        let i = (l - lo) as usize;
        out[i + 1] = out[i] * ratio(l).sqrt();
    }
    for l in (lo..0).rev() {
        let i = (l - lo) as usize;
        out[i] = out[i + 1] / ratio(l).sqrt();
    }
    Ok(out)
}

/// Upper bound `2 sup|a_l| + 2 sup|b_l|` on the operator norm.
pub fn norm_bound(params: &QParams) -> f64 {
    // coefficients decay geometrically away from l = 0, so the suprema are
    // attained inside the automatic truncation window
    let n = default_half_width(params, 1e-17).max(20) as i64;
    let sa = (-n..=n).map(|l| coeff_a(l, params).abs()).fold(0.0, f64::max);
    let sb = (-n..=n).map(|l| coeff_b(l, params).abs()).fold(0.0, f64::max);
    2.0 * sa + 2.0 * sb
}

/// Smallest `N` with `max(|a_{+-N}|, |b_{+-N}|) < tol / q`.
pub fn default_half_width(params: &QParams, tol: f64) -> usize {
    let bound = tol / params.q();
    for n in 1..=MAX_HALF_WIDTH {
        let l = n as i64;
        let m = [
            coeff_a(l, params),
            coeff_a(-l, params),
            coeff_b(l, params),
            coeff_b(-l, params),
        ]
        .iter()
        .fold(0.0f64, |acc, x| acc.max(x.abs()));
        if m < bound {
            return n;
        }
    }
    MAX_HALF_WIDTH
}

/// Finite section of `L` on `span{e_{-N}, ..., e_N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    pub params: QParams,
    pub half_width: usize,
    /// `b_l` for `l = -N..=N`.
    pub diag: Vec<f64>,
    /// `a_l` for `l = -N..N`.
    pub offdiag: Vec<f64>,
}

pub fn truncate(params: &QParams, half_width: usize) -> Result<TruncatedOperator> {
    if half_width < 1 {
        return domain("truncation half-width must be >= 1");
    }
    let n = half_width as i64;
    Ok(TruncatedOperator {
        params: *params,
        half_width,
        diag: (-n..=n).map(|l| coeff_b(l, params)).collect(),
        offdiag: (-n..n).map(|l| coeff_a(l, params)).collect(),
    })
}

/// Truncation at [`default_half_width`] for the given tolerance.
pub fn truncate_auto(params: &QParams, tol: f64) -> Result<TruncatedOperator> {
    truncate(params, default_half_width(params, tol))
}

impl TruncatedOperator {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Position of `e_l` in the window.
    pub fn index(&self, l: i64) -> Option<usize> {
        let i = l + self.half_width as i64;
        (0..self.dim() as i64).contains(&i).then_some(i as usize)
    }

    /// Dense row-major copy.
    pub fn dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            m[i][i] = self.diag[i];
        }
        for (i, &a) in self.offdiag.iter().enumerate() {
            m[i][i + 1] = a;
            m[i + 1][i] = a;
        }
        m
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(v.len(), n, "vector length does not match the window");
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.offdiag[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.offdiag[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    /// Largest coefficient dropped by the truncation; bounds the distance to
    /// the zero-extended section in operator norm up to a factor 4.
    pub fn dropped_bound(&self) -> f64 {
        let n = self.half_width as i64;
        let p = &self.params;
        [
            coeff_a(n, p),
            coeff_a(-n - 1, p),
            coeff_b(n + 1, p),
            coeff_b(-n - 1, p),
        ]
        .iter()
        .fold(0.0f64, |acc, x| acc.max(x.abs()))
    }
}

/// Eigenpairs of a truncation, eigenvalues in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[j]` is the unit eigenvector for `eigenvalues[j]`.
    pub eigenvectors: Vec<Vec<f64>>,
    pub half_width: usize,
}

impl SpectralDecomposition {
    /// `max_j |T v_j - lambda_j v_j|`.
    pub fn max_residual(&self, t: &TruncatedOperator) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .map(|(&lam, v)| {
                let tv = t.apply(v);
                tv.iter()
                    .zip(v)
                    .map(|(a, b)| (a - lam * b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// `max |V^T V - I|` entrywise.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.eigenvectors.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d: f64 = self.eigenvectors[i]
                    .iter()
                    .zip(&self.eigenvectors[j])
                    .map(|(a, b)| a * b)
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((d - target).abs());
            }
        }
        worst
    }

    /// Index of the eigenvalue closest to `lambda`.
    pub fn nearest(&self, lambda: f64) -> Option<usize> {
        self.eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - lambda).abs().total_cmp(&(b.1 - lambda).abs()))
            .map(|(i, _)| i)
    }
}

const SWEEPS_PER_EIGENVALUE: usize = 60;

/// Full eigen-decomposition by the implicit-shift QL iteration.
pub fn eig(t: &TruncatedOperator) -> Result<SpectralDecomposition> {
    let (values, vectors) = tridiagonal_eigen(&t.diag, &t.offdiag)?;
    Ok(SpectralDecomposition {
        eigenvalues: values,
        eigenvectors: vectors,
        half_width: t.half_width,
    })
}

/// Eigenpairs of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (`off[i]` couples `i` and `i + 1`), sorted descending.
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = diag.len();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    if off.len() + 1 != n {
        return domain(format!(
            "off-diagonal has length {}, expected {}",
            off.len(),
            n - 1
        ));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    // v[k * n + j]: component k of the j-th vector
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > SWEEPS_PER_EIGENVALUE {
                    return Err(Error::Convergence {
                        index: l,
                        iterations: iter - 1,
                    });
                }
                // Wilkinson-type shift from the leading 2x2 block
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let row = k * n;
                        let hk = v[row + i + 1];
                        v[row + i + 1] = s * v[row + i] + c * hk;
                        v[row + i] = c * v[row + i] - s * hk;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[b].total_cmp(&d[a]));
    let values = order.iter().map(|&j| d[j]).collect();
    let vectors = order
        .iter()
        .map(|&j| (0..n).map(|k| v[k * n + j]).collect())
        .collect();
    Ok((values, vectors))
}

/// Singular values of a truncation compared with `q^{n/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    /// `|lambda|` sorted descending.
    pub singular_values: Vec<f64>,
    /// `s_n / q^{n/2}` for `n <= 2N/3`.
    pub ratios: Vec<f64>,
    pub sup_ratio: f64,
}

pub fn singular_decay(params: &QParams, half_width: usize) -> Result<DecayReport> {
    let t = truncate(params, half_width)?;
    let (values, _) = tridiagonal_eigen(&t.diag, &t.offdiag)?;
    let mut s: Vec<f64> = values.iter().map(|x| x.abs()).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    let n_max = (2 * half_width / 3).min(s.len() - 1);
    let q = params.q();
    let ratios: Vec<f64> = (0..=n_max).map(|n| s[n] / q.powf(n as f64 / 2.0)).collect();
    let sup_ratio = ratios.iter().cloned().fold(0.0, f64::max);
    Ok(DecayReport {
        singular_values: s,
        ratios,
        sup_ratio,
    })
}

/// The unitary conjugations relating operators with different parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    /// `e_l -> (-1)^l e_l`, `beta -> 1/(beta q^2)`; `-q beta L(alpha, 1/(beta q^2)) = U L U`.
    U,
    /// `e_l -> (-1)^l e_l`, `alpha -> -alpha`; `L(-alpha, beta) = U L U`.
    U2,
    /// `e_l -> e_{-l}`, `alpha -> 1/alpha`; `L(1/alpha, beta) = V L V`.
    V,
}

/// Applies the unitary to a vector indexed by `l = -N..=N` and returns the
/// partner parameters.
pub fn apply_symmetry(which: Symmetry, params: &QParams, v: &[f64]) -> Result<(Vec<f64>, QParams)> {
    if v.len() % 2 == 0 {
        return domain("window vectors have odd length 2N + 1");
    }
    let n = (v.len() / 2) as i64;
    let flip = || {
        v.iter()
            .enumerate()
            .map(|(i, x)| if (i as i64 - n) % 2 == 0 { *x } else { -*x })
            .collect::<Vec<_>>()
    };
    match which {
        Symmetry::U => Ok((flip(), params.dual_beta()?)),
        Symmetry::U2 => Ok((flip(), params.with_alpha(-params.alpha())?)),
        Symmetry::V => Ok((
            v.iter().rev().cloned().collect(),
            params.with_alpha(1.0 / params.alpha())?,
        )),
    }
}

/// `W T W` for the unitary `W` of `which`, on the same window.
pub fn conjugate(which: Symmetry, t: &TruncatedOperator) -> TruncatedOperator {
    let mut out = t.clone();
    match which {
        Symmetry::U | Symmetry::U2 => {
            for a in out.offdiag.iter_mut() {
                *a = -*a;
            }
        }
        Symmetry::V => {
            out.diag.reverse();
            out.offdiag.reverse();
        }
    }
    out
}

/// Default-tolerance convenience: the truncation used when no width is given.
pub fn auto_operator(params: &QParams) -> Result<TruncatedOperator> {
    truncate_auto(params, DEFAULT_TOL)
}
