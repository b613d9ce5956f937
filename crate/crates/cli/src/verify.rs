//! Verification suites. Each suite is a list of independent tasks; a task
//! yields one or more checks, and a check passes when its scaled residual
//! is below its threshold.

use anyhow::Result;
use num_complex::Complex64 as C64;
use qspec_core::eigenfun::{wronskian_closed, wronskian_numeric};
use qspec_core::identities::{
    mixed_summation, stable_under_halving, summation_grid_route, IdentityKind, IdentityReport,
};
use qspec_core::measures::{
    beta_1q_split, check_dual_beta_orthogonality, check_mixed_orthogonality, check_orthogonality,
    dual_orthogonality, gram_matrix, mixed_moment, SumCheck,
};
use qspec_core::operator::{conjugate, truncate, Symmetry, TruncatedOperator};
use qspec_core::polyrec::verify_diffeq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{HalfWidth, RunConfig};
use crate::output::{fmt_float, Table};

/// Parameter points drawn per sampled identity.
pub const SAMPLES: usize = 5;
const WRONSKIAN_POINTS: usize = 20;
const SYMMETRY_HALF_WIDTH: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Wronskian,
    Orthogonality,
    Mixed,
    Basis,
    Dual,
    Contiguous,
    Bailey,
    Psi4,
    Genfun,
    Symmetries,
    #[value(name = "split-beta-1q")]
    SplitBeta1q,
    Diffeq,
}

impl Suite {
    pub fn requires_beta(&self) -> bool {
        matches!(self, Suite::Mixed | Suite::Basis)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: String,
    pub point: String,
    pub lhs: C64,
    pub rhs: C64,
    pub abs_residual: f64,
    pub scaled_residual: f64,
    pub threshold: f64,
    pub note: String,
}

fn fmt_c(z: C64) -> String {
    if z.im == 0.0 {
        fmt_float(z.re)
    } else {
        let sign = if z.im.is_sign_negative() { "" } else { "+" };
        format!("{}{sign}{}i", fmt_float(z.re), fmt_float(z.im))
    }
}

fn point(pairs: &[(&str, f64)]) -> String {
    pairs
        .iter()
        .map(|(k, v)| format!("{k}={}", fmt_float(*v)))
        .collect::<Vec<_>>()
        .join(";")
}

impl Check {
    fn from_report(r: &IdentityReport, threshold: f64) -> Check {
        Check {
            id: r.identity_id.clone(),
            point: r
                .parameter_point
                .iter()
                .map(|(k, v)| format!("{k}={}", fmt_c(*v)))
                .collect::<Vec<_>>()
                .join(";"),
            lhs: r.lhs,
            rhs: r.rhs,
            abs_residual: r.abs_residual,
            scaled_residual: r.scaled_residual,
            threshold,
            note: String::new(),
        }
    }

    fn from_sum(id: &str, point: String, s: &SumCheck, threshold: f64) -> Check {
        Check {
            id: id.into(),
            point,
            lhs: s.sum.into(),
            rhs: s.expected.into(),
            abs_residual: (s.sum - s.expected).abs(),
            scaled_residual: s.residual,
            threshold,
            note: String::new(),
        }
    }

    /// A residual that is already a single number.
    fn residual(id: &str, point: String, r: f64, threshold: f64) -> Check {
        Check {
            id: id.into(),
            point,
            lhs: r.into(),
            rhs: 0.0.into(),
            abs_residual: r,
            scaled_residual: r,
            threshold,
            note: String::new(),
        }
    }

    fn error(id: &str, point: String, e: impl std::fmt::Display) -> Check {
        Check {
            id: id.into(),
            point,
            lhs: C64::new(f64::NAN, f64::NAN),
            rhs: C64::new(f64::NAN, f64::NAN),
            abs_residual: f64::NAN,
            scaled_residual: f64::NAN,
            threshold: 0.0,
            note: e.to_string(),
        }
    }

    pub fn passes(&self, threshold: Option<f64>) -> bool {
        self.note.is_empty() && self.scaled_residual < threshold.unwrap_or(self.threshold)
    }
}

type Task = Box<dyn Fn() -> Vec<Check> + Send + Sync>;

/// Runs `f`, turning an error into a single failing check.
fn task<F>(id: &'static str, point: String, f: F) -> Task
where
    F: Fn() -> qspec_core::Result<Vec<Check>> + Send + Sync + 'static,
{
    Box::new(move || f().unwrap_or_else(|e| vec![Check::error(id, point.clone(), e)]))
}

fn sampled(kinds: &[IdentityKind], rng: &mut ChaCha8Rng, tol: f64, threshold: f64) -> Vec<Task> {
    let mut tasks = Vec::new();
    for &kind in kinds {
        for _ in 0..SAMPLES {
            let u: Vec<f64> = (0..kind.default_box().len()).map(|_| rng.gen()).collect();
            let x = kind.point(&u).expect("unit-cube point has the box dimension");
            let label = point(
                &kind
                    .default_box()
                    .iter()
                    .zip(&x)
                    .map(|((k, _, _), v)| (*k, *v))
                    .collect::<Vec<_>>(),
            );
            tasks.push(task(kind.name(), label.clone(), move || {
                let s = stable_under_halving(|t| kind.evaluate(&x, t), tol, threshold)?;
                let ra = s.at_tol.scaled_residual;
                let rb = s.at_half_tol.scaled_residual;
                let halving = Check {
                    id: format!("{}:halving", kind.name()),
                    point: label.clone(),
                    lhs: ra.into(),
                    rhs: rb.into(),
                    abs_residual: (ra - rb).abs(),
                    scaled_residual: (ra - rb).abs() / ra.max(threshold),
                    threshold: 1e-2,
                    note: String::new(),
                };
                Ok(vec![Check::from_report(&s.at_tol, threshold), halving])
            }));
        }
    }
    tasks
}

fn entrywise(a: &TruncatedOperator, b: &TruncatedOperator, scale: f64) -> f64 {
    let d = a.diag.iter().zip(&b.diag).map(|(x, y)| (x - scale * y).abs());
    let o = a.offdiag.iter().zip(&b.offdiag).map(|(x, y)| (x - scale * y).abs());
    d.chain(o).fold(0.0, f64::max)
}

fn tasks(suite: Suite, config: &RunConfig) -> Result<Vec<Task>> {
    let p = config.params;
    let tol = config.tol;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut out: Vec<Task> = Vec::new();
    match suite {
        Suite::Wronskian => {
            // the closed form vanishes at z = -beta q^{k+1}
            let near_zero = |z: C64| {
                (0..200).any(|k| {
                    let w = -p.beta() * p.q().powi(k + 1);
                    (z - w).norm() < 0.05 * z.norm()
                })
            };
            let mut zs = Vec::new();
            while zs.len() < WRONSKIAN_POINTS {
                let z = C64::from_polar(rng.gen_range(1.1..3.0), rng.gen_range(0.0..std::f64::consts::TAU));
                if !near_zero(z) {
                    zs.push(z);
                }
            }
            for z in zs {
                let label = format!("z={}", fmt_c(z));
                out.push(task("wronskian", label.clone(), move || {
                    let closed = wronskian_closed(z, p.q(), p.beta())?;
                    let mut v = Vec::new();
                    let mut first = None;
                    for l in -3..=3 {
                        let w = wronskian_numeric(l, z, &p)?;
                        let pt = &[("z", z), ("l", C64::from(l as f64))];
                        v.push(Check::from_report(&IdentityReport::new("wronskian", pt, w, closed, 0.0), 1e-10));
                        let w0 = *first.get_or_insert(w);
                        v.push(Check::from_report(
                            &IdentityReport::new("wronskian:l_independence", pt, w, w0, 0.0),
                            1e-10,
                        ));
                    }
                    Ok(v)
                }));
            }
        }
        Suite::Orthogonality => {
            for n in 0..=8usize {
                out.push(task("orthogonality", point(&[("n", n as f64)]), move || {
                    let mut v = Vec::new();
                    for m in 0..=8usize {
                        let pt = point(&[("n", n as f64), ("m", m as f64)]);
                        let s = check_orthogonality(n, m, &p, tol)?;
                        v.push(Check::from_sum("orthogonality", pt.clone(), &s, 1e-10));
                        if p.beta() > 0.0 {
                            let s = check_dual_beta_orthogonality(n, m, &p, tol)?;
                            v.push(Check::from_sum("orthogonality:dual_beta", pt, &s, 1e-10));
                        }
                    }
                    Ok(v)
                }));
            }
        }
        Suite::Mixed => {
            for n in 0..=6usize {
                out.push(task("mixed_orthogonality", point(&[("n", n as f64)]), move || {
                    (0..=6usize)
                        .map(|m| {
                            let s = check_mixed_orthogonality(n, m, &p, tol)?;
                            let pt = point(&[("n", n as f64), ("m", m as f64)]);
                            Ok(Check::from_sum("mixed_orthogonality", pt, &s, 1e-10))
                        })
                        .collect()
                }));
            }
            for k in 0..=6u32 {
                let pt = point(&[("k", k as f64)]);
                out.push(task("mixed_moment", pt.clone(), move || {
                    let s = mixed_moment(k, &p, tol)?;
                    Ok(vec![Check::from_sum("mixed_moment", pt.clone(), &s, 1e-11)])
                }));
            }
        }
        Suite::Basis => {
            out.push(task("gram", String::new(), move || {
                let g = gram_matrix(6, &p, tol)?;
                let k = g.matrix.len();
                let mut v = Vec::new();
                for a in 0..k {
                    for b in a..k {
                        let pt = point(&[("i", a as f64), ("j", b as f64)]);
                        let x = g.matrix[a][b];
                        v.push(if a == b {
                            Check {
                                rhs: 1.0.into(),
                                abs_residual: (x - 1.0).abs(),
                                scaled_residual: (x - 1.0).abs(),
                                ..Check::residual("gram:diagonal", pt, x, 1e-9)
                            }
                        } else {
                            Check::residual("gram:off_diagonal", pt, x.abs(), 1e-9)
                        });
                    }
                }
                Ok(v)
            }));
        }
        Suite::Dual => {
            for k in -2..=2i64 {
                for l in -2..=2i64 {
                    let pt = point(&[("k", k as f64), ("l", l as f64)]);
                    out.push(task("dual_orthogonality", pt.clone(), move || {
                        let d = dual_orthogonality(k, l, &p, 25)?;
                        let s = SumCheck {
                            sum: d.sum + d.tail_estimate,
                            expected: d.expected,
                            residual: d.residual,
                        };
                        Ok(vec![Check::from_sum("dual_orthogonality", pt.clone(), &s, 1e-9)])
                    }));
                }
            }
        }
        Suite::Contiguous => {
            let kinds = [IdentityKind::Contiguous3Term, IdentityKind::ContiguousShift, IdentityKind::Heine];
            out = sampled(&kinds, &mut rng, tol, 1e-9);
        }
        Suite::Bailey => {
            out = sampled(&[IdentityKind::Bailey, IdentityKind::Theta], &mut rng, tol, 1e-9);
            if p.beta() > 0.0 {
                let (t1, t2) = (C64::from(0.3), C64::from(0.4));
                out.push(task("summation_grid_route", String::new(), move || {
                    let r = summation_grid_route(&p, t1, t2, 40, 80, tol)?;
                    Ok(vec![Check::from_report(&r, 1e-9)])
                }));
                out.push(task("mixed_summation", String::new(), move || {
                    let r = mixed_summation(&p, t1, t2, 80, tol)?;
                    Ok(vec![Check::from_report(&r, 1e-9)])
                }));
            }
        }
        Suite::Psi4 => out = sampled(&[IdentityKind::Psi4], &mut rng, tol, 1e-10),
        Suite::Genfun => out = sampled(&[IdentityKind::GeneratingFunction], &mut rng, tol, 1e-9),
        Suite::Symmetries => {
            let n = match config.half_width {
                HalfWidth::Auto => SYMMETRY_HALF_WIDTH,
                HalfWidth::Fixed(n) => n,
            };
            let label = point(&[("half_width", n as f64)]);
            out.push(task("symmetries", label.clone(), move || {
                let t = truncate(&p, n)?;
                let mut v = Vec::new();
                if p.beta() > 0.0 {
                    let d = truncate(&p.dual_beta()?, n)?;
                    let r = entrywise(&conjugate(Symmetry::U, &t), &d, -p.q() * p.beta());
                    v.push(Check::residual("symmetry:beta_inversion", label.clone(), r, 1e-13));
                }
                let d = truncate(&p.with_alpha(-p.alpha())?, n)?;
                let r = entrywise(&conjugate(Symmetry::U2, &t), &d, 1.0);
                v.push(Check::residual("symmetry:alpha_negation", label.clone(), r, 1e-13));
                let d = truncate(&p.with_alpha(1.0 / p.alpha())?, n)?;
                let r = entrywise(&conjugate(Symmetry::V, &t), &d, 1.0);
                v.push(Check::residual("symmetry:alpha_inversion", label.clone(), r, 1e-13));
                Ok(v)
            }));
        }
        Suite::SplitBeta1q => {
            let (a, q) = (p.alpha(), p.q());
            let label = point(&[("alpha", a), ("q", q), ("beta", 1.0 / q)]);
            out.push(task("split_beta_1q", label.clone(), move || {
                let s = beta_1q_split(a, q)?;
                let rows = [
                    ("split:diagonal_vanishes", s.max_diagonal, 1e-12),
                    ("split:eigenvector_sign_flip", s.sign_flip_residual, 1e-12),
                    ("split:even_orthogonality", s.even_relation_residual, 1e-10),
                    ("split:odd_orthogonality", s.odd_relation_residual, 1e-10),
                    ("split:even_block", s.even_block_residual, 1e-12),
                    ("split:odd_block", s.odd_block_residual, 1e-12),
                    ("split:eigenvalue_pairing", s.pairing_residual, 1e-9),
                ];
                Ok(rows
                    .iter()
                    .map(|(id, r, t)| Check::residual(id, label.clone(), *r, *t))
                    .collect())
            }));
        }
        Suite::Diffeq => {
            for n in 0..=8i64 {
                let pt = point(&[("n", n as f64), ("window", 20.0)]);
                out.push(task("diffeq", pt.clone(), move || {
                    let r = verify_diffeq(n, &p, 20)?;
                    Ok(vec![Check::residual("diffeq", pt.clone(), r.max_scaled_residual, 1e-9)])
                }));
            }
        }
    }
    Ok(out)
}

/// Runs a suite on `config.jobs` threads. Results keep task order, so the
/// artifact does not depend on scheduling.
pub fn run(suite: Suite, config: &RunConfig) -> Result<Vec<Check>> {
    let tasks = tasks(suite, config)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.jobs).build()?;
    let nested: Vec<Vec<Check>> = pool.install(|| tasks.par_iter().map(|t| t()).collect());
    Ok(nested.into_iter().flatten().collect())
}

pub fn table(checks: &[Check], threshold: Option<f64>) -> Table {
    let mut t = Table::new(&[
        "check",
        "point",
        "lhs_re",
        "lhs_im",
        "rhs_re",
        "rhs_im",
        "abs_residual",
        "scaled_residual",
        "threshold",
        "pass",
        "note",
    ]);
    for c in checks {
        t.push(vec![
            c.id.clone().into(),
            c.point.clone().into(),
            c.lhs.re.into(),
            c.lhs.im.into(),
            c.rhs.re.into(),
            c.rhs.im.into(),
            c.abs_residual.into(),
            c.scaled_residual.into(),
            threshold.unwrap_or(c.threshold).into(),
            c.passes(threshold).into(),
            c.note.clone().into(),
        ]);
    }
    let failed = checks.iter().filter(|c| !c.passes(threshold)).count();
    let worst = checks
        .iter()
        .map(|c| c.scaled_residual)
        .fold(0.0f64, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) });
    let mut s = serde_json::Map::new();
    s.insert("checks".into(), checks.len().into());
    s.insert("failed".into(), failed.into());
    s.insert("max_scaled_residual".into(), crate::output::float(worst));
    t.summary = Some(s);
    t
}
