//! The `spectrum` and `measure` commands.

use anyhow::Result;
use qspec_core::eigenfun::EigenBranch;
use qspec_core::measures::{measure_on_window, window_half_width};
use qspec_core::operator::{tridiagonal_eigen, truncate};
use qspec_core::polyrec::sym_asc_all;
use serde_json::{Map, Value};

use crate::config::{HalfWidth, RunConfig};
use crate::output::{float, Table};

/// Truncation eigenvalues of one sign, ordered by decreasing magnitude.
fn branch_values(values: &[f64], branch: EigenBranch) -> Vec<f64> {
    let mut v: Vec<f64> = match branch {
        EigenBranch::Positive => values.iter().copied().filter(|x| *x > 0.0).collect(),
        EigenBranch::Negative => values.iter().copied().filter(|x| *x < 0.0).collect(),
    };
    v.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    v
}

/// The `k`-th positive eigenvalue of the truncation is compared with `q^k`
/// and the `k`-th most negative with `-beta q^{k+1}`.
pub fn spectrum(config: &RunConfig, levels: usize) -> Result<(Table, usize)> {
    let p = &config.params;
    let n = config.operator_half_width();
    let t = truncate(p, n)?;
    let (values, _) = tridiagonal_eigen(&t.diag, &t.offdiag)?;

    let mut branches = vec![EigenBranch::Positive];
    if p.beta() > 0.0 {
        branches.push(EigenBranch::Negative);
    }
    let mut table = Table::new(&["branch", "n", "predicted", "computed", "deviation"]);
    let mut worst = 0.0f64;
    for b in branches {
        let computed = branch_values(&values, b);
        let name = match b {
            EigenBranch::Positive => "positive",
            EigenBranch::Negative => "negative",
        };
        for k in 0..levels {
            let predicted = b.eigenvalue(k as i64, p);
            let c = computed.get(k).copied().unwrap_or(f64::NAN);
            let dev = (c - predicted).abs();
            worst = if dev.is_nan() { f64::NAN } else { worst.max(dev) };
            table.push(vec![name.into(), (k as i64).into(), predicted.into(), c.into(), dev.into()]);
        }
    }
    let mut s = Map::new();
    s.insert("dimension".into(), Value::from(t.dim()));
    s.insert("max_deviation".into(), float(worst));
    s.insert("dropped_coefficient_bound".into(), float(t.dropped_bound()));
    s.insert("eigenvalues".into(), Value::Array(values.iter().map(|x| float(*x)).collect()));
    table.summary = Some(s);
    Ok((table, n))
}

/// Support points and probability masses; with `gram_degree`, the Gram
/// matrix of `h_0..h_d` under the emitted masses.
pub fn measure(config: &RunConfig, gram_degree: Option<usize>) -> Result<(Table, i64)> {
    let p = &config.params;
    let half = match config.half_width {
        HalfWidth::Auto => window_half_width(p, config.tol, gram_degree.unwrap_or(0)),
        HalfWidth::Fixed(n) => n as i64,
    };
    let m = measure_on_window(p, half)?;
    let masses = m.masses();

    let mut table = Table::new(&["l", "x", "mass"]);
    for (g, w) in m.support.iter().zip(&masses) {
        table.push(vec![g.k.into(), g.x.into(), (*w).into()]);
    }
    let mut s = Map::new();
    s.insert("total_mass".into(), float(m.total_mass));
    s.insert("mass_sum".into(), float(masses.iter().sum()));
    s.insert("support_size".into(), Value::from(m.support.len()));

    if let Some(d) = gram_degree {
        let h: Vec<Vec<f64>> = m
            .support
            .iter()
            .map(|g| sym_asc_all(d, g.x, p.beta(), p.q()))
            .collect::<qspec_core::Result<_>>()?;
        let mut gram = vec![vec![0.0; d + 1]; d + 1];
        for (hv, w) in h.iter().zip(&masses) {
            for a in 0..=d {
                for b in 0..=d {
                    gram[a][b] += w * hv[a] * hv[b];
                }
            }
        }
        let mut worst = 0.0f64;
        for a in 0..=d {
            for b in 0..=d {
                if a != b {
                    worst = worst.max(gram[a][b].abs() / (gram[a][a] * gram[b][b]).sqrt());
                }
            }
        }
        let rows = gram
            .iter()
            .map(|r| Value::Array(r.iter().map(|x| float(*x)).collect()))
            .collect();
        s.insert("gram".into(), Value::Array(rows));
        s.insert("gram_max_scaled_off_diagonal".into(), float(worst));
    }
    table.summary = Some(s);
    Ok((table, half))
}
