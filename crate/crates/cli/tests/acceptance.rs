//! Acceptance criteria 1-12. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64 as C64;
use qspec_core::eigenfun::{psi_at_eigenvalue, wronskian_closed, wronskian_numeric, EigenBranch};
use qspec_core::identities::{stable_under_halving, IdentityKind};
use qspec_core::measures::{
    beta_1q_split, check_dual_beta_orthogonality, check_mixed_orthogonality, check_orthogonality,
    dual_orthogonality, gram_matrix, mixed_moment,
};
use qspec_core::operator::{conjugate, eig, singular_decay, tridiagonal_eigen, truncate, Symmetry, TruncatedOperator};
use qspec_core::{QParams, DEFAULT_TOL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn params(q: f64, a: f64, b: f64) -> QParams {
    QParams::new(q, a, b).unwrap()
}

fn spectrum_sets() -> [QParams; 3] {
    [params(0.5, 1.0, 0.25), params(0.7, 0.8, 1.0), params(0.5, 1.0, 0.0)]
}

fn by_magnitude(values: &[f64], positive: bool) -> Vec<f64> {
    let mut v: Vec<f64> = values
        .iter()
        .copied()
        .filter(|x| if positive { *x > 0.0 } else { *x < 0.0 })
        .collect();
    v.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    v
}

fn spectrum_location() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for p in spectrum_sets() {
        let t = truncate(&p, 60).unwrap();
        let (values, _) = tridiagonal_eigen(&t.diag, &t.offdiag).unwrap();
        let pos = by_magnitude(&values, true);
        let neg = by_magnitude(&values, false);
        for n in 0..8 {
            let exact = EigenBranch::Positive.eigenvalue(n as i64, &p);
            worst = worst.max((pos.get(n).copied().unwrap_or(f64::NAN) - exact).abs());
            if p.beta() > 0.0 {
                let exact = EigenBranch::Negative.eigenvalue(n as i64, &p);
                worst = worst.max((neg.get(n).copied().unwrap_or(f64::NAN) - exact).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst < 1e-9 && secs < 2.0, format!("max deviation {worst:.2e}, {secs:.2} s"))
}

fn wronskian() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut closed_err, mut spread) = (0.0f64, 0.0f64);
    for p in [params(0.5, 1.0, 0.25), params(0.6, 0.7, 1.5), params(0.5, 0.9, 0.0)] {
        let mut count = 0;
        while count < 20 {
            let z = C64::from_polar(rng.gen_range(1.1..3.0), rng.gen_range(0.0..std::f64::consts::TAU));
            let closed = wronskian_closed(z, p.q(), p.beta()).unwrap();
            if closed.norm() < 1e-3 {
                continue;
            }
            count += 1;
            let w0 = wronskian_numeric(-3, z, &p).unwrap();
            for l in -3..=3 {
                let w = wronskian_numeric(l, z, &p).unwrap();
                closed_err = closed_err.max((w - closed).norm() / closed.norm());
                spread = spread.max((w - w0).norm() / w0.norm());
            }
        }
    }
    outcome(
        closed_err < 1e-10 && spread < 1e-10,
        format!("closed form {closed_err:.2e}, l-independence {spread:.2e}"),
    )
}

fn orthogonality() -> Outcome {
    let p = params(0.5, 1.0, 0.5);
    let (mut direct, mut dual) = (0.0f64, 0.0f64);
    for n in 0..=8 {
        for m in 0..=8 {
            direct = direct.max(check_orthogonality(n, m, &p, DEFAULT_TOL).unwrap().residual);
            dual = dual.max(check_dual_beta_orthogonality(n, m, &p, DEFAULT_TOL).unwrap().residual);
        }
    }
    outcome(
        direct < 1e-10 && dual < 1e-10,
        format!("beta {direct:.2e}, 1/(beta q^2) {dual:.2e}"),
    )
}

fn mixed() -> Outcome {
    let p = params(0.5, 1.0, 0.5);
    let mut orth = 0.0f64;
    for n in 0..=6 {
        for m in 0..=6 {
            orth = orth.max(check_mixed_orthogonality(n, m, &p, DEFAULT_TOL).unwrap().residual);
        }
    }
    let moment = (0..=6).map(|k| mixed_moment(k, &p, DEFAULT_TOL).unwrap().residual).fold(0.0, f64::max);
    outcome(orth < 1e-10 && moment < 1e-11, format!("relation {orth:.2e}, moments {moment:.2e}"))
}

fn basis() -> Outcome {
    let p = params(0.5, 1.0, 0.5);
    let g = gram_matrix(6, &p, DEFAULT_TOL).unwrap();
    // entries are normalized by sqrt(G_aa G_bb); a nonpositive raw diagonal
    // would leave a NaN or a value other than 1 on the diagonal
    let diag_ok = g.matrix.len() == 14 && (0..14).all(|i| (g.matrix[i][i] - 1.0).abs() < 1e-12);
    outcome(
        diag_ok && g.max_off_diagonal < 1e-9,
        format!("14x14 Gram, max off-diagonal {:.2e}, diagonal positive {diag_ok}", g.max_off_diagonal),
    )
}

fn max_entry_diff(a: &TruncatedOperator, b: &TruncatedOperator, scale: f64) -> f64 {
    let d = a.diag.iter().zip(&b.diag).map(|(x, y)| (x - scale * y).abs());
    let o = a.offdiag.iter().zip(&b.offdiag).map(|(x, y)| (x - scale * y).abs());
    d.chain(o).fold(0.0, f64::max)
}

fn symmetries() -> Outcome {
    let mut worst = 0.0f64;
    for p in [params(0.5, 0.8, 0.3), params(0.7, 1.3, 1.2), params(0.4, 2.0, 0.05)] {
        let t = truncate(&p, 20).unwrap();
        assert_eq!(t.dim(), 41);
        let d = truncate(&p.dual_beta().unwrap(), 20).unwrap();
        worst = worst.max(max_entry_diff(&conjugate(Symmetry::U, &t), &d, -p.q() * p.beta()));
        let d = truncate(&p.with_alpha(-p.alpha()).unwrap(), 20).unwrap();
        worst = worst.max(max_entry_diff(&conjugate(Symmetry::U2, &t), &d, 1.0));
        let d = truncate(&p.with_alpha(1.0 / p.alpha()).unwrap(), 20).unwrap();
        worst = worst.max(max_entry_diff(&conjugate(Symmetry::V, &t), &d, 1.0));
    }
    outcome(worst < 1e-13, format!("max entry difference {worst:.2e}"))
}

fn split() -> Outcome {
    let (mut diag, mut block, mut pairing) = (0.0f64, 0.0f64, 0.0f64);
    for (a, q) in [(1.0, 0.5), (0.8, 0.6), (1.7, 0.45)] {
        let s = beta_1q_split(a, q).unwrap();
        diag = diag.max(s.max_diagonal);
        block = block.max(s.even_block_residual).max(s.odd_block_residual);
        pairing = pairing.max(s.pairing_residual);
    }
    outcome(
        diag < 1e-15 && block < 1e-12 && pairing < 1e-9,
        format!("max |b_l| {diag:.2e}, blocks {block:.2e}, pairing {pairing:.2e}"),
    )
}

fn singular_values() -> Outcome {
    let mut worst = 0.0f64;
    let mut pass = true;
    for p in spectrum_sets() {
        let c = (p.beta() * p.q()).max(1.0) * (1.0 + 1e-6);
        let r = singular_decay(&p, 60).unwrap();
        let sup = r.ratios.iter().take(41).cloned().fold(0.0, f64::max);
        pass &= r.ratios.len() >= 41 && sup <= c;
        worst = worst.max(sup / c);
    }
    outcome(pass, format!("max s_n / (C q^(n/2)) over n <= 40: {worst:.6}"))
}

fn identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    let mut stable = true;
    let mut count = 0;
    for kind in IdentityKind::ALL {
        for _ in 0..8 {
            let u: Vec<f64> = (0..kind.default_box().len()).map(|_| rng.gen()).collect();
            let x = kind.point(&u).unwrap();
            let s = stable_under_halving(|t| kind.evaluate(&x, t), DEFAULT_TOL, 1e-9).unwrap();
            worst = worst.max(s.at_tol.scaled_residual).max(s.at_half_tol.scaled_residual);
            stable &= s.stable;
            count += 1;
        }
    }
    outcome(
        worst < 1e-9 && stable,
        format!("{count} points over {} identities, max scaled {worst:.2e}, stable {stable}", IdentityKind::ALL.len()),
    )
}

fn dual() -> Outcome {
    let p = params(0.5, 1.0, 0.5);
    let mut worst = 0.0f64;
    for k in -2..=2 {
        for l in -2..=2 {
            worst = worst.max(dual_orthogonality(k, l, &p, 25).unwrap().residual);
        }
    }
    outcome(worst < 1e-9, format!("max residual {worst:.2e}"))
}

fn eigenvectors() -> Outcome {
    let n = 60i64;
    let mut worst = 1.0f64;
    for p in spectrum_sets() {
        let dec = eig(&truncate(&p, n as usize).unwrap()).unwrap();
        let mut branches = vec![EigenBranch::Positive];
        if p.beta() > 0.0 {
            branches.push(EigenBranch::Negative);
        }
        for b in branches {
            for k in 0..=5 {
                let j = dec.nearest(b.eigenvalue(k, &p)).unwrap();
                let v: Vec<f64> = (-n..=n).map(|l| psi_at_eigenvalue(l, k, b, &p).unwrap()).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                let c = v.iter().zip(&dec.eigenvectors[j]).map(|(x, y)| x * y).sum::<f64>() / norm;
                worst = worst.min(c.abs());
            }
        }
    }
    outcome(worst > 1.0 - 1e-6, format!("min |cos| {worst:.12}"))
}

fn qspec(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_qspec"))
        .args(args)
        .env_remove("QSPEC_TOL")
        .output()
        .expect("qspec runs")
        .status
        .code()
        .unwrap_or(-1)
}

fn cli_contract() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let runs: [&[&str]; 4] = [
        &["spectrum", "--levels", "8"],
        &["measure", "--gram-degree", "4", "--format", "csv"],
        &["verify", "wronskian", "--seed", "11", "--jobs", "3"],
        &["verify", "genfun", "--seed", "5", "--jobs", "2"],
    ];
    let mut identical = true;
    for (i, args) in runs.iter().enumerate() {
        let (a, b) = (path(&format!("{i}a")), path(&format!("{i}b")));
        for out in [&a, &b] {
            let mut full = args.to_vec();
            full.extend(["--output", out.as_str()]);
            identical &= qspec(&full) == 0;
        }
        identical &= read(Path::new(&a)) == read(Path::new(&b));
    }
    let ok = qspec(&["verify", "psi4", "-o", &path("ok")]);
    let injected = qspec(&["verify", "psi4", "--threshold", "1e-30", "-o", &path("fail")]);
    let bad_q = qspec(&["spectrum", "--q", "1.5"]);
    let bad_suite = qspec(&["verify", "nosuch"]);
    let codes = ok == 0 && injected == 1 && bad_q == 2 && bad_suite == 2;
    outcome(
        identical && codes,
        format!("byte-identical {identical}, exit codes ok={ok} injected={injected} config={bad_q} usage={bad_suite}"),
    )
}

fn read(p: &Path) -> Vec<u8> {
    std::fs::read(p).unwrap_or_default()
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("spectrum location", spectrum_location),
        ("wronskian", wronskian),
        ("orthogonality", orthogonality),
        ("mixed orthogonality", mixed),
        ("basis", basis),
        ("symmetries", symmetries),
        ("beta = 1/q split", split),
        ("singular-value decay", singular_values),
        ("identities", identities),
        ("dual orthogonality", dual),
        ("eigenvector match", eigenvectors),
        ("cli determinism and exit codes", cli_contract),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag}: {name}: {}", i + 1, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
