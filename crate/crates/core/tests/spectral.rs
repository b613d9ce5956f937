use qspec_core::eigenfun::{psi, psi_at_eigenvalue, psi_big, wronskian_closed, wronskian_numeric, EigenBranch};
use qspec_core::measures::{build_measure, norm_psi_sq};
use qspec_core::operator::{eig, truncate};
use qspec_core::polyrec::sym_asc;
use qspec_core::{QParams, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params(q: f64, a: f64, b: f64) -> QParams {
    QParams::new(q, a, b).unwrap()
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[test]
fn truncated_eigenvectors_match_closed_forms() {
    let n = 60i64;
    for p in [params(0.5, 1.0, 0.25), params(0.7, 0.8, 1.0), params(0.5, 1.0, 0.0)] {
        let t = truncate(&p, n as usize).unwrap();
        let dec = eig(&t).unwrap();
        let mut branches = vec![EigenBranch::Positive];
        if p.beta() > 0.0 {
            branches.push(EigenBranch::Negative);
        }
        for b in branches {
            for k in 0..=5 {
                let lam = b.eigenvalue(k, &p);
                let j = dec.nearest(lam).unwrap();
                assert!((dec.eigenvalues[j] - lam).abs() < 1e-9);
                let closed: Vec<f64> = (-n..=n)
                    .map(|l| psi_at_eigenvalue(l, k, b, &p).unwrap())
                    .collect();
                let c = dot(&unit(&closed), &dec.eigenvectors[j]).abs();
                assert!(c > 1.0 - 1e-6, "{p:?} {b:?} {k}: {c}");
            }
        }
    }
}

#[test]
fn rescaled_polynomials_are_eigenvectors() {
    let p = params(0.5, 0.9, 0.5);
    let m = build_measure(&p, 1e-16).unwrap();
    let n = m.half_width() as usize;
    let t = truncate(&p, n).unwrap();
    for deg in 0..4 {
        let v: Vec<f64> = m
            .support
            .iter()
            .zip(&m.weights)
            .map(|(g, w)| w.sqrt() * sym_asc(deg, g.x, p.beta(), p.q()).unwrap())
            .collect();
        let v = unit(&v);
        let tv = t.apply(&v);
        let lam = p.q().powi(deg as i32);
        let r = tv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - lam * b).abs())
            .fold(0.0, f64::max);
        assert!(r < 1e-9, "{deg}: {r}");
    }
}

#[test]
fn eigenvector_norms_match_direct_sums() {
    let p = params(0.6, 0.8, 1.3);
    for b in [EigenBranch::Positive, EigenBranch::Negative] {
        for k in 0..4 {
            let s: f64 = (-80..=80)
                .map(|l| psi_at_eigenvalue(l, k, b, &p).unwrap().powi(2))
                .sum();
            let c = norm_psi_sq(k as usize, b, &p).unwrap();
            assert!((s / c - 1.0).abs() < 1e-10, "{b:?} {k}");
        }
    }
}

#[test]
fn wronskian_on_random_annulus_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for p in [params(0.5, 1.0, 0.25), params(0.6, 0.7, 1.5), params(0.5, 0.9, 0.0)] {
        for _ in 0..20 {
            let r = rng.gen_range(1.1..3.0);
            let th = rng.gen_range(0.0..std::f64::consts::TAU);
            let z = C64::from_polar(r, th);
            let closed = wronskian_closed(z, p.q(), p.beta()).unwrap();
            let ws: Vec<C64> = (-3..=3).map(|l| wronskian_numeric(l, z, &p).unwrap()).collect();
            for w in &ws {
                assert!((w - closed).norm() < 1e-10 * closed.norm(), "{z} {w} {closed}");
                assert!((w - ws[3]).norm() < 1e-10 * ws[3].norm());
            }
        }
    }
}

#[test]
fn solutions_decay_in_opposite_directions() {
    let p = params(0.5, 0.9, 0.5);
    let z = C64::new(-1.6, 0.9);
    let right = psi(25, z, &p).unwrap().value.norm() / psi(5, z, &p).unwrap().value.norm();
    let left = psi_big(-25, z, &p).unwrap().value.norm() / psi_big(-5, z, &p).unwrap().value.norm();
    assert!(right < 1e-30 && left < 1e-30);
}
