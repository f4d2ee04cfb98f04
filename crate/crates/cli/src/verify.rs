//! Fast self-checks of the numerical core against independent oracles.

use l1tik::functionals::{grad_j, hess_j_eps_matvec, ProblemData};
use l1tik::linalg::{dot, norm2, SparseMatrix};
use l1tik::solvers::soft_threshold;
use l1tik::tomo::{build_parallel_tomo, TomoGeometry};
use l1tik::transform::TransformSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn random_problem(rng: &mut ChaCha8Rng, rows: usize, cols: usize, alpha: f64) -> ProblemData<f64> {
    let dense: Vec<f64> = (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect();
    let a = SparseMatrix::from_dense(rows, cols, &dense).expect("rectangular");
    let y: Vec<f64> = (0..rows).map(|_| rng.random_range(-1.0..1.0)).collect();
    ProblemData::new(a, y, alpha).expect("consistent sizes")
}

pub fn run_checks(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();

    let geom = TomoGeometry::new(16, 30, 24).expect("valid geometry");
    let a = build_parallel_tomo::<f64>(&geom).expect("operator");
    let x: Vec<f64> = (0..geom.n_cols()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let y: Vec<f64> = (0..geom.n_rows()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let lhs = dot(&a.matvec(&x).unwrap(), &y);
    let rhs = dot(&x, &a.transpose_matvec(&y).unwrap());
    let gap = (lhs - rhs).abs() / (a.frobenius_norm() * norm2(&x) * norm2(&y));
    out.push(check("adjoint", gap <= 1e-12, format!("relative gap {gap:.2e}")));

    let p = random_problem(&mut rng, 12, 8, 0.3);
    let spec = TransformSpec::smoothed(0.05).expect("positive epsilon");
    let xt: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
    let g = grad_j(&p, &xt, &spec).unwrap();
    let h = 1e-6;
    let mut worst = 0.0f64;
    for k in 0..xt.len() {
        let (mut up, mut dn) = (xt.clone(), xt.clone());
        up[k] += h;
        dn[k] -= h;
        let fd = (l1tik::functionals::eval_j(&p, &up, &spec).unwrap()
            - l1tik::functionals::eval_j(&p, &dn, &spec).unwrap())
            / (2.0 * h);
        worst = worst.max((fd - g[k]).abs() / fd.abs().max(1.0));
    }
    out.push(check("gradient", worst <= 1e-5, format!("max relative deviation {worst:.2e}")));

    let v: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
    let hv = hess_j_eps_matvec(&p, &xt, &spec, &v).unwrap();
    let h = 1e-5;
    let up: Vec<f64> = xt.iter().zip(&v).map(|(a, b)| a + h * b).collect();
    let dn: Vec<f64> = xt.iter().zip(&v).map(|(a, b)| a - h * b).collect();
    let gu = grad_j(&p, &up, &spec).unwrap();
    let gd = grad_j(&p, &dn, &spec).unwrap();
    let fd: Vec<f64> = gu.iter().zip(&gd).map(|(a, b)| (a - b) / (2.0 * h)).collect();
    let diff: Vec<f64> = fd.iter().zip(&hv).map(|(a, b)| a - b).collect();
    let dev = norm2(&diff) / norm2(&fd).max(1.0);
    out.push(check("hessian", dev <= 1e-4, format!("relative deviation {dev:.2e}")));

    let samples = [-2.0, -0.3, 0.0, 0.2, 1.7];
    let theta = 0.5;
    let st = soft_threshold(&samples, theta);
    let worst = samples
        .iter()
        .zip(&st)
        .map(|(&z, &s)| {
            // Grid minimizer of (u − z)²/2 + θ|u|.
            let best = (-4000..=4000)
                .map(|k| k as f64 * 1e-3)
                .min_by(|a, b| {
                    let fa = 0.5 * (a - z) * (a - z) + theta * a.abs();
                    let fb = 0.5 * (b - z) * (b - z) + theta * b.abs();
                    fa.total_cmp(&fb)
                })
                .unwrap();
            (best - s).abs()
        })
        .fold(0.0f64, f64::max);
    out.push(check("soft-threshold", worst <= 1e-3, format!("max grid deviation {worst:.1e}")));

    let big = TomoGeometry::new(50, 180, 70).expect("valid geometry");
    let ok = (big.n_rows(), big.n_cols()) == (12600, 2500);
    out.push(check(
        "ct-shape",
        ok,
        format!("{} x {}", big.n_rows(), big.n_cols()),
    ));
    out
}
