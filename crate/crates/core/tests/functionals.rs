use l1tik::functionals::{eval_j, eval_t, grad_j, hess_j_eps_matvec, HessianOperator, ProblemData};
use l1tik::linalg::{dot, norm1, norm2, SparseMatrix};
use l1tik::transform::{apply_n, TransformSpec};
use nalgebra::DMatrix;
use proptest::prelude::*;

#[derive(Debug, Clone)]
struct Case {
    rows: usize,
    cols: usize,
    a: Vec<f64>,
    y: Vec<f64>,
    x: Vec<f64>,
    v: Vec<f64>,
    alpha: f64,
    eps: f64,
}

impl Case {
    fn problem(&self) -> ProblemData<f64> {
        let a = SparseMatrix::from_dense(self.rows, self.cols, &self.a).unwrap();
        ProblemData::new(a, self.y.clone(), self.alpha).unwrap()
    }

    fn spec(&self) -> TransformSpec<f64> {
        TransformSpec::smoothed(self.eps).unwrap()
    }
}

fn case() -> impl Strategy<Value = Case> {
    (1usize..=15, 1usize..=15).prop_flat_map(|(rows, cols)| {
        let v = |n| proptest::collection::vec(-1.0..1.0f64, n);
        (v(rows * cols), v(rows), v(cols), v(cols), 1e-2..1.0f64, -4.0..0.0f64).prop_map(
            move |(a, y, x, v, alpha, le)| Case {
                rows,
                cols,
                a,
                y,
                x,
                v,
                alpha,
                eps: 10f64.powf(le),
            },
        )
    })
}

fn rel(a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(p, q)| p - q).collect();
    norm2(&diff) / norm2(b).max(1e-8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn gradient_matches_central_differences(c in case()) {
        let (p, spec) = (c.problem(), c.spec());
        let g = grad_j(&p, &c.x, &spec).unwrap();
        let h = 1e-6;
        let fd: Vec<f64> = (0..c.cols)
            .map(|k| {
                let (mut up, mut dn) = (c.x.clone(), c.x.clone());
                up[k] += h;
                dn[k] -= h;
                (eval_j(&p, &up, &spec).unwrap() - eval_j(&p, &dn, &spec).unwrap()) / (2.0 * h)
            })
            .collect();
        prop_assert!(rel(&fd, &g) <= 1e-5, "relative error {}", rel(&fd, &g));
    }

    #[test]
    fn hessian_matches_differenced_gradient(c in case()) {
        let (p, spec) = (c.problem(), c.spec());
        let hv = hess_j_eps_matvec(&p, &c.x, &spec, &c.v).unwrap();
        let h = 1e-5;
        let up: Vec<f64> = c.x.iter().zip(&c.v).map(|(a, b)| a + h * b).collect();
        let dn: Vec<f64> = c.x.iter().zip(&c.v).map(|(a, b)| a - h * b).collect();
        let (gu, gd) = (grad_j(&p, &up, &spec).unwrap(), grad_j(&p, &dn, &spec).unwrap());
        let fd: Vec<f64> = gu.iter().zip(&gd).map(|(a, b)| (a - b) / (2.0 * h)).collect();
        prop_assert!(rel(&fd, &hv) <= 1e-4, "relative error {}", rel(&fd, &hv));
    }

    #[test]
    fn hessian_is_symmetric(c in case(), w in proptest::collection::vec(-1.0..1.0f64, 15)) {
        let (p, spec) = (c.problem(), c.spec());
        let w = &w[..c.cols];
        let hess = HessianOperator::new(&p, &c.x, &spec).unwrap();
        let lhs = dot(w, &hess.apply(&c.v).unwrap());
        let rhs = dot(&c.v, &hess.apply(w).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn coercive(c in case()) {
        let (p, spec) = (c.problem(), c.spec());
        let nx = norm2(&c.x);
        prop_assert!(eval_j(&p, &c.x, &spec).unwrap() >= c.alpha * nx * nx);
        prop_assert!(eval_j(&p, &c.x, &TransformSpec::exact()).unwrap() >= c.alpha * nx * nx);
    }

    #[test]
    fn small_negative_gradient_step_descends(c in case()) {
        let (p, spec) = (c.problem(), c.spec());
        let g = grad_j(&p, &c.x, &spec).unwrap();
        let gn = norm2(&g);
        prop_assume!(gn > 1e-6);
        let j0 = eval_j(&p, &c.x, &spec).unwrap();
        let t = 1e-6 / gn.max(1.0);
        let trial: Vec<f64> = c.x.iter().zip(&g).map(|(x, g)| x - t * g).collect();
        prop_assert!(eval_j(&p, &trial, &spec).unwrap() < j0);
    }

    #[test]
    fn exact_transform_equivalence(c in case()) {
        let p = c.problem();
        let j = eval_j(&p, &c.x, &TransformSpec::exact()).unwrap();
        let t = eval_t(&p, &apply_n(&c.x)).unwrap();
        prop_assert!((j - t).abs() <= 1e-12 * (1.0 + j.abs()));
    }

    #[test]
    fn smoothing_perturbs_j_by_order_epsilon(c in case()) {
        // |J^ε − J| ≤ ‖A‖(7/3)ε‖x‖ (2‖A N(x) − y‖ + ‖A‖(7/3)ε‖x‖).
        let (p, spec) = (c.problem(), c.spec());
        let a_norm = DMatrix::from_row_slice(c.rows, c.cols, &c.a).norm();
        let shift = a_norm * 7.0 / 3.0 * c.eps * norm2(&c.x);
        let r = norm2(&p.residual(&apply_n(&c.x)).unwrap());
        let bound = shift * (2.0 * r + shift);
        let gap = (eval_j(&p, &c.x, &spec).unwrap() - eval_j(&p, &c.x, &TransformSpec::exact()).unwrap()).abs();
        prop_assert!(gap <= bound * (1.0 + 1e-12) + 1e-14);
    }
}

#[test]
fn t_matches_one_line_oracle() {
    let a = vec![1.0, 2.0, 0.0, -1.0, 3.0, 1.0];
    let p = ProblemData::new(SparseMatrix::from_dense(2, 3, &a).unwrap(), vec![1.0, -2.0], 0.3).unwrap();
    let x = [0.5, -1.0, 2.0];
    let ax = [1.0 * 0.5 + 2.0 * -1.0, -1.0 * 0.5 + 3.0 * -1.0 + 1.0 * 2.0];
    let oracle = (ax[0] - 1.0f64).powi(2) + (ax[1] + 2.0f64).powi(2) + 0.3 * norm1(&x);
    assert!((eval_t(&p, &x).unwrap() - oracle).abs() < 1e-14);
}

#[test]
fn dense_hessian_oracle() {
    // Assemble 2H(x, Aᵀr) + 2GAᵀAG + 2αI densely and compare with the operator.
    let (rows, cols) = (4, 3);
    let a: Vec<f64> = (0..rows * cols).map(|k| ((k * 7 % 5) as f64 - 2.0) / 2.0).collect();
    let y = vec![0.3, -0.7, 1.1, 0.2];
    let (alpha, eps) = (0.2, 0.5);
    let p = ProblemData::new(SparseMatrix::from_dense(rows, cols, &a).unwrap(), y.clone(), alpha).unwrap();
    let spec = TransformSpec::smoothed(eps).unwrap();
    let x = vec![0.2, -1.0, 0.7];

    let am = DMatrix::from_row_slice(rows, cols, &a);
    let nx = nalgebra::DVector::from_iterator(cols, x.iter().map(|&t| spec.value(t)));
    let r = &am * nx - nalgebra::DVector::from_vec(y);
    let atr = am.transpose() * r;
    let g = DMatrix::from_fn(cols, cols, |i, j| if i == j { spec.first_derivative(x[i]) } else { 0.0 });
    let h = DMatrix::from_fn(cols, cols, |i, j| {
        if i == j { spec.second_derivative(x[i]).unwrap() * atr[i] } else { 0.0 }
    });
    let full = (h + &g * am.transpose() * &am * &g + DMatrix::identity(cols, cols) * alpha) * 2.0;
    for k in 0..cols {
        let mut e = vec![0.0; cols];
        e[k] = 1.0;
        let col = hess_j_eps_matvec(&p, &x, &spec, &e).unwrap();
        for i in 0..cols {
            assert!((col[i] - full[(i, k)]).abs() < 1e-12, "({i},{k})");
        }
    }
}
