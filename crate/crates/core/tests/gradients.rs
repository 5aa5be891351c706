use proptest::prelude::*;
use trainopt::data::gen_quadratic;
use trainopt::problems::{FfnSpec, LogisticSpec, Problem};
use trainopt::theory::for_each_subset;
use trainopt::{Matrix, Vector};

fn central_diff(f: impl Fn(&Vector) -> f64, x: &Vector, h: f64) -> Vector {
    Vector::from_fn(x.len(), |i, _| {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += h;
        xm[i] -= h;
        (f(&xp) - f(&xm)) / (2.0 * h)
    })
}

fn close(a: &Vector, b: &Vector, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1e-8)
}

fn data(n: usize, p: usize) -> impl Strategy<Value = Matrix> {
    proptest::collection::vec(-2.0f64..2.0, n * p).prop_map(move |v| Matrix::from_vec(n, p, v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn logistic_gradient(x in data(6, 3), w in proptest::collection::vec(-1.0f64..1.0, 9), lambda in 0.0f64..1.0) {
        let y = vec![0, 1, 2, 0, 1, 2];
        let spec = LogisticSpec::new(x, y, 3, lambda).unwrap();
        let w = Vector::from_vec(w);
        let batch = [0, 2, 3, 5];
        let analytic = spec.batch_loss_grad(&w, &batch).1;
        let numeric = central_diff(|w| spec.batch_loss_grad(w, &batch).0, &w, 1e-6);
        prop_assert!(close(&analytic, &numeric, 1e-6));
    }

    #[test]
    fn ffn_gradient(x in data(5, 2), seed in 0u64..1000) {
        let spec = FfnSpec::new(x, vec![0, 1, 1, 0, 1], 2, 3).unwrap();
        let w = spec.init_weights(seed);
        let batch = [0, 1, 2, 3, 4];
        let analytic = spec.batch_loss_grad(&w, &batch).1;
        let numeric = central_diff(|w| spec.batch_loss_grad(w, &batch).0, &w, 1e-6);
        prop_assert!(close(&analytic, &numeric, 1e-5));
    }

    #[test]
    fn quadratic_gradient(seed in 0u64..1000, w in proptest::collection::vec(-3.0f64..3.0, 4)) {
        let q = gen_quadratic(4, 8.0, 12, seed).unwrap();
        let w = Vector::from_vec(w);
        let numeric = central_diff(|w| q.full_loss(w), &w, 1e-5);
        prop_assert!(close(&q.full_grad(&w), &numeric, 1e-7));
        prop_assert!(close(&q.full_grad(&w), &q.full_grad_closed_form(&w), 1e-12));
    }

    #[test]
    fn ffn_minibatches_average_to_full_gradient(x in data(7, 2), seed in 0u64..1000) {
        let spec = FfnSpec::new(x, vec![0, 1, 2, 0, 1, 2, 0], 3, 2).unwrap();
        let w = spec.init_weights(seed);
        let mut sum = Vector::zeros(spec.dim());
        let mut count = 0usize;
        for_each_subset(7, 2, |b| {
            sum += spec.minibatch_grad(&w, b);
            count += 1;
        });
        prop_assert_eq!(count, 21);
        prop_assert!((sum / count as f64 - spec.full_grad(&w)).amax() <= 1e-10);
    }
}
