//! Continuation-sweep behavior at small scale.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use riemann_dc::manifold::random_point;
use riemann_dc::spca::{SpcaInstance, SpcaModel, SweepOptions};

#[test]
fn capped_sweep_trend_and_schedule() {
    let inst = SpcaInstance::generate(
        21,
        20,
        30,
        2,
        SpcaModel::Capped {
            gamma_tilde: 2.0,
            upsilon: 1.0,
        },
    )
    .unwrap();
    let opts = SweepOptions {
        step_tol_coeff: 1e-6,
        obj_tol: 1e-9,
        max_outer: 500,
        ..SweepOptions::default()
    };
    let sweep = inst.continuation_capped(&opts).unwrap();
    assert!(!sweep.steps.is_empty() && sweep.steps.len() <= 21);
    // the cap sequence is geometric from 1
    for (t, step) in sweep.steps.iter().enumerate() {
        assert!((step.param - 1.5f64.powi(t as i32)).abs() < 1e-12);
    }
    // raising the cap strictly improves the ℓ0-regularized objective over
    // the υ = 1 starting model (individual steps may wobble at this scale,
    // so per-step monotonicity is not asserted)
    let objs: Vec<f64> = sweep.steps.iter().map(|s| s.metrics.obj_l0_reg).collect();
    let best = objs.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(
        best < objs[0] - 0.1 * objs[0].abs().max(1.0),
        "no improvement: {objs:?}"
    );
    assert!(
        objs.last().unwrap() < objs.first().unwrap(),
        "terminal worse than start: {objs:?}"
    );
}

#[test]
fn model_handoff_is_an_exact_penalty_shift() {
    // switching υ_t → υ_{t+1} changes F only by the evaluated penalty
    // difference at the handoff point
    let inst = SpcaInstance::generate(
        22,
        20,
        30,
        2,
        SpcaModel::Capped {
            gamma_tilde: 2.0,
            upsilon: 1.0,
        },
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let x = random_point(30, 2, &mut rng);
    for t in 0..5 {
        let a = SpcaModel::Capped {
            gamma_tilde: 2.0,
            upsilon: 1.5f64.powi(t),
        };
        let b = SpcaModel::Capped {
            gamma_tilde: 2.0,
            upsilon: 1.5f64.powi(t + 1),
        };
        let obj_a = inst.objective_for(&a);
        let obj_b = inst.objective_for(&b);
        let diff = obj_b.value(x.mat()) - obj_a.value(x.mat());
        let penalty_diff = (obj_b.h.eval(x.mat()) - obj_b.g.eval(x.mat()))
            - (obj_a.h.eval(x.mat()) - obj_a.g.eval(x.mat()));
        let scale = diff.abs().max(1.0);
        assert!((diff - penalty_diff).abs() <= 1e-12 * scale);
    }
}

#[test]
fn unit_cap_reduces_to_the_plain_l1_model() {
    // on the manifold |X_ij| ≤ 1, so min(υ|x|, 1) = υ|x| at υ = 1
    let inst = SpcaInstance::generate(23, 15, 24, 2, SpcaModel::L1 { gamma_tilde: 1.7 }).unwrap();
    let capped = inst.objective_for(&SpcaModel::Capped {
        gamma_tilde: 1.7,
        upsilon: 1.0,
    });
    let plain = inst.objective_for(&SpcaModel::L1 { gamma_tilde: 1.7 });
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..10 {
        let x = random_point(24, 2, &mut rng);
        let a = capped.value(x.mat());
        let b = plain.value(x.mat());
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }
}

#[test]
fn full_support_budget_is_penalty_free() {
    // k = nr makes the largest-k difference vanish identically; the solver
    // stays at the variance-optimal solution
    let n = 24;
    let r = 2;
    let inst = SpcaInstance::generate(
        24,
        15,
        n,
        r,
        SpcaModel::L1lk {
            gamma_tilde: 3.0,
            k: n * r,
        },
    )
    .unwrap();
    let obj = inst.objective();
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..5 {
        let x = random_point(n, r, &mut rng);
        assert!((obj.h.eval(x.mat()) - obj.g.eval(x.mat())).abs() <= 1e-10);
    }
    let (x, _trace) = inst.solve_model(None, &SweepOptions::default()).unwrap();
    let m = inst.metrics(&x);
    assert!(m.v_sc >= 1.0 - 1e-6, "v_sc {}", m.v_sc);
}
