//! Scratch diagnostics for the inner splitting (not part of the test suite).
use isac_core::clup::{solve_inner, InnerSolverParams};
use isac_core::linop::{ForwardOperator, HankelLift};
use isac_core::prox::ProjectionToolkit;
use isac_core::scene::{sample_scene, synthesize, SceneConfig};
use nalgebra::DVector;
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut cfg = SceneConfig::<f64>::new(15, 9, 2, 1, 2);
    cfg.min_sep_tau = 1.0 / 15.0;
    cfg.min_sep_nu = 1.0 / 9.0;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let scene = sample_scene(&cfg, &mut rng).unwrap();
    let meas = synthesize(&scene, &mut rng).unwrap();
    let tk = ProjectionToolkit::new(ForwardOperator::from_scene(&scene).unwrap());
    let lift = HankelLift::balanced(15, 9);
    let n = tk.op().dims().n_unknown();

    // deterministic direction
    let mut state = 99u64;
    let mut c = DVector::from_element(n, Complex::new(0.0, 0.0));
    for i in 0..n {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let a = (state >> 11) as f64 / (1u64 << 53) as f64;
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let b = (state >> 11) as f64 / (1u64 << 53) as f64;
        c[i] = Complex::new(2.0 * a - 1.0, 2.0 * b - 1.0);
    }
    c /= Complex::new(c.norm(), 0.0);

    for (max_iters, step) in [(500usize, 0.1f64), (500, 0.5), (500, 2.0), (4000, 0.5)] {
        let params = InnerSolverParams { max_iters, step, ..InnerSolverParams::default() };
        let t0 = std::time::Instant::now();
        let (x, rep, _) = solve_inner(&tk, &lift, &meas.y, &c, 1e6, 1e6, &params, None).unwrap();
        let b = tk.box_bound();
        let corner = c.map(|z| Complex::new(b * z.re.signum(), b * z.im.signum()));
        let err = (x.clone() - &corner).norm();
        println!(
            "iters={} step={} converged={} res_v={:.2e} nuc_v={:.2e} box_v={:.2e} corner_err={:.3e} t={:?}",
            rep.iters, step, rep.converged, rep.residual_violation, rep.nuclear_violation,
            rep.box_violation, err, t0.elapsed()
        );
    }
}
