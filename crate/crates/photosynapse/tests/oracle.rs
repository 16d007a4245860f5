//! Closed-form segment updates versus an independent adaptive Runge–Kutta
//! integration of the same pool equations.

mod common;

use photosynapse::kinetics::{simulate, step_segment, PulseTrain};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn single_segment_matches_rk_oracle() {
    // saturable fill under constant light: h starts empty, fills toward
    // equilibrium; closed form must track the integrator to 1e-9
    let mut dev = photosynapse::kinetics::scn_inhibitory_default();
    dev.pools[0].fill_coeff = 0.01;
    dev.pools[0].capacity = 1.0;
    let taus: Vec<f64> = dev.pools.iter().map(|p| p.tau_at(300.0).unwrap()).collect();

    let state = dev.dark_state(300.0);
    let stepped = step_segment(&state, &dev, 40.0, 1.0).unwrap();
    let reference = common::rk_integrate_segment(&dev, &taus, 40.0, &state.occupancies, 1.0);
    for (a, b) in stepped.occupancies.iter().zip(&reference) {
        let rel = (a - b).abs() / b.abs().max(1e-300);
        assert!(rel <= 1e-9, "closed form {a} vs RK {b} (rel {rel:.2e})");
    }
}

#[test]
fn random_programs_match_rk_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..25 {
        let dev = common::random_device(&mut rng);
        let train = common::random_train(&mut rng, 40.0);
        let temperature = rand::Rng::gen_range(&mut rng, 80.0..400.0);
        let trace = simulate(&dev, &train, temperature, 0.5, 50.0).unwrap();
        let reference = common::rk_simulate(&dev, &train, temperature, 0.5, 50.0);
        assert_eq!(trace.len(), reference.len(), "case {case}");
        for (s, (t_ref, i_ref)) in trace.samples.iter().zip(&reference) {
            assert!((s.t - t_ref).abs() < 1e-9);
            let rel = (s.current - i_ref).abs() / i_ref.abs().max(1e-300);
            assert!(
                rel <= 1e-6,
                "case {case} t={}: {} vs {} (rel {rel:.2e})",
                s.t,
                s.current,
                i_ref
            );
        }
    }
}

#[test]
fn dark_decay_matches_rk_after_illumination() {
    let dev = photosynapse::kinetics::scn_mg_excitatory_default();
    let train = PulseTrain::uniform(0.0, 10, 1.0, 2.0, 40.0).unwrap();
    let trace = simulate(&dev, &train, 300.0, 2.0, 600.0).unwrap();
    let reference = common::rk_simulate(&dev, &train, 300.0, 2.0, 600.0);
    for (s, (_, i_ref)) in trace.samples.iter().zip(&reference) {
        let rel = (s.current - i_ref).abs() / i_ref.abs();
        assert!(rel <= 1e-6, "t={}: rel {rel:.2e}", s.t);
    }
}
