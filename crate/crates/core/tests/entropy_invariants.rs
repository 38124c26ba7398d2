//! Consistency of the entropy balance: the discrete time derivative of
//! the Boltzmann entropy matches the instantaneous dissipation terms up to
//! the expected discretization error, and the signed terms keep their
//! signs on arbitrary states.

use btsim_core::brinkman::BrinkmanOperator;
use btsim_core::dynamics::{
    build_profile, simulate, velocity, Profile, SimulationSpec, State, StepConfig,
};
use btsim_core::entropy;
use btsim_core::params::{Backend, ModelParams};
use btsim_core::Grid1D;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pair_params(eps: f64) -> btsim_core::ValidatedParams {
    ModelParams {
        n: 2,
        a: vec![1.0, 0.4, 0.4, 0.8],
        b0: vec![1.0, 1.2],
        b: vec![1.5, 0.3, 0.3, 1.5],
        sigma: 0.3,
        eps,
        backend: Backend::Nonlocal,
    }
    .validate()
    .unwrap()
}

/// Evolves to a smooth positive state, then measures the entropy balance
/// defect `|(H1(t+dt) - H1(t))/dt - (-fisher - rao + rhs)|` at one step.
fn balance_defect(m: usize, dt: f64, reactions: bool) -> f64 {
    let grid = Grid1D::new(-1.0, 1.0, m).unwrap();
    let params = pair_params(0.2);
    let op = BrinkmanOperator::assemble(&grid, 0.2).unwrap();
    let initial = vec![
        build_profile(
            &grid,
            &Profile::Gaussian {
                base: 0.5,
                amplitude: 0.8,
                center: -0.2,
                width: 0.25,
            },
        )
        .unwrap(),
        build_profile(
            &grid,
            &Profile::Gaussian {
                base: 0.6,
                amplitude: 0.5,
                center: 0.3,
                width: 0.3,
            },
        )
        .unwrap(),
    ];
    let spec = SimulationSpec {
        grid: grid.clone(),
        params: params.clone(),
        initial,
        t_final: 0.05,
        dt_max: 1e-4,
        output_every: 0.05,
        reactions_enabled: reactions,
    };
    let mut smooth: Option<State> = None;
    simulate(&spec, |state, _| {
        smooth = Some(state.clone());
        Ok(())
    })
    .unwrap();
    let state = smooth.unwrap();

    let before = entropy::boltzmann(&grid, &state.u);
    let terms = entropy::dissipation(&grid, &params, &state.u, Some(&op)).unwrap();
    let v = velocity(&grid, &params, &state.u, Some(&op)).unwrap();
    let next = btsim_core::dynamics::step(
        &grid,
        &params,
        &state,
        &v,
        StepConfig {
            dt,
            reactions_enabled: reactions,
        },
    )
    .unwrap();
    let after = entropy::boltzmann(&grid, &next.u);

    let fd = (after - before) / dt;
    let model = if reactions {
        -(terms.fisher + terms.rao + terms.reaction) + terms.rhs
    } else {
        -(terms.fisher + terms.rao)
    };
    (fd - model).abs()
}

#[test]
fn entropy_balance_defect_shrinks_under_refinement() {
    for &reactions in &[false, true] {
        let coarse = balance_defect(48, 2e-6, reactions);
        let fine = balance_defect(96, 5e-7, reactions);
        assert!(
            coarse < 0.2,
            "reactions={reactions}: coarse defect {coarse} out of scale"
        );
        assert!(
            coarse / fine > 1.3,
            "reactions={reactions}: defect did not shrink ({coarse} -> {fine})"
        );
    }
}

#[test]
fn dissipation_terms_keep_their_signs_on_random_states() {
    let m = 40;
    let grid = Grid1D::new(-1.0, 1.0, m).unwrap();
    let params = pair_params(0.1);
    let op = BrinkmanOperator::assemble(&grid, 0.1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for _ in 0..30 {
        let u: Vec<Vec<f64>> = (0..2)
            .map(|_| (0..m).map(|_| rng.random_range(0.0..2.5)).collect())
            .collect();
        let terms = entropy::dissipation(&grid, &params, &u, Some(&op)).unwrap();
        assert!(terms.fisher >= 0.0);
        assert!(terms.rao >= -1e-12 * (1.0 + terms.rao.abs()));

        let h2 = entropy::rao(&grid, &params, &u, Some(&op)).unwrap();
        assert!(h2 >= 0.0);

        let h1_rel = entropy::boltzmann_relative(&grid, &u, &[0.6, 0.7]).unwrap();
        assert!(h1_rel >= 0.0);
    }
}

/// The relative entropy against the coexistence state decays along a run
/// even when monitored densely (every step lands on an output).
#[test]
fn relative_entropy_decays_densely_monitored() {
    let m = 48;
    let grid = Grid1D::new(-1.0, 1.0, m).unwrap();
    let params = ModelParams {
        n: 1,
        a: vec![1.0],
        b0: vec![1.0],
        b: vec![1.0],
        sigma: 0.4,
        eps: 0.1,
        backend: Backend::Nonlocal,
    }
    .validate()
    .unwrap();
    let initial = vec![build_profile(
        &grid,
        &Profile::Gaussian {
            base: 1.0,
            amplitude: 0.4,
            center: 0.0,
            width: 0.3,
        },
    )
    .unwrap()];
    let spec = SimulationSpec {
        grid,
        params,
        initial,
        t_final: 0.5,
        dt_max: 2e-3,
        output_every: 2e-3,
        reactions_enabled: true,
    };
    let mut previous = f64::INFINITY;
    simulate(&spec, |_, rec| {
        let h = rec.h1_rel.expect("positive steady state");
        assert!(h <= previous * (1.0 + 1e-9) + 1e-12);
        previous = h;
        Ok(())
    })
    .unwrap();
    assert!(previous < 0.05);
}
