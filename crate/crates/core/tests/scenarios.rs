use coverage_core::*;

const FIXTURES: [&str; 5] = [
    "empty_60x50",
    "wall_60x50",
    "maze_60x50",
    "random_obstacles_60x50",
    "rooms_60x50",
];

fn path(name: &str) -> String {
    format!("{}/../../scenarios/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn empty_fixture_parameters() {
    let s = Scenario::load(path("empty_60x50")).unwrap();
    let inst = s.build().unwrap();
    let bb = inst.ms.bbox();
    assert_eq!((bb.width(), bb.height()), (60.0, 50.0));
    assert!(inst.ms.obstacles().is_empty());
    assert_eq!(inst.n_agents(), 10);
    assert_eq!(inst.model.lambda, 0.02);
    assert_eq!(inst.model.delta, 80.0);
    assert_eq!(inst.grid.len(), 3000);
}

#[test]
fn fixtures_round_trip_and_build() {
    for name in FIXTURES {
        let a = Scenario::load(path(name)).unwrap();
        let b = Scenario::from_json(&a.to_json()).unwrap();
        assert_eq!(a, b, "{name}");
        let inst = b.build().unwrap();
        assert!(inst.candidates.len() >= 30, "{name}");
        assert!(inst
            .candidates
            .positions
            .iter()
            .all(|p| inst.ms.is_feasible(*p)));
    }
}

#[test]
fn every_fixture_candidate_covers_something() {
    for name in FIXTURES {
        let inst = Scenario::load(path(name)).unwrap().build().unwrap();
        let cov = inst.coverage();
        for j in 0..cov.len() {
            assert!(cov.single_value(j) > 0.0, "{name}: candidate {j}");
        }
        assert!(total_curvature(&cov).is_ok());
    }
}

#[test]
fn lazy_and_plain_greedy_agree_on_fixtures() {
    for name in FIXTURES {
        for lambda in [0.02, 0.4] {
            let inst = Scenario::load(path(name))
                .unwrap()
                .with_overrides(&Overrides {
                    lambda: Some(lambda),
                    ..Overrides::default()
                })
                .build()
                .unwrap();
            let cov = inst.coverage();
            let plain = greedy_place(&cov, inst.n_agents()).unwrap();
            let lazy = greedy_place_lazy(&cov, inst.n_agents()).unwrap();
            assert_eq!(plain.chosen, lazy.chosen, "{name} {lambda}");
            assert!(lazy.evaluations < cov.len() * inst.n_agents());
            let report =
                bound_report(&cov, &inst.grid, inst.n_agents(), AlphaDomain::Feasible).unwrap();
            assert!(report.l >= 1.0 - (-1.0f64).exp());
        }
    }
}

#[test]
fn omega_domain_forces_alpha_one_with_obstacles() {
    let inst = Scenario::load(path("maze_60x50")).unwrap().build().unwrap();
    let cov = inst.coverage();
    assert_eq!(
        elemental_curvature(&cov, &inst.grid, AlphaDomain::Omega)
            .unwrap()
            .alpha,
        1.0
    );
}

#[test]
fn weak_sensing_has_small_total_curvature() {
    let inst = Scenario::load(path("empty_60x50"))
        .unwrap()
        .with_overrides(&Overrides {
            lambda: Some(0.4),
            ..Overrides::default()
        })
        .build()
        .unwrap();
    let c = total_curvature(&inst.coverage()).unwrap().c;
    assert!(c < 0.3, "{c}");
}
