use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reslab::carleman::{search_tau0, ConfigSpec, GridSpec, PotentialBounds, Regularity, DEFAULT_C};
use reslab::scaling::{bound_from_certificate, fit_points, omega_map, psi_map, sweep, RegularityClass, SweepSpec};
use reslab::{Certificate, PotentialFamily};

const CANDIDATES: [RegularityClass; 3] = [
    RegularityClass::Lipschitz,
    RegularityClass::Holder { alpha: 0.5 },
    RegularityClass::LInfinity,
];

#[test]
fn noisy_holder_data_selects_holder() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let hs: Vec<f64> = (0..12).map(|i| 0.3 * 0.75f64.powi(i)).collect();
    let truth = RegularityClass::Holder { alpha: 0.5 };
    let g: Vec<f64> = hs
        .iter()
        .map(|&h| (2.0 * truth.shape(h) + 1.0) * (1.0 + 0.01 * rng.gen_range(-1.0..1.0)))
        .collect();
    let report = fit_points(&hs, &g, &CANDIDATES).unwrap();
    let best = &report.best_fit().model;
    assert_eq!(best.kind, truth);
    assert!((best.c - 2.0).abs() <= 0.1, "C = {}", best.c);
    assert!(!report.degenerate);
}

#[test]
fn free_sweep_grows_as_h_shrinks() {
    let spec = SweepSpec {
        h_values: vec![0.2, 0.1, 0.05],
        eps_values: vec![1e-2],
        ..SweepSpec::default()
    };
    let result = sweep(&spec, None).unwrap();
    let g: Vec<f64> = result.rows.iter().map(|r| r.g_measured.unwrap()).collect();
    assert!(g.windows(2).all(|w| w[1] >= w[0]), "{g:?}");
    assert_eq!(result.bound_respected, None);
}

#[test]
fn bound_survives_a_json_round_trip() {
    let model = PotentialFamily::Zero.build().unwrap();
    let bounds = PotentialBounds::from_model(&model, None);
    let config = ConfigSpec::new(Regularity::Lipschitz { beta: 2.0 }, 0.1).resolve().unwrap();
    let cert = search_tau0(&config, &bounds, DEFAULT_C, &GridSpec::default(), 4096.0).unwrap();
    let hs = [0.2, 0.1, 0.05];
    let direct = bound_from_certificate(&cert, &hs).unwrap();
    let reread = bound_from_certificate(&Certificate::from_json(&cert.to_json()).unwrap(), &hs).unwrap();
    assert_eq!(direct.points, reread.points);
    assert!(direct.points.windows(2).all(|w| w[1].g_bound > w[0].g_bound));
}

#[test]
fn maps_are_monotone() {
    for class in CANDIDATES {
        let lambdas: Vec<f64> = (1..40).map(|i| 1.5f64.powi(i)).collect();
        let psi: Vec<f64> = psi_map(class, &lambdas, 1.0).unwrap().iter().map(|p| p.psi).collect();
        assert!(psi.windows(2).all(|w| w[1] > w[0]), "{class}: {psi:?}");
        for radial in [false, true] {
            let ts: Vec<f64> = (0..40).map(|i| 20.0 * 1.5f64.powi(i)).collect();
            let omega = omega_map(class, &ts, radial).unwrap();
            assert!(omega.windows(2).all(|w| w[1] < w[0]), "{class} radial {radial}: {omega:?}");
        }
    }
}
