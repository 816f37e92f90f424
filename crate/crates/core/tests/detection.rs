//! Detector-conditioned outputs of full devices.

use std::f64::consts::PI;

use gqsd::detectors::{
    conditional_density_matrix, nu_from_dark_rate, truncation_fidelity, DetectorKind, DetectorModel, OutcomeLabel,
};
use gqsd::evolution::evolve_gqsd;
use gqsd::fock::embed_input;
use gqsd::{Complex64, Error, GqsdSpec, InputField, MeasurementEvent};

fn quartit_point() -> GqsdSpec {
    GqsdSpec::with_transmittances([0.78494, 0.69001, 1.0, 0.87451, 0.70185])
        .unwrap()
        .with_xi(5, PI)
}

fn five_level_point() -> GqsdSpec {
    GqsdSpec::with_transmittances([0.30464, 0.38775, 1.0, 0.81740, 0.18438])
        .unwrap()
        .with_xi(4, PI)
}

#[test]
fn outcome_probabilities_sum_to_one() {
    let spec = quartit_point();
    let field = InputField::fock_expansion(vec![
        Complex64::new(0.6, 0.0),
        Complex64::new(0.0, 0.5),
        Complex64::new(0.4, 0.1),
        Complex64::new(0.2, -0.3),
    ])
    .unwrap();
    let input = embed_input(&field, 3, &[(0, 1), (1, 1), (2, 1)], 4).unwrap();
    let output = evolve_gqsd(&input, &spec).unwrap();
    let photons = 6;
    for kind in DetectorKind::ALL {
        for (eta, nu) in [(1.0, 0.0), (0.7, 1e-6), (0.5, 0.05)] {
            let m = DetectorModel::new(kind, eta, nu).unwrap();
            // Dark counts can push readings past the photon number.
            let family = m.outcome_family(photons + 12);
            let mut total = 0.0;
            for a in &family {
                for b in &family {
                    for c in &family {
                        match conditional_density_matrix(&output, &[m; 3], &[*a, *b, *c]) {
                            Ok((_, p)) => total += p,
                            Err(Error::ZeroProbability(_)) => {}
                            Err(e) => panic!("{e}"),
                        }
                    }
                }
            }
            assert!((total - 1.0).abs() < 1e-9, "{kind:?} eta {eta} nu {nu}: total {total}");
        }
    }
}

#[test]
fn imperfections_never_beat_ideal_counting() {
    let field = InputField::coherent(Complex64::new(0.4, 0.0));
    let cases = [
        (quartit_point(), MeasurementEvent::quartit()),
        (five_level_point(), MeasurementEvent::new([1, 2, 1], [1, 2, 1]).unwrap()),
    ];
    for (spec, ev) in cases {
        let ideal = DetectorModel::ideal(DetectorKind::NumberResolving);
        let best = truncation_fidelity(&spec, &ev, &field, &[ideal; 3]).unwrap().fidelity;
        assert!((best - 1.0).abs() < 1e-9, "ideal fidelity {best}");
        for eta in [0.5, 0.7, 0.88, 0.95, 1.0] {
            for rate in [0.0, 100.0, 1e4, 1e6] {
                if eta == 1.0 && rate == 0.0 {
                    continue;
                }
                let nu = nu_from_dark_rate(rate, 10e-9).unwrap();
                let m = DetectorModel::new(DetectorKind::NumberResolving, eta, nu).unwrap();
                let f = truncation_fidelity(&spec, &ev, &field, &[m; 3]).unwrap().fidelity;
                assert!(f <= best + 1e-12, "eta {eta}, rate {rate}: {f} > {best}");
            }
        }
    }
}

#[test]
fn ideal_detectors_of_every_kind_are_faithful_for_single_photon_counts() {
    let field = InputField::coherent(Complex64::new(0.4, 0.0));
    let spec = quartit_point();
    for kind in DetectorKind::ALL {
        let m = DetectorModel::ideal(kind);
        let r = truncation_fidelity(&spec, &MeasurementEvent::quartit(), &field, &[m; 3]).unwrap();
        // A conventional click also accepts higher counts, which leak in at this α.
        let floor = if kind == DetectorKind::Conventional {
            0.9
        } else {
            1.0 - 1e-9
        };
        assert!(r.fidelity >= floor, "{kind:?}: {}", r.fidelity);
    }
}

#[test]
fn five_level_fidelity_ordering_at_the_working_point() {
    let field = InputField::coherent(Complex64::new(0.4, 0.0));
    let spec = five_level_point();
    let ev = MeasurementEvent::new([1, 2, 1], [1, 2, 1]).unwrap();
    let nu = nu_from_dark_rate(1e4, 10e-9).unwrap();
    let f = |kind| {
        let m = DetectorModel::new(kind, 0.88, nu).unwrap();
        truncation_fidelity(&spec, &ev, &field, &[m; 3]).unwrap().fidelity
    };
    let conventional = {
        let m = DetectorModel::new(
            DetectorKind::Conventional,
            0.7,
            nu_from_dark_rate(100.0, 10e-9).unwrap(),
        )
        .unwrap();
        truncation_fidelity(&spec, &ev, &field, &[m; 3]).unwrap().fidelity
    };
    assert!(conventional < f(DetectorKind::SinglePhotonResolving));
    assert!(f(DetectorKind::SinglePhotonResolving) < f(DetectorKind::NumberResolving));
    assert_eq!(DetectorKind::Conventional.outcome_for_count(2), OutcomeLabel::Click);
}
