//! Invariants over random images, circuits and distributions.

mod common;

use proptest::prelude::*;

use common::*;
use frqi::circuit::{circuit_from_text, circuit_to_text, depth, unitary_of, Circuit, CouplingMap, CuAngles, Gate};
use frqi::image::{
    encode_pgm, gray_to_angles, parse_pgm, probs_to_image, relative_difference, DecodeVariant, EncodingMode, Image,
};
use frqi::sim::{
    exact_calibration, exact_probabilities, mitigate_distribution, CalibrationOptions, Counts, NoiseModel, SimConfig,
};
use frqi::transpile::{lower, route, Placement};

const NQ: u32 = 5;

fn image(max_n: u32) -> impl Strategy<Value = Image> {
    (1..=max_n).prop_flat_map(|n| {
        let side = 1usize << n;
        proptest::collection::vec(any::<u8>(), side * side).prop_map(move |px| Image::new(side, px).unwrap())
    })
}

fn angle() -> impl Strategy<Value = f64> {
    -4.0..4.0f64
}

/// `k` distinct qubits below `NQ`.
fn distinct(k: usize) -> impl Strategy<Value = Vec<u32>> {
    Just((0..NQ).collect::<Vec<u32>>())
        .prop_shuffle()
        .prop_map(move |v| v[..k].to_vec())
}

fn gate() -> impl Strategy<Value = Gate> {
    prop_oneof![
        distinct(1).prop_map(|q| Gate::x(q[0])),
        distinct(1).prop_map(|q| Gate::sx(q[0])),
        distinct(1).prop_map(|q| Gate::h(q[0])),
        (distinct(1), angle()).prop_map(|(q, t)| Gate::ry(q[0], t)),
        (distinct(1), angle()).prop_map(|(q, t)| Gate::rz(q[0], t)),
        distinct(2).prop_map(|q| Gate::cx(q[0], q[1])),
        distinct(2).prop_map(|q| Gate::swap(q[0], q[1])),
        (distinct(2), angle(), angle(), angle(), angle()).prop_map(|(q, theta, phi, lambda, gamma)| {
            Gate::cu(
                q[0],
                q[1],
                CuAngles {
                    theta,
                    phi,
                    lambda,
                    gamma,
                },
            )
        }),
        distinct(3).prop_map(|q| Gate::rccx(q[0], q[1], q[2])),
        distinct(4).prop_map(|q| Gate::rcccx(q[0], q[1], q[2], q[3])),
        (1..=4usize, angle())
            .prop_flat_map(|(k, t)| (distinct(k + 1), Just(t)))
            .prop_map(|(q, t)| Gate::mcry(t, &q[1..], q[0])),
        (prop_oneof![Just(2usize), Just(4)], angle())
            .prop_flat_map(|(k, t)| (distinct(k + 1), Just(t)))
            .prop_map(|(q, t)| Gate::mary(t, &q[1..], q[0])),
    ]
}

fn circuit(max_len: usize) -> impl Strategy<Value = Circuit> {
    proptest::collection::vec(gate(), 0..max_len).prop_map(|g| Circuit::from_gates(NQ, g).unwrap())
}

fn probs(q: u32) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.0..1.0f64, 1 << q).prop_filter_map("zero mass", |v| {
        let total: f64 = v.iter().sum();
        (total > 1e-3).then(|| v.iter().map(|x| x / total).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn codec_round_trips_through_the_exact_state(
        img in image(4),
        mode in prop_oneof![Just(EncodingMode::Linear), Just(EncodingMode::Arcsin)],
        decode in prop_oneof![Just(DecodeVariant::Ratio), Just(DecodeVariant::Scaled)],
    ) {
        let n = img.exponent();
        let angles = gray_to_angles(&img, mode);
        let p = frqi_reference(n, angles.thetas());
        let out = probs_to_image(&p, n, mode, decode).unwrap();
        prop_assert_eq!(&out.image, &img);
        prop_assert!(out.zero_mass_pixels.is_empty());
        prop_assert_eq!(relative_difference(&img, &out.image).unwrap(), 0.0);
    }

    #[test]
    fn angles_stay_in_the_first_quadrant(img in image(3)) {
        for mode in [EncodingMode::Linear, EncodingMode::Arcsin] {
            let a = gray_to_angles(&img, mode);
            prop_assert!(a.thetas().iter().all(|t| (0.0..=std::f64::consts::FRAC_PI_2).contains(t)));
        }
    }

    #[test]
    fn relative_difference_is_a_bounded_metric(a in image(2), seed in any::<u64>()) {
        let px: Vec<u8> = a.pixels().iter().map(|p| p.wrapping_add(seed as u8)).collect();
        let b = Image::new(a.side(), px).unwrap();
        let d = relative_difference(&a, &b).unwrap();
        prop_assert!((0.0..=100.0).contains(&d));
        prop_assert_eq!(d, relative_difference(&b, &a).unwrap());
        prop_assert_eq!(relative_difference(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn pgm_round_trip(img in image(4)) {
        prop_assert_eq!(parse_pgm(&encode_pgm(&img)).unwrap(), img);
    }

    #[test]
    fn depth_is_subadditive(a in circuit(12), b in circuit(12)) {
        let mut joined = a.gates().to_vec();
        joined.extend_from_slice(b.gates());
        let ab = Circuit::from_gates(NQ, joined).unwrap();
        prop_assert!(depth(&ab) <= depth(&a) + depth(&b));
        prop_assert!(depth(&ab) >= depth(&a).max(depth(&b)));
        prop_assert!(depth(&ab) <= ab.len());
    }

    #[test]
    fn circuits_are_unitary(c in circuit(10)) {
        let u = unitary_of(&c).unwrap();
        prop_assert!(unitarity_gap(&u) < 1e-10);
    }

    #[test]
    fn simulation_preserves_norm(c in circuit(24)) {
        let d = exact_probabilities(&c, &SimConfig::default()).unwrap();
        prop_assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn lowering_is_idempotent_and_magnitude_preserving(c in circuit(8)) {
        let low = lower(&c);
        prop_assert!(low.is_basis());
        let again = lower(&low);
        prop_assert_eq!(again.gates(), low.gates());
        // composites are only defined up to relative phases, so compare magnitudes
        // gate by gate where the whole product would mix them
        for g in c.gates() {
            let one = Circuit::from_gates(NQ, vec![g.clone()]).unwrap();
            let gap = magnitude_gap(&unitary_of(&one).unwrap(), &unitary_of(&lower(&one)).unwrap());
            prop_assert!(gap < 1e-10, "{:?}: {}", g.kind, gap);
        }
    }

    #[test]
    fn lowering_is_exact_up_to_phase_without_relative_phase_gates(
        c in proptest::collection::vec(gate(), 0..10).prop_map(|g| {
            let g = g.into_iter().filter(|g| !matches!(g.kind,
                frqi::GateKind::Rccx | frqi::GateKind::Rcccx | frqi::GateKind::Mary { .. })).collect();
            Circuit::from_gates(NQ, g).unwrap()
        })
    ) {
        let gap = phase_gap(&unitary_of(&c).unwrap(), &unitary_of(&lower(&c)).unwrap());
        prop_assert!(gap < 1e-9);
    }

    #[test]
    fn routing_preserves_distributions(c in circuit(10), line in any::<bool>()) {
        let low = lower(&c);
        let map = if line { CouplingMap::line(NQ + 1) } else { frqi::circuit::Backend::ALL[0].coupling_map() };
        let routed = route(&low, &map, &Placement::Auto).unwrap();
        for g in routed.circuit.gates().iter().filter(|g| g.qubits.len() == 2) {
            prop_assert!(map.is_edge(g.qubits[0], g.qubits[1]));
        }
        let (compact, index) = routed.compact();
        let cfg = SimConfig::default();
        let got = routed.logical_distribution(exact_probabilities(&compact, &cfg).unwrap().probs(), &index);
        let want = exact_probabilities(&low, &cfg).unwrap();
        for (a, b) in got.iter().zip(want.probs()) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn text_round_trip(c in circuit(20)) {
        let back = circuit_from_text(&circuit_to_text(&c)).unwrap();
        prop_assert_eq!(back.num_qubits(), c.num_qubits());
        prop_assert_eq!(back.gates(), c.gates());
    }

    #[test]
    fn mitigation_inverts_readout_noise(p in 0.0..0.3f64, (q, truth) in (1u32..=4).prop_flat_map(|q| (Just(q), probs(q)))) {
        let cal = exact_calibration(q, &NoiseModel::readout_only(p).unwrap(), CalibrationOptions::default()).unwrap();
        for col in 0..1usize << q {
            let s: f64 = (0..1usize << q).map(|r| cal.get(r, col)).sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
        let back = mitigate_distribution(&cal.apply(&truth), &cal).unwrap();
        for (a, b) in back.probs().iter().zip(&truth) {
            prop_assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn mitigated_output_is_a_distribution(p in 0.0..0.45f64, (q, raw) in (1u32..=3).prop_flat_map(|q| (Just(q), probs(q)))) {
        let cal = exact_calibration(q, &NoiseModel::readout_only(p).unwrap(), CalibrationOptions::default()).unwrap();
        let d = mitigate_distribution(&raw, &cal).unwrap();
        prop_assert!(d.probs().iter().all(|&x| x >= 0.0));
        prop_assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn counts_sum_to_shots(c in circuit(8), shots in 1u64..3000, seed in any::<u64>(), noisy in any::<bool>()) {
        let noise = noisy.then(|| NoiseModel::new(0.05, 0.05).unwrap());
        let counts = frqi::sim::sample(&c, shots, noise.as_ref(), seed, &SimConfig::default()).unwrap();
        prop_assert_eq!(counts.shots(), shots);
        prop_assert_eq!(counts.histogram().values().sum::<u64>(), shots);
        prop_assert_eq!(counts.marginal(&[0, 2]).unwrap().shots(), shots);
        // same seed, same histogram
        let again = frqi::sim::sample(&c, shots, noise.as_ref(), seed, &SimConfig::default()).unwrap();
        prop_assert_eq!(counts, again);
    }

    #[test]
    fn counts_labels_are_msb_first(hist in proptest::collection::btree_map(0u64..8, 1u64..100, 1..8)) {
        let counts = Counts::from_histogram(3, hist.clone());
        let map = counts.to_json_map();
        for (k, v) in &hist {
            let label = format!("{k:03b}");
            prop_assert_eq!(map[&label].as_u64(), Some(*v));
        }
    }
}

#[test]
fn noiseless_sampling_matches_exact_distribution() {
    // p_gate = 0 goes through the same CDF as the noise-free path
    let c = Circuit::from_gates(3, vec![Gate::h(0), Gate::ry(1, 1.1), Gate::cx(0, 2)]).unwrap();
    let a = frqi::sim::sample(&c, 4000, None, 9, &SimConfig::default()).unwrap();
    let b = frqi::sim::sample(
        &c,
        4000,
        Some(&NoiseModel::new(0.0, 0.0).unwrap()),
        9,
        &SimConfig::default(),
    )
    .unwrap();
    assert_eq!(a, b);
    let exact = exact_probabilities(&c, &SimConfig::default()).unwrap();
    let tv = a.to_distribution().total_variation(&exact);
    assert!(tv < 0.03, "tv {tv}");
}
