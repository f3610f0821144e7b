use bell_discord::decoherence::{
    apply_channel, edge_trajectory_state, trajectory, trajectory_discord_closed_form, ChannelKind, FlipChannel,
};
use bell_discord::measures::{
    classical_correlation, concurrence, discord, entanglement_of_formation, mutual_information,
};
use bell_discord::oracle::{conditional_entropy_for_direction, outcome_probabilities, MeasurementDirection};
use bell_discord::state::{classify, correlation_from_spectrum, density_matrix, is_separable, spectrum, CLASSICAL_TOL};
use bell_discord::{all_measures, CorrelationVector};
use proptest::prelude::*;

fn physical() -> impl Strategy<Value = CorrelationVector> {
    [1e-6..1.0f64, 1e-6..1.0, 1e-6..1.0, 1e-6..1.0].prop_map(|w| {
        let t: f64 = w.iter().sum();
        let [l00, l01, l10, l11] = w.map(|x| x / t);
        CorrelationVector::new(l00 + l01 - l10 - l11, -(l00 - l01 - l10 + l11), l00 - l01 + l10 - l11)
    })
}

fn any_triple() -> impl Strategy<Value = CorrelationVector> {
    [-2.0..2.0f64, -2.0..2.0, -2.0..2.0].prop_map(CorrelationVector::from_array)
}

fn direction() -> impl Strategy<Value = MeasurementDirection> {
    [-1.0..1.0f64, -1.0..1.0, -1.0..1.0]
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-6)
        .prop_map(|v| MeasurementDirection::normalized(v).unwrap())
}

/// The 24 maps generated by coordinate permutations and sign flips of two coordinates,
/// as (permutation, signs) pairs.
fn symmetry_group() -> Vec<([usize; 3], [f64; 3])> {
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let flips = [[1.0, 1.0, 1.0], [-1.0, -1.0, 1.0], [-1.0, 1.0, -1.0], [1.0, -1.0, -1.0]];
    perms.iter().flat_map(|&p| flips.iter().map(move |&f| (p, f))).collect()
}

fn act((p, f): ([usize; 3], [f64; 3]), v: [f64; 3]) -> [f64; 3] {
    [f[0] * v[p[0]], f[1] * v[p[1]], f[2] * v[p[2]]]
}

fn sorted(mut x: [f64; 4]) -> [f64; 4] {
    x.sort_by(f64::total_cmp);
    x
}

fn measure_vector(c: CorrelationVector) -> [f64; 5] {
    let m = all_measures(c).unwrap();
    [m.mutual_info, m.classical, m.discord, m.concurrence, m.eof]
}

proptest! {
    #[test]
    fn spectrum_round_trip(c in any_triple()) {
        let back = correlation_from_spectrum(&spectrum(c)).unwrap();
        for (x, y) in back.to_array().iter().zip(c.to_array()) {
            prop_assert!((x - y).abs() <= 1e-14, "{x} vs {y}");
        }
    }

    #[test]
    fn octahedron_matches_largest_eigenvalue(c in physical()) {
        let lmax = spectrum(c).max().1;
        let l1 = c.l1_norm();
        prop_assume!((l1 - 1.0).abs() > 1e-12);
        prop_assert_eq!(l1 <= 1.0, lmax <= 0.5);
    }

    #[test]
    fn spectrum_and_flags_invariant_under_symmetry(c in any_triple()) {
        let base = sorted(spectrum(c).lambda);
        let flags = classify(c, CLASSICAL_TOL);
        for g in symmetry_group() {
            let gc = CorrelationVector::from_array(act(g, c.to_array()));
            let s = sorted(spectrum(gc).lambda);
            for (x, y) in s.iter().zip(base) {
                prop_assert!((x - y).abs() <= 1e-15);
            }
            let f = classify(gc, CLASSICAL_TOL);
            prop_assert_eq!(
                (f.physical, f.separable, f.classical),
                (flags.physical, flags.separable, flags.classical)
            );
        }
    }

    #[test]
    fn density_matrix_is_a_state(c in physical()) {
        let rho = density_matrix(c).unwrap();
        prop_assert!((rho.trace().re - 1.0).abs() <= 1e-14);
        prop_assert!(rho.trace().im.abs() <= 1e-15);
        prop_assert!(rho.hermiticity_error() <= 1e-15);
        prop_assert!(rho.eigenvalues()[0] >= -1e-12);
    }

    #[test]
    fn partial_transpose_flips_c2(c in physical()) {
        let pt = density_matrix(c).unwrap().partial_transpose();
        let flipped = CorrelationVector::new(c.c1, -c.c2, c.c3);
        let expected = density_matrix(flipped);
        match expected {
            Ok(rho) => prop_assert!((pt.0 - rho.0).iter().all(|z| z.norm() <= 1e-15)),
            // Leaving the tetrahedron means the partial transpose is not positive.
            Err(_) => prop_assert!(pt.eigenvalues()[0] < 0.0),
        }
    }

    #[test]
    fn measures_invariant_under_symmetry(c in physical()) {
        let base = measure_vector(c);
        for g in symmetry_group() {
            let m = measure_vector(CorrelationVector::from_array(act(g, c.to_array())));
            for (x, y) in m.iter().zip(base) {
                prop_assert!((x - y).abs() <= 1e-12, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn midpoint_convexity(x in physical(), y in physical()) {
        let mid = x.midpoint(y);
        let fields: [fn(CorrelationVector) -> bell_discord::Result<f64>; 4] =
            [mutual_information, classical_correlation, concurrence, entanglement_of_formation];
        for f in fields {
            let chord = (f(x).unwrap() + f(y).unwrap()) / 2.0;
            prop_assert!(f(mid).unwrap() <= chord + 1e-10);
        }
    }

    #[test]
    fn concurrence_detects_entanglement(c in physical()) {
        prop_assume!((c.l1_norm() - 1.0).abs() > 1e-12);
        prop_assert_eq!(concurrence(c).unwrap() > 0.0, !is_separable(c).unwrap());
    }

    #[test]
    fn classical_depends_only_on_c_max(c in physical(), u in -1.0..1.0f64, slot in 0usize..3) {
        let m = c.c_max();
        let mut v = [0.0; 3];
        v[slot] = m;
        v[(slot + 1) % 3] = u * m.min(1.0 - m);
        let other = CorrelationVector::from_array(v);
        prop_assert_eq!(other.c_max(), m);
        prop_assert_eq!(classical_correlation(other).unwrap(), classical_correlation(c).unwrap());
    }

    #[test]
    fn concurrence_depends_only_on_lambda_max(c in physical()) {
        let lmax = spectrum(c).max().1;
        prop_assert!((concurrence(c).unwrap() - (2.0 * lmax - 1.0).max(0.0)).abs() <= 1e-15);
        // Slide the state along the face parallel to the nearest octahedron face: λ_max fixed.
        let (label, _) = spectrum(c).max();
        let mut s = spectrum(c);
        let rest: Vec<usize> = (0..4).filter(|&i| i != label.index()).collect();
        let moved = 0.25 * s.lambda[rest[0]];
        s.lambda[rest[0]] -= moved;
        s.lambda[rest[1]] += moved;
        let c2 = correlation_from_spectrum(&s).unwrap();
        prop_assert!((concurrence(c2).unwrap() - concurrence(c).unwrap()).abs() <= 1e-14);
    }

    #[test]
    fn discord_closed_form_on_edge_family(c1 in 0.0..=1.0f64, c3 in 0.0..=1.0f64) {
        let d = discord(edge_trajectory_state(c1, c3)).unwrap();
        prop_assert!((trajectory_discord_closed_form(c1, c3).unwrap() - d).abs() <= 1e-12);
    }

    #[test]
    fn factorized_entropy_on_edge_family(c1 in 0.0..=1.0f64, c3 in 0.0..=1.0f64) {
        let h = |p: f64| bell_discord::measures::binary_entropy(p).unwrap();
        let s = density_matrix(edge_trajectory_state(c1, c3)).unwrap().entropy();
        prop_assert!((s - h((1.0 + c1) / 2.0) - h((1.0 + c3) / 2.0)).abs() <= 1e-12);
    }

    #[test]
    fn channel_semigroup(c in physical(), p1 in 0.0..=0.5f64, p2 in 0.0..=0.5f64, k in 0usize..3) {
        let kind = [ChannelKind::Phase, ChannelKind::Bit, ChannelKind::BitPhase][k];
        let a = FlipChannel::with_probability(kind, p1).unwrap();
        let b = FlipChannel::with_probability(kind, p2).unwrap();
        let twice = apply_channel(apply_channel(c, &a).unwrap(), &b).unwrap();
        let once = apply_channel(c, &FlipChannel::with_scale(kind, a.scale() * b.scale()).unwrap()).unwrap();
        for (x, y) in twice.to_array().iter().zip(once.to_array()) {
            prop_assert!((x - y).abs() <= 1e-15);
        }
    }

    #[test]
    fn channel_kinds_are_related_by_permutation(c in physical(), s in 0.0..=1.0f64) {
        let [x, y, z] = c.to_array();
        let phase = |v: [f64; 3]| {
            apply_channel(CorrelationVector::from_array(v), &FlipChannel::with_scale(ChannelKind::Phase, s).unwrap())
                .unwrap()
                .to_array()
        };
        // Bit flips preserve c1: move c1 into the c3 slot, apply phase flips, move it back.
        let bit = apply_channel(c, &FlipChannel::with_scale(ChannelKind::Bit, s).unwrap()).unwrap().to_array();
        let [a, b, cc] = phase([z, y, x]);
        prop_assert_eq!(bit, [cc, b, a]);
        let bitphase = apply_channel(c, &FlipChannel::with_scale(ChannelKind::BitPhase, s).unwrap()).unwrap().to_array();
        let [a, b, cc] = phase([x, z, y]);
        prop_assert_eq!(bitphase, [a, cc, b]);
    }

    #[test]
    fn eof_non_increasing_along_trajectories(c in physical(), k in 0usize..3) {
        let kind = [ChannelKind::Phase, ChannelKind::Bit, ChannelKind::BitPhase][k];
        let samples = trajectory(c, kind, 1.0, 4.0, 60).unwrap();
        for w in samples.windows(2) {
            prop_assert!(w[1].measures.eof <= w[0].measures.eof + 1e-15);
        }
    }

    #[test]
    fn conditional_entropy_symmetric_in_direction(c in physical(), n in direction()) {
        let a = conditional_entropy_for_direction(c, n).unwrap();
        let b = conditional_entropy_for_direction(c, -n).unwrap();
        prop_assert!((a - b).abs() <= 1e-14);
    }

    #[test]
    fn outcomes_are_equiprobable(c in physical(), n in direction()) {
        let [p, q] = outcome_probabilities(c, n).unwrap();
        prop_assert!((p - 0.5).abs() <= 1e-15 && (q - 0.5).abs() <= 1e-15);
    }
}
