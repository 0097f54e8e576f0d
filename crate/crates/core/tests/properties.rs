use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tpi_core::bell::{bell_fidelity, normalized_fidelity};
use tpi_core::emitter::{EmitterParams, PhotonPair};
use tpi_core::exec::Execution;
use tpi_core::gates::{beam_splitter, gate_quad, Modes};
use tpi_core::interference::{
    coincidence_probability, g2_trace, g2_value, hom_visibility, interference_factor, linspace,
    normalized_visibility, tuning_curve_with, visibility_map_with, visibility_pd_only,
    visibility_without_dephasing,
};
use tpi_core::oracle::{random_modes, random_unitary};

fn emitter() -> impl Strategy<Value = EmitterParams> {
    (100e-12..2e-9f64, 0.0..2e9f64, 0.0..3e9f64, -3e9..3e9f64)
        .prop_map(|(t, g, s, d)| EmitterParams::new(t, g, s, d).unwrap())
}

fn pair() -> impl Strategy<Value = PhotonPair> {
    (emitter(), emitter()).prop_map(|(a, b)| PhotonPair::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tuning_curve_is_even(p in pair(), dn in 0.0..5e9f64) {
        let plus = hom_visibility(&p.with_delta_nu(dn)).unwrap().visibility;
        let minus = hom_visibility(&p.with_delta_nu(-dn)).unwrap().visibility;
        prop_assert!((plus - minus).abs() <= 1e-14);
    }

    #[test]
    fn visibility_decreases_with_detuning(p in pair(), dn in 0.0..4e9f64, step in 1e6..1e9f64) {
        let v = |pair: &PhotonPair| hom_visibility(pair).unwrap().visibility;
        prop_assert!(v(&p.with_delta_nu(dn + step)) <= v(&p.with_delta_nu(dn)) + 1e-14);
    }

    // Off resonance a broader line raises the Voigt tail, so monotonicity in
    // the broadening holds at δν = 0 only.
    #[test]
    fn resonant_visibility_decreases_with_broadening(p in pair(), step in 1e6..1e9f64) {
        let base = p.with_delta_nu(0.0);
        let (a, b) = (*base.emitter_i(), *base.emitter_j());
        let v = |pair: &PhotonPair| hom_visibility(pair).unwrap().visibility;
        let more_pd = PhotonPair::new(a.with_dephasing_rate(a.dephasing_rate() + step).unwrap(), b);
        let more_sd = PhotonPair::new(a.with_inhomogeneous_fwhm(a.inhomogeneous_fwhm() + step).unwrap(), b);
        prop_assert!(v(&more_pd) <= v(&base) + 1e-14);
        prop_assert!(v(&more_sd) <= v(&base) + 1e-14);
    }

    #[test]
    fn correlation_is_non_negative(p in pair(), seed in any::<u64>(), dim in 2usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(dim, &mut rng).unwrap();
        let modes = random_modes(dim, &mut rng).unwrap();
        let span = 10.0 * p.emitter_i().lifetime().max(p.emitter_j().lifetime());
        let grid = linspace(-span, span, 401);
        let tr = g2_trace(&u, modes, &p, &grid).unwrap();
        let bs = beam_splitter(0.5, 0.5).unwrap();
        let hom = g2_trace(&bs, Modes::hom(), &p, &grid).unwrap();
        for (g, g0) in tr.g2_values.iter().zip(&tr.g2_distinguishable).chain(hom.g2_values.iter().zip(&hom.g2_distinguishable)) {
            prop_assert!(*g >= -1e-12 * g0.max(1.0 / span));
        }
    }

    #[test]
    fn quad_magnitude_is_geometric_mean(seed in any::<u64>(), dim in 2usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(dim, &mut rng).unwrap();
        let modes = random_modes(dim, &mut rng).unwrap();
        let q = gate_quad(&u, modes).unwrap();
        prop_assert!((q.magnitude - (q.p0_terms.0 * q.p0_terms.1).sqrt()).abs() <= 1e-14);
    }

    #[test]
    fn coincidence_is_a_probability(p in pair(), seed in any::<u64>(), dim in 2usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(dim, &mut rng).unwrap();
        let modes = random_modes(dim, &mut rng).unwrap();
        let c = coincidence_probability(&u, modes, &p).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&c));
    }

    #[test]
    fn sigma_limit_is_continuous(
        t1 in 100e-12..2e-9f64, t2 in 100e-12..2e-9f64,
        g1 in 0.0..2e9f64, g2 in 0.0..2e9f64, dn in -3e9..3e9f64
    ) {
        let a = EmitterParams::new(t1, g1, 0.0, dn).unwrap();
        let b = EmitterParams::new(t2, g2, 0.0, 0.0).unwrap();
        let pd = visibility_pd_only(&PhotonPair::new(a, b)).unwrap();
        // ε over six decades, 1 Hz to 1 MHz.
        for k in 0..=6 {
            let eps = 10f64.powi(k);
            let pair = PhotonPair::new(a.with_inhomogeneous_fwhm(eps).unwrap(), b);
            let x = pair.sigma_total() * pair.lifetime_sum();
            let d = (interference_factor(&pair).unwrap() - pd).abs();
            prop_assert!(d <= 10.0 * x * x + 1e-14, "ε = {} gives {}", eps, d);
        }
    }

    #[test]
    fn fidelity_is_consistent(p in pair()) {
        let r = bell_fidelity(&p).unwrap();
        prop_assert_eq!(r.recompute(), r.fidelity);
        let b = &r.basis_probabilities;
        let plus: f64 = ["HH", "VV", "DD", "AA"].iter().map(|k| b[&k.parse().unwrap()]).sum();
        let minus: f64 = ["RR", "LL"].iter().map(|k| b[&k.parse().unwrap()]).sum();
        prop_assert!(plus >= minus);
        prop_assert!(r.fidelity <= 1.0 + 1e-9);
        for v in b.values() {
            prop_assert!((0.0..=1.0).contains(v));
        }
    }

    #[test]
    fn normalized_forms_are_monotone(tp in 1.0..20.0f64, ts in 0.0..20.0f64, d in 0.01..2.0f64) {
        let v = normalized_visibility(tp, ts).unwrap();
        prop_assert!(normalized_visibility(tp + d, ts).unwrap() <= v + 1e-15);
        prop_assert!(normalized_visibility(tp, ts + d).unwrap() <= v + 1e-15);
        let f = normalized_fidelity(tp, ts).unwrap();
        prop_assert!(normalized_fidelity(tp + d, ts).unwrap() <= f + 1e-15);
        prop_assert!(normalized_fidelity(tp, ts + d).unwrap() <= f + 1e-15);
    }
}

#[test]
fn inhomogeneous_limit_dominates_dephasing_limit() {
    for xc in linspace(0.001, 1.0, 5000) {
        assert!(
            visibility_without_dephasing(xc).unwrap() >= xc - 1e-12,
            "x_c = {xc}"
        );
    }
}

#[test]
fn sweeps_are_order_independent() {
    let p = PhotonPair::new(
        EmitterParams::new(700e-12, 6e8, 1.4e9, 0.0).unwrap(),
        EmitterParams::new(650e-12, 3e8, 0.8e9, 0.0).unwrap(),
    );
    let grid = linspace(-5e9, 5e9, 501);
    assert_eq!(
        tuning_curve_with(&p, &grid, Execution::Parallel).unwrap(),
        tuning_curve_with(&p, &grid, Execution::Sequential).unwrap()
    );
    let pd = linspace(1.0, 8.0, 40);
    let sd = linspace(0.0, 8.0, 40);
    assert_eq!(
        visibility_map_with(&pd, &sd, Execution::Parallel).unwrap(),
        visibility_map_with(&pd, &sd, Execution::Sequential).unwrap()
    );
}

#[test]
fn zero_delay_is_dark_on_symmetric_splitter() {
    let bs = beam_splitter(0.5, 0.5).unwrap();
    let p = PhotonPair::new(
        EmitterParams::new(300e-12, 1e9, 2e9, 1e9).unwrap(),
        EmitterParams::new(1.5e-9, 0.0, 0.0, 0.0).unwrap(),
    );
    assert!(g2_value(&bs, Modes::hom(), &p, 0.0).unwrap().abs() * p.lifetime_sum() < 1e-10);
}
