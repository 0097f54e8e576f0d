//! Acceptance checks. Each test prints one `[PASS]`/`[FAIL]` line with the
//! observed values, then asserts. Run with `--nocapture` to see the lines of
//! passing tests too.

use std::time::{Duration, Instant};

use tpi_core::bell::{emitter_assessment, fidelity_map, normalized_fidelity, EmitterSpec};
use tpi_core::emitter::{EmitterParams, LinewidthSpec, PhotonPair};
use tpi_core::gates::{
    beam_splitter, bell_circuit, cnot_gate, gate_quad, phase_shifter, prep_gate, tomography_gate,
    Modes, TomographyBasis,
};
use tpi_core::interference::{
    averaged_phase_factor, coincidence_probability, g2_components, g2_value, hom_visibility,
    interference_factor, linspace, theta_sd_without_dephasing, visibility_map, visibility_pd_only,
    visibility_without_dephasing,
};
use tpi_core::numerics::Integrator;
use tpi_core::oracle::{
    mc_averaged_phase_factor, quadrature_g2, quadrature_p_coinc, random_modes, random_pair,
    random_unitary, stream_rng, PathIntegralConfig, DEFAULT_TRIALS,
};

const PS: f64 = 1e-12;

fn report(name: &str, pass: bool, detail: impl AsRef<str>) -> bool {
    println!(
        "[{}] {name}: {}",
        if pass { "PASS" } else { "FAIL" },
        detail.as_ref()
    );
    pass
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn mismatched_pair(delta_nu: f64) -> PhotonPair {
    PhotonPair::new(
        EmitterParams::new(700.0 * PS, 600e6, 1.4e9, delta_nu).unwrap(),
        EmitterParams::new(650.0 * PS, 300e6, 0.8e9, 0.0).unwrap(),
    )
}

#[test]
fn mismatched_pair_visibility() {
    let start = Instant::now();
    let v0 = hom_visibility(&mismatched_pair(0.0)).unwrap().visibility;
    let v3 = hom_visibility(&mismatched_pair(3e9)).unwrap().visibility;
    let elapsed = start.elapsed();
    let pass =
        within(v0, 0.28, 0.005) && within(v3, 0.01, 0.005) && elapsed < Duration::from_secs(1);
    assert!(report(
        "Mismatched-pair visibilities",
        pass,
        format!("V(0) = {v0:.4} (0.28 ± 0.005), V(3 GHz) = {v3:.4} (0.01 ± 0.005), {elapsed:.2?}"),
    ));
}

#[test]
fn pair_visibility_ranges() {
    let rows = [
        ("670 ps pair", [670.0, 660.0], [330.0, 420.0], (0.28, 0.32)),
        ("256 ps pair", [256.0, 230.0], [256.0, 256.0], (0.53, 0.57)),
        ("155 ps pair", [155.0, 187.0], [153.0, 123.0], (0.40, 0.44)),
    ];
    let start = Instant::now();
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, lifetimes, coherence, (lo, hi)) in rows {
        let specs: Vec<EmitterSpec> = (0..2)
            .map(|n| EmitterSpec {
                lifetime: lifetimes[n] * PS,
                linewidth: LinewidthSpec::CoherenceTime(coherence[n] * PS),
            })
            .collect();
        let a = emitter_assessment(&specs, 100).unwrap();
        let ok = within(a.visibility.min, lo, 0.01) && within(a.visibility.max, hi, 0.01);
        pass &= ok;
        detail.push(format!(
            "{name} {:.1}-{:.1} ({:.0}-{:.0})",
            100.0 * a.visibility.min,
            100.0 * a.visibility.max,
            100.0 * lo,
            100.0 * hi
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(10);
    assert!(report(
        "Emitter-pair visibility ranges",
        pass,
        format!("{}; {elapsed:.2?}", detail.join(", "))
    ));
}

#[test]
fn single_emitter_ranges() {
    type Row = (&'static str, f64, LinewidthSpec, (f64, f64), (f64, f64));
    let rows: [Row; 5] = [
        (
            "NV",
            12.0,
            LinewidthSpec::HomogeneousBound {
                lorentzian_fwhm_max: 20e6,
                gaussian_fwhm: 100e6,
            },
            (0.21, 0.23),
            (0.34, 0.35),
        ),
        (
            "SiV",
            1.72,
            LinewidthSpec::VoigtFwhm(119e6),
            (0.78, 0.91),
            (0.73, 0.87),
        ),
        (
            "QD 0.85 ns",
            0.85,
            LinewidthSpec::VoigtFwhm(270e6),
            (0.84, 0.93),
            (0.79, 0.91),
        ),
        (
            "QD 0.41 ns",
            0.41,
            LinewidthSpec::Components {
                lorentzian_fwhm: 480e6,
                gaussian_fwhm: 550e6,
            },
            (0.62, 0.62),
            (0.59, 0.59),
        ),
        (
            "molecule",
            9.5,
            LinewidthSpec::VoigtFwhm(19e6),
            (0.90, 0.96),
            (0.86, 0.94),
        ),
    ];
    let start = Instant::now();
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, lifetime_ns, linewidth, v, f) in rows {
        let a = emitter_assessment(
            &[EmitterSpec {
                lifetime: lifetime_ns * 1e-9,
                linewidth,
            }],
            200,
        )
        .unwrap();
        let ok = [
            (a.visibility.min, v.0),
            (a.visibility.max, v.1),
            (a.fidelity.min, f.0),
            (a.fidelity.max, f.1),
        ]
        .iter()
        .all(|&(got, want)| within(got, want, 0.015));
        pass &= ok;
        detail.push(format!(
            "{name}{} V {:.1}-{:.1} ({:.0}-{:.0}) F {:.1}-{:.1} ({:.0}-{:.0})",
            if ok { "" } else { " ✗" },
            100.0 * a.visibility.min,
            100.0 * a.visibility.max,
            100.0 * v.0,
            100.0 * v.1,
            100.0 * a.fidelity.min,
            100.0 * a.fidelity.max,
            100.0 * f.0,
            100.0 * f.1
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(60);
    assert!(report(
        "Single-emitter V/F ranges",
        pass,
        format!("{}; {elapsed:.2?}", detail.join("; "))
    ));
}

#[test]
fn dephasing_versus_diffusion_gap() {
    // Dense scan of x_c, then golden-section refinement around the best node.
    let gap = |x: f64| visibility_without_dephasing(x).unwrap() - x;
    let grid = linspace(0.001, 1.0, 2000);
    let best = grid
        .iter()
        .copied()
        .max_by(|a, b| gap(*a).total_cmp(&gap(*b)))
        .unwrap();
    let (mut lo, mut hi) = ((best - 0.001).max(1e-4), (best + 0.001).min(1.0));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let (a, b) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if gap(a) > gap(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let xc = 0.5 * (lo + hi);
    let dv = gap(xc);
    let ordered = grid.iter().all(|&x| gap(x) >= -1e-12);
    let pass = within(dv, 0.048, 0.003) && within(xc, 0.40, 0.02) && ordered;
    assert!(report(
        "Maximum V_noPD − V_noSD",
        pass,
        format!(
            "ΔV_max = {dv:.4} (0.048 ± 0.003) at x_c = {xc:.4} (0.40 ± 0.02), ϑ_SD = {:.4}; V_noPD ≥ V_noSD on grid: {ordered}",
            theta_sd_without_dephasing(xc).unwrap()
        ),
    ));
}

/// Index of the first cell along each row where the value drops below 1/2.
fn crossings(values: &[Vec<f64>]) -> Vec<Option<usize>> {
    values
        .iter()
        .map(|row| row.iter().position(|&v| v < 0.5))
        .collect()
}

#[test]
fn fidelity_contours() {
    let n = 200;
    let pd = linspace(1.0, 10.0, n);
    let sd = linspace(0.0, 10.0, n);
    let v = visibility_map(&pd, &sd).unwrap();
    let f = fidelity_map(&pd, &sd).unwrap();
    let transpose = |m: &[Vec<f64>]| -> Vec<Vec<f64>> {
        (0..n).map(|b| (0..n).map(|a| m[a][b]).collect()).collect()
    };
    let shift = |a: &[Option<usize>], b: &[Option<usize>]| -> usize {
        a.iter()
            .zip(b)
            .map(|(x, y)| match (x, y) {
                (Some(x), Some(y)) => x.abs_diff(*y),
                (None, None) => 0,
                _ => 1,
            })
            .max()
            .unwrap_or(0)
    };
    let rows = shift(&crossings(&v.values), &crossings(&f.values));
    let cols = shift(
        &crossings(&transpose(&v.values)),
        &crossings(&transpose(&f.values)),
    );
    let f_ideal = normalized_fidelity(1.0, 0.0).unwrap();
    // F < V strictly inside (1/2, 1); the curves touch at both ends.
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for a in 0..n {
        for b in 0..n {
            let (vv, ff) = (v.values[a][b], f.values[a][b]);
            if vv >= 0.5 {
                worst = worst.max(ff - vv);
                let strict = vv > 0.5 + 1e-9 && vv < 1.0 - 1e-9;
                if (strict && ff >= vv) || ff > vv + 1e-12 {
                    violations += 1;
                }
            }
        }
    }
    let pass = rows <= 1 && cols <= 1 && within(f_ideal, 1.0, 1e-9) && violations == 0;
    assert!(report(
        "Fidelity contours and F < V",
        pass,
        format!(
            "contour offset rows {rows}, cols {cols} cells; F(1,0) − 1 = {:.1e}; max(F − V | V ≥ 0.5) = {worst:.1e}; violations {violations}",
            f_ideal - 1.0
        ),
    ));
}

#[test]
fn oracle_equivalence() {
    let start = Instant::now();
    let mut rng = stream_rng(2024, 0);

    let mut worst_p = 0.0f64;
    for _ in 0..100 {
        let dim = 2 + (rand_index(&mut rng) % 5);
        let u = random_unitary(dim, &mut rng).unwrap();
        let modes = random_modes(dim, &mut rng).unwrap();
        let pair = random_pair(&mut rng).unwrap();
        let closed = coincidence_probability(&u, modes, &pair).unwrap();
        let numeric = quadrature_p_coinc(&u, modes, &pair).unwrap();
        worst_p = worst_p.max((closed - numeric).abs());
    }

    let mut worst_z = 0.0f64;
    let mut misses = 0;
    for instance in 0..10u64 {
        let dim = 2 + (rand_index(&mut rng) % 3);
        let u = random_unitary(dim, &mut rng).unwrap();
        let modes = random_modes(dim, &mut rng).unwrap();
        let pair = random_pair(&mut rng).unwrap();
        let span = pair.emitter_i().lifetime().max(pair.emitter_j().lifetime());
        for (n, &s) in [-2.0, -0.6, 0.0, 0.35, 1.5].iter().enumerate() {
            let tau = s * span;
            let cfg = PathIntegralConfig {
                realizations: 1000,
                seed: 1000 * instance + n as u64,
                ..Default::default()
            };
            let est = quadrature_g2(&u, modes, &pair, tau, &cfg).unwrap();
            let closed = g2_value(&u, modes, &pair, tau).unwrap();
            worst_z = worst_z.max(est.z_score(closed));
            if !est.agrees_with(closed, 3.0) {
                eprintln!("miss {instance} tau {tau:e} {est:?} closed {closed} pair {pair:?} modes {modes:?}");
            }
            misses += usize::from(!est.agrees_with(closed, 3.0));
        }
    }

    let pair = mismatched_pair(0.0);
    let est = mc_averaged_phase_factor(&pair, std::f64::consts::PI, 200.0 * PS, DEFAULT_TRIALS, 7)
        .unwrap();
    let target = averaged_phase_factor(&pair, std::f64::consts::PI, 200.0 * PS);
    let factor_ok = est.agrees_with(target, 3.0);

    let elapsed = start.elapsed();
    let pass = worst_p <= 1e-6 && misses == 0 && factor_ok && elapsed < Duration::from_secs(300);
    assert!(report(
        "Oracle equivalence",
        pass,
        format!(
            "max |p − p_quad| = {worst_p:.1e} over 100; G² vs MC worst {worst_z:.2}σ, {misses}/50 outside 3σ; \
             phase factor {:.5} ± {:.5} vs {target:.5}; {elapsed:.2?}",
            est.mean, est.stderr
        ),
    ));
}

fn rand_index(rng: &mut impl rand::Rng) -> usize {
    rng.random_range(0..1000)
}

#[test]
fn structural_invariants() {
    let mut rng = stream_rng(77, 0);
    let bs = beam_splitter(0.5, 0.5).unwrap();

    let mut worst_g0 = 0.0f64;
    for _ in 0..200 {
        let pair = random_pair(&mut rng).unwrap();
        let g = g2_value(&bs, Modes::hom(), &pair, 0.0).unwrap();
        worst_g0 = worst_g0.max(g.abs() * pair.lifetime_sum());
    }

    let mut worst_p0 = 0.0f64;
    for _ in 0..50 {
        let dim = 2 + rand_index(&mut rng) % 5;
        let u = random_unitary(dim, &mut rng).unwrap();
        let modes = random_modes(dim, &mut rng).unwrap();
        let pair = random_pair(&mut rng).unwrap();
        let quad = gate_quad(&u, modes).unwrap();
        let scale = pair.emitter_i().lifetime().max(pair.emitter_j().lifetime());
        let q = Integrator::new(1e-11).decay_scale(1.0);
        let f = |s: f64| g2_components(&quad, &pair, s * scale).0 * scale;
        let integral = q.integrate(f, f64::NEG_INFINITY, 0.0).unwrap()
            + q.integrate(f, 0.0, f64::INFINITY).unwrap();
        worst_p0 = worst_p0.max((integral - quad.p0()).abs());
    }

    let mut gates = vec![cnot_gate(), prep_gate(), phase_shifter(&[0.3, -1.2, 2.0])];
    for r in linspace(0.0, 1.0, 11) {
        gates.push(beam_splitter(r, 1.0 - r).unwrap());
    }
    for b in TomographyBasis::ALL {
        gates.push(tomography_gate(b));
        gates.push(bell_circuit(b));
    }
    let worst_u = gates
        .iter()
        .map(|g| g.unitarity_deviation())
        .fold(0.0, f64::max);

    let a = EmitterParams::new(700.0 * PS, 600e6, 0.0, 1.5e9).unwrap();
    let b = EmitterParams::new(650.0 * PS, 300e6, 0.0, 0.0).unwrap();
    let pd = visibility_pd_only(&PhotonPair::new(a, b)).unwrap();
    let mut worst_eps = 0.0f64;
    let mut monotone = true;
    let mut prev = f64::INFINITY;
    for k in 0..=12 {
        // ε from 1 MHz down to 1 Hz in half decades.
        let eps = 1e6 * 10f64.powf(-0.5 * k as f64);
        let pair = PhotonPair::new(a.with_inhomogeneous_fwhm(eps).unwrap(), b);
        let d = (interference_factor(&pair).unwrap() - pd).abs();
        monotone &= d <= prev + 1e-15;
        prev = d;
        worst_eps = worst_eps.max(if eps <= 1e3 { d } else { 0.0 });
    }

    let pass =
        worst_g0 < 1e-10 && worst_p0 <= 1e-8 && worst_u <= 1e-12 && monotone && worst_eps < 1e-12;
    assert!(report(
        "Structural invariants",
        pass,
        format!(
            "max |G²(0)|(τi+τj) = {worst_g0:.1e}; max |∫G₀² − p0| = {worst_p0:.1e}; max unitarity dev = {worst_u:.1e}; \
             Σ→0 gap at 1 MHz {:.1e}, ≤1 kHz {worst_eps:.1e}, monotone {monotone}",
            {
                let pair = PhotonPair::new(a.with_inhomogeneous_fwhm(1e6).unwrap(), b);
                (interference_factor(&pair).unwrap() - pd).abs()
            }
        ),
    ));
}
