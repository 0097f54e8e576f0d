use anyhow::{ensure, Result};

use tpi_core::bell::{emitter_assessment_with, fidelity_map_with, BellCircuit, EmitterSpec};
use tpi_core::emitter::{normalized_params, PhotonPair};
use tpi_core::exec::Execution;
use tpi_core::interference::{
    averaged_phase_factor, coincidence_probability, default_tau_grid, g2_trace, g2_value,
    hom_visibility, interference_factor, linspace, tuning_curve_with, visibility_map_with,
    ParameterMap,
};
use tpi_core::oracle::{
    mc_averaged_phase_factor_with, quadrature_g2_with, quadrature_p_coinc, random_modes,
    random_pair, random_unitary, stream_rng, PathIntegralConfig, MIN_TRIALS,
};

use crate::config::{invalid, RunConfig, VerifyConfig};
use crate::output::{to_value, Report, Table};

const PS: f64 = 1e-12;
const GHZ: f64 = 1e9;
const MHZ: f64 = 1e6;

pub fn g2(cfg: &RunConfig, _exec: Execution) -> Result<Report> {
    let pair = cfg.pair()?;
    let (u, modes) = cfg.gate()?;
    let grid = match &cfg.tau_ps {
        Some(g) => g.values("tau_ps")?.iter().map(|t| t * PS).collect(),
        None => default_tau_grid(&pair),
    };
    let trace = g2_trace(&u, modes, &pair, &grid)?;
    let mut t = Table::new(&["tau_ps", "g2", "g2_classical"]);
    for ((tau, g), g0) in trace
        .tau_grid
        .iter()
        .zip(&trace.g2_values)
        .zip(&trace.g2_distinguishable)
    {
        t.push(vec![(tau / PS).into(), (*g).into(), (*g0).into()]);
    }
    Ok(t.into())
}

pub fn tuning(cfg: &RunConfig, exec: Execution) -> Result<Report> {
    let pair = cfg.pair()?;
    let grid_ghz = match &cfg.detuning_ghz {
        Some(g) => g.values("detuning_ghz")?,
        None => linspace(-5.0, 5.0, 401),
    };
    let grid: Vec<f64> = grid_ghz.iter().map(|d| d * GHZ).collect();
    let curve = tuning_curve_with(&pair, &grid, exec)?;
    let mut t = Table::new(&["detuning_ghz", "visibility", "p_coinc", "p_coinc_classical"]);
    for (d, r) in grid_ghz.iter().zip(&curve) {
        t.push(vec![
            (*d).into(),
            r.visibility.into(),
            r.p_coinc.into(),
            r.p_coinc_classical.into(),
        ]);
    }
    Ok(t.into())
}

fn map_grids(cfg: &RunConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    let pd = match &cfg.theta_pd {
        Some(g) => g.values("theta_pd")?,
        None => linspace(1.0, 10.0, 200),
    };
    let sd = match &cfg.theta_sd {
        Some(g) => g.values("theta_sd")?,
        None => linspace(0.0, 10.0, 200),
    };
    Ok((pd, sd))
}

fn map_report(map: ParameterMap, value: &'static str) -> Result<Report> {
    let mut t = Table::new(&["theta_pd", "theta_sd", value]);
    for (a, row) in map.values.iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            t.push(vec![
                map.theta_pd[a].into(),
                map.theta_sd[b].into(),
                (*v).into(),
            ]);
        }
    }
    Ok(Report {
        table: t,
        json: Some(to_value(&map)?),
    })
}

pub fn vmap(cfg: &RunConfig, exec: Execution) -> Result<Report> {
    let (pd, sd) = map_grids(cfg)?;
    map_report(visibility_map_with(&pd, &sd, exec)?, "visibility")
}

pub fn fmap(cfg: &RunConfig, exec: Execution) -> Result<Report> {
    let (pd, sd) = map_grids(cfg)?;
    map_report(fidelity_map_with(&pd, &sd, exec)?, "fidelity")
}

pub fn decompose(cfg: &RunConfig, _exec: Execution) -> Result<Report> {
    let d = RunConfig::require(&cfg.decompose, "decompose")?;
    let spec = EmitterSpec::from(d.emitter);
    let circuit = BellCircuit::standard();
    let mut t = Table::new(&[
        "dephasing_rate_mhz",
        "inhomogeneous_fwhm_mhz",
        "theta_pd",
        "theta_sd",
        "visibility",
        "fidelity",
    ]);
    for lp in spec.linewidth.decompose(spec.lifetime, d.points)? {
        let e = lp.emitter(spec.lifetime)?;
        let pair = PhotonPair::identical(e);
        let n = normalized_params(&e);
        let v = hom_visibility(&pair)?.visibility;
        let (_, _, f) = circuit.evaluate(interference_factor(&pair)?);
        t.push(vec![
            (lp.dephasing_rate / MHZ).into(),
            (lp.inhomogeneous_fwhm / MHZ).into(),
            n.theta_pd.into(),
            n.theta_sd.into(),
            v.into(),
            f.into(),
        ]);
    }
    Ok(t.into())
}

pub fn assess(cfg: &RunConfig, exec: Execution) -> Result<Report> {
    let a = RunConfig::require(&cfg.assess, "assess")?;
    let specs: Vec<EmitterSpec> = a.emitters.iter().map(|&e| e.into()).collect();
    let r = emitter_assessment_with(&specs, a.points, exec)?;
    let mut t = Table::new(&[
        "visibility_min",
        "visibility_max",
        "fidelity_min",
        "fidelity_max",
        "combinations",
    ]);
    t.push(vec![
        r.visibility.min.into(),
        r.visibility.max.into(),
        r.fidelity.min.into(),
        r.fidelity.max.into(),
        r.combinations.into(),
    ]);
    Ok(Report {
        table: t,
        json: Some(to_value(&r)?),
    })
}

/// Outcome of `verify`: the report plus whether every check passed.
pub struct Verification {
    pub report: Report,
    pub passed: bool,
}

/// Cross-checks the closed forms against direct numerical integration and
/// Monte-Carlo sampling on random instances drawn from the run seed.
pub fn verify(cfg: &RunConfig, exec: Execution) -> Result<Verification> {
    let v = cfg.verify.unwrap_or_default();
    let tol = cfg.tolerances.unwrap_or_default();
    (|| {
        ensure!(
            v.trials >= MIN_TRIALS,
            "verify.trials must be at least {MIN_TRIALS}"
        );
        ensure!(v.realizations > 0, "verify.realizations must be positive");
        ensure!(
            tol.coincidence >= 0.0 && tol.sigmas > 0.0,
            "tolerances must be positive"
        );
        Ok(())
    })()
    .map_err(invalid)?;
    let seed = cfg.seed();
    let mut t = Table::new(&["check", "observed", "tolerance", "pass"]);

    let worst_p = coincidence_check(&v, seed)?;
    t.push(vec![
        "coincidence_quadrature".into(),
        worst_p.into(),
        tol.coincidence.into(),
        (worst_p <= tol.coincidence).into(),
    ]);

    let (worst_z, misses) = g2_check(&v, tol.sigmas, seed, exec)?;
    t.push(vec![
        "g2_path_integral_worst_z".into(),
        worst_z.into(),
        tol.sigmas.into(),
        (misses == 0).into(),
    ]);
    t.push(vec![
        "g2_path_integral_misses".into(),
        misses.into(),
        0usize.into(),
        (misses == 0).into(),
    ]);

    // The configured emitters if any, otherwise a random pair.
    let pair = if cfg.emitters.is_empty() {
        random_pair(&mut stream_rng(seed, 2))?
    } else {
        cfg.pair()?
    };
    let tau = 0.3 * pair.lifetime_sum();
    let est =
        mc_averaged_phase_factor_with(&pair, std::f64::consts::PI, tau, v.trials, seed, exec)?;
    let target = averaged_phase_factor(&pair, std::f64::consts::PI, tau);
    let ok = est.agrees_with(target, tol.sigmas);
    t.push(vec![
        "phase_factor_monte_carlo_z".into(),
        est.z_score(target).into(),
        tol.sigmas.into(),
        ok.into(),
    ]);

    let passed = worst_p <= tol.coincidence && misses == 0 && ok;
    Ok(Verification {
        report: t.into(),
        passed,
    })
}

fn coincidence_check(v: &VerifyConfig, seed: u64) -> Result<f64> {
    let mut rng = stream_rng(seed, 0);
    let mut worst = 0.0f64;
    for n in 0..v.coincidence_instances {
        let dim = 2 + n % 5;
        let u = random_unitary(dim, &mut rng)?;
        let modes = random_modes(dim, &mut rng)?;
        let pair = random_pair(&mut rng)?;
        let closed = coincidence_probability(&u, modes, &pair)?;
        worst = worst.max((closed - quadrature_p_coinc(&u, modes, &pair)?).abs());
    }
    Ok(worst)
}

fn g2_check(v: &VerifyConfig, sigmas: f64, seed: u64, exec: Execution) -> Result<(f64, usize)> {
    let mut rng = stream_rng(seed, 1);
    let (mut worst, mut misses) = (0.0f64, 0usize);
    for instance in 0..v.g2_instances as u64 {
        let dim = 2 + instance as usize % 3;
        let u = random_unitary(dim, &mut rng)?;
        let modes = random_modes(dim, &mut rng)?;
        let pair = random_pair(&mut rng)?;
        let span = pair.emitter_i().lifetime().max(pair.emitter_j().lifetime());
        for (n, s) in [-2.0, -0.6, 0.0, 0.35, 1.5].into_iter().enumerate() {
            let tau = s * span;
            let pc = PathIntegralConfig {
                realizations: v.realizations,
                seed: seed.wrapping_add(1000 * instance + n as u64),
                ..Default::default()
            };
            let est = quadrature_g2_with(&u, modes, &pair, tau, &pc, exec)?;
            let closed = g2_value(&u, modes, &pair, tau)?;
            worst = worst.max(est.z_score(closed));
            misses += usize::from(!est.agrees_with(closed, sigmas));
        }
    }
    Ok((worst, misses))
}
