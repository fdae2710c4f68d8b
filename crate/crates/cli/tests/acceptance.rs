//! Whole-model validation gates, numbered criterion 01 through 11.
//!
//! Each test exercises one advertised property end to end, prints a single
//! `criterion NN PASS/FAIL: details` line, and then asserts, so the suite
//! doubles as a validation report. Cargo shows the lines of failing tests by
//! default; run with `-- --nocapture` to see the passing ones too.

use std::time::Instant;

use plastdam::damage::{activation, ActivationParams, TrilinearLaw};
use plastdam::hardening::{BackstressComponent, ChabocheSet};
use plastdam::material::{DamageModel, MaterialParams};
use plastdam::plasticity::{yield_function, PlasticState, SolverConfig};
use plastdam::tensor::SymTensor3;
use plastdam::uniaxial::MaterialPoint;
use plastdam_cli::femrun::{run_fem, GripDrive};
use plastdam_cli::matpoint::run_matpoint;
use plastdam_cli::protocol::{frequency_from_rate, CycleProtocol};
use plastdam_cli::CliError;
use plastdam_fem::helmholtz::{solve_nonlocal, volume_mean_gp, volume_mean_nodal};
use plastdam_fem::mesh::Mesh;
use plastdam_fem::shape::NGAUSS;
use plastdam_fem::solver::FemModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(n: usize, pass: bool, details: &str) {
    println!("criterion {n:02} {}: {details}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n:02} failed: {details}");
}

fn random_unit_direction(rng: &mut ChaCha8Rng) -> SymTensor3 {
    let mut v = [0.0; 6];
    for x in &mut v {
        *x = rng.gen_range(-1.0..1.0);
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut v {
        *x /= norm;
    }
    SymTensor3::from_mandel(&v)
}

#[test]
fn criterion_01_saturated_flow_stress() {
    let t = Instant::now();
    let mat = MaterialParams::calibrated_aluminum();
    let cfg = SolverConfig::default();
    let mut point = MaterialPoint::new(&mat);
    let n = 200;
    let mut sigma = 0.0;
    for i in 1..=n {
        sigma = point
            .step(&mat, 0.10 * i as f64 / n as f64, &cfg)
            .unwrap()
            .sigma_nominal
            .xx;
    }
    let elapsed = t.elapsed();
    // Asymptotic flow stress: saturated yield stress plus every backstress
    // amplitude h/b.
    let target = 230.0 + 2_500.0 / 25.0 + 60_000.0 / 550.0;
    let deficit = (target - sigma) / target;
    let pass = deficit.abs() <= 0.005 && elapsed.as_secs_f64() < 1.0;
    verdict(
        1,
        pass,
        &format!(
            "axial stress at 10% strain = {sigma:.4} MPa vs asymptote {target:.4} MPa, \
             deficit {:.3}% (gate 0.5%), {elapsed:?}; exp(-25k) has only decayed to \
             {:.3} by this strain, so the b = 25 terms are still {:.1} MPa short of \
             saturation and the gate cannot be met with this parameter set",
            deficit * 100.0,
            (-25.0 * (0.10 - sigma / 75_000.0)).exp(),
            (15.0 + 100.0) * (-25.0 * (0.10 - sigma / 75_000.0)).exp(),
        ),
    );
}

#[test]
fn criterion_02_implicit_explicit_equivalence() {
    let t = Instant::now();
    let mat = MaterialParams::calibrated_aluminum();
    let pl = &mat.plasticity;
    let cfg = SolverConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let paths = 100;
    let mut worst: f64 = 0.0;
    for _ in 0..paths {
        let mut state = PlasticState::new(2);
        for _ in 0..3 {
            let dir = random_unit_direction(&mut rng);
            // Bracket the step magnitude so dgamma lands in [5e-6, 2e-5],
            // deep enough into the plastic branch for a fair comparison but
            // small enough that the explicit oracle resolves the path.
            let mut m = 1e-4;
            let mut res = pl.integrate(&state, &(state.eps + dir * m), &cfg).unwrap();
            let mut grow = 0;
            while res.dgamma < 5e-6 && grow < 24 {
                m *= 2.0;
                res = pl.integrate(&state, &(state.eps + dir * m), &cfg).unwrap();
                grow += 1;
            }
            let (mut lo, mut hi) = (0.0, m);
            for _ in 0..60 {
                if res.dgamma >= 5e-6 && res.dgamma <= 2e-5 {
                    break;
                }
                if res.dgamma > 2e-5 {
                    hi = m;
                } else {
                    lo = m;
                }
                m = 0.5 * (lo + hi);
                res = pl.integrate(&state, &(state.eps + dir * m), &cfg).unwrap();
            }
            assert!(
                res.dgamma >= 5e-6 && res.dgamma <= 2e-5,
                "step-size bracket failed: dgamma = {}",
                res.dgamma
            );
            let eps_new = state.eps + dir * m;
            let oracle = pl.substep_integrate(&state, &eps_new, 100_000, &cfg).unwrap();
            let diff = (res.sigma_eff - oracle.sigma_eff).norm();
            worst = worst.max(diff / oracle.sigma_eff.norm().max(1.0));
            state = res.state;
        }
    }
    let elapsed = t.elapsed();
    let pass = worst <= 1e-3 && elapsed.as_secs_f64() < 30.0;
    verdict(
        2,
        pass,
        &format!(
            "{paths} random paths x 3 plastic steps vs 1e5-substep explicit oracle: \
             worst relative effective-stress deviation {worst:.3e} (gate 1e-3), {elapsed:?}"
        ),
    );
}

#[test]
fn criterion_03_kuhn_tucker_and_isochoric_flow() {
    let t = Instant::now();
    let mat = MaterialParams::dogbone();
    let cfg = SolverConfig::default();
    let protocol = CycleProtocol::new(0.015, -1.0, 200, 25, 0.004).unwrap();
    let strains = protocol.cycle_samples();
    let sigma0 = mat.plasticity.iso.sigma0;
    let mut point = MaterialPoint::new(&mat);
    let mut steps = 0usize;
    let mut worst_phi = f64::NEG_INFINITY;
    let mut min_dgamma = f64::INFINITY;
    let mut worst_trace: f64 = 0.0;
    for _cycle in 0..protocol.cycles {
        for &eps in &strains {
            let out = point.step(&mat, eps, &cfg).unwrap();
            let phi = yield_function(
                &out.sigma_eff,
                &point.plastic.backstress_total(),
                point.plastic.k,
                &mat.plasticity.iso,
            );
            worst_phi = worst_phi.max(phi);
            min_dgamma = min_dgamma.min(out.dgamma);
            worst_trace = worst_trace.max(point.plastic.eps_p.trace().abs());
            steps += 1;
        }
    }
    let elapsed = t.elapsed();
    let pass = worst_phi <= 1e-8 * sigma0
        && min_dgamma >= 0.0
        && worst_trace <= 1e-10
        && elapsed.as_secs_f64() < 60.0;
    verdict(
        3,
        pass,
        &format!(
            "{steps} committed steps over 200 cycles: max yield residual {worst_phi:.3e} MPa \
             (gate {:.3e}), min plastic multiplier {min_dgamma:.3e}, \
             max |trace eps_p| {worst_trace:.3e} (gate 1e-10), {elapsed:?}",
            1e-8 * sigma0
        ),
    );
}

#[test]
fn criterion_04_hysteresis_reductions() {
    let cfg = SolverConfig::default();

    // (a) No kinematic hardening: the loop plateaus at +/- the yield stress.
    let mat = MaterialParams::hysteresis_demo(ChabocheSet::none());
    let mut point = MaterialPoint::new(&mat);
    let mut worst_plateau: f64 = 0.0;
    let mut plastic_up = 0usize;
    let mut plastic_down = 0usize;
    for i in 1..=40 {
        let s = point.step(&mat, 0.01 * i as f64 / 40.0, &cfg).unwrap();
        if s.dgamma > 0.0 {
            plastic_up += 1;
            worst_plateau = worst_plateau.max((s.sigma_nominal.xx - 235.0).abs() / 235.0);
        }
    }
    for i in 1..=80 {
        let s = point.step(&mat, 0.01 - 0.02 * i as f64 / 80.0, &cfg).unwrap();
        if s.dgamma > 0.0 {
            plastic_down += 1;
            worst_plateau = worst_plateau.max((s.sigma_nominal.xx + 235.0).abs() / 235.0);
        }
    }
    let flat_ok = plastic_up > 0 && plastic_down > 0 && worst_plateau <= 1e-6;

    // (b) Linear kinematic hardening (no recall): constant post-yield slope
    // equal to the series elastoplastic tangent E h / (E + h).
    let mat = MaterialParams::hysteresis_demo(ChabocheSet::new(vec![
        BackstressComponent::new(7_500.0, 0.0).unwrap(),
    ]));
    let mut point = MaterialPoint::new(&mat);
    let mut plastic: Vec<(f64, f64)> = Vec::new();
    for i in 1..=100 {
        let eps = 0.05 * i as f64 / 100.0;
        let s = point.step(&mat, eps, &cfg).unwrap();
        if s.dgamma > 0.0 {
            plastic.push((eps, s.sigma_nominal.xx));
        }
    }
    let tangent = 75_000.0 * 7_500.0 / (75_000.0 + 7_500.0);
    let (e0, s0) = plastic[0];
    let (e1, s1) = *plastic.last().unwrap();
    let prager_slope = (s1 - s0) / (e1 - e0);
    let prager_rel = (prager_slope - tangent).abs() / tangent;
    let prager_ok = prager_rel <= 0.01;

    // (c) Recall term: consecutive post-yield secants decay monotonically
    // from near h toward zero as the backstress saturates.
    let mat = MaterialParams::hysteresis_demo(ChabocheSet::new(vec![
        BackstressComponent::new(7_500.0, 100.0).unwrap(),
    ]));
    let mut point = MaterialPoint::new(&mat);
    let mut prev: Option<(f64, f64)> = None;
    let mut secants = Vec::new();
    for i in 1..=100 {
        let eps = 0.05 * i as f64 / 100.0;
        let s = point.step(&mat, eps, &cfg).unwrap();
        if s.dgamma > 0.0 {
            if let Some((e0, s0)) = prev {
                secants.push((s.sigma_nominal.xx - s0) / (eps - e0));
            }
            prev = Some((eps, s.sigma_nominal.xx));
        }
    }
    let monotone = secants.windows(2).all(|w| w[1] <= w[0] + 1e-9);
    let first = secants[0];
    let last = *secants.last().unwrap();
    let recall_ok = monotone && first > 6_000.0 && first < 7_500.0 && last < 150.0;

    let pass = flat_ok && prager_ok && recall_ok;
    verdict(
        4,
        pass,
        &format!(
            "(a) plateau deviation {worst_plateau:.2e} over {plastic_up}+{plastic_down} plastic \
             steps (gate 1e-6); (b) post-yield slope {prager_slope:.2} vs E h/(E+h) = \
             {tangent:.2}, rel {prager_rel:.2e} (gate 1%); (c) secants {first:.1} -> {last:.1} \
             MPa/strain, monotone non-increasing: {monotone}"
        ),
    );
}

#[test]
fn criterion_05_three_phase_fatigue_signature() {
    let t = Instant::now();
    let mat = MaterialParams::dogbone();
    let protocol = CycleProtocol::new(0.015, -1.0, 200, 25, 0.004).unwrap();
    let run = run_matpoint(&mat, &protocol, &SolverConfig::default()).unwrap();
    let elapsed = t.elapsed();

    let rows = run.cycles.rows();
    let peaks: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let slopes: Vec<f64> = rows.iter().map(|r| r[2]).collect();
    let argmax = peaks
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap()
        .0;

    // Phase 1: hardening-driven rise to the peak, then a flat plateau.
    let rise_ok = argmax >= 1 && peaks[..=argmax].windows(2).all(|w| w[1] >= w[0] - 1e-9);
    let plateau = &peaks[argmax..(argmax + 31).min(peaks.len())];
    let pmax = plateau.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pmin = plateau.iter().cloned().fold(f64::INFINITY, f64::min);
    let plateau_var = (pmax - pmin) / pmax;
    let plateau_ok = plateau_var < 0.01;

    // Phase 3: strictly decreasing peaks over the last quarter of life.
    let tail_ok = peaks[peaks.len() - 50..].windows(2).all(|w| w[1] < w[0]);

    // Phase 2: the unloading secant drops early to the value consistent with
    // the two damage indices acting on the deviatoric and volumetric parts,
    // then stays flat. The axial modulus of the damaged isotropic solid
    // follows from the uniaxial-stress condition on the degraded moduli.
    let d_i = run.history.column("d_i").unwrap();
    let d_u = run.history.column("d_u").unwrap();
    let cyc = run.history.column("cycle").unwrap();
    let idx = cyc.iter().position(|&c| c == 4.0).unwrap() - 1;
    let mu = 75_000.0 / (2.0 * 1.334);
    let bulk = 75_000.0 / (3.0 * (1.0 - 2.0 * 0.334));
    let a = 2.0 * mu * (1.0 - d_i[idx]);
    let b = bulk * (1.0 - d_u[idx]);
    let x = (a - 3.0 * b) / (a + 6.0 * b);
    let blend = 2.0 * a / 3.0 * (1.0 - x) + b * (1.0 + 2.0 * x);
    let early_drop_ok = slopes[0] < 0.85 * 75_000.0;
    let blend_rel = (slopes[2] - blend).abs() / blend;
    let blend_ok = blend_rel <= 0.01;
    let drift = (slopes[2] - slopes[12]).abs() / slopes[2];
    let slope_plateau_ok = drift < 0.02;

    let pass = rise_ok
        && plateau_ok
        && tail_ok
        && early_drop_ok
        && blend_ok
        && slope_plateau_ok
        && elapsed.as_secs_f64() < 60.0;
    verdict(
        5,
        pass,
        &format!(
            "peaks rise to {:.2} MPa at cycle {} (monotone: {rise_ok}), 30-cycle plateau \
             variation {:.2}% (gate 1%), last 50 cycles strictly decreasing: {tail_ok}; \
             unloading slope {:.0} after cycle 1 (< 0.85 E), cycle-3 slope {:.0} vs \
             damage-blended modulus {blend:.0}, rel {blend_rel:.2e} (gate 1%), drift to \
             cycle 13 = {:.2}% (gate 2%); {elapsed:?}",
            peaks[argmax],
            argmax + 1,
            plateau_var * 100.0,
            slopes[0],
            slopes[2],
            drift * 100.0,
        ),
    );
}

#[test]
fn criterion_06_activation_function_exactness() {
    let act = ActivationParams::new(1.0, -10_000.0).unwrap();
    let closed = activation(&act, -10_000.0) == 0.0 && activation(&act, -20_000.0) == 0.0;
    let open = activation(&act, 1e-9) == 1.0 && activation(&act, 5_000.0) == 1.0;
    let continuous_at_zero = activation(&act, -1e-6) >= 1.0 - 1e-9;
    // Halfway to full closure the ramp evaluates to
    // 1 - (1 - e^(1/2)) / (1 - e) = 0.62245933...
    let expected = 1.0 - (1.0 - 0.5_f64.exp()) / (1.0 - 1.0_f64.exp());
    let worked = activation(&act, -5_000.0);
    let worked_err = (worked - expected).abs();
    let worked_ok = worked_err <= 1e-12 && format!("{worked:.4}") == "0.6225";

    let pass = closed && open && continuous_at_zero && worked_ok;
    verdict(
        6,
        pass,
        &format!(
            "exact 0 at/below full closure: {closed}; exact 1 for tension: {open}; \
             1 - phi(0-) <= 1e-9: {continuous_at_zero}; phi(-5000) = {worked:.12} vs \
             {expected:.12}, err {worked_err:.2e} (gate 1e-12), displays as {worked:.4}"
        ),
    );
}

#[test]
fn criterion_07_trilinear_integrity_tables() {
    let laws = [
        ("smooth isotropic", TrilinearLaw::new(0.825, 0.775, 0.005, 10.0, 50.0, 1e-8).unwrap()),
        ("smooth unilateral", TrilinearLaw::new(0.825, 0.025, 0.005, 10.0, 11.0, 1e-8).unwrap()),
        ("notched isotropic", TrilinearLaw::new(0.825, 0.775, 0.005, 0.25, 0.80, 1e-8).unwrap()),
        ("notched unilateral", TrilinearLaw::new(0.825, 0.025, 0.005, 0.50, 4.00, 1e-8).unwrap()),
    ];
    let mut breakpoints_exact = true;
    let mut worst_mid: f64 = 0.0;
    for (_, law) in &laws {
        breakpoints_exact &= law.integrity(0.0) == 1.0
            && law.integrity(law.k1) == law.w1
            && law.integrity(law.k2) == law.w2
            && law.integrity(law.k3) == law.w_min
            && law.integrity(2.0 * law.k3) == law.w_min;
        let segments = [
            (0.0, 1.0, law.k1, law.w1),
            (law.k1, law.w1, law.k2, law.w2),
            (law.k2, law.w2, law.k3, law.w_min),
        ];
        for (ka, wa, kb, wb) in segments {
            for s in [0.25, 0.5, 0.75] {
                let k = (1.0 - s) * ka + s * kb;
                let expected = ((kb - k) * wa + (k - ka) * wb) / (kb - ka);
                worst_mid = worst_mid.max((law.integrity(k) - expected).abs() / expected);
            }
        }
    }
    // The shipped material presets embed exactly these laws.
    let presets_match = match (MaterialParams::dogbone().damage, MaterialParams::compact_tension().damage) {
        (
            DamageModel::TwoIndex { isotropic: di, unilateral: du, .. },
            DamageModel::TwoIndex { isotropic: ci, unilateral: cu, .. },
        ) => di == laws[0].1 && du == laws[1].1 && ci == laws[2].1 && cu == laws[3].1,
        _ => false,
    };

    let pass = breakpoints_exact && worst_mid <= 1e-12 && presets_match;
    verdict(
        7,
        pass,
        &format!(
            "4 laws x 5 breakpoints bit-exact: {breakpoints_exact}; worst mid-segment \
             interpolation deviation {worst_mid:.2e} (gate 1e-12); presets embed the same \
             laws: {presets_match}"
        ),
    );
}

#[test]
fn criterion_08_helmholtz_properties() {
    // A spatially uniform source is an exact fixed point of the smoothing.
    let mesh = Mesh::box_grid(3.0, 2.0, 1.0, 3, 2, 1);
    let source = vec![[1.3; NGAUSS]; mesh.elements.len()];
    let field = solve_nonlocal(&mesh, 0.7, &source).unwrap();
    let worst_uniform = field
        .values
        .iter()
        .map(|v| (v - 1.3).abs())
        .fold(0.0_f64, f64::max);

    // Zero-flux boundaries conserve the volume mean of the source.
    let mesh_b = Mesh::box_grid(4.0, 2.0, 2.0, 4, 2, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut ragged = vec![[0.0; NGAUSS]; mesh_b.elements.len()];
    for gps in ragged.iter_mut() {
        for v in gps.iter_mut() {
            *v = rng.gen_range(0.0..1.0);
        }
    }
    let field_b = solve_nonlocal(&mesh_b, 0.9, &ragged).unwrap();
    let mean_src = volume_mean_gp(&mesh_b, &ragged).unwrap();
    let mean_bar = volume_mean_nodal(&mesh_b, &field_b.values).unwrap();
    let mean_rel = (mean_bar - mean_src).abs() / mean_src.abs();

    // Two unit cubes along x, ell = 0.5, unit source in the first element.
    // Cross-section symmetry reduces the assembled system to 3 unknowns, one
    // per x-plane, with hand solution (5/6, 1/2, 1/6).
    let mesh_c = Mesh::box_grid(2.0, 1.0, 1.0, 2, 1, 1);
    let mut step_source = vec![[0.0; NGAUSS]; 2];
    step_source[0] = [1.0; NGAUSS];
    let field_c = solve_nonlocal(&mesh_c, 0.5, &step_source).unwrap();
    let mut worst_oracle: f64 = 0.0;
    for (n, p) in mesh_c.nodes.iter().enumerate() {
        let want = match p[0] as i64 {
            0 => 5.0 / 6.0,
            1 => 0.5,
            _ => 1.0 / 6.0,
        };
        worst_oracle = worst_oracle.max((field_c.values[n] - want).abs());
    }

    let pass = worst_uniform <= 1e-10 && mean_rel <= 1e-8 && worst_oracle <= 1e-10;
    verdict(
        8,
        pass,
        &format!(
            "uniform-source deviation {worst_uniform:.2e} (gate 1e-10); volume-mean \
             relative drift {mean_rel:.2e} (gate 1e-8); two-element hand oracle deviation \
             {worst_oracle:.2e} (gate 1e-10)"
        ),
    );
}

/// Plate with a notch cut from the upper edge at midspan, one element thick.
fn notched_plate(nx: usize, ny: usize) -> Mesh {
    Mesh::box_grid(8.0, 2.0, 1.0, nx, ny, 1)
        .retain_elements(|_, c| !(c[0] > 3.5 && c[0] < 4.5 && c[1] > 1.5))
}

fn softening_peaks(
    nx: usize,
    ny: usize,
    ell: f64,
    amplitude: f64,
    cycles: usize,
    q: usize,
) -> Result<Vec<f64>, CliError> {
    let mesh = notched_plate(nx, ny);
    let mut mat = MaterialParams::compact_tension();
    mat.ell = ell;
    let grip = GripDrive::from_mesh(&mesh, [0, 1])?;
    let model = FemModel::new(mesh, vec![mat])?;
    let protocol = CycleProtocol::new(amplitude, 0.0, cycles, q, 0.0)
        .map_err(|e| CliError::Scenario(e.to_string()))?;
    let run = run_fem(&model, &grip, &protocol, None)?;
    Ok(run.cycles.rows().iter().map(|r| r[1]).collect())
}

/// Relative peak-reaction gap and worst relative gap from the first peak on.
fn envelope_diff(a: &[f64], b: &[f64]) -> (f64, f64) {
    let argmax = a
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .unwrap()
        .0;
    let peak_b = b.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let peak_rel = (a[argmax] - peak_b).abs() / a[argmax].abs();
    let mut post_rel: f64 = 0.0;
    for i in argmax..a.len().min(b.len()) {
        post_rel = post_rel.max((a[i] - b[i]).abs() / a[i].abs().max(1e-12));
    }
    (peak_rel, post_rel)
}

#[test]
fn criterion_09_mesh_objectivity_of_softening() {
    let t = Instant::now();
    // In-plane element sizes 0.25 mm (32x8) and 0.5 mm (16x4) both resolve
    // ell = 1 mm at h <= ell/2; the notch root drives localization in-plane,
    // so the single through-thickness element does not enter the band width.
    let (amp, cycles, q) = (0.06, 8, 4);
    let runs: Result<Vec<Vec<f64>>, CliError> = [
        (32, 8, 1.0),
        (16, 4, 1.0),
        (32, 8, 0.0),
        (16, 4, 0.0),
    ]
    .into_iter()
    .map(|(nx, ny, ell)| softening_peaks(nx, ny, ell, amp, cycles, q))
    .collect();
    let runs = match runs {
        Ok(r) => r,
        Err(e) => {
            verdict(9, false, &format!("a softening run failed: {e}"));
            return;
        }
    };
    let elapsed = t.elapsed();
    let (peak_rel, post_rel) = envelope_diff(&runs[0], &runs[1]);
    let (peak_rel0, post_rel0) = envelope_diff(&runs[2], &runs[3]);

    let pass = peak_rel < 0.05
        && post_rel < 0.05
        && post_rel0.max(peak_rel0) > 0.15
        && elapsed.as_secs_f64() < 600.0;
    verdict(
        9,
        pass,
        &format!(
            "regularized pair: peak gap {:.2}%, post-peak envelope gap {:.2}% (gates 5%); \
             local pair: peak gap {:.2}%, post-peak envelope gap {:.2}% (gate > 15%); \
             {elapsed:?}",
            peak_rel * 100.0,
            post_rel * 100.0,
            peak_rel0 * 100.0,
            post_rel0 * 100.0,
        ),
    );
}

#[test]
fn criterion_10_frequency_relation() {
    let f = frequency_from_rate(0.004, 0.015).unwrap();
    let pass = f == 1.0 / 15.0 && f.to_bits() == (1.0_f64 / 15.0).to_bits();
    verdict(
        10,
        pass,
        &format!("frequency_from_rate(0.004, 0.015) = {f:.17e}, bit-identical to 1/15: {pass}"),
    );
}

#[test]
fn criterion_11_algorithmic_tangent_vs_finite_differences() {
    let mat = MaterialParams::calibrated_aluminum();
    let pl = &mat.plasticity;
    let cfg = SolverConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        // Random committed plastic state: one to three hardening steps.
        let mut state = PlasticState::new(2);
        for _ in 0..rng.gen_range(1..=3) {
            let dir = random_unit_direction(&mut rng);
            let mut m = 5e-3;
            let mut res = pl.integrate(&state, &(state.eps + dir * m), &cfg).unwrap();
            let mut grow = 0;
            while res.dgamma < 1e-4 && grow < 20 {
                m *= 2.0;
                res = pl.integrate(&state, &(state.eps + dir * m), &cfg).unwrap();
                grow += 1;
            }
            assert!(res.dgamma >= 1e-4, "preparation step stayed elastic");
            state = res.state;
        }
        // Plastic probe step, kept far enough from the elastic boundary that
        // the finite-difference stencil stays on the plastic branch.
        let dir = random_unit_direction(&mut rng);
        let mut m = 1e-3;
        let mut res = pl.integrate(&state, &(state.eps + dir * m), &cfg).unwrap();
        let mut grow = 0;
        while res.dgamma < 1e-5 && grow < 20 {
            m *= 2.0;
            res = pl.integrate(&state, &(state.eps + dir * m), &cfg).unwrap();
            grow += 1;
        }
        assert!(res.dgamma >= 1e-5, "probe step stayed elastic");
        let eps_probe = state.eps + dir * m;

        let h = 1e-7;
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..6 {
            let mut e = [0.0; 6];
            e[k] = 1.0;
            let ek = SymTensor3::from_mandel(&e);
            let sp = pl
                .integrate(&state, &(eps_probe + ek * h), &cfg)
                .unwrap()
                .sigma_eff
                .to_mandel();
            let sm = pl
                .integrate(&state, &(eps_probe + ek * (-h)), &cfg)
                .unwrap()
                .sigma_eff
                .to_mandel();
            let alg = res.tangent.apply(&ek).to_mandel();
            for j in 0..6 {
                let fd = (sp[j] - sm[j]) / (2.0 * h);
                num += (alg[j] - fd) * (alg[j] - fd);
                den += alg[j] * alg[j];
            }
        }
        worst = worst.max((num / den).sqrt());
    }
    let pass = worst <= 1e-4;
    verdict(
        11,
        pass,
        &format!(
            "50 random plastic states: worst relative Frobenius deviation between the \
             algorithmic tangent and central differences {worst:.3e} (gate 1e-4)"
        ),
    );
}
