//! Swapping prescribed dofs for ramped reaction forces.

use approx::assert_relative_eq;
use plastdam::material::MaterialParams;
use plastdam_fem::equilibrium::{dof, Loads};
use plastdam_fem::mesh::Mesh;
use plastdam_fem::solver::{
    reactions, release_dirichlet, staggered_step, FemModel, SystemState,
};

fn supports(mesh: &Mesh) -> Loads {
    let mut loads = Loads::default();
    loads.prescribe_nodes(&mesh.nodes_where(|p| p[0] == 0.0), 0, 0.0);
    loads.fix_nodes(&mesh.nodes_where(|p| p[1] == 0.0), &[1]);
    loads.fix_nodes(&mesh.nodes_where(|p| p[2] == 0.0), &[2]);
    loads
}

fn stretch_loads(mesh: &Mesh, lx: f64, stretch: f64) -> Loads {
    let mut loads = supports(mesh);
    loads.prescribe_nodes(&mesh.nodes_where(|p| p[0] == lx), 0, stretch);
    loads
}

/// Loads, stretches, and releases one bar; returns the model and final state.
fn run_release(
    stretch: f64,
    n_load_steps: usize,
    n_release: usize,
) -> (FemModel, SystemState) {
    let mesh = Mesh::box_grid(1.0, 1.0, 1.0, 1, 1, 1);
    let model = FemModel::new(mesh, vec![MaterialParams::calibrated_aluminum()]).unwrap();
    let mut state = SystemState::new(&model);
    for step in 1..=n_load_steps {
        let loads = stretch_loads(&model.mesh, 1.0, stretch * step as f64 / n_load_steps as f64);
        staggered_step(&model, &mut state, &loads).unwrap();
    }
    let right = model.mesh.nodes_where(|p| p[0] == 1.0);
    let targets: Vec<(usize, usize)> = right.iter().map(|&n| (n, 0)).collect();
    let base = supports(&model.mesh);
    release_dirichlet(&model, &mut state, &targets, &base, n_release).unwrap();
    (model, state)
}

#[test]
fn elastic_release_returns_to_stress_free_state() {
    let (model, state) = run_release(1e-4, 1, 10);
    for gps in &state.records {
        for rec in gps {
            assert!(rec.sigma_eff.von_mises() < 1e-9);
            assert_eq!(rec.plastic.k, 0.0);
        }
    }
    for &u in &state.u {
        assert!(u.abs() < 1e-14);
    }
    let base = supports(&model.mesh);
    let r = reactions(&model, &state, &base).unwrap();
    for &v in &r {
        assert!(v.abs() < 1e-9);
    }
}

#[test]
fn elastic_release_is_substep_invariant() {
    let (_, one) = run_release(1e-4, 1, 1);
    let (_, many) = run_release(1e-4, 1, 20);
    for (a, b) in one.u.iter().zip(&many.u) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn plastic_release_leaves_residual_stretch() {
    let eps = 0.01;
    let (model, state) = run_release(eps, 5, 8);
    // Elastic unloading from a uniform plastic state: the bar keeps
    // eps - sigma_load / E of permanent stretch and ends stress free.
    let k = state.records[0][0].plastic.k;
    assert!(k > 5e-3, "expected plastic flow, got k = {k}");
    for gps in &state.records {
        for rec in gps {
            assert!(rec.sigma_eff.von_mises() < 1e-6);
        }
    }
    let right = model.mesh.nodes_where(|p| p[0] == 1.0);
    let e = model.materials[0].plasticity.elastic.e;
    // Reconstruct the load-end axial stress from the committed plastic state:
    // unloading was elastic, so sigma_load = E (eps - u_final).
    let u_final = state.u[dof(right[0], 0)];
    // Yield plus both saturating backstress branches puts the load-end
    // stress near 330 MPa at one percent strain.
    let sigma_load = e * (eps - u_final);
    assert!(sigma_load > 300.0 && sigma_load < 360.0, "sigma = {sigma_load}");
    for &n in &right {
        assert_relative_eq!(state.u[dof(n, 0)], u_final, epsilon = 1e-10);
    }
    // Permanent stretch equals the committed axial plastic strain.
    assert_relative_eq!(u_final, state.records[0][0].plastic.eps_p.xx, max_relative = 1e-6);
    let base = supports(&model.mesh);
    let r = reactions(&model, &state, &base).unwrap();
    let total: f64 = right.iter().map(|&n| r[dof(n, 0)]).sum();
    assert!(total.abs() < 1e-6);
}
