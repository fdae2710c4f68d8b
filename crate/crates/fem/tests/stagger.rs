//! Coupled-field behaviour on homogeneous states, where the nonlocal field
//! and damage admit exact references.

use approx::assert_relative_eq;
use plastdam::material::MaterialParams;
use plastdam_fem::equilibrium::{dof, Loads};
use plastdam_fem::mesh::Mesh;
use plastdam_fem::solver::{reactions, staggered_step, FemModel, SystemState};

fn uniaxial_loads(mesh: &Mesh, lx: f64, stretch: f64) -> Loads {
    let mut loads = Loads::default();
    loads.prescribe_nodes(&mesh.nodes_where(|p| p[0] == 0.0), 0, 0.0);
    loads.prescribe_nodes(&mesh.nodes_where(|p| p[0] == lx), 0, stretch);
    loads.fix_nodes(&mesh.nodes_where(|p| p[1] == 0.0), &[1]);
    loads.fix_nodes(&mesh.nodes_where(|p| p[2] == 0.0), &[2]);
    loads
}

#[test]
fn homogeneous_plastic_bar_keeps_fields_uniform() {
    // A uniform uniaxial stretch produces identical Gauss-point histories, so
    // smoothing must return the local plastic variable unchanged and damage
    // must be identical everywhere.
    let mesh = Mesh::box_grid(2.0, 1.0, 1.0, 2, 1, 1);
    let mat = MaterialParams::dogbone();
    let model = FemModel::new(mesh, vec![mat.clone()]).unwrap();
    let mut state = SystemState::new(&model);

    for step in 1..=4 {
        let stretch = 2.0 * 0.0025 * step as f64;
        let loads = uniaxial_loads(&model.mesh, 2.0, stretch);
        staggered_step(&model, &mut state, &loads).unwrap();
    }

    let k0 = state.records[0][0].plastic.k;
    assert!(k0 > 1e-3, "expected a plastic state, got k = {k0}");
    for gps in &state.records {
        for rec in gps {
            assert_relative_eq!(rec.plastic.k, k0, epsilon = 1e-12);
        }
    }
    for &v in &state.kbar.values {
        assert_relative_eq!(v, k0, epsilon = 1e-10);
    }
    let d0 = state.records[0][0].damage;
    let want = mat.damage.update(&plastdam::damage::DamageState::virgin(), k0);
    assert_relative_eq!(d0.d_i, want.d_i, epsilon = 1e-12);
    assert_relative_eq!(d0.d_u, want.d_u, epsilon = 1e-12);
    for gps in &state.records {
        for rec in gps {
            assert_relative_eq!(rec.damage.d_i, d0.d_i, epsilon = 1e-14);
            assert_relative_eq!(rec.damage.d_u, d0.d_u, epsilon = 1e-14);
        }
    }
}

#[test]
fn damaged_bar_reaction_matches_mapped_stress() {
    let mesh = Mesh::box_grid(2.0, 1.0, 1.0, 2, 1, 1);
    let mat = MaterialParams::dogbone();
    let model = FemModel::new(mesh, vec![mat.clone()]).unwrap();
    let mut state = SystemState::new(&model);
    let loads = uniaxial_loads(&model.mesh, 2.0, 2.0 * 0.008);
    staggered_step(&model, &mut state, &loads).unwrap();

    let rec = &state.records[0][0];
    let nominal = mat.damage.map(&rec.sigma_eff, &rec.damage);
    let r = reactions(&model, &state, &loads).unwrap();
    let right = model.mesh.nodes_where(|p| p[0] == 2.0);
    let total: f64 = right.iter().map(|&n| r[dof(n, 0)]).sum();
    assert!(rec.damage.d_i > 0.1, "damage should be active");
    assert_relative_eq!(total, nominal.xx, max_relative = 1e-7);
    // The lateral faces stay traction free.
    assert!(nominal.yy.abs() < 1e-7 && nominal.zz.abs() < 1e-7);
}

#[test]
fn stagger_reports_progress_history() {
    let mesh = Mesh::box_grid(1.0, 1.0, 1.0, 1, 1, 1);
    let model = FemModel::new(mesh, vec![MaterialParams::dogbone()]).unwrap();
    let mut state = SystemState::new(&model);
    let loads = uniaxial_loads(&model.mesh, 1.0, 0.006);
    let report = staggered_step(&model, &mut state, &loads).unwrap();
    // Plastic damaging step: the first outer pass moves the nonlocal field,
    // so at least one more pass must verify stationarity.
    assert!(report.outer_iterations >= 2);
    assert_eq!(report.force_residuals.len(), report.outer_iterations);
    assert_eq!(report.field_increments.len(), report.outer_iterations);
    let last = report.field_increments.last().unwrap();
    assert!(*last <= 1e-8);
}
