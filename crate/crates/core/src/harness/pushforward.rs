use serde::{Deserialize, Serialize};

use super::problem::Problem;
use super::run::{solve_and_check, Diagnostics};
use crate::config::RunConfig;
use crate::geometry::{inverse_transform, CutoffFn, RandomSample};
use crate::solver::{assemble_system, lagrange4, vh_norm_physical, DiscreteField, MappedStrip};
use crate::spectral::SpectralTransform;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PushforwardReport {
    /// `‖u_A − u_B ∘ H_B⁻¹ ∘ H_A‖_{V_h} / ‖u_A‖_{V_h}` on the physical strip.
    pub difference: f64,
    pub norm_transformed: f64,
    pub norm_fitted: f64,
    pub iterations: [usize; 2],
    /// Per-solve diagnostics of the transformed and the fitted path.
    pub diagnostics: [Diagnostics; 2],
}

/// Compare the transformed solve (cutoff `δ > 0`) against a solve in which
/// the sampled surface itself is the bottom of a boundary-fitted strip.
///
/// The boundary-fitted solution is pulled back to the nodes of the first
/// path through both maps, with four-point interpolation in height, and the
/// difference is measured in the physical `V_h` norm.
pub fn pushforward_check(sample: &RandomSample, cfg: &RunConfig) -> Result<PushforwardReport> {
    let pb = Problem::from_config(cfg)?.with_sample(sample);
    let d = &cfg.discretization;
    let strip_a = pb.strip()?;
    let fitted = CutoffFn::boundary_fitted(pb.cutoff.gamma())?;
    let strip_b = MappedStrip::new(pb.f0.clone(), pb.surface.clone(), fitted)?;
    let sys_a = assemble_system(&pb.mesh, &pb.params, &strip_a, &pb.source)?;
    let sys_b = assemble_system(&pb.mesh, &pb.params, &strip_b, &pb.source)?;
    let (ua, da) = solve_and_check(&sys_a, d.tol, d.restart)?;
    let (ub, db) = solve_and_check(&sys_b, d.tol, d.restart)?;
    let pulled = pull_back(&ub, &strip_b, &strip_a)?;
    let diff = ua.sub(&pulled)?;
    let norm_a = vh_norm_physical(&ua, &strip_a)?;
    let norm_b = vh_norm_physical(&ub, &strip_b)?;
    let dn = vh_norm_physical(&diff, &strip_a)?;
    let difference = if norm_a > 0.0 { dn / norm_a } else { dn };
    Ok(PushforwardReport {
        difference,
        norm_transformed: norm_a,
        norm_fitted: norm_b,
        iterations: [da.solve.iterations, db.solve.iterations],
        diagnostics: [da, db],
    })
}

/// Express a field solved through `from` on the nodes of `to`: at every
/// collocation point and node, map to the physical strip with `to`, back
/// with `from`, and interpolate in height.
pub fn pull_back(field: &DiscreteField, from: &MappedStrip, to: &MappedStrip) -> Result<DiscreteField> {
    let mesh = field.mesh();
    let grid = mesh.grid();
    let t = SpectralTransform::new(grid);
    let nz = mesh.nz();
    let nm = grid.n_modes();
    let np = grid.n_points();
    let nodes = mesh.nodes();
    let zero = C64::new(0.0, 0.0);
    // Physical-space columns of the source field: cols[p][k][c].
    let mut cols = vec![vec![[zero; 3]; nz + 1]; np];
    for k in 0..=nz {
        for c in 0..3 {
            let coeffs: Vec<C64> = (0..nm).map(|m| field.node(m, k)[c]).collect();
            for (p, v) in t.values(&coeffs).into_iter().enumerate() {
                cols[p][k][c] = v;
            }
        }
    }
    let tol = 1e-10 * (1.0 + mesh.top().abs());
    let mut out_vals = vec![vec![[zero; 3]; np]; nz + 1];
    for p in 0..np {
        let x = grid.point(p);
        for (k, &z) in nodes.iter().enumerate() {
            let (_, x3) = to.row_and_height(x, z)?;
            let y = inverse_transform([x[0], x[1], x3], from.f0(), from.surface(), from.cutoff())?;
            if y[2] < mesh.z0() - tol || y[2] > mesh.top() + tol {
                return Err(Error::Constraint(format!("pull-back point z = {} leaves the strip", y[2])));
            }
            out_vals[k][p] = lagrange4(nodes, &cols[p], y[2].clamp(mesh.z0(), mesh.top()));
        }
    }
    let mut nodal = vec![[zero; 3]; nm * (nz + 1)];
    for k in 0..=nz {
        for c in 0..3 {
            let vals: Vec<C64> = out_vals[k].iter().map(|v| v[c]).collect();
            for (m, v) in t.coeffs(&vals).into_iter().enumerate() {
                nodal[m * (nz + 1) + k][c] = v;
            }
        }
    }
    // The Dirichlet trace maps onto itself; drop rounding noise there.
    for m in 0..nm {
        nodal[m * (nz + 1)] = [zero; 3];
    }
    DiscreteField::from_nodal(mesh, nodal)
}
