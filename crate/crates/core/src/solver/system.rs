use rayon::prelude::*;

use super::field::DiscreteField;
use super::mesh::{QuadPoint, StripMesh};
use super::pointwise::{basis_features, flux, flux_matrix, Material, NF};
use super::strip::MappedStrip;
use crate::geometry::SourceSpec;
use crate::linalg::{gmres, norm, BandedLu, GmresConfig, LinearOperator, Mat3};
use crate::params::ElasticParams;
use crate::spectral::{dtn_symbol, SpectralTransform};
use crate::{Error, Result, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const BAND: usize = 5;

/// Relative residual accepted from any solve.
pub const SOLVE_TOL: f64 = 1e-9;

/// Galerkin system for the strip problem, per unit cell area.
///
/// Rows are tests against `ψ_k e_c e^{iξ_m·x′}`; the operator is
/// `B(u, v) = ∫ ℰ(u, v̄) − ω² u·v̄ − ∫_{Γ_h} 𝓣u·v̄` pulled back to the flat
/// reference strip, and the load is `−∫ g·v̄`.
///
/// When the transform does not depend on `x′` the operator is block
/// diagonal over modes and the blocks are exact. Otherwise the operator is
/// applied matrix-free by pseudospectral products on the padded grid, and
/// the blocks hold the `x′`-averaged coefficients as a preconditioner.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    mesh: StripMesh,
    params: ElasticParams,
    strip: MappedStrip,
    source: SourceSpec,
    blocks: Vec<BandedLu>,
    factors: Vec<BandedLu>,
    dtn: Vec<Mat3>,
    rough: Option<RoughOperator>,
    rhs: Vec<C64>,
}

#[derive(Debug, Clone)]
struct RoughOperator {
    transform: SpectralTransform,
    quad: Vec<QuadPoint>,
    // Jacobian rows, indexed q·np + p
    rows: Vec<[f64; 3]>,
    mat: Material,
}

/// How a solve went.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
    pub coupled: bool,
}

pub(crate) fn material(params: &ElasticParams) -> Material {
    Material { lambda: params.lambda(), mu: params.mu(), w2: params.omega() * params.omega() }
}

/// Assemble the Galerkin system on `mesh` for the strip `strip` and source `g`.
pub fn assemble_system(
    mesh: &StripMesh,
    params: &ElasticParams,
    strip: &MappedStrip,
    g: &SourceSpec,
) -> Result<LinearSystem> {
    check_mesh(mesh, strip)?;
    let quad = mesh.quad_points();
    let transform = SpectralTransform::new(mesh.grid());
    let np = transform.padded_len();
    let coupled = !strip.is_uncoupled();
    let mat = material(params);

    let n_rows = if coupled { np } else { 1 };
    let rows: Vec<[f64; 3]> = quad
        .iter()
        .flat_map(|q| (0..n_rows).map(move |p| (q, p)))
        .map(|(q, p)| strip.row_and_height(transform.padded_point(p), q.z).map(|r| r.0))
        .collect::<Result<_>>()?;

    let kbar: Vec<[[f64; NF]; NF]> = (0..quad.len())
        .into_par_iter()
        .map(|q| {
            let mut acc = [[0.0; NF]; NF];
            for row in &rows[q * n_rows..(q + 1) * n_rows] {
                let k = flux_matrix(&mat, *row);
                for i in 0..NF {
                    for j in 0..NF {
                        acc[i][j] += k[i][j];
                    }
                }
            }
            acc.map(|r| r.map(|v| v / n_rows as f64))
        })
        .collect();

    let grid = mesh.grid();
    let dtn: Vec<Mat3> = (0..grid.n_modes()).map(|m| dtn_symbol(grid.xi(m), params).traction_matrix()).collect();
    let blocks: Vec<BandedLu> =
        (0..grid.n_modes()).into_par_iter().map(|m| assemble_block(mesh, &quad, &kbar, grid.xi(m), &dtn[m])).collect();
    let factors: Vec<BandedLu> = blocks
        .par_iter()
        .enumerate()
        .map(|(m, b)| {
            let mut f = b.clone();
            f.factor().map_err(|_| {
                let j = grid.mode_index(m);
                Error::SingularBlock(j[0], j[1])
            })?;
            Ok(f)
        })
        .collect::<Result<_>>()?;

    let rhs = load_vector(mesh, &quad, &transform, strip, g)?;
    let rough = coupled.then(|| RoughOperator { transform, quad, rows, mat });
    Ok(LinearSystem {
        mesh: mesh.clone(),
        params: *params,
        strip: strip.clone(),
        source: g.clone(),
        blocks,
        factors,
        dtn,
        rough,
        rhs,
    })
}

fn check_mesh(mesh: &StripMesh, strip: &MappedStrip) -> Result<()> {
    let scale = 1.0 + mesh.top().abs();
    if (mesh.z0() - strip.level()).abs() > 1e-12 * scale {
        return Err(Error::Constraint(format!(
            "mesh bottom {} must sit at the reference level {}",
            mesh.z0(),
            strip.level()
        )));
    }
    if strip.level() + strip.cutoff().gamma() > mesh.top() + 1e-12 * scale {
        return Err(Error::Constraint("the transform must be the identity at the top of the mesh".into()));
    }
    if strip.surface().cell() != mesh.grid().cell() {
        return Err(Error::Constraint("surface and mesh use different cells".into()));
    }
    Ok(())
}

fn assemble_block(mesh: &StripMesh, quad: &[QuadPoint], kq: &[[[f64; NF]; NF]], xi: [f64; 2], dtn: &Mat3) -> BandedLu {
    let nz = mesh.nz();
    let mut b = BandedLu::zeros(3 * nz, BAND, BAND);
    for (q, k) in quad.iter().zip(kq) {
        for a in 0..2 {
            let ka = q.elem + a;
            if ka == 0 {
                continue;
            }
            for c in 0..3 {
                let t = basis_features(xi, c, q.psi[a], q.dpsi[a]).map(|v| v.conj());
                let mut tk = [ZERO; NF];
                for (al, tv) in t.iter().enumerate() {
                    if *tv == ZERO {
                        continue;
                    }
                    for be in 0..NF {
                        tk[be] += tv * k[al][be];
                    }
                }
                for bb in 0..2 {
                    let kb = q.elem + bb;
                    if kb == 0 {
                        continue;
                    }
                    for c2 in 0..3 {
                        let f = basis_features(xi, c2, q.psi[bb], q.dpsi[bb]);
                        let v: C64 = (0..NF).map(|i| tk[i] * f[i]).sum();
                        b.add((ka - 1) * 3 + c, (kb - 1) * 3 + c2, v * q.weight);
                    }
                }
            }
        }
    }
    let top = (nz - 1) * 3;
    for c in 0..3 {
        for c2 in 0..3 {
            b.add(top + c, top + c2, -dtn[c][c2]);
        }
    }
    b
}

/// Accumulate per-quadrature-point contributions `(mode, local node, comp)`
/// into a global vector in quadrature order, which keeps sums independent of
/// the thread count.
fn scatter(mesh: &StripMesh, quad: &[QuadPoint], parts: &[Vec<C64>], out: &mut [C64]) {
    let nm = mesh.n_modes();
    for (q, part) in quad.iter().zip(parts) {
        for m in 0..nm {
            for a in 0..2 {
                let k = q.elem + a;
                if k == 0 {
                    continue;
                }
                for c in 0..3 {
                    out[mesh.index(m, k, c)] += part[(m * 2 + a) * 3 + c];
                }
            }
        }
    }
}

fn load_vector(
    mesh: &StripMesh,
    quad: &[QuadPoint],
    transform: &SpectralTransform,
    strip: &MappedStrip,
    g: &SourceSpec,
) -> Result<Vec<C64>> {
    let np = transform.padded_len();
    let nm = mesh.n_modes();
    let cell = mesh.grid().cell();
    let parts: Vec<Vec<C64>> = quad
        .par_iter()
        .map(|q| {
            let mut vals = vec![vec![ZERO; np]; 3];
            for p in 0..np {
                let x = transform.padded_point(p);
                let (row, x3) = strip.row_and_height(x, q.z)?;
                let gv = g.value([x[0], x[1], x3], cell);
                for c in 0..3 {
                    vals[c][p] = gv[c] * (1.0 + row[2]);
                }
            }
            let mut hat = vec![vec![ZERO; nm]; 3];
            for c in 0..3 {
                transform.padded_coeffs_into(&mut vals[c], &mut hat[c]);
            }
            let mut part = vec![ZERO; nm * 6];
            for m in 0..nm {
                for a in 0..2 {
                    for c in 0..3 {
                        part[(m * 2 + a) * 3 + c] = -hat[c][m] * (q.weight * q.psi[a]);
                    }
                }
            }
            Ok(part)
        })
        .collect::<Result<_>>()?;
    let mut b = vec![ZERO; mesh.n_unknowns()];
    scatter(mesh, quad, &parts, &mut b);
    Ok(b)
}

impl RoughOperator {
    fn apply(&self, mesh: &StripMesh, x: &[C64], y: &mut [C64]) {
        let grid = mesh.grid();
        let nm = grid.n_modes();
        let np = self.transform.padded_len();
        let xi: Vec<[f64; 2]> = (0..nm).map(|m| grid.xi(m)).collect();
        let node = |m: usize, k: usize, c: usize| if k == 0 { ZERO } else { x[mesh.index(m, k, c)] };
        let parts: Vec<Vec<C64>> = self
            .quad
            .par_iter()
            .enumerate()
            .map(|(qi, q)| {
                // Trial features per mode, then on the padded grid.
                let mut feats = vec![vec![ZERO; nm]; NF];
                for m in 0..nm {
                    for c in 0..3 {
                        let (u0, u1) = (node(m, q.elem, c), node(m, q.elem + 1, c));
                        let u = u0 * q.psi[0] + u1 * q.psi[1];
                        let du = u0 * q.dpsi[0] + u1 * q.dpsi[1];
                        feats[3 * c][m] = C64::new(0.0, xi[m][0]) * u;
                        feats[3 * c + 1][m] = C64::new(0.0, xi[m][1]) * u;
                        feats[3 * c + 2][m] = du;
                        feats[9 + c][m] = u;
                    }
                }
                let mut vals = vec![vec![ZERO; np]; NF];
                for f in 0..NF {
                    self.transform.padded_values_into(&feats[f], &mut vals[f]);
                }
                let rows = &self.rows[qi * np..(qi + 1) * np];
                for p in 0..np {
                    let inp: [C64; NF] = std::array::from_fn(|f| vals[f][p]);
                    let out = flux(&self.mat, rows[p], &inp);
                    for f in 0..NF {
                        vals[f][p] = out[f];
                    }
                }
                for f in 0..NF {
                    self.transform.padded_coeffs_into(&mut vals[f], &mut feats[f]);
                }
                let mut part = vec![ZERO; nm * 6];
                for m in 0..nm {
                    for a in 0..2 {
                        let (psi, dpsi) = (q.psi[a], q.dpsi[a]);
                        for c in 0..3 {
                            let v = feats[3 * c][m] * C64::new(0.0, -xi[m][0] * psi)
                                + feats[3 * c + 1][m] * C64::new(0.0, -xi[m][1] * psi)
                                + feats[3 * c + 2][m] * dpsi
                                + feats[9 + c][m] * psi;
                            part[(m * 2 + a) * 3 + c] = v * q.weight;
                        }
                    }
                }
                part
            })
            .collect();
        y.iter_mut().for_each(|v| *v = ZERO);
        scatter(mesh, &self.quad, &parts, y);
    }
}

impl LinearSystem {
    pub fn mesh(&self) -> &StripMesh {
        &self.mesh
    }

    pub fn params(&self) -> &ElasticParams {
        &self.params
    }

    pub fn strip(&self) -> &MappedStrip {
        &self.strip
    }

    pub fn source(&self) -> &SourceSpec {
        &self.source
    }

    pub fn rhs(&self) -> &[C64] {
        &self.rhs
    }

    /// True when modes are coupled by the surface.
    pub fn is_coupled(&self) -> bool {
        self.rough.is_some()
    }

    /// Per-mode block (exact when uncoupled, averaged otherwise).
    pub fn block(&self, m: usize) -> &BandedLu {
        &self.blocks[m]
    }

    /// `i M(ξ)` for mode `m`.
    pub fn dtn_matrix(&self, m: usize) -> &Mat3 {
        &self.dtn[m]
    }

    /// A copy with the load replaced by `s · b`.
    pub fn with_scaled_rhs(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.rhs.iter_mut().for_each(|v| *v *= s);
        out.source = self.source.scaled(s);
        out
    }

    /// `‖A x − b‖`.
    pub fn residual_norm(&self, x: &[C64]) -> f64 {
        let mut y = vec![ZERO; x.len()];
        self.apply(x, &mut y);
        y.iter().zip(&self.rhs).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    /// Solve with the given Krylov settings; uncoupled systems ignore them
    /// and use the block LU factors directly.
    pub fn solve_with(&self, cfg: &GmresConfig) -> Result<(DiscreteField, SolveStats)> {
        let bnorm = norm(&self.rhs);
        let (x, iterations) = if self.rough.is_none() {
            let mut x = self.rhs.clone();
            Preconditioner { sys: self }.apply_in_place(&mut x);
            (x, 1)
        } else {
            let out = gmres(self, &Preconditioner { sys: self }, &self.rhs, None, cfg);
            (out.x, out.iterations)
        };
        let residual = if bnorm == 0.0 { self.residual_norm(&x) } else { self.residual_norm(&x) / bnorm };
        if !(residual <= SOLVE_TOL) {
            return Err(Error::NonConvergence { iterations, residual });
        }
        let field = DiscreteField::from_unknowns(&self.mesh, &x)?;
        Ok((field, SolveStats { iterations, residual, coupled: self.is_coupled() }))
    }

    /// Default Krylov settings: tolerance `1e-11`, iteration cap
    /// `max(10 √n, 200)`.
    pub fn default_gmres(&self) -> GmresConfig {
        let n = self.mesh.n_unknowns() as f64;
        GmresConfig { tol: 1e-11, restart: 80, max_iter: ((10.0 * n.sqrt()) as usize).max(200) }
    }
}

impl LinearOperator for LinearSystem {
    fn dim(&self) -> usize {
        self.mesh.n_unknowns()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        match &self.rough {
            Some(r) => {
                r.apply(&self.mesh, x, y);
                let nz = self.mesh.nz();
                for m in 0..self.mesh.n_modes() {
                    for c in 0..3 {
                        let row = self.mesh.index(m, nz, c);
                        for c2 in 0..3 {
                            y[row] -= self.dtn[m][c][c2] * x[self.mesh.index(m, nz, c2)];
                        }
                    }
                }
            }
            None => {
                let bs = self.mesh.block_size();
                y.par_chunks_mut(bs)
                    .zip(x.par_chunks(bs))
                    .zip(self.blocks.par_iter())
                    .for_each(|((yy, xx), b)| b.mul_vec(xx, yy));
            }
        }
    }
}

/// Block solve with the per-mode factors.
struct Preconditioner<'a> {
    sys: &'a LinearSystem,
}

impl Preconditioner<'_> {
    fn apply_in_place(&self, x: &mut [C64]) {
        let bs = self.sys.mesh.block_size();
        x.par_chunks_mut(bs).zip(self.sys.factors.par_iter()).for_each(|(xx, f)| f.solve(xx));
    }
}

impl LinearOperator for Preconditioner<'_> {
    fn dim(&self) -> usize {
        self.sys.mesh.n_unknowns()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        y.copy_from_slice(x);
        self.apply_in_place(y);
    }
}

/// Solve an assembled system with default settings.
pub fn solve_field(system: &LinearSystem) -> Result<DiscreteField> {
    system.solve_with(&system.default_gmres()).map(|r| r.0)
}
