use crate::linalg::BandedLu;
use crate::params::ElasticParams;
use crate::spectral::dtn_symbol;
use crate::{Error, Result, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Nodal solution of the single-mode two-point problem on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSolution {
    pub z: Vec<f64>,
    pub u: Vec<[C64; 3]>,
}

impl ModeSolution {
    /// Value at `z` by four-point Lagrange interpolation.
    pub fn eval(&self, z: f64) -> [C64; 3] {
        lagrange4(&self.z, &self.u, z)
    }
}

/// Four-point Lagrange interpolation of nodal data on increasing nodes.
pub(crate) fn lagrange4(nodes: &[f64], vals: &[[C64; 3]], z: f64) -> [C64; 3] {
    let n = nodes.len();
    if n < 4 {
        // Too few nodes for a cubic; fall back to linear.
        let e = match nodes.iter().position(|&p| p > z) {
            Some(0) => 0,
            Some(k) => k - 1,
            None => n - 2,
        }
        .min(n - 2);
        let s = (z - nodes[e]) / (nodes[e + 1] - nodes[e]);
        return std::array::from_fn(|c| vals[e][c] * (1.0 - s) + vals[e + 1][c] * s);
    }
    let e = match nodes.binary_search_by(|p| p.partial_cmp(&z).expect("finite node")) {
        Ok(k) => k,
        Err(k) => k.saturating_sub(1),
    };
    let start = e.saturating_sub(1).min(n - 4);
    let mut out = [ZERO; 3];
    for i in start..start + 4 {
        let mut l = 1.0;
        for j in start..start + 4 {
            if j != i {
                l *= (z - nodes[j]) / (nodes[i] - nodes[j]);
            }
        }
        for c in 0..3 {
            out[c] += vals[i][c] * l;
        }
    }
    out
}

/// Independent second-order finite-difference solve of the per-mode problem
/// on a flat strip `[m_ref, h]`:
///
/// `μ u″ − μ|ξ|² u + (λ+μ) D(iξ·u′ₕ + u3′) + ω² u = ĝ(x3)`, `u(m_ref) = 0`,
///
/// with `D = (iξ1, iξ2, d/dx3)` and the traction condition `T u = i M(ξ) u`
/// at `x3 = h`, where `T u = (μ(u1′ + iξ1u3), μ(u2′ + iξ2u3), (λ+2μ)u3′ + λ iξ·uₕ)`.
/// The top condition uses a ghost node, which keeps the scheme second order.
pub fn flat_mode_oracle(
    xi: [f64; 2],
    params: &ElasticParams,
    g: impl Fn(f64) -> [C64; 3],
    h: f64,
    m_ref: f64,
    n_fine: usize,
) -> Result<ModeSolution> {
    if n_fine < 2 || !(h > m_ref) {
        return Err(Error::Constraint(format!("oracle needs n_fine >= 2 and h > m_ref (n_fine = {n_fine})")));
    }
    let (lam, mu, w2) = (params.lambda(), params.mu(), params.omega() * params.omega());
    let dz = (h - m_ref) / n_fine as f64;
    let i = C64::new(0.0, 1.0);
    let ix = [i * xi[0], i * xi[1]];
    let xi2 = xi[0] * xi[0] + xi[1] * xi[1];
    // Unknowns: nodes 1..=n plus a ghost node n+1, three components each.
    let n = n_fine;
    let dim = 3 * (n + 1);
    let mut a = BandedLu::zeros(dim, 8, 8);
    let mut b = vec![ZERO; dim];
    let col = |k: usize, c: usize| (k - 1) * 3 + c;
    let (d2, d1) = (1.0 / (dz * dz), 1.0 / (2.0 * dz));
    let lm = lam + mu;
    for k in 1..=n {
        let z = m_ref + k as f64 * dz;
        let gk = g(z);
        for c in 0..3 {
            let r = col(k, c);
            b[r] = gk[c];
            // μ u″ − μ|ξ|² u + ω² u
            for (kk, w) in [(k - 1, d2), (k, -2.0 * d2), (k + 1, d2)] {
                if kk > 0 {
                    a.add(r, col(kk, c), C64::new(mu * w, 0.0));
                }
            }
            a.add(r, col(k, c), C64::new(w2 - mu * xi2, 0.0));
            // (λ+μ) D_c (iξ1 u1 + iξ2 u2 + u3′)
            if c < 2 {
                for c2 in 0..2 {
                    a.add(r, col(k, c2), ix[c] * ix[c2] * lm);
                }
                for (kk, w) in [(k - 1, -d1), (k + 1, d1)] {
                    if kk > 0 {
                        a.add(r, col(kk, 2), ix[c] * (lm * w));
                    }
                }
            } else {
                for c2 in 0..2 {
                    for (kk, w) in [(k - 1, -d1), (k + 1, d1)] {
                        if kk > 0 {
                            a.add(r, col(kk, c2), ix[c2] * (lm * w));
                        }
                    }
                }
                for (kk, w) in [(k - 1, d2), (k, -2.0 * d2), (k + 1, d2)] {
                    if kk > 0 {
                        a.add(r, col(kk, 2), C64::new(lm * w, 0.0));
                    }
                }
            }
        }
    }
    // Traction rows on the ghost slots: T u − i M u = 0 at node n.
    let tm = dtn_symbol(xi, params).traction_matrix();
    for c in 0..3 {
        let r = col(n + 1, c);
        let coef = if c < 2 { mu } else { lam + 2.0 * mu };
        a.add(r, col(n + 1, c), C64::new(coef * d1, 0.0));
        a.add(r, col(n - 1, c), C64::new(-coef * d1, 0.0));
        if c < 2 {
            a.add(r, col(n, 2), ix[c] * mu);
        } else {
            for c2 in 0..2 {
                a.add(r, col(n, c2), ix[c2] * lam);
            }
        }
        for c2 in 0..3 {
            a.add(r, col(n, c2), -tm[c][c2]);
        }
    }
    a.factor().map_err(|_| Error::Internal("oracle system is singular".into()))?;
    a.solve(&mut b);
    let z: Vec<f64> = (0..=n).map(|k| m_ref + k as f64 * dz).collect();
    let mut u = vec![[ZERO; 3]];
    u.extend((1..=n).map(|k| [b[col(k, 0)], b[col(k, 1)], b[col(k, 2)]]));
    Ok(ModeSolution { z, u })
}
