use super::{dot, norm, LinearOperator};
use crate::C64;

#[derive(Debug, Clone, Copy)]
pub struct GmresConfig {
    /// Relative residual target `‖b − Ax‖ ≤ tol ‖b‖`.
    pub tol: f64,
    pub restart: usize,
    pub max_iter: usize,
}

impl Default for GmresConfig {
    fn default() -> Self {
        Self { tol: 1e-11, restart: 60, max_iter: 2000 }
    }
}

#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub x: Vec<C64>,
    pub iterations: usize,
    /// True relative residual of the returned iterate.
    pub residual: f64,
    pub converged: bool,
}

fn givens(a: C64, b: C64) -> (f64, C64) {
    // returns (c, s) with [c s; -conj(s) c] [a; b] = [r; 0], c real
    let na = a.norm();
    if na == 0.0 {
        return (0.0, C64::new(1.0, 0.0));
    }
    let nb = b.norm();
    let r = (na * na + nb * nb).sqrt();
    let c = na / r;
    let s = (a / na) * b.conj() / r;
    (c, s)
}

/// Right-preconditioned restarted GMRES with modified Gram–Schmidt.
///
/// All reductions run sequentially in index order, so results do not depend
/// on the thread count used inside the operator.
pub fn gmres(
    op: &dyn LinearOperator,
    precond: &dyn LinearOperator,
    b: &[C64],
    x0: Option<&[C64]>,
    cfg: &GmresConfig,
) -> GmresOutcome {
    let n = op.dim();
    let zero = C64::new(0.0, 0.0);
    let bnorm = norm(b);
    let mut x = x0.map(|v| v.to_vec()).unwrap_or_else(|| vec![zero; n]);
    if bnorm == 0.0 {
        return GmresOutcome { x: vec![zero; n], iterations: 0, residual: 0.0, converged: true };
    }
    let m = cfg.restart.max(1);
    let mut total = 0usize;
    let mut r = vec![zero; n];
    let mut tmp = vec![zero; n];
    let mut z = vec![zero; n];

    loop {
        op.apply(&x, &mut tmp);
        for i in 0..n {
            r[i] = b[i] - tmp[i];
        }
        let beta = norm(&r);
        let rel = beta / bnorm;
        if rel <= cfg.tol || total >= cfg.max_iter {
            return GmresOutcome { x, iterations: total, residual: rel, converged: rel <= cfg.tol };
        }

        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|v| v / beta).collect());
        let mut hess = vec![vec![zero; m]; m + 1];
        let mut cs = vec![0.0; m];
        let mut sn = vec![zero; m];
        let mut g = vec![zero; m + 1];
        g[0] = C64::new(beta, 0.0);
        let mut k_used = 0;

        for k in 0..m {
            precond.apply(&basis[k], &mut z);
            let mut w = vec![zero; n];
            op.apply(&z, &mut w);
            for (i, v) in basis.iter().enumerate() {
                let hik = dot(v, &w);
                hess[i][k] = hik;
                for (wj, vj) in w.iter_mut().zip(v) {
                    *wj -= hik * vj;
                }
            }
            let hn = norm(&w);
            hess[k + 1][k] = C64::new(hn, 0.0);
            for i in 0..k {
                let (c, s) = (cs[i], sn[i]);
                let a = hess[i][k];
                let bb = hess[i + 1][k];
                hess[i][k] = a * c + s * bb;
                hess[i + 1][k] = -s.conj() * a + bb * c;
            }
            let (c, s) = givens(hess[k][k], hess[k + 1][k]);
            cs[k] = c;
            sn[k] = s;
            hess[k][k] = hess[k][k] * c + s * hess[k + 1][k];
            hess[k + 1][k] = zero;
            g[k + 1] = -s.conj() * g[k];
            g[k] *= c;
            total += 1;
            k_used = k + 1;
            if hn > 0.0 {
                basis.push(w.iter().map(|v| v / hn).collect());
            }
            if g[k + 1].norm() / bnorm <= cfg.tol * 0.5 || hn == 0.0 || total >= cfg.max_iter {
                break;
            }
        }

        let mut y = vec![zero; k_used];
        for i in (0..k_used).rev() {
            let mut acc = g[i];
            for j in i + 1..k_used {
                acc -= hess[i][j] * y[j];
            }
            y[i] = acc / hess[i][i];
        }
        let mut update = vec![zero; n];
        for (j, yj) in y.iter().enumerate() {
            for (u, v) in update.iter_mut().zip(&basis[j]) {
                *u += yj * v;
            }
        }
        precond.apply(&update, &mut z);
        for i in 0..n {
            x[i] += z[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    struct Dense {
        n: usize,
        a: Vec<C64>,
    }

    impl LinearOperator for Dense {
        fn dim(&self) -> usize {
            self.n
        }
        fn apply(&self, x: &[C64], y: &mut [C64]) {
            for i in 0..self.n {
                y[i] = (0..self.n).map(|j| self.a[i * self.n + j] * x[j]).sum();
            }
        }
    }

    struct Identity(usize);

    impl LinearOperator for Identity {
        fn dim(&self) -> usize {
            self.0
        }
        fn apply(&self, x: &[C64], y: &mut [C64]) {
            y.copy_from_slice(x);
        }
    }

    #[test]
    fn solves_nonhermitian_system_with_restarts() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let n = 40;
        let mut a = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = C64::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1));
            }
            a[i * n + i] += C64::new(2.0, 1.0);
        }
        let op = Dense { n, a };
        let b: Vec<C64> = (0..n).map(|_| C64::new(rng.gen(), rng.gen())).collect();
        let cfg = GmresConfig { tol: 1e-12, restart: 7, max_iter: 500 };
        let out = gmres(&op, &Identity(n), &b, None, &cfg);
        assert!(out.converged, "residual {}", out.residual);
        let mut ax = vec![C64::new(0.0, 0.0); n];
        op.apply(&out.x, &mut ax);
        let res: f64 = ax.iter().zip(&b).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
        assert!(res <= 1e-11 * norm(&b));
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let op = Identity(4);
        let out = gmres(&op, &Identity(4), &[C64::new(0.0, 0.0); 4], None, &GmresConfig::default());
        assert!(out.converged && out.x.iter().all(|v| v.norm() == 0.0));
    }
}
