use crate::C64;

/// LU factorization of a banded matrix with partial pivoting, stored in the
/// usual column-major band layout with `kl` extra rows for pivot fill-in.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    ab: Vec<C64>,
    ipiv: Vec<usize>,
    factored: bool,
}

impl BandedLu {
    /// Zero matrix of order `n` with `kl` sub- and `ku` super-diagonals.
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ld = 2 * kl + ku + 1;
        Self { n, kl, ku, ab: vec![C64::new(0.0, 0.0); ld * n], ipiv: vec![0; n], factored: false }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    fn ld(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        (self.kl + self.ku + i - j) + j * self.ld()
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && i <= j + self.kl && j <= i + self.ku
    }

    pub fn add(&mut self, i: usize, j: usize, v: C64) {
        debug_assert!(!self.factored);
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let k = self.idx(i, j);
        self.ab[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        debug_assert!(!self.factored);
        if self.in_band(i, j) {
            self.ab[self.idx(i, j)]
        } else {
            C64::new(0.0, 0.0)
        }
    }

    /// `y = A x` using the unfactored entries.
    pub fn mul_vec(&self, x: &[C64], y: &mut [C64]) {
        debug_assert!(!self.factored);
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            let mut acc = C64::new(0.0, 0.0);
            for (j, xj) in x.iter().enumerate().take(hi + 1).skip(lo) {
                acc += self.ab[self.idx(i, j)] * xj;
            }
            *yi = acc;
        }
    }

    /// Factor in place. Fails with the offending column on an exact zero pivot.
    pub fn factor(&mut self) -> Result<(), usize> {
        let n = self.n;
        let kv = self.kl + self.ku;
        let ld = self.ld();
        let mut ju = 0usize;
        for j in 0..n {
            let km = self.kl.min(n - 1 - j);
            let mut jp = 0;
            let mut best = -1.0;
            for i in 0..=km {
                let v = self.ab[kv + i + j * ld].norm();
                if v > best {
                    best = v;
                    jp = i;
                }
            }
            self.ipiv[j] = j + jp;
            if best == 0.0 || !best.is_finite() {
                return Err(j);
            }
            ju = ju.max((j + self.ku + jp).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    let a = kv + j + jp - c + c * ld;
                    let b = kv + j - c + c * ld;
                    self.ab.swap(a, b);
                }
            }
            let piv = self.ab[kv + j * ld];
            for i in 1..=km {
                self.ab[kv + i + j * ld] /= piv;
            }
            for c in j + 1..=ju {
                let t = self.ab[kv + j - c + c * ld];
                if t == C64::new(0.0, 0.0) {
                    continue;
                }
                for i in 1..=km {
                    let l = self.ab[kv + i + j * ld];
                    self.ab[kv + j + i - c + c * ld] -= l * t;
                }
            }
        }
        self.factored = true;
        Ok(())
    }

    /// Solve in place with a factored matrix.
    pub fn solve(&self, b: &mut [C64]) {
        assert!(self.factored, "solve before factor");
        let n = self.n;
        let kv = self.kl + self.ku;
        let ld = self.ld();
        for j in 0..n {
            let p = self.ipiv[j];
            if p != j {
                b.swap(j, p);
            }
            let km = self.kl.min(n - 1 - j);
            let bj = b[j];
            for i in 1..=km {
                b[j + i] -= self.ab[kv + i + j * ld] * bj;
            }
        }
        for j in (0..n).rev() {
            b[j] /= self.ab[kv + j * ld];
            let bj = b[j];
            for i in j.saturating_sub(kv)..j {
                b[i] -= self.ab[kv + i - j + j * ld] * bj;
            }
        }
    }
}
