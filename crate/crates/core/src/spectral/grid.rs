use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::C64;

/// Lattice of horizontal frequencies `ξ = 2π (j1/Λ1, j2/Λ2)`, `|j_i| ≤ N_i`,
/// together with the matching collocation grid of `(2N1+1)×(2N2+1)` points.
///
/// Modes are stored in FFT order: flat index `p1·n2 + p2`, with `p_i > N_i`
/// standing for the negative index `p_i − n_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    half: [usize; 2],
    cell: [f64; 2],
}

impl SpectralGrid {
    pub fn new(half: [usize; 2], cell: [f64; 2]) -> Self {
        assert!(cell[0] > 0.0 && cell[1] > 0.0, "cell lengths must be positive");
        Self { half, cell }
    }

    pub fn half_widths(&self) -> [usize; 2] {
        self.half
    }

    pub fn cell(&self) -> [f64; 2] {
        self.cell
    }

    pub fn cell_area(&self) -> f64 {
        self.cell[0] * self.cell[1]
    }

    pub fn dims(&self) -> [usize; 2] {
        [2 * self.half[0] + 1, 2 * self.half[1] + 1]
    }

    pub fn n_modes(&self) -> usize {
        let [a, b] = self.dims();
        a * b
    }

    /// Integer lattice index `(j1, j2)` of flat mode `m`.
    pub fn mode_index(&self, m: usize) -> [i64; 2] {
        let [n1, n2] = self.dims();
        let (p1, p2) = (m / n2, m % n2);
        [signed(p1, n1, self.half[0]), signed(p2, n2, self.half[1])]
    }

    /// Flat mode for a lattice index, if it lies on the grid.
    pub fn mode_of(&self, j: [i64; 2]) -> Option<usize> {
        let [n1, n2] = self.dims();
        if j[0].unsigned_abs() as usize > self.half[0] || j[1].unsigned_abs() as usize > self.half[1] {
            return None;
        }
        let p1 = j[0].rem_euclid(n1 as i64) as usize;
        let p2 = j[1].rem_euclid(n2 as i64) as usize;
        Some(p1 * n2 + p2)
    }

    pub fn xi(&self, m: usize) -> [f64; 2] {
        let j = self.mode_index(m);
        [2.0 * PI * j[0] as f64 / self.cell[0], 2.0 * PI * j[1] as f64 / self.cell[1]]
    }

    pub fn n_points(&self) -> usize {
        self.n_modes()
    }

    /// Horizontal coordinates of collocation point `p`.
    pub fn point(&self, p: usize) -> [f64; 2] {
        let [n1, n2] = self.dims();
        point_on(p, [n1, n2], self.cell)
    }

    /// Padded grid dimensions for dealiased quadratic products.
    pub fn padded_dims(&self) -> [usize; 2] {
        [3 * self.half[0] + 1, 3 * self.half[1] + 1].map(|v| v.max(1))
    }

    /// Flat index of mode `m` inside a transform grid of dimensions `dims`.
    pub fn mode_slot(&self, m: usize, dims: [usize; 2]) -> usize {
        let j = self.mode_index(m);
        let p1 = j[0].rem_euclid(dims[0] as i64) as usize;
        let p2 = j[1].rem_euclid(dims[1] as i64) as usize;
        p1 * dims[1] + p2
    }
}

fn signed(p: usize, n: usize, half: usize) -> i64 {
    if p <= half {
        p as i64
    } else {
        p as i64 - n as i64
    }
}

/// Coordinates of point `p` of a uniform `dims` grid on the cell.
pub fn point_on(p: usize, dims: [usize; 2], cell: [f64; 2]) -> [f64; 2] {
    let (p1, p2) = (p / dims[1], p % dims[1]);
    [p1 as f64 * cell[0] / dims[0] as f64, p2 as f64 * cell[1] / dims[1] as f64]
}

/// Two-dimensional FFT on a row-major `n1×n2` array.
///
/// `forward` computes `Σ_x v(x) e^{−iξ·x}` and `inverse` computes
/// `Σ_ξ c(ξ) e^{iξ·x}`; neither applies a normalization.
#[derive(Clone)]
pub struct Fft2 {
    dims: [usize; 2],
    f1: Arc<dyn Fft<f64>>,
    f2: Arc<dyn Fft<f64>>,
    i1: Arc<dyn Fft<f64>>,
    i2: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2").field("dims", &self.dims).finish()
    }
}

impl Fft2 {
    pub fn new(dims: [usize; 2]) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            dims,
            f1: planner.plan_fft_forward(dims[0]),
            f2: planner.plan_fft_forward(dims[1]),
            i1: planner.plan_fft_inverse(dims[0]),
            i2: planner.plan_fft_inverse(dims[1]),
        }
    }

    pub fn dims(&self) -> [usize; 2] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn forward(&self, data: &mut [C64]) {
        self.run(data, &self.f1, &self.f2);
    }

    pub fn inverse(&self, data: &mut [C64]) {
        self.run(data, &self.i1, &self.i2);
    }

    fn run(&self, data: &mut [C64], a: &Arc<dyn Fft<f64>>, b: &Arc<dyn Fft<f64>>) {
        let [n1, n2] = self.dims;
        assert_eq!(data.len(), n1 * n2);
        if n2 > 1 {
            b.process(data);
        }
        if n1 > 1 {
            let mut col = vec![C64::new(0.0, 0.0); n1];
            for c in 0..n2 {
                for r in 0..n1 {
                    col[r] = data[r * n2 + c];
                }
                a.process(&mut col);
                for r in 0..n1 {
                    data[r * n2 + c] = col[r];
                }
            }
        }
    }
}

/// Transforms between Fourier coefficients on a [`SpectralGrid`] and point
/// values on either the native or the padded collocation grid.
#[derive(Debug, Clone)]
pub struct SpectralTransform {
    grid: SpectralGrid,
    native: Fft2,
    padded: Fft2,
    native_slots: Vec<usize>,
    padded_slots: Vec<usize>,
}

impl SpectralTransform {
    pub fn new(grid: &SpectralGrid) -> Self {
        let nd = grid.dims();
        let pd = grid.padded_dims();
        let native_slots = (0..grid.n_modes()).map(|m| grid.mode_slot(m, nd)).collect();
        let padded_slots = (0..grid.n_modes()).map(|m| grid.mode_slot(m, pd)).collect();
        Self { grid: grid.clone(), native: Fft2::new(nd), padded: Fft2::new(pd), native_slots, padded_slots }
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn padded_dims(&self) -> [usize; 2] {
        self.padded.dims()
    }

    pub fn padded_len(&self) -> usize {
        self.padded.len()
    }

    /// Values `Σ_ξ c(ξ) e^{iξ·x}` on the native grid.
    pub fn values(&self, coeffs: &[C64]) -> Vec<C64> {
        let mut buf = vec![C64::new(0.0, 0.0); self.native.len()];
        for (m, &s) in self.native_slots.iter().enumerate() {
            buf[s] = coeffs[m];
        }
        self.native.inverse(&mut buf);
        buf
    }

    /// Fourier coefficients (normalized by the point count) of native values.
    pub fn coeffs(&self, values: &[C64]) -> Vec<C64> {
        let mut buf = values.to_vec();
        self.native.forward(&mut buf);
        let scale = 1.0 / self.native.len() as f64;
        self.native_slots.iter().map(|&s| buf[s] * scale).collect()
    }

    /// Values of the coefficient field on the padded grid, written into `out`.
    pub fn padded_values_into(&self, coeffs: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        for (m, &s) in self.padded_slots.iter().enumerate() {
            out[s] = coeffs[m];
        }
        self.padded.inverse(out);
    }

    /// Project padded-grid values onto the lattice modes. Overwrites `values`.
    pub fn padded_coeffs_into(&self, values: &mut [C64], out: &mut [C64]) {
        self.padded.forward(values);
        let scale = 1.0 / self.padded.len() as f64;
        for (o, &s) in out.iter_mut().zip(&self.padded_slots) {
            *o = values[s] * scale;
        }
    }

    pub fn padded_point(&self, p: usize) -> [f64; 2] {
        point_on(p, self.padded.dims(), self.grid.cell())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_is_symmetric_and_contains_zero() {
        let g = SpectralGrid::new([2, 3], [1.0, 2.0]);
        assert_eq!(g.n_modes(), 35);
        assert_eq!(g.xi(0), [0.0, 0.0]);
        for m in 0..g.n_modes() {
            let j = g.mode_index(m);
            let back = g.mode_of([-j[0], -j[1]]).expect("negated mode on grid");
            let x = g.xi(m);
            let y = g.xi(back);
            assert_eq!([x[0], x[1]], [-y[0], -y[1]]);
            assert_eq!(g.mode_of(j), Some(m));
        }
    }

    #[test]
    fn values_coeffs_round_trip_and_plane_wave() {
        let g = SpectralGrid::new([2, 1], [2.0, 3.0]);
        let t = SpectralTransform::new(&g);
        let m = g.mode_of([1, -1]).unwrap();
        let mut c = vec![C64::new(0.0, 0.0); g.n_modes()];
        c[m] = C64::new(0.5, -0.25);
        let v = t.values(&c);
        let xi = g.xi(m);
        for (p, val) in v.iter().enumerate() {
            let x = g.point(p);
            let expect = c[m] * C64::from_polar(1.0, xi[0] * x[0] + xi[1] * x[1]);
            assert!((val - expect).norm() < 1e-13);
        }
        let back = t.coeffs(&v);
        for (a, b) in back.iter().zip(&c) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn padded_product_is_dealiased() {
        let g = SpectralGrid::new([2, 2], [1.0, 1.0]);
        let t = SpectralTransform::new(&g);
        let mut a = vec![C64::new(0.0, 0.0); g.n_modes()];
        let mut b = a.clone();
        a[g.mode_of([2, 0]).unwrap()] = C64::new(1.0, 0.0);
        b[g.mode_of([-1, 1]).unwrap()] = C64::new(1.0, 0.0);
        b[g.mode_of([2, 2]).unwrap()] = C64::new(1.0, 0.0);
        let n = t.padded_len();
        let mut va = vec![C64::new(0.0, 0.0); n];
        let mut vb = va.clone();
        t.padded_values_into(&a, &mut va);
        t.padded_values_into(&b, &mut vb);
        let mut prod: Vec<C64> = va.iter().zip(&vb).map(|(x, y)| x * y).collect();
        let mut out = vec![C64::new(0.0, 0.0); g.n_modes()];
        t.padded_coeffs_into(&mut prod, &mut out);
        // (2,0)+(-1,1) = (1,1) survives; (2,0)+(2,2) = (4,2) is off-lattice and
        // must not alias back onto any retained mode
        for m in 0..g.n_modes() {
            let expect = if g.mode_index(m) == [1, 1] { 1.0 } else { 0.0 };
            assert!((out[m] - C64::new(expect, 0.0)).norm() < 1e-13, "mode {:?}", g.mode_index(m));
        }
    }
}
