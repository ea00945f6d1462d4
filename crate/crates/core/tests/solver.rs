use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rough_elastic::geometry::{
    make_profile, CutoffFn, FourierTerm, ProfileSpec, SourceMode, SourceSpec, SurfaceProfile,
};
use rough_elastic::linalg::{dot, LinearOperator};
use rough_elastic::params::{ElasticParams, StripGeometry};
use rough_elastic::solver::*;
use rough_elastic::spectral::SpectralGrid;
use rough_elastic::C64;

const CELL: [f64; 2] = [2.0, 2.0];

fn source() -> SourceSpec {
    SourceSpec {
        amplitude: 1.0,
        center: 0.9,
        width: 0.2,
        support: [0.4, 1.4],
        modes: vec![
            SourceMode { j: [0, 0], polarization: [1.0, 0.0, 0.5], phase: 0.0 },
            SourceMode { j: [1, 0], polarization: [0.0, 1.0, 0.3], phase: 0.2 },
        ],
    }
}

fn zero_source() -> SourceSpec {
    SourceSpec { modes: Vec::new(), ..source() }
}

fn flat_strip(h: f64) -> MappedStrip {
    MappedStrip::flat(SurfaceProfile::flat(0.0, CELL), h).unwrap()
}

fn rough_strip() -> MappedStrip {
    let geom = StripGeometry::new(-0.25, 0.25, 1.5, CELL).unwrap();
    let spec = ProfileSpec {
        offset: 0.0,
        terms: vec![FourierTerm { j: [1, 0], cos: 0.08, sin: 0.0 }, FourierTerm { j: [0, 1], cos: 0.0, sin: 0.05 }],
    };
    let f = make_profile(&spec, &geom, [9, 9]).unwrap();
    MappedStrip::new(SurfaceProfile::flat(0.0, CELL), f, CutoffFn::new(0.1875, 1.5).unwrap()).unwrap()
}

fn mesh(half: usize, h: f64, nz: usize) -> StripMesh {
    StripMesh::uniform(SpectralGrid::new([half, half], CELL), 0.0, h, nz, 3).unwrap()
}

fn unit(n: usize, i: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); n];
    v[i] = C64::new(1.0, 0.0);
    v
}

fn apply(sys: &LinearSystem, x: &[C64]) -> Vec<C64> {
    let mut y = vec![C64::new(0.0, 0.0); x.len()];
    sys.apply(x, &mut y);
    y
}

#[test]
fn flat_operator_is_block_diagonal() {
    let p = ElasticParams::new(1.0, 1.0, 1.0).unwrap();
    let mesh = mesh(2, 1.5, 8);
    let sys = assemble_system(&mesh, &p, &flat_strip(1.5), &source()).unwrap();
    assert!(!sys.is_coupled());
    let bs = mesh.block_size();
    for col in [0, 5, bs + 2, 7 * bs + bs - 1] {
        let y = apply(&sys, &unit(mesh.n_unknowns(), col));
        let m = col / bs;
        for (i, v) in y.iter().enumerate() {
            if i / bs != m {
                assert_eq!(*v, C64::new(0.0, 0.0));
            }
        }
    }
}

#[test]
fn one_element_entries_match_hand_integration() {
    // φ = z/H on one element: ∫φ'² = 1/H, ∫φ² = H/3; at ξ = 0 the DtN is
    // diag(ω√μ, ω√μ, ω√(λ+2μ)).
    let (lambda, mu, w, h) = (2.0, 0.7, 1.3, 0.8);
    let p = ElasticParams::new(lambda, mu, w).unwrap();
    let mesh = mesh(1, h, 1);
    let sys = assemble_system(&mesh, &p, &flat_strip(h), &zero_source()).unwrap();
    let m0 = mesh.grid().mode_of([0, 0]).unwrap();
    for (c, modulus) in [(0, mu), (1, mu), (2, lambda + 2.0 * mu)] {
        let i = mesh.index(m0, 1, c);
        let y = apply(&sys, &unit(mesh.n_unknowns(), i));
        let expect = C64::new(modulus / h - w * w * h / 3.0, -w * modulus.sqrt());
        assert!((y[i] - expect).norm() < 1e-13, "{c}: {} vs {expect}", y[i]);
    }
}

#[test]
fn rough_volume_form_is_hermitian() {
    let p = ElasticParams::new(1.0, 1.0, 1.0).unwrap();
    let mesh = mesh(2, 1.5, 8);
    let sys = assemble_system(&mesh, &p, &rough_strip(), &source()).unwrap();
    assert!(sys.is_coupled());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let nz = mesh.nz();
    // Fields vanishing on the top plane see only the volume terms.
    let mut random = || -> Vec<C64> {
        (0..mesh.n_unknowns())
            .map(|i| {
                let k = (i / 3) % nz + 1;
                if k == nz {
                    C64::new(0.0, 0.0)
                } else {
                    C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                }
            })
            .collect()
    };
    for _ in 0..5 {
        let (u, v) = (random(), random());
        let a = dot(&v, &apply(&sys, &u));
        let b = dot(&u, &apply(&sys, &v)).conj();
        assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0), "{a} vs {b}");
    }
}

#[test]
fn zero_source_gives_zero_field() {
    let p = ElasticParams::new(1.0, 1.0, 1.0).unwrap();
    for strip in [flat_strip(1.5), rough_strip()] {
        let sys = assemble_system(&mesh(2, 1.5, 16), &p, &strip, &zero_source()).unwrap();
        let u = solve_field(&sys).unwrap();
        assert_eq!(u.max_abs(), 0.0);
        let eb = energy_balance(&u, &sys).unwrap();
        assert_eq!(eb.radiated_power, 0.0);
        assert!(eb.residual <= 1e-8);
    }
}

#[test]
fn solution_is_linear_in_the_source() {
    let p = ElasticParams::new(1.0, 1.0, 1.0).unwrap();
    for strip in [flat_strip(1.5), rough_strip()] {
        let sys = assemble_system(&mesh(2, 1.5, 16), &p, &strip, &source()).unwrap();
        let u = solve_field(&sys).unwrap();
        let u2 = solve_field(&sys.with_scaled_rhs(2.0)).unwrap();
        let d = u2.sub(&u.scaled(2.0)).unwrap();
        assert!(d.max_abs() <= 1e-10 * u.max_abs(), "{}", d.max_abs() / u.max_abs());
    }
}

#[test]
fn rough_solve_passes_diagnostics() {
    let p = ElasticParams::new(1.0, 1.0, 1.0).unwrap();
    let strip = rough_strip();
    let sys = assemble_system(&mesh(2, 1.5, 16), &p, &strip, &source()).unwrap();
    let (u, stats) = sys.solve_with(&sys.default_gmres()).unwrap();
    assert!(stats.coupled && stats.residual <= SOLVE_TOL);
    let eb = energy_balance(&u, &sys).unwrap();
    assert!(eb.residual <= 1e-8 && eb.radiated_power > 0.0, "{eb:?}");
    assert!((eb.flux - eb.source_work).abs() <= 1e-8 * eb.source_work.abs());
    assert!(poincare_check(&u).unwrap().holds(1e-12));
    assert!(matches!(rellich_residual(&u, &source(), &strip, &p), Err(rough_elastic::Error::Unsupported(_))));
}

#[test]
fn vh_norm_of_a_sine_mode() {
    let h = 1.5;
    let nz = 256;
    let mesh = mesh(1, h, nz);
    let m0 = mesh.grid().mode_of([0, 0]).unwrap();
    let zero = C64::new(0.0, 0.0);
    let mut vals = vec![[zero; 3]; mesh.grid().n_modes() * (nz + 1)];
    for (k, &z) in mesh.nodes().iter().enumerate() {
        vals[m0 * (nz + 1) + k][2] = C64::new((PI * z / h).sin(), 0.0);
    }
    let u = DiscreteField::from_nodal(&mesh, vals).unwrap();
    let exact = (CELL[0] * CELL[1] * h / 2.0 * (1.0 + PI * PI / (h * h))).sqrt();
    let got = vh_norm(&u);
    assert!((got - exact).abs() <= 1e-4 * exact, "{got} vs {exact}");
    assert_eq!(vh_norm(&DiscreteField::zeros(&mesh)), 0.0);
    // on a flat strip the physical norm is the same
    assert!((vh_norm_physical(&u, &flat_strip(h)).unwrap() - got).abs() <= 1e-12 * got);
}

#[test]
fn oracle_basics() {
    let p = ElasticParams::new(2.0, 1.0, 2.0).unwrap();
    let zero = |_z: f64| [C64::new(0.0, 0.0); 3];
    let o = flat_mode_oracle([0.5, 0.0], &p, zero, 1.0, 0.0, 64).unwrap();
    assert!(o.u.iter().flatten().all(|v| v.norm() == 0.0));

    let g = |z: f64| {
        let s = (-(z - 0.5f64).powi(2) / 0.02).exp();
        [C64::new(s, 0.0), C64::new(0.0, 0.5 * s), C64::new(0.3 * s, 0.0)]
    };
    let xi = [PI, 0.0];
    let a = flat_mode_oracle(xi, &p, g, 1.0, 0.0, 100).unwrap();
    let b = flat_mode_oracle(xi, &p, g, 1.0, 0.0, 200).unwrap();
    let c = flat_mode_oracle(xi, &p, g, 1.0, 0.0, 400).unwrap();
    let diff = |x: &ModeSolution, y: &ModeSolution, stride: usize| {
        (0..=100)
            .map(|k| (0..3).map(|i| (x.u[k * stride / 2][i] - y.u[k * stride][i]).norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    };
    let (d1, d2) = (diff(&a, &b, 2), diff(&b, &c, 4));
    let ratio = d1 / d2;
    assert!((3.5..4.5).contains(&ratio), "self-convergence ratio {ratio}");
}

#[test]
fn coercivity_probe_bounds_the_rayleigh_minimum() {
    let mesh = mesh(2, 1.0, 16);
    let small = coercivity_probe(&mesh, &ElasticParams::new(1.0, 1.0, 1e-3).unwrap(), 50, 1).unwrap();
    assert!(small.probe_min > 0.0 && small.rayleigh_min > 0.0);
    assert!(small.probe_min >= small.rayleigh_min - 1e-12);
    let large = coercivity_probe(&mesh, &ElasticParams::new(1.0, 1.0, 50.0).unwrap(), 50, 1).unwrap();
    assert!(large.probe_min >= large.rayleigh_min - 1e-12);
    assert!(large.rayleigh_min < 0.0, "high frequency is not coercive: {}", large.rayleigh_min);
}

#[test]
fn rellich_residual_converges_at_second_order() {
    let p = ElasticParams::new(1.0, 1.0, 1.0).unwrap();
    let strip = flat_strip(1.5);
    let zero = rellich_terms(&DiscreteField::zeros(&mesh(2, 1.5, 8)), &p, |_, _| [C64::new(0.0, 0.0); 3]).unwrap();
    assert_eq!(zero.residual, 0.0);
    let res: Vec<f64> = [32, 64]
        .iter()
        .map(|&nz| {
            let sys = assemble_system(&mesh(2, 1.5, nz), &p, &strip, &source()).unwrap();
            let u = solve_field(&sys).unwrap();
            rellich_residual(&u, &source(), &strip, &p).unwrap().residual.abs()
        })
        .collect();
    let ratio = res[0] / res[1];
    assert!((3.0..5.5).contains(&ratio), "{res:?}");
}

#[test]
fn assembly_rejects_mismatched_mesh() {
    let p = ElasticParams::new(1.0, 1.0, 1.0).unwrap();
    let bad = StripMesh::uniform(SpectralGrid::new([1, 1], CELL), 0.1, 1.5, 8, 3).unwrap();
    assert!(assemble_system(&bad, &p, &flat_strip(1.5), &source()).is_err());
}
