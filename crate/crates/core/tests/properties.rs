//! Randomized invariants across the library.

use proptest::prelude::*;

use rough_elastic::geometry::{
    inverse_transform, make_profile, sample_ensemble, transform_map, CutoffFn, EnsembleLaw, FourierTerm, LawTerm,
    ProfileSpec, SourceMode, SourceSpec, SurfaceProfile,
};
use rough_elastic::params::{bound_constants, stability_constants, ElasticParams, StripGeometry};
use rough_elastic::spectral::{branch_pair, decomposition_matrices, dtn_symbol, ModeAmplitude};
use rough_elastic::C64;

fn params() -> impl Strategy<Value = ElasticParams> {
    (0.2f64..4.0, -0.6f64..1.0, 0.05f64..6.0).prop_map(|(mu, l, w)| ElasticParams::new(l * mu, mu, w).unwrap())
}

fn xi() -> impl Strategy<Value = [f64; 2]> {
    (0.0f64..12.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| [r * t.cos(), r * t.sin()])
}

fn cvec3() -> impl Strategy<Value = [C64; 3]> {
    prop::array::uniform3((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C64::new(a, b)))
}

const CELL: [f64; 2] = [2.0, 3.0];

fn geom() -> StripGeometry {
    StripGeometry::new(-0.3, 0.3, 1.6, CELL).unwrap()
}

/// A small random surface around 0 with `|f − f0| < 0.25`.
fn surface() -> impl Strategy<Value = SurfaceProfile> {
    prop::collection::vec((-2i64..=2, -2i64..=2, -0.06f64..0.06, -0.06f64..0.06), 1..4).prop_map(|terms| {
        let spec = ProfileSpec {
            offset: 0.0,
            terms: terms.into_iter().map(|(a, b, c, s)| FourierTerm { j: [a, b], cos: c, sin: s }).collect(),
        };
        make_profile(&spec, &geom(), [8, 8]).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wavenumbers_and_symbol_constants(p in params()) {
        prop_assert!(p.kp() < p.ks());
        let s = stability_constants(&p);
        prop_assert!(s.k > 1.0 / p.mu().sqrt());
        prop_assert!(s.small_c_k > 1.0 / (p.lambda() + 2.0 * p.mu()));
    }

    #[test]
    fn bound_constants_monotone(p in params(), l in 0.0f64..3.0, dl in 0.0f64..2.0, dw in 0.01f64..2.0) {
        let g = geom();
        let a = bound_constants(&p, &g, l, 1.0).unwrap();
        let b = bound_constants(&p, &g, l + dl, 1.0).unwrap();
        prop_assert!(b.c1 >= a.c1 && b.c2 >= a.c2 && b.c6 >= a.c6);
        prop_assert!(b.c3 == a.c3 && b.c4 == a.c4 && b.c5 == a.c5);
        let q = p.with_omega(p.omega() + dw).unwrap();
        prop_assert!(bound_constants(&q, &g, l, 1.0).unwrap().c4 > a.c4);
    }

    #[test]
    fn decomposition_restricted_inverse(p in params(), x in xi(), v in cvec3()) {
        let (dt, d) = decomposition_matrices(x, &p).unwrap();
        let w: Vec<C64> = (0..4).map(|r| (0..3).map(|c| d[r][c] * v[c]).sum()).collect();
        let back: Vec<C64> = (0..4).map(|r| (0..4).map(|c| dt[r][c] * w[c]).sum()).collect();
        let scale = v.iter().map(|z| z.norm()).fold(1e-300, f64::max);
        for k in 0..3 {
            prop_assert!((back[k] - v[k]).norm() <= 1e-10 * scale);
        }
        prop_assert!(back[3].norm() <= 1e-10 * scale);
    }

    #[test]
    fn symbol_sign_structure(p in params(), x in xi()) {
        let m = dtn_symbol(x, &p).m;
        let s = m.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
        prop_assert!((m[0][1] - m[1][0]).norm() <= 1e-12 * s);
        prop_assert!((m[0][2] + m[2][0]).norm() <= 1e-12 * s);
        prop_assert!((m[1][2] + m[2][1]).norm() <= 1e-12 * s);
    }

    #[test]
    fn shear_amplitude_is_transverse(p in params(), x in xi(), u in cvec3()) {
        let a = ModeAmplitude::from_boundary(x, &u, &p).unwrap();
        let (_, g) = branch_pair(x, &p);
        let dotp = a.a_s[0] * x[0] + a.a_s[1] * x[1] + a.a_s[2] * g;
        let scale = a.a_s.iter().map(|z| z.norm()).fold(0.0, f64::max) * (x[0].hypot(x[1]) + g.norm()) + 1e-300;
        prop_assert!(dotp.norm() <= 1e-12 * scale.max(1.0));
        // boundary values are reproduced
        let back = a.boundary_value(x, &p);
        for k in 0..3 {
            prop_assert!((back[k] - u[k]).norm() <= 1e-10);
        }
    }

    #[test]
    fn transform_jacobian_matches_finite_differences(
        f in surface(),
        y1 in 0.0f64..2.0,
        y2 in 0.0f64..3.0,
        s in 0.0f64..1.0,
    ) {
        let f0 = SurfaceProfile::flat(0.0, CELL);
        let cutoff = CutoffFn::new(0.2, 1.6).unwrap();
        // stay away from the kinks of the cutoff at t = δ and t = γ
        let y3 = [0.05 + 0.1 * s, 0.3 + 1.2 * s][(s > 0.5) as usize];
        let y = [y1, y2, y3];
        let td = transform_map(y, &f0, &f, &cutoff).unwrap();
        let x = |p: [f64; 3]| transform_map(p, &f0, &f, &cutoff).unwrap().x;
        let h = 1e-3;
        for j in 0..3 {
            let diff = |step: f64| {
                let mut a = y;
                let mut b = y;
                a[j] += step;
                b[j] -= step;
                let (xa, xb) = (x(a), x(b));
                [0, 1, 2].map(|i| (xa[i] - xb[i]) / (2.0 * step))
            };
            let (d1, d2) = (diff(h), diff(h / 2.0));
            for i in 0..3 {
                let rich = (4.0 * d2[i] - d1[i]) / 3.0;
                prop_assert!((rich - td.jac[i][j]).abs() <= 1e-8, "J[{}][{}] {} vs {}", i, j, rich, td.jac[i][j]);
            }
        }
        prop_assert!((td.det - (1.0 + td.row[2])).abs() <= 1e-15);
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| td.jac_inv[i][k] * td.jac[k][j]).sum();
                let delta = if i == j { 1.0 } else { 0.0 };
                prop_assert!((v - delta).abs() <= 1e-13);
            }
        }
        let back = inverse_transform(td.x, &f0, &f, &cutoff).unwrap();
        prop_assert!((back[2] - y[2]).abs() <= 1e-12);
    }

    #[test]
    fn transform_fixes_top_and_maps_reference_surface(f in surface(), y1 in 0.0f64..2.0, y2 in 0.0f64..3.0) {
        let f0 = SurfaceProfile::flat(0.0, CELL);
        let cutoff = CutoffFn::new(0.2, 1.6).unwrap();
        let top = transform_map([y1, y2, 1.6], &f0, &f, &cutoff).unwrap();
        prop_assert_eq!(top.x, [y1, y2, 1.6]);
        let bottom = transform_map([y1, y2, 0.0], &f0, &f, &cutoff).unwrap();
        prop_assert!((bottom.x[2] - f.value([y1, y2])).abs() <= 1e-15);
    }

    #[test]
    fn identity_when_surfaces_agree(y1 in 0.0f64..2.0, y2 in 0.0f64..3.0, y3 in 0.0f64..1.6) {
        let f0 = SurfaceProfile::flat(0.0, CELL);
        let td = transform_map([y1, y2, y3], &f0, &f0, &CutoffFn::new(0.2, 1.6).unwrap()).unwrap();
        prop_assert_eq!(td.x, [y1, y2, y3]);
        prop_assert_eq!(td.det, 1.0);
    }
}

fn source() -> SourceSpec {
    SourceSpec {
        amplitude: 1.0,
        center: 0.9,
        width: 0.2,
        support: [0.5, 1.4],
        modes: vec![SourceMode { j: [0, 0], polarization: [1.0, 0.0, 0.0], phase: 0.0 }],
    }
}

#[test]
fn law_within_class_never_rejects() {
    let law = EnsembleLaw {
        terms: vec![
            LawTerm { j: [1, 0], max_amp: 1.0 },
            LawTerm { j: [0, 1], max_amp: 1.0 },
            LawTerm { j: [1, 1], max_amp: 0.5 },
        ],
        source_jitter: 0.0,
    };
    let m0 = 0.25;
    let law = law.scaled(m0 / law.worst_case(CELL));
    let f0 = SurfaceProfile::flat(0.0, CELL);
    let s = sample_ensemble(5, 10_000, m0, &law, &geom(), &f0, &source(), [5, 5]).unwrap();
    assert_eq!(s.len(), 10_000);
    assert_eq!(s.iter().map(|x| x.rejections).sum::<usize>(), 0);
    assert!(s.iter().all(|x| x.surface.distance_1inf(&f0) <= m0 * (1.0 + 1e-12)));
    assert!(s.iter().enumerate().all(|(i, x)| x.sample_id == i));
}

#[test]
fn ensemble_is_reproducible_and_thread_independent() {
    let law = EnsembleLaw {
        terms: vec![LawTerm { j: [1, 0], max_amp: 0.03 }, LawTerm { j: [1, -1], max_amp: 0.02 }],
        source_jitter: 0.1,
    };
    let f0 = SurfaceProfile::flat(0.0, CELL);
    let draw = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| sample_ensemble(42, 100, 0.5, &law, &geom(), &f0, &source(), [5, 5]).unwrap())
    };
    let a = draw(1);
    assert_eq!(a, draw(4));
    assert_eq!(a, draw(4));
    assert_ne!(a[0].surface, a[1].surface);
}
