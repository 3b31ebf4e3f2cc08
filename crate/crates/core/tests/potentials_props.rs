use monopole_core::potentials::{
    axial_gauge_jet, axial_gauge_potential, coulomb_field, curl_fd, curl_of, dirac_string_jet, dirac_string_potential,
    duality_rotate, maxwell_residual, norm, EmState, FieldTerm, Sources,
};
use monopole_core::sampling::random_point3;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn state(a: [f64; 8]) -> EmState {
    EmState {
        terms: vec![
            FieldTerm::PlaneWave {
                e_amp: [a[0], a[1], 0.0],
                h_amp: [a[2], a[3], 0.2],
                omega: 1.0 + a[4].abs(),
                k: [0.3, a[5], 0.8],
                phase: a[6],
            },
            FieldTerm::Coulomb { e: a[7], h: -0.4 },
        ],
        sources: Sources {
            rho_e: 0.1,
            mu_m: a[0],
            j: [0.0, a[1], 0.3],
            k: [a[2], 0.0, -0.2],
        },
        c: 1.0,
    }
}

fn pts() -> Vec<[f64; 4]> {
    (0..30)
        .map(|i| {
            let s = i as f64;
            [0.3 * s, 1.5 + (0.7 * s).sin(), (1.3 * s).cos(), 0.1 * s - 1.0]
        })
        .collect()
}

proptest! {
    #[test]
    fn duality_preserves_residual(a in prop::array::uniform8(-1.0f64..1.0), gamma in -7.0f64..7.0) {
        let s = state(a);
        let before = maxwell_residual(&s, &pts()).unwrap();
        let after = maxwell_residual(&duality_rotate(&s, gamma), &pts()).unwrap();
        prop_assert!((before - after).abs() <= 1e-12 * (1.0 + before));
    }

    #[test]
    fn duality_rotations_compose(a in prop::array::uniform8(-1.0f64..1.0), g1 in -3.0f64..3.0, g2 in -3.0f64..3.0) {
        let s = state(a);
        let twice = duality_rotate(&duality_rotate(&s, g1), g2);
        let once = duality_rotate(&s, g1 + g2);
        for p in pts() {
            let (e1, h1) = twice.fields(&p).unwrap();
            let (e2, h2) = once.fields(&p).unwrap();
            for i in 0..3 {
                prop_assert!((e1[i] - e2[i]).abs() <= 1e-12 && (h1[i] - h2[i]).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn both_gauges_curl_to_coulomb_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut n = 0;
    while n < 1000 {
        let p = random_point3(&mut rng, 2.0);
        if p[0].hypot(p[1]) < 0.05 || norm(&p) < 0.1 {
            continue;
        }
        n += 1;
        let want = coulomb_field(&p, 1.3);
        let scale = norm(&want);
        let fd = [
            curl_fd(|q| dirac_string_potential(q, 1.3), &p).unwrap(),
            curl_fd(|q| axial_gauge_potential(q, 1.3), &p).unwrap(),
        ];
        let an = [
            curl_of(&dirac_string_jet(&p, 1.3).unwrap().1),
            curl_of(&axial_gauge_jet(&p, 1.3).unwrap().1),
        ];
        for i in 0..3 {
            for c in &fd {
                assert!((c[i] - want[i]).abs() <= 1e-8 * scale, "{p:?}");
            }
            for c in &an {
                assert!((c[i] - want[i]).abs() <= 1e-12 * scale, "{p:?}");
            }
        }
    }
}

#[test]
fn gauge_difference_is_curl_free() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut n = 0;
    while n < 100 {
        let p = random_point3(&mut rng, 2.0);
        if p[0].hypot(p[1]) < 0.05 || norm(&p) < 0.1 {
            continue;
        }
        n += 1;
        let diff = |q: &[f64; 3]| -> monopole_core::Result<[f64; 3]> {
            let a = dirac_string_potential(q, 1.0)?;
            let b = axial_gauge_potential(q, 1.0)?;
            Ok([a[0] - b[0], a[1] - b[1], a[2] - b[2]])
        };
        let c = curl_fd(diff, &p).unwrap();
        assert!(norm(&c) <= 1e-8 * norm(&coulomb_field(&p, 1.0)), "{p:?} {c:?}");
    }
}
