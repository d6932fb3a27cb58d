use std::f64::consts::{E, PI};

use coulomb_info::measures::{
    delta_log_abs_p, delta_log_x, delta_x, fisher_momentum, fisher_position, heisenberg_product,
    log_uncertainty_product, onicescu_gs_position, p_moments, shannon_gs_position, shannon_momentum,
    shannon_rydberg_asymptotic, MeasureOptions, MeasureSet, PRODUCTS,
};
use coulomb_info::oracle::{MomentumQuantity, Oracle};
use coulomb_info::specfun::EULER_GAMMA;
use coulomb_info::QuantumState;
use proptest::prelude::*;

fn st(n: u32, z: f64) -> QuantumState {
    QuantumState::new(n, z).unwrap()
}

const Z_GRID: [f64; 4] = [0.5, 1.0, 2.0, 10.0];

fn position_shannon_length(s: QuantumState, oracle: &Oracle) -> f64 {
    if s.n() >= 10 {
        shannon_rydberg_asymptotic(s).length
    } else {
        let r = oracle.shannon_position(s).entropy;
        assert!(r.converged);
        r.value.exp()
    }
}

#[test]
fn position_inequalities() {
    let o = Oracle::default();
    let bound = (2.0 * PI * E).sqrt();
    for n in 1..=14u32 {
        for z in Z_GRID {
            let s = st(n, z);
            let dx = delta_x(s);
            assert!(fisher_position(s).length < dx, "n={n} Z={z}");
            let h = position_shannon_length(s, &o);
            assert!(h < bound * dx, "n={n} Z={z}: H={h} Δx={dx}");
        }
    }
}

#[test]
fn ground_state_chain() {
    for z in Z_GRID {
        let s = st(1, z);
        let fx = fisher_position(s).length;
        let dx = delta_x(s);
        let lo = onicescu_gs_position(z);
        let h = shannon_gs_position(z).unwrap().length;
        assert!(fx < dx && dx < lo && lo < h, "Z={z}: {fx} {dx} {lo} {h}");
    }
}

#[test]
fn momentum_chain() {
    for n in 1..=20u32 {
        for z in Z_GRID {
            let s = st(n, z);
            let fp = fisher_momentum(s).length;
            let dp = p_moments(s).delta_p;
            let h = shannon_momentum(s).length;
            assert!(fp < dp && dp < h, "n={n} Z={z}");
        }
    }
}

#[test]
fn entropic_uncertainty() {
    let o = Oracle::default();
    for n in 1..=10u32 {
        for z in Z_GRID {
            let s = st(n, z);
            let product = position_shannon_length(s, &o) * shannon_momentum(s).length;
            assert!(product >= PI * E, "n={n} Z={z}: {product}");
        }
    }
    let gs = shannon_gs_position(1.0).unwrap().length * shannon_momentum(st(1, 1.0)).length;
    assert!((gs - 8.0 * PI * (2.0 * (EULER_GAMMA - 1.0)).exp()).abs() < 1e-13);
    assert!((gs - 10.7898).abs() < 1e-4);
    for n in [50u32, 200] {
        let s = st(n, 3.0);
        let product = shannon_rydberg_asymptotic(s).length * shannon_momentum(s).length;
        let want = (4.0 * PI / (E * E)).powi(2) * f64::from(n);
        assert!((product - want).abs() <= 1e-12 * want);
    }
}

#[test]
fn fisher_by_parts() {
    let o = Oracle::default();
    for n in 1..=10u32 {
        let s = st(n, 1.7);
        let f = o.fisher_position(s);
        let p2 = o.momentum_measure(s, MomentumQuantity::Moment { k: 2 }).unwrap();
        assert!(f.converged && p2.converged);
        assert!((f.value - 4.0 * p2.value).abs() <= 1e-6 * f.value, "n={n}");
    }
}

#[test]
fn computed_records_factorize() {
    let o = Oracle::default();
    for n in [1u32, 2, 5] {
        for z in [0.5, 3.0] {
            let set = MeasureSet::compute(
                st(n, z),
                MeasureOptions {
                    numeric: true,
                    asymptotic: false,
                },
                &o,
            );
            assert!(set.unconverged.is_empty());
            for (name, a, b) in PRODUCTS {
                let v = set.products[name];
                assert_eq!(v, set.get(a).unwrap() * set.get(b).unwrap(), "{name}");
            }
        }
    }
}

fn z_independent(s: QuantumState) -> [f64; 6] {
    [
        heisenberg_product(s),
        fisher_position(s).length * fisher_momentum(s).length,
        delta_log_x(s),
        delta_log_abs_p(s),
        log_uncertainty_product(s),
        shannon_rydberg_asymptotic(s).length * shannon_momentum(s).length,
    ]
}

proptest! {
    #[test]
    fn products_do_not_depend_on_z(n in 1u32..60, z in 0.05f64..50.0) {
        let a = z_independent(st(n, z));
        let b = z_independent(st(n, 1.0));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-10 * y.abs());
        }
    }

    #[test]
    fn heisenberg_bound(n in 1u32..500, z in 0.01f64..100.0) {
        let s = st(n, z);
        prop_assert!(delta_x(s) * p_moments(s).delta_p >= 0.5);
    }

    #[test]
    fn lengths_positive(n in 1u32..40, z in 0.05f64..50.0) {
        let set = MeasureSet::closed_only(st(n, z));
        for key in ["delta_x", "delta_p", "fisher_length_x", "fisher_length_p", "onicescu_p", "shannon_length_p"] {
            prop_assert!(set.get(key).unwrap() > 0.0);
        }
    }
}
