use mdlvol_core::capacity::{capacity_limit, capacity_mc, capacity_upper_bound};
use mdlvol_core::experiments::{generate_dataset, ridge_fit_dual, ridge_fit_primal};
use mdlvol_core::lattice::{
    build_boolean_lattice, build_lattice_from_covers, full_metric_tensor, sample_eta, Lattice,
};
use mdlvol_core::numerics::log_det_psd;
use mdlvol_core::perceptron::{Activation, XiPanel};
use mdlvol_core::regression::{shifted_log_det, DesignMatrix};
use mdlvol_core::{RngStream, SymmetricMatrix};
use proptest::prelude::*;

fn design(rows: usize, cols: usize, seed: u64) -> DesignMatrix {
    DesignMatrix::seeded_gaussian(rows, cols, &RngStream::new(seed)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn weinstein_aronszajn(rows in 1usize..=30, cols in 1usize..=50, seed in any::<u64>(),
                           a in prop::sample::select(vec![0.01, 1.0, 100.0])) {
        let x = design(rows, cols, seed);
        let wide = SymmetricMatrix::gram_of_columns(x.as_matrix()).scaled_shifted(a, 1.0);
        let tall = SymmetricMatrix::gram_of_rows(x.as_matrix()).scaled_shifted(a, 1.0);
        let (l, r) = (log_det_psd(&wide, 0.0).unwrap(), log_det_psd(&tall, 0.0).unwrap());
        prop_assert!((l - r).abs() <= 1e-8, "{} vs {}", l, r);
    }

    #[test]
    fn shifted_log_det_is_monotone(rows in 1usize..=30, cols in 1usize..=50, seed in any::<u64>(),
                                   a1 in 1e-4f64..1e3, ratio in 1.0f64..100.0) {
        let x = design(rows, cols, seed);
        let a2 = a1 * ratio;
        prop_assert!(shifted_log_det(&x, a1).unwrap() <= shifted_log_det(&x, a2).unwrap());
    }

    #[test]
    fn ridge_routes_agree(n in 2usize..=30, extra in 1usize..=40, seed in any::<u64>(),
                          alpha in prop::sample::select(vec![1e-2, 1.0, 1e2])) {
        let ds = generate_dataset(n, n + extra, 1, 0.25, 1.0, &RngStream::new(seed)).unwrap();
        let p = ridge_fit_primal(&ds.x, &ds.y, alpha).unwrap();
        let d = ridge_fit_dual(&ds.x, &ds.y, alpha).unwrap();
        prop_assert!((p - d).amax() < 1e-8);
    }

    #[test]
    fn capacity_respects_jensen_bound(d in 1usize..=40, n in 1usize..=8, snr in 0.01f64..1e3, seed in any::<u64>()) {
        let c = capacity_mc(d, n, snr, 400, &RngStream::new(seed)).unwrap();
        prop_assert!(c.value <= capacity_upper_bound(d, n, snr).unwrap() + 3.0 * c.stderr);
    }

    /// Subsets of {0,1}^n closed under union and containing ∅ are lattices
    /// whose join is bitwise OR.
    #[test]
    fn union_closed_families_are_lattices(n in 2u32..=5, picks in prop::collection::vec(any::<u32>(), 1..8)) {
        let mut family: Vec<u32> = vec![0];
        family.extend(picks.iter().map(|p| p & ((1 << n) - 1)));
        loop {
            let mut grown = family.clone();
            for &a in &family {
                for &b in &family {
                    grown.push(a | b);
                }
            }
            grown.sort_unstable();
            grown.dedup();
            let done = grown == family;
            family = grown;
            if done {
                break;
            }
        }
        let pairs: Vec<(usize, usize)> = (0..family.len())
            .flat_map(|i| (0..family.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && family[i] & family[j] == family[i])
            .collect();
        let labels: Vec<String> = family.iter().map(|m| format!("{m}")).collect();
        let lat = build_lattice_from_covers(family.len(), &pairs, Some(&labels)).unwrap();
        lat.check_structure().unwrap();
        for i in 0..lat.size() {
            for j in 0..lat.size() {
                let (a, b): (u32, u32) = (lat.label(i).parse().unwrap(), lat.label(j).parse().unwrap());
                prop_assert_eq!(lat.label(lat.join(i, j)).parse::<u32>().unwrap(), a | b);
            }
        }
        assert_unit_upper_triangular(&lat);
    }
}

fn assert_unit_upper_triangular(lat: &Lattice) {
    let z = lat.zeta_matrix().unwrap();
    for i in 0..lat.size() {
        assert_eq!(z[(i, i)], 1.0);
        for j in 0..i {
            assert_eq!(z[(i, j)], 0.0);
        }
    }
}

#[test]
fn zeta_is_unit_upper_triangular() {
    for n in 1..=6 {
        assert_unit_upper_triangular(&build_boolean_lattice(n).unwrap());
    }
    let diamond = build_lattice_from_covers(4, &[(0, 1), (0, 2), (1, 3), (2, 3)], None).unwrap();
    assert_unit_upper_triangular(&diamond);
}

#[test]
fn sampled_eta_is_order_compatible_with_zero_first_row() {
    let diamond = build_lattice_from_covers(4, &[(0, 1), (0, 2), (1, 3), (2, 3)], None).unwrap();
    let pentagon =
        build_lattice_from_covers(5, &[(0, 1), (1, 2), (0, 3), (2, 4), (3, 4)], None).unwrap();
    for (k, lat) in [build_boolean_lattice(4).unwrap(), diamond, pentagon].iter().enumerate() {
        let mut rng = RngStream::new(k as u64).rng();
        for _ in 0..500 {
            let (_, eta) = sample_eta(lat, &mut rng);
            assert!(eta.is_order_compatible(lat));
            let g = full_metric_tensor(lat, &eta);
            assert!((0..lat.size()).all(|j| g.get(0, j) == 0.0));
        }
    }
}

#[test]
fn capacity_saturates_in_d() {
    let rng = RngStream::new(20);
    let c = |d| capacity_mc(d, 4, 100.0, 4000, &rng).unwrap().value;
    let (c40, c400) = (c(40), c(400));
    assert!((c40 - c400).abs() / c400 < 0.05, "{c40} vs {c400}");
    assert!(c(8) < c40);
}

#[test]
fn capacity_converges_to_limit() {
    for n in [2, 4] {
        let c = capacity_mc(100 * n, n, 100.0, 4000, &RngStream::new(n as u64)).unwrap();
        let limit = capacity_limit(n, 100.0);
        assert!((c.value - limit).abs() <= (0.05 * limit).max(3.0 * c.stderr));
        assert!(c.value <= capacity_upper_bound(100 * n, n, 100.0).unwrap() + 3.0 * c.stderr);
    }
}

#[test]
fn perceptron_coefficients_nonnegative() {
    let panel = XiPanel::draw(10_000, &RngStream::new(30));
    let mut w = 0.0;
    while w <= 100.0 {
        let c = panel.coefficients(w, Activation::Sigmoid);
        assert!(c.c1 >= 0.0 && c.c2 >= 0.0 && c.c1 <= 0.25, "w={w}");
        w += 0.5;
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| capacity_mc(5, 3, 10.0, 3000, &RngStream::new(40)).unwrap())
    };
    assert_eq!(run(1), run(4));
}
