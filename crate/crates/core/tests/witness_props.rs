use kitai_core::funcalg::{parse_exppoly, power_affine_volterra, ExpPoly, Sign};
use kitai_core::numeric::{ratio, Rational};
use kitai_core::report::Status;
use kitai_core::shiftspace::{jstar, Space, TailedVector, WeightSeq};
use kitai_core::witness::{
    atzmon_check, embedding_constant, forward_witness, geometric_grid, inverse_witness, orbit_norms,
};
use num_traits::{One, Signed};
use proptest::prelude::*;

const SEEDS: [&str; 3] = ["1", "t", "t^2 - 1/3"];

#[test]
fn embedding_constant_enclosure() {
    let c = embedding_constant(256);
    assert!(c.lower().to_f64() >= 1.47 && c.upper().to_f64() <= 1.49, "{c}");
    let rads: Vec<f64> = [32, 64, 128, 256, 512].iter().map(|&p| embedding_constant(p).rad().to_f64()).collect();
    assert!(rads.windows(2).all(|w| w[1] < w[0]), "{rads:?}");
}

#[test]
fn certificates_decrease_for_all_seeds() {
    let grid = [10, 100, 1000];
    for s in SEEDS {
        let f = parse_exppoly(s).unwrap();
        let fw = forward_witness(&f, &Rational::one(), &grid, 256).unwrap();
        assert_eq!(fw.decreasing, Status::Pass, "forward {s}");
        let inv = inverse_witness(&f, &Rational::one(), &grid, 256).unwrap();
        assert_eq!(inv.decreasing, Status::Pass, "inverse {s}");
    }
}

#[test]
fn certificate_dominates_truncated_orbit() {
    // ||J*((I - cV)^n 1)||_1 restricted to 0..=64 is at most B_n
    let f = ExpPoly::one();
    let grid: Vec<u64> = (0..=12).collect();
    let cert = forward_witness(&f, &Rational::one(), &grid, 256).unwrap();
    for (i, &n) in grid.iter().enumerate() {
        let g = power_affine_volterra(&f, &ratio(1, 2), n, Sign::Minus).unwrap();
        let l1: Rational = jstar(&g, 64, 256).unwrap().exact_coords().unwrap().iter().map(|x| x.abs()).sum();
        assert!(l1 <= cert.bounds[i].upper().to_rational(), "n = {n}");
    }
}

#[test]
fn harmonic_exponents() {
    // (I + T)^n e_k grows like n^k / k! for harmonic T
    let grid = geometric_grid(64, 4096);
    for k in 1..=3 {
        let x = TailedVector::basis(Space::L1, k);
        let r = atzmon_check(&WeightSeq::harmonic(), &x, &grid, &ratio(1, 20), 256).unwrap();
        assert_eq!(r.target_exponent, k as u64);
        assert_eq!(r.status, Status::Pass, "k = {k}");
    }
}

#[test]
fn reports_are_deterministic() {
    let f = parse_exppoly("t").unwrap();
    let a = forward_witness(&f, &ratio(1, 2), &[4, 16, 64], 192).unwrap();
    let b = forward_witness(&f, &ratio(1, 2), &[4, 16, 64], 192).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn orbit_norms_enclose_exact_l1(coords in prop::collection::vec(-6i64..6, 1..6), n in 0u64..40, lam in -3i64..=3) {
        // the exact binomial sum and the certified norm agree
        let x = TailedVector::finite(Space::L1, coords.iter().map(|&c| ratio(c, 1)).collect());
        let w = WeightSeq::power(2).unwrap();
        let lambda = ratio(lam, 2);
        let r = orbit_norms(&w, &lambda, &x, &[n], kitai_core::funcalg::Direction::Forward, 128).unwrap();
        let y = kitai_core::shiftspace::affine_power(&w, &lambda, n, &x).unwrap();
        let exact: Rational = y.exact_coords().unwrap().iter().map(|v| v.abs()).sum();
        prop_assert!(r.norms[0].contains_rational(&exact));
    }
}
