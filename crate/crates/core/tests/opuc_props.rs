mod common;

use common::{alphas, c, stratified, unimodular};
use popuc::electro::interlacing_check;
use popuc::opuc::{bernstein_szego_weight, gram_schmidt_discrete, popuc, szego_sequence, MeasureSpec};
use popuc::{Complex64, ComplexPoly};
use proptest::prelude::*;

fn max_gap(a: &ComplexPoly, b: &ComplexPoly) -> f64 {
    (a - b).max_abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dual_recursion_holds(a in alphas(1..=15, 0.95)) {
        let n = a.len();
        let seq = szego_sequence(&a, n).unwrap();
        let z = ComplexPoly::monomial(c(1.0, 0.0), 1);
        for k in 0..n {
            let expected = seq.reversed(k).unwrap() - &(&z * seq.monic(k).unwrap()).scale(a[k]);
            prop_assert!(max_gap(seq.reversed(k + 1).unwrap(), &expected) < 1e-12);
        }
    }

    #[test]
    fn alphas_are_recovered_from_constant_terms(a in alphas(1..=15, 0.95)) {
        let n = a.len();
        let seq = szego_sequence(&a, n).unwrap();
        for (k, alpha) in a.iter().enumerate() {
            let recovered = -seq.monic(k + 1).unwrap().coeff(0).conj();
            prop_assert!((recovered - alpha).norm() < 1e-12);
        }
    }

    #[test]
    fn verblunsky_round_trip(points in stratified(2..=10, 0.45)) {
        let n = points.len();
        let discrete = gram_schmidt_discrete(&points).unwrap();
        let again = szego_sequence(&discrete.alphas()[..n - 1], n - 1).unwrap();
        for k in 0..n {
            prop_assert!(max_gap(discrete.monic(k).unwrap(), again.monic(k).unwrap()) < 1e-9, "k = {k}");
        }
    }

    #[test]
    fn popuc_zeros_interlace(a in alphas(1..=20, 0.8), beta in unimodular(), tau in unimodular()) {
        prop_assume!((beta - tau).norm() > 1e-3);
        let n = a.len() + 1;
        let mut a = a;
        a.push(c(0.0, 0.0));
        let seq = szego_sequence(&a, n).unwrap();
        let zb = popuc(&seq, n, beta).unwrap().roots().unwrap();
        let zt = popuc(&seq, n, tau).unwrap().roots().unwrap();
        prop_assert!(interlacing_check(&zb, &zt).unwrap());
    }

    #[test]
    fn bernstein_szego_lift_keeps_the_popuc(points in stratified(2..=6, 0.2), beta in unimodular()) {
        let n = points.len();
        let discrete = gram_schmidt_discrete(&points).unwrap();
        let lifted = bernstein_szego_weight(&discrete, n).unwrap();
        let seq = lifted.opuc_sequence(n).unwrap();
        let ours = popuc(&seq, n, beta).unwrap();
        let original = popuc(&discrete, n, beta).unwrap();
        prop_assert!(max_gap(&ours, &original) < 1e-9, "{}", max_gap(&ours, &original));
    }
}

#[test]
fn lift_of_a_named_measure_keeps_its_popuc() {
    let beta = Complex64::from_polar(1.0, 0.4);
    for m in [MeasureSpec::single_moment(), MeasureSpec::bernstein_szego(c(0.3, -0.4)).unwrap()] {
        for n in 2..=6 {
            let seq = m.opuc_sequence(n).unwrap();
            let lifted = bernstein_szego_weight(&seq, n).unwrap().opuc_sequence(n).unwrap();
            let gap = max_gap(&popuc(&seq, n, beta).unwrap(), &popuc(&lifted, n, beta).unwrap());
            assert!(gap < 1e-9, "{:?} n={n}: {gap}", m.name());
        }
    }
}
