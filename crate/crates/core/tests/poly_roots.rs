mod common;

use common::{alphas, c, complex_in, unimodular, unit};
use nalgebra::{DMatrix, Schur};
use popuc::opuc::{popuc, szego_sequence};
use popuc::poly::sort_roots;
use popuc::{Complex64, ComplexPoly};
use proptest::prelude::*;

/// Eigenvalues of the companion matrix of `p`.
fn companion_roots(p: &ComplexPoly) -> Vec<Complex64> {
    let n = p.degree();
    let a = p.coeffs();
    let lead = p.leading();
    let m = DMatrix::from_fn(n, n, |i, j| {
        if i == 0 {
            -a[n - 1 - j] / lead
        } else if i == j + 1 {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let schur = Schur::try_new(m, 1e-15, 10_000).expect("QR iteration converges");
    let mut roots: Vec<Complex64> = schur.eigenvalues().expect("complex Schur form").iter().copied().collect();
    sort_roots(&mut roots);
    roots
}

/// Each root of `ours` matched to a distinct oracle root; the largest gap.
fn matching_gap(ours: &[Complex64], oracle: &[Complex64]) -> f64 {
    assert_eq!(ours.len(), oracle.len());
    let mut used = vec![false; oracle.len()];
    let mut worst = 0.0f64;
    for r in ours {
        let (k, d) = oracle
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, s)| (k, (r - s).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

fn min_pairwise_distance(roots: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in roots.iter().enumerate() {
        for b in &roots[..i] {
            best = best.min((a - b).norm());
        }
    }
    best
}

#[test]
fn companion_oracle_on_fixed_polynomials() {
    let cases = vec![
        ComplexPoly::from_roots(&[c(1.0, 0.0), c(-2.0, 0.5), c(0.3, -0.7), c(0.0, 3.0)]),
        ComplexPoly::from_real(&[-1.0, 0.0, 0.0, 0.0, 0.0, 1.0]),
        ComplexPoly::new(vec![c(2.0, 1.0), c(-1.0, 0.0), c(0.5, 0.5), c(0.0, -3.0), c(1.0, 1.0)]),
    ];
    for p in cases {
        let gap = matching_gap(&p.roots().unwrap(), &companion_roots(&p));
        assert!(gap < 1e-10, "{p}: {gap}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn roots_agree_with_companion_eigenvalues(coeffs in prop::collection::vec(complex_in(2.0), 3..12)) {
        let mut coeffs = coeffs;
        let last = coeffs.len() - 1;
        if coeffs[last].norm() < 0.1 {
            coeffs[last] = c(1.0, 0.0);
        }
        let p = ComplexPoly::new(coeffs);
        let ours = p.roots().unwrap();
        let oracle = companion_roots(&p);
        // clustered roots are only determined to about sqrt(eps)
        let sep = min_pairwise_distance(&oracle).min(1.0);
        let gap = matching_gap(&ours, &oracle);
        prop_assert!(gap < 1e-9 / sep.max(1e-3), "gap {gap} sep {sep}");
    }

    #[test]
    fn popuc_roots_are_unimodular_and_distinct(a in alphas(1..=29, 0.8), beta in unimodular()) {
        let n = a.len() + 1;
        let mut a = a;
        a.push(c(0.0, 0.0));
        let seq = szego_sequence(&a, n).unwrap();
        let roots = popuc(&seq, n, beta).unwrap().roots().unwrap();
        prop_assert_eq!(roots.len(), n);
        for r in &roots {
            prop_assert!((r.norm() - 1.0).abs() < 1e-10, "|r| = {}", r.norm());
        }
        prop_assert!(min_pairwise_distance(&roots) > 1e-8);
    }

    #[test]
    fn opuc_roots_lie_in_the_disk(a in alphas(1..=20, 0.95)) {
        let n = a.len();
        let seq = szego_sequence(&a, n).unwrap();
        for r in seq.monic(n).unwrap().roots().unwrap() {
            prop_assert!(r.norm() < 1.0, "|r| = {}", r.norm());
        }
    }

    #[test]
    fn reversal_is_an_involution(coeffs in prop::collection::vec(complex_in(3.0), 1..10), pad in 0usize..4) {
        let p = ComplexPoly::new(coeffs);
        let n = p.degree() + pad;
        let twice = p.reversed_star(n).unwrap().reversed_star(n).unwrap();
        prop_assert_eq!(twice.coeffs(), p.coeffs());
    }

    #[test]
    fn reversal_preserves_modulus_on_circle(coeffs in prop::collection::vec(complex_in(3.0), 1..10), pad in 0usize..4) {
        let p = ComplexPoly::new(coeffs);
        let n = p.degree() + pad;
        let star = p.reversed_star(n).unwrap();
        let scale: f64 = p.coeffs().iter().map(|a| a.norm()).sum();
        for k in 0..64 {
            let z = unit(std::f64::consts::TAU * (k as f64 + 0.5) / 64.0);
            prop_assert!((p.eval(z).norm() - star.eval(z).norm()).abs() < 1e-11 * scale.max(1.0));
        }
    }
}
