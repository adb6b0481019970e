mod common;

use std::collections::{BTreeMap, VecDeque};

use common::{as_map, digits, eval_monomial, letters, linear, load, r, swap, Dense, GOLDEN};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use superqkz_core::basis::{all_weights, weight_basis, MultiIndex};
use superqkz_core::omega::{build_omega, is_admissible, solution_dimension, validate_omega};
use superqkz_core::{Covector, Grading, OmegaKind, Rational};

#[test]
fn golden_coefficients_are_reproduced() {
    // two unrelated q values pin every monomial ±q^k with k ≤ 3
    for q in [r(7, 5), r(-3, 2)] {
        for g in GOLDEN {
            let grading = Grading::new(g.k, g.bosons).unwrap();
            let n = g.weights.iter().sum();
            let omega = build_omega(&(g.kind)(q.clone()), &grading, g.weights, n).unwrap();
            let want: BTreeMap<_, _> = load(g.file).iter().map(|(j, c)| (letters(j), eval_monomial(c, &q))).collect();
            assert_eq!(as_map(&omega), want, "{}", g.file);
        }
    }
}

#[test]
fn golden_files_have_distinct_entries() {
    for g in GOLDEN {
        let entries = load(g.file);
        let mut seen = std::collections::HashSet::new();
        for (j, _) in &entries {
            assert!(seen.insert(j.clone()), "{}: {j} listed twice", g.file);
        }
        let n: usize = g.weights.iter().sum();
        assert_eq!(entries.len(), weight_basis(g.k, g.weights, n).unwrap().len(), "{}", g.file);
    }
}

/// Ratio Ω_{s(J)}/Ω_J when the adjacent letters a, b of J are swapped.
fn swap_factor(kind: &OmegaKind<Rational>, grading: &Grading, a: usize, b: usize) -> Rational {
    let graded = if grading.p(a) * grading.p(b) == 1 { -Rational::one() } else { Rational::one() };
    let sign = if kind.is_plus() { graded } else { -graded };
    match kind.q() {
        None => sign,
        // a < b before the swap: the swap creates an inversion
        Some(q) if a < b => sign * q,
        Some(q) if a > b => sign / q,
        Some(_) => sign,
    }
}

/// Propagates the normalised coefficient along every adjacent-swap path.
/// Returns None when two paths disagree, i.e. no nonzero covector exists.
fn by_recursion(
    kind: &OmegaKind<Rational>,
    grading: &Grading,
    weights: &[usize],
    n: usize,
) -> Option<BTreeMap<Vec<usize>, Rational>> {
    let start = weight_basis(grading.k(), weights, n).unwrap()[0].0.clone();
    let mut coeff = BTreeMap::from([(start.clone(), Rational::one())]);
    let mut queue = VecDeque::from([start]);
    while let Some(j) = queue.pop_front() {
        let c = coeff[&j].clone();
        for pos in 0..n - 1 {
            let mut next = j.clone();
            next.swap(pos, pos + 1);
            let value = &c * swap_factor(kind, grading, j[pos], j[pos + 1]);
            match coeff.get(&next) {
                Some(old) if *old != value => return None,
                Some(_) => {}
                None => {
                    coeff.insert(next.clone(), value);
                    queue.push_back(next);
                }
            }
        }
    }
    Some(coeff.into_iter().map(|(j, v)| (j.iter().map(|d| d + 1).collect(), v)).collect())
}

#[test]
fn recursion_paths_agree_with_closed_form() {
    let q = r(7, 5);
    let mut compared = 0;
    for k in 1..=3 {
        for grading in Grading::all(k).unwrap() {
            for n in 1..=4 {
                for weights in all_weights(k, n) {
                    let kinds = [OmegaKind::SymPlus, OmegaKind::SymMinus, OmegaKind::QPlus(q.clone())];
                    for kind in kinds {
                        let oracle = by_recursion(&kind, &grading, &weights, n);
                        assert_eq!(
                            oracle.is_some(),
                            is_admissible(&kind, &grading, &weights, n),
                            "{kind} {grading} {weights:?}"
                        );
                        if let Some(want) = oracle {
                            let omega = build_omega(&kind, &grading, &weights, n).unwrap();
                            assert_eq!(as_map(&omega), want, "{kind} {grading} {weights:?}");
                            compared += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(compared > 300);
}

/// ⟨Ω|X as a map from multi-index to coefficient, X dense on V^{⊗n}.
fn apply(omega: &Covector<Rational>, x: &Dense) -> BTreeMap<usize, Rational> {
    let k = omega.space().k;
    let mut out = BTreeMap::new();
    for (j, v) in omega.coeffs() {
        let row = linear(&j.0, k);
        for (col, e) in x[row].iter().enumerate() {
            if !e.is_zero() {
                *out.entry(col).or_insert_with(Rational::zero) += v * e;
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn scaled(omega: &Covector<Rational>, c: &Rational) -> BTreeMap<usize, Rational> {
    let k = omega.space().k;
    omega.coeffs().map(|(j, v)| (linear(&j.0, k), v * c)).filter(|(_, v)| !v.is_zero()).collect()
}

/// P^q acting on the pair of sites (i−1, i), 1-based i: maps (a, b) to (b, a)
/// with weight (−1)^{p(a)p(b)} times q for a > b, q⁻¹ for a < b.
fn q_swap(grading: &Grading, n: usize, i: usize, q: &Rational) -> Dense {
    let k = grading.k();
    let dim = k.pow(n as u32);
    let mut out = common::zeros(dim);
    for col in 0..dim {
        let ds = digits(col, k, n);
        let (a, b) = (ds[i - 2], ds[i - 1]);
        let mut c = if grading.p(a) * grading.p(b) == 1 { -Rational::one() } else { Rational::one() };
        if a > b {
            c *= q;
        } else if a < b {
            c /= q;
        }
        let mut moved = ds.clone();
        moved.swap(i - 2, i - 1);
        out[linear(&moved, k)][col] = c;
    }
    out
}

#[test]
fn dense_permutation_relations() {
    let q = r(-5, 3);
    for k in 2..=3 {
        for grading in Grading::all(k).unwrap() {
            for n in 2..=4 {
                for weights in all_weights(k, n) {
                    for kind in [
                        OmegaKind::SymPlus,
                        OmegaKind::SymMinus,
                        OmegaKind::QPlus(q.clone()),
                        OmegaKind::QMinus(q.clone()),
                    ] {
                        if !is_admissible(&kind, &grading, &weights, n) {
                            continue;
                        }
                        let omega = build_omega(&kind, &grading, &weights, n).unwrap();
                        let sign = if kind.is_plus() { Rational::one() } else { -Rational::one() };
                        let want = scaled(&omega, &sign);
                        match kind.q() {
                            None => {
                                for a in 0..n {
                                    for b in a + 1..n {
                                        assert_eq!(
                                            apply(&omega, &swap(&grading, n, a, b)),
                                            want,
                                            "{kind} {grading} P_{a}{b}"
                                        );
                                    }
                                }
                            }
                            Some(q) => {
                                for i in 2..=n {
                                    assert_eq!(
                                        apply(&omega, &q_swap(&grading, n, i, q)),
                                        want,
                                        "{kind} {grading} i={i}"
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn invariant_vector_is_unique_when_it_exists() {
    let q = r(3, 2);
    for k in 1..=3 {
        for grading in Grading::all(k).unwrap() {
            for n in 1..=3 {
                for weights in all_weights(k, n) {
                    for kind in [
                        OmegaKind::SymPlus,
                        OmegaKind::SymMinus,
                        OmegaKind::QPlus(q.clone()),
                        OmegaKind::QMinus(q.clone()),
                    ] {
                        let dim = solution_dimension(&kind, &grading, &weights, n).unwrap();
                        let want = usize::from(is_admissible(&kind, &grading, &weights, n));
                        assert_eq!(dim, want, "{kind} {grading} {weights:?}");
                    }
                }
            }
        }
    }
}

#[test]
fn minimal_index_is_normalised() {
    let q = r(2, 1);
    for grading in Grading::all(3).unwrap() {
        for kind in [OmegaKind::SymPlus, OmegaKind::SymMinus, OmegaKind::QPlus(q.clone()), OmegaKind::QMinus(q.clone())]
        {
            let omega = build_omega(&kind, &grading, &[1, 1, 1], 3).unwrap();
            assert!(omega.get(&MultiIndex(vec![0, 1, 2])).is_one(), "{kind} {grading}");
        }
    }
}

fn grading_strategy() -> impl Strategy<Value = Grading> {
    (1usize..=3).prop_flat_map(|k| prop::collection::vec(0u8..=1, k)).prop_map(|p| Grading::from_parities(p).unwrap())
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    (1i64..=60, 1i64..=60, any::<bool>()).prop_map(|(a, b, neg)| if neg { r(-a, b) } else { r(a, b) })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn validation_passes_for_admissible_weights(
        grading in grading_strategy(),
        n in 2usize..=4,
        pick in any::<prop::sample::Index>(),
        q in nonzero_rational().prop_filter("q = ±1 is degenerate", |q| q.numer() != q.denom() && -q.numer() != *q.denom()),
        x in nonzero_rational(),
        eta in nonzero_rational(),
    ) {
        let weights_all = all_weights(grading.k(), n);
        let weights = pick.get(&weights_all);
        for kind in [OmegaKind::SymPlus, OmegaKind::SymMinus, OmegaKind::QPlus(q.clone()), OmegaKind::QMinus(q.clone())] {
            if !is_admissible(&kind, &grading, weights, n) {
                continue;
            }
            // avoid the R poles of either family at the sampled argument
            let singular = if kind.q().is_some() {
                let xx = x.abs();
                xx.is_one() || xx == q.abs() || xx == q.abs().recip()
            } else {
                x == eta || x == -eta.clone()
            };
            prop_assume!(!singular);
            let arg = if kind.q().is_some() { x.abs() } else { x.clone() };
            let omega = build_omega(&kind, &grading, weights, n).unwrap();
            let report = validate_omega(&omega, &kind, &grading, &[arg], &eta);
            prop_assert!(report.passed(), "{:?}", report);
        }
    }

    #[test]
    fn flip_duality_holds(grading in grading_strategy(), n in 1usize..=4, q in nonzero_rational()) {
        for weights in all_weights(grading.k(), n) {
            let plus = OmegaKind::QPlus(q.clone());
            if !is_admissible(&plus, &grading, &weights, n) {
                continue;
            }
            let lhs = build_omega(&plus, &grading, &weights, n).unwrap().koszul_flip(&grading);
            let rhs = build_omega(&OmegaKind::QMinus(q.clone()), &grading.flipped(), &weights, n).unwrap();
            prop_assert_eq!(as_map(&lhs), as_map(&rhs));
        }
    }
}
