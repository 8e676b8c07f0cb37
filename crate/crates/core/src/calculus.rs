//! Derivative and integral of partitions of unity, evaluated pointwise, and
//! the pointwise transformation kernels built from them.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::weights::{format_rational, DerivedVector, ProbVector, Rational, SubsetKey, VertexLabel, WeightVector};

/// Derivative of a point of the simplex.
///
/// Distinct values `v_1 > ... > v_M` of `x` define the top sets
/// `T(k) = {s : x_s >= v_k}`, and `T(k)` receives `|T(k)| * (v_k - v_{k+1})`
/// with `v_{M+1} = 0`. Equal values share one top set, so every emitted weight
/// is positive and the keys form a chain.
pub fn derive(x: &ProbVector) -> DerivedVector {
    let mut levels: BTreeMap<&Rational, Vec<&VertexLabel>> = BTreeMap::new();
    for (label, weight) in x.iter() {
        levels.entry(weight).or_default().push(label);
    }

    let mut entries = BTreeMap::new();
    let mut top: Vec<VertexLabel> = Vec::with_capacity(x.len());
    let mut descending = levels.into_iter().rev().peekable();
    while let Some((value, labels)) = descending.next() {
        top.extend(labels.into_iter().cloned());
        let next = descending
            .peek()
            .map_or_else(Rational::zero, |(v, _)| (*v).clone());
        let size = Rational::from_integer(top.len().into());
        let key = SubsetKey::new(top.iter().cloned()).expect("top set is nonempty");
        entries.insert(key, size * (value - next));
    }
    DerivedVector::from_chain_unchecked(entries)
}

/// Integral of a derived vector: `f_s` is the sum of `d_T / |T|` over keys
/// containing `s`. Rejects inputs whose mass is not exactly one.
pub fn integrate(d: &DerivedVector) -> Result<ProbVector> {
    let total = d.total();
    if !total.is_one() {
        return Err(Error::NotNormalized {
            sum: format_rational(&total),
        });
    }
    Ok(ProbVector::new(integrate_weights(d)).expect("unit mass integrates to unit mass"))
}

fn integrate_weights(d: &DerivedVector) -> WeightVector {
    let mut out: BTreeMap<VertexLabel, Rational> = BTreeMap::new();
    for (key, weight) in d.iter() {
        let share = weight / Rational::from_integer(key.len().into());
        for label in key.labels() {
            *out.entry(label.clone()).or_insert_with(Rational::zero) += &share;
        }
    }
    WeightVector::from_nonnegative(out)
}

/// Convex combination `alpha * f + (1 - alpha) * g`.
///
/// Either side may be absent as long as its coefficient vanishes: `alpha = 1`
/// only needs `f`, `alpha = 0` only needs `g`.
pub fn join_points(
    f: Option<&ProbVector>,
    g: Option<&ProbVector>,
    alpha: &Rational,
) -> Result<ProbVector> {
    if alpha.is_negative() || *alpha > Rational::one() {
        return Err(Error::AlphaOutOfRange(format_rational(alpha)));
    }
    let beta = Rational::one() - alpha;
    let missing = |side| Error::MissingJoinOperand {
        side,
        alpha: format_rational(alpha),
    };
    let left = if alpha.is_zero() {
        WeightVector::new()
    } else {
        f.ok_or_else(|| missing("left"))?.scaled(alpha)
    };
    let right = if beta.is_zero() {
        WeightVector::new()
    } else {
        g.ok_or_else(|| missing("right"))?.scaled(&beta)
    };
    Ok(ProbVector::new(left.add(&right)).expect("convex combination of unit masses"))
}

/// `g_s = max(0, f_s - max{f_t : t < s})` along a caller-supplied well
/// ordering of the labels. The ordering must contain every support label;
/// extra labels are ignored.
pub fn shrink_wellordered(f: &ProbVector, ordering: &[VertexLabel]) -> Result<WeightVector> {
    if let Some(missing) = f.support().find(|l| !ordering.contains(l)) {
        return Err(Error::OrderingIncomplete(missing.to_string()));
    }
    let mut running_max = Rational::zero();
    let mut out = BTreeMap::new();
    for label in ordering {
        let Some(value) = f.weight(label) else { continue };
        if *value > running_max {
            out.insert(label.clone(), value - &running_max);
            running_max = value.clone();
        }
    }
    Ok(WeightVector::from_nonnegative(out))
}

/// Shrinks `f` by half its maximum and renormalizes.
pub fn half_max_approx(f: &ProbVector) -> ProbVector {
    let half = halve_top(f.as_weights()).0;
    ProbVector::normalize(&half).expect("the maximal entry survives halving")
}

// Splits `w` into `max(0, w_s - m/2)` and the remainder, `m = max_s w_s`.
fn halve_top(w: &WeightVector) -> (WeightVector, WeightVector) {
    let cut = w.max_weight() / Rational::from_integer(2.into());
    let mut upper = BTreeMap::new();
    let mut lower = BTreeMap::new();
    for (label, value) in w.iter() {
        if *value > cut {
            upper.insert(label.clone(), value - &cut);
            lower.insert(label.clone(), cut.clone());
        } else {
            lower.insert(label.clone(), value.clone());
        }
    }
    (
        WeightVector::from_nonnegative(upper),
        WeightVector::from_nonnegative(lower),
    )
}

/// Dyadic decomposition of `f`.
///
/// Returns `depth` layers followed by the residual. Layer `k` and the residual
/// after it both have maximum `max(f) / 2^k`; all returned vectors add up to `f`.
/// A depth of zero returns `f` itself as the residual.
pub fn dyadic_layers(f: &ProbVector, depth: usize) -> Vec<WeightVector> {
    let mut layers = Vec::with_capacity(depth + 1);
    let mut residual = f.as_weights().clone();
    for _ in 0..depth {
        let (layer, rest) = halve_top(&residual);
        layers.push(layer);
        residual = rest;
    }
    layers.push(residual);
    layers
}

/// Drops derivative entries with more than `n + 1` labels, rescales the rest
/// to unit mass and integrates. The result has order at most `n`.
pub fn truncate_order(f: &ProbVector, n: usize) -> Result<ProbVector> {
    let kept = derive(f).filtered(|key| key.len() <= n + 1);
    let mass = kept.total();
    if mass.is_zero() {
        return Err(Error::TruncationEmpty {
            max_cardinality: n + 1,
        });
    }
    integrate(&kept.scaled(&mass.recip()))
}

/// `g` approximates `f` when every positive entry of `g` is positive in `f`.
pub fn approximates(g: &WeightVector, f: &WeightVector) -> bool {
    g.support().all(|label| f.contains(label))
}

/// Smallest key carried with positive weight by both derivatives.
///
/// Present whenever the derivatives lie at l1 distance below 2.
pub fn common_simplex(f: &ProbVector, g: &ProbVector) -> Option<SubsetKey> {
    let df = derive(f);
    let dg = derive(g);
    let shared = df.keys().find(|key| dg.contains_key(key)).cloned();
    shared
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{order, parse_rational, subset_l1_distance};
    use itertools::Itertools;
    use proptest::prelude::*;

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn p(s: &str) -> ProbVector {
        s.parse().unwrap()
    }

    fn w(s: &str) -> WeightVector {
        s.parse().unwrap()
    }

    fn l(s: &str) -> VertexLabel {
        VertexLabel::new(s).unwrap()
    }

    fn key(labels: &[&str]) -> SubsetKey {
        SubsetKey::new(labels.iter().map(|s| l(s))).unwrap()
    }

    fn derived(entries: &[(&[&str], &str)]) -> DerivedVector {
        DerivedVector::from_entries(entries.iter().map(|(k, v)| (key(k), r(v)))).unwrap()
    }

    /// Closed form `|T| * max(0, min_T f - max_{support - T} f)` over every
    /// nonempty subset of the support. Subsets reaching outside the support
    /// have a zero minimum and contribute nothing.
    fn closed_form_derivative(x: &ProbVector) -> DerivedVector {
        let support: Vec<_> = x.support().cloned().collect();
        let mut entries = Vec::new();
        for size in 1..=support.len() {
            for subset in support.iter().combinations(size) {
                let inside = subset.iter().map(|s| x.value(s)).min().unwrap();
                let outside = support
                    .iter()
                    .filter(|s| !subset.contains(s))
                    .map(|s| x.value(s))
                    .max()
                    .unwrap_or_else(Rational::zero);
                let gap = inside - outside;
                if gap.is_positive() {
                    let k = SubsetKey::new(subset.into_iter().cloned()).unwrap();
                    entries.push((k, Rational::from_integer(size.into()) * gap));
                }
            }
        }
        DerivedVector::from_entries(entries).unwrap()
    }

    #[test]
    fn derive_examples() {
        assert_eq!(derive(&p("{a:1}")), derived(&[(&["a"], "1")]));
        assert_eq!(
            derive(&p("{a:1/3,b:1/3,c:1/3}")),
            derived(&[(&["a", "b", "c"], "1")])
        );
        let x = p("{a:1/2,b:1/3,c:1/6}");
        let expected = derived(&[(&["a"], "1/6"), (&["a", "b"], "1/3"), (&["a", "b", "c"], "1/2")]);
        assert_eq!(closed_form_derivative(&x), expected);
        assert_eq!(derive(&x), expected);
    }

    #[test]
    fn integrate_examples() {
        assert_eq!(integrate(&derived(&[(&["a"], "1")])).unwrap(), p("{a:1}"));
        assert_eq!(
            integrate(&derived(&[(&["a", "b"], "1")])).unwrap(),
            p("{a:1/2,b:1/2}")
        );
        let d = derived(&[(&["a"], "1/6"), (&["a", "b"], "1/3"), (&["a", "b", "c"], "1/2")]);
        assert_eq!(integrate(&d).unwrap(), p("{a:1/2,b:1/3,c:1/6}"));
    }

    #[test]
    fn integrate_rejects_wrong_mass() {
        let err = integrate(&derived(&[(&["a"], "1/2")])).unwrap_err();
        assert_eq!(err.precondition(), "weights_sum_to_one");
    }

    #[test]
    fn join_examples() {
        let f = p("{a:1}");
        let g = p("{b:1}");
        assert_eq!(join_points(Some(&f), Some(&g), &r("1")).unwrap(), f);
        assert_eq!(
            join_points(Some(&f), Some(&g), &r("1/2")).unwrap(),
            p("{a:1/2,b:1/2}")
        );
        let f = p("{a:1/2,b:1/2}");
        let g = p("{b:1/2,c:1/2}");
        // 1/3*f + 2/3*g = {a:1/6, b:1/6+1/3, c:1/3}
        assert_eq!(
            join_points(Some(&f), Some(&g), &r("1/3")).unwrap(),
            p("{a:1/6,b:1/2,c:1/3}")
        );
    }

    #[test]
    fn join_one_sided_and_errors() {
        let f = p("{a:1}");
        assert_eq!(join_points(Some(&f), None, &r("1")).unwrap(), f);
        assert_eq!(join_points(None, Some(&f), &r("0")).unwrap(), f);
        assert_eq!(
            join_points(None, Some(&f), &r("1/2")).unwrap_err().precondition(),
            "join_operand_present"
        );
        assert_eq!(
            join_points(Some(&f), None, &r("0")).unwrap_err().precondition(),
            "join_operand_present"
        );
        assert_eq!(
            join_points(Some(&f), Some(&f), &r("3/2")).unwrap_err().precondition(),
            "alpha_in_unit_interval"
        );
        assert_eq!(
            join_points(Some(&f), Some(&f), &r("-1")).unwrap_err().precondition(),
            "alpha_in_unit_interval"
        );
    }

    #[test]
    fn shrink_examples() {
        let abc = [l("a"), l("b"), l("c")];
        assert_eq!(shrink_wellordered(&p("{a:1}"), &abc[..1]).unwrap(), w("{a:1}"));
        assert_eq!(
            shrink_wellordered(&p("{a:1/3,b:1/3,c:1/3}"), &abc).unwrap(),
            w("{a:1/3}")
        );
        assert_eq!(
            shrink_wellordered(&p("{a:1/5,b:1/2,c:3/10}"), &abc).unwrap(),
            w("{a:1/5,b:3/10}")
        );
        let err = shrink_wellordered(&p("{a:1/2,b:1/2}"), &abc[..1]).unwrap_err();
        assert_eq!(err, Error::OrderingIncomplete("b".into()));
    }

    #[test]
    fn shrink_respects_custom_ordering() {
        let cba = [l("c"), l("b"), l("a")];
        // c first: 3/10, then b: 1/2 - 3/10, then a: 1/5 < 1/2 vanishes
        assert_eq!(
            shrink_wellordered(&p("{a:1/5,b:1/2,c:3/10}"), &cba).unwrap(),
            w("{b:1/5,c:3/10}")
        );
    }

    #[test]
    fn half_max_examples() {
        assert_eq!(half_max_approx(&p("{a:1}")), p("{a:1}"));
        assert_eq!(half_max_approx(&p("{a:3/5,b:2/5}")), p("{a:3/4,b:1/4}"));
        assert_eq!(half_max_approx(&p("{a:1/2,b:1/4,c:1/4}")), p("{a:1}"));
    }

    #[test]
    fn dyadic_examples() {
        assert_eq!(dyadic_layers(&p("{a:1}"), 1), vec![w("{a:1/2}"), w("{a:1/2}")]);
        assert_eq!(
            dyadic_layers(&p("{a:1/2,b:1/2}"), 1),
            vec![w("{a:1/4,b:1/4}"), w("{a:1/4,b:1/4}")]
        );
        assert_eq!(
            dyadic_layers(&p("{a:1/2,b:1/2}"), 2),
            vec![w("{a:1/4,b:1/4}"), w("{a:1/8,b:1/8}"), w("{a:1/8,b:1/8}")]
        );
    }

    #[test]
    fn truncate_examples() {
        let f = p("{a:1/2,b:1/3,c:1/6}");
        assert_eq!(truncate_order(&f, 2).unwrap(), f);
        assert_eq!(truncate_order(&f, 1).unwrap(), p("{a:2/3,b:1/3}"));
        let err = truncate_order(&p("{a:1/3,b:1/3,c:1/3}"), 1).unwrap_err();
        assert_eq!(err, Error::TruncationEmpty { max_cardinality: 2 });
    }

    #[test]
    fn approximation_examples() {
        assert!(approximates(&w("{a:1}"), &w("{a:1/2,b:1/2}")));
        assert!(!approximates(&w("{a:1/2,b:1/2}"), &w("{a:1}")));
    }

    #[test]
    fn common_simplex_examples() {
        let f = p("{a:1/2,b:1/2}");
        assert_eq!(common_simplex(&f, &f), Some(key(&["a", "b"])));
        assert_eq!(common_simplex(&p("{a:1}"), &p("{b:1}")), None);
        let f = p("{a:3/5,b:2/5}");
        let g = p("{a:2/5,b:3/5}");
        assert_eq!(derive(&f), derived(&[(&["a"], "1/5"), (&["a", "b"], "4/5")]));
        assert_eq!(derive(&g), derived(&[(&["b"], "1/5"), (&["a", "b"], "4/5")]));
        assert_eq!(common_simplex(&f, &g), Some(key(&["a", "b"])));
    }

    fn arb_prob() -> impl Strategy<Value = ProbVector> {
        proptest::collection::btree_map(0u8..8, 1u32..8, 1..=6).prop_map(|m| {
            let w = WeightVector::from_entries(
                m.into_iter()
                    .map(|(k, v)| (l(&format!("v{k}")), Rational::from_integer(v.into()))),
            )
            .unwrap();
            ProbVector::normalize(&w).unwrap()
        })
    }

    proptest! {
        #[test]
        fn derive_matches_closed_form(x in arb_prob()) {
            prop_assert_eq!(derive(&x), closed_form_derivative(&x));
        }

        #[test]
        fn round_trip_and_order_law(x in arb_prob()) {
            let d = derive(&x);
            prop_assert!(d.total().is_one());
            prop_assert_eq!(order(&x) + 1, d.max_cardinality());
            prop_assert_eq!(integrate(&d).unwrap(), x);
        }

        #[test]
        fn join_stays_in_union(f in arb_prob(), g in arb_prob(), num in 0u32..=12) {
            let alpha = Rational::new(num.into(), 12.into());
            let h = join_points(Some(&f), Some(&g), &alpha).unwrap();
            prop_assert!(h.support().all(|s| f.contains(s) || g.contains(s)));
        }

        #[test]
        fn shrink_mass_bounds(x in arb_prob()) {
            let ordering: Vec<_> = x.support().cloned().collect();
            let g = shrink_wellordered(&x, &ordering).unwrap();
            prop_assert!(g.contains(&ordering[0]));
            prop_assert!(g.total().is_positive());
            prop_assert!(g.total() <= x.max_weight());
        }

        #[test]
        fn layers_resum(x in arb_prob(), depth in 1usize..6) {
            let layers = dyadic_layers(&x, depth);
            prop_assert_eq!(layers.len(), depth + 1);
            let sum = layers.iter().fold(WeightVector::new(), |acc, v| acc.add(v));
            prop_assert_eq!(&sum, x.as_weights());
            let mut expected = x.max_weight();
            for layer in &layers[..depth] {
                expected /= Rational::from_integer(2.into());
                prop_assert_eq!(layer.max_weight(), expected.clone());
            }
            prop_assert_eq!(layers[depth].max_weight(), expected);
        }

        #[test]
        fn truncation_and_half_max_approximate(x in arb_prob(), n in 0usize..3) {
            prop_assert!(approximates(&half_max_approx(&x), &x));
            if let Ok(t) = truncate_order(&x, n) {
                prop_assert!(order(&t) <= n);
                prop_assert!(approximates(&t, &x));
            } else {
                prop_assert!(derive(&x).keys().all(|k| k.len() > n + 1));
            }
        }

        #[test]
        fn common_simplex_below_distance_two(f in arb_prob(), g in arb_prob()) {
            let close = subset_l1_distance(&derive(&f), &derive(&g)) < r("2");
            prop_assert_eq!(common_simplex(&f, &g).is_some(), close);
        }

        #[test]
        fn derived_triangle_inequality(x in arb_prob(), y in arb_prob(), z in arb_prob()) {
            let (dx, dy, dz) = (derive(&x), derive(&y), derive(&z));
            prop_assert!(
                subset_l1_distance(&dx, &dz)
                    <= subset_l1_distance(&dx, &dy) + subset_l1_distance(&dy, &dz)
            );
        }
    }
}
