//! Seeded generators for the property suites.
//!
//! Probability vectors pick a support size uniformly in `1..=max_support`,
//! a uniform subset of the label pool of that size, and independent integer
//! weights in `1..=WEIGHT_RANGE` normalized to unit mass. The small weight
//! range makes ties common.

use std::collections::BTreeMap;

use num::One;
use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::weights::{DerivedVector, ProbVector, Rational, SubsetKey, VertexLabel, WeightVector};

pub const WEIGHT_RANGE: u32 = 12;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Labels `a`, `b`, ... up to `n` (at most 26).
pub fn label_pool(n: usize) -> Vec<VertexLabel> {
    (b'a'..=b'z')
        .take(n)
        .map(|c| VertexLabel::new((c as char).to_string()).expect("letters are valid labels"))
        .collect()
}

fn random_weight<R: Rng>(rng: &mut R) -> Rational {
    random_weight_upto(rng, WEIGHT_RANGE)
}

fn random_weight_upto<R: Rng>(rng: &mut R, max: u32) -> Rational {
    Rational::from_integer(rng.gen_range(1..=max).into())
}

/// Normalized random positive weights on exactly `labels`.
pub fn random_on<R: Rng>(rng: &mut R, labels: &[VertexLabel]) -> ProbVector {
    let raw = WeightVector::from_entries(labels.iter().map(|l| (l.clone(), random_weight(rng))))
        .expect("distinct labels, positive weights");
    ProbVector::normalize(&raw).expect("nonempty support")
}

pub fn random_prob_vector<R: Rng>(
    rng: &mut R,
    pool: &[VertexLabel],
    max_support: usize,
) -> ProbVector {
    random_prob_vector_upto(rng, pool, max_support, WEIGHT_RANGE)
}

/// Like [`random_prob_vector`] with integer weights drawn from `1..=max_weight`;
/// `max_weight = 2` produces heavily tied vectors.
pub fn random_prob_vector_upto<R: Rng>(
    rng: &mut R,
    pool: &[VertexLabel],
    max_support: usize,
    max_weight: u32,
) -> ProbVector {
    let size = rng.gen_range(1..=max_support.min(pool.len()));
    let mut support: Vec<VertexLabel> = pool.iter().cloned().choose_multiple(rng, size);
    support.sort();
    let raw = WeightVector::from_entries(
        support
            .into_iter()
            .map(|l| (l, random_weight_upto(rng, max_weight))),
    )
    .expect("distinct labels, positive weights");
    ProbVector::normalize(&raw).expect("nonempty support")
}

/// Uniform vector on the first `n` labels of the pool: a full tie.
pub fn uniform(pool: &[VertexLabel], n: usize) -> ProbVector {
    let w = Rational::new(One::one(), n.into());
    ProbVector::from_entries(pool[..n].iter().map(|l| (l.clone(), w.clone())))
        .expect("n equal shares sum to one")
}

/// Random derived vector supported on a chain of at most `max_chain` nested
/// keys with strictly increasing sizes, weights normalized to unit mass.
pub fn random_chain<R: Rng>(rng: &mut R, pool: &[VertexLabel], max_chain: usize) -> DerivedVector {
    let length = rng.gen_range(1..=max_chain.min(pool.len()));
    let mut sizes = (1..=pool.len()).choose_multiple(rng, length);
    sizes.sort_unstable();
    let mut order = pool.to_vec();
    order.shuffle(rng);

    let raw: BTreeMap<SubsetKey, Rational> = sizes
        .into_iter()
        .map(|k| {
            let key = SubsetKey::new(order[..k].iter().cloned()).expect("k >= 1");
            (key, random_weight(rng))
        })
        .collect();
    let total: Rational = raw.values().sum();
    DerivedVector::from_entries(raw.into_iter().map(|(k, w)| (k, w / &total)))
        .expect("prefixes of one ordering form a chain")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_reproducible() {
        let pool = label_pool(8);
        let a: Vec<_> = {
            let mut rng = seeded(7);
            (0..20).map(|_| random_prob_vector(&mut rng, &pool, 6)).collect()
        };
        let b: Vec<_> = {
            let mut rng = seeded(7);
            (0..20).map(|_| random_prob_vector(&mut rng, &pool, 6)).collect()
        };
        assert_eq!(a, b);
        assert!(a.iter().all(|x| x.len() <= 6));
    }

    #[test]
    fn chains_have_unit_mass() {
        let pool = label_pool(8);
        let mut rng = seeded(1);
        for _ in 0..100 {
            let d = random_chain(&mut rng, &pool, 4);
            assert!(d.total().is_one());
            assert!(d.len() <= 4);
        }
    }
}
