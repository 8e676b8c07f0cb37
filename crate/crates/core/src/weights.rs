//! Sparse weight vectors over vertex labels and over finite label sets.
//!
//! All weights are exact rationals. Zero weights are never stored, so the key
//! set of a vector is its positive support.

use std::cmp::Ordering;
use std::collections::{btree_map, BTreeMap};
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use itertools::{EitherOrBoth, Itertools};
use num::{BigRational, One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational number used for every weight and distance.
pub type Rational = BigRational;

/// Parses `"p/q"` or an integer `"p"`; rejects a zero denominator.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (numer, denom) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let numer: num::BigInt = numer.parse().ok()?;
    let denom: num::BigInt = denom.parse().ok()?;
    if denom.is_zero() {
        return None;
    }
    Some(Rational::new(numer, denom))
}

/// Lowest-terms `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

/// Separator used in composite vertex names produced by subdivision.
pub const SEPARATOR: char = '|';

/// Opaque vertex name. Labels order lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexLabel(String);

impl VertexLabel {
    /// Validates a user-supplied label: nonempty, no whitespace, no separator.
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == SEPARATOR) {
            return Err(Error::InvalidLabel(name));
        }
        Ok(VertexLabel(name))
    }

    /// Composite names built by subdivision may contain the separator.
    pub(crate) fn composite(name: String) -> Self {
        debug_assert!(!name.is_empty());
        VertexLabel(name)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for VertexLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        VertexLabel::new(s)
    }
}

/// Sparse map from labels to strictly positive rationals.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct WeightVector {
    entries: BTreeMap<VertexLabel, Rational>,
}

impl WeightVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vector from label/weight pairs. Zero weights are dropped;
    /// negative weights and repeated labels are rejected.
    pub fn from_entries<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexLabel, Rational)>,
    {
        let mut map = BTreeMap::new();
        for (label, weight) in entries {
            if weight.is_negative() {
                return Err(Error::NegativeWeight {
                    label: label.to_string(),
                    weight: format_rational(&weight),
                });
            }
            if map.contains_key(&label) {
                return Err(Error::DuplicateLabel(label.to_string()));
            }
            if !weight.is_zero() {
                map.insert(label, weight);
            }
        }
        Ok(WeightVector { entries: map })
    }

    /// Builds from a map whose weights are already known to be nonnegative.
    pub(crate) fn from_nonnegative(mut entries: BTreeMap<VertexLabel, Rational>) -> Self {
        entries.retain(|_, w| !w.is_zero());
        debug_assert!(entries.values().all(|w| w.is_positive()));
        WeightVector { entries }
    }

    pub fn weight(&self, label: &VertexLabel) -> Option<&Rational> {
        self.entries.get(label)
    }

    /// Weight at `label`, zero when absent.
    pub fn value(&self, label: &VertexLabel) -> Rational {
        self.entries.get(label).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn contains(&self, label: &VertexLabel) -> bool {
        self.entries.contains_key(label)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VertexLabel, &Rational)> {
        self.entries.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &VertexLabel> {
        self.entries.keys()
    }

    /// Support as a subset key, `None` for the zero vector.
    pub fn support_key(&self) -> Option<SubsetKey> {
        SubsetKey::new(self.entries.keys().cloned()).ok()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> Rational {
        self.entries.values().sum()
    }

    /// Largest weight, zero for the empty vector.
    pub fn max_weight(&self) -> Rational {
        self.entries.values().max().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scaled(&self, factor: &Rational) -> WeightVector {
        debug_assert!(!factor.is_negative());
        WeightVector::from_nonnegative(
            self.entries
                .iter()
                .map(|(l, w)| (l.clone(), w * factor))
                .collect(),
        )
    }

    /// Entrywise sum.
    pub fn add(&self, other: &WeightVector) -> WeightVector {
        let mut out = self.entries.clone();
        for (label, w) in &other.entries {
            *out.entry(label.clone()).or_insert_with(Rational::zero) += w;
        }
        WeightVector::from_nonnegative(out)
    }

    pub fn entries(&self) -> &BTreeMap<VertexLabel, Rational> {
        &self.entries
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (label, w)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{label}:{w}")?;
        }
        write!(f, "}}")
    }
}

/// Parses the compact form `{a:1/2, b:1/2}`; braces are optional.
impl FromStr for WeightVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('{').trim_end_matches('}').trim();
        if body.is_empty() {
            return Ok(WeightVector::new());
        }
        let mut pairs = Vec::new();
        for item in body.split(',') {
            let (label, weight) = item
                .split_once(':')
                .ok_or_else(|| Error::InvalidLabel(item.trim().to_string()))?;
            let weight = parse_rational(weight).ok_or_else(|| Error::NegativeWeight {
                label: label.trim().to_string(),
                weight: weight.trim().to_string(),
            })?;
            pairs.push((VertexLabel::new(label.trim())?, weight));
        }
        WeightVector::from_entries(pairs)
    }
}

/// A weight vector with nonempty support summing to exactly one: a point of
/// the metric realization of the full simplex on its labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProbVector(WeightVector);

impl ProbVector {
    pub fn new(weights: WeightVector) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptySupport);
        }
        let sum = weights.total();
        if !sum.is_one() {
            return Err(Error::NotNormalized {
                sum: format_rational(&sum),
            });
        }
        Ok(ProbVector(weights))
    }

    pub fn from_entries<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexLabel, Rational)>,
    {
        ProbVector::new(WeightVector::from_entries(entries)?)
    }

    /// Divides a nonzero weight vector by its total.
    pub fn normalize(weights: &WeightVector) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptySupport);
        }
        let total = weights.total();
        Ok(ProbVector(weights.scaled(&total.recip())))
    }

    /// Vertex of the simplex: weight one on a single label.
    pub fn vertex(label: VertexLabel) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(label, Rational::one());
        ProbVector(WeightVector { entries })
    }

    pub fn as_weights(&self) -> &WeightVector {
        &self.0
    }

    pub fn into_weights(self) -> WeightVector {
        self.0
    }
}

impl Deref for ProbVector {
    type Target = WeightVector;

    fn deref(&self) -> &WeightVector {
        &self.0
    }
}

impl AsRef<WeightVector> for ProbVector {
    fn as_ref(&self) -> &WeightVector {
        &self.0
    }
}

impl AsRef<WeightVector> for WeightVector {
    fn as_ref(&self) -> &WeightVector {
        self
    }
}

impl fmt::Display for ProbVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for ProbVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProbVector::new(s.parse()?)
    }
}

/// Nonempty finite set of labels, stored sorted and duplicate free.
///
/// Keys order by cardinality first and then lexicographically, so the keys of
/// a chain iterate from the smallest set to the largest.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsetKey(Vec<VertexLabel>);

impl SubsetKey {
    pub fn new<I>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = VertexLabel>,
    {
        let mut labels: Vec<_> = labels.into_iter().collect();
        labels.sort();
        labels.dedup();
        if labels.is_empty() {
            return Err(Error::EmptyKey);
        }
        Ok(SubsetKey(labels))
    }

    pub fn singleton(label: VertexLabel) -> Self {
        SubsetKey(vec![label])
    }

    pub fn labels(&self) -> &[VertexLabel] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, label: &VertexLabel) -> bool {
        self.0.binary_search(label).is_ok()
    }

    pub fn is_subset_of(&self, other: &SubsetKey) -> bool {
        self.len() <= other.len() && self.0.iter().all(|l| other.contains(l))
    }

    pub fn union(&self, other: &SubsetKey) -> SubsetKey {
        SubsetKey(self.0.iter().merge(other.0.iter()).dedup().cloned().collect())
    }

    /// Intersection, `None` when empty.
    pub fn intersection(&self, other: &SubsetKey) -> Option<SubsetKey> {
        let common: Vec<_> = self.0.iter().filter(|l| other.contains(l)).cloned().collect();
        (!common.is_empty()).then_some(SubsetKey(common))
    }
}

impl Ord for SubsetKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for SubsetKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SubsetKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.iter().join(","))
    }
}

/// Sparse map from subset keys to strictly positive rationals whose keys are
/// totally ordered by inclusion.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct DerivedVector {
    entries: BTreeMap<SubsetKey, Rational>,
}

impl DerivedVector {
    /// Validates positivity (zeros dropped) and the chain condition.
    pub fn from_entries<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (SubsetKey, Rational)>,
    {
        let mut map = BTreeMap::new();
        for (key, weight) in entries {
            if weight.is_negative() {
                return Err(Error::NegativeWeight {
                    label: key.to_string(),
                    weight: format_rational(&weight),
                });
            }
            if map.contains_key(&key) {
                return Err(Error::DuplicateLabel(key.to_string()));
            }
            if !weight.is_zero() {
                map.insert(key, weight);
            }
        }
        // Keys iterate by cardinality, so nesting of neighbours implies a chain.
        for (smaller, larger) in map.keys().tuple_windows() {
            if smaller.len() == larger.len() || !smaller.is_subset_of(larger) {
                return Err(Error::ChainViolation(smaller.to_string(), larger.to_string()));
            }
        }
        Ok(DerivedVector { entries: map })
    }

    pub(crate) fn from_chain_unchecked(entries: BTreeMap<SubsetKey, Rational>) -> Self {
        DerivedVector { entries }
    }

    pub fn weight(&self, key: &SubsetKey) -> Option<&Rational> {
        self.entries.get(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SubsetKey, &Rational)> {
        self.entries.iter()
    }

    pub fn keys(&self) -> btree_map::Keys<'_, SubsetKey, Rational> {
        self.entries.keys()
    }

    pub fn contains_key(&self, key: &SubsetKey) -> bool {
        self.entries.contains_key(key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> Rational {
        self.entries.values().sum()
    }

    /// Cardinality of the largest key, zero when empty.
    pub fn max_cardinality(&self) -> usize {
        self.entries.keys().next_back().map_or(0, SubsetKey::len)
    }

    /// Keeps only entries whose key satisfies `keep`. Sub-chains are chains.
    pub fn filtered(&self, mut keep: impl FnMut(&SubsetKey) -> bool) -> DerivedVector {
        DerivedVector {
            entries: self
                .entries
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, w)| (k.clone(), w.clone()))
                .collect(),
        }
    }

    pub fn scaled(&self, factor: &Rational) -> DerivedVector {
        debug_assert!(factor.is_positive());
        DerivedVector {
            entries: self
                .entries
                .iter()
                .map(|(k, w)| (k.clone(), w * factor))
                .collect(),
        }
    }
}

impl fmt::Display for DerivedVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (key, w)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{key}:{w}")?;
        }
        write!(f, "}}")
    }
}

fn l1_merge<'a, K: Ord + 'a>(
    left: impl Iterator<Item = (&'a K, &'a Rational)>,
    right: impl Iterator<Item = (&'a K, &'a Rational)>,
) -> Rational {
    left.merge_join_by(right, |a, b| a.0.cmp(b.0))
        .map(|pair| match pair {
            EitherOrBoth::Both((_, a), (_, b)) => (a - b).abs(),
            EitherOrBoth::Left((_, w)) | EitherOrBoth::Right((_, w)) => w.clone(),
        })
        .sum()
}

/// Sum of absolute entrywise differences over the union of supports.
pub fn l1_distance(x: &WeightVector, y: &WeightVector) -> Rational {
    l1_merge(x.iter(), y.iter())
}

/// The same l1 sum, indexed by subset keys.
pub fn subset_l1_distance(d1: &DerivedVector, d2: &DerivedVector) -> Rational {
    l1_merge(d1.iter(), d2.iter())
}

/// Number of positive entries minus one.
pub fn order(x: &ProbVector) -> usize {
    x.len() - 1
}
