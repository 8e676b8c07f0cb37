//! Partitions of unity induced by covers of finite metric samples.

use std::collections::{BTreeMap, BTreeSet};

use num::{One, Signed, Zero};

use crate::complexes::{nerve_of_sample, AbstractComplex};
use crate::error::{Error, Result};
use crate::weights::{format_rational, ProbVector, Rational, VertexLabel, WeightVector};

/// Finite metric space given by an explicit distance matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricSample {
    ids: Vec<VertexLabel>,
    index: BTreeMap<VertexLabel, usize>,
    distances: Vec<Vec<Rational>>,
}

impl MetricSample {
    /// Validates distinct ids, a square nonnegative symmetric matrix with zero
    /// diagonal, and the triangle inequality.
    pub fn new(ids: Vec<VertexLabel>, distances: Vec<Vec<Rational>>) -> Result<Self> {
        let n = ids.len();
        if n == 0 {
            return Err(Error::EmptySample);
        }
        let mut index = BTreeMap::new();
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(id.to_string()));
            }
        }
        if distances.len() != n || distances.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidMetric(format!("matrix must be {n} x {n}")));
        }
        for i in 0..n {
            if !distances[i][i].is_zero() {
                return Err(Error::InvalidMetric(format!("nonzero diagonal at {}", ids[i])));
            }
            for j in 0..n {
                let d = &distances[i][j];
                if d.is_negative() {
                    return Err(Error::InvalidMetric(format!(
                        "negative distance between {} and {}",
                        ids[i], ids[j]
                    )));
                }
                if *d != distances[j][i] {
                    return Err(Error::InvalidMetric(format!(
                        "asymmetric distance between {} and {}",
                        ids[i], ids[j]
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if distances[i][k] > &distances[i][j] + &distances[j][k] {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails for {}, {}, {}",
                            ids[i], ids[j], ids[k]
                        )));
                    }
                }
            }
        }
        Ok(MetricSample {
            ids,
            index,
            distances,
        })
    }

    /// Sample with l1 distances between rational coordinate vectors.
    pub fn from_l1_coordinates(
        ids: Vec<VertexLabel>,
        coordinates: &[Vec<Rational>],
    ) -> Result<Self> {
        if coordinates.len() != ids.len() {
            return Err(Error::InvalidMetric(format!(
                "{} ids but {} coordinate rows",
                ids.len(),
                coordinates.len()
            )));
        }
        let dim = coordinates.first().map_or(0, Vec::len);
        if let Some(i) = coordinates.iter().position(|c| c.len() != dim) {
            return Err(Error::DimensionMismatch {
                label: ids[i].to_string(),
                expected: dim,
                found: coordinates[i].len(),
            });
        }
        let distances = coordinates
            .iter()
            .map(|a| {
                coordinates
                    .iter()
                    .map(|b| a.iter().zip(b).map(|(u, v)| (u - v).abs()).sum())
                    .collect()
            })
            .collect();
        MetricSample::new(ids, distances)
    }

    pub fn ids(&self) -> &[VertexLabel] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn position(&self, id: &VertexLabel) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn distance(&self, i: usize, j: usize) -> &Rational {
        &self.distances[i][j]
    }

    pub fn distances(&self) -> &[Vec<Rational>] {
        &self.distances
    }

    pub fn diameter(&self) -> Rational {
        self.distances
            .iter()
            .flatten()
            .max()
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Clearance used for a cover set containing every sample point, where
    /// the distance to the complement has no witness: one plus the diameter.
    pub fn surrogate_clearance(&self) -> Rational {
        Rational::one() + self.diameter()
    }
}

/// Cover sets indexed by label, each a set of sample point ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IndexedCover {
    sets: BTreeMap<VertexLabel, BTreeSet<VertexLabel>>,
}

impl IndexedCover {
    pub fn new(sets: BTreeMap<VertexLabel, BTreeSet<VertexLabel>>) -> Self {
        IndexedCover { sets }
    }

    pub fn sets(&self) -> &BTreeMap<VertexLabel, BTreeSet<VertexLabel>> {
        &self.sets
    }

    /// Open balls `{y : d(x, y) < radius}`, one per sample point and labeled by
    /// its id.
    pub fn balls(sample: &MetricSample, radius: &Rational) -> Self {
        let sets = sample
            .ids()
            .iter()
            .enumerate()
            .map(|(i, center)| {
                let members = sample
                    .ids()
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| sample.distance(i, *j) < radius)
                    .map(|(_, id)| id.clone())
                    .collect();
                (center.clone(), members)
            })
            .collect();
        IndexedCover { sets }
    }

    /// Checks that every member is a sample point and every point is covered.
    pub fn validate(&self, sample: &MetricSample) -> Result<()> {
        for (set, members) in &self.sets {
            if let Some(unknown) = members.iter().find(|m| sample.position(m).is_none()) {
                return Err(Error::UnknownPoint {
                    set: set.to_string(),
                    point: unknown.to_string(),
                });
            }
        }
        if let Some(lonely) = sample
            .ids()
            .iter()
            .find(|id| !self.sets.values().any(|members| members.contains(*id)))
        {
            return Err(Error::NotCovering(lonely.to_string()));
        }
        Ok(())
    }
}

/// Distance partition of a cover: at point `x` the raw weight of set `U` is
/// the distance from `x` to the nearest sample point outside `U`, or the
/// surrogate clearance when `U` holds every point. Each point's raw vector is
/// normalized to unit mass.
pub fn distance_pou(sample: &MetricSample, cover: &IndexedCover) -> Result<Vec<ProbVector>> {
    cover.validate(sample)?;
    let surrogate = sample.surrogate_clearance();
    let outside: Vec<(VertexLabel, Vec<usize>)> = cover
        .sets()
        .iter()
        .map(|(label, members)| {
            let rest = (0..sample.len())
                .filter(|&j| !members.contains(&sample.ids()[j]))
                .collect();
            (label.clone(), rest)
        })
        .collect();

    (0..sample.len())
        .map(|x| {
            let raw = outside.iter().map(|(label, rest)| {
                let clearance = rest
                    .iter()
                    .map(|&j| sample.distance(x, j))
                    .min()
                    .cloned()
                    .unwrap_or_else(|| surrogate.clone());
                (label.clone(), clearance)
            });
            let raw = WeightVector::from_entries(raw)?;
            if raw.is_empty() {
                return Err(Error::ZeroClearance(sample.ids()[x].to_string()));
            }
            ProbVector::normalize(&raw)
        })
        .collect()
}

/// Ball cover, its distance partition, and the nerve of that partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CechResult {
    pub cover: IndexedCover,
    pub partition: Vec<ProbVector>,
    pub nerve: AbstractComplex,
}

pub fn cech_pipeline(sample: &MetricSample, radius: &Rational) -> Result<CechResult> {
    if !radius.is_positive() {
        return Err(Error::NonPositiveRadius(format_rational(radius)));
    }
    let cover = IndexedCover::balls(sample, radius);
    let partition = distance_pou(sample, &cover)?;
    let nerve = nerve_of_sample(&partition)?;
    Ok(CechResult {
        cover,
        partition,
        nerve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{parse_rational, SubsetKey};

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn l(s: &str) -> VertexLabel {
        VertexLabel::new(s).unwrap()
    }

    fn p(s: &str) -> ProbVector {
        s.parse().unwrap()
    }

    fn cover(sets: &[(&str, &[&str])]) -> IndexedCover {
        IndexedCover::new(
            sets.iter()
                .map(|(k, m)| (l(k), m.iter().map(|s| l(s)).collect()))
                .collect(),
        )
    }

    fn line(n: usize) -> MetricSample {
        let ids = (0..n).map(|i| l(&format!("b{i}"))).collect();
        let coords: Vec<_> = (0..n).map(|i| vec![Rational::from_integer(i.into())]).collect();
        MetricSample::from_l1_coordinates(ids, &coords).unwrap()
    }

    #[test]
    fn single_point_single_set() {
        let sample = MetricSample::new(vec![l("p")], vec![vec![r("0")]]).unwrap();
        let out = distance_pou(&sample, &cover(&[("U", &["p"])])).unwrap();
        assert_eq!(out, vec![p("{U:1}")]);
    }

    #[test]
    fn all_covered_set_uses_surrogate() {
        let sample = MetricSample::new(
            vec![l("p"), l("q")],
            vec![vec![r("0"), r("1")], vec![r("1"), r("0")]],
        )
        .unwrap();
        let c = sample.surrogate_clearance();
        assert_eq!(c, r("2"));
        let out = distance_pou(&sample, &cover(&[("U1", &["p", "q"]), ("U2", &["q"])])).unwrap();
        // raw at p = (2, 0); raw at q = (2, dist(q, p) = 1)
        assert_eq!(out, vec![p("{U1:1}"), p("{U1:2/3, U2:1/3}")]);
    }

    #[test]
    fn two_ball_cover_of_a_line() {
        let sample = line(3);
        let c = cover(&[("B0", &["b0", "b1"]), ("B2", &["b1", "b2"])]);
        let out = distance_pou(&sample, &c).unwrap();
        assert_eq!(out, vec![p("{B0:1}"), p("{B0:1/2,B2:1/2}"), p("{B2:1}")]);
        let nerve = nerve_of_sample(&out).unwrap();
        assert_eq!(
            nerve,
            AbstractComplex::simplex(SubsetKey::new([l("B0"), l("B2")]).unwrap())
        );
    }

    #[test]
    fn cover_validation() {
        let sample = line(2);
        let err = distance_pou(&sample, &cover(&[("U", &["b0"])])).unwrap_err();
        assert_eq!(err, Error::NotCovering("b1".into()));
        let err = distance_pou(&sample, &cover(&[("U", &["b0", "b1", "zz"])])).unwrap_err();
        assert_eq!(err.precondition(), "cover_members_known");
    }

    #[test]
    fn zero_clearance_is_rejected() {
        // b0 and b1 coincide, so b0 sits on the edge of the only set holding it
        let sample = MetricSample::new(
            vec![l("b0"), l("b1")],
            vec![vec![r("0"), r("0")], vec![r("0"), r("0")]],
        )
        .unwrap();
        let err = distance_pou(&sample, &cover(&[("U", &["b0"]), ("V", &["b1"])])).unwrap_err();
        assert_eq!(err, Error::ZeroClearance("b0".into()));
    }

    #[test]
    fn metric_validation() {
        let asym = MetricSample::new(
            vec![l("p"), l("q")],
            vec![vec![r("0"), r("1")], vec![r("2"), r("0")]],
        );
        assert_eq!(asym.unwrap_err().precondition(), "valid_metric");
        let diag = MetricSample::new(vec![l("p")], vec![vec![r("1")]]);
        assert_eq!(diag.unwrap_err().precondition(), "valid_metric");
        let triangle = MetricSample::new(
            vec![l("p"), l("q"), l("s")],
            vec![
                vec![r("0"), r("1"), r("5")],
                vec![r("1"), r("0"), r("1")],
                vec![r("5"), r("1"), r("0")],
            ],
        );
        assert!(matches!(triangle.unwrap_err(), Error::InvalidMetric(m) if m.contains("triangle")));
        let dup = MetricSample::new(vec![l("p"), l("p")], vec![vec![r("0"); 2]; 2]);
        assert_eq!(dup.unwrap_err().precondition(), "labels_distinct");
        assert_eq!(
            MetricSample::new(vec![], vec![]).unwrap_err(),
            Error::EmptySample
        );
    }

    #[test]
    fn cech_small_cases() {
        let one = line(1);
        let out = cech_pipeline(&one, &r("1")).unwrap();
        assert_eq!(out.partition, vec![p("{b0:1}")]);
        assert_eq!(out.nerve.facets().len(), 1);

        let far = MetricSample::from_l1_coordinates(
            vec![l("b0"), l("b1")],
            &[vec![r("0")], vec![r("3")]],
        )
        .unwrap();
        let out = cech_pipeline(&far, &r("1")).unwrap();
        assert_eq!(out.partition, vec![p("{b0:1}"), p("{b1:1}")]);
        assert_eq!(out.nerve.facets().len(), 2);
        assert_eq!(out.nerve.dimension(), Some(0));

        assert_eq!(
            cech_pipeline(&far, &r("0")).unwrap_err().precondition(),
            "radius_positive"
        );
    }

    #[test]
    fn larger_radius_never_shrinks_nerve() {
        let sample = line(5);
        let mut previous = None;
        for k in 1..=12 {
            let radius = Rational::new(k.into(), 2.into());
            let faces = cech_pipeline(&sample, &radius).unwrap().nerve.faces().unwrap();
            if let Some(prev) = previous {
                assert!(faces.is_superset(&prev), "radius {radius}");
            }
            previous = Some(faces);
        }
    }
}
