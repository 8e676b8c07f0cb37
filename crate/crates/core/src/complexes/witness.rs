//! Sample-level checks relating derivatives of a sampled partition to the
//! covers and nerves it induces.

use std::collections::{BTreeMap, BTreeSet};

use num::Zero;

use crate::calculus::{derive, integrate};
use crate::error::{Error, Result};
use crate::weights::{DerivedVector, ProbVector, SubsetKey, VertexLabel};

/// For each point, a label of maximal weight (smallest label on ties) whose
/// carrier contains every point sharing a derivative key with it.
///
/// The witness is checked against every pair of sample points before it is
/// returned; a failure is reported as [`Error::StarRefinement`].
pub fn star_refinement_witness(points: &[ProbVector]) -> Result<BTreeMap<usize, VertexLabel>> {
    if points.is_empty() {
        return Err(Error::EmptySample);
    }
    let witnesses = points
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let top = x.max_weight();
            let argmax = x
                .iter()
                .find(|(_, w)| **w == top)
                .map(|(l, _)| l.clone())
                .expect("nonempty support");
            (i, argmax)
        })
        .collect();
    verify_star_refinement(points, &witnesses)?;
    Ok(witnesses)
}

/// Checks that `y[witness[x]] > 0` whenever `x` and `y` share a positive
/// derivative key.
pub fn verify_star_refinement(
    points: &[ProbVector],
    witnesses: &BTreeMap<usize, VertexLabel>,
) -> Result<()> {
    let derivatives: Vec<DerivedVector> = points.iter().map(derive).collect();
    for (&x, label) in witnesses {
        let dx = derivatives.get(x).ok_or(Error::IndexOutOfRange {
            index: x,
            len: points.len(),
        })?;
        for (y, dy) in derivatives.iter().enumerate() {
            if points[y].contains(label) {
                continue;
            }
            if let Some(shared) = dx.keys().find(|k| dy.contains_key(k)) {
                return Err(Error::StarRefinement {
                    x,
                    y,
                    key: shared.to_string(),
                });
            }
        }
    }
    Ok(())
}

/// Outcome of checking that derivative keys of one cardinality never overlap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LayerCertificate {
    /// The key of the requested cardinality at each point, if any.
    Disjoint(Vec<Option<SubsetKey>>),
    /// A point carrying more than one key of that cardinality.
    Overlap { point: usize, keys: Vec<SubsetKey> },
}

impl LayerCertificate {
    pub fn holds(&self) -> bool {
        matches!(self, LayerCertificate::Disjoint(_))
    }
}

/// At each point, the derivative has at most one key of size `cardinality`.
pub fn disjoint_layers_check(points: &[ProbVector], cardinality: usize) -> LayerCertificate {
    let mut assignment = Vec::with_capacity(points.len());
    for (i, x) in points.iter().enumerate() {
        let keys: Vec<SubsetKey> = derive(x)
            .keys()
            .filter(|k| k.len() == cardinality)
            .cloned()
            .collect();
        if keys.len() > 1 {
            return LayerCertificate::Overlap { point: i, keys };
        }
        assignment.push(keys.into_iter().next());
    }
    LayerCertificate::Disjoint(assignment)
}

/// Result of [`restrict_nerve`]: surviving original indices and their new values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    pub kept: Vec<usize>,
    pub points: Vec<ProbVector>,
}

/// Restricts a sampled partition so its nerve matches the nerve of a subset.
///
/// Derivative keys not carried by any subset point are zeroed; surviving mass
/// is rescaled to one and integrated. Points left without mass are dropped.
pub fn restrict_nerve(points: &[ProbVector], subset: &BTreeSet<usize>) -> Result<Restriction> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    if let Some(&index) = subset.iter().find(|&&i| i >= points.len()) {
        return Err(Error::IndexOutOfRange {
            index,
            len: points.len(),
        });
    }
    let carried: BTreeSet<SubsetKey> = subset
        .iter()
        .flat_map(|&i| derive(&points[i]).keys().cloned().collect::<Vec<_>>())
        .collect();

    let mut kept = Vec::new();
    let mut restricted = Vec::new();
    for (i, x) in points.iter().enumerate() {
        let remaining = derive(x).filtered(|k| carried.contains(k));
        let mass = remaining.total();
        if mass.is_zero() {
            continue;
        }
        kept.push(i);
        restricted.push(integrate(&remaining.scaled(&mass.recip()))?);
    }
    Ok(Restriction {
        kept,
        points: restricted,
    })
}
