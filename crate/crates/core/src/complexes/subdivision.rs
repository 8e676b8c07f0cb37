use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num::Zero;

use super::{AbstractComplex, DEFAULT_FACE_CAP};
use crate::calculus::derive;
use crate::error::{Error, Result};
use crate::weights::{ProbVector, Rational, SubsetKey, VertexLabel, SEPARATOR};

/// Separator for naming simplices of `complex`: one more `|` than the longest
/// run already present in its vertex labels, so nested names stay injective.
fn separator(complex: &AbstractComplex) -> String {
    let longest = complex
        .vertices()
        .iter()
        .flat_map(|v| {
            v.as_str()
                .split(|c| c != SEPARATOR)
                .map(str::len)
                .collect::<Vec<_>>()
        })
        .max()
        .unwrap_or(0);
    SEPARATOR.to_string().repeat(longest + 1)
}

fn name_with(separator: &str, key: &SubsetKey) -> VertexLabel {
    match key.labels() {
        [single] => single.clone(),
        labels => VertexLabel::composite(labels.iter().map(VertexLabel::as_str).join(separator)),
    }
}

/// Name of the subdivision vertex standing for the simplex `key` of `complex`.
///
/// A vertex keeps its own name; larger simplices join their sorted labels
/// with the separator, e.g. `a|b` for the edge `{a,b}`.
pub fn subdivision_vertex_name(complex: &AbstractComplex, key: &SubsetKey) -> VertexLabel {
    name_with(&separator(complex), key)
}

/// Barycentric subdivision: vertices are the simplices of `complex`,
/// simplices are chains under inclusion, and facets are the maximal chains
/// `{v1} < {v1,v2} < ... < F`, one per ordering of each facet `F`.
pub fn barycentric_subdivision(complex: &AbstractComplex) -> Result<AbstractComplex> {
    let cap = DEFAULT_FACE_CAP;
    let facet_count = complex
        .facets()
        .iter()
        .try_fold(0usize, |acc, f| {
            (1..=f.len()).try_fold(1usize, |p, k| p.checked_mul(k))
                .and_then(|perms| acc.checked_add(perms))
        });
    if facet_count.is_none_or(|n| n > cap) {
        return Err(Error::FaceCapExceeded { cap });
    }

    let sep = separator(complex);
    let vertices: BTreeSet<_> = complex
        .faces_capped(cap)?
        .iter()
        .map(|face| name_with(&sep, face))
        .collect();

    let mut facets = BTreeSet::new();
    for facet in complex.facets() {
        for ordering in facet.labels().iter().permutations(facet.len()) {
            let chain = (1..=ordering.len()).map(|k| {
                let prefix = SubsetKey::new(ordering[..k].iter().map(|l| (*l).clone()))
                    .expect("prefix is nonempty");
                name_with(&sep, &prefix)
            });
            facets.insert(SubsetKey::new(chain).expect("chain is nonempty"));
        }
    }
    Ok(AbstractComplex::from_parts_unchecked(vertices, facets))
}

/// Coordinates of `x` in the barycentric subdivision: its derivative with
/// every key renamed to the corresponding subdivision vertex.
pub fn subdivision_coordinates(x: &ProbVector, complex: &AbstractComplex) -> Result<ProbVector> {
    let support = x.support_key().expect("probability vectors have support");
    if !complex.contains(&support) {
        return Err(Error::NotASimplex(support.to_string()));
    }
    let sep = separator(complex);
    ProbVector::from_entries(
        derive(x)
            .iter()
            .map(|(key, weight)| (name_with(&sep, key), weight.clone())),
    )
}

/// A point of the metric realization of a complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexPoint {
    point: ProbVector,
}

impl ComplexPoint {
    pub fn new(point: ProbVector, complex: &AbstractComplex) -> Result<Self> {
        let support = point.support_key().expect("probability vectors have support");
        if !complex.contains(&support) {
            return Err(Error::NotASimplex(support.to_string()));
        }
        Ok(ComplexPoint { point })
    }

    pub fn point(&self) -> &ProbVector {
        &self.point
    }

    pub fn into_inner(self) -> ProbVector {
        self.point
    }
}

/// A complex with rational coordinates of a fixed dimension on its vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeometricRealization {
    complex: AbstractComplex,
    coordinates: BTreeMap<VertexLabel, Vec<Rational>>,
    dimension: usize,
}

impl GeometricRealization {
    pub fn new(
        complex: AbstractComplex,
        coordinates: BTreeMap<VertexLabel, Vec<Rational>>,
    ) -> Result<Self> {
        if let Some(v) = complex.vertices().iter().find(|v| !coordinates.contains_key(*v)) {
            return Err(Error::MissingCoordinates(v.to_string()));
        }
        let dimension = coordinates.values().next().map_or(0, Vec::len);
        if let Some((label, c)) = coordinates.iter().find(|(_, c)| c.len() != dimension) {
            return Err(Error::DimensionMismatch {
                label: label.to_string(),
                expected: dimension,
                found: c.len(),
            });
        }
        Ok(GeometricRealization {
            complex,
            coordinates,
            dimension,
        })
    }

    pub fn complex(&self) -> &AbstractComplex {
        &self.complex
    }

    pub fn coordinates(&self) -> &BTreeMap<VertexLabel, Vec<Rational>> {
        &self.coordinates
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Realization of the barycentric subdivision placing each new vertex at
    /// the barycenter of its simplex.
    pub fn barycentric_subdivision(&self) -> Result<GeometricRealization> {
        let subdivided = barycentric_subdivision(&self.complex)?;
        let sep = separator(&self.complex);
        let mut coordinates = BTreeMap::new();
        for face in self.complex.faces()? {
            let size = Rational::from_integer(face.len().into());
            let mut center = vec![Rational::zero(); self.dimension];
            for label in face.labels() {
                for (acc, c) in center.iter_mut().zip(&self.coordinates[label]) {
                    *acc += c;
                }
            }
            for c in &mut center {
                *c /= &size;
            }
            coordinates.insert(name_with(&sep, &face), center);
        }
        GeometricRealization::new(subdivided, coordinates)
    }
}

/// The affine combination `sum_s x_s * coords(s)`.
pub fn realize(x: &ProbVector, realization: &GeometricRealization) -> Result<Vec<Rational>> {
    let mut out = vec![Rational::zero(); realization.dimension];
    for (label, weight) in x.iter() {
        let coords = realization
            .coordinates
            .get(label)
            .ok_or_else(|| Error::MissingCoordinates(label.to_string()))?;
        for (acc, c) in out.iter_mut().zip(coords) {
            *acc += weight * c;
        }
    }
    Ok(out)
}
