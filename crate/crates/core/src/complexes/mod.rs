//! Abstract simplicial complexes stored by their facets.
//!
//! Membership is downward closure of the facets. Full face enumeration is
//! exponential in the facet size and runs behind a face-count cap.

mod subdivision;
mod witness;

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::weights::{ProbVector, SubsetKey, VertexLabel};

pub use subdivision::{
    barycentric_subdivision, realize, subdivision_coordinates, subdivision_vertex_name,
    ComplexPoint, GeometricRealization,
};
pub use witness::{
    disjoint_layers_check, restrict_nerve, star_refinement_witness, verify_star_refinement,
    LayerCertificate, Restriction,
};

/// Default bound on the number of faces any enumeration may produce.
pub const DEFAULT_FACE_CAP: usize = 1_000_000;

/// Finite simplicial complex in canonical maximal-facet form.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct AbstractComplex {
    vertices: BTreeSet<VertexLabel>,
    facets: BTreeSet<SubsetKey>,
}

impl AbstractComplex {
    /// Builds a complex from a vertex set and a generating family of simplices.
    ///
    /// Non-maximal simplices are discarded and vertices not covered by any
    /// facet become singleton facets. Every facet label must be a vertex.
    pub fn new<V, F>(vertices: V, facets: F) -> Result<Self>
    where
        V: IntoIterator<Item = VertexLabel>,
        F: IntoIterator<Item = SubsetKey>,
    {
        let vertices: BTreeSet<_> = vertices.into_iter().collect();
        let facets: Vec<_> = facets.into_iter().collect();
        for facet in &facets {
            if let Some(label) = facet.labels().iter().find(|l| !vertices.contains(*l)) {
                return Err(Error::UnknownVertex(label.to_string()));
            }
        }
        let mut maximal = maximal_sets(facets);
        for v in &vertices {
            if !maximal.iter().any(|f| f.contains(v)) {
                maximal.insert(SubsetKey::singleton(v.clone()));
            }
        }
        Ok(AbstractComplex {
            vertices,
            facets: maximal,
        })
    }

    /// Complex generated by `facets`, with vertex set their union.
    pub fn from_facets<F>(facets: F) -> Self
    where
        F: IntoIterator<Item = SubsetKey>,
    {
        let facets = maximal_sets(facets.into_iter().collect());
        let vertices = facets.iter().flat_map(|f| f.labels().iter().cloned()).collect();
        AbstractComplex { vertices, facets }
    }

    /// Facets must already be pairwise incomparable and cover `vertices`.
    pub(crate) fn from_parts_unchecked(
        vertices: BTreeSet<VertexLabel>,
        facets: BTreeSet<SubsetKey>,
    ) -> Self {
        AbstractComplex { vertices, facets }
    }

    /// The full simplex on `key`.
    pub fn simplex(key: SubsetKey) -> Self {
        AbstractComplex::from_facets([key])
    }

    /// All proper faces of the simplex on `key`: the boundary sphere.
    /// The boundary of a single vertex is the empty complex.
    pub fn simplex_boundary(key: &SubsetKey) -> Self {
        let facets = key.labels().iter().filter_map(|skip| {
            SubsetKey::new(key.labels().iter().filter(|l| *l != skip).cloned()).ok()
        });
        AbstractComplex::from_facets(facets)
    }

    pub fn vertices(&self) -> &BTreeSet<VertexLabel> {
        &self.vertices
    }

    pub fn facets(&self) -> &BTreeSet<SubsetKey> {
        &self.facets
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Largest facet size minus one; `None` for the empty complex.
    pub fn dimension(&self) -> Option<usize> {
        self.facets.iter().map(|f| f.len() - 1).max()
    }

    pub fn contains(&self, key: &SubsetKey) -> bool {
        self.facets.iter().any(|f| key.is_subset_of(f))
    }

    /// Every simplex of the complex, failing once more than `cap` are found.
    pub fn faces_capped(&self, cap: usize) -> Result<BTreeSet<SubsetKey>> {
        let mut faces = BTreeSet::new();
        for facet in &self.facets {
            let labels = facet.labels();
            if labels.len() >= usize::BITS as usize - 1 || (1usize << labels.len()) - 1 > cap {
                return Err(Error::FaceCapExceeded { cap });
            }
            for mask in 1usize..(1 << labels.len()) {
                let face = labels
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, l)| l.clone());
                faces.insert(SubsetKey::new(face).expect("mask is nonzero"));
                if faces.len() > cap {
                    return Err(Error::FaceCapExceeded { cap });
                }
            }
        }
        Ok(faces)
    }

    pub fn faces(&self) -> Result<BTreeSet<SubsetKey>> {
        self.faces_capped(DEFAULT_FACE_CAP)
    }

    /// Number of simplices of each dimension, `f_vector()[k]` counting
    /// the k-simplices.
    pub fn f_vector(&self) -> Result<Vec<usize>> {
        let mut counts = vec![0; self.dimension().map_or(0, |d| d + 1)];
        for face in self.faces()? {
            counts[face.len() - 1] += 1;
        }
        Ok(counts)
    }
}

fn maximal_sets(mut sets: Vec<SubsetKey>) -> BTreeSet<SubsetKey> {
    sets.sort_by(|a, b| b.cmp(a));
    sets.dedup();
    let mut kept: Vec<SubsetKey> = Vec::with_capacity(sets.len());
    for set in sets {
        if !kept.iter().any(|k| set.is_subset_of(k)) {
            kept.push(set);
        }
    }
    kept.into_iter().collect()
}

/// True iff `key` lies in some facet of `complex`.
pub fn is_simplex(complex: &AbstractComplex, key: &SubsetKey) -> bool {
    complex.contains(key)
}

/// Alternating count of simplices by dimension.
pub fn euler_characteristic(complex: &AbstractComplex) -> Result<i64> {
    Ok(complex
        .f_vector()?
        .iter()
        .enumerate()
        .map(|(k, &n)| if k % 2 == 0 { n as i64 } else { -(n as i64) })
        .sum())
}

/// Join of complexes on disjoint alphabets: the facets are unions of a facet
/// of each side, so `T` is a simplex iff both of its traces are (an empty
/// trace counts as a simplex).
pub fn join_complexes(k: &AbstractComplex, l: &AbstractComplex) -> Result<AbstractComplex> {
    if let Some(shared) = k.vertices.intersection(&l.vertices).next() {
        return Err(Error::OverlappingAlphabets(shared.to_string()));
    }
    let vertices = k.vertices.union(&l.vertices).cloned().collect();
    let facets = if k.facets.is_empty() {
        l.facets.clone()
    } else if l.facets.is_empty() {
        k.facets.clone()
    } else {
        k.facets
            .iter()
            .flat_map(|f| l.facets.iter().map(move |g| f.union(g)))
            .collect()
    };
    Ok(AbstractComplex::from_parts_unchecked(vertices, facets))
}

/// Nerve of a sampled partition: the simplices are the sets of labels that
/// are simultaneously positive at some sample point.
pub fn nerve_of_sample(points: &[ProbVector]) -> Result<AbstractComplex> {
    if points.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(AbstractComplex::from_facets(
        points.iter().filter_map(|p| p.support_key()),
    ))
}
