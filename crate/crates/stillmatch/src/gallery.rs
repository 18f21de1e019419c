//! Labeled reference gallery and its precomputed class-to-class distances.
//!
//! `interclass[c][i]` is the mean dissimilarity from instances of class `c`
//! to instances of class `i`, averaged over all ordered pairs. The diagonal
//! keeps zero self-pairs, so `interclass[c][c]` is deflated by
//! `(R_c - 1) / R_c` relative to the corrected estimate;
//! [`DiagonalMode::ExcludeSelfPairs`] restores the corrected mean. Single
//! instance classes get `interclass[c][c] = 0` and `intra_valid[c] = false`.
//!
//! Per-cell sums are accumulated in sorted order, so rebuilding from a
//! permuted instance list reproduces the matrix bit for bit.

use crate::distance::{check_prob_domain, DissimilarityKind};
use crate::error::{Error, Result};
use crate::feature::FeatureVector;

pub type ClassId = usize;

/// Distances below this cannot serve as regularizer denominators and the
/// corresponding profile terms are skipped.
pub const MIN_USABLE_DISTANCE: f64 = 1e-12;

/// Immutable set of labeled reference vectors. Class ids are contiguous:
/// every id in `0..num_classes` has at least one instance.
#[derive(Debug, Clone)]
pub struct Gallery {
    dim: usize,
    num_classes: usize,
    instances: Vec<FeatureVector>,
    labels: Vec<ClassId>,
    members: Vec<Vec<usize>>,
}

impl Gallery {
    pub fn new(entries: Vec<(FeatureVector, ClassId)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyGallery);
        }
        let dim = entries[0].0.dim();
        let num_classes = entries.iter().map(|(_, c)| c + 1).max().unwrap();
        let mut instances = Vec::with_capacity(entries.len());
        let mut labels = Vec::with_capacity(entries.len());
        let mut members = vec![Vec::new(); num_classes];
        for (r, (v, c)) in entries.into_iter().enumerate() {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.dim(),
                });
            }
            members[c].push(r);
            instances.push(v);
            labels.push(c);
        }
        if let Some(c) = members.iter().position(|m| m.is_empty()) {
            return Err(Error::MissingClass(c));
        }
        Ok(Self {
            dim,
            num_classes,
            instances,
            labels,
            members,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    /// Total instance count across all classes.
    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn instance(&self, r: usize) -> &FeatureVector {
        &self.instances[r]
    }

    pub fn label(&self, r: usize) -> ClassId {
        self.labels[r]
    }

    pub fn class_members(&self, c: ClassId) -> Result<&[usize]> {
        self.members
            .get(c)
            .map(Vec::as_slice)
            .ok_or(Error::UnknownClass(c))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&FeatureVector, ClassId)> {
        self.instances.iter().zip(self.labels.iter().copied())
    }
}

/// Distance of one frame to a class: the minimum over that class's instances
/// (single linkage).
pub fn class_distance(
    gallery: &Gallery,
    kind: DissimilarityKind,
    x: &FeatureVector,
    c: ClassId,
) -> Result<f64> {
    if x.dim() != gallery.dim() {
        return Err(Error::DimensionMismatch {
            expected: gallery.dim(),
            got: x.dim(),
        });
    }
    check_prob_domain(kind, x)?;
    let members = gallery.class_members(c)?;
    Ok(members
        .iter()
        .map(|&r| kind.eval_raw(x.values(), gallery.instance(r).values()))
        .fold(f64::INFINITY, f64::min))
}

/// Distances of one frame to every class, computed in a single pass over all
/// instances. Entry `c` equals [`class_distance`] for class `c`.
pub fn all_class_distances(
    gallery: &Gallery,
    kind: DissimilarityKind,
    x: &FeatureVector,
) -> Result<Vec<f64>> {
    if x.dim() != gallery.dim() {
        return Err(Error::DimensionMismatch {
            expected: gallery.dim(),
            got: x.dim(),
        });
    }
    check_prob_domain(kind, x)?;
    let mut dists = vec![f64::INFINITY; gallery.num_classes()];
    for (v, c) in gallery.entries() {
        let d = kind.eval_raw(x.values(), v.values());
        if d < dists[c] {
            dists[c] = d;
        }
    }
    Ok(dists)
}

/// How diagonal cells of the interclass matrix average over instance pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiagonalMode {
    /// Average over all `R_c^2` ordered pairs, zero self-pairs included.
    #[default]
    IncludeSelfPairs,
    /// Average over the `R_c (R_c - 1)` ordered pairs of distinct instances.
    ExcludeSelfPairs,
}

/// Gallery plus its class-to-class mean distance matrix.
#[derive(Debug, Clone)]
pub struct GalleryIndex {
    gallery: Gallery,
    kind: DissimilarityKind,
    interclass: Vec<Vec<f64>>,
    intra_valid: Vec<bool>,
}

impl GalleryIndex {
    pub fn gallery(&self) -> &Gallery {
        &self.gallery
    }

    pub fn kind(&self) -> DissimilarityKind {
        self.kind
    }

    pub fn interclass(&self, c: ClassId, i: ClassId) -> f64 {
        self.interclass[c][i]
    }

    pub fn interclass_row(&self, c: ClassId) -> &[f64] {
        &self.interclass[c]
    }

    /// Whether `interclass[c][c]` is a usable intra-class spread estimate.
    /// False for single-instance classes and for classes whose instances
    /// coincide.
    pub fn intra_valid(&self, c: ClassId) -> bool {
        self.intra_valid[c]
    }

    pub fn class_distance(&self, x: &FeatureVector, c: ClassId) -> Result<f64> {
        class_distance(&self.gallery, self.kind, x, c)
    }

    pub fn all_class_distances(&self, x: &FeatureVector) -> Result<Vec<f64>> {
        all_class_distances(&self.gallery, self.kind, x)
    }
}

/// Builds the index with the default diagonal handling.
pub fn build_index(gallery: Gallery, kind: DissimilarityKind) -> Result<GalleryIndex> {
    build_index_with(gallery, kind, DiagonalMode::default())
}

/// Builds the index, choosing how diagonal cells are averaged.
pub fn build_index_with(
    gallery: Gallery,
    kind: DissimilarityKind,
    mode: DiagonalMode,
) -> Result<GalleryIndex> {
    for (v, _) in gallery.entries() {
        check_prob_domain(kind, v)?;
    }
    let c_count = gallery.num_classes();
    let mut interclass = vec![vec![0.0; c_count]; c_count];
    let mut scratch: Vec<f64> = Vec::new();
    for (c, row) in interclass.iter_mut().enumerate() {
        for (i, cell) in row.iter_mut().enumerate() {
            scratch.clear();
            for &r in gallery.class_members(c)? {
                for &ri in gallery.class_members(i)? {
                    if mode == DiagonalMode::ExcludeSelfPairs && r == ri {
                        continue;
                    }
                    scratch.push(
                        kind.eval_raw(gallery.instance(r).values(), gallery.instance(ri).values()),
                    );
                }
            }
            // Sorted accumulation makes the cell independent of instance order.
            scratch.sort_unstable_by(f64::total_cmp);
            let sum: f64 = scratch.iter().sum();
            *cell = if scratch.is_empty() {
                0.0
            } else {
                sum / scratch.len() as f64
            };
        }
    }
    let intra_valid = (0..c_count)
        .map(|c| {
            gallery.class_members(c).is_ok_and(|m| m.len() > 1)
                && interclass[c][c] >= MIN_USABLE_DISTANCE
        })
        .collect();
    Ok(GalleryIndex {
        gallery,
        kind,
        interclass,
        intra_valid,
    })
}
