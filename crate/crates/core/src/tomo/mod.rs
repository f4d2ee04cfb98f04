//! Parallel-beam computed tomography test problems: the Shepp–Logan phantom,
//! an exact ray/pixel intersection-length system matrix and relative noise.
//!
//! The image occupies the square `[−m/2, m/2]²` with unit pixels. Pixel
//! `(row, col)` has its center at `(col + ½ − m/2, m/2 − row − ½)`, so row 0 is
//! the top of the image, and maps to column `row·m + col` of the system matrix.

mod geometry;
mod image;
mod noise;
mod phantom;

pub use geometry::{build_parallel_tomo, ray_intersections, TomoGeometry};
pub use image::{write_csv, write_pgm};
pub use noise::{add_noise, NoiseModel};
pub use phantom::{shepp_logan, shepp_logan_at, Ellipse, SHEPP_LOGAN_TABLE};

use crate::error::Result;
use crate::functionals::ProblemData;
use crate::linalg::SparseMatrix;
use crate::Real;
use std::sync::Arc;

/// A complete synthetic problem: operator, phantom, clean and noisy sinograms.
#[derive(Debug, Clone)]
pub struct ProblemInstance<T> {
    pub geometry: TomoGeometry,
    pub operator: Arc<SparseMatrix<T>>,
    pub truth: Vec<T>,
    pub clean: Vec<T>,
    pub noisy: Vec<T>,
    /// Absolute noise level `δ = ‖y − y^δ‖₂`.
    pub delta: T,
    pub noise: NoiseModel,
}

impl<T: Real> ProblemInstance<T> {
    /// Assembles the system matrix and phantom, projects it and adds noise.
    pub fn generate(geometry: TomoGeometry, noise: NoiseModel) -> Result<Self> {
        let operator = Arc::new(build_parallel_tomo::<T>(&geometry)?);
        Self::with_operator(geometry, operator, noise)
    }

    /// Like [`generate`](Self::generate) but reuses an assembled operator.
    pub fn with_operator(
        geometry: TomoGeometry,
        operator: Arc<SparseMatrix<T>>,
        noise: NoiseModel,
    ) -> Result<Self> {
        let truth = shepp_logan::<T>(geometry.m);
        let clean = operator.matvec(&truth)?;
        let (noisy, delta) = add_noise(&clean, &noise);
        Ok(Self {
            geometry,
            operator,
            truth,
            clean,
            noisy,
            delta,
            noise,
        })
    }

    /// Regularized problem on the noisy data with the phantom as ground truth.
    pub fn problem(&self, alpha: T) -> Result<ProblemData<T>> {
        ProblemData::new(self.operator.clone(), self.noisy.clone(), alpha)?
            .with_ground_truth(self.truth.clone())
    }
}
