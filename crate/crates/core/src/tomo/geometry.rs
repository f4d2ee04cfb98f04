use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::Real;

/// Parallel-beam scan geometry over an `m × m` image of unit pixels.
///
/// Angles are `k·180°/n_angles`, `k = 0..n_angles`. At angle `θ` beam `i`
/// is the line `{s_i·(cos θ, sin θ) + t·(−sin θ, cos θ)}` with offsets
/// `s_i = (i − (n_beams − 1)/2)·spacing` centered on the image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TomoGeometry {
    pub m: usize,
    pub n_angles: usize,
    pub n_beams: usize,
    /// Distance between neighbouring beams in pixel units.
    pub spacing: f64,
}

impl TomoGeometry {
    /// Beams spread over the image width: `spacing = m/n_beams`.
    pub fn new(m: usize, n_angles: usize, n_beams: usize) -> Result<Self> {
        if n_beams == 0 {
            return Err(Error::InvalidParameter("n_beams must be positive".into()));
        }
        Self::with_spacing(m, n_angles, n_beams, m as f64 / n_beams as f64)
    }

    pub fn with_spacing(m: usize, n_angles: usize, n_beams: usize, spacing: f64) -> Result<Self> {
        if m == 0 || n_angles == 0 || n_beams == 0 {
            return Err(Error::InvalidParameter(format!(
                "geometry needs positive sizes, got m={m}, angles={n_angles}, beams={n_beams}"
            )));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "beam spacing must be positive, got {spacing}"
            )));
        }
        Ok(Self {
            m,
            n_angles,
            n_beams,
            spacing,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_angles * self.n_beams
    }

    pub fn n_cols(&self) -> usize {
        self.m * self.m
    }

    pub fn angle_deg(&self, k: usize) -> f64 {
        k as f64 * 180.0 / self.n_angles as f64
    }

    pub fn beam_offset(&self, i: usize) -> f64 {
        (i as f64 - (self.n_beams as f64 - 1.0) / 2.0) * self.spacing
    }
}

/// Segments shorter than this are treated as grid-corner round-off.
const MIN_CHORD: f64 = 1e-10;

/// Intersection lengths of the line `s·n(θ) + t·d(θ)` with the pixels of an
/// `m × m` grid, as `(column index, length)` pairs in traversal order.
///
/// The line is split at every grid crossing; each piece is assigned to the
/// cell containing its midpoint (a piece running along a grid line goes to the
/// cell on its right/lower-row side).
pub fn ray_intersections(m: usize, offset: f64, theta_rad: f64) -> Vec<(usize, f64)> {
    let half = m as f64 / 2.0;
    let (sin, cos) = theta_rad.sin_cos();
    let origin = (offset * cos, offset * sin);
    let dir = (-sin, cos);

    // Parametric interval inside the box [−half, half]².
    let mut t_lo = f64::NEG_INFINITY;
    let mut t_hi = f64::INFINITY;
    for (o, d) in [(origin.0, dir.0), (origin.1, dir.1)] {
        if d.abs() < 1e-15 {
            if o < -half || o >= half {
                return Vec::new();
            }
        } else {
            let a = (-half - o) / d;
            let b = (half - o) / d;
            t_lo = t_lo.max(a.min(b));
            t_hi = t_hi.min(a.max(b));
        }
    }
    if !(t_hi - t_lo > MIN_CHORD) {
        return Vec::new();
    }

    let mut cuts = vec![t_lo, t_hi];
    for (o, d) in [(origin.0, dir.0), (origin.1, dir.1)] {
        if d.abs() < 1e-15 {
            continue;
        }
        for j in 1..m {
            let t = (j as f64 - half - o) / d;
            if t > t_lo && t < t_hi {
                cuts.push(t);
            }
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite crossing parameters"));

    let mut out: Vec<(usize, f64)> = Vec::with_capacity(2 * m);
    for w in cuts.windows(2) {
        let len = w[1] - w[0];
        if len <= MIN_CHORD {
            continue;
        }
        let mid = 0.5 * (w[0] + w[1]);
        let x = origin.0 + mid * dir.0;
        let y = origin.1 + mid * dir.1;
        let col = (x + half).floor();
        let row = (half - y).floor();
        if col < 0.0 || row < 0.0 || col >= m as f64 || row >= m as f64 {
            continue;
        }
        let idx = row as usize * m + col as usize;
        match out.last_mut() {
            Some((last, l)) if *last == idx => *l += len,
            _ => out.push((idx, len)),
        }
    }
    out
}

/// Assembles the `(n_angles·n_beams) × m²` matrix of ray/pixel intersection
/// lengths. Row `k·n_beams + i` belongs to angle `k`, beam `i`.
pub fn build_parallel_tomo<T: Real>(geom: &TomoGeometry) -> Result<SparseMatrix<T>> {
    let mut rows = Vec::with_capacity(geom.n_rows());
    for k in 0..geom.n_angles {
        let theta = geom.angle_deg(k).to_radians();
        for i in 0..geom.n_beams {
            rows.push(
                ray_intersections(geom.m, geom.beam_offset(i), theta)
                    .into_iter()
                    .map(|(c, len)| (c, T::lit(len)))
                    .collect(),
            );
        }
    }
    SparseMatrix::from_rows(geom.n_cols(), rows)
}
