use crate::Real;

/// Versioned parameter table of the 10-ellipse Shepp–Logan phantom.
pub const SHEPP_LOGAN_TABLE: &str = include_str!("../../data/shepp_logan_v1.csv");

/// One additive ellipse in normalized `[−1, 1]²` coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub density: f64,
    pub semi_x: f64,
    pub semi_y: f64,
    pub center_x: f64,
    pub center_y: f64,
    pub angle_deg: f64,
}

impl Ellipse {
    pub fn contains(&self, u: f64, v: f64) -> bool {
        let (sin, cos) = self.angle_deg.to_radians().sin_cos();
        let du = u - self.center_x;
        let dv = v - self.center_y;
        let along = du * cos + dv * sin;
        let across = -du * sin + dv * cos;
        (along / self.semi_x).powi(2) + (across / self.semi_y).powi(2) <= 1.0
    }

    /// Parses the bundled table; `#` lines are comments.
    pub fn shepp_logan() -> Vec<Ellipse> {
        SHEPP_LOGAN_TABLE
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                let f: Vec<f64> = l
                    .split(',')
                    .map(|v| v.trim().parse().expect("bundled phantom table is well formed"))
                    .collect();
                Ellipse {
                    density: f[0],
                    semi_x: f[1],
                    semi_y: f[2],
                    center_x: f[3],
                    center_y: f[4],
                    angle_deg: f[5],
                }
            })
            .collect()
    }
}

/// Sums of decimal densities that cancel exactly (1 − 0.98 − 0.02) leave
/// rounding residue near 1e-17; anything this small is an exact zero.
const CANCELLATION_FLOOR: f64 = 1e-12;

fn density_at(ellipses: &[Ellipse], u: f64, v: f64) -> f64 {
    let sum: f64 = ellipses
        .iter()
        .filter(|e| e.contains(u, v))
        .map(|e| e.density)
        .sum();
    if sum.abs() < CANCELLATION_FLOOR {
        0.0
    } else {
        sum
    }
}

/// Phantom density at normalized coordinates `(u, v) ∈ [−1, 1]²`.
pub fn shepp_logan_at(u: f64, v: f64) -> f64 {
    density_at(&Ellipse::shepp_logan(), u, v)
}

/// `m × m` phantom sampled at pixel centers, row-major with row 0 on top.
pub fn shepp_logan<T: Real>(m: usize) -> Vec<T> {
    let ellipses = Ellipse::shepp_logan();
    let half = m as f64 / 2.0;
    let mut out = Vec::with_capacity(m * m);
    for row in 0..m {
        let v = (half - row as f64 - 0.5) / half;
        for col in 0..m {
            let u = (col as f64 + 0.5 - half) / half;
            out.push(T::lit(density_at(&ellipses, u, v)));
        }
    }
    out
}
