//! Spectral configurations: finitely many distinct real eigenvalues, each
//! carrying an orthonormal frame of its eigenspace. Projections are never
//! stored; `P = F F^*`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::{matrix_from_json, matrix_to_json, JsonMatrix};
use crate::linalg::{
    cluster_sorted, matmul, frobenius, gram, hermitian_eigen, hermitian_norm, hstack, mul_frame,
    operator_norm, orthonormalize, real, CMat,
};
use crate::module::Context;

/// Relative tolerance for merging eigenvalues found by decomposition.
pub const TAU_EIG: f64 = 1e-8;
pub const SELF_ADJOINT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub lambda: f64,
    pub frame: CMat,
}

impl Point {
    pub fn rank(&self) -> usize {
        self.frame.ncols()
    }

    pub fn projection(&self) -> CMat {
        &self.frame * self.frame.adjoint()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralConfiguration {
    ambient_dim: usize,
    points: Vec<Point>,
}

impl SpectralConfiguration {
    /// The base point: empty domain.
    pub fn base_point(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            points: Vec::new(),
        }
    }

    /// Builds a configuration and checks its invariants.
    pub fn new(ambient_dim: usize, points: Vec<Point>) -> Result<Self> {
        let c = Self::from_points_unchecked(ambient_dim, points);
        c.validate()?;
        Ok(c)
    }

    /// Caller guarantees orthonormal, mutually orthogonal frames and
    /// distinct finite eigenvalues. Points are sorted by eigenvalue.
    pub fn from_points_unchecked(ambient_dim: usize, mut points: Vec<Point>) -> Self {
        points.retain(|p| p.rank() > 0);
        points.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        Self { ambient_dim, points }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn is_base_point(&self) -> bool {
        self.points.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.points.iter().map(Point::rank).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.lambda).collect()
    }

    /// Eigenvalues repeated by multiplicity, ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        self.points
            .iter()
            .flat_map(|p| std::iter::repeat_n(p.lambda, p.rank()))
            .collect()
    }

    /// Orthonormal frame of the domain, point frames side by side.
    pub fn domain_frame(&self) -> CMat {
        let frames: Vec<&CMat> = self.points.iter().map(|p| &p.frame).collect();
        hstack(&frames, self.ambient_dim)
    }

    pub fn domain_projection(&self) -> CMat {
        let f = self.domain_frame();
        &f * f.adjoint()
    }

    /// Domain frame `V` and the compressed operator `V^* G V` (diagonal).
    pub fn compressed(&self) -> (CMat, CMat) {
        let v = self.domain_frame();
        let diag = nalgebra::DVector::from_iterator(
            v.ncols(),
            self.spectrum().into_iter().map(real),
        );
        (v, CMat::from_diagonal(&diag))
    }

    /// `Σ λ P_λ` on the ambient space.
    pub fn assemble(&self) -> CMat {
        let (v, a) = self.compressed();
        let scaled = CMat::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] * a[(j, j)]);
        matmul(&scaled, &v.adjoint())
    }

    pub fn validate(&self) -> Result<()> {
        let tol = 1e-12;
        for (a, p) in self.points.iter().enumerate() {
            if !p.lambda.is_finite() {
                return Err(Error::Invariant {
                    check: "finite eigenvalues".into(),
                    residual: f64::INFINITY,
                });
            }
            if p.frame.nrows() != self.ambient_dim {
                return Err(Error::AmbientMismatch(format!(
                    "frame has {} rows, ambient has {}",
                    p.frame.nrows(),
                    self.ambient_dim
                )));
            }
            let id = CMat::identity(p.rank(), p.rank());
            let defect = frobenius(&(gram(&p.frame, &p.frame) - id));
            if defect > tol {
                return Err(Error::Invariant {
                    check: "projection is idempotent and self-adjoint".into(),
                    residual: defect,
                });
            }
            for q in &self.points[a + 1..] {
                if q.lambda == p.lambda {
                    return Err(Error::Invariant {
                        check: "distinct eigenvalues".into(),
                        residual: 0.0,
                    });
                }
                let overlap = frobenius(&gram(&p.frame, &q.frame));
                if overlap > tol {
                    return Err(Error::Invariant {
                        check: "projections pairwise orthogonal".into(),
                        residual: overlap,
                    });
                }
            }
        }
        Ok(())
    }

    /// Spectral decomposition of `V A V^*` for a frame `V` with orthonormal
    /// columns and a Hermitian `A`.
    pub fn from_compressed(frame: &CMat, a: &CMat) -> Self {
        let n = frame.nrows();
        if a.nrows() == 0 {
            return Self::base_point(n);
        }
        let (values, vectors) = hermitian_eigen(a);
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let points = cluster_sorted(&values, TAU_EIG * scale.max(f64::MIN_POSITIVE))
            .into_iter()
            .map(|(lambda, idx)| {
                let q = CMat::from_fn(vectors.nrows(), idx.len(), |r, c| vectors[(r, idx[c])]);
                Point {
                    lambda,
                    frame: mul_frame(frame, &q),
                }
            })
            .collect();
        Self::from_points_unchecked(n, points)
    }

    /// Decomposes a self-adjoint matrix supported on `domain` (a projection;
    /// `None` means the whole space).
    pub fn decompose(m: &CMat, domain: Option<&CMat>) -> Result<Self> {
        let n = m.nrows();
        let asym = frobenius(&(m - m.adjoint()));
        if asym > SELF_ADJOINT_TOL {
            return Err(Error::NotSelfAdjoint(asym));
        }
        let frame = match domain {
            None => CMat::identity(n, n),
            Some(d) => {
                let (vals, vecs) = hermitian_eigen(d);
                let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > 0.5).collect();
                CMat::from_fn(n, keep.len(), |r, c| vecs[(r, keep[c])])
            }
        };
        let a = gram(&frame, &mul_frame(m, &frame));
        Ok(Self::from_compressed(&frame, &a))
    }

    /// Applies `f` to every eigenvalue. Points sent to the same value merge;
    /// points sent to a non-finite value are deleted.
    pub fn functional_calculus(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut mapped: Vec<(f64, &CMat)> = self
            .points
            .iter()
            .map(|p| (f(p.lambda), &p.frame))
            .filter(|(v, _)| v.is_finite())
            .collect();
        mapped.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut points: Vec<Point> = Vec::new();
        let mut i = 0;
        while i < mapped.len() {
            let lambda = mapped[i].0;
            let mut j = i;
            while j < mapped.len() && same_value(mapped[j].0, lambda) {
                j += 1;
            }
            let frames: Vec<&CMat> = mapped[i..j].iter().map(|(_, f)| *f).collect();
            points.push(Point {
                lambda,
                frame: hstack(&frames, self.ambient_dim),
            });
            i = j;
        }
        Self::from_points_unchecked(self.ambient_dim, points)
    }

    /// Extends every frame by zero rows to an ambient of dimension
    /// `self.ambient_dim() + extra`.
    pub fn extend_by_zero(&self, extra: usize) -> Self {
        let n = self.ambient_dim + extra;
        let points = self
            .points
            .iter()
            .map(|p| {
                let mut frame = CMat::zeros(n, p.rank());
                frame.rows_mut(0, self.ambient_dim).copy_from(&p.frame);
                Point {
                    lambda: p.lambda,
                    frame,
                }
            })
            .collect();
        Self::from_points_unchecked(n, points)
    }

    /// Applies a linear isometry (given as a function on frames) to every
    /// eigenspace.
    pub fn map_frames(&self, ambient_dim: usize, f: impl Fn(&CMat) -> CMat) -> Self {
        let points = self
            .points
            .iter()
            .map(|p| Point {
                lambda: p.lambda,
                frame: f(&p.frame),
            })
            .collect();
        Self::from_points_unchecked(ambient_dim, points)
    }

    pub fn to_json(&self, context: Option<Context>) -> ConfigJson {
        ConfigJson {
            schema: "config.v1".into(),
            ambient: AmbientRef {
                dim: self.ambient_dim,
                context,
            },
            points: self
                .points
                .iter()
                .map(|p| PointJson {
                    lambda: p.lambda,
                    projection: matrix_to_json(&p.projection()),
                    frame: Some(matrix_to_json(&p.frame)),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &ConfigJson) -> Result<Self> {
        let n = json.ambient.dim;
        let mut points = Vec::with_capacity(json.points.len());
        for p in &json.points {
            let frame = match &p.frame {
                Some(f) => matrix_from_json(f)?,
                None => {
                    let proj = matrix_from_json(&p.projection)?;
                    if proj.nrows() != n || proj.ncols() != n {
                        return Err(Error::Parse("projection has wrong shape".into()));
                    }
                    let (vals, vecs) = hermitian_eigen(&proj);
                    let keep: Vec<usize> = (0..n).filter(|&i| vals[i] > 0.5).collect();
                    CMat::from_fn(n, keep.len(), |r, c| vecs[(r, keep[c])])
                }
            };
            points.push(Point {
                lambda: p.lambda,
                frame,
            });
        }
        Self::new(n, points)
    }
}

fn same_value(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AmbientRef {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<Context>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointJson {
    pub lambda: f64,
    pub projection: JsonMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<JsonMatrix>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConfigJson {
    #[serde(default = "config_schema")]
    pub schema: String,
    pub ambient: AmbientRef,
    pub points: Vec<PointJson>,
}

fn config_schema() -> String {
    "config.v1".into()
}

/// A configuration together with its `(p,q,k,l)` context.
#[derive(Clone, Debug, PartialEq)]
pub struct HinfOperator {
    pub config: SpectralConfiguration,
    pub context: Context,
}

impl HinfOperator {
    pub fn new(config: SpectralConfiguration, context: Context) -> Self {
        Self { config, context }
    }

    pub fn base_point(ambient_dim: usize, context: Context) -> Self {
        Self::new(SpectralConfiguration::base_point(ambient_dim), context)
    }

    pub fn ambient_dim(&self) -> usize {
        self.config.ambient_dim()
    }

    pub fn is_base_point(&self) -> bool {
        self.config.is_base_point()
    }

    pub fn to_json(&self) -> ConfigJson {
        self.config.to_json(Some(self.context))
    }

    pub fn from_json(json: &ConfigJson) -> Result<Self> {
        let context = json
            .ambient
            .context
            .ok_or_else(|| Error::Parse("configuration has no context".into()))?;
        Ok(Self::new(SpectralConfiguration::from_json(json)?, context))
    }
}

/// Distance in `ℝ ∪ {∞}` via `arctan`.
pub fn compactified_distance(a: f64, b: f64) -> f64 {
    (a.atan() - b.atan()).abs()
}

pub fn distance_to_infinity(a: f64) -> f64 {
    FRAC_PI_2 - a.atan().abs()
}

/// Operator-norm distance `‖F₁F₁^* − F₂F₂^*‖` between two projections.
pub fn projection_distance(f1: &CMat, f2: &CMat) -> f64 {
    let n = f1.nrows();
    let w = orthonormalize(&hstack(&[f1, f2], n), 1e-10);
    let a = gram(&w, f1);
    let b = gram(&w, f2);
    let diff = &a * a.adjoint() - &b * b.adjoint();
    hermitian_norm(&diff)
}

/// Minimal-cost matching metric between configurations: matched points
/// cost `|arctan λ − arctan μ| + ‖P − Q‖`, unmatched points cost their
/// distance to `∞`.
pub fn configuration_distance(c1: &SpectralConfiguration, c2: &SpectralConfiguration) -> Result<f64> {
    if c1.ambient_dim() != c2.ambient_dim() {
        return Err(Error::AmbientMismatch(format!(
            "configurations on ambients of dimension {} and {}",
            c1.ambient_dim(),
            c2.ambient_dim()
        )));
    }
    let (a, b) = (c1.points(), c2.points());
    let (n1, n2) = (a.len(), b.len());
    let size = n1 + n2;
    if size == 0 {
        return Ok(0.0);
    }
    const FORBIDDEN: f64 = 1e6;
    let mut cost = vec![vec![0.0; size]; size];
    for i in 0..n1 {
        for j in 0..n2 {
            cost[i][j] = compactified_distance(a[i].lambda, b[j].lambda)
                + projection_distance(&a[i].frame, &b[j].frame);
        }
        for j in 0..n1 {
            cost[i][n2 + j] = if i == j { distance_to_infinity(a[i].lambda) } else { FORBIDDEN };
        }
    }
    for i in 0..n2 {
        for j in 0..n2 {
            cost[n1 + i][j] = if i == j { distance_to_infinity(b[i].lambda) } else { FORBIDDEN };
        }
    }
    let assignment = hungarian(&cost);
    Ok(assignment.iter().enumerate().map(|(i, &j)| cost[i][j]).sum())
}

/// Minimum-cost perfect matching on a square cost matrix (row `i` is
/// assigned column `result[i]`).
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut result = vec![0; n];
    for j in 1..=n {
        if matched_row[j] > 0 {
            result[matched_row[j] - 1] = j - 1;
        }
    }
    result
}

/// Largest deviation between the assembled operators of two configurations,
/// computed on the joint domain span.
pub fn operator_distance(c1: &SpectralConfiguration, c2: &SpectralConfiguration) -> f64 {
    let n = c1.ambient_dim();
    let (v1, a1) = c1.compressed();
    let (v2, a2) = c2.compressed();
    let w = orthonormalize(&hstack(&[&v1, &v2], n), 1e-10);
    let t1 = gram(&w, &v1);
    let t2 = gram(&w, &v2);
    let diff = &t1 * a1 * t1.adjoint() - &t2 * a2 * t2.adjoint();
    operator_norm(&diff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn diag(values: &[f64]) -> CMat {
        CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            values.len(),
            values.iter().map(|&v| real(v)),
        ))
    }

    #[test]
    fn decompose_diagonal() {
        let cfg = SpectralConfiguration::decompose(&diag(&[3.0, 3.0, -1.0]), None).unwrap();
        assert_eq!(cfg.eigenvalues(), vec![-1.0, 3.0]);
        assert_eq!(cfg.points()[1].rank(), 2);
        assert!((cfg.assemble() - diag(&[3.0, 3.0, -1.0])).norm() < 1e-14);
    }

    #[test]
    fn zero_on_domain_is_single_point() {
        let domain = diag(&[1.0, 0.0, 1.0]);
        let cfg = SpectralConfiguration::decompose(&CMat::zeros(3, 3), Some(&domain)).unwrap();
        assert_eq!(cfg.points().len(), 1);
        assert_eq!(cfg.points()[0].lambda, 0.0);
        assert!((cfg.domain_projection() - domain).norm() < 1e-14);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let mut m = CMat::zeros(2, 2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(
            SpectralConfiguration::decompose(&m, None),
            Err(Error::NotSelfAdjoint(_))
        ));
    }

    #[test]
    fn square_merges_opposite_points() {
        let cfg = SpectralConfiguration::decompose(&diag(&[1.0, -1.0]), None).unwrap();
        let sq = cfg.functional_calculus(|t| t * t);
        assert_eq!(sq.eigenvalues(), vec![1.0]);
        assert_eq!(sq.rank(), 2);
    }

    #[test]
    fn escape_deletes_points() {
        let cfg = SpectralConfiguration::decompose(&diag(&[0.5, 5.0, -7.0]), None).unwrap();
        let cut = cfg.functional_calculus(|t| if t.abs() > 2.0 { f64::INFINITY } else { t });
        assert_eq!(cut.eigenvalues(), vec![0.5]);
    }

    #[test]
    fn distance_to_base_point() {
        let cfg = SpectralConfiguration::decompose(&diag(&[2.0]), None).unwrap();
        let base = SpectralConfiguration::base_point(1);
        let d = configuration_distance(&base, &cfg).unwrap();
        assert!((d - distance_to_infinity(2.0)).abs() < 1e-15);
        assert_eq!(configuration_distance(&cfg, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn hungarian_small() {
        let cost = vec![vec![4.0, 1.0, 3.0], vec![2.0, 0.0, 5.0], vec![3.0, 2.0, 2.0]];
        let a = hungarian(&cost);
        let total: f64 = a.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
        assert_eq!(total, 5.0);
    }
}
