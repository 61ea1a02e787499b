//! Minkowski linear algebra and hyperboloid-model primitives.
//!
//! Hyperbolic `d`-space is the upper sheet `{x : B(x, x) = 1, x_0 > 0}` of
//! `R^{d+1}` with the form `B = diag(1, -1, ..., -1)`. Isometries are
//! time-orientation preserving Lorentz matrices.
//!
//! Points and isometries carry their own dimension; nothing here assumes a
//! global ambient dimension.

use nalgebra::{DMatrix, DVector};
use serde::{Serialize, Serializer};

use crate::boundary::IdealPoint;
use crate::error::{Error, Result};
use crate::tolerance;

/// A vector in `R^{1,d}`; coordinate 0 is time.
#[derive(Debug, Clone, PartialEq)]
pub struct MinkowskiVector {
    coords: DVector<f64>,
}

impl MinkowskiVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        Self::from_dvector(DVector::from_vec(coords))
    }

    pub fn from_dvector(coords: DVector<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidVector(format!(
                "need at least 2 coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidVector("non-finite coordinate".into()));
        }
        Ok(Self { coords })
    }

    /// Spatial dimension `d`.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn into_dvector(self) -> DVector<f64> {
        self.coords
    }

    pub fn time(&self) -> f64 {
        self.coords[0]
    }

    pub fn spatial(&self) -> nalgebra::DVectorView<'_, f64> {
        self.coords.rows(1, self.dim())
    }

    pub fn euclidean_norm(&self) -> f64 {
        self.coords.norm()
    }
}

impl Serialize for MinkowskiVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.coords.iter())
    }
}

/// `B(u, v) = u_0 v_0 - sum_{i >= 1} u_i v_i` on raw coordinate vectors.
pub(crate) fn form(u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    let spatial: f64 = u
        .iter()
        .zip(v.iter())
        .skip(1)
        .map(|(a, b)| a * b)
        .sum();
    u[0] * v[0] - spatial
}

/// The Minkowski bilinear form.
pub fn mink_inner(u: &MinkowskiVector, v: &MinkowskiVector) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            left: u.dim(),
            right: v.dim(),
        });
    }
    Ok(form(&u.coords, &v.coords))
}

/// `J = diag(1, -1, ..., -1)` of size `n`.
pub fn form_matrix(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::<f64>::identity(n, n);
    for i in 1..n {
        j[(i, i)] = -1.0;
    }
    j
}

/// Scale used to turn absolute structural tolerances into relative ones.
///
/// Far from the basepoint coordinates grow like `e^dist`, and `B(x, x)`
/// carries a rounding error proportional to `|x|^2`.
fn sheet_scale(v: &DVector<f64>) -> f64 {
    v.norm_squared().max(1.0)
}

/// A point of hyperbolic space on the upper sheet.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct HPoint {
    vector: MinkowskiVector,
}

impl HPoint {
    pub fn new(vector: MinkowskiVector) -> Result<Self> {
        let q = form(&vector.coords, &vector.coords);
        if (q - 1.0).abs() > tolerance::STRUCTURAL * sheet_scale(&vector.coords) {
            return Err(Error::OffSheet(format!("B(v, v) = {q}")));
        }
        if vector.time() <= 0.0 {
            return Err(Error::OffSheet(format!(
                "time coordinate {} is not positive",
                vector.time()
            )));
        }
        Ok(Self { vector })
    }

    pub fn from_coords(coords: Vec<f64>) -> Result<Self> {
        Self::new(MinkowskiVector::new(coords)?)
    }

    pub fn from_dvector(coords: DVector<f64>) -> Result<Self> {
        Self::new(MinkowskiVector::from_dvector(coords)?)
    }

    /// Skips the sheet check; callers guarantee the invariant by construction.
    pub(crate) fn from_dvector_unchecked(coords: DVector<f64>) -> Self {
        Self {
            vector: MinkowskiVector { coords },
        }
    }

    /// The basepoint `(1, 0, ..., 0)`.
    pub fn origin(dim: usize) -> Self {
        let mut coords = DVector::zeros(dim + 1);
        coords[0] = 1.0;
        Self::from_dvector_unchecked(coords)
    }

    /// The point at distance `t` from the origin in the direction of the unit
    /// spatial vector of `xi`.
    pub fn along_ray(xi: &IdealPoint, t: f64) -> Self {
        let v = xi.vector().coords();
        let mut coords = v.clone() * t.sinh();
        coords[0] = t.cosh();
        Self::from_dvector_unchecked(coords)
    }

    pub fn dim(&self) -> usize {
        self.vector.dim()
    }

    pub fn vector(&self) -> &MinkowskiVector {
        &self.vector
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.vector.coords
    }

    pub fn time(&self) -> f64 {
        self.vector.time()
    }
}

/// Hyperbolic distance `acosh B(p, q)`.
///
/// Bit-identical inputs give exactly 0. `B` slightly below 1 (within
/// rounding, scaled by the size of the inputs) clamps to 1; anything further
/// below is an error.
pub fn dist(p: &HPoint, q: &HPoint) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        });
    }
    if p.coords() == q.coords() {
        return Ok(0.0);
    }
    let b = form(p.coords(), q.coords());
    acosh_clamped(b, p.coords().norm() * q.coords().norm())
}

pub(crate) fn acosh_clamped(b: f64, scale: f64) -> Result<f64> {
    if b >= 1.0 {
        Ok(b.acosh())
    } else if b >= 1.0 - tolerance::CLAMP * scale.max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::OffSheet(format!("B(p, q) = {b} < 1")))
    }
}

/// Point at distance `t` from `p` on the geodesic segment to `q`.
pub fn geodesic_point(p: &HPoint, q: &HPoint, t: f64) -> Result<HPoint> {
    let d = dist(p, q)?;
    if !(t >= -tolerance::METRIC && t <= d + tolerance::METRIC) {
        return Err(Error::OutOfRange(format!("t = {t} not in [0, {d}]")));
    }
    let t = t.clamp(0.0, d);
    if t == 0.0 {
        return Ok(p.clone());
    }
    if t == d {
        return Ok(q.clone());
    }
    let s = d.sinh();
    let coords = p.coords() * ((d - t).sinh() / s) + q.coords() * (t.sinh() / s);
    Ok(HPoint::from_dvector_unchecked(coords))
}

/// A time-orientation preserving Lorentz matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    matrix: DMatrix<f64>,
    label: Option<String>,
}

impl Isometry {
    /// Validates `M^T J M = J` and `M_00 > 0` at the structural tolerance,
    /// relative to the squared entry size of `M`.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerance(matrix, tolerance::STRUCTURAL)
    }

    pub fn with_tolerance(matrix: DMatrix<f64>, tol: f64) -> Result<Self> {
        let defect = lorentz_defect(&matrix)?;
        let scale = matrix.amax().max(1.0).powi(2);
        if defect > tol * scale {
            return Err(Error::NotIsometry(format!(
                "|M^T J M - J| = {defect:.3e} exceeds {:.1e}",
                tol * scale
            )));
        }
        if matrix[(0, 0)] <= 0.0 {
            return Err(Error::NotIsometry("M_00 is not positive".into()));
        }
        Ok(Self {
            matrix,
            label: None,
        })
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<f64>) -> Self {
        Self {
            matrix,
            label: None,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_matrix_unchecked(DMatrix::identity(dim + 1, dim + 1))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Spatial dimension of the space acted on.
    pub fn dim(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn apply(&self, p: &HPoint) -> Result<HPoint> {
        self.check_dim(p.dim())?;
        Ok(HPoint::from_dvector_unchecked(&self.matrix * p.coords()))
    }

    pub fn apply_vector(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.matrix * v
    }

    pub fn apply_ideal(&self, xi: &IdealPoint) -> Result<IdealPoint> {
        self.check_dim(xi.dim())?;
        IdealPoint::from_lightlike(&(&self.matrix * xi.vector().coords()))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Isometry) -> Result<Isometry> {
        self.check_dim(other.dim())?;
        Ok(Self::from_matrix_unchecked(&self.matrix * &other.matrix))
    }

    /// `J M^T J`, exact for Lorentz matrices.
    pub fn inverse(&self) -> Isometry {
        let mut m = self.matrix.transpose();
        let n = m.nrows();
        for i in 0..n {
            for j in 0..n {
                if (i == 0) != (j == 0) {
                    m[(i, j)] = -m[(i, j)];
                }
            }
        }
        Self::from_matrix_unchecked(m)
    }

    pub fn pow(&self, n: i64) -> Isometry {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut acc = Self::identity(self.dim());
        for _ in 0..n.unsigned_abs() {
            acc = Self::from_matrix_unchecked(&acc.matrix * &base.matrix);
        }
        acc
    }

    pub fn frobenius_distance(&self, other: &Isometry) -> f64 {
        (&self.matrix - &other.matrix).norm()
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if self.dim() != d {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: d,
            });
        }
        Ok(())
    }
}

/// `max |M^T J M - J|`.
pub fn lorentz_defect(m: &DMatrix<f64>) -> Result<f64> {
    if m.nrows() != m.ncols() || m.nrows() < 2 {
        return Err(Error::NotIsometry(format!(
            "matrix is {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let j = form_matrix(m.nrows());
    Ok((m.transpose() * &j * m - j).amax())
}

/// Loxodromic translation by `length` along the geodesic from `repelling` to
/// `attracting`, acting trivially on the orthogonal complement of the axis.
pub fn translation_along(
    repelling: &IdealPoint,
    attracting: &IdealPoint,
    length: f64,
) -> Result<Isometry> {
    if repelling.dim() != attracting.dim() {
        return Err(Error::DimensionMismatch {
            left: repelling.dim(),
            right: attracting.dim(),
        });
    }
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::OutOfRange(format!("translation length {length}")));
    }
    let p = attracting.vector().coords();
    let q = repelling.vector().coords();
    let pq = form(p, q);
    if pq <= tolerance::STRUCTURAL {
        return Err(Error::OutOfRange("axis endpoints coincide".into()));
    }
    let n = p.len();
    let j = form_matrix(n);
    // L x = x + (e^l - 1) B(x,q)/B(p,q) p + (e^-l - 1) B(x,p)/B(p,q) q
    let jq = &j * q;
    let jp = &j * p;
    let m = DMatrix::identity(n, n)
        + p * jq.transpose() * (length.exp_m1() / pq)
        + q * jp.transpose() * ((-length).exp_m1() / pq);
    Ok(Isometry::from_matrix_unchecked(m))
}

/// Hyperbolic translation by `t` along the coordinate axis `axis` (in
/// `1..=dim`) through the origin.
pub fn boost(dim: usize, axis: usize, t: f64) -> Result<Isometry> {
    if axis == 0 || axis > dim || !t.is_finite() {
        return Err(Error::OutOfRange(format!("boost axis {axis} in dimension {dim}")));
    }
    let mut m = DMatrix::identity(dim + 1, dim + 1);
    let (c, s) = (t.cosh(), t.sinh());
    m[(0, 0)] = c;
    m[(axis, axis)] = c;
    m[(0, axis)] = s;
    m[(axis, 0)] = s;
    Ok(Isometry::from_matrix_unchecked(m))
}

/// Rotation by `angle` in the plane of spatial coordinates `plane.0`,
/// `plane.1` (indices into the full coordinate vector, so in `1..=dim`).
pub fn rotation_fixing_subspace(dim: usize, plane: (usize, usize), angle: f64) -> Result<Isometry> {
    let (i, j) = plane;
    if i == j || i == 0 || j == 0 || i > dim || j > dim {
        return Err(Error::OutOfRange(format!(
            "rotation plane ({i}, {j}) invalid in dimension {dim}"
        )));
    }
    let mut m = DMatrix::identity(dim + 1, dim + 1);
    let (s, c) = angle.sin_cos();
    m[(i, i)] = c;
    m[(i, j)] = -s;
    m[(j, i)] = s;
    m[(j, j)] = c;
    Ok(Isometry::from_matrix_unchecked(m))
}

/// The hyperbolic translation along the geodesic through `p` and `q` that
/// carries `p` to `q`.
pub fn transvection(p: &HPoint, q: &HPoint) -> Result<Isometry> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        });
    }
    let n = p.dim() + 1;
    let j = form_matrix(n);
    let c = form(p.coords(), q.coords());
    let s = p.coords() + q.coords();
    let jp = &j * p.coords();
    let js = &j * &s;
    // L x = x - (B(x,p) + B(x,q)) / (1 + B(p,q)) (p + q) + 2 B(x,p) q
    let m = DMatrix::identity(n, n) - &s * js.transpose() / (1.0 + c)
        + q.coords() * jp.transpose() * 2.0;
    Ok(Isometry::from_matrix_unchecked(m))
}
