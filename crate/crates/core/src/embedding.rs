//! Isometric embeddings of free-group tree balls into hyperbolic space.
//!
//! A ball of the Cayley tree is realized by factoring the Gram matrix
//! `M[x][y] = λ^{d(x,y)}` as the Minkowski Gram matrix of hyperboloid
//! points, so that `cosh dist(Ψ(x), Ψ(y)) = λ^{d(x,y)}`. Tree isometries that
//! act within the ball then extend to Lorentz matrices.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::free_group::{apply, ball, tree_dist, TreeMap, Word};
use crate::minkowski::{acosh_clamped, form, transvection, HPoint, Isometry};
use crate::tolerance;

/// A factored tree ball. `points[i]` is the image of `vertices[i]`.
#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingResult {
    pub lambda: f64,
    pub radius: usize,
    pub ambient_dim: usize,
    pub max_rel_residual: f64,
    pub vertices: Vec<Word>,
    pub points: Vec<HPoint>,
    pub gram_spectrum: Vec<f64>,
    #[serde(skip)]
    index: HashMap<Word, usize>,
}

impl EmbeddingResult {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn point(&self, w: &Word) -> Option<&HPoint> {
        self.index.get(w).map(|&i| &self.points[i])
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    /// Points as columns of a `(dim + 1) × n` matrix.
    pub fn point_matrix(&self) -> DMatrix<f64> {
        columns(self.points.iter().map(|p| p.coords()))
    }
}

fn columns<'a>(cols: impl ExactSizeIterator<Item = &'a DVector<f64>> + Clone) -> DMatrix<f64> {
    let n = cols.len();
    let rows = cols.clone().next().map_or(0, |c| c.len());
    let mut m = DMatrix::zeros(rows, n);
    for (j, c) in cols.enumerate() {
        m.set_column(j, c);
    }
    m
}

/// `M[x][y] = λ^{tree_dist(x, y)}`.
pub fn gram_matrix(vertices: &[Word], lambda: f64) -> Result<DMatrix<f64>> {
    if !(lambda > 1.0) || !lambda.is_finite() {
        return Err(Error::OutOfRange(format!("lambda = {lambda} must exceed 1")));
    }
    let n = vertices.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = 1.0;
        for j in 0..i {
            let d = tree_dist(&vertices[i], &vertices[j]);
            if d == 0 {
                return Err(Error::OutOfRange(format!("vertex {} repeated", vertices[i])));
            }
            let v = lambda.powi(d as i32);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}

#[derive(Debug, Clone)]
pub struct Factorization {
    pub points: Vec<HPoint>,
    /// All eigenvalues, descending.
    pub spectrum: Vec<f64>,
}

/// Factors `M` as the Minkowski Gram matrix of hyperboloid points.
///
/// The positive mode gives the time coordinate, each clearly negative mode a
/// spatial one (most negative first); modes with `|μ| ≤ 1e-8·n` are dropped.
pub fn lorentz_factorize(m: &DMatrix<f64>) -> Result<Factorization> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return Err(Error::Empty("Gram matrix must be square and nonempty".into()));
    }
    for i in 0..n {
        if (m[(i, i)] - 1.0).abs() > tolerance::STRUCTURAL {
            return Err(Error::OutOfRange(format!("diagonal entry {i} is {}", m[(i, i)])));
        }
        for j in 0..i {
            if m[(i, j)] != m[(j, i)] {
                return Err(Error::OutOfRange("Gram matrix is not symmetric".into()));
            }
        }
    }
    let tol = tolerance::SPECTRAL_PER_ROW * n as f64;
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let spectrum: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let positive = spectrum.iter().filter(|&&mu| mu > tol).count();
    if positive != 1 {
        return Err(Error::NotRealizable { positive });
    }
    let top = order[0];
    let mut v1 = eig.eigenvectors.column(top).into_owned();
    if v1.sum() < 0.0 {
        v1.neg_mut();
    }
    if v1.iter().any(|&c| c <= 0.0) {
        return Err(Error::Construction(
            "top eigenvector is not sign-constant".into(),
        ));
    }
    let spatial: Vec<usize> = order
        .iter()
        .rev()
        .copied()
        .filter(|&i| eig.eigenvalues[i] < -tol)
        .collect();
    let dim = spatial.len();
    let mu1 = spectrum[0].sqrt();
    let scales: Vec<f64> = spatial.iter().map(|&i| (-eig.eigenvalues[i]).sqrt()).collect();
    let mut points = Vec::with_capacity(n);
    for x in 0..n {
        let mut c = DVector::zeros(dim + 1);
        c[0] = mu1 * v1[x];
        for (k, &i) in spatial.iter().enumerate() {
            c[k + 1] = scales[k] * eig.eigenvectors[(x, i)];
        }
        if dim == 0 {
            // A single vertex: the time coordinate alone is 1.
            c = DVector::from_vec(vec![1.0, 0.0]);
        }
        points.push(c);
    }
    if dim > 0 && dim + 1 == n {
        refine(&mut points, m);
    }
    let points = points
        .into_iter()
        .map(HPoint::from_dvector)
        .collect::<Result<Vec<_>>>()?;
    Ok(Factorization { points, spectrum })
}

/// Newton steps on `PᵀJP = M` for square `P`. The eigenvector error of a
/// dense symmetric solver is amplified by the largest eigenvalue; solving
/// `PᵀJΔ + ΔᵀJP = R` with `Δ = ½ J P⁻ᵀ R` removes it to the rounding level
/// of the products themselves.
fn refine(points: &mut [DVector<f64>], m: &DMatrix<f64>) {
    const STEPS: usize = 2;
    for _ in 0..STEPS {
        let p = columns(points.iter());
        let r = m - p.transpose() * j_times(&p);
        let Some(y) = p.transpose().lu().solve(&(r * 0.5)) else {
            return;
        };
        let delta = j_times(&y);
        for (k, pt) in points.iter_mut().enumerate() {
            *pt += delta.column(k);
        }
    }
}

/// Largest `|B(p_x, p_y) - M[x][y]| / M[x][y]`.
fn max_rel_residual(points: &[HPoint], m: &DMatrix<f64>) -> f64 {
    let p = columns(points.iter().map(|p| p.coords()));
    let mut jp = p.clone();
    for mut r in jp.row_iter_mut().skip(1) {
        r.neg_mut();
    }
    let g = p.transpose() * jp;
    g.iter()
        .zip(m.iter())
        .map(|(a, b)| (a - b).abs() / b.abs())
        .fold(0.0, f64::max)
}

/// Embeds the radius ball of the Cayley tree, recentered so `Ψ(e) = o`.
pub fn embed_tree_ball(radius: usize, lambda: f64) -> Result<EmbeddingResult> {
    if radius == 0 {
        return Err(Error::OutOfRange("embedding radius must be at least 1".into()));
    }
    embed_vertices(ball(radius), lambda, radius)
}

fn embed_vertices(vertices: Vec<Word>, lambda: f64, radius: usize) -> Result<EmbeddingResult> {
    let m = gram_matrix(&vertices, lambda)?;
    let Factorization { points, spectrum } = lorentz_factorize(&m)?;
    let dim = points[0].dim();
    let center = transvection(&points[0], &HPoint::origin(dim))?;
    let mut points = points
        .iter()
        .map(|p| HPoint::from_dvector(center.apply_vector(p.coords())))
        .collect::<Result<Vec<_>>>()?;
    // The transvection is exact up to rounding; pin the basepoint.
    points[0] = HPoint::origin(dim);
    let max_rel_residual = max_rel_residual(&points, &m);
    let index = vertices.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    Ok(EmbeddingResult {
        lambda,
        radius,
        ambient_dim: dim,
        max_rel_residual,
        vertices,
        points,
        gram_spectrum: spectrum,
        index,
    })
}

/// Indices of a maximal subset of `g`'s rows with nondegenerate principal
/// minor, by symmetric pivoting on the largest remaining `|Schur diagonal|`.
fn pivoted_frame(g: &DMatrix<f64>) -> Vec<usize> {
    let n = g.nrows();
    let mut a = g.clone();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut chosen = Vec::new();
    let scale = g.amax().max(1.0);
    while !remaining.is_empty() {
        let (pos, &piv) = remaining
            .iter()
            .enumerate()
            .max_by(|(_, &x), (_, &y)| a[(x, x)].abs().total_cmp(&a[(y, y)].abs()))
            .expect("nonempty");
        let d = a[(piv, piv)];
        if d.abs() <= tolerance::PIVOT * scale {
            break;
        }
        remaining.swap_remove(pos);
        chosen.push(piv);
        let col: Vec<f64> = remaining.iter().map(|&i| a[(i, piv)]).collect();
        for (ii, &i) in remaining.iter().enumerate() {
            for (jj, &j) in remaining.iter().enumerate() {
                a[(i, j)] -= col[ii] * col[jj] / d;
            }
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Columns of `J * x`.
fn j_times(x: &DMatrix<f64>) -> DMatrix<f64> {
    let mut y = x.clone();
    for mut r in y.row_iter_mut().skip(1) {
        r.neg_mut();
    }
    y
}

/// A `(-B)`-orthonormal basis of the B-orthogonal complement of the columns
/// of `s`, whose Gram matrix is `g`.
fn complement_basis(s: &DMatrix<f64>, g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = s.nrows();
    let k = s.ncols();
    let js = j_times(s);
    let ginv_st_j = g
        .clone()
        .lu()
        .solve(&js.transpose())
        .ok_or_else(|| Error::DegenerateSpan("frame Gram matrix is singular".into()))?;
    let mut r = DMatrix::identity(n, n) - s * ginv_st_j;
    let mut basis = DMatrix::zeros(n, n - k);
    for step in 0..n - k {
        let jr = j_times(&r);
        let (best, norm) = (0..n)
            .map(|c| (c, -r.column(c).dot(&jr.column(c))))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("n > 0");
        if !(norm > tolerance::PIVOT) {
            return Err(Error::DegenerateSpan(format!(
                "orthogonal complement has no spacelike direction at step {step}"
            )));
        }
        let e = r.column(best) / norm.sqrt();
        let ej = j_times(&DMatrix::from_column_slice(n, 1, e.as_slice()));
        let coeffs = ej.transpose() * &r;
        r += &e * coeffs;
        basis.set_column(step, &e);
    }
    Ok(basis)
}

/// Extends a tree map acting on the `domain_radius` ball to a Lorentz matrix
/// carrying `Ψ(x)` to `Ψ(m(x))` for every domain vertex.
///
/// Only the action on the span of the embedded domain is determined; the
/// complement is matched by an arbitrary Lorentz-orthonormal completion.
pub fn extend_isometry(e: &EmbeddingResult, m: &TreeMap, domain_radius: usize) -> Result<Isometry> {
    extend_isometry_with(e, |w| apply(m, w), domain_radius)
}

/// [`extend_isometry`] for an arbitrary vertex map.
pub fn extend_isometry_with<F>(e: &EmbeddingResult, m: F, domain_radius: usize) -> Result<Isometry>
where
    F: Fn(&Word) -> Result<Word>,
{
    let domain = ball(domain_radius);
    let mut src = Vec::with_capacity(domain.len());
    let mut dst = Vec::with_capacity(domain.len());
    for w in &domain {
        let i = e
            .index_of(w)
            .ok_or_else(|| Error::OutsideEmbedding(w.to_string()))?;
        let image = m(w)?;
        let j = e
            .index_of(&image)
            .ok_or_else(|| Error::OutsideEmbedding(format!("{w} -> {image}")))?;
        src.push(i);
        dst.push(j);
    }
    let s_all = columns(src.iter().map(|&i| e.points[i].coords()));
    let g_all = s_all.transpose() * j_times(&s_all);
    let frame = pivoted_frame(&g_all);
    let s = columns(frame.iter().map(|&f| e.points[src[f]].coords()));
    let t = columns(frame.iter().map(|&f| e.points[dst[f]].coords()));
    let gs = s.transpose() * j_times(&s);
    let gt = t.transpose() * j_times(&t);
    let gram_gap = (&gs - &gt).amax() / gs.amax();
    if gram_gap > tolerance::EXTENSION {
        return Err(Error::ExtensionResidual {
            residual: gram_gap,
            tolerance: tolerance::EXTENSION,
        });
    }
    let ginv_st_j = gs
        .clone()
        .lu()
        .solve(&j_times(&s).transpose())
        .ok_or_else(|| Error::DegenerateSpan("frame Gram matrix is singular".into()))?;
    let ec = complement_basis(&s, &gs)?;
    let fc = complement_basis(&t, &gt)?;
    let l = &t * ginv_st_j - &fc * j_times(&ec).transpose();

    let mut residual: f64 = 0.0;
    for (&i, &j) in src.iter().zip(&dst) {
        let target = e.points[j].coords();
        let r = (&l * e.points[i].coords() - target).amax() / target.amax().max(1.0);
        residual = residual.max(r);
    }
    if residual > tolerance::EXTENSION {
        return Err(Error::ExtensionResidual {
            residual,
            tolerance: tolerance::EXTENSION,
        });
    }
    Isometry::with_tolerance(l, tolerance::EXTENSION)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoboundednessEstimate {
    pub sigma_hat: f64,
    pub pairs: usize,
    pub points_per_segment: usize,
}

/// Points sampled on each segment, endpoints included.
pub const SEGMENT_POINTS: usize = 11;

/// Largest distance from a sampled point on a geodesic segment between two
/// random embedded vertices to the nearest embedded vertex.
pub fn embedding_coboundedness(e: &EmbeddingResult, samples: usize, seed: u64) -> Result<CoboundednessEstimate> {
    point_set_coboundedness(&e.points, samples, SEGMENT_POINTS, seed)
}

pub(crate) fn point_set_coboundedness(
    points: &[HPoint],
    samples: usize,
    per_segment: usize,
    seed: u64,
) -> Result<CoboundednessEstimate> {
    if per_segment < 2 {
        return Err(Error::OutOfRange("need at least 2 points per segment".into()));
    }
    if points.is_empty() {
        return Err(Error::Empty("no points".into()));
    }
    let n = points.len();
    if n == 1 {
        return Ok(CoboundednessEstimate {
            sigma_hat: 0.0,
            pairs: 0,
            points_per_segment: per_segment,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jp = j_times(&columns(points.iter().map(|p| p.coords()))).transpose();
    let mut sigma: f64 = 0.0;
    for _ in 0..samples {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let (p, q) = (&points[i], &points[j]);
        let d = acosh_clamped(form(p.coords(), q.coords()), p.coords().norm() * q.coords().norm())?;
        for k in 0..per_segment {
            let t = d * k as f64 / (per_segment - 1) as f64;
            let x = if d == 0.0 {
                p.coords().clone()
            } else {
                (p.coords() * (d - t).sinh() + q.coords() * t.sinh()) / d.sinh()
            };
            let b = (&jp * &x).min();
            sigma = sigma.max(acosh_clamped(b, x.norm())?);
        }
    }
    Ok(CoboundednessEstimate {
        sigma_hat: sigma,
        pairs: samples,
        points_per_segment: per_segment,
    })
}

/// Coordinates of a point set in the smallest Minkowski subspace containing it.
#[derive(Debug, Clone, Serialize)]
pub struct SubspaceRestriction {
    /// Rank of the span, one more than the dimension of the hyperbolic subspace.
    pub rank: usize,
    /// Dimension of the ambient hyperbolic space.
    pub ambient_dim: usize,
    /// True when the span is the whole ambient Minkowski space.
    pub nonplanar: bool,
    /// `rank × (ambient_dim + 1)` matrix taking ambient to restricted coordinates.
    #[serde(skip)]
    pub projector: DMatrix<f64>,
    #[serde(skip)]
    pub restricted: Vec<DVector<f64>>,
}

/// Restricts timelike or lightlike vectors to a Minkowski subspace of
/// signature `(1, rank - 1)` spanned by them, isometrically.
pub fn minimal_subspace_restrict(vectors: &[DVector<f64>]) -> Result<SubspaceRestriction> {
    let first = vectors
        .first()
        .ok_or_else(|| Error::Empty("no points to restrict".into()))?;
    let n = first.len();
    if let Some(v) = vectors.iter().find(|v| v.len() != n) {
        return Err(Error::DimensionMismatch { left: n, right: v.len() });
    }
    let x = columns(vectors.iter());
    let svd = x.clone().svd(true, false);
    let u = svd.u.expect("requested");
    let smax = svd.singular_values.max();
    let mut idx: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > tolerance::RANK * smax)
        .collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let rank = idx.len();
    if rank < 2 {
        return Err(Error::DegenerateSpan(format!(
            "span has rank {rank}; no two-point subspace"
        )));
    }
    let ur = columns(idx.iter().map(|&i| u.column(i).into_owned()).collect::<Vec<_>>().iter());
    let h = ur.transpose() * j_times(&ur);
    let eig = SymmetricEigen::new(h);
    let hmax = eig.eigenvalues.amax();
    let mut order: Vec<usize> = (0..rank).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let pos = order
        .iter()
        .filter(|&&i| eig.eigenvalues[i] > tolerance::RANK * hmax)
        .count();
    let neg = order
        .iter()
        .filter(|&&i| eig.eigenvalues[i] < -tolerance::RANK * hmax)
        .count();
    if pos != 1 || neg != rank - 1 {
        return Err(Error::DegenerateSpan(format!(
            "span has signature ({pos}, {neg}) in rank {rank}"
        )));
    }
    // W is B-orthonormal: B(w_0, w_0) = 1, B(w_i, w_i) = -1.
    let mut w = DMatrix::zeros(n, rank);
    for (k, &i) in order.iter().enumerate() {
        let col = &ur * eig.eigenvectors.column(i) / eig.eigenvalues[i].abs().sqrt();
        w.set_column(k, &col);
    }
    if form(&w.column(0).into_owned(), first) < 0.0 {
        let c = -w.column(0);
        w.set_column(0, &c);
    }
    // Coordinates of x in W are (B(x, w_0), -B(x, w_1), ...).
    let mut projector = j_times(&w).transpose();
    for mut r in projector.row_iter_mut().skip(1) {
        r.neg_mut();
    }
    let restricted = vectors.iter().map(|v| &projector * v).collect();
    Ok(SubspaceRestriction {
        rank,
        ambient_dim: n - 1,
        nonplanar: rank == n,
        projector,
        restricted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::sphere;
    use crate::minkowski::{dist, mink_inner, MinkowskiVector};

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn gram_matrix_examples() {
        let m = gram_matrix(&[w("1"), w("a")], 2.0).unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[1., 2., 2., 1.]));
        let m = gram_matrix(&[w("A"), w("1"), w("a")], 2.0).unwrap();
        assert_eq!(m, DMatrix::from_row_slice(3, 3, &[1., 2., 4., 2., 1., 2., 4., 2., 1.]));
        assert!(gram_matrix(&[w("1")], 1.0).is_err());
        assert!(gram_matrix(&[w("a"), w("a")], 2.0).is_err());
    }

    #[test]
    fn two_by_two_spectrum_is_closed_form() {
        for lambda in [1.5, 2.0, 3.0] {
            let f = lorentz_factorize(&gram_matrix(&[w("1"), w("b")], lambda).unwrap()).unwrap();
            assert!((f.spectrum[0] - (1.0 + lambda)).abs() < 1e-12);
            assert!((f.spectrum[1] - (1.0 - lambda)).abs() < 1e-12);
            let d = dist(&f.points[0], &f.points[1]).unwrap();
            assert!((d - lambda.acosh()).abs() < 1e-12);
        }
    }

    #[test]
    fn one_by_one_is_the_origin() {
        let f = lorentz_factorize(&DMatrix::identity(1, 1)).unwrap();
        assert_eq!(f.points, vec![HPoint::origin(1)]);
    }

    #[test]
    fn non_realizable_matrix_is_rejected() {
        // Two positive eigenvalues: 1 ± 0.5 and 1.
        let m = DMatrix::from_row_slice(2, 2, &[1., 0.5, 0.5, 1.]);
        assert!(matches!(lorentz_factorize(&m), Err(Error::NotRealizable { positive: 2 })));
    }

    #[test]
    fn radius_one_embedding_distances() {
        let e = embed_tree_ball(1, 2.0).unwrap();
        assert_eq!(e.len(), 5);
        assert_eq!(e.point(&Word::identity()).unwrap(), &HPoint::origin(4));
        for (i, p) in e.points.iter().enumerate() {
            for (j, q) in e.points.iter().enumerate() {
                let c = mink_inner(p.vector(), q.vector()).unwrap();
                let expect = 2f64.powi(tree_dist(&e.vertices[i], &e.vertices[j]) as i32);
                assert!((c - expect).abs() < 1e-12 * expect);
            }
        }
    }

    #[test]
    fn embedding_law_and_spectrum() {
        for lambda in [1.5, 2.0, 3.0] {
            let e = embed_tree_ball(3, lambda).unwrap();
            assert!(e.max_rel_residual <= 1e-8, "{lambda}: {}", e.max_rel_residual);
            let tol = 1e-8 * e.len() as f64;
            assert_eq!(e.gram_spectrum.iter().filter(|&&m| m > tol).count(), 1);
            assert_eq!(e.ambient_dim, e.len() - 1);
        }
    }

    #[test]
    fn json_shape() {
        let e = embed_tree_ball(1, 2.0).unwrap();
        let v: serde_json::Value = serde_json::from_str(&e.to_json().unwrap()).unwrap();
        assert_eq!(v["vertices"][0], "1");
        assert_eq!(v["points"].as_array().unwrap().len(), 5);
        assert_eq!(v["points"][0].as_array().unwrap().len(), 5);
        assert!(v["gram_spectrum"].is_array());
    }

    #[test]
    fn extension_of_identity_is_identity() {
        let e = embed_tree_ball(2, 2.0).unwrap();
        let l = extend_isometry(&e, &TreeMap::Composition(vec![]), 2).unwrap();
        assert!((l.matrix() - DMatrix::identity(e.ambient_dim + 1, e.ambient_dim + 1)).amax() < 1e-10);
    }

    #[test]
    fn extension_of_left_translation() {
        let e = embed_tree_ball(4, 2.0).unwrap();
        let l = extend_isometry(&e, &TreeMap::translation(w("a")), 3).unwrap();
        let img = l.apply(e.point(&Word::identity()).unwrap()).unwrap();
        assert!((img.coords() - e.point(&w("a")).unwrap().coords()).amax() < 1e-8);
        for v in sphere(3) {
            let img = l.apply(e.point(&v).unwrap()).unwrap();
            let target = e.point(&crate::free_group::word_concat(&w("a"), &v).unwrap()).unwrap();
            assert!((img.coords() - target.coords()).amax() < 1e-6);
        }
    }

    #[test]
    fn extension_is_span_consistent_under_composition() {
        let e = embed_tree_ball(4, 2.0).unwrap();
        let la = extend_isometry(&e, &TreeMap::translation(w("a")), 3).unwrap();
        let lb = extend_isometry(&e, &TreeMap::translation(w("b")), 3).unwrap();
        let lab = extend_isometry(&e, &TreeMap::translation(w("ab")), 2).unwrap();
        let prod = la.compose(&lb).unwrap();
        for v in ball(2) {
            let p = e.point(&v).unwrap();
            let d = (prod.apply(p).unwrap().coords() - lab.apply(p).unwrap().coords()).amax();
            assert!(d < 1e-6);
        }
    }

    #[test]
    fn extension_of_gamma_conjugate() {
        let e = embed_tree_ball(3, 2.0).unwrap();
        let l = extend_isometry(&e, &TreeMap::gamma_conjugate(w("b")), 2).unwrap();
        assert!(crate::minkowski::lorentz_defect(l.matrix()).unwrap() < 1e-6);
    }

    #[test]
    fn extension_needs_the_image_inside() {
        let e = embed_tree_ball(2, 2.0).unwrap();
        assert!(matches!(
            extend_isometry(&e, &TreeMap::translation(w("a")), 2),
            Err(Error::OutsideEmbedding(_))
        ));
    }

    #[test]
    fn extension_rejects_a_non_isometry() {
        let e = embed_tree_ball(2, 2.0).unwrap();
        // Swaps a and b but fixes everything else: not distance preserving.
        let swap = |v: &Word| -> Result<Word> {
            Ok(match v.to_string().as_str() {
                "a" => w("b"),
                "b" => w("a"),
                _ => v.clone(),
            })
        };
        assert!(matches!(
            extend_isometry_with(&e, swap, 2),
            Err(Error::ExtensionResidual { .. })
        ));
    }

    #[test]
    fn coboundedness_two_vertices() {
        let e = embed_vertices(vec![w("1"), w("a")], 2.0, 1).unwrap();
        let c = embedding_coboundedness(&e, 20, 0).unwrap();
        assert!(c.sigma_hat >= 0.0);
        assert!(c.sigma_hat <= 2f64.acosh() / 2.0 + 1e-6);
        assert!(c.sigma_hat > 2f64.acosh() / 2.0 - 1e-6);
    }

    #[test]
    fn restriction_of_planar_points() {
        let pts: Vec<DVector<f64>> = [(0.3, 0.1), (1.0, -0.5), (-0.7, 0.2)]
            .iter()
            .map(|&(a, b): &(f64, f64)| {
                let t = (1.0 + a * a + b * b).sqrt();
                DVector::from_vec(vec![t, a, b, 0.0, 0.0])
            })
            .collect();
        let r = minimal_subspace_restrict(&pts).unwrap();
        assert_eq!(r.rank, 3);
        assert!(!r.nonplanar);
        for (p, q) in pts.iter().zip(&r.restricted) {
            for (p2, q2) in pts.iter().zip(&r.restricted) {
                let b = form(p, p2);
                let c = mink_inner(
                    &MinkowskiVector::from_dvector(q.clone()).unwrap(),
                    &MinkowskiVector::from_dvector(q2.clone()).unwrap(),
                )
                .unwrap();
                assert!((b - c).abs() < 1e-10);
            }
            assert!(q[0] > 0.0);
        }
    }

    #[test]
    fn restriction_of_tree_embedding_is_full_rank() {
        let e = embed_tree_ball(3, 2.0).unwrap();
        let vs: Vec<_> = e.points.iter().map(|p| p.coords().clone()).collect();
        let r = minimal_subspace_restrict(&vs).unwrap();
        assert_eq!(r.rank, e.ambient_dim + 1);
        assert!(r.nonplanar);
    }

    #[test]
    fn restriction_error_branches() {
        assert!(minimal_subspace_restrict(&[]).is_err());
        let o = HPoint::origin(2).coords().clone();
        assert!(matches!(
            minimal_subspace_restrict(&[o.clone(), o * 2.0]),
            Err(Error::DegenerateSpan(_))
        ));
        // Two spacelike vectors span a negative definite plane.
        let s = vec![
            DVector::from_vec(vec![0.0, 1.0, 0.0]),
            DVector::from_vec(vec![0.0, 0.0, 1.0]),
        ];
        assert!(matches!(minimal_subspace_restrict(&s), Err(Error::DegenerateSpan(_))));
    }
}
