//! Self-contained audits of the tree automorphism γ and of the boundary
//! calculus, packaged for the CLI and for foreign callers.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boundary::{
    busemann, busemann_limit_oracle, gromov_limit_oracle, gromov_product, radial_audit, IdealPoint,
};
use crate::error::{Error, Result};
use crate::free_group::{
    ball, conjugate_intersection_probe, edge_audit, gamma, homomorphy_probe, word_concat,
    IntersectionProbe, EdgeAudit, Letter, TreeMap, Word,
};
use crate::minkowski::{HPoint, Isometry};
use crate::tolerance;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomomorphyRow {
    pub x: Word,
    /// First `y` (length at most 1) with `γ(xy) ≠ γ(x)γ(y)`.
    pub witness_y: Option<Word>,
    /// `b` when `x` starts with a power of `a`, else `a`.
    pub branch_y: Word,
    pub branch_fails: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GammaReport {
    pub edge_radius: usize,
    pub edges: EdgeAudit,
    pub involution_radius: usize,
    pub involution_vertices: usize,
    pub involution_ok: bool,
    pub homomorphy_radius: usize,
    pub homomorphy: Vec<HomomorphyRow>,
    pub homomorphy_ok: bool,
    pub intersection: IntersectionProbe,
    pub pass: bool,
}

/// Edges, involution, homomorphy witnesses and the conjugate intersection,
/// all by exact word arithmetic.
pub fn gamma_audit(
    edge_radius: usize,
    involution_radius: usize,
    homomorphy_radius: usize,
    x_radius: usize,
    test_radius: usize,
) -> Result<GammaReport> {
    let edges = edge_audit(&TreeMap::Gamma, edge_radius)?;
    let vs = ball(involution_radius);
    let involution_ok = vs.iter().all(|v| gamma(&gamma(v)) == *v);

    let mut homomorphy = Vec::new();
    for x in ball(homomorphy_radius).into_iter().skip(1) {
        let probe = homomorphy_probe(&x, 1)?;
        let branch_y = if x.letters()[0].is_a_power() {
            Word::letter(Letter::B)
        } else {
            Word::letter(Letter::A)
        };
        let branch_fails = gamma(&word_concat(&x, &branch_y)?) != word_concat(&gamma(&x), &gamma(&branch_y))?;
        homomorphy.push(HomomorphyRow {
            x,
            witness_y: probe.witness_y,
            branch_y,
            branch_fails,
        });
    }
    let homomorphy_ok = homomorphy.iter().all(|r| r.witness_y.is_some() && r.branch_fails);
    let intersection = conjugate_intersection_probe(x_radius, test_radius)?;
    let pass = edges.ok && involution_ok && homomorphy_ok && intersection.survivors.is_empty();
    Ok(GammaReport {
        edge_radius,
        edges,
        involution_radius,
        involution_vertices: vs.len(),
        involution_ok,
        homomorphy_radius,
        homomorphy,
        homomorphy_ok,
        intersection,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryOracleReport {
    pub instances: usize,
    pub dim: usize,
    pub t: f64,
    pub seed: u64,
    pub max_busemann_gap: f64,
    pub max_gromov_gap: f64,
    pub max_cocycle_defect: f64,
    pub min_gromov_product: f64,
    pub pass: bool,
}

fn random_direction(rng: &mut ChaCha8Rng, dim: usize) -> Result<IdealPoint> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 > 1e-4 && n2 <= 1.0 {
            return IdealPoint::from_direction(&v);
        }
    }
}

fn random_point(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> Result<HPoint> {
    let xi = random_direction(rng, dim)?;
    Ok(HPoint::along_ray(&xi, rng.random_range(0.0..radius)))
}

/// Closed forms against limit oracles at parameter `t`, on random ideal
/// points and on points within distance 3 of the origin.
pub fn boundary_oracle_audit(instances: usize, dim: usize, t: f64, seed: u64) -> Result<BoundaryOracleReport> {
    if instances == 0 || dim < 2 {
        return Err(Error::OutOfRange(format!(
            "need instances >= 1 and dim >= 2, got {instances} and {dim}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = BoundaryOracleReport {
        instances,
        dim,
        t,
        seed,
        max_busemann_gap: 0.0,
        max_gromov_gap: 0.0,
        max_cocycle_defect: 0.0,
        min_gromov_product: f64::INFINITY,
        pass: false,
    };
    for _ in 0..instances {
        let xi = random_direction(&mut rng, dim)?;
        let x = random_point(&mut rng, dim, 3.0)?;
        let y = random_point(&mut rng, dim, 3.0)?;
        let z = random_point(&mut rng, dim, 3.0)?;
        let b = busemann(&xi, &y, &z)?;
        r.max_busemann_gap = r.max_busemann_gap.max((b - busemann_limit_oracle(&xi, &y, &z, t)?).abs());
        let g = gromov_product(&y, &xi, &z)?;
        r.max_gromov_gap = r.max_gromov_gap.max((g - gromov_limit_oracle(&y, &xi, &z, t)?).abs());
        r.min_gromov_product = r.min_gromov_product.min(g);
        let cocycle = busemann(&xi, &x, &z)? - busemann(&xi, &x, &y)? - b;
        r.max_cocycle_defect = r.max_cocycle_defect.max(cocycle.abs());
    }
    r.pass = r.max_busemann_gap <= tolerance::LIMIT
        && r.max_gromov_gap <= tolerance::LIMIT
        && r.max_cocycle_defect <= tolerance::STRUCTURAL
        && r.min_gromov_product >= -tolerance::STRUCTURAL;
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialCriterionReport {
    pub rays: usize,
    pub ray_points: usize,
    pub ray_sup_abs_product: f64,
    pub parabolic_steps: usize,
    pub parabolic_products: Vec<f64>,
    pub parabolic_last: f64,
    pub parabolic_half: f64,
    pub pass: bool,
}

/// Unipotent isometry of ℍ² fixing the ideal point `(1, 1, 0)`.
pub fn parabolic_h2() -> Isometry {
    let n = DMatrix::from_row_slice(3, 3, &[0., 0., 1., 0., 0., 1., 1., -1., 0.]);
    Isometry::from_matrix_unchecked(DMatrix::identity(3, 3) + &n + &n * &n * 0.5)
}

const RAYS: usize = 8;
// Points at t = 0.5, 1.0, ..., 8.0. B(x_t, ξ) = e^{-t} is obtained by
// cancellation, so the relative error grows like e^{2t}; t ≤ 8 keeps it
// far below the threshold.
const RAY_POINTS: usize = 16;
const RAY_STEP: f64 = 0.5;

/// Products `⟨o|ξ⟩_{x_n}` along geodesic rays (bounded, in fact zero) and
/// along a parabolic orbit `p^n(o)` (growing like `2 ln n`).
pub fn radial_criterion_audit(steps: usize) -> Result<RadialCriterionReport> {
    if steps < 2 {
        return Err(Error::OutOfRange(format!("need at least 2 parabolic steps, got {steps}")));
    }
    let o = HPoint::origin(2);
    let mut sup: f64 = 0.0;
    for k in 0..RAYS {
        let a = std::f64::consts::TAU * k as f64 / RAYS as f64;
        let xi = IdealPoint::from_direction(&[a.cos(), a.sin()])?;
        let ray: Vec<HPoint> = (1..=RAY_POINTS)
            .map(|n| HPoint::along_ray(&xi, RAY_STEP * n as f64))
            .collect();
        let rep = radial_audit(&ray, &xi, &o)?;
        sup = rep.products.iter().fold(sup, |m, v| m.max(v.abs()));
    }

    let p = parabolic_h2();
    let xi = IdealPoint::from_direction(&[1.0, 0.0])?;
    let mut x = o.clone();
    let mut orbit = Vec::with_capacity(steps);
    for _ in 0..steps {
        x = p.apply(&x)?;
        orbit.push(x.clone());
    }
    let products = radial_audit(&orbit, &xi, &o)?.products;
    let last = products[steps - 1];
    let half = products[steps / 2 - 1];
    Ok(RadialCriterionReport {
        rays: RAYS,
        ray_points: RAY_POINTS,
        ray_sup_abs_product: sup,
        parabolic_steps: steps,
        parabolic_last: last,
        parabolic_half: half,
        pass: sup <= tolerance::LIMIT && last > 3.0 && last > half + 0.1,
        parabolic_products: products,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_audit_small() {
        let r = gamma_audit(3, 4, 2, 2, 2).unwrap();
        assert!(r.pass);
        assert_eq!(r.edges.edges_checked, 52);
        assert_eq!(r.homomorphy.len(), 16);
        assert_eq!(r.intersection.candidates, 16);
    }

    #[test]
    fn boundary_audit_is_seeded() {
        let a = boundary_oracle_audit(20, 3, 30.0, 5).unwrap();
        let b = boundary_oracle_audit(20, 3, 30.0, 5).unwrap();
        assert_eq!(a, b);
        assert!(a.pass);
        assert!(boundary_oracle_audit(0, 3, 30.0, 5).is_err());
    }

    #[test]
    fn parabolic_fixes_its_point() {
        let p = parabolic_h2();
        let xi = IdealPoint::from_direction(&[1.0, 0.0]).unwrap();
        let moved = p.apply_ideal(&xi).unwrap();
        assert!(moved.chordal_distance(&xi) < 1e-12);
    }

    #[test]
    fn radial_audit_passes() {
        let r = radial_criterion_audit(100).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.parabolic_products.len(), 100);
    }
}
