//! Finitely generated groups of Lorentz matrices: orbits, limit-set samples
//! and the audits run on them, plus the Schottky and `ℍ⁴` constructions.
//!
//! Freeness is never assumed. Words are reduced in the free group on the
//! generator names and coinciding orbit points are reported as collisions.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::boundary::{dedup_mask, IdealPoint, LimitSetSample, SampleMeta};
use crate::embedding::{point_set_coboundedness, CoboundednessEstimate};
use crate::error::{Error, Result};
use crate::minkowski::{boost, dist, form, rotation_fixing_subspace, HPoint, Isometry};
use crate::tolerance;

/// A named generator. `factors` multiply to `isometry` and are kept so that
/// boundary iteration can apply long conjugates one well-conditioned matrix
/// at a time.
#[derive(Debug, Clone)]
pub struct Generator {
    pub name: String,
    pub isometry: Isometry,
    pub factors: Vec<Isometry>,
}

impl Generator {
    pub fn new(name: impl Into<String>, isometry: Isometry) -> Self {
        Self {
            name: name.into(),
            factors: vec![isometry.clone()],
            isometry,
        }
    }

    /// The generator `factors[0] · factors[1] · ⋯`.
    pub fn from_factors(name: impl Into<String>, factors: Vec<Isometry>) -> Result<Self> {
        let first = factors
            .first()
            .ok_or_else(|| Error::Empty("generator needs at least one factor".into()))?;
        let mut m = first.clone();
        for f in &factors[1..] {
            m = m.compose(f)?;
        }
        let isometry = Isometry::new(m.matrix().clone())?;
        Ok(Self {
            name: name.into(),
            isometry,
            factors,
        })
    }
}

/// A reduced word; letter `2i` is generator `i`, letter `2i + 1` its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GroupWord {
    pub letters: Vec<usize>,
}

#[allow(clippy::len_without_is_empty)]
impl GroupWord {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct GroupSpec {
    pub label: String,
    pub dimension: usize,
    pub generators: Vec<Generator>,
    pub notes: String,
    letters: Vec<Isometry>,
    tokens: Vec<String>,
    separator: &'static str,
}

impl GroupSpec {
    pub fn new(
        label: impl Into<String>,
        dimension: usize,
        generators: Vec<Generator>,
        notes: impl Into<String>,
    ) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if g.isometry.dim() != dimension {
                return Err(Error::DimensionMismatch {
                    left: dimension,
                    right: g.isometry.dim(),
                });
            }
            if g.name.is_empty() || g.name == "1" || g.name.contains(['.', '\'']) {
                return Err(Error::Construction(format!("bad generator name {:?}", g.name)));
            }
            if generators[..i].iter().any(|h| h.name == g.name) {
                return Err(Error::Construction(format!("duplicate generator {}", g.name)));
            }
        }
        let simple = generators
            .iter()
            .all(|g| g.name.len() == 1 && g.name.chars().all(|c| c.is_ascii_lowercase()));
        let mut letters = Vec::with_capacity(2 * generators.len());
        let mut tokens = Vec::with_capacity(2 * generators.len());
        for g in &generators {
            letters.push(g.isometry.clone());
            letters.push(g.isometry.inverse());
            tokens.push(g.name.clone());
            tokens.push(if simple {
                g.name.to_ascii_uppercase()
            } else {
                format!("{}'", g.name)
            });
        }
        Ok(Self {
            label: label.into(),
            dimension,
            generators,
            notes: notes.into(),
            letters,
            tokens,
            separator: if simple { "" } else { "." },
        })
    }

    pub fn letter_count(&self) -> usize {
        self.letters.len()
    }

    pub fn letter_matrix(&self, l: usize) -> &Isometry {
        &self.letters[l]
    }

    /// Display form: `gHh`, or `c1.c-1'` when names are longer than a letter.
    pub fn word_name(&self, w: &GroupWord) -> String {
        if w.is_identity() {
            return "1".into();
        }
        w.letters
            .iter()
            .map(|&l| self.tokens[l].as_str())
            .collect::<Vec<_>>()
            .join(self.separator)
    }

    pub fn parse_word(&self, s: &str) -> Result<GroupWord> {
        if s == "1" || s.is_empty() {
            return Ok(GroupWord::identity());
        }
        let tokens: Vec<String> = if self.separator.is_empty() {
            s.chars().map(String::from).collect()
        } else {
            s.split('.').map(String::from).collect()
        };
        let mut letters = Vec::new();
        for t in tokens {
            let l = self
                .tokens
                .iter()
                .position(|x| *x == t)
                .ok_or_else(|| Error::WordParse(format!("unknown token {t:?}")))?;
            if letters.last() == Some(&(l ^ 1)) {
                letters.pop();
            } else {
                letters.push(l);
            }
        }
        Ok(GroupWord { letters })
    }

    pub fn word_matrix(&self, w: &GroupWord) -> Isometry {
        let n = self.dimension + 1;
        let mut m = DMatrix::identity(n, n);
        for &l in &w.letters {
            m *= self.letters[l].matrix();
        }
        Isometry::from_matrix_unchecked(m)
    }

    /// `w · v`, applying the last letter first.
    pub fn apply_word(&self, w: &GroupWord, v: &DVector<f64>) -> DVector<f64> {
        w.letters
            .iter()
            .rev()
            .fold(v.clone(), |acc, &l| self.letters[l].matrix() * acc)
    }

    pub fn generator(&self, name: &str) -> Option<&Generator> {
        self.generators.iter().find(|g| g.name == name)
    }

    /// Factors of a letter in application order (rightmost first).
    fn letter_factors(&self, l: usize) -> Vec<DMatrix<f64>> {
        let g = &self.generators[l / 2];
        if l.is_multiple_of(2) {
            g.factors.iter().rev().map(|f| f.matrix().clone()).collect()
        } else {
            // (F1 F2 ⋯ Fk)⁻¹ = Fk⁻¹ ⋯ F1⁻¹, applied F1⁻¹ first.
            g.factors.iter().map(|f| f.inverse().matrix().clone()).collect()
        }
    }
}

/// Visits reduced words of length exactly `len` in length-lexicographic order
/// together with `w · o`, computed by left extension `p(l·w) = M_l p(w)`.
fn shell_points(spec: &GroupSpec, len: usize) -> Vec<(GroupWord, DVector<f64>)> {
    let mut layer = vec![(GroupWord::identity(), HPoint::origin(spec.dimension).coords().clone())];
    for _ in 0..len {
        layer = extend_layer(spec, &layer);
    }
    layer
}

fn extend_layer(spec: &GroupSpec, layer: &[(GroupWord, DVector<f64>)]) -> Vec<(GroupWord, DVector<f64>)> {
    let mut next = Vec::with_capacity(layer.len() * spec.letter_count());
    for l in 0..spec.letter_count() {
        let m = spec.letters[l].matrix();
        for (w, p) in layer {
            if w.letters.first() == Some(&(l ^ 1)) {
                continue;
            }
            let mut letters = Vec::with_capacity(w.len() + 1);
            letters.push(l);
            letters.extend_from_slice(&w.letters);
            next.push((GroupWord { letters }, m * p));
        }
    }
    next
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitEntry {
    pub word: String,
    #[serde(skip)]
    pub letters: GroupWord,
    pub point: HPoint,
    pub dist_from_base: f64,
    /// Index of an earlier entry whose point coincides with this one.
    pub collision_with: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitSample {
    pub group_label: String,
    pub depth: usize,
    pub entries: Vec<OrbitEntry>,
}

impl OrbitSample {
    pub fn collisions(&self) -> usize {
        self.entries.iter().filter(|e| e.collision_with.is_some()).count()
    }

    pub fn points(&self) -> impl Iterator<Item = &HPoint> {
        self.entries.iter().map(|e| &e.point)
    }

    /// `word,c0,c1,...` with one row per entry.
    pub fn to_csv(&self) -> String {
        let dim = self.entries.first().map_or(0, |e| e.point.dim());
        let mut out = csv_header(dim);
        for e in &self.entries {
            csv_row(&mut out, &e.word, e.point.coords().iter());
        }
        out
    }
}

pub(crate) fn csv_header(dim: usize) -> String {
    let mut s = String::from("word");
    for i in 0..=dim {
        let _ = write!(s, ",c{i}");
    }
    s.push('\n');
    s
}

pub(crate) fn csv_row<'a>(out: &mut String, word: &str, coords: impl Iterator<Item = &'a f64>) {
    out.push_str(word);
    for c in coords {
        let _ = write!(out, ",{c}");
    }
    out.push('\n');
}

/// Every reduced word of length at most `max_len` with its orbit point.
pub fn enumerate_ball(spec: &GroupSpec, max_len: usize) -> Result<OrbitSample> {
    let o = HPoint::origin(spec.dimension);
    let mut layer = vec![(GroupWord::identity(), o.coords().clone())];
    let mut entries = Vec::new();
    for len in 0..=max_len {
        if len > 0 {
            layer = extend_layer(spec, &layer);
        }
        for (w, p) in &layer {
            let point = HPoint::from_dvector(p.clone())?;
            entries.push(OrbitEntry {
                word: spec.word_name(w),
                letters: w.clone(),
                dist_from_base: dist(&o, &point)?,
                point,
                collision_with: None,
            });
        }
    }
    flag_collisions(&mut entries);
    Ok(OrbitSample {
        group_label: spec.label.clone(),
        depth: max_len,
        entries,
    })
}

fn same_point(p: &DVector<f64>, q: &DVector<f64>) -> bool {
    let scale = p.amax().max(q.amax()).max(1.0);
    (p - q).amax() <= tolerance::COLLISION * scale
}

fn flag_collisions(entries: &mut [OrbitEntry]) {
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|&a, &b| {
        entries[a]
            .point
            .time()
            .total_cmp(&entries[b].point.time())
            .then(a.cmp(&b))
    });
    let mut first: Vec<Option<usize>> = vec![None; entries.len()];
    for pos in 0..order.len() {
        let i = order[pos];
        let ti = entries[i].point.time();
        let window = tolerance::COLLISION * ti.max(1.0);
        for &j in order[..pos].iter().rev() {
            if ti - entries[j].point.time() > window {
                break;
            }
            if same_point(entries[i].point.coords(), entries[j].point.coords()) {
                let (lo, hi) = (i.min(j), i.max(j));
                first[hi] = Some(first[hi].map_or(lo, |f| f.min(lo)));
            }
        }
    }
    for (e, f) in entries.iter_mut().zip(first) {
        e.collision_with = f;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscretenessReport {
    pub radius: f64,
    pub count: usize,
    /// Smallest pairwise distance among the counted points; `None` below two.
    pub min_gap: Option<f64>,
    pub collisions: usize,
}

/// Counts orbit points within `radius` of the base point.
pub fn discreteness_audit(sample: &OrbitSample, radius: f64) -> Result<DiscretenessReport> {
    if !(radius > 0.0) {
        return Err(Error::OutOfRange(format!("radius {radius} must be positive")));
    }
    let inside: Vec<&OrbitEntry> = sample
        .entries
        .iter()
        .filter(|e| e.dist_from_base <= radius)
        .collect();
    let mut min_gap: Option<f64> = None;
    for (i, a) in inside.iter().enumerate() {
        for b in &inside[..i] {
            let d = dist(&a.point, &b.point)?;
            min_gap = Some(min_gap.map_or(d, |m| m.min(d)));
        }
    }
    Ok(DiscretenessReport {
        radius,
        count: inside.len(),
        min_gap,
        collisions: inside.iter().filter(|e| e.collision_with.is_some()).count(),
    })
}

/// Translation length from the growth rate of `‖gⁿ o‖`, over 64 steps.
pub fn translation_length(g: &Isometry) -> f64 {
    const STEPS: usize = 64;
    let mut v = HPoint::origin(g.dim()).coords().clone();
    let mut log_scale = 0.0;
    let mut half = 0.0;
    for step in 1..=STEPS {
        v = g.matrix() * v;
        let s = v[0];
        v /= s;
        log_scale += s.ln();
        if step == STEPS / 2 {
            half = log_scale;
        }
    }
    ((log_scale - half) / (STEPS / 2) as f64).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMethod {
    /// Radially project the orbit shell `{w(o) : |w| = depth}` to the
    /// boundary, keeping points whose time coordinate exceeds
    /// `½ cosh(depth · τ_min)`.
    OrbitProjection,
    /// The attracting fixed point of every shell word, found by iterating
    /// the word on the boundary.
    AttractingFixedPoints,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleOptions {
    pub method: SampleMethod,
    /// Minimal translation length for the projection threshold; estimated
    /// from the generators when absent.
    pub translation_length: Option<f64>,
}

impl Default for SampleOptions {
    fn default() -> Self {
        Self {
            method: SampleMethod::OrbitProjection,
            translation_length: None,
        }
    }
}

/// Limit-set sample by orbit projection.
pub fn limit_set_sample(spec: &GroupSpec, depth: usize) -> Result<LimitSetSample> {
    limit_set_sample_with(spec, depth, SampleOptions::default())
}

pub fn limit_set_sample_with(spec: &GroupSpec, depth: usize, opts: SampleOptions) -> Result<LimitSetSample> {
    if depth == 0 {
        return Err(Error::OutOfRange("limit-set depth must be at least 1".into()));
    }
    let shell = shell_points(spec, depth);
    if shell.is_empty() {
        return Err(Error::Empty(format!("{} has an empty depth-{depth} shell", spec.label)));
    }
    let shell_size = shell.len();
    let mut points = Vec::with_capacity(shell_size);
    let mut words = Vec::with_capacity(shell_size);
    let mut rejected = 0;
    let mut threshold = None;
    match opts.method {
        SampleMethod::OrbitProjection => {
            let tau = opts.translation_length.unwrap_or_else(|| {
                spec.generators
                    .iter()
                    .map(|g| translation_length(&g.isometry))
                    .fold(f64::INFINITY, f64::min)
            });
            let t = 0.5 * (depth as f64 * tau).cosh();
            threshold = Some(t);
            for (w, p) in &shell {
                if p[0] > t {
                    points.push(IdealPoint::from_projective(p)?);
                    words.push(spec.word_name(w));
                } else {
                    rejected += 1;
                }
            }
        }
        SampleMethod::AttractingFixedPoints => {
            let factors: Vec<Vec<DMatrix<f64>>> =
                (0..spec.letter_count()).map(|l| spec.letter_factors(l)).collect();
            for (w, p) in &shell {
                points.push(attracting_fixed_point(&factors, w, p)?);
                words.push(spec.word_name(w));
            }
        }
    }
    if points.is_empty() {
        return Err(Error::Empty(format!(
            "every shell point of {} fell below the projection threshold",
            spec.label
        )));
    }
    let keep = dedup_mask(&points, tolerance::DEDUP_CHORDAL);
    let merged = keep.iter().filter(|k| !**k).count();
    let (points, words): (Vec<_>, Vec<_>) = points
        .into_iter()
        .zip(words)
        .zip(keep)
        .filter_map(|(pw, k)| k.then_some(pw))
        .unzip();
    let mut sample = LimitSetSample::new(points, depth, spec.label.clone());
    sample.words = words;
    sample.meta = SampleMeta {
        method: match opts.method {
            SampleMethod::OrbitProjection => "orbit_projection".into(),
            SampleMethod::AttractingFixedPoints => "attracting_fixed_points".into(),
        },
        acceptance_threshold: threshold,
        shell_size,
        rejected,
        duplicates_merged: merged,
    };
    Ok(sample)
}

fn attracting_fixed_point(
    factors: &[Vec<DMatrix<f64>>],
    w: &GroupWord,
    start: &DVector<f64>,
) -> Result<IdealPoint> {
    const MAX_PASSES: usize = 200;
    let mut v = start / start[0];
    for _ in 0..MAX_PASSES {
        let old = v.clone();
        for &l in w.letters.iter().rev() {
            for f in &factors[l] {
                v = f * v;
                let t = v[0];
                v /= t;
            }
        }
        if (&v - &old).amax() <= 1e-14 {
            break;
        }
    }
    IdealPoint::from_projective(&v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirichletReport {
    pub is_member: bool,
    pub violating_word: Option<String>,
}

/// Whether `x` is at least as close to the base point as to every sampled
/// orbit point.
pub fn dirichlet_membership(x: &HPoint, sample: &OrbitSample) -> Result<DirichletReport> {
    let o = HPoint::origin(x.dim());
    let d0 = dist(&o, x)?;
    for e in sample.entries.iter().filter(|e| !e.letters.is_identity()) {
        if d0 > dist(&e.point, x)? + tolerance::STRUCTURAL {
            return Ok(DirichletReport {
                is_member: false,
                violating_word: Some(e.word.clone()),
            });
        }
    }
    Ok(DirichletReport {
        is_member: true,
        violating_word: None,
    })
}

/// Largest distance from a sampled point on a segment between two random
/// orbit points of the depth ball to the nearest orbit point.
pub fn coboundedness_audit(
    spec: &GroupSpec,
    depth: usize,
    samples_per_pair: usize,
    max_pairs: usize,
    seed: u64,
) -> Result<CoboundednessEstimate> {
    let orbit = enumerate_ball(spec, depth)?;
    let points: Vec<HPoint> = orbit
        .entries
        .into_iter()
        .filter(|e| e.collision_with.is_none())
        .map(|e| e.point)
        .collect();
    point_set_coboundedness(&points, max_pairs, samples_per_pair, seed)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfSpaceProduct {
    pub first: String,
    pub second: String,
    pub product: f64,
}

/// Pairwise disjoint Dirichlet half-spaces `D_s = {x : d(x, s·o) < d(x, o)}`,
/// one per letter. `D_s = {x : B(x, n_s) > 0}` for `n_s = o - s·o` scaled to
/// `B(n_s, n_s) = -1`, and two closures are disjoint iff `B(n_s, n_t) > 1`.
#[derive(Debug, Clone, Serialize)]
pub struct PingPongCertificate {
    pub letters: Vec<String>,
    #[serde(skip)]
    pub normals: Vec<DVector<f64>>,
    pub products: Vec<HalfSpaceProduct>,
    pub min_product: f64,
}

impl PingPongCertificate {
    pub fn build(spec: &GroupSpec) -> Result<Self> {
        let o = HPoint::origin(spec.dimension).coords().clone();
        let mut letters = Vec::new();
        let mut normals = Vec::new();
        for l in 0..spec.letter_count() {
            let n = &o - spec.letters[l].matrix() * &o;
            let q = -form(&n, &n);
            if !(q > 0.0) {
                return Err(Error::Construction(format!(
                    "letter {} fixes the base point",
                    spec.tokens[l]
                )));
            }
            letters.push(spec.tokens[l].clone());
            normals.push(n / q.sqrt());
        }
        let mut products = Vec::new();
        let mut min_product = f64::INFINITY;
        for i in 0..normals.len() {
            for j in i + 1..normals.len() {
                let product = form(&normals[i], &normals[j]);
                if !(product > 1.0) {
                    return Err(Error::PingPong {
                        first: letters[i].clone(),
                        second: letters[j].clone(),
                        product,
                    });
                }
                min_product = min_product.min(product);
                products.push(HalfSpaceProduct {
                    first: letters[i].clone(),
                    second: letters[j].clone(),
                    product,
                });
            }
        }
        Ok(Self {
            letters,
            normals,
            products,
            min_product,
        })
    }

    /// The letter whose closed half-space contains `xi`, if any.
    pub fn region_of(&self, xi: &IdealPoint) -> Option<&str> {
        let v = xi.vector().coords();
        self.normals
            .iter()
            .position(|n| form(v, n) >= -tolerance::LIMIT)
            .map(|i| self.letters[i].as_str())
    }
}

#[derive(Debug, Clone)]
pub struct Schottky {
    pub spec: GroupSpec,
    pub certificate: PingPongCertificate,
}

/// `g = X_r Y_ℓ X_{-r}` and `h = X_{-r} Y_ℓ X_r` with `r = separation / 2`,
/// where `X`, `Y` translate along the coordinate axes. Both translate by
/// `ell` along axes perpendicular to the first axis at distance `separation`.
pub fn schottky_h2(ell: f64, separation: f64) -> Result<Schottky> {
    if !(ell > 0.0) || !(separation > 0.0) || !ell.is_finite() || !separation.is_finite() {
        return Err(Error::OutOfRange(format!(
            "ell = {ell} and separation = {separation} must be positive"
        )));
    }
    let r = separation / 2.0;
    let g = conjugated_translation(2, r, ell)?;
    let h = conjugated_translation(2, -r, ell)?;
    let spec = GroupSpec::new(
        "schottky",
        2,
        vec![Generator::new("g", g.with_label("g")), Generator::new("h", h.with_label("h"))],
        format!("Schottky pair, translation length {ell}, axis separation {separation}"),
    )?;
    let certificate = PingPongCertificate::build(&spec)?;
    Ok(Schottky { spec, certificate })
}

/// `X_r Y_ℓ X_{-r}` in dimension `dim`.
fn conjugated_translation(dim: usize, r: f64, ell: f64) -> Result<Isometry> {
    let x = boost(dim, 1, r)?;
    let y = boost(dim, 2, ell)?;
    let m = x.compose(&y)?.compose(&boost(dim, 1, -r)?)?;
    Isometry::new(m.matrix().clone())
}

/// `⟨g^{-k} h g^k : |k| ≤ n⟩`, in the order `k = 0, 1, -1, 2, -2, ...`.
pub fn normal_closure_family(spec: &GroupSpec, n: usize) -> Result<GroupSpec> {
    if spec.generators.len() != 2 {
        return Err(Error::Construction(format!(
            "normal closure needs exactly two generators, got {}",
            spec.generators.len()
        )));
    }
    let g = &spec.generators[0].isometry;
    let h = &spec.generators[1].isometry;
    let gi = g.inverse();
    let mut gens = Vec::with_capacity(2 * n + 1);
    let ks = std::iter::once(0i64).chain((1..=n as i64).flat_map(|k| [k, -k]));
    for k in ks {
        let (pre, post) = if k >= 0 { (&gi, g) } else { (g, &gi) };
        let m = k.unsigned_abs() as usize;
        let mut factors = vec![pre.clone(); m];
        factors.push(h.clone());
        factors.extend(std::iter::repeat_n(post.clone(), m));
        gens.push(Generator::from_factors(format!("c{k}"), factors)?);
    }
    GroupSpec::new(
        format!("{}-normal-closure-{n}", spec.label),
        spec.dimension,
        gens,
        format!("conjugates c_k = g^-k h g^k of {} for |k| <= {n}", spec.label),
    )
}

#[derive(Debug, Clone)]
pub struct H4Example {
    pub g1: GroupSpec,
    pub g2: GroupSpec,
    /// Orthogonal projector onto the plane `P` spanned by coordinates 0..2.
    pub p_projector: DMatrix<f64>,
    pub h: Isometry,
    pub j: Isometry,
    /// Relative Frobenius gap between `(hj)ⁿ` and `hⁿjⁿ` for `n = 1..=10`.
    pub power_gaps: Vec<f64>,
}

/// Coplanar `g`, `h` acting on `P` and trivially on coordinates 3, 4, and a
/// rotation `j` of coordinates 3, 4 commuting with both. `G₁ = ⟨g, h⟩` and
/// `G₂ = ⟨g, k⟩` with `k = hj`.
pub fn build_h4_example(ell_g: f64, ell_h: f64, separation: f64, theta: f64) -> Result<H4Example> {
    for (name, v) in [("ell_g", ell_g), ("ell_h", ell_h), ("separation", separation)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::OutOfRange(format!("{name} = {v} must be positive")));
        }
    }
    if !(theta > 0.0 && theta < std::f64::consts::TAU) {
        return Err(Error::OutOfRange(format!("theta = {theta} not in (0, 2π)")));
    }
    let r = separation / 2.0;
    let g = conjugated_translation(4, r, ell_g)?.with_label("g");
    let h = conjugated_translation(4, -r, ell_h)?.with_label("h");
    let j = rotation_fixing_subspace(4, (3, 4), theta)?.with_label("j");
    for (name, m) in [("g", &g), ("h", &h)] {
        let m = m.matrix();
        for a in 0..5 {
            for b in 0..5 {
                let mixed = (a >= 3) != (b >= 3) || (a >= 3 && b >= 3 && a != b);
                if mixed && m[(a, b)] != 0.0 || a >= 3 && a == b && m[(a, b)] != 1.0 {
                    return Err(Error::Construction(format!("{name} does not preserve P")));
                }
            }
        }
    }
    let hj = h.compose(&j)?;
    if hj.matrix() != j.compose(&h)?.matrix() {
        return Err(Error::Construction("h and j do not commute".into()));
    }
    let mut power_gaps = Vec::with_capacity(10);
    for n in 1..=10 {
        let lhs = hj.pow(n);
        let rhs = h.pow(n).compose(&j.pow(n))?;
        let gap = lhs.frobenius_distance(&rhs) / rhs.matrix().norm();
        if gap > 1e-10 {
            return Err(Error::Construction(format!(
                "(hj)^{n} differs from h^{n} j^{n} by {gap:.3e}"
            )));
        }
        power_gaps.push(gap);
    }
    let k = Isometry::new(hj.matrix().clone())?.with_label("k");
    let g1 = GroupSpec::new(
        "h4-G1",
        4,
        vec![Generator::new("g", g.clone()), Generator::new("h", h.clone())],
        "coplanar Schottky pair acting on P",
    )?;
    let g2 = GroupSpec::new(
        "h4-G2",
        4,
        vec![Generator::new("g", g), Generator::new("k", k)],
        format!("g and k = h j, j a rotation by {theta} fixing P"),
    )?;
    let mut p_projector = DMatrix::zeros(5, 5);
    for i in 0..3 {
        p_projector[(i, i)] = 1.0;
    }
    Ok(H4Example {
        g1,
        g2,
        p_projector,
        h,
        j,
        power_gaps,
    })
}

/// Every reduced word of length at most `max_len` over `letter_count`
/// letters, length-lexicographic.
pub fn words_up_to(letter_count: usize, max_len: usize) -> Vec<GroupWord> {
    let mut layer = vec![GroupWord::identity()];
    let mut out = layer.clone();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for l in 0..letter_count {
            for w in &layer {
                if w.letters.first() != Some(&(l ^ 1)) {
                    let mut letters = vec![l];
                    letters.extend_from_slice(&w.letters);
                    next.push(GroupWord { letters });
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Every reduced word of length at most `max_len` with its matrix.
pub fn word_matrices(spec: &GroupSpec, max_len: usize) -> Vec<(GroupWord, DMatrix<f64>)> {
    let n = spec.dimension + 1;
    let mut layer = vec![(GroupWord::identity(), DMatrix::identity(n, n))];
    let mut out = layer.clone();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for l in 0..spec.letter_count() {
            for (w, m) in &layer {
                if w.letters.first() == Some(&(l ^ 1)) {
                    continue;
                }
                let mut letters = vec![l];
                letters.extend_from_slice(&w.letters);
                next.push((GroupWord { letters }, spec.letters[l].matrix() * m));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixMatch {
    pub power: i64,
    pub nearest_word: String,
    pub frobenius: f64,
    pub matched: bool,
}

/// For `n = 1..=max_power`, the word of length at most `max_len` in `spec`
/// whose matrix is nearest to `targetⁿ`.
pub fn power_membership_probe(
    spec: &GroupSpec,
    target: &Isometry,
    max_power: i64,
    max_len: usize,
) -> Vec<MatrixMatch> {
    let words = word_matrices(spec, max_len);
    (1..=max_power)
        .map(|n| {
            let t = target.pow(n);
            let (w, d) = words
                .iter()
                .map(|(w, m)| (w, (m - t.matrix()).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("identity word present");
            MatrixMatch {
                power: n,
                nearest_word: spec.word_name(w),
                frobenius: d,
                matched: d <= tolerance::MATRIX_MATCH,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{directed_hausdorff, hausdorff_distance};
    use crate::minkowski::{geodesic_point, lorentz_defect, translation_along};

    fn schottky() -> Schottky {
        schottky_h2(2.0, 2.0).unwrap()
    }

    fn single_loxodromic(ell: f64) -> GroupSpec {
        let xi = IdealPoint::from_direction(&[1.0, 0.0]).unwrap();
        let eta = IdealPoint::from_direction(&[-1.0, 0.0]).unwrap();
        let g = translation_along(&eta, &xi, ell).unwrap();
        GroupSpec::new("cyclic", 2, vec![Generator::new("g", g)], "").unwrap()
    }

    #[test]
    fn names_and_parsing() {
        let s = schottky().spec;
        let w = s.parse_word("gHh").unwrap();
        assert_eq!(w.letters, vec![0]);
        assert_eq!(s.word_name(&s.parse_word("gHHG").unwrap()), "gHHG");
        assert_eq!(s.word_name(&GroupWord::identity()), "1");
        let n = normal_closure_family(&s, 1).unwrap();
        let w = n.parse_word("c1.c-1'").unwrap();
        assert_eq!(n.word_name(&w), "c1.c-1'");
        assert!(n.parse_word("c7").is_err());
    }

    #[test]
    fn ball_counts_and_invariants() {
        let s = schottky().spec;
        let b0 = enumerate_ball(&s, 0).unwrap();
        assert_eq!(b0.entries.len(), 1);
        assert_eq!(b0.entries[0].word, "1");
        assert_eq!(b0.entries[0].dist_from_base, 0.0);
        let b = enumerate_ball(&s, 4).unwrap();
        assert_eq!(b.entries.len(), 161);
        let o = HPoint::origin(2);
        for e in &b.entries {
            assert!((e.dist_from_base - dist(&o, &e.point).unwrap()).abs() < 1e-9);
        }
        // Length-lexicographic: g, G, h, H.
        let names: Vec<&str> = b.entries[1..5].iter().map(|e| e.word.as_str()).collect();
        assert_eq!(names, ["g", "G", "h", "H"]);
        assert_eq!(b.entries[5].word, "gg");
    }

    #[test]
    fn schottky_is_free_at_depth_eight() {
        let b = enumerate_ball(&schottky().spec, 8).unwrap();
        assert_eq!(b.entries.len(), 2 * (3usize.pow(8) - 1) + 1);
        assert_eq!(b.collisions(), 0);
    }

    #[test]
    fn collisions_are_flagged_not_dropped() {
        let s = schottky().spec;
        let g = s.generators[0].isometry.clone();
        let twice = GroupSpec::new(
            "dup",
            2,
            vec![Generator::new("a", g.clone()), Generator::new("b", g)],
            "",
        )
        .unwrap();
        let b = enumerate_ball(&twice, 2).unwrap();
        assert_eq!(b.entries.len(), 17);
        let ab = b.entries.iter().position(|e| e.word == "aB").unwrap();
        assert_eq!(b.entries[ab].collision_with, Some(0));
        let bb = b.entries.iter().position(|e| e.word == "b").unwrap();
        assert_eq!(b.entries[bb].collision_with, Some(1));
    }

    #[test]
    fn discreteness_counts() {
        let b = enumerate_ball(&schottky().spec, 3).unwrap();
        assert_eq!(discreteness_audit(&b, 1.0).unwrap().count, 1);
        let r = discreteness_audit(&b, 3.0).unwrap();
        assert_eq!(r.count, 5);
        assert!(r.min_gap.unwrap() > 0.0);
        let mut prev = 0;
        for radius in [0.5, 2.0, 3.0, 5.0, 8.0, 12.0] {
            let c = discreteness_audit(&b, radius).unwrap().count;
            assert!(c >= prev);
            prev = c;
        }
        assert!(discreteness_audit(&b, 0.0).is_err());
    }

    #[test]
    fn translation_length_estimates() {
        assert!((translation_length(&single_loxodromic(1.7).generators[0].isometry) - 1.7).abs() < 1e-9);
        for g in &schottky().spec.generators {
            assert!((translation_length(&g.isometry) - 2.0).abs() < 1e-9);
        }
        let rot = rotation_fixing_subspace(2, (1, 2), 0.3).unwrap();
        assert!(translation_length(&rot) < 1e-12);
    }

    #[test]
    fn loxodromic_limit_set_is_two_points() {
        let s = single_loxodromic(2.0);
        for depth in [1, 3, 6] {
            let l = limit_set_sample(&s, depth).unwrap();
            assert_eq!(l.len(), 2);
        }
        assert!(limit_set_sample(&s, 0).is_err());
    }

    #[test]
    fn schottky_sample_sizes_and_certificate_regions() {
        let sch = schottky();
        assert!(sch.certificate.min_product > 1.0);
        assert_eq!(sch.certificate.products.len(), 6);
        for depth in 1..=6 {
            let l = limit_set_sample(&sch.spec, depth).unwrap();
            assert_eq!(l.len(), 4 * 3usize.pow(depth as u32 - 1));
            assert_eq!(l.meta.rejected, 0);
        }
        let l = limit_set_sample(&sch.spec, 6).unwrap();
        for p in &l.points {
            assert!(sch.certificate.region_of(p).is_some());
        }
        let gaps = (0..360)
            .map(|k| (k as f64).to_radians())
            .filter(|t| {
                let xi = IdealPoint::from_direction(&[t.cos(), t.sin()]).unwrap();
                sch.certificate.region_of(&xi).is_none()
            })
            .count();
        assert!(gaps > 0);
    }

    #[test]
    fn ping_pong_failure_is_reported() {
        let err = schottky_h2(0.3, 0.1).unwrap_err();
        assert!(matches!(err, Error::PingPong { .. }), "{err:?}");
        assert!(schottky_h2(-1.0, 2.0).is_err());
    }

    #[test]
    fn schottky_sample_is_generator_invariant() {
        let sch = schottky();
        let l = limit_set_sample(&sch.spec, 7).unwrap();
        for g in &sch.spec.generators {
            for m in [g.isometry.clone(), g.isometry.inverse()] {
                let moved: Vec<IdealPoint> = l.points.iter().map(|p| m.apply_ideal(p).unwrap()).collect();
                let moved = LimitSetSample::new(moved, l.depth, "moved");
                assert!(hausdorff_distance(&moved, &l).unwrap() < 0.05);
            }
        }
    }

    #[test]
    fn fixed_point_and_projection_samples_agree() {
        let sch = schottky();
        let opts = SampleOptions {
            method: SampleMethod::AttractingFixedPoints,
            translation_length: None,
        };
        let fixed = limit_set_sample_with(&sch.spec, 6, opts).unwrap();
        let proj = limit_set_sample(&sch.spec, 6).unwrap();
        // Conjugates u v u⁻¹ share fixed points with shorter words.
        assert!(fixed.len() <= 972 && fixed.len() > 900);
        assert!(hausdorff_distance(&fixed, &proj).unwrap() < 0.01);
        for p in &fixed.points {
            assert!(sch.certificate.region_of(p).is_some());
        }
    }

    #[test]
    fn dirichlet_cases() {
        let s = single_loxodromic(2.0);
        let b = enumerate_ball(&s, 2).unwrap();
        let o = HPoint::origin(2);
        assert!(dirichlet_membership(&o, &b).unwrap().is_member);
        let go = b.entries[1].point.clone();
        let r = dirichlet_membership(&go, &b).unwrap();
        assert!(!r.is_member);
        assert_eq!(r.violating_word.as_deref(), Some("g"));
        let mid = geodesic_point(&o, &go, 1.0).unwrap();
        assert!(dirichlet_membership(&mid, &b).unwrap().is_member);
    }

    #[test]
    fn coboundedness_cases() {
        let trivial = GroupSpec::new("trivial", 2, vec![], "").unwrap();
        assert_eq!(coboundedness_audit(&trivial, 2, 11, 10, 0).unwrap().sigma_hat, 0.0);
        let c = coboundedness_audit(&single_loxodromic(2.0), 4, 21, 100, 0).unwrap();
        assert!(c.sigma_hat <= 1.0 + 1e-6);
        assert!(c.sigma_hat > 0.9);
        let s = schottky().spec;
        let a = coboundedness_audit(&s, 3, 11, 200, 1).unwrap().sigma_hat;
        let b = coboundedness_audit(&s, 5, 11, 200, 1).unwrap().sigma_hat;
        assert!(b <= a + 0.1, "{a} {b}");
    }

    #[test]
    fn normal_closure_generators() {
        let s = schottky().spec;
        let n0 = normal_closure_family(&s, 0).unwrap();
        assert_eq!(n0.generators.len(), 1);
        assert_eq!(n0.generators[0].name, "c0");
        let n2 = normal_closure_family(&s, 2).unwrap();
        let names: Vec<&str> = n2.generators.iter().map(|g| g.name.as_str()).collect();
        assert_eq!(names, ["c0", "c1", "c-1", "c2", "c-2"]);
        for g in &n2.generators {
            assert!(lorentz_defect(g.isometry.matrix()).unwrap() < 1e-9 * g.isometry.matrix().amax().powi(2));
        }
        let n0_sample = limit_set_sample_with(
            &n0,
            3,
            SampleOptions {
                method: SampleMethod::AttractingFixedPoints,
                translation_length: None,
            },
        )
        .unwrap();
        assert_eq!(n0_sample.len(), 2);
        let g2 = limit_set_sample_with(
            &s,
            6,
            SampleOptions {
                method: SampleMethod::AttractingFixedPoints,
                translation_length: None,
            },
        )
        .unwrap();
        assert!(hausdorff_distance(&n0_sample, &g2).unwrap() > 0.5);
        assert!(directed_hausdorff(&n0_sample, &g2).unwrap() < 1e-6);
    }

    #[test]
    fn h4_construction() {
        let ex = build_h4_example(2.0, 2.0, 2.0, 1.0).unwrap();
        let j10 = ex.j.pow(10);
        assert!((j10.matrix() - DMatrix::identity(5, 5)).norm() > 1e-3);
        assert!(ex.power_gaps.iter().all(|&g| g <= 1e-10));
        let k = &ex.g2.generators[1].isometry;
        let h = &ex.g1.generators[1].isometry;
        assert_eq!(
            k.matrix().view((0, 0), (3, 3)),
            h.matrix().view((0, 0), (3, 3))
        );
        let b = enumerate_ball(&ex.g2, 4).unwrap();
        for e in &b.entries {
            assert_eq!(e.point.coords()[3], 0.0);
            assert_eq!(e.point.coords()[4], 0.0);
        }
        assert!(build_h4_example(2.0, 2.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn h_powers_are_not_in_g2() {
        let ex = build_h4_example(2.0, 2.0, 2.0, 1.0).unwrap();
        let rows = power_membership_probe(&ex.g2, &ex.h, 5, 5);
        assert_eq!(rows.len(), 5);
        for r in &rows {
            assert!(!r.matched, "{r:?}");
        }
        // Control: h's own powers are found in G1.
        for r in power_membership_probe(&ex.g1, &ex.h, 5, 5) {
            assert!(r.matched);
        }
    }

    #[test]
    fn csv_shape() {
        let b = enumerate_ball(&schottky().spec, 1).unwrap();
        let csv = b.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "word,c0,c1,c2");
        assert_eq!(lines.len(), 6);
        assert!(lines[1].starts_with("1,1,0,0"));
    }
}
