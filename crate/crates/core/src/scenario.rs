//! End-to-end constructions with structured verdicts.
//!
//! Each scenario builds its groups, samples orbits and limit sets, and
//! records one [`Check`] per property. A report passes iff every check does.

use std::collections::BTreeMap;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::boundary::{directed_hausdorff, hausdorff_distance, largest_empty_cap, LimitSetSample};
use crate::embedding::{embed_tree_ball, embedding_coboundedness, extend_isometry, minimal_subspace_restrict};
use crate::error::{Error, Result};
use crate::free_group::{apply, ball, conjugate_intersection_probe, Letter, TreeMap, Word};
use crate::group::{
    build_h4_example, discreteness_audit, enumerate_ball, limit_set_sample_with, normal_closure_family,
    power_membership_probe, schottky_h2, Generator, GroupSpec, GroupWord, SampleMethod,
    SampleOptions,
};
use crate::minkowski::{dist, HPoint, Isometry};
use crate::tolerance;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum CheckValue {
    Number(f64),
    Flag(bool),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: CheckValue,
    /// `"<="`, `">="`, `"<"`, `">"`, or `"is"` for boolean checks.
    pub relation: &'static str,
    pub threshold: CheckValue,
    pub pass: bool,
    /// Informational rows never fail a report.
    pub informational: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn compare(name: &str, value: f64, relation: &'static str, threshold: f64) -> Self {
        let pass = match relation {
            "<=" => value <= threshold,
            ">=" => value >= threshold,
            "<" => value < threshold,
            ">" => value > threshold,
            _ => unreachable!("unknown relation {relation}"),
        };
        Self {
            name: name.into(),
            value: CheckValue::Number(value),
            relation,
            threshold: CheckValue::Number(threshold),
            pass,
            informational: false,
            note: None,
        }
    }

    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self::compare(name, value, "<=", threshold)
    }

    pub fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Self::compare(name, value, ">=", threshold)
    }

    pub fn below(name: &str, value: f64, threshold: f64) -> Self {
        Self::compare(name, value, "<", threshold)
    }

    pub fn above(name: &str, value: f64, threshold: f64) -> Self {
        Self::compare(name, value, ">", threshold)
    }

    pub fn flag(name: &str, value: bool, expected: bool) -> Self {
        Self {
            name: name.into(),
            value: CheckValue::Flag(value),
            relation: "is",
            threshold: CheckValue::Flag(expected),
            pass: value == expected,
            informational: false,
            note: None,
        }
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub scenario_name: String,
    pub parameters: BTreeMap<String, Value>,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub samples_meta: BTreeMap<String, Value>,
    pub overall_pass: bool,
    #[serde(skip)]
    pub samples: Vec<LimitSetSample>,
}

impl ScenarioReport {
    fn new(name: &str, seed: u64) -> Self {
        Self {
            scenario_name: name.into(),
            parameters: BTreeMap::new(),
            seed,
            checks: Vec::new(),
            samples_meta: BTreeMap::new(),
            overall_pass: false,
            samples: Vec::new(),
        }
    }

    fn param(&mut self, k: &str, v: impl Into<Value>) {
        self.parameters.insert(k.into(), v.into());
    }

    fn meta(&mut self, k: &str, v: impl Into<Value>) {
        self.samples_meta.insert(k.into(), v.into());
    }

    fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    fn finish(mut self) -> Self {
        self.overall_pass = self.checks.iter().all(|c| c.informational || c.pass);
        self
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }
}

fn sample_meta(s: &LimitSetSample) -> Value {
    json!({
        "group": s.group_label,
        "depth": s.depth,
        "points": s.len(),
        "method": s.meta.method,
        "shell_size": s.meta.shell_size,
        "rejected": s.meta.rejected,
        "duplicates_merged": s.meta.duplicates_merged,
    })
}

/// Parameters of the non-rigidity construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonrigidityParams {
    pub lambda: f64,
    pub tree_radius: usize,
    pub word_depth: usize,
    pub seed: u64,
}

impl Default for NonrigidityParams {
    fn default() -> Self {
        Self {
            lambda: 2.0,
            tree_radius: 5,
            word_depth: 3,
            seed: 0,
        }
    }
}

/// Segments sampled by the coboundedness estimates.
const COBOUNDED_PAIRS: usize = 200;
/// Random directions probed by the empty-cap search in high dimension.
const CAP_PROBES: usize = 200;

/// Embeds a tree ball, extends `Φ_a, Φ_b` and their `γ`-conjugates to
/// Lorentz matrices and compares the two resulting groups.
pub fn scenario_nonrigidity(p: NonrigidityParams) -> Result<ScenarioReport> {
    let NonrigidityParams {
        lambda,
        tree_radius,
        word_depth,
        seed,
    } = p;
    if word_depth == 0 || tree_radius < word_depth + 2 {
        return Err(Error::OutOfRange(format!(
            "need tree_radius >= word_depth + 2 and word_depth >= 1, got {tree_radius} and {word_depth}"
        )));
    }
    let mut r = ScenarioReport::new("nonrigidity", seed);
    r.param("lambda", lambda);
    r.param("tree_radius", tree_radius);
    r.param("word_depth", word_depth);

    let e = embed_tree_ball(tree_radius, lambda)?;
    let tol = tolerance::SPECTRAL_PER_ROW * e.len() as f64;
    r.push(Check::at_most("embedding residual", e.max_rel_residual, tolerance::METRIC));
    r.push(Check::at_most(
        "positive Gram eigenvalues",
        e.gram_spectrum.iter().filter(|&&m| m > tol).count() as f64,
        1.0,
    ));
    r.meta("embedding", json!({"vertices": e.len(), "ambient_dim": e.ambient_dim}));

    let domain = tree_radius - 1;
    let a = Word::letter(Letter::A);
    let b = Word::letter(Letter::B);
    let ext = |m: &TreeMap, label: &str| -> Result<Isometry> {
        Ok(extend_isometry(&e, m, domain)?.with_label(label))
    };
    let g1 = GroupSpec::new(
        "Gamma1",
        e.ambient_dim,
        vec![
            Generator::new("a", ext(&TreeMap::translation(a.clone()), "a")?),
            Generator::new("b", ext(&TreeMap::translation(b.clone()), "b")?),
        ],
        "left translations of the tree, extended",
    )?;
    let g2 = GroupSpec::new(
        "Gamma2",
        e.ambient_dim,
        vec![
            Generator::new("c", ext(&TreeMap::gamma_conjugate(a), "c")?),
            Generator::new("d", ext(&TreeMap::gamma_conjugate(b), "d")?),
        ],
        "gamma-conjugates of the left translations, extended",
    )?;

    // Orbit shells stay inside the embedded ball up to the domain radius.
    let hi = domain;
    let lo = hi.saturating_sub(2).max(1);
    let opts = SampleOptions {
        method: SampleMethod::OrbitProjection,
        translation_length: Some(lambda.ln()),
    };
    let mut hausdorff = Vec::new();
    for depth in [lo, hi] {
        let s1 = limit_set_sample_with(&g1, depth, opts)?;
        let s2 = limit_set_sample_with(&g2, depth, opts)?;
        let h = hausdorff_distance(&s1, &s2)?;
        r.meta(&format!("limit_samples_depth_{depth}"), json!([sample_meta(&s1), sample_meta(&s2)]));
        hausdorff.push(h);
        if depth == hi {
            r.samples.push(s1);
            r.samples.push(s2);
        }
    }
    r.push(
        Check::at_most(
            &format!("limit-set Hausdorff at depth {hi} vs depth {lo}"),
            hausdorff[1],
            hausdorff[0] + tolerance::LIMIT,
        )
        .with_note(format!("depth {lo}: {:.3e}", hausdorff[0])),
    );

    let probe = intersection_probe(&g1, &g2, word_depth, seed)?;
    r.push(
        Check::flag("identity pair matches", probe.identity_matches, true)
            .informational()
            .with_note("sanity row"),
    );
    r.push(
        Check::at_most("numeric intersection survivors", probe.survivors.len() as f64, 0.0)
            .with_note(format!(
                "{} word pairs, {} passed the probe-vector filter",
                probe.pairs, probe.candidates
            )),
    );
    r.push(Check::at_most("suspicious numeric matches", probe.suspicious.len() as f64, 0.0));
    let exact = conjugate_intersection_probe(word_depth, 2)?;
    r.push(Check::at_most("exact intersection survivors", exact.survivors.len() as f64, 0.0));
    r.meta("intersection_probe", json!({
        "word_depth": word_depth,
        "numeric_survivors": probe.survivors,
        "suspicious": probe.suspicious,
        "exact_candidates": exact.candidates,
    }));

    for spec in [&g1, &g2] {
        let orbit = enumerate_ball(spec, hi)?;
        let d = discreteness_audit(&orbit, lambda.acosh() + tolerance::METRIC)?;
        r.push(Check::at_most(
            &format!("{} orbit collisions", spec.label),
            orbit.collisions() as f64,
            0.0,
        ));
        r.push(
            Check::at_most(
                &format!("{} orbit points within one edge", spec.label),
                d.count as f64,
                5.0,
            )
            .informational(),
        );
    }

    let small = embed_tree_ball(tree_radius.saturating_sub(2).max(1), lambda)?;
    let sigma_small = embedding_coboundedness(&small, COBOUNDED_PAIRS, seed)?.sigma_hat;
    let sigma = embedding_coboundedness(&e, COBOUNDED_PAIRS, seed)?.sigma_hat;
    r.push(
        Check::at_most(
            &format!("coboundedness at radius {tree_radius}"),
            sigma,
            sigma_small + 0.1,
        )
        .with_note(format!("radius {}: {sigma_small:.6}", small.radius)),
    );

    let vs: Vec<DVector<f64>> = e.points.iter().map(|p| p.coords().clone()).collect();
    let restricted = minimal_subspace_restrict(&vs)?;
    r.push(
        Check::flag("nonplanar after restriction", restricted.nonplanar, true)
            .with_note(format!("rank {} of {}", restricted.rank, restricted.ambient_dim + 1)),
    );
    let cap = largest_empty_cap(&r.samples[0], CAP_PROBES, seed)?;
    r.push(
        Check::above("largest empty cap (second kind evidence)", cap, 0.0)
            .informational(),
    );
    Ok(r.finish())
}

struct NumericProbe {
    pairs: usize,
    candidates: usize,
    identity_matches: bool,
    survivors: Vec<(String, String)>,
    suspicious: Vec<(String, String)>,
}

fn tree_word(w: &GroupWord) -> Result<Word> {
    Word::reduce(w.letters.iter().map(|&l| Letter::ALL[l]))
}

/// Searches nonidentity pairs `(u, v)` of words in `g1`, `g2` whose matrices
/// agree within the matching tolerance. Pairs are first filtered on probe
/// vectors; each numeric match is checked exactly on tree maps.
fn intersection_probe(g1: &GroupSpec, g2: &GroupSpec, depth: usize, seed: u64) -> Result<NumericProbe> {
    let n = g1.dimension + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probes = vec![HPoint::origin(g1.dimension).coords().clone()];
    for _ in 0..3 {
        probes.push(DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0)));
    }
    let words = |spec: &GroupSpec| -> Vec<(GroupWord, Vec<DVector<f64>>)> {
        crate::group::words_up_to(spec.letter_count(), depth)
            .into_iter()
            .map(|w| {
                let imgs = probes.iter().map(|v| spec.apply_word(&w, v)).collect();
                (w, imgs)
            })
            .collect()
    };
    let w1 = words(g1);
    let w2 = words(g2);
    let identity_matches = g1
        .word_matrix(&GroupWord::identity())
        .frobenius_distance(&g2.word_matrix(&GroupWord::identity()))
        <= tolerance::MATRIX_MATCH;
    let mut candidates = 0;
    let mut survivors = Vec::new();
    let mut suspicious = Vec::new();
    let mut pairs = 0;
    for (u, iu) in w1.iter().filter(|(w, _)| !w.is_identity()) {
        for (v, iv) in w2.iter().filter(|(w, _)| !w.is_identity()) {
            pairs += 1;
            let close = iu
                .iter()
                .zip(iv)
                .zip(&probes)
                .all(|((x, y), p)| (x - y).norm() <= tolerance::MATRIX_MATCH * p.norm().max(1.0));
            if !close {
                continue;
            }
            candidates += 1;
            if g1.word_matrix(u).frobenius_distance(&g2.word_matrix(v)) > tolerance::MATRIX_MATCH {
                continue;
            }
            let names = (g1.word_name(u), g2.word_name(v));
            let tu = TreeMap::translation(tree_word(u)?);
            let tv = TreeMap::Composition(vec![
                TreeMap::GammaInverse,
                TreeMap::translation(tree_word(v)?),
                TreeMap::Gamma,
            ]);
            let mut agree = true;
            for x in ball(2) {
                if apply(&tu, &x)? != apply(&tv, &x)? {
                    agree = false;
                    break;
                }
            }
            if agree {
                survivors.push(names);
            } else {
                suspicious.push(names);
            }
        }
    }
    Ok(NumericProbe {
        pairs,
        candidates,
        identity_matches,
        survivors,
        suspicious,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct H4Params {
    pub ell_g: f64,
    pub ell_h: f64,
    pub separation: f64,
    pub theta: f64,
    pub depth: usize,
    pub seed: u64,
}

impl Default for H4Params {
    fn default() -> Self {
        Self {
            ell_g: 2.0,
            ell_h: 2.0,
            separation: 2.0,
            theta: 1.0,
            depth: 6,
            seed: 0,
        }
    }
}

/// Two groups in `ℍ⁴` that agree on a plane `P`, so have equal limit sets,
/// while `G₂` misses the powers of `h`.
pub fn scenario_h4(p: H4Params) -> Result<ScenarioReport> {
    if p.depth < 4 {
        return Err(Error::OutOfRange(format!("depth {} must be at least 4", p.depth)));
    }
    let mut r = ScenarioReport::new("h4", p.seed);
    r.param("ell_g", p.ell_g);
    r.param("ell_h", p.ell_h);
    r.param("separation", p.separation);
    r.param("theta", p.theta);
    r.param("depth", p.depth);
    let ex = build_h4_example(p.ell_g, p.ell_h, p.separation, p.theta)?;
    let opts = SampleOptions::default();

    let mut hausdorff = Vec::new();
    let mut off_plane: f64 = 0.0;
    for depth in [p.depth - 2, p.depth] {
        let s1 = limit_set_sample_with(&ex.g1, depth, opts)?;
        let s2 = limit_set_sample_with(&ex.g2, depth, opts)?;
        for s in [&s1, &s2] {
            for q in &s.points {
                off_plane = off_plane.max(q.direction()[2].abs()).max(q.direction()[3].abs());
            }
        }
        hausdorff.push(hausdorff_distance(&s1, &s2)?);
        r.meta(&format!("limit_samples_depth_{depth}"), json!([sample_meta(&s1), sample_meta(&s2)]));
        if depth == p.depth {
            r.samples.push(s1);
            r.samples.push(s2);
        }
    }
    r.push(Check::at_most("limit samples off the plane P", off_plane, tolerance::STRUCTURAL));
    r.push(
        Check::at_most(
            &format!("limit-set Hausdorff at depth {} vs depth {}", p.depth, p.depth - 2),
            hausdorff[1],
            hausdorff[0] + tolerance::LIMIT,
        )
        .with_note(format!("depth {}: {:.3e}", p.depth - 2, hausdorff[0])),
    );
    let gap = ex.power_gaps.iter().copied().fold(0.0, f64::max);
    r.push(Check::at_most("(hj)^n vs h^n j^n, n <= 10", gap, 1e-10));

    let probe = power_membership_probe(&ex.g2, &ex.h, 5, 5);
    let nearest = probe.iter().map(|m| m.frobenius).fold(f64::INFINITY, f64::min);
    r.push(
        Check::above("h^n nearest G2 word, n <= 5, length <= 5", nearest, tolerance::MATRIX_MATCH)
            .with_note(
                probe
                    .iter()
                    .map(|m| format!("n={}: {} at {:.3e}", m.power, m.nearest_word, m.frobenius))
                    .collect::<Vec<_>>()
                    .join("; "),
            ),
    );

    let orbit = enumerate_ball(&ex.g1, 3)?;
    let mut vs: Vec<DVector<f64>> = orbit.points().map(|q| q.coords().clone()).collect();
    vs.extend(r.samples[0].points.iter().map(|q| q.vector().coords().clone()));
    let restricted = minimal_subspace_restrict(&vs)?;
    r.push(
        Check::flag("G1 nonplanar (negative control)", restricted.nonplanar, false)
            .with_note(format!("rank {} of {}", restricted.rank, restricted.ambient_dim + 1)),
    );
    let cap = largest_empty_cap(&r.samples[0], CAP_PROBES, p.seed)?;
    r.push(Check::above("largest empty cap (second kind evidence)", cap, 0.0).informational());
    Ok(r.finish())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalSubgroupParams {
    pub ell: f64,
    pub separation: f64,
    pub n_conjugates: usize,
    pub depth: usize,
    pub seed: u64,
}

impl Default for NormalSubgroupParams {
    fn default() -> Self {
        Self {
            ell: 2.0,
            separation: 2.0,
            n_conjugates: 4,
            depth: 4,
            seed: 0,
        }
    }
}

/// Truncations of the normal closure of `h` in a Schottky group `⟨g, h⟩`,
/// compared with the whole group.
pub fn scenario_normal_subgroup(p: NormalSubgroupParams) -> Result<ScenarioReport> {
    if p.n_conjugates < 1 || p.depth < 3 {
        return Err(Error::OutOfRange(format!(
            "need n_conjugates >= 1 and depth >= 3, got {} and {}",
            p.n_conjugates, p.depth
        )));
    }
    let mut r = ScenarioReport::new("normal_subgroup", p.seed);
    r.param("ell", p.ell);
    r.param("separation", p.separation);
    r.param("n_conjugates", p.n_conjugates);
    r.param("depth", p.depth);
    let sch = schottky_h2(p.ell, p.separation)?;
    let opts = SampleOptions {
        method: SampleMethod::AttractingFixedPoints,
        translation_length: None,
    };
    let reference_depth = 2 * p.depth + 1;
    let reference = limit_set_sample_with(&sch.spec, reference_depth, opts)?;
    r.meta("reference", sample_meta(&reference));

    let mut ladder: Vec<usize> = [0, 1, 2, 4].into_iter().filter(|&n| n < p.n_conjugates).collect();
    ladder.push(p.n_conjugates);
    let mut distances = Vec::new();
    let mut last = None;
    for &n in &ladder {
        let g1 = normal_closure_family(&sch.spec, n)?;
        let s = limit_set_sample_with(&g1, p.depth, opts)?;
        let directed = directed_hausdorff(&s, &reference)?;
        let h = hausdorff_distance(&s, &reference)?;
        r.push(Check::at_most(
            &format!("containment, n = {n}"),
            directed,
            tolerance::LIMIT,
        ));
        r.meta(&format!("truncation_{n}"), sample_meta(&s));
        distances.push((n, h));
        last = Some((g1, s));
    }
    r.push(Check::above("Hausdorff at n = 0", distances[0].1, 0.5));
    for w in distances.windows(2) {
        r.push(Check::below(
            &format!("Hausdorff at n = {} below n = {}", w[1].0, w[0].0),
            w[1].1,
            w[0].1,
        ));
    }
    let (first, final_) = (distances[0], distances[distances.len() - 1]);
    r.push(Check::at_least(
        &format!("Hausdorff ratio n = {} over n = {}", first.0, final_.0),
        first.1 / final_.1,
        2.0,
    ));
    r.meta(
        "hausdorff_ladder",
        distances.iter().map(|(n, h)| json!({"n": n, "hausdorff": h})).collect::<Vec<_>>(),
    );

    // If a sample is within ε of an invariant set, moving it by g costs at
    // most (1 + Lip g) ε, and g is e^{d(o, g o)}-Lipschitz on the boundary.
    let (_, s) = last.expect("ladder is nonempty");
    let g = &sch.spec.generators[0].isometry;
    let moved: Vec<_> = s
        .points
        .iter()
        .map(|q| g.apply_ideal(q))
        .collect::<Result<_>>()?;
    let moved = LimitSetSample::new(moved, s.depth, "g-image");
    let defect = hausdorff_distance(&moved, &s)?;
    let lip = dist(&HPoint::origin(2), &g.apply(&HPoint::origin(2))?)?.exp();
    r.push(Check::at_most(
        &format!("g-invariance defect, n = {}", p.n_conjugates),
        defect,
        (1.0 + lip) * final_.1 + tolerance::LIMIT,
    ));
    let cap = largest_empty_cap(&reference, 0, p.seed)?;
    r.push(Check::above("largest empty cap (second kind evidence)", cap, 0.0).informational());
    r.samples.push(s);
    r.samples.push(reference);
    Ok(r.finish())
}
