//! Property suite run over a corpus: every analyzed program is cross-checked
//! against independent oracles and exact simulation.
//!
//! Checked per program:
//! - `expected_locus`: the stored locus, if any, is set-equivalent to the
//!   computed one.
//! - `regular_oracle`: for every regular pair, cell membership in Jordan
//!   coordinates agrees with the closed-form dominance test.
//! - `program_oracle`: membership in source coordinates agrees with a
//!   basis-free oracle fitted to exact iterates.
//! - `path_agreement`: on normal spectra the normal and regular cell
//!   formulas give the same set.
//! - `disjointness`: S, U and V cells of a regular pair are pairwise disjoint.
//! - `complement_terminates`: sampled non-members violate the guard within
//!   the horizon.
//! - `positive_tail`: the real-spectrum part of sampled members keeps every
//!   guard row positive up to the horizon from some step on.
//! - `forward_closure`: members stay members after one step.
//! - `cone`: for homogeneous loops membership is invariant under positive
//!   scaling.
//! - `embedding`: for affine loops membership of `x` equals membership of
//!   `(x, 1)` in the analysis of the homogenized loop.
//! - `witness`: reported witnesses are members, and integer ones are integral.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ant::regular::regular_cells;
use crate::ant::{
    analyze_with, ant_normal, ant_regular, point_ant, regular_pair_ant, sequence_ant_with, AnalysisReport,
    AnalyzeOptions, RowPath, DEFAULT_INT_BUDGET,
};
use crate::arith::rational::{fmt_rational, int, rat};
use crate::arith::Rational;
use crate::corpus::CorpusEntry;
use crate::error::Result;
use crate::loopfront::{homogenize, parse_locus, ClassTag, LoopProgram};
use crate::semilinear::format::to_text;
use crate::semilinear::{set_equivalent, SemiLinearSet};
use crate::simulate::{check_ant_at_horizon, first_violation, HorizonStatus, DEFAULT_HORIZON};
use crate::spectra::jordan::rational_spectrum;
use crate::spectra::{degenerate_reduction, real_spectrum_restriction, RealRestriction, SpectralData};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckConfig {
    pub horizon: usize,
    /// Minimum number of sample points per program and per regular pair.
    pub samples: usize,
    pub seed: u64,
    pub int_budget: usize,
    /// Cap on cell witnesses drawn from one set.
    pub witness_cap: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { horizon: DEFAULT_HORIZON, samples: 50, seed: 42, int_budget: DEFAULT_INT_BUDGET, witness_cap: 24 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub detail: String,
    /// Counterexample, when the failure is pointwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyResult {
    pub name: &'static str,
    /// Number of points or instances examined.
    pub checked: usize,
    pub failures: Vec<Failure>,
}

impl PropertyResult {
    fn new(name: &'static str) -> Self {
        PropertyResult { name, checked: 0, failures: Vec::new() }
    }

    fn expect(&mut self, ok: bool, detail: impl FnOnce() -> String, point: Option<&[Rational]>) {
        self.checked += 1;
        if !ok {
            self.failures.push(Failure { detail: detail(), point: point.map(show_point) });
        }
    }

    fn fail(&mut self, detail: String) {
        self.failures.push(Failure { detail, point: None });
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProgramCheck {
    pub id: String,
    pub class: String,
    pub n: usize,
    pub m: usize,
    /// `None` when the analysis itself failed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict_real: Option<String>,
    pub normal_pairs: usize,
    pub regular_pairs: usize,
    pub properties: Vec<PropertyResult>,
}

impl ProgramCheck {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(PropertyResult::passed)
    }

    pub fn property(&self, name: &str) -> Option<&PropertyResult> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn to_text(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let mut out = format!(
            "{status} {} (class {}, n={}, m={}, verdict over R: {})\n",
            self.id,
            self.class,
            self.n,
            self.m,
            self.verdict_real.as_deref().unwrap_or("none")
        );
        for p in &self.properties {
            for f in &p.failures {
                out.push_str(&format!("  {}: {}\n", p.name, f.detail));
                if let Some(pt) = &f.point {
                    out.push_str(&format!("    at ({})\n", pt.join(", ")));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckSummary {
    pub programs: usize,
    pub passed: usize,
    pub failed: usize,
    pub normal_pairs: usize,
    pub regular_pairs: usize,
    pub nonterminating: usize,
    pub terminating: usize,
    /// Points or instances examined per property, summed over programs.
    pub checked: Vec<(String, usize)>,
}

pub fn summarize(results: &[ProgramCheck]) -> CheckSummary {
    let passed = results.iter().filter(|r| r.passed()).count();
    let mut names: Vec<&'static str> = Vec::new();
    for r in results {
        for p in &r.properties {
            if !names.contains(&p.name) {
                names.push(p.name);
            }
        }
    }
    let checked = names
        .iter()
        .map(|n| (n.to_string(), results.iter().filter_map(|r| r.property(n)).map(|p| p.checked).sum()))
        .collect();
    let verdicts = |v: &str| results.iter().filter(|r| r.verdict_real.as_deref() == Some(v)).count();
    CheckSummary {
        programs: results.len(),
        passed,
        failed: results.len() - passed,
        normal_pairs: results.iter().map(|r| r.normal_pairs).sum(),
        regular_pairs: results.iter().map(|r| r.regular_pairs).sum(),
        nonterminating: verdicts("NonTerminating"),
        terminating: verdicts("Terminating"),
        checked,
    }
}

fn show_point(x: &[Rational]) -> Vec<String> {
    x.iter().map(fmt_rational).collect()
}

fn id_seed(seed: u64, id: &str) -> u64 {
    // FNV-1a, stable across platforms and runs.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in id.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h ^ seed
}

/// Cell witnesses of `set` and of its complement, a scaled and a perturbed
/// copy of each, then random points until `min` points are reached.
fn sample_points(set: &SemiLinearSet, rng: &mut ChaCha8Rng, min: usize, cap: usize) -> Vec<Vec<Rational>> {
    let n = set.dim();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut push = |x: Vec<Rational>, out: &mut Vec<Vec<Rational>>| {
        if seen.insert(x.clone()) {
            out.push(x);
        }
    };
    let complement = set.complement();
    let mut bases = Vec::new();
    for s in [set, &complement] {
        bases.extend(s.cells().iter().take(cap).filter_map(|c| c.witness(n)));
    }
    for w in bases {
        let scaled: Vec<Rational> = w.iter().map(|v| v * int(3)).collect();
        let nudged: Vec<Rational> = w.iter().map(|v| v + rat(rng.gen_range(-2..=2), 3)).collect();
        push(w, &mut out);
        push(scaled, &mut out);
        push(nudged, &mut out);
    }
    let mut tries = 0;
    while out.len() < min && tries < 20 * min {
        tries += 1;
        // Integers first, then small fractions so low dimensions still reach `min`.
        let x: Vec<Rational> = if tries <= min {
            (0..n).map(|_| int(rng.gen_range(-5..=5))).collect()
        } else {
            (0..n).map(|_| rat(rng.gen_range(-12..=12), rng.gen_range(1..=4))).collect()
        };
        push(x, &mut out);
    }
    out
}

/// The program-level oracle: `u` is a member iff, after homogenizing and
/// projecting onto the real-spectrum subspace, every guard row is eventually
/// positive along the exact iterates.
struct SequenceOracle {
    rr: RealRestriction,
    spectrum: Vec<(Rational, usize)>,
    affine: bool,
}

impl SequenceOracle {
    fn new(p: &LoopProgram) -> Result<Self> {
        let (h, emb) = homogenize(p);
        let rr = real_spectrum_restriction(&h.a, &h.f)?;
        let spectrum = if rr.dim_r() == 0 { Vec::new() } else { rational_spectrum(&rr.a_r)? };
        Ok(SequenceOracle { rr, spectrum, affine: emb.appended_one })
    }

    fn lift(&self, u: &[Rational]) -> Vec<Rational> {
        let mut x = u.to_vec();
        if self.affine {
            x.push(Rational::one());
        }
        x
    }

    fn member(&self, u: &[Rational]) -> Result<bool> {
        if self.rr.dim_r() == 0 {
            return Ok(false);
        }
        let xr = self.rr.proj_r.mul_vec(&self.lift(u));
        for i in 0..self.rr.f_r.rows() {
            if !sequence_ant_with(&self.rr.a_r, &self.spectrum, self.rr.f_r.row(i), &xr)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The component of `u` along the real-spectrum subspace, in source
    /// coordinates.
    fn real_part(&self, u: &[Rational]) -> Vec<Rational> {
        let mut x = self.rr.embed.mul_vec(&self.rr.proj_r.mul_vec(&self.lift(u)));
        if self.affine {
            x.pop();
        }
        x
    }
}

fn regular_pairs(p: &LoopProgram) -> Result<Vec<SpectralData>> {
    let (h, _) = homogenize(p);
    let rr = real_spectrum_restriction(&h.a, &h.f)?;
    let mut out = Vec::new();
    for i in 0..rr.f_r.rows() {
        let fr = rr.f_r.row(i);
        if fr.iter().all(|v| v.is_zero()) {
            continue;
        }
        let red = degenerate_reduction(&rr.a_r, fr)?;
        if red.trace.n_a > 0 {
            out.push(red.spectral);
        }
    }
    Ok(out)
}

fn pairs_disjoint(spec: &SpectralData, out: &mut PropertyResult) -> Result<()> {
    let cells = regular_cells(spec)?;
    let all: Vec<_> = cells.all().collect();
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            let meet = a.cell.conjoin(&b.cell);
            out.expect(
                meet.is_none_or(|c| c.is_empty_real(spec.dim())),
                || format!("cells {} and {} intersect", a.label(), b.label()),
                None,
            );
        }
    }
    Ok(())
}

fn check_regular_pairs(
    p: &LoopProgram,
    cfg: &CheckConfig,
    rng: &mut ChaCha8Rng,
    props: &mut Vec<PropertyResult>,
) -> Result<(usize, usize)> {
    let mut oracle = PropertyResult::new("regular_oracle");
    let mut paths = PropertyResult::new("path_agreement");
    let mut disjoint = PropertyResult::new("disjointness");
    let (mut normal, mut regular) = (0, 0);
    for spec in regular_pairs(p)? {
        let (set, path, _) = regular_pair_ant(&spec)?;
        for x in sample_points(&set, rng, cfg.samples, cfg.witness_cap) {
            let (got, want) = (set.member(&x), point_ant(&spec, &x));
            oracle.expect(
                got == want,
                || format!("cells say {got}, dominance test says {want}"),
                Some(&x),
            );
        }
        match path {
            RowPath::Normal => {
                normal += 1;
                let (a, b) = (ant_normal(&spec)?, ant_regular(&spec)?);
                paths.expect(
                    set_equivalent(&a, &b)?,
                    || format!("normal {} differs from regular {}", to_text(&a), to_text(&b)),
                    None,
                );
            }
            _ => regular += 1,
        }
        pairs_disjoint(&spec, &mut disjoint)?;
    }
    props.extend([oracle, paths, disjoint]);
    Ok((normal, regular))
}

fn diff_witness(a: &SemiLinearSet, b: &SemiLinearSet) -> Option<Vec<Rational>> {
    a.difference(b).ok().and_then(|d| d.witness())
}

fn check_expected(rep: &AnalysisReport, expected: &str) -> PropertyResult {
    let mut out = PropertyResult::new("expected_locus");
    out.checked = 1;
    let want = match parse_locus(expected, &rep.params) {
        Ok(w) => w,
        Err(e) => {
            out.fail(format!("expected locus does not parse: {e}"));
            return out;
        }
    };
    let got = &rep.ant_set;
    if let Some(x) = diff_witness(got, &want) {
        out.failures.push(Failure {
            detail: format!("computed {} is not within expected {}", to_text(got), to_text(&want)),
            point: Some(show_point(&x)),
        });
    }
    if let Some(x) = diff_witness(&want, got) {
        out.failures.push(Failure {
            detail: format!("expected {} is not within computed {}", to_text(&want), to_text(got)),
            point: Some(show_point(&x)),
        });
    }
    out
}

fn is_homogeneous_class(p: &LoopProgram) -> bool {
    p.class_tag != ClassTag::Affine
}

fn check_points(
    p: &LoopProgram,
    rep: &AnalysisReport,
    cfg: &CheckConfig,
    rng: &mut ChaCha8Rng,
    props: &mut Vec<PropertyResult>,
) -> Result<()> {
    let set = &rep.ant_set;
    let oracle = SequenceOracle::new(p)?;
    let points = sample_points(set, rng, cfg.samples, cfg.witness_cap);
    let homogenized = if p.is_affine() { Some(analyze_with(&homogenize(p).0, opts(cfg))?) } else { None };

    let mut prog_oracle = PropertyResult::new("program_oracle");
    let mut complement = PropertyResult::new("complement_terminates");
    let mut tail = PropertyResult::new("positive_tail");
    let mut closure = PropertyResult::new("forward_closure");
    let mut cone = PropertyResult::new("cone");
    let mut embedding = PropertyResult::new("embedding");
    let scales = [rat(1, 3), rat(5, 2)];

    for u in &points {
        let member = set.member(u);
        let want = oracle.member(u)?;
        prog_oracle.expect(member == want, || format!("locus says {member}, iterate fit says {want}"), Some(u));
        if member {
            let xr = oracle.real_part(u);
            let status = check_ant_at_horizon(p, &xr, cfg.horizon)?;
            tail.expect(
                matches!(status, HorizonStatus::PositiveTail { .. }) && set.member(&xr),
                || format!("real-spectrum part gives {status:?}"),
                Some(&xr),
            );
            let next = p.step(u);
            closure.expect(set.member(&next), || "successor left the locus".into(), Some(u));
        } else {
            let violation = first_violation(p, u, cfg.horizon)?;
            complement.expect(
                violation.is_some(),
                || format!("no guard violation within {} steps", cfg.horizon),
                Some(u),
            );
        }
        if is_homogeneous_class(p) {
            for t in &scales {
                let scaled: Vec<Rational> = u.iter().map(|v| v * t).collect();
                cone.expect(
                    set.member(&scaled) == member,
                    || format!("membership changes under scaling by {}", fmt_rational(t)),
                    Some(u),
                );
            }
        }
        if let Some(h) = &homogenized {
            let mut lifted = u.clone();
            lifted.push(Rational::one());
            let hm = h.ant_set.member(&lifted);
            embedding.expect(hm == member, || format!("affine locus says {member}, homogenized says {hm}"), Some(u));
        }
    }
    props.extend([prog_oracle, complement, tail, closure, cone, embedding]);
    Ok(())
}

fn check_witnesses(rep: &AnalysisReport) -> PropertyResult {
    let mut out = PropertyResult::new("witness");
    if let Some(w) = &rep.witness {
        out.expect(rep.ant_set.member(w), || "witness is not in the locus".into(), Some(w));
    }
    out.expect(rep.witness.is_some() == !rep.ant_set.is_empty_real(), || "witness presence contradicts emptiness".into(), None);
    if let Some(w) = &rep.integer_witness {
        out.expect(
            rep.ant_set.member(w) && w.iter().all(|v| v.is_integer()),
            || "integer witness is not an integral member".into(),
            Some(w),
        );
    }
    out
}

fn opts(cfg: &CheckConfig) -> AnalyzeOptions {
    AnalyzeOptions { int_budget: cfg.int_budget }
}

/// Runs every property on one corpus entry.
pub fn check_entry(entry: &CorpusEntry, cfg: &CheckConfig) -> ProgramCheck {
    let p = &entry.program;
    let mut out = ProgramCheck {
        id: entry.id.clone(),
        class: p.class_tag.short().to_string(),
        n: p.n(),
        m: p.m(),
        verdict_real: None,
        normal_pairs: 0,
        regular_pairs: 0,
        properties: Vec::new(),
    };
    let mut analysis = PropertyResult::new("analysis");
    analysis.checked = 1;
    let rep = match analyze_with(p, opts(cfg)) {
        Ok(r) => r,
        Err(e) => {
            analysis.fail(format!("analysis failed: {e}"));
            out.properties.push(analysis);
            return out;
        }
    };
    out.properties.push(analysis);
    out.verdict_real = Some(format!("{:?}", rep.verdict_real));
    if let Some(expected) = &entry.expected_locus {
        out.properties.push(check_expected(&rep, expected));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(id_seed(cfg.seed, &entry.id));
    let run_all = |props: &mut Vec<PropertyResult>, rng: &mut ChaCha8Rng| -> Result<(usize, usize)> {
        let counts = check_regular_pairs(p, cfg, rng, props)?;
        check_points(p, &rep, cfg, rng, props)?;
        Ok(counts)
    };
    let mut props = Vec::new();
    match run_all(&mut props, &mut rng) {
        Ok((normal, regular)) => {
            out.normal_pairs = normal;
            out.regular_pairs = regular;
        }
        Err(e) => {
            let mut err = PropertyResult::new("internal");
            err.fail(format!("property evaluation failed: {e}"));
            props.push(err);
        }
    }
    out.properties.extend(props);
    out.properties.push(check_witnesses(&rep));
    out
}

/// Checks every entry; the result is in entry-id order.
pub fn check_corpus(entries: &[CorpusEntry], cfg: &CheckConfig) -> Vec<ProgramCheck> {
    let mut results: Vec<ProgramCheck> = entries.iter().map(|e| check_entry(e, cfg)).collect();
    results.sort_by(|a, b| a.id.cmp(&b.id));
    results
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::curated;

    fn entry(id: &str) -> CorpusEntry {
        curated().into_iter().find(|e| e.id == id).unwrap()
    }

    #[test]
    fn motivating_example_passes_every_property() {
        let r = check_entry(&entry("motivating"), &CheckConfig::default());
        assert!(r.passed(), "{}", r.to_text());
        assert!(r.property("program_oracle").unwrap().checked >= 50);
        assert!(r.property("regular_oracle").unwrap().checked >= 50);
    }

    #[test]
    fn corrupted_locus_fails_with_a_diff() {
        let mut e = entry("motivating");
        e.expected_locus = Some("[[u1<-u2+3*u3]]".into());
        let r = check_entry(&e, &CheckConfig::default());
        assert!(!r.passed());
        let f = &r.property("expected_locus").unwrap().failures;
        assert_eq!(f.len(), 1);
        assert!(f[0].detail.contains("is not within expected"));
        assert!(f[0].point.is_some());
    }

    #[test]
    fn affine_programs_check_the_embedding() {
        let r = check_entry(&entry("half-2d"), &CheckConfig::default());
        assert!(r.passed(), "{}", r.to_text());
        assert!(r.property("embedding").unwrap().checked > 0);
        assert_eq!(r.property("cone").unwrap().checked, 0);
    }

    #[test]
    fn seeds_are_stable_per_id() {
        assert_eq!(id_seed(1, "a"), id_seed(1, "a"));
        assert_ne!(id_seed(1, "a"), id_seed(1, "b"));
    }
}
