//! The analysis pipeline: from a loop to its ANT set, its complement (inputs
//! on which the loop terminates) and termination verdicts.
//!
//! Affine loops are homogenized, the update is restricted to its real
//! spectrum, each guard row is reduced to a regular pair and its ANT cells are
//! pulled back to source coordinates. The rows are intersected and, for
//! affine loops, sliced at the constant coordinate one.

pub mod normal;
pub mod oracle;
pub mod regular;

use num_traits::Zero;
use serde::Serialize;

use crate::arith::rational::{fmt_rational, serde_q};
use crate::arith::{QMatrix, Rational};
use crate::error::Result;
use crate::loopfront::{homogenize, ClassTag, LoopProgram};
use crate::semilinear::format::{to_json, to_text, SetJson};
use crate::semilinear::{default_names, Atom, IntFeasibility, SemiLinearSet};
use crate::spectra::{degenerate_reduction, real_spectrum_restriction, ReductionTrace, SpectralData};

pub use normal::{ant_normal, is_normal, is_normal_spectrum, normal_cells, NormalCell};
pub use oracle::{growth_polynomials, point_ant, sequence_ant, sequence_ant_with};
pub use regular::{ant_regular, regular_cells, CellKind, RegularCell, RegularCells};

/// Label attached to every emitted locus: atoms constrain only the
/// real-spectrum coordinates, the non-real part is left free.
pub const LOCUS_LABEL: &str = "ANT^r locus (projection convention)";

/// Default node budget for integer feasibility.
pub const DEFAULT_INT_BUDGET: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Real,
    Rational,
    Integer,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Terminating,
    NonTerminating,
    Unknown,
}

/// Which formula produced the cells of one guard row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowPath {
    /// The row vanishes on the real-spectrum subspace.
    ZeroRow,
    /// Only the invisible and nilpotent parts remain.
    NoRegularPart,
    Normal,
    Regular,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionTrace {
    pub row: usize,
    pub path: RowPath,
    pub reduction: Option<ReductionTrace>,
    /// Eigenvalues of the regular pair, basis order.
    #[serde(serialize_with = "ser_rationals")]
    pub regular_eigenvalues: Vec<Rational>,
    pub cells: Vec<String>,
    /// ANT set of the regular pair in its Jordan coordinates.
    pub regular_set: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisTrace {
    pub homogenized: bool,
    /// Dimension after homogenization.
    pub dim: usize,
    pub dim_r: usize,
    pub dim_nr: usize,
    pub real_eigenvalues: Vec<EigenEntry>,
    pub nonreal_factor: String,
    pub conditions: Vec<ConditionTrace>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenEntry {
    #[serde(with = "serde_q")]
    pub lambda: Rational,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub vars: Vec<String>,
    /// Names used in the sets, one per variable.
    pub params: Vec<String>,
    pub class: ClassTag,
    pub locus_label: &'static str,
    #[serde(serialize_with = "ser_set")]
    pub ant_set: SemiLinearSet,
    #[serde(serialize_with = "ser_set")]
    pub terminating_underapprox: SemiLinearSet,
    pub verdict_real: Verdict,
    pub verdict_rational: Verdict,
    pub verdict_integer: Verdict,
    pub integer_note: Option<String>,
    /// A rational ANT point on which the real-spectrum part carries everything.
    #[serde(with = "serde_q::opt_vec")]
    pub witness: Option<Vec<Rational>>,
    #[serde(with = "serde_q::opt_vec")]
    pub integer_witness: Option<Vec<Rational>>,
    pub trace: AnalysisTrace,
}

fn ser_set<S: serde::Serializer>(s: &SemiLinearSet, ser: S) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Out {
        text: String,
        #[serde(flatten)]
        json: SetJson,
    }
    Out { text: to_text(s), json: to_json(s) }.serialize(ser)
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], ser: S) -> std::result::Result<S::Ok, S::Error> {
    serde_q::vec::serialize(v, ser)
}

impl AnalysisReport {
    pub fn verdict(&self, domain: Domain) -> Verdict {
        match domain {
            Domain::Real => self.verdict_real,
            Domain::Rational => self.verdict_rational,
            Domain::Integer => self.verdict_integer,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// Plain-text block: parameter mapping, locus, complement and verdicts.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mapping: Vec<String> = self.params.iter().zip(&self.vars).map(|(u, v)| format!("{u} = {v}")).collect();
        out.push_str(&format!("Parameters: {}\n", mapping.join(", ")));
        out.push_str(&format!("Locus of ANT: {}\n", to_text(&self.ant_set)));
        if self.trace.dim_nr > 0 {
            out.push_str(&format!(
                "Note: {LOCUS_LABEL}; the {}-dimensional non-real part is unconstrained\n",
                self.trace.dim_nr
            ));
        }
        out.push_str(&format!("Terminating inputs (under-approximation): {}\n", to_text(&self.terminating_underapprox)));
        out.push_str(&format!("Verdict over R: {:?}\n", self.verdict_real));
        out.push_str(&format!("Verdict over Q: {:?}\n", self.verdict_rational));
        match &self.integer_note {
            Some(note) => out.push_str(&format!("Verdict over Z: {:?} ({note})\n", self.verdict_integer)),
            None => out.push_str(&format!("Verdict over Z: {:?}\n", self.verdict_integer)),
        }
        if let Some(w) = &self.witness {
            out.push_str(&format!("ANT witness: ({})\n", w.iter().map(fmt_rational).collect::<Vec<_>>().join(", ")));
        }
        if let Some(w) = &self.integer_witness {
            out.push_str(&format!(
                "Integer ANT witness: ({})\n",
                w.iter().map(fmt_rational).collect::<Vec<_>>().join(", ")
            ));
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
pub struct AnalyzeOptions {
    pub int_budget: usize,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions { int_budget: DEFAULT_INT_BUDGET }
    }
}

/// ANT set of a regular pair in its Jordan coordinates, with cell labels.
pub fn regular_pair_ant(spec: &SpectralData) -> Result<(SemiLinearSet, RowPath, Vec<String>)> {
    let ls: Vec<Rational> = spec.eigenvalues.iter().map(|(l, _)| l.clone()).collect();
    if is_normal_spectrum(&ls) {
        let cells = normal_cells(spec)?;
        let labels = cells.iter().map(|c| c.label()).collect();
        Ok((ant_normal(spec)?, RowPath::Normal, labels))
    } else {
        let cells = regular_cells(spec)?;
        let labels = cells.all().map(|c| c.label()).collect();
        Ok((ant_regular(spec)?, RowPath::Regular, labels))
    }
}

/// Runs the whole pipeline with default options.
pub fn analyze(p: &LoopProgram) -> Result<AnalysisReport> {
    analyze_with(p, AnalyzeOptions::default())
}

pub fn analyze_with(p: &LoopProgram, opts: AnalyzeOptions) -> Result<AnalysisReport> {
    let (h, emb) = homogenize(p);
    let n_h = h.n();
    let rr = real_spectrum_restriction(&h.a, &h.f)?;
    let r = rr.dim_r();

    // ANT^r inside E^r, one guard row at a time.
    let mut inner = SemiLinearSet::full(r);
    let mut conditions = Vec::with_capacity(h.m());
    for i in 0..h.m() {
        let fr = rr.f_r.row(i).to_vec();
        let (row_set, cond) = row_ant(&rr.a_r, &fr, i)?;
        conditions.push(cond);
        inner = inner.intersect(&row_set)?.pruned();
        if inner.is_trivially_empty() {
            // Later rows cannot add points; record them without work.
            for j in i + 1..h.m() {
                conditions.push(ConditionTrace {
                    row: j,
                    path: RowPath::ZeroRow,
                    reduction: None,
                    regular_eigenvalues: Vec::new(),
                    cells: Vec::new(),
                    regular_set: "skipped".into(),
                });
            }
            break;
        }
    }

    // Constant coordinate equal to one, seen from E^r.
    let inner_sliced = if emb.appended_one && r > 0 {
        let rho = rr.embed.row(n_h - 1).to_vec();
        inner.intersect(&SemiLinearSet::from_atoms(r, vec![Atom::eq(rho, -Rational::from_integer(1.into()))])?)?
    } else {
        inner.clone()
    };
    let witness = inner_sliced.witness().map(|y| {
        let mut x = rr.embed.mul_vec(&y);
        if emb.appended_one {
            x.pop();
        }
        x
    });

    let params = default_names("u", p.n());
    let locus_h = if r == 0 { SemiLinearSet::empty(n_h) } else { inner.preimage(&rr.proj_r)? };
    let locus = if emb.appended_one { locus_h.slice_last_coordinate()? } else { locus_h };
    let ant_set = locus.pruned().with_names(params.clone());
    let terminating_underapprox = ant_set.complement().with_names(params.clone());

    let real_empty = ant_set.is_empty_real();
    debug_assert_eq!(real_empty, witness.is_none());
    let verdict_real = if real_empty { Verdict::Terminating } else { Verdict::NonTerminating };
    let (verdict_integer, integer_note, integer_witness) = if real_empty {
        (Verdict::Terminating, None, None)
    } else if rr.dim_nr() > 0 {
        (
            Verdict::Unknown,
            Some(format!("non-real part of dimension {} is not analyzed over the integers", rr.dim_nr())),
            None,
        )
    } else {
        match ant_set.is_empty_integer(opts.int_budget) {
            IntFeasibility::Empty => (Verdict::Terminating, None, None),
            IntFeasibility::Unknown => (Verdict::Unknown, Some("integer search budget exhausted".into()), None),
            IntFeasibility::NonEmpty(x) => {
                if p.a.is_integral() && p.c.iter().all(|v| v.is_integer()) {
                    (Verdict::NonTerminating, None, Some(x))
                } else {
                    (
                        Verdict::Unknown,
                        Some("integer ANT point exists but the update is not integral".into()),
                        Some(x),
                    )
                }
            }
        }
    };

    let trace = AnalysisTrace {
        homogenized: emb.appended_one,
        dim: n_h,
        dim_r: r,
        dim_nr: rr.dim_nr(),
        real_eigenvalues: rr
            .eigenvalues
            .iter()
            .map(|(l, m)| EigenEntry { lambda: l.clone(), multiplicity: *m })
            .collect(),
        nonreal_factor: rr.nonreal_factor.to_string(),
        conditions,
    };
    Ok(AnalysisReport {
        vars: p.var_names.clone(),
        params,
        class: p.class_tag,
        locus_label: LOCUS_LABEL,
        ant_set,
        terminating_underapprox,
        verdict_real,
        verdict_rational: verdict_real,
        verdict_integer,
        integer_note,
        witness,
        integer_witness,
        trace,
    })
}

/// ANT set of `(A_r, f_r)` in `E^r` coordinates.
fn row_ant(a_r: &QMatrix, f_r: &[Rational], row: usize) -> Result<(SemiLinearSet, ConditionTrace)> {
    let r = a_r.rows();
    let mut cond = ConditionTrace {
        row,
        path: RowPath::ZeroRow,
        reduction: None,
        regular_eigenvalues: Vec::new(),
        cells: Vec::new(),
        regular_set: "empty".into(),
    };
    if f_r.iter().all(|v| v.is_zero()) {
        return Ok((SemiLinearSet::empty(r), cond));
    }
    let red = degenerate_reduction(a_r, f_r)?;
    cond.reduction = Some(red.trace.clone());
    if red.trace.n_a == 0 {
        cond.path = RowPath::NoRegularPart;
        return Ok((SemiLinearSet::empty(r), cond));
    }
    let (set, path, labels) = regular_pair_ant(&red.spectral)?;
    cond.path = path;
    cond.cells = labels;
    cond.regular_set = to_text(&set);
    cond.regular_eigenvalues = red.spectral.blocks.iter().map(|b| b.lambda.clone()).collect();
    Ok((set.preimage(&red.regular_projection())?, cond))
}

/// The verdict for one domain.
pub fn decide_termination(p: &LoopProgram, domain: Domain, budget: usize) -> Result<Verdict> {
    Ok(analyze_with(p, AnalyzeOptions { int_budget: budget })?.verdict(domain))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::int;
    use crate::loopfront::parse;

    #[test]
    fn zero_update_terminates() {
        let p = parse("while (x > 0) { x := 0x; }").unwrap();
        let rep = analyze(&p).unwrap();
        assert!(rep.ant_set.is_trivially_empty());
        assert_eq!(rep.verdict_real, Verdict::Terminating);
        assert_eq!(rep.verdict_integer, Verdict::Terminating);
    }

    #[test]
    fn doubling_is_ant_on_positive_inputs() {
        let p = parse("while (x > 0) { x := 2x; }").unwrap();
        let rep = analyze(&p).unwrap();
        assert!(rep.ant_set.member(&[int(1)]));
        assert!(!rep.ant_set.member(&[int(0)]));
        assert_eq!(rep.verdict_integer, Verdict::NonTerminating);
        assert!(rep.to_text().contains("Locus of ANT: [[0<u1]]"));
    }

    #[test]
    fn fixed_point_at_one_half() {
        let p = parse("while (x > 0 && 1 - x > 0) { x := 3x - 1; }").unwrap();
        let rep = analyze(&p).unwrap();
        assert_eq!(rep.verdict_rational, Verdict::NonTerminating);
        assert_eq!(rep.verdict_integer, Verdict::Terminating);
        assert!(rep.ant_set.member(&[Rational::new(1.into(), 2.into())]));
        assert_eq!(rep.witness, Some(vec![Rational::new(1.into(), 2.into())]));
    }

    #[test]
    fn rotation_alone_terminates() {
        let p = parse("while (x > 0) { x := x - y; y := x + y; }").unwrap();
        let rep = analyze(&p).unwrap();
        assert_eq!(rep.trace.dim_r, 0);
        assert_eq!(rep.verdict_real, Verdict::Terminating);
    }

    #[test]
    fn json_report_has_verdicts() {
        let p = parse("while (x > 0) { x := 2x; }").unwrap();
        let j = analyze(&p).unwrap().to_json();
        assert_eq!(j["verdict_real"], "NonTerminating");
        assert_eq!(j["ant_set"]["text"], "[[0<u1]]");
    }
}
