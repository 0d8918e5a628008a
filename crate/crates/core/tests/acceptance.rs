//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! A criterion listed in `KNOWN_RED` is reported as FAIL with its reason and
//! does not fail the run; any other FAIL does. A known-red criterion that
//! starts passing is reported so the list can be updated.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use antloop::ant::normal::normal_cells;
use antloop::ant::{analyze, decide_termination, point_ant, regular_cells, Domain, RegularCell, Verdict};
use antloop::arith::rational::{int, rat};
use antloop::arith::{integer_solutions, QMatrix, Rational};
use antloop::check::{check_entry, summarize, CheckConfig};
use antloop::corpus::curated::{
    invisible_subspace, normal_program, HALF, HALF_2D, MOTIVATING, MOTIVATING_LOCUS, SHIFT, WITH_ROTATION,
};
use antloop::corpus::{generate, GenConfig};
use antloop::loopfront::{parse, parse_locus, ClassTag, LoopProgram};
use antloop::semilinear::format::to_text;
use antloop::semilinear::{default_names, set_equivalent, Atom, Cell, IntFeasibility, SemiLinearSet};
use antloop::simulate::first_violation;
use antloop::spectra::{degenerate_reduction, guard_power_row, k_subspace, spectral_data, SpectralData};

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

const KNOWN_RED: &[(u32, &str)] = &[(
    3,
    "eigenvalue 6 has two 1x1 Jordan blocks, where the per-coordinate formula is not exact",
)];

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|x| x.to_string())
}

fn equivalent(a: &SemiLinearSet, b: &SemiLinearSet) -> Result<bool, String> {
    e(set_equivalent(a, b))
}

fn ms(d: Duration) -> String {
    format!("{:.1} ms", d.as_secs_f64() * 1e3)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let rep = e(analyze(&e(parse(MOTIVATING))?))?;
    let elapsed = start.elapsed();
    let want = e(parse_locus(MOTIVATING_LOCUS, &default_names("u", 3)))?;
    ensure(equivalent(&rep.ant_set, &want)?, || format!("locus {}", to_text(&rep.ant_set)))?;
    ensure(rep.verdict_real == Verdict::NonTerminating && rep.verdict_rational == Verdict::NonTerminating, || {
        format!("verdicts {:?}/{:?}", rep.verdict_real, rep.verdict_rational)
    })?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {}", ms(elapsed)))?;
    Ok(format!("locus set-equivalent, NonTerminating over R and Q, {}", ms(elapsed)))
}

fn criterion_2() -> Outcome {
    let rep = e(analyze(&e(parse(WITH_ROTATION))?))?;
    for cell in rep.ant_set.cells() {
        for atom in cell.atoms() {
            ensure(atom.coeffs[0] == int(0) && atom.coeffs[1] == int(0), || {
                format!("an atom constrains the rotation variables: {}", to_text(&rep.ant_set))
            })?;
        }
    }
    let want = e(parse_locus(
        "[[u3<-u4+3*u5]]OR[[u3==-u4+3*u5,-u5<u4]]OR[[u3==4*u5,u4==-u5,0<u5]]",
        &default_names("u", 5),
    ))?;
    ensure(equivalent(&rep.ant_set, &want)?, || format!("locus {}", to_text(&rep.ant_set)))?;
    ensure(rep.trace.dim_nr == 2, || format!("non-real dimension {}", rep.trace.dim_nr))?;
    Ok("atoms use only u3,u4,u5; set-equivalent to the 3-variable locus; 2-dimensional rotation left free".into())
}

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

fn criterion_3() -> Outcome {
    let p = normal_program();
    let sd = e(spectral_data(&p.a, p.f.row(0)))?;
    // (λ, j, a_{λ,j}, row of P⁻¹).
    let printed = [
        (9, 1, rat(-29, 10), ints(&[0, 0, -5, -10, -10])),
        (5, 1, rat(-7, 4), ints(&[0, -2, 0, -4, 0])),
        (2, 1, rat(-7, 2), ints(&[-5, 0, 0, -5, -15])),
        (6, 1, rat(-5, 2), ints(&[6, 2, 5, 19, 25])),
        (6, 2, rat(-3, 4), ints(&[6, -2, 4, 8, 26])),
    ];
    let term = |l: i64, j: usize| -> Vec<Rational> {
        let (_, _, a, row) = printed.iter().find(|t| t.0 == l && t.1 == j).unwrap();
        row.iter().map(|r| r * a).collect()
    };
    for (l, j, a, row) in &printed {
        let i = sd.coord_index(&int(*l), *j).ok_or(format!("no coordinate ({l},{j})"))?;
        ensure(&sd.f_coeffs[i] == a, || format!("a_{{{l},{j}}} = {}", sd.f_coeffs[i]))?;
        ensure(sd.p_inv.row(i) == &row[..], || format!("P^-1 row ({l},{j}) differs"))?;
    }
    let cell = |eqs: &[Vec<Rational>], pos: Vec<Rational>| {
        let mut items: Vec<_> = eqs.iter().map(|v| Atom::eq(v.clone(), int(0))).collect();
        items.push(Atom::gt(pos, int(0)));
        Cell::from_normalized(items).unwrap()
    };
    let t = term;
    let formula = vec![
        cell(&[], t(9, 1)),
        cell(&[t(9, 1), t(6, 1), t(6, 2)], t(5, 1)),
        cell(&[t(9, 1), t(6, 1), t(6, 2), t(5, 1)], t(2, 1)),
        cell(&[t(9, 1), t(6, 2)], t(6, 1)),
        cell(&[t(9, 1)], t(6, 2)),
    ];
    let formula_set = e(SemiLinearSet::from_cells(5, formula))?;
    let cells = e(normal_cells(&sd))?;
    let ours = e(e(SemiLinearSet::from_cells(5, cells.into_iter().map(|c| c.cell).collect()))?.preimage(&sd.p_inv))?;
    ensure(equivalent(&ours, &formula_set)?, || "normal cells differ from the formula".into())?;

    let rep = e(analyze(&p))?;
    if equivalent(&rep.ant_set, &formula_set)? {
        return Ok("coefficients, P^-1 rows and final locus match".into());
    }
    // The formula union contains a_{6,1}x_{6,1} = -10, a_{6,2}x_{6,2} = 1,
    // where f(A^k u) = -9·6^k, and misses 2, -1.
    let at = |t61: i64, t62: i64| {
        let mut x = vec![int(0); 5];
        x[sd.coord_index(&int(6), 1).unwrap()] = int(t61) / rat(-5, 2);
        x[sd.coord_index(&int(6), 2).unwrap()] = int(t62) / rat(-3, 4);
        (sd.p.mul_vec(&x), x)
    };
    let (spurious, xs) = at(-10, 1);
    let (missed, xm) = at(2, -1);
    let spurious_confirmed = formula_set.member(&spurious)
        && !point_ant(&sd, &xs)
        && e(first_violation(&p, &spurious, 10))?.is_some()
        && !rep.ant_set.member(&spurious);
    let missed_confirmed = !formula_set.member(&missed) && point_ant(&sd, &xm) && rep.ant_set.member(&missed);
    ensure(spurious_confirmed && missed_confirmed, || "final locus differs from the formula for another reason".into())?;
    Err(format!(
        "a-values, P^-1 rows and the five formula cells are exact, but the final locus is the exact ANT set {} \
         and not the formula union: the union contains the terminating point ({}) and misses the ANT point ({})",
        to_text(&rep.ant_set),
        spurious.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "),
        missed.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
    ))
}

fn criterion_4() -> Outcome {
    let p = e(parse(SHIFT))?;
    let start = Instant::now();
    let rep = e(analyze(&p))?;
    let elapsed = start.elapsed();
    let names = default_names("u", 2);
    ensure(equivalent(&rep.ant_set, &e(parse_locus("[[u1<0]]OR[[u1==0]]", &names))?)?, || {
        format!("locus {}", to_text(&rep.ant_set))
    })?;
    ensure(equivalent(&rep.terminating_underapprox, &e(parse_locus("[[0<u1]]", &names))?)?, || {
        format!("complement {}", to_text(&rep.terminating_underapprox))
    })?;
    ensure(elapsed < Duration::from_millis(100), || format!("took {}", ms(elapsed)))?;
    Ok(format!("locus {{u1<0}} or {{u1=0}}, complement {{u1>0}}, {}", ms(elapsed)))
}

fn running_system() -> SpectralData {
    let t = QMatrix::from_i64(&[
        [1, 1, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0],
        [0, 0, -1, -1, 0, 0],
        [0, 0, 0, -1, 0, 0],
        [0, 0, 0, 0, 2, 0],
        [0, 0, 0, 0, 0, -2],
    ]);
    SpectralData::from_modified_jordan(&t, &vec![int(1); 6]).unwrap()
}

fn criterion_5() -> Outcome {
    let names: Vec<String> = ["x11", "x12", "y11", "y12", "x21", "y21"].iter().map(|s| s.to_string()).collect();
    let cells = e(regular_cells(&running_system()))?;
    ensure(cells.s.len() == 5 && cells.u.len() == 2 && cells.v.len() == 2, || {
        format!("{} S, {} U, {} V cells", cells.s.len(), cells.u.len(), cells.v.len())
    })?;
    // Printed constraints, with S^1_{1,0} given its missing x12 - y12 = 0 and
    // the repeated V cell replaced by V^{2,1}_{0,0}.
    let expected = [
        ("S^2_{0,0}", "[[x21+y21>0, x21-y21>0]]"),
        ("S^1_{0,0}", "[[x21==0, y21==0, x12+y12==0, x12-y12==0, x11+x12+y11+y12>0, x11+x12-y11-y12>0]]"),
        ("S^1_{0,1}", "[[x21==0, y21==0, x12+y12==0, x11+x12+y11+y12>0, x12-y12>0]]"),
        ("S^1_{1,0}", "[[x21==0, y21==0, x12+y12>0, x12-y12==0, x11+x12-y11-y12>0]]"),
        ("S^1_{1,1}", "[[x21==0, y21==0, x12+y12>0, x12-y12>0]]"),
        ("U^{2,1}_{0,0}", "[[x21-y21==0, x12-y12==0, x21>0, x11+x12-y11-y12>0]]"),
        ("U^{2,1}_{0,1}", "[[x21-y21==0, x21>0, x12-y12>0]]"),
        ("V^{2,1}_{0,0}", "[[x21+y21==0, x12+y12==0, x21>0, x11+x12+y11+y12>0]]"),
        ("V^{2,1}_{0,1}", "[[x21+y21==0, x21>0, x12+y12>0]]"),
    ];
    let all: Vec<&RegularCell> = cells.all().collect();
    for (label, text) in expected {
        let c = all.iter().find(|c| c.label() == label).ok_or(format!("no cell {label}"))?;
        let got = e(SemiLinearSet::from_cells(6, vec![c.cell.clone()]))?;
        ensure(equivalent(&got, &e(parse_locus(text, &names))?)?, || format!("{label} differs"))?;
    }
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            let empty = a.cell.conjoin(&b.cell).is_none_or(|c| c.is_empty_real(6));
            ensure(empty, || format!("{} meets {}", a.label(), b.label()))?;
        }
    }
    Ok("5 S, 2 U, 2 V cells, each set-equivalent to its printed constraints; pairwise disjoint".into())
}

fn criterion_6() -> Outcome {
    let p = invisible_subspace();
    let f = p.f.row(0).to_vec();
    let parallel = |u: &[Rational], v: &[Rational]| QMatrix::from_rows(vec![u.to_vec(), v.to_vec()]).unwrap().rank() == 1;
    let spanning = ints(&[1, 2, 3, 4, 6, 4, 3, 2]);
    let k = e(k_subspace(&p.a, &f))?;
    ensure(k.len() == 1 && parallel(&k[0], &spanning), || format!("K has dimension {}", k.len()))?;
    let red = e(degenerate_reduction(&p.a, &f))?;
    ensure(parallel(&red.trace.r.col(0), &spanning), || "first column of R is not in K".into())?;
    ensure(red.w == ints(&[0, 1, 1, 1, 1, 1, 1, 1]), || format!("w = {:?}", red.w))?;
    ensure(red.t_a == running_system().jordan && red.w_a == vec![int(1); 6], || "reduced system differs".into())?;
    Ok("dim K = 1 along R's first column, w = (0,1,1,1,1,1,1,1), reduced pair equals the running example".into())
}

fn criterion_7() -> Outcome {
    let corpus = generate(&GenConfig {
        n_min: 3,
        n_max: 6,
        m_min: 1,
        m_max: 3,
        classes: vec![ClassTag::Homogeneous, ClassTag::GeneralizedHomogeneous, ClassTag::Affine],
        count: 100,
        seed: 42,
    });
    let cfg = CheckConfig::default();
    let start = Instant::now();
    let results: Vec<_> = corpus.entries.iter().map(|en| check_entry(en, &cfg)).collect();
    let elapsed = start.elapsed();
    for r in &results {
        ensure(r.passed(), || r.to_text())?;
        let prog = r.property("program_oracle").map_or(0, |p| p.checked);
        let pairs = r.normal_pairs + r.regular_pairs;
        let reg = r.property("regular_oracle").map_or(0, |p| p.checked);
        ensure(prog >= cfg.samples && reg >= cfg.samples * pairs, || {
            format!("{}: only {prog} program and {reg} pair oracle points", r.id)
        })?;
    }
    let s = summarize(&results);
    let count = |name: &str| s.checked.iter().find(|(n, _)| n == name).map_or(0, |(_, c)| *c);
    for name in ["complement_terminates", "forward_closure", "cone", "path_agreement", "embedding"] {
        ensure(count(name) > 0, || format!("{name} was never exercised"))?;
    }
    ensure(elapsed < Duration::from_secs(300), || format!("took {:.1} s", elapsed.as_secs_f64()))?;
    Ok(format!(
        "100 programs ({} terminating, {} not), 0 mismatches: {} pair and {} program oracle points, \
         {} complement runs to K={}, {} closure, {} cone, {} normal pairs agreeing, {} embedding checks; {:.1} s",
        s.terminating,
        s.nonterminating,
        count("regular_oracle"),
        count("program_oracle"),
        count("complement_terminates"),
        cfg.horizon,
        count("forward_closure"),
        count("cone"),
        count("path_agreement"),
        count("embedding"),
        elapsed.as_secs_f64()
    ))
}

/// Every integer point of `[-10, 10]^n`, scanned for a run that survives
/// `horizon` steps.
fn grid_survivors(p: &LoopProgram, horizon: usize) -> Result<usize, String> {
    let n = p.n();
    let mut survivors = 0;
    for code in 0..21usize.pow(n as u32) {
        let mut c = code;
        let x: Vec<Rational> = (0..n)
            .map(|_| {
                let v = (c % 21) as i64 - 10;
                c /= 21;
                int(v)
            })
            .collect();
        if e(first_violation(p, &x, horizon))?.is_none() {
            survivors += 1;
        }
    }
    Ok(survivors)
}

fn criterion_8() -> Outcome {
    let mut notes = Vec::new();
    for src in [HALF, HALF_2D] {
        let p = e(parse(src))?;
        let rep = e(analyze(&p))?;
        ensure(rep.verdict_rational == Verdict::NonTerminating && rep.verdict_integer == Verdict::Terminating, || {
            format!("verdicts {:?} over Q, {:?} over Z", rep.verdict_rational, rep.verdict_integer)
        })?;
        let survivors = grid_survivors(&p, 500)?;
        ensure(survivors == 0, || format!("{survivors} integer points survive 500 steps"))?;
        notes.push(format!("n={} grid has no survivor", p.n()));
    }
    // An integral loop with integer ANT points: the grid scan must find them.
    let p = e(parse("while (x - y > 0) { x := 2x; y := y; }"))?;
    ensure(e(decide_termination(&p, Domain::Integer, 200_000))? == Verdict::NonTerminating, || "integral loop not NonTerminating over Z".into())?;
    ensure(grid_survivors(&p, 500)? > 0, || "grid scan found no survivor of an integer-NonTerminating loop".into())?;
    // {2x = 1}: the Hermite form shows there is no integer solution.
    let half = e(parse(HALF))?;
    let rep = e(analyze(&half))?;
    let lattice = e(integer_solutions(&QMatrix::from_i64(&[[2]]), &[int(1)]))?;
    ensure(lattice.is_none(), || "2x = 1 has an integer solution".into())?;
    ensure(matches!(rep.ant_set.is_empty_integer(1000), IntFeasibility::Empty), || "integer emptiness not detected".into())?;
    ensure(e(decide_termination(&half, Domain::Integer, 200_000))? == Verdict::Terminating, || "not Terminating over Z".into())?;
    Ok(format!(
        "Q NonTerminating vs Z Terminating on the fixed point 1/2; {}; an integral loop's survivors are found; \
         2x = 1 lattice-infeasible, Terminating over Z",
        notes.join(", ")
    ))
}

fn criterion_9() -> Outcome {
    let corpus = generate(&GenConfig { n_min: 3, n_max: 6, count: 20, seed: 9, ..GenConfig::default() });
    let (mut reduced, mut direct) = (0, 0);
    for en in &corpus.entries {
        let (a, f) = (&en.program.a, en.program.f.row(0).to_vec());
        let red = e(degenerate_reduction(a, &f))?;
        if red.trace.n_a > 0 {
            let mut wt = red.w_a.clone();
            for k in 0..=15u32 {
                ensure(guard_power_row(&red.spectral, k) == wt, || format!("{}: reduced pair differs at k={k}", en.id))?;
                wt = red.t_a.vec_mul(&wt);
                reduced += 1;
            }
        }
        // The full basis needs a spectrum without zero.
        if let Ok(sd) = spectral_data(a, &f) {
            let mut fa = f.clone();
            for k in 0..=15u32 {
                ensure(guard_power_row(&sd, k) == sd.p.vec_mul(&fa), || format!("{}: f A^k P differs at k={k}", en.id))?;
                fa = a.vec_mul(&fa);
                direct += 1;
            }
        }
    }
    Ok(format!(
        "20 homogeneous programs, k = 0..15: {reduced} comparisons with w T^k and {direct} with f A^k P, all exact"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (1, "motivating example", criterion_1),
        (2, "rotation block", criterion_2),
        (3, "normal five-variable example", criterion_3),
        (4, "shift loop", criterion_4),
        (5, "running example cells", criterion_5),
        (6, "eight-variable reduction", criterion_6),
        (7, "property suite on 100 random programs", criterion_7),
        (8, "integer domain", criterion_8),
        (9, "closed-form guard powers", criterion_9),
    ];
    let mut unexpected = 0;
    for (id, title, run) in criteria {
        let known = KNOWN_RED.iter().find(|(k, _)| *k == id);
        match run() {
            Ok(detail) => {
                println!("PASS criterion {id} ({title}): {detail}");
                if known.is_some() {
                    println!("     criterion {id} is listed as a known deviation but now passes");
                }
            }
            Err(detail) => {
                match known {
                    Some((_, why)) => println!("FAIL criterion {id} ({title}) [known deviation: {why}]: {detail}"),
                    None => {
                        unexpected += 1;
                        println!("FAIL criterion {id} ({title}): {detail}");
                    }
                }
            }
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
