//! The worked loops, with their loci where they are known in closed form.

use super::CorpusEntry;
use crate::arith::rational::{int, rat};
use crate::arith::{QMatrix, Rational};
use crate::loopfront::{parse, LoopProgram};

pub const MOTIVATING: &str = "while (x - 1/2y - 2z > 0) {
  x := -20x - 9y + 75z;
  y := -7/20x + 97/20y + 21/4z;
  z := 35/97x + 3/97y - 40/97z;
}";

pub const MOTIVATING_LOCUS: &str = "[[u1<-u2+3*u3]]OR[[u1==-u2+3*u3,-u3<u2]]OR[[u1==4*u3,u2==-u3,0<u3]]";

pub const WITH_ROTATION: &str = "while (3t + 7s + x - 1/2y - 2z > 0) {
  t := t - s;
  s := t + 2s;
  x := -20x - 9y + 75z;
  y := -7/20x + 97/20y + 21/4z;
  z := 35/97x + 3/97y - 40/97z;
}";

pub const SHIFT: &str = "while (-x > -2^(30)) { x := 2x; y := y + 1; }";

/// Fixed point `1/2`: non-terminating over ℚ, terminating over ℤ.
pub const HALF: &str = "while (x > 0 && 1 - x > 0) { x := 3x - 1; }";

pub const HALF_2D: &str = "while (x > 0, 1 - x > 0, y > 0) { x := 3x - 1; y := 2y; }";

/// The running example's locus over `(x11, x12, y11, y12, x21, y21)`.
pub const RUNNING_LOCUS: &str = "[[-u6<u5,u6<u5]]\
OR[[u2==0,u4==0,u5==0,u6==0,-u3<u1,u3<u1]]\
OR[[u2==-u4,u5==0,u6==0,-u3<u1,u4<0]]\
OR[[u5==0,u6==0,u2==u4,u3<u1,-u4<u2]]\
OR[[u5==0,u6==0,-u4<u2,u4<u2]]\
OR[[u2==u4,u5==u6,u3<u1,0<u6]]\
OR[[u5==u6,u4<u2,0<u6]]\
OR[[u2==-u4,u5==-u6,-u3<u1,u6<0]]\
OR[[u5==-u6,-u4<u2,u6<0]]";

fn homogeneous(a: QMatrix, f: Vec<Rational>, prefix: &str) -> LoopProgram {
    let n = a.rows();
    let names = (1..=n).map(|i| format!("{prefix}{i}")).collect();
    LoopProgram::new(names, a, vec![int(0); n], QMatrix::row_vector(f), vec![int(0)]).expect("consistent dimensions")
}

pub fn running_example() -> LoopProgram {
    let t = QMatrix::from_i64(&[
        [1, 1, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0],
        [0, 0, -1, -1, 0, 0],
        [0, 0, 0, -1, 0, 0],
        [0, 0, 0, 0, 2, 0],
        [0, 0, 0, 0, 0, -2],
    ]);
    homogeneous(t, vec![int(1); 6], "x")
}

/// Eight variables with a one-dimensional guard-invisible subspace and a
/// nilpotent direction; reduces to the running example.
pub fn invisible_subspace() -> LoopProgram {
    let a = QMatrix::from_i64(&[
        [1, 0, 0, 0, 0, 0, 0, 0],
        [2, 0, 0, 0, 0, 0, 0, 0],
        [6, -2, -1, 1, 0, 0, 0, 0],
        [10, -3, -4, 3, 0, 0, 0, 0],
        [30, -15, -6, 7, 0, -1, 0, 0],
        [44, -28, -6, 9, 1, -2, 0, 0],
        [90, -55, -9, 12, 4, -7, 2, 0],
        [57, -19, -9, 1, 5, -8, 4, -2],
    ]);
    homogeneous(a, [-1, -2, 1, 0, 0, 0, 0, 1].iter().map(|&v| int(v)).collect(), "x")
}

/// Spectrum `{9, 5, 2, 6, 6}`, no eigenvalue opposite another.
pub fn normal_program() -> LoopProgram {
    let a = QMatrix::from_i64(&[
        [26, 2, -15, -6, 30],
        [24, 3, -12, -6, 48],
        [32, 0, -9, 2, 66],
        [-12, 1, 6, 8, -24],
        [-4, -1, 3, 0, 0],
    ]);
    homogeneous(a, vec![int(-2), int(0), int(-1), int(0), rat(-1, 2)], "x")
}

fn entry(id: &str, program: LoopProgram, locus: Option<&str>) -> CorpusEntry {
    CorpusEntry { id: id.to_string(), program, expected_locus: locus.map(str::to_string) }
}

fn dsl(id: &str, src: &str, locus: Option<&str>) -> CorpusEntry {
    entry(id, parse(src).expect("curated sources parse"), locus)
}

/// The curated regression corpus.
pub fn curated() -> Vec<CorpusEntry> {
    vec![
        dsl("motivating", MOTIVATING, Some(MOTIVATING_LOCUS)),
        dsl(
            "rotation",
            WITH_ROTATION,
            Some("[[u3<-u4+3*u5]]OR[[u3==-u4+3*u5,-u5<u4]]OR[[u3==4*u5,u4==-u5,0<u5]]"),
        ),
        dsl("shift", SHIFT, Some("[[u1<0]]OR[[u1==0]]")),
        entry("running", running_example(), Some(RUNNING_LOCUS)),
        entry("invisible", invisible_subspace(), None),
        entry("normal", normal_program(), None),
        dsl("negation", "while (x > 0) { x := -x; }", Some("empty")),
        dsl("zero-update", "while (x > 0) { x := 0; }", Some("empty")),
        dsl("half", HALF, Some("[[u1==1/2]]")),
        dsl("half-2d", HALF_2D, Some("[[u1==1/2,0<u2]]")),
        dsl("affine-walk", "while (x + y > 1) { x := x + y; y := y + 1; }", Some("[[true]]")),
    ]
}
