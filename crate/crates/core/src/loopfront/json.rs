//! JSON form of a loop: `{"vars", "A", "c", "F", "b"}` with rationals as
//! `"p/q"` strings. `c` and `b` default to zero.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::LoopProgram;
use crate::arith::rational::serde_q;
use crate::arith::{QMatrix, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProgramJson {
    #[serde(default)]
    pub vars: Option<Vec<String>>,
    #[serde(rename = "A", with = "serde_q::mat")]
    pub a: Vec<Vec<Rational>>,
    #[serde(default, with = "serde_q::opt_vec", skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<Rational>>,
    #[serde(rename = "F", with = "serde_q::mat")]
    pub f: Vec<Vec<Rational>>,
    #[serde(default, with = "serde_q::opt_vec", skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<Rational>>,
}

fn matrix(rows: Vec<Vec<Rational>>, what: &str) -> Result<QMatrix> {
    QMatrix::from_rows(rows).map_err(|e| Error::InvalidProgram(format!("{what}: {e}")))
}

impl ProgramJson {
    pub fn into_program(self) -> Result<LoopProgram> {
        let n = self.a.len();
        let m = self.f.len();
        let vars = self.vars.unwrap_or_else(|| (1..=n).map(|i| format!("x{i}")).collect());
        let a = if n == 0 { QMatrix::zeros(0, 0) } else { matrix(self.a, "A")? };
        let f = if m == 0 { QMatrix::zeros(0, n) } else { matrix(self.f, "F")? };
        let c = self.c.unwrap_or_else(|| vec![Rational::zero(); n]);
        let b = self.b.unwrap_or_else(|| vec![Rational::zero(); m]);
        LoopProgram::new(vars, a, c, f, b)
    }

    pub fn from_program(p: &LoopProgram) -> Self {
        ProgramJson {
            vars: Some(p.var_names.clone()),
            a: p.a.to_rows(),
            c: Some(p.c.clone()),
            f: p.f.to_rows(),
            b: Some(p.b.clone()),
        }
    }
}

pub fn program_from_json(text: &str) -> Result<LoopProgram> {
    let raw: ProgramJson = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    raw.into_program()
}

pub fn program_to_json(p: &LoopProgram) -> serde_json::Value {
    serde_json::to_value(ProgramJson::from_program(p)).expect("program serializes")
}
