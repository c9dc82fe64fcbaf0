//! JSON instance files.
//!
//! ```json
//! { "n": 2,
//!   "polytopes": [[[0,0],[2,0]], [[0,0],[1,0],[0,1],[1,1]], [[0,0],[1,0],[0,1],[1,1]]],
//!   "generic_seed": 42 }
//! ```
//!
//! Instead of `generic_seed`, `sections` may list one array of
//! `{"point": [..], "value": "<decimal integer>"}` terms per polytope.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use toricodim::{OracleRequest, PolytopeFamily, SparseSection};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub point: Vec<i64>,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    pub polytopes: Vec<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sections: Option<Vec<Vec<Term>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generic_seed: Option<u64>,
}

/// A validated instance.
#[derive(Debug)]
pub struct Instance {
    pub family: PolytopeFamily,
    pub request: OracleRequest,
}

#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn field_error(field: impl fmt::Display, msg: impl fmt::Display) -> InputError {
    InputError(format!("field `{field}`: {msg}"))
}

impl InstanceFile {
    pub fn read(path: &Path) -> Result<Self, InputError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
    }

    /// Parses JSON; syntax and type errors carry line and column.
    pub fn parse(text: &str) -> Result<Self, InputError> {
        serde_json::from_str(text).map_err(|e| InputError(format!("invalid instance: {e}")))
    }

    pub fn validate(&self) -> Result<Instance, InputError> {
        let n = self.n;
        if n == 0 {
            return Err(field_error("n", "must be at least 1"));
        }
        if self.polytopes.len() != n + 1 {
            return Err(field_error(
                "polytopes",
                format!("expected {} polytopes for n = {n}, found {}", n + 1, self.polytopes.len()),
            ));
        }
        for (i, p) in self.polytopes.iter().enumerate() {
            if p.is_empty() {
                return Err(field_error(format!("polytopes[{i}]"), "needs at least one point"));
            }
            for (k, x) in p.iter().enumerate() {
                if x.len() != n {
                    return Err(field_error(
                        format!("polytopes[{i}][{k}]"),
                        format!("expected {n} coordinates, found {}", x.len()),
                    ));
                }
            }
        }
        let family = PolytopeFamily::from_points(n, self.polytopes.clone())
            .map_err(|e| field_error("polytopes", e))?;

        let request = match (&self.sections, self.generic_seed) {
            (Some(_), Some(_)) => {
                return Err(InputError(
                    "`sections` and `generic_seed` are mutually exclusive".into(),
                ))
            }
            (None, None) => OracleRequest::None,
            (None, Some(seed)) => OracleRequest::Generic { seed },
            (Some(sections), None) => OracleRequest::Explicit(self.explicit_sections(&family, sections)?),
        };
        Ok(Instance { family, request })
    }

    fn explicit_sections(
        &self,
        family: &PolytopeFamily,
        sections: &[Vec<Term>],
    ) -> Result<Vec<SparseSection>, InputError> {
        let n = self.n;
        if sections.len() != n + 1 {
            return Err(field_error(
                "sections",
                format!("expected {} sections, found {}", n + 1, sections.len()),
            ));
        }
        let mut out = Vec::with_capacity(n + 1);
        for (i, terms) in sections.iter().enumerate() {
            let member = &family.members()[i];
            let mut coefficients = Vec::with_capacity(terms.len());
            for (k, t) in terms.iter().enumerate() {
                let field = format!("sections[{i}][{k}]");
                if t.point.len() != n {
                    return Err(field_error(
                        format!("{field}.point"),
                        format!("expected {n} coordinates, found {}", t.point.len()),
                    ));
                }
                if !member.contains(&t.point) {
                    return Err(field_error(
                        format!("{field}.point"),
                        format!("{:?} lies outside polytope {i}", t.point),
                    ));
                }
                let value: BigInt = t.value.trim().parse().map_err(|_| {
                    field_error(format!("{field}.value"), format!("{:?} is not a decimal integer", t.value))
                })?;
                coefficients.push((t.point.clone(), value));
            }
            out.push(SparseSection::new(i, coefficients));
        }
        Ok(out)
    }

    /// Instance file for a family, with a generic seed.
    pub fn from_family(family: &PolytopeFamily, generic_seed: Option<u64>) -> Self {
        Self {
            n: family.n(),
            polytopes: family.members().iter().map(|m| m.vertices().to_vec()).collect(),
            sections: None,
            generic_seed,
        }
    }
}
