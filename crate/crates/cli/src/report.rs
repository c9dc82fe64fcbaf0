//! Serializable reports. JSON output goes through `serde_json::Value`, whose
//! maps are ordered, so keys come out sorted and bytes are reproducible.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use toricodim::codim::{BigNefCase, OracleRun, RestrictDelta};
use toricodim::toric::{critical_degree, family_fan};
use toricodim::{CodimReport, OracleRequest, PolytopeFamily, Verdict};

pub const TOOL_NAME: &str = "toricodim";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tool {
    pub name: String,
    pub version: String,
}

impl Tool {
    pub fn current() -> Self {
        Self {
            name: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Member {
    pub vertices: Vec<Vec<i64>>,
    pub dim: usize,
    pub lstar: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalDegree {
    pub rays: Vec<Vec<i64>>,
    pub coefficients: Vec<i64>,
    pub dim_s_rho: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModularRank {
    pub prime: u64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attempt {
    pub seed: Option<u64>,
    pub dim_s_rho: usize,
    pub rank: usize,
    pub codim: u64,
    pub modular_ranks: Vec<ModularRank>,
    pub rank_check_agrees: bool,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Oracle {
    /// `generic` or `explicit`.
    pub kind: String,
    pub value: u64,
    pub reseeds: usize,
    pub attempts: Vec<Attempt>,
}

impl Oracle {
    fn new(run: &OracleRun, kind: &str) -> Self {
        Self {
            kind: kind.into(),
            value: run.value(),
            reseeds: run.reseeds(),
            attempts: run
                .attempts
                .iter()
                .map(|a| Attempt {
                    seed: a.seed,
                    dim_s_rho: a.dim_s_rho,
                    rank: a.rank,
                    codim: a.codim,
                    modular_ranks: a
                        .rank_check
                        .modular
                        .iter()
                        .map(|&(prime, rank)| ModularRank { prime, rank })
                        .collect(),
                    rank_check_agrees: a.rank_check.agrees(),
                    consistent: a.consistent,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BigNef {
    /// `full-dim` or `surface`.
    pub case: String,
    pub value: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub analysis_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub tool: Tool,
    pub n: usize,
    pub members: Vec<Member>,
    pub essential: bool,
    /// First `J` with `dim(Delta_J) < |J|`.
    pub essential_violator: Option<Vec<usize>>,
    pub lstar_total: u64,
    pub critical_degree: Option<CriticalDegree>,
    pub lower: Option<u64>,
    pub upper: Option<u64>,
    pub formula_applicable: bool,
    pub abc_violators: Vec<Vec<usize>>,
    pub formula_value: Option<u64>,
    pub bignef: Option<BigNef>,
    /// `holds`, `fails` or `not-applicable`.
    pub restrictdelta: String,
    pub restrictdelta_ok: bool,
    pub genfor_value: Option<i64>,
    /// `e1_table[p][q] = dim E_1^{p,q}`.
    pub e1_table: Option<Vec<Vec<u64>>>,
    pub oracle_seed: Option<u64>,
    pub oracle: Option<Oracle>,
    pub oracle_value: Option<u64>,
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

pub fn bignef_name(case: BigNefCase) -> &'static str {
    match case {
        BigNefCase::FullDimensional => "full-dim",
        BigNefCase::Surface => "surface",
    }
}

fn restrictdelta_name(r: RestrictDelta) -> &'static str {
    match r {
        RestrictDelta::Holds => "holds",
        RestrictDelta::Fails => "fails",
        RestrictDelta::NotApplicable => "not-applicable",
    }
}

fn critical_degree_of(family: &PolytopeFamily) -> toricodim::Result<Option<CriticalDegree>> {
    if !family.total_sum()?.is_full_dimensional() {
        return Ok(None);
    }
    let fan = family_fan(family)?;
    let rho = critical_degree(family, &fan)?;
    Ok(Some(CriticalDegree {
        rays: fan.rays().to_vec(),
        coefficients: rho.coeffs().to_vec(),
        dim_s_rho: rho.graded_basis()?.dim(),
    }))
}

impl AnalysisReport {
    pub fn new(
        family: &PolytopeFamily,
        request: &OracleRequest,
        r: &CodimReport,
    ) -> toricodim::Result<Self> {
        let kind = match request {
            OracleRequest::Explicit(_) => "explicit",
            _ => "generic",
        };
        Ok(Self {
            tool: Tool::current(),
            n: r.n,
            members: family
                .members()
                .iter()
                .zip(r.member_dims.iter().zip(&r.member_lstars))
                .map(|(m, (&dim, &lstar))| Member {
                    vertices: m.vertices().to_vec(),
                    dim,
                    lstar,
                })
                .collect(),
            essential: r.essential.essential(),
            essential_violator: r.essential.violating_subset.clone(),
            lstar_total: r.lstar_total,
            critical_degree: critical_degree_of(family)?,
            lower: r.bounds.map(|b| b.lower),
            upper: r.bounds.map(|b| b.upper),
            formula_applicable: r.abc.as_ref().is_some_and(|a| a.applicable),
            abc_violators: r.abc.as_ref().map(|a| a.violators.clone()).unwrap_or_default(),
            formula_value: r.formula_value,
            bignef: r.bignef.map(|(case, value)| BigNef {
                case: bignef_name(case).into(),
                value,
            }),
            restrictdelta: restrictdelta_name(r.restrictdelta).into(),
            restrictdelta_ok: r.restrictdelta == RestrictDelta::Holds,
            genfor_value: r.genfor_value,
            e1_table: r.e1.as_ref().map(|t| t.entries.clone()),
            oracle_seed: match request {
                OracleRequest::Generic { seed } => Some(*seed),
                _ => None,
            },
            oracle: r.oracle.as_ref().map(|run| Oracle::new(run, kind)),
            oracle_value: r.oracle_value(),
            verdict: r.verdict.as_str().into(),
            timing: None,
        })
    }

    pub fn verdict(&self) -> Verdict {
        self.verdict.parse().expect("verdict written by this tool")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trial {
    pub trial: usize,
    pub seed: u64,
    pub oracle_value: u64,
    pub reseeds: usize,
    pub attempt_values: Vec<u64>,
    pub rank_checks_agree: bool,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub tool: Tool,
    pub n: usize,
    pub seed: u64,
    pub trials: usize,
    pub lower: u64,
    pub upper: u64,
    pub formula_value: Option<u64>,
    pub genfor_value: Option<i64>,
    pub results: Vec<Trial>,
    pub failing_seeds: Vec<u64>,
    pub verdict: String,
}

/// Sorted-key, pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("reports serialize");
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}

fn opt<T: std::fmt::Display>(x: &Option<T>) -> String {
    x.as_ref().map_or_else(|| "n/a".into(), |v| v.to_string())
}

fn subset(j: &[usize]) -> String {
    let items: Vec<String> = j.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

pub fn e1_text(n: usize, table: &[Vec<u64>]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "E1 table (dim E_1^{{p,q}}; rows q = {n}..0, columns p = 0..{})", n + 1);
    let width = table.iter().flatten().map(|x| x.to_string().len()).max().unwrap_or(1);
    for q in (0..=n).rev() {
        let row: Vec<String> = (0..=n + 1)
            .map(|p| format!("{:>width$}", table[p][q]))
            .collect();
        let _ = writeln!(out, "  q={q}: {}", row.join(" "));
    }
    out
}

impl AnalysisReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(w, "family in dimension n = {} ({} polytopes)", self.n, self.n + 1);
        for (i, m) in self.members.iter().enumerate() {
            let _ = writeln!(w, "  Delta_{i}: dim {}, l* {}, vertices {:?}", m.dim, m.lstar, m.vertices);
        }
        match &self.essential_violator {
            None => {
                let _ = writeln!(w, "essential: yes");
            }
            Some(j) => {
                let _ = writeln!(w, "essential: no (J = {} has dim(Delta_J) < |J|)", subset(j));
            }
        }
        let _ = writeln!(w, "l*(Delta_0 + ... + Delta_n) = {}", self.lstar_total);
        if let Some(c) = &self.critical_degree {
            let _ = writeln!(
                w,
                "critical degree: rho = sum_j a_j D_j with a = {:?} on rays {:?}; dim S_rho = {}",
                c.coefficients, c.rays, c.dim_s_rho
            );
        }
        if let (Some(lo), Some(hi)) = (self.lower, self.upper) {
            let _ = writeln!(w, "bounds: {lo} <= dim (S/I)_rho <= {hi}");
            if self.formula_applicable {
                let _ = writeln!(w, "conditions (a)/(b)/(c): hold; formula = {}", opt(&self.formula_value));
            } else {
                let js: Vec<String> = self.abc_violators.iter().map(|j| subset(j)).collect();
                let _ = writeln!(w, "conditions (a)/(b)/(c): fail for J in {}", js.join(", "));
            }
        } else {
            let _ = writeln!(w, "bounds and formulas: not applicable (family not essential)");
        }
        match &self.bignef {
            Some(b) => {
                let _ = writeln!(w, "big and nef case: {}, value {}", b.case, b.value);
            }
            None => {
                let _ = writeln!(w, "big and nef case: none");
            }
        }
        let _ = writeln!(w, "member dimensions in {{1, n-1, n}}: {}", self.restrictdelta);
        let _ = writeln!(w, "generalized formula: {}", opt(&self.genfor_value));
        if let Some(t) = &self.e1_table {
            out.push_str(&e1_text(self.n, t));
        }
        let w = &mut out;
        match &self.oracle {
            Some(o) => {
                let last = o.attempts.last().expect("nonempty");
                let _ = writeln!(
                    w,
                    "oracle ({}): dim (S/I)_rho = {} (dim S_rho {}, rank {}), reseeds {}, rank cross-check {}",
                    o.kind,
                    o.value,
                    last.dim_s_rho,
                    last.rank,
                    o.reseeds,
                    if o.attempts.iter().all(|a| a.rank_check_agrees) { "ok" } else { "FAILED" }
                );
            }
            None => {
                let _ = writeln!(w, "oracle: not run");
            }
        }
        let _ = writeln!(w, "verdict: {}", self.verdict);
        if let Some(t) = &self.timing {
            let _ = writeln!(w, "analysis time: {:.3} ms", t.analysis_ms);
        }
        out
    }
}

impl VerifyReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(
            w,
            "verify: n = {}, {} trials from seed {}; bounds [{}, {}], formula {}, generalized formula {}",
            self.n,
            self.trials,
            self.seed,
            self.lower,
            self.upper,
            opt(&self.formula_value),
            opt(&self.genfor_value)
        );
        for t in &self.results {
            let _ = writeln!(
                w,
                "  trial {} (seed {}): oracle {}, reseeds {}, {}",
                t.trial, t.seed, t.oracle_value, t.reseeds, t.verdict
            );
        }
        if !self.failing_seeds.is_empty() {
            let _ = writeln!(w, "failing seeds: {:?}", self.failing_seeds);
        }
        let _ = writeln!(w, "verdict: {}", self.verdict);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use toricodim::codim::analyze;

    fn square() -> Vec<Vec<i64>> {
        vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]
    }

    #[test]
    fn json_round_trips_with_sorted_keys() {
        let family =
            PolytopeFamily::from_points(2, vec![vec![vec![0, 0], vec![2, 0]], square(), square()])
                .unwrap();
        let request = OracleRequest::Generic { seed: 42 };
        let r = analyze(&family, &request).unwrap();
        let report = AnalysisReport::new(&family, &request, &r).unwrap();
        let json = to_json(&report);
        let back: AnalysisReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        assert_eq!(to_json(&back), json);

        let keys: Vec<String> = serde_json::from_str::<serde_json::Value>(&json)
            .unwrap()
            .as_object()
            .unwrap()
            .keys()
            .cloned()
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert!(json.find("\"abc_violators\"").unwrap() < json.find("\"verdict\"").unwrap());
    }

    #[test]
    fn text_report_mentions_the_main_quantities() {
        let family = PolytopeFamily::from_points(2, vec![square(), square(), square()]).unwrap();
        let r = analyze(&family, &OracleRequest::None).unwrap();
        let text = AnalysisReport::new(&family, &OracleRequest::None, &r)
            .unwrap()
            .to_text();
        assert!(text.contains("essential: yes"));
        assert!(text.contains("bounds: 1 <= dim (S/I)_rho <= 1"));
        assert!(text.contains("big and nef case: full-dim, value 1"));
        assert!(text.contains("oracle: not run"));
        assert!(text.contains("verdict: no-oracle"));
    }
}
