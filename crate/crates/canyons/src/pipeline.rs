//! High-level entry points shared by the CLI and the acceptance suite:
//! parse, analyze, compare, with precision escalation on undecidable zero
//! tests.

use crate::config::Options;
use crate::equivalence::{inv2_equivalent, Decision, EquivalenceReport};
use crate::error::{Error, Result};
use crate::invariant::{inv2_from_analysis, Inv2};
use crate::polar::{polar_arcs, PolarAnalysis};
use crate::poly::{parse_poly, squarefree_check, BivarPoly};
use crate::ratio::fmt_q;
use crate::scalar::Scalar;
use std::collections::BTreeMap;

/// Everything the `analyze` command reports for one germ.
pub struct AnalysisReport {
    pub input: String,
    pub params: BTreeMap<String, Scalar>,
    pub germ: BivarPoly,
    pub options_used: Options,
    pub k: u32,
    pub mini_regular: bool,
    pub squarefree: bool,
    pub analysis: PolarAnalysis,
    pub invariant: Inv2,
}

/// Outcome of comparing two germs.
pub struct ComparisonReport {
    pub left: AnalysisReport,
    pub right: AnalysisReport,
    pub report: EquivalenceReport,
}

/// Run a fallible stage, doubling the precision (up to the cap) whenever a
/// zero test stays undecided.
pub fn with_escalation<T>(
    opts: &Options,
    mut stage: impl FnMut(&Options) -> Result<T>,
) -> Result<T> {
    let mut current = opts.clone();
    loop {
        match stage(&current) {
            Err(Error::PrecisionExhausted) => match current.escalate() {
                Some(next) => current = next,
                None => return Err(Error::PrecisionExhausted),
            },
            other => return other,
        }
    }
}

fn build_germ(
    expr: &str,
    params: &BTreeMap<String, Scalar>,
    shear: Option<&Scalar>,
) -> Result<BivarPoly> {
    let f = parse_poly(expr, params)?;
    match shear {
        Some(lambda) => Ok(f.shear(lambda)),
        None => Ok(f),
    }
}

/// Full analysis of one germ expression.
pub fn analyze(
    expr: &str,
    params: &BTreeMap<String, Scalar>,
    shear: Option<&Scalar>,
    opts: &Options,
) -> Result<AnalysisReport> {
    let germ = build_germ(expr, params, shear)?;
    with_escalation(opts, |o| {
        let mut analysis = polar_arcs(&germ, o)?;
        let invariant = inv2_from_analysis(&germ, &mut analysis, o)?;
        Ok(AnalysisReport {
            input: expr.to_string(),
            params: params.clone(),
            germ: germ.clone(),
            options_used: o.clone(),
            k: analysis.cone.k,
            mini_regular: true,
            squarefree: squarefree_check(&germ)?,
            analysis,
            invariant,
        })
    })
}

/// Compare two germ expressions up to the rescaling action.
pub fn compare(
    expr1: &str,
    params1: &BTreeMap<String, Scalar>,
    expr2: &str,
    params2: &BTreeMap<String, Scalar>,
    shear: Option<&Scalar>,
    opts: &Options,
) -> Result<ComparisonReport> {
    let left = analyze(expr1, params1, shear, opts)?;
    let right = analyze(expr2, params2, shear, opts)?;
    let report = with_escalation(opts, |o| {
        // Recompute at escalated precision only when needed.
        if o.precision == left.options_used.precision {
            inv2_equivalent(&left.invariant, &right.invariant, &o.tol(), o)
        } else {
            let l = analyze(expr1, params1, shear, o)?;
            let r = analyze(expr2, params2, shear, o)?;
            inv2_equivalent(&l.invariant, &r.invariant, &o.tol(), o)
        }
    })?;
    Ok(ComparisonReport { left, right, report })
}

impl AnalysisReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "input": self.input,
            "params": self.params.iter().map(|(k, v)| (k.clone(), serde_json::to_value(v).unwrap()))
                .collect::<serde_json::Map<String, serde_json::Value>>(),
            "options": {
                "precision": self.options_used.precision,
                "eps": self.options_used.eps().to_string(),
                "max_terms": self.options_used.max_terms,
                "seed": self.options_used.seed,
            },
            "analysis": {
                "germ": self.germ.to_string(),
                "k": self.k,
                "mini_regular": self.mini_regular,
                "squarefree": self.squarefree,
                "sigma_lines": self.analysis.sigma_lines,
                "arcs": self.analysis.arcs.iter().map(|arc| serde_json::json!({
                    "id": arc.id,
                    "arc": arc.arc.to_json(),
                    "d_gr": fmt_q(&arc.d_gr),
                    "tangent_lambda": arc.tangent_lambda,
                    "tangential": arc.is_tangential,
                    "h0": fmt_q(&arc.h0),
                    "a0": arc.a0,
                    "expansion": arc.expansion.to_json(),
                    "canyon": arc.canyon,
                })).collect::<Vec<_>>(),
                "canyons": self.analysis.canyons.iter().enumerate().map(|(id, c)| serde_json::json!({
                    "id": id,
                    "degree": fmt_q(&c.degree),
                    "members": c.member_arc_ids,
                })).collect::<Vec<_>>(),
                "inv2": self.invariant.to_json(),
            },
        })
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let push = |out: &mut String, s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        push(&mut out, format!("germ: {}", self.germ));
        push(
            &mut out,
            format!(
                "multiplicity k = {}, mini-regular: {}, squarefree: {}",
                self.k, self.mini_regular, self.squarefree
            ),
        );
        if self.analysis.sigma_lines.is_empty() {
            push(&mut out, "Σ_f empty; Inv² = {}".to_string());
        } else {
            let lines: Vec<String> = self
                .analysis
                .sigma_lines
                .iter()
                .map(|l| format!("x = {}*y", l.to_display_string()))
                .collect();
            push(&mut out, format!("Σ_f lines: {}", lines.join(", ")));
        }
        for arc in &self.analysis.arcs {
            let terms: Vec<String> = arc
                .arc
                .terms
                .iter()
                .map(|(e, c)| format!("({})*y^{}", c.to_display_string(), fmt_q(e)))
                .collect();
            let desc = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
            push(
                &mut out,
                format!(
                    "arc {}: x = {desc} [N={}, mult={}] d_gr={} tangent λ={} {} h0={} a0={} canyon={}",
                    arc.id,
                    arc.arc.ram,
                    arc.arc.mult,
                    fmt_q(&arc.d_gr),
                    arc.tangent_lambda.to_display_string(),
                    if arc.is_tangential { "(tangential)" } else { "(transverse)" },
                    fmt_q(&arc.h0),
                    arc.a0.to_display_string(),
                    arc.canyon,
                ),
            );
        }
        for (id, canyon) in self.analysis.canyons.iter().enumerate() {
            push(
                &mut out,
                format!(
                    "canyon {id}: degree {} members {:?}",
                    fmt_q(&canyon.degree),
                    canyon.member_arc_ids
                ),
            );
        }
        for packet in &self.invariant.packets {
            let leading: Vec<String> = packet
                .leading
                .iter()
                .map(|l| format!("({})*y^{}", l.a0.to_display_string(), fmt_q(&l.h0)))
                .collect();
            let pairs: Vec<String> = packet
                .pairs
                .iter()
                .map(|p| {
                    format!(
                        "({}, ({})*y^{})",
                        fmt_q(&p.l0),
                        p.nu.to_display_string(),
                        fmt_q(&p.m)
                    )
                })
                .collect();
            push(
                &mut out,
                format!(
                    "Δ(x = {}*y) = {{{}; {}}}",
                    packet.lambda.to_display_string(),
                    leading.join(", "),
                    pairs.join(", ")
                ),
            );
        }
        out
    }
}

impl ComparisonReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "input": [self.left.input, self.right.input],
            "options": {
                "precision": self.left.options_used.precision,
            },
            "comparison": self.report.to_json(),
        })
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        match self.report.decision {
            Decision::ConsistentWithEquivalence => {
                out.push_str("decision: ConsistentWithEquivalence\n");
                if let Some(w) = self.report.witnesses.first() {
                    if w.line_map.is_empty() {
                        out.push_str("witness: vacuous (no singular lines on either side)\n");
                    }
                    for ((i, j), cands) in w.line_map.iter().zip(&w.candidates) {
                        let shown: Vec<String> =
                            cands.iter().take(4).map(|c| c.to_display_string()).collect();
                        out.push_str(&format!(
                            "lines {i} -> {j}: c in {{{}}}\n",
                            shown.join(", ")
                        ));
                    }
                }
            }
            Decision::NotEquivalent => {
                out.push_str("decision: NotEquivalent\n");
                for r in &self.report.refutations {
                    out.push_str(&format!(
                        "no constant satisfies: {}\n",
                        r.constraints.join(" and ")
                    ));
                }
            }
        }
        for w in &self.report.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pairs: &[(&str, i64)]) -> BTreeMap<String, Scalar> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), Scalar::from_int(*v)))
            .collect()
    }

    #[test]
    fn analyze_renders_both_formats() {
        let report = analyze(
            "x^3 - 3*t^2*x*y^10 + y^12",
            &params(&[("t", 1)]),
            None,
            &Options::default(),
        )
        .unwrap();
        let text = report.render_text();
        assert!(text.contains("multiplicity k = 3"));
        assert!(text.contains("Δ(x = 0*y)"));
        let js = report.to_json();
        assert_eq!(js["analysis"]["k"], 3);
        assert_eq!(js["analysis"]["arcs"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn analyze_empty_sigma_message() {
        let report = analyze("x^2 + y^2", &BTreeMap::new(), None, &Options::default()).unwrap();
        assert!(report.render_text().contains("Σ_f empty"));
    }

    #[test]
    fn compare_self_is_consistent() {
        let p = params(&[("t", 1)]);
        let cmp = compare(
            "x^3 - 3*t^2*x*y^10 + y^12",
            &p,
            "x^3 - 3*t^2*x*y^10 + y^12",
            &p,
            None,
            &Options::default(),
        )
        .unwrap();
        assert_eq!(cmp.report.decision, Decision::ConsistentWithEquivalence);
        assert!(cmp.render_text().contains("ConsistentWithEquivalence"));
    }

    #[test]
    fn compare_distinct_parameters_is_refuted() {
        let cmp = compare(
            "x^3 - 3*t^2*x*y^10 + y^12",
            &params(&[("t", 1)]),
            "x^3 - 3*t^2*x*y^10 + y^12",
            &params(&[("t", 2)]),
            None,
            &Options::default(),
        )
        .unwrap();
        assert_eq!(cmp.report.decision, Decision::NotEquivalent);
        let text = cmp.render_text();
        assert!(text.contains("c^12 = 1"), "{text}");
    }

    #[test]
    fn escalation_wrapper_passes_through_other_errors() {
        let out: Result<()> = with_escalation(&Options::default(), |_| Err(Error::MultipleRoot));
        assert_eq!(out.unwrap_err(), Error::MultipleRoot);
    }

    #[test]
    fn escalation_doubles_until_decidable() {
        let mut calls = 0;
        let out = with_escalation(&Options::default(), |o| {
            calls += 1;
            if o.precision < 1024 {
                Err(Error::PrecisionExhausted)
            } else {
                Ok(o.precision)
            }
        });
        assert_eq!(out.unwrap(), 1024);
        assert_eq!(calls, 3); // 256 -> 512 -> 1024

        // The cap turns a persistent Unknown into the terminal error.
        let exhausted: Result<()> =
            with_escalation(&Options::default(), |_| Err(Error::PrecisionExhausted));
        assert_eq!(exhausted.unwrap_err(), Error::PrecisionExhausted);
    }
}
