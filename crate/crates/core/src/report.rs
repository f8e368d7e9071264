//! JSON input documents and the versioned report document produced by the CLI.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::{
    compute_bounds, compute_bounds_abstract, corollary_check, unicity_report, BoundsInput,
    BoundsReport, Consistency, CorollaryReport, CorollaryVerdict, UnicityReport,
};
use crate::config::Tolerances;
use crate::curvature::{
    total_curvature_closed_form, total_curvature_quadrature, ClosedFormCurvature,
};
use crate::error::{Error, Result};
use crate::exact::Exact;
use crate::expr::{format_expression, parse_expression};
use crate::ramification::{ramification_report, RamificationReport};
use crate::sphere::SpherePoint;
use crate::weierstrass::{
    check_conformality, check_regularity, classify_ends, compute_periods, phi_from_data,
    ConformalityReport, EndClassification, EndVerdict, PeriodReport, RegularityReport,
    WeierstrassData,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub genus: u32,
    pub punctures: Vec<String>,
    pub h: String,
    pub g1: String,
    pub g2: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// A complex literal in the expression syntax, or `inf`.
pub fn parse_point(text: &str) -> Result<SpherePoint> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("inf") {
        return Ok(SpherePoint::Infinity);
    }
    let f = parse_expression(t).map_err(|source| Error::Field {
        field: "punctures".into(),
        text: t.into(),
        source,
    })?;
    if !f.is_constant() || f.degree() != 0 || f.den().degree_or_zero() != 0 {
        return Err(Error::InvalidData(format!(
            "puncture {t:?} is not a complex constant"
        )));
    }
    let c = f
        .eval(num_complex::Complex64::new(0.0, 0.0))
        .expect("constant");
    Ok(SpherePoint::Finite(c))
}

impl InputDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidData(format!("input document: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Parses the expressions and punctures; only genus 0 data can be built.
    pub fn to_data(&self, tol: &Tolerances) -> Result<WeierstrassData> {
        if self.genus != 0 {
            return Err(Error::InvalidData(format!(
                "genus {} data cannot be built from rational functions; use the abstract bounds mode",
                self.genus
            )));
        }
        let punctures = self
            .punctures
            .iter()
            .map(|p| parse_point(p))
            .collect::<Result<Vec<_>>>()?;
        let field = |name: &str, text: &str| {
            parse_expression(text).map_err(|source| Error::Field {
                field: name.into(),
                text: text.into(),
                source,
            })
        };
        WeierstrassData::new(
            field("h", &self.h)?,
            field("g1", &self.g1)?,
            field("g2", &self.g2)?,
            punctures,
            tol,
        )
    }
}

/// The data as parsed, in normalized form.
#[derive(Debug, Clone, Serialize)]
pub struct InputEcho {
    pub label: Option<String>,
    pub genus: u32,
    pub punctures: Vec<SpherePoint>,
    pub h: String,
    pub g1: String,
    pub g2: String,
}

impl InputEcho {
    fn new(doc: &InputDocument, d: &WeierstrassData) -> Self {
        Self {
            label: doc.label.clone(),
            genus: d.genus,
            punctures: d.punctures.clone(),
            h: format_expression(&d.h),
            g1: format_expression(&d.g1),
            g2: format_expression(&d.g2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckSection {
    pub conformality: ConformalityReport,
    pub regularity: RegularityReport,
    pub periods: PeriodReport,
    pub ends: EndClassification,
    pub complete: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComponentKind {
    Nonconstant,
    ConstantComponent,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentRamification {
    pub component: u8,
    pub verdict: ComponentKind,
    pub nu_f: Option<Exact>,
    pub report: Option<RamificationReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsSection {
    pub report: BoundsReport,
    pub corollary: CorollaryReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvatureSummary {
    pub closed_form: ClosedFormCurvature,
    /// Adaptive quadrature of `-\int K dA` over the basic domain.
    pub quadrature: f64,
    pub relative_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub schema: u32,
    pub command: String,
    pub tolerances: Tolerances,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<InputEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_b: Option<InputEcho>,
    pub verdict: Verdict,
    pub failures: Vec<String>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ramification: Option<Vec<ComponentRamification>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unicity: Option<UnicityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curvature: Option<CurvatureSummary>,
}

impl ReportDocument {
    fn empty(command: &str, tol: &Tolerances, seed: u64) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            command: command.into(),
            tolerances: *tol,
            seed,
            input: None,
            input_b: None,
            verdict: Verdict::Pass,
            failures: Vec::new(),
            warnings: Vec::new(),
            check: None,
            ramification: None,
            bounds: None,
            unicity: None,
            curvature: None,
        }
    }

    fn finish(mut self) -> Self {
        self.verdict = if self.failures.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// 0 on pass, 2 when a mathematical condition failed.
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Pass => 0,
            Verdict::Fail => 2,
        }
    }
}

fn check_section(d: &WeierstrassData, doc: &mut ReportDocument, tol: &Tolerances) -> Result<()> {
    let conformality = check_conformality(&phi_from_data(d), tol);
    let regularity = check_regularity(d, tol)?;
    let periods = compute_periods(d, tol)?;
    let ends = classify_ends(d, tol)?;
    if !conformality.passed {
        doc.failures.push("conformality".into());
    }
    if !regularity.passed {
        doc.failures.push("regularity".into());
    }
    if !periods.period_ok {
        doc.failures.push("period".into());
    }
    for e in &ends.ends {
        match e.verdict {
            EndVerdict::CompleteEnd => {}
            EndVerdict::RemovablePoint => doc.warnings.push(format!(
                "removable end at {}: the metric extends regularly across this puncture, so the surface is not complete there although the puncture is excluded from the domain",
                e.point
            )),
            EndVerdict::Degenerate => doc.warnings.push(format!(
                "degenerate end at {}: the metric vanishes at this puncture (exponent {})",
                e.point, e.metric_exponent
            )),
        }
    }
    let complete = ends.complete;
    doc.check = Some(CheckSection {
        conformality,
        regularity,
        periods,
        ends,
        complete,
    });
    Ok(())
}

fn ramify_component(
    d: &WeierstrassData,
    component: u8,
    doc: &mut ReportDocument,
    tol: &Tolerances,
) -> Result<ComponentRamification> {
    let g = if component == 1 { &d.g1 } else { &d.g2 };
    if g.is_constant() {
        return Ok(ComponentRamification {
            component,
            verdict: ComponentKind::ConstantComponent,
            nu_f: None,
            report: None,
        });
    }
    let r = ramification_report(g, &d.punctures, d.genus, tol)?;
    if !r.riemann_hurwitz {
        doc.failures
            .push(format!("g{component}: total branching differs from 2d - 2"));
    }
    if !r.exceptional_preimage_bound.holds {
        doc.failures
            .push(format!("g{component}: exceptional preimage count bound"));
    }
    if r.fundamental_bound.is_some_and(|b| !b.holds) {
        doc.failures
            .push(format!("g{component}: nu_f exceeds 2 + chi/d"));
    }
    if !r.ramified_preimage_bound.holds {
        doc.warnings.push(format!(
            "g{component}: ramified preimage inequality fails on this instance (preimages at punctures branch less than nu)"
        ));
    }
    Ok(ComponentRamification {
        component,
        verdict: ComponentKind::Nonconstant,
        nu_f: Some(r.nu_f),
        report: Some(r),
    })
}

fn bounds_failures(section: &BoundsSection, doc: &mut ReportDocument) {
    if section.report.consistency == Consistency::Contradiction {
        doc.failures.push("bounds: contradiction".into());
    }
    if section.corollary.verdict == CorollaryVerdict::Contradiction {
        doc.failures.push("corollary: contradiction".into());
    }
    doc.warnings
        .extend(section.report.notes.iter().map(|n| format!("bounds: {n}")));
}

fn start(
    command: &str,
    input: &InputDocument,
    tol: &Tolerances,
    seed: u64,
) -> Result<(WeierstrassData, ReportDocument)> {
    let d = input.to_data(tol)?;
    let mut doc = ReportDocument::empty(command, tol, seed);
    doc.input = Some(InputEcho::new(input, &d));
    Ok((d, doc))
}

/// Conditions C, R, P and the end classification.
pub fn cmd_check(input: &InputDocument, tol: &Tolerances, seed: u64) -> Result<ReportDocument> {
    let (d, mut doc) = start("check", input, tol, seed)?;
    check_section(&d, &mut doc, tol)?;
    Ok(doc.finish())
}

/// Ramification of one component, or of both when `component` is `None`.
pub fn cmd_ramify(
    input: &InputDocument,
    component: Option<u8>,
    tol: &Tolerances,
    seed: u64,
) -> Result<ReportDocument> {
    let (d, mut doc) = start("ramify", input, tol, seed)?;
    let comps: Vec<u8> = match component {
        Some(c @ (1 | 2)) => vec![c],
        Some(c) => {
            return Err(Error::InvalidData(format!(
                "component must be 1 or 2, got {c}"
            )))
        }
        None => vec![1, 2],
    };
    let mut out = Vec::new();
    for c in comps {
        out.push(ramify_component(&d, c, &mut doc, tol)?);
    }
    doc.ramification = Some(out);
    Ok(doc.finish())
}

pub fn cmd_bounds(input: &InputDocument, tol: &Tolerances, seed: u64) -> Result<ReportDocument> {
    let (d, mut doc) = start("bounds", input, tol, seed)?;
    let report = compute_bounds(&d, seed, tol)?;
    let section = BoundsSection {
        corollary: corollary_check(&report),
        report,
    };
    bounds_failures(&section, &mut doc);
    doc.bounds = Some(section);
    Ok(doc.finish())
}

pub fn cmd_bounds_abstract(
    input: &BoundsInput,
    tol: &Tolerances,
    seed: u64,
) -> Result<ReportDocument> {
    let mut doc = ReportDocument::empty("bounds", tol, seed);
    let report = compute_bounds_abstract(input);
    let section = BoundsSection {
        corollary: corollary_check(&report),
        report,
    };
    bounds_failures(&section, &mut doc);
    doc.bounds = Some(section);
    Ok(doc.finish())
}

pub fn cmd_unicity(
    a: &InputDocument,
    b: &InputDocument,
    tol: &Tolerances,
    seed: u64,
) -> Result<ReportDocument> {
    let (da, mut doc) = start("unicity", a, tol, seed)?;
    let db = b.to_data(tol)?;
    doc.input_b = Some(InputEcho::new(b, &db));
    let report = unicity_report(&da, &db, tol)?;
    if report.consistency == Consistency::Contradiction {
        doc.failures.push("unicity: contradiction".into());
    }
    doc.warnings
        .extend(report.notes.iter().map(|n| format!("unicity: {n}")));
    doc.unicity = Some(report);
    Ok(doc.finish())
}

/// Check, both ramification reports, bounds and curvature in one document.
pub fn cmd_report(input: &InputDocument, tol: &Tolerances, seed: u64) -> Result<ReportDocument> {
    let (d, mut doc) = start("report", input, tol, seed)?;
    check_section(&d, &mut doc, tol)?;
    let mut comps = Vec::new();
    for c in [1, 2] {
        comps.push(ramify_component(&d, c, &mut doc, tol)?);
    }
    doc.ramification = Some(comps);
    let report = compute_bounds(&d, seed, tol)?;
    let section = BoundsSection {
        corollary: corollary_check(&report),
        report,
    };
    bounds_failures(&section, &mut doc);
    doc.bounds = Some(section);
    let closed_form = total_curvature_closed_form(&d, tol)?;
    let quadrature = total_curvature_quadrature(&d, tol)?;
    let relative_gap = if closed_form.basic_domain == 0.0 {
        quadrature.abs()
    } else {
        ((quadrature - closed_form.basic_domain) / closed_form.basic_domain).abs()
    };
    doc.curvature = Some(CurvatureSummary {
        closed_form,
        quadrature,
        relative_gap,
    });
    Ok(doc.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(h: &str, g1: &str, g2: &str, punctures: &[&str]) -> InputDocument {
        InputDocument {
            genus: 0,
            punctures: punctures.iter().map(|s| s.to_string()).collect(),
            h: h.into(),
            g1: g1.into(),
            g2: g2.into(),
            label: None,
        }
    }

    #[test]
    fn parses_points() {
        assert_eq!(parse_point("inf").unwrap(), SpherePoint::Infinity);
        assert_eq!(
            parse_point("(1+2i)").unwrap(),
            SpherePoint::finite(1.0, 2.0)
        );
        assert_eq!(parse_point("-0.5").unwrap(), SpherePoint::finite(-0.5, 0.0));
        assert!(parse_point("z").is_err());
    }

    #[test]
    fn rejects_unknown_fields_and_genus() {
        assert!(InputDocument::from_json(
            r#"{"genus":0,"punctures":[],"h":"1","g1":"z","g2":"0","extra":1}"#
        )
        .is_err());
        let mut doc = input("1", "z", "0", &["inf"]);
        doc.genus = 1;
        assert!(doc.to_data(&Tolerances::default()).is_err());
    }

    #[test]
    fn removable_end_warns_without_failing() {
        let doc = cmd_check(
            &input("1/z^3", "z", "2", &["0", "inf"]),
            &Tolerances::default(),
            1,
        )
        .unwrap();
        assert_eq!(doc.verdict, Verdict::Pass);
        assert!(doc
            .warnings
            .iter()
            .any(|w| w.starts_with("removable end at inf")));
        assert!(!doc.check.unwrap().complete);
    }

    #[test]
    fn period_failure_is_listed() {
        let doc = cmd_check(
            &input("1/(z*(z-1))", "z", "0", &["0", "1", "inf"]),
            &Tolerances::default(),
            1,
        )
        .unwrap();
        assert_eq!(doc.exit_code(), 2);
        assert_eq!(doc.failures, vec!["period".to_string()]);
    }

    #[test]
    fn constant_component() {
        let doc = cmd_ramify(
            &input("1/(z*(z-1))", "z", "0", &["0", "1", "inf"]),
            Some(2),
            &Tolerances::default(),
            1,
        )
        .unwrap();
        let r = &doc.ramification.unwrap()[0];
        assert_eq!(r.verdict, ComponentKind::ConstantComponent);
        let json = serde_json::to_string(r).unwrap();
        assert!(json.contains("\"constant-component\""));
    }
}
