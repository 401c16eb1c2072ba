//! Commands over an input spec and their machine-readable reports.

use serde::Serialize;
use serde_json::{json, Value};

use crate::criteria::{
    analyze, oracle_decompose, proof_crosschecks, CriterionSummary, OracleStatus, VerdictKind, ORACLE,
};
use crate::error::Error;
use crate::exterior::Sym3Diff;
use crate::generate::{gen_closed, gen_perturbed};
use crate::parse::{InputMode, InputSpec};
use crate::series::Series2;
use crate::web::{web_frame, AdaptedWebData};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Command {
    Check,
    Web,
    Oracle,
    CrossValidate,
    /// A closed instance from the spec's seed, optionally perturbed by a
    /// monomial of the given magnitude.
    Generate {
        degree_bound: usize,
        perturb: Option<f64>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Web => "web",
            Command::Oracle => "oracle",
            Command::CrossValidate => "cross-validate",
            Command::Generate { .. } => "generate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionEntry {
    pub name: &'static str,
    pub applicable: bool,
    pub status: VerdictKind,
    pub max_abs_residual: Option<f64>,
    pub scaled_residual: Option<f64>,
    pub first_nonzero_degree: Option<usize>,
    pub valid_order: Option<usize>,
}

impl From<&CriterionSummary> for CriterionEntry {
    fn from(c: &CriterionSummary) -> Self {
        CriterionEntry {
            name: c.name,
            applicable: c.applicable,
            status: match c.closed {
                Some(true) => VerdictKind::Closed,
                Some(false) => VerdictKind::NotClosed,
                None => VerdictKind::Indeterminate,
            },
            max_abs_residual: c.max_abs_residual,
            scaled_residual: c.scaled_residual,
            first_nonzero_degree: c.first_nonzero_degree,
            valid_order: c.valid_order,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreconditionEntry {
    pub discriminant_unit: bool,
    pub blaschke_unit: bool,
    pub blaschke_at_origin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Orders {
    pub requested: usize,
    pub checked: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorEntry {
    pub kind: &'static str,
    pub message: String,
}

impl From<&Error> for ErrorEntry {
    fn from(e: &Error) -> Self {
        let kind = match e {
            Error::NotAUnit { .. } => "not_a_unit",
            Error::NonzeroConstantTerm => "nonzero_constant_term",
            Error::SingularJacobian => "singular_jacobian",
            Error::OrderExceedsValid { .. } => "order_exceeds_valid",
            Error::Degenerate { .. } => "degenerate",
            Error::ZeroCubic => "zero_cubic",
            Error::DegenerateForm => "degenerate_form",
            Error::ShapeViolation { .. } => "shape_violation",
            Error::BlaschkeFlat => "blaschke_flat",
            Error::NotAdapted(_) => "not_adapted",
            Error::GenerationFailed { .. } => "generation_failed",
            Error::InternalInconsistency(_) => "internal_inconsistency",
            Error::Parse { .. } => "parse",
            Error::InvalidInput(_) => "invalid_input",
        };
        ErrorEntry {
            kind,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub verdict: Option<VerdictKind>,
    pub criteria: Vec<CriterionEntry>,
    pub preconditions: Option<PreconditionEntry>,
    pub orders: Orders,
    pub tolerance: f64,
    pub input: Option<InputSpec>,
    pub details: Value,
    pub error: Option<ErrorEntry>,
    pub version: &'static str,
    #[serde(skip)]
    exit: i32,
}

impl Report {
    fn new(command: Command, spec: &InputSpec) -> Self {
        Report {
            command: command.name(),
            verdict: None,
            criteria: Vec::new(),
            preconditions: None,
            orders: Orders {
                requested: spec.order,
                checked: None,
            },
            tolerance: spec.tolerance,
            input: None,
            details: Value::Null,
            error: None,
            version: VERSION,
            exit: 0,
        }
    }

    /// Report for a failure before any computation, such as a bad input file.
    pub fn failure(command: Command, spec: Option<&InputSpec>, error: &Error) -> Self {
        let fallback = InputSpec::new(InputMode::Adapted {
            a: String::new(),
            b: String::new(),
        });
        let mut report = Report::new(command, spec.unwrap_or(&fallback));
        report.input = spec.cloned();
        report.fail(error);
        report
    }

    fn fail(&mut self, error: &Error) {
        self.error = Some(ErrorEntry::from(error));
        self.exit = exit_code(error);
    }

    /// 0 on success (including indeterminate verdicts), 1 for usage and parse
    /// errors and other failures, 2 for degenerate input, 3 when the criteria
    /// disagree.
    pub fn exit_code(&self) -> i32 {
        self.exit
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable summary. For `generate` this is the generated input
    /// file itself, so it can be redirected and fed back in.
    pub fn to_text(&self) -> String {
        if let (None, Some(spec)) = (&self.error, self.details.get("spec").and_then(Value::as_str)) {
            return spec.to_string();
        }
        let mut out = format!("command: {}\n", self.command);
        if let Some(v) = self.verdict {
            out += &format!("verdict: {v}\n");
        }
        for c in &self.criteria {
            out += &format!("{}: {}", c.name, c.status);
            if let (Some(raw), Some(scaled)) = (c.max_abs_residual, c.scaled_residual) {
                out += &format!(" (max_abs {raw:.3e}, scaled {scaled:.3e}");
                if let Some(d) = c.first_nonzero_degree {
                    out += &format!(", first nonzero degree {d}");
                }
                out += ")";
            }
            out += "\n";
        }
        if let Some(p) = &self.preconditions {
            out += &format!(
                "preconditions: discriminant_unit={} blaschke_unit={} |dgamma(0)|={:.3e}\n",
                p.discriminant_unit, p.blaschke_unit, p.blaschke_at_origin
            );
        }
        out += &format!("order: requested {}", self.orders.requested);
        if let Some(c) = self.orders.checked {
            out += &format!(", checked through {c}");
        }
        out += "\n";
        if !self.details.is_null() {
            out += &format!(
                "details: {}\n",
                serde_json::to_string_pretty(&self.details).expect("json")
            );
        }
        if let Some(e) = &self.error {
            out += &format!("error ({}): {}\n", e.kind, e.message);
        }
        out += &format!("version: {}\n", self.version);
        out
    }
}

pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Degenerate { .. } | Error::ZeroCubic => 2,
        Error::InternalInconsistency(_) => 3,
        _ => 1,
    }
}

fn form_json(p: &Series2, q: &Series2) -> Value {
    json!([p.to_expression(), q.to_expression()])
}

/// Runs `command` on `spec`. Errors are recorded in the report, never returned.
pub fn run(spec: &InputSpec, command: Command) -> Report {
    let mut report = Report::new(command, spec);
    if let Err(e) = execute(spec, command, &mut report) {
        report.fail(&e);
    }
    report
}

fn execute(spec: &InputSpec, command: Command, report: &mut Report) -> crate::Result<()> {
    spec.validate()?;
    if let Command::Generate { degree_bound, perturb } = command {
        let seed = spec.seed.unwrap_or(0);
        let (mut a, mut b) = gen_closed(seed, spec.order, degree_bound)?;
        if let Some(magnitude) = perturb {
            (a, b) = gen_perturbed(seed, (&a, &b), magnitude);
        }
        let generated = InputSpec {
            seed: Some(seed),
            mode: InputMode::Adapted {
                a: a.to_expression(),
                b: b.to_expression(),
            },
            ..spec.clone()
        };
        report.details = json!({ "spec": generated.to_toml() });
        report.input = Some(generated);
        return Ok(());
    }

    report.input = Some(spec.normalized()?);
    let eta = spec.eta()?;
    match command {
        Command::Check | Command::CrossValidate => {
            let analysis = analyze(&eta, spec.order, spec.tolerance)?;
            let v = &analysis.verdict;
            report.verdict = Some(v.kind);
            report.criteria = v.criteria.iter().map(CriterionEntry::from).collect();
            report.preconditions = Some(PreconditionEntry {
                discriminant_unit: v.preconditions.discriminant_unit,
                blaschke_unit: v.preconditions.blaschke_unit,
                blaschke_at_origin: v.blaschke_at_origin,
            });
            report.orders.checked = Some(v.checked_order);
            report.details = json!({ "scale": v.scale });
            if command == Command::CrossValidate {
                let decisions: Vec<bool> = v.criteria.iter().filter_map(|c| c.closed).collect();
                let crosschecks = AdaptedWebData::from_ab(&analysis.chart.a, &analysis.chart.b)
                    .and_then(|data| proof_crosschecks(&data.frame()?, &data, spec.tolerance));
                report.details = json!({
                    "scale": v.scale,
                    "agreement": decisions.windows(2).all(|w| w[0] == w[1]),
                    "applicable_criteria": decisions.len(),
                    "crosschecks": match crosschecks {
                        Ok(r) => serde_json::to_value(r).expect("json"),
                        Err(e) => serde_json::to_value(ErrorEntry::from(&e)).expect("json"),
                    },
                });
            }
        }
        Command::Web => {
            let frame = web_frame(&eta)?;
            let blaschke = frame.blaschke_at_origin().norm();
            report.preconditions = Some(PreconditionEntry {
                discriminant_unit: true,
                blaschke_unit: blaschke > crate::criteria::BLASCHKE_TOLERANCE,
                blaschke_at_origin: blaschke,
            });
            report.orders.checked = Some(frame.d_gamma.valid_order());
            report.details = json!({
                "invariants": frame.invariant_residuals(&eta),
                "omega": frame.omega.iter().map(|o| form_json(&o.p, &o.q)).collect::<Vec<_>>(),
                "gamma": form_json(&frame.gamma.p, &frame.gamma.q),
                "d_gamma": frame.d_gamma.r.to_expression(),
            });
        }
        Command::Oracle => {
            let (a, b) = adapted_pair(&eta)?;
            let result = oracle_decompose(&a, &b, spec.tolerance)?;
            report.verdict = Some(if result.is_closed() {
                VerdictKind::Closed
            } else {
                VerdictKind::NotClosed
            });
            let mut summary = CriterionEntry {
                name: ORACLE,
                applicable: true,
                status: report.verdict.unwrap(),
                max_abs_residual: Some(result.residual.max_abs),
                scaled_residual: Some(result.residual.scaled),
                first_nonzero_degree: None,
                valid_order: Some(result.checked_order),
            };
            let mut details = json!({ "checked_order": result.checked_order });
            match result.status {
                OracleStatus::Obstructed { order } => {
                    summary.first_nonzero_degree = Some(order);
                    details["status"] = json!("obstructed");
                    details["obstruction_order"] = json!(order);
                }
                OracleStatus::ClosedDecompositionFound => {
                    details["status"] = json!("closed_decomposition_found");
                    details["z_factor"] = json!(result.z_factor.to_expression());
                    details["w_factor"] = json!(result.w_factor.to_expression());
                    details["h"] = json!(result.h.to_expression());
                }
            }
            report.criteria = vec![summary];
            report.orders.checked = Some(result.checked_order);
            report.details = details;
        }
        Command::Generate { .. } => unreachable!(),
    }
    Ok(())
}

/// `(a, b)` of η in a chart adapted to its web.
fn adapted_pair(eta: &Sym3Diff) -> crate::Result<(Series2, Series2)> {
    if eta.c[0].norm() == 0.0 && eta.c[3].norm() == 0.0 {
        return Ok((eta.c[1].clone(), eta.c[2].clone()));
    }
    if !eta.is_nondegenerate() {
        return Err(Error::Degenerate {
            discriminant: crate::exterior::discriminant(eta).constant_term().norm(),
        });
    }
    let frame = web_frame(eta)?;
    let chart = crate::web::adapt_coordinates(eta, &frame)?;
    Ok((chart.a, chart.b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(name: &str) -> InputSpec {
        let (a, b) = match name {
            "c" => ("1 + z*w - 0.5*w^2", "1 + 0.5*z^2 - z*w"),
            "w" => ("-(1 + z*w)^2", "-(1 + z*w)"),
            _ => ("-1", "-1"),
        };
        InputSpec::new(InputMode::Adapted {
            a: a.into(),
            b: b.into(),
        })
    }

    #[test]
    fn check_fixture_c() {
        let r = run(&fixture("c"), Command::Check);
        assert_eq!(r.verdict, Some(VerdictKind::Closed));
        assert_eq!(r.exit_code(), 0);
        for c in &r.criteria {
            assert!(c.max_abs_residual.unwrap() < 1e-9, "{c:?}");
        }
    }

    #[test]
    fn check_fixture_k_marks_theorems_indeterminate() {
        let r = run(&fixture("k"), Command::Check);
        assert_eq!(r.verdict, Some(VerdictKind::Closed));
        assert!(!r.preconditions.as_ref().unwrap().blaschke_unit);
        let statuses: Vec<_> = r.criteria.iter().map(|c| c.status).collect();
        assert_eq!(
            statuses,
            vec![
                VerdictKind::Indeterminate,
                VerdictKind::Indeterminate,
                VerdictKind::Closed
            ]
        );
    }

    #[test]
    fn oracle_fixture_w() {
        let r = run(&fixture("w"), Command::Oracle);
        assert_eq!(r.verdict, Some(VerdictKind::NotClosed));
        assert_eq!(r.details["obstruction_order"], json!(3));
    }

    #[test]
    fn degenerate_and_parse_errors() {
        let spec = InputSpec::new(InputMode::Cubic {
            c0: "1".into(),
            c1: "0".into(),
            c2: "0".into(),
            c3: "0".into(),
        });
        let r = run(&spec, Command::Check);
        assert_eq!(r.exit_code(), 2);
        assert_eq!(r.error.as_ref().unwrap().kind, "degenerate");

        let r = run(
            &InputSpec::new(InputMode::Adapted {
                a: "z^".into(),
                b: "1".into(),
            }),
            Command::Check,
        );
        assert_eq!(r.exit_code(), 1);
        assert_eq!(r.error.as_ref().unwrap().kind, "parse");
    }

    #[test]
    fn reports_are_deterministic() {
        let mut spec = fixture("c");
        spec.seed = Some(4);
        let gen = Command::Generate {
            degree_bound: 4,
            perturb: Some(1.0),
        };
        assert_eq!(run(&spec, gen).to_json(), run(&spec, gen).to_json());
        let generated = run(&spec, gen).input.unwrap();
        assert_eq!(
            run(&generated, Command::Check).to_json(),
            run(&generated, Command::Check).to_json()
        );
        assert_eq!(run(&generated, Command::Check).verdict, Some(VerdictKind::NotClosed));
    }

    #[test]
    fn cross_validate_and_web() {
        let r = run(&fixture("c"), Command::CrossValidate);
        assert_eq!(r.details["agreement"], json!(true));
        assert!(r.details["crosschecks"]["vanish_together"].as_bool().unwrap());
        let r = run(&fixture("w"), Command::Web);
        assert!(r.preconditions.unwrap().blaschke_unit);
        assert!(r.details["gamma"].is_array());
    }
}
