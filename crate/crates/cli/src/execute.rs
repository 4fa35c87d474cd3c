//! Task dispatch and report assembly.

use padic_radii::berkovich::{self, BerkovichPoint};
use padic_radii::diffmod::{
    antecedent_exists, check_subharmonicity, check_variation, descendant_multiset, descendant_sum_check, pi_val,
    radii_profile_with, robba_condition, separated, CyclicOperator, PadicPoly, ProfileOptions, RadiiProfile, Tri,
};
use padic_radii::dwork::{as_is_trivial, as_prepare, b1_along_path, b1_profile};
use padic_radii::newton::{newton_polygon, parametric_hull, PolygonSlopes};
use padic_radii::valuation::{self, monomial_invariants, rational_rank, InvariantTuple, WeightVector};
use padic_radii::{Error, PLFun};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::document::{BerkovichOp, Check, NewtonInput, ProblemDocument, ProfileSource, Task, TaskSpec, VERSION};
use crate::wire::{
    as_param_json, disc_json, hahn_json, int_json, interval_json, logvalue_json, point_json, radius_json,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Fail,
    Indeterminate,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Fail => "fail",
            Status::Indeterminate => "indeterminate",
        }
    }

    fn from_tri(t: Tri) -> Self {
        match t {
            Tri::True => Status::Ok,
            Tri::False => Status::Fail,
            Tri::Indeterminate => Status::Indeterminate,
        }
    }
}

/// A computed curve, for CSV and SVG emission.
#[derive(Clone, Debug)]
pub struct Artifact {
    pub name: String,
    pub csv: String,
    pub curves: Vec<PLFun>,
}

#[derive(Clone, Debug)]
pub struct TaskReport {
    pub index: usize,
    pub task: &'static str,
    pub id: Option<String>,
    pub status: Status,
    pub outputs: Map<String, Value>,
    pub diagnostics: Vec<String>,
    pub artifacts: Vec<Artifact>,
}

impl TaskReport {
    /// Stem for files written alongside the report.
    pub fn file_stem(&self) -> String {
        match &self.id {
            Some(id) => {
                let safe: String =
                    id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect();
                format!("{:02}-{safe}", self.index)
            }
            None => format!("{:02}-{}", self.index, self.task),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub p: u32,
    pub tasks: Vec<TaskReport>,
}

impl Report {
    pub fn all_ok(&self) -> bool {
        self.tasks.iter().all(|t| t.status == Status::Ok)
    }

    /// Pretty JSON with sorted keys. `generated_unix` is omitted when `None`.
    pub fn to_json(&self, generated_unix: Option<u64>) -> String {
        let tasks: Vec<Value> = self
            .tasks
            .iter()
            .map(|t| {
                json!({
                    "index": t.index,
                    "task": t.task,
                    "id": t.id,
                    "status": t.status.as_str(),
                    "outputs": Value::Object(t.outputs.clone()),
                    "diagnostics": t.diagnostics,
                })
            })
            .collect();
        let mut doc = json!({ "version": VERSION, "p": self.p, "tasks": tasks });
        if let Some(ts) = generated_unix {
            doc["generated_unix"] = json!(ts);
        }
        let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
        text.push('\n');
        text
    }
}

/// Run every task (or only `check` tasks) in parallel; report order
/// follows the document.
pub fn execute(doc: &ProblemDocument, checks_only: bool) -> Report {
    let tasks = doc
        .tasks
        .par_iter()
        .enumerate()
        .filter(|(_, t)| !checks_only || matches!(t.task, Task::Check { .. }))
        .map(|(index, spec)| run_task(doc.p, index, spec))
        .collect();
    Report { p: doc.p, tasks }
}

struct Out {
    status: Status,
    outputs: Map<String, Value>,
    diagnostics: Vec<String>,
    artifacts: Vec<Artifact>,
}

impl Out {
    fn new() -> Self {
        Out { status: Status::Ok, outputs: Map::new(), diagnostics: Vec::new(), artifacts: Vec::new() }
    }

    fn set(&mut self, key: &str, v: Value) {
        self.outputs.insert(key.to_string(), v);
    }

    fn plfun(&mut self, key: &str, f: &PLFun) {
        let csv = f.to_csv();
        self.set(key, json!(csv));
        self.set(&format!("{key}_domain"), interval_json(f.domain()));
        self.artifacts.push(Artifact { name: key.to_string(), csv, curves: vec![f.clone()] });
    }

    fn profile(&mut self, key: &str, prof: &RadiiProfile) {
        let csv = prof.to_csv();
        self.set(key, json!(csv));
        self.set("rank", json!(prof.rank()));
        self.set("exact", json!(prof.is_exact()));
        let curves = prof.entries().iter().flatten().flat_map(|t| [t.lower().clone(), t.upper().clone()]).collect();
        self.artifacts.push(Artifact { name: key.to_string(), csv, curves });
    }

    fn degrade(&mut self, s: Status) {
        self.status = match (self.status, s) {
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            (Status::Indeterminate, _) | (_, Status::Indeterminate) => Status::Indeterminate,
            _ => Status::Ok,
        };
    }
}

fn run_task(p: u32, index: usize, spec: &TaskSpec) -> TaskReport {
    let mut out = Out::new();
    if let Err(e) = dispatch(p, &spec.task, &mut out) {
        out.status = Status::Fail;
        out.diagnostics.push(e.to_string());
    }
    TaskReport {
        index,
        task: spec.task.name(),
        id: spec.id.clone(),
        status: out.status,
        outputs: out.outputs,
        diagnostics: out.diagnostics,
        artifacts: out.artifacts,
    }
}

fn slopes_json(s: &PolygonSlopes) -> Value {
    Value::Array(s.slopes.iter().map(|(v, m)| json!({ "slope": logvalue_json(v), "width": m })).collect())
}

fn tri(t: Tri) -> Value {
    json!(t.as_str())
}

fn matrix_json(m: &valuation::IntMatrix) -> Value {
    Value::Array(m.iter().map(|row| Value::Array(row.iter().map(int_json).collect())).collect())
}

fn invariants_json(t: &InvariantTuple) -> Value {
    json!({ "trdeg": t.trdeg, "ratrank": t.ratrank, "restrdeg": t.restrdeg, "defect": t.defect })
}

fn dispatch(p: u32, task: &Task, out: &mut Out) -> Result<(), Error> {
    match task {
        Task::Radii { coeffs, interval, cyclic_only, has_zero_endpoint } => {
            let op = CyclicOperator::new(p, coeffs.clone())?;
            let prof = radii_profile_with(&op, interval, ProfileOptions { cyclic_only: *cyclic_only })?;
            out.profile("profile", &prof);
            let rep = check_variation(&prof, *has_zero_endpoint);
            out.set(
                "variation",
                json!({
                    "slope_denominators": rep.slope_denominators,
                    "above_identity": rep.above_identity,
                    "convex_partial_sums": tri(rep.convex_partial_sums),
                    "nonpositive_slopes": tri(rep.nonpositive_slopes),
                    "passes": rep.passes(),
                }),
            );
            if !rep.passes() {
                out.degrade(Status::Fail);
                out.diagnostics.push("variation check failed".into());
            }
        }
        Task::Dwork { r, interval } => {
            let f = padic_radii::diffmod::dwork_profile(p, r, interval)?;
            out.plfun("profile", &f);
        }
        Task::B1 { u, interval } => {
            let f = b1_profile(u, interval)?;
            out.plfun("b1", &f);
            out.set("trivial", json!(as_is_trivial(u, interval)?));
        }
        Task::B1Path { u, z, window } => {
            let path = b1_along_path(u, z, window)?;
            out.plfun("b1", &path.b1);
            out.set("terminal_slope", logvalue_json(&path.terminal_slope()));
            out.set("endpoint", path.endpoint.as_ref().map_or(Value::Null, logvalue_json));
            out.set("convex", json!(path.b1.is_convex()));
        }
        Task::Prepare { u } => {
            let (v, dropped) = as_prepare(u);
            out.set("prepared", as_param_json(&v));
            out.set("constant_term", hahn_json(&dropped));
            out.set("display", json!(v.to_string()));
        }
        Task::Newton(NewtonInput::Points(points)) => {
            let s = newton_polygon(points)?;
            out.set("slopes", slopes_json(&s));
        }
        Task::Newton(NewtonInput::Hull { polys, interval }) => {
            let hull = parametric_hull(polys, interval)?;
            let cells: Vec<Value> = hull
                .cells
                .iter()
                .map(|c| {
                    let edges: Vec<Value> = c
                        .edges
                        .iter()
                        .map(|e| json!({ "left": e.left, "right": e.right, "slope": e.slope.to_csv() }))
                        .collect();
                    json!({ "interval": interval_json(&c.interval), "edges": edges })
                })
                .collect();
            out.set("cells", Value::Array(cells));
        }
        Task::Descend { radii, at } => {
            let ms = descendant_multiset(radii, at, p)?;
            out.set("multiset", Value::Array(ms.iter().map(logvalue_json).collect()));
            let mut sorted = radii.clone();
            sorted.sort_by(|a, b| b.cmp(a));
            let c = pi_val(p);
            let mut checks = Map::new();
            for (k, f) in sorted.iter().enumerate() {
                if *f < c {
                    let ok = descendant_sum_check(radii, &ms, k + 1, p)?;
                    checks.insert((k + 1).to_string(), json!(ok));
                    if !ok {
                        out.degrade(Status::Fail);
                        out.diagnostics.push(format!("sum identity fails at i = {}", k + 1));
                    }
                }
            }
            out.set("sum_checks", Value::Object(checks));
        }
        Task::Zariski { c, r } => {
            let a = valuation::zariski_matrix(c, *r)?;
            let inv = valuation::inverse_unimodular(&a).ok_or_else(|| Error::Inconsistent("not unimodular".into()))?;
            let image = valuation::apply(&a, c);
            out.set("matrix", matrix_json(&a));
            out.set("inverse", matrix_json(&inv));
            out.set("det", int_json(&valuation::det(&a)));
            out.set("image", Value::Array(image.iter().map(logvalue_json).collect()));
            out.set(
                "postconditions",
                json!({
                    "unimodular": true,
                    "nonnegative_inverse": inv.iter().flatten().all(|x| x.sign() != num_bigint::Sign::Minus),
                    "sign_pattern": image.iter().enumerate().all(|(i, x)| if i < *r { x.is_positive() } else { x.is_zero() }),
                }),
            );
        }
        Task::Berkovich(op) => berkovich_task(op, out)?,
        Task::Invariants { weights, extend } => {
            let w = WeightVector::new(weights.clone())?;
            let base = monomial_invariants(&w);
            out.set("rational_rank", json!(rational_rank(weights)));
            out.set("monomial", invariants_json(&base));
            let mut chain = Vec::new();
            let mut cur = base;
            for t in extend {
                cur = valuation::extend_invariants(&cur, *t);
                chain.push(json!({ "point_type": t.as_str(), "invariants": invariants_json(&cur) }));
            }
            out.set("chain", Value::Array(chain));
        }
        Task::Check { source, checks } => check_task(p, source, checks, out)?,
    }
    Ok(())
}

fn berkovich_task(op: &BerkovichOp, out: &mut Out) -> Result<(), Error> {
    let undecidable = |out: &mut Out, r: Result<Value, Error>| -> Result<Value, Error> {
        match r {
            Err(Error::UndecidableFromPrefix) => {
                out.degrade(Status::Indeterminate);
                out.diagnostics.push(Error::UndecidableFromPrefix.to_string());
                Ok(json!("indeterminate"))
            }
            other => other,
        }
    };
    match op {
        BerkovichOp::Classify(a) => out.set("point_type", json!(a.classify().as_str())),
        BerkovichOp::Dominates(a, b) => {
            let v = undecidable(out, berkovich::dominates(a, b).map(|x| json!(x)))?;
            out.set("dominates", v);
        }
        BerkovichOp::Meet(a, b) => {
            let v = undecidable(out, berkovich::meet(a, b).map(|m| point_json(&m)))?;
            out.set("meet", v);
        }
        BerkovichOp::PathPoint(a, s) => {
            let v = undecidable(out, berkovich::path_point(a, s).map(|m: BerkovichPoint| point_json(&m)))?;
            out.set("point", v);
        }
        BerkovichOp::DisjointDiscs { roots, lead_val, z1_index, s1, z2 } => {
            let rep = berkovich::check_disjoint_discs(roots, lead_val, *z1_index, s1, z2)?;
            out.set("hypothesis", json!(rep.hypothesis));
            out.set("val_at_z2", radius_json(&rep.val_at_z2));
            out.set("val_norm_at_disc", radius_json(&rep.val_norm_at_disc));
            out.set("holds", json!(rep.holds));
            if rep.hypothesis && !rep.holds {
                out.degrade(Status::Fail);
                out.diagnostics.push("strict inequality fails".into());
            }
        }
        BerkovichOp::UnionDiscs(cs) => {
            let set = berkovich::union_discs(cs)?;
            out.set("discs", Value::Array(set.discs.iter().map(disc_json).collect()));
            out.set("disjoint", json!(set.disjoint));
        }
    }
    Ok(())
}

fn check_task(p: u32, source: &ProfileSource, checks: &[Check], out: &mut Out) -> Result<(), Error> {
    let prof = match source {
        ProfileSource::Csv(text) => RadiiProfile::from_csv(p, text)?,
        ProfileSource::Cyclic { coeffs, interval } => {
            radii_profile_with(&CyclicOperator::new(p, coeffs.clone())?, interval, ProfileOptions::default())?
        }
        ProfileSource::Dwork { r, interval } => {
            RadiiProfile::from_exact(p, vec![padic_radii::diffmod::dwork_profile(p, r, interval)?])?
        }
    };
    let mut results = Vec::new();
    for c in checks {
        let (result, details) = match c {
            Check::Variation { has_zero_endpoint } => {
                let rep = check_variation(&prof, *has_zero_endpoint);
                let parts = [
                    Tri::from_bool(rep.slope_denominators),
                    Tri::from_bool(rep.above_identity),
                    rep.convex_partial_sums,
                    rep.nonpositive_slopes,
                ];
                let result = if parts.contains(&Tri::False) {
                    Tri::False
                } else if parts.contains(&Tri::Indeterminate) {
                    Tri::Indeterminate
                } else {
                    Tri::True
                };
                let details = json!({
                    "slope_denominators": rep.slope_denominators,
                    "above_identity": rep.above_identity,
                    "convex_partial_sums": tri(rep.convex_partial_sums),
                    "nonpositive_slopes": tri(rep.nonpositive_slopes),
                });
                (result, details)
            }
            Check::Robba { interval } => (robba_condition(&prof, interval)?, Value::Null),
            Check::Separated { index, interval } => (separated(&prof, *index, interval)?, Value::Null),
            Check::Antecedent { interval } => (Tri::from_bool(antecedent_exists(&prof, interval)?), Value::Null),
            Check::Subharmonicity { r, translates } => {
                let rep = check_subharmonicity(&PadicPoly::new(p, r.clone()), translates, p)?;
                let details = json!({
                    "lhs": rep.lhs.iter().map(logvalue_json).collect::<Vec<_>>(),
                    "rhs": rep.rhs.iter().map(logvalue_json).collect::<Vec<_>>(),
                });
                (Tri::from_bool(rep.holds()), details)
            }
        };
        out.degrade(Status::from_tri(result));
        if result != Tri::True {
            out.diagnostics.push(format!("{} check is {}", c.name(), result.as_str()));
        }
        results.push(json!({ "kind": c.name(), "result": result.as_str(), "details": details }));
    }
    out.set("checks", Value::Array(results));
    out.set("profile", json!(prof.to_csv()));
    Ok(())
}
