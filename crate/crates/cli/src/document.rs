//! Problem documents. Every payload is validated into typed data before
//! anything is computed.

use std::sync::Arc;

use padic_radii::berkovich::{BerkovichPoint, PointType, RootConstraint};
use padic_radii::dwork::ASParameter;
use padic_radii::newton::ValuedPoly;
use padic_radii::{GaloisField, HahnElement, Interval, LogValue, Rational};
use serde_json::Value;

use crate::wire::{At, WireError, WireResult};

pub const VERSION: &str = "padic-radii/1";

pub const TASK_NAMES: [&str; 11] =
    ["radii", "dwork", "b1", "b1path", "prepare", "newton", "descend", "zariski", "berkovich", "invariants", "check"];

#[derive(Debug)]
pub struct ProblemDocument {
    pub p: u32,
    pub field: Arc<GaloisField>,
    pub tasks: Vec<TaskSpec>,
}

#[derive(Debug)]
pub struct TaskSpec {
    pub id: Option<String>,
    pub task: Task,
}

#[derive(Debug)]
pub enum Task {
    Radii { coeffs: Vec<ValuedPoly>, interval: Interval, cyclic_only: bool, has_zero_endpoint: bool },
    Dwork { r: ValuedPoly, interval: Interval },
    B1 { u: ASParameter, interval: Interval },
    B1Path { u: ASParameter, z: HahnElement, window: LogValue },
    Prepare { u: ASParameter },
    Newton(NewtonInput),
    Descend { radii: Vec<LogValue>, at: LogValue },
    Zariski { c: Vec<LogValue>, r: usize },
    Berkovich(BerkovichOp),
    Invariants { weights: Vec<LogValue>, extend: Vec<PointType> },
    Check { source: ProfileSource, checks: Vec<Check> },
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Radii { .. } => "radii",
            Task::Dwork { .. } => "dwork",
            Task::B1 { .. } => "b1",
            Task::B1Path { .. } => "b1path",
            Task::Prepare { .. } => "prepare",
            Task::Newton(_) => "newton",
            Task::Descend { .. } => "descend",
            Task::Zariski { .. } => "zariski",
            Task::Berkovich(_) => "berkovich",
            Task::Invariants { .. } => "invariants",
            Task::Check { .. } => "check",
        }
    }
}

#[derive(Debug)]
pub enum NewtonInput {
    Points(Vec<(i64, LogValue)>),
    Hull { polys: Vec<ValuedPoly>, interval: Interval },
}

#[derive(Debug)]
pub enum BerkovichOp {
    Classify(BerkovichPoint),
    Dominates(BerkovichPoint, BerkovichPoint),
    Meet(BerkovichPoint, BerkovichPoint),
    PathPoint(BerkovichPoint, LogValue),
    DisjointDiscs { roots: Vec<HahnElement>, lead_val: LogValue, z1_index: usize, s1: LogValue, z2: HahnElement },
    UnionDiscs(Vec<RootConstraint>),
}

#[derive(Debug)]
pub enum ProfileSource {
    Csv(String),
    Cyclic { coeffs: Vec<ValuedPoly>, interval: Interval },
    Dwork { r: ValuedPoly, interval: Interval },
}

#[derive(Debug)]
pub enum Check {
    Variation { has_zero_endpoint: bool },
    Robba { interval: Interval },
    Separated { index: usize, interval: Interval },
    Antecedent { interval: Interval },
    Subharmonicity { r: Vec<Rational>, translates: Vec<Rational> },
}

impl Check {
    pub fn name(&self) -> &'static str {
        match self {
            Check::Variation { .. } => "variation",
            Check::Robba { .. } => "robba",
            Check::Separated { .. } => "separated",
            Check::Antecedent { .. } => "antecedent",
            Check::Subharmonicity { .. } => "subharmonicity",
        }
    }
}

pub fn load_document(text: &str) -> WireResult<ProblemDocument> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| WireError { path: String::new(), message: format!("malformed JSON: {e}") })?;
    let root = At::root(&value);
    if !value.is_object() {
        return root.err("a document is a JSON object");
    }
    let version = root.field("version")?;
    if version.at().str()? != VERSION {
        return version.at().err(format!("unrecognized version; expected \"{VERSION}\""));
    }
    let p_field = root.field("p")?;
    let p = p_field.at().uint()?;
    let degree = match root.opt("degree") {
        Some(d) => d.at().uint()?,
        None => 1,
    };
    let field = GaloisField::new(p, degree).or_else(|e| p_field.at().err(e.to_string()))?;
    let tasks = root
        .field("tasks")?
        .at()
        .items()?
        .iter()
        .map(|t| task_spec(&t.at(), &field))
        .collect::<WireResult<Vec<_>>>()?;
    Ok(ProblemDocument { p, field, tasks })
}

fn task_spec(at: &At<'_>, field: &Arc<GaloisField>) -> WireResult<TaskSpec> {
    if !at.value.is_object() {
        return at.err("a task is a JSON object");
    }
    let id = match at.opt("id") {
        Some(id) => Some(id.at().str()?.to_string()),
        None => None,
    };
    let name_field = at.field("task")?;
    let name = name_field.at().str()?;
    let flag = |name: &str| at.opt(name).map_or(Ok(false), |f| f.at().bool());
    let task = match name {
        "radii" => Task::Radii {
            coeffs: polys(&at.field("coeffs")?.at())?,
            interval: at.field("interval")?.at().interval()?,
            cyclic_only: flag("cyclic_only")?,
            has_zero_endpoint: flag("has_zero_endpoint")?,
        },
        "dwork" => Task::Dwork { r: at.field("r")?.at().valued_poly()?, interval: at.field("interval")?.at().interval()? },
        "b1" => Task::B1 { u: at.field("u")?.at().as_param(field)?, interval: at.field("interval")?.at().interval()? },
        "b1path" => Task::B1Path {
            u: at.field("u")?.at().as_param(field)?,
            z: at.field("z")?.at().hahn(field)?,
            window: at.field("window")?.at().logvalue()?,
        },
        "prepare" => Task::Prepare { u: at.field("u")?.at().as_param(field)? },
        "newton" => Task::Newton(match at.opt("points") {
            Some(pts) => NewtonInput::Points(
                pts.at()
                    .items()?
                    .iter()
                    .map(|pt| {
                        let parts = pt.at().items()?;
                        if parts.len() != 2 {
                            return pt.at().err("a point is [abscissa, ordinate]");
                        }
                        Ok((parts[0].at().int()?, parts[1].at().logvalue()?))
                    })
                    .collect::<WireResult<_>>()?,
            ),
            None => NewtonInput::Hull {
                polys: polys(&at.field("polys")?.at())?,
                interval: at.field("interval")?.at().interval()?,
            },
        }),
        "descend" => {
            Task::Descend { radii: at.field("radii")?.at().logvalues()?, at: at.field("at")?.at().logvalue()? }
        }
        "zariski" => Task::Zariski {
            c: at.field("c")?.at().logvalues()?,
            r: at.field("r")?.at().uint()? as usize,
        },
        "berkovich" => Task::Berkovich(berkovich_op(at, field)?),
        "invariants" => Task::Invariants {
            weights: at.field("weights")?.at().logvalues()?,
            extend: match at.opt("extend") {
                Some(ext) => ext.at().items()?.iter().map(|t| point_type(&t.at())).collect::<WireResult<_>>()?,
                None => Vec::new(),
            },
        },
        "check" => Task::Check {
            source: profile_source(&at.field("profile")?.at())?,
            checks: at.field("checks")?.at().items()?.iter().map(|c| check(&c.at())).collect::<WireResult<_>>()?,
        },
        other => {
            return name_field.at().err(format!("unknown task `{other}`; permitted: {}", TASK_NAMES.join(", ")));
        }
    };
    Ok(TaskSpec { id, task })
}

fn polys(at: &At<'_>) -> WireResult<Vec<ValuedPoly>> {
    at.items()?.iter().map(|c| c.at().valued_poly()).collect()
}

fn point_type(at: &At<'_>) -> WireResult<PointType> {
    match at.str()? {
        "i" => Ok(PointType::Classical),
        "ii" => Ok(PointType::RationalRadius),
        "iii" => Ok(PointType::IrrationalRadius),
        "iv" | "iv-prefix" => Ok(PointType::NestedPrefix),
        other => at.err(format!("unknown point type `{other}`; permitted: i, ii, iii, iv")),
    }
}

fn berkovich_op(at: &At<'_>, field: &Arc<GaloisField>) -> WireResult<BerkovichOp> {
    let op_field = at.field("op")?;
    let point = |name: &str| at.field(name)?.at().point(field);
    Ok(match op_field.at().str()? {
        "classify" => BerkovichOp::Classify(point("a")?),
        "dominates" => BerkovichOp::Dominates(point("a")?, point("b")?),
        "meet" => BerkovichOp::Meet(point("a")?, point("b")?),
        "path_point" => BerkovichOp::PathPoint(point("a")?, at.field("s")?.at().logvalue()?),
        "disjoint_discs" => BerkovichOp::DisjointDiscs {
            roots: at.field("roots")?.at().hahns(field)?,
            lead_val: at.field("lead_val")?.at().logvalue()?,
            z1_index: at.field("z1_index")?.at().uint()? as usize,
            s1: at.field("s1")?.at().logvalue()?,
            z2: at.field("z2")?.at().hahn(field)?,
        },
        "union_discs" => BerkovichOp::UnionDiscs(
            at.field("constraints")?
                .at()
                .items()?
                .iter()
                .map(|c| {
                    let c = c.at();
                    Ok(RootConstraint {
                        roots: c.field("roots")?.at().hahns(field)?,
                        lead_val: c.field("lead_val")?.at().logvalue()?,
                        bound: c.field("bound")?.at().logvalue()?,
                    })
                })
                .collect::<WireResult<_>>()?,
        ),
        other => {
            return op_field.at().err(format!(
                "unknown berkovich op `{other}`; permitted: classify, dominates, meet, path_point, disjoint_discs, union_discs"
            ))
        }
    })
}

fn profile_source(at: &At<'_>) -> WireResult<ProfileSource> {
    if let Some(csv) = at.opt("csv") {
        return Ok(ProfileSource::Csv(csv.at().str()?.to_string()));
    }
    if let Some(r) = at.opt("dwork") {
        return Ok(ProfileSource::Dwork { r: r.at().valued_poly()?, interval: at.field("interval")?.at().interval()? });
    }
    if let Some(coeffs) = at.opt("coeffs") {
        return Ok(ProfileSource::Cyclic { coeffs: polys(&coeffs.at())?, interval: at.field("interval")?.at().interval()? });
    }
    at.err("a profile is given by `csv`, `dwork` or `coeffs`")
}

fn check(at: &At<'_>) -> WireResult<Check> {
    let kind = at.field("kind")?;
    let interval = || at.field("interval")?.at().interval();
    let rationals = |name: &str| -> WireResult<Vec<Rational>> {
        at.field(name)?.at().items()?.iter().map(|x| x.at().rational()).collect()
    };
    Ok(match kind.at().str()? {
        "variation" => Check::Variation {
            has_zero_endpoint: at.opt("has_zero_endpoint").map_or(Ok(false), |f| f.at().bool())?,
        },
        "robba" => Check::Robba { interval: interval()? },
        "separated" => Check::Separated { index: at.field("index")?.at().uint()? as usize, interval: interval()? },
        "antecedent" => Check::Antecedent { interval: interval()? },
        "subharmonicity" => Check::Subharmonicity { r: rationals("r")?, translates: rationals("translates")? },
        other => {
            return kind
                .at()
                .err(format!("unknown check `{other}`; permitted: variation, robba, separated, antecedent, subharmonicity"))
        }
    })
}
