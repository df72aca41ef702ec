//! One solve, independent of formulation: instance bundle, form selection,
//! split files and the dispatch to the dense or path solver.

use std::str::FromStr;

use serde::Serialize;

use crate::dense::{SplitTensor, TensorEntry};
use crate::error::{Result, TeError};
use crate::path::{path_utilization, PathSplit, PathSplitRecord};
use crate::ssdo::{self, Form, SolveReport, SolverConfig, StartKind};
use crate::topology::{PathSet, Topology};
use crate::traffic::DemandMatrix;

/// Topology, candidate paths and demands of one problem instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub topology: Topology,
    pub paths: PathSet,
    pub demands: DemandMatrix,
}

impl Instance {
    /// Checks dimensions, paths against the topology, and that every
    /// demanded pair has a candidate path.
    pub fn validate(&self) -> Result<()> {
        let n = self.topology.node_count();
        if self.demands.node_count() != n {
            return Err(TeError::InvalidDemands(format!(
                "demand matrix is {0}x{0}, topology has {n} nodes",
                self.demands.node_count()
            )));
        }
        self.paths.validate(&self.topology)?;
        if let Some(((s, d), _)) = self
            .demands
            .demanded()
            .find(|((s, d), _)| self.paths.get(*s, *d).is_empty())
        {
            return Err(TeError::NoPath { src: s, dst: d });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FormChoice {
    /// Dense unless some candidate path has more than two hops.
    #[default]
    Auto,
    Dense,
    Path,
}

impl FromStr for FormChoice {
    type Err = TeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(FormChoice::Auto),
            "dense" => Ok(FormChoice::Dense),
            "path" => Ok(FormChoice::Path),
            other => Err(TeError::InvalidConfig(format!("unknown form {other:?}"))),
        }
    }
}

pub fn resolve_form(choice: FormChoice, paths: &PathSet) -> Result<Form> {
    let long = paths.max_hops() > 2;
    match choice {
        FormChoice::Auto if long => Ok(Form::Path),
        FormChoice::Auto | FormChoice::Dense if !long => Ok(Form::Dense),
        FormChoice::Dense => Err(TeError::InvalidPathSet(
            "dense form needs one- or two-hop paths; use the path form".into(),
        )),
        _ => Ok(Form::Path),
    }
}

/// Split configuration in either formulation.
#[derive(Debug, Clone, PartialEq)]
pub enum Split {
    Dense(SplitTensor),
    Path(PathSplit),
}

#[derive(Serialize)]
#[serde(untagged)]
enum SplitFile {
    Dense(Vec<TensorEntry>),
    Path(Vec<PathSplitRecord>),
}

impl Split {
    /// Converts to `form`; dense needs a one/two-hop path set.
    pub fn into_form(self, form: Form, paths: &PathSet) -> Result<Split> {
        Ok(match (self, form) {
            (Split::Dense(t), Form::Path) => Split::Path(PathSplit::from_tensor(&t, &paths.candidate_set()?)),
            (Split::Path(p), Form::Dense) => Split::Dense(p.to_tensor(&paths.candidate_set()?)),
            (s, _) => s,
        })
    }

    pub fn to_path_split(&self, paths: &PathSet) -> Result<PathSplit> {
        match self.clone().into_form(Form::Path, paths)? {
            Split::Path(p) => Ok(p),
            Split::Dense(_) => unreachable!("converted to path form"),
        }
    }

    pub fn to_json(&self, inst: &Instance) -> Result<String> {
        let file = match self {
            Split::Dense(t) => SplitFile::Dense(t.to_entries(&inst.topology)),
            Split::Path(p) => SplitFile::Path(p.to_records(&inst.paths, &inst.topology)),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    /// Parses either file shape: `{src, mid, dst, ratio}` entries or
    /// `{src, dst, paths}` records.
    pub fn from_json(text: &str, inst: &Instance) -> Result<Split> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let is_dense = value
            .as_array()
            .and_then(|a| a.first())
            .is_some_and(|e| e.get("mid").is_some());
        if is_dense {
            let entries: Vec<TensorEntry> = serde_json::from_value(value)?;
            let cs = inst.paths.candidate_set()?;
            Ok(Split::Dense(SplitTensor::from_entries(&entries, &inst.topology, &cs)?))
        } else {
            let records: Vec<PathSplitRecord> = serde_json::from_value(value)?;
            Ok(Split::Path(PathSplit::from_records(
                &records,
                &inst.paths,
                &inst.topology,
            )?))
        }
    }
}

/// Result of [`solve`].
#[derive(Debug, Clone)]
pub struct Solution {
    pub split: Split,
    pub report: SolveReport,
    /// Both runs when cold and hot starts were raced.
    pub dual: Option<DualReports>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DualReports {
    pub chosen: StartKind,
    pub cold: SolveReport,
    pub hot: SolveReport,
}

/// Solves `inst` in `form`, from `hot` when given, racing it against a cold
/// start when `dual` is set.
pub fn solve(inst: &Instance, form: Form, config: &SolverConfig, hot: Option<&Split>, dual: bool) -> Result<Solution> {
    inst.validate()?;
    let hot = hot.map(|s| s.clone().into_form(form, &inst.paths)).transpose()?;
    if dual && hot.is_none() {
        return Err(TeError::InvalidConfig("dual start needs a hot-start split".into()));
    }
    let (t, d, p) = (&inst.topology, &inst.demands, &inst.paths);
    Ok(match (form, hot) {
        (Form::Dense, Some(Split::Dense(h))) if dual => {
            let out = ssdo::run_dual_start(t, d, p, config, &h)?;
            dual_solution(Split::Dense(out.split.clone()), &out)
        }
        (Form::Path, Some(Split::Path(h))) if dual => {
            let out = ssdo::path_dual_start(t, d, p, config, &h)?;
            dual_solution(Split::Path(out.split.clone()), &out)
        }
        (Form::Dense, hot) => {
            let h = match hot {
                Some(Split::Dense(h)) => Some(h),
                _ => None,
            };
            let (split, report) = ssdo::run(t, d, p, config, h.as_ref())?;
            Solution {
                split: Split::Dense(split),
                report,
                dual: None,
            }
        }
        (Form::Path, hot) => {
            let h = match hot {
                Some(Split::Path(h)) => Some(h),
                _ => None,
            };
            let (split, report) = ssdo::path_ssdo(t, d, p, config, h.as_ref())?;
            Solution {
                split: Split::Path(split),
                report,
                dual: None,
            }
        }
    })
}

fn dual_solution<S>(split: Split, out: &ssdo::DualOutcome<S>) -> Solution {
    Solution {
        split,
        report: out.report().clone(),
        dual: Some(DualReports {
            chosen: out.chosen,
            cold: out.cold.clone(),
            hot: out.hot.clone(),
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeUtilization {
    pub src: String,
    pub dst: String,
    pub load: f64,
    pub utilization: f64,
}

/// Load and utilization of every usable edge under `split`, row-major.
pub fn edge_utilization(inst: &Instance, split: &Split) -> Result<Vec<EdgeUtilization>> {
    let ps = split.to_path_split(&inst.paths)?;
    let state = path_utilization(&inst.topology, &inst.demands, &inst.paths, &ps)?;
    Ok(state
        .loads
        .iter()
        .map(|(s, d, load, utilization)| EdgeUtilization {
            src: inst.topology.name(s).to_string(),
            dst: inst.topology.name(d).to_string(),
            load,
            utilization,
        })
        .collect())
}
