use std::path::Path;

use serde::Serialize;
use ssdo_te::experiment::{failure_sweep, perturb_sweep as run_perturb_sweep, rows_to_csv, FailureSweep, PerturbSweep};
use ssdo_te::fsio::{read_to_string, write_atomic};
use ssdo_te::oracle::{grid_global_optimum, grid_pair_optimum, OracleResult};
use ssdo_te::path::{PathRatio, PathSplitRecord};
use ssdo_te::problem::{
    edge_utilization, resolve_form, solve as solve_instance, DualReports, FormChoice, Instance, Split,
};
use ssdo_te::seeds::{stream_seed, Stream};
use ssdo_te::ssdo::{cold_start_paths, Form, SolveReport, SolverConfig, SubproblemMode};
use ssdo_te::topology::fixtures::{ring_deadlock_fixture, three_node_demands};
use ssdo_te::topology::io::{
    path_set_from_json, path_set_to_json, topology_from_graphml, topology_from_json, topology_to_json,
};
use ssdo_te::topology::{complete_dcn_topology, PathSet, Topology};
use ssdo_te::traffic::{gravity_demands_with, perturb_series, DemandMatrix, DemandSeries, GravityOptions};
use ssdo_te::{Result, TeError};

use crate::args::{
    FailureArgs, FormArg, GenArgs, InstanceArgs, OracleArgs, PerturbArgs, PerturbSweepArgs, SolveArgs, SolverArgs,
};
use crate::manifest::RunManifest;
use crate::{CliError, CliResult};

const DEFAULT_PATHS_PER_PAIR: usize = 4;

fn write_text(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, text.as_bytes())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

fn in_file<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.in_file(path.display().to_string()))
}

fn read_topology(path: &Path) -> Result<Topology> {
    in_file(path, topology_from_json(&read_to_string(path)?))
}

fn read_paths(path: &Path, topology: &Topology) -> Result<PathSet> {
    in_file(path, path_set_from_json(&read_to_string(path)?, topology))
}

/// Dense demands as CSV, or JSON when the file name ends in `.json`.
fn read_demands(path: &Path) -> Result<DemandMatrix> {
    let text = read_to_string(path)?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(TeError::from)
    } else {
        DemandMatrix::read_csv(text.as_bytes())
    };
    in_file(path, parsed)
}

fn read_series(path: &Path) -> Result<DemandSeries> {
    let series: DemandSeries = in_file(
        path,
        serde_json::from_str(&read_to_string(path)?).map_err(TeError::from),
    )?;
    in_file(path, DemandSeries::new(series.interval, series.snapshots))
}

fn load_instance(args: &InstanceArgs, manifest: &mut RunManifest) -> CliResult<Instance> {
    manifest.input("topology", &args.topology)?;
    manifest.input("paths", &args.paths)?;
    manifest.input("demands", &args.demands)?;
    let topology = read_topology(&args.topology)?;
    let paths = read_paths(&args.paths, &topology)?;
    let demands = read_demands(&args.demands)?;
    let inst = Instance {
        topology,
        paths,
        demands,
    };
    inst.validate()?;
    Ok(inst)
}

fn form_choice(f: FormArg) -> FormChoice {
    match f {
        FormArg::Auto => FormChoice::Auto,
        FormArg::Dense => FormChoice::Dense,
        FormArg::Path => FormChoice::Path,
    }
}

fn solver_config(a: &SolverArgs) -> Result<SolverConfig> {
    let config = SolverConfig {
        epsilon: a.epsilon,
        epsilon0: a.epsilon0,
        time_budget: a.budget_seconds,
        static_traversal: a.static_traversal,
        subproblem: if a.greedy_subproblem {
            SubproblemMode::GreedyVertex
        } else {
            SubproblemMode::Balanced
        },
    };
    config.validate()?;
    Ok(config)
}

fn config_echo(config: &SolverConfig) -> serde_json::Value {
    serde_json::to_value(config).expect("config serializes")
}

fn gen_paths(args: &GenArgs, topology: &Topology) -> Result<PathSet> {
    let k = if args.all_paths {
        topology.node_count().saturating_sub(1).max(1)
    } else {
        args.paths_per_pair.unwrap_or(DEFAULT_PATHS_PER_PAIR)
    };
    PathSet::k_shortest(topology, k)
}

pub fn gen(args: GenArgs) -> CliResult<()> {
    std::fs::create_dir_all(&args.out_dir).map_err(TeError::from)?;
    let out = |name: &str| args.out_dir.join(name);
    let gravity = args.gravity.or(args.total_volume);
    if args.snapshots.is_some() && gravity.is_none() {
        return Err(CliError::Usage("--snapshots needs --gravity".into()));
    }
    if args.snapshots.is_some_and(|m| m > 1) && args.gravity_noise.is_none() {
        return Err(CliError::Usage(
            "--snapshots above 1 needs --gravity-noise to vary the snapshots".into(),
        ));
    }

    if let Some(n) = args.ring_deadlock {
        if args.paths_per_pair.is_some() || args.all_paths || args.demands.is_some() || gravity.is_some() {
            return Err(CliError::Usage(
                "--ring-deadlock fixes its own paths and demands".into(),
            ));
        }
        let fx = ring_deadlock_fixture(n)?;
        let inst = &fx.instance;
        write_text(&out("topology.json"), &topology_to_json(&inst.topology)?)?;
        write_text(&out("paths.json"), &path_set_to_json(&inst.paths, &inst.topology)?)?;
        write_text(&out("demands.csv"), &inst.demands.to_csv_string())?;
        write_text(
            &out("split_detour.json"),
            &Split::Path(fx.all_detour.clone()).to_json(inst)?,
        )?;
        write_text(
            &out("split_direct.json"),
            &Split::Path(fx.all_direct.clone()).to_json(inst)?,
        )?;
        return Ok(());
    }

    let topology = if let Some(n) = args.complete {
        complete_dcn_topology(n, args.capacity)?
    } else {
        let path = args.graphml.as_deref().expect("clap requires one topology source");
        let text = read_to_string(path)?;
        in_file(path, topology_from_graphml(&text, &args.capacity_attr, args.capacity))?
    };
    let paths = gen_paths(&args, &topology)?;

    let options = GravityOptions {
        noise_sigma: args.gravity_noise,
        ..GravityOptions::default()
    };
    let demands = match (&args.demands, gravity) {
        (Some(spec), _) if spec == "manual:fig2" => {
            if topology.node_count() != 3 {
                return Err(CliError::Usage("manual:fig2 demands need a three-node topology".into()));
            }
            three_node_demands()
        }
        (Some(spec), _) => return Err(CliError::Usage(format!("unknown demand set {spec:?}"))),
        (None, Some(total)) => {
            gravity_demands_with(&topology, total, stream_seed(args.seed, Stream::Traffic, 0), &options)?
        }
        (None, None) => return Err(CliError::Usage("choose --demands or --gravity".into())),
    };
    let inst = Instance {
        topology,
        paths,
        demands,
    };
    inst.validate()?;

    write_text(&out("topology.json"), &topology_to_json(&inst.topology)?)?;
    write_text(&out("paths.json"), &path_set_to_json(&inst.paths, &inst.topology)?)?;
    write_text(&out("demands.csv"), &inst.demands.to_csv_string())?;
    if let (Some(m), Some(total)) = (args.snapshots, gravity) {
        let mut snapshots = vec![inst.demands.clone()];
        for i in 1..m {
            let seed = stream_seed(args.seed, Stream::Traffic, i as u64);
            snapshots.push(gravity_demands_with(&inst.topology, total, seed, &options)?);
        }
        write_json(
            &out("series.json"),
            &DemandSeries::new(args.interval.clone(), snapshots)?,
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ReportFile<'a> {
    #[serde(flatten)]
    report: &'a SolveReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    dual: Option<&'a DualReports>,
    manifest: RunManifest,
}

pub fn solve(args: SolveArgs) -> CliResult<()> {
    let mut manifest = RunManifest::new("solve");
    let inst = load_instance(&args.instance, &mut manifest)?;
    let config = solver_config(&args.solver)?;
    let form = resolve_form(form_choice(args.solver.form), &inst.paths)?;
    let hot = match &args.hot_start {
        Some(path) => {
            manifest.input("hot_start", path)?;
            Some(in_file(path, Split::from_json(&read_to_string(path)?, &inst))?)
        }
        None => None,
    };
    let solution = solve_instance(&inst, form, &config, hot.as_ref(), args.dual_start)?;

    if let Some(path) = &args.split_out {
        write_text(path, &solution.split.to_json(&inst)?)?;
        manifest.output("split", path);
    }
    if let Some(path) = &args.util_csv {
        let rows = edge_utilization(&inst, &solution.split)?;
        write_text(path, &rows_to_csv(&rows)?)?;
        manifest.output("utilization", path);
    }
    manifest.output("report", &args.report);
    manifest.config = config_echo(&config);
    manifest.form = Some(
        match form {
            Form::Dense => "dense",
            Form::Path => "path",
        }
        .to_string(),
    );
    let file = ReportFile {
        report: &solution.report,
        dual: solution.dual.as_ref(),
        manifest,
    };
    write_json(&args.report, &file)?;
    Ok(())
}

#[derive(Serialize)]
struct OracleFile {
    optimal_mlu: f64,
    grid_step: f64,
    points: usize,
    /// Optimized pairs with their argmin ratios.
    argmin: Vec<PathSplitRecord>,
    manifest: RunManifest,
}

fn parse_pair(spec: &str, topology: &Topology) -> CliResult<(usize, usize)> {
    let (s, d) = spec
        .split_once(',')
        .ok_or_else(|| CliError::Usage(format!("--pair expects SRC,DST, got {spec:?}")))?;
    let node = |name: &str| {
        topology
            .node_index(name.trim())
            .ok_or_else(|| CliError::Usage(format!("unknown node {name:?} in --pair")))
    };
    Ok((node(s)?, node(d)?))
}

fn named_argmin(result: &OracleResult, inst: &Instance) -> Vec<PathSplitRecord> {
    let names = |p: &[usize]| p.iter().map(|&v| inst.topology.name(v).to_string()).collect();
    result
        .argmin
        .iter()
        .map(|pr| PathSplitRecord {
            src: inst.topology.name(pr.sd.0).to_string(),
            dst: inst.topology.name(pr.sd.1).to_string(),
            paths: inst
                .paths
                .get(pr.sd.0, pr.sd.1)
                .iter()
                .zip(&pr.ratios)
                .map(|(p, &ratio)| PathRatio { path: names(p), ratio })
                .collect(),
        })
        .collect()
}

pub fn oracle(args: OracleArgs) -> CliResult<()> {
    let mut manifest = RunManifest::new("oracle");
    let inst = load_instance(&args.instance, &mut manifest)?;
    let result = match &args.pair {
        Some(spec) => {
            let sd = parse_pair(spec, &inst.topology)?;
            if inst.demands.get(sd.0, sd.1) <= 0.0 {
                return Err(CliError::Usage(format!("pair {spec} has no demand")));
            }
            let split = match &args.split {
                Some(path) => {
                    manifest.input("split", path)?;
                    in_file(path, Split::from_json(&read_to_string(path)?, &inst))?.to_path_split(&inst.paths)?
                }
                None => cold_start_paths(&inst.demands, &inst.paths)?,
            };
            grid_pair_optimum(&inst.topology, &inst.demands, &inst.paths, &split, sd, args.step)?
        }
        None => grid_global_optimum(&inst.topology, &inst.demands, &inst.paths, args.step)?,
    };
    manifest.output("oracle", &args.out);
    let file = OracleFile {
        optimal_mlu: result.optimal_mlu,
        grid_step: result.grid_step,
        points: result.points,
        argmin: named_argmin(&result, &inst),
        manifest,
    };
    write_json(&args.out, &file)?;
    Ok(())
}

pub fn failures(args: FailureArgs) -> CliResult<()> {
    let mut manifest = RunManifest::new("experiment failures");
    let inst = load_instance(&args.instance, &mut manifest)?;
    let config = solver_config(&args.solver)?;
    let k = args
        .paths_per_pair
        .unwrap_or_else(|| inst.paths.pairs().map(|(_, p)| p.len()).max().unwrap_or(1));
    let sweep = FailureSweep {
        counts: args.counts.clone(),
        trials: args.trials,
        seed: args.seed,
        paths_per_pair: k,
        form: form_choice(args.solver.form),
        normalize: args.normalize,
    };
    let rows = failure_sweep(&inst, &sweep, &config)?;
    write_text(&args.out, &rows_to_csv(&rows)?)?;
    Ok(())
}

pub fn perturb_sweep(args: PerturbSweepArgs) -> CliResult<()> {
    let mut manifest = RunManifest::new("experiment perturb");
    manifest.input("topology", &args.topology)?;
    manifest.input("paths", &args.paths)?;
    manifest.input("series", &args.series)?;
    let topology = read_topology(&args.topology)?;
    let paths = read_paths(&args.paths, &topology)?;
    let series = read_series(&args.series)?;
    let config = solver_config(&args.solver)?;
    let sweep = PerturbSweep {
        scales: args.scales.clone(),
        seed: args.seed,
        form: form_choice(args.solver.form),
        normalize: args.normalize,
    };
    let rows = run_perturb_sweep(&topology, &paths, &series, &sweep, &config)?;
    write_text(&args.out, &rows_to_csv(&rows)?)?;
    Ok(())
}

pub fn perturb(args: PerturbArgs) -> CliResult<()> {
    let mut manifest = RunManifest::new("perturb");
    manifest.input("series", &args.series)?;
    let series = read_series(&args.series)?;
    let out = perturb_series(&series, args.scale, stream_seed(args.seed, Stream::Perturb, 0))?;
    write_json(&args.out, &out)?;
    Ok(())
}
