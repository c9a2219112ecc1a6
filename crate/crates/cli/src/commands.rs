use bvis_core::estimators::exact_expectation_walkers;
use bvis_core::theory::{MeanValueKind, DEFAULT_TOL};
use bvis_core::{
    aggregate_trials, density_walkers, density_watchpoints, derive_trial_seed,
    exact_expectation_watchpoints, validate_watchpoint_set, AggregateResult, BExponent,
    DensityResult, LatticePoint, Mode, ShiftVector, SimulationSpec, WalkerConfig,
};
use serde_json::{json, Value};

use crate::args::{
    Cli, Command, DensityCmd, ExactCmd, MeanValueKindArg, SimulateCmd, Table1Args, Table2Args,
    VerifyCmd,
};
use crate::checks::{self, Check};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Record, Table};

/// Watchpoints of the single-walker table.
pub const TABLE1_WATCHPOINTS: [LatticePoint; 3] = [
    LatticePoint::new(0, 0),
    LatticePoint::new(1, 2),
    LatticePoint::new(2, 1),
];

pub const TABLE1_B: [(u32, u32); 8] = [
    (1, 2),
    (1, 3),
    (1, 4),
    (1, 5),
    (2, 3),
    (2, 5),
    (3, 4),
    (3, 5),
];

pub const TABLE2_B: [(u32, u32); 2] = [(2, 3), (3, 5)];

pub struct Outcome {
    pub record: Record,
    /// Set by `verify` when a check failed.
    pub failed: bool,
}

impl From<Record> for Outcome {
    fn from(record: Record) -> Self {
        Outcome { record, failed: false }
    }
}

pub fn execute(cli: &Cli) -> CliResult<Outcome> {
    match &cli.command {
        Command::Density(cmd) => density(cmd).map(Into::into),
        Command::Simulate(cmd) => simulate(cmd, cli.max_work).map(Into::into),
        Command::Exact(cmd) => exact(cmd).map(Into::into),
        Command::Verify(cmd) => verify(cmd),
        Command::Table1(args) => table1(args, cli.max_work).map(Into::into),
        Command::Table2(args) => table2(args, cli.max_work).map(Into::into),
    }
}

fn record(command: &str, parameters: Value, seed: Option<u64>, table: Table) -> Record {
    Record {
        command: command.into(),
        parameters,
        seed,
        table,
    }
}

fn alphas_json(alphas: &[WalkerConfig]) -> Value {
    json!(alphas.iter().map(|a| a.alpha()).collect::<Vec<_>>())
}

fn points_json(points: &[LatticePoint]) -> Value {
    json!(points.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>())
}

fn density_row(table: &mut Table, b: BExponent, count: u64, d: &DensityResult) {
    table.push(vec![
        b.to_string().into(),
        count.into(),
        d.value.into(),
        d.prime_cutoff.into(),
        d.tail_bound.into(),
    ]);
}

fn density(cmd: &DensityCmd) -> CliResult<Record> {
    let (name, column, b, count, tol, result) = match *cmd {
        DensityCmd::Watchpoints { b, j, tol } => {
            ("density watchpoints", "J", b, j, tol, density_watchpoints(b, j, tol)?)
        }
        DensityCmd::Walkers { b, r, tol } => ("density walkers", "r", b, r, tol, density_walkers(b, r, tol)?),
    };
    let mut table = Table::new(["b", column, "value", "prime_cutoff", "tail_bound"]);
    density_row(&mut table, b, count, &result);
    let params = json!({ "b": [b.b1(), b.b2()], column: count, "tol": tol });
    Ok(record(name, params, None, table))
}

fn check_budget(spec: &SimulationSpec, limit: u64) -> CliResult<()> {
    let work = spec.work();
    if work > limit as u128 {
        return Err(CliError::Budget { work, limit });
    }
    Ok(())
}

fn simulate(cmd: &SimulateCmd, max_work: u64) -> CliResult<Record> {
    let (name, spec, theory, params) = match cmd {
        SimulateCmd::Watchpoints {
            b,
            watchpoints,
            alpha,
            run,
        } => {
            let set = validate_watchpoint_set(*b, &watchpoints.0)?;
            let theory = density_watchpoints(*b, set.len() as u64, DEFAULT_TOL)?;
            let params = json!({
                "b": [b.b1(), b.b2()],
                "watchpoints": points_json(set.points()),
                "alpha": alpha.alpha(),
                "steps": run.steps,
                "trials": run.trials,
            });
            let spec = SimulationSpec {
                b: *b,
                mode: Mode::Watchpoints {
                    watchpoints: set,
                    alpha: *alpha,
                },
                steps: run.steps,
                trials: run.trials,
                master_seed: run.seed,
            };
            ("simulate watchpoints", spec, theory, params)
        }
        SimulateCmd::Walkers { b, alphas, run } => {
            let theory = density_walkers(*b, alphas.len() as u64, DEFAULT_TOL)?;
            let params = json!({
                "b": [b.b1(), b.b2()],
                "alphas": alphas_json(alphas),
                "steps": run.steps,
                "trials": run.trials,
            });
            let spec = SimulationSpec {
                b: *b,
                mode: Mode::Walkers { alphas: alphas.clone() },
                steps: run.steps,
                trials: run.trials,
                master_seed: run.seed,
            };
            ("simulate walkers", spec, theory, params)
        }
    };
    spec.validate()?;
    check_budget(&spec, max_work)?;
    let agg = aggregate_trials(&spec, theory)?;
    Ok(record(name, params, Some(spec.master_seed), trials_table(&agg)))
}

fn trials_table(agg: &AggregateResult) -> Table {
    let mut table = Table::new([
        "row",
        "trial",
        "visible_count",
        "proportion",
        "sample_std",
        "theoretical",
        "abs_deviation",
    ]);
    for t in &agg.trials {
        table.push(vec![
            "trial".into(),
            (t.trial_index as u64).into(),
            t.visible_count.into(),
            t.proportion.into(),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
        ]);
    }
    table.push(vec![
        "mean".into(),
        Cell::Empty,
        agg.trials.iter().map(|t| t.visible_count).sum::<u64>().into(),
        agg.mean_proportion.into(),
        agg.sample_std.into(),
        agg.theory.value.into(),
        agg.abs_deviation.into(),
    ]);
    table
}

fn exact(cmd: &ExactCmd) -> CliResult<Record> {
    let (name, b, steps, value, params) = match cmd {
        ExactCmd::Watchpoints {
            b,
            watchpoints,
            alpha,
            steps,
        } => {
            let set = validate_watchpoint_set(*b, &watchpoints.0)?;
            let value = exact_expectation_watchpoints(&set, *alpha, *steps)?;
            let params = json!({
                "b": [b.b1(), b.b2()],
                "watchpoints": points_json(set.points()),
                "alpha": alpha.alpha(),
                "steps": steps,
            });
            ("exact watchpoints", *b, *steps, value, params)
        }
        ExactCmd::Walkers { b, alphas, steps } => {
            let value = exact_expectation_walkers(*b, alphas, *steps)?;
            let params = json!({
                "b": [b.b1(), b.b2()],
                "alphas": alphas_json(alphas),
                "steps": steps,
            });
            ("exact walkers", *b, *steps, value, params)
        }
    };
    let mut table = Table::new(["b", "steps", "expectation"]);
    table.push(vec![b.to_string().into(), (steps as u64).into(), value.into()]);
    Ok(record(name, params, None, table))
}

fn verify(cmd: &VerifyCmd) -> CliResult<Outcome> {
    let (name, params, checks): (&str, Value, Vec<Check>) = match cmd {
        VerifyCmd::GcdProperties { cases, seed } => (
            "verify gcd-properties",
            json!({ "cases": cases, "seed": seed }),
            checks::gcd_properties(*cases, *seed)?,
        ),
        VerifyCmd::VisibilityOracle { b, size } => (
            "verify visibility-oracle",
            json!({ "b": [b.b1(), b.b2()], "box": size }),
            checks::visibility_oracle(*b, *size)?,
        ),
        VerifyCmd::CongruenceSum {
            alpha,
            n,
            d,
            threshold,
        } => (
            "verify congruence-sum",
            json!({ "alpha": alpha.alpha(), "n": n, "d": d, "threshold": threshold }),
            checks::congruence_sum(*alpha, *n, *d, *threshold)?,
        ),
        VerifyCmd::MeanValue {
            kind,
            b,
            r,
            j,
            shifts,
            x,
            threshold,
        } => {
            let (kind_value, params) = mean_value_kind(*kind, *b, *r, *j, shifts)?;
            let mut params = params;
            params["x"] = json!(x);
            params["threshold"] = json!(threshold);
            (
                "verify mean-value",
                params,
                checks::mean_value(*b, &kind_value, *x, *threshold)?,
            )
        }
    };
    let failed = !checks::all_passed(&checks);
    Ok(Outcome {
        record: record(name, params, None, checks::report_table(&checks)),
        failed,
    })
}

fn mean_value_kind(
    kind: MeanValueKindArg,
    b: BExponent,
    r: Option<u64>,
    j: Option<u64>,
    shifts: &[i64],
) -> CliResult<(MeanValueKind, Value)> {
    let base = json!({ "b": [b.b1(), b.b2()] });
    match kind {
        MeanValueKindArg::WalkerMoment => {
            let r = r.ok_or_else(|| CliError::Usage("--kind walker-moment needs --r".into()))?;
            let mut params = base;
            params["kind"] = json!("walker-moment");
            params["r"] = json!(r);
            Ok((MeanValueKind::WalkerMoment { r }, params))
        }
        MeanValueKindArg::WatchpointsShifted => {
            if shifts.is_empty() {
                return Err(CliError::Usage(
                    "--kind watchpoints-shifted needs --shifts s1,s2,...".into(),
                ));
            }
            if let Some(j) = j {
                if j != shifts.len() as u64 {
                    return Err(CliError::Usage(format!(
                        "--J {j} does not match the {} shifts given",
                        shifts.len()
                    )));
                }
            }
            let shifts = ShiftVector::new(shifts.to_vec())?;
            let mut params = base;
            params["kind"] = json!("watchpoints-shifted");
            params["shifts"] = json!(shifts.s());
            Ok((MeanValueKind::WatchpointsShifted { shifts }, params))
        }
    }
}

fn table1(args: &Table1Args, max_work: u64) -> CliResult<Record> {
    let mut columns = vec!["b".to_string()];
    columns.extend(args.alphas.iter().map(|a| format!("numerical_alpha_{}", a.alpha())));
    columns.push("theoretical".into());
    columns.extend(args.alphas.iter().map(|a| format!("abs_deviation_alpha_{}", a.alpha())));
    let mut table = Table::new(columns);

    let walkers = args.alphas.len() as u64;
    let mut rows = Vec::new();
    for (row, &(b1, b2)) in TABLE1_B.iter().enumerate() {
        let b = BExponent::new(b1, b2)?;
        let set = validate_watchpoint_set(b, &TABLE1_WATCHPOINTS)?;
        let specs: Vec<SimulationSpec> = args
            .alphas
            .iter()
            .enumerate()
            .map(|(i, &alpha)| SimulationSpec {
                b,
                mode: Mode::Watchpoints {
                    watchpoints: set.clone(),
                    alpha,
                },
                steps: args.steps,
                trials: args.trials,
                master_seed: derive_trial_seed(args.seed, row as u64, i as u64, walkers),
            })
            .collect();
        for spec in &specs {
            spec.validate()?;
            check_budget(spec, max_work)?;
        }
        rows.push((b, set.len() as u64, specs));
    }

    for (b, j, specs) in rows {
        let theory = density_watchpoints(b, j, DEFAULT_TOL)?;
        let mut means = Vec::new();
        let mut deviations = Vec::new();
        for spec in &specs {
            let agg = aggregate_trials(spec, theory)?;
            means.push(Cell::Float(agg.mean_proportion));
            deviations.push(Cell::Float(agg.abs_deviation));
        }
        let mut cells = vec![Cell::Text(b.to_string())];
        cells.extend(means);
        cells.push(theory.value.into());
        cells.extend(deviations);
        table.push(cells);
    }
    let params = json!({
        "watchpoints": points_json(&TABLE1_WATCHPOINTS),
        "alphas": alphas_json(&args.alphas),
        "steps": args.steps,
        "trials": args.trials,
    });
    Ok(record("table1", params, Some(args.seed), table))
}

fn table2(args: &Table2Args, max_work: u64) -> CliResult<Record> {
    let bs: Vec<BExponent> = match args.b {
        Some(b) => vec![b],
        None => TABLE2_B
            .iter()
            .map(|&(b1, b2)| BExponent::new(b1, b2))
            .collect::<Result<_, _>>()?,
    };
    let mut jobs = Vec::new();
    for (bi, &b) in bs.iter().enumerate() {
        for (ri, &r) in args.rows.iter().enumerate() {
            let spec = SimulationSpec {
                b,
                mode: Mode::Walkers {
                    alphas: vec![args.alpha; r as usize],
                },
                steps: args.steps,
                trials: args.trials,
                master_seed: derive_trial_seed(args.seed, ri as u64, bi as u64, bs.len() as u64),
            };
            spec.validate()?;
            check_budget(&spec, max_work)?;
            jobs.push((b, r, spec));
        }
    }

    let mut table = Table::new(["b", "r", "numerical", "theoretical", "abs_deviation"]);
    for (b, r, spec) in jobs {
        let theory = density_walkers(b, r, DEFAULT_TOL)?;
        let agg = aggregate_trials(&spec, theory)?;
        table.push(vec![
            b.to_string().into(),
            r.into(),
            agg.mean_proportion.into(),
            theory.value.into(),
            agg.abs_deviation.into(),
        ]);
    }
    let params = json!({
        "b": bs.iter().map(|b| [b.b1(), b.b2()]).collect::<Vec<_>>(),
        "rows": args.rows,
        "alpha": args.alpha.alpha(),
        "steps": args.steps,
        "trials": args.trials,
    });
    Ok(record("table2", params, Some(args.seed), table))
}
