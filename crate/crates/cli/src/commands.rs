use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use centrality_game::best_response::best_response_set;
use centrality_game::centrality::{bonacich_direct, hitting_times};
use centrality_game::classify::analyze;
use centrality_game::dynamics::{run_batch, RunOptions, Trajectory, Verdict};
use centrality_game::io::{to_dot, trajectory_csv, ConfigDocument};
use centrality_game::oracle::{ConfigurationSpace, EnumerationResult};
use centrality_game::{
    enumerate_nash_with_progress, parse_rational, theorem_checks, Backend, Configuration, Game,
    GameParams, Rational, Scalar,
};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult, EXIT_MISMATCH, EXIT_NEGATIVE, EXIT_OK};
use crate::manifest::{manifest_path_for, ManifestBuilder};
use crate::{
    BestResponseArgs, CentralityArgs, ClassifyArgs, Cli, Command, Common, Format, GameArgs,
    OracleArgs, SimulateArgs,
};

/// Profiles above this count need `--large`.
const LARGE_SPACE: u128 = 100_000;

macro_rules! on_backend {
    ($backend:expr, $f:ident ( $($arg:expr),* $(,)? )) => {
        match $backend {
            Backend::Rational => $f::<Rational>($($arg),*),
            Backend::Float => $f::<f64>($($arg),*),
        }
    };
}

pub fn dispatch(cli: &Cli) -> CliResult<i32> {
    let arguments = serde_json::to_value(cli).map_err(|e| CliError::internal(e.to_string()))?;
    match &cli.command {
        Command::Centrality(a) => centrality(a, arguments),
        Command::BestResponse(a) => best_response(a, arguments),
        Command::Classify(a) => classify(a, arguments),
        Command::Simulate(a) => simulate(a, arguments),
        Command::EnumerateNe(a) => oracle(a, false, arguments),
        Command::VerifyTheorems(a) => oracle(a, true, arguments),
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing

fn one_based(action: &[usize]) -> Vec<usize> {
    action.iter().map(|j| j + 1).collect()
}

fn one_based_profile(config: &Configuration) -> Vec<Vec<usize>> {
    config.actions().map(one_based).collect()
}

/// 1-based label → 0-based index.
fn node(label: usize, n: usize, what: &str) -> CliResult<usize> {
    if (1..=n).contains(&label) {
        Ok(label - 1)
    } else {
        Err(CliError::usage(format!(
            "{what} must be in 1..={n}, got {label}"
        )))
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn to_json_text<T: serde::Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| CliError::internal(e.to_string()))
}

fn write_file(path: &Path, text: &str, manifest: &mut ManifestBuilder) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::write(path, e))?;
    manifest.output(path);
    Ok(())
}

/// Sends the main result to `--output` or stdout, then writes the manifest
/// beside the first file produced (if any).
fn finish(
    common: &Common,
    text: &str,
    mut manifest: ManifestBuilder,
    first_file: Option<&Path>,
) -> CliResult<()> {
    let anchor = match &common.output {
        Some(path) => {
            write_file(path, text, &mut manifest)?;
            Some(path.as_path())
        }
        None => {
            print!("{text}");
            first_file
        }
    };
    match anchor {
        Some(path) => manifest.finish(&manifest_path_for(path)),
        None => Ok(()),
    }
}

fn game_json(params: &GameParams) -> Value {
    serde_json::from_str(&ConfigDocument::from_parts(params, None).to_json()).unwrap_or(Value::Null)
}

fn parse_eta(spec: Option<&str>) -> CliResult<Option<Vec<Rational>>> {
    match spec.map(str::trim) {
        None | Some("uniform") => Ok(None),
        Some(list) => list
            .split(',')
            .map(|w| parse_rational(w.trim()).map_err(CliError::from))
            .collect::<CliResult<Vec<_>>>()
            .map(Some),
    }
}

fn build_params(
    n: usize,
    m: usize,
    beta: Rational,
    eta: Option<Vec<Rational>>,
    backend: Backend,
) -> CliResult<GameParams> {
    Ok(match backend {
        Backend::Rational => GameParams::new(n, m, beta, eta)?,
        Backend::Float => GameParams::new_lenient(n, m, beta, eta)?,
    })
}

struct Loaded {
    params: GameParams,
    config: Option<Configuration>,
    backend: Backend,
}

/// Reads a configuration document, applying `--beta`, `--eta` and
/// `--backend` overrides.
fn load(path: &Path, common: &Common, eta: Option<&str>) -> CliResult<Loaded> {
    let text = fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
    let mut doc = ConfigDocument::parse(&text)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    if let Some(beta) = &common.beta {
        doc.beta = Value::String(beta.clone());
    }
    if let Some(eta) = parse_eta(eta)? {
        doc.eta = Value::Array(
            eta.iter()
                .map(|e| Value::String(centrality_game::scalar::format_rational(e)))
                .collect(),
        );
    } else if eta.is_some() {
        doc.eta = Value::String("uniform".into());
    }
    let backend = common.backend.unwrap_or(Backend::default_for(doc.n));
    let params = doc
        .params(backend == Backend::Float)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let config = doc
        .configuration()
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    Ok(Loaded {
        params,
        config,
        backend,
    })
}

fn load_profile(path: &Path, common: &Common) -> CliResult<(GameParams, Configuration, Backend)> {
    let loaded = load(path, common, None)?;
    let config = loaded.config.ok_or_else(|| {
        CliError::usage(format!(
            "{}: the document has no \"actions\"",
            path.display()
        ))
    })?;
    Ok((loaded.params, config, loaded.backend))
}

fn start_manifest(
    name: &str,
    arguments: Value,
    params: &GameParams,
    backend: Backend,
    input: Option<&Path>,
) -> ManifestBuilder {
    let mut manifest = ManifestBuilder::new(name, arguments);
    manifest.game(game_json(params));
    manifest.backend(backend.as_str());
    if let Some(p) = input {
        manifest.input(p);
    }
    manifest
}

fn write_dot(
    dot: Option<&Path>,
    config: &Configuration,
    manifest: &mut ManifestBuilder,
) -> CliResult<()> {
    match dot {
        Some(path) => write_file(path, &to_dot(config), manifest),
        None => Ok(()),
    }
}

// ---------------------------------------------------------------------------
// centrality

fn centrality(a: &CentralityArgs, arguments: Value) -> CliResult<i32> {
    let (params, config, backend) = load_profile(&a.input, &a.common)?;
    let target = a
        .target
        .map(|t| node(t, params.n(), "--target"))
        .transpose()?;
    let text = on_backend!(backend, centrality_text(&params, &config, target, a.format))?;
    let mut manifest = start_manifest("centrality", arguments, &params, backend, Some(&a.input));
    write_dot(a.dot.as_deref(), &config, &mut manifest)?;
    finish(&a.common, &text, manifest, a.dot.as_deref())?;
    Ok(EXIT_OK)
}

fn centrality_text<S: Scalar>(
    params: &GameParams,
    config: &Configuration,
    target: Option<usize>,
    format: Format,
) -> CliResult<String> {
    let game = Game::<S>::new(params);
    let pi: Vec<Value> = bonacich_direct(&game, config)?
        .pi
        .iter()
        .map(S::to_json)
        .collect();
    let tau: Option<Vec<Value>> = match target {
        Some(s) => Some(
            hitting_times(&game, config, s)?
                .tau
                .iter()
                .map(S::to_json)
                .collect(),
        ),
        None => None,
    };
    Ok(match format {
        Format::Json => {
            let mut out = json!({
                "n": params.n(),
                "m": params.m(),
                "beta": centrality_game::scalar::format_rational(params.beta()),
                "backend": if S::EXACT { "rational" } else { "float" },
                "pi": pi,
            });
            if let (Some(s), Some(tau)) = (target, tau) {
                out["target"] = json!(s + 1);
                out["utility"] = out["pi"][s].clone();
                out["tau"] = Value::Array(tau);
            }
            to_json_text(&out)?
        }
        Format::Csv => {
            let mut out = String::from(if tau.is_some() {
                "node,pi,tau\n"
            } else {
                "node,pi\n"
            });
            for (i, p) in pi.iter().enumerate() {
                let _ = write!(out, "{},{}", i + 1, cell(p));
                if let Some(tau) = &tau {
                    let _ = write!(out, ",{}", cell(&tau[i]));
                }
                out.push('\n');
            }
            out
        }
    })
}

// ---------------------------------------------------------------------------
// best-response

fn best_response(a: &BestResponseArgs, arguments: Value) -> CliResult<i32> {
    let (params, config, backend) = load_profile(&a.input, &a.common)?;
    let player = node(a.player, params.n(), "--player")?;
    let text = on_backend!(backend, best_response_text(&params, &config, player))?;
    let mut manifest = start_manifest("best-response", arguments, &params, backend, Some(&a.input));
    write_dot(a.dot.as_deref(), &config, &mut manifest)?;
    finish(&a.common, &text, manifest, a.dot.as_deref())?;
    Ok(EXIT_OK)
}

fn best_response_text<S: Scalar>(
    params: &GameParams,
    config: &Configuration,
    player: usize,
) -> CliResult<String> {
    let game = Game::<S>::new(params);
    let br = best_response_set(&game, config, player)?;
    let current = config.action(player);
    to_json_text(&json!({
        "player": player + 1,
        // Σ τᵢ over any optimal action; the set minimizes this sum.
        "objective": (br.min_value.clone() * S::from_usize(params.m())).to_json(),
        "count": br.actions.len(),
        "actions": br.actions.iter().map(|a| one_based(a)).collect::<Vec<_>>(),
        "current": one_based(current),
        "current_is_best": br.contains(current),
    }))
}

// ---------------------------------------------------------------------------
// classify

fn classify(a: &ClassifyArgs, arguments: Value) -> CliResult<i32> {
    let (params, config, backend) = load_profile(&a.input, &a.common)?;
    let (text, nash) = on_backend!(backend, classify_text(&params, &config))?;
    let mut manifest = start_manifest("classify", arguments, &params, backend, Some(&a.input));
    write_dot(a.dot.as_deref(), &config, &mut manifest)?;
    finish(&a.common, &text, manifest, a.dot.as_deref())?;
    Ok(if nash { EXIT_OK } else { EXIT_NEGATIVE })
}

fn classify_text<S: Scalar>(
    params: &GameParams,
    config: &Configuration,
) -> CliResult<(String, bool)> {
    let game = Game::<S>::new(params);
    let report = analyze(&game, config)?;
    let witness = report.witness.as_ref().map(|w| {
        json!({
            "player": w.player + 1,
            "current": one_based(&w.current),
            "improvement": one_based(&w.improvement),
        })
    });
    let text = to_json_text(&json!({
        "is_nash": report.is_nash,
        "is_strict": report.is_strict,
        "class": report.class.tag(),
        "witness": witness,
        "condensation_ok": report.condensation_ok,
        "non_unique_players": one_based(&report.non_unique_players),
        "backend": if S::EXACT { "rational" } else { "float" },
    }))?;
    Ok((text, report.is_nash))
}

// ---------------------------------------------------------------------------
// simulate

fn simulate_setup(a: &SimulateArgs) -> CliResult<(GameParams, Option<Configuration>, Backend)> {
    if a.init == "random" {
        let GameArgs { n, m, eta } = &a.game;
        let n = n.ok_or_else(|| CliError::usage("--n is required with --init random"))?;
        let m = m.ok_or_else(|| CliError::usage("--m is required with --init random"))?;
        let beta = a
            .common
            .beta
            .as_deref()
            .ok_or_else(|| CliError::usage("--beta is required with --init random"))?;
        let backend = a.common.backend.unwrap_or(Backend::default_for(n));
        let params = build_params(
            n,
            m,
            parse_rational(beta)?,
            parse_eta(eta.as_deref())?,
            backend,
        )?;
        return Ok((params, None, backend));
    }
    let path = Path::new(&a.init);
    let loaded = load(path, &a.common, a.game.eta.as_deref())?;
    for (flag, given, actual) in [
        ("--n", a.game.n, loaded.params.n()),
        ("--m", a.game.m, loaded.params.m()),
    ] {
        if given.is_some_and(|g| g != actual) {
            return Err(CliError::usage(format!(
                "{flag} disagrees with {} ({actual})",
                path.display()
            )));
        }
    }
    let config = loaded.config.ok_or_else(|| {
        CliError::usage(format!(
            "{}: the document has no \"actions\"",
            path.display()
        ))
    })?;
    Ok((loaded.params, Some(config), loaded.backend))
}

fn run_all<S: Scalar>(
    params: &GameParams,
    initial: Option<&Configuration>,
    seeds: &[u64],
    options: RunOptions,
) -> CliResult<Vec<Trajectory>> {
    Ok(run_batch(&Game::<S>::new(params), initial, seeds, options)?)
}

fn trajectory_summary(t: &Trajectory) -> CliResult<Value> {
    let mut v = serde_json::to_value(t).map_err(|e| CliError::internal(e.to_string()))?;
    v["steps"] = json!(t.steps.len());
    v["initial"] = json!(one_based_profile(&t.initial));
    v["terminal"] = json!(one_based_profile(&t.terminal));
    v["terminal_tag"] = json!(t.terminal_class.tag());
    Ok(v)
}

fn simulate(a: &SimulateArgs, arguments: Value) -> CliResult<i32> {
    let (params, initial, backend) = simulate_setup(a)?;
    if a.seeds_count == 0 {
        return Err(CliError::usage("--seeds-count must be at least 1"));
    }
    if a.dot_every == Some(0) {
        return Err(CliError::usage("--dot-every must be at least 1"));
    }
    if a.dot_every.is_some() && a.out_dir.is_none() {
        return Err(CliError::usage("--dot-every needs --out-dir"));
    }
    let end = a
        .seed
        .checked_add(a.seeds_count)
        .ok_or_else(|| CliError::usage("seed range overflows u64"))?;
    let seeds: Vec<u64> = (a.seed..end).collect();
    let options = RunOptions {
        max_steps: a.max_steps,
        audit_steps: a.audit_steps,
    };
    let runs = on_backend!(backend, run_all(&params, initial.as_ref(), &seeds, options))?;

    let input = (a.init != "random").then(|| Path::new(&a.init));
    let mut manifest = start_manifest("simulate", arguments, &params, backend, input);
    manifest.seeds(&seeds);

    let mut summaries = Vec::with_capacity(runs.len());
    for t in &runs {
        let summary = trajectory_summary(t)?;
        if let Some(dir) = &a.out_dir {
            write_run_files(dir, t, &summary, a.dot_every, &mut manifest)?;
        }
        summaries.push(summary);
    }
    let text = to_json_text(&summaries)?;
    match &a.out_dir {
        // The directory's manifest covers every file, including --output.
        Some(dir) => {
            if let Some(path) = &a.common.output {
                write_file(path, &text, &mut manifest)?;
            } else {
                print!("{text}");
            }
            manifest.finish(&dir.join("manifest.json"))?;
        }
        None => finish(&a.common, &text, manifest, None)?,
    }
    let all_absorbed = runs.iter().all(|t| t.verdict != Verdict::NotAbsorbed);
    Ok(if all_absorbed { EXIT_OK } else { EXIT_NEGATIVE })
}

fn write_run_files(
    dir: &Path,
    t: &Trajectory,
    summary: &Value,
    dot_every: Option<usize>,
    manifest: &mut ManifestBuilder,
) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::write(dir, e))?;
    let stem = format!("seed-{}", t.seed);
    write_file(
        &dir.join(format!("{stem}.csv")),
        &trajectory_csv(t),
        manifest,
    )?;
    write_file(
        &dir.join(format!("{stem}.json")),
        &to_json_text(summary)?,
        manifest,
    )?;
    write_file(
        &dir.join(format!("{stem}-final.dot")),
        &to_dot(&t.terminal),
        manifest,
    )?;
    if let Some(k) = dot_every {
        let mut current = t.initial.clone();
        let snapshot = |t_step: usize, c: &Configuration, m: &mut ManifestBuilder| {
            write_file(&dir.join(format!("{stem}-t{t_step:07}.dot")), &to_dot(c), m)
        };
        snapshot(0, &current, manifest)?;
        for rec in &t.steps {
            current.set_action(rec.player, &rec.action)?;
            if rec.t % k == 0 {
                snapshot(rec.t, &current, manifest)?;
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// enumerate-ne / verify-theorems

fn oracle(a: &OracleArgs, verify: bool, arguments: Value) -> CliResult<i32> {
    let name = if verify {
        "verify-theorems"
    } else {
        "enumerate-ne"
    };
    let n = a.game.n.ok_or_else(|| CliError::usage("--n is required"))?;
    let m = a.game.m.ok_or_else(|| CliError::usage("--m is required"))?;
    let beta = a
        .common
        .beta
        .as_deref()
        .ok_or_else(|| CliError::usage("--beta is required"))?;
    if verify && !(1..=2).contains(&m) {
        return Err(CliError::usage(format!(
            "verify-theorems covers m = 1 and m = 2, got m = {m}"
        )));
    }
    // Equilibrium tests depend on exact ties, so the oracle is exact-only.
    if a.common.backend == Some(Backend::Float) {
        eprintln!("note: enumeration always uses exact rational arithmetic");
    }
    let params = GameParams::new(
        n,
        m,
        parse_rational(beta)?,
        parse_eta(a.game.eta.as_deref())?,
    )?;
    let total = ConfigurationSpace::new(n, m)?.len();
    if total > LARGE_SPACE && !a.large {
        return Err(CliError::usage(format!(
            "{total} profiles to check; pass --large to run spaces above {LARGE_SPACE}"
        )));
    }
    let progress = |done: u64, total: u128| eprintln!("progress {done}/{total}");
    let result = enumerate_nash_with_progress(&params, a.large.then_some(&progress as _))?;

    let mut manifest = start_manifest(name, arguments, &params, Backend::Rational, None);
    let (json_text, table, passed) = if verify {
        let report = theorem_checks(&params, &result)?;
        (to_json_text(&report)?, report.table(), report.passed())
    } else {
        (
            to_json_text(&result)?,
            enumeration_table(&result),
            result.mismatches.is_empty(),
        )
    };
    match &a.common.output {
        Some(path) => {
            write_file(path, &json_text, &mut manifest)?;
            manifest.finish(&manifest_path_for(path))?;
            print!("{table}");
        }
        None if verify => print!("{table}"),
        None => {
            print!("{json_text}");
            eprint!("{table}");
        }
    }
    Ok(if passed { EXIT_OK } else { EXIT_MISMATCH })
}

fn enumeration_table(result: &EnumerationResult) -> String {
    let mut out = format!(
        "n={} m={} beta={} configs={} nash={} strict={}\n",
        result.n,
        result.m,
        result.beta,
        result.total_configs,
        result.nash.len(),
        result.strict.len()
    );
    for (class, count) in &result.class_histogram {
        let _ = writeln!(out, "  {class:<24} {count}");
    }
    let _ = writeln!(out, "mismatches: {}", result.mismatches.len());
    for mm in result.mismatches.iter().take(10) {
        let _ = writeln!(
            out,
            "  {:<16} {:?} oracle={} structural={}",
            mm.check, mm.config, mm.oracle, mm.structural
        );
    }
    out
}
