//! Command-line surface: thin shells over the library with csv/json output.
//!
//! Exit codes: 0 success, 1 usage or input errors, 2 certificate failure
//! (cheat supremum above tolerance), so pipelines can gate on verification.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{load_preparation_report, r_factor, steering_bound, steering_bound_from_table, DTable};
use crate::error::{Error, Result};
use crate::game::{
    cheat_search, exact_honest_score, phi_plus, product_state, werner, CheatStrategy,
    PreparationModel, ScoreSpec, SearchGrid,
};
use crate::linalg::{BlochVector, DensityMatrix};
use crate::montecarlo::{simulate, sweep, Players, RPolicy, SimConfig, SweepAxis};
use crate::settings::{builtin_directions, load_directions, DirectionSet, BUILTIN_FAMILIES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Parsed invocation: exactly one subcommand plus output options.
#[derive(Debug, Parser)]
#[command(name = "qrs", version, about = "Loss-tolerant refereed steering games: bounds, scores, certificates, simulation")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DirectionArgs {
    /// Built-in family: orthogonal-2, orthogonal-3, cube-4, icosahedron-6, dodecahedron-10.
    #[arg(long, conflicts_with = "directions")]
    pub family: Option<String>,
    /// Direction file: one "x y z" per line, '#' comments.
    #[arg(long)]
    pub directions: Option<PathBuf>,
}

impl DirectionArgs {
    fn resolve(&self) -> Result<DirectionSet> {
        match (&self.family, &self.directions) {
            (Some(family), None) => {
                let n = BUILTIN_FAMILIES
                    .iter()
                    .find(|(name, _)| name == family)
                    .map(|&(_, n)| n)
                    .ok_or_else(|| {
                        Error::UnknownFamily(
                            family.clone(),
                            BUILTIN_FAMILIES
                                .iter()
                                .map(|(name, _)| *name)
                                .collect::<Vec<_>>()
                                .join(", "),
                        )
                    })?;
                builtin_directions(family, n)
            }
            (None, Some(path)) => load_directions(path),
            _ => Err(Error::Config(
                "exactly one of --family or --directions is required".into(),
            )),
        }
    }
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Isotropic preparation visibility in [0, 1].
    #[arg(long)]
    pub visibility: Option<f64>,
    /// Degenerate preparation: every setting prepared along "x,y,z".
    #[arg(long, value_name = "X,Y,Z", conflicts_with = "visibility")]
    pub fixed_state: Option<String>,
    /// Preparation-report file ("j s x y z" lines); also used to compute r
    /// unless --r is given.
    #[arg(long, conflicts_with_all = ["visibility", "fixed_state"])]
    pub prep: Option<PathBuf>,
}

fn parse_vec3(text: &str) -> Result<BlochVector> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!("expected 'x,y,z', got '{text}'")));
    }
    let mut xyz = [0.0f64; 3];
    for (slot, part) in xyz.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("'{part}' is not a number")))?;
    }
    Ok(BlochVector::new(xyz[0], xyz[1], xyz[2]))
}

impl ModelArgs {
    fn resolve(&self, ds: &DirectionSet) -> Result<PreparationModel> {
        match (&self.visibility, &self.fixed_state, &self.prep) {
            (Some(v), None, None) => Ok(PreparationModel::Visibility(*v)),
            (None, Some(text), None) => Ok(PreparationModel::FixedState(parse_vec3(text)?)),
            (None, None, Some(path)) => Ok(PreparationModel::Report(load_preparation_report(
                path,
                ds.n(),
            )?)),
            (None, None, None) => Ok(PreparationModel::Exact),
            _ => Err(Error::Config(
                "at most one of --visibility, --fixed-state, --prep".into(),
            )),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Steering bound C_n(eta_h) over an eta grid.
    Bound {
        #[command(flatten)]
        dirs: DirectionArgs,
        /// Comma-separated heralding efficiencies.
        #[arg(long, value_name = "E1,E2,...", conflicts_with = "eta_grid")]
        eta: Option<String>,
        /// Grid "start:step:end" of heralding efficiencies.
        #[arg(long, value_name = "START:STEP:END")]
        eta_grid: Option<String>,
    },
    /// Preparation-imperfection factor r from a tomography report.
    Rfactor {
        #[command(flatten)]
        dirs: DirectionArgs,
        /// Preparation-report file ("j s x y z" lines).
        #[arg(long)]
        prep: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        eta_h: f64,
    },
    /// Exact honest score for a shared state.
    Score {
        #[command(flatten)]
        dirs: DirectionArgs,
        /// Shared state: phi-plus, product-00, or werner:<v>.
        #[arg(long, default_value = "phi-plus")]
        state: String,
        #[arg(long, default_value_t = 1.0)]
        eta_h: f64,
        #[arg(long, default_value_t = 1.0)]
        eta_m: f64,
        /// Bound multiplier; computed from --prep when omitted there.
        #[arg(long)]
        r: Option<f64>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Exhaustive cheat search and unsteerability certificate.
    Cheat {
        #[command(flatten)]
        dirs: DirectionArgs,
        #[arg(long, default_value_t = 1.0)]
        eta_h: f64,
        #[arg(long)]
        r: Option<f64>,
        #[command(flatten)]
        model: ModelArgs,
        /// Icosphere subdivision level for POVM directions (level 3 = 642).
        #[arg(long, default_value_t = 3)]
        povm_level: u32,
        /// Number of mu samples.
        #[arg(long, default_value_t = 101)]
        mu_points: usize,
    },
    /// Seeded Monte Carlo estimate of the score.
    Simulate {
        #[command(flatten)]
        dirs: DirectionArgs,
        #[arg(long, default_value = "phi-plus")]
        state: String,
        /// Cheat-strategy JSON file; players become the adversary.
        #[arg(long, conflicts_with = "state")]
        strategy: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        eta_h: f64,
        #[arg(long, default_value_t = 1.0)]
        eta_m: f64,
        #[arg(long)]
        r: Option<f64>,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        rounds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte Carlo sweep along one axis.
    Sweep {
        #[command(flatten)]
        dirs: DirectionArgs,
        #[arg(long, default_value = "phi-plus")]
        state: String,
        #[arg(long, conflicts_with = "state")]
        strategy: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        eta_h: f64,
        #[arg(long, default_value_t = 1.0)]
        eta_m: f64,
        #[arg(long)]
        r: Option<f64>,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        rounds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Axis: eta-h, eta-m, visibility, or family.
        #[arg(long)]
        axis: String,
        /// Comma-separated axis values (numbers, or family names).
        #[arg(long)]
        values: String,
    },
}

fn parse_eta_list(eta: &Option<String>, grid: &Option<String>) -> Result<Vec<f64>> {
    if let Some(grid) = grid {
        let parts: Vec<&str> = grid.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!(
                "expected START:STEP:END, got '{grid}'"
            )));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| {
                p.parse()
                    .map_err(|_| Error::Config(format!("'{p}' is not a number")))
            })
            .collect::<Result<_>>()?;
        let (start, step, end) = (nums[0], nums[1], nums[2]);
        if step <= 0.0 {
            return Err(Error::Config("grid step must be positive".into()));
        }
        let mut out = Vec::new();
        let mut value = start;
        while value <= end + 1e-12 {
            out.push(value.min(end));
            value += step;
        }
        return Ok(out);
    }
    let text = eta.as_deref().unwrap_or("1.0");
    text.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::Config(format!("'{p}' is not a number")))
        })
        .collect()
}

fn parse_state(text: &str) -> Result<DensityMatrix> {
    if text == "phi-plus" {
        return Ok(phi_plus());
    }
    if text == "product-00" {
        return product_state(&BlochVector::Z, &BlochVector::Z);
    }
    if let Some(v) = text.strip_prefix("werner:") {
        let v: f64 = v
            .parse()
            .map_err(|_| Error::Config(format!("'{v}' is not a number")))?;
        return werner(v);
    }
    Err(Error::Config(format!(
        "unknown state '{text}'; expected phi-plus, product-00, or werner:<v>"
    )))
}

/// Resolve the effective r: an explicit value wins, otherwise it is
/// computed from the preparation model (1 for exact preparation).
fn resolve_r(
    explicit: Option<f64>,
    model: &PreparationModel,
    ds: &DirectionSet,
    eta_h: f64,
) -> Result<f64> {
    match explicit {
        Some(r) => Ok(r),
        None => {
            let bound = steering_bound(ds, eta_h)?;
            model.r_factor(ds, &bound)
        }
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.10}")
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

fn render(table: &Table, format: OutputFormat, command: &str, seed: Option<u64>) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = table.header.join(",");
            out.push('\n');
            for row in &table.rows {
                out.push_str(&row.join(","));
                out.push('\n');
            }
            out
        }
        OutputFormat::Json => {
            let rows: Vec<serde_json::Value> = table
                .rows
                .iter()
                .map(|row| {
                    let mut obj = serde_json::Map::new();
                    for (key, value) in table.header.iter().zip(row) {
                        let parsed: serde_json::Value = value
                            .parse::<f64>()
                            .ok()
                            .and_then(serde_json::Number::from_f64)
                            .map(serde_json::Value::Number)
                            .unwrap_or_else(|| serde_json::Value::String(value.clone()));
                        obj.insert((*key).to_string(), parsed);
                    }
                    serde_json::Value::Object(obj)
                })
                .collect();
            let doc = serde_json::json!({
                "metadata": {
                    "version": env!("CARGO_PKG_VERSION"),
                    "command": command,
                    "seed": seed,
                },
                "rows": rows,
            });
            let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
            text.push('\n');
            text
        }
    }
}

fn weights_field(weights: &[(usize, f64)]) -> String {
    weights
        .iter()
        .map(|&(k, w)| format!("{k}:{w:.10}"))
        .collect::<Vec<_>>()
        .join(";")
}

fn execute(config: &RunConfig) -> Result<(String, bool)> {
    let mut certificate_failed = false;
    let (table, command, seed) = match &config.command {
        Command::Bound { dirs, eta, eta_grid } => {
            let ds = dirs.resolve()?;
            let etas = parse_eta_list(eta, eta_grid)?;
            let table_d = DTable::compute(&ds)?;
            let mut rows = Vec::new();
            for &eta_h in &etas {
                let bound = steering_bound_from_table(&table_d, eta_h)?;
                rows.push(vec![
                    fmt(eta_h),
                    fmt(bound.value),
                    bound
                        .optimal_weights
                        .iter()
                        .map(|&(k, _)| k.to_string())
                        .collect::<Vec<_>>()
                        .join("+"),
                    weights_field(&bound.optimal_weights),
                ]);
            }
            (
                Table {
                    header: vec!["eta_h", "c_n", "k_support", "weights"],
                    rows,
                },
                "bound",
                None,
            )
        }
        Command::Rfactor { dirs, prep, eta_h } => {
            let ds = dirs.resolve()?;
            let report = load_preparation_report(prep, ds.n())?;
            let bound = steering_bound(&ds, *eta_h)?;
            let rf = r_factor(&report, &ds, &bound)?;
            let signs = rf
                .signs
                .iter()
                .map(|s| format!("{s:+}"))
                .collect::<Vec<_>>()
                .join(";");
            (
                Table {
                    header: vec!["eta_h", "c_n", "r", "signs"],
                    rows: vec![vec![fmt(*eta_h), fmt(bound.value), fmt(rf.value), signs]],
                },
                "rfactor",
                None,
            )
        }
        Command::Score {
            dirs,
            state,
            eta_h,
            eta_m,
            r,
            model,
        } => {
            let ds = dirs.resolve()?;
            let model = model.resolve(&ds)?;
            let rho = parse_state(state)?;
            let r = resolve_r(*r, &model, &ds, *eta_h)?;
            let spec = ScoreSpec::new(ds, *eta_h, r)?;
            let breakdown = exact_honest_score(&rho, &spec, &model, *eta_m)?;
            let rows = breakdown
                .per_setting
                .iter()
                .map(|t| {
                    vec![
                        t.j.to_string(),
                        format!("{:+}", t.s),
                        fmt(t.corr),
                        fmt(t.herald),
                        fmt(breakdown.total),
                        fmt(breakdown.alice_herald),
                    ]
                })
                .collect();
            (
                Table {
                    header: vec!["j", "s", "corr", "herald", "total", "eta_h_hat"],
                    rows,
                },
                "score",
                None,
            )
        }
        Command::Cheat {
            dirs,
            eta_h,
            r,
            model,
            povm_level,
            mu_points,
        } => {
            let ds = dirs.resolve()?;
            let model = model.resolve(&ds)?;
            let r = resolve_r(*r, &model, &ds, *eta_h)?;
            let spec = ScoreSpec::new(ds, *eta_h, r)?;
            let grid = SearchGrid {
                povm_subdivisions: *povm_level,
                mu_points: *mu_points,
            };
            let result = cheat_search(&spec, &model, &grid)?;
            certificate_failed = !result.certified;
            let best = &result.best;
            let rule = |slot: Option<i8>| {
                slot.map(|a| format!("{a:+}")).unwrap_or_else(|| "null".into())
            };
            (
                Table {
                    header: vec![
                        "certified",
                        "supremum",
                        "mu",
                        "m_x",
                        "m_y",
                        "m_z",
                        "favorable",
                        "rule_plus",
                        "rule_minus",
                        "gamma_plus",
                        "gamma_minus",
                    ],
                    rows: vec![vec![
                        if result.certified { "PASS" } else { "FAIL" }.to_string(),
                        fmt(result.supremum),
                        fmt(best.mu),
                        fmt(best.m.x),
                        fmt(best.m.y),
                        fmt(best.m.z),
                        best.favorable
                            .iter()
                            .map(|j| j.to_string())
                            .collect::<Vec<_>>()
                            .join("+"),
                        rule(best.report_rule[0]),
                        rule(best.report_rule[1]),
                        fmt(best.report_weight[0]),
                        fmt(best.report_weight[1]),
                    ]],
                },
                "cheat",
                None,
            )
        }
        Command::Simulate {
            dirs,
            state,
            strategy,
            eta_h,
            eta_m,
            r,
            model,
            rounds,
            seed,
        } => {
            if *rounds == 0 {
                return Err(Error::Config("--rounds must be >= 1".into()));
            }
            let ds = dirs.resolve()?;
            let model = model.resolve(&ds)?;
            let r = resolve_r(*r, &model, &ds, *eta_h)?;
            let spec = ScoreSpec::new(ds, *eta_h, r)?;
            let players = build_players(state, strategy, *eta_m)?;
            let cfg = SimConfig {
                spec,
                model,
                players,
                rounds: *rounds,
                seed: *seed,
            };
            let estimate = simulate(&cfg)?;
            (
                Table {
                    header: vec![
                        "eta_h",
                        "mean",
                        "std_error",
                        "eta_h_hat",
                        "rounds_valid",
                        "seed",
                    ],
                    rows: vec![vec![
                        fmt(*eta_h),
                        fmt(estimate.mean),
                        fmt(estimate.std_error),
                        fmt(estimate.eta_h_hat),
                        estimate.rounds_valid.to_string(),
                        seed.to_string(),
                    ]],
                },
                "simulate",
                Some(*seed),
            )
        }
        Command::Sweep {
            dirs,
            state,
            strategy,
            eta_h,
            eta_m,
            r,
            model,
            rounds,
            seed,
            axis,
            values,
        } => {
            if *rounds == 0 {
                return Err(Error::Config("--rounds must be >= 1".into()));
            }
            let ds = dirs.resolve()?;
            let model = model.resolve(&ds)?;
            let r_policy = if r.is_some() {
                RPolicy::Fixed
            } else {
                RPolicy::FromModel
            };
            let r = resolve_r(*r, &model, &ds, *eta_h)?;
            let spec = ScoreSpec::new(ds, *eta_h, r)?;
            let players = build_players(state, strategy, *eta_m)?;
            let base = SimConfig {
                spec,
                model,
                players,
                rounds: *rounds,
                seed: *seed,
            };
            let numeric = || -> Result<Vec<f64>> {
                values
                    .split(',')
                    .map(|p| {
                        p.trim()
                            .parse()
                            .map_err(|_| Error::Config(format!("'{p}' is not a number")))
                    })
                    .collect()
            };
            let axis = match axis.as_str() {
                "eta-h" => SweepAxis::EtaH(numeric()?),
                "eta-m" => SweepAxis::EtaM(numeric()?),
                "visibility" => SweepAxis::Visibility(numeric()?),
                "family" => SweepAxis::Family(
                    values.split(',').map(|p| p.trim().to_string()).collect(),
                ),
                other => {
                    return Err(Error::Config(format!(
                        "unknown axis '{other}'; expected eta-h, eta-m, visibility, family"
                    )))
                }
            };
            let rows = sweep(&base, &axis, r_policy)
                .into_iter()
                .enumerate()
                .map(|(index, row)| match row.result {
                    Ok(estimate) => vec![
                        row.label,
                        fmt(estimate.mean),
                        fmt(estimate.std_error),
                        fmt(estimate.eta_h_hat),
                        estimate.rounds_valid.to_string(),
                        crate::montecarlo::derive_seed(*seed, index as u64).to_string(),
                        String::new(),
                    ],
                    Err(err) => vec![
                        row.label,
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        err.to_string(),
                    ],
                })
                .collect();
            (
                Table {
                    header: vec![
                        "value",
                        "mean",
                        "std_error",
                        "eta_h_hat",
                        "rounds_valid",
                        "seed",
                        "error",
                    ],
                    rows,
                },
                "sweep",
                Some(*seed),
            )
        }
    };
    Ok((
        render(&table, config.format, command, seed),
        certificate_failed,
    ))
}

fn build_players(state: &str, strategy: &Option<PathBuf>, eta_m: f64) -> Result<Players> {
    match strategy {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?;
            let strategy: CheatStrategy = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("invalid strategy file: {e}")))?;
            Ok(Players::Cheat(strategy))
        }
        None => Ok(Players::Honest {
            rho_ab: parse_state(state)?,
            eta_m,
        }),
    }
}

/// Parse argv, run, and map outcomes to exit codes.
pub fn main() -> ExitCode {
    let config = match RunConfig::try_parse() {
        Ok(config) => config,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match execute(&config) {
        Ok((output, certificate_failed)) => {
            let write_result = match &config.out {
                Some(path) => std::fs::write(path, &output),
                None => {
                    print!("{output}");
                    Ok(())
                }
            };
            if let Err(err) = write_result {
                eprintln!("error: {err}");
                return ExitCode::from(1);
            }
            if certificate_failed {
                eprintln!("certificate FAILED: cheat supremum exceeds tolerance");
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_list_parsing() {
        assert_eq!(
            parse_eta_list(&Some("0.4, 0.6".into()), &None).unwrap(),
            vec![0.4, 0.6]
        );
        let grid = parse_eta_list(&None, &Some("0.2:0.2:1.0".into())).unwrap();
        assert_eq!(grid.len(), 5);
        assert!((grid[4] - 1.0).abs() < 1e-12);
        assert!(parse_eta_list(&Some("abc".into()), &None).is_err());
    }

    #[test]
    fn vec3_parsing() {
        let v = parse_vec3("1, 0, 0").unwrap();
        assert_eq!(v, BlochVector::X);
        assert!(parse_vec3("1,0").is_err());
    }

    #[test]
    fn state_parsing() {
        assert!(parse_state("phi-plus").is_ok());
        assert!(parse_state("product-00").is_ok());
        assert!(parse_state("werner:0.5").is_ok());
        assert!(parse_state("ghz").is_err());
    }
}
