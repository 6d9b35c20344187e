//! The subcommands. Each returns the text of its report.

use std::collections::BTreeMap;

use cavity_ghz::c64;
use cavity_ghz::dynamics::{dispersive_convergence, optimal_probe_time, probe_branches};
use cavity_ghz::ghztest::run_ghz_test;
use cavity_ghz::hilbert::{fidelity, make_coherent, Sign};
use cavity_ghz::protocol::{
    atomic_fidelity, bell_target, ghz_target, hybrid_target, prepare_epr, prepare_ghz, success_probability_report,
    EprVariant, GhzMode, MeasurementRecord, ProtocolRun,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::RunConfig;
use crate::failure::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    artifact: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    config: &'a RunConfig,
    result: T,
}

fn render<T: Serialize>(command: &str, cfg: &RunConfig, result: T) -> Result<String, Failure> {
    let report = Report {
        artifact: "cavity-ghz",
        version: env!("CARGO_PKG_VERSION"),
        command,
        seed: cfg.seed,
        config: cfg,
        result,
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| Failure::Io(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// CSV body preceded by `#` lines echoing the artifact and configuration.
fn render_csv(command: &str, cfg: &RunConfig, header: &str, rows: &[Vec<f64>]) -> Result<String, Failure> {
    let echo = serde_json::to_string(cfg).map_err(|e| Failure::Io(e.to_string()))?;
    let mut text = format!(
        "# artifact=cavity-ghz version={} command={command} seed={}\n# config={echo}\n{header}\n",
        env!("CARGO_PKG_VERSION"),
        cfg.seed
    );
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    Ok(text)
}

fn recipe_rng(cfg: &RunConfig) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed)
}

#[derive(Serialize)]
struct Preparation {
    fidelity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    fidelity_normalized_cats: Option<f64>,
    probe_success_probability: f64,
    branch_probability: f64,
    records: Vec<MeasurementRecord>,
}

impl Preparation {
    fn new(run: &ProtocolRun, fidelity: f64, fidelity_normalized_cats: Option<f64>) -> Self {
        Preparation {
            fidelity,
            fidelity_normalized_cats,
            probe_success_probability: success_probability_report(run),
            branch_probability: run.branch_probability,
            records: run.records.clone(),
        }
    }
}

pub fn prepare_epr_report(cfg: &RunConfig) -> Result<String, Failure> {
    #[derive(Serialize)]
    struct Epr {
        variant: EprVariant,
        #[serde(flatten)]
        prep: Preparation,
    }
    let run = prepare_epr(cfg.variant, &cfg.recipe(), &mut recipe_rng(cfg))?;
    let f = atomic_fidelity(&run.final_state, &bell_target(cfg.variant))?;
    let result = Epr {
        variant: cfg.variant,
        prep: Preparation::new(&run, f, None),
    };
    render("prepare-epr", cfg, result)
}

pub fn prepare_ghz_report(cfg: &RunConfig) -> Result<String, Failure> {
    #[derive(Serialize)]
    struct Ghz {
        sign: Sign,
        mode: GhzMode,
        #[serde(flatten)]
        prep: Preparation,
    }
    let run = prepare_ghz(cfg.sign, cfg.mode, &cfg.recipe(), &mut recipe_rng(cfg))?;
    let prep = match cfg.mode {
        GhzMode::Atomic => Preparation::new(&run, atomic_fidelity(&run.final_state, &ghz_target(cfg.sign))?, None),
        GhzMode::Hybrid => {
            let raw = hybrid_target(cfg.sign, cfg.alpha, cfg.dim, false)?;
            let normalized = hybrid_target(cfg.sign, cfg.alpha, cfg.dim, true)?;
            Preparation::new(
                &run,
                fidelity(&run.final_state, &raw)?,
                Some(fidelity(&run.final_state, &normalized)?),
            )
        }
    };
    render("prepare-ghz", cfg, Ghz { sign: cfg.sign, mode: cfg.mode, prep })
}

pub fn ghz_test_report(cfg: &RunConfig) -> Result<String, Failure> {
    #[derive(Serialize)]
    struct Test {
        sign: Sign,
        mode: GhzMode,
        shots: u64,
        branch_counts: BTreeMap<String, u64>,
        expected_probabilities: BTreeMap<String, f64>,
        product_counts: BTreeMap<&'static str, u64>,
        qm_prediction: i8,
        lhv_prediction: i8,
        all_products_match_qm: bool,
        verdict: String,
    }
    let r = run_ghz_test(cfg.sign, cfg.mode, cfg.shots, &cfg.recipe(), cfg.seed)?;
    let plus = r.shot_products.iter().filter(|&&p| p == 1).count() as u64;
    let result = Test {
        sign: r.sign,
        mode: r.mode,
        shots: r.shots,
        product_counts: BTreeMap::from([("+1", plus), ("-1", r.shots - plus)]),
        all_products_match_qm: r.all_products_match_qm(),
        verdict: r.verdict.to_string(),
        qm_prediction: r.qm_prediction,
        lhv_prediction: r.lhv_prediction,
        branch_counts: r.branch_counts,
        expected_probabilities: r.expected_probabilities,
    };
    render("ghz-test", cfg, result)
}

pub fn probe_sweep_report(cfg: &RunConfig, format: Format) -> Result<String, Failure> {
    #[derive(Serialize)]
    struct Row {
        gt: f64,
        p_a: f64,
        p_b: f64,
    }
    #[derive(Serialize)]
    struct Sweep {
        mean_photon_number: f64,
        optimal_gt: f64,
        rows: Vec<Row>,
    }
    let nbar = (2.0 * cfg.alpha).powi(2);
    let optimal = optimal_probe_time(nbar, 1.0)?;
    let field = make_coherent(c64(2.0 * cfg.alpha, 0.0), cfg.dim)?;
    let gt_max = cfg.gt_max.unwrap_or(2.0 * optimal);
    let rows = (0..cfg.points)
        .map(|i| {
            let gt = gt_max * i as f64 / (cfg.points - 1) as f64;
            let b = probe_branches(&field, gt)?;
            Ok(Row { gt, p_a: b.p_a, p_b: b.p_b })
        })
        .collect::<Result<Vec<_>, cavity_ghz::Error>>()?;
    match format {
        Format::Json => render(
            "probe-sweep",
            cfg,
            Sweep {
                mean_photon_number: nbar,
                optimal_gt: optimal,
                rows,
            },
        ),
        Format::Csv => {
            let table: Vec<Vec<f64>> = rows.iter().map(|r| vec![r.gt, r.p_a, r.p_b]).collect();
            render_csv("probe-sweep", cfg, "gt,p_a,p_b", &table)
        }
    }
}

pub fn dispersive_convergence_report(cfg: &RunConfig, format: Format) -> Result<String, Failure> {
    #[derive(Serialize)]
    struct Convergence {
        #[serde(flatten)]
        table: cavity_ghz::dynamics::ConvergenceTable,
        ratios: Vec<f64>,
    }
    let table = dispersive_convergence(&cfg.delta_over_g, cfg.dispersive_phi, cfg.dim)?;
    match format {
        Format::Json => {
            let ratios = table.ratios();
            render("dispersive-convergence", cfg, Convergence { table, ratios })
        }
        Format::Csv => {
            let rows: Vec<Vec<f64>> = table.rows.iter().map(|r| vec![r.delta_over_g, r.distance]).collect();
            render_csv("dispersive-convergence", cfg, "delta_over_g,distance", &rows)
        }
    }
}
