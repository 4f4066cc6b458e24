use multibag::resampling::Resampler;
use multibag::simulation::{mean_and_se, run_power_study, PowerReport, SimulationDesign};
use multibag::{load_dataset, run_bagging, vote_curve, BaggingConfig, TwoGroupDataset};

use crate::config::{value_name, Mode, RunConfig};
use crate::error::CliError;
use crate::output::{ensure_dir, real, write_file, Table};

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    match cfg.mode {
        Mode::Analyze => cmd_analyze(cfg),
        Mode::Simulate => cmd_simulate(cfg),
    }
}

fn scheme_params(table: &mut Table, resampler: &Resampler) {
    match resampler {
        Resampler::Bagging { .. } => {}
        Resampler::RandomSubbag { sizes, .. } => {
            if let Some(a) = sizes.ratio_a {
                table.kv("ratio_a", real(a));
            }
            table.kv("b_x", sizes.b_x);
            table.kv("b_y", sizes.b_y);
        }
        Resampler::MaxContrast(plan) => {
            table.kv("d_x", plan.d_x);
            table.kv("d_y", plan.d_y);
            table.kv("m_x", plan.m_x());
            table.kv("m_y", plan.m_y());
        }
    }
}

/// Bagged analysis of a control/patient pair. Writes `rejections.tsv`,
/// `votes_curve.tsv`, `summary.tsv` and `resolved_config.txt`.
pub fn cmd_analyze(cfg: &RunConfig) -> Result<(), CliError> {
    let (control, patient) = match (&cfg.control, &cfg.patient) {
        (Some(c), Some(p)) => (c, p),
        _ => return Err(CliError::Usage("analyze needs --control and --patient".into())),
    };
    let data: TwoGroupDataset = load_dataset(control, patient).map_err(CliError::Input)?;
    data.check_testable().map_err(CliError::Input)?;
    let scheme = cfg.scheme()?;
    let resampler = scheme.resolve(data.n_x(), data.n_y()).map_err(CliError::Input)?;
    let bag_cfg = BaggingConfig {
        test: cfg.test_config()?,
        scheme,
        b: cfg.b,
        rule: cfg.rule(),
        master_seed: cfg.seed,
    };
    let outcome = run_bagging(&data, &bag_cfg).map_err(|e| CliError::Internal(e.to_string()))?;
    let tally = &outcome.tally;
    let rule_name = value_name(cfg.rule);

    ensure_dir(&cfg.out)?;

    let mut rejections = Table::new(
        &format!(
            "per-row votes: V counts the original and pseudo-sample lists, V_star counts the original twice; final marks rows declared non-null under rule {rule_name}"
        ),
        &["id", "V", "V_star", "in_original", "final"],
    );
    for (i, id) in data.row_ids().iter().enumerate() {
        rejections.row([
            id.clone(),
            tally.vote(i).to_string(),
            tally.weighted_vote(i).to_string(),
            u8::from(outcome.original.contains(i)).to_string(),
            u8::from(outcome.final_list.contains(i)).to_string(),
        ]);
    }
    rejections.write_to(&cfg.out.join("rejections.tsv"))?;

    let plain = vote_curve(tally, false);
    let starred = vote_curve(tally, true);
    let mut curve = Table::new(
        "number of rows with at least h votes (N) and at least h weighted votes (N_star)",
        &["h", "N", "N_star"],
    );
    for (k, &(h, n_star)) in starred.iter().enumerate() {
        let n = plain.get(k).map_or(0, |&(_, n)| n);
        curve.row([h.to_string(), n.to_string(), n_star.to_string()]);
    }
    curve.write_to(&cfg.out.join("votes_curve.tsv"))?;

    let mut summary = Table::new("analysis summary", &["key", "value"]);
    summary.kv("mode", "analyze");
    summary.kv("control", control.display());
    summary.kv("patient", patient.display());
    summary.kv("n_rows", data.n_rows());
    summary.kv("n_x", data.n_x());
    summary.kv("n_y", data.n_y());
    summary.kv("scheme", scheme.name());
    scheme_params(&mut summary, &resampler);
    summary.kv("B_requested", cfg.b);
    summary.kv("B", outcome.n_pseudo());
    summary.kv("q", real(cfg.q));
    summary.kv("variance", bag_cfg.test.variance_mode().as_str());
    summary.kv("rule", &rule_name);
    summary.kv("seed", cfg.seed);
    summary.kv("original_list_size", outcome.original.len());
    let pseudo_sizes: Vec<f64> = outcome.pseudo.iter().map(|l| l.len() as f64).collect();
    summary.kv("mean_pseudo_list_size", real(mean_and_se(&pseudo_sizes).0));
    summary.kv("union_size", outcome.union_size());
    summary.kv("final_list_size", outcome.final_list.len());
    match outcome.nominal_fdr_estimate() {
        Some(r) => {
            summary.kv("fdr_big_estimate", real(r.fdr_big));
            summary.kv(
                "fdr_big_note",
                "union FDR estimate from nominal q per list, assuming rows found by two or more lists are non-null",
            );
        }
        None => summary.kv("fdr_big_estimate", "NA"),
    }
    summary.write_to(&cfg.out.join("summary.tsv"))?;
    write_file(&cfg.out.join("resolved_config.txt"), &cfg.echo())
}

/// Monte Carlo power study. Writes `power_report.tsv`, optionally
/// `replicates.tsv`, and `resolved_config.txt`.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<(), CliError> {
    let design = cfg.design()?;
    let report = run_power_study(&design).map_err(|e| CliError::Internal(e.to_string()))?;
    ensure_dir(&cfg.out)?;
    power_table(&design, &report)?.write_to(&cfg.out.join("power_report.tsv"))?;
    if cfg.per_replicate {
        let mut reps = Table::new(
            "per-replicate discovery power and false discovery proportion",
            &[
                "replicate",
                "adp_plain",
                "adp_agg",
                "afdr_plain",
                "afdr_agg",
                "size_plain",
                "size_agg",
            ],
        );
        for (r, rep) in report.per_replicate.iter().enumerate() {
            reps.row([
                r.to_string(),
                real(rep.adp_plain),
                real(rep.adp_agg),
                real(rep.afdr_plain),
                real(rep.afdr_agg),
                rep.size_plain.to_string(),
                rep.size_agg.to_string(),
            ]);
        }
        reps.write_to(&cfg.out.join("replicates.tsv"))?;
    }
    write_file(&cfg.out.join("resolved_config.txt"), &cfg.echo())
}

fn power_table(design: &SimulationDesign, report: &PowerReport) -> Result<Table, CliError> {
    let resampler = design
        .scheme
        .resolve(design.n_x, design.n_y)
        .map_err(CliError::Input)?;
    let mut t = Table::new(
        "simulation report: resolved design, then means over replicates",
        &["key", "value"],
    );
    t.kv("mode", "simulate");
    let is_reference = *design == SimulationDesign::reference();
    t.kv(
        "design",
        if is_reference {
            "reference (this tool's own choice)"
        } else {
            "custom"
        },
    );
    t.kv("N", design.n_rows);
    t.kv("n_null", design.n_null);
    t.kv("n_x", design.n_x);
    t.kv("n_y", design.n_y);
    t.kv("delta", real(design.effect_delta));
    t.kv("sigma", real(design.sigma));
    t.kv("scheme", design.scheme.name());
    scheme_params(&mut t, &resampler);
    t.kv("B_requested", design.b);
    t.kv("B", report.n_pseudo);
    t.kv("q", real(design.level_q));
    t.kv("variance", design.variance_mode.as_str());
    t.kv("rule", design.rule.name());
    t.kv("replicates", design.replicates);
    t.kv("seed", design.master_seed);

    let se = |v: Vec<f64>| real(mean_and_se(&v).1);
    t.kv("adp_defined", report.adp_defined);
    if !report.adp_defined {
        t.kv(
            "adp_note",
            "no non-null rows: ADP undefined, reported as 0 by convention",
        );
    }
    t.kv("mean_adp_plain", real(report.mean_adp_plain));
    t.kv("se_adp_plain", se(report.adp_plain_values()));
    t.kv("mean_adp_agg", real(report.mean_adp_agg));
    t.kv("se_adp_agg", se(report.adp_agg_values()));
    let (gain, gain_se) = report.adp_gain();
    t.kv("mean_adp_gain", real(gain));
    t.kv("se_adp_gain", real(gain_se));
    t.kv("mean_afdr_plain", real(report.mean_afdr_plain));
    t.kv("se_afdr_plain", se(report.afdr_plain_values()));
    t.kv("mean_afdr_agg", real(report.mean_afdr_agg));
    t.kv("se_afdr_agg", se(report.afdr_agg_values()));
    let s = &report.list_size_stats;
    t.kv("mean_size_plain", real(s.mean_plain));
    t.kv("mean_size_agg", real(s.mean_agg));
    t.kv("min_size_plain", s.min_plain);
    t.kv("max_size_plain", s.max_plain);
    t.kv("min_size_agg", s.min_agg);
    t.kv("max_size_agg", s.max_agg);
    Ok(t)
}
