//! One function per subcommand, each producing a manifest echo and a table.

use fracpois::fpp_dist::{bivariate_pmf, interarrival_density, pmf, survival, waiting_time_density};
use fracpois::frac_integral::rl_integral_of_path;
use fracpois::moments::{verify_moment, MomentKind, MomentReport};
use fracpois::path_sim::{path_integral, run_collect, run_fold, sample_fpp_path};
use fracpois::skellam::{integral_diff_mean, integral_diff_variance, sample_integral_diff, skellam_pmf};
use fracpois::stats::Moments;
use fracpois::{BivariateQuery, FppParams, FracIntegralSpec, SimConfig, SkellamParams};

use crate::report::{Cell, Table};
use crate::{Command, Failure, Process, Sim};

pub struct Outcome {
    pub command: &'static str,
    pub params: Vec<(&'static str, Cell)>,
    pub table: Table,
    /// False only when a verification found some |z| above its limit.
    pub passed: bool,
}

const VERIFY_PATHS: usize = 100_000;
const SIMULATE_PATHS: usize = 1_000;

fn positive(name: &str, x: f64) -> Result<f64, Failure> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(Failure::Usage(format!("--{name} must be a positive finite number, got {x}")))
    }
}

fn process_params(p: &Process) -> Result<FppParams, Failure> {
    Ok(FppParams::new(p.lambda, p.nu)?)
}

fn sim_config(sim: &Sim, default_paths: usize) -> Result<SimConfig, Failure> {
    Ok(SimConfig::new(sim.seed, sim.n_paths.unwrap_or(default_paths), sim.workers)?)
}

fn sim_echo(cfg: &SimConfig) -> [(&'static str, Cell); 3] {
    [("seed", cfg.seed.into()), ("n_paths", cfg.n_paths.into()), ("workers", cfg.workers.into())]
}

fn moment_table(reports: &[MomentReport], z_limit: f64) -> (Table, bool) {
    let mut table =
        Table::new(&["quantity", "analytic", "mc_estimate", "mc_std_error", "n_samples", "z_score", "pass"]);
    let mut passed = true;
    for r in reports {
        let ok = r.within(z_limit);
        passed &= ok;
        table.push(vec![
            r.name.as_str().into(),
            r.analytic.into(),
            r.mc_estimate.into(),
            r.mc_std_error.into(),
            r.n_samples.into(),
            r.z_score.into(),
            ok.into(),
        ]);
    }
    (table, passed)
}

fn battery(n: u64, k: u32) -> [MomentKind; 9] {
    [
        MomentKind::MeanCount,
        MomentKind::MeanFracIntegral,
        MomentKind::VarFracIntegral,
        MomentKind::SecondMomentFracIntegral,
        MomentKind::CondMeanFracIntegral { n },
        MomentKind::CondVarFracIntegral { n },
        MomentKind::CondSecondMomentFracIntegral { n },
        MomentKind::MeanIntegratedPower { k },
        MomentKind::CondMeanIntegratedPower { n, k },
    ]
}

fn label(kind: &MomentKind) -> String {
    match *kind {
        MomentKind::CondMeanFracIntegral { n }
        | MomentKind::CondVarFracIntegral { n }
        | MomentKind::CondSecondMomentFracIntegral { n } => format!("{}[n={n}]", kind.name()),
        MomentKind::MeanIntegratedPower { k } => format!("{}[k={k}]", kind.name()),
        MomentKind::CondMeanIntegratedPower { n, k } => format!("{}[n={n},k={k}]", kind.name()),
        _ => kind.name().to_string(),
    }
}

pub fn run(command: &Command) -> Result<Outcome, Failure> {
    match *command {
        Command::Pmf { process, t, kmax } => {
            let params = process_params(&process)?;
            positive("t", t)?;
            let mut table = Table::new(&["k", "probability"]);
            for k in 0..=kmax {
                table.push(vec![k.into(), pmf(&params, t, k)?.into()]);
            }
            Ok(Outcome {
                command: "pmf",
                params: vec![
                    ("nu", process.nu.into()),
                    ("lambda", process.lambda.into()),
                    ("t", t.into()),
                    ("kmax", kmax.into()),
                ],
                table,
                passed: true,
            })
        }
        Command::Bivariate { process, s, t, r } => {
            let params = process_params(&process)?;
            let mut table = Table::new(&["k", "r", "probability", "error_estimate"]);
            for rr in 0..=r {
                for k in 0..=rr {
                    let est = bivariate_pmf(&params, &BivariateQuery::new(s, t, k, rr))?;
                    table.push(vec![k.into(), rr.into(), est.value.into(), est.error.into()]);
                }
            }
            Ok(Outcome {
                command: "bivariate",
                params: vec![
                    ("nu", process.nu.into()),
                    ("lambda", process.lambda.into()),
                    ("s", s.into()),
                    ("t", t.into()),
                    ("r", r.into()),
                ],
                table,
                passed: true,
            })
        }
        Command::Waiting { process, t, k, points } => {
            let params = process_params(&process)?;
            positive("t", t)?;
            if k == 0 || points == 0 {
                return Err(Failure::Usage("--k and --points must be at least 1".into()));
            }
            let mut table = Table::new(&["s", "survival", "interarrival_density", "waiting_density"]);
            for i in 1..=points {
                let s = t * f64::from(i) / f64::from(points);
                table.push(vec![
                    s.into(),
                    survival(&params, s)?.into(),
                    interarrival_density(&params, s)?.into(),
                    waiting_time_density(&params, k, s)?.into(),
                ]);
            }
            Ok(Outcome {
                command: "waiting",
                params: vec![
                    ("nu", process.nu.into()),
                    ("lambda", process.lambda.into()),
                    ("t", t.into()),
                    ("k", k.into()),
                    ("points", points.into()),
                ],
                table,
                passed: true,
            })
        }
        Command::Moments { process, alpha, t, n, k } => {
            let params = process_params(&process)?;
            let spec = FracIntegralSpec::new(alpha, t)?;
            let mut table = Table::new(&["quantity", "value"]);
            for kind in battery(n, k) {
                table.push(vec![label(&kind).as_str().into(), kind.analytic(&params, &spec)?.into()]);
            }
            Ok(Outcome {
                command: "moments",
                params: vec![
                    ("nu", process.nu.into()),
                    ("lambda", process.lambda.into()),
                    ("alpha", alpha.into()),
                    ("t", t.into()),
                    ("n", n.into()),
                    ("k", k.into()),
                ],
                table,
                passed: true,
            })
        }
        Command::Verify { process, alpha, t, n, k, sim, z_limit } => {
            let params = process_params(&process)?;
            let spec = FracIntegralSpec::new(alpha, t)?;
            let cfg = sim_config(&sim, VERIFY_PATHS)?;
            positive("z-limit", z_limit)?;
            let mut reports = Vec::new();
            for (i, kind) in battery(n, k).into_iter().enumerate() {
                let stream = SimConfig::new(cfg.seed.wrapping_add(i as u64), cfg.n_paths, cfg.workers)?;
                let mut report = verify_moment(kind, &params, &spec, &stream)?;
                report.name = label(&kind);
                reports.push(report);
            }
            let (table, passed) = moment_table(&reports, z_limit);
            let mut echo = vec![
                ("nu", process.nu.into()),
                ("lambda", process.lambda.into()),
                ("alpha", alpha.into()),
                ("t", t.into()),
                ("n", n.into()),
                ("k", k.into()),
            ];
            echo.extend(sim_echo(&cfg));
            echo.push(("z_limit", z_limit.into()));
            Ok(Outcome { command: "verify", params: echo, table, passed })
        }
        Command::Simulate { process, alpha, t, sim } => {
            let params = process_params(&process)?;
            let spec = FracIntegralSpec::new(alpha, t)?;
            let cfg = sim_config(&sim, SIMULATE_PATHS)?;
            let rows = run_collect(&cfg, |rng| {
                let path = sample_fpp_path(&params, t, rng)?;
                Ok((path.count(), path_integral(&path), rl_integral_of_path(&path, &spec)?))
            })?;
            let mut table = Table::new(&["path", "count", "path_integral", "rl_integral"]);
            for (i, (count, a, rl)) in rows.into_iter().enumerate() {
                table.push(vec![i.into(), count.into(), a.into(), rl.into()]);
            }
            let mut echo = vec![
                ("nu", process.nu.into()),
                ("lambda", process.lambda.into()),
                ("alpha", alpha.into()),
                ("t", t.into()),
            ];
            echo.extend(sim_echo(&cfg));
            Ok(Outcome { command: "simulate", params: echo, table, passed: true })
        }
        Command::Skellam { lambda, beta, t, r, verify, sim, z_limit } => {
            let params = SkellamParams::new(lambda, beta)?;
            positive("t", t)?;
            let mut echo = vec![("lambda", lambda.into()), ("beta", beta.into()), ("t", t.into())];
            if !verify {
                echo.push(("r", r.into()));
                let mut table = Table::new(&["r", "probability"]);
                let r = i64::from(r);
                for j in -r..=r {
                    table.push(vec![j.into(), skellam_pmf(&params, t, j)?.into()]);
                }
                return Ok(Outcome { command: "skellam", params: echo, table, passed: true });
            }
            let cfg = sim_config(&sim, VERIFY_PATHS)?;
            positive("z-limit", z_limit)?;
            let acc = run_fold(
                &cfg,
                Moments::new,
                |m, rng| {
                    m.push(sample_integral_diff(&params, t, rng)?);
                    Ok(())
                },
                |a, b| a.merge(&b),
            )?;
            let reports = [
                MomentReport::new(
                    "integral_diff_mean",
                    Some(integral_diff_mean(&params, t)),
                    acc.mean(),
                    acc.std_error_mean(),
                    acc.count(),
                ),
                MomentReport::new(
                    "integral_diff_variance",
                    Some(integral_diff_variance(&params, t)),
                    acc.variance(),
                    acc.std_error_variance(),
                    acc.count(),
                ),
            ];
            let (table, passed) = moment_table(&reports, z_limit);
            echo.extend(sim_echo(&cfg));
            echo.push(("z_limit", z_limit.into()));
            Ok(Outcome { command: "skellam", params: echo, table, passed })
        }
    }
}
