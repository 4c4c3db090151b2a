use fpp_core::exact::{
    c_tilde, ctilde_margin, gamma_c, gamma_c_condition, kappa_from_p, nu_limit, nu_n, nu_n_high_precision,
    percolation_constants, pi_tail, reference_curve, s_ell, s_ell_infinity, Curve, PercolationConstants,
    DEFAULT_BISECTION_TOL,
};
use fpp_core::lab::{
    check_boundary_inequality, containment_check, estimate_complete_recovery, estimate_eta, estimate_tail_law,
    growth_report, liminf_trend, percolation_cluster, wchain_transition_check, BoundaryParams,
    CompleteRecoveryParams, ContainmentParams, EtaParams, GrowthParams, Observable, PercolationParams, Runner,
    SurvivalPolicy, TailLawParams, TrendParams, WChainParams, PERCOLATION_BAND,
};
use fpp_core::sim::{jump_chain, DEFAULT_VERTEX_CAP};
use fpp_core::{run_replication, snapshot, OffspringSpec, RunConfig, StopRule};

use crate::output::{Cell, Output};
use crate::params::Params;
use crate::{ExactOp, Failure, McOp, SimOp, UsageError};

type Res<T> = Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn runner(params: &Params) -> Res<Runner> {
    let jobs = params.get::<usize>("jobs")?.unwrap_or_else(Runner::default_jobs);
    Ok(Runner::new(jobs)?)
}

fn seed(params: &mut Params) -> Res<u64> {
    Ok(params.or("seed", 0u64)?)
}

fn graph(params: &mut Params, default: &str) -> Res<OffspringSpec> {
    params.or("graph", default.to_string())?;
    Ok(params.require::<OffspringSpec>("graph")?)
}

fn semi_line_only(params: &mut Params) -> Res<()> {
    if !graph(params, "semiline")?.is_semi_line() {
        return Err(usage("this operation runs on the semi-line only (--graph semiline)"));
    }
    Ok(())
}

fn stop_rule(params: &Params) -> Res<StopRule> {
    match (params.get::<f64>("t-max")?, params.get::<usize>("n-max")?) {
        (Some(t), None) => Ok(StopRule::TMax(t)),
        (None, Some(n)) => Ok(StopRule::NMax(n)),
        (Some(_), Some(_)) => Err(usage("give only one of --t-max and --n-max")),
        (None, None) => Err(usage("missing --t-max or --n-max")),
    }
}

fn run_config(params: &mut Params, graph_default: &str, stop: StopRule) -> Res<RunConfig> {
    let spec = graph(params, graph_default)?;
    let gamma = params.require::<f64>("gamma")?;
    let cap = params.or("vertex-cap", DEFAULT_VERTEX_CAP)?;
    let config = RunConfig::new(spec, gamma, stop)
        .with_seed(seed(params)?)
        .with_vertex_cap(cap);
    config.validate()?;
    Ok(config)
}

fn policy(params: &mut Params, default_requirement: usize) -> Res<SurvivalPolicy> {
    let mode = params.or("conditioning", "survival".to_string())?;
    let policy = match mode.as_str() {
        "survival" => SurvivalPolicy::condition_on_survival(params.or("requirement", default_requirement)?),
        "none" => SurvivalPolicy::unconditioned(),
        other => return Err(usage(format!("--conditioning {other:?}: expected survival or none"))),
    };
    policy.validate()?;
    Ok(policy)
}

fn list_or<T>(params: &mut Params, key: &str, default: &str) -> Res<Vec<T>>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    if !params.contains(key) {
        params.set(key, default)?;
    }
    let items = params.list::<T>(key)?.unwrap_or_default();
    if items.is_empty() {
        return Err(usage(format!("--{key} is empty")));
    }
    Ok(items)
}

pub fn exact(op: ExactOp, params: &mut Params) -> Res<Output> {
    match op {
        ExactOp::Pi => {
            let gamma = params.require::<f64>("gamma")?;
            let m_max = params.require::<u64>("m-max")?;
            let mut out = Output::table(&["m", "pi", "log_pi"]);
            for m in 1..=m_max {
                let v = pi_tail(m, gamma)?;
                out.row(vec![Cell::U(m), Cell::F(v.value), Cell::F(v.log_value)]);
            }
            Ok(out)
        }
        ExactOp::Nu => {
            let gamma = params.require::<f64>("gamma")?;
            let n = params.require::<u64>("n")?;
            let high = match params.or("precision", "double".to_string())?.as_str() {
                "double" => false,
                "high" => true,
                other => return Err(usage(format!("--precision {other:?}: expected double or high"))),
            };
            let mut out = Output::table(&["n", "nu", "cond"]);
            for k in 1..=n {
                let v = if high { nu_n_high_precision(k, gamma)? } else { nu_n(k, gamma)? };
                out.row(vec![Cell::U(k), Cell::F(v.value), Cell::F(v.condition_number)]);
            }
            Ok(out)
        }
        ExactOp::Sell => {
            let gamma = params.require::<f64>("gamma")?;
            let n = params.require::<u64>("n")?;
            let ls: Vec<u64> = match params.get::<u64>("l")? {
                Some(l) => vec![l],
                None => (1..=n).collect(),
            };
            let mut out = Output::table(&["l", "n", "s_ell", "s_ell_inf"]);
            for l in ls {
                let v = s_ell(l, n, gamma)?;
                out.row(vec![Cell::U(l), Cell::U(n), Cell::F(v.value), Cell::F(s_ell_infinity(l, gamma)?)]);
            }
            Ok(out)
        }
        ExactOp::Constants => constants(params),
        ExactOp::Curves => curves(params),
    }
}

fn constants(params: &mut Params) -> Res<Output> {
    let spec = graph(params, "det:2")?;
    let tol = params.or("tol", DEFAULT_BISECTION_TOL)?;
    let mut out = Output::table(&["name", "value"]);
    let mut put = |name: &'static str, v: f64| out.row(vec![Cell::Name(name), Cell::F(v)]);
    let mean = spec.mean();
    put("mean", mean);
    put("alpha", spec.alpha());
    if mean > 1.0 {
        let c = c_tilde(mean, tol)?;
        put("c_tilde", c);
        put("g(c_tilde)", ctilde_margin(c, mean));
    }
    let delta = params.or("delta", 2u32)?;
    if let Some(gamma) = params.get::<f64>("gamma")? {
        let PercolationConstants { p, kappa } = percolation_constants(gamma, delta)?;
        put("p", p);
        put("kappa", kappa);
        if kappa < 1.0 {
            put("cluster_constant", PercolationConstants { p, kappa }.cluster_constant(delta));
        }
        put("nu_limit", nu_limit(gamma)?);
    }
    if let Some(eps) = params.get::<f64>("eps")? {
        let c_bar = params.or("c-bar", 1.0)?;
        let g = gamma_c(delta, eps, c_bar, tol)?;
        put("gamma_c", g);
        put("condition(gamma_c)", gamma_c_condition(g, delta, c_bar)?);
    }
    Ok(out)
}

fn curves(params: &mut Params) -> Res<Output> {
    let name = params.require::<String>("curve")?;
    let default_alpha = || -> Res<f64> {
        let spec = params.raw("graph").unwrap_or("det:2").parse::<OffspringSpec>()?;
        Ok(spec.alpha())
    };
    let curve = match name.as_str() {
        "limsup" => Curve::LimsupLine,
        "h-liminf" | "m-liminf" | "log-volume" => {
            let alpha = match params.get::<f64>("alpha")? {
                Some(a) => a,
                None => {
                    let a = default_alpha()?;
                    params.set("alpha", &a.to_string())?;
                    a
                }
            };
            match name.as_str() {
                "h-liminf" => Curve::HLiminf { alpha },
                "m-liminf" => Curve::MLiminf { alpha },
                _ => Curve::LogVolume { alpha },
            }
        }
        "eta-h" => Curve::EtaH { r: params.or("r", 1.0)? },
        "eta-m" => Curve::EtaM { r: params.or("r", 1.0)? },
        "percolation" => {
            let delta = params.or("delta", 2u32)?;
            let c_bar = params.or("c-bar", 1.0)?;
            let kappa = match (params.get::<f64>("p")?, params.get::<f64>("gamma")?) {
                (Some(p), None) => kappa_from_p(p, delta),
                (None, Some(gamma)) => percolation_constants(gamma, delta)?.kappa,
                _ => return Err(usage("the percolation curve needs exactly one of --p and --gamma")),
            };
            Curve::Percolation { c_bar, delta, kappa }
        }
        other => {
            return Err(usage(format!(
                "--curve {other:?}: expected limsup, h-liminf, m-liminf, log-volume, eta-h, eta-m or percolation"
            )))
        }
    };
    let xs = params.list::<f64>("x-grid")?.ok_or_else(|| usage("missing --x-grid"))?;
    let mut out = Output::table(&["x", "value"]);
    for x in xs {
        out.row(vec![Cell::F(x), Cell::F(reference_curve(curve, x)?)]);
    }
    Ok(out)
}

pub fn sim(op: SimOp, params: &mut Params) -> Res<Output> {
    match op {
        SimOp::Run => {
            let stop = stop_rule(params)?;
            let log = run_replication(&run_config(params, "semiline", stop)?)?;
            let mut out = Output::table(&["id", "parent", "depth", "tau", "recovery_duration"]);
            for v in log.vertices() {
                out.row(vec![
                    Cell::U(u64::from(v.record.id)),
                    Cell::I(v.record.parent.map_or(-1, i64::from)),
                    Cell::U(u64::from(v.record.depth)),
                    Cell::F(v.tau),
                    Cell::F(v.recovery_duration),
                ]);
            }
            Ok(out)
        }
        SimOp::Snapshot => {
            let stop = stop_rule(params)?;
            let times = match (params.list::<f64>("times")?, stop) {
                (Some(ts), _) => ts,
                (None, StopRule::TMax(t)) => {
                    let ts: Vec<f64> = (0..=t.floor() as u64).map(|k| k as f64).collect();
                    let text: Vec<String> = ts.iter().map(f64::to_string).collect();
                    params.set("times", &text.join(","))?;
                    ts
                }
                (None, StopRule::NMax(_)) => return Err(usage("--n-max runs need explicit --times")),
            };
            let log = run_replication(&run_config(params, "semiline", stop)?)?;
            let mut out = Output::table(&["t", "occupied", "red", "boundary", "H", "M"]);
            for t in times {
                let s = snapshot(&log, t)?;
                out.row(vec![
                    Cell::F(t),
                    Cell::U(s.occupied as u64),
                    Cell::U(s.red_count() as u64),
                    Cell::U(s.boundary_size),
                    Cell::U(u64::from(s.h)),
                    Cell::U(u64::from(s.m_cluster)),
                ]);
            }
            Ok(out)
        }
        SimOp::Wchain => {
            semi_line_only(params)?;
            let stop = stop_rule(params)?;
            let log = run_replication(&run_config(params, "semiline", stop)?)?;
            let mut out = Output::table(&["n", "sigma", "w"]);
            for (n, point) in jump_chain(&log).into_iter().enumerate() {
                out.row(vec![Cell::U(n as u64), Cell::F(point.sigma), Cell::U(point.w)]);
            }
            Ok(out)
        }
    }
}

pub fn mc(op: McOp, params: &mut Params) -> Res<Output> {
    let runner = runner(params)?;
    let report = match op {
        McOp::Tail => {
            semi_line_only(params)?;
            let p = TailLawParams {
                gamma: params.require("gamma")?,
                n: params.require("n")?,
                m_max: params.require("m-max")?,
                reps: params.require("reps")?,
                seed: seed(params)?,
            };
            estimate_tail_law(&runner, &p)?
        }
        McOp::Nu => {
            semi_line_only(params)?;
            let p = CompleteRecoveryParams {
                gamma: params.require("gamma")?,
                n: params.require("n")?,
                reps: params.require("reps")?,
                seed: seed(params)?,
            };
            estimate_complete_recovery(&runner, &p)?
        }
        McOp::Wchain => {
            semi_line_only(params)?;
            let p = WChainParams {
                gamma: params.require("gamma")?,
                length: params.require("n-max")?,
                reps: params.require("reps")?,
                seed: seed(params)?,
                min_obs: params.or("min-obs", 1000u64)?,
            };
            wchain_transition_check(&runner, &p)?
        }
        McOp::Eta => {
            let m: u32 = params.require("m")?;
            let config = run_config(params, "det:2", StopRule::NMax(usize::MAX))?;
            let p = EtaParams {
                config,
                observable: params.or("observable", Observable::H)?,
                m,
                reps: params.require("reps")?,
                x_grid: list_or(params, "x-grid", "100,1000,10000")?,
                r: params.or("r", 0.5)?,
            };
            estimate_eta(&runner, &p)?
        }
        McOp::Boundary => {
            let t: f64 = params.require("t")?;
            let config = run_config(params, "det:2", StopRule::TMax(t))?;
            let p = BoundaryParams {
                config,
                observable: params.or("observable", Observable::H)?,
                t,
                m: params.require("m")?,
                n: params.require("n")?,
                reps: params.require("reps")?,
            };
            check_boundary_inequality(&runner, &p)?
        }
        McOp::Growth => {
            let config = run_config(params, "det:2", StopRule::NMax(1))?;
            let n_grid = params.list::<usize>("n-grid")?.unwrap_or_default();
            let t_grid = params.list::<f64>("t-grid")?.unwrap_or_default();
            if n_grid.is_empty() && t_grid.is_empty() {
                return Err(usage("growth needs --n-grid and/or --t-grid"));
            }
            let requirement = n_grid.iter().copied().max().unwrap_or(1);
            let p = GrowthParams {
                config,
                n_grid,
                t_grid,
                reps: params.require("reps")?,
                policy: policy(params, requirement)?,
                ks_n: params.or("ks-n", 30usize)?,
                ks_samples: params.or("ks-samples", 10_000usize)?,
            };
            growth_report(&runner, &p)?
        }
        McOp::Trend => {
            let config = run_config(params, "det:2", StopRule::NMax(1))?;
            let p = TrendParams {
                config,
                t_grid: params.list::<f64>("t-grid")?.ok_or_else(|| usage("missing --t-grid"))?,
                reps: params.require("reps")?,
                policy: policy(params, 1)?,
                slack: params.or("slack", 0.5)?,
                level: params.or("level", 0.01)?,
            };
            liminf_trend(&runner, &p)?
        }
        McOp::Containment => {
            let t_max: f64 = params.require("t-max")?;
            let spec = graph(params, "det:2")?;
            let cap = params.or("vertex-cap", DEFAULT_VERTEX_CAP)?;
            let config = RunConfig::new(spec, 1.0, StopRule::TMax(t_max))
                .with_seed(seed(params)?)
                .with_vertex_cap(cap);
            let p = ContainmentParams {
                config,
                c: params.get("c")?,
                reps: params.require("reps")?,
            };
            containment_check(&runner, &p)?
        }
        McOp::Percolation => {
            let delta = params.or("delta", 2u32)?;
            let p = match (params.get::<f64>("p")?, params.get::<f64>("gamma")?) {
                (Some(p), None) => p,
                (None, Some(gamma)) => {
                    let p = percolation_constants(gamma, delta)?.p;
                    params.set("p", &p.to_string())?;
                    p
                }
                _ => return Err(usage("percolation needs exactly one of --p and --gamma")),
            };
            let p = PercolationParams {
                delta,
                p,
                depth: params.require("depth")?,
                reps: params.require("reps")?,
                seed: seed(params)?,
                band: params.or("band", PERCOLATION_BAND)?,
            };
            percolation_cluster(&p)?
        }
    };
    Ok(Output::Report(report))
}

impl From<fpp_core::Error> for UsageError {
    fn from(e: fpp_core::Error) -> Self {
        UsageError(e.to_string())
    }
}
