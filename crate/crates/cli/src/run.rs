//! Turning a validated config into check results.

use std::collections::BTreeMap;

use cuspfs::cusp::checks as cc;
use cuspfs::cusp::checks::Labeled;
use cuspfs::kondratiev::{self as kd, ConeFunction, PolarDomain};
use cuspfs::localization::checks as lc;
use cuspfs::parabolic::checks as pc;
use cuspfs::parabolic::{Scheme, TimeStepping};
use cuspfs::report::CheckResult;
use cuspfs::tolerance::Tolerances;
use cuspfs::weighted::checks as wc;
use cuspfs::weighted::checks::{Embedding, Setting};
use cuspfs::weighted::Corpus;

use crate::config::{self, Config, CuspSection, KondratievSection, LocalizationSection, MrSection, OracleSection, SolverSection, WeightedSection};
use crate::registry::{self, CheckInfo, Command, Section};
use crate::ConfigError;

pub const DEFAULT_SEED: u64 = 42;

/// A side table written next to the check CSVs.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

/// Everything a run needs, built and validated before any check executes.
pub struct Plan {
    pub command: Command,
    pub checks: Vec<&'static CheckInfo>,
    pub seed: u64,
    pub tol: Tolerances,
    cusp: Option<(CuspSection, Vec<Labeled>)>,
    oracle: OracleSection,
    weighted: Option<(WeightedSection, Vec<Setting>, Corpus)>,
    localization: Option<(LocalizationSection, Setting, Corpus)>,
    solver: Option<SolverSection>,
    mr: Option<MrSection>,
    kondratiev: Option<Kondratiev>,
}

struct Kondratiev {
    section: KondratievSection,
    domains: Vec<PolarDomain>,
    reblended: Vec<PolarDomain>,
    corpus: Vec<ConeFunction>,
}

fn cfg_err(what: &str) -> impl Fn(cuspfs::Error) -> ConfigError + '_ {
    move |e| ConfigError(format!("{what}: {e}"))
}

fn check_q(what: &str, qs: &[f64]) -> Result<(), ConfigError> {
    if qs.is_empty() {
        return Err(ConfigError(format!("{what}: q list is empty")));
    }
    match qs.iter().find(|q| !(q.is_finite() && **q >= 1.0)) {
        Some(q) => Err(ConfigError(format!("{what}: q = {q} must be a finite number >= 1"))),
        None => Ok(()),
    }
}

fn check_k(what: &str, ks: &[usize], max: usize) -> Result<(), ConfigError> {
    if ks.is_empty() {
        return Err(ConfigError(format!("{what}: k list is empty")));
    }
    match ks.iter().find(|k| **k > max) {
        Some(k) => Err(ConfigError(format!("{what}: k = {k} exceeds {max}"))),
        None => Ok(()),
    }
}

fn check_steps(what: &str, dt: f64, t_end: f64) -> Result<(), ConfigError> {
    TimeStepping::new(dt, t_end, Scheme::ImplicitEuler).steps().map(|_| ()).map_err(cfg_err(what))
}

fn require<T: Clone>(s: &Option<T>, section: Section, id: &str) -> Result<T, ConfigError> {
    s.clone().ok_or_else(|| ConfigError(format!("check {id} needs the \"{}\" section", section.key())))
}

impl Plan {
    pub fn new(command: Command, cfg: Config, seed: Option<u64>) -> Result<Plan, ConfigError> {
        let seed = seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
        let tol = config::tolerances(cfg.tolerances.as_ref())?;
        let ids: Vec<String> = match &cfg.checks {
            Some(ids) if ids.is_empty() => return Err(ConfigError("\"checks\" must not be empty".into())),
            Some(ids) => ids.clone(),
            None => command.default_checks().into_iter().map(String::from).collect(),
        };
        let mut checks: Vec<&'static CheckInfo> = Vec::new();
        for id in &ids {
            let info = registry::lookup(id).ok_or_else(|| ConfigError(format!("unknown check id {id:?}")))?;
            if checks.iter().any(|c| c.id == info.id) {
                return Err(ConfigError(format!("check {id} listed twice")));
            }
            checks.push(info);
        }
        let needs = |s: Section| checks.iter().find(|c| c.section == s).map(|c| c.id);
        let mut plan = Plan {
            command,
            checks: checks.clone(),
            seed,
            tol,
            cusp: None,
            oracle: cfg.oracle.clone().unwrap_or_default(),
            weighted: None,
            localization: None,
            solver: None,
            mr: None,
            kondratiev: None,
        };
        if let Some(id) = needs(Section::Cusp) {
            let sec = require(&cfg.cusp, Section::Cusp, id)?;
            if sec.characteristics.is_empty() {
                return Err(ConfigError("cusp: no characteristics".into()));
            }
            let chars = sec.characteristics.iter().map(|c| c.build()).collect::<cuspfs::Result<Vec<_>>>().map_err(cfg_err("cusp"))?;
            cuspfs::cusp::Cutoff::new(sec.glue[0], sec.glue[1]).map_err(cfg_err("cusp.glue"))?;
            if sec.singularity_nt < 3 {
                return Err(ConfigError("cusp: singularity_nt must be at least 3".into()));
            }
            plan.cusp = Some((sec, chars));
        }
        if needs(Section::Oracle).is_some() {
            for c in &plan.oracle.lq_cases {
                check_q("oracle", &[c[2]])?;
                if !((c[0] - c[1]) * c[2] > 0.0) {
                    return Err(ConfigError(format!("oracle: case {c:?} needs mu > lambda")));
                }
            }
        }
        if let Some(id) = needs(Section::Weighted) {
            let sec = require(&cfg.weighted, Section::Weighted, id)?;
            check_q("weighted", &sec.q)?;
            check_k("weighted", &sec.k, 3)?;
            if sec.lambda.is_empty() {
                return Err(ConfigError("weighted: lambda list is empty".into()));
            }
            for p in &sec.lambda_pairs {
                if p[1] < p[0] {
                    return Err(ConfigError(format!("weighted: lambda pair {p:?} is decreasing")));
                }
            }
            let dim = sec.geometry.characteristics.len();
            let settings = sec.geometry.settings().map_err(cfg_err("weighted.geometry"))?;
            if dim == 0 {
                return Err(ConfigError("weighted.geometry: no characteristics".into()));
            }
            let m = settings[0].cusp.dim();
            for e in &sec.embeddings {
                e.variant().validate(m).map_err(cfg_err("weighted.embeddings"))?;
            }
            if let Some(mul) = &sec.multiplication {
                check_q("weighted.multiplication", &[mul.q])?;
                check_k("weighted.multiplication", &[mul.k], 2)?;
            }
            let corpus = sec.geometry.corpus(seed).map_err(cfg_err("weighted.geometry.corpus"))?;
            plan.weighted = Some((sec, settings, corpus));
        }
        if let Some(id) = needs(Section::Localization) {
            let sec = require(&cfg.localization, Section::Localization, id)?;
            check_q("localization", &sec.q)?;
            check_k("localization", &sec.k, 2)?;
            let mut settings = sec.geometry.settings().map_err(cfg_err("localization.geometry"))?;
            if settings.len() != 1 {
                return Err(ConfigError("localization: exactly one characteristic expected".into()));
            }
            if sec.overlaps.is_empty() || sec.overlaps.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
                return Err(ConfigError("localization: overlaps must lie in (0, 1)".into()));
            }
            let corpus = sec.geometry.corpus(seed).map_err(cfg_err("localization.geometry.corpus"))?;
            plan.localization = Some((sec, settings.remove(0), corpus));
        }
        if let Some(id) = needs(Section::Solver) {
            let sec = require(&cfg.solver, Section::Solver, id)?;
            pc::power_cusp(sec.alpha).map_err(cfg_err("solver.alpha"))?;
            for g in [&sec.time_order.grid, &sec.space_order.grid, &sec.conjugation.grid] {
                config::check_grid(g).map_err(cfg_err("solver"))?;
            }
            for dt in sec.time_order.dts {
                check_steps("solver.time_order", dt, pc::T_END)?;
            }
            check_steps("solver.space_order", sec.space_order.dt, pc::T_END)?;
            check_steps("solver.heat", sec.heat.dt, sec.heat.t_end)?;
            if sec.heat.n < 4 {
                return Err(ConfigError("solver.heat: n must be at least 4".into()));
            }
            plan.solver = Some(sec);
        }
        if let Some(id) = needs(Section::Mr) {
            let sec = require(&cfg.mr, Section::Mr, id)?;
            if sec.cases.is_empty() {
                return Err(ConfigError("mr: no cases".into()));
            }
            for c in &sec.cases {
                check_q("mr", &[c.q])?;
                pc::power_cusp(c.alpha).map_err(cfg_err("mr.alpha"))?;
            }
            config::check_grid(&sec.grid).map_err(cfg_err("mr"))?;
            for dt in sec.dts {
                check_steps("mr", dt, pc::T_END)?;
            }
            plan.mr = Some(sec);
        }
        if let Some(id) = needs(Section::Kondratiev) {
            let section = require(&cfg.kondratiev, Section::Kondratiev, id)?;
            if section.domains.is_empty() || section.cases.is_empty() {
                return Err(ConfigError("kondratiev: domains and cases must not be empty".into()));
            }
            check_k("kondratiev", &section.k, kd::MAX_ORDER)?;
            check_q("kondratiev", &section.cases.iter().map(|c| c[1]).collect::<Vec<_>>())?;
            if section.nr < 3 || section.oracle_nr < 3 {
                return Err(ConfigError("kondratiev: nr and oracle_nr must be at least 3".into()));
            }
            let build = |reblend: bool| -> Result<Vec<PolarDomain>, ConfigError> {
                section
                    .domains
                    .iter()
                    .map(|s| {
                        let s = if reblend { s.reblended(section.blend) } else { s.clone() };
                        s.domain()?.discretize(section.nr, s.ntheta)
                    })
                    .collect::<cuspfs::Result<_>>()
                    .map_err(cfg_err("kondratiev.domains"))
            };
            let domains = build(false)?;
            let reblended = if checks.iter().any(|c| c.id == "kondratiev.blend_stability") { build(true)? } else { Vec::new() };
            let corpus = kd::cone_corpus(seed, section.corpus_count).map_err(cfg_err("kondratiev"))?;
            plan.kondratiev = Some(Kondratiev { section, domains, reblended, corpus });
        }
        Ok(plan)
    }
}

/// Results of one check id, plus any side tables.
pub struct CheckOutput {
    pub results: Vec<CheckResult>,
    pub tables: Vec<Table>,
}

impl CheckOutput {
    fn one(r: CheckResult) -> Self {
        CheckOutput { results: vec![r], tables: Vec::new() }
    }
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

/// Per-id cache for operations that produce several check ids at once.
#[derive(Default)]
pub struct Cache {
    bracket: BTreeMap<&'static str, CheckResult>,
}

fn merge_runs<T>(id: &str, items: &[T], f: impl Fn(&T) -> cuspfs::Result<CheckResult>) -> cuspfs::Result<CheckResult> {
    let parts = items.iter().map(f).collect::<cuspfs::Result<Vec<_>>>()?;
    if parts.len() == 1 {
        return Ok(parts.into_iter().next().expect("one part"));
    }
    let rows: Vec<_> = parts.iter().flat_map(|p| p.rows.clone()).collect();
    let mut out = CheckResult::merge(id, parts);
    out.rows = rows;
    Ok(out)
}

impl Plan {
    fn cusp(&self) -> &(CuspSection, Vec<Labeled>) {
        self.cusp.as_ref().expect("validated cusp section")
    }

    fn weighted(&self) -> &(WeightedSection, Vec<Setting>, Corpus) {
        self.weighted.as_ref().expect("validated weighted section")
    }

    fn kondratiev(&self) -> &Kondratiev {
        self.kondratiev.as_ref().expect("validated kondratiev section")
    }

    fn embeddings(&self, id: &str) -> Vec<Embedding> {
        let listed: Vec<Embedding> =
            self.weighted().0.embeddings.iter().map(|e| e.variant()).filter(|v| v.check_id() == id).collect();
        if !listed.is_empty() {
            return listed;
        }
        match id {
            "weighted.sobolev" => vec![Embedding::Sobolev { s1: 2, q1: 2.0, s0: 1, q0: 2.0 }],
            "weighted.morrey" => vec![Embedding::Morrey { k: 2, q: 4.0, t: 0 }],
            _ => vec![Embedding::GagliardoNirenberg { q: 2.0 }],
        }
    }

    /// Run one registered check.
    pub fn execute(&self, info: &CheckInfo, cache: &mut Cache) -> cuspfs::Result<CheckOutput> {
        let tol = &self.tol;
        let r = match info.id {
            "cusp.arclength" => cc::arclength_oracle(tol)?,
            "cusp.characteristic_bound" => cc::characteristic_bounds(&self.cusp().1, tol)?,
            "cusp.cone_exact" => cc::cone_exactness(tol)?,
            "cusp.desingularization" => cc::desingularization(&self.cusp().1, tol)?,
            "cusp.divergence" => cc::divergence(&self.cusp().1, tol)?,
            "cusp.equivalence_ratio" => cc::cusp_ratio(tol)?,
            "cusp.glue" => {
                let (sec, chars) = self.cusp();
                cc::glue(chars, sec.glue[0], sec.glue[1], tol)?
            }
            "cusp.singularity_bound" => {
                let (sec, chars) = self.cusp();
                cc::singularity_stability(chars, sec.singularity_nt, tol)?
            }
            "weighted.lq_oracle" => {
                let cases: Vec<(f64, f64, f64)> = self.oracle.lq_cases.iter().map(|c| (c[0], c[1], c[2])).collect();
                wc::lq_oracle(&cases, tol)?
            }
            "weighted.connection_identity" => {
                let (sec, st, corpus) = self.weighted();
                merge_runs(info.id, &sec.lambda, |l| wc::connection_identity(st, corpus, *l, tol))?
            }
            "weighted.recursion_roundtrip" => {
                let (sec, st, corpus) = self.weighted();
                let k_max = sec.k.iter().copied().max().unwrap_or(1);
                wc::recursion_roundtrip(st, corpus, k_max, tol)?
            }
            "weighted.measure_change" => {
                let (sec, st, corpus) = self.weighted();
                wc::measure_change(st, corpus, &sec.q, tol)?
            }
            "weighted.norm_equivalence" => {
                let (sec, st, corpus) = self.weighted();
                wc::norm_equivalence(st, corpus, &sec.k, &sec.q, tol)?
            }
            "weighted.isomorphism" => {
                let (sec, st, corpus) = self.weighted();
                merge_runs(info.id, &sec.q, |q| wc::isomorphism(st, corpus, &sec.k, *q, &sec.lambda, tol))?
            }
            "weighted.commutator" => {
                let (sec, st, corpus) = self.weighted();
                merge_runs(info.id, &sec.q, |q| wc::commutator(st, corpus, &sec.k, *q, &sec.lambda, tol))?
            }
            "weighted.monotonicity" => {
                let (sec, st, corpus) = self.weighted();
                let pairs: Vec<(f64, f64)> = if sec.lambda_pairs.is_empty() {
                    let mut l = sec.lambda.clone();
                    l.sort_by(f64::total_cmp);
                    l.windows(2).map(|w| (w[0], w[1])).collect()
                } else {
                    sec.lambda_pairs.iter().map(|p| (p[0], p[1])).collect()
                };
                let kq: Vec<(usize, f64)> = sec.k.iter().flat_map(|k| sec.q.iter().map(move |q| (*k, *q))).collect();
                merge_runs(info.id, &kq, |(k, q)| wc::monotonicity(st, corpus, *k, *q, &pairs))?
            }
            "weighted.sobolev" | "weighted.morrey" | "weighted.gagliardo_nirenberg" => {
                let (_, st, corpus) = self.weighted();
                merge_runs(info.id, &self.embeddings(info.id), |v| wc::embedding(st, corpus, *v, tol))?
            }
            "weighted.multiplication" => {
                let (sec, st, corpus) = self.weighted();
                let m = sec.multiplication.unwrap_or(crate::config::MultiplicationSpec {
                    k: 2,
                    q: 2.0,
                    lambda0: 0.5,
                    lambda1: 0.0,
                });
                wc::multiplication(st, corpus, m.k, m.q, m.lambda0, m.lambda1, tol)?
            }
            "localization.right_inverse" => {
                let (sec, st, corpus) = self.localization.as_ref().expect("validated localization section");
                lc::right_inverse(st, &sec.overlaps, corpus, tol)?
            }
            "localization.norm_bracket" | "localization.atlas_agreement" => {
                if let Some(r) = cache.bracket.remove(info.id) {
                    r
                } else {
                    let (sec, st, corpus) = self.localization.as_ref().expect("validated localization section");
                    let (b, a) = lc::norm_bracket(st, &sec.overlaps, corpus, &sec.k, &sec.q, tol)?;
                    let (mine, other) = if info.id == "localization.norm_bracket" { (b, a) } else { (a, b) };
                    cache.bracket.insert(if info.id == "localization.norm_bracket" { "localization.atlas_agreement" } else { "localization.norm_bracket" }, other);
                    mine
                }
            }
            "parabolic.laplace_beltrami" => pc::laplace_beltrami_examples(tol)?,
            "parabolic.principal_part" => pc::principal_part(tol)?,
            "parabolic.ellipticity" => pc::ellipticity_transport(tol)?,
            "parabolic.linearity" => pc::linearity(tol)?,
            "parabolic.conjugation" => pc::conjugation(&self.solver().conjugation.grid, tol)?,
            "parabolic.time_order" => {
                let s = self.solver();
                let r = pc::time_order(s.alpha, s.lambda, &s.time_order.grid, s.time_order.dts, s.mass.mass(), tol)?;
                return Ok(CheckOutput { results: vec![r], tables: vec![self.solve_run()?] });
            }
            "parabolic.space_order" => {
                let s = self.solver();
                pc::space_order(s.alpha, s.lambda, &s.space_order.grid, s.space_order.dt, s.mass.mass(), tol)?
            }
            "parabolic.heat_decay" => {
                let h = self.solver().heat;
                pc::heat_decay(h.n, h.dt, h.t_end, tol)?
            }
            "parabolic.mr_ratio" => {
                let sec = self.mr.as_ref().expect("validated mr section");
                let (r, runs) = pc::mr_study(&sec.cases(), &sec.grid, sec.dts, tol)?;
                let mut rows = Vec::new();
                for (c, res) in &runs {
                    let base = res[0].2.ratio;
                    for (label, level, v) in res {
                        rows.push(vec![
                            format!("power{}/lambda{}/q{}/{label}", c.alpha, c.lambda, c.q),
                            fmt(c.alpha),
                            fmt(c.lambda),
                            fmt(c.q),
                            level.to_string(),
                            fmt(v.lhs),
                            fmt(v.rhs),
                            fmt(v.ratio),
                            fmt(cuspfs::report::drift(base, v.ratio)),
                        ]);
                    }
                }
                let table = Table {
                    name: "mr_study".into(),
                    header: vec!["run_id", "alpha", "lambda", "q", "refinement_level", "lhs", "rhs", "ratio", "drift"],
                    rows,
                };
                return Ok(CheckOutput { results: vec![r], tables: vec![table] });
            }
            "kondratiev.oracle" => kd::oracle(self.kondratiev().section.oracle_nr, tol)?,
            "kondratiev.cartesian_consistency" => {
                let k = self.kondratiev();
                merge_runs(info.id, &k.domains, |d| kd::cartesian_consistency(d, &k.corpus, tol))?
            }
            "kondratiev.exact_k0" => {
                let k = self.kondratiev();
                merge_runs(info.id, &k.domains, |d| kd::exact_k0(d, &k.corpus, &k.section.cases(), tol))?
            }
            "kondratiev.bracket" => {
                let k = self.kondratiev();
                merge_runs(info.id, &k.domains, |d| kd::bracket(d, &k.corpus, &k.section.k, &k.section.cases(), tol))?
            }
            "kondratiev.blend_stability" => {
                let k = self.kondratiev();
                let pairs: Vec<(&PolarDomain, &PolarDomain)> = k.domains.iter().zip(&k.reblended).collect();
                merge_runs(info.id, &pairs, |(a, b)| kd::blend_stability([*a, *b], &k.corpus, &k.section.k, &k.section.cases(), tol))?
            }
            other => unreachable!("unregistered check {other}"),
        };
        Ok(CheckOutput::one(r))
    }

    fn solver(&self) -> &SolverSection {
        self.solver.as_ref().expect("validated solver section")
    }

    /// Step norms of the implicit Euler run at the coarsest time step.
    fn solve_run(&self) -> cuspfs::Result<Table> {
        let s = self.solver();
        let setup = pc::MmsSetup::new(s.alpha, &s.time_order.grid, s.lambda, &self.tol)?;
        let mut cfg = TimeStepping::new(s.time_order.dts[0], pc::T_END, Scheme::ImplicitEuler).mass(s.mass.mass());
        cfg.tol = self.tol.solver_tolerance;
        cfg.max_iter = self.tol.solver_max_iterations;
        let traj = setup.run(&cfg)?;
        let norms = traj.step_norms();
        let grid = setup.grid();
        let l2_error = |n: usize| -> f64 {
            let ex = setup.mms.uhat(grid, traj.times[n]);
            (0..grid.len()).map(|i| grid.cell_measure(i) * (traj.uhat[n][i] - ex[i]).powi(2)).sum::<f64>().sqrt()
        };
        let rows = traj
            .times
            .iter()
            .enumerate()
            .map(|(n, t)| {
                vec![
                    n.to_string(),
                    fmt(*t),
                    fmt(norms.get(n).copied().unwrap_or(f64::NAN)),
                    fmt(l2_error(n)),
                    if n == 0 { "0".into() } else { traj.iterations[n - 1].to_string() },
                ]
            })
            .collect();
        Ok(Table { name: "solve_run".into(), header: vec!["step", "t", "step_norm", "l2_error", "iterations"], rows })
    }
}
