//! Subcommand implementations.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use lorentz_ot::dynamics::{
    holder_sharpness_experiment, lift, regularity_report, shortening_experiment, shortening_gain, DynamicsError,
    ShorteningGain, SHARPNESS_TIME,
};
use lorentz_ot::feasibility::{counting_form, j_related, FeasibilityError, Side, ViolatingSet};
use lorentz_ot::monge::{
    double_intersection_scan, monge_solve, null_cone_instance, split_fraction, uniqueness_probe, MongeError, MongeOutcome, ProbeVerdict,
};
use lorentz_ot::transport::{self, check_cyclical_monotonicity, TransportError};
use lorentz_ot::{CausalRelation, Coupling, CostMatrix, DiscreteMeasure, Event, SpacetimeModel};
use thiserror::Error;

use crate::formats::{self, FormatError, PlanFile, Report};
use crate::{Cli, Command, Repro};

/// Cycle lengths and sample count of the monotonicity check in `diagnose`.
const CYCLE_MAX: usize = 4;
const CYCLE_TRIALS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    NotRelated = 1,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Feasibility(#[from] FeasibilityError),
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Monge(#[from] MongeError),
}

pub fn run(cli: &Cli) -> Result<Status, CliError> {
    let ctx = Context { cli };
    match &cli.command {
        Command::Feasible { mu, nu, epsilon, witness } => ctx.feasible(mu, nu, *epsilon, witness.as_deref()),
        Command::Solve { mu, nu, out } => ctx.solve(mu, nu, out.as_deref()),
        Command::Interpolate { plan, t, out } => ctx.interpolate(plan, *t, out.as_deref()),
        Command::Diagnose { plan, eps, report, trajectory } => {
            ctx.diagnose(plan, *eps, report.as_deref(), trajectory.as_deref())
        }
        Command::Monge { mu, nu, out } => ctx.monge(mu, nu, out.as_deref()),
        Command::ProbeUniqueness { mu, nu, trials } => ctx.probe(mu, nu, *trials),
        Command::Repro(Repro::HalfHolder { n }) => ctx.half_holder(*n),
        Command::Repro(Repro::Crossing { n }) => ctx.crossing(*n),
        Command::Repro(Repro::NullCone { n, trials }) => ctx.null_cone(*n, *trials),
    }
}

struct Context<'a> {
    cli: &'a Cli,
}

impl Context<'_> {
    fn model(&self, d: usize) -> Result<SpacetimeModel, CliError> {
        let path = self.cli.model.as_deref().ok_or_else(|| CliError::Usage("this command needs --model".into()))?;
        let model = formats::parse_model(path, &formats::read(path)?)?;
        if model.spatial_dim() != d {
            return Err(CliError::Usage(format!(
                "model has dimension 1+{} but the measures live in 1+{d}",
                model.spatial_dim()
            )));
        }
        Ok(model)
    }

    fn measure(&self, path: &Path) -> Result<DiscreteMeasure, CliError> {
        Ok(formats::parse_measure(path, &formats::read(path)?)?)
    }

    fn pair(&self, mu: &Path, nu: &Path) -> Result<(SpacetimeModel, DiscreteMeasure, DiscreteMeasure), CliError> {
        let (mu, nu) = (self.measure(mu)?, self.measure(nu)?);
        if mu.spatial_dim() != nu.spatial_dim() {
            return Err(CliError::Usage(format!(
                "μ lives in 1+{} but ν lives in 1+{}",
                mu.spatial_dim(),
                nu.spatial_dim()
            )));
        }
        Ok((self.model(mu.spatial_dim())?, mu, nu))
    }

    fn plan(&self, path: &Path) -> Result<(SpacetimeModel, PlanFile), CliError> {
        let plan = formats::parse_plan(path, &formats::read(path)?)?;
        Ok((self.model(plan.mu.spatial_dim())?, plan))
    }

    fn output(&self, path: &Path) -> Result<PathBuf, CliError> {
        let full = self.cli.out_dir.join(path);
        if let Some(parent) = full.parent() {
            std::fs::create_dir_all(parent).map_err(|source| FormatError::Io { path: parent.to_path_buf(), source })?;
        }
        Ok(full)
    }

    fn emit(&self, out: Option<&Path>, contents: &str) -> Result<(), CliError> {
        match out {
            Some(p) => formats::write(&self.output(p)?, contents)?,
            None => print!("{contents}"),
        }
        Ok(())
    }

    fn feasible(&self, mu: &Path, nu: &Path, epsilon: f64, witness: Option<&Path>) -> Result<Status, CliError> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(CliError::Usage(format!("--epsilon must be a finite number ≥ 0 (got {epsilon})")));
        }
        let (model, mu, nu) = self.pair(mu, nu)?;
        let rel = CausalRelation::build(&model, &mu, &nu, epsilon)?;
        let verdict = j_related(&rel, &mu, &nu);
        let den = verdict.marginals.denominator;
        if !verdict.marginals.exact {
            eprintln!("warning: weights rounded to multiples of 1/{den}");
        }
        match (&verdict.witness_coupling, &verdict.violating_set) {
            (Some(c), _) if verdict.related => {
                println!("related: yes\ndenominator = {den}");
                if let Some(w) = witness {
                    formats::write(&self.output(w)?, &formats::format_coupling(c))?;
                }
                Ok(Status::Success)
            }
            (_, Some(v)) => {
                println!("related: no\n{}", describe_violation(v, den));
                Ok(Status::NotRelated)
            }
            _ => unreachable!("a verdict carries a witness or a violating set"),
        }
    }

    fn solve(&self, mu: &Path, nu: &Path, out: Option<&Path>) -> Result<Status, CliError> {
        let (model, mu, nu) = self.pair(mu, nu)?;
        let cost = CostMatrix::from_model(&model, &mu, &nu);
        let plan = match transport::solve(&mu, &nu, &cost) {
            Ok(p) => p,
            Err(TransportError::Infeasible(v)) => return Ok(not_related(&v, &mu, &nu)),
            Err(e) => return Err(e.into()),
        };
        let summary = format!(
            "primal = {}\ndual = {}\nsupport = {}\n",
            formats::num(plan.primal_cost),
            formats::num(plan.dual_cost),
            plan.coupling.support().len()
        );
        let text = formats::format_plan(&PlanFile { mu, nu, plan });
        match out {
            Some(p) => {
                formats::write(&self.output(p)?, &text)?;
                print!("{summary}");
            }
            None => print!("{text}"),
        }
        Ok(Status::Success)
    }

    fn interpolate(&self, plan: &Path, t: f64, out: Option<&Path>) -> Result<Status, CliError> {
        if !(0.0..=1.0).contains(&t) {
            return Err(CliError::Usage(format!("--t must lie in [0, 1] (got {t})")));
        }
        let (model, f) = self.plan(plan)?;
        let dc = lift(&model, &f.mu, &f.nu, &f.plan.coupling)?;
        self.emit(out, &formats::format_measure(&dc.interpolate(t)))?;
        Ok(Status::Success)
    }

    fn diagnose(&self, plan: &Path, eps: f64, report: Option<&Path>, trajectory: Option<&Path>) -> Result<Status, CliError> {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(CliError::Usage(format!("--eps must lie in (0, 0.5) (got {eps})")));
        }
        let (model, f) = self.plan(plan)?;
        let cost = CostMatrix::from_model(&model, &f.mu, &f.nu);
        let dc = lift(&model, &f.mu, &f.nu, &f.plan.coupling)?;
        let (feasibility, slackness) = f.plan.dual_residuals(&cost);
        let cycles = check_cyclical_monotonicity(&f.plan.coupling, &cost, CYCLE_MAX, CYCLE_TRIALS, self.cli.seed);
        let mut r = Report::default();
        r.push("paths", dc.len())
            .push("primal", f.plan.primal_cost)
            .push("dual", f.plan.dual_cost)
            .push("duality_gap", (f.plan.primal_cost - f.plan.dual_cost).abs())
            .push("dual_feasibility_residual", feasibility)
            .push("complementary_slackness_residual", slackness)
            .push("action", dc.action())
            .push("split_fraction", split_fraction(&f.plan.coupling))
            .push("cycles_tested", cycles.trials)
            .push("cycle_violations", cycles.violations)
            .regularity(&regularity_report(&dc, eps));
        self.emit(report, &r.to_string())?;
        if let Some(p) = trajectory {
            formats::write(&self.output(p)?, &formats::format_trajectories(&dc))?;
        }
        Ok(Status::Success)
    }

    fn monge(&self, mu: &Path, nu: &Path, out: Option<&Path>) -> Result<Status, CliError> {
        let (model, mu, nu) = self.pair(mu, nu)?;
        let sol = match monge_solve(&model, &mu, &nu) {
            Ok(s) => s,
            Err(MongeError::Transport(TransportError::Infeasible(v))) => return Ok(not_related(&v, &mu, &nu)),
            Err(e) => return Err(e.into()),
        };
        let text = match &sol.outcome {
            MongeOutcome::Map(map) => formats::format_map(map),
            MongeOutcome::NotAGraph { source, targets } => {
                let mut s = format!(
                    "not a graph: source {} sends mass to targets {} and {}\n",
                    source + 1,
                    targets.0 + 1,
                    targets.1 + 1
                );
                for rec in double_intersection_scan(&model, &mu, &nu, &sol.plan) {
                    let _ = writeln!(
                        s,
                        "split {} -> {} {} defect = {}",
                        rec.source + 1,
                        rec.first + 1,
                        rec.second + 1,
                        formats::num(rec.defect)
                    );
                }
                s
            }
        };
        self.emit(out, &text)?;
        Ok(Status::Success)
    }

    fn probe(&self, mu: &Path, nu: &Path, trials: usize) -> Result<Status, CliError> {
        let (model, mu, nu) = self.pair(mu, nu)?;
        match uniqueness_probe(&model, &mu, &nu, trials, self.cli.seed) {
            Ok(v) => {
                print!("{}", describe_probe(&v));
                Ok(Status::Success)
            }
            Err(MongeError::Transport(TransportError::Infeasible(v))) => Ok(not_related(&v, &mu, &nu)),
            Err(e) => Err(e.into()),
        }
    }

    fn write_all(&self, files: &[(&str, String)]) -> Result<(), CliError> {
        for (name, contents) in files {
            formats::write(&self.output(Path::new(name))?, contents)?;
        }
        Ok(())
    }

    fn half_holder(&self, n: usize) -> Result<Status, CliError> {
        let e = holder_sharpness_experiment(n, self.cli.seed)?;
        let mut r = Report::default();
        r.push("experiment", "half-holder")
            .push("n", n)
            .push("seed", self.cli.seed)
            .push("time", SHARPNESS_TIME)
            .push("unique_matching", e.unique_matching)
            .push("diagonal_null", e.diagonal_null)
            .push("primal", e.plan.primal_cost)
            .regularity(&e.report);
        let model = e.coupling.model().clone();
        self.write_all(&[
            ("half-holder-model.txt", formats::format_model(&model)),
            ("half-holder-mu.txt", formats::format_measure(&e.mu)),
            ("half-holder-nu.txt", formats::format_measure(&e.nu)),
            ("half-holder-plan.txt", formats::format_plan(&PlanFile { mu: e.mu, nu: e.nu, plan: e.plan })),
            ("half-holder-trajectories.txt", formats::format_trajectories(&e.coupling)),
            ("half-holder-report.txt", r.to_string()),
        ])?;
        print!("{r}");
        Ok(Status::Success)
    }

    fn crossing(&self, n: usize) -> Result<Status, CliError> {
        if n == 0 {
            return Err(CliError::Usage("--n must be positive".into()));
        }
        let e = shortening_experiment(n, self.cli.seed);
        // two null segments in 1+1 crossing at their midpoints
        let flat = SpacetimeModel::minkowski(1).expect("positive dimension");
        let ev = |t: f64, x: f64| Event { t, x: vec![x] };
        let g1 = flat.geodesic(&ev(0.0, -1.0), &ev(2.0, 1.0)).expect("null pair");
        let g2 = flat.geodesic(&ev(0.0, 1.0), &ev(2.0, -1.0)).expect("null pair");
        let null_gain = match shortening_gain(&flat, &g1, &g2) {
            ShorteningGain::Gain(g) => formats::num(g),
            ShorteningGain::NotApplicable => "n/a".into(),
        };
        let mut r = Report::default();
        r.push("experiment", "crossing")
            .push("n", n)
            .push("seed", self.cli.seed)
            .push("samples", e.samples.len())
            .push("not_applicable", e.not_applicable)
            .push("kappa_hat", e.kappa_hat)
            .push("max_gain", e.max_gain)
            .push("crossed_null_gain", null_gain);
        let mut samples = String::from("# gain direction_gap\n");
        for (g, d) in &e.samples {
            let _ = writeln!(samples, "{} {}", formats::num(*g), formats::num(*d));
        }
        self.write_all(&[("crossing-samples.txt", samples), ("crossing-report.txt", r.to_string())])?;
        print!("{r}");
        Ok(Status::Success)
    }

    fn null_cone(&self, n: usize, trials: usize) -> Result<Status, CliError> {
        if n < 2 {
            return Err(CliError::Usage("--n must be at least 2".into()));
        }
        let (model, mu, nu) = null_cone_instance(n);
        let cost = CostMatrix::from_model(&model, &mu, &nu);
        let all_null = cost.entries().iter().all(|&c| c == 0.0);
        let probe = uniqueness_probe(&model, &mu, &nu, trials, self.cli.seed)?;
        let sol = monge_solve(&model, &mu, &nu)?;
        let mut r = Report::default();
        r.push("experiment", "null-cone")
            .push("n", n)
            .push("seed", self.cli.seed)
            .push("all_pairs_null", all_null)
            .push("primal", sol.plan.primal_cost)
            .push("monge_map", matches!(sol.outcome, MongeOutcome::Map(_)))
            .push("unique", matches!(probe, ProbeVerdict::Unique { .. }));
        if let ProbeVerdict::NonUnique { first, second, trial } = &probe {
            r.push("found_at_trial", *trial)
                .push("first_support", support_list(&first.coupling))
                .push("second_support", support_list(&second.coupling));
        }
        self.write_all(&[
            ("null-cone-model.txt", formats::format_model(&model)),
            ("null-cone-mu.txt", formats::format_measure(&mu)),
            ("null-cone-nu.txt", formats::format_measure(&nu)),
            ("null-cone-report.txt", r.to_string()),
        ])?;
        print!("{r}");
        Ok(Status::Success)
    }
}

fn not_related(v: &ViolatingSet, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Status {
    println!("related: no\n{}", describe_violation(v, counting_form(mu, nu).denominator));
    Status::NotRelated
}

/// `A = {1,2}` with the masses that break the Hall condition.
fn describe_violation(v: &ViolatingSet, den: u64) -> String {
    let set: Vec<String> = v.indices.iter().map(|k| (k + 1).to_string()).collect();
    let (mass, reach) = (formats::num(v.mass as f64 / den as f64), formats::num(v.reachable_mass as f64 / den as f64));
    match v.side {
        Side::Source => format!("violating source set A = {{{}}}\nmu(A) = {mass}\nnu(J+(A)) = {reach}", set.join(",")),
        Side::Target => format!("violating target set B = {{{}}}\nnu(B) = {mass}\nmu(J-(B)) = {reach}", set.join(",")),
    }
}

fn support_list(c: &Coupling) -> String {
    let pairs: Vec<String> = c.support().iter().map(|(i, j, _)| format!("{}-{}", i + 1, j + 1)).collect();
    pairs.join(" ")
}

fn describe_probe(v: &ProbeVerdict) -> String {
    match v {
        ProbeVerdict::Unique { plan, trials } => {
            format!("unique: yes\ntrials = {trials}\nsupport = {}\n", support_list(&plan.coupling))
        }
        ProbeVerdict::NonUnique { first, second, trial } => format!(
            "unique: no\nfound_at_trial = {trial}\nfirst_support = {}\nsecond_support = {}\nprimal = {} {}\n",
            support_list(&first.coupling),
            support_list(&second.coupling),
            formats::num(first.primal_cost),
            formats::num(second.primal_cost)
        ),
    }
}
