//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use lorentz_ot::dynamics::{
    holder_sharpness_experiment, interior_regularity_experiment, lift, shortening_experiment, shortening_gain,
    ShorteningGain,
};
use lorentz_ot::feasibility::{hall_bruteforce, j_related};
use lorentz_ot::geometry::{flow_conservation, hessian_bound_check, FlowState, HessianScan};
use lorentz_ot::monge::{
    achronal_check, monge_solve, null_cone_instance, spacelike_check, spacelike_disc_instance, uniqueness_probe,
    MongeOutcome, ProbeVerdict, SPACELIKE_DISC_ATOMS,
};
use lorentz_ot::transport::{brute_force_solve, check_cyclical_monotonicity, solve};
use lorentz_ot::{CostMatrix, DiscreteMeasure, Event, ScaleFactor, SpacetimeModel, TransportPlan};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Solved {
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    cost: CostMatrix,
    plan: TransportPlan,
}

/// Feasible random instances with expanded size at most 7.
fn oracle_instances() -> Vec<Solved> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut out = Vec::new();
    while out.len() < 200 {
        let d = rng.gen_range(1..=2);
        let total = rng.gen_range(1..=7u64);
        let m = rng.gen_range(1..=total.min(4) as usize);
        let n = rng.gen_range(1..=total.min(4) as usize);
        let (mu, nu) = random_pair(&mut rng, d, m, n, total);
        let cost = CostMatrix::from_model(&minkowski(d), &mu, &nu);
        if let Ok(plan) = solve(&mu, &nu, &cost) {
            out.push(Solved { mu, nu, cost, plan });
        }
    }
    out
}

fn feasibility_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut related = 0;
    for k in 0..1000 {
        let (m, n) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let d = rng.gen_range(1..=2);
        let total = rng.gen_range(m.max(n) as u64..=12);
        let (mu, nu) = random_pair(&mut rng, d, m, n, total);
        let rel = if k % 2 == 0 {
            lorentz_ot::CausalRelation::build(&minkowski(d), &mu, &nu, 0.0).unwrap()
        } else {
            random_relation(&mut rng, m, n)
        };
        let verdict = j_related(&rel, &mu, &nu);
        let brute = hall_bruteforce(&rel, &mu, &nu).unwrap();
        ensure(verdict.related == brute.is_none(), || format!("instance {k}: flow and Hall enumeration disagree"))?;
        if let Some(c) = &verdict.witness_coupling {
            related += 1;
            ensure(
                c.is_supported_on(rel.adjacency())
                    && c.has_marginals(&verdict.marginals.source, &verdict.marginals.target),
                || format!("instance {k}: invalid witness coupling"),
            )?;
        }
        if let Some(v) = &verdict.violating_set {
            ensure(v.reachable_mass < v.mass, || format!("instance {k}: returned set is not violating"))?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("1000 instances agree ({related} related) in {elapsed:.2?}"))
}

fn transport_oracle(instances: &[Solved]) -> Outcome {
    let mut worst: f64 = 0.0;
    for (k, s) in instances.iter().enumerate() {
        let brute = brute_force_solve(&s.mu, &s.nu, &s.cost).map_err(|e| e.to_string())?;
        let gap = (brute.cost - s.plan.primal_cost).abs();
        worst = worst.max(gap);
        ensure(gap <= 1e-9, || format!("instance {k}: solver {} vs brute force {}", s.plan.primal_cost, brute.cost))?;
    }
    Ok(format!("{} instances, max |solve − brute| = {worst:.1e}", instances.len()))
}

fn duality_gap(plan: &TransportPlan) -> f64 {
    (plan.primal_cost - plan.dual_cost).abs()
}

fn strong_duality(instances: &[Solved]) -> Outcome {
    let mut worst: f64 = 0.0;
    for (k, s) in instances.iter().enumerate() {
        worst = worst.max(duality_gap(&s.plan));
        ensure(duality_gap(&s.plan) <= 1e-8, || format!("oracle instance {k}: gap {:.3e}", duality_gap(&s.plan)))?;
    }
    let mut repro: Vec<(&str, TransportPlan)> = Vec::new();
    let h = holder_sharpness_experiment(64, 0).map_err(|e| e.to_string())?;
    repro.push(("half-holder", h.plan));
    let i = interior_regularity_experiment(64, 0, 0.1).map_err(|e| e.to_string())?;
    repro.push(("interior", i.plan));
    let (m, mu, nu) = spacelike_disc_instance(SPACELIKE_DISC_ATOMS, 0);
    repro.push(("spacelike disc", monge_solve(&m, &mu, &nu).map_err(|e| e.to_string())?.plan));
    let (m, mu, nu) = null_cone_instance(4);
    repro.push(("null cone", monge_solve(&m, &mu, &nu).map_err(|e| e.to_string())?.plan));
    for (name, plan) in &repro {
        worst = worst.max(duality_gap(plan));
        ensure(duality_gap(plan) <= 1e-8, || format!("{name}: gap {:.3e}", duality_gap(plan)))?;
    }
    Ok(format!("{} plans, max |primal − dual| = {worst:.1e}", instances.len() + repro.len()))
}

fn cyclical_monotonicity(instances: &[Solved]) -> Outcome {
    let mut cycles = 0;
    for (k, s) in instances.iter().enumerate() {
        let r = check_cyclical_monotonicity(&s.plan.coupling, &s.cost, 4, 10_000, k as u64);
        cycles += r.trials;
        ensure(r.violations == 0, || format!("instance {k}: {} violations, worst {}", r.violations, r.worst_margin))?;
    }
    Ok(format!("{cycles} cycles over {} plans, no violations", instances.len()))
}

fn future_of(rng: &mut ChaCha8Rng, p: &Event) -> Event {
    let dt: f64 = rng.gen_range(0.0..2.0);
    let r = dt * rng.gen_range(0.0..=1.0f64).sqrt();
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    Event::new(p.t + dt, vec![p.x[0] + r * phi.cos(), p.x[1] + r * phi.sin()]).unwrap()
}

fn reverse_triangle() -> Outcome {
    let model = minkowski(2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut tested = 0;
    while tested < 10_000 {
        let p = event(&mut rng, 2, (-1.0, 1.0));
        let q = future_of(&mut rng, &p);
        let r = future_of(&mut rng, &q);
        if !(model.is_causal(&p, &q) && model.is_causal(&q, &r)) {
            continue;
        }
        tested += 1;
        let (pr, pq, qr) = (model.cost(&p, &r), model.cost(&p, &q), model.cost(&q, &r));
        ensure(pr <= pq + qr + 1e-12, || format!("c(p,r) = {pr} > {pq} + {qr} for {p:?}, {q:?}, {r:?}"))?;
    }
    Ok(format!("{tested} causal triples"))
}

fn restriction_optimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut couplings = Vec::new();
    let h = holder_sharpness_experiment(16, 0).map_err(|e| e.to_string())?;
    couplings.push(("half-holder", h.coupling));
    let i = interior_regularity_experiment(24, 0, 0.1).map_err(|e| e.to_string())?;
    couplings.push(("interior", i.coupling));
    while couplings.len() < 7 {
        let model = minkowski(2);
        let (mu, nu) = random_pair(&mut rng, 2, 5, 5, 5);
        let Ok(plan) = solve(&mu, &nu, &CostMatrix::from_model(&model, &mu, &nu)) else { continue };
        couplings.push(("random", lift(&model, &mu, &nu, &plan.coupling).map_err(|e| e.to_string())?));
    }
    let mut checks = 0;
    let mut worst: f64 = 0.0;
    for (name, dc) in &couplings {
        for _ in 0..20 {
            let (a, b): (f64, f64) = (rng.gen(), rng.gen());
            let (s, t) = if a < b { (a, b) } else { (b, a) };
            let r = dc.restrict(s, t).map_err(|e| e.to_string())?;
            let c = r.check().map_err(|e| e.to_string())?;
            let gap = (c.restricted_cost - c.resolved_cost).abs();
            worst = worst.max(gap);
            ensure(gap <= 1e-8, || format!("{name} at ({s}, {t}): restricted {} vs re-solve {}", c.restricted_cost, c.resolved_cost))?;
            ensure(c.same_support, || format!("{name} at ({s}, {t}): re-solve has a different support"))?;
            checks += 1;
        }
    }
    Ok(format!("{checks} restrictions, max gap {worst:.1e}, supports coincide"))
}

fn intermediate_regularity() -> Outcome {
    let start = Instant::now();
    let h = holder_sharpness_experiment(64, 0).map_err(|e| e.to_string())?;
    let holder_time = start.elapsed();
    let e = h.report.fitted_exponent;
    ensure(h.unique_matching, || "diagonal is not the unique matching".into())?;
    ensure((0.4..=0.65).contains(&e), || format!("half-Hölder exponent {e}"))?;
    ensure(h.report.crossings == 0, || format!("{} crossings", h.report.crossings))?;
    ensure(holder_time < Duration::from_secs(30), || format!("half-Hölder run took {holder_time:?}"))?;
    let start = Instant::now();
    let i = interior_regularity_experiment(64, 0, 0.1).map_err(|e| e.to_string())?;
    let interior_time = start.elapsed();
    ensure(i.max_speed_ratio <= 0.5, || format!("interior speed ratio {}", i.max_speed_ratio))?;
    ensure(i.report.fitted_exponent >= 0.9, || format!("interior exponent {}", i.report.fitted_exponent))?;
    ensure(interior_time < Duration::from_secs(30), || format!("interior run took {interior_time:?}"))?;
    Ok(format!(
        "half-Hölder exponent {e:.3} (0 crossings, unique matching), interior exponent {:.3} at |v|/v0 ≤ {:.3}",
        i.report.fitted_exponent, i.max_speed_ratio
    ))
}

fn shortening() -> Outcome {
    let e = shortening_experiment(100, 8);
    ensure(e.not_applicable == 0 && e.samples.len() == 100, || format!("{} pairs not applicable", e.not_applicable))?;
    ensure(e.samples.iter().all(|(g, _)| *g < 0.0), || format!("max gain {}", e.max_gain))?;
    ensure(e.kappa_hat > 0.0, || format!("κ̂ = {}", e.kappa_hat))?;
    let model = minkowski(1);
    let ev = |t: f64, x: f64| Event::new(t, vec![x]).unwrap();
    let g1 = model.geodesic(&ev(0.0, -1.0), &ev(2.0, 1.0)).map_err(|e| e.to_string())?;
    let g2 = model.geodesic(&ev(0.0, 1.0), &ev(2.0, -1.0)).map_err(|e| e.to_string())?;
    let crossed = shortening_gain(&model, &g1, &g2);
    ensure(crossed == ShorteningGain::Gain(-4.0), || format!("crossed nulls gave {crossed:?}"))?;
    Ok(format!("100 pairs with gain < 0 (max {:.2e}), κ̂ = {:.3}, crossed nulls −4", e.max_gain, e.kappa_hat))
}

fn monge() -> Outcome {
    let (m, mu, nu) = spacelike_disc_instance(SPACELIKE_DISC_ATOMS, 0);
    ensure(spacelike_check(&m, mu.points(), 0.5).map_err(|e| e.to_string())?.is_ok(), || "source sample not spacelike".into())?;
    ensure(achronal_check(&m, nu.points()).is_ok(), || "target sample not achronal".into())?;
    let sol = monge_solve(&m, &mu, &nu).map_err(|e| e.to_string())?;
    ensure(matches!(sol.outcome, MongeOutcome::Map(_)), || format!("{:?}", sol.outcome))?;
    ensure(sol.disjoint_supports, || "supports overlap".into())?;
    let probe = uniqueness_probe(&m, &mu, &nu, 8, 0).map_err(|e| e.to_string())?;
    ensure(matches!(probe, ProbeVerdict::Unique { .. }), || "disc probe found two optimal supports".into())?;
    let (m, mu, nu) = null_cone_instance(4);
    match uniqueness_probe(&m, &mu, &nu, 8, 0).map_err(|e| e.to_string())? {
        ProbeVerdict::NonUnique { first, second, .. } => {
            ensure(first.coupling.support_mask() != second.coupling.support_mask(), || "supports equal".into())?;
            ensure(first.primal_cost == 0.0 && second.primal_cost == 0.0, || "null-cone costs not zero".into())?;
        }
        ProbeVerdict::Unique { .. } => return Err("null-cone probe reported a unique plan".into()),
    }
    Ok(format!("disc N = {SPACELIKE_DISC_ATOMS}: map, unique probe; null cone: two zero-cost supports"))
}

fn geometry_self_checks() -> Outcome {
    let mink = minkowski(2);
    let flat = SpacetimeModel::robertson_walker(2, ScaleFactor::Polynomial(vec![1.0])).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst_cost: f64 = 0.0;
    for _ in 0..100 {
        let p = event(&mut rng, 2, (0.0, 1.0));
        let q = future_of(&mut rng, &p);
        let (a, b) = (mink.cost(&p, &q), flat.cost(&p, &q));
        worst_cost = worst_cost.max((a - b).abs());
        ensure((a - b).abs() <= 1e-6, || format!("a ≡ 1 cost {b} vs Minkowski {a} for {p:?} → {q:?}"))?;
    }
    let rw = SpacetimeModel::robertson_walker(2, ScaleFactor::Polynomial(vec![1.0, 0.0, 0.5])).map_err(|e| e.to_string())?;
    let mut worst_drift: f64 = 0.0;
    for _ in 0..50 {
        let t: f64 = rng.gen_range(0.0..1.0);
        let speed = rng.gen_range(0.0..0.9) / rw.scale(t);
        let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let start = FlowState { t, x: vec![0.0, 0.0], v: vec![speed * phi.cos(), speed * phi.sin()] };
        let c = flow_conservation(&rw, &start, 1.0, 512).map_err(|e| e.to_string())?;
        worst_drift = worst_drift.max(c.max_drift);
        ensure(c.max_drift <= 1e-6, || format!("drift {} from {start:?}", c.max_drift))?;
    }
    let scan = HessianScan { t_min: 0.0, t_max: 1.0, speed_bound: 0.45, n_samples: 2000, seed: 0 };
    let h = hessian_bound_check(&rw, &scan);
    ensure(h.evaluated > 0 && h.delta_hat > 0.0, || format!("Hessian scan δ̂ = {}", h.delta_hat))?;
    Ok(format!(
        "a ≡ 1 max cost gap {worst_cost:.1e}, max 𝕃 drift {worst_drift:.1e}, Hessian δ̂ = {:.3} over {} samples",
        h.delta_hat, h.evaluated
    ))
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() -> ExitCode {
    let instances = oracle_instances();
    let criteria: Vec<Criterion> = vec![
        ("feasibility oracle equivalence", Box::new(feasibility_oracle)),
        ("transport oracle equivalence", Box::new(|| transport_oracle(&instances))),
        ("strong duality", Box::new(|| strong_duality(&instances))),
        ("cyclical monotonicity", Box::new(|| cyclical_monotonicity(&instances))),
        ("reverse triangle inequality", Box::new(reverse_triangle)),
        ("restriction optimality", Box::new(restriction_optimality)),
        ("intermediate regularity", Box::new(intermediate_regularity)),
        ("shortening", Box::new(shortening)),
        ("monge maps", Box::new(monge)),
        ("geometry self-checks", Box::new(geometry_self_checks)),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
