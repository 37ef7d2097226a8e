use dmrs::baselines::{schedule_fifo, schedule_identical, schedule_maponly};
use dmrs::bench::{generate_scenario, Benchmark, JobMix, ScenarioSpec};
use dmrs::dmrs::{completion_bound, plan_dmrs, schedule_dmrs, workload_ratio};
use dmrs::lp_relax::{brute_force_oracle, solve_lp, FEASIBILITY_TOL, VIOLATION_TOL};
use dmrs::model::{derive_stats, validate_workload, RawJob, RawWorkload, Workload};
use dmrs::simulator::{
    brute_force_optimal, execute_dynamic, execute_static, validate_schedule, validate_trace, PerturbationModel,
};
use proptest::prelude::*;

fn task_size() -> impl Strategy<Value = f64> {
    (1u32..=100).prop_map(|k| f64::from(k) / 10.0)
}

fn raw_job() -> impl Strategy<Value = (f64, f64, Vec<f64>, Vec<f64>)> {
    (
        (1u32..=5).prop_map(f64::from),
        prop_oneof![Just(0.0), (0u32..=20).prop_map(f64::from)],
        prop::collection::vec(task_size(), 0..=3),
        prop::collection::vec(task_size(), 0..=2),
    )
        .prop_filter("job needs a task", |(_, _, m, r)| !m.is_empty() || !r.is_empty())
}

fn workload(max_jobs: usize, max_machines: usize) -> impl Strategy<Value = Workload> {
    (
        prop::collection::vec((1u32..=40).prop_map(|k| f64::from(k) / 10.0), 1..=max_machines),
        prop::collection::vec(raw_job(), 1..=max_jobs),
    )
        .prop_map(|(machines, jobs)| {
            let jobs = jobs
                .into_iter()
                .enumerate()
                .map(|(i, (weight, release, map, reduce))| RawJob { id: i + 1, weight, release, map, reduce })
                .collect();
            validate_workload(RawWorkload { machines, jobs }).unwrap()
        })
}

fn tiny() -> impl Strategy<Value = Workload> {
    workload(3, 3).prop_filter("at most six tasks", |w| w.task_count() <= 6)
}

fn scaled(w: &Workload, k: f64) -> Workload {
    let mut raw = w.to_raw();
    for j in &mut raw.jobs {
        j.release *= k;
        j.map.iter_mut().chain(j.reduce.iter_mut()).for_each(|s| *s *= k);
    }
    validate_workload(raw).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn derived_stats_are_consistent(w in workload(6, 5)) {
        let s = derive_stats(&w);
        for j in w.jobs() {
            let js = s.job(j.id);
            prop_assert!(js.max_rate <= s.mu);
            prop_assert!(js.parallelism <= w.machine_count());
            prop_assert!(js.parallelism <= j.task_count());
        }
        prop_assert!(s.skewness >= 1.0);
        prop_assert_eq!(s, derive_stats(&w));
    }

    #[test]
    fn lp_solution_is_feasible_and_complete(w in workload(8, 4)) {
        let s = derive_stats(&w);
        let lp = solve_lp(&w, &s).unwrap();
        prop_assert!(lp.max_constraint_violation(&w, &s) <= FEASIBILITY_TOL);
        let rest = brute_force_oracle(&lp.completion, &s, VIOLATION_TOL).unwrap();
        prop_assert!(rest.is_none(), "{:?}", rest);
    }

    #[test]
    fn lp_scales_with_sizes(w in workload(5, 3), k in 1u32..=8) {
        let k = f64::from(k) / 2.0;
        let a = solve_lp(&w, &derive_stats(&w)).unwrap().objective;
        let b = scaled(&w, k);
        let b = solve_lp(&b, &derive_stats(&b)).unwrap().objective;
        prop_assert!((b - k * a).abs() <= 1e-6 * b.max(1.0), "{} vs {}", b, k * a);
    }

    #[test]
    fn dmrs_guarantees(w in workload(8, 4)) {
        let plan = plan_dmrs(&w).unwrap();
        prop_assert!(validate_schedule(&w, &plan.schedule).is_empty());
        for pos in 1..=plan.order.len() {
            let job = plan.order[pos - 1];
            prop_assert!(plan.schedule.job_completion[job - 1] <= completion_bound(&w, &plan.stats, &plan.order, pos) + 1e-9);
        }
        let twct = plan.schedule.twct(&w);
        prop_assert!(twct <= workload_ratio(&w, &plan.stats) * plan.lp.objective + 1e-6);
        prop_assert_eq!(&plan.schedule, &schedule_dmrs(&w, &plan.order));
    }

    #[test]
    fn baselines_are_legal_and_above_the_lp(w in workload(8, 4), seed in any::<u64>()) {
        let lp = plan_dmrs(&w).unwrap().lp.objective;
        for sch in [
            schedule_fifo(&w, true),
            schedule_fifo(&w, false),
            schedule_identical(&w).unwrap(),
            schedule_maponly(&w, seed).unwrap(),
        ] {
            let v = validate_schedule(&w, &sch);
            prop_assert!(v.is_empty(), "{:?}", v);
            prop_assert!(sch.twct(&w) >= lp - 1e-6);
        }
        prop_assert_eq!(schedule_maponly(&w, seed).unwrap(), schedule_maponly(&w, seed).unwrap());
    }

    #[test]
    fn executions_are_legal(w in workload(6, 4), seed in any::<u64>(), lo in 1u32..=10, spread in 0u32..=10) {
        let lo = f64::from(lo) / 10.0;
        let model = PerturbationModel::multiplicative(lo, lo + f64::from(spread) / 5.0, seed).unwrap();
        let draws = model.draws(&w);
        let plan = plan_dmrs(&w).unwrap();
        let fixed = execute_static(&w, &plan.schedule, &model);
        prop_assert!(validate_trace(&w, &fixed, &draws).is_empty());
        prop_assert_eq!(fixed.twct, fixed.schedule.twct(&w));
        let dynamic = execute_dynamic(&w, &plan.order, &model);
        let v = validate_trace(&w, &dynamic, &draws);
        prop_assert!(v.is_empty(), "{:?}", v);
        prop_assert_eq!(&dynamic, &execute_dynamic(&w, &plan.order, &model));
    }

    #[test]
    fn nominal_execution_is_the_plan(w in workload(6, 4)) {
        let plan = plan_dmrs(&w).unwrap();
        let fixed = execute_static(&w, &plan.schedule, &PerturbationModel::None);
        let dynamic = execute_dynamic(&w, &plan.order, &PerturbationModel::None);
        prop_assert_eq!(dynamic.replan_count, 0);
        for p in &plan.schedule.placements {
            prop_assert_eq!(fixed.schedule.placement_of(p.task), Some(p));
            prop_assert_eq!(dynamic.schedule.placement_of(p.task), Some(p));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sandwich(w in tiny()) {
        let plan = plan_dmrs(&w).unwrap();
        let (opt, _) = brute_force_optimal(&w).unwrap();
        prop_assert!(plan.lp.objective <= opt + 1e-6);
        prop_assert!(opt <= plan.schedule.twct(&w) + 1e-9);
    }

    #[test]
    fn a_slow_extra_machine_never_hurts_the_optimum(w in workload(2, 2).prop_filter("small", |w| w.task_count() <= 5)) {
        let (opt, _) = brute_force_optimal(&w).unwrap();
        let mut raw = w.to_raw();
        raw.machines.push(1e-3);
        let (with_extra, _) = brute_force_optimal(&validate_workload(raw).unwrap()).unwrap();
        prop_assert!(with_extra <= opt);
    }

    #[test]
    fn generated_map_tasks_sum_to_the_total(
        total in 1u32..=4096,
        size in 1u32..=256,
        reduces in 0usize..=4,
        seed in any::<u64>(),
    ) {
        let mut spec = ScenarioSpec::uniform(Benchmark::Sort);
        spec.jobs = vec![JobMix { count: 3, map_total: f64::from(total), task_size: f64::from(size), reduce_tasks: reduces, reduce_ratio: 1.0 }];
        let w = generate_scenario(&spec, seed).unwrap();
        for j in w.jobs() {
            prop_assert_eq!(j.map_total(), f64::from(total));
            prop_assert_eq!(j.map_sizes.len(), total.div_ceil(size) as usize);
            prop_assert_eq!(j.reduce_sizes.len(), reduces);
        }
        let again = generate_scenario(&spec, seed).unwrap();
        prop_assert_eq!(serde_json::to_string(&w.to_raw()).unwrap(), serde_json::to_string(&again.to_raw()).unwrap());
    }
}
