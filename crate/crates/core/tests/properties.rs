use lrip::decoder::{decode, validate_plan, Chromosome, DecodeOptions};
use lrip::evaluation::{evaluate, evaluate_cost, evaluate_emission, Evaluator, ObjectivePair, DEFAULT_PENALTY_RATE};
use lrip::front::Front;
use lrip::instance::{Instance, Node, SizeSpec};
use lrip::inventory::{expected_inventory, DcInventoryState};
use lrip::metrics::{hypervolume, mean_ideal_distance, quality_metric, spacing_metric, IdealReference};
use lrip::moea::dominance::{dominates, pareto_filter};
use lrip::moea::{run_with, Algorithm, AlgorithmConfig};
use lrip::stats::{kruskal_wallis, pairwise_dunn, SampleGroups};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SIZE: SizeSpec = SizeSpec::new(2, 4, 3, 3);

fn rel_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn keys(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.001f64..0.999, len)
}

fn points(max: usize) -> impl Strategy<Value = Vec<ObjectivePair>> {
    prop::collection::vec((0.0f64..100.0, 0.0f64..100.0), 1..max)
        .prop_map(|v| v.into_iter().map(|(a, b)| ObjectivePair::new(a, b)).collect())
}

fn groups() -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-50i32..50, 2..8), 2..5)
        .prop_map(|g| g.into_iter().map(|v| v.into_iter().map(f64::from).collect()).collect())
}

fn scaled_coordinates(instance: &Instance, s: f64) -> Instance {
    let mut out = instance.clone();
    let scale = |p: &mut lrip::instance::Point| {
        p.x *= s;
        p.y *= s;
    };
    scale(&mut out.supplier);
    out.dcs.iter_mut().for_each(|d| scale(&mut d.coord));
    out.retailers.iter_mut().for_each(|r| scale(&mut r.coord));
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generation_is_deterministic(seed in 0u64..10_000) {
        prop_assert_eq!(Instance::generate(SIZE, seed).unwrap(), Instance::generate(SIZE, seed).unwrap());
    }

    #[test]
    fn generated_instances_are_well_formed(seed in 0u64..10_000) {
        let inst = Instance::generate(SizeSpec::new(3, 6, 3, 4), seed).unwrap();
        inst.validate().unwrap();
        let capacity: f64 = inst.dcs.iter().map(|d| d.capacity).sum();
        prop_assert!(capacity >= inst.total_demand());
        let mut nodes = vec![Node::Supplier];
        nodes.extend((0..inst.dcs.len()).map(Node::Dc));
        nodes.extend((0..inst.retailers.len()).map(Node::Retailer));
        for &a in &nodes {
            for &b in &nodes {
                prop_assert_eq!(inst.distance(a, b), inst.distance(b, a));
                for &c in &nodes {
                    prop_assert!(inst.distance(a, c) <= inst.distance(a, b) + inst.distance(b, c) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn decoding_is_total_and_plans_validate(seed in 1u64..500, k in keys(12)) {
        let inst = Instance::generate(SIZE, seed).unwrap();
        let chromosome = Chromosome::new(k, SIZE).unwrap();
        let plan = decode(&chromosome, &inst, &DecodeOptions::new(4));
        if plan.is_feasible() {
            prop_assert!(validate_plan(&plan, &inst).is_ok(), "{:?}", validate_plan(&plan, &inst));
        }
        prop_assert!(evaluate(&plan, &inst).is_ok());
    }

    #[test]
    fn same_priorities_decode_alike(seed in 1u64..500, k in keys(12)) {
        let inst = Instance::generate(SIZE, seed).unwrap();
        let opts = DecodeOptions::new(4);
        // Squaring keeps every order; the DC keys also pick frequencies and stay fixed.
        let mut moved = k.clone();
        moved[SIZE.dcs..].iter_mut().for_each(|x| *x = *x * *x);
        let a = decode(&Chromosome::new(k, SIZE).unwrap(), &inst, &opts);
        let b = decode(&Chromosome::new(moved, SIZE).unwrap(), &inst, &opts);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn breakdowns_sum_to_objectives(seed in 1u64..500, k in keys(12)) {
        let inst = Instance::generate(SIZE, seed).unwrap();
        let plan = decode(&Chromosome::new(k, SIZE).unwrap(), &inst, &DecodeOptions::new(4));
        let z = evaluate(&plan, &inst).unwrap();
        prop_assert!(rel_eq(evaluate_cost(&plan, &inst).unwrap().total(), z.z1, 1e-12));
        prop_assert!(rel_eq(evaluate_emission(&plan, &inst).unwrap().total(), z.z2, 1e-12));
    }

    #[test]
    fn distance_scaling_scales_transport_terms(seed in 1u64..500, k in keys(12), s in 0.5f64..3.0) {
        let inst = Instance::generate(SIZE, seed).unwrap();
        let plan = decode(&Chromosome::new(k, SIZE).unwrap(), &inst, &DecodeOptions::new(4));
        let big = scaled_coordinates(&inst, s);
        let (c0, c1) = (evaluate_cost(&plan, &inst).unwrap(), evaluate_cost(&plan, &big).unwrap());
        let (e0, e1) = (evaluate_emission(&plan, &inst).unwrap(), evaluate_emission(&plan, &big).unwrap());
        // Inbound shipping is charged per shipment and per unit, not per distance.
        prop_assert_eq!(c1.shipping_inbound, c0.shipping_inbound);
        prop_assert!(rel_eq(c1.shipping_outbound, s * c0.shipping_outbound, 1e-9));
        prop_assert!(rel_eq(e1.inbound, s * e0.inbound, 1e-9));
        prop_assert!(rel_eq(e1.outbound, s * e0.outbound, 1e-9));
        prop_assert_eq!(c1.fixed_dc, c0.fixed_dc);
        prop_assert_eq!(e1.dc, e0.dc);
    }

    #[test]
    fn inventory_is_monotone_in_variance_and_lead_time(
        mu in 100.0f64..5000.0,
        var in 0.0f64..1e4,
        extra in 0.0f64..1e4,
        n in 1u32..8,
        q in 10.0f64..2000.0,
        l in 0.1f64..3.0,
        dl in 0.0f64..2.0,
    ) {
        let z = 1.645;
        let n = f64::from(n);
        let base = expected_inventory(&DcInventoryState::new(mu, var, n, q, l, z));
        prop_assert!(expected_inventory(&DcInventoryState::new(mu, var + extra, n, q, l, z)) >= base - 1e-9);
        prop_assert!(expected_inventory(&DcInventoryState::new(mu, var, n, q, l + dl, z)) >= base - 1e-9);
    }

    #[test]
    fn inventory_is_continuous_at_the_shortage_boundary(mu in 100.0f64..5000.0, var in 0.0f64..1e4, n in 1u32..8, l in 0.1f64..3.0) {
        let n = f64::from(n);
        let q = mu / n;
        let at = expected_inventory(&DcInventoryState::new(mu, var, n, q, l, 1.645));
        let below = expected_inventory(&DcInventoryState::new(mu, var, n, q * (1.0 - 1e-12), l, 1.645));
        let above = expected_inventory(&DcInventoryState::new(mu, var, n, q * (1.0 + 1e-12), l, 1.645));
        prop_assert!(rel_eq(at, below, 1e-8) && rel_eq(at, above, 1e-8));
    }

    #[test]
    fn built_fronts_are_valid(pts in points(40)) {
        let front = Front::from_candidates("p", 0, pts.iter().map(|&p| (p, None)).collect());
        front.validate().unwrap();
        prop_assert_eq!(Front::from_json(&front.to_json()).unwrap(), front.clone());
        for p in &pts {
            prop_assert!(front.points.iter().any(|q| dominates(q, p) || (q.z1 == p.z1 && q.z2 == p.z2)));
        }
        prop_assert_eq!(front.len(), pareto_filter(&pts).len());
    }

    #[test]
    fn hypervolume_grows_with_added_points(pts in points(20), extra in (0.0f64..100.0, 0.0f64..100.0)) {
        let reference = ObjectivePair::new(101.0, 101.0);
        let front = pareto_filter(&pts);
        let before = hypervolume(&front, reference).unwrap();
        let mut more = pts.clone();
        more.push(ObjectivePair::new(extra.0, extra.1));
        let after = hypervolume(&pareto_filter(&more), reference).unwrap();
        prop_assert!(after >= before - 1e-9);
    }

    #[test]
    fn hypervolume_matches_sampling(pts in points(12)) {
        let reference = ObjectivePair::new(100.0, 100.0);
        let front = pareto_filter(&pts);
        let exact = hypervolume(&front, reference).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let samples = 100_000;
        let hits = (0..samples)
            .filter(|_| {
                let s = ObjectivePair::new(rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0));
                front.iter().any(|p| p.z1 <= s.z1 && p.z2 <= s.z2)
            })
            .count();
        let share = exact / 1e4;
        let sigma = (share * (1.0 - share) / samples as f64).sqrt();
        prop_assert!((hits as f64 / samples as f64 - share).abs() <= 3.0 * sigma + 1e-6);
    }

    #[test]
    fn spacing_ignores_translation_and_scale(pts in points(15), dx in -50.0f64..50.0, dy in -50.0f64..50.0, s in 0.1f64..10.0) {
        let front = pareto_filter(&pts);
        let moved: Vec<_> = front.iter().map(|p| ObjectivePair::new(s * p.z1 + dx, s * p.z2 + dy)).collect();
        match (spacing_metric(&front), spacing_metric(&moved)) {
            (Some(a), Some(b)) => prop_assert!(rel_eq(a, b, 1e-9)),
            (a, b) => prop_assert_eq!(a.is_some(), b.is_some()),
        }
    }

    #[test]
    fn ideal_distance_shrinks_toward_the_ideal(pts in points(15), pick in any::<prop::sample::Index>(), t in 0.0f64..1.0) {
        let front = pareto_filter(&pts);
        prop_assume!(front.len() >= 2);
        let reference = IdealReference::from_points(&front).unwrap();
        let before = mean_ideal_distance(&front, &reference).unwrap();
        let mut moved = front.clone();
        let i = pick.index(moved.len());
        moved[i] = ObjectivePair::new(
            moved[i].z1 - t * (moved[i].z1 - reference.min.z1),
            moved[i].z2 - t * (moved[i].z2 - reference.min.z2),
        );
        prop_assert!(mean_ideal_distance(&moved, &reference).unwrap() <= before + 1e-9);
    }

    #[test]
    fn quality_shares_are_bounded(a in points(10), b in points(10), c in points(10)) {
        let fronts = [pareto_filter(&a), pareto_filter(&b), pareto_filter(&c)];
        let refs: Vec<&[ObjectivePair]> = fronts.iter().map(|f| f.as_slice()).collect();
        let shares = quality_metric(&refs).unwrap();
        prop_assert!(shares.iter().all(|s| (0.0..=1.0).contains(s)));
        prop_assert!(shares.iter().sum::<f64>() >= 1.0 - 1e-12);
    }

    #[test]
    fn h_ignores_order_within_groups(g in groups(), seed in any::<u64>()) {
        let base = kruskal_wallis(&SampleGroups::from_values(g.clone()).unwrap()).h;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut shuffled = g;
        for v in &mut shuffled {
            rand::seq::SliceRandom::shuffle(v.as_mut_slice(), &mut rng);
        }
        prop_assert_eq!(kruskal_wallis(&SampleGroups::from_values(shuffled).unwrap()).h, base);
    }

    #[test]
    fn h_ignores_shifts(g in groups(), shift in -1000i32..1000) {
        let base = kruskal_wallis(&SampleGroups::from_values(g.clone()).unwrap()).h;
        let moved: Vec<Vec<f64>> = g.iter().map(|v| v.iter().map(|x| x + f64::from(shift)).collect()).collect();
        prop_assert!(rel_eq(kruskal_wallis(&SampleGroups::from_values(moved).unwrap()).h, base, 1e-12));
    }

    #[test]
    fn adjusted_p_dominates_raw(g in groups()) {
        let kw = kruskal_wallis(&SampleGroups::from_values(g.clone()).unwrap());
        prop_assert!((0.0..=1.0).contains(&kw.p_value));
        for row in pairwise_dunn(&SampleGroups::from_values(g).unwrap(), 0.05) {
            prop_assert!((0.0..=1.0).contains(&row.p_value) && (0.0..=1.0).contains(&row.adjusted_p));
            prop_assert!(row.adjusted_p >= row.p_value);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn runners_keep_elites_and_budgets(seed in 1u64..200, run_seed in any::<u64>(), pick in 0usize..4) {
        let inst = Instance::generate(SIZE, seed).unwrap();
        let algorithm = Algorithm::ALL[pick];
        let cfg = AlgorithmConfig::defaults(algorithm).with_budget(2_000).with_seed(run_seed);
        let ev = Evaluator::new(&inst, DecodeOptions::new(4), DEFAULT_PENALTY_RATE);
        let mut previous: Vec<ObjectivePair> = Vec::new();
        let mut lost = false;
        let outcome = run_with(&ev, &cfg, None, &mut |report| {
            if algorithm != Algorithm::Pesa2 {
                lost |= previous
                    .iter()
                    .any(|p| !report.elite.iter().any(|q| dominates(q, p) || (q.z1 == p.z1 && q.z2 == p.z2)));
            }
            previous = report.elite.to_vec();
        })
        .unwrap();
        prop_assert!(!lost, "{algorithm} lost an elite point");
        prop_assert!(outcome.evaluations <= cfg.fe_budget + cfg.population_size as u64);
        prop_assert_eq!(ev.evaluations(), outcome.evaluations);
        outcome.front.validate().unwrap();

        let again = run_with(&Evaluator::new(&inst, DecodeOptions::new(4), DEFAULT_PENALTY_RATE), &cfg, None, &mut |_| {}).unwrap();
        prop_assert_eq!(again.front, outcome.front);
    }
}
