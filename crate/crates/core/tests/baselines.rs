mod common;

use genesis::baselines::{gda_embed, BegaProblem};
use genesis::evolution::Representation;
use genesis::harness::Config;
use genesis::netsim::{accept, Evaluator, NetsimConfig};
use genesis::solvers::SolverConfig;
use genesis::topology::generate_fat_tree;
use genesis::workload::{catalog_sfcrs, replicate, traffic_pattern, SfcRequest, TrafficVariant, VnfProfile};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bega_operators_keep_one_host_per_vnf(seed in any::<u64>()) {
        let topo = generate_fat_tree(4, 1.0, 10.0, 5.0).unwrap();
        let requests = replicate(&catalog_sfcrs(), 3);
        let problem = BegaProblem::new(&requests, &topo, SolverConfig::default());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = problem.random_genome(&mut rng);
        let b = problem.random_genome(&mut rng);
        prop_assert!(a.is_one_hot() && b.is_one_hot());
        let (mut c, mut d) = problem.crossover(&a, &b, &mut rng);
        prop_assert!(c.is_one_hot() && d.is_one_hot());
        problem.mutate(&mut c, &mut rng);
        problem.mutate(&mut d, &mut rng);
        prop_assert!(c.is_one_hot() && d.is_one_hot());
        prop_assert!(problem.decode(&c, 0).unwrap().iter().all(|eg| eg.is_embedded()));
    }
}

fn gda(requests: &[SfcRequest], cpu: f64) -> (Vec<usize>, f64, bool) {
    let topo = generate_fat_tree(2, cpu, 10.0, 5.0).unwrap();
    let pattern = traffic_pattern(TrafficVariant::A, 1.0);
    let profile = VnfProfile::default();
    let cfg = NetsimConfig::default();
    let evaluator = Evaluator {
        topo: &topo,
        pattern: &pattern,
        profile: &profile,
        cfg: &cfg,
    };
    let out = gda_embed(
        requests,
        &topo,
        &pattern,
        &profile,
        &evaluator,
        &SolverConfig::default(),
    )
    .unwrap();
    let adm = accept(&out.egs, &topo, &pattern, &profile, &cfg);
    let embedded = out.egs.iter().filter(|e| e.is_embedded()).count();
    let accepted_ids = adm.accepted.iter().map(|&i| out.egs[i].sfcr_id()).collect();
    (
        accepted_ids,
        out.fitness.acceptance_ratio,
        embedded == adm.accepted.len() && adm.ledger.fits(&topo),
    )
}

#[test]
fn gda_acceptance_depends_on_arrival_order() {
    // Two hosts with 0.5 CPU. At peak load the lb/waf chain needs 0.2 + 0.4
    // and the lb/tm/waf chain 0.2 + 0.1 + 0.4: whichever arrives first takes
    // the only 0.4 slot left for a firewall.
    let templates = catalog_sfcrs();
    let mut first = templates[0].clone();
    let mut second = templates[3].clone();
    first.id = 0;
    second.id = 1;
    first.arrival_rank = 0;
    second.arrival_rank = 1;
    let (accepted, ar, sound) = gda(&[first.clone(), second.clone()], 0.5);
    assert_eq!(accepted, vec![0]);
    assert_eq!(ar, 0.5);
    assert!(sound);

    first.arrival_rank = 1;
    second.arrival_rank = 0;
    let (accepted, ar, sound) = gda(&[first, second], 0.5);
    assert_eq!(accepted, vec![1]);
    assert_eq!(ar, 0.5);
    assert!(sound);
}

#[test]
fn gda_never_overcommits() {
    let cfg = Config::default();
    for name in ["48_2_B_5_0.5", "48_1_A_10_1", "32_2_A_5_2"] {
        let inst = common::instance(name, &cfg);
        let eval = common::evaluator(&inst, &cfg);
        let out = gda_embed(
            &inst.requests,
            &inst.topo,
            &inst.pattern,
            &cfg.workload.profile,
            &eval,
            &cfg.solver,
        )
        .unwrap();
        let adm = accept(&out.egs, &inst.topo, &inst.pattern, &cfg.workload.profile, &cfg.netsim);
        assert!(adm.ledger.fits(&inst.topo), "{name}");
        assert_eq!(
            adm.accepted.len(),
            out.egs.iter().filter(|e| e.is_embedded()).count(),
            "{name}"
        );
        assert_eq!(out.evaluations, 1);
    }
}
