use rewire_core::dqn;
use rewire_core::experiment::{self, ExperimentConfig, ModelName, SALT_TEST};
use rewire_core::objectives::ObjectiveKind;
use rewire_core::stats;
use rewire_core::baselines;
use rand::SeedableRng;

#[test]
fn probe_desk_scale_learning() {
    let mut cfg = ExperimentConfig {
        objective: ObjectiveKind::Merw,
        model: ModelName::Ba2,
        n_train: 100,
        n_validation: 30,
        n_test: 100,
        master_seed: 20260809,
        ..ExperimentConfig::default()
    };
    cfg.train.total_steps = Some(20_000);
    cfg.train.eps_decay_steps = Some(20_000 / 3);

    let env_cfg = cfg.env_config();
    let train_graphs = experiment::generate_set(cfg.model, cfg.n, cfg.n_train, cfg.master_seed, experiment::SALT_TRAIN).unwrap();
    let val_graphs = experiment::generate_set(cfg.model, cfg.n, cfg.n_validation, cfg.master_seed, experiment::SALT_VALIDATION).unwrap();
    let test_graphs = experiment::generate_set(cfg.model, cfg.n, cfg.n_test, cfg.master_seed, SALT_TEST).unwrap();

    let t = std::time::Instant::now();
    let outcome = dqn::train(&train_graphs, &val_graphs, &env_cfg, &cfg.train_config(experiment::derive_seed(cfg.master_seed, experiment::SALT_TRAIN_SEEDS))).unwrap();
    println!("trained in {:?}", t.elapsed());
    for p in &outcome.curve {
        println!("step {} val {:.4} best {:.4}", p.step, p.validation_mean, p.best_so_far);
    }
    let eval = dqn::evaluate_policy(&outcome.best_params, &test_graphs, &env_cfg).unwrap();
    let dqn_deltas: Vec<f64> = eval.per_graph.iter().filter_map(|e| e.delta_f).collect();
    let (dqn_mean, _) = stats::mean_ci95(&dqn_deltas);
    let dqn_se = stats::standard_error(&dqn_deltas);

    let mut rand_deltas = Vec::new();
    for (i, g) in test_graphs.iter().enumerate() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(experiment::derive_seed(cfg.master_seed, 1000 + i as u64));
        if let Some(d) = baselines::random_episode(g, &env_cfg, &mut rng).unwrap().delta_f {
            rand_deltas.push(d);
        }
    }
    let (rand_mean, _) = stats::mean_ci95(&rand_deltas);
    let rand_se = stats::standard_error(&rand_deltas);
    let combined_se = (dqn_se * dqn_se + rand_se * rand_se).sqrt();
    println!("DQN mean {dqn_mean:.4} (se {dqn_se:.4}), random mean {rand_mean:.4} (se {rand_se:.4})");
    println!("gap {:.4} vs 2*combined_se {:.4}; disconnected {}", dqn_mean - rand_mean, 2.0 * combined_se, eval.disconnected);
    assert!(dqn_mean > 0.0);
    assert!(dqn_mean - rand_mean > 2.0 * combined_se);
}
