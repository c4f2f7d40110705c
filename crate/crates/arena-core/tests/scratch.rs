// temporary probe, deleted before finalizing
use arena_core::dynamics::{gurm_run, lurm_run, sorm_run, DynamicsConfig};
use arena_core::equilibria::{is_psne, social_optimum};
use arena_core::game::{from_matrix, MatrixGame};
use arena_core::models::{gen_resource_game, gen_task_game, ResourceGameParams, TaskGameParams};

#[test]
#[ignore]
fn probe_resource_20x5() {
    let game = gen_resource_game(&ResourceGameParams::new(20, 5, 42)).unwrap();
    let aligned = game.welfare_aligned();
    let mut sorm_w = Vec::new();
    let mut gurm_w = Vec::new();
    let mut lurm_w = Vec::new();
    let start = std::time::Instant::now();
    for seed in 1..=20u64 {
        let config = DynamicsConfig {
            prune: true,
            ..DynamicsConfig::default().with_seed(seed)
        };
        let baseline = DynamicsConfig {
            convergence_window: 5_000,
            max_iterations: 50_000,
            ..DynamicsConfig::default().with_seed(seed)
        };
        let s = sorm_run(&game, &config).unwrap();
        let g = gurm_run(&game, &baseline).unwrap();
        let l = lurm_run(&game, &baseline).unwrap();
        if !is_psne(&aligned, &g.final_profile).unwrap() {
            let mut worst = 0.0f64;
            let w0 = game.global_utility(&g.final_profile).unwrap();
            for i in 0..20 {
                for k in 0..5 {
                    let gain = game.counterfactual_global(&g.final_profile, i, k).unwrap() - w0;
                    worst = worst.max(gain);
                }
            }
            println!("  gurm seed {seed}: non-psne, best deviation gain {worst:.4} ({:.3}%)", 100.0 * worst / w0);
        }
        println!(
            "seed {seed}: sorm W={:.2} conv={} iters={} rounds={} | gurm W={:.2} conv={} | lurm W={:.2} conv={} | psne s={} g={}",
            s.final_welfare, s.converged, s.trace.len(), s.rounds,
            g.final_welfare, g.converged,
            l.final_welfare, l.converged,
            is_psne(&aligned, &s.final_profile).unwrap(),
            is_psne(&aligned, &g.final_profile).unwrap(),
        );
        sorm_w.push(s.final_welfare);
        gurm_w.push(g.final_welfare);
        lurm_w.push(l.final_welfare);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    println!(
        "elapsed {:?}  mean W: sorm {:.2} gurm {:.2} lurm {:.2}",
        start.elapsed(),
        mean(&sorm_w),
        mean(&gurm_w),
        mean(&lurm_w)
    );
}

#[test]
#[ignore]
fn probe_aligned_3x3() {
    let start = std::time::Instant::now();
    let mut ok = 0;
    for seed in 0..100u64 {
        let tensor = MatrixGame::random(vec![3, 3, 3], 0.0, 1.0, seed).unwrap();
        // align: every player's payoff is the welfare of the base game
        let base = from_matrix(tensor).unwrap();
        let game = base.welfare_aligned();
        let (_, opt_w) = social_optimum(&game).unwrap();
        let config = DynamicsConfig {
            ladder_patience: 6,
            ..DynamicsConfig::default().with_seed(1000 + seed)
        };
        let out = sorm_run(&game, &config).unwrap();
        if (out.final_welfare - opt_w).abs() <= 1e-9 {
            ok += 1;
        } else {
            println!(
                "seed {seed}: final {:.4} vs opt {:.4} conv={} rounds={}",
                out.final_welfare,
                opt_w,
                out.converged,
                out.rounds
            );
        }
    }
    println!("aligned 3x3: {ok}/100 optimal, elapsed {:?}", start.elapsed());
}

#[test]
#[ignore]
fn probe_task_10x20() {
    let start = std::time::Instant::now();
    let mut pure = 0;
    let mut sorm_ws = Vec::new();
    let mut gurm_ws = Vec::new();
    for seed in 1..=10u64 {
        let (game, _) = gen_task_game(&TaskGameParams::new(10, 20, 42)).unwrap();
        let config = DynamicsConfig {
            max_iterations: 500,
            prune: true,
            ..DynamicsConfig::default().with_seed(seed)
        };
        let s = sorm_run(&game, &config).unwrap();
        let g = gurm_run(&game, &config).unwrap();
        if s.iterations_to_convergence.is_some() && s.converged {
            pure += 1;
        }
        println!(
            "seed {seed}: sorm W={:.1} conv={} iters={:?} rounds={} | gurm W={:.1}",
            s.final_welfare,
            s.converged,
            s.iterations_to_convergence,
            s.rounds,
            g.final_welfare
        );
        sorm_ws.push(s.final_welfare);
        gurm_ws.push(g.final_welfare);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    println!(
        "task: {pure}/10 pure, mean W sorm {:.1} gurm {:.1}, elapsed {:?}",
        mean(&sorm_ws),
        mean(&gurm_ws),
        start.elapsed()
    );
}

#[test]
#[ignore]
fn probe_fixtures_50_seeds() {
    let start = std::time::Instant::now();
    for (name, game) in [
        ("resource", arena_core::game::resource_2x2_fixture()),
        ("staghunt", arena_core::game::stag_hunt_fixture()),
    ] {
        let mut conv = 0;
        let mut max_iters = 0;
        let mut lurm_finals = std::collections::BTreeMap::new();
        for seed in 1..=50u64 {
            let config = DynamicsConfig {
                max_iterations: 1500,
                ..DynamicsConfig::default().with_seed(seed)
            };
            let s = sorm_run(&game, &config).unwrap();
            if s.converged && s.trace.len() <= 5000 {
                conv += 1;
            }
            max_iters = max_iters.max(s.trace.len());
            let l = lurm_run(&game, &config).unwrap();
            *lurm_finals
                .entry(l.final_profile.actions().to_vec())
                .or_insert(0usize) += 1;
        }
        println!("{name}: sorm {conv}/50 within 5000 (max iters {max_iters}), lurm finals {lurm_finals:?}");
    }
    println!("elapsed {:?}", start.elapsed());
}

#[test]
#[ignore]
fn probe_lemma2_20k() {
    let start = std::time::Instant::now();
    for (name, game, m) in [
        ("resource", arena_core::game::resource_2x2_fixture(), 10.0),
        ("staghunt", arena_core::game::stag_hunt_fixture(), 6.0),
    ] {
        let config = DynamicsConfig {
            max_iterations: 20_000,
            convergence_window: 20_001,
            ..DynamicsConfig::default().with_seed(7)
        };
        for (algo, out) in [
            ("sorm", sorm_run(&game, &config).unwrap()),
            ("gurm", gurm_run(&game, &config).unwrap()),
            ("lurm", lurm_run(&game, &config).unwrap()),
        ] {
            let last = out.trace.records.last().unwrap();
            let dist = arena_core::equilibria::empirical_distribution(&out.trace, 0.5).unwrap();
            let cce = arena_core::equilibria::cce_regret(&game, &dist).unwrap();
            println!(
                "{name}/{algo}: max_avg_regret {:.4} (budget {:.2}), cce {:.4}, support {}",
                last.max_avg_regret,
                0.05 * m,
                cce,
                dist.support_size()
            );
        }
    }
    println!("elapsed {:?}", start.elapsed());
}

#[test]
#[ignore]
fn probe_gurm_long() {
    let game = gen_resource_game(&ResourceGameParams::new(20, 5, 42)).unwrap();
    let aligned = game.welfare_aligned();
    for seed in [7u64, 11] {
        for (t_max, window) in [(10_000, 500), (20_000, 2_000), (50_000, 5_000), (100_000, 5_000)] {
            let config = DynamicsConfig {
                max_iterations: t_max,
                convergence_window: window,
                ..DynamicsConfig::default().with_seed(seed)
            };
            let g = gurm_run(&game, &config).unwrap();
            println!(
                "seed {seed} T={t_max} win={window}: W={:.2} conv={} iters={:?} psne={}",
                g.final_welfare,
                g.converged,
                g.iterations_to_convergence,
                is_psne(&aligned, &g.final_profile).unwrap()
            );
        }
    }
}
