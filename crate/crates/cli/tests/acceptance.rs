//! The primary acceptance suite. Runs every criterion, prints one PASS/FAIL
//! line each and exits non-zero if any fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use interpolatron::nets::{finite_difference_gradient, mlp_gradient, mlp_loss, MlpArchitecture};
use interpolatron::optim::interpolatron_step;
use interpolatron::problems::make_blobs;
use interpolatron::rng::seeded;
use interpolatron::theory::{certify, characteristic_coeffs, lemma2_xi, max_modulus_root, theta, CompanionSpec};
use interpolatron::{
    anderson_mixing, projected_mixing_k2, GradientBlock, HistoryWindow, MixingCoefficients, Vector,
};
use interpolatron_cli::config::{parse_config, ExperimentConfig};
use interpolatron_cli::experiments::{run_certify, run_compare, run_sweep, run_toy, ToyMethod};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn config_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn load(name: &str) -> ExperimentConfig {
    let path = config_dir().join(name);
    let text = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_config(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, budget: Duration) -> Result<(), String> {
    let took = start.elapsed();
    check(took < budget, || format!("took {took:.2?}, budget {budget:?}"))
}

fn normals(rng: &mut ChaCha8Rng, d: usize) -> Vector {
    Vector::new((0..d).map(|_| interpolatron::rng::standard_normal(rng)).collect()).unwrap()
}

/// Uniform on the simplex via normalised exponentials.
fn simplex(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    let mut a: Vec<f64> = e.iter().map(|v| v / s).collect();
    // Put the rounding remainder on the largest entry so the sum is 1.
    let rest: f64 = a.iter().sum::<f64>() - 1.0;
    let i = (0..k).max_by(|&i, &j| a[i].total_cmp(&a[j])).unwrap();
    a[i] -= rest;
    a
}

// 1 ---------------------------------------------------------------------

fn reductions() -> Outcome {
    let start = Instant::now();
    let mut cfg = load("reductions.toml");
    cfg.log_iterates = true;
    let report = run_compare(&cfg).map_err(|e| e.to_string())?;
    let base = report.run("sgd", cfg.seeds[0]).ok_or("no sgd run")?;
    check(base.trace.len() == 500 && !base.diverged(), || "sgd did not run 500 steps".into())?;
    let bits = |r: &interpolatron::TraceRow| {
        let mut v = vec![r.step, r.epoch, r.beta.to_bits(), r.loss.to_bits(), r.grad_norm.to_bits()];
        v.extend(r.iterate.iter().flatten().map(|x| x.to_bits()));
        v
    };
    let reference: Vec<Vec<u64>> = base.trace.iter().map(bits).collect();
    for run in report.runs.iter().filter(|r| r.name != "sgd") {
        let other: Vec<Vec<u64>> = run.trace.iter().map(bits).collect();
        check(other == reference, || format!("{} differs from sgd", run.name))?;
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("{} variants bitwise equal to sgd over 500 steps", report.runs.len() - 1))
}

// 2 ---------------------------------------------------------------------

fn certificate() -> Outcome {
    let start = Instant::now();
    let report = run_certify(&load("certify.toml")).map_err(|e| e.to_string())?;
    check((report.theta - 0.9).abs() < 1e-12, || format!("theta {}", report.theta))?;
    let cert = report.certificate.clone()?;
    let fit = report.fit.clone().ok_or("no rate fit")?;
    check(report.rate_ok(), || {
        format!("xi_hat {} > radius {} + 0.02", fit.xi_hat, cert.spectral_radius)
    })?;
    check(report.envelope_ok(), || "distance exceeds 1.05 · d0_hat · xi_hat^t".into())?;
    within(start, Duration::from_secs(5))?;
    Ok(format!(
        "xi_hat {:.6} vs radius {:.6}, envelope holds over steps {}..{}",
        fit.xi_hat, cert.spectral_radius, fit.window.start, fit.window.end
    ))
}

// 3 ---------------------------------------------------------------------

/// Asymptotic contraction of the scalar recursion, from the log-envelope over
/// two windows 2000 steps apart. Iterates are rescaled by powers of two,
/// which is exact for the linear recursion.
fn empirical_rate(alphas: &MixingCoefficients, beta: f64, h: f64) -> f64 {
    let init = [1.0, -0.37, 0.61];
    let xs: Vec<Vector> = (0..alphas.len()).map(|i| Vector::new(vec![init[i]]).unwrap()).collect();
    let gs: Vec<Vector> = xs.iter().map(|x| x.scale(h)).collect();
    let mut history = HistoryWindow::new(xs, gs).unwrap();
    let mut log_shift = 0.0f64;
    let (mut m1, mut m2) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for t in 1..=4000 {
        let x = interpolatron_step(&history, alphas, beta).unwrap();
        history.push(x.clone(), x.scale(h)).unwrap();
        let mag = x[0].abs();
        if mag > 0.0 {
            let level = mag.ln() + log_shift;
            if (1501..=2000).contains(&t) {
                m1 = m1.max(level);
            } else if t > 3500 {
                m2 = m2.max(level);
            }
        }
        if mag < 2f64.powi(-400) && mag > 0.0 {
            let c = 2f64.powi(400);
            let xs: Vec<Vector> = history.iterates().map(|v| v.scale(c)).collect();
            let gs: Vec<Vector> = history.gradients().map(|v| v.scale(c)).collect();
            history = HistoryWindow::new(xs, gs).unwrap();
            log_shift -= 400.0 * 2f64.ln();
        }
    }
    ((m2 - m1) / 2000.0).exp()
}

fn spectral_agreement() -> Outcome {
    let start = Instant::now();
    let mut rng = seeded(3);
    let mut checked = 0;
    let mut worst = 0.0f64;
    while checked < 100 {
        let k = 1 + checked % 3;
        let alphas = MixingCoefficients::interpolation(simplex(&mut rng, k)).unwrap();
        let h = 0.05 + 0.95 * rng.random::<f64>();
        let beta = rng.random::<f64>() * 2.0 / h;
        if theta(beta, h, h) >= 1.0 {
            continue;
        }
        let spec = CompanionSpec::new(alphas.clone(), beta, vec![h]).unwrap();
        let roots = interpolatron::theory::polynomial_roots(&characteristic_coeffs(&spec, 0).unwrap()).unwrap();
        // Skip slowly rotating dominant pairs and near-zero radii, where a
        // finite window cannot resolve the envelope.
        let top = roots.iter().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
        let angle = top.arg().abs();
        if (angle > 1e-9 && angle < 0.05) || top.norm() < 1e-3 {
            continue;
        }
        let predicted = max_modulus_root(&characteristic_coeffs(&spec, 0).unwrap()).unwrap();
        let measured = empirical_rate(&alphas, beta, h);
        let rel = (measured - predicted).abs() / predicted;
        worst = worst.max(rel);
        check(rel < 1e-3, || {
            format!("alphas {:?} beta {beta} h {h}: measured {measured} vs root {predicted}", alphas.as_slice())
        })?;
        checked += 1;
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("100 scalar instances, worst relative gap {worst:.2e}"))
}

// 4 ---------------------------------------------------------------------

fn stability_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = seeded(4);
    let mut worst = 0.0f64;
    for n in 0..500 {
        let k = 1 + n % 4;
        let alphas = MixingCoefficients::interpolation(simplex(&mut rng, k)).unwrap();
        let mu = 0.01 + 0.99 * rng.random::<f64>();
        let eta = mu + 2.0 * rng.random::<f64>();
        // θ < 1 exactly when 0 < β < 2/η.
        let beta = (0.001 + 0.998 * rng.random::<f64>()) * 2.0 / eta;
        let th = theta(beta, mu, eta);
        check(th < 1.0, || format!("sampled theta {th}"))?;
        let mut eigs: Vec<f64> = (0..3).map(|_| mu + (eta - mu) * rng.random::<f64>()).collect();
        eigs.extend([mu, eta]);
        let spec = CompanionSpec::new(alphas.clone(), beta, eigs).unwrap();
        let cert = certify(&spec, mu, eta).map_err(|e| format!("instance {n}: {e}"))?;
        worst = worst.max(cert.spectral_radius);
        check(cert.spectral_radius < 1.0, || format!("instance {n}: radius {}", cert.spectral_radius))?;

        let rhos: Vec<f64> = alphas.as_slice().iter().map(|a| a * th).collect();
        let xi = lemma2_xi(1.0, &rhos).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let z = xi + 3.0 * rng.random::<f64>();
            let tail: f64 = rhos.iter().enumerate().map(|(i, r)| r * z.powi((k - 1 - i) as i32)).sum();
            check(z.powi(k as i32) > tail, || format!("instance {n}: bound fails at |z| = {z}"))?;
        }
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!("500 instances, largest spectral radius {worst:.6}"))
}

// 5 ---------------------------------------------------------------------

fn anderson_optimality() -> Outcome {
    let start = Instant::now();
    let mut rng = seeded(5);
    for n in 0..200 {
        let k = 2 + n % 2;
        let gs: Vec<Vector> = (0..k).map(|_| normals(&mut rng, 20)).collect();
        let block = GradientBlock::new(gs.clone()).unwrap();
        let mix = anderson_mixing(&block, interpolatron::anderson::DEFAULT_RIDGE).unwrap();
        let alpha = mix.alphas.as_slice().to_vec();
        check((alpha.iter().sum::<f64>() - 1.0).abs() < 1e-12, || format!("block {n}: sum {:?}", alpha))?;
        let best = block.combine(&alpha).norm();
        for _ in 0..100 {
            let mut other: Vec<f64> = (0..k - 1).map(|_| 2.0 * interpolatron::rng::standard_normal(&mut rng)).collect();
            other.push(1.0 - other.iter().sum::<f64>());
            let norm = block.combine(&other).norm();
            check(best <= norm + 1e-9, || format!("block {n}: {best} beaten by {norm}"))?;
        }
        for c in [1e-3, 1.0, 1e3] {
            let scaled = GradientBlock::new(gs.iter().map(|g| g.scale(c)).collect()).unwrap();
            let a = anderson_mixing(&scaled, interpolatron::anderson::DEFAULT_RIDGE).unwrap();
            let gap = a.alphas.as_slice().iter().zip(&alpha).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            check(gap < 1e-9, || format!("block {n}: scaling by {c} moves alpha by {gap}"))?;
        }
    }
    within(start, Duration::from_secs(5))?;
    Ok("200 blocks: optimal against 100 affine rivals each, scale invariant".into())
}

// 6 ---------------------------------------------------------------------

fn projected_mixing() -> Outcome {
    let mut rng = seeded(6);
    let mut worst = 0.0f64;
    for n in 0..200 {
        let g_new = normals(&mut rng, 20);
        let g_old = normals(&mut rng, 20);
        let a = projected_mixing_k2(&g_new, &g_old).unwrap();
        let a = a.as_slice();
        check(a.iter().all(|v| (0.0..=1.0).contains(v)), || format!("pair {n}: {a:?}"))?;
        let objective = |a2: f64| g_new.scale(1.0 - a2).add(&g_old.scale(a2)).norm();
        let grid_best = (0..=1000)
            .map(|i| i as f64 / 1000.0)
            .min_by(|x, y| objective(*x).total_cmp(&objective(*y)))
            .unwrap();
        let gap = (a[1] - grid_best).abs();
        worst = worst.max(gap);
        check(gap <= 2e-3, || format!("pair {n}: alpha_2 {} vs grid {grid_best}", a[1]))?;
    }
    Ok(format!("200 pairs inside [0,1]^2, largest gap to grid search {worst:.1e}"))
}

// 7 ---------------------------------------------------------------------

fn gradient_oracle() -> Outcome {
    let arch = MlpArchitecture::new(vec![4, 8, 3], 2e-4).unwrap();
    let mut worst = 0.0f64;
    for draw in 0..20u64 {
        let data = make_blobs(24, 4, 3, 1.0, 100 + draw).unwrap();
        let mut rng = seeded(700 + draw);
        let noise = normals(&mut rng, arch.param_count()).scale(0.1);
        let params = arch.init_params(draw).add(&noise);
        let batch = data.all_indices();
        let analytic = mlp_gradient(&arch, &params, &data, &batch).unwrap();
        let numeric =
            finite_difference_gradient(|p| mlp_loss(&arch, p, &data, &batch).unwrap(), &params, 1e-5).unwrap();
        let rel = analytic.sub(&numeric).norm() / numeric.norm();
        worst = worst.max(rel);
        check(rel < 1e-5, || format!("draw {draw}: relative error {rel:.2e}"))?;
    }
    Ok(format!("20 draws, worst relative error {worst:.2e}"))
}

// 8 ---------------------------------------------------------------------

fn escape_dynamics() -> Outcome {
    let report = run_toy(&load("fig2.toml")).map_err(|e| e.to_string())?;
    let mom = report.median_escape(ToyMethod::Momentum).ok_or("momentum never escapes")?;
    let interp = report.median_escape(ToyMethod::Interpolatron).ok_or("interpolatron never escapes")?;
    check(interp < mom, || format!("median escape: interpolatron {interp} vs momentum {mom}"))?;
    let coverage = report.escape_coverage().ok_or("momentum never escapes")?;
    check(coverage >= 0.8, || format!("coverage {coverage}"))?;
    let closest = report
        .best_reproduction()
        .map(|(m, i)| {
            format!(
                "; closest to 29/4: {}/{}",
                m.escape_steps.map_or("-".into(), |s| s.to_string()),
                i.escape_steps.map_or("-".into(), |s| s.to_string())
            )
        })
        .unwrap_or_default();
    Ok(format!(
        "median escape {interp} vs {mom} steps, coverage {:.0}%{closest}",
        100.0 * coverage
    ))
}

// 9 ---------------------------------------------------------------------

fn overshoot_dynamics() -> Outcome {
    let report = run_toy(&load("fig3.toml")).map_err(|e| e.to_string())?;
    for (m, i) in &report.points {
        check(m.trajectory.len() == 8 && i.trajectory.len() == 8, || "runs are not 8 steps long".into())?;
        check(m.trajectory[0] == i.trajectory[0], || "runs leave from different points".into())?;
        check(i.max_excursion < m.max_excursion, || {
            format!(
                "beta {} alpha1 {}: interpolatron {} vs momentum {}",
                m.beta, i.alpha1, i.max_excursion, m.max_excursion
            )
        })?;
    }
    let monotone = report.points.iter().filter(|(m, _)| m.monotone).count();
    check(monotone >= 1, || "no momentum run grows its excursion at every step".into())?;
    Ok(format!(
        "interpolatron strays less at all {} points; {monotone} momentum run(s) never turn back",
        report.points.len()
    ))
}

// 10 --------------------------------------------------------------------

fn miniature_training() -> Outcome {
    let start = Instant::now();
    let cfg = load("mlp_compare.toml");
    let report = run_compare(&cfg).map_err(|e| e.to_string())?;
    let interp = cfg.optimizers.iter().find(|o| o.name == "interpolatron").ok_or("no interpolatron")?;
    let sgd = cfg.optimizers.iter().find(|o| o.name == "sgd").ok_or("no sgd")?;
    let drift = interp.spec().unwrap().drift_factor().unwrap();
    // SGD drifts as far per step as the interpolation run.
    check((sgd.beta0() - interp.beta0() * drift).abs() < 1e-15, || {
        format!("sgd beta {} is not {} * {drift}", sgd.beta0(), interp.beta0())
    })?;
    let mut wins = 0;
    for &seed in &cfg.seeds {
        let i = report.summary_row("interpolatron", seed).unwrap();
        let s = report.summary_row("sgd", seed).unwrap();
        check(!i.diverged, || format!("interpolatron diverged at seed {seed}"))?;
        let win = match (i.steps_to_threshold, s.steps_to_threshold) {
            (Some(a), Some(b)) => a <= b,
            (Some(_), None) => true,
            _ => false,
        };
        wins += win as usize;
    }
    check(wins >= 2, || format!("interpolatron no later than sgd in {wins} of 3 seeds"))?;

    let sweep = run_sweep(&load("sweep.toml")).map_err(|e| e.to_string())?;
    check(sweep.runs.iter().all(|(_, _, r)| !r.diverged()), || "a sweep run diverged".into())?;
    let (a, b) = (sweep.alpha_spread(), sweep.beta_spread());
    check(a < b, || format!("alpha spread {a:.3e} not below beta spread {b:.3e}"))?;
    within(start, Duration::from_secs(120))?;
    Ok(format!("no later than sgd in {wins}/3 seeds; spread over alpha1 {a:.2e} < over beta {b:.2e}"))
}

// 11 --------------------------------------------------------------------

fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn determinism() -> Outcome {
    let runs = [
        ("compare", "reductions.toml"),
        ("compare", "mlp_compare.toml"),
        ("sweep", "sweep.toml"),
        ("certify", "certify.toml"),
        ("toy", "fig2.toml"),
        ("toy", "fig3.toml"),
    ];
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = 0;
    for (command, config) in runs {
        let mut outputs = Vec::new();
        for attempt in 0..2 {
            let out = tmp.path().join(format!("{config}-{attempt}"));
            let status = Command::new(env!("CARGO_BIN_EXE_interpolatron"))
                .args([command, "--quiet", "--log-iterates", "--config"])
                .arg(config_dir().join(config))
                .arg("--out")
                .arg(&out)
                .status()
                .map_err(|e| e.to_string())?;
            check(status.success(), || format!("{command} {config} exited with {status}"))?;
            outputs.push(snapshot(&out));
        }
        check(outputs[0] == outputs[1], || format!("{config}: outputs differ between runs"))?;
        check(outputs[0].keys().any(|p| p.extension().is_some_and(|e| e == "csv")), || {
            format!("{config}: no CSV written")
        })?;
        files += outputs[0].len();
    }
    Ok(format!("6 configs run twice, {files} files byte-identical"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("reduction exactness", reductions),
        ("theory certificate", certificate),
        ("spectral-radius agreement", spectral_agreement),
        ("stability property suite", stability_suite),
        ("anderson optimality", anderson_optimality),
        ("projected mixing", projected_mixing),
        ("gradient oracle", gradient_oracle),
        ("escape dynamics", escape_dynamics),
        ("overshoot dynamics", overshoot_dynamics),
        ("miniature training", miniature_training),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({took:.2?})", n + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} ({took:.2?})", n + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        std::process::exit(1);
    }
}
