use sbs_monitor::config::RunConfig;
use sbs_monitor::ensemble::{
    fig2_curves, mean_and_stderr, sample_haar_beta, sample_hs_lambda, stream_rng, StreamDomain,
};

/// Kolmogorov–Smirnov statistic of `xs` against `cdf`.
fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = cdf(x);
            (c - i as f64 / n).abs().max(((i + 1) as f64 / n - c).abs())
        })
        .fold(0.0, f64::max)
}

// 1% critical value
const KS_COEFF: f64 = 1.63;

#[test]
fn haar_beta_matches_sine_density() {
    let n = 20_000;
    let mut rng = stream_rng(5, StreamDomain::Moments, 0);
    let xs: Vec<f64> = (0..n).map(|_| sample_haar_beta(&mut rng)).collect();
    let d = ks_statistic(xs, |b| (1.0 - b.cos()) / 2.0);
    assert!(d < KS_COEFF / (n as f64).sqrt(), "KS {d}");
}

#[test]
fn hs_lambda_matches_cubic_density() {
    let n = 20_000;
    let mut rng = stream_rng(6, StreamDomain::Moments, 0);
    let xs: Vec<f64> = (0..n).map(|_| sample_hs_lambda(&mut rng)).collect();
    let d = ks_statistic(xs, |l| ((2.0 * l - 1.0).powi(3) + 1.0) / 2.0);
    assert!(d < KS_COEFF / (n as f64).sqrt(), "KS {d}");
}

#[test]
fn stderr_shrinks_as_inverse_root() {
    let draw = |n: usize| {
        let mut rng = stream_rng(7, StreamDomain::Moments, n as u64);
        let xs: Vec<f64> = (0..n).map(|_| sample_haar_beta(&mut rng).cos()).collect();
        mean_and_stderr(&xs).1
    };
    let ratio = draw(2_000) / draw(32_000);
    assert!((ratio - 4.0).abs() < 0.4, "ratio {ratio}");
}

fn small_config() -> RunConfig {
    let mut c = RunConfig {
        samples: 64,
        ..RunConfig::default()
    };
    c.time.points = 41;
    c
}

#[test]
fn fig2_is_independent_of_thread_count() {
    let config = small_config();
    let in_pool = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| fig2_curves(&[30, 50], &config).unwrap())
    };
    let one = in_pool(1);
    let four = in_pool(4);
    for (a, b) in one.iter().zip(&four) {
        assert_eq!(a.curve.mean, b.curve.mean);
        assert_eq!(a.curve.stderr, b.curve.stderr);
    }
}

#[test]
fn seed_changes_fig2() {
    let mut config = small_config();
    let a = fig2_curves(&[30], &config).unwrap();
    config.seed += 1;
    let b = fig2_curves(&[30], &config).unwrap();
    assert_eq!(a[0].curve.mean[0], b[0].curve.mean[0]);
    assert_ne!(a[0].curve.mean, b[0].curve.mean);
}
