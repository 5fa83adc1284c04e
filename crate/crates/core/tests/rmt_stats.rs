use qpairings::kernel::KernelSpec;
use qpairings::rmt_sim::{
    estimate_moment, estimate_product, estimate_shifted, generate_family, odd_moment_probe, variance_decay_probe,
    FamilyGenerator, MomentEstimate, RmtConfig,
};

/// Mean and standard error of `xs`.
fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

fn agree(a: &MomentEstimate, b: &MomentEstimate) -> bool {
    (a.mean - b.mean).abs() <= 3.0 * (a.stderr * a.stderr + b.stderr * b.stderr).sqrt()
}

/// Unscaled entries `a_ij^(r) = sqrt(N) A^(r)_ij`, split into diagonal and
/// off-diagonal sequences.
fn entry_sequences(gen: &FamilyGenerator, samples: u64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n = gen.dim();
    let scale = (n as f64).sqrt();
    let (mut diag, mut off) = (Vec::new(), Vec::new());
    for s in 0..samples {
        let fam = gen.sample(77, s);
        for i in 0..n {
            for j in i..n {
                let seq: Vec<f64> = fam.iter().map(|m| m.get(i, j) * scale).collect();
                if i == j {
                    diag.push(seq)
                } else {
                    off.push(seq)
                }
            }
        }
    }
    (diag, off)
}

fn check_law(kernel: &KernelSpec, force_factor: bool) {
    let gen = FamilyGenerator::new(kernel, 4, 5, force_factor).unwrap();
    let (diag, off) = entry_sequences(&gen, 17_000);
    assert!(off.len() >= 100_000);
    let v0 = kernel.variance();
    for (seqs, factor) in [(&off, 1.0), (&diag, 2.0)] {
        let sq: Vec<f64> = seqs.iter().map(|s| s[0] * s[0]).collect();
        let (m, se) = mean_se(&sq);
        assert!((m - factor * v0).abs() <= 3.0 * se, "variance {m} vs {}", factor * v0);
    }
    for r in 1..=4 {
        let prod: Vec<f64> = off.iter().map(|s| s[0] * s[r]).collect();
        let (m, se) = mean_se(&prod);
        let want = kernel.value(r).unwrap();
        assert!((m - want).abs() <= 3.0 * se, "lag {r}: {m} vs {want}");
    }
}

#[test]
fn geometric_marginal_and_lag_law() {
    check_law(&KernelSpec::geometric(0.6).unwrap(), false);
}

#[test]
fn table_marginal_and_lag_law() {
    check_law(&KernelSpec::table(vec![1.45, 0.78, 0.3, 0.0, 0.0]).unwrap(), false);
    check_law(&KernelSpec::geometric(0.8).unwrap(), true);
}

#[test]
fn matrices_are_symmetric() {
    let cfg = RmtConfig::geometric(37, 3, 0.9, 2, 1).unwrap();
    for s in 0..3 {
        assert!(generate_family(&cfg, s).unwrap().iter().all(|m| m.is_symmetric()));
    }
}

#[test]
fn two_factor_moment_formula() {
    let cfg = RmtConfig::geometric(50, 1, 0.5, 20_000, 3).unwrap();
    let est = estimate_moment(&cfg).unwrap();
    assert!(est.within(0.5 * 51.0 / 50.0, 3.0), "{est:?}");
}

#[test]
fn delta_kernel_gives_zero() {
    let kernel = KernelSpec::table(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
    let cfg = RmtConfig {
        n: 60,
        k: 2,
        kernel,
        samples: 4000,
        seed: 5,
        odd_probe: false,
    };
    let est = estimate_moment(&cfg).unwrap();
    assert!(est.within(0.0, 3.0), "{est:?}");
}

#[test]
fn shifted_factors_have_the_same_law() {
    let base = estimate_moment(&RmtConfig::geometric(16, 2, 0.7, 20_000, 21).unwrap()).unwrap();
    for (m, seed) in [(1, 22), (2, 23)] {
        let shifted = estimate_shifted(&RmtConfig::geometric(16, 2, 0.7, 20_000, seed).unwrap(), m).unwrap();
        assert!(agree(&base, &shifted), "shift {m}: {} vs {}", shifted.mean, base.mean);
    }
}

#[test]
fn toeplitz_and_ar1_agree_in_law() {
    let p: f64 = 0.8;
    let table = KernelSpec::table((0..6).map(|r| p.powi(r)).collect()).unwrap();
    let ar1 = estimate_moment(&RmtConfig::geometric(16, 2, p, 20_000, 31).unwrap()).unwrap();
    let cfg = RmtConfig {
        kernel: table,
        seed: 32,
        ..ar1.config.clone()
    };
    let fac = estimate_moment(&cfg).unwrap();
    assert!(agree(&ar1, &fac), "{} vs {}", ar1.mean, fac.mean);
    let forced = estimate_product(&RmtConfig::geometric(16, 2, p, 20_000, 33).unwrap(), 4, 0, true).unwrap();
    assert!(agree(&ar1, &forced));
}

#[test]
fn scalar_odd_probe_is_centred() {
    let cfg = RmtConfig::geometric(1, 0, 0.5, 50_000, 8).unwrap();
    let est = odd_moment_probe(&cfg).unwrap();
    assert_eq!(est.factors, 1);
    assert!(est.within(0.0, 3.0));
    assert!((est.var_trace - 1.0).abs() < 0.05);
}

#[test]
fn scalar_case_has_the_largest_variance() {
    let cfg = RmtConfig::geometric(1, 2, 0.5, 4000, 12).unwrap();
    let rows = variance_decay_probe(&cfg, &[1, 5, 10, 20]).unwrap();
    assert!(rows.windows(2).all(|w| w[1].var_trace < w[0].var_trace), "{rows:?}");
}

#[test]
fn results_do_not_depend_on_the_pool() {
    let cfg = RmtConfig::geometric(9, 2, 0.4, 500, 6).unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            (
                estimate_moment(&cfg).unwrap(),
                estimate_product(&cfg, 5, 2, true).unwrap(),
            )
        })
    };
    let (a, b) = run(1);
    for threads in [2, 5] {
        let (x, y) = run(threads);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&x).unwrap());
        assert_eq!(serde_json::to_string(&b).unwrap(), serde_json::to_string(&y).unwrap());
    }
}
