//! Dataset loading, sampling determinism, and report formatting.

use bede_harness::{
    efficiency_csv, generate_sample, load_dataset, poisson_expected_frequencies,
    run_efficiency_study, DatasetKind, MCConfig, ReplicateRng,
};

#[test]
fn bundled_datasets_load_with_expected_shapes() {
    let tele = load_dataset("telephone-fault").unwrap();
    let DatasetKind::Univariate(xs) = &tele.kind else {
        panic!("telephone-fault should be univariate")
    };
    assert_eq!(xs.len(), 14);
    assert_eq!(xs[0], -988.0);
    assert_eq!(xs[13], 310.0);

    let dros = load_dataset("drosophila").unwrap();
    let DatasetKind::Univariate(xs) = &dros.kind else {
        panic!("drosophila should be univariate")
    };
    assert_eq!(xs.len(), 34);
    assert_eq!(xs.iter().cloned().fold(f64::MIN, f64::max), 91.0);
    assert_eq!(xs.iter().filter(|&&x| x == 0.0).count(), 23);

    let deleted = load_dataset("drosophila-deleted").unwrap();
    let DatasetKind::Univariate(xs) = &deleted.kind else {
        panic!("drosophila-deleted should be univariate")
    };
    assert_eq!(xs.len(), 33);
    assert!(xs.iter().all(|&x| x <= 2.0));

    let belgium = load_dataset("belgium-calls").unwrap();
    let DatasetKind::Regression(data) = &belgium.kind else {
        panic!("belgium-calls should be a regression dataset")
    };
    assert_eq!(data.n(), 24);
    assert_eq!(data.q(), 2);
    assert!(belgium.provenance.contains("Rousseeuw"));

    let salinity = load_dataset("salinity").unwrap();
    let DatasetKind::Regression(data) = &salinity.kind else {
        panic!("salinity should be a regression dataset")
    };
    assert_eq!(data.n(), 28);
    assert_eq!(data.q(), 4);
}

#[test]
fn unknown_names_and_bad_csv_files_error_with_detail() {
    assert!(load_dataset("no-such-dataset").is_err());

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "a,b\n1.0,2.0\n3.0,oops\n").unwrap();
    let err = load_dataset(bad.to_str().unwrap()).unwrap_err();
    assert!(err.to_string().contains("line 3"), "{err}");
}

#[test]
fn user_csv_loads_univariate_and_regression() {
    let dir = tempfile::tempdir().unwrap();
    let uni = dir.path().join("uni.csv");
    std::fs::write(&uni, "# one column\nvalue\n1.5\n2.5\n-0.5\n").unwrap();
    let loaded = load_dataset(uni.to_str().unwrap()).unwrap();
    let DatasetKind::Univariate(xs) = &loaded.kind else {
        panic!("single column should load univariate")
    };
    assert_eq!(xs, &vec![1.5, 2.5, -0.5]);

    let reg = dir.path().join("reg.csv");
    let mut text = String::from("x,y\n");
    for i in 0..8 {
        text.push_str(&format!("{},{}\n", i, 2 * i + 1));
    }
    std::fs::write(&reg, text).unwrap();
    let loaded = load_dataset(reg.to_str().unwrap()).unwrap();
    let DatasetKind::Regression(data) = &loaded.kind else {
        panic!("two columns should load as regression")
    };
    assert_eq!(data.n(), 8);
    assert_eq!(data.q(), 2);
}

#[test]
fn expected_frequencies_sum_to_n_exactly_and_match_closed_forms() {
    let freq = poisson_expected_frequencies(3.06, 34.0).unwrap();
    let total: f64 = freq.iter().sum();
    assert_eq!(total, 34.0);
    assert!((freq[0] - 34.0 * (-3.06f64).exp()).abs() < 1e-12);
    assert!((freq[1] - 34.0 * 3.06 * (-3.06f64).exp()).abs() < 1e-12);

    // A rate near zero concentrates everything in the zero cell.
    let tiny = poisson_expected_frequencies(1e-12, 34.0).unwrap();
    assert!((tiny[0] - 34.0).abs() < 1e-9);
    assert!(tiny[1] < 1e-9);

    assert!(poisson_expected_frequencies(0.0, 34.0).is_err());
}

fn make_spec(
    model: &str,
    target: &[f64],
    contaminant: &[f64],
    epsilon: f64,
) -> bede_harness::ContaminationSpec {
    bede_harness::ContaminationSpec {
        model: model.to_string(),
        target: target.to_vec(),
        contaminant: contaminant.to_vec(),
        epsilon,
    }
}

#[test]
fn sampling_is_seed_deterministic_and_mixture_weighted() {
    let spec = make_spec("normal", &[0.0, 1.0], &[10.0, 1.0], 0.05);
    let a = generate_sample(&spec, 200, &mut ReplicateRng::new(11, 3));
    let b = generate_sample(&spec, 200, &mut ReplicateRng::new(11, 3));
    assert_eq!(a, b);
    let c = generate_sample(&spec, 200, &mut ReplicateRng::new(11, 4));
    assert_ne!(a, c);

    // Law of large numbers on the contaminant fraction.
    let mut rng = ReplicateRng::new(5, 0);
    let big = generate_sample(&spec, 200_000, &mut rng);
    let frac = big.iter().filter(|&&x| x > 5.0).count() as f64 / big.len() as f64;
    assert!((frac - 0.05).abs() < 0.005, "contaminant fraction {frac}");

    // Pure target: the empirical mean settles near zero.
    let pure = make_spec("normal", &[0.0, 1.0], &[], 0.0);
    let mut rng = ReplicateRng::new(5, 0);
    let xs = generate_sample(&pure, 200_000, &mut rng);
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    assert!(mean.abs() < 0.01, "mean of pure draws {mean}");
}

#[test]
fn poisson_sampling_matches_the_rate() {
    let spec = make_spec("poisson", &[2.0], &[], 0.0);
    let mut rng = ReplicateRng::new(19, 0);
    let xs = generate_sample(&spec, 100_000, &mut rng);
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    assert!((mean - 2.0).abs() < 0.03, "poisson mean {mean}");
    assert!(xs.iter().all(|&x| x >= 0.0 && x.fract() == 0.0));
}

#[test]
fn efficiency_csv_is_byte_identical_across_runs() {
    let text = r#"
        n = 40
        replications = 24
        seed = 123
        pairs = [[0.0, 0.5]]
        target_param = [0.0]

        [spec]
        model = "normal"
        target = [0.0, 1.0]
        epsilon = 0.0
    "#;
    let config = MCConfig::from_toml(text).unwrap();
    let first = efficiency_csv(&config, &run_efficiency_study(&config).unwrap());
    let second = efficiency_csv(&config, &run_efficiency_study(&config).unwrap());
    assert_eq!(first, second);
    let mut lines = first.lines();
    let meta = lines.next().unwrap();
    assert!(meta.starts_with("# seed=123 version="), "{meta}");
    assert!(meta.contains("config="), "{meta}");
    assert_eq!(
        lines.next().unwrap(),
        "alpha,beta,n_mse,relative_efficiency,failures,flagged"
    );
    // Reference row plus one pair row.
    assert_eq!(first.lines().count(), 4);
}
