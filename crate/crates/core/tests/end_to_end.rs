use std::fs;

use critlab::csvio;
use critlab::experiment::{read_jsonl, run_experiment, ExperimentConfig};
use critlab::measures::{sample_roots, MeasureSpec};
use critlab::metrics::{prohorov_distance, DiscreteMeasure};
use critlab::polyroots::{critical_points, RootPolynomial};
use critlab::Complex64;

const ATOMIC: &str = r#"
n_values = [2]
trials = 1
master_seed = 3

[measure]
kind = "atomic"
atoms = [{ at = [1.0, 0.0], weight = 0.5 }, { at = [-1.0, 0.0], weight = 0.5 }]
"#;

#[test]
fn atomic_two_root_run_is_reproducible() {
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let mut config = ExperimentConfig::from_toml(ATOMIC).unwrap();
        config.output_dir = dir.path().to_path_buf();
        let summary = run_experiment(&config, Some(1)).unwrap();
        assert_eq!((summary.total_trials, summary.failed_trials), (1, 0));
        let reports = read_jsonl(&dir.path().join("trials.jsonl")).unwrap();
        assert_eq!(reports.len(), 1);
        let roots = sample_roots(&config.measure, 2, reports[0].seed).unwrap().roots;
        let cps = csvio::read_points(fs::File::open(dir.path().join("scatter_n2.csv")).unwrap()).unwrap();
        // One critical point: the midpoint of the roots, or the double root itself.
        assert_eq!(cps, vec![(roots[0] + roots[1]) / 2.0]);
        outputs.push((fs::read(dir.path().join("summary.json")).unwrap(), reports[0].clone()));
    }
    assert_eq!(outputs[0].0, outputs[1].0);
    let (mut a, mut b) = (outputs[0].1.clone(), outputs[1].1.clone());
    a.timing = 0.0;
    b.timing = 0.0;
    assert_eq!(a, b);
}

#[test]
fn critical_points_survive_a_csv_round_trip() {
    let roots = sample_roots(&MeasureSpec::UniformDisk { radius: 2.0 }, 40, 17).unwrap().roots;
    let mut buf = Vec::new();
    csvio::write_points(&mut buf, &roots).unwrap();
    let back = csvio::read_points(buf.as_slice()).unwrap();
    assert_eq!(back, roots);
    let cps = critical_points(&RootPolynomial::new(&back, 53).unwrap()).unwrap();
    let mut out = Vec::new();
    csvio::write_critical_points(&mut out, &cps).unwrap();
    let table = csvio::read_table(out.as_slice()).unwrap();
    assert_eq!(table.points, cps.points);
    assert_eq!(table.extra, cps.residuals);
    assert!(cps.residuals.iter().all(|&r| r <= cps.tau));
}

#[test]
fn critical_points_approach_the_roots_in_distribution() {
    let spec = MeasureSpec::UniformDisk { radius: 1.0 };
    let reference = DiscreteMeasure::uniform(&sample_roots(&spec, 4000, 1).unwrap().roots).unwrap();
    let distance = |n: usize| {
        let d: Vec<f64> = (0..5)
            .map(|t| {
                let roots = sample_roots(&spec, n, 100 + t).unwrap().roots;
                let cps = critical_points(&RootPolynomial::new(&roots, 53).unwrap()).unwrap();
                prohorov_distance(&DiscreteMeasure::uniform(&cps.points).unwrap(), &reference, 1e-3).unwrap()
            })
            .collect();
        d.iter().sum::<f64>() / d.len() as f64
    };
    assert!(distance(300) < distance(20));
}

#[test]
fn nearby_roots_at_two_precisions() {
    let d = 1e-12f64;
    let roots = vec![Complex64::new(0.0, 0.0), Complex64::new(d, 0.0), Complex64::new(1.0, 0.0)];
    // Exact zeros of 3z^2 - 2(1 + d)z + d.
    let disc = ((1.0 + d) * (1.0 + d) - 3.0 * d).sqrt();
    let small = d / (1.0 + d + disc);
    let large = (1.0 + d + disc) / 3.0;
    // At 53 bits the pair is a double root, so one critical point sits on it.
    let coarse = critical_points(&RootPolynomial::new(&roots, 53).unwrap()).unwrap();
    assert_eq!(coarse.len(), 2);
    assert!((coarse.points[0].re - small).abs() < 1e-12, "{:?}", coarse.points);
    assert!((coarse.points[1].re - large).abs() < 1e-12);
    let fine = critical_points(&RootPolynomial::new(&roots, 128).unwrap()).unwrap();
    assert!((fine.points[0] - Complex64::new(small, 0.0)).norm() < 1e-24, "{:?}", fine.points);
    assert!((fine.points[1] - Complex64::new(large, 0.0)).norm() < 1e-15);
}
