//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Run with `cargo test -p caseval-cli --test acceptance -- --nocapture` to
//! see the per-criterion lines. Every threshold is pinned in code; the
//! expected fixture bundle under tests/expected/ was precomputed by the
//! independent reference scripts in scripts/ before the engine was built.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use chrono::{TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use caseval_cli::dataset::{load_dataset, load_scores};
use caseval_cli::manifest::{load_manifest, Manifest};
use caseval_cli::pipeline::{run, Mode, RunOptions};
use caseval_core::aggregate::VendorPreference;
use caseval_core::agreement::kendall_tau_b_values;
use caseval_core::cost::{clinician_cost, cost_ratio, llm_cost, TokenSpend};
use caseval_core::gate::evaluate_gate;
use caseval_core::model::{RubricSource, RubricStatus, Vendor};
use caseval_core::scoring::{
    compute_normalized_score, score_note, stability_range, ReferenceScorer, ScoreOptions,
};
use caseval_core::stats;

fn criterion<F: FnOnce() + std::panic::UnwindSafe>(name: &str, check: F) {
    match std::panic::catch_unwind(check) {
        Ok(()) => println!("[acceptance] {name}: PASS"),
        Err(payload) => {
            println!("[acceptance] {name}: FAIL");
            std::panic::resume_unwind(payload);
        }
    }
}

fn fixture_manifest(output_dir: &Path) -> Manifest {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/manifest.toml");
    let mut manifest = load_manifest(&root).unwrap();
    manifest.output_dir = output_dir.to_path_buf();
    manifest
}

fn pinned_options(workers: usize) -> RunOptions {
    RunOptions {
        workers: Some(workers),
        seed: 0,
        timestamp: Some(Utc.with_ymd_and_hms(2026, 1, 1, 0, 0, 0).unwrap()),
    }
}

fn expected_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/expected")
}

fn expected_values() -> serde_json::Value {
    serde_json::from_str(
        &std::fs::read_to_string(expected_dir().join("expected_values.json")).unwrap(),
    )
    .unwrap()
}

// ---------------------------------------------------------------------------
// 1. Weighted normalized scoring against the naive summation oracle.
// ---------------------------------------------------------------------------
#[test]
fn c1_normalized_score_oracle() {
    criterion("C1 weighted-scoring-oracle", || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for _ in 0..1000 {
            let n = rng.gen_range(1..16);
            let sats: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=1.0)).collect();
            let weights: Vec<u32> = (0..n).map(|_| rng.gen_range(1..100)).collect();
            let got = compute_normalized_score(&sats, &weights).unwrap();

            // Naive per-term oracle, accumulated in reverse order.
            let mut numerator = 0.0;
            let mut denominator = 0.0;
            for i in (0..n).rev() {
                numerator += sats[i] * f64::from(weights[i]);
                denominator += f64::from(weights[i]);
            }
            let expected = numerator / denominator * 100.0;
            assert!(
                (got - expected).abs() < 1e-9,
                "oracle mismatch: {got} vs {expected}"
            );
            assert!(
                (0.0..=100.0 + 1e-12).contains(&got),
                "bounds violated: {got}"
            );

            // Scale invariance: integer-scaled weights leave the score alone.
            let k = rng.gen_range(2..10u32);
            let scaled: Vec<u32> = weights.iter().map(|w| w * k).collect();
            let rescored = compute_normalized_score(&sats, &scaled).unwrap();
            assert!(
                (got - rescored).abs() < 1e-9,
                "scale variance: {got} vs {rescored}"
            );

            // Monotonicity: raising one satisfaction never lowers the score.
            let mut bumped = sats.clone();
            let i = rng.gen_range(0..n);
            bumped[i] = (bumped[i] + rng.gen_range(0.0..=1.0)).min(1.0);
            let raised = compute_normalized_score(&bumped, &weights).unwrap();
            assert!(
                raised >= got - 1e-12,
                "monotonicity violated: {raised} < {got}"
            );
        }
        assert!(
            start.elapsed() < Duration::from_secs(1),
            "budget exceeded: {:?}",
            start.elapsed()
        );
    });
}

// ---------------------------------------------------------------------------
// 2. Best/worst gate truth table on exhaustive score grids.
// ---------------------------------------------------------------------------
#[test]
fn c2_gate_truth_table() {
    criterion("C2 gate-truth-table", || {
        let start = Instant::now();
        let grid = [0.0, 25.0, 50.0, 70.0, 70.0 + 1e-9, 100.0];
        let mut combos: Vec<[f64; 3]> = Vec::new();
        for &a in &grid {
            for &b in &grid {
                for &c in &grid {
                    combos.push([a, b, c]);
                }
            }
        }
        let mut checked = 0usize;
        for best in &combos {
            for worst in &combos {
                let decision = evaluate_gate(best, worst).unwrap();
                // Direct max/min oracle.
                let min_best = best.iter().cloned().fold(f64::INFINITY, f64::min);
                let max_worst = worst.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                assert_eq!(decision.accepted, max_worst < min_best);
                assert_eq!(decision.separation_margin, min_best - max_worst);
                assert_eq!(decision.accepted, decision.separation_margin > 0.0);
                checked += 1;
            }
        }
        assert_eq!(checked, 216 * 216);
        // The strict boundary: identical extremes must reject.
        assert!(!evaluate_gate(&[70.0; 3], &[70.0; 3]).unwrap().accepted);
        assert!(
            evaluate_gate(&[70.0 + 1e-9; 3], &[70.0; 3])
                .unwrap()
                .accepted
        );
        assert!(
            start.elapsed() < Duration::from_secs(1),
            "budget exceeded: {:?}",
            start.elapsed()
        );
    });
}

// ---------------------------------------------------------------------------
// 3. Kendall tau-b against the O(n^2) pair-enumeration oracle.
// ---------------------------------------------------------------------------
fn tau_oracle(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    let total = (n * (n - 1)) as f64 / 2.0;
    let (mut concordant, mut discordant, mut tied_x, mut tied_y) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            if x[i] == x[j] {
                tied_x += 1.0;
            }
            if y[i] == y[j] {
                tied_y += 1.0;
            }
            if x[i] != x[j] && y[i] != y[j] {
                if ((x[i] - x[j]) > 0.0) == ((y[i] - y[j]) > 0.0) {
                    concordant += 1.0;
                } else {
                    discordant += 1.0;
                }
            }
        }
    }
    let denominator = (total - tied_x) * (total - tied_y);
    if denominator <= 0.0 {
        None
    } else {
        Some((concordant - discordant) / denominator.sqrt())
    }
}

fn permutations(n: usize) -> Vec<Vec<f64>> {
    if n == 1 {
        return vec![vec![1.0]];
    }
    let mut out = Vec::new();
    for shorter in permutations(n - 1) {
        for slot in 0..n {
            let mut longer = shorter.clone();
            longer.insert(slot, n as f64);
            out.push(longer);
        }
    }
    out
}

fn all_vectors(n: usize, alphabet: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (1..=alphabet).map(move |v| {
                    let mut next = prefix.clone();
                    next.push(v as f64);
                    next
                })
            })
            .collect();
    }
    out
}

fn check_tau_pair(x: &[f64], y: &[f64]) {
    let got = kendall_tau_b_values(x, y).unwrap();
    let expected = tau_oracle(x, y);
    match (got, expected) {
        (None, None) => {}
        (Some(g), Some(e)) => assert!(
            (g - e).abs() < 1e-12,
            "tau mismatch on {x:?} vs {y:?}: {g} vs {e}"
        ),
        other => panic!("degeneracy mismatch on {x:?} vs {y:?}: {other:?}"),
    }
    // Symmetry.
    assert_eq!(got, kendall_tau_b_values(y, x).unwrap());
    // Invariance under a strictly increasing transform.
    let transformed: Vec<f64> = x.iter().map(|v| v * 7.0 + 3.0).collect();
    match (kendall_tau_b_values(&transformed, y).unwrap(), got) {
        (None, None) => {}
        (Some(a), Some(b)) => assert!((a - b).abs() < 1e-12),
        other => panic!("monotone-transform mismatch: {other:?}"),
    }
}

#[test]
fn c3_kendall_tau_oracle() {
    criterion("C3 kendall-tau-oracle", || {
        let start = Instant::now();
        // Exhaustive tie coverage for n <= 4: every pair of value vectors
        // over an n-letter alphabet (includes all permutations and every tie
        // pattern).
        for n in 2..=4 {
            let vectors = all_vectors(n, n);
            for x in &vectors {
                for y in &vectors {
                    check_tau_pair(x, y);
                }
            }
        }
        // All permutation pairs for n = 5 and n = 6, with systematic tie
        // injection on one side via value-collapsing maps.
        let collapse: [fn(f64) -> f64; 4] = [|v| v, |v| (v / 2.0).ceil(), |v| v.min(3.0), |_| 1.0];
        for n in [5usize, 6] {
            let perms = permutations(n);
            for x in &perms {
                for y in &perms {
                    for map in collapse {
                        let tied: Vec<f64> = x.iter().map(|&v| map(v)).collect();
                        let got = kendall_tau_b_values(&tied, y).unwrap();
                        let expected = tau_oracle(&tied, y);
                        match (got, expected) {
                            (None, None) => {}
                            (Some(g), Some(e)) => assert!((g - e).abs() < 1e-12),
                            other => panic!("mismatch: {other:?}"),
                        }
                    }
                }
            }
        }
        assert!(
            start.elapsed() < Duration::from_secs(30),
            "budget exceeded: {:?}",
            start.elapsed()
        );
    });
}

// ---------------------------------------------------------------------------
// 4. Aggregation statistics against sort-based and two-pass oracles.
// ---------------------------------------------------------------------------
#[test]
fn c4_aggregation_oracles() {
    criterion("C4 aggregation-oracles", || {
        let mut rng = ChaCha8Rng::seed_from_u64(404);
        for round in 0..500 {
            let n = rng.gen_range(1..200);
            let values: Vec<f64> = (0..n)
                .map(|_| {
                    if round % 3 == 0 {
                        // Integer-heavy arrays exercise ties.
                        f64::from(rng.gen_range(0..20)) * 5.0
                    } else {
                        rng.gen_range(0.0..100.0)
                    }
                })
                .collect();
            let mut sorted = values.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());

            // Sort-based oracles.
            let median_oracle = if n % 2 == 1 {
                sorted[n / 2]
            } else {
                (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
            };
            let quantile_oracle = |p: f64| {
                let h = (n as f64 - 1.0) * p;
                let lo = h.floor() as usize;
                let g = h - lo as f64;
                if lo + 1 < n {
                    (1.0 - g) * sorted[lo] + g * sorted[lo + 1]
                } else {
                    sorted[lo]
                }
            };
            let p95_oracle = sorted[((0.95_f64 * n as f64).ceil() as usize).max(1) - 1];
            // Two-pass oracle.
            let mean = values.iter().sum::<f64>() / n as f64;
            let stddev_oracle = if n < 2 {
                0.0
            } else {
                (values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0))
                    .sqrt()
            };

            assert!((stats::median(&values).unwrap() - median_oracle).abs() < 1e-9);
            let (q1, med, q3) = stats::quartiles(&values).unwrap();
            assert!((q1 - quantile_oracle(0.25)).abs() < 1e-9);
            assert!((med - median_oracle).abs() < 1e-9);
            assert!((q3 - quantile_oracle(0.75)).abs() < 1e-9);
            assert!((stats::sample_stddev(&values).unwrap() - stddev_oracle).abs() < 1e-9);
            assert!((stats::p95_nearest_rank(&values).unwrap() - p95_oracle).abs() < 1e-9);
        }
    });
}

// ---------------------------------------------------------------------------
// 5. Determinism and stability on the bundled fixture.
// ---------------------------------------------------------------------------
#[test]
fn c5_determinism_and_stability() {
    criterion("C5 determinism-and-stability", || {
        // Every (note, validated rubric) pair scores with range 0.00 across
        // three reference-scorer runs.
        let dir = tempfile::tempdir().unwrap();
        let manifest = fixture_manifest(dir.path());
        let mut dataset = load_dataset(&manifest).unwrap();
        run(&manifest, Mode::Validate, &pinned_options(2)).unwrap();
        // Reload statuses decided by the gate.
        let statuses: BTreeMap<String, bool> =
            std::fs::read_to_string(dir.path().join("validation_results.jsonl"))
                .unwrap()
                .lines()
                .map(|line| {
                    let v: serde_json::Value = serde_json::from_str(line).unwrap();
                    (
                        v["rubric_id"].as_str().unwrap().to_string(),
                        v["accepted"].as_bool().unwrap(),
                    )
                })
                .collect();
        for (rubric_id, accepted) in &statuses {
            let rubric = dataset.rubrics.get_mut(rubric_id).unwrap();
            rubric.status = if *accepted {
                RubricStatus::Validated
            } else {
                RubricStatus::Rejected
            };
        }

        let options = ScoreOptions::new(3, Utc::now());
        let mut pairs = 0usize;
        for rubric in dataset
            .rubrics
            .values()
            .filter(|r| r.status == RubricStatus::Validated)
        {
            let case = &dataset.cases[&rubric.case_id];
            for note in dataset
                .notes
                .values()
                .filter(|n| n.case_id == rubric.case_id)
            {
                let records = score_note(note, rubric, case, &ReferenceScorer, &options).unwrap();
                let stat = stability_range(&records).unwrap();
                assert_eq!(
                    stat.score_range, 0.0,
                    "{}|{}",
                    note.note_id, rubric.rubric_id
                );
                pairs += 1;
            }
        }
        assert_eq!(pairs, 330, "expected 33 validated rubrics x 10 notes");

        // Two full pipeline runs with different worker counts are
        // byte-identical. The run timestamp is pinned; run_meta.json is the
        // one file excluded since it records the worker count itself.
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        run(
            &fixture_manifest(dir_a.path()),
            Mode::Full,
            &pinned_options(1),
        )
        .unwrap();
        run(
            &fixture_manifest(dir_b.path()),
            Mode::Full,
            &pinned_options(6),
        )
        .unwrap();
        let mut names: Vec<String> = std::fs::read_dir(dir_a.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().to_string())
            .filter(|n| n != "run_meta.json")
            .collect();
        names.sort();
        assert!(names.contains(&"scores.jsonl".to_string()));
        for name in names {
            let a = std::fs::read(dir_a.path().join(&name)).unwrap();
            let b = std::fs::read(dir_b.path().join(&name)).unwrap();
            assert_eq!(a, b, "artifact {name} differs between worker counts");
        }
    });
}

// ---------------------------------------------------------------------------
// 6. Full-pipeline fixture replay against the precomputed bundle.
// ---------------------------------------------------------------------------
#[test]
fn c6_fixture_replay_matches_expected_bundle() {
    criterion("C6 fixture-replay-bundle", || {
        let start = Instant::now();
        let dir = tempfile::tempdir().unwrap();
        let manifest = fixture_manifest(dir.path());
        run(&manifest, Mode::Full, &pinned_options(4)).unwrap();

        // Byte-exact report reproduction.
        for artifact in [
            "rubric_status.csv",
            "discrimination.csv",
            "discrimination_summary.csv",
            "stability_summary.csv",
            "table2.csv",
            "quantiles.csv",
            "table3.csv",
            "agreement_detail.csv",
            "ceiling.csv",
            "vendor_preference.csv",
            "cost_report.csv",
        ] {
            let got = std::fs::read_to_string(dir.path().join(artifact)).unwrap();
            let expected = std::fs::read_to_string(expected_dir().join(artifact)).unwrap();
            assert_eq!(
                got, expected,
                "artifact {artifact} deviates from the precomputed bundle"
            );
        }

        let expected = expected_values();

        // Validation decisions and margins.
        let validation_lines =
            std::fs::read_to_string(dir.path().join("validation_results.jsonl")).unwrap();
        let mut seen = 0;
        for line in validation_lines.lines() {
            let got: serde_json::Value = serde_json::from_str(line).unwrap();
            let rubric_id = got["rubric_id"].as_str().unwrap();
            let want = &expected["validation"][rubric_id];
            assert_eq!(
                got["accepted"].as_bool(),
                want["accepted"].as_bool(),
                "{rubric_id}"
            );
            assert_eq!(got["best_note_id"], want["best_note_id"], "{rubric_id}");
            assert_eq!(got["worst_note_id"], want["worst_note_id"], "{rubric_id}");
            let margin = got["separation_margin"].as_f64().unwrap();
            assert!(
                (margin - want["margin"].as_f64().unwrap()).abs() < 1e-9,
                "{rubric_id}"
            );
            seen += 1;
        }
        assert_eq!(seen, 24);

        // Per-(note, rubric) mean scores.
        let scores = load_scores(&dir.path().join("scores.jsonl")).unwrap();
        assert_eq!(
            scores.len(),
            expected["counts"]["score_records"].as_u64().unwrap() as usize
        );
        let mut by_pair: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for record in &scores {
            by_pair
                .entry(format!("{}|{}", record.note_id, record.rubric_id))
                .or_default()
                .push(record.normalized_score);
        }
        let expected_means = expected["mean_scores"].as_object().unwrap();
        assert_eq!(by_pair.len(), expected_means.len());
        for (key, runs) in &by_pair {
            let mean = runs.iter().sum::<f64>() / runs.len() as f64;
            let want = expected_means[key].as_f64().unwrap();
            assert!(
                (mean - want).abs() < 1e-9,
                "mean score for {key}: {mean} vs {want}"
            );
        }

        // Agreement records, order and values.
        let agreement_lines =
            std::fs::read_to_string(dir.path().join("agreement_records.jsonl")).unwrap();
        let want_records = expected["agreement_records"].as_array().unwrap();
        let got_records: Vec<serde_json::Value> = agreement_lines
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(got_records.len(), want_records.len());
        for (got, want) in got_records.iter().zip(want_records) {
            for key in [
                "case_id",
                "experiment_id",
                "pair_kind",
                "rubric_a",
                "rubric_b",
            ] {
                assert_eq!(got[key], want[key], "agreement field {key}");
            }
            match (got["tau"].as_f64(), want["tau"].as_f64()) {
                (None, None) => {}
                (Some(g), Some(w)) => assert!((g - w).abs() < 1e-9, "tau: {g} vs {w}"),
                other => panic!("tau degeneracy mismatch: {other:?}"),
            }
            let g = got["mean_rank_diff"].as_f64().unwrap();
            let w = want["mean_rank_diff"].as_f64().unwrap();
            assert!((g - w).abs() < 1e-9);
        }

        assert!(
            start.elapsed() < Duration::from_secs(10),
            "budget exceeded: {:?}",
            start.elapsed()
        );
    });
}

// ---------------------------------------------------------------------------
// 7. Cost ledger reproduces the published per-rubric economics.
// ---------------------------------------------------------------------------
#[test]
fn c7_cost_ledger_reproduction() {
    criterion("C7 cost-ledger-reproduction", || {
        let clinician = clinician_cost(919.0, 3108, 100.0).unwrap();
        assert!(
            (clinician.minutes_per_rubric - 17.7).abs() <= 0.1,
            "minutes per rubric {} outside 17.7 +/- 0.1",
            clinician.minutes_per_rubric
        );
        assert!(
            (clinician.cost_per_rubric - 29.50).abs() <= 0.10,
            "cost per rubric {} outside 29.50 +/- 0.10",
            clinician.cost_per_rubric
        );

        // The documented price fixture shipped with the engine.
        let entry = caseval_cli::manifest::load_price_entry(
            &Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/prices.toml"),
            "rubricgen-1",
        )
        .unwrap();
        let spend = TokenSpend {
            model_id: "rubricgen-1".to_string(),
            input_tokens: 2_050_000,
            output_tokens: 1_230_000,
            price_per_m_input: entry.price_per_m_input,
            price_per_m_output: entry.price_per_m_output,
            reasoning_multiplier: entry.reasoning_multiplier,
        };
        let llm = llm_cost(&spend, 823).unwrap();
        assert!(
            (llm.cost_per_rubric - 0.02).abs() <= 0.005,
            "llm per-rubric cost {} outside 0.02 +/- 0.005",
            llm.cost_per_rubric
        );

        let ratio = cost_ratio(clinician.cost_per_rubric, llm.cost_per_rubric).unwrap();
        assert!(
            (1000.0..=2000.0).contains(&ratio),
            "cost ratio {ratio} outside [1000, 2000]"
        );
    });
}

// ---------------------------------------------------------------------------
// 8. Net preference rates from published percentages.
// ---------------------------------------------------------------------------
#[test]
fn c8_net_preference_rates() {
    criterion("C8 net-preference-rates", || {
        let anthropic = VendorPreference::from_percentages(Vendor::Anthropic, 1646, 72.1, 27.9);
        assert!(
            (anthropic.net_rate - 44.2).abs() < 1e-9,
            "net {}",
            anthropic.net_rate
        );
        assert_eq!(format!("{:+.1}", anthropic.net_rate), "+44.2");

        let openai = VendorPreference::from_percentages(Vendor::Openai, 1646, 56.8, 43.2);
        assert!(
            (openai.net_rate - 13.6).abs() < 1e-9,
            "net {}",
            openai.net_rate
        );
        assert_eq!(format!("{:+.1}", openai.net_rate), "+13.6");
    });
}

// ---------------------------------------------------------------------------
// Fixture sanity: the loaded dataset matches the documented inventory.
// ---------------------------------------------------------------------------
#[test]
fn fixture_inventory_matches_expected_counts() {
    let manifest = fixture_manifest(Path::new("/tmp"));
    let dataset = load_dataset(&manifest).unwrap();
    let expected = expected_values();
    assert_eq!(
        dataset.cases.len() as u64,
        expected["counts"]["cases"].as_u64().unwrap()
    );
    assert_eq!(
        dataset.notes.len() as u64,
        expected["counts"]["notes"].as_u64().unwrap()
    );
    let clinician = dataset
        .rubrics
        .values()
        .filter(|r| r.source == RubricSource::Clinician)
        .count() as u64;
    assert_eq!(
        clinician,
        expected["counts"]["clinician_rubrics"].as_u64().unwrap()
    );
}
