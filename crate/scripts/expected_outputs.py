#!/usr/bin/env python3
"""Independent reference computation of the fixture's expected pipeline outputs.

Reads fixtures/ (never the Rust implementation) and recomputes every report
the pipeline emits, using independent numeric routes where they exist:
scipy.stats.kendalltau for rank agreement, numpy quantile/stddev for
distribution summaries, and direct arithmetic everywhere else. Results are
frozen under crates/cli/tests/expected/ as byte-exact CSV files plus a
full-precision expected_values.json consumed by the acceptance suite.

Each emitted number is checked against a second route (manual pair
enumeration for tau, order-statistic interpolation for quantiles, a running
recurrence for stddev) at the formatted precision, and values sitting within
1e-9 of a decimal rounding boundary are flagged so fixture drift cannot hide
a formatting divergence.
"""

import json
import math
from pathlib import Path

import numpy as np
import tomli
from scipy import stats as sps

ROOT = Path(__file__).resolve().parent.parent
FIX = ROOT / "fixtures"
OUT = ROOT / "crates" / "cli" / "tests" / "expected"

RUNS_PER_RUBRIC = 2
VENDOR_ORDER = ["openai", "anthropic", "other"]

warnings = []


def fmt(value, decimals):
    if value is None:
        return ""
    scaled = value * 10 ** decimals
    frac = abs(scaled - round(scaled))
    if abs(frac - 0.5) < 1e-9:
        warnings.append(f"value {value!r} sits on a .{decimals}f rounding boundary")
    return f"{value:.{decimals}f}"


def load_jsonl(path):
    with open(path) as f:
        return [json.loads(line) for line in f if line.strip()]


def satisfaction(content_lower, evidence):
    return sum(1 for p in evidence if p in content_lower) / len(evidence)


def score(note, rubric):
    lowered = note["content"].lower()
    num = 0.0
    den = 0.0
    for criterion in rubric["criteria"]:
        num += criterion["weight"] * satisfaction(lowered, criterion["evidence"])
        den += criterion["weight"]
    return num / den * 100.0


def median(values):
    v = sorted(values)
    n = len(v)
    return v[n // 2] if n % 2 else (v[n // 2 - 1] + v[n // 2]) / 2.0


def quantile_manual(values, p):
    # Same order-statistic interpolation the engine uses: a + (b - a) * g.
    v = sorted(values)
    h = (len(v) - 1) * p
    lo = math.floor(h)
    hi = math.ceil(h)
    if lo == hi:
        return v[lo]
    return v[lo] + (v[hi] - v[lo]) * (h - lo)


def quantile(values, p, decimals):
    via_numpy = float(np.quantile(np.array(values), p, method="linear"))
    manual = quantile_manual(values, p)
    assert f"{via_numpy:.{decimals}f}" == f"{manual:.{decimals}f}", (
        "quantile routes disagree at formatted precision", p, via_numpy, manual)
    return manual


def stddev(values, decimals):
    if len(values) < 2:
        return 0.0
    via_numpy = float(np.std(np.array(values), ddof=1))
    # Running (Welford) recurrence over the ascending-sorted values, the
    # engine's route.
    count = mean_run = m2 = 0.0
    for x in sorted(values):
        count += 1.0
        delta = x - mean_run
        mean_run += delta / count
        m2 += delta * (x - mean_run)
    welford = math.sqrt(m2 / (count - 1.0))
    assert f"{via_numpy:.{decimals}f}" == f"{welford:.{decimals}f}", (
        "stddev routes disagree at formatted precision", via_numpy, welford)
    return welford


def p95_nearest_rank(values):
    v = sorted(values)
    rank = max(1, math.ceil(0.95 * len(v)))
    return v[rank - 1]


def ranks_from_scores(score_map):
    ranks = {}
    values = list(score_map.values())
    for key, s in score_map.items():
        greater = sum(1 for v in values if v > s)
        equal = sum(1 for v in values if v == s)
        ranks[key] = greater + (equal + 1.0) / 2.0
    return ranks


def tau_b(ranks_a, ranks_b):
    keys = sorted(ranks_a)
    x = [ranks_a[k] for k in keys]
    y = [ranks_b[k] for k in keys]
    # Manual O(n^2) pair enumeration.
    n = len(x)
    total = n * (n - 1) / 2.0
    concordant = discordant = tied_x = tied_y = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            if x[i] == x[j]:
                tied_x += 1
            if y[i] == y[j]:
                tied_y += 1
            if x[i] != x[j] and y[i] != y[j]:
                if (x[i] - x[j]) * (y[i] - y[j]) > 0:
                    concordant += 1
                else:
                    discordant += 1
    denom = (total - tied_x) * (total - tied_y)
    manual = None if denom <= 0 else (concordant - discordant) / math.sqrt(denom)

    via_scipy = sps.kendalltau(x, y, variant="b").statistic
    if manual is None:
        assert math.isnan(via_scipy), "degeneracy disagreement with scipy"
        return None
    assert abs(via_scipy - manual) < 1e-12, (via_scipy, manual)
    assert f"{via_scipy:.4f}" == f"{manual:.4f}"
    return manual


def mean_rank_diff(ranks_a, ranks_b):
    keys = sorted(ranks_a)
    return sum(abs(ranks_a[k] - ranks_b[k]) for k in keys) / len(keys)


def write_csv(name, header, rows, footnotes):
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    lines.extend(f"# {note}" for note in footnotes)
    (OUT / name).write_text("\n".join(lines) + "\n")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    manifest = tomli.loads((FIX / "manifest.toml").read_text())
    experiments = manifest["experiments"]

    cases = {c["case_id"]: c for c in load_jsonl(FIX / "cases.jsonl")}
    notes = load_jsonl(FIX / "notes.jsonl")
    rubrics = {}
    for path in sorted((FIX / "rubrics").glob("*.json")):
        rubric = json.loads(path.read_text())
        rubrics[rubric["rubric_id"]] = rubric

    notes_by_case_exp = {}
    for note in notes:
        notes_by_case_exp.setdefault(
            (note["case_id"], note["experiment_id"]), []
        ).append(note)
    for group in notes_by_case_exp.values():
        group.sort(key=lambda n: n["note_id"])

    values = {"counts": {
        "cases": len(cases),
        "clinician_rubrics": sum(1 for r in rubrics.values() if r["source"] == "clinician"),
        "llm_rubrics": sum(1 for r in rubrics.values() if r["source"] == "llm"),
        "notes": len(notes),
    }}

    # ---- Gate validation over the author's labeled notes (3 identical runs
    # under the deterministic scorer).
    validation = {}
    for rubric_id in sorted(rubrics):
        rubric = rubrics[rubric_id]
        if rubric["source"] != "clinician":
            continue
        best = worst = None
        for note in notes:
            if note["case_id"] != rubric["case_id"]:
                continue
            label = note.get("label")
            if label and label["labeler_id"] == rubric["author_id"]:
                if label["kind"] == "best":
                    best = note
                else:
                    worst = note
        s_best = score(best, rubric)
        s_worst = score(worst, rubric)
        validation[rubric_id] = {
            "best_note_id": best["note_id"],
            "worst_note_id": worst["note_id"],
            "best_score": s_best,
            "worst_score": s_worst,
            "margin": s_best - s_worst,
            "accepted": s_worst < s_best,
        }
    values["validation"] = validation
    accepted = {r for r, v in validation.items() if v["accepted"]}
    values["counts"]["accepted"] = len(accepted)
    values["counts"]["rejected"] = len(validation) - len(accepted)

    status_rows = []
    for rubric_id in sorted(rubrics):
        rubric = rubrics[rubric_id]
        if rubric["source"] == "llm":
            status, margin = "validated", ""
        else:
            v = validation[rubric_id]
            status = "validated" if v["accepted"] else "rejected"
            margin = fmt(v["margin"], 4)
        status_rows.append([rubric_id, rubric["source"], status, margin])
    write_csv("rubric_status.csv",
              ["rubric_id", "source", "status", "separation_margin"],
              status_rows,
              ["margin: min best-note run score minus max worst-note run score across 3 runs",
               "llm-sourced rubrics bypass the best/worst gate and carry no margin"])

    gap_rows = []
    gaps = []
    for rubric_id in sorted(validation):
        v = validation[rubric_id]
        gap = v["best_score"] - v["worst_score"]
        gaps.append(gap)
        gap_rows.append([rubric_id, v["best_note_id"], v["worst_note_id"], fmt(gap, 4)])
    write_csv("discrimination.csv",
              ["rubric_id", "best_note_id", "worst_note_id", "gap"],
              gap_rows,
              ["gap: mean of best-note runs minus mean of worst-note runs on the author's rubric"])
    values["gaps"] = {r: validation[r]["best_score"] - validation[r]["worst_score"]
                      for r in sorted(validation)}
    write_csv("discrimination_summary.csv",
              ["n_rubrics", "mean", "median", "q1", "q3"],
              [[str(len(gaps)),
                fmt(sum(gaps) / len(gaps), 4),
                fmt(median(gaps), 4),
                fmt(quantile(gaps, 0.25, 4), 4),
                fmt(quantile(gaps, 0.75, 4), 4)]],
              ["gap statistics across all gated rubrics (accepted and rejected)"])

    # ---- Experiment scoring: validated rubrics only, RUNS_PER_RUBRIC
    # identical runs per (note, rubric) under the deterministic scorer.
    def usable(rubric):
        return rubric["source"] == "llm" or rubric["rubric_id"] in accepted

    mean_scores = {}
    experiment_scores = {e: [] for e in experiments}
    for (case_id, experiment_id), group in sorted(notes_by_case_exp.items()):
        case_rubrics = [rubrics[r] for r in sorted(rubrics)
                        if rubrics[r]["case_id"] == case_id and usable(rubrics[r])]
        for rubric in case_rubrics:
            for note in group:
                s = score(note, rubric)
                mean_scores[f"{note['note_id']}|{rubric['rubric_id']}"] = s
                experiment_scores[experiment_id].extend([s] * RUNS_PER_RUBRIC)
    values["mean_scores"] = mean_scores
    values["counts"]["score_records"] = sum(len(v) for v in experiment_scores.values())

    table2_rows = []
    quantile_rows = []
    for experiment in experiments:
        scores = experiment_scores[experiment]
        table2_rows.append([
            experiment, str(len(scores)),
            fmt(median(scores), 2),
            fmt(quantile(scores, 0.25, 2), 2),
            fmt(quantile(scores, 0.75, 2), 2),
            fmt(stddev(scores, 2), 2),
        ])
        quantile_rows.append([
            experiment,
            fmt(min(scores), 2),
            fmt(quantile(scores, 0.25, 2), 2),
            fmt(median(scores), 2),
            fmt(quantile(scores, 0.75, 2), 2),
            fmt(max(scores), 2),
        ])
    write_csv("table2.csv",
              ["experiment", "n_records", "median", "q1", "q3", "stddev"],
              table2_rows,
              ["scores: normalized 0-100 scale; every scoring run contributes one record",
               "quartiles: linear interpolation between order statistics; stddev: sample (n-1)"])
    write_csv("quantiles.csv",
              ["experiment", "min", "q1", "median", "q3", "max"],
              quantile_rows,
              ["five-number summaries of normalized scores for external box plots"])
    values["table2"] = {
        e: {"n_records": len(experiment_scores[e]),
            "median": median(experiment_scores[e]),
            "q1": quantile_manual(experiment_scores[e], 0.25),
            "q3": quantile_manual(experiment_scores[e], 0.75),
            "stddev": stddev(experiment_scores[e], 2)}
        for e in experiments
    }

    # ---- Stability: deterministic scorer, so every pair range is zero.
    n_pairs = values["counts"]["score_records"] // RUNS_PER_RUBRIC
    write_csv("stability_summary.csv",
              ["n_pairs", "median", "mean", "p95"],
              [[str(n_pairs), fmt(0.0, 4), fmt(0.0, 4), fmt(0.0, 4)]],
              ["p95: nearest-rank percentile over pair ranges"])

    # ---- Rankings and agreement.
    records = []
    for experiment_id in experiments:
        for case_id in sorted(cases):
            group = notes_by_case_exp[(case_id, experiment_id)]
            rankings = []
            for rubric_id in sorted(rubrics):
                rubric = rubrics[rubric_id]
                if rubric["case_id"] != case_id or not usable(rubric):
                    continue
                score_map = {n["note_id"]: mean_scores[f"{n['note_id']}|{rubric_id}"]
                             for n in group}
                rankings.append((rubric_id, rubric["source"], ranks_from_scores(score_map)))
            clinician = [r for r in rankings if r[1] == "clinician"]
            llm = [r for r in rankings if r[1] == "llm"]
            pairs = []
            for i in range(len(clinician)):
                for j in range(i + 1, len(clinician)):
                    pairs.append((clinician[i], clinician[j], "clin_clin"))
            for c in clinician:
                for l in llm:
                    pairs.append((c, l, "clin_llm"))
            for (id_a, _, ranks_a), (id_b, _, ranks_b), kind in pairs:
                records.append({
                    "case_id": case_id,
                    "experiment_id": experiment_id,
                    "pair_kind": kind,
                    "rubric_a": id_a,
                    "rubric_b": id_b,
                    "tau": tau_b(ranks_a, ranks_b),
                    "mean_rank_diff": mean_rank_diff(ranks_a, ranks_b),
                    "n_notes": len(ranks_a),
                })
    records.sort(key=lambda r: (r["experiment_id"], r["case_id"], r["pair_kind"],
                                r["rubric_a"], r["rubric_b"]))
    values["agreement_records"] = records

    table3_rows = []
    detail_rows = []
    excluded_notes = []
    values["table3"] = {}
    for experiment in experiments:
        per_kind = {"clin_clin": [], "clin_llm": []}
        diffs = {"clin_clin": [], "clin_llm": []}
        counts = {"clin_clin": 0, "clin_llm": 0}
        excluded = 0
        for record in records:
            if record["experiment_id"] != experiment:
                continue
            counts[record["pair_kind"]] += 1
            diffs[record["pair_kind"]].append(record["mean_rank_diff"])
            if record["tau"] is None:
                excluded += 1
            else:
                per_kind[record["pair_kind"]].append(record["tau"])
        clin_clin = median(per_kind["clin_clin"])
        clin_llm = median(per_kind["clin_llm"])
        delta = clin_llm - clin_clin
        table3_rows.append([experiment, fmt(clin_clin, 4), fmt(clin_llm, 4), fmt(delta, 4)])
        excluded_notes.append(f"{experiment}={excluded}")
        values["table3"][experiment] = {
            "clin_clin_median_tau": clin_clin,
            "clin_llm_median_tau": clin_llm,
            "delta": delta,
            "degenerate_excluded": excluded,
        }
        for kind in ["clin_clin", "clin_llm"]:
            kind_excluded = sum(
                1 for r in records
                if r["experiment_id"] == experiment and r["pair_kind"] == kind
                and r["tau"] is None
            )
            detail_rows.append([
                experiment, kind, str(counts[kind]),
                fmt(median(per_kind[kind]), 4),
                fmt(median(diffs[kind]), 4),
                str(kind_excluded),
            ])
    write_csv("table3.csv",
              ["experiment", "clin_clin_median_tau", "clin_llm_median_tau", "delta"],
              table3_rows,
              ["tau: Kendall tau-b (tie-corrected) over per-case note rankings",
               "rankings: mean of scoring runs per (note, rubric), descending, average ranks for ties",
               "clin_llm medians pool both clinician pairings; per-pair records in agreement_records.jsonl",
               "delta: clin_llm median minus clin_clin median",
               "degenerate rankings excluded from medians: " + "; ".join(excluded_notes)])
    write_csv("agreement_detail.csv",
              ["experiment", "pair_kind", "n_records", "median_tau",
               "median_rank_diff", "degenerate_excluded"],
              detail_rows,
              ["per-kind detail behind the convergence table; rank_diff: mean absolute rank difference per case"])

    # ---- Ceiling diagnostics: margins attach to the experiment whose notes
    # were labeled (experiment 1 in this fixture).
    ceiling_rows = []
    for experiment in experiments:
        scores = experiment_scores[experiment]
        margins = []
        for rubric_id in sorted(validation):
            v = validation[rubric_id]
            best_experiment = next(n["experiment_id"] for n in notes
                                   if n["note_id"] == v["best_note_id"])
            if best_experiment == experiment:
                margins.append(v["margin"])
        row = [
            experiment,
            fmt(median(scores), 2),
            fmt(quantile(scores, 0.25, 2), 2),
            fmt(quantile(scores, 0.75, 2), 2),
            fmt(quantile(scores, 0.75, 2) - quantile(scores, 0.25, 2), 2),
            fmt(stddev(scores, 2), 2),
        ]
        if margins:
            row.extend([
                fmt(min(margins), 4),
                fmt(quantile(margins, 0.25, 4), 4),
                fmt(median(margins), 4),
                fmt(quantile(margins, 0.75, 4), 4),
                fmt(max(margins), 4),
            ])
        else:
            row.extend(["", "", "", "", ""])
        ceiling_rows.append(row)
    write_csv("ceiling.csv",
              ["experiment", "median", "q1", "q3", "iqr", "stddev",
               "margin_min", "margin_q1", "margin_median", "margin_q3", "margin_max"],
              ceiling_rows,
              ["score spread per experiment with separation-margin quantiles from gate validations in the window",
               "empty margin cells: no gate validations used notes from this experiment"])

    # ---- Vendor preference over labeling events.
    events = []
    for (case_id, experiment_id), group in sorted(notes_by_case_exp.items()):
        vendors = {n["vendor"] for n in group}
        by_labeler = {}
        for note in group:
            label = note.get("label")
            if label:
                entry = by_labeler.setdefault(label["labeler_id"], {})
                entry[label["kind"]] = note["vendor"]
        for labeler_id in sorted(by_labeler):
            events.append({
                "vendors": vendors,
                "best": by_labeler[labeler_id].get("best"),
                "worst": by_labeler[labeler_id].get("worst"),
            })
    vendor_rows = []
    values["vendor"] = {}
    for scope, multi_only in [("when_evaluated", False), ("multi_vendor_only", True)]:
        eligible = [e for e in events if not multi_only or len(e["vendors"]) > 1]
        values["vendor"][scope] = {}
        for vendor in VENDOR_ORDER:
            evaluated = [e for e in eligible if vendor in e["vendors"]]
            if not evaluated:
                continue
            pct_best = 100.0 * sum(1 for e in evaluated if e["best"] == vendor) / len(evaluated)
            pct_worst = 100.0 * sum(1 for e in evaluated if e["worst"] == vendor) / len(evaluated)
            vendor_rows.append([
                scope, vendor, str(len(evaluated)),
                fmt(pct_best, 2), fmt(pct_worst, 2), fmt(pct_best - pct_worst, 2),
            ])
            values["vendor"][scope][vendor] = {
                "times_evaluated": len(evaluated),
                "pct_best": pct_best,
                "pct_worst": pct_worst,
                "net_rate": pct_best - pct_worst,
            }
    write_csv("vendor_preference.csv",
              ["scope", "vendor", "times_evaluated", "pct_best", "pct_worst", "net_rate"],
              vendor_rows,
              ["when_evaluated: labelings in which the vendor had a candidate note",
               "multi_vendor_only: restricted to labelings whose candidates span multiple vendors",
               "net_rate: pct_best - pct_worst"])

    # ---- Cost ledger from the manifest's cost configuration.
    costs = manifest["costs"]
    prices = tomli.loads((FIX / costs["prices_path"]).read_text())
    model = prices["models"][costs["generation_model"]]
    effort = load_jsonl(FIX / costs["effort_path"])
    total_hours = sum(e["hours"] for e in effort)
    minutes = 60.0 * total_hours / costs["accepted_rubrics"]
    clin_per_rubric = minutes * costs["hourly_rate"] / 60.0
    llm_total = (costs["input_tokens"] / 1e6 * model["price_per_m_input"]
                 + costs["output_tokens"] / 1e6 * model["reasoning_multiplier"]
                 * model["price_per_m_output"])
    llm_per_rubric = llm_total / costs["generated_rubrics"]
    ratio = clin_per_rubric / llm_per_rubric
    cost_rows = [
        ["clinician_total_hours", fmt(total_hours, 4)],
        ["clinician_evaluators", str(len(effort))],
        ["accepted_rubrics", str(costs["accepted_rubrics"])],
        ["selected_rubrics", str(costs["selected_rubrics"])],
        ["minutes_per_accepted_rubric", fmt(minutes, 4)],
        ["clinician_cost_per_rubric", fmt(clin_per_rubric, 4)],
        ["llm_model", costs["generation_model"]],
        ["llm_input_tokens", str(costs["input_tokens"])],
        ["llm_output_tokens", str(costs["output_tokens"])],
        ["reasoning_multiplier", fmt(model["reasoning_multiplier"], 4)],
        ["price_per_m_input", fmt(model["price_per_m_input"], 4)],
        ["price_per_m_output", fmt(model["price_per_m_output"], 4)],
        ["llm_total_cost", fmt(llm_total, 4)],
        ["llm_generated_rubrics", str(costs["generated_rubrics"])],
        ["llm_cost_per_rubric", fmt(llm_per_rubric, 4)],
        ["clinician_to_llm_cost_ratio", fmt(ratio, 4)],
    ]
    write_csv("cost_report.csv", ["metric", "value"], cost_rows,
              ["token prices and reasoning multiplier are configuration assumptions, recorded with every total",
               "accepted_rubrics counts gate-passing rubrics; selected_rubrics counts those chosen for use"])
    values["cost"] = {
        "total_hours": total_hours,
        "minutes_per_accepted_rubric": minutes,
        "clinician_cost_per_rubric": clin_per_rubric,
        "llm_total_cost": llm_total,
        "llm_cost_per_rubric": llm_per_rubric,
        "ratio": ratio,
    }

    (OUT / "expected_values.json").write_text(json.dumps(values, indent=1) + "\n")

    for w in warnings:
        print(f"WARNING: {w}")
    print(f"expected outputs written to {OUT} "
          f"({values['counts']['score_records']} score records, "
          f"{len(records)} agreement records, "
          f"{values['counts']['accepted']} accepted rubrics)")


if __name__ == "__main__":
    main()
