#!/usr/bin/env python3
"""Generate the bundled 12-case synthetic fixture.

Writes fixtures/: cases.jsonl, notes.jsonl, rubrics/*.json, effort.jsonl,
prices.toml, manifest.toml, and canned/ stub completions. Every criterion
carries evidence phrases; note contents are assembled from per-note phrase
selections so the deterministic reference scorer produces engineered,
hand-checkable score patterns (gate accepts and rejects, rank ties, one
fully tied ranking).

The generator asserts its own design goals before writing anything:
phrase containment is exact (a phrase appears in a note iff selected),
engineered gate outcomes hold, and the second experiment scores higher.

Deterministic: fixed RNG seed, sorted iteration everywhere.
"""

import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
FIX = ROOT / "fixtures"

SEED = 20260809
EXPERIMENTS = ["exp-1-baseline", "exp-2-refresh"]
# Note quality targets by position; experiment 2 models an improved system.
QUALITY = {
    "exp-1-baseline": [0.90, 0.15, 0.80, 0.25, 0.55],
    "exp-2-refresh": [0.95, 0.70, 0.90, 0.80, 0.85],
}
EXP2_VENDORS = ["openai", "anthropic", "openai", "anthropic", "openai"]

GENERIC_TEMPLATES = [
    "dose adjusted to {n} mg",
    "heart rate {n} bpm",
    "weight {n} kg recorded",
    "follow-up in {n} days",
    "pain rated {n} of 100",
    "oxygen saturation {n} percent",
    "screening score of {n} points",
    "refill for {n} tablets",
    "lab draw in {n} weeks",
    "blood pressure 1{n} over 82",
    "symptom diary kept for {n} days",
    "sleep averaging {n} hours weekly",
]

CASES = [
    {
        "id": "case-01",
        "theme": "hypertension follow-up",
        "specialty": "primary_care", "encounter_type": "follow_up",
        "length": "medium", "problem_count": "multi", "acuity": "moderate",
        "provenance": "real",
        "templates": ["lisinopril titrated to {n} mg", "home systolic average 1{n}",
                      "sodium intake counseling {n} minutes", "renal panel in {n} weeks"],
        "transcript": [
            ("clinician", "Your home blood pressure log is looking better this month."),
            ("patient", "Mornings are still a little high, maybe one forty."),
            ("clinician", "We can nudge the lisinopril up and recheck labs."),
            ("patient", "That works. Any change to the water pill?"),
            ("clinician", "No, keep the hydrochlorothiazide as is and watch your salt."),
        ],
        "prior_note": "Hypertension, on lisinopril and hydrochlorothiazide. Last visit targets partially met.",
        "context": {
            "conditions": ["essential hypertension", "hyperlipidemia"],
            "medications": ["lisinopril", "hydrochlorothiazide", "atorvastatin"],
            "allergies": ["penicillin"],
            "surgical_history": ["appendectomy"],
            "family_history": ["father with early coronary disease"],
        },
    },
    {
        "id": "case-02",
        "theme": "type 2 diabetes management",
        "specialty": "primary_care", "encounter_type": "follow_up",
        "length": "long", "problem_count": "multi", "acuity": "moderate",
        "provenance": "real",
        "templates": ["metformin continued at {n} mg", "hemoglobin a1c of {n} percent noted",
                      "glucose logs averaging 1{n}", "foot exam documented {n} findings"],
        "transcript": [
            ("clinician", "Your sugars have come down since we added the evening dose."),
            ("patient", "I still spike after big dinners."),
            ("clinician", "Let's review the meal log and repeat the a1c before next visit."),
            ("patient", "Can we also look at my feet? The numbness comes and goes."),
            ("clinician", "Yes, I'll do a monofilament exam today."),
        ],
        "prior_note": "Type 2 diabetes on metformin. A1c trending down. Monofilament exam due.",
        "context": {
            "conditions": ["type 2 diabetes", "obesity"],
            "medications": ["metformin"],
            "allergies": [],
            "surgical_history": [],
            "family_history": ["mother with type 2 diabetes"],
        },
    },
    {
        "id": "case-03",
        "theme": "generalized anxiety intake",
        "specialty": "psychiatry", "encounter_type": "intake",
        "length": "long", "problem_count": "single", "acuity": "moderate",
        "provenance": "synthetic",
        "templates": ["gad-7 total of {n}", "worry episodes {n} times weekly",
                      "sertraline started at {n} mg", "therapy referral within {n} days"],
        "transcript": [
            ("clinician", "Tell me about the worry you mentioned on the phone."),
            ("patient", "It's constant. Work, health, the kids, everything loops."),
            ("clinician", "How is your sleep through all of this?"),
            ("patient", "I lie awake an hour or two most nights."),
            ("clinician", "We'll go through a structured screen and talk about options, including medication and therapy."),
        ],
        "prior_note": "New patient intake scheduled for anxiety symptoms.",
        "context": {
            "conditions": [],
            "medications": [],
            "allergies": [],
            "surgical_history": [],
            "family_history": ["sister with panic disorder"],
        },
    },
    {
        "id": "case-04",
        "theme": "chemotherapy toxicity review",
        "specialty": "oncology", "encounter_type": "treatment_review",
        "length": "medium", "problem_count": "multi", "acuity": "high",
        "provenance": "real",
        "templates": ["neuropathy graded {n} of 100", "cycle {n} tolerated",
                      "antiemetic taken {n} times", "neutrophil count {n} hundred"],
        "transcript": [
            ("clinician", "How did the last cycle treat you?"),
            ("patient", "The nausea was manageable but my fingertips tingle."),
            ("clinician", "That's the oxaliplatin. We'll grade it and may adjust the next dose."),
            ("patient", "Will the tingling go away?"),
            ("clinician", "Usually it improves between cycles; we'll track it closely."),
        ],
        "prior_note": "Colorectal cancer on FOLFOX, cycle four complete. Mild neuropathy reported.",
        "context": {
            "conditions": ["colorectal adenocarcinoma"],
            "medications": ["oxaliplatin", "fluorouracil", "ondansetron"],
            "allergies": ["iodinated contrast"],
            "surgical_history": ["partial colectomy"],
            "family_history": [],
        },
    },
    {
        "id": "case-05",
        "theme": "depression medication check",
        "specialty": "behavioral_health", "encounter_type": "med_check",
        "length": "short", "problem_count": "single", "acuity": "low",
        "provenance": "real",
        "templates": ["phq-9 total of {n}", "escitalopram steady at {n} mg",
                      "side effects resolved after {n} days", "mood tracking {n} entries"],
        "transcript": [
            ("clinician", "It's been six weeks on the new dose. How is your mood?"),
            ("patient", "Brighter. I'm cooking again and seeing friends."),
            ("clinician", "Any side effects lingering?"),
            ("patient", "The early jitteriness faded."),
        ],
        "prior_note": "Major depressive disorder, improving on escitalopram.",
        "context": {
            "conditions": ["major depressive disorder"],
            "medications": ["escitalopram"],
            "allergies": [],
            "surgical_history": [],
            "family_history": ["maternal depression"],
        },
    },
    {
        "id": "case-06",
        "theme": "asthma control visit",
        "specialty": "primary_care", "encounter_type": "follow_up",
        "length": "short", "problem_count": "single", "acuity": "low",
        "provenance": "real",
        "templates": ["act score of {n}", "rescue inhaler used {n} times monthly",
                      "peak flow 3{n} recorded", "spacer technique reviewed {n} steps"],
        "transcript": [
            ("clinician", "How often are you reaching for the rescue inhaler?"),
            ("patient", "Maybe twice a month now, mostly after running."),
            ("clinician", "That's well controlled. Let's verify your technique and keep the controller dose."),
        ],
        "prior_note": "Asthma, mild persistent, on low-dose inhaled corticosteroid.",
        "context": {
            "conditions": ["asthma"],
            "medications": ["budesonide-formoterol", "albuterol"],
            "allergies": ["cats"],
            "surgical_history": [],
            "family_history": ["brother with asthma"],
        },
    },
    {
        "id": "case-07",
        "theme": "acute low back pain",
        "specialty": "primary_care", "encounter_type": "urgent_visit",
        "length": "short", "problem_count": "single", "acuity": "moderate",
        "provenance": "real",
        "templates": ["straight leg raise negative at {n} degrees", "ibuprofen {n}0 mg schedule",
                      "activity restriction {n} days", "red flags screened {n} items"],
        "transcript": [
            ("clinician", "When did the back pain start?"),
            ("patient", "Three days ago, lifting boxes in the garage."),
            ("clinician", "Any numbness, weakness, or trouble with your bladder?"),
            ("patient", "No, just the ache across my lower back."),
            ("clinician", "Good. This pattern looks muscular; we'll treat conservatively."),
        ],
        "prior_note": None,
        "context": {
            "conditions": [],
            "medications": [],
            "allergies": ["sulfa drugs"],
            "surgical_history": [],
            "family_history": [],
        },
    },
    {
        "id": "case-08",
        "theme": "bipolar maintenance",
        "specialty": "psychiatry", "encounter_type": "follow_up",
        "length": "medium", "problem_count": "single", "acuity": "moderate",
        "provenance": "synthetic",
        "templates": ["lithium level 0.{n} reported", "sleep stable {n} nights",
                      "mood chart {n} entries reviewed", "thyroid panel in {n} weeks"],
        "transcript": [
            ("clinician", "Your lithium level came back in range. Any tremor or thirst?"),
            ("patient", "A little thirst, nothing like before."),
            ("clinician", "Sleep holding at eight hours?"),
            ("patient", "Most nights, yes. The mood chart shows two dips but shallow ones."),
            ("clinician", "That's the pattern we want. We'll repeat labs next quarter."),
        ],
        "prior_note": "Bipolar I disorder, euthymic on lithium. Levels therapeutic.",
        "context": {
            "conditions": ["bipolar I disorder", "hypothyroidism"],
            "medications": ["lithium carbonate", "levothyroxine"],
            "allergies": [],
            "surgical_history": [],
            "family_history": ["father with bipolar disorder"],
        },
    },
    {
        "id": "case-09",
        "theme": "heart failure follow-up",
        "specialty": "primary_care", "encounter_type": "follow_up",
        "length": "medium", "problem_count": "multi", "acuity": "high",
        "provenance": "real",
        "templates": ["daily weights varied {n} pounds", "furosemide at {n} mg",
                      "ejection fraction {n} percent on file", "fluid limit {n} deciliters"],
        "transcript": [
            ("clinician", "Any swelling in your ankles this week?"),
            ("patient", "A little by evening, gone by morning."),
            ("clinician", "Your weight log looks steady. Keep the fluid limit and the water pill as prescribed."),
            ("patient", "Should I still weigh myself every day?"),
            ("clinician", "Yes, call if you gain more than three pounds overnight."),
        ],
        "prior_note": "HFrEF, stable on guideline therapy. Weight log reviewed monthly.",
        "context": {
            "conditions": ["heart failure with reduced ejection fraction", "atrial fibrillation"],
            "medications": ["furosemide", "carvedilol", "sacubitril-valsartan", "apixaban"],
            "allergies": [],
            "surgical_history": ["coronary stent"],
            "family_history": [],
        },
    },
    {
        "id": "case-10",
        "theme": "polypharmacy reconciliation",
        "specialty": "primary_care", "encounter_type": "med_reconciliation",
        "length": "long", "problem_count": "multi", "acuity": "low",
        "provenance": "real",
        "templates": ["medication list trimmed to {n} agents", "duplicate therapy flagged {n} times",
                      "pharmacy sync in {n} days", "adherence estimated {n} percent"],
        "transcript": [
            ("clinician", "Let's go through every bottle you brought."),
            ("patient", "The brown bag has all of them, including the vitamins."),
            ("clinician", "I see two stomach pills that do the same thing; we'll stop one."),
            ("patient", "The pharmacy keeps auto-refilling the old one."),
            ("clinician", "I'll send a discontinuation so the refills stop."),
        ],
        "prior_note": "Annual wellness visit completed. Brown-bag reconciliation planned.",
        "context": {
            "conditions": ["gastroesophageal reflux", "osteoarthritis", "hypertension"],
            "medications": ["omeprazole", "famotidine", "acetaminophen", "amlodipine", "multivitamin"],
            "allergies": ["codeine"],
            "surgical_history": ["total knee replacement"],
            "family_history": [],
        },
    },
    {
        "id": "case-11",
        "theme": "chronic migraine",
        "specialty": "neurology", "encounter_type": "follow_up",
        "length": "short", "problem_count": "single", "acuity": "low",
        "provenance": "real",
        "templates": ["headache days down to {n} monthly", "topiramate at {n} mg nightly",
                      "trigger diary {n} entries", "rescue plan within {n} minutes"],
        "transcript": [
            ("clinician", "How many headache days since we started the preventive?"),
            ("patient", "Down to about six a month from fifteen."),
            ("clinician", "Any tingling or word-finding trouble on the medicine?"),
            ("patient", "Some tingling in my fingers the first weeks, better now."),
        ],
        "prior_note": "Chronic migraine, started topiramate taper-up last visit.",
        "context": {
            "conditions": ["chronic migraine"],
            "medications": ["topiramate", "sumatriptan"],
            "allergies": [],
            "surgical_history": [],
            "family_history": ["mother with migraine"],
        },
    },
    {
        "id": "case-12",
        "theme": "survivorship visit",
        "specialty": "oncology", "encounter_type": "survivorship",
        "length": "medium", "problem_count": "multi", "acuity": "low",
        "provenance": "real",
        "templates": ["surveillance imaging in {n} weeks", "tamoxifen year {n} of five",
                      "lymphedema sleeve worn {n} hours", "bone density in {n} months"],
        "transcript": [
            ("clinician", "Two years out from treatment; how are you feeling overall?"),
            ("patient", "Strong. The arm swelling only shows up after long flights."),
            ("clinician", "Keep the sleeve for travel. We'll line up your surveillance imaging and a bone density check."),
            ("patient", "Is the hormone blocker still five years total?"),
            ("clinician", "Yes, three more years, then we reassess."),
        ],
        "prior_note": "Breast cancer survivor on tamoxifen. No evidence of disease.",
        "context": {
            "conditions": ["history of breast carcinoma", "mild lymphedema"],
            "medications": ["tamoxifen"],
            "allergies": [],
            "surgical_history": ["lumpectomy", "sentinel node biopsy"],
            "family_history": ["aunt with breast cancer"],
        },
    },
]

# exp-1 vendor layout per case (positions 1..5). case-03 and case-08 are
# single-vendor so "when evaluated" denominators differ by vendor.
EXP1_VENDORS = {
    "case-01": ["anthropic", "openai", "anthropic", "openai", "openai"],
    "case-02": ["anthropic", "openai", "openai", "anthropic", "openai"],
    "case-03": ["openai"] * 5,
    "case-04": ["openai", "anthropic", "anthropic", "openai", "anthropic"],
    "case-05": ["anthropic", "openai", "anthropic", "openai", "anthropic"],
    "case-06": ["anthropic", "anthropic", "openai", "anthropic", "openai"],
    "case-07": ["openai", "openai", "anthropic", "openai", "anthropic"],
    "case-08": ["anthropic"] * 5,
    "case-09": ["anthropic", "openai", "openai", "anthropic", "openai"],
    "case-10": ["openai", "anthropic", "openai", "anthropic", "anthropic"],
    "case-11": ["anthropic", "openai", "anthropic", "anthropic", "openai"],
    "case-12": ["anthropic", "openai", "anthropic", "openai", "openai"],
}

CRITERIA_COUNTS = {
    "a":   [5, 4, 6, 5, 3, 4, 5, 6, 4, 5, 4, 7],
    "b":   [4, 6, 5, 4, 5, 5, 3, 4, 6, 4, 5, 5],
    "llm": [5, 4, 6, 5, 5, 4, 5, 6, 4, 5, 4, 5],
}

COMPLETENESS_TEXT = "Reward for capturing every clinically material statement from the visit conversation"
NON_REPETITION_TEXT = "Reward for adding only new information beyond the existing chart note"

OTHER_DESCRIPTORS = [
    "documenting the medication change with its exact dose",
    "recording the interval symptom trajectory",
    "noting the agreed follow-up interval",
    "capturing the patient's own words about severity",
    "listing the ordered studies with timing",
    "stating the examination findings relevant to the complaint",
    "recording counseling topics that were actually discussed",
    "reflecting the shared decision about next steps",
    "documenting safety netting and return precautions",
    "tying the plan to the longitudinal problem list",
    "capturing functional impact on daily activities",
    "recording adherence details the patient reported",
]

# Fixed per-(rubric, experiment, note-index) quality overrides driving the
# engineered outcomes. Note indices are 0-based within an experiment.
OVERRIDES = {
    # rubric B of case-06: author's best note scores low, worst scores high -> rejected.
    ("case-06", "b", "exp-1-baseline", 2): 0.15,
    ("case-06", "b", "exp-1-baseline", 3): 0.85,
    # rubric B of case-09: best and worst tie exactly -> rejected at the strict boundary.
    ("case-09", "b", "exp-1-baseline", 2): "tie-pair",
    ("case-09", "b", "exp-1-baseline", 3): "tie-pair",
    # rubric A of case-11: inverted -> rejected.
    ("case-11", "a", "exp-1-baseline", 0): 0.10,
    ("case-11", "a", "exp-1-baseline", 1): 0.85,
    # LLM rubric of case-05: all five exp-2 notes tie -> degenerate ranking.
    ("case-05", "llm", "exp-2-refresh", 0): "flat",
    ("case-05", "llm", "exp-2-refresh", 1): "flat",
    ("case-05", "llm", "exp-2-refresh", 2): "flat",
    ("case-05", "llm", "exp-2-refresh", 3): "flat",
    ("case-05", "llm", "exp-2-refresh", 4): "flat",
    # LLM rubric of case-02: notes 3 and 5 of exp-1 tie -> average ranks.
    ("case-02", "llm", "exp-1-baseline", 2): "tie-pair",
    ("case-02", "llm", "exp-1-baseline", 4): "tie-pair",
}

EXPECTED_REJECTED = {"rub-case-06-b", "rub-case-09-b", "rub-case-11-a"}


def rounded(x):
    return int(x + 0.5)


def main():
    rng = random.Random(SEED)
    FIX.mkdir(exist_ok=True)
    (FIX / "rubrics").mkdir(exist_ok=True)
    (FIX / "canned").mkdir(exist_ok=True)

    all_cases = []
    all_rubrics = []
    all_notes = []
    canned = {}

    for case_index, spec in enumerate(CASES):
        case_id = spec["id"]
        numbers = rng.sample(range(10, 100), 90)
        number_cursor = [0]

        def phrase(template):
            n = numbers[number_cursor[0]]
            number_cursor[0] += 1
            return template.format(n=n)

        templates = spec["templates"] + GENERIC_TEMPLATES
        template_cursor = [0]

        def next_phrase():
            t = templates[template_cursor[0] % len(templates)]
            template_cursor[0] += 1
            return phrase(t)

        author_a = f"clin-{(2 * case_index) % 6 + 1:02d}"
        author_b = f"clin-{(2 * case_index + 1) % 6 + 1:02d}"

        rubrics = {}
        for suffix, author, source in [
            ("a", author_a, "clinician"),
            ("b", author_b, "clinician"),
            ("llm", "rubricgen-1", "llm"),
        ]:
            k = CRITERIA_COUNTS[suffix][case_index]
            criteria = []
            kinds = ["completeness", "non_repetition"] + ["other"] * (k - 2)
            rng.shuffle(kinds)
            other_cursor = 0
            for kind in kinds:
                evidence = [next_phrase() for _ in range(rng.choice([2, 3, 4]))]
                if kind == "completeness":
                    text = COMPLETENESS_TEXT
                elif kind == "non_repetition":
                    text = NON_REPETITION_TEXT
                else:
                    text = "Reward for " + OTHER_DESCRIPTORS[
                        (case_index + other_cursor) % len(OTHER_DESCRIPTORS)
                    ]
                    other_cursor += 1
                criteria.append({
                    "text": text,
                    "weight": rng.randint(1, 5),
                    "kind": kind,
                    "evidence": evidence,
                })
            rubrics[suffix] = {
                "rubric_id": f"rub-{case_id}-{suffix}",
                "case_id": case_id,
                "source": source,
                "author_id": author,
                "criteria": criteria,
                "status": "validated" if source == "llm" else "draft",
            }
        all_rubrics.extend(rubrics.values())

        case_phrases = sorted(
            {p for r in rubrics.values() for c in r["criteria"] for p in c["evidence"]}
        )
        for p in case_phrases:
            for q in case_phrases:
                assert p == q or p not in q, f"phrase collision in {case_id}: {p!r} in {q!r}"

        # Per-note selections. Label-adjacent notes (indices 0..3 of exp-1)
        # use tight jitter so unengineered gates separate cleanly.
        filler = [
            "Patient seen in clinic today.",
            "Interval history reviewed and examination performed.",
            "Plan discussed with the patient, who voices understanding.",
        ]
        for exp_index, experiment in enumerate(EXPERIMENTS):
            for note_index in range(5):
                selections = []
                for suffix, rubric in rubrics.items():
                    override = OVERRIDES.get((case_id, suffix, experiment, note_index))
                    for criterion in rubric["criteria"]:
                        m = len(criterion["evidence"])
                        if override == "flat":
                            k = rounded(0.8 * m)
                        elif override == "tie-pair":
                            k = rounded(0.6 * m)
                        elif override is not None:
                            k = rounded(override * m)
                        else:
                            q = QUALITY[experiment][note_index]
                            jitter = (
                                rng.choice([-0.1, 0.0, 0.1])
                                if exp_index == 0 and note_index < 4
                                else rng.choice([-0.25, -0.1, 0.0, 0.1, 0.25])
                            )
                            qq = min(1.0, max(0.0, q + jitter))
                            k = min(m, rounded(qq * m))
                        chosen = sorted(rng.sample(range(m), k))
                        selections.extend(criterion["evidence"][i] for i in chosen)

                body = " ".join(f"{p.capitalize()}." for p in selections)
                content = f"{filler[0]} {body} {filler[1]} {filler[2]}"
                lowered = content.lower()
                selected_set = set(selections)
                for p in case_phrases:
                    assert (p in lowered) == (p in selected_set), (
                        f"containment mismatch in {case_id}: {p!r}"
                    )

                vendor = (
                    EXP1_VENDORS[case_id][note_index]
                    if exp_index == 0
                    else EXP2_VENDORS[note_index]
                )
                label = None
                if exp_index == 0:
                    label = {
                        0: {"kind": "best", "labeler_id": author_a},
                        1: {"kind": "worst", "labeler_id": author_a},
                        2: {"kind": "best", "labeler_id": author_b},
                        3: {"kind": "worst", "labeler_id": author_b},
                    }.get(note_index)
                note = {
                    "note_id": f"note-{case_id}-e{exp_index + 1}-{note_index + 1}",
                    "case_id": case_id,
                    "experiment_id": experiment,
                    "vendor": vendor,
                    "generator_config": f"{vendor}-notegen/prompt-r{exp_index + 1}",
                    "content": content,
                }
                if label:
                    note["label"] = label
                all_notes.append(note)

        all_cases.append({
            "case_id": case_id,
            "transcript": [
                {"speaker": s, "text": t} for s, t in spec["transcript"]
            ],
            **({"point_in_time_note": spec["prior_note"]} if spec["prior_note"] else {}),
            "context": spec["context"],
            "tags": {
                "specialty": spec["specialty"],
                "encounter_type": spec["encounter_type"],
                "length": spec["length"],
                "problem_count": spec["problem_count"],
                "acuity": spec["acuity"],
            },
            "provenance": spec["provenance"],
        })

        # Canned stub completion for gen_rubrics: five criteria with fresh
        # evidence phrases from the same case pool.
        criteria = []
        for j, kind in enumerate(["completeness", "non_repetition", "other", "other", "other"]):
            if kind == "completeness":
                text = COMPLETENESS_TEXT
            elif kind == "non_repetition":
                text = NON_REPETITION_TEXT
            else:
                text = "Reward for " + OTHER_DESCRIPTORS[(case_index + 5 + j) % len(OTHER_DESCRIPTORS)]
            criteria.append({
                "text": text,
                "weight": rng.randint(1, 5),
                "kind": kind,
                "evidence": [next_phrase() for _ in range(2)],
            })
        canned[case_id] = {
            "text": json.dumps({"criteria": criteria}),
            "input_tokens": 2100 + 13 * case_index,
            "output_tokens": 640 + 7 * case_index,
        }

    verify_design(all_cases, all_rubrics, all_notes)
    write_fixture(all_cases, all_rubrics, all_notes, canned)


def satisfaction(note_content, evidence):
    lowered = note_content.lower()
    return sum(1 for p in evidence if p in lowered) / len(evidence)


def score(note_content, rubric):
    num = sum(c["weight"] * satisfaction(note_content, c["evidence"]) for c in rubric["criteria"])
    den = sum(c["weight"] for c in rubric["criteria"])
    return num / den * 100.0


def verify_design(cases, rubrics, notes):
    notes_by_id = {n["note_id"]: n for n in notes}
    rejected = set()
    for rubric in rubrics:
        if rubric["source"] != "clinician":
            continue
        author = rubric["author_id"]
        best = worst = None
        for note in notes:
            if note["case_id"] != rubric["case_id"]:
                continue
            label = note.get("label")
            if label and label["labeler_id"] == author:
                if label["kind"] == "best":
                    best = note
                else:
                    worst = note
        assert best and worst, f"labels missing for {rubric['rubric_id']}"
        s_best = score(best["content"], rubric)
        s_worst = score(worst["content"], rubric)
        if not s_worst < s_best:
            rejected.add(rubric["rubric_id"])
        if rubric["rubric_id"] == "rub-case-09-b":
            assert s_best == s_worst, "case-09 rubric B must tie exactly"
    assert rejected == EXPECTED_REJECTED, f"gate outcomes drifted: {sorted(rejected)}"

    # Degenerate ranking: all exp-2 notes of case-05 tie under its LLM rubric.
    llm05 = next(r for r in rubrics if r["rubric_id"] == "rub-case-05-llm")
    exp2_scores = {
        score(notes_by_id[f"note-case-05-e2-{i}"]["content"], llm05) for i in range(1, 6)
    }
    assert len(exp2_scores) == 1, "case-05 llm exp-2 ranking must be fully tied"

    # Tie pair: notes 3 and 5 of case-02 exp-1 under its LLM rubric.
    llm02 = next(r for r in rubrics if r["rubric_id"] == "rub-case-02-llm")
    s3 = score(notes_by_id["note-case-02-e1-3"]["content"], llm02)
    s5 = score(notes_by_id["note-case-02-e1-5"]["content"], llm02)
    assert s3 == s5, "case-02 llm exp-1 must contain a tie"

    # Experiment 2 scores higher overall (validated rubrics only).
    valid = [
        r for r in rubrics
        if r["source"] == "llm" or r["rubric_id"] not in EXPECTED_REJECTED
    ]
    by_case = {}
    for r in valid:
        by_case.setdefault(r["case_id"], []).append(r)
    medians = {}
    for experiment in EXPERIMENTS:
        values = []
        for note in notes:
            if note["experiment_id"] != experiment:
                continue
            for r in by_case[note["case_id"]]:
                values.extend([score(note["content"], r)] * 2)
        values.sort()
        medians[experiment] = (values[len(values) // 2 - 1] + values[len(values) // 2]) / 2
    assert medians["exp-2-refresh"] > medians["exp-1-baseline"] + 10, medians
    print(f"design verified: medians {medians}, rejected {sorted(rejected)}")


def write_fixture(cases, rubrics, notes, canned):
    with open(FIX / "cases.jsonl", "w") as f:
        for case in cases:
            f.write(json.dumps(case) + "\n")
    with open(FIX / "notes.jsonl", "w") as f:
        for note in notes:
            f.write(json.dumps(note) + "\n")
    for rubric in rubrics:
        path = FIX / "rubrics" / f"{rubric['rubric_id']}.json"
        path.write_text(json.dumps(rubric, indent=2) + "\n")
    for case_id, completion in sorted(canned.items()):
        (FIX / "canned" / f"{case_id}.json").write_text(
            json.dumps(completion, indent=2) + "\n"
        )

    with open(FIX / "effort.jsonl", "w") as f:
        for i in range(1, 21):
            hours = 46.0 if i <= 18 else 45.5
            f.write(json.dumps({
                "evaluator_id": f"eval-{i:02d}",
                "hours": hours,
                "period_start": "2026-01-05",
                "period_end": "2026-05-29",
            }) + "\n")

    (FIX / "prices.toml").write_text(
        "# Token prices are deployment-time assumptions, recorded alongside every\n"
        "# computed total. Replace with your provider's current published pricing.\n"
        "\n"
        "[models.rubricgen-1]\n"
        "price_per_m_input = 1.00\n"
        "price_per_m_output = 1.95\n"
        "reasoning_multiplier = 5.0\n"
    )

    (FIX / "manifest.toml").write_text(
        "cases_path = \"cases.jsonl\"\n"
        "rubrics_path = \"rubrics\"\n"
        "notes_path = \"notes.jsonl\"\n"
        "experiments = [\"exp-1-baseline\", \"exp-2-refresh\"]\n"
        "output_dir = \"out\"\n"
        "\n"
        "[scorer]\n"
        "mode = \"reference\"\n"
        "\n"
        "[analysis]\n"
        "run_reducer = \"mean\"\n"
        "runs_per_rubric = 2\n"
        "\n"
        "[generation]\n"
        "template_path = \"../templates/rubric_generation.txt\"\n"
        "model_id = \"rubricgen-1\"\n"
        "canned_dir = \"canned\"\n"
        "max_attempts = 3\n"
        "\n"
        "[costs]\n"
        "effort_path = \"effort.jsonl\"\n"
        "accepted_rubrics = 3108\n"
        "selected_rubrics = 1646\n"
        "hourly_rate = 100.0\n"
        "prices_path = \"prices.toml\"\n"
        "generation_model = \"rubricgen-1\"\n"
        "input_tokens = 2050000\n"
        "output_tokens = 1230000\n"
        "generated_rubrics = 823\n"
    )

    counts = (len(cases), len(rubrics), len(notes))
    print(f"fixture written: {counts[0]} cases, {counts[1]} rubrics, {counts[2]} notes")


if __name__ == "__main__":
    main()
