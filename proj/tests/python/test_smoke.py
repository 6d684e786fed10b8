"""Smoke tests for the Python bindings."""

import json
import math

import pytest

import storyaudit


def test_version():
    assert storyaudit.__version__


def test_prompt_corpus():
    prompts = storyaudit.generate_prompts()
    assert len(prompts) == 100
    domains = {}
    for p in prompts:
        domains[p["domain"]] = domains.get(p["domain"], 0) + 1
        assert p["text"].startswith("Write a story, 100 words or less, of")
    assert domains == {"learning": 30, "labor": 30, "love": 40}


def test_gender_mapping():
    assert storyaudit.gender_of(["she", "her"]) == "feminized"
    assert storyaudit.gender_of(["He,"]) == "masculinized"
    assert storyaudit.gender_of(["they"]) == "non-binary"
    assert storyaudit.gender_of(["she", "they"]) == "unsure"
    assert storyaudit.gender_of([]) == "unspecified"
    assert storyaudit.pair_of("feminized", "masculinized") == "F-M"
    assert storyaudit.pair_of("masculinized", "feminized") == "F-M"
    assert storyaudit.pair_of("unsure", "feminized") is None


def test_names_and_countries():
    assert storyaudit.first_name("Dr. Thomas") == "thomas"
    assert storyaudit.first_name("Mr.") is None
    assert storyaudit.classify_country("Fiji") == "nhpi"
    assert storyaudit.classify_country("Egypt") == "mena"
    assert storyaudit.classify_country("France") == "other"


def test_wilson():
    low, high = storyaudit.wilson_interval(0, 10)
    assert abs(low) < 1e-9
    assert abs(high - 0.27754) < 1e-5
    low, high = storyaudit.wilson_interval(50, 100)
    assert abs(low - 0.40383) < 1e-5
    assert abs(high - 0.59617) < 1e-5
    assert storyaudit.wilson_p_value(50, 100, 0.5) == 1.0


def test_ratio_statistics():
    low, high = storyaudit.log_ratio_interval(10, 100, 20, 100)
    assert abs(low - 0.2466) < 1e-3
    assert abs(high - 1.0137) < 1e-3
    p = storyaudit.p_from_ratio_ci(0.5, low, high)
    assert abs(p - 0.0546) < 1e-3


def test_baselines():
    gender = storyaudit.gender_baseline()
    assert abs(gender["non-binary"] - 0.01710) < 1e-5
    assert abs(sum(gender.values()) - 1.0) < 1e-9
    pairs = storyaudit.pair_baseline()
    assert abs(pairs["F-M"] - 0.9444) < 1e-4
    race = storyaudit.race_baseline()
    assert race["white"] == 0.589


def test_metrics():
    rep = storyaudit.representation_ratio(0.710, 0.589, 15000)
    assert abs(rep["value"] - 1.2054) < 1e-4
    sub = storyaudit.subordination_ratio(2213, 12, 25144, 25144)
    assert abs(sub["value"] - 2213 / 12) < 1e-9
    assert sub["ci_low"] <= sub["value"] <= sub["ci_high"]


def test_tables():
    table = storyaudit.build_voter_table([("Sarah", "White")] * 831 + [("Sarah", "Black")] * 169)
    assert table.likelihood_of("sarah", "white") == pytest.approx(0.831)
    country = storyaudit.build_country_table([("Ahmed", "Egypt")] * 712 + [("Ahmed", "France")] * 288)
    assert country.likelihood_of("ahmed", "mena") == pytest.approx(0.712)


def test_heuristic_extraction():
    characters = storyaudit.heuristic_extract(
        "Maria studied. She passed.", "labor", "neutral", "doctor"
    )
    assert len(characters) == 1
    assert characters[0]["name"] == "Maria"
    assert characters[0]["references"] == ["She"]


def test_label_prompt():
    prompt = storyaudit.build_label_prompt("A tale.", "labor", "neutral", "doctor")
    assert "please extract the name of the doctor" in prompt
    assert '"doctor name": "Unspecified"' in prompt


def test_pipeline_round_trip(tmp_path):
    params = {
        "seed": 5,
        "stories_per_prompt": 2,
        "subordination_odds": 3.0,
        "gender_mix": {"nb": 0.1, "f": 0.5, "m": 0.4},
    }
    params_path = tmp_path / "params.json"
    params_path.write_text(json.dumps(params))
    raw = tmp_path / "raw.jsonl"
    labeled = tmp_path / "labeled.jsonl"
    assert storyaudit.simulate(str(params_path), str(raw)) == 200

    report = storyaudit.run_extraction(str(raw), str(labeled), "heuristic")
    assert report["processed"] == 200
    assert report["labeled"] == 200

    table = storyaudit.build_voter_table(
        [("Zorina", "Hispanic"), ("Zoralio", "Hispanic"), ("Zorbeth", "Hispanic"),
         ("Zoromir", "Hispanic"), ("Quenlyn", "White"), ("Quembert", "White"),
         ("Quinlora", "White"), ("Quomas", "White"), ("Quilbert", "White"),
         ("Quarina", "White"), ("Quedric", "White"), ("Quilda", "White")]
    )
    table_path = tmp_path / "voter.tsv"
    table.save(str(table_path))

    out_dir = tmp_path / "reports"
    summary = storyaudit.analyze(str(labeled), str(table_path), str(out_dir))
    assert summary["instances"] == 200
    assert (out_dir / "representation.tsv").exists()
    assert math.isfinite(summary["coverage"])
