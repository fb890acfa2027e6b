from __future__ import annotations

import json
import random

import pytest

_ACCEPTANCE_RESULTS: list[tuple[str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(name): spec acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is not None and report.when == "call":
        _ACCEPTANCE_RESULTS.append((marker.args[0], "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for name, status in _ACCEPTANCE_RESULTS:
            terminalreporter.write_line(f"{status}: {name}")


CONCEPTS = [f"{a} {b}" for a in ("graph", "deep", "sparse", "causal", "latent")
            for b in ("kernel", "attention", "sampling", "inference", "embedding")]


def make_sample_lines(n: int, seed: int = 3) -> list[str]:
    """Sampler-export JSONL lines in the documented schema, mixed labels."""
    rng = random.Random(seed)
    lines = []
    for _ in range(n):
        u, v = rng.sample(CONCEPTS, 2)
        t = rng.randint(2000, 2010)
        label = "related" if rng.random() < 0.5 else "unrelated"
        prompt = "Existing" if (label == "related" and rng.random() < 0.5) else "Unknown"
        text = f"[CLS] {prompt}: in {t}, {u} is [MASK] to {v}.[SEP]"
        lines.append(json.dumps({"c_u": u, "c_v": v, "t": t, "prompt": prompt,
                                 "label": label, "text": text}))
    return lines


def make_quintuple_lines(n: int, seed: int = 11) -> list[str]:
    rng = random.Random(seed)
    heads = ["graph attention", "sparse coding", "causal discovery", "latent diffusion"]
    tails = ["protein folding", "market dynamics", "climate modeling", "speech synthesis"]
    lines = []
    for i in range(n):
        u, v = rng.choice(heads), rng.choice(tails)
        sent_i = f"Recent work applies {u} to structured data."
        sent_j = f"Studies of {v} rely on large observational records."
        idea = f"We propose combining {u} with {v} to model shared structure."
        seq = f"<HEAD> {u} <TAIL> {v} <SEP> {sent_i} <SEP> {sent_j}"
        lines.append(json.dumps({"p_i": f"r{i}", "p_j": f"s{i}", "p": f"t{i}",
                                 "c_u": u, "c_v": v, "sent_i": sent_i, "sent_j": sent_j,
                                 "idea": idea, "seq": seq}))
    return lines


def make_corpus_lines(n_papers: int, seed: int = 7) -> list[str]:
    rng = random.Random(seed)
    lines = []
    for i in range(n_papers):
        u, v = rng.sample(CONCEPTS, 2)
        lines.append(json.dumps({
            "id": f"c{i}", "year": 2005,
            "sentences": [f"This paper studies {u} and {v} with new estimators.",
                          f"Empirical gains on {v} benchmarks are reported."],
            "references": [],
        }))
    return lines


@pytest.fixture
def samples_file(tmp_path):
    def _write(n=50, seed=3):
        path = tmp_path / "samples.jsonl"
        path.write_text("\n".join(make_sample_lines(n, seed)) + "\n")
        return path

    return _write


@pytest.fixture
def quintuples_file(tmp_path):
    def _write(n=20, seed=11):
        path = tmp_path / "quintuples.jsonl"
        path.write_text("\n".join(make_quintuple_lines(n, seed)) + "\n")
        return path

    return _write


@pytest.fixture
def corpus_file(tmp_path):
    def _write(n_papers=30, seed=7):
        path = tmp_path / "corpus.jsonl"
        path.write_text("\n".join(make_corpus_lines(n_papers, seed)) + "\n")
        return path

    return _write
