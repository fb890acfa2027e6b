"""Pipeline configuration: one declarative JSON file per experiment.

Paths are resolved relative to the config file's directory. The scorer
endpoint may be overridden by the CONCEPT_FORGE_SCORER_URL environment
variable. Unknown keys are rejected so typos fail fast.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .quintuple import FilterRuleSet
from .scorer import SCORER_URL_ENV

SCORER_KINDS = ("stub", "heuristic", "remote")


@dataclass(frozen=True)
class ScorerConfig:
    kind: str = "heuristic"
    endpoint: str | None = None
    batch_size: int = 64
    timeout: float = 30.0


@dataclass(frozen=True)
class SamplerSettings:
    k: int = 2
    d: int = 5
    max_negatives_per_anchor: int | None = None
    seed: int = 0


@dataclass(frozen=True)
class EvalSettings:
    test_year: int = 0
    clamp_existing: bool = True
    top_k: int | None = 20
    candidate_hops: int | None = None  # defaults to sampler.k
    all_pairs: bool = False


@dataclass(frozen=True)
class QuintupleSettings:
    citation_threshold: int = 2
    split_ratios: tuple[float, float, float] = (0.8, 0.1, 0.1)
    seed: int = 0
    filter_rules: FilterRuleSet = field(default_factory=FilterRuleSet.default)


@dataclass(frozen=True)
class PipelineConfig:
    corpus_path: Path
    vocabulary_path: Path
    t_start: int
    t_end: int
    output_dir: Path
    sampler: SamplerSettings
    scorer: ScorerConfig
    eval: EvalSettings
    quintuple: QuintupleSettings
    analysis_pairs_path: Path | None = None


def _require_keys(obj: dict, allowed: set[str], context: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {context}: {', '.join(sorted(unknown))}")


def _section(payload: dict, name: str) -> dict:
    value = payload.get(name, {})
    if not isinstance(value, dict):
        raise ConfigError(f"section '{name}' must be an object")
    return value


def load_config(path: str | Path, out_override: str | None = None,
                seed_override: int | None = None) -> PipelineConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError("config root must be a JSON object")
    _require_keys(payload, {"corpus", "vocabulary", "years", "output_dir", "sampler",
                            "scorer", "eval", "quintuple", "analysis"}, "config")

    base = path.parent

    def resolve(p: str) -> Path:
        candidate = Path(p)
        return candidate if candidate.is_absolute() else base / candidate

    for required in ("corpus", "vocabulary", "years", "output_dir"):
        if required not in payload:
            raise ConfigError(f"missing required config field '{required}'")

    corpus_path = resolve(payload["corpus"])
    if not corpus_path.is_file():
        raise ConfigError(f"field 'corpus': file not found: {corpus_path}")
    vocabulary_path = resolve(payload["vocabulary"])
    if not vocabulary_path.is_file():
        raise ConfigError(f"field 'vocabulary': file not found: {vocabulary_path}")

    years = payload["years"]
    _require_keys(years, {"start", "end"}, "years")
    try:
        t_start, t_end = int(years["start"]), int(years["end"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"years must carry integer 'start' and 'end': {exc}") from exc
    if t_start > t_end:
        raise ConfigError(f"empty year range [{t_start}, {t_end}]")

    sampler_obj = _section(payload, "sampler")
    _require_keys(sampler_obj, {"k", "d", "max_negatives_per_anchor", "seed"}, "sampler")
    sampler = SamplerSettings(
        k=int(sampler_obj.get("k", 2)),
        d=int(sampler_obj.get("d", 5)),
        max_negatives_per_anchor=sampler_obj.get("max_negatives_per_anchor"),
        seed=int(seed_override if seed_override is not None else sampler_obj.get("seed", 0)),
    )
    if sampler.k < 2 or sampler.d < 1:
        raise ConfigError("sampler requires k >= 2 and d >= 1")

    scorer_obj = _section(payload, "scorer")
    _require_keys(scorer_obj, {"kind", "endpoint", "batch_size", "timeout"}, "scorer")
    endpoint = os.environ.get(SCORER_URL_ENV) or scorer_obj.get("endpoint")
    scorer = ScorerConfig(
        kind=scorer_obj.get("kind", "heuristic"),
        endpoint=endpoint,
        batch_size=int(scorer_obj.get("batch_size", 64)),
        timeout=float(scorer_obj.get("timeout", 30.0)),
    )
    if scorer.kind not in SCORER_KINDS:
        raise ConfigError(f"scorer.kind must be one of {SCORER_KINDS}, got {scorer.kind!r}")
    if scorer.kind == "remote" and not scorer.endpoint:
        raise ConfigError(f"scorer.kind 'remote' needs an endpoint (or set {SCORER_URL_ENV})")

    eval_obj = _section(payload, "eval")
    _require_keys(eval_obj, {"test_year", "clamp_existing", "top_k", "candidate_hops", "all_pairs"},
                  "eval")
    eval_settings = EvalSettings(
        test_year=int(eval_obj.get("test_year", t_end)),
        clamp_existing=bool(eval_obj.get("clamp_existing", True)),
        top_k=eval_obj.get("top_k", 20),
        candidate_hops=eval_obj.get("candidate_hops"),
        all_pairs=bool(eval_obj.get("all_pairs", False)),
    )
    if not t_start < eval_settings.test_year <= t_end + 1:
        raise ConfigError(
            f"eval.test_year {eval_settings.test_year} outside ({t_start}, {t_end + 1}]")

    quintuple_obj = _section(payload, "quintuple")
    _require_keys(quintuple_obj, {"citation_threshold", "split_ratios", "seed", "filter"},
                  "quintuple")
    filter_obj = quintuple_obj.get("filter", {})
    _require_keys(filter_obj, {"keyword_blocklist", "section_blocklist",
                               "numeric_density_threshold", "min_tokens", "max_tokens"}, "filter")
    defaults = FilterRuleSet.default()
    rules = FilterRuleSet(
        keyword_blocklist=tuple(filter_obj.get("keyword_blocklist", defaults.keyword_blocklist)),
        section_blocklist=tuple(filter_obj.get("section_blocklist", defaults.section_blocklist)),
        numeric_density_threshold=float(
            filter_obj.get("numeric_density_threshold", defaults.numeric_density_threshold)),
        min_tokens=int(filter_obj.get("min_tokens", defaults.min_tokens)),
        max_tokens=filter_obj.get("max_tokens", defaults.max_tokens),
    )
    ratios = quintuple_obj.get("split_ratios", [0.8, 0.1, 0.1])
    if not isinstance(ratios, (list, tuple)) or len(ratios) != 3:
        raise ConfigError("quintuple.split_ratios must be a list of three numbers")
    quintuple_settings = QuintupleSettings(
        citation_threshold=int(quintuple_obj.get("citation_threshold", 2)),
        split_ratios=tuple(float(r) for r in ratios),
        seed=int(seed_override if seed_override is not None else quintuple_obj.get("seed", 0)),
        filter_rules=rules,
    )

    analysis_obj = _section(payload, "analysis")
    _require_keys(analysis_obj, {"pairs_path"}, "analysis")
    pairs_path = analysis_obj.get("pairs_path")

    output_dir = Path(out_override) if out_override else resolve(payload["output_dir"])

    return PipelineConfig(
        corpus_path=corpus_path,
        vocabulary_path=vocabulary_path,
        t_start=t_start,
        t_end=t_end,
        output_dir=output_dir,
        sampler=sampler,
        scorer=scorer,
        eval=eval_settings,
        quintuple=quintuple_settings,
        analysis_pairs_path=resolve(pairs_path) if pairs_path else None,
    )
