"""Concept co-occurrence graph mining and temporal link-prediction tooling."""

from .corpus import (
    ConceptMention,
    ConceptVocabulary,
    CorpusIndex,
    CorpusStore,
    PaperRecord,
    build_index,
    load_corpus,
    load_vocabulary,
    match_concepts,
)
from .graph import (
    ConceptPair,
    EvolvingGraph,
    Snapshot,
    build_evolving_graph,
    k_hop_neighborhood,
    new_edges,
)
from .sampler import (
    Label,
    LinkSample,
    PromptWord,
    SamplerConfig,
    generate_negatives,
    generate_positives,
    prompt_of,
    serialize_sample,
)
from .scorer import (
    HeuristicScorer,
    PairLogits,
    PredictionResult,
    RandomScorer,
    RemoteScorer,
    StubScorer,
    heuristic_score,
    predict_snapshot,
    score_batch,
)
from .evaluation import LinkMetrics, aggregate_metrics, evaluate_prediction
from .quintuple import (
    FilterRuleSet,
    Quintuple,
    QuintupleDataset,
    bind_sentences,
    extract_quintuples,
    filter_quintuples,
    serialize_seq,
    split_dataset,
)
from .textmetrics import bleu, ngram_overlap, rouge_l

__version__ = "0.1.0"
