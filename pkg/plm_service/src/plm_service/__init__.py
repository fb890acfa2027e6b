"""Reference scorer/verbalizer service for the concept pipeline's wire protocol."""

from .config import MLMFinetuneConfig, Seq2SeqConfig, ServiceConfig, load_service_config
from .mlm import MLMScorer, finetune_mlm, load_mlm_scorer
from .seq2seq import Verbalizer, denoise_then_finetune_seq2seq, load_verbalizer
from .service import create_app, serve
from .vocab import WordVocab, tokenize

__version__ = "0.1.0"
