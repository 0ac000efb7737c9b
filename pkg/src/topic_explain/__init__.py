"""Topic-level global explanations of text classifiers, and model comparison."""

__version__ = "0.1.0"

from .aggregate import (
    OTHER_LABEL,
    AggregationPath,
    ExplanationMetadata,
    GlobalTopicExplanation,
    GlobalWordImportance,
    LocalTopicExplanation,
    WeightingScheme,
    explain,
    global_from_local,
    global_word_importance,
    local_topic_importance,
    local_word_importance,
    topic_importance,
)
from .attribution import (
    InstanceAttribution,
    TokenAttribution,
    WordLocalValues,
    aggregate_tokens_to_words,
    dumps_attributions,
    ingest_attributions,
    load_attributions,
    make_instance,
    spans_from_offsets,
)
from .compare import (
    ComparisonReport,
    NormalizedExplanation,
    ResidualExplanation,
    compare,
    l1_normalize,
    rank_topics,
    residual,
)
from .report import render_report
from .shapley import ToyModel, exact_shapley, sampled_shapley
from .text_core import PUNCT_WORD, CorpusCounts, Vocabulary, build_vocabulary, normalize_word
from .topics import (
    Lexicon,
    TopicMembership,
    TopicModel,
    compute_stopwords,
    lda_membership,
    lda_train,
    lexicon_membership,
    parse_lexicon,
)
