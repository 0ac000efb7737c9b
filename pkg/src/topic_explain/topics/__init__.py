from .lda import compute_stopwords, lda_train, read_corpus
from .lexicon import Lexicon, lexicon_membership, load_lexicon, parse_lexicon
from .model import (
    TopicMembership,
    TopicModel,
    dumps_topic_matrix,
    lda_membership,
    load_topic_matrix,
    membership_from_mapping,
    read_topic_matrix,
    write_topic_matrix,
)

__all__ = [
    "Lexicon",
    "TopicMembership",
    "TopicModel",
    "compute_stopwords",
    "dumps_topic_matrix",
    "lda_membership",
    "lda_train",
    "lexicon_membership",
    "load_lexicon",
    "load_topic_matrix",
    "membership_from_mapping",
    "parse_lexicon",
    "read_corpus",
    "read_topic_matrix",
    "write_topic_matrix",
]
