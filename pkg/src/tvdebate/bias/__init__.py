"""Topical bias: masked sentence corpus, classifier, attribution, hashtags, panels."""
from .appearance import PartyTable, appearance_bias, extract_hashtags, hashtags_in
from .attribution import TokenScore, attribute_corpus, completeness_gap, integrated_gradients, load_stopwords, rank_tokens
from .classifier import ClassifierConfig, ClassifierError, TextClassifier, train_classifier
from .corpus import BJP, OPP, PARTY, PER, BiasCorpusConfig, build_corpus, dump_corpus, load_corpus, tokenize

__all__ = [
    "BJP", "OPP", "PARTY", "PER", "BiasCorpusConfig", "ClassifierConfig", "ClassifierError", "PartyTable",
    "TextClassifier", "TokenScore", "appearance_bias", "attribute_corpus", "build_corpus", "completeness_gap",
    "dump_corpus", "extract_hashtags", "hashtags_in", "integrated_gradients", "load_corpus", "load_stopwords",
    "rank_tokens", "tokenize", "train_classifier",
]
