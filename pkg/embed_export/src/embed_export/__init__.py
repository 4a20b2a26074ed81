"""Encoder artifacts for the retrieval/entailment pipeline.

Fine-tunes a BERT-style sequence-pair classifier end to end and batch
encodes paragraph-pair requests into the embeddings interchange format the
pipeline consumes (CLS vector plus softmax probabilities per pair).
"""

__version__ = "0.1.0"
