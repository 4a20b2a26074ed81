"""Legal case retrieval and entailment pipeline.

Stages: corpus loading and splitting, lexical scoring (word-entity duet
features, document similarity, bigram LMIR), a pairwise hinge ranker, a
bigram-LMIR cascade filter, a paragraph-interaction classifier (GRU +
attention over encoder vectors), entailment pair construction, and a
pairwise ranking SVM that combines everything.  Evaluation is micro
precision / recall / F1.
"""

__version__ = "0.1.0"
