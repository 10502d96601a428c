"""Label-guided random-walk node embeddings.

Learns per-node label confidences on a partially labelled graph, trains a
tabular Q-function whose rewards favor label-similar neighbors, generates
Q-guided walks, trains skip-gram-with-negative-sampling embeddings on the
walk corpus, and scores node classification with cross-validated k-NN F1.
Uniform and second-order biased walks are included as baselines.
"""

from .confidence import ConfidenceMatrix, init_confidence, learn_confidence, step_confidence
from .corpus import WalkCorpus
from .errors import ParseError, PipelineError, ValidationError
from .evaluate import F1Report, cross_validate, knn_predict, macro_micro_f1
from .graph import (
    Graph,
    LabelAssignment,
    LabelledSplit,
    k_hop_neighborhood,
    parse_edge_list,
    parse_labels,
    split_labelled,
)
from .pipeline import ExperimentConfig, run_pipeline, sweep, synth_graph
from .qlearn import (
    QTable,
    choose_action,
    generate_corpus,
    generate_walk,
    init_q,
    q_epoch,
    reward,
    train_q,
)
from .sgns import (
    EmbeddingMatrix,
    SgnsConfig,
    build_noise_table,
    sgns_pair_step,
    train_sgns,
)
from .walks import BiasParams, baseline_corpus, biased_walk

__version__ = "0.1.0"
