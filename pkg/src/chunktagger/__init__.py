"""chunktagger: stochastic partial parsing with structural tags.

Depth-limited syntactic structures are encoded as per-word structural
tags, a trigram Markov model is trained over them, and exact Viterbi
decoding recovers chunk boundaries, internal structure and categories
from POS-tagged text, either stand-alone or constrained by annotator-
supplied boundaries.
"""

from .corpus import (
    CorpusFormatError,
    Sentence,
    Token,
    Treebank,
    TreeNode,
    extract_chunks,
    parse_bracketed,
    serialize_sentence,
    serialize_treebank,
    tree_depth,
)
from .encoding import (
    EncodingScheme,
    StructuralTag,
    decode_tags,
    encode_sentence,
    relation_at,
    tag_alphabet,
)
from .model import (
    ChunkModel,
    CountsTable,
    InterpolationWeights,
    collect_counts,
    deleted_interpolation_weights,
    emission_prob,
    load_model,
    save_model,
    transition_prob,
    viterbi_decode,
)
from .chunker import (
    BoundarySpec,
    ChunkerConfig,
    strip_attachments,
    tag_interactive,
    tag_standalone,
    train,
)
from .evaluation import EvalReport, cross_validate, learning_curve, score
from ._kernel import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"
