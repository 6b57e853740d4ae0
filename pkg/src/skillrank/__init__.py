"""skillrank: rank the skills relevant to a job title.

Pipeline: weak labels from similar-title neighborhoods, a sigmoid linear
head over frozen title embeddings, IDF boosting of specialized skills, and
MAP@k evaluation. See the CLI (`skillrank --help`) for the stage-by-stage
driver.
"""

from .corpus import (
    DatasetSplit,
    TitleRecord,
    generate_synthetic_corpus,
    normalize_title,
    parse_corpus,
    split_dataset,
)
from .embedding import (
    EmbeddingStore,
    NeighborhoodConfig,
    cosine_similarity,
    fallback_embed,
    find_similar,
    load_embedding_store,
)
from .idf import IdfTable, boost_scores, compute_idf
from .model import LinearHead, TrainConfig, forward, load_checkpoint, save_checkpoint, train_head
from .ranker import SkillRanker
from .rankeval import (
    EvalReport,
    RankedSkillList,
    average_precision_at_k,
    mean_average_precision,
    rank_skills,
)
from .weaklabel import WeakLabelSet, build_weak_labels, relative_skill_frequencies

__version__ = "0.1.0"
