"""Facet-aware evaluation for extractive summarization."""

from .corpus import (
    DatasetError,
    Fam,
    Sample,
    Sentence,
    SupportGroup,
    SystemOutput,
    dataset_stats,
    filter_by_category,
    load_dataset,
    load_system_output,
    match_text_to_indices,
)
from .metrics import FacetScope, evaluate_system, far, lead_k, oracle_extract, redundancy, sar, support_prf

__version__ = "0.1.0"
