"""Bias-audit pipeline for open-ended story generations.

Thin Python surface over the C++ core: prompt corpus generation, gender and
name mapping, fractional likelihood tables, ratio metrics with confidence
intervals, and the file-level pipeline stages.
"""

from ._core import (  # noqa: F401
    LikelihoodTable,
    __version__,
    analyze,
    build_country_table,
    build_label_prompt,
    build_voter_table,
    classify_country,
    corpus_checksum,
    first_name,
    gender_baseline,
    gender_of,
    generate_prompts,
    heuristic_extract,
    load_table,
    log_ratio_interval,
    p_from_ratio_ci,
    pair_baseline,
    pair_of,
    race_baseline,
    representation_ratio,
    run_extraction,
    simulate,
    subordination_ratio,
    wilson_interval,
    wilson_p_value,
)
