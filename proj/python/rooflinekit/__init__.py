"""Roofline boundedness classification toolkit (native core)."""

from ._core import (  # noqa: F401
    Boundedness,
    ChiSquaredResult,
    ConfusionMatrix2x2,
    DatasetSample,
    Dim3,
    HardwareSpec,
    KernelLabel,
    KernelProfile,
    Language,
    OpKind,
    ParsedPrediction,
    PromptBundle,
    PromptMode,
    RandomRooflineTask,
    RooflinePoint,
    RooflineTaskPair,
    Rq1Prompt,
    Split,
    __version__,
    accuracy,
    achieved_performance,
    aggregate_label,
    arithmetic_intensity,
    balance,
    balance_point,
    build_rq1_prompt,
    build_zero_shot_prompt,
    chi_squared_independence,
    classify_op,
    count_tokens,
    default_source_allowlist,
    format_prompt_number,
    gen_random_rooflines,
    label_kernel,
    macro_f1,
    mcc,
    parse_classification_response,
    parse_rq1_response,
    prune_by_tokens,
    regularized_gamma_p,
    regularized_gamma_q,
    roofline_ceiling,
    scrape_sources,
    split,
)
