"""Dice/IoU-optimal segmentation masks from per-pixel probabilities.

Instead of thresholding a probability map at a fixed cut point, rank the
pixels, search for the volume that maximizes the expected Dice (or IoU)
under the induced Poisson-binomial label count, and keep the top-ranked
pixels.  The package ships exact and approximate volume-search algorithms,
metric evaluators, and a reproducible simulation harness.
"""

__version__ = "0.1.0"

from .metrics import EvalSummary, dice_instance, eval_dataset, iou_instance, mdice_eval
from .multiseg import mdice_weights, predict_multi
from .pbdist import (
    DegenerateVarianceError,
    PBMoments,
    SizeCapError,
    pb_moments,
    pb_pmf_exact,
    pb_pmf_fft,
    pb_pmf_without,
    rna_cdf,
    rna_pmf,
    rna_quantile,
)
from .rankdice import (
    RankSegConfig,
    RankedProbs,
    VarianceTooSmallError,
    VolumeSearchResult,
    expected_dice_oracle,
    predict_dice,
    rank_probs,
    score_ba,
    score_exact,
    score_trna,
    shrink_bound,
)
from .rankiou import (
    IoUScoreTable,
    expected_iou_oracle,
    predict_iou,
    score_iou,
    shrink_iou_bound,
)
from .simulate import DecaySpec, SimReport, gen_probmap, run_example1, run_example2, sample_mask
from .tensorio import apply_temperature, read_npy, write_npy

__all__ = [
    "DecaySpec",
    "DegenerateVarianceError",
    "EvalSummary",
    "IoUScoreTable",
    "PBMoments",
    "RankSegConfig",
    "RankedProbs",
    "SimReport",
    "SizeCapError",
    "VarianceTooSmallError",
    "VolumeSearchResult",
    "apply_temperature",
    "dice_instance",
    "eval_dataset",
    "expected_dice_oracle",
    "expected_iou_oracle",
    "gen_probmap",
    "iou_instance",
    "mdice_eval",
    "mdice_weights",
    "pb_moments",
    "pb_pmf_exact",
    "pb_pmf_fft",
    "pb_pmf_without",
    "predict_dice",
    "predict_iou",
    "predict_multi",
    "rank_probs",
    "read_npy",
    "rna_cdf",
    "rna_pmf",
    "rna_quantile",
    "run_example1",
    "run_example2",
    "sample_mask",
    "score_ba",
    "score_exact",
    "score_iou",
    "score_trna",
    "shrink_bound",
    "shrink_iou_bound",
    "write_npy",
]
