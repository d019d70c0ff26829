"""Lagrange coded computing: encode a dataset once, evaluate any bounded-degree
polynomial on coded shares, and decode exactly despite stragglers, Byzantine
workers and colluding observers."""

from .errors import *  # noqa: F401,F403
from .field import PrimeField, interpolate, eval_many
from .scheme import SchemeParams, EvalPoints, Variant, feasible, recovery_threshold, make_eval_points
from .codec import build_matrix, encode, encode_repetition, make_pad
from .rsdecode import DecodeBudget, decode_clean, decode_robust, syndromes

__version__ = "0.1.0"
