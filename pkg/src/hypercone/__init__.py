"""Projective IFS toolkit: multicones, dimension, Lyapunov and separation statistics."""

from .projective import (
    IfsSystem,
    Mat2,
    ProjPoint,
    Word,
    classify,
    contraction_axis,
    mobius_act,
    operator_norm,
    project_act,
    project_derivative,
    word_product,
)
from .multicone import (
    Arc,
    InvarianceCertificate,
    Multicone,
    MulticoneSearch,
    SearchParams,
    arc_image,
    elliptic_certificate,
    find_multicone,
    hyperbolicity_constants,
    verify_strict_invariance,
)

__version__ = "0.1.0"
