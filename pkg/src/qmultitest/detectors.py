"""POVM constructions for binary and multiple state discrimination.

Contains the optimal binary projective test, the square-root (pretty good)
measurement, the composition that grafts a binary test onto a family of
partial detector elements, and the tensor-split construction that builds a
full multi-copy detector out of two sub-detectors plus a binary test on
the closest pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from . import linalg
from .errors import (
    DimensionCapExceeded,
    DimensionMismatch,
    PartialsEqualIdentity,
    PartialsExceedIdentity,
    PSDViolation,
    SplitTooSmall,
)
from .states import DEFAULT_DIM_CAP, DensityMatrix, Ensemble, tensor_power

TOL_ELEMENT_PSD = 1e-10
TOL_SUM_IDENTITY = 1e-9

SubStrategy = Literal["pgm", "recursive"]


@dataclass(frozen=True)
class Detector:
    """POVM: positive elements, one per hypothesis, summing to identity.

    Elements are stored as read-only copies so detectors stay pure values.
    """

    dim: int
    elements: tuple[np.ndarray, ...]

    def __post_init__(self):
        frozen = []
        for e in self.elements:
            arr = np.array(e, dtype=np.complex128, order="C")
            arr.setflags(write=False)
            frozen.append(arr)
        object.__setattr__(self, "elements", tuple(frozen))


@dataclass(frozen=True)
class CompositionTrace:
    """Intermediate operators of the binary-plus-partials composition.

    ``residual`` is identity minus the partial sum, ``sqrt_defect`` is
    identity minus its square root, and ``reject_1``/``reject_2`` are the
    complements of the binary test's two projections.  The scalar fields
    (filled when the states are supplied) are the three terms of the
    error-decomposition bound: twice the binary overlap trace, twice the
    pair's leakage into the partials, and the partial elements' own
    misses.
    """

    residual: np.ndarray
    sqrt_defect: np.ndarray
    partial_sum: np.ndarray
    reject_1: np.ndarray
    reject_2: np.ndarray
    wedge_trace: float | None = None
    term_wedge: float | None = None
    term_partials: float | None = None
    term_rest: float | None = None


@dataclass(frozen=True)
class SplitReport:
    """Copy-budget split and the two sub-detectors' summed errors."""

    n1: int
    n2: int
    sub_error_1: float
    sub_error_2: float


def check_detector(det: Detector) -> list[str]:
    """Return the list of POVM-validity violations (empty when valid)."""
    problems: list[str] = []
    total = np.zeros((det.dim, det.dim), dtype=np.complex128)
    for k, element in enumerate(det.elements):
        if element.shape != (det.dim, det.dim):
            problems.append(f"element {k} has shape {element.shape}")
            continue
        try:
            values = linalg.eigvalsh(element)
        except Exception as exc:  # non-Hermitian element
            problems.append(f"element {k}: {exc}")
            continue
        if values.size and float(values[0]) < -TOL_ELEMENT_PSD:
            problems.append(
                f"element {k} has negative eigenvalue {values[0]:.3e}"
            )
        total += element
    defect = float(np.max(np.abs(total - np.eye(det.dim))))
    if defect > TOL_SUM_IDENTITY:
        problems.append(f"elements sum to identity only within {defect:.3e}")
    return problems


def validate_detector(det: Detector) -> Detector:
    problems = check_detector(det)
    if problems:
        raise PSDViolation("invalid POVM: " + "; ".join(problems))
    return det


def _hermitize(a: np.ndarray) -> np.ndarray:
    return (a + a.conj().T) / 2.0


def holevo_helstrom(rho1: DensityMatrix, rho2: DensityMatrix) -> Detector:
    """Optimal binary test: project onto where ``rho1 - rho2`` is positive.

    Eigenvalues of the difference within the zero floor are assigned to
    the second outcome, so the first element is the support of the
    strictly positive part.
    """
    if rho1.dim != rho2.dim:
        raise DimensionMismatch(f"dims {rho1.dim} and {rho2.dim} differ")
    w, v = linalg.eigh(rho1.matrix - rho2.matrix)
    keep = (w > linalg.eig_floor(w)).astype(np.float64)
    first = _hermitize((v * keep) @ v.conj().T)
    second = np.eye(rho1.dim) - first
    return validate_detector(Detector(rho1.dim, (first, second)))


def wedge(rho1: DensityMatrix, rho2: DensityMatrix) -> np.ndarray:
    """Self-adjoint overlap operator of the optimal binary test.

    Returns ``rho1 E2 + rho2 E1`` for the test ``{E1, E2}``; its trace is
    the summed error of that test, which equals
    ``1 - trace_norm(rho1 - rho2) / 2``.  The matrix need not be positive.
    """
    test = holevo_helstrom(rho1, rho2)
    first, second = test.elements
    left = rho1.matrix @ second + rho2.matrix @ first
    right = second @ rho1.matrix + first @ rho2.matrix
    defect = float(np.max(np.abs(left - right)))
    if defect > 1e-9:
        raise ArithmeticError(f"overlap operator asymmetry {defect:.3e}")
    return left


def pgm(states: Sequence[DensityMatrix]) -> Detector:
    """Square-root ("pretty good") measurement for equiprobable states.

    With ``S`` the average state, each element is
    ``S^(-1/2) (rho_k / m) S^(-1/2)`` using the pseudo-inverse square root
    on the support of ``S``; the projector onto the kernel of ``S`` is
    split equally among the elements so they sum to the identity.
    """
    if len(states) < 2:
        raise ValueError(f"need at least 2 states, got {len(states)}")
    dim = states[0].dim
    if any(s.dim != dim for s in states):
        raise DimensionMismatch("states live on different dimensions")
    m = len(states)
    avg = sum(s.matrix for s in states) / m
    w, v = linalg.eigh(_hermitize(avg))
    keep = w > linalg.eig_floor(w)
    v_keep = v[:, keep]
    inv_sqrt = (v_keep * (1.0 / np.sqrt(w[keep]))) @ v_keep.conj().T
    kernel_proj = np.eye(dim) - v_keep @ v_keep.conj().T
    # Gram form (rho^(1/2) S^(-1/2))^dag (...) keeps elements positive to
    # machine precision even when S is badly conditioned.
    raw = []
    for s in states:
        b = linalg.sqrt_psd(s.matrix) @ inv_sqrt
        raw.append(_hermitize(b.conj().T @ b / m + kernel_proj / m))
    # Rounding through S^(-1/2) can leave the sum off identity by more
    # than the POVM tolerance when S is nearly singular.  The sum is
    # I + delta with tiny Hermitian delta, so conjugating every element
    # by sum^(-1/2) (identity in exact arithmetic, well conditioned here)
    # restores the resolution of identity while preserving positivity.
    total = _hermitize(sum(raw))
    tw, tv = np.linalg.eigh(total)
    correct = (tv * (1.0 / np.sqrt(tw))) @ tv.conj().T
    elements = tuple(_hermitize(correct @ g @ correct) for g in raw)
    return validate_detector(Detector(dim, tuple(elements)))


def compose_with_binary(
    partials: Sequence[np.ndarray],
    binary: Detector,
    states: tuple[DensityMatrix, DensityMatrix, Sequence[DensityMatrix]] | None = None,
) -> tuple[Detector, CompositionTrace]:
    """Complete partial elements to a full POVM using a binary test.

    The partial elements (one per remaining hypothesis) must sum below the
    identity; the leftover weight ``residual = I - sum`` is handed to the
    binary test by conjugating its two projections with
    ``residual^(1/2)``.  When the hypotheses' states are supplied, the
    trace additionally records the three terms of the error bound.
    """
    if len(binary.elements) != 2:
        raise ValueError("binary detector must have exactly 2 elements")
    dim = binary.dim
    partial_list = [np.asarray(p, dtype=np.complex128) for p in partials]
    if not partial_list:
        raise ValueError("need at least one partial element")
    for k, p in enumerate(partial_list):
        if p.shape != (dim, dim):
            raise DimensionMismatch(f"partial {k} has shape {p.shape}")
        values = np.linalg.eigvalsh(_hermitize(p))
        if values.size and float(values[0]) < -TOL_ELEMENT_PSD:
            raise PSDViolation(f"partial {k} has eigenvalue {values[0]:.3e}")

    partial_sum = _hermitize(sum(partial_list))
    w, v = linalg.eigh(partial_sum)
    if float(w[-1]) > 1.0 + TOL_ELEMENT_PSD:
        raise PartialsExceedIdentity(
            f"partial elements reach eigenvalue {w[-1]!r} > 1"
        )
    residual_values = np.clip(1.0 - w, 0.0, None)
    if float(np.max(residual_values)) <= 1e-12:
        raise PartialsEqualIdentity("partial elements exhaust the identity")
    residual = _hermitize((v * residual_values) @ v.conj().T)
    sqrt_residual = _hermitize((v * np.sqrt(residual_values)) @ v.conj().T)

    def _conjugate(element: np.ndarray) -> np.ndarray:
        # For a projection P, (P sqQ)^dag (P sqQ) = sqQ P sqQ; the Gram
        # form stays positive to machine precision, so prefer it.
        if float(np.max(np.abs(element @ element - element))) <= 1e-9:
            half = element @ sqrt_residual
            return _hermitize(half.conj().T @ half)
        return _hermitize(sqrt_residual @ element @ sqrt_residual)

    first = _conjugate(binary.elements[0])
    second = _conjugate(binary.elements[1])
    detector = validate_detector(
        Detector(dim, (first, second, *partial_list))
    )

    pair_sum_defect = float(np.max(np.abs((first + second) - residual)))
    if pair_sum_defect > TOL_SUM_IDENTITY:
        raise ArithmeticError(
            f"binary elements miss the residual by {pair_sum_defect:.3e}"
        )
    sqrt_defect = np.eye(dim) - sqrt_residual
    # (1 - (1-x)^(1/2))^2 <= x for x in [0, 1], as operators.
    gap = np.linalg.eigvalsh(_hermitize(partial_sum - sqrt_defect @ sqrt_defect))
    if float(gap[0]) < -1e-9:
        raise ArithmeticError(
            f"squared defect exceeds the partial sum by {-gap[0]:.3e}"
        )

    wedge_trace = term_wedge = term_partials = term_rest = None
    reject_1 = np.eye(dim) - binary.elements[0]
    reject_2 = np.eye(dim) - binary.elements[1]
    if states is not None:
        rho1, rho2, rest = states
        if len(rest) != len(partial_list):
            raise ValueError("one state per partial element is required")
        wedge_trace = linalg.real_scalar(
            linalg.trace_product(rho1.matrix, reject_1)
            + linalg.trace_product(rho2.matrix, reject_2)
        )
        term_wedge = 2.0 * wedge_trace
        term_partials = 2.0 * linalg.real_scalar(
            linalg.trace_product(rho1.matrix + rho2.matrix, partial_sum)
        )
        term_rest = sum(
            linalg.real_scalar(
                1.0 - linalg.trace_product(state.matrix, element)
            )
            for state, element in zip(rest, partial_list)
        )

    trace = CompositionTrace(
        residual=residual,
        sqrt_defect=sqrt_defect,
        partial_sum=partial_sum,
        reject_1=reject_1,
        reject_2=reject_2,
        wedge_trace=wedge_trace,
        term_wedge=term_wedge,
        term_partials=term_partials,
        term_rest=term_rest,
    )
    return detector, trace


def can_split(n: int, w1: float) -> bool:
    """Whether ``n`` copies split into two nonempty parts at weight ``w1``."""
    n1 = math.floor(n * w1)
    return n >= 2 and n1 >= 1 and n - n1 >= 1


def _detector_sum_error(
    states: Sequence[DensityMatrix], copies: int, det: Detector, dim_cap: int
) -> float:
    total = 0.0
    for state, element in zip(states, det.elements):
        power = tensor_power(state, copies, dim_cap)
        total += linalg.real_scalar(
            1.0 - linalg.trace_product(power.matrix, element)
        )
    return total


def _sub_detector(
    states: Sequence[DensityMatrix],
    copies: int,
    w1: float,
    strategy: SubStrategy,
    dim_cap: int,
) -> Detector:
    """Detector for ``{state^(x)copies}`` built per the chosen strategy.

    The recursive strategy bottoms out in the binary test for two states
    and falls back to the square-root measurement once the copy budget can
    no longer be split.
    """
    if strategy == "pgm":
        return pgm([tensor_power(s, copies, dim_cap) for s in states])
    if strategy == "recursive":
        if len(states) == 2:
            return holevo_helstrom(
                tensor_power(states[0], copies, dim_cap),
                tensor_power(states[1], copies, dim_cap),
            )
        if can_split(copies, w1):
            detector, _, _ = build_split_detector(
                Ensemble(tuple(states)), copies, w1, "recursive", dim_cap
            )
            return detector
        return pgm([tensor_power(s, copies, dim_cap) for s in states])
    raise ValueError(f"unknown sub-detector strategy {strategy!r}")


def build_split_detector(
    ensemble: Ensemble,
    n: int,
    w1: float = 0.5,
    sub: SubStrategy = "pgm",
    dim_cap: int = DEFAULT_DIM_CAP,
) -> tuple[Detector, CompositionTrace, SplitReport]:
    """Multi-copy detector from a tensor split of the copy budget.

    The budget ``n`` is split as ``n1 = floor(n * w1)``, ``n2 = n - n1``.
    One sub-detector discriminates the first state against the tail states
    on ``n1`` copies, the other the second state against the tail on
    ``n2`` copies; each tail hypothesis gets the tensor product of its two
    sub-elements, and the leftover weight goes to the optimal binary test
    on the first pair's full ``n``-copy states.
    """
    if ensemble.r < 3:
        raise ValueError(f"split construction needs r >= 3, got {ensemble.r}")
    if n < 2:
        raise SplitTooSmall(f"need n >= 2 copies to split, got {n}")
    if not 0.0 < w1 < 1.0:
        raise ValueError(f"w1 must lie in (0, 1), got {w1}")
    if ensemble.dim ** n > dim_cap:
        raise DimensionCapExceeded(
            f"dim {ensemble.dim}^{n} = {ensemble.dim ** n} exceeds cap {dim_cap}"
        )
    n1 = math.floor(n * w1)
    n2 = n - n1
    if n1 < 1 or n2 < 1:
        raise SplitTooSmall(f"weight {w1} leaves an empty part: n1={n1}, n2={n2}")

    first, second = ensemble.states[0], ensemble.states[1]
    tail = list(ensemble.states[2:])
    side_1 = [first, *tail]
    side_2 = [second, *tail]
    sub_1 = _sub_detector(side_1, n1, w1, sub, dim_cap)
    sub_2 = _sub_detector(side_2, n2, w1, sub, dim_cap)
    sub_error_1 = _detector_sum_error(side_1, n1, sub_1, dim_cap)
    sub_error_2 = _detector_sum_error(side_2, n2, sub_2, dim_cap)

    partials = [
        np.kron(sub_1.elements[1 + k], sub_2.elements[1 + k])
        for k in range(len(tail))
    ]
    first_n = tensor_power(first, n, dim_cap)
    second_n = tensor_power(second, n, dim_cap)
    binary = holevo_helstrom(first_n, second_n)
    tail_n = [tensor_power(s, n, dim_cap) for s in tail]
    detector, trace = compose_with_binary(
        partials, binary, states=(first_n, second_n, tail_n)
    )
    return detector, trace, SplitReport(n1, n2, sub_error_1, sub_error_2)


def recursive_detector(
    ensemble: Ensemble,
    n: int,
    w1: float = 0.5,
    dim_cap: int = DEFAULT_DIM_CAP,
) -> Detector:
    """Apply the split construction recursively down to binary tests.

    Two states: the optimal binary test on the ``n``-copy pair.  More
    states: one split level whose sub-detectors are themselves recursive
    (square-root measurement once a sub-budget drops below two copies).
    """
    if ensemble.r == 2:
        return holevo_helstrom(
            tensor_power(ensemble.states[0], n, dim_cap),
            tensor_power(ensemble.states[1], n, dim_cap),
        )
    detector, _, _ = build_split_detector(ensemble, n, w1, "recursive", dim_cap)
    return detector
