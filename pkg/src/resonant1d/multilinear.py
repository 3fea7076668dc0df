"""Isometry-indexed multilinear functionals and the resonant flow operators.

For an isometry A of R^d the functional

    E_A(f_1, ..., f_{2d}) = int_{R^d} prod_k f_k((Ax)_k) conj(f_{d+k}(x_k)) dx

is the building block of both resonant Hamiltonians: the quintic one is a
weighted circle integral of E over rotations about (1,1,1), the cubic one
a circle integral over rotations about (0,1,1) with two slots pinned to
the Gaussian G(x) = exp(-x^2/2).

Every slot function here is a polynomial times exp(-x^2/2) (Hermite series
or the Gaussian G itself), so the product of all 2d slots carries the
weight exp(-|Ax|^2/2 - |x|^2/2) = exp(-|x|^2) exactly -- A being an
isometry -- and a d-fold tensor Gauss-Hermite rule of per-axis size
d(N-1)+1 integrates E_A *exactly* for band-limited slots.  The evaluators
work with the polynomial factors directly and keep the Gaussian inside
the quadrature weight, so nothing large or tiny is ever formed.

The flow operators come in three independent representations:

* ``time_average``  -- midpoint average of the conjugated nonlinearity over
  [-pi/4, pi/4]; exact on the truncated basis because the discrete
  geometric sums annihilate every oscillation level 0 < |L| < 2M (even L)
  while odd levels die by parity of the symmetrized nodes.
* ``direct_sum``    -- the explicit sum over resonant Hermite tuples
  (selection rule sum of first half = sum of second half).
* ``theta_integral`` (functionals only) -- trapezoid rule on the circle
  representation, which is exact for band-limited inputs because the
  integrand is a trigonometric polynomial of degree at most d(N-1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Sequence

import numpy as np

from .hermite import (
    HermiteState,
    basis_state,
    build_grid,
    gauss_hermite_rule,
    hermite_poly_table,
)

__all__ = [
    "Isometry",
    "GaussianSlot",
    "GAUSSIAN",
    "ResonantConfig",
    "rotation_about",
    "rotation_2d",
    "a_lambda",
    "b_lambda",
    "lambda_to_theta",
    "e_a_eval",
    "t_a_apply",
    "e6_eval",
    "e4_eval",
    "functional_time_average",
    "resonant_apply",
    "stationary_eigenvalue",
    "decompose_isometry",
    "Decomposition",
    "QUINTIC_SHARP",
    "CUBIC_SHARP",
    "QUINTIC_T_BOUND",
    "CUBIC_T_BOUND",
]

# sharp L^2 constants of the two Hamiltonians and the flow-operator bounds
QUINTIC_SHARP = 1.0 / (math.pi * math.sqrt(3.0))
CUBIC_SHARP = 1.0 / math.sqrt(2.0 * math.pi)
QUINTIC_T_BOUND = 2.0 * math.sqrt(3.0) / math.pi
CUBIC_T_BOUND = math.sqrt(8.0 / math.pi)

_AXIS_QUINTIC = np.array([1.0, 1.0, 1.0])
_AXIS_CUBIC = np.array([0.0, 1.0, 1.0])


# ---------------------------------------------------------------------------
# isometries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Isometry:
    """A small real orthogonal matrix, optionally with a declared fixed axis."""

    matrix: np.ndarray
    fixed_axis: np.ndarray | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("isometry matrix must be square")
        if not 1 <= m.shape[0] <= 3:
            raise ValueError("only dimensions up to 3 are supported")
        defect = np.max(np.abs(m.T @ m - np.eye(m.shape[0])))
        if defect > 1e-12:
            raise ValueError(f"matrix is not an isometry (A^T A - I defect {defect:.2e})")
        object.__setattr__(self, "matrix", m)
        m.setflags(write=False)
        if self.fixed_axis is not None:
            axis = np.asarray(self.fixed_axis, dtype=np.float64)
            if np.max(np.abs(m @ axis - axis)) > 1e-12:
                raise ValueError("declared fixed axis is not fixed by the matrix")
            object.__setattr__(self, "fixed_axis", axis)
            axis.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


class GaussianSlot:
    """Sentinel for the fixed Gaussian slot G(x) = exp(-x^2/2).

    Kept analytic (polynomial factor identically 1) rather than truncated
    to Hermite modes, so the combined exp(-|x|^2) weight identity stays
    exact in the tensor quadrature.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "G"


GAUSSIAN = GaussianSlot()

Slot = HermiteState | GaussianSlot


def rotation_about(axis: Sequence[float], theta: float) -> Isometry:
    """Proper rotation of R^3 by theta radians about ``axis`` (Rodrigues)."""
    axis = np.asarray(axis, dtype=np.float64)
    norm = np.linalg.norm(axis)
    if norm == 0.0:
        raise ValueError("rotation axis must be nonzero")
    u = axis / norm
    k = np.array([[0.0, -u[2], u[1]], [u[2], 0.0, -u[0]], [-u[1], u[0], 0.0]])
    m = np.eye(3) + math.sin(theta) * k + (1.0 - math.cos(theta)) * (k @ k)
    return Isometry(m, fixed_axis=u)


def rotation_2d(theta: float) -> Isometry:
    """Rotation of R^2 by theta radians."""
    c, s = math.cos(theta), math.sin(theta)
    return Isometry(np.array([[c, -s], [s, c]]))


def a_lambda(lam: float) -> Isometry:
    """The rational rotation family fixing (1,1,1) that sweeps the quintic circle.

    Denominator lam^2 - lam + 1 >= 3/4, so the formula is total.
    """
    d = lam * lam - lam + 1.0
    m = (
        np.array(
            [
                [lam, 1.0 - lam, lam * lam - lam],
                [lam * lam - lam, lam, 1.0 - lam],
                [1.0 - lam, lam * lam - lam, lam],
            ]
        )
        / d
    )
    return Isometry(m, fixed_axis=_AXIS_QUINTIC / math.sqrt(3.0))


def b_lambda(lam: float) -> Isometry:
    """The rational rotation family fixing (0,1,1) that sweeps the cubic circle."""
    d = 1.0 + lam * lam
    r2 = math.sqrt(2.0)
    m = (
        np.array(
            [
                [-1.0 + lam * lam, lam * r2, -lam * r2],
                [-lam * r2, lam * lam, 1.0],
                [lam * r2, 1.0, lam * lam],
            ]
        )
        / d
    )
    return Isometry(m, fixed_axis=_AXIS_CUBIC / r2)


def lambda_to_theta(lam: float) -> float:
    """Rotation angle of a_lambda: cos(theta) = (3 lam/(lam^2-lam+1) - 1)/2.

    Returns the branch theta in [0, pi]; the trace determines only
    cos(theta), and every use integrates over the full circle, so the sign
    is immaterial (representation tests minimize over +-theta).
    """
    c = 0.5 * (3.0 * lam / (lam * lam - lam + 1.0) - 1.0)
    return math.acos(min(1.0, max(-1.0, c)))


# ---------------------------------------------------------------------------
# tensor quadrature for E_A and T_A
# ---------------------------------------------------------------------------


def _slot_n_modes(slot: Slot) -> int:
    return 1 if isinstance(slot, GaussianSlot) else slot.n_modes


def _slot_poly_values(slot: Slot, pts: np.ndarray) -> np.ndarray:
    """exp(+x^2/2)-compensated slot values at arbitrary points."""
    if isinstance(slot, GaussianSlot):
        return np.ones_like(pts, dtype=np.float64)
    table = hermite_poly_table(slot.n_modes - 1, pts)
    return np.tensordot(slot.coeffs, table, axes=(0, 0))


@lru_cache(maxsize=64)
def _unit_rule(q: int):
    return gauss_hermite_rule(q)


def _axis_shape(d: int, axis: int, q: int) -> tuple[int, ...]:
    shape = [1] * d
    shape[axis] = q
    return tuple(shape)


def e_a_eval(iso: Isometry, slots: Sequence[Slot], q_nodes: int | None = None) -> complex:
    """E_A by d-dimensional tensor Gauss-Hermite quadrature (unit scale).

    Exact for band-limited slots with the default per-axis node count
    Q = d(N-1)+1.
    """
    d = iso.dim
    if len(slots) != 2 * d:
        raise ValueError(f"E_A over R^{d} takes {2 * d} slots, got {len(slots)}")
    n_max = max(_slot_n_modes(s) for s in slots)
    q = q_nodes if q_nodes is not None else d * (n_max - 1) + 1
    y, w = _unit_rule(q)
    a = iso.matrix
    # product of the rotated (first-half) slots on the full tensor grid
    val = None
    for k in range(d):
        u_k = reduce(
            np.add,
            (a[k, j] * y.reshape(_axis_shape(d, j, q)) for j in range(d)),
        )
        v = _slot_poly_values(slots[k], u_k)
        val = v if val is None else val * v
    # the conjugated slots are axis-aligned: fold their 1-d values into the
    # per-axis weight factors
    for j in range(d):
        factor = w * np.conj(_slot_poly_values(slots[d + j], y))
        val = val * factor.reshape(_axis_shape(d, j, q))
    return complex(val.sum())


def t_a_apply(
    iso: Isometry,
    inputs: Sequence[Slot],
    n_modes: int | None = None,
    q_nodes: int | None = None,
) -> HermiteState:
    """The multilinear operator dual to E_A.

    Defined by <T_A(f_1..f_{2d-1}), g> = 2 sum_k E_A(..., g inserted in the
    k-th conjugate slot, ...); assembled mode by mode with g = phi_m.
    ``inputs`` order: the d rotated slots first, then the d-1 remaining
    conjugate slots.
    """
    d = iso.dim
    if len(inputs) != 2 * d - 1:
        raise ValueError(f"T_A over R^{d} takes {2 * d - 1} inputs, got {len(inputs)}")
    state_modes = [s.n_modes for s in inputs if isinstance(s, HermiteState)]
    n_out = n_modes if n_modes is not None else max(state_modes, default=1)
    n_max = max([n_out] + [_slot_n_modes(s) for s in inputs])
    q = q_nodes if q_nodes is not None else d * (n_max - 1) + 1
    y, w = _unit_rule(q)
    a = iso.matrix
    rotated = None
    for k in range(d):
        u_k = reduce(
            np.add,
            (a[k, j] * y.reshape(_axis_shape(d, j, q)) for j in range(d)),
        )
        v = _slot_poly_values(inputs[k], u_k)
        rotated = v if rotated is None else rotated * v
    conj_vals = [np.conj(_slot_poly_values(s, y)) for s in inputs[d:]]
    # for each insertion axis, collapse every other axis into its weights
    vec_total = np.zeros(q, dtype=np.complex128)
    for i in range(d):
        t = rotated
        for j in range(d):
            if j == i:
                factor = w
            else:
                # conjugate slots in axis order skip the insertion axis
                s_idx = j if j < i else j - 1
                factor = w * conj_vals[s_idx]
            t = t * factor.reshape(_axis_shape(d, j, q))
        vec_total += t.sum(axis=tuple(j for j in range(d) if j != i))
    out_table = hermite_poly_table(n_out - 1, y)  # conj(phi_m) poly part is real
    return HermiteState(2.0 * (out_table @ vec_total))


# ---------------------------------------------------------------------------
# Hermite interaction tensors (selection-rule routes)
# ---------------------------------------------------------------------------

_DIRECT_SUM_LIMIT = 12


@lru_cache(maxsize=8)
def _product_tensor(n_modes: int, k: int) -> np.ndarray:
    """J[n_1..n_{2k+2}] = int prod phi_{n_i} dx on the exact arity grid."""
    grid = build_grid(n_modes, k)
    b = grid.basis_vals
    n, q = b.shape
    p = b
    for _ in range(k):
        p = (p[:, None, :] * b[None, :, :]).reshape(-1, q)
    j = (p * grid.comp_weights) @ p.T
    return j.reshape((n,) * (2 * k + 2))


@lru_cache(maxsize=8)
def _masked_tensor(n_modes: int, k: int) -> np.ndarray:
    """The product tensor with non-resonant tuples zeroed.

    Level L = (n_1+..+n_{k+1}) - (n_{k+2}+..+n_{2k+2}); only L = 0 survives
    the time average.
    """
    j = _product_tensor(n_modes, k)
    idx = np.arange(n_modes)
    arity = 2 * k + 2
    level = np.zeros((1,) * arity, dtype=np.int64)
    for pos in range(arity):
        sign = 1 if pos <= k else -1
        level = level + sign * idx.reshape(_axis_shape(arity, pos, n_modes))
    return np.where(level == 0, j, 0.0)


def _check_direct_sum_size(n_modes: int, k: int) -> None:
    if n_modes > _DIRECT_SUM_LIMIT:
        raise ValueError(
            f"the O(N^{2 * k + 2}) resonant sum is capped at N <= {_DIRECT_SUM_LIMIT}; got N = {n_modes}"
        )


# ---------------------------------------------------------------------------
# the quintic and cubic functionals
# ---------------------------------------------------------------------------


def _as_states(slots, count, what) -> list[HermiteState]:
    slots = list(slots)
    if len(slots) != count or not all(isinstance(s, HermiteState) for s in slots):
        raise ValueError(f"{what} takes exactly {count} Hermite states")
    return slots


def e6_eval(
    slots: Sequence[HermiteState],
    route: str = "theta_integral",
    m_theta: int = 64,
) -> complex:
    """The quintic functional E_6(f_1..f_6).

    theta_integral: (1/(2 sqrt(3) pi^2)) int_0^{2pi} E_{R(theta)} dtheta by
    the M_theta-point trapezoid rule; the integrand is a trigonometric
    polynomial of degree <= 3(N-1), so the default M_theta = 64 is exact
    for band limits up to N = 22.

    hermite_sum: the selection-rule sum over n_1+n_2+n_3 = n_4+n_5+n_6 of
    coefficient products times int prod phi dx (N <= 12).
    """
    slots = _as_states(slots, 6, "e6_eval")
    if route == "theta_integral":
        total = 0.0 + 0.0j
        for j in range(m_theta):
            r = rotation_about(_AXIS_QUINTIC, 2.0 * math.pi * j / m_theta)
            total += e_a_eval(r, slots)
        return total / (math.sqrt(3.0) * math.pi * m_theta)
    if route == "hermite_sum":
        n = max(s.n_modes for s in slots)
        _check_direct_sum_size(n, 2)
        jm = _masked_tensor(n, 2)
        c = [s.padded(n).coeffs for s in slots]
        return complex(
            np.einsum(
                "abcdef,a,b,c,d,e,f->",
                jm,
                c[0],
                c[1],
                c[2],
                np.conj(c[3]),
                np.conj(c[4]),
                np.conj(c[5]),
                optimize=True,
            )
        )
    raise ValueError(f"unknown route {route!r}; use 'theta_integral' or 'hermite_sum'")


def e4_eval(
    slots: Sequence[HermiteState],
    route: str = "theta_integral",
    m_theta: int = 64,
) -> complex:
    """The cubic functional E_4(f_1..f_4).

    theta_integral: (1/(2 sqrt(2) pi^2)) int_0^{2pi} E_{S(theta)} with the
    Gaussian pinned in slots 1 and 4; exact for band limits up to N = 32 at
    the default M_theta = 64.

    hermite_sum: selection-rule sum over n_1+n_2 = n_3+n_4 (N <= 12).
    """
    slots = _as_states(slots, 4, "e4_eval")
    if route == "theta_integral":
        total = 0.0 + 0.0j
        for j in range(m_theta):
            s = rotation_about(_AXIS_CUBIC, 2.0 * math.pi * j / m_theta)
            total += e_a_eval(
                s, [GAUSSIAN, slots[0], slots[1], GAUSSIAN, slots[2], slots[3]]
            )
        return total / (math.sqrt(2.0) * math.pi * m_theta)
    if route == "hermite_sum":
        n = max(s.n_modes for s in slots)
        _check_direct_sum_size(n, 1)
        jm = _masked_tensor(n, 1)
        c = [s.padded(n).coeffs for s in slots]
        return complex(
            np.einsum(
                "abcd,a,b,c,d->",
                jm,
                c[0],
                c[1],
                np.conj(c[2]),
                np.conj(c[3]),
                optimize=True,
            )
        )
    raise ValueError(f"unknown route {route!r}; use 'theta_integral' or 'hermite_sum'")


def _midpoint_times(m: int) -> np.ndarray:
    j = np.arange(m)
    return -math.pi / 4.0 + (j + 0.5) * math.pi / (2.0 * m)


def functional_time_average(
    k: int,
    slots: Sequence[HermiteState],
    m_times: int | None = None,
) -> complex:
    """E_{2k+2}(f_1..f_{2k+2}) straight from its defining time average.

    (2/pi) int_{-pi/4}^{pi/4} int prod_{lin} e^{itH}f prod_{conj}
    conj(e^{itH}f) dx dt, with the time integral replaced by the midpoint
    average that is exact on the truncated basis.  Serves as a third
    independent route for cross-checks, and scales to larger band limits
    than the tensor routes.
    """
    slots = _as_states(slots, 2 * k + 2, "functional_time_average")
    n = max(s.n_modes for s in slots)
    m = m_times if m_times is not None else ((k + 1) * (n - 1)) // 2 + 1
    if 2 * m <= (k + 1) * (n - 1):
        raise ValueError("need 2 m_times > (k+1)(n_modes-1) for an exact time average")
    grid = build_grid(n, k)
    t = _midpoint_times(m)
    phases = np.exp(1j * np.outer(t, 2.0 * np.arange(n) + 1.0))
    vals = [
        (phases * s.padded(n).coeffs) @ grid.basis_vals for s in slots
    ]  # each (M, Q)
    prod = vals[0]
    for v in vals[1 : k + 1]:
        prod = prod * v
    for v in vals[k + 1 :]:
        prod = prod * np.conj(v)
    return complex(np.mean(prod @ grid.comp_weights))


# ---------------------------------------------------------------------------
# the resonant flow operators T_6 / T_4
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ResonantConfig:
    """Parameters of the arity-(2k+1) resonant operator.

    ``m_times`` defaults to the smallest count satisfying the exactness
    condition 2M > (k+1)(N-1) of the discrete resonant projection.
    ``normalization``: 'hamiltonian' scales by 2k+2 so stationary
    frequencies match the duality constants; 'time_average' is the bare
    (2/pi) integral convention.
    """

    k: int
    n_modes: int
    m_times: int | None = None
    normalization: str = "hamiltonian"

    def __post_init__(self):
        if self.k not in (1, 2):
            raise ValueError("k must be 1 (cubic) or 2 (quintic)")
        if self.n_modes < 1:
            raise ValueError("n_modes must be >= 1")
        if self.normalization not in ("hamiltonian", "time_average"):
            raise ValueError("normalization must be 'hamiltonian' or 'time_average'")
        m_min = ((self.k + 1) * (self.n_modes - 1)) // 2 + 1
        if self.m_times is None:
            object.__setattr__(self, "m_times", m_min)
        elif self.m_times < 1 or 2 * self.m_times <= (self.k + 1) * (self.n_modes - 1):
            raise ValueError(
                f"config violates 2 m_times > (k+1)(n_modes-1): need m_times >= {m_min}"
            )

    @property
    def arity(self) -> int:
        return 2 * self.k + 1

    @property
    def scale_factor(self) -> float:
        return float(2 * self.k + 2) if self.normalization == "hamiltonian" else 1.0


def _conform_inputs(config: ResonantConfig, inputs: Sequence[HermiteState]) -> list[np.ndarray]:
    inputs = list(inputs)
    if len(inputs) != config.arity:
        raise ValueError(f"k={config.k} resonant operator takes {config.arity} inputs")
    out = []
    for s in inputs:
        if not isinstance(s, HermiteState):
            raise ValueError("resonant inputs must be Hermite states")
        if s.n_modes > config.n_modes:
            raise ValueError(
                f"input has {s.n_modes} modes, config allows {config.n_modes}; "
                "truncate explicitly if that is intended"
            )
        out.append(s.padded(config.n_modes).coeffs)
    return out


def resonant_apply(
    config: ResonantConfig,
    inputs: Sequence[HermiteState],
    route: str = "time_average",
) -> HermiteState:
    """Apply T_{2k+2} to 2k+1 inputs (first k+1 linear, last k conjugated).

    time_average: (1/M) sum_j e^{-it_j H}[ prod of propagated inputs ] at
    midpoint times, evaluated pointwise on the exact arity grid and
    projected back; reproduces the resonant projection exactly on the
    truncated basis.

    direct_sum: the explicit selection-rule sum (N <= 12).
    """
    c = _conform_inputs(config, inputs)
    n, k = config.n_modes, config.k
    if route == "time_average":
        grid = build_grid(n, k)
        t = _midpoint_times(config.m_times)
        phases = np.exp(1j * np.outer(t, 2.0 * np.arange(n) + 1.0))
        vals = [(phases * ci) @ grid.basis_vals for ci in c]
        prod = vals[0]
        for v in vals[1 : k + 1]:
            prod = prod * v
        for v in vals[k + 1 :]:
            prod = prod * np.conj(v)
        projected = prod @ grid.weighted_basis.T  # (M, N)
        out = np.mean(np.conj(phases) * projected, axis=0)
    elif route == "direct_sum":
        _check_direct_sum_size(n, k)
        jm = _masked_tensor(n, k)
        if k == 1:
            out = np.einsum("abcd,a,b,c->d", jm, c[0], c[1], np.conj(c[2]), optimize=True)
        else:
            out = np.einsum(
                "abcdef,a,b,c,d,e->f",
                jm,
                c[0],
                c[1],
                c[2],
                np.conj(c[3]),
                np.conj(c[4]),
                optimize=True,
            )
    else:
        raise ValueError(f"unknown route {route!r}; use 'time_average' or 'direct_sum'")
    return HermiteState(config.scale_factor * out)


def stationary_eigenvalue(
    n: int,
    k: int,
    margin: int = 4,
    m_times: int | None = None,
    route: str = "time_average",
) -> tuple[float, float]:
    """Frequency and defect of the Hermite stationary wave phi_n.

    Returns (omega, residual) with omega = <T(phi_n,..,phi_n), phi_n> and
    residual = ||T(phi_n,..) - omega phi_n||_{L^2}.  The configured band
    limit keeps ``margin`` spare modes above n so leakage would be visible.
    """
    if n < 0:
        raise ValueError("mode index must be >= 0")
    if margin < 1:
        raise ValueError("need at least one spare mode above n")
    config = ResonantConfig(k=k, n_modes=n + 1 + margin, m_times=m_times)
    phi = basis_state(n, config.n_modes)
    out = resonant_apply(config, [phi] * config.arity, route=route)
    omega = float(out.coeffs[n].real)
    defect = out.coeffs.copy()
    defect[n] -= omega
    return omega, float(np.linalg.norm(defect))


# ---------------------------------------------------------------------------
# appendix decomposition of an isometry into pairs plus a mixing core
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Decomposition:
    """Good/bad axis pairs of an isometry and the pair-free remainder.

    A pair (i, j) is good when A e_i = e_j and bad when A e_i = -e_j.  The
    residual is A restricted to the complementary coordinate subspaces and
    satisfies B e_i != +-e_j for all i, j.  ``sigma1``/``sigma2`` list the
    input/output coordinates in lemma order (good, bad, rest).
    """

    dim: int
    good_pairs: tuple[tuple[int, int], ...]
    bad_pairs: tuple[tuple[int, int], ...]
    residual: np.ndarray | None
    sigma1: tuple[int, ...]
    sigma2: tuple[int, ...]

    def reconstruct(self) -> np.ndarray:
        m = np.zeros((self.dim, self.dim))
        for i, j in self.good_pairs:
            m[j, i] = 1.0
        for i, j in self.bad_pairs:
            m[j, i] = -1.0
        n_pairs = len(self.good_pairs) + len(self.bad_pairs)
        rest_in = self.sigma1[n_pairs:]
        rest_out = self.sigma2[n_pairs:]
        if self.residual is not None:
            m[np.ix_(rest_out, rest_in)] = self.residual
        return m


def decompose_isometry(iso: Isometry, tol: float = 1e-12) -> Decomposition:
    """Split an isometry into good pairs, bad pairs, and a pair-free core."""
    a = iso.matrix
    d = iso.dim
    good: list[tuple[int, int]] = []
    bad: list[tuple[int, int]] = []
    for i in range(d):
        for j in range(d):
            if abs(a[j, i] - 1.0) < tol:
                good.append((i, j))
            elif abs(a[j, i] + 1.0) < tol:
                bad.append((i, j))
    used_in = {i for i, _ in good} | {i for i, _ in bad}
    used_out = {j for _, j in good} | {j for _, j in bad}
    rest_in = [i for i in range(d) if i not in used_in]
    rest_out = [j for j in range(d) if j not in used_out]
    sigma1 = tuple([i for i, _ in good] + [i for i, _ in bad] + rest_in)
    sigma2 = tuple([j for _, j in good] + [j for _, j in bad] + rest_out)
    residual = None
    if rest_in:
        residual = a[np.ix_(rest_out, rest_in)].copy()
        if np.any(np.abs(np.abs(residual) - 1.0) < tol):
            raise ValueError("residual block still contains a permutation part")
    return Decomposition(
        dim=d,
        good_pairs=tuple(good),
        bad_pairs=tuple(bad),
        residual=residual,
        sigma1=sigma1,
        sigma2=sigma2,
    )
