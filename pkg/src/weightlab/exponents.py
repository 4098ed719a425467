"""Exact exponent calculus.

Every exponent is an :class:`~fractions.Fraction` or the sentinel :data:`INF`.
Most identities are linear in reciprocals, so the helpers here work with
``recip(p)`` (``1/INF == 0``) and convert back only at the end.  Nothing in
this module touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

__all__ = [
    "INF",
    "ExtReal",
    "ExponentError",
    "ext",
    "recip",
    "from_recip",
    "conj",
    "fmt",
    "Verdict",
    "ExponentSystem",
    "DerivedExponents",
    "admissible",
    "derived_deltas",
    "one_var_extrapolation",
    "ChainStep",
    "OffDiagonalChain",
    "offdiagonal_chain",
    "dual_tuple",
    "CharacterizationIndices",
    "characterization_indices",
    "FactorizationExponents",
    "factorization_exponents",
    "multilinear_target_check",
    "ModifiedMaximalExponents",
    "modified_maximal_exponents",
]


class ExponentError(ValueError):
    """Raised when exponents fall outside the admissible range."""


class _Infinity:
    """Positive infinity, ordered above every rational."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("weightlab-inf")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
ExtReal = Union[Fraction, _Infinity]


def ext(x) -> ExtReal:
    """Coerce ints, Fractions, ``"a/b"`` strings and ``"inf"`` to an ExtReal.

    Floats are rejected to keep the calculus exact.
    """
    if x is INF:
        return INF
    if isinstance(x, bool):
        raise TypeError("booleans are not exponents")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "infinity", "∞", "+inf"):
            return INF
        return Fraction(s)
    raise TypeError(f"cannot interpret {x!r} as an exact exponent")


def recip(x) -> Fraction | _Infinity:
    x = ext(x)
    if x is INF:
        return Fraction(0)
    if x == 0:
        return INF
    return 1 / x


def from_recip(inv: Fraction) -> ExtReal:
    """Inverse of :func:`recip` for nonnegative reciprocals."""
    inv = ext(inv)
    if inv == 0:
        return INF
    return 1 / inv


def conj(p) -> ExtReal:
    """Hölder conjugate ``p'`` for ``p >= 1`` (``1' = INF``, ``INF' = 1``)."""
    p = ext(p)
    if p is not INF and p < 1:
        raise ExponentError(f"conjugate needs p >= 1, got {p}")
    return from_recip(1 - recip(p))


def fmt(x) -> str:
    """Serialize as ``"num/den"`` or ``"inf"``."""
    x = ext(x)
    if x is INF:
        return "inf"
    return f"{x.numerator}/{x.denominator}"


def _tuple(xs) -> tuple:
    return tuple(ext(x) for x in xs)


@dataclass(frozen=True)
class Verdict:
    ok: bool
    failed: tuple[str, ...] = ()

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class ExponentSystem:
    """Multilinear exponent data ``(p⃗, q)`` with optional ``t`` and ``r⃗``."""

    p: tuple
    q: ExtReal
    t: ExtReal | None = None
    r: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "p", _tuple(self.p))
        object.__setattr__(self, "q", ext(self.q))
        if self.t is not None:
            object.__setattr__(self, "t", ext(self.t))
        if self.r is not None:
            object.__setattr__(self, "r", _tuple(self.r))
            if len(self.r) != self.m + 1:
                raise ExponentError("r⃗ needs m+1 entries")
        if not self.p:
            raise ExponentError("need at least one p_i")
        for pi in self.p:
            if pi is not INF and pi < 1:
                raise ExponentError(f"p_i must lie in [1, inf], got {pi}")
        if self.q is not INF and self.q <= 0:
            raise ExponentError(f"q must be positive, got {self.q}")

    @property
    def m(self) -> int:
        return len(self.p)

    @property
    def inv_p(self) -> Fraction:
        return sum((recip(pi) for pi in self.p), Fraction(0))

    @property
    def inv_p_last(self) -> Fraction:
        """``1/p_{m+1} = 1 - 1/q`` (may be negative when q < 1)."""
        return 1 - recip(self.q)

    def identity_holds(self) -> bool:
        total = self.inv_p + self.inv_p_last
        return total == 1 + self.inv_p - recip(self.q)


@dataclass(frozen=True)
class DerivedExponents:
    """Reciprocal exponents built from ``(r⃗, p⃗, q)``.

    ``inv_delta[i] = 1/r_i - 1/p_i`` with ``1/p_{m+1} = 1 - 1/q``;
    ``kappa`` is their sum, ``inv_rho = 1/δ_m + 1/δ_{m+1}`` and
    ``inv_theta[i] = kappa - 1/δ_i`` for the first ``m-1`` slots.
    """

    inv_delta: tuple
    kappa: Fraction
    inv_rho: Fraction
    inv_theta: tuple

    @property
    def delta(self) -> tuple:
        return tuple(from_recip(v) for v in self.inv_delta)

    @property
    def rho(self) -> ExtReal:
        return from_recip(self.inv_rho)

    @property
    def theta(self) -> tuple:
        return tuple(from_recip(v) for v in self.inv_theta)


def admissible(r, p, q, strict: bool = False) -> Verdict:
    """Check ``r⃗ ⪯ (p⃗, q)`` (or ``≺`` when ``strict``).

    Non-strict: ``r_i <= p_i`` for ``i <= m`` and ``r'_{m+1} > q``.
    Strict additionally needs ``r_i < p_i``.
    """
    r, p, q = _tuple(r), _tuple(p), ext(q)
    if len(r) != len(p) + 1:
        raise ExponentError(f"arity mismatch: |r⃗|={len(r)} but m={len(p)}")
    failed = []
    for i, (ri, pi) in enumerate(zip(r, p), start=1):
        if ri is INF or ri < 1:
            failed.append(f"r_{i} must lie in [1, inf)")
        elif strict and not ri < pi:
            failed.append(f"r_{i} < p_{i}")
        elif not ri <= pi:
            failed.append(f"r_{i} <= p_{i}")
    last = r[-1]
    if last is INF or last < 1:
        failed.append(f"r_{len(r)} must lie in [1, inf)")
    else:
        # r'_{m+1} > q  <=>  1/q > 1 - 1/r_{m+1}
        if not recip(q) > 1 - recip(last):
            failed.append(f"r'_{len(r)} > q")
    return Verdict(not failed, tuple(failed))


def derived_deltas(r, p, q) -> DerivedExponents:
    v = admissible(r, p, q)
    if not v:
        raise ExponentError("inadmissible exponents: " + ", ".join(v.failed))
    r, p, q = _tuple(r), _tuple(p), ext(q)
    m = len(p)
    inv = [recip(ri) - recip(pi) for ri, pi in zip(r, p)]
    inv.append(recip(r[-1]) - (1 - recip(q)))
    kappa = sum(inv, Fraction(0))
    if kappa <= 0:
        raise ExponentError(f"kappa must be positive, got {kappa}")
    inv_rho = inv[m - 1] + inv[m]
    if inv_rho <= 0:
        raise ExponentError(f"1/rho must be positive, got {inv_rho}")
    theta = tuple(kappa - inv[i] for i in range(m - 1))
    return DerivedExponents(tuple(inv), kappa, inv_rho, theta)


def one_var_extrapolation(p0, q0, t0, p) -> tuple[ExtReal, ExtReal]:
    """Shift ``(q0, t0)`` so that ``1/p - 1/p0 = 1/q - 1/q0 = 1/t - 1/t0``."""
    p0, q0, t0, p = ext(p0), ext(q0), ext(t0), ext(p)
    shift = recip(p) - recip(p0)
    inv_q = recip(q0) + shift
    inv_t = recip(t0) + shift
    if inv_q <= 0 or inv_t <= 0:
        raise ExponentError(f"extrapolated exponent not positive (1/q={inv_q}, 1/t={inv_t})")
    return from_recip(inv_q), from_recip(inv_t)


@dataclass(frozen=True)
class ChainStep:
    k: int
    beta: Fraction
    q: ExtReal
    s: ExtReal
    inv_q: Fraction
    inv_s: Fraction


@dataclass(frozen=True)
class OffDiagonalChain:
    """The β_k ladder used to climb from a diagonal to an off-diagonal bound."""

    steps: tuple
    k0: int
    limit: Fraction
    violations: tuple = field(default=())

    def __getitem__(self, k: int) -> ChainStep:
        return self.steps[k - 1]


def offdiagonal_chain(d, alpha, beta, p, s, strict: bool = False) -> OffDiagonalChain:
    """Build the ladder ``β_k`` with its companion ``q_k`` and ``s_k``.

    ``β_k`` increases to ``3α/2 - d/2`` and the ladder stops at the first ``k``
    with ``α <= (d + β_k)/2``.  Violations of the structural inequalities on
    ``q_k`` and ``s_k`` are collected in ``violations``; with ``strict`` they
    raise instead.  A non-increasing ``β_k`` always raises.

    ``1/s_k`` decreases by ``(β_k - β)/d`` plus a shrinking share of the
    slack ``(α - β)/d - 1/s``; with the opposite sign on ``(β_k - β)/d`` the
    ladder inequalities on ``s_k`` fail from the first step.
    """
    d, alpha, beta, p, s = (ext(x) for x in (d, alpha, beta, p, s))
    if not (0 <= beta < alpha < d):
        raise ExponentError("need 0 <= beta < alpha < d")
    if s is INF or s < 1 or not recip(s) > (alpha - beta) / d:
        raise ExponentError("need 1 <= s < d/(alpha-beta)")
    limit = Fraction(3, 2) * alpha - d / 2
    gap = limit - beta

    def beta_k(k):
        return beta + gap * (1 - Fraction(1, 2 ** (k - 1)))

    def step(k):
        bk = beta_k(k)
        inv_q = recip(p) - bk / d
        inv_s = recip(s) - (bk - beta) / d + (1 - Fraction(1, 2 ** (k - 1))) * ((alpha - beta) / d - recip(s))
        return ChainStep(k, bk, from_recip(inv_q) if inv_q > 0 else INF, from_recip(inv_s) if inv_s > 0 else INF,
                         inv_q, inv_s)

    if not alpha > (d + beta) / 2:
        return OffDiagonalChain((step(1),), 1, limit)

    steps = [step(1)]
    k = 1
    while not alpha <= (d + steps[-1].beta) / 2:
        k += 1
        if k > 4096:
            raise ExponentError("chain does not terminate")
        steps.append(step(k))

    violations = []
    for prev, cur in zip(steps, steps[1:]):
        if not cur.beta > prev.beta:
            raise ExponentError(f"beta_k not increasing at k={cur.k}")
        if 2 * cur.beta - prev.beta != limit:
            raise ExponentError(f"2β_(k+1) - β_k != limit at k={prev.k}")
        tag = f"k={prev.k}"
        if not recip(p) < 1:
            violations.append(f"{tag}: p > 1")
        if not recip(p) >= prev.inv_q:
            violations.append(f"{tag}: p <= q_k")
        if not prev.inv_q > cur.inv_q:
            violations.append(f"{tag}: q_k < q_(k+1)")
        if not cur.inv_q > (cur.beta - prev.beta) / d:
            violations.append(f"{tag}: q_(k+1) < d/(beta_(k+1)-beta_k)")
        if not (0 < cur.inv_s <= 1):
            violations.append(f"{tag}: 1 <= s_(k+1) < inf")
        if not cur.inv_s > (alpha - cur.beta) / d:
            violations.append(f"{tag}: s_(k+1) < d/(alpha-beta_(k+1))")
        if not prev.inv_s > cur.inv_s + (cur.beta - prev.beta) / d:
            violations.append(f"{tag}: 1/s_k > 1/s_(k+1) + (beta_(k+1)-beta_k)/d")
    if violations and strict:
        raise ExponentError("; ".join(violations))
    return OffDiagonalChain(tuple(steps), k, limit, tuple(violations))


def dual_tuple(p, q, i: int) -> tuple[tuple, ExtReal]:
    """Swap slot ``i`` (1-based) of ``p⃗`` for ``q'``; the new target is ``p_i'``."""
    p, q = _tuple(p), ext(q)
    if not 1 <= i <= len(p):
        raise ExponentError(f"slot {i} out of range")
    pi = p[i - 1]
    if pi is INF or pi <= 1:
        raise ExponentError("dual slot needs 1 < p_i < inf")
    if q is not INF and q < 1:
        raise ExponentError("dual needs q >= 1")
    new = list(p)
    new[i - 1] = conj(q)
    return tuple(new), conj(pi)


@dataclass(frozen=True)
class CharacterizationIndices:
    """Muckenhoupt orders tied to a multilinear class.

    ``slot_index[i]`` is the order of the class containing ``w_i^{-p_i'}``;
    ``None`` marks ``p_i = 1`` (an A_1 statement about
    ``w_i^{1/(m+1/q-1/p)}``, whose exponent is in ``a1_power``).
    ``product_index`` is the order for ``w^q`` (``None`` if ``q = INF``).
    ``inv_s[j]`` lists the Hölder weights used for slot ``j``: first the
    ``w^q`` term, then the other slots in order.  Each row sums to one.
    """

    m: int
    slot_index: tuple
    product_index: ExtReal | None
    a1_power: Fraction
    inv_s: tuple
    flags: tuple = ()

    def inv_s_sums(self) -> tuple:
        return tuple(sum(row, Fraction(0)) for row in self.inv_s)


def characterization_indices(p, q, m: int | None = None, partial: bool = False) -> CharacterizationIndices:
    """Indices for the component/product characterization.

    With ``partial`` an extra slot with ``p = INF`` is appended for the
    partial weight ``u`` (whose component weight is ``u^{-1}``).
    """
    p, q = list(_tuple(p)), ext(q)
    if partial:
        p.append(INF)
    m = len(p) if m is None or partial else m
    if m != len(p):
        raise ExponentError("m does not match len(p⃗)")
    inv_p = sum((recip(x) for x in p), Fraction(0))
    inv_q = recip(q)
    base = m + inv_q - inv_p
    flags = []
    slots = []
    for i, pi in enumerate(p, start=1):
        if pi == 1:
            slots.append(None)
            continue
        inv_pc = 1 - recip(pi)
        idx = (m + inv_q - inv_p) / inv_pc
        if not idx > 1:
            flags.append(f"slot {i}: index {idx} <= 1")
        slots.append(idx)
    product = None if q is INF else m * q + 1 - q * inv_p
    if product is not None and not product > 1:
        flags.append(f"product index {product} <= 1")
    # Hölder weights for slot j: 1/s_j on the w^q term, 1/s_i = (1/p_i')/c_j on
    # the remaining slots, c_j = m - 1 + 1/p_j + 1/q - 1/p.
    inv_s = []
    for j, pj in enumerate(p):
        c = m - 1 + recip(pj) + inv_q - inv_p
        if c <= 0:
            flags.append(f"slot {j + 1}: Hölder split undefined")
            inv_s.append(())
            continue
        row = [inv_q / c] + [(1 - recip(pi)) / c for i, pi in enumerate(p) if i != j]
        inv_s.append(tuple(row))
    return CharacterizationIndices(m, tuple(slots), product, 1 / base if base != 0 else INF,
                                   tuple(inv_s), tuple(flags))


@dataclass(frozen=True)
class FactorizationExponents:
    """Composite weight ``μ^{mu_exp} w^{w_exp}`` and the bound's exponents.

    ``factor_exp`` multiplies the log of the ``μ``-side A_1-type constant and
    ``w_bound_exp`` that of ``[w]``.  ``balanced`` reports whether
    ``1/p - 1/p0 = 1/r - 1/r0``, which the per-cube Hölder step needs.
    """

    gamma: Fraction
    case: str
    mu_exp: Fraction
    w_exp: Fraction
    factor_exp: Fraction
    w_bound_exp: Fraction
    balanced: bool


def factorization_exponents(p, p0, r, r0) -> FactorizationExponents:
    p, p0, r, r0 = (ext(x) for x in (p, p0, r, r0))
    for x in (p, p0, r, r0):
        if x is INF or x < 1:
            raise ExponentError("factorization needs finite exponents >= 1")
    inv_pc = 1 - recip(p)
    gamma = recip(r) + inv_pc
    balanced = recip(p) - recip(p0) == recip(r) - recip(r0)
    if p == p0 and r == r0:
        return FactorizationExponents(gamma, "identity", Fraction(0), Fraction(1), Fraction(0), Fraction(1), balanced)
    if p < p0 and r < r0:
        mu = gamma * (r - r0) / r0
        w = r / r0
        if gamma <= 1:
            return FactorizationExponents(gamma, "i", mu, w, (r0 - r) / r0, w, balanced)
        return FactorizationExponents(gamma, "ii", mu, w, gamma * (r0 - r) / r0, w, balanced)
    if p0 < p and r0 < r:
        if p == 1:
            raise ExponentError("case p0 < p needs p > 1")
        rg = r * gamma - 1
        mu = gamma * (r - r0) / (rg * r0)
        w = r * (r0 * gamma - 1) / (rg * r0)
        w_bound = inv_pc / (1 - recip(p0)) if p0 != 1 else Fraction(0)
        if gamma <= 1:
            return FactorizationExponents(gamma, "iii", mu, w, (p - p0) / ((p - 1) * p0), w_bound, balanced)
        return FactorizationExponents(gamma, "iv", mu, w, gamma * (p - p0) / ((p - 1) * p0), w_bound, balanced)
    raise ExponentError("no factorization case matches the ordering of (p, p0, r, r0)")


def multilinear_target_check(p, q, p_star, q_star, r) -> Verdict:
    p, p_star, r = _tuple(p), _tuple(p_star), _tuple(r)
    q, q_star = ext(q), ext(q_star)
    failed = []
    if len(p) != len(p_star) or len(r) != len(p) + 1:
        raise ExponentError("arity mismatch")
    inv_p = sum((recip(x) for x in p), Fraction(0))
    inv_ps = sum((recip(x) for x in p_star), Fraction(0))
    if inv_p - recip(q) != inv_ps - recip(q_star):
        failed.append("1/p - 1/q = 1/p* - 1/q*")
    if not admissible(r, p_star, q_star, strict=True):
        failed.append("r⃗ strictly below (p⃗*, q*)")
    if not admissible(r, p, q):
        failed.append("r⃗ below (p⃗, q)")
    side = recip(q) - 1  # (1 - q)/q
    if not inv_p > max(Fraction(0), side):
        failed.append("1/p > max(0, (1-q)/q)")
    if not inv_ps > 0:
        failed.append("1/p* > 0")
    if any(x is not INF and x <= 1 for x in p_star):
        failed.append("p*_i > 1")
    if q_star is INF or q_star <= 0:
        failed.append("0 < q* < inf")
    return Verdict(not failed, tuple(failed))


@dataclass(frozen=True)
class ModifiedMaximalExponents:
    gamma: Fraction
    q_gamma: Fraction
    degenerate: bool


def modified_maximal_exponents(p, q) -> ModifiedMaximalExponents:
    """``γ = 1/q + 1/p'`` and ``qγ``; flags ``qγ <= 1`` (degenerate conjugate)."""
    p, q = ext(p), ext(q)
    if q is INF:
        raise ExponentError("q must be finite")
    gamma = recip(q) + 1 - recip(p)
    qg = q * gamma
    return ModifiedMaximalExponents(gamma, qg, qg <= 1)


def as_fraction_tuple(xs: Sequence) -> tuple:
    return _tuple(xs)
