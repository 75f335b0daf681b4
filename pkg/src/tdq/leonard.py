"""Closed-form model for the multiplicity-free case.

For validated parameters this module produces every operator matrix in each
of the three distinguished coordinate frames (the two split bases and the
halfway eigenbasis), along with the transition matrices between the frames.
Every matrix is computed twice: once from its closed-form entries and once
constructively from the lowering matrix and the frame's defining diagonal.
The two must agree exactly, which turns each closed form into a mechanically
checked statement.

Transition convention: ``transition_matrix(frm, to)`` has the frm-basis
coordinates of the j-th to-basis vector in column j, so it converts to-basis
coordinates into frm-basis coordinates, and representation matrices move by
``mat_to = T(to, frm) * mat_frm * T(frm, to)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Optional

from .engine import CrossRouteError, psi_from_KB
from .linalg import Matrix
from .params import QRacahParams
from .qcalc import q_exp, q_fact
from .scalars import Scalar

__all__ = [
    "KINDS",
    "BASES",
    "EigenvalueSeq",
    "eigenvalue_seq",
    "psi_hat",
    "exp_psi_matrix",
    "delta_matrix",
    "operator_matrix",
    "transition_matrix",
    "change_basis",
    "LeonardSuite",
    "leonard_suite",
]

KINDS = ("A", "K", "B", "M", "Minv", "Delta", "Deltainv", "psi")
BASES = ("u", "udd", "w")


@dataclass(frozen=True)
class EigenvalueSeq:
    theta: tuple[Scalar, ...]
    theta_star: Optional[tuple[Scalar, ...]]


def eigenvalue_seq(params: QRacahParams) -> EigenvalueSeq:
    """Both eigenvalue sequences; mutual distinctness is rechecked."""
    theta = tuple(params.theta(i) for i in range(params.d + 1))
    if len(set(theta)) != len(theta):
        raise ValueError("eigenvalues are not mutually distinct")
    theta_star = None
    if params.b is not None:
        theta_star = tuple(params.theta_star(i) for i in range(params.d + 1))
        if len(set(theta_star)) != len(theta_star):
            raise ValueError("dual eigenvalues are not mutually distinct")
    return EigenvalueSeq(theta, theta_star)


def psi_hat(d: int, q: Scalar) -> Matrix:
    """The lowering matrix: entry (i-1, i) is
    (q^i - q^-i)(q^(d-i+1) - q^(i-d-1)), all other entries zero."""
    field = q.field
    m = [[field.zero] * (d + 1) for _ in range(d + 1)]
    for i in range(1, d + 1):
        m[i - 1][i] = (q ** i - q ** -i) * (q ** (d - i + 1) - q ** (i - d - 1))
    return Matrix.from_rows(field, m)


def _exp_factor(d: int, i: int, j: int, q: Scalar, fact) -> Scalar:
    return ((q - q ** -1) ** (2 * (j - i)) * fact[j] * fact[d - i]
            / (fact[i] * fact[j - i] * fact[d - j]))


def exp_psi_matrix(d: int, x: Scalar, q: Scalar, variant: str = "q") -> Matrix:
    """q-exponential of x times the lowering matrix.

    Computed both from the truncated series and from the closed-form entries
    x^(j-i) q^(+-C(j-i,2)) (q-q^-1)^(2(j-i)) [j]![d-i]!/([i]![j-i]![d-j]!);
    a mismatch raises CrossRouteError.
    """
    field = q.field
    fact = [q_fact(n, q) for n in range(d + 1)]
    rows = [[field.zero] * (d + 1) for _ in range(d + 1)]
    for i in range(d + 1):
        for j in range(i, d + 1):
            e = comb(j - i, 2)
            power = q ** e if variant == "q" else q ** (-e)
            rows[i][j] = x ** (j - i) * power * _exp_factor(d, i, j, q, fact)
    formula = Matrix.from_rows(field, rows)
    series = q_exp(x * psi_hat(d, q), q, variant)  # type: ignore[arg-type]
    if formula != series:
        raise CrossRouteError("closed-form q-exponential entries disagree with "
                              "the series", formula, series)
    return formula


def delta_matrix(d: int, q: Scalar, a: Scalar, inverse: bool = False) -> Matrix:
    """The transition operator in any of the three frames.

    Closed form: entry (i,j) is
    (q-q^-1)^(j-i) [j]![d-i]!/([i]![j-i]![d-j]!) prod_(n=1..j-i)(a q^(n-1) - a^-1 q^(1-n)),
    with a and a^-1 exchanged for the inverse.  Cross-checked against the
    product of the two q-exponentials.
    """
    field = q.field
    if inverse:
        a = a ** -1
    ainv = a ** -1
    fact = [q_fact(n, q) for n in range(d + 1)]
    rows = [[field.zero] * (d + 1) for _ in range(d + 1)]
    for i in range(d + 1):
        for j in range(i, d + 1):
            prod = field.one
            for n in range(1, j - i + 1):
                prod = prod * (a * q ** (n - 1) - ainv * q ** (1 - n))
            rows[i][j] = ((q - q ** -1) ** (j - i) * fact[j] * fact[d - i]
                          / (fact[i] * fact[j - i] * fact[d - j]) * prod)
    formula = Matrix.from_rows(field, rows)
    c = q - q ** -1
    product = (exp_psi_matrix(d, a / c, q, "q")
               * exp_psi_matrix(d, -(ainv / c), q, "q_inverse"))
    if formula != product:
        raise CrossRouteError("closed-form transition entries disagree with the "
                              "exponential product", formula, product)
    return formula


def _geometric(d: int, x: Scalar, psi_pows) -> Matrix:
    """sum_(n=0..d) x^n psihat^n, the inverse of (I - x psihat)."""
    total = psi_pows[0]
    power = x.field.one
    for n in range(1, d + 1):
        power = power * x
        total = total + power * psi_pows[n]
    return total


def _super_entry(d: int, i: int, q: Scalar) -> Scalar:
    return (q ** i - q ** -i) * (q ** (d - i + 1) - q ** (i - d - 1))


def operator_matrix(kind: str, basis: str, params: QRacahParams) -> Matrix:
    """The matrix of the requested operator in the requested frame.

    The closed-form entries and an independent constructive computation must
    agree exactly; CrossRouteError is raised otherwise.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown operator kind {kind!r}")
    if basis not in BASES:
        raise ValueError(f"unknown basis {basis!r}")
    formula = _formula_matrix(kind, basis, params)
    constructive = _constructive_matrix(kind, basis, params)
    if formula != constructive:
        raise CrossRouteError(
            f"entry formula and constructive route for {kind}@{basis} disagree",
            formula, constructive)
    return formula


def _shift_diag(params: QRacahParams, sign: int = 1) -> Matrix:
    d, q = params.d, params.q
    return Matrix.diagonal(params.field, [q ** (sign * (d - 2 * i)) for i in range(d + 1)])


def _formula_matrix(kind: str, basis: str, params: QRacahParams) -> Matrix:
    d, q, a = params.d, params.q, params.a
    field = params.field
    fact = [q_fact(n, q) for n in range(d + 1)]
    ainv = a ** -1

    def triangular(amount):
        rows = [[field.zero] * (d + 1) for _ in range(d + 1)]
        for i in range(d + 1):
            for j in range(i, d + 1):
                rows[i][j] = (amount(i, j) * q ** (d - j - i)
                              * (q - q ** -1) ** (2 * (j - i))
                              * fact[j] * fact[d - i] / (fact[i] * fact[d - j]))
        return Matrix.from_rows(field, rows)

    def bidiagonal(diag, superdiag):
        rows = [[field.zero] * (d + 1) for _ in range(d + 1)]
        for i in range(d + 1):
            rows[i][i] = diag(i)
        for i in range(1, d + 1):
            rows[i - 1][i] = superdiag(i)
        return Matrix.from_rows(field, rows)

    if kind == "psi":
        return psi_hat(d, q)
    if kind == "Delta":
        return delta_matrix(d, q, a)
    if kind == "Deltainv":
        return delta_matrix(d, q, a, inverse=True)

    if kind == "A":
        theta = [params.theta(i) for i in range(d + 1)]
        if basis in ("u", "udd"):
            seq = theta if basis == "u" else theta[::-1]
            rows = [[field.zero] * (d + 1) for _ in range(d + 1)]
            for i in range(d + 1):
                rows[i][i] = seq[i]
            for i in range(1, d + 1):
                rows[i][i - 1] = field.one
            return Matrix.from_rows(field, rows)
        # tridiagonal halfway frame: subdiagonal all ones
        rows = [[field.zero] * (d + 1) for _ in range(d + 1)]
        for i in range(d + 1):
            rows[i][i] = (a + ainv) * q ** (d - 2 * i)
        for i in range(1, d + 1):
            rows[i][i - 1] = field.one
            rows[i - 1][i] = -q ** (d - 2 * i + 1) * _super_entry(d, i, q)
        return Matrix.from_rows(field, rows)

    if kind == "K":
        if basis == "u":
            return _shift_diag(params)
        if basis == "udd":
            return triangular(lambda i, j: (1 - ainv * ainv) * a ** (j - i)
                              if i < j else field.one)
        return bidiagonal(lambda i: q ** (d - 2 * i),
                          lambda i: -ainv * q ** (d - 2 * i + 1) * _super_entry(d, i, q))

    if kind == "B":
        if basis == "udd":
            return _shift_diag(params)
        if basis == "u":
            return triangular(lambda i, j: (1 - a * a) * a ** (i - j)
                              if i < j else field.one)
        return bidiagonal(lambda i: q ** (d - 2 * i),
                          lambda i: -a * q ** (d - 2 * i + 1) * _super_entry(d, i, q))

    if kind == "M":
        if basis == "u":
            return triangular(lambda i, j: a ** (i - j))
        if basis == "udd":
            return triangular(lambda i, j: a ** (j - i))
        return _shift_diag(params)

    if kind == "Minv":
        if basis == "u":
            return bidiagonal(lambda i: q ** (2 * i - d),
                              lambda i: -ainv * q ** (2 * i - d - 1) * _super_entry(d, i, q))
        if basis == "udd":
            return bidiagonal(lambda i: q ** (2 * i - d),
                              lambda i: -a * q ** (2 * i - d - 1) * _super_entry(d, i, q))
        return _shift_diag(params, sign=-1)

    raise AssertionError(kind)


def _constructive_matrix(kind: str, basis: str, params: QRacahParams) -> Matrix:
    d, q, a = params.d, params.q, params.a
    field = params.field
    ainv = a ** -1
    hat = psi_hat(d, q)
    psi_pows = [Matrix.identity(field, d + 1)]
    for _ in range(d + 1):
        psi_pows.append(psi_pows[-1] * hat)
    D = _shift_diag(params)
    I = Matrix.identity(field, d + 1)

    if kind == "psi":
        K = _formula_matrix("K", basis, params)
        B = _formula_matrix("B", basis, params)
        return psi_from_KB(K, B, q, a)

    if kind == "A":
        if basis == "w":
            return change_basis(_formula_matrix("A", "u", params), "u", "w", params)
        if basis == "udd":
            return change_basis(_formula_matrix("A", "u", params), "u", "udd", params)
        return change_basis(_formula_matrix("A", "w", params), "w", "u", params)

    if kind == "K":
        if basis == "u":
            return (ainv * ainv * I + (1 - ainv * ainv) * _geometric(d, a * q, psi_pows)) \
                * _formula_matrix("B", "u", params)
        if basis == "udd":
            return (ainv * ainv * I + (1 - ainv * ainv) * _geometric(d, a * q, psi_pows)) * D
        return (I - ainv * q * hat) * D

    if kind == "B":
        if basis == "udd":
            return (a * a * I + (1 - a * a) * _geometric(d, ainv * q, psi_pows)) \
                * _formula_matrix("K", "udd", params)
        if basis == "u":
            return (a * a * I + (1 - a * a) * _geometric(d, ainv * q, psi_pows)) * D
        return (I - a * q * hat) * D

    if kind == "M":
        if basis == "u":
            return D * _geometric(d, ainv * q ** -1, psi_pows)
        if basis == "udd":
            return D * _geometric(d, a * q ** -1, psi_pows)
        num = a * _formula_matrix("K", "w", params) - ainv * _formula_matrix("B", "w", params)
        return num * (a - ainv).inv()

    if kind == "Minv":
        Dinv = _shift_diag(params, sign=-1)
        if basis == "u":
            return (I - ainv * q ** -1 * hat) * Dinv
        if basis == "udd":
            return (I - a * q ** -1 * hat) * Dinv
        return _constructive_matrix("M", "w", params).inverse()

    if kind == "Delta":
        c = q - q ** -1
        return (q_exp((a / c) * hat, q) * q_exp(-(ainv / c) * hat, q, "q_inverse"))
    if kind == "Deltainv":
        c = q - q ** -1
        return (q_exp((ainv / c) * hat, q) * q_exp(-(a / c) * hat, q, "q_inverse"))

    raise AssertionError(kind)


def transition_matrix(frm: str, to: str, params: QRacahParams) -> Matrix:
    """Coordinate-conversion matrix between two frames (see module docstring
    for the orientation convention)."""
    if frm not in BASES or to not in BASES:
        raise ValueError("bases must be among " + ", ".join(BASES))
    d, q, a = params.d, params.q, params.a
    field = params.field
    if frm == to:
        return Matrix.identity(field, d + 1)
    c = q - q ** -1
    ainv = a ** -1
    table = {
        ("u", "w"): lambda: exp_psi_matrix(d, -(ainv / c), q, "q_inverse"),
        ("w", "u"): lambda: exp_psi_matrix(d, ainv / c, q, "q"),
        ("udd", "w"): lambda: exp_psi_matrix(d, -(a / c), q, "q_inverse"),
        ("w", "udd"): lambda: exp_psi_matrix(d, a / c, q, "q"),
        ("u", "udd"): lambda: delta_matrix(d, q, a),
        ("udd", "u"): lambda: delta_matrix(d, q, a, inverse=True),
    }
    return table[(frm, to)]()


def change_basis(mat: Matrix, frm: str, to: str, params: QRacahParams) -> Matrix:
    """Rewrite a representation matrix from one frame to another."""
    if frm == to:
        return mat
    P = transition_matrix(to, frm, params)
    Pinv = transition_matrix(frm, to, params)
    return P * mat * Pinv


@dataclass(frozen=True)
class LeonardSuite:
    """All operator matrices in one frame, plus the transition table.

    ``A_udd`` carries the second-split representation of A for reference; the
    parameter b only enters through the dual eigenvalue sequence.
    """

    params: QRacahParams
    basis: str
    A: Matrix
    K: Matrix
    B: Matrix
    psi: Matrix
    M: Matrix
    Minv: Matrix
    Delta: Matrix
    Deltainv: Matrix
    A_udd: Matrix
    eigenvalues: EigenvalueSeq
    transitions: dict[tuple[str, str], Matrix]

    def matrix(self, kind: str) -> Matrix:
        return getattr(self, kind)


def leonard_suite(params: QRacahParams, basis: str = "u") -> LeonardSuite:
    """Generate the coherent closed-form bundle in the given frame."""
    if basis not in BASES:
        raise ValueError(f"unknown basis {basis!r}")
    matrices = {kind: operator_matrix(kind, basis, params) for kind in KINDS}
    transitions = {
        (f, t): transition_matrix(f, t, params) for f in BASES for t in BASES
    }
    return LeonardSuite(
        params=params,
        basis=basis,
        A_udd=operator_matrix("A", "udd", params),
        eigenvalues=eigenvalue_seq(params),
        transitions=transitions,
        **matrices,
    )
