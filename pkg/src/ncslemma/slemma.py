"""Certificate search and counterexample construction for matrix-valued domination.

Given symmetric quadratic homogeneous matrix-valued polynomials f and g with
a strict feasibility point for g, the domination question "compressions of
g(X) PSD imply compressions of f(X) PSD" has exactly two verifiable answers:

* a completely positive map phi (a trace-normalized PSD Choi matrix) whose
  residual coefficient matrix A - (1_m (x) phi) B is PSD, or
* a separator M (trace-one PSD) with sum_ij B_ij (x) M_ij PSD and
  <A, M> < 0, from which an explicit evaluation point, projection and
  witness vector are assembled and re-verified from scratch.

A failed certificate search is never treated as a refutation on its own:
only a verified counterexample refutes, and only a verified certificate
confirms; everything else is reported inconclusive.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import PreconditionViolated, ShapeMismatch, SlaterViolated, VerificationFailed
from .linalg import (
    DEFAULT_BUDGET,
    DEFAULT_SEED,
    DEFAULT_TOL,
    DEFAULT_TOL_STRICT,
    fro,
    is_psd,
    lambda_min,
    min_eigpair,
    psd_factor,
    spectraplex_project,
    supergradient_ascent,
    symmetrize,
)
from .cpmaps import ChoiMatrix, identity_choi, new_choi
from .poly import (
    GENERAL,
    MatTuple,
    NCQuadPoly,
    coefficient_matrix,
    direct_sum_repeat,
    evaluate,
    evaluate_compressed,
    evaluate_hereditary,
    new_quad_poly,
    new_tuple,
    pad_coefficients,
)


@dataclass(frozen=True)
class CPCertificate:
    """Trace-normalized Choi matrix whose residual coefficient matrix is PSD."""

    J: ChoiMatrix
    residual: np.ndarray = field(repr=False)
    residual_lambda_min: float = 0.0


@dataclass(frozen=True)
class Counterexample:
    """Refutation of the projected domination condition.

    X is a symmetric (r+q)-dimensional tuple, P the square projection onto
    its last q coordinates, and E the vector sum_i e_i (x) e_i; the
    compressed g(X) is PSD while E^T (compressed f(X)) E = violation < 0.
    """

    M: np.ndarray = field(repr=False)
    rank: int = 0
    X: Optional[MatTuple] = None
    P: Optional[np.ndarray] = field(default=None, repr=False)
    E: Optional[np.ndarray] = field(default=None, repr=False)
    violation: float = 0.0


@dataclass(frozen=True)
class HereditaryCounterexample:
    """Refutation of hereditary domination: g(X) PSD but E^T f(X) E < 0."""

    M: np.ndarray = field(repr=False)
    rank: int = 0
    X: Optional[MatTuple] = None
    E: Optional[np.ndarray] = field(default=None, repr=False)
    violation: float = 0.0


@dataclass(frozen=True)
class HomogenizationResult:
    feasible: bool
    h_blocks: np.ndarray = field(repr=False)  # H_i0 per variable, shape (m, q, q)
    coefficient: np.ndarray = field(repr=False)  # (m+1)q coefficient matrix of h
    lambda_min: float = 0.0


@dataclass(frozen=True)
class CertifySearch:
    certificate: Optional[CPCertificate]
    best_value: float


@dataclass(frozen=True)
class SeparatorSearch:
    M: Optional[np.ndarray]
    best_value: float
    b_margin: float = -np.inf
    a_value: float = np.inf


@dataclass(frozen=True)
class Decision:
    kind: str  # "certificate" | "counterexample" | "inconclusive"
    certificate: Optional[CPCertificate] = None
    counterexample: object = None
    diagnostics: dict = field(default_factory=dict)


def reconcile(f: NCQuadPoly, g: NCQuadPoly):
    """Equalize coefficient dimensions: pad f, or repeat g blockwise then pad f."""
    if f.m != g.m:
        raise ShapeMismatch(f"f has m={f.m} but g has m={g.m}")
    if f.q == g.q:
        return f, g
    if f.q < g.q:
        return pad_coefficients(f, g.q), g
    k = math.ceil(f.q / g.q)
    g2 = direct_sum_repeat(g, k)
    return pad_coefficients(f, g2.q), g2


def _map_coefficients(J: np.ndarray, blocks: np.ndarray, q: int) -> np.ndarray:
    """(1_m (x) phi_J) applied to coefficient blocks, assembled as an mq x mq matrix."""
    m = blocks.shape[0]
    J4 = J.reshape(q, q, q, q)
    out = np.einsum("acbd,ijcd->iajb", J4, blocks)
    return out.reshape(m * q, m * q)


def _b_term(M: np.ndarray, blocks: np.ndarray, q: int) -> np.ndarray:
    """sum_ij B_ij (x) M_ij for a separator candidate M (an mq x mq matrix)."""
    m = blocks.shape[0]
    M4 = M.reshape(m, q, m, q).transpose(0, 2, 1, 3)
    out = np.einsum("ijab,ijcd->acbd", blocks, M4)
    return out.reshape(q * q, q * q)


def _certify_oracle(calA: np.ndarray, blocks: np.ndarray, q: int):
    m = blocks.shape[0]

    def oracle(J):
        R = calA - _map_coefficients(J, blocks, q)
        val, v = min_eigpair(R)
        W = np.outer(v, v).reshape(m, q, m, q).transpose(0, 2, 1, 3)
        G = -np.einsum("ijab,ijcd->acbd", W, blocks).reshape(q * q, q * q)
        return val, (G + G.T) / 2.0

    return oracle


def certify(
    f: NCQuadPoly,
    g: NCQuadPoly,
    budget: int = DEFAULT_BUDGET,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
) -> CertifySearch:
    """Search for a trace-one PSD Choi matrix J with A - (1_m (x) phi_J) B PSD.

    Maximizes the concave objective J -> lambda_min(A - (1 (x) phi_J) B)
    over the spectraplex, restarting from the scaled identity map, the
    maximally mixed point and a seeded random point.  A best value >= -tol
    yields a certificate; otherwise the best value is returned as a
    (one-sided) diagnostic; it is not a proof that no certificate exists.
    """
    if f.m != g.m or f.q != g.q:
        raise ShapeMismatch("certify requires matching (m, q); reconcile first")
    q = f.q
    calA = coefficient_matrix(f)
    oracle = _certify_oracle(calA, g.blocks, q)
    rng = np.random.default_rng(seed)
    inits = [
        identity_choi(q).J / q,
        np.eye(q * q) / (q * q),
    ]
    raw = rng.standard_normal((q * q, q * q))
    inits.append((raw + raw.T) / 2.0)

    best_v, best_J = -np.inf, None
    share = max(1, budget // len(inits))
    for J0 in inits:
        J, v, _ = supergradient_ascent(
            oracle, spectraplex_project(J0), share,
            project=spectraplex_project, target=0.0,
        )
        if v > best_v:
            best_v, best_J = v, J
        if best_v >= 0.0:
            break

    if best_v < -tol:
        return CertifySearch(certificate=None, best_value=best_v)
    J = best_J / np.trace(best_J)
    residual = symmetrize(calA - _map_coefficients(J, g.blocks, q))
    return CertifySearch(
        certificate=CPCertificate(
            J=new_choi(J, q, q),
            residual=residual,
            residual_lambda_min=lambda_min(residual),
        ),
        best_value=best_v,
    )


def find_separator(
    f: NCQuadPoly,
    g: NCQuadPoly,
    budget: int = DEFAULT_BUDGET,
    tol: float = DEFAULT_TOL,
    tol_strict: float = DEFAULT_TOL_STRICT,
    seed: int = DEFAULT_SEED,
) -> SeparatorSearch:
    """Search for a trace-one PSD M with sum B_ij (x) M_ij PSD and <A, M> < 0.

    Maximizes min(lambda_min(sum B_ij (x) M_ij), -<A, M>/c) with
    c = 1 + ||A||_F; success requires the optimum to clear tol_strict/c so
    both separator inequalities hold with a quantitative margin.
    """
    if f.m != g.m or f.q != g.q:
        raise ShapeMismatch("find_separator requires matching (m, q); reconcile first")
    q, m = f.q, f.m
    calA = coefficient_matrix(f)
    c = 1.0 + fro(calA)
    Bb = g.blocks

    def oracle(M):
        T = _b_term(M, Bb, q)
        t1, v = min_eigpair(T)
        t2 = -float(np.sum(calA * M)) / c
        if t1 <= t2:
            W = np.outer(v, v).reshape(q, q, q, q)
            G = np.einsum("ijab,acbd->icjd", Bb, W).reshape(m * q, m * q)
            return t1, (G + G.T) / 2.0
        return t2, -calA / c

    margin = tol_strict / c
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((m * q, m * q))
    inits = [np.eye(m * q) / (m * q), (raw + raw.T) / 2.0]
    best_v, best_M = -np.inf, None
    share = max(1, budget // len(inits))
    for M0 in inits:
        M, v, _ = supergradient_ascent(
            oracle, spectraplex_project(M0), share,
            project=spectraplex_project, target=2.0 * margin,
        )
        if v > best_v:
            best_v, best_M = v, M
        if best_v >= 2.0 * margin:
            break

    M = best_M
    T = _b_term(M, Bb, q)
    b_margin = lambda_min(T)
    a_value = float(np.sum(calA * M))
    if best_v < margin or not is_psd(T, tol) or a_value > -tol_strict:
        return SeparatorSearch(M=None, best_value=best_v, b_margin=b_margin, a_value=a_value)
    return SeparatorSearch(M=M, best_value=best_v, b_margin=b_margin, a_value=a_value)


def _factor_rows(M: np.ndarray, q: int, cutoff: float):
    """Factor M = V V^T and slice V into per-variable q x r pieces."""
    V = psd_factor(M, cutoff)
    r = V.shape[1]
    m = M.shape[0] // q
    return [V[i * q : (i + 1) * q, :] for i in range(m)], r


def build_counterexample(
    f: NCQuadPoly,
    g: NCQuadPoly,
    M,
    tol: float = DEFAULT_TOL,
    tol_strict: float = DEFAULT_TOL_STRICT,
) -> Counterexample:
    """Assemble and verify the explicit refutation carried by a separator M.

    With M = sum_k v_k v_k^T, the evaluation point consists of bordered
    symmetric matrices pairing the rank directions against the last q
    coordinates, so that P X_i X_j P reproduces the blocks M_ij exactly;
    the compressed g is then PSD by the separator inequality while the
    witness E = sum_i e_i (x) e_i evaluates the compressed f to <A, M> < 0.
    All three facts are re-verified from scratch before returning, with one
    retry at a 10x finer rank cutoff.
    """
    M = symmetrize(M)
    q, m = f.q, f.m
    if M.shape != (m * q, m * q):
        raise ShapeMismatch(f"separator must be {(m * q, m * q)}, got {M.shape}")
    if not is_psd(M, tol):
        raise PreconditionViolated("separator is not PSD")
    if not is_psd(_b_term(M, g.blocks, q), tol):
        raise PreconditionViolated("sum B_ij (x) M_ij is not PSD")
    calA = coefficient_matrix(f)
    if float(np.sum(calA * M)) > -tol_strict:
        raise PreconditionViolated("<A, M> is not strictly negative")

    last_error = None
    for cutoff in (tol, tol / 10.0):
        rows, r = _factor_rows(M, q, cutoff)
        n = r + q
        mats = np.zeros((m, n, n))
        for i in range(m):
            mats[i, :r, r:] = rows[i].T
            mats[i, r:, :r] = rows[i]
        X = new_tuple(mats, kind="symmetric")
        P = np.zeros((n, n))
        P[r:, r:] = np.eye(q)
        E = np.eye(q).reshape(-1)

        comp_g = evaluate_compressed(g, X, P)
        rect = P[:, r:]
        comp_f = evaluate_compressed(f, X, rect)
        violation = float(E @ comp_f @ E)

        block_err = 0.0
        for i in range(m):
            for j in range(m):
                Mij = M[i * q : (i + 1) * q, j * q : (j + 1) * q]
                block_err = max(block_err, fro(rows[i] @ rows[j].T - Mij))

        if is_psd(comp_g, tol) and violation <= -tol_strict and block_err <= 1e-8:
            return Counterexample(M=M, rank=r, X=X, P=P, E=E, violation=violation)
        last_error = (
            f"lambda_min(compressed g)={lambda_min(comp_g):.3e}, "
            f"violation={violation:.3e}, block error={block_err:.3e}"
        )
    raise VerificationFailed(f"counterexample checks failed: {last_error}")


def build_counterexample_hereditary(
    f: NCQuadPoly,
    g: NCQuadPoly,
    M,
    tol: float = DEFAULT_TOL,
    tol_strict: float = DEFAULT_TOL_STRICT,
) -> HereditaryCounterexample:
    """Refutation for the hereditary setting: rectangular factors, no projection.

    The variables are the zero-padded q x r factor slices of M, so
    X_i X_j^T embeds M_ij directly and g(X) is PSD outright; the witness
    E' = sum_i e_i (x) f_i evaluates f(X) to <A, M> < 0.
    """
    M = symmetrize(M)
    q, m = f.q, f.m
    if M.shape != (m * q, m * q):
        raise ShapeMismatch(f"separator must be {(m * q, m * q)}, got {M.shape}")
    if not is_psd(M, tol):
        raise PreconditionViolated("separator is not PSD")
    if not is_psd(_b_term(M, g.blocks, q), tol):
        raise PreconditionViolated("sum B_ij (x) M_ij is not PSD")
    calA = coefficient_matrix(f)
    if float(np.sum(calA * M)) > -tol_strict:
        raise PreconditionViolated("<A, M> is not strictly negative")

    last_error = None
    for cutoff in (tol, tol / 10.0):
        rows, r = _factor_rows(M, q, cutoff)
        n = max(r, q)
        mats = np.zeros((m, n, n))
        for i in range(m):
            mats[i, :q, :r] = rows[i]
        X = new_tuple(mats, kind=GENERAL)
        E = np.eye(q, n).reshape(-1)

        g_eval = evaluate_hereditary(g, X)
        f_eval = evaluate_hereditary(f, X)
        violation = float(E @ f_eval @ E)

        block_err = 0.0
        for i in range(m):
            for j in range(m):
                Mij = M[i * q : (i + 1) * q, j * q : (j + 1) * q]
                embedded = np.zeros((n, n))
                embedded[:q, :q] = Mij
                block_err = max(block_err, fro(mats[i] @ mats[j].T - embedded))

        if is_psd(g_eval, tol) and violation <= -tol_strict and block_err <= 1e-8:
            return HereditaryCounterexample(M=M, rank=r, X=X, E=E, violation=violation)
        last_error = (
            f"lambda_min(g(X))={lambda_min(g_eval):.3e}, "
            f"violation={violation:.3e}, block error={block_err:.3e}"
        )
    raise VerificationFailed(f"hereditary counterexample checks failed: {last_error}")


def _check_slater(g: NCQuadPoly, slater: MatTuple, tol_strict: float, hereditary: bool):
    if slater.m != g.m:
        raise ShapeMismatch(f"slater tuple has m={slater.m}, g has m={g.m}")
    val = evaluate_hereditary(g, slater) if hereditary else evaluate(g, slater)
    lm = lambda_min(val)
    if lm <= tol_strict:
        raise SlaterViolated(f"lambda_min(g(slater)) = {lm:.3e} <= {tol_strict}")


SLICE = 500


def _decide_common(f, g, budget, tol, tol_strict, seed, hereditary):
    f2, g2 = reconcile(f, g)
    builder = build_counterexample_hereditary if hereditary else build_counterexample
    diagnostics = {"certify_best": -np.inf, "separator_best": -np.inf}
    rounds = max(1, math.ceil(budget / SLICE))
    for rnd in range(1, rounds + 1):
        slice_budget = min(budget, rnd * SLICE)
        cert = certify(f2, g2, budget=slice_budget, tol=tol, seed=seed)
        diagnostics["certify_best"] = max(diagnostics["certify_best"], cert.best_value)
        if cert.certificate is not None:
            return Decision(kind="certificate", certificate=cert.certificate,
                            diagnostics=diagnostics)
        sep = find_separator(f2, g2, budget=slice_budget, tol=tol,
                             tol_strict=tol_strict, seed=seed + 1)
        diagnostics["separator_best"] = max(diagnostics["separator_best"], sep.best_value)
        if sep.M is not None:
            try:
                ce = builder(f2, g2, sep.M, tol=tol, tol_strict=tol_strict)
            except VerificationFailed as exc:
                diagnostics["counterexample_error"] = str(exc)
                continue
            return Decision(kind="counterexample", counterexample=ce,
                            diagnostics=diagnostics)
    return Decision(kind="inconclusive", diagnostics=diagnostics)


def decide(
    f: NCQuadPoly,
    g: NCQuadPoly,
    slater: MatTuple,
    budget: int = DEFAULT_BUDGET,
    tol: float = DEFAULT_TOL,
    tol_strict: float = DEFAULT_TOL_STRICT,
    seed: int = DEFAULT_SEED,
) -> Decision:
    """Full decision for the projected domination question.

    Requires lambda_min(g(slater)) > tol_strict.  Coefficient dimensions are
    reconciled automatically (pad f, or replace g by repeated blocks).  The
    certificate search and the separator search alternate in budget slices,
    certificate side first; the first verified object wins, and only budget
    exhaustion on both sides yields an inconclusive report.
    """
    _check_slater(g, slater, tol_strict, hereditary=False)
    return _decide_common(f, g, budget, tol, tol_strict, seed, hereditary=False)


def decide_hereditary(
    f: NCQuadPoly,
    g: NCQuadPoly,
    slater: MatTuple,
    budget: int = DEFAULT_BUDGET,
    tol: float = DEFAULT_TOL,
    tol_strict: float = DEFAULT_TOL_STRICT,
    seed: int = DEFAULT_SEED,
) -> Decision:
    """Decision for hereditary domination (general, not-necessarily-symmetric tuples).

    The certificate condition is the same coefficient-matrix inequality; the
    counterexample uses the rectangular construction without projection.
    """
    _check_slater(g, slater, tol_strict, hereditary=True)
    return _decide_common(f, g, budget, tol, tol_strict, seed, hereditary=True)


def homogenize(
    quad: NCQuadPoly,
    linear,
    constant,
    budget: int = DEFAULT_BUDGET,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
) -> HomogenizationResult:
    """Search for a PSD homogenization of sum A_ij x_i x_j + sum A_i x_i + A_0.

    The homogenization introduces a variable x_0 with mixed blocks
    H_i0 = A_i/2 + K_i (K_i skew-symmetric, H_0i = H_i0^T), the only freedom
    allowed by H_i0 + H_0i = A_i and symmetry.  The concave function
    K -> lambda_min(coefficient matrix of h) is maximized by supergradient
    ascent over the unconstrained skew parameters; success means the
    optimum reaches -tol.
    """
    m, q = quad.m, quad.q
    linear = np.asarray(linear, dtype=float)
    if linear.shape != (m, q, q):
        raise ShapeMismatch(f"linear part must have shape {(m, q, q)}")
    lin = np.stack([symmetrize(linear[i]) for i in range(m)])
    A0 = symmetrize(constant)
    if A0.shape != (q, q):
        raise ShapeMismatch(f"constant part must be {q}x{q}")

    iu = np.triu_indices(q, 1)
    n_skew = len(iu[0])

    def unpack(x):
        Ks = np.zeros((m, q, q))
        for i in range(m):
            Ki = np.zeros((q, q))
            Ki[iu] = x[i * n_skew : (i + 1) * n_skew]
            Ks[i] = Ki - Ki.T
        return Ks

    def coeff(Ks):
        d = (m + 1) * q
        C = np.zeros((d, d))
        C[:q, :q] = A0
        for i in range(m):
            H = lin[i] / 2.0 + Ks[i]
            C[(i + 1) * q : (i + 2) * q, :q] = H
            C[:q, (i + 1) * q : (i + 2) * q] = H.T
        C[q:, q:] = coefficient_matrix(quad)
        return C

    def oracle(x):
        C = coeff(unpack(x))
        val, v = min_eigpair(C)
        W = np.outer(v, v)
        G = np.zeros_like(x)
        for i in range(m):
            Wi0 = W[(i + 1) * q : (i + 2) * q, :q]
            skew = Wi0 - Wi0.T
            G[i * n_skew : (i + 1) * n_skew] = 2.0 * skew[iu]
        return val, G

    x0 = np.zeros(m * n_skew)
    if n_skew == 0:
        best_x, best_v = x0, oracle(x0)[0]
    else:
        best_x, best_v, _ = supergradient_ascent(
            oracle, x0, budget, target=-0.1 * tol
        )
    Ks = unpack(best_x)
    C = coeff(Ks)
    lam = lambda_min(C)
    h_blocks = np.stack([lin[i] / 2.0 + Ks[i] for i in range(m)])
    return HomogenizationResult(
        feasible=bool(lam >= -tol),
        h_blocks=h_blocks,
        coefficient=C,
        lambda_min=lam,
    )


def homogenized_poly(quad: NCQuadPoly, result: HomogenizationResult) -> NCQuadPoly:
    """The homogenization as a polynomial in m+1 variables (x_0 first)."""
    m, q = quad.m, quad.q
    from .poly import blocks_from_matrix

    return new_quad_poly(blocks_from_matrix(result.coefficient, m + 1, q))


def verify_certificate(
    cert: CPCertificate,
    f: NCQuadPoly,
    g: NCQuadPoly,
    tol: float = DEFAULT_TOL,
    trials: int = 10,
    seed: int = DEFAULT_SEED,
) -> bool:
    """Independent re-check of a certificate against the instance it claims.

    Recomputes the residual from the inputs, re-runs both PSD tests and the
    trace normalization, and spot-checks f(X) - (phi (x) 1) g(X) on seeded
    random symmetric tuples of size up to 4.
    """
    try:
        f2, g2 = reconcile(f, g)
    except ShapeMismatch:
        return False
    q = f2.q
    J = cert.J
    if J.s != q or J.t != q:
        return False
    if abs(np.trace(J.J) - 1.0) > 1e-6:
        return False
    if not is_psd(J.J, tol):
        return False
    residual = symmetrize(coefficient_matrix(f2) - _map_coefficients(J.J, g2.blocks, q))
    if not is_psd(residual, tol):
        return False

    from .cpmaps import apply_map_blockwise

    rng = np.random.default_rng(seed)
    for _ in range(trials):
        n = int(rng.integers(1, 5))
        raw = rng.standard_normal((f2.m, n, n))
        X = new_tuple((raw + raw.transpose(0, 2, 1)) / 2.0, kind="symmetric")
        gap = evaluate(f2, X) - apply_map_blockwise(J, evaluate(g2, X), layout="outer")
        if not is_psd(gap, tol):
            return False
    return True


def verify_counterexample(
    ce,
    f: NCQuadPoly,
    g: NCQuadPoly,
    tol: float = DEFAULT_TOL,
    tol_strict: float = DEFAULT_TOL_STRICT,
) -> bool:
    """Re-check a counterexample's two inequalities from its stored evaluation point.

    Any structural inconsistency in the stored object (wrong shapes, missing
    pieces) counts as a failed verification rather than an error.
    """
    try:
        f2, g2 = reconcile(f, g)
        q = f2.q
        if isinstance(ce, HereditaryCounterexample):
            if ce.X is None or ce.X.m != f2.m:
                return False
            g_eval = evaluate_hereditary(g2, ce.X)
            f_eval = evaluate_hereditary(f2, ce.X)
            violation = float(ce.E @ f_eval @ ce.E)
            return bool(is_psd(g_eval, tol) and violation <= -tol_strict)
        if ce.X is None or ce.X.m != f2.m:
            return False
        r = ce.X.n - q
        if r < 0:
            return False
        comp_g = evaluate_compressed(g2, ce.X, ce.P)
        rect = ce.P[:, r:]
        comp_f = evaluate_compressed(f2, ce.X, rect)
        violation = float(ce.E @ comp_f @ ce.E)
        return bool(is_psd(comp_g, tol) and violation <= -tol_strict)
    except (ShapeMismatch, ValueError):
        return False
