"""Spectrum of the mixed pencil (A_loc + alpha*A_frac, M) for any real alpha.

For alpha >= 0 the bilinear form is coercive and the generalized
eigenproblem is classical.  For negative alpha coercivity can fail; it is
restored by the minimal shift gamma >= 0 making

    A_alpha + gamma M - (1/2) A_loc  positive semidefinite,

the discrete sharp version of the coercivity estimate
B(u, u) + gamma ||u||^2 >= (1/2) ||u||_H^2.  The spectrum is then read off
the resolvent of the shifted operator: with A_gamma = A_alpha + gamma M
factored as L L^T, the symmetric matrix L^{-1} M L^{-T} has eigenvalues
mu_k > 0, and lambda_k = 1/mu_k - gamma, with eigenvectors mapped back and
normalized in the M inner product.

The coupling threshold where lambda_1 changes sign is exactly
alpha* = -1/C_h, with C_h the largest eigenvalue of (A_frac, A_loc): the
discrete embedding constant.  ``locate_threshold`` recovers it by bisection
as an end-to-end consistency check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.optimize

from .errors import RequestError
from .fem import (
    Mesh1D,
    OperatorMatrix,
    assemble_fractional_stiffness,
    assemble_local_stiffness,
    assemble_mass,
)

__all__ = [
    "MixedPencil",
    "SpectrumResult",
    "SweepTable",
    "assemble_pencil",
    "embedding_constant",
    "gamma_shift",
    "solve_spectrum",
    "verify_variational_characterization",
    "sweep_alpha",
    "locate_threshold",
    "verify_brezis_inequality",
]

CLUSTER_RTOL = 1e-7


@dataclass(frozen=True)
class MixedPencil:
    """Matrices of the operator -u'' + alpha (-Delta)^s u on one mesh."""

    mesh: Mesh1D
    s: float
    alpha: float
    a_loc: OperatorMatrix
    a_frac: OperatorMatrix
    mass: OperatorMatrix
    a_alpha: np.ndarray

    def __post_init__(self):
        self.a_alpha.setflags(write=False)

    @property
    def n(self) -> int:
        return self.mesh.n

    def with_alpha(self, alpha: float) -> "MixedPencil":
        """Same mesh and assembled forms, different coupling."""
        alpha = float(alpha)
        return MixedPencil(
            mesh=self.mesh,
            s=self.s,
            alpha=alpha,
            a_loc=self.a_loc,
            a_frac=self.a_frac,
            mass=self.mass,
            a_alpha=self.a_loc.data + alpha * self.a_frac.data,
        )


def assemble_pencil(mesh: Mesh1D, s: float, alpha: float) -> MixedPencil:
    """Assemble mass, local and fractional forms and cache A_loc + alpha*A_frac."""
    a_loc = assemble_local_stiffness(mesh)
    a_frac = assemble_fractional_stiffness(mesh, s)
    mass = assemble_mass(mesh)
    alpha = float(alpha)
    return MixedPencil(
        mesh=mesh,
        s=float(s),
        alpha=alpha,
        a_loc=a_loc,
        a_frac=a_frac,
        mass=mass,
        a_alpha=a_loc.data + alpha * a_frac.data,
    )


def embedding_constant(pencil: MixedPencil) -> float:
    """Smallest C_h with u^T A_frac u <= C_h u^T A_loc u for all u.

    This is the largest eigenvalue of the pencil (A_frac, A_loc); its
    reciprocal marks the coupling threshold -1/C_h for the sign of lambda_1.
    """
    n = pencil.n
    top = scipy.linalg.eigh(
        pencil.a_frac.data, pencil.a_loc.data, subset_by_index=[n - 1, n - 1]
    )[0][0]
    return float(top)


def gamma_shift(pencil: MixedPencil) -> float:
    """Minimal gamma >= 0 with A_alpha + gamma M - A_loc/2 >= 0.

    Computed as max(0, largest eigenvalue of (A_loc/2 - A_alpha, M)); for
    alpha >= 0 the fractional form is positive semidefinite, the pencil
    maximum is negative, and gamma is exactly zero.
    """
    n = pencil.n
    deficit = 0.5 * pencil.a_loc.data - pencil.a_alpha
    top = scipy.linalg.eigh(deficit, pencil.mass.data, subset_by_index=[n - 1, n - 1])[0][0]
    return max(0.0, float(top))


@dataclass(frozen=True)
class SpectrumResult:
    """Eigenpairs of (A_alpha, M), ascending, M-orthonormal columns."""

    lambdas: np.ndarray
    vectors: np.ndarray
    gamma: float
    residuals: np.ndarray
    cluster_ids: np.ndarray

    def __post_init__(self):
        for name in ("lambdas", "vectors", "residuals", "cluster_ids"):
            getattr(self, name).setflags(write=False)

    @property
    def clusters(self) -> list[list[int]]:
        """Indices grouped by near-degeneracy (1-based k within the result)."""
        groups: list[list[int]] = []
        for idx, cid in enumerate(self.cluster_ids):
            if groups and cid == self.cluster_ids[idx - 1]:
                groups[-1].append(idx + 1)
            else:
                groups.append([idx + 1])
        return groups


def solve_spectrum(pencil: MixedPencil, k: int) -> SpectrumResult:
    """First k eigenpairs of A_alpha u = lambda M u through the shifted resolvent.

    gamma = gamma_shift(pencil) makes A_gamma = A_alpha + gamma M positive
    definite; its Cholesky factor L turns the pencil into the symmetric
    resolvent-like matrix S = L^{-1} M L^{-T} whose eigenvalues mu give
    lambda = 1/mu - gamma.  Eigenvectors are returned M-orthonormal with the
    sign fixed so the entry of largest magnitude is positive.
    """
    n = pencil.n
    if not 1 <= k <= n:
        raise RequestError(f"requested {k} eigenpairs from an n={n} pencil")
    gamma = gamma_shift(pencil)
    mass = pencil.mass.data
    chol = None
    for attempt_gamma in (gamma, gamma * (1.0 + 1e-8) + 1e-14 * _scale(pencil)):
        try:
            chol = scipy.linalg.cholesky(pencil.a_alpha + attempt_gamma * mass, lower=True)
            gamma = attempt_gamma
            break
        except scipy.linalg.LinAlgError:
            continue
    if chol is None:
        raise scipy.linalg.LinAlgError("shifted operator could not be factored")

    half = scipy.linalg.solve_triangular(chol, mass, lower=True)
    resolvent = scipy.linalg.solve_triangular(chol, half.T, lower=True)
    mu, w = scipy.linalg.eigh(0.5 * (resolvent + resolvent.T))
    # mu ascending > 0; lambda = 1/mu - gamma is ascending for mu reversed
    mu = mu[::-1][:k]
    w = w[:, ::-1][:, :k]
    lambdas = 1.0 / mu - gamma
    vectors = scipy.linalg.solve_triangular(chol, w, lower=True, trans="T")
    vectors /= np.sqrt(mu)[None, :]
    # sign convention: entry of largest magnitude positive
    lead = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[lead, np.arange(k)])
    signs[signs == 0.0] = 1.0
    vectors = vectors * signs[None, :]

    residuals = np.linalg.norm(
        pencil.a_alpha @ vectors - mass @ vectors * lambdas[None, :], axis=0
    )
    cluster_ids = np.zeros(k, dtype=int)
    for j in range(1, k):
        close = lambdas[j] - lambdas[j - 1] <= CLUSTER_RTOL * (1.0 + abs(lambdas[j]))
        cluster_ids[j] = cluster_ids[j - 1] + (0 if close else 1)
    return SpectrumResult(
        lambdas=lambdas, vectors=vectors, gamma=gamma, residuals=residuals,
        cluster_ids=cluster_ids,
    )


def _scale(pencil: MixedPencil) -> float:
    return float(np.max(np.abs(pencil.a_alpha)))


def verify_variational_characterization(
    result: SpectrumResult, pencil: MixedPencil, *, samples: int = 1000, rng=None
) -> dict:
    """Sample the min-max characterization of every computed eigenvalue.

    For each k, random vectors are projected onto the complement (with
    respect to the bilinear form, realized through the M inner product
    against the eigenvectors with nonzero eigenvalue) of the first k-1
    eigenvectors; every Rayleigh quotient must stay above
    lambda_k - 1e-8 (1 + |lambda_k|), and u_k itself must attain lambda_k.
    The eigenvector quotient is included in the reported sampled minimum.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    a_mat = pencil.a_alpha
    mass = pencil.mass.data
    k = result.lambdas.size
    per_k = []
    ok = True
    for j in range(1, k + 1):
        lam = result.lambdas[j - 1]
        tol = 1e-8 * (1.0 + abs(lam))
        z = rng.standard_normal((pencil.n, samples))
        if j > 1:
            u_prev = result.vectors[:, : j - 1]
            active = np.abs(result.lambdas[: j - 1]) != 0.0
            basis = u_prev[:, active]
            if basis.size:
                z = z - basis @ (basis.T @ (mass @ z))
        num = np.einsum("ij,ij->j", z, a_mat @ z)
        den = np.einsum("ij,ij->j", z, mass @ z)
        good = den > 1e-12 * np.max(den)
        quotients = num[good] / den[good]
        u_k = result.vectors[:, j - 1]
        attained = float(u_k @ a_mat @ u_k) / float(u_k @ mass @ u_k)
        sampled_min = float(np.min(quotients)) if quotients.size else attained
        sampled_min = min(sampled_min, attained)
        holds = sampled_min >= lam - tol and abs(attained - lam) <= tol
        ok = ok and holds
        per_k.append(
            {"k": j, "lambda": float(lam), "sampled_min": sampled_min,
             "attained": attained, "holds": bool(holds)}
        )
    return {"op": "variational_characterization", "holds": ok, "per_k": per_k}


@dataclass(frozen=True)
class SweepTable:
    """Per-alpha spectra: lambdas has one row per alpha, one column per k."""

    alphas: np.ndarray
    gammas: np.ndarray
    lambdas: np.ndarray
    signs: np.ndarray

    def __post_init__(self):
        for name in ("alphas", "gammas", "lambdas", "signs"):
            getattr(self, name).setflags(write=False)


def sweep_alpha(mesh: Mesh1D, s: float, alphas, k: int) -> SweepTable:
    """Solve the pencil for every coupling in ``alphas`` (ascending or not)."""
    alphas = np.asarray(alphas, dtype=float)
    if alphas.size == 0:
        raise RequestError("alpha sweep needs at least one value")
    if not np.all(np.isfinite(alphas)):
        raise RequestError("alpha values must be finite")
    base = assemble_pencil(mesh, s, 0.0)
    gammas = np.empty(alphas.size)
    lams = np.empty((alphas.size, k))
    for i, alpha in enumerate(alphas):
        res = solve_spectrum(base.with_alpha(alpha), k)
        gammas[i] = res.gamma
        lams[i] = res.lambdas
    return SweepTable(
        alphas=alphas.copy(), gammas=gammas, lambdas=lams,
        signs=np.sign(lams[:, 0]).astype(int),
    )


def _lambda_1(pencil: MixedPencil) -> float:
    gamma = gamma_shift(pencil)
    nu = scipy.linalg.eigh(
        pencil.a_alpha + gamma * pencil.mass.data, pencil.mass.data,
        subset_by_index=[0, 0],
    )[0][0]
    return float(nu) - gamma


def locate_threshold(mesh: Mesh1D, s: float, *, rel_tol: float = 1e-9) -> dict:
    """Bisect the sign change of lambda_1(alpha); it must land on -1/C_h."""
    base = assemble_pencil(mesh, s, 0.0)
    c_h = embedding_constant(base)
    lo, hi = -2.0 / c_h, 0.0
    if not _lambda_1(base.with_alpha(lo)) < 0.0 < _lambda_1(base.with_alpha(hi)):
        raise RequestError("bisection bracket does not straddle the sign change")
    while hi - lo > rel_tol / c_h:
        mid = 0.5 * (lo + hi)
        if _lambda_1(base.with_alpha(mid)) > 0.0:
            hi = mid
        else:
            lo = mid
    alpha_star = 0.5 * (lo + hi)
    return {
        "alpha_star": alpha_star,
        "minus_inv_c": -1.0 / c_h,
        "embedding_constant": c_h,
        "difference": alpha_star + 1.0 / c_h,
    }


def verify_brezis_inequality(
    mesh: Mesh1D, s: float, trials: int, *, rng=None, ascent: bool = True
) -> dict:
    """Sampled sharpness of u^T A_frac u <= C (u^T M u)^(1-s) (u^T (M+A_loc) u)^s.

    Draws standard normal coefficient vectors, reports the largest ratio,
    and (optionally) polishes the best sample by local ascent on the log
    ratio.  The maximum is reported, not asserted against any continuum
    constant; across mesh refinement it should stay stable.
    """
    if trials < 1:
        raise RequestError(f"need at least one trial, got {trials}")
    rng = np.random.default_rng(0) if rng is None else rng
    a_frac = assemble_fractional_stiffness(mesh, s).data
    mass = assemble_mass(mesh).data
    w12 = mass + assemble_local_stiffness(mesh).data

    z = rng.standard_normal((mesh.n, trials))
    num = np.einsum("ij,ij->j", z, a_frac @ z)
    den = (
        np.einsum("ij,ij->j", z, mass @ z) ** (1.0 - s)
        * np.einsum("ij,ij->j", z, w12 @ z) ** s
    )
    ratios = num / den
    best = int(np.argmax(ratios))
    max_ratio = float(ratios[best])
    u_best = z[:, best]

    if ascent:
        def neg_log_ratio(u):
            qf = float(u @ a_frac @ u)
            qm = float(u @ mass @ u)
            qw = float(u @ w12 @ u)
            if min(qf, qm, qw) <= 0.0:
                return np.inf, np.zeros_like(u)
            value = -(math.log(qf) - (1.0 - s) * math.log(qm) - s * math.log(qw))
            grad = -(2.0 * (a_frac @ u) / qf
                     - 2.0 * (1.0 - s) * (mass @ u) / qm
                     - 2.0 * s * (w12 @ u) / qw)
            return value, grad

        opt = scipy.optimize.minimize(
            neg_log_ratio, u_best, jac=True, method="L-BFGS-B",
            options={"maxiter": 500, "ftol": 1e-14, "gtol": 1e-12},
        )
        if np.isfinite(opt.fun):
            max_ratio = max(max_ratio, math.exp(-float(opt.fun)))

    pencil = assemble_pencil(mesh, s, 0.0)
    return {
        "op": "brezis_ratio",
        "s": s,
        "n": mesh.n,
        "trials": trials,
        "max_ratio": max_ratio,
        "c_h_reference": embedding_constant(pencil),
    }
