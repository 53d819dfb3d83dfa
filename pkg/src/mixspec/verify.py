"""Desk-scale invariant suites behind the ``verify`` command.

Every suite re-checks the documented contracts of one area at sizes small
enough to finish in seconds (n <= 64 meshes, couples of dimension <= 10),
drawing all randomness from a seeded generator so reruns are
byte-reproducible.  A suite stops at its first counterexample and
serializes it.
"""

from __future__ import annotations

import math

import numpy as np

from . import exchange, interpolation, reference, spectral
from . import fem

__all__ = ["SUITES", "run_suites", "check_matrix_file"]


def _result(name, details, counterexample=None):
    return {
        "name": name,
        "passed": counterexample is None,
        "details": details,
        "counterexample": counterexample,
    }


def _random_spd(dim, rng, spread=10.0):
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    vals = np.exp(rng.uniform(-math.log(spread), math.log(spread), dim))
    return q @ np.diag(vals) @ q.T


# ----------------------------------------------------------------------------
# fem suites
# ----------------------------------------------------------------------------

def suite_fem_structure(rng):
    name = "fem_structure"
    details = {}
    mesh = fem.build_mesh(0.0, 1.0, 16)
    mass = fem.assemble_mass(mesh).data
    loc = fem.assemble_local_stiffness(mesh).data
    h = mesh.h
    if not (np.allclose(np.diag(mass), 2 * h / 3, rtol=0, atol=0)
            and np.allclose(np.diag(mass, 1), h / 6, rtol=0, atol=0)):
        return _result(name, details, {"check": "mass closed form"})
    if abs(np.sum(mass[8]) - h) > 1e-15:
        return _result(name, details, {"check": "mass interior row sum", "value": float(np.sum(mass[8]))})
    if abs(np.sum(loc[8])) > 1e-12 / h:
        return _result(name, details, {"check": "stiffness interior row sum"})

    for s in (0.1, 0.25, 0.5, 0.75, 0.9):
        for n in (7, 31, 64):
            mesh = fem.build_mesh(0.0, 1.0, n)
            mat = fem.assemble_fractional_stiffness(mesh, s)
            again = fem.assemble_fractional_stiffness(mesh, s)
            if not np.array_equal(mat.data, again.data):
                return _result(name, details, {"check": "determinism", "n": n, "s": s})
            col = mat.data[:, 0]
            for d in range(n):
                off = np.diagonal(mat.data, d)
                if np.any(off != col[d]):
                    return _result(name, details, {"check": "toeplitz", "n": n, "s": s, "offset": d})
            min_eig = float(np.linalg.eigvalsh(mat.data)[0])
            bound = -1e-10 * float(np.max(np.abs(mat.data)))
            if min_eig < bound:
                return _result(name, details, {"check": "psd", "n": n, "s": s, "min_eig": min_eig})
        a1 = fem.assemble_fractional_stiffness(fem.build_mesh(0.0, 1.0, 6), s).data
        a2 = fem.assemble_fractional_stiffness(fem.build_mesh(0.0, 2.0, 6), s).data
        dev = float(np.max(np.abs(a2 / a1 - 2.0 ** (1.0 - 2.0 * s))))
        details[f"scaling_dev_s={s}"] = dev
        if dev > 1e-10:
            return _result(name, details, {"check": "scaling", "s": s, "dev": dev})
    return _result(name, details)


def suite_fem_oracle(rng):
    name = "fem_oracle"
    details = {}
    for n, s in ((4, 0.5), (2, 0.75), (3, 0.25)):
        mesh = fem.build_mesh(0.0, 1.0, n)
        fast = fem.assemble_fractional_stiffness(mesh, s).data
        slow = reference.fractional_matrix_quadrature(mesh, s)
        rel = float(np.max(np.abs(fast - slow)) / np.max(np.abs(slow)))
        details[f"rel_n={n}_s={s}"] = rel
        if rel > 1e-6:
            return _result(name, details, {"check": "oracle agreement", "n": n, "s": s, "rel": rel})
    mesh = fem.build_mesh(0.0, 1.0, 4)
    u = rng.standard_normal(4)
    mat = fem.assemble_fractional_stiffness(mesh, 0.3)
    fast = fem.gagliardo_seminorm(fem.DiscreteFunction(mesh, u), mat)
    slow = math.sqrt(reference.gagliardo_form_quadrature(mesh, u, u, 0.3))
    rel = abs(fast - slow) / slow
    details["seminorm_rel"] = rel
    if rel > 1e-5:
        return _result(name, details, {"check": "seminorm oracle", "rel": rel})
    return _result(name, details)


def suite_lebesgue(rng):
    name = "lebesgue"
    exps = [1.0, 1.5, 2.0, 3.0, 4.0, 8.0, math.inf]
    checked = 0
    for _ in range(1000):
        size = int(rng.integers(2, 12))
        f = np.abs(rng.standard_normal(size)) * np.exp(rng.uniform(-2, 2))
        w = np.exp(rng.uniform(-2.0, 2.0, size))
        p, q = sorted(rng.choice(exps, size=2, replace=True))
        r = p if p == q else float(np.clip(np.exp(rng.uniform(np.log(p), np.log(min(q, 64.0)))), p, q))
        rep = fem.check_lebesgue_interpolation(f, w, p, q, r)
        checked += 1
        if not rep.holds:
            return _result(name, {"checked": checked},
                           {"p": p, "q": q, "r": r, "lhs": rep.lhs, "rhs": rep.rhs})
    # equality cases: constants on unit mass, indicators of sub-blocks
    w = np.full(4, 0.25)
    rep = fem.check_lebesgue_interpolation(np.full(4, 3.7), w, 1.0, 4.0, 2.0)
    if abs(rep.lhs - rep.rhs) > 1e-12:
        return _result(name, {"checked": checked}, {"case": "constant", "gap": rep.lhs - rep.rhs})
    f = np.array([1.0, 1.0, 0.0, 0.0])
    rep = fem.check_lebesgue_interpolation(f, w, 1.0, 4.0, 2.0)
    if abs(rep.lhs - rep.rhs) > 1e-12:
        return _result(name, {"checked": checked}, {"case": "indicator", "gap": rep.lhs - rep.rhs})
    return _result(name, {"checked": checked})


# ----------------------------------------------------------------------------
# interpolation suites
# ----------------------------------------------------------------------------

def suite_k_functional(rng):
    name = "k_functional"
    details = {"curves": 0, "samples": 0}
    xs_grid = np.geomspace(1e-6, 1e6, 64)
    for _ in range(12):
        dim = int(rng.integers(2, 9))
        couple = interpolation.couple_from_grams(_random_spd(dim, rng), _random_spd(dim, rng))
        f = rng.standard_normal(dim)
        ks = interpolation.k_functional_samples(couple, f, xs_grid)
        bound = np.minimum(couple.norm_x(f), xs_grid * couple.norm_y(f))
        if np.any(np.diff(ks) < -1e-9 * ks[1:]):
            return _result(name, details, {"check": "K nondecreasing"})
        ratio = ks / xs_grid
        if np.any(np.diff(ratio) > 1e-9 * ratio[:-1]):
            return _result(name, details, {"check": "K/x nonincreasing"})
        if np.any(ks > bound + 1e-10 * np.maximum(bound, 1e-300)):
            return _result(name, details, {"check": "K <= min bound"})
        k2s = interpolation.k2_functional_samples(couple, f, xs_grid)
        if np.any(k2s > ks * (1 + 1e-9)) or np.any(ks > math.sqrt(2.0) * k2s + 1e-9 * np.max(ks)):
            return _result(name, details, {"check": "bracketing on curve"})
        details["curves"] += 1
    for _ in range(1000):
        dim = int(rng.integers(1, 7))
        couple = interpolation.couple_from_grams(_random_spd(dim, rng), _random_spd(dim, rng))
        f = rng.standard_normal(dim)
        x = float(np.exp(rng.uniform(-6.0, 6.0)))
        k = interpolation.k_functional(couple, f, x)
        k2 = interpolation.k2_functional(couple, f, x)
        if not (k2 <= k * (1 + 1e-9) and k <= math.sqrt(2.0) * k2 * (1 + 1e-9)):
            return _result(name, details, {"check": "bracketing", "x": x, "K": k, "K2": k2})
        rep = interpolation.symmetry_check(couple, f, x)
        if not rep.holds:
            return _result(name, details, {"check": "symmetry", "x": x, "discrepancy": rep.ratio})
        details["samples"] += 1
    return _result(name, details)


def suite_interpolation_norms(rng):
    name = "interpolation_norms"
    details = {}
    worst_closed = 0.0
    for _ in range(100):
        dim = int(rng.integers(2, 9))
        couple = interpolation.couple_from_grams(_random_spd(dim, rng), _random_spd(dim, rng))
        f = rng.standard_normal(dim)
        s = float(rng.choice([0.25, 0.5, 0.75]))
        got = interpolation.interpolation_norm(couple, f, s, 2, "K2")
        ref = interpolation.spectral_s_norm(couple, f, s)
        worst_closed = max(worst_closed, abs(got - ref) / ref)
    details["closed_form_worst_rel"] = worst_closed
    if worst_closed > 1e-5:
        return _result(name, details, {"check": "closed form", "rel": worst_closed})

    worst_sym = 0.0
    for _ in range(3):
        dim = 5
        couple = interpolation.couple_from_grams(_random_spd(dim, rng), _random_spd(dim, rng))
        swapped = couple.swapped()
        f = rng.standard_normal(dim)
        for s in (0.25, 0.5, 0.75):
            for p in (1.0, 2.0, math.inf):
                a = interpolation.interpolation_norm(couple, f, s, p, "K")
                b = interpolation.interpolation_norm(swapped, f, 1.0 - s, p, "K")
                worst_sym = max(worst_sym, abs(a - b) / max(a, 1e-300))
    details["symmetry_worst_rel"] = worst_sym
    if worst_sym > 1e-6:
        return _result(name, details, {"check": "norm symmetry", "rel": worst_sym})

    couple = interpolation.couple_from_grams(_random_spd(6, rng), _random_spd(6, rng))
    f = rng.standard_normal(6)
    base = interpolation.interpolation_norm(couple, f, 0.4, 2, "K")
    scaled = interpolation.interpolation_norm(couple, 3.0 * f, 0.4, 2, "K")
    hom = abs(scaled - 3.0 * base) / (3.0 * base)
    details["homogeneity_rel"] = hom
    if hom > 1e-12:
        return _result(name, details, {"check": "homogeneity", "rel": hom})

    for _ in range(1000):
        dim = int(rng.integers(1, 8))
        mu = np.exp(rng.uniform(0.0, math.log(100.0), dim))
        c2 = rng.standard_normal(dim) ** 2
        s1, s2 = sorted(rng.uniform(0.05, 0.95, 2))
        if s1 == s2:
            continue
        if np.sum(mu**s1 * c2) > np.sum(mu**s2 * c2) * (1 + 1e-12):
            return _result(name, details, {"check": "inclusion domination", "s1": s1, "s2": s2})
    couple = interpolation.couple_from_grams(np.eye(4), np.diag([1.0, 4.0, 25.0, 81.0]))
    rep = interpolation.check_inclusion_monotonicity(couple, rng.standard_normal(4), 0.2, 0.8, 2)
    if not rep.holds:
        return _result(name, details, {"check": "inclusion report", "ratio": rep.ratio})
    return _result(name, details)


def suite_operator_interpolation(rng):
    name = "operator_interpolation"
    details = {"cases": 0}
    worst = 0.0
    for _ in range(100):
        dim = int(rng.integers(2, 11))
        c0 = interpolation.couple_from_grams(_random_spd(dim, rng), _random_spd(dim, rng))
        c1 = interpolation.couple_from_grams(_random_spd(dim, rng), _random_spd(dim, rng))
        t_mat = rng.standard_normal((dim, dim))
        s = float(rng.uniform(0.05, 0.95))
        rep = interpolation.check_operator_interpolation(t_mat, c0, c1, s, 2, "K2")
        worst = max(worst, rep.ratio)
        details["cases"] += 1
        if not rep.holds:
            return _result(name, details, {"check": "power-s bound", "s": s, "ratio": rep.ratio})
    details["worst_ratio"] = worst
    couple = interpolation.couple_from_grams(_random_spd(5, rng), _random_spd(5, rng))
    rep = interpolation.check_operator_interpolation(2.5 * np.eye(5), couple, couple, 0.33, 2, "K2")
    details["tight_ratio_minus_1"] = rep.ratio - 1.0
    if abs(rep.lhs - rep.rhs) > 1e-10 * rep.rhs:
        return _result(name, details, {"check": "tight identity case", "gap": rep.lhs - rep.rhs})
    return _result(name, details)


# ----------------------------------------------------------------------------
# spectral suites
# ----------------------------------------------------------------------------

def suite_spectrum_contract(rng):
    name = "spectrum_contract"
    details = {}
    mesh = fem.build_mesh(0.0, 1.0, 63)
    base = spectral.assemble_pencil(mesh, 0.5, 0.0)
    c_h = spectral.embedding_constant(base)
    details["embedding_constant"] = c_h
    mass = base.mass.data
    for alpha in (-50.0, -1.1 / c_h, -0.5 / c_h, 0.0, 1.0, 10.0):
        pencil = base.with_alpha(alpha)
        res = spectral.solve_spectrum(pencil, 5)
        lam = res.lambdas
        if np.any(np.diff(lam) < -1e-12 * (1.0 + np.abs(lam[1:]))):
            return _result(name, details, {"check": "ascending", "alpha": alpha})
        if not lam[0] > -res.gamma:
            return _result(name, details, {"check": "lower bound", "alpha": alpha,
                                           "lambda_1": float(lam[0]), "gamma": res.gamma})
        v = res.vectors
        m_err = float(np.max(np.abs(v.T @ mass @ v - np.eye(5))))
        b_mat = v.T @ pencil.a_alpha @ v
        b_err = float(np.max(np.abs(b_mat - np.diag(np.diag(b_mat)))))
        b_scale = float(np.max(np.abs(np.diag(b_mat))))
        res_bound = 1e-8 * (1.0 + np.abs(lam)) * float(np.max(np.abs(mass)))
        if m_err > 1e-8:
            return _result(name, details, {"check": "M-orthonormality", "alpha": alpha, "err": m_err})
        if b_err > 1e-6 * b_scale:
            return _result(name, details, {"check": "B-orthogonality", "alpha": alpha, "err": b_err})
        if np.any(res.residuals > res_bound):
            return _result(name, details, {"check": "residuals", "alpha": alpha})
        var = spectral.verify_variational_characterization(res, pencil, samples=1000, rng=rng)
        if not var["holds"]:
            return _result(name, details, {"check": "variational", "alpha": alpha, "per_k": var["per_k"]})
    res0 = spectral.solve_spectrum(base, 5)
    import scipy.linalg as sla
    direct = sla.eigh(base.a_loc.data, mass, subset_by_index=[0, 4])[0]
    red = float(np.max(np.abs(res0.lambdas - direct) / np.abs(direct)))
    details["alpha0_reduction_rel"] = red
    if red > 1e-10:
        return _result(name, details, {"check": "alpha=0 reduction", "rel": red})

    grid = np.linspace(-2.0 / c_h, 2.0 / c_h, 9)
    table = spectral.sweep_alpha(mesh, 0.5, grid, 3)
    if not np.all(np.diff(table.lambdas, axis=0) >= -1e-9 * (1.0 + np.abs(table.lambdas[1:]))):
        return _result(name, details, {"check": "eigenvalue monotonicity in alpha"})
    for alpha, lam1 in zip(table.alphas, table.lambdas[:, 0]):
        margin = alpha + 1.0 / c_h
        if abs(margin) > 1e-7 and np.sign(lam1) != np.sign(margin):
            return _result(name, details, {"check": "sign identity", "alpha": float(alpha),
                                           "lambda_1": float(lam1)})

    mesh32 = fem.build_mesh(0.0, 1.0, 32)
    base32 = spectral.assemble_pencil(mesh32, 0.5, 0.0)
    c32 = spectral.embedding_constant(base32)
    worst = 0.0
    for alpha in (-50.0, -1.1 / c32, 0.0, 10.0):
        pencil = base32.with_alpha(alpha)
        res = spectral.solve_spectrum(pencil, 5)
        resolvent = np.linalg.solve(pencil.a_alpha + res.gamma * base32.mass.data, base32.mass.data)
        mu = np.sort(np.linalg.eigvals(resolvent).real)[::-1][:5]
        err = float(np.max(np.abs(1.0 / mu - res.gamma - res.lambdas) / (1.0 + np.abs(res.lambdas))))
        worst = max(worst, err)
        if err > 1e-9:
            return _result(name, details, {"check": "resolvent", "alpha": alpha, "err": err})
    details["resolvent_worst"] = worst
    return _result(name, details)


def suite_threshold(rng):
    name = "threshold"
    details = {}
    mesh = fem.build_mesh(0.0, 1.0, 63)
    for s in (0.3, 0.5, 0.7):
        th = spectral.locate_threshold(mesh, s)
        rel = abs(th["difference"]) * th["embedding_constant"]
        details[f"rel_s={s}"] = rel
        if rel > 1e-8:
            return _result(name, details, {"check": "threshold", "s": s, **th})
    return _result(name, details)


def suite_gamma_shift(rng):
    name = "gamma_shift"
    details = {}
    mesh = fem.build_mesh(0.0, 1.0, 31)
    base = spectral.assemble_pencil(mesh, 0.5, 0.0)
    c_h = spectral.embedding_constant(base)
    for alpha in (0.0, 0.5, 1.0, 7.5, 100.0):
        gamma = spectral.gamma_shift(base.with_alpha(alpha))
        if gamma != 0.0:
            return _result(name, details, {"check": "gamma zero for alpha >= 0",
                                           "alpha": alpha, "gamma": gamma})
    for alpha in (-0.2, -1.0 / c_h, -1.5 / c_h, -10.0, -200.0):
        pencil = base.with_alpha(alpha)
        gamma = spectral.gamma_shift(pencil)
        shifted = pencil.a_alpha + gamma * base.mass.data - 0.5 * base.a_loc.data
        scale = float(np.max(np.abs(shifted))) + float(np.max(np.abs(pencil.a_alpha)))
        min_eig = float(np.linalg.eigvalsh(shifted)[0])
        if min_eig < -1e-10 * scale:
            return _result(name, details, {"check": "shifted PSD", "alpha": alpha,
                                           "min_eig": min_eig, "scale": scale})
        details[f"gamma_alpha={alpha:.4g}"] = gamma
    return _result(name, details)


def suite_brezis_stability(rng):
    name = "brezis_stability"
    details = {}
    ratios = []
    for n in (15, 31, 63):
        rep = spectral.verify_brezis_inequality(
            fem.build_mesh(0.0, 1.0, n), 0.5, 200, rng=rng
        )
        ratios.append(rep["max_ratio"])
        details[f"max_ratio_n={n}"] = rep["max_ratio"]
    spread = (max(ratios) - min(ratios)) / min(ratios)
    details["spread"] = spread
    if spread > 0.2:
        return _result(name, details, {"check": "refinement stability", "spread": spread})
    return _result(name, details)


# ----------------------------------------------------------------------------
# matrix file checks (structural, used with ``verify --matrix``)
# ----------------------------------------------------------------------------

def check_matrix_file(path):
    """Structural invariants of a matrix exchange file, by declared kind."""
    name = f"matrix_file:{path}"
    block = exchange.read_matrix(path)
    data = block.data
    details = {"kind": block.kind, "shape": list(data.shape)}
    if data.shape[0] != data.shape[1]:
        return _result(name, details, {"check": "square"})
    sym = float(np.max(np.abs(data - data.T))) if data.size else 0.0
    if sym > 0.0:
        return _result(name, details, {"check": "symmetry", "max_asymmetry": sym})
    n = data.shape[0]
    if block.kind in ("Mass", "LocalStiffness"):
        off = np.diagonal(data, 1)
        if n > 2 and float(np.max(np.abs(data - _as_tridiagonal(data)))) > 0.0:
            return _result(name, details, {"check": "tridiagonal"})
        expected_ratio = 4.0 if block.kind == "Mass" else -2.0
        if n > 1:
            dev = float(np.max(np.abs(np.diag(data) - expected_ratio * off[0])))
            if dev > 1e-12 * float(np.max(np.abs(data))):
                return _result(name, details, {"check": "diag/offdiag ratio", "dev": dev})
    if block.kind == "FractionalStiffness":
        col = data[:, 0]
        for d in range(n):
            if np.any(np.diagonal(data, d) != col[d]):
                return _result(name, details, {"check": "toeplitz", "offset": d})
        min_eig = float(np.linalg.eigvalsh(data)[0])
        if min_eig < -1e-10 * float(np.max(np.abs(data))):
            return _result(name, details, {"check": "psd", "min_eig": min_eig})
    return _result(name, details)


def _as_tridiagonal(data):
    out = np.zeros_like(data)
    out += np.diag(np.diag(data))
    out += np.diag(np.diag(data, 1), 1)
    out += np.diag(np.diag(data, -1), -1)
    return out


SUITES = {
    "fem_structure": suite_fem_structure,
    "fem_oracle": suite_fem_oracle,
    "lebesgue": suite_lebesgue,
    "k_functional": suite_k_functional,
    "interpolation_norms": suite_interpolation_norms,
    "operator_interpolation": suite_operator_interpolation,
    "spectrum_contract": suite_spectrum_contract,
    "threshold": suite_threshold,
    "gamma_shift": suite_gamma_shift,
    "brezis_stability": suite_brezis_stability,
}


def run_suites(seed: int, names=None, matrix_files=()) -> dict:
    """Run the requested suites (all by default) plus any matrix-file checks."""
    chosen = list(SUITES) if not names else list(names)
    results = []
    for index, suite_name in enumerate(chosen):
        rng = np.random.default_rng([seed, index])
        results.append(SUITES[suite_name](rng))
    for path in matrix_files:
        try:
            results.append(check_matrix_file(path))
        except exchange.FormatError as exc:
            results.append(_result(f"matrix_file:{path}", {},
                                   {"check": "parse", "error": str(exc)}))
    return {
        "seed": seed,
        "suites": results,
        "all_passed": all(r["passed"] for r in results),
    }
