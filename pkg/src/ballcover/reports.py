"""Certificate serialization and independent re-checking.

Rationals serialize as strings "p" or "p/q" so exactness survives JSON;
floats stay native JSON numbers (CPython emits the shortest round-trip
repr, so identical inputs give byte-identical reports).  CSV is used for
the degree-indexed c_l table.

verify_certificate re-checks the exact algebraic claims of a certificate
without re-running the optimization or search that produced it.  Fixed
ambient context (the A_n* geometry, which is deterministic given the
dimension) is rebuilt when a certificate refers to it.  Float-valued
entries (harmonic evaluations, densities) are treated as tagged inputs:
exact-domain claims built on them (for instance membership inequalities
against an exactly squared stored float) are re-verified in rational
arithmetic, while the floats themselves are only checked for internal
consistency.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Callable

from .bodies import RadialBody, body_from_dict, body_to_dict, is_normalized
from .eutaxy import eutaxy_coefficients_a3, map_inner, map_matrix, map_trace, q_map
from .harmonic import (
    CLCertificate,
    MultiplierSpectrum,
    c_l,
    legendre_rational,
    rescaled_q_sequence_mod16,
    NODE_WEIGHTS,
)
from .lattice import build_anstar, covering_radius, negative_pairs
from .linalg import (
    MatQ,
    Rat,
    VecQ,
    det,
    gram_dot,
    identity,
    is_symmetric,
    mat,
    mat_add,
    mat_inv,
    mat_vec,
    trace,
    trace_product,
    vec,
    vec_add,
    vec_scale,
    vec_sub,
)
from .perturbation import (
    CoverConstruction,
    ExtensionWitness,
    ScanReport,
    AugmentedBall,
    exact_cr_after,
    member_augmented_ball,
)


def rat_str(x: Rat) -> str:
    f = Fraction(x)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def parse_rat(v) -> Fraction:
    if isinstance(v, bool):
        raise ValueError("boolean is not a rational")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    raise ValueError(f"not an exact rational: {v!r}")


def rationalize(obj):
    """Deep-copy a report, rendering every Fraction as a 'p/q' string."""
    if isinstance(obj, Fraction):
        return rat_str(obj)
    if isinstance(obj, dict):
        return {k: rationalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rationalize(v) for v in obj]
    return obj


def dump_json(data: dict) -> str:
    return json.dumps(rationalize(data), indent=2, sort_keys=True) + "\n"


def _parse_vec(obj) -> VecQ:
    return vec([parse_rat(x) for x in obj])


def _parse_mat(obj) -> MatQ:
    return mat([[parse_rat(x) for x in row] for row in obj])


def cover_certificate(body: RadialBody, c: CoverConstruction) -> dict:
    return {
        "kind": "cover-construction",
        "body": body_to_dict(body),
        "rotation": None if c.rotation is None else [list(r) for r in c.rotation],
        "rho": [list(row) for row in c.rho],
        "m_form": [list(row) for row in c.m_form],
        "m_matrix": [list(row) for row in c.m_matrix],
        "translations": [list(t) for t in c.translations],
        "trace_m": c.trace_m,
        "sum_abs_rho": c.sum_abs_rho,
        "delta": c.delta,
        "det_ratio": c.det_ratio,
        "delta_tangent": c.delta_tangent,
        "epsilon_prime": c.epsilon_prime,
        "lower_bound": c.lower_bound,
        "checks": [
            {
                "simplex": k.simplex,
                "vertex": k.vertex,
                "y": list(k.y),
                "norm2": k.norm2,
                "radial_value": k.radial_value,
                "lhs": k.lhs,
                "rhs": k.rhs,
                "margin": k.margin,
            }
            for k in c.checks
        ],
        "float_tolerance": 1e-12,
    }


def scan_certificate(body: RadialBody, report: ScanReport) -> dict:
    return {
        "kind": "scan-report",
        "grid_size": report.grid_size,
        "volume_ratio": report.volume_ratio,
        "ball_density": report.ball_density,
        "best_index": report.best_index,
        "best": cover_certificate(body, report.best),
        "best_density": report.best_density,
        "margin": report.margin,
        "min_bracket": report.min_bracket,
        "delta_k_bound": report.delta_k_bound,
        "trace_estimate": report.trace_estimate,
    }


def witness_certificate(w: ExtensionWitness) -> dict:
    return {
        "kind": "extension-witness",
        "dimension": w.dimension,
        "pair_index": w.pair_index,
        "removed_simplices": list(w.removed_simplices),
        "farkas_form": [list(row) for row in w.farkas_form],
        "scale": w.scale,
        "transform": [list(row) for row in w.transform],
        "det_t": w.det_t,
        "mu2": w.mu2,
        "kept_cr2": list(w.kept_cr2),
        "grown_cr2": w.grown_cr2,
        "eps": w.eps,
        "pole": list(w.pole),
        "tau": w.tau,
        "translated_points": [list(p) for p in w.translated_points],
    }


def spectrum_certificate(spec: MultiplierSpectrum) -> dict:
    return {
        "kind": "zonal-spectrum",
        "lmax": spec.lmax,
        "mass": spec.mass,
        "cosine_counts": [[c, n] for c, n in spec.cosine_counts],
        "multipliers": list(spec.multipliers),
    }


def cl_csv(certs: list[CLCertificate]) -> str:
    lines = ["l,c_l,residue_mod16,status"]
    for c in certs:
        value = "" if c.value is None else rat_str(c.value)
        lines.append(f"{c.l},{value},{c.residue_mod16},{c.status}")
    return "\n".join(lines) + "\n"


def _verify_classification(data: dict, bad: list[str]) -> None:
    gram = _parse_mat(data["gram"])
    ginv = mat_inv(gram)
    pairs = [tuple(p) for p in data["pairs"]]
    forms = [_parse_mat(m) for m in data["maps"]]
    if len(forms) != len(pairs):
        bad.append("one map per pair expected")
        return
    if data["num_simplices"] != 2 * len(pairs):
        bad.append("pair count inconsistent with simplex count")
    for k, f in enumerate(forms):
        if not is_symmetric(f):
            bad.append(f"map {k} not symmetric")
        if map_trace(ginv, f) != 1:
            bad.append(f"map {k} not unit trace")
    cls = data["classification"]
    coeffs = data["pair_coefficients"]
    if cls == "not-semi-eutactic":
        y = _parse_mat(data["farkas_form"])
        if map_trace(ginv, y) <= 0:
            bad.append("separating map has nonpositive trace")
        for k, f in enumerate(forms):
            if map_inner(ginv, y, f) >= 0:
                bad.append(f"separating map not strict against map {k}")
        return
    if coeffs is None:
        bad.append("feasible classification without coefficients")
        return
    cs = [parse_rat(c) for c in coeffs]
    if any(c < 0 for c in cs):
        bad.append("negative coefficient in identity resolution")
    combo = mat([[Fraction(0)] * len(gram) for _ in gram])
    for c, f in zip(cs, forms):
        combo = mat_add(combo, mat([[c * x for x in row] for row in f]))
    if combo != gram:
        bad.append("coefficients do not resolve the identity form")
    removable = []
    for r in data["removals"]:
        k = r["pair_index"]
        kept = [f for i, f in enumerate(forms) if i != k]
        if r["feasible"]:
            removable.append(True)
            rcs = [parse_rat(c) for c in r["coefficients"]]
            if len(rcs) != len(kept) or any(c < 0 for c in rcs):
                bad.append(f"removal {k}: bad coefficient vector")
                continue
            combo = mat([[Fraction(0)] * len(gram) for _ in gram])
            for c, f in zip(rcs, kept):
                combo = mat_add(combo, mat([[c * x for x in row] for row in f]))
            if combo != gram:
                bad.append(f"removal {k}: coefficients do not resolve identity")
        else:
            removable.append(False)
            y = _parse_mat(r["farkas_form"])
            if map_trace(ginv, y) <= 0:
                bad.append(f"removal {k}: separating map has nonpositive trace")
            for i, f in enumerate(kept):
                if map_inner(ginv, y, f) >= 0:
                    bad.append(f"removal {k}: not strict against kept map {i}")
    if len(removable) != len(pairs):
        bad.append("one removal outcome per pair expected")
    if all(not r for r in removable):
        expected = "critically-semi-eutactic"
        if not data["unique"] or any(c <= 0 for c in cs):
            bad.append("critical case requires unique all-positive coefficients")
    elif all(removable):
        expected = "redundantly-semi-eutactic"
    else:
        expected = "semi-eutactic"
    if cls != expected:
        bad.append(f"classification {cls!r} but evidence says {expected!r}")
    dim = data["dimension"]
    if dim in (2, 3):
        want = "ball inextensible; relatively worst covering candidate"
    else:
        want = "ball extensible; not relatively worst covering"
    if data["conclusion"] != want:
        bad.append("conclusion does not match the classification rule")


def _verify_lattice_report(data: dict, bad: list[str]) -> None:
    gram = _parse_mat(data["gram"])
    n = data["dimension"]
    if data["embedding"] is not None:
        emb = _parse_mat(data["embedding"])
        gtg = mat([[sum(emb[k][i] * emb[k][j] for k in range(n)) for j in range(n)] for i in range(n)])
        if gtg != gram:
            bad.append("embedding does not reproduce the gram matrix")
    mu2 = parse_rat(data["mu2"])
    maximal = 0
    for idx, cls in enumerate(data["classes"]):
        vertices = [_parse_vec(v) for v in cls["vertices"]]
        alpha = [parse_rat(a) for a in cls["alpha"]]
        center = _parse_vec(cls["circumcenter"])
        cr2 = parse_rat(cls["cr2"])
        if sum(alpha) != 1:
            bad.append(f"class {idx}: barycentric weights do not sum to 1")
        combo = vec([Fraction(0)] * n)
        for a, v in zip(alpha, vertices):
            combo = vec_add(combo, vec_scale(a, v))
        if combo != center:
            bad.append(f"class {idx}: circumcenter mismatch")
        for j, v in enumerate(vertices):
            d = vec_sub(center, v)
            if gram_dot(gram, d, d) != cr2:
                bad.append(f"class {idx}: vertex {j} not equidistant")
        if cr2 == mu2:
            maximal += 1
        elif cr2 > mu2:
            bad.append(f"class {idx}: circumradius exceeds reported mu2")
    if maximal != data["num_maximal"]:
        bad.append("count of maximal classes disagrees")
    seen_mu = False
    for p in data["voronoi_vertices"]:
        v = _parse_vec(p)
        norm2 = gram_dot(gram, v, v)
        if norm2 > mu2:
            bad.append("voronoi vertex beyond covering radius")
        if norm2 == mu2:
            seen_mu = True
    if not seen_mu:
        bad.append("no voronoi vertex attains the covering radius")


def _verify_cover(data: dict, bad: list[str]) -> None:
    body = body_from_dict(data["body"])
    if not is_normalized(body) or any(l % 2 for l, _, _ in body.coeffs):
        bad.append("body outside the normalized even class")
    if body.eps > 0.1:
        bad.append("body asphericity above threshold")
    lat = build_anstar(3)
    gram = lat.gram
    ginv = mat_inv(gram)
    mu2, simplices = covering_radius(lat)
    upsilon = eutaxy_coefficients_a3(lat)
    m_form = _parse_mat(data["m_form"])
    m_matrix = _parse_mat(data["m_matrix"])
    if m_matrix != map_matrix(ginv, m_form):
        bad.append("matrix and form views of M disagree")
    rho = [[parse_rat(x) for x in row] for row in data["rho"]]
    translations = [_parse_vec(t) for t in data["translations"]]
    delta = parse_rat(data["delta"])
    if not (0 <= delta < 1):
        bad.append("contraction outside [0, 1)")
    for i, s in enumerate(simplices):
        for j, x in enumerate(s.x):
            lhs = gram_dot(gram, x, vec_add(mat_vec(m_matrix, x), translations[i]))
            if lhs != s.cr2 * rho[i][j]:
                bad.append(f"linear system residual at ({i}, {j})")
    expected_trace = sum(
        u * sum(a * r for a, r in zip(s.alpha, rho_i))
        for u, s, rho_i in zip(upsilon, simplices, rho)
    )
    if parse_rat(data["trace_m"]) != expected_trace or trace(m_matrix) != expected_trace:
        bad.append("trace identity fails")
    if parse_rat(data["sum_abs_rho"]) != sum(abs(r) for row in rho for r in row):
        bad.append("sum of |rho| mismatched")
    det_ratio = parse_rat(data["det_ratio"])
    if det_ratio != (1 - delta) ** 3 * det(mat_add(identity(3), m_matrix)):
        bad.append("determinant ratio mismatched")
    checks = data["checks"]
    if len(checks) != sum(len(s.x) for s in simplices):
        bad.append("membership log incomplete")
    shrink2 = (1 - delta) ** 2
    for k in checks:
        i, j = k["simplex"], k["vertex"]
        x = simplices[i].x[j]
        y = vec_add(vec_add(x, mat_vec(m_matrix, x)), translations[i])
        if y != _parse_vec(k["y"]):
            bad.append(f"deformed vertex mismatch at ({i}, {j})")
        norm2 = gram_dot(gram, y, y)
        if norm2 != parse_rat(k["norm2"]):
            bad.append(f"vertex norm mismatch at ({i}, {j})")
        lhs = shrink2 * norm2
        rhs = mu2 * Fraction(float(k["radial_value"])) ** 2
        if lhs != parse_rat(k["lhs"]) or rhs != parse_rat(k["rhs"]):
            bad.append(f"membership sides mismatched at ({i}, {j})")
        if lhs > rhs:
            bad.append(f"membership fails at ({i}, {j})")


def _verify_scan(data: dict, bad: list[str]) -> None:
    _verify_cover(data["best"], bad)
    ball = (4.0 * math.pi / 3.0) * float(Fraction(5, 4)) ** 1.5 / 4.0
    if abs(data["ball_density"] - ball) > 1e-12:
        bad.append("ball density off its exact-formula value")
    det_ratio = float(parse_rat(data["best"]["det_ratio"]))
    expect = data["ball_density"] * data["volume_ratio"] / det_ratio
    if not math.isclose(data["best_density"], expect, rel_tol=1e-9):
        bad.append("best density inconsistent with det ratio")
    if not math.isclose(
        data["margin"], data["ball_density"] - data["best_density"], rel_tol=1e-9, abs_tol=1e-15
    ):
        bad.append("margin inconsistent")
    if not math.isclose(
        data["delta_k_bound"],
        1.0 - data["ball_density"] / data["best_density"],
        rel_tol=1e-9,
        abs_tol=1e-15,
    ):
        bad.append("Delta_K bound inconsistent")
    if not (0 <= data["best_index"] < data["grid_size"]):
        bad.append("best rotation index out of range")
    u = data["best"]["rotation"]
    if u is None:
        bad.append("scan winner must record its rotation")
    else:
        for i in range(3):
            for j in range(3):
                dot = sum(u[k][i] * u[k][j] for k in range(3))
                if abs(dot - (1.0 if i == j else 0.0)) > 1e-9:
                    bad.append("stored rotation is not orthogonal")


def _verify_witness(data: dict, bad: list[str]) -> None:
    dim = data["dimension"]
    lat = build_anstar(dim)
    gram = lat.gram
    ginv = mat_inv(gram)
    mu2, simplices = covering_radius(lat)
    pairs = negative_pairs(simplices)
    if parse_rat(data["mu2"]) != mu2:
        bad.append("covering radius mismatched")
    pair_index = data["pair_index"]
    if tuple(data["removed_simplices"]) != pairs[pair_index]:
        bad.append("removed pair does not match the pair table")
        return
    t_map = _parse_mat(data["transform"])
    det_t = parse_rat(data["det_t"])
    if det(t_map) != det_t:
        bad.append("stored determinant disagrees with the transform")
    if det_t <= 1:
        bad.append("transform does not grow the determinant")
    farkas = _parse_mat(data["farkas_form"])
    if map_trace(ginv, farkas) <= 0:
        bad.append("separating map has nonpositive trace")
    kept_forms = [
        q_map(simplices[i], gram).form
        for k, (i, _) in enumerate(pairs)
        if k != pair_index
    ]
    for i, f in enumerate(kept_forms):
        if map_inner(ginv, farkas, f) >= 0:
            bad.append(f"separating map not strict against kept pair {i}")
    kept = []
    for k, (a, b) in enumerate(pairs):
        if k != pair_index:
            kept.append(simplices[a])
            kept.append(simplices[b])
    stored = [parse_rat(c) for c in data["kept_cr2"]]
    if len(stored) != len(kept):
        bad.append("kept circumradius list incomplete")
    for idx, (s, c) in enumerate(zip(kept, stored)):
        if exact_cr_after(t_map, s, gram) != c:
            bad.append(f"kept circumradius {idx} mismatched")
        if c >= mu2:
            bad.append(f"kept simplex {idx} no longer strictly inside")
    i0 = pairs[pair_index][0]
    s0 = simplices[i0]
    if parse_rat(data["grown_cr2"]) != exact_cr_after(t_map, s0, gram):
        bad.append("grown circumradius mismatched")
    pole = _parse_vec(data["pole"])
    if pole != s0.x[0]:
        bad.append("pole is not the first vertex of the removed simplex")
    eps = parse_rat(data["eps"])
    tau = parse_rat(data["tau"])
    ball = AugmentedBall(eps=eps, pole=pole, gram=gram)
    pts = [_parse_vec(p) for p in data["translated_points"]]
    rebuilt = [vec_add(mat_vec(t_map, x), vec_scale(tau, pole)) for x in s0.x]
    if pts != rebuilt:
        bad.append("translated points do not match transform and tau")
    for idx, p in enumerate(pts):
        if not member_augmented_ball(p, ball):
            bad.append(f"translated vertex {idx} outside the augmented ball")


def _verify_spectrum(data: dict, bad: list[str]) -> None:
    counts = [(parse_rat(c), n) for c, n in data["cosine_counts"]]
    mass = parse_rat(data["mass"])
    if sum(n for _, n in counts) != 2 * mass:
        bad.append("mass is not half the vertex count")
    multipliers = [parse_rat(m) for m in data["multipliers"]]
    if len(multipliers) != data["lmax"] + 1:
        bad.append("multiplier list length off")
    for l, m in enumerate(multipliers):
        from_counts = sum(n * legendre_rational(l, c) for c, n in counts) / 2
        if m != from_counts:
            bad.append(f"multiplier {l} disagrees with the cosine data")
        if l % 2 == 1 and m != 0:
            bad.append(f"odd multiplier {l} nonzero")
        if l % 2 == 0 and m != c_l(l):
            bad.append(f"even multiplier {l} differs from c_{l}")


_VERIFIERS: dict[str, Callable[[dict, list[str]], None]] = {
    "eutaxy-classification": _verify_classification,
    "lattice-report": _verify_lattice_report,
    "cover-construction": _verify_cover,
    "scan-report": _verify_scan,
    "extension-witness": _verify_witness,
    "zonal-spectrum": _verify_spectrum,
}


def verify_certificate(data: dict) -> tuple[bool, list[str]]:
    """Re-check a parsed JSON certificate; returns (ok, failure messages)."""
    bad: list[str] = []
    kind = data.get("kind")
    checker = _VERIFIERS.get(kind)
    if checker is None:
        return False, [f"unknown certificate kind: {kind!r}"]
    try:
        checker(data, bad)
    except (KeyError, IndexError, TypeError, ValueError, ZeroDivisionError) as e:
        bad.append(f"malformed certificate: {e!r}")
    return not bad, bad


def verify_cl_csv(text: str) -> tuple[bool, list[str]]:
    """Re-check a c_l table by rerunning the cheap modular recurrences."""
    bad: list[str] = []
    lines = text.strip().split("\n")
    if not lines or lines[0] != "l,c_l,residue_mod16,status":
        return False, ["missing or wrong CSV header"]
    rows = lines[1:]
    lmax = len(rows) - 1
    if lmax < 0:
        return False, ["empty table"]
    seqs = {k: rescaled_q_sequence_mod16(lmax, k) for k, _ in NODE_WEIGHTS}
    for idx, line in enumerate(rows):
        parts = line.split(",")
        if len(parts) != 4:
            bad.append(f"row {idx}: wrong field count")
            continue
        l_str, value, residue_str, status = parts
        if int(l_str) != idx:
            bad.append(f"row {idx}: degrees must be consecutive from 0")
            continue
        residue = int(residue_str)
        if residue != sum(w * seqs[k][idx] for k, w in NODE_WEIGHTS) % 16:
            bad.append(f"row {idx}: residue does not satisfy the recurrence")
        if status == "zero":
            if idx != 2 or (value and parse_rat(value) != 0):
                bad.append(f"row {idx}: only degree 2 vanishes")
        elif status == "nonzero-exact":
            if not value:
                bad.append(f"row {idx}: exact status without a value")
            elif parse_rat(value) != c_l(idx):
                bad.append(f"row {idx}: stored value wrong")
            elif parse_rat(value) == 0:
                bad.append(f"row {idx}: zero value marked nonzero")
        elif status == "nonzero-mod16":
            if residue % 16 == 0:
                bad.append(f"row {idx}: vanishing residue cannot certify")
            if value:
                bad.append(f"row {idx}: mod-16 rows carry no exact value")
        else:
            bad.append(f"row {idx}: unknown status {status!r}")
    return not bad, bad
