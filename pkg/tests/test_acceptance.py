"""Acceptance run: one test per criterion, each printing a single PASS/FAIL line."""

import cmath
import json
import math
import time
from importlib import resources

import numpy as np
import pytest
from conftest import ring_of

from danielewski.closure import lie_closure, membership, preset, preset_lnd4
from danielewski.flows import (
    FlowStep,
    SurfacePoint,
    apply_flow,
    commutator_flow_approx,
    exp_lnd_symbolic,
    p_value,
    run_program,
)
from danielewski.poisson import field_to_ham, ham_to_field, poisson
from danielewski.ring import DefiningPoly, Ring, simple_zero_check
from danielewski.transit import TransportTask, multiplier_degrees, solve_task
from danielewski.vfield import (
    VectorField,
    bracket,
    divergence,
    is_lnd,
    make_named,
    verify_identities,
)


def report(capsys, n, ok, elapsed, limit, detail=""):
    ok_time = elapsed < limit
    status = "PASS" if ok and ok_time else "FAIL"
    line = f"criterion {n:2d}: {status}  ({elapsed:.2f} s, limit {limit} s) {detail}".rstrip()
    with capsys.disabled():
        print("\n" + line)
    assert ok, detail
    assert ok_time, f"took {elapsed:.2f} s, limit {limit} s"


def random_squarefree(rng, deg):
    while True:
        coeffs = list(rng.integers(-4, 5, size=deg)) + [int(rng.choice([1, -1, 2, 3]))]
        text = " + ".join(f"({c})*z^{e}" for e, c in enumerate(coeffs) if c)
        p = DefiningPoly.parse(text)
        if simple_zero_check(p):
            return p


def random_rings(seed, count, max_deg=6):
    rng = np.random.default_rng(seed)
    return [Ring(random_squarefree(rng, 1 + i % max_deg)) for i in range(count)]


def random_univariate(ring, rng, var, max_deg=4):
    out = ring.zero
    for e in range(int(rng.integers(0, max_deg + 1)) + 1):
        out = out + ring.const(int(rng.integers(-5, 6))) * var ** e
    return out


def random_elem(ring, rng, max_deg=3, max_terms=4):
    out = ring.zero
    for _ in range(int(rng.integers(1, max_terms + 1))):
        h = int(rng.integers(-max_deg, max_deg + 1))
        k = int(rng.integers(0, max_deg + 1))
        out = out + ring.monomial(max(h, 0), max(-h, 0), (k,), coeff=int(rng.integers(-5, 6)))
    return out


def bounded_point(P, rng):
    x = cmath.rect(rng.uniform(0.5, 1.5), rng.uniform(0, 2 * math.pi))
    z = cmath.rect(rng.uniform(0, 1), rng.uniform(0, 2 * math.pi))
    return SurfacePoint.make(P, x, p_value(P, (z,)) / x, (z,))


def test_criterion_01_commutator_table(capsys):
    t0 = time.perf_counter()
    rings = random_rings(1, 20)
    bad = []
    for r in rings:
        V, W, H = (make_named(r, n) for n in "VWH")
        ok = (bracket(V, H) == -V and bracket(W, H) == W
              and bracket(V, W) == r.p_derivative(2) * H)
        if not ok:
            bad.append(str(r.p))
    report(capsys, 1, not bad, time.perf_counter() - t0, 1,
           f"20 random p, degrees {sorted({r.p.degree for r in rings})}; failures {bad}")


# The adjoint-power labels the lemma covers; the stepping and z-multiple
# identities are checked elsewhere.
ADJ_PREFIXES = ("adj_V^n(W)", "adj_{yV}^n(W)", "adj_V^m(adj_{yV}", "adj_V^n([y^k V, W])")


def test_criterion_02_adjoint_lemma_displays(capsys):
    t0 = time.perf_counter()
    failures = []
    computed_ok = True
    for d in range(1, 7):
        r = ring_of(f"z^{d} - 1") if d > 1 else ring_of("z")
        rep = verify_identities(r, n_max=d + 1)
        computed_ok &= rep.all_passed
        for c in rep.checks + rep.printed_checks:
            if c.label.startswith(ADJ_PREFIXES) and not c.passed:
                failures.append((d, c.label.split(" =")[0], tuple(c.index.values())))
    elapsed = time.perf_counter() - t0
    labels = sorted({f[1] for f in failures})
    report(capsys, 2, not failures, elapsed, 10,
           f"computed forms all exact: {computed_ok}; printed displays failing: "
           f"{len(failures)} index cases in {labels}")


def test_criterion_03_euler_relation(capsys):
    t0 = time.perf_counter()
    bad = []
    for r in random_rings(3, 20):
        V, W, H = (make_named(r, n) for n in "VWH")
        if -(r.x * V) + r.y * W != r.dp() * H:
            bad.append(str(r.p))
    report(capsys, 3, not bad, time.perf_counter() - t0, 1, f"20 random p; failures {bad}")


def test_criterion_04_volume_checks(capsys):
    t0 = time.perf_counter()
    r = ring_of("z^3 - z")
    V, W, H = (make_named(r, n) for n in "VWH")
    x, y, z = r.x, r.y, r.z()
    ok = all(divergence(y ** n * V).is_zero() and divergence(x ** n * W).is_zero()
             and divergence(z ** n * H).is_zero() for n in range(6))
    rng = np.random.default_rng(4)
    for _ in range(10):
        f = random_univariate(r, rng, y)
        ok &= divergence(z * f * V) == y * f
    report(capsys, 4, ok, time.perf_counter() - t0, 5, "n, m <= 5 and 10 random f(y)")


def test_criterion_05_poisson(capsys):
    t0 = time.perf_counter()
    r = ring_of("z^3 - z")
    x, y, z = r.x, r.y, r.z()
    ok = poisson(x, z) == -x and poisson(z, y) == -y and poisson(x, y) == -r.dp()
    rng = np.random.default_rng(5)
    for _ in range(50):
        f, g, h = (random_elem(r, rng) for _ in range(3))
        jac = poisson(f, poisson(g, h)) + poisson(g, poisson(h, f)) + poisson(h, poisson(f, g))
        ok &= jac.is_zero()
        ok &= poisson(f, g * h) == poisson(f, g) * h + g * poisson(f, h)
    monos = [k for k in r.normal_monomials(4) if r.key_degree(k) > 0]
    for k in monos:
        h = r.elem({k: 1})
        ok &= field_to_ham(ham_to_field(h)) == h
    for _ in range(20):
        h = random_elem(r, rng, max_deg=2, max_terms=6)
        h = h - r.const(h.constant_term())
        if h.degree() <= 4:
            ok &= field_to_ham(ham_to_field(h)) == h
    report(capsys, 5, ok, time.perf_counter() - t0, 10,
           f"50 random triples, {len(monos)} basis round trips")


FULL6_P = ["z", "z^2 - 1", "z^3 - z", "z^4 - 1"]


@pytest.mark.parametrize("p", FULL6_P)
def test_criterion_06_full_closure(p, capsys):
    r = ring_of(p)
    fields, labels = preset(r, "full6")
    t0 = time.perf_counter()
    rep = lie_closure(fields, D_target=4, D_work=12, labels=labels)
    report(capsys, 6, rep.verdict == "Generated", time.perf_counter() - t0, 120,
           f"p = {p}: {rep.verdict} {rep.slice_dim}/{rep.target_dim}")


@pytest.mark.parametrize("p", FULL6_P)
def test_criterion_07_volume_closure(p, capsys):
    r = ring_of(p)
    verdicts = {}
    t0 = time.perf_counter()
    for variant in ("volume-intro", "volume-body"):
        fields, labels = preset(r, variant)
        rep = lie_closure(fields, D_target=4, volume=True, labels=labels)
        verdicts[variant] = rep.verdict
    elapsed = time.perf_counter() - t0
    report(capsys, 7, "Generated" in verdicts.values(), elapsed, 120,
           f"p = {p}: {verdicts}")


@pytest.mark.parametrize("p", ["z^4 - 1", "z^5 - z"])
def test_criterion_08_lnd_membership(p, capsys):
    r = ring_of(p)
    d = r.p.degree
    gens, _ = preset_lnd4(r)
    V, W = make_named(r, "V"), make_named(r, "W")
    t0 = time.perf_counter()
    missing = []
    for n in range(d - 2, d + 3):
        for name, theta in ((f"y^{n}*V", r.y ** n * V), (f"x^{n}*W", r.x ** n * W)):
            if not membership(theta, gens, D_work=n + d + 3):
                missing.append(name)
    report(capsys, 8, not missing, time.perf_counter() - t0, 120,
           f"p = {p}: not found {missing}")


def test_criterion_09_several_variables(capsys):
    t0 = time.perf_counter()
    ok = True
    for p in ("z1^2 + z2^2", "z1*z2 + z1^3"):
        rep = verify_identities(ring_of(p), n_max=2)
        ok &= rep.all_passed
    r = ring_of("z1*z2 + z1^3")
    gens, _ = preset_lnd4(r)
    missing = []
    for k in (1, 2):
        Vk = make_named(r, "V", k)
        for n in range(1, 5):
            if not membership(r.y ** n * Vk, gens, D_work=n + 6):
                missing.append(f"y^{n}*V{k}")
    report(capsys, 9, ok and not missing, time.perf_counter() - t0, 120,
           f"tables exact: {ok}; membership not found {missing}")


def test_criterion_10_flows(capsys):
    t0 = time.perf_counter()
    ok = True
    for d in range(1, 6):
        r = ring_of(f"z^{d} - z" if d > 1 else "z")
        t = r.param("t")
        for base, a, b in (("V", r.x, r.y), ("W", r.y, r.x)):
            im = exp_lnd_symbolic(make_named(r, base))
            display = a
            for k in range(1, d + 1):
                display = display + (t ** k * b ** (k - 1) * r.p_derivative(k)) / math.factorial(k)
            moved = im.x if base == "V" else im.y
            fixed = im.y if base == "V" else im.x
            ok &= moved == display and fixed == b and im.z == (r.z() + b * t,)
    rng = np.random.default_rng(10)
    Ps = [ring_of(p).p for p in ("z^2 - 1", "z^3 - z", "z^4 + 2*z - 1", "z^5 - z")]
    worst_res = worst_law = 0.0
    for _ in range(100):
        P = Ps[int(rng.integers(len(Ps)))]
        step = FlowStep(str(rng.choice(["V", "W", "H"])))
        pt = bounded_point(P, rng)
        t1, t2 = (cmath.rect(rng.uniform(0, 0.5), rng.uniform(0, 2 * math.pi)) for _ in range(2))
        a = apply_flow(step.with_time(t1), pt, P)
        ab = apply_flow(step.with_time(t2), a, P)
        worst_res = max(worst_res, a.residual, ab.residual)
        direct = apply_flow(step.with_time(t1 + t2), pt, P)
        back = apply_flow(step.with_time(-t1), a, P)
        worst_law = max(worst_law, ab.distance(direct), back.distance(pt))
    ok &= worst_res < 1e-9 and worst_law <= 1e-9
    report(capsys, 10, ok, time.perf_counter() - t0, 5,
           f"max residual {worst_res:.1e}, max group-law error {worst_law:.1e}")


def test_criterion_11_commutator_demonstrator(capsys):
    t0 = time.perf_counter()
    P = ring_of("z^2").p
    pt = SurfacePoint.make(P, 1, 1, 1)
    t = 0.3
    ref = apply_flow(FlowStep("H", time=2 * t), pt, P)
    errs = [commutator_flow_approx("V", "W", t, n, pt, P).distance(ref) for n in (4, 16, 64, 256)]
    ok = all(b <= a for a, b in zip(errs, errs[1:]))
    report(capsys, 11, ok, time.perf_counter() - t0, 5,
           "errors " + ", ".join(f"{e:.3g}" for e in errs))


@pytest.mark.parametrize("name", ["demo_task.json", "demo_task_cubic.json"])
def test_criterion_12_transport(name, capsys):
    data = json.loads(resources.files("danielewski").joinpath(f"data/{name}").read_text())
    task = TransportTask.from_json(data)
    d = task.p.degree
    t0 = time.perf_counter()
    res = solve_task(task)
    out, log = run_program(res.program, task.points, task.p)
    elapsed = time.perf_counter() - t0
    fixed = all(a == b for i, (a, b) in enumerate(zip(out, task.points)) if i != task.mover)
    err = out[task.mover].distance(task.target)
    degs = multiplier_degrees(res.program)
    deg_ok = all(k in (0, 1) or k >= d - 2 for k in degs)
    ok = fixed and err <= 1e-6 and log.max_residual() <= 1e-8 and deg_ok
    report(capsys, 12, ok, elapsed, 30,
           f"p = {task.p}: fixed bitwise {fixed}, mover error {err:.1e}, "
           f"max residual {log.max_residual():.1e}, degrees {sorted(degs)}")


def test_criterion_13_lnd_facts(capsys):
    t0 = time.perf_counter()
    ok = True
    for r in random_rings(13, 12) + [ring_of("z^6 - 1"), ring_of("z")]:
        d = r.p.degree
        res_v = is_lnd(make_named(r, "V"), d + 1)
        res_h = is_lnd(make_named(r, "H"), 10)
        ok &= res_v.nilpotent and res_v.order <= d + 1 and not res_h.nilpotent
    ok &= is_lnd(VectorField.zero(ring_of("z")), 1).nilpotent
    report(capsys, 13, ok, time.perf_counter() - t0, 1, "d in 1..6")
