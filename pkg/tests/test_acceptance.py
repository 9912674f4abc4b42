"""Acceptance gate for the package: eight executable criteria.

Every check is exact; there are no numeric tolerances anywhere.  Each
test prints one "criterion N: PASS/FAIL" line (visible under `pytest -s`
or in the failure report).  Criteria 1, 2, 3 and 5 share a single
1000-tree seeded sweep, so the first of them to run pays the build cost.
"""

import random
import time

import pytest

from arbcheck import (
    Q,
    build_emm,
    conditional_support,
    equivalence_report,
    gains,
    leaf_probabilities,
    reweight,
    scaled_gain_optimum,
    verify_martingale,
)
from arbcheck.emm import one_step_density, one_step_scale
from arbcheck.geometry import (
    InRi,
    NotInRi,
    arbitrage_direction,
    check_ri_certificate,
    ri_conv_contains_origin,
    separation_optimum,
)
from arbcheck.tree import LeafDensity, check_density
from arbcheck.verify import MODES, TreeParams, random_tree
from helpers import binomial, skewed_coin
from lp_oracle import oracle_check, random_lp

ZERO = Q(0)
ONE = Q(1)

SWEEP_SIZE = 1000
SWEEP_BUDGET_SECONDS = 300.0


def _sweep_params(seed):
    """Deterministic parameter mix covering the full advertised grid:
    d in 1..3, horizon in 1..4, branching cap in 2..4, both generator
    modes, denominators up to 16."""
    return TreeParams(
        assets=1 + seed % 3,
        steps=1 + (seed // 3) % 4,
        max_branching=2 + (seed // 12) % 3,
        max_denominator=16,
        mode=MODES[seed % 2],
    )


@pytest.fixture(scope="module")
def sweep():
    start = time.monotonic()
    records = []
    for seed in range(SWEEP_SIZE):
        tree = random_tree(_sweep_params(seed), seed)
        records.append((seed, tree, equivalence_report(tree, seed=seed)))
    return records, time.monotonic() - start


def _emit(number, ok, detail):
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")


def test_criterion_1_three_route_agreement(sweep):
    records, elapsed = sweep
    inconsistent = [seed for seed, _, rep in records if not rep.consistent]
    na = sum(1 for _, _, rep in records if rep.verdict_emm)
    ok = (len(records) >= SWEEP_SIZE and not inconsistent
          and elapsed <= SWEEP_BUDGET_SECONDS)
    _emit(1, ok, f"{len(records)} trees, {na} no-arbitrage, "
                 f"disagreements={inconsistent[:5]}, {elapsed:.1f}s")
    assert len(records) >= SWEEP_SIZE
    assert inconsistent == []
    assert elapsed <= SWEEP_BUDGET_SECONDS


def test_criterion_2_martingale_construction_exactness(sweep):
    records, _ = sweep
    failures = []
    checked = 0
    for seed, tree, rep in records:
        if not rep.verdict_emm:
            continue
        checked += 1
        c = rep.construction
        try:
            check_density(tree, c.density)  # strictly positive, unit mass
        except Exception:
            failures.append(seed)
            continue
        ok_mart, residuals = verify_martingale(tree, c.density)
        zero = (ZERO,) * tree.d
        if not ok_mart or any(r != zero for r in residuals.values()):
            failures.append(seed)
        elif max(c.density.as_dict().values()) > c.bound:
            failures.append(seed)
    ok = checked > 0 and not failures
    _emit(2, ok, f"{checked} constructions, failures={failures[:5]}")
    assert checked > 0
    assert failures == []


def test_criterion_3_scaled_gain_bound(sweep):
    records, _ = sweep
    over = []
    checked = 0
    for seed, tree, rep in records:
        if not rep.verdict_emm:
            continue
        checked += 1
        if not ZERO <= scaled_gain_optimum(tree) <= ONE:
            over.append(seed)
    worked = scaled_gain_optimum(skewed_coin())
    ok = checked > 0 and not over and worked == Q(2, 3)
    _emit(3, ok, f"{checked} instances within [0,1], violations={over[:5]}, "
                 f"worked instance beta={worked}")
    assert checked > 0
    assert over == []
    assert worked == Q(2, 3)


def test_criterion_4_worked_one_step_instance():
    from arbcheck.emm import support_function
    from arbcheck.tree import conditional_mean

    cs = conditional_support(skewed_coin(), 0)
    s = support_function(cs, conditional_mean(cs))
    step = one_step_density(cs)
    c = build_emm(skewed_coin())
    rw = reweight(skewed_coin(), c.density)
    probs = tuple(rw.node(i).prob for i in (1, 2))

    fair = binomial(2)
    fair_c = build_emm(fair)
    fair_scales = {one_step_scale(conditional_support(fair, nid))
                   for nid in fair.non_leaves()}
    fair_z = set(fair_c.density.as_dict().values())

    ok = (s == Q(2) and step.scale == Q(1, 3)
          and step.normalized == (Q(2, 3), Q(2))
          and probs == (Q(1, 2), Q(1, 2))
          and fair_scales == {ONE} and fair_z == {ONE})
    fmt = lambda qs: "(" + ", ".join(str(q) for q in qs) + ")"
    _emit(4, ok, f"s={s}, f={step.scale}, g_hat={fmt(step.normalized)}, "
                 f"reweighted={fmt(probs)}, symmetric scales={fmt(fair_scales)}")
    assert s == Q(2)
    assert step.scale == Q(1, 3)
    assert step.normalized == (Q(2, 3), Q(2))
    assert probs == (Q(1, 2), Q(1, 2))
    assert fair_scales == {ONE}
    assert fair_z == {ONE}


def test_criterion_5_witness_soundness(sweep):
    records, _ = sweep
    strategies = densities = 0
    unsound = []
    for seed, tree, rep in records:
        if rep.arbitrage is not None:
            strategies += 1
            g = gains(tree, rep.arbitrage)
            if not (all(v >= 0 for v in g.values())
                    and any(v > 0 for v in g.values())):
                unsound.append(("strategy", seed))
        if rep.construction is not None:
            densities += 1
            ok_mart, _ = verify_martingale(tree, rep.construction.density)
            if not ok_mart:
                unsound.append(("density", seed))
    ok = strategies > 0 and densities > 0 and not unsound
    _emit(5, ok, f"{strategies} strategies and {densities} densities re-verified, "
                 f"unsound={unsound[:5]}")
    assert strategies > 0 and densities > 0
    assert unsound == []


def test_criterion_6_support_invariance_under_reweight(sweep):
    records, _ = sweep
    rng = random.Random(606060)
    pairs = 0
    broken = []
    for seed, tree, _ in records[:200]:
        leaves = list(tree.leaves())
        raw = {l: Q(rng.randint(1, 12), rng.randint(1, 12)) for l in leaves}
        p = leaf_probabilities(tree)
        mass = sum((p[l] * raw[l] for l in leaves), ZERO)
        density = LeafDensity.from_mapping({l: raw[l] / mass for l in leaves})
        rw = reweight(tree, density)
        pairs += 1
        for nid in tree.non_leaves():
            before = set(conditional_support(tree, nid).values())
            after = set(conditional_support(rw, nid).values())
            if before != after:
                broken.append((seed, nid))
    ok = pairs >= 200 and not broken
    _emit(6, ok, f"{pairs} reweighted trees, support changes={broken[:5]}")
    assert pairs >= 200
    assert broken == []


def test_criterion_7_origin_membership_dichotomy():
    rng = random.Random(77077)
    interior = separated = 0
    failures = []
    for case in range(10_000):
        d = rng.randint(1, 3)
        k = rng.randint(1, 6)
        points = [tuple(Q(rng.randint(-6, 6), rng.randint(1, 4))
                        for _ in range(d)) for _ in range(k)]
        verdict = ri_conv_contains_origin(points)
        direction = arbitrage_direction(points)
        value, _ = separation_optimum(points)
        if not check_ri_certificate(points, verdict):
            failures.append(case)
        elif isinstance(verdict, InRi):
            interior += 1
            if direction is not None or value != ZERO:
                failures.append(case)
        else:
            separated += 1
            if direction is None or value <= ZERO:
                failures.append(case)
            elif not check_ri_certificate(points, NotInRi(direction=direction)):
                failures.append(case)
    ok = interior + separated == 10_000 and interior > 0 and separated > 0 \
        and not failures
    _emit(7, ok, f"{interior} interior, {separated} separated, "
                 f"failures={failures[:5]}")
    assert interior + separated == 10_000
    assert interior > 0 and separated > 0
    assert failures == []


def test_criterion_8_lp_oracle_agreement():
    rng = random.Random(88088)
    statuses = set()
    disagreements = []
    for case in range(500):
        lp = random_lp(rng)
        agrees, _, (status, _) = oracle_check(lp)
        statuses.add(status)
        if not agrees:
            disagreements.append(case)
    ok = not disagreements and statuses == {"optimal", "infeasible", "unbounded"}
    _emit(8, ok, f"500 LPs, statuses seen={sorted(statuses)}, "
                 f"disagreements={disagreements[:5]}")
    assert disagreements == []
    assert statuses == {"optimal", "infeasible", "unbounded"}
