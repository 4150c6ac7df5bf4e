"""Acceptance criteria 1-10, each with its runtime limit.

Run under pytest (a PASS/FAIL line per criterion is printed in the summary)
or directly with ``python3 tests/test_acceptance.py``.
"""
import json
import math
import random
import sys
import time
from contextlib import contextmanager
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import mpmath as mp  # noqa: E402

import oracles  # noqa: E402
from idealtri import bounds as B  # noqa: E402
from idealtri import hypgeom as H  # noqa: E402
from idealtri.canon import canonical_signature, is_isomorphic  # noqa: E402
from idealtri.cli import run  # noqa: E402
from idealtri.pachner import (  # noqa: E402
    FOUR_ONE,
    ONE_FOUR,
    TWO_THREE,
    Move,
    SimplexCounts,
    applicable_moves,
    apply,
    apply_with_map,
    cone_over_boundary,
    derived_counts,
    star_shellable_ball,
)
from idealtri.search import SearchBudget, connect  # noqa: E402
from idealtri.triangulation import GluedTriangulation  # noqa: E402

PI3 = math.pi / 3


@contextmanager
def time_limit(seconds):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    assert elapsed < seconds, f"took {elapsed:.2f}s, limit {seconds}s"


def test_criterion_1_figure_eight_systole(capsys):
    with time_limit(1):
        code = run(["systole", "--file", str(oracles.FIXTURES / "figure_eight.tri"), "--theta0", "auto", "--json"])
        data = json.loads(capsys.readouterr().out)
        assert code == 0
        simple = data["s0_simplified"]["value"]
        assert abs(simple - 1.32e-4) <= 0.01 * 1.32e-4
        assert data["s0_exact"]["value"] >= simple
        assert data["m"] == 2 and abs(data["theta0"] - PI3) < 1e-12


def test_criterion_2_ball_volume_identity():
    with time_limit(1):
        rng = random.Random(20)
        for _ in range(100):
            r = rng.uniform(0, 5)
            assert abs(H.ball_volume(r / 2) - math.pi * (math.sinh(r) - r)) <= 1e-12


def test_criterion_3_v_tet_window():
    with time_limit(1):
        vt = H.tet_volume(complex(math.cos(PI3), math.sin(PI3)))
        assert 1 < vt < 1.015
        assert abs(vt - 3 * oracles.lobachevsky_quad(PI3)) <= 1e-6
        assert abs(vt - 1.0149416) <= 1e-6


def test_criterion_4_bound_consistency_grid():
    thetas = [k * PI3 / 32 for k in range(1, 33)]
    with time_limit(10):
        for m in range(4, 41):
            for t in thetas:
                p = B.ThicknessParams.total(m, t)
                pb = B.pachner_bound(p)
                assert pb.N_exact <= pb.N_simplified
                exact, simple = B.systole_bounds(m, t)
                assert simple <= exact
                a0 = B.thickness_radii(p).a0
                assert float(a0) < 0.29
                # sinh(a0) - a0 ~ a0^3/6 needs about 2 |log10 a0| digits to resolve
                with mp.workdps(30 + int(2 * abs(a0.log10))):
                    x = mp.exp(mp.mpf(a0.log))
                    assert x < mp.sinh(x) < mp.mpf("0.29")


def round_trip_all(T):
    sig = canonical_signature(T)
    checked = 0
    for move in applicable_moves(T):
        result = apply_with_map(T, move)
        assert result.triangulation.tet_count == T.tet_count + move.tet_delta
        assert canonical_signature(apply(result.triangulation, result.inverse)) == sig, move
        checked += 1
    return checked


def test_criterion_5_pachner_round_trips():
    with time_limit(5):
        fig8 = oracles.fixture("figure_eight.tri")
        others = [oracles.fixture(n) for n in ("sibling.tri", "gieseking.tri", "one_tet_degree3.tri")]
        others.append(apply(fig8, Move(TWO_THREE, (0, 0))))
        total = 0
        for T in [fig8] + others:
            total += round_trip_all(T)
        assert total > 0
        for T in [fig8] + others[:3]:
            for t in range(T.tet_count):
                result = apply_with_map(T, Move(ONE_FOUR, (t,)))
                assert result.inverse.kind == FOUR_ONE
                assert canonical_signature(apply(result.triangulation, result.inverse)) == canonical_signature(T)


def test_criterion_6_search():
    with time_limit(5):
        fig8 = oracles.fixture("figure_eight.tri")
        expanded = apply(fig8, Move(TWO_THREE, (0, 0)))
        seq = connect(fig8, expanded, SearchBudget(max_moves=4))
        assert len(seq) == 1
        assert is_isomorphic(seq.replay(fig8), expanded)[0]
        relabelled, _, _ = oracles.random_relabel(fig8, random.Random(6))
        seq = connect(fig8, relabelled, SearchBudget(max_moves=4))
        assert len(seq) == 0
        assert is_isomorphic(seq.replay(fig8), relabelled)[0]


def test_criterion_7_cusp_inequalities():
    with time_limit(1):
        T = oracles.fixture("figure_eight.tri")
        cs = H.develop_cusp(T)
        assert cs.triangle_count == 8
        assert cs.shortest == 1.0
        assert cs.area <= 2 * (2 * H.v_tet()) / 0.29**2
        m = T.tet_count
        l0, L0 = B.torus_edge_bounds(4 * m, 2 * m * H.v_tet() / 0.29**2, PI3)
        assert cs.edge_lengths and all(float(l0) <= x <= L0 for x in cs.edge_lengths)


def cone_by_labels(simplices):
    count = {}
    for s in simplices:
        for a in range(4):
            tri = tuple(sorted(v for k, v in enumerate(s) if k != a))
            count[tri] = count.get(tri, 0) + 1
    apex = max(max(s) for s in simplices) + 1
    return GluedTriangulation.from_simplices([tri + (apex,) for tri, c in sorted(count.items()) if c == 1])


def test_criterion_8_shelling_starring():
    balls = [
        [(0, 1, 2, 3)],
        [(0, 1, 2, 3), (1, 2, 3, 4)],
        [(0, 1, 2, 3), (1, 2, 3, 4), (2, 3, 4, 5)],
        [(0, 1, 2, 3), (0, 1, 3, 4), (0, 1, 4, 2)],
    ]
    with time_limit(1):
        for simplices in balls:
            ball = GluedTriangulation.from_simplices(simplices)
            seq = star_shellable_ball(ball, list(range(len(simplices))))
            assert len(seq) == len(simplices)
            end = seq.replay(ball)
            assert is_isomorphic(end, cone_over_boundary(ball))[0]
            assert oracles.brute_force_isomorphic(end, cone_by_labels(simplices))


def small_fixture_pool():
    fig8 = oracles.fixture("figure_eight.tri")
    pool = [oracles.fixture(n) for n in ("figure_eight.tri", "sibling.tri", "gieseking.tri", "one_tet_degree3.tri")]
    pool += [apply(fig8, m) for m in applicable_moves(fig8) if m.kind == TWO_THREE]
    rng = random.Random(99)
    pool += [oracles.random_relabel(T, rng)[0] for T in list(pool)]
    pool += [oracles.random_closed_triangulation(n, rng) for n in (1, 1, 2, 2, 2, 3, 3, 3)]
    return pool


def test_criterion_9_canonical_completeness():
    with time_limit(30):
        pool = small_fixture_pool()
        agree = 0
        for i in range(len(pool)):
            for j in range(i, len(pool)):
                expected = oracles.brute_force_isomorphic(pool[i], pool[j])
                ok, iso = is_isomorphic(pool[i], pool[j])
                assert ok == expected
                if ok:
                    assert iso.commutes(pool[i], pool[j])
                agree += 1
        assert agree == len(pool) * (len(pool) + 1) // 2


def test_criterion_10_derived_counts():
    with time_limit(1):
        assert derived_counts(SimplexCounts(0, 1, 1, 1), 0).as_tuple()[1:] == (2, 6, 24)
        rng = random.Random(10)
        for _ in range(100):
            s1, s2, s3 = (rng.randrange(1000) for _ in range(3))
            assert derived_counts(SimplexCounts(0, s1, s2, s3), 0).as_tuple()[1:] == (2 * s1, 6 * s2, 24 * s3)


CRITERIA = [
    test_criterion_1_figure_eight_systole,
    test_criterion_2_ball_volume_identity,
    test_criterion_3_v_tet_window,
    test_criterion_4_bound_consistency_grid,
    test_criterion_5_pachner_round_trips,
    test_criterion_6_search,
    test_criterion_7_cusp_inequalities,
    test_criterion_8_shelling_starring,
    test_criterion_9_canonical_completeness,
    test_criterion_10_derived_counts,
]


class _Capture:
    """Minimal stand-in for pytest's capsys when run as a script."""

    def readouterr(self):
        text = self.buffer.getvalue()
        self.buffer.seek(0)
        self.buffer.truncate()
        return type("Captured", (), {"out": text, "err": ""})()


def main() -> int:
    import io
    from contextlib import redirect_stdout

    failures = 0
    for index, func in enumerate(CRITERIA, start=1):
        cap = _Capture()
        cap.buffer = io.StringIO()
        try:
            if "capsys" in func.__code__.co_varnames[: func.__code__.co_argcount]:
                with redirect_stdout(cap.buffer):
                    func(cap)
            else:
                func()
            print(f"criterion {index}: PASS")
        except Exception as exc:  # noqa: BLE001
            failures += 1
            print(f"criterion {index}: FAIL ({type(exc).__name__}: {exc})")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
