"""Acceptance gate: every published criterion at full size, exact checks.

Each test runs one seeded suite at its stated sample count and prints a
pass/fail line; the stated runtime targets are asserted where given.  All
comparisons inside the suites are exact (reduced-diagram equality, braid
normal forms, integer distances) — there are no numeric tolerances to tune.
"""

from __future__ import annotations

from chambord import selftest as st

SEED = st.DEFAULT_SEED


def _report(result: st.SuiteResult, limit: float | None = None):
    print()
    print(result.line())
    assert result.passed, result.detail
    if limit is not None:
        assert result.seconds < limit, f"{result.name} took {result.seconds:.1f}s >= {limit}s"


def test_c1_confluence_unique_reduced_forms():
    # >= 500 seeded diagrams, <= 12 forest vertices, braid words <= 20
    # letters, over the three shipped presets; every reduction order of each
    # diagram must end at the same reduced form.  Runtime target < 60 s.
    _report(st.confluence_suite(501, SEED), limit=60.0)


def test_c2_group_axioms():
    # 500 random triples per preset: associativity, neutrality, inverses.
    _report(st.group_law_suite(500, SEED))


def test_c3_dipole_roundtrip():
    # 500 random (diagram, leaf) pairs: adding a dipole then reducing is the
    # identity, exactly.
    _report(st.dipole_roundtrip_suite(501, SEED))


def test_c4_cylinder_group_laws():
    # rho^q equals the full twist for all 1 <= p, q <= 5; the marked shift is
    # additive; the two equality deciders agree on 10^4 random pairs, p <= 6.
    # Runtime target < 60 s.
    _report(st.cylinder_suite(10_000, SEED), limit=60.0)


def test_c5_forgetful_homomorphism():
    # 500 random pairs: the annular shadow of a product is the product of
    # the shadows; trivial-shadow elements have equal reduced forests.
    _report(st.forgetful_suite(501, SEED))


def test_c6_distance_formula():
    # radius-4 ball over <x | x = x x> and radius-3 over houghton(2):
    # breadth-first distance equals the interior-count formula everywhere.
    _report(st.distance_suite(SEED))


def test_c7_local_curvature_audits():
    # the same balls pass all four audits (no K(3,2), square orientation,
    # opposite edge types, 3-cube completion), plus a deeper ball so the
    # cube check has real corners.  Runtime target < 10 min.
    _report(st.cat0_suite(6, SEED), limit=600.0)


def test_c8_action_and_stabilizers():
    # 200 canonical translates land on resting form; 200 forest braids fix
    # their resting vertex; 200 mismatched-forest elements move it.
    _report(st.action_suite(200, SEED))


def test_c9_projection_retraction():
    # identity on 100 forest braids, the product correction law on 200
    # random pairs, and the sampled Lipschitz ratio within the pinned bound.
    _report(st.projection_suite(200, SEED))


def test_c10_wreath_witness():
    # all six commutators of the shifted twists reduce to the neutral
    # diagram and the shift moves the twist.
    _report(st.wreath_suite(3, SEED))


def test_canary_negative_control():
    # flipping the seam-side constant must break the reduction suites
    _report(st.canary_suite(SEED))
