import math

import pytest

import sparsejt

TRIANGLE = (
    "MARKOV\n3\n2 2 2\n3\n2 0 1\n2 1 2\n2 0 2\n"
    "4\n0.25 0.25 0.25 0.25\n4\n0.25 0.25 0.25 0.25\n4\n0.25 0.25 0.25 0.25\n"
)

CHAIN = "MARKOV\n3\n2 3 2\n2\n2 0 1\n2 1 2\n6\n0.1 0.7 0 0.3 0.2 0.9\n6\n1 2 0 3 0.5 0.25\n"


@pytest.mark.parametrize("mode", ["multiway", "multiway01", "pairwise", "hybrid"])
def test_triangle_is_uniform(mode):
    r = sparsejt.infer(TRIANGLE, mode=mode)
    assert r["log_partition"] == pytest.approx(math.log(0.125))
    for dist in r["variables"]:
        assert dist == pytest.approx([0.5, 0.5])


def test_matches_brute_force_with_evidence():
    for ev in ["", "1 2 1"]:
        got = sparsejt.infer(CHAIN, ev, mode="hybrid")
        want = sparsejt.brute_force(CHAIN, ev)
        for a, b in zip(got["variables"], want["variables"]):
            assert a == pytest.approx(b, abs=1e-12)
        assert got["log_partition"] == pytest.approx(want["log_partition"], rel=1e-12)
        scope, rows = got["factors"][0]
        assert scope == [0, 1]
        assert sum(rows.values()) == pytest.approx(1.0)


def test_text_helpers():
    assert sparsejt.marginals_text(TRIANGLE).startswith("MAR\n3 2 0.500000 0.500000")
    once = sparsejt.normalize_uai(CHAIN)
    assert sparsejt.normalize_uai(once) == once
    sparse = sparsejt.sparsify(TRIANGLE, 0.5, seed=3)
    assert sparse == sparsejt.sparsify(TRIANGLE, 0.5, seed=3)
    assert "stats" in sparsejt.infer(TRIANGLE)


def test_errors_map_to_exceptions():
    with pytest.raises(sparsejt.ParseError):
        sparsejt.infer("MARKOV\n1\n2\n1\n1 0\n3\n1 1 1")
    with pytest.raises(sparsejt.InconsistentEvidence):
        sparsejt.infer("MARKOV\n1\n2\n1\n1 0\n2\n1 0\n", "1 0 1")
    with pytest.raises(sparsejt.ResourceLimit):
        sparsejt.infer(TRIANGLE, mode="pairwise", memory_cap=4)
    with pytest.raises(sparsejt.Error):
        sparsejt.infer(TRIANGLE, mode="dense")
