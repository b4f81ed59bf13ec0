import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgverify.errors import ParameterError, ResourceError
from qgverify.config import RunConfig
from qgverify.dynamics import (
    alternating_projection_run,
    estimate_rate,
    friedrichs_cos,
    friedrichs_cos_from_projections,
    iterations_csv,
    line_projector,
    run_projections,
    synthetic_lines_run,
)
from qgverify.family import GeneratorFamily
from qgverify.linalg import intersection_dimension
from qgverify.fixspaces import generator_family, parse_descriptor
from qgverify.tensors import basis_vector, vector


def test_same_family_converges_immediately():
    r = alternating_projection_run("stab:N=4,xi=e1", "stab:N=4,xi=e1", k=4)
    assert r.iterations[0][0] == 1 and r.iterations[0][1] < 1e-12
    assert r.converged and r.friedrichs_cos == 0.0


def test_lines_at_quarter_turn():
    r = synthetic_lines_run(math.pi / 4)
    assert abs(r.estimated_rate - 0.5) <= 0.05 * 0.5
    assert r.is_monotone() and r.within_bound()
    assert r.limit_rank == 0


def test_orthogonal_and_stabilizer_limit():
    r = alternating_projection_run("on:N=4", "stab:N=4,xi=e1", k=4, max_iter=200)
    assert r.converged
    assert r.limit_rank == 2 == r.exact_intersection_dim
    assert abs(r.limit_trace - 2) < 1e-8
    assert r.is_monotone() and r.within_bound()
    assert 0 <= r.estimated_rate <= 1
    assert abs(r.estimated_rate - r.friedrichs_cos ** 2) < 0.05 * r.friedrichs_cos ** 2


@pytest.mark.parametrize("a,b,k", [("on:N=3", "stab:N=3,xi=e1", 4), ("on+:N=3", "stab:N=3,xi=e1", 2),
                                   ("stab:N=3,xi=e1", "stab:N=3,xi=3/5,4/5,0", 4),
                                   ("sn:N=3", "fp:N=3,a=1,b=2", 3), ("on:N=2", "on+:N=2", 4)])
def test_limit_rank_matches_exact_pipeline(a, b, k):
    r = alternating_projection_run(a, b, k=k, max_iter=400)
    A = generator_family(parse_descriptor(a), None, k)
    B = generator_family(parse_descriptor(b), None, k)
    assert r.limit_rank == intersection_dimension(A, B) == r.exact_intersection_dim
    assert r.is_monotone() and r.within_bound()
    assert 0.0 <= r.estimated_rate <= 1.0


def test_friedrichs_examples():
    e1 = GeneratorFamily.from_vectors([basis_vector(2, 1)])
    e2 = GeneratorFamily.from_vectors([basis_vector(2, 2)])
    assert friedrichs_cos(e1, e2) == 0.0
    assert friedrichs_cos(e1, e1) == 0.0
    P1, P2 = line_projector(0), line_projector(math.pi / 3)
    assert abs(friedrichs_cos_from_projections(P1, P2, np.zeros((2, 2))) - 0.5) < 1e-12


def test_friedrichs_exact_rational_line():
    a = GeneratorFamily.from_vectors([basis_vector(2, 1)])
    b = GeneratorFamily.from_vectors([vector([3, 4])])
    assert abs(friedrichs_cos(a, b) - 0.6) < 1e-12


@given(st.floats(0.05, math.pi / 2 - 0.05))
@settings(max_examples=30, deadline=None)
def test_line_pairs_obey_two_subspace_bound(theta):
    r = synthetic_lines_run(theta, max_iter=60)
    assert abs(r.friedrichs_cos - math.cos(theta)) < 1e-12
    assert r.is_monotone() and r.within_bound()
    assert 0.0 <= r.estimated_rate <= 1.0


def test_dense_limit():
    with pytest.raises(ResourceError):
        alternating_projection_run("on:N=4", "stab:N=4,xi=e1", k=6, config=RunConfig(dense_limit=1024))


def test_non_convergence_is_reported():
    r = synthetic_lines_run(0.01, max_iter=5)
    assert not r.converged and len(r.iterations) == 5


def test_bad_arguments():
    P = np.eye(2)
    with pytest.raises(ParameterError):
        run_projections(P, P, P, tol=0)
    with pytest.raises(ParameterError):
        run_projections(P, P, P, max_iter=0)


def test_rate_fit():
    assert estimate_rate([0.5 ** m for m in range(1, 30)]) == pytest.approx(0.5)
    assert estimate_rate([1e-16]) == 0.0


def test_csv_table():
    r = synthetic_lines_run(math.pi / 4, max_iter=3, tol=1e-300)
    lines = iterations_csv(r).splitlines()
    assert lines[0] == "m,distance" and len(lines) == 4
    m, d = lines[1].split(",")
    assert int(m) == 1 and float(d) == pytest.approx(math.cos(math.pi / 4))


def test_report_dict():
    d = synthetic_lines_run(math.pi / 4, max_iter=3).to_dict()
    assert d["iterations"][0][0] == 1 and "friedrichs_cos" in d
