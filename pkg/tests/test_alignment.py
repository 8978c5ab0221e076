import itertools

import numpy as np
import pytest

from conftest import random_orthogonal, random_tucker
from lscond import (
    AlignmentProblem,
    GdConfig,
    alignment_gradient,
    alignment_objective,
    ls_distance,
    ls_distance_bruteforce_2d,
    perturb_and_project,
    tucker_fiber_rotate,
)


def perturbed_problem(dims, ranks, epsilon, seed):
    d0 = random_tucker(dims, ranks, seed)
    _, d = perturb_and_project(d0, epsilon, seed + 1)
    return AlignmentProblem(reference=d0, candidate=d)


class TestObjective:
    def test_zero_at_self(self):
        d = random_tucker((4, 4, 4), (2, 2, 2), 0)
        p = AlignmentProblem(reference=d, candidate=d)
        assert alignment_objective(p, [np.eye(2)] * 3) == pytest.approx(0.0, abs=1e-14)

    def test_zero_at_fiber_point(self, rng):
        d = random_tucker((5, 4, 4), (2, 2, 2), 1)
        qs = [random_orthogonal(2, rng) for _ in range(3)]
        moved = tucker_fiber_rotate(d, qs)
        p = AlignmentProblem(reference=d, candidate=moved)
        assert alignment_objective(p, qs) <= 1e-12

    def test_matches_direct_expansion(self, rng):
        from lscond import multilinear_multiply

        p = perturbed_problem((4, 5, 4), (2, 2, 2), 1e-2, 5)
        qs = [random_orthogonal(2, rng) for _ in range(3)]
        direct = np.linalg.norm(
            p.reference.core
            - multilinear_multiply([q.T for q in qs], p.candidate.core)
        ) ** 2
        for u0, u, q in zip(p.reference.factors, p.candidate.factors, qs):
            direct += np.linalg.norm(u0 - u @ q) ** 2
        assert alignment_objective(p, qs) == pytest.approx(direct, rel=1e-12)

    def test_shape_mismatch(self):
        d1 = random_tucker((4, 4, 4), (2, 2, 2), 0)
        d2 = random_tucker((4, 4, 5), (2, 2, 2), 0)
        with pytest.raises(ValueError):
            AlignmentProblem(reference=d1, candidate=d2)


class TestGradient:
    def test_tangency(self, rng):
        p = perturbed_problem((5, 4, 4), (3, 2, 2), 1e-2, 9)
        qs = [random_orthogonal(k, rng) for k in (3, 2, 2)]
        for q, g in zip(qs, alignment_gradient(p, qs)):
            w = q.T @ g
            assert np.max(np.abs(w + w.T)) <= 1e-12

    def test_zero_at_global_fiber_minimum(self, rng):
        d = random_tucker((5, 4, 4), (2, 2, 2), 4)
        qs = [random_orthogonal(2, rng) for _ in range(3)]
        p = AlignmentProblem(reference=d, candidate=tucker_fiber_rotate(d, qs))
        grads = alignment_gradient(p, qs)
        assert max(np.max(np.abs(g)) for g in grads) <= 1e-12

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        ranks = (3, 2, 3)
        d0 = random_tucker((5, 4, 6), ranks, 70 + seed)
        d1 = random_tucker((5, 4, 6), ranks, 170 + seed)
        p = AlignmentProblem(reference=d0, candidate=d1)
        qs = [random_orthogonal(k, rng) for k in ranks]
        grads = alignment_gradient(p, qs)
        h = 1e-6
        for i, k in enumerate(ranks):
            w = rng.standard_normal((k, k))
            w = (w - w.T) / 2.0
            xi = qs[i] @ w

            def at(t):
                trial = [q.copy() for q in qs]
                # first-order retraction is enough for a central difference
                trial[i] = np.linalg.qr(qs[i] + t * xi)[0]
                trial[i] *= np.sign(
                    np.sign(np.diag(np.linalg.qr(qs[i] + t * xi)[1])) + 0.5
                )
                return alignment_objective(p, trial)

            fd = (at(h) - at(-h)) / (2.0 * h)
            analytic = float(np.sum(grads[i] * xi))
            assert fd == pytest.approx(analytic, rel=1e-6, abs=1e-8)


class TestSolver:
    def test_zero_for_identical(self):
        d = random_tucker((5, 5, 5), (3, 3, 3), 21)
        res = ls_distance(AlignmentProblem(reference=d, candidate=d))
        assert res.E_hat <= 1e-10
        assert res.converged

    def test_zero_for_fiber_rotation(self, rng):
        d = random_tucker((5, 5, 5), (3, 3, 3), 22)
        qs = [random_orthogonal(3, rng) for _ in range(3)]
        p = AlignmentProblem(reference=d, candidate=tucker_fiber_rotate(d, qs))
        assert ls_distance(p).E_hat <= 1e-7

    def test_descent_is_monotone_and_orthogonal(self):
        from lscond.alignment import _descend, _procrustes_start

        p = perturbed_problem((5, 5, 5), (3, 3, 3), 1e-1, 33)
        cfg = GdConfig(max_iters=50, grad_tol=1e-15)
        qs0 = [np.eye(3)] * 3
        f0 = alignment_objective(p, qs0)
        qs, f, iters, _, _ = _descend(p, qs0, cfg)
        assert f <= f0
        for q in qs:
            assert np.max(np.abs(q.T @ q - np.eye(3))) <= 1e-10

    @pytest.mark.parametrize("seed", range(5))
    def test_k1_matches_exhaustive_signs(self, seed):
        d0 = random_tucker((4, 3, 5), (1, 1, 1), 40 + seed)
        d1 = random_tucker((4, 3, 5), (1, 1, 1), 140 + seed)
        p = AlignmentProblem(reference=d0, candidate=d1)
        best = min(
            alignment_objective(p, [np.array([[s]]) for s in signs])
            for signs in itertools.product([1.0, -1.0], repeat=3)
        )
        res = ls_distance(p)
        assert res.E_hat == pytest.approx(np.sqrt(best), abs=1e-10)

    @pytest.mark.parametrize("seed", range(8))
    def test_k2_matches_bruteforce(self, seed):
        p = perturbed_problem((4, 5, 4), (2, 2, 2), 10.0 ** -(1 + seed % 4), 60 + seed)
        res = ls_distance(p, GdConfig(n_restarts=4, seed=seed))
        oracle = ls_distance_bruteforce_2d(p)
        assert res.E_hat == pytest.approx(oracle, abs=1e-5)

    def test_symmetric_in_arguments(self):
        p = perturbed_problem((4, 4, 4), (2, 2, 2), 1e-2, 87)
        fwd = ls_distance(p, GdConfig(n_restarts=4)).E_hat
        rev = ls_distance(
            AlignmentProblem(reference=p.candidate, candidate=p.reference),
            GdConfig(n_restarts=4),
        ).E_hat
        assert fwd == pytest.approx(rev, abs=1e-8)


class TestBruteForce:
    def test_zero_for_identical(self):
        d = random_tucker((4, 4, 4), (2, 2, 2), 3)
        p = AlignmentProblem(reference=d, candidate=d)
        assert ls_distance_bruteforce_2d(p) <= 1e-6

    def test_rejects_large_k(self):
        d = random_tucker((5, 5, 5), (3, 3, 3), 3)
        with pytest.raises(ValueError):
            ls_distance_bruteforce_2d(AlignmentProblem(reference=d, candidate=d))

    def test_small_perturbation_sanity_bound(self):
        d0 = random_tucker((4, 5, 4), (2, 2, 2), 91)
        from lscond import cond_tucker, tucker_reconstruct

        x0 = tucker_reconstruct(d0)
        x, d = perturb_and_project(d0, 1e-3, 92)
        p = AlignmentProblem(reference=d0, candidate=d)
        kappa = cond_tucker(d0, "relative").kappa_rel
        bound = kappa * np.linalg.norm(x - x0)
        assert ls_distance_bruteforce_2d(p) <= bound * 1.5
