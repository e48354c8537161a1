import math

import numpy as np
import pytest

import dcp


def test_structured_mesh_constants():
    mesh = dcp.gen_structured("three_direction", 4)
    assert (mesh.num_vertices, mesh.num_triangles, mesh.num_dofs) == (25, 32, 9)
    adm = dcp.analyze(mesh)
    assert adm["schema"] == 1
    assert adm["admissible"]
    assert adm["min_opposite_cot_sum"] == pytest.approx(2 / math.sqrt(3), rel=1e-14)
    assert adm["max_patch_cot_sum"] == pytest.approx(4 / math.sqrt(3), rel=1e-14)
    assert not dcp.analyze(dcp.gen_structured("right_uniform", 4))["admissible"]


def test_mesh_from_arrays_and_files(tmp_path):
    v = np.array([[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.5]])
    t = np.array([[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]])
    mesh = dcp.Mesh(v, t)
    assert mesh.num_dofs == 1
    assert mesh.dof_vertices == [4]
    assert dcp.boundary_distance(mesh) == [0]
    dcp.write_mesh(mesh, str(tmp_path / "m"))
    back = dcp.load_mesh(str(tmp_path / "m"))
    np.testing.assert_array_equal(back.triangles, mesh.triangles)
    with pytest.raises(dcp.MeshError):
        dcp.Mesh(v, np.array([[0, 4, 1]]))
    with pytest.raises(dcp.MeshError):
        dcp.load_mesh(str(tmp_path / "missing"))


def test_solve_and_certify():
    mesh = dcp.gen_structured("three_direction", 8)
    problem = dcp.Problem(kappa=("tanh", [2, 1, 1]), bounds=dcp.DataBounds(1, 3, 1, 0))
    u, trace = dcp.solve(mesh, problem)
    assert trace["converged"]
    assert trace["residual"] <= 1e-9
    assert u.shape == (mesh.num_vertices,)
    A = dcp.assemble(mesh, problem, u, u)
    assert A.shape == (mesh.num_dofs, mesh.num_dofs)
    assert np.all(A - np.diag(np.diag(A)) <= 0)
    cert = dcp.certify(mesh, problem, u, u)
    assert cert["schema"] == 1
    assert cert["verdict"] == "certified_monotone"
    assert cert["oracle"]["monotone"]
    assert min(cert["dominance"]["margins"]) > 0
    assert np.linalg.inv(A).min() >= 0


def test_solver_failure_raises():
    mesh = dcp.gen_structured("three_direction", 6)
    problem = dcp.Problem(kappa=("tanh", [2, 1, 1]), bounds=dcp.DataBounds(1, 3, 1, 0))
    with pytest.raises(dcp.SolveError):
        dcp.solve(mesh, problem, max_iters=1, tol=1e-14)


def test_compare_orders_solutions():
    mesh = dcp.gen_structured("three_direction", 6)
    problem = dcp.Problem(kappa=("rational", [1, 1]), g=("linear", [1]),
                          bounds=dcp.DataBounds(1, 2, 0.65, 1))
    rep = dcp.compare(mesh, problem, ("constant", [0]), ("bump", [2, 0.5, 0.5, 0.3]))
    assert rep["verdict"] == "certified_monotone"
    assert rep["comparison"]["ordered"]
    assert rep["comparison"]["max_u1_minus_u2"] <= 1e-10


def test_matrix_helpers():
    assert dcp.monotone_oracle(np.array([[2.0, -1], [-1, 2]]))["monotone"]
    bad = dcp.monotone_oracle(np.array([[1.0, 2], [2, 1]]))
    assert not bad["monotone"]
    assert bad["min_entry"] == pytest.approx(-1 / 3)
    passed, margins = dcp.strict_dominance_margins(np.array([[1.0, -1], [-1, 1]]), np.array([1, 0.9]))
    assert not passed
    assert margins == pytest.approx([0.1, -0.1])
    assert dcp.epsilon_sequence(0.5, 0.1, 0.5, 3) == pytest.approx([0.5, 0.4, 0.35, 0.325], abs=1e-15)


def test_run_certify_config():
    code, report = dcp.run_certify({
        "mesh": {"generator": {"kind": "three_direction", "n": 6}},
        "problem": {"kappa": {"family": "constant", "params": [1]}},
    })
    assert code == 0
    assert report["comparison"]["uniqueness_gap"] < 1e-8
    with pytest.raises(dcp.ConfigError):
        dcp.run_certify({"mesh": {}, "typo": 1})
