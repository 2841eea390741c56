import numpy as np
import pytest

from conftest import q
from pclab.backend import RATIONAL as Q
from pclab.errors import (
    ContractionError,
    DomainError,
    ImageBoundsError,
    OverlappingImagesError,
    ValidationError,
)
from pclab.intervals import interval_set
from pclab.maps import (
    Affine,
    BoundaryAssignment,
    BranchSystem,
    ParameterPoint,
    PiecewiseContraction,
    Quadratic,
    Side,
    build_inverse,
    g_branch,
    gap_set,
    pc_branch,
    pc_eval,
    pc_image,
    pc_image_set,
    validate_system,
)
from pclab.ergodic import expansion_audit


def test_s2_images_gaps_kappa(s2):
    assert [str(a) for a in s2.images] == ["[1/10, 2/5]", "[1/2, 4/5]"]
    assert [str(b) for b in s2.gaps] == ["[0, 1/10)", "(2/5, 1/2)", "(4/5, 1)"]
    assert s2.kappa == q("0.3")


def test_example_branches_are_not_in_the_class():
    with pytest.raises(ImageBoundsError, match="branch 2"):
        validate_system([Affine("0.5", "0.25"), Affine("0.5", "-0.25")])


def test_quadratic_affine_system():
    s = validate_system([Quadratic(0.2, 0.25, 0.05), Affine(0.3, 0.6)], "float")
    assert [(a.lo, a.hi) for a in s.images] == [(0.2, pytest.approx(0.5)), (0.6, pytest.approx(0.9))]


def test_validation_errors_name_the_branch():
    with pytest.raises(OverlappingImagesError, match="1 and 2"):
        validate_system([Affine("0.3", "0.1"), Affine("0.3", "0.3")])
    with pytest.raises(ContractionError, match="branch 2"):
        validate_system([Affine("0.3", "0.1"), Affine("1", "0")])
    with pytest.raises(ContractionError, match="critical point"):
        validate_system([Quadratic(0.3, 0.2, -0.2)], "float")
    with pytest.raises(ValidationError, match="float backend"):
        validate_system([Quadratic(0.2, 0.25, 0.05)], "rational")
    with pytest.raises(ImageBoundsError):
        validate_system([Affine("0.3", "0")])


def test_touching_images_rejected():
    with pytest.raises(OverlappingImagesError):
        validate_system([Affine("0.3", "0.1"), Affine("0.3", "0.4")])


def test_parameter_point_invariants():
    with pytest.raises(ValidationError):
        ParameterPoint((q("0.5"), q("0.4")))
    with pytest.raises(ValidationError):
        ParameterPoint((q("0"),))
    with pytest.raises(ValidationError):
        ParameterPoint((q("1"),))


def test_wrong_cut_count(s2):
    with pytest.raises(ValidationError, match="need 1 cuts"):
        PiecewiseContraction(s2, (q("0.2"), q("0.4")))


def test_pc_eval_examples(f1, f_left, f_right):
    assert pc_eval(f1, q(0)) == q("1/4")
    assert pc_eval(f1, q("1/2")) == 0
    assert pc_eval(f_right, q("0.3")) == q("0.59")
    assert pc_eval(f_left, q("0.3")) == q("0.19")


def test_pc_branch_examples(f1, f_left):
    assert pc_branch(f1, q("0.49")) == 1
    assert pc_branch(f1, q("0.5")) == 2
    assert pc_branch(f_left, q("0.3")) == 1


def test_domain_errors(f_right):
    for x in (q(1), q(-1), q("1.5")):
        with pytest.raises(DomainError):
            f_right(x)


def test_image_and_gap_sets(f_left, f_right):
    # the cut 0.3 goes with the left piece: I_1 = [0, 0.3], I_2 = (0.3, 1)
    assert pc_image_set(f_left) == interval_set([("0.1", "0.19", True, True), ("0.59", "0.8", False, False)])
    assert gap_set(f_left) == interval_set([("0", "0.1", True, False), ("0.19", "0.59", False, True), ("0.8", "1", True, False)])
    assert pc_image_set(f_right) == interval_set([("0.1", "0.19", True, False), ("0.59", "0.8", True, False)])
    assert gap_set(f_right) == interval_set([("0", "0.1", True, False), ("0.19", "0.59", True, False), ("0.8", "1", True, False)])


def test_general_mode_image(f1):
    assert pc_image_set(f1) == interval_set([("0", "0.5", True, False)])
    assert gap_set(f1) == interval_set([("0.5", "1", True, False)])


def test_gap_interior_nonempty_and_contains_image_complement(s2, f_right):
    G = gap_set(f_right)
    complement = interval_set([(b.lo, b.hi, False, False) for b in s2.gaps])
    assert G.interior()
    assert complement.issubset(G.interior())


def test_pc_image_of_subset(f_right):
    s = interval_set([("0.2", "0.4", False, False)])
    assert pc_image(f_right, s) == interval_set([("0.16", "0.19", False, False), ("0.59", "0.62", True, False)])


def test_boundary_assignment_enumeration():
    all_ = BoundaryAssignment.enumerate(2)
    assert len(all_) == 4
    assert len(set(all_)) == 4
    assert BoundaryAssignment.all("attach-left", 3).sides == (Side.LEFT,) * 3
    with pytest.raises(ValidationError):
        Side.parse("middle")


# -- expanding map ---------------------------------------------------------------


def test_g_examples(g2):
    assert g2(q("0.25")) == q("0.5")
    assert g2(q("0.45")) == q("0.5")
    assert g2(q(0)) == 0
    assert g2(q(1)) == 1
    assert g2(q("2/3")) == q("5/9")
    assert g2.d == 5
    assert g2.expansion == q("10/3")


def test_g_tie_convention(g2):
    # the closed image A_1 = [0.1, 0.4] wins at both of its endpoints
    assert g2.pieces[g_branch(g2, q("0.1"))].label == "A1"
    assert g2.pieces[g_branch(g2, q("0.4"))].label == "A1"
    assert g2.pieces[g_branch(g2, q("0.8"))].label == "A2"
    assert g2.pieces[g_branch(g2, q("0.09"))].label == "B1"


def test_left_inverse_identity_example(f_right, g2):
    assert f_right(q("0.7")) == q("0.71")
    assert g2(q("0.71")) == q("0.7")


def test_left_inverse_every_assignment_rational():
    rng = np.random.default_rng(5)
    s = validate_system([Affine("0.2", "0.05"), Affine("-0.25", "0.6"), Affine("0.1", "0.8")])
    g = build_inverse(s)
    for sides in BoundaryAssignment.enumerate(2):
        f = PiecewiseContraction(s, (q("1/3"), q("2/3")), sides)
        for x in [q(0), q("1/3"), q("2/3")] + [Q(int(k)) / 997 for k in rng.integers(0, 997, 200)]:
            assert g(f(x)) == x


def test_injective_and_contracting(f_right):
    rng = np.random.default_rng(1)
    xs = [Q(int(k)) / 10007 for k in rng.integers(0, 10007, 300)]
    ys = [f_right(x) for x in xs]
    assert len(set(ys)) == len(set(xs))
    for x, y in zip(xs, xs[1:]):
        if f_right.branch_index(x) == f_right.branch_index(y):
            assert abs(f_right(x) - f_right(y)) <= q("0.3") * abs(x - y)


def test_expansion_audit(s2, s3):
    for system in (s2, s3):
        g = build_inverse(system)
        for label, slope in expansion_audit(g, probes=1000).items():
            assert slope >= float(g.expansion) - 1e-6, label


def test_general_mode_has_no_inverse(f1):
    with pytest.raises(ValidationError):
        build_inverse(f1.system)


def test_general_mode_must_be_self_map():
    s = BranchSystem([Affine("0.5", "0.6"), Affine("0.5", "0")], Q, general=True)
    with pytest.raises(ImageBoundsError):
        PiecewiseContraction(s, (q("0.9"),))


def test_float_backend_map(s3):
    f = PiecewiseContraction(s3, (0.4,))
    g = build_inverse(s3)
    for x in np.linspace(0, 0.999, 101):
        assert abs(g(f(float(x))) - x) <= 1e-12
