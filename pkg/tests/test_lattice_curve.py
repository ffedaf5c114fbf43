import math

import pytest

from ckmc.lattice_curve import (
    CornerFlip, CurveError, IllegalMove, LatticeCurve, PoleDelete, PoleGrow, apply_move,
    build_rectangle, curve_from_rows, diamond, discretize_shape, disk, from_snapshot,
    hausdorff_distance, l1_distance, pole_table, square, stationary_log_weight, to_snapshot,
    validate,
)

from helpers import legal_moves


def test_unit_square_geometry():
    c = build_rectangle(4, 4, 4)
    assert validate(c).ok
    assert c.length == 4 and c.area == 1
    poles, ext = pole_table(c)
    assert [p.p for p in poles] == [4, 4, 4, 4]
    assert ext["z"] == (0.5, 0.5, -0.5, -0.5)


def test_minimal_square_has_two_edge_poles():
    poles, _ = pole_table(build_rectangle(2, 2, 2))
    assert all(p.p == 2 for p in poles)


@pytest.mark.parametrize("center", [(5, 0), (0, -3), (2, 2)])
def test_rectangle_must_contain_origin(center):
    with pytest.raises(CurveError):
        build_rectangle(4, 4, 4, center=center)


def test_rectangle_too_small():
    with pytest.raises(CurveError):
        build_rectangle(4, 1, 4)


def test_discretized_disk_area():
    c = discretize_shape(disk(0.4), 64)
    assert validate(c).ok
    assert math.pi * 0.16 - 8 / 64 <= c.area <= math.pi * 0.16


def test_square_discretizes_exactly():
    assert discretize_shape(square(1.0), 8) == build_rectangle(8, 8, 8)


def test_small_disk_is_padded():
    c = discretize_shape(disk(0.4), 4)
    assert validate(c).ok
    assert all(p.p >= 2 for p in pole_table(c)[0])


def test_diamond_is_valid():
    assert validate(discretize_shape(diamond(0.45), 32)).ok


def test_validate_flags_thin_pole():
    rows = {0: (-1, 0), -1: (-2, 0)}
    # top row of one block gives a one-edge north pole
    c = curve_from_rows(4, {1: (0, 0), **rows})
    assert any("pole" in v for v in validate(c).violations)


def test_validate_flags_figure_eight():
    c = LatticeCurve(4, (0, 0), "RDRDLULU")
    assert "not simple" in validate(c).violations


def test_validate_flags_open_curve():
    assert validate(LatticeCurve(4, (0, 0), "RRDL")).violations == ["not closed"]


def test_corner_removed_gives_p3():
    rows = {j: (-2, 1) for j in range(-2, 2)}
    rows[1] = (-2, 0)
    poles, _ = pole_table(curve_from_rows(4, rows))
    assert poles[0].p == 3


def test_two_block_pole_delete_and_round_trip():
    rows = {j: (-2, 1) for j in range(-2, 1)}
    rows[1] = (-1, 0)
    c = curve_from_rows(8, rows)
    assert pole_table(c)[0][0].p == 2
    d = apply_move(c, PoleDelete(1))
    assert d.area == pytest.approx(c.area - 2 / 64)
    assert d.length == pytest.approx(c.length - 2 / 8)
    grow = c.inverse(PoleDelete(1))
    assert apply_move(d, grow) == c


def test_corner_flip_area_and_length():
    c = build_rectangle(4, 4, 4)
    v = c.vertices[0]
    block, sign = c.flip_block(v)
    assert sign == -1
    d = apply_move(c, CornerFlip(v, sign))
    assert d.area == pytest.approx(c.area - 1 / 16)
    assert d.length == c.length


def test_grow_then_delete_is_identity():
    c = build_rectangle(8, 4, 4)
    poles, _ = pole_table(c)
    L = poles[0].L
    g = apply_move(c, PoleGrow(1, (L[0] + 2, L[1])))
    assert g.area == pytest.approx(c.area + 2 / 64)
    assert apply_move(g, PoleDelete(1)) == c


def test_flip_sign_mismatch_raises():
    c = build_rectangle(4, 4, 4)
    with pytest.raises(IllegalMove):
        apply_move(c, CornerFlip(c.vertices[0], +1))


def test_moves_preserve_invariants_and_inverse(small_curves):
    for c in small_curves[:25]:
        for m in legal_moves(c):
            d = apply_move(c, m)
            assert validate(d).ok
            da = abs(d.area - c.area) * c.N**2
            dl = abs(len(d) - len(c))
            assert round(da) in (1, 2)
            if isinstance(m, CornerFlip):
                assert dl == 0
            else:
                assert dl == 2
            assert apply_move(d, c.inverse(m)) == c


def test_distances_examples():
    N = 8
    a = build_rectangle(N, 8, 8)
    b = curve_from_rows(N, {j + 1: r for j, r in a.rows().items()})
    assert l1_distance(a, a) == 0 and hausdorff_distance(a, a) == 0
    assert l1_distance(a, b) == pytest.approx(2 / N)
    assert hausdorff_distance(a, b) == pytest.approx(1 / N)
    c = build_rectangle(N, 6, 6)
    assert l1_distance(a, c) == pytest.approx(1 - (1 - 2 / N) ** 2)
    assert hausdorff_distance(a, c) == pytest.approx(1 / N)


def test_distance_metric_axioms(small_curves):
    cs = small_curves[::6][:8]
    for a in cs:
        for b in cs:
            assert l1_distance(a, b) == pytest.approx(l1_distance(b, a))
            assert hausdorff_distance(a, b) == hausdorff_distance(b, a)
            assert (l1_distance(a, b) == 0) == (a == b)
            for c in cs:
                assert l1_distance(a, c) <= l1_distance(a, b) + l1_distance(b, c) + 1e-12
                assert hausdorff_distance(a, c) <= (hausdorff_distance(a, b)
                                                    + hausdorff_distance(b, c) + 1e-12)


def test_distances_across_scales():
    a = build_rectangle(4, 4, 4)
    b = build_rectangle(8, 8, 8)
    assert l1_distance(a, b) == 0
    assert hausdorff_distance(a, b) == 0


def test_stationary_log_weight():
    assert stationary_log_weight(build_rectangle(4, 4, 4), 1.0) == -16


@pytest.mark.parametrize("beta", [1.5, math.inf, 2.0000000000000004])
def test_snapshot_round_trip(beta, small_curves):
    c = small_curves[7]
    text = to_snapshot(c, beta, 0.1 + 0.2)
    d, b, t = from_snapshot(text)
    assert d == c and b == beta and t == 0.1 + 0.2
    assert to_snapshot(d, b, t) == text


def test_snapshot_anchor_is_north_pole_start():
    c = build_rectangle(4, 4, 4)
    shifted = LatticeCurve(4, c.vertices[3], c.edges[3:] + c.edges[:3])
    assert to_snapshot(shifted, 2.0, 0.0) == to_snapshot(c, 2.0, 0.0)
    assert to_snapshot(c, 2.0, 0.0).splitlines()[1] == "anchor -2 2"


def test_bad_snapshot_rejected():
    with pytest.raises(CurveError):
        from_snapshot("XX N=4 beta=2 t=0\nanchor 0 0\nRDLU\n")
