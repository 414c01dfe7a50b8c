"""Smoke test for the apolar_py extension module."""

import json

import apolar_py as ap


def main():
    net = ap.FormSystem.random(2, 3, 3, 7)
    assert (net.n, net.d, net.r) == (2, 3, 3)
    assert net.perp_dim(2) == 0 == ap.expected_perp_dim(2, 3, 3, 2)
    assert net.perp_dim(3) == ap.expected_perp_dim(2, 3, 3, 3)

    again = ap.FormSystem.from_json(net.to_json())
    assert json.loads(again.to_json()) == json.loads(net.to_json())

    assert ap.count_on_curve(9, 12, 3) == 4
    report = ap.count_quadruple(3, 3, 2, 8)
    assert report["count"] == 3 and report["params"]["m"] == 8

    c = ap.london_count(net, 32003, 3)
    assert (c["common"], c["united"], c["hexahedra"]) == (72, 12, 2)

    pencil = ap.FormSystem.random(2, 3, 8, 11)
    assert ap.base_locus(pencil)["count"] == 9

    d = ap.diagonalize(ap.FormSystem.random(3, 2, 2, 1))
    assert d["verification"]["reye_residual"] < 1e-8 and len(d["forms"]) == 4

    assert ap.grove_rank(3) == 16
    assert "total:" in ap.generic_betti(2, 7)
    assert "total:" in ap.betti_diagram(1, [[1, 0], [0, 1], [1, 1]])

    try:
        ap.FormSystem.from_json("{")
    except ap.ApolarError:
        pass
    else:
        raise AssertionError("malformed JSON was accepted")

    print("apolar_py", ap.__version__, "smoke test passed")


if __name__ == "__main__":
    main()
