"""Smoke test for the Python bindings.

Build first:  pip install --no-build-isolation -e crates/py
Run:          python3 python/smoke_test.py   (or pytest python/)
"""
import math
import os
import tempfile

import sslab


def test_catalog():
    names = sslab.catalog_names()
    assert len(names) == 17
    assert "catenoid" in names and "fourpi" in names


def test_catenoid_total_curvature():
    k, kperp = sslab.total_curvature("catenoid", {"t": "0.4"})
    assert abs(k + 4 * math.pi) < 1e-8
    assert abs(kperp) < 1e-8


def test_singular_ends():
    ends = dict((p, i) for p, _, i in sslab.ends("singular1", {"a": "2"}))
    assert ends == {"0": 2, "inf": -2}


def test_periods():
    assert sslab.periods_vanish("catenoid")
    assert not sslab.periods_vanish("helicoid", {"lambda": "i"})


def test_analyze_report():
    r = sslab.analyze("catenoid", area=False)
    assert r["ok"] == "true"
    assert abs(float(r["contour.k_total"]) + 4 * math.pi) < 1e-8


def test_locus_roots():
    kind, pts = sslab.locus("enneper2", "disc:3", {"c": "1", "force": "true"})
    assert kind == "IsolatedPoints"
    xs = sorted(x for x, _ in pts)
    want = sorted([(-1 - 5 ** 0.5) / 2, (-1 + 5 ** 0.5) / 2])
    assert all(abs(a - b) < 1e-8 for a, b in zip(xs, want))


def test_mesh_and_errors():
    with tempfile.TemporaryDirectory() as d:
        out = os.path.join(d, "e.obj")
        nv, nf, clusters = sslab.mesh("enneper_k", out, res=64, proj="drop-x3", scan=True)
        assert (nv, nf, clusters) == (65 * 65, 64 * 64, 2)
        with open(out) as f:
            assert any(l.startswith("f ") for l in f)
    try:
        sslab.mesh("catenoid", "/nonexistent/dir/x.obj", res=16)
    except OSError:
        pass
    else:
        raise AssertionError("expected OSError")
    try:
        sslab.total_curvature("catenoid", {"t": "1"})
    except ValueError as e:
        assert "Param" in str(e)
    else:
        raise AssertionError("expected ValueError")


def test_verify_one():
    [(i, name, ok, _)] = sslab.verify(4)
    assert (i, ok) == (4, True)


if __name__ == "__main__":
    for n, f in sorted(globals().items()):
        if n.startswith("test_"):
            f()
            print("ok", n)
