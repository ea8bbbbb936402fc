"""Smoke test for the minkgeo_py extension.

Build first:  cargo build --release -p minkgeo-py --features extension-module
Then run:     python3 python/smoke_test.py [path/to/libminkgeo_py.so]
"""

import importlib.util
import math
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def locate(argv):
    if len(argv) > 1:
        return Path(argv[1])
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libminkgeo_py.so"
        if lib.exists():
            return lib
    sys.exit("libminkgeo_py.so not found; build the minkgeo-py crate first")


def load(lib):
    # Python only imports extensions whose file name matches the module.
    tmp = Path(tempfile.mkdtemp())
    target = tmp / "minkgeo_py.so"
    shutil.copy(lib, target)
    spec = importlib.util.spec_from_file_location("minkgeo_py", target)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def close(a, b, tol=1e-9):
    assert abs(a - b) <= tol, (a, b)


def main():
    m = load(locate(sys.argv))

    square = m.Body.unit_cube(2)
    close(square.gauge([3.0, 1.0]), 3.0)
    close(m.minkowski_distance(square, [0.0, 0.0], [3.0, 1.0]), 3.0)

    disc = m.Body.unit_ball(2)
    close(m.funk_distance(disc, [0.0, 0.0], [0.5, 0.0]), math.log(2.0))
    close(m.hilbert_distance(disc, [0.0, 0.0], [0.5, 0.0]), 0.5 * math.log(3.0))
    row = m.compare(disc, [0.0, 0.0], [0.5, 0.0])
    assert row["version"] == 1
    close(row["funk_yx"], math.log(1.5))

    triangle = m.Body.from_json('{"type": "vpolytope", "vertices": [[1, 0], [-1, 1], [-1, -1]]}')
    assert triangle.dimension == 2
    close(triangle.gauge([-2.0, 0.0]), 2.0)

    half_plane = m.Body.hpolytope([[1.0, 0.0]], [1.0])
    ray = half_plane.recession_ray()
    assert ray is not None and ray[0] < 0.0

    report = m.check(square, "minkowski", seed=7, samples=300)
    assert report["passed"], report
    capped = m.check_pathological("capped_norm", "minkowski", seed=7, samples=300)
    assert not capped["passed"]

    t = m.fundamental_tensor(m.Body.lp_ball(4.0, [1.0, 1.0]), [1.0, 0.0])
    assert t["min_eigenvalue"] <= 1e-3

    fit = m.mvee([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])
    close(fit["shape"][0][0], 0.5, 1e-6)

    svg = m.render(square, resolution=16)
    assert svg.startswith("<?xml") and 'id="indicatrix"' in svg

    try:
        m.Body.lp_ball(0.5, [1.0, 1.0])
    except m.MinkgeoError as e:
        assert "invalid_body" in str(e)
    else:
        raise AssertionError("p < 1 accepted")

    print("minkgeo_py smoke test: ok")


if __name__ == "__main__":
    main()
