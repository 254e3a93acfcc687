"""Builds the extension module and exercises each binding once.

Run from the repository root: python3 python/smoke_test.py
"""

import json
import pathlib
import shutil
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def build():
    subprocess.run(
        ["cargo", "build", "--offline", "--release", "-p", "stabforge-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    lib = ROOT / "target" / "release" / "libstabforge_py.so"
    out = pathlib.Path(tempfile.mkdtemp())
    shutil.copy(lib, out / "stabforge_py.so")
    sys.path.insert(0, str(out))


def main():
    build()
    import stabforge_py as sf

    s = sf.stab("tstar-pn", n=3, slope="1/7")
    assert json.loads(s)["schema"] == 1
    assert sf.verify(s)
    assert sf.resonance("tstar-pn", n=4) == ["1", "h", "h^2", "h^3"]
    assert sf.gram_matrix("2x,y,x-y") == [[5, -1], [-1, 2]]
    t = json.loads(sf.tessellate("2x,y,x-y"))
    assert t["det"] == 9
    f = json.loads(sf.floors("mu2"))
    assert f["counts"]["T"] == [10, 3]
    assert sf.theta_check(20)
    lim = json.loads(sf.nodal_limit("1/3"))
    assert lim["agrees"] and lim["monomial"] == "1"
    try:
        sf.nodal_limit("1", zeta="h")
    except ValueError as e:
        assert "resonant" in str(e)
    else:
        raise AssertionError("expected a resonance error")
    print("python smoke test: ok")


if __name__ == "__main__":
    main()
