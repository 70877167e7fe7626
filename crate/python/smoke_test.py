"""Smoke test for the `cubicgit` extension module.

Uses an installed module when there is one, otherwise the library built by
`cargo build -p cubicgit-python --release`.
"""

import importlib
import json
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent
DOCS = ROOT / "crates" / "core" / "data" / "documents"


def load():
    try:
        return importlib.import_module("cubicgit")
    except ImportError:
        pass
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libcubicgit.so"
        if lib.exists():
            tmp = pathlib.Path(tempfile.mkdtemp())
            shutil.copy(lib, tmp / "cubicgit.so")
            sys.path.insert(0, str(tmp))
            return importlib.import_module("cubicgit")
    sys.exit("cubicgit module not found; run `cargo build -p cubicgit-python --release` first")


def main():
    cg = load()

    monomials = cg.simplex(6)
    assert len(monomials) == 84 and monomials[0] == "x0^3", monomials[:3]

    families = cg.enumerate(2)
    assert [f["vector"] for f in families] == [[2, -1, -1], [1, 1, -2]], families

    fermat = (DOCS / "fermat.json").read_text()
    v = cg.classify(fermat)
    assert v["class"] == "stable" and v["containing"] == [], v
    v = cg.classify((DOCS / "f1_support.json").read_text())
    assert v["class"] == "strictly-not-stable" and v["witness"] == [8, 3, 2, -1, -2, -4, -6], v
    assert cg.classify((DOCS / "r23_support.json").read_text())["class"] == "unstable"

    f1_text = (DOCS / "f1_support.json").read_text()
    assert cg.canonical_document(f1_text) == f1_text

    assert cg.singular_locus(fermat) == (-1, 0)
    assert cg.singular(1) == (1, 2)
    assert cg.singular(4, seed=2) == (1, 8)

    try:
        cg.singular(22, field="rational", max_pairs=20)
    except cg.ResourceExhausted:
        pass
    else:
        raise AssertionError("pair budget was not enforced")

    try:
        cg.classify('{"n": 1, "d": 2, "terms": [{"exp": [1, 0], "coeff": "1"}]}')
    except ValueError as e:
        assert "weight-mismatch" in str(e), e
    else:
        raise AssertionError("bad document accepted")

    report = cg.reproduce("inclusions")
    assert report["diffs"] == [], json.dumps(report["diffs"])
    assert report["inclusions"]["screen"]["pairs_checked"] == 342

    print("python smoke test passed")


if __name__ == "__main__":
    main()
