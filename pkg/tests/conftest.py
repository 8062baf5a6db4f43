from functools import lru_cache

import pytest

from bigramsey.classes import ClassSpec
from bigramsey.flim import build_chain
from bigramsey.structures import RelStruct, Signature

CLASSES = {
    "og": ClassSpec.og(),
    "og_3": ClassSpec.og_k(3),
    "oog": ClassSpec.oog(),
    "ot": ClassSpec.ot(),
    "opo": ClassSpec.opo(),
}


@lru_cache(maxsize=None)
def chain_for(name: str, depth: int = 16):
    return build_chain(CLASSES[name], depth)


def graph(m: int, edges) -> RelStruct:
    return RelStruct.build(m, Signature.single(symmetric=True),
                           {"R0": [p for a, b in edges for p in ((a, b), (b, a))]})


def digraph(m: int, arrows) -> RelStruct:
    return RelStruct.build(m, Signature.single(), {"R0": list(arrows)})


@pytest.fixture(params=sorted(CLASSES))
def class_name(request):
    return request.param


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(number: int, passed: bool, detail: str):
    prev = ACCEPTANCE.get(number)
    if prev is not None:
        passed = passed and prev[0]
        detail = f"{prev[1]}; {detail}"
    ACCEPTANCE[number] = (passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if passed else 'FAIL'} - {detail}")
