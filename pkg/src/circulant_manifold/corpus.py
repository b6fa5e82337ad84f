"""Built-in example metrics, one per class, with their expected verdicts."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Mapping

from .errors import MetricFileError
from .manifold import MetricSpec, parse_metric

NAMES = ("w0", "w3bar", "w6bar", "w1", "w2")

_H, _F = "holds", "fails"

# Membership claims plus what the lattice forces: W1 and W2 meet in W0,
# W3bar and W6bar meet in W0, nabla Q = 0 implies W0.
_EXPECTED = {
    "w0": ("W0", dict(W0=_H, W3bar=_H, W6bar=_H, W1=_H, W2=_H, W1plusW2=_H, nablaQ0=_F)),
    "w3bar": ("W3bar", dict(W0=_F, W3bar=_H, W6bar=_F, W1=_H, W2=_F, W1plusW2=_H, nablaQ0=_F)),
    "w6bar": ("W6bar", dict(W0=_F, W3bar=_F, W6bar=_H, W1=_H, W2=_F, W1plusW2=_H, nablaQ0=_F)),
    "w1": ("W1", dict(W0=_F, W3bar=_F, W6bar=_F, W1=_H, W2=_F, W1plusW2=_H, nablaQ0=_F)),
    "w2": ("W2", dict(W0=_F, W3bar=_F, W6bar=_F, W1=_F, W2=_H, W1plusW2=_H, nablaQ0=_F)),
}


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    spec: MetricSpec
    most_specific: str
    verdicts: Mapping[str, str]


def source(name: str) -> str:
    if name not in NAMES:
        raise MetricFileError(f"no builtin metric {name!r} (have {', '.join(NAMES)})")
    return resources.files(__package__).joinpath(f"data/{name}.mspec").read_text()


def builtin(name: str, constants: Mapping[str, float] | None = None) -> MetricSpec:
    return parse_metric(source(name), name=name, constants=constants)


def corpus() -> list[CorpusEntry]:
    out = []
    for name in NAMES:
        most, verdicts = _EXPECTED[name]
        out.append(CorpusEntry(name, builtin(name), most, verdicts))
    return out
