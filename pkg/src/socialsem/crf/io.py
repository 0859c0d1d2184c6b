"""Text format for CRF models.

Single level::

    socialsem-crf 1
    [meta]
    sigma=<float>
    [tags]
    <one tag per line, id order>
    [features]
    <one feature string per line, id order>
    [weights]
    <state weights row-major (feature, tag), then transitions (from, to); one per line>

A nested model is ``socialsem-nested-crf 1`` / ``levels=<k>`` / ``half_width=<w>``
followed by ``[level 1]`` ... ``[level k]`` blocks, each holding a single-level
file. Floats are written with ``repr`` so a load restores them exactly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .model import CrfModel
from .train import NestedModel

FORMAT = "socialsem-crf"
NESTED_FORMAT = "socialsem-nested-crf"
VERSION = 1


class ModelFormatError(ValueError):
    pass


def dumps_crf(model: CrfModel) -> str:
    lines = [f"{FORMAT} {VERSION}", "[meta]", f"sigma={model.sigma!r}", "[tags]"]
    lines += list(model.tags)
    lines.append("[features]")
    lines += list(model.features)
    lines.append("[weights]")
    lines += [repr(float(w)) for w in model.weights]
    return "\n".join(lines) + "\n"


def loads_crf(text: str) -> CrfModel:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].split() != [FORMAT, str(VERSION)]:
        raise ModelFormatError(f"not a {FORMAT} v{VERSION} model")
    sections: dict[str, list[str]] = {}
    current = None
    for line in lines[1:]:
        if line in ("[meta]", "[tags]", "[features]", "[weights]"):
            current = line[1:-1]
            sections[current] = []
        elif current is None:
            raise ModelFormatError("content before the first section")
        else:
            sections[current].append(line)
    for name in ("meta", "tags", "features", "weights"):
        if name not in sections:
            raise ModelFormatError(f"missing section [{name}]")
    tags = sections["tags"]
    if not tags:
        raise ModelFormatError("model has an empty tag set")
    if len(set(tags)) != len(tags):
        raise ModelFormatError("duplicate tags in model")
    meta = dict(line.partition("=")[::2] for line in sections["meta"])
    try:
        theta = np.array([float(w) for w in sections["weights"]])
    except ValueError as exc:
        raise ModelFormatError(f"bad weight: {exc}") from None
    try:
        return CrfModel.from_weights(tags, sections["features"], theta, float(meta.get("sigma", 1.0)))
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from None


def dumps_nested(model: NestedModel) -> str:
    out = [f"{NESTED_FORMAT} {VERSION}", f"levels={model.n_levels}", f"half_width={model.half_width}"]
    text = "\n".join(out) + "\n"
    for k, crf in enumerate(model.levels, 1):
        text += f"[level {k}]\n" + dumps_crf(crf)
    return text


def loads_nested(text: str) -> NestedModel:
    lines = text.split("\n")
    if len(lines) < 3 or lines[0].split() != [NESTED_FORMAT, str(VERSION)]:
        raise ModelFormatError(f"not a {NESTED_FORMAT} v{VERSION} model")
    try:
        levels = int(lines[1].partition("=")[2])
        half_width = int(lines[2].partition("=")[2])
    except ValueError:
        raise ModelFormatError("bad nested model header") from None
    blocks: list[list[str]] = []
    for line in lines[3:]:
        if line == f"[level {len(blocks) + 1}]":
            blocks.append([])
        elif blocks:
            blocks[-1].append(line)
        elif line:
            raise ModelFormatError("content before [level 1]")
    if len(blocks) != levels:
        raise ModelFormatError(f"header declares {levels} levels, found {len(blocks)}")
    return NestedModel(tuple(loads_crf("\n".join(b)) for b in blocks), half_width)


def save_nested(model: NestedModel, path: str | Path) -> None:
    Path(path).write_text(dumps_nested(model), encoding="utf-8")


def load_nested(path: str | Path) -> NestedModel:
    return loads_nested(Path(path).read_text(encoding="utf-8"))
