"""Line-oriented text format for profiler models.

Grammar (one item per line)::

    socialsem-profiler <version>
    [meta]
    key=value                   # age_labels, seed, n_documents, vocabulary_size, n_batches, params
    [mask]
    b1 b2 ... b9                # 1 = statistic kept
    [forest:gender]
    labels=<comma separated>
    n_features=<int>
    n_trees=<int>
    tree <index> seed=<int> nodes=<count>
    S <feature> <threshold>     # split node, left subtree follows, then right
    L <label index>             # leaf
    ...
    [forest:age]
    ...

Nodes are written in pre-order; thresholds use ``repr`` so reading restores
the exact floats.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .features import N_FEATURES
from .forest import DecisionTree, Forest
from .pipeline import ProfilerModel, ProfilerParams

FORMAT = "socialsem-profiler"
VERSION = 1


class ModelFormatError(ValueError):
    pass


def _forest_lines(name: str, forest: Forest) -> list[str]:
    out = [
        f"[forest:{name}]",
        "labels=" + ",".join(forest.labels),
        f"n_features={forest.n_features}",
        f"n_trees={len(forest.trees)}",
    ]
    for t, tree in enumerate(forest.trees):
        out.append(f"tree {t} seed={tree.seed} nodes={tree.n_nodes}")
        for i in range(tree.n_nodes):
            if tree.feature[i] >= 0:
                out.append(f"S {int(tree.feature[i])} {float(tree.threshold[i])!r}")
            else:
                out.append(f"L {int(tree.value[i])}")
    return out


def dumps_model(model: ProfilerModel) -> str:
    p = model.params
    lines = [
        f"{FORMAT} {VERSION}",
        "[meta]",
        "age_labels=" + ",".join(model.age_labels),
        f"seed={model.seed}",
        f"n_documents={model.n_documents}",
        f"vocabulary_size={model.vocabulary_size}",
        f"n_batches={model.n_batches}",
        f"n_trees={p.n_trees}",
        f"max_depth={p.max_depth}",
        f"min_leaf={p.min_leaf}",
        f"drop_fraction={p.drop_fraction!r}",
        f"do_elimination={int(p.do_elimination)}",
        f"eig_tol={p.eig_tol!r}",
        "[mask]",
        " ".join("1" if k else "0" for k in model.mask),
    ]
    lines += _forest_lines("gender", model.gender_forest)
    lines += _forest_lines("age", model.age_forest)
    return "\n".join(lines) + "\n"


def save_model(model: ProfilerModel, path: str | Path) -> None:
    Path(path).write_text(dumps_model(model), encoding="utf-8")


def _sections(lines: list[str]) -> dict[str, list[tuple[int, str]]]:
    sections: dict[str, list[tuple[int, str]]] = {}
    current = None
    for lineno, line in enumerate(lines[1:], 2):
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1]
            if current in sections:
                raise ModelFormatError(f"line {lineno}: duplicate section [{current}]")
            sections[current] = []
        elif current is None:
            raise ModelFormatError(f"line {lineno}: content before first section")
        else:
            sections[current].append((lineno, line))
    return sections


def _kv(body: list[tuple[int, str]]) -> dict[str, str]:
    out = {}
    for lineno, line in body:
        key, sep, value = line.partition("=")
        if not sep:
            raise ModelFormatError(f"line {lineno}: expected key=value")
        out[key] = value
    return out


def _parse_forest(body: list[tuple[int, str]]) -> Forest:
    header = _kv(body[:3])
    try:
        labels = tuple(header["labels"].split(","))
        n_features = int(header["n_features"])
        n_trees = int(header["n_trees"])
    except KeyError as exc:
        raise ModelFormatError(f"forest header missing {exc.args[0]}") from None
    trees = []
    pos = 3
    for t in range(n_trees):
        lineno, line = body[pos]
        parts = line.split()
        if len(parts) != 4 or parts[0] != "tree" or int(parts[1]) != t:
            raise ModelFormatError(f"line {lineno}: expected 'tree {t} seed=... nodes=...'")
        seed = int(parts[2].partition("=")[2])
        n_nodes = int(parts[3].partition("=")[2])
        nodes = body[pos + 1:pos + 1 + n_nodes]
        if len(nodes) != n_nodes:
            raise ModelFormatError(f"line {lineno}: tree truncated")
        pos += 1 + n_nodes
        feature = np.full(n_nodes, -1, dtype=np.intp)
        threshold = np.zeros(n_nodes)
        value = np.full(n_nodes, -1, dtype=np.intp)
        left = np.full(n_nodes, -1, dtype=np.intp)
        right = np.full(n_nodes, -1, dtype=np.intp)
        for i, (ln, node) in enumerate(nodes):
            kind, *rest = node.split()
            if kind == "S" and len(rest) == 2:
                feature[i] = int(rest[0])
                threshold[i] = float(rest[1])
                if not 0 <= feature[i] < n_features:
                    raise ModelFormatError(f"line {ln}: feature index out of range")
            elif kind == "L" and len(rest) == 1:
                value[i] = int(rest[0])
                if not 0 <= value[i] < len(labels):
                    raise ModelFormatError(f"line {ln}: label index out of range")
            else:
                raise ModelFormatError(f"line {ln}: bad node {node!r}")
        # rebuild child links from the pre-order layout
        stack: list[int] = []
        for i in range(n_nodes):
            if stack:
                parent = stack[-1]
                if left[parent] == -1:
                    left[parent] = i
                else:
                    right[parent] = i
                    stack.pop()
            if feature[i] >= 0:
                stack.append(i)
        if stack:
            raise ModelFormatError(f"line {lineno}: tree {t} is incomplete")
        trees.append(DecisionTree(feature, threshold, left, right, value, n_features, seed))
    if pos != len(body):
        raise ModelFormatError(f"line {body[pos][0]}: trailing content in forest section")
    return Forest(tuple(trees), labels, n_features)


def loads_model(text: str) -> ProfilerModel:
    lines = text.splitlines()
    if not lines or lines[0].split() != [FORMAT, str(VERSION)]:
        raise ModelFormatError(f"not a {FORMAT} v{VERSION} file")
    sections = _sections(lines)
    for name in ("meta", "mask", "forest:gender", "forest:age"):
        if name not in sections:
            raise ModelFormatError(f"missing section [{name}]")
    meta = _kv(sections["meta"])
    params = ProfilerParams(
        n_trees=int(meta["n_trees"]),
        max_depth=int(meta["max_depth"]),
        min_leaf=int(meta["min_leaf"]),
        drop_fraction=float(meta["drop_fraction"]),
        do_elimination=meta["do_elimination"] == "1",
        eig_tol=float(meta["eig_tol"]),
    )
    mask_line = sections["mask"][0][1].split()
    if len(mask_line) != N_FEATURES or set(mask_line) - {"0", "1"}:
        raise ModelFormatError("mask must be nine 0/1 flags")
    mask = np.array([m == "1" for m in mask_line])
    return ProfilerModel(
        _parse_forest(sections["forest:gender"]),
        _parse_forest(sections["forest:age"]),
        mask,
        tuple(meta["age_labels"].split(",")),
        params,
        int(meta["seed"]),
        int(meta["n_documents"]),
        int(meta["vocabulary_size"]),
        int(meta["n_batches"]),
    )


def load_model(path: str | Path) -> ProfilerModel:
    return loads_model(Path(path).read_text(encoding="utf-8"))
