"""Versioned text format for fitted pipelines.

Layout::

    credscore-pipeline 1
    sha256 <hex digest of every line after this one>
    [meta]
    seed = 1
    ...
    [schema]
    ...

Every entry below a section header is ``key = <JSON value>``. JSON floats
are written with Python's shortest round-trip repr, so parameters reload
bit-for-bit.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

from . import __version__
from .classifiers import ClassifierSpec, model_from_params
from .dataset import Feature, Schema
from .discretize import CutPointModel
from .errors import ModelError
from .imbalance import Threshold
from .rank import FeatureRanking, FittedPipeline, PipelineSpec

MAGIC = "credscore-pipeline"
FORMAT_VERSION = 1


def _j(value) -> str:
    return json.dumps(value, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def dumps(p: FittedPipeline) -> str:
    spec = p.spec
    body = ["[meta]",
            f"seed = {_j(p.seed)}",
            f"dataset_sha256 = {_j(p.dataset_fingerprint)}",
            f"n_train = {_j(list(p.n_train))}",
            f"writer = {_j('credscore ' + __version__)}",
            "[schema]",
            f"class = {_j([p.schema.class_name, p.schema.positive_label, p.schema.negative_label])}"]
    body += [f"feature = {_j([f.name, f.kind, f.group, list(f.categories)])}"
             for f in p.schema.features]
    body.append("[cuts]")
    body += [f"cut = {_j([name, list(cuts)])}" for name, cuts in p.cuts.cuts.items()]
    body.append("[selection]")
    body.append(f"metric = {_j(spec.metric)}")
    body.append(f"n_features = {_j(spec.n_features)}")
    if p.ranking is not None:
        body += [f"rank = {_j([name, stat])}" for name, stat in p.ranking.rows]
    body += [f"selected = {_j(name)}" for name in p.selected]
    body.append("[classifier]")
    body.append(f"kind = {_j(spec.classifier.kind)}")
    body.append(f"spec = {_j(spec.classifier.to_dict())}")
    for key, value in p.model.to_params().items():
        body.append(f"param.{key} = {_j(value)}")
    body.append("[threshold]")
    body.append(f"mode = {_j(spec.threshold)}")
    body.append(f"value = {_j(p.threshold.t)}")
    body.append(f"provenance = {_j(p.threshold.provenance)}")
    text = "\n".join(body) + "\n"
    digest = hashlib.sha256(text.encode()).hexdigest()
    return f"{MAGIC} {FORMAT_VERSION}\nsha256 {digest}\n{text}"


def loads(text: str) -> FittedPipeline:
    lines = text.split("\n")
    if len(lines) < 3 or not lines[0].startswith(MAGIC + " "):
        raise ModelError("not a credscore pipeline file")
    version = lines[0][len(MAGIC) + 1:].strip()
    if version != str(FORMAT_VERSION):
        raise ModelError(f"pipeline format version {version} is not supported "
                         f"(this build reads version {FORMAT_VERSION})")
    if not lines[1].startswith("sha256 "):
        raise ModelError("pipeline file has no checksum line")
    body = "\n".join(lines[2:])
    if hashlib.sha256(body.encode()).hexdigest() != lines[1][7:].strip():
        raise ModelError("pipeline file checksum mismatch; refusing to load")

    sections: dict[str, list[tuple[str, object]]] = {}
    current = None
    try:
        for line in lines[2:]:
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                current = sections.setdefault(line[1:-1], [])
                continue
            key, _, raw = line.partition(" = ")
            current.append((key, json.loads(raw)))
    except (ValueError, AttributeError) as e:
        raise ModelError(f"corrupt pipeline file: {e}") from None

    def get(section, key):
        for k, v in sections.get(section, []):
            if k == key:
                return v
        raise ModelError(f"pipeline file lacks {section}.{key}")

    def get_all(section, key):
        return [v for k, v in sections.get(section, []) if k == key]

    try:
        cls_name, good, bad = get("schema", "class")
        features = tuple(Feature(n, k, g, tuple(c)) for n, k, g, c in get_all("schema", "feature"))
        schema = Schema(features, cls_name, good, bad)
        cuts = CutPointModel({n: tuple(float(x) for x in c) for n, c in get_all("cuts", "cut")})
        metric = get("selection", "metric")
        ranks = get_all("selection", "rank")
        ranking = FeatureRanking(metric, tuple((n, float(s)) for n, s in ranks)) if ranks else None
        cspec = ClassifierSpec.from_dict(get("classifier", "spec"))
        params = {k[6:]: v for k, v in sections.get("classifier", []) if k.startswith("param.")}
        model = model_from_params(get("classifier", "kind"), params)
        spec = PipelineSpec(cspec, get("selection", "n_features"), metric,
                            get("threshold", "mode"))
        threshold = Threshold(float(get("threshold", "value")), get("threshold", "provenance"))
        return FittedPipeline(schema, cuts, tuple(get_all("selection", "selected")), spec,
                              model, threshold, int(get("meta", "seed")), ranking,
                              get("meta", "dataset_sha256"), tuple(get("meta", "n_train")))
    except ModelError:
        raise
    except Exception as e:
        raise ModelError(f"corrupt pipeline file: {e}") from None


def save_pipeline(p: FittedPipeline, path) -> Path:
    path = Path(path)
    path.write_text(dumps(p), encoding="utf-8")
    return path


def load_pipeline(path) -> FittedPipeline:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ModelError(f"cannot read pipeline {path}: {e}") from None
    return loads(text)
