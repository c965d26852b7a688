#!/usr/bin/env python3
# Copyright 2026 The KubeFence Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Flattens OpenAPI-style definitions into a field catalog (kind -> leaf paths).

Definitions are selected by `x-kind` or by `x-kubernetes-group-version-kind`.
`$ref` may be a bare definition name or `#/definitions/<name>`.
"""

import argparse
import sys

import yaml


def ref_name(ref):
    return ref.rsplit("/", 1)[-1]


def walk(defs, schema, path, out, seen):
    if "$ref" in schema:
        name = ref_name(schema["$ref"])
        if name in seen:
            out.append(path)
            return
        walk(defs, defs[name], path, out, seen | {name})
        return
    if schema.get("type") == "array" or "items" in schema:
        walk(defs, schema.get("items", {}), path + "[]", out, seen)
        return
    props = schema.get("properties")
    if not props:
        out.append(path)
        return
    for key, sub in props.items():
        walk(defs, sub, key if not path else path + "." + key, out, seen)


def kind_of(definition):
    if "x-kind" in definition:
        return definition["x-kind"]
    gvk = definition.get("x-kubernetes-group-version-kind")
    if gvk:
        return gvk[0]["kind"]
    return None


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("schema")
    ap.add_argument("-o", "--out")
    args = ap.parse_args()
    with open(args.schema, encoding="utf-8") as f:
        doc = yaml.safe_load(f)
    defs = doc.get("definitions", {})
    kinds = {}
    for name, definition in defs.items():
        kind = kind_of(definition)
        if kind is None:
            continue
        paths = []
        walk(defs, definition, "", paths, {name})
        kinds[kind] = sorted(set(p for p in paths if p not in ("apiVersion", "kind")))
    out = yaml.safe_dump({"kinds": kinds}, sort_keys=True, default_flow_style=False)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(out)
    else:
        sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
