#!/usr/bin/env python3
"""Cross-check grammars against Python's JSON parser and the jsonschema validator.

Each target is a schema file or a builtin JSON grammar spec such as `builtin:json`, which is
checked against the empty schema (any JSON text). Texts generated under the grammar must
validate, and random mutations that the validator rejects must be rejected by `gmask check`.
"""
import argparse
import json
import os
import random
import subprocess
import sys
import tempfile

import jsonschema


def run(cmd, **kw):
    return subprocess.run(cmd, capture_output=True, **kw)


def strict_constant(name):
    raise ValueError(name)


def validates(schema, text):
    # Python's json module accepts NaN and Infinity; ECMA-404 texts do not.
    try:
        doc = json.loads(text, parse_constant=strict_constant)
    except ValueError:
        return False
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError:
        return False
    return True


def mutate(text, rng):
    alphabet = '{}[]",:0123456789.-+eEtrufalsn \\abxyz'
    pos = rng.randrange(len(text) + 1)
    op = rng.randrange(3)
    if op == 0 and text:
        pos = min(pos, len(text) - 1)
        return text[:pos] + text[pos + 1:]
    if op == 1:
        return text[:pos] + rng.choice(alphabet) + text[pos:]
    pos = min(pos, max(len(text) - 1, 0))
    return text[:pos] + rng.choice(alphabet) + text[pos + 1:]


def check_schema(gmask, path, samples, mutations, workdir):
    if path.startswith("builtin:"):
        schema = {}
        spec = path
    else:
        with open(path) as f:
            schema = json.load(f)
        spec = "schema:" + path
    bundle = os.path.join(workdir, os.path.basename(path).replace(":", "_") + ".gmc")
    r = run([gmask, "compile", spec, "--vocab", "toy", "-o", bundle])
    if r.returncode != 0:
        print(f"{path}: compile failed: {r.stderr.decode()}")
        return False
    texts = []
    ok = True
    for seed in range(samples):
        r = run([gmask, "gen", bundle, "--vocab", "toy", "--seed", str(seed)])
        text = r.stdout.decode("utf-8")
        if r.returncode != 0 or not validates(schema, text):
            print(f"{path}: seed {seed} produced invalid text {text!r}")
            ok = False
        texts.append(text)
    rng = random.Random(7)
    found = 0
    attempts = 0
    input_path = os.path.join(workdir, "input.txt")
    while found < mutations and attempts < mutations * 50:
        attempts += 1
        bad = mutate(rng.choice(texts), rng)
        if validates(schema, bad):
            continue
        found += 1
        with open(input_path, "w", encoding="utf-8") as f:
            f.write(bad)
        r = run([gmask, "check", spec, input_path])
        if r.returncode != 1:
            print(f"{path}: invalid text {bad!r} was not rejected (exit {r.returncode})")
            ok = False
    if found < mutations:
        print(f"{path}: only {found} rejected mutations found")
        ok = False
    print(f"{path}: {samples} generated, {found} mutations, {'ok' if ok else 'FAILED'}")
    return ok


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--gmask", required=True)
    ap.add_argument("--samples", type=int, default=100)
    ap.add_argument("--mutations", type=int, default=100)
    ap.add_argument("schemas", nargs="+", help="schema files or builtin:json")
    args = ap.parse_args()
    with tempfile.TemporaryDirectory() as workdir:
        results = [check_schema(args.gmask, s, args.samples, args.mutations, workdir)
                   for s in args.schemas]
    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
