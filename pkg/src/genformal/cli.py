"""genformal command line.

    genformal verify SCENE [--suite core|equivariant|doublecomplex|all] [--json PATH] [--seed N] [--max-degree K]
    genformal type SCENE [--at POINT_JSON] [--json PATH]
    genformal hodge SCENE [--json PATH]

Exit codes: 0 when every check passes, 1 on a verification failure and 2 on
an input error (unreadable or malformed scene, bad point, off the level set).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from .errors import GenformalError, HypothesisNotVerified, InputError, ParseError
from .scalars import ZERO, format_scalar, parse_scalar
from .scenes import hodge_report, load_scene, quotient_type, scene_hash, tM_cap_piL, upstairs_type
from .suites import DEFAULT_SEED, Check, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


@dataclass
class Report:
    command: str
    scene: str
    scene_hash: str
    checks: list = field(default_factory=list)
    seed: int = None
    suite: str = None
    extra: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def to_json(self):
        return {
            "command": self.command,
            "scene": self.scene,
            "scene_hash": self.scene_hash,
            "suite": self.suite,
            "seed": self.seed,
            "passed": self.passed,
            "checks": [c.to_json() for c in sorted(self.checks, key=lambda c: c.name)],
            "extra": self.extra,
        }

    @classmethod
    def from_json(cls, data):
        return cls(
            command=data["command"],
            scene=data["scene"],
            scene_hash=data["scene_hash"],
            checks=[Check.from_json(c) for c in data["checks"]],
            seed=data.get("seed"),
            suite=data.get("suite"),
            extra=data.get("extra", {}),
        )

    def dumps(self):
        return json.dumps(self.to_json(), indent=2, sort_keys=True, ensure_ascii=False)

    def render(self):
        lines = [f"{self.command}: scene {self.scene} (sha256 {self.scene_hash[:12]})"]
        for c in sorted(self.checks, key=lambda c: c.name):
            line = f"  [{c.status.upper():4}] {c.name}: {c.anchor}"
            if c.witness:
                line += f"\n         {c.witness}"
            lines.append(line)
        total = len(self.checks)
        good = sum(c.passed for c in self.checks)
        lines.append(f"{good}/{total} checks passed")
        return "\n".join(lines)


def _write_json(path, report):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(report.dumps() + "\n")


def parse_point(text, chart):
    """A JSON object {"z0": "1", ...} or a JSON list of values in chart order."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid point JSON: {exc.msg}", text, exc.pos) from None
    pt = {c: ZERO for c in chart.coords if not c.startswith("zb")}
    if isinstance(raw, list):
        names = [c for c in chart.coords if not c.startswith("zb")]
        if len(raw) != len(names):
            raise InputError(f"point needs {len(names)} coordinates, got {len(raw)}")
        items = zip(names, raw)
    elif isinstance(raw, dict):
        items = raw.items()
    else:
        raise InputError("a point must be a JSON list or object")
    for name, val in items:
        if name not in pt:
            raise InputError(f"unknown coordinate {name!r}")
        pt[name] = parse_scalar(str(val))
    return pt


def cmd_verify(args):
    scene, data = load_scene(args.scene)
    checks = run_suite(scene, args.suite, seed=args.seed, max_degree=args.max_degree)
    rep = Report("verify", scene.name, scene_hash(data), checks, seed=args.seed, suite=args.suite)
    print(rep.render())
    _write_json(args.json, rep)
    return EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_type(args):
    scene, data = load_scene(args.scene)
    points = [parse_point(args.at, scene.chart)] if args.at else scene.points
    rows = []
    for pt in points:
        up = upstairs_type(scene, pt)
        q = quotient_type(scene, pt)
        label = "(" + ", ".join(format_scalar(v) for v in pt.values()) + ")"
        meet = tM_cap_piL(scene, pt)
        print(f"{label}: upstairs {up}, quotient {q[1]}")
        rows.append({"point": {k: format_scalar(v) for k, v in pt.items()}, "upstairs": up, "quotient": list(q), "meet": meet})
    rep = Report("type", scene.name, scene_hash(data), extra={"types": rows})
    _write_json(args.json, rep)
    return EXIT_PASS


def cmd_hodge(args):
    scene, data = load_scene(args.scene)
    try:
        hr = hodge_report(scene)
    except HypothesisNotVerified as exc:
        print(f"hypothesis not verified: {exc}")
        rep = Report("hodge", scene.name, scene_hash(data), [Check("hodge.hypotheses", "fixed-point hypotheses", "fail", str(exc))])
        _write_json(args.json, rep)
        return EXIT_FAIL
    print(hr.render())
    rep = Report(
        "hodge",
        scene.name,
        scene_hash(data),
        [Check("hodge.hypotheses", "fixed-point hypotheses", "pass")],
        extra={"hodge": hr.to_json()},
    )
    _write_json(args.json, rep)
    return EXIT_PASS


def build_parser():
    p = argparse.ArgumentParser(prog="genformal", description="Exact checks for twisted generalized complex geometry.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run verification suites on a scene")
    v.add_argument("scene")
    v.add_argument("--suite", choices=["core", "equivariant", "doublecomplex", "all"], default="core")
    v.add_argument("--json", metavar="PATH")
    v.add_argument("--seed", type=int, default=DEFAULT_SEED)
    v.add_argument("--max-degree", type=int, default=4, dest="max_degree")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("type", help="upstairs and quotient types at points")
    t.add_argument("scene")
    t.add_argument("--at", metavar="POINT_JSON")
    t.add_argument("--json", metavar="PATH")
    t.set_defaults(func=cmd_type)

    h = sub.add_parser("hodge", help="generalized Hodge number report")
    h.add_argument("scene")
    h.add_argument("--json", metavar="PATH")
    h.set_defaults(func=cmd_hodge)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    if getattr(args, "seed", 0) is not None and getattr(args, "seed", 0) < 0:
        print("error: --seed must be non-negative", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GenformalError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
