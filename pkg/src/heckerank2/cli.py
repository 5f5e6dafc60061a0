"""Command line front end.

Every verdict is written as one JSON object per line (keys sorted).  The exit
status is 0 iff every requested verdict is PASS, 1 if some verdict is FAIL
and 2 on errors, which are reported as ``{"error": ...}`` objects.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import shutil
import sys
from dataclasses import dataclass, field

from . import _enumerate
from .engine import (
    CACHE_ENV, BasisSpec, build_mul_table, cache_dir, reduce, reference_basis,
)
from .parabolic import (
    assemble_candidate, catalog, catalog_ids, catalog_spec, er_to_braid, er_words, verify_g5_g6_embedded,
    verify_parabolic,
)
from .presentations import registry_get, registry_names
from .trace import check_condition3, check_parabolic_crit, cyclic_gram, gram_matrix
from .verify import change_of_basis, modular_screen

log = logging.getLogger("heckerank2")


@dataclass
class RunConfig:
    group: str | None = None
    mode: str = "exact"
    trials: int = 20
    primes: list = field(default_factory=lambda: list(_enumerate.DEFAULT_PRIMES))
    budget: int = _enumerate.SYMBOL_BUDGET
    cache_dir: str | None = None
    output: str | None = None
    timings: bool = False

    def validate(self):
        if self.mode not in ("exact", "modular"):
            raise ValueError("mode must be exact or modular")
        if self.mode == "modular" and self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.budget < 10 ** 4:
            raise ValueError("budget must be >= 10^4")

    def apply(self):
        _enumerate.SYMBOL_BUDGET = self.budget
        if self.cache_dir:
            os.environ[CACHE_ENV] = self.cache_dir


class Reporter:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.lines = []
        self.failed = False

    def emit(self, obj: dict):
        obj = _scrub(obj, self.cfg.timings)
        if obj.get("verdict") == "FAIL" or "error" in obj:
            self.failed = True
        line = json.dumps(obj, sort_keys=True, default=str)
        self.lines.append(line)
        print(line)

    def close(self):
        if self.cfg.output:
            with open(self.cfg.output, "w") as f:
                f.write("\n".join(self.lines) + ("\n" if self.lines else ""))


def _scrub(obj, timings):
    """Drop run-dependent fields so reports are reproducible."""
    if isinstance(obj, dict):
        return {k: _scrub(v, timings) for k, v in obj.items()
                if timings or k not in ("seconds", "cache")}
    if isinstance(obj, (list, tuple)):
        return [_scrub(v, timings) for v in obj]
    return obj


def _presentation(name):
    if not name:
        raise ValueError("--group is required")
    return registry_get(name)


def _parse(p, s):
    if p.generators == ["s"]:
        # cyclic groups accept s1 for their single generator
        s = s.replace("s1", "s")
    return p.parse(s)


def _table(cfg, p, basis=None):
    prime = cfg.primes[0] if cfg.primes else None
    return build_mul_table(p, basis, mode=cfg.mode, prime=prime)


# ---------------------------------------------------------------------------
# subcommands


def cmd_list(cfg, args, rep):
    for name in registry_names():
        p = registry_get(name)
        rep.emit({"kind": "presentation", "name": name, "generators": p.generators, "order": p.group_order,
                  "center_word": str(p.center_word), "center_order": p.center_order, "native": p.native})
    for s in catalog():
        rep.emit({"kind": "catalog", "id": s.id, "group": s.group, "generator": s.generator, "side": s.side,
                  "size": len(s.coset_words), "expected_good": s.expected_good})


def cmd_table(cfg, args, rep):
    p = _presentation(cfg.group)
    t = _table(cfg, p)
    if cfg.mode == "exact":
        t.check_relations()
    nnz = sum(len(r) for rows in t.rows.values() for r in rows)
    rep.emit({"check": "table", "group": p.name, "basis": t.basis.name, "mode": t.mode, "coords": t.coords,
              "side": t.side, "nonzeros": nnz, "meta": t.meta, "verdict": "PASS"})


def cmd_reduce(cfg, args, rep):
    p = _presentation(cfg.group)
    t = _table(cfg, p)
    w = _parse(p, args.word)
    el = reduce(w, t)
    coords = {str(t.basis.words[k]): str(el[k]) for k in sorted(el.data)}
    rep.emit({"kind": "reduce", "group": p.name, "word": str(w), "basis": t.basis.name, "mode": t.mode,
              "coords": coords, "tau": str(el[0])})


def _read_words(path):
    with open(path) as f:
        return [ln.strip() for ln in f if ln.strip() and not ln.lstrip().startswith("#")]


def cmd_basis_verify(cfg, args, rep):
    target = args.target
    if os.path.exists(target):
        p = _presentation(cfg.group)
        words = [_parse(p, w) for w in _read_words(target)]
        name = os.path.basename(target)
    else:
        spec = catalog_spec(target)
        if spec.host:
            rep.emit(verify_parabolic(spec))
            return
        from .parabolic import expand_parabolic
        p = spec.presentation
        words = expand_parabolic(spec)
        name = spec.id
    if cfg.mode == "modular":
        r = modular_screen(words, p, trials=cfg.trials, primes=cfg.primes)
    else:
        r = change_of_basis(words, build_mul_table(p)).report()
        r.pop("first_row", None)
    r.update({"candidate": name, "group": p.name})
    rep.emit(r)


def cmd_parabolic_verify(cfg, args, rep):
    ids = catalog_ids() if args.target == "all" else [args.target]
    for sid in ids:
        spec = catalog_spec(sid)
        mode = "exact" if spec.host else cfg.mode
        rep.emit(verify_parabolic(spec, mode=mode, trials=cfg.trials, primes=cfg.primes))


def cmd_trace(cfg, args, rep):
    p = _presentation(cfg.group)
    t = _table(cfg, p)
    if args.what == "gram":
        g = gram_matrix(t)
        r = g.report()
        r.update({"group": p.name, "mode": t.mode})
        rep.emit(r)
    elif args.what == "cond3":
        rep.emit(check_condition3(p, table=t))
    else:
        if not args.generator:
            raise ValueError("trace crit needs a generator")
        rep.emit(check_parabolic_crit(p, t, args.generator))


def cmd_cyclic(cfg, args, rep):
    rep.emit(cyclic_gram(args.d, args.coords))


def cmd_er(cfg, args, rep):
    p = _presentation(args.group)
    pairs = er_words(args.group, walkthrough=args.walkthrough, candidates=args.candidates,
                     max_length=args.max_length)
    if args.candidates:
        for x, w in pairs:
            rep.emit({"kind": "er_candidate", "experimental": True, "x": str(x), "a_word": str(w),
                      "braid": str(er_to_braid(w, args.group))})
        return
    v = [er_to_braid(w, args.group) for _, w in pairs]
    words = assemble_candidate(v, p, powers=p.group_order // len(v))
    for (x, w), b in zip(pairs, v):
        rep.emit({"kind": "er_word", "x": str(x), "a_word": str(w), "braid": str(b)})
    if cfg.mode == "modular":
        r = modular_screen(words, p, trials=cfg.trials, primes=cfg.primes)
    else:
        r = change_of_basis(words, build_mul_table(p)).report()
        r.pop("first_row", None)
    r.update({"candidate": "er:%s" % (args.walkthrough or args.group), "size": len(words)})
    rep.emit(r)


def cmd_embed(cfg, args, rep):
    r = verify_g5_g6_embedded(args.target)
    for s in r.pop("specs"):
        rep.emit(s)
    rep.emit(r)


def cmd_cache(cfg, args, rep):
    d = cache_dir()
    files = sorted(d.glob("table-*.json")) if d.exists() else []
    if args.action == "clear":
        for f in files:
            f.unlink()
    rep.emit({"kind": "cache", "dir": str(d), "action": args.action, "files": len(files)})


# ---------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", "-g")
    common.add_argument("--mode", choices=["exact", "modular"], default=None)
    common.add_argument("--trials", type=int, default=None)
    common.add_argument("--budget", type=int, default=None, help="symbol budget of the enumerator")
    common.add_argument("--prime", type=int, action="append", dest="primes", default=None)
    common.add_argument("--cache-dir")
    common.add_argument("--output", "-o")
    common.add_argument("--timings", action="store_true", help="include run times in reports")
    common.add_argument("--verbose", "-v", action="store_true")

    ap = argparse.ArgumentParser(prog="heckerank2", parents=[common],
                                 description="Generic Hecke algebras of rank 2 complex reflection groups")
    sub = ap.add_subparsers(dest="cmd", required=True)
    sub.add_parser("list", parents=[common]).set_defaults(func=cmd_list)
    sub.add_parser("table", parents=[common]).set_defaults(func=cmd_table)
    r = sub.add_parser("reduce", parents=[common])
    r.add_argument("word")
    r.set_defaults(func=cmd_reduce)
    b = sub.add_parser("basis", parents=[common])
    b.add_argument("action", choices=["verify"])
    b.add_argument("target", help="file with one word per line, or a catalog id")
    b.set_defaults(func=cmd_basis_verify)
    pv = sub.add_parser("parabolic", parents=[common])
    pv.add_argument("action", choices=["verify"])
    pv.add_argument("target", help="catalog id or 'all'")
    pv.set_defaults(func=cmd_parabolic_verify)
    t = sub.add_parser("trace", parents=[common])
    t.add_argument("what", choices=["gram", "cond3", "crit"])
    t.add_argument("generator", nargs="?")
    t.set_defaults(func=cmd_trace)
    c = sub.add_parser("cyclic", parents=[common])
    c.add_argument("action", choices=["gram"])
    c.add_argument("d", type=int)
    c.add_argument("--coords", choices=["a", "u"], default="a")
    c.set_defaults(func=cmd_cyclic)
    e = sub.add_parser("er", parents=[common])
    e.add_argument("action", choices=["build"])
    e.add_argument("group")
    e.add_argument("--walkthrough")
    e.add_argument("--candidates", action="store_true", help="experimental: enumerate a-word candidates")
    e.add_argument("--max-length", type=int, default=4)
    e.set_defaults(func=cmd_er)
    m = sub.add_parser("embed", parents=[common])
    m.add_argument("action", choices=["verify"])
    m.add_argument("target", choices=["G5", "G6"])
    m.set_defaults(func=cmd_embed)
    k = sub.add_parser("cache", parents=[common])
    k.add_argument("action", choices=["info", "clear"])
    k.set_defaults(func=cmd_cache)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(group=args.group, output=args.output, cache_dir=args.cache_dir, timings=args.timings)
    if args.mode:
        cfg.mode = args.mode
    if args.trials is not None:
        cfg.trials = args.trials
    if args.budget is not None:
        cfg.budget = args.budget
    if args.primes:
        cfg.primes = args.primes
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    rep = Reporter(cfg)
    try:
        cfg.validate()
        cfg.apply()
        args.func(cfg, args, rep)
    except Exception as exc:   # reported, not raised: CI reads the JSON line
        log.debug("command failed", exc_info=True)
        rep.emit({"error": type(exc).__name__, "message": str(exc), "command": args.cmd})
        rep.close()
        return 2
    rep.close()
    return 1 if rep.failed else 0


if __name__ == "__main__":
    sys.exit(main())
