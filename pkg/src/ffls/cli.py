"""Command-line front end: ``ffls <command> -m <module> [options]``, JSON on stdout.

Exit codes: 0 success, 1 usage error, 2 domain error, 3 precision failure.
Modules are given as a JSON file, inline JSON, or a built-in alias such as
``carlitz``, ``carlitz-tensor2``, ``theta-tau2``, ``vanishing-r2`` or ``alpha:1,0,2``
(``--q`` or ``name@q`` picks the field; default q = 3).
"""
import argparse
import json
import random
import sys
from dataclasses import dataclass, field

from .apoly import Poly, parse_apoly
from .errors import FFLSError, SchemaError
from .tmodule import module_load, is_alias, alias, torsion_scan
from .local_factor import local_factor
from .lseries import (lseries_inf, lseries_padic, unit_polynomial, vanishing_order,
                      class_formula_check)
from .newton import newton_polygon, smb_from_polygon, ord_bound

COMMANDS = ("local-factor", "lseries", "unit-poly", "vanishing-order", "newton", "smb",
            "class-check", "torsion-scan")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    module: str
    q: int = None
    place: str = "inf"
    prime: str = None
    primes: list = field(default_factory=list)
    deg_bound: int = None
    z_prec: int = None
    with_z: bool = False
    prec: int = None
    mode: str = "product"
    n_max: int = None
    twists: int = 0
    seed: int = 0
    json_path: str = None

    def validate(self):
        if self.command not in COMMANDS:
            raise UsageError("unknown command %r" % self.command)
        if self.command == "local-factor" and not self.prime:
            raise UsageError("local-factor needs -Q/--prime-q")
        if self.command == "class-check" and self.place != "inf" and not self.prime:
            raise UsageError("class-check at a finite place needs -P/--prime-p")
        for name in ("deg_bound", "z_prec", "n_max"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise UsageError("--%s must be non-negative" % name.replace("_", "-"))
        if self.prec is not None and self.prec < 1:
            raise UsageError("--prec must be positive")
        if self.mode not in ("product", "log_formula"):
            raise UsageError("--mode must be 'product' or 'log_formula'")
        if self.twists < 0:
            raise UsageError("--twists must be non-negative")
        return self


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="ffls", description="L-series of Drinfeld and Anderson t-modules")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("-m", "--module", required=True, help="JSON file, inline JSON or alias")
        s.add_argument("--q", type=int, default=None, help="field size for aliases (default 3)")
        s.add_argument("-Q", "--prime-q", default=None, help="prime for local-factor")
        s.add_argument("-P", "--prime-p", action="append", default=None,
                       help="P-adic place (repeatable for vanishing-order)")
        s.add_argument("--place", default=None, help="'inf' or a prime (lseries)")
        s.add_argument("--deg-bound", type=int, default=None)
        s.add_argument("--z-prec", type=int, default=None)
        s.add_argument("--z", action="store_true", help="keep the z-variable")
        s.add_argument("--prec", type=int, default=None, help="digits (command-specific default)")
        s.add_argument("--mode", default="product", help="product | log_formula")
        s.add_argument("--n-max", type=int, default=None, help="Newton polygon range")
        s.add_argument("--twists", type=int, default=0, help="random twists to test (vanishing-order)")
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--json", default=None, help="write JSON here instead of stdout")
    return p


def parse_config(argv):
    ns = build_parser().parse_args(argv)
    if ns.command is None:
        raise UsageError("missing command; one of: %s" % ", ".join(COMMANDS))
    primes = ns.prime_p or []
    place = ns.place
    if place is None:
        place = primes[0] if primes and ns.command in ("lseries", "class-check") else "inf"
    prime = ns.prime_q if ns.command == "local-factor" else (place if place != "inf" else None)
    return RunConfig(command=ns.command, module=ns.module, q=ns.q, place=place, prime=prime,
                     primes=primes, deg_bound=ns.deg_bound, z_prec=ns.z_prec, with_z=ns.z,
                     prec=ns.prec, mode=ns.mode, n_max=ns.n_max, twists=ns.twists,
                     seed=ns.seed, json_path=ns.json).validate()


def load_module(source, q=None):
    if is_alias(source):
        return alias(source, q)
    E = module_load(source)
    if q is not None and E.q != q:
        raise SchemaError("--q=%d disagrees with the module's q=%d" % (q, E.q))
    return E


# -- commands ---------------------------------------------------------------------------

def cmd_local_factor(E, cfg):
    return local_factor(E, cfg.prime, with_z=cfg.with_z).to_json()


def cmd_lseries(E, cfg):
    if cfg.place == "inf":
        D = 6 if cfg.deg_bound is None else cfg.deg_bound
        zp = cfg.z_prec if cfg.z_prec is not None else (D + 1 if cfg.with_z else 0)
        prec = cfg.prec if cfg.prec is not None else D + 1
        return lseries_inf(E, D, z_prec=zp, prec=prec).to_json()
    res = lseries_padic(E, cfg.place, mode=cfg.mode, D=cfg.deg_bound, prec=cfg.prec or 20,
                        z_prec=cfg.z_prec, with_z=cfg.with_z)
    return res.to_json()


def cmd_unit_poly(E, cfg):
    return unit_polynomial(E, prec=cfg.prec or 40).to_json()


def cmd_vanishing_order(E, cfg):
    rep = vanishing_order(E, primes=cfg.primes, prec=cfg.prec or 12)
    out = rep.to_json()
    if cfg.twists:
        rng = random.Random(cfg.seed)
        F = E.F
        rows = []
        for _ in range(cfg.twists):
            m = _random_twist(F, rng)
            rows.append({"m": str(m), "order": vanishing_order(E.scale_twist(m)).order})
        out["twists"] = rows
    return out


def _random_twist(F, rng, max_deg=2):
    while True:
        deg = rng.randint(1, max_deg)
        m = Poly(F, [rng.randrange(F.size) for _ in range(deg)] + [rng.randrange(1, F.size)])
        if not m.is_zero():
            return m


def cmd_newton(E, cfg):
    npg = newton_polygon(E, cfg.n_max)
    out = npg.to_json()
    out["n_max"] = npg.n_max
    return out


def cmd_smb(E, cfg):
    npg = newton_polygon(E, cfg.n_max)
    smb = smb_from_polygon(npg, E.r)
    out = smb.to_json()
    out["ord_bound"] = ord_bound(smb)
    out["n_max"] = npg.n_max
    return out


def cmd_class_check(E, cfg):
    P = None if cfg.place == "inf" else cfg.place
    return class_formula_check(E, P, prec=cfg.prec or 20, D=cfg.deg_bound)


def cmd_torsion_scan(E, cfg):
    return torsion_scan(E).to_json()


DISPATCH = {
    "local-factor": cmd_local_factor,
    "lseries": cmd_lseries,
    "unit-poly": cmd_unit_poly,
    "vanishing-order": cmd_vanishing_order,
    "newton": cmd_newton,
    "smb": cmd_smb,
    "class-check": cmd_class_check,
    "torsion-scan": cmd_torsion_scan,
}


def dumps(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def run(argv):
    """Returns (exit code, JSON text or error message)."""
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        return 1, "usage: %s" % exc
    try:
        E = load_module(cfg.module, cfg.q)
        if cfg.prime is not None:
            parse_apoly(E.F, cfg.prime)
        out = DISPATCH[cfg.command](E, cfg)
    except FFLSError as exc:
        return exc.exit_code, "%s: %s" % (type(exc).__name__, exc)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        return 2, "%s: %s" % (type(exc).__name__, exc)
    text = dumps(out)
    if cfg.json_path:
        with open(cfg.json_path, "w") as fh:
            fh.write(text)
        return 0, ""
    return 0, text


def main(argv=None):
    code, text = run(sys.argv[1:] if argv is None else argv)
    if code == 0:
        sys.stdout.write(text)
    else:
        sys.stderr.write(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
