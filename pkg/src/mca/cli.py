"""The ``mca`` command: expression evaluation, constant digits, modular tools, benchmarks."""

from __future__ import annotations

import argparse
import math
import re
import sys
from dataclasses import dataclass

from . import bench, divgcd, elemfun, fastmul, modring
from .errors import InvalidBase, InvalidDigit, MCAError, ParseError
from .limbcore import ONE, Integer, Natural, int_mod, nat_to_string, parse_natural
from .mpfloat import (Float, Kind, RoundingMode, fadd, fdiv, fmul, from_decimal, from_scaled,
                      fsqrt, fsub, to_decimal)

EXIT_OK, EXIT_USAGE, EXIT_MATH = 0, 2, 3

MODES = {m.value: m for m in RoundingMode}


@dataclass(frozen=True)
class CliConfig:
    p: int = 128
    mode: RoundingMode = RoundingMode.NEAREST_EVEN
    thresholds: str | None = None
    base: int = 10

    def __post_init__(self):
        if self.p < 2:
            raise ValueError("precision must be at least 2 bits")
        if not 2 <= self.base <= 36:
            raise ValueError("base must be between 2 and 36")

    @property
    def ndigits(self) -> int:
        return math.ceil(self.p * math.log10(2))


class UnknownConstant(MCAError, ValueError):
    pass


# ---------------------------------------------------------------------------
# expressions


_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
                    r"|([A-Za-z_]\w*)|(\S))")


def tokenize(text: str) -> list:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        num, name, op = m.groups()
        if num:
            tokens.append(("num", num))
        elif name:
            tokens.append(("name", name))
        elif op in "+-*/^(),":
            tokens.append(("op", op))
        else:
            raise ParseError(f"unexpected character {op!r} at offset {m.start(3)}")
        pos = m.end()
    return tokens


def _as_int(v):
    """The exact integer value of v, or None when v is not an integer."""
    if isinstance(v, Integer):
        return v
    if v.is_zero:
        return Integer.from_int(0)
    if not v.is_finite:
        return None
    lo = v.lowexp
    if lo >= 0:
        return Integer.from_natural(v.man << lo, v.sign)
    if v.man.low_bits_nonzero(-lo):
        return None
    return Integer.from_natural(v.man >> -lo, v.sign)


class Evaluator:
    """Recursive descent over the token list; every operation rounds at p.

    Values are Floats, except that gcd and mod produce exact Integers.
    """

    FUNCS = {"exp": elemfun.f_exp, "ln": elemfun.f_ln, "sin": elemfun.f_sin,
             "cos": elemfun.f_cos, "sqrt": fsqrt}

    def __init__(self, cfg: CliConfig):
        self.cfg = cfg
        self.p, self.mode = cfg.p, cfg.mode

    def evaluate(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        if not self.toks:
            raise ParseError("empty expression")
        v = self.expr()
        if self.i != len(self.toks):
            raise ParseError(f"unexpected {self.toks[self.i][1]!r}")
        return v

    # token helpers
    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, value=None):
        k, v = self.peek()
        if k is None or (kind and k != kind) or (value and v != value):
            want = value or kind or "token"
            raise ParseError(f"expected {want!r}, found {v if v else 'end of input'!r}")
        self.i += 1
        return v

    def fl(self, v) -> Float:
        if isinstance(v, Integer):
            return from_scaled(v.sign or 1, v.mag, 0, self.p, self.mode)[0]
        return v

    def nan(self):
        return Float.nan(self.p)

    # grammar
    def expr(self):
        v = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()
            w = self.term()
            f = fadd if op == "+" else fsub
            v = f(self.fl(v), self.fl(w), self.p, self.mode)[0]
        return v

    def term(self):
        v = self.unary()
        while self.peek() in (("op", "*"), ("op", "/"), ("name", "mod")):
            op = self.take()
            w = self.unary()
            if op == "mod":
                v = self.modulo(v, w)
            else:
                f = fmul if op == "*" else fdiv
                v = f(self.fl(v), self.fl(w), self.p, self.mode)[0]
        return v

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            v = self.unary()
            return -v
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        v = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            return self.pow(v, self.unary())
        return v

    def atom(self):
        kind, tok = self.peek()
        if kind == "num":
            self.take()
            return from_decimal(tok, self.p, self.mode)[0]
        if (kind, tok) == ("op", "("):
            self.take()
            v = self.expr()
            self.take("op", ")")
            return v
        if kind == "name":
            self.take()
            if tok == "pi":
                return elemfun.const_pi(self.p, self.mode)
            if tok == "ln2":
                return elemfun.const_ln2(self.p, self.mode)
            if tok in self.FUNCS or tok == "gcd":
                self.take("op", "(")
                args = [self.expr()]
                while self.peek() == ("op", ","):
                    self.take()
                    args.append(self.expr())
                self.take("op", ")")
                return self.call(tok, args)
            raise ParseError(f"unknown name {tok!r}")
        raise ParseError(f"unexpected {tok if tok else 'end of input'!r}")

    # operations
    def call(self, name, args):
        want = 2 if name == "gcd" else 1
        if len(args) != want:
            raise ParseError(f"{name} takes {want} argument{'s' if want > 1 else ''}")
        if name == "gcd":
            a, b = _as_int(args[0]), _as_int(args[1])
            if a is None or b is None:
                return self.nan()
            return Integer.from_natural(divgcd.gcd(a.mag, b.mag))
        return self.FUNCS[name](self.fl(args[0]), self.p, self.mode)[0]

    def modulo(self, v, w):
        a, b = _as_int(v), _as_int(w)
        if a is None or b is None or not b:
            return self.nan()
        return Integer.from_natural(int_mod(a, b.mag))

    def pow(self, a, b):
        a, b = self.fl(a), self.fl(b)
        if a.is_nan or b.is_nan:
            return self.nan()
        n = _as_int(b)
        if n is not None and n.mag.bit_length() <= 20:
            return self.int_pow(a, int(n))
        if a.is_zero:
            return Float.zero(1, self.p) if b.sign > 0 else Float.inf(1, self.p)
        if a.sign < 0:
            return self.nan()
        lg = elemfun.f_ln(a, self.p, self.mode)[0]
        return elemfun.f_exp(fmul(b, lg, self.p, self.mode)[0], self.p, self.mode)[0]

    def int_pow(self, a: Float, n: int) -> Float:
        """a^n rounded once, from the exact power of the significand."""
        p, mode = self.p, self.mode
        one = from_scaled(1, ONE, 0, p, mode)[0]
        if n == 0:
            return one
        sign = -1 if a.sign < 0 and n % 2 else 1
        if a.is_zero:
            return Float.zero(sign, p) if n > 0 else Float.inf(sign, p)
        if a.is_inf:
            return Float.inf(sign, p) if n > 0 else Float.zero(sign, p)
        k = abs(n)
        if a.prec * k > 1 << 24:
            # too large to form exactly; fall back to rounded steps
            mag = elemfun.f_exp(fmul(from_scaled(1, Natural.from_int(k), 0, p)[0],
                                     elemfun.f_ln(-a if a.sign < 0 else a, p, mode)[0], p)[0],
                                p, mode)[0]
            mag = mag if sign > 0 else -mag
            return mag if n > 0 else fdiv(one, mag, p, mode)[0]
        m = ONE
        base, e = a.man, k
        while e:
            if e & 1:
                m = m * base
            base = base * base
            e >>= 1
        low = a.lowexp * k
        if n > 0:
            return from_scaled(sign, m, low, p, mode)[0]
        exact = Float(Kind.FINITE, sign, m.bit_length(), low + m.bit_length() - 1, m)
        return fdiv(one, exact, p, mode)[0]


def format_value(v, cfg: CliConfig) -> str:
    if isinstance(v, Integer):
        s = nat_to_string(v.mag, cfg.base)
        return "-" + s if v.sign < 0 else s
    return to_decimal(v, cfg.ndigits, cfg.mode)


# ---------------------------------------------------------------------------
# constant digits


def _e(p, mode):
    return elemfun.f_exp(from_scaled(1, ONE, 0, p)[0], p, mode)[0]


def _sqrt2(p, mode):
    return fsqrt(from_scaled(1, ONE, 1, 2)[0], p, mode)[0]


CONSTANTS = {"pi": elemfun.const_pi, "e": _e, "ln2": elemfun.const_ln2, "sqrt2": _sqrt2}


def constant_digits(name: str, n: int) -> str:
    """First n significant digits of the constant, correctly rounded."""
    if name not in CONSTANTS:
        raise UnknownConstant(f"unknown constant {name!r}; choose from {', '.join(CONSTANTS)}")
    if n < 1:
        raise ValueError("digit count must be at least 1")
    fn = CONSTANTS[name]
    bits = math.ceil(n * math.log2(10)) + 32
    while True:
        lo = to_decimal(fn(bits, RoundingMode.TOWARD_NEGATIVE), n)
        hi = to_decimal(fn(bits, RoundingMode.TOWARD_POSITIVE), n)
        if lo == hi:
            break
        bits += bits // 2
    mant, _, exp = lo.partition("e")
    ds, K = mant.replace(".", ""), int(exp)
    if K >= 0:
        head = ds[:K + 1].ljust(K + 1, "0")
        tail = ds[K + 1:]
        return head + ("." + tail if tail else "")
    return "0." + "0" * (-K - 1) + ds


def wrap_digits(s: str, width: int = 50) -> list[str]:
    """Break a digit string into lines of ``width`` digits; the point rides along."""
    lines, cur, count = [], "", 0
    for ch in s:
        if ch.isdigit() and count == width:
            lines.append(cur)
            cur, count = "", 0
        cur += ch
        count += ch.isdigit()
    lines.append(cur)
    return lines


# ---------------------------------------------------------------------------
# command handlers


def _parse_crt(arg: str):
    r, sep, m = arg.partition("@")
    if not sep:
        raise ParseError(f"expected residue@modulus, got {arg!r}")
    return parse_natural(r), parse_natural(m)


def _nat_out(x: Natural, cfg: CliConfig) -> str:
    return nat_to_string(x, cfg.base)


def cmd_eval(args, cfg, out):
    print(format_value(Evaluator(cfg).evaluate(args.expr), cfg), file=out)


def cmd_digits(args, cfg, out):
    for line in wrap_digits(constant_digits(args.constant, args.n)):
        print(line, file=out)


def cmd_powmod(args, cfg, out):
    a, e, n = map(parse_natural, (args.a, args.e, args.n))
    print(_nat_out(modring.mod_pow(a, e, n), cfg), file=out)


def cmd_gcd(args, cfg, out):
    print(_nat_out(divgcd.gcd(parse_natural(args.a), parse_natural(args.b)), cfg), file=out)


def cmd_inv(args, cfg, out):
    print(_nat_out(divgcd.mod_inverse(parse_natural(args.a), parse_natural(args.n)), cfg),
          file=out)


def cmd_crt(args, cfg, out):
    x, m = modring.crt_reconstruct([_parse_crt(s) for s in args.pairs])
    print(f"{_nat_out(x, cfg)} mod {_nat_out(m, cfg)}", file=out)


def cmd_bench(args, cfg, out):
    sizes = [int(s) for s in args.sizes.split(",")] if args.sizes else DEFAULT_SIZES[args.op]
    algs = args.algorithms.split(",") if args.algorithms else None
    rows = bench.run_bench(args.op, sizes, bench.BenchConfig(args.reps, args.warmup, args.seed),
                           algs)
    print(bench.format_csv(rows), file=out)


def cmd_tune(args, cfg, out):
    values = bench.tune()
    values["newton_div_from"] = divgcd.NEWTON_DIV_FROM
    if args.out:
        fastmul.write_config(args.out, values)
    for k, v in values.items():
        print(f"{k} = {v}", file=out)


DEFAULT_SIZES = {
    "mul": [256, 512, 1024, 2048, 4096, 8192],
    "div": [64, 128, 256, 512, 1024],
    "gcd": [16, 32, 64, 128, 256],
    "exp": [128, 256, 512, 1024, 2048],
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-p", "--precision", type=int, default=argparse.SUPPRESS,
                        help="working precision in bits (default 128)")
    common.add_argument("--mode", choices=sorted(MODES), default=argparse.SUPPRESS,
                        help="rounding mode (default nearest)")
    common.add_argument("--thresholds", default=argparse.SUPPRESS, metavar="FILE",
                        help="multiplication threshold config file")
    common.add_argument("--base", type=int, default=argparse.SUPPRESS,
                        help="output base for integer results (default 10)")

    ap = argparse.ArgumentParser(prog="mca", parents=[common],
                                 description="Multiple-precision arithmetic tools.")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("eval", parents=[common], help="evaluate an expression")
    s.add_argument("expr")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("digits", parents=[common], help="digits of pi, e, ln2 or sqrt2")
    s.add_argument("constant")
    s.add_argument("-n", type=int, default=50, help="significant digits")
    s.set_defaults(func=cmd_digits)

    s = sub.add_parser("powmod", parents=[common], help="a^e mod n")
    for name in ("a", "e", "n"):
        s.add_argument(name)
    s.set_defaults(func=cmd_powmod)

    s = sub.add_parser("gcd", parents=[common], help="greatest common divisor")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(func=cmd_gcd)

    s = sub.add_parser("inv", parents=[common], help="inverse of a modulo n")
    s.add_argument("a")
    s.add_argument("n")
    s.set_defaults(func=cmd_inv)

    s = sub.add_parser("crt", parents=[common], help="combine residue@modulus pairs")
    s.add_argument("pairs", nargs="+")
    s.set_defaults(func=cmd_crt)

    s = sub.add_parser("bench", parents=[common], help="time algorithm variants, CSV output")
    s.add_argument("op", choices=sorted(bench.OPS))
    s.add_argument("--sizes", help="comma-separated ascending sizes (limbs; bits for exp)")
    s.add_argument("--algorithms", help="comma-separated subset of variants")
    s.add_argument("--reps", type=int, default=9)
    s.add_argument("--warmup", type=int, default=2)
    s.add_argument("--seed", type=int, default=1)
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("tune", parents=[common], help="measure multiplication crossovers")
    s.add_argument("--out", help="write the config file here")
    s.set_defaults(func=cmd_tune)
    return ap


def _config(ns) -> CliConfig:
    return CliConfig(
        p=getattr(ns, "precision", 128),
        mode=MODES[getattr(ns, "mode", "nearest")],
        thresholds=getattr(ns, "thresholds", None),
        base=getattr(ns, "base", 10),
    )


def _apply_thresholds(path):
    fastmul.set_thresholds(fastmul.load_thresholds(path))
    cfg = fastmul.read_config(path)
    if "newton_div_from" in cfg:
        divgcd.set_newton_div_from(cfg["newton_div_from"])


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        cfg = _config(ns)
        if cfg.thresholds:
            _apply_thresholds(cfg.thresholds)
    except (ValueError, OSError) as e:
        print(f"mca: {e}", file=err)
        return EXIT_USAGE
    try:
        ns.func(ns, cfg, out)
    except (ParseError, InvalidDigit, InvalidBase, UnknownConstant) as e:
        print(f"mca: {type(e).__name__}: {e}", file=err)
        return EXIT_USAGE
    except MCAError as e:
        print(f"mca: {type(e).__name__}: {e}", file=err)
        return EXIT_MATH
    except ValueError as e:
        print(f"mca: {e}", file=err)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
