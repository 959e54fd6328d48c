"""Command line front end.

    olfsr keygen   --g 4 --P 2 --segment 8 --bits 24 --rng-seed s --out ks.bin --log ks.jsonl
    olfsr encrypt  --in plain --out ct --g 16 --P 3 --segment 256 --rng-seed s --interleave-seed t
    olfsr decrypt  --in ct --out plain ...same secrets...
    olfsr attack bm|profile --in ks.bin [--bits 32]
    olfsr attack bfa --in ct --known plain --g 10 --P 2 --segment 64 ...
    olfsr analyze case --case C2
    olfsr analyze boundary --P 3 --n 8 --T 1e13yr
    olfsr analyze report --gmin 10 --gmax 45

Every option may also come from a TOML file given with ``--config``; flags
win over the file. Exit codes: 0 success, 2 configuration error, 3 data error.
Errors are reported on stderr as one JSON object per line.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

import numpy as np

from . import analysis
from .attack import MAX_BFA_DEGREE, berlekamp_massey, brute_force_attack, linear_complexity_profile
from .cipher import FormatError, IntegrityError, decrypt_bytes, encrypt_bytes, interleave, load_ciphertext
from .gf2poly import GenPoly, enumerate_primitive
from .keygen import OkgConfig, keystream, pack_bits, unpack_bits, write_log

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

EXIT_OK, EXIT_CONFIG, EXIT_DATA = 0, 2, 3


class ConfigError(Exception):
    pass


class DataError(Exception):
    pass


# ---------------------------------------------------------------------------
# Parameter parsing
# ---------------------------------------------------------------------------

_DURATION = re.compile(r"^\s*([0-9.eE+-]+)\s*(s|sec|y|yr|yrs|years?)?\s*$")


def parse_duration(text) -> float:
    """``"1e13yr"`` -> seconds. Plain numbers are seconds."""
    if isinstance(text, (int, float)):
        return float(text)
    m = _DURATION.match(str(text))
    if not m:
        raise ConfigError(f"cannot parse duration {text!r}")
    value = float(m.group(1))
    if m.group(2) and m.group(2).startswith("y"):
        value *= analysis.YEAR_SECONDS
    return value


def parse_int_list(text) -> list[int]:
    if isinstance(text, int):
        return [text]
    if isinstance(text, list):
        return [int(x) for x in text]
    out = []
    for part in str(text).split(","):
        if "-" in part.strip()[1:]:
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


OKG_KEYS = {"g", "P", "polys", "segment", "n", "rng_seed", "poly_seed", "skip_bits"}
COMMAND_KEYS = {
    "keygen": OKG_KEYS | {"bits", "out", "log"},
    "encrypt": OKG_KEYS | {"in", "out", "interleave_seed"},
    "decrypt": OKG_KEYS | {"in", "out", "interleave_seed"},
    "attack": OKG_KEYS | {"in", "out", "bits", "offset", "known", "interleave_seed", "window"},
    "analyze": {"case", "gmin", "gmax", "boundary", "P", "n", "T", "tau", "LM", "format", "out", "year_seconds"},
}


def load_config(path: str | None, command: str) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
    section = data.get(command, data) if isinstance(data.get(command), dict) else data
    section = {k.replace("-", "_"): v for k, v in section.items() if not isinstance(v, dict)}
    unknown = set(section) - COMMAND_KEYS[command]
    if unknown:
        raise ConfigError(f"unknown config keys for {command}: {sorted(unknown)}")
    return section


def merge(args: argparse.Namespace, config: dict) -> dict:
    params = dict(config)
    for key, value in vars(args).items():
        if value is not None and key in COMMAND_KEYS.get(args.command, ()):
            params[key] = value
    return params


def build_okg(params: dict) -> OkgConfig:
    seed = params.get("rng_seed")
    if seed is None:
        raise ConfigError("rng_seed is required (no ambient entropy is used)")
    try:
        if params.get("polys"):
            polys = params["polys"]
            if isinstance(polys, str):
                polys = polys.split(",")
            polys = [GenPoly.from_hex(p.strip()) for p in polys]
        else:
            if params.get("g") is None or params.get("P") is None:
                raise ConfigError("give either polys or both g and P")
            polys = enumerate_primitive(int(params["g"]), int(params["P"]), seed=params.get("poly_seed"))
        if params.get("segment") is not None:
            segment = int(params["segment"])
        elif params.get("n") is not None:
            degrees = {p.degree for p in polys}
            if len(degrees) != 1:
                raise ConfigError("n requires polynomials of a single degree")
            segment = int(params["n"]) * degrees.pop()
        else:
            raise ConfigError("segment (or n) is required")
        return OkgConfig(tuple(polys), segment, str(seed).encode(), int(params.get("skip_bits") or 0))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _require(params: dict, *keys: str) -> None:
    missing = [k for k in keys if params.get(k) is None]
    if missing:
        raise ConfigError(f"missing required parameter(s): {', '.join(missing)}")


def _read(path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_keygen(params: dict) -> int:
    _require(params, "bits", "out")
    okg = build_okg(params)
    bits = int(params["bits"])
    if bits < 0:
        raise ConfigError("bits must be non-negative")
    ks = keystream(okg, okg.rng(), bits)
    Path(params["out"]).write_bytes(pack_bits(ks.bits))
    if params.get("log"):
        write_log(params["log"], ks.log)
    return EXIT_OK


def cmd_encrypt(params: dict) -> int:
    _require(params, "in", "out", "interleave_seed")
    okg = build_okg(params)
    data = encrypt_bytes(_read(params["in"]), okg, str(params["interleave_seed"]))
    Path(params["out"]).write_bytes(data)
    return EXIT_OK


def cmd_decrypt(params: dict) -> int:
    _require(params, "in", "out", "interleave_seed")
    okg = build_okg(params)
    data = decrypt_bytes(_read(params["in"]), okg, str(params["interleave_seed"]))
    Path(params["out"]).write_bytes(data)
    return EXIT_OK


def _keystream_input(params: dict) -> np.ndarray:
    _require(params, "in")
    bits = unpack_bits(_read(params["in"]))
    offset = int(params.get("offset") or 0)
    count = params.get("bits")
    bits = bits[offset:] if count is None else bits[offset : offset + int(count)]
    if bits.size == 0:
        raise DataError("no keystream bits selected")
    return bits


def cmd_attack(mode: str, params: dict) -> int:
    if mode == "bm":
        result = berlekamp_massey(_keystream_input(params))
        _emit(json.dumps(result.to_dict()) + "\n", params.get("out"))
        return EXIT_OK
    if mode == "profile":
        rows = linear_complexity_profile(_keystream_input(params))
        text = "prefix_len,L\n" + "".join(f"{n},{L}\n" for n, L in rows)
        _emit(text, params.get("out"))
        return EXIT_OK
    # bfa
    _require(params, "in", "known")
    g = params.get("g")
    if params.get("polys"):
        g = max(GenPoly.from_hex(p.strip()).degree for p in str(params["polys"]).split(","))
    if g is not None and int(g) > MAX_BFA_DEGREE:
        raise ConfigError(
            f"brute force refused for g={g}: the search needs P * (2^g - 1) guesses per "
            f"segment, infeasible beyond g = {MAX_BFA_DEGREE} at desk scale"
        )
    params = dict(params)
    params.setdefault("rng_seed", "")  # the attacker has no shared secret
    okg = build_okg(params)
    units, total = load_ciphertext(_read(params["in"]), okg.segment_len)
    ct = np.concatenate([u.payload for u in units]) if units else np.zeros(0, np.uint8)
    known = unpack_bits(_read(params["known"]), total)
    if len(known) < total:
        raise DataError("known plaintext is shorter than the ciphertext")
    if params.get("interleave_seed") is not None:
        known = interleave(known, str(params["interleave_seed"]))
    result = brute_force_attack(ct, known, okg.polys, okg.segment_len, window=params.get("window"), tau_probe=True)
    _emit(json.dumps(result.to_dict()) + "\n", params.get("out"))
    return EXIT_OK


def cmd_analyze(action: str | None, params: dict) -> int:
    if action is None:
        action = "boundary" if params.get("boundary") else "case" if params.get("case") else "report"
    threat_kw = {}
    if params.get("tau") is not None:
        threat_kw["tau"] = float(params["tau"])
    if params.get("LM") is not None:
        threat_kw["L_M"] = float(params["LM"])
    if params.get("year_seconds") is not None:
        threat_kw["year_seconds"] = float(params["year_seconds"])
    if params.get("T") is not None:
        threat_kw["T_target"] = parse_duration(params["T"])
    try:
        threat = analysis.ThreatParams(**threat_kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    fmt = params.get("format")

    try:
        if action == "case":
            case = str(params.get("case") or "").upper()
            if case == "C1":
                gmax = params.get("gmax")
                sweep = [int(gmax)] if gmax is not None else range(analysis.C1_G_MIN, analysis.C2_G_MAX + 1)
            elif case == "C2":
                gmin = params.get("gmin")
                sweep = [int(gmin)] if gmin is not None else range(analysis.C1_G_MIN, analysis.C2_G_MAX)
            else:
                raise ConfigError("case must be C1 or C2")
            rows = analysis.run_case_study(case, sweep, threat)
            if fmt == "json":
                _emit(json.dumps([r.to_dict() for r in rows], indent=1) + "\n", params.get("out"))
            else:
                _emit(analysis.case_study_csv(case, rows), params.get("out"))
        elif action == "boundary":
            _require(params, "P", "n")
            table = analysis.boundary_table(parse_int_list(params["P"]), parse_int_list(params["n"]), threat)
            if fmt == "json":
                _emit(json.dumps([dict(P=P, n=n, g_min=g) for P, n, g in table]) + "\n", params.get("out"))
            else:
                _emit(analysis.boundary_csv(table), params.get("out"))
        elif action == "report":
            lo = int(params.get("gmin") or analysis.C1_G_MIN)
            hi = int(params.get("gmax") or analysis.C2_G_MAX)
            report = analysis.security_report(analysis.KeyspaceSpec.degree_range(lo, hi), threat)
            _emit(json.dumps(report.to_dict(), indent=1) + "\n", params.get("out"))
        else:
            raise ConfigError(f"unknown analyze action {action!r}")
    except analysis.UnsatisfiableError as exc:
        raise DataError(str(exc)) from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parser
# ---------------------------------------------------------------------------


def _add_okg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--g", type=int)
    p.add_argument("--P", type=int)
    p.add_argument("--polys", help="comma separated hex polynomials, e.g. 13,19")
    p.add_argument("--segment", type=int, help="key bits between reseeds")
    p.add_argument("--n", type=int, help="segment = n * g")
    p.add_argument("--rng-seed", dest="rng_seed")
    p.add_argument("--poly-seed", dest="poly_seed", type=int, help="seed for random polynomial choice")
    p.add_argument("--skip-bits", dest="skip_bits", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="olfsr", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="write a reseeded keystream and its reseed log")
    _add_okg(p)
    p.add_argument("--bits", type=int)
    p.add_argument("--out")
    p.add_argument("--log")

    for name in ("encrypt", "decrypt"):
        p = sub.add_parser(name, help=f"{name} a file")
        _add_okg(p)
        p.add_argument("--in", dest="in")
        p.add_argument("--out")
        p.add_argument("--interleave-seed", dest="interleave_seed")

    p = sub.add_parser("attack", help="Berlekamp-Massey, complexity profile or brute force")
    p.add_argument("mode", choices=["bm", "bfa", "profile"])
    _add_okg(p)
    p.add_argument("--in", dest="in")
    p.add_argument("--out")
    p.add_argument("--bits", type=int)
    p.add_argument("--offset", type=int)
    p.add_argument("--known")
    p.add_argument("--interleave-seed", dest="interleave_seed")
    p.add_argument("--window", type=int)

    p = sub.add_parser("analyze", help="security dimensioning tables")
    p.add_argument("action", nargs="?", choices=["case", "boundary", "report"])
    p.add_argument("--case")
    p.add_argument("--gmin", type=int)
    p.add_argument("--gmax", type=int)
    p.add_argument("--boundary", action="store_true", default=None)
    p.add_argument("--P")
    p.add_argument("--n")
    p.add_argument("--T", help="target brute force time, e.g. 1e13yr or seconds")
    p.add_argument("--tau", type=float)
    p.add_argument("--LM", type=float)
    p.add_argument("--year-seconds", dest="year_seconds", type=float)
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--out")

    for p in sub.choices.values():
        p.add_argument("--config", help="TOML file with default parameters")
    return parser


def _fail(kind: str, message: str, code: int) -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        params = merge(args, load_config(args.config, args.command))
        if args.command == "keygen":
            return cmd_keygen(params)
        if args.command == "encrypt":
            return cmd_encrypt(params)
        if args.command == "decrypt":
            return cmd_decrypt(params)
        if args.command == "attack":
            return cmd_attack(args.mode, params)
        return cmd_analyze(args.action, params)
    except ConfigError as exc:
        return _fail("config", str(exc), EXIT_CONFIG)
    except (DataError, FormatError, IntegrityError) as exc:
        return _fail("data", str(exc), EXIT_DATA)
    except OSError as exc:
        return _fail("io", str(exc), EXIT_DATA)


if __name__ == "__main__":
    sys.exit(main())
