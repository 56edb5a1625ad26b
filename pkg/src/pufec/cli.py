"""Command-line front end: enroll / reconstruct key workflows over helper
files, plus simulate / analyze campaigns.

Exit codes: 0 success, 2 usage, 3 file or parse error, 4 decode failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import codecs, helperfile, sim, sketch

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DECODE = 4

DEFAULT_KEY_BITS = 128


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _get_codec(code_id: str):
    try:
        return codecs.get_codec(code_id)
    except KeyError as e:
        raise _CliError(EXIT_USAGE, str(e.args[0])) from None


def _key_source(info: np.ndarray) -> np.ndarray:
    """The digest input: the first 128 recovered information bits (all of
    them when the code carries fewer)."""
    return info[:DEFAULT_KEY_BITS] if info.size > DEFAULT_KEY_BITS else info


def _cmd_enroll(args) -> int:
    codec = _get_codec(args.code)
    y = helperfile.read_response(args.response, codec.n, args.format)
    if args.scheme == sketch.SCHEME_SYNDROME:
        helper = sketch.sketch(codec, y)
    else:
        rng = np.random.default_rng(args.seed)
        helper, _ = sketch.code_offset_sketch(codec, y, rng)
    info = sketch.response_info(codec, y, helper)
    key = sketch.extract_key(_key_source(info), args.key_bits)
    helperfile.write_helper(args.out_helper, helper)
    helperfile.write_key(args.out_key, key)
    print(f"enrolled {args.code} ({args.scheme}): helper {helper.payload.size} bits "
          f"-> {args.out_helper}, key {args.key_bits} bits -> {args.out_key}")
    return EXIT_OK


def _cmd_reconstruct(args) -> int:
    helper = helperfile.read_helper(args.helper)
    try:
        codec = codecs.get_codec(helper.code_id)
    except KeyError as e:
        raise _CliError(EXIT_IO, f"helper file: {e.args[0]}") from None
    expected = sketch.expected_payload_bits(codec, helper.scheme)
    if helper.payload.size != expected:
        raise _CliError(EXIT_IO, f"helper payload holds {helper.payload.size} bits, "
                        f"but {helper.code_id}/{helper.scheme} needs {expected}")
    y_prime = helperfile.read_response(args.response, codec.n, args.format)
    y = sketch.recover(codec, y_prime, helper)
    if y is None:
        print("reconstruction failed: response too noisy to decode", file=sys.stderr)
        return EXIT_DECODE
    info = sketch.response_info(codec, y, helper)
    key = sketch.extract_key(_key_source(info), args.key_bits)
    helperfile.write_key(args.out_key, key)
    print(f"reconstructed key {args.key_bits} bits -> {args.out_key}")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    codec = _get_codec(args.code)
    if args.mode == "is":
        if args.p_star is None:
            raise _CliError(EXIT_USAGE, "mode=is requires --p-star")
        if args.p_star < args.p:
            raise _CliError(EXIT_USAGE, f"--p-star must be >= --p, got {args.p_star} < {args.p}")
        report = sim.importance_sampled_block_error(
            codec, args.p, args.p_star, args.trials, args.seed, args.workers)
    else:
        report = sim.monte_carlo_block_error(
            codec, args.p, args.trials, args.seed, args.workers)
    text = report.to_text()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _analyze_baseline(args) -> list[str]:
    p = args.p
    perr = sim.baseline_bch_rep_perr(p)
    ours = codecs.get_codec("gcc-2048-131")
    return [
        f"p: {p}",
        "scheme: BCH(318,174,35) over (7,1,7) repetition (analytic, bounded-distance t=17)",
        f"baseline_p_err: {perr}",
        "baseline_length: 2226",
        "baseline_largest_decoder_field: GF(2^8) as usually reported "
        "(a length-318 BCH shortens from 511, which itself needs GF(2^9))",
        f"gcc_length: {ours.n}",
        f"gcc_dimension: {ours.k}",
        "gcc_largest_decoder_field: GF(2)",
    ]


def _analyze_inner_dist(args) -> list[str]:
    codec = _get_codec(args.code or "gcc-2048-131")
    spec = getattr(codec, "spec", None)
    if spec is None:
        raise _CliError(EXIT_USAGE, f"{codec.code_id} has no inner code to analyze")
    dist = sim.inner_outcome_distribution(spec.inner_codebook, args.p)
    lines = [
        f"inner_code: {dist.code_label}",
        f"p: {dist.p}",
        f"p_correct: {dist.p_correct}",
        f"p_wrong_codeword: {dist.p_wrong}",
        f"p_erasure: {dist.erasure}",
        f"total: {dist.total()}",
    ]
    by_dist = dist.probs.sum(axis=0)
    for t in np.nonzero(by_dist > 0)[0]:
        lines.append(f"p_decode_at_distance_{t}: {by_dist[t]}")
    return lines


def _analyze_params(args) -> list[str]:
    ids = [args.code] if args.code else codecs.list_code_ids()
    lines = []
    for cid in ids:
        c = _get_codec(cid)
        lines.append(
            f"{cid}: n={c.n} k={c.k} designed_distance={c.designed_distance} [{c.describe()}]"
        )
    return lines


def _cmd_analyze(args) -> int:
    if args.code_pos and not args.code:
        args.code = args.code_pos
    lines = {
        "baseline": _analyze_baseline,
        "inner-dist": _analyze_inner_dist,
        "params": _analyze_params,
    }[args.target](args)
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_info(args) -> int:
    print("registered codes:")
    for cid in codecs.list_code_ids():
        c = codecs.get_codec(cid)
        print(f"  {cid:>14}: n={c.n:<5} k={c.k:<4} designed_distance={c.designed_distance:<4} {c.describe()}")
    print("helper schemes: syndrome (n-k bits), code-offset (n bits)")
    print("response files: .bin packed little-endian bits, .hex ASCII hex")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pufec",
                                 description="PUF key enrollment, reconstruction and code evaluation")
    sub = ap.add_subparsers(dest="command", required=True)

    en = sub.add_parser("enroll", help="derive helper data and a key from a response")
    en.add_argument("response", help="response file (.bin or .hex)")
    en.add_argument("--code", required=True, help="registered code id (see `pufec info`)")
    en.add_argument("--scheme", choices=[sketch.SCHEME_SYNDROME, sketch.SCHEME_CODE_OFFSET],
                    default=sketch.SCHEME_SYNDROME)
    en.add_argument("--out-helper", required=True)
    en.add_argument("--out-key", required=True)
    en.add_argument("--key-bits", type=int, default=DEFAULT_KEY_BITS)
    en.add_argument("--format", choices=["bin", "hex"], help="override extension detection")
    en.add_argument("--seed", type=int, help="RNG seed for the code-offset scheme")
    en.set_defaults(func=_cmd_enroll)

    re = sub.add_parser("reconstruct", help="rebuild the key from a noisy response")
    re.add_argument("response")
    re.add_argument("helper", help="helper-data file written by enroll")
    re.add_argument("--out-key", required=True)
    re.add_argument("--key-bits", type=int, default=DEFAULT_KEY_BITS)
    re.add_argument("--format", choices=["bin", "hex"])
    re.set_defaults(func=_cmd_reconstruct)

    si = sub.add_parser("simulate", help="estimate the block error probability")
    si.add_argument("--code", required=True)
    si.add_argument("--p", type=float, required=True)
    si.add_argument("--trials", type=int, required=True)
    si.add_argument("--seed", type=int, default=0)
    si.add_argument("--workers", type=int, default=1)
    si.add_argument("--mode", choices=["mc", "is"], default="mc")
    si.add_argument("--p-star", type=float, help="sampling crossover for mode=is")
    si.add_argument("--out", help="report file (default stdout)")
    si.set_defaults(func=_cmd_simulate)

    an = sub.add_parser("analyze", help="analytic and exact-enumeration reports")
    an.add_argument("target", choices=["baseline", "inner-dist", "params"])
    an.add_argument("code_pos", nargs="?", help="code id (same as --code)")
    an.add_argument("--code")
    an.add_argument("--p", type=float, default=0.14)
    an.add_argument("--out")
    an.set_defaults(func=_cmd_analyze)

    inf = sub.add_parser("info", help="list registered codes and file formats")
    inf.set_defaults(func=_cmd_info)
    return ap


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except _CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except helperfile.HelperFileError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
