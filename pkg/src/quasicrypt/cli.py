"""Command-line interface: ``quasicrypt {keygen,encrypt,decrypt,attack,verify,tables}``.

Every command ends with a ``PASS`` or ``FAIL`` line. It goes to stdout,
or to stderr when stdout carries the command's data (encrypt/decrypt and
keygen without ``--out``). Exit status is 0 on PASS, 1 on FAIL and 2 for
usage or input errors.
"""

from __future__ import annotations

import argparse
import itertools
import os
import sys
from pathlib import Path

from . import __version__
from .algebra import (
    Alphabet,
    OperationTable,
    QuasigroupError,
    QuasigroupKey,
    inverse_op,
    parastrophe,
    quasigroup_violation,
    random_quasigroup,
    translation_of,
)
from .cipher import (
    LeaderBlock,
    MixSchedule,
    TamperError,
    decrypt_binary,
    decrypt_blocks,
    decrypt_leaderfan,
    decrypt_mixed,
    decrypt_nary,
    devectorize,
    encrypt_binary,
    encrypt_blocks,
    encrypt_leaderfan,
    encrypt_mixed,
    encrypt_nary,
    vectorize,
)
from .cryptanalysis import (
    AttackError,
    block_decryption_oracle,
    break_end_to_end,
    cca_query_bound,
    cca_recover,
    cpa_recover,
    decryption_oracle,
    encryption_oracle,
    equivalent_prefixes,
    recover_block_inverse,
    recover_leader_translations,
)
from .formats import (
    CipherFile,
    KeyFile,
    ParseError,
    format_ciphertext,
    format_keyfile,
    format_table,
    parse_ciphertext,
    read_alphabet,
    read_keyfile,
)
from .orthogonality import (
    NotOrthogonalError,
    OrthogonalSystem,
    TuplePermutation,
    find_collision,
    inverse_system,
    is_k_orthogonal,
    system_from_permutation,
)
from .rng import SplitMix64
from .tquasigroup import BINARY_PARASTROPHES, LinearQuasigroupSpec, brute_force_report, materialize, t1_criterion

# leaders are drawn from an rng seeded with seed + LEADER_SEED_OFFSET
LEADER_SEED_OFFSET = 1
SYSTEM_SEED_OFFSET = 2


class UsageError(Exception):
    pass


def _status(ok: bool, stream=None) -> int:
    print("PASS" if ok else "FAIL", file=stream or sys.stdout)
    return 0 if ok else 1


def _random_leaders(q: int, count: int, seed: int) -> tuple[int, ...]:
    return tuple(SplitMix64(seed + LEADER_SEED_OFFSET).symbols(q, count))


# -- keygen ------------------------------------------------------------------

def _orthosystem_with_quasigroup(q: int, n: int, seed: int) -> list[OperationTable]:
    """First table a random quasigroup A; the rest are coordinates of a random
    permutation of (x_2..x_n). The joint map is invertible: recover x_2..x_n
    from the permutation, then x_1 from A."""
    first = random_quasigroup(q, n, seed)
    perm = SplitMix64(seed + SYSTEM_SEED_OFFSET).permutation(q ** (n - 1))
    rest = [[0] * q ** n for _ in range(n - 1)]
    for r, args in enumerate(itertools.product(range(q), repeat=n)):
        tail = 0
        for x in args[1:]:
            tail = tail * q + x
        y = perm[tail]
        for i in range(n - 2, -1, -1):
            y, rest[i][r] = divmod(y, q)
    return [first] + [OperationTable(n, q, tuple(v)) for v in rest]


def cmd_keygen(args) -> int:
    if args.kind == "quasigroup":
        _need(args, "q", "n")
        table = random_quasigroup(args.q, args.n, args.seed)
        key = KeyFile((table,), _random_leaders(args.q, (args.n - 1) ** 2, args.seed))
        summary = f"quasigroup q={args.q} n={args.n} seed={args.seed}"
    elif args.kind == "orthosystem":
        _need(args, "q", "n")
        if args.mode == "perm":
            system = system_from_permutation(TuplePermutation.random(args.q, args.n, args.seed))
            tables = list(system.tables)
        else:
            tables = _orthosystem_with_quasigroup(args.q, args.n, args.seed)
        OrthogonalSystem(tuple(tables))
        schedule = MixSchedule.parse(args.schedule) if args.schedule else None
        key = KeyFile(tuple(tables), _random_leaders(args.q, (args.n - 1) ** 2, args.seed),
                      schedule, args.rounds or 1)
        summary = f"orthosystem q={args.q} n={args.n} seed={args.seed} mode={args.mode}"
    else:
        _need(args, "p", "k", "m")
        spec = LinearQuasigroupSpec(args.p, args.k, args.m, args.a)
        table = materialize(spec)
        key = KeyFile((table,), _random_leaders(spec.p, 1, args.seed), tquasigroup=spec)
        report = t1_criterion(spec)
        summary = f"tquasigroup {spec}: " + ", ".join(
            f"A _|_ {s}A: {'yes' if v else 'no'}" for s, v in report.verdicts.items()
        )
    text = format_keyfile(key)
    if args.out:
        Path(args.out).write_text(text)
        print(summary)
        return _status(True)
    sys.stdout.write(text)
    print(summary, file=sys.stderr)
    return _status(True, sys.stderr)


def _need(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.kind} needs {' '.join(missing)}")


# -- encrypt / decrypt -------------------------------------------------------

def _load(args):
    alphabet = read_alphabet(args.alphabet) if args.alphabet else None
    key = read_keyfile(args.key, alphabet)
    if alphabet is not None and alphabet.q != key.q:
        raise UsageError("alphabet size does not match the key")
    return key, alphabet


def _leaders(args, key: KeyFile, alphabet: Alphabet | None, count: int) -> tuple[int, ...]:
    enc = alphabet or Alphabet(key.q)
    if args.leaders:
        leaders = tuple(enc.encode(t) for t in args.leaders.replace(",", " ").split())
    elif key.leaders is not None:
        leaders = key.leaders
    else:
        raise UsageError("no leaders: pass --leaders or add a 'leaders:' line to the key file")
    if len(leaders) < count:
        raise UsageError(f"need {count} leaders, got {len(leaders)}")
    return leaders[:count]


def _read_plain(args, q: int, alphabet: Alphabet | None) -> list[int]:
    data = Path(args.infile).read_bytes() if args.infile else sys.stdin.buffer.read()
    if alphabet is None:
        return vectorize(data, q)
    text = data.decode("utf-8")
    if all(len(s) == 1 for s in alphabet.symbols):
        tokens = [c for c in text if not c.isspace()]
    else:
        tokens = text.split()
    return [alphabet.encode(t) for t in tokens]


def _write_out(args, payload: bytes):
    if args.outfile:
        Path(args.outfile).write_bytes(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()


def _engine_params(args, key: KeyFile, alphabet):
    engine = args.engine
    rounds = args.rounds or key.rounds or 1
    if engine == "binary":
        table = key.stream_key()
        if table.arity != 2:
            raise UsageError("binary engine needs a binary key")
        return dict(table=table, leaders=_leaders(args, key, alphabet, 1))
    if engine == "nary":
        table = key.stream_key()
        return dict(table=table, leaders=_leaders(args, key, alphabet, (table.arity - 1) ** 2))
    system = key.system()
    if engine == "block":
        return dict(system=system, rounds=rounds)
    if engine == "leaderfan":
        return dict(system=system, leaders=_leaders(args, key, alphabet, system.arity - 1))
    table = key.stream_key()
    schedule = MixSchedule.parse(args.schedule) if args.schedule else key.schedule
    if schedule is None:
        raise UsageError("mixed engine needs --schedule or a 'schedule:' line in the key file")
    return dict(table=table, system=system, schedule=schedule, rounds=rounds,
                leaders=_leaders(args, key, alphabet, (table.arity - 1) ** 2))


def cmd_encrypt(args) -> int:
    key, alphabet = _load(args)
    p = _engine_params(args, key, alphabet)
    plain = _read_plain(args, key.q, alphabet)
    engine = args.engine
    if engine == "binary":
        cipher, n = encrypt_binary(p["table"], p["leaders"][0], plain), 2
    elif engine == "nary":
        cipher, n = encrypt_nary(p["table"], p["leaders"], plain), p["table"].arity
    elif engine == "block":
        cipher, n = encrypt_blocks(p["system"], plain, p["rounds"]), p["system"].arity
    elif engine == "leaderfan":
        cipher, n = encrypt_leaderfan(p["system"], p["leaders"], plain), p["system"].arity
    else:
        cipher, _ = encrypt_mixed(p["table"], p["leaders"], p["system"], p["schedule"], plain, p["rounds"])
        n = p["system"].arity
    text = format_ciphertext(CipherFile(engine, n, key.q, len(plain), tuple(cipher)), alphabet)
    _write_out(args, text.encode())
    return _status(True, sys.stdout if args.outfile else sys.stderr)


def cmd_decrypt(args) -> int:
    key, alphabet = _load(args)
    source = Path(args.infile).read_text() if args.infile else sys.stdin.read()
    c = parse_ciphertext(source, alphabet)
    if c.q != key.q:
        raise UsageError(f"ciphertext alphabet q={c.q} does not match key q={key.q}")
    engine = args.engine or c.engine
    if engine != c.engine:
        raise UsageError(f"ciphertext was produced by engine {c.engine!r}, not {engine!r}")
    args.engine = engine
    p = _engine_params(args, key, alphabet)
    symbols = list(c.symbols)
    if engine == "binary":
        plain = decrypt_binary(p["table"], p["leaders"][0], symbols)
    elif engine == "nary":
        plain = decrypt_nary(p["table"], p["leaders"], symbols)
    elif engine == "block":
        plain = decrypt_blocks(p["system"], symbols, c.length, p["rounds"])
    elif engine == "leaderfan":
        plain = decrypt_leaderfan(p["system"], p["leaders"], symbols)
    else:
        plain = decrypt_mixed(p["table"], p["leaders"], p["system"], p["schedule"], symbols,
                              c.length, p["rounds"])
    if len(plain) != c.length:
        raise UsageError(f"truncated ciphertext: header says {c.length} symbols, got {len(plain)}")
    if alphabet is None:
        payload = devectorize(plain, key.q)
    else:
        sep = "" if all(len(s) == 1 for s in alphabet.symbols) else " "
        payload = (sep.join(alphabet.decode(s) for s in plain) + "\n").encode()
    _write_out(args, payload)
    return _status(True, sys.stdout if args.outfile else sys.stderr)


# -- attack ------------------------------------------------------------------

def cmd_attack(args) -> int:
    key, _ = _load(args)
    rng = SplitMix64(args.seed)
    if args.mode == "block":
        return _attack_block(key, rng)
    table = QuasigroupKey.from_table(key.stream_key())
    q, n = table.q, table.arity
    if args.leaders:
        leaders = _leaders(args, key, None, (n - 1) ** 2)
    elif key.leaders is not None and len(key.leaders) >= (n - 1) ** 2:
        leaders = key.leaders[:(n - 1) ** 2]
    else:
        leaders = tuple(rng.symbols(q, (n - 1) ** 2))
    block = LeaderBlock(n, leaders)
    transcript = args.transcript is not None
    print(f"target: n={n} q={q}")

    if args.mode == "cpa":
        oracle = encryption_oracle(table, block, record=transcript)
        rec = cpa_recover(oracle, q, n)
    else:
        oracle = decryption_oracle(table, block, record=transcript)
        rec = cca_recover(oracle, q, n)
        print(f"cca bound (queries, symbols): {cca_query_bound(q, n)}")
    print(f"recovered {n}-ary operation:")
    print(format_table(rec.table), end="")
    print(f"recovered inverse operation (position {n}):")
    print(format_table(rec.inverse), end="")
    ok = rec.table == table
    print(f"table matches target: {'yes' if ok else 'no'}")

    if args.mode in ("leaders", "break"):
        translations = recover_leader_translations(oracle, rec)
        for j, tr in enumerate(translations):
            truth = translation_of(table, block.prefix(j))
            same = tr.mapping == truth.mapping
            ok &= same
            classes = equivalent_prefixes(rec.table, tr.mapping)
            print(f"T{j + 1}: {list(tr.mapping)} equivalent prefixes {classes} "
                  f"matches leader prefix {block.prefix(j)}: {'yes' if same else 'no'}")
    if args.mode == "break":
        message = rng.symbols(q, args.length)
        cipher = encrypt_nary(table, block, message)
        fresh = decryption_oracle(table, block, record=transcript)
        broken, rec = break_end_to_end(fresh, q, n, cipher)
        same = broken == message
        ok &= same
        oracle = fresh
        print(f"intercepted: {' '.join(map(str, cipher))}")
        print(f"broken:      {' '.join(map(str, broken))}")
        print(f"plaintext recovered: {'yes' if same else 'no'}")
    print(f"oracle queries: {oracle.queries} symbols: {oracle.symbols}")
    if transcript:
        Path(args.transcript).write_text(oracle.transcript_text())
    return _status(ok)


def _attack_block(key: KeyFile, rng: SplitMix64) -> int:
    system = key.system()
    oracle = block_decryption_oracle(system)
    recovered = recover_block_inverse(oracle, system.q, system.arity)
    ok = recovered.tables == inverse_system(system).tables
    print(f"recovered inverse system with {oracle.queries} block queries: {'yes' if ok else 'no'}")
    return _status(ok)


# -- verify / tables ---------------------------------------------------------

def cmd_verify(args) -> int:
    alphabet = read_alphabet(args.alphabet) if args.alphabet else None
    key = read_keyfile(args.file, alphabet)
    ok = True
    if len(key.tables) == 1:
        table = key.tables[0]
        violation = quasigroup_violation(table)
        print(f"table: n={table.arity} q={table.q}")
        print(f"quasigroup: {'yes' if violation is None else 'no'}")
        if violation is not None:
            print(f"  witness: {violation}")
            ok = False
        elif table.arity == 2:
            brute = brute_force_report(table)
            for s in BINARY_PARASTROPHES:
                print(f"orthogonal to {s}-parastrophe: {'yes' if brute[s] else 'no'}")
            if key.tquasigroup is not None:
                spec = key.tquasigroup
                crit = t1_criterion(spec)
                same_table = materialize(spec).values == table.values
                agree = crit.verdicts == brute.verdicts
                print(f"table equals {spec}: {'yes' if same_table else 'no'}")
                print(f"criterion agrees with brute force: {'yes' if agree else 'no'}")
                ok &= same_table and agree
    else:
        n = key.tables[0].arity
        print(f"system: {len(key.tables)} tables")
        try:
            collision = find_collision(key.tables)
        except ValueError as exc:
            print(f"orthogonal: no ({exc})")
            return _status(False)
        print(f"orthogonal: {'yes' if collision is None else 'no'}")
        if collision is not None:
            print(f"  collision: {collision[0]} and {collision[1]}")
            ok = False
        for i, t in enumerate(key.tables, start=1):
            print(f"table {i} quasigroup: {'yes' if quasigroup_violation(t) is None else 'no'}")
        if n >= 2:
            for i, j in itertools.combinations(range(len(key.tables)), 2):
                pair = is_k_orthogonal([key.tables[i], key.tables[j]])
                print(f"tables {i + 1},{j + 1} orthogonal (k=2): {'yes' if pair else 'no'}")
    return _status(ok)


def render_table(table: OperationTable) -> str:
    """Cayley tables; arity > 2 is shown as slices over the leading arguments."""
    alphabet = table.alphabet or Alphabet(table.q)
    q = table.q
    names = [alphabet.decode(i) for i in range(q)]
    width = max(len(s) for s in names)
    out = []
    if table.arity == 1:
        out.append(" ".join(alphabet.decode(v).rjust(width) for v in table.values))
        return "\n".join(out) + "\n"
    for prefix in itertools.product(range(q), repeat=table.arity - 2):
        label = "A" + ("_" + ",".join(names[x] for x in prefix) if prefix else "")
        out.append(label.rjust(width) + " | " + " ".join(s.rjust(width) for s in names))
        out.append("-" * (width + 3 + (width + 1) * q - 1))
        for x in range(q):
            r = table.rank(prefix + (x, 0))
            row = table.values[r:r + q]
            out.append(names[x].rjust(width) + " | " + " ".join(alphabet.decode(v).rjust(width) for v in row))
        out.append("")
    return "\n".join(out)


def cmd_tables(args) -> int:
    alphabet = read_alphabet(args.alphabet) if args.alphabet else None
    key = read_keyfile(args.file, alphabet)
    for i, table in enumerate(key.tables, start=1):
        if len(key.tables) > 1:
            print(f"# table {i}")
        if args.parastrophe:
            table = parastrophe(table, args.parastrophe)
            print(f"# {args.parastrophe}-parastrophe")
        elif args.inverse:
            table = inverse_op(table, args.inverse)
            print(f"# inverse in argument {args.inverse}")
        print(render_table(table.with_alphabet(alphabet)))
    return _status(True)


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quasicrypt", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    kg = sub.add_parser("keygen", help="generate a key file")
    kg.add_argument("kind", choices=["quasigroup", "orthosystem", "tquasigroup"])
    kg.add_argument("--q", type=int)
    kg.add_argument("--n", type=int)
    kg.add_argument("--p", type=int)
    kg.add_argument("--k", type=int)
    kg.add_argument("--m", type=int)
    kg.add_argument("--a", type=int, default=0)
    kg.add_argument("--spec", help="tquasigroup as p:k:m:a")
    kg.add_argument("--seed", type=int, default=0)
    kg.add_argument("--mode", choices=["quasigroup", "perm"], default="quasigroup",
                    help="orthosystem: first table a quasigroup (default) or a uniform random permutation")
    kg.add_argument("--schedule")
    kg.add_argument("--rounds", type=int)
    kg.add_argument("--out")
    kg.set_defaults(func=cmd_keygen)

    for name, func in (("encrypt", cmd_encrypt), ("decrypt", cmd_decrypt)):
        p = sub.add_parser(name, help=f"{name} a file")
        p.add_argument("--key", required=True)
        p.add_argument("--in", dest="infile")
        p.add_argument("--out", dest="outfile")
        p.add_argument("--engine", choices=["binary", "nary", "block", "leaderfan", "mixed"],
                       required=(name == "encrypt"))
        p.add_argument("--leaders", "--leader", dest="leaders")
        p.add_argument("--rounds", type=int)
        p.add_argument("--schedule")
        p.add_argument("--alphabet")
        p.add_argument("--seed", type=int, default=0)
        p.set_defaults(func=func)

    at = sub.add_parser("attack", help="run a key-recovery attack against an in-process device")
    at.add_argument("mode", choices=["cca", "cpa", "leaders", "break", "block"])
    at.add_argument("--key", required=True)
    at.add_argument("--leaders", "--leader", dest="leaders")
    at.add_argument("--seed", type=int, default=0)
    at.add_argument("--length", type=int, default=50)
    at.add_argument("--transcript", help="write the oracle transcript here")
    at.add_argument("--alphabet")
    at.set_defaults(func=cmd_attack)

    vf = sub.add_parser("verify", help="report algebraic properties of a key or system file")
    vf.add_argument("file")
    vf.add_argument("--alphabet")
    vf.set_defaults(func=cmd_verify)

    tb = sub.add_parser("tables", help="pretty-print the tables of a key or system file")
    tb.add_argument("file")
    tb.add_argument("--alphabet")
    tb.add_argument("--parastrophe", help="print this parastrophe instead, e.g. '(23)'")
    tb.add_argument("--inverse", type=int, help="print the inverse operation in this argument")
    tb.set_defaults(func=cmd_tables)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "spec", None):
            spec = LinearQuasigroupSpec.parse(args.spec)
            args.p, args.k, args.m, args.a = spec.p, spec.k, spec.m, spec.a
        return args.func(args)
    except BrokenPipeError:
        # reader went away (e.g. `| head`); stay quiet like other filters
        sys.stdout = open(os.devnull, "w")
        return 1
    except (UsageError, ParseError, QuasigroupError, NotOrthogonalError, TamperError,
            AttackError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("FAIL", file=sys.stderr)
        return 2
