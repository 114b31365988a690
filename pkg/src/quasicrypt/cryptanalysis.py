"""Chosen-ciphertext and chosen-plaintext key recovery against the stream ciphers.

The attacker only talks to an :class:`Oracle`, a device that encrypts or
decrypts whole messages under a hidden key and counts the calls.

Decryption oracle (CCA). Past the leader positions, plain symbol ``u_t`` is
``B(v_{t-n+1}, ..., v_t)`` where B is the last-argument inverse of A. Every
window of ``n`` consecutive cipher symbols therefore reveals one entry of B.
One query holding a de Bruijn sequence of order n covers all ``q**n``
windows: 1 query, ``q**n + n - 1`` symbols.

Encryption oracle (CPA). Here ``v_t = A(v_{t-n+1}, ..., v_{t-1}, u_t)``.
The attacker picks only ``u_t``; the first ``n-1`` arguments are previous
cipher output. A message is a walk on the de Bruijn graph whose states are
the last ``n-1`` cipher symbols. Each unknown table entry is an unexplored
edge. The attack extends its plaintext one unexplored edge per query and
moves between states along edges it already knows. When every out-edge
reachable from the current state is known, that reachable set is closed in
a strongly connected graph and so covers everything. One message therefore
always suffices and the query count is exactly ``q**n``.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .algebra import OperationTable, QuasigroupKey, Translation, inverse_op, is_quasigroup, translation_of
from .cipher import decrypt_block, decrypt_nary_stream, encrypt_nary_stream
from .orthogonality import OrthogonalSystem, TuplePermutation, inverse_system, system_from_permutation


class AttackError(RuntimeError):
    """The device answered inconsistently or the recovered table is invalid."""


ENCRYPT = "encrypt"
DECRYPT = "decrypt"


@dataclass
class Oracle:
    direction: str
    _device: Callable[[list[int]], list[int]] = field(repr=False)
    queries: int = 0
    symbols: int = 0
    transcript: list = field(default_factory=list, repr=False)
    record: bool = False

    def query(self, message: Sequence[int]) -> list[int]:
        message = list(message)
        self.queries += 1
        self.symbols += len(message)
        response = list(self._device(message))
        if self.record:
            self.transcript.append((self.direction, tuple(message), tuple(response)))
        return response

    def transcript_text(self) -> str:
        return "".join(
            f"{d}\t{' '.join(map(str, i))}\t{' '.join(map(str, o))}\n" for d, i, o in self.transcript
        )


def decryption_oracle(key: OperationTable, leaders, record: bool = False) -> Oracle:
    inverse = inverse_op(key, key.arity)
    return Oracle(DECRYPT, lambda m: decrypt_nary_stream(key, leaders, m, inverse=inverse)[0],
                  record=record)


def encryption_oracle(key: OperationTable, leaders, record: bool = False) -> Oracle:
    key = QuasigroupKey.from_table(key)
    return Oracle(ENCRYPT, lambda m: encrypt_nary_stream(key, leaders, m)[0], record=record)


def block_decryption_oracle(system: OrthogonalSystem, record: bool = False) -> Oracle:
    inverse = inverse_system(system)
    return Oracle(DECRYPT, lambda m: decrypt_block(system, m, inverse), record=record)


@dataclass(frozen=True)
class RecoveredKey:
    table: QuasigroupKey
    inverse: QuasigroupKey
    query_count: int
    symbols_submitted: int
    leader_translations: tuple[Translation, ...] | None = None


def de_bruijn(q: int, n: int) -> list[int]:
    """Cyclic de Bruijn sequence B(q, n), length ``q**n`` (FKM algorithm)."""
    a = [0] * (q * n)
    seq: list[int] = []

    def db(t, p):
        if t > n:
            if n % p == 0:
                seq.extend(a[1:p + 1])
        else:
            a[t] = a[t - p]
            db(t + 1, p)
            for j in range(a[t - p] + 1, q):
                a[t] = j
                db(t + 1, t)

    db(1, 1)
    return seq


def cca_query_bound(q: int, n: int) -> tuple[int, int]:
    """(queries, symbols) spent by :func:`cca_recover`."""
    return 1, q ** n + n - 1


def _finish(inverse_values, q, n, queries, symbols) -> RecoveredKey:
    if any(v is None for v in inverse_values):
        raise AttackError("table not fully covered")
    inverse = OperationTable(n, q, tuple(inverse_values))
    if not is_quasigroup(inverse):
        raise AttackError("recovered table is not a quasigroup; device is non-conforming")
    inverse = QuasigroupKey.from_table(inverse)
    return RecoveredKey(inverse_op(inverse, n), inverse, queries, symbols)


def _store(cells, rank, value):
    old = cells[rank]
    if old is not None and old != value:
        raise AttackError(f"inconsistent answers for cell {rank}: {old} vs {value}")
    cells[rank] = value


def cca_recover(oracle: Oracle, q: int, n: int) -> RecoveredKey:
    start_q, start_s = oracle.queries, oracle.symbols
    seq = de_bruijn(q, n)
    cipher = seq + seq[:n - 1]  # linearised: every n-window appears once
    plain = oracle.query(cipher)
    if len(plain) != len(cipher):
        raise AttackError("oracle changed the message length")
    cells: list[int | None] = [None] * (q ** n)
    for t in range(n - 1, len(cipher)):
        r = 0
        for x in cipher[t - n + 1:t + 1]:
            r = r * q + x
        _store(cells, r, plain[t])
    return _finish(cells, q, n, oracle.queries - start_q, oracle.symbols - start_s)


def cpa_recover(oracle: Oracle, q: int, n: int) -> RecoveredKey:
    start_q, start_s = oracle.queries, oracle.symbols
    cells: list[int | None] = [None] * (q ** n)
    untried: dict[tuple, list[int]] = {
        s: list(range(q)) for s in itertools.product(range(q), repeat=n - 1)
    }

    def rank(state, u):
        r = 0
        for x in state:
            r = r * q + x
        return r * q + u

    def path_to_unexplored(state):
        """Inputs leading along known edges to a state with an untried input."""
        seen = {state}
        todo = deque([(state, [])])
        while todo:
            s, path = todo.popleft()
            if untried[s]:
                return s, path
            for u in range(q):
                v = cells[rank(s, u)]
                nxt = (s + (v,))[1:]
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append((nxt, path + [u]))
        return None, None

    # the first query already explores input 0 from the state the leaders produce
    plain = [0] * n
    cipher = oracle.query(plain)
    if len(cipher) != n:
        raise AttackError("oracle changed the message length")
    state = tuple(cipher[:n - 1])
    untried[state].remove(0)
    _store(cells, rank(state, 0), cipher[n - 1])
    state = tuple(cipher[1:])
    while True:
        target, path = path_to_unexplored(state)
        if target is None:
            break
        u = untried[target].pop(0)
        plain = plain + path + [u]
        cipher = oracle.query(plain)
        if len(cipher) != len(plain):
            raise AttackError("oracle changed the message length")
        # replay the walk over the newly observed suffix
        s = state
        for i in range(len(plain) - len(path) - 1, len(plain)):
            _store(cells, rank(s, plain[i]), cipher[i])
            s = (s + (cipher[i],))[1:]
        if s != tuple(cipher[len(cipher) - (n - 1):]):
            raise AttackError("walk diverged from oracle output")
        state = s
    return _finish_forward(cells, q, n, oracle.queries - start_q, oracle.symbols - start_s)


def _finish_forward(cells, q, n, queries, symbols) -> RecoveredKey:
    if any(v is None for v in cells):
        raise AttackError("table not fully covered")
    table = OperationTable(n, q, tuple(cells))
    if not is_quasigroup(table):
        raise AttackError("recovered table is not a quasigroup; device is non-conforming")
    table = QuasigroupKey.from_table(table)
    return RecoveredKey(table, inverse_op(table, n), queries, symbols)


def equivalent_prefixes(table: OperationTable, mapping: Sequence[int]) -> list[tuple[int, ...]]:
    """All (n-1)-prefixes whose translation equals ``mapping``."""
    mapping = tuple(mapping)
    return [p for p in itertools.product(range(table.q), repeat=table.arity - 1)
            if translation_of(table, p).mapping == mapping]


def leader_classes(table: OperationTable) -> list[list[tuple[int, ...]]]:
    """Partition of all prefixes by the translation they induce."""
    classes: dict[tuple[int, ...], list] = {}
    for p in itertools.product(range(table.q), repeat=table.arity - 1):
        classes.setdefault(translation_of(table, p).mapping, []).append(p)
    return list(classes.values())


def recover_leader_translations(oracle: Oracle, recovered: RecoveredKey) -> list[Translation]:
    """Learn the translations applied at the ``n-1`` leader positions.

    Query ``x`` repeated ``n-1`` times for every symbol x; answer j is the
    preimage of x under translation j. Each translation is labelled with the
    first prefix of the recovered table that induces it.
    """
    q, n = recovered.table.q, recovered.table.arity
    maps = [[None] * q for _ in range(n - 1)]
    for x in range(q):
        answer = oracle.query([x] * (n - 1))
        for j, u in enumerate(answer):
            if maps[j][u] is not None:
                raise AttackError("leader translation is not a bijection")
            maps[j][u] = x
    out = []
    for m in maps:
        prefixes = equivalent_prefixes(recovered.table, m)
        if not prefixes:
            raise AttackError("leader translation matches no prefix of the recovered table")
        out.append(Translation(prefixes[0], tuple(m)))
    return out


def break_ciphertext(recovered: RecoveredKey, translations: Sequence[Translation],
                     cipher: Sequence[int]) -> list[int]:
    """Decrypt with recovered material only; no leaders needed."""
    q, n = recovered.table.q, recovered.table.arity
    inv = recovered.inverse.values
    cipher = list(cipher)
    plain = []
    for t, v in enumerate(cipher):
        if t < n - 1:
            plain.append(translations[t].inverse()[v])
        else:
            r = 0
            for x in cipher[t - n + 1:t + 1]:
                r = r * q + x
            plain.append(inv[r])
    return plain


def break_end_to_end(oracle: Oracle, q: int, n: int, intercepted: Sequence[int]):
    """Full CCA: table, leader translations, then the intercepted message."""
    recovered = cca_recover(oracle, q, n)
    translations = recover_leader_translations(oracle, recovered)
    recovered = RecoveredKey(recovered.table, recovered.inverse, oracle.queries,
                             oracle.symbols, tuple(translations))
    return break_ciphertext(recovered, translations, intercepted), recovered


def recover_block_inverse(oracle: Oracle, q: int, n: int) -> OrthogonalSystem:
    """Tabulate a single-round block decryption device on all ``q**n`` blocks."""
    image = [0] * (q ** n)
    for r, block in enumerate(itertools.product(range(q), repeat=n)):
        out = oracle.query(block)
        s = 0
        for x in out:
            s = s * q + x
        image[r] = s
    try:
        perm = TuplePermutation(q, n, tuple(image))
    except ValueError:
        raise AttackError("block device is not a bijection") from None
    return system_from_permutation(perm)
