"""Exact and brute-force oracles for the proof quantities at tiny parameters.

Each function turns one step of the hybrid argument into a checkable number:
the commuting-measurement equality, the punctured-key trace distance, the
real-vs-fresh-key distribution identity, and the Helstrom bound on any
adversary's distinguishing advantage. Random-function modes replace the keyed
function with a truly random one so the results reflect information-theoretic
structure only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce

import numpy as np

from . import sim
from .bits import int_to_bits, xor_bits
from .primitives import PhasePrfs, PrfsParams, _keystream, prf_eval
from .sim import PureState, WireRange


@dataclass(frozen=True)
class HybridReport:
    pair: str
    metric: str
    value: float
    params: dict

    def __post_init__(self):
        assert -1e-12 <= self.value <= 1 + 1e-12


@dataclass(frozen=True)
class EnsembleAdvantage:
    scheme: str
    security_param: int
    copies: int
    value: float
    exact: bool
    mode: str


# --- punctured-key trace distance -----------------------------------------


def punctured_key_distance(lam: int, copies: int) -> float:
    """Closed form sqrt(1 - (1 - 2^-lam)^p) for p copies of the punctured key."""
    if copies < 0:
        raise ValueError("copy count must be nonnegative")
    return float(np.sqrt(max(0.0, 1.0 - (1.0 - 2.0**-lam) ** copies)))


def punctured_key_distance_explicit(lam: int, copies: int, prf_output_width: int = 2,
                                    dk_bits: str | None = None,
                                    x_star: str | None = None) -> float:
    """Cross-check path: build the key and its punctured version explicitly.

    Constructs |qpk> = sum_x |x>|f_dk(x)> and the renormalized state with x*
    projected out, tensors p copies of each, and returns their trace distance.
    """
    if copies < 1:
        return 0.0
    dk_bits = dk_bits if dk_bits is not None else "0" * lam
    x_star = x_star if x_star is not None else "0" * lam
    n = prf_output_width
    if copies * (lam + n) > sim.q_max():
        raise sim.CapacityError("explicit tensor construction exceeds qubit capacity")
    base = sim.tensor(sim.uniform_superposition(lam), sim.basis_state(n, "0" * n))
    f = lambda x: prf_eval(dk_bits, x, n)
    qpk = sim.apply_function_oracle(base, f, WireRange(n, lam), WireRange(0, n))
    punctured = sim.puncture(qpk, x_star, WireRange(n, lam))
    full = reduce(sim.tensor, [qpk] * copies)
    full_punct = reduce(sim.tensor, [punctured] * copies)
    return sim.trace_distance(full, full_punct)


# --- commuting-measurement check (measure-first vs measure-last) ----------


def _joint_distribution(state: PureState, labelled_ranges):
    """Exact outcome distribution for measuring the given registers in order.

    `labelled_ranges` is a sequence of (label, WireRange); the result maps
    label-sorted outcome tuples to probabilities so different measurement
    orders are directly comparable.
    """
    dist: dict = {}

    def recurse(st, i, acc, prob):
        if i == len(labelled_ranges):
            key = tuple(sorted(acc))
            dist[key] = dist.get(key, 0.0) + prob
            return
        label, wires = labelled_ranges[i]
        for v in range(1 << wires.width):
            bits = int_to_bits(v, wires.width)
            p, post = sim.project(st, wires, bits)
            if p > 0.0:
                recurse(post, i + 1, acc + [(label, bits)], prob * p)

    recurse(state, 0, [], 1.0)
    return dist


def total_variation(dist_a: dict, dist_b: dict) -> float:
    keys = set(dist_a) | set(dist_b)
    return 0.5 * sum(abs(dist_a.get(k, 0.0) - dist_b.get(k, 0.0)) for k in keys)


def commuting_measurement_check(lam: int, copies: int = 2,
                                dk_bits: str | None = None) -> HybridReport:
    """Measure-before vs measure-after equality for the PRF-based public key.

    Builds |qpk>^(p+1) explicitly (challenger's copy plus p adversary copies)
    and compares the exact joint distribution of all input-register outcomes
    when the challenger measures last versus first. The two orderings must
    coincide; the report carries their total-variation distance.
    """
    if lam > 3:
        raise sim.CapacityError("exhaustive enumeration is limited to lam <= 3")
    dk_bits = dk_bits if dk_bits is not None else "0" * lam
    n = lam
    block = lam + n
    total = block * (copies + 1)
    if total > sim.q_max():
        raise sim.CapacityError("joint state exceeds qubit capacity")
    base = sim.tensor(sim.uniform_superposition(lam), sim.basis_state(n, "0" * n))
    f = lambda x: prf_eval(dk_bits, x, n)
    qpk = sim.apply_function_oracle(base, f, WireRange(n, lam), WireRange(0, n))
    joint = reduce(sim.tensor, [qpk] * (copies + 1))
    # factor 0 (challenger) sits on the highest wires
    ranges = []
    for j in range(copies + 1):
        block_start = total - (j + 1) * block
        label = "challenger" if j == 0 else f"copy{j}"
        ranges.append((label, WireRange(block_start + n, lam)))
    measure_last = _joint_distribution(joint, ranges[1:] + ranges[:1])
    measure_first = _joint_distribution(joint, ranges)
    tv = total_variation(measure_last, measure_first)
    return HybridReport(
        "H0-H1", "total-variation", tv, {"lam": lam, "copies": copies}
    )


# --- real key vs fresh random key -----------------------------------------


def random_key_indistinguishability_check(lam: int, queries: int = 3,
                                          out_width: int = 1,
                                          message: str = "10") -> HybridReport:
    """Exact H(x*)-as-key vs fresh-z-as-key distribution comparison.

    The function is a uniformly random table. The adversary sees the punctured
    key (determined by the table off x*), x*, and the bodies of the oracle
    answers. Enumerates every table, key value, and nonce draw; returns the
    total-variation distance between the two visible-data distributions.
    """
    if lam > 3:
        raise sim.CapacityError("exhaustive enumeration is limited to lam <= 3")
    xs_all = [int_to_bits(v, lam) for v in range(1 << lam)]
    n = out_width
    vals = [int_to_bits(v, n) for v in range(1 << n)]

    def visible_distribution(key_from_table: bool) -> dict:
        dist: dict = {}
        count = 0
        for x_star in xs_all:
            others = [x for x in xs_all if x != x_star]
            for rest in itertools.product(vals, repeat=len(others)):
                for h_star in vals:
                    for z in vals:
                        key = h_star if key_from_table else z
                        for nonces in itertools.product(vals, repeat=queries):
                            bodies = tuple(
                                (r, xor_bits(_keystream(key, r, len(message)), message))
                                for r in nonces
                            )
                            visible = (x_star, rest, bodies)
                            dist[visible] = dist.get(visible, 0.0) + 1.0
                            count += 1
        return {k: v / count for k, v in dist.items()}

    tv = total_variation(visible_distribution(True), visible_distribution(False))
    return HybridReport(
        "H3-H4", "total-variation", tv,
        {"lam": lam, "queries": queries, "out_width": out_width},
    )


# --- Helstrom bound on the distinguishing advantage -----------------------

_DENSITY_QUBIT_CAP = 11


def _helstrom(rho0: np.ndarray, rho1: np.ndarray) -> float:
    eigs = np.linalg.eigvalsh(rho0 - rho1)
    return float(0.5 * np.abs(eigs).sum())


def _prfs_rho(lam, copies, output_qubits, message):
    """Ensemble density matrix for the function-like-state scheme, keyed mode.

    Averages |qpk><qpk|^p (x) |x*><x*| (x) payload(m) exactly over all keys
    and measurement outcomes.
    """
    d, n = lam, output_qubits
    total = copies * (d + n) + d + n
    if total > _DENSITY_QUBIT_CAP:
        raise sim.CapacityError("density-matrix path exceeds capacity")
    dim = 1 << total
    rho = np.zeros((dim, dim), dtype=np.complex128)
    keys = [int_to_bits(v, lam) for v in range(1 << lam)]
    weight = 1.0 / (len(keys) * (1 << d))
    for key in keys:
        prfs = PhasePrfs(PrfsParams(lam, d, n))
        qpk = prfs.oracle_isometry(key, sim.uniform_superposition(d))
        qpk_p = np.array([1.0], dtype=np.complex128)
        for _ in range(copies):
            qpk_p = np.kron(qpk_p, qpk.amplitudes)
        for xv in range(1 << d):
            ex = np.zeros(1 << d, dtype=np.complex128)
            ex[xv] = 1.0
            head = np.kron(qpk_p, ex)
            if message == "0":
                psi = prfs.gen(key, int_to_bits(xv, d))
                vec = np.kron(head, psi.amplitudes)
                rho += weight * np.outer(vec, vec.conj())
            else:
                rho += weight * np.kron(
                    np.outer(head, head.conj()), np.eye(1 << n) / (1 << n)
                )
    return rho


def _prfs_random_rho_pair(lam, output_qubits, copies):
    """Exact ensembles with a truly random phase function, via the parity rule.

    The expectation over the random function of a product of amplitude phases
    is 1 when every queried point appears an even number of times and 0
    otherwise; only those entries survive.
    """
    d, n = lam, output_qubits
    if copies not in (0, 1):
        raise ValueError("random-function mode supports 0 or 1 key copies")
    if copies == 0:
        # no copy: the mixed payload and the averaged pure payload coincide
        return None
    dim = (1 << (d + n)) * (1 << d) * (1 << n)
    w = (2.0 ** -d) * (2.0 ** -(d + n)) * (2.0 ** -n)

    def index(xc, yc, xs, yp):
        return ((xc << n | yc) << d | xs) << n | yp

    rho1 = np.zeros((dim, dim))
    for i in range(dim):
        rho1[i, i] = w  # averaging kills every coherence; fully mixed

    rho0 = np.zeros((dim, dim))
    for xk in range(1 << d):
        for yk in range(1 << n):
            for xb in range(1 << d):
                for yb in range(1 << n):
                    for xs in range(1 << d):
                        for y3 in range(1 << n):
                            for y4 in range(1 << n):
                                points = ((xk, yk), (xb, yb), (xs, y3), (xs, y4))
                                if all(points.count(pt) % 2 == 0 for pt in points):
                                    rho0[index(xk, yk, xs, y3),
                                         index(xb, yb, xs, y4)] = w
    return rho0, rho1


def optimal_advantage(scheme: str, lam: int, copies: int, messages,
                      output_qubits: int = 2, mode: str = "prf",
                      nonce_width: int | None = None) -> EnsembleAdvantage:
    """Helstrom bound: trace distance between the two challenge ensembles.

    The value upper-bounds any adversary's game advantage (win probability
    at most (1 + value) / 2) for an adversary holding `copies` public-key
    copies plus the challenge ciphertext.
    """
    m0, m1 = messages
    if m0 == m1:
        return EnsembleAdvantage(scheme, lam, copies, 0.0, True, mode)
    if scheme == "prfs":
        if mode == "prf":
            if lam > 3:
                raise sim.CapacityError("exact key enumeration is limited to lam <= 3")
            rho0 = _prfs_rho(lam, copies, output_qubits, m0)
            rho1 = _prfs_rho(lam, copies, output_qubits, m1)
            return EnsembleAdvantage(scheme, lam, copies, _helstrom(rho0, rho1), True, mode)
        if mode == "random":
            pair = _prfs_random_rho_pair(lam, output_qubits, copies)
            if pair is None:
                return EnsembleAdvantage(scheme, lam, copies, 0.0, True, mode)
            value = _helstrom(*pair)
            return EnsembleAdvantage(scheme, lam, copies, value, True, mode)
        raise ValueError(f"unknown mode {mode!r}")
    if scheme == "owf":
        if mode == "random":
            if copies != 0:
                raise ValueError("random-function mode for this scheme supports 0 copies")
            # one-time-pad body under a fresh uniform key: enumerate the
            # classical visible data (x*, body) for both messages
            width = len(m0)
            dists = []
            for m in (m0, m1):
                dist: dict = {}
                count = 0
                for xv in range(1 << lam):
                    for zv in range(1 << width):
                        z = int_to_bits(zv, width)
                        visible = (xv, xor_bits(z, m))
                        dist[visible] = dist.get(visible, 0.0) + 1.0
                        count += 1
                dists.append({k: v / count for k, v in dist.items()})
            return EnsembleAdvantage(scheme, lam, copies,
                                     total_variation(*dists), True, mode)
        if mode == "prf":
            return _owf_prf_advantage(lam, copies, m0, m1, output_qubits, nonce_width)
        raise ValueError(f"unknown mode {mode!r}")
    raise ValueError(f"no exact-advantage oracle for scheme {scheme!r}")


def _owf_prf_advantage(lam, copies, m0, m1, prf_output_width, nonce_width):
    """Keyed-mode ensemble bound for the PRF scheme with the stream cipher."""
    n = prf_output_width
    r_width = nonce_width if nonce_width is not None else n
    width = len(m0)
    total = copies * (lam + n) + lam + r_width + width
    if total > _DENSITY_QUBIT_CAP:
        raise sim.CapacityError("density-matrix path exceeds capacity")
    dim = 1 << total

    def build(message):
        rho = np.zeros((dim, dim), dtype=np.complex128)
        keys = [int_to_bits(v, lam) for v in range(1 << lam)]
        weight = 1.0 / (len(keys) * (1 << lam) * (1 << r_width))
        for key in keys:
            base = sim.tensor(sim.uniform_superposition(lam),
                              sim.basis_state(n, "0" * n))
            f = lambda x: prf_eval(key, x, n)
            qpk = sim.apply_function_oracle(base, f, WireRange(n, lam), WireRange(0, n))
            qpk_p = np.array([1.0], dtype=np.complex128)
            for _ in range(copies):
                qpk_p = np.kron(qpk_p, qpk.amplitudes)
            for xv in range(1 << lam):
                x = int_to_bits(xv, lam)
                y = prf_eval(key, x, n)
                for rv in range(1 << r_width):
                    r = int_to_bits(rv, r_width)
                    body = xor_bits(_keystream(y, r, width), message)
                    tail = np.zeros(1 << (lam + r_width + width), dtype=np.complex128)
                    tail[(xv << (r_width + width)) | (rv << width) | int(body, 2)] = 1.0
                    vec = np.kron(qpk_p, tail)
                    rho += weight * np.outer(vec, vec.conj())
        return rho

    value = _helstrom(build(m0), build(m1))
    return EnsembleAdvantage("owf", lam, copies, value, True, "prf")
