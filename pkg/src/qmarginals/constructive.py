"""Direct constructions of bipartite states with prescribed marginals.

Every routine here is non-iterative: given reduced states rho1 and rho2 it
assembles a global state by explicit spectral surgery, with the achieved
rank controlled by the construction. Complementing the solvers, these also
provide good starting points for the rank-capped iteration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensorcore import (
    DensityMatrix,
    SystemDims,
    density_input,
    hermitian_eig,
    hermitize,
    kron,
    numerical_rank,
    swap_bipartite,
)

ZERO_EIG = 1e-12      # eigenvalues at or below this count as exact zeros
TIE_EPS = 1e-12       # spectral ties within this width may chain either way
RADICAND_CLIP = 1e-12
ISOSPECTRAL_TOL = 1e-8


@dataclass(frozen=True)
class IsospectralDecomposition:
    """Splitting rho1 = sum C_i, rho2 = sum C~_i into isospectral PSD pairs.

    Each pair carries the same nonzero spectrum, so it lifts to a pure state
    on the product space; the weights are the pair traces.
    """

    pairs: tuple[tuple[np.ndarray, np.ndarray], ...]
    weights: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.pairs)


def _marginal_pair(rho1, rho2):
    r1 = density_input(rho1, "rho1")
    r2 = density_input(rho2, "rho2")
    return r1, r2, r1.shape[0], r2.shape[0]


def _descending_eig(m):
    values, vectors = hermitian_eig(m)
    return np.where(values > ZERO_EIG, values, 0.0), vectors


def pure_state_from_isospectral(rho1, rho2, tol: float = ISOSPECTRAL_TOL) -> DensityMatrix:
    """Rank-one state with marginals rho1, rho2 (which must be isospectral).

    With rho1 = sum gamma_i x_i x_i* and rho2 = sum gamma_i y_i y_i*, the
    vector w = sum sqrt(gamma_i) (x_i x y_i) satisfies tr_2(ww*) = rho1 and
    tr_1(ww*) = rho2; eigenvalues are paired in descending order.
    """
    r1, r2, n1, n2 = _marginal_pair(rho1, rho2)
    a, u = _descending_eig(r1)
    b, v = _descending_eig(r2)
    ra, rb = numerical_rank(a), numerical_rank(b)
    r = max(ra, rb)
    if ra != rb or np.max(np.abs(a[:r] - b[:r])) > tol:
        raise ValueError(
            "marginals are not isospectral within "
            f"{tol}: spectra {np.round(a[:max(ra, 1)], 6)} vs {np.round(b[:max(rb, 1)], 6)}"
        )
    w = np.zeros(n1 * n2, dtype=complex)
    for i in range(r):
        w += np.sqrt(a[i]) * kron(u[:, i], v[:, i])
    w /= np.linalg.norm(w)
    return DensityMatrix(np.outer(w, w.conj()), SystemDims((n1, n2)))


def rank_k_roots_of_unity(rho1, rho2, k: int) -> DensityMatrix:
    """Rank-k state from k pure components built on k-th roots of unity.

    Admissible k: max(rank rho1, rank rho2) <= k <= rank rho1 + rank rho2 - 1.
    Component i is z_i = (U w_i x V x_i)/sqrt(k) with w_i[j] = omega^(ij) sqrt(a_j);
    averaging the phases over a full period reproduces both marginals while the
    Fourier structure keeps the k components independent.
    """
    r1, r2, n1, n2 = _marginal_pair(rho1, rho2)
    a, u = _descending_eig(r1)
    b, v = _descending_eig(r2)
    ra, rb = numerical_rank(a), numerical_rank(b)
    lo, hi = max(ra, rb), ra + rb - 1
    if not lo <= k <= hi:
        raise ValueError(f"k={k} outside the admissible interval [{lo}, {hi}]")
    m = _roots_component(a, b, k)
    big = kron(u, v)
    return DensityMatrix(hermitize(big @ m @ big.conj().T), SystemDims((n1, n2)))


def _roots_component(a: np.ndarray, b: np.ndarray, k: int) -> np.ndarray:
    # State in the product eigenbasis; a, b descending with zero tails.
    n1, n2 = len(a), len(b)
    omega = np.exp(2j * np.pi / k)
    sa, sb = np.sqrt(np.clip(a, 0.0, None)), np.sqrt(np.clip(b, 0.0, None))
    cols = np.empty((n1 * n2, k), dtype=complex)
    ja, jb = np.arange(n1), np.arange(n2)
    for i in range(k):
        w = omega ** (ja * i) * sa
        x = omega ** (jb * i) * sb
        cols[:, i] = kron(w, x) / np.sqrt(k)
    return hermitize(cols @ cols.conj().T)


def rank_sweep(rho1, rho2, k: int) -> DensityMatrix:
    """A state of numerical rank exactly k for any k up to rank(rho1)*rank(rho2).

    Below rank rho1 + rank rho2 the roots-of-unity construction applies
    directly; beyond it, the smallest eigenvalue of the larger-rank marginal
    is split off as a product block (diagonal slot tensored with the other
    marginal) and the remainder recurses on the reduced, renormalized
    spectrum. The two pieces occupy disjoint slots, so ranks add exactly.
    """
    r1, r2, n1, n2 = _marginal_pair(rho1, rho2)
    a, u = _descending_eig(r1)
    b, v = _descending_eig(r2)
    ra, rb = numerical_rank(a), numerical_rank(b)
    lo, hi = max(ra, rb), ra * rb
    if not lo <= k <= hi:
        raise ValueError(f"k={k} outside the admissible interval [{lo}, {hi}]")
    m = _sweep_component(a, b, k)
    big = kron(u, v)
    return DensityMatrix(hermitize(big @ m @ big.conj().T), SystemDims((n1, n2)))


def _sweep_component(a: np.ndarray, b: np.ndarray, k: int) -> np.ndarray:
    n1, n2 = len(a), len(b)
    ra = int(np.sum(a > ZERO_EIG))
    rb = int(np.sum(b > ZERO_EIG))
    if k <= ra + rb - 1:
        return _roots_component(a, b, k)
    if ra > rb:
        return swap_bipartite(_sweep_component(b, a, k), n2, n1)
    slot = rb - 1
    t = b[slot]
    rest = b.copy()
    rest[slot] = 0.0
    rest /= 1.0 - t
    tau = _sweep_component(a, rest, k - ra)
    e = np.zeros(n2)
    e[slot] = 1.0
    return (1.0 - t) * tau + t * kron(np.diag(a), np.diag(e))


def rank_one_downdate(a, b, tol: float = 1e-10) -> np.ndarray:
    """Vector d with eig(diag(a) - dd^T) = b under interlacing a1>=b1>=a2>=...>=bk>=0.

    Exactly matched entries (a_i == b_i, which interlacing forces whenever
    a has duplicates or zeros) are deflated with d_i = 0; the remaining
    strictly separated entries use the characteristic-polynomial product
    formula. Round-off radicands down to -1e-12 are clipped to zero.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    k = len(a)
    chain = np.empty(2 * k)
    chain[0::2] = a
    chain[1::2] = b
    for i in range(2 * k - 1):
        if chain[i + 1] > chain[i] + tol:
            hi_name = ("a" if i % 2 == 0 else "b") + f"[{i // 2}]"
            lo_name = ("b" if i % 2 == 0 else "a") + f"[{(i + 1) // 2}]"
            raise ValueError(
                f"interlacing violated: {lo_name}={chain[i + 1]} > {hi_name}={chain[i]}"
            )
    if b[-1] < -tol:
        raise ValueError(f"interlacing violated: b[{k - 1}]={b[-1]} < 0")
    d = np.zeros(k)
    scale = max(1.0, float(a[0]) if k else 1.0)
    active = [i for i in range(k) if abs(a[i] - b[i]) > 1e-15 * scale]
    if not active:
        return d
    aa = a[active]
    bb = b[active]
    for t in range(len(active)):
        num = float(np.prod(bb - aa[t]))
        if len(active) > 1:
            others = np.delete(aa, t)
            den = -float(np.prod(others - aa[t]))
            rad = num / den
        else:
            rad = -num
        if rad < 0.0:
            if rad < -RADICAND_CLIP:
                raise ValueError(f"downdate formula produced radicand {rad}; "
                                 "inputs too far from interlacing")
            rad = 0.0
        d[active[t]] = np.sqrt(rad)
    return d


def _alternating_chains(va: np.ndarray, vb: np.ndarray):
    """Partition the positive entries of two descending spectra into chains.

    A chain starts at the largest value still unassigned and alternates
    sides greedily, each step taking the largest remaining value on the
    opposite side that does not exceed the last one taken. Chains starting
    on the a side are interlacings a>=b>=a>=..., chains starting on the b
    side the reverse; values whose chain never completes a pair are
    leftovers. Ties within TIE_EPS chain up rather than split, so
    numerically isospectral inputs collapse into a single chain.
    """
    avail_a = [(float(va[s]), s) for s in range(len(va)) if va[s] > ZERO_EIG]
    avail_b = [(float(vb[s]), s) for s in range(len(vb)) if vb[s] > ZERO_EIG]
    chains: list[tuple[str, list[int], list[int]]] = []
    left_a: list[int] = []
    left_b: list[int] = []

    def take_le(avail, cur):
        for idx, (val, _slot) in enumerate(avail):
            if val <= cur + TIE_EPS:
                return avail.pop(idx)
        return None

    while avail_a or avail_b:
        head_a = avail_a[0][0] if avail_a else -np.inf
        head_b = avail_b[0][0] if avail_b else -np.inf
        start_a = head_a >= head_b - TIE_EPS
        first, second = (avail_a, avail_b) if start_a else (avail_b, avail_a)
        a_slots: list[int] = []
        b_slots: list[int] = []
        cur = np.inf
        while True:
            lead = take_le(first, cur)
            if lead is None:
                break
            mate = take_le(second, lead[0])
            if mate is None:
                first.append(lead)
                first.sort(key=lambda t: (-t[0], t[1]))
                break
            if start_a:
                a_slots.append(lead[1])
                b_slots.append(mate[1])
            else:
                b_slots.append(lead[1])
                a_slots.append(mate[1])
            cur = mate[0]
        if a_slots:
            chains.append(("S" if start_a else "T", a_slots, b_slots))
        else:
            _val, slot = first.pop(0)
            (left_a if start_a else left_b).append(slot)
    return chains, left_a, left_b


def _pair_pure_vector(c: np.ndarray, ct: np.ndarray, n1: int, n2: int) -> np.ndarray:
    wc, uc = _descending_eig(c)
    wt, vt = _descending_eig(ct)
    w = np.zeros(n1 * n2, dtype=complex)
    cut = ZERO_EIG * max(1.0, float(wc[0]))
    for j in range(min(n1, n2)):
        weight = (wc[j] + wt[j]) / 2
        if weight > cut:
            w += np.sqrt(weight) * kron(uc[:, j], vt[:, j])
    return w


def _assemble(pairs, n1: int, n2: int):
    rho = np.zeros((n1 * n2, n1 * n2), dtype=complex)
    for c, ct in pairs:
        w = _pair_pure_vector(c, ct, n1, n2)
        rho += np.outer(w, w.conj())
    decomposition = IsospectralDecomposition(
        pairs=tuple((c.copy(), ct.copy()) for c, ct in pairs),
        weights=tuple(float(np.trace(c).real) for c, _ in pairs),
    )
    return DensityMatrix(hermitize(rho), SystemDims((n1, n2))), decomposition


def interlace_decomposition(rho1, rho2):
    """Split the marginals into isospectral pairs by interlacing downdates.

    Each sweep diagonalizes the running remainders, extracts alternating
    chains from the merged spectra, and removes one isospectral pair: on a
    chain's dominant side the interlaced sub-block is downdated by a rank-one
    vector so its eigenvalues match the other side's, whose values transfer
    unchanged. The downdate residues and unpaired values form the next
    remainders. At most max(rank rho1, rank rho2) pairs are produced; the
    assembled state is the sum of the pairs' lifted pure states.
    """
    r1, r2, n1, n2 = _marginal_pair(rho1, rho2)
    a_rem = r1.copy()
    b_rem = r2.copy()
    pairs = []
    for _ in range(4 * (n1 + n2)):
        va, ua = _descending_eig(a_rem)
        vb, vbv = _descending_eig(b_rem)
        if va.sum() <= ZERO_EIG and vb.sum() <= ZERO_EIG:
            break
        chains, left_a, left_b = _alternating_chains(va, vb)
        if not chains:
            raise RuntimeError("decomposition stalled: no chains on nonzero remainders")
        ca = np.zeros((n1, n1))
        cb = np.zeros((n2, n2))
        rem_a = np.zeros((n1, n1))
        rem_b = np.zeros((n2, n2))
        for kind, a_slots, b_slots in chains:
            if kind == "S":
                x = rank_one_downdate(va[a_slots], vb[b_slots])
                ca[np.ix_(a_slots, a_slots)] = np.diag(va[a_slots]) - np.outer(x, x)
                rem_a[np.ix_(a_slots, a_slots)] = np.outer(x, x)
                cb[b_slots, b_slots] = vb[b_slots]
            else:
                y = rank_one_downdate(vb[b_slots], va[a_slots])
                cb[np.ix_(b_slots, b_slots)] = np.diag(vb[b_slots]) - np.outer(y, y)
                rem_b[np.ix_(b_slots, b_slots)] = np.outer(y, y)
                ca[a_slots, a_slots] = va[a_slots]
        for s in left_a:
            rem_a[s, s] = va[s]
        for s in left_b:
            rem_b[s, s] = vb[s]
        pairs.append((
            hermitize(ua @ ca @ ua.conj().T),
            hermitize(vbv @ cb @ vbv.conj().T),
        ))
        a_rem = hermitize(ua @ rem_a @ ua.conj().T)
        b_rem = hermitize(vbv @ rem_b @ vbv.conj().T)
    else:
        raise RuntimeError("interlace decomposition failed to terminate")
    return _assemble(pairs, n1, n2)


def _greedy_rounds(r1, r2, n1, n2):
    va, ua = _descending_eig(r1)
    vb, vbv = _descending_eig(r2)
    a = va.copy()
    b = vb.copy()
    m = min(n1, n2)
    pairs = []
    vectors = []
    for _ in range(n1 + n2):
        if a.sum() <= 1e-14 and b.sum() <= 1e-14:
            break
        # stable sort keeps ties in original slot order
        sa = np.argsort(-a, kind="stable")
        sb = np.argsort(-b, kind="stable")
        c = np.minimum(a[sa[:m]], b[sb[:m]])
        if c.sum() <= 1e-14:
            break
        ca = np.zeros((n1, n1))
        cb = np.zeros((n2, n2))
        w = np.zeros(n1 * n2, dtype=complex)
        for jj in range(m):
            if c[jj] <= 0.0:
                continue
            ca[sa[jj], sa[jj]] = c[jj]
            cb[sb[jj], sb[jj]] = c[jj]
            w += np.sqrt(c[jj]) * kron(ua[:, sa[jj]], vbv[:, sb[jj]])
        # subtracting the exact minimum zeroes one side of each match
        a[sa[:m]] -= c
        b[sb[:m]] -= c
        pairs.append((
            hermitize(ua @ ca @ ua.conj().T),
            hermitize(vbv @ cb @ vbv.conj().T),
        ))
        vectors.append(w)
    return pairs, vectors


def greedy_minmatch(rho1, rho2):
    """Greedy min-matching decomposition; maximizes the spectral norm.

    Working in the fixed eigenbases of the marginals, each round matches the
    current spectra slot-by-slot in descending order and removes the
    entrywise minimum from both sides. The lifted pure vectors of the rounds
    are mutually orthogonal, so the output eigenvalues are exactly the round
    traces, the first of which is sum_j min(a_j, b_j): the largest spectral
    norm attainable for the given marginals.
    """
    r1, r2, n1, n2 = _marginal_pair(rho1, rho2)
    pairs, vectors = _greedy_rounds(r1, r2, n1, n2)
    rho = np.zeros((n1 * n2, n1 * n2), dtype=complex)
    for w in vectors:
        rho += np.outer(w, w.conj())
    decomposition = IsospectralDecomposition(
        pairs=tuple(pairs),
        weights=tuple(float(np.trace(c).real) for c, _ in pairs),
    )
    return DensityMatrix(hermitize(rho), SystemDims((n1, n2))), decomposition


def greedy_component_vectors(rho1, rho2) -> list[np.ndarray]:
    """The orthogonal pure vectors underlying greedy_minmatch."""
    r1, r2, n1, n2 = _marginal_pair(rho1, rho2)
    return _greedy_rounds(r1, r2, n1, n2)[1]
