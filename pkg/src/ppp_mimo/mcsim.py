"""Monte Carlo ground truth: Poisson interferer fields and per-scheme SINRs.

Two samplers are provided per scheme.  The "direct" path draws explicit
channel matrices for every interferer and evaluates the SINR definitions
verbatim; it is the reference implementation used by the law checks.  The
"fast" path samples the same SINR distribution through exact conditional
reductions (projections of i.i.d. Gaussian matrices onto a fixed unit vector
are i.i.d. Gaussian; the space-time interference weight given the desired
channel is a known Gaussian quadratic form), which is what makes the large
validation grids affordable.  The two paths are cross-checked in the tests.

Reproducibility: all draws come from counter-keyed Philox streams derived
from (seed, stream tag, chunk index).  Chunk boundaries are fixed functions
of the configuration, estimates aggregate integer success counts, and chunks
may therefore run in parallel without changing any result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import DomainError, SingularChannelError
from .schemes import GammaLawParams, NetworkParams, OstbcCode, SchemeSpec, gamma_params

#: condition-number guard for the ZF pseudo-inverse
ZF_CONDITION_LIMIT = 1e12

#: target flat interferer-array length used to pick deterministic chunk sizes
_CHUNK_BUDGET = 1 << 22


@dataclass(frozen=True)
class SimConfig:
    """Trial budget, seed and truncation control for a simulation run."""

    trials: int
    seed: int
    truncation_tol: float = 1e-3
    max_radius_override: Optional[float] = None
    compensate_far_field: bool = True

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must fit in 64 unsigned bits")
        if not 0.0 < self.truncation_tol <= 0.1:
            raise DomainError(
                f"truncation_tol must sit in (0, 0.1], got {self.truncation_tol}"
            )


@dataclass(frozen=True)
class SimEstimate:
    """A Monte Carlo point estimate with its binomial standard error."""

    value: float
    std_error: float
    trials: int
    seed: int
    redrawn: int = 0


class Field(NamedTuple):
    """One realization of the interferer marks: positions (k, 2), channels (k, N, M)."""

    positions: np.ndarray
    channels: np.ndarray

    @property
    def distances(self) -> np.ndarray:
        return np.hypot(self.positions[:, 0], self.positions[:, 1])


def _stream(seed: int, tag: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(tag, chunk)))
    )


def _chunk_size(mean_count: float) -> int:
    return int(min(8192, max(256, _CHUNK_BUDGET // max(1, int(mean_count)))))


def truncation_radius(net: NetworkParams, glp: GammaLawParams, tol: float) -> float:
    """Simulation radius such that the mean interference from beyond it is
    at most tol times the mean total from the link distance outward.

    Both means scale with the same mark moment, so the radius depends only on
    the geometry: R = r_tr * tol^(-1/(alpha-2)).
    """
    if not 0.0 < tol <= 0.1:
        raise DomainError(f"tol must sit in (0, 0.1], got {tol}")
    return net.r_tr * tol ** (-1.0 / (net.alpha - 2.0))


def far_field_mean_power(net: NetworkParams, mark_mean: float, radius: float) -> float:
    """Mean aggregate interference power from transmitters beyond the radius."""
    return (
        2.0 * math.pi * net.intensity * net.p * mark_mean
        * radius ** (2.0 - net.alpha) / (net.alpha - 2.0)
    )


def _sim_radius(net: NetworkParams, cfg: SimConfig) -> float:
    if cfg.max_radius_override is not None:
        return cfg.max_radius_override
    return truncation_radius(net, None, cfg.truncation_tol)


def sample_field(
    net: NetworkParams, radius: float, rng: np.random.Generator, n_rx: int, n_tx: int
) -> Field:
    """Draw one Poisson field of intensity intensity*p on a disc with i.i.d.
    unit-variance complex Gaussian channel matrices."""
    count = rng.poisson(net.intensity * net.p * math.pi * radius ** 2)
    r = radius * np.sqrt(rng.random(count))
    phi = rng.random(count) * 2.0 * math.pi
    positions = np.column_stack([r * np.cos(phi), r * np.sin(phi)])
    channels = _cn_matrix(rng, (count, n_rx, n_tx))
    return Field(positions, channels)


def _cn_matrix(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * math.sqrt(0.5)


# ---------------------------------------------------------------------------
# per-trial exact SINRs
# ---------------------------------------------------------------------------

def sinr_mrc(
    h0: np.ndarray, field: Field, net: NetworkParams, stream: int,
    extra_interference: float = 0.0,
) -> float:
    """Matched-filter SINR of one stream: project everything onto that
    stream's own channel column."""
    n_rx, m_tx = h0.shape
    if not 1 <= stream <= m_tx:
        raise DomainError(f"stream must sit in 1..{m_tx}, got {stream}")
    col = h0[:, stream - 1]
    norm2 = float(np.real(np.vdot(col, col)))
    unit = col / math.sqrt(norm2)
    scale = net.rho / m_tx
    signal = scale / net.r_tr ** net.alpha * norm2
    self_i = 0.0
    if m_tx > 1:
        others = np.delete(h0, stream - 1, axis=1)
        self_i = scale / net.r_tr ** net.alpha * float(
            np.sum(np.abs(unit.conj() @ others) ** 2)
        )
    multi = 0.0
    if field.positions.shape[0]:
        proj = np.sum(np.abs(np.einsum("n,knm->km", unit.conj(), field.channels)) ** 2, axis=1)
        multi = scale * float(np.sum(field.distances ** (-net.alpha) * proj))
    return signal / (self_i + multi + extra_interference + 1.0)


def _zf_pinv_row(h0: np.ndarray, stream: int):
    gram = h0.conj().T @ h0
    if np.linalg.cond(gram) > ZF_CONDITION_LIMIT:
        raise SingularChannelError("channel Gram matrix beyond condition guard")
    inv_gram = np.linalg.inv(gram)
    row = inv_gram[stream - 1] @ h0.conj().T
    return row, float(np.real(inv_gram[stream - 1, stream - 1]))


def sinr_zf(
    h0: np.ndarray, field: Field, net: NetworkParams, stream: int,
    extra_interference: float = 0.0,
) -> float:
    """Zero-forcing SINR of one stream: the pseudo-inverse row cancels the
    own transmitter's other streams and is applied to every interferer."""
    n_rx, m_tx = h0.shape
    if m_tx > n_rx:
        raise DomainError(f"ZF needs M <= N, got M={m_tx}, N={n_rx}")
    if not 1 <= stream <= m_tx:
        raise DomainError(f"stream must sit in 1..{m_tx}, got {stream}")
    row, inv_kk = _zf_pinv_row(h0, stream)
    scale = net.rho / m_tx
    signal = scale / (net.r_tr ** net.alpha * inv_kk)
    multi = 0.0
    if field.positions.shape[0]:
        quad = np.sum(np.abs(np.einsum("n,knm->km", row, field.channels)) ** 2, axis=1)
        multi = scale * float(np.sum(field.distances ** (-net.alpha) * quad)) / inv_kk
    return signal / (multi + extra_interference + 1.0)


def sinr_ostbc(
    code: OstbcCode, h0: np.ndarray, field: Field, net: NetworkParams, symbol: int,
    extra_interference: float = 0.0,
) -> float:
    """Space-time decode SINR with the symbol-averaged interference weight
    of each interferer."""
    if not 1 <= symbol <= code.n_symbols:
        raise DomainError(f"symbol must sit in 1..{code.n_symbols}, got {symbol}")
    rate = float(code.rate)
    frob2 = float(np.sum(np.abs(h0) ** 2))
    scale = net.rho / (rate * code.M)
    signal = scale / net.r_tr ** net.alpha * frob2
    multi = 0.0
    if field.positions.shape[0]:
        weights = np.empty(field.positions.shape[0])
        for i in range(field.positions.shape[0]):
            cross = h0.conj().T @ field.channels[i]
            w, z = code.cross_coefficients(cross, symbol)
            weights[i] = (np.abs(w) ** 2 + np.abs(z) ** 2).sum() / frob2
        multi = scale * float(np.sum(field.distances ** (-net.alpha) * weights))
    return signal / (multi + extra_interference + 1.0)


# ---------------------------------------------------------------------------
# space-time interference weight: exact conditional law given h0
# ---------------------------------------------------------------------------

def _wz_basis_blocks(code: OstbcCode, symbol: int) -> np.ndarray:
    """Real-linear map from the cross matrix h0^H h to the stacked
    (Re W, Im W, Re Z, Im Z) vector, cached per (code, symbol)."""
    cache = getattr(code, "_wz_block_cache", None)
    if cache is None:
        cache = {}
        code._wz_block_cache = cache
    if symbol in cache:
        return cache[symbol]
    m = code.M
    t = np.empty((4 * code.n_symbols, 2 * m * m))
    basis = np.zeros((m, m), dtype=complex)
    for j in range(m):
        for part in range(2):
            for i in range(m):
                basis[i, j] = 1.0 if part == 0 else 1.0j
                w, z = code.cross_coefficients(basis, symbol)
                t[:, j * 2 * m + part * m + i] = np.concatenate(
                    [w.real, w.imag, z.real, z.imag]
                )
                basis[i, j] = 0.0
    cache[symbol] = t
    return t


def interference_weight_spectrum(code: OstbcCode, h0: np.ndarray, symbol: int) -> np.ndarray:
    """Mixture weights w_i such that the normalized interference weight of a
    fresh interferer, conditioned on h0, is distributed as sum_i w_i * Z_i^2
    with Z_i i.i.d. standard normal."""
    m = code.M
    t = _wz_basis_blocks(code, symbol)
    gram = h0.conj().T @ h0
    half = 0.5 * np.block(
        [[gram.real, -gram.imag], [gram.imag, gram.real]]
    )
    cov = np.zeros((t.shape[0], t.shape[0]))
    for j in range(m):
        tj = t[:, j * 2 * m : (j + 1) * 2 * m]
        cov += tj @ half @ tj.T
    eig = np.linalg.eigvalsh(cov)
    frob2 = float(np.sum(np.abs(h0) ** 2))
    return np.clip(eig, 0.0, None) / frob2


def sample_interference_weights(
    code: OstbcCode, n_rx: int, draws: int, seed: int, symbol: int = 1
) -> np.ndarray:
    """Draw normalized interference weights (fresh h0 and interferer per draw).

    Uses the exact conditional mixture representation; used for distribution
    tests of the gamma approximation.
    """
    rng = _stream(seed, 7, 0)
    out = np.empty(draws)
    for i in range(draws):
        h0 = _cn_matrix(rng, (n_rx, code.M))
        w = interference_weight_spectrum(code, h0, symbol)
        z = rng.standard_normal(w.size)
        out[i] = float(w @ (z * z))
    return out


# ---------------------------------------------------------------------------
# outage estimation
# ---------------------------------------------------------------------------

def simulate_outage(
    scheme: SchemeSpec, net: NetworkParams, cfg: SimConfig,
    method: str = "fast", stream: int = 1,
) -> SimEstimate:
    """Empirical outage probability Pr(SINR <= beta) at the configured beta."""
    return simulate_outage_curve(scheme, net, [net.beta], cfg, method, stream)[0]


def simulate_outage_curve(
    scheme: SchemeSpec, net: NetworkParams, betas, cfg: SimConfig,
    method: str = "fast", stream: int = 1,
) -> list:
    """Empirical outage at several thresholds from one set of SINR draws.

    The draws do not depend on beta, so a whole threshold sweep costs one
    simulation; estimates across betas share randomness.
    """
    betas = [float(b) for b in betas]
    if method == "fast":
        counts, redrawn = _outage_counts_fast(scheme, net, betas, cfg)
    elif method == "direct":
        counts, redrawn = _outage_counts_direct(scheme, net, betas, cfg, stream)
    else:
        raise DomainError(f"method must be 'fast' or 'direct', got {method!r}")
    out = []
    for c in counts:
        frac = c / cfg.trials
        out.append(
            SimEstimate(
                value=frac,
                std_error=math.sqrt(frac * (1.0 - frac) / cfg.trials),
                trials=cfg.trials,
                seed=cfg.seed,
                redrawn=redrawn,
            )
        )
    return out


def _outage_counts_fast(scheme, net, betas, cfg):
    glp = gamma_params(scheme, net)
    radius = _sim_radius(net, cfg)
    mean_count = net.intensity * net.p * math.pi * radius ** 2
    chunk = _chunk_size(mean_count)
    comp = 0.0
    if cfg.compensate_far_field:
        comp = far_field_mean_power(net, glp.n * glp.omega, radius)
    counts = np.zeros(len(betas), dtype=np.int64)
    sorted_idx = np.argsort(betas)
    sorted_betas = np.asarray(betas)[sorted_idx]
    if scheme.variant == "ostbc":
        spectrum_kwargs = dict(code=scheme.code, n_rx=scheme.N)
    done = 0
    chunk_index = 0
    while done < cfg.trials:
        size = min(chunk, cfg.trials - done)
        rng = _stream(cfg.seed, 0, chunk_index)
        if scheme.variant == "ostbc":
            sinr = _fast_chunk_ostbc(scheme, net, glp, radius, mean_count, comp, size, rng)
        else:
            sinr = _fast_chunk_sm(scheme, net, glp, radius, mean_count, comp, size, rng)
        sinr.sort()
        counts += np.searchsorted(sinr, sorted_betas, side="right")[np.argsort(sorted_idx)]
        done += size
        chunk_index += 1
    return counts, 0


def _poisson_field_powers(net, radius, mean_count, size, rng):
    """Counts and flat r^-alpha factors for one chunk of trials."""
    counts = rng.poisson(mean_count, size)
    total = int(counts.sum())
    if total == 0:
        return counts, np.empty(0), np.empty(0, dtype=np.int64)
    u = rng.random(total)
    rpow = radius ** (-net.alpha) * u ** (-0.5 * net.alpha)
    owner = np.repeat(np.arange(size), counts)
    return counts, rpow, owner


def _fast_chunk_sm(scheme, net, glp, radius, mean_count, comp, size, rng):
    signal = glp.theta * rng.standard_gamma(glp.m, size)
    self_i = (
        glp.upsilon * rng.standard_gamma(glp.u, size) if glp.u is not None else 0.0
    )
    counts, rpow, owner = _poisson_field_powers(net, radius, mean_count, size, rng)
    interf = np.zeros(size)
    if rpow.size:
        marks = glp.omega * rng.standard_gamma(glp.n, rpow.size)
        interf = np.bincount(owner, weights=rpow * marks, minlength=size)
    return signal / (self_i + interf + comp + 1.0)


def _fast_chunk_ostbc(scheme, net, glp, radius, mean_count, comp_unit, size, rng):
    code = scheme.code
    n_rx = scheme.N
    rate = float(code.rate)
    scale = net.rho / (rate * code.M)
    n_mix = 4 * code.n_symbols
    spectra = np.empty((size, n_mix))
    frob2 = np.empty(size)
    for i in range(size):
        h0 = _cn_matrix(rng, (n_rx, code.M))
        frob2[i] = float(np.sum(np.abs(h0) ** 2))
        spectra[i] = interference_weight_spectrum(code, h0, 1)
    signal = scale / net.r_tr ** net.alpha * frob2
    counts, rpow, owner = _poisson_field_powers(net, radius, mean_count, size, rng)
    interf = np.zeros(size)
    if rpow.size:
        z2 = rng.standard_normal((rpow.size, n_mix)) ** 2
        k_marks = np.einsum("ij,ij->i", z2, spectra[owner])
        interf = np.bincount(owner, weights=rpow * k_marks, minlength=size) * scale
    comp = 0.0
    if comp_unit:
        # conditional mean weight given h0 is the spectrum sum
        comp = comp_unit / (glp.n * glp.omega) * scale * spectra.sum(axis=1)
    return signal / (interf + comp + 1.0)


def _outage_counts_direct(scheme, net, betas, cfg, stream):
    radius = _sim_radius(net, cfg)
    comp = 0.0
    glp = gamma_params(scheme, net)
    if cfg.compensate_far_field:
        comp = far_field_mean_power(net, glp.n * glp.omega, radius)
    counts = np.zeros(len(betas), dtype=np.int64)
    redrawn = 0
    for trial in range(cfg.trials):
        rng = _stream(cfg.seed, 1, trial)
        for attempt in range(100):
            h0 = _cn_matrix(rng, (scheme.N, scheme.M))
            field = sample_field(net, radius, rng, scheme.N, scheme.M)
            try:
                if scheme.variant == "sm-mrc":
                    val = sinr_mrc(h0, field, net, stream, comp)
                elif scheme.variant == "sm-zf":
                    val = sinr_zf(h0, field, net, stream, comp)
                else:
                    val = sinr_ostbc(scheme.code, h0, field, net, stream, comp)
                break
            except SingularChannelError:
                redrawn += 1
        else:
            raise SingularChannelError("persistent singular channels; check inputs")
        for i, b in enumerate(betas):
            if val <= b:
                counts[i] += 1
    return counts, redrawn


# ---------------------------------------------------------------------------
# coordinated-access lattice protocol
# ---------------------------------------------------------------------------

def simulate_ca(
    intensity: float, r_gz: float, net: NetworkParams, cfg: SimConfig
) -> SimEstimate:
    """Empirical throughput of the guard-zone TDMA protocol.

    Receivers sit at the centers of a square lattice of side 2*r_gz; each
    occupied square schedules one of its Poisson transmitters uniformly at
    random, the typical square transmits only the typical pair's signal from
    distance r_tr, and all links are single-antenna Rayleigh.  The estimate
    is the scheduled density times the empirical success probability.
    """
    if not r_gz > 0:
        raise DomainError(f"r_gz must be positive, got {r_gz}")
    radius = max(_sim_radius(net, cfg), 8.0 * r_gz)
    lam_ca = -math.expm1(-4.0 * intensity * r_gz ** 2) / (4.0 * r_gz ** 2)
    comp = 0.0
    if cfg.compensate_far_field:
        comp = (
            2.0 * math.pi * lam_ca * net.rho
            * radius ** (2.0 - net.alpha) / (net.alpha - 2.0)
        )
    mean_count = intensity * math.pi * radius ** 2
    chunk = _chunk_size(mean_count)
    n_cells = int(math.ceil(radius / (2.0 * r_gz))) + 1
    cell_span = 2 * n_cells + 1
    successes = 0
    done = 0
    chunk_index = 0
    while done < cfg.trials:
        size = min(chunk, cfg.trials - done)
        rng = _stream(cfg.seed, 2, chunk_index)
        counts = rng.poisson(mean_count, size)
        total = int(counts.sum())
        u = rng.random(total)
        r = radius * np.sqrt(u)
        phi = rng.random(total) * 2.0 * math.pi
        x = r * np.cos(phi)
        y = r * np.sin(phi)
        owner = np.repeat(np.arange(size), counts)
        ix = np.rint(x / (2.0 * r_gz)).astype(np.int64)
        iy = np.rint(y / (2.0 * r_gz)).astype(np.int64)
        keep = (ix != 0) | (iy != 0)  # the typical square never interferes
        cell = (ix + n_cells) * cell_span + (iy + n_cells)
        key = owner * (cell_span * cell_span) + cell
        perm = rng.permutation(total)
        perm = perm[keep[perm]]
        _, first = np.unique(key[perm], return_index=True)
        chosen = perm[first]
        fading = rng.exponential(size=chosen.size)
        dist = np.hypot(x[chosen], y[chosen])
        contrib = net.rho * dist ** (-net.alpha) * fading
        interf = np.bincount(owner[chosen], weights=contrib, minlength=size)
        signal = net.rho / net.r_tr ** net.alpha * rng.exponential(size=size)
        successes += int(np.count_nonzero(signal / (interf + comp + 1.0) > net.beta))
        done += size
        chunk_index += 1
    frac = successes / cfg.trials
    return SimEstimate(
        value=lam_ca * frac,
        std_error=lam_ca * math.sqrt(frac * (1.0 - frac) / cfg.trials),
        trials=cfg.trials,
        seed=cfg.seed,
    )
