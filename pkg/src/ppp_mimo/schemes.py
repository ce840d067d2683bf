"""Transmission schemes, orthogonal space-time block codes and their gamma laws.

A code is an M x tau grid of cells, each either empty or carrying
(symbol index, conjugated?, sign).  Everything the analysis needs is derived
from that grid: the rate N_s/tau, the per-symbol interference count, the
dispersion matrices and the matched-filter decode.  Codes are validated
numerically at construction (orthogonality and the decode identity), so a
user-supplied grid that is not a proper orthogonal design is rejected up
front rather than producing quietly wrong statistics.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import DomainError

_CELL_RE = re.compile(r"^([+-]?)(\d+)(\*?)$")

# tuple (symbol q >= 1, conjugated, sign +-1); None for an empty cell
Cell = Optional[tuple]


@dataclass(frozen=True)
class NetworkParams:
    """Physical-layer and MAC parameters shared by formulas and simulators.

    intensity : node density (nodes per m^2)
    p         : ALOHA transmit probability
    alpha     : path-loss exponent, > 2
    r_tr      : transmitter-receiver distance (m)
    rho       : transmit SNR, linear
    beta      : SINR operating threshold, linear
    """

    intensity: float
    p: float
    alpha: float
    r_tr: float
    rho: float
    beta: float

    def __post_init__(self):
        if self.intensity < 0:
            raise DomainError(f"intensity must be >= 0, got {self.intensity}")
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"p must be in [0, 1], got {self.p}")
        if not self.alpha > 2.0:
            raise DomainError(f"alpha must exceed 2, got {self.alpha}")
        if not self.r_tr > 0:
            raise DomainError(f"r_tr must be positive, got {self.r_tr}")
        if not self.rho > 0:
            raise DomainError(f"rho must be positive, got {self.rho}")
        if not self.beta > 0:
            raise DomainError(f"beta must be positive, got {self.beta}")

    def replace(self, **kw) -> "NetworkParams":
        d = dict(
            intensity=self.intensity, p=self.p, alpha=self.alpha,
            r_tr=self.r_tr, rho=self.rho, beta=self.beta,
        )
        d.update(kw)
        return NetworkParams(**d)


@dataclass(frozen=True)
class GammaLawParams:
    """Gamma-law triple (signal, multi-node interference, self-interference).

    Signal power ~ Gamma(m, theta), each interferer's effective power
    ~ Gamma(n, omega), optional self-interference ~ Gamma(u, upsilon)
    (u is None when there is none).  zeta is the number of symbols a node
    delivers per channel use.
    """

    m: int
    theta: float
    n: float
    omega: float
    zeta: float
    u: Optional[int] = None
    upsilon: Optional[float] = None

    def __post_init__(self):
        if self.m < 1:
            raise DomainError(f"signal shape m must be >= 1, got {self.m}")
        if not (self.theta > 0 and self.omega > 0 and self.n > 0):
            raise DomainError("scales and interference shape must be positive")
        if (self.u is None) != (self.upsilon is None):
            raise DomainError("u and upsilon must be given together")
        if self.u is not None and self.u < 1:
            raise DomainError("self-interference shape must be >= 1 when present")


def _parse_cell(token: str) -> Cell:
    token = token.strip()
    if token == "0":
        return None
    m = _CELL_RE.match(token)
    if not m:
        raise DomainError(f"unparseable code cell {token!r}")
    sign = -1 if m.group(1) == "-" else 1
    q = int(m.group(2))
    if q < 1:
        raise DomainError(f"symbol index must be >= 1 in cell {token!r}")
    return (q, m.group(3) == "*", sign)


def _cell_str(cell: Cell) -> str:
    if cell is None:
        return "0"
    q, conj, sign = cell
    return f"{'-' if sign < 0 else ''}{q}{'*' if conj else ''}"


class OstbcCode:
    """An orthogonal space-time block code over M antennas and tau slots."""

    #: numeric tolerance for the construction-time orthogonality/decode checks
    CHECK_TOL = 1e-12

    def __init__(self, cells, name: str = "user"):
        cells = tuple(tuple(row) for row in cells)
        if not cells or not cells[0]:
            raise DomainError("code grid must be non-empty")
        tau = len(cells[0])
        if any(len(row) != tau for row in cells):
            raise DomainError("code grid rows must have equal length")
        self.cells = cells
        self.name = name
        self.M = len(cells)
        self.tau = tau
        symbols = sorted({c[0] for row in cells for c in row if c is not None})
        if not symbols or symbols != list(range(1, len(symbols) + 1)):
            raise DomainError("symbol indices must cover 1..N_s with no gaps")
        self.n_symbols = len(symbols)

        # dispersion matrices: a_mats[q] holds the unconjugated entries of
        # symbol q+1, b_mats[q] the conjugated ones
        a_mats = np.zeros((self.n_symbols, self.M, tau))
        b_mats = np.zeros((self.n_symbols, self.M, tau))
        for i, row in enumerate(cells):
            for j, cell in enumerate(row):
                if cell is None:
                    continue
                q, conj, sign = cell
                (b_mats if conj else a_mats)[q - 1, i, j] = sign
        a_mats.setflags(write=False)
        b_mats.setflags(write=False)
        self.a_mats = a_mats
        self.b_mats = b_mats
        self._validate_numerically()

    # -- derived quantities -------------------------------------------------

    @property
    def rate(self) -> Fraction:
        return Fraction(self.n_symbols, self.tau)

    def n_interf(self, k: int) -> int:
        """Nonzero cells in the columns that carry symbol k (plain or conjugated)."""
        if not 1 <= k <= self.n_symbols:
            raise DomainError(f"symbol index {k} outside 1..{self.n_symbols}")
        cols = {
            j for row in self.cells for j, cell in enumerate(row)
            if cell is not None and cell[0] == k
        }
        return sum(
            1 for row in self.cells for j, cell in enumerate(row)
            if cell is not None and j in cols
        )

    def n_interf_uniform(self) -> int:
        """The common interference count, requiring it not to depend on k."""
        values = {self.n_interf(k) for k in range(1, self.n_symbols + 1)}
        if len(values) != 1:
            raise DomainError(
                f"code {self.name!r} has per-symbol interference counts "
                f"{sorted(values)}; pick one explicitly to build gamma laws"
            )
        return values.pop()

    def codeword(self, symbols) -> np.ndarray:
        """Assemble the M x tau codeword for a symbol vector."""
        symbols = np.asarray(symbols)
        if symbols.shape != (self.n_symbols,):
            raise DomainError(f"expected {self.n_symbols} symbols")
        return np.einsum("q,qmt->mt", symbols, self.a_mats) + np.einsum(
            "q,qmt->mt", symbols.conj(), self.b_mats
        )

    # -- decode --------------------------------------------------------------

    def decode(self, h0: np.ndarray, received: np.ndarray, k: int) -> complex:
        """Matched-filter estimate of symbol k from an N x tau received block.

        For the interference-free block h0 @ codeword(x) this returns
        ||h0||_F^2 * x_k exactly (enforced at construction time).
        """
        g = h0.conj().T @ received
        return complex(
            np.vdot(self.a_mats[k - 1], g) + np.vdot(self.b_mats[k - 1], g.conj())
        )

    def cross_coefficients(self, cross: np.ndarray, k: int):
        """Coefficients (W_q, Z_q) of x_q and conj(x_q) in the decode of symbol k,
        for a received block C @ codeword(x) with cross = h0^H h_interferer."""
        ak, bk = self.a_mats[k - 1], self.b_mats[k - 1]
        cc = cross.conj()
        w = np.empty(self.n_symbols, dtype=complex)
        z = np.empty(self.n_symbols, dtype=complex)
        for q in range(self.n_symbols):
            w[q] = np.vdot(ak, cross @ self.a_mats[q]) + np.vdot(bk, cc @ self.b_mats[q].conj())
            z[q] = np.vdot(ak, cross @ self.b_mats[q]) + np.vdot(bk, cc @ self.a_mats[q].conj())
        return w, z

    # -- validation ----------------------------------------------------------

    def _validate_numerically(self):
        rng = np.random.default_rng(0x5743)
        x = rng.standard_normal(self.n_symbols) + 1j * rng.standard_normal(self.n_symbols)
        cw = self.codeword(x)
        gram = cw @ cw.conj().T
        target = float(np.sum(np.abs(x) ** 2)) * np.eye(self.M)
        scale = max(1.0, float(np.abs(gram).max()))
        if np.abs(gram - target).max() > self.CHECK_TOL * scale:
            raise DomainError(f"code {self.name!r} is not orthogonal")
        n_rx = self.M + 1
        h0 = (rng.standard_normal((n_rx, self.M)) + 1j * rng.standard_normal((n_rx, self.M))) / np.sqrt(2)
        frob2 = float(np.sum(np.abs(h0) ** 2))
        clean = h0 @ cw
        for k in range(1, self.n_symbols + 1):
            est = self.decode(h0, clean, k)
            if abs(est - frob2 * x[k - 1]) > self.CHECK_TOL * frob2 * max(1.0, abs(x[k - 1])):
                raise DomainError(f"code {self.name!r} fails the decode identity at k={k}")

    # -- serialization --------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(
            {
                "name": self.name,
                "M": self.M,
                "tau": self.tau,
                "n_symbols": self.n_symbols,
                "grid": [[_cell_str(c) for c in row] for row in self.cells],
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "OstbcCode":
        doc = json.loads(text)
        code = cls(
            [[_parse_cell(tok) for tok in row] for row in doc["grid"]],
            name=doc.get("name", "user"),
        )
        for field in ("M", "tau", "n_symbols"):
            if field in doc and doc[field] != getattr(code, field):
                raise DomainError(
                    f"declared {field}={doc[field]} disagrees with grid ({getattr(code, field)})"
                )
        return code

    def __repr__(self):
        return f"OstbcCode({self.name!r}, M={self.M}, tau={self.tau}, N_s={self.n_symbols})"


def _grid(rows):
    return [[_parse_cell(tok) for tok in row.split()] for row in rows]


def alamouti() -> OstbcCode:
    return OstbcCode(_grid(["1 -2*", "2 1*"]), name="alamouti")


def g4_rate34() -> OstbcCode:
    return OstbcCode(
        _grid(["1 -2* 3* 0", "2 1* 0 3*", "3 0 -1* -2*", "0 3 2 -1"]),
        name="g4_rate34",
    )


def g3_rate34() -> OstbcCode:
    return OstbcCode(
        _grid(["1 0 2 -3", "0 1 3* 2*", "-2* -3 1* 0"]),
        name="g3_rate34",
    )


def d4_rate12() -> OstbcCode:
    return OstbcCode(
        _grid(["1 -2* 0 0", "2 1* 0 0", "0 0 1 -2*", "0 0 2 1*"]),
        name="d4_rate12",
    )


def cyclic(m: int) -> OstbcCode:
    """One symbol per codeword, hopping across the M antennas; R = 1/M."""
    if m < 1:
        raise DomainError(f"cyclic code needs M >= 1, got {m}")
    rows = [["0"] * m for _ in range(m)]
    for i in range(m):
        rows[i][i] = "1"
    return OstbcCode(_grid(" ".join(r) for r in rows), name=f"cyclic{m}")


_REGISTRY = {
    "alamouti": alamouti,
    "g4_rate34": g4_rate34,
    "g3_rate34": g3_rate34,
    "d4_rate12": d4_rate12,
}


def registry_code(name: str) -> OstbcCode:
    """Look up a built-in code: alamouti, g4_rate34, g3_rate34, d4_rate12, cyclic<M>."""
    if name in _REGISTRY:
        return _REGISTRY[name]()
    m = re.fullmatch(r"cyclic(\d+)", name)
    if m:
        return cyclic(int(m.group(1)))
    raise DomainError(f"unknown code {name!r}; known: {sorted(_REGISTRY)} and cyclic<M>")


VARIANTS = ("sm-mrc", "sm-zf", "ostbc")


@dataclass(frozen=True)
class SchemeSpec:
    """Which transmission scheme is analyzed."""

    variant: str
    M: int
    N: int
    code: Optional[OstbcCode] = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise DomainError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if not 1 <= self.M <= self.N:
            raise DomainError(f"need 1 <= M <= N, got M={self.M}, N={self.N}")
        if self.variant == "ostbc":
            if self.code is None:
                raise DomainError("ostbc scheme needs a code")
            if self.code.M != self.M:
                raise DomainError(
                    f"code uses {self.code.M} antennas but scheme says M={self.M}"
                )
        elif self.code is not None:
            raise DomainError("only the ostbc variant carries a code")

    @classmethod
    def sm_mrc(cls, m: int, n: int) -> "SchemeSpec":
        return cls("sm-mrc", m, n)

    @classmethod
    def sm_zf(cls, m: int, n: int) -> "SchemeSpec":
        return cls("sm-zf", m, n)

    @classmethod
    def ostbc(cls, code: OstbcCode, n: int) -> "SchemeSpec":
        return cls("ostbc", code.M, n, code)

    def label(self) -> str:
        if self.variant == "ostbc":
            return f"ostbc:{self.code.name}:N{self.N}"
        return f"{self.variant}:M{self.M}:N{self.N}"


def decode_coefficients(code: OstbcCode, h0: np.ndarray, h_interf: np.ndarray, k: int):
    """Coefficients of each interfering symbol in the decode of symbol k.

    Probes the decode by linearity: send x_q = 1 and x_q = 1j with all other
    symbols zero through the interferer channel and split the response into
    the coefficient W_q of x_q and Z_q of conj(x_q).
    """
    h0 = np.asarray(h0, dtype=complex)
    h_interf = np.asarray(h_interf, dtype=complex)
    if h0.shape != h_interf.shape:
        raise DomainError(f"channel shapes differ: {h0.shape} vs {h_interf.shape}")
    if h0.shape[1] != code.M:
        raise DomainError(f"channels must have {code.M} columns for this code")
    out = []
    for q in range(1, code.n_symbols + 1):
        probe = np.zeros(code.n_symbols, dtype=complex)
        probe[q - 1] = 1.0
        d_re = code.decode(h0, h_interf @ code.codeword(probe), k)
        probe[q - 1] = 1.0j
        d_im = code.decode(h0, h_interf @ code.codeword(probe), k)
        w = (d_re - 1j * d_im) / 2.0
        z = (d_re + 1j * d_im) / 2.0
        out.append((w, z))
    return out


def interference_weight(code: OstbcCode, h0: np.ndarray, h_interf: np.ndarray, k: int) -> float:
    """Symbol-averaged interference power of one interferer, normalized by ||h0||_F^2."""
    cross = h0.conj().T @ h_interf
    w, z = code.cross_coefficients(cross, k)
    frob2 = float(np.sum(np.abs(h0) ** 2))
    return float((np.abs(w) ** 2 + np.abs(z) ** 2).sum() / frob2)


def gamma_params(scheme: SchemeSpec, net: NetworkParams) -> GammaLawParams:
    """Gamma-law parameters of signal / interference / self-interference.

    MRC keeps all N receive degrees of freedom on the signal and eats the
    self-interference of the other M-1 streams; ZF spends M-1 of them
    canceling it; a space-time block code pools the full M*N diversity but
    transmits only R symbols per channel use.
    """
    m_tx, n_rx, rho, r_a = scheme.M, scheme.N, net.rho, net.r_tr ** net.alpha
    if scheme.variant == "sm-mrc":
        u = m_tx - 1
        return GammaLawParams(
            m=n_rx,
            theta=rho / (m_tx * r_a),
            n=float(m_tx),
            omega=rho / m_tx,
            zeta=float(m_tx),
            u=None if u == 0 else u,
            upsilon=None if u == 0 else rho / (m_tx * r_a),
        )
    if scheme.variant == "sm-zf":
        return GammaLawParams(
            m=n_rx - m_tx + 1,
            theta=rho / (m_tx * r_a),
            n=float(m_tx),
            omega=rho / m_tx,
            zeta=float(m_tx),
        )
    code = scheme.code
    rate = float(code.rate)
    n_i = code.n_interf_uniform()
    return GammaLawParams(
        m=m_tx * n_rx,
        theta=rho / (rate * m_tx * r_a),
        n=n_i / m_tx,
        omega=rho / (rate * m_tx),
        zeta=rate,
    )
