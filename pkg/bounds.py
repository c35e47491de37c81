"""Closed-form lower bounds and Weyl asymptotics for Dirichlet poly-Laplacian eigenvalues.

Every bound is a function of (n, l, V, I, k). Powers such as (B_n V)^(2l/n) and
k^(2l/n) are accumulated in log space so that large n and l do not overflow.
"""
import logging
import math
from dataclasses import dataclass

from geometry import inertia_floor, log_unit_ball_volume

logger = logging.getLogger(__name__)

AVERAGE = "average_of_first_k"
INDIVIDUAL = "individual_kth"
ASYMPTOTIC = "asymptotic"

# Domains that tile space, where Polya's bound is a theorem
TILING_KINDS = ("interval", "box")

LOG_TWO_PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class BoundInputs:
    n: int
    l: int
    V: float
    I: float
    k: int

    def __post_init__(self):
        for name in ("n", "l", "k"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value}")
        if not self.V > 0:
            raise ValueError(f"V must be positive, got {self.V}")
        if not self.I > 0:
            raise ValueError(f"I must be positive, got {self.I}")
        if not self.inertia_admissible:
            logger.warning(
                f"I={self.I:.6g} is below the rearrangement floor {inertia_floor(self.n, self.V):.6g} "
                f"for n={self.n}, V={self.V:.6g}; no domain has this geometry"
            )

    @property
    def inertia_admissible(self):
        return self.I >= inertia_floor(self.n, self.V) * (1.0 - 1e-12)

    def scaled(self, c):
        """Inputs of the dilated domain c * Omega."""
        return BoundInputs(self.n, self.l, self.V * c ** self.n, self.I * c ** (self.n + 2), self.k)


@dataclass(frozen=True)
class BoundValue:
    value: float
    kind: str
    conjectural: bool = False

    def __post_init__(self):
        if not self.value >= 0:
            raise ValueError(f"bound value must be nonnegative, got {self.value}")

    def __float__(self):
        return self.value


def _log_weyl(inputs, order):
    """log of (2 pi)^(2 order) / (B_n V)^(2 order / n) * k^(2 order / n)"""
    n = inputs.n
    log_bv = log_unit_ball_volume(n) + math.log(inputs.V)
    return 2 * order * LOG_TWO_PI + (2.0 * order / n) * (math.log(inputs.k) - log_bv)


def _log_rising(n, p, step=2.0):
    """log of n (n + 2) ... (n + 2p - 2), exactly p factors"""
    return math.fsum(math.log(n + step * i) for i in range(p))


def asymptotic_leading(inputs, average=False):
    """Leading Weyl term for lambda_k, or for the mean of the first k when average is set."""
    value = math.exp(_log_weyl(inputs, inputs.l))
    if average:
        value *= inputs.n / (inputs.n + 2.0 * inputs.l)
    return BoundValue(value, ASYMPTOTIC)


def classical_average_bound(inputs):
    """Berezin-Li-Yau / Levine-Protter bound on the mean of the first k eigenvalues"""
    n, l = inputs.n, inputs.l
    return BoundValue(n / (n + 2.0 * l) * math.exp(_log_weyl(inputs, l)), AVERAGE)


def individual_bound(inputs):
    """Bound on lambda_k itself; the same right-hand side as the average bound."""
    return BoundValue(classical_average_bound(inputs).value, INDIVIDUAL)


def _require_membrane(inputs, name):
    if inputs.l != 1:
        raise ValueError(f"{name} is defined for l=1 only, got l={inputs.l}")


def polya_tiling_bound(inputs):
    """Polya's bound lambda_k >= 4 pi^2 k^(2/n) / (B_n V)^(2/n).

    Proven for tiling domains and conjectural otherwise, so the value is flagged.
    """
    _require_membrane(inputs, "polya_tiling_bound")
    return BoundValue(math.exp(_log_weyl(inputs, 1)), INDIVIDUAL, conjectural=True)


def melas_average(inputs):
    _require_membrane(inputs, "melas_average")
    n = inputs.n
    correction = inputs.V / inputs.I / (24.0 * (n + 2))
    return BoundValue(classical_average_bound(inputs).value + correction, AVERAGE)


def _correction_terms(inputs):
    n, l = inputs.n, inputs.l
    log_ratio = math.log(inputs.V) - math.log(inputs.I)
    terms = []
    for p in range(1, l + 1):
        log_term = (
            math.log(l + 1 - p)
            - p * math.log(24.0)
            - _log_rising(n, p)
            + _log_weyl(inputs, l - p)
            + p * log_ratio
        )
        terms.append(math.exp(log_term))
    return terms


def theorem1_correction(inputs):
    """The l lower-order terms added to the Levine-Protter bound."""
    n, l = inputs.n, inputs.l
    return n / (n + 2.0 * l) * math.fsum(_correction_terms(inputs))


def theorem1_average(inputs):
    """Lower bound on the mean of the first k eigenvalues with l lower-order V/I corrections."""
    n, l = inputs.n, inputs.l
    leading = math.exp(_log_weyl(inputs, l))
    total = math.fsum([leading] + _correction_terms(inputs))
    return BoundValue(n / (n + 2.0 * l) * total, AVERAGE)


def gamma_constant(n):
    """B_n^(4/n) / (2 pi)^2, which stays below 1/2 for every n"""
    return math.exp(4.0 / n * log_unit_ball_volume(n) - 2 * LOG_TWO_PI)


def evaluate_all(inputs):
    """Every bound applicable to the inputs, keyed by name."""
    values = {
        "theorem1": theorem1_average(inputs).value,
        "classical": classical_average_bound(inputs).value,
        "individual": individual_bound(inputs).value,
        "asymptotic": asymptotic_leading(inputs, average=True).value,
        "asymptotic_individual": asymptotic_leading(inputs).value,
    }
    if inputs.l == 1:
        values["melas"] = melas_average(inputs).value
        values["polya"] = polya_tiling_bound(inputs).value
    return values


def conjectural_bounds(inputs, kind=None):
    """Names of the bounds in evaluate_all that are only conjectured for this domain kind."""
    if inputs.l != 1 or kind in TILING_KINDS:
        return []
    return ["polya"] if polya_tiling_bound(inputs).conjectural else []
