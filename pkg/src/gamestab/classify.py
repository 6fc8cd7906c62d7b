"""Nash and stability classification of fixed points, spectral bound regions and certificates."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .decomposition import (
    compress_batch,
    rotated_block_form,
    split_potential_rotational,
)
from .errors import NotAFixedPointError, StructureError
from .game import (
    Game,
    GameJacobian,
    LearningConfig,
    as_vector,
    eval_gradient_field,
    jacobian_at,
    lam_diagonal,
)
from .qnr import sample_unit_pairs
from .spectral import (
    HURWITZ_TOL,
    eigenvalues,
    is_hurwitz,
    spectral_norm,
    spectral_radius,
    stability_label,
)

STRUCTURE_RTOL = 1e-9
DEFINITE_TOL = 1e-9
FIXED_POINT_TOL = 1e-8


def default_tau_grid(n: int = 25, lo: float = 1e-4, hi: float = 1e4) -> np.ndarray:
    return np.logspace(np.log10(lo), np.log10(hi), n)


@dataclass(frozen=True)
class LambdaSummary:
    lam1_minus: float
    lam1_plus: float
    lam2_minus: float
    lam2_plus: float
    lam_minus: float
    lam_plus: float
    lam_under: float
    lam_over: float


def lambda_summary(J: GameJacobian) -> LambdaSummary:
    s1 = np.linalg.eigvalsh(J.J11)
    s2 = np.linalg.eigvalsh(J.J22)
    l1m, l1p, l2m, l2p = (float(v) for v in (s1[0], s1[-1], s2[0], s2[-1]))
    return LambdaSummary(
        lam1_minus=l1m,
        lam1_plus=l1p,
        lam2_minus=l2m,
        lam2_plus=l2p,
        lam_minus=min(l1m, l2m),
        lam_plus=max(l1p, l2p),
        lam_under=0.5 * (l1m + l2m),
        lam_over=0.5 * (l1p + l2p),
    )


def nash_status(J: GameJacobian, tol: float = DEFINITE_TOL) -> str:
    """``"nash"``, ``"degenerate"`` (a Hessian is only semidefinite) or ``"not_nash"``."""
    top = max(np.linalg.eigvalsh(J.J11)[-1], np.linalg.eigvalsh(J.J22)[-1])
    if top < -tol:
        return "nash"
    if top <= tol:
        return "degenerate"
    return "not_nash"


def check_differential_nash(J: GameJacobian, tol: float = DEFINITE_TOL) -> bool:
    """Both individual Hessians positive definite, i.e. ``J11 < 0`` and ``J22 < 0``."""
    return nash_status(J, tol) == "nash"


def structure_tolerance(J: GameJacobian) -> float:
    return STRUCTURE_RTOL * (1.0 + spectral_norm(J.full))


def is_zero_sum(J: GameJacobian) -> bool:
    return spectral_norm(split_potential_rotational(J).P) <= structure_tolerance(J)


def is_potential(J: GameJacobian) -> bool:
    return spectral_norm(split_potential_rotational(J).Z) <= structure_tolerance(J)


def detect_structure(J: GameJacobian) -> str:
    """``"zero_sum"``, ``"potential"`` or ``"general"``.

    A decoupled game (``J12 = J21 = 0``) is both; it is reported as zero-sum
    and still receives the potential-game bounds.
    """
    if is_zero_sum(J):
        return "zero_sum"
    if is_potential(J):
        return "potential"
    return "general"


def _separation(lam: LambdaSummary) -> Optional[float]:
    if lam.lam2_plus < lam.lam1_minus:
        return lam.lam1_minus - lam.lam2_plus
    if lam.lam1_plus < lam.lam2_minus:
        return lam.lam2_minus - lam.lam1_plus
    return None


@dataclass(frozen=True)
class ZeroSumBounds:
    """Enclosure of the spectrum of a zero-sum game Jacobian.

    Real eigenvalues lie in ``real_interval``; non-real ones have real part
    in ``[re_min, re_max]`` and ``|Im| <= im_max``. When the Hessian spectra
    are separated by ``delta``, ``all_real`` tells which of the two refined
    statements applies and ``im_max_refined`` is the sharper imaginary bound.
    """

    real_interval: tuple
    re_min: float
    re_max: float
    im_max: float
    delta: Optional[float]
    all_real: Optional[bool]
    im_max_refined: Optional[float]


def zero_sum_bounds(J: GameJacobian) -> ZeroSumBounds:
    split = split_potential_rotational(J)
    p_norm = spectral_norm(split.P)
    if p_norm > structure_tolerance(J):
        raise StructureError(f"Jacobian is not zero-sum (||P|| = {p_norm:.3e})", p_norm)
    lam = lambda_summary(J)
    z = spectral_norm(split.Z)
    delta = _separation(lam)
    all_real = refined = None
    if delta is not None:
        all_real = z <= delta / 2
        refined = 0.0 if all_real else math.sqrt(z * z - delta * delta / 4)
    return ZeroSumBounds(
        real_interval=(lam.lam_minus, lam.lam_plus),
        re_min=lam.lam_under,
        re_max=lam.lam_over,
        im_max=z,
        delta=delta,
        all_real=all_real,
        im_max_refined=refined,
    )


def _delta_pm(p_norm: float, gap: float) -> float:
    if p_norm == 0.0:
        return 0.0
    # coincident block extremes: arctan(inf) = pi/2, so delta = ||P|| tan(pi/4)
    angle = math.pi / 2 if gap == 0.0 else math.atan(2 * p_norm / gap)
    return p_norm * math.tan(0.5 * angle)


@dataclass(frozen=True)
class PotentialBounds:
    """Real enclosure of the spectrum of a potential game Jacobian.

    ``min spec J`` lies in ``min_interval`` and ``max spec J`` in
    ``max_interval``; ``gap`` is an open interval free of eigenvalues when
    the block spectra are separated.
    """

    delta_minus: float
    delta_plus: float
    outer: tuple
    min_interval: tuple
    max_interval: tuple
    gap: Optional[tuple]


def potential_bounds(J: GameJacobian) -> PotentialBounds:
    split = split_potential_rotational(J)
    z_norm = spectral_norm(split.Z)
    if z_norm > structure_tolerance(J):
        raise StructureError(f"Jacobian is not potential (||Z|| = {z_norm:.3e})", z_norm)
    lam = lambda_summary(J)
    p = spectral_norm(split.P)
    dm = _delta_pm(p, abs(lam.lam1_minus - lam.lam2_minus))
    dp = _delta_pm(p, abs(lam.lam1_plus - lam.lam2_plus))
    gap = None
    if lam.lam2_plus < lam.lam1_minus:
        gap = (lam.lam2_plus, lam.lam1_minus)
    elif lam.lam1_plus < lam.lam2_minus:
        gap = (lam.lam1_plus, lam.lam2_minus)
    return PotentialBounds(
        delta_minus=dm,
        delta_plus=dp,
        outer=(lam.lam_minus - dm, lam.lam_plus + dp),
        min_interval=(lam.lam_minus - dm, lam.lam_minus),
        max_interval=(lam.lam_plus, lam.lam_plus + dp),
        gap=gap,
    )


@dataclass
class Certificate:
    name: str
    holds: bool
    applicable: bool = True
    witness: dict = field(default_factory=dict)


def zero_sum_robustness(J: GameJacobian, tol: float = DEFINITE_TOL, samples: int = 256,
                        seed: int = 0, taus=None) -> Certificate:
    """Stability of ``Lambda J`` for every ``tau > 0`` at a zero-sum differential Nash point.

    The witness spot-checks the trace/determinant signs of the scaled 2x2
    compressions ``[[a, z], [-tau conj(z), tau d]]`` on sampled ``(v, w, tau)``.
    """
    split = split_potential_rotational(J)
    p_norm = spectral_norm(split.P)
    if p_norm > structure_tolerance(J):
        return Certificate("zero_sum_robustness", False, False,
                           {"reason": "not zero-sum", "p_norm": p_norm})
    nash = check_differential_nash(J, tol)
    taus = default_tau_grid() if taus is None else np.asarray(taus, dtype=float)
    V, W = sample_unit_pairs(J.d1, J.d2, samples, seed)
    a, b, _, d = compress_batch(J, V, W)
    a, d = a.real, d.real
    z_sq = np.abs(b) ** 2
    trace = a[:, None] + taus[None, :] * d[:, None]
    det = taus[None, :] * (a * d + z_sq)[:, None]
    return Certificate("zero_sum_robustness", nash, True, {
        "differential_nash": nash,
        "samples": samples,
        "seed": seed,
        "max_trace": float(trace.max()),
        "min_det": float(det.min()),
        "trace_negative": bool(np.all(trace < 0)),
        "det_positive": bool(np.all(det > 0)),
    })


def potential_robustness(J: GameJacobian, tol: float = DEFINITE_TOL) -> Certificate:
    """Stability of ``Lambda J`` for every ``tau > 0`` at a potential differential Nash point.

    Holds when ``lam1_plus * lam2_plus > max spec(P^T P)``: the weakest
    curvature of each player must dominate the strongest coupling, which is
    what makes ``a d > |p|^2`` for every compression. The product of the
    strongest curvatures, ``lam1_minus * lam2_minus``, is reported in the
    witness for comparison but is not sufficient on its own.
    """
    split = split_potential_rotational(J)
    z_norm = spectral_norm(split.Z)
    if z_norm > structure_tolerance(J):
        return Certificate("potential_robustness", False, False,
                           {"reason": "not potential", "z_norm": z_norm})
    lam = lambda_summary(J)
    nash = check_differential_nash(J, tol)
    coupling = float(np.linalg.eigvalsh(split.P.T @ split.P)[-1])
    weakest = lam.lam1_plus * lam.lam2_plus
    strongest = lam.lam1_minus * lam.lam2_minus
    holds = nash and weakest > coupling + tol
    return Certificate("potential_robustness", bool(holds), True, {
        "differential_nash": nash,
        "coupling_sq": coupling,
        "weakest_curvature_product": weakest,
        "strongest_curvature_product": strongest,
    })


def instability_certificate(J) -> Certificate:
    """Sufficient condition for ``spec J`` to leave the open left half-plane.

    With the symmetric part rotated into ``blockdiag(M+, M-)``, instability
    follows from ``||Z2|| < (|max M-| + min M+)/2 < min M+``.
    """
    M = J.full if isinstance(J, GameJacobian) else np.asarray(J, dtype=float)
    form = rotated_block_form(M)
    if form.k == 0:
        return Certificate("instability", False, False,
                           {"reason": "symmetric part has no positive eigenvalue", "k": 0})
    if form.k == form.d:
        return Certificate("positive_definite_symmetric_part", True, True,
                           {"k": form.k, "min_positive": form.min_positive})
    z2 = spectral_norm(form.Z2)
    lo = form.min_positive
    hi = form.max_nonpositive
    mid = 0.5 * (abs(hi) + abs(lo))
    holds = z2 < mid < abs(lo)
    return Certificate("instability", bool(holds), True, {
        "k": form.k,
        "z2_norm": z2,
        "min_positive": lo,
        "max_nonpositive": hi,
        "midpoint": mid,
    })


def schur_stability(J: GameJacobian, tol: float = DEFINITE_TOL) -> Certificate:
    """Negative definiteness of ``J11 - P J22^{-1} P^T`` for potential Jacobians."""
    split = split_potential_rotational(J)
    z_norm = spectral_norm(split.Z)
    if z_norm > structure_tolerance(J):
        return Certificate("schur_complement", False, False,
                           {"reason": "not potential", "z_norm": z_norm})
    scale = 1.0 + spectral_norm(J.J22)
    sv = np.linalg.svd(J.J22, compute_uv=False)
    if sv.min() <= tol * scale:
        return Certificate("schur_complement", False, False,
                           {"reason": "J22 is singular", "min_singular_value": float(sv.min())})
    S = J.J11 - split.P @ np.linalg.solve(J.J22, split.P.T)
    top = float(np.linalg.eigvalsh(0.5 * (S + S.T))[-1])
    return Certificate("schur_complement", top < -tol, True, {"max_eigenvalue": top})


@dataclass
class EquilibriumReport:
    point: list
    residual: float
    structure: str
    nash_status: str
    is_differential_nash: bool
    is_stable: bool
    stability: str
    spectrum: list
    lambda_: LambdaSummary
    is_stable_under_tau: dict
    discrete_spectral_radius: float
    config: dict
    zero_sum_box: Optional[ZeroSumBounds] = None
    potential_intervals: Optional[PotentialBounds] = None
    certificates: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["lambda"] = out.pop("lambda_")
        out["is_stable_under_tau"] = [
            {"tau": t, "stable": s} for t, s in self.is_stable_under_tau.items()
        ]
        return _jsonable(out)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def classify_equilibrium(game: Game, x, config: LearningConfig | None = None, taus=None,
                         tol: float = FIXED_POINT_TOL, seed: int = 0) -> EquilibriumReport:
    """Full stability/Nash report at the fixed point ``x``.

    Raises
    ------
    NotAFixedPointError
        if ``||g(x)||_inf > tol``.
    """
    config = config or LearningConfig()
    v = as_vector(x, game.d1, game.d2)
    residual = float(np.max(np.abs(eval_gradient_field(game, v))))
    if residual > tol:
        raise NotAFixedPointError(f"x is not a fixed point (||g(x)||_inf = {residual:.3e})",
                                  residual)
    J = jacobian_at(game, v)
    spec = eigenvalues(J.full)
    structure = detect_structure(J)
    taus = default_tau_grid() if taus is None else np.asarray(taus, dtype=float)
    taus = np.unique(np.append(taus, config.tau))
    under_tau = {float(t): is_hurwitz(J.scaled(t)) for t in taus}
    lam = lam_diagonal(J.d1, J.d2, config.tau)
    rho = spectral_radius(np.eye(J.d1 + J.d2) + config.gamma1 * lam[:, None] * J.full)

    report = EquilibriumReport(
        point=v.tolist(),
        residual=residual,
        structure=structure,
        nash_status=nash_status(J),
        is_differential_nash=check_differential_nash(J),
        is_stable=is_hurwitz(spec, HURWITZ_TOL),
        stability=stability_label(spec),
        spectrum=[[float(z.real), float(z.imag)] for z in spec.eigenvalues],
        lambda_=lambda_summary(J),
        is_stable_under_tau=under_tau,
        discrete_spectral_radius=rho,
        config={"gamma1": config.gamma1, "tau": config.tau},
    )
    if structure == "zero_sum":
        report.zero_sum_box = zero_sum_bounds(J)
        report.certificates.append(zero_sum_robustness(J, seed=seed))
    if is_potential(J):
        report.potential_intervals = potential_bounds(J)
        report.certificates.append(potential_robustness(J))
        report.certificates.append(schur_stability(J))
    report.certificates.append(instability_certificate(J))
    return report

