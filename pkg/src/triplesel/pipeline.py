"""Orchestration of the full computation on one (E, A, F, p, n) instance:
classification and parity, class sets and eigenforms, the special-map
composites, testing-factor sweeps, Kolyvagin constants, congruence right-hand
sides, and the final verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .admissible import (
    AdmissiblePrimeCertificate,
    check_assumption_R,
    good_prime_report,
    scan_n_admissible,
    scan_strongly_admissible,
    verify_certificate,
)
from .brandt import BrandtModule, Eigenform, eigenform_gsigma, eigenform_pi, level_raise, mod_pn_reduction
from .elliptic import (
    EllipticCurveF,
    EllipticCurveQ,
    check_assumption_E,
    classify_pair,
    parity_from_nminus,
    trace_frob_sq,
)
from .kolyvagin import (
    KolyvaginConstants,
    PeriodEntry,
    PeriodReport,
    Verdict,
    congruence_rhs_bis,
    find_testing_factors,
    kolyvagin_constants,
    period_sum,
    predict,
)
from .orders import build_class_set_T
from .quadfield import IdealF, RealQuadraticField
from .special import ZetaData, _ideal_power_product


@dataclass
class Bounds:
    prime_scan: int = 3000
    hecke_verify: int = 40
    neighbor_budget: int = 400000
    classify_scan: int = 200
    surjectivity_scan: int = 1000
    raise_budget_classes: int = 400


@dataclass
class InstanceData:
    curve_e: EllipticCurveQ
    curve_a: EllipticCurveF
    field: RealQuadraticField
    p: int
    n: int
    bounds: Bounds
    n_bad: int = 0
    n_red: int = 0
    exclusions: tuple = ()


def classification_stage(inst: InstanceData):
    from .arith import factor

    cls = classify_pair(inst.curve_e, inst.curve_a, inst.field, inst.bounds.classify_scan)
    rep_e = check_assumption_E(inst.curve_e, inst.curve_a, inst.field)
    out = {"classification": cls, "assumption_e": rep_e}
    if rep_e.all_pass():
        ptype, eps = parity_from_nminus(rep_e.n_minus)
        out["parity"] = (ptype, eps)
        out["sigma_set"] = ("infinity",) + tuple(p for p, _ in factor(rep_e.n_minus).factors)
        out["n_plus"] = rep_e.n_plus
        out["n_minus"] = rep_e.n_minus
    return out


def admissible_stage(inst: InstanceData, classification):
    certs = scan_n_admissible(
        inst.curve_e, inst.field, inst.p, inst.n, inst.bounds.prime_scan, inst.curve_a.conductor_norm, inst.exclusions
    )
    plus = scan_strongly_admissible(
        inst.curve_e, inst.curve_a, inst.field, inst.p, inst.n, +1, inst.bounds.prime_scan, classification, inst.exclusions
    )
    minus = scan_strongly_admissible(
        inst.curve_e, inst.curve_a, inst.field, inst.p, inst.n, -1, inst.bounds.prime_scan, classification, inst.exclusions
    )
    for c in certs:
        if not verify_certificate(c, inst.curve_e, inst.field, inst.p, inst.curve_a.conductor_norm, exclusions=inst.exclusions):
            raise RuntimeError(f"certificate for {c.ell} failed independent re-verification")
    for c in plus + minus:
        if not verify_certificate(
            c, inst.curve_e, inst.field, inst.p, inst.curve_a.conductor_norm, curve_a=inst.curve_a, classification=classification, exclusions=inst.exclusions
        ):
            raise RuntimeError(f"strong certificate for {c.ell} failed independent re-verification")
    return {"admissible": certs, "strong_plus": plus, "strong_minus": minus}


@dataclass
class PeriodArtifacts:
    cs_big: object
    cs_small: object
    g_sigma: Eigenform
    zeta: ZetaData
    targets: dict
    f_pis: dict
    report: PeriodReport


def period_stage(inst: InstanceData, n_plus: int, n_minus: int) -> PeriodArtifacts:
    """The eq-ichino sweep for an even-type pair: all (d, dF) testing pairs."""
    from .arith import factor, omega as omega_fn

    if omega_fn(n_minus) % 2 == 0:
        raise ValueError("the period sweep needs an even-type pair (odd number of inert primes)")
    fld = inst.field
    m_norm = inst.curve_a.conductor_norm
    level_m = n_plus * m_norm
    cs_big = build_class_set_T(n_minus, level_m, inst.bounds.neighbor_budget)
    cs_small = cs_big.degeneracy_target(m_norm)
    g_sigma = eigenform_gsigma(inst.curve_e, BrandtModule(cs_small), max(inst.bounds.hecke_verify, 20))
    zeta = ZetaData(cs_big, fld)
    m_ideal = inst.curve_a.conductor_ideal()
    df = zeta.level.quotient_by(m_ideal)
    divisors_d = factor(m_norm).divisors() if m_norm > 1 else [1]
    entries = []
    targets = {}
    f_pis = {}
    delta_maps = {}
    small_module = BrandtModule(cs_small)
    for d in divisors_d:
        delta_maps[d] = cs_big.degeneracy_map(m_norm, d, cs_small)
    for dp in df.divisors():
        target = zeta.window_class_set(df, dp)
        zmap = zeta.window_map(target)
        f_pi = eigenform_pi(inst.curve_a, BrandtModule(target), max(50, inst.bounds.hecke_verify))
        targets[repr(dp)] = (target, zmap)
        f_pis[repr(dp)] = f_pi
        for d in divisors_d:
            val = period_sum(g_sigma.vector, f_pi.vector, delta_maps[d], zmap)
            entries.append(PeriodEntry(d, repr(dp), val, delta_maps[d], zmap))
    entries.sort(key=lambda e: (e.d, _ideal_sort_key(e.d_ideal)))
    report = find_testing_factors(PeriodReport(entries, None, (level_m, n_minus)))
    return PeriodArtifacts(cs_big, cs_small, g_sigma, zeta, targets, f_pis, report)


def _ideal_sort_key(rep: str):
    return (len(rep), rep)


def congruence_bis_stage(inst: InstanceData, artifacts: PeriodArtifacts, strong_certs, nu_pairs=((1, 0), (0, 1), (1, 1))):
    """Evaluate the odd-wp congruence right-hand side on certified primes."""
    report = artifacts.report
    if report.chosen is None:
        return {"evaluations": [], "note": "no nonzero period; nothing to evaluate"}
    period = report.chosen_entry().value
    out = []
    for cert in strong_certs[:2]:
        t = cert.strong["trace_Asq"]
        assert (t - 2 * cert.epsilon_sigma * cert.ell) % inst.p != 0, "strong admissibility violated"
        for nu_b, nu_c in nu_pairs:
            val = congruence_rhs_bis(cert.ell, nu_b, nu_c, t, cert.epsilon_sigma, period, inst.p, inst.n)
            out.append(
                {
                    "ell": cert.ell,
                    "eps_sigma": cert.epsilon_sigma,
                    "nu_bullet": nu_b,
                    "nu_circ": nu_c,
                    "value_mod_pn": val,
                    "modulus": inst.p**inst.n,
                }
            )
    return {"evaluations": out, "period": period}


def level_raise_stage(inst: InstanceData, n_plus: int, n_minus: int, certs):
    """The level-raising witness at the first scanned admissible prime."""
    from .orders import mass_T

    for cert in certs:
        ell = cert.ell
        mass = mass_T(n_minus * ell, n_plus)
        if mass > inst.bounds.raise_budget_classes:
            return {"status": "skipped", "note": f"raised class set mass {mass} exceeds the configured budget"}
        cs = build_class_set_T(n_minus * ell, n_plus, inst.bounds.neighbor_budget)
        module = BrandtModule(cs)
        form = level_raise(inst.curve_e, module, ell, inst.p, inst.n, cert.epsilon_sigma, inst.bounds.hecke_verify)
        return {"status": "ok", "ell": ell, "eps_sigma": cert.epsilon_sigma, "form": form, "classes": len(cs)}
    return {"status": "skipped", "note": "no admissible prime within the scan bound"}


def full_predict(inst: InstanceData):
    """The whole chain; returns a dictionary of all artifacts plus the verdict."""
    out = {}
    stage1 = classification_stage(inst)
    out.update(stage1)
    cls = stage1["classification"]
    rep_e = stage1["assumption_e"]
    if not rep_e.all_pass():
        out["verdict"] = predict("out-of-hypotheses", None, None, (f"assumption E: {rep_e.e1}/{rep_e.e2}/{rep_e.e3}",))
        return out
    ptype, eps = stage1["parity"]
    gp = good_prime_report(inst.curve_e, inst.curve_a, inst.field, inst.p, inst.bounds.surjectivity_scan, cls)
    rr = check_assumption_R(inst.curve_e, inst.curve_a, inst.field, inst.p, min(inst.bounds.prime_scan, 3000), inst.bounds.surjectivity_scan, cls)
    out["good_prime"] = gp
    out["assumption_r"] = rr
    adm = admissible_stage(inst, cls)
    out.update(adm)
    notes = [
        f"pair classification: {cls.kind} ({cls.confidence})",
        f"good-prime clauses: { {k: v for k, v in gp.clauses.items()} }",
        f"n_bad = {inst.n_bad} and n_red = {inst.n_red} are assumed inputs",
        "the period is C * L(1/2) for an uncomputed nonzero C (unnormalized Ichino constant)",
    ]
    strong_all = adm["strong_plus"] + adm["strong_minus"]
    if ptype == "even":
        art = period_stage(inst, stage1["n_plus"], stage1["n_minus"])
        out["period_report"] = art.report
        out["period_artifacts"] = art
        const = kolyvagin_constants(
            art.report, inst.p, len(adm["admissible"]), len(strong_all), inst.n_bad, inst.n_red
        )
        out["constants"] = const
        out["congruence"] = congruence_bis_stage(inst, art, sorted(strong_all, key=lambda c: c.ell))
        out["verdict"] = predict("even", art.report, const, notes)
    else:
        const = kolyvagin_constants(None, inst.p, len(adm["admissible"]), len(strong_all), inst.n_bad, inst.n_red)
        out["constants"] = const
        lr = level_raise_stage(inst, stage1["n_plus"], stage1["n_minus"], adm["admissible"])
        out["level_raising"] = lr
        extra = {"level_raising_status": lr["status"]}
        if lr["status"] == "ok":
            extra["raised_ell"] = lr["ell"]
        out["verdict"] = predict("odd", None, const, notes, extra)
    return out
