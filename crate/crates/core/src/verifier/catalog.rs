//! Registry of every check and audit the suite can emit.

use serde::{Deserialize, Serialize};

/// Which configured tolerance a check is held to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ToleranceFamily {
    /// `analytic` or `fd` depending on the engine that ran.
    Engine,
    Quadrature,
    QuadratureStability,
    Lorentz,
    Mass,
    NonrelBound,
    EngineAgreement,
    /// Audits carry no tolerance.
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckInfo {
    pub id: &'static str,
    /// Short name of the relation being tested.
    pub tag: &'static str,
    pub formula: &'static str,
    pub residual: &'static str,
    pub tolerance: ToleranceFamily,
    pub engines: &'static str,
    pub gating: bool,
}

const SCALED: &str = "sup over samples of |lhs - rhs| / sup|Φ|";

pub const CHECKS: &[CheckInfo] = &[
    CheckInfo {
        id: "audit.kt-individual",
        tag: "total constraint, individual vs center-of-mass coordinates",
        formula: "p1² + p2² + m1² + m2² + 4Ω² x⊥²  vs  P² + m_c² + 4(p² + Ω² x⊥²)",
        residual: "best-fit eigenvalues of both forms on Ψ, their spread, the scalar discrepancy m_c² + 8σ - M0², and the equal-mass relation K_com = 2 K_ind - 4Ω² x⊥²",
        tolerance: ToleranceFamily::None,
        engines: "analytic, with the finite-difference x1/x2 route as a cross-check",
        gating: false,
    },
    CheckInfo {
        id: "audit.ladder-on-psi",
        tag: "primed ladder operators acting on Ψ with its center-of-mass phase",
        formula: "a_i^{∓'} Ψ(.., l_i, ..) vs sqrt(l_i) Ψ(.., l_i - 1, ..), sqrt(l_i + 1) Ψ(.., l_i + 1, ..)",
        residual: SCALED,
        tolerance: ToleranceFamily::None,
        engines: "fd on the opaque pair function at fixed X",
        gating: false,
    },
    CheckInfo {
        id: "constraint.internal-ho",
        tag: "internal oscillator eigenvalue",
        formula: "(p² + Ω² x⊥²) Φ = 2σ Φ,  σ = Ω(n + 3/2)",
        residual: "sup |lhs - 2σΦ| / (sup|Φ| max(1, 2σ))",
        tolerance: ToleranceFamily::Engine,
        engines: "analytic, fd",
        gating: true,
    },
    CheckInfo {
        id: "constraint.kg",
        tag: "mass shell of the total momentum",
        formula: "P_μ P^μ = -M0²",
        residual: "|P·P + M0²| / M0²",
        tolerance: ToleranceFamily::Engine,
        engines: "analytic (plane-wave factor)",
        gating: true,
    },
    CheckInfo {
        id: "constraint.ks",
        tag: "second constraint",
        formula: "P_μ p^μ Φ = 0",
        residual: "sup |lhs| / (sup|Φ| |P|), |P| the Euclidean norm of the components",
        tolerance: ToleranceFamily::Engine,
        engines: "analytic, fd",
        gating: true,
    },
    CheckInfo {
        id: "constraint.kt-com",
        tag: "total constraint, center-of-mass form (equal masses)",
        formula: "(P² + m_c² + 4(p² + Ω² x⊥²)) Ψ = 0",
        residual: "sup |lhs| / (sup|Φ| max(1, M0²)); unequal masses are reported by audit.kt-individual instead",
        tolerance: ToleranceFamily::Engine,
        engines: "analytic, fd",
        gating: true,
    },
    CheckInfo {
        id: "constraint.number-op",
        tag: "covariant number operator",
        formula: "a⁺_μ a^{μ-} Φ = n Φ",
        residual: "sup |lhs - nΦ| / (sup|Φ| max(1, n))",
        tolerance: ToleranceFamily::Engine,
        engines: "analytic, fd",
        gating: true,
    },
    CheckInfo {
        id: "constraint.p-dot-ladder.lower",
        tag: "ladder operators orthogonal to P, lowering",
        formula: "P^μ a_μ^- Φ = 0",
        residual: "sup |lhs| / (sup|Φ| |P|)",
        tolerance: ToleranceFamily::Engine,
        engines: "analytic, fd",
        gating: true,
    },
    CheckInfo {
        id: "constraint.p-dot-ladder.raise",
        tag: "ladder operators orthogonal to P, raising",
        formula: "P^μ a_μ^+ Φ = 0",
        residual: "sup |lhs| / (sup|Φ| |P|)",
        tolerance: ToleranceFamily::Engine,
        engines: "analytic, fd",
        gating: true,
    },
    CheckInfo {
        id: "engine.agreement",
        tag: "analytic and finite-difference engines agree",
        formula: "op_analytic Φ = op_fd Φ for every ladder, number, K_S, P·a and oscillator operator",
        residual: "sup |analytic - fd| / (sup|Φ| · operator scale)",
        tolerance: ToleranceFamily::EngineAgreement,
        engines: "analytic vs fd",
        gating: true,
    },
    CheckInfo {
        id: "ladder.lo-prime",
        tag: "covariant and primed number operators coincide",
        formula: "a⁺_μ a^{μ-} Φ = Σ_i a_i^{+'} a_i^{-'} Φ",
        residual: "sup |lhs - rhs| / (sup|Φ| max(1, n))",
        tolerance: ToleranceFamily::Engine,
        engines: "analytic, fd",
        gating: true,
    },
    CheckInfo {
        id: "ladder.lower.l1",
        tag: "lowering relation, mode 1",
        formula: "a_1^{-'} Φ(l1, l2, l3) = sqrt(l1) Φ(l1 - 1, l2, l3)",
        residual: SCALED,
        tolerance: ToleranceFamily::Engine,
        engines: "analytic, fd",
        gating: true,
    },
    CheckInfo {
        id: "ladder.lower.l2",
        tag: "lowering relation, mode 2",
        formula: "a_2^{-'} Φ(l1, l2, l3) = sqrt(l2) Φ(l1, l2 - 1, l3)",
        residual: SCALED,
        tolerance: ToleranceFamily::Engine,
        engines: "analytic, fd",
        gating: true,
    },
    CheckInfo {
        id: "ladder.lower.l3",
        tag: "lowering relation, mode 3",
        formula: "a_3^{-'} Φ(l1, l2, l3) = sqrt(l3) Φ(l1, l2, l3 - 1)",
        residual: SCALED,
        tolerance: ToleranceFamily::Engine,
        engines: "analytic, fd",
        gating: true,
    },
    CheckInfo {
        id: "ladder.raise.r1",
        tag: "raising relation, mode 1",
        formula: "a_1^{+'} Φ(l1, l2, l3) = sqrt(l1 + 1) Φ(l1 + 1, l2, l3)",
        residual: SCALED,
        tolerance: ToleranceFamily::Engine,
        engines: "analytic, fd",
        gating: true,
    },
    CheckInfo {
        id: "ladder.raise.r2",
        tag: "raising relation, mode 2",
        formula: "a_2^{+'} Φ(l1, l2, l3) = sqrt(l2 + 1) Φ(l1, l2 + 1, l3)",
        residual: SCALED,
        tolerance: ToleranceFamily::Engine,
        engines: "analytic, fd",
        gating: true,
    },
    CheckInfo {
        id: "ladder.raise.r3",
        tag: "raising relation, mode 3",
        formula: "a_3^{+'} Φ(l1, l2, l3) = sqrt(l3 + 1) Φ(l1, l2, l3 + 1)",
        residual: SCALED,
        tolerance: ToleranceFamily::Engine,
        engines: "analytic, fd",
        gating: true,
    },
    CheckInfo {
        id: "lorentz.form-invariance",
        tag: "form invariance of the eigenfunctions under boosts",
        formula: "Φ_v(x) = Φ_rest(Λ_v x)",
        residual: SCALED,
        tolerance: ToleranceFamily::Lorentz,
        engines: "direct evaluation",
        gating: true,
    },
    CheckInfo {
        id: "mass.totmass",
        tag: "rest-mass spectrum",
        formula: "M0² = m1² + m2² + 4σ + sqrt((m1² + m2² + 4σ)² - (m1² - m2²)²); equal masses: M0² = m_c² + 8σ",
        residual: "absolute deviation of the anchors M0(1,1,0) = 2, M0(2,1,0) = 3, M0(1,1,σ)² = 4 + 8σ, plus the relative defining-equation residual of every configured level",
        tolerance: ToleranceFamily::Mass,
        engines: "scalar",
        gating: true,
    },
    CheckInfo {
        id: "nonrel.mass-limit",
        tag: "low-velocity limit of the rest mass",
        formula: "|M0 - (m_c + σ/m_r)| <= C σ² / m³",
        residual: "fitted C: largest |M0 - (m_c + σ/m_r)| / (σ²/m³) over the configured mass scales and levels",
        tolerance: ToleranceFamily::NonrelBound,
        engines: "scalar",
        gating: true,
    },
    CheckInfo {
        id: "nonrel.shrod4",
        tag: "non-relativistic number operator",
        formula: "Σ_i a_i^+ a_i^- Φ = n Φ (rest frame)",
        residual: "sup |lhs - nΦ| / (sup|Φ| max(1, n))",
        tolerance: ToleranceFamily::Engine,
        engines: "analytic, fd",
        gating: true,
    },
    CheckInfo {
        id: "norm.hypersurface",
        tag: "normalization on the constraint hypersurface",
        formula: "∫ Ψ†Ψ δ(P·x / M0) d⁴x = (M0/E) ∫ |Φ(x, t = P_j x_j / E)|² d³x = 1",
        residual: "|integral - 1|",
        tolerance: ToleranceFamily::Quadrature,
        engines: "Gauss-Hermite quadrature",
        gating: true,
    },
    CheckInfo {
        id: "norm.node-doubling",
        tag: "quadrature stability",
        formula: "I(N) = I(2N)",
        residual: "|I(N) - I(2N)|",
        tolerance: ToleranceFamily::QuadratureStability,
        engines: "Gauss-Hermite quadrature",
        gating: true,
    },
];

pub fn lookup(id: &str) -> Option<&'static CheckInfo> {
    CHECKS.iter().find(|c| c.id == id)
}

/// Known ids closest to `id`, best first.
pub fn suggestions(id: &str, limit: usize) -> Vec<&'static str> {
    let mut scored: Vec<(f64, &'static str)> = CHECKS
        .iter()
        .map(|c| (strsim::normalized_damerau_levenshtein(id, c.id), c.id))
        .filter(|(s, _)| *s > 0.3)
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(b.1)));
    scored.into_iter().take(limit).map(|(_, id)| id).collect()
}
