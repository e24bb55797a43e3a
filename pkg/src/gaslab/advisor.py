"""Pattern advisor: maps design answers to Classic, Proxy or Diamond."""

from __future__ import annotations

from dataclasses import dataclass, field, fields

from gaslab.dispatch import Pattern


@dataclass(frozen=True)
class DecisionAnswers:
    needs_upgradeability: bool = False
    extensive_features_or_large_code: bool = False
    frequent_upgrades: bool = False
    modularity_priority: bool = False

    @classmethod
    def from_dict(cls, data: dict) -> "DecisionAnswers":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"unknown answers: {', '.join(unknown)}")
        bad = sorted(k for k, v in data.items() if not isinstance(v, bool))
        if bad:
            raise ValueError(f"answers must be true/false: {', '.join(bad)}")
        return cls(**data)


QUESTIONS = {
    "needs_upgradeability": "Must the contract logic be upgradeable after deployment?",
    "extensive_features_or_large_code": "Is the feature set extensive or the code near the size limit?",
    "frequent_upgrades": "Are upgrades expected to be frequent?",
    "modularity_priority": "Is modularity (adding/removing feature modules) a priority?",
}


@dataclass(frozen=True)
class Recommendation:
    pattern: Pattern
    rationale: list = field(default_factory=list)
    cautions: list = field(default_factory=list)


def decide(answers: DecisionAnswers) -> Recommendation:
    if not answers.needs_upgradeability:
        return Recommendation(
            Pattern.CLASSIC,
            [
                "functional: no upgrade path is required",
                "non-functional: one monolithic contract has the lowest deployment gas "
                "and no delegation overhead per call",
                "non-functional: simplest development model (inheritance and libraries)",
            ],
            [
                "any later change means redeploying and migrating all stored data by hand",
            ],
        )
    if answers.extensive_features_or_large_code or answers.modularity_priority:
        rationale = ["functional: logic is upgradeable in place behind one address"]
        if answers.extensive_features_or_large_code:
            rationale.append(
                "functional: features split across facets, so code size is not bounded "
                "by a single contract"
            )
        if answers.modularity_priority:
            rationale.append("functional: facets can be added, replaced or removed per selector")
        if answers.frequent_upgrades:
            rationale.append(
                "non-functional: frequent upgrades only redeploy the facets that change"
            )
        return Recommendation(
            Pattern.DIAMOND,
            rationale,
            [
                "highest initial deployment cost of the three patterns",
                "each call pays a selector lookup on top of the delegation overhead",
                "requires careful shared-storage layout across facets",
            ],
        )
    rationale = [
        "functional: logic is upgradeable in place; storage stays in the proxy",
        "non-functional: code fits one implementation contract",
    ]
    cautions = [
        "every call pays the delegation overhead",
        "less modular than a diamond; storage layout must stay compatible across versions",
    ]
    if answers.frequent_upgrades:
        cautions.append("each upgrade redeploys the whole implementation")
    else:
        rationale.append("non-functional: upgrades are infrequent, so full redeploys stay cheap")
    return Recommendation(Pattern.PROXY, rationale, cautions)
