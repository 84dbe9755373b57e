#include "alens/types.hpp"

namespace alens {

std::string_view to_string(TxStatus s) {
    return s == TxStatus::Ok ? "ok" : "fail";
}

std::string_view to_string(TokenStandard s) {
    switch (s) {
        case TokenStandard::Erc20:
            return "erc20";
        case TokenStandard::Erc721:
            return "erc721";
        default:
            return "unknown";
    }
}

std::string_view to_string(ApprovalKind k) {
    switch (k) {
        case ApprovalKind::Unlimited:
            return "UA";
        case ApprovalKind::Zero:
            return "ZA";
        default:
            return "OA";
    }
}

std::string_view to_string(RiskLevel l) {
    switch (l) {
        case RiskLevel::NoRisk:
            return "no_risk";
        case RiskLevel::LowRisk:
            return "low_risk";
        default:
            return "high_risk";
    }
}

std::string_view to_string(BehaviorMode m) {
    switch (m) {
        case BehaviorMode::OneToOne:
            return "M1";
        case BehaviorMode::OneToMany:
            return "M2";
        case BehaviorMode::OnlyApproval:
            return "M3";
        case BehaviorMode::ManyToOne:
            return "M4";
        case BehaviorMode::Compound:
            return "M5";
        default:
            return "anomalous";
    }
}

std::optional<TxStatus> tx_status_from_string(std::string_view s) {
    if (s == "ok")
        return TxStatus::Ok;
    if (s == "fail")
        return TxStatus::Fail;
    return std::nullopt;
}

std::optional<TokenStandard> token_standard_from_string(std::string_view s) {
    if (s == "erc20")
        return TokenStandard::Erc20;
    if (s == "erc721")
        return TokenStandard::Erc721;
    if (s == "unknown")
        return TokenStandard::Unknown;
    return std::nullopt;
}

std::optional<ApprovalKind> approval_kind_from_string(std::string_view s) {
    if (s == "UA")
        return ApprovalKind::Unlimited;
    if (s == "ZA")
        return ApprovalKind::Zero;
    if (s == "OA")
        return ApprovalKind::Other;
    return std::nullopt;
}

std::optional<RiskLevel> risk_level_from_string(std::string_view s) {
    if (s == "no_risk")
        return RiskLevel::NoRisk;
    if (s == "low_risk")
        return RiskLevel::LowRisk;
    if (s == "high_risk")
        return RiskLevel::HighRisk;
    return std::nullopt;
}

std::optional<BehaviorMode> behavior_mode_from_string(std::string_view s) {
    if (s == "M1")
        return BehaviorMode::OneToOne;
    if (s == "M2")
        return BehaviorMode::OneToMany;
    if (s == "M3")
        return BehaviorMode::OnlyApproval;
    if (s == "M4")
        return BehaviorMode::ManyToOne;
    if (s == "M5")
        return BehaviorMode::Compound;
    if (s == "anomalous")
        return BehaviorMode::Anomalous;
    return std::nullopt;
}

}  // namespace alens
