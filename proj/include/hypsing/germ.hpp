#pragma once

#include <optional>
#include <variant>

#include "hypsing/error.hpp"
#include "hypsing/mobius.hpp"
#include "hypsing/real.hpp"
#include "hypsing/series.hpp"

namespace hypsing {

/// Canonical branch xi -> xi^alpha (alpha > 0, alpha != 1).
struct PowerBranch {
    Real alpha;
};

/// Canonical branch xi -> log xi.
struct LogBranch {};

using CanonicalBranch = std::variant<PowerBranch, LogBranch>;

/// Local model of a developing map: F = moebius o (xi^alpha) or
/// F = moebius o (log xi) on a slit neighbourhood of 0, with values in `model`.
///
/// `declared_monodromy` optionally records the monodromy the metric is claimed
/// to have (for instance from a global representation). When absent, the
/// monodromy is the deck action of the germ itself.
class DevelopingGerm {
public:
    DevelopingGerm(MobiusMap moebius, CanonicalBranch branch, Model model,
                   std::optional<MobiusMap> declared_monodromy = std::nullopt)
        : moebius_(moebius), branch_(branch), model_(model), declared_(declared_monodromy)
    {
        if (const auto* p = std::get_if<PowerBranch>(&branch_)) {
            if (!(p->alpha.value() > 0.0)) throw Error(ErrorCode::InvalidData, "cone exponent must be positive");
            if (p->alpha == Real(1)) throw Error(ErrorCode::InvalidData, "cone exponent 1 is a smooth point");
        }
    }

    static DevelopingGerm power(MobiusMap m, Real alpha, Model model) { return {m, PowerBranch{alpha}, model}; }
    static DevelopingGerm log(MobiusMap m, Model model) { return {m, LogBranch{}, model}; }

    [[nodiscard]] const MobiusMap& moebius() const noexcept { return moebius_; }
    [[nodiscard]] const CanonicalBranch& branch() const noexcept { return branch_; }
    [[nodiscard]] Model model() const noexcept { return model_; }
    [[nodiscard]] const std::optional<MobiusMap>& declared_monodromy() const noexcept { return declared_; }

    [[nodiscard]] bool is_log() const noexcept { return std::holds_alternative<LogBranch>(branch_); }
    [[nodiscard]] std::optional<Real> alpha() const
    {
        if (const auto* p = std::get_if<PowerBranch>(&branch_)) return p->alpha;
        return std::nullopt;
    }

    /// xi^alpha or log xi.
    [[nodiscard]] Complex canonical(Complex xi, const BranchSpec& b = {}) const
    {
        if (const auto* p = std::get_if<PowerBranch>(&branch_)) return branch_pow(xi, p->alpha, b);
        return branch_log(xi, b);
    }

    [[nodiscard]] Complex canonical_derivative(Complex xi, const BranchSpec& b = {}) const
    {
        if (const auto* p = std::get_if<PowerBranch>(&branch_)) {
            return p->alpha.value() * branch_pow(xi, p->alpha - Real(1), b);
        }
        return 1.0 / xi;
    }

    [[nodiscard]] Complex operator()(Complex xi, const BranchSpec& b = {}) const { return moebius_(canonical(xi, b)); }

    [[nodiscard]] Complex derivative(Complex xi, const BranchSpec& b = {}) const
    {
        return moebius_.derivative(canonical(xi, b)) * canonical_derivative(xi, b);
    }

    [[nodiscard]] DevelopingGerm with_moebius(const MobiusMap& m) const { return {m, branch_, model_, declared_}; }
    [[nodiscard]] DevelopingGerm with_declared_monodromy(const MobiusMap& m) const { return {moebius_, branch_, model_, m}; }

private:
    MobiusMap moebius_;
    CanonicalBranch branch_;
    Model model_;
    std::optional<MobiusMap> declared_;
};

} // namespace hypsing
