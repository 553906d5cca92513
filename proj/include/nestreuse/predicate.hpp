#pragma once

#include "nestreuse/geometry.hpp"

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace nestreuse {

/// Closed Euclidean ball about `center` (empty centre means the origin).
struct InnerBallRequirement {
    double radius;
    Point center;
};

/// <normal, q> <= offset.
struct HalfspaceRequirement {
    std::vector<double> normal;
    double offset;
};

/// Hurwitz stability of s^3 + a2 s^2 + a1 s + a0 with (a2, a1, a0) = nominal + map * q.
struct HurwitzCubicRequirement {
    std::array<double, 3> nominal;
    /// Row-major 3 x d perturbation map.
    std::vector<double> map;
    std::size_t dimension;
};

struct ConstantRequirement {
    bool value;
};

/// Extension point for arbitrary requirements. The callable must be pure and
/// safe to call concurrently.
struct UserRequirement {
    std::string name;
    std::function<bool(std::span<const double>)> test;
    std::optional<std::size_t> dimension;
};

/// Routh-Hurwitz test for a monic cubic; marginal cases are unstable.
bool is_hurwitz_cubic(double a2, double a1, double a0) noexcept;

/// The robustness requirement evaluated once per fresh sample. Immutable.
class Predicate {
public:
    using Kind = std::variant<InnerBallRequirement, HalfspaceRequirement, HurwitzCubicRequirement,
                              ConstantRequirement, UserRequirement>;

    static Predicate inner_ball(double radius, Point center = {});
    static Predicate halfspace(std::vector<double> normal, double offset);
    /// `map` is 3 x d row-major; pass an empty map with d == 3 for the identity.
    static Predicate hurwitz_cubic(std::array<double, 3> nominal, std::vector<double> map, std::size_t dimension);
    static Predicate constant(bool value);
    static Predicate user(std::string name, std::function<bool(std::span<const double>)> test,
                          std::optional<std::size_t> dimension = std::nullopt);

    /// Throws InvalidArgument when the point's dimension does not fit the requirement.
    bool evaluate(std::span<const double> point) const;

    /// Dimension this requirement is tied to, if any.
    std::optional<std::size_t> dimension() const;

    std::string name() const;
    const Kind& kind() const noexcept { return kind_; }

    /// Perturbed cubic coefficients (a2, a1, a0); only meaningful for hurwitz_cubic.
    std::array<double, 3> cubic_coefficients(std::span<const double> point) const;

private:
    explicit Predicate(Kind kind) : kind_(std::move(kind)) {}

    Kind kind_;
};

/// Closed-form probability that a uniform point of `set` satisfies `predicate`,
/// when one is known:
///  - inner ball on a concentric l2 ball of radius r: min(1, (r*/r)^d);
///  - inner ball on a concentric l2 donut: clamp((r*^d - r0^d) / (r^d - r0^d), 0, 1);
///  - halfspace through the centre of a ball, box or donut: 1/2;
///  - constant: 0 or 1.
std::optional<double> analytic_truth(const Predicate& predicate, const UncertaintySet& set);

}  // namespace nestreuse
