#include "nestreuse/predicate.hpp"

#include "nestreuse/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace nestreuse {

namespace {

void require_dimension(std::optional<std::size_t> expected, std::size_t got) {
    if (expected && *expected != got) {
        throw InvalidArgument(fmt::format("predicate expects dimension {}, got {}", *expected, got));
    }
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

bool is_hurwitz_cubic(double a2, double a1, double a0) noexcept {
    return a2 > 0.0 && a1 > 0.0 && a0 > 0.0 && a2 * a1 > a0;
}

Predicate Predicate::inner_ball(double radius, Point center) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw InvalidArgument("inner_ball radius must be positive and finite");
    }
    return Predicate(InnerBallRequirement{radius, std::move(center)});
}

Predicate Predicate::halfspace(std::vector<double> normal, double offset) {
    if (normal.empty() || std::all_of(normal.begin(), normal.end(), [](double v) { return v == 0.0; })) {
        throw InvalidArgument("halfspace normal must be a non-zero vector");
    }
    return Predicate(HalfspaceRequirement{std::move(normal), offset});
}

Predicate Predicate::hurwitz_cubic(std::array<double, 3> nominal, std::vector<double> map, std::size_t dimension) {
    if (dimension == 0) {
        throw InvalidArgument("hurwitz_cubic dimension must be positive");
    }
    if (map.empty()) {
        if (dimension != 3) {
            throw InvalidArgument("hurwitz_cubic needs an explicit 3 x d perturbation map unless d == 3");
        }
        map = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    }
    if (map.size() != 3 * dimension) {
        throw InvalidArgument(
            fmt::format("hurwitz_cubic perturbation map must have 3 x {} entries, got {}", dimension, map.size()));
    }
    return Predicate(HurwitzCubicRequirement{nominal, std::move(map), dimension});
}

Predicate Predicate::constant(bool value) {
    return Predicate(ConstantRequirement{value});
}

Predicate Predicate::user(std::string name, std::function<bool(std::span<const double>)> test,
                          std::optional<std::size_t> dimension) {
    if (!test) {
        throw InvalidArgument("user predicate needs a callable");
    }
    return Predicate(UserRequirement{std::move(name), std::move(test), dimension});
}

std::optional<std::size_t> Predicate::dimension() const {
    return std::visit(overloaded{
                          [](const InnerBallRequirement& r) -> std::optional<std::size_t> {
                              if (r.center.empty()) return std::nullopt;
                              return r.center.size();
                          },
                          [](const HalfspaceRequirement& r) -> std::optional<std::size_t> { return r.normal.size(); },
                          [](const HurwitzCubicRequirement& r) -> std::optional<std::size_t> { return r.dimension; },
                          [](const ConstantRequirement&) -> std::optional<std::size_t> { return std::nullopt; },
                          [](const UserRequirement& r) { return r.dimension; },
                      },
                      kind_);
}

std::array<double, 3> Predicate::cubic_coefficients(std::span<const double> point) const {
    const auto* cubic = std::get_if<HurwitzCubicRequirement>(&kind_);
    if (!cubic) {
        throw InvalidArgument("cubic_coefficients called on a non-cubic predicate");
    }
    require_dimension(cubic->dimension, point.size());
    std::array<double, 3> a = cubic->nominal;
    for (std::size_t row = 0; row < 3; ++row) {
        for (std::size_t k = 0; k < point.size(); ++k) {
            a[row] += cubic->map[row * cubic->dimension + k] * point[k];
        }
    }
    return a;
}

bool Predicate::evaluate(std::span<const double> point) const {
    require_dimension(dimension(), point.size());
    return std::visit(overloaded{
                          [&](const InnerBallRequirement& r) {
                              double s = 0.0;
                              for (std::size_t k = 0; k < point.size(); ++k) {
                                  const double x = point[k] - (r.center.empty() ? 0.0 : r.center[k]);
                                  s += x * x;
                              }
                              return std::sqrt(s) <= r.radius;
                          },
                          [&](const HalfspaceRequirement& r) {
                              double s = 0.0;
                              for (std::size_t k = 0; k < point.size(); ++k) {
                                  s += r.normal[k] * point[k];
                              }
                              return s <= r.offset;
                          },
                          [&](const HurwitzCubicRequirement&) {
                              const auto a = cubic_coefficients(point);
                              return is_hurwitz_cubic(a[0], a[1], a[2]);
                          },
                          [](const ConstantRequirement& r) { return r.value; },
                          [&](const UserRequirement& r) { return r.test(point); },
                      },
                      kind_);
}

std::string Predicate::name() const {
    return std::visit(overloaded{
                          [](const InnerBallRequirement&) -> std::string { return "inner_ball"; },
                          [](const HalfspaceRequirement&) -> std::string { return "halfspace"; },
                          [](const HurwitzCubicRequirement&) -> std::string { return "hurwitz_cubic"; },
                          [](const ConstantRequirement&) -> std::string { return "constant"; },
                          [](const UserRequirement& r) { return r.name; },
                      },
                      kind_);
}

std::optional<double> analytic_truth(const Predicate& predicate, const UncertaintySet& set) {
    const double d = static_cast<double>(set.dimension());
    const Point& c = set.center();
    const bool centered_at_origin = std::all_of(c.begin(), c.end(), [](double x) { return x == 0.0; });

    if (const auto* r = std::get_if<ConstantRequirement>(&predicate.kind())) {
        return r->value ? 1.0 : 0.0;
    }

    if (const auto* r = std::get_if<InnerBallRequirement>(&predicate.kind())) {
        const bool concentric = r->center.empty() ? centered_at_origin : r->center == c;
        if (!concentric) {
            return std::nullopt;
        }
        if (const auto* ball = std::get_if<BallShape>(&set.shape()); ball && ball->norm == Norm::l2) {
            return std::min(1.0, std::pow(r->radius / ball->radius, d));
        }
        if (const auto* donut = std::get_if<DonutShape>(&set.shape()); donut && donut->norm == Norm::l2) {
            const double hole = std::pow(donut->inner_radius / donut->outer_radius, d);
            const double reach = std::pow(r->radius / donut->outer_radius, d);
            return std::clamp((reach - hole) / (1.0 - hole), 0.0, 1.0);
        }
        return std::nullopt;
    }

    if (const auto* r = std::get_if<HalfspaceRequirement>(&predicate.kind())) {
        if (r->normal.size() != c.size() || std::holds_alternative<UnionShape>(set.shape())) {
            return std::nullopt;
        }
        double at_center = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) {
            at_center += r->normal[k] * c[k];
        }
        // Balls, boxes and donuts are point-symmetric about their centre.
        if (at_center == r->offset) {
            return 0.5;
        }
        return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace nestreuse
