#include "nestreuse/geometry.hpp"

#include "nestreuse/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>

namespace nestreuse {

namespace {

constexpr double kRelTol = 1e-12;

bool leq(double a, double b) {
    return a <= b + kRelTol * std::max(std::abs(a), std::abs(b));
}

double log_sum_exp(std::span<const double> logs) {
    const double top = *std::max_element(logs.begin(), logs.end());
    double acc = 0.0;
    for (const double v : logs) {
        acc += std::exp(v - top);
    }
    return top + std::log(acc);
}

void require_dimension(std::size_t expected, std::size_t got) {
    if (expected != got) {
        throw InvalidArgument(fmt::format("dimension mismatch: expected {}, got {}", expected, got));
    }
}

void require_finite_point(const Point& p, const char* what) {
    if (p.empty()) {
        throw InvalidArgument(fmt::format("{} must have positive dimension", what));
    }
    for (const double x : p) {
        if (!std::isfinite(x)) {
            throw InvalidArgument(fmt::format("{} has a non-finite coordinate", what));
        }
    }
}

void require_radius(double r, const char* what) {
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw InvalidArgument(fmt::format("{} must be positive and finite, got {}", what, r));
    }
}

void validate_box(const AxisBox& box) {
    require_finite_point(box.center, "box centre");
    require_dimension(box.center.size(), box.half_widths.size());
    for (const double h : box.half_widths) {
        require_radius(h, "box half-width");
    }
}

bool interiors_overlap(const AxisBox& a, const AxisBox& b) {
    for (std::size_t k = 0; k < a.center.size(); ++k) {
        const double gap = std::abs(a.center[k] - b.center[k]);
        if (gap >= a.half_widths[k] + b.half_widths[k]) {
            return false;
        }
    }
    return true;
}

double ball_log_volume(Norm norm, std::size_t d, double r) {
    return log_unit_ball_volume(norm, d) + static_cast<double>(d) * std::log(r);
}

double distance(Norm norm, const Point& a, const Point& b) {
    Point diff(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        diff[k] = a[k] - b[k];
    }
    return norm_value(norm, diff);
}

// Box view of a set, when it is one (boxes and l-inf balls).
std::optional<AxisBox> as_box(const UncertaintySet& set) {
    if (const auto* box = std::get_if<BoxShape>(&set.shape())) {
        return AxisBox{set.center(), box->half_widths};
    }
    if (const auto* ball = std::get_if<BallShape>(&set.shape()); ball && ball->norm == Norm::linf) {
        return AxisBox{set.center(), std::vector<double>(set.dimension(), ball->radius)};
    }
    return std::nullopt;
}

// Components of a set that is a finite union of boxes.
std::optional<std::vector<AxisBox>> as_boxes(const UncertaintySet& set) {
    if (const auto* u = std::get_if<UnionShape>(&set.shape())) {
        return u->components;
    }
    if (auto box = as_box(set)) {
        return std::vector<AxisBox>{std::move(*box)};
    }
    return std::nullopt;
}

struct RoundBody {
    Norm norm;
    double inner;  // 0 for solid balls
    double outer;
};

std::optional<RoundBody> as_round(const UncertaintySet& set) {
    if (const auto* ball = std::get_if<BallShape>(&set.shape())) {
        return RoundBody{ball->norm, 0.0, ball->radius};
    }
    if (const auto* donut = std::get_if<DonutShape>(&set.shape())) {
        return RoundBody{donut->norm, donut->inner_radius, donut->outer_radius};
    }
    return std::nullopt;
}

}  // namespace

std::string to_string(Norm norm) {
    switch (norm) {
        case Norm::l1: return "1";
        case Norm::l2: return "2";
        case Norm::linf: return "inf";
    }
    return "?";
}

double norm_value(Norm norm, std::span<const double> x) noexcept {
    switch (norm) {
        case Norm::l1: {
            double s = 0.0;
            for (const double v : x) s += std::abs(v);
            return s;
        }
        case Norm::l2: {
            double s = 0.0;
            for (const double v : x) s += v * v;
            return std::sqrt(s);
        }
        case Norm::linf: {
            double s = 0.0;
            for (const double v : x) s = std::max(s, std::abs(v));
            return s;
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double log_unit_ball_volume(Norm norm, std::size_t dimension) {
    if (dimension == 0) {
        throw InvalidArgument("dimension must be positive");
    }
    const double d = static_cast<double>(dimension);
    switch (norm) {
        case Norm::l1: return d * std::numbers::ln2 - std::lgamma(d + 1.0);
        case Norm::l2: return 0.5 * d * std::log(std::numbers::pi) - std::lgamma(0.5 * d + 1.0);
        case Norm::linf: return d * std::numbers::ln2;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

bool AxisBox::contains(std::span<const double> point) const noexcept {
    for (std::size_t k = 0; k < center.size(); ++k) {
        if (std::abs(point[k] - center[k]) > half_widths[k]) {
            return false;
        }
    }
    return true;
}

bool AxisBox::contains(const AxisBox& other) const noexcept {
    for (std::size_t k = 0; k < center.size(); ++k) {
        const double lo = other.center[k] - other.half_widths[k];
        const double hi = other.center[k] + other.half_widths[k];
        if (!leq(center[k] - half_widths[k], lo) || !leq(hi, center[k] + half_widths[k])) {
            return false;
        }
    }
    return true;
}

double AxisBox::log_volume() const noexcept {
    double acc = 0.0;
    for (const double h : half_widths) {
        acc += std::log(2.0 * h);
    }
    return acc;
}

UncertaintySet::UncertaintySet(Point center, Shape shape, double log_volume)
    : center_(std::move(center)), shape_(std::move(shape)), log_volume_(log_volume) {}

UncertaintySet UncertaintySet::ball(Point center, double radius, Norm norm) {
    require_finite_point(center, "ball centre");
    require_radius(radius, "ball radius");
    const double lv = ball_log_volume(norm, center.size(), radius);
    return UncertaintySet(std::move(center), BallShape{norm, radius}, lv);
}

UncertaintySet UncertaintySet::box(Point center, std::vector<double> half_widths) {
    AxisBox b{std::move(center), std::move(half_widths)};
    validate_box(b);
    const double lv = b.log_volume();
    return UncertaintySet(std::move(b.center), BoxShape{std::move(b.half_widths)}, lv);
}

UncertaintySet UncertaintySet::donut(Point center, double inner_radius, double outer_radius, Norm norm) {
    require_finite_point(center, "donut centre");
    require_radius(inner_radius, "donut inner radius");
    require_radius(outer_radius, "donut outer radius");
    if (!(inner_radius < outer_radius)) {
        throw InvalidArgument(fmt::format("donut requires inner radius < outer radius, got {} and {}",
                                          inner_radius, outer_radius));
    }
    const std::size_t d = center.size();
    const double outer_lv = ball_log_volume(norm, d, outer_radius);
    // vol(outer) - vol(inner) = vol(outer) * (1 - (r0/r)^d)
    const double shrink = static_cast<double>(d) * std::log(inner_radius / outer_radius);
    const double lv = outer_lv + std::log(-std::expm1(shrink));
    return UncertaintySet(std::move(center), DonutShape{norm, inner_radius, outer_radius}, lv);
}

UncertaintySet UncertaintySet::box_union(std::vector<AxisBox> components) {
    if (components.empty()) {
        throw InvalidArgument("box union needs at least one component");
    }
    const std::size_t d = components.front().center.size();
    for (const auto& c : components) {
        validate_box(c);
        require_dimension(d, c.center.size());
    }
    for (std::size_t a = 0; a < components.size(); ++a) {
        for (std::size_t b = a + 1; b < components.size(); ++b) {
            if (interiors_overlap(components[a], components[b])) {
                throw InvalidArgument(fmt::format("box union components {} and {} overlap", a, b));
            }
        }
    }
    std::vector<double> logs;
    logs.reserve(components.size());
    for (const auto& c : components) {
        logs.push_back(c.log_volume());
    }
    const double lv = log_sum_exp(logs);
    Point centroid(d, 0.0);
    for (std::size_t c = 0; c < components.size(); ++c) {
        const double w = std::exp(logs[c] - lv);
        for (std::size_t k = 0; k < d; ++k) {
            centroid[k] += w * components[c].center[k];
        }
    }
    return UncertaintySet(std::move(centroid), UnionShape{std::move(components)}, lv);
}

double UncertaintySet::volume() const noexcept {
    return std::exp(log_volume_);
}

bool UncertaintySet::contains(std::span<const double> point) const {
    require_dimension(dimension(), point.size());
    return std::visit(
        [&](const auto& s) -> bool {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, UnionShape>) {
                return std::any_of(s.components.begin(), s.components.end(),
                                   [&](const AxisBox& b) { return b.contains(point); });
            } else if constexpr (std::is_same_v<S, BoxShape>) {
                return AxisBox{center_, s.half_widths}.contains(point);
            } else {
                Point diff(point.size());
                for (std::size_t k = 0; k < point.size(); ++k) {
                    diff[k] = point[k] - center_[k];
                }
                const double r = norm_value(s.norm, diff);
                if constexpr (std::is_same_v<S, BallShape>) {
                    return r <= s.radius;
                } else {
                    return r >= s.inner_radius && r <= s.outer_radius;
                }
            }
        },
        shape_);
}

std::string UncertaintySet::describe() const {
    return std::visit(
        [&](const auto& s) -> std::string {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, BallShape>) {
                return fmt::format("ball(d={}, norm={}, r={})", dimension(), to_string(s.norm), s.radius);
            } else if constexpr (std::is_same_v<S, BoxShape>) {
                return fmt::format("box(d={})", dimension());
            } else if constexpr (std::is_same_v<S, DonutShape>) {
                return fmt::format("donut(d={}, norm={}, r0={}, r={})", dimension(), to_string(s.norm),
                                   s.inner_radius, s.outer_radius);
            } else {
                return fmt::format("union(d={}, components={})", dimension(), s.components.size());
            }
        },
        shape_);
}

Containment analytic_containment(const UncertaintySet& inner, const UncertaintySet& outer) {
    require_dimension(outer.dimension(), inner.dimension());

    if (auto outer_box = as_box(outer)) {
        if (auto pieces = as_boxes(inner)) {
            // A union lies in a single box iff every component does.
            const bool all = std::all_of(pieces->begin(), pieces->end(),
                                         [&](const AxisBox& b) { return outer_box->contains(b); });
            return all ? Containment::proven : Containment::refuted;
        }
    }

    if (auto outer_pieces = as_boxes(outer)) {
        if (auto pieces = as_boxes(inner)) {
            const bool all = std::all_of(pieces->begin(), pieces->end(), [&](const AxisBox& b) {
                return std::any_of(outer_pieces->begin(), outer_pieces->end(),
                                   [&](const AxisBox& o) { return o.contains(b); });
            });
            // Failing the per-component test does not refute cover by several components.
            return all ? Containment::proven : Containment::undecided;
        }
    }

    const auto in = as_round(inner);
    const auto out = as_round(outer);
    if (in && out && in->norm == out->norm) {
        const double offset = distance(in->norm, inner.center(), outer.center());
        const bool concentric = offset == 0.0;
        if (out->inner == 0.0) {
            // Balls and donuts both contain their full outer shell, whose farthest point
            // from the other centre lies at offset + r.
            return leq(offset + in->outer, out->outer) ? Containment::proven : Containment::refuted;
        }
        if (concentric) {
            return (leq(out->inner, in->inner) && leq(in->outer, out->outer)) ? Containment::proven
                                                                              : Containment::refuted;
        }
    }
    return Containment::undecided;
}

NestedChain NestedChain::build(std::vector<UncertaintySet> sets, NestingCheck check) {
    if (sets.empty()) {
        throw InvalidArgument("a chain needs at least one set");
    }
    const std::size_t d = sets.front().dimension();
    for (const auto& s : sets) {
        require_dimension(d, s.dimension());
    }

    NestedChain chain;
    chain.log_volumes_.reserve(sets.size());
    for (const auto& s : sets) {
        chain.log_volumes_.push_back(s.log_volume());
    }
    for (std::size_t i = 0; i + 1 < sets.size(); ++i) {
        // Log-scale tolerance: relative tolerance on the linear volumes.
        if (chain.log_volumes_[i] > chain.log_volumes_[i + 1] + kRelTol) {
            throw NestingError(i, i + 1,
                               fmt::format("volumes must be non-decreasing: set {} has volume {} > set {} "
                                           "volume {}",
                                           i + 1, std::exp(chain.log_volumes_[i]), i + 2,
                                           std::exp(chain.log_volumes_[i + 1])));
        }
    }

    if (check == NestingCheck::deferred) {
        chain.needs_audit_ = sets.size() > 1;
    } else {
        for (std::size_t i = 0; i + 1 < sets.size(); ++i) {
            switch (analytic_containment(sets[i], sets[i + 1])) {
                case Containment::proven: break;
                case Containment::undecided: chain.needs_audit_ = true; break;
                case Containment::refuted:
                    throw NestingError(i, i + 1,
                                       fmt::format("set {} ({}) is not contained in set {} ({})", i + 1,
                                                   sets[i].describe(), i + 2, sets[i + 1].describe()));
            }
        }
    }
    chain.sets_ = std::move(sets);
    return chain;
}

double NestedChain::volume(std::size_t i) const {
    return std::exp(log_volumes_.at(i));
}

std::vector<double> NestedChain::volumes() const {
    std::vector<double> out;
    out.reserve(log_volumes_.size());
    for (const double lv : log_volumes_) {
        out.push_back(std::exp(lv));
    }
    return out;
}

double NestedChain::v_min() const {
    return volume(0);
}

double NestedChain::v_max() const {
    return volume(size() - 1);
}

double NestedChain::volume_ratio(std::size_t i) const {
    if (i + 1 >= size()) {
        throw InvalidArgument(fmt::format("volume ratio index {} out of range for chain of {}", i, size()));
    }
    return std::exp(log_volumes_[i] - log_volumes_[i + 1]);
}

}  // namespace nestreuse
