#include "nestreuse/sampling.hpp"

#include "nestreuse/error.hpp"

#include <algorithm>
#include <cmath>

namespace nestreuse {

namespace {

// Direction on the unit sphere of `norm`, distributed by cone measure.
void unit_direction(Norm norm, RandomStream& rng, std::span<double> out) {
    const std::size_t d = out.size();
    switch (norm) {
        case Norm::l2: {
            double len = 0.0;
            do {
                rng.normals(out);
                len = norm_value(Norm::l2, out);
            } while (len == 0.0);
            for (double& x : out) x /= len;
            return;
        }
        case Norm::l1: {
            double sum = 0.0;
            for (double& x : out) {
                x = rng.exponential();
                sum += x;
            }
            for (double& x : out) {
                x /= sum;
                if (rng.coin()) x = -x;
            }
            return;
        }
        case Norm::linf: {
            const auto face = std::min<std::size_t>(static_cast<std::size_t>(rng.uniform() * static_cast<double>(d)),
                                                    d - 1);
            for (std::size_t k = 0; k < d; ++k) {
                out[k] = (k == face) ? (rng.coin() ? 1.0 : -1.0) : 2.0 * rng.uniform() - 1.0;
            }
            return;
        }
    }
}

void box_draw(const AxisBox& box, RandomStream& rng, std::span<double> out) {
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = box.center[k] + box.half_widths[k] * (2.0 * rng.uniform() - 1.0);
    }
}

Point radial_draw(const Point& center, Norm norm, double radius, RandomStream& rng) {
    Point p(center.size());
    unit_direction(norm, rng, p);
    for (std::size_t k = 0; k < p.size(); ++k) {
        p[k] = center[k] + radius * p[k];
    }
    return p;
}

double box_coordinate(const AxisBox& box, std::span<const double> point) {
    double t = 0.0;
    for (std::size_t k = 0; k < point.size(); ++k) {
        t = std::max(t, std::abs(point[k] - box.center[k]) / box.half_widths[k]);
    }
    return std::pow(t, static_cast<double>(point.size()));
}

}  // namespace

Point sample_uniform(const UncertaintySet& set, RandomStream& rng) {
    const std::size_t d = set.dimension();
    const double inv_d = 1.0 / static_cast<double>(d);
    return std::visit(
        [&](const auto& s) -> Point {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, BallShape>) {
                if (s.norm == Norm::linf) {
                    Point p(d);
                    box_draw(AxisBox{set.center(), std::vector<double>(d, s.radius)}, rng, p);
                    return p;
                }
                const double radius = s.radius * std::pow(rng.uniform(), inv_d);
                return radial_draw(set.center(), s.norm, radius, rng);
            } else if constexpr (std::is_same_v<S, DonutShape>) {
                // Radial CDF of the shell: (rho^d - r0^d) / (r^d - r0^d), inverted in units of r.
                const double hole = std::pow(s.inner_radius / s.outer_radius, static_cast<double>(d));
                const double u = rng.uniform();
                const double radius = s.outer_radius * std::pow(hole + u * (1.0 - hole), inv_d);
                return radial_draw(set.center(), s.norm, radius, rng);
            } else if constexpr (std::is_same_v<S, BoxShape>) {
                Point p(d);
                box_draw(AxisBox{set.center(), s.half_widths}, rng, p);
                return p;
            } else {
                const double u = rng.uniform();
                double cumulative = 0.0;
                std::size_t pick = s.components.size() - 1;
                for (std::size_t c = 0; c + 1 < s.components.size(); ++c) {
                    cumulative += std::exp(s.components[c].log_volume() - set.log_volume());
                    if (u < cumulative) {
                        pick = c;
                        break;
                    }
                }
                Point p(d);
                box_draw(s.components[pick], rng, p);
                return p;
            }
        },
        set.shape());
}

double uniformity_coordinate(const UncertaintySet& set, std::span<const double> point) {
    if (point.size() != set.dimension()) {
        throw InvalidArgument("uniformity_coordinate: dimension mismatch");
    }
    const double d = static_cast<double>(set.dimension());
    const double value = std::visit(
        [&](const auto& s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, UnionShape>) {
                double before = 0.0;
                for (const auto& box : s.components) {
                    const double share = std::exp(box.log_volume() - set.log_volume());
                    if (box.contains(point)) {
                        return before + share * box_coordinate(box, point);
                    }
                    before += share;
                }
                return 1.0;
            } else if constexpr (std::is_same_v<S, BoxShape>) {
                return box_coordinate(AxisBox{set.center(), s.half_widths}, point);
            } else {
                Point diff(point.size());
                for (std::size_t k = 0; k < point.size(); ++k) {
                    diff[k] = point[k] - set.center()[k];
                }
                const double rho = norm_value(s.norm, diff);
                if constexpr (std::is_same_v<S, BallShape>) {
                    return std::pow(rho / s.radius, d);
                } else {
                    const double hole = std::pow(s.inner_radius / s.outer_radius, d);
                    return (std::pow(rho / s.outer_radius, d) - hole) / (1.0 - hole);
                }
            }
        },
        set.shape());
    return std::clamp(value, 0.0, 1.0);
}

}  // namespace nestreuse
