#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace nestreuse {

using Point = std::vector<double>;

enum class Norm { l1, l2, linf };

std::string to_string(Norm norm);

/// p-norm of `x` for p in {1, 2, inf}.
double norm_value(Norm norm, std::span<const double> x) noexcept;

/// log of the volume of the unit p-ball in `dimension` dimensions.
double log_unit_ball_volume(Norm norm, std::size_t dimension);

/// Closed axis-aligned box given by its centre and per-axis half-widths.
struct AxisBox {
    Point center;
    std::vector<double> half_widths;

    bool contains(std::span<const double> point) const noexcept;
    bool contains(const AxisBox& other) const noexcept;
    double log_volume() const noexcept;
};

struct BallShape {
    Norm norm;
    double radius;
};

struct BoxShape {
    std::vector<double> half_widths;
};

/// Outer ball minus the open inner ball about a shared centre.
struct DonutShape {
    Norm norm;
    double inner_radius;
    double outer_radius;
};

/// Pairwise-disjoint boxes (interiors may not overlap).
struct UnionShape {
    std::vector<AxisBox> components;
};

using Shape = std::variant<BallShape, BoxShape, DonutShape, UnionShape>;

/// A closed region of R^d with exact volume, membership and (see sampling.hpp) a
/// uniform sampler. Immutable once constructed.
class UncertaintySet {
public:
    static UncertaintySet ball(Point center, double radius, Norm norm = Norm::l2);
    static UncertaintySet box(Point center, std::vector<double> half_widths);
    static UncertaintySet donut(Point center, double inner_radius, double outer_radius,
                                Norm norm = Norm::l2);
    static UncertaintySet box_union(std::vector<AxisBox> components);

    std::size_t dimension() const noexcept { return center_.size(); }

    /// For unions, the volume-weighted centroid of the components.
    const Point& center() const noexcept { return center_; }
    const Shape& shape() const noexcept { return shape_; }

    double log_volume() const noexcept { return log_volume_; }
    double volume() const noexcept;

    /// Closed-set membership. Throws InvalidArgument on dimension mismatch.
    bool contains(std::span<const double> point) const;

    std::string describe() const;

private:
    UncertaintySet(Point center, Shape shape, double log_volume);

    Point center_;
    Shape shape_;
    double log_volume_;
};

/// Outcome of a purely analytic inclusion test between two sets.
enum class Containment { proven, refuted, undecided };

Containment analytic_containment(const UncertaintySet& inner, const UncertaintySet& outer);

enum class NestingCheck {
    analytic,  // refute provably non-nested pairs at construction
    deferred,  // skip analytic checks; nesting is left to audit_nestedness
};

/// B_1 ⊂ B_2 ⊂ ... ⊂ B_m with index 0 the smallest set.
class NestedChain {
public:
    /// Throws NestingError on decreasing volumes or (analytic mode) a refuted pair,
    /// InvalidArgument on an empty list or mixed dimensions.
    static NestedChain build(std::vector<UncertaintySet> sets,
                             NestingCheck check = NestingCheck::analytic);

    std::size_t size() const noexcept { return sets_.size(); }
    std::size_t dimension() const noexcept { return sets_.front().dimension(); }

    const UncertaintySet& operator[](std::size_t i) const { return sets_.at(i); }
    const std::vector<UncertaintySet>& sets() const noexcept { return sets_; }

    double log_volume(std::size_t i) const { return log_volumes_.at(i); }
    double volume(std::size_t i) const;
    std::vector<double> volumes() const;
    double v_min() const;
    double v_max() const;

    /// v_i / v_{i+1}, computed from log volumes.
    double volume_ratio(std::size_t i) const;

    /// True when some consecutive pair could not be proven nested analytically.
    bool needs_audit() const noexcept { return needs_audit_; }

private:
    NestedChain() = default;

    std::vector<UncertaintySet> sets_;
    std::vector<double> log_volumes_;
    bool needs_audit_ = false;
};

}  // namespace nestreuse
