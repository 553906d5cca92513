#pragma once

#include "nestreuse/geometry.hpp"
#include "nestreuse/predicate.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nestreuse::cli {

/// Config problem with the offending line (0 when not tied to a line) and key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string source, std::size_t line, std::string field, const std::string& message);

    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

enum class Family { ball, box, donut, box_union };

struct PredicateSpec {
    std::string kind;  // constant | inner_ball | halfspace | hurwitz_cubic
    bool value = true;
    double radius = 0.0;
    std::vector<double> normal;
    double offset = 0.0;
    std::array<double, 3> coefficients{};
    std::vector<double> perturbation;  // 3 x d row-major, empty = identity (d == 3)
};

/// Parsed experiment description. Radii (or scale factors for box and union
/// families) and volumes are alternatives; exactly one is given.
struct ExperimentConfig {
    std::string source;

    Family family = Family::ball;
    std::size_t dimension = 0;
    Norm norm = Norm::l2;
    Point center;
    std::vector<double> radii;
    std::vector<double> volumes;
    double inner_radius = 0.0;
    std::vector<double> half_widths;
    std::vector<AxisBox> union_components;
    std::vector<std::vector<double>> set_offsets;  // per-set shift of the center (ball, box)
    NestingCheck nesting = NestingCheck::analytic;

    std::size_t sample_size = 0;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    PredicateSpec predicate;
    double confidence = 0.95;
    std::vector<double> epsilons;
    std::optional<std::size_t> audit_samples;
    std::optional<std::string> output;

    /// Normalised key -> value text; drives the canonical form and its hash.
    std::map<std::string, std::string> entries;
};

/// Parses `key = value` lines; '#' starts a comment. Throws ConfigError.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");

ExperimentConfig load_config(const std::filesystem::path& path);

/// Applies a seed override and keeps the canonical entries in step.
void override_seed(ExperimentConfig& config, std::uint64_t seed);
void override_trials(ExperimentConfig& config, std::size_t trials);

/// Sorted `key = value` lines of every setting that affects results (not `output`).
std::string canonical_text(const ExperimentConfig& config);

/// FNV-1a 64 of canonical_text, as 16 lowercase hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Builds the nested chain described by the config. Throws ConfigError.
NestedChain build_chain(const ExperimentConfig& config, NestingCheck check);

/// Per-set labels: the radii or scale factors when strictly increasing, else 1..m.
std::vector<double> chain_labels(const ExperimentConfig& config);

/// Radii usable for the scaled-shape bound (ball and box families with radii), if any.
std::optional<std::vector<double>> scaling_radii(const ExperimentConfig& config);

Predicate build_predicate(const ExperimentConfig& config);

}  // namespace nestreuse::cli
