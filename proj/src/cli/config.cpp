#include "nestreuse/cli/config.hpp"

#include "nestreuse/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace nestreuse::cli {

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "family",          "dimension",         "norm",          "center",
        "radii",           "volumes",           "inner_radius",  "half_widths",
        "union_centers",   "union_half_widths", "nesting",       "N",
        "trials",          "seed",              "predicate",     "predicate.value",
        "predicate.radius", "predicate.normal", "predicate.offset", "predicate.coefficients",
        "predicate.perturbation", "confidence", "epsilons",      "audit_samples",
        "output",          "set_offsets",
    };
    return keys;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

// Rows separated by ';', tokens by commas or whitespace.
std::vector<std::vector<std::string>> split_rows(const std::string& value) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream rows_in(value);
    std::string row;
    while (std::getline(rows_in, row, ';')) {
        std::replace(row.begin(), row.end(), ',', ' ');
        std::stringstream tokens(row);
        std::vector<std::string> out;
        std::string tok;
        while (tokens >> tok) {
            out.push_back(tok);
        }
        rows.push_back(std::move(out));
    }
    return rows;
}

std::string normalise(const std::string& value) {
    std::string out;
    const auto rows = split_rows(value);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (r > 0) out += "; ";
        for (std::size_t t = 0; t < rows[r].size(); ++t) {
            if (t > 0) out += ' ';
            out += rows[r][t];
        }
    }
    return out;
}

struct Entry {
    std::string value;
    std::size_t line;
};

class Reader {
public:
    Reader(std::string source, std::map<std::string, Entry> entries)
        : source_(std::move(source)), entries_(std::move(entries)) {}

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    [[noreturn]] void fail(const std::string& key, const std::string& message) const {
        const auto it = entries_.find(key);
        throw ConfigError(source_, it == entries_.end() ? 0 : it->second.line, key, message);
    }

    const std::string& raw(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) {
            fail(key, "required key is missing");
        }
        return it->second.value;
    }

    double number(const std::string& key, const std::string& token) const {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(v)) {
            fail(key, fmt::format("'{}' is not a finite number", token));
        }
        return v;
    }

    double real(const std::string& key) const {
        const auto tokens = vector(key);
        if (tokens.size() != 1) {
            fail(key, "expected a single number");
        }
        return tokens.front();
    }

    std::uint64_t unsigned_int(const std::string& key) const {
        const std::string text = raw(key);
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc() || ptr != text.data() + text.size()) {
            fail(key, fmt::format("'{}' is not a non-negative integer", text));
        }
        return v;
    }

    std::vector<double> vector(const std::string& key) const {
        const auto rows = matrix(key);
        if (rows.size() != 1) {
            fail(key, "expected a single row of numbers");
        }
        return rows.front();
    }

    std::vector<std::vector<double>> matrix(const std::string& key) const {
        std::vector<std::vector<double>> out;
        for (const auto& row : split_rows(raw(key))) {
            if (row.empty()) {
                fail(key, "empty row");
            }
            std::vector<double> values;
            for (const auto& tok : row) {
                values.push_back(number(key, tok));
            }
            out.push_back(std::move(values));
        }
        if (out.empty()) {
            fail(key, "no values");
        }
        return out;
    }

private:
    std::string source_;
    std::map<std::string, Entry> entries_;
};

std::vector<double> parse_radii(const Reader& in, const std::string& key) {
    const auto rows = split_rows(in.raw(key));
    if (rows.size() != 1 || rows.front().empty()) {
        in.fail(key, "expected a list of radii or 'geometric|linear LO HI COUNT'");
    }
    const auto& tok = rows.front();
    if (tok.front() == "geometric" || tok.front() == "linear") {
        if (tok.size() != 4) {
            in.fail(key, fmt::format("'{}' takes LO HI COUNT", tok.front()));
        }
        const double lo = in.number(key, tok[1]);
        const double hi = in.number(key, tok[2]);
        const double count = in.number(key, tok[3]);
        if (count < 1 || count != std::floor(count)) {
            in.fail(key, "COUNT must be a positive integer");
        }
        if (!(lo > 0.0) || !(hi > lo || (hi == lo && count == 1))) {
            in.fail(key, "need 0 < LO < HI");
        }
        const auto m = static_cast<std::size_t>(count);
        std::vector<double> radii(m, lo);
        for (std::size_t i = 1; i < m; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(m - 1);
            radii[i] = tok.front() == "geometric" ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
        }
        if (m > 1) radii.back() = hi;
        return radii;
    }
    return in.vector(key);
}

Norm parse_norm(const Reader& in) {
    if (!in.has("norm")) {
        return Norm::l2;
    }
    const std::string& v = in.raw("norm");
    if (v == "1") return Norm::l1;
    if (v == "2") return Norm::l2;
    if (v == "inf") return Norm::linf;
    in.fail("norm", fmt::format("expected 1, 2 or inf, got '{}'", v));
}

std::size_t positive_count(const Reader& in, const std::string& key) {
    const auto v = in.unsigned_int(key);
    if (v == 0) {
        in.fail(key, "must be at least 1");
    }
    return static_cast<std::size_t>(v);
}

void fill_predicate(const Reader& in, ExperimentConfig& cfg) {
    auto& p = cfg.predicate;
    p.kind = in.raw("predicate");
    if (p.kind == "constant") {
        const std::string& v = in.raw("predicate.value");
        if (v != "true" && v != "false") {
            in.fail("predicate.value", "expected true or false");
        }
        p.value = v == "true";
    } else if (p.kind == "inner_ball") {
        p.radius = in.real("predicate.radius");
        if (!(p.radius > 0.0)) {
            in.fail("predicate.radius", "must be positive");
        }
    } else if (p.kind == "halfspace") {
        p.normal = in.vector("predicate.normal");
        if (p.normal.size() != cfg.dimension) {
            in.fail("predicate.normal", fmt::format("expected {} entries", cfg.dimension));
        }
        p.offset = in.real("predicate.offset");
    } else if (p.kind == "hurwitz_cubic") {
        const auto c = in.vector("predicate.coefficients");
        if (c.size() != 3) {
            in.fail("predicate.coefficients", "expected a2 a1 a0");
        }
        std::copy(c.begin(), c.end(), p.coefficients.begin());
        if (in.has("predicate.perturbation")) {
            const auto rows = in.matrix("predicate.perturbation");
            if (rows.size() != 3) {
                in.fail("predicate.perturbation", "expected 3 rows separated by ';'");
            }
            for (const auto& row : rows) {
                if (row.size() != cfg.dimension) {
                    in.fail("predicate.perturbation", fmt::format("each row needs {} entries", cfg.dimension));
                }
                p.perturbation.insert(p.perturbation.end(), row.begin(), row.end());
            }
        } else if (cfg.dimension != 3) {
            in.fail("predicate.perturbation", "required unless dimension = 3");
        }
    } else {
        in.fail("predicate", fmt::format("unknown predicate '{}'", p.kind));
    }
}

void fill_chain(const Reader& in, ExperimentConfig& cfg) {
    const std::string& family = in.raw("family");
    if (family == "ball") cfg.family = Family::ball;
    else if (family == "box") cfg.family = Family::box;
    else if (family == "donut") cfg.family = Family::donut;
    else if (family == "union") cfg.family = Family::box_union;
    else in.fail("family", fmt::format("expected ball, box, donut or union, got '{}'", family));

    cfg.dimension = positive_count(in, "dimension");
    cfg.norm = parse_norm(in);
    cfg.center = in.has("center") ? in.vector("center") : Point(cfg.dimension, 0.0);
    if (cfg.center.size() != cfg.dimension) {
        in.fail("center", fmt::format("expected {} coordinates", cfg.dimension));
    }

    if (in.has("radii") == in.has("volumes")) {
        in.fail(in.has("radii") ? "volumes" : "radii", "give exactly one of 'radii' and 'volumes'");
    }
    if (in.has("radii")) {
        cfg.radii = parse_radii(in, "radii");
        for (std::size_t i = 0; i < cfg.radii.size(); ++i) {
            if (!(cfg.radii[i] > 0.0)) {
                in.fail("radii", "radii must be positive");
            }
            if (i > 0 && !(cfg.radii[i] > cfg.radii[i - 1])) {
                in.fail("radii", "radii must be strictly increasing");
            }
        }
    } else {
        cfg.volumes = in.vector("volumes");
        for (std::size_t i = 0; i < cfg.volumes.size(); ++i) {
            if (!(cfg.volumes[i] > 0.0)) {
                in.fail("volumes", "volumes must be positive");
            }
            if (i > 0 && cfg.volumes[i] < cfg.volumes[i - 1]) {
                in.fail("volumes", "volumes must be non-decreasing");
            }
        }
    }

    if (cfg.family == Family::donut) {
        cfg.inner_radius = in.real("inner_radius");
        if (!(cfg.inner_radius > 0.0)) {
            in.fail("inner_radius", "must be positive");
        }
        if (!cfg.radii.empty() && !(cfg.radii.front() > cfg.inner_radius)) {
            in.fail("radii", "outer radii must exceed inner_radius");
        }
    }
    if (cfg.family == Family::box) {
        cfg.half_widths = in.has("half_widths") ? in.vector("half_widths") : std::vector<double>(cfg.dimension, 1.0);
        if (cfg.half_widths.size() != cfg.dimension) {
            in.fail("half_widths", fmt::format("expected {} entries", cfg.dimension));
        }
    }
    if (cfg.family == Family::box_union) {
        const auto centers = in.matrix("union_centers");
        std::vector<std::vector<double>> widths;
        if (in.has("union_half_widths")) {
            widths = in.matrix("union_half_widths");
            if (widths.size() != centers.size()) {
                in.fail("union_half_widths", "one row per component is required");
            }
        } else {
            widths.assign(centers.size(), std::vector<double>(cfg.dimension, 1.0));
        }
        for (std::size_t c = 0; c < centers.size(); ++c) {
            if (centers[c].size() != cfg.dimension) {
                in.fail("union_centers", fmt::format("component {} needs {} coordinates", c + 1, cfg.dimension));
            }
            if (widths[c].size() != cfg.dimension) {
                in.fail("union_half_widths", fmt::format("component {} needs {} entries", c + 1, cfg.dimension));
            }
            Point shifted = centers[c];
            for (std::size_t k = 0; k < cfg.dimension; ++k) {
                shifted[k] += cfg.center[k];
            }
            cfg.union_components.push_back({shifted, widths[c]});
        }
    }

    if (in.has("set_offsets")) {
        if (cfg.family != Family::ball && cfg.family != Family::box) {
            in.fail("set_offsets", "only ball and box chains accept per-set offsets");
        }
        cfg.set_offsets = in.matrix("set_offsets");
        const std::size_t m = cfg.radii.empty() ? cfg.volumes.size() : cfg.radii.size();
        if (cfg.set_offsets.size() != m) {
            in.fail("set_offsets", fmt::format("expected {} rows, one per set", m));
        }
        for (const auto& row : cfg.set_offsets) {
            if (row.size() != cfg.dimension) {
                in.fail("set_offsets", fmt::format("each row needs {} coordinates", cfg.dimension));
            }
        }
    }

    if (in.has("nesting")) {
        const std::string& v = in.raw("nesting");
        if (v == "analytic") cfg.nesting = NestingCheck::analytic;
        else if (v == "audit") cfg.nesting = NestingCheck::deferred;
        else in.fail("nesting", "expected analytic or audit");
    }
}

std::vector<double> scale_factors(const ExperimentConfig& cfg, double base_log_volume) {
    if (!cfg.radii.empty()) {
        return cfg.radii;
    }
    std::vector<double> out;
    for (const double v : cfg.volumes) {
        out.push_back(std::exp((std::log(v) - base_log_volume) / static_cast<double>(cfg.dimension)));
    }
    return out;
}

Point set_center(const ExperimentConfig& cfg, std::size_t i) {
    Point c = cfg.center;
    if (!cfg.set_offsets.empty()) {
        for (std::size_t k = 0; k < c.size(); ++k) c[k] += cfg.set_offsets[i][k];
    }
    return c;
}

std::vector<UncertaintySet> make_sets(const ExperimentConfig& cfg) {
    std::vector<UncertaintySet> sets;
    const double d = static_cast<double>(cfg.dimension);
    switch (cfg.family) {
        case Family::ball:
            for (const double r : scale_factors(cfg, log_unit_ball_volume(cfg.norm, cfg.dimension))) {
                sets.push_back(UncertaintySet::ball(set_center(cfg, sets.size()), r, cfg.norm));
            }
            break;
        case Family::box: {
            const AxisBox base{cfg.center, cfg.half_widths};
            for (const double s : scale_factors(cfg, base.log_volume())) {
                std::vector<double> h = cfg.half_widths;
                for (double& x : h) x *= s;
                sets.push_back(UncertaintySet::box(set_center(cfg, sets.size()), h));
            }
            break;
        }
        case Family::donut: {
            std::vector<double> outer = cfg.radii;
            if (outer.empty()) {
                // v = V_1 (r^d - r0^d)
                const double unit = std::exp(log_unit_ball_volume(cfg.norm, cfg.dimension));
                for (const double v : cfg.volumes) {
                    outer.push_back(std::pow(v / unit + std::pow(cfg.inner_radius, d), 1.0 / d));
                }
            }
            for (const double r : outer) {
                sets.push_back(UncertaintySet::donut(cfg.center, cfg.inner_radius, r, cfg.norm));
            }
            break;
        }
        case Family::box_union: {
            std::vector<double> logs;
            for (const auto& c : cfg.union_components) logs.push_back(c.log_volume());
            const double top = *std::max_element(logs.begin(), logs.end());
            double acc = 0.0;
            for (const double l : logs) acc += std::exp(l - top);
            for (const double s : scale_factors(cfg, top + std::log(acc))) {
                std::vector<AxisBox> parts = cfg.union_components;
                for (auto& p : parts) {
                    for (double& h : p.half_widths) h *= s;
                }
                sets.push_back(UncertaintySet::box_union(std::move(parts)));
            }
            break;
        }
    }
    return sets;
}

std::string to_hex(std::uint64_t v) {
    return fmt::format("{:016x}", v);
}

}  // namespace

ConfigError::ConfigError(std::string source, std::size_t line, std::string field, const std::string& message)
    : std::runtime_error(line > 0 ? fmt::format("{}:{}: field '{}': {}", source, line, field, message)
                                  : fmt::format("{}: field '{}': {}", source, field, message)),
      line_(line),
      field_(std::move(field)) {}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    std::map<std::string, Entry> entries;
    std::stringstream lines(text);
    std::string line;
    std::size_t number = 0;
    while (std::getline(lines, line)) {
        ++number;
        const std::string body = trim(line.substr(0, line.find('#')));
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(source, number, "", "expected 'key = value'");
        }
        const std::string key = trim(body.substr(0, eq));
        const std::string value = normalise(trim(body.substr(eq + 1)));
        if (!known_keys().count(key)) {
            throw ConfigError(source, number, key, "unknown key");
        }
        if (value.empty()) {
            throw ConfigError(source, number, key, "empty value");
        }
        if (!entries.emplace(key, Entry{value, number}).second) {
            throw ConfigError(source, number, key, "duplicate key");
        }
    }

    ExperimentConfig cfg;
    cfg.source = source;
    for (const auto& [key, entry] : entries) {
        if (key != "output") {
            cfg.entries[key] = entry.value;
        }
    }
    const Reader in(source, entries);

    fill_chain(in, cfg);
    cfg.sample_size = positive_count(in, "N");
    cfg.seed = in.unsigned_int("seed");
    if (in.has("trials")) {
        cfg.trials = positive_count(in, "trials");
    }
    fill_predicate(in, cfg);
    if (in.has("confidence")) {
        cfg.confidence = in.real("confidence");
        if (!(cfg.confidence > 0.0 && cfg.confidence < 1.0)) {
            in.fail("confidence", "must lie in (0, 1)");
        }
    }
    if (in.has("epsilons")) {
        cfg.epsilons = in.vector("epsilons");
        for (const double e : cfg.epsilons) {
            if (!(e >= 0.0 && e < 1.0)) {
                in.fail("epsilons", "each risk level must lie in [0, 1)");
            }
        }
    }
    if (in.has("audit_samples")) {
        cfg.audit_samples = static_cast<std::size_t>(in.unsigned_int("audit_samples"));
    }
    if (in.has("output")) {
        cfg.output = in.raw("output");
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string(), 0, "", "cannot open config file");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.string());
}

void override_seed(ExperimentConfig& config, std::uint64_t seed) {
    config.seed = seed;
    config.entries["seed"] = std::to_string(seed);
}

void override_trials(ExperimentConfig& config, std::size_t trials) {
    if (trials == 0) {
        throw ConfigError(config.source, 0, "trials", "must be at least 1");
    }
    config.trials = trials;
    config.entries["trials"] = std::to_string(trials);
}

std::string canonical_text(const ExperimentConfig& config) {
    std::string out;
    for (const auto& [key, value] : config.entries) {
        out += fmt::format("{} = {}\n", key, value);
    }
    return out;
}

std::string config_hash(const ExperimentConfig& config) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const unsigned char c : canonical_text(config)) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return to_hex(h);
}

NestedChain build_chain(const ExperimentConfig& config, NestingCheck check) {
    const std::string field = config.radii.empty() ? "volumes" : "radii";
    try {
        return NestedChain::build(make_sets(config), check);
    } catch (const InvalidArgument& e) {
        throw ConfigError(config.source, 0, field, e.what());
    }
}

std::vector<double> chain_labels(const ExperimentConfig& config) {
    std::vector<double> labels = config.radii;
    if (labels.empty()) {
        if (config.family == Family::ball || config.family == Family::donut) {
            const auto chain = build_chain(config, NestingCheck::deferred);
            for (const auto& s : chain.sets()) {
                if (const auto* b = std::get_if<BallShape>(&s.shape())) labels.push_back(b->radius);
                else if (const auto* d = std::get_if<DonutShape>(&s.shape())) labels.push_back(d->outer_radius);
            }
        }
    }
    const bool increasing =
        !labels.empty() && std::adjacent_find(labels.begin(), labels.end(), std::greater_equal<>()) == labels.end();
    if (!increasing) {
        const std::size_t m = config.radii.empty() ? config.volumes.size() : config.radii.size();
        labels.resize(m);
        for (std::size_t i = 0; i < m; ++i) labels[i] = static_cast<double>(i + 1);
    }
    return labels;
}

std::optional<std::vector<double>> scaling_radii(const ExperimentConfig& config) {
    if ((config.family == Family::ball || config.family == Family::box || config.family == Family::box_union) &&
        !config.radii.empty()) {
        return config.radii;
    }
    return std::nullopt;
}

Predicate build_predicate(const ExperimentConfig& config) {
    const auto& p = config.predicate;
    try {
        if (p.kind == "constant") return Predicate::constant(p.value);
        if (p.kind == "inner_ball") return Predicate::inner_ball(p.radius, config.center);
        if (p.kind == "halfspace") return Predicate::halfspace(p.normal, p.offset);
        if (p.kind == "hurwitz_cubic") return Predicate::hurwitz_cubic(p.coefficients, p.perturbation, config.dimension);
    } catch (const InvalidArgument& e) {
        throw ConfigError(config.source, 0, "predicate", e.what());
    }
    throw ConfigError(config.source, 0, "predicate", fmt::format("unknown predicate '{}'", p.kind));
}

}  // namespace nestreuse::cli
