#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cqw/analysis.hpp"
#include "cqw/cascade.hpp"
#include "cqw/coupled_modes.hpp"
#include "cqw/path_oracle.hpp"
#include "cqw/well.hpp"

// Output documents. Every number is printed with 17 significant digits and
// object keys keep insertion order, so a given result always serializes to
// the same bytes.

namespace cqw {

// Minimal ordered JSON value for emission. Parsing goes through
// nlohmann/json; it is not used here because its number formatting is
// shortest-round-trip rather than fixed 17 significant digits.
class JsonValue {
public:
    using Array = std::vector<JsonValue>;
    using Object = std::vector<std::pair<std::string, JsonValue>>;

    JsonValue() = default;
    JsonValue(std::nullptr_t) {}
    JsonValue(bool v) : value_(v) {}
    JsonValue(int v) : value_(static_cast<std::int64_t>(v)) {}
    JsonValue(std::int64_t v) : value_(v) {}
    JsonValue(std::uint64_t v) : value_(static_cast<std::int64_t>(v)) {}
    JsonValue(double v) : value_(v) {}
    JsonValue(const char* v) : value_(std::string(v)) {}
    JsonValue(std::string v) : value_(std::move(v)) {}
    JsonValue(Array v) : value_(std::move(v)) {}
    JsonValue(Object v) : value_(std::move(v)) {}

    static JsonValue object() { return JsonValue(Object{}); }
    static JsonValue array() { return JsonValue(Array{}); }

    // Appends to an object (keys are not deduplicated) or an array.
    JsonValue& set(std::string key, JsonValue v);
    JsonValue& push(JsonValue v);

    // Pretty: two-space indentation and a trailing newline. Compact: one
    // line, no newline.
    std::string dump(bool pretty = true) const;

private:
    void write(std::string& out, int indent) const;

    std::variant<std::nullptr_t, bool, std::int64_t, double, std::string, Array, Object> value_;
};

// 17 significant digits, locale independent; non-finite values become null.
std::string format_number(double v);

struct LevelRow {
    int index = 0;
    double energy = 0.0;
    int node_count = 0;
    double norm_residual = 0.0;  // |Simpson integral of |psi|^2 - 1| on the default grid
};

LevelRow level_row(const BoundState& state);
std::string levels_csv(const std::vector<BoundState>& states);

JsonValue design_json(const AlignmentDesign& design);
JsonValue branching_json(const BranchingModel& branching);
JsonValue coupled_json(const LevelsReport& report);

JsonValue distribution_json(const JointDistribution& dist, const InitialExcitation& init,
                            const BranchingModel& branching);
std::string distribution_csv(const JointDistribution& dist);

JsonValue analysis_json(const JointDistribution& dist, const InitialExcitation& init);
// Full (N+1) x (N+1) grid of the (l, n) joint distribution, zeros included.
std::string heatmap_csv(const JointDistribution& dist);

struct OracleReport {
    double max_abs_diff = 0.0;
    double tv_distance = 0.0;
    std::optional<CoherenceReport> coherence;  // absent above the audit size limit
};

JsonValue oracle_json(const OracleReport& report);
JsonValue audit_json(int n_total, SignMode mode, const CoherenceReport& report);

}  // namespace cqw
