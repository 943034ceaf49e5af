#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <utility>
#include <vector>

namespace edgegcn::data {

inline constexpr std::size_t kPointChannels = 9; // xyz, rgb, normal
inline constexpr int kNonePredicate = 0;

/// A point cloud segmented into m class-agnostic instances, with object
/// labels per instance and directed predicate labels per ordered pair.
/// Ordered pairs absent from edge_labels are implicitly "none" (class 0).
///
/// On-disk layout (one directory): points.csv (N x 9), instances.csv (N ids
/// in 1..m), node_labels.csv (m ints), edge_labels.csv ("i,j,predicate",
/// 0-based instance indices).
struct SceneSample {
    std::vector<double> points; // N x 9
    std::vector<int> instance;  // N ids, 1-based
    std::vector<int> node_labels;
    std::map<std::pair<std::size_t, std::size_t>, int> edge_labels;

    std::size_t num_points() const { return instance.size(); }
    std::size_t num_instances() const { return node_labels.size(); }
    int predicate(std::size_t i, std::size_t j) const;

    bool operator==(const SceneSample&) const = default;
};

/// Throws std::invalid_argument when an invariant fails: every id in 1..m
/// owns at least one point, edge keys have i != j, labels within range.
void validate_scene(const SceneSample& s, std::size_t num_object_classes, std::size_t num_predicate_classes);

SceneSample load_scene(const std::filesystem::path& dir);
void write_scene(const SceneSample& s, const std::filesystem::path& dir);

/// Loads every immediate subdirectory of root (sorted by name) as a scene.
std::vector<SceneSample> load_scene_collection(const std::filesystem::path& root);

// --- synthetic generator -------------------------------------------------

/// Geometry summary of one instance, derived purely from its points.
struct InstanceGeometry {
    std::array<double, 3> centroid{};
    std::array<double, 3> min{};
    std::array<double, 3> max{};

    double volume() const;
};

InstanceGeometry measure_instance(const SceneSample& s, std::size_t instance_index);

/// Predicate classes produced by the rule-based generator.
enum Predicate : int {
    kNone = 0,
    kAbove = 1,      // subject rests on top of object
    kNear = 2,       // horizontal centroid distance below kNearDistance
    kLeftOf = 3,     // object centroid lies more than kLeftOfGap further along +x
    kBiggerThan = 4, // subject bounding-box volume exceeds kBiggerRatio times the object's
};

inline constexpr double kNearDistance = 1.5;
inline constexpr double kLeftOfGap = 3.0;
inline constexpr double kBiggerRatio = 2.5;
inline constexpr double kStackTolerance = 0.3;

/// The generator's labeling oracle for ordered pair (subject, object). Rules
/// are tried in the order above; rules whose class id is not below
/// num_predicate_classes are disabled.
int predicate_oracle(const InstanceGeometry& subject, const InstanceGeometry& object,
                     std::size_t num_predicate_classes);

struct SynthOptions {
    std::uint64_t seed = 0;
    std::size_t min_instances = 4;
    std::size_t max_instances = 8;
    std::size_t num_object_classes = 8;
    std::size_t num_predicate_classes = 5; // including "none"
    std::size_t points_per_instance = 32;
};

/// Deterministic in options. Each object class has its own extent, color and
/// normal profile; predicates come from predicate_oracle on the emitted points.
/// Throws std::invalid_argument for ranges outside [2, 32] or too few classes.
SceneSample generate_synthetic_scene(const SynthOptions& options);

} // namespace edgegcn::data
