#include "edgegcn/scene.hpp"

#include "edgegcn/errors.hpp"
#include "text_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace edgegcn::data {

namespace fs = std::filesystem;

int SceneSample::predicate(std::size_t i, std::size_t j) const {
    const auto it = edge_labels.find({i, j});
    return it == edge_labels.end() ? kNonePredicate : it->second;
}

void validate_scene(const SceneSample& s, std::size_t num_object_classes, std::size_t num_predicate_classes) {
    const auto m = s.num_instances();
    if (s.points.size() != s.num_points() * kPointChannels) {
        throw std::invalid_argument("scene: points buffer is not N x 9");
    }
    std::vector<std::size_t> owned(m, 0);
    for (int id : s.instance) {
        if (id < 1 || static_cast<std::size_t>(id) > m) {
            throw std::invalid_argument("scene: instance id " + std::to_string(id) + " outside [1," +
                                        std::to_string(m) + "]");
        }
        ++owned[static_cast<std::size_t>(id - 1)];
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (!owned[i]) throw std::invalid_argument("scene: instance " + std::to_string(i + 1) + " owns no points");
    }
    for (int y : s.node_labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= num_object_classes) {
            throw std::invalid_argument("scene: object label " + std::to_string(y) + " out of range");
        }
    }
    for (const auto& [key, p] : s.edge_labels) {
        if (key.first == key.second) throw std::invalid_argument("scene: edge label on the diagonal");
        if (key.first >= m || key.second >= m) throw std::invalid_argument("scene: edge label index out of range");
        if (p < 0 || static_cast<std::size_t>(p) >= num_predicate_classes) {
            throw std::invalid_argument("scene: predicate " + std::to_string(p) + " out of range");
        }
    }
}

SceneSample load_scene(const fs::path& dir) {
    SceneSample s;
    const auto pts = (dir / "points.csv").string();
    for (const auto& [ln, line] : io::read_lines(pts)) {
        const auto cells = io::split(line, ',');
        if (cells.size() != kPointChannels) throw ParseError(pts, ln, "expected 9 values per point");
        for (const auto& c : cells) s.points.push_back(io::parse_double(c, pts, ln));
    }
    const auto inst = (dir / "instances.csv").string();
    for (const auto& [ln, line] : io::read_lines(inst)) {
        const auto id = io::parse_int(line, inst, ln);
        if (id < 1) throw ParseError(inst, ln, "instance ids are 1-based");
        s.instance.push_back(static_cast<int>(id));
    }
    if (s.instance.size() * kPointChannels != s.points.size()) {
        throw ParseError(inst, 0, "instance count differs from point count");
    }
    const auto nodes = (dir / "node_labels.csv").string();
    for (const auto& [ln, line] : io::read_lines(nodes)) {
        s.node_labels.push_back(static_cast<int>(io::parse_int(line, nodes, ln)));
    }
    const auto edges = (dir / "edge_labels.csv").string();
    if (fs::exists(edges)) {
        for (const auto& [ln, line] : io::read_lines(edges)) {
            const auto cells = io::split(line, ',');
            if (cells.size() != 3) throw ParseError(edges, ln, "expected 'i,j,predicate'");
            const auto i = io::parse_int(cells[0], edges, ln);
            const auto j = io::parse_int(cells[1], edges, ln);
            const auto p = io::parse_int(cells[2], edges, ln);
            if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= s.node_labels.size() ||
                static_cast<std::size_t>(j) >= s.node_labels.size()) {
                throw ParseError(edges, ln, "instance index out of range");
            }
            if (i == j) throw ParseError(edges, ln, "self-pairs cannot carry predicates");
            if (p != kNonePredicate) {
                s.edge_labels[{static_cast<std::size_t>(i), static_cast<std::size_t>(j)}] = static_cast<int>(p);
            }
        }
    }
    for (int id : s.instance) {
        if (static_cast<std::size_t>(id) > s.node_labels.size()) {
            throw ParseError(inst, 0, "instance id " + std::to_string(id) + " has no node label");
        }
    }
    return s;
}

void write_scene(const SceneSample& s, const fs::path& dir) {
    fs::create_directories(dir);
    {
        auto out = io::open_out(dir / "points.csv");
        for (std::size_t k = 0; k < s.num_points(); ++k) {
            for (std::size_t c = 0; c < kPointChannels; ++c) {
                if (c) out << ',';
                out << io::format_double(s.points[k * kPointChannels + c]);
            }
            out << '\n';
        }
    }
    {
        auto out = io::open_out(dir / "instances.csv");
        for (int id : s.instance) out << id << '\n';
    }
    {
        auto out = io::open_out(dir / "node_labels.csv");
        for (int y : s.node_labels) out << y << '\n';
    }
    {
        auto out = io::open_out(dir / "edge_labels.csv");
        for (const auto& [key, p] : s.edge_labels) out << key.first << ',' << key.second << ',' << p << '\n';
    }
}

std::vector<SceneSample> load_scene_collection(const fs::path& root) {
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory()) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    std::vector<SceneSample> scenes;
    for (const auto& d : dirs) scenes.push_back(load_scene(d));
    return scenes;
}

double InstanceGeometry::volume() const {
    return (max[0] - min[0]) * (max[1] - min[1]) * (max[2] - min[2]);
}

InstanceGeometry measure_instance(const SceneSample& s, std::size_t instance_index) {
    InstanceGeometry g;
    g.min.fill(std::numeric_limits<double>::infinity());
    g.max.fill(-std::numeric_limits<double>::infinity());
    std::size_t count = 0;
    for (std::size_t k = 0; k < s.num_points(); ++k) {
        if (static_cast<std::size_t>(s.instance[k]) != instance_index + 1) continue;
        ++count;
        for (std::size_t a = 0; a < 3; ++a) {
            const double v = s.points[k * kPointChannels + a];
            g.centroid[a] += v;
            g.min[a] = std::min(g.min[a], v);
            g.max[a] = std::max(g.max[a], v);
        }
    }
    if (!count) throw std::invalid_argument("measure_instance: instance " + std::to_string(instance_index + 1) + " is empty");
    for (auto& c : g.centroid) c /= static_cast<double>(count);
    return g;
}

int predicate_oracle(const InstanceGeometry& a, const InstanceGeometry& b, std::size_t num_predicate_classes) {
    const double dx = b.centroid[0] - a.centroid[0];
    const double dy = b.centroid[1] - a.centroid[1];
    const double dist = std::hypot(dx, dy);
    if (num_predicate_classes > kAbove && a.min[2] >= b.max[2] && std::abs(dx) < kStackTolerance &&
        std::abs(dy) < kStackTolerance) {
        return kAbove;
    }
    if (num_predicate_classes > kNear && dist < kNearDistance) return kNear;
    if (num_predicate_classes > kLeftOf && dx > kLeftOfGap) return kLeftOf;
    if (num_predicate_classes > kBiggerThan && a.volume() > kBiggerRatio * b.volume()) return kBiggerThan;
    return kNone;
}

namespace {

constexpr double kRoomHalfX = 3.5;
constexpr double kRoomHalfY = 4.5;
constexpr double kStackGap = 0.02;
constexpr double kStackProbability = 0.5;
constexpr std::size_t kPlacementTries = 400;

struct ClassProfile {
    std::array<double, 3> half_extent;
    std::array<double, 3> color;
    std::array<double, 3> normal;
    int tier; // 0 small, 1 medium, 2 large
};

ClassProfile class_profile(std::size_t c) {
    static constexpr double kTierHalf[3] = {0.15, 0.35, 0.7};
    static constexpr double kAspect[3][3] = {{1.0, 1.0, 1.0}, {1.4, 0.8, 0.9}, {0.8, 1.3, 1.1}};
    static constexpr double kPalette[8][3] = {{0.9, 0.1, 0.1}, {0.1, 0.8, 0.2}, {0.1, 0.2, 0.9}, {0.9, 0.8, 0.1},
                                              {0.8, 0.1, 0.8}, {0.1, 0.8, 0.8}, {0.5, 0.5, 0.5}, {0.95, 0.5, 0.1}};
    static constexpr double kNormals[6][3] = {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}, {0.577, 0.577, 0.577},
                                              {-0.707, 0, 0.707}, {0, -0.707, 0.707}};
    ClassProfile p{};
    p.tier = static_cast<int>(c % 3);
    const auto& aspect = kAspect[(c / 3) % 3];
    for (int a = 0; a < 3; ++a) {
        p.half_extent[static_cast<std::size_t>(a)] = kTierHalf[p.tier] * aspect[a];
        p.normal[static_cast<std::size_t>(a)] = kNormals[c % 6][a];
    }
    if (c < 8) {
        for (int a = 0; a < 3; ++a) p.color[static_cast<std::size_t>(a)] = kPalette[c][a];
    } else {
        std::mt19937_64 hash(0x9e3779b97f4a7c15ULL ^ c);
        std::uniform_real_distribution<double> u(0.05, 0.95);
        for (auto& v : p.color) v = u(hash);
    }
    return p;
}

struct Placed {
    InstanceGeometry geometry;
    int support = -1; // index of the instance this one rests on
    bool has_child = false;
};

// Keeps every pair away from rule thresholds so labels are unambiguous.
bool clean_pair(const Placed& a, std::size_t ia, const Placed& b, std::size_t ib) {
    const double dx = b.geometry.centroid[0] - a.geometry.centroid[0];
    const double dy = b.geometry.centroid[1] - a.geometry.centroid[1];
    const double dist = std::hypot(dx, dy);
    const bool stacked = a.support == static_cast<int>(ib) || b.support == static_cast<int>(ia);
    if (stacked) {
        if (std::abs(dx) > 0.2 || std::abs(dy) > 0.2) return false;
    } else if (dist < 0.6) {
        return false;
    }
    if (std::abs(dist - kNearDistance) < 0.3) return false;
    if (std::abs(std::abs(dx) - kLeftOfGap) < 0.3) return false;
    const double ratio = a.geometry.volume() / b.geometry.volume();
    for (double r : {ratio, 1.0 / ratio}) {
        if (r > 1.8 && r < 3.5) return false;
    }
    return true;
}

} // namespace

SceneSample generate_synthetic_scene(const SynthOptions& o) {
    if (o.min_instances < 2 || o.max_instances > 32 || o.min_instances > o.max_instances) {
        throw std::invalid_argument("generate_synthetic_scene: instance range must lie within [2, 32]");
    }
    if (o.num_object_classes < 1) throw std::invalid_argument("generate_synthetic_scene: need object classes");
    if (o.num_predicate_classes < 2 || o.num_predicate_classes > 5) {
        throw std::invalid_argument("generate_synthetic_scene: predicate classes must be in [2, 5]");
    }
    if (o.points_per_instance < 2) throw std::invalid_argument("generate_synthetic_scene: need >= 2 points per instance");

    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (std::size_t attempt = 0;; ++attempt) {
        const std::size_t m = o.min_instances + rng() % (o.max_instances - o.min_instances + 1);
        SceneSample s;
        std::vector<Placed> placed;
        bool failed = false;
        for (std::size_t i = 0; i < m && !failed; ++i) {
            const auto cls = static_cast<std::size_t>(rng() % o.num_object_classes);
            const auto prof = class_profile(cls);

            int support = -1;
            if (prof.tier < 2 && unit(rng) < kStackProbability) {
                std::vector<int> free;
                for (std::size_t k = 0; k < placed.size(); ++k) {
                    if (placed[k].support < 0 && !placed[k].has_child && class_profile(static_cast<std::size_t>(s.node_labels[k])).tier == 2) {
                        free.push_back(static_cast<int>(k));
                    }
                }
                if (!free.empty()) support = free[rng() % free.size()];
            }

            bool ok = false;
            std::vector<double> pts;
            Placed cand;
            for (std::size_t t = 0; t < kPlacementTries && !ok; ++t) {
                std::array<double, 3> half{};
                for (std::size_t a = 0; a < 3; ++a) half[a] = prof.half_extent[a] * (0.95 + 0.1 * unit(rng));
                double cx, cy, bottom;
                if (support >= 0) {
                    const auto& sg = placed[static_cast<std::size_t>(support)].geometry;
                    cx = sg.centroid[0];
                    cy = sg.centroid[1];
                    bottom = sg.max[2] + kStackGap;
                } else {
                    cx = (2.0 * unit(rng) - 1.0) * kRoomHalfX;
                    cy = (2.0 * unit(rng) - 1.0) * kRoomHalfY;
                    bottom = 0.0;
                }
                pts.clear();
                for (std::size_t k = 0; k < o.points_per_instance; ++k) {
                    const double x = cx + (2.0 * unit(rng) - 1.0) * half[0];
                    const double y = cy + (2.0 * unit(rng) - 1.0) * half[1];
                    const double z = bottom + unit(rng) * 2.0 * half[2];
                    pts.insert(pts.end(), {x, y, z});
                    for (std::size_t a = 0; a < 3; ++a) pts.push_back(std::clamp(prof.color[a] + 0.03 * gauss(rng), 0.0, 1.0));
                    std::array<double, 3> n{};
                    double norm = 0.0;
                    for (std::size_t a = 0; a < 3; ++a) {
                        n[a] = prof.normal[a] + 0.15 * gauss(rng);
                        norm += n[a] * n[a];
                    }
                    norm = std::sqrt(norm);
                    for (std::size_t a = 0; a < 3; ++a) pts.push_back(n[a] / norm);
                }
                cand = Placed{};
                cand.support = support;
                auto& g = cand.geometry;
                g.min.fill(std::numeric_limits<double>::infinity());
                g.max.fill(-std::numeric_limits<double>::infinity());
                for (std::size_t k = 0; k < o.points_per_instance; ++k) {
                    for (std::size_t a = 0; a < 3; ++a) {
                        const double v = pts[k * kPointChannels + a];
                        g.centroid[a] += v;
                        g.min[a] = std::min(g.min[a], v);
                        g.max[a] = std::max(g.max[a], v);
                    }
                }
                for (auto& c : g.centroid) c /= static_cast<double>(o.points_per_instance);
                ok = true;
                for (std::size_t k = 0; k < placed.size() && ok; ++k) ok = clean_pair(cand, i, placed[k], k);
            }
            if (!ok) {
                failed = true;
                break;
            }
            if (support >= 0) placed[static_cast<std::size_t>(support)].has_child = true;
            placed.push_back(cand);
            s.points.insert(s.points.end(), pts.begin(), pts.end());
            s.instance.insert(s.instance.end(), o.points_per_instance, static_cast<int>(i + 1));
            s.node_labels.push_back(static_cast<int>(cls));
        }
        if (failed) {
            if (attempt > 1000) throw std::runtime_error("generate_synthetic_scene: could not place instances");
            continue;
        }
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                if (i == j) continue;
                const int p = predicate_oracle(placed[i].geometry, placed[j].geometry, o.num_predicate_classes);
                if (p != kNone) s.edge_labels[{i, j}] = p;
            }
        }
        return s;
    }
}

} // namespace edgegcn::data
