#include "edgegcn/graph_bundle.hpp"

#include "edgegcn/errors.hpp"
#include "text_io.hpp"

#include <algorithm>
#include <map>

namespace edgegcn::data {

namespace fs = std::filesystem;

const char* to_string(Split s) {
    switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
    }
    return "?";
}

Split parse_split(const std::string& name) {
    if (name == "train") return Split::train;
    if (name == "val") return Split::val;
    if (name == "test") return Split::test;
    throw std::invalid_argument("unknown split '" + name + "'");
}

std::vector<std::size_t> GraphBundle::nodes_in(Split s) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < split.size(); ++i)
        if (split[i] == s) out.push_back(i);
    return out;
}

std::vector<Edge> canonical_edges(std::vector<Edge> edges, bool directed) {
    if (!directed) {
        const auto n = edges.size();
        for (std::size_t k = 0; k < n; ++k) edges.emplace_back(edges[k].second, edges[k].first);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

GraphBundle load_graph_bundle(const fs::path& dir) {
    GraphBundle b;

    const auto meta_path = dir / "meta.txt";
    std::map<std::string, std::string> meta;
    for (const auto& [ln, line] : io::read_lines(meta_path)) {
        if (line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(meta_path.string(), ln, "expected key = value");
        meta[io::trim(line.substr(0, eq))] = io::trim(line.substr(eq + 1));
    }
    for (const char* key : {"num_nodes", "num_classes", "directed"}) {
        if (!meta.count(key)) throw ParseError(meta_path.string(), 0, std::string("missing key '") + key + "'");
    }
    b.num_nodes = static_cast<std::size_t>(io::parse_int(meta["num_nodes"], meta_path.string(), 0));
    b.num_classes = static_cast<std::size_t>(io::parse_int(meta["num_classes"], meta_path.string(), 0));
    const auto& directed = meta["directed"];
    if (directed != "true" && directed != "false") {
        throw ParseError(meta_path.string(), 0, "directed must be true or false");
    }
    b.directed = directed == "true";

    const auto feat_path = (dir / "features.csv").string();
    const auto feat_lines = io::read_lines(feat_path);
    if (feat_lines.size() != b.num_nodes) {
        throw ParseError(feat_path, 0, "expected " + std::to_string(b.num_nodes) + " rows, found " +
                                           std::to_string(feat_lines.size()));
    }
    for (const auto& [ln, line] : feat_lines) {
        const auto cells = io::split(line, ',');
        if (b.features.empty()) b.num_features = cells.size();
        if (cells.size() != b.num_features) {
            throw ParseError(feat_path, ln, "ragged row: " + std::to_string(cells.size()) + " values, expected " +
                                                std::to_string(b.num_features));
        }
        for (const auto& c : cells) b.features.push_back(io::parse_double(c, feat_path, ln));
    }

    const auto label_path = (dir / "labels.csv").string();
    const auto label_lines = io::read_lines(label_path);
    if (label_lines.size() != b.num_nodes) {
        throw ParseError(label_path, 0, "expected " + std::to_string(b.num_nodes) + " labels");
    }
    for (const auto& [ln, line] : label_lines) {
        const auto y = io::parse_int(line, label_path, ln);
        if (y < 0 || static_cast<std::size_t>(y) >= b.num_classes) {
            throw ParseError(label_path, ln, "label " + line + " outside [0," + std::to_string(b.num_classes) + ")");
        }
        b.labels.push_back(static_cast<int>(y));
    }

    const auto edge_path = (dir / "edges.csv").string();
    std::vector<Edge> edges;
    for (const auto& [ln, line] : io::read_lines(edge_path)) {
        const auto cells = io::split(line, ',');
        if (cells.size() != 2) throw ParseError(edge_path, ln, "expected 'src,dst'");
        const auto s = io::parse_int(cells[0], edge_path, ln);
        const auto d = io::parse_int(cells[1], edge_path, ln);
        if (s < 0 || d < 0 || static_cast<std::size_t>(s) >= b.num_nodes ||
            static_cast<std::size_t>(d) >= b.num_nodes) {
            throw ParseError(edge_path, ln, "edge endpoint outside [0," + std::to_string(b.num_nodes) + ")");
        }
        edges.emplace_back(static_cast<std::size_t>(s), static_cast<std::size_t>(d));
    }
    b.edges = canonical_edges(std::move(edges), b.directed);

    const auto split_path = (dir / "splits.csv").string();
    const auto split_lines = io::read_lines(split_path);
    if (split_lines.size() != b.num_nodes) {
        throw ParseError(split_path, 0, "expected " + std::to_string(b.num_nodes) + " split tags");
    }
    for (const auto& [ln, line] : split_lines) {
        try {
            b.split.push_back(parse_split(line));
        } catch (const std::invalid_argument&) {
            throw ParseError(split_path, ln, "split tag must be train, val or test, got '" + line + "'");
        }
    }
    return b;
}

void write_graph_bundle(const GraphBundle& b, const fs::path& dir) {
    fs::create_directories(dir);
    {
        auto out = io::open_out(dir / "meta.txt");
        out << "num_nodes = " << b.num_nodes << "\nnum_classes = " << b.num_classes
            << "\ndirected = " << (b.directed ? "true" : "false") << "\n";
    }
    {
        auto out = io::open_out(dir / "features.csv");
        for (std::size_t i = 0; i < b.num_nodes; ++i) {
            for (std::size_t c = 0; c < b.num_features; ++c) {
                if (c) out << ',';
                out << io::format_double(b.features[i * b.num_features + c]);
            }
            out << '\n';
        }
    }
    {
        auto out = io::open_out(dir / "labels.csv");
        for (int y : b.labels) out << y << '\n';
    }
    {
        auto out = io::open_out(dir / "edges.csv");
        for (const auto& [s, d] : b.edges) out << s << ',' << d << '\n';
    }
    {
        auto out = io::open_out(dir / "splits.csv");
        for (auto s : b.split) out << to_string(s) << '\n';
    }
}

void row_normalize_features(GraphBundle& b) {
    for (std::size_t i = 0; i < b.num_nodes; ++i) {
        double sum = 0.0;
        for (std::size_t c = 0; c < b.num_features; ++c) sum += b.features[i * b.num_features + c];
        if (sum == 0.0) continue;
        for (std::size_t c = 0; c < b.num_features; ++c) b.features[i * b.num_features + c] /= sum;
    }
}

} // namespace edgegcn::data
