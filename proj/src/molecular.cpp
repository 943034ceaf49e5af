#include "edgegcn/molecular.hpp"

#include "edgegcn/errors.hpp"
#include "text_io.hpp"

#include <json.hpp>

namespace edgegcn::data {

using nlohmann::json;

std::vector<std::size_t> MolecularSet::graphs_in(Split s) const {
    std::vector<std::size_t> out;
    for (std::size_t g = 0; g < graphs.size(); ++g)
        if (graphs[g].split == s) out.push_back(g);
    return out;
}

MolecularSet load_molecular_set(const std::filesystem::path& path) {
    const auto file = path.string();
    MolecularSet set;
    for (const auto& [ln, line] : io::read_lines(path)) {
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(file, ln, std::string("invalid JSON: ") + e.what());
        }
        MolecularGraph g;
        try {
            const auto& feats = j.at("node_features");
            g.num_nodes = feats.size();
            if (g.num_nodes == 0) throw ParseError(file, ln, "graph has no nodes");
            g.num_features = feats.at(0).size();
            for (const auto& row : feats) {
                if (row.size() != g.num_features) throw ParseError(file, ln, "ragged node_features");
                for (const auto& v : row) g.node_features.push_back(v.get<double>());
            }
            std::vector<Edge> edges;
            for (const auto& e : j.at("edges")) {
                if (e.size() != 2) throw ParseError(file, ln, "edge must be [src, dst]");
                const auto s = e.at(0).get<long long>();
                const auto d = e.at(1).get<long long>();
                if (s < 0 || d < 0 || static_cast<std::size_t>(s) >= g.num_nodes ||
                    static_cast<std::size_t>(d) >= g.num_nodes) {
                    throw ParseError(file, ln, "edge endpoint out of range");
                }
                edges.emplace_back(static_cast<std::size_t>(s), static_cast<std::size_t>(d));
            }
            g.edges = canonical_edges(std::move(edges), false);
            g.label = j.at("label").get<int>();
            if (g.label != 0 && g.label != 1) throw ParseError(file, ln, "label must be 0 or 1");
            g.split = parse_split(j.at("split").get<std::string>());
        } catch (const json::exception& e) {
            throw ParseError(file, ln, e.what());
        } catch (const std::invalid_argument& e) {
            throw ParseError(file, ln, e.what());
        }
        if (!set.graphs.empty() && g.num_features != set.num_features()) {
            throw ParseError(file, ln, "feature width differs from earlier graphs");
        }
        set.graphs.push_back(std::move(g));
    }
    return set;
}

void write_molecular_set(const MolecularSet& set, const std::filesystem::path& path) {
    auto out = io::open_out(path);
    for (const auto& g : set.graphs) {
        json feats = json::array();
        for (std::size_t i = 0; i < g.num_nodes; ++i) {
            feats.push_back(std::vector<double>(g.node_features.begin() + static_cast<long>(i * g.num_features),
                                                g.node_features.begin() + static_cast<long>((i + 1) * g.num_features)));
        }
        json edges = json::array();
        for (const auto& [s, d] : g.edges) edges.push_back({s, d});
        json j{{"node_features", feats}, {"edges", edges}, {"label", g.label}, {"split", to_string(g.split)}};
        out << j.dump() << '\n';
    }
}

} // namespace edgegcn::data
