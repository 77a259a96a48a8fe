#include "spinbench/planarity.hpp"

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boyer_myrvold_planar_test.hpp>
#include <boost/graph/graph_traits.hpp>
#include <boost/graph/properties.hpp>

namespace spinbench::planar {

namespace {
using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS, boost::no_property,
                                    boost::property<boost::edge_index_t, int>>;
using Edge = boost::graph_traits<Graph>::edge_descriptor;
}  // namespace

PlanarityResult test_planarity(int nodes, const std::vector<std::pair<int, int>>& edges) {
    Graph g(static_cast<std::size_t>(nodes));
    for (const auto& [u, v] : edges) boost::add_edge(static_cast<std::size_t>(u), static_cast<std::size_t>(v), g);
    int index = 0;
    boost::graph_traits<Graph>::edge_iterator ei, ei_end;
    for (boost::tie(ei, ei_end) = boost::edges(g); ei != ei_end; ++ei) boost::put(boost::edge_index, g, *ei, index++);

    std::vector<std::vector<Edge>> embedding(static_cast<std::size_t>(nodes));
    std::vector<Edge> kuratowski;
    const bool planar = boost::boyer_myrvold_planarity_test(
        boost::boyer_myrvold_params::graph = g,
        boost::boyer_myrvold_params::embedding =
            boost::make_iterator_property_map(embedding.begin(), boost::get(boost::vertex_index, g)),
        boost::boyer_myrvold_params::kuratowski_subgraph = std::back_inserter(kuratowski));

    PlanarityResult result;
    result.planar = planar;
    if (planar) {
        result.rotation.resize(static_cast<std::size_t>(nodes));
        for (int v = 0; v < nodes; ++v) {
            for (const Edge& e : embedding[static_cast<std::size_t>(v)]) {
                const auto s = static_cast<int>(boost::source(e, g));
                const auto t = static_cast<int>(boost::target(e, g));
                result.rotation[static_cast<std::size_t>(v)].push_back(s == v ? t : s);
            }
        }
    } else {
        for (const Edge& e : kuratowski) {
            result.kuratowski_edges.emplace_back(static_cast<int>(boost::source(e, g)), static_cast<int>(boost::target(e, g)));
        }
    }
    return result;
}

}  // namespace spinbench::planar
