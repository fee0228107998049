#pragma once

#include "fears/graph.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace fears {

enum class GraphFormat { matrix_market, edge_list };

GraphFormat parse_graph_format(std::string_view name);
/// .mtx -> matrix_market, anything else -> edge_list.
GraphFormat guess_graph_format(const std::filesystem::path& path);

struct LoadedGraph {
  Graph graph;
  std::vector<std::string> warnings;
};

/**
 * Reads a graph file and normalizes it into a valid Graph.
 *
 * Matrix Market: coordinate real/integer/pattern, general or symmetric,
 * 1-based. Edge list: `src dst [weight]` per line, 0-based, '#' or '%'
 * comments. Diagonal entries are dropped and asymmetric input is symmetrized
 * with max(W, W^T); both produce warnings. Explicit zeros are dropped with a
 * warning. Negative or non-finite weights throw std::invalid_argument.
 */
LoadedGraph load_graph(const std::filesystem::path& path, GraphFormat format);
LoadedGraph read_matrix_market(std::istream& in);
LoadedGraph read_edge_list(std::istream& in);

void write_matrix_market(std::ostream& out, const Graph& graph);
void write_edge_list(std::ostream& out, const Graph& graph);

/// One point per row, comma separated, no header.
PointCloud read_point_cloud_csv(std::istream& in);
void write_point_cloud_csv(std::ostream& out, const PointCloud& cloud);

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(std::istream& in);

/// `vertex_id,label` rows with a header line.
void write_labels_csv(std::ostream& out, const std::vector<int>& labels);
std::vector<int> read_labels_csv(std::istream& in);

}  // namespace fears
