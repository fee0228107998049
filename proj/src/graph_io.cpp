#include "fears/graph_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fears {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

/// Collects directed entries and turns them into a valid Graph.
class EntryCollector {
 public:
  void add(Index i, Index j, double w, std::size_t line) {
    if (!std::isfinite(w)) throw std::invalid_argument(where(line) + "non-finite weight");
    if (w < 0.0) throw std::invalid_argument(where(line) + "negative weight " + std::to_string(w));
    if (i < 0 || j < 0) throw std::invalid_argument(where(line) + "negative vertex id");
    max_id_ = std::max({max_id_, i, j});
    if (i == j) {
      ++diagonal_;
      return;
    }
    if (w == 0.0) {
      ++zeros_;
      return;
    }
    auto [it, inserted] = entries_.emplace(std::make_pair(i, j), w);
    if (!inserted) it->second = std::max(it->second, w);
  }

  LoadedGraph finish(Index n_vertices, bool expect_symmetric_pairs) {
    LoadedGraph out;
    if (diagonal_ > 0)
      out.warnings.push_back("dropped " + std::to_string(diagonal_) + " diagonal entries (self-loops)");
    if (zeros_ > 0)
      out.warnings.push_back("dropped " + std::to_string(zeros_) + " explicit zero-weight entries");

    std::vector<Edge> edges;
    edges.reserve(entries_.size());
    std::size_t asymmetric = 0;
    for (const auto& [key, w] : entries_) {
      const auto mirror = entries_.find({key.second, key.first});
      if (expect_symmetric_pairs) {
        const double other = mirror == entries_.end() ? 0.0 : mirror->second;
        if (std::abs(other - w) > 1e-12 * std::max(std::abs(w), std::abs(other))) ++asymmetric;
      }
      edges.push_back({key.first, key.second, w});
    }
    if (asymmetric > 0)
      out.warnings.push_back("input is asymmetric in " + std::to_string(asymmetric) +
                             " entries; symmetrized with max(W, W^T)");
    if (n_vertices < 1) throw std::invalid_argument("graph file contains no vertices");
    out.graph = Graph::from_edges(n_vertices, edges);
    return out;
  }

  Index max_id() const { return max_id_; }

 private:
  static std::string where(std::size_t line) { return "line " + std::to_string(line) + ": "; }

  std::map<std::pair<Index, Index>, double> entries_;
  Index max_id_ = -1;
  std::size_t diagonal_ = 0;
  std::size_t zeros_ = 0;
};

}  // namespace

GraphFormat parse_graph_format(std::string_view name) {
  if (name == "matrix-market" || name == "mtx") return GraphFormat::matrix_market;
  if (name == "edge-list" || name == "edges") return GraphFormat::edge_list;
  throw std::invalid_argument("unknown graph format: " + std::string(name));
}

GraphFormat guess_graph_format(const std::filesystem::path& path) {
  return lower(path.extension().string()) == ".mtx" ? GraphFormat::matrix_market
                                                     : GraphFormat::edge_list;
}

LoadedGraph load_graph(const std::filesystem::path& path, GraphFormat format) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open graph file " + path.string());
  return format == GraphFormat::matrix_market ? read_matrix_market(in) : read_edge_list(in);
}

LoadedGraph read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw std::invalid_argument("empty Matrix Market stream");

  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket") throw std::invalid_argument("missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix" || format != "coordinate")
    throw std::invalid_argument("only 'matrix coordinate' Matrix Market files are supported");
  const bool pattern = field == "pattern";
  if (!pattern && field != "real" && field != "integer" && field != "double")
    throw std::invalid_argument("unsupported Matrix Market field: " + field);
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general")
    throw std::invalid_argument("unsupported Matrix Market symmetry: " + symmetry);

  Index rows = 0, cols = 0, nnz = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream header(line);
    if (!(header >> rows >> cols >> nnz)) throw std::invalid_argument("malformed Matrix Market size line");
    break;
  }
  if (rows != cols) throw std::invalid_argument("adjacency matrix must be square");
  if (rows < 1) throw std::invalid_argument("adjacency matrix has no rows");

  EntryCollector collector;
  Index read = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream entry(line);
    Index i = 0, j = 0;
    double w = 1.0;
    if (!(entry >> i >> j)) throw std::invalid_argument("line " + std::to_string(line_no) + ": malformed entry");
    if (!pattern && !(entry >> w))
      throw std::invalid_argument("line " + std::to_string(line_no) + ": missing value");
    if (i < 1 || j < 1 || i > rows || j > cols)
      throw std::invalid_argument("line " + std::to_string(line_no) + ": index out of range");
    collector.add(i - 1, j - 1, w, line_no);
    if (symmetric) collector.add(j - 1, i - 1, w, line_no);
    ++read;
  }
  if (read != nnz)
    throw std::invalid_argument("Matrix Market header announces " + std::to_string(nnz) +
                                " entries, found " + std::to_string(read));
  return collector.finish(rows, !symmetric);
}

LoadedGraph read_edge_list(std::istream& in) {
  EntryCollector collector;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#' || line[first] == '%') continue;
    std::istringstream entry(line);
    Index i = 0, j = 0;
    double w = 1.0;
    if (!(entry >> i >> j)) throw std::invalid_argument("line " + std::to_string(line_no) + ": malformed edge");
    std::string extra;
    if (entry >> extra) {
      try {
        std::size_t used = 0;
        w = std::stod(extra, &used);
        if (used != extra.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": bad weight '" + extra + "'");
      }
    }
    // Edge lists name each undirected edge once; mirror it.
    collector.add(i, j, w, line_no);
    collector.add(j, i, w, line_no);
  }
  return collector.finish(collector.max_id() + 1, false);
}

void write_matrix_market(std::ostream& out, const Graph& graph) {
  const auto edges = graph.edges();
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << graph.n_vertices() << ' ' << graph.n_vertices() << ' ' << edges.size() << '\n';
  out << std::setprecision(17);
  // Lower triangle, as the symmetric format expects.
  for (const Edge& e : edges) out << e.target + 1 << ' ' << e.source + 1 << ' ' << e.weight << '\n';
}

void write_edge_list(std::ostream& out, const Graph& graph) {
  out << std::setprecision(17);
  for (const Edge& e : graph.edges()) out << e.source << ' ' << e.target << ' ' << e.weight << '\n';
}

Eigen::MatrixXd read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::invalid_argument("line " + std::to_string(line_no) + ": ragged CSV row");
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Index>(rows.size()), rows.empty() ? 0 : static_cast<Index>(rows[0].size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  out << std::setprecision(17);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

PointCloud read_point_cloud_csv(std::istream& in) {
  PointCloud cloud;
  cloud.points = read_matrix_csv(in);
  if (!cloud.points.allFinite()) throw std::invalid_argument("point cloud has non-finite coordinates");
  return cloud;
}

void write_point_cloud_csv(std::ostream& out, const PointCloud& cloud) { write_matrix_csv(out, cloud.points); }

void write_labels_csv(std::ostream& out, const std::vector<int>& labels) {
  out << "vertex_id,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << ',' << labels[i] << '\n';
}

std::vector<int> read_labels_csv(std::istream& in) {
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line_no == 1 && line.find("vertex") != std::string::npos) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("line " + std::to_string(line_no) + ": expected id,label");
    const long id = std::stol(line.substr(0, comma));
    if (id != static_cast<long>(labels.size()))
      throw std::invalid_argument("line " + std::to_string(line_no) + ": vertex ids must be 0..N-1 in order");
    labels.push_back(std::stoi(line.substr(comma + 1)));
  }
  return labels;
}

}  // namespace fears
