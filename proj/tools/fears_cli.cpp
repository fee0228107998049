#include "fears/eigencount.hpp"
#include "fears/eigenspace.hpp"
#include "fears/generators.hpp"
#include "fears/graph_io.hpp"
#include "fears/metrics.hpp"
#include "fears/oracle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace fears;

namespace {

constexpr const char* kSchemaVersion = "1.0.0";
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Thrown for bad option combinations detected after parsing.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GlobalOptions {
  int threads = 1;
  std::uint64_t seed = 0;
  std::string out = ".";
  std::string laplacian = "normalized";
};

struct GraphOptions {
  std::string input;
  std::string format;
  std::string synth;
  Index n = 1000;
  int classes = 10;
  double eps = 0.1;
  double degree = 16.0;
  Index knn = 10;
  std::string kernel = "binary";
  std::optional<double> sigma;
  double a = 1.0;
  double b = 4.0;
  std::string labels;
};

struct EmbedOptions {
  Index k = 0;
  Index d = 0;
  int m = 500;
  std::string lambda_mode = "fast";
  std::optional<double> lambda_k;
  int max_iter = 10;
  double tol_eps = 0.1;
  std::string damping = "jackson";
  std::string orth = "svd";
};

struct GraphBundle {
  Graph graph;
  std::optional<std::vector<int>> labels;
  std::optional<PointCloud> points;
  std::string description;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Collects everything that ends up in report.json.
class Report {
 public:
  explicit Report(std::string command) {
    doc_["schema_version"] = kSchemaVersion;
    doc_["tool"] = "fears";
    doc_["command"] = std::move(command);
    doc_["config"] = json::object();
    doc_["status"] = "ok";
    doc_["timings"] = json::object();
    doc_["counters"] = json::object();
    doc_["lambda_k"] = nullptr;
    doc_["metrics"] = json::object();
    doc_["outputs"] = json::array();
    doc_["warnings"] = json::array();
  }

  json& config() { return doc_["config"]; }
  json& metrics() { return doc_["metrics"]; }
  void timing(const std::string& stage, double seconds) { doc_["timings"][stage] = seconds; }
  void warn(const std::string& message) {
    std::cerr << "warning: " << message << '\n';
    doc_["warnings"].push_back(message);
  }
  void output(const fs::path& path) { doc_["outputs"].push_back(path.string()); }
  void counters(const OpCounter& ops, std::uint64_t filter_spmv, std::uint64_t probe_spmv) {
    doc_["counters"] = {{"spmv", ops.spmv},
                        {"block_products", ops.block_products},
                        {"filter_calls", ops.filter_calls},
                        {"filter_spmv", filter_spmv},
                        {"probe_spmv", probe_spmv},
                        {"qr_calls", ops.qr_calls},
                        {"qr_cost", ops.qr_cost},
                        {"svd_calls", ops.svd_calls},
                        {"svd_core_cost", ops.svd_core_cost}};
  }
  void lambda_k(const std::string& mode, double value, int iterations, bool converged,
                const std::vector<Probe>& history) {
    json h = json::array();
    for (const Probe& p : history)
      h.push_back({{"iteration", p.iteration},
                   {"lambda", p.lambda},
                   {"count", p.count},
                   {"lambda_lb", p.lambda_lb},
                   {"lambda_ub", p.lambda_ub},
                   {"count_lb", p.count_lb},
                   {"count_ub", p.count_ub},
                   {"bisected", p.bisected}});
    doc_["lambda_k"] = {{"mode", mode},
                        {"value", value},
                        {"iterations", iterations},
                        {"converged", converged},
                        {"history", std::move(h)}};
  }

  void write(const fs::path& dir) {
    const fs::path path = dir / "report.json";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << doc_.dump(2) << '\n';
    std::cout << path.string() << '\n';
  }

 private:
  json doc_;
};

void emit_error(const std::string& command, const std::string& kind, const std::string& message) {
  const json err = {{"schema_version", kSchemaVersion},
                    {"tool", "fears"},
                    {"command", command},
                    {"status", "error"},
                    {"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << err.dump() << '\n';
}

fs::path prepare_out_dir(const GlobalOptions& g) {
  const fs::path dir(g.out);
  fs::create_directories(dir);
  return dir;
}

template <typename Writer>
fs::path write_file(const fs::path& dir, const std::string& name, Report& report, Writer&& writer) {
  const fs::path path = dir / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  writer(out);
  if (!out) throw std::runtime_error("failed while writing " + path.string());
  report.output(path);
  return path;
}

std::vector<int> load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open labels file " + path);
  return read_labels_csv(in);
}

Eigen::MatrixXd load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open CSV file " + path);
  return read_matrix_csv(in);
}

GraphBundle make_graph(const GraphOptions& o, std::uint64_t seed, Report& report) {
  if (o.input.empty() == o.synth.empty()) throw UsageError("give exactly one of --input or --synth");
  GraphBundle bundle;
  if (!o.input.empty()) {
    if (!fs::exists(o.input)) throw UsageError("input file does not exist: " + o.input);
    const GraphFormat format = o.format.empty() ? guess_graph_format(o.input) : parse_graph_format(o.format);
    LoadedGraph loaded = load_graph(o.input, format);
    for (const auto& w : loaded.warnings) report.warn(w);
    bundle.graph = std::move(loaded.graph);
    bundle.description = o.input;
  } else {
    const KernelType kernel = parse_kernel(o.kernel);
    if (o.synth == "sbm") {
      SbmGraph sbm = generate_sbm(o.n, o.classes, o.eps, o.degree, seed);
      bundle.graph = std::move(sbm.graph);
      bundle.labels = std::move(sbm.labels);
    } else if (o.synth == "sensor") {
      PointCloud cloud = generate_sensor_points(o.n, seed);
      bundle.graph = build_knn_graph(cloud, o.knn, kernel, o.sigma);
      bundle.points = std::move(cloud);
    } else if (o.synth == "swissroll") {
      PointCloud cloud = generate_swissroll(o.n, o.a, o.b, seed);
      bundle.graph = build_knn_graph(cloud, o.knn, kernel, o.sigma);
      bundle.points = std::move(cloud);
    } else if (o.synth == "cycle") {
      bundle.graph = cycle_graph(o.n);
    } else if (o.synth == "path") {
      bundle.graph = path_graph(o.n);
    } else if (o.synth == "complete") {
      bundle.graph = complete_graph(o.n);
    } else {
      throw UsageError("unknown generator: " + o.synth);
    }
    bundle.description = o.synth;
  }
  if (!o.labels.empty()) {
    bundle.labels = load_labels(o.labels);
    if (static_cast<Index>(bundle.labels->size()) != bundle.graph.n_vertices())
      throw UsageError("labels file does not match the graph size");
  }
  return bundle;
}

json graph_config(const GraphOptions& o) {
  json c;
  if (!o.input.empty()) {
    c["input"] = o.input;
    c["format"] = o.format.empty() ? "auto" : o.format;
  } else {
    c["synth"] = o.synth;
    c["n"] = o.n;
    if (o.synth == "sbm") {
      c["classes"] = o.classes;
      c["eps"] = o.eps;
      c["degree"] = o.degree;
    } else if (o.synth == "sensor" || o.synth == "swissroll") {
      c["knn"] = o.knn;
      c["kernel"] = o.kernel;
      c["sigma"] = o.sigma ? json(*o.sigma) : json(nullptr);
      if (o.synth == "swissroll") {
        c["a"] = o.a;
        c["b"] = o.b;
      }
    }
  }
  if (!o.labels.empty()) c["labels"] = o.labels;
  return c;
}

json embed_config(const EmbedOptions& e) {
  return {{"k", e.k},
          {"d", e.d == 0 ? e.k : e.d},
          {"m", e.m},
          {"lambda_mode", e.lambda_mode},
          {"lambda_k", e.lambda_k ? json(*e.lambda_k) : json(nullptr)},
          {"max_iter", e.max_iter},
          {"tol_eps", e.tol_eps},
          {"damping", e.damping},
          {"orth", e.orth}};
}

json global_config(const GlobalOptions& g) {
  return {{"threads", g.threads}, {"seed", g.seed}, {"out", g.out}, {"laplacian", g.laplacian}};
}

void write_probes_csv(std::ostream& out, const std::vector<Probe>& history) {
  out << std::setprecision(17) << "iteration,lambda,count,lambda_lb,lambda_ub,count_lb,count_ub,bisected\n";
  for (const Probe& p : history)
    out << p.iteration << ',' << p.lambda << ',' << p.count << ',' << p.lambda_lb << ',' << p.lambda_ub << ','
        << p.count_lb << ',' << p.count_ub << ',' << (p.bisected ? 1 : 0) << '\n';
}

void write_vector_csv(std::ostream& out, const std::string& header, const Eigen::VectorXd& v) {
  out << std::setprecision(17) << "index," << header << '\n';
  for (Index i = 0; i < v.size(); ++i) out << i << ',' << v[i] << '\n';
}

// Lowest `count` eigenpairs: dense below the oracle cap, Lanczos above it.
PartialSpectrum low_spectrum(const LaplacianOperator& L, Index count, const std::string& solver) {
  const bool dense = solver == "dense" || (solver == "auto" && L.size() <= oracle_cap());
  if (solver != "auto" && solver != "dense" && solver != "arpack") throw UsageError("unknown solver: " + solver);
  if (dense) {
    const ExactSpectrum spec = dense_eigendecomposition(L);
    return {spec.eigenvalues.head(count), spec.eigenvectors.leftCols(count)};
  }
  return reference_low_spectrum(L, count);
}

void check_k(Index k, Index n) {
  if (k < 1) throw UsageError("--k must be at least 1");
  if (k > n) throw UsageError("--k exceeds the number of vertices");
}

struct EmbeddingRun {
  EigenspaceApprox approx;
  std::optional<PartialSpectrum> reference;
};

EmbeddingRun run_embedding(const LaplacianOperator& L, const EmbedOptions& e, const GlobalOptions& g,
                           Report& report) {
  check_k(e.k, L.size());
  if (e.d != 0 && e.d < e.k) throw UsageError("--d must be at least --k");
  EigenspaceOptions opts;
  opts.d = e.d;
  opts.m = e.m;
  opts.seed = g.seed;
  opts.max_iter = e.max_iter;
  opts.tol_eps = e.tol_eps;
  opts.damping = parse_damping(e.damping);
  opts.orthonormalization = parse_orthonormalization(e.orth);
  opts.threads = g.threads;

  EmbeddingRun run;
  if (e.lambda_mode == "fixed") {
    if (!e.lambda_k) throw UsageError("--lambda-mode fixed needs --lambda-k");
    opts.lambda_k = *e.lambda_k;
  } else if (e.lambda_mode == "exact-oracle") {
    if (e.lambda_k) throw UsageError("--lambda-k only applies to --lambda-mode fixed");
    const Stopwatch sw;
    run.reference = low_spectrum(L, std::min(e.k + 1, L.size()), "auto");
    report.timing("oracle", sw.seconds());
    opts.lambda_k = run.reference->eigenvalues[e.k - 1];
  } else {
    if (e.lambda_k) throw UsageError("--lambda-k only applies to --lambda-mode fixed");
    opts.search = parse_lambda_search(e.lambda_mode);
  }

  const Stopwatch sw;
  run.approx = approximate_eigenspace(L, e.k, opts);
  report.timing("embed", sw.seconds());
  const auto& diag = run.approx.diagnostics;
  report.counters(diag.ops, diag.filter_spmv, diag.probe_spmv);
  report.lambda_k(e.lambda_mode, run.approx.lambda_k_used, diag.lambda_iterations, diag.lambda_converged,
                  diag.lambda_history);
  if (!diag.lambda_converged) report.warn("lambda_k search did not converge; using the closest probe");
  return run;
}

// Subcommand bodies ---------------------------------------------------------

void cmd_synth(const GlobalOptions& g, const GraphOptions& go, const std::string& graph_format, Report& report) {
  if (go.synth.empty() || !go.input.empty()) throw UsageError("synth needs --synth and no --input");
  report.config() = {{"global", global_config(g)}, {"graph", graph_config(go)}, {"graph_format", graph_format}};
  const fs::path dir = prepare_out_dir(g);
  const Stopwatch sw;
  const GraphBundle bundle = make_graph(go, g.seed, report);
  report.timing("generate", sw.seconds());
  const GraphFormat format = parse_graph_format(graph_format);
  const std::string name = format == GraphFormat::matrix_market ? "graph.mtx" : "graph.edges";
  write_file(dir, name, report, [&](std::ostream& out) {
    format == GraphFormat::matrix_market ? write_matrix_market(out, bundle.graph) : write_edge_list(out, bundle.graph);
  });
  if (bundle.labels)
    write_file(dir, "labels.csv", report, [&](std::ostream& out) { write_labels_csv(out, *bundle.labels); });
  if (bundle.points)
    write_file(dir, "points.csv", report, [&](std::ostream& out) { write_point_cloud_csv(out, *bundle.points); });
  report.metrics() = {{"n_vertices", bundle.graph.n_vertices()},
                      {"n_edges", bundle.graph.n_edges()},
                      {"total_weight", bundle.graph.total_weight()}};
}

void cmd_embed(const GlobalOptions& g, const GraphOptions& go, const EmbedOptions& e, bool reference_me,
               Report& report) {
  report.config() = {{"global", global_config(g)},
                     {"graph", graph_config(go)},
                     {"embed", embed_config(e)},
                     {"reference_me", reference_me}};
  const fs::path dir = prepare_out_dir(g);
  const GraphBundle bundle = make_graph(go, g.seed, report);
  const LaplacianOperator L = laplacian(bundle.graph, parse_laplacian_variant(g.laplacian));
  EmbeddingRun run = run_embedding(L, e, g, report);

  write_file(dir, "embedding.csv", report, [&](std::ostream& out) { write_matrix_csv(out, run.approx.basis); });
  write_file(dir, "singular_values.csv", report,
             [&](std::ostream& out) { write_vector_csv(out, "singular_value", run.approx.singular_values); });
  if (run.approx.diagnostics.lambda_estimated)
    write_file(dir, "lambda_history.csv", report,
               [&](std::ostream& out) { write_probes_csv(out, run.approx.diagnostics.lambda_history); });

  report.metrics()["n_vertices"] = L.size();
  report.metrics()["lambda_max_bound"] = L.lambda_max_bound;
  if (reference_me) {
    if (!run.reference) {
      const Stopwatch sw;
      run.reference = low_spectrum(L, e.k, "auto");
      report.timing("oracle", sw.seconds());
    }
    report.metrics()["mean_energy"] = mean_energy(run.approx.basis, run.reference->eigenvectors.leftCols(e.k));
  }
}

void cmd_lambdak(const GlobalOptions& g, const GraphOptions& go, const EmbedOptions& e, const std::string& method,
                 Report& report) {
  json cfg = embed_config(e);
  cfg["method"] = method;
  report.config() = {{"global", global_config(g)}, {"graph", graph_config(go)}, {"lambdak", cfg}};
  const fs::path dir = prepare_out_dir(g);
  const GraphBundle bundle = make_graph(go, g.seed, report);
  const LaplacianOperator L = laplacian(bundle.graph, parse_laplacian_variant(g.laplacian));
  check_k(e.k, L.size());
  OpCounter counter;
  const ChebyshevLowpass filter(L, e.m, parse_damping(e.damping), &counter, g.threads);
  const Index d = e.d == 0 ? e.k : e.d;
  const std::uint64_t seed = probe_seed_for(g.seed);

  const Stopwatch sw;
  LambdaEstimate est;
  if (parse_lambda_search(method) == LambdaSearch::fast)
    est = estimate_lambda_k_fast(filter, e.k, {.d = d, .max_iter = e.max_iter, .seed = seed});
  else
    est = estimate_lambda_k_dichotomy(filter, e.k, {.d = d, .tol_eps = e.tol_eps, .seed = seed});
  report.timing("search", sw.seconds());

  write_file(dir, "probes.csv", report, [&](std::ostream& out) { write_probes_csv(out, est.history); });
  report.counters(counter, 0, counter.spmv);
  report.lambda_k(method, est.lambda_est, est.iterations, est.converged, est.history);
  report.metrics() = {{"count_est", est.count_est}, {"lambda_max_bound", L.lambda_max_bound}};
  if (!est.converged) report.warn("lambda_k search did not converge; using the closest probe");
}

void cmd_cluster(const GlobalOptions& g, const GraphOptions& go, const EmbedOptions& e, const std::string& features,
                 bool compare_sc, int restarts, Report& report) {
  report.config() = {{"global", global_config(g)},
                     {"graph", graph_config(go)},
                     {"embed", embed_config(e)},
                     {"features", features},
                     {"compare_sc", compare_sc},
                     {"restarts", restarts}};
  const fs::path dir = prepare_out_dir(g);
  const GraphBundle bundle = make_graph(go, g.seed, report);
  const LaplacianOperator L = laplacian(bundle.graph, parse_laplacian_variant(g.laplacian));
  check_k(e.k, L.size());
  const KMeansOptions km{.restarts = restarts, .seed = g.seed, .threads = g.threads};

  std::optional<PartialSpectrum> reference;
  auto oracle = [&]() -> const PartialSpectrum& {
    if (!reference) {
      const Stopwatch sw;
      reference = low_spectrum(L, e.k, "auto");
      report.timing("oracle", sw.seconds());
    }
    return *reference;
  };

  Eigen::MatrixXd rows;
  if (features == "fears") {
    rows = run_embedding(L, e, g, report).approx.basis;
  } else if (features == "oracle") {
    rows = oracle().eigenvectors.leftCols(e.k);
  } else {
    throw UsageError("unknown feature source: " + features);
  }

  Stopwatch sw;
  const KMeansResult result = kmeans(rows, static_cast<int>(e.k), km);
  report.timing("kmeans", sw.seconds());
  write_file(dir, "partition.csv", report,
             [&](std::ostream& out) { write_labels_csv(out, result.partition.labels); });

  json& m = report.metrics();
  m["wcss"] = result.wcss;
  m["kmeans_iterations"] = result.iterations;
  m["empty_clusters"] = result.partition.empty_clusters();
  m["modularity"] = modularity(bundle.graph, result.partition);
  if (bundle.labels) m["ari_vs_labels"] = adjusted_rand(result.partition, make_partition(*bundle.labels));
  if (compare_sc) {
    sw = Stopwatch();
    const KMeansResult sc = kmeans(oracle().eigenvectors.leftCols(e.k), static_cast<int>(e.k), km);
    report.timing("kmeans_sc", sw.seconds());
    m["ari_vs_sc"] = adjusted_rand(result.partition, sc.partition);
    m["sc_modularity"] = modularity(bundle.graph, sc.partition);
  }
}

void cmd_oracle(const GlobalOptions& g, const GraphOptions& go, Index count, const std::string& solver, bool vectors,
                Report& report) {
  report.config() = {{"global", global_config(g)},
                     {"graph", graph_config(go)},
                     {"count", count},
                     {"solver", solver},
                     {"vectors", vectors}};
  const fs::path dir = prepare_out_dir(g);
  const GraphBundle bundle = make_graph(go, g.seed, report);
  const LaplacianOperator L = laplacian(bundle.graph, parse_laplacian_variant(g.laplacian));
  const Index n = L.size();
  const Index c = count == 0 ? n : count;
  if (c < 1 || c > n) throw UsageError("--count must lie in [1, N]");
  if (solver == "arpack" && c >= n) throw UsageError("the Lanczos solver needs --count < N");
  const Stopwatch sw;
  const PartialSpectrum spec = low_spectrum(L, c, solver);
  report.timing("oracle", sw.seconds());
  write_file(dir, "eigenvalues.csv", report,
             [&](std::ostream& out) { write_vector_csv(out, "eigenvalue", spec.eigenvalues); });
  if (vectors)
    write_file(dir, "eigenvectors.csv", report, [&](std::ostream& out) { write_matrix_csv(out, spec.eigenvectors); });
  report.metrics() = {{"n_vertices", n},
                      {"lambda_max_bound", L.lambda_max_bound},
                      {"smallest", spec.eigenvalues[0]},
                      {"largest_returned", spec.eigenvalues[c - 1]}};
}

struct BenchOptions {
  std::string regime = "logN";
  Index n_min = 1000;
  Index n_max = 16000;
  double growth = 2.0;
  Index k_min = 5;
  Index k_max = 80;
  Index knn = 10;
  bool compare_arpack = false;
};

void cmd_bench(const GlobalOptions& g, const BenchOptions& b, const EmbedOptions& e, Report& report) {
  report.config() = {{"global", global_config(g)},
                     {"regime", b.regime},
                     {"n_min", b.n_min},
                     {"n_max", b.n_max},
                     {"growth", b.growth},
                     {"k_min", b.k_min},
                     {"k_max", b.k_max},
                     {"knn", b.knn},
                     {"compare_arpack", b.compare_arpack},
                     {"embed", embed_config(e)}};
  if (b.n_min < 2 || b.n_max < b.n_min) throw UsageError("need 2 <= --n-min <= --n-max");
  if (!(b.growth > 1.0)) throw UsageError("--growth must exceed 1");

  std::vector<std::pair<Index, Index>> plan;  // (N, k)
  if (b.regime == "fixedN") {
    if (b.k_min < 1 || b.k_max < b.k_min) throw UsageError("need 1 <= --k-min <= --k-max");
    for (double k = static_cast<double>(b.k_min); k <= static_cast<double>(b.k_max) + 0.5; k *= b.growth)
      plan.emplace_back(b.n_max, static_cast<Index>(std::lround(k)));
  } else if (b.regime == "logN" || b.regime == "sqrtN") {
    for (double n = static_cast<double>(b.n_min); n <= static_cast<double>(b.n_max) + 0.5; n *= b.growth) {
      const Index nn = static_cast<Index>(std::lround(n));
      const double k = b.regime == "logN" ? std::log(n) : std::sqrt(n);
      plan.emplace_back(nn, std::max<Index>(1, static_cast<Index>(std::lround(k))));
    }
  } else {
    throw UsageError("unknown regime: " + b.regime);
  }

  const fs::path dir = prepare_out_dir(g);
  json rows = json::array();
  std::ostringstream csv;
  csv << std::setprecision(17)
      << "regime,N,k,d,m,edges,lambda_iterations,lambda_converged,filter_spmv,probe_spmv,spmv,svd_core_cost,qr_cost,"
         "wall_seconds,arpack_seconds\n";
  OpCounter total;
  const Stopwatch all;
  for (const auto& [n, k] : plan) {
    const Graph graph = sensor_graph(n, b.knn, g.seed);
    const LaplacianOperator L = laplacian(graph, parse_laplacian_variant(g.laplacian));
    EmbedOptions ek = e;
    ek.k = k;
    check_k(k, n);
    EigenspaceOptions opts;
    opts.d = ek.d == 0 ? k : std::max(ek.d, k);
    opts.m = ek.m;
    opts.seed = g.seed;
    opts.max_iter = ek.max_iter;
    opts.damping = parse_damping(ek.damping);
    opts.threads = g.threads;
    if (ek.lambda_mode == "fixed") {
      if (!ek.lambda_k) throw UsageError("--lambda-mode fixed needs --lambda-k");
      opts.lambda_k = *ek.lambda_k;
    } else if (ek.lambda_mode == "fast" || ek.lambda_mode == "dichotomy") {
      opts.search = parse_lambda_search(ek.lambda_mode);
    } else {
      throw UsageError("bench supports --lambda-mode fast, dichotomy or fixed");
    }
    const Stopwatch sw;
    const EigenspaceApprox approx = approximate_eigenspace(L, k, opts);
    const double wall = sw.seconds();
    double arpack = std::nan("");
    if (b.compare_arpack && k < n) {
      const Stopwatch sa;
      (void)reference_low_spectrum(L, k);
      arpack = sa.seconds();
    }
    const auto& diag = approx.diagnostics;
    total += diag.ops;
    csv << b.regime << ',' << n << ',' << k << ',' << diag.d << ',' << diag.m << ',' << graph.n_edges() << ','
        << diag.lambda_iterations << ',' << (diag.lambda_converged ? 1 : 0) << ',' << diag.filter_spmv << ','
        << diag.probe_spmv << ',' << diag.ops.spmv << ',' << diag.ops.svd_core_cost << ',' << diag.ops.qr_cost << ','
        << wall << ',';
    if (!std::isnan(arpack)) csv << arpack;
    csv << '\n';
    rows.push_back({{"N", n},
                    {"k", k},
                    {"d", diag.d},
                    {"edges", graph.n_edges()},
                    {"spmv", diag.ops.spmv},
                    {"wall_seconds", wall},
                    {"arpack_seconds", std::isnan(arpack) ? json(nullptr) : json(arpack)}});
  }
  report.timing("total", all.seconds());
  write_file(dir, "bench.csv", report, [&](std::ostream& out) { out << csv.str(); });
  report.counters(total, 0, 0);
  report.metrics()["runs"] = std::move(rows);
}

void cmd_metrics(const GlobalOptions& g, const GraphOptions& go, const std::string& embedding,
                 const std::string& reference, const std::string& partition, const std::string& truth,
                 Report& report) {
  report.config() = {{"global", global_config(g)},
                     {"embedding", embedding},
                     {"reference", reference},
                     {"partition", partition},
                     {"truth", truth}};
  if (!go.input.empty() || !go.synth.empty()) report.config()["graph"] = graph_config(go);
  const fs::path dir = prepare_out_dir(g);
  bool any = false;
  if (!embedding.empty() || !reference.empty()) {
    if (embedding.empty() || reference.empty()) throw UsageError("mean energy needs --embedding and --reference");
    report.metrics()["mean_energy"] = mean_energy(load_matrix(embedding), load_matrix(reference));
    any = true;
  }
  std::optional<Partition> parts;
  if (!partition.empty()) parts = make_partition(load_labels(partition));
  if (!truth.empty()) {
    if (!parts) throw UsageError("ARI needs --partition as well as --truth");
    report.metrics()["ari"] = adjusted_rand(*parts, make_partition(load_labels(truth)));
    any = true;
  }
  if (!go.input.empty() || !go.synth.empty()) {
    if (!parts) throw UsageError("modularity needs --partition");
    const GraphBundle bundle = make_graph(go, g.seed, report);
    report.metrics()["modularity"] = modularity(bundle.graph, *parts);
    any = true;
  }
  if (!any) throw UsageError("nothing to compute: give --embedding/--reference, --partition/--truth or a graph");
}

// Option wiring -------------------------------------------------------------

void add_graph_options(CLI::App* sub, GraphOptions& o) {
  sub->add_option("--input", o.input, "Graph file (Matrix Market or edge list)");
  sub->add_option("--format", o.format, "Input format: mtx or edges (default: from extension)");
  sub->add_option("--synth", o.synth, "Generator: sbm, sensor, swissroll, cycle, path, complete");
  sub->add_option("--n", o.n, "Number of vertices for --synth")->check(CLI::PositiveNumber);
  sub->add_option("--classes", o.classes, "SBM classes")->check(CLI::PositiveNumber);
  sub->add_option("--eps", o.eps, "SBM inter/intra probability ratio")->check(CLI::NonNegativeNumber);
  sub->add_option("--degree", o.degree, "SBM average degree")->check(CLI::PositiveNumber);
  sub->add_option("--knn", o.knn, "Neighbours for knn graphs")->check(CLI::PositiveNumber);
  sub->add_option("--kernel", o.kernel, "knn edge weights: binary or gaussian");
  sub->add_option("--sigma", o.sigma, "Gaussian kernel width (default: mean knn distance)");
  sub->add_option("--a", o.a, "Swiss roll lower angle");
  sub->add_option("--b", o.b, "Swiss roll upper angle");
  sub->add_option("--labels", o.labels, "Ground-truth labels CSV (vertex_id,label)");
}

void add_embed_options(CLI::App* sub, EmbedOptions& e, bool with_mode) {
  sub->add_option("--k", e.k, "Target dimension")->required();
  sub->add_option("--d", e.d, "Random signals (default: k)");
  sub->add_option("--m", e.m, "Polynomial order")->check(CLI::PositiveNumber);
  sub->add_option("--max-iter", e.max_iter, "Fast search iteration cap")->check(CLI::PositiveNumber);
  sub->add_option("--tol-eps", e.tol_eps, "Dichotomy relative width")->check(CLI::PositiveNumber);
  sub->add_option("--damping", e.damping, "Polynomial damping: jackson or none");
  if (with_mode) {
    sub->add_option("--lambda-mode", e.lambda_mode, "fast, dichotomy, exact-oracle or fixed");
    sub->add_option("--lambda-k", e.lambda_k, "Cutoff for --lambda-mode fixed");
    sub->add_option("--orth", e.orth, "Orthonormalization: svd or qr");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fast eigenspace approximation with random signals"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  CLI::Option* seed_opt = app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--laplacian", g.laplacian, "normalized or combinatorial");

  GraphOptions go;
  EmbedOptions e;

  std::string graph_format = "mtx";
  CLI::App* synth = app.add_subcommand("synth", "Generate a graph and write it out");
  add_graph_options(synth, go);
  synth->add_option("--graph-format", graph_format, "Output format: mtx or edges");

  bool reference_me = false;
  CLI::App* embed = app.add_subcommand("embed", "Approximate the k lowest Laplacian eigenvectors");
  add_graph_options(embed, go);
  add_embed_options(embed, e, true);
  embed->add_flag("--reference-me", reference_me, "Also report mean energy against the oracle eigenvectors");

  std::string method = "fast";
  CLI::App* lambdak = app.add_subcommand("lambdak", "Estimate lambda_k and write the probe history");
  add_graph_options(lambdak, go);
  add_embed_options(lambdak, e, false);
  lambdak->add_option("--method", method, "fast or dichotomy");

  std::string features = "fears";
  bool compare_sc = false;
  int restarts = 10;
  CLI::App* cluster = app.add_subcommand("cluster", "k-means on approximate or oracle spectral features");
  add_graph_options(cluster, go);
  add_embed_options(cluster, e, true);
  cluster->add_option("--features", features, "fears or oracle");
  cluster->add_flag("--compare-sc", compare_sc, "Report ARI against oracle spectral clustering");
  cluster->add_option("--restarts", restarts, "k-means restarts")->check(CLI::PositiveNumber);

  Index count = 0;
  std::string solver = "auto";
  bool no_vectors = false;
  CLI::App* oracle = app.add_subcommand("oracle", "Reference eigendecomposition");
  add_graph_options(oracle, go);
  oracle->add_option("--count", count, "Number of lowest eigenpairs (default: all)");
  oracle->add_option("--solver", solver, "auto, dense or arpack");
  oracle->add_flag("--no-vectors", no_vectors, "Skip eigenvectors.csv");

  BenchOptions bo;
  CLI::App* bench = app.add_subcommand("bench", "Cost scaling on knn graphs of random points");
  bench->add_option("--regime", bo.regime, "fixedN, logN or sqrtN");
  bench->add_option("--n-min", bo.n_min, "Smallest N");
  bench->add_option("--n-max", bo.n_max, "Largest N (the fixed N for fixedN)");
  bench->add_option("--growth", bo.growth, "Geometric step for N (or k in fixedN)");
  bench->add_option("--k-min", bo.k_min, "Smallest k for fixedN");
  bench->add_option("--k-max", bo.k_max, "Largest k for fixedN");
  bench->add_option("--knn", bo.knn, "Neighbours per point")->check(CLI::PositiveNumber);
  bench->add_flag("--compare-arpack", bo.compare_arpack, "Also time the Lanczos reference");
  bench->add_option("--d", e.d, "Random signals (default: k)");
  bench->add_option("--m", e.m, "Polynomial order")->check(CLI::PositiveNumber);
  bench->add_option("--max-iter", e.max_iter, "Fast search iteration cap")->check(CLI::PositiveNumber);
  bench->add_option("--lambda-mode", e.lambda_mode, "fast, dichotomy or fixed");
  bench->add_option("--lambda-k", e.lambda_k, "Cutoff for --lambda-mode fixed");

  std::string embedding, reference, partition, truth;
  CLI::App* metrics = app.add_subcommand("metrics", "Mean energy, ARI and modularity from files");
  add_graph_options(metrics, go);
  metrics->add_option("--embedding", embedding, "Embedding CSV");
  metrics->add_option("--reference", reference, "Reference basis CSV");
  metrics->add_option("--partition", partition, "Partition CSV (vertex_id,label)");
  metrics->add_option("--truth", truth, "Ground-truth labels CSV");

  std::string command = "fears";
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& h) {
    return app.exit(h);
  } catch (const CLI::CallForAllHelp& h) {
    return app.exit(h);
  } catch (const CLI::ParseError& err) {
    emit_error(command, "usage", err.what());
    return kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  command = sub->get_name();
  Report report(command);
  try {
    if (seed_opt->count() == 0 && sub != bench) report.warn("--seed not given; using 0");
    (void)parse_laplacian_variant(g.laplacian);
    if (sub == synth) cmd_synth(g, go, graph_format, report);
    else if (sub == embed) cmd_embed(g, go, e, reference_me, report);
    else if (sub == lambdak) cmd_lambdak(g, go, e, method, report);
    else if (sub == cluster) cmd_cluster(g, go, e, features, compare_sc, restarts, report);
    else if (sub == oracle) cmd_oracle(g, go, count, solver, !no_vectors, report);
    else if (sub == bench) cmd_bench(g, bo, e, report);
    else cmd_metrics(g, go, embedding, reference, partition, truth, report);
    report.write(g.out);
  } catch (const std::invalid_argument& err) {
    emit_error(command, "usage", err.what());
    return kExitUsage;
  } catch (const std::exception& err) {
    emit_error(command, "runtime", err.what());
    return kExitRuntime;
  }
  return 0;
}
