// covfield command-line front end.
//
// Every option can also come from the --config JSON object under the same
// name (without dashes); flags given on the command line win.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "covfield/cluster.hpp"
#include "covfield/errors.hpp"
#include "covfield/experiments.hpp"
#include "covfield/field.hpp"
#include "covfield/geometry.hpp"
#include "covfield/kernel.hpp"
#include "covfield/measure.hpp"
#include "covfield/parallel.hpp"
#include "covfield/plot.hpp"
#include "covfield/stability.hpp"
#include "covfield/transport.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace covfield;

namespace {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config_path;
  std::uint64_t seed = 1;
  std::string out = ".";
  unsigned threads = 0;
  json config = json::object();
};

/// Applies config values to options the user did not pass explicitly.
class Bindings {
 public:
  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& flag, T& var, const std::string& help) {
    CLI::Option* opt = app->add_option(flag, var, help)->capture_default_str();
    const std::string key = opt->get_name(false, true).substr(opt->get_name(false, true).find_first_not_of('-'));
    apply_.push_back([opt, key, &var](const json& cfg) {
      if (opt->count() > 0 || !cfg.contains(key)) return;
      try {
        var = cfg.at(key).get<T>();
      } catch (const json::exception& e) {
        throw ConfigError("config key '" + key + "': " + e.what());
      }
    });
    return opt;
  }
  void apply(const json& cfg) const {
    for (const auto& f : apply_) f(cfg);
  }

 private:
  std::vector<std::function<void(const json&)>> apply_;
};

RadialKernel load_kernel(const std::string& name) {
  if (name == "gaussian" || name == "truncation") return RadialKernel::by_name(name);
  if (fs::exists(name)) return RadialKernel::from_table_csv(name);
  throw ConfigError("unknown kernel '" + name + "' (use gaussian, truncation or a table CSV path)");
}

std::string out_path(const Globals& g, const std::string& file) {
  fs::create_directories(g.out);
  return (fs::path(g.out) / file).string();
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::vector<Point> grid_points(int dim, double lo, double hi, int n, const std::string& points_file) {
  if (!points_file.empty()) {
    // Query points reuse the measure CSV format; weights are ignored.
    const auto ds = load_dataset(points_file);
    std::vector<Point> pts;
    for (Eigen::Index i = 0; i < ds.measure.size(); ++i) pts.emplace_back(ds.measure.atoms.col(i));
    return pts;
  }
  if (dim != 2) throw ConfigError("grid queries are planar; pass --points for d = " + std::to_string(dim));
  return square_grid(lo, hi, n);
}

Point parse_point(const std::vector<double>& v, int dim) {
  if (static_cast<int>(v.size()) != dim)
    throw ConfigError("point has " + std::to_string(v.size()) + " coordinates, expected " + std::to_string(dim));
  return Eigen::Map<const Eigen::VectorXd>(v.data(), dim);
}

void write_field_csv(const std::string& path, const FieldGrid& f) {
  std::ofstream o(path);
  if (!o) throw std::runtime_error("cannot write " + path);
  const int d = f.query_points.empty() ? 0 : static_cast<int>(f.query_points.front().size());
  for (int i = 0; i < d; ++i) o << "x_" << i + 1 << ",";
  o << "sigma";
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) o << ",S_" << i + 1 << j + 1;
  o << ",V";
  for (int i = 0; i < d; ++i) o << ",lambda_" << i + 1;
  o << "\n";
  for (std::size_t q = 0; q < f.query_points.size(); ++q) {
    for (int i = 0; i < d; ++i) o << format_double(f.query_points[q][i]) << ",";
    o << format_double(f.sigma);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) o << "," << format_double(f.tensors[q](i, j));
    o << "," << format_double(f.frechet_values[q]);
    const auto s = spectrum(f.tensors[q]);
    for (int i = 0; i < d; ++i) o << "," << format_double(s.eigenvalues[i]);
    o << "\n";
  }
}

// Subcommands ---------------------------------------------------------------

struct GenOpts {
  std::string kind = "circle";
  int n = 1000;
  double radius = 1.0;
  bool iid = false;
  int samples = 1;
  std::string output;
};

void run_gen(const Globals& g, const GenOpts& o) {
  std::vector<LabeledDataset> sets;
  if (o.kind == "circle") {
    LabeledDataset ds;
    ds.measure = o.iid ? sample_circle_uniform(o.radius, o.n, g.seed) : quadrature_circle(o.radius, o.n);
    ds.description = o.iid ? "iid circle sample" : "circle quadrature";
    sets.push_back(ds);
  } else if (o.kind == "sphere") {
    LabeledDataset ds;
    const int nt = std::max(2, static_cast<int>(std::sqrt(o.n / 2.0)));
    ds.measure = quadrature_sphere(o.radius, nt, 2 * nt);
    ds.description = "sphere quadrature";
    sets.push_back(ds);
  } else if (o.kind == "noisy-lines") {
    auto cfg = default_noisy_lines();
    sets.push_back(noisy_lines_dataset(cfg, g.seed));
  } else if (o.kind == "three-lines") {
    auto cfg = default_noisy_lines();
    cfg.noise_sd = 0.0;
    cfg.n_outliers = 0;
    sets.push_back(noisy_lines_dataset(cfg, g.seed));
  } else {
    ArrangementKind kind;
    try {
      kind = parse_arrangement_kind(o.kind);
    } catch (const std::invalid_argument&) {
      throw ConfigError("unknown dataset kind '" + o.kind + "'");
    }
    sets = gen_arrangement_suite(kind, o.samples, g.seed);
  }
  for (std::size_t i = 0; i < sets.size(); ++i) {
    std::string name = o.output.empty() ? o.kind : o.output;
    if (sets.size() > 1) name += "_" + std::to_string(i);
    if (fs::path(name).extension().empty()) name += ".csv";
    save_dataset(sets[i], out_path(g, name));
  }
}

struct FieldOpts {
  std::string input;
  std::string kernel = "gaussian";
  double sigma = 0.5;
  double lo = -1.5, hi = 1.5;
  int n = 24;
  std::string points;
  bool indexed = false;
  std::string svg;  // "", "glyphs" or "heatmap"
};

void run_ctf(const Globals& g, const FieldOpts& o) {
  const auto ds = load_dataset(o.input);
  const auto kernel = load_kernel(o.kernel);
  const auto pts = grid_points(ds.measure.dim, o.lo, o.hi, o.n, o.points);
  const auto field = ctf_grid(ds.measure, kernel, pts, o.sigma, o.indexed ? Acceleration::indexed : Acceleration::exact);
  write_field_csv(out_path(g, "ctf.csv"), field);
  write_json(out_path(g, "ctf.json"), {{"sigma", o.sigma}, {"kernel", kernel.name()}, {"points", pts.size()}});
  if (o.svg == "glyphs") write_text(out_path(g, "ctf_glyphs.svg"), svg_tensor_glyphs(field));
  if (o.svg == "heatmap") {
    if (!o.points.empty()) throw ConfigError("heat maps need the built-in grid");
    write_text(out_path(g, "ctf_heatmap.svg"), svg_field_heatmap(field, o.n, o.n));
  }
}

struct SpectrumOpts {
  std::string input;
  std::string kernel = "gaussian";
  double sigma = 0.5;
  std::vector<double> at;
  double threshold = 0.5;
};

void run_spectrum(const Globals& g, const SpectrumOpts& o) {
  const auto ds = load_dataset(o.input);
  const int d = ds.measure.dim;
  const Point x = parse_point(o.at, d);
  const auto s = spectrum(ctf_at(ds.measure, load_kernel(o.kernel), x, o.sigma));
  json j;
  j["point"] = o.at;
  j["sigma"] = o.sigma;
  j["eigenvalues"] = std::vector<double>(s.eigenvalues.data(), s.eigenvalues.data() + d);
  j["anisotropy_ratios"] = std::vector<double>(s.anisotropy_ratios.data(), s.anisotropy_ratios.data() + s.anisotropy_ratios.size());
  j["trace"] = s.trace;
  j["dimension"] = dimension_estimate(s, o.threshold);
  std::vector<std::vector<double>> vecs;
  for (int c = 0; c < d; ++c) vecs.emplace_back(s.eigenvectors.col(c).data(), s.eigenvectors.col(c).data() + d);
  j["eigenvectors"] = vecs;
  write_json(out_path(g, "spectrum.json"), j);
  std::ofstream csv(out_path(g, "spectrum.csv"));
  csv << "index,eigenvalue\n";
  for (int i = 0; i < d; ++i) csv << i + 1 << "," << format_double(s.eigenvalues[i]) << "\n";
}

void run_frechet(const Globals& g, const FieldOpts& o) {
  const auto ds = load_dataset(o.input);
  const auto kernel = load_kernel(o.kernel);
  const auto pts = grid_points(ds.measure.dim, o.lo, o.hi, o.n, o.points);
  std::ofstream csv(out_path(g, "frechet.csv"));
  const int d = ds.measure.dim;
  for (int i = 0; i < d; ++i) csv << "x_" << i + 1 << ",";
  csv << "V";
  const bool grad = kernel.kind() == KernelKind::gaussian;
  if (grad)
    for (int i = 0; i < d; ++i) csv << ",dV_" << i + 1;
  csv << "\n";
  FieldGrid field;
  field.sigma = o.sigma;
  field.query_points = pts;
  for (const auto& p : pts) {
    const double v = frechet_value(ds.measure, kernel, p, o.sigma);
    field.frechet_values.push_back(v);
    for (int i = 0; i < d; ++i) csv << format_double(p[i]) << ",";
    csv << format_double(v);
    if (grad) {
      const auto gr = frechet_gradient(ds.measure, kernel, p, o.sigma);
      for (int i = 0; i < d; ++i) csv << "," << format_double(gr[i]);
    }
    csv << "\n";
  }
  if (o.svg == "heatmap" && o.points.empty())
    write_text(out_path(g, "frechet_heatmap.svg"), svg_field_heatmap(field, o.n, o.n));
}

void run_flow(const Globals& g, const FieldOpts& o) {
  const auto ds = load_dataset(o.input);
  const auto kernel = load_kernel(o.kernel);
  const auto starts = grid_points(ds.measure.dim, o.lo, o.hi, o.n, o.points);
  std::vector<FlowResult> flows;
  const auto labels = basin_labels(ds.measure, kernel, starts, o.sigma, {}, &flows);
  std::ofstream csv(out_path(g, "flow.csv"));
  const int d = ds.measure.dim;
  for (int i = 0; i < d; ++i) csv << "start_" << i + 1 << ",";
  for (int i = 0; i < d; ++i) csv << "attractor_" << i + 1 << ",";
  csv << "basin,converged,iterations\n";
  for (std::size_t k = 0; k < flows.size(); ++k) {
    for (int i = 0; i < d; ++i) csv << format_double(flows[k].start[i]) << ",";
    for (int i = 0; i < d; ++i) csv << format_double(flows[k].attractor[i]) << ",";
    csv << labels[k] << "," << (flows[k].converged ? 1 : 0) << "," << flows[k].iterations << "\n";
  }
}

struct CurvatureOpts {
  std::string input;
  std::vector<double> at;
  std::vector<double> ladder{0.05, 0.04, 0.03};
  bool surface = false;
  double window = 0.2;
  double residual_tolerance = 0.05;
};

void run_curvature(const Globals& g, const CurvatureOpts& o) {
  const auto ds = load_dataset(o.input);
  const int d = ds.measure.dim;
  if (o.at.empty() || o.at.size() % static_cast<std::size_t>(d) != 0)
    throw ConfigError("--at needs a multiple of " + std::to_string(d) + " coordinates");
  CurvatureOptions opts;
  opts.window_fraction = o.window;
  opts.residual_tolerance = o.residual_tolerance;
  const auto kernel = RadialKernel::truncation();
  std::ofstream csv(out_path(g, "curvature.csv"));
  for (int i = 0; i < d; ++i) csv << "x_" << i + 1 << ",";
  csv << "sigma_ladder," << (o.surface ? "kappa_1,kappa_2" : "kappa") << ",residual,flags\n";
  std::string ladder;
  for (std::size_t i = 0; i < o.ladder.size(); ++i) ladder += (i ? ";" : "") + format_double(o.ladder[i]);
  for (std::size_t k = 0; k < o.at.size(); k += static_cast<std::size_t>(d)) {
    const Point x = Eigen::Map<const Eigen::VectorXd>(o.at.data() + k, d);
    for (int i = 0; i < d; ++i) csv << format_double(x[i]) << ",";
    csv << ladder << ",";
    std::vector<std::string> flags;
    double residual = 0;
    bool declared = false;
    if (o.surface) {
      const auto est = surface_curvatures(ds.measure, kernel, x, o.ladder, opts);
      csv << format_double(est.kappa1) << "," << format_double(est.kappa2);
      residual = est.residual;
      declared = est.declared;
      if (est.sign_ambiguity) flags.push_back("sign_ambiguous");
      if (est.umbilic) flags.push_back("umbilic");
    } else {
      const auto est = curve_curvature(ds.measure, kernel, x, o.ladder, opts);
      csv << format_double(est.kappa_abs);
      residual = est.residual;
      declared = est.declared;
      flags.push_back("sign_ambiguous");
      if (est.clamped) flags.push_back("clamped");
    }
    if (!declared) flags.push_back("undeclared");
    std::string f;
    for (std::size_t i = 0; i < flags.size(); ++i) f += (i ? ";" : "") + flags[i];
    csv << "," << format_double(residual) << "," << f << "\n";
  }
}

struct ClusterOpts {
  std::string input;
  std::string kernel = "gaussian";
  double sigma = 0.1;
  double gamma = 0.0;
  int k = 0;
  double height = -1.0;
  double cutoff_offset = 0.0;
  int top_k = 0;
  bool svg = false;
};

void run_cluster(const Globals& g, const ClusterOpts& o) {
  const auto ds = load_dataset(o.input);
  TensorizedMetricParams tp;
  tp.sigma = o.sigma;
  tp.gamma = o.gamma;
  tp.kernel = load_kernel(o.kernel);
  const Eigen::MatrixXd metric = tensorized_distances(ds.measure.atoms, tp);
  const Dendrogram dg = single_linkage(metric);
  const auto stats = cophenetic_stats(dg);
  ClusterAssignment a;
  std::string mode;
  if (o.k > 0) {
    a = cut_at_k(dg, o.k);
    mode = "at_k";
  } else if (o.height >= 0) {
    a = cut_at_height(dg, o.height);
    mode = "at_height";
  } else {
    a = cut_at_height(dg, std::max(0.0, stats.mean + o.cutoff_offset * stats.sd));
    mode = "cophenetic_offset";
  }
  if (a.tie_expanded) std::cerr << "{\"warning\":\"tied edges removed\",\"k\":" << a.k << "}\n";
  if (o.top_k > 0 && a.k > o.top_k) a = topk_reassign(a, metric, o.top_k);
  LabeledDataset out = ds;
  out.labels = a.labels;
  save_csv(out, out_path(g, "labels.csv"));
  {
    std::ofstream m(out_path(g, "merges.csv"));
    m << "a,b,height\n";
    for (const auto& mg : dg.merges) m << mg.a << "," << mg.b << "," << format_double(mg.height) << "\n";
  }
  json j{{"mode", mode},           {"k", a.k},          {"cutoff_height", a.cutoff_height},
         {"mean_cophenetic", stats.mean}, {"sd_cophenetic", stats.sd}, {"gamma", o.gamma},
         {"sigma", o.sigma},       {"pseudo_metric", o.gamma == 0.0}, {"tie_expanded", a.tie_expanded}};
  if (!ds.labels.empty()) j["error_rate"] = score(a.labels, ds.labels);
  write_json(out_path(g, "cluster.json"), j);
  if (o.svg) write_text(out_path(g, "dendrogram.svg"), svg_dendrogram(dg, a.cutoff_height));
}

struct StabilityOpts {
  std::string alpha, beta;
  std::string kernel = "gaussian";
  double sigma = 1.0;
  double lo = -1.5, hi = 1.5;
  int n = 24;
  std::string points;
  double lambda = 0.0;
  double diameter = 0.0;
  bool heuristic = false;
};

void run_stability(const Globals& g, const StabilityOpts& o) {
  const auto a = normalized_copy(load_dataset(o.alpha).measure);
  const auto b = normalized_copy(load_dataset(o.beta).measure);
  const auto pts = grid_points(a.dim, o.lo, o.hi, o.n, o.points);
  const auto kernel = load_kernel(o.kernel);
  StabilityReport r;
  if (kernel.kind() == KernelKind::truncation) {
    if (!(o.lambda > 0) || !(o.diameter > 0)) throw ConfigError("the truncation check needs --lambda and --diameter");
    r = check_stability_trunc(a, b, o.sigma, o.diameter, o.lambda, pts, o.heuristic);
  } else {
    r = check_stability_smooth(a, b, kernel, o.sigma, pts);
  }
  json j{{"theorem", r.theorem}, {"lhs", r.lhs},           {"rhs", r.rhs},   {"slack", r.slack},
         {"distance", r.distance}, {"constant", r.constant}, {"sigma", r.sigma}, {"passed", r.passed},
         {"heuristic", r.heuristic}};
  if (r.theorem == "smooth") j["A_f"] = r.A_f;
  if (r.lambda) j["lambda"] = *r.lambda;
  if (r.diameter) j["c"] = *r.diameter;
  write_json(out_path(g, "stability.json"), j);
  std::cout << j.dump() << "\n";
}

void run_converge_cmd(const Globals& g, ConvergeConfig cfg) {
  cfg.seed = g.seed;
  const auto rep = run_converge(cfg);
  std::ofstream csv(out_path(g, "converge.csv"));
  csv << "n,mean_error\n";
  for (std::size_t i = 0; i < rep.n_values.size(); ++i)
    csv << rep.n_values[i] << "," << format_double(rep.mean_errors[i]) << "\n";
  csv.close();
  json j{{"n_values", rep.n_values},
         {"mean_errors", rep.mean_errors},
         {"monotone", rep.monotone},
         {"pure_power", {{"exponent", rep.pure_power.exponent}, {"constant", rep.pure_power.constant},
                         {"rms_residual", rep.pure_power.rms_residual}}},
         {"log_power", {{"exponent", rep.log_power.exponent}, {"constant", rep.log_power.constant},
                        {"rms_residual", rep.log_power.rms_residual}}},
         {"replicates", cfg.replicates},
         {"sigma", cfg.sigma},
         {"seed", cfg.seed}};
  write_json(out_path(g, "converge.json"), j);
  std::vector<double> xs(rep.n_values.begin(), rep.n_values.end()), ref;
  for (double x : xs) ref.push_back(rep.pure_power.constant * std::pow(x, -0.5));
  write_text(out_path(g, "converge.svg"),
             svg_loglog({{"mean error", xs, rep.mean_errors}, {"C n^-1/2", xs, ref}}, "grid-max error vs n"));
  if (!rep.monotone) std::cerr << "{\"warning\":\"mean errors are not strictly decreasing\"}\n";
}

struct BenchOpts {
  std::string kind = "lines2d";
  int train = 50;
  int test = 200;
  std::vector<double> sigmas, gammas;
  int cutoff_steps = 50;
};

void run_bench(const Globals& g, const BenchOpts& o) {
  ArrangementKind kind;
  try {
    kind = parse_arrangement_kind(o.kind);
  } catch (const std::invalid_argument&) {
    throw ConfigError("unknown arrangement kind '" + o.kind + "'");
  }
  if (o.train < 1 || o.test < 1) throw ConfigError("train and test sizes must be positive");
  BenchmarkConfig cfg = default_benchmark_config(kind);
  if (!o.sigmas.empty()) cfg.sigmas = o.sigmas;
  if (!o.gammas.empty()) cfg.gammas = o.gammas;
  cfg.cutoff_steps = o.cutoff_steps;
  auto all = gen_arrangement_suite(kind, o.train + o.test, g.seed);
  std::vector<LabeledDataset> train(all.begin(), all.begin() + o.train), test(all.begin() + o.train, all.end());
  const auto res = run_cluster_benchmark(train, test, cfg);
  std::ofstream csv(out_path(g, "bench_" + o.kind + ".csv"));
  csv << "sample,error\n";
  for (std::size_t i = 0; i < res.test_errors.size(); ++i) csv << i << "," << format_double(res.test_errors[i]) << "\n";
  csv.close();
  json j{{"kind", o.kind},          {"sigma", res.sigma},          {"gamma", res.gamma},
         {"cutoff_offset", res.cutoff_offset}, {"train_error", res.train_error}, {"AE", res.average_error},
         {"ME_median", res.median_error}, {"ME_mean", res.average_error}, {"train", o.train}, {"test", o.test}};
  write_json(out_path(g, "bench_" + o.kind + ".json"), j);
  std::cout << j.dump() << "\n";
}

int fail(int code, const std::string& kind, const std::string& message, long line = -1) {
  json j{{"error", kind}, {"message", message}};
  if (line >= 0) j["line"] = line;
  std::cerr << j.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiscale covariance tensor fields: evaluation, geometry, stability and clustering"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "JSON file with option values");
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads (0 = hardware)")->capture_default_str();

  Bindings bind;

  GenOpts gen;
  auto* c_gen = app.add_subcommand("gen", "generate datasets");
  bind.add(c_gen, "--kind", gen.kind, "circle, sphere, three-lines, noisy-lines, lines2d, mixed_curves2d, planes3d");
  bind.add(c_gen, "--n", gen.n, "atom count");
  bind.add(c_gen, "--radius", gen.radius, "circle or sphere radius");
  c_gen->add_flag("--iid", gen.iid, "i.i.d. sample instead of quadrature");
  bind.add(c_gen, "--samples", gen.samples, "suite size");
  bind.add(c_gen, "--output", gen.output, "file name inside --out");

  auto field_options = [&](CLI::App* c, FieldOpts& o) {
    bind.add(c, "--input", o.input, "measure file")->required();
    bind.add(c, "--kernel", o.kernel, "gaussian, truncation or table CSV");
    bind.add(c, "--sigma", o.sigma, "scale");
    bind.add(c, "--grid-lo", o.lo, "grid lower bound");
    bind.add(c, "--grid-hi", o.hi, "grid upper bound");
    bind.add(c, "--grid-n", o.n, "grid points per axis");
    bind.add(c, "--points", o.points, "query point file instead of the grid");
  };
  FieldOpts ctf, fre, flow;
  flow.sigma = 0.3;
  auto* c_ctf = app.add_subcommand("ctf", "evaluate the tensor field on a grid");
  field_options(c_ctf, ctf);
  c_ctf->add_flag("--indexed", ctf.indexed, "bucket-grid acceleration (compact kernels)");
  bind.add(c_ctf, "--svg", ctf.svg, "glyphs or heatmap");
  auto* c_fre = app.add_subcommand("frechet", "Fréchet function and gradient on a grid");
  field_options(c_fre, fre);
  bind.add(c_fre, "--svg", fre.svg, "heatmap");
  auto* c_flow = app.add_subcommand("flow", "gradient flow to attractors");
  field_options(c_flow, flow);

  SpectrumOpts spec;
  auto* c_spec = app.add_subcommand("spectrum", "eigen-decomposition at a point");
  bind.add(c_spec, "--input", spec.input, "measure file")->required();
  bind.add(c_spec, "--kernel", spec.kernel, "kernel");
  bind.add(c_spec, "--sigma", spec.sigma, "scale");
  bind.add(c_spec, "--at", spec.at, "query point")->delimiter(',')->required();
  bind.add(c_spec, "--threshold", spec.threshold, "ratio threshold for the dimension estimate");

  CurvatureOpts curv;
  auto* c_curv = app.add_subcommand("curvature", "curvature from small-scale spectra");
  bind.add(c_curv, "--input", curv.input, "measure file")->required();
  bind.add(c_curv, "--at", curv.at, "query points, coordinates concatenated")->delimiter(',')->required();
  bind.add(c_curv, "--ladder", curv.ladder, "sigma ladder")->delimiter(',');
  c_curv->add_flag("--surface", curv.surface, "surface in R^3");
  bind.add(c_curv, "--window", curv.window, "window fraction");
  bind.add(c_curv, "--residual-tolerance", curv.residual_tolerance, "fit residual tolerance");

  ClusterOpts clu;
  auto* c_clu = app.add_subcommand("cluster", "tensorized single-linkage clustering");
  bind.add(c_clu, "--input", clu.input, "dataset file")->required();
  bind.add(c_clu, "--kernel", clu.kernel, "kernel");
  bind.add(c_clu, "--sigma", clu.sigma, "scale");
  bind.add(c_clu, "--gamma", clu.gamma, "spatial weight");
  bind.add(c_clu, "--k", clu.k, "cut at k clusters");
  bind.add(c_clu, "--height", clu.height, "cut at a height");
  bind.add(c_clu, "--cutoff-offset", clu.cutoff_offset, "cut at h0 + offset * sd");
  bind.add(c_clu, "--top-k", clu.top_k, "keep the k largest clusters");
  c_clu->add_flag("--svg", clu.svg, "write the dendrogram");

  StabilityOpts stab;
  auto* c_stab = app.add_subcommand("stability", "certify a Wasserstein stability bound");
  bind.add(c_stab, "--alpha", stab.alpha, "first measure")->required();
  bind.add(c_stab, "--beta", stab.beta, "second measure")->required();
  bind.add(c_stab, "--kernel", stab.kernel, "kernel");
  bind.add(c_stab, "--sigma", stab.sigma, "scale");
  bind.add(c_stab, "--grid-lo", stab.lo, "grid lower bound");
  bind.add(c_stab, "--grid-hi", stab.hi, "grid upper bound");
  bind.add(c_stab, "--grid-n", stab.n, "grid points per axis");
  bind.add(c_stab, "--points", stab.points, "query point file");
  bind.add(c_stab, "--lambda", stab.lambda, "density bound of alpha (truncation)");
  bind.add(c_stab, "--diameter", stab.diameter, "support diameter bound c (truncation)");
  c_stab->add_flag("--heuristic", stab.heuristic, "mark the run as outside the theorem's hypotheses");

  ConvergeConfig conv;
  auto* c_conv = app.add_subcommand("converge", "error decay of the empirical circle field");
  bind.add(c_conv, "--radius", conv.radius, "circle radius");
  bind.add(c_conv, "--sigma", conv.sigma, "scale");
  bind.add(c_conv, "--grid-n", conv.grid, "grid points per axis");
  bind.add(c_conv, "--grid-lo", conv.lo, "grid lower bound");
  bind.add(c_conv, "--grid-hi", conv.hi, "grid upper bound");
  bind.add(c_conv, "--replicates", conv.replicates, "samples per n");
  bind.add(c_conv, "--n-values", conv.n_values, "sample sizes")->delimiter(',');

  BenchOpts bench;
  auto* c_bench = app.add_subcommand("bench", "arrangement clustering benchmark");
  bind.add(c_bench, "--kind", bench.kind, "lines2d, mixed_curves2d or planes3d");
  bind.add(c_bench, "--train", bench.train, "training samples");
  bind.add(c_bench, "--test", bench.test, "test samples");
  bind.add(c_bench, "--sigmas", bench.sigmas, "sigma grid")->delimiter(',');
  bind.add(c_bench, "--gammas", bench.gammas, "gamma grid")->delimiter(',');
  bind.add(c_bench, "--cutoff-steps", bench.cutoff_steps, "cutoff grid size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(2, "usage", e.what());
  }

  try {
    if (!g.config_path.empty()) {
      std::ifstream f(g.config_path);
      if (!f) throw ConfigError("cannot read config " + g.config_path);
      try {
        g.config = json::parse(f);
      } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
      }
      if (!g.config.is_object()) throw ConfigError("config must be a JSON object");
      if (g.config.contains("seed") && app.get_option("--seed")->count() == 0) g.seed = g.config["seed"].get<std::uint64_t>();
      if (g.config.contains("out") && app.get_option("--out")->count() == 0) g.out = g.config["out"].get<std::string>();
      if (g.config.contains("threads") && app.get_option("--threads")->count() == 0)
        g.threads = g.config["threads"].get<unsigned>();
    }
    bind.apply(g.config);
    set_thread_count(g.threads);

    if (c_gen->parsed()) run_gen(g, gen);
    if (c_ctf->parsed()) run_ctf(g, ctf);
    if (c_fre->parsed()) run_frechet(g, fre);
    if (c_flow->parsed()) run_flow(g, flow);
    if (c_spec->parsed()) run_spectrum(g, spec);
    if (c_curv->parsed()) run_curvature(g, curv);
    if (c_clu->parsed()) run_cluster(g, clu);
    if (c_stab->parsed()) run_stability(g, stab);
    if (c_conv->parsed()) run_converge_cmd(g, conv);
    if (c_bench->parsed()) run_bench(g, bench);
  } catch (const ParseError& e) {
    return fail(2, "parse", e.what(), e.line());
  } catch (const ConfigError& e) {
    return fail(2, "config", e.what());
  } catch (const json::exception& e) {
    return fail(2, "config", e.what());
  } catch (const NumericalError& e) {
    return fail(3, "numerical", e.what());
  } catch (const std::domain_error& e) {
    return fail(3, "numerical", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(2, "config", e.what());
  } catch (const std::exception& e) {
    return fail(2, "io", e.what());
  }
  return 0;
}
