// Experiment orchestration behind the command-line tool: builds shapes,
// generators, and densities from a flat config, runs the requested
// pipeline, prints a JSON report to stdout, and writes CSV/SVG artifacts.
#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <memory>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "starshape/clouds.hpp"
#include "starshape/config.hpp"
#include "starshape/estimators.hpp"
#include "starshape/io.hpp"

namespace starshape {

using OrderedJson = nlohmann::ordered_json;

// d independent uniform coordinates; the stock no-dependence baseline
// (record probability is exactly 1/n for any n)
class IndependentUniform : public Density {
 public:
  explicit IndependentUniform(int dim) : Density(dim, "independent") {}

  double log_pdf(const Vec& x) const override {
    for (int i = 0; i < dim(); ++i)
      if (x[i] < 0.0 || x[i] > 1.0) return -kInf;
    return 0.0;
  }

  Box integration_box() const override {
    return Box{Vec(dim(), 0.0), Vec(dim(), 1.0)};
  }

  void draw(Rng& rng, Vec& out) const override {
    for (int i = 0; i < dim(); ++i) out[i] = rng.uniform01();
  }
};

namespace detail {

// accept snake_case spellings for kind values
inline std::string kind_of(std::string s) {
  for (char& c : s)
    if (c == '_') c = '-';
  return s;
}

inline std::vector<double> to_std(const Vec& v) {
  std::vector<double> out(static_cast<std::size_t>(v.size()));
  for (int i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = v[i];
  return out;
}

inline Vec to_vec(const std::vector<double>& v) {
  Vec out(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<int>(i)] = v[i];
  return out;
}

// fallback <= 0 marks the key as required
inline std::size_t positive_size(Config& cfg, const std::string& key,
                                 long long fallback) {
  if (fallback <= 0 && !cfg.has(key))
    throw ConfigError("missing required key '" + key + "'");
  long long v = cfg.get_int(key, fallback);
  if (v <= 0) throw ConfigError("key '" + key + "': must be positive");
  return static_cast<std::size_t>(v);
}

inline std::uint64_t seed_of(Config& cfg) {
  long long s = cfg.get_int("seed", 1);
  if (s < 0) throw ConfigError("key 'seed': must be >= 0");
  return static_cast<std::uint64_t>(s);
}

inline int threads_of(Config& cfg) {
  long long t = cfg.get_int("threads", 0);
  if (t < 0 || t > 256) throw ConfigError("key 'threads': must be in 0..256");
  return static_cast<int>(t);
}

inline std::string format_of(Config& cfg, const std::string& fallback,
                             std::initializer_list<const char*> allowed) {
  std::string f = cfg.get_string("format", fallback);
  for (const char* a : allowed)
    if (f == a) return f;
  throw ConfigError("key 'format': '" + f +
                    "' is not supported by this command");
}

inline std::ofstream open_artifact(const std::string& dir,
                                   const std::string& name,
                                   std::string& path_out) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create out-dir '" + dir + "'");
  path_out = dir + "/" + name;
  std::ofstream f(path_out, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file '" + path_out + "'");
  return f;
}

inline std::vector<std::string> coord_header(int dim) {
  std::vector<std::string> h;
  for (int i = 1; i <= dim; ++i) h.push_back("x" + std::to_string(i));
  return h;
}

inline std::vector<Vec> boundary_polyline(const StarShape& shape,
                                          int segments) {
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(segments));
  for (int k = 0; k < segments; ++k) {
    double th = 2.0 * std::numbers::pi * k / segments;
    out.push_back(boundary_point(shape, unit2(th)));
  }
  return out;
}

}  // namespace detail

inline std::shared_ptr<StarShape> build_shape(Config& cfg) {
  std::string kind = detail::kind_of(cfg.get_string("shape", "ellipsoid"));
  int dim = static_cast<int>(cfg.get_int("dim", 2));
  if (kind == "lp") {
    double p = cfg.get_double("p", 2.0);  // the string "inf" parses fine
    return std::make_shared<LpBall>(p, dim);
  }
  if (kind == "ellipsoid") {
    if (cfg.has("sigma")) return std::make_shared<Ellipsoid>(dim, cfg.get_list("sigma"));
    double rho = cfg.get_double("rho", 0.0);
    if (rho != 0.0 && dim != 2)
      throw ConfigError("key 'rho': the shorthand needs dim=2; use sigma");
    std::vector<double> sig(static_cast<std::size_t>(dim) * dim, 0.0);
    for (int i = 0; i < dim; ++i) sig[static_cast<std::size_t>(i) * dim + i] = 1.0;
    if (dim == 2) sig[1] = sig[2] = rho;
    return std::make_shared<Ellipsoid>(dim, sig);
  }
  if (kind == "triangle")
    return std::make_shared<PolytopeShape>(PolytopeShape::from_vertices(
        {{1.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}}));
  if (kind == "polytope") {
    std::vector<Vec> verts;
    for (const auto& p : cfg.get_point_list("vertices")) {
      if (p.size() != 2)
        throw ConfigError("key 'vertices': each point needs two coordinates");
      verts.push_back(detail::to_vec(p));
    }
    return std::make_shared<PolytopeShape>(PolytopeShape::from_vertices(verts));
  }
  if (kind == "skew-limit") {
    std::vector<double> omega(static_cast<std::size_t>(dim) * dim, 0.0);
    for (int i = 0; i < dim; ++i) omega[static_cast<std::size_t>(i) * dim + i] = 1.0;
    if (cfg.has("omega")) omega = cfg.get_list("omega");
    Vec alpha = detail::to_vec(cfg.get_list("alpha"));
    return std::make_shared<SkewLimitShape>(dim, omega, alpha);
  }
  if (kind == "metat-body")
    return std::make_shared<MetaTShape>(cfg.get_double("lambda", 1.0));
  if (kind == "offcenter")
    return std::make_shared<OffCenterBall>(detail::to_vec(cfg.get_list("center")));
  throw ConfigError("key 'shape': unknown kind '" + kind + "'");
}

inline std::shared_ptr<Generator> build_generator(Config& cfg, int dim) {
  std::string kind = detail::kind_of(cfg.get_string("generator", "weibull"));
  if (kind == "weibull" || kind == "gaussian") {
    // the defaults give exp(-r^2/2), the gaussian radial profile
    double theta = cfg.get_double("theta", 2.0);
    double kappa = cfg.get_double("kappa", std::numbers::sqrt2);
    return std::make_shared<WeibullGenerator>(theta, kappa);
  }
  if (kind == "pareto")
    return std::make_shared<ParetoGenerator>(cfg.get_double("lambda", 1.0), dim);
  throw ConfigError("key 'generator': unknown kind '" + kind + "'");
}

struct BuiltDensity {
  std::shared_ptr<Density> density;
  std::shared_ptr<StarShape> limit;  // body the scaled cloud settles onto,
                                     // null when none is known
};

inline BuiltDensity build_density(Config& cfg) {
  std::string kind = detail::kind_of(cfg.get_string("density", "homothetic"));
  if (kind == "homothetic") {
    auto shape = build_shape(cfg);
    auto gen = build_generator(cfg, shape->dim());
    return {std::make_shared<HomotheticDensity>(shape, gen), shape};
  }
  if (kind == "skew-normal") {
    int dim = static_cast<int>(cfg.get_int("dim", 2));
    std::vector<double> omega(static_cast<std::size_t>(dim) * dim, 0.0);
    for (int i = 0; i < dim; ++i) omega[static_cast<std::size_t>(i) * dim + i] = 1.0;
    if (cfg.has("omega")) omega = cfg.get_list("omega");
    Vec alpha = detail::to_vec(cfg.get_list("alpha"));
    auto den = std::make_shared<SkewNormalDensity>(SmallSpd(dim, omega), alpha);
    auto limit = std::make_shared<SkewLimitShape>(dim, omega, alpha);
    return {den, limit};
  }
  if (kind == "meta-t") {
    double lambda = cfg.get_double("lambda", 1.0);
    return {std::make_shared<MetaTDensity>(lambda),
            std::make_shared<MetaTShape>(lambda)};
  }
  if (kind == "sliced-triangle")
    return {std::make_shared<SlicedTriangleDensity>(),
            std::make_shared<PolytopeShape>(PolytopeShape::from_vertices(
                {{1.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}}))};
  if (kind == "independent")
    return {std::make_shared<IndependentUniform>(
                static_cast<int>(cfg.get_int("dim", 2))),
            nullptr};
  throw ConfigError("key 'density': unknown kind '" + kind + "'");
}

namespace detail {

inline void emit(std::ostream& out, const OrderedJson& j) {
  out << j.dump(2) << "\n";
}

inline OrderedJson interval_json(const Interval& ci) {
  return OrderedJson{{"lo", ci.lo}, {"hi", ci.hi}};
}

inline const char* verdict_name(BluntVerdict v) {
  switch (v) {
    case BluntVerdict::Blunt:
      return "Blunt";
    case BluntVerdict::NonBlunt:
      return "NonBlunt";
    default:
      return "Marginal";
  }
}

inline int cmd_shape_info(Config& cfg, std::ostream& out, std::ostream& err) {
  auto shape = build_shape(cfg);
  std::size_t n_mc = positive_size(cfg, "n-mc", 200000);
  std::uint64_t seed = seed_of(cfg);
  format_of(cfg, "json", {"json"});
  cfg.finish();
  err << "[shape] " << shape->label() << "\n";
  Extrema ex = coordinate_extrema(*shape);
  OrderedJson j;
  j["label"] = shape->label();
  j["dim"] = shape->dim();
  j["coord_min"] = to_std(ex.a);
  j["coord_max"] = to_std(ex.b);
  if (auto v = shape->analytic_volume()) {
    j["volume"] = *v;
    j["volume_stderr"] = 0.0;
  } else {
    McEstimate mc = volume(*shape, n_mc, seed);
    j["volume"] = mc.value;
    j["volume_stderr"] = mc.std_error;
  }
  emit(out, j);
  return 0;
}

inline int cmd_blunt(Config& cfg, std::ostream& out, std::ostream& err) {
  auto shape = build_shape(cfg);
  int i = static_cast<int>(cfg.get_int("axis-i", 0));
  int j_axis = static_cast<int>(cfg.get_int("axis-j", 1));
  double tol = cfg.get_double("tol", 1e-6);
  format_of(cfg, "json", {"json"});
  cfg.finish();
  err << "[blunt] " << shape->label() << " axes (" << i << "," << j_axis
      << ")\n";
  BluntReport rep = is_blunt(*shape, i, j_axis, tol);
  OrderedJson j;
  j["verdict"] = verdict_name(rep.verdict);
  j["g"] = rep.witness;
  emit(out, j);
  return 0;
}

inline int cmd_sample(Config& cfg, std::ostream& out, std::ostream& err) {
  BuiltDensity built = build_density(cfg);
  std::size_t n = positive_size(cfg, "n", 0);
  std::uint64_t seed = seed_of(cfg);
  int threads = threads_of(cfg);
  std::string dir = cfg.get_string("out-dir", ".");
  std::string fmt = format_of(cfg, "csv", {"csv", "json"});
  cfg.finish();
  err << "[sample] " << built.density->label() << " n=" << n << "\n";
  Matrix pts = built.density->sample(n, seed, threads);
  std::string path;
  if (fmt == "csv") {
    auto f = open_artifact(dir, "sample.csv", path);
    write_csv(f, coord_header(pts.cols()), pts);
  } else {
    auto f = open_artifact(dir, "sample.json", path);
    OrderedJson rows = OrderedJson::array();
    for (std::size_t r = 0; r < pts.rows(); ++r) {
      const double* p = pts.row(r);
      rows.push_back(std::vector<double>(p, p + pts.cols()));
    }
    f << OrderedJson{{"n", pts.rows()}, {"points", rows}}.dump(2) << "\n";
  }
  err << "[write] " << path << "\n";
  OrderedJson j;
  j["n"] = pts.rows();
  j["dim"] = pts.cols();
  j["path"] = path;
  emit(out, j);
  return 0;
}

inline int cmd_lambda(Config& cfg, std::ostream& out, std::ostream& err) {
  BuiltDensity built = build_density(cfg);
  std::size_t n = positive_size(cfg, "n", 1000000);
  std::vector<double> q = cfg.get_list("q", {0.9, 0.99, 0.999});
  std::uint64_t seed = seed_of(cfg);
  int threads = threads_of(cfg);
  std::string dir = cfg.get_string("out-dir", ".");
  std::string fmt = format_of(cfg, "json", {"json", "csv"});
  cfg.finish();
  err << "[sample] " << built.density->label() << " n=" << n << "\n";
  Matrix pts = built.density->sample(n, seed, threads);
  err << "[estimate] exceedance curve over " << q.size() << " levels\n";
  SibuyaCurve curve = lambda_u_curve(pts, q);
  OrderedJson j;
  j["q"] = curve.q_grid;
  j["lambda_hat"] = curve.lambda_hat;
  OrderedJson cis = OrderedJson::array();
  for (const Interval& ci : curve.ci) cis.push_back(interval_json(ci));
  j["ci"] = cis;
  j["n_effective"] = curve.n_effective;
  if (fmt == "csv") {
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < curve.q_grid.size(); ++k)
      rows.push_back({curve.q_grid[k], curve.lambda_hat[k], curve.ci[k].lo,
                      curve.ci[k].hi,
                      static_cast<double>(curve.n_effective[k])});
    std::string path;
    auto f = open_artifact(dir, "lambda.csv", path);
    write_csv_rows(f, {"q", "lambda_hat", "ci_lo", "ci_hi", "n_effective"},
                   rows);
    err << "[write] " << path << "\n";
    j["path"] = path;
  }
  emit(out, j);
  return 0;
}

inline int cmd_sum(Config& cfg, std::ostream& out, std::ostream& err) {
  BuiltDensity built = build_density(cfg);
  std::vector<double> raw = cfg.get_list("n-list", {100.0, 1000.0});
  std::vector<std::size_t> n_list;
  for (double v : raw) {
    if (!(v >= 2.0) || v != std::floor(v))
      throw ConfigError("key 'n-list': entries must be integers >= 2");
    n_list.push_back(static_cast<std::size_t>(v));
  }
  std::size_t n_big = positive_size(cfg, "n-big", 1000000);
  std::uint64_t seed = seed_of(cfg);
  int threads = threads_of(cfg);
  std::string dir = cfg.get_string("out-dir", ".");
  std::string fmt = format_of(cfg, "json", {"json", "csv"});
  cfg.finish();
  err << "[estimate] sum criterion, pool " << n_big << "\n";
  SumCriterion sc = sum_criterion(*built.density, n_list, n_big, seed, threads);
  OrderedJson j;
  j["n"] = sc.n_list;
  j["s_hat"] = sc.s_hat;
  j["t1"] = sc.t1;
  j["t2"] = sc.t2;
  if (fmt == "csv") {
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < sc.n_list.size(); ++k)
      rows.push_back({static_cast<double>(sc.n_list[k]), sc.s_hat[k],
                      sc.t1[k], sc.t2[k]});
    std::string path;
    auto f = open_artifact(dir, "sum.csv", path);
    write_csv_rows(f, {"n", "s_hat", "t1", "t2"}, rows);
    err << "[write] " << path << "\n";
    j["path"] = path;
  }
  emit(out, j);
  return 0;
}

inline int cmd_record(Config& cfg, std::ostream& out, std::ostream& err) {
  BuiltDensity built = build_density(cfg);
  std::size_t n = positive_size(cfg, "n", 0);
  std::size_t trials = positive_size(cfg, "trials", 10000);
  std::uint64_t seed = seed_of(cfg);
  int threads = threads_of(cfg);
  format_of(cfg, "json", {"json"});
  cfg.finish();
  err << "[estimate] record probability, n=" << n << " trials=" << trials
      << "\n";
  RecordEstimate r = record_probability(*built.density, n, trials, seed, threads);
  OrderedJson j;
  j["n"] = r.n;
  j["trials"] = r.trials;
  j["p_hat"] = r.p_hat;
  j["ci"] = interval_json(r.ci);
  j["one_over_n"] = 1.0 / static_cast<double>(r.n);
  emit(out, j);
  return 0;
}

inline int cmd_overlap(Config& cfg, std::ostream& out, std::ostream& err) {
  BuiltDensity built = build_density(cfg);
  std::size_t n = positive_size(cfg, "n", 0);
  std::size_t k = positive_size(cfg, "k", 0);
  std::size_t trials = positive_size(cfg, "trials", 10000);
  std::uint64_t seed = seed_of(cfg);
  int threads = threads_of(cfg);
  format_of(cfg, "json", {"json"});
  cfg.finish();
  err << "[estimate] top-" << k << " overlap, n=" << n << " trials=" << trials
      << "\n";
  OverlapEstimate r = overlap_probability(*built.density, n, k, trials, seed, threads);
  OrderedJson j;
  j["n"] = r.n;
  j["k"] = r.k;
  j["trials"] = r.trials;
  j["p_hat"] = r.p_hat;
  j["ci"] = interval_json(r.ci);
  j["independent_baseline"] = independent_overlap(r.n, r.k);
  emit(out, j);
  return 0;
}

inline int cmd_heavy(Config& cfg, std::ostream& out, std::ostream& err) {
  BuiltDensity built = build_density(cfg);
  auto hom = std::dynamic_pointer_cast<HomotheticDensity>(built.density);
  if (!hom)
    throw ConfigError("heavy needs a homothetic density (shape + generator)");
  std::size_t n = positive_size(cfg, "n", 10000);
  std::size_t trials = positive_size(cfg, "trials", 1000);
  std::uint64_t seed = seed_of(cfg);
  int threads = threads_of(cfg);
  format_of(cfg, "json", {"json"});
  cfg.finish();
  err << "[estimate] scaled-maxima tail fit, n=" << n << " trials=" << trials
      << "\n";
  FrechetFit fit = frechet_fit(*hom, n, trials, seed, threads);
  OrderedJson j;
  j["lambda_hat"] = fit.lambda_hat;
  j["lambda_by_coord"] = fit.lambda_by_coord;
  j["a_hat"] = fit.a_hat;
  j["residual_rms"] = fit.residual_rms;
  j["r_n"] = fit.r_n;
  emit(out, j);
  return 0;
}

inline OrderedJson convergence_json(const ConvergenceReport& rep) {
  OrderedJson j;
  j["n"] = rep.n;
  j["eps"] = rep.eps;
  j["probe_radius"] = rep.probe_radius;
  j["outside_count"] = rep.outside_count;
  j["outside_frac"] =
      static_cast<double>(rep.outside_count) / static_cast<double>(rep.n);
  j["min_probe_hits"] = rep.min_probe_hits();
  j["clause_a"] = rep.clause_a;
  j["clause_b"] = rep.clause_b;
  j["converged"] = rep.clause_a && rep.clause_b;
  return j;
}

inline int cmd_cloud(Config& cfg, std::ostream& out, std::ostream& err) {
  BuiltDensity built = build_density(cfg);
  if (!built.limit)
    throw ConfigError(
        "cloud: no limit body is known for this density; use a homothetic "
        "or other built-in family");
  std::size_t n = positive_size(cfg, "n", 0);
  std::uint64_t seed = seed_of(cfg);
  int threads = threads_of(cfg);
  double s_n = cfg.get_double("s-n", 0.0);
  double eps = cfg.get_double("eps", 0.15);
  std::size_t probes = static_cast<std::size_t>(cfg.get_int("probes", 0));
  std::size_t min_hits = positive_size(cfg, "min-hits", 3);
  double radius = cfg.get_double("radius", 0.0);
  double outside_tol = cfg.get_double("outside-tol", 0.01);
  std::string dir = cfg.get_string("out-dir", ".");
  format_of(cfg, "csv", {"csv"});
  cfg.finish();
  err << "[cloud] " << built.density->label() << " n=" << n << "\n";
  SampleCloud cloud = make_cloud(*built.density, n, seed, s_n, threads);
  err << "[scale] s_n=" << format_g17(cloud.s_n) << "\n";
  ConvergenceReport rep = convergence_report(cloud, *built.limit, eps, probes,
                                             min_hits, radius, outside_tol);
  std::string path;
  auto f = open_artifact(dir, "cloud.csv", path);
  write_csv(f, coord_header(cloud.dim()), cloud.scaled);
  err << "[write] " << path << "\n";
  OrderedJson j = convergence_json(rep);
  j["s_n"] = cloud.s_n;
  j["path"] = path;
  emit(out, j);
  return 0;
}

// shared figure pipeline: scaled cloud vs its limit body, exposed edges,
// coordinatewise max, convergence report, csv + svg artifacts
inline int run_figure(Config& cfg, std::ostream& out, std::ostream& err,
                      const std::string& name, const Density& den,
                      const StarShape& body, double s_n_override) {
  std::size_t n = positive_size(cfg, "n", 100000);
  std::uint64_t seed = seed_of(cfg);
  int threads = threads_of(cfg);
  double eps = cfg.get_double("eps", 0.15);
  std::size_t probes = static_cast<std::size_t>(cfg.get_int("probes", 64));
  std::size_t min_hits = positive_size(cfg, "min-hits", 3);
  double radius = cfg.get_double("radius", 0.25);
  std::string dir = cfg.get_string("out-dir", ".");
  std::string fmt = format_of(cfg, "svg", {"svg", "csv"});
  cfg.finish();

  err << "[cloud] " << den.label() << " n=" << n << "\n";
  SampleCloud cloud = make_cloud(den, n, seed, s_n_override, threads);
  err << "[scale] s_n=" << format_g17(cloud.s_n) << "\n";
  ConvergenceReport rep =
      convergence_report(cloud, body, eps, probes, min_hits, radius);
  CoordMax cm = coordinatewise_max(cloud);
  std::vector<std::vector<Vec>> edges(4);
  std::vector<std::vector<double>> edge_rows;
  for (int q = 0; q < 4; ++q) {
    edges[static_cast<std::size_t>(q)] = pareto_edge(cloud, q);
    for (const Vec& p : edges[static_cast<std::size_t>(q)])
      edge_rows.push_back({static_cast<double>(q), p[0], p[1]});
  }

  std::string csv_path;
  {
    auto f = open_artifact(dir, name + ".csv", csv_path);
    write_csv_rows(f, {"quadrant", "x1", "x2"}, edge_rows);
  }
  err << "[write] " << csv_path << "\n";

  OrderedJson j = convergence_json(rep);
  j["s_n"] = cloud.s_n;
  j["coord_max"] = detail::to_std(cm.point);
  j["coord_max_is_sample"] = cm.is_sample_point;
  j["csv"] = csv_path;

  if (fmt == "svg") {
    std::vector<Vec> boundary = detail::boundary_polyline(body, 256);
    double scale_up = std::exp(eps);
    double window = 0.0;
    for (const Vec& p : boundary)
      window = std::max({window, std::fabs(p[0]) * scale_up,
                         std::fabs(p[1]) * scale_up});
    std::size_t stride = (cloud.n() + 19999) / 20000;
    for (std::size_t i = 0; i < cloud.n(); i += stride) {
      const double* p = cloud.scaled.row(i);
      window = std::max({window, std::fabs(p[0]), std::fabs(p[1])});
    }
    window = std::max({window, std::fabs(cm.point[0]), std::fabs(cm.point[1])});
    window *= 1.05;

    SvgScatter svg(window);
    std::vector<Vec> cutoff = boundary;
    for (Vec& p : cutoff) {
      p[0] *= scale_up;
      p[1] *= scale_up;
    }
    svg.polygon("cutoff", cutoff, "#888888", 1.0, true);
    svg.polygon("boundary", boundary, "#111111", 2.0);
    svg.dots("points", cloud.scaled, 1.2, "#3366aa", stride);
    std::vector<Vec> edge_all;
    for (const auto& e : edges) edge_all.insert(edge_all.end(), e.begin(), e.end());
    svg.dots("edge-points", edge_all, 3.0, "#cc2222");
    svg.cross("cwmax", cm.point, 7.0, "#117733");
    std::string svg_path;
    auto f = open_artifact(dir, name + ".svg", svg_path);
    svg.write(f);
    err << "[write] " << svg_path << "\n";
    j["svg"] = svg_path;
  }

  detail::emit(out, j);
  return 0;
}

inline int cmd_figure1a(Config& cfg, std::ostream& out, std::ostream& err) {
  double rho = cfg.get_double("rho", 0.1);
  auto shape = std::make_shared<Ellipsoid>(
      2, std::vector<double>{1.0, rho, rho, 1.0});
  auto gen = std::make_shared<WeibullGenerator>(2.0, std::numbers::sqrt2);
  HomotheticDensity den(shape, gen);
  return run_figure(cfg, out, err, "figure1a", den, *shape, 0.0);
}

inline int cmd_figure1b(Config& cfg, std::ostream& out, std::ostream& err) {
  double lambda = cfg.get_double("lambda", 1.0);
  std::size_t n = positive_size(cfg, "n", 100000);
  cfg.set("n", std::to_string(n));  // run_figure reads it again
  MetaTDensity den(lambda);
  MetaTShape body(lambda);
  // normal marginals put the cloud on the gaussian scale
  double s_n = std::sqrt(2.0 * std::log(static_cast<double>(n)));
  return run_figure(cfg, out, err, "figure1b", den, body, s_n);
}

}  // namespace detail

inline int run(Config cfg, std::ostream& out, std::ostream& err) {
  try {
    std::string command = cfg.get_string("command");
    if (command == "shape-info") return detail::cmd_shape_info(cfg, out, err);
    if (command == "blunt") return detail::cmd_blunt(cfg, out, err);
    if (command == "sample") return detail::cmd_sample(cfg, out, err);
    if (command == "cloud") return detail::cmd_cloud(cfg, out, err);
    if (command == "lambda") return detail::cmd_lambda(cfg, out, err);
    if (command == "sum") return detail::cmd_sum(cfg, out, err);
    if (command == "record") return detail::cmd_record(cfg, out, err);
    if (command == "overlap") return detail::cmd_overlap(cfg, out, err);
    if (command == "heavy") return detail::cmd_heavy(cfg, out, err);
    if (command == "figure1a") return detail::cmd_figure1a(cfg, out, err);
    if (command == "figure1b") return detail::cmd_figure1b(cfg, out, err);
    throw ConfigError("unknown command '" + command + "'");
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace starshape
