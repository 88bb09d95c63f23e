#include "symlab/runner.hpp"

#include "symlab/acceptance.hpp"
#include "symlab/blowup.hpp"
#include "symlab/functionals.hpp"
#include "symlab/generators.hpp"
#include "symlab/io.hpp"
#include "symlab/multiplier.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <random>
#include <sstream>

namespace symlab {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "1.0.0";

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw ConfigError("missing key '" + where + key + "'");
  return obj.at(key);
}

template <typename T>
T get(const json& obj, const std::string& key, const std::string& where) {
  const json& v = require(obj, key, where);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("key '" + where + key + "' has the wrong type");
  }
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return get<T>(obj, key, where);
}

Vec to_vec(const json& v, const std::string& key) {
  std::vector<double> raw;
  try {
    raw = v.get<std::vector<double>>();
  } catch (const json::exception&) {
    throw ConfigError("key '" + key + "' must be a list of numbers");
  }
  return Eigen::Map<const Vec>(raw.data(), static_cast<Eigen::Index>(raw.size()));
}

Mat to_basis(const json& v, const std::string& key) {
  if (!v.is_array() || v.empty()) throw ConfigError("key '" + key + "' must be a list of vectors");
  const Vec first = to_vec(v.front(), key);
  Mat out(first.size(), static_cast<Eigen::Index>(v.size()));
  for (std::size_t j = 0; j < v.size(); ++j) {
    const Vec col = to_vec(v[j], key);
    if (col.size() != first.size()) throw ConfigError("key '" + key + "' mixes dimensions");
    out.col(static_cast<Eigen::Index>(j)) = col;
  }
  return out;
}

const std::vector<std::string>& known_generators() {
  static const std::vector<std::string> names{"flat", "spike", "lines", "cantor", "lattice_lines", "tiling", "atoms",
                                              "table"};
  return names;
}

Measure generate(const MeasureSpec& spec, std::optional<double> spacing) {
  const json& p = spec.params;
  const std::string w = "measure.";
  const auto h = [&] { return spacing ? *spacing : get<double>(p, "h", w); };
  const std::string& g = spec.generator;
  if (g == "flat") {
    const int d = get<int>(p, "d", w);
    const int s = get_or<int>(p, "s", 1, w);
    Mat basis = p.contains("basis") ? to_basis(p.at("basis"), w + "basis") : Mat::Identity(d, s);
    const Vec center = p.contains("center") ? to_vec(p.at("center"), w + "center") : Vec::Zero(d);
    return make_flat_measure<double>(d, s, basis, center, get_or<double>(p, "c", 1.0, w), get<double>(p, "R", w), h());
  }
  if (g == "spike") {
    const Vec z = p.contains("z") ? to_vec(p.at("z"), w + "z") : Vec::Zero(2);
    return make_spike_measure<double>(get_or<int>(p, "k", 3, w), get_or<int>(p, "m", 3, w),
                                      get_or<double>(p, "alpha", 0.0, w), z, get_or<double>(p, "c", 1.0, w),
                                      get<double>(p, "R", w), h());
  }
  if (g == "lines") {
    const Vec z = p.contains("z") ? to_vec(p.at("z"), w + "z") : Vec::Zero(2);
    const auto angles = get<std::vector<double>>(p, "angles", w);
    auto densities = get_or<std::vector<double>>(p, "densities", std::vector<double>(angles.size(), 1.0), w);
    return make_line_configuration<double>(z, angles, densities, get<double>(p, "R", w), h());
  }
  if (g == "cantor")
    return make_cantor_product_measure<double>(get<double>(p, "s", w), get<int>(p, "depth", w), get<double>(p, "R", w));
  if (g == "lattice_lines")
    return make_lattice_lines_measure<double>(to_vec(require(p, "direction", w), w + "direction"),
                                              to_vec(require(p, "a", w), w + "a"), get<double>(p, "c", w),
                                              get<double>(p, "d", w), get<double>(p, "R", w), h());
  if (g == "tiling")
    return make_triangle_tiling_measure<double>(get<double>(p, "b", w), get_or<double>(p, "alpha", 0.0, w),
                                                get_or<double>(p, "a", 1.0, w), get<double>(p, "R", w), h());
  if (g == "atoms") {
    const Mat pos = to_basis(require(p, "positions", w), w + "positions");
    const Vec weights = to_vec(require(p, "weights", w), w + "weights");
    return make_atomic_measure<double>(pos, weights);
  }
  if (g == "table") return load_measure_table(get<std::string>(p, "path", w));
  throw ConfigError("unknown generator '" + g + "' at key 'measure.generator'");
}

std::string point_label(std::size_t i) { return "p" + std::to_string(i); }

/// Runs f(i) for i in [0, n) on up to `threads` workers; results keep index order.
template <typename T, typename F>
std::vector<T> parallel_map(std::size_t n, int threads, F f) {
  std::vector<T> out(n);
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, static_cast<std::size_t>(threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w)
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < n; i += workers) out[i] = f(i);
    }));
  for (auto& j : jobs) j.get();
  return out;
}

std::vector<Vec> resolve_points(const ExperimentConfig& cfg, const Measure& mu, double reach) {
  std::vector<Vec> pts = cfg.points;
  if (cfg.sample_points > 0) {
    std::vector<int> admissible;
    for (Eigen::Index i = 0; i < mu.size(); ++i)
      if (mu.weight(i) > 0 && mu.window().admits(mu.position(i), reach)) admissible.push_back(static_cast<int>(i));
    if (admissible.empty()) throw RefusalError("points: no support atom admits |x - c| + " + std::to_string(reach) + " <= R");
    std::mt19937_64 rng(cfg.seed);
    for (int q = 0; q < cfg.sample_points; ++q) {
      const auto pick = admissible[static_cast<std::size_t>(rng() % admissible.size())];
      pts.push_back(mu.position(pick));
    }
  }
  if (pts.empty()) throw ConfigError("missing key 'points': give 'points.explicit' or 'points.sample'");
  for (const auto& p : pts)
    if (p.size() != mu.dim()) throw ConfigError("key 'points' has a point of the wrong dimension");
  return pts;
}

std::vector<std::string> vector_header(const std::string& stem, int m) {
  std::vector<std::string> out;
  for (int j = 1; j <= m; ++j) out.push_back(stem + "_" + std::to_string(j));
  return out;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

struct Output {
  const ExperimentConfig& cfg;
  RunManifest& manifest;

  void write(const std::string& name, const CsvWriter& csv) {
    const std::filesystem::path path = std::filesystem::path(cfg.output_dir) / name;
    csv.save(path.string());
    manifest.outputs.push_back(path.string());
  }
};

void run_gen(const ExperimentConfig& cfg, RunManifest& manifest) {
  const Measure mu = build_measure(cfg.measure);
  const std::filesystem::path path = std::filesystem::path(cfg.output_dir) / "measure.txt";
  save_measure_table(path.string(), mu);
  manifest.outputs.push_back(path.string());
}

void run_sla(const ExperimentConfig& cfg, RunManifest& manifest) {
  const Measure mu = build_measure(cfg.measure);
  const Kernel omega = build_kernel(cfg.kernel);
  const auto radii = geometric_radii(cfg.r_max, cfg.ratio, cfg.count);
  const auto pts = resolve_points(cfg, mu, cfg.r_max);
  Output out{cfg, manifest};
  for (std::size_t t = 0; t < cfg.taus.size(); ++t) {
    const double tau = cfg.taus[t];
    const auto scans = parallel_map<ScanResult>(pts.size(), cfg.threads, [&](std::size_t i) {
      return sla_scan(mu, omega, pts[i], radii, tau, cfg.s, cfg.theta_sla);
    });
    for (std::size_t i = 0; i < pts.size(); ++i) {
      CsvWriter csv(concat(concat({"r"}, vector_header("value", omega.codomain_dim())), {"norm", "error_estimate"}));
      for (std::size_t j = 0; j < radii.size(); ++j) {
        csv.cell(radii[j]);
        for (Eigen::Index c = 0; c < scans[i].values[j].size(); ++c) csv.cell(scans[i].values[j](c));
        csv.cell(scans[i].values[j].norm()).cell(scans[i].error_estimates[j]);
        csv.end_row();
      }
      const std::string name = "sla_" + point_label(i) + "_tau" + std::to_string(t);
      out.write(name + ".csv", csv);
      manifest.verdicts.emplace_back(name, scans[i].verdict);
    }
  }
}

void run_alpha(const ExperimentConfig& cfg, RunManifest& manifest) {
  const Measure base = build_measure(cfg.measure);
  const auto radii = geometric_radii(cfg.r_max, cfg.ratio, cfg.count);
  const auto pts = resolve_points(cfg, base, kTransportWindow * cfg.r_max * (1 + cfg.family.margin));
  MeasureAtScale at_scale = [&base](double) { return base; };
  if (cfg.rediscretize_ratio) {
    const double ratio = *cfg.rediscretize_ratio;
    at_scale = [&cfg, ratio](double r) { return build_measure(cfg.measure, r / ratio); };
  }
  for (const auto& p : pts) base.require_window(p, kTransportWindow * cfg.r_max, "alpha (4r window)");
  const auto scans = parallel_map<AlphaScan>(pts.size(), cfg.threads, [&](std::size_t i) {
    return alpha_scan(at_scale, pts[i], radii, cfg.s, cfg.family, cfg.solver, cfg.theta_alpha);
  });
  Output out{cfg, manifest};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CsvWriter csv({"r", "alpha", "best_candidate_kind", "params", "solver_method", "gap"});
    for (std::size_t j = 0; j < radii.size(); ++j) {
      const AlphaResult& a = scans[i].results[j];
      std::string params;
      for (std::size_t q = 0; q < a.best.params.size(); ++q) params += (q ? ";" : "") + format_real(a.best.params[q]);
      csv.cell(radii[j]).cell(a.value).cell(a.best.kind).cell(params).cell(a.method).cell(a.gap);
      csv.end_row();
    }
    const std::string name = "alpha_" + point_label(i);
    out.write(name + ".csv", csv);
    manifest.verdicts.emplace_back(name, scans[i].scan.verdict);
  }
}

void run_pv(const ExperimentConfig& cfg, RunManifest& manifest) {
  const Measure mu = build_measure(cfg.measure);
  const Kernel omega = build_kernel(cfg.kernel);
  const json section = cfg.sections.value("pv", json::object());
  const double eps_max = get_or<double>(section, "eps_max", cfg.r_max, "pv.");
  const double eps_ratio = get_or<double>(section, "eps_ratio", cfg.ratio, "pv.");
  const int eps_count = get_or<int>(section, "eps_count", cfg.count, "pv.");
  const auto eps = geometric_radii(eps_max, eps_ratio, eps_count);
  const auto pts = resolve_points(cfg, mu, eps_max);
  const auto results = parallel_map<PvResult>(pts.size(), cfg.threads,
                                              [&](std::size_t i) { return pv_estimator(mu, omega, pts[i], cfg.s, eps); });
  Output out{cfg, manifest};
  const double limit = get_or<double>(section, "cauchy_threshold", INFINITY, "pv.");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CsvWriter csv(concat(concat({"eps"}, vector_header("value", omega.codomain_dim())), {"norm"}));
    for (std::size_t j = 0; j < eps.size(); ++j) {
      csv.cell(eps[j]);
      for (Eigen::Index c = 0; c < results[i].values[j].size(); ++c) csv.cell(results[i].values[j](c));
      csv.cell(results[i].values[j].norm());
      csv.end_row();
    }
    const std::string name = "pv_" + point_label(i);
    out.write(name + ".csv", csv);
    manifest.verdicts.emplace_back(name, results[i].cauchy_defect <= limit);
  }
}

void run_defect(const ExperimentConfig& cfg, RunManifest& manifest) {
  const Measure mu = build_measure(cfg.measure);
  const Kernel omega = build_kernel(cfg.kernel);
  const auto radii = geometric_radii(cfg.r_max, cfg.ratio, cfg.count);
  const auto pts = resolve_points(cfg, mu, cfg.r_max + mu.resolution());
  const auto found = symmetric_point_scan(mu, omega, pts, radii, cfg.s, cfg.theta_defect);
  CsvWriter csv(concat(vector_header("x", mu.dim()), {"defect", "worst_radius", "error_estimate", "symmetric"}));
  for (const auto& c : found) {
    for (Eigen::Index k = 0; k < c.point.size(); ++k) csv.cell(c.point(k));
    csv.cell(c.defect.value).cell(c.defect.worst_radius).cell(c.defect.error_estimate).cell(c.symmetric ? 1 : 0);
    csv.end_row();
  }
  Output{cfg, manifest}.write("defect.csv", csv);
  for (std::size_t i = 0; i < found.size(); ++i) manifest.verdicts.emplace_back("defect_" + point_label(i), found[i].symmetric);
}

void run_density(const ExperimentConfig& cfg, RunManifest& manifest) {
  const Measure mu = build_measure(cfg.measure);
  const auto radii = geometric_radii(cfg.r_max, cfg.ratio, cfg.count);
  const auto pts = resolve_points(cfg, mu, cfg.r_max);
  Output out{cfg, manifest};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const ScanResult scan = density_scan(mu, pts[i], radii, cfg.s);
    CsvWriter csv({"r", "ratio", "error_estimate"});
    for (std::size_t j = 0; j < radii.size(); ++j) csv.cell(radii[j]).cell(scan.values[j](0)).cell(scan.error_estimates[j]).end_row();
    const std::string name = "density_" + point_label(i);
    out.write(name + ".csv", csv);
    manifest.verdicts.emplace_back(name, scan.verdict);
  }
}

void run_multiplier(const ExperimentConfig& cfg, RunManifest& manifest) {
  const Kernel omega = build_kernel(cfg.kernel);
  const json section = cfg.sections.value("multiplier", json::object());
  QuadratureSpec quad;
  quad.order = get_or<int>(section, "order", quad.order, "multiplier.");
  quad.levels = get_or<int>(section, "levels", quad.levels, "multiplier.");
  quad.tolerance = get_or<double>(section, "tolerance", quad.tolerance, "multiplier.");
  const int nodes = get_or<int>(section, "sphere_nodes", 16, "multiplier.");
  const NonvanishingScan scan = multiplier_nonvanishing_scan(omega, nodes, quad);
  const int m = omega.codomain_dim();
  std::vector<std::string> header = vector_header("xi", omega.dim());
  for (int j = 1; j <= m; ++j) {
    header.push_back("re_m" + std::to_string(j));
    header.push_back("im_m" + std::to_string(j));
  }
  header.push_back("error_estimate");
  CsvWriter csv(header);
  for (const auto& v : scan.values) {
    for (Eigen::Index k = 0; k < v.xi.size(); ++k) csv.cell(v.xi(k));
    for (int j = 0; j < m; ++j) csv.cell(v.value(j).real()).cell(v.value(j).imag());
    csv.cell(v.error_estimate);
    csv.end_row();
  }
  Output{cfg, manifest}.write("multiplier.csv", csv);
  manifest.verdicts.emplace_back("multiplier_nonvanishing", scan.nonvanishing);
}

void run_blowup(const ExperimentConfig& cfg, RunManifest& manifest) {
  const Measure mu = build_measure(cfg.measure);
  const json section = cfg.sections.value("blowup", json::object());
  const auto radii = geometric_radii(cfg.r_max, cfg.ratio, cfg.count);
  if (cfg.points.empty()) throw ConfigError("missing key 'points.explicit': blowup needs a center");
  const Vec a = cfg.points.front();
  mu.require_window(a, kTransportWindow * cfg.r_max, "blowup (4r window)");
  const TestNet net = build_test_net<double>(mu.dim(), get_or<double>(section, "epsilon", 1.0, "blowup."));
  const std::string norm = get_or<std::string>(section, "normalization", "standard", "blowup.");
  BlowupSequence seq;
  if (norm == "standard")
    seq = BlowupSequence::standard(mu, a, radii, cfg.s);
  else if (norm == "proof") {
    double k = 0;
    if (section.contains("k")) {
      k = get<double>(section, "k", "blowup.");
    } else {
      for (double r : radii) k = std::max(k, density_ratio(mu, a, 3 * r, cfg.s));
    }
    seq = BlowupSequence::proof_normalized(mu, a, radii, cfg.s, k);
  }
  else
    throw ConfigError("key 'blowup.normalization' must be 'standard' or 'proof'");
  const WeakConvergenceReport weak = weak_convergence_diagnostic(seq, net);
  std::vector<std::string> header{"r"};
  for (std::size_t i = 0; i < net.size(); ++i) header.push_back("g" + std::to_string(i));
  CsvWriter moments(header);
  for (std::size_t j = 0; j < radii.size(); ++j) {
    moments.cell(radii[j]);
    for (Eigen::Index i = 0; i < weak.moments.cols(); ++i) moments.cell(weak.moments(static_cast<Eigen::Index>(j), i));
    moments.end_row();
  }
  Output out{cfg, manifest};
  out.write("blowup_moments.csv", moments);
  manifest.verdicts.emplace_back("blowup_cauchy", weak.cauchy_defect <= weak.tolerance && !weak.diverging);
  if (!cfg.kernel.is_null()) {
    const Kernel omega = build_kernel(cfg.kernel);
    const auto unit = get_or<std::vector<double>>(section, "unit_radii", std::vector<double>{0.25, 0.5, 0.75, 1.0}, "blowup.");
    const TangentSymmetryReport rep = tangent_symmetry_experiment(mu, omega, a, radii, cfg.s, cfg.taus.front(), unit);
    CsvWriter csv({"r", "defect", "defect_error", "sla", "sla_error"});
    for (std::size_t j = 0; j < rep.radii.size(); ++j)
      csv.cell(rep.radii[j]).cell(rep.defects[j]).cell(rep.defect_errors[j]).cell(rep.sla[j]).cell(rep.sla_errors[j]).end_row();
    out.write("blowup_tangent.csv", csv);
  }
}

void run_verify(const ExperimentConfig& cfg, RunManifest& manifest) {
  AcceptanceOptions options;
  options.seed = cfg.seed;
  const json section = cfg.sections.value("verify", json::object());
  options.only = get_or<std::vector<int>>(section, "criteria", {}, "verify.");
  const auto results = run_acceptance(options);
  CsvWriter csv({"criterion", "name", "passed", "detail"});
  for (const auto& r : results) {
    csv.cell(r.id).cell(r.name).cell(r.passed ? 1 : 0).cell(r.detail).end_row();
    manifest.verdicts.emplace_back("C" + std::to_string(r.id), r.passed);
  }
  Output{cfg, manifest}.write("verify.csv", csv);
}

}  // namespace

Measure build_measure(const MeasureSpec& spec) { return generate(spec, std::nullopt); }

Measure build_measure(const MeasureSpec& spec, double h) { return generate(spec, h); }

Kernel build_kernel(const json& spec) {
  const std::string name = get<std::string>(spec, "name", "kernel.");
  if (name == "riesz") return riesz_kernel(get_or<int>(spec, "d", 2, "kernel."));
  if (name == "huovinen") return huovinen_kernel(get_or<int>(spec, "k", 3, "kernel."));
  if (name == "coordinate") return coordinate_kernel();
  throw ConfigError("unknown kernel '" + name + "' at key 'kernel.name'");
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig cfg;
  cfg.source = root;
  if (root.contains("measure")) {
    const json& m = root.at("measure");
    cfg.measure.generator = get<std::string>(m, "generator", "measure.");
    if (std::find(known_generators().begin(), known_generators().end(), cfg.measure.generator) ==
        known_generators().end())
      throw ConfigError("unknown generator '" + cfg.measure.generator + "' at key 'measure.generator'");
    cfg.measure.params = m;
    if (m.contains("rediscretize")) {
      cfg.rediscretize_ratio = get<double>(m, "rediscretize", "measure.");
      if (!(*cfg.rediscretize_ratio > 0)) throw ConfigError("key 'measure.rediscretize' must be positive");
    }
  }
  if (root.contains("kernel")) {
    cfg.kernel = root.at("kernel");
    build_kernel(cfg.kernel);
  }
  if (root.contains("points")) {
    const json& p = root.at("points");
    if (p.contains("explicit"))
      for (const auto& v : p.at("explicit")) cfg.points.push_back(to_vec(v, "points.explicit"));
    cfg.sample_points = get_or<int>(p, "sample", 0, "points.");
  }
  cfg.seed = get_or<std::uint64_t>(root, "seed", cfg.seed, "");
  if (root.contains("radii")) {
    const json& r = root.at("radii");
    cfg.r_max = get<double>(r, "r_max", "radii.");
    cfg.ratio = get<double>(r, "ratio", "radii.");
    cfg.count = get<int>(r, "count", "radii.");
    if (!(cfg.ratio > 0 && cfg.ratio < 1)) throw ConfigError("key 'radii.ratio' must lie in (0, 1)");
    if (!(cfg.r_max > 0) || cfg.count < 1) throw ConfigError("key 'radii' needs r_max > 0 and count >= 1");
  }
  cfg.s = get_or<double>(root, "s", cfg.s, "");
  cfg.taus = get_or<std::vector<double>>(root, "tau", cfg.taus, "");
  if (cfg.taus.empty()) throw ConfigError("key 'tau' must list at least one value");
  if (root.contains("family")) {
    const json& f = root.at("family");
    CandidateFamily& fam = cfg.family;
    fam.kind = parse_family_kind(get<std::string>(f, "kind", "family."));
    fam.plane_dim = get_or<int>(f, "plane_dim", static_cast<int>(std::lround(cfg.s)), "family.");
    fam.k = get_or<int>(f, "k", fam.k, "family.");
    fam.m_values = get_or<std::vector<int>>(f, "m_values", fam.m_values, "family.");
    fam.n_angles = get_or<int>(f, "n_angles", fam.n_angles, "family.");
    fam.n_normals = get_or<int>(f, "n_normals", fam.n_normals, "family.");
    fam.offset_step = get_or<double>(f, "offset_step", fam.offset_step, "family.");
    fam.max_offset = get_or<double>(f, "max_offset", fam.max_offset, "family.");
    fam.refine = get_or<bool>(f, "refine", fam.refine, "family.");
    fam.refine_iterations = get_or<int>(f, "refine_iterations", fam.refine_iterations, "family.");
    fam.h_ratio = get_or<double>(f, "h_ratio", fam.h_ratio, "family.");
    fam.margin = get_or<double>(f, "margin", fam.margin, "family.");
    fam.include_zero = get_or<bool>(f, "include_zero", fam.kind != FamilyKind::Flat, "family.");
    if (f.contains("candidates"))
      for (const auto& c : f.at("candidates")) {
        MeasureSpec spec{get<std::string>(c, "generator", "family.candidates."), c};
        fam.explicit_candidates.push_back(build_measure(spec));
      }
  }
  if (root.contains("thresholds")) {
    const json& t = root.at("thresholds");
    if (t.contains("sla")) cfg.theta_sla = get<double>(t, "sla", "thresholds.");
    if (t.contains("defect")) cfg.theta_defect = get<double>(t, "defect", "thresholds.");
    if (t.contains("alpha")) cfg.theta_alpha = get<double>(t, "alpha", "thresholds.");
    for (const auto& v : {cfg.theta_sla, cfg.theta_defect, cfg.theta_alpha})
      if (v && !(*v > 0)) throw ConfigError("key 'thresholds' values must be positive");
  }
  if (root.contains("solver")) {
    const json& s = root.at("solver");
    cfg.solver.n_exact = get_or<int>(s, "n_exact", cfg.solver.n_exact, "solver.");
    cfg.solver.neighbours = get_or<int>(s, "neighbours", cfg.solver.neighbours, "solver.");
    cfg.solver.tolerance = get_or<double>(s, "tolerance", cfg.solver.tolerance, "solver.");
    cfg.solver.max_pivots = get_or<long>(s, "max_pivots", cfg.solver.max_pivots, "solver.");
  }
  if (root.contains("output")) cfg.output_dir = get_or<std::string>(root.at("output"), "dir", cfg.output_dir, "output.");
  cfg.sections = json::object();
  for (const char* key : {"pv", "blowup", "multiplier", "verify"})
    if (root.contains(key)) cfg.sections[key] = root.at(key);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string RunManifest::to_json() const {
  json out;
  out["command"] = command;
  out["version"] = version;
  out["seed"] = seed;
  out["config"] = config;
  out["outputs"] = outputs;
  json v = json::object();
  for (const auto& [name, ok] : verdicts) v[name] = ok;
  out["verdicts"] = v;
  out["wall_clock_seconds"] = wall_clock;
  return out.dump(2) + "\n";
}

RunManifest run(const std::string& command, const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  RunManifest manifest;
  manifest.command = command;
  manifest.config = config.source;
  manifest.version = kVersion;
  manifest.seed = config.seed;
  std::filesystem::create_directories(config.output_dir);
  const bool needs_measure = command != "multiplier" && command != "verify";
  if (needs_measure && config.measure.generator.empty()) throw ConfigError("missing key 'measure'");
  const bool needs_kernel = command == "sla" || command == "pv" || command == "defect" || command == "multiplier";
  if (needs_kernel && config.kernel.is_null()) throw ConfigError("missing key 'kernel'");
  if (command == "gen")
    run_gen(config, manifest);
  else if (command == "sla")
    run_sla(config, manifest);
  else if (command == "alpha")
    run_alpha(config, manifest);
  else if (command == "pv")
    run_pv(config, manifest);
  else if (command == "defect")
    run_defect(config, manifest);
  else if (command == "density")
    run_density(config, manifest);
  else if (command == "multiplier")
    run_multiplier(config, manifest);
  else if (command == "blowup")
    run_blowup(config, manifest);
  else if (command == "verify")
    run_verify(config, manifest);
  else
    throw ConfigError("unknown subcommand '" + command + "'");
  manifest.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::filesystem::path path = std::filesystem::path(config.output_dir) / "manifest.json";
  std::ofstream(path) << manifest.to_json();
  return manifest;
}

}  // namespace symlab
