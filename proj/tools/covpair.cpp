// covpair: evaluate, integrate, invert, simulate and test the joint law of a
// pair of sample cross-covariances from a trivariate normal.  One JSON record
// per invocation on stdout; human messages on stderr.
//
// Exit codes: 0 ok, 2 validation failure, 3 I/O failure, 4 numerical
// non-convergence (best-effort record still printed).

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "covpair/distributions.hpp"
#include "covpair/errors.hpp"
#include "covpair/inference.hpp"
#include "covpair/numerics.hpp"
#include "covpair/params.hpp"
#include "covpair/simulation.hpp"

namespace {

using covpair::CovarianceStructure;
using covpair::QuadratureConfig;
using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitNoConvergence = 4;

class IoFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Round to 12 significant digits so records are stable golden-file material.
double sig12(double v) {
  if (!std::isfinite(v)) return v;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

void emit(const std::string& command, json parameters, json result) {
  json record;
  record["command"] = command;
  record["parameters"] = std::move(parameters);
  record["result"] = std::move(result);
  record["schema_version"] = "1";
  std::cout << record.dump() << "\n";
}

struct ToleranceFlags {
  double abs_tol = QuadratureConfig{}.abs_tol;
  double rel_tol = QuadratureConfig{}.rel_tol;
  long max_subdiv = QuadratureConfig{}.max_subdivisions;
  double trunc_eps = covpair::TruncationPolicy{}.value;

  void attach(CLI::App* cmd) {
    cmd->add_option("--abs-tol", abs_tol, "absolute quadrature tolerance")
        ->capture_default_str();
    cmd->add_option("--rel-tol", rel_tol, "relative quadrature tolerance")
        ->capture_default_str();
    cmd->add_option("--max-subdiv", max_subdiv, "max adaptive subdivisions")
        ->capture_default_str();
    cmd->add_option("--trunc-eps", trunc_eps, "tail mass allowed outside the truncation box")
        ->capture_default_str();
  }

  QuadratureConfig config() const {
    QuadratureConfig cfg;
    cfg.abs_tol = abs_tol;
    cfg.rel_tol = rel_tol;
    cfg.max_subdivisions = max_subdiv;
    cfg.truncation = covpair::TruncationPolicy::auto_tail(trunc_eps);
    return cfg;
  }

  void echo(json& p) const {
    p["abs_tol"] = sig12(abs_tol);
    p["rel_tol"] = sig12(rel_tol);
    p["max_subdiv"] = max_subdiv;
    p["trunc_eps"] = sig12(trunc_eps);
  }
};

json complex_json(std::complex<double> z) {
  return json{{"re", sig12(z.real())}, {"im", sig12(z.imag())}};
}

int run(int argc, char** argv) {
  CLI::App app{"joint law of two sample covariances from a trivariate normal"};
  app.require_subcommand(1);
  int exit_code = kExitOk;

  double rho = 0.0, sigma = 0.0;
  int n = 1;
  double x = 0.0, y = 0.0, u = 0.0, v = 0.0, w = 0.0;
  double x0 = 0.0, y0 = 0.0;
  std::string form;
  ToleranceFlags tols;

  // --- density --------------------------------------------------------
  auto* density = app.add_subcommand("density", "joint density f_n(x, y)");
  density->add_option("--rho", rho, "A-C and B-C covariance")->required();
  density->add_option("--sigma", sigma, "A-B covariance")->required();
  density->add_option("--n", n, "sample size")->required()->check(CLI::PositiveNumber);
  density->add_option("--x", x)->required();
  density->add_option("--y", y)->required();
  form = "general";
  density->add_option("--form", form, "general | specialized")
      ->check(CLI::IsMember({"general", "specialized"}))
      ->capture_default_str();
  density->callback([&] {
    auto s = covpair::make_structure(rho, sigma);
    double value;
    if (form == "specialized") {
      switch (n) {
        case 1: value = covpair::density_n1({s, n, x, y}); break;
        case 2: value = covpair::density_n2({s, n, x, y}); break;
        case 3: value = covpair::density_n3({s, n, x, y}); break;
        case 4: value = covpair::density_n4({s, n, x, y}); break;
        default:
          throw covpair::DomainError("specialized forms exist for n <= 4 only");
      }
    } else {
      value = covpair::density_general({s, n, x, y});
    }
    json params{{"rho", sig12(rho)}, {"sigma", sig12(sigma)}, {"n", n},
                {"x", sig12(x)},     {"y", sig12(y)},         {"form", form}};
    json result;
    if (std::isinf(value)) {
      result["infinite"] = true;
    } else {
      result["value"] = sig12(value);
    }
    emit("density", params, result);
  });

  // --- cf ---------------------------------------------------------------
  auto* cf = app.add_subcommand("cf", "characteristic function F_n(u, v)");
  cf->add_option("--rho", rho)->required();
  cf->add_option("--sigma", sigma)->required();
  cf->add_option("--n", n)->required()->check(CLI::PositiveNumber);
  cf->add_option("--u", u)->required();
  cf->add_option("--v", v)->required();
  static std::string cf_form;
  cf_form = "closed";
  cf->add_option("--form", cf_form, "closed | reduced | determinant")
      ->check(CLI::IsMember({"closed", "reduced", "determinant"}))
      ->capture_default_str();
  cf->callback([&] {
    auto s = covpair::make_structure(rho, sigma);
    covpair::CfQuery q{s, n, u, v};
    std::complex<double> z;
    if (cf_form == "reduced") {
      z = covpair::cf_reduced(q);
    } else if (cf_form == "determinant") {
      z = covpair::cf_determinant(q);
    } else {
      z = covpair::cf_closed(q);
    }
    json params{{"rho", sig12(rho)}, {"sigma", sig12(sigma)}, {"n", n},
                {"u", sig12(u)},     {"v", sig12(v)},         {"form", cf_form}};
    emit("cf", params, complex_json(z));
  });

  // --- cf3 ----------------------------------------------------------------
  auto* cf3 = app.add_subcommand("cf3", "characteristic function of (AB, AC, BC)");
  cf3->add_option("--rho", rho)->required();
  cf3->add_option("--sigma", sigma)->required();
  cf3->add_option("--u", u)->required();
  cf3->add_option("--v", v)->required();
  cf3->add_option("--w", w)->required();
  cf3->callback([&] {
    auto s = covpair::make_structure(rho, sigma);
    const auto z = covpair::cf_triple(s, u, v, w);
    json params{{"rho", sig12(rho)}, {"sigma", sig12(sigma)}, {"u", sig12(u)},
                {"v", sig12(v)},     {"w", sig12(w)}};
    emit("cf3", params, complex_json(z));
  });

  // --- prob ----------------------------------------------------------------
  auto* prob = app.add_subcommand("prob", "P(g_ac > x0, g_bc > y0)");
  prob->add_option("--rho", rho)->required();
  prob->add_option("--sigma", sigma)->required();
  prob->add_option("--n", n)->required()->check(CLI::PositiveNumber);
  prob->add_option("--x0", x0)->capture_default_str();
  prob->add_option("--y0", y0)->capture_default_str();
  tols.attach(prob);
  prob->callback([&] {
    auto s = covpair::make_structure(rho, sigma);
    const auto r = covpair::quadrant_probability(s, n, x0, y0, tols.config());
    json params{{"rho", sig12(rho)}, {"sigma", sig12(sigma)}, {"n", n},
                {"x0", sig12(x0)},   {"y0", sig12(y0)}};
    tols.echo(params);
    json result{{"value", sig12(r.value)},
                {"raw_value", sig12(r.raw_value)},
                {"error_estimate", sig12(r.error_estimate)},
                {"subdivisions", r.subdivisions_used},
                {"converged", r.converged}};
    emit("prob", params, result);
    if (!r.converged) exit_code = kExitNoConvergence;
  });

  // --- marginal --------------------------------------------------------------
  auto* marginal = app.add_subcommand("marginal", "marginal density of g_ac (depends on rho only)");
  marginal->add_option("--rho", rho)->required();
  marginal->add_option("--sigma", sigma)->capture_default_str();
  marginal->add_option("--n", n)->required()->check(CLI::PositiveNumber);
  marginal->add_option("--x", x)->required();
  marginal->callback([&] {
    auto s = covpair::make_structure(rho, sigma);
    const double value = covpair::marginal_density(s, n, x);
    json params{{"rho", sig12(rho)}, {"sigma", sig12(sigma)}, {"n", n}, {"x", sig12(x)}};
    json result;
    if (std::isinf(value)) {
      result["infinite"] = true;
    } else {
      result["value"] = sig12(value);
    }
    emit("marginal", params, result);
  });

  // --- invert ---------------------------------------------------------------
  auto* invert = app.add_subcommand("invert", "density recovered by inverting the CF");
  invert->add_option("--rho", rho)->required();
  invert->add_option("--sigma", sigma)->required();
  invert->add_option("--n", n)->required()->check(CLI::PositiveNumber);
  invert->add_option("--x", x)->required();
  invert->add_option("--y", y)->required();
  static double inv_tol;
  inv_tol = 1e-6;
  invert->add_option("--tol", inv_tol, "absolute tolerance for the inversion")
      ->capture_default_str();
  invert->callback([&] {
    auto s = covpair::make_structure(rho, sigma);
    QuadratureConfig cfg;
    cfg.abs_tol = inv_tol;
    const auto r = covpair::invert_cf(s, n, x, y, cfg);
    json params{{"rho", sig12(rho)}, {"sigma", sig12(sigma)}, {"n", n},
                {"x", sig12(x)},     {"y", sig12(y)},         {"tol", sig12(inv_tol)}};
    json result{{"value", sig12(r.value)},
                {"error_estimate", sig12(r.error_estimate)},
                {"slow_convergence", r.slow_convergence}};
    emit("invert", params, result);
    if (r.slow_convergence) exit_code = kExitNoConvergence;
  });

  // --- simulate ---------------------------------------------------------------
  auto* simulate = app.add_subcommand("simulate", "seeded Monte Carlo of the covariance pair");
  static std::uint64_t reps, seed;
  reps = 100000;
  seed = 0;
  static std::string emit_samples;
  emit_samples.clear();
  simulate->add_option("--rho", rho)->required();
  simulate->add_option("--sigma", sigma)->required();
  simulate->add_option("--n", n)->required()->check(CLI::PositiveNumber);
  simulate->add_option("--reps", reps)->capture_default_str()->check(CLI::PositiveNumber);
  simulate->add_option("--seed", seed)->capture_default_str();
  simulate->add_option("--x0", x0)->capture_default_str();
  simulate->add_option("--y0", y0)->capture_default_str();
  simulate->add_option("--emit-samples", emit_samples, "write per-rep g_ac,g_bc CSV here");
  simulate->callback([&] {
    auto s = covpair::make_structure(rho, sigma);
    covpair::SimulationPlan plan{s, n, reps, seed};
    if (!emit_samples.empty()) {
      std::ofstream out(emit_samples);
      if (!out) throw IoFailure("cannot open " + emit_samples + " for writing");
      out << "g_ac,g_bc\n";
      char line[96];
      for (const auto& pair : covpair::sample_cov_pairs(plan)) {
        std::snprintf(line, sizeof line, "%.12g,%.12g\n", pair[0], pair[1]);
        out << line;
      }
      if (!out.good()) throw IoFailure("write to " + emit_samples + " failed");
    }
    const auto est = covpair::empirical_quadrant(plan, x0, y0);
    json params{{"rho", sig12(rho)}, {"sigma", sig12(sigma)}, {"n", n},
                {"reps", reps},      {"seed", seed},          {"x0", sig12(x0)},
                {"y0", sig12(y0)}};
    if (!emit_samples.empty()) params["emit_samples"] = emit_samples;
    json result{{"estimate", sig12(est.estimate)},
                {"std_error", sig12(est.std_error)},
                {"hits", est.hits},
                {"reps", est.reps}};
    emit("simulate", params, result);
  });

  // --- test ------------------------------------------------------------------
  auto* test = app.add_subcommand("test", "equality test of the two cross-covariances");
  static std::string data_path, alternative;
  data_path.clear();
  alternative = "two_sided";
  static double sigma_opt;
  static bool sigma_given;
  sigma_opt = 0.0;
  sigma_given = false;
  test->add_option("--data", data_path, "CSV with header a,b,c")->required();
  test->add_option("--sigma", sigma_opt, "known A-B covariance")
      ->each([&](const std::string&) { sigma_given = true; });
  test->add_option("--alternative", alternative, "two_sided | greater | less")
      ->check(CLI::IsMember({"two_sided", "greater", "less"}))
      ->capture_default_str();
  tols.attach(test);
  test->callback([&] {
    std::ifstream in(data_path);
    if (!in) throw IoFailure("cannot open " + data_path);
    std::string line;
    if (!std::getline(in, line)) throw IoFailure("empty file: " + data_path);
    auto strip = [](std::string t) {
      while (!t.empty() && (t.back() == '\r' || t.back() == ' ' || t.back() == '\t')) t.pop_back();
      std::size_t i = 0;
      while (i < t.size() && (t[i] == ' ' || t[i] == '\t')) ++i;
      return t.substr(i);
    };
    if (strip(line) != "a,b,c") {
      throw covpair::DomainError("expected CSV header 'a,b,c' in " + data_path);
    }
    covpair::TestInput input;
    while (std::getline(in, line)) {
      line = strip(line);
      if (line.empty()) continue;
      std::array<double, 3> row{};
      std::istringstream ss(line);
      std::string cell;
      for (int i = 0; i < 3; ++i) {
        if (!std::getline(ss, cell, ',')) {
          throw covpair::DomainError("malformed row in " + data_path + ": " + line);
        }
        char* end = nullptr;
        row[i] = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str()) {
          throw covpair::DomainError("malformed number in " + data_path + ": " + cell);
        }
      }
      input.observations.push_back(row);
    }
    if (sigma_given) input.sigma = sigma_opt;
    if (alternative == "greater") {
      input.alternative = covpair::Alternative::Greater;
    } else if (alternative == "less") {
      input.alternative = covpair::Alternative::Less;
    }
    const auto r = covpair::equality_test(input, tols.config());
    json params{{"data", data_path}, {"alternative", alternative}};
    if (sigma_given) params["sigma"] = sig12(sigma_opt);
    tols.echo(params);
    json result{
        {"statistic", sig12(r.statistic)},
        {"n", r.n},
        {"sigma_used", sig12(r.sigma_used)},
        {"sigma_source", r.sigma_source == covpair::SigmaSource::Supplied ? "supplied" : "estimated"},
        {"p_value", sig12(r.p_value)}};
    emit("test", params, result);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  } catch (const IoFailure& e) {
    std::cerr << "covpair: " << e.what() << "\n";
    return kExitIo;
  } catch (const covpair::Error& e) {
    std::cerr << "covpair: " << e.what() << "\n";
    return kExitValidation;
  }
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
