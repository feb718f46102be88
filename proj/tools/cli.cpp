#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include "krein/acceptance.hpp"
#include "krein/csv.hpp"
#include "krein/oscillation.hpp"
#include "krein/oscillators.hpp"
#include "krein/reports.hpp"

namespace krein::cli {
namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(value))
      throw ConfigError(what + ": '" + item + "' is not a number");
    out.push_back(value);
  }
  if (out.empty()) throw ConfigError(what + ": empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<int> out;
  for (double v : parse_list(text, what)) {
    if (v != std::floor(v) || v < 1 || v > 1e6) throw ConfigError(what + ": entries must be positive integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw ConfigError("point count must be positive");
  if (n == 1) return {lo};
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
  return out;
}

int jobs_from_env() {
  const char* env = std::getenv("KREIN_QM_JOBS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 1024) throw ConfigError("KREIN_QM_JOBS must be a positive integer");
  return static_cast<int>(v);
}

Channel parse_channel(const std::string& text) {
  auto flavour = [&](const std::string& f) {
    if (f == "e") return Flavour::E;
    if (f == "mu") return Flavour::Mu;
    if (f == "tau") return Flavour::Tau;
    throw ConfigError("channel: unknown flavour '" + f + "' (use e, mu, tau)");
  };
  const auto dash = text.find('-');
  if (dash == std::string::npos) throw ConfigError("channel: expected FROM-TO, e.g. mu-e");
  return {flavour(text.substr(0, dash)), flavour(text.substr(dash + 1))};
}

std::string json_token(const std::string& key, const nlohmann::json& value) {
  if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  if (value.is_number()) return format_double(value.get<double>());
  if (value.is_string()) return value.get<std::string>();
  if (value.is_array()) {
    std::string out;
    for (const auto& item : value) {
      if (!item.is_number()) throw ConfigError("config key '" + key + "': arrays must hold numbers");
      if (!out.empty()) out += ",";
      out += item.is_number_integer() ? std::to_string(item.get<long long>()) : format_double(item.get<double>());
    }
    return out;
  }
  throw ConfigError("config key '" + key + "': unsupported value type");
}

// Config entries become option tokens placed before the command-line ones;
// every option keeps its last value, so flags win over the file.
std::vector<std::string> config_tokens(const std::string& path, const CLI::App& sub) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config file " + path + ": top level must be an object");
  std::vector<std::string> out;
  for (const auto& [key, value] : doc.items()) {
    if (key == "config" || !sub.get_option_no_throw("--" + key))
      throw ConfigError("config file " + path + ": unknown key '" + key + "' for " + sub.get_name());
    out.push_back("--" + key);
    out.push_back(json_token(key, value));
  }
  return out;
}

struct Common {
  std::string config;
  std::string out;
  int jobs = 0;
};

class Tool {
 public:
  Tool(std::ostream& out, std::ostream& err) : out_(out), err_(err) {
    app_.require_subcommand(1);
    app_.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    add("bells", "Coefficient bells of p|psi^n> and P_0|psi^n>");
    opt("--p", bells_.p, "Probability of the first basis state");
    opt("--n", bells_.n, "Comma-separated copy counts");

    add("osc", "Two-state oscillation probabilities P+ and P- against the phase dE t");
    opt("--theta", osc_.theta, "Comma-separated hyperbolic mixing angles");
    opt("--points", osc_.points, "Phase points per angle");
    opt("--max-phase", osc_.max_phase, "Largest phase");

    add("nu-contours", "Iso-probability contours of 3-1 and 3+1 sterile mixing");
    opt("--levels", nu_.levels, "Comma-separated probability levels");
    opt("--loe", nu_.loe, "L/E in km/GeV");
    opt("--channel", nu_.channel, "FROM-TO flavours, e.g. mu-e or e-e");
    opt("--dm2-min", nu_.dm2_min, "Smallest mass splitting in eV^2");
    opt("--dm2-max", nu_.dm2_max, "Largest mass splitting in eV^2");
    opt("--dm2-points", nu_.dm2_points, "Log-spaced mass-splitting points");
    opt("--theta-min", nu_.theta_min, "Smallest mixing angle");
    opt("--theta-max", nu_.theta_max, "Largest mixing angle");
    opt("--theta-points", nu_.theta_points, "Log-spaced angle points");

    add("spectrum2d", "Ghost-oscillator lattice spectrum against the cubic coupling");
    opt("--g-min", s2_.g_min, "First coupling");
    opt("--g-max", s2_.g_max, "Last coupling");
    opt("--g-points", s2_.g_points, "Number of couplings");
    opt("--levels", s2_.levels, "Levels reported per coupling");
    opt("--box", s2_.box, "Half-width of the grid");
    opt("--points", s2_.points, "Odd number of grid points");
    opt("--k-lin", s2_.k_lin, "Linear term of the potential");
    opt("--quad", s2_.quad, "Quadratic term of the potential");
    opt("--lambda", s2_.lambda, "Quartic term of the potential");
    opt("--convergence-check", s2_.check, "Compare against a refined grid");
    opt("--convergence-tol", s2_.tol, "Largest eigenvalue shift on the refined grid");

    add("spectrum4d", "Four-derivative oscillator lattice spectrum against the cubic coupling");
    opt("--wp", s4_.wp, "Lower frequency");
    opt("--wm", s4_.wm, "Upper frequency");
    opt("--g-min", s4_.g_min, "First coupling");
    opt("--g-max", s4_.g_max, "Last coupling");
    opt("--g-points", s4_.g_points, "Number of couplings");
    opt("--levels", s4_.levels, "Levels reported per coupling");
    opt("--lambda-over-g", s4_.lambda_over_g, "Quartic coupling as a multiple of g");
    opt("--box1", s4_.box1, "Half-width of the q grid");
    opt("--points1", s4_.points1, "Odd number of q grid points");
    opt("--box2", s4_.box2, "Half-width of the dq/dt grid");
    opt("--points2", s4_.points2, "Odd number of dq/dt grid points");

    add("propcheck", "Partial-fraction identity of the four-derivative propagator");
    opt("--wp", prop_.wp, "Lower frequency");
    opt("--wm", prop_.wm, "Upper frequency");
    opt("--omega", prop_.omega, "Comma-separated probe frequencies");

    add("selftest", "Run the acceptance checks");
    opt("--null-tol", self_.null_tol, "Null-norm threshold used by every classification");
    opt("--only", self_.only, "Comma-separated check ids");
  }

  int run(std::vector<std::string> args) {
    // args[0] is the program name; the subcommand is the first bare token.
    const auto sub_pos = std::find_if(args.begin() + 1, args.end(), [](const std::string& a) { return !a.empty() && a[0] != '-'; });
    if (sub_pos != args.end()) {
      CLI::App* sub = app_.get_subcommand_no_throw(*sub_pos);
      std::string config_path;
      for (auto it = sub_pos + 1; it != args.end(); ++it) {
        if (*it == "--config" && it + 1 != args.end()) config_path = *(it + 1);
        if (it->rfind("--config=", 0) == 0) config_path = it->substr(9);
      }
      if (sub && !config_path.empty()) {
        const auto tokens = config_tokens(config_path, *sub);
        args.insert(sub_pos + 1, tokens.begin(), tokens.end());
      }
    }
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
      app_.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      const int code = app_.exit(e, out_, err_);
      return code == 0 ? kExitOk : kExitUsage;
    }
    if (common_.jobs == 0) common_.jobs = jobs_from_env();
    if (common_.jobs < 0) throw ConfigError("--jobs must be positive");

    const std::string name = app_.get_subcommands().front()->get_name();
    if (name == "bells") return bells();
    if (name == "osc") return osc();
    if (name == "nu-contours") return contours();
    if (name == "spectrum2d") return spectrum2d();
    if (name == "spectrum4d") return spectrum4d();
    if (name == "propcheck") return propcheck();
    return selftest();
  }

 private:
  void add(const std::string& name, const std::string& description) {
    current_ = app_.add_subcommand(name, description);
    opt("--config", common_.config, "JSON file of option values; flags override it");
    opt("--out", common_.out, "Output file (default: standard output)");
    opt("--jobs", common_.jobs, "Concurrent solves (default: KREIN_QM_JOBS or 1)");
  }

  template <typename T>
  void opt(const std::string& name, T& value, const std::string& description) {
    current_->add_option(name, value, description)->capture_default_str();
  }

  void emit(const std::string& text, const std::string& summary) {
    if (common_.out.empty()) {
      out_ << text;
      err_ << summary << "\n";
    } else {
      write_text(common_.out, text);
      out_ << summary << " -> " << common_.out << "\n";
    }
  }

  int report_scan(const std::string& name, const std::vector<ScanPoint>& scan, const CsvTable& table) {
    int failed = 0, with_pairs = 0;
    for (const auto& p : scan) {
      if (!p.result) {
        ++failed;
        err_ << name << ": g = " << format_double(p.g) << " failed: " << p.error << "\n";
      } else if (p.result->spectrum.null_pair_count() > 0) {
        ++with_pairs;
      }
    }
    emit(table.str(), name + ": " + std::to_string(scan.size() - failed) + "/" + std::to_string(scan.size()) +
                          " couplings solved, " + std::to_string(with_pairs) + " with null pairs, " +
                          std::to_string(table.rows()) + " rows");
    return failed == 0 ? kExitOk : kExitNumerical;
  }

  int bells() {
    const auto ns = parse_int_list(bells_.n, "--n");
    const CsvTable table = bells_table(bells_.p, ns);
    emit(table.str(), "bells: " + std::to_string(table.rows()) + " rows for p = " + short_number(bells_.p));
    return kExitOk;
  }

  int osc() {
    const CsvTable table = osc_table(parse_list(osc_.theta, "--theta"), osc_.points, osc_.max_phase);
    emit(table.str(), "osc: " + std::to_string(table.rows()) + " rows");
    return kExitOk;
  }

  int contours() {
    if (!(nu_.dm2_min > 0 && nu_.dm2_max > nu_.dm2_min && nu_.theta_min > 0 && nu_.theta_max > nu_.theta_min))
      throw ConfigError("nu-contours: need 0 < min < max for both axes");
    const auto cells = contour_scan(parse_channel(nu_.channel), parse_list(nu_.levels, "--levels"),
                                    log_grid(nu_.dm2_min, nu_.dm2_max, nu_.dm2_points),
                                    log_grid(nu_.theta_min, nu_.theta_max, nu_.theta_points), nu_.loe);
    size_t m31 = 0;
    for (const auto& c : cells) m31 += c.model == MixingModel::ThreeMinusOne;
    const CsvTable table = contour_table(cells);
    emit(table.str(), "nu-contours: " + std::to_string(m31) + " cells 3m1, " + std::to_string(cells.size() - m31) +
                          " cells 3p1");
    return kExitOk;
  }

  int spectrum2d() {
    PotentialSpec potential{s2_.k_lin, s2_.quad, 0.0, s2_.lambda};
    LatticeOptions options;
    options.check_convergence = s2_.check;
    options.convergence_tol = s2_.tol;
    const auto scan = ghost_oscillator_scan(Grid1D(s2_.box, s2_.points), potential,
                                            linspace(s2_.g_min, s2_.g_max, s2_.g_points), s2_.levels, common_.jobs,
                                            options);
    return report_scan("spectrum2d", scan, spectrum2d_table(scan));
  }

  int spectrum4d() {
    PaisUhlenbeckSpec spec{s4_.wp, s4_.wm, 0.0, 0.0, Grid1D(s4_.box1, s4_.points1), Grid1D(s4_.box2, s4_.points2)};
    const auto scan = pu_spectrum_scan(spec, linspace(s4_.g_min, s4_.g_max, s4_.g_points), s4_.levels,
                                       s4_.lambda_over_g, common_.jobs);
    return report_scan("spectrum4d", scan, spectrum4d_table(scan, s4_.wp, s4_.wm));
  }

  int propcheck() {
    const auto omegas = parse_list(prop_.omega, "--omega");
    const CsvTable table = propcheck_table(omegas, prop_.wp, prop_.wm);
    double worst = 0.0;
    for (double w : omegas) worst = std::max(worst, propagator_identity(w, prop_.wp, prop_.wm).relative_residual);
    emit(table.str(), "propcheck: " + std::to_string(table.rows()) + " rows, max relative residual " +
                          short_number(worst));
    return worst < 1e-12 ? kExitOk : kExitNumerical;
  }

  int selftest() {
    AcceptanceOptions options;
    options.classify.null_tol = self_.null_tol;
    options.jobs = common_.jobs;
    if (!self_.only.empty()) options.only = parse_int_list(self_.only, "--only");
    std::string report;
    int passed = 0;
    const auto results = run_acceptance(options);
    for (const auto& r : results) {
      report += format_check(r) + "\n";
      passed += r.passed;
    }
    const std::string summary =
        "selftest: " + std::to_string(passed) + "/" + std::to_string(results.size()) + " checks passed";
    if (!common_.out.empty()) write_text(common_.out, report + summary + "\n");
    out_ << report << summary << "\n";
    return passed == static_cast<int>(results.size()) ? kExitOk : kExitNumerical;
  }

  std::ostream& out_;
  std::ostream& err_;
  CLI::App app_{"Quantum mechanics with indefinite-norm state spaces", "krein_qm"};
  CLI::App* current_ = nullptr;
  Common common_;

  struct {
    double p = 0.3;
    std::string n = "10,40,160";
  } bells_;
  struct {
    std::string theta = "0.25,0.5,1,2";
    int points = 201;
    double max_phase = 4.0 * std::numbers::pi;
  } osc_;
  struct {
    std::string levels = "0.01,0.1";
    double loe = 1.0;
    std::string channel = "mu-e";
    double dm2_min = 1e-2, dm2_max = 1e2;
    int dm2_points = 121;
    double theta_min = 1e-2, theta_max = 1.5;
    int theta_points = 121;
  } nu_;
  struct {
    double g_min = 0.0, g_max = 0.4;
    int g_points = 11;
    Index levels = 6;
    double box = 10.0;
    Index points = 201;
    double k_lin = 0.0, quad = 0.0, lambda = 0.0;
    bool check = true;
    double tol = 2e-2;
  } s2_;
  struct {
    double wp = 1.0, wm = 1.5;
    double g_min = 0.0, g_max = 0.5;
    int g_points = 6;
    Index levels = 8;
    double lambda_over_g = 0.5;
    double box1 = 6.0;
    Index points1 = 101;
    double box2 = 6.0;
    Index points2 = 101;
  } s4_;
  struct {
    double wp = 1.0, wm = 1.5;
    std::string omega = "0,0.25,0.5,0.75,1.25,2,3";
  } prop_;
  struct {
    double null_tol = 1e-8;
    std::string only;
  } self_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    Tool tool(out, err);
    return tool.run(args.empty() ? std::vector<std::string>{"krein_qm"} : args);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace krein::cli
