#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "mdcf/cf/convergents.hpp"
#include "mdcf/cf/orbit.hpp"
#include "mdcf/io/format.hpp"
#include "mdcf/io/svg.hpp"
#include "mdcf/lattice/simultaneous.hpp"
#include "mdcf/markov/partition.hpp"
#include "mdcf/stats/ergodic.hpp"
#include "mdcf/stats/lyapunov.hpp"

namespace mdcf::cli {

enum ExitCode { kOk = 0, kVerificationFailed = 1, kDomainError = 2, kBudgetExceeded = 3 };

/// JSON config files: one object whose keys are long flag names. Arrays are
/// joined with commas; a "command" key is ignored. Values are routed to the
/// subcommand selected on the command line.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App* root = nullptr) : root_(root) {}

  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    nlohmann::ordered_json j;
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames().front();
      if (opt->count() > 0) {
        j[name] = opt->as<std::string>();
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    return j.dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(input);
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config: expected a JSON object");
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : j.items()) {
      if (key == "command") continue;
      CLI::ConfigItem item;
      item.name = key;
      if (root_ && !root_->get_subcommands().empty()) item.parents.push_back(root_->get_subcommands().front()->get_name());
      item.inputs.push_back(scalar(value, key));
      items.push_back(std::move(item));
    }
    return items;
  }

 private:
  static std::string scalar(const nlohmann::json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    if (v.is_number_float()) return io::format_double(v.get<double>());
    if (v.is_array()) {
      std::vector<std::string> parts;
      for (const auto& e : v) parts.push_back(scalar(e, key));
      return io::join(parts, ",");
    }
    throw CLI::ConversionError("config: unsupported value for '" + key + "'");
  }

  const CLI::App* root_;
};

/// Total-step cap from MDCF_BUDGET; 0 when unset.
inline double step_budget() {
  const char* s = std::getenv("MDCF_BUDGET");
  if (!s || !*s) return 0;
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (*end != '\0' || !(v > 0)) throw DomainError("MDCF_BUDGET must be a positive number");
  return v;
}

inline void check_budget(double steps, const char* what) {
  const double cap = step_budget();
  if (cap > 0 && steps > cap) throw BudgetError(std::string(what) + ": " + io::format_double(steps) + " steps exceed MDCF_BUDGET");
}

/// Writes to the file named by `path`, or to `fallback` when it is empty.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      out_ = &fallback;
    } else {
      file_.open(path, std::ios::binary);
      if (!file_) throw DomainError("cannot open '" + path + "' for writing");
      out_ = &file_;
    }
  }
  std::ostream& stream() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

struct Options {
  std::string alg = "gauss";
  int dim = 0;
  std::string x;
  std::size_t n = 0;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  long precision = 0;
  std::string t0 = "1/100";
  std::string ratio = "1/10";
  std::size_t steps = 5;
  long amax = 40;
  std::string norm = "sup";
  unsigned threads = 0;
  std::string out;
  std::string what = "markov";
  std::size_t bins = 100;
  std::size_t burn_in = 1000;
  std::size_t reorth = 10;
  std::size_t lochs_n = 1000;
  std::size_t lochs_trials = 0;
  std::size_t jager_bins = 0;
};

namespace detail {

inline std::vector<io::ParsedNumber> parse_x(const Options& o, long prec) {
  if (o.x.empty()) throw DomainError("--x is required");
  return io::parse_vector(o.x, prec);
}

inline bool all_exact(const std::vector<io::ParsedNumber>& v) {
  for (const auto& e : v)
    if (!e.exact) return false;
  return true;
}

template <class T>
std::vector<T> values(const std::vector<io::ParsedNumber>& v) {
  std::vector<T> out;
  for (const auto& e : v) {
    if constexpr (std::is_same_v<T, Rational>) {
      out.push_back(*e.exact);
    } else {
      out.push_back(e.value);
    }
  }
  return out;
}

inline std::vector<std::string> record_fields(const ApproximationRecord& r) {
  return {io::format_integer(r.q), io::join_integers(r.p), io::format_double(r.error), io::format_double(r.dist),
          io::format_double(r.dirichlet_ratio)};
}

template <class T>
void expand_rows(const AlgorithmId& alg, const std::vector<T>& x, std::size_t n, Norm norm, std::ostream& os) {
  auto orbit = expand<T>(alg, x, n);
  io::CsvWriter csv(os);
  csv.row({"step", "digits", "q", "p", "error", "dist", "dirichlet_ratio", "halted"});
  auto c = ConvergentProduct::start(alg);
  for (std::size_t k = 0; k < orbit.steps.size(); ++k) {
    const auto& s = orbit.steps[k];
    accumulate(c, s);
    auto recs = extract_approximations<T>(c, x, norm);
    std::vector<std::string> digits;
    for (const auto& dgt : s.digits) digits.push_back(io::format_integer(scalar_traits<T>::to_integer(dgt)));
    std::vector<std::string> row{std::to_string(k + 1), io::join(digits, ";")};
    if (recs.empty()) {
      row.insert(row.end(), {"", "", "", "", ""});
    } else {
      auto best = std::min_element(recs.begin(), recs.end(), [](const auto& a, const auto& b) {
        return a.error != b.error ? a.error < b.error : a.q > b.q;
      });
      auto f = record_fields(*best);
      row.insert(row.end(), f.begin(), f.end());
    }
    const bool last = k + 1 == orbit.steps.size();
    row.push_back(last && orbit.halted() ? "1" : "0");
    csv.row(row);
  }
}

}  // namespace detail

inline int cmd_expand(const Options& o, std::ostream& os) {
  const long prec = o.precision ? o.precision : kDefaultPrecisionBits;
  auto x = detail::parse_x(o, prec);
  const int d = o.dim ? o.dim : static_cast<int>(x.size());
  const auto alg = make_algorithm(o.alg, d);
  const std::size_t n = o.n ? o.n : 20;
  check_budget(static_cast<double>(n), "expand");
  const Norm norm = parse_norm(o.norm);
  if (o.precision == 0 && detail::all_exact(x)) {
    detail::expand_rows(alg, detail::values<Rational>(x), n, norm, os);
  } else {
    detail::expand_rows(alg, detail::values<Real>(x), n, norm, os);
  }
  return kOk;
}

inline int cmd_lyapunov(const Options& o, std::ostream& os) {
  const auto alg = make_algorithm(o.alg, o.dim ? o.dim : (is_one_dimensional(parse_algorithm_kind(o.alg)) ? 1 : 2));
  LyapunovOptions lo;
  lo.n = o.n ? o.n : 1'000'000;
  lo.trials = o.trials;
  lo.seed = o.seed;
  lo.precision = o.precision;
  lo.threads = o.threads;
  lo.burn_in = o.burn_in;
  lo.reorth_every = o.reorth;
  lo.step_budget = step_budget();
  const auto est = estimate_lyapunov(alg, lo);
  io::CsvWriter csv(os);
  csv.row({"algorithm", "dim", "n", "trials", "seed", "lambda1", "stderr1", "lambda2", "stderr2", "eta_star",
           "eta_star_stderr", "discarded"});
  std::string eta = "nan", eta_err = "nan";
  if (est.lambda1 > 0) {
    const auto e = eta_star(est);
    eta = io::format_double(e.value);
    eta_err = io::format_double(e.error);
  }
  csv.row({to_string(alg), std::to_string(alg.dim), std::to_string(est.n), std::to_string(est.trials),
           std::to_string(est.seed), io::format_double(est.lambda1), io::format_double(est.stderr1),
           io::format_double(est.lambda2), io::format_double(est.stderr2), eta, eta_err,
           std::to_string(est.discarded)});
  return kOk;
}

inline int cmd_lll(const Options& o, std::ostream& os) {
  const long prec = o.precision ? o.precision : kDefaultPrecisionBits;
  auto x = detail::values<Real>(detail::parse_x(o, prec));
  if (o.dim && static_cast<std::size_t>(o.dim) != x.size()) throw DimensionError("lll: --dim does not match --x");
  const Real t0 = io::parse_number(o.t0, prec).value;
  const Real ratio = io::parse_number(o.ratio, prec).value;
  LllParams<Real> params;
  if (const double cap = step_budget(); cap > 0) params.max_swaps = static_cast<std::size_t>(cap);
  auto recs = iterated_approx<Real>(x, t0, ratio, o.steps, params, o.threads ? o.threads : 1, parse_norm(o.norm));
  io::CsvWriter csv(os);
  csv.row({"t", "q", "p", "error", "dist", "dirichlet_ratio", "certified_bound", "certified"});
  for (const auto& r : recs) {
    std::vector<std::string> row{io::format_double(r.t)};
    auto f = detail::record_fields(r.record);
    row.insert(row.end(), f.begin(), f.end());
    row.push_back(io::format_double(r.certified_bound));
    row.push_back(r.certified ? "1" : "0");
    csv.row(row);
  }
  return kOk;
}

inline int cmd_markov_verify(const Options& o, std::ostream& os, std::ostream& err) {
  const auto rep = markov::verify_markov(o.amax, {1, 2, 3, 4}, o.threads ? o.threads : default_threads());
  io::CsvWriter csv(os);
  csv.row({"type", "a", "b", "piece", "residual", "pass"});
  std::map<int, std::pair<std::size_t, std::size_t>> per_type;
  for (const auto& r : rep.rows) {
    csv.row({std::to_string(r.type_id), io::format_integer(r.label.a), io::format_integer(r.label.b),
             markov::to_string(r.piece), io::format_rational(r.residual), r.pass ? "1" : "0"});
    auto& [total, ok] = per_type[r.type_id];
    ++total;
    ok += r.pass;
    if (!r.pass)
      err << "FAIL type " << r.type_id << " cell C" << markov::to_string(r.label) << " in "
          << markov::to_string(r.piece) << " residual " << io::format_rational(r.residual) << '\n';
  }
  for (const auto& [type, counts] : per_type)
    err << "type " << type << ": " << counts.second << "/" << counts.first << " cells exact\n";
  if (!rep.uncovered.empty()) {
    err << "warning: partial coverage, no instance of type";
    for (int t : rep.uncovered) err << ' ' << t;
    err << " with |a| <= " << o.amax << '\n';
  }
  return rep.passed() ? kOk : kVerificationFailed;
}

inline int cmd_render(const Options& o, std::ostream& os, std::ostream& err) {
  io::SvgCanvas c;
  if (o.what == "markov") {
    c = io::markov_partition_svg();
  } else if (o.what == "cells") {
    c = io::typed_cells_svg(o.amax);
  } else if (o.what == "cylinders") {
    c = io::cylinders_svg(o.amax);
  } else {
    throw DomainError("render-partition: --what must be markov, cells or cylinders");
  }
  c.write(os);
  err << c.size() << " polygons\n";
  return kOk;
}

inline int cmd_stats(const Options& o, std::ostream& os) {
  GaussEnsembleOptions g;
  g.n = o.n ? o.n : 100'000;
  g.trials = o.trials;
  g.seed = o.seed;
  g.threads = o.threads;
  g.density_bins = o.bins;
  g.jager_bins = o.jager_bins;
  const std::size_t lochs_trials = o.lochs_trials ? o.lochs_trials : o.trials;
  check_budget(static_cast<double>(g.n) * static_cast<double>(g.trials) +
                   static_cast<double>(o.lochs_n) * static_cast<double>(lochs_trials),
               "stats");
  const auto ens = gauss_ensemble(g);
  const auto lochs = lochs_ensemble(o.lochs_n, lochs_trials, o.seed, o.threads);

  std::vector<std::pair<std::string, std::string>> sections;
  auto section = [&](const std::string& name, const std::function<void(io::CsvWriter&)>& fill) {
    std::ostringstream s;
    io::CsvWriter csv(s);
    fill(csv);
    sections.emplace_back(name, s.str());
  };
  section("digits", [&](io::CsvWriter& csv) {
    csv.row({"digit", "frequency", "stderr", "theory"});
    for (std::size_t j = 1; j < ens.digit_frequency.size(); ++j)
      csv.row({std::to_string(j), io::format_double(ens.digit_frequency[j].mean),
               io::format_double(ens.digit_frequency[j].standard_error()), io::format_double(gauss_kuzmin_frequency(j))});
    csv.row({">" + std::to_string(g.max_digit), io::format_double(ens.digit_frequency[0].mean),
             io::format_double(ens.digit_frequency[0].standard_error()),
             io::format_double(std::log2(1 + 1.0 / static_cast<double>(g.max_digit + 1)))});
  });
  section("levy", [&](io::CsvWriter& csv) {
    csv.row({"n", "trials", "bits", "estimate", "stderr", "theory"});
    csv.row({std::to_string(g.n), std::to_string(g.trials), std::to_string(ens.bits), io::format_double(ens.levy.mean),
             io::format_double(ens.levy.standard_error()), io::format_double(levy_constant())});
  });
  section("theta_cdf", [&](io::CsvWriter& csv) {
    csv.row({"z", "empirical", "stderr", "theory"});
    for (std::size_t i = 0; i < g.z_grid.size(); ++i)
      csv.row({io::format_double(g.z_grid[i]), io::format_double(ens.theta_cdf[i].mean),
               io::format_double(ens.theta_cdf[i].standard_error()), io::format_double(doeblin_lenstra_cdf(g.z_grid[i]))});
  });
  section("borel_tong", [&](io::CsvWriter& csv) {
    csv.row({"checks", "borel_violations", "tong_violations", "undecided", "max_theta"});
    csv.row({std::to_string(ens.borel_checks), std::to_string(ens.borel_violations), std::to_string(ens.tong_violations),
             std::to_string(ens.undecided), io::format_double(ens.max_theta)});
  });
  section("lochs", [&](io::CsvWriter& csv) {
    csv.row({"n", "trials", "mean", "stderr", "theory"});
    csv.row({std::to_string(o.lochs_n), std::to_string(lochs_trials), io::format_double(lochs.mean),
             io::format_double(lochs.standard_error()), io::format_double(lochs_constant())});
  });
  section("density", [&](io::CsvWriter& csv) {
    csv.row({"bin_lo", "bin_hi", "density", "theory"});
    const double total = static_cast<double>(g.n) * static_cast<double>(g.trials), w = 1.0 / static_cast<double>(g.density_bins);
    for (std::size_t i = 0; i < ens.density.size(); ++i) {
      const double lo = static_cast<double>(i) * w, hi = lo + w;
      csv.row({io::format_double(lo), io::format_double(hi), io::format_double(static_cast<double>(ens.density[i]) / (total * w)),
               io::format_double(std::log((1 + hi) / (1 + lo)) / std::numbers::ln2 / w)});
    }
  });
  if (g.jager_bins) {
    section("jager", [&](io::CsvWriter& csv) {
      csv.row({"i", "j", "count"});
      for (std::size_t i = 0; i < g.jager_bins; ++i)
        for (std::size_t j = 0; j < g.jager_bins; ++j)
          csv.row({std::to_string(i), std::to_string(j), std::to_string(ens.jager[i * g.jager_bins + j])});
    });
  }

  if (o.out.empty() || o.out == "-") {
    for (std::size_t i = 0; i < sections.size(); ++i) {
      if (i) os << '\n';
      os << "# " << sections[i].first << '\n' << sections[i].second;
    }
  } else {
    std::filesystem::create_directories(o.out);
    for (const auto& [name, body] : sections) {
      std::ofstream f(std::filesystem::path(o.out) / (name + ".csv"), std::ios::binary);
      if (!f) throw DomainError("cannot write into '" + o.out + "'");
      f << body;
    }
  }
  return kOk;
}

inline int cmd_theta(const Options& o, std::ostream& os) {
  const long prec = o.precision ? o.precision : 4096;
  auto x = detail::parse_x(o, prec);
  if (x.size() != 1) throw DimensionError("theta: expects a single number");
  const Rational r = x[0].exact ? *x[0].exact : x[0].value.to_rational();
  const std::size_t n = o.n ? o.n : 50;
  check_budget(static_cast<double>(n), "theta");
  auto th = theta_sequence(r, n);
  io::CsvWriter csv(os);
  csv.row({"k", "digit", "theta"});
  csv.row({"0", "0", io::format_double(th.theta[0])});
  for (std::size_t k = 0; k < th.digits.size(); ++k)
    csv.row({std::to_string(k + 1), io::format_integer(th.digits[k]), io::format_double(th.theta[k + 1])});
  return kOk;
}

inline int cmd_best(const Options& o, std::ostream& os) {
  const long prec = o.precision ? o.precision : kDefaultPrecisionBits;
  auto x = detail::parse_x(o, prec);
  const std::uint64_t Q = o.n ? o.n : 10'000;
  const double cap = step_budget();
  const auto budget = cap > 0 ? static_cast<std::uint64_t>(cap) : std::uint64_t{1'000'000'000};
  const Norm norm = parse_norm(o.norm);
  BestApproxList list = detail::all_exact(x) ? best_approximations<Rational>(detail::values<Rational>(x), Q, norm, budget)
                                             : best_approximations<Real>(detail::values<Real>(x), Q, norm, budget);
  std::vector<Integer> det;
  if (list.records.size() > x.size()) det = best_approx_determinants(list, x.size());
  io::CsvWriter csv(os);
  csv.row({"q", "p", "dist", "determinant"});
  for (std::size_t i = 0; i < list.records.size(); ++i) {
    const auto& r = list.records[i];
    csv.row({io::format_integer(r.q), io::join_integers(r.p), io::format_double(r.dist),
             i < det.size() ? io::format_integer(det[i]) : ""});
  }
  return kOk;
}

inline int cmd_density(const Options& o, std::ostream& os) {
  const auto alg = make_algorithm(o.alg, o.dim ? o.dim : (is_one_dimensional(parse_algorithm_kind(o.alg)) ? 1 : 2));
  DensityOptions d;
  d.n = o.n ? o.n : 100'000;
  d.trials = o.trials;
  d.seed = o.seed;
  d.burn_in = o.burn_in;
  d.threads = o.threads;
  check_budget(static_cast<double>(d.n + d.burn_in) * static_cast<double>(d.trials), "density");
  const auto h = empirical_density(alg, o.bins, d);
  io::CsvWriter csv(os);
  const double w = h.bin_width();
  if (h.axes == 1) {
    csv.row({"x_lo", "x_hi", "count", "density"});
    for (std::size_t i = 0; i < h.bins; ++i)
      csv.row({io::format_double(h.lo + static_cast<double>(i) * w), io::format_double(h.lo + static_cast<double>(i + 1) * w),
               std::to_string(h.counts[i]), io::format_double(h.density(i))});
  } else {
    csv.row({"x_lo", "y_lo", "count", "density"});
    for (std::size_t i = 0; i < h.bins; ++i)
      for (std::size_t j = 0; j < h.bins; ++j)
        csv.row({io::format_double(h.lo + static_cast<double>(i) * w), io::format_double(h.lo + static_cast<double>(j) * w),
                 std::to_string(h.counts[i * h.bins + j]), io::format_double(h.density(i * h.bins + j))});
  }
  return kOk;
}

/// Parses argv and runs one command, writing results to `out` (or to -o)
/// and diagnostics to `err`. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multidimensional continued fractions: expansions, Lyapunov exponents, lattice approximations, "
               "Markov partition checks and Gauss-map statistics"};
  app.require_subcommand(1);
  Options o;
  app.config_formatter(std::make_shared<JsonConfig>(&app));
  app.set_config("--config", "", "JSON file of flag values; flags on the command line win");
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);

  auto add_common = [&](CLI::App* s) {
    s->add_option("--threads", o.threads, "Worker threads, 0 for all cores");
    s->add_option("-o,--out", o.out, "Output path (stdout if omitted)");
  };
  auto add_alg = [&](CLI::App* s) {
    s->add_option("--alg", o.alg, "gauss, nigauss, farey, jp, nijp, brun, selmer, poincare or fs")->capture_default_str();
    s->add_option("-d,--dim", o.dim, "Dimension");
  };
  auto add_seed = [&](CLI::App* s) { s->add_option("--seed", o.seed, "Random seed")->required(); };

  auto* expand = app.add_subcommand("expand", "Digits and convergents along one orbit");
  add_common(expand);
  add_alg(expand);
  expand->add_option("--x", o.x, "Starting point, e.g. 2/5 or sqrt(2)-1,sqrt(3)-1")->required();
  expand->add_option("-n,--n", o.n, "Number of steps (default 20)");
  expand->add_option("--precision", o.precision, "Bits; 0 keeps rational input exact");
  expand->add_option("--norm", o.norm, "sup or euclid")->capture_default_str();

  auto* lyap = app.add_subcommand("lyapunov", "Top two Lyapunov exponents and eta*");
  add_common(lyap);
  add_alg(lyap);
  add_seed(lyap);
  lyap->add_option("-n,--n", o.n, "Steps per orbit (default 1000000)");
  lyap->add_option("--trials", o.trials, "Independent orbits")->capture_default_str();
  lyap->add_option("--precision", o.precision, "0 for double orbits, else bits of the orbit");
  lyap->add_option("--burn-in", o.burn_in, "Discarded initial steps")->capture_default_str();
  lyap->add_option("--reorth", o.reorth, "Renormalization period")->capture_default_str();

  auto* lll = app.add_subcommand("lll", "Simultaneous approximations from reduced lattices");
  add_common(lll);
  lll->add_option("-d,--dim", o.dim, "Dimension (checked against --x)");
  lll->add_option("--x", o.x, "Vector alpha in [0,1]^d")->required();
  lll->add_option("--t0", o.t0, "First scale t")->capture_default_str();
  lll->add_option("--ratio", o.ratio, "Geometric factor between scales")->capture_default_str();
  lll->add_option("--steps", o.steps, "Number of scales")->capture_default_str();
  lll->add_option("--precision", o.precision, "Bits for alpha and the reduction");
  lll->add_option("--norm", o.norm, "sup or euclid")->capture_default_str();

  auto* mv = app.add_subcommand("markov-verify", "Exact check of the Markov image table");
  add_common(mv);
  mv->add_option("--amax", o.amax, "Largest |a| verified")->capture_default_str()->check(CLI::Range(2L, 100000L));

  auto* render = app.add_subcommand("render-partition", "SVG of the partition or of typed cells");
  add_common(render);
  render->add_option("--what", o.what, "markov, cells or cylinders")->capture_default_str();
  render->add_option("--amax", o.amax, "Largest |a| drawn")->capture_default_str()->check(CLI::Range(2L, 1000L));

  auto* stats = app.add_subcommand("stats", "Gauss-map ergodic statistics");
  add_common(stats);
  add_seed(stats);
  stats->add_option("-n,--n", o.n, "Digits per orbit (default 100000)");
  stats->add_option("--trials", o.trials, "Orbits")->capture_default_str();
  stats->add_option("--bins", o.bins, "Density bins")->capture_default_str();
  stats->add_option("--lochs-n", o.lochs_n, "Decimal digits for Lochs")->capture_default_str();
  stats->add_option("--lochs-trials", o.lochs_trials, "Lochs samples (default: --trials)");
  stats->add_option("--jager-bins", o.jager_bins, "Bins per axis of the (Theta_{k-1}, Theta_k) histogram");

  auto* theta = app.add_subcommand("theta", "Approximation coefficients of one number");
  add_common(theta);
  theta->add_option("--x", o.x, "Number in (0,1)")->required();
  theta->add_option("-n,--n", o.n, "Digits (default 50)");
  theta->add_option("--precision", o.precision, "Bits used for irrational input (default 4096)");

  auto* best = app.add_subcommand("best", "Best approximations by exhaustive scan");
  add_common(best);
  best->add_option("--x", o.x, "Vector alpha")->required();
  best->add_option("-n,--n", o.n, "Largest denominator (default 10000)");
  best->add_option("--precision", o.precision, "Bits for irrational input");
  best->add_option("--norm", o.norm, "sup or euclid")->capture_default_str();

  auto* dens = app.add_subcommand("density", "Empirical invariant density");
  add_common(dens);
  add_alg(dens);
  add_seed(dens);
  dens->add_option("-n,--n", o.n, "Steps per orbit (default 100000)");
  dens->add_option("--trials", o.trials, "Orbits")->capture_default_str();
  dens->add_option("--bins", o.bins, "Bins per axis")->capture_default_str();
  dens->add_option("--burn-in", o.burn_in, "Discarded initial steps")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  }

  try {
    // stats treats -o as a directory
    if (*stats) return cmd_stats(o, out);
    Output dest(o.out, out);
    std::ostream& os = dest.stream();
    if (*expand) return cmd_expand(o, os);
    if (*lyap) return cmd_lyapunov(o, os);
    if (*lll) return cmd_lll(o, os);
    if (*mv) return cmd_markov_verify(o, os, err);
    if (*render) return cmd_render(o, os, err);
    if (*theta) return cmd_theta(o, os);
    if (*best) return cmd_best(o, os);
    if (*dens) return cmd_density(o, os);
  } catch (const BudgetError& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kBudgetExceeded;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kDomainError;
  } catch (const PreconditionError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kDomainError;
  } catch (const ConsistencyError& e) {
    err << "internal check failed: " << e.what() << '\n';
    return kVerificationFailed;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  }
  return kDomainError;
}

}  // namespace mdcf::cli
