// Command-line front end: designs, tensors, solvers and theorem reports.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "bibd/analysis.hpp"
#include "bibd/design.hpp"
#include "bibd/spectra.hpp"
#include "bibd/sstensor.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string design;
  std::string which;
  std::string out;
  std::string format = "human";
  std::string config;
  std::string method = "all";
  double tol = 0.0;  // 0 means per-solver default
  int max_iter = 0;
  int restarts = 32;
  std::uint64_t seed = 0;
  std::optional<double> shift;
  int grid = 6;
  std::int64_t budget = 1'000'000;
  int v = 0, k = 0, lambda = 0;
};

bool machine(const RunConfig& cfg) { return cfg.format == "machine"; }

// Applies `key=value` lines for every option not given on the command line.
void apply_config_file(const RunConfig& given, RunConfig& cfg, CLI::App& app) {
  if (given.config.empty()) return;
  std::ifstream in(given.config);
  if (!in) throw UsageError("cannot open config file " + given.config);
  std::string line;
  int line_no = 0;
  auto unset = [&app](const std::string& flag) {
    for (auto* sub : app.get_subcommands()) {
      try {
        if (sub->get_option(flag)->count() > 0) return false;
      } catch (const CLI::OptionNotFound&) {
      }
    }
    try {
      return app.get_option(flag)->count() == 0;
    } catch (const CLI::OptionNotFound&) {
      return true;
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(given.config + ":" + std::to_string(line_no) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    try {
      if (key == "tol") {
        if (unset("--tol")) cfg.tol = std::stod(value);
      } else if (key == "max_iter") {
        if (unset("--max-iter")) cfg.max_iter = std::stoi(value);
      } else if (key == "restarts") {
        if (unset("--restarts")) cfg.restarts = std::stoi(value);
      } else if (key == "seed") {
        if (unset("--seed")) cfg.seed = std::stoull(value);
      } else if (key == "shift") {
        if (unset("--shift")) cfg.shift = std::stod(value);
      } else if (key == "grid") {
        if (unset("--grid")) cfg.grid = std::stoi(value);
      } else {
        throw UsageError(given.config + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw UsageError(given.config + ":" + std::to_string(line_no) + ": bad value for " + key);
    }
  }
}

bool is_catalog_name(const std::string& name) {
  for (const auto& n : bibd::catalog_names())
    if (n == name) return true;
  return false;
}

bibd::RawDesign load_raw(const std::string& arg) {
  if (is_catalog_name(arg)) return bibd::catalog(arg).to_raw();
  std::ifstream probe(arg);
  if (!probe) throw UsageError("'" + arg + "' is neither a catalog name nor a readable file");
  return bibd::read_design_file(arg);
}

std::string violations_text(const bibd::ValidationReport& report, bool machine_format) {
  std::ostringstream out;
  if (machine_format) {
    out << "valid=" << (report.valid() ? "true" : "false") << " violations=" << report.violations.size() << '\n';
    for (const auto& v : report.violations) out << "violation=" << bibd::to_string(v.kind) << " witness=" << v.witness << '\n';
  } else {
    out << (report.valid() ? "valid BIBD" : "NOT a valid BIBD") << '\n';
    for (const auto& v : report.violations) out << "  " << bibd::to_string(v.kind) << ": " << v.witness << '\n';
  }
  return out.str();
}

// Loads and validates; prints the violations and returns nullopt for an invalid design.
std::optional<bibd::Design> load_design(const RunConfig& cfg, std::string& err) {
  auto raw = load_raw(cfg.design);
  const auto report = bibd::validate(raw);
  if (!report.valid()) {
    err = violations_text(report, machine(cfg));
    return std::nullopt;
  }
  return bibd::Design::from_raw(std::move(raw));
}

bibd::SymTensor pick_tensor(const bibd::Design& d, const std::string& which) {
  if (which == "A") return bibd::adjacency_tensor(d);
  if (which == "D") return bibd::degree_tensor(d);
  if (which == "C") return bibd::codegree_tensor(d);
  if (which == "P") return bibd::characterization_tensor(d);
  if (which == "Q") return bibd::signless_characterization_tensor(d);
  if (which == "L") return bibd::laplacian_tensors(d).first;
  if (which == "Lq") return bibd::laplacian_tensors(d).second;
  throw UsageError("unknown tensor '" + which + "' (expected A, D, C, P, Q, L or Lq)");
}

std::string vec_text(const std::vector<double>& x) {
  std::string s;
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? "," : "") + bibd::format_number(x[i]);
  return s;
}

std::string pair_line(const std::string& method, const bibd::EigenPair& pair, std::uint64_t seed) {
  return "method=" + method + " kind=" + std::string(bibd::to_string(pair.kind)) +
         " value=" + bibd::format_number(pair.value) + " residual=" + bibd::format_number(pair.residual) +
         " iterations=" + std::to_string(pair.iterations) + " converged=" + (pair.converged ? "true" : "false") +
         " vector=" + vec_text(pair.vector) + " seed=" + std::to_string(seed) + '\n';
}

int cmd_catalog(const RunConfig& cfg, std::string& out) {
  for (const auto& name : bibd::catalog_names()) {
    const auto& p = bibd::catalog(name).params();
    if (machine(cfg)) {
      out += "name=" + name + " v=" + std::to_string(p.v) + " k=" + std::to_string(p.k) +
             " lambda=" + std::to_string(p.lambda) + " r=" + std::to_string(p.r) + " b=" + std::to_string(p.b) + '\n';
    } else {
      char buf[128];
      std::snprintf(buf, sizeof buf, "%-24s v=%d k=%d lambda=%d r=%d b=%d\n", name.c_str(), p.v, p.k, p.lambda, p.r,
                    p.b);
      out += buf;
    }
  }
  return kExitOk;
}

int cmd_validate(const RunConfig& cfg, std::string& out) {
  const auto report = bibd::validate(load_raw(cfg.design));
  out += violations_text(report, machine(cfg));
  return report.valid() ? kExitOk : kExitFailed;
}

int cmd_generate(const RunConfig& cfg, std::string& out, std::string& err) {
  const auto params = bibd::derive_parameters(cfg.v, cfg.k, cfg.lambda);
  const auto result = bibd::generate(params, cfg.budget, cfg.seed);
  const char* status = result.status == bibd::SearchStatus::Found             ? "found"
                       : result.status == bibd::SearchStatus::BudgetExhausted ? "budget-exhausted"
                                                                              : "space-exhausted";
  err += std::string("status=") + status + " nodes=" + std::to_string(result.nodes) +
         " budget=" + std::to_string(cfg.budget) + " seed=" + std::to_string(cfg.seed) + '\n';
  if (result.status != bibd::SearchStatus::Found) return kExitFailed;
  const auto design = bibd::Design::from_raw({params.v, params.k, params.lambda, result.blocks});
  out += bibd::serialize_design(design);
  return kExitOk;
}

int cmd_tensors(const RunConfig& cfg, std::string& out, std::string& err) {
  const auto d = load_design(cfg, err);
  if (!d) return kExitFailed;
  out += bibd::dump_tensor(pick_tensor(*d, cfg.which));
  return kExitOk;
}

int cmd_spectra(const RunConfig& cfg, std::string& out, std::string& err) {
  const auto d = load_design(cfg, err);
  if (!d) return kExitFailed;
  const auto t = pick_tensor(*d, cfg.which);
  const bool all = cfg.method == "all";
  auto wants = [&](const char* m) { return all || cfg.method == m; };
  bool any = false;

  if (wants("gershgorin")) {
    any = true;
    const auto g = bibd::gershgorin(t);
    for (std::size_t i = 0; i < g.rows.size(); ++i) {
      out += "method=gershgorin row=" + std::to_string(i) + " center=" + bibd::format_number(g.rows[i].center) +
             " radius=" + bibd::format_number(g.rows[i].radius) + '\n';
    }
    out += "method=gershgorin lower=" + bibd::format_number(g.lower) + " upper=" + bibd::format_number(g.upper) + '\n';
  }
  if (wants("nqz")) {
    any = true;
    bibd::NqzOptions o;
    if (cfg.tol > 0) o.tol = cfg.tol;
    if (cfg.max_iter > 0) o.max_iter = cfg.max_iter;
    try {
      const auto r = bibd::nqz_largest_h(t, o);
      out += pair_line("nqz", r.pair, cfg.seed);
      out += "method=nqz lower=" + bibd::format_number(r.lower) + " upper=" + bibd::format_number(r.upper) +
             " shift=" + bibd::format_number(r.shift) + '\n';
    } catch (const bibd::SpectraError& e) {
      out += std::string("method=nqz status=no-h-eigenpair-found reason=") +
             (e.kind() == bibd::SpectraError::Kind::NotNonnegative ? "not-nonnegative" : "zero-iterate") + '\n';
    }
  }
  if (wants("sshopm")) {
    any = true;
    bibd::SshopmOptions o;
    o.shift = cfg.shift;
    if (cfg.tol > 0) o.tol = cfg.tol;
    if (cfg.max_iter > 0) o.max_iter = cfg.max_iter;
    for (bool maximize : {true, false}) {
      o.maximize = maximize;
      for (int i = 0; i < cfg.restarts; ++i) {
        o.start = bibd::restart_start(bibd::Constraint::TwoNormSphere, t.order(), t.dim(), cfg.seed, i);
        out += pair_line(maximize ? "sshopm-max" : "sshopm-min", bibd::sshopm_z(t, o), cfg.seed);
      }
    }
  }
  if (wants("jacobi") && (cfg.method == "jacobi" || t.order() == 2)) {
    any = true;
    const auto m = bibd::matrix_eigen_oracle(t);
    for (std::size_t i = 0; i < m.values.size(); ++i) {
      out += "method=jacobi value=" + bibd::format_number(m.values[i]) + " vector=" + vec_text(m.vectors[i]) + '\n';
    }
  }
  if (cfg.method == "tiny") {
    any = true;
    const auto s = bibd::tiny_h_spectrum(t);
    for (const auto& pair : s.pairs) out += pair_line("tiny", pair, cfg.seed);
    out += std::string("method=tiny degenerate=") + (s.degenerate ? "true" : "false") + '\n';
  }
  if (!any) throw UsageError("unknown method '" + cfg.method + "'");
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::string& out, std::string& err) {
  const auto d = load_design(cfg, err);
  if (!d) return kExitFailed;
  bibd::AnalysisOptions o;
  o.seed = cfg.seed;
  o.restarts = cfg.restarts;
  o.grid = cfg.grid;
  o.shift = cfg.shift;
  if (cfg.max_iter > 0) o.max_iter = cfg.max_iter;
  if (cfg.tol > 0) o.stationarity_tol = cfg.tol;
  const auto report = bibd::verify_theorem(*d, o, is_catalog_name(cfg.design) ? cfg.design : std::string());
  out += machine(cfg) ? bibd::to_machine(report) : bibd::to_text(report);
  for (const auto& f : report.findings) err += "FINDING: " + f + '\n';
  return report.ok() ? kExitOk : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Characterization tensors of balanced incomplete block designs"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;

  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"human", "machine"}));
  app.add_option("--config", cfg.config, "File of key=value solver options");
  app.add_option("--out,-o", cfg.out, "Write the result to this file instead of stdout");

  auto* catalog = app.add_subcommand("catalog", "List built-in designs");

  auto* validate = app.add_subcommand("validate", "Check a .bibd file or catalog design");
  validate->add_option("design", cfg.design, "Catalog name or .bibd path")->required();

  auto* generate = app.add_subcommand("generate", "Search for a design by backtracking");
  generate->add_option("--v", cfg.v, "Point count")->required();
  generate->add_option("--k", cfg.k, "Block size")->required();
  generate->add_option("--lambda", cfg.lambda, "Pair coverage")->required();
  generate->add_option("--budget", cfg.budget, "Node-expansion limit");
  generate->add_option("--seed", cfg.seed, "Candidate-order seed");

  auto* tensors = app.add_subcommand("tensors", "Dump a design tensor");
  tensors->add_option("design", cfg.design, "Catalog name or .bibd path")->required();
  tensors->add_option("which", cfg.which, "A, D, C, P, Q, L or Lq")->required();

  auto* spectra = app.add_subcommand("spectra", "Run eigenvalue solvers on a design tensor");
  spectra->add_option("design", cfg.design, "Catalog name or .bibd path")->required();
  spectra->add_option("which", cfg.which, "A, D, C, P, Q, L or Lq")->required();
  spectra->add_option("--method", cfg.method, "all, nqz, sshopm, gershgorin, jacobi or tiny");

  auto* verify = app.add_subcommand("verify", "Check every clause of the spectral theorem");
  verify->add_option("design", cfg.design, "Catalog name or .bibd path")->required();
  verify->add_option("--grid", cfg.grid, "Simplex grid granularity");

  for (auto* sub : {spectra, verify}) {
    sub->add_option("--tol", cfg.tol, "Solver tolerance");
    sub->add_option("--max-iter", cfg.max_iter, "Iteration cap");
    sub->add_option("--restarts", cfg.restarts, "Multistart count");
    sub->add_option("--seed", cfg.seed, "Random seed");
    sub->add_option("--shift", cfg.shift, "Power-method shift");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  std::string out, err;
  int code = kExitOk;
  try {
    const RunConfig given = cfg;
    apply_config_file(given, cfg, app);
    if (catalog->parsed()) code = cmd_catalog(cfg, out);
    if (validate->parsed()) code = cmd_validate(cfg, out);
    if (generate->parsed()) code = cmd_generate(cfg, out, err);
    if (tensors->parsed()) code = cmd_tensors(cfg, out, err);
    if (spectra->parsed()) code = cmd_spectra(cfg, out, err);
    if (verify->parsed()) code = cmd_verify(cfg, out, err);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const bibd::DesignError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == bibd::DesignError::Kind::UnknownName ? kExitUsage : kExitFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailed;
  }

  if (!err.empty()) std::cerr << err;
  if (cfg.out.empty()) {
    std::cout << out;
  } else {
    std::ofstream file(cfg.out);
    if (!file) {
      std::cerr << "error: cannot write " << cfg.out << '\n';
      return kExitFailed;
    }
    file << out;
  }
  return code;
}
