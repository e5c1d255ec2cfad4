#include "cli.hpp"

#include "epsrb/basis_archive.hpp"
#include "epsrb/elliptic.hpp"
#include "epsrb/elliptic_config.hpp"
#include "epsrb/error.hpp"
#include "epsrb/greedy.hpp"
#include "epsrb/hash.hpp"
#include "epsrb/tychonoff.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

namespace epsrb::cli {

namespace fs = std::filesystem;
using elliptic::EllipticConfig;
using elliptic::EllipticFamily;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

struct Options {
  std::string config;
  std::string out = ".";
  std::vector<std::string> nus;
  std::optional<double> eps;
  std::optional<double> delta;
  std::optional<unsigned> workers;
  std::optional<std::uint64_t> seed;
  std::string basis;
};

// Exit with a given code after printing a diagnostic.
struct Abort {
  int code;
};

Parameter parse_nu(const std::string& text) {
  Parameter nu;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    double x = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), x);
    if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size()) {
      throw CLI::ValidationError("--nu", "'" + text + "' is not a comma-separated list of numbers");
    }
    nu.push_back(x);
    pos = comma + 1;
  }
  return nu;
}

std::string join(const Parameter& nu) {
  std::string s;
  for (std::size_t i = 0; i < nu.size(); ++i) s += (i ? "," : "") + format_double(nu[i]);
  return s;
}

std::string nu_header(std::size_t dim, const std::string& prefix) {
  std::string s;
  for (std::size_t j = 0; j < dim; ++j) s += (j ? "," : "") + prefix + std::to_string(j + 1);
  return s;
}

class Context {
 public:
  Context(const Options& opt, std::ostream& out, std::ostream& err) : opt_(opt), out_(out), err_(err) {
    try {
      config_ = elliptic::load_elliptic_config(opt.config);
    } catch (const Error& e) {
      err_ << "epsrb: " << e.what() << '\n';
      throw Abort{kUsage};
    }
    if (opt.seed) config_.validation.seed = *opt.seed;
    if (opt.delta) {
      if (!(*opt.delta >= 0.0)) {
        err_ << "epsrb: --delta must be non-negative\n";
        throw Abort{kUsage};
      }
      config_.offline.delta = *opt.delta;
    }
    if (opt.workers) {
      config_.workers = *opt.workers;
    } else if (std::getenv("EPSRB_WORKERS") != nullptr) {
      config_.workers = 0;  // resolve_workers reads the variable
    }
  }

  const EllipticConfig& config() const { return config_; }
  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }

  const EllipticFamily& family() {
    if (!family_) family_.emplace(config_.spec);
    return *family_;
  }

  std::vector<Parameter> validation_samples() const {
    std::mt19937_64 rng(config_.validation.seed);
    return config_.spec.box.sample(rng, config_.validation.samples);
  }

  fs::path output_dir() const {
    const fs::path dir(opt_.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, "cannot create output directory " + dir.string());
    return dir;
  }

  // Checked up front so long runs do not fail at the very end.
  fs::path writable(const std::string& name) const {
    const fs::path p = output_dir() / name;
    std::ofstream probe(p, std::ios::app);
    if (!probe) throw Error(ErrorCode::Io, "cannot write " + p.string());
    return p;
  }

  GreedyOptions greedy_options() const {
    GreedyOptions g;
    g.workers = config_.workers;
    g.linear = elliptic::solver_options(config_).linear;
    return g;
  }

 private:
  const Options& opt_;
  std::ostream& out_;
  std::ostream& err_;
  EllipticConfig config_;
  std::optional<EllipticFamily> family_;
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  if (!f) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

// ---------------------------------------------------------------- validate

int cmd_validate(Context& ctx, bool to_file) {
  const EllipticConfig& cfg = ctx.config();
  std::ostringstream r;
  std::vector<std::string> failures;
  const auto check = [&](const std::string& name, bool ok, const std::string& detail) {
    r << "check " << name << " = " << (ok ? "pass" : "FAIL") << '\n';
    if (!ok) failures.push_back(name + " violated: " + detail);
  };

  std::vector<Parameter> samples = cfg.spec.box.corners();
  samples.push_back(cfg.spec.box.center());
  for (auto& nu : ctx.validation_samples()) samples.push_back(std::move(nu));

  r << "n = " << cfg.spec.n << '\n';
  r << "eps = " << format_double(cfg.spec.eps) << '\n';
  r << "alpha = " << format_double(cfg.spec.coefficient.alpha()) << '\n';
  r << "samples = " << samples.size() << '\n';

  elliptic::Audit a;
  try {
    a = elliptic::audit(ctx.family(), samples);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::CoercivityViolation) throw;
    r << "check A1 = FAIL\nstatus = violated\n";
    ctx.out() << r.str();
    ctx.err() << "epsrb: A1 violated: " << e.what() << '\n';
    return kViolation;
  }
  r << "a_min = " << format_double(a.a_min) << '\n';
  r << "a_max = " << format_double(a.a_max) << '\n';
  r << "coercivity_margin = " << format_double(a.coercivity_margin) << '\n';
  r << "f_minus = " << format_double(a.f_min) << '\n';
  r << "L_plus = " << format_double(a.lambda_max) << '\n';
  r << "c_estimate = " << format_double(a.gram_lower) << '\n';
  r << "graph_lower = " << format_double(a.graph_lower) << '\n';
  r << "graph_upper = " << format_double(a.graph_upper) << '\n';

  check("A1", a.coercive, "coefficient drops below alpha = " + format_double(a.alpha));
  check("A2", a.gram_lower > 0.0, "Gram operator not bounded below (c = " + format_double(a.gram_lower) + ")");
  check("A3", a.targets_feasible,
        "min ||f_nu|| = " + format_double(a.f_min) + " <= eps = " + format_double(cfg.spec.eps));
  check("H3", a.graph_lower > 0.0 && std::isfinite(a.graph_upper), "graph-norm equivalence constants degenerate");

  if (a.targets_feasible) {
    const auto iv_samples = cfg.spec.box.tensor_grid(
        std::vector<std::size_t>(cfg.spec.box.dim(), cfg.offline.interval_points));
    const EtaInterval iv = estimate_eta_interval(ctx.family().problem_family(), iv_samples,
                                                 cfg.offline.safety_factor, elliptic::solver_options(cfg));
    const ContainmentAudit c = audit_eta_interval(iv, ctx.family().problem_family(), samples,
                                                  elliptic::solver_options(cfg));
    r << "eta_minus = " << format_double(iv.eta_minus) << '\n';
    r << "eta_plus = " << format_double(iv.eta_plus) << '\n';
    r << "eta_star_min = " << format_double(c.eta_star_min) << '\n';
    r << "eta_star_max = " << format_double(c.eta_star_max) << '\n';
    check("eta_interval", c.ok(), std::to_string(c.violations.size()) + " parameters with eta* outside");
  }
  r << "status = " << (failures.empty() ? "ok" : "violated") << '\n';

  ctx.out() << r.str();
  if (to_file) write_file(ctx.output_dir() / "validate.txt", r.str());
  for (const auto& f : failures) ctx.err() << "epsrb: " << f << '\n';
  return failures.empty() ? kOk : kViolation;
}

// ---------------------------------------------------------------- solve

int cmd_solve(Context& ctx, const Options& opt, bool to_file) {
  if (opt.nus.size() != 1) {
    ctx.err() << "epsrb: solve needs exactly one --nu\n";
    return kUsage;
  }
  const Parameter nu = parse_nu(opt.nus.front());
  const EllipticConfig& cfg = ctx.config();
  if (nu.size() != cfg.spec.box.dim() || !cfg.spec.box.contains(nu)) {
    ctx.err() << "epsrb: nu = " << to_string(nu) << " is outside the parameter box\n";
    return kViolation;
  }
  if (opt.eps && !(*opt.eps > 0.0)) {
    ctx.err() << "epsrb: --eps must be positive\n";
    return kUsage;
  }
  const double eps = opt.eps.value_or(cfg.spec.eps);
  const EllipticFamily& fam = ctx.family();
  const EpsSolution s = fam.solve_eps(nu, elliptic::solver_options(cfg), eps);

  std::ostringstream r;
  r << "nu = " << join(nu) << '\n';
  r << "eps = " << format_double(eps) << '\n';
  r << "zero_solution = " << (s.zero_solution ? "true" : "false") << '\n';
  r << "u_norm_x = " << format_double(fam.spaces().x.norm(s.u_tilde)) << '\n';
  r << "v_norm_y = " << format_double(s.s) << '\n';
  r << "misfit = " << format_double(s.misfit) << '\n';
  r << "misfit_rel_gap = " << format_double(std::abs(s.misfit - eps) / eps) << '\n';
  r << "eta_star = " << format_double(s.eta_star) << '\n';
  r << "iterations = " << s.iterations << '\n';
  r << "converged = " << (s.converged ? "true" : "false") << '\n';
  r << "condition_bound = " << format_double(s.condition_bound) << '\n';
  ctx.out() << r.str();

  if (to_file) {
    const fs::path dir = ctx.output_dir();
    write_file(dir / "solve.txt", r.str());
    std::ostringstream csv;
    csv << "i,x,u,v\n";
    for (Index i = 0; i < s.u_tilde.size(); ++i) {
      csv << i << ',' << format_double((i + 1) * fam.h()) << ',' << format_double(s.u_tilde(i)) << ','
          << format_double(s.v_tilde(i)) << '\n';
    }
    write_file(dir / "solution.csv", csv.str());
  }
  if (!s.converged) {
    ctx.err() << "epsrb: scalar root search did not converge after " << s.iterations << " evaluations\n";
    return kFailure;
  }
  return kOk;
}

// ---------------------------------------------------------------- offline

nlohmann::json training_metadata(const EllipticConfig& cfg, const EtaInterval& iv, const TrainingGrid& grid) {
  return {{"nu_counts", cfg.offline.nu_counts},
          {"etas", grid.etas},
          {"eta_minus", iv.eta_minus},
          {"eta_plus", iv.eta_plus},
          {"v_minus", iv.v_minus},
          {"v_plus", iv.v_plus},
          {"safety_factor", cfg.offline.safety_factor},
          {"eta_spacing", cfg.offline.eta_spacing == EtaSpacing::Log ? "log" : "uniform"}};
}

int cmd_offline(Context& ctx) {
  const EllipticConfig& cfg = ctx.config();
  const fs::path archive = ctx.writable("basis.epsrb");
  const fs::path decay = ctx.writable("decay.csv");
  const fs::path summary = ctx.writable("offline.txt");
  const ProblemFamily& family = ctx.family().problem_family();

  const auto iv_samples =
      cfg.spec.box.tensor_grid(std::vector<std::size_t>(cfg.spec.box.dim(), cfg.offline.interval_points));
  EtaInterval iv;
  try {
    iv = estimate_eta_interval(family, iv_samples, cfg.offline.safety_factor, elliptic::solver_options(cfg));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InfeasibleFamily) throw;
    ctx.err() << "epsrb: A3 violated: " << e.what() << '\n';
    return kViolation;
  }
  const TrainingGrid grid =
      TrainingGrid::tensor(cfg.spec.box, cfg.offline.nu_counts, iv, cfg.offline.eta_count, cfg.offline.eta_spacing);
  const ReducedBasis basis = train_offline(family, grid, cfg.offline.delta, ctx.greedy_options());

  save_basis(archive, basis, family, training_metadata(cfg, iv, grid).dump());

  std::ostringstream csv;
  csv << "iteration," << nu_header(cfg.spec.box.dim(), "selected_nu") << ",selected_eta,max_surrogate\n";
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const SelectedPair& s = basis.selected[k];
    csv << k + 1 << ',' << join(s.nu) << ',' << format_double(s.eta) << ',' << format_double(basis.history[k + 1])
        << '\n';
  }
  write_file(decay, csv.str());

  std::ostringstream r;
  r << "grid_points = " << grid.size() << '\n';
  r << "eta_minus = " << format_double(iv.eta_minus) << '\n';
  r << "eta_plus = " << format_double(iv.eta_plus) << '\n';
  r << "delta = " << format_double(basis.delta) << '\n';
  r << "initial_max_surrogate = " << format_double(basis.history.front()) << '\n';
  r << "final_max_surrogate = " << format_double(basis.history.back()) << '\n';
  r << "m = " << basis.size() << '\n';
  r << "stop_reason = " << to_string(basis.stop_reason) << '\n';
  r << "converged = " << (basis.converged() ? "true" : "false") << '\n';
  ctx.out() << r.str();
  write_file(summary, r.str());

  if (!basis.converged()) {
    ctx.err() << "epsrb: warning: greedy " << to_string(basis.stop_reason) << " at max surrogate "
              << format_double(basis.history.back()) << " > delta " << format_double(basis.delta)
              << "; partial basis of size " << basis.size() << " written to " << archive.string() << '\n';
    return kFailure;
  }
  return kOk;
}

// ---------------------------------------------------------------- online / report

LoadedBasis load_archive(Context& ctx, const Options& opt) {
  const fs::path path = opt.basis.empty() ? fs::path(opt.out) / "basis.epsrb" : fs::path(opt.basis);
  try {
    return load_basis(path, ctx.family().problem_family());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::HashMismatch) {
      ctx.err() << "epsrb: stale basis: " << e.what() << '\n';
      throw Abort{kViolation};
    }
    throw;
  }
}

int cmd_online(Context& ctx, const Options& opt, bool nu_given) {
  const EllipticConfig& cfg = ctx.config();
  const fs::path csv_path = ctx.writable("online.csv");
  const LoadedBasis loaded = load_archive(ctx, opt);

  std::vector<Parameter> nus;
  if (nu_given) {
    for (const auto& s : opt.nus) {
      if (!s.empty()) nus.push_back(parse_nu(s));
    }
  } else {
    nus = ctx.validation_samples();
  }
  for (const auto& nu : nus) {
    if (nu.size() != cfg.spec.box.dim() || !cfg.spec.box.contains(nu)) {
      ctx.err() << "epsrb: nu = " << to_string(nu) << " is outside the parameter box\n";
      return kViolation;
    }
  }

  const double limit = cfg.spec.eps * (1.0 + cfg.tolerances.online);
  std::ostringstream csv;
  csv << nu_header(cfg.spec.box.dim(), "nu") << ",misfit,m,alphas_hash\n";
  std::vector<Parameter> violators;
  double worst = 0.0;
  for (const auto& nu : nus) {
    const OnlineResult res = reconstruct_online(loaded.basis, ctx.family().problem_family(), nu);
    const std::span<const double> alphas(res.alphas.data(), static_cast<std::size_t>(res.alphas.size()));
    csv << join(nu) << ',' << format_double(res.misfit) << ',' << res.m << ','
        << to_hex(Fnv1a().values(alphas).digest()) << '\n';
    worst = std::max(worst, res.misfit);
    if (!(res.misfit <= limit)) violators.push_back(nu);
  }
  write_file(csv_path, csv.str());

  ctx.out() << "queries = " << nus.size() << '\n'
            << "m = " << loaded.basis.size() << '\n'
            << "max_misfit = " << format_double(worst) << '\n'
            << "misfit_limit = " << format_double(limit) << '\n'
            << "violations = " << violators.size() << '\n';
  if (!violators.empty()) {
    for (const auto& nu : violators) ctx.err() << "epsrb: misfit above limit at nu = " << join(nu) << '\n';
    return kFailure;
  }
  return kOk;
}

int cmd_report(Context& ctx, const Options& opt) {
  const EllipticConfig& cfg = ctx.config();
  const fs::path csv_path = ctx.writable("report.csv");
  const LoadedBasis loaded = load_archive(ctx, opt);

  TrainingGrid grid;
  try {
    const auto meta = nlohmann::json::parse(loaded.training_json);
    grid.nus = cfg.spec.box.tensor_grid(meta.at("nu_counts").get<std::vector<std::size_t>>());
    grid.etas = meta.at("etas").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigParse, std::string("archive training metadata: ") + e.what());
  }
  const auto rows = surrogate_report(loaded.basis, grid, ctx.family().problem_family(), ctx.greedy_options());

  std::ostringstream csv;
  csv << nu_header(cfg.spec.box.dim(), "nu") << ",eta,surrogate,true_error,lower,upper,effectivity,in_bracket\n";
  std::size_t outside = 0;
  for (const auto& row : rows) {
    // lower * err <= surrogate <= upper * err, with slack for rounding near zero error
    const double slack = 1e-12 * (row.upper + 1.0);
    const bool in = row.surrogate >= row.lower * row.true_error - slack &&
                    row.surrogate <= row.upper * row.true_error + slack;
    outside += in ? 0 : 1;
    csv << join(row.nu) << ',' << format_double(row.eta) << ',' << format_double(row.surrogate) << ','
        << format_double(row.true_error) << ',' << format_double(row.lower) << ',' << format_double(row.upper)
        << ',' << format_double(row.effectivity()) << ',' << (in ? 1 : 0) << '\n';
  }
  write_file(csv_path, csv.str());
  ctx.out() << "rows = " << rows.size() << '\n' << "outside_bracket = " << outside << '\n';
  return kOk;
}

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config, "Family configuration (JSON)")->required();
  cmd->add_option("--out", opt.out, "Output directory");
  cmd->add_option("--seed", opt.seed, "Seed for the validation sample");
  cmd->add_option("--workers", opt.workers, "Worker threads (default: $EPSRB_WORKERS, else all cores)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimal-norm eps-solutions and reduced bases for parametric elliptic problems", "epsrb"};
  app.require_subcommand(1);
  Options opt;

  auto* validate = app.add_subcommand("validate", "Check the family assumptions numerically");
  auto* solve = app.add_subcommand("solve", "Minimal-norm eps-solution at one parameter");
  auto* offline = app.add_subcommand("offline", "Greedy training of the reduced basis");
  auto* online = app.add_subcommand("online", "Reduced reconstruction at query parameters");
  auto* report = app.add_subcommand("report", "Surrogate vs true error over the training grid");
  for (auto* cmd : {validate, solve, offline, online, report}) add_common(cmd, opt);
  solve->add_option("--nu", opt.nus, "Parameter v1,v2,...")->expected(1);
  solve->add_option("--eps", opt.eps, "Override the tolerance eps");
  offline->add_option("--delta", opt.delta, "Greedy stopping tolerance");
  online->add_option("--nu", opt.nus, "Query parameter v1,v2,... (repeatable; default: validation sample)")
      ->allow_extra_args(false);
  for (auto* cmd : {online, report}) cmd->add_option("--basis", opt.basis, "Basis archive (default: OUT/basis.epsrb)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "epsrb: " << e.what() << '\n';
    return kUsage;
  }

  try {
    Context ctx(opt, out, err);
    const bool out_given = app.get_subcommands().front()->count("--out") > 0;
    if (*validate) return cmd_validate(ctx, out_given);
    if (*solve) return cmd_solve(ctx, opt, out_given);
    if (*offline) return cmd_offline(ctx);
    if (*online) return cmd_online(ctx, opt, online->count("--nu") > 0);
    return cmd_report(ctx, opt);
  } catch (const Abort& a) {
    return a.code;
  } catch (const CLI::ValidationError& e) {
    err << "epsrb: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "epsrb: " << e.what() << '\n';
    if (e.code() == ErrorCode::OutOfDomain || e.code() == ErrorCode::CoercivityViolation) return kViolation;
    if (e.code() == ErrorCode::ConfigParse) return kUsage;
    return kFailure;
  }
}

}  // namespace epsrb::cli
