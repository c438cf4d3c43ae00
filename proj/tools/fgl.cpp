#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <locale>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "fgl/acceptance.hpp"
#include "fgl/dynamics.hpp"
#include "fgl/errors.hpp"
#include "fgl/greens.hpp"

using json = nlohmann::json;
using namespace fgl;

namespace {

struct RunConfig {
  std::string spec_path;
  int N = 100;
  int nodes_per_band = 1024;
  std::string format = "csv";
  std::string output;
  std::uint64_t seed = 20241;
  std::vector<std::string> tol_args;
  std::map<std::string, double> tol;
};

using Cell = std::variant<double, long, std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

std::string format_double(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << v;
  return os.str();
}

std::string to_csv(const Table& t) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  for (size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
  os << '\n';
  for (const auto& r : t.rows) {
    for (size_t i = 0; i < r.size(); ++i) {
      if (i) os << ',';
      if (auto d = std::get_if<double>(&r[i])) os << format_double(*d);
      else if (auto l = std::get_if<long>(&r[i])) os << *l;
      else os << std::get<std::string>(r[i]);
    }
    os << '\n';
  }
  return os.str();
}

json to_json(const Table& t) {
  json arr = json::array();
  for (const auto& r : t.rows) {
    json o;
    for (size_t i = 0; i < r.size(); ++i)
      std::visit([&](const auto& v) { o[t.header[i]] = v; }, r[i]);
    arr.push_back(o);
  }
  return arr;
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.output);
  if (!f) throw InputError("cannot open output file " + cfg.output);
  f << text;
}

void emit_table(const RunConfig& cfg, const Table& t) {
  emit(cfg, cfg.format == "csv" ? to_csv(t) : to_json(t).dump(2) + "\n");
}

struct Report {
  Table table{{"criterion", "value", "tolerance", "pass"}, {}};
  bool ok = true;
  void add(const std::string& name, double value, double tol) {
    const bool pass = std::isfinite(value) && value <= tol;
    ok = ok && pass;
    table.rows.push_back({name, value, tol, std::string(pass ? "true" : "false")});
  }
};

int emit_report(const RunConfig& cfg, const Report& rep) {
  if (cfg.format == "csv") {
    emit(cfg, to_csv(rep.table));
  } else {
    json arr = json::array();
    for (const auto& r : rep.table.rows)
      arr.push_back({{"criterion", std::get<std::string>(r[0])},
                     {"value", std::get<double>(r[1])},
                     {"tolerance", std::get<double>(r[2])},
                     {"pass", std::get<std::string>(r[3]) == "true"}});
    emit(cfg, arr.dump(2) + "\n");
  }
  return rep.ok ? 0 : 1;
}

// Tolerance lookup; --tol names must belong to the subcommand's set.
class Tolerances {
 public:
  Tolerances(const RunConfig& cfg, std::map<std::string, double> defaults) : t_(std::move(defaults)) {
    for (const auto& [k, v] : cfg.tol) {
      if (!t_.count(k)) throw InputError("unknown tolerance name '" + k + "'");
      t_[k] = v;
    }
  }
  double operator[](const std::string& k) const { return t_.at(k); }

 private:
  std::map<std::string, double> t_;
};

struct Loaded {
  IntervalSystem sys;
  EquilibriumData eq;
  MeasureSpec spec;
  BranchSeries bs;
};

Loaded load_spec(const RunConfig& cfg) {
  if (cfg.spec_path.empty()) throw InputError("--spec is required");
  std::ifstream f(cfg.spec_path);
  if (!f) throw InputError("cannot read spec file " + cfg.spec_path);
  json j;
  try {
    j = json::parse(f);
    const auto ends = j.at("endpoints").get<std::vector<double>>();
    IntervalSystem sys = build_system(ends);
    EquilibriumData eq = equilibrium(sys, 64);
    MeasureSpec spec = make_equilibrium_spec(sys, eq);
    if (j.contains("weight")) {
      const auto& w = j.at("weight");
      const std::string kind = w.at("kind").get<std::string>();
      if (kind == "poly_times_equilibrium") {
        spec = make_poly_spec(sys, eq, Poly(w.at("coeffs").get<std::vector<double>>()));
      } else if (kind == "isospectral") {
        GapDivisor div;
        for (const auto& p : w.at("divisor")) div.push_back({p.at("y").get<double>(), p.at("delta").get<int>()});
        spec = make_isospectral(sys, eq, div);
      } else if (kind != "equilibrium") {
        throw InputError("unknown weight kind '" + kind + "'");
      }
    }
    if (j.contains("point_masses"))
      for (const auto& p : j.at("point_masses"))
        spec = with_point_mass(spec, p.at("position").get<double>(), p.at("mass").get<double>());
    validate(spec);
    return {sys, eq, spec, branch_series(sys, 32)};
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed measure spec: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Input) throw;
    throw InputError(std::string("invalid measure spec: ") + e.what());
  }
}

// Table depth N plus a margin for windows that look a few rows ahead.
OrthoModel load_model(const RunConfig& cfg, const Loaded& L, int margin = 4) {
  return build_model(discretize(L.spec, cfg.nodes_per_band), cfg.N + margin);
}

void require_gaps(const Loaded& L) {
  if (L.sys.gaps() < 1) throw InputError("this subcommand needs at least two bands");
}

GapDivisor random_divisor(const IntervalSystem& sys, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GapDivisor d;
  for (int j = 0; j < sys.gaps(); ++j)
    d.push_back({sys.gap_lo(j) + (0.001 + 0.998 * u(rng)) * (sys.gap_hi(j) - sys.gap_lo(j)), u(rng) < 0.5 ? -1 : 1});
  return d;
}

std::vector<std::string> divisor_header(int g, const std::string& first) {
  std::vector<std::string> h{first};
  for (int j = 1; j <= g; ++j) h.push_back("y_" + std::to_string(j));
  for (int j = 1; j <= g; ++j) h.push_back("delta_" + std::to_string(j));
  for (int j = 1; j <= g; ++j) h.push_back("theta_" + std::to_string(j));
  return h;
}

std::vector<Cell> divisor_row(long idx, const GapDivisor& d, const std::vector<double>& theta) {
  std::vector<Cell> r{idx};
  for (const auto& p : d) r.push_back(p.y);
  for (const auto& p : d) r.push_back(static_cast<long>(p.delta));
  for (double t : theta) r.push_back(t);
  return r;
}

int cmd_equilibrium(const RunConfig& cfg) {
  const Loaded L = load_spec(cfg);
  Table t{{"quantity", "index", "value"}, {}};
  t.rows.push_back({std::string("capacity"), 0L, L.eq.capacity});
  for (size_t i = 0; i < L.eq.c.size(); ++i) t.rows.push_back({std::string("c"), static_cast<long>(i + 1), L.eq.c[i]});
  for (size_t i = 0; i < L.eq.omega_inf.size(); ++i)
    t.rows.push_back({std::string("omega_inf"), static_cast<long>(i + 1), L.eq.omega_inf[i]});
  for (int i = 0; i <= L.eq.r.degree(); ++i) t.rows.push_back({std::string("r_coeff"), static_cast<long>(i), L.eq.r.coeff(i)});
  emit_table(cfg, t);
  return 0;
}

int cmd_riemann(const RunConfig& cfg) {
  const Loaded L = load_spec(cfg);
  require_gaps(L);
  const RiemannData rd = riemann_data(L.sys);
  Table t{{"matrix", "row", "col", "value"}, {}};
  for (int i = 0; i < rd.e.rows(); ++i)
    for (int k = 0; k < rd.e.cols(); ++k) t.rows.push_back({std::string("e"), long(i + 1), long(k), rd.e(i, k)});
  for (int i = 0; i < rd.B.rows(); ++i)
    for (int k = 0; k < rd.B.cols(); ++k) t.rows.push_back({std::string("B"), long(i + 1), long(k + 1), rd.B(i, k)});
  emit_table(cfg, t);
  return 0;
}

int cmd_recurrence(const RunConfig& cfg) {
  const Loaded L = load_spec(cfg);
  const RecurrenceTable rt = recurrence(discretize(L.spec, cfg.nodes_per_band), cfg.N);
  Table t{{"n", "alpha", "lambda"}, {}};
  for (int n = 1; n <= cfg.N; ++n) t.rows.push_back({long(n), rt.a(n), rt.l(n)});
  emit_table(cfg, t);
  return 0;
}

int cmd_moments(const RunConfig& cfg) {
  const Loaded L = load_spec(cfg);
  const OrthoModel m = load_model(cfg, L);
  const int mp = std::max(1, L.sys.l);
  Table t{{"n"}, {}};
  for (int j = 1; j <= mp; ++j) t.header.push_back("mu_" + std::to_string(j));
  for (int j = 1; j <= mp; ++j) t.header.push_back("nu_" + std::to_string(j));
  for (int n = 0; n < cfg.N; ++n) {
    const MomentWindow mw = moment_window(m, n, mp);
    std::vector<Cell> r{long(n)};
    for (int j = 1; j <= mp; ++j) r.push_back(mw.mu[j]);
    for (int j = 1; j <= mp; ++j) r.push_back(mw.nu[j]);
    t.rows.push_back(r);
  }
  emit_table(cfg, t);
  return 0;
}

int cmd_divisor_track(const RunConfig& cfg) {
  const Loaded L = load_spec(cfg);
  require_gaps(L);
  const OrthoModel m = load_model(cfg, L);
  Table t{divisor_header(L.sys.gaps(), "n"), {}};
  for (int n = 0; n < cfg.N; ++n) {
    // Early levels may be too far from the torus for a pair: leave their cells empty.
    try {
      const GapDivisor d = measured_divisors(m, L.sys, L.bs, n, n).front();
      t.rows.push_back(divisor_row(n, d, theta_of(L.eq, L.sys, d)));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Input) throw;
      std::vector<Cell> r{long(n)};
      r.resize(1 + 3 * L.sys.gaps(), std::string(""));
      t.rows.push_back(r);
    }
  }
  emit_table(cfg, t);
  return 0;
}

int cmd_pell_verify(const RunConfig& cfg) {
  const Loaded L = load_spec(cfg);
  require_gaps(L);
  const Tolerances tol(cfg, {{"pell", 1e-10}, {"green", 1e-7}});
  std::mt19937_64 rng(cfg.seed);
  double ident = 0.0, prod = 0.0;
  for (int t = 0; t < 100; ++t) {
    const PellPair pp = divisor_to_pair(L.sys, L.bs, random_divisor(L.sys, rng));
    const PellReport r = pell_certificate(L.sys, L.eq, pp.G, pp.F, pp.G_next, pp.L, pp.L / 4.0);
    ident = std::max({ident, r.pell, pp.remainder});
    prod = std::max(prod, std::isnan(r.green) ? INFINITY : r.green);
  }
  Report rep;
  rep.add("pell_identity", ident, tol["pell"]);
  rep.add("pell_green_product", prod, tol["green"]);
  return emit_report(cfg, rep);
}

int cmd_rotation_verify(const RunConfig& cfg) {
  const Loaded L = load_spec(cfg);
  require_gaps(L);
  const Tolerances tol(cfg, {{"exact", 1e-7}, {"measured", 5e-3}, {"from", 50.0}});
  const RiemannData rd = riemann_data(L.sys);
  std::mt19937_64 rng(cfg.seed);
  const Orbit o = torus_orbit(L.sys, L.eq, rd, L.bs, random_divisor(L.sys, rng), 200);
  double exact = 0.0;
  for (double r : rotation_residuals(o.track, L.eq.omega_inf)) exact = std::max(exact, r);
  const OrthoModel m = load_model(cfg, L);
  const int from = static_cast<int>(tol["from"]);
  if (from >= cfg.N - 1) throw InputError("rotation-verify: --n must exceed the starting level");
  const ThetaTrack tr = theta_sequence(L.eq, L.sys, measured_divisors(m, L.sys, L.bs, from, cfg.N - 1), from);
  double measured = 0.0;
  for (double r : rotation_residuals(tr, L.eq.omega_inf)) measured = std::max(measured, r);
  Report rep;
  rep.add("exact_orbit_rotation", exact, tol["exact"]);
  rep.add("measured_rotation_n>=" + std::to_string(from), measured, tol["measured"]);
  return emit_report(cfg, rep);
}

int cmd_orbit(const RunConfig& cfg) {
  const Loaded L = load_spec(cfg);
  require_gaps(L);
  const RiemannData rd = riemann_data(L.sys);
  std::mt19937_64 rng(cfg.seed);
  const GapDivisor d0 = L.spec.kind == WeightKind::Isospectral ? L.spec.divisor : random_divisor(L.sys, rng);
  const Orbit o = torus_orbit(L.sys, L.eq, rd, L.bs, d0, cfg.N);
  Table t{divisor_header(L.sys.gaps(), "k"), {}};
  t.header.push_back("L");
  for (size_t k = 0; k < o.divisors.size(); ++k) {
    auto r = divisor_row(long(k), o.divisors[k], o.track.theta[k]);
    r.push_back(k < o.L.size() ? Cell(o.L[k]) : Cell(std::string("")));
    t.rows.push_back(r);
  }
  emit_table(cfg, t);
  return 0;
}

int cmd_zeros(const RunConfig& cfg) {
  const Loaded L = load_spec(cfg);
  require_gaps(L);
  const OrthoModel m = load_model(cfg, L);
  Table t{{"n", "gap", "family", "position"}, {}};
  for (int n = 0; n < cfg.N; ++n) {
    const GapZeros z = gap_zeros(m, L.sys, n);
    for (int j = 0; j < L.sys.gaps(); ++j) {
      for (double v : z.p[j]) t.rows.push_back({long(n), long(j + 1), std::string("P"), v});
      for (double v : z.q[j]) t.rows.push_back({long(n), long(j + 1), std::string("Q"), v});
    }
  }
  emit_table(cfg, t);
  return 0;
}

int cmd_tau_roundtrip(const RunConfig& cfg) {
  const Loaded L = load_spec(cfg);
  require_gaps(L);
  const Tolerances tol(cfg, {{"tau", 1e-8}});
  std::mt19937_64 rng(cfg.seed);
  double worst = 0.0;
  long sign_errors = 0;
  for (int t = 0; t < 200; ++t) {
    const GapDivisor d = random_divisor(L.sys, rng);
    const auto mom = tau(L.sys, L.bs, d);
    const GapDivisor back = tau_inverse(L.sys, L.bs, mom);
    for (size_t j = 0; j < d.size(); ++j) {
      worst = std::max(worst, std::abs(back[j].y - d[j].y));
      sign_errors += back[j].delta != d[j].delta;
    }
  }
  Report rep;
  rep.add("tau_roundtrip", worst, tol["tau"]);
  rep.add("tau_roundtrip_sign_errors", double(sign_errors), 0.0);
  return emit_report(cfg, rep);
}

int cmd_imap_roundtrip(const RunConfig& cfg) {
  const Loaded L = load_spec(cfg);
  const Tolerances tol(cfg, {{"roundtrip", 1e-10}, {"moments", 1e-8}});
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> ux(-1.0, 1.0), uy(0.05, 1.0);
  double rt_err = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int m = 1 + t % 5;
    std::vector<double> x(m), y(m);
    for (auto& v : x) v = ux(rng);
    for (auto& v : y) v = uy(rng);
    const Window back = imap_inverse(imap(make_window(x, y)));
    for (int i = 0; i < m; ++i) rt_err = std::max({rt_err, std::abs(back.x[i] - x[i]), std::abs(back.y[i] - y[i])});
  }
  const OrthoModel model = load_model(cfg, L);
  double mom = 0.0;
  for (int n = 10; n + 6 < cfg.N; n += 10)
    for (int mm = 1; mm <= 3; ++mm) {
      const auto tup = imap(window_from_table(model.rt, n, mm));
      const MomentWindow mw = moment_window(model, n, mm);
      for (int j = 1; j <= mm; ++j)
        mom = std::max({mom, std::abs(tup[2 * (j - 1)] - mw.mu[j]), std::abs(tup[2 * (j - 1) + 1] - mw.nu[j])});
    }
  Report rep;
  rep.add("imap_roundtrip", rt_err, tol["roundtrip"]);
  rep.add("imap_vs_moments", mom, tol["moments"]);
  return emit_report(cfg, rep);
}

int cmd_suite(RunConfig cfg) {
  if (!cfg.spec_path.empty()) load_spec(cfg);  // validated; the criteria use fixed systems
  if (!cfg.tol.empty()) throw InputError("suite: tolerances are fixed");
  AcceptanceOptions opt;
  opt.seed = cfg.seed;
  Report rep;
  for (const auto& r : run_acceptance(opt))
    for (const auto& c : r.checks) rep.add(std::to_string(r.id) + ":" + c.name, c.value, c.tolerance);
  return emit_report(cfg, rep);
}

}  // namespace

int main(int argc, char** argv) {
  std::locale::global(std::locale::classic());
  RunConfig cfg;
  CLI::App app{"Finite-gap orthogonal polynomial toolkit"};
  app.require_subcommand(1);
  const std::vector<std::pair<std::string, std::string>> cmds{
      {"equilibrium", "equilibrium data of the band set"},
      {"riemann", "differential coefficients and period matrix"},
      {"recurrence", "recurrence coefficients n,alpha,lambda"},
      {"moments", "Green's function moment windows"},
      {"divisor-track", "divisors and torus coordinates from moments"},
      {"pell-verify", "Pell identity and multiplier checks"},
      {"rotation-verify", "rotation law for exact and measured tracks"},
      {"orbit", "exact torus orbit of the shift"},
      {"zeros", "gap zeros of P_n and Q_n"},
      {"tau-roundtrip", "moment map roundtrip on random divisors"},
      {"imap-roundtrip", "window map roundtrip and moment agreement"},
      {"suite", "all acceptance criteria"}};
  for (const auto& [name, desc] : cmds) {
    CLI::App* sc = app.add_subcommand(name, desc);
    sc->add_option("--spec", cfg.spec_path, "measure spec JSON");
    sc->add_option("--n", cfg.N, "recurrence depth / orbit length")->check(CLI::Range(4, 1000000));
    sc->add_option("--nodes-per-band", cfg.nodes_per_band, "quadrature nodes per band")->check(CLI::PositiveNumber);
    sc->add_option("--out", cfg.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    sc->add_option("--output", cfg.output, "output path (default stdout)");
    sc->add_option("--seed", cfg.seed, "seed for randomized checks");
    sc->add_option("--tol", cfg.tol_args, "tolerance override NAME=VALUE");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  if (cmd == "suite" && app.get_subcommands().front()->count("--out") == 0) cfg.format = "json";
  try {
    for (const auto& a : cfg.tol_args) {
      const auto eq = a.find('=');
      if (eq == std::string::npos) throw InputError("--tol expects NAME=VALUE");
      std::istringstream is(a.substr(eq + 1));
      is.imbue(std::locale::classic());
      double v;
      if (!(is >> v) || !is.eof()) throw InputError("--tol value is not a number: " + a);
      cfg.tol[a.substr(0, eq)] = v;
    }
    const bool verifies = cmd.find("verify") != std::string::npos || cmd.find("roundtrip") != std::string::npos;
    if (!cfg.tol.empty() && !verifies && cmd != "suite") throw InputError(cmd + " takes no tolerances");
    if (cmd == "equilibrium") return cmd_equilibrium(cfg);
    if (cmd == "riemann") return cmd_riemann(cfg);
    if (cmd == "recurrence") return cmd_recurrence(cfg);
    if (cmd == "moments") return cmd_moments(cfg);
    if (cmd == "divisor-track") return cmd_divisor_track(cfg);
    if (cmd == "pell-verify") return cmd_pell_verify(cfg);
    if (cmd == "rotation-verify") return cmd_rotation_verify(cfg);
    if (cmd == "orbit") return cmd_orbit(cfg);
    if (cmd == "zeros") return cmd_zeros(cfg);
    if (cmd == "tau-roundtrip") return cmd_tau_roundtrip(cfg);
    if (cmd == "imap-roundtrip") return cmd_imap_roundtrip(cfg);
    return cmd_suite(cfg);
  } catch (const Error& e) {
    std::cerr << "fgl: " << e.what() << '\n';
    return e.kind() == ErrorKind::Input ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "fgl: " << e.what() << '\n';
    return 1;
  }
}
