#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ecpm/analytic.hpp"
#include "ecpm/discrimination.hpp"
#include "ecpm/parallel.hpp"
#include "ecpm/scenario.hpp"
#include "ecpm/seesaw.hpp"

namespace ecpm::cli {

using json = nlohmann::json;

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_numerical = 2;

/// Sandwich gap above which padv escalates to Lasserre order 3.
inline constexpr double escalation_gap = 1e-3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Rows of one command; cells are numbers, strings, null or nested JSON.
struct Table {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
};

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::strtod(format_number(v).c_str(), nullptr);
}

inline std::string status_name(sdp::SolveStatus s) {
  return s == sdp::SolveStatus::optimal ? "ok" : sdp::to_string(s);
}

inline std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number()) return format_number(v.get<double>());
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

inline void write_csv(const Table& t, std::ostream& os) {
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << csv_cell(row[c]);
    os << "\n";
  }
}

inline void write_json(const Table& t, std::ostream& os) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json obj = json::object();
    for (std::size_t c = 0; c < row.size(); ++c) obj[t.columns[c]] = row[c];
    rows.push_back(std::move(obj));
  }
  const json doc = {{"command", t.command}, {"columns", t.columns}, {"rows", std::move(rows)}};
  os << doc.dump(2) << "\n";
}

// ---- Kraus interchange ----

inline json kraus_to_json(const Channel& ch) {
  json ops = json::array();
  for (const auto& k : ch.kraus()) {
    json m = json::array();
    for (Index r = 0; r < k.rows(); ++r) {
      json row = json::array();
      for (Index c = 0; c < k.cols(); ++c) row.push_back({number(k(r, c).real()), number(k(r, c).imag())});
      m.push_back(std::move(row));
    }
    ops.push_back(std::move(m));
  }
  return {{"d_in", ch.d_in()}, {"d_out", ch.d_out()}, {"kraus", std::move(ops)}};
}

inline Channel kraus_from_json(const json& j) {
  const auto d_in = j.at("d_in").get<Index>();
  const auto d_out = j.at("d_out").get<Index>();
  if (d_in < 1 || d_out < 1) throw UsageError("kraus file: dimensions must be positive");
  std::vector<ComplexMatrix> ops;
  for (const auto& m : j.at("kraus")) {
    if (static_cast<Index>(m.size()) != d_out) throw UsageError("kraus file: operator must have d_out rows");
    ComplexMatrix k(d_out, d_in);
    for (Index r = 0; r < d_out; ++r) {
      const auto& row = m.at(static_cast<std::size_t>(r));
      if (static_cast<Index>(row.size()) != d_in) throw UsageError("kraus file: row must have d_in entries");
      for (Index c = 0; c < d_in; ++c) {
        const auto& z = row.at(static_cast<std::size_t>(c));
        k(r, c) = cplx(z.at(0).get<double>(), z.at(1).get<double>());
      }
    }
    ops.push_back(std::move(k));
  }
  if (ops.empty()) throw UsageError("kraus file: empty Kraus list");
  return Channel(std::move(ops));
}

// ---- argument parsing helpers ----

/// "a,b,c" or "lo:hi:n".
inline std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  auto to_double = [&text](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw UsageError("bad omega grid '" + text + "'");
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw UsageError("range grid must be lo:hi:n");
    const double lo = to_double(parts[0]), hi = to_double(parts[1]);
    const int n = static_cast<int>(to_double(parts[2]));
    if (n < 1 || static_cast<double>(n) != to_double(parts[2])) throw UsageError("range grid needs a positive count");
    for (int k = 0; k < n; ++k) out.push_back(n == 1 ? lo : lo + (hi - lo) * k / (n - 1));
    return out;
  }
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) out.push_back(to_double(p));
  if (out.empty()) throw UsageError("empty omega grid");
  return out;
}

inline std::vector<double> default_grid() { return parse_grid("0.01:0.49:50"); }

inline SubsystemShape parse_dims(const std::string& text) {
  std::vector<Index> d;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(p, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != p.size() || v < 1) throw UsageError("bad dims '" + text + "'");
    d.push_back(static_cast<Index>(v));
  }
  if (d.size() != 2) throw UsageError("dims must be dS,dM");
  return SubsystemShape{d[0], d[1]};
}

struct Options {
  std::string grid_text;
  int jobs = default_jobs();
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::string output;
  std::string dump_dir;
  std::string ec_output = "on";
  std::string dims;
  int restarts = 20;
  int max_rounds = 200;
  int order = 2;
  std::string iexp = "sep-max";
  int xstar = 0;
  std::string channel;
  std::optional<double> ec_omega;
};

inline std::vector<double> grid_of(const Options& o) { return o.grid_text.empty() ? default_grid() : parse_grid(o.grid_text); }

inline void require_range(const std::vector<double>& grid, bool allow_zero, const std::string& cmd) {
  for (double w : grid) {
    if (!(w < 0.5) || w < 0.0 || (!allow_zero && w == 0.0)) {
      throw UsageError(cmd + ": omega " + format_number(w) + " outside " + (allow_zero ? "[0, 0.5)" : "(0, 0.5)"));
    }
  }
}

inline SeesawSettings seesaw_settings(const Options& o, SubsystemShape dims, const sdp::SolverSettings& solver) {
  SeesawSettings s;
  s.restarts = o.restarts;
  s.max_rounds = o.max_rounds;
  s.seed = o.seed;
  s.dims = std::move(dims);
  s.jobs = 1;
  s.solver = solver;
  s.validate();
  return s;
}

template <class F>
std::vector<std::vector<json>> sweep(const std::vector<double>& grid, int jobs, F&& point) {
  std::vector<std::vector<json>> rows(grid.size());
  parallel_for(grid.size(), jobs, [&](std::size_t i) { rows[i] = point(grid[i]); });
  return rows;
}

// ---- commands ----

inline Table cmd_classical_bound(const Options& o) {
  const auto grid = grid_of(o);
  require_range(grid, true, "classical-bound");
  Table t{"classical-bound", {"omega", "classical_bound"}, {}};
  for (double w : grid) t.rows.push_back({number(w), number(classical_bound(w))});
  return t;
}

inline Table cmd_seesaw_icorr(const Options& o, const sdp::SolverSettings& solver) {
  const auto grid = grid_of(o);
  require_range(grid, false, "seesaw-icorr");
  const auto s = seesaw_settings(o, o.dims.empty() ? SubsystemShape{2, 2} : parse_dims(o.dims), solver);
  Table t{"seesaw-icorr", {"omega", "seesaw", "classical_bound", "analytic_family", "status"}, {}};
  t.rows = sweep(grid, o.jobs, [&](double w) -> std::vector<json> {
    const auto r = maximize_icorr(w, s);
    return {number(w), number(r.value), number(classical_bound(w)), number(icorr_family(w).value),
            status_name(r.status)};
  });
  return t;
}

inline Table cmd_analytic(const Options& o) {
  const auto grid = grid_of(o);
  require_range(grid, false, "analytic");
  Table t{"analytic", {"omega", "p_star", "a", "b", "q", "icorr", "kraus"}, {}};
  for (double w : grid) {
    const auto opt = icorr_family(w);
    const auto fp = make_family_point(w, opt.p_star);
    t.rows.push_back({number(w), number(opt.p_star), number(fp.a), number(fp.b), number(fp.q), number(opt.value),
                      kraus_to_json(fp.channel)});
  }
  return t;
}

inline Table cmd_guess_prob(const Options& o, const sdp::SolverSettings& solver) {
  const auto grid = grid_of(o);
  require_range(grid, true, "guess-prob");
  std::optional<double> fixed;
  if (o.iexp != "sep-max") {
    fixed = parse_grid(o.iexp).front();
    if (parse_grid(o.iexp).size() != 1) throw UsageError("--iexp takes sep-max or one value");
  }
  if (o.xstar != 0 && o.xstar != 1) throw UsageError("--xstar must be 0 or 1");
  const auto s = seesaw_settings(o, o.dims.empty() ? SubsystemShape{2, 3} : parse_dims(o.dims), solver);
  Table t{"guess-prob", {"omega", "i_exp", "p_guess", "h_min", "status"}, {}};
  t.rows = sweep(grid, o.jobs, [&](double w) -> std::vector<json> {
    const double target = fixed ? *fixed : classical_bound(w);
    const auto r = guessing_probability_lower(w, target, o.xstar, s);
    const double h = r.ok() ? std::max(0.0, -std::log2(r.value)) : std::nan("");
    return {number(w), number(target), r.ok() ? number(r.value) : json(nullptr), number(h), status_name(r.status)};
  });
  return t;
}

inline Table cmd_det_violation(const Options& o, const sdp::SolverSettings& solver) {
  const auto grid = grid_of(o);
  require_range(grid, true, "det-violation");
  const auto s = seesaw_settings(o, o.dims.empty() ? SubsystemShape{2, 2} : parse_dims(o.dims), solver);
  Table t{"det-violation", {"omega", "min_e1", "idet_bound", "status"}, {}};
  t.rows = sweep(grid, o.jobs, [&](double w) -> std::vector<json> {
    const auto r = minimize_E1_deterministic(w, s);
    return {number(w), number(r.value), number(idet_bound(w)), status_name(r.status)};
  });
  return t;
}

struct PadvPoint {
  double p = std::nan("");
  PadvResult upper;
  PadvResult ec_lower;
  double sandwich_gap = std::nan("");
  int order_used = 2;
};

/// Best family point for the energy-constrained ratio, with the unconstrained ratio at the same point.
inline PadvPoint padv_point(double omega, int order, bool output_constraint, const SeesawSettings& s) {
  PadvPoint pt;
  pt.p = padv_ec_best_p(omega, order, output_constraint, s.solver).p_star;
  const auto fp = make_family_point(omega, pt.p);
  pt.upper = padv_upper(fp, s);
  pt.ec_lower = padv_ec_lower(fp, order, output_constraint, s.solver);
  pt.order_used = order;
  const auto ec = EnergyConstraint::computational(2, omega);
  SeesawSettings lower_settings = s;
  lower_settings.analytic_seed = true;
  const auto lower = induced_trace_norm_lower(fp.channel, ec, lower_settings);
  if (!lower.ok()) return pt;
  pt.sandwich_gap = pt.ec_lower.itn - lower.value;
  if (order == 2 && pt.sandwich_gap > escalation_gap) {
    const auto o3 = padv_ec_lower(fp, 3, output_constraint, s.solver);
    if (o3.ok()) {
      pt.ec_lower = o3;
      pt.order_used = 3;
      pt.sandwich_gap = o3.itn - lower.value;
    }
  }
  return pt;
}

inline Table cmd_padv(const Options& o, const sdp::SolverSettings& solver) {
  const auto grid = grid_of(o);
  require_range(grid, false, "padv");
  if (o.order != 2 && o.order != 3) throw UsageError("--order must be 2 or 3");
  const bool oc = o.ec_output == "on";
  const auto s = seesaw_settings(o, SubsystemShape{2, 2}, solver);
  Table t{"padv",
          {"omega", "p", "padv_upper", "padv_ec_lower", "reference", "order", "sandwich_gap", "status"},
          {}};
  t.rows = sweep(grid, o.jobs, [&](double w) -> std::vector<json> {
    const auto pt = padv_point(w, o.order, oc, s);
    const auto status = !pt.ec_lower.ok() ? pt.ec_lower.status : pt.upper.status;
    return {number(w),
            number(pt.p),
            number(pt.upper.value),
            number(pt.ec_lower.value),
            number(0.5 + 1.0 / std::sqrt(2.0)),
            pt.order_used,
            number(pt.sandwich_gap),
            status_name(status)};
  });
  return t;
}

inline Table cmd_norms(const Options& o, const sdp::SolverSettings& solver) {
  if (o.channel.empty()) throw UsageError("norms: --channel is required");
  std::optional<FamilyPoint> fp;
  std::optional<Channel> ch;
  std::optional<double> w = o.ec_omega;
  if (o.channel.rfind("family:", 0) == 0) {
    const auto args = parse_grid(o.channel.substr(7));
    if (args.size() > 2) throw UsageError("norms: family:<omega>[,<p>]");
    require_range({args[0]}, false, "norms");
    const double p = args.size() == 2 ? args[1] : icorr_family(args[0]).p_star;
    if (p < 0.0 || p > 0.5) throw UsageError("norms: p must lie in [0, 0.5]");
    fp = make_family_point(args[0], p);
    ch = fp->channel;
    if (!w) w = args[0];
  } else if (o.channel.rfind("kraus:", 0) == 0) {
    std::ifstream is(o.channel.substr(6));
    if (!is) throw UsageError("norms: cannot read " + o.channel.substr(6));
    json j;
    try {
      is >> j;
      ch = kraus_from_json(j);
    } catch (const json::exception& e) {
      throw UsageError(std::string("norms: bad kraus file: ") + e.what());
    }
  } else {
    throw UsageError("norms: --channel must be family:<omega> or kraus:<file>");
  }
  if (ch->d_in() != ch->d_out()) throw UsageError("norms: channel must map a space to itself");
  if (w) require_range({*w}, false, "norms");
  const auto s = seesaw_settings(o, SubsystemShape{2, 2}, solver);
  const bool oc = o.ec_output == "on";

  Table t{"norms",
          {"diamond", "itn_lower", "ec_omega", "ec_diamond_lower", "ec_itn_lower", "ec_itn_upper", "status"},
          {}};
  sdp::SolveStatus status = sdp::SolveStatus::optimal;
  auto note = [&status](sdp::SolveStatus st) {
    if (status == sdp::SolveStatus::optimal) status = st;
  };
  const auto dn = diamond_distance_to_identity(*ch, solver);
  note(dn.status);
  const auto itn = induced_trace_norm_lower(*ch, std::nullopt, s);
  note(itn.status);
  json ec_dl = nullptr, ec_lo = nullptr, ec_up = nullptr;
  if (fp) ec_dl = number(diamond_norm_ec_lower(*fp));
  if (w) {
    const auto ec = EnergyConstraint::computational(ch->d_in(), *w);
    const auto lo = induced_trace_norm_lower(*ch, ec, s);
    note(lo.status);
    ec_lo = number(lo.value);
    if (ch->d_in() == 2) {
      const auto up = lasserre_itn_upper(*ch, ec, o.order, oc, solver);
      note(up.status);
      ec_up = number(up.value);
    }
  }
  t.rows.push_back({number(dn.value), number(itn.value), w ? number(*w) : json(nullptr), ec_dl, ec_lo, ec_up,
                    status_name(status)});
  return t;
}

inline bool numerical_failure(const Table& t) {
  const auto it = std::find(t.columns.begin(), t.columns.end(), "status");
  if (it == t.columns.end()) return false;
  const auto c = static_cast<std::size_t>(it - t.columns.begin());
  for (const auto& row : t.rows) {
    const auto& st = row[c];
    if (st == "numerical_trouble" || st == "unbounded") return true;
  }
  return false;
}

/// Entry point of the `ecpm` tool; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Energy-constrained prepare-and-measure bounds"};
  app.require_subcommand(1);
  Options o;

  auto common = [&o](CLI::App* c, bool seesaw) {
    c->add_option("--omega-grid,--omega", o.grid_text, "comma list or lo:hi:n (default 0.01:0.49:50)");
    c->add_option("--format", o.format)->check(CLI::IsMember({"csv", "json"}));
    c->add_option("--output,-o", o.output, "output file (default stdout)");
    if (!seesaw) return;
    c->add_option("--jobs", o.jobs)->check(CLI::PositiveNumber);
    c->add_option("--seed", o.seed);
    c->add_option("--restarts", o.restarts)->check(CLI::PositiveNumber);
    c->add_option("--max-rounds", o.max_rounds)->check(CLI::PositiveNumber);
    c->add_option("--dump-sdp", o.dump_dir, "directory for SDP dumps");
  };
  auto* classical = app.add_subcommand("classical-bound", "classical correlation bound");
  common(classical, false);
  auto* seesaw = app.add_subcommand("seesaw-icorr", "seesaw maximum of I_corr");
  common(seesaw, true);
  seesaw->add_option("--dims", o.dims, "dS,dM (default 2,2)");
  auto* analytic = app.add_subcommand("analytic", "closed-form family at its optimal p");
  common(analytic, false);
  auto* guess = app.add_subcommand("guess-prob", "adversary guessing probability lower bound");
  common(guess, true);
  guess->add_option("--iexp", o.iexp, "sep-max or a value");
  guess->add_option("--xstar", o.xstar);
  guess->add_option("--dims", o.dims, "dS,dM (default 2,3)");
  auto* det = app.add_subcommand("det-violation", "minimal E_1 under deterministic p(0|0)");
  common(det, true);
  det->add_option("--dims", o.dims, "dS,dM (default 2,2)");
  auto* padv = app.add_subcommand("padv", "entanglement advantage ratios");
  common(padv, true);
  padv->add_option("--order", o.order)->check(CLI::IsMember({2, 3}));
  padv->add_option("--ec-output-constraint", o.ec_output)->check(CLI::IsMember({"on", "off"}));
  auto* norms = app.add_subcommand("norms", "norms of a channel minus the identity");
  norms->add_option("--format", o.format)->check(CLI::IsMember({"csv", "json"}));
  norms->add_option("--output,-o", o.output);
  norms->add_option("--channel", o.channel, "family:<omega>[,<p>] or kraus:<file>")->required();
  norms->add_option("--ec-omega", o.ec_omega);
  norms->add_option("--order", o.order)->check(CLI::IsMember({2, 3}));
  norms->add_option("--ec-output-constraint", o.ec_output)->check(CLI::IsMember({"on", "off"}));
  norms->add_option("--seed", o.seed);
  norms->add_option("--restarts", o.restarts)->check(CLI::PositiveNumber);
  norms->add_option("--max-rounds", o.max_rounds)->check(CLI::PositiveNumber);
  norms->add_option("--dump-sdp", o.dump_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_usage;
  }

  Table table;
  try {
    sdp::SolverSettings solver;
    solver.backend = sdp::default_backend_name();
    sdp::make_backend(solver.backend);
    if (!o.dump_dir.empty()) {
      std::filesystem::create_directories(o.dump_dir);
      solver.dump = std::make_shared<sdp::DumpSink>(o.dump_dir);
    }
    if (*classical) table = cmd_classical_bound(o);
    else if (*seesaw) table = cmd_seesaw_icorr(o, solver);
    else if (*analytic) table = cmd_analytic(o);
    else if (*guess) table = cmd_guess_prob(o, solver);
    else if (*det) table = cmd_det_violation(o, solver);
    else if (*padv) table = cmd_padv(o, solver);
    else table = cmd_norms(o, solver);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return exit_usage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_numerical;
  }

  std::ofstream file;
  if (!o.output.empty()) {
    file.open(o.output);
    if (!file) {
      err << "error: cannot write " << o.output << "\n";
      return exit_usage;
    }
  }
  std::ostream& os = o.output.empty() ? out : file;
  if (o.format == "json") write_json(table, os);
  else write_csv(table, os);
  return numerical_failure(table) ? exit_numerical : exit_ok;
}

}  // namespace ecpm::cli
