#include "dce_sphere/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "dce_sphere/bessel.hpp"
#include "dce_sphere/coupling.hpp"
#include "dce_sphere/dynamics.hpp"
#include "dce_sphere/error.hpp"
#include "dce_sphere/log.hpp"
#include "dce_sphere/modes.hpp"
#include "dce_sphere/spectrum.hpp"

namespace dce::cli {

using json = nlohmann::ordered_json;
using std::numbers::pi;

namespace {

// Config files: JSON (a whole previous output, whose "run" object is used,
// or a bare object) or flat "key = value" lines.
class RunFileConfig : public CLI::ConfigBase {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::string text((std::istreambuf_iterator<char>(input)), std::istreambuf_iterator<char>());
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos || text[first] != '{') {
      std::istringstream flat(text);
      return CLI::ConfigBase::from_config(flat);
    }
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw CLI::ConversionError(std::string("config file: ") + e.what());
    }
    if (doc.contains("run")) doc = doc["run"];
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : doc.items()) {
      CLI::ConfigItem item;
      item.name = key;
      auto add = [&](const json& v) {
        item.inputs.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      };
      if (value.is_null()) continue;
      if (value.is_array()) {
        for (const auto& v : value) add(v);
      } else {
        add(value);
      }
      items.push_back(std::move(item));
    }
    return items;
  }
};

std::string fmt12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double round12(double v) { return std::stod(fmt12(v)); }

// Runs task(i) for i < n on up to `workers` threads. The first exception
// thrown by the lowest index is rethrown once all threads are joined.
void parallel_for(int n, int workers, const std::function<void(int)>& task) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  auto loop = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(workers, 1, std::max(1, n));
  std::vector<std::thread> pool;
  for (int k = 1; k < threads; ++k) pool.emplace_back(loop);
  loop();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct Record {
  std::string config;
  int l = 0, s = 0, s_prime = 0;  // s_prime = 0: not applicable
  double x = 0, y = 0;
};

json run_object(const RunConfig& rc) {
  json run;
  run["command"] = rc.command;
  if (rc.bc) run["bc"] = *rc.bc;
  if (rc.moving) run["moving"] = *rc.moving;
  run["ri"] = rc.r_inner;
  run["ro"] = rc.r_outer;
  if (rc.l) run["l"] = *rc.l;
  if (rc.s) run["s"] = *rc.s;
  if (rc.l_max) run["lmax"] = *rc.l_max;
  if (rc.s_max) run["smax"] = *rc.s_max;
  if (rc.command == "map") run["grid"] = rc.grid;
  if (rc.command == "particles") {
    run["method"] = rc.method;
    if (!rc.trajectory.empty()) {
      run["trajectory"] = rc.trajectory;
    } else {
      run["eps"] = rc.epsilon;
      if (rc.varpi) run["varpi"] = *rc.varpi;
      if (rc.duration) run["duration"] = *rc.duration;
    }
    if (rc.tol) run["tol"] = *rc.tol;
  }
  run["format"] = rc.format;
  return run;
}

std::string write_records(const RunConfig& rc, const std::vector<Record>& records) {
  std::ostringstream os;
  if (rc.format == "csv") {
    os << "config,l,s,s_prime,x,y\n";
    for (const auto& r : records) {
      os << r.config << ',' << r.l << ',' << r.s << ',';
      if (r.s_prime > 0) os << r.s_prime;
      os << ',' << fmt12(r.x) << ',' << fmt12(r.y) << '\n';
    }
    return os.str();
  }
  json doc;
  doc["run"] = run_object(rc);
  json rows = json::array();
  for (const auto& r : records) {
    json row;
    row["config"] = r.config;
    row["l"] = r.l;
    row["s"] = r.s;
    row["s_prime"] = r.s_prime > 0 ? json(r.s_prime) : json(nullptr);
    row["x"] = round12(r.x);
    row["y"] = round12(r.y);
    rows.push_back(std::move(row));
  }
  doc["records"] = std::move(rows);
  return doc.dump(2) + "\n";
}

CavityGeometry geometry_of(const RunConfig& rc) {
  CavityGeometry g{rc.r_inner, rc.r_outer};
  g.validate();
  return g;
}

int clamp_index(int v, const char* name, int lo, int hi) {
  if (v < lo || v > hi) {
    std::ostringstream os;
    os << name << " must lie in [" << lo << ", " << hi << "] (got " << v << ")";
    throw DomainError(os.str());
  }
  return v;
}

std::string cmd_map(RunConfig& rc) {
  const BoundaryConfig config = resolve_config(rc.bc.value_or("dd"), rc.moving);
  if (!rc.s_max && !rc.s) rc.s_max = 3;
  if (!rc.s && *rc.s_max < 1) throw DomainError("empty s range: --smax must be >= 1");
  if (!rc.l_max) rc.l_max = 7;
  clamp_index(*rc.l_max, "--lmax", 0, kDefaultBesselLmax);
  std::vector<double> grid = parse_grid(rc.grid);
  std::sort(grid.begin(), grid.end());

  std::vector<int> ls, ss;
  if (rc.l) {
    ls.push_back(clamp_index(*rc.l, "--l", 0, kDefaultBesselLmax));
  } else {
    for (int l = 0; l <= *rc.l_max; ++l) ls.push_back(l);
  }
  if (rc.s) {
    ss.push_back(clamp_index(*rc.s, "--s", 1, 1000));
  } else {
    for (int s = 1; s <= *rc.s_max; ++s) ss.push_back(s);
  }

  struct Task {
    int l, s;
    double x;
  };
  std::vector<Task> tasks;
  for (int l : ls)
    for (int s : ss)
      for (double x : grid) tasks.push_back({l, s, x});

  std::vector<MapPoint> points(tasks.size());
  parallel_for(static_cast<int>(tasks.size()), rc.workers, [&](int i) {
    points[i] = frequency_map_point(config, tasks[i].l, tasks[i].s, tasks[i].x);
  });

  std::vector<Record> records;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!points[i].ok || !std::isfinite(points[i].y)) continue;
    records.push_back({config.tag(), tasks[i].l, tasks[i].s, 0, points[i].x, points[i].y});
  }
  if (records.empty()) throw NumericalFailure("every map point failed");
  return write_records(rc, records);
}

std::vector<BoundaryConfig> resonance_series(const RunConfig& rc) {
  if (rc.bc) return {resolve_config(*rc.bc, rc.moving)};
  if (rc.moving) throw DomainError("--moving needs --bc");
  return {BoundaryConfig::dirichlet(Shell::Outer), BoundaryConfig::dirichlet(Shell::Inner),
          BoundaryConfig::neumann_inner(), BoundaryConfig::neumann_outer()};
}

std::string cmd_resonance(RunConfig& rc) {
  const CavityGeometry geom = geometry_of(rc);
  if (!rc.s_max) rc.s_max = 4;
  if (*rc.s_max < 1) throw DomainError("--smax must be >= 1");
  const int l = clamp_index(rc.l.value_or(0), "--l", 0, kDefaultBesselLmax);
  const int s = clamp_index(rc.s.value_or(1), "--s", 1, 1000);
  const auto series = resonance_series(rc);
  const int size = std::max(s, *rc.s_max);
  const double d = geom.width();

  std::vector<std::vector<Record>> per_series(series.size());
  parallel_for(static_cast<int>(series.size()), rc.workers, [&](int k) {
    const CouplingMatrix c = coupling_matrix(series[k], l, size, geom);
    for (int sp = 1; sp <= *rc.s_max; ++sp) {
      const double varpi = c.omega(s - 1) + c.omega(sp - 1);
      // N / (eps varpi T)^2 at exact resonance.
      const double cs = c.symmetric(s, sp);
      per_series[k].push_back({series[k].legend(), l, s, sp, varpi * d / pi, cs * cs / 4});
    }
  });
  std::vector<Record> records;
  for (auto& v : per_series) records.insert(records.end(), v.begin(), v.end());
  return write_records(rc, records);
}

SampledTrajectory read_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open trajectory file " + path);
  SampledTrajectory traj;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double t, r, v;
    if (!(fields >> t >> r >> v)) {
      if (traj.t.empty() && lineno == 1) continue;  // header
      throw DomainError("trajectory line " + std::to_string(lineno) + " is not t,r,rdot");
    }
    traj.t.push_back(t);
    traj.r.push_back(r);
    traj.rdot.push_back(v);
  }
  if (traj.t.size() < 2) throw DomainError("trajectory needs at least two samples");
  return traj;
}

std::string cmd_particles(RunConfig& rc) {
  const BoundaryConfig config = resolve_config(rc.bc.value_or("dd"), rc.moving);
  const CavityGeometry geom = geometry_of(rc);
  if (rc.format != "json") throw DomainError("particles writes a single JSON record; use --format json");
  if (rc.method != "perturbative" && rc.method != "general") {
    throw DomainError("--method must be perturbative or general");
  }
  if (!rc.trajectory.empty()) rc.method = "general";
  if (!rc.s_max) rc.s_max = kDefaultCouplingSmax;
  const int s_hi = clamp_index(rc.s.value_or(1), "--s", 1, 1000);
  if (*rc.s_max < s_hi) throw DomainError("--smax must be >= --s");
  if (!rc.l && !rc.l_max) rc.l_max = 0;
  const int l_lo = clamp_index(rc.l.value_or(0), "--l", 0, kDefaultBesselLmax);
  const int l_top = rc.l ? l_lo : clamp_index(*rc.l_max, "--lmax", 0, kDefaultBesselLmax);

  std::optional<MotionProfile> motion;
  SinusoidalMotion sine;
  if (!rc.trajectory.empty()) {
    motion.emplace(read_trajectory(rc.trajectory));
  } else {
    if (!rc.varpi) {
      rc.varpi = 2 * solve_frequency(config, 0, 1, geom).omega;
    }
    if (!(*rc.varpi > 0)) throw DomainError("--varpi must be positive");
    if (!rc.duration) rc.duration = 50.0 / *rc.varpi;
    if (!(*rc.duration > 0)) throw DomainError("--duration must be positive");
    sine = {rc.epsilon, *rc.varpi, *rc.duration, geom.radius(config.moving)};
    motion.emplace(sine);
  }
  motion->validate(config, geom);

  struct Key {
    int l, s;
  };
  std::vector<Key> keys;
  for (int l = l_lo; l <= l_top; ++l)
    for (int s = 1; s <= s_hi; ++s) keys.push_back({l, s});

  std::vector<ParticleEstimate> est(keys.size());
  parallel_for(static_cast<int>(keys.size()), rc.workers, [&](int i) {
    const auto [l, s] = keys[i];
    if (rc.method == "perturbative") {
      est[i] = particles_sinusoidal(config, l, s, sine, geom, *rc.s_max,
                                    rc.tol.value_or(kDefaultTailTolerance));
    } else {
      GeneralOptions opt;
      if (rc.tol) opt.resolution_tol = *rc.tol;
      est[i] = particles_general(config, l, s, *motion, geom, *rc.s_max, opt);
    }
  });

  ParticleSpectrum spectrum{config, geom, rc.method, {}};
  json modes = json::array();
  for (std::size_t i = 0; i < keys.size(); ++i) {
    spectrum.values[{keys[i].l, keys[i].s}] = est[i];
    json m;
    m["l"] = keys[i].l;
    m["s"] = keys[i].s;
    m["N"] = round12(est[i].value);
    m["N_total"] = round12(spectrum.multiplicity_total(keys[i].l, keys[i].s));
    m["error_estimate"] = round12(est[i].error_estimate);
    m["s_max"] = est[i].s_max;
    if (rc.method == "general") m["time_nodes"] = est[i].time_nodes;
    modes.push_back(std::move(m));
  }
  json doc;
  doc["run"] = run_object(rc);
  doc["config"] = config.legend();
  doc["method"] = rc.method;
  doc["modes"] = std::move(modes);
  doc["total"] = round12(spectrum.total());
  return doc.dump(2) + "\n";
}

std::string cmd_selftest(const RunConfig& rc, bool& all_ok) {
  std::ostringstream os;
  all_ok = true;
  auto check = [&](const std::string& name, const std::function<double()>& residual,
                   double tol) {
    bool ok = false;
    std::string detail;
    try {
      const double r = residual();
      ok = r <= tol;
      detail = "residual " + fmt12(r) + " tol " + fmt12(tol);
    } catch (const std::exception& e) {
      detail = e.what();
    }
    all_ok = all_ok && ok;
    os << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
  };
  const CavityGeometry geom = geometry_of(rc);
  const BoundaryConfig dd = BoundaryConfig::dirichlet(Shell::Outer);
  const std::vector<BoundaryConfig> families = {dd, BoundaryConfig::neumann_inner(),
                                                BoundaryConfig::neumann_outer()};

  check("bessel wronskian", [] {
    double worst = 0;
    for (int l = 0; l <= 10; ++l)
      for (double x : {0.3, 1.7, 8.0, 25.0}) {
        const auto b = spherical_bessel(l, x);
        worst = std::max(worst, std::abs((b.j * b.np - b.jp * b.n) * x * x - 1));
      }
    return worst;
  }, 1e-12);
  check("DD l=0 equally spaced roots", [&] {
    const auto f = solve_frequencies(dd, 0, 10, geom);
    double worst = 0;
    for (const auto& m : f) {
      const double exact = m.s * pi / geom.width();
      worst = std::max(worst, std::abs(m.omega - exact) / exact);
    }
    return worst;
  }, 1e-10);
  check("orthonormality", [&] {
    double worst = 0;
    for (const auto& c : families)
      for (int l = 0; l <= 2; ++l) {
        const ModeSet set = build_mode_set(c, l, 5, geom);
        const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(5, 5);
        worst = std::max(worst, (set.gram - id).cwiseAbs().maxCoeff());
      }
    return worst;
  }, 1e-8);
  check("frequency derivative vs finite difference", [&] {
    double worst = 0;
    for (const auto& c : families)
      for (int l : {0, 3}) {
        const double rb = geom.radius(c.moving);
        const double h = 1e-6 * rb;
        const auto up = solve_frequency(c, l, 2, geom.with_radius(c.moving, rb + h));
        const auto dn = solve_frequency(c, l, 2, geom.with_radius(c.moving, rb - h));
        const double fd = (up.omega - dn.omega) / (2 * h);
        const double an = domega_dr_beta(c, l, 2, geom);
        worst = std::max(worst, std::abs(fd - an) / std::abs(an));
      }
    return worst;
  }, 1e-5);
  check("DD l=0 diagonal coupling", [&] {
    const CouplingMatrix c = coupling_matrix(dd, 0, 3, geom);
    const double expect = -geom.r_outer / (2 * geom.width());
    double worst = 0;
    for (int s = 1; s <= 3; ++s) worst = std::max(worst, std::abs(c.at(s, s) - expect));
    return worst;
  }, 1e-8);
  check("detuning response at resonance", [] {
    return std::abs(detuning_response(3.0, 3.0, 7 * pi / 3.0).value - 1.0);
  }, 1e-12);
  check("first mixed resonance below DD", [&] {
    const double w_dd = solve_frequency(dd, 0, 1, geom).omega;
    double worst = 0;
    for (const auto& c : {families[1], families[2]}) {
      worst = std::max(worst, solve_frequency(c, 0, 1, geom).omega / w_dd);
    }
    return worst;
  }, 1.0 - 1e-12);
  return os.str();
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw DomainError("--grid expects a:b:step, got '" + spec + "'");
    }
  }
  if (parts.size() != 3) throw DomainError("--grid expects a:b:step, got '" + spec + "'");
  const double a = parts[0], b = parts[1], step = parts[2];
  if (!(step > 0) || !(b >= a) || !std::isfinite(b)) {
    throw DomainError("--grid needs step > 0 and b >= a");
  }
  const long n = static_cast<long>(std::floor((b - a) / step + 1e-9));
  if (n > 1000000) throw DomainError("--grid has too many points");
  std::vector<double> out;
  for (long k = 0; k <= n; ++k) out.push_back(a + k * step);
  return out;
}

BoundaryConfig resolve_config(const std::string& bc, const std::optional<std::string>& moving) {
  std::optional<Shell> shell;
  if (moving) {
    if (*moving == "inner") shell = Shell::Inner;
    else if (*moving == "outer") shell = Shell::Outer;
    else throw DomainError("--moving must be inner or outer");
  }
  BoundaryConfig c;
  if (bc == "dd") {
    c = BoundaryConfig::dirichlet(shell.value_or(Shell::Outer));
  } else if (bc == "nd") {
    c = BoundaryConfig::neumann_inner();
  } else if (bc == "dn") {
    c = BoundaryConfig::neumann_outer();
  } else {
    throw DomainError("--bc must be dd, nd or dn");
  }
  if (shell && *shell != c.moving) {
    c.moving = *shell;
    c.validate();  // throws with the moving-Neumann restriction
  }
  return c;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig rc;
  CLI::App app{"Dynamical Casimir effect between concentric spherical shells", "dce_sphere"};
  app.config_formatter(std::make_shared<RunFileConfig>());
  app.set_config("--config", "", "Flat key = value file or a previous JSON output; flags win");
  app.add_option("command", rc.command, "map | resonance | particles | selftest")
      ->required()
      ->check(CLI::IsMember({"map", "resonance", "particles", "selftest"}));
  app.add_option("--bc", rc.bc, "Boundary conditions, inner letter first: dd | nd | dn");
  app.add_option("--moving", rc.moving, "Moving shell: inner | outer");
  app.add_option("--ri", rc.r_inner, "Inner radius")->capture_default_str();
  app.add_option("--ro", rc.r_outer, "Outer radius")->capture_default_str();
  app.add_option("--l", rc.l, "Single angular index");
  app.add_option("--s", rc.s, "Radial index (map: single curve; resonance/particles: mode s)");
  app.add_option("--lmax", rc.l_max, "Largest angular index (map, particles)");
  app.add_option("--smax", rc.s_max, "Largest radial index / s' truncation");
  app.add_option("--eps", rc.epsilon, "Relative oscillation amplitude")->capture_default_str();
  app.add_option("--varpi", rc.varpi, "Drive frequency");
  app.add_option("--duration", rc.duration, "Drive duration T");
  app.add_option("--grid", rc.grid, "Map abscissae omega r_i / pi as a:b:step")
      ->capture_default_str();
  app.add_option("--format", rc.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--out", rc.out, "Output file (default stdout)");
  app.add_option("--tol", rc.tol, "Particles: truncation or time-resolution tolerance");
  app.add_option("--method", rc.method, "Particles: perturbative | general")
      ->capture_default_str();
  app.add_option("--trajectory", rc.trajectory, "Particles: CSV of t,r,rdot samples");
  app.add_option("--workers", rc.workers, "Worker threads")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  }
  if (rc.command == "particles" && rc.format == "csv" &&
      app.get_option("--format")->count() == 0) {
    rc.format = "json";
  }

  std::string payload;
  int code = kOk;
  try {
    if (rc.command == "map") {
      payload = cmd_map(rc);
    } else if (rc.command == "resonance") {
      payload = cmd_resonance(rc);
    } else if (rc.command == "particles") {
      payload = cmd_particles(rc);
    } else {
      bool ok = true;
      payload = cmd_selftest(rc, ok);
      if (!ok) code = kNumericalFailure;
    }
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }

  if (rc.out.empty()) {
    out << payload;
  } else {
    std::ofstream file(rc.out, std::ios::binary);
    file << payload;
    if (!file) {
      err << "error: cannot write " << rc.out << "\n";
      return kValidationError;
    }
  }
  return code;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace dce::cli
