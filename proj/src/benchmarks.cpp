#include "hyperweno/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "hyperweno/error.hpp"
#include "hyperweno/io.hpp"
#include "json.hpp"

#ifndef HYPERWENO_DEFAULT_DATA_DIR
#define HYPERWENO_DEFAULT_DATA_DIR "data"
#endif

namespace hyperweno::benchmarks {

using nlohmann::json;

std::string_view to_string(IcFamily f) noexcept {
  switch (f) {
    case IcFamily::Sine: return "sine";
    case IcFamily::TwoState: return "two_state";
    case IcFamily::Piecewise: return "piecewise";
    case IcFamily::RiemannSw: return "riemann_sw";
    case IcFamily::ShuOsher: return "shu_osher";
  }
  return "?";
}

IcFamily parse_ic_family(std::string_view name) {
  for (IcFamily f : {IcFamily::Sine, IcFamily::TwoState, IcFamily::Piecewise, IcFamily::RiemannSw,
                     IcFamily::ShuOsher}) {
    if (name == to_string(f)) return f;
  }
  throw InvalidArgument("unknown initial-condition family: " + std::string(name));
}

std::size_t family_arity(IcFamily f) noexcept {
  switch (f) {
    case IcFamily::Sine: return 2;
    case IcFamily::TwoState: return 4;
    case IcFamily::Piecewise: return 0;
    case IcFamily::RiemannSw: return 5;
    case IcFamily::ShuOsher: return 7;
  }
  return 0;
}

namespace {

physics::SystemKind family_system(IcFamily f) {
  switch (f) {
    case IcFamily::RiemannSw: return physics::SystemKind::ShallowWater;
    case IcFamily::ShuOsher: return physics::SystemKind::Euler;
    default: return physics::SystemKind::Burgers;
  }
}

void check_family(IcFamily f, std::size_t n_params) {
  const std::size_t a = family_arity(f);
  if (a == 0) {
    if (n_params % 2 == 0) throw InvalidArgument("piecewise IC needs v0, (x_k, v_k)... : odd parameter count");
  } else if (n_params != a) {
    throw InvalidArgument("IC family " + std::string(to_string(f)) + " expects " + std::to_string(a) +
                          " parameters, got " + std::to_string(n_params));
  }
}

}  // namespace

void validate(const ProblemInstance& inst) {
  if (!(inst.x_hi > inst.x_lo)) throw InvalidArgument("instance: empty domain");
  if (family_system(inst.family) != inst.system.kind) {
    throw InvalidArgument("instance: IC family " + std::string(to_string(inst.family)) + " does not fit system " +
                          std::string(physics::to_string(inst.system.kind)));
  }
  check_family(inst.family, inst.params.size());
  if (!(inst.step_ratio > 0.0)) throw InvalidArgument("instance: step ratio must be positive");
  if (inst.family == IcFamily::RiemannSw && !(inst.params[0] > 0.0 && inst.params[1] > 0.0)) {
    throw InvalidArgument("shallow-water IC: depths must be positive");
  }
  if (inst.family == IcFamily::ShuOsher) {
    const auto& p = inst.params;
    if (!(p[0] > 0.0 && p[2] > 0.0 && p[3] > 0.0)) throw InvalidArgument("Euler IC: rho_l, p_l, p_r must be positive");
    if (!(std::abs(p[4]) < 1.0)) throw InvalidArgument("Euler IC: |eps| must be below 1 for positive density");
  }
}

void point_state(const ProblemInstance& inst, double x, std::span<double> out) {
  const auto& p = inst.params;
  switch (inst.family) {
    case IcFamily::Sine:
      out[0] = p[0] + p[1] * std::sin(x);
      return;
    case IcFamily::TwoState: {
      const double lo = std::min(p[2], p[3]), hi = std::max(p[2], p[3]);
      out[0] = x >= lo && x <= hi ? p[0] : p[1];
      return;
    }
    case IcFamily::Piecewise: {
      double v = p[0];
      for (std::size_t k = 1; k + 1 < p.size(); k += 2)
        if (x >= p[k]) v = p[k + 1];
      out[0] = v;
      return;
    }
    case IcFamily::RiemannSw: {
      const bool left = x <= p[4];
      const double h = left ? p[0] : p[1], v = left ? p[2] : p[3];
      out[0] = h;
      out[1] = h * v;
      return;
    }
    case IcFamily::ShuOsher: {
      const double gm1 = inst.system.gamma - 1.0;
      double rho, u, pr;
      if (x <= p[5]) {
        rho = p[0];
        u = p[1];
        pr = p[2];
      } else {
        const double s = p[4] * std::sin(5.0 * x);
        rho = x <= p[6] ? 1.0 + s : 1.0 + s * std::exp(-std::pow(x - p[6], 4));
        u = 0.0;
        pr = p[3];
      }
      out[0] = rho;
      out[1] = rho * u;
      out[2] = pr / gm1 + 0.5 * rho * u * u;
      return;
    }
  }
}

std::vector<double> breakpoints(const ProblemInstance& inst) {
  const auto& p = inst.params;
  std::vector<double> b;
  switch (inst.family) {
    case IcFamily::Sine: break;
    case IcFamily::TwoState: b = {std::min(p[2], p[3]), std::max(p[2], p[3])}; break;
    case IcFamily::Piecewise:
      for (std::size_t k = 1; k < p.size(); k += 2) b.push_back(p[k]);
      break;
    case IcFamily::RiemannSw: b = {p[4]}; break;
    case IcFamily::ShuOsher: b = {p[5], p[6]}; break;
  }
  std::sort(b.begin(), b.end());
  return b;
}

const Quadrature& gauss_legendre(std::size_t points) {
  static std::mutex mu;
  static std::map<std::size_t, Quadrature> cache;
  if (points < 1 || points > 64) throw InvalidArgument("gauss_legendre: 1..64 points");
  std::lock_guard lock(mu);
  auto it = cache.find(points);
  if (it != cache.end()) return it->second;
  Quadrature q;
  q.nodes.resize(points);
  q.weights.resize(points);
  const double n = static_cast<double>(points);
  const double pi = std::acos(-1.0);
  // Newton on P_n from the Chebyshev-like initial guess; symmetric pairs.
  for (std::size_t i = 0; i < (points + 1) / 2; ++i) {
    double x = std::cos(pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= points; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      if (points == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.nodes[i] = -x;
    q.nodes[points - 1 - i] = x;
    q.weights[i] = w;
    q.weights[points - 1 - i] = w;
  }
  if (points % 2 == 1) q.nodes[points / 2] = 0.0;
  return cache.emplace(points, std::move(q)).first->second;
}

State instantiate_ic(const ProblemInstance& inst, const Grid& grid, std::size_t points) {
  validate(inst);
  const std::size_t nc = inst.system.n_components();
  const Quadrature& q = gauss_legendre(points);
  const std::vector<double> cuts = breakpoints(inst);
  State s{Field(grid.n_cells, nc), 0.0};
  std::vector<double> v(nc), acc(nc);
  for (std::size_t i = 0; i < grid.n_cells; ++i) {
    const double a = grid.x_lo + static_cast<double>(i) * grid.dx;
    const double b = i + 1 == grid.n_cells ? grid.x_hi : a + grid.dx;
    std::vector<double> edges{a};
    for (double c : cuts)
      if (c > a && c < b) edges.push_back(c);
    edges.push_back(b);
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
      const double lo = edges[e], hi = edges[e + 1];
      const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      for (std::size_t k = 0; k < q.nodes.size(); ++k) {
        point_state(inst, mid + half * q.nodes[k], v);
        for (std::size_t c = 0; c < nc; ++c) acc[c] += half * q.weights[k] * v[c];
      }
    }
    for (std::size_t c = 0; c < nc; ++c) s.u(i, c) = acc[c] / (b - a);
  }
  return s;
}

ProblemInstance Benchmark::test_instance() const {
  ProblemInstance inst;
  inst.system = system;
  inst.bc = bc;
  inst.x_lo = x_lo;
  inst.x_hi = x_hi;
  inst.family = test_family;
  inst.params = test_params;
  inst.final_time = train_time;
  inst.step_ratio = step_ratio;
  inst.meshes = train_levels;
  inst.extrapolation = test_family != sample_family || !within_ranges(test_params);
  return inst;
}

ProblemInstance Benchmark::sample_instance(std::mt19937_64& rng) const {
  ProblemInstance inst = test_instance();
  inst.family = sample_family;
  inst.params.clear();
  for (const auto& r : ranges) {
    std::uniform_real_distribution<double> d(r.lo, r.hi);
    inst.params.push_back(r.lo == r.hi ? r.lo : d(rng));
  }
  inst.extrapolation = false;
  return inst;
}

bool Benchmark::within_ranges(std::span<const double> params) const {
  if (params.size() != ranges.size()) return false;
  for (std::size_t k = 0; k < params.size(); ++k)
    if (params[k] < ranges[k].lo || params[k] > ranges[k].hi) return false;
  return true;
}

namespace {

template <class T>
T required(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw InvalidArgument(where + ": missing key \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(where + ": bad value for \"" + key + "\": " + e.what());
  }
}

std::vector<scheme::SchemeKind> parse_schemes(const json& j) {
  std::vector<scheme::SchemeKind> out;
  for (const auto& s : j) out.push_back(scheme::parse_scheme_kind(s.get<std::string>()));
  return out;
}

}  // namespace

Benchmark parse_benchmark(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("benchmark JSON: ") + e.what(), e.byte);
  }
  Benchmark b;
  b.id = required<std::string>(j, "id", "benchmark");
  const std::string where = "benchmark " + b.id;
  const json& sys = j.at("system");
  const auto kind = physics::parse_system_kind(required<std::string>(sys, "kind", where));
  switch (kind) {
    case physics::SystemKind::Burgers: b.system = physics::SystemSpec::burgers(); break;
    case physics::SystemKind::ShallowWater: b.system = physics::SystemSpec::shallow_water(sys.value("g", 1.0)); break;
    case physics::SystemKind::Euler: b.system = physics::SystemSpec::euler(sys.value("gamma", 1.4)); break;
  }
  b.bc = parse_boundary_condition(required<std::string>(j, "bc", where));
  const auto domain = required<std::vector<double>>(j, "domain", where);
  if (domain.size() != 2) throw InvalidArgument(where + ": domain must be [lo, hi]");
  b.x_lo = domain[0];
  b.x_hi = domain[1];

  const json& samp = j.at("sampling");
  b.sample_family = parse_ic_family(required<std::string>(samp, "family", where));
  for (const auto& r : samp.at("parameters")) {
    ParamRange pr{required<std::string>(r, "name", where), required<double>(r, "lo", where),
                  required<double>(r, "hi", where)};
    if (pr.hi < pr.lo) throw InvalidArgument(where + ": range " + pr.name + " has hi < lo");
    b.ranges.push_back(pr);
  }
  check_family(b.sample_family, b.ranges.size());

  const json& test = j.at("test");
  b.test_family = parse_ic_family(required<std::string>(test, "family", where));
  b.test_params = required<std::vector<double>>(test, "params", where);

  const json& tr = j.at("training");
  b.train_time = required<double>(tr, "final_time", where);
  b.step_ratio = required<double>(tr, "step_ratio", where);
  b.train_levels = required<std::vector<std::size_t>>(tr, "mesh_levels", where);
  b.window = required<std::size_t>(tr, "window", where);
  b.unroll = required<std::size_t>(tr, "unroll", where);
  b.n_traj = required<std::size_t>(tr, "n_traj", where);
  b.reference_mesh = required<std::size_t>(j, "reference_mesh", where);
  if (b.unroll < 1 || b.unroll > b.window) throw InvalidArgument(where + ": need 1 <= unroll <= window");

  for (const auto& e : j.value("experiments", json::array())) {
    ExperimentGroup g;
    g.purpose = required<std::string>(e, "purpose", where);
    g.meshes = required<std::vector<std::size_t>>(e, "meshes", where);
    g.times = required<std::vector<double>>(e, "times", where);
    g.schemes = parse_schemes(e.at("schemes"));
    g.step_ratios = e.value("step_ratios", std::vector<double>{});
    if (e.contains("instance")) {
      g.custom_instance = true;
      g.family = parse_ic_family(e.at("instance").value("family", std::string(to_string(b.sample_family))));
      g.params = required<std::vector<double>>(e.at("instance"), "params", where);
    }
    b.experiments.push_back(std::move(g));
  }
  validate(b.test_instance());
  return b;
}

std::filesystem::path data_directory() {
  if (const char* env = std::getenv("HYPERWENO_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return HYPERWENO_DEFAULT_DATA_DIR;
}

std::vector<std::string> benchmark_ids() { return {"burgers1", "burgers2", "shallow", "euler"}; }

Benchmark load_benchmark(std::string_view id_or_path) {
  std::filesystem::path p(id_or_path);
  if (!std::filesystem::exists(p)) {
    p = data_directory() / "benchmarks" / (std::string(id_or_path) + ".json");
    if (!std::filesystem::exists(p)) throw InvalidArgument("unknown benchmark: " + std::string(id_or_path));
  }
  const std::string text = io::read_file(p);
  return parse_benchmark(text);
}

std::string Experiment::key() const {
  std::ostringstream os;
  os << benchmark << '/' << purpose << '/' << scheme::to_string(scheme) << "/N" << mesh << "/T" << final_time
     << "/r" << step_ratio;
  if (instance.extrapolation) {
    os << "/ic";
    for (double v : instance.params) os << ':' << v;
  }
  return os.str();
}

std::vector<Experiment> experiment_matrix(const Benchmark& bench) {
  std::vector<Experiment> out;
  std::set<std::string> seen_refs;
  for (const auto& g : bench.experiments) {
    ProblemInstance inst = bench.test_instance();
    if (g.custom_instance) {
      inst.family = g.family;
      inst.params = g.params;
      inst.extrapolation = g.family != bench.sample_family || !bench.within_ranges(g.params);
    }
    validate(inst);
    const std::vector<double> ratios = g.step_ratios.empty() ? std::vector<double>{bench.step_ratio} : g.step_ratios;
    for (double t : g.times) {
      for (double r : ratios) {
        for (std::size_t n : g.meshes) {
          for (auto k : g.schemes) {
            Experiment e{bench.id, g.purpose, inst, n, k, t, r};
            e.instance.final_time = t;
            e.instance.step_ratio = r;
            e.instance.meshes = g.meshes;
            out.push_back(std::move(e));
          }
        }
      }
      Experiment ref{bench.id, "reference", inst, bench.reference_mesh, scheme::SchemeKind::Classical, t,
                     bench.step_ratio};
      ref.instance.final_time = t;
      ref.instance.step_ratio = bench.step_ratio;
      ref.instance.meshes = {bench.reference_mesh};
      if (seen_refs.insert(ref.key()).second) out.push_back(std::move(ref));
    }
  }
  return out;
}

stepper::RolloutRecord run_instance(const scheme::Model& model, const ProblemInstance& inst, std::size_t n_cells,
                                    double final_time, double step_ratio) {
  if (model.system.kind != inst.system.kind) throw InvalidArgument("run: model and instance systems differ");
  const Grid grid = make_grid(inst.x_lo, inst.x_hi, n_cells);
  const auto sched = stepper::schedule(final_time, grid.dx, step_ratio > 0.0 ? step_ratio : inst.step_ratio);
  return scheme::run_rollout(model, grid, inst.bc, instantiate_ic(inst, grid), sched.n_steps, sched.dt);
}

std::vector<ConvergenceRow> convergence_study(const scheme::Model& model, const ProblemInstance& inst,
                                              const std::vector<std::size_t>& meshes, double final_time,
                                              std::size_t reference_mesh, double step_ratio) {
  for (std::size_t n : meshes) {
    if (n == 0 || reference_mesh % n != 0) {
      throw InvalidArgument("convergence: reference mesh " + std::to_string(reference_mesh) +
                            " is not a multiple of N=" + std::to_string(n));
    }
  }
  const scheme::Model classical = scheme::make_model(scheme::SchemeKind::Classical, inst.system, 0);
  const auto ref = run_instance(classical, inst, reference_mesh, final_time, step_ratio);
  if (ref.diverged) throw StepDiverged("convergence: reference run diverged: " + ref.error);
  const Field& ref_u = ref.snapshots.back().u;

  std::vector<ConvergenceRow> rows;
  for (std::size_t k = 0; k < meshes.size(); ++k) {
    const std::size_t n = meshes[k];
    const auto rec = run_instance(model, inst, n, final_time, step_ratio);
    ConvergenceRow row{n, std::nan(""), std::nan(""), rec.diverged};
    if (!rec.diverged) row.mse = stepper::mean_squared_error(rec.snapshots.back().u, stepper::block_average(ref_u, reference_mesh / n));
    if (k > 0) {
      const ConvergenceRow& prev = rows.back();
      row.order = n == 2 * prev.n_cells
                      ? stepper::refinement_order(prev.mse, row.mse)
                      : 0.5 * std::log(prev.mse / row.mse) / std::log(static_cast<double>(n) / static_cast<double>(prev.n_cells));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace hyperweno::benchmarks
